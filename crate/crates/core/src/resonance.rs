//! Seeded Muller searches on log-determinants, shared by the spherical-wave
//! and DtN characterizations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{muller_find_root, LogDet, MullerOptions};

/// Controls for a family of seeded root searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub muller: MullerOptions,
    pub execution: Execution,
    /// Two roots closer than this are treated as the same root.
    pub collision_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            muller: MullerOptions::default(),
            execution: Execution::default(),
            collision_tol: 1e-8,
        }
    }
}

/// One converged root, tied to the seed it started from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRoot {
    /// 1-based mode index (order of the seeds).
    pub mode: usize,
    pub seed: Complex64,
    pub root: Complex64,
    pub iterations: usize,
    /// `|det(root) / det(seed)|`.
    pub residual: f64,
}

/// Runs one Muller search per seed on `det(ω) / det(seed)`.
///
/// If two searches land on the same root, the one that travelled further
/// from its seed is rerun with the other root divided out. A second
/// collision is reported as an error.
pub fn search_roots<F>(
    logdet: F,
    seeds: &[Complex64],
    opts: &SearchOptions,
) -> Result<Vec<ModeRoot>>
where
    F: Fn(Complex64) -> Result<LogDet> + Sync,
{
    let first: Vec<Result<ModeRoot>> = opts
        .execution
        .map_range(seeds.len(), |i| solve_one(&logdet, i, seeds[i], &[], opts));
    let mut roots = first.into_iter().collect::<Result<Vec<_>>>()?;

    let mut retried = vec![false; roots.len()];
    while let Some((_, redo)) = find_collision(&roots, opts.collision_tol) {
        if retried[redo] {
            let (a, b) = find_collision(&roots, opts.collision_tol).unwrap();
            return Err(Error::RootCollision {
                first: a.min(b) + 1,
                second: a.max(b) + 1,
                at: roots[redo].root,
            });
        }
        retried[redo] = true;
        let others: Vec<Complex64> = roots
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != redo)
            .map(|(_, r)| r.root)
            .collect();
        roots[redo] = solve_one(&logdet, redo, seeds[redo], &others, opts)?;
    }
    Ok(roots)
}

fn solve_one<F>(
    logdet: &F,
    index: usize,
    seed: Complex64,
    deflate: &[Complex64],
    opts: &SearchOptions,
) -> Result<ModeRoot>
where
    F: Fn(Complex64) -> Result<LogDet>,
{
    let reference = logdet(seed)?;
    if reference.is_singular() {
        return Ok(ModeRoot {
            mode: index + 1,
            seed,
            root: seed,
            iterations: 0,
            residual: 0.0,
        });
    }
    let deflation =
        |w: Complex64| -> Complex64 { deflate.iter().map(|&r| (seed - r) / (w - r)).product() };
    let f = |w: Complex64| -> Result<Complex64> { Ok(logdet(w)?.ratio(&reference) * deflation(w)) };
    let found = muller_find_root(f, seed, &opts.muller)?;
    Ok(ModeRoot {
        mode: index + 1,
        seed,
        root: found.root,
        iterations: found.iterations,
        residual: logdet(found.root)?.ratio(&reference).norm(),
    })
}

/// `(keep, redo)` for the first colliding pair, `redo` being the root further
/// from its seed.
fn find_collision(roots: &[ModeRoot], tol: f64) -> Option<(usize, usize)> {
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if (roots[i].root - roots[j].root).norm() < tol {
                let di = (roots[i].root - roots[i].seed).norm();
                let dj = (roots[j].root - roots[j].seed).norm();
                return Some(if di <= dj { (i, j) } else { (j, i) });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn log_of(v: Complex64) -> LogDet {
        LogDet {
            log_magnitude: v.norm().ln(),
            phase: v.arg(),
        }
    }

    #[test]
    fn finds_planted_roots() {
        let planted = [c(1.0, -0.1), c(2.0, -0.2), c(3.0, -0.05)];
        let f = |w: Complex64| Ok(log_of(planted.iter().map(|&r| w - r).product()));
        let seeds = [c(1.01, 0.0), c(1.98, -0.19), c(3.02, -0.04)];
        let roots = search_roots(f, &seeds, &SearchOptions::default()).unwrap();
        for (r, p) in roots.iter().zip(&planted) {
            assert!((r.root - p).norm() < 1e-10);
        }
    }

    #[test]
    fn deflation_separates_shared_basin() {
        // both seeds sit next to the first root; the second must be pushed
        // to the other one
        let planted = [c(1.0, -0.1), c(1.5, -0.1)];
        let f = |w: Complex64| Ok(log_of(planted.iter().map(|&r| w - r).product()));
        let seeds = [c(1.0, -0.1001), c(1.0, -0.1002)];
        let roots = search_roots(f, &seeds, &SearchOptions::default()).unwrap();
        let mut found: Vec<f64> = roots.iter().map(|r| r.root.re).collect();
        found.sort_by(f64::total_cmp);
        assert!((found[0] - 1.0).abs() < 1e-10 && (found[1] - 1.5).abs() < 1e-10);
    }
}
