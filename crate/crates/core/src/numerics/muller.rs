//! Muller's method for roots of analytic scalar functions.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iteration controls for [`muller_find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MullerOptions {
    /// Relative spread of the two auxiliary starting points around the seed.
    pub rel_step: f64,
    /// Step tolerance, relative to `max(1, |z|)`.
    pub tol_z: f64,
    /// Absolute residual tolerance.
    pub tol_f: f64,
    pub max_iter: usize,
}

impl Default for MullerOptions {
    fn default() -> Self {
        Self {
            rel_step: 1e-3,
            tol_z: 1e-12,
            tol_f: 1e-14,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MullerRoot {
    pub root: Complex64,
    pub iterations: usize,
    /// `|f(root)|`.
    pub residual: f64,
}

/// Finds a root of `f` near `seed`.
///
/// Starts from `seed * (1 - rel_step)`, `seed`, `seed * (1 + rel_step)`
/// (or `±rel_step` offsets when the seed is zero), fits a parabola through the
/// latest three iterates and steps to the parabola root closer to the newest
/// iterate. `f` may return an error, which is propagated.
pub fn muller_find_root<F>(mut f: F, seed: Complex64, opts: &MullerOptions) -> Result<MullerRoot>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let spread = if seed == Complex64::new(0.0, 0.0) {
        Complex64::new(opts.rel_step, 0.0)
    } else {
        seed * opts.rel_step
    };
    let mut z0 = seed - spread;
    let mut z1 = seed + spread;
    let mut z2 = seed;
    let mut f0 = eval(&mut f, z0)?;
    let mut f1 = eval(&mut f, z1)?;
    let mut f2 = eval(&mut f, z2)?;

    if f2.norm() <= opts.tol_f {
        return Ok(MullerRoot {
            root: z2,
            iterations: 0,
            residual: f2.norm(),
        });
    }

    for iter in 1..=opts.max_iter {
        let h1 = z1 - z0;
        let h2 = z2 - z1;
        if h1.norm() == 0.0 || h2.norm() == 0.0 || (h1 + h2).norm() == 0.0 {
            return Err(Error::DegenerateTriple { at: z2 });
        }
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * f2).sqrt();
        let plus = b + disc;
        let minus = b - disc;
        let denom = if plus.norm() >= minus.norm() {
            plus
        } else {
            minus
        };
        let dz = if denom.norm() > 0.0 {
            -2.0 * f2 / denom
        } else if f2.norm() > 0.0 {
            return Err(Error::DegenerateTriple { at: z2 });
        } else {
            Complex64::new(0.0, 0.0)
        };
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            return Err(Error::DegenerateTriple { at: z2 });
        }
        let z3 = z2 + dz;
        let f3 = eval(&mut f, z3)?;

        let step_ok = dz.norm() <= opts.tol_z * z3.norm().max(1.0);
        if step_ok || f3.norm() <= opts.tol_f {
            return Ok(MullerRoot {
                root: z3,
                iterations: iter,
                residual: f3.norm(),
            });
        }
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f2;
        z2 = z3;
        f2 = f3;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        last: z2,
        residual: f2.norm(),
    })
}

fn eval<F>(f: &mut F, z: Complex64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let v = f(z)?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("function value in Muller iteration"))
    }
}
