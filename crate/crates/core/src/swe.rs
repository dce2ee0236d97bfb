//! Spherical-wave characterization: the `4N x 4N` transmission matrix for one
//! harmonic order, its scaled determinant, and seeded resonance searches.
//!
//! Unknowns are ordered `(a_1^+, b_1^+, a_1^-, b_1^-, a_2^+, ...)` for the field
//!
//! * `c_n j_n(kr) + a_1^+ h_n(kr)` outside the outermost shell,
//! * `b_j^+ j_n(k_r r) + a_j^- h_n(k_r r)` in shell `D_j`,
//! * `b_j^- j_n(kr) + a_{j+1}^+ h_n(kr)` in the host gap inside `D_j`
//!   (with `a_{N+1}^+ = 0` in the innermost ball).
//!
//! Rows come in pairs per interface `Γ_1^+, Γ_1^-, Γ_2^+, ...`: continuity of
//! the field, then `δ ∂_r u|_host = ∂_r u|_shell` divided by `k`.

use std::time::Instant;

use num_complex::Complex64;

use crate::capacitance::CapacitanceSystem;
use crate::error::{Error, Result};
use crate::model::{MaterialParams, NestedGeometry};
use crate::numerics::{lu_logdet, ComplexMatrix, LogDet};
use crate::resonance::{search_roots, ModeRoot, SearchOptions};
use crate::special::{sph_bessel_j_table, sph_hankel1_table, SphericalPair};

/// Transmission matrix of one harmonic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweMatrix {
    pub matrix: ComplexMatrix,
    pub order: usize,
    pub omega: Complex64,
    pub delta: f64,
}

/// Bessel and Hankel values of order `n` at `k r` and `k_r r` for one radius.
struct InterfaceValues {
    j_host: SphericalPair,
    h_host: SphericalPair,
    j_res: SphericalPair,
    h_res: SphericalPair,
}

fn interface_values(n: usize, k: Complex64, k_r: Complex64, r: f64) -> Result<InterfaceValues> {
    Ok(InterfaceValues {
        j_host: sph_bessel_j_table(n, k * r)?[n],
        h_host: sph_hankel1_table(n, k * r)?[n],
        j_res: sph_bessel_j_table(n, k_r * r)?[n],
        h_res: sph_hankel1_table(n, k_r * r)?[n],
    })
}

/// Assembles the transmission matrix for harmonic order `n`.
pub fn assemble_a_swe(
    n: usize,
    omega: Complex64,
    m: &MaterialParams,
    g: &NestedGeometry,
) -> Result<SweMatrix> {
    if omega == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroFrequency);
    }
    let d = m.derived(omega);
    let (delta, tau) = (d.delta, d.tau);
    let layers = g.layers();
    let dim = 4 * layers;
    let mut a = ComplexMatrix::zeros(dim, dim);

    for i in 0..layers {
        let base = 4 * i;
        // Γ_i^+ : host region outside (coefficients b_{i-1}^-, a_i^+)
        let v = interface_values(n, d.k, d.k_r, g.outer(i + 1))?;
        let (r0, r1) = (base, base + 1);
        a[(r0, base)] = -v.h_host.value;
        a[(r0, base + 1)] = v.j_res.value;
        a[(r0, base + 2)] = v.h_res.value;
        a[(r1, base)] = -delta * v.h_host.derivative;
        a[(r1, base + 1)] = tau * v.j_res.derivative;
        a[(r1, base + 2)] = tau * v.h_res.derivative;
        if i > 0 {
            a[(r0, base - 1)] = -v.j_host.value;
            a[(r1, base - 1)] = -delta * v.j_host.derivative;
        }

        // Γ_i^- : host gap inside (coefficients b_i^-, a_{i+1}^+)
        let v = interface_values(n, d.k, d.k_r, g.inner(i + 1))?;
        let (r2, r3) = (base + 2, base + 3);
        a[(r2, base + 1)] = -v.j_res.value;
        a[(r2, base + 2)] = -v.h_res.value;
        a[(r2, base + 3)] = v.j_host.value;
        a[(r3, base + 1)] = -tau * v.j_res.derivative;
        a[(r3, base + 2)] = -tau * v.h_res.derivative;
        a[(r3, base + 3)] = delta * v.j_host.derivative;
        if i + 1 < layers {
            a[(r2, base + 4)] = v.h_host.value;
            a[(r3, base + 4)] = delta * v.h_host.derivative;
        }
    }
    Ok(SweMatrix {
        matrix: a,
        order: n,
        omega,
        delta,
    })
}

/// Log-determinant of the order-0 transmission matrix.
pub fn swe_logdet(omega: Complex64, m: &MaterialParams, g: &NestedGeometry) -> Result<LogDet> {
    lu_logdet(&assemble_a_swe(0, omega, m, g)?.matrix)
}

/// `det A(ω) / det A(ω_ref)` given the reference log-determinant; zero when
/// the matrix is exactly singular.
pub fn scaled_det(
    omega: Complex64,
    reference: &LogDet,
    m: &MaterialParams,
    g: &NestedGeometry,
) -> Result<Complex64> {
    Ok(swe_logdet(omega, m, g)?.ratio(reference))
}

/// One resonance located by both the capacitance asymptotics and the
/// determinant search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRecord {
    /// 1-based index in ascending capacitance eigenvalue order.
    pub mode: usize,
    pub asymptotic: Complex64,
    pub exact: Complex64,
    pub abs_diff: f64,
    pub iterations: usize,
    /// `|det(exact) / det(asymptotic)|`.
    pub residual: f64,
}

/// All `N` positive-real-part resonances of a geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSpectrum {
    /// Sorted by the real part of the exact root.
    pub modes: Vec<ModeRecord>,
    /// Wall-clock seconds for determinant assembly plus root finding.
    pub root_seconds: f64,
    /// Wall-clock seconds for capacitance assembly plus eigensolve.
    pub capacitance_seconds: f64,
}

impl ResonanceSpectrum {
    /// The lowest resonance (smallest real part).
    pub fn smallest(&self) -> &ModeRecord {
        &self.modes[0]
    }

    /// Positive-real-part roots together with their mirrors `-conj(ω)`.
    pub fn with_mirrors(&self) -> Vec<Complex64> {
        self.modes
            .iter()
            .flat_map(|r| [r.exact, -r.exact.conj()])
            .collect()
    }

    pub fn speedup(&self) -> f64 {
        self.root_seconds / self.capacitance_seconds.max(f64::MIN_POSITIVE)
    }
}

/// Finds one root of the order-0 determinant next to each capacitance
/// asymptotic frequency.
pub fn find_resonances_swe(
    m: &MaterialParams,
    g: &NestedGeometry,
    opts: &SearchOptions,
) -> Result<ResonanceSpectrum> {
    let t0 = Instant::now();
    let cs = CapacitanceSystem::new(g)?;
    let seeds = cs.asymptotic_frequencies(m);
    let capacitance_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let roots = find_swe_roots(m, g, &seeds, opts)?;
    let root_seconds = t1.elapsed().as_secs_f64();

    let mut modes: Vec<ModeRecord> = roots
        .into_iter()
        .map(|r| ModeRecord {
            mode: r.mode,
            asymptotic: r.seed,
            exact: r.root,
            abs_diff: (r.root - r.seed).norm(),
            iterations: r.iterations,
            residual: r.residual,
        })
        .collect();
    if let Some(bad) = modes.iter().find(|r| r.exact.re <= 0.0) {
        return Err(Error::NoConvergence {
            iterations: bad.iterations,
            last: bad.exact,
            residual: bad.residual,
        });
    }
    modes.sort_by(|a, b| a.exact.re.total_cmp(&b.exact.re));
    Ok(ResonanceSpectrum {
        modes,
        root_seconds,
        capacitance_seconds,
    })
}

/// Seeded roots of the order-0 determinant.
pub fn find_swe_roots(
    m: &MaterialParams,
    g: &NestedGeometry,
    seeds: &[Complex64],
    opts: &SearchOptions,
) -> Result<Vec<ModeRoot>> {
    search_roots(|w| swe_logdet(w, m, g), seeds, opts)
}
