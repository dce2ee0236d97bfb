//! Capacitance matrix of nested shells, the generalised eigenproblem
//! `C a = λ V a`, and the leading-order resonant frequencies it predicts.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{shell_volume, MaterialParams, NestedGeometry};
use crate::numerics::{sym_tridiag_eigen, SymTridiag};

/// Relative separation below which two capacitance eigenvalues are treated as
/// colliding.
pub const DISTINCT_TOL: f64 = 1e-12;

/// Coupling strength `r_j^- r_{j+1}^+ / (r_j^- - r_{j+1}^+)` of the gap
/// between shells `j` and `j+1` (1-based, `j < N`).
pub fn gap_coupling(g: &NestedGeometry, j: usize) -> f64 {
    let a = g.inner(j);
    let b = g.outer(j + 1);
    a * b / (a - b)
}

/// Tridiagonal capacitance matrix.
///
/// Row `j` carries `4π (g_{j-1,j} + g_{j,j+1})` on the diagonal and
/// `-4π g_{j,j+1}` off it, with `g_{0,1} = r_1^+` (exterior) and
/// `g_{N,N+1} = 0` (the innermost ball is filled with host material).
pub fn build_capacitance(g: &NestedGeometry) -> SymTridiag {
    let n = g.layers();
    let couplings: Vec<f64> = (1..n).map(|j| gap_coupling(g, j)).collect();
    let diag = (0..n)
        .map(|i| {
            let left = if i == 0 { g.outer(1) } else { couplings[i - 1] };
            let right = couplings.get(i).copied().unwrap_or(0.0);
            4.0 * PI * (left + right)
        })
        .collect();
    let off = couplings.iter().map(|c| -4.0 * PI * c).collect();
    SymTridiag::new(diag, off).expect("valid geometry yields finite capacitance")
}

/// Shell volumes `|D_1|, ..., |D_N|`.
pub fn build_volume(g: &NestedGeometry) -> Vec<f64> {
    (1..=g.layers())
        .map(|j| shell_volume(g, j).expect("index in range"))
        .collect()
}

/// Solution of `C a = λ V a` with `V = diag(volumes)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigen {
    /// Strictly increasing, positive.
    pub lambdas: Vec<f64>,
    /// `V`-orthonormal: `a_i^T V a_j = δ_ij`.
    pub vectors: Vec<Vec<f64>>,
}

/// Solves `C a = λ V a` through the symmetric pencil `V^{-1/2} C V^{-1/2}`.
pub fn generalized_eigs(c: &SymTridiag, volumes: &[f64]) -> Result<GeneralizedEigen> {
    let n = c.dim();
    if volumes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: volumes.len(),
        });
    }
    if let Some(v) = volumes.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "volume {v} is not positive"
        )));
    }
    let inv_sqrt: Vec<f64> = volumes.iter().map(|v| 1.0 / v.sqrt()).collect();
    let diag = (0..n)
        .map(|i| c.diag()[i] * inv_sqrt[i] * inv_sqrt[i])
        .collect();
    let off = (0..n.saturating_sub(1))
        .map(|i| c.offdiag()[i] * inv_sqrt[i] * inv_sqrt[i + 1])
        .collect();
    let s = SymTridiag::new(diag, off)?;
    let eig = sym_tridiag_eigen(&s)?;

    if eig.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: eig.values[0],
        });
    }
    let tol = DISTINCT_TOL * s.norm_inf();
    if let Some(i) = eig.values.windows(2).position(|w| w[1] - w[0] <= tol) {
        return Err(Error::EigenvalueCollision {
            first: i + 1,
            second: i + 2,
        });
    }
    let vectors = eig
        .vectors
        .iter()
        .map(|q| q.iter().zip(&inv_sqrt).map(|(x, s)| x * s).collect())
        .collect();
    Ok(GeneralizedEigen {
        lambdas: eig.values,
        vectors,
    })
}

/// Capacitance matrix, volumes and the generalised eigenpairs of one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitanceSystem {
    pub capacitance: SymTridiag,
    pub volumes: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `r_1^+`, needed by the radiative corrections.
    pub outer_radius: f64,
}

impl CapacitanceSystem {
    pub fn new(g: &NestedGeometry) -> Result<Self> {
        let capacitance = build_capacitance(g);
        let volumes = build_volume(g);
        let GeneralizedEigen { lambdas, vectors } = generalized_eigs(&capacitance, &volumes)?;
        Ok(Self {
            capacitance,
            volumes,
            lambdas,
            vectors,
            outer_radius: g.outer(1),
        })
    }

    pub fn layers(&self) -> usize {
        self.lambdas.len()
    }

    /// First component `a_i^{(1)}` of mode `i` (0-based).
    pub fn outer_component(&self, i: usize) -> f64 {
        self.vectors[i][0]
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.lambdas
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Leading-order frequencies `ω_i^+`, one per mode, ascending in real part:
    ///
    /// `ω_i^+ = sqrt(δ λ_i) v_r - 2π (r_1^+)^2 i δ v_r^2 / v (a_i^{(1)})^2`.
    pub fn asymptotic_frequencies(&self, m: &MaterialParams) -> Vec<Complex64> {
        let (delta, v, v_r) = (m.delta(), m.v(), m.v_r());
        let r1 = self.outer_radius;
        self.lambdas
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let a1 = self.outer_component(i);
                Complex64::new(
                    (delta * l).sqrt() * v_r,
                    -2.0 * PI * r1 * r1 * delta * v_r * v_r / v * a1 * a1,
                )
            })
            .collect()
    }

    /// Resonant frequencies of the undamped pencil, `ω_{M,i} = sqrt(δ λ_i) v_r`.
    pub fn modal_frequencies(&self, m: &MaterialParams) -> Vec<f64> {
        self.lambdas
            .iter()
            .map(|l| (m.delta() * l).sqrt() * m.v_r())
            .collect()
    }
}

/// Mirror image `ω^- = -conj(ω^+)` of a resonance.
pub fn mirror(omega: Complex64) -> Complex64 {
    -omega.conj()
}

/// Convenience wrapper: `ω_i^+` for a geometry and material.
pub fn asymptotic_frequencies(cs: &CapacitanceSystem, m: &MaterialParams) -> Vec<Complex64> {
    cs.asymptotic_frequencies(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equidistant_geometry;

    /// Capacitance entries from fluxes of the harmonic potentials `V_i`, which
    /// are piecewise `α + β / r`, equal to `δ_ij` on shell `j`, decay at
    /// infinity and are bounded at the origin.
    fn flux_oracle(g: &NestedGeometry) -> Vec<Vec<f64>> {
        let n = g.layers();
        let mut c = vec![vec![0.0; n]; n];
        for i in 1..=n {
            let value = |j: usize| if j == i { 1.0 } else { 0.0 };
            for j in 1..=n {
                // outward flux through Γ_j^+ taken from the gap outside shell j
                let out = if j == 1 {
                    // V = value(1) r_1^+ / r, dV/dr = -value r_1^+ / r^2
                    let r = g.outer(1);
                    -value(1) * r / (r * r) * 4.0 * PI * r * r
                } else {
                    let (ra, rb) = (g.inner(j - 1), g.outer(j));
                    let (va, vb) = (value(j - 1), value(j));
                    // α + β/ra = va, α + β/rb = vb
                    let beta = (va - vb) / (1.0 / ra - 1.0 / rb);
                    -beta / (rb * rb) * 4.0 * PI * rb * rb
                };
                // flux into the gap inside shell j through Γ_j^-
                let inn = if j == n {
                    0.0
                } else {
                    let (ra, rb) = (g.inner(j), g.outer(j + 1));
                    let (va, vb) = (value(j), value(j + 1));
                    let beta = (va - vb) / (1.0 / ra - 1.0 / rb);
                    -beta / (ra * ra) * 4.0 * PI * ra * ra
                };
                // C_ij = -∫_{∂D_j} ∂V_i/∂ν from outside, ν the outward normal of D_j
                c[i - 1][j - 1] = -(out - inn);
            }
        }
        c
    }

    #[test]
    fn single_shell() {
        let g = equidistant_geometry(1).unwrap();
        let c = build_capacitance(&g);
        assert!((c.get(0, 0) - 4.0 * PI).abs() < 1e-14);
        let cs = CapacitanceSystem::new(&g).unwrap();
        assert!((cs.lambdas[0] - 24.0 / 7.0).abs() < 1e-13);
        assert!((cs.vectors[0][0] - (7.0 * PI / 6.0).powf(-0.5)).abs() < 1e-14);
        assert!((cs.vectors[0][0] - 0.522339).abs() < 1e-6);
    }

    #[test]
    fn two_shells_closed_form() {
        let g = equidistant_geometry(2).unwrap();
        let c = build_capacitance(&g);
        let expect = [[5.0, -3.0], [-3.0, 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((c.get(i, j) - 4.0 * PI * expect[i][j]).abs() < 1e-12);
            }
        }
        // det(C - λV) = 0 as a quadratic in λ
        let v = build_volume(&g);
        let (a, b, d) = (c.get(0, 0), c.get(0, 1), c.get(1, 1));
        let qa = v[0] * v[1];
        let qb = -(a * v[1] + d * v[0]);
        let qc = a * d - b * b;
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        let l1 = (-qb - disc) / (2.0 * qa);
        let l2 = (-qb + disc) / (2.0 * qa);
        let cs = CapacitanceSystem::new(&g).unwrap();
        assert!((cs.lambdas[0] - l1).abs() <= 1e-12 * l1);
        assert!((cs.lambdas[1] - l2).abs() <= 1e-12 * l2);
    }

    #[test]
    fn flux_oracle_matches() {
        for g in [
            equidistant_geometry(4).unwrap(),
            NestedGeometry::new(vec![3.0, 2.9, 1.2, 0.7, 0.69, 0.1]).unwrap(),
        ] {
            let c = build_capacitance(&g);
            let oracle = flux_oracle(&g);
            for (i, row) in oracle.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    let scale = c.norm_inf();
                    assert!((c.get(i, j) - x).abs() <= 1e-12 * scale, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn single_shell_frequency() {
        let g = equidistant_geometry(1).unwrap();
        let cs = CapacitanceSystem::new(&g).unwrap();
        let m = MaterialParams::from_contrast(1.0 / 6000.0).unwrap();
        let w = asymptotic_frequencies(&cs, &m)[0];
        assert!((w.re - (24.0f64 / 42000.0).sqrt()).abs() < 1e-15);
        assert!((w.im + 12.0 / 42000.0).abs() < 1e-15);
        assert!((w.re - 0.0239046).abs() < 1e-7);
        assert_eq!(mirror(w), Complex64::new(-w.re, w.im));
    }

    #[test]
    fn scaling_lambdas() {
        let g = equidistant_geometry(3).unwrap();
        let s = 2.5;
        let a = CapacitanceSystem::new(&g).unwrap();
        let b = CapacitanceSystem::new(&g.scaled(s).unwrap()).unwrap();
        for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
            assert!((x / (s * s) - y).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn rejects_indefinite_pencil() {
        let c = SymTridiag::new(vec![1.0, 1.0], vec![2.0]).unwrap();
        assert!(matches!(
            generalized_eigs(&c, &[1.0, 1.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let c = SymTridiag::new(vec![1.0, 1.0], vec![0.0]).unwrap();
        assert!(matches!(
            generalized_eigs(&c, &[1.0, 1.0]),
            Err(Error::EigenvalueCollision { .. })
        ));
    }
}
