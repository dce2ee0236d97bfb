//! Exterior Dirichlet-to-Neumann map on the `2N` interfaces (radial mode)
//! and the `2N x 2N` characterization matrix built from it.
//!
//! Interfaces are ordered `Γ_1^+, Γ_1^-, Γ_2^+, ..., Γ_N^-`. For boundary data
//! `f` the map returns the radial derivative of the host-side Helmholtz
//! solution on each interface: the outgoing exterior field at `Γ_1^+`, the
//! field in each gap between `Γ_j^-` and `Γ_{j+1}^+`, and the regular field in
//! the innermost ball at `Γ_N^-`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{MaterialParams, NestedGeometry};
use crate::numerics::{lu_logdet, ComplexMatrix, LogDet};
use crate::resonance::{search_roots, ModeRoot, SearchOptions};
use crate::special::{sph_bessel_j_table, sph_hankel1_table};

/// Below this `|k| * gap` the gap blocks use their `O(k^2)` expansion.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Relative band around `k * gap ∈ πZ \ {0}` where the map is rejected.
pub const EXCLUDED_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub type Block = [[Complex64; 2]; 2];

/// Block-diagonal DtN matrix: a scalar at `Γ_1^+`, one 2x2 block per gap
/// coupling `(Γ_j^-, Γ_{j+1}^+)`, and a scalar at `Γ_N^-`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrix {
    /// Wavenumber (zero for the series terms).
    pub k: Complex64,
    pub first: Complex64,
    pub blocks: Vec<Block>,
    pub last: Complex64,
}

impl DtnMatrix {
    /// Number of interfaces, `2N`.
    pub fn dim(&self) -> usize {
        2 * (self.blocks.len() + 1)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        m[(0, 0)] = self.first;
        for (j, b) in self.blocks.iter().enumerate() {
            let p = 2 * j + 1;
            m[(p, p)] = b[0][0];
            m[(p, p + 1)] = b[0][1];
            m[(p + 1, p)] = b[1][0];
            m[(p + 1, p + 1)] = b[1][1];
        }
        m[(n - 1, n - 1)] += self.last;
        m
    }

    pub fn apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.to_matrix().mul_vec(f)
    }
}

/// Exact DtN matrix at wavenumber `k`.
pub fn dtn_matrix(k: Complex64, g: &NestedGeometry) -> Result<DtnMatrix> {
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::NonFinite("wavenumber"));
    }
    let n = g.layers();
    let first = -1.0 / g.outer(1) + I * k;
    let blocks = (1..n)
        .map(|j| gap_block(k, g.inner(j), g.outer(j + 1), j))
        .collect::<Result<Vec<_>>>()?;
    let r = g.inner(n);
    let kr = k * r;
    check_excluded(kr, n)?;
    let jt = sph_bessel_j_table(1, kr)?;
    let last = -k * jt[1].value / jt[0].value;
    Ok(DtnMatrix {
        k,
        first,
        blocks,
        last,
    })
}

/// The `k^0` (`order = 0`) or `k^1` (`order = 1`) coefficient of the DtN
/// matrix's expansion about `k = 0`.
pub fn dtn_series_term(order: usize, g: &NestedGeometry) -> Result<DtnMatrix> {
    let n = g.layers();
    match order {
        0 => Ok(DtnMatrix {
            k: ZERO,
            first: Complex64::new(-1.0 / g.outer(1), 0.0),
            blocks: (1..n)
                .map(|j| series_block(ZERO, g.inner(j), g.outer(j + 1)))
                .collect(),
            last: ZERO,
        }),
        1 => Ok(DtnMatrix {
            k: ZERO,
            first: I,
            blocks: vec![[[ZERO; 2]; 2]; n - 1],
            last: ZERO,
        }),
        _ => Err(Error::InvalidArgument(format!(
            "DtN series term of order {order} is not available"
        ))),
    }
}

fn check_excluded(kx: Complex64, gap_index: usize) -> Result<()> {
    if kx != ZERO && kx.sin().norm() < EXCLUDED_TOL * kx.norm() {
        return Err(Error::ExcludedWavenumber { k: kx, gap_index });
    }
    Ok(())
}

/// Block for the gap `b < r < a`, `a = r_j^-`, `b = r_{j+1}^+`.
fn gap_block(k: Complex64, a: f64, b: f64, j: usize) -> Result<Block> {
    let gap = a - b;
    if k.norm() * gap < SERIES_THRESHOLD {
        return Ok(series_block(k, a, b));
    }
    let kg = k * gap;
    check_excluded(kg, j)?;
    let s = kg.sin();
    let cot = kg.cos() / s;
    Ok([
        [k * cot - 1.0 / a, -k * b / (a * s)],
        [k * a / (b * s), -k * cot - 1.0 / b],
    ])
}

/// `A^0 + k^2 A^2` for the gap `b < r < a`.
fn series_block(k: Complex64, a: f64, b: f64) -> Block {
    let g = a - b;
    let k2 = k * k;
    [
        [
            b / (a * g) - k2 * g / 3.0,
            -b / (a * g) - k2 * b * g / (6.0 * a),
        ],
        [
            a / (b * g) + k2 * a * g / (6.0 * b),
            -a / (b * g) + k2 * g / 3.0,
        ],
    ]
}

/// Characterization matrix `-k_r diag(A'_j) - δ T^k diag(A_j)` acting on the
/// coefficients `(a_1, b_1, ..., a_N, b_N)` of `u = a_j j_0(k_r r) + b_j
/// h_0(k_r r)` in shell `j`.
pub fn assemble_a_dtn(
    omega: Complex64,
    m: &MaterialParams,
    g: &NestedGeometry,
) -> Result<ComplexMatrix> {
    if omega == ZERO {
        return Err(Error::ZeroFrequency);
    }
    let d = m.derived(omega);
    let n = g.layers();
    let t = dtn_matrix(d.k, g)?.to_matrix();
    // values[p] = (j_0, h_0), slopes[p] = (j_1, h_1) at interface p
    let mut values = Vec::with_capacity(2 * n);
    let mut slopes = Vec::with_capacity(2 * n);
    for &r in g.radii() {
        let z = d.k_r * r;
        let jt = sph_bessel_j_table(1, z)?;
        let ht = sph_hankel1_table(1, z)?;
        values.push([jt[0].value, ht[0].value]);
        slopes.push([jt[1].value, ht[1].value]);
    }
    let dim = 2 * n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for p in 0..dim {
        let shell = p / 2;
        for c in 0..2 {
            out[(p, 2 * shell + c)] = -d.k_r * slopes[p][c];
        }
        // T^k couples interface p to at most three interfaces (p-1, p, p+1)
        for q in p.saturating_sub(1)..(p + 2).min(dim) {
            let tpq = t[(p, q)];
            if tpq == ZERO {
                continue;
            }
            let col_shell = q / 2;
            for c in 0..2 {
                out[(p, 2 * col_shell + c)] -= d.delta * tpq * values[q][c];
            }
        }
    }
    Ok(out)
}

/// Log-determinant of the DtN characterization matrix.
pub fn dtn_logdet(omega: Complex64, m: &MaterialParams, g: &NestedGeometry) -> Result<LogDet> {
    lu_logdet(&assemble_a_dtn(omega, m, g)?)
}

/// Seeded roots of the DtN characterization determinant.
pub fn find_resonances_dtn(
    m: &MaterialParams,
    g: &NestedGeometry,
    seeds: &[Complex64],
    opts: &SearchOptions,
) -> Result<Vec<ModeRoot>> {
    search_roots(|w| dtn_logdet(w, m, g), seeds, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equidistant_geometry;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Radial derivative at both ends of the gap `b < r < a` of
    /// `u = (p e^{ikr} + q e^{-ikr}) / r` matching `u(a) = fa`, `u(b) = fb`.
    fn plane_wave_oracle(
        k: Complex64,
        a: f64,
        b: f64,
        fa: Complex64,
        fb: Complex64,
    ) -> (Complex64, Complex64) {
        let e = |r: f64, s: f64| (s * I * k * r).exp() / r;
        let de = |r: f64, s: f64| (s * I * k * r).exp() * (s * I * k / r - 1.0 / (r * r));
        let m = [[e(a, 1.0), e(a, -1.0)], [e(b, 1.0), e(b, -1.0)]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let p = (fa * m[1][1] - m[0][1] * fb) / det;
        let q = (m[0][0] * fb - m[1][0] * fa) / det;
        (
            p * de(a, 1.0) + q * de(a, -1.0),
            p * de(b, 1.0) + q * de(b, -1.0),
        )
    }

    #[test]
    fn first_entry() {
        let g = equidistant_geometry(1).unwrap();
        let t = dtn_matrix(c(0.3, 0.0), &g).unwrap();
        assert!((t.first - c(-1.0, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn gap_block_matches_plane_wave_oracle() {
        let g = NestedGeometry::new(vec![3.0, 2.4, 1.7, 1.0, 0.8, 0.3]).unwrap();
        let k = c(1.3, -0.2);
        let t = dtn_matrix(k, &g).unwrap();
        let f = [
            c(0.3, 1.0),
            c(-1.2, 0.4),
            c(2.0, -0.5),
            c(0.1, 0.9),
            c(1.0, 1.0),
            c(-0.7, 0.2),
        ];
        let tf = t.apply(&f).unwrap();
        for j in 1..3 {
            let (da, db) = plane_wave_oracle(k, g.inner(j), g.outer(j + 1), f[2 * j - 1], f[2 * j]);
            assert!((tf[2 * j - 1] - da).norm() <= 1e-12 * da.norm().max(1.0));
            assert!((tf[2 * j] - db).norm() <= 1e-12 * db.norm().max(1.0));
        }
    }

    #[test]
    fn series_terms() {
        let g = equidistant_geometry(1).unwrap();
        let t0 = dtn_series_term(0, &g).unwrap().to_matrix();
        assert_eq!(t0[(0, 0)], c(-1.0, 0.0));
        assert_eq!(t0[(1, 1)], ZERO);
        let t1 = dtn_series_term(1, &g).unwrap().to_matrix();
        assert_eq!(t1[(0, 0)], I);
        assert_eq!(t1[(1, 1)], ZERO);
        assert!(dtn_series_term(2, &g).is_err());

        let g = equidistant_geometry(2).unwrap();
        let b = dtn_series_term(0, &g).unwrap().blocks[0];
        let expect = [[4.0 / 3.0, -4.0 / 3.0], [3.0, -3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((b[i][j] - c(expect[i][j], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_limit_is_quadratic() {
        let g = equidistant_geometry(3).unwrap();
        let t0 = dtn_series_term(0, &g).unwrap().to_matrix();
        let t1 = dtn_series_term(1, &g).unwrap().to_matrix();
        let dev = |k: f64| {
            let tk = dtn_matrix(c(k, 0.0), &g).unwrap().to_matrix();
            let mut m = 0.0f64;
            for i in 0..tk.rows() {
                for j in 0..tk.cols() {
                    let d = tk[(i, j)] - t0[(i, j)] - k * t1[(i, j)];
                    m = m.max(d.norm());
                }
            }
            m
        };
        let ratio = dev(1e-2) / dev(5e-3);
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn last_entry_vanishes_quadratically() {
        let g = equidistant_geometry(1).unwrap();
        for k in [1e-3, 1e-5] {
            let t = dtn_matrix(c(k, 0.0), &g).unwrap();
            // -k j_1/j_0 ≈ -k^2 r / 3
            assert!((t.last.re / (k * k) + 0.5 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn excluded_wavenumbers() {
        let g = equidistant_geometry(2).unwrap();
        let k = c(std::f64::consts::PI / 0.5, 0.0);
        assert!(matches!(
            dtn_matrix(k, &g),
            Err(Error::ExcludedWavenumber { gap_index: 1, .. })
        ));
        let k = c(2.0 * std::f64::consts::PI, 0.0);
        assert!(matches!(
            dtn_matrix(k, &g),
            Err(Error::ExcludedWavenumber { .. })
        ));
        assert!(dtn_matrix(c(2.0 * std::f64::consts::PI * (1.0 + 1e-6), 0.0), &g).is_ok());
    }

    #[test]
    fn conj_symmetry() {
        let g = equidistant_geometry(3).unwrap();
        let m = MaterialParams::from_contrast(1e-3).unwrap();
        let w = c(0.05, -0.002);
        let a = assemble_a_dtn(w, &m, &g).unwrap();
        let b = assemble_a_dtn(-w.conj(), &m, &g).unwrap();
        assert!(a.conj().max_abs_diff(&b) <= 1e-12 * a.max_abs());
    }

    #[test]
    fn zero_frequency_rejected() {
        let g = equidistant_geometry(1).unwrap();
        let m = MaterialParams::from_contrast(1e-3).unwrap();
        assert_eq!(assemble_a_dtn(ZERO, &m, &g), Err(Error::ZeroFrequency));
    }
}
