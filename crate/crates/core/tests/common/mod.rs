//! Independent reference implementations shared by the integration tests and
//! the acceptance suite.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use subwave::numerics::ComplexMatrix;
use subwave::NestedGeometry;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

/// Random strictly nested geometry with `n` shells: innermost radius in
/// `[0.1, 1]`, shell thicknesses and gaps in `[0.05, 2]`.
pub fn random_geometry<R: Rng>(rng: &mut R, n: usize) -> NestedGeometry {
    let mut radii = Vec::with_capacity(2 * n);
    let mut r = rng.gen_range(0.1..1.0);
    radii.push(r);
    for i in 1..2 * n {
        let _ = i;
        r += rng.gen_range(0.05..2.0);
        radii.push(r);
    }
    radii.reverse();
    NestedGeometry::new(radii).expect("generated radii are nested")
}

/// Determinant by Laplace expansion along the first row.
pub fn det_cofactor(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    if n == 1 {
        return m[(0, 0)];
    }
    if n == 2 {
        return m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    }
    let mut total = c(0.0, 0.0);
    for j in 0..n {
        let minor = ComplexMatrix::from_fn(n - 1, n - 1, |r, s| {
            m[(r + 1, if s < j { s } else { s + 1 })]
        });
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * m[(0, j)] * det_cofactor(&minor);
    }
    total
}

/// Gaussian elimination with complete pivoting.
pub fn solve_full_pivot(m: &ComplexMatrix, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = m.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut b = rhs.to_vec();
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                if a[i][j].norm() > best {
                    best = a[i][j].norm();
                    pi = i;
                    pj = j;
                }
            }
        }
        a.swap(k, pi);
        b.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        cols.swap(k, pj);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    let mut y = vec![c(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i][j] * y[j];
        }
        y[i] = s / a[i][i];
    }
    let mut x = vec![c(0.0, 0.0); n];
    for (k, &col) in cols.iter().enumerate() {
        x[col] = y[k];
    }
    x
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`
/// (Sturm sequence count).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues by bisection on Sturm counts, ascending.
pub fn sturm_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let radius = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max);
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(diag, off, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// `j_n(z) = z^n Σ_k (-z^2/2)^k / (k! (2n+2k+1)!!)`, `terms` terms.
pub fn bessel_j_series(n: usize, z: Complex64, terms: usize) -> Complex64 {
    let mut dfact = 1.0;
    for m in (1..=(2 * n + 1)).step_by(2) {
        dfact *= m as f64;
    }
    let mut term = z.powu(n as u32) / dfact;
    let mut sum = term;
    let w = -z * z / 2.0;
    for k in 1..terms {
        term *= w / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
    }
    sum
}

/// Capacitance entries from the fluxes of the harmonic potentials `V_i`:
/// piecewise `α + β/r` in each host region, `δ_ij` on shell `j`, decaying at
/// infinity and constant in the innermost ball.
pub fn capacitance_flux_oracle(g: &NestedGeometry) -> Vec<Vec<f64>> {
    let n = g.layers();
    let mut out = vec![vec![0.0; n]; n];
    for i in 1..=n {
        let value = |j: usize| if j == i { 1.0 } else { 0.0 };
        // radial derivative dV/dr on the host side of each interface
        let gap_beta = |j: usize| {
            let (ra, rb) = (g.inner(j), g.outer(j + 1));
            (value(j) - value(j + 1)) / (1.0 / ra - 1.0 / rb)
        };
        for j in 1..=n {
            let rp = g.outer(j);
            let d_outer = if j == 1 {
                -value(1) * rp / (rp * rp)
            } else {
                -gap_beta(j - 1) / (rp * rp)
            };
            let rm = g.inner(j);
            let d_inner = if j == n {
                0.0
            } else {
                -gap_beta(j) / (rm * rm)
            };
            let flux = d_outer * 4.0 * PI * rp * rp - d_inner * 4.0 * PI * rm * rm;
            out[i - 1][j - 1] = -flux;
        }
    }
    out
}

/// Radial derivative on the host side of every interface of the Helmholtz
/// solution with Dirichlet data `f`, built region by region from
/// `e^{±ikr}/r` (outgoing in the exterior, `sin(kr)/r` in the innermost ball).
pub fn dtn_exterior_oracle(k: Complex64, g: &NestedGeometry, f: &[Complex64]) -> Vec<Complex64> {
    let n = g.layers();
    let mut out = vec![c(0.0, 0.0); 2 * n];
    let wave = |r: f64, s: f64| (s * I * k * r).exp() / r;
    let dwave = |r: f64, s: f64| (s * I * k * r).exp() * (s * I * k / r - 1.0 / (r * r));

    let r1 = g.outer(1);
    out[0] = f[0] / wave(r1, 1.0) * dwave(r1, 1.0);

    for j in 1..n {
        let (a, b) = (g.inner(j), g.outer(j + 1));
        let (fa, fb) = (f[2 * j - 1], f[2 * j]);
        let m = [[wave(a, 1.0), wave(a, -1.0)], [wave(b, 1.0), wave(b, -1.0)]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let p = (fa * m[1][1] - m[0][1] * fb) / det;
        let q = (m[0][0] * fb - m[1][0] * fa) / det;
        out[2 * j - 1] = p * dwave(a, 1.0) + q * dwave(a, -1.0);
        out[2 * j] = p * dwave(b, 1.0) + q * dwave(b, -1.0);
    }

    let r = g.inner(n);
    let kr = k * r;
    // u = A sin(kr)/r, u' = A (k cos(kr)/r - sin(kr)/r^2)
    let amp = f[2 * n - 1] * r / kr.sin();
    out[2 * n - 1] = amp * (k * kr.cos() / r - kr.sin() / (r * r));
    out
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
