//! Plane-wave scattering by nested shells: per-harmonic solves, field
//! evaluation, resonator L2 norms, frequency sweeps, the modal decomposition
//! and the monopole far field.
//!
//! The incident wave `e^{ik x·d}` is expanded as `Σ_n i^n (2n+1) j_n(kr)
//! P_n(cos θ)` with `θ` the angle between `x` and `d`; the coefficient layout
//! of each harmonic is described in [`crate::swe`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::capacitance::CapacitanceSystem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{MaterialParams, NestedGeometry};
use crate::numerics::{legendre_table, ComplexMatrix, GaussLegendre, LuFactorization};
use crate::special::{sph_bessel_j_table, sph_hankel1_table, N_MAX};
use crate::swe::assemble_a_swe;

pub type Point = [f64; 3];

/// Radial Gauss–Legendre nodes per shell for [`field_l2_norm`].
pub const L2_NODES: usize = 32;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients of all harmonics up to `n_max` for one incident plane wave.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub omega_in: f64,
    /// Unit propagation direction.
    pub direction: Point,
    pub n_max: usize,
    /// `coefficients[n]` has length `4N`, ordered as the transmission matrix.
    pub coefficients: Vec<Vec<Complex64>>,
    pub geometry: NestedGeometry,
    pub materials: MaterialParams,
}

/// `i^n (2n+1)`.
pub fn plane_wave_coefficient(n: usize) -> Complex64 {
    I.powu(n as u32) * (2 * n + 1) as f64
}

/// Solves the transmission problem for every harmonic `0..=n_max`.
pub fn solve_scattering(
    omega_in: f64,
    direction: Point,
    n_max: usize,
    m: &MaterialParams,
    g: &NestedGeometry,
) -> Result<ScatteringSolution> {
    if !(omega_in.is_finite() && omega_in > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "incident frequency must be positive, got {omega_in}"
        )));
    }
    if n_max > N_MAX {
        return Err(Error::OrderTooLarge(n_max));
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm.is_finite() && (norm - 1.0).abs() < 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "incidence direction must be a unit vector, |d| = {norm}"
        )));
    }
    let omega = Complex64::new(omega_in, 0.0);
    let d = m.derived(omega);
    let r1 = g.outer(1);
    let coefficients = (0..=n_max)
        .map(|n| {
            let a = assemble_a_swe(n, omega, m, g)?.matrix;
            let jt = sph_bessel_j_table(n, d.k * r1)?;
            let cn = plane_wave_coefficient(n);
            let mut rhs = vec![ZERO; a.rows()];
            rhs[0] = cn * jt[n].value;
            rhs[1] = d.delta * cn * jt[n].derivative;
            equilibrated_solve(&a, &rhs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScatteringSolution {
        omega_in,
        direction,
        n_max,
        coefficients,
        geometry: g.clone(),
        materials: *m,
    })
}

/// Column- then row-equilibrated LU solve; higher harmonics mix entries of
/// wildly different size (`h_n` grows like `z^{-n-1}`, `j_n` decays like
/// `z^n`).
fn equilibrated_solve(a: &ComplexMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.rows();
    let col_scale: Vec<f64> = (0..n)
        .map(|c| {
            let s = (0..n).map(|r| a[(r, c)].norm()).fold(0.0, f64::max);
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    let scaled = ComplexMatrix::from_fn(n, n, |r, c| a[(r, c)] * col_scale[c]);
    let row_scale: Vec<f64> = (0..n)
        .map(|r| {
            let s = scaled.row(r).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    let scaled = ComplexMatrix::from_fn(n, n, |r, c| scaled[(r, c)] * row_scale[r]);
    let b: Vec<Complex64> = rhs.iter().zip(&row_scale).map(|(x, s)| x * s).collect();
    let y = LuFactorization::new(&scaled)?.solve(&b)?;
    Ok(y.iter().zip(&col_scale).map(|(x, s)| x * s).collect())
}

/// Which part of space a radius falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Exterior,
    /// Inside shell `D_j` (1-based).
    Shell(usize),
    /// Host gap inside `D_j`; `Gap(N)` is the innermost ball.
    Gap(usize),
}

pub fn region_of(g: &NestedGeometry, r: f64) -> Region {
    if r >= g.outer(1) {
        return Region::Exterior;
    }
    for j in 1..=g.layers() {
        if r >= g.inner(j) {
            if r <= g.outer(j) {
                return Region::Shell(j);
            }
            return Region::Gap(j - 1);
        }
    }
    Region::Gap(g.layers())
}

impl ScatteringSolution {
    pub fn layers(&self) -> usize {
        self.geometry.layers()
    }

    pub fn wavenumbers(&self) -> (Complex64, Complex64) {
        let d = self.materials.derived(Complex64::new(self.omega_in, 0.0));
        (d.k, d.k_r)
    }

    /// Scattered-wave coefficient `a_{1,n}^+`.
    pub fn scattering_coefficient(&self, n: usize) -> Complex64 {
        self.coefficients[n][0]
    }

    /// Radial factors `R_n(r)`, `n = 0..=n_max`, of the total field, so that
    /// `u(x) = Σ R_n(|x|) P_n(cos θ)`. Boundary radii are evaluated with the
    /// inner representation of the region they close.
    pub fn radial_factors(&self, r: f64) -> Result<Vec<Complex64>> {
        self.radial_in_region(r, region_of(&self.geometry, r))
    }

    /// As [`Self::radial_factors`] but with the region forced, which allows
    /// evaluating both one-sided limits at an interface.
    pub fn radial_in_region(&self, r: f64, region: Region) -> Result<Vec<Complex64>> {
        let (k, k_r) = self.wavenumbers();
        let nm = self.n_max;
        let c = &self.coefficients;
        let out = match region {
            Region::Exterior => {
                let jt = sph_bessel_j_table(nm, k * r)?;
                let ht = sph_hankel1_table(nm, k * r)?;
                (0..=nm)
                    .map(|n| plane_wave_coefficient(n) * jt[n].value + c[n][0] * ht[n].value)
                    .collect()
            }
            Region::Shell(j) => {
                let base = 4 * (j - 1);
                let jt = sph_bessel_j_table(nm, k_r * r)?;
                let ht = sph_hankel1_table(nm, k_r * r)?;
                (0..=nm)
                    .map(|n| c[n][base + 1] * jt[n].value + c[n][base + 2] * ht[n].value)
                    .collect()
            }
            Region::Gap(j) => {
                let base = 4 * (j - 1);
                let jt = sph_bessel_j_table(nm, k * r)?;
                if j == self.layers() {
                    (0..=nm).map(|n| c[n][base + 3] * jt[n].value).collect()
                } else {
                    let ht = sph_hankel1_table(nm, k * r)?;
                    (0..=nm)
                        .map(|n| c[n][base + 3] * jt[n].value + c[n][base + 4] * ht[n].value)
                        .collect()
                }
            }
        };
        Ok(out)
    }

    fn cos_angle(&self, x: &Point) -> (f64, f64) {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return (0.0, 1.0);
        }
        let dot: f64 = x.iter().zip(&self.direction).map(|(a, b)| a * b).sum();
        (r, (dot / r).clamp(-1.0, 1.0))
    }

    /// Total field at one point.
    pub fn field_at(&self, x: &Point) -> Result<Complex64> {
        let (r, cos) = self.cos_angle(x);
        let radial = self.radial_factors(r)?;
        let p = legendre_table(self.n_max, cos);
        Ok(radial.iter().zip(&p).map(|(f, pn)| f * pn).sum())
    }

    /// Scattered field `Σ a_{1,n}^+ h_n(k|x|) P_n(cos θ)`, meaningful outside
    /// the outermost shell.
    pub fn scattered_at(&self, x: &Point) -> Result<Complex64> {
        let (r, cos) = self.cos_angle(x);
        let (k, _) = self.wavenumbers();
        let ht = sph_hankel1_table(self.n_max, k * r)?;
        let p = legendre_table(self.n_max, cos);
        Ok((0..=self.n_max)
            .map(|n| self.coefficients[n][0] * ht[n].value * p[n])
            .sum())
    }
}

/// Total field at each point.
pub fn eval_field(sol: &ScatteringSolution, points: &[Point]) -> Result<Vec<Complex64>> {
    points.iter().map(|x| sol.field_at(x)).collect()
}

/// `||u||_{L^2(D)}` over the union of the shells, with `nodes` radial
/// Gauss–Legendre points per shell and exact angular integration.
pub fn field_l2_norm_with(sol: &ScatteringSolution, nodes: usize) -> Result<f64> {
    let rule = GaussLegendre::new(nodes);
    let g = &sol.geometry;
    let mut total = 0.0;
    for j in 1..=g.layers() {
        for (r, w) in rule.mapped(g.inner(j), g.outer(j)) {
            let radial = sol.radial_in_region(r, Region::Shell(j))?;
            let s: f64 = radial
                .iter()
                .enumerate()
                .map(|(n, f)| 4.0 * PI / (2 * n + 1) as f64 * f.norm_sqr())
                .sum();
            total += w * s * r * r;
        }
    }
    Ok(total.sqrt())
}

pub fn field_l2_norm(sol: &ScatteringSolution) -> Result<f64> {
    field_l2_norm_with(sol, L2_NODES)
}

/// One frequency of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub omega: f64,
    pub l2_norm: f64,
    /// `|a_{1,0}^+|`.
    pub monopole_coeff_abs: f64,
}

/// Evaluates the resonator L2 norm and monopole strength at each frequency.
pub fn sweep(
    omegas: &[f64],
    direction: Point,
    n_max: usize,
    m: &MaterialParams,
    g: &NestedGeometry,
    exec: Execution,
) -> Result<Vec<SweepPoint>> {
    exec.map(omegas, |&w| {
        let sol = solve_scattering(w, direction, n_max, m, g)?;
        Ok(SweepPoint {
            omega: w,
            l2_norm: field_l2_norm(&sol)?,
            monopole_coeff_abs: sol.scattering_coefficient(0).norm(),
        })
    })
    .into_iter()
    .collect()
}

/// `steps` equally spaced values from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) || steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "sweep range must satisfy 0 < min < max with at least two steps, got [{lo}, {hi}] x {steps}"
        )));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Indices of strict interior local maxima.
pub fn find_peaks(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// Mean and spread of `|u|` and the complex mean of `u` over one shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellStats {
    pub shell: usize,
    pub mean: Complex64,
    pub mean_abs: f64,
    pub std_abs: f64,
    /// `std_abs / mean_abs`.
    pub cv: f64,
    /// Mean and standard deviation of `Re u`.
    pub mean_re: f64,
    pub std_re: f64,
}

/// Samples `u` at `samples` radii per shell, half along `+d` and half along
/// `-d`, at the midpoints of a uniform radial subdivision.
pub fn shell_statistics(sol: &ScatteringSolution, samples: usize) -> Result<Vec<ShellStats>> {
    let g = &sol.geometry;
    let half = samples.div_ceil(2).max(1);
    let d = sol.direction;
    (1..=g.layers())
        .map(|j| {
            let (lo, hi) = (g.inner(j), g.outer(j));
            let mut values = Vec::with_capacity(2 * half);
            for sign in [1.0, -1.0] {
                for i in 0..half {
                    let r = lo + (hi - lo) * (i as f64 + 0.5) / half as f64;
                    let x = [sign * r * d[0], sign * r * d[1], sign * r * d[2]];
                    values.push(sol.field_at(&x)?);
                }
            }
            let count = values.len() as f64;
            let mean = values.iter().sum::<Complex64>() / count;
            let abs: Vec<f64> = values.iter().map(|z| z.norm()).collect();
            let (mean_abs, std_abs) = mean_std(&abs);
            let re: Vec<f64> = values.iter().map(|z| z.re).collect();
            let (mean_re, std_re) = mean_std(&re);
            Ok(ShellStats {
                shell: j,
                mean,
                mean_abs,
                std_abs,
                cv: if mean_abs > 0.0 {
                    std_abs / mean_abs
                } else {
                    0.0
                },
                mean_re,
                std_re,
            })
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Number of sign changes between consecutive shells of a shell-wise complex
/// amplitude, after rotating it by the phase that makes it as real as
/// possible (volume-weighted) and fixing the outermost shell positive.
///
/// Near a resonance the total field is dominated by one mode whose complex
/// prefactor is close to purely imaginary, so the sign structure lives in the
/// common phase rather than in `Re u`.
pub fn sign_changes(means: &[Complex64], volumes: &[f64]) -> usize {
    let weighted: Complex64 = means.iter().zip(volumes).map(|(m, v)| m * m * *v).sum();
    let rot = Complex64::from_polar(1.0, -weighted.arg() / 2.0);
    let mut re: Vec<f64> = means.iter().map(|m| (m * rot).re).collect();
    if re.first().is_some_and(|&x| x < 0.0) {
        re.iter_mut().for_each(|x| *x = -*x);
    }
    re.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

/// Near-resonance modal prediction of the total field inside each shell.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalPrediction {
    pub omega: f64,
    /// `ω_{M,i} = sqrt(δ λ_i) v_r`.
    pub omega_m: Vec<f64>,
    /// `γ_i = 4π (r_1^+)^2 ω (a_i^{(1)})^2 / (λ_i v)`.
    pub gamma: Vec<f64>,
    /// `terms[i][j]`: contribution of mode `i` on shell `j` (0-based).
    pub terms: Vec<Vec<Complex64>>,
    /// Sum over modes, one value per shell.
    pub amplitudes: Vec<Complex64>,
}

/// `u|_{D_j} ≈ -4π r_1^+ Σ_i a_i^{(1)} a_i^{(j)} / (λ_i (ω^2/ω_{M,i}^2 - 1 + i γ_i))`
/// for a unit-amplitude incident wave through the origin.
pub fn modal_prediction(omega: f64, m: &MaterialParams, cs: &CapacitanceSystem) -> ModalPrediction {
    let r1 = cs.outer_radius;
    let omega_m = cs.modal_frequencies(m);
    let n = cs.layers();
    let gamma: Vec<f64> = (0..n)
        .map(|i| {
            let a1 = cs.outer_component(i);
            4.0 * PI * r1 * r1 * omega * a1 * a1 / (cs.lambdas[i] * m.v())
        })
        .collect();
    let terms: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let den = Complex64::new(omega * omega / (omega_m[i] * omega_m[i]) - 1.0, gamma[i]);
            let weight = -4.0 * PI * r1 * cs.outer_component(i) / (cs.lambdas[i] * den);
            cs.vectors[i].iter().map(|aj| weight * *aj).collect()
        })
        .collect();
    let amplitudes = (0..n).map(|j| terms.iter().map(|t| t[j]).sum()).collect();
    ModalPrediction {
        omega,
        omega_m,
        gamma,
        terms,
        amplitudes,
    }
}

/// The 26 unit directions `(a, b, c) / |(a, b, c)|`, `a, b, c ∈ {-1, 0, 1}`.
pub fn sphere_directions() -> Vec<Point> {
    let mut out = Vec::with_capacity(26);
    for a in -1i32..=1 {
        for b in -1i32..=1 {
            for c in -1i32..=1 {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let v = [a as f64, b as f64, c as f64];
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                out.push([v[0] / n, v[1] / n, v[2] / n]);
            }
        }
    }
    out
}

/// Monopole fit of the scattered far field.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    /// Mean of `u^s(x) / G_k(x)` over the sampled directions.
    pub amplitude: Complex64,
    /// Largest `|sample - amplitude| / |amplitude|` (zero when the amplitude
    /// vanishes).
    pub direction_variation: f64,
    pub samples: Vec<Complex64>,
}

/// Outgoing fundamental solution `G_k(x) = -e^{ik|x|} / (4π|x|)`.
pub fn fundamental_solution(k: Complex64, r: f64) -> Complex64 {
    -(I * k * r).exp() / (4.0 * PI * r)
}

/// Samples `u^s / G_k` on the sphere of the given radius.
pub fn far_field_monopole(sol: &ScatteringSolution, radius: f64) -> Result<FarField> {
    if radius < sol.geometry.outer(1) {
        return Err(Error::InvalidArgument(format!(
            "far-field radius {radius} lies inside the resonator"
        )));
    }
    let (k, _) = sol.wavenumbers();
    let gk = fundamental_solution(k, radius);
    let samples = sphere_directions()
        .iter()
        .map(|d| {
            let x = [radius * d[0], radius * d[1], radius * d[2]];
            Ok(sol.scattered_at(&x)? / gk)
        })
        .collect::<Result<Vec<_>>>()?;
    let amplitude = samples.iter().sum::<Complex64>() / samples.len() as f64;
    let direction_variation = if amplitude.norm() > 0.0 {
        samples
            .iter()
            .map(|s| (s - amplitude).norm() / amplitude.norm())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(FarField {
        amplitude,
        direction_variation,
        samples,
    })
}

/// Closed-form point-scatterer amplitude
/// `16π² (r_1^+)^2 Σ_i (a_i^{(1)})^2 / (λ_i (ω^2/ω_{M,i}^2 - 1 + i γ_i))`,
/// i.e. `-4π r_1^+` times the outer-shell modal amplitude.
pub fn monopole_prediction(omega: f64, m: &MaterialParams, cs: &CapacitanceSystem) -> Complex64 {
    let r1 = cs.outer_radius;
    -4.0 * PI * r1 * modal_prediction(omega, m, cs).amplitudes[0]
}
