//! Geometry and material parameters of concentrically nested spherical shells.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Radii `(r_1^+, r_1^-, r_2^+, r_2^-, ..., r_N^+, r_N^-)` of `N` nested shells.
///
/// Shell `D_j` occupies `r_j^- < |x| < r_j^+`. The radii must be strictly
/// decreasing and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedGeometry {
    radii: Vec<f64>,
}

impl NestedGeometry {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidGeometry("no shells".into()));
        }
        if !radii.len().is_multiple_of(2) {
            return Err(Error::InvalidGeometry(format!(
                "expected an even number of radii, got {}",
                radii.len()
            )));
        }
        if let Some(r) = radii.iter().find(|r| !r.is_finite() || **r <= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "radius {r} is not a positive finite number"
            )));
        }
        if let Some(w) = radii.windows(2).position(|w| w[0] <= w[1]) {
            return Err(Error::InvalidGeometry(format!(
                "radii must strictly decrease, but entry {} ({}) <= entry {} ({})",
                w + 1,
                radii[w],
                w + 2,
                radii[w + 1]
            )));
        }
        Ok(Self { radii })
    }

    /// Builds a geometry from `(outer, inner)` pairs, outermost first.
    pub fn from_shells(shells: &[(f64, f64)]) -> Result<Self> {
        Self::new(shells.iter().flat_map(|&(a, b)| [a, b]).collect())
    }

    /// Number of shells `N`.
    pub fn layers(&self) -> usize {
        self.radii.len() / 2
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// `r_j^+` for `1 <= j <= N`.
    pub fn outer(&self, j: usize) -> f64 {
        self.radii[2 * (j - 1)]
    }

    /// `r_j^-` for `1 <= j <= N`.
    pub fn inner(&self, j: usize) -> f64 {
        self.radii[2 * (j - 1) + 1]
    }

    /// Width of the host-filled gap between `r_j^-` and `r_{j+1}^+`, `1 <= j < N`.
    pub fn gap(&self, j: usize) -> f64 {
        self.inner(j) - self.outer(j + 1)
    }

    /// Same geometry with every radius multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.radii.iter().map(|r| r * s).collect())
    }

    /// Shell index `j` (1-based) containing radius `r`, if any. Boundaries
    /// belong to the shell.
    pub fn shell_containing(&self, r: f64) -> Option<usize> {
        (1..=self.layers()).find(|&j| r <= self.outer(j) && r >= self.inner(j))
    }
}

/// `r_i^+ = N - i + 1`, `r_i^- = N - i + 1/2`.
pub fn equidistant_geometry(n: usize) -> Result<NestedGeometry> {
    if n == 0 {
        return Err(Error::InvalidGeometry(
            "at least one shell is required".into(),
        ));
    }
    let radii = (1..=n)
        .flat_map(|i| {
            let outer = (n - i + 1) as f64;
            [outer, outer - 0.5]
        })
        .collect();
    NestedGeometry::new(radii)
}

/// `|D_j| = 4π/3 ((r_j^+)^3 - (r_j^-)^3)`.
pub fn shell_volume(g: &NestedGeometry, j: usize) -> Result<f64> {
    if j == 0 || j > g.layers() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: g.layers(),
        });
    }
    let (a, b) = (g.outer(j), g.inner(j));
    Ok(4.0 * PI / 3.0 * (a.powi(3) - b.powi(3)))
}

/// Density and bulk modulus inside the resonators (`rho_r`, `kappa_r`) and in
/// the host (`rho`, `kappa`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub rho_r: f64,
    pub kappa_r: f64,
    pub rho: f64,
    pub kappa: f64,
}

impl MaterialParams {
    pub fn new(rho_r: f64, kappa_r: f64, rho: f64, kappa: f64) -> Result<Self> {
        for (name, v) in [
            ("rho_r", rho_r),
            ("kappa_r", kappa_r),
            ("rho", rho),
            ("kappa", kappa),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidMaterial(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            rho_r,
            kappa_r,
            rho,
            kappa,
        })
    }

    /// `rho_r = kappa_r = 1`, `rho = kappa = 1/delta`, so that both wave
    /// speeds are one and the density contrast is `delta`.
    pub fn from_contrast(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "contrast must be positive and finite, got {delta}"
            )));
        }
        Self::new(1.0, 1.0, 1.0 / delta, 1.0 / delta)
    }

    /// Host wave speed `v = sqrt(kappa / rho)`.
    pub fn v(&self) -> f64 {
        (self.kappa / self.rho).sqrt()
    }

    /// Resonator wave speed `v_r = sqrt(kappa_r / rho_r)`.
    pub fn v_r(&self) -> f64 {
        (self.kappa_r / self.rho_r).sqrt()
    }

    /// Density contrast `rho_r / rho`.
    pub fn delta(&self) -> f64 {
        self.rho_r / self.rho
    }

    /// Speed ratio `v / v_r`.
    pub fn tau(&self) -> f64 {
        self.v() / self.v_r()
    }

    pub fn derived(&self, omega: Complex64) -> Derived {
        let (v, v_r) = (self.v(), self.v_r());
        Derived {
            v,
            v_r,
            delta: self.delta(),
            tau: v / v_r,
            k: omega / v,
            k_r: omega / v_r,
        }
    }
}

/// Quantities derived from [`MaterialParams`] at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    pub v: f64,
    pub v_r: f64,
    pub delta: f64,
    pub tau: f64,
    /// Host wavenumber `omega / v`.
    pub k: Complex64,
    /// Resonator wavenumber `omega / v_r`.
    pub k_r: Complex64,
}
