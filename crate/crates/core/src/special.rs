//! Spherical Bessel `j_n` and spherical Hankel `h_n^(1)` functions of complex
//! argument, with derivatives.
//!
//! `j_n` comes from Miller's downward recurrence normalised against a closed
//! form (or the Taylor series of `j_0` near the origin); `h_n^(1)` from closed
//! forms for `n <= 1` and the upward recurrence beyond. Derivatives use
//! `f_n' = f_{n-1} - (n+1)/z f_n` and `f_0' = -f_1`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest supported harmonic order.
pub const N_MAX: usize = 16;

/// Below this `|z|` the order-0 and order-1 closed forms are replaced by
/// truncated Taylor/Laurent series.
pub const SMALL_ARGUMENT: f64 = 1e-3;

const MILLER_MARGIN: usize = 20;
// kept well below sqrt(f64::MAX) so complex division by f_0 cannot overflow
const RESCALE_ABOVE: f64 = 1e100;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Function value together with its derivative with respect to the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPair {
    pub value: Complex64,
    pub derivative: Complex64,
}

/// `j_n(z)` and `j_n'(z)`.
pub fn sph_bessel_j(n: usize, z: Complex64) -> Result<SphericalPair> {
    Ok(sph_bessel_j_table(n, z)?[n])
}

/// `h_n^(1)(z)` and its derivative. Fails at `z = 0`.
pub fn sph_hankel1(n: usize, z: Complex64) -> Result<SphericalPair> {
    Ok(sph_hankel1_table(n, z)?[n])
}

/// `j_0 .. j_{n_max}` with derivatives.
pub fn sph_bessel_j_table(n_max: usize, z: Complex64) -> Result<Vec<SphericalPair>> {
    check_order(n_max)?;
    check_finite(z)?;
    let top = n_max.max(1);
    if z == ZERO {
        let mut out = vec![
            SphericalPair {
                value: ZERO,
                derivative: ZERO
            };
            n_max + 1
        ];
        out[0].value = ONE;
        if n_max >= 1 {
            out[1].derivative = Complex64::new(1.0 / 3.0, 0.0);
        }
        return Ok(out);
    }
    let values = bessel_j_values(top, z);
    Ok(with_derivatives(&values, z, n_max))
}

/// `h_0^(1) .. h_{n_max}^(1)` with derivatives.
pub fn sph_hankel1_table(n_max: usize, z: Complex64) -> Result<Vec<SphericalPair>> {
    check_order(n_max)?;
    check_finite(z)?;
    if z == ZERO {
        return Err(Error::HankelAtOrigin);
    }
    let top = n_max.max(1);
    let mut values = Vec::with_capacity(top + 1);
    if z.norm() < SMALL_ARGUMENT {
        let j = bessel_j_values(1, z);
        values.push(j[0] + I * y0_series(z));
        values.push(j[1] + I * y1_series(z));
    } else {
        let e = (I * z).exp();
        values.push(-I * e / z);
        values.push(-e * (z + I) / (z * z));
    }
    for n in 1..top {
        let next = (2 * n + 1) as f64 / z * values[n] - values[n - 1];
        values.push(next);
    }
    Ok(with_derivatives(&values, z, n_max))
}

fn check_order(n: usize) -> Result<()> {
    if n > N_MAX {
        Err(Error::OrderTooLarge(n))
    } else {
        Ok(())
    }
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("special-function argument"))
    }
}

fn with_derivatives(values: &[Complex64], z: Complex64, n_max: usize) -> Vec<SphericalPair> {
    (0..=n_max)
        .map(|n| {
            let derivative = if n == 0 {
                -values[1]
            } else {
                values[n - 1] - (n + 1) as f64 / z * values[n]
            };
            SphericalPair {
                value: values[n],
                derivative,
            }
        })
        .collect()
}

/// `j_0 .. j_top` for `z != 0` by Miller's algorithm.
fn bessel_j_values(top: usize, z: Complex64) -> Vec<Complex64> {
    let start =
        top + MILLER_MARGIN + z.norm().ceil() as usize + (8.0 * z.norm().cbrt()).ceil() as usize;
    let mut f = vec![ZERO; start + 2];
    f[start] = ONE;
    for n in (1..=start).rev() {
        f[n - 1] = (2 * n + 1) as f64 / z * f[n] - f[n + 1];
        if f[n - 1].norm() > RESCALE_ABOVE {
            for v in f.iter_mut().skip(n - 1) {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    let scale = if z.norm() < SMALL_ARGUMENT {
        j0_series(z) / f[0]
    } else {
        let (j0, j1) = j0_j1_closed(z);
        if j0.norm() >= j1.norm() {
            j0 / f[0]
        } else {
            j1 / f[1]
        }
    };
    f.truncate(top + 1);
    for v in f.iter_mut() {
        *v *= scale;
    }
    f
}

fn j0_j1_closed(z: Complex64) -> (Complex64, Complex64) {
    let (s, c) = (z.sin(), z.cos());
    (s / z, s / (z * z) - c / z)
}

/// `sin z / z` through `O(z^8)`.
fn j0_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    ONE - z2 / 6.0 * (ONE - z2 / 20.0 * (ONE - z2 / 42.0 * (ONE - z2 / 72.0)))
}

/// `y_0(z) = -cos z / z` through `O(z^7)`.
fn y0_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    -(ONE - z2 / 2.0 * (ONE - z2 / 12.0 * (ONE - z2 / 30.0 * (ONE - z2 / 56.0)))) / z
}

/// `y_1(z) = -cos z / z^2 - sin z / z` through `O(z^6)`.
fn y1_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    -ONE / z2 - 0.5 + z2 / 8.0 - z2 * z2 / 144.0 + z2 * z2 * z2 / 5760.0
}
