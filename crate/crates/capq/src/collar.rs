//! Hyperbolic geometry of the round annulus `𝔸(r, 1/r)` and the collar
//! about its core geodesic.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quadrature::integrate;
use crate::{Error, Result};

/// Absolute tolerance of [`radial_distance`].
pub const DISTANCE_TOLERANCE: f64 = 1e-10;

/// `arccos(tanh x)` for `x ≥ 0`, written as `2·atan(e^(−x))`, which keeps
/// full relative precision both for small `x` and for large `x` where the
/// result is tiny.
pub fn arccos_tanh(x: f64) -> f64 {
    2.0 * (-x).exp().atan()
}

fn check_radius(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("annulus radius must lie in (0, 1), got {r}")));
    }
    Ok(-r.ln())
}

fn check_length(ell: f64) -> Result<()> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::domain(format!("geodesic length must be positive, got {ell}")));
    }
    Ok(())
}

/// Hyperbolic density of `𝔸(r, 1/r)` at `z`.
pub fn density(r: f64, z: Complex64) -> Result<f64> {
    let big_l = check_radius(r)?;
    let rho = z.norm();
    if !(rho > r && rho < 1.0 / r) {
        return Err(Error::OutOfAnnulus {
            modulus: rho,
            inner: r,
            outer: 1.0 / r,
        });
    }
    Ok(radial_density(big_l, rho.ln()))
}

/// Density as a function of `log |z|`, for `L = log(1/r)`.
fn radial_density(big_l: f64, s: f64) -> f64 {
    FRAC_PI_2 / big_l / (s.exp() * (FRAC_PI_2 * s / big_l).cos())
}

/// Length `π² / log(1/r)` of the core geodesic `|z| = 1`.
pub fn geodesic_length(r: f64) -> Result<f64> {
    Ok(PI * PI / check_radius(r)?)
}

/// Inverse of [`geodesic_length`]: `r = e^(−π²/ℓ)`.
pub fn length_to_r(ell: f64) -> Result<f64> {
    check_length(ell)?;
    Ok((-PI * PI / ell).exp())
}

/// Hyperbolic half-width `δ₀` of the collar, from
/// `cosh(2δ₀) = 1 + 2/sinh²(ℓ/2)`.
///
/// Since `cosh 2δ = 1 + 2 sinh²δ` this is `δ₀ = asinh(1/sinh(ℓ/2))`, which
/// does not overflow as `ℓ → 0`.
pub fn collar_width(ell: f64) -> Result<f64> {
    check_length(ell)?;
    Ok((1.0 / (0.5 * ell).sinh()).asinh())
}

/// `log(1/r₀) = (2π/ℓ)·arccos(tanh(ℓ/2))`.
pub fn collar_log_inv_radius(ell: f64) -> Result<f64> {
    check_length(ell)?;
    Ok(2.0 * PI / ell * arccos_tanh(0.5 * ell))
}

/// Collar radius `r₀`; the collar is `𝔸(r₀, 1/r₀)`.
pub fn collar_radius(ell: f64) -> Result<f64> {
    Ok((-collar_log_inv_radius(ell)?).exp())
}

/// Hyperbolic length of the radial segment `ρ₁ ≤ |z| ≤ ρ₂` in `𝔸(r, 1/r)`,
/// by adaptive quadrature of the density in the variable `log |z|`.
pub fn radial_distance(r: f64, rho1: f64, rho2: f64) -> Result<f64> {
    let big_l = check_radius(r)?;
    if !(r < rho1 && rho1 <= rho2 && rho2 < 1.0 / r) {
        return Err(Error::domain(format!(
            "need r < ρ₁ ≤ ρ₂ < 1/r, got r={r}, ρ₁={rho1}, ρ₂={rho2}"
        )));
    }
    // ds along a radius is the density times d|z| = |z|·d(log|z|).
    integrate(
        |s| radial_density(big_l, s) * s.exp(),
        rho1.ln(),
        rho2.ln(),
        DISTANCE_TOLERANCE,
    )
}

/// Collar data for a geodesic of length `ell`. Radii are also given in
/// log form, since `r` underflows for `ℓ` below about `0.0014`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollarResult {
    pub ell: f64,
    pub r: f64,
    pub r0: f64,
    pub delta0: f64,
    pub log_inv_r: f64,
    pub log_inv_r0: f64,
}

impl CollarResult {
    pub fn from_length(ell: f64) -> Result<Self> {
        check_length(ell)?;
        let log_inv_r = PI * PI / ell;
        let log_inv_r0 = collar_log_inv_radius(ell)?;
        Ok(CollarResult {
            ell,
            r: (-log_inv_r).exp(),
            r0: (-log_inv_r0).exp(),
            delta0: collar_width(ell)?,
            log_inv_r,
            log_inv_r0,
        })
    }

    pub fn from_radius(r: f64) -> Result<Self> {
        Self::from_length(geodesic_length(r)?)
    }

    /// `q = (π/4)·log(1/r₀)/log(1/r)`.
    pub fn q(&self) -> f64 {
        0.25 * PI * self.log_inv_r0 / self.log_inv_r
    }

    /// `δ₀` rebuilt from the radii: `log[(1 + tan q)/(1 − tan q)]`.
    pub fn delta0_from_radii(&self) -> f64 {
        let t = self.q().tan();
        ((1.0 + t) / (1.0 - t)).ln()
    }
}
