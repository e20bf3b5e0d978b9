//! A five-stage conformal map from the round annulus `𝔸(r, 1/r)` onto the
//! twisted Teichmüller domain
//! `Ω₀ = ℂ \ ([−1, 1] ∪ {Re z = 0, |Im z| ≥ c})`, and the extremal radial
//! stretch of a round annulus.
//!
//! The stages are: scale by `r`; Joukowski `½(z + 1/z)`; the elliptic map
//! `√m·sn((2K(m)/π)·arcsin z, m)` of the slit ellipse onto the slit disc;
//! inversion `1/z`; and the rotated anti-Joukowski `i·½(z − 1/z)`. The
//! inner circle `|z| = r` goes to the segment `[−1, 1]`, the outer circle
//! to the vertical rays, and `m` solves `(π/4)·K'(m)/K(m) = log(1/r²)`.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::k_annulus_circle_map;
use crate::special::{elliptic_k, jacobi_sn, solve_modulus_equation};
use crate::{Error, Result};

/// Points closer than this to `±1` at the Joukowski stage are rejected.
pub const ENDPOINT_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Scale,
    Joukowski,
    EllipticSine,
    Inversion,
    AntiJoukowski,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Scale,
        Stage::Joukowski,
        Stage::EllipticSine,
        Stage::Inversion,
        Stage::AntiJoukowski,
    ];

    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Scale => "scale",
            Stage::Joukowski => "joukowski",
            Stage::EllipticSine => "elliptic_sine",
            Stage::Inversion => "inversion",
            Stage::AntiJoukowski => "anti_joukowski",
        }
    }
}

/// The composed map for one annulus `𝔸(r, 1/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapChain {
    pub r: f64,
    /// Elliptic modulus solving the modulus equation.
    pub m: f64,
    /// `K(m)`.
    pub big_k: f64,
    /// Half-length `√m` of the slit in the unit disc after the sn stage.
    pub slit: f64,
    /// Distance `½(m^(−1/2) − m^(1/2))` from the origin to the vertical rays.
    pub gap: f64,
}

pub fn build_chain(r: f64) -> Result<MapChain> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("chain needs 0 < r < 1, got {r}")));
    }
    let m = solve_modulus_equation(r)?;
    let slit = m.sqrt();
    Ok(MapChain {
        r,
        m,
        big_k: elliptic_k(m)?,
        slit,
        gap: 0.5 * (1.0 / slit - slit),
    })
}

impl MapChain {
    /// Radius with capacity `log 2`, the default demonstration.
    pub fn default_radius() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    /// Capacity `log(1/r²)` of the annulus and hence of `Ω₀`.
    pub fn capacity(&self) -> f64 {
        -2.0 * self.r.ln()
    }

    /// Semi-axes of the ellipse bounding the Joukowski image; they sum to
    /// `1/r²`.
    pub fn ellipse_semi_axes(&self) -> (f64, f64) {
        let q = self.r * self.r;
        (0.5 * (1.0 / q + q), 0.5 * (1.0 / q - q))
    }

    fn violation(stage: Stage, detail: String) -> Error {
        Error::DomainViolation {
            stage: stage.index(),
            name: stage.name(),
            detail,
        }
    }

    /// Applies one stage, checking that its input lies in the stage domain.
    pub fn stage(&self, stage: Stage, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match stage {
            Stage::Scale => {
                let rho = z.norm();
                if !(rho > self.r && rho < 1.0 / self.r) {
                    return Err(Self::violation(
                        stage,
                        format!("|z| = {rho} outside ({}, {})", self.r, 1.0 / self.r),
                    ));
                }
                Ok(z * self.r)
            }
            Stage::Joukowski => {
                if (z - one).norm() < ENDPOINT_EXCLUSION || (z + one).norm() < ENDPOINT_EXCLUSION {
                    return Err(Self::violation(stage, format!("{z} is at a slit endpoint")));
                }
                let rho = z.norm();
                let q = self.r * self.r;
                if !(rho > q * (1.0 - 1e-12) && rho <= 1.0 + 1e-12) {
                    return Err(Self::violation(stage, format!("|z| = {rho} outside [{q}, 1]")));
                }
                Ok(0.5 * (z + 1.0 / z))
            }
            Stage::EllipticSine => {
                let (a, b) = self.ellipse_semi_axes();
                let e = (z.re / a).powi(2) + (z.im / b).powi(2);
                if e > 1.0 + 1e-9 {
                    return Err(Self::violation(stage, format!("{z} lies outside the ellipse")));
                }
                let arg = z.asin() * (FRAC_2_PI * self.big_k);
                Ok(jacobi_sn(arg, self.m)? * self.slit)
            }
            Stage::Inversion => {
                if z.norm() > 1.0 + 1e-9 || z.norm() == 0.0 {
                    return Err(Self::violation(stage, format!("{z} is not in the punctured disc")));
                }
                Ok(1.0 / z)
            }
            Stage::AntiJoukowski => {
                if z.norm() < 1.0 - 1e-9 {
                    return Err(Self::violation(stage, format!("{z} lies inside the unit disc")));
                }
                Ok(Complex64::i() * 0.5 * (z - 1.0 / z))
            }
        }
    }

    /// Image of `z ∈ 𝔸(r, 1/r)` in `Ω₀`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        Stage::ALL.iter().try_fold(z, |w, &s| self.stage(s, w))
    }

    /// Every intermediate value, starting with `z` itself.
    pub fn trace(&self, z: Complex64) -> Result<[Complex64; 6]> {
        let mut out = [z; 6];
        for (i, &s) in Stage::ALL.iter().enumerate() {
            out[i + 1] = self.stage(s, out[i])?;
        }
        Ok(out)
    }

    /// Image of the circle `|z| = rho` sampled at `samples` angles.
    pub fn circle_image(&self, rho: f64, samples: usize) -> Result<Vec<Complex64>> {
        (0..samples)
            .map(|k| {
                let theta = std::f64::consts::TAU * (k as f64 + 0.5) / samples as f64;
                self.evaluate(Complex64::from_polar(rho, theta))
            })
            .collect()
    }

    /// Codomain check of the sn stage on sampled boundary and slit points.
    pub fn diagnostics(&self, samples: usize) -> Result<ChainDiagnostics> {
        let (a, b) = self.ellipse_semi_axes();
        let mut boundary: f64 = 0.0;
        let mut slit: f64 = 0.0;
        for k in 0..samples {
            let t = std::f64::consts::TAU * (k as f64 + 0.5) / samples as f64;
            let on_ellipse = Complex64::new(a * t.cos(), b * t.sin());
            let w = self.stage(Stage::EllipticSine, on_ellipse)?;
            boundary = boundary.max((w.norm() - 1.0).abs());
            let on_segment = Complex64::new(t.cos(), 0.0);
            let w = self.stage(Stage::EllipticSine, on_segment)?;
            slit = slit.max(w.im.abs()).max((w.re.abs() - self.slit).max(0.0));
        }
        Ok(ChainDiagnostics {
            m: self.m,
            slit_half_length: self.slit,
            literal_slit_half_length: self.m * self.m,
            literal_mismatch: (self.slit - self.m * self.m).abs(),
            boundary_residual: boundary,
            slit_residual: slit,
            gap: self.gap,
        })
    }
}

/// How well the sn stage lands on `𝔻 \ [−√m, √m]`, and how far that slit is
/// from the literal `[−m², m²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub m: f64,
    pub slit_half_length: f64,
    pub literal_slit_half_length: f64,
    pub literal_mismatch: f64,
    /// `max | |w| − 1 |` over images of the ellipse.
    pub boundary_residual: f64,
    /// Distance of images of `[−1, 1]` from the real slit.
    pub slit_residual: f64,
    pub gap: f64,
}

/// Finite-difference Cauchy–Riemann residual `|∂_y f − i ∂_x f| / |∂_x f|`.
pub fn cauchy_riemann_residual(
    f: impl Fn(Complex64) -> Result<Complex64>,
    z: Complex64,
    h: f64,
) -> Result<f64> {
    let i = Complex64::i();
    let dx = (f(z + h)? - f(z - h)?) / (2.0 * h);
    let dy = (f(z + i * h)? - f(z - i * h)?) / (2.0 * h);
    Ok((dy - i * dx).norm() / dx.norm().max(f64::MIN_POSITIVE))
}

/// Piecewise radial power map of `𝔸(r, 1/r)` fixing both boundary circles
/// and taking `|z| = s` to `|z| = t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSelfMap {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    /// Exponent on `r ≤ |z| ≤ s`.
    pub alpha_inner: f64,
    /// Exponent on `s ≤ |z| ≤ 1/r`.
    pub alpha_outer: f64,
    /// The two-quotient formula [`k_annulus_circle_map`].
    pub claimed_k: f64,
    /// Distortion of the map itself, `max(α, 1/α)` over both pieces.
    pub exact_k: f64,
}

pub fn radial_stretch(r: f64, s: f64, t: f64) -> Result<AnnulusSelfMap> {
    let claimed_k = k_annulus_circle_map(r, s, t)?;
    let lr = r.ln();
    let alpha_inner = (t.ln() - lr) / (s.ln() - lr);
    let alpha_outer = (t.ln() + lr) / (s.ln() + lr);
    let exact_k = [alpha_inner, 1.0 / alpha_inner, alpha_outer, 1.0 / alpha_outer]
        .into_iter()
        .fold(1.0, f64::max);
    Ok(AnnulusSelfMap {
        r,
        s,
        t,
        alpha_inner,
        alpha_outer,
        claimed_k,
        exact_k,
    })
}

impl AnnulusSelfMap {
    pub fn radius(&self, rho: f64) -> f64 {
        if rho <= self.s {
            self.r * (rho / self.r).powf(self.alpha_inner)
        } else {
            (rho * self.r).powf(self.alpha_outer) / self.r
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let rho = z.norm();
        if rho == 0.0 {
            return z;
        }
        z * (self.radius(rho) / rho)
    }

    /// Distortion of the piece containing `|z| = rho`.
    pub fn local_k(&self, rho: f64) -> f64 {
        let a = if rho <= self.s {
            self.alpha_inner
        } else {
            self.alpha_outer
        };
        a.max(1.0 / a)
    }
}

/// `|Df|² / J` at `z` from central differences with step `h`.
pub fn pointwise_distortion(map: &AnnulusSelfMap, z: Complex64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1e-4) {
        return Err(Error::domain(format!("step must lie in (0, 1e-4), got {h}")));
    }
    let rho = z.norm();
    if !(rho - 2.0 * h > map.r && rho + 2.0 * h < 1.0 / map.r) || (rho - map.s).abs() < 2.0 * h {
        return Err(Error::domain(format!(
            "|z| = {rho} must stay 2h inside the annulus and away from |z| = {}",
            map.s
        )));
    }
    let fx = (map.apply(z + h) - map.apply(z - h)) / (2.0 * h);
    let fy = (map.apply(z + Complex64::i() * h) - map.apply(z - Complex64::i() * h)) / (2.0 * h);
    distortion_quotient(fx, fy)
}

/// `|Df|²/J` for the Jacobian with columns `fx`, `fy`.
pub fn distortion_quotient(fx: Complex64, fy: Complex64) -> Result<f64> {
    // f_z = (f_x − i f_y)/2, f_z̄ = (f_x + i f_y)/2; |Df| = |f_z| + |f_z̄|,
    // J = |f_z|² − |f_z̄|².
    let i = Complex64::i();
    let fz = (fx - i * fy).norm() / 2.0;
    let fzb = (fx + i * fy).norm() / 2.0;
    let jac = fx.re * fy.im - fx.im * fy.re;
    if !(jac > 0.0) || fz <= fzb {
        return Err(Error::DegenerateJacobian(jac));
    }
    Ok((fz + fzb) / (fz - fzb))
}
