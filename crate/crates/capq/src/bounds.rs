//! Closed-form distortion bounds for level curves, annulus maps and
//! hyperbolic geodesics.
//!
//! Every evaluator rejects the boundary of its domain instead of
//! extrapolating.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::collar::{arccos_tanh, collar_log_inv_radius};
use crate::special::teichmuller_ring_modulus;
use crate::{Error, Result};

/// The Teichmüller-ring constant `β₀` at four decimals, as used in all
/// bound formulas.
pub const BETA0: f64 = 2.4984;

/// Tolerance for the agreement of [`BETA0`] with its oracle.
pub const BETA0_TOLERANCE: f64 = 5e-4;

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {x}")))
    }
}

fn open_level(name: &str, a: f64) -> Result<()> {
    if a > -1.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("level {name} must lie in (-1, 1), got {a}")))
    }
}

/// `K_a ≤ (1 + 8β₀/cap) / (1 − |a|)` for the level curve `{u = a}`.
pub fn k_level(cap: f64, a: f64) -> Result<f64> {
    positive("capacity", cap)?;
    open_level("a", a)?;
    Ok(k_zero_level(cap)? / (1.0 - a.abs()))
}

/// `K₀ ≤ 1 + 8β₀/cap` for the zero level.
pub fn k_zero_level(cap: f64) -> Result<f64> {
    positive("capacity", cap)?;
    Ok(1.0 + 8.0 * BETA0 / cap)
}

/// `K ≤ 1 + 8β₀/Cap_Ω(α)`, given the capacity of any doubly connected
/// subdomain around `α`; smaller subdomains give weaker bounds.
pub fn k_homotopy(cap_lower_bound: f64) -> Result<f64> {
    positive("capacity lower bound", cap_lower_bound)?;
    Ok(1.0 + 8.0 * BETA0 / cap_lower_bound)
}

/// `K_ab = max{(b+1)/(a+1), (1−b)/(1−a)}` for `−1 < a ≤ b < 1`.
pub fn k_between_levels(a: f64, b: f64) -> Result<f64> {
    open_level("a", a)?;
    open_level("b", b)?;
    if a > b {
        return Err(Error::domain(format!("need a <= b, got a={a}, b={b}")));
    }
    Ok(((b + 1.0) / (a + 1.0)).max((1.0 - b) / (1.0 - a)))
}

/// `max{(log t − log r)/(log s − log r), (log t + log r)/(log s + log r)}`
/// for a self-map of `𝔸(r, 1/r)` taking `|z| = s` to `|z| = t`. With
/// `s > t` the roles are swapped, since a map and its inverse share the
/// same distortion.
pub fn k_annulus_circle_map(r: f64, s: f64, t: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("need 0 < r < 1, got {r}")));
    }
    for (name, x) in [("s", s), ("t", t)] {
        if !(x > r && x < 1.0 / r) {
            return Err(Error::domain(format!("need r < {name} < 1/r, got {name}={x}, r={r}")));
        }
    }
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    let lr = r.ln();
    let (ls, lt) = (s.ln(), t.ln());
    Ok(((lt - lr) / (ls - lr)).max((lt + lr) / (ls + lr)))
}

/// `K ≤ 1 + 4β₀ℓ / (π·arccos(tanh(ℓ/2)))` for a simple closed geodesic of
/// length `ℓ`.
pub fn k_geodesic(ell: f64) -> Result<f64> {
    positive("geodesic length", ell)?;
    Ok(1.0 + 4.0 * BETA0 * ell / (PI * arccos_tanh(0.5 * ell)))
}

/// `K ≤ 1 + 4β₀ℓ/π²` in a doubly connected domain.
pub fn k_geodesic_doubly_connected(ell: f64) -> Result<f64> {
    positive("geodesic length", ell)?;
    Ok(1.0 + 4.0 * BETA0 * ell / (PI * PI))
}

/// The simpler estimate `K ≤ 1 + (5ℓ/π)·√(e^ℓ + 1)`.
pub fn k_geodesic_simplified(ell: f64) -> Result<f64> {
    positive("geodesic length", ell)?;
    Ok(1.0 + 5.0 * ell / PI * (ell.exp() + 1.0).sqrt())
}

/// `K ≤ 1 + 3ℓ/2` for `ℓ ≤ 1`, valid when `log(1/r₀(ℓ)) ≥ 2β₀`.
pub fn k_geodesic_small(ell: f64) -> Result<f64> {
    positive("geodesic length", ell)?;
    if ell > 1.0 {
        return Err(Error::domain(format!("small-geodesic bound needs ℓ <= 1, got {ell}")));
    }
    let log_inv_r0 = collar_log_inv_radius(ell)?;
    if log_inv_r0 < 2.0 * BETA0 {
        return Err(Error::ValidityCondition(format!(
            "log(1/r0) = {log_inv_r0} is below 2β₀ = {}",
            2.0 * BETA0
        )));
    }
    Ok(1.0 + 1.5 * ell)
}

/// Which bound a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Level,
    ZeroLevel,
    Homotopy,
    BetweenLevels,
    AnnulusCircleMap,
    Geodesic,
    GeodesicDoublyConnected,
    GeodesicSimplified,
    GeodesicSmall,
}

/// A bound request, as accepted by the `bounds` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundRequest {
    Level { cap: f64, a: f64 },
    ZeroLevel { cap: f64 },
    Homotopy { cap_lower_bound: f64 },
    BetweenLevels { a: f64, b: f64 },
    AnnulusCircleMap { r: f64, s: f64, t: f64 },
    Geodesic { ell: f64 },
    GeodesicDoublyConnected { ell: f64 },
    GeodesicSimplified { ell: f64 },
    GeodesicSmall { ell: f64 },
}

/// An evaluated bound together with its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: BoundKind,
    pub inputs: BTreeMap<String, f64>,
    #[serde(rename = "K")]
    pub k: f64,
    pub beta0: f64,
}

impl BoundRequest {
    pub fn kind(&self) -> BoundKind {
        match self {
            BoundRequest::Level { .. } => BoundKind::Level,
            BoundRequest::ZeroLevel { .. } => BoundKind::ZeroLevel,
            BoundRequest::Homotopy { .. } => BoundKind::Homotopy,
            BoundRequest::BetweenLevels { .. } => BoundKind::BetweenLevels,
            BoundRequest::AnnulusCircleMap { .. } => BoundKind::AnnulusCircleMap,
            BoundRequest::Geodesic { .. } => BoundKind::Geodesic,
            BoundRequest::GeodesicDoublyConnected { .. } => BoundKind::GeodesicDoublyConnected,
            BoundRequest::GeodesicSimplified { .. } => BoundKind::GeodesicSimplified,
            BoundRequest::GeodesicSmall { .. } => BoundKind::GeodesicSmall,
        }
    }

    fn inputs(&self) -> Vec<(&'static str, f64)> {
        match *self {
            BoundRequest::Level { cap, a } => vec![("cap", cap), ("a", a)],
            BoundRequest::ZeroLevel { cap } => vec![("cap", cap)],
            BoundRequest::Homotopy { cap_lower_bound } => {
                vec![("cap_lower_bound", cap_lower_bound)]
            }
            BoundRequest::BetweenLevels { a, b } => vec![("a", a), ("b", b)],
            BoundRequest::AnnulusCircleMap { r, s, t } => vec![("r", r), ("s", s), ("t", t)],
            BoundRequest::Geodesic { ell }
            | BoundRequest::GeodesicDoublyConnected { ell }
            | BoundRequest::GeodesicSimplified { ell }
            | BoundRequest::GeodesicSmall { ell } => vec![("ell", ell)],
        }
    }

    pub fn evaluate(&self) -> Result<BoundReport> {
        let k = match *self {
            BoundRequest::Level { cap, a } => k_level(cap, a),
            BoundRequest::ZeroLevel { cap } => k_zero_level(cap),
            BoundRequest::Homotopy { cap_lower_bound } => k_homotopy(cap_lower_bound),
            BoundRequest::BetweenLevels { a, b } => k_between_levels(a, b),
            BoundRequest::AnnulusCircleMap { r, s, t } => k_annulus_circle_map(r, s, t),
            BoundRequest::Geodesic { ell } => k_geodesic(ell),
            BoundRequest::GeodesicDoublyConnected { ell } => k_geodesic_doubly_connected(ell),
            BoundRequest::GeodesicSimplified { ell } => k_geodesic_simplified(ell),
            BoundRequest::GeodesicSmall { ell } => k_geodesic_small(ell),
        }?;
        Ok(BoundReport {
            bound: self.kind(),
            inputs: self
                .inputs()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            k,
            beta0: BETA0,
        })
    }
}

/// Stored `β₀` against the Teichmüller-ring oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta0Check {
    pub stored: f64,
    pub oracle: f64,
    pub difference: f64,
    pub agrees: bool,
}

pub fn beta0_check() -> Beta0Check {
    let oracle = teichmuller_ring_modulus();
    let difference = (oracle - BETA0).abs();
    Beta0Check {
        stored: BETA0,
        oracle,
        difference,
        agrees: difference <= BETA0_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn level_examples() {
        assert!(close(k_level(8.0 * BETA0, 0.0).unwrap(), 2.0, 1e-15));
        let v = k_level(4f64.ln(), 0.5).unwrap();
        assert!(close(v, 2.0 * (1.0 + 19.9872 / 4f64.ln()), 1e-12));
        assert!(close(v, 30.836, 5e-3), "{v}");
        assert!(k_level(1.0, 1.0).is_err() && k_level(0.0, 0.0).is_err());
    }

    #[test]
    fn zero_level_examples() {
        assert!(close(k_zero_level(1e6).unwrap(), 1.0 + 2e-5, 1e-7));
        assert_eq!(k_zero_level(8.0 * BETA0).unwrap(), 2.0);
        assert!(close(k_zero_level(1.386294).unwrap(), 15.418, 5e-3));
        assert!(k_zero_level(-1.0).is_err());
    }

    #[test]
    fn homotopy_examples() {
        assert_eq!(k_homotopy(8.0 * BETA0).unwrap(), 2.0);
        let two_discs = 2.0 * (2.0 + 3f64.sqrt()).ln();
        assert!(close(k_homotopy(two_discs).unwrap(), 8.589, 5e-3));
        assert!(k_homotopy(3.0).unwrap() < k_homotopy(2.0).unwrap());
    }

    #[test]
    fn between_levels_examples() {
        assert_eq!(k_between_levels(0.3, 0.3).unwrap(), 1.0);
        assert_eq!(k_between_levels(0.0, 0.5).unwrap(), 1.5);
        assert_eq!(k_between_levels(-0.5, 0.5).unwrap(), 3.0);
        assert!(k_between_levels(0.5, 0.0).is_err());
        assert!(k_between_levels(-1.0, 0.0).is_err());
    }

    #[test]
    fn circle_map_examples() {
        assert_eq!(k_annulus_circle_map(0.3, 1.2, 1.2).unwrap(), 1.0);
        let e = std::f64::consts::E;
        assert!(close(k_annulus_circle_map((-2f64).exp(), 1.0, e).unwrap(), 1.5, 1e-14));
        assert!(k_annulus_circle_map(0.5, 0.4, 1.0).is_err());
        assert!(k_annulus_circle_map(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn between_levels_is_circle_map_with_power_radii() {
        for i in 1..=10 {
            let r = i as f64 / 11.0;
            for ja in 0..10 {
                for jb in 0..10 {
                    let a = -0.95 + 0.19 * ja as f64;
                    let b = -0.95 + 0.19 * jb as f64;
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    let direct = k_between_levels(a, b).unwrap();
                    let via = k_annulus_circle_map(r, r.powf(-a), r.powf(-b)).unwrap();
                    assert!(close(direct, via, 1e-12), "r={r} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn geodesic_examples() {
        let tiny = k_geodesic(1e-6).unwrap();
        assert!(close(tiny, 1.0 + 8.0 * BETA0 * 1e-6 / (PI * PI), 1e-10));
        assert!(close(k_geodesic(2.0).unwrap(), 10.03, 1e-2));
        assert!(close(
            k_geodesic_doubly_connected(PI * PI).unwrap(),
            1.0 + 4.0 * BETA0,
            1e-12
        ));
        assert!(close(k_geodesic_simplified(2.0).unwrap(), 10.22, 5e-3));
        assert_eq!(k_geodesic_small(1.0).unwrap(), 2.5);
        assert!(close(k_geodesic_small(0.1).unwrap(), 1.15, 1e-15));
        assert!(k_geodesic_small(2.0).is_err());
    }

    #[test]
    fn geodesic_scans() {
        let mut prev = 0.0;
        for i in 1..=2000 {
            let ell = 0.01 * i as f64;
            let k = k_geodesic(ell).unwrap();
            assert!(k > prev);
            prev = k;
            assert!(k_geodesic_doubly_connected(ell).unwrap() <= k);
            if (0.05..=10.0).contains(&ell) {
                assert!(k <= k_geodesic_simplified(ell).unwrap());
            }
        }
    }

    #[test]
    fn turning_profile_is_decreasing_and_convex() {
        let g = |ell: f64| PI / ell * arccos_tanh(ell / 2.0);
        let pts: Vec<f64> = (1..=200).map(|i| g(0.05 * i as f64)).collect();
        for w in pts.windows(3) {
            assert!(w[1] < w[0]);
            assert!(w[2] - 2.0 * w[1] + w[0] >= 0.0);
        }
    }

    #[test]
    fn requests_round_trip() {
        let req: BoundRequest = serde_json::from_str(r#"{"bound":"level","cap":2.0,"a":0.25}"#).unwrap();
        let rep = req.evaluate().unwrap();
        assert_eq!(rep.bound, BoundKind::Level);
        assert_eq!(rep.inputs["a"], 0.25);
        assert_eq!(rep.k, k_level(2.0, 0.25).unwrap());
        assert!(serde_json::from_str::<BoundRequest>(r#"{"bound":"level","cap":2.0,"a":0.1,"x":1}"#).is_err());
    }

    #[test]
    fn beta0_oracle_is_reported() {
        let c = beta0_check();
        assert_eq!(c.stored, 2.4984);
        assert!((c.oracle - 2.574_988_161_087_928_7).abs() < 1e-12);
        assert_eq!(c.agrees, c.difference <= BETA0_TOLERANCE);
    }

    proptest! {
        #[test]
        fn bounds_are_at_least_one(cap in 1e-3f64..1e4, a in -0.999f64..0.999, ell in 1e-4f64..30.0) {
            prop_assert!(k_level(cap, a).unwrap() >= 1.0);
            prop_assert!(k_zero_level(cap).unwrap() >= 1.0);
            prop_assert!(k_geodesic(ell).unwrap() >= 1.0);
            prop_assert!(k_geodesic_simplified(ell).unwrap() >= 1.0);
            prop_assert_eq!(k_level(cap, 0.0).unwrap(), k_zero_level(cap).unwrap());
        }

        #[test]
        fn circle_map_at_least_one(r in 0.01f64..0.99, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let span = |u: f64| (r.ln() * (1.0 - 2.0 * u)).exp();
            let (s, t) = (span(0.01 + 0.98 * x), span(0.01 + 0.98 * y));
            prop_assert!(k_annulus_circle_map(r, s, t).unwrap() >= 1.0);
        }
    }
}
