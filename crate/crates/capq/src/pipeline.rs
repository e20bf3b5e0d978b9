//! Spec → potential → level curves → turning constants → bounds.

use serde::{Deserialize, Serialize};

use crate::bounds::{k_between_levels, k_homotopy, k_level, BoundReport, BoundRequest};
use crate::capacitor::{rasterize, CapacitorSpec, FarField};
use crate::equipotential::{extract_level, validate_jordan, JordanDiagnostics, LevelCurve};
use crate::solver::{solve_potential, PotentialField, DEFAULT_TOLERANCE};
use crate::turning::{turning_constant, TurningReport};
use crate::{Error, Result};

pub const REPORT_SCHEMA: &str = "capq-report/1";

/// Level curves with more vertices than this are decimated before the
/// quadratic turning scan.
pub const DEFAULT_MAX_TURNING_SAMPLES: usize = 2048;

const NOTE: &str = "turning constants are empirical indicators; no inequality between C and K_a is asserted";

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub tolerance: f64,
    pub max_turning_samples: usize,
    /// Worker threads for per-level processing.
    pub threads: usize,
    /// A doubly connected subdomain around the zero level whose capacity
    /// bounds `Cap_Ω(α)` from below.
    pub homotopy_subdomain: Option<CapacitorSpec>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            tolerance: DEFAULT_TOLERANCE,
            max_turning_samples: DEFAULT_MAX_TURNING_SAMPLES,
            threads: 1,
            homotopy_subdomain: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveStats {
    pub points: usize,
    pub arc_length: f64,
    pub separating_components: usize,
    pub jordan: JordanDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: f64,
    pub curve: CurveStats,
    pub turning: TurningReport,
    /// `K_a` from the capacity.
    pub k_level: f64,
    #[serde(skip)]
    pub points: LevelCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "K_ab")]
    pub k: f64,
}

/// `K` from the capacity of a subdomain; an upper bound, not the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyCertificate {
    pub subdomain_capacity: f64,
    #[serde(rename = "K_upper_bound")]
    pub k_upper_bound: f64,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub resolution: usize,
    pub cells_per_side: usize,
    pub far_field: Option<FarField>,
    pub tolerance: f64,
    pub residual: f64,
    pub iterations: usize,
    pub max_turning_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub capacity: f64,
    pub dirichlet_functional: f64,
    pub capacity_reliable: bool,
    pub levels: Vec<LevelRecord>,
    pub bounds: Vec<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub homotopy: Option<HomotopyCertificate>,
    pub comparisons: Vec<LevelComparison>,
    pub provenance: Provenance,
    pub note: String,
}

impl AnalysisReport {
    pub fn level(&self, a: f64) -> Option<&LevelRecord> {
        self.levels.iter().find(|r| (r.level - a).abs() <= 1e-12)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Sorted, deduplicated levels in `(−1, 1)`.
pub fn normalize_levels(levels: &[f64]) -> Result<Vec<f64>> {
    let mut out = levels.to_vec();
    if let Some(bad) = out.iter().find(|a| !(**a > -1.0 && **a < 1.0)) {
        return Err(Error::domain(format!("level {bad} is outside (-1, 1)")));
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Solves `spec` and analyses the requested levels.
pub fn run_pipeline(
    spec: &CapacitorSpec,
    levels: &[f64],
    options: &PipelineOptions,
) -> Result<AnalysisReport> {
    let levels = normalize_levels(levels)?;
    let valid = spec.clone().validate().map_err(|e| e.at("validate"))?;
    let mask = rasterize(&valid).map_err(|e| e.at("rasterize"))?;
    let field = solve_potential(&mask, options.tolerance).map_err(|e| e.at("solve"))?;
    analyze_field(spec, &field, &levels, options)
}

/// Analysis of an already solved field.
pub fn analyze_field(
    spec: &CapacitorSpec,
    field: &PotentialField,
    levels: &[f64],
    options: &PipelineOptions,
) -> Result<AnalysisReport> {
    let levels = normalize_levels(levels)?;
    let records = process_levels(field, &levels, options)?;

    let mut bounds = vec![BoundRequest::ZeroLevel {
        cap: field.capacity,
    }
    .evaluate()?];
    for &a in &levels {
        bounds.push(
            BoundRequest::Level {
                cap: field.capacity,
                a,
            }
            .evaluate()?,
        );
    }

    let homotopy = match &options.homotopy_subdomain {
        Some(sub) => {
            let valid = sub.clone().validate().map_err(|e| e.at("homotopy subdomain"))?;
            let mask = rasterize(&valid).map_err(|e| e.at("homotopy subdomain"))?;
            let sub_field =
                solve_potential(&mask, options.tolerance).map_err(|e| e.at("homotopy subdomain"))?;
            Some(HomotopyCertificate {
                subdomain_capacity: sub_field.capacity,
                k_upper_bound: k_homotopy(sub_field.capacity)?,
                kind: "upper bound certificate from a subdomain capacity".into(),
            })
        }
        None => None,
    };

    Ok(AnalysisReport {
        schema: REPORT_SCHEMA.into(),
        capacity: field.capacity,
        dirichlet_functional: field.dirichlet_functional,
        capacity_reliable: field.reliable,
        levels: records,
        bounds,
        homotopy,
        comparisons: Vec::new(),
        provenance: Provenance {
            resolution: spec.grid.resolution,
            cells_per_side: field.mask.n,
            far_field: spec.grid.far_field,
            tolerance: options.tolerance,
            residual: field.residual,
            iterations: field.iterations,
            max_turning_samples: options.max_turning_samples,
        },
        note: NOTE.into(),
    })
}

fn process_levels(
    field: &PotentialField,
    levels: &[f64],
    options: &PipelineOptions,
) -> Result<Vec<LevelRecord>> {
    let threads = options.threads.clamp(1, levels.len().max(1));
    let work = |a: f64| process_level(field, a, options).map_err(|e| e.at("levels"));
    if threads == 1 {
        return levels.iter().map(|&a| work(a)).collect();
    }
    let chunk = levels.len().div_ceil(threads);
    let results: Vec<Vec<Result<LevelRecord>>> = std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&a| work(a)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level worker panicked"))
            .collect()
    });
    results.into_iter().flatten().collect()
}

fn process_level(field: &PotentialField, a: f64, options: &PipelineOptions) -> Result<LevelRecord> {
    let curve = extract_level(field, a)?;
    let jordan = validate_jordan(&curve, field.mask.e_anchor);
    let n = curve.vertices().len();
    let decimation = n.div_ceil(options.max_turning_samples.max(4)).max(1);
    let turning = turning_constant(&curve, decimation)?;
    Ok(LevelRecord {
        level: a,
        curve: CurveStats {
            points: curve.points.len(),
            arc_length: curve.arc_length,
            separating_components: curve.separating_components,
            jordan,
        },
        turning,
        k_level: k_level(field.capacity, a)?,
        points: curve,
    })
}

/// `K_ab` between two analysed levels; the result is also recorded in the
/// report.
pub fn compare_levels(report: &mut AnalysisReport, a: f64, b: f64) -> Result<f64> {
    for x in [a, b] {
        if report.level(x).is_none() {
            return Err(Error::MissingLevel(x));
        }
    }
    let k = k_between_levels(a, b)?;
    report.comparisons.push(LevelComparison { a, b, k });
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacitor::presets;
    use std::sync::OnceLock;

    fn annulus_report() -> &'static AnalysisReport {
        static REPORT: OnceLock<AnalysisReport> = OnceLock::new();
        REPORT.get_or_init(|| {
            run_pipeline(
                &presets::annulus(0.5, 2.0, 256),
                &[0.5, 0.0, -0.5],
                &PipelineOptions::default(),
            )
            .unwrap()
        })
    }

    #[test]
    fn annulus_levels_and_bounds() {
        let rep = annulus_report();
        assert!((rep.capacity - 4f64.ln()).abs() < 0.02 * 4f64.ln());
        let levels: Vec<f64> = rep.levels.iter().map(|r| r.level).collect();
        assert_eq!(levels, vec![-0.5, 0.0, 0.5]);
        for r in &rep.levels {
            assert!(r.turning.constant >= 1.0 && r.turning.constant <= 1.1, "{r:?}");
            assert!(r.k_level >= 1.0);
            assert!(r.curve.jordan.is_jordan());
        }
        let k0 = rep.bounds[0].k;
        assert!((k0 - (1.0 + 8.0 * 2.4984 / rep.capacity)).abs() < 1e-12);
        assert!((k0 - 15.42).abs() < 0.2, "{k0}");
    }

    #[test]
    fn comparisons() {
        let mut rep = annulus_report().clone();
        assert_eq!(compare_levels(&mut rep, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(compare_levels(&mut rep, 0.0, 0.5).unwrap(), 1.5);
        assert_eq!(compare_levels(&mut rep, -0.5, 0.5).unwrap(), 3.0);
        assert_eq!(rep.comparisons.len(), 3);
        assert!(matches!(compare_levels(&mut rep, 0.0, 0.25), Err(Error::MissingLevel(_))));
    }

    #[test]
    fn empty_level_list() {
        let rep = run_pipeline(&presets::annulus(0.5, 2.0, 64), &[], &PipelineOptions::default()).unwrap();
        assert!(rep.levels.is_empty());
        assert!(rep.capacity > 1.0);
    }

    #[test]
    fn threads_do_not_change_the_report() {
        let spec = presets::annulus(0.5, 2.0, 128);
        let levels = [-0.6, -0.3, 0.0, 0.3, 0.6];
        let one = run_pipeline(&spec, &levels, &PipelineOptions::default()).unwrap();
        let opts = PipelineOptions {
            threads: 3,
            ..PipelineOptions::default()
        };
        let three = run_pipeline(&spec, &levels, &opts).unwrap();
        assert_eq!(one.to_json().unwrap(), three.to_json().unwrap());
    }

    #[test]
    fn errors_carry_their_stage() {
        let err = run_pipeline(&presets::two_discs(128), &[0.0], &PipelineOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "levels", .. }), "{err}");
        assert!(matches!(err.root(), Error::LevelNotFound(_)));
        assert!(err.is_numerical());
        assert!(run_pipeline(&presets::annulus(0.5, 2.0, 64), &[1.0], &PipelineOptions::default()).is_err());
    }

    #[test]
    fn homotopy_certificate() {
        let opts = PipelineOptions {
            homotopy_subdomain: Some(presets::annulus(0.8, 1.25, 128)),
            ..PipelineOptions::default()
        };
        let rep = run_pipeline(&presets::annulus(0.5, 2.0, 64), &[0.0], &opts).unwrap();
        let cert = rep.homotopy.unwrap();
        assert!((cert.subdomain_capacity - (1.25f64 / 0.8).ln()).abs() < 0.05);
        // a thinner subdomain certifies a weaker bound than the full capacity
        assert!(cert.k_upper_bound > rep.bounds[0].k);
    }
}
