//! The three-point bounded-turning constant of a closed curve.
//!
//! For vertices `z`, `w` splitting the curve into arcs `α⁺` and `α⁻`, the
//! constant is the largest value of `min{diam α⁺, diam α⁻} / |z − w|`.
//! Arc diameters come from the recursion
//! `D(i, ℓ) = max{D(i, ℓ−1), D(i+1, ℓ−1), |p_i − p_{i+ℓ}|}` over arc length
//! `ℓ`, evaluated one length at a time, so the scan costs `O(n²)` time.

use serde::{Deserialize, Serialize};

use crate::equipotential::LevelCurve;
use crate::{Error, Point, Result};

/// Pairs closer than this fraction of the curve diameter are skipped.
pub const MIN_CHORD_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningReport {
    pub constant: f64,
    /// Vertex indices (into the sampled vertices) attaining the maximum.
    pub witness: [usize; 2],
    pub samples: usize,
    pub decimation: usize,
}

/// Maximum pairwise distance.
pub fn curve_diameter(points: &[Point]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateCurve(format!(
            "diameter needs at least 2 points, got {}",
            points.len()
        )));
    }
    let mut best: f64 = 0.0;
    for (k, p) in points.iter().enumerate() {
        for q in &points[k + 1..] {
            best = best.max((p - q).norm());
        }
    }
    Ok(best)
}

/// Turning constant of the closed curve, using every `decimation`-th vertex.
pub fn turning_constant(curve: &LevelCurve, decimation: usize) -> Result<TurningReport> {
    if decimation == 0 {
        return Err(Error::domain("decimation must be at least 1"));
    }
    let pts: Vec<Point> = curve.vertices().iter().step_by(decimation).copied().collect();
    let mut report = turning_constant_of(&pts)?;
    report.decimation = decimation;
    Ok(report)
}

/// Turning constant of the closed polygon with vertices `pts`.
pub fn turning_constant_of(pts: &[Point]) -> Result<TurningReport> {
    let n = pts.len();
    let mut distinct = pts.to_vec();
    distinct.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::DegenerateCurve(format!(
            "need at least 4 distinct points, got {}",
            distinct.len()
        )));
    }
    let dist = |i: usize, j: usize| (pts[i % n] - pts[j % n]).norm();

    // layer[i] = diameter of the arc p_i, ..., p_{i+len} (indices mod n).
    let half = n / 2;
    let upper = n - half; // lengths kept: upper..n-1 are the long arcs
    let mut stored: Vec<Vec<f64>> = Vec::with_capacity(n - upper);
    let mut layer = vec![0.0f64; n];
    let mut next = vec![0.0; n];
    let mut diameter: f64 = 0.0;
    for len in 1..n {
        for i in 0..n {
            next[i] = layer[i].max(layer[(i + 1) % n]).max(dist(i, i + len));
        }
        std::mem::swap(&mut layer, &mut next);
        if len >= upper {
            stored.push(layer.clone());
        }
        if len == n - 1 {
            diameter = layer.iter().copied().fold(0.0, f64::max);
        }
    }
    let long = |len: usize, i: usize| stored[len - upper][i];

    let cutoff = MIN_CHORD_FRACTION * diameter;
    let mut best = (0.0f64, [0usize, 0usize]);
    let mut found = false;
    layer.iter_mut().for_each(|v| *v = 0.0);
    for len in 1..=half {
        for i in 0..n {
            next[i] = layer[i].max(layer[(i + 1) % n]).max(dist(i, i + len));
        }
        std::mem::swap(&mut layer, &mut next);
        for i in 0..n {
            let j = (i + len) % n;
            let chord = dist(i, j);
            if chord < cutoff {
                continue;
            }
            let other = n - len;
            let d_other = if other >= upper { long(other, j) } else { layer[j] };
            let c = layer[i].min(d_other) / chord;
            let pair = [i.min(j), i.max(j)];
            if !found || c > best.0 || (c == best.0 && pair < best.1) {
                best = (c, pair);
                found = true;
            }
        }
    }
    if !found {
        return Err(Error::DegenerateCurve("no admissible point pair".into()));
    }
    Ok(TurningReport {
        constant: best.0,
        witness: best.1,
        samples: n,
        decimation: 1,
    })
}
