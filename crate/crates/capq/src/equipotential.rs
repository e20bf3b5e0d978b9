//! Level curves `{u = a}` of a solved potential.
//!
//! Contours are traced by marching squares on the lattice of cell centers
//! with linear interpolation along lattice edges. A corner counts as above
//! the level when `u ≥ a`; a saddle square is resolved by the mean of its
//! four corners. Segments are oriented with the region `u > a` (the side of
//! `E`) on their left, so closed loops can be linked by their shared
//! lattice edges without any search.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::solver::PotentialField;
use crate::{Error, Point, Result};

/// An ordered closed polyline; the last point repeats the first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<Point>,
    pub arc_length: f64,
    /// Number of closed components separating `E` from `F` at this level.
    pub separating_components: usize,
}

impl LevelCurve {
    pub fn from_points(level: f64, mut points: Vec<Point>) -> Self {
        if points.len() > 1 && points.first() != points.last() {
            points.push(points[0]);
        }
        let arc_length = arc_length(&points);
        LevelCurve {
            level,
            points,
            arc_length,
            separating_components: 1,
        }
    }

    /// Distinct vertices, without the closing repeat.
    pub fn vertices(&self) -> &[Point] {
        match self.points.len() {
            0 | 1 => &self.points,
            n if self.points[0] == self.points[n - 1] => &self.points[..n - 1],
            _ => &self.points,
        }
    }
}

fn arc_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Winding number of a closed polyline about `p`.
pub fn winding_number(points: &[Point], p: Point) -> i32 {
    let mut w = 0;
    let n = points.len();
    for k in 0..n {
        let a = points[k] - p;
        let b = points[(k + 1) % n] - p;
        if a.im <= 0.0 {
            if b.im > 0.0 && cross(a, b) > 0.0 {
                w += 1;
            }
        } else if b.im <= 0.0 && cross(a, b) < 0.0 {
            w -= 1;
        }
    }
    w
}

fn cross(a: Point, b: Point) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Twice the signed area; positive for counterclockwise polylines.
pub fn signed_area2(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n).map(|k| cross(points[k], points[(k + 1) % n])).sum()
}

struct Segment {
    start: u64,
    end: u64,
    from: Point,
}

/// Extracts the level curve `{u = a}` that separates `E` from `F`.
pub fn extract_level(field: &PotentialField, a: f64) -> Result<LevelCurve> {
    if !(a > -1.0 && a < 1.0) {
        return Err(Error::domain(format!("level must lie in (-1, 1), got {a}")));
    }
    let loops = trace_loops(field, a);
    let m = &field.mask;
    let winding_e = |pts: &[Point]| {
        if m.e_unbounded {
            0
        } else {
            winding_number(pts, m.e_anchor)
        }
    };
    let winding_f = |pts: &[Point]| {
        if m.f_unbounded {
            0
        } else {
            winding_number(pts, m.f_anchor)
        }
    };
    let separating: Vec<Vec<Point>> = loops
        .into_iter()
        .filter(|pts| winding_e(pts) != winding_f(pts))
        .collect();
    let count = separating.len();
    let best = separating
        .into_iter()
        .map(|pts| (arc_length(&pts) + (pts[pts.len() - 1] - pts[0]).norm(), pts))
        .fold(None::<(f64, Vec<Point>)>, |best, cand| match best {
            Some(b) if b.0 >= cand.0 => Some(b),
            _ => Some(cand),
        });
    let Some((_, pts)) = best else {
        return Err(Error::LevelNotFound(a));
    };
    let mut curve = LevelCurve::from_points(a, pts);
    curve.separating_components = count;
    Ok(curve)
}

/// All closed contour loops at level `a`, each without its closing repeat.
/// Chains that run into the grid edge or an excluded cell are dropped.
pub fn trace_loops(field: &PotentialField, a: f64) -> Vec<Vec<Point>> {
    let m = &field.mask;
    let n = m.n;
    let (xs, ys) = (&m.xs.centers, &m.ys.centers);
    // Lattice edge keys: 2·(j·n + i) for (i, j)–(i+1, j), +1 for (i, j)–(i, j+1).
    let hkey = |i: usize, j: usize| 2 * (j * n + i) as u64;
    let vkey = |i: usize, j: usize| 2 * (j * n + i) as u64 + 1;
    let mut segments: Vec<Segment> = Vec::new();
    for j in 0..n.saturating_sub(1) {
        for i in 0..n - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v = corners.map(|(p, q)| field.value(p, q));
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            let above = v.map(|x| x >= a);
            if above.iter().all(|&b| b) || above.iter().all(|&b| !b) {
                continue;
            }
            // Edge k joins corner k to corner k+1, counterclockwise.
            let keys = [hkey(i, j), vkey(i + 1, j), hkey(i, j + 1), vkey(i, j)];
            let point = |k: usize| {
                let (p, q) = corners[k];
                let (r, s) = corners[(k + 1) % 4];
                let t = (a - v[k]) / (v[(k + 1) % 4] - v[k]);
                let z0 = Point::new(xs[p], ys[q]);
                let z1 = Point::new(xs[r], ys[s]);
                z0 + (z1 - z0) * t
            };
            let starts: Vec<usize> = (0..4).filter(|&k| above[k] && !above[(k + 1) % 4]).collect();
            let ends: Vec<usize> = (0..4).filter(|&k| !above[k] && above[(k + 1) % 4]).collect();
            if starts.len() == 1 {
                segments.push(Segment {
                    start: keys[starts[0]],
                    end: keys[ends[0]],
                    from: point(starts[0]),
                });
                continue;
            }
            let center_above = v.iter().sum::<f64>() / 4.0 >= a;
            for &s in &starts {
                let e = if center_above { (s + 1) % 4 } else { (s + 3) % 4 };
                debug_assert!(ends.contains(&e));
                segments.push(Segment {
                    start: keys[s],
                    end: keys[e],
                    from: point(s),
                });
            }
        }
    }

    let by_start: HashMap<u64, usize> = segments
        .iter()
        .enumerate()
        .map(|(k, s)| (s.start, k))
        .collect();
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for first in 0..segments.len() {
        if used[first] {
            continue;
        }
        let mut pts = Vec::new();
        let mut k = first;
        let closed = loop {
            used[k] = true;
            pts.push(segments[k].from);
            match by_start.get(&segments[k].end) {
                Some(&next) if next == first => break true,
                Some(&next) if !used[next] => k = next,
                _ => break false,
            }
        };
        if closed {
            pts.dedup();
            if pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
                pts.pop();
            }
            if pts.len() >= 3 {
                loops.push(pts);
            }
        }
    }
    loops
}

/// Closure, simplicity and orientation of a polyline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JordanDiagnostics {
    pub closed: bool,
    pub simple: bool,
    pub counterclockwise: bool,
    /// Winding number about the reference point of `E`.
    pub winding: i32,
}

impl JordanDiagnostics {
    pub fn is_jordan(&self) -> bool {
        self.closed && self.simple && self.winding.abs() == 1
    }
}

/// Checks that `curve` is a closed simple polyline winding once about
/// `e_point`. Adjacent segments only share their common vertex and are not
/// tested against each other.
pub fn validate_jordan(curve: &LevelCurve, e_point: Point) -> JordanDiagnostics {
    let pts = &curve.points;
    let closed = pts.len() >= 4 && pts[0] == pts[pts.len() - 1];
    let verts = curve.vertices();
    JordanDiagnostics {
        closed,
        simple: closed && is_simple(verts),
        counterclockwise: signed_area2(verts) > 0.0,
        winding: if closed { winding_number(verts, e_point) } else { 0 },
    }
}

/// Sweep over segments sorted by their left end; non-adjacent pairs that
/// intersect make the polygon non-simple.
fn is_simple(verts: &[Point]) -> bool {
    let n = verts.len();
    if n < 3 {
        return false;
    }
    let seg = |k: usize| (verts[k], verts[(k + 1) % n]);
    let mut order: Vec<usize> = (0..n).collect();
    let lo = |k: usize| seg(k).0.re.min(seg(k).1.re);
    let hi = |k: usize| seg(k).0.re.max(seg(k).1.re);
    order.sort_by(|&p, &q| lo(p).total_cmp(&lo(q)));
    for (idx, &p) in order.iter().enumerate() {
        let reach = hi(p);
        for &q in &order[idx + 1..] {
            if lo(q) > reach {
                break;
            }
            let adjacent = (p + 1) % n == q || (q + 1) % n == p;
            if adjacent {
                continue;
            }
            let (a, b) = seg(p);
            let (c, d) = seg(q);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = cross(b - a, c - a);
    let o2 = cross(b - a, d - a);
    let o3 = cross(d - c, a - c);
    let o4 = cross(d - c, b - c);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacitor::{presets, rasterize};
    use crate::solver::{solve_potential, DEFAULT_TOLERANCE};
    use std::sync::OnceLock;

    fn annulus() -> &'static PotentialField {
        static FIELD: OnceLock<PotentialField> = OnceLock::new();
        FIELD.get_or_init(|| {
            let mask = rasterize(&presets::annulus(0.5, 2.0, 256).validate().unwrap()).unwrap();
            solve_potential(&mask, DEFAULT_TOLERANCE).unwrap()
        })
    }

    fn rms_radial(curve: &LevelCurve, radius: f64) -> f64 {
        let v = curve.vertices();
        (v.iter().map(|p| (p.norm() / radius - 1.0).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    }

    #[test]
    fn annulus_zero_level_is_unit_circle() {
        let c = extract_level(annulus(), 0.0).unwrap();
        assert!(rms_radial(&c, 1.0) < 0.01, "{}", rms_radial(&c, 1.0));
        let d = validate_jordan(&c, Point::new(0.0, 0.0));
        assert!(d.is_jordan() && d.counterclockwise, "{d:?}");
        assert_eq!(d.winding, 1);
        assert_eq!(c.separating_components, 1);
    }

    #[test]
    fn annulus_levels_are_power_circles() {
        // E is the inner disc here, so u = a on |z| = r^(a) with r = 0.5.
        for a in [-0.5, 0.5] {
            let c = extract_level(annulus(), a).unwrap();
            let radius = 0.5f64.powf(a);
            assert!(rms_radial(&c, radius) < 0.01, "a={a}");
        }
    }

    #[test]
    fn points_lie_on_the_level() {
        let f = annulus();
        for a in [-0.3, 0.1, 0.7] {
            let c = extract_level(f, a).unwrap();
            for p in c.vertices() {
                let u = f.interpolate(*p).unwrap();
                assert!((u - a).abs() < 1e-9, "{p}: {u}");
            }
        }
    }

    #[test]
    fn levels_are_nested() {
        let f = annulus();
        let levels = [-0.6, -0.2, 0.2, 0.6];
        let curves: Vec<_> = levels.iter().map(|&a| extract_level(f, a).unwrap()).collect();
        for w in curves.windows(2) {
            // the higher level lies closer to E, i.e. inside the lower one
            for p in w[1].vertices() {
                assert_eq!(winding_number(w[0].vertices(), *p), 1);
            }
        }
    }

    #[test]
    fn boundary_levels_rejected() {
        assert!(matches!(extract_level(annulus(), 1.0), Err(Error::Domain(_))));
        assert!(extract_level(annulus(), -1.0).is_err());
    }

    #[test]
    fn two_disc_bisector_is_not_a_closed_curve() {
        let mask = rasterize(&presets::two_discs(64).validate().unwrap()).unwrap();
        let f = solve_potential(&mask, DEFAULT_TOLERANCE).unwrap();
        assert!(matches!(extract_level(&f, 0.0), Err(Error::LevelNotFound(_))));
        let c = extract_level(&f, 0.5).unwrap();
        assert_eq!(winding_number(c.vertices(), Point::new(-2.0, 0.0)), 1);
        assert!(validate_jordan(&c, Point::new(-2.0, 0.0)).is_jordan());
    }

    #[test]
    fn figure_eight_is_not_simple() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]
            .map(|(x, y)| Point::new(x, y))
            .to_vec();
        let c = LevelCurve::from_points(0.0, pts);
        let d = validate_jordan(&c, Point::new(0.5, 0.25));
        assert!(d.closed && !d.simple);
    }

    #[test]
    fn two_points_are_not_closed() {
        let c = LevelCurve {
            level: 0.0,
            points: vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            arc_length: 1.0,
            separating_components: 0,
        };
        assert!(!validate_jordan(&c, Point::new(0.0, 0.0)).closed);
    }

    #[test]
    fn winding_and_area_of_a_square() {
        let sq: Vec<Point> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .map(|(x, y)| Point::new(x, y))
            .to_vec();
        assert_eq!(winding_number(&sq, Point::new(0.5, 0.5)), 1);
        assert_eq!(winding_number(&sq, Point::new(1.5, 0.5)), 0);
        assert_eq!(signed_area2(&sq), 2.0);
        let rev: Vec<Point> = sq.iter().rev().copied().collect();
        assert_eq!(winding_number(&rev, Point::new(0.5, 0.5)), -1);
    }
}
