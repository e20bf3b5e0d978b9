//! Capacitor geometry and its rasterization onto a square grid.
//!
//! Each continuum is a union of primitive shapes tagged with its role
//! (`E` or `F`). At most one shape may be a `disc_complement`; that
//! continuum then contains the point at infinity. Without one, the edge of
//! the grid is treated as an insulating wall.

use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

/// Relative tie-break offset, in cell widths, applied to every query point.
const TIE_OFFSET: f64 = 1e-12;

/// Minimum Chebyshev distance (in cells) between an `E` cell and an `F` cell.
const MIN_SEPARATION_CELLS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    E,
    F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    /// Everything at distance `>= radius` from `center`, including infinity.
    DiscComplement {
        center: [f64; 2],
        radius: f64,
    },
    /// Closed simple polygon, vertices in either orientation.
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// Segment thickened by `half_width`; a zero width is thickened to one
    /// cell on the grid.
    SlitSegment {
        start: [f64; 2],
        end: [f64; 2],
        half_width: f64,
    },
}

impl Shape {
    pub fn disc(center: [f64; 2], radius: f64) -> Self {
        Shape::Disc { center, radius }
    }

    pub fn disc_complement(center: [f64; 2], radius: f64) -> Self {
        Shape::DiscComplement { center, radius }
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Self {
        Shape::Polygon { vertices }
    }

    pub fn slit(start: [f64; 2], end: [f64; 2]) -> Self {
        Shape::SlitSegment {
            start,
            end,
            half_width: 0.0,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Shape::DiscComplement { .. })
    }

    fn check(&self) -> Result<()> {
        let finite = |p: &[f64; 2]| p[0].is_finite() && p[1].is_finite();
        match self {
            Shape::Disc { center, radius } | Shape::DiscComplement { center, radius } => {
                if !finite(center) || !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::DegenerateShape(format!(
                        "disc radius must be positive and finite, got {radius}"
                    )));
                }
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 || !vertices.iter().all(finite) {
                    return Err(Error::DegenerateShape(
                        "polygon needs at least 3 finite vertices".into(),
                    ));
                }
                let pts: Vec<Point> = vertices.iter().map(to_point).collect();
                let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
                if signed_area(&pts).abs() <= 1e-14 * scale * scale {
                    return Err(Error::DegenerateShape("polygon has zero area".into()));
                }
                if !polygon_is_simple(&pts) {
                    return Err(Error::DegenerateShape("polygon is not simple".into()));
                }
            }
            Shape::SlitSegment {
                start,
                end,
                half_width,
            } => {
                if !finite(start) || !finite(end) || !half_width.is_finite() || *half_width < 0.0 {
                    return Err(Error::DegenerateShape(
                        "slit needs finite endpoints and half_width >= 0".into(),
                    ));
                }
                if to_point(start) == to_point(end) {
                    return Err(Error::DegenerateShape("slit has zero length".into()));
                }
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box `[xmin, ymin, xmax, ymax]` of a bounded shape.
    fn bbox(&self) -> Option<[f64; 4]> {
        match self {
            Shape::Disc { center, radius } => Some([
                center[0] - radius,
                center[1] - radius,
                center[0] + radius,
                center[1] + radius,
            ]),
            Shape::DiscComplement { .. } => None,
            Shape::Polygon { vertices } => Some(vertices.iter().fold(
                [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
                |b, v| [b[0].min(v[0]), b[1].min(v[1]), b[2].max(v[0]), b[3].max(v[1])],
            )),
            Shape::SlitSegment {
                start,
                end,
                half_width,
            } => Some([
                start[0].min(end[0]) - half_width,
                start[1].min(end[1]) - half_width,
                start[0].max(end[0]) + half_width,
                start[1].max(end[1]) + half_width,
            ]),
        }
    }

    /// Membership of a cell with center `p` and half extents `half`.
    fn covers_cell(&self, p: Point, half: [f64; 2]) -> bool {
        match self {
            Shape::Disc { center, radius } => (p - to_point(center)).norm() <= *radius,
            Shape::DiscComplement { center, radius } => (p - to_point(center)).norm() >= *radius,
            Shape::Polygon { vertices } => point_in_polygon(p, vertices),
            Shape::SlitSegment {
                start,
                end,
                half_width,
            } => {
                let (a, b) = (to_point(start), to_point(end));
                segment_distance(p, a, b) <= *half_width
                    || segment_hits_box(a, b, p, half)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeEntry {
    pub role: Role,
    pub shape: Shape,
}

impl ShapeEntry {
    pub fn new(role: Role, shape: Shape) -> Self {
        ShapeEntry { role, shape }
    }
}

/// Square grid: `resolution × resolution` uniform cells covering
/// `[min, max]`, optionally padded by geometrically growing cells that push
/// the insulating outer wall far away.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_field: Option<FarField>,
}

/// Padding of `cells` extra cells on every side, each `growth` times wider
/// than the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarField {
    pub cells: usize,
    pub growth: f64,
}

impl Default for FarField {
    fn default() -> Self {
        FarField {
            cells: 64,
            growth: 1.1,
        }
    }
}

impl GridSpec {
    /// Grid centered at `center` with half side length `half_width`.
    pub fn square(center: [f64; 2], half_width: f64, resolution: usize) -> Self {
        GridSpec {
            min: [center[0] - half_width, center[1] - half_width],
            max: [center[0] + half_width, center[1] + half_width],
            resolution,
            far_field: None,
        }
    }

    pub fn with_far_field(mut self, far_field: FarField) -> Self {
        self.far_field = Some(far_field);
        self
    }

    pub fn cell_size(&self) -> f64 {
        (self.max[0] - self.min[0]) / self.resolution as f64
    }

    fn check(&self) -> Result<()> {
        let w = self.max[0] - self.min[0];
        let hgt = self.max[1] - self.min[1];
        if self.resolution < 2 {
            return Err(Error::InvalidSpec("resolution must be at least 2".into()));
        }
        if !(w.is_finite() && hgt.is_finite() && w > 0.0 && hgt > 0.0) {
            return Err(Error::InvalidSpec("grid bounds must be a nonempty rectangle".into()));
        }
        if (w - hgt).abs() > 1e-12 * w.max(hgt) {
            return Err(Error::InvalidSpec(format!(
                "grid bounds must be square (got {w} x {hgt})"
            )));
        }
        if let Some(ff) = self.far_field {
            if !(ff.growth >= 1.0 && ff.growth <= 2.0) || ff.cells > 4096 {
                return Err(Error::InvalidSpec(format!(
                    "far_field growth must lie in [1, 2] and cells <= 4096, got {ff:?}"
                )));
            }
        }
        Ok(())
    }

    fn axis(&self, dim: usize) -> Axis {
        let h = self.cell_size();
        let pad = self.far_field.unwrap_or(FarField {
            cells: 0,
            growth: 1.0,
        });
        let mut low = Vec::with_capacity(pad.cells);
        let (mut f, mut width) = (self.min[dim], h);
        for _ in 0..pad.cells {
            width *= pad.growth;
            f -= width;
            low.push(f);
        }
        let mut faces: Vec<f64> = low.into_iter().rev().collect();
        faces.extend((0..=self.resolution).map(|k| self.min[dim] + k as f64 * h));
        let (mut f, mut width) = (faces[faces.len() - 1], h);
        for _ in 0..pad.cells {
            width *= pad.growth;
            f += width;
            faces.push(f);
        }
        Axis::from_faces(faces)
    }
}

/// Cell faces and centers along one grid axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub faces: Vec<f64>,
    pub centers: Vec<f64>,
}

impl Axis {
    fn from_faces(faces: Vec<f64>) -> Self {
        let centers = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Axis { faces, centers }
    }

    pub fn width(&self, i: usize) -> f64 {
        self.faces[i + 1] - self.faces[i]
    }

    /// Index `i` with `centers[i] <= x < centers[i + 1]`.
    pub fn bracket(&self, x: f64) -> Option<usize> {
        let c = &self.centers;
        if !(x >= c[0] && x <= c[c.len() - 1]) {
            return None;
        }
        let i = c.partition_point(|&v| v <= x);
        Some(i.saturating_sub(1).min(c.len() - 2))
    }
}

pub const SPEC_SCHEMA: &str = "capq-spec/1";

/// Two continua plus the grid they are rasterized on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitorSpec {
    pub schema: String,
    pub shapes: Vec<ShapeEntry>,
    pub grid: GridSpec,
}

impl CapacitorSpec {
    pub fn new(shapes: Vec<ShapeEntry>, grid: GridSpec) -> Self {
        CapacitorSpec {
            schema: SPEC_SCHEMA.to_string(),
            shapes,
            grid,
        }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.grid.resolution = resolution;
        self
    }

    pub fn shapes(&self, role: Role) -> impl Iterator<Item = &Shape> {
        self.shapes
            .iter()
            .filter(move |s| s.role == role)
            .map(|s| &s.shape)
    }

    /// The same capacitor with the roles of `E` and `F` exchanged.
    pub fn swapped(&self) -> Self {
        let shapes = self
            .shapes
            .iter()
            .map(|s| ShapeEntry {
                role: match s.role {
                    Role::E => Role::F,
                    Role::F => Role::E,
                },
                shape: s.shape.clone(),
            })
            .collect();
        CapacitorSpec {
            shapes,
            ..self.clone()
        }
    }

    /// Checks every invariant, including disjointness after rasterization.
    pub fn validate(self) -> Result<ValidSpec> {
        validate_spec(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// A spec that passed [`validate_spec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidSpec(CapacitorSpec);

impl ValidSpec {
    pub fn spec(&self) -> &CapacitorSpec {
        &self.0
    }

    pub fn into_inner(self) -> CapacitorSpec {
        self.0
    }
}

impl std::ops::Deref for ValidSpec {
    type Target = CapacitorSpec;
    fn deref(&self) -> &CapacitorSpec {
        &self.0
    }
}

pub fn validate_spec(spec: CapacitorSpec) -> Result<ValidSpec> {
    if spec.schema != SPEC_SCHEMA {
        return Err(Error::InvalidSpec(format!(
            "unsupported schema {:?}, expected {SPEC_SCHEMA:?}",
            spec.schema
        )));
    }
    spec.grid.check()?;
    for role in [Role::E, Role::F] {
        if spec.shapes(role).next().is_none() {
            return Err(Error::InvalidSpec(format!("no shapes with role {role:?}")));
        }
    }
    let unbounded = spec.shapes.iter().filter(|s| s.shape.is_unbounded()).count();
    if unbounded > 1 {
        return Err(Error::InvalidSpec(
            "at most one disc_complement shape is allowed".into(),
        ));
    }
    let g = &spec.grid;
    for entry in &spec.shapes {
        entry.shape.check()?;
        if let Some(b) = entry.shape.bbox() {
            if b[0] < g.min[0] || b[1] < g.min[1] || b[2] > g.max[0] || b[3] > g.max[1] {
                return Err(Error::OutOfBounds(format!(
                    "{:?} shape with bounding box {b:?} is not inside the grid",
                    entry.role
                )));
            }
        }
    }
    let cells = classify(&spec).member;
    let overlap = cells.iter().filter(|c| **c == Membership::Both).count();
    if overlap > 0 {
        return Err(Error::OverlappingContinua { cells: overlap });
    }
    for role in [Role::E, Role::F] {
        let want = match role {
            Role::E => Membership::E,
            Role::F => Membership::F,
        };
        if !cells.contains(&want) {
            return Err(Error::OutOfBounds(format!(
                "continuum {role:?} covers no grid cell"
            )));
        }
    }
    Ok(ValidSpec(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Membership {
    None,
    E,
    F,
    Both,
}

struct Raster {
    xs: Axis,
    ys: Axis,
    member: Vec<Membership>,
}

fn classify(spec: &CapacitorSpec) -> Raster {
    let xs = spec.grid.axis(0);
    let ys = spec.grid.axis(1);
    let (nx, ny) = (xs.centers.len(), ys.centers.len());
    let mut member = vec![Membership::None; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (p, half) = cell_query(&xs, &ys, i, j);
            let in_e = spec.shapes(Role::E).any(|s| s.covers_cell(p, half));
            let in_f = spec.shapes(Role::F).any(|s| s.covers_cell(p, half));
            member[j * nx + i] = match (in_e, in_f) {
                (false, false) => Membership::None,
                (true, false) => Membership::E,
                (false, true) => Membership::F,
                (true, true) => Membership::Both,
            };
        }
    }
    Raster { xs, ys, member }
}

/// Perturbed center and half extents of cell `(i, j)`.
fn cell_query(xs: &Axis, ys: &Axis, i: usize, j: usize) -> (Point, [f64; 2]) {
    let (wx, wy) = (xs.width(i), ys.width(j));
    (
        Point::new(
            xs.centers[i] + TIE_OFFSET * wx,
            ys.centers[j] + TIE_OFFSET * wy,
        ),
        [0.5 * wx, 0.5 * wy],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Interior,
    BoundaryE,
    BoundaryF,
    /// Excluded from the solve: a pocket of `Ω` that does not touch both
    /// continua.
    Outer,
}

/// Cell classification of a rasterized capacitor.
///
/// Cells are stored row-major: cell `(i, j)` (column `i`, row `j`) has
/// index `j * n + i`. Inside the spec's bounds the cells are uniform with
/// width `h`; far-field padding cells, when requested, grow outward.
#[derive(Debug, Clone)]
pub struct GridMask {
    pub n: usize,
    /// Width of the uniform cells.
    pub h: f64,
    pub xs: Axis,
    pub ys: Axis,
    /// The uniform region `[xmin, ymin, xmax, ymax]`.
    pub core: [f64; 4],
    pub cells: Vec<CellKind>,
    /// Whether `E` (resp. `F`) contains the point at infinity.
    pub e_unbounded: bool,
    pub f_unbounded: bool,
    /// A cell of each continuum nearest its centroid.
    pub e_anchor: Point,
    pub f_anchor: Point,
}

impl GridMask {
    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(self.xs.centers[i], self.ys.centers[j])
    }

    pub fn kind(&self, i: usize, j: usize) -> CellKind {
        self.cells[j * self.n + i]
    }

    /// Full extent of the grid including any padding.
    pub fn bounds(&self) -> [f64; 4] {
        let (fx, fy) = (&self.xs.faces, &self.ys.faces);
        [fx[0], fy[0], fx[fx.len() - 1], fy[fy.len() - 1]]
    }

    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        self.xs.width(i) * self.ys.width(j)
    }

    /// Coupling weight of the edge between `(i, j)` and `(i + 1, j)`.
    pub fn weight_x(&self, i: usize, j: usize) -> f64 {
        self.ys.width(j) / (self.xs.centers[i + 1] - self.xs.centers[i])
    }

    /// Coupling weight of the edge between `(i, j)` and `(i, j + 1)`.
    pub fn weight_y(&self, i: usize, j: usize) -> f64 {
        self.xs.width(i) / (self.ys.centers[j + 1] - self.ys.centers[j])
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| **c == kind).count()
    }

    /// Connected components (4-connectivity) of the interior cells.
    pub fn interior_components(&self) -> usize {
        components(self.n, |idx| self.cells[idx] == CellKind::Interior, false).1
    }

    /// Topology summary: interior components and 8-connected components of
    /// each continuum.
    pub fn topology(&self) -> Topology {
        let n = self.n;
        Topology {
            interior_components: self.interior_components(),
            e_components: components(n, |i| self.cells[i] == CellKind::BoundaryE, true).1,
            f_components: components(n, |i| self.cells[i] == CellKind::BoundaryF, true).1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub interior_components: usize,
    pub e_components: usize,
    pub f_components: usize,
}

impl Topology {
    /// One interior region between exactly one piece of `E` and one of `F`.
    pub fn is_doubly_connected(&self) -> bool {
        self.interior_components == 1 && self.e_components == 1 && self.f_components == 1
    }
}

/// Labels connected components of the cells selected by `keep`.
/// Returns the label per cell (`usize::MAX` for unselected) and the count.
fn components(n: usize, keep: impl Fn(usize) -> bool, diagonal: bool) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; n * n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n * n {
        if label[start] != usize::MAX || !keep(start) {
            continue;
        }
        label[start] = count;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = ((idx % n) as isize, (idx / n) as isize);
            for dj in -1isize..=1 {
                for di in -1isize..=1 {
                    if (di == 0 && dj == 0) || (!diagonal && di != 0 && dj != 0) {
                        continue;
                    }
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                        continue;
                    }
                    let k = b as usize * n + a as usize;
                    if label[k] == usize::MAX && keep(k) {
                        label[k] = count;
                        stack.push(k);
                    }
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Classifies every grid cell of a validated spec.
pub fn rasterize(spec: &ValidSpec) -> Result<GridMask> {
    let Raster { xs, ys, member } = classify(spec);
    let n = xs.centers.len();

    // A slit that produced no cells has vanished.
    for entry in &spec.shapes {
        if let Shape::SlitSegment { .. } = entry.shape {
            let any = (0..n * n).any(|idx| {
                let (p, half) = cell_query(&xs, &ys, idx % n, idx / n);
                entry.shape.covers_cell(p, half)
            });
            if !any {
                return Err(Error::ResolutionTooCoarse(format!(
                    "{:?} slit vanishes on the grid",
                    entry.role
                )));
            }
        }
    }

    // E and F must not share a cell neighborhood.
    let dist_to_e = chebyshev_distance(n, |idx| member[idx] == Membership::E);
    if let Some(idx) = (0..n * n)
        .find(|&idx| member[idx] == Membership::F && dist_to_e[idx] < MIN_SEPARATION_CELLS)
    {
        return Err(Error::ResolutionTooCoarse(format!(
            "E and F are {} cell(s) apart near cell ({}, {}); need at least {}",
            dist_to_e[idx],
            idx % n,
            idx / n,
            MIN_SEPARATION_CELLS
        )));
    }

    let mut cells: Vec<CellKind> = member
        .iter()
        .map(|m| match m {
            Membership::E => CellKind::BoundaryE,
            Membership::F => CellKind::BoundaryF,
            _ => CellKind::Interior,
        })
        .collect();

    // Interior components that do not touch both continua are excluded.
    let (label, count) = components(n, |idx| cells[idx] == CellKind::Interior, false);
    let mut touches = vec![(false, false); count];
    for idx in 0..n * n {
        if label[idx] == usize::MAX {
            continue;
        }
        let (i, j) = (idx % n, idx / n);
        for (a, b) in neighbors4(n, i, j) {
            match cells[b * n + a] {
                CellKind::BoundaryE => touches[label[idx]].0 = true,
                CellKind::BoundaryF => touches[label[idx]].1 = true,
                _ => {}
            }
        }
    }
    for idx in 0..n * n {
        if label[idx] != usize::MAX && touches[label[idx]] != (true, true) {
            cells[idx] = CellKind::Outer;
        }
    }

    let center = |idx: usize| Point::new(xs.centers[idx % n], ys.centers[idx / n]);
    let anchor = |kind: CellKind| -> Point {
        let (sum, count) = (0..n * n)
            .filter(|&idx| cells[idx] == kind)
            .fold((Point::new(0.0, 0.0), 0usize), |(s, c), idx| (s + center(idx), c + 1));
        let centroid = sum / count.max(1) as f64;
        (0..n * n)
            .filter(|&idx| cells[idx] == kind)
            .map(center)
            .min_by(|a, b| (a - centroid).norm().total_cmp(&(b - centroid).norm()))
            .unwrap_or(centroid)
    };

    let g = &spec.grid;
    Ok(GridMask {
        n,
        h: g.cell_size(),
        core: [g.min[0], g.min[1], g.max[0], g.max[1]],
        e_anchor: anchor(CellKind::BoundaryE),
        f_anchor: anchor(CellKind::BoundaryF),
        e_unbounded: spec.shapes(Role::E).any(Shape::is_unbounded),
        f_unbounded: spec.shapes(Role::F).any(Shape::is_unbounded),
        xs,
        ys,
        cells,
    })
}

pub(crate) fn neighbors4(n: usize, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
    let cand = [
        (i.wrapping_sub(1), j),
        (i + 1, j),
        (i, j.wrapping_sub(1)),
        (i, j + 1),
    ];
    cand.into_iter().filter(move |&(a, b)| a < n && b < n)
}

/// Chebyshev distance (in cells) from every cell to the nearest selected
/// cell, saturating at `MIN_SEPARATION_CELLS`.
fn chebyshev_distance(n: usize, seed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut dist: Vec<usize> = (0..n * n)
        .map(|idx| if seed(idx) { 0 } else { MIN_SEPARATION_CELLS })
        .collect();
    for step in 1..MIN_SEPARATION_CELLS {
        let prev = dist.clone();
        for j in 0..n {
            for i in 0..n {
                if prev[j * n + i] <= step {
                    continue;
                }
                let lo_i = i.saturating_sub(1);
                let lo_j = j.saturating_sub(1);
                let near = (lo_j..=(j + 1).min(n - 1))
                    .any(|b| (lo_i..=(i + 1).min(n - 1)).any(|a| prev[b * n + a] == step - 1));
                if near {
                    dist[j * n + i] = step;
                }
            }
        }
    }
    dist
}

pub(crate) fn to_point(p: &[f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

fn polygon_is_simple(pts: &[Point]) -> bool {
    let n = pts.len();
    for a in 0..n {
        for b in a + 1..n {
            // adjacent edges share a vertex
            if b == a + 1 || (a == 0 && b == n - 1) {
                continue;
            }
            if segments_intersect(pts[a], pts[(a + 1) % n], pts[b], pts[(b + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn cross(a: Point, b: Point) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Closed-segment intersection test.
pub(crate) fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, p: Point, d: f64| {
        d == 0.0
            && p.re >= a.re.min(b.re)
            && p.re <= a.re.max(b.re)
            && p.im >= a.im.min(b.im)
            && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Even-odd ray casting.
fn point_in_polygon(p: Point, vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (vertices[i][0], vertices[i][1]);
        let (xj, yj) = (vertices[j][0], vertices[j][1]);
        if (yi > p.im) != (yj > p.im) && p.re < (xj - xi) * (p.im - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / ab.norm_sqr();
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Whether segment `ab` meets the closed square of half side `half`
/// centered at `c` (Liang–Barsky clipping).
fn segment_hits_box(a: Point, b: Point, c: Point, half: [f64; 2]) -> bool {
    let d = b - a;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    let tests = [
        (-d.re, a.re - (c.re - half[0])),
        (d.re, (c.re + half[0]) - a.re),
        (-d.im, a.im - (c.im - half[1])),
        (d.im, (c.im + half[1]) - a.im),
    ];
    for (p, q) in tests {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Ready-made capacitors used by the examples, tests and CLI demos.
pub mod presets {
    use super::*;

    /// Round annulus `{inner < |z| < outer}` with `E` the inner disc.
    pub fn annulus(inner: f64, outer: f64, resolution: usize) -> CapacitorSpec {
        CapacitorSpec::new(
            vec![
                ShapeEntry::new(Role::E, Shape::disc([0.0, 0.0], inner)),
                ShapeEntry::new(Role::F, Shape::disc_complement([0.0, 0.0], outer)),
            ],
            GridSpec::square([0.0, 0.0], 1.25 * outer, resolution),
        )
    }

    /// Two unit discs centered at `(∓2, 0)`, insulating grid edge.
    pub fn two_discs(resolution: usize) -> CapacitorSpec {
        CapacitorSpec::new(
            vec![
                ShapeEntry::new(Role::E, Shape::disc([-2.0, 0.0], 1.0)),
                ShapeEntry::new(Role::F, Shape::disc([2.0, 0.0], 1.0)),
            ],
            GridSpec::square([0.0, 0.0], 5.0, resolution).with_far_field(FarField::default()),
        )
    }

    /// Twisted Teichmüller domain: `E = [-1, 1]` and `F` the two vertical
    /// rays `{Re z = 0, |Im z| >= gap}` joined at infinity. The rays are
    /// truncated at the far-field circle of radius `far`, outside of which
    /// everything belongs to `F`.
    pub fn twisted_teichmuller(gap: f64, far: f64, resolution: usize) -> CapacitorSpec {
        let reach = 1.1 * far;
        CapacitorSpec::new(
            vec![
                ShapeEntry::new(Role::E, Shape::slit([-1.0, 0.0], [1.0, 0.0])),
                ShapeEntry::new(Role::F, Shape::slit([0.0, gap], [0.0, reach])),
                ShapeEntry::new(Role::F, Shape::slit([0.0, -gap], [0.0, -reach])),
                ShapeEntry::new(Role::F, Shape::disc_complement([0.0, 0.0], far)),
            ],
            GridSpec::square([0.0, 0.0], 1.2 * far, resolution),
        )
    }

    /// The `p` for which `[-1, -p] ∪ [p, 1]` is Möbius equivalent to
    /// `ℂ \ ([-1, 0] ∪ [√2 − 1, ∞))`, i.e. `(1 − p)²/(4p) = 1/(√2 − 1)`.
    pub fn teichmuller_slit_parameter() -> f64 {
        let c = 1.0 + 2.0 / (2f64.sqrt() - 1.0);
        c - (c * c - 1.0).sqrt()
    }

    /// Two collinear slits `[-1, -p] ∪ [p, 1]` on the real axis; infinity
    /// lies in `Ω`, handled by far-field padding.
    pub fn symmetric_slits(p: f64, half_width: f64, resolution: usize) -> CapacitorSpec {
        CapacitorSpec::new(
            vec![
                ShapeEntry::new(Role::E, Shape::slit([-1.0, 0.0], [-p, 0.0])),
                ShapeEntry::new(Role::F, Shape::slit([p, 0.0], [1.0, 0.0])),
            ],
            GridSpec::square([0.0, 0.0], half_width, resolution).with_far_field(FarField::default()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    fn two(e: Shape, f: Shape, res: usize) -> CapacitorSpec {
        CapacitorSpec::new(
            vec![ShapeEntry::new(Role::E, e), ShapeEntry::new(Role::F, f)],
            GridSpec::square([0.0, 0.0], 5.0, res),
        )
    }

    #[test]
    fn disjoint_discs_validate() {
        assert!(two_discs(512).validate().is_ok());
    }

    #[test]
    fn overlapping_discs_rejected() {
        let spec = two(Shape::disc([-1.0, 0.0], 2.0), Shape::disc([1.0, 0.0], 2.0), 512);
        assert!(matches!(spec.validate(), Err(Error::OverlappingContinua { .. })));
    }

    #[test]
    fn annulus_capacitor_is_valid() {
        let spec = two(
            Shape::disc([0.0, 0.0], 0.5),
            Shape::disc_complement([0.0, 0.0], 2.0),
            256,
        );
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn degenerate_shapes_rejected() {
        let bad = [
            Shape::disc([0.0, 0.0], 0.0),
            Shape::polygon(vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]),
            Shape::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
            Shape::slit([1.0, 1.0], [1.0, 1.0]),
        ];
        for shape in bad {
            let spec = two(shape.clone(), Shape::disc([3.0, 3.0], 0.5), 64);
            assert!(
                matches!(spec.validate(), Err(Error::DegenerateShape(_))),
                "{shape:?}"
            );
        }
    }

    #[test]
    fn shape_outside_bounds_rejected() {
        let spec = two(Shape::disc([-4.5, 0.0], 1.0), Shape::disc([2.0, 0.0], 1.0), 64);
        assert!(matches!(spec.validate(), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn two_disc_complements_rejected() {
        let spec = two(
            Shape::disc_complement([0.0, 0.0], 4.0),
            Shape::disc_complement([0.0, 0.0], 4.5),
            64,
        );
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn annulus_mask_is_one_ring() {
        let mask = rasterize(&annulus(0.5, 2.0, 256).validate().unwrap()).unwrap();
        let topo = mask.topology();
        assert!(topo.is_doubly_connected(), "{topo:?}");
        assert_eq!(mask.count(CellKind::Outer), 0);
        assert!(mask.f_unbounded && !mask.e_unbounded);
    }

    #[test]
    fn twisted_teichmuller_mask_is_doubly_connected() {
        let mask = rasterize(&twisted_teichmuller(0.3, 3.0, 256).validate().unwrap()).unwrap();
        assert!(mask.topology().is_doubly_connected());
    }

    #[test]
    fn coarse_grid_reports_touching_continua() {
        let spec = CapacitorSpec::new(
            vec![
                ShapeEntry::new(Role::E, Shape::disc([-1.3, 0.0], 1.0)),
                ShapeEntry::new(Role::F, Shape::disc([1.3, 0.0], 1.0)),
            ],
            GridSpec::square([0.0, 0.0], 8.0, 16),
        );
        let err = rasterize(&spec.validate().unwrap()).unwrap_err();
        assert!(matches!(err, Error::ResolutionTooCoarse(_)), "{err}");
    }

    #[test]
    fn zero_width_slit_on_grid_line_is_one_cell_thick() {
        let spec = symmetric_slits(0.25, 1.5, 64);
        let mask = rasterize(&spec.validate().unwrap()).unwrap();
        let rows: std::collections::BTreeSet<usize> = (0..mask.n * mask.n)
            .filter(|&k| mask.cells[k] == CellKind::BoundaryE)
            .map(|k| k / mask.n)
            .collect();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn diagonal_slit_is_four_connected() {
        let spec = two(
            Shape::slit([-3.0, -3.0], [-1.0, -1.3]),
            Shape::disc([2.0, 2.0], 1.0),
            128,
        );
        let mask = rasterize(&spec.validate().unwrap()).unwrap();
        let (_, count) = components(mask.n, |k| mask.cells[k] == CellKind::BoundaryE, false);
        assert_eq!(count, 1);
    }

    #[test]
    fn polygon_membership() {
        let square = vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        assert!(point_in_polygon(Point::new(0.0, 0.0), &square));
        assert!(!point_in_polygon(Point::new(1.5, 0.0), &square));
    }

    #[test]
    fn disc_area_converges() {
        let err_at = |res: usize| {
            let mask = rasterize(&two_discs(res).validate().unwrap()).unwrap();
            let area = mask.count(CellKind::BoundaryE) as f64 * mask.h * mask.h;
            (area - std::f64::consts::PI).abs()
        };
        let (coarse, fine) = (err_at(128), err_at(512));
        assert!(fine < coarse, "{coarse} -> {fine}");
        assert!(fine < 0.02);
    }

    #[test]
    fn refinement_keeps_topology() {
        for spec in [annulus(0.5, 2.0, 64), two_discs(64)] {
            let base = rasterize(&spec.clone().validate().unwrap()).unwrap().topology();
            let fine = rasterize(&spec.with_resolution(128).validate().unwrap())
                .unwrap()
                .topology();
            assert_eq!(base, fine);
        }
    }

    #[test]
    fn unknown_json_fields_rejected() {
        let text = r#"{"schema":"capq-spec/1","shapes":[],"grid":{"min":[0,0],"max":[1,1],"resolution":8},"extra":1}"#;
        assert!(CapacitorSpec::from_json(text).is_err());
        let text = r#"{"schema":"capq-spec/1","shapes":[{"role":"E","shape":{"kind":"disc","center":[0,0],"radius":1,"radus":2}}],"grid":{"min":[0,0],"max":[1,1],"resolution":8}}"#;
        assert!(CapacitorSpec::from_json(text).is_err());
    }
}
