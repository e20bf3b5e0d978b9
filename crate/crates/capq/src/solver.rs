//! Extremal potential and capacity of a rasterized capacitor.
//!
//! The admissible potential is `+1` on `E` and `-1` on `F`; the minimiser of
//! the discrete Dirichlet energy solves a 5-point finite-volume Laplace
//! equation on the interior cells, with zero normal derivative across the
//! grid edge and across excluded cells. The system is symmetric positive
//! definite and is solved by conjugate gradients preconditioned with an
//! aggregation multigrid V-cycle.

use crate::capacitor::{CellKind, GridMask};
use crate::{Error, Point, Result};

/// Relative residual `‖b − Au‖ / ‖b‖` required of a solve.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Capacities above this are flagged as unreliable.
pub const RELIABLE_CAPACITY_LIMIT: f64 = 1e3;

const NONE: u32 = u32::MAX;

/// Solved potential on a grid.
#[derive(Debug, Clone)]
pub struct PotentialField {
    /// Potential per cell, row-major; `NaN` on excluded cells.
    pub values: Vec<f64>,
    pub mask: GridMask,
    /// Conformal capacity (ring modulus), `8π / ∬|∇u|²`.
    pub capacity: f64,
    /// `(1/4π) ∬|∇u|²`, the value of the variational functional itself.
    pub dirichlet_functional: f64,
    /// Final relative residual of the linear solve.
    pub residual: f64,
    pub iterations: usize,
    pub reliable: bool,
}

impl PotentialField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.mask.n + i]
    }

    /// Bilinear interpolation between cell centers; `None` outside the
    /// sampled region or next to excluded cells.
    pub fn interpolate(&self, p: Point) -> Option<f64> {
        let m = &self.mask;
        let i = m.xs.bracket(p.re)?;
        let j = m.ys.bracket(p.im)?;
        let (cx, cy) = (&m.xs.centers, &m.ys.centers);
        let tx = (p.re - cx[i]) / (cx[i + 1] - cx[i]);
        let ty = (p.im - cy[j]) / (cy[j + 1] - cy[j]);
        let v = [
            self.value(i, j),
            self.value(i + 1, j),
            self.value(i, j + 1),
            self.value(i + 1, j + 1),
        ];
        if v.iter().any(|x| x.is_nan()) {
            return None;
        }
        Some(
            v[0] * (1.0 - tx) * (1.0 - ty)
                + v[1] * tx * (1.0 - ty)
                + v[2] * (1.0 - tx) * ty
                + v[3] * tx * ty,
        )
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .filter(|v| !v.is_nan())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Discrete Dirichlet energy of the stored values.
    pub fn energy(&self) -> f64 {
        discrete_energy(&self.mask, &self.values)
    }
}

/// Discrete Dirichlet energy `Σ w_pq (u_p − u_q)²` over all grid edges
/// joining two non-excluded cells, with the finite-volume edge weights of
/// the mask. This is the quadratic form the linear system minimises; in the
/// continuum limit it approximates `∬|∇u|²`.
pub fn discrete_energy(mask: &GridMask, values: &[f64]) -> f64 {
    let n = mask.n;
    let mut sum = NeumaierSum::default();
    for j in 0..n {
        for i in 0..n {
            let k = j * n + i;
            if mask.cells[k] == CellKind::Outer {
                continue;
            }
            if i + 1 < n && mask.cells[k + 1] != CellKind::Outer {
                let d = values[k] - values[k + 1];
                sum.add(mask.weight_x(i, j) * d * d);
            }
            if j + 1 < n && mask.cells[k + n] != CellKind::Outer {
                let d = values[k] - values[k + n];
                sum.add(mask.weight_y(i, j) * d * d);
            }
        }
    }
    sum.total()
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.comp
    }
}

fn boundary_value(kind: CellKind) -> Option<f64> {
    match kind {
        CellKind::BoundaryE => Some(1.0),
        CellKind::BoundaryF => Some(-1.0),
        _ => None,
    }
}

/// Symmetric weighted graph Laplacian plus a nonnegative diagonal shift:
/// `(Ax)_u = diag_u x_u − Σ_v w_uv x_v`. `diag` includes the weights of
/// edges to fixed (Dirichlet) cells.
struct Level {
    rowptr: Vec<u32>,
    col: Vec<u32>,
    w: Vec<f64>,
    diag: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.diag.len()
    }

    fn row(&self, u: usize) -> std::ops::Range<usize> {
        self.rowptr[u] as usize..self.rowptr[u + 1] as usize
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for u in 0..self.len() {
            let mut acc = self.diag[u] * x[u];
            for e in self.row(u) {
                acc -= self.w[e] * x[self.col[e] as usize];
            }
            y[u] = acc;
        }
    }

    fn relax(&self, u: usize, b: &[f64], x: &mut [f64]) {
        let mut acc = b[u];
        for e in self.row(u) {
            acc += self.w[e] * x[self.col[e] as usize];
        }
        x[u] = acc / self.diag[u];
    }

    /// Greedy pairing along the strongest coupling.
    fn pair(&self) -> (Vec<u32>, usize) {
        let mut agg = vec![NONE; self.len()];
        let mut count = 0u32;
        for u in 0..self.len() {
            if agg[u] != NONE {
                continue;
            }
            agg[u] = count;
            let strongest = self.row(u).map(|e| self.w[e]).fold(0.0, f64::max);
            let best = self
                .row(u)
                .filter(|&e| agg[self.col[e] as usize] == NONE && self.w[e] >= 0.25 * strongest)
                .max_by(|&a, &b| self.w[a].total_cmp(&self.w[b]).then(b.cmp(&a)));
            if let Some(e) = best {
                agg[self.col[e] as usize] = count;
            }
            count += 1;
        }
        (agg, count as usize)
    }

    /// Galerkin coarse operator `Pᵀ A P` for piecewise-constant `P`.
    fn galerkin(&self, agg: &[u32], m: usize) -> Level {
        let mut start = vec![0u32; m + 1];
        for &a in agg {
            start[a as usize + 1] += 1;
        }
        for a in 0..m {
            start[a + 1] += start[a];
        }
        let mut members = vec![0u32; agg.len()];
        let mut fill = start.clone();
        for (u, &a) in agg.iter().enumerate() {
            members[fill[a as usize] as usize] = u as u32;
            fill[a as usize] += 1;
        }

        let mut diag = vec![0.0; m];
        let mut rowptr = Vec::with_capacity(m + 1);
        let mut col: Vec<u32> = Vec::new();
        let mut w: Vec<f64> = Vec::new();
        let mut slot = vec![NONE; m];
        rowptr.push(0);
        for a in 0..m {
            let row_start = col.len();
            for &u in &members[start[a] as usize..start[a + 1] as usize] {
                let u = u as usize;
                diag[a] += self.diag[u];
                for e in self.row(u) {
                    let b = agg[self.col[e] as usize];
                    if b as usize == a {
                        diag[a] -= self.w[e];
                    } else if slot[b as usize] == NONE {
                        slot[b as usize] = col.len() as u32;
                        col.push(b);
                        w.push(self.w[e]);
                    } else {
                        w[slot[b as usize] as usize] += self.w[e];
                    }
                }
            }
            for &b in &col[row_start..] {
                slot[b as usize] = NONE;
            }
            rowptr.push(col.len() as u32);
        }
        Level {
            rowptr,
            col,
            w,
            diag,
        }
    }

    /// Two rounds of pairing, giving aggregates of up to four unknowns.
    fn coarsen(&self) -> (Level, Vec<u32>) {
        let (first, m1) = self.pair();
        let mid = self.galerkin(&first, m1);
        let (second, m2) = mid.pair();
        let map: Vec<u32> = first.iter().map(|&a| second[a as usize]).collect();
        (self.galerkin(&map, m2), map)
    }

    fn dense(&self) -> Vec<f64> {
        let m = self.len();
        let mut a = vec![0.0; m * m];
        for u in 0..m {
            a[u * m + u] = self.diag[u];
            for e in self.row(u) {
                a[u * m + self.col[e] as usize] -= self.w[e];
            }
        }
        a
    }
}

/// In-place Cholesky factorisation of a dense SPD matrix (lower triangle).
fn cholesky(a: &mut [f64], m: usize) -> Result<()> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > 0.0) {
            return Err(Error::NonConvergence {
                what: "coarse factorisation",
                iterations: j,
                residual: d,
            });
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
    }
    Ok(())
}

fn cholesky_solve(l: &[f64], m: usize, x: &mut [f64]) {
    for i in 0..m {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * m + k] * x[k];
        }
        x[i] = s / l[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = x[i];
        for k in i + 1..m {
            s -= l[k * m + i] * x[k];
        }
        x[i] = s / l[i * m + i];
    }
}

const COARSEST: usize = 500;
/// Over-correction of the piecewise-constant coarse-grid correction.
const COARSE_SCALE: f64 = 1.4;

struct Multigrid {
    levels: Vec<Level>,
    /// Aggregate map from level `l` to level `l + 1`.
    maps: Vec<Vec<u32>>,
    coarse: Vec<f64>,
}

impl Multigrid {
    fn new(fine: Level) -> Result<Self> {
        let mut levels = vec![fine];
        let mut maps = Vec::new();
        while levels.last().unwrap().len() > COARSEST {
            let (next, map) = levels.last().unwrap().coarsen();
            if next.len() == levels.last().unwrap().len() {
                break;
            }
            levels.push(next);
            maps.push(map);
        }
        let last = levels.last().unwrap();
        let m = last.len();
        let mut coarse = last.dense();
        cholesky(&mut coarse, m)?;
        Ok(Multigrid {
            levels,
            maps,
            coarse,
        })
    }

    /// `x = M⁻¹ b` by one symmetric V-cycle.
    fn precondition(&self, b: &[f64], x: &mut [f64]) {
        self.cycle(0, b, x);
    }

    fn cycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        let level = &self.levels[l];
        let m = level.len();
        if l + 1 == self.levels.len() {
            x.copy_from_slice(b);
            cholesky_solve(&self.coarse, m, x);
            return;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        for u in 0..m {
            level.relax(u, b, x);
        }
        let mut r = vec![0.0; m];
        level.apply(x, &mut r);
        let map = &self.maps[l];
        let mc = self.levels[l + 1].len();
        let mut bc = vec![0.0; mc];
        for u in 0..m {
            bc[map[u] as usize] += b[u] - r[u];
        }
        let mut xc = vec![0.0; mc];
        self.cycle(l + 1, &bc, &mut xc);
        for u in 0..m {
            x[u] += COARSE_SCALE * xc[map[u] as usize];
        }
        for u in (0..m).rev() {
            level.relax(u, b, x);
        }
    }
}

/// Linear system for the interior cells of a mask.
struct System {
    /// Cell index of each unknown, ascending.
    cells: Vec<usize>,
    level: Level,
    rhs: Vec<f64>,
}

impl System {
    fn assemble(mask: &GridMask) -> Result<Self> {
        let n = mask.n;
        let mut unknown = vec![NONE; n * n];
        let cells: Vec<usize> = (0..n * n)
            .filter(|&k| mask.cells[k] == CellKind::Interior)
            .collect();
        if cells.is_empty() {
            return Err(Error::DisconnectedDomain);
        }
        for (u, &k) in cells.iter().enumerate() {
            unknown[k] = u as u32;
        }
        let mut rowptr = Vec::with_capacity(cells.len() + 1);
        let mut col = Vec::with_capacity(4 * cells.len());
        let mut wts = Vec::with_capacity(4 * cells.len());
        let mut diag = Vec::with_capacity(cells.len());
        let mut rhs = Vec::with_capacity(cells.len());
        let (mut sees_e, mut sees_f) = (false, false);
        rowptr.push(0);
        for &k in &cells {
            let (i, j) = (k % n, k / n);
            let cand = [
                (j > 0).then(|| (k - n, mask.weight_y(i, j - 1))),
                (i > 0).then(|| (k - 1, mask.weight_x(i - 1, j))),
                (i + 1 < n).then(|| (k + 1, mask.weight_x(i, j))),
                (j + 1 < n).then(|| (k + n, mask.weight_y(i, j))),
            ];
            let mut d = 0.0;
            let mut b = 0.0;
            for (q, w) in cand.into_iter().flatten() {
                match mask.cells[q] {
                    CellKind::Outer => {}
                    CellKind::Interior => {
                        col.push(unknown[q]);
                        wts.push(w);
                        d += w;
                    }
                    kind => {
                        let v = boundary_value(kind).unwrap();
                        sees_e |= v > 0.0;
                        sees_f |= v < 0.0;
                        b += w * v;
                        d += w;
                    }
                }
            }
            rowptr.push(col.len() as u32);
            diag.push(d);
            rhs.push(b);
        }
        if !(sees_e && sees_f) {
            return Err(Error::DisconnectedDomain);
        }
        Ok(System {
            cells,
            level: Level {
                rowptr,
                col,
                w: wts,
                diag,
            },
            rhs,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves for the extremal potential of `mask` to relative residual `tol`.
pub fn solve_potential(mask: &GridMask, tol: f64) -> Result<PotentialField> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let System { cells, level, rhs } = System::assemble(mask)?;
    let mg = Multigrid::new(level)?;
    let sys = &mg.levels[0];
    let budget = 50 * mask.n;
    let m = cells.len();

    let b_norm = dot(&rhs, &rhs).sqrt();
    let mut x = vec![0.0; m];
    let mut r = rhs.clone();
    let mut z = vec![0.0; m];
    let mut q = vec![0.0; m];
    mg.precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut residual = dot(&r, &r).sqrt() / b_norm;
    let mut iterations = 0;
    while residual > tol {
        if iterations >= budget {
            return Err(Error::NonConvergence {
                what: "conjugate-gradient solve",
                iterations,
                residual,
            });
        }
        sys.apply(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for u in 0..m {
            x[u] += alpha * p[u];
            r[u] -= alpha * q[u];
        }
        iterations += 1;
        // Recompute the true residual now and then to avoid drift.
        if iterations % 50 == 0 {
            sys.apply(&x, &mut q);
            for u in 0..m {
                r[u] = rhs[u] - q[u];
            }
        }
        residual = dot(&r, &r).sqrt() / b_norm;
        if residual <= tol {
            break;
        }
        mg.precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for u in 0..m {
            p[u] = z[u] + beta * p[u];
        }
    }
    sys.apply(&x, &mut q);
    let true_res = rhs
        .iter()
        .zip(&q)
        .map(|(b, ax)| (b - ax) * (b - ax))
        .sum::<f64>()
        .sqrt()
        / b_norm;
    if true_res > 10.0 * tol {
        return Err(Error::NonConvergence {
            what: "conjugate-gradient solve",
            iterations,
            residual: true_res,
        });
    }

    let mut values: Vec<f64> = mask
        .cells
        .iter()
        .map(|&c| boundary_value(c).unwrap_or(f64::NAN))
        .collect();
    for (u, &k) in cells.iter().enumerate() {
        values[k] = x[u];
    }
    let energy = discrete_energy(mask, &values);
    let capacity = 8.0 * std::f64::consts::PI / energy;
    Ok(PotentialField {
        values,
        mask: mask.clone(),
        capacity,
        dirichlet_functional: energy / (4.0 * std::f64::consts::PI),
        residual: true_res,
        iterations,
        reliable: capacity <= RELIABLE_CAPACITY_LIMIT,
    })
}

/// Conformal capacity of a solved field.
pub fn capacity(field: &PotentialField) -> f64 {
    field.capacity
}

/// Closed-form extremal potential of the annulus `{r < |z| < R}` with the
/// inner circle at `-1` and the outer circle at `+1`:
/// `u(z) = 2·log(|z|/r)/log(R/r) − 1`.
pub fn annulus_extremal(r: f64, big_r: f64, z: Point) -> Result<f64> {
    if !(r > 0.0 && r < big_r && big_r.is_finite()) {
        return Err(Error::domain(format!("need 0 < r < R, got r={r}, R={big_r}")));
    }
    let rho = z.norm();
    if !(rho >= r && rho <= big_r) {
        return Err(Error::OutOfAnnulus {
            modulus: rho,
            inner: r,
            outer: big_r,
        });
    }
    Ok(2.0 * (rho / r).ln() / (big_r / r).ln() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacitor::{presets, rasterize};

    fn solve(spec: crate::capacitor::CapacitorSpec) -> PotentialField {
        let mask = rasterize(&spec.validate().unwrap()).unwrap();
        solve_potential(&mask, DEFAULT_TOLERANCE).unwrap()
    }

    #[test]
    fn annulus_extremal_values() {
        let at = |r, big, x| annulus_extremal(r, big, Point::new(x, 0.0)).unwrap();
        assert_eq!(at(0.5, 2.0, 1.0), 0.0);
        assert_eq!(at(0.5, 2.0, 2.0), 1.0);
        assert_eq!(at(0.5, 2.0, 0.5), -1.0);
        assert_eq!(at(0.25, 4.0, 1.0), 0.0);
        assert!(matches!(
            annulus_extremal(0.5, 2.0, Point::new(3.0, 0.0)),
            Err(Error::OutOfAnnulus { .. })
        ));
        assert!(annulus_extremal(2.0, 0.5, Point::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn maximum_principle() {
        for field in [solve(presets::two_discs(64)), solve(presets::annulus(0.5, 2.0, 64))] {
            let (lo, hi) = field.min_max();
            assert!(lo >= -1.0 && hi <= 1.0, "{lo} {hi}");
            assert!(field.residual <= 10.0 * DEFAULT_TOLERANCE);
        }
    }

    #[test]
    fn annulus_pointwise_matches_closed_form() {
        let field = solve(presets::annulus(0.5, 2.0, 256));
        let m = &field.mask;
        let mut worst: f64 = 0.0;
        for j in 0..m.n {
            for i in 0..m.n {
                if m.kind(i, j) != CellKind::Interior {
                    continue;
                }
                let z = m.center(i, j);
                // E (inner) is +1 here, the closed form has the inner circle at -1.
                let exact = -annulus_extremal(0.5, 2.0, z).unwrap();
                worst = worst.max((field.value(i, j) - exact).abs());
            }
        }
        assert!(worst < 0.04, "max error {worst}");
    }

    #[test]
    fn two_disc_zero_level_is_the_bisector() {
        let field = solve(presets::two_discs(128));
        let m = &field.mask;
        // the grid is symmetric about x = 0: u(−x) = −u(x)
        for j in 0..m.n {
            for i in 0..m.n / 2 {
                let a = field.value(i, j);
                let b = field.value(m.n - 1 - i, j);
                assert!((a + b).abs() < 1e-7, "({i},{j}) {a} {b}");
            }
        }
    }

    #[test]
    fn reflection_leaves_capacity_unchanged() {
        let spec = presets::two_discs(128);
        let a = solve(spec.clone()).capacity;
        let b = solve(spec.swapped()).capacity;
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }

    #[test]
    fn solved_field_minimises_energy() {
        let field = solve(presets::two_discs(64));
        let m = &field.mask;
        let base = field.energy();
        let mut bumped = field.values.clone();
        for (k, cell) in m.cells.iter().enumerate() {
            if *cell != CellKind::Interior {
                continue;
            }
            let p = m.center(k % m.n, k / m.n);
            let d = (p - Point::new(0.0, 1.5)).norm();
            if d < 0.8 {
                bumped[k] += 1e-3 * (1.0 - d / 0.8);
            }
        }
        assert!(discrete_energy(m, &bumped) > base);
    }

    #[test]
    fn quarter_turn_invariance() {
        use crate::capacitor::{CapacitorSpec, GridSpec, Role, Shape, ShapeEntry};
        let rect = |pts: [[f64; 2]; 4]| Shape::polygon(pts.to_vec());
        let spec = CapacitorSpec::new(
            vec![
                ShapeEntry::new(
                    Role::E,
                    rect([[-0.5, -0.2], [0.5, -0.2], [0.5, 0.2], [-0.5, 0.2]]),
                ),
                ShapeEntry::new(Role::F, Shape::disc_complement([0.0, 0.0], 2.0)),
            ],
            GridSpec::square([0.0, 0.0], 2.5, 64),
        );
        let rotated = CapacitorSpec::new(
            vec![
                ShapeEntry::new(
                    Role::E,
                    rect([[-0.2, -0.5], [0.2, -0.5], [0.2, 0.5], [-0.2, 0.5]]),
                ),
                ShapeEntry::new(Role::F, Shape::disc_complement([0.0, 0.0], 2.0)),
            ],
            GridSpec::square([0.0, 0.0], 2.5, 64),
        );
        let a = solve(spec);
        let b = solve(rotated);
        let n = a.mask.n;
        for j in 0..n {
            for i in 0..n {
                // (i, j) -> (n-1-j, i) is a quarter turn of the cell grid
                let (va, vb) = (a.value(i, j), b.value(n - 1 - j, i));
                assert!((va - vb).abs() < 1e-8, "({i},{j}) {va} {vb}");
            }
        }
        assert!((a.capacity - b.capacity).abs() < 1e-10);
    }

    #[test]
    fn capacity_improves_with_resolution() {
        let exact = 4f64.ln();
        let coarse = (solve(presets::annulus(0.5, 2.0, 128)).capacity - exact).abs();
        let fine = (solve(presets::annulus(0.5, 2.0, 512)).capacity - exact).abs();
        assert!(fine < coarse, "{coarse} -> {fine}");
    }

    #[test]
    fn rejects_bad_tolerance() {
        let mask = rasterize(&presets::two_discs(32).validate().unwrap()).unwrap();
        assert!(solve_potential(&mask, 0.0).is_err());
    }
}
