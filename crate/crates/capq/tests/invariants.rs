use capq::capacitor::{presets, rasterize, CapacitorSpec, GridSpec, Role, Shape, ShapeEntry};
use capq::equipotential::{extract_level, winding_number};
use capq::pipeline::{run_pipeline, PipelineOptions};
use capq::solver::{solve_potential, PotentialField, DEFAULT_TOLERANCE};

fn solve(spec: CapacitorSpec) -> PotentialField {
    let mask = rasterize(&spec.validate().unwrap()).unwrap();
    solve_potential(&mask, DEFAULT_TOLERANCE).unwrap()
}

fn triangle_spec(rotate: bool) -> CapacitorSpec {
    let tri: [[f64; 2]; 3] = [[-0.4, -0.3], [0.5, -0.2], [0.1, 0.6]];
    let tri = tri.map(|[x, y]| if rotate { [-y, x] } else { [x, y] });
    CapacitorSpec::new(
        vec![
            ShapeEntry::new(Role::E, Shape::polygon(tri.to_vec())),
            ShapeEntry::new(Role::F, Shape::disc_complement([0.0, 0.0], 1.8)),
        ],
        GridSpec::square([0.0, 0.0], 2.0, 128),
    )
}

#[test]
fn capacity_is_invariant_under_quarter_turn() {
    let a = solve(triangle_spec(false)).capacity;
    let b = solve(triangle_spec(true)).capacity;
    assert!((a - b).abs() <= 1e-8 * a, "{a} vs {b}");
}

#[test]
fn capacity_is_invariant_under_reflection() {
    let spec = presets::two_discs(64);
    let a = solve(spec.clone()).capacity;
    let b = solve(spec.swapped()).capacity;
    assert!((a - b).abs() <= 1e-8 * a, "{a} vs {b}");
}

#[test]
fn levels_nest_toward_e() {
    let field = solve(triangle_spec(false));
    let levels = [-0.6, -0.2, 0.2, 0.6];
    let curves: Vec<_> = levels.iter().map(|&a| extract_level(&field, a).unwrap()).collect();
    for pair in curves.windows(2) {
        let (outer, inner) = (&pair[0], &pair[1]);
        for p in inner.vertices() {
            assert_ne!(winding_number(&outer.points, *p), 0, "level {} leaks out of {}", inner.level, outer.level);
        }
        assert!(inner.arc_length < outer.arc_length);
    }
}

#[test]
fn report_levels_are_sorted_and_bounds_grow_with_abs_level() {
    let spec = presets::annulus(0.5, 2.0, 128);
    let rep = run_pipeline(&spec, &[0.6, -0.3, 0.0, 0.3, -0.6, 0.0], &PipelineOptions::default()).unwrap();
    let got: Vec<f64> = rep.levels.iter().map(|r| r.level).collect();
    assert_eq!(got, vec![-0.6, -0.3, 0.0, 0.3, 0.6]);
    let k = |a: f64| rep.level(a).unwrap().k_level;
    assert!(k(0.0) < k(0.3) && k(0.3) < k(0.6));
    assert!((k(0.3) - k(-0.3)).abs() < 1e-12);
}

#[test]
fn finer_grids_approach_the_annulus_modulus() {
    let exact = 4f64.ln();
    let errs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| (solve(presets::annulus(0.5, 2.0, n)).capacity - exact).abs())
        .collect();
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 0.015 * exact);
}
