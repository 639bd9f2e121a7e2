mod common;

use common::{apply_vectors, apply_vectors_cyclic, builtin_masks, disk_point, random_disk, random_spd, rng};
use geosubdiv::mask::{ratio, rational_to_f64};
use geosubdiv::subdivision::{
    broken_geodesic_eval, check_contractivity, check_displacement_safety, curve_distance,
    empirical_holder_constant, estimate_holder, is_interpolatory, preserves_coarse_points,
};
use geosubdiv::{refine, refine_once, Error, Manifold, ManifoldPoint, Mask, Polygon, Rational};
use rand::Rng;

const TOL: f64 = 1e-10;

fn square() -> Polygon {
    let pts = [[0.6, 0.5], [0.6, -0.5], [-0.6, -0.5], [-0.6, 0.5]];
    Polygon::new(pts.iter().map(|&p| disk_point(p)).collect(), true).unwrap()
}

fn octagon() -> Polygon {
    let pts = [
        [0.0, 0.6],
        [0.3, 0.2],
        [0.6, 0.0],
        [0.3, -0.2],
        [0.0, -0.6],
        [-0.3, -0.2],
        [-0.6, 0.0],
        [-0.3, 0.2],
    ];
    Polygon::new(pts.iter().map(|&p| disk_point(p)).collect(), true).unwrap()
}

fn coords(p: &Polygon) -> Vec<Vec<f64>> {
    p.points().iter().map(|q| q.coords().to_vec()).collect()
}

/// Lorentz boost along x1 followed by a rotation of (x1, x2).
fn isometry(x: &[f64], t: f64, phi: f64) -> Vec<f64> {
    let (c, s) = (t.cosh(), t.sinh());
    let b = [c * x[0] + s * x[1], s * x[0] + c * x[1], x[2]];
    vec![b[0], phi.cos() * b[1] - phi.sin() * b[2], phi.sin() * b[1] + phi.cos() * b[2]]
}

fn moved(p: &Polygon, t: f64, phi: f64) -> Polygon {
    let pts = p
        .points()
        .iter()
        .map(|q| ManifoldPoint::new(Manifold::Hyperbolic2, isometry(q.coords(), t, phi)).unwrap())
        .collect();
    Polygon::new(pts, p.is_closed()).unwrap()
}

#[test]
fn euclidean_refinement_is_the_linear_rule() {
    let mut r = rng(31);
    for (name, mask) in builtin_masks() {
        let levels = if mask.dilation() == 4 { 2 } else { 4 };
        for closed in [false, true] {
            let n = if closed { 6 } else { 24 };
            let data: Vec<Vec<f64>> =
                (0..n).map(|_| vec![r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)]).collect();
            let polygon =
                Polygon::new(data.iter().map(|c| ManifoldPoint::euclidean(c)).collect(), closed).unwrap();
            let trace = refine(&mask, &polygon, levels, TOL).unwrap();
            let mut expected = data;
            let mut origin = Rational::from_integer(0.into());
            for k in 1..=levels as usize {
                if closed {
                    expected = apply_vectors_cyclic(&mask, &expected);
                } else {
                    let (first, next) = apply_vectors(&mask, &expected);
                    let scale = Rational::from_integer(i64::from(mask.dilation()).pow(k as u32).into());
                    origin += Rational::from_integer(first.into()) / scale;
                    expected = next;
                }
                let got = coords(&trace.levels[k]);
                assert_eq!(got.len(), expected.len(), "{name} level {k}");
                for (g, e) in got.iter().zip(&expected) {
                    for (a, b) in g.iter().zip(e) {
                        assert!((a - b).abs() <= 1e-10, "{name} level {k}: {a} vs {b}");
                    }
                }
                assert_eq!(trace.levels[k].parameter_origin(), &origin, "{name} level {k}");
            }
        }
    }
}

#[test]
fn chaikin_ramp_corner_cutting() {
    let pts: Vec<ManifoldPoint> = (0..4).map(|i| ManifoldPoint::euclidean(&[i as f64])).collect();
    let level = refine_once(&Mask::chaikin(), &Polygon::new(pts, false).unwrap(), TOL).unwrap();
    let got: Vec<f64> = level.points().iter().map(|p| p.coords()[0]).collect();
    assert_eq!(got, vec![0.25, 0.75, 1.25, 1.75, 2.25, 2.75]);
}

#[test]
fn four_point_keeps_coarse_points() {
    let mask = Mask::four_point(&ratio(1, 16));
    assert!(is_interpolatory(&mask));
    assert!(!is_interpolatory(&Mask::chaikin()));
    let trace = refine(&mask, &octagon(), 4, TOL).unwrap();
    for w in trace.levels.windows(2) {
        assert!(preserves_coarse_points(&w[0], &w[1], 2));
        for (i, p) in w[0].points().iter().enumerate() {
            assert_eq!(w[1].points()[2 * i].coords(), p.coords());
        }
    }
    let mut r = rng(32);
    let open: Vec<ManifoldPoint> = (0..9).map(|_| disk_point(random_disk(&mut r, 0.8))).collect();
    let trace = refine(&mask, &Polygon::new(open, false).unwrap(), 3, TOL).unwrap();
    for w in trace.levels.windows(2) {
        assert!(preserves_coarse_points(&w[0], &w[1], 2));
    }
}

#[test]
fn hyperbolic_refinement_commutes_with_isometries() {
    let mut r = rng(33);
    for (name, mask) in builtin_masks().into_iter().take(3) {
        for _ in 0..3 {
            let (t, phi) = (r.gen_range(-1.0..1.0), r.gen_range(0.0..std::f64::consts::TAU));
            let a = refine(&mask, &moved(&square(), t, phi), 3, TOL).unwrap();
            let b = refine(&mask, &square(), 3, TOL).unwrap();
            for (la, lb) in a.levels.iter().zip(&b.levels) {
                for (p, q) in la.points().iter().zip(lb.points()) {
                    let q = ManifoldPoint::new(Manifold::Hyperbolic2, isometry(q.coords(), t, phi)).unwrap();
                    assert!(p.dist(&q).unwrap() <= 1e-8, "{name}");
                }
            }
        }
    }
}

#[test]
fn square_and_octagon_contract() {
    for (mask, polygon, gamma) in [
        (Mask::chaikin_four_point_blend(), square(), ratio(28, 32)),
        (Mask::four_point(&ratio(1, 16)), octagon(), ratio(5, 8)),
    ] {
        assert_eq!(mask.contractivity_factor().unwrap(), gamma);
        let trace = refine(&mask, &polygon, 6, TOL).unwrap();
        let report = check_contractivity(&trace, &gamma);
        assert!(report.passed, "{:?}", report.failures.first());
        let g = rational_to_f64(&gamma);
        for e in &trace.diagnostics.empirical_gammas {
            assert!(*e <= g + 0.02, "{e}");
        }
    }
}

#[test]
fn spd_refinement_contracts() {
    let mut r = rng(34);
    let pts: Vec<ManifoldPoint> = (0..6).map(|_| random_spd(&mut r, 2)).collect();
    let polygon = Polygon::new(pts, true).unwrap();
    for (_, mask) in builtin_masks().into_iter().take(3) {
        let gamma = mask.contractivity_factor().unwrap();
        let trace = refine(&mask, &polygon, 4, 1e-8).unwrap();
        assert!(check_contractivity(&trace, &gamma).passed);
    }
}

#[test]
fn successive_curves_approach_geometrically() {
    for (mask, polygon) in [
        (Mask::chaikin_four_point_blend(), square()),
        (Mask::four_point(&ratio(1, 16)), octagon()),
        (Mask::chaikin(), square()),
    ] {
        let g = rational_to_f64(&mask.contractivity_factor().unwrap());
        let trace = refine(&mask, &polygon, 6, TOL).unwrap();
        let dists: Vec<f64> = trace
            .levels
            .windows(2)
            .map(|w| curve_distance(&w[0], &w[1], 2, 400).unwrap())
            .collect();
        for w in dists.windows(2).skip(1) {
            assert!(w[1] <= (g + 0.02) * w[0], "{dists:?}");
        }
    }
}

#[test]
fn displacement_is_bounded() {
    let trace = refine(&Mask::four_point(&ratio(1, 16)), &octagon(), 5, TOL).unwrap();
    let report = check_displacement_safety(&trace);
    assert!(report.passed);
    assert_eq!(report.c_empirical, 0.0);

    let trace = refine(&Mask::chaikin_four_point_blend(), &square(), 6, TOL).unwrap();
    let report = check_displacement_safety(&trace);
    assert!(report.passed && report.c_empirical > 0.0);
    let ratios = &trace.diagnostics.displacement_ratios;
    for r in &ratios[1..] {
        assert!((r / ratios[1] - 1.0).abs() <= 0.1, "{ratios:?}");
    }
    // flat Chaikin: the coarse point moves to a quarter of an edge
    let pts: Vec<ManifoldPoint> = (0..8).map(|i| ManifoldPoint::euclidean(&[(i * i) as f64])).collect();
    let trace = refine(&Mask::chaikin(), &Polygon::new(pts, false).unwrap(), 3, TOL).unwrap();
    for r in &trace.diagnostics.displacement_ratios {
        assert!(*r <= 0.75 + 1e-12);
    }
}

#[test]
fn holder_estimates() {
    let mut r = rng(35);
    let open: Vec<ManifoldPoint> = (0..10).map(|_| disk_point(random_disk(&mut r, 0.8))).collect();
    let trace = refine(&Mask::chaikin(), &Polygon::new(open, false).unwrap(), 8, TOL).unwrap();
    let iota = estimate_holder(&trace).unwrap();
    assert!((iota - 1.0).abs() <= 0.05, "{iota}");

    let analytic = Mask::chaikin_four_point_blend().analyze(4).unwrap().holder_exponent.unwrap();
    let trace = refine(&Mask::chaikin_four_point_blend(), &square(), 6, TOL).unwrap();
    let iota = estimate_holder(&trace).unwrap();
    assert!(iota >= analytic - 0.05, "{iota} < {analytic} - 0.05");

    assert!(matches!(estimate_holder(&trace.truncated(2).unwrap()), Err(Error::TooFewLevels { .. })));
}

#[test]
fn limit_curve_satisfies_holder_bound() {
    let mask = Mask::four_point(&ratio(1, 16));
    let trace = refine(&mask, &octagon(), 6, TOL).unwrap();
    let d = empirical_holder_constant(&trace).unwrap().unwrap();
    let iota = mask.analyze(4).unwrap().holder_exponent.unwrap();
    let fine = trace.finest();
    let (lo, hi) = fine.parameter_range(2);
    let mut r = rng(36);
    for _ in 0..300 {
        let a = r.gen_range(lo..hi);
        let b = r.gen_range(lo..hi);
        let pa = broken_geodesic_eval(fine, 2, a).unwrap();
        let pb = broken_geodesic_eval(fine, 2, b).unwrap();
        assert!(pa.dist(&pb).unwrap() <= d * (a - b).abs().powf(iota) + 1e-9);
    }
}

#[test]
fn broken_geodesic_interpolates_vertices() {
    let p = square();
    for (i, q) in p.points().iter().enumerate() {
        let got = broken_geodesic_eval(&p, 2, i as f64).unwrap();
        assert!(got.dist(q).unwrap() < 1e-12);
    }
    let mid = broken_geodesic_eval(&p, 2, 0.5).unwrap();
    let want = p.points()[0].geodesic_point(&p.points()[1], 0.5).unwrap();
    assert!(mid.dist(&want).unwrap() < 1e-12);
    assert!(broken_geodesic_eval(&p, 2, 4.5).is_err());
}

#[test]
fn short_polygons_are_rejected() {
    let pts: Vec<ManifoldPoint> = (0..3).map(|i| ManifoldPoint::euclidean(&[i as f64])).collect();
    let err = refine_once(&Mask::four_point(&ratio(1, 16)), &Polygon::new(pts, false).unwrap(), TOL);
    assert!(matches!(err, Err(Error::PolygonTooShort { .. })));
}

#[test]
fn corrupted_level_fails_contractivity() {
    let gamma = ratio(28, 32);
    let mut trace = refine(&Mask::chaikin_four_point_blend(), &square(), 3, TOL).unwrap();
    let mut pts = trace.levels[2].points().to_vec();
    pts[3] = disk_point([0.95, 0.0]);
    trace.levels[2] = Polygon::with_level(pts, true, 2, trace.levels[2].parameter_origin().clone()).unwrap();
    let report = check_contractivity(&trace, &gamma);
    assert!(!report.passed);
    assert_eq!(report.failures[0].level, 2);
}
