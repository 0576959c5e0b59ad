use curvcomp::comparison::{verify_angle, verify_dual, verify_monotone, verify_support, rooted_segments, ComparisonConfig};
use curvcomp::hypersurface::{
    random_convex_fourier, Direction, FourierCurve, OffsetSphere, Profile, RandomFourier, Surface,
};
use curvcomp::modelspace::{radius_for_curvature, sphere_mu, ModelSpace};
use curvcomp::polar::{embed_curve, fd_curvature, polar_check, polar_dual};
use curvcomp::rolling::{check_part_a, check_part_b, check_rolling, tangency_defect, Part};
use curvcomp::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn space(c: f64) -> ModelSpace {
    ModelSpace::constant(c, 2).unwrap()
}

fn offset_sphere(c: f64, r: f64, a: f64) -> Surface {
    Surface::curve(Profile::OffsetSphere(OffsetSphere { r, a }), &space(c)).unwrap()
}

fn random_bodies(c: f64, count: usize, seed: u64) -> Vec<Surface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = if c < 0.0 { 0.7 } else if c > 0.0 { 0.9 } else { 1.0 };
    let spec = RandomFourier { harmonics: 5, radius, offset: 0.15, roughness: 0.04 };
    let s = space(c);
    (0..count)
        .map(|_| {
            random_convex_fourier(&mut rng, &spec, &s, 1000, |b| {
                b.rho_extrema(&s).map_or(false, |e| e.rho_max < 0.95 * FRAC_PI_2)
            })
            .unwrap()
        })
        .collect()
}

#[test]
fn angle_is_one_exactly_at_critical_points() {
    for c in [-1.0, 0.0, 1.0] {
        let s = space(c);
        for body in random_bodies(c, 4, 1) {
            let extrema = body.rho_extrema(&s).unwrap();
            for crit in &extrema.critical {
                assert!((body.normal_angle_cos(&s, crit.theta) - 1.0).abs() <= 1e-15);
            }
            for i in 0..128 {
                let theta = TAU * (i as f64 + 0.37) / 128.0;
                if body.jet(&s, theta).dp.abs() > 1e-6 {
                    assert!(body.normal_angle_cos(&s, theta) < 1.0);
                }
            }
        }
    }
}

#[test]
fn support_function_bounds() {
    for c in [-1.0, 0.0, 1.0] {
        let s = space(c);
        for body in random_bodies(c, 4, 2) {
            let e = body.rho_extrema(&s).unwrap();
            let mut h_max = f64::NEG_INFINITY;
            for theta in body.grid(512) {
                let (h, p) = (body.support_function(&s, theta), body.jet(&s, theta).p);
                assert!(h <= p && p <= e.rho_max + 1e-15 && p >= e.d - 1e-15);
                h_max = h_max.max(h);
            }
            assert!(e.d <= h_max);
        }
    }
}

#[test]
fn riccati_identity_on_random_bodies() {
    for c in [-1.0, 0.0, 1.0] {
        let s = space(c);
        for body in random_bodies(c, 4, 3) {
            for seg in body.monotone_segments(&s).unwrap() {
                assert!(body.riccati_residual(&s, &seg, 256).unwrap().max_residual <= 1e-8);
            }
        }
    }
}

#[test]
fn equality_sharpness() {
    for (c, r, a) in [(-1.0, 1.2, 0.5), (0.0, 1.0, 0.5), (1.0, 0.7, 0.3)] {
        let s = space(c);
        let body = offset_sphere(c, r, a);
        let k = sphere_mu(&s, r).unwrap();
        let lower = ComparisonConfig::lower(c, k);
        let upper = ComparisonConfig::upper(c, k);
        let angle = verify_angle(&body, &s, &lower).unwrap();
        let support = verify_support(&body, &s, &lower).unwrap();
        let dual = verify_dual(&body, &s, &upper).unwrap();
        for rows in [&angle.rows, &support.rows, &dual.angle.rows, &dual.support.rows] {
            assert!(rows.iter().all(|row| row.margin.abs() <= 1e-9));
        }
        for seg in rooted_segments(&body, &s).unwrap() {
            let m = verify_monotone(&body, &s, &lower.with_tol(1e-9), &seg).unwrap();
            assert!(m.pass && m.min_f.abs() <= 1e-9, "{m:?}");
        }
    }
}

#[test]
fn lowering_c1_only_helps() {
    let s = space(0.0);
    for body in random_bodies(0.0, 5, 4) {
        let k1 = 0.999999 * body.kn_range(&s, 1024).unwrap().k_min;
        let mut previous: Option<Vec<(f64, f64)>> = None;
        for c1 in [0.0, -0.25, -0.5] {
            if c1 < 0.0 && k1 <= (-c1 as f64).sqrt() {
                break;
            }
            let rows = verify_angle(&body, &s, &ComparisonConfig::lower(c1, k1)).unwrap().rows;
            let rows: Vec<(f64, f64)> = rows.iter().map(|r| (r.l, r.margin)).collect();
            if let Some(prev) = &previous {
                // same levels whenever l_max = rho_max in both runs
                for (a, b) in prev.iter().zip(&rows) {
                    assert_eq!(a.0, b.0);
                    assert!(b.1 >= a.1 - 1e-9, "l = {}: {} then {}", a.0, a.1, b.1);
                }
            }
            previous = Some(rows);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let s = space(1.0);
    let body = random_bodies(1.0, 1, 5).remove(0);
    let k1 = 0.999999 * body.kn_range(&s, 1024).unwrap().k_min;
    let config = ComparisonConfig::lower(1.0, k1);
    let a = verify_support(&body, &s, &config).unwrap();
    let b = verify_support(&body, &s, &config).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn hypothesis_falsification_never_passes_silently() {
    let s = space(0.0);
    for body in random_bodies(0.0, 5, 6) {
        let k = body.kn_range(&s, 1024).unwrap();
        let err = verify_angle(&body, &s, &ComparisonConfig::lower(0.0, 1.01 * k.k_min)).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        assert_eq!(err.exit_code(), 1);
        let err = check_part_b(&body, &s, 0.99 * k.k_max, 8, 64, 1e-8).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }
}

#[test]
fn rolling_invariants() {
    for c in [-1.0, 0.0, 1.0] {
        let s = space(c);
        for body in random_bodies(c, 2, 7) {
            let k = body.kn_range(&s, 1024).unwrap();
            for lambda in [k.k_min, k.k_max] {
                if c < 0.0 && lambda <= 1.0 {
                    continue;
                }
                for theta in body.grid(16) {
                    let (dist, angle) = tangency_defect(&body, &s, theta, lambda).unwrap();
                    assert!(dist <= 1e-10 && angle <= 1e-6, "c = {c}: {dist} {angle}");
                }
            }
            if !(c < 0.0 && k.k_min <= 1.0) {
                let a = check_part_a(&body, &s, k.k_min, 32, 1024, 1e-8).unwrap();
                assert!(a.pass, "c = {c}: part A {}", a.min_margin);
                // the tangent point itself contributes a zero margin
                assert!(a.rows.iter().all(|r| r.margin <= 1e-10));
            }
            let b = check_part_b(&body, &s, k.k_max, 32, 1024, 1e-8).unwrap();
            assert!(b.pass, "c = {c}: part B {}", b.min_margin);
            let b_wider = check_part_b(&body, &s, 1.1 * k.k_max, 32, 1024, 1e-8).unwrap();
            for (lo, hi) in b.rows.iter().zip(&b_wider.rows) {
                assert!(hi.margin >= lo.margin - 1e-9);
            }
        }
    }
}

#[test]
fn rolling_equality_body() {
    for (c, r, a) in [(-1.0, 1.0, 0.4), (0.0, 1.0, 0.5), (1.0, 0.8, 0.3)] {
        let s = space(c);
        let body = offset_sphere(c, r, a);
        let lambda = sphere_mu(&s, r).unwrap();
        assert!((radius_for_curvature(c, lambda).unwrap() - r).abs() < 1e-12);
        for part in [Part::A, Part::B] {
            let rep = check_rolling(&body, &s, part, lambda, 32, 512, 1e-8).unwrap();
            assert!(rep.rows.iter().all(|row| row.margin.abs() <= 1e-8), "{part:?}: {}", rep.min_margin);
        }
    }
}

#[test]
fn polar_invariants() {
    for c in [1.0, -1.0] {
        let s = space(c);
        for body in random_bodies(c, 3, 8) {
            let curve = embed_curve(&body, &s, 1024).unwrap();
            assert!(curve.quadric_residual() <= 1e-12);
            let dual = polar_dual(&curve).unwrap();
            assert!(dual.quadric_residual() <= 1e-10);
            assert!(fd_curvature(&dual).iter().all(|&k| k > 0.0));
            let rep = polar_check(&body, &s, 1024, 1e-4).unwrap();
            assert!(rep.order >= 1.8, "order {}", rep.order);
        }
    }
    for r in [PI / 8.0, PI / 6.0, PI / 4.0, PI / 3.0] {
        let s = space(1.0);
        let circle = Surface::curve(Profile::Fourier(FourierCurve::circle(r)), &s).unwrap();
        let dual = polar_dual(&embed_curve(&circle, &s, 64).unwrap()).unwrap();
        for x in dual.points {
            assert!((x[0].hypot(x[1]).atan2(x[2]) - (FRAC_PI_2 - r)).abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn offset_spheres_have_constant_curvature(c in -1.5f64..1.5, r in 0.3f64..1.2, frac in 0.0f64..0.9) {
        let s = space(c);
        let body = offset_sphere(c, r, frac * r);
        let mu = sphere_mu(&s, r).unwrap();
        for theta in body.grid(64) {
            prop_assert!((body.normal_curvature(&s, theta, Direction::Meridian) - mu).abs() <= 1e-10);
        }
    }

    #[test]
    fn offset_sphere_extrema(c in -1.5f64..1.5, r in 0.3f64..1.2, frac in 0.05f64..0.9) {
        let s = space(c);
        let e = offset_sphere(c, r, frac * r).rho_extrema(&s).unwrap();
        prop_assert!((e.d - (r - frac * r)).abs() <= 1e-12);
        prop_assert!((e.rho_max - (r + frac * r)).abs() <= 1e-12);
    }
}
