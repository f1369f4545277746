use std::f64::consts::FRAC_PI_2;

use kicktop::meanfield::*;
use kicktop::{bloch_from_phase, phase_from_bloch, BlochVector, ModelParams, PhasePoint};
use proptest::prelude::*;

fn unit_vector() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..=1.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(z, phi)| BlochVector::from_angles(z.acos(), phi))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn flow_keeps_unit_norm(
        m in unit_vector(), h in 0.0f64..2.0, kick in 0.0f64..10.0, gamma in 0.0f64..1.0,
    ) {
        let p = ModelParams::mean_field(h, kick, gamma);
        let orbit = mf_stroboscopic_orbit(&m, &p, 20).unwrap();
        for (_, x) in &orbit.points {
            prop_assert!((x.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kick_is_an_isometry(a in unit_vector(), b in unit_vector(), kick in 0.0f64..10.0) {
        let ka = mf_kick(&a, kick);
        prop_assert!((ka.norm() - a.norm()).abs() < 1e-15);
        prop_assert_eq!(ka.mz, a.mz);
        // rotation angle depends on m_z, so only points at equal height keep distances
        let c = BlochVector::from_angles(a.mz.acos(), b.my.atan2(b.mx));
        let kc = mf_kick(&c, kick);
        prop_assert!((ka.distance(&kc) - a.distance(&c)).abs() < 1e-12);
    }

    #[test]
    fn rhs_is_tangent(m in unit_vector(), h in 0.0f64..2.0, gamma in 0.0f64..1.0) {
        let d = mf_rhs(&m, h, gamma);
        prop_assert!((d[0] * m.mx + d[1] * m.my + d[2] * m.mz).abs() < 1e-12);
    }

    #[test]
    fn chart_round_trip(q in -0.999f64..0.999, p in -(FRAC_PI_2 - 1e-4)..(FRAC_PI_2 - 1e-4)) {
        let pt = PhasePoint::new(q, p).unwrap();
        let back = phase_from_bloch(&bloch_from_phase(&pt));
        prop_assert!((back.q - q).abs() < 1e-12 && (back.p - p).abs() < 1e-9);
    }

    #[test]
    fn undriven_undamped_flow_conserves_energy(m in unit_vector(), h in 0.0f64..2.0) {
        let p = ModelParams::mean_field(h, 0.0, 0.0);
        let energy = |m: &BlochVector| 2.0 * h * m.mx + m.mz * m.mz;
        let orbit = mf_stroboscopic_orbit(&m, &p, 10).unwrap();
        for (_, x) in &orbit.points {
            prop_assert!((energy(x) - energy(&m)).abs() < 1e-6);
        }
    }
}

#[test]
fn lyapunov_is_deterministic() {
    let p = ModelParams::mean_field(0.5, 5.0, 0.2);
    let a = lyapunov_largest(&BlochVector::UP, &p, 300, DEFAULT_D0).unwrap();
    let b = lyapunov_largest(&BlochVector::UP, &p, 300, DEFAULT_D0).unwrap();
    assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
}

#[test]
fn halving_the_step_leaves_regular_exponents() {
    for (kick, gamma) in [(1.0, 0.1), (2.0, 0.5)] {
        let p = ModelParams::mean_field(0.5, kick, gamma);
        let a = lyapunov_largest(&BlochVector::UP, &p, 1000, DEFAULT_D0)
            .unwrap()
            .lambda;
        let b = lyapunov_largest(
            &BlochVector::UP,
            &p.clone().with_dt_mf(0.005),
            1000,
            DEFAULT_D0,
        )
        .unwrap()
        .lambda;
        assert!((a - b).abs() < 1e-3, "K = {kick}, γ = {gamma}: {a} vs {b}");
    }
}

#[test]
fn halving_the_step_keeps_chaotic_sign() {
    let p = ModelParams::mean_field(0.5, 5.0, 0.1);
    let a = lyapunov_largest(&BlochVector::UP, &p, 1000, DEFAULT_D0)
        .unwrap()
        .lambda;
    let b = lyapunov_largest(
        &BlochVector::UP,
        &p.clone().with_dt_mf(0.005),
        1000,
        DEFAULT_D0,
    )
    .unwrap()
    .lambda;
    assert!(a > 0.5 && b > 0.5);
    assert!((a - b).abs() / a < 0.01, "{a} vs {b}");
}

#[test]
fn damped_undriven_top_settles() {
    let p = ModelParams::mean_field(0.5, 0.0, 0.5);
    let orbit = mf_stroboscopic_orbit(&BlochVector::UP, &p, 400).unwrap();
    let tail = &orbit.points[300..];
    assert!(tail.iter().all(|(_, m)| m.distance(&tail[0].1) < 1e-6));
}

#[test]
fn strange_attractor_fills_more_than_a_curve() {
    let p = ModelParams::mean_field(0.5, 5.0, 0.1);
    let est = hausdorff_dimension(
        &p,
        &HausdorffConfig {
            n_init: 100,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(est.dimension > 1.3, "{est:?}");
}

#[test]
fn lyapunov_map_is_ordered_and_parallel_safe() {
    let base = ModelParams::mean_field(0.5, 0.0, 0.0);
    let map = lyapunov_map((0.0, 10.0), (0.0, 1.0), (4, 3), &base, 200).unwrap();
    assert_eq!(map.len(), 12);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let serial =
        pool.install(|| lyapunov_map((0.0, 10.0), (0.0, 1.0), (4, 3), &base, 200).unwrap());
    assert_eq!(map, serial);
}
