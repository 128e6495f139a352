use proptest::prelude::*;

use sparse_dca::approx::{step, PenaltyKind, PenaltySpec, Side};

fn spec_of(kind: PenaltyKind, theta: f64, a: f64) -> PenaltySpec<f64> {
    match kind {
        PenaltyKind::Exp => PenaltySpec::exp(theta),
        PenaltyKind::LpPlus => PenaltySpec::lp_plus(1.0 + theta, 1e-3),
        PenaltyKind::LpMinus => PenaltySpec::lp_minus(theta, -1.0 - a / 2.0),
        PenaltyKind::Log => PenaltySpec::log(theta),
        PenaltyKind::Scad => PenaltySpec::scad(theta, a),
        PenaltyKind::Cap => PenaltySpec::cap(theta),
        PenaltyKind::PiL => PenaltySpec::pil(theta, a),
    }
    .unwrap()
}

fn any_kind() -> impl Strategy<Value = PenaltyKind> {
    prop::sample::select(PenaltyKind::ALL.to_vec())
}

fn smooth_kind() -> impl Strategy<Value = PenaltyKind> {
    prop::sample::select(
        PenaltyKind::ALL
            .iter()
            .copied()
            .filter(|k| *k != PenaltyKind::PiL)
            .collect::<Vec<_>>(),
    )
}

proptest! {
    #[test]
    fn penalties_are_even(kind in any_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0, t in -10.0f64..10.0) {
        let s = spec_of(kind, theta, a);
        prop_assert_eq!(s.value(t), s.value(-t));
    }

    #[test]
    fn penalties_grow_away_from_zero(kind in any_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0,
                                     t in 0.0f64..10.0, dt in 0.0f64..1.0) {
        let s = spec_of(kind, theta, a);
        prop_assert!(s.value(t) <= s.value(t + dt) + 1e-15);
    }

    #[test]
    fn dc_split_reconstructs_value(kind in smooth_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0, t in -10.0f64..10.0) {
        let s = spec_of(kind, theta, a);
        let rebuilt = s.phi_value(t) - s.psi_value(t);
        prop_assert!((rebuilt - s.value(t)).abs() <= 1e-12 * (1.0 + s.phi_value(t).abs()));
    }

    #[test]
    fn pil_split_reconstructs_value(theta in 0.1f64..50.0, a in 1.5f64..6.0, t in -10.0f64..10.0) {
        let s = spec_of(PenaltyKind::PiL, theta, a);
        let rebuilt = s.pil_phi_value(t).unwrap() - s.pil_psi_value(t).unwrap();
        prop_assert!((rebuilt - s.value(t)).abs() <= 1e-12);
    }

    #[test]
    fn weights_are_nonnegative(kind in smooth_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0, z in 0.0f64..10.0) {
        let s = spec_of(kind, theta, a);
        prop_assert!(s.l1_weight(z).unwrap() >= 0.0);
        prop_assert!(s.l2_weight(1e-4, z).unwrap() >= 0.0);
    }

    #[test]
    fn subgradient_points_outward(kind in smooth_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0, t in -10.0f64..10.0) {
        let s = spec_of(kind, theta, a);
        prop_assert!(t * s.derivative(t, Side::Right) >= 0.0);
        prop_assert!(t * s.derivative(t, Side::Left) >= 0.0);
    }

    #[test]
    fn psi_is_midpoint_convex(kind in smooth_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0,
                              s1 in -10.0f64..10.0, s2 in -10.0f64..10.0) {
        let s = spec_of(kind, theta, a);
        let mid = s.psi_value(0.5 * (s1 + s2));
        let avg = 0.5 * (s.psi_value(s1) + s.psi_value(s2));
        prop_assert!(mid <= avg + 1e-10 * (1.0 + avg.abs()));
    }

    #[test]
    fn surrogate_slopes_are_nested(kind in smooth_kind(), theta in 0.1f64..50.0, a in 1.5f64..6.0,
                                   xk in prop_oneof![-5.0f64..-1e-3, 1e-3f64..5.0]) {
        let s = spec_of(kind, theta, a);
        let [(l1, r1), (l2, r2), (l3, r3)] = s.surrogate_slopes_at_zero(xk).unwrap();
        let tol = 1e-12 * (1.0 + s.eta().unwrap());
        prop_assert!(l1 <= l2 + tol && l2 <= l3 + tol, "left slopes {l1} {l2} {l3}");
        prop_assert!(r3 <= r2 + tol && r2 <= r1 + tol, "right slopes {r1} {r2} {r3}");
        prop_assert!(l1 <= 0.0 + tol && r1 >= -tol);
    }
}

#[test]
fn bounded_families_tend_to_step() {
    for kind in [PenaltyKind::Exp, PenaltyKind::LpMinus, PenaltyKind::Scad] {
        let s = spec_of(kind, 1000.0, 3.0);
        for t in [0.1, 0.5, 2.0] {
            assert!((s.value(t) - 1.0).abs() <= 1e-3, "{s} at {t}: {}", s.value(t));
        }
    }
    // The log family closes the gap only like 1/log θ.
    for t in [0.1, 0.5, 2.0] {
        let gaps: Vec<f64> = [1e3, 1e6, 1e12, 1e24]
            .iter()
            .map(|&th: &f64| (PenaltySpec::<f64>::log(th).unwrap().value(t) - 1.0).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 0.05, "{gaps:?}");
    }
    for t in [0.1, 0.5, 2.0] {
        let a = 3.0;
        let cap = PenaltySpec::cap(1.0 / t).unwrap();
        assert_eq!(cap.value(t), 1.0);
        let pil = PenaltySpec::pil(a / t, a).unwrap();
        assert_eq!(pil.value(t), 1.0);
    }
    assert_eq!(step(0.0), 0.0);
    assert_eq!(step(-3.0), 1.0);
}

#[test]
fn slopes_vanish_away_from_zero() {
    for kind in [
        PenaltyKind::Exp,
        PenaltyKind::Log,
        PenaltyKind::LpMinus,
        PenaltyKind::Scad,
        PenaltyKind::Cap,
    ] {
        let mut prev = f64::INFINITY;
        for theta in [10.0, 1e2, 1e3, 1e4] {
            let s = spec_of(kind, theta, 3.0);
            let sup = (0..=150)
                .map(|k| s.l1_weight(0.5 + 0.01 * k as f64).unwrap())
                .fold(0.0f64, f64::max);
            assert!(sup <= prev, "{kind:?} theta {theta}: {sup} > {prev}");
            prev = sup;
        }
        let limit = if kind == PenaltyKind::Log { 0.25 } else { 1e-2 };
        assert!(prev < limit, "{kind:?} ends at {prev}");
    }
}

#[test]
fn matched_slopes_order_the_families() {
    let (th, a, p) = (2.0, 4.0, -2.0);
    let lpm = PenaltySpec::lp_minus(-th / p, p).unwrap();
    let exp = PenaltySpec::exp(th).unwrap();
    let scad = PenaltySpec::scad(th * (a + 1.0) / 2.0, a).unwrap();
    let cap = PenaltySpec::cap(th).unwrap();
    let cap_low = PenaltySpec::cap(scad.theta() / a).unwrap();
    for k in 0..=1000 {
        let t = 0.01 * k as f64;
        let chain = [0.0, lpm.value(t), exp.value(t), scad.value(t), cap.value(t), step(t)];
        assert!(chain.windows(2).all(|w| w[0] <= w[1] + 1e-12), "t = {t}: {chain:?}");
        assert!(cap_low.value(t) <= scad.value(t) + 1e-12);
    }
}
