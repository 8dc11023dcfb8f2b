use proptest::prelude::*;

use gtheta::actions::{catalog_actions, solve_action, solve_tolerance, verify_action};
use gtheta::metric::{make_catalog_space, GThetaSpace, SpaceParams, TMonotone, SPACE_NAMES};
use gtheta::num::{default_t_grid, power_grid};
use gtheta::rng::batch_rng;
use gtheta::sequences::{check_cauchy, check_convergence, constant, eventually_constant, reciprocal, reciprocal_even};
use gtheta::suzuki::{plane_map, psi, verify_suzuki, SuzukiConfig, Variant};
use gtheta::topology::{ball_members, Ball};
use gtheta::verifier::{replay_witness, verify_gtheta, verify_parametric_triangle, verify_theta_parametric};
use gtheta::{Axiom, Point, Verdict};

fn catalog(name: &str) -> GThetaSpace {
    make_catalog_space(name, &SpaceParams::default()).unwrap()
}

fn small_seq_b(variant: &str) -> GThetaSpace {
    let p = SpaceParams { variant: Some(variant.into()), depth: Some(200), ..Default::default() };
    make_catalog_space("seq_b_space", &p).unwrap()
}

fn enumerable_spaces() -> Vec<GThetaSpace> {
    let pw = SpaceParams { points: Some(vec![0.0, 0.5, 1.0, 3.0]), ..Default::default() };
    vec![
        make_catalog_space("int_b_space", &SpaceParams { range: Some(6), ..Default::default() }).unwrap(),
        small_seq_b("K83"),
        small_seq_b("K4quarter"),
        catalog("finite_plane_space"),
        make_catalog_space("piecewise_space", &pw).unwrap(),
    ]
}

/// Spaces the generalized axioms accept, and those they refute.
#[test]
fn catalog_verdict_table() {
    let expected_failures: &[(&str, &[Axiom])] = &[("seq_b_space", &[Axiom::PTheta2]), ("exp_parametric_space", &[Axiom::PTheta2])];
    for name in SPACE_NAMES {
        let s = catalog(name);
        let reports = verify_gtheta(&s, 10_000, 0);
        let failing: Vec<Axiom> = reports.iter().filter(|r| r.failed()).map(|r| r.axiom).collect();
        let want = expected_failures.iter().find(|(n, _)| *n == name).map_or(&[][..], |(_, a)| a);
        assert_eq!(failing, want, "{name}");
        for r in reports.iter().filter(|r| r.failed()) {
            assert!(replay_witness(&s, r), "{name} {:?}", r.axiom);
        }
    }
}

#[test]
fn k83_needs_alpha_ln_four() {
    let mut s = catalog("seq_b_space");
    // d(1, 1/22) = 4 while d(1, 0) + d(0, 1/22) = 1 + 1/22
    let k = 4.0 / (1.0 + 1.0 / 22.0);
    assert!(k > 8.0 / 3.0);
    s.control = gtheta::actions::control_by_name("ln", 4f64.ln()).unwrap();
    assert!(verify_gtheta(&s, 10_000, 0).iter().all(|r| r.passed()));
}

#[test]
fn exp_max_is_not_theta_parametric() {
    let s = catalog("exp_max_space");
    let r = verify_theta_parametric(&s, 10_000, 0);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(replay_witness(&s, &r));
    // by hand: x = 0, omega = 2, mu = 1, t = 1 gives e^2 against max(e, e)
    let (lhs, rhs) = (2f64.exp(), 1f64.exp());
    assert!(lhs > rhs);
}

#[test]
fn int_b_satisfies_the_b_inequality() {
    let s = catalog("int_b_space");
    let d = |a: i64, b: i64| s.p(&Point::Int(a), &Point::Int(b), 1.0);
    for x in -20i64..=20 {
        for z in -20i64..=20 {
            for y in -20i64..=20 {
                assert!(d(x, y) <= 5.0 * (d(x, z) + d(z, y)), "{x} {z} {y}");
            }
        }
    }
}

#[test]
fn b4_never_fails_in_the_catalog() {
    for a in catalog_actions() {
        let b4 = verify_action(&a, 10_000, 3).into_iter().find(|r| r.axiom == Axiom::B4).unwrap();
        assert!(b4.passed(), "{}", a.name());
    }
}

#[test]
fn separation_triple_holds_for_several_seeds() {
    let s = catalog("step_space");
    for seed in [1, 2, 3] {
        assert!(verify_gtheta(&s, 2_000, seed).iter().all(|r| r.passed()));
        assert!(verify_parametric_triangle(&s, 2_000, seed).passed());
        assert!(verify_theta_parametric(&s, 2_000, seed).failed());
    }
}

#[test]
fn convergence_implies_cauchy_for_catalog_sequences() {
    let s = small_seq_b("K4quarter");
    let grid = power_grid(-3, 3);
    let cases = [
        (reciprocal_even(20_000), Point::Recip(0)),
        (reciprocal(20_000), Point::Recip(0)),
        (constant(Point::Recip(5), 1000), Point::Recip(5)),
        (eventually_constant(Point::Recip(1), Point::Recip(3), 50, 1000), Point::Recip(3)),
    ];
    for (seq, limit) in cases {
        let conv = check_convergence(&s, &seq, &limit, &grid, 1e-3).unwrap();
        if conv.verdict == Verdict::Pass {
            assert_eq!(check_cauchy(&s, &seq, &grid, 1e-3).unwrap().verdict, Verdict::Pass, "{}", seq.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ball_contains_its_center(space_idx in 0usize..8, seed in any::<u64>(), r in 1e-6f64..1e3, t in 1e-3f64..1e3) {
        let s = catalog(SPACE_NAMES[space_idx]);
        let x = s.carrier.sample(&mut batch_rng(seed, 0));
        let ball = Ball::open(x.clone(), r, t).unwrap();
        prop_assert!(ball.contains(&s, &x));
        if s.carrier.is_enumerable() && !matches!(s.carrier, gtheta::metric::Carrier::Countable { depth, .. } if depth > 1000) {
            prop_assert!(ball_members(&s, &ball).unwrap().contains(&x));
        }
    }

    #[test]
    fn open_ball_is_inside_closed_ball(space_idx in 0usize..5, seed in any::<u64>(), r in 1e-3f64..50.0, t in 1e-2f64..10.0) {
        let s = &enumerable_spaces()[space_idx];
        let x = s.carrier.sample(&mut batch_rng(seed, 0));
        let open = ball_members(s, &Ball::open(x.clone(), r, t).unwrap()).unwrap();
        let closed = ball_members(s, &Ball::closed(x, r, t).unwrap()).unwrap();
        prop_assert!(open.iter().all(|p| closed.contains(p)));
    }

    #[test]
    fn psi_lies_in_half_to_one(u in 0.0f64..1.0) {
        let v = psi(u).unwrap();
        prop_assert!(v > 0.5 && v <= 1.0);
    }

    #[test]
    fn consecutive_steps_contract_on_the_plane(idx in 0usize..4, t in 1e-4f64..1e4) {
        let s = catalog("finite_plane_space");
        let map = plane_map();
        let x = s.carrier.enumerate().unwrap()[idx].clone();
        let tx = map.apply(&x).unwrap();
        let ttx = map.apply(&tx).unwrap();
        prop_assert!(s.p(&tx, &ttx, t) <= 0.875 * s.p(&x, &tx, t) + 1e-9);
    }

    #[test]
    fn banach_pass_implies_general_pass(u in 0.0f64..0.999) {
        let s = catalog("finite_plane_space");
        let map = plane_map();
        let banach = verify_suzuki(&s, &map, &SuzukiConfig::new(u, Variant::Banach).unwrap()).unwrap();
        let general = verify_suzuki(&s, &map, &SuzukiConfig::new(u, Variant::General).unwrap()).unwrap();
        if banach.verdict == Verdict::Pass {
            prop_assert_eq!(general.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn reports_depend_only_on_the_seed(space_idx in 0usize..8, seed in any::<u64>()) {
        let s = catalog(SPACE_NAMES[space_idx]);
        prop_assert_eq!(verify_gtheta(&s, 300, seed), verify_gtheta(&s, 300, seed));
        prop_assert_eq!(verify_parametric_triangle(&s, 300, seed), verify_parametric_triangle(&s, 300, seed));
    }

    #[test]
    fn failing_witnesses_replay(space_idx in 0usize..8, seed in any::<u64>()) {
        let s = catalog(SPACE_NAMES[space_idx]);
        let mut reports = verify_gtheta(&s, 500, seed);
        reports.push(verify_parametric_triangle(&s, 500, seed));
        reports.push(verify_theta_parametric(&s, 500, seed));
        for r in reports.iter().filter(|r| r.failed()) {
            prop_assert!(replay_witness(&s, r), "{} {:?}", s.name, r.axiom);
        }
    }

    #[test]
    fn nonincreasing_spaces_decrease_in_t(space_idx in 0usize..8, seed in any::<u64>(), t1 in 1e-3f64..1e3, factor in 1.0f64..100.0) {
        let s = catalog(SPACE_NAMES[space_idx]);
        prop_assume!(s.flags.t_monotone == TMonotone::Nonincreasing);
        let mut rng = batch_rng(seed, 0);
        let (x, y) = (s.carrier.sample(&mut rng), s.carrier.sample(&mut rng));
        prop_assert!(s.p(&x, &y, t1) >= s.p(&x, &y, t1 * factor));
    }

    #[test]
    fn symmetric_spaces_are_symmetric(space_idx in 0usize..8, seed in any::<u64>(), t in 1e-3f64..1e3) {
        let s = catalog(SPACE_NAMES[space_idx]);
        prop_assume!(s.flags.symmetric);
        let mut rng = batch_rng(seed, 1);
        let (x, y) = (s.carrier.sample(&mut rng), s.carrier.sample(&mut rng));
        prop_assert_eq!(s.p(&x, &y, t).to_bits(), s.p(&y, &x, t).to_bits());
    }

    #[test]
    fn exp_max_distance_is_at_least_k(k in 1.0f64..10.0, a in -4.0f64..4.0, b in -4.0f64..4.0, t in 1e-3f64..1e3) {
        prop_assume!(a != b);
        let s = make_catalog_space("exp_max_space", &SpaceParams { k: Some(k), ..Default::default() }).unwrap();
        prop_assert!(s.p(&Point::Real(a), &Point::Real(b), t) >= k);
    }

    #[test]
    fn solve_then_eval_round_trips(idx in 0usize..8, x in 0.0f64..10.0, extra in 0.0f64..100.0) {
        let action = &catalog_actions()[idx];
        let target = x + extra;
        if let Ok(w) = solve_action(action, target, x) {
            prop_assert!((action.apply(x, w) - target).abs() <= solve_tolerance(target));
        }
    }

    #[test]
    fn larger_horizon_never_flips_pass_to_fail(h in 100u64..5_000, extra in 1u64..20_000) {
        let s = small_seq_b("K4quarter");
        let grid = [0.5, 1.0, 2.0];
        let short = check_convergence(&s, &reciprocal_even(h), &Point::Recip(0), &grid, 1e-2).unwrap();
        let long = check_convergence(&s, &reciprocal_even(h + extra), &Point::Recip(0), &grid, 1e-2).unwrap();
        if short.verdict == Verdict::Pass {
            prop_assert_ne!(long.verdict, Verdict::Fail);
        }
    }
}

#[test]
fn default_grid_is_recorded_in_sequence_reports() {
    let s = small_seq_b("K83");
    let r = check_convergence(&s, &reciprocal_even(1000), &Point::Recip(0), &default_t_grid(), 1e-2).unwrap();
    assert_eq!(r.t_grid, default_t_grid());
}
