mod common;

use common::*;
use ncsplit::linalg::RngStream;
use ncsplit::prox::ProxOperator;
use proptest::prelude::*;

#[test]
fn prox_small_cases() {
    let card = ProxOperator::IndicatorCard { budget: 1 };
    assert_eq!(card.prox(&[3.0, -1.0, 2.0], 1.0).unwrap(), vec![3.0, 0.0, 0.0]);

    let l1 = ProxOperator::L1Penalty { weight: 1.0 };
    assert_eq!(l1.prox(&[0.0, 2.0, -0.5], 1.0).unwrap(), vec![0.0, 1.0, 0.0]);

    let ball = ProxOperator::IndicatorL0Ball { center: vec![1.0; 3], budget: 1 };
    assert_eq!(ball.prox(&[4.0, 1.5, 0.9], 1.0).unwrap(), vec![4.0, 1.0, 1.0]);
    let u = [4.0, 1.5, 0.9];
    let w = ball.prox(&u, 1.0).unwrap();
    let got = 0.5 * dist(&w, &u).powi(2);
    assert!((got - l0_ball_oracle(&u, &[1.0; 3], 1)).abs() <= 1e-12);
}

#[test]
fn half_threshold_matches_grid() {
    let p = ProxOperator::LHalfPenalty { weight: 1.0 };
    let (u, tau) = (1.7, 0.3);
    let y = p.prox(&[u], tau).unwrap()[0];
    let obj = |v: f64| tau * v.abs().sqrt() + 0.5 * (v - u).powi(2);
    let want = grid_min(obj, -u.abs() - 1.0, u.abs() + 1.0);
    assert!((obj(y) - want).abs() <= 1e-5);
}

#[test]
fn eval_small_cases() {
    assert_eq!(ProxOperator::IndicatorLinfBall { radius: 1.0 }.eval(&[1.0, -1.0]), 0.0);
    assert_eq!(ProxOperator::IndicatorCard { budget: 1 }.eval(&[1.0, 1.0]), f64::INFINITY);
    assert_eq!(ProxOperator::LHalfPenalty { weight: 2.0 }.eval(&[4.0]), 4.0);
    assert_eq!(ProxOperator::L0Penalty { weight: 0.5 }.eval(&[0.0, 3.0, -1.0]), 1.0);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(ProxOperator::L1Penalty { weight: -1.0 }.prox(&[1.0], 1.0).is_err());
    assert!(ProxOperator::IndicatorL1Ball { radius: f64::NAN }.prox(&[1.0], 1.0).is_err());
    assert!(ProxOperator::IndicatorFiniteSet { points: vec![] }.prox(&[1.0], 1.0).is_err());
    assert!(ProxOperator::L1Penalty { weight: 1.0 }.prox(&[1.0], 0.0).is_err());
    let ball = ProxOperator::IndicatorL0Ball { center: vec![0.0; 2], budget: 1 };
    assert!(ball.prox(&[1.0, 2.0, 3.0], 1.0).is_err());
}

#[test]
fn ties_are_deterministic() {
    let card = ProxOperator::IndicatorCard { budget: 1 };
    assert_eq!(card.prox(&[2.0, -2.0, 2.0], 1.0).unwrap(), vec![2.0, 0.0, 0.0]);

    let set = ProxOperator::IndicatorFiniteSet { points: vec![vec![0.0, 0.0], vec![2.0, 1.0], vec![2.0, -1.0]] };
    let u = [2.0, 0.0];
    assert_eq!(set.prox(&u, 1.0).unwrap(), vec![2.0, 1.0]);
    let prev = [2.0, -1.0];
    assert_eq!(set.prox_with_previous(&u, 1.0, Some(&prev)).unwrap(), vec![2.0, -1.0]);
}

#[test]
fn combinatorial_prox_matches_enumeration() {
    let mut rng = RngStream::new(77);
    for _ in 0..200 {
        let dim = 1 + rng.next_below(10);
        let budget = rng.next_below(dim + 1);
        let u = rng.randn_vector(dim);
        let card = ProxOperator::IndicatorCard { budget };
        let w = card.prox(&u, 1.0).unwrap();
        let got = 0.5 * dist(&w, &u).powi(2);
        assert!((got - l0_ball_oracle(&u, &vec![0.0; dim], budget)).abs() <= 1e-10);
    }
}

#[test]
fn scalar_penalties_match_grid() {
    let mut rng = RngStream::new(78);
    for case in 0..300 {
        let u = 3.0 * rng.normal();
        let tau = 0.2 + rng.next_open_unit();
        let w = 0.2 + rng.next_open_unit();
        let (p, pen): (ProxOperator, fn(f64) -> f64) = match case % 3 {
            0 => (ProxOperator::L0Penalty { weight: w }, |y| f64::from(u8::from(y != 0.0))),
            1 => (ProxOperator::L1Penalty { weight: w }, f64::abs),
            _ => (ProxOperator::LHalfPenalty { weight: w }, |y: f64| y.abs().sqrt()),
        };
        let obj = |y: f64| tau * w * pen(y) + 0.5 * (y - u).powi(2);
        let y = p.prox(&[u], tau).unwrap()[0];
        let want = grid_min(obj, u.min(0.0) - 1e-3, u.max(0.0) + 1e-3);
        assert!((obj(y) - want).abs() <= 1e-5, "{} u={u} tau={tau}", p.name());
    }
}

#[test]
fn coercivity_flags() {
    assert!(!ProxOperator::L0Penalty { weight: 1.0 }.is_coercive());
    assert!(!ProxOperator::IndicatorCard { budget: 1 }.is_coercive());
    assert!(ProxOperator::LHalfPenalty { weight: 1.0 }.is_coercive());
    assert!(ProxOperator::IndicatorLinfBall { radius: 1.0 }.is_coercive());
    assert!(ProxOperator::L1Penalty { weight: 1.0 }.is_convex());
    assert!(!ProxOperator::L0Penalty { weight: 1.0 }.is_convex());
}

#[test]
fn serde_round_trip() {
    let p = ProxOperator::IndicatorL0Ball { center: vec![1.0, 2.0], budget: 1 };
    let text = serde_json::to_string(&p).unwrap();
    assert!(text.contains("\"kind\":\"indicator_l0_ball\""));
    let back: ProxOperator = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}

fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projections_idempotent_and_nonexpansive(u in vec_strategy(), seed in any::<u64>(), radius in 0.0f64..5.0) {
        let v = RngStream::new(seed).randn_vector(u.len());
        for p in [ProxOperator::IndicatorL1Ball { radius }, ProxOperator::IndicatorLinfBall { radius }] {
            let pu = p.prox(&u, 1.0).unwrap();
            let pv = p.prox(&v, 1.0).unwrap();
            prop_assert_eq!(p.eval(&pu), 0.0);
            prop_assert!(dist(&p.prox(&pu, 1.0).unwrap(), &pu) <= 1e-10);
            prop_assert!(dist(&pu, &pv) <= dist(&u, &v) + 1e-10);
        }
    }

    #[test]
    fn prox_output_in_domain(u in vec_strategy(), budget in 0usize..5, tau in 0.01f64..4.0) {
        let card = ProxOperator::IndicatorCard { budget };
        prop_assert_eq!(card.eval(&card.prox(&u, tau).unwrap()), 0.0);
        let ball = ProxOperator::IndicatorL0Ball { center: vec![1.0; u.len()], budget };
        prop_assert_eq!(ball.eval(&ball.prox(&u, tau).unwrap()), 0.0);
    }

    #[test]
    fn prox_beats_input_and_zero(u in vec_strategy(), tau in 0.01f64..4.0, w in 0.0f64..3.0) {
        for p in [
            ProxOperator::L0Penalty { weight: w },
            ProxOperator::L1Penalty { weight: w },
            ProxOperator::LHalfPenalty { weight: w },
        ] {
            let y = p.prox(&u, tau).unwrap();
            let obj = |v: &[f64]| tau * p.eval(v) + 0.5 * dist(v, &u).powi(2);
            let best = obj(&y);
            prop_assert!(best <= obj(&u) + 1e-12);
            prop_assert!(best <= obj(&vec![0.0; u.len()]) + 1e-12);
        }
    }
}
