//! Independent routes to the same quantities must agree.

use betafreq::ergodic::{mc_frequency_bernoulli, parry_alpha1, ParryMeasure};
use betafreq::normalize::normalize;
use betafreq::probability::{
    closed_form_lemmas, enumerate_omega, expected_omega_length, omega_frequency, prob_center_digit,
    prob_center_digit_direct, prob_joint, JointEvent,
};
use betafreq::rational::{rat, to_f64};
use betafreq::{BetaParams, BitWord};

#[test]
fn center_digit_routes_agree_golden() {
    let g = BetaParams::golden_mean();
    let five_18 = rat(5, 18);
    let joint = prob_center_digit(&g, 16).unwrap();
    let direct = prob_center_digit_direct(&g, 14).unwrap();
    let omega = omega_frequency(&g, 30).unwrap();
    assert!(joint.contains(&five_18));
    assert!(direct.contains(&five_18));
    assert!(omega.contains(&five_18));
}

#[test]
fn case_probabilities_factor() {
    let g = BetaParams::golden_mean();
    let c = closed_form_lemmas(&g).unwrap();
    let b1 = prob_joint(&g, &JointEvent::golden_case1(), 14).unwrap();
    let b2 = prob_joint(&g, &JointEvent::golden_case2(), 14).unwrap();
    assert!(b1.contains(&c.case1) && b1.contains(&rat(1, 9)));
    assert!(b2.contains(&c.case2) && b2.contains(&rat(1, 6)));
}

#[test]
fn tribonacci_center_digit_matches_omega_interval() {
    let t = BetaParams::tribonacci();
    let direct = prob_center_digit_direct(&t, 12).unwrap();
    let omega = omega_frequency(&t, 120).unwrap();
    assert!(direct.lower <= omega.upper && omega.lower <= direct.upper);
}

#[test]
fn tribonacci_monte_carlo_within_omega_interval() {
    let t = BetaParams::tribonacci();
    let mc = mc_frequency_bernoulli(200_000, 8, 21, &t).unwrap();
    let omega = omega_frequency(&t, 160).unwrap();
    let slack = 4.0 * mc.stderr + 1e-3;
    assert!(mc.estimate > to_f64(&omega.lower) - slack);
    assert!(mc.estimate < to_f64(&omega.upper) + slack);
}

#[test]
fn omega_block_length_and_masses() {
    for order in 2..=4 {
        let p = BetaParams::multinacci(order).unwrap();
        let e = enumerate_omega(&p, 100 * order).unwrap();
        assert_eq!(&e.captured_mass + &e.tail_mass, rat(1, 1));
        let mean = expected_omega_length(order);
        assert!(e.captured_length < mean);
        assert!(to_f64(&mean) - to_f64(&e.captured_length) < 0.05, "order {order}");
    }
}

#[test]
fn lebesgue_frequency_of_zero_is_complement() {
    for order in 2..=4 {
        let p = BetaParams::multinacci(order).unwrap();
        let mu = ParryMeasure::new(&p).unwrap();
        let a1 = parry_alpha1(&p).unwrap();
        let a0 = mu.measure(&p.zero(), &p.beta_inv());
        assert_eq!(&a0 + &a1, p.one());
    }
}

#[test]
fn monte_carlo_degenerate_word() {
    let g = BetaParams::golden_mean();
    let zeros = BitWord::zeros(5000);
    let normal = normalize(&zeros, &g);
    assert_eq!(betafreq::ergodic::stable_frequency(normal.bits(), 2), 0.0);
}
