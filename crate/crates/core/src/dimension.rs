//! Dimension of the set of normal sequences with a prescribed digit-1
//! frequency, and the singularity certificate built on it.
//!
//! The admissible sequences of order `n` are those without `1^n`. A stationary
//! Markov measure on that shift is a renewal process of loops `1^k 0`,
//! `k = 0..n-1`. With loop probabilities `q_k`, the entropy per symbol is
//! `H(q) / E[k+1]` and the digit-1 frequency is `E[k] / E[k+1]`. Maximizing
//! the former at a fixed frequency `gamma` gives the exponential family
//! `q_k = e^(t k) lambda^-(k+1)` with `sum_k q_k = 1`, and the entropy
//! `ln lambda - t gamma`. Only a one-dimensional root in `t` is left.

use std::cmp::Ordering;

use num::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ergodic::{parry_alpha1, reference_truncation};
use crate::field::{BetaParams, FieldElement};
use crate::probability::omega_frequency;
use crate::rational::{self, Rational};
use crate::VERSION;

/// Default tolerance on the entropy.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionResult {
    #[serde(serialize_with = "ser_rat")]
    pub gamma: Rational,
    pub beta_order: usize,
    /// Nats per symbol.
    pub max_entropy: f64,
    pub lyapunov: f64,
    pub dimension: f64,
    /// `P(next digit 1 | current run of ones = j)` for `j = 0..n-1`.
    pub transitions: Vec<f64>,
    /// Closed-form dimension (order 2 only).
    pub closed_form: Option<f64>,
    /// Dimension from the optimizer; equals `dimension` except for order 2.
    pub optimizer_dimension: f64,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(r))
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    term(p) + term(1.0 - p)
}

/// `(1 - gamma) H(gamma / (1 - gamma))`: entropy of the golden-mean shift
/// at digit-1 frequency `gamma`, in nats.
pub fn golden_entropy(gamma: f64) -> f64 {
    if gamma <= 0.0 || gamma >= 0.5 {
        return 0.0;
    }
    (1.0 - gamma) * binary_entropy(gamma / (1.0 - gamma))
}

/// Largest digit-1 frequency of the order-`n` shift.
pub fn max_frequency(order: usize) -> Rational {
    rational::rat(order as i64 - 1, order as i64)
}

/// Loop weights `e^(t k) / lambda^(k+1)` for the root `lambda` of
/// `sum_k e^(t k) lambda^-(k+1) = 1`.
fn loop_weights(t: f64, n: usize) -> (f64, Vec<f64>) {
    // work with u = ln lambda; the sum is decreasing in u
    let sum = |u: f64| -> f64 {
        (0..n)
            .map(|k| (t * k as f64 - (k as f64 + 1.0) * u).exp())
            .sum()
    };
    let mut lo = f64::min(0.0, t * (n as f64 - 1.0) / n as f64) - 1.0;
    let mut hi = f64::max(t, 0.0) + (n as f64).ln() + 1.0;
    while sum(lo) < 1.0 {
        lo -= 1.0;
    }
    while sum(hi) > 1.0 {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    let u = 0.5 * (lo + hi);
    let mut w: Vec<f64> = (0..n)
        .map(|k| (t * k as f64 - (k as f64 + 1.0) * u).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    (u, w)
}

fn loop_frequency(w: &[f64]) -> f64 {
    let ek: f64 = w.iter().enumerate().map(|(k, q)| k as f64 * q).sum();
    ek / (ek + 1.0)
}

/// Transition probabilities of the Markov chain on run lengths induced by
/// loop weights.
fn transitions_from_loops(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    (0..n)
        .map(|j| {
            let at_least: f64 = w[j..].iter().sum();
            let beyond: f64 = w[j + 1..].iter().sum();
            if at_least <= 0.0 {
                0.0
            } else {
                beyond / at_least
            }
        })
        .collect()
}

/// Entropy rate and digit-1 frequency of the run-length chain with the given
/// transition probabilities (`p[n-1]` is forced to 0).
pub fn markov_entropy_and_frequency(p: &[f64]) -> (f64, f64) {
    let n = p.len();
    let step = |j: usize| if j + 1 < n { p[j] } else { 0.0 };
    let weights: Vec<f64> = (0..n)
        .scan(1.0, |w, j| {
            let current = *w;
            *w *= step(j);
            Some(current)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter().enumerate().fold((0.0, 0.0), |(h, g), (j, w)| {
        let pi = w / total;
        (h + pi * binary_entropy(step(j)), g + pi * step(j))
    })
}

/// Maximal entropy at frequency `gamma` over Markov measures of order `n`,
/// with the maximizing transition probabilities.
pub fn max_entropy(gamma: f64, n: usize, tol: f64) -> (f64, Vec<f64>) {
    let top = (n as f64 - 1.0) / n as f64;
    if gamma <= 0.0 {
        return (0.0, vec![0.0; n]);
    }
    if gamma >= top {
        let mut p = vec![1.0; n];
        p[n - 1] = 0.0;
        return (0.0, p);
    }
    // gamma(t) increases from 0 to (n-1)/n
    let mut lo = -1.0;
    let mut hi = 1.0;
    while loop_frequency(&loop_weights(lo, n).1) > gamma {
        lo *= 2.0;
    }
    while loop_frequency(&loop_weights(hi, n).1) < gamma {
        hi *= 2.0;
    }
    let mut t = 0.0;
    for _ in 0..300 {
        t = 0.5 * (lo + hi);
        if loop_frequency(&loop_weights(t, n).1) < gamma {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= tol.min(1e-15) * t.abs().max(1.0) {
            break;
        }
    }
    let (u, w) = loop_weights(t, n);
    let h = u - t * gamma;
    (h.max(0.0), transitions_from_loops(&w))
}

/// Norm of the Lagrangian gradient `grad h - mu grad g` at the given
/// transition probabilities, by central differences, with `mu` chosen to
/// minimize it.
pub fn stationarity_residual(p: &[f64]) -> f64 {
    let free = p.len() - 1;
    let step = 1e-6;
    let mut dh = Vec::with_capacity(free);
    let mut dg = Vec::with_capacity(free);
    for j in 0..free {
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[j] = (a[j] + step).min(1.0);
        b[j] = (b[j] - step).max(0.0);
        let width = a[j] - b[j];
        let (ha, ga) = markov_entropy_and_frequency(&a);
        let (hb, gb) = markov_entropy_and_frequency(&b);
        dh.push((ha - hb) / width);
        dg.push((ga - gb) / width);
    }
    let gg: f64 = dg.iter().map(|x| x * x).sum();
    if gg == 0.0 {
        return dh.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let mu = dh.iter().zip(&dg).map(|(a, b)| a * b).sum::<f64>() / gg;
    dh.iter()
        .zip(&dg)
        .map(|(a, b)| (a - mu * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Hausdorff dimension of the set of sequences with digit-1 frequency
/// `gamma`: maximal entropy divided by `ln beta`.
pub fn dim_a_gamma(gamma: &Rational, params: &BetaParams, tol: f64) -> Result<DimensionResult> {
    let n = params.order();
    if gamma.is_negative() || gamma > &max_frequency(n) {
        return Err(Error::Infeasible(format!(
            "gamma = {} not in [0, {}]",
            rational::format(gamma),
            rational::format(&max_frequency(n))
        )));
    }
    let g = gamma.to_f64().unwrap_or(f64::NAN);
    let lyapunov = params.beta_f64().ln();
    let (h_opt, transitions) = max_entropy(g, n, tol);
    let optimizer_dimension = h_opt / lyapunov;
    let closed_form = (n == 2).then(|| golden_entropy(g) / lyapunov);
    let max_entropy = if n == 2 { golden_entropy(g) } else { h_opt };
    Ok(DimensionResult {
        gamma: gamma.clone(),
        beta_order: n,
        max_entropy,
        lyapunov,
        dimension: (max_entropy / lyapunov).clamp(0.0, 1.0),
        transitions,
        closed_form,
        optimizer_dimension,
    })
}

/// Dimension at a real frequency, for points such as `alpha(1)`.
pub fn dim_at(gamma: f64, params: &BetaParams, tol: f64) -> f64 {
    let n = params.order();
    let h = if n == 2 {
        golden_entropy(gamma)
    } else {
        max_entropy(gamma, n, tol).0
    };
    h / params.beta_f64().ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    /// The Bernoulli interval lies strictly below `alpha(1)`.
    Below,
    /// The Bernoulli interval lies strictly above `alpha(1)`.
    Above,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub tool_version: String,
    pub beta_order: usize,
    pub bernoulli_lower: String,
    pub bernoulli_upper: String,
    pub bernoulli_source: String,
    pub alpha1: FieldElement,
    pub alpha1_approx: f64,
    pub separation: Separation,
    /// Frequency at which the dimension bound is evaluated: the end of the
    /// Bernoulli interval closest to `alpha(1)`.
    pub bound_gamma: Option<String>,
    pub dimension_bound: Option<f64>,
    pub verdict: String,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn is_singular(&self) -> bool {
        self.separation != Separation::None
    }
}

/// Certificate for a Bernoulli frequency known to lie in `[lower, upper]`.
///
/// On a separated interval the concave dimension function is largest at the
/// end closest to its maximum `alpha(1)`, which bounds the dimension of the
/// Bernoulli measure.
pub fn certify_interval(
    params: &BetaParams,
    lower: &Rational,
    upper: &Rational,
    source: &str,
) -> Result<Certificate> {
    let alpha = parry_alpha1(params)?;
    let to_field = |r: &Rational| params.rational(r.clone());
    let separation = if params.compare(&to_field(upper), &alpha) == Ordering::Less {
        Separation::Below
    } else if params.compare(&to_field(lower), &alpha) == Ordering::Greater {
        Separation::Above
    } else {
        Separation::None
    };
    let nearest = match separation {
        Separation::Below => Some(upper),
        Separation::Above => Some(lower),
        Separation::None => None,
    };
    let (bound_gamma, dimension_bound, verdict) = match nearest {
        Some(g) => {
            let d = dim_a_gamma(g, params, DEFAULT_TOL)?.dimension;
            let verdict = if d < 1.0 {
                format!("singular, dimension bound {d:.6} < 1")
            } else {
                "separated, but the dimension bound does not resolve below 1".to_string()
            };
            (Some(rational::format(g)), Some(d), verdict)
        }
        None => (None, None, "no separation, no certificate".to_string()),
    };
    Ok(Certificate {
        tool_version: VERSION.to_string(),
        beta_order: params.order(),
        bernoulli_lower: rational::format(lower),
        bernoulli_upper: rational::format(upper),
        bernoulli_source: source.to_string(),
        alpha1_approx: params.to_f64(&alpha),
        alpha1: alpha,
        separation,
        bound_gamma,
        dimension_bound,
        verdict,
    })
}

/// Singularity certificate: the Bernoulli frequency (5/18 for the golden mean,
/// the Ω-word interval otherwise) against the Lebesgue frequency `alpha(1)`.
pub fn singularity_certificate(params: &BetaParams) -> Result<Certificate> {
    singularity_certificate_at(params, reference_truncation(params.order()))
}

/// As [`singularity_certificate`], with an explicit Ω truncation length for
/// orders above 2.
pub fn singularity_certificate_at(params: &BetaParams, truncation: usize) -> Result<Certificate> {
    if params.order() == 2 {
        let f = rational::rat(5, 18);
        return certify_interval(params, &f, &f, "closed form");
    }
    let f = omega_frequency(params, truncation)?;
    certify_interval(
        params,
        &f.lower,
        &f.upper,
        &format!("omega enumeration, L = {truncation}"),
    )
}

/// Dimension over an evenly spaced grid of `points` frequencies in
/// `[0, (n-1)/n]`.
pub fn dimension_grid(params: &BetaParams, points: usize) -> Result<Vec<DimensionResult>> {
    if points < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    let top = max_frequency(params.order());
    let steps = Rational::from_integer((points as i64 - 1).into());
    (0..points)
        .map(|i| {
            let g = &top * Rational::from_integer((i as i64).into()) / &steps;
            dim_a_gamma(&g, params, DEFAULT_TOL)
        })
        .collect()
}

/// Maximizer of the dimension over the feasible frequencies, by golden
/// section search.
pub fn argmax_frequency(params: &BetaParams) -> (f64, f64) {
    let top = max_frequency(params.order()).to_f64().unwrap_or(0.5);
    let f = |g: f64| dim_at(g, params, DEFAULT_TOL);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, top);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    let g = 0.5 * (a + b);
    (g, f(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn closed_form_golden_values() {
        let g = BetaParams::golden_mean();
        let r = dim_a_gamma(&rat(5, 18), &g, DEFAULT_TOL).unwrap();
        assert!((r.dimension - 0.9999777067820104).abs() < 1e-12);
        assert!((r.optimizer_dimension - r.dimension).abs() < 1e-10);
        assert_eq!(dim_a_gamma(&rat(0, 1), &g, DEFAULT_TOL).unwrap().dimension, 0.0);
        assert_eq!(dim_a_gamma(&rat(1, 2), &g, DEFAULT_TOL).unwrap().dimension, 0.0);
    }

    #[test]
    fn infeasible_frequencies() {
        let g = BetaParams::golden_mean();
        assert!(matches!(dim_a_gamma(&rat(3, 5), &g, DEFAULT_TOL), Err(Error::Infeasible(_))));
        assert!(matches!(dim_a_gamma(&rat(-1, 5), &g, DEFAULT_TOL), Err(Error::Infeasible(_))));
        let t = BetaParams::tribonacci();
        assert!(dim_a_gamma(&rat(3, 5), &t, DEFAULT_TOL).is_ok());
        assert!(dim_a_gamma(&rat(7, 10), &t, DEFAULT_TOL).is_err());
    }

    #[test]
    fn maximum_at_alpha1() {
        for n in 2..=4 {
            let p = BetaParams::multinacci(n).unwrap();
            let a = p.to_f64(&parry_alpha1(&p).unwrap());
            assert!((dim_at(a, &p, DEFAULT_TOL) - 1.0).abs() < 1e-10, "order {n}");
            let (g, d) = argmax_frequency(&p);
            assert!((g - a).abs() < 1e-5, "order {n}: {g} vs {a}");
            assert!((d - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn optimizer_matches_markov_entropy() {
        for gamma in [0.05, 0.2, 0.3368, 0.5, 0.6] {
            let (h, p) = max_entropy(gamma, 3, DEFAULT_TOL);
            let (h2, g2) = markov_entropy_and_frequency(&p);
            assert!((h - h2).abs() < 1e-10, "{gamma}");
            assert!((g2 - gamma).abs() < 1e-10, "{gamma}");
            assert!(stationarity_residual(&p) < 1e-6);
        }
    }

    #[test]
    fn golden_certificate() {
        let c = singularity_certificate(&BetaParams::golden_mean()).unwrap();
        assert_eq!(c.separation, Separation::Above);
        assert_eq!(c.bernoulli_lower, "5/18");
        let d = c.dimension_bound.unwrap();
        assert!(d < 1.0 && d > 0.99997);
        assert!(c.verdict.starts_with("singular"));
    }

    #[test]
    fn unseparated_interval_has_no_certificate() {
        let g = BetaParams::golden_mean();
        let c = certify_interval(&g, &rat(1, 4), &rat(3, 10), "hypothetical").unwrap();
        assert_eq!(c.separation, Separation::None);
        assert_eq!(c.verdict, "no separation, no certificate");
        assert!(c.dimension_bound.is_none());
    }
}
