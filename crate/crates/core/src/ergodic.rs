//! The greedy beta-transformation, its invariant (Parry) measure and Monte
//! Carlo digit frequencies.

use std::cmp::Ordering;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{BetaParams, FieldElement};
use crate::normalize::normalize_in_place;
use crate::probability::omega_frequency;
use crate::rational::{self, Rational};
use crate::word::BitWord;
use crate::VERSION;

/// One step of `T`: digit 1 and `beta x - 1` on `[1/beta, 1/(beta-1)]`,
/// digit 0 and `beta x` below. The boundary `1/beta` goes to digit 1.
pub fn greedy_step(x: &FieldElement, params: &BetaParams) -> Result<(u8, FieldElement)> {
    if params.sign(x) == Ordering::Less
        || params.compare(x, &params.right_endpoint()) == Ordering::Greater
    {
        return Err(Error::OutOfDomain);
    }
    let bx = x * &params.beta();
    if params.compare(x, &params.beta_inv()) == Ordering::Less {
        Ok((0, bx))
    } else {
        Ok((1, &bx - &params.one()))
    }
}

/// First `length` greedy digits of `x`.
pub fn greedy_expand(x: &FieldElement, length: usize, params: &BetaParams) -> Result<BitWord> {
    let mut bits = Vec::with_capacity(length);
    let mut y = x.clone();
    for _ in 0..length {
        let (d, next) = greedy_step(&y, params)?;
        bits.push(d);
        y = next;
    }
    Ok(BitWord::from_bits(bits))
}

/// The invariant density `C sum_i beta^-i 1[0, T^i(1)]` of `T` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParryMeasure {
    /// `T^i(1)` for `i = 0..=n`; decreasing from 1 to 0.
    pub breakpoints: Vec<FieldElement>,
    /// Density on `[T^(i+1)(1), T^i(1))`.
    pub plateaus: Vec<FieldElement>,
    pub normalizer: FieldElement,
    #[serde(skip)]
    params: BetaParams,
}

impl ParryMeasure {
    pub fn new(params: &BetaParams) -> Result<Self> {
        let n = params.order();
        let mut breakpoints = vec![params.one()];
        let mut x = params.one();
        while !x.is_zero() {
            if breakpoints.len() > n + 1 {
                return Err(Error::NotSupported("orbit of 1 is not finite".into()));
            }
            x = greedy_step(&x, params)?.1;
            breakpoints.push(x.clone());
        }
        let mut total = params.zero();
        let mut weight = params.one();
        let b_inv = params.beta_inv();
        let mut raw_plateaus = Vec::new();
        let mut level = params.zero();
        for t in &breakpoints[..breakpoints.len() - 1] {
            total = &total + &(&weight * t);
            level = &level + &weight;
            raw_plateaus.push(level.clone());
            weight = &weight * &b_inv;
        }
        let normalizer = total.inverse()?;
        let plateaus = raw_plateaus.iter().map(|p| p * &normalizer).collect();
        Ok(ParryMeasure {
            breakpoints,
            plateaus,
            normalizer,
            params: params.clone(),
        })
    }

    fn min(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        if self.params.compare(a, b) == Ordering::Less {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn max(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        if self.params.compare(a, b) == Ordering::Greater {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Exact measure of `[a, b]`; anything outside `[0, 1]` has measure 0.
    pub fn measure(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = &self.params;
        let mut total = p.zero();
        for (i, density) in self.plateaus.iter().enumerate() {
            let lo = self.max(a, &self.breakpoints[i + 1]);
            let hi = self.min(b, &self.breakpoints[i]);
            if p.compare(&lo, &hi) == Ordering::Less {
                total = &total + &(density * &(&hi - &lo));
            }
        }
        total
    }

    pub fn total_mass(&self) -> FieldElement {
        self.measure(&self.params.zero(), &self.params.one())
    }

    /// Measure of `T^-1 [a, b]`: the preimages under both branches, clipped
    /// to their branch intervals.
    pub fn preimage_measure(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = &self.params;
        let b_inv = p.beta_inv();
        let lower_branch = (a * &b_inv, self.min(&(b * &b_inv), &b_inv));
        let upper_branch = (
            self.max(&(&(a + &p.one()) * &b_inv), &b_inv),
            &(b + &p.one()) * &b_inv,
        );
        let mut total = p.zero();
        for (lo, hi) in [lower_branch, upper_branch] {
            if p.compare(&lo, &hi) == Ordering::Less {
                total = &total + &self.measure(&lo, &hi);
            }
        }
        total
    }

    /// `mu(T^-1 I) == mu(I)` for every plateau interval `I`.
    pub fn check_invariance(&self) -> bool {
        (0..self.plateaus.len()).all(|i| {
            let (a, b) = (&self.breakpoints[i + 1], &self.breakpoints[i]);
            self.preimage_measure(a, b) == self.measure(a, b)
        })
    }

    pub fn density_at(&self, x: &FieldElement) -> FieldElement {
        let p = &self.params;
        for (i, density) in self.plateaus.iter().enumerate() {
            if p.compare(x, &self.breakpoints[i + 1]) != Ordering::Less
                && p.compare(x, &self.breakpoints[i]) == Ordering::Less
            {
                return density.clone();
            }
        }
        p.zero()
    }
}

/// `mu[1/beta, 1]`, the frequency of digit 1 for Lebesgue-almost every `x`.
pub fn parry_alpha1(params: &BetaParams) -> Result<FieldElement> {
    let mu = ParryMeasure::new(params)?;
    Ok(mu.measure(&params.beta_inv(), &params.one()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParryReference {
    /// Coefficients in the basis `1, beta, ..., beta^(n-1)`.
    pub coefficients: FieldElement,
    pub approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliReference {
    pub lower: String,
    pub upper: String,
    pub truncation_length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Bernoulli,
    Lebesgue,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyReport {
    pub tool_version: String,
    pub sampling: Sampling,
    pub beta_order: usize,
    pub length: usize,
    pub trials: usize,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub per_trial: Vec<f64>,
    pub reference_parry: ParryReference,
    pub reference_bernoulli: BernoulliReference,
}

impl FrequencyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Truncation length of the Ω-word interval quoted as the Bernoulli reference.
pub fn reference_truncation(order: usize) -> usize {
    match order {
        2 => 64,
        3 => 200,
        n => 80 * n,
    }
}

fn references(params: &BetaParams) -> Result<(ParryReference, BernoulliReference)> {
    let alpha = parry_alpha1(params)?;
    let parry = ParryReference {
        approx: params.to_f64(&alpha),
        coefficients: alpha,
    };
    let bernoulli = if params.order() == 2 {
        let r = rational::format(&rational::rat(5, 18));
        BernoulliReference {
            lower: r.clone(),
            upper: r,
            truncation_length: 0,
        }
    } else {
        let l = reference_truncation(params.order());
        let f = omega_frequency(params, l)?;
        BernoulliReference {
            lower: rational::format(&f.lower),
            upper: rational::format(&f.upper),
            truncation_length: l,
        }
    };
    Ok((parry, bernoulli))
}

fn check_sampling(length: usize, trials: usize) -> Result<()> {
    if length < 1000 {
        return Err(Error::InvalidArgument("length must be at least 1000".into()));
    }
    if trials < 2 {
        return Err(Error::InvalidArgument("at least 2 trials are needed for a standard error".into()));
    }
    Ok(())
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Frequency of ones in a normalized word, counting only digits before the
/// start of the last separator. Without a separator the whole word counts.
pub fn stable_frequency(normalized: &[u8], n: usize) -> f64 {
    let mut zeros = 0;
    let mut cut = None;
    for (i, &b) in normalized.iter().enumerate().rev() {
        if b == 0 {
            zeros += 1;
            if zeros == n {
                cut = Some(i);
                break;
            }
        } else {
            zeros = 0;
        }
    }
    let prefix = &normalized[..cut.unwrap_or(normalized.len())];
    if prefix.is_empty() {
        return 0.0;
    }
    prefix.iter().filter(|&&b| b == 1).count() as f64 / prefix.len() as f64
}

fn bernoulli_trial(length: usize, n: usize, seed: u64, trial: usize) -> f64 {
    let mut rng = trial_rng(seed, trial);
    let mut bits = vec![0u8; length];
    for chunk in bits.chunks_mut(64) {
        let r = rng.next_u64();
        for (j, b) in chunk.iter_mut().enumerate() {
            *b = ((r >> j) & 1) as u8;
        }
    }
    normalize_in_place(&mut bits, n);
    stable_frequency(&bits, n)
}

/// Digit-1 frequency of normalized fair-coin words.
pub fn mc_frequency_bernoulli(
    length: usize,
    trials: usize,
    seed: u64,
    params: &BetaParams,
) -> Result<FrequencyReport> {
    check_sampling(length, trials)?;
    let n = params.order();
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| bernoulli_trial(length, n, seed, t))
        .collect();
    build_report(Sampling::Bernoulli, length, trials, seed, per_trial, params)
}

/// Greedy digits of a uniform point, generated as a finite Markov chain.
///
/// Given the first `k` digits, `x` is uniform on its cylinder and `T^k`
/// maps the cylinder affinely onto `[0, T^i(1))` for some `i`; so `T^k x` is
/// uniform there. From state `i` the next digit is 1 with probability
/// `1 - 1/(beta T^i(1))`, moving to state `i + 1`; digit 0 returns to state
/// 0. The transition probabilities are exact in Q(beta) and rounded to 64-bit
/// thresholds for sampling.
pub struct LebesgueChain {
    thresholds: Vec<u64>,
}

impl LebesgueChain {
    pub fn new(params: &BetaParams) -> Result<Self> {
        let mu = ParryMeasure::new(params)?;
        let probabilities = Self::exact_probabilities(params, &mu)?;
        let thresholds = probabilities
            .iter()
            .map(|p| {
                let v = params.to_f64(p);
                if v <= 0.0 {
                    0
                } else {
                    (v * 2f64.powi(64)) as u64
                }
            })
            .collect();
        Ok(LebesgueChain { thresholds })
    }

    /// `P(digit 1 | state i)` for each state.
    pub fn exact_probabilities(params: &BetaParams, mu: &ParryMeasure) -> Result<Vec<FieldElement>> {
        let bt = params.beta();
        mu.breakpoints[..mu.breakpoints.len() - 1]
            .iter()
            .map(|t| Ok(&params.one() - &(&bt * t).inverse()?))
            .collect()
    }

    pub fn frequency(&self, length: usize, rng: &mut impl RngCore) -> f64 {
        let mut state = 0;
        let mut ones = 0usize;
        for _ in 0..length {
            if rng.next_u64() < self.thresholds[state] {
                ones += 1;
                state += 1;
            } else {
                state = 0;
            }
        }
        ones as f64 / length as f64
    }
}

/// Digit-1 frequency of greedy expansions of uniform points of `[0, 1]`.
pub fn mc_frequency_lebesgue(
    length: usize,
    trials: usize,
    seed: u64,
    params: &BetaParams,
) -> Result<FrequencyReport> {
    check_sampling(length, trials)?;
    let chain = LebesgueChain::new(params)?;
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| chain.frequency(length, &mut trial_rng(seed, t)))
        .collect();
    build_report(Sampling::Lebesgue, length, trials, seed, per_trial, params)
}

fn build_report(
    sampling: Sampling,
    length: usize,
    trials: usize,
    seed: u64,
    per_trial: Vec<f64>,
    params: &BetaParams,
) -> Result<FrequencyReport> {
    let (estimate, stderr) = mean_and_stderr(&per_trial);
    let (reference_parry, reference_bernoulli) = references(params)?;
    Ok(FrequencyReport {
        tool_version: VERSION.to_string(),
        sampling,
        beta_order: params.order(),
        length,
        trials,
        seed,
        estimate,
        stderr,
        per_trial,
        reference_parry,
        reference_bernoulli,
    })
}

/// Bounds of a [`BernoulliReference`] as rationals.
pub fn reference_interval(r: &BernoulliReference) -> Result<(Rational, Rational)> {
    Ok((rational::parse(&r.lower)?, rational::parse(&r.upper)?))
}
