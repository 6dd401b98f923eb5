//! Exact probabilities of digit events of normalized fair-coin sequences.
//!
//! The enumeration engine walks the binary cylinder tree and stops at a
//! cylinder as soon as the queried digits are the same for almost every
//! extension of it. Decided cylinders contribute their exact mass `2^-m` to
//! the lower bound (event true) or drop out of the upper bound (event false);
//! cylinders still open at the depth limit make up the gap.
//!
//! Finality tests:
//!
//! * Future `x_1 x_2 ...`: for almost every sequence the normalized future is
//!   the greedy expansion of its value, and greedy prefixes are monotone in
//!   the value. A cylinder `[u]` covers values in
//!   `[pi(u), pi(u) + beta^-m / (beta - 1))`; the first `k` greedy digits are
//!   constant on that interval iff it stays below the value of the next
//!   admissible `k`-prefix.
//! * Past `... x_-1 x_0`: merging a normalized left context with a normalized
//!   word only rewrites the word's leading run of ones, so digits from the
//!   first zero of `P(u)` onwards are final.

use std::cmp::Ordering;

use num::{BigInt, BigUint, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{BetaParams, FieldElement};
use crate::normalize::{classify_center, normalize_in_place};
use crate::rational::{self, Rational};
use crate::word::{is_normal_bits, BitWord};

/// Largest outcome set examined before a cylinder is simply expanded.
const MAX_OUTCOMES: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityBracket {
    pub lower: Rational,
    pub upper: Rational,
    pub undecided: Rational,
    pub depth: usize,
}

impl ProbabilityBracket {
    pub fn contains(&self, p: &Rational) -> bool {
        &self.lower <= p && p <= &self.upper
    }

    pub fn width(&self) -> &Rational {
        &self.undecided
    }

    pub fn to_json(&self, event: &str) -> BracketJson {
        BracketJson {
            event: event.to_string(),
            lower: rational::format(&self.lower),
            upper: rational::format(&self.upper),
            undecided: rational::format(&self.undecided),
            depth: self.depth,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BracketJson {
    pub event: String,
    pub lower: String,
    pub upper: String,
    pub undecided: String,
    pub depth: usize,
}

impl BracketJson {
    pub fn render(&self) -> String {
        serde_json::to_string(self).expect("bracket serializes")
    }
}

type DigitPredicate = Box<dyn Fn(&[u8]) -> bool + Send + Sync>;
type JointPredicate = Box<dyn Fn(&[u8], &[u8]) -> bool + Send + Sync>;

/// A predicate on `k` normalized digits.
///
/// For future events the slice holds `y_1 .. y_k`; for past events it holds
/// `y_{-k+1} .. y_0` in coordinate order.
pub struct DigitEvent {
    pub k: usize,
    pred: DigitPredicate,
}

impl DigitEvent {
    pub fn new(k: usize, pred: impl Fn(&[u8]) -> bool + Send + Sync + 'static) -> Self {
        DigitEvent {
            k,
            pred: Box::new(pred),
        }
    }

    /// Every listed position holds the given digit; positions are 0-based
    /// within the `k`-window.
    pub fn digits_equal(k: usize, required: Vec<(usize, u8)>) -> Self {
        Self::new(k, move |d| required.iter().all(|&(i, v)| d[i] == v))
    }

    pub fn eval(&self, digits: &[u8]) -> bool {
        (self.pred)(digits)
    }
}

/// A predicate on the last `past_k` digits of `P(x^-)` and the first
/// `future_k` digits of `P(x^+)`.
pub struct JointEvent {
    pub past_k: usize,
    pub future_k: usize,
    pred: JointPredicate,
}

impl JointEvent {
    pub fn new(
        past_k: usize,
        future_k: usize,
        pred: impl Fn(&[u8], &[u8]) -> bool + Send + Sync + 'static,
    ) -> Self {
        JointEvent {
            past_k,
            future_k,
            pred: Box::new(pred),
        }
    }

    /// `x_0 = 1` in `P(y^- y^+)` via the golden-mean boundary classification.
    pub fn golden_center() -> Self {
        Self::new(2, 2, |p, f| classify_center(p[0], p[1], f[0], f[1]) == 1)
    }

    /// `y_0 = 1, y_1 = 0`.
    pub fn golden_case1() -> Self {
        Self::new(1, 1, |p, f| p[0] == 1 && f[0] == 0)
    }

    /// `y_-1 = y_0 = 0, y_1 = y_2 = 1`.
    pub fn golden_case2() -> Self {
        Self::new(2, 2, |p, f| p == [0, 0] && f == [1, 1])
    }
}

/// What is known about the queried digits on one cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
enum View {
    /// Final digits.
    Exact(Vec<u8>),
    /// A superset of the outcomes of positive probability.
    Among(Vec<Vec<u8>>),
    Unknown,
}

impl View {
    fn outcomes(&self) -> Option<Vec<&[u8]>> {
        match self {
            View::Exact(d) => Some(vec![d.as_slice()]),
            View::Among(v) => Some(v.iter().map(Vec::as_slice).collect()),
            View::Unknown => None,
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, View::Exact(_))
    }
}

/// Lexicographic successor of `d` among normal words of the same length.
fn next_normal(d: &[u8], n: usize) -> Option<Vec<u8>> {
    (0..d.len()).rev().find_map(|i| {
        if d[i] != 0 {
            return None;
        }
        let mut s = d[..i].to_vec();
        s.push(1);
        if !is_normal_bits(&s, n) {
            return None;
        }
        s.resize(d.len(), 0);
        Some(s)
    })
}

/// Shared, read-only machinery for one parameter.
struct Engine<'a> {
    params: &'a BetaParams,
    n: usize,
    /// `beta^-i`
    inv_pow: Vec<FieldElement>,
    /// `beta^-m / (beta - 1)`: supremum of the tail value after `m` digits.
    tail_sup: Vec<FieldElement>,
}

impl<'a> Engine<'a> {
    fn new(params: &'a BetaParams, max_len: usize) -> Self {
        let r = params.right_endpoint();
        let mut inv_pow = Vec::with_capacity(max_len + 2);
        let mut p = params.one();
        let b_inv = params.beta_inv();
        for _ in 0..max_len + 2 {
            inv_pow.push(p.clone());
            p = &p * &b_inv;
        }
        let tail_sup = inv_pow.iter().map(|q| q * &r).collect();
        Engine {
            params,
            n: params.order(),
            inv_pow,
            tail_sup,
        }
    }

    fn value(&self, bits: &[u8]) -> FieldElement {
        self.params.evaluate_word(&BitWord::from(bits))
    }

    /// Possible values of the first `k` normalized digits of almost every
    /// one-sided sequence in the cylinder `[u]`.
    fn future_view(&self, u: &[u8], value: &FieldElement, k: usize) -> View {
        let m = u.len();
        let mut p = u.to_vec();
        normalize_in_place(&mut p, self.n);
        p.resize(m.max(k), 0);
        let d = p[..k].to_vec();
        let hi = value + &self.tail_sup[m];
        let mut outcomes = vec![d];
        loop {
            let last = outcomes.last().expect("non-empty");
            let Some(s) = next_normal(last, self.n) else {
                break;
            };
            if self.params.compare(&hi, &self.value(&s)) != Ordering::Greater {
                break;
            }
            if outcomes.len() >= MAX_OUTCOMES {
                return View::Unknown;
            }
            outcomes.push(s);
        }
        if outcomes.len() == 1 {
            View::Exact(outcomes.pop().expect("one outcome"))
        } else {
            View::Among(outcomes)
        }
    }

    /// Possible values of the last `k` normalized digits of almost every past
    /// ending with `u` (the last symbol of `u` is coordinate 0).
    fn past_view(&self, u: &[u8], k: usize) -> View {
        let m = u.len();
        let mut p = u.to_vec();
        normalize_in_place(&mut p, self.n);
        let run = p.iter().take_while(|&&b| b == 1).count();
        // window position j sits at index m - k + j of P(u)
        let free: Vec<usize> = (0..k)
            .filter(|&j| (m + j) < k || m + j - k < run)
            .collect();
        let fixed = |j: usize| p[m + j - k];
        if free.is_empty() {
            return View::Exact((0..k).map(fixed).collect());
        }
        if free.len() > 8 {
            return View::Unknown;
        }
        let mut outcomes = Vec::with_capacity(1 << free.len());
        for mask in 0..(1u32 << free.len()) {
            let mut d = Vec::with_capacity(k);
            let mut f = 0;
            for j in 0..k {
                if free.get(f) == Some(&j) {
                    d.push(((mask >> f) & 1) as u8);
                    f += 1;
                } else {
                    d.push(fixed(j));
                }
            }
            outcomes.push(d);
        }
        View::Among(outcomes)
    }
}

/// Decides a predicate over a set of outcomes: `Some(v)` when constant.
fn constant_value<'o>(
    mut outcomes: impl Iterator<Item = &'o [u8]>,
    pred: impl Fn(&[u8]) -> bool,
) -> Option<bool> {
    let first = pred(outcomes.next()?);
    outcomes.all(|o| pred(o) == first).then_some(first)
}

/// Accumulates decided mass as integers over `2^total_bits`.
struct MassTally {
    total_bits: u32,
    yes: BigInt,
    no: BigInt,
}

impl MassTally {
    fn new(total_bits: usize) -> Self {
        MassTally {
            total_bits: total_bits as u32,
            yes: BigInt::zero(),
            no: BigInt::zero(),
        }
    }

    fn add(&mut self, outcome: bool, len: usize) {
        let w = BigInt::one() << (self.total_bits - len as u32);
        if outcome {
            self.yes += w;
        } else {
            self.no += w;
        }
    }

    fn bracket(self, depth: usize) -> ProbabilityBracket {
        let den = BigInt::one() << self.total_bits;
        let lower = Rational::new(self.yes.clone(), den.clone());
        let upper = Rational::new(&den - &self.no, den.clone());
        let undecided = &upper - &lower;
        ProbabilityBracket {
            lower,
            upper,
            undecided,
            depth,
        }
    }
}

fn check_depth(depth: usize, k: usize) -> Result<()> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if depth < k {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} is smaller than the event window {k}"
        )));
    }
    Ok(())
}

/// Probability that the first `k` digits of `P(x^+)` satisfy the event.
pub fn prob_future_digit(
    params: &BetaParams,
    event: &DigitEvent,
    depth: usize,
) -> Result<ProbabilityBracket> {
    check_depth(depth, event.k)?;
    let engine = Engine::new(params, depth + event.k);
    let mut tally = MassTally::new(depth);
    let mut stack = vec![(Vec::<u8>::new(), params.zero())];
    while let Some((u, value)) = stack.pop() {
        let view = engine.future_view(&u, &value, event.k);
        let decided = view
            .outcomes()
            .and_then(|o| constant_value(o.into_iter(), |d| event.eval(d)));
        if let Some(v) = decided {
            tally.add(v, u.len());
            continue;
        }
        if u.len() == depth {
            continue;
        }
        let m = u.len();
        for b in [0u8, 1] {
            let mut child = u.clone();
            child.push(b);
            let v = if b == 1 {
                &value + &engine.inv_pow[m + 1]
            } else {
                value.clone()
            };
            stack.push((child, v));
        }
    }
    Ok(tally.bracket(depth))
}

/// Probability that the last `k` digits of `P(x^-)` satisfy the event.
pub fn prob_past_digit(
    params: &BetaParams,
    event: &DigitEvent,
    depth: usize,
) -> Result<ProbabilityBracket> {
    check_depth(depth, event.k)?;
    let engine = Engine::new(params, depth);
    let mut tally = MassTally::new(depth);
    // u is stored in coordinate order; children prepend a symbol
    let mut stack = vec![Vec::<u8>::new()];
    while let Some(u) = stack.pop() {
        let view = engine.past_view(&u, event.k);
        let decided = view
            .outcomes()
            .and_then(|o| constant_value(o.into_iter(), |d| event.eval(d)));
        if let Some(v) = decided {
            tally.add(v, u.len());
            continue;
        }
        if u.len() == depth {
            continue;
        }
        for b in [0u8, 1] {
            let mut child = Vec::with_capacity(u.len() + 1);
            child.push(b);
            child.extend_from_slice(&u);
            stack.push(child);
        }
    }
    Ok(tally.bracket(depth))
}

/// Joint probability over independent past and future, each enumerated to
/// `depth` symbols. Every decided pair of cylinders is evaluated directly;
/// no product formula is used.
pub fn prob_joint(
    params: &BetaParams,
    event: &JointEvent,
    depth: usize,
) -> Result<ProbabilityBracket> {
    check_depth(depth, event.past_k.max(event.future_k))?;
    let engine = Engine::new(params, depth + event.future_k);
    let mut tally = MassTally::new(2 * depth);

    struct Node {
        past: Vec<u8>,
        future: Vec<u8>,
        fvalue: FieldElement,
    }
    let mut stack = vec![Node {
        past: Vec::new(),
        future: Vec::new(),
        fvalue: params.zero(),
    }];
    while let Some(node) = stack.pop() {
        let pv = engine.past_view(&node.past, event.past_k);
        let fv = engine.future_view(&node.future, &node.fvalue, event.future_k);
        if let (Some(po), Some(fo)) = (pv.outcomes(), fv.outcomes()) {
            if po.len() * fo.len() <= MAX_OUTCOMES * MAX_OUTCOMES {
                let first = (event.pred)(po[0], fo[0]);
                let constant = po
                    .iter()
                    .all(|p| fo.iter().all(|f| (event.pred)(p, f) == first));
                if constant {
                    tally.add(first, node.past.len() + node.future.len());
                    continue;
                }
            }
        }
        let can_past = node.past.len() < depth && !pv.is_exact();
        let can_future = node.future.len() < depth && !fv.is_exact();
        let expand_past = match (can_past, can_future) {
            (false, false) => continue,
            (true, false) => true,
            (false, true) => false,
            (true, true) => node.past.len() <= node.future.len(),
        };
        for b in [0u8, 1] {
            if expand_past {
                let mut past = Vec::with_capacity(node.past.len() + 1);
                past.push(b);
                past.extend_from_slice(&node.past);
                stack.push(Node {
                    past,
                    future: node.future.clone(),
                    fvalue: node.fvalue.clone(),
                });
            } else {
                let m = node.future.len();
                let mut future = node.future.clone();
                future.push(b);
                let fvalue = if b == 1 {
                    &node.fvalue + &engine.inv_pow[m + 1]
                } else {
                    node.fvalue.clone()
                };
                stack.push(Node {
                    past: node.past.clone(),
                    future,
                    fvalue,
                });
            }
        }
    }
    Ok(tally.bracket(depth))
}

/// Probability that digit 0 of the normalized two-sided sequence is 1.
///
/// For the golden mean this is the joint enumeration of the boundary digits
/// classified by [`classify_center`]; other orders use
/// [`prob_center_digit_direct`].
pub fn prob_center_digit(params: &BetaParams, depth: usize) -> Result<ProbabilityBracket> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2".into()));
    }
    if params.order() == 2 {
        prob_joint(params, &JointEvent::golden_center(), depth)
    } else {
        prob_center_digit_direct(params, depth)
    }
}

/// Center-digit probability for any order, deciding `x_0` from the
/// concatenated window `u^- u^+` without the boundary classification.
pub fn prob_center_digit_direct(params: &BetaParams, depth: usize) -> Result<ProbabilityBracket> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2".into()));
    }
    let engine = Engine::new(params, 2 * depth + 1);
    let mut tally = MassTally::new(2 * depth);
    let mut stack: Vec<(Vec<u8>, Vec<u8>)> = vec![(vec![0], vec![]), (vec![1], vec![])];
    while let Some((past, future)) = stack.pop() {
        let i = past.len() - 1;
        let mut window = past.clone();
        window.extend_from_slice(&future);
        let value = engine.value(&window);
        let view = engine.future_view(&window, &value, i + 1);
        let mut right_open = false;
        let mut left_open = false;
        let mut outcome = None;
        match view.outcomes() {
            None => right_open = true,
            Some(outcomes) => {
                for d in outcomes {
                    if d[..=i].iter().all(|&b| b == 1) {
                        left_open = true;
                        continue;
                    }
                    match outcome {
                        None => outcome = Some(d[i]),
                        Some(x) if x != d[i] => right_open = true,
                        _ => {}
                    }
                }
            }
        }
        if !right_open && !left_open {
            tally.add(outcome == Some(1), past.len() + future.len());
            continue;
        }
        let can_past = past.len() < depth;
        let can_future = future.len() < depth;
        let expand_past = if left_open && can_past {
            !(right_open && can_future && future.len() < past.len())
        } else if right_open && can_future {
            false
        } else {
            continue;
        };
        for b in [0u8, 1] {
            if expand_past {
                let mut p = Vec::with_capacity(past.len() + 1);
                p.push(b);
                p.extend_from_slice(&past);
                stack.push((p, future.clone()));
            } else {
                let mut f = future.clone();
                f.push(b);
                stack.push((past.clone(), f));
            }
        }
    }
    Ok(tally.bracket(depth))
}

/// Sum of a geometric series `first / (1 - ratio)`, `|ratio| < 1`.
fn geometric(first: Rational, ratio: Rational) -> Rational {
    first / (Rational::one() - ratio)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForms {
    #[serde(serialize_with = "ser_rat")]
    pub future_y1_is_1: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub future_y1_y2_are_1: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub past_y0_is_1: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub past_ym1_y0_are_0: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub center_x0_is_1: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub case1: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub case2: Rational,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(r))
}

/// Golden-mean probabilities from the cylinder partitions
/// `[(01)^k 1]`, `[1 (01)^k 1]`, `[0 1^(2k+1)]`, `[0 1^(2k)]`, `[0 1^(2k) 0]`,
/// summed as geometric series.
pub fn closed_form_lemmas(params: &BetaParams) -> Result<ClosedForms> {
    if params.order() != 2 {
        return Err(Error::ClosedFormUnavailable(params.order()));
    }
    let quarter = rational::rat(1, 4);
    let future_y1_is_1 = geometric(rational::rat(1, 2), quarter.clone());
    let future_y1_y2_are_1 = geometric(rational::rat(1, 4), quarter.clone());
    let past_y0_is_1 = geometric(rational::rat(1, 4), quarter.clone());
    // k >= 1 terms of (1/2)(1/4)^k, plus k >= 0 terms of (1/4)^(k+1)
    let past_ym1_y0_are_0 = geometric(rational::rat(1, 8), quarter.clone())
        + geometric(rational::rat(1, 4), quarter);
    let y1_is_0 = Rational::one() - &future_y1_is_1;
    let case1 = &past_y0_is_1 * &y1_is_0;
    let case2 = &past_ym1_y0_are_0 * &future_y1_y2_are_1;
    Ok(ClosedForms {
        center_x0_is_1: &case1 + &case2,
        future_y1_is_1,
        future_y1_y2_are_1,
        past_y0_is_1,
        past_ym1_y0_are_0,
        case1,
        case2,
    })
}

/// A parsed `exact-prob` event.
pub enum EventSpec {
    Future(DigitEvent),
    Past(DigitEvent),
    Joint(JointEvent),
    Center,
}

/// Parses events such as `y1=1`, `y1=1,y2=1`, `y0=1`, `y-1=0,y0=0`,
/// `y0=1,y1=0` (joint) and `x0=1`.
pub fn parse_event(s: &str) -> Result<EventSpec> {
    let s = s.trim();
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "x0=1" {
        return Ok(EventSpec::Center);
    }
    let mut terms = Vec::new();
    for term in compact.split(',') {
        let (lhs, rhs) = term
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad event term {term:?}")))?;
        let idx: i64 = lhs
            .strip_prefix('y')
            .ok_or_else(|| Error::Parse(format!("event terms must name y digits: {term:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad digit index in {term:?}")))?;
        let v: u8 = match rhs {
            "0" => 0,
            "1" => 1,
            _ => return Err(Error::Parse(format!("digit value must be 0 or 1: {term:?}"))),
        };
        terms.push((idx, v));
    }
    let past: Vec<(i64, u8)> = terms.iter().copied().filter(|t| t.0 <= 0).collect();
    let future: Vec<(i64, u8)> = terms.iter().copied().filter(|t| t.0 >= 1).collect();
    let past_k = past.iter().map(|t| (1 - t.0) as usize).max().unwrap_or(0);
    let future_k = future.iter().map(|t| t.0 as usize).max().unwrap_or(0);
    // past window slot j holds y_{j - past_k + 1}
    let past_req: Vec<(usize, u8)> = past
        .iter()
        .map(|&(i, v)| ((i + past_k as i64 - 1) as usize, v))
        .collect();
    let future_req: Vec<(usize, u8)> = future.iter().map(|&(i, v)| ((i - 1) as usize, v)).collect();
    Ok(match (past_k, future_k) {
        (0, 0) => return Err(Error::Parse("empty event".into())),
        (0, k) => EventSpec::Future(DigitEvent::digits_equal(k, future_req)),
        (k, 0) => EventSpec::Past(DigitEvent::digits_equal(k, past_req)),
        (pk, fk) => EventSpec::Joint(JointEvent::new(pk, fk, move |p, f| {
            past_req.iter().all(|&(i, v)| p[i] == v) && future_req.iter().all(|&(i, v)| f[i] == v)
        })),
    })
}

pub fn prob_event(params: &BetaParams, spec: &EventSpec, depth: usize) -> Result<ProbabilityBracket> {
    match spec {
        EventSpec::Future(e) => prob_future_digit(params, e, depth),
        EventSpec::Past(e) => prob_past_digit(params, e, depth),
        EventSpec::Joint(e) => prob_joint(params, e, depth),
        EventSpec::Center => prob_center_digit(params, depth),
    }
}

// ---------------------------------------------------------------------------
// Omega words: the finite words ending at their first separator.

/// Ω-word statistics up to a truncation length, aggregated by word length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaEnumeration {
    pub order: usize,
    pub truncation_length: usize,
    /// Number of Ω-words of each length (index = length).
    pub counts: Vec<BigUint>,
    /// Ones in `P(0^n z)` summed over the words `z 0^n` of each length.
    pub ones_block: Vec<BigUint>,
    /// Ones in `P(ω)` (separator left at the end).
    pub ones_normalized: Vec<BigUint>,
    /// Ones in the raw word ω.
    pub ones_raw: Vec<BigUint>,
    pub captured_mass: Rational,
    pub tail_mass: Rational,
    /// `sum |ω| 2^-|ω|` over the enumerated words.
    pub captured_length: Rational,
}

impl OmegaEnumeration {
    pub fn word_count(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Exact expected length of an Ω-word: the mean waiting time for `0^n` in
/// fair coin flips, `2^(n+1) - 2`.
pub fn expected_omega_length(order: usize) -> Rational {
    Rational::from_integer((BigInt::one() << (order + 1)) - 2)
}

/// Normalizes `0 1^r` once for every `r` and records the ones count and the
/// leading run of the result.
fn zero_run_table(n: usize, max_r: usize) -> Vec<(usize, usize)> {
    (0..=max_r)
        .map(|r| {
            let mut w = vec![1u8; r + 1];
            w[0] = 0;
            normalize_in_place(&mut w, n);
            let ones = w.iter().filter(|&&b| b == 1).count();
            let run = w.iter().take_while(|&&b| b == 1).count();
            (ones, run)
        })
        .collect()
}

/// Enumerates every Ω-word of length at most `max_len`.
///
/// Words `ω = z 0^n` are generated right to left. Prepending a symbol to a
/// normalized word only touches its leading run (prepending `0` in front of
/// `1^r`, `r >= n`, rewrites `0 1^r` into `P(0 1^r)` and leaves the rest), so
/// words sharing a suffix state `(leading zeros of z, leading run of P)`
/// are tallied together.
pub fn enumerate_omega(params: &BetaParams, max_len: usize) -> Result<OmegaEnumeration> {
    let n = params.order();
    if max_len < n {
        return Err(Error::InvalidArgument(format!(
            "truncation length must be at least {n} for order {n}"
        )));
    }
    let table = zero_run_table(n, max_len);
    let zero = BigUint::zero;
    let mut counts = vec![zero(); max_len + 1];
    let mut ones_block = vec![zero(); max_len + 1];
    let mut ones_normalized = vec![zero(); max_len + 1];
    let mut ones_raw = vec![zero(); max_len + 1];

    #[derive(Clone)]
    struct Tally {
        count: BigUint,
        ones: BigUint,
        raw: BigUint,
    }
    // state index: lead_zeros * (max_len + 1) + run
    let width = max_len + 1;
    let key = |lz: usize, run: usize| lz * width + run;

    // z empty: ω = 0^n
    counts[n] += 1u32;

    let mut states: Vec<Option<Tally>> = vec![None; n * width];
    states[key(0, 1)] = Some(Tally {
        count: BigUint::one(),
        ones: BigUint::one(),
        raw: BigUint::one(),
    });
    for zlen in 1..=max_len.saturating_sub(n) {
        let wlen = zlen + n;
        for lz in 0..n {
            for run in 0..width {
                let Some(t) = &states[key(lz, run)] else { continue };
                // complete the block by prepending the separator
                let mut r = run;
                let mut delta: i64 = 0;
                for _ in 0..n {
                    if r >= n {
                        let (o, lead) = table[r];
                        delta += o as i64 - r as i64;
                        r = lead;
                    } else {
                        r = 0;
                    }
                }
                counts[wlen] += &t.count;
                let block = t.ones.clone();
                let adjusted = if delta >= 0 {
                    block + &t.count * BigUint::from(delta as u64)
                } else {
                    block - &t.count * BigUint::from((-delta) as u64)
                };
                ones_block[wlen] += adjusted;
                ones_normalized[wlen] += &t.ones;
                ones_raw[wlen] += &t.raw;
            }
        }
        if zlen == max_len - n {
            break;
        }
        let mut next: Vec<Option<Tally>> = vec![None; n * width];
        let mut push = |slot: usize, count: &BigUint, ones: BigUint, raw: BigUint| {
            match &mut next[slot] {
                Some(t) => {
                    t.count += count;
                    t.ones += ones;
                    t.raw += raw;
                }
                s @ None => {
                    *s = Some(Tally {
                        count: count.clone(),
                        ones,
                        raw,
                    })
                }
            }
        };
        for lz in 0..n {
            for run in 0..width {
                let Some(t) = &states[key(lz, run)] else { continue };
                // prepend 1
                if run + 1 < width {
                    push(key(0, run + 1), &t.count, &t.ones + &t.count, &t.raw + &t.count);
                }
                // prepend 0, keeping z free of 0^n
                if lz + 1 < n {
                    if run >= n {
                        let (o, lead) = table[run];
                        let ones = &t.ones + &t.count * BigUint::from(o) - &t.count * BigUint::from(run);
                        push(key(lz + 1, lead), &t.count, ones, t.raw.clone());
                    } else {
                        push(key(lz + 1, 0), &t.count, t.ones.clone(), t.raw.clone());
                    }
                }
            }
        }
        states = next;
    }

    let den = |len: usize| BigInt::one() << len;
    let mut captured_mass = Rational::zero();
    let mut captured_length = Rational::zero();
    for (len, c) in counts.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c = BigInt::from(c.clone());
        captured_mass += Rational::new(c.clone(), den(len));
        captured_length += Rational::new(c * BigInt::from(len), den(len));
    }
    Ok(OmegaEnumeration {
        order: n,
        truncation_length: max_len,
        tail_mass: Rational::one() - &captured_mass,
        captured_mass,
        captured_length,
        counts,
        ones_block,
        ones_normalized,
        ones_raw,
    })
}

/// Explicit list of Ω-words with their weights `2^-|ω|`. Exponential in
/// `max_len`; meant for small lengths.
pub fn omega_words(params: &BetaParams, max_len: usize) -> Vec<(BitWord, Rational)> {
    let n = params.order();
    let mut out = Vec::new();
    for len in n..=max_len {
        for x in 0u64..(1u64 << len) {
            let bits: Vec<u8> = (0..len).map(|i| ((x >> (len - 1 - i)) & 1) as u8).collect();
            let first_end = (n - 1..len).find(|&e| bits[e + 1 - n..=e].iter().all(|&b| b == 0));
            if first_end == Some(len - 1) {
                out.push((BitWord::from_bits(bits), rational::dyadic(len as u32)));
            }
        }
    }
    out
}

/// The block that an Ω-word contributes to a sequence cut before its
/// separators: the trailing `0^n` moved to the front.
pub fn omega_block(omega: &BitWord, order: usize) -> BitWord {
    let len = omega.len();
    let mut bits = omega.bits()[len - order..].to_vec();
    bits.extend_from_slice(&omega.bits()[..len - order]);
    BitWord::from_bits(bits)
}

/// Which ones count the frequency formula uses for each Ω-word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaVariant {
    /// `P(0^n z)`: the word as a block of the normalized sequence.
    Block,
    /// `P(ω)` with the separator left at the end.
    Normalized,
    /// The raw digits of ω.
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaFrequency {
    pub variant: OmegaVariant,
    pub lower: Rational,
    pub upper: Rational,
    /// Point estimate from the enumerated words alone.
    pub captured_ratio: Rational,
    pub enumeration: OmegaEnumeration,
}

impl OmegaFrequency {
    pub fn contains(&self, r: &Rational) -> bool {
        &self.lower <= r && r <= &self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

/// Length-weighted digit-1 frequency over Ω-words, as a certified interval.
///
/// With `E = 2^(n+1) - 2` the exact mean word length, the unenumerated words
/// carry length mass `E - captured_length` and contribute between 0 and 1
/// ones per digit.
pub fn omega_frequency(params: &BetaParams, max_len: usize) -> Result<OmegaFrequency> {
    omega_frequency_variant(params, max_len, OmegaVariant::Block)
}

pub fn omega_frequency_variant(
    params: &BetaParams,
    max_len: usize,
    variant: OmegaVariant,
) -> Result<OmegaFrequency> {
    let e = enumerate_omega(params, max_len)?;
    let ones = match variant {
        OmegaVariant::Block => &e.ones_block,
        OmegaVariant::Normalized => &e.ones_normalized,
        OmegaVariant::Raw => &e.ones_raw,
    };
    let mut numer = Rational::zero();
    for (len, o) in ones.iter().enumerate() {
        if !o.is_zero() {
            numer += Rational::new(BigInt::from(o.clone()), BigInt::one() << len);
        }
    }
    let mean_len = expected_omega_length(params.order());
    let tail_length = &mean_len - &e.captured_length;
    let lower = &numer / &mean_len;
    let upper = (&numer + &tail_length) / &mean_len;
    let captured_ratio = &numer / &e.captured_length;
    Ok(OmegaFrequency {
        variant,
        lower,
        upper,
        captured_ratio,
        enumeration: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::normalize;
    use crate::rational::rat;

    #[test]
    fn successor_of_normal_words() {
        assert_eq!(next_normal(&[0, 0], 2), Some(vec![0, 1]));
        assert_eq!(next_normal(&[0, 1], 2), Some(vec![1, 0]));
        assert_eq!(next_normal(&[1, 0], 2), Some(vec![1, 1]));
        assert_eq!(next_normal(&[1, 1], 2), None);
        assert_eq!(next_normal(&[0, 1, 0], 2), Some(vec![1, 0, 0]));
        assert_eq!(next_normal(&[0, 1, 1], 3), Some(vec![1, 0, 0]));
    }

    #[test]
    fn closed_forms_golden() {
        let c = closed_form_lemmas(&BetaParams::golden_mean()).unwrap();
        assert_eq!(c.future_y1_is_1, rat(2, 3));
        assert_eq!(c.future_y1_y2_are_1, rat(1, 3));
        assert_eq!(c.past_y0_is_1, rat(1, 3));
        assert_eq!(c.past_ym1_y0_are_0, rat(1, 2));
        assert_eq!(c.center_x0_is_1, rat(5, 18));
        assert_eq!(c.case1, rat(1, 9));
        assert_eq!(c.case2, rat(1, 6));
        assert_eq!(
            closed_form_lemmas(&BetaParams::tribonacci()),
            Err(Error::ClosedFormUnavailable(3))
        );
    }

    #[test]
    fn certain_event_decided_immediately() {
        let g = BetaParams::golden_mean();
        let e = DigitEvent::new(1, |_| true);
        let b = prob_future_digit(&g, &e, 1).unwrap();
        assert_eq!(b.lower, Rational::one());
        assert_eq!(b.upper, Rational::one());
    }

    #[test]
    fn depth_errors() {
        let g = BetaParams::golden_mean();
        let e = DigitEvent::digits_equal(1, vec![(0, 1)]);
        assert!(prob_future_digit(&g, &e, 0).is_err());
        assert!(prob_center_digit(&g, 1).is_err());
    }

    #[test]
    fn small_depth_future_bracket() {
        let g = BetaParams::golden_mean();
        let e = DigitEvent::digits_equal(1, vec![(0, 1)]);
        let b = prob_future_digit(&g, &e, 12).unwrap();
        assert!(b.contains(&rat(2, 3)));
        assert!(b.undecided <= rational::dyadic(10));
    }

    #[test]
    fn event_parsing() {
        assert!(matches!(parse_event("x0=1").unwrap(), EventSpec::Center));
        assert!(matches!(parse_event("y1=1,y2=1").unwrap(), EventSpec::Future(_)));
        assert!(matches!(parse_event("y-1=0, y0=0").unwrap(), EventSpec::Past(_)));
        assert!(matches!(parse_event("y0=1,y1=0").unwrap(), EventSpec::Joint(_)));
        assert!(parse_event("z1=1").is_err());
        assert!(parse_event("y1=2").is_err());
        if let EventSpec::Past(e) = parse_event("y-1=0,y0=1").unwrap() {
            assert_eq!(e.k, 2);
            assert!(e.eval(&[0, 1]));
            assert!(!e.eval(&[1, 0]));
        }
    }

    #[test]
    fn omega_small_cases() {
        let g = BetaParams::golden_mean();
        let e = enumerate_omega(&g, 2).unwrap();
        assert_eq!(e.word_count(), BigUint::from(1u32));
        assert_eq!(e.captured_mass, rat(1, 4));
        let words = omega_words(&g, 2);
        assert_eq!(words, vec![(BitWord::parse("00").unwrap(), rat(1, 4))]);
        assert!(enumerate_omega(&g, 1).is_err());
    }

    #[test]
    fn omega_aggregates_match_explicit_words() {
        for order in 2..=4 {
            let p = BetaParams::multinacci(order).unwrap();
            let max_len = 14;
            let e = enumerate_omega(&p, max_len).unwrap();
            let mut counts = vec![0u64; max_len + 1];
            let mut block = vec![0u64; max_len + 1];
            let mut normalized = vec![0u64; max_len + 1];
            let mut raw = vec![0u64; max_len + 1];
            for (w, _) in omega_words(&p, max_len) {
                let l = w.len();
                counts[l] += 1;
                block[l] += normalize(&omega_block(&w, order), &p).count_ones() as u64;
                normalized[l] += normalize(&w, &p).count_ones() as u64;
                raw[l] += w.count_ones() as u64;
            }
            let big = |v: Vec<u64>| v.into_iter().map(BigUint::from).collect::<Vec<_>>();
            assert_eq!(e.counts, big(counts), "order {order}");
            assert_eq!(e.ones_block, big(block), "order {order}");
            assert_eq!(e.ones_normalized, big(normalized), "order {order}");
            assert_eq!(e.ones_raw, big(raw), "order {order}");
        }
    }

    #[test]
    fn omega_interval_is_valid_at_minimal_length() {
        let g = BetaParams::golden_mean();
        let f = omega_frequency(&g, 3).unwrap();
        assert!(f.lower <= f.upper);
        assert!(f.contains(&rat(5, 18)));
    }
}
