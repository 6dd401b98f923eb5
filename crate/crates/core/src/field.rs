//! Exact arithmetic in Q(beta) for multinacci beta.
//!
//! Elements are dense vectors of rational coefficients in the power basis
//! `1, beta, ..., beta^(n-1)`. Because only multinacci minimal polynomials
//! `x^n - x^(n-1) - ... - x - 1` are accepted, the reduction rule depends on
//! the order `n` alone, which is the length of the coefficient vector. The
//! numeric side (sign, comparison, floats) needs the root enclosure carried by
//! [`BetaParams`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::word::BitWord;

/// Bisection steps allowed when certifying a sign. Unequal field elements
/// always separate well before this; hitting it is an internal error.
pub const MAX_REFINEMENTS: usize = 4096;

/// Bits of the root enclosure computed at construction.
const DEFAULT_PRECISION_BITS: u32 = 160;

const MAX_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<Rational>,
}

impl FieldElement {
    pub fn zero(order: usize) -> Self {
        FieldElement {
            coeffs: vec![Rational::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::from_rational(order, Rational::one())
    }

    pub fn from_rational(order: usize, r: Rational) -> Self {
        let mut e = Self::zero(order);
        e.coeffs[0] = r;
        e
    }

    /// Builds an element from coefficients `c_0 + c_1 beta + ...`; longer
    /// inputs are reduced modulo the minimal polynomial.
    pub fn from_coeffs(order: usize, coeffs: Vec<Rational>) -> Self {
        assert!(order >= 1);
        let mut c = coeffs;
        reduce(&mut c, order);
        c.resize(order, Rational::zero());
        FieldElement { coeffs: c }
    }

    pub(crate) fn from_integers(coeffs: Vec<BigInt>) -> Self {
        FieldElement {
            coeffs: coeffs.into_iter().map(Rational::from_integer).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FieldElement {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order();
        let modulus = multinacci_poly(n);
        let (g, s) = poly::gcd_with_cofactor(&modulus, &trimmed(&self.coeffs));
        if g.len() != 1 {
            // Cannot happen: the multinacci polynomials are irreducible.
            return Err(Error::NotSupported(
                "element shares a factor with the minimal polynomial".into(),
            ));
        }
        let inv_g = g[0].recip();
        let c: Vec<Rational> = s.into_iter().map(|c| c * &inv_g).collect();
        Ok(Self::from_coeffs(n, c))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "field elements from different multinacci fields"
        );
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*b")?,
                _ => write!(f, "({c})*b^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(rational::format).collect();
        v.serialize(s)
    }
}

/// `x^k = x^(k-1) + ... + x^(k-n)` for every `k >= n`.
fn reduce(c: &mut Vec<Rational>, n: usize) {
    while c.len() > n {
        let top = c.pop().expect("non-empty");
        if top.is_zero() {
            continue;
        }
        let k = c.len();
        for x in &mut c[k - n..k] {
            *x += &top;
        }
    }
}

fn multinacci_poly(n: usize) -> Vec<Rational> {
    let mut p = vec![-Rational::one(); n];
    p.push(Rational::one());
    p
}

fn trimmed(c: &[Rational]) -> Vec<Rational> {
    let mut v = c.to_vec();
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        FieldElement {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        FieldElement {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        let n = self.order();
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce(&mut prod, n);
        FieldElement { coeffs: prod }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Polynomial helpers over Q (coefficients low to high, no trailing zeros).
mod poly {
    use super::*;

    fn trim(p: &mut Vec<Rational>) {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    }

    fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::zero(); r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().expect("non-empty") / &lead;
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] -= &c * bc;
            }
            q[shift] = c;
            r.pop();
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    /// Returns `(g, s)` with `g = gcd(m, a)` and `s * a = g (mod m)`.
    pub(super) fn gcd_with_cofactor(m: &[Rational], a: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        (r0, s0)
    }
}

/// A multinacci parameter: the root in (1, 2) of `x^n - x^(n-1) - ... - 1`.
#[derive(Clone, Debug)]
pub struct BetaParams {
    order: usize,
    min_poly: Vec<BigInt>,
    enclosure: (Rational, Rational),
    precision: Rational,
    approx: f64,
}

impl PartialEq for BetaParams {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}
impl Eq for BetaParams {}

impl BetaParams {
    pub fn multinacci(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "multinacci order must be at least 2, got {order}"
            )));
        }
        if order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "multinacci order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        let mut min_poly = vec![BigInt::from(-1); order];
        min_poly.push(BigInt::one());
        let precision = rational::dyadic(DEFAULT_PRECISION_BITS);
        let mut params = BetaParams {
            order,
            min_poly,
            enclosure: (rational::int(1), rational::int(2)),
            precision: precision.clone(),
            approx: 0.0,
        };
        let (mut lo, mut hi) = params.enclosure.clone();
        while &hi - &lo > precision {
            let mid = (&lo + &hi) / rational::int(2);
            match params.poly_sign_at(&mid) {
                Ordering::Less => lo = mid,
                Ordering::Greater => hi = mid,
                Ordering::Equal => unreachable!("multinacci roots are irrational"),
            }
        }
        params.approx = rational::to_f64(&((&lo + &hi) / rational::int(2)));
        params.enclosure = (lo, hi);
        Ok(params)
    }

    pub fn golden_mean() -> Self {
        Self::multinacci(2).expect("order 2 is valid")
    }

    pub fn tribonacci() -> Self {
        Self::multinacci(3).expect("order 3 is valid")
    }

    /// Accepts integer coefficients (low to high degree). Only multinacci
    /// polynomials are supported; anything else is rejected.
    pub fn from_min_poly(coeffs: &[i64]) -> Result<Self> {
        let n = coeffs.len().saturating_sub(1);
        let is_multinacci = n >= 2
            && coeffs[n] == 1
            && coeffs[..n].iter().all(|&c| c == -1);
        if !is_multinacci {
            return Err(Error::NotSupported(
                "only multinacci minimal polynomials x^n - x^(n-1) - ... - 1 are supported".into(),
            ));
        }
        Self::multinacci(n)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn enclosure(&self) -> (&Rational, &Rational) {
        (&self.enclosure.0, &self.enclosure.1)
    }

    pub fn precision(&self) -> &Rational {
        &self.precision
    }

    /// Floating-point value of beta.
    pub fn beta_f64(&self) -> f64 {
        self.approx
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.order)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(self.order)
    }

    pub fn rational(&self, r: Rational) -> FieldElement {
        FieldElement::from_rational(self.order, r)
    }

    pub fn beta(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[1] = Rational::one();
        e
    }

    /// `beta^-1 = beta^(n-1) - beta^(n-2) - ... - 1`.
    pub fn beta_inv(&self) -> FieldElement {
        let mut c = vec![-Rational::one(); self.order];
        c[self.order - 1] = Rational::one();
        FieldElement { coeffs: c }
    }

    pub fn beta_pow(&self, k: i64) -> FieldElement {
        let base = if k >= 0 { self.beta() } else { self.beta_inv() };
        let mut acc = self.one();
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// `1/(beta - 1)`, the right end of the interval I_beta.
    pub fn right_endpoint(&self) -> FieldElement {
        (self.beta() - self.one())
            .inverse()
            .expect("beta != 1")
    }

    /// Exact value `sum w_i beta^-i` of a finite word.
    pub fn evaluate_word(&self, w: &BitWord) -> FieldElement {
        FieldElement::from_integers(self.word_value_integral(w.bits()))
    }

    /// Same value as [`evaluate_word`](Self::evaluate_word) as integer
    /// coordinates; beta is a unit so the value lies in Z[beta].
    pub(crate) fn word_value_integral(&self, bits: &[u8]) -> Vec<BigInt> {
        let n = self.order;
        let mut acc = vec![BigInt::zero(); n];
        for &b in bits.iter().rev() {
            if b != 0 {
                acc[0] += 1;
            }
            // multiply by beta^-1
            let a0 = acc[0].clone();
            for k in 0..n - 1 {
                acc[k] = &acc[k + 1] - &a0;
            }
            acc[n - 1] = a0;
        }
        acc
    }

    fn poly_sign_at(&self, x: &Rational) -> Ordering {
        let mut v = Rational::zero();
        for c in self.min_poly.iter().rev() {
            v = v * x + Rational::from_integer(c.clone());
        }
        v.cmp(&Rational::zero())
    }

    /// Encloses the real value of `e` given `beta in [lo, hi]` with `lo > 0`.
    fn interval_eval(e: &FieldElement, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut lo_pow = Rational::one();
        let mut hi_pow = Rational::one();
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        for c in &e.coeffs {
            if c.is_positive() {
                a += c * &lo_pow;
                b += c * &hi_pow;
            } else if c.is_negative() {
                a += c * &hi_pow;
                b += c * &lo_pow;
            }
            lo_pow *= lo;
            hi_pow *= hi;
        }
        (a, b)
    }

    /// Certified sign of a field element.
    pub fn sign(&self, e: &FieldElement) -> Ordering {
        assert_eq!(e.order(), self.order, "element from a different field");
        if e.is_zero() {
            return Ordering::Equal;
        }
        let (mut lo, mut hi) = self.enclosure.clone();
        for _ in 0..MAX_REFINEMENTS {
            let (a, b) = Self::interval_eval(e, &lo, &hi);
            if a.is_positive() {
                return Ordering::Greater;
            }
            if b.is_negative() {
                return Ordering::Less;
            }
            let mid = (&lo + &hi) / rational::int(2);
            match self.poly_sign_at(&mid) {
                Ordering::Less => lo = mid,
                _ => hi = mid,
            }
        }
        panic!("sign of a nonzero element not certified after {MAX_REFINEMENTS} refinements");
    }

    pub fn compare(&self, a: &FieldElement, b: &FieldElement) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.sign(&(a - b))
    }

    pub fn to_f64(&self, e: &FieldElement) -> f64 {
        let (lo, hi) = &self.enclosure;
        let (a, b) = Self::interval_eval(e, lo, hi);
        rational::to_f64(&((a + b) / rational::int(2)))
    }
}
