//! The normalization operator: rewriting `0 1^n -> 1 0^n` until none remains.
//!
//! The rewrite system has no critical pairs (a suffix of `0 1^n` never starts
//! with `0`), so every rewriting order reaches the same normal form. The
//! implementation follows the leftmost strategy.

use rayon::prelude::*;
use serde::Serialize;

use crate::field::BetaParams;
use crate::word::{parse_blocks, BitWord, TwoSidedWord};

/// Normalizes `bits` in place and returns the number of rewrites applied.
///
/// After a rewrite at position `i` the scan resumes at `i - n`: no factor
/// starting further left can touch a changed position.
pub(crate) fn normalize_in_place(bits: &mut [u8], n: usize) -> usize {
    let len = bits.len();
    let mut rewrites = 0;
    let mut i = 0;
    while i + n < len {
        if bits[i] == 0 && bits[i + 1..=i + n].iter().all(|&b| b == 1) {
            bits[i] = 1;
            bits[i + 1..=i + n].fill(0);
            rewrites += 1;
            i = i.saturating_sub(n);
        } else {
            i += 1;
        }
    }
    rewrites
}

pub fn normalize(w: &BitWord, params: &BetaParams) -> BitWord {
    normalize_counted(w, params).0
}

/// Normal form together with the number of rewrites performed.
pub fn normalize_counted(w: &BitWord, params: &BetaParams) -> (BitWord, usize) {
    let mut out = w.clone();
    let k = normalize_in_place(out.bits_mut(), params.order());
    (out, k)
}

/// Literal form of the rewriting loop: find the first occurrence, replace it,
/// restart from the beginning. Quadratic; kept as a reference oracle.
pub fn normalize_naive(w: &BitWord, params: &BetaParams) -> BitWord {
    let n = params.order();
    let mut bits = w.bits().to_vec();
    'outer: loop {
        for i in 0..bits.len().saturating_sub(n) {
            if bits[i] == 0 && bits[i + 1..=i + n].iter().all(|&b| b == 1) {
                bits[i] = 1;
                bits[i + 1..=i + n].fill(0);
                continue 'outer;
            }
        }
        return BitWord::from_bits(bits);
    }
}

/// Cuts at the separators and normalizes each block on its own.
pub fn normalize_via_blocks(w: &BitWord, params: &BetaParams) -> BitWord {
    let decomposition = parse_blocks(w, params);
    let n = params.order();
    let parts: Vec<Vec<u8>> = decomposition
        .blocks
        .par_iter()
        .map(|b| {
            let mut bits = b.bits().to_vec();
            normalize_in_place(&mut bits, n);
            bits
        })
        .collect();
    BitWord::from_bits(parts.concat())
}

/// Result of normalizing a finite window of a two-sided sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoSidedNormalization {
    #[serde(serialize_with = "serialize_display")]
    pub word: TwoSidedWord,
    /// Inclusive coordinate range whose digits agree with the normalization
    /// of every two-sided extension of the window.
    pub final_range: Option<(i64, i64)>,
    pub radius: usize,
    /// True iff every coordinate in `[-radius, radius]` is final.
    pub stable: bool,
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl TwoSidedNormalization {
    pub fn is_final(&self, c: i64) -> bool {
        self.final_range.is_some_and(|(a, b)| a <= c && c <= b)
    }
}

/// Normalizes the window and reports which digits are final.
///
/// A digit is final once a separator `0^n` of the normalized window starts at
/// or before it and another starts strictly after it: normalization of any
/// extension splits into independent blocks at both separators, and the
/// middle block is already normal.
pub fn normalize_two_sided(
    w: &TwoSidedWord,
    params: &BetaParams,
    radius: usize,
) -> TwoSidedNormalization {
    let n = params.order();
    let mut bits = w.bits().to_vec();
    normalize_in_place(&mut bits, n);
    let word = TwoSidedWord::from_parts(bits, w.origin());

    let occurrences: Vec<usize> = (0..word.len().saturating_sub(n - 1))
        .filter(|&i| word.bits()[i..i + n].iter().all(|&b| b == 0))
        .collect();
    let final_range = match (occurrences.first(), occurrences.last()) {
        (Some(&first), Some(&last)) if first < last => {
            Some((word.coordinate_of(first), word.coordinate_of(last - 1)))
        }
        _ => None,
    };
    let k = radius as i64;
    let stable = final_range.is_some_and(|(a, b)| a <= -k && k <= b);
    TwoSidedNormalization {
        word,
        final_range,
        radius,
        stable,
    }
}

/// Digit at coordinate 0 of the normalization of `y^- y^+` for the golden
/// mean, from the boundary digits of the already-normalized halves.
pub fn classify_center(y_minus1: u8, y0: u8, y1: u8, y2: u8) -> u8 {
    let case1 = y0 == 1 && y1 == 0;
    let case2 = y_minus1 == 0 && y0 == 0 && y1 == 1 && y2 == 1;
    u8::from(case1 || case2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::is_normal_form;

    fn w(s: &str) -> BitWord {
        BitWord::parse(s).unwrap()
    }

    #[test]
    fn golden_identities() {
        let g = BetaParams::golden_mean();
        assert_eq!(normalize(&w("011"), &g), w("100"));
        assert_eq!(normalize(&w("0000"), &g), w("0000"));
        assert_eq!(normalize(&w(""), &g), w(""));
        for k in 0..=5 {
            let a = w("01").repeat(k).concat(&w("1"));
            assert_eq!(normalize(&a, &g), w("1").concat(&BitWord::zeros(2 * k)));
            let b = w("01").repeat(k).concat(&w("00"));
            assert_eq!(normalize(&b, &g), b);
            let c = w("0").concat(&BitWord::ones(2 * k));
            assert_eq!(normalize(&c, &g), w("10").repeat(k).concat(&w("0")));
            let d = w("0").concat(&BitWord::ones(2 * k + 1));
            assert_eq!(normalize(&d, &g), w("10").repeat(k).concat(&w("01")));
        }
    }

    #[test]
    fn tribonacci_single_rewrite() {
        let t = BetaParams::tribonacci();
        let (out, k) = normalize_counted(&w("0111"), &t);
        assert_eq!(out, w("1000"));
        assert_eq!(k, 1);
        assert_eq!(t.evaluate_word(&out), t.evaluate_word(&w("0111")));
    }

    #[test]
    fn leading_runs_preserved() {
        let g = BetaParams::golden_mean();
        assert_eq!(normalize(&w("1110100"), &g), w("1110100"));
        assert!(is_normal_form(&normalize(&w("0101101111"), &g), &g));
    }

    #[test]
    fn blocks_match_direct_on_examples() {
        let g = BetaParams::golden_mean();
        let x = w("0110011");
        assert_eq!(normalize_via_blocks(&x, &g), normalize(&x, &g));
        let single = w("1011");
        assert_eq!(normalize_via_blocks(&single, &g), normalize(&single, &g));
    }

    #[test]
    fn classify_center_cases() {
        for a in 0..2 {
            for d in 0..2 {
                assert_eq!(classify_center(a, 1, 0, d), 1);
            }
        }
        assert_eq!(classify_center(0, 0, 1, 1), 1);
        for d in 0..2 {
            assert_eq!(classify_center(0, 1, 1, d), 0);
        }
        assert_eq!(classify_center(1, 0, 1, 1), 0);
        assert_eq!(classify_center(0, 0, 1, 0), 0);
    }

    #[test]
    fn two_sided_all_zero_window() {
        let g = BetaParams::golden_mean();
        let z = TwoSidedWord::parse("000000|000000").unwrap();
        let r = normalize_two_sided(&z, &g, 3);
        assert_eq!(r.word, z);
        assert!(r.stable);
        for c in -3..=3 {
            assert!(r.is_final(c));
        }
    }

    #[test]
    fn two_sided_without_separators_is_unstable() {
        let g = BetaParams::golden_mean();
        let r = normalize_two_sided(&TwoSidedWord::parse("1010|1010").unwrap(), &g, 0);
        assert_eq!(r.final_range, None);
        assert!(!r.stable);
    }

    #[test]
    fn two_sided_case_one_keeps_center() {
        // y^- = ...0 1 and y^+ = 1 0 ... is not case 1; use y0 = 1, y1 = 0.
        let g = BetaParams::golden_mean();
        let t = TwoSidedWord::parse("00101|0100").unwrap();
        let r = normalize_two_sided(&t, &g, 0);
        assert!(r.stable);
        assert_eq!(r.word.get(0), Some(1));
    }

    #[test]
    fn two_sided_finality_under_boundary_extensions() {
        let g = BetaParams::golden_mean();
        let t = TwoSidedWord::parse("0010|01100").unwrap();
        let base = normalize_two_sided(&t, &g, 0);
        assert!(base.stable);
        for left in 0..4u8 {
            for right in 0..4u8 {
                let mut bits = vec![left >> 1, left & 1];
                bits.extend_from_slice(t.bits());
                bits.extend_from_slice(&[right >> 1, right & 1]);
                let ext = TwoSidedWord::from_parts(bits, t.origin() + 2);
                let r = normalize_two_sided(&ext, &g, 0);
                let (a, b) = base.final_range.unwrap();
                for c in a..=b {
                    assert_eq!(r.word.get(c), base.word.get(c), "coordinate {c}");
                }
            }
        }
    }
}
