use std::cmp::Ordering;
use std::sync::OnceLock;

use betafreq::ergodic::greedy_expand;
use betafreq::normalize::{normalize, normalize_counted, normalize_naive, normalize_two_sided, normalize_via_blocks};
use betafreq::probability::{prob_future_digit, prob_past_digit, DigitEvent};
use betafreq::rational::{rat, Rational};
use betafreq::word::{is_normal_form, parse_blocks};
use betafreq::{BetaParams, BitWord, FieldElement, TwoSidedWord};
use proptest::prelude::*;

fn params(order: usize) -> &'static BetaParams {
    static CACHE: OnceLock<Vec<BetaParams>> = OnceLock::new();
    &CACHE.get_or_init(|| (0..=5).map(|n| BetaParams::multinacci(n.max(2)).unwrap()).collect())[order]
}

fn word(max_len: usize) -> impl Strategy<Value = BitWord> {
    prop::collection::vec(0u8..=1, 0..=max_len).prop_map(BitWord::from_bits)
}

/// Rewrites the rightmost occurrence first, restarting each time.
fn normalize_rightmost(w: &BitWord, n: usize) -> BitWord {
    let mut bits = w.bits().to_vec();
    loop {
        let hit = (0..bits.len().saturating_sub(n))
            .rev()
            .find(|&i| bits[i] == 0 && bits[i + 1..=i + n].iter().all(|&b| b == 1));
        match hit {
            Some(i) => {
                bits[i] = 1;
                bits[i + 1..=i + n].fill(0);
            }
            None => return BitWord::from_bits(bits),
        }
    }
}

fn element(order: usize) -> impl Strategy<Value = FieldElement> {
    prop::collection::vec((-20i64..=20, 1i64..=6), order).prop_map(move |c| {
        FieldElement::from_coeffs(order, c.into_iter().map(|(p, q)| rat(p, q)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_preserves_value(order in 2usize..=5, w in word(120)) {
        let p = params(order);
        let (normal, rewrites) = normalize_counted(&w, p);
        prop_assert_eq!(p.evaluate_word(&normal), p.evaluate_word(&w));
        prop_assert!(is_normal_form(&normal, p));
        prop_assert_eq!(normalize(&normal, p), normal.clone());
        prop_assert!(rewrites <= w.count_ones());
        prop_assert_eq!(normal.len(), w.len());
    }

    #[test]
    fn rewriting_order_is_irrelevant(order in 2usize..=4, w in word(60)) {
        let p = params(order);
        let leftmost = normalize(&w, p);
        prop_assert_eq!(&normalize_naive(&w, p), &leftmost);
        prop_assert_eq!(&normalize_rightmost(&w, order), &leftmost);
    }

    #[test]
    fn blocks_agree_with_direct(order in 2usize..=4, w in word(200)) {
        let p = params(order);
        prop_assert_eq!(normalize_via_blocks(&w, p), normalize(&w, p));
        let d = parse_blocks(&w, p);
        prop_assert_eq!(d.concat(), w.clone());
        let sep = BitWord::zeros(order);
        for b in d.blocks.iter().skip(1) {
            prop_assert!(b.bits().starts_with(sep.bits()));
        }
    }

    #[test]
    fn block_property(order in 2usize..=4, a in word(40), b in word(40)) {
        // P(AB) = P(A) P(B) whenever B starts with the separator
        let p = params(order);
        let b = BitWord::zeros(order).concat(&b);
        let joined = normalize(&a.concat(&b), p);
        prop_assert_eq!(joined, normalize(&a, p).concat(&normalize(&b, p)));
    }

    #[test]
    fn compare_matches_rationals(a in (-50i64..50, 1i64..20), b in (-50i64..50, 1i64..20), order in 2usize..=4) {
        let p = params(order);
        let (x, y) = (rat(a.0, a.1), rat(b.0, b.1));
        prop_assert_eq!(p.compare(&p.rational(x.clone()), &p.rational(y.clone())), x.cmp(&y));
    }

    #[test]
    fn compare_matches_floats_on_words(order in 2usize..=4, u in word(30), v in word(30)) {
        let p = params(order);
        let (x, y) = (p.evaluate_word(&u), p.evaluate_word(&v));
        let (fx, fy) = (p.to_f64(&x), p.to_f64(&y));
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(p.compare(&x, &y), fx.partial_cmp(&fy).unwrap());
        }
        prop_assert_eq!(p.compare(&x, &y), p.compare(&y, &x).reverse());
    }

    #[test]
    fn field_axioms(a in element(3), b in element(3), c in element(3)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inverse().unwrap(), FieldElement::one(3));
        }
    }

    #[test]
    fn greedy_expansion_of_normal_words(order in 2usize..=4, w in word(24)) {
        let p = params(order);
        let normal = normalize(&w, p);
        let x = p.evaluate_word(&normal);
        if p.compare(&x, &p.one()) == Ordering::Less {
            prop_assert_eq!(greedy_expand(&x, w.len(), p).unwrap(), normal);
        }
    }

    #[test]
    fn greedy_expansions_are_normal(order in 2usize..=4, num in 0i64..1000) {
        let p = params(order);
        let x = p.rational(rat(num, 1000));
        let w = greedy_expand(&x, 30, p).unwrap();
        prop_assert!(is_normal_form(&w, p));
    }

    #[test]
    fn two_sided_final_digits_survive_extension(
        past in word(12), future in word(12), left in word(4), right in word(4)
    ) {
        let p = params(2);
        let w = TwoSidedWord::new(&past, &future);
        let base = normalize_two_sided(&w, p, 0);
        let ext = TwoSidedWord::new(&left.concat(&past), &future.concat(&right));
        let r = normalize_two_sided(&ext, p, 0);
        if let Some((a, b)) = base.final_range {
            for c in a..=b {
                prop_assert_eq!(r.word.get(c), base.word.get(c));
            }
        }
    }

    #[test]
    fn shift_moves_coordinates(past in word(8), future in word(8), k in -5i64..5) {
        let w = TwoSidedWord::new(&past, &future);
        let s = w.shift(k);
        for c in -8i64..8 {
            prop_assert_eq!(s.get(c - k), w.get(c));
        }
    }
}

fn bracket_contains(r: &Rational, lo: &Rational, hi: &Rational) -> bool {
    lo <= r && r <= hi
}

#[test]
fn brackets_shrink_with_depth() {
    let g = params(2);
    let events: Vec<(DigitEvent, Rational, bool)> = vec![
        (DigitEvent::digits_equal(1, vec![(0, 1)]), rat(2, 3), true),
        (DigitEvent::digits_equal(2, vec![(0, 1), (1, 1)]), rat(1, 3), true),
        (DigitEvent::digits_equal(1, vec![(0, 1)]), rat(1, 3), false),
        (DigitEvent::digits_equal(2, vec![(0, 0), (1, 0)]), rat(1, 2), false),
        (DigitEvent::digits_equal(1, vec![(0, 0)]), rat(2, 3), false),
    ];
    for (event, exact, future) in &events {
        let mut last_width: Option<Rational> = None;
        for depth in event.k.max(1)..=14 {
            let b = if *future {
                prob_future_digit(g, event, depth).unwrap()
            } else {
                prob_past_digit(g, event, depth).unwrap()
            };
            assert!(b.lower <= b.upper);
            assert_eq!(&b.upper - &b.lower, b.undecided);
            assert!(bracket_contains(exact, &b.lower, &b.upper), "depth {depth}");
            assert!(b.undecided <= rat(2, 1) * betafreq::rational::dyadic(depth as u32));
            if let Some(w) = &last_width {
                assert!(&b.undecided <= w);
            }
            last_width = Some(b.undecided.clone());
        }
    }
}

#[test]
fn complementary_events_partition_the_space() {
    let g = params(2);
    for depth in [3, 8, 13] {
        let one = prob_future_digit(g, &DigitEvent::digits_equal(1, vec![(0, 1)]), depth).unwrap();
        let zero = prob_future_digit(g, &DigitEvent::digits_equal(1, vec![(0, 0)]), depth).unwrap();
        assert_eq!(&one.lower + &zero.upper, rat(1, 1));
        assert_eq!(&one.upper + &zero.lower, rat(1, 1));
    }
}
