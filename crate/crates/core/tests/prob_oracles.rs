mod common;

use halting_core::model::{CeilLog2, Overhead};
use halting_core::prob::*;
use halting_core::{ComplexityModel, ExactRational, Plain, SelfDelimiting};
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(x: BigRational) -> ExactRational {
    x.into()
}

fn p2k(e: i64) -> ExactRational {
    ExactRational::pow2(e)
}

/// |x - target| <= rel * target for both endpoints.
fn within_relative(lo: &ExactRational, hi: &ExactRational, target: &ExactRational, rel: &ExactRational) -> bool {
    let tol = target * rel;
    (lo - target).abs() <= tol && (hi - target).abs() <= tol
}

#[test]
fn tail_sum_k1_matches_exact_oracle() {
    let (olo, ohi) = common::oracle_tail(|i| i, 1, 200);
    let (olo, ohi) = (rat(olo), rat(ohi));
    let s = tail_sum(&Plain::new(0), 1).unwrap();
    assert!(s.width() <= p2k(-64));
    // Both enclosures hold the true value, so they overlap.
    assert!(s.lo() <= &ohi && &olo <= s.hi());
    // Half the Erdős–Borwein constant, 1.6066951524152917637833015...
    let half_eb: ExactRational = "8033475762076458818916507/10000000000000000000000000".parse().unwrap();
    assert!((s.lo() - &half_eb).abs() < p2k(-70) * ExactRational::from(1_000_000u64));
}

#[test]
fn tail_sum_k10_bracketing_and_closed_form() {
    let s = tail_sum(&Plain::new(0), 10).unwrap();
    assert!(s.lo() > &p2k(-10) && s.hi() < &p2k(-9));
    assert!(within_relative(s.lo(), s.hi(), &p2k(-10), &p2k(-9)));
}

#[test]
fn self_delimiting_tail_sum_matches_oracle() {
    let g = CeilLog2;
    let sd = SelfDelimiting::with_default_overhead();
    for k in [2u64, 9, 20, 64, 300] {
        let l = sd.solve_l(k).unwrap();
        let (olo, ohi) = common::oracle_tail(|i| i + g.eval(i), l, 150);
        let s = tail_sum(&sd, k).unwrap();
        assert!(s.lo() <= &rat(ohi) && &rat(olo) <= s.hi(), "k={k}");
    }
}

#[test]
fn p2_examples() {
    let m = Plain::new(0);
    let p = p2(&m, 10, 10).unwrap();
    assert!(within_relative(p.lo(), p.hi(), &p2k(-1), &p2k(-9)));
    let p = p2(&m, 10, 20).unwrap();
    assert!(within_relative(p.lo(), p.hi(), &p2k(-11), &p2k(-8)));
}

#[test]
fn tail_prob_examples() {
    let m = Plain::new(0);
    let t = tail_prob(&m, 10, 20).unwrap();
    assert!(within_relative(t.lo(), t.hi(), &p2k(-10), &p2k(-8)));
    assert!(tail_prob(&m, 10, 10).unwrap().contains(&ExactRational::one()));
    assert!(tail_prob(&m, 10, 60).unwrap().hi() <= &p2k(-50));
}

#[test]
fn below_prob_examples() {
    let plain = Plain::new(0);
    let b = below_prob(&plain, 10, 60).unwrap();
    assert!(b.lo() >= &(ExactRational::one() - p2k(-49)));
    assert!(below_prob(&plain, 10, 10).unwrap().contains(&ExactRational::zero()));

    let sd = SelfDelimiting::with_default_overhead();
    let a = below_prob(&sd, 1024, 1084).unwrap();
    let b = below_prob(&plain, 1024, 1084).unwrap();
    assert!(a.max_distance(&b) <= p2k(-40));
}

#[test]
fn p1_oracle_matches_direct_evaluation() {
    for c in 0..4u64 {
        for n in 1..30u64 {
            for k in 1..=(n + c) {
                let expect = BigRational::new((1u32 << 0).into(), 1u32.into()) * common::pow2(k as i64)
                    / BigRational::from_integer((num_bigint::BigInt::from(1) << (n + c + 1)) - 2);
                assert_eq!(p1(&Plain::new(c), k, n).unwrap(), rat(expect));
            }
        }
    }
}

#[test]
fn normalization_contains_one() {
    let sd = SelfDelimiting::with_default_overhead();
    let models: [&dyn ComplexityModel; 3] = [&Plain::new(0), &Plain::new(3), &sd];
    for model in models {
        for k in [10u64, 20] {
            for extra in [4u64, 9, 40] {
                let total = posterior_total(model, k, k + extra, default_depth(k, k + extra)).unwrap();
                assert!(total.contains(&ExactRational::one()), "{} k={k} N=k+{extra}", model.describe());
            }
        }
    }
}

#[test]
fn self_delimiting_stays_close_to_plain() {
    // distance 0 at m = k, and both tails sit within a factor 2 of 2^(k-m).
    let sd = SelfDelimiting::with_default_overhead();
    let plain = Plain::new(0);
    for k in [1024u64, 1500] {
        assert_eq!(
            below_prob(&sd, k, k).unwrap().max_distance(&below_prob(&plain, k, k).unwrap()),
            ExactRational::zero()
        );
        for m in (k + 1..=k + 70).step_by(3) {
            let d = below_prob(&sd, k, m).unwrap().max_distance(&below_prob(&plain, k, m).unwrap());
            assert!(d <= p2k(k as i64 - m as i64 + 1), "k={k} m={m}");
        }
    }
}

fn arb_model() -> impl Strategy<Value = (u8, u64)> {
    prop_oneof![(Just(0u8), 0u64..6), (Just(1u8), Just(0u64))]
}

fn build(tag: u8, c: u64) -> Box<dyn ComplexityModel> {
    if tag == 0 {
        Box::new(Plain::new(c))
    } else {
        Box::new(SelfDelimiting::with_default_overhead())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracketing_plain(k in 1u64..400) {
        let s = tail_sum(&Plain::new(0), k).unwrap();
        prop_assert!(s.lo() > &p2k(-(k as i64)));
        prop_assert!(s.hi() < &p2k(1 - k as i64));
    }

    #[test]
    fn posterior_closed_form_accuracy(k in 10u64..=64, c in 0u64..8, dn in 0u64..40) {
        let n = (k + dn).saturating_sub(c).max(1);
        prop_assume!(n + c >= k);
        let p = p2(&Plain::new(c), k, n).unwrap();
        let closed = p2_closed(k, n, c).unwrap();
        prop_assert!(within_relative(p.lo(), p.hi(), &closed, &p2k(2 - k as i64)));
    }

    #[test]
    fn truncation_depth_nests((tag, c) in arb_model(), k in 2u64..60, dm in 0u64..30, d1 in 1u64..40, d2 in 0u64..80) {
        let model = build(tag, c);
        let m = k + dm;
        let a = tail_prob_with_depth(model.as_ref(), k, m, d1).unwrap();
        let b = tail_prob_with_depth(model.as_ref(), k, m, d1 + d2).unwrap();
        prop_assert!(b.is_subset_of(&a));
    }

    #[test]
    fn monotone_in_threshold((tag, c) in arb_model(), k in 2u64..80, dm in 0u64..60) {
        let model = build(tag, c);
        let m = k + dm;
        let t0 = tail_prob(model.as_ref(), k, m).unwrap();
        let t1 = tail_prob(model.as_ref(), k, m + 1).unwrap();
        prop_assert!(t1.hi() <= t0.hi() && t1.lo() <= t0.lo());
        let b0 = below_prob(model.as_ref(), k, m).unwrap();
        let b1 = below_prob(model.as_ref(), k, m + 1).unwrap();
        prop_assert!(b1.lo() >= b0.lo() && b1.hi() >= b0.hi());
    }

    #[test]
    fn posterior_decreases_in_n((tag, c) in arb_model(), k in 2u64..60, dn in 0u64..30) {
        let model = build(tag, c);
        let n0 = smallest_output(model.as_ref(), k).unwrap();
        let n = n0 + dn;
        let a = p2(model.as_ref(), k, n).unwrap();
        let b = p2(model.as_ref(), k, n + 1).unwrap();
        prop_assert!(b.hi() <= a.hi());
    }

    #[test]
    fn complement_identity((tag, c) in arb_model(), k in 2u64..80, dm in 0u64..60) {
        let model = build(tag, c);
        let t = tail_prob(model.as_ref(), k, k + dm).unwrap();
        let b = below_prob(model.as_ref(), k, k + dm).unwrap();
        prop_assert_eq!(b.lo() + t.hi(), ExactRational::one());
        prop_assert_eq!(b.hi() + t.lo(), ExactRational::one());
    }

    #[test]
    fn normalization_any_cutoff((tag, c) in arb_model(), k in 4u64..40, extra in 4u64..30) {
        // with c >= k the denominator also weighs sizes n <= 0
        prop_assume!(c < k);
        let model = build(tag, c);
        let total = posterior_total(model.as_ref(), k, k + extra, 32).unwrap();
        prop_assert!(total.contains(&ExactRational::one()));
    }
}
