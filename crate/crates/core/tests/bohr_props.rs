mod common;

use nilsep::bohr::{
    best_gap_curve, constant_witness, find_separating_rotation, i0_partition, nonrecurrence_witness, pairs_from,
    rotation_gap, square_lift, sum_with_finite, verify_i0_partition, SearchBudget, TorusRotation, WitnessOutcome,
};
use nilsep::rational::{circle_norm, ratio, Rational};
use nilsep::{Error, IntegerSet, SetDescriptor};
use num::{BigInt, Zero};
use proptest::prelude::*;

fn set(text: &str) -> SetDescriptor {
    SetDescriptor::parse(text).unwrap()
}

/// `min ||(a - b) alpha||` over the elements `<= bound`, computed directly.
fn brute_gap(alpha: &[Rational], a: &SetDescriptor, b: &SetDescriptor, bound: u64) -> Option<Rational> {
    let (xa, xb) = (a.up_to(bound).unwrap(), b.up_to(bound).unwrap());
    let mut best: Option<Rational> = None;
    for &x in xa.elements() {
        for &y in xb.elements() {
            let diff = BigInt::from(x as i128 - y as i128);
            let d = alpha.iter().map(|c| circle_norm(&(c * &diff))).max().unwrap();
            best = Some(best.map_or(d.clone(), |cur: Rational| cur.min(d)));
        }
    }
    best
}

/// Set pairs with a brute-force bound large enough to meet every residue
/// class mod `q <= 12`.
const PAIRS: [(&str, &str, u64); 5] = [
    ("pow2", "pow2+1", 1 << 40),
    ("squares", "2*n^2", 200_000),
    ("pow3", "pow3+2", 1 << 40),
    ("odd", "even", 600),
    ("pow2", "pow2+2n@3", 1 << 40),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn residue_gap_matches_brute_force(pair in 0usize..5, q in 2i64..=12, p1 in 0i64..12, p2 in 0i64..12, two in any::<bool>()) {
        let (a, b, bound) = (set(PAIRS[pair].0), set(PAIRS[pair].1), PAIRS[pair].2);
        let alpha: Vec<Rational> = if two { vec![ratio(p1, q), ratio(p2, q)] } else { vec![ratio(p1, q)] };
        let cert = rotation_gap(&TorusRotation::new(alpha.clone()), &a, &b, 1 << 20).unwrap();
        prop_assert!(cert.exact);
        prop_assert_eq!(cert.gap, brute_gap(&alpha, &a, &b, bound));
    }

    #[test]
    fn constant_witness_is_exact(c in 1u64..10_000) {
        let (rot, eps) = constant_witness(c).unwrap();
        prop_assert_eq!(rot.norm_of_multiple(c as i128), eps);
    }
}

#[test]
fn overlapping_sets_are_rejected() {
    let err = rotation_gap(&TorusRotation::new(vec![ratio(1, 2)]), &set("pow2"), &set("pow2+2n"), 1 << 20);
    assert!(matches!(err, Err(Error::SetsNotDisjoint(_))));
    let err = find_separating_rotation(&set("pow2"), &set("pow2+2n"), &SearchBudget::default());
    assert!(matches!(err, Err(Error::SetsNotDisjoint(_))));
}

#[test]
fn best_gap_never_grows_with_truncation() {
    let budget = SearchBudget {
        max_denominator: 24,
        random_budget: 16,
        ..SearchBudget::default()
    };
    let bounds = [8, 32, 128, 1 << 10, 1 << 14, 1 << 20];
    let curve = best_gap_curve(&set("pow2"), &set("pow2+2n@3"), &bounds, &budget).unwrap();
    // nothing of `pow2+2n@3` lies below 14, so the first gap is infinite
    assert_eq!(curve[0].1, None);
    for w in curve[1..].windows(2) {
        let (a, b) = (w[0].1.clone().unwrap(), w[1].1.clone().unwrap());
        assert!(b <= a, "{:?}", curve);
    }
    assert!(curve.last().unwrap().1.clone().unwrap() < ratio(1, 16));
}

#[test]
fn search_finds_parity_split() {
    let out = find_separating_rotation(&set("odd"), &set("even"), &SearchBudget::default()).unwrap();
    assert!(out.is_found());
    let c = out.certificate();
    assert_eq!(c.alpha, vec![ratio(1, 2)]);
    assert_eq!(c.gap, Some(ratio(1, 2)));
    let again = find_separating_rotation(&set("odd"), &set("even"), &SearchBudget::default()).unwrap();
    assert_eq!(out.to_json(), again.to_json());
}

#[test]
fn odd_numbers_are_not_recurrent() {
    match nonrecurrence_witness(&set("odd"), &SearchBudget::default()).unwrap() {
        WitnessOutcome::Found { alpha, eps, exact } => {
            assert_eq!(alpha, vec![ratio(1, 2)]);
            assert_eq!(eps, ratio(1, 2));
            assert!(exact);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        nonrecurrence_witness(&set("naturals"), &SearchBudget::default()).unwrap(),
        WitnessOutcome::NotFound { .. }
    ));
}

#[test]
fn i0_partition_passes_its_own_verification() {
    let rot = TorusRotation::new(vec![ratio(1, 2)]);
    for n in [4, 10, 20, 40] {
        let pairs = pairs_from(&set("pow2"), &set("2n-1"), n).unwrap();
        let p = i0_partition(&pairs, &rot, &ratio(1, 2)).unwrap();
        let v = verify_i0_partition(&p);
        assert!(v.passed(), "n = {n}: {:?}", v.failures);
        assert!(v.disjoint_cover && v.pairs_split && v.lacunary && v.partner_gap);
        assert!(v.min_partner_gap.unwrap() >= ratio(1, 4));
        let covered: usize = p.pieces.iter().map(|x| x.len()).sum();
        assert_eq!(covered, 2 * n);
    }
}

#[test]
fn i0_partition_rejects_bad_witness() {
    let rot = TorusRotation::new(vec![ratio(1, 2)]);
    let pairs = pairs_from(&set("pow2"), &set("2n"), 6).unwrap();
    assert!(matches!(i0_partition(&pairs, &rot, &ratio(1, 2)), Err(Error::WitnessInvalid { .. })));
}

#[test]
fn square_lift_on_lacunary_base() {
    let r = set("pow2").prefix(15).unwrap();
    let t: Vec<u64> = (1..=15).map(|n| 2 * n - 1).collect();
    let rep = square_lift(&r, &t).unwrap();
    assert!(rep.chain_holds);
    for (n, (&(a, b), &s)) in rep.squared_pairs.iter().zip(&rep.shifts).enumerate() {
        let (rn, tn) = (r.elements()[n], t[n]);
        assert_eq!(a, rn * rn);
        assert_eq!(b, (rn + tn) * (rn + tn));
        assert_eq!(s, b - a);
    }
    assert!(rep.shift_lacunary_ratio >= ratio(5, 4));
    let not_lacunary = IntegerSet::new((1..=10).map(|n| n * n).collect(), "sq").unwrap();
    assert!(matches!(square_lift(&not_lacunary, &[1; 10]), Err(Error::HypothesisViolated(_))));
}

#[test]
fn sum_with_finite_shifts() {
    let rep = sum_with_finite(&set("pow2"), &[0, 1, 2], &SearchBudget::default()).unwrap();
    assert_eq!(rep.pairs.len(), 3);
    for p in &rep.pairs {
        assert_eq!(p.witness_eps, ratio(1, 2));
        let rot = TorusRotation::new(p.witness_alpha.clone());
        assert!(rot.norm_of_multiple((p.j - p.i) as i128) >= p.witness_eps);
    }
    assert!(rep.all_certified);
    assert!(rep.pairs.iter().any(|p| p.dropped > 0));
}

#[test]
fn norm_of_multiple_in_two_dimensions() {
    let rot = TorusRotation::new(vec![ratio(1, 3), ratio(2, 5)]);
    assert_eq!(rot.norm_of_multiple(1), ratio(2, 5));
    assert_eq!(rot.norm_of_multiple(3), ratio(1, 5));
    assert_eq!(rot.norm_of_multiple(15), Rational::zero());
    assert_eq!(rot.norm_of_multiple(-1), ratio(2, 5));
}
