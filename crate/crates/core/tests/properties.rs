use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use serde_json::Value;

use intersective::cert::{verify, Certificate};
use intersective::intersect::{counterexample_certificate, intersective_decide_1var, solvable_mod, DEFAULT_BUDGET};
use intersective::lattice::AffineLattice;
use intersective::poly::{IntPoly, RationalVectorPoly};
use intersective::recurrence::{intersection_density, obstruction_demo, WindowSet};
use intersective::torus::{
    component_closure, contains_zero, sum_closures, IrrationalPart, SubtorusCoset, SymbolicPoint, TorusSequence,
};

fn vector_poly(rows: &[Vec<i64>]) -> RationalVectorPoly {
    RationalVectorPoly::new(rows.iter().map(|c| IntPoly::from_int_coeffs(c)).collect()).unwrap()
}

/// `s` coordinates, each a one-variable integer polynomial of degree at most 3.
fn arb_vector(s: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, 1..=4), s)
}

fn closure_of(label: &str, rows: &[Vec<i64>]) -> SubtorusCoset {
    component_closure(label, &vector_poly(rows), &BigInt::from(1), &AffineLattice::full(1)).unwrap()
}

fn eval_mod(coeffs: &[i64], n: i64, k: i64) -> i64 {
    coeffs.iter().rev().fold(0i128, |acc, &c| (acc * n as i128 + c as i128).rem_euclid(k as i128)) as i64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_contains_the_orbit(a in arb_vector(3), b in arb_vector(3), ns in prop::collection::vec(-50i64..50, 1..8)) {
        let parts: Vec<IrrationalPart> = [("a", &a), ("b", &b)]
            .iter()
            .map(|(label, rows)| IrrationalPart {
                label: label.to_string(),
                value: None,
                divisor: BigInt::from(1),
                b: vector_poly(rows),
            })
            .collect();
        let q0 = RationalVectorPoly::new(vec![IntPoly::zero(1); 3]).unwrap();
        let t = TorusSequence::new(1.into(), q0, parts, AffineLattice::full(1), Vec::new()).unwrap();
        let closure = sum_closures(&[closure_of("a", &a), closure_of("b", &b)]).unwrap();
        for n in ns {
            prop_assert!(closure.contains(&t.symbolic_at(&[BigInt::from(n)]).unwrap()), "n = {}", n);
        }
    }

    #[test]
    fn contains_zero_matches_coset_membership(a in arb_vector(3)) {
        let direct = contains_zero(&vector_poly(&a), &AffineLattice::full(1)).unwrap();
        prop_assert_eq!(direct, closure_of("a", &a).contains(&SymbolicPoint::zero(3)));
    }

    #[test]
    fn closure_sums_form_a_commutative_monoid(a in arb_vector(2), b in arb_vector(2), c in arb_vector(2)) {
        let (x, y, z) = (closure_of("a", &a), closure_of("b", &b), closure_of("c", &c));
        let xy = sum_closures(&[x.clone(), y.clone()]).unwrap();
        prop_assert_eq!(&xy, &sum_closures(&[y.clone(), x.clone()]).unwrap());
        let left = sum_closures(&[xy, z.clone()]).unwrap();
        let right = sum_closures(&[x.clone(), sum_closures(&[y, z]).unwrap()]).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(sum_closures(&[x.clone(), SubtorusCoset::zero(2)]).unwrap(), x);
    }

    #[test]
    fn density_is_monotone_in_the_set(
        elems in prop::collection::btree_set(0i64..400, 0..200),
        extra in prop::collection::btree_set(0i64..400, 0..100),
        coeffs in prop::collection::vec(-3i64..=3, 1..=3),
        n in -6i64..6,
    ) {
        let small: Vec<i64> = elems.iter().copied().collect();
        let big: Vec<i64> = elems.union(&extra).copied().collect();
        let (a, b) = (WindowSet::explicit(0, 400, &small).unwrap(), WindowSet::explicit(0, 400, &big).unwrap());
        prop_assert!(a.is_subset_of(&b));
        let fam = [IntPoly::from_int_coeffs(&coeffs)];
        prop_assert!(intersection_density(&a, &fam, &[n]).unwrap() <= intersection_density(&b, &fam, &[n]).unwrap());
    }

    #[test]
    fn configuration_counts_match_direct_counting(
        elems in prop::collection::btree_set(-100i64..100, 0..120),
        shifts in prop::collection::vec(-40i128..40, 0..3),
        t in -30i64..30,
    ) {
        let list: Vec<i64> = elems.iter().copied().collect();
        let set = WindowSet::explicit(-100, 100, &list).unwrap();
        let direct = list.iter().filter(|&&a| shifts.iter().all(|&s| elems.contains(&(a + s as i64)))).count() as u64;
        prop_assert_eq!(set.configuration_count(&shifts), direct);
        // translating the set and its window together changes nothing
        let moved: Vec<i64> = list.iter().map(|a| a + t).collect();
        let moved = WindowSet::explicit(-100 + t, 100 + t, &moved).unwrap();
        prop_assert_eq!(moved.configuration_count(&shifts), direct);
    }

    #[test]
    fn obstruction_holds_exactly_when_no_root(coeffs in prop::collection::vec(-6i64..=6, 1..=4), k in 2u64..13) {
        let p = IntPoly::from_int_coeffs(&coeffs);
        prop_assume!(!p.is_zero());
        let root = (0..k as i64).find(|&n| eval_mod(&coeffs, n, k as i64) == 0);
        let sol = solvable_mod(std::slice::from_ref(&p), k, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(sol.witness.is_some(), root.is_some());
        match obstruction_demo(std::slice::from_ref(&p), k, (0, 300), 12) {
            Ok(rep) => {
                prop_assert!(root.is_none());
                prop_assert!(rep.all_confirmed);
            }
            Err(e) => {
                prop_assert!(root.is_some());
                prop_assert_eq!(e.kind(), "precondition_violated");
            }
        }
    }

    #[test]
    fn resealed_counterexample_edits_are_rejected(
        coeffs in prop::collection::vec(-6i64..=6, 1..=4),
        k in 2u64..13,
        pick in any::<prop::sample::Index>(),
        delta in 1u64..3,
    ) {
        let p = IntPoly::from_int_coeffs(&coeffs);
        prop_assume!(!p.is_zero());
        prop_assume!((0..k as i64).all(|n| eval_mod(&coeffs, n, k as i64) != 0));
        let cert = counterexample_certificate(std::slice::from_ref(&p), k).unwrap();
        prop_assert!(verify(&cert).is_ok());

        let mut v: Value = serde_json::from_str(&cert.to_json()).unwrap();
        let table = v["evidence"]["payload"]["table"].as_array_mut().unwrap();
        let i = pick.index(table.len());
        table[i] = Value::from(table[i].as_u64().unwrap() + delta);
        let mut edited = Certificate::from_json(&v.to_string()).unwrap();
        edited.reseal();
        prop_assert!(verify(&edited).is_err());

        let mut v: Value = serde_json::from_str(&cert.to_json()).unwrap();
        v["claim"]["modulus"] = Value::from((k + delta).to_string());
        let mut edited = Certificate::from_json(&v.to_string()).unwrap();
        edited.reseal();
        prop_assert!(verify(&edited).is_err());
    }

    #[test]
    fn resealed_root_edits_are_rejected(root in -20i64..20, other in prop::collection::vec(-3i64..=3, 1..=2), delta in 1i64..5) {
        // (n − root)·q(n) has the integer root `root`; a shifted root is a root only if q vanishes there
        let q = IntPoly::from_int_coeffs(&other);
        prop_assume!(!q.is_zero());
        let p = &IntPoly::from_int_coeffs(&[-root, 1]) * &q;
        let (_, cert) = intersective_decide_1var(&p, 50, 8, DEFAULT_BUDGET).unwrap();
        prop_assume!(cert.evidence.kind() == "WitnessTable");
        prop_assert!(verify(&cert).is_ok());
        let mut v: Value = serde_json::from_str(&cert.to_json()).unwrap();
        let r: i64 = v["evidence"]["payload"]["root"].as_str().unwrap().parse().unwrap();
        prop_assume!(!p.eval_i64(&[r + delta]).unwrap().is_zero());
        v["evidence"]["payload"]["root"] = Value::from((r + delta).to_string());
        let mut edited = Certificate::from_json(&v.to_string()).unwrap();
        edited.reseal();
        prop_assert!(verify(&edited).is_err());
    }
}

#[test]
fn zero_closure_is_the_origin() {
    let z = SubtorusCoset::zero(3);
    assert_eq!(z.rank(), 0);
    assert!(z.contains(&SymbolicPoint::zero(3)));
    let mut p = SymbolicPoint::zero(3);
    p.rational[1] = BigRational::new(1.into(), 2.into());
    assert!(!z.contains(&p));
}
