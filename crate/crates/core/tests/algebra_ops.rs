use std::collections::BTreeSet;

use mvsheaf_core::algebra::{check_homomorphism, closure, generate_subalgebra, Homomorphism, MvOp};
use mvsheaf_core::spectra::{quotient, radical};
use mvsheaf_core::{MvAlgebra, MvElement, MvError};
use proptest::prelude::*;

fn k3() -> MvAlgebra {
    MvAlgebra::gamma_lex(2, vec![1]).unwrap()
}

fn lex(v: &[i64]) -> MvElement {
    MvElement::lex(v)
}

#[test]
fn chain_truncated_sum() {
    let c3 = MvAlgebra::chain(3).unwrap();
    let third = MvElement::chain(1, 3);
    assert_eq!(
        c3.apply(MvOp::Oplus, &[third.clone(), third]).unwrap(),
        MvElement::chain(2, 3)
    );
}

#[test]
fn k3_negation_and_product() {
    let a = k3();
    assert_eq!(a.apply(MvOp::Neg, &[lex(&[1, 3])]).unwrap(), lex(&[1, -3]));
    assert_eq!(
        a.apply(MvOp::Odot, &[lex(&[1, 3]), lex(&[1, 0])]).unwrap(),
        lex(&[0, 3])
    );
}

#[test]
fn foreign_elements_rejected() {
    let a = k3();
    let err = a
        .apply(MvOp::Oplus, &[lex(&[0, -1]), lex(&[0, 0])])
        .unwrap_err();
    assert!(matches!(err, MvError::ForeignElement { .. }));
    let c2 = MvAlgebra::chain(2).unwrap();
    assert!(c2.apply(MvOp::Neg, &[MvElement::chain(1, 3)]).is_err());
}

#[test]
fn enumeration() {
    let c2 = MvAlgebra::chain(2).unwrap();
    assert_eq!(
        c2.enumerate().unwrap(),
        vec![
            MvElement::chain(0, 1),
            MvElement::chain(1, 2),
            MvElement::chain(1, 1)
        ]
    );
    let p = MvAlgebra::product(vec![MvAlgebra::chain(1).unwrap(), c2]).unwrap();
    assert_eq!(p.enumerate().unwrap().len(), 6);
    assert!(matches!(k3().enumerate(), Err(MvError::NotEnumerable(_))));
    assert!(MvAlgebra::chain(0).is_err());
}

#[test]
fn subalgebra_generation() {
    let c4 = MvAlgebra::chain(4).unwrap();
    let s = generate_subalgebra(&c4, &[MvElement::chain(1, 2)], 100).unwrap();
    assert_eq!(
        s.enumerate().unwrap(),
        vec![
            MvElement::chain(0, 1),
            MvElement::chain(1, 2),
            MvElement::chain(1, 1)
        ]
    );
    let constants = closure(&k3(), &[], 100).unwrap();
    assert_eq!(
        constants,
        [lex(&[0, 0]), lex(&[2, 0])]
            .into_iter()
            .collect::<BTreeSet<_>>()
    );
    let chang = MvAlgebra::gamma_lex(1, vec![1]).unwrap();
    match closure(&chang, &[lex(&[0, 1])], 50) {
        Err(MvError::ClosureBudgetExceeded { partial }) => assert!(partial.len() > 50),
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn brute_force_closure_agrees() {
    // oracle: iterate "apply every op to every pair" until nothing changes
    let c6 = MvAlgebra::chain(6).unwrap();
    for k in 0..=6 {
        let g = MvElement::chain(k, 6);
        let mut set: BTreeSet<MvElement> = [c6.zero(), g.clone()].into_iter().collect();
        loop {
            let mut next = set.clone();
            for x in &set {
                next.insert(c6.neg(x).unwrap());
                for y in &set {
                    next.insert(c6.oplus(x, y).unwrap());
                }
            }
            if next == set {
                break;
            }
            set = next;
        }
        assert_eq!(closure(&c6, &[g], 100).unwrap(), set);
    }
}

#[test]
fn homomorphism_checks() {
    let c3 = MvAlgebra::chain(3).unwrap();
    assert!(
        check_homomorphism(&Homomorphism::identity(&c3), None)
            .unwrap()
            .pass
    );
    let c2 = MvAlgebra::chain(2).unwrap();
    let zero = c2.zero();
    let constant = Homomorphism::from_fn(&c2, &c2, "zero", move |_| Ok(zero.clone()));
    assert!(!check_homomorphism(&constant, None).unwrap().pass);
    let a = k3();
    let (q, pi) = quotient(&a, &radical(&a).unwrap()).unwrap();
    let samples = a.sample_elements(3);
    assert!(check_homomorphism(&pi, Some(&samples)).unwrap().pass);
    assert_eq!(
        q.enumerate().unwrap(),
        vec![lex(&[0, 0]), lex(&[1, 0]), lex(&[2, 0])]
    );
}

fn all_corpus_like() -> Vec<MvAlgebra> {
    vec![
        MvAlgebra::chain(1).unwrap(),
        MvAlgebra::chain(5).unwrap(),
        MvAlgebra::product(vec![
            MvAlgebra::chain(1).unwrap(),
            MvAlgebra::chain(3).unwrap(),
        ])
        .unwrap(),
        k3(),
        MvAlgebra::gamma_lex(1, vec![1, 1]).unwrap(),
        MvAlgebra::gamma_lex(1, vec![2]).unwrap(),
    ]
}

#[test]
fn distance_zero_iff_equal() {
    for a in all_corpus_like() {
        let xs = a.sample_elements(2);
        for x in &xs {
            for y in &xs {
                assert_eq!(a.dist(x, y).unwrap() == a.zero(), x == y, "{a}: d({x},{y})");
            }
        }
    }
}

#[test]
fn lattice_ops_match_order() {
    for a in all_corpus_like() {
        let xs = a.sample_elements(2);
        for x in &xs {
            for y in &xs {
                let j = a.join(x, y).unwrap();
                let m = a.meet(x, y).unwrap();
                assert!(a.le(x, &j).unwrap() && a.le(y, &j).unwrap());
                assert!(a.le(&m, x).unwrap() && a.le(&m, y).unwrap());
                for z in &xs {
                    if a.le(x, z).unwrap() && a.le(y, z).unwrap() {
                        assert!(a.le(&j, z).unwrap());
                    }
                    if a.le(z, x).unwrap() && a.le(z, y).unwrap() {
                        assert!(a.le(z, &m).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn quotient_ops_ignore_representatives() {
    let a = k3();
    let (q, _) = quotient(&a, &radical(&a).unwrap()).unwrap();
    let reps = a.sample_elements(3);
    for x in &reps {
        for y in &reps {
            let direct = q
                .oplus(&q.canonicalize(x).unwrap(), &q.canonicalize(y).unwrap())
                .unwrap();
            assert_eq!(q.canonicalize(&a.oplus(x, y).unwrap()).unwrap(), direct);
        }
    }
}

proptest! {
    #[test]
    fn gamma_mv_equations(h1 in 0i64..=2, t1 in -20i64..20, h2 in 0i64..=2, t2 in -20i64..20, h3 in 0i64..=2, t3 in -20i64..20) {
        let a = k3();
        let fix = |h: i64, t: i64| if h == 0 { lex(&[0, t.abs()]) } else if h == 2 { lex(&[2, -t.abs()]) } else { lex(&[1, t]) };
        let (x, y, z) = (fix(h1, t1), fix(h2, t2), fix(h3, t3));
        prop_assert_eq!(a.oplus(&a.oplus(&x, &y).unwrap(), &z).unwrap(), a.oplus(&x, &a.oplus(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(a.oplus(&x, &y).unwrap(), a.oplus(&y, &x).unwrap());
        prop_assert_eq!(a.oplus(&x, &a.zero()).unwrap(), x.clone());
        prop_assert_eq!(a.neg(&a.neg(&x).unwrap()).unwrap(), x.clone());
        prop_assert_eq!(a.oplus(&x, &a.one()).unwrap(), a.one());
        let l = a.oplus(&a.neg(&a.oplus(&a.neg(&x).unwrap(), &y).unwrap()).unwrap(), &y).unwrap();
        let r = a.oplus(&a.neg(&a.oplus(&a.neg(&y).unwrap(), &x).unwrap()).unwrap(), &x).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn chain_ops_are_exact(n in 1u32..30, k in 0i64..30, m in 0i64..30) {
        let a = MvAlgebra::chain(n).unwrap();
        let (k, m) = (k % (n as i64 + 1), m % (n as i64 + 1));
        let x = MvElement::chain(k, n as i64);
        let y = MvElement::chain(m, n as i64);
        prop_assert_eq!(a.oplus(&x, &y).unwrap(), MvElement::chain((k + m).min(n as i64), n as i64));
        prop_assert_eq!(a.odot(&x, &y).unwrap(), MvElement::chain((k + m - n as i64).max(0), n as i64));
    }
}
