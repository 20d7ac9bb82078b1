use std::collections::BTreeSet;

use mvsheaf_core::algebra::{DefaultPredicate, MvAlgebra, MvElement};
use mvsheaf_core::spectra::{
    classify, enumerate_ideals, f_i_isomorphism, ideal_elements, is_ideal_set,
    is_locally_retractive, is_prime, lex_view, maximal_ideals, mvlthm_criterion, o_p,
    o_p_by_annihilators, o_p_by_minimal_primes, prime_ideals, quotient, radical, retraction_search,
    same_ideal, subdirect_embedding, zero_ideal, Ideal, RetractionOutcome,
};
use mvsheaf_core::{MvError, Rational};

fn chain(n: u32) -> MvAlgebra {
    MvAlgebra::chain(n).unwrap()
}

fn prod(fs: Vec<MvAlgebra>) -> MvAlgebra {
    MvAlgebra::product(fs).unwrap()
}

fn k3() -> MvAlgebra {
    MvAlgebra::gamma_lex(2, vec![1]).unwrap()
}

fn cofinite_parity() -> MvAlgebra {
    MvAlgebra::cofinite(k3(), DefaultPredicate::TailParity).unwrap()
}

/// Every downward closed, ⊕-closed subset containing 0, by subset enumeration.
fn brute_ideals(a: &MvAlgebra) -> BTreeSet<BTreeSet<MvElement>> {
    let elems = a.enumerate().unwrap();
    assert!(elems.len() <= 16);
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << elems.len()) {
        let set: BTreeSet<MvElement> = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, x)| x.clone())
            .collect();
        if is_ideal_set(a, &set).unwrap() {
            out.insert(set);
        }
    }
    out
}

fn finite_samples() -> Vec<MvAlgebra> {
    vec![
        chain(1),
        chain(3),
        prod(vec![chain(1), chain(2)]),
        prod(vec![chain(1), chain(3)]),
        prod(vec![chain(1), chain(1), chain(1)]),
        prod(vec![chain(2), chain(2)]),
    ]
}

#[test]
fn ideal_enumeration_matches_subset_oracle() {
    for a in finite_samples() {
        let ours: BTreeSet<BTreeSet<MvElement>> = enumerate_ideals(&a)
            .unwrap()
            .iter()
            .map(|i| ideal_elements(&a, i).unwrap())
            .collect();
        assert_eq!(ours, brute_ideals(&a), "{a}");
    }
}

#[test]
fn ideal_counts() {
    assert_eq!(enumerate_ideals(&chain(3)).unwrap().len(), 2);
    assert_eq!(
        enumerate_ideals(&prod(vec![chain(1), chain(2)]))
            .unwrap()
            .len(),
        4
    );
    let k = enumerate_ideals(&k3()).unwrap();
    assert_eq!(
        k.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        vec!["zero", "tail[1]", "full"]
    );
}

#[test]
fn gamma_ideals_are_downward_and_sum_closed_on_samples() {
    for a in [
        k3(),
        MvAlgebra::gamma_lex(1, vec![1, 1]).unwrap(),
        MvAlgebra::gamma_lex(1, vec![2]).unwrap(),
    ] {
        let xs = a.sample_elements(2);
        for i in enumerate_ideals(&a).unwrap() {
            assert!(i.contains(&a.zero()));
            for x in xs.iter().filter(|x| i.contains(x)) {
                for y in &xs {
                    if a.le(y, x).unwrap() {
                        assert!(i.contains(y), "{a}: {i} not downward closed at {y} ≤ {x}");
                    }
                    if i.contains(y) {
                        assert!(i.contains(&a.oplus(x, y).unwrap()));
                    }
                }
            }
        }
    }
}

#[test]
fn zero_of_boolean_square_is_not_prime() {
    let a = prod(vec![chain(1), chain(1)]);
    assert!(!is_prime(&a, &zero_ideal(&a)).unwrap());
}

#[test]
fn chain_ideals_are_prime() {
    let a = k3();
    for i in enumerate_ideals(&a).unwrap() {
        if i != Ideal::full() {
            assert!(is_prime(&a, &i).unwrap(), "{i}");
        }
    }
}

/// Primality by the ∧-test, as an oracle for structural primality.
fn prime_oracle(a: &MvAlgebra, i: &Ideal) -> bool {
    let xs = a.sample_elements(2);
    if i.contains(&a.one()) {
        return false;
    }
    for x in &xs {
        for y in &xs {
            if i.contains(&a.meet(x, y).unwrap()) && !i.contains(x) && !i.contains(y) {
                return false;
            }
        }
    }
    true
}

#[test]
fn structural_primality_matches_meet_test() {
    for a in [
        MvAlgebra::gamma_lex(1, vec![1, 1]).unwrap(),
        MvAlgebra::gamma_lex(1, vec![2]).unwrap(),
        k3(),
    ] {
        for i in enumerate_ideals(&a).unwrap() {
            assert_eq!(is_prime(&a, &i).unwrap(), prime_oracle(&a, &i), "{a} {i}");
        }
    }
}

#[test]
fn o_p_characterizations_agree_and_are_primary() {
    for a in finite_samples() {
        for p in prime_ideals(&a).unwrap() {
            let first = o_p_by_minimal_primes(&a, &p).unwrap();
            let second = o_p_by_annihilators(&a, &p).unwrap();
            assert_eq!(first, second, "{a} {p}");
            let (q, _) = quotient(&a, &first).unwrap();
            assert_eq!(maximal_ideals(&q).unwrap().len(), 1);
        }
    }
}

#[test]
fn o_p_examples() {
    let a = prod(vec![chain(1), chain(3)]);
    let m1: BTreeSet<MvElement> = a
        .enumerate()
        .unwrap()
        .into_iter()
        .filter(|x| matches!(x, MvElement::Tuple(v) if v[0] == MvElement::chain(0, 1)))
        .collect();
    let m1 = Ideal::explicit(m1);
    assert_eq!(o_p(&a, &m1).unwrap(), m1);

    let k = k3();
    let m = maximal_ideals(&k).unwrap().remove(0);
    assert_eq!(o_p(&k, &m).unwrap(), Ideal::tail([]));

    let b = prod(vec![chain(1), chain(1), chain(1)]);
    for p in prime_ideals(&b).unwrap() {
        assert_eq!(o_p(&b, &p).unwrap(), p);
    }
}

#[test]
fn radical_three_ways() {
    for a in finite_samples() {
        let rad = radical(&a).unwrap();
        let zero = zero_ideal(&a);
        assert!(
            same_ideal(&a, &rad, &zero).unwrap(),
            "finite algebras are semisimple: {a}"
        );
        // kernel of the map to [0,1]^Max: elements that vanish modulo every maximal ideal
        let maxes = maximal_ideals(&a).unwrap();
        let kernel: BTreeSet<MvElement> = a
            .enumerate()
            .unwrap()
            .into_iter()
            .filter(|x| maxes.iter().all(|m| m.contains(x)))
            .collect();
        assert_eq!(kernel, ideal_elements(&a, &rad).unwrap());
    }
    assert_eq!(radical(&k3()).unwrap(), Ideal::tail([1]));
}

#[test]
fn quotient_examples() {
    let k = k3();
    let (q, _) = quotient(&k, &radical(&k).unwrap()).unwrap();
    assert_eq!(lex_view(&q).unwrap().target, chain(2));

    let a = prod(vec![chain(1), chain(3)]);
    let (q0, pi) = quotient(&a, &zero_ideal(&a)).unwrap();
    for x in a.enumerate().unwrap() {
        assert_eq!(pi.image(&x).unwrap(), x);
    }
    assert_eq!(q0.cardinality(), Some(8));

    let ms = maximal_ideals(&a).unwrap();
    let m1 = ms
        .iter()
        .find(|m| {
            m.contains(&MvElement::Tuple(vec![
                MvElement::chain(0, 1),
                MvElement::chain(1, 1),
            ]))
        })
        .unwrap();
    let (q1, _) = quotient(&a, m1).unwrap();
    assert_eq!(lex_view(&q1).unwrap().target, chain(1));

    assert!(matches!(
        quotient(&k, &Ideal::full()),
        Err(MvError::TrivialQuotient)
    ));
}

#[test]
fn retraction_examples() {
    let k = k3();
    match retraction_search(&k, &radical(&k).unwrap()).unwrap() {
        RetractionOutcome::Found(j) => {
            let (q, pi) = quotient(&k, &radical(&k).unwrap()).unwrap();
            for x in q.enumerate().unwrap() {
                let y = j.image(&x).unwrap();
                assert_eq!(y, x, "section is h ↦ (h,0)");
                assert_eq!(pi.image(&y).unwrap(), x);
            }
        }
        RetractionOutcome::Absent(c) => panic!("unexpected absence {c:?}"),
    }
    let a = prod(vec![chain(1), chain(3)]);
    assert!(retraction_search(&a, &zero_ideal(&a)).unwrap().is_found());

    match retraction_search(&cofinite_parity(), &radical(&cofinite_parity()).unwrap()).unwrap() {
        RetractionOutcome::Absent(c) => {
            assert!(c
                .steps
                .iter()
                .any(|s| s.contains("(1,0)") && s.contains("not admissible")));
        }
        RetractionOutcome::Found(_) => panic!("the cofinite parity radical must not be retractive"),
    }

    let any = MvAlgebra::cofinite(k3(), DefaultPredicate::Any).unwrap();
    assert!(retraction_search(&any, &radical(&any).unwrap())
        .unwrap()
        .is_found());
}

/// Oracle: search every map from generators of `A/I` into `A` directly.
#[test]
fn finite_retraction_search_matches_brute_force() {
    for a in finite_samples() {
        for i in enumerate_ideals(&a).unwrap() {
            if i.contains(&a.one()) {
                continue;
            }
            let (q, pi) = quotient(&a, &i).unwrap();
            let qs = q.enumerate().unwrap();
            let elems = a.enumerate().unwrap();
            // all maps q -> a with pi∘j = id, exhaustively if small
            let choices: Vec<Vec<MvElement>> = qs
                .iter()
                .map(|x| {
                    elems
                        .iter()
                        .filter(|y| pi.image(y).unwrap() == *x)
                        .cloned()
                        .collect()
                })
                .collect();
            let total: usize = choices.iter().map(|c| c.len()).product();
            if total > 20_000 {
                continue;
            }
            let mut found = false;
            let mut idx = vec![0usize; qs.len()];
            'outer: loop {
                let j = |x: &MvElement| {
                    choices[qs.iter().position(|z| z == x).unwrap()]
                        [idx[qs.iter().position(|z| z == x).unwrap()]]
                    .clone()
                };
                let mut ok = true;
                for x in &qs {
                    if j(&q.neg(x).unwrap()) != a.neg(&j(x)).unwrap() {
                        ok = false;
                    }
                    for y in &qs {
                        if j(&q.oplus(x, y).unwrap()) != a.oplus(&j(x), &j(y)).unwrap() {
                            ok = false;
                        }
                    }
                }
                if ok {
                    found = true;
                    break;
                }
                for k in 0..idx.len() {
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        continue 'outer;
                    }
                    idx[k] = 0;
                }
                break;
            }
            assert_eq!(
                retraction_search(&a, &i).unwrap().is_found(),
                found,
                "{a} over {i}"
            );
        }
    }
}

#[test]
fn local_retractivity() {
    for a in finite_samples() {
        assert!(is_locally_retractive(&a).unwrap().verdict, "{a}");
    }
    assert!(is_locally_retractive(&k3()).unwrap().verdict);
    let r = is_locally_retractive(&cofinite_parity()).unwrap();
    assert!(r.verdict);
    assert_eq!(r.per_max.len(), 4);
}

#[test]
fn mvlthm_cross_check() {
    let k = mvlthm_criterion(&k3()).unwrap();
    assert!(k.criterion && k.retraction_exists && k.agree);
    for a in finite_samples() {
        let r = mvlthm_criterion(&a).unwrap();
        assert!(r.criterion && r.agree, "{a}");
    }
    let e = mvlthm_criterion(&cofinite_parity()).unwrap();
    assert!(!e.criterion && !e.retraction_exists && e.agree);
}

#[test]
fn subdirect_examples() {
    let a = prod(vec![chain(1), chain(3)]);
    let r = subdirect_embedding(&a).unwrap();
    assert_eq!(r.coordinates, 2);
    assert_eq!(r.surjective, Some(true));
    assert!(r.injective_on_checked);
    let k = subdirect_embedding(&k3()).unwrap();
    assert_eq!(k.coordinates, 1);
    let e = subdirect_embedding(&cofinite_parity()).unwrap();
    assert!(e.injective_on_checked);
    assert_eq!(e.surjective, Some(false));
    assert!(e.non_surjectivity_witness.unwrap().contains("(1,0)"));
}

#[test]
fn classification_of_k3_radical() {
    let k = k3();
    let f = classify(&k, &radical(&k).unwrap()).unwrap();
    assert!(f.prime && f.maximal && f.primary && f.retractive && f.lexicographic);
    let z = classify(&k, &Ideal::tail([])).unwrap();
    assert!(z.prime && !z.lexicographic && !z.maximal);
}

#[test]
fn f_i_examples() {
    let k = k3();
    let (f, report) = f_i_isomorphism(&k, &radical(&k).unwrap()).unwrap();
    assert!(report.pass(), "{:?}", report.failures);
    let (e, t) = f.epsilon_tau(&MvElement::lex(&[1, 3])).unwrap();
    assert_eq!(
        f.s(&MvElement::lex(&[1, 3])).unwrap(),
        MvElement::lex(&[1, 0])
    );
    assert_eq!((e, t), (MvElement::lex(&[0, 3]), MvElement::lex(&[0, 0])));
    let (h, g) = f.components(&MvElement::lex(&[1, 3])).unwrap();
    assert_eq!((h, g.0), (Rational::new(1, 2), vec![3]));
    let (h, g) = f.components(&k.zero()).unwrap();
    assert_eq!((h, g.0), (Rational::ZERO, vec![0]));
    let (e, t) = f.epsilon_tau(&MvElement::lex(&[2, -4])).unwrap();
    assert_eq!((e, t), (MvElement::lex(&[0, 0]), MvElement::lex(&[0, 4])));
    let (h, g) = f.components(&MvElement::lex(&[2, -4])).unwrap();
    assert_eq!((h, g.0), (Rational::ONE, vec![-4]));

    let z = f_i_isomorphism(&k, &Ideal::tail([]));
    assert!(matches!(z, Err(MvError::NotLexicographic { ref axiom }) if axiom == "LMV1"));
}

#[test]
fn f_i_on_two_step_gamma() {
    let a = MvAlgebra::gamma_lex(1, vec![1, 1]).unwrap();
    for i in [Ideal::tail([2]), Ideal::tail([1, 2])] {
        let (_, report) = f_i_isomorphism(&a, &i).unwrap();
        assert!(report.pass(), "{i}: {:?}", report.failures);
    }
}
