use std::collections::BTreeSet;

use mvsheaf_core::algebra::{DefaultPredicate, MvAlgebra, MvElement};
use mvsheaf_core::spectra::{maximal_ideals, radical};
use mvsheaf_core::topology::{
    additive_subcovering, check_map, compactness, generate_topology, is_additive_covering,
    is_covering, is_hausdorff, mv_spectrum, verify_topology, zariski_max, FuzzySet, MvSpaceMap,
    MvTopology,
};
use mvsheaf_core::Rational;
use proptest::prelude::*;

fn fs(d: u32, v: &[u32]) -> FuzzySet {
    FuzzySet::new(d, v.to_vec()).unwrap()
}

fn pts(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn chain(n: u32) -> MvAlgebra {
    MvAlgebra::chain(n).unwrap()
}

fn k3() -> MvAlgebra {
    MvAlgebra::gamma_lex(2, vec![1]).unwrap()
}

/// Closure axioms evaluated directly on a set of numerator vectors.
fn axioms_hold(d: u32, opens: &BTreeSet<Vec<u32>>, n: usize) -> bool {
    if !opens.contains(&vec![0; n]) || !opens.contains(&vec![d; n]) {
        return false;
    }
    for a in opens {
        for b in opens {
            let ops: [fn(u32, u32, u32) -> u32; 4] = [
                |x, y, _| x.max(y),
                |x, y, _| x.min(y),
                |x, y, d| (x + y).min(d),
                |x, y, d| (x + y).saturating_sub(d),
            ];
            for op in ops {
                let c: Vec<u32> = a.iter().zip(b).map(|(&x, &y)| op(x, y, d)).collect();
                if !opens.contains(&c) {
                    return false;
                }
            }
        }
    }
    true
}

/// Least topology containing `base`, found by scanning every family of fuzzy sets.
fn brute_generated(d: u32, n: usize, base: &[Vec<u32>]) -> BTreeSet<Vec<u32>> {
    let mut universe = vec![vec![]];
    for _ in 0..n {
        universe = universe
            .into_iter()
            .flat_map(|v: Vec<u32>| (0..=d).map(move |k| [v.clone(), vec![k]].concat()))
            .collect();
    }
    assert!(universe.len() <= 16);
    let mut best: Option<BTreeSet<Vec<u32>>> = None;
    for mask in 0u32..(1 << universe.len()) {
        let set: BTreeSet<Vec<u32>> = (0..universe.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| universe[i].clone())
            .collect();
        if base.iter().all(|b| set.contains(b)) && axioms_hold(d, &set, n) {
            best = match best {
                Some(b) if b.len() <= set.len() => Some(b),
                _ => Some(set),
            };
        }
    }
    best.unwrap()
}

#[test]
fn indiscrete_and_full_topologies_verify() {
    for n in 1..=3 {
        assert!(verify_topology(&MvTopology::indiscrete(pts(n), 2)).pass);
    }
    let full = MvTopology::full(pts(2), 3);
    assert_eq!(full.opens.len(), 16);
    let r = verify_topology(&full);
    assert!(r.pass && r.violations.is_empty() && r.dual_violations.is_empty());
}

#[test]
fn half_point_family_is_not_a_topology() {
    let t = MvTopology::from_opens(pts(2), 2, [fs(2, &[0, 0]), fs(2, &[2, 2]), fs(2, &[1, 0])])
        .unwrap();
    let r = verify_topology(&t);
    assert!(!r.pass);
    assert!(r
        .violations
        .iter()
        .any(|v| v.axiom == "closed under ⊕" && v.result == fs(2, &[2, 0])));

    let c = MvTopology::from_opens(pts(1), 2, [fs(2, &[0]), fs(2, &[2]), fs(2, &[1])]).unwrap();
    assert!(verify_topology(&c).pass);
}

#[test]
fn generation_examples() {
    let t = generate_topology(pts(3), 4, &[]).unwrap();
    assert_eq!(t.opens, [fs(4, &[0, 0, 0]), fs(4, &[4, 4, 4])].into());

    let a = MvAlgebra::product(vec![chain(1), chain(1)]).unwrap();
    let spec = mv_spectrum(&a).unwrap();
    assert_eq!(spec.denom, 1);
    assert_eq!(spec.topology.opens, MvTopology::full(pts(2), 1).opens);

    let spec = mv_spectrum(&chain(2)).unwrap();
    assert_eq!(
        spec.topology.opens,
        [fs(2, &[0]), fs(2, &[1]), fs(2, &[2])].into()
    );
}

#[test]
fn generation_matches_least_topology_oracle() {
    let cases: Vec<(u32, usize, Vec<Vec<u32>>)> = vec![
        (2, 2, vec![vec![1, 0]]),
        (3, 2, vec![vec![1, 2]]),
        (1, 3, vec![vec![1, 0, 0], vec![0, 1, 1]]),
        (2, 2, vec![vec![1, 1]]),
        (3, 2, vec![vec![2, 0], vec![0, 1]]),
        (2, 2, vec![vec![0, 2]]),
    ];
    for (d, n, base) in cases {
        let sets: Vec<FuzzySet> = base.iter().map(|b| fs(d, b)).collect();
        let t = generate_topology(pts(n), d, &sets).unwrap();
        let got: BTreeSet<Vec<u32>> = t.opens.iter().map(|o| o.numerators().to_vec()).collect();
        assert_eq!(got, brute_generated(d, n, &base), "d={d} base={base:?}");
    }
}

fn arb_sets(n: usize, d: u32, max: usize) -> impl Strategy<Value = Vec<FuzzySet>> {
    prop::collection::vec(prop::collection::vec(0..=d, n), 0..=max).prop_map(move |vs| {
        vs.into_iter()
            .map(|v| FuzzySet::new(d, v).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_topologies_verify_and_are_idempotent(base in arb_sets(3, 3, 3)) {
        let t = generate_topology(pts(3), 3, &base).unwrap();
        prop_assert!(verify_topology(&t).pass);
        let again = generate_topology(pts(3), 3, &t.opens.iter().cloned().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(&again.opens, &t.opens);
        for o in &t.opens {
            for p in &t.opens {
                let u: BTreeSet<usize> = o.support().union(&p.support()).copied().collect();
                let i: BTreeSet<usize> = o.support().intersection(&p.support()).copied().collect();
                prop_assert_eq!(o.join(p).support(), u);
                prop_assert_eq!(o.meet(p).support(), i);
            }
        }
    }

    #[test]
    fn preimage_is_a_homomorphism(
        f in prop::collection::vec(0usize..3, 4),
        a in prop::collection::vec(0u32..=4, 3),
        b in prop::collection::vec(0u32..=4, 3),
    ) {
        let m = MvSpaceMap::new(MvTopology::indiscrete(pts(4), 4), MvTopology::indiscrete(pts(3), 4), f).unwrap();
        let (a, b) = (fs(4, &a), fs(4, &b));
        prop_assert_eq!(m.preimage(&a.oplus(&b)), m.preimage(&a).oplus(&m.preimage(&b)));
        prop_assert_eq!(m.preimage(&a.neg()), m.preimage(&a).neg());
    }

    #[test]
    fn continuity_on_a_base_decides_continuity(
        f in prop::collection::vec(0usize..2, 3),
        base_y in arb_sets(2, 2, 2),
        base_x in arb_sets(3, 2, 2),
    ) {
        let ty = generate_topology(pts(2), 2, &base_y).unwrap();
        let tx = generate_topology(pts(3), 2, &base_x).unwrap();
        let m = MvSpaceMap::new(tx, ty, f).unwrap();
        let flags = check_map(&m, Some(&base_y));
        prop_assert_eq!(flags.continuous_on_base, Some(flags.continuous));
    }
}

#[test]
fn preimage_and_image_examples() {
    let y = MvTopology::indiscrete(pts(3), 4);
    let x = MvTopology::indiscrete(pts(2), 4);
    let constant = MvSpaceMap::new(x.clone(), y.clone(), vec![1, 1]).unwrap();
    assert_eq!(constant.preimage(&fs(4, &[0, 3, 4])), fs(4, &[3, 3]));
    assert_eq!(constant.image(&x.one()), fs(4, &[0, 4, 0]));

    let collapse = MvSpaceMap::new(
        MvTopology::indiscrete(pts(2), 2),
        MvTopology::indiscrete(pts(1), 2),
        vec![0, 0],
    )
    .unwrap();
    assert_eq!(
        collapse.image(&fs(2, &[1, 2])).value(0),
        Rational::integer(1)
    );
}

#[test]
fn map_flag_examples() {
    let t = generate_topology(pts(2), 2, &[fs(2, &[1, 2])]).unwrap();
    let flags = check_map(&MvSpaceMap::identity(t.clone()), None);
    assert!(flags.continuous && flags.open && flags.closed && flags.homeomorphism);

    let into_indiscrete =
        MvSpaceMap::new(t.clone(), MvTopology::indiscrete(pts(1), 2), vec![0, 0]).unwrap();
    assert!(check_map(&into_indiscrete, None).continuous);

    // A one-point subspace with the indiscrete topology cannot see the value 1/2.
    let point = MvTopology::indiscrete(pts(1), 2);
    let inclusion = MvSpaceMap::new(point, t.clone(), vec![0]).unwrap();
    let expected = t.opens.iter().all(|o| {
        let v = o.numerators()[0];
        v == 0 || v == 2
    });
    let flags = check_map(&inclusion, Some(&[fs(2, &[1, 2])]));
    assert!(!expected);
    assert_eq!(flags.continuous, expected);
    assert_eq!(flags.continuous_on_base, Some(false));
}

#[test]
fn covering_examples() {
    let t = MvTopology::full(pts(2), 2);
    let alpha = fs(2, &[2, 1]);
    let beta = fs(2, &[1, 2]);
    assert!(is_covering(&t, &[alpha.clone(), beta.clone()]));
    assert!(is_additive_covering(
        &t,
        &[(alpha.clone(), 1), (beta.clone(), 1)]
    ));
    assert!(!is_covering(&t, std::slice::from_ref(&alpha)));
    assert!(!is_covering(&t, &[fs(2, &[1, 1])]));
    assert!(is_additive_covering(&t, &[(fs(2, &[1, 1]), 2)]));
    let sub = additive_subcovering(&t, &[alpha, beta]).unwrap();
    assert!(is_additive_covering(&t, &sub));
    assert_eq!(sub.iter().map(|(_, n)| n).sum::<u32>(), 2);
}

#[test]
fn finite_spaces_are_compact() {
    for t in [
        MvTopology::full(pts(2), 2),
        MvTopology::indiscrete(pts(3), 3),
        generate_topology(pts(3), 2, &[fs(2, &[2, 1, 0]), fs(2, &[0, 1, 2])]).unwrap(),
    ] {
        let r = compactness(&t);
        assert!(r.compact && r.strongly_compact && r.exhaustive, "{r:?}");
        assert!(r.coverings_examined >= 1);
    }
}

#[test]
fn hausdorff_examples() {
    assert!(is_hausdorff(&MvTopology::full(pts(2), 1)));
    assert!(!is_hausdorff(&MvTopology::indiscrete(pts(2), 1)));
    assert!(is_hausdorff(&MvTopology::indiscrete(pts(1), 1)));
    let fuzzy = generate_topology(pts(2), 2, &[fs(2, &[2, 1]), fs(2, &[1, 2])]).unwrap();
    let crisp_separated = fuzzy.opens.iter().any(|o| o.numerators() == [2, 0]);
    assert_eq!(is_hausdorff(&fuzzy), crisp_separated);
}

#[test]
fn zariski_on_a_product_of_chains() {
    let a = MvAlgebra::product(vec![chain(1), chain(3)]).unwrap();
    let z = zariski_max(&a).unwrap();
    assert_eq!(z.max.len(), 2);
    for (x, r) in &z.basis {
        let MvElement::Tuple(c) = x else { panic!() };
        let brute: BTreeSet<usize> = (0..2).filter(|&i| !z.max[i].contains(x)).collect();
        assert_eq!(r, &brute);
        let nonzero: BTreeSet<usize> = (0..2)
            .filter(|&i| c[i] != MvElement::Chain(Rational::integer(0)))
            .collect();
        assert_eq!(r.len(), nonzero.len());
    }
    assert!(z.lemma_identities && z.r_one_is_everything && z.compact && z.hausdorff);
    assert_eq!(z.topology.opens.len(), 4);
}

#[test]
fn zariski_on_k3_is_a_point() {
    let z = zariski_max(&k3()).unwrap();
    assert_eq!(z.max.len(), 1);
    assert_eq!(z.topology.opens, [fs(1, &[0]), fs(1, &[1])].into());
    assert!(z.lemma_identities && z.r_one_is_everything && z.compact && z.hausdorff);
}

#[test]
fn spectrum_of_a_product_uses_coordinates() {
    let a = MvAlgebra::product(vec![chain(1), chain(3)]).unwrap();
    let s = mv_spectrum(&a).unwrap();
    assert_eq!(s.denom, 3);
    let max = maximal_ideals(&a).unwrap();
    for (x, hat) in &s.iota {
        let MvElement::Tuple(c) = x else { panic!() };
        for (i, m) in max.iter().enumerate() {
            // The coordinate that survives modulo M is the one M does not kill.
            let k = (0..2).find(|&k| !m.contains(&unit_at(k))).unwrap();
            let MvElement::Chain(v) = &c[k] else { panic!() };
            assert_eq!(hat.value(i), *v);
        }
    }
    assert!(s.support_is_r && s.zariski_coarser && s.kernel_is_radical && s.h_is_open);
    assert!(verify_topology(&s.topology).pass);
}

fn unit_at(k: usize) -> MvElement {
    let mut v = vec![MvElement::Chain(Rational::integer(0)); 2];
    v[k] = MvElement::Chain(Rational::integer(1));
    MvElement::Tuple(v)
}

#[test]
fn radical_elements_vanish_in_the_spectrum() {
    for a in [k3(), MvAlgebra::product(vec![k3(), chain(2)]).unwrap()] {
        let s = mv_spectrum(&a).unwrap();
        let rad = radical(&a).unwrap();
        for (x, hat) in &s.iota {
            if rad.contains(x) {
                assert!(hat.is_zero(), "{x}");
            }
        }
        assert!(s.support_is_r && s.zariski_coarser && s.kernel_is_radical && s.h_is_open);
    }
}

#[test]
fn cofinite_spectrum_checks() {
    let a = MvAlgebra::cofinite(k3(), DefaultPredicate::TailParity).unwrap();
    let s = mv_spectrum(&a).unwrap();
    assert_eq!(s.max.len(), 4);
    assert_eq!(s.denom, 2);
    assert!(
        s.support_is_r && s.zariski_coarser && s.kernel_is_radical && s.h_is_open,
        "{:?}",
        s.h_failures
    );
    assert!(verify_topology(&s.topology).pass);
}
