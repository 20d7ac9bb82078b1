use std::collections::{BTreeMap, BTreeSet};

use mvsheaf_core::ell_groups::LexGroup;
use mvsheaf_core::intmat::IntMat;
use mvsheaf_core::sheaf::{
    check_presheaf, check_sheaf, check_sheaf_space, constant_presheaf, continuous_maps_presheaf,
    glue, stalk_at, Arrow, Carrier, Presheaf, Section, SheafSpace, DEFAULT_OPEN_CAP,
};
use mvsheaf_core::topology::{generate_topology, FuzzySet, MvTopology};
use mvsheaf_core::{MvAlgebra, MvError};
use proptest::prelude::*;

fn fs(d: u32, v: &[u32]) -> FuzzySet {
    FuzzySet::new(d, v.to_vec()).unwrap()
}

fn pts(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn labels(n: usize) -> Carrier {
    Carrier::Set((0..n).map(|i| format!("s{i}")).collect())
}

/// Separation and gluing over every family of opens joining to each open.
fn brute_sheaf(f: &Presheaf) -> (bool, bool) {
    let n = f.opens.len();
    assert!(n <= 12);
    let (mut sep, mut glu) = (true, true);
    for a in 0..n {
        let below: Vec<usize> = (0..n).filter(|&j| f.opens[j].le(&f.opens[a])).collect();
        for mask in 1u32..(1 << below.len()) {
            let cover: Vec<usize> = (0..below.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| below[i])
                .collect();
            let join = cover.iter().fold(
                FuzzySet::zero(f.topology.len(), f.topology.denom),
                |acc, &c| acc.join(&f.opens[c]),
            );
            if join != f.opens[a] {
                continue;
            }
            let size = |i: usize| f.carriers[i].size().unwrap();
            let image = |s: usize| -> Vec<Section> {
                cover
                    .iter()
                    .map(|&c| f.restrict(a, c, &Section::Index(s)))
                    .collect()
            };
            let images: Vec<Vec<Section>> = (0..size(a)).map(image).collect();
            let distinct: BTreeSet<&Vec<Section>> = images.iter().collect();
            sep &= distinct.len() == images.len();
            let mut families: Vec<Vec<usize>> = vec![vec![]];
            for &c in &cover {
                families = families
                    .into_iter()
                    .flat_map(|fam| (0..size(c)).map(move |s| [fam.clone(), vec![s]].concat()))
                    .collect();
            }
            for fam in families {
                let compatible = (0..cover.len()).all(|i| {
                    (0..cover.len()).all(|j| {
                        let m = f
                            .index_of(&f.opens[cover[i]].meet(&f.opens[cover[j]]))
                            .unwrap();
                        f.restrict(cover[i], m, &Section::Index(fam[i]))
                            == f.restrict(cover[j], m, &Section::Index(fam[j]))
                    })
                });
                let as_sections: Vec<Section> = fam.iter().map(|&s| Section::Index(s)).collect();
                if compatible && !distinct.contains(&as_sections) {
                    glu = false;
                }
            }
        }
    }
    (sep, glu)
}

fn two_point_fuzzy() -> MvTopology {
    generate_topology(pts(2), 2, &[fs(2, &[2, 1])]).unwrap()
}

#[test]
fn constant_presheaf_is_a_presheaf_with_constant_stalks() {
    let a = MvAlgebra::chain(2).unwrap();
    let f = constant_presheaf(two_point_fuzzy(), Carrier::algebra(&a).unwrap()).unwrap();
    let r = check_presheaf(&f).unwrap();
    assert!(r.pass, "{:?}", r.violations);
    assert!(r.triples_checked > 0);
    for x in 0..2 {
        let st = stalk_at(&f, x).unwrap();
        assert_eq!(f.carriers[st.mu_index].size(), Some(3));
    }
}

#[test]
fn continuous_maps_form_a_sheaf() {
    let tx = two_point_fuzzy();
    let ty = generate_topology(pts(2), 2, &[fs(2, &[1, 2])]).unwrap();
    let f = continuous_maps_presheaf(tx, &ty).unwrap();
    assert!(check_presheaf(&f).unwrap().pass);
    let r = check_sheaf(&f, DEFAULT_OPEN_CAP).unwrap();
    assert!(r.pass, "{:?}", r.violations);
    assert_eq!(brute_sheaf(&f), (true, true));

    let crisp = MvTopology::full(pts(2), 1);
    let f = continuous_maps_presheaf(crisp.clone(), &crisp).unwrap();
    assert!(check_sheaf(&f, DEFAULT_OPEN_CAP).unwrap().pass);
    assert_eq!(brute_sheaf(&f), (true, true));
    // Every map out of a discrete space is continuous.
    assert_eq!(
        f.carriers[f.index_of(&crisp.one()).unwrap()].size(),
        Some(4)
    );
}

#[test]
fn a_wrong_restriction_is_caught_with_its_triple() {
    let t = MvTopology::full(pts(2), 1);
    let mut f = constant_presheaf(t, labels(2)).unwrap();
    let top = f.index_of(&fs(1, &[1, 1])).unwrap();
    let mid = f.index_of(&fs(1, &[1, 0])).unwrap();
    f.arrows.insert((top, mid), Arrow::Table(vec![1, 0]));
    let r = check_presheaf(&f).unwrap();
    assert!(!r.pass);
    let v = r
        .violations
        .iter()
        .find(|v| v.law == "composition")
        .unwrap();
    assert_eq!(v.opens.len(), 3);
}

#[test]
fn presheaves_over_the_indiscrete_topology_are_sheaves() {
    let f = constant_presheaf(MvTopology::indiscrete(pts(3), 2), labels(5)).unwrap();
    let r = check_sheaf(&f, DEFAULT_OPEN_CAP).unwrap();
    assert!(r.pass);
    assert_eq!(brute_sheaf(&f), (true, true));
}

#[test]
fn constant_presheaf_on_disjoint_opens() {
    let t = MvTopology::full(pts(2), 1);
    let f = constant_presheaf(t.clone(), labels(2)).unwrap();
    // The empty open carries the whole set, so overlaps force agreement.
    let r = check_sheaf(&f, DEFAULT_OPEN_CAP).unwrap();
    assert!(r.pass);
    assert_eq!(brute_sheaf(&f), (true, true));

    let zero = t.zero();
    let mut g = Presheaf::build(
        t,
        |o| Ok(if *o == zero { labels(1) } else { labels(2) }),
        |_, b| {
            Ok(Arrow::Table(if *b == zero {
                vec![0, 0]
            } else {
                vec![0, 1]
            }))
        },
    )
    .unwrap();
    let z = g.index_of(&zero).unwrap();
    g.arrows.insert((z, z), Arrow::Table(vec![0]));
    assert!(check_presheaf(&g).unwrap().pass);
    let r = check_sheaf(&g, DEFAULT_OPEN_CAP).unwrap();
    assert!(!r.gluing && r.separation);
    let w = r
        .violations
        .iter()
        .find(|v| v.condition == "gluing")
        .unwrap();
    assert_eq!(w.open, fs(1, &[1, 1]));
    assert_eq!(w.sections.len(), 2);
    assert_ne!(w.sections[0], w.sections[1]);
    assert_eq!(brute_sheaf(&g), (true, false));
}

#[test]
fn open_cap_is_enforced() {
    let f = constant_presheaf(MvTopology::full(pts(2), 2), labels(1)).unwrap();
    assert!(matches!(check_sheaf(&f, 4), Err(MvError::Unsupported(_))));
}

/// The directed colimit computed as classes of pairs `(α, s)` identified
/// when they agree on some smaller open around `x`.
fn brute_stalk_size(f: &Presheaf, x: usize) -> usize {
    let around: Vec<usize> = (0..f.opens.len())
        .filter(|&i| f.opens[i].support().contains(&x))
        .collect();
    let pairs: Vec<(usize, usize)> = around
        .iter()
        .flat_map(|&a| (0..f.carriers[a].size().unwrap()).map(move |s| (a, s)))
        .collect();
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..pairs.len() {
        for j in 0..pairs.len() {
            let ((a, s), (b, t)) = (pairs[i], pairs[j]);
            let agree = around.iter().any(|&c| {
                f.opens[c].le(&f.opens[a])
                    && f.opens[c].le(&f.opens[b])
                    && f.restrict(a, c, &Section::Index(s)) == f.restrict(b, c, &Section::Index(t))
            });
            if agree {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    (0..pairs.len())
        .map(|i| find(&mut parent, i))
        .collect::<BTreeSet<_>>()
        .len()
}

#[test]
fn stalks_match_the_colimit_oracle() {
    let tx = two_point_fuzzy();
    let ty = MvTopology::full(pts(2), 2);
    let f = continuous_maps_presheaf(tx, &ty).unwrap();
    for x in 0..2 {
        let st = stalk_at(&f, x).unwrap();
        assert_eq!(
            f.carriers[st.mu_index].size().unwrap(),
            brute_stalk_size(&f, x)
        );
        for a in 0..f.opens.len() {
            for b in 0..f.opens.len() {
                if f.opens[b].le(&f.opens[a]) && f.opens[b].support().contains(&x) {
                    for s in 0..f.carriers[a].size().unwrap() {
                        let s = Section::Index(s);
                        let via = f.restrict(a, b, &s);
                        assert_eq!(st.germ(&f, a, &s).unwrap(), st.germ(&f, b, &via).unwrap());
                    }
                }
            }
        }
    }
    let isolated = constant_presheaf(MvTopology::indiscrete(pts(1), 1), labels(1)).unwrap();
    assert!(stalk_at(&isolated, 0).is_ok());
}

#[test]
fn isolated_points_have_no_stalk() {
    let t = MvTopology::from_opens(pts(2), 1, [fs(1, &[0, 0]), fs(1, &[1, 0])]).unwrap();
    let f = constant_presheaf(t, labels(1)).unwrap();
    assert!(matches!(
        stalk_at(&f, 1),
        Err(MvError::IsolatedFromTopology(1))
    ));
}

fn projection_presheaf(t: MvTopology) -> Presheaf {
    Presheaf::build(
        t,
        |o| Ok(Carrier::Group(LexGroup::free(o.support().len()))),
        |a, b| {
            let sa: Vec<usize> = a.support().into_iter().collect();
            let sb: Vec<usize> = b.support().into_iter().collect();
            let rows: Vec<Vec<i64>> = sb
                .iter()
                .map(|y| sa.iter().map(|x| i64::from(x == y)).collect())
                .collect();
            Ok(Arrow::Linear(IntMat::from_rows(sa.len(), &rows)))
        },
    )
    .unwrap()
}

#[test]
fn group_valued_sheaf_of_functions() {
    let f = projection_presheaf(MvTopology::full(pts(3), 1));
    assert!(check_presheaf(&f).unwrap().pass);
    let r = check_sheaf(&f, DEFAULT_OPEN_CAP).unwrap();
    assert!(r.pass, "{:?}", r.violations);
    let top = f.index_of(&fs(1, &[1, 1, 1])).unwrap();
    let left = f.index_of(&fs(1, &[1, 1, 0])).unwrap();
    let right = f.index_of(&fs(1, &[0, 1, 1])).unwrap();
    let s = glue(
        &f,
        top,
        &[left, right],
        &[Section::Vector(vec![4, -2]), Section::Vector(vec![-2, 7])],
    );
    assert_eq!(s, Some(Section::Vector(vec![4, -2, 7])));
}

#[test]
fn group_valued_presheaf_with_a_doubled_arrow() {
    let mut f = projection_presheaf(MvTopology::full(pts(2), 1));
    let top = f.index_of(&fs(1, &[1, 1])).unwrap();
    let left = f.index_of(&fs(1, &[1, 0])).unwrap();
    f.arrows.insert(
        (top, left),
        Arrow::Linear(IntMat::from_rows(2, &[vec![2, 0]])),
    );
    // Below (1,0) only the empty open remains, so functoriality still holds.
    assert!(check_presheaf(&f).unwrap().pass);
    let r = check_sheaf(&f, DEFAULT_OPEN_CAP).unwrap();
    assert!(r.separation && !r.gluing);
    let w = r
        .violations
        .iter()
        .find(|v| v.condition == "gluing")
        .unwrap();
    assert_eq!(w.open, fs(1, &[1, 1]));

    // With constants ℤ everywhere and doubling on one arrow, gluing fails for odd data.
    let t = MvTopology::full(pts(2), 1);
    let mut g = constant_presheaf(t, Carrier::Group(LexGroup::free(1))).unwrap();
    let lr: BTreeMap<(usize, usize), Arrow> = g.arrows.clone();
    for ((a, b), _) in lr {
        if g.opens[a].is_one() && !g.opens[b].is_one() {
            g.arrows
                .insert((a, b), Arrow::Linear(IntMat::from_rows(1, &[vec![2]])));
        }
    }
    let r = check_sheaf(&g, DEFAULT_OPEN_CAP).unwrap();
    assert!(!r.gluing);
}

#[test]
fn sheaf_space_examples() {
    let x = MvTopology::full(pts(2), 1);
    let id = SheafSpace {
        total: x.clone(),
        base: x.clone(),
        projection: vec![0, 1],
    };
    let r = check_sheaf_space(&id).unwrap();
    assert!(r.pass && r.witnesses.len() == 2);

    let copies = SheafSpace {
        total: MvTopology::full(pts(4), 1),
        base: x.clone(),
        projection: vec![0, 1, 0, 1],
    };
    assert!(check_sheaf_space(&copies).unwrap().pass);

    // Two total points over one base point, and no open of E separates them.
    let e = generate_topology(pts(3), 1, &[fs(1, &[1, 1, 0]), fs(1, &[0, 0, 1])]).unwrap();
    let collapsed = SheafSpace {
        total: e,
        base: x,
        projection: vec![0, 0, 1],
    };
    let r = check_sheaf_space(&collapsed).unwrap();
    assert!(r.continuous);
    assert!(!r.pass);
    assert_eq!(r.unsupported_points, vec![0, 1]);
}

proptest! {
    #[test]
    fn integer_kernels_and_solutions(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..4), x in prop::collection::vec(-5i64..=5, 3)) {
        let m = IntMat::from_rows(3, &rows);
        for k in m.kernel() {
            prop_assert!(m.apply(&k).iter().all(|&v| v == 0));
        }
        let b = m.apply(&x);
        let y = m.solve(&b).unwrap();
        prop_assert_eq!(m.apply(&y), b);
        let diff: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        // x − y lies in the kernel lattice: kernel basis + solve must reproduce it.
        let basis = m.kernel();
        if basis.is_empty() {
            prop_assert!(diff.iter().all(|&v| v == 0));
        } else {
            let mut cols = vec![vec![0i64; basis.len()]; 3];
            for (j, k) in basis.iter().enumerate() {
                for i in 0..3 { cols[i][j] = k[i]; }
            }
            let kmat = IntMat::from_rows(basis.len(), &cols);
            prop_assert!(kmat.solve(&diff).is_some());
        }
    }
}
