//! MV-presheaves over finite MV-topologies: functoriality, the sheaf
//! conditions, stalks and sheaf spaces.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::algebra::{MvAlgebra, MvElement};
use crate::ell_groups::LexGroup;
use crate::error::{MvError, Result};
use crate::intmat::IntMat;
use crate::topology::{FuzzySet, MvSpaceMap, MvTopology};

/// Default bound on the number of opens accepted by [`check_sheaf`].
pub const DEFAULT_OPEN_CAP: usize = 256;

/// The value of a presheaf on one open.
#[derive(Clone, Debug)]
pub enum Carrier {
    /// A finite set of labelled sections.
    Set(Vec<String>),
    /// A finite MV-algebra; sections are indexed in the order of `elements`.
    Algebra {
        algebra: MvAlgebra,
        elements: Vec<MvElement>,
    },
    /// A lexicographic ℓ-group `ℤ^n`; sections are integer vectors.
    Group(LexGroup),
}

impl Carrier {
    pub fn algebra(a: &MvAlgebra) -> Result<Self> {
        Ok(Carrier::Algebra {
            algebra: a.clone(),
            elements: a.enumerate()?,
        })
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Carrier::Set(s) => Some(s.len()),
            Carrier::Algebra { elements, .. } => Some(elements.len()),
            Carrier::Group(_) => None,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Carrier::Group(g) => g.dimension(),
            _ => 0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Carrier::Set(s) => format!("set of {}", s.len()),
            Carrier::Algebra { algebra, .. } => algebra.to_string(),
            Carrier::Group(g) => g.to_string(),
        }
    }
}

/// A restriction arrow `F(α) → F(β)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arrow {
    Table(Vec<usize>),
    Linear(IntMat),
}

impl Arrow {
    fn compose(&self, inner: &Arrow) -> Arrow {
        match (self, inner) {
            (Arrow::Table(outer), Arrow::Table(first)) => {
                Arrow::Table(first.iter().map(|&i| outer[i]).collect())
            }
            (Arrow::Linear(outer), Arrow::Linear(first)) => Arrow::Linear(outer.compose(first)),
            _ => panic!("mixed arrow kinds"),
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            Arrow::Table(t) => t.iter().enumerate().all(|(i, &j)| i == j),
            Arrow::Linear(m) => *m == IntMat::identity(m.cols()) && m.rows() == m.cols(),
        }
    }
}

/// A presheaf on a finite MV-topology. Opens are indexed in the order of
/// `topology.opens`; `arrows[(α, β)]` is defined exactly when `β ≤ α`.
#[derive(Clone, Debug)]
pub struct Presheaf {
    pub topology: MvTopology,
    pub opens: Vec<FuzzySet>,
    pub carriers: Vec<Carrier>,
    pub arrows: BTreeMap<(usize, usize), Arrow>,
}

impl Presheaf {
    /// Builds the presheaf by evaluating `carrier` on each open and `arrow`
    /// on each comparable pair.
    pub fn build(
        topology: MvTopology,
        mut carrier: impl FnMut(&FuzzySet) -> Result<Carrier>,
        mut arrow: impl FnMut(&FuzzySet, &FuzzySet) -> Result<Arrow>,
    ) -> Result<Self> {
        let opens: Vec<FuzzySet> = topology.opens.iter().cloned().collect();
        let carriers = opens.iter().map(&mut carrier).collect::<Result<Vec<_>>>()?;
        let mut arrows = BTreeMap::new();
        for (i, a) in opens.iter().enumerate() {
            for (j, b) in opens.iter().enumerate() {
                if b.le(a) {
                    arrows.insert((i, j), arrow(a, b)?);
                }
            }
        }
        Ok(Presheaf {
            topology,
            opens,
            carriers,
            arrows,
        })
    }

    pub fn index_of(&self, s: &FuzzySet) -> Option<usize> {
        self.opens.iter().position(|o| o == s)
    }

    pub fn arrow(&self, from: usize, to: usize) -> &Arrow {
        &self.arrows[&(from, to)]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PresheafViolation {
    pub law: &'static str,
    /// The opens involved, outermost first.
    pub opens: Vec<FuzzySet>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresheafReport {
    pub pass: bool,
    pub opens: usize,
    pub arrows: usize,
    pub triples_checked: usize,
    pub violations: Vec<PresheafViolation>,
}

fn arrow_shape_ok(f: &Presheaf, from: usize, to: usize, arrow: &Arrow) -> bool {
    match (arrow, &f.carriers[from], &f.carriers[to]) {
        (Arrow::Table(t), src, dst) => {
            Some(t.len()) == src.size() && dst.size().is_some_and(|n| t.iter().all(|&j| j < n))
        }
        (Arrow::Linear(m), Carrier::Group(src), Carrier::Group(dst)) => {
            m.cols() == src.dimension() && m.rows() == dst.dimension()
        }
        _ => false,
    }
}

/// Whether the arrow preserves the structure of its carriers.
fn preserves_structure(f: &Presheaf, from: usize, to: usize, arrow: &Arrow) -> Result<bool> {
    match (arrow, &f.carriers[from], &f.carriers[to]) {
        (
            Arrow::Table(t),
            Carrier::Algebra {
                algebra: a,
                elements: ea,
            },
            Carrier::Algebra {
                algebra: b,
                elements: eb,
            },
        ) => {
            let pos: BTreeMap<&MvElement, usize> =
                ea.iter().enumerate().map(|(i, x)| (x, i)).collect();
            let img = |x: &MvElement| &eb[t[pos[x]]];
            if *img(&a.zero()) != b.zero() {
                return Ok(false);
            }
            for x in ea {
                if *img(&a.neg(x)?) != b.neg(img(x))? {
                    return Ok(false);
                }
                for y in ea {
                    if *img(&a.oplus(x, y)?) != b.oplus(img(x), img(y))? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        (Arrow::Linear(m), Carrier::Group(src), Carrier::Group(dst)) => {
            let samples = group_samples(src.dimension());
            for x in &samples {
                for y in &samples {
                    let (fx, fy) = (m.apply(x), m.apply(y));
                    if m.apply(&src.meet_slices(x, y)) != dst.meet_slices(&fx, &fy)
                        || m.apply(&src.join_slices(x, y)) != dst.join_slices(&fx, &fy)
                    {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        (Arrow::Table(_), Carrier::Set(_), Carrier::Set(_)) => Ok(true),
        _ => Ok(false),
    }
}

/// Vectors with entries in `{-1, 0, 1}` (or unit vectors and their negatives
/// in high rank) used to probe lattice homomorphisms.
fn group_samples(n: usize) -> Vec<Vec<i64>> {
    if n <= 3 {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| (-1..=1).map(move |k| [v.clone(), vec![k]].concat()))
                .collect();
        }
        out
    } else {
        let mut out = vec![vec![0; n]];
        for i in 0..n {
            for s in [-1, 1] {
                let mut v = vec![0; n];
                v[i] = s;
                out.push(v);
            }
        }
        out
    }
}

pub fn check_presheaf(f: &Presheaf) -> Result<PresheafReport> {
    let n = f.opens.len();
    let mut violations = Vec::new();
    let v = |law, opens: &[usize], detail: String| PresheafViolation {
        law,
        opens: opens.iter().map(|&i| f.opens[i].clone()).collect(),
        detail,
    };
    for i in 0..n {
        for j in 0..n {
            let comparable = f.opens[j].le(&f.opens[i]);
            match (f.arrows.get(&(i, j)), comparable) {
                (None, true) => violations.push(v(
                    "arrow defined on comparable opens",
                    &[i, j],
                    "missing".into(),
                )),
                (Some(_), false) => violations.push(v(
                    "arrow defined on comparable opens",
                    &[i, j],
                    "extra".into(),
                )),
                (Some(a), true) => {
                    if !arrow_shape_ok(f, i, j, a) {
                        violations.push(v("arrow matches carriers", &[i, j], format!("{a:?}")));
                    } else if !preserves_structure(f, i, j, a)? {
                        violations.push(v("arrow preserves structure", &[i, j], format!("{a:?}")));
                    }
                }
                (None, false) => {}
            }
        }
    }
    if !violations.is_empty() {
        return Ok(PresheafReport {
            pass: false,
            opens: n,
            arrows: f.arrows.len(),
            triples_checked: 0,
            violations,
        });
    }
    for i in 0..n {
        if !f.arrow(i, i).is_identity() {
            violations.push(v("identity", &[i], format!("{:?}", f.arrow(i, i))));
        }
    }
    let mut triples_checked = 0;
    for (&(i, j), outer) in &f.arrows {
        for k in 0..n {
            if let Some(inner) = f.arrows.get(&(j, k)) {
                triples_checked += 1;
                let direct = f.arrow(i, k);
                if *direct != inner.compose(outer) {
                    violations.push(v(
                        "composition",
                        &[i, j, k],
                        format!("{direct:?} differs from the composite"),
                    ));
                }
            }
        }
    }
    Ok(PresheafReport {
        pass: violations.is_empty(),
        opens: n,
        arrows: f.arrows.len(),
        triples_checked,
        violations,
    })
}

/// A section of a presheaf over one open.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Section {
    Index(usize),
    Vector(Vec<i64>),
}

impl Arrow {
    pub fn apply(&self, s: &Section) -> Section {
        match (self, s) {
            (Arrow::Table(t), Section::Index(i)) => Section::Index(t[*i]),
            (Arrow::Linear(m), Section::Vector(v)) => Section::Vector(m.apply(v)),
            _ => panic!("section kind does not match arrow"),
        }
    }
}

impl Presheaf {
    pub fn restrict(&self, from: usize, to: usize, s: &Section) -> Section {
        self.arrow(from, to).apply(s)
    }

    fn is_linear(&self) -> bool {
        self.carriers.iter().any(|c| matches!(c, Carrier::Group(_)))
    }

    fn meet_index(&self, i: usize, j: usize) -> usize {
        self.index_of(&self.opens[i].meet(&self.opens[j]))
            .expect("opens are closed under meets")
    }
}

/// Covers `α = ⋁ C` by opens. Each produced family picks, for every point
/// of `supp α` not yet attained, an open that attains `α` there; every
/// irredundant cover is produced.
pub fn covers_of(f: &Presheaf, alpha: usize) -> Vec<Vec<usize>> {
    let a = &f.opens[alpha];
    let below: Vec<usize> = (0..f.opens.len()).filter(|&j| f.opens[j].le(a)).collect();
    let support: Vec<usize> = a.support().into_iter().collect();
    let mut out = BTreeSet::new();
    fn walk(
        f: &Presheaf,
        a: &FuzzySet,
        below: &[usize],
        support: &[usize],
        pos: usize,
        chosen: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let Some(&x) = support.get(pos) else {
            let mut c = chosen.clone();
            c.sort_unstable();
            c.dedup();
            out.insert(c);
            return;
        };
        let target = a.numerators()[x];
        if chosen.iter().any(|&j| f.opens[j].numerators()[x] == target) {
            walk(f, a, below, support, pos + 1, chosen, out);
            return;
        }
        for &j in below {
            if f.opens[j].numerators()[x] == target {
                chosen.push(j);
                walk(f, a, below, support, pos + 1, chosen, out);
                chosen.pop();
            }
        }
    }
    walk(f, a, &below, &support, 0, &mut Vec::new(), &mut out);
    out.into_iter().filter(|c| !c.is_empty()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SheafViolation {
    pub condition: &'static str,
    pub open: FuzzySet,
    pub cover: Vec<FuzzySet>,
    pub sections: Vec<Section>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SheafReport {
    pub pass: bool,
    pub opens: usize,
    pub covers_checked: usize,
    pub separation: bool,
    pub gluing: bool,
    pub violations: Vec<SheafViolation>,
}

/// At most this many witnesses are kept per report.
const WITNESS_LIMIT: usize = 16;

fn sections_of(f: &Presheaf, i: usize) -> Vec<Section> {
    (0..f.carriers[i].size().unwrap_or(0))
        .map(Section::Index)
        .collect()
}

/// Compatible families on `cover`, i.e. sections agreeing on pairwise overlaps.
fn compatible_families(f: &Presheaf, cover: &[usize]) -> Vec<Vec<Section>> {
    let mut out = Vec::new();
    let mut cur: Vec<Section> = Vec::new();
    fn go(f: &Presheaf, cover: &[usize], cur: &mut Vec<Section>, out: &mut Vec<Vec<Section>>) {
        let k = cur.len();
        if k == cover.len() {
            out.push(cur.clone());
            return;
        }
        for s in sections_of(f, cover[k]) {
            let ok = (0..k).all(|i| {
                let m = f.meet_index(cover[i], cover[k]);
                f.restrict(cover[i], m, &cur[i]) == f.restrict(cover[k], m, &s)
            });
            if ok {
                cur.push(s);
                go(f, cover, cur, out);
                cur.pop();
            }
        }
    }
    go(f, cover, &mut cur, &mut out);
    out
}

fn stacked_restrictions(f: &Presheaf, alpha: usize, cover: &[usize]) -> IntMat {
    let n = f.carriers[alpha].rank();
    cover
        .iter()
        .fold(IntMat::zeros(0, n), |acc, &c| match f.arrow(alpha, c) {
            Arrow::Linear(m) => acc.stack(m),
            Arrow::Table(_) => unreachable!(),
        })
}

/// Rows `ρ_i(s_i) − ρ_j(s_j)` on every overlap, as a map on `⊕_i F(α_i)`.
fn overlap_differences(f: &Presheaf, cover: &[usize]) -> IntMat {
    let widths: Vec<usize> = cover.iter().map(|&c| f.carriers[c].rank()).collect();
    let offsets: Vec<usize> = widths
        .iter()
        .scan(0, |acc, w| {
            let o = *acc;
            *acc += w;
            Some(o)
        })
        .collect();
    let total: usize = widths.iter().sum();
    let mut d = IntMat::zeros(0, total);
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let m = f.meet_index(cover[i], cover[j]);
            let (Arrow::Linear(ri), Arrow::Linear(rj)) =
                (f.arrow(cover[i], m), f.arrow(cover[j], m))
            else {
                unreachable!()
            };
            let mut block = IntMat::zeros(ri.rows(), total);
            for r in 0..ri.rows() {
                for c in 0..widths[i] {
                    block.set(r, offsets[i] + c, ri.get(r, c));
                }
                for c in 0..widths[j] {
                    block.set(r, offsets[j] + c, -rj.get(r, c));
                }
            }
            d = d.stack(&block);
        }
    }
    d
}

fn split(f: &Presheaf, cover: &[usize], v: &[i64]) -> Vec<Section> {
    let mut out = Vec::new();
    let mut at = 0;
    for &c in cover {
        let w = f.carriers[c].rank();
        out.push(Section::Vector(v[at..at + w].to_vec()));
        at += w;
    }
    out
}

/// A section over `alpha` restricting to `sections` on `cover`, if one exists.
pub fn glue(f: &Presheaf, alpha: usize, cover: &[usize], sections: &[Section]) -> Option<Section> {
    if f.is_linear() {
        let target: Vec<i64> = sections
            .iter()
            .flat_map(|s| match s {
                Section::Vector(v) => v.clone(),
                Section::Index(_) => unreachable!(),
            })
            .collect();
        stacked_restrictions(f, alpha, cover)
            .solve(&target)
            .map(Section::Vector)
    } else {
        sections_of(f, alpha).into_iter().find(|s| {
            cover
                .iter()
                .zip(sections)
                .all(|(&c, t)| f.restrict(alpha, c, s) == *t)
        })
    }
}

/// Separation and gluing for every open and every cover produced by
/// [`covers_of`]. Covers that are not irredundant add nothing: a family over
/// a larger cover restricts to a compatible family over an irredundant
/// subcover, and separation then pins down the glued section.
pub fn check_sheaf(f: &Presheaf, open_cap: usize) -> Result<SheafReport> {
    if f.opens.len() > open_cap {
        return Err(MvError::Unsupported(format!(
            "topology has {} opens, above the cap of {open_cap}",
            f.opens.len()
        )));
    }
    let mut violations = Vec::new();
    let (mut separation, mut gluing) = (true, true);
    let mut covers_checked = 0;
    for alpha in 0..f.opens.len() {
        for cover in covers_of(f, alpha) {
            covers_checked += 1;
            let witness = |condition, sections| SheafViolation {
                condition,
                open: f.opens[alpha].clone(),
                cover: cover.iter().map(|&c| f.opens[c].clone()).collect(),
                sections,
            };
            if f.is_linear() {
                let r = stacked_restrictions(f, alpha, &cover);
                if let Some(k) = r.kernel().first() {
                    separation = false;
                    violations.push(witness(
                        "separation",
                        vec![
                            Section::Vector(k.clone()),
                            Section::Vector(vec![0; k.len()]),
                        ],
                    ));
                }
                for v in overlap_differences(f, &cover).kernel() {
                    if r.solve(&v).is_none() {
                        gluing = false;
                        violations.push(witness("gluing", split(f, &cover, &v)));
                        break;
                    }
                }
            } else {
                let mut seen: BTreeMap<Vec<Section>, Section> = BTreeMap::new();
                for s in sections_of(f, alpha) {
                    let image: Vec<Section> =
                        cover.iter().map(|&c| f.restrict(alpha, c, &s)).collect();
                    if let Some(t) = seen.insert(image, s.clone()) {
                        separation = false;
                        violations.push(witness("separation", vec![t, s]));
                        break;
                    }
                }
                let images: HashSet<&Vec<Section>> = seen.keys().collect();
                for family in compatible_families(f, &cover) {
                    if !images.contains(&family) {
                        gluing = false;
                        violations.push(witness("gluing", family));
                        break;
                    }
                }
            }
            violations.truncate(WITNESS_LIMIT);
        }
    }
    Ok(SheafReport {
        pass: separation && gluing,
        opens: f.opens.len(),
        covers_checked,
        separation,
        gluing,
        violations,
    })
}

/// The stalk at a point: `F(μ_x)` where `μ_x` is the least open whose
/// support contains `x`.
#[derive(Clone, Debug, Serialize)]
pub struct Stalk {
    pub point: usize,
    pub mu: FuzzySet,
    #[serde(skip)]
    pub mu_index: usize,
    pub carrier: String,
}

impl Stalk {
    /// The germ at `x` of a section over the open with index `alpha`.
    pub fn germ(&self, f: &Presheaf, alpha: usize, s: &Section) -> Result<Section> {
        if !f.opens[alpha].support().contains(&self.point) {
            return Err(MvError::InvalidDescriptor(format!(
                "open {} does not contain point {} in its support",
                f.opens[alpha], self.point
            )));
        }
        Ok(f.restrict(alpha, self.mu_index, s))
    }
}

pub fn stalk_at(f: &Presheaf, x: usize) -> Result<Stalk> {
    let family: Vec<&FuzzySet> = f
        .opens
        .iter()
        .filter(|o| o.support().contains(&x))
        .collect();
    let Some(first) = family.first() else {
        return Err(MvError::IsolatedFromTopology(x));
    };
    let mu = family.iter().fold((*first).clone(), |acc, o| acc.meet(o));
    let mu_index = f
        .index_of(&mu)
        .ok_or_else(|| MvError::InternalConsistency(format!("meet {mu} of opens is not open")))?;
    Ok(Stalk {
        point: x,
        mu,
        mu_index,
        carrier: f.carriers[mu_index].describe(),
    })
}

/// `A_X`: the same carrier on every open, identity restrictions.
pub fn constant_presheaf(topology: MvTopology, carrier: Carrier) -> Result<Presheaf> {
    let identity = match &carrier {
        Carrier::Group(g) => Arrow::Linear(IntMat::identity(g.dimension())),
        c => Arrow::Table((0..c.size().unwrap_or(0)).collect()),
    };
    Presheaf::build(
        topology,
        |_| Ok(carrier.clone()),
        |_, _| Ok(identity.clone()),
    )
}

/// Restriction of a topology to a set of points: `{β|_S : β ∈ τ}`.
pub fn subspace(t: &MvTopology, points: &BTreeSet<usize>) -> MvTopology {
    let idx: Vec<usize> = points.iter().copied().collect();
    let restrict = |o: &FuzzySet| {
        FuzzySet::new(o.denom(), idx.iter().map(|&i| o.numerators()[i]).collect())
            .expect("restriction stays in range")
    };
    MvTopology {
        points: idx.iter().map(|&i| t.points[i].clone()).collect(),
        denom: t.denom,
        opens: t.opens.iter().map(restrict).collect(),
    }
}

/// All maps `S → Y` continuous for the subspace topology on `S`; each map is
/// stored as the image of every point of `S` in increasing order.
fn continuous_maps(tx: &MvTopology, s: &BTreeSet<usize>, ty: &MvTopology) -> Vec<Vec<usize>> {
    let sub = subspace(tx, s);
    let mut out = Vec::new();
    if ty.is_empty() && !s.is_empty() {
        return out;
    }
    let mut cur = vec![0usize; s.len()];
    loop {
        let m = MvSpaceMap {
            source: sub.clone(),
            target: ty.clone(),
            f: cur.clone(),
        };
        if ty.opens.iter().all(|o| sub.opens.contains(&m.preimage(o))) {
            out.push(cur.clone());
        }
        let mut i = 0;
        while i < cur.len() && cur[i] + 1 == ty.len() {
            cur[i] = 0;
            i += 1;
        }
        if i == cur.len() {
            break;
        }
        cur[i] += 1;
    }
    out
}

/// `C^Y(α)`: continuous maps from `supp α` to `Y`, restricted along supports.
pub fn continuous_maps_presheaf(tx: MvTopology, ty: &MvTopology) -> Result<Presheaf> {
    if tx.denom != ty.denom {
        return Err(MvError::InvalidDescriptor(
            "both spaces must share a denominator".into(),
        ));
    }
    let tables: BTreeMap<FuzzySet, Vec<Vec<usize>>> = tx
        .opens
        .iter()
        .map(|o| (o.clone(), continuous_maps(&tx, &o.support(), ty)))
        .collect();
    let label = |s: &BTreeSet<usize>, m: &Vec<usize>| {
        let parts: Vec<String> = s
            .iter()
            .zip(m)
            .map(|(x, y)| format!("{}->{}", tx.points[*x], ty.points[*y]))
            .collect();
        format!("{{{}}}", parts.join(","))
    };
    let carriers: BTreeMap<FuzzySet, Carrier> = tables
        .iter()
        .map(|(o, maps)| {
            (
                o.clone(),
                Carrier::Set(maps.iter().map(|m| label(&o.support(), m)).collect()),
            )
        })
        .collect();
    Presheaf::build(
        tx.clone(),
        |o| Ok(carriers[o].clone()),
        |a, b| {
            let (sa, sb) = (a.support(), b.support());
            let keep: Vec<usize> = sa
                .iter()
                .enumerate()
                .filter(|(_, x)| sb.contains(x))
                .map(|(k, _)| k)
                .collect();
            let targets = &tables[b];
            let table = tables[a]
                .iter()
                .map(|m| {
                    let restricted: Vec<usize> = keep.iter().map(|&k| m[k]).collect();
                    targets
                        .iter()
                        .position(|t| *t == restricted)
                        .ok_or_else(|| {
                            MvError::InternalConsistency(
                                "restriction of a continuous map is not continuous".into(),
                            )
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Arrow::Table(table))
        },
    )
}

/// `(E, p, X)` with `p` given on points.
#[derive(Clone, Debug, Serialize)]
pub struct SheafSpace {
    pub total: MvTopology,
    pub base: MvTopology,
    pub projection: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalHomeomorphism {
    pub point: usize,
    pub total_open: FuzzySet,
    pub base_open: FuzzySet,
}

#[derive(Clone, Debug, Serialize)]
pub struct SheafSpaceReport {
    pub pass: bool,
    pub continuous: bool,
    pub witnesses: Vec<LocalHomeomorphism>,
    /// Total points with no `(α, β)` pair restricting `p` to a homeomorphism.
    pub unsupported_points: Vec<usize>,
}

fn restricted_homeomorphism(s: &SheafSpace, dom: &BTreeSet<usize>, cod: &BTreeSet<usize>) -> bool {
    let image: BTreeSet<usize> = dom.iter().map(|&e| s.projection[e]).collect();
    if image != *cod || image.len() != dom.len() {
        return false;
    }
    let target = subspace(&s.base, cod);
    let cod_pos: Vec<usize> = cod.iter().copied().collect();
    let f = dom
        .iter()
        .map(|&e| cod_pos.iter().position(|&y| y == s.projection[e]).unwrap())
        .collect();
    let m = MvSpaceMap {
        source: subspace(&s.total, dom),
        target,
        f,
    };
    let flags = crate::topology::check_map(&m, None);
    flags.homeomorphism
}

pub fn check_sheaf_space(s: &SheafSpace) -> Result<SheafSpaceReport> {
    let m = MvSpaceMap::new(s.total.clone(), s.base.clone(), s.projection.clone())?;
    let continuous = crate::topology::check_map(&m, None).continuous;
    let mut witnesses = Vec::new();
    let mut unsupported_points = Vec::new();
    for e in 0..s.total.len() {
        let found = s
            .total
            .opens
            .iter()
            .filter(|a| a.numerators()[e] > 0)
            .find_map(|a| {
                let dom = a.support();
                s.base
                    .opens
                    .iter()
                    .filter(|b| b.support() == dom.iter().map(|&x| s.projection[x]).collect())
                    .find(|b| restricted_homeomorphism(s, &dom, &b.support()))
                    .map(|b| LocalHomeomorphism {
                        point: e,
                        total_open: a.clone(),
                        base_open: b.clone(),
                    })
            });
        match found {
            Some(w) => witnesses.push(w),
            None => unsupported_points.push(e),
        }
    }
    Ok(SheafSpaceReport {
        pass: continuous && unsupported_points.is_empty(),
        continuous,
        witnesses,
        unsupported_points,
    })
}
