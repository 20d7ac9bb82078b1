//! Finite MV-topological spaces with membership values in the chain
//! `{0, 1/d, ..., 1}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::algebra::MvElement;
use crate::error::{MvError, Result};
use crate::rational::Rational;
use crate::spectra::{local_family, maximal_ideals, o_p, Ideal};
use crate::MvAlgebra;

/// A fuzzy subset of a finite space, stored as numerators over a common
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FuzzySet {
    denom: u32,
    values: Vec<u32>,
}

impl FuzzySet {
    pub fn new(denom: u32, values: Vec<u32>) -> Result<Self> {
        if denom == 0 {
            return Err(MvError::InvalidDescriptor(
                "fuzzy set denominator must be positive".into(),
            ));
        }
        if let Some(v) = values.iter().find(|&&v| v > denom) {
            return Err(MvError::InvalidDescriptor(format!(
                "membership {v}/{denom} exceeds 1"
            )));
        }
        Ok(FuzzySet { denom, values })
    }

    /// Builds a fuzzy set from exact values, each of which must be a multiple of `1/denom`.
    pub fn from_rationals(denom: u32, values: &[Rational]) -> Result<Self> {
        let nums = values
            .iter()
            .map(|r| {
                r.scaled(denom as i64)
                    .filter(|n| (0..=denom as i64).contains(n))
                    .map(|n| n as u32)
                    .ok_or_else(|| {
                        MvError::SpectrumValue(format!(
                            "{r} is not a multiple of 1/{denom} in [0,1]"
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzySet::new(denom, nums)
    }

    pub fn constant(len: usize, denom: u32, numer: u32) -> Self {
        FuzzySet {
            denom,
            values: vec![numer.min(denom); len],
        }
    }

    pub fn zero(len: usize, denom: u32) -> Self {
        Self::constant(len, denom, 0)
    }

    pub fn one(len: usize, denom: u32) -> Self {
        Self::constant(len, denom, denom)
    }

    /// Characteristic function of a crisp subset of point indices.
    pub fn crisp(len: usize, denom: u32, members: &BTreeSet<usize>) -> Self {
        FuzzySet {
            denom,
            values: (0..len)
                .map(|i| if members.contains(&i) { denom } else { 0 })
                .collect(),
        }
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn numerators(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, x: usize) -> Rational {
        Rational::new(self.values[x] as i64, self.denom as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn is_one(&self) -> bool {
        self.values.iter().all(|&v| v == self.denom)
    }

    pub fn is_crisp(&self) -> bool {
        self.values.iter().all(|&v| v == 0 || v == self.denom)
    }

    /// `{x : α(x) > 0}`.
    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.len()).filter(|&i| self.values[i] > 0).collect()
    }

    /// `{x : α(x) = 1}`.
    pub fn top_set(&self) -> BTreeSet<usize> {
        (0..self.len())
            .filter(|&i| self.values[i] == self.denom)
            .collect()
    }

    pub fn le(&self, other: &Self) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    fn zip(&self, other: &Self, f: impl Fn(u32, u32, u32) -> u32) -> Self {
        debug_assert_eq!(self.denom, other.denom);
        debug_assert_eq!(self.len(), other.len());
        let d = self.denom;
        FuzzySet {
            denom: d,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b, d))
                .collect(),
        }
    }

    pub fn oplus(&self, other: &Self) -> Self {
        self.zip(other, |a, b, d| (a + b).min(d))
    }

    pub fn odot(&self, other: &Self) -> Self {
        self.zip(other, |a, b, d| (a + b).saturating_sub(d))
    }

    pub fn join(&self, other: &Self) -> Self {
        self.zip(other, |a, b, _| a.max(b))
    }

    pub fn meet(&self, other: &Self) -> Self {
        self.zip(other, |a, b, _| a.min(b))
    }

    pub fn neg(&self) -> Self {
        FuzzySet {
            denom: self.denom,
            values: self.values.iter().map(|&v| self.denom - v).collect(),
        }
    }

    /// `n·α = α ⊕ ... ⊕ α`.
    pub fn multiple(&self, n: u32) -> Self {
        FuzzySet {
            denom: self.denom,
            values: self
                .values
                .iter()
                .map(|&v| (v * n).min(self.denom))
                .collect(),
        }
    }

    /// The same fuzzy set over a finer denominator `denom`, a multiple of the current one.
    pub fn rescale(&self, denom: u32) -> Result<Self> {
        if !denom.is_multiple_of(self.denom) {
            return Err(MvError::SpectrumValue(format!(
                "1/{} is not a multiple of 1/{denom}",
                self.denom
            )));
        }
        let k = denom / self.denom;
        Ok(FuzzySet {
            denom,
            values: self.values.iter().map(|&v| v * k).collect(),
        })
    }
}

impl fmt::Display for FuzzySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.value(i))?;
        }
        write!(f, ")")
    }
}

impl Serialize for FuzzySet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq((0..self.len()).map(|i| self.value(i)))
    }
}

/// A finite MV-topological space.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MvTopology {
    pub points: Vec<String>,
    pub denom: u32,
    pub opens: BTreeSet<FuzzySet>,
}

fn check_shape(points: usize, denom: u32, sets: &[FuzzySet]) -> Result<()> {
    for s in sets {
        if s.len() != points || s.denom() != denom {
            return Err(MvError::InvalidDescriptor(format!(
                "fuzzy set {s} does not live on {points} points with denominator {denom}"
            )));
        }
    }
    Ok(())
}

impl MvTopology {
    /// Takes `opens` verbatim. Use [`verify_topology`] to test the axioms.
    pub fn from_opens(
        points: Vec<String>,
        denom: u32,
        opens: impl IntoIterator<Item = FuzzySet>,
    ) -> Result<Self> {
        let opens: BTreeSet<FuzzySet> = opens.into_iter().collect();
        check_shape(
            points.len(),
            denom,
            &opens.iter().cloned().collect::<Vec<_>>(),
        )?;
        Ok(MvTopology {
            points,
            denom,
            opens,
        })
    }

    pub fn indiscrete(points: Vec<String>, denom: u32) -> Self {
        let n = points.len();
        MvTopology {
            points,
            denom,
            opens: [FuzzySet::zero(n, denom), FuzzySet::one(n, denom)].into(),
        }
    }

    /// Every map `X → {0, 1/d, ..., 1}` is open.
    pub fn full(points: Vec<String>, denom: u32) -> Self {
        let n = points.len();
        let mut opens = BTreeSet::new();
        let mut cur = vec![0u32; n];
        loop {
            opens.insert(FuzzySet {
                denom,
                values: cur.clone(),
            });
            let mut i = 0;
            while i < n && cur[i] == denom {
                cur[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            cur[i] += 1;
        }
        MvTopology {
            points,
            denom,
            opens,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_open(&self, s: &FuzzySet) -> bool {
        self.opens.contains(s)
    }

    pub fn zero(&self) -> FuzzySet {
        FuzzySet::zero(self.len(), self.denom)
    }

    pub fn one(&self) -> FuzzySet {
        FuzzySet::one(self.len(), self.denom)
    }

    pub fn closed_sets(&self) -> BTreeSet<FuzzySet> {
        self.opens.iter().map(FuzzySet::neg).collect()
    }
}

/// Least MV-topology on `points` containing `base`.
pub fn generate_topology(points: Vec<String>, denom: u32, base: &[FuzzySet]) -> Result<MvTopology> {
    generate_topology_bounded(points, denom, base, usize::MAX)
}

/// As [`generate_topology`], giving up once more than `cap` opens appear.
pub fn generate_topology_bounded(
    points: Vec<String>,
    denom: u32,
    base: &[FuzzySet],
    cap: usize,
) -> Result<MvTopology> {
    let n = points.len();
    check_shape(n, denom, base)?;
    let mut opens: BTreeSet<FuzzySet> = base.iter().cloned().collect();
    opens.insert(FuzzySet::zero(n, denom));
    opens.insert(FuzzySet::one(n, denom));
    let mut frontier: Vec<FuzzySet> = opens.iter().cloned().collect();
    while !frontier.is_empty() {
        let snapshot: Vec<FuzzySet> = opens.iter().cloned().collect();
        let mut next = Vec::new();
        for a in &frontier {
            for b in &snapshot {
                for c in [a.join(b), a.meet(b), a.oplus(b), a.odot(b)] {
                    if opens.insert(c.clone()) {
                        next.push(c);
                        if opens.len() > cap {
                            return Err(MvError::Unsupported(format!(
                                "generated topology exceeds {cap} opens"
                            )));
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(MvTopology {
        points,
        denom,
        opens,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopologyViolation {
    pub axiom: &'static str,
    pub operands: Vec<FuzzySet>,
    pub result: FuzzySet,
}

#[derive(Clone, Debug, Serialize)]
pub struct TopologyReport {
    pub pass: bool,
    pub opens: usize,
    /// Whether the join of every subset was evaluated, rather than pairwise joins.
    pub subset_joins_exhaustive: bool,
    pub violations: Vec<TopologyViolation>,
    pub dual_violations: Vec<TopologyViolation>,
}

/// Above this many opens the join axiom is checked pairwise, which implies
/// closure under every finite join.
pub const SUBSET_JOIN_LIMIT: usize = 14;

type SetOp = fn(&FuzzySet, &FuzzySet) -> FuzzySet;

fn closure_violations(
    members: &BTreeSet<FuzzySet>,
    zero: &FuzzySet,
    one: &FuzzySet,
    big: (&'static str, SetOp, &FuzzySet),
    binary: [(&'static str, SetOp); 3],
    exhaustive: bool,
) -> Vec<TopologyViolation> {
    let mut out = Vec::new();
    for (name, s) in [("contains 0", zero), ("contains 1", one)] {
        if !members.contains(s) {
            out.push(TopologyViolation {
                axiom: name,
                operands: vec![],
                result: s.clone(),
            });
        }
    }
    let list: Vec<&FuzzySet> = members.iter().collect();
    let (big_name, big_op, big_unit) = big;
    if exhaustive {
        for mask in 0u64..(1u64 << list.len()) {
            let chosen: Vec<FuzzySet> = (0..list.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| list[i].clone())
                .collect();
            let r = chosen
                .iter()
                .fold(big_unit.clone(), |acc, x| big_op(&acc, x));
            if !members.contains(&r) {
                out.push(TopologyViolation {
                    axiom: big_name,
                    operands: chosen,
                    result: r,
                });
            }
        }
    }
    for (i, a) in list.iter().enumerate() {
        for b in &list[i..] {
            let ops = binary
                .iter()
                .copied()
                .chain((!exhaustive).then_some((big_name, big_op)));
            for (name, op) in ops {
                let r = op(a, b);
                if !members.contains(&r) {
                    out.push(TopologyViolation {
                        axiom: name,
                        operands: vec![(*a).clone(), (*b).clone()],
                        result: r,
                    });
                }
            }
        }
    }
    out
}

/// Checks closure of the opens under `⋁`, `⊕`, `⊙`, `∧` together with the
/// dual properties of the closed sets.
pub fn verify_topology(t: &MvTopology) -> TopologyReport {
    let exhaustive = t.opens.len() <= SUBSET_JOIN_LIMIT;
    let (zero, one) = (t.zero(), t.one());
    let violations = closure_violations(
        &t.opens,
        &zero,
        &one,
        ("arbitrary joins", FuzzySet::join, &zero),
        [
            ("closed under ⊙", FuzzySet::odot),
            ("closed under ⊕", FuzzySet::oplus),
            ("closed under ∧", FuzzySet::meet),
        ],
        exhaustive,
    );
    let dual_violations = closure_violations(
        &t.closed_sets(),
        &zero,
        &one,
        ("closed sets: arbitrary meets", FuzzySet::meet, &one),
        [
            ("closed sets: closed under ⊙", FuzzySet::odot),
            ("closed sets: closed under ⊕", FuzzySet::oplus),
            ("closed sets: closed under ∨", FuzzySet::join),
        ],
        exhaustive,
    );
    TopologyReport {
        pass: violations.is_empty() && dual_violations.is_empty(),
        opens: t.opens.len(),
        subset_joins_exhaustive: exhaustive,
        violations,
        dual_violations,
    }
}

/// `s` rewritten over denominator `denom`, if its values are multiples of `1/denom`.
pub fn express(s: &FuzzySet, denom: u32) -> Option<FuzzySet> {
    if denom.is_multiple_of(s.denom()) {
        return s.rescale(denom).ok();
    }
    let values = s.numerators().iter().map(|&v| {
        let r = Rational::new(v as i64, s.denom() as i64);
        r.scaled(denom as i64).map(|n| n as u32)
    });
    Some(FuzzySet {
        denom,
        values: values.collect::<Option<Vec<_>>>()?,
    })
}

fn open_in(t: &MvTopology, s: &FuzzySet) -> bool {
    express(s, t.denom).is_some_and(|s| t.opens.contains(&s))
}

fn closed_in(t: &MvTopology, s: &FuzzySet) -> bool {
    express(&s.neg(), t.denom).is_some_and(|s| t.opens.contains(&s))
}

/// A point map `f: X → Y` between two finite MV-spaces.
#[derive(Clone, Debug)]
pub struct MvSpaceMap {
    pub source: MvTopology,
    pub target: MvTopology,
    pub f: Vec<usize>,
}

impl MvSpaceMap {
    pub fn new(source: MvTopology, target: MvTopology, f: Vec<usize>) -> Result<Self> {
        if f.len() != source.len() || f.iter().any(|&y| y >= target.len()) {
            return Err(MvError::InvalidDescriptor(
                "point map is not a total map between the spaces".into(),
            ));
        }
        Ok(MvSpaceMap { source, target, f })
    }

    pub fn identity(t: MvTopology) -> Self {
        let f = (0..t.len()).collect();
        MvSpaceMap {
            source: t.clone(),
            target: t,
            f,
        }
    }

    /// `α ∘ f`.
    pub fn preimage(&self, alpha: &FuzzySet) -> FuzzySet {
        FuzzySet {
            denom: alpha.denom(),
            values: self.f.iter().map(|&y| alpha.numerators()[y]).collect(),
        }
    }

    /// `y ↦ ⋁_{f(x)=y} α(x)`, zero off the range.
    pub fn image(&self, alpha: &FuzzySet) -> FuzzySet {
        let mut values = vec![0; self.target.len()];
        for (x, &y) in self.f.iter().enumerate() {
            values[y] = values[y].max(alpha.numerators()[x]);
        }
        FuzzySet {
            denom: alpha.denom(),
            values,
        }
    }

    pub fn is_bijective(&self) -> bool {
        let range: BTreeSet<usize> = self.f.iter().copied().collect();
        range.len() == self.f.len() && range.len() == self.target.len()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MapFlags {
    pub continuous: bool,
    pub open: bool,
    pub closed: bool,
    pub homeomorphism: bool,
    /// Continuity decided from the supplied base alone.
    pub continuous_on_base: Option<bool>,
}

pub fn check_map(m: &MvSpaceMap, base: Option<&[FuzzySet]>) -> MapFlags {
    let continuous = m
        .target
        .opens
        .iter()
        .all(|o| open_in(&m.source, &m.preimage(o)));
    let open = m
        .source
        .opens
        .iter()
        .all(|o| open_in(&m.target, &m.image(o)));
    let closed = m
        .source
        .closed_sets()
        .iter()
        .all(|c| closed_in(&m.target, &m.image(c)));
    let continuous_on_base = base.map(|b| b.iter().all(|o| open_in(&m.source, &m.preimage(o))));
    MapFlags {
        continuous,
        open,
        closed,
        homeomorphism: continuous && open && m.is_bijective(),
        continuous_on_base,
    }
}

pub fn is_covering(t: &MvTopology, family: &[FuzzySet]) -> bool {
    family.iter().fold(t.zero(), |acc, s| acc.join(s)).is_one()
}

/// Whether `n_1 α_1 ⊕ ... ⊕ n_k α_k = 1`.
pub fn is_additive_covering(t: &MvTopology, family: &[(FuzzySet, u32)]) -> bool {
    family
        .iter()
        .fold(t.zero(), |acc, (s, n)| acc.oplus(&s.multiple(*n)))
        .is_one()
}

/// An additive covering drawn from `family`, with multiplicities lowered as far
/// as they go one at a time.
pub fn additive_subcovering(t: &MvTopology, family: &[FuzzySet]) -> Option<Vec<(FuzzySet, u32)>> {
    let mut chosen: Vec<(FuzzySet, u32)> = family.iter().map(|s| (s.clone(), t.denom)).collect();
    if !is_additive_covering(t, &chosen) {
        return None;
    }
    for k in 0..chosen.len() {
        while chosen[k].1 > 0 {
            chosen[k].1 -= 1;
            if !is_additive_covering(t, &chosen) {
                chosen[k].1 += 1;
                break;
            }
        }
    }
    chosen.retain(|(_, n)| *n > 0);
    Some(chosen)
}

/// Upper bound on the open coverings inspected by the compactness checks.
pub const COVERING_LIMIT: usize = 20_000;

#[derive(Clone, Debug, Serialize)]
pub struct CompactnessReport {
    pub compact: bool,
    pub strongly_compact: bool,
    pub coverings_examined: usize,
    /// False when [`COVERING_LIMIT`] cut the enumeration short.
    pub exhaustive: bool,
    pub counterexample: Option<Vec<FuzzySet>>,
}

/// Every open covering contains one that picks, for each point, a single open
/// taking the value 1 there. The checks run over these point-wise choices.
fn choice_coverings(t: &MvTopology, mut visit: impl FnMut(&[FuzzySet]) -> bool) -> (usize, bool) {
    let candidates: Vec<Vec<&FuzzySet>> = (0..t.len())
        .map(|x| {
            t.opens
                .iter()
                .filter(|o| o.numerators()[x] == t.denom)
                .collect()
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut idx = vec![0usize; t.len()];
    let mut examined = 0;
    loop {
        let family: BTreeSet<FuzzySet> = idx
            .iter()
            .enumerate()
            .map(|(x, &i)| candidates[x][i].clone())
            .collect();
        if seen.insert(family.clone()) {
            examined += 1;
            if !visit(&family.into_iter().collect::<Vec<_>>()) || examined >= COVERING_LIMIT {
                return (examined, false);
            }
        }
        let mut x = 0;
        while x < idx.len() && idx[x] + 1 == candidates[x].len() {
            idx[x] = 0;
            x += 1;
        }
        if x == idx.len() {
            return (examined, true);
        }
        idx[x] += 1;
    }
}

pub fn compactness(t: &MvTopology) -> CompactnessReport {
    let mut compact = true;
    let mut strongly_compact = true;
    let mut counterexample = None;
    let (coverings_examined, complete) = choice_coverings(t, |family| {
        let additive = additive_subcovering(t, family).is_some();
        let finite = is_covering(t, family);
        if !additive || !finite {
            compact &= additive;
            strongly_compact &= finite;
            counterexample = Some(family.to_vec());
            return false;
        }
        true
    });
    CompactnessReport {
        compact,
        strongly_compact,
        coverings_examined,
        exhaustive: complete || counterexample.is_some(),
        counterexample,
    }
}

pub fn is_compact(t: &MvTopology) -> bool {
    compactness(t).compact
}

pub fn is_strongly_compact(t: &MvTopology) -> bool {
    compactness(t).strongly_compact
}

/// Separating opens `o_x, o_y` with `o_x(x) = o_y(y) = 1` and `o_x ∧ o_y = 0`.
pub fn separating_opens(t: &MvTopology, x: usize, y: usize) -> Option<(FuzzySet, FuzzySet)> {
    let at = |p: usize| t.opens.iter().filter(move |o| o.numerators()[p] == t.denom);
    for ox in at(x) {
        for oy in at(y) {
            if ox.meet(oy).is_zero() {
                return Some((ox.clone(), oy.clone()));
            }
        }
    }
    None
}

pub fn is_hausdorff(t: &MvTopology) -> bool {
    (0..t.len()).all(|x| (x + 1..t.len()).all(|y| separating_opens(t, x, y).is_some()))
}

/// Elements used to probe an algebra: all of them when finite, bounded samples otherwise.
pub fn probe_elements(a: &MvAlgebra) -> Result<Vec<MvElement>> {
    if a.is_finite() {
        a.enumerate()
    } else {
        Ok(a.sample_elements(2))
    }
}

/// `R(a) = {M ∈ Max A : a ∉ M}` as a set of indices into `max`.
pub fn r_set(max: &[Ideal], x: &MvElement) -> BTreeSet<usize> {
    (0..max.len()).filter(|&i| !max[i].contains(x)).collect()
}

/// The Zariski topology on `Max A` as a crisp MV-topology.
#[derive(Clone, Debug, Serialize)]
pub struct ZariskiReport {
    pub max: Vec<Ideal>,
    pub topology: MvTopology,
    pub basis: Vec<(MvElement, BTreeSet<usize>)>,
    pub lemma_identities: bool,
    pub r_one_is_everything: bool,
    pub compact: bool,
    pub hausdorff: bool,
}

pub fn zariski_max(a: &MvAlgebra) -> Result<ZariskiReport> {
    let max = maximal_ideals(a)?;
    let points: Vec<String> = max.iter().map(|m| m.to_string()).collect();
    let elements = probe_elements(a)?;
    let basis: Vec<(MvElement, BTreeSet<usize>)> = elements
        .iter()
        .map(|x| (x.clone(), r_set(&max, x)))
        .collect();
    let mut lemma_identities = true;
    for (x, rx) in &basis {
        for (y, ry) in &basis {
            let union: BTreeSet<usize> = rx.union(ry).copied().collect();
            let inter: BTreeSet<usize> = rx.intersection(ry).copied().collect();
            lemma_identities &= r_set(&max, &a.join(x, y)?) == union
                && r_set(&max, &a.oplus(x, y)?) == union
                && r_set(&max, &a.meet(x, y)?) == inter;
        }
    }
    let n = max.len();
    let crisp: Vec<FuzzySet> = basis
        .iter()
        .map(|(_, r)| FuzzySet::crisp(n, 1, r))
        .collect();
    let topology = generate_topology(points, 1, &crisp)?;
    let r_one_is_everything = r_set(&max, &a.one()).len() == n;
    let compact = is_compact(&topology);
    let hausdorff = is_hausdorff(&topology);
    Ok(ZariskiReport {
        max,
        topology,
        basis,
        lemma_identities,
        r_one_is_everything,
        compact,
        hausdorff,
    })
}

/// `τ_A` on `Max A` together with the table `a ↦ â`.
#[derive(Clone, Debug, Serialize)]
pub struct MvSpectrum {
    pub max: Vec<Ideal>,
    pub denom: u32,
    pub iota: Vec<(MvElement, FuzzySet)>,
    pub topology: MvTopology,
    /// `supp(â) = R(a)` for every tabulated `a`.
    pub support_is_r: bool,
    /// Every Zariski open of `Max A`, as a crisp set, lies in `τ_A`.
    pub zariski_coarser: bool,
    /// `â = 0` exactly when `a ∈ Rad A`.
    pub kernel_is_radical: bool,
    /// `H(a)` is the support of a join of basic opens, for every tabulated `a`.
    pub h_is_open: bool,
    pub h_failures: Vec<MvElement>,
}

impl MvSpectrum {
    pub fn hat(&self, x: &MvElement) -> Option<&FuzzySet> {
        self.iota.iter().find(|(y, _)| y == x).map(|(_, s)| s)
    }
}

/// `â(M)` for every maximal ideal, as exact rationals.
pub fn hat_values(family: &[crate::spectra::LocalFactor], x: &MvElement) -> Result<Vec<Rational>> {
    family
        .iter()
        .map(|f| f.view.height(&f.projection.image(x)?))
        .collect()
}

pub fn mv_spectrum(a: &MvAlgebra) -> Result<MvSpectrum> {
    let family = local_family(a)?;
    let max: Vec<Ideal> = family.iter().map(|f| f.max_ideal.clone()).collect();
    let denom = family.iter().fold(1i64, |d, f| d.lcm(&f.view.unit()));
    let denom = u32::try_from(denom)
        .map_err(|_| MvError::SpectrumValue(format!("denominator {denom} too large")))?;
    let elements = probe_elements(a)?;
    let mut iota = Vec::with_capacity(elements.len());
    for x in &elements {
        iota.push((
            x.clone(),
            FuzzySet::from_rationals(denom, &hat_values(&family, x)?)?,
        ));
    }
    let points: Vec<String> = max.iter().map(|m| m.to_string()).collect();
    let base: Vec<FuzzySet> = iota
        .iter()
        .map(|(_, s)| s.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let topology = generate_topology(points, denom, &base)?;

    let support_is_r = iota.iter().all(|(x, s)| s.support() == r_set(&max, x));
    let zariski = zariski_max(a)?;
    let zariski_coarser = zariski
        .topology
        .opens
        .iter()
        .all(|o| express(o, denom).is_some_and(|o| topology.opens.contains(&o)));
    let rad = crate::spectra::radical(a)?;
    let kernel_is_radical = iota.iter().all(|(x, s)| s.is_zero() == rad.contains(x));

    let o_ms = max.iter().map(|m| o_p(a, m)).collect::<Result<Vec<_>>>()?;
    let mut h_failures = Vec::new();
    for x in &elements {
        let h: BTreeSet<usize> = (0..max.len()).filter(|&i| o_ms[i].contains(x)).collect();
        let mut witnesses: BTreeMap<usize, FuzzySet> = BTreeMap::new();
        for &m in &h {
            for (b, bh) in &iota {
                if !max[m].contains(b) && a.meet(x, b)? == a.zero() {
                    witnesses.insert(m, bh.clone());
                    break;
                }
            }
        }
        let joined = witnesses
            .values()
            .fold(topology.zero(), |acc, s| acc.join(s));
        if witnesses.len() != h.len() || joined.support() != h || !topology.opens.contains(&joined)
        {
            h_failures.push(x.clone());
        }
    }
    Ok(MvSpectrum {
        max,
        denom,
        iota,
        topology,
        support_is_r,
        zariski_coarser,
        kernel_is_radical,
        h_is_open: h_failures.is_empty(),
        h_failures,
    })
}
