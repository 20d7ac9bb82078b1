//! Abelian ℓ-groups presented as lexicographic products of integer blocks,
//! the Γ and Δ functors, and ℓ-group completion of radical monoids.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgebraKind, MvAlgebra, MvElement};
use crate::error::{MvError, Result};
use crate::spectra::{Ideal, IdealCarrier};

/// `ℤ^{r₁} ×_lex ℤ^{r₂} ×_lex …`: blocks compare lexicographically, the last
/// block coordinatewise. Only the last block may have rank above one, which
/// keeps the order a lattice order. The trivial group is `[0]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LexGroup {
    ranks: Vec<usize>,
}

/// An integer vector partitioned by the blocks of its [`LexGroup`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl LexGroup {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(MvError::InvalidDescriptor("empty rank list".into()));
        }
        if ranks == [0] {
            return Ok(Self::trivial());
        }
        if ranks.contains(&0) {
            return Err(MvError::InvalidDescriptor(format!(
                "zero rank inside a nontrivial rank list {ranks:?}"
            )));
        }
        if ranks[..ranks.len() - 1].iter().any(|&r| r != 1) {
            return Err(MvError::InvalidDescriptor(format!(
                "ranks {ranks:?}: only the last lexicographic block may exceed rank 1 \
                 (otherwise the order is not a lattice order)"
            )));
        }
        Ok(LexGroup { ranks })
    }

    pub fn trivial() -> Self {
        LexGroup { ranks: vec![0] }
    }

    /// `ℤ^r` with the coordinatewise order.
    pub fn free(rank: usize) -> Self {
        if rank == 0 {
            Self::trivial()
        } else {
            LexGroup { ranks: vec![rank] }
        }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn dimension(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.dimension() == 0
    }

    pub fn is_total(&self) -> bool {
        self.ranks.last().is_some_and(|&r| r <= 1)
    }

    fn prefix_len(&self) -> usize {
        self.dimension() - self.ranks.last().copied().unwrap_or(0)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.dimension()])
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.dimension()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().map(|x| -x).collect())
    }

    /// Partial order comparison; `None` when incomparable.
    pub fn partial_cmp(&self, a: &[i64], b: &[i64]) -> Option<Ordering> {
        let p = self.prefix_len();
        match a[..p].cmp(&b[..p]) {
            Ordering::Equal => {}
            other => return Some(other),
        }
        let (mut le, mut ge) = (true, true);
        for (x, y) in a[p..].iter().zip(&b[p..]) {
            le &= x <= y;
            ge &= x >= y;
        }
        match (le, ge) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    pub fn le(&self, a: &GroupElement, b: &GroupElement) -> bool {
        matches!(
            self.partial_cmp(&a.0, &b.0),
            Some(Ordering::Less | Ordering::Equal)
        )
    }

    pub fn meet(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(self.meet_slices(&a.0, &b.0))
    }

    pub fn join(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(self.join_slices(&a.0, &b.0))
    }

    pub(crate) fn meet_slices(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let p = self.prefix_len();
        match a[..p].cmp(&b[..p]) {
            Ordering::Less => a.to_vec(),
            Ordering::Greater => b.to_vec(),
            Ordering::Equal => a[..p]
                .iter()
                .copied()
                .chain(a[p..].iter().zip(&b[p..]).map(|(x, y)| *x.min(y)))
                .collect(),
        }
    }

    pub(crate) fn join_slices(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let p = self.prefix_len();
        match a[..p].cmp(&b[..p]) {
            Ordering::Less => b.to_vec(),
            Ordering::Greater => a.to_vec(),
            Ordering::Equal => a[..p]
                .iter()
                .copied()
                .chain(a[p..].iter().zip(&b[p..]).map(|(x, y)| *x.max(y)))
                .collect(),
        }
    }

    /// `self ×_lex other`; fails when the result would not be lattice ordered.
    pub fn lex_product(&self, other: &LexGroup) -> Result<LexGroup> {
        if self.is_trivial() {
            return Ok(other.clone());
        }
        if other.is_trivial() {
            return Ok(self.clone());
        }
        let mut ranks = self.ranks.clone();
        ranks.extend(&other.ranks);
        LexGroup::new(ranks)
    }

    /// Coordinatewise direct sum. Supported when every summand is a single
    /// block, so the result is again `ℤ^r`.
    pub fn direct_sum(parts: &[LexGroup]) -> Result<LexGroup> {
        let nontrivial: Vec<&LexGroup> = parts.iter().filter(|g| !g.is_trivial()).collect();
        match nontrivial.as_slice() {
            [] => Ok(LexGroup::trivial()),
            [one] => Ok((*one).clone()),
            many => {
                if many.iter().any(|g| g.ranks.len() != 1) {
                    return Err(MvError::CompletionUnsupported(format!(
                        "direct sum of multi-block groups {:?}",
                        many.iter().map(|g| g.ranks.clone()).collect::<Vec<_>>()
                    )));
                }
                Ok(LexGroup::free(many.iter().map(|g| g.dimension()).sum()))
            }
        }
    }
}

impl fmt::Display for LexGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .ranks
            .iter()
            .map(|&r| {
                if r == 1 {
                    "Z".to_string()
                } else {
                    format!("Z^{r}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" x_lex "))
    }
}

/// A lattice-ordered group together with a positive unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitalGroup {
    pub group: LexGroup,
    pub unit: GroupElement,
}

impl UnitalGroup {
    pub fn new(group: LexGroup, unit: GroupElement) -> Result<Self> {
        if !group.contains(&unit) {
            return Err(MvError::InvalidDescriptor(format!(
                "unit {unit} does not belong to {group}"
            )));
        }
        if !group.le(&group.zero(), &unit) {
            return Err(MvError::DegenerateUnit);
        }
        Ok(UnitalGroup { group, unit })
    }
}

/// Mundici's Γ on the supported groups `ℤ ×_lex G` with unit `(u, 0, …, 0)`.
pub fn gamma(g: &UnitalGroup) -> Result<MvAlgebra> {
    if g.group.is_trivial() || g.unit == g.group.zero() {
        return Err(MvError::DegenerateUnit);
    }
    if g.group.ranks()[0] != 1 {
        return Err(MvError::Unsupported(format!(
            "Γ needs a totally ordered first block, got {}",
            g.group
        )));
    }
    let u = g.unit.0[0];
    if u <= 0 {
        return Err(MvError::DegenerateUnit);
    }
    if g.unit.0[1..].iter().any(|&c| c != 0) {
        return Err(MvError::Unsupported(format!(
            "only units of the form (u,0,…,0) are supported, got {}",
            g.unit
        )));
    }
    let tail = &g.group.ranks()[1..];
    if tail.is_empty() {
        MvAlgebra::chain(u as u32)
    } else {
        MvAlgebra::gamma_lex(u, tail.to_vec())
    }
}

/// Δ(G) = Γ(ℤ ×_lex G, (1,0)).
pub fn delta(g: &LexGroup) -> MvAlgebra {
    if g.is_trivial() {
        MvAlgebra::chain(1).expect("chain(1) is valid")
    } else {
        MvAlgebra::gamma_lex(1, g.ranks().to_vec()).expect("ranks of a valid LexGroup")
    }
}

/// Structural inverse of [`gamma`] for the Γ-presented kinds.
pub fn gamma_inverse(a: &MvAlgebra) -> Option<UnitalGroup> {
    match a.kind() {
        AlgebraKind::FiniteChain(n) => Some(UnitalGroup {
            group: LexGroup::free(1),
            unit: GroupElement(vec![*n as i64]),
        }),
        AlgebraKind::GammaLex { unit, group } => {
            let mut u = vec![0; group.dimension()];
            u[0] = *unit;
            Some(UnitalGroup {
                group: group.clone(),
                unit: GroupElement(u),
            })
        }
        _ => None,
    }
}

/// Navigation step from an algebra element down to a lex payload.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Factor(usize),
    Point(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Piece {
    path: Vec<Step>,
    coords: Vec<usize>,
    group: LexGroup,
}

/// The ℓ-group generated by a cancellative radical monoid, with its embedding η.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub algebra: MvAlgebra,
    pub group: LexGroup,
    pieces: Vec<Piece>,
}

impl Completion {
    /// η: monoid element ↦ group element.
    pub fn eta(&self, x: &MvElement) -> Result<GroupElement> {
        let mut out = Vec::with_capacity(self.group.dimension());
        for piece in &self.pieces {
            let payload = follow(x, &piece.path)?;
            for &c in &piece.coords {
                out.push(payload[c]);
            }
        }
        Ok(GroupElement(out))
    }

    /// Rebuilds the monoid element whose η-image is `g`; `g` must lie in the
    /// positive cone.
    pub fn eta_inverse(&self, g: &GroupElement) -> Result<MvElement> {
        if !self.group.contains(g) || !self.group.le(&self.group.zero(), g) {
            return Err(MvError::InternalConsistency(format!(
                "η⁻¹ applied outside the positive cone of {}: {g}",
                self.group
            )));
        }
        let mut x = self.algebra.zero();
        let mut offset = 0;
        for piece in &self.pieces {
            let values = &g.0[offset..offset + piece.coords.len()];
            offset += piece.coords.len();
            x = set_coords(&x, &piece.path, &piece.coords, values)?;
        }
        Ok(x)
    }
}

fn follow<'a>(x: &'a MvElement, path: &[Step]) -> Result<&'a [i64]> {
    let mut cur = x;
    for step in path {
        cur = match (step, cur) {
            (Step::Factor(i), MvElement::Tuple(items)) => &items[*i],
            (Step::Point(p), MvElement::Cofinite(f)) => f.value_at(*p),
            _ => {
                return Err(MvError::InternalConsistency(format!(
                    "completion path {step:?} does not fit element {cur}"
                )))
            }
        };
    }
    match cur {
        MvElement::Lex(v) => Ok(v),
        other => Err(MvError::InternalConsistency(format!(
            "completion path ends at non-lex element {other}"
        ))),
    }
}

fn set_coords(x: &MvElement, path: &[Step], coords: &[usize], values: &[i64]) -> Result<MvElement> {
    match (path.first(), x) {
        (None, MvElement::Lex(v)) => {
            let mut v = v.clone();
            for (&c, &val) in coords.iter().zip(values) {
                v[c] = val;
            }
            Ok(MvElement::Lex(v))
        }
        (Some(Step::Factor(i)), MvElement::Tuple(items)) => {
            let mut items = items.clone();
            items[*i] = set_coords(&items[*i], &path[1..], coords, values)?;
            Ok(MvElement::Tuple(items))
        }
        (Some(Step::Point(p)), MvElement::Cofinite(f)) => {
            let inner = set_coords(f.value_at(*p), &path[1..], coords, values)?;
            Ok(MvElement::Cofinite(f.with_value(*p, inner)))
        }
        _ => Err(MvError::InternalConsistency(format!(
            "cannot place completion coordinates into {x}"
        ))),
    }
}

/// Group of a GammaLex tail sub-block set, ordered as inherited from `group`.
fn tail_subgroup(group: &LexGroup, coords: &[usize]) -> Result<LexGroup> {
    let mut ranks = Vec::new();
    let mut start = 1; // payload index 0 is the height
    for &r in &group.ranks()[1..] {
        let count = coords
            .iter()
            .filter(|&&c| c >= start && c < start + r)
            .count();
        if count > 0 {
            ranks.push(count);
        } else if !ranks.is_empty() {
            return Err(MvError::CompletionUnsupported(format!(
                "tail coordinates {coords:?} are not convex in {group}"
            )));
        }
        start += r;
    }
    if ranks.is_empty() {
        Ok(LexGroup::trivial())
    } else {
        LexGroup::new(ranks)
    }
}

fn pieces_for(algebra: &MvAlgebra, ideal: &Ideal) -> Result<Vec<Piece>> {
    match (algebra.kind(), ideal.carrier()) {
        (_, IdealCarrier::Explicit(set)) => {
            if set.len() == 1 && set.contains(&algebra.zero()) {
                Ok(Vec::new())
            } else {
                Err(MvError::CompletionUnsupported(format!(
                    "finite monoid with {} elements is not cancellative",
                    set.len()
                )))
            }
        }
        (AlgebraKind::GammaLex { group, .. }, IdealCarrier::Tail(coords)) => {
            let coords: Vec<usize> = coords.iter().copied().collect();
            let sub = tail_subgroup(group, &coords)?;
            if sub.is_trivial() {
                return Ok(Vec::new());
            }
            Ok(vec![Piece {
                path: Vec::new(),
                coords,
                group: sub,
            }])
        }
        (AlgebraKind::Product(factors), IdealCarrier::Product(ideals)) => {
            let mut out = Vec::new();
            for (i, (f, id)) in factors.iter().zip(ideals).enumerate() {
                for mut piece in pieces_for(f, id)? {
                    piece.path.insert(0, Step::Factor(i));
                    out.push(piece);
                }
            }
            Ok(out)
        }
        (
            AlgebraKind::Quotient {
                base,
                ideal: killed,
                ..
            },
            IdealCarrier::Lifted(inner),
        ) => quotient_pieces(base, killed, inner),
        _ => Err(MvError::CompletionUnsupported(format!(
            "monoid {} of {}",
            ideal, algebra
        ))),
    }
}

/// Pieces of `J/I` inside `B/I`.
fn quotient_pieces(base: &MvAlgebra, killed: &Ideal, kept: &Ideal) -> Result<Vec<Piece>> {
    match (base.kind(), killed.carrier(), kept.carrier()) {
        (AlgebraKind::GammaLex { group, .. }, IdealCarrier::Tail(i), IdealCarrier::Tail(j)) => {
            let coords: Vec<usize> = j.difference(i).copied().collect();
            let sub = tail_subgroup(group, &coords)?;
            if sub.is_trivial() {
                return Ok(Vec::new());
            }
            Ok(vec![Piece {
                path: Vec::new(),
                coords,
                group: sub,
            }])
        }
        (_, _, IdealCarrier::Full) | (_, IdealCarrier::Full, _) => Ok(Vec::new()),
        (AlgebraKind::GammaLex { .. }, IdealCarrier::Tail(_), _) => Err(
            MvError::CompletionUnsupported(format!("{kept} over {killed}")),
        ),
        (AlgebraKind::Product(factors), IdealCarrier::Product(is), IdealCarrier::Product(js)) => {
            let mut out = Vec::new();
            for (n, f) in factors.iter().enumerate() {
                for mut piece in quotient_pieces(f, &is[n], &js[n])? {
                    piece.path.insert(0, Step::Factor(n));
                    out.push(piece);
                }
            }
            Ok(out)
        }
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise {
                at: ia,
                elsewhere: ie,
            },
            IdealCarrier::Pointwise { at: ja, .. },
        ) => {
            if !matches!(ie.carrier(), IdealCarrier::Full) {
                return Err(MvError::CompletionUnsupported(
                    "radical spread over infinitely many points".into(),
                ));
            }
            let mut out = Vec::new();
            for (p, i_p) in ia {
                let j_p = ja
                    .get(p)
                    .cloned()
                    .unwrap_or_else(|| kept.ideal_at_point(*p));
                for mut piece in quotient_pieces(codomain, i_p, &j_p)? {
                    piece.path.insert(0, Step::Point(*p));
                    out.push(piece);
                }
            }
            Ok(out)
        }
        (_, IdealCarrier::Explicit(_), IdealCarrier::Explicit(_)) if base.is_finite() => {
            if killed == kept {
                Ok(Vec::new())
            } else {
                Err(MvError::CompletionUnsupported(
                    "finite radical quotient is not cancellative".into(),
                ))
            }
        }
        _ => Err(MvError::CompletionUnsupported(format!(
            "{kept} over {killed} in {base}"
        ))),
    }
}

/// ℓ-group completion of the ⊕-monoid of `ideal` (expected inside the radical).
pub fn group_completion(algebra: &MvAlgebra, ideal: &Ideal) -> Result<Completion> {
    let pieces = pieces_for(algebra, ideal)?;
    let group = LexGroup::direct_sum(&pieces.iter().map(|p| p.group.clone()).collect::<Vec<_>>())?;
    Ok(Completion {
        algebra: algebra.clone(),
        group,
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra;

    #[test]
    fn lex_order_is_lexicographic_then_coordinatewise() {
        let g = LexGroup::new(vec![1, 2]).unwrap();
        assert_eq!(
            g.partial_cmp(&[0, 5, -9], &[1, -3, -3]),
            Some(Ordering::Less)
        );
        assert_eq!(g.partial_cmp(&[1, 1, 2], &[1, 2, 1]), None);
        assert_eq!(g.meet_slices(&[1, 1, 2], &[1, 2, 1]), vec![1, 1, 1]);
        assert_eq!(g.join_slices(&[0, 9, 9], &[1, 0, 0]), vec![1, 0, 0]);
    }

    #[test]
    fn non_lattice_ranks_rejected() {
        assert!(LexGroup::new(vec![2, 1]).is_err());
        assert!(LexGroup::new(vec![]).is_err());
        assert!(LexGroup::new(vec![0]).unwrap().is_trivial());
    }

    #[test]
    fn gamma_examples() {
        let z = LexGroup::free(1);
        let a = gamma(&UnitalGroup::new(z, GroupElement(vec![2])).unwrap()).unwrap();
        assert_eq!(a, MvAlgebra::chain(2).unwrap());

        let zz = LexGroup::new(vec![1, 1]).unwrap();
        let k3 = gamma(&UnitalGroup::new(zz.clone(), GroupElement(vec![2, 0])).unwrap()).unwrap();
        assert_eq!(k3, MvAlgebra::gamma_lex(2, vec![1]).unwrap());

        let zero = UnitalGroup {
            group: zz,
            unit: GroupElement(vec![0, 0]),
        };
        assert_eq!(gamma(&zero), Err(MvError::DegenerateUnit));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&LexGroup::trivial()), MvAlgebra::chain(1).unwrap());
        assert_eq!(
            delta(&LexGroup::free(1)),
            MvAlgebra::gamma_lex(1, vec![1]).unwrap()
        );
        assert_eq!(
            delta(&LexGroup::new(vec![1, 1]).unwrap()),
            MvAlgebra::gamma_lex(1, vec![1, 1]).unwrap()
        );
    }

    #[test]
    fn gamma_round_trip() {
        for a in [
            MvAlgebra::gamma_lex(2, vec![1]).unwrap(),
            MvAlgebra::gamma_lex(1, vec![2]).unwrap(),
            MvAlgebra::chain(4).unwrap(),
        ] {
            let g = gamma_inverse(&a).unwrap();
            assert_eq!(gamma(&g).unwrap(), a);
        }
    }

    #[test]
    fn completion_of_k3_radical_is_z() {
        let k3 = MvAlgebra::gamma_lex(2, vec![1]).unwrap();
        let rad = spectra::radical(&k3).unwrap();
        let c = group_completion(&k3, &rad).unwrap();
        assert_eq!(c.group, LexGroup::free(1));
        for n in 0..10 {
            let x = MvElement::Lex(vec![0, n]);
            assert_eq!(c.eta(&x).unwrap(), GroupElement(vec![n]));
            assert_eq!(c.eta_inverse(&GroupElement(vec![n])).unwrap(), x);
        }
    }

    #[test]
    fn completion_of_finite_radical_is_trivial() {
        let a = MvAlgebra::product(vec![
            MvAlgebra::chain(1).unwrap(),
            MvAlgebra::chain(3).unwrap(),
        ])
        .unwrap();
        let rad = spectra::radical(&a).unwrap();
        let c = group_completion(&a, &rad).unwrap();
        assert!(c.group.is_trivial());
        assert_eq!(c.eta(&a.zero()).unwrap(), GroupElement(vec![]));
    }

    #[test]
    fn completion_of_rank_two_tail() {
        let a = MvAlgebra::gamma_lex(1, vec![2]).unwrap();
        let rad = spectra::radical(&a).unwrap();
        let c = group_completion(&a, &rad).unwrap();
        assert_eq!(c.group, LexGroup::free(2));
        assert_eq!(
            c.eta(&MvElement::Lex(vec![0, 3, 1])).unwrap(),
            GroupElement(vec![3, 1])
        );
    }

    #[test]
    fn eta_is_additive_and_injective_on_radical_samples() {
        let a = MvAlgebra::gamma_lex(1, vec![1, 1]).unwrap();
        let rad = spectra::radical(&a).unwrap();
        let c = group_completion(&a, &rad).unwrap();
        let samples: Vec<MvElement> = a
            .sample_elements(3)
            .into_iter()
            .filter(|x| rad.contains(x))
            .collect();
        for x in &samples {
            for y in &samples {
                let sum = a.oplus(x, y).unwrap();
                assert_eq!(
                    c.eta(&sum).unwrap(),
                    c.group.add(&c.eta(x).unwrap(), &c.eta(y).unwrap())
                );
                assert_eq!(c.eta(x).unwrap() == c.eta(y).unwrap(), x == y);
            }
        }
    }
}
