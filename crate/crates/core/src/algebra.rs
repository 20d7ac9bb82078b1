//! MV-algebra descriptors, elements, operations and homomorphisms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::ell_groups::LexGroup;
use crate::error::{MvError, Result};
use crate::rational::Rational;
use crate::spectra::{Ideal, IdealCarrier};

/// Points of the cofinite carrier that samples may disturb.
pub const DESK_WINDOW: u64 = 3;
/// Stand-in for "all remaining points" of the cofinite carrier.
pub const GENERIC_POINT: u64 = u64::MAX;
/// Default budget for subalgebra closures.
pub const DEFAULT_CLOSURE_BUDGET: usize = 10_000;
/// Multiples tried by the infinitesimal test.
pub const INFINITESIMAL_BOUND: u32 = 64;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MvElement {
    /// `k/n` in the chain `Ł_n`.
    Chain(Rational),
    Tuple(Vec<MvElement>),
    /// `(h, t₁, …, t_k)` in `Γ(ℤ ×_lex G, (u,0…))`.
    Lex(Vec<i64>),
    Cofinite(CofiniteValue),
}

/// A function that equals `default` at every point outside `exceptions`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CofiniteValue {
    pub default: Box<MvElement>,
    pub exceptions: BTreeMap<u64, MvElement>,
}

impl CofiniteValue {
    pub fn new(default: MvElement, exceptions: BTreeMap<u64, MvElement>) -> Self {
        let exceptions = exceptions
            .into_iter()
            .filter(|(_, v)| *v != default)
            .collect();
        CofiniteValue {
            default: Box::new(default),
            exceptions,
        }
    }

    pub fn constant(value: MvElement) -> Self {
        CofiniteValue {
            default: Box::new(value),
            exceptions: BTreeMap::new(),
        }
    }

    pub fn value_at(&self, point: u64) -> &MvElement {
        self.exceptions.get(&point).unwrap_or(&self.default)
    }

    pub fn with_value(&self, point: u64, value: MvElement) -> Self {
        let mut exceptions = self.exceptions.clone();
        exceptions.insert(point, value);
        CofiniteValue::new((*self.default).clone(), exceptions)
    }

    fn combine(
        &self,
        other: &CofiniteValue,
        f: impl Fn(&MvElement, &MvElement) -> Result<MvElement>,
    ) -> Result<Self> {
        let default = f(&self.default, &other.default)?;
        let keys: BTreeSet<u64> = self
            .exceptions
            .keys()
            .chain(other.exceptions.keys())
            .copied()
            .collect();
        let mut exceptions = BTreeMap::new();
        for k in keys {
            exceptions.insert(k, f(self.value_at(k), other.value_at(k))?);
        }
        Ok(CofiniteValue::new(default, exceptions))
    }

    fn map(&self, f: impl Fn(&MvElement) -> Result<MvElement>) -> Result<Self> {
        let default = f(&self.default)?;
        let mut exceptions = BTreeMap::new();
        for (k, v) in &self.exceptions {
            exceptions.insert(*k, f(v)?);
        }
        Ok(CofiniteValue::new(default, exceptions))
    }
}

impl MvElement {
    pub fn chain(k: i64, n: i64) -> Self {
        MvElement::Chain(Rational::new(k, n))
    }

    pub fn lex(coords: &[i64]) -> Self {
        MvElement::Lex(coords.to_vec())
    }
}

impl fmt::Display for MvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MvElement::Chain(r) => write!(f, "{r}"),
            MvElement::Tuple(items) => {
                write!(f, "<")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ">")
            }
            MvElement::Lex(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            MvElement::Cofinite(c) => {
                write!(f, "{{default {}", c.default)?;
                for (k, v) in &c.exceptions {
                    if *k == GENERIC_POINT {
                        write!(f, "; x*: {v}")?;
                    } else {
                        write!(f, "; x{k}: {v}")?;
                    }
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Debug for MvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for CofiniteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&MvElement::Cofinite(self.clone()), f)
    }
}

impl Serialize for MvElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which default values a cofinite function may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DefaultPredicate {
    Any,
    /// Lex defaults `(h, t, …)` with `t ≡ h (mod 2)` in the first tail coordinate.
    TailParity,
}

impl DefaultPredicate {
    pub fn admits(&self, x: &MvElement) -> bool {
        match (self, x) {
            (DefaultPredicate::Any, _) => true,
            (DefaultPredicate::TailParity, MvElement::Lex(v)) => (v[1] - v[0]).rem_euclid(2) == 0,
            (DefaultPredicate::TailParity, _) => false,
        }
    }
}

/// Lazily shared data that never takes part in equality or hashing.
#[derive(Clone, Default)]
pub struct Cached<T>(pub Option<Arc<T>>);

impl<T> PartialEq for Cached<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl<T> Eq for Cached<T> {}
impl<T> std::hash::Hash for Cached<T> {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}
impl<T> PartialOrd for Cached<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Cached<T> {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}
impl<T> fmt::Debug for Cached<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "..")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgebraKind {
    FiniteChain(u32),
    Product(Vec<MvAlgebra>),
    /// `Γ(group, (unit,0,…,0))`; the first block of `group` is the height.
    GammaLex {
        unit: i64,
        group: LexGroup,
    },
    Quotient {
        base: MvAlgebra,
        ideal: Ideal,
        table: Cached<BTreeMap<MvElement, MvElement>>,
    },
    Subalgebra {
        base: MvAlgebra,
        generators: Vec<MvElement>,
        universe: Cached<BTreeSet<MvElement>>,
    },
    CofiniteFunction {
        codomain: MvAlgebra,
        admissible: DefaultPredicate,
    },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MvAlgebra(Arc<AlgebraKind>);

impl fmt::Debug for MvAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MvAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for MvAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            AlgebraKind::FiniteChain(n) => write!(f, "chain({n})"),
            AlgebraKind::Product(fs) => {
                write!(f, "product(")?;
                for (i, a) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            AlgebraKind::GammaLex { unit, group } => {
                let zeros = ",0".repeat(group.dimension() - 1);
                write!(
                    f,
                    "gamma(unit=({unit}{zeros}), ranks={:?})",
                    &group.ranks()[1..]
                )
            }
            AlgebraKind::Quotient { base, ideal, .. } => write!(f, "quotient({base}, {ideal})"),
            AlgebraKind::Subalgebra {
                base, generators, ..
            } => {
                write!(f, "subalgebra({base}, [")?;
                for (i, g) in generators.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "])")
            }
            AlgebraKind::CofiniteFunction {
                codomain,
                admissible,
            } => {
                let p = match admissible {
                    DefaultPredicate::Any => "any",
                    DefaultPredicate::TailParity => "parity",
                };
                write!(f, "cofinite({codomain}, {p})")
            }
        }
    }
}

/// The basic and derived MV operations, addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MvOp {
    Oplus,
    Neg,
    Odot,
    Ominus,
    Join,
    Meet,
    Dist,
}

impl MvOp {
    pub fn arity(&self) -> usize {
        match self {
            MvOp::Neg => 1,
            _ => 2,
        }
    }
}

fn foreign(algebra: &MvAlgebra, x: &MvElement) -> MvError {
    MvError::ForeignElement {
        algebra: algebra.to_string(),
        element: x.clone(),
    }
}

fn zigzag(c: i64) -> i128 {
    if c >= 0 {
        2 * c as i128
    } else {
        -2 * c as i128 - 1
    }
}

/// Order used to pick canonical representatives: zeros first, then small
/// magnitudes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum KeyAtom {
    Rat(Rational),
    Int(i128),
}

fn push_key(x: &MvElement, out: &mut Vec<KeyAtom>) {
    match x {
        MvElement::Chain(r) => out.push(KeyAtom::Rat(*r)),
        MvElement::Tuple(items) => items.iter().for_each(|i| push_key(i, out)),
        MvElement::Lex(v) => out.extend(v.iter().map(|&c| KeyAtom::Int(zigzag(c)))),
        MvElement::Cofinite(c) => {
            push_key(&c.default, out);
            for (k, v) in &c.exceptions {
                out.push(KeyAtom::Int(*k as i128));
                push_key(v, out);
            }
        }
    }
}

fn canonical_key(x: &MvElement) -> Vec<KeyAtom> {
    let mut out = Vec::new();
    push_key(x, &mut out);
    out
}

pub(crate) fn cartesian(lists: &[Vec<MvElement>]) -> Vec<Vec<MvElement>> {
    let mut acc: Vec<Vec<MvElement>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(acc.len() * list.len());
        for prefix in &acc {
            for x in list {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

impl MvAlgebra {
    pub fn kind(&self) -> &AlgebraKind {
        &self.0
    }

    pub(crate) fn from_kind(kind: AlgebraKind) -> Self {
        MvAlgebra(Arc::new(kind))
    }

    pub fn chain(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(MvError::InvalidDescriptor(
                "chain rank must be positive".into(),
            ));
        }
        Ok(Self::from_kind(AlgebraKind::FiniteChain(n)))
    }

    pub fn product(factors: Vec<MvAlgebra>) -> Result<Self> {
        if factors.is_empty() {
            return Err(MvError::InvalidDescriptor("product of no factors".into()));
        }
        Ok(Self::from_kind(AlgebraKind::Product(factors)))
    }

    /// `Γ(ℤ ×_lex G, (unit,0,…))` with `G` given by its block ranks.
    pub fn gamma_lex(unit: i64, tail_ranks: Vec<usize>) -> Result<Self> {
        if unit <= 0 {
            return Err(MvError::DegenerateUnit);
        }
        if tail_ranks.is_empty() || tail_ranks == [0] {
            return Err(MvError::InvalidDescriptor(
                "gamma needs a nontrivial tail group; use chain(n) instead".into(),
            ));
        }
        let mut ranks = vec![1];
        ranks.extend(tail_ranks);
        let group = LexGroup::new(ranks)?;
        Ok(Self::from_kind(AlgebraKind::GammaLex { unit, group }))
    }

    pub fn cofinite(codomain: MvAlgebra, admissible: DefaultPredicate) -> Result<Self> {
        if admissible == DefaultPredicate::TailParity
            && !matches!(codomain.kind(), AlgebraKind::GammaLex { .. })
        {
            return Err(MvError::InvalidDescriptor(
                "the parity default condition needs a gamma codomain".into(),
            ));
        }
        if !admissible.admits(&codomain.zero()) || !admissible.admits(&codomain.one()) {
            return Err(MvError::InvalidDescriptor(
                "the default condition must admit the constants 0 and 1".into(),
            ));
        }
        Ok(Self::from_kind(AlgebraKind::CofiniteFunction {
            codomain,
            admissible,
        }))
    }

    /// `self / ideal`; elements are canonical representatives in `self`.
    pub(crate) fn quotient_by(&self, ideal: Ideal) -> Result<Self> {
        let table = if self.is_finite() {
            let elems = self.enumerate()?;
            if elems.len() <= 4096 {
                Some(Arc::new(class_table(self, &ideal, elems)?))
            } else {
                None
            }
        } else {
            None
        };
        Ok(Self::from_kind(AlgebraKind::Quotient {
            base: self.clone(),
            ideal,
            table: Cached(table),
        }))
    }

    pub(crate) fn subalgebra_with(
        &self,
        generators: Vec<MvElement>,
        universe: BTreeSet<MvElement>,
    ) -> Self {
        Self::from_kind(AlgebraKind::Subalgebra {
            base: self.clone(),
            generators,
            universe: Cached(Some(Arc::new(universe))),
        })
    }

    pub fn zero(&self) -> MvElement {
        match self.kind() {
            AlgebraKind::FiniteChain(_) => MvElement::Chain(Rational::ZERO),
            AlgebraKind::Product(fs) => MvElement::Tuple(fs.iter().map(|f| f.zero()).collect()),
            AlgebraKind::GammaLex { group, .. } => MvElement::Lex(vec![0; group.dimension()]),
            AlgebraKind::Quotient { base, .. } | AlgebraKind::Subalgebra { base, .. } => {
                base.zero()
            }
            AlgebraKind::CofiniteFunction { codomain, .. } => {
                MvElement::Cofinite(CofiniteValue::constant(codomain.zero()))
            }
        }
    }

    pub fn one(&self) -> MvElement {
        match self.kind() {
            AlgebraKind::FiniteChain(_) => MvElement::Chain(Rational::ONE),
            AlgebraKind::Product(fs) => MvElement::Tuple(fs.iter().map(|f| f.one()).collect()),
            AlgebraKind::GammaLex { unit, group } => {
                let mut v = vec![0; group.dimension()];
                v[0] = *unit;
                MvElement::Lex(v)
            }
            AlgebraKind::Quotient { base, .. } => self
                .canonicalize(&base.one())
                .unwrap_or_else(|_| base.one()),
            AlgebraKind::Subalgebra { base, .. } => base.one(),
            AlgebraKind::CofiniteFunction { codomain, .. } => {
                MvElement::Cofinite(CofiniteValue::constant(codomain.one()))
            }
        }
    }

    /// Full membership test, including canonical form for quotients.
    pub fn contains(&self, x: &MvElement) -> bool {
        match (self.kind(), x) {
            (AlgebraKind::FiniteChain(n), MvElement::Chain(r)) => {
                *r >= Rational::ZERO && *r <= Rational::ONE && r.scaled(*n as i64).is_some()
            }
            (AlgebraKind::Product(fs), MvElement::Tuple(items)) => {
                fs.len() == items.len() && fs.iter().zip(items).all(|(f, i)| f.contains(i))
            }
            (AlgebraKind::GammaLex { unit, group }, MvElement::Lex(v)) => {
                if v.len() != group.dimension() {
                    return false;
                }
                let mut u = vec![0; v.len()];
                u[0] = *unit;
                let lo = vec![0; v.len()];
                matches!(
                    group.partial_cmp(&lo, v),
                    Some(Ordering::Less | Ordering::Equal)
                ) && matches!(
                    group.partial_cmp(v, &u),
                    Some(Ordering::Less | Ordering::Equal)
                )
            }
            (AlgebraKind::Quotient { base, .. }, _) => {
                base.contains(x) && self.canonicalize(x).is_ok_and(|c| &c == x)
            }
            (AlgebraKind::Subalgebra { base, universe, .. }, _) => match &universe.0 {
                Some(u) => u.contains(x),
                None => base.contains(x),
            },
            (
                AlgebraKind::CofiniteFunction {
                    codomain,
                    admissible,
                },
                MvElement::Cofinite(c),
            ) => {
                codomain.contains(&c.default)
                    && admissible.admits(&c.default)
                    && c.exceptions
                        .values()
                        .all(|v| codomain.contains(v) && v != &*c.default)
            }
            _ => false,
        }
    }

    pub fn check(&self, x: &MvElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(foreign(self, x))
        }
    }

    /// Canonical representative of `x` in a quotient; identity elsewhere.
    pub fn canonicalize(&self, x: &MvElement) -> Result<MvElement> {
        match self.kind() {
            AlgebraKind::Quotient { base, ideal, table } => {
                if let Some(t) = &table.0 {
                    let key = base.canonicalize(x)?;
                    return t.get(&key).cloned().ok_or_else(|| foreign(base, x));
                }
                canonical_in(base, ideal, x)
            }
            _ => Ok(x.clone()),
        }
    }

    pub fn oplus(&self, a: &MvElement, b: &MvElement) -> Result<MvElement> {
        match (self.kind(), a, b) {
            (AlgebraKind::FiniteChain(_), MvElement::Chain(x), MvElement::Chain(y)) => {
                Ok(MvElement::Chain((*x + *y).min(Rational::ONE)))
            }
            (AlgebraKind::Product(fs), MvElement::Tuple(xs), MvElement::Tuple(ys))
                if xs.len() == fs.len() && ys.len() == fs.len() =>
            {
                let items = fs
                    .iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(f, (x, y))| f.oplus(x, y))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MvElement::Tuple(items))
            }
            (AlgebraKind::GammaLex { unit, group }, MvElement::Lex(x), MvElement::Lex(y))
                if x.len() == group.dimension() && y.len() == group.dimension() =>
            {
                let sum: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
                let mut u = vec![0; sum.len()];
                u[0] = *unit;
                Ok(MvElement::Lex(group.meet_slices(&sum, &u)))
            }
            (AlgebraKind::Quotient { base, .. }, _, _) => self.canonicalize(&base.oplus(a, b)?),
            (AlgebraKind::Subalgebra { base, .. }, _, _) => base.oplus(a, b),
            (
                AlgebraKind::CofiniteFunction { codomain, .. },
                MvElement::Cofinite(x),
                MvElement::Cofinite(y),
            ) => Ok(MvElement::Cofinite(
                x.combine(y, |p, q| codomain.oplus(p, q))?,
            )),
            _ => Err(foreign(self, if self.shape_ok(a) { b } else { a })),
        }
    }

    pub fn neg(&self, a: &MvElement) -> Result<MvElement> {
        match (self.kind(), a) {
            (AlgebraKind::FiniteChain(_), MvElement::Chain(x)) => {
                Ok(MvElement::Chain(Rational::ONE - *x))
            }
            (AlgebraKind::Product(fs), MvElement::Tuple(xs)) if xs.len() == fs.len() => {
                Ok(MvElement::Tuple(
                    fs.iter()
                        .zip(xs)
                        .map(|(f, x)| f.neg(x))
                        .collect::<Result<Vec<_>>>()?,
                ))
            }
            (AlgebraKind::GammaLex { unit, group }, MvElement::Lex(x))
                if x.len() == group.dimension() =>
            {
                let mut v: Vec<i64> = x.iter().map(|c| -c).collect();
                v[0] += unit;
                Ok(MvElement::Lex(v))
            }
            (AlgebraKind::Quotient { base, .. }, _) => self.canonicalize(&base.neg(a)?),
            (AlgebraKind::Subalgebra { base, .. }, _) => base.neg(a),
            (AlgebraKind::CofiniteFunction { codomain, .. }, MvElement::Cofinite(x)) => {
                Ok(MvElement::Cofinite(x.map(|p| codomain.neg(p))?))
            }
            _ => Err(foreign(self, a)),
        }
    }

    fn shape_ok(&self, x: &MvElement) -> bool {
        matches!(
            (self.kind(), x),
            (AlgebraKind::FiniteChain(_), MvElement::Chain(_))
                | (AlgebraKind::Product(_), MvElement::Tuple(_))
                | (AlgebraKind::GammaLex { .. }, MvElement::Lex(_))
                | (AlgebraKind::CofiniteFunction { .. }, MvElement::Cofinite(_))
        )
    }

    pub fn odot(&self, a: &MvElement, b: &MvElement) -> Result<MvElement> {
        let s = self.oplus(&self.neg(a)?, &self.neg(b)?)?;
        self.neg(&s)
    }

    pub fn ominus(&self, a: &MvElement, b: &MvElement) -> Result<MvElement> {
        self.odot(a, &self.neg(b)?)
    }

    pub fn join(&self, a: &MvElement, b: &MvElement) -> Result<MvElement> {
        self.oplus(&self.ominus(a, b)?, b)
    }

    pub fn meet(&self, a: &MvElement, b: &MvElement) -> Result<MvElement> {
        self.odot(&self.oplus(a, &self.neg(b)?)?, b)
    }

    /// Chang's distance `(a ⊖ b) ⊕ (b ⊖ a)`.
    pub fn dist(&self, a: &MvElement, b: &MvElement) -> Result<MvElement> {
        self.oplus(&self.ominus(a, b)?, &self.ominus(b, a)?)
    }

    pub fn le(&self, a: &MvElement, b: &MvElement) -> Result<bool> {
        Ok(self.ominus(a, b)? == self.zero())
    }

    pub fn multiple(&self, n: u32, a: &MvElement) -> Result<MvElement> {
        let mut acc = self.zero();
        for _ in 0..n {
            acc = self.oplus(&acc, a)?;
        }
        Ok(acc)
    }

    /// Evaluates `op` after checking every argument is a genuine element.
    pub fn apply(&self, op: MvOp, args: &[MvElement]) -> Result<MvElement> {
        if args.len() != op.arity() {
            return Err(MvError::InvalidDescriptor(format!(
                "{op:?} takes {} arguments, got {}",
                op.arity(),
                args.len()
            )));
        }
        for a in args {
            self.check(a)?;
        }
        match op {
            MvOp::Neg => self.neg(&args[0]),
            MvOp::Oplus => self.oplus(&args[0], &args[1]),
            MvOp::Odot => self.odot(&args[0], &args[1]),
            MvOp::Ominus => self.ominus(&args[0], &args[1]),
            MvOp::Join => self.join(&args[0], &args[1]),
            MvOp::Meet => self.meet(&args[0], &args[1]),
            MvOp::Dist => self.dist(&args[0], &args[1]),
        }
    }
}

fn class_table(
    base: &MvAlgebra,
    ideal: &Ideal,
    mut elems: Vec<MvElement>,
) -> Result<BTreeMap<MvElement, MvElement>> {
    elems.sort_by_cached_key(canonical_key);
    let mut table = BTreeMap::new();
    for x in &elems {
        if table.contains_key(x) {
            continue;
        }
        for y in &elems {
            if !table.contains_key(y) && ideal.contains(&base.dist(x, y)?) {
                table.insert(y.clone(), x.clone());
            }
        }
    }
    Ok(table)
}

/// Least representative (in canonical-key order) of the class of `x` modulo `ideal`.
pub(crate) fn canonical_in(base: &MvAlgebra, ideal: &Ideal, x: &MvElement) -> Result<MvElement> {
    match (ideal.carrier(), base.kind(), x) {
        (IdealCarrier::Full, _, _) => Ok(base.zero()),
        (IdealCarrier::Lifted(inner), AlgebraKind::Quotient { base: b2, .. }, _) => {
            canonical_in(b2, inner, x)
        }
        (IdealCarrier::Tail(coords), AlgebraKind::GammaLex { .. }, MvElement::Lex(v)) => {
            let mut v = v.clone();
            for &c in coords {
                v[c] = 0;
            }
            Ok(MvElement::Lex(v))
        }
        (IdealCarrier::Product(ids), AlgebraKind::Product(fs), MvElement::Tuple(xs)) => {
            Ok(MvElement::Tuple(
                fs.iter()
                    .zip(ids)
                    .zip(xs)
                    .map(|((f, i), x)| canonical_in(f, i, x))
                    .collect::<Result<Vec<_>>>()?,
            ))
        }
        (IdealCarrier::Explicit(_), _, _) if base.is_finite() => {
            let mut best: Option<(Vec<KeyAtom>, MvElement)> = None;
            for y in base.enumerate()? {
                if ideal.contains(&base.dist(x, &y)?) {
                    let k = canonical_key(&y);
                    if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
                        best = Some((k, y));
                    }
                }
            }
            best.map(|(_, y)| y).ok_or_else(|| foreign(base, x))
        }
        (
            IdealCarrier::Pointwise { at, elsewhere },
            AlgebraKind::CofiniteFunction {
                codomain,
                admissible,
            },
            MvElement::Cofinite(f),
        ) => {
            let d = default_rep(codomain, *admissible, elsewhere, &f.default)?;
            let points: BTreeSet<u64> = f.exceptions.keys().chain(at.keys()).copied().collect();
            let mut exceptions = BTreeMap::new();
            for p in points {
                let ideal_p = at.get(&p).unwrap_or(elsewhere);
                let v = f.value_at(p);
                if ideal_p.contains(&codomain.dist(v, &d)?) {
                    continue;
                }
                exceptions.insert(p, canonical_in(codomain, ideal_p, v)?);
            }
            Ok(MvElement::Cofinite(CofiniteValue::new(d, exceptions)))
        }
        _ => Err(MvError::Unsupported(format!(
            "canonical form modulo {ideal} in {base}"
        ))),
    }
}

/// Canonical admissible default value in the class of `d`.
fn default_rep(
    codomain: &MvAlgebra,
    admissible: DefaultPredicate,
    ideal: &Ideal,
    d: &MvElement,
) -> Result<MvElement> {
    let c = canonical_in(codomain, ideal, d)?;
    if admissible.admits(&c) {
        return Ok(c);
    }
    let mut best: Option<(Vec<KeyAtom>, MvElement)> = None;
    for y in codomain.sample_elements(4) {
        if admissible.admits(&y) && ideal.contains(&codomain.dist(&y, d)?) {
            let k = canonical_key(&y);
            if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
                best = Some((k, y));
            }
        }
    }
    best.map(|(_, y)| y).ok_or_else(|| {
        MvError::InternalConsistency(format!("no admissible default in the class of {d}"))
    })
}

fn tail_is_everything(group: &LexGroup, coords: &BTreeSet<usize>) -> bool {
    coords.len() == group.dimension() - 1
}

fn quotient_is_finite(base: &MvAlgebra, ideal: &Ideal) -> bool {
    if base.is_finite() {
        return true;
    }
    match (base.kind(), ideal.carrier()) {
        (_, IdealCarrier::Full) => true,
        (AlgebraKind::Quotient { base: b2, .. }, IdealCarrier::Lifted(inner)) => {
            quotient_is_finite(b2, inner)
        }
        (AlgebraKind::GammaLex { group, .. }, IdealCarrier::Tail(coords)) => {
            tail_is_everything(group, coords)
        }
        (AlgebraKind::Product(fs), IdealCarrier::Product(ids)) => {
            fs.iter().zip(ids).all(|(f, i)| quotient_is_finite(f, i))
        }
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise { at, elsewhere },
        ) => {
            matches!(elsewhere.carrier(), IdealCarrier::Full)
                && at.values().all(|i| quotient_is_finite(codomain, i))
        }
        _ => false,
    }
}

fn enumerate_quotient(base: &MvAlgebra, ideal: &Ideal) -> Result<Vec<MvElement>> {
    let candidates: Vec<MvElement> = match (base.kind(), ideal.carrier()) {
        (_, IdealCarrier::Full) => vec![base.zero()],
        (AlgebraKind::Quotient { base: b2, .. }, IdealCarrier::Lifted(inner)) => {
            return enumerate_quotient(b2, inner)
        }
        (AlgebraKind::GammaLex { unit, group }, IdealCarrier::Tail(coords))
            if tail_is_everything(group, coords) =>
        {
            (0..=*unit)
                .map(|h| {
                    let mut v = vec![0; group.dimension()];
                    v[0] = h;
                    MvElement::Lex(v)
                })
                .collect()
        }
        (AlgebraKind::Product(fs), IdealCarrier::Product(ids)) => {
            let lists = fs
                .iter()
                .zip(ids)
                .map(|(f, i)| enumerate_quotient(f, i))
                .collect::<Result<Vec<_>>>()?;
            cartesian(&lists)
                .into_iter()
                .map(MvElement::Tuple)
                .collect()
        }
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise { at, elsewhere },
        ) if matches!(elsewhere.carrier(), IdealCarrier::Full) => {
            let points: Vec<u64> = at.keys().copied().collect();
            let lists = at
                .values()
                .map(|i| enumerate_quotient(codomain, i))
                .collect::<Result<Vec<_>>>()?;
            cartesian(&lists)
                .into_iter()
                .map(|vals| {
                    let exc = points.iter().copied().zip(vals).collect();
                    MvElement::Cofinite(CofiniteValue::new(codomain.zero(), exc))
                })
                .collect()
        }
        _ if base.is_finite() => base.enumerate()?,
        _ => {
            return Err(MvError::NotEnumerable(format!(
                "quotient of {base} by {ideal}"
            )));
        }
    };
    let mut out = BTreeSet::new();
    for c in candidates {
        out.insert(canonical_in(base, ideal, &c)?);
    }
    Ok(out.into_iter().collect())
}

impl MvAlgebra {
    pub fn is_finite(&self) -> bool {
        match self.kind() {
            AlgebraKind::FiniteChain(_) | AlgebraKind::Subalgebra { .. } => true,
            AlgebraKind::Product(fs) => fs.iter().all(|f| f.is_finite()),
            AlgebraKind::GammaLex { .. } | AlgebraKind::CofiniteFunction { .. } => false,
            AlgebraKind::Quotient { base, ideal, table } => {
                table.0.is_some() || quotient_is_finite(base, ideal)
            }
        }
    }

    /// All elements in ascending structural order.
    pub fn enumerate(&self) -> Result<Vec<MvElement>> {
        match self.kind() {
            AlgebraKind::FiniteChain(n) => Ok((0..=*n as i64)
                .map(|k| MvElement::chain(k, *n as i64))
                .collect()),
            AlgebraKind::Product(fs) => {
                let lists = fs
                    .iter()
                    .map(|f| f.enumerate())
                    .collect::<Result<Vec<_>>>()?;
                Ok(cartesian(&lists)
                    .into_iter()
                    .map(MvElement::Tuple)
                    .collect())
            }
            AlgebraKind::Subalgebra { universe, base, .. } => match &universe.0 {
                Some(u) => Ok(u.iter().cloned().collect()),
                None => Err(MvError::NotEnumerable(format!(
                    "subalgebra of {base} without universe"
                ))),
            },
            AlgebraKind::Quotient { base, ideal, table } => match &table.0 {
                Some(t) => Ok(t
                    .values()
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect()),
                None => enumerate_quotient(base, ideal),
            },
            _ => Err(MvError::NotEnumerable(self.to_string())),
        }
    }

    pub fn cardinality(&self) -> Option<usize> {
        self.enumerate().ok().map(|v| v.len())
    }

    /// A finite sample: every element when finite, otherwise all elements whose
    /// integer coordinates lie in `[-bound, bound]` (cofinite functions vary only
    /// inside the desk window).
    pub fn sample_elements(&self, bound: i64) -> Vec<MvElement> {
        if self.is_finite() {
            if let Ok(all) = self.enumerate() {
                return all;
            }
        }
        match self.kind() {
            AlgebraKind::GammaLex { unit, group } => {
                let k = group.dimension() - 1;
                let tails: Vec<Vec<MvElement>> = (0..k)
                    .map(|_| (-bound..=bound).map(|c| MvElement::Lex(vec![c])).collect())
                    .collect();
                let mut out = Vec::new();
                for h in 0..=*unit {
                    for t in cartesian(&tails) {
                        let mut v = vec![h];
                        for c in t {
                            if let MvElement::Lex(c) = c {
                                v.push(c[0]);
                            }
                        }
                        let x = MvElement::Lex(v);
                        if self.contains(&x) {
                            out.push(x);
                        }
                    }
                }
                out
            }
            AlgebraKind::Product(fs) => {
                let lists: Vec<Vec<MvElement>> =
                    fs.iter().map(|f| f.sample_elements(bound)).collect();
                cartesian(&lists)
                    .into_iter()
                    .map(MvElement::Tuple)
                    .collect()
            }
            AlgebraKind::Quotient { base, .. } => {
                let set: BTreeSet<MvElement> = base
                    .sample_elements(bound)
                    .iter()
                    .filter_map(|x| self.canonicalize(x).ok())
                    .collect();
                set.into_iter().collect()
            }
            AlgebraKind::CofiniteFunction {
                codomain,
                admissible,
            } => {
                let values = codomain.sample_elements(bound);
                let mut out = BTreeSet::new();
                for d in values.iter().filter(|d| admissible.admits(d)) {
                    out.insert(MvElement::Cofinite(CofiniteValue::constant(d.clone())));
                    for p in 0..DESK_WINDOW {
                        for v in &values {
                            let mut exc = BTreeMap::new();
                            exc.insert(p, v.clone());
                            out.insert(MvElement::Cofinite(CofiniteValue::new(d.clone(), exc)));
                        }
                    }
                }
                out.into_iter().collect()
            }
            _ => Vec::new(),
        }
    }

    /// `n·x ≤ x*` for `n = 1..=bound`.
    pub fn passes_infinitesimal_test(&self, x: &MvElement, bound: u32) -> Result<bool> {
        let nx = self.neg(x)?;
        let mut acc = self.zero();
        for _ in 0..bound {
            acc = self.oplus(&acc, x)?;
            if !self.le(&acc, &nx)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Structural infinitesimality where the presentation allows it, numeric
    /// test otherwise.
    pub fn is_infinitesimal(&self, x: &MvElement) -> Result<bool> {
        match (self.kind(), x) {
            (AlgebraKind::FiniteChain(_), MvElement::Chain(r)) => Ok(*r == Rational::ZERO),
            (AlgebraKind::GammaLex { .. }, MvElement::Lex(v)) => Ok(v[0] == 0),
            (AlgebraKind::Product(fs), MvElement::Tuple(xs)) => {
                for (f, x) in fs.iter().zip(xs) {
                    if !f.is_infinitesimal(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => self.passes_infinitesimal_test(x, INFINITESIMAL_BOUND),
        }
    }
}

/// Closure of `seeds ∪ {0,1}` under ⊕ and *.
pub fn closure(
    base: &MvAlgebra,
    seeds: &[MvElement],
    budget: usize,
) -> Result<BTreeSet<MvElement>> {
    for s in seeds {
        base.check(s)?;
    }
    let mut set: BTreeSet<MvElement> = BTreeSet::new();
    let mut queue: Vec<MvElement> = Vec::new();
    for s in seeds.iter().cloned().chain([base.zero(), base.one()]) {
        if set.insert(s.clone()) {
            queue.push(s);
        }
    }
    let mut done: Vec<MvElement> = Vec::new();
    while let Some(x) = queue.pop() {
        let mut fresh = vec![base.neg(&x)?, base.oplus(&x, &x)?];
        for y in &done {
            fresh.push(base.oplus(&x, y)?);
        }
        done.push(x);
        for z in fresh {
            if set.insert(z.clone()) {
                if set.len() > budget {
                    return Err(MvError::ClosureBudgetExceeded {
                        partial: set.into_iter().collect(),
                    });
                }
                queue.push(z);
            }
        }
    }
    Ok(set)
}

/// The subalgebra of `base` generated by `generators`.
pub fn generate_subalgebra(
    base: &MvAlgebra,
    generators: &[MvElement],
    budget: usize,
) -> Result<MvAlgebra> {
    let universe = closure(base, generators, budget)?;
    Ok(base.subalgebra_with(generators.to_vec(), universe))
}

type MapFn = dyn Fn(&MvElement) -> Result<MvElement> + Send + Sync;

#[derive(Clone)]
enum HomMap {
    Identity,
    /// Canonicalisation into a quotient sharing the source's representatives.
    Projection,
    Table(Arc<BTreeMap<MvElement, MvElement>>),
    Func(Arc<MapFn>),
}

#[derive(Clone)]
pub struct Homomorphism {
    pub source: MvAlgebra,
    pub target: MvAlgebra,
    pub label: String,
    map: HomMap,
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.label, self.source, self.target)
    }
}

impl Homomorphism {
    pub fn identity(a: &MvAlgebra) -> Self {
        Homomorphism {
            source: a.clone(),
            target: a.clone(),
            label: "id".into(),
            map: HomMap::Identity,
        }
    }

    /// The quotient map `source → target` where `target` is a quotient of the
    /// algebra whose representatives `source` uses.
    pub fn projection(source: &MvAlgebra, target: &MvAlgebra) -> Result<Self> {
        let ok = match (source.kind(), target.kind()) {
            (_, AlgebraKind::Quotient { base, .. }) if base == source => true,
            (AlgebraKind::Quotient { base: b1, .. }, AlgebraKind::Quotient { base: b2, .. }) => {
                b1 == b2
            }
            _ => false,
        };
        if !ok {
            return Err(MvError::InvalidDescriptor(format!(
                "{target} is not a quotient of {source}"
            )));
        }
        Ok(Homomorphism {
            source: source.clone(),
            target: target.clone(),
            label: "π".into(),
            map: HomMap::Projection,
        })
    }

    pub fn from_table(
        source: &MvAlgebra,
        target: &MvAlgebra,
        label: &str,
        table: BTreeMap<MvElement, MvElement>,
    ) -> Self {
        Homomorphism {
            source: source.clone(),
            target: target.clone(),
            label: label.into(),
            map: HomMap::Table(Arc::new(table)),
        }
    }

    pub fn from_fn(
        source: &MvAlgebra,
        target: &MvAlgebra,
        label: &str,
        f: impl Fn(&MvElement) -> Result<MvElement> + Send + Sync + 'static,
    ) -> Self {
        Homomorphism {
            source: source.clone(),
            target: target.clone(),
            label: label.into(),
            map: HomMap::Func(Arc::new(f)),
        }
    }

    pub fn image(&self, x: &MvElement) -> Result<MvElement> {
        match &self.map {
            HomMap::Identity => Ok(x.clone()),
            HomMap::Projection => self.target.canonicalize(x),
            HomMap::Table(t) => t.get(x).cloned().ok_or_else(|| foreign(&self.source, x)),
            HomMap::Func(f) => f(x),
        }
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Homomorphism) -> Homomorphism {
        let (a, b) = (self.clone(), then.clone());
        let label = format!("{}∘{}", then.label, self.label);
        Homomorphism::from_fn(&self.source, &then.target, &label, move |x| {
            b.image(&a.image(x)?)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismReport {
    pub pass: bool,
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Checks ⊕, * and 0 preservation on `samples` (all elements if `None` and the
/// source is finite).
pub fn check_homomorphism(
    h: &Homomorphism,
    samples: Option<&[MvElement]>,
) -> Result<HomomorphismReport> {
    let owned;
    let xs: &[MvElement] = match samples {
        Some(s) => s,
        None => {
            owned = h.source.enumerate()?;
            &owned
        }
    };
    let mut failures = Vec::new();
    let mut checked = 0;
    let z = h.image(&h.source.zero())?;
    if z != h.target.zero() {
        failures.push(format!("{} maps 0 to {z}", h.label));
    }
    for x in xs {
        let fx = h.image(x)?;
        if !h.target.contains(&fx) {
            failures.push(format!("{}({x}) = {fx} lies outside {}", h.label, h.target));
        }
        if h.image(&h.source.neg(x)?)? != h.target.neg(&fx)? {
            failures.push(format!("{} does not preserve * at {x}", h.label));
        }
        for y in xs {
            checked += 1;
            let lhs = h.image(&h.source.oplus(x, y)?)?;
            let rhs = h.target.oplus(&fx, &h.image(y)?)?;
            if lhs != rhs {
                failures.push(format!("{} does not preserve ⊕ at ({x}, {y})", h.label));
            }
        }
    }
    Ok(HomomorphismReport {
        pass: failures.is_empty(),
        checked,
        failures,
    })
}
