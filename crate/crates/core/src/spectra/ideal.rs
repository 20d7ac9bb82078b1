use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{AlgebraKind, MvAlgebra, MvElement, GENERIC_POINT};
use crate::error::{MvError, Result};

/// How an ideal's elements are described.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdealCarrier {
    /// Every element, for finite algebras.
    Explicit(BTreeSet<MvElement>),
    /// In a gamma algebra: height zero, and nonzero only on these payload
    /// coordinates. `Tail(∅)` is `{0}`; all tail coordinates give the radical.
    Tail(BTreeSet<usize>),
    Full,
    Product(Vec<Ideal>),
    /// In a cofinite function algebra: pointwise membership, with the ideal at
    /// any unlisted point given by `elsewhere`.
    Pointwise {
        at: BTreeMap<u64, Ideal>,
        elsewhere: Box<Ideal>,
    },
    /// In `B/I`: the image of an ideal of `B` containing `I`.
    Lifted(Box<Ideal>),
}

/// An ideal of an MV-algebra. The owning algebra is passed alongside.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ideal {
    carrier: IdealCarrier,
}

impl Ideal {
    pub fn explicit(elements: BTreeSet<MvElement>) -> Self {
        Ideal {
            carrier: IdealCarrier::Explicit(elements),
        }
    }

    pub fn tail(coords: impl IntoIterator<Item = usize>) -> Self {
        Ideal {
            carrier: IdealCarrier::Tail(coords.into_iter().collect()),
        }
    }

    pub fn full() -> Self {
        Ideal {
            carrier: IdealCarrier::Full,
        }
    }

    pub fn product(parts: Vec<Ideal>) -> Self {
        Ideal {
            carrier: IdealCarrier::Product(parts),
        }
    }

    pub fn pointwise(at: BTreeMap<u64, Ideal>, elsewhere: Ideal) -> Self {
        let at = at.into_iter().filter(|(_, i)| *i != elsewhere).collect();
        Ideal {
            carrier: IdealCarrier::Pointwise {
                at,
                elsewhere: Box::new(elsewhere),
            },
        }
    }

    pub fn lifted(inner: Ideal) -> Self {
        Ideal {
            carrier: IdealCarrier::Lifted(Box::new(inner)),
        }
    }

    pub fn carrier(&self) -> &IdealCarrier {
        &self.carrier
    }

    /// The component ideal at `point` of a pointwise ideal.
    pub fn ideal_at_point(&self, point: u64) -> Ideal {
        match &self.carrier {
            IdealCarrier::Pointwise { at, elsewhere } => at
                .get(&point)
                .cloned()
                .unwrap_or_else(|| (**elsewhere).clone()),
            _ => self.clone(),
        }
    }

    /// Membership for an element already known to lie in the owning algebra.
    pub fn contains(&self, x: &MvElement) -> bool {
        match (&self.carrier, x) {
            (IdealCarrier::Explicit(set), _) => set.contains(x),
            (IdealCarrier::Full, _) => true,
            (IdealCarrier::Tail(coords), MvElement::Lex(v)) => {
                v[0] == 0
                    && v.iter()
                        .enumerate()
                        .skip(1)
                        .all(|(i, c)| *c == 0 || coords.contains(&i))
            }
            (IdealCarrier::Product(parts), MvElement::Tuple(items)) => {
                parts.len() == items.len() && parts.iter().zip(items).all(|(p, i)| p.contains(i))
            }
            (IdealCarrier::Pointwise { at, elsewhere }, MvElement::Cofinite(f)) => {
                elsewhere.contains(&f.default)
                    && f.exceptions
                        .keys()
                        .chain(at.keys())
                        .all(|p| at.get(p).unwrap_or(elsewhere).contains(f.value_at(*p)))
            }
            (IdealCarrier::Lifted(inner), _) => inner.contains(x),
            _ => false,
        }
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.carrier {
            IdealCarrier::Explicit(set) => {
                write!(f, "{{")?;
                for (i, x) in set.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}}")
            }
            IdealCarrier::Tail(c) if c.is_empty() => write!(f, "zero"),
            IdealCarrier::Tail(c) => write!(f, "tail{:?}", c.iter().collect::<Vec<_>>()),
            IdealCarrier::Full => write!(f, "full"),
            IdealCarrier::Product(parts) => {
                write!(f, "[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            IdealCarrier::Pointwise { at, elsewhere } => {
                write!(f, "pointwise(")?;
                for (p, i) in at {
                    if *p == GENERIC_POINT {
                        write!(f, "x*: {i}; ")?;
                    } else {
                        write!(f, "x{p}: {i}; ")?;
                    }
                }
                write!(f, "else {elsewhere})")
            }
            IdealCarrier::Lifted(inner) => write!(f, "lift({inner})"),
        }
    }
}

/// Every element of an ideal of a finite algebra.
pub fn ideal_elements(a: &MvAlgebra, i: &Ideal) -> Result<BTreeSet<MvElement>> {
    if let IdealCarrier::Explicit(set) = i.carrier() {
        return Ok(set.clone());
    }
    Ok(a.enumerate()?
        .into_iter()
        .filter(|x| i.contains(x))
        .collect())
}

/// `{0}` of `a` in the representation native to its kind.
pub fn zero_ideal(a: &MvAlgebra) -> Ideal {
    if a.is_finite() {
        return Ideal::explicit([a.zero()].into_iter().collect());
    }
    match a.kind() {
        AlgebraKind::GammaLex { .. } => Ideal::tail([]),
        AlgebraKind::Product(fs) => Ideal::product(fs.iter().map(zero_ideal).collect()),
        AlgebraKind::CofiniteFunction { codomain, .. } => {
            Ideal::pointwise(BTreeMap::new(), zero_ideal(codomain))
        }
        AlgebraKind::Quotient { ideal, .. } => Ideal::lifted(ideal.clone()),
        _ => Ideal::explicit([a.zero()].into_iter().collect()),
    }
}

/// Whole algebra as an ideal.
pub fn full_ideal(a: &MvAlgebra) -> Ideal {
    if a.is_finite() {
        if let Ok(all) = a.enumerate() {
            return Ideal::explicit(all.into_iter().collect());
        }
    }
    Ideal::full()
}

pub fn is_full(a: &MvAlgebra, i: &Ideal) -> bool {
    i.contains(&a.one())
}

/// `i ⊆ j`.
pub fn is_subset(a: &MvAlgebra, i: &Ideal, j: &Ideal) -> Result<bool> {
    if a.is_finite() {
        let (si, sj) = (ideal_elements(a, i)?, ideal_elements(a, j)?);
        return Ok(si.is_subset(&sj));
    }
    if is_full(a, j) {
        return Ok(true);
    }
    if is_full(a, i) {
        return Ok(false);
    }
    match (a.kind(), i.carrier(), j.carrier()) {
        (_, IdealCarrier::Tail(x), IdealCarrier::Tail(y)) => Ok(x.is_subset(y)),
        (AlgebraKind::Product(fs), IdealCarrier::Product(xs), IdealCarrier::Product(ys)) => {
            for ((f, x), y) in fs.iter().zip(xs).zip(ys) {
                if !is_subset(f, x, y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (AlgebraKind::Quotient { base, .. }, IdealCarrier::Lifted(x), IdealCarrier::Lifted(y)) => {
            is_subset(base, x, y)
        }
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise {
                at: xa,
                elsewhere: xe,
            },
            IdealCarrier::Pointwise {
                at: ya,
                elsewhere: ye,
            },
        ) => {
            if !is_subset(codomain, xe, ye)? {
                return Ok(false);
            }
            for p in xa.keys().chain(ya.keys()) {
                if !is_subset(codomain, &i.ideal_at_point(*p), &j.ideal_at_point(*p))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(MvError::IdealLatticeUnknown(format!(
            "comparing {i} with {j} in {a}"
        ))),
    }
}

pub fn same_ideal(a: &MvAlgebra, i: &Ideal, j: &Ideal) -> Result<bool> {
    Ok(is_subset(a, i, j)? && is_subset(a, j, i)?)
}

/// `i ∩ j`.
pub fn intersect(a: &MvAlgebra, i: &Ideal, j: &Ideal) -> Result<Ideal> {
    if a.is_finite() {
        let s: BTreeSet<MvElement> = ideal_elements(a, i)?
            .intersection(&ideal_elements(a, j)?)
            .cloned()
            .collect();
        return Ok(Ideal::explicit(s));
    }
    if is_full(a, i) {
        return Ok(j.clone());
    }
    if is_full(a, j) {
        return Ok(i.clone());
    }
    match (a.kind(), i.carrier(), j.carrier()) {
        (_, IdealCarrier::Tail(x), IdealCarrier::Tail(y)) => {
            Ok(Ideal::tail(x.intersection(y).copied()))
        }
        (AlgebraKind::Product(fs), IdealCarrier::Product(xs), IdealCarrier::Product(ys)) => {
            Ok(Ideal::product(
                fs.iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(f, (x, y))| intersect(f, x, y))
                    .collect::<Result<Vec<_>>>()?,
            ))
        }
        (AlgebraKind::Quotient { base, .. }, IdealCarrier::Lifted(x), IdealCarrier::Lifted(y)) => {
            Ok(Ideal::lifted(intersect(base, x, y)?))
        }
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise {
                at: xa,
                elsewhere: xe,
            },
            IdealCarrier::Pointwise {
                at: ya,
                elsewhere: ye,
            },
        ) => {
            let elsewhere = intersect(codomain, xe, ye)?;
            let mut at = BTreeMap::new();
            for p in xa.keys().chain(ya.keys()) {
                at.insert(
                    *p,
                    intersect(codomain, &i.ideal_at_point(*p), &j.ideal_at_point(*p))?,
                );
            }
            Ok(Ideal::pointwise(at, elsewhere))
        }
        _ => Err(MvError::IdealLatticeUnknown(format!(
            "intersecting {i} with {j} in {a}"
        ))),
    }
}

/// The ideal generated by `gens` in a finite algebra: everything below some
/// multiple of their ⊕-sum.
pub fn generated_ideal(a: &MvAlgebra, gens: &[MvElement]) -> Result<Ideal> {
    let mut s = a.zero();
    for g in gens {
        a.check(g)?;
        s = a.oplus(&s, g)?;
    }
    loop {
        let t = a.oplus(&s, &s)?;
        if t == s {
            break;
        }
        s = t;
    }
    let mut set = BTreeSet::new();
    for x in a.enumerate()? {
        if a.le(&x, &s)? {
            set.insert(x);
        }
    }
    Ok(Ideal::explicit(set))
}

impl serde::Serialize for Ideal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
