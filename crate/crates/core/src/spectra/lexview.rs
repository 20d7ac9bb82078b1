use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{AlgebraKind, CofiniteValue, MvAlgebra, MvElement};
use crate::ell_groups::LexGroup;
use crate::error::{MvError, Result};
use crate::rational::Rational;
use crate::spectra::{is_full, IdealCarrier};

type Map = Arc<dyn Fn(&MvElement) -> Result<MvElement> + Send + Sync>;

/// An isomorphism between a local algebra and a chain or gamma presentation.
#[derive(Clone)]
pub struct LexView {
    pub local: MvAlgebra,
    pub target: MvAlgebra,
    to: Map,
    from: Map,
}

impl std::fmt::Debug for LexView {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LexView({} ≅ {})", self.local, self.target)
    }
}

impl LexView {
    pub fn to_target(&self, x: &MvElement) -> Result<MvElement> {
        (self.to)(x)
    }

    pub fn from_target(&self, y: &MvElement) -> Result<MvElement> {
        (self.from)(y)
    }

    pub fn unit(&self) -> i64 {
        match self.target.kind() {
            AlgebraKind::FiniteChain(n) => *n as i64,
            AlgebraKind::GammaLex { unit, .. } => *unit,
            _ => unreachable!("lex views target chains or gamma algebras"),
        }
    }

    /// Group of infinitesimal coordinates (trivial for a chain).
    pub fn tail_group(&self) -> LexGroup {
        match self.target.kind() {
            AlgebraKind::GammaLex { group, .. } => {
                LexGroup::new(group.ranks()[1..].to_vec()).expect("valid tail")
            }
            _ => LexGroup::trivial(),
        }
    }

    /// Height `h/u` of `x`, i.e. the value of `x` modulo the maximal ideal.
    pub fn height(&self, x: &MvElement) -> Result<Rational> {
        match self.to_target(x)? {
            MvElement::Chain(r) => Ok(r),
            MvElement::Lex(v) => Ok(Rational::new(v[0], self.unit())),
            other => Err(MvError::InternalConsistency(format!(
                "lex view produced {other}"
            ))),
        }
    }

    /// Infinitesimal coordinates of `x`.
    pub fn tail(&self, x: &MvElement) -> Result<Vec<i64>> {
        match self.to_target(x)? {
            MvElement::Chain(_) => Ok(Vec::new()),
            MvElement::Lex(v) => Ok(v[1..].to_vec()),
            other => Err(MvError::InternalConsistency(format!(
                "lex view produced {other}"
            ))),
        }
    }

    /// The element of height `r` with zero infinitesimal part.
    pub fn section(&self, r: Rational) -> Result<MvElement> {
        let u = self.unit();
        let h = r
            .scaled(u)
            .ok_or_else(|| MvError::SpectrumValue(format!("{r} is not a multiple of 1/{u}")))?;
        let y = match self.target.kind() {
            AlgebraKind::FiniteChain(_) => MvElement::Chain(r),
            AlgebraKind::GammaLex { group, .. } => {
                let mut v = vec![0; group.dimension()];
                v[0] = h;
                MvElement::Lex(v)
            }
            _ => unreachable!(),
        };
        self.from_target(&y)
    }
}

fn identity_view(l: &MvAlgebra) -> LexView {
    LexView {
        local: l.clone(),
        target: l.clone(),
        to: Arc::new(|x| Ok(x.clone())),
        from: Arc::new(|x| Ok(x.clone())),
    }
}

fn not_local(l: &MvAlgebra) -> MvError {
    MvError::Unsupported(format!(
        "{l} has no chain or gamma presentation (it is not local)"
    ))
}

fn enumerated_view(l: &MvAlgebra) -> Result<LexView> {
    let mut elems = l.enumerate()?;
    let mut ordered = Vec::with_capacity(elems.len());
    // selection by the MV order; fails on incomparable pairs
    while !elems.is_empty() {
        let mut best = 0;
        for k in 1..elems.len() {
            if l.le(&elems[k], &elems[best])? {
                best = k;
            }
        }
        for e in &elems {
            if !l.le(&elems[best], e)? {
                return Err(not_local(l));
            }
        }
        ordered.push(elems.remove(best));
    }
    let n = ordered.len() as i64 - 1;
    if n < 1 {
        return Err(not_local(l));
    }
    let target = MvAlgebra::chain(n as u32)?;
    let index: BTreeMap<MvElement, i64> = ordered.iter().cloned().zip(0..).collect();
    let l2 = l.clone();
    let to: Map = Arc::new(move |x| {
        index
            .get(x)
            .map(|k| MvElement::chain(*k, n))
            .ok_or_else(|| MvError::ForeignElement {
                algebra: l2.to_string(),
                element: x.clone(),
            })
    });
    let from: Map = Arc::new(move |y| match y {
        MvElement::Chain(r) => r
            .scaled(n)
            .and_then(|k| ordered.get(k as usize).cloned())
            .ok_or_else(|| MvError::InternalConsistency(format!("{r} outside the chain"))),
        other => Err(MvError::InternalConsistency(format!(
            "{other} is not a chain value"
        ))),
    });
    Ok(LexView {
        local: l.clone(),
        target,
        to,
        from,
    })
}

/// Presents a local algebra as `Ł_n` or as a gamma algebra.
pub fn lex_view(l: &MvAlgebra) -> Result<LexView> {
    match l.kind() {
        AlgebraKind::FiniteChain(_) | AlgebraKind::GammaLex { .. } => return Ok(identity_view(l)),
        _ if l.is_finite() => return enumerated_view(l),
        _ => {}
    }
    let AlgebraKind::Quotient { base, ideal, .. } = l.kind() else {
        return Err(not_local(l));
    };
    match (base.kind(), ideal.carrier()) {
        (AlgebraKind::GammaLex { unit, group }, IdealCarrier::Tail(killed)) => {
            let dim = group.dimension();
            let kept: Vec<usize> = (1..dim).filter(|c| !killed.contains(c)).collect();
            let mut ranks = Vec::new();
            let mut start = 1;
            for &r in &group.ranks()[1..] {
                let count = kept
                    .iter()
                    .filter(|&&c| c >= start && c < start + r)
                    .count();
                if count > 0 {
                    ranks.push(count);
                }
                start += r;
            }
            let u = *unit;
            if ranks.is_empty() {
                let target = MvAlgebra::chain(u as u32)?;
                let to: Map = Arc::new(move |x| match x {
                    MvElement::Lex(v) => Ok(MvElement::chain(v[0], u)),
                    other => Err(MvError::InternalConsistency(format!(
                        "{other} is not a lex element"
                    ))),
                });
                let from: Map = Arc::new(move |y| match y {
                    MvElement::Chain(r) => {
                        let mut v = vec![0; dim];
                        v[0] = r
                            .scaled(u)
                            .ok_or_else(|| MvError::InternalConsistency(format!("{r}")))?;
                        Ok(MvElement::Lex(v))
                    }
                    other => Err(MvError::InternalConsistency(format!(
                        "{other} is not a chain value"
                    ))),
                });
                return Ok(LexView {
                    local: l.clone(),
                    target,
                    to,
                    from,
                });
            }
            let target = MvAlgebra::gamma_lex(u, ranks)?;
            let kept_to = kept.clone();
            let to: Map = Arc::new(move |x| match x {
                MvElement::Lex(v) => Ok(MvElement::Lex(
                    std::iter::once(v[0])
                        .chain(kept_to.iter().map(|&c| v[c]))
                        .collect(),
                )),
                other => Err(MvError::InternalConsistency(format!(
                    "{other} is not a lex element"
                ))),
            });
            let from: Map = Arc::new(move |y| match y {
                MvElement::Lex(w) => {
                    let mut v = vec![0; dim];
                    v[0] = w[0];
                    for (k, &c) in kept.iter().enumerate() {
                        v[c] = w[k + 1];
                    }
                    Ok(MvElement::Lex(v))
                }
                other => Err(MvError::InternalConsistency(format!(
                    "{other} is not a lex element"
                ))),
            });
            Ok(LexView {
                local: l.clone(),
                target,
                to,
                from,
            })
        }
        (AlgebraKind::Product(fs), IdealCarrier::Product(ids)) => {
            let proper: Vec<usize> = (0..fs.len())
                .filter(|&k| !is_full(&fs[k], &ids[k]))
                .collect();
            let [k] = proper.as_slice() else {
                return Err(not_local(l));
            };
            let k = *k;
            let inner = lex_view(&fs[k].quotient_by(ids[k].clone())?)?;
            let zeros: Vec<MvElement> = fs.iter().map(|f| f.zero()).collect();
            let (i1, i2) = (inner.clone(), inner.clone());
            let to: Map = Arc::new(move |x| match x {
                MvElement::Tuple(items) => i1.to_target(&items[k]),
                other => Err(MvError::InternalConsistency(format!(
                    "{other} is not a tuple"
                ))),
            });
            let from: Map = Arc::new(move |y| {
                let mut items = zeros.clone();
                items[k] = i2.from_target(y)?;
                Ok(MvElement::Tuple(items))
            });
            Ok(LexView {
                local: l.clone(),
                target: inner.target.clone(),
                to,
                from,
            })
        }
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise { at, elsewhere },
        ) => {
            if !is_full(codomain, elsewhere) {
                return Err(not_local(l));
            }
            let proper: Vec<u64> = at
                .iter()
                .filter(|(_, j)| !is_full(codomain, j))
                .map(|(p, _)| *p)
                .collect();
            let [p] = proper.as_slice() else {
                return Err(not_local(l));
            };
            let p = *p;
            let inner = lex_view(&codomain.quotient_by(at[&p].clone())?)?;
            let (i1, i2) = (inner.clone(), inner.clone());
            let (l2, zero) = (l.clone(), codomain.zero());
            let to: Map = Arc::new(move |x| match x {
                MvElement::Cofinite(f) => i1.to_target(f.value_at(p)),
                other => Err(MvError::InternalConsistency(format!(
                    "{other} is not a cofinite function"
                ))),
            });
            let from: Map = Arc::new(move |y| {
                let v = i2.from_target(y)?;
                let f = CofiniteValue::new(zero.clone(), [(p, v)].into_iter().collect());
                l2.canonicalize(&MvElement::Cofinite(f))
            });
            Ok(LexView {
                local: l.clone(),
                target: inner.target.clone(),
                to,
                from,
            })
        }
        (
            AlgebraKind::Quotient {
                base: inner_base, ..
            },
            IdealCarrier::Lifted(j),
        ) => {
            let inner = lex_view(&inner_base.quotient_by((**j).clone())?)?;
            let (i1, i2) = (inner.clone(), inner.clone());
            Ok(LexView {
                local: l.clone(),
                target: inner.target.clone(),
                to: Arc::new(move |x| i1.to_target(x)),
                from: Arc::new(move |y| i2.from_target(y)),
            })
        }
        _ => Err(not_local(l)),
    }
}
