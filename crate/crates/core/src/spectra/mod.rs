//! Ideal theory: enumeration, primes, maximal ideals, radical, `O_P`,
//! quotients, retractions and lexicographic ideals.

mod ideal;
mod lex;
mod lexview;
mod local;
mod retraction;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{AlgebraKind, Homomorphism, MvAlgebra, MvElement, DESK_WINDOW, GENERIC_POINT};
use crate::error::{MvError, Result};

pub use ideal::{
    full_ideal, generated_ideal, ideal_elements, intersect, is_full, is_subset, same_ideal,
    zero_ideal, Ideal, IdealCarrier,
};
pub use lex::{
    angle_closure, check_lmv, f_i_isomorphism, FIso, FIsoReport, LmvReport, LMV_SAMPLE_BOUND,
};
pub use lexview::{lex_view, LexView};
pub use local::{
    i_preimage, is_locally_retractive, local_family, local_section, mvlthm_criterion,
    subdirect_embedding, LocalFactor, LocallyRetractiveReport, MvlthmReport, SubdirectReport,
};
pub use retraction::{retraction_search, AbsenceCertificate, RetractionOutcome};

fn sort_ideals(a: &MvAlgebra, mut v: Vec<Ideal>) -> Vec<Ideal> {
    if a.is_finite() {
        v.sort_by_key(|i| match i.carrier() {
            IdealCarrier::Explicit(s) => (s.len(), i.clone()),
            _ => (usize::MAX, i.clone()),
        });
    } else {
        v.sort_by_key(|i| (is_full(a, i), i.clone()));
    }
    v.dedup();
    v
}

fn gamma_ideals(group: &crate::ell_groups::LexGroup) -> Vec<Ideal> {
    let dim = group.dimension();
    let tail = &group.ranks()[1..];
    let last_start = dim - tail[tail.len() - 1];
    let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let last: Vec<usize> = (last_start..dim).collect();
    for mask in 0u32..(1 << last.len()) {
        sets.insert(
            last.iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, c)| *c)
                .collect(),
        );
    }
    let mut start = 1;
    for r in tail {
        sets.insert((start..dim).collect());
        start += r;
    }
    let mut out: Vec<Ideal> = sets.into_iter().map(Ideal::tail).collect();
    out.sort_by_key(|i| match i.carrier() {
        IdealCarrier::Tail(s) => (s.len(), s.clone()),
        _ => unreachable!(),
    });
    out.push(Ideal::full());
    out
}

/// Every ideal of `a`, in a deterministic order.
pub fn enumerate_ideals(a: &MvAlgebra) -> Result<Vec<Ideal>> {
    if a.is_finite() {
        let mut out = BTreeSet::new();
        for x in a.enumerate()? {
            out.insert(generated_ideal(a, &[x])?);
        }
        return Ok(sort_ideals(a, out.into_iter().collect()));
    }
    match a.kind() {
        AlgebraKind::GammaLex { group, .. } => Ok(gamma_ideals(group)),
        AlgebraKind::Product(fs) => {
            let lists = fs
                .iter()
                .map(enumerate_ideals)
                .collect::<Result<Vec<_>>>()?;
            let mut acc: Vec<Vec<Ideal>> = vec![Vec::new()];
            for list in &lists {
                acc = acc
                    .into_iter()
                    .flat_map(|p| {
                        list.iter().map(move |i| {
                            let mut q = p.clone();
                            q.push(i.clone());
                            q
                        })
                    })
                    .collect();
            }
            Ok(sort_ideals(
                a,
                acc.into_iter().map(Ideal::product).collect(),
            ))
        }
        AlgebraKind::Quotient { base, ideal, .. } => {
            let mut out = Vec::new();
            for j in enumerate_ideals(base)? {
                if is_subset(base, ideal, &j)? {
                    out.push(Ideal::lifted(j));
                }
            }
            Ok(sort_ideals(a, out))
        }
        _ => Err(MvError::IdealLatticeUnknown(a.to_string())),
    }
}

/// Prime by the ∧-test (finite) or by the structural rule for the kind.
pub fn is_prime(a: &MvAlgebra, i: &Ideal) -> Result<bool> {
    if is_full(a, i) {
        return Ok(false);
    }
    if a.is_finite() {
        let elems = a.enumerate()?;
        for x in &elems {
            if i.contains(x) {
                continue;
            }
            for y in &elems {
                if !i.contains(y) && i.contains(&a.meet(x, y)?) {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    match (a.kind(), i.carrier()) {
        (AlgebraKind::GammaLex { group, .. }, IdealCarrier::Tail(s)) => {
            let dim = group.dimension();
            let last = group.ranks()[group.ranks().len() - 1];
            let survivors = (dim - last..dim).filter(|c| !s.contains(c)).count();
            Ok(survivors <= 1)
        }
        (AlgebraKind::Product(fs), IdealCarrier::Product(parts)) => {
            let proper: Vec<usize> = (0..fs.len())
                .filter(|&k| !is_full(&fs[k], &parts[k]))
                .collect();
            match proper.as_slice() {
                [k] => is_prime(&fs[*k], &parts[*k]),
                _ => Ok(false),
            }
        }
        (AlgebraKind::Quotient { base, .. }, IdealCarrier::Lifted(inner)) => is_prime(base, inner),
        (
            AlgebraKind::CofiniteFunction { codomain, .. },
            IdealCarrier::Pointwise { at, elsewhere },
        ) => {
            if !is_full(codomain, elsewhere) {
                return Err(MvError::IdealLatticeUnknown(format!(
                    "primality of {i}: the desk-scale model only decides point ideals"
                )));
            }
            let proper: Vec<&Ideal> = at.values().filter(|j| !is_full(codomain, j)).collect();
            match proper.as_slice() {
                [j] => is_prime(codomain, j),
                _ => Ok(false),
            }
        }
        _ => Err(MvError::IdealLatticeUnknown(format!(
            "primality of {i} in {a}"
        ))),
    }
}

pub fn prime_ideals(a: &MvAlgebra) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    for i in enumerate_ideals(a)? {
        if is_prime(a, &i)? {
            out.push(i);
        }
    }
    Ok(out)
}

fn maximal_among(a: &MvAlgebra, ideals: &[Ideal]) -> Result<Vec<Ideal>> {
    let proper: Vec<&Ideal> = ideals.iter().filter(|i| !is_full(a, i)).collect();
    let mut out = Vec::new();
    for i in &proper {
        let mut top = true;
        for j in &proper {
            if i != j && is_subset(a, i, j)? && !is_subset(a, j, i)? {
                top = false;
                break;
            }
        }
        if top {
            out.push((*i).clone());
        }
    }
    Ok(out)
}

fn minimal_among(a: &MvAlgebra, ideals: &[Ideal]) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    for i in ideals {
        let mut bottom = true;
        for j in ideals {
            if i != j && is_subset(a, j, i)? && !is_subset(a, i, j)? {
                bottom = false;
                break;
            }
        }
        if bottom {
            out.push(i.clone());
        }
    }
    Ok(out)
}

/// Points of the cofinite carrier that carry maximal ideals at desk scale.
pub fn desk_points() -> Vec<u64> {
    (0..DESK_WINDOW).chain([GENERIC_POINT]).collect()
}

fn point_ideal(p: u64, j: Ideal) -> Ideal {
    Ideal::pointwise([(p, j)].into_iter().collect(), Ideal::full())
}

/// `Max A`. For cofinite function algebras this is the desk-scale family of
/// point ideals (window points and the generic point).
pub fn maximal_ideals(a: &MvAlgebra) -> Result<Vec<Ideal>> {
    if a.is_finite() {
        return maximal_among(a, &enumerate_ideals(a)?);
    }
    match a.kind() {
        AlgebraKind::GammaLex { group, .. } => Ok(vec![Ideal::tail(1..group.dimension())]),
        AlgebraKind::Product(fs) => {
            let mut out = Vec::new();
            for (k, f) in fs.iter().enumerate() {
                for m in maximal_ideals(f)? {
                    let parts = fs
                        .iter()
                        .enumerate()
                        .map(|(n, g)| if n == k { m.clone() } else { full_ideal(g) })
                        .collect();
                    out.push(Ideal::product(parts));
                }
            }
            Ok(out)
        }
        AlgebraKind::Quotient { base, ideal, .. } => {
            let mut out = Vec::new();
            for m in maximal_ideals(base)? {
                if is_subset(base, ideal, &m)? {
                    out.push(Ideal::lifted(m));
                }
            }
            Ok(out)
        }
        AlgebraKind::CofiniteFunction { codomain, .. } => {
            let ms = maximal_ideals(codomain)?;
            Ok(desk_points()
                .into_iter()
                .flat_map(|p| ms.iter().map(move |m| point_ideal(p, m.clone())))
                .collect())
        }
        _ => Err(MvError::IdealLatticeUnknown(a.to_string())),
    }
}

pub fn minimal_primes(a: &MvAlgebra) -> Result<Vec<Ideal>> {
    minimal_among(a, &prime_ideals(a)?)
}

/// `Rad A`, the intersection of all maximal ideals.
pub fn radical(a: &MvAlgebra) -> Result<Ideal> {
    if let AlgebraKind::CofiniteFunction { codomain, .. } = a.kind() {
        return Ok(Ideal::pointwise(BTreeMap::new(), radical(codomain)?));
    }
    let ms = maximal_ideals(a)?;
    let mut acc = full_ideal(a);
    for m in &ms {
        acc = intersect(a, &acc, m)?;
    }
    Ok(acc)
}

pub fn is_local(a: &MvAlgebra) -> Result<bool> {
    Ok(maximal_ideals(a)?.len() == 1)
}

/// `O_P` via `⋂{Q ∈ Min A : Q ⊆ P}`.
pub fn o_p_by_minimal_primes(a: &MvAlgebra, p: &Ideal) -> Result<Ideal> {
    let mut acc = full_ideal(a);
    for q in minimal_primes(a)? {
        if is_subset(a, &q, p)? {
            acc = intersect(a, &acc, &q)?;
        }
    }
    Ok(acc)
}

/// `O_P` via `⋃{x^⊥ : x ∉ P}` (finite algebras).
pub fn o_p_by_annihilators(a: &MvAlgebra, p: &Ideal) -> Result<Ideal> {
    let elems = a.enumerate()?;
    let zero = a.zero();
    let mut out = BTreeSet::new();
    for x in elems.iter().filter(|x| !p.contains(x)) {
        for y in &elems {
            if a.meet(x, y)? == zero {
                out.insert(y.clone());
            }
        }
    }
    Ok(Ideal::explicit(out))
}

/// `O_P` for a prime `P`. On finite algebras both characterizations are
/// computed and must agree.
pub fn o_p(a: &MvAlgebra, p: &Ideal) -> Result<Ideal> {
    if !is_prime(a, p)? {
        return Err(MvError::InvalidDescriptor(format!(
            "O_P needs a prime ideal, {p} is not prime"
        )));
    }
    if a.is_finite() {
        let first = o_p_by_minimal_primes(a, p)?;
        let second = o_p_by_annihilators(a, p)?;
        if first != second {
            return Err(MvError::InternalConsistency(format!(
                "O_P characterizations disagree for {p}: {first} vs {second}"
            )));
        }
        return Ok(first);
    }
    if let (AlgebraKind::CofiniteFunction { codomain, .. }, IdealCarrier::Pointwise { at, .. }) =
        (a.kind(), p.carrier())
    {
        let mut parts = BTreeMap::new();
        for (pt, j) in at {
            parts.insert(
                *pt,
                if is_full(codomain, j) {
                    j.clone()
                } else {
                    o_p(codomain, j)?
                },
            );
        }
        return Ok(Ideal::pointwise(parts, Ideal::full()));
    }
    o_p_by_minimal_primes(a, p)
}

/// `A/I` with its projection.
pub fn quotient(a: &MvAlgebra, i: &Ideal) -> Result<(MvAlgebra, Homomorphism)> {
    if is_full(a, i) {
        return Err(MvError::TrivialQuotient);
    }
    let q = a.quotient_by(i.clone())?;
    let pi = Homomorphism::projection(a, &q)?;
    Ok((q, pi))
}

pub fn is_primary(a: &MvAlgebra, i: &Ideal) -> Result<bool> {
    if is_full(a, i) {
        return Ok(false);
    }
    let (q, _) = quotient(a, i)?;
    is_local(&q)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealFlags {
    pub proper: bool,
    pub prime: bool,
    pub maximal: bool,
    pub primary: bool,
    pub retractive: bool,
    pub lexicographic: bool,
    pub lmv: Option<LmvReport>,
}

/// Every classification flag of `i`, each by its definition.
pub fn classify(a: &MvAlgebra, i: &Ideal) -> Result<IdealFlags> {
    let proper = !is_full(a, i);
    let prime = is_prime(a, i)?;
    let maximal = proper
        && maximal_ideals(a)?
            .iter()
            .any(|m| same_ideal(a, m, i).unwrap_or(false));
    let primary = proper && is_primary(a, i)?;
    let retractive = proper && matches!(retraction_search(a, i)?, RetractionOutcome::Found(_));
    let lmv = if proper { Some(check_lmv(a, i)?) } else { None };
    let lexicographic = lmv.as_ref().is_some_and(|r| r.all_pass());
    Ok(IdealFlags {
        proper,
        prime,
        maximal,
        primary,
        retractive,
        lexicographic,
        lmv,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub algebra: String,
    /// False when only the desk-scale maximal family is known.
    pub spec_complete: bool,
    pub spec: Vec<Ideal>,
    pub max: Vec<Ideal>,
    pub min: Vec<Ideal>,
    pub radical: Ideal,
    pub o_p: Vec<(Ideal, Ideal)>,
    pub all_o_p_primary: bool,
    /// `None` when `Max A` is only known at desk scale.
    pub radical_is_meet_of_max: Option<bool>,
}

pub fn spectrum_report(a: &MvAlgebra) -> Result<SpectrumReport> {
    let max = maximal_ideals(a)?;
    let (spec, spec_complete) = match prime_ideals(a) {
        Ok(p) => (p, true),
        Err(MvError::IdealLatticeUnknown(_)) => (max.clone(), false),
        Err(e) => return Err(e),
    };
    let min = if spec_complete {
        minimal_among(a, &spec)?
    } else {
        Vec::new()
    };
    let rad = radical(a)?;
    let mut meet = full_ideal(a);
    for m in &max {
        meet = intersect(a, &meet, m)?;
    }
    let radical_is_meet_of_max = match a.kind() {
        AlgebraKind::CofiniteFunction { .. } => None,
        _ => Some(same_ideal(a, &meet, &rad)?),
    };
    let mut table = Vec::new();
    let mut all_primary = true;
    for p in &spec {
        let o = o_p(a, p)?;
        all_primary &= is_primary(a, &o)?;
        table.push((p.clone(), o));
    }
    Ok(SpectrumReport {
        algebra: a.to_string(),
        spec_complete,
        spec,
        max,
        min,
        radical: rad,
        o_p: table,
        all_o_p_primary: all_primary,
        radical_is_meet_of_max,
    })
}

/// Brute-force ideal test used as an independent oracle.
pub fn is_ideal_set(a: &MvAlgebra, set: &BTreeSet<MvElement>) -> Result<bool> {
    if !set.contains(&a.zero()) {
        return Ok(false);
    }
    for x in set {
        for y in set {
            if !set.contains(&a.oplus(x, y)?) {
                return Ok(false);
            }
        }
    }
    for y in a.enumerate()? {
        if !set.contains(&y) && set.iter().any(|x| a.le(&y, x).unwrap_or(false)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership of `A` in the classes `Perfect ⊂ Local with retractive radical
/// ⊂ Lexicographic ⊂ Local`, each decided by its own definition.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraClass {
    pub local: bool,
    /// Every checked element or its negation is infinitesimal.
    pub perfect: bool,
    pub retractive_radical_local: bool,
    pub radical_trivial: bool,
    /// `None` when the ideal lattice is not available.
    pub lexicographic: Option<bool>,
    pub elements_checked: usize,
}

impl AlgebraClass {
    /// Broken implications of the chain. `Retractive-radical local ⇒
    /// Lexicographic` is only asserted when `Rad A ≠ {0}`.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.perfect && !self.retractive_radical_local {
            out.push("perfect ⇒ local with retractive radical");
        }
        if self.retractive_radical_local
            && !self.radical_trivial
            && self.lexicographic == Some(false)
        {
            out.push("local with retractive radical ⇒ lexicographic");
        }
        if self.lexicographic == Some(true) && !self.local {
            out.push("lexicographic ⇒ local");
        }
        out
    }
}

pub fn classify_algebra(a: &MvAlgebra) -> Result<AlgebraClass> {
    let local = is_local(a)?;
    let samples = if a.is_finite() {
        a.enumerate()?
    } else {
        a.sample_elements(3)
    };
    let mut perfect = local;
    for x in &samples {
        if !perfect {
            break;
        }
        perfect = a.is_infinitesimal(x)? != a.is_infinitesimal(&a.neg(x)?)?;
    }
    let rad = radical(a)?;
    let radical_trivial = same_ideal(a, &rad, &zero_ideal(a))?;
    let retractive_radical_local = local && retraction_search(a, &rad)?.is_found();
    let lexicographic = match enumerate_ideals(a) {
        Ok(ideals) => {
            let mut found = false;
            for i in ideals.iter().filter(|i| !is_full(a, i)) {
                if check_lmv(a, i)?.all_pass() {
                    found = true;
                    break;
                }
            }
            Some(found)
        }
        Err(MvError::IdealLatticeUnknown(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AlgebraClass {
        local,
        perfect,
        retractive_radical_local,
        radical_trivial,
        lexicographic,
        elements_checked: samples.len(),
    })
}
