use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{
    check_homomorphism, closure, AlgebraKind, CofiniteValue, DefaultPredicate, Homomorphism,
    MvAlgebra, MvElement, DEFAULT_CLOSURE_BUDGET,
};
use crate::error::{MvError, Result};
use crate::spectra::{quotient, radical, same_ideal, zero_ideal, Ideal};

/// An exhausted search, recorded so that it can be replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsenceCertificate {
    pub method: String,
    /// Number of candidate assignments or values examined.
    pub examined: usize,
    pub steps: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum RetractionOutcome {
    /// A homomorphism `j: A/I → A` with `π ∘ j = id`.
    Found(Homomorphism),
    Absent(AbsenceCertificate),
}

impl RetractionOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, RetractionOutcome::Found(_))
    }
}

/// Looks for a right inverse of the projection `A → A/I`.
pub fn retraction_search(a: &MvAlgebra, i: &Ideal) -> Result<RetractionOutcome> {
    let (q, _) = quotient(a, i)?;
    if same_ideal(a, i, &zero_ideal(a))? {
        return Ok(RetractionOutcome::Found(Homomorphism::from_fn(
            &q,
            a,
            "j",
            |x| Ok(x.clone()),
        )));
    }
    if a.is_finite() {
        return finite_search(a, &q);
    }
    let section = Homomorphism::from_fn(&q, a, "j", |x| Ok(x.clone()));
    let samples = section_samples(&q);
    let report = check_homomorphism(&section, Some(&samples))?;
    if report.pass {
        return Ok(RetractionOutcome::Found(section));
    }
    if let AlgebraKind::CofiniteFunction {
        codomain,
        admissible,
    } = a.kind()
    {
        if same_ideal(a, i, &radical(a)?)? {
            return cofinite_case_split(a, &q, codomain, *admissible);
        }
    }
    Err(MvError::RetractionInconclusive(format!(
        "{a} over {i}: canonical representatives are not a subalgebra ({})",
        report.failures.first().cloned().unwrap_or_default()
    )))
}

fn section_samples(q: &MvAlgebra) -> Vec<MvElement> {
    let mut s = q.sample_elements(2);
    s.truncate(160);
    s
}

/// Greedy generating set of a finite algebra.
fn generators(q: &MvAlgebra) -> Result<Vec<MvElement>> {
    let all = q.enumerate()?;
    let mut gens = Vec::new();
    let mut span = closure(q, &[], DEFAULT_CLOSURE_BUDGET)?;
    for x in &all {
        if !span.contains(x) {
            gens.push(x.clone());
            span = closure(q, &gens, DEFAULT_CLOSURE_BUDGET)?;
        }
    }
    Ok(gens)
}

/// Extends `map` to the subalgebra generated by its domain; `None` on conflict.
fn propagate(
    q: &MvAlgebra,
    a: &MvAlgebra,
    mut map: BTreeMap<MvElement, MvElement>,
) -> Result<Option<BTreeMap<MvElement, MvElement>>> {
    loop {
        let snapshot: Vec<(MvElement, MvElement)> =
            map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut fresh = Vec::new();
        for (x, fx) in &snapshot {
            fresh.push((q.neg(x)?, a.neg(fx)?));
            for (y, fy) in &snapshot {
                fresh.push((q.oplus(x, y)?, a.oplus(fx, fy)?));
            }
        }
        let before = map.len();
        for (k, v) in fresh {
            match map.get(&k) {
                Some(w) if *w != v => return Ok(None),
                Some(_) => {}
                None => {
                    map.insert(k, v);
                }
            }
        }
        if map.len() == before {
            return Ok(Some(map));
        }
    }
}

fn finite_search(a: &MvAlgebra, q: &MvAlgebra) -> Result<RetractionOutcome> {
    let gens = generators(q)?;
    let elems = a.enumerate()?;
    let mut preimages = Vec::new();
    for g in &gens {
        let mut v = Vec::new();
        for x in &elems {
            if q.canonicalize(x)? == *g {
                v.push(x.clone());
            }
        }
        preimages.push(v);
    }
    let start: BTreeMap<MvElement, MvElement> = [(q.zero(), a.zero())].into_iter().collect();
    let mut examined = 0;
    let total = q.cardinality().unwrap_or(0);
    if let Some(map) = propagate(q, a, start)? {
        if let Some(found) = backtrack(q, a, &gens, &preimages, 0, map, total, &mut examined)? {
            return Ok(RetractionOutcome::Found(Homomorphism::from_table(
                q, a, "j", found,
            )));
        }
    }
    let steps = gens
        .iter()
        .zip(&preimages)
        .map(|(g, p)| format!("generator {g}: {} preimage candidates", p.len()))
        .collect();
    Ok(RetractionOutcome::Absent(AbsenceCertificate {
        method: "exhaustive backtracking over preimages of a generating set".into(),
        examined,
        steps,
    }))
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    q: &MvAlgebra,
    a: &MvAlgebra,
    gens: &[MvElement],
    preimages: &[Vec<MvElement>],
    k: usize,
    map: BTreeMap<MvElement, MvElement>,
    total: usize,
    examined: &mut usize,
) -> Result<Option<BTreeMap<MvElement, MvElement>>> {
    if k == gens.len() {
        return Ok((map.len() == total).then_some(map));
    }
    if let Some(existing) = map.get(&gens[k]) {
        if !preimages[k].contains(existing) {
            return Ok(None);
        }
        return backtrack(q, a, gens, preimages, k + 1, map, total, examined);
    }
    for cand in &preimages[k] {
        *examined += 1;
        let mut m = map.clone();
        m.insert(gens[k].clone(), cand.clone());
        if let Some(m) = propagate(q, a, m)? {
            if let Some(done) = backtrack(q, a, gens, preimages, k + 1, m, total, examined)? {
                return Ok(Some(done));
            }
        }
    }
    Ok(None)
}

const TAIL_SWEEP: i64 = 64;

/// Case analysis for cofinite function algebras over their radical.
///
/// The class `c` of the constant function of height one satisfies
/// `c* = (u−1)·c` in `A/Rad A`, so its image under any section satisfies the
/// same equation pointwise, in particular at the default value.
fn cofinite_case_split(
    a: &MvAlgebra,
    q: &MvAlgebra,
    codomain: &MvAlgebra,
    admissible: DefaultPredicate,
) -> Result<RetractionOutcome> {
    let AlgebraKind::GammaLex { unit, group } = codomain.kind() else {
        return Err(MvError::RetractionInconclusive(format!(
            "{a}: codomain is not a gamma algebra"
        )));
    };
    let u = *unit;
    if u < 2 || group.dimension() != 2 {
        return Err(MvError::RetractionInconclusive(format!(
            "{a}: case analysis covers rank-one tails with unit at least 2"
        )));
    }
    let seed = (-1..=1)
        .map(|t| MvElement::Cofinite(CofiniteValue::constant(MvElement::Lex(vec![1, t]))))
        .find(|x| a.contains(x))
        .ok_or_else(|| MvError::InternalConsistency("no constant of height one".into()))?;
    let c = q.canonicalize(&seed)?;
    let mut steps = vec![format!(
        "generator c = class of the constant {seed} in A/Rad A, canonical {c}"
    )];
    let lhs = q.neg(&c)?;
    let rhs = q.multiple((u - 1) as u32, &c)?;
    if lhs != rhs {
        return Err(MvError::InternalConsistency(format!(
            "c* = {lhs} differs from (u-1)c = {rhs}"
        )));
    }
    steps.push(format!("in A/Rad A: c* = {}·c", u - 1));
    steps.push("π(j(c)) = c forces height 1 at every point, including the default".into());
    let mut solutions = BTreeSet::new();
    let mut examined = 0;
    for t in -TAIL_SWEEP..=TAIL_SWEEP {
        examined += 1;
        let y = MvElement::Lex(vec![1, t]);
        if codomain.neg(&y)? == codomain.multiple((u - 1) as u32, &y)? {
            solutions.insert(t);
        }
    }
    steps.push(format!(
        "pointwise y* = {}·y with y = (1,t): (u−1,−t) = (u−1,(u−1)t) iff u·t = 0 iff t = 0; \
         sweep over t in [−{TAIL_SWEEP},{TAIL_SWEEP}] finds {:?}",
        u - 1,
        solutions
    ));
    if solutions != [0].into_iter().collect() {
        return Err(MvError::InternalConsistency(format!(
            "unexpected solutions {solutions:?}"
        )));
    }
    let forced = MvElement::Lex(vec![1, 0]);
    if admissible.admits(&forced) {
        return Err(MvError::RetractionInconclusive(format!(
            "{a}: the forced default {forced} is admissible, case analysis gives no obstruction"
        )));
    }
    steps.push(format!(
        "the forced default {forced} is not admissible, so j(c) ∉ A"
    ));
    Ok(RetractionOutcome::Absent(AbsenceCertificate {
        method: "case split on admissible default values".into(),
        examined,
        steps,
    }))
}
