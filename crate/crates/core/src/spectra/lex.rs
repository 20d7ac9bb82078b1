use serde::Serialize;

use crate::algebra::{AlgebraKind, Homomorphism, MvAlgebra, MvElement};
use crate::ell_groups::{
    gamma, gamma_inverse, group_completion, Completion, GroupElement, UnitalGroup,
};
use crate::error::{MvError, Result};
use crate::rational::Rational;
use crate::spectra::{
    is_prime, lex_view, quotient, retraction_search, same_ideal, zero_ideal, Ideal, LexView,
    RetractionOutcome,
};

/// Coordinate bound for samples of infinite algebras in the LMV checks.
pub const LMV_SAMPLE_BOUND: i64 = 3;

/// Membership in `⟨I⟩ = I ∪ {ρ* : ρ ∈ I}`.
pub fn angle_closure(a: &MvAlgebra, i: &Ideal, x: &MvElement) -> Result<bool> {
    Ok(i.contains(x) || i.contains(&a.neg(x)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct LmvReport {
    pub lmv1_nonzero: bool,
    pub lmv2_strict: bool,
    pub lmv3_retractive: bool,
    pub lmv4_prime: bool,
    pub lmv5_sandwich: bool,
    pub exhaustive: bool,
    /// Coordinate bound of the sample frontier when not exhaustive.
    pub sample_bound: Option<i64>,
    pub elements_checked: usize,
    pub witnesses: Vec<String>,
}

impl LmvReport {
    pub fn all_pass(&self) -> bool {
        self.lmv1_nonzero
            && self.lmv2_strict
            && self.lmv3_retractive
            && self.lmv4_prime
            && self.lmv5_sandwich
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        [
            (self.lmv1_nonzero, "LMV1"),
            (self.lmv2_strict, "LMV2"),
            (self.lmv3_retractive, "LMV3"),
            (self.lmv4_prime, "LMV4"),
            (self.lmv5_sandwich, "LMV5"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

fn lt(a: &MvAlgebra, x: &MvElement, y: &MvElement) -> Result<bool> {
    Ok(x != y && a.le(x, y)?)
}

/// Checks LMV1–LMV5 for `i`, exhaustively when `a` is finite.
pub fn check_lmv(a: &MvAlgebra, i: &Ideal) -> Result<LmvReport> {
    let exhaustive = a.is_finite();
    let samples = if exhaustive {
        a.enumerate()?
    } else {
        a.sample_elements(LMV_SAMPLE_BOUND)
    };
    let mut witnesses = Vec::new();
    let (q, pi) = quotient(a, i)?;

    let lmv1_nonzero = !same_ideal(a, i, &zero_ideal(a))?;
    if !lmv1_nonzero {
        witnesses.push("LMV1: the ideal is {0}".into());
    }

    let images: Vec<MvElement> = samples.iter().map(|x| pi.image(x)).collect::<Result<_>>()?;
    let mut lmv2_strict = true;
    'outer: for (x, px) in samples.iter().zip(&images) {
        for (y, py) in samples.iter().zip(&images) {
            if lt(&q, px, py)? && !lt(a, x, y)? {
                witnesses.push(format!("LMV2: {x}/I < {y}/I but not {x} < {y}"));
                lmv2_strict = false;
                break 'outer;
            }
        }
    }

    let lmv3_retractive = match retraction_search(a, i) {
        Ok(RetractionOutcome::Found(_)) => true,
        Ok(RetractionOutcome::Absent(_)) => {
            witnesses.push("LMV3: no section of the projection".into());
            false
        }
        Err(MvError::RetractionInconclusive(m)) => {
            witnesses.push(format!("LMV3 inconclusive: {m}"));
            false
        }
        Err(e) => return Err(e),
    };

    let lmv4_prime = is_prime(a, i)?;
    if !lmv4_prime {
        witnesses.push("LMV4: not prime".into());
    }

    let rhos: Vec<&MvElement> = samples.iter().filter(|x| i.contains(x)).collect();
    let mut lmv5_sandwich = true;
    'five: for x in &samples {
        if angle_closure(a, i, x)? {
            continue;
        }
        for rho in &rhos {
            if !(a.le(rho, x)? && a.le(x, &a.neg(rho)?)?) {
                witnesses.push(format!("LMV5: {rho} ≤ {x} ≤ {rho}* fails"));
                lmv5_sandwich = false;
                break 'five;
            }
        }
    }

    Ok(LmvReport {
        lmv1_nonzero,
        lmv2_strict,
        lmv3_retractive,
        lmv4_prime,
        lmv5_sandwich,
        exhaustive,
        sample_bound: (!exhaustive).then_some(LMV_SAMPLE_BOUND),
        elements_checked: samples.len(),
        witnesses,
    })
}

/// The isomorphism `f_I: A → Γ(H ×_lex G, (u,0))` of a lexicographic ideal.
#[derive(Clone, Debug)]
pub struct FIso {
    pub source: MvAlgebra,
    pub target: MvAlgebra,
    quotient_view: LexView,
    projection: Homomorphism,
    section: Homomorphism,
    completion: Completion,
    h_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FIsoReport {
    pub target: String,
    pub pairs_checked: usize,
    pub homomorphism: bool,
    pub injective: bool,
    pub round_trip: bool,
    pub failures: Vec<String>,
}

impl FIsoReport {
    pub fn pass(&self) -> bool {
        self.homomorphism && self.injective && self.round_trip
    }
}

fn lex_coords(x: &MvElement) -> Result<Vec<i64>> {
    match x {
        MvElement::Lex(v) => Ok(v.clone()),
        other => Err(MvError::InternalConsistency(format!(
            "{other} is not a Γ element"
        ))),
    }
}

impl FIso {
    /// `s_a = δ_I(π_I(a))`.
    pub fn s(&self, x: &MvElement) -> Result<MvElement> {
        self.section.image(&self.projection.image(x)?)
    }

    /// `(ε_a, τ_a) = (a ⊙ s_a*, a* ⊙ s_a)`.
    pub fn epsilon_tau(&self, x: &MvElement) -> Result<(MvElement, MvElement)> {
        let a = &self.source;
        let s = self.s(x)?;
        Ok((a.odot(x, &a.neg(&s)?)?, a.odot(&a.neg(x)?, &s)?))
    }

    /// `f_I(a)` as a payload of the target gamma algebra.
    pub fn image(&self, x: &MvElement) -> Result<MvElement> {
        let s = self.s(x)?;
        let (eps, tau) = self.epsilon_tau(x)?;
        let z = self.zeta(&s)?;
        let g = self
            .completion
            .group
            .sub(&self.completion.eta(&eps)?, &self.completion.eta(&tau)?);
        Ok(MvElement::Lex(z.into_iter().chain(g.0).collect()))
    }

    fn zeta(&self, s: &MvElement) -> Result<Vec<i64>> {
        let y = self.quotient_view.to_target(&self.projection.image(s)?)?;
        match y {
            MvElement::Chain(r) => Ok(vec![r
                .scaled(self.quotient_view.unit())
                .expect("chain value")]),
            other => lex_coords(&other),
        }
    }

    /// `(ζ(s_a)/u, η(ε_a) − η(τ_a))` with the first coordinate normalized.
    pub fn components(&self, x: &MvElement) -> Result<(Rational, GroupElement)> {
        let v = lex_coords(&self.image(x)?)?;
        Ok((
            Rational::new(v[0], self.quotient_view.unit()),
            GroupElement(v[self.h_dim..].to_vec()),
        ))
    }

    /// Inverse of [`FIso::components`].
    pub fn from_components(&self, value: Rational, g: &GroupElement) -> Result<MvElement> {
        let u = self.quotient_view.unit();
        let h = value
            .scaled(u)
            .ok_or_else(|| MvError::SpectrumValue(format!("{value} is not a multiple of 1/{u}")))?;
        let mut v = vec![0; self.h_dim];
        v[0] = h;
        v.extend_from_slice(&g.0);
        self.inverse(&MvElement::Lex(v))
    }

    pub fn inverse(&self, y: &MvElement) -> Result<MvElement> {
        let v = lex_coords(y)?;
        let h = &v[..self.h_dim];
        let g = GroupElement(v[self.h_dim..].to_vec());
        let hv = match self.quotient_view.target.kind() {
            AlgebraKind::FiniteChain(n) => MvElement::chain(h[0], *n as i64),
            _ => MvElement::Lex(h.to_vec()),
        };
        let s = self.section.image(&self.quotient_view.from_target(&hv)?)?;
        let grp = &self.completion.group;
        let zero = grp.zero();
        let pos = self.completion.eta_inverse(&grp.join(&g, &zero))?;
        let neg = self
            .completion
            .eta_inverse(&grp.join(&grp.neg(&g), &zero))?;
        let a = &self.source;
        a.ominus(&a.oplus(&s, &pos)?, &neg)
    }
}

/// Builds `f_I` and checks it on a sample of `A` and of the target.
pub fn f_i_isomorphism(a: &MvAlgebra, i: &Ideal) -> Result<(FIso, FIsoReport)> {
    let lmv = check_lmv(a, i)?;
    if let Some(axiom) = lmv.first_failure() {
        return Err(MvError::NotLexicographic {
            axiom: axiom.to_string(),
        });
    }
    let (q, projection) = quotient(a, i)?;
    let RetractionOutcome::Found(section) = retraction_search(a, i)? else {
        return Err(MvError::NotLexicographic {
            axiom: "LMV3".into(),
        });
    };
    let quotient_view = lex_view(&q)?;
    let h = gamma_inverse(&quotient_view.target)
        .ok_or_else(|| MvError::Unsupported(format!("Γ⁻¹ of {}", quotient_view.target)))?;
    let completion = group_completion(a, i)?;
    let group = h.group.lex_product(&completion.group)?;
    let mut unit = h.unit.0.clone();
    unit.extend(std::iter::repeat_n(0, completion.group.dimension()));
    let target = gamma(&UnitalGroup::new(group, GroupElement(unit))?)?;
    let fiso = FIso {
        source: a.clone(),
        target: target.clone(),
        quotient_view,
        projection,
        section,
        completion,
        h_dim: h.group.dimension(),
    };

    let samples = a.sample_elements(LMV_SAMPLE_BOUND);
    let images: Vec<MvElement> = samples
        .iter()
        .map(|x| fiso.image(x))
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (x, fx) in samples.iter().zip(&images) {
        if !target.contains(fx) {
            failures.push(format!("f({x}) = {fx} is outside {target}"));
        }
        if fiso.image(&a.neg(x)?)? != target.neg(fx)? {
            failures.push(format!("f does not preserve * at {x}"));
        }
        for (y, fy) in samples.iter().zip(&images) {
            pairs += 1;
            if fiso.image(&a.oplus(x, y)?)? != target.oplus(fx, fy)? {
                failures.push(format!("f does not preserve ⊕ at ({x}, {y})"));
            }
        }
    }
    let homomorphism = failures.is_empty();
    let distinct: std::collections::BTreeSet<&MvElement> = images.iter().collect();
    let injective = distinct.len() == samples.len();
    if !injective {
        failures.push("two samples share an image".into());
    }
    let mut round_trip = true;
    for y in target.sample_elements(LMV_SAMPLE_BOUND) {
        let x = fiso.inverse(&y)?;
        if !a.contains(&x) || fiso.image(&x)? != y {
            failures.push(format!("f(f⁻¹({y})) ≠ {y}"));
            round_trip = false;
        }
    }
    let report = FIsoReport {
        target: target.to_string(),
        pairs_checked: pairs,
        homomorphism,
        injective,
        round_trip,
        failures,
    };
    Ok((fiso, report))
}
