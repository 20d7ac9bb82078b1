use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{
    AlgebraKind, CofiniteValue, Homomorphism, MvAlgebra, MvElement, GENERIC_POINT,
};
use crate::error::{MvError, Result};
use crate::spectra::{
    intersect, lex_view, maximal_ideals, o_p, quotient, radical, retraction_search, same_ideal,
    zero_ideal, AbsenceCertificate, Ideal, IdealCarrier, LexView, RetractionOutcome,
};

/// `A/O_M` for one maximal ideal `M`, with its local presentation.
#[derive(Clone, Debug)]
pub struct LocalFactor {
    pub max_ideal: Ideal,
    pub o_m: Ideal,
    pub local: MvAlgebra,
    pub projection: Homomorphism,
    pub view: LexView,
    pub local_radical: Ideal,
}

/// One [`LocalFactor`] per maximal ideal, in the order of [`maximal_ideals`].
pub fn local_family(a: &MvAlgebra) -> Result<Vec<LocalFactor>> {
    let mut out = Vec::new();
    for m in maximal_ideals(a)? {
        let o_m = o_p(a, &m)?;
        let (local, projection) = quotient(a, &o_m)?;
        let view = lex_view(&local)?;
        let local_radical = radical(&local)?;
        out.push(LocalFactor {
            max_ideal: m,
            o_m,
            local,
            projection,
            view,
            local_radical,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalWitness {
    pub max_ideal: String,
    pub local_algebra: String,
    pub section_found: bool,
    pub certificate: Option<AbsenceCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocallyRetractiveReport {
    pub verdict: bool,
    pub per_max: Vec<LocalWitness>,
}

/// Section `A/M ≅ (A/O_M)/Rad → A/O_M` for one local factor.
pub fn local_section(f: &LocalFactor) -> Result<RetractionOutcome> {
    retraction_search(&f.local, &f.local_radical).map_err(|e| match e {
        MvError::RetractionInconclusive(m) => {
            MvError::RetractionInconclusive(format!("at {}: {m}", f.max_ideal))
        }
        other => other,
    })
}

pub fn is_locally_retractive(a: &MvAlgebra) -> Result<LocallyRetractiveReport> {
    let mut per_max = Vec::new();
    for f in local_family(a)? {
        let outcome = local_section(&f)?;
        let (section_found, certificate) = match outcome {
            RetractionOutcome::Found(_) => (true, None),
            RetractionOutcome::Absent(c) => (false, Some(c)),
        };
        per_max.push(LocalWitness {
            max_ideal: f.max_ideal.to_string(),
            local_algebra: f.view.target.to_string(),
            section_found,
            certificate,
        });
    }
    Ok(LocallyRetractiveReport {
        verdict: per_max.iter().all(|w| w.section_found),
        per_max,
    })
}

/// The element of `A` whose images in every `A/O_M` are `coords`, if any.
pub fn i_preimage(
    a: &MvAlgebra,
    family: &[LocalFactor],
    coords: &[MvElement],
) -> Result<Option<MvElement>> {
    let matches = |x: &MvElement| -> Result<bool> {
        for (f, c) in family.iter().zip(coords) {
            if f.projection.image(x)? != *c {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if a.is_finite() {
        for x in a.enumerate()? {
            if matches(&x)? {
                return Ok(Some(x));
            }
        }
        return Ok(None);
    }
    match a.kind() {
        AlgebraKind::GammaLex { .. } => {
            let x = coords[0].clone();
            Ok(matches(&x)?.then_some(x))
        }
        AlgebraKind::CofiniteFunction { .. } => {
            let mut values: BTreeMap<u64, MvElement> = BTreeMap::new();
            for (f, c) in family.iter().zip(coords) {
                let (IdealCarrier::Pointwise { at, .. }, MvElement::Cofinite(v)) =
                    (f.max_ideal.carrier(), c)
                else {
                    return Err(MvError::InternalConsistency(
                        "cofinite family out of shape".into(),
                    ));
                };
                for p in at.keys() {
                    values.insert(*p, v.value_at(*p).clone());
                }
            }
            let default = values.remove(&GENERIC_POINT).ok_or_else(|| {
                MvError::InternalConsistency("generic point missing from the family".into())
            })?;
            let x = MvElement::Cofinite(CofiniteValue::new(default, values));
            Ok((a.contains(&x) && matches(&x)?).then_some(x))
        }
        AlgebraKind::Product(fs) => {
            let mut items = Vec::new();
            for (k, fk) in fs.iter().enumerate() {
                let sub = local_family(fk)?;
                let mut comps = Vec::new();
                for (f, c) in family.iter().zip(coords) {
                    let (IdealCarrier::Product(parts), MvElement::Tuple(xs)) =
                        (f.max_ideal.carrier(), c)
                    else {
                        return Err(MvError::InternalConsistency(
                            "product family out of shape".into(),
                        ));
                    };
                    if !parts[k].contains(&fk.one()) {
                        comps.push(xs[k].clone());
                    }
                }
                match i_preimage(fk, &sub, &comps)? {
                    Some(x) => items.push(x),
                    None => return Ok(None),
                }
            }
            let x = MvElement::Tuple(items);
            Ok(matches(&x)?.then_some(x))
        }
        _ => Err(MvError::Unsupported(format!(
            "preimages under the subdirect embedding of {a}"
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdirectReport {
    pub coordinates: usize,
    pub meet_of_o_m_is_zero: Option<bool>,
    pub injective_on_checked: bool,
    pub coordinates_surjective: bool,
    pub surjective: Option<bool>,
    pub non_surjectivity_witness: Option<String>,
    pub elements_checked: usize,
}

/// `a ↦ (a/O_M)_M` into `∏ A/O_M`.
pub fn subdirect_embedding(a: &MvAlgebra) -> Result<SubdirectReport> {
    let family = local_family(a)?;
    let image = |x: &MvElement| -> Result<Vec<MvElement>> {
        family.iter().map(|f| f.projection.image(x)).collect()
    };
    let samples = if a.is_finite() {
        a.enumerate()?
    } else {
        a.sample_elements(1)
    };

    let meet_of_o_m_is_zero = match a.kind() {
        AlgebraKind::CofiniteFunction { .. } => None,
        _ => {
            let mut meet = crate::spectra::full_ideal(a);
            for f in &family {
                meet = intersect(a, &meet, &f.o_m)?;
            }
            Some(same_ideal(a, &meet, &zero_ideal(a))?)
        }
    };

    let mut seen = BTreeSet::new();
    for x in &samples {
        seen.insert(image(x)?);
    }
    let injective_on_checked = seen.len() == samples.len();

    let mut coordinates_surjective = true;
    for f in &family {
        let targets = f.local.sample_elements(1);
        for y in &targets {
            let hit = if a.is_finite() {
                samples
                    .iter()
                    .any(|x| f.projection.image(x).map(|z| z == *y).unwrap_or(false))
            } else {
                a.contains(y) && f.projection.image(y)? == *y
            };
            if !hit {
                coordinates_surjective = false;
            }
        }
    }

    let (surjective, non_surjectivity_witness) = if a.is_finite() {
        let mut total = 1usize;
        for f in &family {
            total *= f.local.cardinality().unwrap_or(0);
        }
        (Some(seen.len() == total), None)
    } else if let AlgebraKind::CofiniteFunction { .. } = a.kind() {
        let coords: Vec<MvElement> = family
            .iter()
            .map(|f| {
                f.view
                    .section(crate::rational::Rational::new(1, f.view.unit()))
            })
            .collect::<Result<_>>()?;
        match i_preimage(a, &family, &coords)? {
            None => (
                Some(false),
                Some(format!(
                    "the tuple with value {} at every coordinate has no preimage",
                    family[0].view.to_target(&coords[0])?
                )),
            ),
            Some(_) => (None, None),
        }
    } else {
        (None, None)
    };

    Ok(SubdirectReport {
        coordinates: family.len(),
        meet_of_o_m_is_zero,
        injective_on_checked,
        coordinates_surjective,
        surjective,
        non_surjectivity_witness,
        elements_checked: samples.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MvlthmReport {
    /// `(j'∘i')[A/Rad A] ⊆ i[A]` on the checked elements.
    pub criterion: bool,
    pub retraction_exists: bool,
    pub agree: bool,
    pub checked: usize,
    pub witness: Option<String>,
    pub certificate: Option<AbsenceCertificate>,
}

pub fn mvlthm_criterion(a: &MvAlgebra) -> Result<MvlthmReport> {
    let family = local_family(a)?;
    let mut sections = Vec::new();
    for f in &family {
        match local_section(f)? {
            RetractionOutcome::Found(j) => sections.push(j),
            RetractionOutcome::Absent(_) => {
                return Err(MvError::NotLocallyRetractive {
                    max_ideal: f.max_ideal.to_string(),
                })
            }
        }
    }
    let rad = radical(a)?;
    let (qr, _) = quotient(a, &rad)?;
    let samples = if qr.is_finite() {
        qr.enumerate()?
    } else {
        qr.sample_elements(1)
    };
    let mut criterion = true;
    let mut witness = None;
    for q in &samples {
        let mut coords = Vec::new();
        for (f, j) in family.iter().zip(&sections) {
            let (top, _) = quotient(&f.local, &f.local_radical)?;
            coords.push(j.image(&top.canonicalize(q)?)?);
        }
        if i_preimage(a, &family, &coords)?.is_none() {
            criterion = false;
            witness = Some(format!("(j'∘i')({q}) has no preimage under i"));
            break;
        }
    }
    let (retraction_exists, certificate) = match retraction_search(a, &rad)? {
        RetractionOutcome::Found(_) => (true, None),
        RetractionOutcome::Absent(c) => (false, Some(c)),
    };
    Ok(MvlthmReport {
        criterion,
        retraction_exists,
        agree: criterion == retraction_exists,
        checked: samples.len(),
        witness,
        certificate,
    })
}
