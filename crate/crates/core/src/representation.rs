//! The sheaf representation of a locally retractive MV-algebra: germs
//! `g_aM`, the sheaf of ℓ-groups over `τ_A`, its sheaf space and the
//! algebra of global sections.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraKind, Homomorphism, MvAlgebra, MvElement};
use crate::axioms::MvStructure;
use crate::ell_groups::{group_completion, Completion, GroupElement, LexGroup};
use crate::error::{MvError, Result};
use crate::intmat::IntMat;
use crate::rational::Rational;
use crate::sheaf::{stalk_at, Arrow, Carrier, Presheaf, SheafSpace};
use crate::spectra::{
    f_i_isomorphism, i_preimage, intersect, local_family, local_section, quotient, radical,
    same_ideal, subdirect_embedding, FIso, Ideal, LocalFactor,
};
use crate::topology::{generate_topology_bounded, mv_spectrum, FuzzySet, MvSpectrum};

/// Everything needed to evaluate `Ψ` at one maximal ideal.
#[derive(Clone, Debug)]
pub struct MaxPoint {
    pub factor: LocalFactor,
    /// `G(M/O_M)`.
    pub completion: Completion,
    /// `None` when `M/O_M` is trivial.
    pub fiso: Option<FIso>,
}

impl MaxPoint {
    pub fn group(&self) -> &LexGroup {
        &self.completion.group
    }
}

/// `A` together with its MV-spectrum and per-`M` lexicographic data.
#[derive(Clone, Debug)]
pub struct Representation {
    pub algebra: MvAlgebra,
    pub spectrum: MvSpectrum,
    pub points: Vec<MaxPoint>,
}

impl Representation {
    pub fn new(a: &MvAlgebra) -> Result<Self> {
        let spectrum = mv_spectrum(a)?;
        let mut points = Vec::new();
        for factor in local_family(a)? {
            if !local_section(&factor)?.is_found() {
                return Err(MvError::NotLocallyRetractive {
                    max_ideal: factor.max_ideal.to_string(),
                });
            }
            let completion = group_completion(&factor.local, &factor.local_radical)?;
            let fiso = if completion.group.is_trivial() {
                None
            } else {
                Some(f_i_isomorphism(&factor.local, &factor.local_radical)?.0)
            };
            points.push(MaxPoint {
                factor,
                completion,
                fiso,
            });
        }
        Ok(Representation {
            algebra: a.clone(),
            spectrum,
            points,
        })
    }

    pub fn max_ideals(&self) -> Vec<&Ideal> {
        self.points.iter().map(|p| &p.factor.max_ideal).collect()
    }

    /// `â(M)`.
    pub fn value(&self, m: usize, x: &MvElement) -> Result<Rational> {
        let f = &self.points[m].factor;
        f.view.height(&f.projection.image(x)?)
    }

    /// `g_aM = η(a/O_M ⊖ s(a/M)) − η(s(a/M) ⊖ a/O_M)`.
    pub fn germ(&self, m: usize, x: &MvElement) -> Result<GroupElement> {
        let p = &self.points[m];
        match &p.fiso {
            None => Ok(p.group().zero()),
            Some(f) => Ok(f.components(&p.factor.projection.image(x)?)?.1),
        }
    }

    /// `Ψ(a) = {(â(M), g_aM)}_M`.
    pub fn psi(&self, x: &MvElement) -> Result<GlobalSection> {
        self.algebra.check(x)?;
        let mut out = Vec::with_capacity(self.points.len());
        for m in 0..self.points.len() {
            out.push(Germ {
                value: self.value(m, x)?,
                germ: self.germ(m, x)?,
            });
        }
        Ok(GlobalSection(out))
    }

    /// `(x ⊕ y)` in `Γ(R ×_lex G(M/O_M), (1,0))`.
    pub fn stalk_oplus(&self, m: usize, x: &Germ, y: &Germ) -> Germ {
        let g = self.points[m].group();
        let one = Rational::integer(1);
        let v = x.value + y.value;
        let sum = g.add(&x.germ, &y.germ);
        if v < one {
            Germ {
                value: v,
                germ: sum,
            }
        } else if v > one {
            Germ {
                value: one,
                germ: g.zero(),
            }
        } else {
            Germ {
                value: one,
                germ: g.meet(&sum, &g.zero()),
            }
        }
    }

    pub fn stalk_neg(&self, m: usize, x: &Germ) -> Germ {
        Germ {
            value: Rational::integer(1) - x.value,
            germ: self.points[m].group().neg(&x.germ),
        }
    }

    pub fn componentwise_oplus(&self, s: &GlobalSection, t: &GlobalSection) -> GlobalSection {
        GlobalSection(
            (0..self.points.len())
                .map(|m| self.stalk_oplus(m, &s.0[m], &t.0[m]))
                .collect(),
        )
    }

    pub fn componentwise_neg(&self, s: &GlobalSection) -> GlobalSection {
        GlobalSection(
            (0..self.points.len())
                .map(|m| self.stalk_neg(m, &s.0[m]))
                .collect(),
        )
    }

    /// The stalk-side formula for `g_aM`, evaluated with `ε_a, τ_a` and the
    /// completion `G(M/O_M)` of the stalk.
    pub fn germ_via_stalk(
        &self,
        m: usize,
        x: &MvElement,
        stalk: &Completion,
    ) -> Result<GroupElement> {
        let p = &self.points[m];
        match &p.fiso {
            None => Ok(stalk.group.zero()),
            Some(f) => {
                let (eps, tau) = f.epsilon_tau(&p.factor.projection.image(x)?)?;
                Ok(stalk.group.sub(&stalk.eta(&eps)?, &stalk.eta(&tau)?))
            }
        }
    }
}

/// One component `(â(M), g_aM)` of a global section.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Germ {
    pub value: Rational,
    pub germ: GroupElement,
}

/// `𝔞 = {(â(M), g_aM)}_M`, in the order of the maximal ideals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GlobalSection(pub Vec<Germ>);

impl fmt::Display for GlobalSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", g.value, g.germ)?;
        }
        write!(f, "}}")
    }
}

/// `A_U = A/O_U` with `O_U = ⋂_{M∈U} O_M`, and the completion of its radical.
#[derive(Clone, Debug)]
pub struct OpenData {
    pub support: BTreeSet<usize>,
    pub o_u: Option<Ideal>,
    pub algebra: Option<MvAlgebra>,
    pub completion: Option<Completion>,
}

impl OpenData {
    pub fn group(&self) -> LexGroup {
        self.completion
            .as_ref()
            .map(|c| c.group.clone())
            .unwrap_or_else(LexGroup::trivial)
    }
}

/// `𝔥: α ↦ G(Rad(A/O_{supp α}))` over `τ_A`.
#[derive(Clone, Debug)]
pub struct SheafOfGroups {
    pub presheaf: Presheaf,
    /// Keyed by support.
    pub data: BTreeMap<BTreeSet<usize>, OpenData>,
}

fn open_data(rep: &Representation, u: &BTreeSet<usize>) -> Result<OpenData> {
    let a = &rep.algebra;
    if u.is_empty() {
        return Ok(OpenData {
            support: u.clone(),
            o_u: None,
            algebra: None,
            completion: None,
        });
    }
    let mut o_u: Option<Ideal> = None;
    for &m in u {
        let o_m = &rep.points[m].factor.o_m;
        o_u = Some(match o_u {
            None => o_m.clone(),
            Some(i) => intersect(a, &i, o_m)?,
        });
    }
    let o_u = o_u.expect("nonempty support");
    let (q, _) = quotient(a, &o_u)?;
    let rad = radical(&q)?;
    let label = u
        .iter()
        .map(|&m| rep.points[m].factor.max_ideal.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let completion = group_completion(&q, &rad).map_err(|e| match e {
        MvError::CompletionUnsupported(m) => {
            MvError::CompletionUnsupported(format!("over U = {{{label}}}: {m}"))
        }
        other => other,
    })?;
    Ok(OpenData {
        support: u.clone(),
        o_u: Some(o_u),
        algebra: Some(q),
        completion: Some(completion),
    })
}

/// Matrix of `G(Rad A_U) → G(Rad A_V)` induced by the projection `A_U → A_V`.
fn transport(from: &OpenData, to: &OpenData) -> Result<IntMat> {
    let (src, dst) = (from.group(), to.group());
    let mut m = IntMat::zeros(dst.dimension(), src.dimension());
    let (Some(cu), Some(au)) = (&from.completion, &from.algebra) else {
        return Ok(m);
    };
    let (Some(cv), Some(av)) = (&to.completion, &to.algebra) else {
        return Ok(m);
    };
    let pi = Homomorphism::projection(au, av)?;
    for k in 0..src.dimension() {
        let mut e = vec![0; src.dimension()];
        e[k] = 1;
        let x = cu.eta_inverse(&GroupElement(e))?;
        let y = cv.eta(&pi.image(&x)?)?;
        for (r, v) in y.0.iter().enumerate() {
            m.set(r, k, *v);
        }
    }
    Ok(m)
}

pub fn build_sheaf(rep: &Representation) -> Result<SheafOfGroups> {
    let topology = rep.spectrum.topology.clone();
    let mut data = BTreeMap::new();
    for o in &topology.opens {
        let u = o.support();
        if !data.contains_key(&u) {
            data.insert(u.clone(), open_data(rep, &u)?);
        }
    }
    let mut matrices: BTreeMap<(BTreeSet<usize>, BTreeSet<usize>), IntMat> = BTreeMap::new();
    let presheaf = Presheaf::build(
        topology,
        |o| Ok(Carrier::Group(data[&o.support()].group())),
        |a, b| {
            let key = (a.support(), b.support());
            if let Some(m) = matrices.get(&key) {
                return Ok(Arrow::Linear(m.clone()));
            }
            let m = transport(&data[&key.0], &data[&key.1])?;
            matrices.insert(key, m.clone());
            Ok(Arrow::Linear(m))
        },
    )?;
    Ok(SheafOfGroups { presheaf, data })
}

/// Stalk of `𝔥` at one maximal ideal compared with `G(M/O_M)`.
#[derive(Clone, Debug, Serialize)]
pub struct StalkCheck {
    pub max_ideal: String,
    pub mu: FuzzySet,
    pub stalk_group: String,
    pub expected_group: String,
    /// `supp μ_M = {M}`, so the stalk is computed over `A/O_M` itself.
    pub support_is_point: bool,
    pub same_quotient: bool,
    /// `η` of the stalk agrees with `η` of `G(M/O_M)` on sampled radical elements.
    pub eta_agrees: bool,
    /// The germ formula evaluated in the stalk equals the germ of `Ψ`.
    pub germs_agree: bool,
    pub elements_checked: usize,
}

impl StalkCheck {
    pub fn pass(&self) -> bool {
        self.support_is_point && self.same_quotient && self.eta_agrees && self.germs_agree
    }
}

pub fn check_stalks(
    rep: &Representation,
    sheaf: &SheafOfGroups,
    elements: &[MvElement],
) -> Result<Vec<StalkCheck>> {
    let mut out = Vec::new();
    for (m, p) in rep.points.iter().enumerate() {
        let st = stalk_at(&sheaf.presheaf, m)?;
        let d = &sheaf.data[&st.mu.support()];
        let support_is_point = st.mu.support() == BTreeSet::from([m]);
        let same_quotient = match &d.o_u {
            Some(o_u) => same_ideal(&rep.algebra, o_u, &p.factor.o_m)?,
            None => false,
        };
        let local = &p.factor.local;
        let rad_samples: Vec<MvElement> = local
            .sample_elements(2)
            .into_iter()
            .filter(|x| p.factor.local_radical.contains(x))
            .collect();
        let mut eta_agrees;
        let mut germs_agree = true;
        let mut checked = 0;
        if let Some(c) = &d.completion {
            eta_agrees = c.group == *p.group();
            for x in &rad_samples {
                checked += 1;
                eta_agrees &= c.eta(x)? == p.completion.eta(x)?;
            }
            for x in elements {
                checked += 1;
                germs_agree &= rep.germ_via_stalk(m, x, c)? == rep.germ(m, x)?;
            }
        } else {
            eta_agrees = p.group().is_trivial();
        }
        out.push(StalkCheck {
            max_ideal: p.factor.max_ideal.to_string(),
            mu: st.mu.clone(),
            stalk_group: st.carrier,
            expected_group: p.group().to_string(),
            support_is_point,
            same_quotient,
            eta_agrees,
            germs_agree,
            elements_checked: checked,
        });
    }
    Ok(out)
}

/// `α_{a,b} = {M : g_aM = g_bM}` and how it was shown open.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaCheck {
    pub a: MvElement,
    pub b: MvElement,
    pub support: BTreeSet<usize>,
    /// Join of the basic opens `ĉ` with `supp ĉ ⊆ α_{a,b}`.
    pub witness: FuzzySet,
    pub is_open: bool,
    /// `H(d(a,b)) ∪ ⋃_c H(d(a,b⊕c)) ∪ ⋃_c H(d(a⊕c,b))` over the sample.
    pub union_formula: BTreeSet<usize>,
}

impl AlphaCheck {
    pub fn formula_agrees(&self) -> bool {
        self.union_formula == self.support
    }
}

/// `(H_A, π, Max A)` restricted to the germs of a finite element set.
#[derive(Clone, Debug)]
pub struct GermSpace {
    pub elements: Vec<MvElement>,
    /// Total points `(g, M)`.
    pub germs: Vec<(GroupElement, usize)>,
    pub space: SheafSpace,
    pub subbase: Vec<FuzzySet>,
    pub alphas: Vec<AlphaCheck>,
}

impl GermSpace {
    /// Distinct germs over the maximal ideal `m`.
    pub fn germs_over(&self, m: usize) -> usize {
        self.germs.iter().filter(|(_, n)| *n == m).count()
    }
}

/// `H(x) = {M : x ∈ O_M}`.
fn h_set(rep: &Representation, x: &MvElement) -> BTreeSet<usize> {
    (0..rep.points.len())
        .filter(|&m| rep.points[m].factor.o_m.contains(x))
        .collect()
}

fn hat(rep: &Representation, x: &MvElement) -> Result<FuzzySet> {
    let values: Vec<Rational> = (0..rep.points.len())
        .map(|m| rep.value(m, x))
        .collect::<Result<_>>()?;
    FuzzySet::from_rationals(rep.spectrum.denom, &values)
}

pub fn build_sheaf_space(
    rep: &Representation,
    elements: &[MvElement],
    open_cap: usize,
) -> Result<GermSpace> {
    let a = &rep.algebra;
    let n = rep.points.len();
    let d = rep.spectrum.denom;
    let elements: Vec<MvElement> = elements
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut table: Vec<Vec<GroupElement>> = Vec::with_capacity(elements.len());
    let mut hats = Vec::with_capacity(elements.len());
    for x in &elements {
        table.push((0..n).map(|m| rep.germ(m, x)).collect::<Result<_>>()?);
        hats.push(hat(rep, x)?);
    }
    let germs: Vec<(GroupElement, usize)> = table
        .iter()
        .flat_map(|row| row.iter().cloned().enumerate().map(|(m, g)| (g, m)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<&(GroupElement, usize), usize> =
        germs.iter().enumerate().map(|(i, p)| (p, i)).collect();

    // `b` ranges over the generators of `τ_A` so that `π` stays continuous
    // when `a` only ranges over the sample.
    let values: BTreeSet<&FuzzySet> = hats
        .iter()
        .chain(rep.spectrum.iota.iter().map(|(_, s)| s))
        .collect();
    let mut subbase = BTreeSet::new();
    for row in &table {
        for b in &values {
            let mut values = vec![0u32; germs.len()];
            for (m, g) in row.iter().enumerate() {
                values[index[&(g.clone(), m)]] = b.numerators()[m];
            }
            subbase.insert(FuzzySet::new(d, values)?);
        }
    }
    let subbase: Vec<FuzzySet> = subbase.into_iter().collect();
    let labels = germs
        .iter()
        .map(|(g, m)| format!("({g}, {})", rep.points[*m].factor.max_ideal))
        .collect();
    let total = generate_topology_bounded(labels, d, &subbase, open_cap)?;
    let projection = germs.iter().map(|(_, m)| *m).collect();
    let space = SheafSpace {
        total,
        base: rep.spectrum.topology.clone(),
        projection,
    };

    let basics: Vec<&FuzzySet> = rep.spectrum.iota.iter().map(|(_, s)| s).collect();
    let mut alphas = Vec::new();
    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate() {
            let support: BTreeSet<usize> = (0..n).filter(|&m| table[i][m] == table[j][m]).collect();
            let witness = basics
                .iter()
                .filter(|s| s.support().is_subset(&support))
                .fold(FuzzySet::zero(n, d), |acc, s| acc.join(s));
            let is_open = witness.support() == support && rep.spectrum.topology.is_open(&witness);
            let mut union_formula = h_set(rep, &a.dist(x, y)?);
            for c in &elements {
                union_formula.extend(h_set(rep, &a.dist(x, &a.oplus(y, c)?)?));
                union_formula.extend(h_set(rep, &a.dist(&a.oplus(x, c)?, y)?));
            }
            alphas.push(AlphaCheck {
                a: x.clone(),
                b: y.clone(),
                support,
                witness,
                is_open,
                union_formula,
            });
        }
    }
    Ok(GermSpace {
        elements,
        germs,
        space,
        subbase,
        alphas,
    })
}

impl Representation {
    /// The element of `A/O_M` whose pair under the lexicographic isomorphism is `x`.
    pub fn local_element(&self, m: usize, x: &Germ) -> Result<MvElement> {
        let p = &self.points[m];
        match &p.fiso {
            Some(f) => f.from_components(x.value, &x.germ),
            None if x.germ.0.iter().all(|&c| c == 0) => p.factor.view.section(x.value),
            None => Err(MvError::SpectrumValue(format!(
                "nonzero germ {} in a trivial stalk",
                x.germ
            ))),
        }
    }

    /// `Ψ⁻¹`: reassembles `a` from its local coordinates `a/O_M`.
    pub fn decode(&self, s: &GlobalSection) -> Result<MvElement> {
        if s.0.len() != self.points.len() {
            return Err(MvError::InternalConsistency(format!(
                "section {s} has the wrong length"
            )));
        }
        let coords = (0..self.points.len())
            .map(|m| self.local_element(m, &s.0[m]))
            .collect::<Result<Vec<_>>>()?;
        let family: Vec<LocalFactor> = self.points.iter().map(|p| p.factor.clone()).collect();
        i_preimage(&self.algebra, &family, &coords)?.ok_or_else(|| {
            MvError::InternalConsistency(format!("section {s} has no preimage in A"))
        })
    }
}

/// `𝔄`, with every operation routed through `A`:
/// `𝔞 ⊕ 𝔟 = Ψ(Ψ⁻¹𝔞 ⊕ Ψ⁻¹𝔟)` and `𝔞* = Ψ((Ψ⁻¹𝔞)*)`.
pub struct RepresentedAlgebra<'r> {
    pub rep: &'r Representation,
    /// Sections already known together with their preimages.
    known: std::sync::Mutex<HashMap<GlobalSection, MvElement>>,
}

impl<'r> RepresentedAlgebra<'r> {
    pub fn new(rep: &'r Representation) -> Self {
        RepresentedAlgebra {
            rep,
            known: Default::default(),
        }
    }

    pub fn psi(&self, x: &MvElement) -> Result<GlobalSection> {
        let s = self.rep.psi(x)?;
        self.known
            .lock()
            .expect("cache lock")
            .insert(s.clone(), x.clone());
        Ok(s)
    }

    pub fn preimage(&self, s: &GlobalSection) -> Result<MvElement> {
        if let Some(x) = self.known.lock().expect("cache lock").get(s) {
            return Ok(x.clone());
        }
        let x = self.rep.decode(s)?;
        self.known
            .lock()
            .expect("cache lock")
            .insert(s.clone(), x.clone());
        Ok(x)
    }
}

impl MvStructure for RepresentedAlgebra<'_> {
    type Elem = GlobalSection;
    fn zero(&self) -> GlobalSection {
        self.psi(&self.rep.algebra.zero()).expect("Ψ(0) is defined")
    }
    fn neg(&self, s: &GlobalSection) -> Result<GlobalSection> {
        self.psi(&self.rep.algebra.neg(&self.preimage(s)?)?)
    }
    fn oplus(&self, s: &GlobalSection, t: &GlobalSection) -> Result<GlobalSection> {
        let a = &self.rep.algebra;
        self.psi(&a.oplus(&self.preimage(s)?, &self.preimage(t)?)?)
    }
}

/// Knobs for [`represent`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RepresentOptions {
    /// Tail generators `(0,…,g)` are seeded for `1 ≤ g ≤ seed_bound`.
    pub seed_bound: i64,
    /// Closure rounds continue until the sample has at least this many elements.
    pub min_closure: usize,
    pub closure_budget: usize,
    /// Above this many pairs, pairs are drawn at random.
    pub pair_limit: usize,
    pub seed: u64,
}

impl Default for RepresentOptions {
    fn default() -> Self {
        RepresentOptions {
            seed_bound: 8,
            min_closure: 200,
            closure_budget: 10_000,
            pair_limit: 20_000,
            seed: 7,
        }
    }
}

/// Height generators and small tail generators; coordinate seeds for products.
pub fn closure_seeds(a: &MvAlgebra, bound: i64) -> Vec<MvElement> {
    if a.is_finite() {
        if let Ok(all) = a.enumerate() {
            return all;
        }
    }
    let mut out = BTreeSet::from([a.zero(), a.one()]);
    match a.kind() {
        AlgebraKind::GammaLex { unit, group } => {
            let dim = group.dimension();
            for h in 0..=*unit {
                let mut v = vec![0; dim];
                v[0] = h;
                out.insert(MvElement::Lex(v));
            }
            for k in 1..dim {
                for g in 1..=bound {
                    let mut v = vec![0; dim];
                    v[k] = g;
                    out.insert(MvElement::Lex(v));
                }
            }
        }
        AlgebraKind::Product(fs) => {
            for (i, f) in fs.iter().enumerate() {
                for s in closure_seeds(f, bound) {
                    let mut t: Vec<MvElement> = fs.iter().map(MvAlgebra::zero).collect();
                    t[i] = s;
                    out.insert(MvElement::Tuple(t));
                }
            }
        }
        _ => out.extend(a.sample_elements(1)),
    }
    out.into_iter().filter(|x| a.contains(x)).collect()
}

/// The whole algebra when finite. Otherwise the seeds, closed under rounds
/// of `⊕, *, ⊙, ∧, ∨` until the set reaches `min_size` or stops growing.
pub fn sample_closure(a: &MvAlgebra, opts: &RepresentOptions) -> Result<(Vec<MvElement>, usize)> {
    let seeds = closure_seeds(a, opts.seed_bound);
    if a.is_finite() {
        return Ok((seeds, 0));
    }
    let mut set: BTreeSet<MvElement> = seeds.into_iter().collect();
    let mut rounds = 0;
    while set.len() < opts.min_closure {
        let cur: Vec<MvElement> = set.iter().cloned().collect();
        let mut next = set.clone();
        for x in &cur {
            next.insert(a.neg(x)?);
            for y in &cur {
                for z in [a.oplus(x, y)?, a.odot(x, y)?, a.meet(x, y)?, a.join(x, y)?] {
                    next.insert(z);
                }
            }
            if next.len() > opts.closure_budget {
                return Err(MvError::ClosureBudgetExceeded {
                    partial: next.into_iter().collect(),
                });
            }
        }
        rounds += 1;
        if next.len() == set.len() {
            break;
        }
        set = next;
    }
    Ok((set.into_iter().collect(), rounds))
}

/// `Ψ` tabulated on a finite set of elements.
#[derive(Clone, Debug, Serialize)]
pub struct PsiTable {
    pub elements: Vec<MvElement>,
    pub sections: Vec<GlobalSection>,
}

impl PsiTable {
    pub fn new(rep: &Representation, elements: Vec<MvElement>) -> Result<Self> {
        let sections = elements.iter().map(|x| rep.psi(x)).collect::<Result<_>>()?;
        Ok(PsiTable { elements, sections })
    }

    pub fn index(&self) -> HashMap<&MvElement, usize> {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x, i))
            .collect()
    }
}

impl Representation {
    /// Meet in the lexicographic stalk `R ×_lex G(M/O_M)`.
    pub fn stalk_meet(&self, m: usize, x: &Germ, y: &Germ) -> Germ {
        match x.value.cmp(&y.value) {
            std::cmp::Ordering::Less => x.clone(),
            std::cmp::Ordering::Greater => y.clone(),
            std::cmp::Ordering::Equal => Germ {
                value: x.value,
                germ: self.points[m].group().meet(&x.germ, &y.germ),
            },
        }
    }

    pub fn stalk_join(&self, m: usize, x: &Germ, y: &Germ) -> Germ {
        match x.value.cmp(&y.value) {
            std::cmp::Ordering::Less => y.clone(),
            std::cmp::Ordering::Greater => x.clone(),
            std::cmp::Ordering::Equal => Germ {
                value: x.value,
                germ: self.points[m].group().join(&x.germ, &y.germ),
            },
        }
    }

    fn pointwise(
        &self,
        s: &GlobalSection,
        t: &GlobalSection,
        op: fn(&Self, usize, &Germ, &Germ) -> Germ,
    ) -> GlobalSection {
        GlobalSection(
            (0..self.points.len())
                .map(|m| op(self, m, &s.0[m], &t.0[m]))
                .collect(),
        )
    }
}

/// Outcome of one clause of the isomorphism check.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Clause {
    pub pass: bool,
    pub checked: usize,
    /// First counterexample, if any.
    pub witness: Option<String>,
}

impl Clause {
    fn new() -> Self {
        Clause {
            pass: true,
            checked: 0,
            witness: None,
        }
    }

    fn expect(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.pass {
            self.pass = false;
            self.witness = Some(witness());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RepresentationReport {
    pub algebra: String,
    pub max_ideals: usize,
    pub elements: usize,
    pub exhaustive: bool,
    pub closure_rounds: usize,
    pub pairs_checked: usize,
    /// `Ψ(a⊕b) = Ψ(a) ⊕ Ψ(b)` with `⊕` of `𝔄` as defined through `A`.
    pub preserves_oplus: Clause,
    pub preserves_neg: Clause,
    pub preserves_zero: Clause,
    pub injective: Clause,
    pub surjective: Clause,
    /// `⊕` and `*` of `𝔄` agree with the stalkwise operations.
    pub componentwise: Clause,
    /// `∧, ∨, ⊙` of `𝔄` agree with the stalkwise lexicographic operations.
    pub derived: Clause,
    /// `supp` of the value part of `Ψ(a)` is `R(a)`.
    pub support: Clause,
}

impl RepresentationReport {
    pub fn pass(&self) -> bool {
        [
            &self.preserves_oplus,
            &self.preserves_neg,
            &self.preserves_zero,
            &self.injective,
            &self.surjective,
            &self.componentwise,
            &self.derived,
            &self.support,
        ]
        .iter()
        .all(|c| c.pass)
    }
}

/// All pairs of indices below `n`, or `limit` pairs drawn with a fixed seed.
pub fn index_pairs(n: usize, limit: usize, seed: u64) -> (Vec<(usize, usize)>, bool) {
    if n.saturating_mul(n) <= limit {
        return (
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
            true,
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (
        (0..limit)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect(),
        false,
    )
}

type StalkOp = fn(&Representation, usize, &Germ, &Germ) -> Germ;

/// Checks `Ψ: A → 𝔄` on `table`. Sections are read from the table where
/// possible, so a corrupted entry is visible to every clause.
pub fn check_representation(
    rep: &Representation,
    table: &PsiTable,
    opts: &RepresentOptions,
) -> Result<RepresentationReport> {
    let a = &rep.algebra;
    let frak = RepresentedAlgebra::new(rep);
    let index = table.index();
    let lookup = |x: &MvElement| -> Result<GlobalSection> {
        match index.get(x) {
            Some(&i) => Ok(table.sections[i].clone()),
            None => rep.psi(x),
        }
    };
    let n = table.elements.len();
    let (pairs, all_pairs) = index_pairs(n, opts.pair_limit, opts.seed);
    let mut preserves_oplus = Clause::new();
    let mut preserves_neg = Clause::new();
    let mut componentwise = Clause::new();
    let mut derived = Clause::new();
    for &(i, j) in &pairs {
        let (x, y) = (&table.elements[i], &table.elements[j]);
        let (s, t) = (&table.sections[i], &table.sections[j]);
        let expected = lookup(&a.oplus(x, y)?)?;
        match frak.oplus(s, t) {
            Ok(v) => preserves_oplus.expect(v == expected, || {
                format!("Ψ({x} ⊕ {y}) = {expected} but Ψ({x}) ⊕ Ψ({y}) = {v}")
            }),
            Err(e) => preserves_oplus.expect(false, || format!("Ψ({x}) ⊕ Ψ({y}) undefined: {e}")),
        }
        let c = rep.componentwise_oplus(s, t);
        componentwise.expect(c == expected, || {
            format!("stalkwise {s} ⊕ {t} = {c}, but Ψ({x} ⊕ {y}) = {expected}")
        });
        let ops: [(&str, MvElement, StalkOp); 2] = [
            ("∧", a.meet(x, y)?, Representation::stalk_meet),
            ("∨", a.join(x, y)?, Representation::stalk_join),
        ];
        for (name, z, op) in ops {
            let want = lookup(&z)?;
            let got = rep.pointwise(s, t, op);
            derived.expect(got == want, || {
                format!("stalkwise {s} {name} {t} = {got}, but Ψ({x} {name} {y}) = {want}")
            });
        }
        let want = lookup(&a.odot(x, y)?)?;
        let got = rep.componentwise_neg(
            &rep.componentwise_oplus(&rep.componentwise_neg(s), &rep.componentwise_neg(t)),
        );
        derived.expect(got == want, || {
            format!("stalkwise {s} ⊙ {t} = {got}, but Ψ({x} ⊙ {y}) = {want}")
        });
    }
    let mut support = Clause::new();
    let mut surjective = Clause::new();
    for (x, s) in table.elements.iter().zip(&table.sections) {
        let expected = lookup(&a.neg(x)?)?;
        match frak.neg(s) {
            Ok(v) => preserves_neg.expect(v == expected, || {
                format!("Ψ({x}*) = {expected} but Ψ({x})* = {v}")
            }),
            Err(e) => preserves_neg.expect(false, || format!("Ψ({x})* undefined: {e}")),
        }
        let c = rep.componentwise_neg(s);
        componentwise.expect(c == expected, || {
            format!("stalkwise {s}* = {c}, but Ψ({x}*) = {expected}")
        });
        let supp: BTreeSet<usize> = (0..rep.points.len())
            .filter(|&m| s.0[m].value > Rational::ZERO)
            .collect();
        let r: BTreeSet<usize> = (0..rep.points.len())
            .filter(|&m| !rep.points[m].factor.max_ideal.contains(x))
            .collect();
        support.expect(supp == r, || {
            format!("supp of {s} is {supp:?} but R({x}) = {r:?}")
        });
        match rep.decode(s) {
            Ok(y) => surjective.expect(rep.psi(&y)? == *s, || {
                format!("{s} decodes to {y}, whose image differs")
            }),
            Err(e) => surjective.expect(false, || format!("{s} has no preimage: {e}")),
        }
    }
    let mut preserves_zero = Clause::new();
    let zero = lookup(&a.zero())?;
    let expected = GlobalSection(
        rep.points
            .iter()
            .map(|p| Germ {
                value: Rational::ZERO,
                germ: p.group().zero(),
            })
            .collect(),
    );
    preserves_zero.expect(zero == expected, || {
        format!("Ψ(0) = {zero}, expected {expected}")
    });
    let mut injective = Clause::new();
    let mut seen: HashMap<&GlobalSection, &MvElement> = HashMap::new();
    for (x, s) in table.elements.iter().zip(&table.sections) {
        let clash = seen.insert(s, x);
        injective.expect(clash.is_none(), || {
            format!("Ψ({}) = Ψ({x}) = {s}", clash.expect("clash"))
        });
    }
    Ok(RepresentationReport {
        algebra: a.to_string(),
        max_ideals: rep.points.len(),
        elements: n,
        exhaustive: a.is_finite() && all_pairs,
        closure_rounds: 0,
        pairs_checked: pairs.len(),
        preserves_oplus,
        preserves_neg,
        preserves_zero,
        injective,
        surjective,
        componentwise,
        derived,
        support,
    })
}

/// Builds `Ψ` on the sample closure of `a` and checks it.
pub fn represent(
    a: &MvAlgebra,
    opts: &RepresentOptions,
) -> Result<(Representation, PsiTable, RepresentationReport)> {
    let rep = Representation::new(a)?;
    let (elements, rounds) = sample_closure(a, opts)?;
    let table = PsiTable::new(&rep, elements)?;
    let mut report = check_representation(&rep, &table, opts)?;
    report.closure_rounds = rounds;
    Ok((rep, table, report))
}

/// `A ↪ ∏_M A/O_M`, followed by the lexicographic coordinates of each factor.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub algebra: String,
    /// The factors `A/O_M`, each with retractive radical.
    pub factors: Vec<String>,
    pub elements: usize,
    pub homomorphism: Clause,
    pub injective: Clause,
    /// The composite lands on `Ψ(a)`.
    pub sections_agree: Clause,
    /// `None` when surjectivity was not decided.
    pub surjective: Option<bool>,
    pub non_surjectivity_witness: Option<String>,
}

impl EmbeddingReport {
    pub fn pass(&self) -> bool {
        self.homomorphism.pass && self.injective.pass && self.sections_agree.pass
    }
}

pub fn embed_into_retractive(a: &MvAlgebra, opts: &RepresentOptions) -> Result<EmbeddingReport> {
    let rep = Representation::new(a).map_err(|e| match e {
        MvError::NotLocallyRetractive { max_ideal } => MvError::RequiresExternalEmbedding(format!(
            "A/O_M has no retractive radical at {max_ideal}"
        )),
        other => other,
    })?;
    let (elements, _) = sample_closure(a, opts)?;
    let embed = |x: &MvElement| -> Result<Vec<MvElement>> {
        rep.points
            .iter()
            .map(|p| p.factor.projection.image(x))
            .collect()
    };
    let images: Vec<Vec<MvElement>> = elements.iter().map(embed).collect::<Result<_>>()?;

    let mut homomorphism = Clause::new();
    let (pairs, _) = index_pairs(elements.len(), opts.pair_limit, opts.seed);
    for (i, j) in pairs {
        let (x, y) = (&elements[i], &elements[j]);
        let lhs = embed(&a.oplus(x, y)?)?;
        let rhs: Vec<MvElement> = rep
            .points
            .iter()
            .zip(images[i].iter().zip(&images[j]))
            .map(|(p, (u, v))| p.factor.local.oplus(u, v))
            .collect::<Result<_>>()?;
        homomorphism.expect(lhs == rhs, || {
            format!("the image of {x} ⊕ {y} is not the sum of the images")
        });
    }
    for (x, img) in elements.iter().zip(&images) {
        let lhs = embed(&a.neg(x)?)?;
        let rhs: Vec<MvElement> = rep
            .points
            .iter()
            .zip(img)
            .map(|(p, u)| p.factor.local.neg(u))
            .collect::<Result<_>>()?;
        homomorphism.expect(lhs == rhs, || {
            format!("the image of {x}* is not the negation of the image")
        });
    }

    let mut injective = Clause::new();
    let mut seen: HashMap<&Vec<MvElement>, &MvElement> = HashMap::new();
    for (x, img) in elements.iter().zip(&images) {
        let clash = seen.insert(img, x);
        injective.expect(clash.is_none(), || {
            format!("{} and {x} have the same image", clash.expect("clash"))
        });
    }

    let mut sections_agree = Clause::new();
    for (x, img) in elements.iter().zip(&images) {
        let psi = rep.psi(x)?;
        let mut via = Vec::with_capacity(img.len());
        for (m, u) in img.iter().enumerate() {
            let p = &rep.points[m];
            let value = p.factor.view.height(u)?;
            let germ = match &p.fiso {
                Some(f) => f.components(u)?.1,
                None => p.group().zero(),
            };
            via.push(Germ { value, germ });
        }
        let via = GlobalSection(via);
        sections_agree.expect(via == psi, || {
            format!("{x} ↦ {via} through the product, Ψ({x}) = {psi}")
        });
    }

    let sub = subdirect_embedding(a)?;
    let surjective = match sub.surjective {
        Some(s) => Some(s),
        None if sub.coordinates == 1 && sub.coordinates_surjective => Some(true),
        None => None,
    };
    Ok(EmbeddingReport {
        algebra: a.to_string(),
        factors: rep
            .points
            .iter()
            .map(|p| p.factor.local.to_string())
            .collect(),
        elements: elements.len(),
        homomorphism,
        injective,
        sections_agree,
        surjective,
        non_surjectivity_witness: sub.non_surjectivity_witness,
    })
}
