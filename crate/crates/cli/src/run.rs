//! The commands. Each one gathers checks, module errors and details into a
//! [`Collector`]; `verify-all` runs every section on one algebra.

use std::fmt::Display;

use mvsheaf_core::axioms::{check_axioms, OperationTable, Triples};
use mvsheaf_core::representation::{
    build_sheaf, check_stalks, embed_into_retractive, represent, sample_closure, GlobalSection,
    RepresentOptions, Representation, RepresentedAlgebra,
};
use mvsheaf_core::sheaf::{check_presheaf, check_sheaf};
use mvsheaf_core::spectra::{
    classify_algebra, ideal_elements, is_locally_retractive, is_primary, mvlthm_criterion,
    o_p_by_annihilators, o_p_by_minimal_primes, prime_ideals, radical, retraction_search,
    same_ideal, spectrum_report, zero_ideal,
};
use mvsheaf_core::topology::{mv_spectrum, verify_topology, zariski_max};
use mvsheaf_core::{MvAlgebra, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::report::{Check, Input, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Topology,
    SheafCheck,
    Represent,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Topology => "topology",
            Command::SheafCheck => "sheaf-check",
            Command::Represent => "represent",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// Bounds surfaced on the command line.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Flags {
    /// Tail generators `|g| ≤ sample_bound` seed the sample closures.
    pub sample_bound: i64,
    pub closure_budget: usize,
    pub open_cap: usize,
}

impl Default for Flags {
    fn default() -> Self {
        let d = RepresentOptions::default();
        Flags {
            sample_bound: d.seed_bound,
            closure_budget: d.closure_budget,
            open_cap: 256,
        }
    }
}

impl Flags {
    fn options(&self) -> RepresentOptions {
        RepresentOptions {
            seed_bound: self.sample_bound,
            closure_budget: self.closure_budget,
            ..Default::default()
        }
    }
}

/// Triples drawn for the equation suite on infinite algebras.
pub const SAMPLED_TRIPLES: usize = 1000;

#[derive(Default)]
struct Collector {
    checks: Vec<Check>,
    errors: Vec<String>,
    details: Map<String, Value>,
}

impl Collector {
    fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check::new(name, pass));
    }

    fn check_with(&mut self, name: impl Into<String>, pass: bool, witness: Option<String>) {
        self.checks.push(Check::with_witness(name, pass, witness));
    }

    fn attempt<T>(&mut self, label: &str, f: impl FnOnce() -> Result<T>) -> Option<T> {
        match f() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{label}: {e}"));
                None
            }
        }
    }

    fn detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.to_string(), value);
    }
}

fn strings<T: Display>(items: &[T]) -> Vec<String> {
    items.iter().map(|x| x.to_string()).collect()
}

pub fn run(command: Command, a: &MvAlgebra, input: Input, flags: &Flags) -> Report {
    let mut c = Collector::default();
    match command {
        Command::Spectrum => spectrum(&mut c, a),
        Command::Topology => topology(&mut c, a),
        Command::SheafCheck => sheaf(&mut c, a, flags),
        Command::Represent => representation(&mut c, a, flags),
        Command::VerifyAll => verify_all(&mut c, a, flags),
    }
    let flags = serde_json::to_value(flags).expect("flags serialize");
    Report::new(
        command.name(),
        input,
        flags,
        c.checks,
        c.errors,
        Value::Object(c.details),
    )
}

fn spectrum(c: &mut Collector, a: &MvAlgebra) {
    let Some(r) = c.attempt("spectrum", || spectrum_report(a)) else {
        return;
    };
    c.check("every O_P is primary", r.all_o_p_primary);
    if let Some(m) = r.radical_is_meet_of_max {
        c.check("Rad A is the meet of Max A", m);
    }
    let rad_zero = c
        .attempt("radical", || same_ideal(a, &r.radical, &zero_ideal(a)))
        .unwrap_or(false);
    let o_p: Vec<Value> = r
        .o_p
        .iter()
        .map(|(p, o)| json!({ "prime": p.to_string(), "o_p": o.to_string() }))
        .collect();
    c.detail(
        "spectrum",
        json!({
            "spec_complete": r.spec_complete,
            "max_count": r.max.len(),
            "max": strings(&r.max),
            "spec": strings(&r.spec),
            "min": strings(&r.min),
            "radical": r.radical.to_string(),
            "radical_is_zero": rad_zero,
            "o_p": o_p,
        }),
    );
}

fn topology(c: &mut Collector, a: &MvAlgebra) {
    if let Some(z) = c.attempt("zariski", || zariski_max(a)) {
        c.check(
            "Zariski: r identities hold on the basis",
            z.lemma_identities,
        );
        c.check("Zariski: R(1) = Max A", z.r_one_is_everything);
        c.check("Zariski: Max A is compact", z.compact);
        c.check("Zariski: Max A is Hausdorff", z.hausdorff);
        c.detail(
            "zariski",
            json!({ "points": z.topology.points, "opens": z.topology.opens.len() }),
        );
    }
    let Some(s) = c.attempt("mv-spectrum", || mv_spectrum(a)) else {
        return;
    };
    c.check("R(b) = supp(b̂)", s.support_is_r);
    c.check("Zariski opens lie in τ_A", s.zariski_coarser);
    c.check("b̂ = 0 exactly on Rad A", s.kernel_is_radical);
    c.check_with(
        "every H(a) is open",
        s.h_is_open,
        s.h_failures.first().map(|f| f.to_string()),
    );
    let v = verify_topology(&s.topology);
    c.check_with(
        "τ_A is an MV-topology",
        v.pass,
        v.violations.first().map(|x| format!("{x:?}")),
    );
    let iota: Vec<Value> = s
        .iota
        .iter()
        .map(|(x, f)| json!({ "element": x.to_string(), "hat": f.to_string() }))
        .collect();
    c.detail(
        "tau_a",
        json!({ "points": s.topology.points, "denominator": s.denom, "opens": s.topology.opens.len(), "iota": iota }),
    );
}

fn sheaf(c: &mut Collector, a: &MvAlgebra, flags: &Flags) {
    let Some(rep) = c.attempt("representation", || Representation::new(a)) else {
        return;
    };
    let Some(h) = c.attempt("build_sheaf", || build_sheaf(&rep)) else {
        return;
    };
    if let Some(p) = c.attempt("presheaf", || check_presheaf(&h.presheaf)) {
        c.check_with(
            "𝔥 is a presheaf",
            p.pass,
            p.violations.first().map(|v| format!("{v:?}")),
        );
    }
    if let Some(s) = c.attempt("sheaf", || check_sheaf(&h.presheaf, flags.open_cap)) {
        c.check_with(
            "𝔥 is a sheaf",
            s.pass,
            s.violations.first().map(|v| format!("{v:?}")),
        );
        c.detail("covers_checked", json!(s.covers_checked));
    }
    let samples = a.sample_elements(1);
    if let Some(stalks) = c.attempt("stalks", || check_stalks(&rep, &h, &samples)) {
        for s in &stalks {
            c.check_with(
                format!("stalk at {} ≅ G(M/O_M)", s.max_ideal),
                s.pass(),
                Some(format!("stalk {} vs {}", s.stalk_group, s.expected_group)),
            );
        }
        let stalks: Vec<Value> = stalks
            .iter()
            .map(|s| json!({ "max_ideal": s.max_ideal, "mu": s.mu.to_string(), "group": s.stalk_group }))
            .collect();
        c.detail("stalks", json!(stalks));
    }
    let carriers: Vec<Value> = h
        .presheaf
        .opens
        .iter()
        .zip(&h.presheaf.carriers)
        .map(|(o, g)| json!({ "open": o.to_string(), "group": g.describe() }))
        .collect();
    c.detail(
        "sheaf",
        json!({ "opens": carriers.len(), "carriers": carriers }),
    );
}

fn representation(c: &mut Collector, a: &MvAlgebra, flags: &Flags) {
    let local = c.attempt("locally retractive", || is_locally_retractive(a));
    let rad = c.attempt("radical retraction", || {
        Ok(retraction_search(a, &radical(a)?)?.is_found())
    });
    c.detail(
        "locally_retractive",
        json!(local.as_ref().map(|l| l.verdict)),
    );
    c.detail("radical_retractive", json!(rad));
    if !local.is_some_and(|l| l.verdict) {
        if c.errors.is_empty() {
            c.errors
                .push("representation: the algebra is not locally retractive".into());
        }
        return;
    }
    let opts = flags.options();
    let Some((rep, table, r)) = c.attempt("represent", || represent(a, &opts)) else {
        return;
    };
    let clauses = [
        ("Ψ preserves ⊕", &r.preserves_oplus),
        ("Ψ preserves *", &r.preserves_neg),
        ("Ψ(0) = 𝔬", &r.preserves_zero),
        ("Ψ is injective", &r.injective),
        ("Ψ is onto 𝔄", &r.surjective),
        ("𝔄 operations are stalkwise", &r.componentwise),
        ("∧, ∨, ⊙ agree stalkwise", &r.derived),
        ("supp of Ψ(a) is R(a)", &r.support),
    ];
    for (name, clause) in clauses {
        c.check_with(name, clause.pass, clause.witness.clone());
    }
    let dump: Vec<Value> = table
        .elements
        .iter()
        .zip(&table.sections)
        .map(|(x, s)| {
            json!({
                "element": x.to_string(),
                "values": s.0.iter().map(|g| g.value).collect::<Vec<_>>(),
                "germs": s.0.iter().map(|g| g.germ.0.clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    c.detail(
        "representation",
        json!({
            "max_ideals": strings(&rep.max_ideals()),
            "elements": r.elements,
            "exhaustive": r.exhaustive,
            "closure_rounds": r.closure_rounds,
            "pairs_checked": r.pairs_checked,
            "psi": dump,
        }),
    );
    if let Some(e) = c.attempt("embedding", || embed_into_retractive(a, &opts)) {
        c.check_with(
            "A embeds into ∏ A/O_M",
            e.homomorphism.pass && e.injective.pass,
            e.homomorphism
                .witness
                .clone()
                .or(e.injective.witness.clone()),
        );
        c.check_with(
            "the embedding lands on Ψ",
            e.sections_agree.pass,
            e.sections_agree.witness.clone(),
        );
        c.detail(
            "embedding",
            json!({ "factors": e.factors, "surjective": e.surjective, "witness": e.non_surjectivity_witness }),
        );
    }
}

fn axiom_suite(c: &mut Collector, a: &MvAlgebra, flags: &Flags) {
    let Some(rep) = c.attempt("representation", || Representation::new(a)) else {
        return;
    };
    let frak = RepresentedAlgebra::new(&rep);
    let report = c.attempt("MV equations on 𝔄", || {
        if a.is_finite() {
            let carrier: Vec<GlobalSection> = a
                .enumerate()?
                .iter()
                .map(|x| frak.psi(x))
                .collect::<Result<_>>()?;
            let table = OperationTable::from_structure(&frak, &carrier)?;
            check_axioms(&table, &table.cells(), Triples::All)
        } else {
            let opts = RepresentOptions {
                min_closure: 0,
                ..flags.options()
            };
            let sample = sample_closure(a, &opts)?.0;
            let carrier: Vec<GlobalSection> =
                sample.iter().map(|x| frak.psi(x)).collect::<Result<_>>()?;
            check_axioms(
                &frak,
                &carrier,
                Triples::Sampled {
                    count: SAMPLED_TRIPLES,
                    seed: 11,
                },
            )
        }
    });
    if let Some(r) = report {
        c.check_with(
            "six MV equations hold on 𝔄",
            r.pass,
            r.violations.first().map(|v| format!("{v:?}")),
        );
        c.detail(
            "equations",
            json!({ "exhaustive": r.exhaustive, "triples": r.triples_checked }),
        );
    }
}

fn o_p_suite(c: &mut Collector, a: &MvAlgebra) {
    if !a.is_finite() {
        return;
    }
    let outcome = c.attempt("O_P", || {
        let mut witness = None;
        let primes = prime_ideals(a)?;
        for p in &primes {
            let by_min = o_p_by_minimal_primes(a, p)?;
            let same =
                ideal_elements(a, &by_min)? == ideal_elements(a, &o_p_by_annihilators(a, p)?)?;
            if witness.is_none() && !(same && is_primary(a, &by_min)?) {
                witness = Some(format!("at {p}: equal {same}"));
            }
        }
        Ok(witness)
    });
    if let Some(w) = outcome {
        c.check_with(
            "O_P characterizations agree and are primary",
            w.is_none(),
            w,
        );
    }
}

fn retractivity_suite(c: &mut Collector, a: &MvAlgebra) {
    let rad = c.attempt("radical retraction", || {
        Ok(retraction_search(a, &radical(a)?)?.is_found())
    });
    let local = c.attempt("locally retractive", || is_locally_retractive(a));
    if let (Some(rad), Some(local)) = (rad, local) {
        c.check(
            "retractive radical ⇒ locally retractive",
            !rad || local.verdict,
        );
    }
    if let Some(m) = c.attempt("criterion", || mvlthm_criterion(a)) {
        c.check_with(
            "criterion agrees with the retraction search",
            m.agree,
            m.witness.clone(),
        );
    }
    if let Some(k) = c.attempt("classification", || classify_algebra(a)) {
        let v = k.violations();
        c.check_with(
            "classification chain",
            v.is_empty(),
            v.first().map(|s| s.to_string()),
        );
        c.detail(
            "classification",
            serde_json::to_value(&k).expect("serializable"),
        );
    }
}

fn verify_all(c: &mut Collector, a: &MvAlgebra, flags: &Flags) {
    axiom_suite(c, a, flags);
    o_p_suite(c, a);
    topology(c, a);
    sheaf(c, a, flags);
    representation(c, a, flags);
    retractivity_suite(c, a);
}
