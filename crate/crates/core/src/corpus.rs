//! The named algebras every suite runs over.

use crate::algebra::{generate_subalgebra, DefaultPredicate, MvAlgebra, MvElement};
use crate::error::Result;
use crate::spectra::{full_ideal, quotient, zero_ideal, Ideal};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub algebra: MvAlgebra,
}

fn chain(n: u32) -> MvAlgebra {
    MvAlgebra::chain(n).expect("positive rank")
}

fn product(ranks: &[u32]) -> MvAlgebra {
    MvAlgebra::product(ranks.iter().map(|&n| chain(n)).collect()).expect("nonempty product")
}

pub fn k3() -> MvAlgebra {
    MvAlgebra::gamma_lex(2, vec![1]).expect("valid unit")
}

pub fn chang() -> MvAlgebra {
    MvAlgebra::gamma_lex(1, vec![1]).expect("valid unit")
}

/// The desk-scale cofinite model of `K₃^X` restricted by the parity condition.
pub fn cofinite_parity() -> MvAlgebra {
    MvAlgebra::cofinite(k3(), DefaultPredicate::TailParity).expect("valid codomain")
}

/// Finite algebras: chains up to rank 6, products up to 64 elements, one
/// subalgebra and one quotient.
pub fn finite() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for (n, name) in [
        (1, "chain1"),
        (2, "chain2"),
        (3, "chain3"),
        (4, "chain4"),
        (5, "chain5"),
        (6, "chain6"),
    ] {
        out.push(CorpusEntry {
            name,
            algebra: chain(n),
        });
    }
    let products: [(&'static str, &[u32]); 8] = [
        ("chain1^2", &[1, 1]),
        ("chain1xchain2", &[1, 2]),
        ("chain1xchain3", &[1, 3]),
        ("chain2^2", &[2, 2]),
        ("chain1^3", &[1, 1, 1]),
        ("chain2xchain3", &[2, 3]),
        ("chain3^2", &[3, 3]),
        ("chain3^3", &[3, 3, 3]),
    ];
    for (name, ranks) in products {
        out.push(CorpusEntry {
            name,
            algebra: product(ranks),
        });
    }
    let c4 = chain(4);
    out.push(CorpusEntry {
        name: "sub(chain4,1/2)",
        algebra: generate_subalgebra(&c4, &[MvElement::chain(1, 2)], 100)?,
    });
    let c12 = product(&[1, 2]);
    let ideal = Ideal::product(vec![zero_ideal(&chain(1)), full_ideal(&chain(2))]);
    out.push(CorpusEntry {
        name: "chain1xchain2/(0xchain2)",
        algebra: quotient(&c12, &ideal)?.0,
    });
    Ok(out)
}

/// Infinite algebras handled symbolically.
pub fn symbolic() -> Result<Vec<CorpusEntry>> {
    Ok(vec![
        CorpusEntry {
            name: "K3",
            algebra: k3(),
        },
        CorpusEntry {
            name: "chang",
            algebra: chang(),
        },
        CorpusEntry {
            name: "gamma(1,[2])",
            algebra: MvAlgebra::gamma_lex(1, vec![2])?,
        },
        CorpusEntry {
            name: "K3xK3",
            algebra: MvAlgebra::product(vec![k3(), k3()])?,
        },
        CorpusEntry {
            name: "cofinite_parity",
            algebra: cofinite_parity(),
        },
    ])
}

pub fn all() -> Result<Vec<CorpusEntry>> {
    let mut out = finite()?;
    out.extend(symbolic()?);
    Ok(out)
}
