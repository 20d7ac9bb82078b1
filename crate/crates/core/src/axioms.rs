//! The six defining MV equations, checked on any structure with `⊕`, `*`
//! and `0`: the algebras themselves, finite operation tables, and the
//! algebra of global sections.

use std::collections::HashMap;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{MvAlgebra, MvElement};
use crate::error::{MvError, Result};

/// A carrier with `⊕`, `*` and `0`; the equations are checked, not assumed.
pub trait MvStructure {
    type Elem: Clone + Eq + Display;
    fn zero(&self) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Result<Self::Elem>;
    fn oplus(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem>;
}

impl MvStructure for MvAlgebra {
    type Elem = MvElement;
    fn zero(&self) -> MvElement {
        MvAlgebra::zero(self)
    }
    fn neg(&self, x: &MvElement) -> Result<MvElement> {
        MvAlgebra::neg(self, x)
    }
    fn oplus(&self, x: &MvElement, y: &MvElement) -> Result<MvElement> {
        MvAlgebra::oplus(self, x, y)
    }
}

/// Finite `⊕`/`*` tables over element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperationTable {
    pub labels: Vec<String>,
    pub zero: usize,
    pub neg: Vec<usize>,
    pub oplus: Vec<Vec<usize>>,
}

/// An index into an [`OperationTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub usize);

impl Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl OperationTable {
    /// Tabulates `s` on `carrier`, which must be closed under `⊕` and `*`.
    pub fn from_structure<S>(s: &S, carrier: &[S::Elem]) -> Result<Self>
    where
        S: MvStructure,
        S::Elem: Hash,
    {
        let index: HashMap<&S::Elem, usize> =
            carrier.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let find = |x: &S::Elem| {
            index.get(x).copied().ok_or_else(|| {
                MvError::InternalConsistency(format!("{x} lies outside the tabulated carrier"))
            })
        };
        let zero = find(&s.zero())?;
        let neg = carrier
            .iter()
            .map(|x| find(&s.neg(x)?))
            .collect::<Result<Vec<_>>>()?;
        let mut oplus = Vec::with_capacity(carrier.len());
        for x in carrier {
            oplus.push(
                carrier
                    .iter()
                    .map(|y| find(&s.oplus(x, y)?))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(OperationTable {
            labels: carrier.iter().map(|x| x.to_string()).collect(),
            zero,
            neg,
            oplus,
        })
    }

    pub fn of_algebra(a: &MvAlgebra) -> Result<Self> {
        Self::from_structure(a, &a.enumerate()?)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cells(&self) -> Vec<Cell> {
        (0..self.len()).map(Cell).collect()
    }
}

impl MvStructure for OperationTable {
    type Elem = Cell;
    fn zero(&self) -> Cell {
        Cell(self.zero)
    }
    fn neg(&self, x: &Cell) -> Result<Cell> {
        Ok(Cell(self.neg[x.0]))
    }
    fn oplus(&self, x: &Cell, y: &Cell) -> Result<Cell> {
        Ok(Cell(self.oplus[x.0][y.0]))
    }
}

pub const EQUATIONS: [&str; 6] = [
    "x ⊕ (y ⊕ z) = (x ⊕ y) ⊕ z",
    "x ⊕ y = y ⊕ x",
    "x ⊕ 0 = x",
    "x** = x",
    "x ⊕ 0* = 0*",
    "(x* ⊕ y)* ⊕ y = (y* ⊕ x)* ⊕ x",
];

const MAX_WITNESSES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub equation: &'static str,
    pub operands: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub exhaustive: bool,
    pub elements: usize,
    pub triples_checked: usize,
    /// Failure count per entry of [`EQUATIONS`].
    pub failures: [usize; 6],
    pub violations: Vec<AxiomViolation>,
}

/// Which triples of the carrier to test.
#[derive(Clone, Copy, Debug)]
pub enum Triples {
    All,
    Sampled { count: usize, seed: u64 },
}

struct Tally<'s, S: MvStructure> {
    s: &'s S,
    failures: [usize; 6],
    violations: Vec<AxiomViolation>,
}

impl<S: MvStructure> Tally<'_, S> {
    fn record(&mut self, eq: usize, operands: &[&S::Elem], lhs: S::Elem, rhs: S::Elem) {
        if lhs == rhs {
            return;
        }
        self.failures[eq] += 1;
        if self.violations.len() < MAX_WITNESSES {
            self.violations.push(AxiomViolation {
                equation: EQUATIONS[eq],
                operands: operands.iter().map(|x| x.to_string()).collect(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }

    fn unary(&mut self, x: &S::Elem) -> Result<()> {
        let s = self.s;
        let zero = s.zero();
        let one = s.neg(&zero)?;
        self.record(2, &[x], s.oplus(x, &zero)?, x.clone());
        self.record(3, &[x], s.neg(&s.neg(x)?)?, x.clone());
        self.record(4, &[x], s.oplus(x, &one)?, one);
        Ok(())
    }

    fn binary(&mut self, x: &S::Elem, y: &S::Elem) -> Result<()> {
        let s = self.s;
        self.record(1, &[x, y], s.oplus(x, y)?, s.oplus(y, x)?);
        let l = s.oplus(&s.neg(&s.oplus(&s.neg(x)?, y)?)?, y)?;
        let r = s.oplus(&s.neg(&s.oplus(&s.neg(y)?, x)?)?, x)?;
        self.record(5, &[x, y], l, r);
        Ok(())
    }

    fn ternary(&mut self, x: &S::Elem, y: &S::Elem, z: &S::Elem) -> Result<()> {
        let s = self.s;
        let l = s.oplus(x, &s.oplus(y, z)?)?;
        let r = s.oplus(&s.oplus(x, y)?, z)?;
        self.record(0, &[x, y, z], l, r);
        Ok(())
    }
}

/// Checks the six equations on triples drawn from `elements`. Exhaustive
/// mode evaluates the one- and two-variable equations once per element or
/// pair; sampled mode evaluates all six on each drawn triple.
pub fn check_axioms<S: MvStructure>(
    s: &S,
    elements: &[S::Elem],
    triples: Triples,
) -> Result<AxiomReport> {
    let mut t = Tally {
        s,
        failures: [0; 6],
        violations: Vec::new(),
    };
    let n = elements.len();
    let checked = match triples {
        Triples::All => {
            for x in elements {
                t.unary(x)?;
                for y in elements {
                    t.binary(x, y)?;
                    for z in elements {
                        t.ternary(x, y, z)?;
                    }
                }
            }
            n * n * n
        }
        Triples::Sampled { count, seed } => {
            if n == 0 {
                0
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..count {
                    let [x, y, z] = [0; 3].map(|_| &elements[rng.gen_range(0..n)]);
                    t.unary(x)?;
                    t.binary(x, y)?;
                    t.ternary(x, y, z)?;
                }
                count
            }
        }
    };
    Ok(AxiomReport {
        pass: t.failures.iter().all(|&f| f == 0),
        exhaustive: matches!(triples, Triples::All),
        elements: n,
        triples_checked: checked,
        failures: t.failures,
        violations: t.violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_table_passes() {
        let a = MvAlgebra::chain(3).unwrap();
        let t = OperationTable::of_algebra(&a).unwrap();
        let r = check_axioms(&t, &t.cells(), Triples::All).unwrap();
        assert!(r.pass);
        assert_eq!(r.triples_checked, 64);
    }

    #[test]
    fn corrupted_entry_is_caught() {
        let a = MvAlgebra::chain(2).unwrap();
        let mut t = OperationTable::of_algebra(&a).unwrap();
        t.oplus[1][2] = 1;
        let r = check_axioms(&t, &t.cells(), Triples::All).unwrap();
        assert!(!r.pass);
        assert!(r.violations.iter().any(|v| v.equation == EQUATIONS[1]));
    }
}
