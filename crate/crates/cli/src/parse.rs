//! The `.mvalg` description format.
//!
//! ```text
//! # one definition per line; later lines may use earlier names
//! K3 = gamma(unit=(2,0), ranks=[1])
//! B  = product(chain(1), chain(3))
//! Q  = quotient(K3, radical)
//! S  = subalgebra(chain(4), [1/2])
//! E  = cofinite(K3, parity)
//! ```

use std::collections::BTreeMap;

use mvsheaf_core::algebra::{generate_subalgebra, DefaultPredicate};
use mvsheaf_core::spectra::{maximal_ideals, quotient, radical, zero_ideal, Ideal};
use mvsheaf_core::{MvAlgebra, MvElement, MvError, Rational};
use thiserror::Error;

/// Closure budget used when a document builds a subalgebra.
pub const DEFAULT_CLOSURE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Definition {
    pub name: String,
    pub line: usize,
    pub algebra: MvAlgebra,
}

/// Every definition of a document, in order of appearance.
#[derive(Debug, Clone, Default)]
pub struct AlgebraDoc {
    pub definitions: Vec<Definition>,
}

impl AlgebraDoc {
    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.name == name)
    }
}

pub fn parse(text: &str) -> Result<AlgebraDoc, ParseError> {
    parse_with_budget(text, DEFAULT_CLOSURE_BUDGET)
}

pub fn parse_with_budget(text: &str, closure_budget: usize) -> Result<AlgebraDoc, ParseError> {
    let mut doc = AlgebraDoc::default();
    let mut names: BTreeMap<String, MvAlgebra> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut p = Parser {
            chars: content.chars().collect(),
            pos: 0,
            line: i + 1,
            names: &names,
            closure_budget,
        };
        let name = p.ident()?;
        p.expect('=')?;
        let algebra = p.algebra()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        if names.contains_key(&name) {
            return Err(ParseError {
                line: i + 1,
                column: 1,
                message: format!("duplicate definition of {name}"),
            });
        }
        names.insert(name.clone(), algebra.clone());
        doc.definitions.push(Definition {
            name,
            line: i + 1,
            algebra,
        });
    }
    Ok(doc)
}

struct Parser<'n> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    names: &'n BTreeMap<String, MvAlgebra>,
    closure_budget: usize,
}

impl Parser<'_> {
    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: pos + 1,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|f| format!("'{f}'"))
                .unwrap_or_else(|| "end of line".into());
            Err(self.error(format!("expected '{c}', found {found}")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.chars[start].is_ascii_digit() {
            self.pos = start;
            return Err(self.error("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| {
            self.pos = start;
            self.error("expected an integer")
        })
    }

    /// `e, e, …` up to `close`.
    fn list<T>(
        &mut self,
        close: char,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    /// An optional `key=` prefix for named arguments.
    fn key(&mut self, key: &str) -> Result<(), ParseError> {
        let save = self.pos;
        if let Ok(k) = self.ident() {
            if self.eat('=') {
                if k == key {
                    return Ok(());
                }
                return Err(self.error_at(save, format!("expected argument '{key}', found '{k}'")));
            }
        }
        self.pos = save;
        Ok(())
    }
}

impl Parser<'_> {
    fn core(&self, at: usize, e: MvError) -> ParseError {
        self.error_at(at, e.to_string())
    }

    fn algebra(&mut self) -> Result<MvAlgebra, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let head = self.ident()?;
        if !matches!(
            head.as_str(),
            "chain" | "product" | "gamma" | "quotient" | "subalgebra" | "cofinite"
        ) {
            return self
                .names
                .get(&head)
                .cloned()
                .ok_or_else(|| self.error_at(start, format!("unknown algebra '{head}'")));
        }
        self.expect('(')?;
        let a = match head.as_str() {
            "chain" => {
                self.skip_ws();
                let at = self.pos;
                let n = self.int()?;
                if n <= 0 {
                    return Err(self.error_at(at, "chain rank must be positive"));
                }
                let n = u32::try_from(n).map_err(|_| self.error_at(at, "chain rank too large"))?;
                MvAlgebra::chain(n).map_err(|e| self.core(at, e))?
            }
            "product" => {
                let factors = self.list(')', Self::algebra)?;
                if factors.is_empty() {
                    return Err(self.error_at(start, "product needs at least one factor"));
                }
                return MvAlgebra::product(factors).map_err(|e| self.core(start, e));
            }
            "gamma" => self.gamma(start)?,
            "quotient" => {
                let base = self.algebra()?;
                self.expect(',')?;
                let ideal = self.selector(&base)?;
                quotient(&base, &ideal).map_err(|e| self.core(start, e))?.0
            }
            "subalgebra" => {
                let base = self.algebra()?;
                self.expect(',')?;
                self.expect('[')?;
                self.skip_ws();
                let at = self.pos;
                let gens = self.list(']', Self::element)?;
                for g in &gens {
                    base.check(g).map_err(|e| self.core(at, e))?;
                }
                generate_subalgebra(&base, &gens, self.closure_budget)
                    .map_err(|e| self.core(start, e))?
            }
            _ => {
                let base = self.algebra()?;
                self.expect(',')?;
                self.skip_ws();
                let at = self.pos;
                let tag = self.ident()?;
                let p = match tag.as_str() {
                    "any" => DefaultPredicate::Any,
                    "parity" => DefaultPredicate::TailParity,
                    _ => {
                        return Err(self.error_at(at, format!("unknown default predicate '{tag}'")))
                    }
                };
                MvAlgebra::cofinite(base, p).map_err(|e| self.core(start, e))?
            }
        };
        self.expect(')')?;
        Ok(a)
    }

    /// `gamma(unit=(u,0,…,0), ranks=[r₁,…])`, argument names optional.
    fn gamma(&mut self, start: usize) -> Result<MvAlgebra, ParseError> {
        self.key("unit")?;
        self.skip_ws();
        let unit_at = self.pos;
        self.expect('(')?;
        let unit = self.list(')', Self::int)?;
        self.expect(',')?;
        self.key("ranks")?;
        self.skip_ws();
        let ranks_at = self.pos;
        self.expect('[')?;
        let ranks = self.list(']', Self::int)?;
        if ranks.is_empty() || ranks.iter().any(|&r| r <= 0) {
            return Err(self.error_at(
                ranks_at,
                "ranks must be a nonempty list of positive integers",
            ));
        }
        let dim = 1 + ranks.iter().sum::<i64>() as usize;
        if unit.len() != dim || unit[1..].iter().any(|&c| c != 0) {
            return Err(self.error_at(
                unit_at,
                format!("unit must have the form (u{})", ",0".repeat(dim - 1)),
            ));
        }
        let ranks = ranks.into_iter().map(|r| r as usize).collect();
        MvAlgebra::gamma_lex(unit[0], ranks).map_err(|e| self.core(start, e))
    }

    /// `zero | radical | maximal(i)`.
    fn selector(&mut self, base: &MvAlgebra) -> Result<Ideal, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let tag = self.ident()?;
        match tag.as_str() {
            "zero" => Ok(zero_ideal(base)),
            "radical" => radical(base).map_err(|e| self.core(at, e)),
            "maximal" => {
                self.expect('(')?;
                let i = self.int()?;
                self.expect(')')?;
                let ms = maximal_ideals(base).map_err(|e| self.core(at, e))?;
                usize::try_from(i)
                    .ok()
                    .and_then(|i| ms.get(i).cloned())
                    .ok_or_else(|| {
                        self.error_at(
                            at,
                            format!("maximal({i}) out of range: {} maximal ideals", ms.len()),
                        )
                    })
            }
            _ => Err(self.error_at(at, format!("unknown ideal selector '{tag}'"))),
        }
    }

    /// `p/q` (chains), `(h,g,…)` (gamma), `<x,y,…>` (products).
    fn element(&mut self) -> Result<MvElement, ParseError> {
        if self.eat('(') {
            return Ok(MvElement::Lex(self.list(')', Self::int)?));
        }
        if self.eat('<') {
            return Ok(MvElement::Tuple(self.list('>', Self::element)?));
        }
        self.skip_ws();
        let at = self.pos;
        let p = self.int()?;
        let q = if self.eat('/') { self.int()? } else { 1 };
        if q <= 0 {
            return Err(self.error_at(at, "denominator must be positive"));
        }
        Ok(MvElement::Chain(Rational::new(p, q)))
    }
}
