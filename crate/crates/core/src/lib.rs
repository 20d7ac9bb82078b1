//! MV-algebras, their spectra, MV-topologies and the sheaf representation of
//! locally retractive MV-algebras by ℓ-groups.

pub mod algebra;
pub mod axioms;
pub mod corpus;
pub mod ell_groups;
pub mod error;
pub mod intmat;
pub mod rational;
pub mod representation;
pub mod sheaf;
pub mod spectra;
pub mod topology;

pub use algebra::{MvAlgebra, MvElement, MvOp};
pub use error::{MvError, Result};
pub use rational::Rational;
