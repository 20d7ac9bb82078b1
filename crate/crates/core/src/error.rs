use thiserror::Error;

use crate::algebra::MvElement;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MvError {
    #[error("foreign element {element} for algebra {algebra}")]
    ForeignElement { algebra: String, element: MvElement },

    #[error("not enumerable: {0}")]
    NotEnumerable(String),

    #[error("closure budget exceeded after {} elements", partial.len())]
    ClosureBudgetExceeded { partial: Vec<MvElement> },

    #[error("degenerate unit: the unit must be strictly positive")]
    DegenerateUnit,

    #[error("invalid algebra descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("ideal lattice unknown for {0}")]
    IdealLatticeUnknown(String),

    #[error("trivial quotient: the ideal is the whole algebra")]
    TrivialQuotient,

    #[error("completion unsupported: {0}")]
    CompletionUnsupported(String),

    #[error("retraction search inconclusive: {0}")]
    RetractionInconclusive(String),

    #[error("ideal is not lexicographic: {axiom} fails")]
    NotLexicographic { axiom: String },

    #[error("not locally retractive at {max_ideal}")]
    NotLocallyRetractive { max_ideal: String },

    #[error("spectrum value error: {0}")]
    SpectrumValue(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("point {0} lies in the support of no open")]
    IsolatedFromTopology(usize),

    #[error("requires external embedding (out of scope): {0}")]
    RequiresExternalEmbedding(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, MvError>;
