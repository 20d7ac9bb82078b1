//! Batch interface: `.mvalg` documents in, JSON verification reports out.

pub mod parse;
pub mod report;
pub mod run;
