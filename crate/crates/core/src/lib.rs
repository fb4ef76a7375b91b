//! Parsing, classification and execution of the mu*-ALBA calculus for the
//! intuitionistic modal mu-calculus, with a brute-force oracle over finite
//! perfect modal bi-Heyting algebras.

pub mod syntax;
pub mod algebra;
pub mod classifier;
pub mod engine;
