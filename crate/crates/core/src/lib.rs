//! Satisfiability checking for HyperLTL.
//!
//! A formula is satisfiable when some set of traces satisfies it. The
//! [`engine`] guesses a set of `m` ultimately periodic traces, each
//! unrolled to `k` steps, encodes "these traces form a model" as a
//! quantified boolean formula ([`qbf`]), and decides it ([`solve`]). Any
//! witness is decoded and re-checked by the reference evaluator in
//! [`formula`] before it is reported. Unsatisfiability is never claimed:
//! when the search budget runs out the answer is "unknown".

pub mod engine;
pub mod formula;
pub mod policies;
pub mod prop;
pub mod qbf;
pub mod random;
pub mod solve;
pub mod unroll;
