//! Deciding constructed instances.
//!
//! Two routes lead to a verdict on the outermost existential block: the
//! QBF goes to an external solver through QDIMACS, or the trace-variable
//! quantifiers are expanded over the `m` candidates and the resulting
//! propositional formula goes to the builtin DPLL search.

mod decode;
mod dpll;
mod expand;
mod external;
pub mod qsearch;

use std::collections::BTreeMap;
use std::time::Duration;

use crate::prop::{Circuit, Gate, PropVar, Var};

pub use decode::{decode_model, encode_model, DecodeError};
pub use dpll::{solve_builtin, solve_cnf, CnfOutcome};
pub use expand::{
    expand_to_sat, expand_to_sat_until, instantiation_count, ExpandError, DEFAULT_EXPANSION_CAP,
};
pub use external::{default_solver_template, parse_certificate, solve_external, SOLVER_ENV};

/// Verdict of one solver call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Values of every variable of the outermost existential block.
    Sat(BTreeMap<PropVar, bool>),
    Unsat,
    Unknown(String),
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Builtin,
    /// Shell command template; `{file}` is replaced by the QDIMACS path.
    External(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub time_limit: Duration,
    /// Treat a certificate that omits an outer variable as malformed
    /// instead of defaulting the variable to false.
    pub strict_certificate: bool,
}

impl BackendConfig {
    pub fn new(kind: BackendKind, time_limit: Duration) -> BackendConfig {
        assert!(!time_limit.is_zero(), "time limit must be positive");
        BackendConfig {
            kind,
            time_limit,
            strict_certificate: false,
        }
    }
}

/// A propositional formula whose free variables all belong to the outer
/// block (`outer`, in canonical order).
#[derive(Clone, Debug)]
pub struct PropFormula {
    pub circuit: Circuit,
    pub root: Gate,
    pub outer: Vec<Var>,
}
