//! The search over trace-set size `m` and unrolling bound `k`, with every
//! claimed witness checked by the reference evaluator before it is reported.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use log::{debug, info, warn};
use thiserror::Error;

use crate::formula::{eval, nonimplication, Formula, FormulaError, Model};
use crate::qbf::QbfInstance;
use crate::solve::{
    decode_model, default_solver_template, expand_to_sat_until, instantiation_count, solve_builtin,
    solve_external, BackendConfig, BackendKind, ExpandError, SolveOutcome, DEFAULT_EXPANSION_CAP,
};

/// Which solver route to use for each `(m, k)` candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendPolicy {
    /// Quantifier expansion plus the builtin SAT search only.
    Builtin,
    /// The QBF through an external command template only.
    External(String),
    /// Expansion while within the cap, otherwise the external command if any.
    Auto(Option<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_m: usize,
    pub max_k: usize,
    /// Wall-clock limit for a whole run.
    pub time_limit: Duration,
    pub backend: BackendPolicy,
    pub expansion_cap: u128,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_m: 8,
            max_k: 8,
            time_limit: Duration::from_secs(120),
            backend: BackendPolicy::Auto(default_solver_template()),
            expansion_cap: DEFAULT_EXPANSION_CAP,
        }
    }
}

impl Budget {
    pub fn new(max_m: usize, max_k: usize, time_limit: Duration, backend: BackendPolicy) -> Budget {
        Budget {
            max_m,
            max_k,
            time_limit,
            backend,
            expansion_cap: DEFAULT_EXPANSION_CAP,
        }
    }

    fn check(&self) {
        assert!(
            self.max_m >= 1 && self.max_k >= 1,
            "bounds must be positive"
        );
        assert!(!self.time_limit.is_zero(), "time limit must be positive");
    }
}

/// The route that produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    External,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Builtin => "builtin",
            Backend::External => "extern",
        })
    }
}

/// Outcome of a run. There is deliberately no "unsat".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Sat {
        /// The validated witness with duplicate traces removed.
        model: Model,
        m: usize,
        k: usize,
        backend: Backend,
    },
    Unknown {
        reason: String,
        /// The last `(m, k)` attempted.
        last: Option<(usize, usize)>,
    },
}

impl CheckResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, CheckResult::Sat { .. })
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            CheckResult::Sat { model, .. } => Some(model),
            CheckResult::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("internal: validation failed at m={m}, k={k} ({backend}): {detail}")]
    ValidationFailed {
        m: usize,
        k: usize,
        backend: Backend,
        detail: String,
    },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Result of a single `(m, k)` candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Candidate {
    Witness {
        model: Model,
        backend: Backend,
    },
    /// The solver proved there is no witness of this shape.
    NoWitness,
    Unknown(String),
}

static REJECTED: AtomicUsize = AtomicUsize::new(0);

/// Number of solver witnesses the evaluator has rejected in this process.
pub fn rejected_witnesses() -> usize {
    REJECTED.load(Ordering::Relaxed)
}

/// Pairs `(m, k)` with `m + k = n` for `n = 2, 3, …`, by increasing `m`.
pub fn schedule(max_m: usize, max_k: usize) -> impl Iterator<Item = (usize, usize)> {
    (2..=max_m + max_k).flat_map(move |n| {
        (1..n)
            .map(move |m| (m, n - m))
            .filter(move |&(m, k)| m <= max_m && k <= max_k)
    })
}

pub fn check_sat(f: &Formula, b: &Budget) -> Result<CheckResult, EngineError> {
    check_sat_observed(f, b, |_, _, _| {})
}

/// [`check_sat`], reporting each candidate's outcome to `observe`.
pub fn check_sat_observed(
    f: &Formula,
    b: &Budget,
    mut observe: impl FnMut(usize, usize, &Candidate),
) -> Result<CheckResult, EngineError> {
    b.check();
    let deadline = Instant::now() + b.time_limit;
    let mut last = None;
    for (m, k) in schedule(b.max_m, b.max_k) {
        if Instant::now() >= deadline {
            return Ok(CheckResult::Unknown {
                reason: "time limit".into(),
                last,
            });
        }
        last = Some((m, k));
        let cand = solve_candidate(f, m, k, b, deadline)?;
        debug!("m={m} k={k}: {cand:?}");
        observe(m, k, &cand);
        match cand {
            Candidate::Witness { model, backend } => {
                info!("witness at m={m}, k={k} via {backend}");
                return Ok(CheckResult::Sat {
                    model,
                    m,
                    k,
                    backend,
                });
            }
            Candidate::NoWitness => {}
            Candidate::Unknown(reason) if reason == "time limit" => {
                return Ok(CheckResult::Unknown { reason, last });
            }
            Candidate::Unknown(reason) => warn!("m={m} k={k}: {reason}"),
        }
    }
    Ok(CheckResult::Unknown {
        reason: format!("budget exhausted: m≤{}, k≤{}", b.max_m, b.max_k),
        last,
    })
}

/// Decides whether `f` has a witness of `m` traces made of `(k, l)`-lassos.
pub fn solve_candidate(
    f: &Formula,
    m: usize,
    k: usize,
    b: &Budget,
    deadline: Instant,
) -> Result<Candidate, EngineError> {
    let within_cap = instantiation_count(f, m) <= b.expansion_cap;
    let command = match &b.backend {
        BackendPolicy::Builtin => None,
        BackendPolicy::External(cmd) => Some(cmd.as_str()),
        BackendPolicy::Auto(cmd) if !within_cap => cmd.as_deref(),
        BackendPolicy::Auto(_) => None,
    };
    if let Some(cmd) = command {
        let limit = deadline.saturating_duration_since(Instant::now());
        if limit.is_zero() {
            return Ok(Candidate::Unknown("time limit".into()));
        }
        let inst = QbfInstance::build(f, m, k).expect("bound is positive");
        let cfg = BackendConfig::new(BackendKind::External(cmd.to_string()), limit);
        match solve_external(&inst, &cfg) {
            SolveOutcome::Sat(outer) => match validate(f, &outer, m, k) {
                Ok(model) => {
                    return Ok(Candidate::Witness {
                        model,
                        backend: Backend::External,
                    })
                }
                Err(detail) => {
                    REJECTED.fetch_add(1, Ordering::Relaxed);
                    if !within_cap {
                        return Err(EngineError::ValidationFailed {
                            m,
                            k,
                            backend: Backend::External,
                            detail,
                        });
                    }
                    warn!("external certificate rejected ({detail}); retrying with builtin");
                }
            },
            SolveOutcome::Unsat => return Ok(Candidate::NoWitness),
            SolveOutcome::Unknown(r) if r == "solver timeout" => {
                return Ok(Candidate::Unknown("time limit".into()))
            }
            SolveOutcome::Unknown(r) => return Ok(Candidate::Unknown(r)),
        }
    }
    let p = match expand_to_sat_until(f, m, k, b.expansion_cap, Some(deadline)) {
        Ok(p) => p,
        Err(ExpandError::TimedOut) => return Ok(Candidate::Unknown("time limit".into())),
        Err(e @ ExpandError::CapExceeded { .. }) => return Ok(Candidate::Unknown(e.to_string())),
        Err(ExpandError::Unroll(e)) => panic!("unrolling an NNF body failed: {e}"),
    };
    match solve_builtin(&p, Some(deadline)) {
        SolveOutcome::Sat(outer) => match validate(f, &outer, m, k) {
            Ok(model) => Ok(Candidate::Witness {
                model,
                backend: Backend::Builtin,
            }),
            Err(detail) => {
                REJECTED.fetch_add(1, Ordering::Relaxed);
                Err(EngineError::ValidationFailed {
                    m,
                    k,
                    backend: Backend::Builtin,
                    detail,
                })
            }
        },
        SolveOutcome::Unsat => Ok(Candidate::NoWitness),
        SolveOutcome::Unknown(r) => Ok(Candidate::Unknown(r)),
    }
}

/// Decodes an outer assignment and checks it, before and after dropping
/// duplicate traces; returns the deduplicated model.
fn validate(
    f: &Formula,
    outer: &std::collections::BTreeMap<crate::prop::PropVar, bool>,
    m: usize,
    k: usize,
) -> Result<Model, String> {
    let model = decode_model(outer, &f.aps(), m, k).map_err(|e| e.to_string())?;
    let holds = |md: &Model| eval(md, f).map_err(|e| e.to_string());
    if !holds(&model)? {
        return Err(format!("decoded model violates the formula:\n{model}"));
    }
    let reduced = model.dedup();
    if !holds(&reduced)? {
        return Err(format!(
            "deduplicated model violates the formula:\n{reduced}"
        ));
    }
    Ok(reduced)
}

/// Searches for a trace set satisfying `f` but not `g`.
pub fn find_nonimplication(
    f: &Formula,
    g: &Formula,
    b: &Budget,
) -> Result<CheckResult, EngineError> {
    check_sat(&nonimplication(f, g), b)
}

/// Both non-implication directions: `(f ⇏ g, g ⇏ f)`.
pub fn check_equiv(
    f: &Formula,
    g: &Formula,
    b: &Budget,
) -> Result<(CheckResult, CheckResult), EngineError> {
    Ok((find_nonimplication(f, g, b)?, find_nonimplication(g, f, b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn quick() -> Budget {
        Budget::new(3, 3, Duration::from_secs(30), BackendPolicy::Builtin)
    }

    #[test]
    fn dovetail_order() {
        let pairs: Vec<_> = schedule(2, 3).collect();
        assert_eq!(pairs, vec![(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3)]);
    }

    #[test]
    fn example_one_needs_two_traces() {
        let f = parse(
            "forall pi0. exists pi1. exists pi2. a_pi0 & (a_pi1 -> ~b_pi1) & (a_pi2 -> b_pi2)",
        )
        .unwrap();
        let mut seen = Vec::new();
        let r = check_sat_observed(&f, &quick(), |m, k, c| seen.push((m, k, c.clone()))).unwrap();
        assert_eq!(seen[0], (1, 1, Candidate::NoWitness));
        let CheckResult::Sat { model, m, k, .. } = r else {
            panic!("expected a witness")
        };
        assert_eq!((m, k), (2, 1));
        assert!(eval(&model, &f).unwrap());
    }

    #[test]
    fn contradiction_stays_unknown() {
        let f = parse("exists pi. a_pi & ~a_pi").unwrap();
        let r = check_sat(&f, &quick()).unwrap();
        assert_eq!(
            r,
            CheckResult::Unknown {
                reason: "budget exhausted: m≤3, k≤3".into(),
                last: Some((3, 3)),
            }
        );
    }

    #[test]
    fn complementary_traces() {
        let f = parse("forall p. exists q. a_p <-> ~a_q").unwrap();
        let CheckResult::Sat { model, m, k, .. } = check_sat(&f, &quick()).unwrap() else {
            panic!("expected a witness")
        };
        assert_eq!((m, k), (2, 1));
        assert_eq!(model.len(), 2);
    }

    #[test]
    fn external_route_without_solver_is_unknown() {
        let f = parse("exists p. a_p").unwrap();
        let b = Budget::new(
            1,
            1,
            Duration::from_secs(5),
            BackendPolicy::External("exit 3 # {file}".into()),
        );
        let r = check_sat(&f, &b).unwrap();
        assert!(!r.is_sat());
    }

    #[test]
    fn bogus_certificate_falls_back_to_builtin() {
        // claims sat with every outer variable false: loop constraint fails
        let f = parse("exists p. a_p").unwrap();
        let b = Budget::new(
            1,
            1,
            Duration::from_secs(5),
            BackendPolicy::External("exit 10 # {file}".into()),
        );
        let r = check_sat(&f, &b).unwrap();
        assert!(matches!(
            r,
            CheckResult::Sat {
                backend: Backend::Builtin,
                ..
            }
        ));
    }
}
