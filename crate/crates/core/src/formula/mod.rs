//! HyperLTL formulas: syntax tree, concrete syntax, normal forms, formula
//! combinators and a reference evaluator over lasso-trace models.

mod ast;
mod eval;
mod model;
mod parse;

use std::collections::HashSet;

use thiserror::Error;

pub use ast::{Formula, Ltl, QuantGroup, Quantifier};
pub use eval::{eval, eval_body};
pub use model::{letter, LassoTrace, Letter, Model};
pub use parse::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unbound trace variable `{0}`")]
    UnboundVar(String),
    #[error("duplicate trace variable `{0}`")]
    DuplicateVar(String),
    #[error("empty quantifier prefix")]
    EmptyPrefix,
    #[error("empty quantifier group")]
    EmptyGroup,
    #[error("model has no traces")]
    EmptyModel,
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("model traces do not share stem and loop lengths")]
    NonUniformModel,
    #[error("evaluation supports at most 64 atomic propositions, formula has {0}")]
    TooManyAps(usize),
}

/// Negation normal form: negation only on atoms; `->`, `<->`, `F`, `G` and `W`
/// rewritten into `&`, `|`, `U` and `R`.
pub fn nnf(body: &Ltl) -> Ltl {
    push_negation(body, false)
}

fn push_negation(f: &Ltl, neg: bool) -> Ltl {
    let pos = |a: &Ltl| push_negation(a, false);
    let negd = |a: &Ltl| push_negation(a, true);
    let same = |a: &Ltl| push_negation(a, neg);
    match f {
        Ltl::True if neg => Ltl::False,
        Ltl::True => Ltl::True,
        Ltl::False if neg => Ltl::True,
        Ltl::False => Ltl::False,
        Ltl::Atom { .. } if neg => f.clone().not(),
        Ltl::Atom { .. } => f.clone(),
        Ltl::Not(a) => push_negation(a, !neg),
        Ltl::And(a, b) if neg => negd(a).or(negd(b)),
        Ltl::And(a, b) => pos(a).and(pos(b)),
        Ltl::Or(a, b) if neg => negd(a).and(negd(b)),
        Ltl::Or(a, b) => pos(a).or(pos(b)),
        Ltl::Implies(a, b) if neg => pos(a).and(negd(b)),
        Ltl::Implies(a, b) => negd(a).or(pos(b)),
        Ltl::Iff(a, b) if neg => pos(a).and(negd(b)).or(negd(a).and(pos(b))),
        Ltl::Iff(a, b) => pos(a).and(pos(b)).or(negd(a).and(negd(b))),
        Ltl::Next(a) => same(a).next(),
        Ltl::Finally(a) if neg => Ltl::False.release(negd(a)),
        Ltl::Finally(a) => Ltl::True.until(pos(a)),
        Ltl::Globally(a) if neg => Ltl::True.until(negd(a)),
        Ltl::Globally(a) => Ltl::False.release(pos(a)),
        Ltl::Until(a, b) if neg => negd(a).release(negd(b)),
        Ltl::Until(a, b) => pos(a).until(pos(b)),
        Ltl::Release(a, b) if neg => negd(a).until(negd(b)),
        Ltl::Release(a, b) => pos(a).release(pos(b)),
        // a W b = b R (a | b)
        Ltl::WeakUntil(a, b) if neg => negd(b).until(negd(a).and(negd(b))),
        Ltl::WeakUntil(a, b) => pos(b).release(pos(a).or(pos(b))),
    }
}

/// Negates a prenex formula: every quantifier is dualized and the body negated.
pub fn negate(f: &Formula) -> Formula {
    let prefix = f
        .prefix()
        .iter()
        .map(|g| QuantGroup::new(g.quantifier.dual(), g.vars.iter().cloned()))
        .collect();
    Formula::new(prefix, f.body().clone().not()).expect("negation preserves closedness")
}

/// Prenex conjunction: `g`'s trace variables are renamed apart from `f`'s and
/// its prefix is placed after `f`'s.
pub fn conjoin(f: &Formula, g: &Formula) -> Formula {
    let mut taken: HashSet<String> = f
        .trace_vars()
        .chain(g.trace_vars())
        .map(|(_, v)| v.to_string())
        .collect();
    let f_vars: HashSet<&str> = f.trace_vars().map(|(_, v)| v).collect();
    let mut renaming = std::collections::HashMap::new();
    for (_, v) in g.trace_vars() {
        if f_vars.contains(v) {
            let fresh = (1..)
                .map(|i| format!("{v}{i}"))
                .find(|c| !taken.contains(c))
                .expect("unbounded supply of names");
            taken.insert(fresh.clone());
            renaming.insert(v.to_string(), fresh);
        }
    }
    let rename = |v: &str| renaming.get(v).cloned();
    let mut prefix = f.prefix().to_vec();
    prefix.extend(g.prefix().iter().map(|grp| {
        QuantGroup::new(
            grp.quantifier,
            grp.vars
                .iter()
                .map(|v| rename(v).unwrap_or_else(|| v.clone())),
        )
    }));
    let body = f.body().clone().and(g.body().rename_vars(&rename));
    Formula::new(prefix, body).expect("renamed conjunction is closed and distinct")
}

/// `f ∧ ¬g` in prenex form; its models are trace sets satisfying `f` but not `g`.
pub fn nonimplication(f: &Formula, g: &Formula) -> Formula {
    conjoin(f, &negate(g))
}
