use std::time::Instant;

use thiserror::Error;

use super::PropFormula;
use crate::formula::{nnf, Formula, Quantifier};
use crate::prop::{Circuit, Gate, PropVar};
use crate::qbf::register_outer_block;
use crate::unroll::{loop_constraint, UnrollError, Unroller};

pub const DEFAULT_EXPANSION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("expansion cap exceeded: {count} instantiations (cap {cap})")]
    CapExceeded { count: u128, cap: u128 },
    #[error(transparent)]
    Unroll(#[from] UnrollError),
    #[error("time limit")]
    TimedOut,
}

/// `m^n` for `n` trace variables, saturating.
pub fn instantiation_count(f: &Formula, m: usize) -> u128 {
    (0..f.num_trace_vars()).fold(1u128, |acc, _| acc.saturating_mul(m as u128))
}

/// Replaces each `∀π` by a conjunction and each `∃π` by a disjunction over
/// the instantiations `π := t_i`, leaving a formula over the outer block
/// only. Quantified variables the body never mentions are dropped, since
/// the candidate set is never empty.
pub fn expand_to_sat(
    f: &Formula,
    m: usize,
    k: usize,
    cap: u128,
) -> Result<PropFormula, ExpandError> {
    expand_to_sat_until(f, m, k, cap, None)
}

/// [`expand_to_sat`] that gives up once `deadline` has passed.
pub fn expand_to_sat_until(
    f: &Formula,
    m: usize,
    k: usize,
    cap: u128,
    deadline: Option<Instant>,
) -> Result<PropFormula, ExpandError> {
    assert!(m >= 1, "m must be positive");
    let count = instantiation_count(f, m);
    if count > cap {
        return Err(ExpandError::CapExceeded { count, cap });
    }
    let mut u = Unroller::new(&nnf(f.body()), k)?;
    let mut c = Circuit::new();
    let outer = register_outer_block(&mut c, &f.aps(), m, k);
    let quants: Vec<(Quantifier, usize)> = f
        .trace_vars()
        .filter_map(|(q, v)| u.trace_vars().iter().position(|b| b == v).map(|s| (q, s)))
        .collect();
    let mut codes = vec![0u32; u.trace_vars().len()];
    let lc = loop_constraint(&mut c, k);
    let mut cases = Vec::with_capacity(k);
    for l in 0..k {
        let sel = c.prop_lit(PropVar::LoopSel(l), true);
        let mut e = Expansion {
            u: &mut u,
            m,
            l,
            quants: &quants,
            deadline,
            leaves: 0,
        };
        let body = e.go(&mut c, 0, &mut codes).ok_or(ExpandError::TimedOut)?;
        cases.push(c.and([sel, body]));
    }
    let cases = c.or(cases);
    let root = c.and([lc, cases]);
    Ok(PropFormula {
        circuit: c,
        root,
        outer,
    })
}

struct Expansion<'a> {
    u: &'a mut Unroller,
    m: usize,
    l: usize,
    quants: &'a [(Quantifier, usize)],
    deadline: Option<Instant>,
    leaves: u64,
}

impl Expansion<'_> {
    /// `None` once the deadline has passed.
    fn go(&mut self, c: &mut Circuit, depth: usize, codes: &mut [u32]) -> Option<Gate> {
        let Some(&(q, slot)) = self.quants.get(depth) else {
            self.leaves += 1;
            if self.leaves.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d) {
                return None;
            }
            return Some(self.u.encode_codes(c, 0, self.l, codes));
        };
        let (absorbing, neutral) = match q {
            Quantifier::Forall => (Gate::FALSE, Gate::TRUE),
            Quantifier::Exists => (Gate::TRUE, Gate::FALSE),
        };
        let mut parts = Vec::with_capacity(self.m);
        for t in 0..self.m {
            codes[slot] = t as u32;
            let g = self.go(c, depth + 1, codes)?;
            if g == absorbing {
                return Some(absorbing);
            }
            if g != neutral {
                parts.push(g);
            }
        }
        Some(match q {
            Quantifier::Forall => c.and(parts),
            Quantifier::Exists => c.or(parts),
        })
    }
}
