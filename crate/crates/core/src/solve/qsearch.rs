//! Small reference QBF solver for prenex CNF: search in prefix order with
//! unit propagation under universal reduction, no learning. Meant for
//! cross-checking on small instances and as a stand-in external solver.

use std::time::Instant;

use crate::formula::Quantifier;
use crate::qbf::Qdimacs;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QsearchOutcome {
    /// True, with the values of the outermost existential block (empty
    /// when the first block is universal).
    Sat(Vec<i32>),
    Unsat,
    TimedOut,
}

struct Search<'a> {
    clauses: &'a [Vec<i32>],
    /// Per variable (by id): block depth and quantifier.
    depth: Vec<usize>,
    universal: Vec<bool>,
    order: Vec<u32>,
    value: Vec<Option<bool>>,
    trail: Vec<u32>,
    /// (trail position, flipped) per decision.
    decisions: Vec<(usize, bool)>,
}

enum State {
    Conflict,
    Satisfied,
    Open,
}

impl Search<'_> {
    fn lit(&self, l: i32) -> Option<bool> {
        self.value[l.unsigned_abs() as usize].map(|v| v == (l > 0))
    }

    fn set(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = Some(l > 0);
        self.trail.push(l.unsigned_abs());
    }

    fn propagate(&mut self) -> State {
        loop {
            let mut changed = false;
            let mut all_sat = true;
            for ci in 0..self.clauses.len() {
                let clause = &self.clauses[ci];
                if clause.iter().any(|&l| self.lit(l) == Some(true)) {
                    continue;
                }
                all_sat = false;
                let open: Vec<i32> = clause
                    .iter()
                    .copied()
                    .filter(|&l| self.lit(l).is_none())
                    .collect();
                let exist: Vec<i32> = open
                    .iter()
                    .copied()
                    .filter(|l| !self.universal[l.unsigned_abs() as usize])
                    .collect();
                let max_exist = exist
                    .iter()
                    .map(|l| self.depth[l.unsigned_abs() as usize])
                    .max();
                // universals deeper than every open existential are reducible
                let blocking = open.iter().filter(|l| {
                    let v = l.unsigned_abs() as usize;
                    self.universal[v] && max_exist.is_some_and(|d| self.depth[v] < d)
                });
                match exist.len() {
                    0 => return State::Conflict,
                    1 if blocking.count() == 0 => {
                        self.set(exist[0]);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if all_sat {
                return State::Satisfied;
            }
            if !changed {
                return State::Open;
            }
        }
    }

    fn undo_to(&mut self, pos: usize) {
        for v in self.trail.drain(pos..) {
            self.value[v as usize] = None;
        }
    }

    /// Snapshot of the outer existential block, counting only values fixed
    /// before the first universal decision.
    fn outer_snapshot(&self, outer: &[u32]) -> Vec<i32> {
        let limit = self
            .decisions
            .iter()
            .find(|&&(pos, _)| self.universal[self.trail[pos] as usize])
            .map_or(self.trail.len(), |&(pos, _)| pos);
        let fixed = &self.trail[..limit];
        outer
            .iter()
            .map(|&v| {
                let on = fixed.contains(&v) && self.value[v as usize] == Some(true);
                if on {
                    v as i32
                } else {
                    -(v as i32)
                }
            })
            .collect()
    }
}

/// Decides a QDIMACS problem. Unquantified variables are treated as
/// existential in front of the prefix.
pub fn solve_qdimacs(q: &Qdimacs, deadline: Option<Instant>) -> QsearchOutcome {
    let n = q.num_vars as usize;
    let mut depth = vec![0usize; n + 1];
    let mut universal = vec![false; n + 1];
    let mut quantified = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    for (b, (quant, vars)) in q.blocks.iter().enumerate() {
        for &v in vars {
            depth[v as usize] = b + 1;
            universal[v as usize] = *quant == Quantifier::Forall;
            quantified[v as usize] = true;
        }
    }
    let free: Vec<u32> = (1..=n as u32)
        .filter(|&v| !quantified[v as usize])
        .collect();
    order.extend(&free);
    for (_, vars) in &q.blocks {
        order.extend(vars);
    }
    let outer: Vec<u32> = match q.blocks.first() {
        Some((Quantifier::Exists, vars)) => free.iter().chain(vars).copied().collect(),
        _ => free,
    };
    let mut s = Search {
        clauses: &q.clauses,
        depth,
        universal,
        order,
        value: vec![None; n + 1],
        trail: Vec::new(),
        decisions: Vec::new(),
    };
    let mut certificate = Vec::new();
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() >= d) {
            return QsearchOutcome::TimedOut;
        }
        let verdict = match s.propagate() {
            State::Conflict => false,
            State::Satisfied => {
                certificate = s.outer_snapshot(&outer);
                true
            }
            State::Open => {
                let v = *s
                    .order
                    .iter()
                    .find(|&&v| s.value[v as usize].is_none())
                    .expect("open clauses have unassigned variables");
                s.decisions.push((s.trail.len(), false));
                s.set(-(v as i32));
                continue;
            }
        };
        // A branch settled: resume at the innermost decision whose other
        // branch still matters.
        loop {
            let Some((pos, flipped)) = s.decisions.pop() else {
                return if verdict {
                    QsearchOutcome::Sat(certificate)
                } else {
                    QsearchOutcome::Unsat
                };
            };
            let v = s.trail[pos];
            s.undo_to(pos);
            let decisive = s.universal[v as usize] != verdict;
            if !flipped && !decisive {
                s.decisions.push((pos, true));
                s.set(v as i32);
                break;
            }
        }
    }
}

/// `V` lines for a certificate, one literal per value, closed by `0`.
pub fn format_certificate(lits: &[i32]) -> String {
    let mut out = String::from("V");
    for l in lits {
        out.push_str(&format!(" {l}"));
    }
    out.push_str(" 0\n");
    out
}
