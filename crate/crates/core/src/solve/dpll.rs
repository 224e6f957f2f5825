//! Plain DPLL: two watched literals, chronological backtracking, no clause
//! learning. Decisions take the lowest-numbered unassigned variable and try
//! `false` first, so the search is a pure function of the clause list.

use std::collections::BTreeMap;
use std::time::Instant;

use super::{PropFormula, SolveOutcome};
use crate::formula::Quantifier;
use crate::qbf::{to_cnf, Block, Clause};

/// Result of [`solve_cnf`]: a model indexed by `var - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CnfOutcome {
    Sat(Vec<bool>),
    Unsat,
    TimedOut,
}

type Lit = u32;

fn lit_of(l: i32) -> Lit {
    (l.unsigned_abs() - 1) << 1 | (l < 0) as u32
}

struct Dpll {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    /// Per variable: 0 unassigned, 1 true, 2 false.
    value: Vec<u8>,
    trail: Vec<Lit>,
    /// Trail position of each decision and whether it has been flipped.
    levels: Vec<(usize, bool)>,
    qhead: usize,
    next_var: usize,
}

impl Dpll {
    fn lit_value(&self, l: Lit) -> Option<bool> {
        match self.value[(l >> 1) as usize] {
            0 => None,
            v => Some((v == 1) != (l & 1 == 1)),
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[(l >> 1) as usize] = if l & 1 == 0 { 1 } else { 2 };
        self.trail.push(l);
    }

    fn undo_to(&mut self, pos: usize) {
        for l in self.trail.drain(pos..) {
            let v = (l >> 1) as usize;
            self.value[v] = 0;
            self.next_var = self.next_var.min(v);
        }
        self.qhead = pos;
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let watching = std::mem::take(&mut self.watches[falsified as usize]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = false;
            for (idx, &ci) in watching.iter().enumerate() {
                if conflict {
                    keep.extend_from_slice(&watching[idx..]);
                    break;
                }
                let c = &mut self.clauses[ci as usize];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.lit_value(first) == Some(true) {
                    keep.push(ci);
                    continue;
                }
                let c = &self.clauses[ci as usize];
                let replacement = (2..c.len()).find(|&j| self.lit_value(c[j]) != Some(false));
                if let Some(j) = replacement {
                    let c = &mut self.clauses[ci as usize];
                    c.swap(1, j);
                    let w = c[1];
                    self.watches[w as usize].push(ci);
                    continue;
                }
                keep.push(ci);
                match self.lit_value(first) {
                    Some(false) => conflict = true,
                    None => self.assign(first),
                    Some(true) => unreachable!(),
                }
            }
            self.watches[falsified as usize] = keep;
            if conflict {
                return false;
            }
        }
        true
    }

    /// Undoes decisions until one can be flipped; false when none is left.
    fn backtrack(&mut self) -> bool {
        while let Some((start, flipped)) = self.levels.pop() {
            let decision = self.trail[start];
            self.undo_to(start);
            if !flipped {
                self.levels.push((start, true));
                self.assign(decision ^ 1);
                return true;
            }
        }
        false
    }
}

/// Decides a clause set over variables `1..=num_vars`.
pub fn solve_cnf(num_vars: usize, clauses: &[Clause], deadline: Option<Instant>) -> CnfOutcome {
    let mut s = Dpll {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * num_vars],
        value: vec![0; num_vars],
        trail: Vec::new(),
        levels: Vec::new(),
        qhead: 0,
        next_var: 0,
    };
    for clause in clauses {
        let lits: Vec<Lit> = clause.iter().map(|&l| lit_of(l)).collect();
        match lits.len() {
            0 => return CnfOutcome::Unsat,
            1 => match s.lit_value(lits[0]) {
                Some(false) => return CnfOutcome::Unsat,
                Some(true) => {}
                None => s.assign(lits[0]),
            },
            _ => {
                let ci = s.clauses.len() as u32;
                s.watches[lits[0] as usize].push(ci);
                s.watches[lits[1] as usize].push(ci);
                s.clauses.push(lits);
            }
        }
    }
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() >= d) {
            return CnfOutcome::TimedOut;
        }
        if !s.propagate() {
            if s.levels.is_empty() || !s.backtrack() {
                return CnfOutcome::Unsat;
            }
            continue;
        }
        while s.next_var < num_vars && s.value[s.next_var] != 0 {
            s.next_var += 1;
        }
        if s.next_var == num_vars {
            return CnfOutcome::Sat(s.value.iter().map(|&v| v == 1).collect());
        }
        s.levels.push((s.trail.len(), false));
        s.assign((s.next_var as u32) << 1 | 1);
    }
}

/// Decides `p` and reports the values of its outer variables. The outer
/// variables hold the lowest ids, so branching visits them first in canonical
/// order, then the definitional variables.
pub fn solve_builtin(p: &PropFormula, deadline: Option<Instant>) -> SolveOutcome {
    let prefix = vec![Block {
        quantifier: Quantifier::Exists,
        vars: p.outer.clone(),
    }];
    let inst = to_cnf(&p.circuit, p.root, prefix, 0, 0);
    match solve_cnf(inst.vars.len(), &inst.clauses, deadline) {
        CnfOutcome::Sat(values) => SolveOutcome::Sat(
            p.outer
                .iter()
                .map(|v| (inst.vars.prop(*v).clone(), values[v.index()]))
                .collect::<BTreeMap<_, _>>(),
        ),
        CnfOutcome::Unsat => SolveOutcome::Unsat,
        CnfOutcome::TimedOut => SolveOutcome::Unknown("time limit".into()),
    }
}
