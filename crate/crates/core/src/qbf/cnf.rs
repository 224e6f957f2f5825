use std::collections::HashMap;

use super::{Block, Clause, QbfInstance};
use crate::formula::Quantifier;
use crate::prop::{Circuit, Gate, Node, PropVar, VarTable};

struct Tseitin<'a> {
    c: &'a Circuit,
    vars: VarTable,
    clauses: Vec<Clause>,
    defs: HashMap<Gate, i32>,
    aux: Vec<crate::prop::Var>,
}

impl Tseitin<'_> {
    fn fresh(&mut self) -> i32 {
        let v = self.vars.intern(PropVar::Aux(self.aux.len()));
        self.aux.push(v);
        v.id() as i32
    }

    fn push(&mut self, lits: Vec<i32>) {
        if let Some(clause) = normalize(lits) {
            self.clauses.push(clause);
        }
    }

    /// Literal equivalent to gate `g`, defining auxiliaries bottom-up.
    fn lit(&mut self, g: Gate) -> i32 {
        let mut stack = vec![g];
        while let Some(&top) = stack.last() {
            if self.direct(top).is_some() || self.defs.contains_key(&top) {
                stack.pop();
                continue;
            }
            let kids: &[Gate] = match self.c.node(top) {
                Node::Not(x) => std::slice::from_ref(x),
                Node::And(xs) | Node::Or(xs) => xs,
                Node::Const(_) | Node::Lit(..) => &[],
            };
            let pending: Vec<Gate> = kids
                .iter()
                .copied()
                .filter(|&k| self.direct(k).is_none() && !self.defs.contains_key(&k))
                .collect();
            if !pending.is_empty() {
                stack.extend(pending);
                continue;
            }
            stack.pop();
            self.define(top);
        }
        self.direct(g).unwrap_or_else(|| self.defs[&g])
    }

    /// Literal for gates that need no definition of their own.
    fn direct(&self, g: Gate) -> Option<i32> {
        match self.c.node(g) {
            Node::Lit(v, p) => Some(if *p { v.id() as i32 } else { -(v.id() as i32) }),
            Node::Not(x) => self
                .direct(*x)
                .or_else(|| self.defs.get(x).copied())
                .map(|l| -l),
            _ => None,
        }
    }

    fn define(&mut self, g: Gate) {
        let node = self.c.node(g).clone();
        let kid_lits = |s: &Self, xs: &[Gate]| -> Vec<i32> {
            xs.iter()
                .map(|&x| s.direct(x).unwrap_or_else(|| s.defs[&x]))
                .collect()
        };
        match node {
            Node::Const(b) => {
                let x = self.fresh();
                self.push(vec![if b { x } else { -x }]);
                self.defs.insert(g, x);
            }
            Node::Not(_) | Node::Lit(..) => {}
            Node::And(xs) => {
                let ks = kid_lits(self, &xs);
                let x = self.fresh();
                for &k in &ks {
                    self.push(vec![-x, k]);
                }
                let mut big: Vec<i32> = ks.iter().map(|k| -k).collect();
                big.push(x);
                self.push(big);
                self.defs.insert(g, x);
            }
            Node::Or(xs) => {
                let ks = kid_lits(self, &xs);
                let x = self.fresh();
                for &k in &ks {
                    self.push(vec![x, -k]);
                }
                let mut big = ks;
                big.push(-x);
                self.push(big);
                self.defs.insert(g, x);
            }
        }
    }

    /// Adds clauses forcing `g` true; top-level conjunctions are split and
    /// top-level disjunctions become single clauses.
    fn assert(&mut self, g: Gate) {
        let mut stack = vec![g];
        let mut seen = std::collections::HashSet::new();
        while let Some(top) = stack.pop() {
            if !seen.insert(top) {
                continue;
            }
            match self.c.node(top).clone() {
                Node::Const(true) => {}
                Node::Const(false) => {
                    let x = self.fresh();
                    self.push(vec![x]);
                    self.push(vec![-x]);
                }
                Node::And(xs) => stack.extend(xs.iter().copied()),
                Node::Or(xs) => {
                    let lits = xs.iter().map(|&x| self.lit(x)).collect();
                    self.push(lits);
                }
                Node::Lit(..) | Node::Not(_) => {
                    let l = self.lit(top);
                    self.push(vec![l]);
                }
            }
        }
    }
}

/// Removes repeated literals; `None` for tautologies.
fn normalize(lits: Vec<i32>) -> Option<Clause> {
    let mut out: Clause = Vec::with_capacity(lits.len());
    for l in lits {
        if out.contains(&-l) {
            return None;
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Some(out)
}

/// Definitional (Tseitin) clause form of `root`. Auxiliary variables are
/// appended as a final existential block, so for every assignment of the
/// other variables, `root` holds iff some auxiliary extension satisfies the
/// clauses.
pub fn to_cnf(c: &Circuit, root: Gate, prefix: Vec<Block>, m: usize, k: usize) -> QbfInstance {
    let mut t = Tseitin {
        c,
        vars: c.vars().clone(),
        clauses: Vec::new(),
        defs: HashMap::new(),
        aux: Vec::new(),
    };
    t.assert(root);
    let mut blocks = prefix;
    blocks.push(Block {
        quantifier: Quantifier::Exists,
        vars: t.aux,
    });
    QbfInstance {
        blocks,
        clauses: t.clauses,
        vars: t.vars,
        m,
        k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prop::Var;

    fn all_exists(c: &Circuit) -> Vec<Block> {
        vec![Block {
            quantifier: Quantifier::Exists,
            vars: c.vars().iter().map(|(v, _)| v).collect(),
        }]
    }

    /// ∃aux. clauses, by enumeration of the auxiliaries.
    fn projected(inst: &QbfInstance, base: &[bool]) -> bool {
        let aux = &inst.blocks.last().unwrap().vars;
        (0u64..1 << aux.len()).any(|bits| {
            let val = |id: u32| -> bool {
                let i = id as usize - 1;
                if i < base.len() {
                    base[i]
                } else {
                    let pos = aux.iter().position(|v| v.id() == id).unwrap();
                    bits >> pos & 1 == 1
                }
            };
            inst.clauses
                .iter()
                .all(|cl| cl.iter().any(|&l| val(l.unsigned_abs()) == (l > 0)))
        })
    }

    #[test]
    fn single_literal_is_unit() {
        let mut c = Circuit::new();
        let x = c.prop_lit(PropVar::LoopSel(0), true);
        let inst = to_cnf(&c, x, all_exists(&c), 1, 1);
        assert_eq!(inst.clauses, vec![vec![1]]);
        assert_eq!(inst.num_aux(), 0);
    }

    #[test]
    fn biconditional_equisatisfiable() {
        let mut c = Circuit::new();
        let x = c.prop_lit(PropVar::LoopSel(0), true);
        let y = c.prop_lit(PropVar::LoopSel(1), true);
        let g = c.iff(x, y);
        let inst = to_cnf(&c, g, all_exists(&c), 1, 1);
        for bits in 0..4u32 {
            let base = [bits & 1 == 1, bits & 2 == 2];
            let expected = c.evaluate(g, |v: Var| Some(base[v.index()])).unwrap();
            assert_eq!(projected(&inst, &base), expected);
        }
    }

    #[test]
    fn constants() {
        let c = Circuit::new();
        let inst = to_cnf(&c, Gate::FALSE, vec![], 1, 1);
        assert!(!projected(&inst, &[]));
        let inst = to_cnf(&c, Gate::TRUE, vec![], 1, 1);
        assert!(inst.clauses.is_empty());
    }

    #[test]
    fn normalize_clauses() {
        assert_eq!(normalize(vec![1, -2, 1]), Some(vec![1, -2]));
        assert_eq!(normalize(vec![1, -2, -1]), None);
    }
}
