//! Construction of the QBF whose truth means "some trace set of size `m`,
//! made of `(k, l)`-lassos, satisfies the formula".
//!
//! The prefix existentially quantifies the `m` candidate traces and the loop
//! selectors, then mirrors the formula's quantifier groups. Each group gets a
//! linking premise tying its trace variables to one of the candidates; the
//! premises are chained with `→` for universal and `∧` for existential groups
//! around the unrolled body.

mod cnf;
mod qdimacs;

use crate::formula::{nnf, Formula, QuantGroup, Quantifier};
use crate::prop::{Circuit, Gate, Owner, PropVar, Var, VarTable};
use crate::unroll::{loop_constraint, unroll_body, UnrollError};

pub use cnf::to_cnf;
pub use qdimacs::{parse_qdimacs, Qdimacs, QdimacsError};

/// One quantifier block of the prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub quantifier: Quantifier,
    pub vars: Vec<Var>,
}

/// A clause of signed variable ids (DIMACS convention).
pub type Clause = Vec<i32>;

/// Prenex-CNF QBF with the metadata needed to decode certificates.
#[derive(Clone, Debug)]
pub struct QbfInstance {
    pub blocks: Vec<Block>,
    pub clauses: Vec<Clause>,
    pub vars: VarTable,
    /// Trace-set size.
    pub m: usize,
    /// Unrolling bound.
    pub k: usize,
}

impl QbfInstance {
    /// Builds `φ^m_QBF` for `f` at bound `k`.
    pub fn build(f: &Formula, m: usize, k: usize) -> Result<QbfInstance, UnrollError> {
        let mut c = Circuit::new();
        let prefix = build_prefix(&mut c, f, m, k);
        let matrix = assemble(&mut c, f, m, k)?;
        Ok(to_cnf(&c, matrix, prefix, m, k))
    }

    /// Variables of the outermost existential block in canonical order.
    pub fn outer(&self) -> &[Var] {
        &self.blocks[0].vars
    }

    /// Blocks with adjacent equal quantifiers merged and empty blocks dropped.
    pub fn merged_blocks(&self) -> Vec<Block> {
        let mut out: Vec<Block> = Vec::new();
        for b in self.blocks.iter().filter(|b| !b.vars.is_empty()) {
            match out.last_mut() {
                Some(last) if last.quantifier == b.quantifier => last.vars.extend(&b.vars),
                _ => out.push(b.clone()),
            }
        }
        out
    }

    pub fn num_aux(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.vars.len())
    }

    /// QDIMACS text; see [`parse_qdimacs`] for the reverse direction.
    pub fn to_qdimacs(&self) -> String {
        qdimacs::emit(self)
    }
}

/// Registers the candidate-trace variables `a^j_{t_i}` (trace index, then AP
/// name, then step) followed by the loop selectors. This fixes their ids to
/// `1..=m·|AP|·k + k`.
pub fn register_outer_block(c: &mut Circuit, aps: &[String], m: usize, k: usize) -> Vec<Var> {
    let mut vars = Vec::with_capacity(m * aps.len() * k + k);
    for t in 0..m {
        for ap in aps {
            for j in 0..k {
                vars.push(c.var(PropVar::ap_step(Owner::Trace(t), ap.clone(), j)));
            }
        }
    }
    vars.extend((0..k).map(|j| c.var(PropVar::LoopSel(j))));
    vars
}

/// `∃ Traces_T . Q_0 Traces_{π_0} … Q_n Traces_{π_n}` (the auxiliary block is
/// appended by [`to_cnf`]).
pub fn build_prefix(c: &mut Circuit, f: &Formula, m: usize, k: usize) -> Vec<Block> {
    assert!(m >= 1 && k >= 1, "m and k must be positive");
    let aps = f.aps();
    let mut blocks = vec![Block {
        quantifier: Quantifier::Exists,
        vars: register_outer_block(c, &aps, m, k),
    }];
    for group in f.prefix() {
        let mut vars = Vec::new();
        for pi in &group.vars {
            for ap in &aps {
                for j in 0..k {
                    vars.push(c.var(PropVar::ap_step(Owner::Var(pi.clone()), ap.clone(), j)));
                }
            }
        }
        blocks.push(Block {
            quantifier: group.quantifier,
            vars,
        });
    }
    blocks
}

/// `P_Q = ⋀_{π ∈ group} ⋁_{i<m} ⋀_{a, j} (a^j_{t_i} ↔ a^j_π)`.
pub fn build_linking_premise(
    c: &mut Circuit,
    group: &QuantGroup,
    m: usize,
    k: usize,
    aps: &[String],
) -> Gate {
    let mut per_var = Vec::with_capacity(group.vars.len());
    for pi in &group.vars {
        let mut choices = Vec::with_capacity(m);
        for t in 0..m {
            let mut eqs = Vec::with_capacity(aps.len() * k);
            for ap in aps {
                for j in 0..k {
                    let x = c.prop_lit(PropVar::ap_step(Owner::Trace(t), ap.clone(), j), true);
                    let y = c.prop_lit(
                        PropVar::ap_step(Owner::Var(pi.clone()), ap.clone(), j),
                        true,
                    );
                    eqs.push(c.iff(x, y));
                }
            }
            choices.push(c.and(eqs));
        }
        per_var.push(c.or(choices));
    }
    c.and(per_var)
}

/// The full matrix: `loop ∧ (P_0 ∘_0 (P_1 ∘_1 (… (P_n ∘_n (loop ∧ body)))))`
/// with `∘` being `→` for universal and `∧` for existential groups.
pub fn assemble(c: &mut Circuit, f: &Formula, m: usize, k: usize) -> Result<Gate, UnrollError> {
    let aps = f.aps();
    let lc = loop_constraint(c, k);
    let body = unroll_body(c, &nnf(f.body()), k)?;
    let mut acc = c.and([lc, body]);
    for group in f.prefix().iter().rev() {
        let premise = build_linking_premise(c, group, m, k, &aps);
        acc = match group.quantifier {
            Quantifier::Forall => c.implies(premise, acc),
            Quantifier::Exists => c.and([premise, acc]),
        };
    }
    Ok(c.and([lc, acc]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::prop::{substitute, Node};
    use std::collections::HashMap;

    fn example1() -> Formula {
        parse("forall pi0. exists pi1. exists pi2. a_pi0 & (a_pi1 -> ~b_pi1) & (a_pi2 -> b_pi2)")
            .unwrap()
    }

    fn names(c: &Circuit, vars: &[Var]) -> Vec<String> {
        vars.iter().map(|v| c.vars().prop(*v).to_string()).collect()
    }

    #[test]
    fn prefix_of_example_one() {
        let mut c = Circuit::new();
        let blocks = build_prefix(&mut c, &example1(), 2, 1);
        let q: Vec<_> = blocks.iter().map(|b| b.quantifier).collect();
        use Quantifier::*;
        assert_eq!(q, vec![Exists, Forall, Exists, Exists]);
        assert_eq!(
            names(&c, &blocks[0].vars),
            vec!["a^0_t0", "b^0_t0", "a^0_t1", "b^0_t1", "l_0"]
        );
        assert_eq!(names(&c, &blocks[1].vars), vec!["a^0_pi0", "b^0_pi0"]);
        assert_eq!(names(&c, &blocks[2].vars), vec!["a^0_pi1", "b^0_pi1"]);
        assert_eq!(names(&c, &blocks[3].vars), vec!["a^0_pi2", "b^0_pi2"]);
        let ids: Vec<u32> = blocks[0].vars.iter().map(|v| v.id()).collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn prefix_single_exists() {
        let mut c = Circuit::new();
        let blocks = build_prefix(&mut c, &parse("exists pi. a_pi").unwrap(), 1, 1);
        assert_eq!(blocks.len(), 2);
        assert_eq!(names(&c, &blocks[0].vars), vec!["a^0_t0", "l_0"]);
        assert_eq!(names(&c, &blocks[1].vars), vec!["a^0_pi"]);
    }

    #[test]
    fn premise_of_example_one() {
        let aps = vec!["a".to_string(), "b".to_string()];
        let mut c = Circuit::new();
        let g = build_linking_premise(&mut c, &QuantGroup::forall(["pi0"]), 2, 1, &aps);

        let mut expected = Circuit::new();
        let eq = |c: &mut Circuit, ap: &str, t: usize| {
            let x = c.prop_lit(PropVar::ap_step(Owner::Trace(t), ap, 0), true);
            let y = c.prop_lit(PropVar::ap_step(Owner::Var("pi0".into()), ap, 0), true);
            c.iff(x, y)
        };
        let (a0, b0) = (eq(&mut expected, "a", 0), eq(&mut expected, "b", 0));
        let (a1, b1) = (eq(&mut expected, "a", 1), eq(&mut expected, "b", 1));
        let t0 = expected.and([a0, b0]);
        let t1 = expected.and([a1, b1]);
        let e = expected.or([t0, t1]);

        // same structure up to node numbering: compare under all 2^6 assignments
        let vars: Vec<PropVar> = c.vars().iter().map(|(_, p)| p.clone()).collect();
        for bits in 0u32..64 {
            let asg: HashMap<PropVar, bool> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), bits >> i & 1 == 1))
                .collect();
            assert_eq!(substitute(&c, g, &asg), substitute(&expected, e, &asg));
        }
        assert_eq!(c.cone_size(g), expected.cone_size(e));
    }

    #[test]
    fn premise_counts_biconditionals() {
        let aps = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        for (vars, m, k) in [(1usize, 1usize, 1usize), (2, 3, 2), (3, 2, 3)] {
            let mut c = Circuit::new();
            let names: Vec<String> = (0..vars).map(|i| format!("p{i}")).collect();
            let g = build_linking_premise(&mut c, &QuantGroup::forall(names), m, k, &aps);
            // a biconditional is an And of the two implications
            let mut seen = std::collections::HashSet::new();
            let mut stack = vec![g];
            let mut bicond = 0;
            while let Some(x) = stack.pop() {
                if !seen.insert(x) {
                    continue;
                }
                if let Node::And(xs) = c.node(x) {
                    let is_iff = xs.len() == 2
                        && xs.iter().all(|y| {
                            matches!(c.node(*y), Node::Or(zs) if zs.len() == 2
                            && zs.iter().all(|z| matches!(c.node(*z), Node::Lit(..))))
                        });
                    if is_iff {
                        bicond += 1;
                        continue;
                    }
                }
                match c.node(x) {
                    Node::And(xs) | Node::Or(xs) => stack.extend(xs.iter().copied()),
                    Node::Not(y) => stack.push(*y),
                    _ => {}
                }
            }
            assert_eq!(bicond, vars * m * aps.len() * k);
        }
    }

    #[test]
    fn merged_blocks_alternate() {
        let f = parse("exists p. exists q. forall r. a_p & a_q & a_r").unwrap();
        let inst = QbfInstance::build(&f, 1, 1).unwrap();
        assert_eq!(inst.blocks.len(), 5);
        let merged = inst.merged_blocks();
        let q: Vec<_> = merged.iter().map(|b| b.quantifier).collect();
        use Quantifier::*;
        assert_eq!(q, vec![Exists, Forall, Exists]);
    }
}
