//! Bounded unrolling of an NNF body into a propositional circuit over
//! `(k, l)`-lasso traces: `k` steps per trace, with a single one-hot loop
//! selector shared by all traces choosing the loop-back step `l`.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::Ltl;
use crate::prop::{Circuit, Gate, Owner, PropVar, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnrollError {
    #[error("body is not in negation normal form at `{0}`")]
    NotNnf(String),
    #[error("unroll bound must be at least 1")]
    ZeroBound,
}

/// Exactly-one constraint over the loop selectors `l_0..l_{k-1}`.
pub fn loop_constraint(c: &mut Circuit, k: usize) -> Gate {
    assert!(k >= 1, "unroll bound must be at least 1");
    let sels: Vec<Gate> = (0..k)
        .map(|j| c.prop_lit(PropVar::LoopSel(j), true))
        .collect();
    if k == 1 {
        return sels[0];
    }
    let mut parts = vec![c.or(sels.iter().copied())];
    for i in 0..k {
        for j in i + 1..k {
            let both = c.and([sels[i], sels[j]]);
            parts.push(c.not(both));
        }
    }
    c.and(parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum NNode {
    True,
    False,
    Lit { ap: u32, var: u32, positive: bool },
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

/// Hash-consed NNF body with per-node free-variable slots.
#[derive(Debug)]
struct NnfDag {
    nodes: Vec<NNode>,
    free: Vec<Vec<u32>>,
    aps: Vec<String>,
    vars: Vec<String>,
    root: u32,
}

impl NnfDag {
    fn build(body: &Ltl) -> Result<NnfDag, UnrollError> {
        struct B {
            nodes: Vec<NNode>,
            free: Vec<Vec<u32>>,
            cons: HashMap<NNode, u32>,
            aps: Vec<String>,
            vars: Vec<String>,
        }
        impl B {
            fn slot(names: &mut Vec<String>, name: &str) -> u32 {
                match names.iter().position(|n| n == name) {
                    Some(i) => i as u32,
                    None => {
                        names.push(name.to_string());
                        names.len() as u32 - 1
                    }
                }
            }
            fn add(&mut self, n: NNode) -> u32 {
                if let Some(&id) = self.cons.get(&n) {
                    return id;
                }
                let free = match n {
                    NNode::True | NNode::False => vec![],
                    NNode::Lit { var, .. } => vec![var],
                    NNode::Next(a) => self.free[a as usize].clone(),
                    NNode::And(a, b)
                    | NNode::Or(a, b)
                    | NNode::Until(a, b)
                    | NNode::Release(a, b) => {
                        let mut f = self.free[a as usize].clone();
                        f.extend(&self.free[b as usize]);
                        f.sort_unstable();
                        f.dedup();
                        f
                    }
                };
                let id = self.nodes.len() as u32;
                self.nodes.push(n);
                self.free.push(free);
                self.cons.insert(n, id);
                id
            }
            fn go(&mut self, f: &Ltl) -> Result<u32, UnrollError> {
                let n = match f {
                    Ltl::True => NNode::True,
                    Ltl::False => NNode::False,
                    Ltl::Atom { ap, var } => NNode::Lit {
                        ap: Self::slot(&mut self.aps, ap),
                        var: Self::slot(&mut self.vars, var),
                        positive: true,
                    },
                    Ltl::Not(inner) => match &**inner {
                        Ltl::Atom { ap, var } => NNode::Lit {
                            ap: Self::slot(&mut self.aps, ap),
                            var: Self::slot(&mut self.vars, var),
                            positive: false,
                        },
                        _ => return Err(UnrollError::NotNnf(f.to_string())),
                    },
                    Ltl::And(a, b) => NNode::And(self.go(a)?, self.go(b)?),
                    Ltl::Or(a, b) => NNode::Or(self.go(a)?, self.go(b)?),
                    Ltl::Next(a) => NNode::Next(self.go(a)?),
                    Ltl::Until(a, b) => NNode::Until(self.go(a)?, self.go(b)?),
                    Ltl::Release(a, b) => NNode::Release(self.go(a)?, self.go(b)?),
                    Ltl::Implies(..)
                    | Ltl::Iff(..)
                    | Ltl::Finally(..)
                    | Ltl::Globally(..)
                    | Ltl::WeakUntil(..) => return Err(UnrollError::NotNnf(f.to_string())),
                };
                Ok(self.add(n))
            }
        }
        let mut b = B {
            nodes: Vec::new(),
            free: Vec::new(),
            cons: HashMap::new(),
            aps: Vec::new(),
            vars: Vec::new(),
        };
        let root = b.go(body)?;
        Ok(NnfDag {
            nodes: b.nodes,
            free: b.free,
            aps: b.aps,
            vars: b.vars,
            root,
        })
    }
}

// Owners are packed into u32 codes: candidate traces keep their index,
// trace variables set the top bit over their slot.
const VAR_BIT: u32 = 1 << 31;

/// Memoizing encoder for one NNF body at a fixed bound `k`.
///
/// Node, step, loop position and owner codes of the free variables.
type MemoKey = (u32, u32, u32, Box<[u32]>);

/// `Enc(φ, i, l)` is the truth of `φ` at step `i` of the lasso whose loop
/// returns from step `k-1` to step `l`. A binding maps each trace variable
/// of the body to an [`Owner`]; memo entries are keyed by the node, the step,
/// the loop position and the owners of the node's free variables only.
#[derive(Debug)]
pub struct Unroller {
    dag: NnfDag,
    k: usize,
    memo: HashMap<MemoKey, Gate>,
    var_cache: HashMap<(u32, u32, u32), Var>,
}

impl Unroller {
    pub fn new(body: &Ltl, k: usize) -> Result<Unroller, UnrollError> {
        if k == 0 {
            return Err(UnrollError::ZeroBound);
        }
        Ok(Unroller {
            dag: NnfDag::build(body)?,
            k,
            memo: HashMap::new(),
            var_cache: HashMap::new(),
        })
    }

    pub fn bound(&self) -> usize {
        self.k
    }

    /// Trace variables of the body in first-occurrence order; bindings are
    /// indexed by this order.
    pub fn trace_vars(&self) -> &[String] {
        &self.dag.vars
    }

    /// Number of distinct subformulas.
    pub fn dag_size(&self) -> usize {
        self.dag.nodes.len()
    }

    /// Number of memoized `(subformula, step, loop, owners)` entries.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Encodes the body at step `i` for loop position `l` under `binding`
    /// (one owner per entry of [`Unroller::trace_vars`]).
    pub fn encode(&mut self, c: &mut Circuit, i: usize, l: usize, binding: &[Owner]) -> Gate {
        let codes = self.codes(binding);
        self.encode_codes(c, i, l, &codes)
    }

    fn codes(&self, binding: &[Owner]) -> Vec<u32> {
        assert_eq!(binding.len(), self.dag.vars.len(), "binding arity");
        binding
            .iter()
            .map(|o| match o {
                Owner::Trace(t) => *t as u32,
                Owner::Var(name) => {
                    let slot =
                        self.dag
                            .vars
                            .iter()
                            .position(|v| v == name)
                            .expect("binding names a body variable") as u32;
                    VAR_BIT | slot
                }
            })
            .collect()
    }

    pub(crate) fn encode_codes(
        &mut self,
        c: &mut Circuit,
        i: usize,
        l: usize,
        codes: &[u32],
    ) -> Gate {
        self.enc(c, self.dag.root, i, l, codes)
    }

    /// Binding of every body variable to itself.
    pub(crate) fn identity_codes(&self) -> Vec<u32> {
        (0..self.dag.vars.len() as u32)
            .map(|s| VAR_BIT | s)
            .collect()
    }

    fn succ(&self, i: usize, l: usize) -> usize {
        if i + 1 < self.k {
            i + 1
        } else {
            l
        }
    }

    fn step_var(&mut self, c: &mut Circuit, ap: u32, code: u32, step: usize) -> Var {
        let key = (ap, code, step as u32);
        if let Some(&v) = self.var_cache.get(&key) {
            return v;
        }
        let owner = if code & VAR_BIT != 0 {
            Owner::Var(self.dag.vars[(code & !VAR_BIT) as usize].clone())
        } else {
            Owner::Trace(code as usize)
        };
        let v = c.var(PropVar::ap_step(
            owner,
            self.dag.aps[ap as usize].clone(),
            step,
        ));
        self.var_cache.insert(key, v);
        v
    }

    fn enc(&mut self, c: &mut Circuit, node: u32, i: usize, l: usize, codes: &[u32]) -> Gate {
        let key_owners: Box<[u32]> = self.dag.free[node as usize]
            .iter()
            .map(|&s| codes[s as usize])
            .collect();
        let key = (node, i as u32, l as u32, key_owners);
        if let Some(&g) = self.memo.get(&key) {
            return g;
        }
        let g = match self.dag.nodes[node as usize] {
            NNode::True => Gate::TRUE,
            NNode::False => Gate::FALSE,
            NNode::Lit { ap, var, positive } => {
                let v = self.step_var(c, ap, codes[var as usize], i);
                c.lit(v, positive)
            }
            NNode::And(a, b) => {
                let ga = self.enc(c, a, i, l, codes);
                let gb = self.enc(c, b, i, l, codes);
                c.and([ga, gb])
            }
            NNode::Or(a, b) => {
                let ga = self.enc(c, a, i, l, codes);
                let gb = self.enc(c, b, i, l, codes);
                c.or([ga, gb])
            }
            NNode::Next(a) => {
                let j = self.succ(i, l);
                self.enc(c, a, j, l, codes)
            }
            NNode::Until(a, b) => self.until(c, a, b, i, l, codes),
            NNode::Release(a, b) => self.release(c, a, b, i, l, codes),
        };
        self.memo.insert(key, g);
        g
    }

    // ⋁_{n=i}^{k-1} (ψ_n ∧ ⋀_{m=i}^{n-1} φ_m)
    //   ∨ ⋁_{n=l}^{i-1} (ψ_n ∧ ⋀_{m=i}^{k-1} φ_m ∧ ⋀_{m=l}^{n-1} φ_m)
    fn until(
        &mut self,
        c: &mut Circuit,
        a: u32,
        b: u32,
        i: usize,
        l: usize,
        codes: &[u32],
    ) -> Gate {
        let mut terms = Vec::new();
        let mut run = Gate::TRUE;
        let steps: Vec<usize> = (i..self.k).chain(if l < i { l..i } else { 0..0 }).collect();
        for n in steps {
            let psi = self.enc(c, b, n, l, codes);
            terms.push(c.and([run, psi]));
            let phi = self.enc(c, a, n, l, codes);
            run = c.and([run, phi]);
        }
        c.or(terms)
    }

    // Propositional dual of the until rule for ¬φ U ¬ψ.
    fn release(
        &mut self,
        c: &mut Circuit,
        a: u32,
        b: u32,
        i: usize,
        l: usize,
        codes: &[u32],
    ) -> Gate {
        let mut terms = Vec::new();
        let mut run = Gate::FALSE;
        let steps: Vec<usize> = (i..self.k).chain(if l < i { l..i } else { 0..0 }).collect();
        for n in steps {
            let psi = self.enc(c, b, n, l, codes);
            terms.push(c.or([run, psi]));
            let phi = self.enc(c, a, n, l, codes);
            run = c.or([run, phi]);
        }
        c.and(terms)
    }
}

/// `⋁_l (l_l ∧ Enc(body, 0, l))` with every trace variable owning its own
/// step variables.
pub fn unroll_body(c: &mut Circuit, body: &Ltl, k: usize) -> Result<Gate, UnrollError> {
    let mut u = Unroller::new(body, k)?;
    let codes = u.identity_codes();
    let mut cases = Vec::with_capacity(k);
    for l in 0..k {
        let sel = c.prop_lit(PropVar::LoopSel(l), true);
        let enc = u.encode_codes(c, 0, l, &codes);
        cases.push(c.and([sel, enc]));
    }
    Ok(c.or(cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{nnf, parse};
    use crate::prop::{substitute, Node};

    fn sel_assignment(k: usize, l: usize) -> HashMap<PropVar, bool> {
        (0..k).map(|j| (PropVar::LoopSel(j), j == l)).collect()
    }

    #[test]
    fn loop_constraint_shapes() {
        let mut c = Circuit::new();
        let g = loop_constraint(&mut c, 1);
        assert_eq!(
            c.node(g),
            &Node::Lit(c.vars().get(&PropVar::LoopSel(0)).unwrap(), true)
        );

        let mut c = Circuit::new();
        let g = loop_constraint(&mut c, 2);
        let l0 = c.prop_lit(PropVar::LoopSel(0), true);
        let l1 = c.prop_lit(PropVar::LoopSel(1), true);
        let alo = c.or([l0, l1]);
        let both = c.and([l0, l1]);
        let amo = c.not(both);
        assert_eq!(g, c.and([alo, amo]));
        let mut asg = sel_assignment(2, 0);
        asg.insert(PropVar::LoopSel(1), true);
        assert_eq!(substitute(&c, g, &asg), Ok(false));
    }

    #[test]
    fn loop_constraint_counts_one_hot() {
        let mut c = Circuit::new();
        let g = loop_constraint(&mut c, 4);
        let sat = (0u32..16)
            .filter(|bits| {
                let asg = (0..4)
                    .map(|j| (PropVar::LoopSel(j), bits >> j & 1 == 1))
                    .collect();
                substitute(&c, g, &asg).unwrap()
            })
            .count();
        assert_eq!(sat, 4);
    }

    #[test]
    fn atom_at_bound_one() {
        let mut c = Circuit::new();
        let f = parse("forall pi. a_pi").unwrap();
        let g = unroll_body(&mut c, f.body(), 1).unwrap();
        let l0 = c.prop_lit(PropVar::LoopSel(0), true);
        let a0 = c.prop_lit(PropVar::ap_step(Owner::Var("pi".into()), "a", 0), true);
        assert_eq!(g, c.and([l0, a0]));
    }

    #[test]
    fn next_wraps_to_loop() {
        let mut c = Circuit::new();
        let f = parse("forall pi. X a_pi").unwrap();
        let mut u = Unroller::new(f.body(), 1).unwrap();
        let g = u.encode(&mut c, 0, 0, &[Owner::Var("pi".into())]);
        let a0 = c.prop_lit(PropVar::ap_step(Owner::Var("pi".into()), "a", 0), true);
        assert_eq!(g, a0);
    }

    #[test]
    fn rejects_non_nnf() {
        let f = parse("forall pi. ~(a_pi & b_pi)").unwrap();
        assert!(matches!(
            unroll_body(&mut Circuit::new(), f.body(), 2),
            Err(UnrollError::NotNnf(_))
        ));
        let f = parse("forall pi. G a_pi").unwrap();
        assert!(matches!(
            unroll_body(&mut Circuit::new(), f.body(), 2),
            Err(UnrollError::NotNnf(_))
        ));
        assert!(unroll_body(&mut Circuit::new(), &nnf(f.body()), 2).is_ok());
        assert_eq!(
            unroll_body(&mut Circuit::new(), &nnf(f.body()), 0),
            Err(UnrollError::ZeroBound)
        );
    }

    #[test]
    fn memo_is_bounded() {
        let f = parse("forall p q. G(a_p -> F b_q) U (X a_q R (b_p | X X a_p))").unwrap();
        let body = nnf(f.body());
        for k in 1..=5 {
            let mut c = Circuit::new();
            let mut u = Unroller::new(&body, k).unwrap();
            let codes = u.identity_codes();
            for l in 0..k {
                u.encode_codes(&mut c, 0, l, &codes);
            }
            assert!(u.memo_len() <= u.dag_size() * k * k);
        }
    }
}
