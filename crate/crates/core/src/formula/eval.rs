//! Reference semantics over lasso-trace models.
//!
//! All traces of a model share stem length `p` and loop length `q`, so any
//! tuple of them forms a single ultimately periodic word whose `p + q`
//! distinguished positions carry every truth value. Temporal operators are
//! computed bottom-up on those positions; `U`/`F` take the least and
//! `R`/`W`/`G` the greatest fixpoint over the loop.

use std::collections::HashMap;

use super::ast::{Formula, Ltl, Quantifier};
use super::model::{LassoTrace, Model};
use super::FormulaError;

#[derive(Clone, Copy, Debug)]
enum Node {
    True,
    False,
    Atom { bit: Option<u32>, var: usize },
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Finally(usize),
    Globally(usize),
    Until(usize, usize),
    WeakUntil(usize, usize),
    Release(usize, usize),
}

/// Post-order node list with atoms resolved to AP bits and variable slots.
struct Compiled {
    nodes: Vec<Node>,
}

impl Compiled {
    fn new(
        body: &Ltl,
        aps: &HashMap<&str, u32>,
        vars: &HashMap<&str, usize>,
    ) -> Result<Compiled, FormulaError> {
        let mut nodes = Vec::new();
        compile(body, aps, vars, &mut nodes)?;
        Ok(Compiled { nodes })
    }
}

fn compile(
    f: &Ltl,
    aps: &HashMap<&str, u32>,
    vars: &HashMap<&str, usize>,
    out: &mut Vec<Node>,
) -> Result<usize, FormulaError> {
    let un = |a: &Ltl, out: &mut Vec<Node>| compile(a, aps, vars, out);
    let node = match f {
        Ltl::True => Node::True,
        Ltl::False => Node::False,
        Ltl::Atom { ap, var } => Node::Atom {
            bit: aps.get(ap.as_str()).copied(),
            var: *vars
                .get(var.as_str())
                .ok_or_else(|| FormulaError::UnboundVar(var.clone()))?,
        },
        Ltl::Not(a) => Node::Not(un(a, out)?),
        Ltl::Next(a) => Node::Next(un(a, out)?),
        Ltl::Finally(a) => Node::Finally(un(a, out)?),
        Ltl::Globally(a) => Node::Globally(un(a, out)?),
        Ltl::And(a, b) => Node::And(un(a, out)?, un(b, out)?),
        Ltl::Or(a, b) => Node::Or(un(a, out)?, un(b, out)?),
        Ltl::Implies(a, b) => Node::Implies(un(a, out)?, un(b, out)?),
        Ltl::Iff(a, b) => Node::Iff(un(a, out)?, un(b, out)?),
        Ltl::Until(a, b) => Node::Until(un(a, out)?, un(b, out)?),
        Ltl::WeakUntil(a, b) => Node::WeakUntil(un(a, out)?, un(b, out)?),
        Ltl::Release(a, b) => Node::Release(un(a, out)?, un(b, out)?),
    };
    out.push(node);
    Ok(out.len() - 1)
}

/// Letters of one trace at the `p + q` distinguished positions, as AP bitmasks.
fn trace_masks(t: &LassoTrace, aps: &HashMap<&str, u32>) -> Vec<u64> {
    t.stem()
        .iter()
        .chain(LassoTrace::cycle(t))
        .map(|letter| {
            letter
                .iter()
                .filter_map(|ap| aps.get(ap.as_str()))
                .fold(0u64, |m, bit| m | (1 << bit))
        })
        .collect()
}

/// Evaluator for one compiled body over words of shape `(p, q)`.
struct Lasso {
    p: usize,
    n: usize,
}

impl Lasso {
    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.n {
            i + 1
        } else {
            self.p
        }
    }

    /// Solves `out[i] = step(i, out[succ(i)])`, seeding the loop with `seed`
    /// (false for least, true for greatest fixpoint).
    fn fixpoint(&self, seed: bool, out: &mut [bool], step: impl Fn(usize, bool) -> bool) {
        out[self.p..self.n].fill(seed);
        loop {
            let mut changed = false;
            for i in (self.p..self.n).rev() {
                let v = step(i, out[self.succ(i)]);
                if v != out[i] {
                    out[i] = v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in (0..self.p).rev() {
            out[i] = step(i, out[i + 1]);
        }
    }

    /// Truth values of every node at every distinguished position, given the
    /// letter masks bound to each variable slot.
    fn run(&self, c: &Compiled, bound: &[&[u64]], vals: &mut Vec<bool>) {
        let n = self.n;
        vals.clear();
        vals.resize(c.nodes.len() * n, false);
        for (idx, node) in c.nodes.iter().enumerate() {
            let (done, rest) = vals.split_at_mut(idx * n);
            let out = &mut rest[..n];
            let get = |k: usize| &done[k * n..(k + 1) * n];
            match *node {
                Node::True => out.fill(true),
                Node::False => out.fill(false),
                Node::Atom { bit, var } => {
                    let masks = bound[var];
                    for i in 0..n {
                        out[i] = bit.is_some_and(|b| masks[i] >> b & 1 == 1);
                    }
                }
                Node::Not(a) => {
                    for (o, x) in out.iter_mut().zip(get(a)) {
                        *o = !x;
                    }
                }
                Node::And(a, b) => pointwise(out, get(a), get(b), |x, y| x && y),
                Node::Or(a, b) => pointwise(out, get(a), get(b), |x, y| x || y),
                Node::Implies(a, b) => pointwise(out, get(a), get(b), |x, y| !x || y),
                Node::Iff(a, b) => pointwise(out, get(a), get(b), |x, y| x == y),
                Node::Next(a) => {
                    let a = get(a);
                    for i in 0..n {
                        out[i] = a[self.succ(i)];
                    }
                }
                Node::Finally(a) => {
                    let a = get(a);
                    self.fixpoint(false, out, |i, next| a[i] || next);
                }
                Node::Globally(a) => {
                    let a = get(a);
                    self.fixpoint(true, out, |i, next| a[i] && next);
                }
                Node::Until(a, b) => {
                    let (a, b) = (get(a), get(b));
                    self.fixpoint(false, out, |i, next| b[i] || (a[i] && next));
                }
                Node::WeakUntil(a, b) => {
                    let (a, b) = (get(a), get(b));
                    self.fixpoint(true, out, |i, next| b[i] || (a[i] && next));
                }
                Node::Release(a, b) => {
                    let (a, b) = (get(a), get(b));
                    self.fixpoint(true, out, |i, next| b[i] && (a[i] || next));
                }
            }
        }
    }
}

fn pointwise(out: &mut [bool], a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) {
    for i in 0..out.len() {
        out[i] = op(a[i], b[i]);
    }
}

fn ap_index(aps: &[String]) -> Result<HashMap<&str, u32>, FormulaError> {
    if aps.len() > 64 {
        return Err(FormulaError::TooManyAps(aps.len()));
    }
    Ok(aps
        .iter()
        .enumerate()
        .map(|(i, ap)| (ap.as_str(), i as u32))
        .collect())
}

fn body_aps(body: &Ltl) -> Vec<String> {
    let mut aps = std::collections::BTreeSet::new();
    body.visit_atoms(&mut |ap, _| {
        aps.insert(ap.to_string());
    });
    aps.into_iter().collect()
}

/// Decides `model ⊨ f`: quantifiers range over the model's traces.
pub fn eval(model: &Model, f: &Formula) -> Result<bool, FormulaError> {
    let aps = f.aps();
    let ap_bits = ap_index(&aps)?;
    let quants: Vec<(Quantifier, &str)> = f.trace_vars().collect();
    let slots: HashMap<&str, usize> = quants
        .iter()
        .enumerate()
        .map(|(i, (_, v))| (*v, i))
        .collect();
    let compiled = Compiled::new(f.body(), &ap_bits, &slots)?;
    let masks: Vec<Vec<u64>> = model
        .traces()
        .iter()
        .map(|t| trace_masks(t, &ap_bits))
        .collect();
    let lasso = Lasso {
        p: model.stem_len(),
        n: model.stem_len() + model.loop_len(),
    };

    struct Search<'a> {
        quants: &'a [(Quantifier, &'a str)],
        masks: &'a [Vec<u64>],
        lasso: &'a Lasso,
        compiled: &'a Compiled,
        bound: Vec<&'a [u64]>,
        vals: Vec<bool>,
    }

    impl<'a> Search<'a> {
        fn go(&mut self, level: usize) -> bool {
            if level == self.quants.len() {
                let root = self.compiled.nodes.len() - 1;
                self.lasso.run(self.compiled, &self.bound, &mut self.vals);
                return self.vals[root * self.lasso.n];
            }
            let masks = self.masks;
            let want = self.quants[level].0 == Quantifier::Exists;
            for m in masks {
                self.bound[level] = m;
                if self.go(level + 1) == want {
                    return want;
                }
            }
            !want
        }
    }

    let mut search = Search {
        quants: &quants,
        masks: &masks,
        lasso: &lasso,
        compiled: &compiled,
        bound: vec![&[][..]; quants.len()],
        vals: Vec::new(),
    };
    Ok(search.go(0))
}

/// Truth of `body` at each of the `p + q` distinguished positions of the word
/// formed by binding each named trace variable to a trace. Position `p + q + i`
/// agrees with `p + (i mod q)`.
pub fn eval_body(body: &Ltl, binding: &[(&str, &LassoTrace)]) -> Result<Vec<bool>, FormulaError> {
    let (_, first) = binding.first().ok_or(FormulaError::EmptyModel)?;
    let (p, q) = (first.stem().len(), first.cycle().len());
    if binding
        .iter()
        .any(|(_, t)| t.stem().len() != p || t.cycle().len() != q)
    {
        return Err(FormulaError::NonUniformModel);
    }
    let aps = body_aps(body);
    let ap_bits = ap_index(&aps)?;
    let slots: HashMap<&str, usize> = binding
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (*v, i))
        .collect();
    let compiled = Compiled::new(body, &ap_bits, &slots)?;
    let masks: Vec<Vec<u64>> = binding
        .iter()
        .map(|(_, t)| trace_masks(t, &ap_bits))
        .collect();
    let bound: Vec<&[u64]> = masks.iter().map(Vec::as_slice).collect();
    let lasso = Lasso { p, n: p + q };
    let mut vals = Vec::new();
    lasso.run(&compiled, &bound, &mut vals);
    let root = compiled.nodes.len() - 1;
    Ok(vals[root * lasso.n..(root + 1) * lasso.n].to_vec())
}
