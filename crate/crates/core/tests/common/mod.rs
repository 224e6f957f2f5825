#![allow(dead_code)]

use std::collections::BTreeSet;

use hyperqsat::formula::{Formula, LassoTrace, Letter, Ltl, Model, Quantifier};
use hyperqsat::random::{gen_random, PrefixShape, RandomSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random formula with a random prefix of `1..=max_vars` variables.
pub fn small_formula(seed: u64, max_size: usize, n_aps: usize, max_vars: usize) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n_vars = rng.gen_range(1..=max_vars);
    let groups = (0..n_vars)
        .map(|_| {
            let q = if rng.gen_bool(0.5) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            (q, 1)
        })
        .collect();
    gen_random(&RandomSpec {
        seed,
        size: rng.gen_range(1..=max_size),
        n_aps,
        prefix: PrefixShape::Groups(groups),
    })
}

pub fn ap_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i}")).collect()
}

fn letter_from_bits(aps: &[String], bits: usize) -> Letter {
    aps.iter()
        .enumerate()
        .filter(|(i, _)| bits >> i & 1 == 1)
        .map(|(_, a)| a.clone())
        .collect()
}

/// Every lasso with the given stem and loop lengths over `aps`.
pub fn all_traces(aps: &[String], stem: usize, cycle: usize) -> Vec<LassoTrace> {
    let per = 1usize << aps.len();
    let len = stem + cycle;
    let total = per.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut letters = Vec::with_capacity(len);
            for _ in 0..len {
                letters.push(letter_from_bits(aps, code % per));
                code /= per;
            }
            let cycle_part = letters.split_off(stem);
            LassoTrace::new(letters, cycle_part).unwrap()
        })
        .collect()
}

/// Every model of `m` traces (as multisets) of the given shape.
pub fn all_models(aps: &[String], m: usize, stem: usize, cycle: usize) -> Vec<Model> {
    let traces = all_traces(aps, stem, cycle);
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        out.push(Model::new(idx.iter().map(|&i| traces[i].clone()).collect()).unwrap());
        // next non-decreasing index tuple
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 < traces.len() {
                idx[pos] += 1;
                for j in pos + 1..m {
                    idx[j] = idx[pos];
                }
                break;
            }
        }
    }
}

pub fn random_model(rng: &mut impl Rng, aps: &[String], m: usize, stem: usize, cycle: usize) -> Model {
    let traces = (0..m)
        .map(|_| {
            let mut letter = || letter_from_bits(aps, rng.gen_range(0..1usize << aps.len()));
            let s = (0..stem).map(|_| letter()).collect();
            let c = (0..cycle).map(|_| letter()).collect();
            LassoTrace::new(s, c).unwrap()
        })
        .collect();
    Model::new(traces).unwrap()
}

/// Truth of `f` at position `i`, computed straight from the definitions of
/// the operators on infinite words. All bound traces share `stem` and
/// `cycle` lengths, so positions `stem + cycle` steps apart agree and any
/// search for a witness position can stop after that many steps.
pub fn naive_holds(f: &Ltl, binding: &[(&str, &LassoTrace)], i: usize) -> bool {
    let t0 = binding[0].1;
    let horizon = t0.stem().len() + t0.cycle().len();
    let at = |g: &Ltl, j: usize| naive_holds(g, binding, j);
    match f {
        Ltl::True => true,
        Ltl::False => false,
        Ltl::Atom { ap, var } => {
            let t = binding.iter().find(|(v, _)| v == var).unwrap().1;
            t.letter_at(i).contains(ap)
        }
        Ltl::Not(a) => !at(a, i),
        Ltl::And(a, b) => at(a, i) && at(b, i),
        Ltl::Or(a, b) => at(a, i) || at(b, i),
        Ltl::Implies(a, b) => !at(a, i) || at(b, i),
        Ltl::Iff(a, b) => at(a, i) == at(b, i),
        Ltl::Next(a) => at(a, i + 1),
        Ltl::Finally(a) => (i..=i + horizon).any(|j| at(a, j)),
        Ltl::Globally(a) => (i..=i + horizon).all(|j| at(a, j)),
        Ltl::Until(a, b) => {
            for j in i..=i + horizon {
                if at(b, j) {
                    return true;
                }
                if !at(a, j) {
                    return false;
                }
            }
            false
        }
        Ltl::WeakUntil(a, b) => {
            for j in i..=i + horizon {
                if at(b, j) {
                    return true;
                }
                if !at(a, j) {
                    return false;
                }
            }
            true
        }
        Ltl::Release(a, b) => {
            for j in i..=i + horizon {
                if !at(b, j) {
                    return false;
                }
                if at(a, j) {
                    return true;
                }
            }
            true
        }
    }
}

/// Quantifier expansion over the model's traces using [`naive_holds`].
pub fn naive_eval(model: &Model, f: &Formula) -> bool {
    let vars: Vec<(Quantifier, String)> = f.trace_vars().map(|(q, v)| (q, v.to_string())).collect();
    fn go<'a>(
        model: &'a Model,
        body: &Ltl,
        vars: &'a [(Quantifier, String)],
        binding: &mut Vec<(&'a str, &'a LassoTrace)>,
    ) -> bool {
        let Some(((q, v), rest)) = vars.split_first() else {
            return naive_holds(body, binding, 0);
        };
        let mut results = model.traces().iter().map(|t| {
            binding.push((v.as_str(), t));
            let r = go(model, body, rest, binding);
            binding.pop();
            r
        });
        match q {
            Quantifier::Forall => results.all(|r| r),
            Quantifier::Exists => results.any(|r| r),
        }
    }
    go(model, f.body(), &vars, &mut Vec::new())
}

pub fn trace_set(model: &Model) -> BTreeSet<LassoTrace> {
    model.traces().iter().cloned().collect()
}
