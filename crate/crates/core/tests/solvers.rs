//! Builtin SAT search, quantifier expansion, the reference QBF search and
//! model decoding against enumeration.

mod common;

use std::collections::{BTreeMap, HashMap};

use common::*;
use hyperqsat::formula::{eval, Model};
use hyperqsat::prop::{substitute, Circuit, Gate, PropVar};
use hyperqsat::qbf::{parse_qdimacs, QbfInstance};
use hyperqsat::solve::qsearch::{solve_qdimacs, QsearchOutcome};
use hyperqsat::solve::{
    decode_model, encode_model, expand_to_sat, solve_builtin, PropFormula, SolveOutcome,
    DEFAULT_EXPANSION_CAP,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_prop(rng: &mut impl Rng, n_vars: usize) -> PropFormula {
    let mut c = Circuit::new();
    let outer: Vec<_> = (0..n_vars).map(|i| c.var(PropVar::LoopSel(i))).collect();
    let mut pool: Vec<Gate> = outer
        .iter()
        .map(|&v| c.lit(v, rng.gen_bool(0.5)))
        .collect();
    // a random clause-ish structure: conjunction of small disjunctions and
    // some deeper gates
    let mut conj = Vec::new();
    for _ in 0..rng.gen_range(1..3 * n_vars + 2) {
        let width = rng.gen_range(1..4);
        let lits: Vec<Gate> = (0..width)
            .map(|_| {
                let g = pool[rng.gen_range(0..pool.len())];
                if rng.gen_bool(0.5) { c.not(g) } else { g }
            })
            .collect();
        let g = match rng.gen_range(0..4) {
            0 => c.and(lits),
            1 => {
                let (a, b) = (lits[0], *lits.last().unwrap());
                c.iff(a, b)
            }
            _ => c.or(lits),
        };
        pool.push(g);
        conj.push(g);
    }
    let root = c.and(conj);
    PropFormula { circuit: c, root, outer }
}

fn truth_table_sat(p: &PropFormula) -> bool {
    let n = p.outer.len();
    (0u32..1 << n).any(|bits| p.circuit.evaluate(p.root, |v| Some(bits >> v.index() & 1 == 1)).unwrap())
}

#[test]
fn builtin_agrees_with_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sat = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=14);
        let p = random_prop(&mut rng, n);
        let expected = truth_table_sat(&p);
        let got = solve_builtin(&p, None);
        match &got {
            SolveOutcome::Sat(asg) => {
                sat += 1;
                assert_eq!(asg.len(), n);
                let asg: HashMap<PropVar, bool> = asg.clone().into_iter().collect();
                assert!(substitute(&p.circuit, p.root, &asg).unwrap());
            }
            SolveOutcome::Unsat => {}
            SolveOutcome::Unknown(r) => panic!("{r}"),
        }
        assert_eq!(got.is_sat(), expected);
        assert_eq!(solve_builtin(&p, None), got, "search is deterministic");
    }
    // both verdicts are exercised
    assert!(sat > 50 && sat < 450, "{sat}");
}

/// All outer assignments with exactly one loop selector set.
fn outer_assignments(aps: &[String], m: usize, k: usize) -> Vec<BTreeMap<PropVar, bool>> {
    let mut vars = Vec::new();
    for t in 0..m {
        for ap in aps {
            for j in 0..k {
                vars.push(PropVar::ap_step(hyperqsat::prop::Owner::Trace(t), ap.as_str(), j));
            }
        }
    }
    let mut out = Vec::new();
    for l in 0..k {
        for bits in 0u64..1 << vars.len() {
            let mut asg: BTreeMap<PropVar, bool> =
                vars.iter().enumerate().map(|(i, v)| (v.clone(), bits >> i & 1 == 1)).collect();
            for j in 0..k {
                asg.insert(PropVar::LoopSel(j), j == l);
            }
            out.push(asg);
        }
    }
    out
}

#[test]
fn expansion_agrees_with_enumerated_models() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let f = small_formula(seed, 14, 2, 3);
        let m = 1 + (seed as usize % 2);
        let k = 1 + (seed as usize / 2 % 2);
        let aps = f.aps();
        let p = expand_to_sat(&f, m, k, DEFAULT_EXPANSION_CAP).unwrap();
        let mut any = false;
        for outer in outer_assignments(&aps, m, k) {
            let model = decode_model(&outer, &aps, m, k).unwrap();
            let expected = eval(&model, &f).unwrap();
            let asg: HashMap<PropVar, bool> = outer.into_iter().collect();
            let got = substitute(&p.circuit, p.root, &asg).unwrap();
            assert_eq!(got, expected, "{f} at m={m}, k={k}\n{model}");
            any |= expected;
        }
        assert_eq!(solve_builtin(&p, None).is_sat(), any, "{f}");
        checked += 1;
    }
    assert_eq!(checked, 200);
}

#[test]
fn qbf_search_agrees_with_expansion() {
    for seed in 0..150u64 {
        let f = small_formula(seed, 12, 2, 2);
        let (m, k) = (1 + seed as usize % 2, 1 + (seed as usize / 2) % 2);
        let inst = QbfInstance::build(&f, m, k).unwrap();
        let q = parse_qdimacs(&inst.to_qdimacs()).unwrap();
        let qbf = solve_qdimacs(&q, None);
        let exp = solve_builtin(&expand_to_sat(&f, m, k, DEFAULT_EXPANSION_CAP).unwrap(), None);
        assert_eq!(matches!(qbf, QsearchOutcome::Sat(_)), exp.is_sat(), "{f} m={m} k={k}");
        if let QsearchOutcome::Sat(cert) = qbf {
            let outer = cert
                .iter()
                .map(|&l| (inst.vars.prop(hyperqsat::prop::Var::from_id(l.unsigned_abs())).clone(), l > 0))
                .collect();
            let model = decode_model(&outer, &f.aps(), m, k).unwrap();
            assert!(eval(&model, &f).unwrap(), "{f}\n{model}");
        }
    }
}

proptest! {
    #[test]
    fn decode_inverts_encode(seed in any::<u64>(), m in 1usize..4, l in 0usize..3, q in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let aps = ap_names(2);
        let model: Model = random_model(&mut rng, &aps, m, l, q);
        let outer = encode_model(&model, &aps);
        prop_assert_eq!(outer.len(), m * aps.len() * (l + q) + l + q);
        let back = decode_model(&outer, &aps, m, l + q).unwrap();
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(encode_model(&back, &aps), outer);
    }
}

#[test]
fn example_one_expansions() {
    let f = hyperqsat::formula::parse(hyperqsat::policies::EXAMPLE).unwrap();
    let one = expand_to_sat(&f, 1, 1, DEFAULT_EXPANSION_CAP).unwrap();
    assert_eq!(solve_builtin(&one, None), SolveOutcome::Unsat);
    let two = expand_to_sat(&f, 2, 1, DEFAULT_EXPANSION_CAP).unwrap();
    let SolveOutcome::Sat(outer) = solve_builtin(&two, None) else {
        panic!("two traces suffice")
    };
    let model = decode_model(&outer, &f.aps(), 2, 1).unwrap();
    assert!(eval(&model, &f).unwrap());
    assert_eq!(trace_set(&model).len(), 2);
}
