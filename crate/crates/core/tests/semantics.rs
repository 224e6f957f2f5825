//! The evaluator against a direct reading of the operator definitions, and
//! algebraic laws of the formula combinators.

mod common;

use common::*;
use hyperqsat::formula::{conjoin, eval, negate, nnf, parse, Formula, LassoTrace, Model};
use hyperqsat::random::{gen_random, PrefixShape, RandomSpec};
use hyperqsat::formula::Quantifier;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model_strategy(n_aps: usize) -> impl Strategy<Value = Model> {
    (1usize..=3, 0usize..=2, 1usize..=3, any::<u64>()).prop_map(move |(m, p, q, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_model(&mut rng, &ap_names(n_aps), m, p, q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eval_agrees_with_definitions(seed in any::<u64>(), model in model_strategy(2)) {
        let f = small_formula(seed, 10, 2, 3);
        prop_assert_eq!(eval(&model, &f).unwrap(), naive_eval(&model, &f), "{}\n{}", f, model);
    }

    #[test]
    fn nnf_preserves_meaning(seed in any::<u64>(), model in model_strategy(2)) {
        let f = small_formula(seed, 16, 2, 3);
        let g = Formula::new(f.prefix().to_vec(), nnf(f.body())).unwrap();
        prop_assert!(g.body().is_nnf());
        prop_assert_eq!(eval(&model, &f).unwrap(), eval(&model, &g).unwrap());
    }

    #[test]
    fn negation_is_dual(seed in any::<u64>(), model in model_strategy(2)) {
        let f = small_formula(seed, 16, 2, 3);
        prop_assert_eq!(eval(&model, &negate(&f)).unwrap(), !eval(&model, &f).unwrap());
    }

    #[test]
    fn conjunction_is_sound(s1 in any::<u64>(), s2 in any::<u64>(), model in model_strategy(2)) {
        let f = small_formula(s1, 10, 2, 2);
        let g = small_formula(s2, 10, 2, 2);
        let both = eval(&model, &f).unwrap() && eval(&model, &g).unwrap();
        prop_assert_eq!(eval(&model, &conjoin(&f, &g)).unwrap(), both);
    }

    #[test]
    fn unrolling_the_lasso_changes_nothing(seed in any::<u64>(), model in model_strategy(2),
                                           extra_stem in 0usize..3, times in 1usize..3) {
        let f = small_formula(seed, 16, 2, 3);
        let (p, q) = (model.stem_len(), model.loop_len());
        let reshaped = Model::new(
            model.traces().iter().map(|t| t.reshape(p + extra_stem, q * times)).collect(),
        ).unwrap();
        prop_assert_eq!(eval(&model, &f).unwrap(), eval(&reshaped, &f).unwrap());
    }

    #[test]
    fn duplicate_traces_change_nothing(seed in any::<u64>(), model in model_strategy(2)) {
        let f = small_formula(seed, 16, 2, 3);
        let mut traces = model.traces().to_vec();
        traces.push(traces[0].clone());
        let bigger = Model::new(traces).unwrap();
        prop_assert_eq!(eval(&model, &f).unwrap(), eval(&bigger, &f).unwrap());
        prop_assert_eq!(eval(&model, &f).unwrap(), eval(&model.dedup(), &f).unwrap());
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>(), size in 1usize..40, aps in 1usize..6) {
        let f = small_formula(seed, size, aps, 4);
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }
}

#[test]
fn thousand_large_generated_formulas_round_trip() {
    for seed in 0..1000 {
        let spec = RandomSpec {
            seed,
            size: 60,
            n_aps: 15,
            prefix: PrefixShape::Alternating {
                alternations: 49,
                start: if seed % 2 == 0 { Quantifier::Forall } else { Quantifier::Exists },
            },
        };
        let f = gen_random(&spec);
        assert_eq!(f.body().size(), 60);
        assert_eq!(f.alternations(), 49);
        let text = f.to_string();
        assert_eq!(parse(&text).unwrap(), f, "seed {seed}: {text}");
        assert_eq!(gen_random(&spec), f);
    }
}

#[test]
fn normalized_models_evaluate_like_their_parts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let aps = ap_names(2);
    for seed in 0..200 {
        let f = small_formula(seed, 12, 2, 2);
        let traces: Vec<LassoTrace> = (0..2)
            .map(|_| {
                let (p, q) = (rng.gen_range(0..3), rng.gen_range(1..4));
                random_model(&mut rng, &aps, 1, p, q).traces()[0].clone()
            })
            .collect();
        let model = Model::normalized(traces).unwrap();
        assert_eq!(eval(&model, &f).unwrap(), naive_eval(&model, &f));
    }
}
