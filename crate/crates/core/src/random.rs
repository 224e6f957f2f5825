//! Seeded random HyperLTL formulas of a given size.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Ltl, QuantGroup, Quantifier};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixShape {
    /// Explicit groups of the given sizes.
    Groups(Vec<(Quantifier, usize)>),
    /// `alternations + 1` single-variable groups, alternating from `start`.
    Alternating {
        alternations: usize,
        start: Quantifier,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    /// Number of body nodes.
    pub size: usize,
    pub n_aps: usize,
    pub prefix: PrefixShape,
}

#[derive(Clone, Copy)]
enum Op {
    Not,
    Next,
    Finally,
    Globally,
    And,
    Or,
    Implies,
    Iff,
    Until,
}

const UNARY: [(Op, u32); 4] = [
    (Op::Not, 10),
    (Op::Next, 8),
    (Op::Finally, 6),
    (Op::Globally, 6),
];
const BINARY: [(Op, u32); 5] = [
    (Op::And, 12),
    (Op::Or, 12),
    (Op::Implies, 6),
    (Op::Iff, 4),
    (Op::Until, 6),
];

impl PrefixShape {
    fn groups(&self) -> Vec<(Quantifier, usize)> {
        match self {
            PrefixShape::Groups(g) => g.clone(),
            PrefixShape::Alternating {
                alternations,
                start,
            } => {
                let mut q = *start;
                (0..=*alternations)
                    .map(|_| {
                        let g = (q, 1);
                        q = q.dual();
                        g
                    })
                    .collect()
            }
        }
    }
}

/// Builds the formula described by `spec`; a pure function of `spec`.
///
/// Bodies are grown top-down: a budget of one is an atom, a budget of two a
/// unary operator over an atom, and larger budgets pick any operator and
/// split the rest between the operands. Atoms draw the proposition and the
/// trace variable uniformly.
pub fn gen_random(spec: &RandomSpec) -> Formula {
    assert!(
        spec.size >= 1 && spec.n_aps >= 1,
        "size and n_aps must be positive"
    );
    let groups = spec.prefix.groups();
    assert!(
        !groups.is_empty() && groups.iter().all(|&(_, n)| n >= 1),
        "groups must be non-empty"
    );
    let mut next = 0;
    let prefix: Vec<QuantGroup> = groups
        .iter()
        .map(|&(q, n)| {
            let vars: Vec<String> = (next..next + n).map(|i| format!("p{i}")).collect();
            next += n;
            QuantGroup::new(q, vars)
        })
        .collect();
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        n_aps: spec.n_aps,
        n_vars: next,
        unary: WeightedIndex::new(UNARY.iter().map(|u| u.1)).expect("positive weights"),
        any: WeightedIndex::new(UNARY.iter().chain(&BINARY).map(|u| u.1))
            .expect("positive weights"),
    };
    let body = g.body(spec.size);
    Formula::new(prefix, body).expect("generated atoms use prefix variables")
}

struct Gen {
    rng: ChaCha8Rng,
    n_aps: usize,
    n_vars: usize,
    unary: WeightedIndex<u32>,
    any: WeightedIndex<u32>,
}

impl Gen {
    fn atom(&mut self) -> Ltl {
        let ap = self.rng.gen_range(0..self.n_aps);
        let var = self.rng.gen_range(0..self.n_vars);
        Ltl::atom(format!("a{ap}"), format!("p{var}"))
    }

    fn body(&mut self, size: usize) -> Ltl {
        if size == 1 {
            return self.atom();
        }
        let op = if size == 2 {
            UNARY[self.unary.sample(&mut self.rng)].0
        } else {
            let i = self.any.sample(&mut self.rng);
            UNARY
                .iter()
                .chain(&BINARY)
                .nth(i)
                .expect("index in range")
                .0
        };
        let unary = |a: Ltl| match op {
            Op::Not => a.not(),
            Op::Next => a.next(),
            Op::Finally => a.finally(),
            _ => a.globally(),
        };
        match op {
            Op::Not | Op::Next | Op::Finally | Op::Globally => unary(self.body(size - 1)),
            _ => {
                let left = self.rng.gen_range(1..=size - 2);
                let a = self.body(left);
                let b = self.body(size - 1 - left);
                match op {
                    Op::And => a.and(b),
                    Op::Or => a.or(b),
                    Op::Implies => a.implies(b),
                    Op::Iff => a.iff(b),
                    _ => a.until(b),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64, size: usize, n_aps: usize, prefix: PrefixShape) -> RandomSpec {
        RandomSpec {
            seed,
            size,
            n_aps,
            prefix,
        }
    }

    #[test]
    fn single_atom() {
        let s = spec(1, 1, 1, PrefixShape::Groups(vec![(Quantifier::Exists, 1)]));
        assert_eq!(gen_random(&s).to_string(), "exists p0. a0_p0");
    }

    #[test]
    fn deterministic_and_exact_size() {
        let s = spec(
            42,
            20,
            5,
            PrefixShape::Alternating {
                alternations: 3,
                start: Quantifier::Exists,
            },
        );
        let f = gen_random(&s);
        assert_eq!(f, gen_random(&s));
        assert_eq!(f.body().size(), 20);
        assert_eq!(f.alternations(), 3);
        assert_ne!(f, gen_random(&RandomSpec { seed: 43, ..s }));
    }

    #[test]
    fn grouped_prefix() {
        use Quantifier::*;
        let s = spec(7, 9, 2, PrefixShape::Groups(vec![(Exists, 2), (Forall, 2)]));
        let f = gen_random(&s);
        assert_eq!(f.to_string().split('.').next().unwrap(), "exists p0 p1");
        assert_eq!(f.num_trace_vars(), 4);
    }
}
