use std::collections::BTreeSet;
use std::fmt;

use super::FormulaError;

/// One position of a trace: the set of atomic propositions that hold.
pub type Letter = BTreeSet<String>;

/// Builds a letter from proposition names.
pub fn letter<S: AsRef<str>>(aps: impl IntoIterator<Item = S>) -> Letter {
    aps.into_iter().map(|s| s.as_ref().to_string()).collect()
}

/// An ultimately periodic trace `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoTrace {
    stem: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoTrace {
    pub fn new(stem: Vec<Letter>, cycle: Vec<Letter>) -> Result<LassoTrace, FormulaError> {
        if cycle.is_empty() {
            return Err(FormulaError::EmptyLoop);
        }
        Ok(LassoTrace { stem, cycle })
    }

    /// A constant trace `letter^ω`.
    pub fn constant(letter: Letter) -> LassoTrace {
        LassoTrace {
            stem: vec![],
            cycle: vec![letter],
        }
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    /// The repeated part.
    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// The letter at absolute position `i` of the infinite trace.
    pub fn letter_at(&self, i: usize) -> &Letter {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Same infinite trace, re-represented with the given stem length and a
    /// cycle length that must be a multiple of the current one.
    pub fn reshape(&self, stem_len: usize, cycle_len: usize) -> LassoTrace {
        debug_assert!(stem_len >= self.stem.len());
        debug_assert!(cycle_len.is_multiple_of(self.cycle.len()));
        LassoTrace {
            stem: (0..stem_len).map(|i| self.letter_at(i).clone()).collect(),
            cycle: (stem_len..stem_len + cycle_len)
                .map(|i| self.letter_at(i).clone())
                .collect(),
        }
    }
}

/// A finite, non-empty set of lasso traces sharing stem and cycle lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    traces: Vec<LassoTrace>,
}

impl Model {
    /// Builds a model from traces that already share stem and cycle lengths.
    pub fn new(traces: Vec<LassoTrace>) -> Result<Model, FormulaError> {
        let first = traces.first().ok_or(FormulaError::EmptyModel)?;
        let (p, q) = (first.stem.len(), first.cycle.len());
        if traces
            .iter()
            .any(|t| t.stem.len() != p || t.cycle.len() != q)
        {
            return Err(FormulaError::NonUniformModel);
        }
        Ok(Model { traces })
    }

    /// Builds a model from arbitrary lassos by padding stems to the longest
    /// one and stretching cycles to the least common multiple of their lengths.
    pub fn normalized(traces: Vec<LassoTrace>) -> Result<Model, FormulaError> {
        if traces.is_empty() {
            return Err(FormulaError::EmptyModel);
        }
        let p = traces.iter().map(|t| t.stem.len()).max().unwrap_or(0);
        let q = traces.iter().map(|t| t.cycle.len()).fold(1, lcm);
        Model::new(traces.iter().map(|t| t.reshape(p, q)).collect())
    }

    pub fn traces(&self) -> &[LassoTrace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn stem_len(&self) -> usize {
        self.traces[0].stem.len()
    }

    pub fn loop_len(&self) -> usize {
        self.traces[0].cycle.len()
    }

    /// Drops repeated traces, keeping first occurrences in order.
    pub fn dedup(&self) -> Model {
        let mut seen = BTreeSet::new();
        let traces = self
            .traces
            .iter()
            .filter(|t| seen.insert((*t).clone()))
            .cloned()
            .collect();
        Model { traces }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn write_letter(f: &mut fmt::Formatter<'_>, letter: &Letter) -> fmt::Result {
    f.write_str("{")?;
    for (i, ap) in letter.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        f.write_str(ap)?;
    }
    f.write_str("}")
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for letter in &self.stem {
            write_letter(f, letter)?;
            f.write_str(" ")?;
        }
        f.write_str("|")?;
        for letter in &self.cycle {
            f.write_str(" ")?;
            write_letter(f, letter)?;
        }
        Ok(())
    }
}

/// One line per trace: `trace <i>: <stem letters> | <loop letters>`.
impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.traces.iter().enumerate() {
            writeln!(f, "trace {i}: {t}")?;
        }
        Ok(())
    }
}
