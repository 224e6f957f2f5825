use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::FormulaError;

/// Trace quantifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// A block of trace variables bound by the same quantifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantGroup {
    pub quantifier: Quantifier,
    pub vars: Vec<String>,
}

impl QuantGroup {
    pub fn new<S: Into<String>>(quantifier: Quantifier, vars: impl IntoIterator<Item = S>) -> Self {
        QuantGroup {
            quantifier,
            vars: vars.into_iter().map(Into::into).collect(),
        }
    }

    pub fn forall<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        Self::new(Quantifier::Forall, vars)
    }

    pub fn exists<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        Self::new(Quantifier::Exists, vars)
    }
}

/// Quantifier-free LTL body over indexed atoms `a_pi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    False,
    Atom { ap: String, var: String },
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Iff(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    WeakUntil(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

#[allow(clippy::should_implement_trait)]
impl Ltl {
    pub fn atom(ap: impl Into<String>, var: impl Into<String>) -> Ltl {
        Ltl::Atom {
            ap: ap.into(),
            var: var.into(),
        }
    }

    pub fn not(self) -> Ltl {
        Ltl::Not(Box::new(self))
    }

    pub fn and(self, rhs: Ltl) -> Ltl {
        Ltl::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Ltl) -> Ltl {
        Ltl::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Ltl) -> Ltl {
        Ltl::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Ltl) -> Ltl {
        Ltl::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Ltl {
        Ltl::Next(Box::new(self))
    }

    pub fn finally(self) -> Ltl {
        Ltl::Finally(Box::new(self))
    }

    pub fn globally(self) -> Ltl {
        Ltl::Globally(Box::new(self))
    }

    pub fn until(self, rhs: Ltl) -> Ltl {
        Ltl::Until(Box::new(self), Box::new(rhs))
    }

    pub fn weak_until(self, rhs: Ltl) -> Ltl {
        Ltl::WeakUntil(Box::new(self), Box::new(rhs))
    }

    pub fn release(self, rhs: Ltl) -> Ltl {
        Ltl::Release(Box::new(self), Box::new(rhs))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Ltl> {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom { .. } => vec![],
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => vec![a],
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Iff(a, b)
            | Ltl::Until(a, b)
            | Ltl::WeakUntil(a, b)
            | Ltl::Release(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Ltl::size).sum::<usize>()
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a str)) {
        if let Ltl::Atom { ap, var } = self {
            f(ap, var);
        }
        for c in self.children() {
            c.visit_atoms(f);
        }
    }

    /// Rename trace variables through `map`; unmapped names are kept.
    pub fn rename_vars(&self, map: &impl Fn(&str) -> Option<String>) -> Ltl {
        let r = |x: &Ltl| Box::new(x.rename_vars(map));
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom { ap, var } => Ltl::Atom {
                ap: ap.clone(),
                var: map(var).unwrap_or_else(|| var.clone()),
            },
            Ltl::Not(a) => Ltl::Not(r(a)),
            Ltl::Next(a) => Ltl::Next(r(a)),
            Ltl::Finally(a) => Ltl::Finally(r(a)),
            Ltl::Globally(a) => Ltl::Globally(r(a)),
            Ltl::And(a, b) => Ltl::And(r(a), r(b)),
            Ltl::Or(a, b) => Ltl::Or(r(a), r(b)),
            Ltl::Implies(a, b) => Ltl::Implies(r(a), r(b)),
            Ltl::Iff(a, b) => Ltl::Iff(r(a), r(b)),
            Ltl::Until(a, b) => Ltl::Until(r(a), r(b)),
            Ltl::WeakUntil(a, b) => Ltl::WeakUntil(r(a), r(b)),
            Ltl::Release(a, b) => Ltl::Release(r(a), r(b)),
        }
    }

    /// True if negation occurs only directly above atoms and no derived
    /// operator (`->`, `<->`, `F`, `G`, `W`) is present.
    pub fn is_nnf(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom { .. } => true,
            Ltl::Not(a) => matches!(**a, Ltl::Atom { .. }),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.is_nnf() && b.is_nnf()
            }
            Ltl::Next(a) => a.is_nnf(),
            Ltl::Implies(..)
            | Ltl::Iff(..)
            | Ltl::Finally(..)
            | Ltl::Globally(..)
            | Ltl::WeakUntil(..) => false,
        }
    }
}

/// A closed prenex HyperLTL formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    prefix: Vec<QuantGroup>,
    body: Ltl,
}

impl Formula {
    /// Builds a formula, checking that the prefix is non-empty, trace
    /// variables are distinct, and every atom is bound.
    pub fn new(prefix: Vec<QuantGroup>, body: Ltl) -> Result<Formula, FormulaError> {
        if prefix.is_empty() {
            return Err(FormulaError::EmptyPrefix);
        }
        let mut seen = HashSet::new();
        for group in &prefix {
            if group.vars.is_empty() {
                return Err(FormulaError::EmptyGroup);
            }
            for v in &group.vars {
                if !seen.insert(v.as_str()) {
                    return Err(FormulaError::DuplicateVar(v.clone()));
                }
            }
        }
        let mut unbound = None;
        body.visit_atoms(&mut |_, var| {
            if unbound.is_none() && !seen.contains(var) {
                unbound = Some(var.to_string());
            }
        });
        if let Some(var) = unbound {
            return Err(FormulaError::UnboundVar(var));
        }
        Ok(Formula { prefix, body })
    }

    pub fn prefix(&self) -> &[QuantGroup] {
        &self.prefix
    }

    pub fn body(&self) -> &Ltl {
        &self.body
    }

    /// All trace variables with their quantifier, outermost first.
    pub fn trace_vars(&self) -> impl Iterator<Item = (Quantifier, &str)> + '_ {
        self.prefix
            .iter()
            .flat_map(|g| g.vars.iter().map(move |v| (g.quantifier, v.as_str())))
    }

    pub fn num_trace_vars(&self) -> usize {
        self.prefix.iter().map(|g| g.vars.len()).sum()
    }

    /// The atomic propositions used in the body, sorted lexicographically.
    pub fn aps(&self) -> Vec<String> {
        let mut aps = BTreeSet::new();
        self.body.visit_atoms(&mut |ap, _| {
            aps.insert(ap.to_string());
        });
        aps.into_iter().collect()
    }

    /// Number of quantifier alternations in the prefix.
    pub fn alternations(&self) -> usize {
        self.prefix
            .windows(2)
            .filter(|w| w[0].quantifier != w[1].quantifier)
            .count()
    }
}

// Binding strength used by both the parser and the printer.
pub(crate) const PREC_IFF: u8 = 1;
pub(crate) const PREC_IMPLIES: u8 = 2;
pub(crate) const PREC_OR: u8 = 3;
pub(crate) const PREC_AND: u8 = 4;
pub(crate) const PREC_TEMPORAL: u8 = 5;
pub(crate) const PREC_UNARY: u8 = 6;
pub(crate) const PREC_ATOM: u8 = 7;

impl Ltl {
    fn precedence(&self) -> u8 {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom { .. } => PREC_ATOM,
            Ltl::Not(_) | Ltl::Next(_) | Ltl::Finally(_) | Ltl::Globally(_) => PREC_UNARY,
            Ltl::Until(..) | Ltl::WeakUntil(..) | Ltl::Release(..) => PREC_TEMPORAL,
            Ltl::And(..) => PREC_AND,
            Ltl::Or(..) => PREC_OR,
            Ltl::Implies(..) => PREC_IMPLIES,
            Ltl::Iff(..) => PREC_IFF,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            f.write_str("(")?;
            self.write_prec(f, 0)?;
            return f.write_str(")");
        }
        // Left-associative levels bind the right operand one level tighter,
        // right-associative levels the left operand.
        let left_assoc = |f: &mut fmt::Formatter<'_>, a: &Ltl, op: &str, b: &Ltl| {
            a.write_prec(f, prec)?;
            write!(f, " {op} ")?;
            b.write_prec(f, prec + 1)
        };
        let right_assoc = |f: &mut fmt::Formatter<'_>, a: &Ltl, op: &str, b: &Ltl| {
            a.write_prec(f, prec + 1)?;
            write!(f, " {op} ")?;
            b.write_prec(f, prec)
        };
        match self {
            Ltl::True => f.write_str("true"),
            Ltl::False => f.write_str("false"),
            Ltl::Atom { ap, var } => write!(f, "{ap}_{var}"),
            Ltl::Not(a) => {
                f.write_str("~")?;
                a.write_prec(f, PREC_UNARY)
            }
            Ltl::Next(a) => {
                f.write_str("X ")?;
                a.write_prec(f, PREC_UNARY)
            }
            Ltl::Finally(a) => {
                f.write_str("F ")?;
                a.write_prec(f, PREC_UNARY)
            }
            Ltl::Globally(a) => {
                f.write_str("G ")?;
                a.write_prec(f, PREC_UNARY)
            }
            Ltl::And(a, b) => left_assoc(f, a, "&", b),
            Ltl::Or(a, b) => left_assoc(f, a, "|", b),
            Ltl::Iff(a, b) => left_assoc(f, a, "<->", b),
            Ltl::Implies(a, b) => right_assoc(f, a, "->", b),
            Ltl::Until(a, b) => right_assoc(f, a, "U", b),
            Ltl::WeakUntil(a, b) => right_assoc(f, a, "W", b),
            Ltl::Release(a, b) => right_assoc(f, a, "R", b),
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for group in &self.prefix {
            write!(
                f,
                "{} {}. ",
                group.quantifier.keyword(),
                group.vars.join(" ")
            )?;
        }
        write!(f, "{}", self.body)
    }
}
