//! Hash-consed propositional circuits over tagged variables.

use std::collections::HashMap;
use std::fmt;

/// Whose copy of an atomic proposition a step variable belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    /// Candidate trace `t_i` of the guessed trace set.
    Trace(usize),
    /// Quantified trace variable.
    Var(String),
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Trace(i) => write!(f, "t{i}"),
            Owner::Var(v) => f.write_str(v),
        }
    }
}

/// A propositional variable of the encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropVar {
    /// Value of `ap` at unrolled step `step` on `owner`'s trace.
    ApStep {
        owner: Owner,
        ap: String,
        step: usize,
    },
    /// One-hot selector: the lasso loops back to step `pos`.
    LoopSel(usize),
    /// Definitional variable introduced by clause conversion.
    Aux(usize),
}

impl PropVar {
    pub fn ap_step(owner: Owner, ap: impl Into<String>, step: usize) -> PropVar {
        PropVar::ApStep {
            owner,
            ap: ap.into(),
            step,
        }
    }
}

impl fmt::Display for PropVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropVar::ApStep { owner, ap, step } => write!(f, "{ap}^{step}_{owner}"),
            PropVar::LoopSel(j) => write!(f, "l_{j}"),
            PropVar::Aux(n) => write!(f, "x{n}"),
        }
    }
}

/// Dense variable id; ids start at 1 so they double as DIMACS variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn from_id(id: u32) -> Var {
        assert!(id > 0, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

/// Bijection between [`PropVar`]s and dense ids, in creation order.
#[derive(Clone, Debug, Default)]
pub struct VarTable {
    vars: Vec<PropVar>,
    ids: HashMap<PropVar, Var>,
}

impl VarTable {
    pub fn intern(&mut self, v: PropVar) -> Var {
        if let Some(&id) = self.ids.get(&v) {
            return id;
        }
        self.vars.push(v.clone());
        let id = Var(self.vars.len() as u32);
        self.ids.insert(v, id);
        id
    }

    pub fn get(&self, v: &PropVar) -> Option<Var> {
        self.ids.get(v).copied()
    }

    pub fn prop(&self, v: Var) -> &PropVar {
        &self.vars[v.index()]
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &PropVar)> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (Var(i as u32 + 1), v))
    }
}

/// Handle to a node of a [`Circuit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate(u32);

impl Gate {
    pub const FALSE: Gate = Gate(0);
    pub const TRUE: Gate = Gate(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(bool),
    /// Variable with polarity (`true` = positive).
    Lit(Var, bool),
    Not(Gate),
    And(Box<[Gate]>),
    Or(Box<[Gate]>),
}

/// A propositional DAG. Nodes are hash-consed and stored in creation order,
/// so every node's children precede it.
#[derive(Clone, Debug)]
pub struct Circuit {
    vars: VarTable,
    nodes: Vec<Node>,
    cons: HashMap<Node, Gate>,
}

impl Default for Circuit {
    fn default() -> Self {
        Self::new()
    }
}

impl Circuit {
    pub fn new() -> Circuit {
        let mut c = Circuit {
            vars: VarTable::default(),
            nodes: Vec::new(),
            cons: HashMap::new(),
        };
        c.intern(Node::Const(false));
        c.intern(Node::Const(true));
        c
    }

    fn intern(&mut self, node: Node) -> Gate {
        if let Some(&g) = self.cons.get(&node) {
            return g;
        }
        let g = Gate(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.cons.insert(node, g);
        g
    }

    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    pub fn var(&mut self, v: PropVar) -> Var {
        self.vars.intern(v)
    }

    pub fn node(&self, g: Gate) -> &Node {
        &self.nodes[g.index()]
    }

    /// All nodes in creation order; position `i` holds the gate of index `i`.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&mut self, b: bool) -> Gate {
        if b {
            Gate::TRUE
        } else {
            Gate::FALSE
        }
    }

    pub fn lit(&mut self, v: Var, positive: bool) -> Gate {
        self.intern(Node::Lit(v, positive))
    }

    pub fn prop_lit(&mut self, v: PropVar, positive: bool) -> Gate {
        let v = self.var(v);
        self.lit(v, positive)
    }

    /// The existing node equivalent to `¬g`, if any, without creating one.
    fn complement(&self, g: Gate) -> Option<Gate> {
        match self.node(g) {
            Node::Const(b) => Some(if *b { Gate::FALSE } else { Gate::TRUE }),
            Node::Lit(v, p) => self.cons.get(&Node::Lit(*v, !p)).copied(),
            Node::Not(x) => Some(*x),
            _ => self.cons.get(&Node::Not(g)).copied(),
        }
    }

    pub fn not(&mut self, g: Gate) -> Gate {
        match self.node(g).clone() {
            Node::Const(b) => self.constant(!b),
            Node::Lit(v, p) => self.lit(v, !p),
            Node::Not(x) => x,
            _ => self.intern(Node::Not(g)),
        }
    }

    fn junction(&mut self, children: impl IntoIterator<Item = Gate>, is_and: bool) -> Gate {
        let (unit, zero) = if is_and {
            (Gate::TRUE, Gate::FALSE)
        } else {
            (Gate::FALSE, Gate::TRUE)
        };
        let mut kids = Vec::new();
        for c in children {
            if c == zero {
                return zero;
            }
            if c != unit {
                kids.push(c);
            }
        }
        kids.sort_unstable();
        kids.dedup();
        for &c in &kids {
            if let Some(nc) = self.complement(c) {
                if kids.binary_search(&nc).is_ok() {
                    return zero;
                }
            }
        }
        match kids.len() {
            0 => unit,
            1 => kids[0],
            _ if is_and => self.intern(Node::And(kids.into_boxed_slice())),
            _ => self.intern(Node::Or(kids.into_boxed_slice())),
        }
    }

    pub fn and(&mut self, children: impl IntoIterator<Item = Gate>) -> Gate {
        self.junction(children, true)
    }

    pub fn or(&mut self, children: impl IntoIterator<Item = Gate>) -> Gate {
        self.junction(children, false)
    }

    pub fn implies(&mut self, a: Gate, b: Gate) -> Gate {
        let na = self.not(a);
        self.or([na, b])
    }

    /// `a ↔ b` expanded as `(¬a ∨ b) ∧ (a ∨ ¬b)`.
    pub fn iff(&mut self, a: Gate, b: Gate) -> Gate {
        let (na, nb) = (self.not(a), self.not(b));
        let fwd = self.or([na, b]);
        let bwd = self.or([a, nb]);
        self.and([fwd, bwd])
    }

    /// Evaluates `g` under `assign`; returns the first variable found
    /// unassigned in the cone of `g` as the error.
    pub fn evaluate(&self, g: Gate, assign: impl Fn(Var) -> Option<bool>) -> Result<bool, Var> {
        let mut memo: HashMap<Gate, bool> = HashMap::new();
        let mut stack = vec![(g, false)];
        while let Some((top, expanded)) = stack.pop() {
            if memo.contains_key(&top) {
                continue;
            }
            let node = self.node(top);
            let kids: &[Gate] = match node {
                Node::Const(_) | Node::Lit(..) => &[],
                Node::Not(x) => std::slice::from_ref(x),
                Node::And(xs) | Node::Or(xs) => xs,
            };
            if !expanded && kids.iter().any(|k| !memo.contains_key(k)) {
                stack.push((top, true));
                stack.extend(kids.iter().map(|&k| (k, false)));
                continue;
            }
            let value = match node {
                Node::Const(b) => *b,
                Node::Lit(v, p) => assign(*v).ok_or(*v)? == *p,
                Node::Not(x) => !memo[x],
                Node::And(xs) => xs.iter().all(|x| memo[x]),
                Node::Or(xs) => xs.iter().any(|x| memo[x]),
            };
            memo.insert(top, value);
        }
        Ok(memo[&g])
    }

    /// Variables occurring in the cone of `g`, sorted by id.
    pub fn support(&self, g: Gate) -> Vec<Var> {
        let mut seen = vec![false; self.nodes.len()];
        let mut vars = Vec::new();
        let mut stack = vec![g];
        while let Some(top) = stack.pop() {
            if std::mem::replace(&mut seen[top.index()], true) {
                continue;
            }
            match self.node(top) {
                Node::Const(_) => {}
                Node::Lit(v, _) => vars.push(*v),
                Node::Not(x) => stack.push(*x),
                Node::And(xs) | Node::Or(xs) => stack.extend(xs.iter().copied()),
            }
        }
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Number of distinct nodes reachable from `g`.
    pub fn cone_size(&self, g: Gate) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut count = 0;
        let mut stack = vec![g];
        while let Some(top) = stack.pop() {
            if std::mem::replace(&mut seen[top.index()], true) {
                continue;
            }
            count += 1;
            match self.node(top) {
                Node::Const(_) | Node::Lit(..) => {}
                Node::Not(x) => stack.push(*x),
                Node::And(xs) | Node::Or(xs) => stack.extend(xs.iter().copied()),
            }
        }
        count
    }
}

/// Error for [`substitute`]: a variable in the formula has no value.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unassigned variable {0}")]
pub struct Unassigned(pub PropVar);

/// Evaluates `g` under an assignment keyed by [`PropVar`].
pub fn substitute(
    c: &Circuit,
    g: Gate,
    assignment: &HashMap<PropVar, bool>,
) -> Result<bool, Unassigned> {
    c.evaluate(g, |v| assignment.get(c.vars().prop(v)).copied())
        .map_err(|v| Unassigned(c.vars().prop(v).clone()))
}
