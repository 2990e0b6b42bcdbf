//! Semantic domain for normalization by evaluation: canonical forms,
//! closures over environments, and neutral (stuck) forms.

use std::collections::HashMap;
use std::rc::Rc;

use crate::span::Span;
use crate::term::{Name, TermRef};

pub type ValueRef = Rc<Value>;

#[derive(Debug, Clone)]
pub enum Value {
    Universe(u32),
    Pi { hint: Name, domain: ValueRef, codomain: Closure },
    Lam { hint: Name, body: Closure },
    Sigma { hint: Name, first: ValueRef, second: Closure },
    Pair { first: ValueRef, second: ValueRef },
    Nat,
    Zero,
    Succ(ValueRef),
    Unit,
    Star,
    Id { ty: ValueRef, lhs: ValueRef, rhs: ValueRef },
    Refl { ty: ValueRef, point: ValueRef },
    Quot { carrier: ValueRef, relation: ValueRef },
    QMk { carrier: ValueRef, relation: ValueRef, point: ValueRef },
    QPath {
        carrier: ValueRef,
        relation: ValueRef,
        lhs: ValueRef,
        rhs: ValueRef,
        witness: ValueRef,
    },
    Neutral(Neutral),
}

impl Value {
    pub fn universe(level: u32) -> ValueRef {
        Rc::new(Value::Universe(level))
    }

    pub fn var(level: usize, hint: Name) -> ValueRef {
        Rc::new(Value::Neutral(Neutral {
            head: Head::Var { level, hint },
            spine: Vec::new(),
        }))
    }

    pub fn global(name: &str) -> ValueRef {
        Rc::new(Value::Neutral(Neutral {
            head: Head::Global(name.to_owned()),
            spine: Vec::new(),
        }))
    }

    pub fn as_neutral(&self) -> Option<&Neutral> {
        match self {
            Value::Neutral(n) => Some(n),
            _ => None,
        }
    }
}

/// A stuck computation: a head that cannot reduce, under a stack of
/// elimination frames applied outside-in.
#[derive(Debug, Clone)]
pub struct Neutral {
    pub head: Head,
    pub spine: Vec<Frame>,
}

#[derive(Debug, Clone)]
pub enum Head {
    /// Free variable, identified by its de Bruijn level.
    Var { level: usize, hint: Name },
    /// Axiom (opaque global). Transparent definitions never appear here;
    /// the evaluator unfolds them eagerly.
    Global(String),
    /// Path induction applied to a quotient path constructor: the only
    /// place a canonical form blocks an eliminator (there is no path
    /// computation rule). Always a `Value::QPath`, and the first spine
    /// frame is always `Frame::J`.
    StuckPath(ValueRef),
}

#[derive(Debug, Clone)]
pub enum Frame {
    App(ValueRef),
    Fst,
    Snd,
    NatRec {
        motive: Closure,
        zero_case: ValueRef,
        succ_case: Closure2,
    },
    J {
        ty: ValueRef,
        base: ValueRef,
        motive: Closure2,
        refl_case: ValueRef,
        endpoint: ValueRef,
    },
    QElim {
        carrier: ValueRef,
        relation: ValueRef,
        motive: Closure,
        point_case: Closure,
        coh_case: Closure3,
    },
}

/// Environment: one value per enclosing binder, innermost first.
/// Persistent so closures can capture it in O(1).
#[derive(Debug, Clone, Default)]
pub struct Env(Option<Rc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    value: ValueRef,
    rest: Env,
    len: usize,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn extend(&self, value: ValueRef) -> Env {
        let len = self.len() + 1;
        Env(Some(Rc::new(EnvNode { value, rest: self.clone(), len })))
    }

    /// Look up the variable a de Bruijn index refers to.
    pub fn lookup(&self, index: usize) -> ValueRef {
        let mut cur = self;
        let mut i = index;
        loop {
            let node = cur.0.as_ref().expect("eval: variable index out of range");
            if i == 0 {
                return node.value.clone();
            }
            i -= 1;
            cur = &node.rest;
        }
    }
}

/// Body binding one variable, closed over its defining environment.
#[derive(Debug, Clone)]
pub struct Closure {
    pub env: Env,
    pub body: TermRef,
}

/// Body binding two variables.
#[derive(Debug, Clone)]
pub struct Closure2 {
    pub env: Env,
    pub body: TermRef,
}

/// Body binding three variables.
#[derive(Debug, Clone)]
pub struct Closure3 {
    pub env: Env,
    pub body: TermRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Definition,
    Axiom,
}

/// A checked global: its type (as term and value), and for definitions
/// the body with its evaluation. Axioms stay neutral.
#[derive(Debug, Clone)]
pub struct GlobalEntry {
    pub name: String,
    pub kind: DeclKind,
    pub ty_term: TermRef,
    pub ty_value: ValueRef,
    pub body_term: Option<TermRef>,
    pub body_value: Option<ValueRef>,
    pub span: Span,
}

/// Checker configuration; `max_level` caps the universe hierarchy.
#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub max_level: u32,
}

impl Default for Config {
    fn default() -> Config {
        Config { max_level: crate::term::DEFAULT_MAX_LEVEL }
    }
}

/// Append-only table of checked declarations, in installation order.
#[derive(Debug, Default)]
pub struct GlobalEnv {
    pub config: Config,
    entries: Vec<GlobalEntry>,
    index: HashMap<String, usize>,
}

impl GlobalEnv {
    pub fn new(config: Config) -> GlobalEnv {
        GlobalEnv { config, entries: Vec::new(), index: HashMap::new() }
    }

    pub fn lookup(&self, name: &str) -> Option<&GlobalEntry> {
        self.index.get(name).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn install(&mut self, entry: GlobalEntry) {
        debug_assert!(!self.contains(&entry.name), "duplicate global {}", entry.name);
        self.index.insert(entry.name.clone(), self.entries.len());
        self.entries.push(entry);
    }

    pub fn iter(&self) -> impl Iterator<Item = &GlobalEntry> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
