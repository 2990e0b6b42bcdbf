//! Checking context: a telescope of typed assumptions over the global
//! environment. Variables are tracked both as fresh neutral values (for
//! evaluation) and as types (for inference and readback).

use crate::term::Name;
use crate::value::{Env, GlobalEnv, Value, ValueRef};

#[derive(Clone)]
pub struct Ctx<'g> {
    pub genv: &'g GlobalEnv,
    /// Values of bound variables, innermost first; entry for level `l`
    /// is a fresh neutral unless introduced by evaluation.
    pub env: Env,
    /// Types of bound variables, indexed by de Bruijn level.
    pub types: Vec<ValueRef>,
    /// Display hints, indexed by level.
    pub hints: Vec<Name>,
}

impl<'g> Ctx<'g> {
    pub fn new(genv: &'g GlobalEnv) -> Ctx<'g> {
        Ctx { genv, env: Env::empty(), types: Vec::new(), hints: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.types.len()
    }

    /// Extend with a fresh variable of the given type; returns the
    /// extended context and the variable's value.
    pub fn bind(&self, hint: Name, ty: ValueRef) -> (Ctx<'g>, ValueRef) {
        let var = Value::var(self.depth(), hint.clone());
        let mut next = self.clone();
        next.env = next.env.extend(var.clone());
        next.types.push(ty);
        next.hints.push(hint);
        (next, var)
    }

    /// Type of the variable a de Bruijn index refers to.
    pub fn lookup_index(&self, index: usize) -> Option<&ValueRef> {
        let depth = self.depth();
        if index < depth {
            Some(&self.types[depth - 1 - index])
        } else {
            None
        }
    }

    pub fn lookup_level(&self, level: usize) -> &ValueRef {
        &self.types[level]
    }
}
