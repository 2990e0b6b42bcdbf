//! A minimal proof checker for Martin-Löf type theory with one primitive
//! higher inductive type: the quotient of a type by a type-valued
//! relation. Normalization is by evaluation; checking is bidirectional.
//!
//! The crate ships a checkable standard library (`stdlib/` at the
//! repository root) that builds the propositional truncation as the
//! sequential colimit of iterated one-step truncations, with a derived
//! eliminator whose computation rule holds judgmentally.

pub mod span;
#[macro_use]
pub mod diag;
pub mod term;
pub mod value;

pub mod ctx;
pub mod eval;
pub mod sem;
pub mod convert;
pub mod quote;
pub mod typecheck;

pub mod lexer;
pub mod parser;
pub mod elab;
pub mod pretty;

pub mod driver;
pub mod selftest;

pub use diag::{Diagnostic, Severity};
pub use span::{FileId, Span};
pub use term::{alpha_eq, instantiate, Term, TermKind, TermRef};
pub use value::{Config, GlobalEnv, Value, ValueRef};
