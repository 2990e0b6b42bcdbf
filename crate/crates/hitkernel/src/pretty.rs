//! Pretty-printer for kernel terms. Output re-parses and re-elaborates to
//! an alpha-equal term; parenthesization follows the parser's precedence
//! table (application > `*` > `->` > binders).

use std::collections::HashSet;

use crate::parser::is_reserved;
use crate::term::{occurs_free, strengthen, Term, TermKind, TermRef};

#[derive(Debug, Clone)]
pub struct Options {
    /// Print successor towers as decimal numerals.
    pub numerals: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options { numerals: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Term = 0,
    Arrow = 1,
    Prod = 2,
    App = 3,
    Atom = 4,
}

pub fn pretty(t: &Term, opts: &Options) -> String {
    let mut used = HashSet::new();
    collect_refs(t, &mut used);
    let mut names = Vec::new();
    render(t, &mut names, &mut used, opts, Prec::Term)
}

fn collect_refs(t: &Term, out: &mut HashSet<String>) {
    use TermKind::*;
    match &t.kind {
        Ref { name } => {
            out.insert(name.clone());
        }
        Var { .. } | Universe { .. } | Nat | Zero | Unit | Star => {}
        Pi { domain, codomain, .. } => {
            collect_refs(domain, out);
            collect_refs(codomain, out);
        }
        Lam { annotation, body, .. } => {
            if let Some(a) = annotation {
                collect_refs(a, out);
            }
            collect_refs(body, out);
        }
        App { function, argument } => {
            collect_refs(function, out);
            collect_refs(argument, out);
        }
        Sigma { first, second, .. } => {
            collect_refs(first, out);
            collect_refs(second, out);
        }
        Pair { first, second } => {
            collect_refs(first, out);
            collect_refs(second, out);
        }
        Fst { pair } | Snd { pair } => collect_refs(pair, out),
        Succ { pred } => collect_refs(pred, out),
        NatRec { motive, zero_case, succ_case, scrutinee, .. } => {
            collect_refs(motive, out);
            collect_refs(zero_case, out);
            collect_refs(succ_case, out);
            collect_refs(scrutinee, out);
        }
        Id { ty, lhs, rhs } => {
            collect_refs(ty, out);
            collect_refs(lhs, out);
            collect_refs(rhs, out);
        }
        Refl { ty, point } => {
            collect_refs(ty, out);
            collect_refs(point, out);
        }
        J { ty, base, motive, refl_case, endpoint, path, .. } => {
            collect_refs(ty, out);
            collect_refs(base, out);
            collect_refs(motive, out);
            collect_refs(refl_case, out);
            collect_refs(endpoint, out);
            collect_refs(path, out);
        }
        Quot { carrier, relation } => {
            collect_refs(carrier, out);
            collect_refs(relation, out);
        }
        QMk { carrier, relation, point } => {
            collect_refs(carrier, out);
            collect_refs(relation, out);
            collect_refs(point, out);
        }
        QPath { carrier, relation, lhs, rhs, witness } => {
            collect_refs(carrier, out);
            collect_refs(relation, out);
            collect_refs(lhs, out);
            collect_refs(rhs, out);
            collect_refs(witness, out);
        }
        QElim { carrier, relation, motive, point_case, coh_case, scrutinee, .. } => {
            collect_refs(carrier, out);
            collect_refs(relation, out);
            collect_refs(motive, out);
            collect_refs(point_case, out);
            collect_refs(coh_case, out);
            collect_refs(scrutinee, out);
        }
    }
}

fn freshen(hint: &str, names: &[String], used: &HashSet<String>) -> String {
    let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
    let mut candidate = base.to_owned();
    while names.contains(&candidate) || used.contains(&candidate) || is_reserved(&candidate) {
        candidate.push('\'');
    }
    candidate
}

fn parens(needed: bool, s: String) -> String {
    if needed {
        format!("({s})")
    } else {
        s
    }
}

fn render(
    t: &Term,
    names: &mut Vec<String>,
    used: &mut HashSet<String>,
    opts: &Options,
    prec: Prec,
) -> String {
    use TermKind::*;
    if opts.numerals {
        if let Some(n) = t.as_numeral() {
            return n.to_string();
        }
    }
    match &t.kind {
        Var { index, hint } => match names.len().checked_sub(index + 1) {
            Some(pos) => names[pos].clone(),
            None => format!("{hint}#{index}"),
        },
        Universe { level } => format!("Type{level}"),
        Nat => "Nat".to_owned(),
        Unit => "Unit".to_owned(),
        Star => "star".to_owned(),
        Zero => "zero".to_owned(),
        Ref { name } => name.clone(),
        Pi { hint, domain, codomain } => {
            let s = if occurs_free(codomain, 0) {
                let dom = render(domain, names, used, opts, Prec::Term);
                let n = freshen(hint, names, used);
                names.push(n.clone());
                let cod = render(codomain, names, used, opts, Prec::Arrow);
                names.pop();
                format!("({n} : {dom}) -> {cod}")
            } else {
                let dom = render(domain, names, used, opts, Prec::Prod);
                let cod = strengthen(&rc(t, codomain));
                let cod = render(&cod, names, used, opts, Prec::Arrow);
                format!("{dom} -> {cod}")
            };
            parens(prec > Prec::Arrow, s)
        }
        Sigma { hint, first, second } => {
            if occurs_free(second, 0) {
                let fst = render(first, names, used, opts, Prec::Term);
                let n = freshen(hint, names, used);
                names.push(n.clone());
                let snd = render(second, names, used, opts, Prec::Prod);
                names.pop();
                parens(prec > Prec::Arrow, format!("({n} : {fst}) * {snd}"))
            } else {
                let fst = render(first, names, used, opts, Prec::App);
                let snd = strengthen(&rc(t, second));
                let snd = render(&snd, names, used, opts, Prec::Prod);
                parens(prec > Prec::Prod, format!("{fst} * {snd}"))
            }
        }
        Lam { .. } => {
            let mut binders = Vec::new();
            let mut cur = t;
            let mut pushed = 0;
            while let Lam { hint, annotation, body } = &cur.kind {
                let n = freshen(hint, names, used);
                let piece = match annotation {
                    Some(a) => format!("({n} : {})", render(a, names, used, opts, Prec::Term)),
                    None => n.clone(),
                };
                names.push(n);
                pushed += 1;
                binders.push(piece);
                cur = body;
            }
            let body = render(cur, names, used, opts, Prec::Term);
            for _ in 0..pushed {
                names.pop();
            }
            parens(prec > Prec::Term, format!("fun {} => {body}", binders.join(" ")))
        }
        App { function, argument } => {
            let f = render(function, names, used, opts, Prec::App);
            let a = render(argument, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("{f} {a}"))
        }
        Succ { pred } => {
            let p = render(pred, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("succ {p}"))
        }
        Pair { first, second } => {
            let a = render(first, names, used, opts, Prec::Atom);
            let b = render(second, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("pair {a} {b}"))
        }
        Fst { pair } => {
            let p = render(pair, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("fst {p}"))
        }
        Snd { pair } => {
            let p = render(pair, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("snd {p}"))
        }
        Id { ty, lhs, rhs } => {
            let t1 = render(ty, names, used, opts, Prec::Atom);
            let a = render(lhs, names, used, opts, Prec::Atom);
            let b = render(rhs, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("Id {t1} {a} {b}"))
        }
        Refl { ty, point } => {
            let t1 = render(ty, names, used, opts, Prec::Atom);
            let a = render(point, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("refl {t1} {a}"))
        }
        NatRec { motive_hint, motive, zero_case, succ_hints, succ_case, scrutinee } => {
            let m = render_binder(&[motive_hint], motive, names, used, opts);
            let z = render(zero_case, names, used, opts, Prec::Atom);
            let s = render_binder(&[&succ_hints.0, &succ_hints.1], succ_case, names, used, opts);
            let n = render(scrutinee, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("natrec {m} {z} {s} {n}"))
        }
        J { ty, base, motive_hints, motive, refl_case, endpoint, path } => {
            let t1 = render(ty, names, used, opts, Prec::Atom);
            let b = render(base, names, used, opts, Prec::Atom);
            let m =
                render_binder(&[&motive_hints.0, &motive_hints.1], motive, names, used, opts);
            let r = render(refl_case, names, used, opts, Prec::Atom);
            let e = render(endpoint, names, used, opts, Prec::Atom);
            let p = render(path, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("J {t1} {b} {m} {r} {e} {p}"))
        }
        Quot { carrier, relation } => {
            let a = render(carrier, names, used, opts, Prec::Atom);
            let r = render(relation, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("quot {a} {r}"))
        }
        QMk { carrier, relation, point } => {
            let a = render(carrier, names, used, opts, Prec::Atom);
            let r = render(relation, names, used, opts, Prec::Atom);
            let p = render(point, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("qmk {a} {r} {p}"))
        }
        QPath { carrier, relation, lhs, rhs, witness } => {
            let a = render(carrier, names, used, opts, Prec::Atom);
            let r = render(relation, names, used, opts, Prec::Atom);
            let x = render(lhs, names, used, opts, Prec::Atom);
            let y = render(rhs, names, used, opts, Prec::Atom);
            let w = render(witness, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("qpath {a} {r} {x} {y} {w}"))
        }
        QElim {
            carrier,
            relation,
            motive_hint,
            motive,
            point_hint,
            point_case,
            coh_hints,
            coh_case,
            scrutinee,
        } => {
            let a = render(carrier, names, used, opts, Prec::Atom);
            let r = render(relation, names, used, opts, Prec::Atom);
            let m = render_binder(&[motive_hint], motive, names, used, opts);
            let p = render_binder(&[point_hint], point_case, names, used, opts);
            let c = render_binder(
                &[&coh_hints.0, &coh_hints.1, &coh_hints.2],
                coh_case,
                names,
                used,
                opts,
            );
            let s = render(scrutinee, names, used, opts, Prec::Atom);
            parens(prec > Prec::App, format!("qelim {a} {r} {m} {p} {c} {s}"))
        }
    }
}

/// Binder bodies of the primitive forms print as parenthesized lambdas,
/// which the elaborator peels back off.
fn render_binder(
    hints: &[&crate::term::Name],
    body: &TermRef,
    names: &mut Vec<String>,
    used: &mut HashSet<String>,
    opts: &Options,
) -> String {
    let mut rendered = Vec::new();
    for hint in hints {
        let n = freshen(hint, names, used);
        names.push(n.clone());
        rendered.push(n);
    }
    let b = render(body, names, used, opts, Prec::Term);
    for _ in hints {
        names.pop();
    }
    format!("(fun {} => {b})", rendered.join(" "))
}

fn rc(_parent: &Term, child: &TermRef) -> TermRef {
    child.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elab::elaborate_term;
    use crate::lexer::lex;
    use crate::parser::parse_expression;
    use crate::span::{FileId, Span};
    use crate::term::alpha_eq;
    use crate::value::GlobalEnv;

    fn roundtrip(src: &str) -> (TermRef, TermRef) {
        let genv = GlobalEnv::default();
        let toks = lex(FileId(0), src).unwrap();
        let st = parse_expression(&toks, Span::synth()).unwrap();
        let core = elaborate_term(&genv, &st).unwrap();
        let printed = pretty(&core, &Options::default());
        let toks2 = lex(FileId(0), &printed).unwrap();
        let st2 = parse_expression(&toks2, Span::synth())
            .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
        let core2 = elaborate_term(&genv, &st2)
            .unwrap_or_else(|e| panic!("re-elaboration of `{printed}` failed: {e}"));
        (core, core2)
    }

    #[test]
    fn numerals_print_in_decimal_by_default() {
        assert_eq!(pretty(&Term::numeral(2), &Options::default()), "2");
        assert_eq!(
            pretty(&Term::numeral(2), &Options { numerals: false }),
            "succ (succ zero)"
        );
    }

    #[test]
    fn nondependent_pi_uses_arrow() {
        // `f` is unused, so the printer legitimately drops the binder
        let (core, _) = roundtrip("(f : Nat -> Nat) -> Nat * Nat -> Unit");
        let printed = pretty(&core, &Options::default());
        assert_eq!(printed, "(Nat -> Nat) -> Nat * Nat -> Unit");
    }

    #[test]
    fn roundtrip_is_alpha_stable() {
        for src in [
            "fun (x : Nat) => x",
            "natrec (fun n => Nat) 0 (fun k ih => succ ih) 3",
            "(A : Type0) -> (x : A) -> Id A x x",
            "fun (A : Type0) (a : A) => refl A a",
            "qelim Nat (fun (x : Nat) (y : Nat) => Unit) (fun q => Nat) (fun a => a) (fun a b r => star) (qmk Nat (fun (x : Nat) (y : Nat) => Unit) 2)",
            "(x : Nat) * Unit",
        ] {
            let (core, core2) = roundtrip(src);
            assert!(alpha_eq(&core, &core2), "round trip changed `{src}`");
        }
    }
}
