//! Evaluation into the semantic domain. Fires every computation rule:
//! beta for functions and pairs, recursion on numerals, path induction
//! on refl, the quotient eliminator on points, and eager unfolding of
//! global definitions.

use std::rc::Rc;

use crate::term::{TermKind, TermRef};
use crate::value::{
    Closure, Closure2, Closure3, Env, Frame, GlobalEnv, Head, Neutral, Value, ValueRef,
};

pub fn eval(genv: &GlobalEnv, env: &Env, term: &TermRef) -> ValueRef {
    use TermKind::*;
    match &term.kind {
        Var { index, .. } => env.lookup(*index),
        Universe { level } => Value::universe(*level),
        Pi { hint, domain, codomain } => Rc::new(Value::Pi {
            hint: hint.clone(),
            domain: eval(genv, env, domain),
            codomain: Closure { env: env.clone(), body: codomain.clone() },
        }),
        Lam { hint, body, .. } => Rc::new(Value::Lam {
            hint: hint.clone(),
            body: Closure { env: env.clone(), body: body.clone() },
        }),
        App { function, argument } => {
            let f = eval(genv, env, function);
            let a = eval(genv, env, argument);
            apply(genv, &f, a)
        }
        Sigma { hint, first, second } => Rc::new(Value::Sigma {
            hint: hint.clone(),
            first: eval(genv, env, first),
            second: Closure { env: env.clone(), body: second.clone() },
        }),
        Pair { first, second } => Rc::new(Value::Pair {
            first: eval(genv, env, first),
            second: eval(genv, env, second),
        }),
        Fst { pair } => project_fst(genv, &eval(genv, env, pair)),
        Snd { pair } => project_snd(genv, &eval(genv, env, pair)),
        Nat => Rc::new(Value::Nat),
        Zero => Rc::new(Value::Zero),
        Succ { pred } => Rc::new(Value::Succ(eval(genv, env, pred))),
        NatRec { motive, zero_case, succ_case, scrutinee, .. } => {
            let motive = Closure { env: env.clone(), body: motive.clone() };
            let zero_case = eval(genv, env, zero_case);
            let succ_case = Closure2 { env: env.clone(), body: succ_case.clone() };
            let scrut = eval(genv, env, scrutinee);
            nat_rec(genv, &motive, &zero_case, &succ_case, &scrut)
        }
        Unit => Rc::new(Value::Unit),
        Star => Rc::new(Value::Star),
        Id { ty, lhs, rhs } => Rc::new(Value::Id {
            ty: eval(genv, env, ty),
            lhs: eval(genv, env, lhs),
            rhs: eval(genv, env, rhs),
        }),
        Refl { ty, point } => Rc::new(Value::Refl {
            ty: eval(genv, env, ty),
            point: eval(genv, env, point),
        }),
        J { ty, base, motive, refl_case, endpoint, path, .. } => {
            let frame = Frame::J {
                ty: eval(genv, env, ty),
                base: eval(genv, env, base),
                motive: Closure2 { env: env.clone(), body: motive.clone() },
                refl_case: eval(genv, env, refl_case),
                endpoint: eval(genv, env, endpoint),
            };
            let path = eval(genv, env, path);
            path_induction(genv, frame, &path)
        }
        Quot { carrier, relation } => Rc::new(Value::Quot {
            carrier: eval(genv, env, carrier),
            relation: eval(genv, env, relation),
        }),
        QMk { carrier, relation, point } => Rc::new(Value::QMk {
            carrier: eval(genv, env, carrier),
            relation: eval(genv, env, relation),
            point: eval(genv, env, point),
        }),
        QPath { carrier, relation, lhs, rhs, witness } => Rc::new(Value::QPath {
            carrier: eval(genv, env, carrier),
            relation: eval(genv, env, relation),
            lhs: eval(genv, env, lhs),
            rhs: eval(genv, env, rhs),
            witness: eval(genv, env, witness),
        }),
        QElim { carrier, relation, motive, point_case, coh_case, scrutinee, .. } => {
            let frame = Frame::QElim {
                carrier: eval(genv, env, carrier),
                relation: eval(genv, env, relation),
                motive: Closure { env: env.clone(), body: motive.clone() },
                point_case: Closure { env: env.clone(), body: point_case.clone() },
                coh_case: Closure3 { env: env.clone(), body: coh_case.clone() },
            };
            let scrut = eval(genv, env, scrutinee);
            quot_elim(genv, frame, &scrut)
        }
        Ref { name } => {
            let entry = genv
                .lookup(name)
                .unwrap_or_else(|| panic!("eval: unresolved global `{name}`"));
            match &entry.body_value {
                Some(v) => v.clone(),
                None => Value::global(name),
            }
        }
    }
}

pub fn apply_closure(genv: &GlobalEnv, closure: &Closure, arg: ValueRef) -> ValueRef {
    eval(genv, &closure.env.extend(arg), &closure.body)
}

pub fn apply_closure2(genv: &GlobalEnv, closure: &Closure2, a: ValueRef, b: ValueRef) -> ValueRef {
    eval(genv, &closure.env.extend(a).extend(b), &closure.body)
}

pub fn apply_closure3(
    genv: &GlobalEnv,
    closure: &Closure3,
    a: ValueRef,
    b: ValueRef,
    c: ValueRef,
) -> ValueRef {
    eval(genv, &closure.env.extend(a).extend(b).extend(c), &closure.body)
}

pub fn apply(genv: &GlobalEnv, fun: &ValueRef, arg: ValueRef) -> ValueRef {
    match fun.as_ref() {
        Value::Lam { body, .. } => apply_closure(genv, body, arg),
        Value::Neutral(n) => push_frame(n, Frame::App(arg)),
        other => panic!("eval: applied a non-function value: {other:?}"),
    }
}

pub fn project_fst(_genv: &GlobalEnv, pair: &ValueRef) -> ValueRef {
    match pair.as_ref() {
        Value::Pair { first, .. } => first.clone(),
        Value::Neutral(n) => push_frame(n, Frame::Fst),
        other => panic!("eval: fst of a non-pair value: {other:?}"),
    }
}

pub fn project_snd(_genv: &GlobalEnv, pair: &ValueRef) -> ValueRef {
    match pair.as_ref() {
        Value::Pair { second, .. } => second.clone(),
        Value::Neutral(n) => push_frame(n, Frame::Snd),
        other => panic!("eval: snd of a non-pair value: {other:?}"),
    }
}

pub fn nat_rec(
    genv: &GlobalEnv,
    motive: &Closure,
    zero_case: &ValueRef,
    succ_case: &Closure2,
    scrutinee: &ValueRef,
) -> ValueRef {
    match scrutinee.as_ref() {
        Value::Zero => zero_case.clone(),
        Value::Succ(pred) => {
            let rec = nat_rec(genv, motive, zero_case, succ_case, pred);
            apply_closure2(genv, succ_case, pred.clone(), rec)
        }
        Value::Neutral(n) => push_frame(
            n,
            Frame::NatRec {
                motive: motive.clone(),
                zero_case: zero_case.clone(),
                succ_case: succ_case.clone(),
            },
        ),
        other => panic!("eval: natrec on a non-numeral value: {other:?}"),
    }
}

/// J computes on refl. On a quotient path constructor there is no rule:
/// the eliminator blocks and the whole application becomes neutral with
/// the canonical path as its head.
pub fn path_induction(_genv: &GlobalEnv, frame: Frame, path: &ValueRef) -> ValueRef {
    let refl_case = match &frame {
        Frame::J { refl_case, .. } => refl_case.clone(),
        _ => unreachable!("path_induction expects a J frame"),
    };
    match path.as_ref() {
        Value::Refl { .. } => refl_case,
        Value::QPath { .. } => Rc::new(Value::Neutral(Neutral {
            head: Head::StuckPath(path.clone()),
            spine: vec![frame],
        })),
        Value::Neutral(n) => push_frame(n, frame),
        other => panic!("eval: J on a non-path value: {other:?}"),
    }
}

pub fn quot_elim(genv: &GlobalEnv, frame: Frame, scrutinee: &ValueRef) -> ValueRef {
    match scrutinee.as_ref() {
        Value::QMk { point, .. } => match &frame {
            Frame::QElim { point_case, .. } => apply_closure(genv, point_case, point.clone()),
            _ => unreachable!("quot_elim expects a QElim frame"),
        },
        Value::Neutral(n) => push_frame(n, frame),
        other => panic!("eval: qelim on a non-quotient value: {other:?}"),
    }
}

fn push_frame(neutral: &Neutral, frame: Frame) -> ValueRef {
    let mut spine = neutral.spine.clone();
    spine.push(frame);
    Rc::new(Value::Neutral(Neutral { head: neutral.head.clone(), spine }))
}

/// Successor tower to a number, for numerals from tests and printing.
pub fn as_numeral_value(v: &Value) -> Option<u64> {
    let mut n = 0;
    let mut cur = v;
    loop {
        match cur {
            Value::Zero => return Some(n),
            Value::Succ(p) => {
                n += 1;
                cur = p;
            }
            _ => return None,
        }
    }
}

/// Evaluate a closed term in an empty environment.
pub fn eval_closed(genv: &GlobalEnv, term: &TermRef) -> ValueRef {
    eval(genv, &Env::empty(), term)
}

#[allow(dead_code)]
fn _assert_term_is_small(t: TermKind) -> TermKind {
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{name, Term};

    fn genv() -> GlobalEnv {
        GlobalEnv::default()
    }

    #[test]
    fn beta_reduces_identity_application() {
        // (fun x => x) zero  ~>  zero
        let id = Term::synth(TermKind::Lam {
            hint: name("x"),
            annotation: None,
            body: Term::var(0, name("x"), crate::span::Span::synth()),
        });
        let app = Term::synth(TermKind::App { function: id, argument: Term::numeral(0) });
        let v = eval_closed(&genv(), &app);
        assert_eq!(as_numeral_value(&v), Some(0));
    }

    #[test]
    fn natrec_adds_one_and_one() {
        // natrec (_ => Nat) 1 (fun k r => succ r) 1  ~>  2
        let rec = Term::synth(TermKind::NatRec {
            motive_hint: name("_"),
            motive: Term::synth(TermKind::Nat),
            zero_case: Term::numeral(1),
            succ_hints: (name("k"), name("r")),
            succ_case: Term::synth(TermKind::Succ {
                pred: Term::var(0, name("r"), crate::span::Span::synth()),
            }),
            scrutinee: Term::numeral(1),
        });
        let v = eval_closed(&genv(), &rec);
        assert_eq!(as_numeral_value(&v), Some(2));
    }

    #[test]
    fn qelim_computes_on_points() {
        // qelim Nat (fun _ _ => Unit) (fun _ => Nat) (fun a => succ a) coh (qmk 3) ~> 4
        let unit_rel = Term::synth(TermKind::Lam {
            hint: name("x"),
            annotation: None,
            body: Term::synth(TermKind::Lam {
                hint: name("y"),
                annotation: None,
                body: Term::synth(TermKind::Unit),
            }),
        });
        let qelim = Term::synth(TermKind::QElim {
            carrier: Term::synth(TermKind::Nat),
            relation: unit_rel.clone(),
            motive_hint: name("q"),
            motive: Term::synth(TermKind::Nat),
            point_hint: name("a"),
            point_case: Term::synth(TermKind::Succ {
                pred: Term::var(0, name("a"), crate::span::Span::synth()),
            }),
            coh_hints: (name("a"), name("b"), name("r")),
            // not well-typed as a coherence, but eval never inspects it
            coh_case: Term::synth(TermKind::Star),
            scrutinee: Term::synth(TermKind::QMk {
                carrier: Term::synth(TermKind::Nat),
                relation: unit_rel,
                point: Term::numeral(3),
            }),
        });
        let v = eval_closed(&genv(), &qelim);
        assert_eq!(as_numeral_value(&v), Some(4));
    }
}
