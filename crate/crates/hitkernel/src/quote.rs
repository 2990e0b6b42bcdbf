//! Reading semantic values back into syntax. `readback` is the plain
//! structural form (used for diagnostics and spine display); `readback_at`
//! is type-directed and produces beta-normal, eta-long terms, expanding
//! neutrals at function, pair, and Unit types.

use std::rc::Rc;

use crate::ctx::Ctx;
use crate::eval::{apply, apply_closure, apply_closure2, apply_closure3, project_fst};
use crate::sem;
use crate::term::{name, Name, Term, TermKind, TermRef};
use crate::value::{Closure, Closure2, Closure3, Frame, GlobalEnv, Head, Neutral, Value, ValueRef};

fn var_term(depth: usize, level: usize, hint: &Name) -> TermRef {
    debug_assert!(level < depth, "readback: variable level out of range");
    Term::var(depth - 1 - level, hint.clone(), crate::span::Span::synth())
}

/// Structural readback at a binder depth. Lambdas and pairs read back as
/// themselves; neutrals rebuild their spine. No eta expansion.
pub fn readback(genv: &GlobalEnv, depth: usize, v: &ValueRef) -> TermRef {
    match v.as_ref() {
        Value::Universe(level) => Term::synth(TermKind::Universe { level: *level }),
        Value::Pi { hint, domain, codomain } => {
            let x = Value::var(depth, hint.clone());
            Term::synth(TermKind::Pi {
                hint: hint.clone(),
                domain: readback(genv, depth, domain),
                codomain: readback(genv, depth + 1, &apply_closure(genv, codomain, x)),
            })
        }
        Value::Lam { hint, body } => {
            let x = Value::var(depth, hint.clone());
            Term::synth(TermKind::Lam {
                hint: hint.clone(),
                annotation: None,
                body: readback(genv, depth + 1, &apply_closure(genv, body, x)),
            })
        }
        Value::Sigma { hint, first, second } => {
            let x = Value::var(depth, hint.clone());
            Term::synth(TermKind::Sigma {
                hint: hint.clone(),
                first: readback(genv, depth, first),
                second: readback(genv, depth + 1, &apply_closure(genv, second, x)),
            })
        }
        Value::Pair { first, second } => Term::synth(TermKind::Pair {
            first: readback(genv, depth, first),
            second: readback(genv, depth, second),
        }),
        Value::Nat => Term::synth(TermKind::Nat),
        Value::Zero => Term::synth(TermKind::Zero),
        Value::Succ(p) => Term::synth(TermKind::Succ { pred: readback(genv, depth, p) }),
        Value::Unit => Term::synth(TermKind::Unit),
        Value::Star => Term::synth(TermKind::Star),
        Value::Id { ty, lhs, rhs } => Term::synth(TermKind::Id {
            ty: readback(genv, depth, ty),
            lhs: readback(genv, depth, lhs),
            rhs: readback(genv, depth, rhs),
        }),
        Value::Refl { ty, point } => Term::synth(TermKind::Refl {
            ty: readback(genv, depth, ty),
            point: readback(genv, depth, point),
        }),
        Value::Quot { carrier, relation } => Term::synth(TermKind::Quot {
            carrier: readback(genv, depth, carrier),
            relation: readback(genv, depth, relation),
        }),
        Value::QMk { carrier, relation, point } => Term::synth(TermKind::QMk {
            carrier: readback(genv, depth, carrier),
            relation: readback(genv, depth, relation),
            point: readback(genv, depth, point),
        }),
        Value::QPath { carrier, relation, lhs, rhs, witness } => Term::synth(TermKind::QPath {
            carrier: readback(genv, depth, carrier),
            relation: readback(genv, depth, relation),
            lhs: readback(genv, depth, lhs),
            rhs: readback(genv, depth, rhs),
            witness: readback(genv, depth, witness),
        }),
        Value::Neutral(n) => readback_neutral(genv, depth, n),
    }
}

fn readback_neutral(genv: &GlobalEnv, depth: usize, n: &Neutral) -> TermRef {
    let head = match &n.head {
        Head::Var { level, hint } => var_term(depth, *level, hint),
        Head::Global(g) => Term::synth(TermKind::Ref { name: g.clone() }),
        Head::StuckPath(p) => readback(genv, depth, p),
    };
    n.spine.iter().fold(head, |acc, frame| readback_frame(genv, depth, acc, frame))
}

fn readback_frame(genv: &GlobalEnv, depth: usize, head: TermRef, frame: &Frame) -> TermRef {
    match frame {
        Frame::App(a) => Term::synth(TermKind::App {
            function: head,
            argument: readback(genv, depth, a),
        }),
        Frame::Fst => Term::synth(TermKind::Fst { pair: head }),
        Frame::Snd => Term::synth(TermKind::Snd { pair: head }),
        Frame::NatRec { motive, zero_case, succ_case } => {
            let (m_hint, m_body) = readback_closure1(genv, depth, motive, "n");
            let (s_hints, s_body) = readback_closure2(genv, depth, succ_case, "k", "ih");
            Term::synth(TermKind::NatRec {
                motive_hint: m_hint,
                motive: m_body,
                zero_case: readback(genv, depth, zero_case),
                succ_hints: s_hints,
                succ_case: s_body,
                scrutinee: head,
            })
        }
        Frame::J { ty, base, motive, refl_case, endpoint } => {
            let (m_hints, m_body) = readback_closure2(genv, depth, motive, "e", "p");
            Term::synth(TermKind::J {
                ty: readback(genv, depth, ty),
                base: readback(genv, depth, base),
                motive_hints: m_hints,
                motive: m_body,
                refl_case: readback(genv, depth, refl_case),
                endpoint: readback(genv, depth, endpoint),
                path: head,
            })
        }
        Frame::QElim { carrier, relation, motive, point_case, coh_case } => {
            let (m_hint, m_body) = readback_closure1(genv, depth, motive, "q");
            let (p_hint, p_body) = readback_closure1(genv, depth, point_case, "a");
            let (c_hints, c_body) = readback_closure3(genv, depth, coh_case, "a", "b", "r");
            Term::synth(TermKind::QElim {
                carrier: readback(genv, depth, carrier),
                relation: readback(genv, depth, relation),
                motive_hint: m_hint,
                motive: m_body,
                point_hint: p_hint,
                point_case: p_body,
                coh_hints: c_hints,
                coh_case: c_body,
                scrutinee: head,
            })
        }
    }
}

fn readback_closure1(
    genv: &GlobalEnv,
    depth: usize,
    c: &Closure,
    hint: &str,
) -> (Name, TermRef) {
    let h = name(hint);
    let x = Value::var(depth, h.clone());
    (h, readback(genv, depth + 1, &apply_closure(genv, c, x)))
}

fn readback_closure2(
    genv: &GlobalEnv,
    depth: usize,
    c: &Closure2,
    h1: &str,
    h2: &str,
) -> ((Name, Name), TermRef) {
    let (n1, n2) = (name(h1), name(h2));
    let x = Value::var(depth, n1.clone());
    let y = Value::var(depth + 1, n2.clone());
    ((n1, n2), readback(genv, depth + 2, &apply_closure2(genv, c, x, y)))
}

fn readback_closure3(
    genv: &GlobalEnv,
    depth: usize,
    c: &Closure3,
    h1: &str,
    h2: &str,
    h3: &str,
) -> ((Name, Name, Name), TermRef) {
    let (n1, n2, n3) = (name(h1), name(h2), name(h3));
    let x = Value::var(depth, n1.clone());
    let y = Value::var(depth + 1, n2.clone());
    let z = Value::var(depth + 2, n3.clone());
    ((n1, n2, n3), readback(genv, depth + 3, &apply_closure3(genv, c, x, y, z)))
}

/// Type-directed readback: produces the eta-long normal form of `v` at
/// type `ty`. Requires the context for the types of free variables.
pub fn readback_at(ctx: &Ctx<'_>, ty: &ValueRef, v: &ValueRef) -> TermRef {
    let genv = ctx.genv;
    match ty.as_ref() {
        Value::Pi { hint, domain, codomain } => {
            let (ctx2, x) = ctx.bind(hint.clone(), domain.clone());
            let body = apply(genv, v, x.clone());
            let cod = apply_closure(genv, codomain, x);
            Term::synth(TermKind::Lam {
                hint: hint.clone(),
                annotation: None,
                body: readback_at(&ctx2, &cod, &body),
            })
        }
        Value::Sigma { first, second, .. } => {
            let vf = project_fst(genv, v);
            let second = apply_closure(genv, second, vf.clone());
            let vs = crate::eval::project_snd(genv, v);
            Term::synth(TermKind::Pair {
                first: readback_at(ctx, first, &vf),
                second: readback_at(ctx, &second, &vs),
            })
        }
        Value::Unit => Term::synth(TermKind::Star),
        Value::Universe(_) => readback_type(ctx, v),
        Value::Nat => match v.as_ref() {
            Value::Zero => Term::synth(TermKind::Zero),
            Value::Succ(p) => Term::synth(TermKind::Succ { pred: readback_at(ctx, ty, p) }),
            Value::Neutral(n) => readback_neutral_at(ctx, n).0,
            other => panic!("readback: non-numeral at Nat: {other:?}"),
        },
        Value::Id { ty: inner, lhs, .. } => match v.as_ref() {
            // The identity type pins both endpoints, so the canonical
            // readback of any refl is built from the type itself.
            Value::Refl { .. } => Term::synth(TermKind::Refl {
                ty: readback_type(ctx, inner),
                point: readback_at(ctx, inner, lhs),
            }),
            Value::QPath { carrier, relation, lhs, rhs, witness } => {
                let w_ty = sem::relation_applied(genv, relation, lhs, rhs);
                Term::synth(TermKind::QPath {
                    carrier: readback_type(ctx, carrier),
                    relation: readback_at(ctx, &sem::relation_ty(carrier), relation),
                    lhs: readback_at(ctx, carrier, lhs),
                    rhs: readback_at(ctx, carrier, rhs),
                    witness: readback_at(ctx, &w_ty, witness),
                })
            }
            Value::Neutral(n) => readback_neutral_at(ctx, n).0,
            other => panic!("readback: non-path at Id: {other:?}"),
        },
        Value::Quot { carrier, relation } => match v.as_ref() {
            Value::QMk { point, .. } => Term::synth(TermKind::QMk {
                carrier: readback_type(ctx, carrier),
                relation: readback_at(ctx, &sem::relation_ty(carrier), relation),
                point: readback_at(ctx, carrier, point),
            }),
            Value::Neutral(n) => readback_neutral_at(ctx, n).0,
            other => panic!("readback: non-point at Quot: {other:?}"),
        },
        Value::Neutral(_) => match v.as_ref() {
            Value::Neutral(n) => readback_neutral_at(ctx, n).0,
            other => panic!("readback: canonical value at neutral type: {other:?}"),
        },
        other => panic!("readback: not a type: {other:?}"),
    }
}

/// Readback of a type value (a value inhabiting some universe).
pub fn readback_type(ctx: &Ctx<'_>, v: &ValueRef) -> TermRef {
    let genv = ctx.genv;
    match v.as_ref() {
        Value::Universe(level) => Term::synth(TermKind::Universe { level: *level }),
        Value::Pi { hint, domain, codomain } => {
            let (ctx2, x) = ctx.bind(hint.clone(), domain.clone());
            let cod = apply_closure(genv, codomain, x);
            Term::synth(TermKind::Pi {
                hint: hint.clone(),
                domain: readback_type(ctx, domain),
                codomain: readback_type(&ctx2, &cod),
            })
        }
        Value::Sigma { hint, first, second } => {
            let (ctx2, x) = ctx.bind(hint.clone(), first.clone());
            let snd = apply_closure(genv, second, x);
            Term::synth(TermKind::Sigma {
                hint: hint.clone(),
                first: readback_type(ctx, first),
                second: readback_type(&ctx2, &snd),
            })
        }
        Value::Nat => Term::synth(TermKind::Nat),
        Value::Unit => Term::synth(TermKind::Unit),
        Value::Id { ty, lhs, rhs } => Term::synth(TermKind::Id {
            ty: readback_type(ctx, ty),
            lhs: readback_at(ctx, ty, lhs),
            rhs: readback_at(ctx, ty, rhs),
        }),
        Value::Quot { carrier, relation } => Term::synth(TermKind::Quot {
            carrier: readback_type(ctx, carrier),
            relation: readback_at(ctx, &sem::relation_ty(carrier), relation),
        }),
        Value::Neutral(n) => readback_neutral_at(ctx, n).0,
        other => panic!("readback_type: not a type: {other:?}"),
    }
}

/// Typed readback of a neutral; returns the rebuilt term and its type,
/// derived by walking the spine from the head's type.
pub fn readback_neutral_at(ctx: &Ctx<'_>, n: &Neutral) -> (TermRef, ValueRef) {
    let genv = ctx.genv;
    let (mut term, mut ty) = match &n.head {
        Head::Var { level, hint } => {
            (var_term(ctx.depth(), *level, hint), ctx.lookup_level(*level).clone())
        }
        Head::Global(g) => {
            let entry = genv.lookup(g).expect("axiom head not in environment");
            (Term::synth(TermKind::Ref { name: g.clone() }), entry.ty_value.clone())
        }
        Head::StuckPath(p) => {
            let id_ty = sem::qpath_id_ty(p);
            (readback_at(ctx, &id_ty, p), id_ty)
        }
    };
    let mut prefix = Neutral { head: n.head.clone(), spine: Vec::new() };
    for frame in &n.spine {
        let (t2, ty2) = readback_frame_at(ctx, term, &ty, &prefix, frame);
        term = t2;
        ty = ty2;
        prefix.spine.push(frame.clone());
    }
    (term, ty)
}

fn readback_frame_at(
    ctx: &Ctx<'_>,
    head: TermRef,
    ty: &ValueRef,
    prefix: &Neutral,
    frame: &Frame,
) -> (TermRef, ValueRef) {
    let genv = ctx.genv;
    let prefix_value = || Rc::new(Value::Neutral(prefix.clone()));
    match frame {
        Frame::App(a) => {
            let (dom, cod) = sem::as_pi(ty).expect("readback: application of non-function");
            let arg = readback_at(ctx, dom, a);
            let result_ty = apply_closure(genv, cod, a.clone());
            (Term::synth(TermKind::App { function: head, argument: arg }), result_ty)
        }
        Frame::Fst => {
            let (first, _) = sem::as_sigma(ty).expect("readback: fst of non-pair");
            (Term::synth(TermKind::Fst { pair: head }), first.clone())
        }
        Frame::Snd => {
            let (_, second) = sem::as_sigma(ty).expect("readback: snd of non-pair");
            let fst_of_prefix = project_fst(genv, &prefix_value());
            let result_ty = apply_closure(genv, second, fst_of_prefix);
            (Term::synth(TermKind::Snd { pair: head }), result_ty)
        }
        Frame::NatRec { motive, zero_case, succ_case } => {
            let nat = Rc::new(Value::Nat);
            let (ctx_n, nv) = ctx.bind(name("n"), nat.clone());
            let motive_body = readback_type(&ctx_n, &apply_closure(genv, motive, nv));
            let at_zero = apply_closure(genv, motive, Rc::new(Value::Zero));
            let zero_tm = readback_at(ctx, &at_zero, zero_case);
            let (ctx_k, k) = ctx.bind(name("k"), nat);
            let at_k = apply_closure(genv, motive, k.clone());
            let (ctx_ih, ih) = ctx_k.bind(name("ih"), at_k);
            let s_body = apply_closure2(genv, succ_case, k.clone(), ih);
            let at_succ = apply_closure(genv, motive, Rc::new(Value::Succ(k)));
            let succ_tm = readback_at(&ctx_ih, &at_succ, &s_body);
            let result_ty = apply_closure(genv, motive, prefix_value());
            (
                Term::synth(TermKind::NatRec {
                    motive_hint: name("n"),
                    motive: motive_body,
                    zero_case: zero_tm,
                    succ_hints: (name("k"), name("ih")),
                    succ_case: succ_tm,
                    scrutinee: head,
                }),
                result_ty,
            )
        }
        Frame::J { ty: t, base, motive, refl_case, endpoint } => {
            let (ctx_e, e) = ctx.bind(name("e"), t.clone());
            let id_ty = Rc::new(Value::Id { ty: t.clone(), lhs: base.clone(), rhs: e.clone() });
            let (ctx_p, p) = ctx_e.bind(name("p"), id_ty);
            let motive_body =
                readback_type(&ctx_p, &apply_closure2(genv, motive, e.clone(), p.clone()));
            let refl = Rc::new(Value::Refl { ty: t.clone(), point: base.clone() });
            let at_refl = apply_closure2(genv, motive, base.clone(), refl);
            let refl_tm = readback_at(ctx, &at_refl, refl_case);
            let result_ty = sem::j_result_ty(genv, motive, endpoint, prefix_value());
            (
                Term::synth(TermKind::J {
                    ty: readback_type(ctx, t),
                    base: readback_at(ctx, t, base),
                    motive_hints: (name("e"), name("p")),
                    motive: motive_body,
                    refl_case: refl_tm,
                    endpoint: readback_at(ctx, t, endpoint),
                    path: head,
                }),
                result_ty,
            )
        }
        Frame::QElim { carrier, relation, motive, point_case, coh_case } => {
            let quot_ty =
                Rc::new(Value::Quot { carrier: carrier.clone(), relation: relation.clone() });
            let (ctx_q, q) = ctx.bind(name("q"), quot_ty);
            let motive_body = readback_type(&ctx_q, &apply_closure(genv, motive, q));
            let (ctx_a, a) = ctx.bind(name("a"), carrier.clone());
            let qmk_a = Rc::new(Value::QMk {
                carrier: carrier.clone(),
                relation: relation.clone(),
                point: a.clone(),
            });
            let at_qmk = apply_closure(genv, motive, qmk_a);
            let point_tm = readback_at(&ctx_a, &at_qmk, &apply_closure(genv, point_case, a.clone()));
            let (ctx_b, b) = ctx_a.bind(name("b"), carrier.clone());
            let r_ty = sem::relation_applied(genv, relation, &a, &b);
            let (ctx_r, r) = ctx_b.bind(name("r"), r_ty);
            let coh_ty = sem::qelim_coh_ty(genv, carrier, relation, motive, point_case, &a, &b, &r);
            let coh_val = apply_closure3(genv, coh_case, a, b, r);
            let coh_tm = readback_at(&ctx_r, &coh_ty, &coh_val);
            let result_ty = apply_closure(genv, motive, prefix_value());
            (
                Term::synth(TermKind::QElim {
                    carrier: readback_type(ctx, carrier),
                    relation: readback_at(ctx, &sem::relation_ty(carrier), relation),
                    motive_hint: name("q"),
                    motive: motive_body,
                    point_hint: name("a"),
                    point_case: point_tm,
                    coh_hints: (name("a"), name("b"), name("r")),
                    coh_case: coh_tm,
                    scrutinee: head,
                }),
                result_ty,
            )
        }
    }
}
