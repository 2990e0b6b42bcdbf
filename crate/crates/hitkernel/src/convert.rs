//! Type-directed conversion: decides judgmental equality with eta for
//! functions, pairs, and Unit. Neutral spines are compared frame by
//! frame, re-deriving the type along the spine so arguments are compared
//! at their actual types.

use std::rc::Rc;

use crate::ctx::Ctx;
use crate::eval::{apply, apply_closure, apply_closure2, apply_closure3, project_fst, project_snd};
use crate::sem;
use crate::term::name;
use crate::value::{Closure, Closure2, Frame, Head, Neutral, Value, ValueRef};

/// Are `v` and `w` definitionally equal inhabitants of `ty`?
pub fn convertible(ctx: &Ctx<'_>, v: &ValueRef, w: &ValueRef, ty: &ValueRef) -> bool {
    match ty.as_ref() {
        Value::Pi { hint, domain, codomain } => {
            let (ctx2, x) = ctx.bind(hint.clone(), domain.clone());
            let vx = apply(ctx.genv, v, x.clone());
            let wx = apply(ctx.genv, w, x.clone());
            let cod = apply_closure(ctx.genv, codomain, x);
            convertible(&ctx2, &vx, &wx, &cod)
        }
        Value::Sigma { first, second, .. } => {
            let vf = project_fst(ctx.genv, v);
            let wf = project_fst(ctx.genv, w);
            if !convertible(ctx, &vf, &wf, first) {
                return false;
            }
            let vs = project_snd(ctx.genv, v);
            let ws = project_snd(ctx.genv, w);
            let second = apply_closure(ctx.genv, second, vf);
            convertible(ctx, &vs, &ws, &second)
        }
        // Unit eta: all inhabitants of Unit are equal.
        Value::Unit => true,
        Value::Universe(_) => types_convertible(ctx, v, w),
        Value::Nat => match (v.as_ref(), w.as_ref()) {
            (Value::Zero, Value::Zero) => true,
            (Value::Succ(a), Value::Succ(b)) => convertible(ctx, a, b, ty),
            (Value::Neutral(n1), Value::Neutral(n2)) => neutrals_convertible(ctx, n1, n2).is_some(),
            _ => false,
        },
        Value::Id { .. } => match (v.as_ref(), w.as_ref()) {
            // Both endpoints are pinned by the type, so any two refls at
            // the same identity type agree.
            (Value::Refl { .. }, Value::Refl { .. }) => true,
            (
                Value::QPath { carrier, relation, lhs, rhs, witness },
                Value::QPath {
                    carrier: carrier2,
                    relation: relation2,
                    lhs: lhs2,
                    rhs: rhs2,
                    witness: witness2,
                },
            ) => {
                types_convertible(ctx, carrier, carrier2)
                    && convertible(ctx, relation, relation2, &sem::relation_ty(carrier))
                    && convertible(ctx, lhs, lhs2, carrier)
                    && convertible(ctx, rhs, rhs2, carrier)
                    && convertible(
                        ctx,
                        witness,
                        witness2,
                        &sem::relation_applied(ctx.genv, relation, lhs, rhs),
                    )
            }
            (Value::Neutral(n1), Value::Neutral(n2)) => neutrals_convertible(ctx, n1, n2).is_some(),
            _ => false,
        },
        Value::Quot { carrier, .. } => match (v.as_ref(), w.as_ref()) {
            (Value::QMk { point: p1, .. }, Value::QMk { point: p2, .. }) => {
                convertible(ctx, p1, p2, carrier)
            }
            (Value::Neutral(n1), Value::Neutral(n2)) => neutrals_convertible(ctx, n1, n2).is_some(),
            _ => false,
        },
        Value::Neutral(_) => match (v.as_ref(), w.as_ref()) {
            (Value::Neutral(n1), Value::Neutral(n2)) => neutrals_convertible(ctx, n1, n2).is_some(),
            _ => false,
        },
        other => panic!("convertible: comparison at a non-type value: {other:?}"),
    }
}

/// Equality of type values. Universe levels compare exactly; cumulativity
/// is handled by subsumption at check sites, not here.
pub fn types_convertible(ctx: &Ctx<'_>, v: &ValueRef, w: &ValueRef) -> bool {
    match (v.as_ref(), w.as_ref()) {
        (Value::Universe(i), Value::Universe(j)) => i == j,
        (
            Value::Pi { hint, domain: d1, codomain: c1 },
            Value::Pi { domain: d2, codomain: c2, .. },
        ) => {
            types_convertible(ctx, d1, d2) && {
                let (ctx2, x) = ctx.bind(hint.clone(), d1.clone());
                let b1 = apply_closure(ctx.genv, c1, x.clone());
                let b2 = apply_closure(ctx.genv, c2, x);
                types_convertible(&ctx2, &b1, &b2)
            }
        }
        (
            Value::Sigma { hint, first: d1, second: c1 },
            Value::Sigma { first: d2, second: c2, .. },
        ) => {
            types_convertible(ctx, d1, d2) && {
                let (ctx2, x) = ctx.bind(hint.clone(), d1.clone());
                let b1 = apply_closure(ctx.genv, c1, x.clone());
                let b2 = apply_closure(ctx.genv, c2, x);
                types_convertible(&ctx2, &b1, &b2)
            }
        }
        (Value::Nat, Value::Nat) | (Value::Unit, Value::Unit) => true,
        (
            Value::Id { ty: t1, lhs: a1, rhs: b1 },
            Value::Id { ty: t2, lhs: a2, rhs: b2 },
        ) => {
            types_convertible(ctx, t1, t2)
                && convertible(ctx, a1, a2, t1)
                && convertible(ctx, b1, b2, t1)
        }
        (
            Value::Quot { carrier: a1, relation: r1 },
            Value::Quot { carrier: a2, relation: r2 },
        ) => {
            types_convertible(ctx, a1, a2)
                && convertible(ctx, r1, r2, &sem::relation_ty(a1))
        }
        (Value::Neutral(n1), Value::Neutral(n2)) => neutrals_convertible(ctx, n1, n2).is_some(),
        _ => false,
    }
}

/// Compare two neutrals; on success returns their common type. Heads must
/// agree and spines must match frame by frame.
pub fn neutrals_convertible(ctx: &Ctx<'_>, n1: &Neutral, n2: &Neutral) -> Option<ValueRef> {
    let mut ty = heads_convertible(ctx, &n1.head, &n2.head)?;
    if n1.spine.len() != n2.spine.len() {
        return None;
    }
    // Rebuilt prefix of the first neutral, for frames whose result type
    // mentions the scrutinee.
    let mut prefix = Neutral { head: n1.head.clone(), spine: Vec::new() };
    for (f1, f2) in n1.spine.iter().zip(&n2.spine) {
        ty = frame_convertible(ctx, &ty, &prefix, f1, f2)?;
        prefix.spine.push(f1.clone());
    }
    Some(ty)
}

fn heads_convertible(ctx: &Ctx<'_>, h1: &Head, h2: &Head) -> Option<ValueRef> {
    match (h1, h2) {
        (Head::Var { level: l1, .. }, Head::Var { level: l2, .. }) if l1 == l2 => {
            Some(ctx.lookup_level(*l1).clone())
        }
        (Head::Global(a), Head::Global(b)) if a == b => {
            Some(ctx.genv.lookup(a).expect("axiom head not in environment").ty_value.clone())
        }
        (Head::StuckPath(p1), Head::StuckPath(p2)) => {
            let id_ty = sem::qpath_id_ty(p1);
            if convertible(ctx, p1, p2, &id_ty) {
                Some(id_ty)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn frame_convertible(
    ctx: &Ctx<'_>,
    ty: &ValueRef,
    prefix: &Neutral,
    f1: &Frame,
    f2: &Frame,
) -> Option<ValueRef> {
    let genv = ctx.genv;
    let prefix_value = || Rc::new(Value::Neutral(prefix.clone()));
    match (f1, f2) {
        (Frame::App(a1), Frame::App(a2)) => {
            let (dom, cod) = sem::as_pi(ty)?;
            if !convertible(ctx, a1, a2, dom) {
                return None;
            }
            Some(apply_closure(genv, cod, a1.clone()))
        }
        (Frame::Fst, Frame::Fst) => {
            let (first, _) = sem::as_sigma(ty)?;
            Some(first.clone())
        }
        (Frame::Snd, Frame::Snd) => {
            let (_, second) = sem::as_sigma(ty)?;
            let fst_of_prefix = project_fst(genv, &prefix_value());
            Some(apply_closure(genv, second, fst_of_prefix))
        }
        (
            Frame::NatRec { motive: m1, zero_case: z1, succ_case: s1 },
            Frame::NatRec { motive: m2, zero_case: z2, succ_case: s2 },
        ) => {
            if !motive1_convertible(ctx, &Rc::new(Value::Nat), m1, m2) {
                return None;
            }
            let at_zero = apply_closure(genv, m1, Rc::new(Value::Zero));
            if !convertible(ctx, z1, z2, &at_zero) {
                return None;
            }
            // succ case under (k : Nat, ih : motive k) at motive (succ k)
            let (ctx_k, k) = ctx.bind(name("k"), Rc::new(Value::Nat));
            let at_k = apply_closure(genv, m1, k.clone());
            let (ctx_ih, ih) = ctx_k.bind(name("ih"), at_k);
            let s1v = apply_closure2(genv, s1, k.clone(), ih.clone());
            let s2v = apply_closure2(genv, s2, k.clone(), ih);
            let at_succ = apply_closure(genv, m1, Rc::new(Value::Succ(k)));
            if !convertible(&ctx_ih, &s1v, &s2v, &at_succ) {
                return None;
            }
            Some(apply_closure(genv, m1, prefix_value()))
        }
        (
            Frame::J { ty: t1, base: b1, motive: m1, refl_case: r1, endpoint: e1 },
            Frame::J { motive: m2, refl_case: r2, .. },
        ) => {
            // The scrutinee's identity type pins ty, base, and endpoint;
            // only the motive and refl case are free to differ.
            if !motive2_convertible(ctx, t1, b1, m1, m2) {
                return None;
            }
            let refl = Rc::new(Value::Refl { ty: t1.clone(), point: b1.clone() });
            let at_refl = apply_closure2(genv, m1, b1.clone(), refl);
            if !convertible(ctx, r1, r2, &at_refl) {
                return None;
            }
            Some(sem::j_result_ty(genv, m1, e1, prefix_value()))
        }
        (
            Frame::QElim { carrier, relation, motive: m1, point_case: p1, coh_case: c1 },
            Frame::QElim { motive: m2, point_case: p2, coh_case: c2, .. },
        ) => {
            let quot_ty = Rc::new(Value::Quot {
                carrier: carrier.clone(),
                relation: relation.clone(),
            });
            if !motive1_convertible(ctx, &quot_ty, m1, m2) {
                return None;
            }
            // point case under a : carrier at motive (qmk a)
            let (ctx_a, a) = ctx.bind(name("a"), carrier.clone());
            let qmk_a = Rc::new(Value::QMk {
                carrier: carrier.clone(),
                relation: relation.clone(),
                point: a.clone(),
            });
            let at_qmk = apply_closure(genv, m1, qmk_a);
            let p1v = apply_closure(genv, p1, a.clone());
            let p2v = apply_closure(genv, p2, a.clone());
            if !convertible(&ctx_a, &p1v, &p2v, &at_qmk) {
                return None;
            }
            // coherence case under a, b : carrier and r : R a b
            let (ctx_b, b) = ctx_a.bind(name("b"), carrier.clone());
            let r_ty = sem::relation_applied(genv, relation, &a, &b);
            let (ctx_r, r) = ctx_b.bind(name("r"), r_ty);
            let coh_ty = sem::qelim_coh_ty(genv, carrier, relation, m1, p1, &a, &b, &r);
            let c1v = apply_closure3(genv, c1, a.clone(), b.clone(), r.clone());
            let c2v = apply_closure3(genv, c2, a, b, r);
            if !convertible(&ctx_r, &c1v, &c2v, &coh_ty) {
                return None;
            }
            Some(apply_closure(genv, m1, prefix_value()))
        }
        _ => None,
    }
}

/// Compare one-variable type motives over `dom` pointwise.
fn motive1_convertible(ctx: &Ctx<'_>, dom: &ValueRef, m1: &Closure, m2: &Closure) -> bool {
    let (ctx2, x) = ctx.bind(name("x"), dom.clone());
    let b1 = apply_closure(ctx.genv, m1, x.clone());
    let b2 = apply_closure(ctx.genv, m2, x);
    types_convertible(&ctx2, &b1, &b2)
}

/// Compare J motives over `(e : ty, p : Id ty base e)` pointwise.
fn motive2_convertible(
    ctx: &Ctx<'_>,
    ty: &ValueRef,
    base: &ValueRef,
    m1: &Closure2,
    m2: &Closure2,
) -> bool {
    let (ctx_e, e) = ctx.bind(name("e"), ty.clone());
    let id_ty = Rc::new(Value::Id { ty: ty.clone(), lhs: base.clone(), rhs: e.clone() });
    let (ctx_p, p) = ctx_e.bind(name("p"), id_ty);
    let b1 = apply_closure2(ctx.genv, m1, e.clone(), p.clone());
    let b2 = apply_closure2(ctx.genv, m2, e, p);
    types_convertible(&ctx_p, &b1, &b2)
}
