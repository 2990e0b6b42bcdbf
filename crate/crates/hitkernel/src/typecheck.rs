//! Bidirectional type checking against the kernel's typing rules:
//! inference for all fully-applied primitive forms, checking for
//! unannotated lambdas and pairs, cumulativity by subsumption at
//! universe boundaries.

use std::rc::Rc;

use crate::ctx::Ctx;
use crate::diag::{codes, DiagResult, Diagnostic};
use crate::eval::{apply_closure, apply_closure2, eval, eval_closed};
use crate::quote::{readback, readback_at, readback_type};
use crate::sem;
use crate::span::Span;
use crate::term::{TermKind, TermRef};
use crate::value::{Closure, Closure2, DeclKind, GlobalEntry, GlobalEnv, Value, ValueRef};

fn ctx_eval(ctx: &Ctx<'_>, t: &TermRef) -> ValueRef {
    eval(ctx.genv, &ctx.env, t)
}

fn show(ctx: &Ctx<'_>, v: &ValueRef) -> String {
    let term = readback(ctx.genv, ctx.depth(), v);
    crate::pretty::pretty(&term, &crate::pretty::Options::default())
}

fn mismatch(ctx: &Ctx<'_>, expected: &ValueRef, actual: &ValueRef, span: Span) -> Diagnostic {
    Diagnostic::error(
        codes::MISMATCH,
        format!(
            "type mismatch: expected `{}`, got `{}`",
            show(ctx, expected),
            show(ctx, actual)
        ),
        span,
    )
}

/// Infer the unique type of a term.
pub fn infer(ctx: &Ctx<'_>, t: &TermRef) -> DiagResult<ValueRef> {
    use TermKind::*;
    match &t.kind {
        Var { index, hint } => match ctx.lookup_index(*index) {
            Some(ty) => Ok(ty.clone()),
            None => Err(Diagnostic::error(
                codes::UNBOUND,
                format!("variable `{hint}` escapes its scope"),
                t.span,
            )),
        },
        Universe { level } => {
            let max = ctx.genv.config.max_level;
            if level + 1 > max {
                Err(Diagnostic::error(
                    codes::UNIVERSE,
                    format!("universe level {} exceeds the maximum level {max}", level + 1),
                    t.span,
                ))
            } else {
                Ok(Value::universe(level + 1))
            }
        }
        Pi { hint, domain, codomain } => {
            let (dom_v, i) = check_is_type(ctx, domain)?;
            let (ctx2, _) = ctx.bind(hint.clone(), dom_v);
            let (_, j) = check_is_type(&ctx2, codomain)?;
            Ok(Value::universe(i.max(j)))
        }
        Lam { hint, annotation, body } => match annotation {
            Some(ann) => {
                let (dom_v, _) = check_is_type(ctx, ann)?;
                let (ctx2, _) = ctx.bind(hint.clone(), dom_v.clone());
                let body_ty = infer(&ctx2, body)?;
                let cod_body = readback_type(&ctx2, &body_ty);
                Ok(Rc::new(Value::Pi {
                    hint: hint.clone(),
                    domain: dom_v,
                    codomain: Closure { env: ctx.env.clone(), body: cod_body },
                }))
            }
            None => Err(Diagnostic::error(
                codes::NO_INFER,
                "cannot infer the type of an unannotated function; \
                 add an annotation or check against an expected type",
                t.span,
            )),
        },
        App { function, argument } => {
            let fn_ty = infer(ctx, function)?;
            let (dom, cod) = sem::as_pi(&fn_ty).ok_or_else(|| {
                Diagnostic::error(
                    codes::NOT_FUNCTION,
                    format!("this has type `{}`, which is not a function type", show(ctx, &fn_ty)),
                    function.span,
                )
            })?;
            check(ctx, argument, dom)?;
            Ok(apply_closure(ctx.genv, cod, ctx_eval(ctx, argument)))
        }
        Sigma { hint, first, second } => {
            let (fst_v, i) = check_is_type(ctx, first)?;
            let (ctx2, _) = ctx.bind(hint.clone(), fst_v);
            let (_, j) = check_is_type(&ctx2, second)?;
            Ok(Value::universe(i.max(j)))
        }
        Pair { .. } => Err(Diagnostic::error(
            codes::NO_INFER,
            "cannot infer the type of a bare pair; check it against a pair type",
            t.span,
        )),
        Fst { pair } => {
            let ty = infer(ctx, pair)?;
            let (first, _) = sem::as_sigma(&ty).ok_or_else(|| not_pair(ctx, &ty, pair.span))?;
            Ok(first.clone())
        }
        Snd { pair } => {
            let ty = infer(ctx, pair)?;
            let (_, second) = sem::as_sigma(&ty).ok_or_else(|| not_pair(ctx, &ty, pair.span))?;
            let fst_v = crate::eval::project_fst(ctx.genv, &ctx_eval(ctx, pair));
            Ok(apply_closure(ctx.genv, second, fst_v))
        }
        Nat | Unit => Ok(Value::universe(0)),
        Zero => Ok(Rc::new(Value::Nat)),
        Succ { pred } => {
            check(ctx, pred, &Rc::new(Value::Nat))?;
            Ok(Rc::new(Value::Nat))
        }
        Star => Ok(Rc::new(Value::Unit)),
        NatRec { motive_hint, motive, zero_case, succ_hints, succ_case, scrutinee } => {
            let nat: ValueRef = Rc::new(Value::Nat);
            // The motive may land in any universe (large elimination).
            let (ctx_n, _) = ctx.bind(motive_hint.clone(), nat.clone());
            check_is_type(&ctx_n, motive)?;
            let motive_cl = Closure { env: ctx.env.clone(), body: motive.clone() };
            let at_zero = apply_closure(ctx.genv, &motive_cl, Rc::new(Value::Zero));
            check(ctx, zero_case, &at_zero)?;
            let (ctx_k, k) = ctx.bind(succ_hints.0.clone(), nat.clone());
            let at_k = apply_closure(ctx.genv, &motive_cl, k.clone());
            let (ctx_ih, _) = ctx_k.bind(succ_hints.1.clone(), at_k);
            let at_succ = apply_closure(ctx.genv, &motive_cl, Rc::new(Value::Succ(k)));
            check(&ctx_ih, succ_case, &at_succ)?;
            check(ctx, scrutinee, &nat)?;
            Ok(apply_closure(ctx.genv, &motive_cl, ctx_eval(ctx, scrutinee)))
        }
        Id { ty, lhs, rhs } => {
            let (ty_v, level) = check_is_type(ctx, ty)?;
            check(ctx, lhs, &ty_v)?;
            check(ctx, rhs, &ty_v)?;
            Ok(Value::universe(level))
        }
        Refl { ty, point } => {
            let (ty_v, _) = check_is_type(ctx, ty)?;
            check(ctx, point, &ty_v)?;
            let p = ctx_eval(ctx, point);
            Ok(Rc::new(Value::Id { ty: ty_v, lhs: p.clone(), rhs: p }))
        }
        J { ty, base, motive_hints, motive, refl_case, endpoint, path } => {
            let (ty_v, _) = check_is_type(ctx, ty)?;
            check(ctx, base, &ty_v)?;
            let base_v = ctx_eval(ctx, base);
            let (ctx_e, e) = ctx.bind(motive_hints.0.clone(), ty_v.clone());
            let id_ty = Rc::new(Value::Id { ty: ty_v.clone(), lhs: base_v.clone(), rhs: e });
            let (ctx_p, _) = ctx_e.bind(motive_hints.1.clone(), id_ty);
            check_is_type(&ctx_p, motive)?;
            let motive_cl = Closure2 { env: ctx.env.clone(), body: motive.clone() };
            let refl = Rc::new(Value::Refl { ty: ty_v.clone(), point: base_v.clone() });
            let at_refl = apply_closure2(ctx.genv, &motive_cl, base_v.clone(), refl);
            check(ctx, refl_case, &at_refl)?;
            check(ctx, endpoint, &ty_v)?;
            let end_v = ctx_eval(ctx, endpoint);
            let path_ty = Rc::new(Value::Id { ty: ty_v, lhs: base_v, rhs: end_v.clone() });
            check(ctx, path, &path_ty)?;
            Ok(apply_closure2(ctx.genv, &motive_cl, end_v, ctx_eval(ctx, path)))
        }
        Quot { carrier, relation } => {
            let (_, _, level) = check_quotient(ctx, carrier, relation)?;
            // The quotient lives in the carrier's universe, whatever
            // universe the relation lands in.
            Ok(Value::universe(level))
        }
        QMk { carrier, relation, point } => {
            let (carrier_v, relation_v, _) = check_quotient(ctx, carrier, relation)?;
            check(ctx, point, &carrier_v)?;
            Ok(Rc::new(Value::Quot { carrier: carrier_v, relation: relation_v }))
        }
        QPath { carrier, relation, lhs, rhs, witness } => {
            let (carrier_v, relation_v, _) = check_quotient(ctx, carrier, relation)?;
            check(ctx, lhs, &carrier_v)?;
            check(ctx, rhs, &carrier_v)?;
            let lhs_v = ctx_eval(ctx, lhs);
            let rhs_v = ctx_eval(ctx, rhs);
            let w_ty = sem::relation_applied(ctx.genv, &relation_v, &lhs_v, &rhs_v);
            check(ctx, witness, &w_ty)?;
            let qmk = |p: ValueRef| {
                Rc::new(Value::QMk {
                    carrier: carrier_v.clone(),
                    relation: relation_v.clone(),
                    point: p,
                })
            };
            Ok(Rc::new(Value::Id {
                ty: Rc::new(Value::Quot {
                    carrier: carrier_v.clone(),
                    relation: relation_v.clone(),
                }),
                lhs: qmk(lhs_v),
                rhs: qmk(rhs_v),
            }))
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
            let (carrier_v, relation_v, _) = check_quotient(ctx, carrier, relation)?;
            let quot_ty = Rc::new(Value::Quot {
                carrier: carrier_v.clone(),
                relation: relation_v.clone(),
            });
            let (ctx_q, _) = ctx.bind(motive_hint.clone(), quot_ty.clone());
            check_is_type(&ctx_q, motive)?;
            let motive_cl = Closure { env: ctx.env.clone(), body: motive.clone() };
            let (ctx_a, a) = ctx.bind(point_hint.clone(), carrier_v.clone());
            let qmk_a = Rc::new(Value::QMk {
                carrier: carrier_v.clone(),
                relation: relation_v.clone(),
                point: a.clone(),
            });
            let at_qmk = apply_closure(ctx.genv, &motive_cl, qmk_a);
            check(&ctx_a, point_case, &at_qmk)?;
            let point_cl = Closure { env: ctx.env.clone(), body: point_case.clone() };
            // Coherence: under a b : carrier and r : R a b, an equality in
            // P (qmk b) between the transported point case and the point
            // case at b. The transport is the kernel's fixed J-expansion.
            let (ctx_ca, ca) = ctx.bind(coh_hints.0.clone(), carrier_v.clone());
            let (ctx_cb, cb) = ctx_ca.bind(coh_hints.1.clone(), carrier_v.clone());
            let r_ty = sem::relation_applied(ctx.genv, &relation_v, &ca, &cb);
            let (ctx_cr, cr) = ctx_cb.bind(coh_hints.2.clone(), r_ty);
            let coh_ty = sem::qelim_coh_ty(
                ctx.genv,
                &carrier_v,
                &relation_v,
                &motive_cl,
                &point_cl,
                &ca,
                &cb,
                &cr,
            );
            check(&ctx_cr, coh_case, &coh_ty)?;
            check(ctx, scrutinee, &quot_ty)?;
            Ok(apply_closure(ctx.genv, &motive_cl, ctx_eval(ctx, scrutinee)))
        }
        Ref { name } => match ctx.genv.lookup(name) {
            Some(entry) => Ok(entry.ty_value.clone()),
            None => Err(Diagnostic::error(
                codes::UNBOUND,
                format!("unknown name `{name}`"),
                t.span,
            )),
        },
    }
}

fn not_pair(ctx: &Ctx<'_>, ty: &ValueRef, span: Span) -> Diagnostic {
    Diagnostic::error(
        codes::NOT_PAIR,
        format!("this has type `{}`, which is not a pair type", show(ctx, ty)),
        span,
    )
}

/// Check the carrier is a type and the relation a binary type family over
/// it; returns their values and the carrier's universe level.
fn check_quotient(
    ctx: &Ctx<'_>,
    carrier: &TermRef,
    relation: &TermRef,
) -> DiagResult<(ValueRef, ValueRef, u32)> {
    let (carrier_v, level) = check_is_type(ctx, carrier)?;
    let rel_ty = infer(ctx, relation)?;
    let bad = |ctx: &Ctx<'_>| {
        Diagnostic::error(
            codes::MISMATCH,
            format!(
                "quotient relation must be a binary type family over the carrier, got `{}`",
                show(ctx, &rel_ty)
            ),
            relation.span,
        )
    };
    let (d1, c1) = sem::as_pi(&rel_ty).ok_or_else(|| bad(ctx))?;
    if !crate::convert::types_convertible(ctx, d1, &carrier_v) {
        return Err(bad(ctx));
    }
    let (ctx_x, x) = ctx.bind(crate::term::name("x"), carrier_v.clone());
    let c1x = apply_closure(ctx.genv, c1, x);
    let (d2, c2) = sem::as_pi(&c1x).ok_or_else(|| bad(&ctx_x))?;
    if !crate::convert::types_convertible(&ctx_x, d2, &carrier_v) {
        return Err(bad(&ctx_x));
    }
    let (ctx_y, y) = ctx_x.bind(crate::term::name("y"), carrier_v.clone());
    let c2y = apply_closure(ctx.genv, c2, y);
    match c2y.as_ref() {
        Value::Universe(_) => Ok((carrier_v, ctx_eval(ctx, relation), level)),
        _ => Err(bad(&ctx_y)),
    }
}

/// Check that `t` is a type; returns its value and universe level.
pub fn check_is_type(ctx: &Ctx<'_>, t: &TermRef) -> DiagResult<(ValueRef, u32)> {
    let ty = infer(ctx, t)?;
    match ty.as_ref() {
        Value::Universe(level) => Ok((ctx_eval(ctx, t), *level)),
        _ => Err(Diagnostic::error(
            codes::MISMATCH,
            format!("expected a type, got a term of type `{}`", show(ctx, &ty)),
            t.span,
        )),
    }
}

/// Check `t` against an expected type value.
pub fn check(ctx: &Ctx<'_>, t: &TermRef, expected: &ValueRef) -> DiagResult<()> {
    use TermKind::*;
    match (&t.kind, expected.as_ref()) {
        (Lam { hint, annotation, body }, Value::Pi { domain, codomain, .. }) => {
            if let Some(ann) = annotation {
                let (ann_v, _) = check_is_type(ctx, ann)?;
                if !crate::convert::types_convertible(ctx, &ann_v, domain) {
                    return Err(mismatch(ctx, domain, &ann_v, ann.span));
                }
            }
            let (ctx2, x) = ctx.bind(hint.clone(), domain.clone());
            let cod = apply_closure(ctx.genv, codomain, x);
            check(&ctx2, body, &cod)
        }
        (Lam { .. }, _) => Err(Diagnostic::error(
            codes::MISMATCH,
            format!("a function cannot have type `{}`", show(ctx, expected)),
            t.span,
        )),
        (Pair { first, second }, Value::Sigma { first: fst_ty, second: snd_ty, .. }) => {
            check(ctx, first, fst_ty)?;
            let fst_v = ctx_eval(ctx, first);
            let snd_expected = apply_closure(ctx.genv, snd_ty, fst_v);
            check(ctx, second, &snd_expected)
        }
        (Pair { .. }, _) => Err(Diagnostic::error(
            codes::MISMATCH,
            format!("a pair cannot have type `{}`", show(ctx, expected)),
            t.span,
        )),
        _ => {
            let inferred = infer(ctx, t)?;
            subsume(ctx, &inferred, expected, t.span)
        }
    }
}

/// Accept `inferred` where `expected` is wanted, with cumulativity at
/// universe boundaries (a term of `Type i` is accepted at `Type j` for
/// `i <= j`); everything else requires conversion.
pub fn subsume(
    ctx: &Ctx<'_>,
    inferred: &ValueRef,
    expected: &ValueRef,
    span: Span,
) -> DiagResult<()> {
    if let (Value::Universe(i), Value::Universe(j)) = (inferred.as_ref(), expected.as_ref()) {
        if i <= j {
            return Ok(());
        }
        return Err(mismatch(ctx, expected, inferred, span));
    }
    if crate::convert::types_convertible(ctx, inferred, expected) {
        Ok(())
    } else {
        Err(mismatch(ctx, expected, inferred, span))
    }
}

/// Full normalization: beta-normal, eta-long form of a checked term.
pub fn normalize(ctx: &Ctx<'_>, t: &TermRef) -> DiagResult<TermRef> {
    let ty = infer(ctx, t)?;
    let v = ctx_eval(ctx, t);
    Ok(readback_at(ctx, &ty, &v))
}

/// Check and install a definition: the stated type must be a type, the
/// body must check against it, and the body is evaluated once so later
/// uses unfold transparently.
pub fn check_definition(
    genv: &GlobalEnv,
    name: &str,
    ty: &TermRef,
    body: &TermRef,
    span: Span,
) -> DiagResult<GlobalEntry> {
    let ctx = Ctx::new(genv);
    let (ty_v, _) = check_is_type(&ctx, ty)?;
    check(&ctx, body, &ty_v)?;
    let body_v = eval_closed(genv, body);
    Ok(GlobalEntry {
        name: name.to_owned(),
        kind: DeclKind::Definition,
        ty_term: ty.clone(),
        ty_value: ty_v,
        body_term: Some(body.clone()),
        body_value: Some(body_v),
        span,
    })
}

/// Check and install an axiom: an opaque constant whose uses stay neutral.
pub fn check_axiom(
    genv: &GlobalEnv,
    name: &str,
    ty: &TermRef,
    span: Span,
) -> DiagResult<GlobalEntry> {
    let ctx = Ctx::new(genv);
    let (ty_v, _) = check_is_type(&ctx, ty)?;
    Ok(GlobalEntry {
        name: name.to_owned(),
        kind: DeclKind::Axiom,
        ty_term: ty.clone(),
        ty_value: ty_v,
        body_term: None,
        body_value: None,
        span,
    })
}

#[allow(unused_imports)]
use crate::term::name as _name_for_tests;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{name, Term};

    fn nat() -> TermRef {
        Term::synth(TermKind::Nat)
    }

    #[test]
    fn infers_nat_in_first_universe() {
        let genv = GlobalEnv::default();
        let ctx = Ctx::new(&genv);
        let ty = infer(&ctx, &nat()).unwrap();
        assert!(matches!(ty.as_ref(), Value::Universe(0)));
    }

    #[test]
    fn checks_unannotated_identity_against_pi() {
        let genv = GlobalEnv::default();
        let ctx = Ctx::new(&genv);
        let id = Term::synth(TermKind::Lam {
            hint: name("x"),
            annotation: None,
            body: Term::var(0, name("x"), Span::synth()),
        });
        let pi = Term::synth(TermKind::Pi { hint: name("x"), domain: nat(), codomain: nat() });
        let (pi_v, _) = check_is_type(&ctx, &pi).unwrap();
        check(&ctx, &id, &pi_v).unwrap();
    }

    #[test]
    fn rejects_application_of_non_function() {
        let genv = GlobalEnv::default();
        let ctx = Ctx::new(&genv);
        let bad = Term::synth(TermKind::App {
            function: Term::synth(TermKind::Zero),
            argument: Term::synth(TermKind::Zero),
        });
        let err = infer(&ctx, &bad).unwrap_err();
        assert_eq!(err.code, codes::NOT_FUNCTION);
    }

    #[test]
    fn universe_overflow_is_reported() {
        let genv = GlobalEnv::default();
        let ctx = Ctx::new(&genv);
        let u = Term::synth(TermKind::Universe { level: crate::term::DEFAULT_MAX_LEVEL });
        let err = infer(&ctx, &u).unwrap_err();
        assert_eq!(err.code, codes::UNIVERSE);
    }

    #[test]
    fn subsumption_lifts_universe_levels() {
        let genv = GlobalEnv::default();
        let ctx = Ctx::new(&genv);
        // Nat : Type0 also checks at Type1
        check(&ctx, &nat(), &Value::universe(1)).unwrap();
        // but not the other way: Type1 is not a Type1
        let u1 = Term::synth(TermKind::Universe { level: 1 });
        assert!(check(&ctx, &u1, &Value::universe(1)).is_err());
    }
}
