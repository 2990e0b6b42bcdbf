//! Semantic helpers shared by conversion, readback, and the checker:
//! destructors for type values and builders for the kernel's internal
//! derived types (the quotient eliminator's coherence type in
//! particular).

use std::rc::Rc;

use crate::eval::{apply, apply_closure};
use crate::term::{name, shift, Term, TermKind};
use crate::value::{Closure, Closure2, Env, Frame, GlobalEnv, Head, Neutral, Value, ValueRef};

pub fn as_pi(v: &Value) -> Option<(&ValueRef, &Closure)> {
    match v {
        Value::Pi { domain, codomain, .. } => Some((domain, codomain)),
        _ => None,
    }
}

pub fn as_sigma(v: &Value) -> Option<(&ValueRef, &Closure)> {
    match v {
        Value::Sigma { first, second, .. } => Some((first, second)),
        _ => None,
    }
}

/// The type `A -> A -> Type0` as a value. Conversion and readback at a
/// universe ignore the level, so a fixed level works for relations
/// landing anywhere.
pub fn relation_ty(carrier: &ValueRef) -> ValueRef {
    let inner = Term::synth(TermKind::Pi {
        hint: name("_"),
        // Var(1) is the carrier pushed into the closure environment below
        domain: Term::var(1, name("A"), crate::span::Span::synth()),
        codomain: Term::synth(TermKind::Universe { level: 0 }),
    });
    Rc::new(Value::Pi {
        hint: name("_"),
        domain: carrier.clone(),
        codomain: Closure { env: Env::empty().extend(carrier.clone()), body: inner },
    })
}

/// Type of a canonical quotient path: `Id (quot A R) (qmk A R lhs) (qmk A R rhs)`.
pub fn qpath_id_ty(q: &Value) -> ValueRef {
    match q {
        Value::QPath { carrier, relation, lhs, rhs, .. } => Rc::new(Value::Id {
            ty: Rc::new(Value::Quot {
                carrier: carrier.clone(),
                relation: relation.clone(),
            }),
            lhs: Rc::new(Value::QMk {
                carrier: carrier.clone(),
                relation: relation.clone(),
                point: lhs.clone(),
            }),
            rhs: Rc::new(Value::QMk {
                carrier: carrier.clone(),
                relation: relation.clone(),
                point: rhs.clone(),
            }),
        }),
        _ => panic!("qpath_id_ty: not a quotient path"),
    }
}

/// Widen a one-variable motive into the two-variable motive `(z, _) => P z`
/// used by the fixed J-expansion of transport.
pub fn widen_motive(motive: &Closure) -> Closure2 {
    Closure2 { env: motive.env.clone(), body: shift(&motive.body, 1) }
}

/// The kernel-internal transport of `point_case a` along `qpath a b r`,
/// i.e. the fixed J-expansion
/// `J (quot A R) (qmk a) ((z, _) => P z) (point_case a) (qmk b)` stuck on
/// the path constructor.
pub fn qelim_transport(
    genv: &GlobalEnv,
    carrier: &ValueRef,
    relation: &ValueRef,
    motive: &Closure,
    point_case: &Closure,
    a: &ValueRef,
    b: &ValueRef,
    r: &ValueRef,
) -> ValueRef {
    let qmk = |p: &ValueRef| {
        Rc::new(Value::QMk {
            carrier: carrier.clone(),
            relation: relation.clone(),
            point: p.clone(),
        })
    };
    let qpath = Rc::new(Value::QPath {
        carrier: carrier.clone(),
        relation: relation.clone(),
        lhs: a.clone(),
        rhs: b.clone(),
        witness: r.clone(),
    });
    let frame = Frame::J {
        ty: Rc::new(Value::Quot { carrier: carrier.clone(), relation: relation.clone() }),
        base: qmk(a),
        motive: widen_motive(motive),
        refl_case: apply_closure(genv, point_case, a.clone()),
        endpoint: qmk(b),
    };
    Rc::new(Value::Neutral(Neutral { head: Head::StuckPath(qpath), spine: vec![frame] }))
}

/// Expected type of the quotient eliminator's coherence case at points
/// `a`, `b` with witness `r`:
/// `Id (P (qmk b)) (transport P (qpath a b r) (point_case a)) (point_case b)`.
pub fn qelim_coh_ty(
    genv: &GlobalEnv,
    carrier: &ValueRef,
    relation: &ValueRef,
    motive: &Closure,
    point_case: &Closure,
    a: &ValueRef,
    b: &ValueRef,
    r: &ValueRef,
) -> ValueRef {
    let qmk_b = Rc::new(Value::QMk {
        carrier: carrier.clone(),
        relation: relation.clone(),
        point: b.clone(),
    });
    Rc::new(Value::Id {
        ty: apply_closure(genv, motive, qmk_b),
        lhs: qelim_transport(genv, carrier, relation, motive, point_case, a, b, r),
        rhs: apply_closure(genv, point_case, b.clone()),
    })
}

/// Type of the path witnessing `R a b` (the relation applied to both points).
pub fn relation_applied(
    genv: &GlobalEnv,
    relation: &ValueRef,
    a: &ValueRef,
    b: &ValueRef,
) -> ValueRef {
    let ra = apply(genv, relation, a.clone());
    apply(genv, &ra, b.clone())
}

/// Result type of a J frame: the motive at the path's endpoint.
pub fn j_result_ty(
    genv: &GlobalEnv,
    motive: &Closure2,
    endpoint: &ValueRef,
    path: ValueRef,
) -> ValueRef {
    crate::eval::apply_closure2(genv, motive, endpoint.clone(), path)
}
