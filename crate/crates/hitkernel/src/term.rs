//! Kernel term language: nameless (depth-offset) binding with display-name
//! hints, capture-avoiding substitution, and alpha equality.

use std::fmt;
use std::rc::Rc;

use crate::span::Span;

/// Display hint retained on variables and binding sites. Ignored by
/// `alpha_eq` and by conversion; used only when printing.
pub type Name = Rc<str>;

pub fn name(s: &str) -> Name {
    Rc::from(s)
}

pub type TermRef = Rc<Term>;

/// Highest universe level admitted by default; see `Config`.
pub const DEFAULT_MAX_LEVEL: u32 = 4;

#[derive(Debug, Clone)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum TermKind {
    /// Bound variable as an offset to its binder (0 = innermost).
    Var { index: usize, hint: Name },
    Universe { level: u32 },
    /// `Pi { domain, codomain }`, codomain binds one variable.
    Pi { hint: Name, domain: TermRef, codomain: TermRef },
    /// Lambda; the annotation is optional (checkable against a Pi).
    Lam { hint: Name, annotation: Option<TermRef>, body: TermRef },
    App { function: TermRef, argument: TermRef },
    /// `Sigma { first, second }`, second binds one variable.
    Sigma { hint: Name, first: TermRef, second: TermRef },
    Pair { first: TermRef, second: TermRef },
    Fst { pair: TermRef },
    Snd { pair: TermRef },
    Nat,
    Zero,
    Succ { pred: TermRef },
    /// Primitive recursion; motive binds the scrutinee, succ case binds
    /// the predecessor and the recursive result.
    NatRec {
        motive_hint: Name,
        motive: TermRef,
        zero_case: TermRef,
        succ_hints: (Name, Name),
        succ_case: TermRef,
        scrutinee: TermRef,
    },
    Unit,
    Star,
    Id { ty: TermRef, lhs: TermRef, rhs: TermRef },
    Refl { ty: TermRef, point: TermRef },
    /// Path induction. The motive binds the far endpoint and the path.
    J {
        ty: TermRef,
        base: TermRef,
        motive_hints: (Name, Name),
        motive: TermRef,
        refl_case: TermRef,
        endpoint: TermRef,
        path: TermRef,
    },
    /// Quotient of `carrier` by a type-valued `relation`.
    Quot { carrier: TermRef, relation: TermRef },
    QMk { carrier: TermRef, relation: TermRef, point: TermRef },
    QPath {
        carrier: TermRef,
        relation: TermRef,
        lhs: TermRef,
        rhs: TermRef,
        witness: TermRef,
    },
    /// Quotient eliminator; motive binds the scrutinee, the point case
    /// binds a carrier element, the coherence case binds two carrier
    /// elements and a relation witness.
    QElim {
        carrier: TermRef,
        relation: TermRef,
        motive_hint: Name,
        motive: TermRef,
        point_hint: Name,
        point_case: TermRef,
        coh_hints: (Name, Name, Name),
        coh_case: TermRef,
        scrutinee: TermRef,
    },
    /// Reference to a checked global definition or axiom.
    Ref { name: String },
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> TermRef {
        Rc::new(Term { kind, span })
    }

    /// Term with a synthetic span, for kernel-made syntax.
    pub fn synth(kind: TermKind) -> TermRef {
        Term::new(kind, Span::synth())
    }

    pub fn var(index: usize, hint: Name, span: Span) -> TermRef {
        Term::new(TermKind::Var { index, hint }, span)
    }

    /// Numeral as iterated successor.
    pub fn numeral(n: u64) -> TermRef {
        let mut t = Term::synth(TermKind::Zero);
        for _ in 0..n {
            t = Term::synth(TermKind::Succ { pred: t });
        }
        t
    }

    /// Reads back a numeral if the term is a closed successor tower.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut cur = self;
        loop {
            match &cur.kind {
                TermKind::Zero => return Some(n),
                TermKind::Succ { pred } => {
                    n += 1;
                    cur = pred;
                }
                _ => return None,
            }
        }
    }
}

/// Shift free variables with index `>= cutoff` by `amount`.
pub fn shift_above(t: &TermRef, amount: usize, cutoff: usize) -> TermRef {
    if amount == 0 {
        return t.clone();
    }
    map_vars(t, cutoff, &|index, hint, depth, span| {
        if index >= depth {
            Term::var(index + amount, hint, span)
        } else {
            Term::var(index, hint, span)
        }
    })
}

/// Shift all free variables by `amount`.
pub fn shift(t: &TermRef, amount: usize) -> TermRef {
    shift_above(t, amount, 0)
}

/// Instantiate a body binding `args.len()` variables with the given
/// arguments. `args[0]` replaces the outermost binder of the group, i.e.
/// inside the body the innermost binder (index 0) receives the last
/// argument. Arguments are scoped in the ambient context of the body.
pub fn instantiate(body: &TermRef, args: &[TermRef]) -> TermRef {
    let k = args.len();
    if k == 0 {
        return body.clone();
    }
    map_vars(body, 0, &|index, hint, depth, span| {
        if index < depth {
            // bound inside the body
            Term::var(index, hint, span)
        } else if index < depth + k {
            // one of the binders being instantiated; binder j (0 =
            // innermost) corresponds to args[k - 1 - j]
            let j = index - depth;
            shift(&args[k - 1 - j], depth)
        } else {
            // ambient variable; the k binders disappear
            Term::var(index - k, hint, span)
        }
    })
}

/// Structural traversal rewriting variables; `depth` counts binders
/// passed on the way down, offset by the initial cutoff.
fn map_vars(
    t: &TermRef,
    depth: usize,
    f: &impl Fn(usize, Name, usize, Span) -> TermRef,
) -> TermRef {
    use TermKind::*;
    let span = t.span;
    let go = |u: &TermRef| map_vars(u, depth, f);
    let go1 = |u: &TermRef| map_vars(u, depth + 1, f);
    let go2 = |u: &TermRef| map_vars(u, depth + 2, f);
    let go3 = |u: &TermRef| map_vars(u, depth + 3, f);
    match &t.kind {
        Var { index, hint } => f(*index, hint.clone(), depth, span),
        Universe { .. } | Nat | Zero | Unit | Star | Ref { .. } => t.clone(),
        Pi { hint, domain, codomain } => Term::new(
            Pi { hint: hint.clone(), domain: go(domain), codomain: go1(codomain) },
            span,
        ),
        Lam { hint, annotation, body } => Term::new(
            Lam {
                hint: hint.clone(),
                annotation: annotation.as_ref().map(&go),
                body: go1(body),
            },
            span,
        ),
        App { function, argument } => {
            Term::new(App { function: go(function), argument: go(argument) }, span)
        }
        Sigma { hint, first, second } => Term::new(
            Sigma { hint: hint.clone(), first: go(first), second: go1(second) },
            span,
        ),
        Pair { first, second } => {
            Term::new(Pair { first: go(first), second: go(second) }, span)
        }
        Fst { pair } => Term::new(Fst { pair: go(pair) }, span),
        Snd { pair } => Term::new(Snd { pair: go(pair) }, span),
        Succ { pred } => Term::new(Succ { pred: go(pred) }, span),
        NatRec { motive_hint, motive, zero_case, succ_hints, succ_case, scrutinee } => Term::new(
            NatRec {
                motive_hint: motive_hint.clone(),
                motive: go1(motive),
                zero_case: go(zero_case),
                succ_hints: succ_hints.clone(),
                succ_case: go2(succ_case),
                scrutinee: go(scrutinee),
            },
            span,
        ),
        Id { ty, lhs, rhs } => {
            Term::new(Id { ty: go(ty), lhs: go(lhs), rhs: go(rhs) }, span)
        }
        Refl { ty, point } => Term::new(Refl { ty: go(ty), point: go(point) }, span),
        J { ty, base, motive_hints, motive, refl_case, endpoint, path } => Term::new(
            J {
                ty: go(ty),
                base: go(base),
                motive_hints: motive_hints.clone(),
                motive: go2(motive),
                refl_case: go(refl_case),
                endpoint: go(endpoint),
                path: go(path),
            },
            span,
        ),
        Quot { carrier, relation } => {
            Term::new(Quot { carrier: go(carrier), relation: go(relation) }, span)
        }
        QMk { carrier, relation, point } => Term::new(
            QMk { carrier: go(carrier), relation: go(relation), point: go(point) },
            span,
        ),
        QPath { carrier, relation, lhs, rhs, witness } => Term::new(
            QPath {
                carrier: go(carrier),
                relation: go(relation),
                lhs: go(lhs),
                rhs: go(rhs),
                witness: go(witness),
            },
            span,
        ),
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
        } => Term::new(
            QElim {
                carrier: go(carrier),
                relation: go(relation),
                motive_hint: motive_hint.clone(),
                motive: go1(motive),
                point_hint: point_hint.clone(),
                point_case: go1(point_case),
                coh_hints: coh_hints.clone(),
                coh_case: go3(coh_case),
                scrutinee: go(scrutinee),
            },
            span,
        ),
    }
}

/// Does the variable with the given ambient index occur free in `t`?
pub fn occurs_free(t: &Term, index: usize) -> bool {
    fn go(t: &Term, target: usize) -> bool {
        use TermKind::*;
        match &t.kind {
            Var { index, .. } => *index == target,
            Universe { .. } | Nat | Zero | Unit | Star | Ref { .. } => false,
            Pi { domain, codomain, .. } => go(domain, target) || go(codomain, target + 1),
            Lam { annotation, body, .. } => {
                annotation.as_ref().map_or(false, |a| go(a, target)) || go(body, target + 1)
            }
            App { function, argument } => go(function, target) || go(argument, target),
            Sigma { first, second, .. } => go(first, target) || go(second, target + 1),
            Pair { first, second } => go(first, target) || go(second, target),
            Fst { pair } | Snd { pair } => go(pair, target),
            Succ { pred } => go(pred, target),
            NatRec { motive, zero_case, succ_case, scrutinee, .. } => {
                go(motive, target + 1)
                    || go(zero_case, target)
                    || go(succ_case, target + 2)
                    || go(scrutinee, target)
            }
            Id { ty, lhs, rhs } => go(ty, target) || go(lhs, target) || go(rhs, target),
            Refl { ty, point } => go(ty, target) || go(point, target),
            J { ty, base, motive, refl_case, endpoint, path, .. } => {
                go(ty, target)
                    || go(base, target)
                    || go(motive, target + 2)
                    || go(refl_case, target)
                    || go(endpoint, target)
                    || go(path, target)
            }
            Quot { carrier, relation } => go(carrier, target) || go(relation, target),
            QMk { carrier, relation, point } => {
                go(carrier, target) || go(relation, target) || go(point, target)
            }
            QPath { carrier, relation, lhs, rhs, witness } => {
                go(carrier, target)
                    || go(relation, target)
                    || go(lhs, target)
                    || go(rhs, target)
                    || go(witness, target)
            }
            QElim { carrier, relation, motive, point_case, coh_case, scrutinee, .. } => {
                go(carrier, target)
                    || go(relation, target)
                    || go(motive, target + 1)
                    || go(point_case, target + 1)
                    || go(coh_case, target + 3)
                    || go(scrutinee, target)
            }
        }
    }
    go(t, index)
}

/// Remove an unused innermost binder from a body. The caller must check
/// `occurs_free(t, 0)` is false first.
pub fn strengthen(t: &TermRef) -> TermRef {
    map_vars(t, 0, &|index, hint, depth, span| {
        debug_assert!(index != depth, "strengthen: binder occurs in body");
        if index > depth {
            Term::var(index - 1, hint, span)
        } else {
            Term::var(index, hint, span)
        }
    })
}

/// Alpha equality: structural identity up to display-name hints and spans.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    use TermKind::*;
    match (&t.kind, &u.kind) {
        (Var { index: a, .. }, Var { index: b, .. }) => a == b,
        (Universe { level: a }, Universe { level: b }) => a == b,
        (Pi { domain: d1, codomain: c1, .. }, Pi { domain: d2, codomain: c2, .. }) => {
            alpha_eq(d1, d2) && alpha_eq(c1, c2)
        }
        (Lam { annotation: a1, body: b1, .. }, Lam { annotation: a2, body: b2, .. }) => {
            let anns = match (a1, a2) {
                (None, None) => true,
                (Some(x), Some(y)) => alpha_eq(x, y),
                _ => false,
            };
            anns && alpha_eq(b1, b2)
        }
        (App { function: f1, argument: x1 }, App { function: f2, argument: x2 }) => {
            alpha_eq(f1, f2) && alpha_eq(x1, x2)
        }
        (Sigma { first: a1, second: b1, .. }, Sigma { first: a2, second: b2, .. }) => {
            alpha_eq(a1, a2) && alpha_eq(b1, b2)
        }
        (Pair { first: a1, second: b1 }, Pair { first: a2, second: b2 }) => {
            alpha_eq(a1, a2) && alpha_eq(b1, b2)
        }
        (Fst { pair: p1 }, Fst { pair: p2 }) => alpha_eq(p1, p2),
        (Snd { pair: p1 }, Snd { pair: p2 }) => alpha_eq(p1, p2),
        (Nat, Nat) | (Zero, Zero) | (Unit, Unit) | (Star, Star) => true,
        (Succ { pred: a }, Succ { pred: b }) => alpha_eq(a, b),
        (
            NatRec { motive: m1, zero_case: z1, succ_case: s1, scrutinee: n1, .. },
            NatRec { motive: m2, zero_case: z2, succ_case: s2, scrutinee: n2, .. },
        ) => alpha_eq(m1, m2) && alpha_eq(z1, z2) && alpha_eq(s1, s2) && alpha_eq(n1, n2),
        (Id { ty: t1, lhs: a1, rhs: b1 }, Id { ty: t2, lhs: a2, rhs: b2 }) => {
            alpha_eq(t1, t2) && alpha_eq(a1, a2) && alpha_eq(b1, b2)
        }
        (Refl { ty: t1, point: a1 }, Refl { ty: t2, point: a2 }) => {
            alpha_eq(t1, t2) && alpha_eq(a1, a2)
        }
        (
            J { ty: t1, base: b1, motive: m1, refl_case: r1, endpoint: e1, path: p1, .. },
            J { ty: t2, base: b2, motive: m2, refl_case: r2, endpoint: e2, path: p2, .. },
        ) => {
            alpha_eq(t1, t2)
                && alpha_eq(b1, b2)
                && alpha_eq(m1, m2)
                && alpha_eq(r1, r2)
                && alpha_eq(e1, e2)
                && alpha_eq(p1, p2)
        }
        (Quot { carrier: a1, relation: r1 }, Quot { carrier: a2, relation: r2 }) => {
            alpha_eq(a1, a2) && alpha_eq(r1, r2)
        }
        (
            QMk { carrier: a1, relation: r1, point: p1 },
            QMk { carrier: a2, relation: r2, point: p2 },
        ) => alpha_eq(a1, a2) && alpha_eq(r1, r2) && alpha_eq(p1, p2),
        (
            QPath { carrier: a1, relation: r1, lhs: l1, rhs: h1, witness: w1 },
            QPath { carrier: a2, relation: r2, lhs: l2, rhs: h2, witness: w2 },
        ) => {
            alpha_eq(a1, a2)
                && alpha_eq(r1, r2)
                && alpha_eq(l1, l2)
                && alpha_eq(h1, h2)
                && alpha_eq(w1, w2)
        }
        (
            QElim {
                carrier: a1,
                relation: r1,
                motive: m1,
                point_case: p1,
                coh_case: c1,
                scrutinee: s1,
                ..
            },
            QElim {
                carrier: a2,
                relation: r2,
                motive: m2,
                point_case: p2,
                coh_case: c2,
                scrutinee: s2,
                ..
            },
        ) => {
            alpha_eq(a1, a2)
                && alpha_eq(r1, r2)
                && alpha_eq(m1, m2)
                && alpha_eq(p1, p2)
                && alpha_eq(c1, c2)
                && alpha_eq(s1, s2)
        }
        (Ref { name: n1 }, Ref { name: n2 }) => n1 == n2,
        _ => false,
    }
}

/// Check that every variable offset is below the enclosing binder count
/// plus `ambient`. Used by tests and debug assertions.
pub fn well_scoped(t: &Term, ambient: usize) -> bool {
    fn go(t: &Term, depth: usize) -> bool {
        use TermKind::*;
        match &t.kind {
            Var { index, .. } => *index < depth,
            Universe { .. } | Nat | Zero | Unit | Star | Ref { .. } => true,
            Pi { domain, codomain, .. } => go(domain, depth) && go(codomain, depth + 1),
            Lam { annotation, body, .. } => {
                annotation.as_ref().map_or(true, |a| go(a, depth)) && go(body, depth + 1)
            }
            App { function, argument } => go(function, depth) && go(argument, depth),
            Sigma { first, second, .. } => go(first, depth) && go(second, depth + 1),
            Pair { first, second } => go(first, depth) && go(second, depth),
            Fst { pair } | Snd { pair } => go(pair, depth),
            Succ { pred } => go(pred, depth),
            NatRec { motive, zero_case, succ_case, scrutinee, .. } => {
                go(motive, depth + 1)
                    && go(zero_case, depth)
                    && go(succ_case, depth + 2)
                    && go(scrutinee, depth)
            }
            Id { ty, lhs, rhs } => go(ty, depth) && go(lhs, depth) && go(rhs, depth),
            Refl { ty, point } => go(ty, depth) && go(point, depth),
            J { ty, base, motive, refl_case, endpoint, path, .. } => {
                go(ty, depth)
                    && go(base, depth)
                    && go(motive, depth + 2)
                    && go(refl_case, depth)
                    && go(endpoint, depth)
                    && go(path, depth)
            }
            Quot { carrier, relation } => go(carrier, depth) && go(relation, depth),
            QMk { carrier, relation, point } => {
                go(carrier, depth) && go(relation, depth) && go(point, depth)
            }
            QPath { carrier, relation, lhs, rhs, witness } => {
                go(carrier, depth)
                    && go(relation, depth)
                    && go(lhs, depth)
                    && go(rhs, depth)
                    && go(witness, depth)
            }
            QElim { carrier, relation, motive, point_case, coh_case, scrutinee, .. } => {
                go(carrier, depth)
                    && go(relation, depth)
                    && go(motive, depth + 1)
                    && go(point_case, depth + 1)
                    && go(coh_case, depth + 3)
                    && go(scrutinee, depth)
            }
        }
    }
    go(t, ambient)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::pretty(self, &crate::pretty::Options::default()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::Span;

    fn v(i: usize) -> TermRef {
        Term::var(i, name("x"), Span::synth())
    }

    #[test]
    fn instantiate_identity_substitution() {
        // [Zero/x] x = Zero
        let body = v(0);
        let out = instantiate(&body, &[Term::numeral(0)]);
        assert!(alpha_eq(&out, &Term::numeral(0)));
    }

    #[test]
    fn instantiate_under_binder_shifts() {
        // [Zero/y] (fun x => y) = fun x => Zero
        let body = Term::synth(TermKind::Lam { hint: name("x"), annotation: None, body: v(1) });
        let out = instantiate(&body, &[Term::numeral(0)]);
        let expect =
            Term::synth(TermKind::Lam { hint: name("x"), annotation: None, body: Term::numeral(0) });
        assert!(alpha_eq(&out, &expect));
    }

    #[test]
    fn instantiate_duplicates_argument() {
        // [succ zero/f] (f f) = (succ zero) (succ zero)
        let body = Term::synth(TermKind::App { function: v(0), argument: v(0) });
        let one = Term::numeral(1);
        let out = instantiate(&body, &[one.clone()]);
        let expect = Term::synth(TermKind::App { function: one.clone(), argument: one });
        assert!(alpha_eq(&out, &expect));
    }

    #[test]
    fn alpha_eq_ignores_hints() {
        let lam_x = Term::synth(TermKind::Lam {
            hint: name("x"),
            annotation: None,
            body: Term::var(0, name("x"), Span::synth()),
        });
        let lam_y = Term::synth(TermKind::Lam {
            hint: name("y"),
            annotation: None,
            body: Term::var(0, name("y"), Span::synth()),
        });
        assert!(alpha_eq(&lam_x, &lam_y));
        assert!(!alpha_eq(&Term::numeral(0), &Term::numeral(1)));
    }

    #[test]
    fn instantiate_preserves_scope() {
        // body under 2 binders: pair x y, instantiated with closed terms
        let body = Term::synth(TermKind::Pair { first: v(1), second: v(0) });
        let out = instantiate(&body, &[Term::numeral(1), Term::numeral(2)]);
        assert!(well_scoped(&out, 0));
        // outermost binder gets args[0]
        let expect = Term::synth(TermKind::Pair {
            first: Term::numeral(1),
            second: Term::numeral(2),
        });
        assert!(alpha_eq(&out, &expect));
    }
}
