//! Kernel property suites, runnable from the CLI (`hitkernel selftest`)
//! and reused by the test harness. The reference interpreter normalizes
//! by repeated substitution and never touches the evaluator, the
//! semantic domain, or readback, so it is an independent oracle for the
//! NbE pipeline.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ctx::Ctx;
use crate::convert::convertible;
use crate::eval::eval_closed;
use crate::quote::readback_at;
use crate::term::{alpha_eq, instantiate, name, well_scoped, Term, TermKind, TermRef};
use crate::typecheck::{check, check_is_type};
use crate::value::GlobalEnv;

pub struct GroupResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub detail: Option<String>,
}

pub struct SelfTestReport {
    pub groups: Vec<GroupResult>,
}

impl SelfTestReport {
    pub fn ok(&self) -> bool {
        self.groups.iter().all(|g| g.failed == 0)
    }
}

// ---------------------------------------------------------------------
// reference interpreter (the oracle)
// ---------------------------------------------------------------------

/// Normalize by naive substitution. Beta-normal but not eta-long; exact
/// agreement with NbE is asserted on closed Nat-valued programs, where
/// both must produce the same numeral.
pub fn oracle_normalize(genv: &GlobalEnv, t: &TermRef) -> TermRef {
    use TermKind::*;
    let nf = |u: &TermRef| oracle_normalize(genv, u);
    match &t.kind {
        Var { .. } | Universe { .. } | Nat | Zero | Unit | Star => t.clone(),
        Ref { name } => {
            let entry = genv.lookup(name).expect("oracle: unknown global");
            match &entry.body_term {
                Some(body) => nf(body),
                None => t.clone(),
            }
        }
        Pi { hint, domain, codomain } => Term::synth(Pi {
            hint: hint.clone(),
            domain: nf(domain),
            codomain: nf(codomain),
        }),
        Lam { hint, annotation, body } => Term::synth(Lam {
            hint: hint.clone(),
            annotation: annotation.as_ref().map(&nf),
            body: nf(body),
        }),
        App { function, argument } => {
            let f = nf(function);
            let a = nf(argument);
            match &f.kind {
                Lam { body, .. } => nf(&instantiate(body, &[a])),
                _ => Term::synth(App { function: f, argument: a }),
            }
        }
        Sigma { hint, first, second } => Term::synth(Sigma {
            hint: hint.clone(),
            first: nf(first),
            second: nf(second),
        }),
        Pair { first, second } => {
            Term::synth(Pair { first: nf(first), second: nf(second) })
        }
        Fst { pair } => {
            let p = nf(pair);
            match &p.kind {
                Pair { first, .. } => first.clone(),
                _ => Term::synth(Fst { pair: p }),
            }
        }
        Snd { pair } => {
            let p = nf(pair);
            match &p.kind {
                Pair { second, .. } => second.clone(),
                _ => Term::synth(Snd { pair: p }),
            }
        }
        Succ { pred } => Term::synth(Succ { pred: nf(pred) }),
        NatRec { motive_hint, motive, zero_case, succ_hints, succ_case, scrutinee } => {
            let s = nf(scrutinee);
            match &s.kind {
                Zero => nf(zero_case),
                Succ { pred } => {
                    let rec = Term::synth(NatRec {
                        motive_hint: motive_hint.clone(),
                        motive: motive.clone(),
                        zero_case: zero_case.clone(),
                        succ_hints: succ_hints.clone(),
                        succ_case: succ_case.clone(),
                        scrutinee: pred.clone(),
                    });
                    nf(&instantiate(succ_case, &[pred.clone(), rec]))
                }
                _ => Term::synth(NatRec {
                    motive_hint: motive_hint.clone(),
                    motive: nf(motive),
                    zero_case: nf(zero_case),
                    succ_hints: succ_hints.clone(),
                    succ_case: nf(succ_case),
                    scrutinee: s,
                }),
            }
        }
        Id { ty, lhs, rhs } => Term::synth(Id { ty: nf(ty), lhs: nf(lhs), rhs: nf(rhs) }),
        Refl { ty, point } => Term::synth(Refl { ty: nf(ty), point: nf(point) }),
        J { ty, base, motive_hints, motive, refl_case, endpoint, path } => {
            let p = nf(path);
            match &p.kind {
                Refl { .. } => nf(refl_case),
                _ => Term::synth(J {
                    ty: nf(ty),
                    base: nf(base),
                    motive_hints: motive_hints.clone(),
                    motive: nf(motive),
                    refl_case: nf(refl_case),
                    endpoint: nf(endpoint),
                    path: p,
                }),
            }
        }
        Quot { carrier, relation } => {
            Term::synth(Quot { carrier: nf(carrier), relation: nf(relation) })
        }
        QMk { carrier, relation, point } => Term::synth(QMk {
            carrier: nf(carrier),
            relation: nf(relation),
            point: nf(point),
        }),
        QPath { carrier, relation, lhs, rhs, witness } => Term::synth(QPath {
            carrier: nf(carrier),
            relation: nf(relation),
            lhs: nf(lhs),
            rhs: nf(rhs),
            witness: nf(witness),
        }),
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
            let s = nf(scrutinee);
            match &s.kind {
                QMk { point, .. } => nf(&instantiate(point_case, &[point.clone()])),
                _ => Term::synth(QElim {
                    carrier: nf(carrier),
                    relation: nf(relation),
                    motive_hint: motive_hint.clone(),
                    motive: nf(motive),
                    point_hint: point_hint.clone(),
                    point_case: nf(point_case),
                    coh_hints: coh_hints.clone(),
                    coh_case: nf(coh_case),
                    scrutinee: s,
                }),
            }
        }
    }
}

// ---------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum STy {
    Nat,
    Unit,
    Fun(Box<STy>, Box<STy>),
    Prod(Box<STy>, Box<STy>),
}

fn ty_term(t: &STy) -> TermRef {
    match t {
        STy::Nat => Term::synth(TermKind::Nat),
        STy::Unit => Term::synth(TermKind::Unit),
        STy::Fun(a, b) => Term::synth(TermKind::Pi {
            hint: name("_"),
            domain: ty_term(a),
            codomain: crate::term::shift(&ty_term(b), 1),
        }),
        STy::Prod(a, b) => Term::synth(TermKind::Sigma {
            hint: name("_"),
            first: ty_term(a),
            second: crate::term::shift(&ty_term(b), 1),
        }),
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn gen_ty(&mut self, depth: usize) -> STy {
        if depth == 0 {
            return if self.rng.gen_bool(0.7) { STy::Nat } else { STy::Unit };
        }
        match self.rng.gen_range(0..5) {
            0 => STy::Unit,
            1 | 2 => STy::Nat,
            3 => STy::Fun(Box::new(self.gen_ty(depth - 1)), Box::new(self.gen_ty(depth - 1))),
            _ => STy::Prod(Box::new(self.gen_ty(depth - 1)), Box::new(self.gen_ty(depth - 1))),
        }
    }

    fn numeral(&mut self) -> TermRef {
        Term::numeral(self.rng.gen_range(0..5))
    }

    /// A closed-form canonical inhabitant, used when fuel runs out.
    fn canonical(&mut self, ctx: &mut Vec<STy>, ty: &STy) -> TermRef {
        match ty {
            STy::Nat => self.numeral(),
            STy::Unit => Term::synth(TermKind::Star),
            STy::Fun(a, b) => {
                ctx.push((**a).clone());
                let body = self.canonical(ctx, b);
                ctx.pop();
                Term::synth(TermKind::Lam {
                    hint: name("x"),
                    annotation: Some(ty_term(a)),
                    body,
                })
            }
            STy::Prod(a, b) => Term::synth(TermKind::Pair {
                first: self.canonical(ctx, a),
                second: self.canonical(ctx, b),
            }),
        }
    }

    /// Generate a well-typed term of the given simple type. Subterms in
    /// inference positions are kept inferable (annotated lambdas,
    /// redex-wrapped pairs).
    fn term(&mut self, ctx: &mut Vec<STy>, ty: &STy, fuel: usize) -> TermRef {
        if fuel == 0 {
            // a variable when one fits, else a canonical form
            let candidates: Vec<usize> = ctx
                .iter()
                .rev()
                .enumerate()
                .filter(|(_, t)| *t == ty)
                .map(|(i, _)| i)
                .collect();
            if !candidates.is_empty() && self.rng.gen_bool(0.5) {
                let index = candidates[self.rng.gen_range(0..candidates.len())];
                return Term::var(index, name("v"), crate::span::Span::synth());
            }
            return self.canonical(ctx, ty);
        }
        let choice = self.rng.gen_range(0..10);
        match (choice, ty) {
            // beta redex at a random argument type; the body is wrapped
            // in an identity redex so the whole application stays
            // inferable even when the body is a bare pair
            (0 | 1, _) => {
                let arg_ty = self.gen_ty(1);
                ctx.push(arg_ty.clone());
                let body = identity_redex(ty, self.term(ctx, ty, fuel - 1));
                ctx.pop();
                let arg = self.term(ctx, &arg_ty, fuel / 2);
                Term::synth(TermKind::App {
                    function: Term::synth(TermKind::Lam {
                        hint: name("x"),
                        annotation: Some(ty_term(&arg_ty)),
                        body,
                    }),
                    argument: arg,
                })
            }
            // primitive recursion with a constant motive
            (2, _) => {
                ctx.push(STy::Nat);
                ctx.push(ty.clone());
                let succ_case = self.term(ctx, ty, fuel / 2);
                ctx.pop();
                ctx.pop();
                Term::synth(TermKind::NatRec {
                    motive_hint: name("n"),
                    motive: ty_term(ty),
                    zero_case: self.term(ctx, ty, fuel / 2),
                    succ_hints: (name("k"), name("ih")),
                    succ_case,
                    scrutinee: self.term(ctx, &STy::Nat, fuel / 2),
                })
            }
            // project from a redex-bound pair
            (3, _) => {
                let other = self.gen_ty(1);
                let (pair_ty, projector): (STy, fn(TermRef) -> TermKind) =
                    if self.rng.gen_bool(0.5) {
                        (STy::Prod(Box::new(ty.clone()), Box::new(other)), |p| {
                            TermKind::Fst { pair: p }
                        })
                    } else {
                        (STy::Prod(Box::new(other), Box::new(ty.clone())), |p| {
                            TermKind::Snd { pair: p }
                        })
                    };
                let pair = self.term(ctx, &pair_ty, fuel / 2);
                let projected = Term::synth(projector(Term::var(
                    0,
                    name("p"),
                    crate::span::Span::synth(),
                )));
                Term::synth(TermKind::App {
                    function: Term::synth(TermKind::Lam {
                        hint: name("p"),
                        annotation: Some(ty_term(&pair_ty)),
                        body: projected,
                    }),
                    argument: pair,
                })
            }
            // path induction on refl, constant motive
            (4, _) => {
                let m = self.term(ctx, &STy::Nat, fuel / 2);
                let rc = self.term(ctx, ty, fuel / 2);
                let endpoint = identity_redex(&STy::Nat, m.clone());
                Term::synth(TermKind::J {
                    ty: Term::synth(TermKind::Nat),
                    base: m.clone(),
                    motive_hints: (name("e"), name("q")),
                    motive: crate::term::shift(&ty_term(ty), 2),
                    refl_case: rc,
                    endpoint,
                    path: Term::synth(TermKind::Refl {
                        ty: Term::synth(TermKind::Nat),
                        point: m,
                    }),
                })
            }
            (_, STy::Nat) => {
                if self.rng.gen_bool(0.5) {
                    Term::synth(TermKind::Succ { pred: self.term(ctx, &STy::Nat, fuel - 1) })
                } else {
                    self.term(ctx, ty, 0)
                }
            }
            (_, STy::Fun(a, b)) => {
                ctx.push((**a).clone());
                let body = self.term(ctx, b, fuel - 1);
                ctx.pop();
                Term::synth(TermKind::Lam {
                    hint: name("x"),
                    annotation: Some(ty_term(a)),
                    body,
                })
            }
            (_, STy::Prod(a, b)) => Term::synth(TermKind::Pair {
                first: self.term(ctx, a, fuel - 1),
                second: self.term(ctx, b, fuel - 1),
            }),
            (_, STy::Unit) => Term::synth(TermKind::Star),
        }
    }
}

fn identity_redex(ty: &STy, t: TermRef) -> TermRef {
    Term::synth(TermKind::App {
        function: Term::synth(TermKind::Lam {
            hint: name("x"),
            annotation: Some(ty_term(ty)),
            body: Term::var(0, name("x"), crate::span::Span::synth()),
        }),
        argument: t,
    })
}

/// `transport` in a constant family as an explicit J-expansion; applied
/// in the quotient computation-rule group to discharge coherence.
fn transport_const_term() -> TermRef {
    use TermKind::*;
    let v = |i: usize| Term::var(i, name("v"), crate::span::Span::synth());
    // binders: X B x y p b
    let inner_j = Term::synth(J {
        ty: v(7),
        base: v(5),
        motive_hints: (name("z'"), name("q'")),
        motive: v(8),
        refl_case: v(2),
        endpoint: v(1),
        path: v(0),
    });
    let outer_motive = Term::synth(Id { ty: v(6), lhs: inner_j, rhs: v(2) });
    let outer_j = Term::synth(J {
        ty: v(5),
        base: v(3),
        motive_hints: (name("z"), name("q")),
        motive: outer_motive,
        refl_case: Term::synth(Refl { ty: v(4), point: v(0) }),
        endpoint: v(2),
        path: v(1),
    });
    let u0 = || Term::synth(Universe { level: 0 });
    let lam = |ann: TermRef, body: TermRef| {
        Term::synth(Lam { hint: name("v"), annotation: Some(ann), body })
    };
    let id_x = Term::synth(Id { ty: v(3), lhs: v(1), rhs: v(0) });
    lam(u0(), lam(u0(), lam(v(1), lam(v(2), lam(id_x, lam(v(3), outer_j))))))
}

// ---------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------

struct Suite<'g> {
    genv: &'g GlobalEnv,
    gen: Gen,
}

impl<'g> Suite<'g> {
    fn run_group(
        &mut self,
        name: &'static str,
        cases: usize,
        mut case: impl FnMut(&mut Self, usize) -> Result<(), String>,
    ) -> GroupResult {
        let mut passed = 0;
        let mut failed = 0;
        let mut detail = None;
        for i in 0..cases {
            match case(self, i) {
                Ok(()) => passed += 1,
                Err(msg) => {
                    failed += 1;
                    detail.get_or_insert(msg);
                }
            }
        }
        GroupResult { name, passed, failed, detail }
    }

    fn fresh_case(&mut self) -> (STy, TermRef) {
        let ty = self.gen.gen_ty(2);
        let fuel = self.gen.rng.gen_range(2..8);
        let mut ctx = Vec::new();
        let term = self.gen.term(&mut ctx, &ty, fuel);
        (ty, term)
    }
}

pub fn run(seed: u64) -> SelfTestReport {
    let genv = GlobalEnv::default();
    let mut suite = Suite { genv: &genv, gen: Gen { rng: ChaCha8Rng::seed_from_u64(seed) } };
    let mut groups = Vec::new();

    groups.push(suite.run_group("normalize-idempotent", 500, |s, _| {
        let (ty, term) = s.fresh_case();
        let ctx = Ctx::new(s.genv);
        let (ty_v, _) = check_is_type(&ctx, &ty_term(&ty)).map_err(|d| d.to_string())?;
        check(&ctx, &term, &ty_v).map_err(|d| format!("generated term ill-typed: {d}"))?;
        let nf1 = readback_at(&ctx, &ty_v, &eval_closed(s.genv, &term));
        let nf2 = readback_at(&ctx, &ty_v, &eval_closed(s.genv, &nf1));
        if alpha_eq(&nf1, &nf2) {
            Ok(())
        } else {
            Err(format!("normalize not idempotent on `{term}`"))
        }
    }));

    groups.push(suite.run_group("oracle-agreement", 60, |s, _| {
        let fuel = s.gen.rng.gen_range(3..9);
        let mut tctx = Vec::new();
        let term = s.gen.term(&mut tctx, &STy::Nat, fuel);
        let ctx = Ctx::new(s.genv);
        let nat = std::rc::Rc::new(crate::value::Value::Nat);
        check(&ctx, &term, &nat).map_err(|d| format!("generated term ill-typed: {d}"))?;
        let nbe = readback_at(&ctx, &nat, &eval_closed(s.genv, &term));
        let reference = oracle_normalize(s.genv, &term);
        if alpha_eq(&nbe, &reference) {
            Ok(())
        } else {
            Err(format!(
                "NbE produced `{nbe}` but the reference interpreter produced `{reference}`"
            ))
        }
    }));

    groups.push(suite.run_group("conversion-equivalence", 150, |s, _| {
        let (ty, t) = s.fresh_case();
        let ctx = Ctx::new(s.genv);
        let (ty_v, _) = check_is_type(&ctx, &ty_term(&ty)).map_err(|d| d.to_string())?;
        check(&ctx, &t, &ty_v).map_err(|d| format!("generated term ill-typed: {d}"))?;
        let u = identity_redex(&ty, t.clone());
        let w = Term::synth(TermKind::NatRec {
            motive_hint: name("n"),
            motive: ty_term(&ty),
            zero_case: t.clone(),
            succ_hints: (name("k"), name("ih")),
            succ_case: Term::var(0, name("ih"), crate::span::Span::synth()),
            scrutinee: Term::synth(TermKind::Zero),
        });
        let (tv, uv, wv) = (
            eval_closed(s.genv, &t),
            eval_closed(s.genv, &u),
            eval_closed(s.genv, &w),
        );
        let conv = |a, b| convertible(&ctx, a, b, &ty_v);
        if !conv(&tv, &tv) {
            return Err("conversion is not reflexive".to_owned());
        }
        if conv(&tv, &uv) != conv(&uv, &tv) {
            return Err("conversion is not symmetric".to_owned());
        }
        if conv(&tv, &uv) && conv(&uv, &wv) && !conv(&tv, &wv) {
            return Err("conversion is not transitive".to_owned());
        }
        if !(conv(&tv, &uv) && conv(&uv, &wv)) {
            return Err(format!("redex variants of `{t}` failed to convert"));
        }
        // a distinguishable pair must stay distinguishable both ways
        let succ = eval_closed(s.genv, &Term::synth(TermKind::Succ { pred: t.clone() }));
        if matches!(ty, STy::Nat)
            && (convertible(&ctx, &tv, &succ, &ty_v) || convertible(&ctx, &succ, &tv, &ty_v))
        {
            return Err("conversion equated n and succ n".to_owned());
        }
        Ok(())
    }));

    groups.push(suite.run_group("subject-reduction", 300, |s, _| {
        let (ty, term) = s.fresh_case();
        let ctx = Ctx::new(s.genv);
        let (ty_v, _) = check_is_type(&ctx, &ty_term(&ty)).map_err(|d| d.to_string())?;
        check(&ctx, &term, &ty_v).map_err(|d| format!("generated term ill-typed: {d}"))?;
        let nf = readback_at(&ctx, &ty_v, &eval_closed(s.genv, &term));
        check(&ctx, &nf, &ty_v)
            .map_err(|d| format!("normal form of `{term}` no longer checks: {d}"))
    }));

    groups.push(suite.run_group("computation-rules", 50, |s, i| {
        let ctx = Ctx::new(s.genv);
        let nat = || Term::synth(TermKind::Nat);
        let rel = Term::synth(TermKind::Lam {
            hint: name("x"),
            annotation: Some(nat()),
            body: Term::synth(TermKind::Lam {
                hint: name("y"),
                annotation: Some(nat()),
                body: Term::synth(TermKind::Unit),
            }),
        });
        if i % 2 == 0 {
            // QElim point rule with a constant motive and point case
            let point = s.gen.numeral();
            let constant = s.gen.numeral();
            let quot_ty = Term::synth(TermKind::Quot { carrier: nat(), relation: rel.clone() });
            let coh = {
                let v = |k: usize| Term::var(k, name("v"), crate::span::Span::synth());
                let tc = transport_const_term();
                let qmk = |p: TermRef| Term::synth(TermKind::QMk {
                    carrier: nat(),
                    relation: rel.clone(),
                    point: p,
                });
                let qpath = Term::synth(TermKind::QPath {
                    carrier: nat(),
                    relation: rel.clone(),
                    lhs: v(2),
                    rhs: v(1),
                    witness: v(0),
                });
                let mut t = tc;
                for arg in [quot_ty.clone(), nat(), qmk(v(2)), qmk(v(1)), qpath, constant.clone()]
                {
                    t = Term::synth(TermKind::App { function: t, argument: arg });
                }
                t
            };
            let qelim = Term::synth(TermKind::QElim {
                carrier: nat(),
                relation: rel.clone(),
                motive_hint: name("q"),
                motive: nat(),
                point_hint: name("a"),
                point_case: crate::term::shift(&constant, 1),
                coh_hints: (name("a"), name("b"), name("r")),
                coh_case: coh,
                scrutinee: Term::synth(TermKind::QMk {
                    carrier: nat(),
                    relation: rel,
                    point,
                }),
            });
            let nat_v = std::rc::Rc::new(crate::value::Value::Nat);
            check(&ctx, &qelim, &nat_v)
                .map_err(|d| format!("qelim instance ill-typed: {d}"))?;
            let lhs = eval_closed(s.genv, &qelim);
            let rhs = eval_closed(s.genv, &constant);
            if convertible(&ctx, &lhs, &rhs, &nat_v) {
                Ok(())
            } else {
                Err("qelim did not compute on a point constructor".to_owned())
            }
        } else {
            // J on refl
            let m = s.gen.numeral();
            let rc = s.gen.numeral();
            let j = Term::synth(TermKind::J {
                ty: nat(),
                base: m.clone(),
                motive_hints: (name("e"), name("q")),
                motive: nat(),
                refl_case: rc.clone(),
                endpoint: identity_redex(&STy::Nat, m.clone()),
                path: Term::synth(TermKind::Refl { ty: nat(), point: m }),
            });
            let nat_v = std::rc::Rc::new(crate::value::Value::Nat);
            check(&ctx, &j, &nat_v).map_err(|d| format!("J instance ill-typed: {d}"))?;
            let lhs = eval_closed(s.genv, &j);
            let rhs = eval_closed(s.genv, &rc);
            if convertible(&ctx, &lhs, &rhs, &nat_v) {
                Ok(())
            } else {
                Err("J did not compute on refl".to_owned())
            }
        }
    }));

    groups.push(suite.run_group("substitution-scope", 200, |s, _| {
        let arg_ty = s.gen.gen_ty(1);
        let ty = s.gen.gen_ty(2);
        let fuel = s.gen.rng.gen_range(2..7);
        let mut tctx = vec![arg_ty.clone()];
        let body = s.gen.term(&mut tctx, &ty, fuel);
        if !well_scoped(&body, 1) {
            return Err(format!("generator produced an ill-scoped body `{body}`"));
        }
        let mut empty = Vec::new();
        let arg = s.gen.term(&mut empty, &arg_ty, 3);
        let out = instantiate(&body, &[arg]);
        if !well_scoped(&out, 0) {
            return Err(format!("instantiation broke scoping on `{body}`"));
        }
        // substitution also preserves typing
        let ctx = Ctx::new(s.genv);
        let (ty_v, _) = check_is_type(&ctx, &ty_term(&ty)).map_err(|d| d.to_string())?;
        check(&ctx, &out, &ty_v)
            .map_err(|d| format!("substitution broke typing on `{body}`: {d}"))
    }));

    SelfTestReport { groups }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_on_fixed_seed() {
        let report = run(7);
        for g in &report.groups {
            assert_eq!(g.failed, 0, "group {} failed: {:?}", g.name, g.detail);
        }
        assert!(report.groups.len() >= 4);
    }
}
