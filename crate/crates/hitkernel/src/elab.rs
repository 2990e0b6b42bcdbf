//! Elaboration: resolves names to variables or globals, expands sugar
//! (numerals, `let`, arrows), and arity-checks primitive heads. A pure
//! renaming and desugaring pass; no checking happens here.

use crate::diag::{codes, DiagResult, Diagnostic};
use crate::parser::{universe_level, Binder, SurfaceNode, SurfaceTerm};
use crate::span::Span;
use crate::term::{instantiate, name, shift, Name, Term, TermKind, TermRef};
use crate::value::GlobalEnv;

const MAX_NUMERAL: u64 = 1_000_000;

pub struct Elaborator<'g> {
    genv: &'g GlobalEnv,
    locals: Vec<String>,
}

impl<'g> Elaborator<'g> {
    pub fn new(genv: &'g GlobalEnv) -> Elaborator<'g> {
        Elaborator { genv, locals: Vec::new() }
    }

    pub fn term(&mut self, t: &SurfaceTerm) -> DiagResult<TermRef> {
        match &t.node {
            SurfaceNode::Name(n) => self.name_atom(n, t.span),
            SurfaceNode::Num(v) => {
                if *v > MAX_NUMERAL {
                    return Err(Diagnostic::error(
                        codes::PARSE,
                        format!("numeral {v} is too large to expand"),
                        t.span,
                    ));
                }
                Ok(Term::new(Term::numeral(*v).kind.clone(), t.span))
            }
            SurfaceNode::App(..) => {
                let (head, args) = flatten_spine(t);
                self.application(head, &args, t.span)
            }
            SurfaceNode::Lam { binders, body } => self.lambda(binders, body, t.span),
            SurfaceNode::Pi { binders, codomain } => {
                self.binder_type(binders, codomain, t.span, /* sigma: */ false)
            }
            SurfaceNode::SigmaDep { binders, second } => {
                self.binder_type(binders, second, t.span, /* sigma: */ true)
            }
            SurfaceNode::Arrow { domain, codomain } => {
                let d = self.term(domain)?;
                let c = self.term(codomain)?;
                Ok(Term::new(
                    TermKind::Pi { hint: name("_"), domain: d, codomain: shift(&c, 1) },
                    t.span,
                ))
            }
            SurfaceNode::Prod { first, second } => {
                let f = self.term(first)?;
                let s = self.term(second)?;
                Ok(Term::new(
                    TermKind::Sigma { hint: name("_"), first: f, second: shift(&s, 1) },
                    t.span,
                ))
            }
            SurfaceNode::Let { name: n, ann, value, body } => {
                // `let` expands by substitution; the annotation is
                // resolved (so unknown names are caught) but not kept.
                self.term(ann)?;
                let value = self.term(value)?;
                self.locals.push(n.clone());
                let body = self.term(body);
                self.locals.pop();
                Ok(instantiate(&body?, &[value]))
            }
        }
    }

    fn lambda(
        &mut self,
        binders: &[Binder],
        body: &SurfaceTerm,
        span: Span,
    ) -> DiagResult<TermRef> {
        match binders.split_first() {
            None => self.term(body),
            Some((b, rest)) => {
                let annotation = match &b.ann {
                    Some(a) => Some(self.term(a)?),
                    None => None,
                };
                self.locals.push(b.name.clone());
                let inner = self.lambda(rest, body, span);
                self.locals.pop();
                Ok(Term::new(
                    TermKind::Lam { hint: name(&b.name), annotation, body: inner? },
                    span,
                ))
            }
        }
    }

    fn binder_type(
        &mut self,
        binders: &[Binder],
        codomain: &SurfaceTerm,
        span: Span,
        sigma: bool,
    ) -> DiagResult<TermRef> {
        match binders.split_first() {
            None => self.term(codomain),
            Some((b, rest)) => {
                let domain = match &b.ann {
                    Some(a) => self.term(a)?,
                    None => {
                        return Err(Diagnostic::error(
                            codes::PARSE,
                            "binder groups in a type must be annotated",
                            b.span,
                        ))
                    }
                };
                self.locals.push(b.name.clone());
                let inner = self.binder_type(rest, codomain, span, sigma);
                self.locals.pop();
                let kind = if sigma {
                    TermKind::Sigma { hint: name(&b.name), first: domain, second: inner? }
                } else {
                    TermKind::Pi { hint: name(&b.name), domain, codomain: inner? }
                };
                Ok(Term::new(kind, span))
            }
        }
    }

    fn name_atom(&mut self, n: &str, span: Span) -> DiagResult<TermRef> {
        self.application_of_name(n, &[], span)
    }

    fn application(
        &mut self,
        head: &SurfaceTerm,
        args: &[&SurfaceTerm],
        span: Span,
    ) -> DiagResult<TermRef> {
        match &head.node {
            SurfaceNode::Name(n) => self.application_of_name_at(n, head.span, args, span),
            _ => {
                let mut t = self.term(head)?;
                for arg in args {
                    let a = self.term(arg)?;
                    let sp = t.span.merge(a.span);
                    t = Term::new(TermKind::App { function: t, argument: a }, sp);
                }
                Ok(t)
            }
        }
    }

    fn application_of_name(
        &mut self,
        n: &str,
        args: &[&SurfaceTerm],
        span: Span,
    ) -> DiagResult<TermRef> {
        self.application_of_name_at(n, span, args, span)
    }

    fn application_of_name_at(
        &mut self,
        n: &str,
        head_span: Span,
        args: &[&SurfaceTerm],
        span: Span,
    ) -> DiagResult<TermRef> {
        // locals shadow globals; reserved names resolve first and cannot
        // be bound, so there is no capture
        let head = if let Some(prim) = primitive(n) {
            return self.primitive_application(prim, n, head_span, args, span);
        } else if let Some(idx) = self.locals.iter().rev().position(|l| l == n) {
            Term::var(idx, name(n), head_span)
        } else if let Some(level) = universe_level(n) {
            let max = self.genv.config.max_level;
            if level > max {
                return Err(Diagnostic::error(
                    codes::UNIVERSE,
                    format!("universe level {level} exceeds the maximum level {max}"),
                    head_span,
                ));
            }
            Term::new(TermKind::Universe { level }, head_span)
        } else if self.genv.contains(n) {
            Term::new(TermKind::Ref { name: n.to_owned() }, head_span)
        } else {
            return Err(Diagnostic::error(
                codes::UNBOUND,
                format!("unknown name `{n}`"),
                head_span,
            ));
        };
        let mut t = head;
        for arg in args {
            let a = self.term(arg)?;
            let sp = t.span.merge(a.span);
            t = Term::new(TermKind::App { function: t, argument: a }, sp);
        }
        let _ = span;
        Ok(t)
    }

    fn primitive_application(
        &mut self,
        prim: Prim,
        n: &str,
        head_span: Span,
        args: &[&SurfaceTerm],
        span: Span,
    ) -> DiagResult<TermRef> {
        let arity = prim.arity();
        if args.len() < arity {
            return Err(Diagnostic::error(
                codes::ARITY,
                format!("`{n}` expects {arity} argument(s), got {}", args.len()),
                head_span.merge(span),
            ));
        }
        let (taken, rest) = args.split_at(arity);
        let mut t = self.build_primitive(prim, taken, head_span.merge(span))?;
        for arg in rest {
            let a = self.term(arg)?;
            let sp = t.span.merge(a.span);
            t = Term::new(TermKind::App { function: t, argument: a }, sp);
        }
        Ok(t)
    }

    fn build_primitive(
        &mut self,
        prim: Prim,
        args: &[&SurfaceTerm],
        span: Span,
    ) -> DiagResult<TermRef> {
        Ok(match prim {
            Prim::Nat => Term::new(TermKind::Nat, span),
            Prim::Unit => Term::new(TermKind::Unit, span),
            Prim::Star => Term::new(TermKind::Star, span),
            Prim::Zero => Term::new(TermKind::Zero, span),
            Prim::Succ => Term::new(TermKind::Succ { pred: self.term(args[0])? }, span),
            Prim::Pair => Term::new(
                TermKind::Pair { first: self.term(args[0])?, second: self.term(args[1])? },
                span,
            ),
            Prim::Fst => Term::new(TermKind::Fst { pair: self.term(args[0])? }, span),
            Prim::Snd => Term::new(TermKind::Snd { pair: self.term(args[0])? }, span),
            Prim::Id => Term::new(
                TermKind::Id {
                    ty: self.term(args[0])?,
                    lhs: self.term(args[1])?,
                    rhs: self.term(args[2])?,
                },
                span,
            ),
            Prim::Refl => Term::new(
                TermKind::Refl { ty: self.term(args[0])?, point: self.term(args[1])? },
                span,
            ),
            Prim::NatRec => {
                let (m_hints, motive) = self.binder_arg(args[0], 1)?;
                let zero_case = self.term(args[1])?;
                let (s_hints, succ_case) = self.binder_arg(args[2], 2)?;
                let scrutinee = self.term(args[3])?;
                Term::new(
                    TermKind::NatRec {
                        motive_hint: m_hints[0].clone(),
                        motive,
                        zero_case,
                        succ_hints: (s_hints[0].clone(), s_hints[1].clone()),
                        succ_case,
                        scrutinee,
                    },
                    span,
                )
            }
            Prim::J => {
                let ty = self.term(args[0])?;
                let base = self.term(args[1])?;
                let (m_hints, motive) = self.binder_arg(args[2], 2)?;
                let refl_case = self.term(args[3])?;
                let endpoint = self.term(args[4])?;
                let path = self.term(args[5])?;
                Term::new(
                    TermKind::J {
                        ty,
                        base,
                        motive_hints: (m_hints[0].clone(), m_hints[1].clone()),
                        motive,
                        refl_case,
                        endpoint,
                        path,
                    },
                    span,
                )
            }
            Prim::Quot => Term::new(
                TermKind::Quot { carrier: self.term(args[0])?, relation: self.term(args[1])? },
                span,
            ),
            Prim::QMk => Term::new(
                TermKind::QMk {
                    carrier: self.term(args[0])?,
                    relation: self.term(args[1])?,
                    point: self.term(args[2])?,
                },
                span,
            ),
            Prim::QPath => Term::new(
                TermKind::QPath {
                    carrier: self.term(args[0])?,
                    relation: self.term(args[1])?,
                    lhs: self.term(args[2])?,
                    rhs: self.term(args[3])?,
                    witness: self.term(args[4])?,
                },
                span,
            ),
            Prim::QElim => {
                let carrier = self.term(args[0])?;
                let relation = self.term(args[1])?;
                let (m_hints, motive) = self.binder_arg(args[2], 1)?;
                let (p_hints, point_case) = self.binder_arg(args[3], 1)?;
                let (c_hints, coh_case) = self.binder_arg(args[4], 3)?;
                let scrutinee = self.term(args[5])?;
                Term::new(
                    TermKind::QElim {
                        carrier,
                        relation,
                        motive_hint: m_hints[0].clone(),
                        motive,
                        point_hint: p_hints[0].clone(),
                        point_case,
                        coh_hints: (c_hints[0].clone(), c_hints[1].clone(), c_hints[2].clone()),
                        coh_case,
                        scrutinee,
                    },
                    span,
                )
            }
        })
    }

    /// Elaborate an argument that the kernel form consumes as a body
    /// under `k` binders. Lambda layers are peeled off directly (their
    /// annotations are resolved, then dropped: the kernel supplies the
    /// types); a non-lambda argument is applied to the binders instead.
    fn binder_arg(&mut self, arg: &SurfaceTerm, k: usize) -> DiagResult<(Vec<Name>, TermRef)> {
        fn peel<'a>(
            elab: &mut Elaborator<'_>,
            arg: &'a SurfaceTerm,
            k: usize,
            hints: &mut Vec<Name>,
        ) -> DiagResult<TermRef> {
            if k == 0 {
                return elab.term(arg);
            }
            match &arg.node {
                SurfaceNode::Lam { binders, body } => {
                    let (first, rest) = binders.split_first().expect("parser: empty lambda");
                    if let Some(ann) = &first.ann {
                        elab.term(ann)?;
                    }
                    hints.push(name(&first.name));
                    elab.locals.push(first.name.clone());
                    let result = if rest.is_empty() {
                        peel(elab, body, k - 1, hints)
                    } else {
                        let inner = SurfaceTerm {
                            node: SurfaceNode::Lam {
                                binders: rest.to_vec(),
                                body: body.clone(),
                            },
                            span: arg.span,
                        };
                        peel(elab, &inner, k - 1, hints)
                    };
                    elab.locals.pop();
                    result
                }
                _ => {
                    // eta-expand: shift the function over the binders and
                    // apply it to each of them
                    let t = elab.term(arg)?;
                    let mut body = shift(&t, k);
                    for i in (0..k).rev() {
                        let hint = name(&format!("x{}", k - 1 - i));
                        hints.push(hint.clone());
                        body = Term::new(
                            TermKind::App {
                                function: body,
                                argument: Term::var(i, hint, arg.span),
                            },
                            arg.span,
                        );
                    }
                    Ok(body)
                }
            }
        }
        let mut hints = Vec::new();
        let body = peel(self, arg, k, &mut hints)?;
        while hints.len() < k {
            hints.push(name("_"));
        }
        Ok((hints, body))
    }
}

#[derive(Debug, Clone, Copy)]
enum Prim {
    Nat,
    Unit,
    Star,
    Zero,
    Succ,
    Pair,
    Fst,
    Snd,
    Id,
    Refl,
    NatRec,
    J,
    Quot,
    QMk,
    QPath,
    QElim,
}

impl Prim {
    fn arity(self) -> usize {
        match self {
            Prim::Nat | Prim::Unit | Prim::Star | Prim::Zero => 0,
            Prim::Succ | Prim::Fst | Prim::Snd => 1,
            Prim::Pair | Prim::Refl | Prim::Quot => 2,
            Prim::Id | Prim::QMk => 3,
            Prim::NatRec => 4,
            Prim::QPath => 5,
            Prim::J | Prim::QElim => 6,
        }
    }
}

fn primitive(n: &str) -> Option<Prim> {
    Some(match n {
        "Nat" => Prim::Nat,
        "Unit" => Prim::Unit,
        "star" => Prim::Star,
        "zero" => Prim::Zero,
        "succ" => Prim::Succ,
        "pair" => Prim::Pair,
        "fst" => Prim::Fst,
        "snd" => Prim::Snd,
        "Id" => Prim::Id,
        "refl" => Prim::Refl,
        "natrec" => Prim::NatRec,
        "J" => Prim::J,
        "quot" => Prim::Quot,
        "qmk" => Prim::QMk,
        "qpath" => Prim::QPath,
        "qelim" => Prim::QElim,
        _ => return None,
    })
}

fn flatten_spine(t: &SurfaceTerm) -> (&SurfaceTerm, Vec<&SurfaceTerm>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let SurfaceNode::App(f, a) = &cur.node {
        args.push(a.as_ref());
        cur = f;
    }
    args.reverse();
    (cur, args)
}

/// Elaborate a closed surface term against the global environment.
pub fn elaborate_term(genv: &GlobalEnv, t: &SurfaceTerm) -> DiagResult<TermRef> {
    Elaborator::new(genv).term(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::lex;
    use crate::parser::parse_expression;
    use crate::span::FileId;
    use crate::term::alpha_eq;

    fn elab(src: &str) -> DiagResult<TermRef> {
        let genv = GlobalEnv::default();
        let toks = lex(FileId(0), src)?;
        let st = parse_expression(&toks, Span::synth())?;
        elaborate_term(&genv, &st)
    }

    #[test]
    fn annotated_identity_elaborates_to_lambda() {
        let t = elab("fun (x : Nat) => x").unwrap();
        match &t.kind {
            TermKind::Lam { annotation, body, .. } => {
                assert!(matches!(annotation.as_ref().unwrap().kind, TermKind::Nat));
                assert!(matches!(body.kind, TermKind::Var { index: 0, .. }));
            }
            other => panic!("expected lambda, got {other:?}"),
        }
    }

    #[test]
    fn numerals_expand_to_successors() {
        let t = elab("3").unwrap();
        assert!(alpha_eq(&t, &Term::numeral(3)));
    }

    #[test]
    fn qelim_underapplication_is_an_arity_error() {
        let err = elab("qelim Nat (fun (x : Nat) (y : Nat) => Unit) (fun q => Nat) (fun a => a) (fun a b r => star)")
            .unwrap_err();
        assert_eq!(err.code, codes::ARITY);
    }

    #[test]
    fn let_expands_by_substitution() {
        let t = elab("let n : Nat := 2 in succ n").unwrap();
        assert!(alpha_eq(&t, &Term::numeral(3)));
    }

    #[test]
    fn unknown_name_is_unbound() {
        let err = elab("mystery").unwrap_err();
        assert_eq!(err.code, codes::UNBOUND);
    }
}
