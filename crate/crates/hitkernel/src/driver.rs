//! Batch driver: loads files (resolving imports), checks declarations in
//! order, evaluates directives, and assembles a machine-readable report
//! with an axiom audit.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::ctx::Ctx;
use crate::diag::{codes, DiagResult, Diagnostic};
use crate::elab::Elaborator;
use crate::lexer::lex;
use crate::parser::{parse, parse_expression, Decl, DeclKind, SurfaceTerm};
use crate::pretty::{pretty, Options as PrettyOptions};
use crate::quote::readback_type;
use crate::span::{FileId, Span};
use crate::term::{Term, TermKind, TermRef};
use crate::typecheck::{check, check_axiom, check_definition, check_is_type, infer, normalize};
use crate::value::{Config, DeclKind as GlobalKind, GlobalEnv, ValueRef};

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DiagRecord {
    pub severity: String,
    pub code: String,
    pub message: String,
    pub file: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FileReport {
    pub file: String,
    pub decls: usize,
    pub directives: usize,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Default, PartialEq, Eq)]
pub struct RunReport {
    pub status: String,
    pub files: Vec<FileReport>,
    pub diagnostics: Vec<DiagRecord>,
    /// Declaration name -> axioms it transitively uses.
    pub axioms: BTreeMap<String, BTreeSet<String>>,
    pub elapsed_ms: u128,
    /// Human-readable outputs of `#check` / `#normalize` directives.
    #[serde(skip)]
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.diagnostics.iter().all(|d| d.severity != "error")
    }

    /// The report with timing erased, for determinism comparisons.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        r.elapsed_ms = 0;
        r
    }
}

pub struct DriverOptions {
    pub config: Config,
    pub root: Option<PathBuf>,
}

impl Default for DriverOptions {
    fn default() -> DriverOptions {
        DriverOptions { config: Config::default(), root: None }
    }
}

pub struct Driver {
    pub genv: GlobalEnv,
    options: DriverOptions,
    file_names: Vec<String>,
    report: RunReport,
}

struct LoadedFile {
    display: String,
    decls: Vec<Decl>,
}

enum LoadState {
    Loading,
    Done,
}

impl Driver {
    pub fn new(options: DriverOptions) -> Driver {
        Driver {
            genv: GlobalEnv::new(options.config),
            options,
            file_names: Vec::new(),
            report: RunReport::default(),
        }
    }

    fn file_name(&self, id: FileId) -> &str {
        if id == FileId::SYNTH || id.0 as usize >= self.file_names.len() {
            "<kernel>"
        } else {
            &self.file_names[id.0 as usize]
        }
    }

    fn record(&mut self, diag: &Diagnostic) {
        self.report.diagnostics.push(DiagRecord {
            severity: diag.severity.to_string(),
            code: diag.code.to_owned(),
            message: diag.message.clone(),
            file: self.file_name(diag.span.file).to_owned(),
            line: diag.span.start_line,
            col: diag.span.start_col,
        });
    }

    /// Check the given files (and their imports, depth-first) in order.
    /// IO failures on the listed paths are usage errors and surface as
    /// `Err`; everything else lands in the report.
    pub fn check_paths(&mut self, paths: &[PathBuf]) -> std::io::Result<RunReport> {
        let started = Instant::now();
        let mut order: Vec<LoadedFile> = Vec::new();
        let mut states: HashMap<PathBuf, LoadState> = HashMap::new();
        for path in paths {
            let canonical = path.canonicalize()?;
            self.load(&canonical, &mut states, &mut order, None)?;
        }
        for file in &order {
            self.check_file(file);
        }
        self.finish(started);
        Ok(self.report.clone())
    }

    /// Check a single in-memory source (used by tests); imports are not
    /// available in this mode.
    pub fn check_source(&mut self, display: &str, source: &str) -> RunReport {
        let started = Instant::now();
        let id = FileId(self.file_names.len() as u32);
        self.file_names.push(display.to_owned());
        match lex(id, source).and_then(|toks| parse(&toks, end_span(id, source))) {
            Ok(decls) => {
                let file = LoadedFile { display: display.to_owned(), decls };
                self.check_file(&file);
            }
            Err(diag) => {
                self.record(&diag);
                self.report.files.push(FileReport {
                    file: display.to_owned(),
                    decls: 0,
                    directives: 0,
                    status: "error".to_owned(),
                });
            }
        }
        self.finish(started);
        self.report.clone()
    }

    fn load(
        &mut self,
        canonical: &Path,
        states: &mut HashMap<PathBuf, LoadState>,
        order: &mut Vec<LoadedFile>,
        import_site: Option<Span>,
    ) -> std::io::Result<()> {
        match states.get(canonical) {
            Some(LoadState::Done) => return Ok(()),
            Some(LoadState::Loading) => {
                let diag = Diagnostic::error(
                    codes::UNBOUND,
                    format!("import cycle through `{}`", canonical.display()),
                    import_site.unwrap_or_else(Span::synth),
                );
                self.record(&diag);
                return Ok(());
            }
            None => {}
        }
        states.insert(canonical.to_owned(), LoadState::Loading);

        let source = std::fs::read_to_string(canonical)?;
        let id = FileId(self.file_names.len() as u32);
        let display = display_path(canonical);
        self.file_names.push(display.clone());

        let decls = match lex(id, &source).and_then(|toks| parse(&toks, end_span(id, &source))) {
            Ok(decls) => decls,
            Err(diag) => {
                self.record(&diag);
                self.report.files.push(FileReport {
                    file: display,
                    decls: 0,
                    directives: 0,
                    status: "error".to_owned(),
                });
                states.insert(canonical.to_owned(), LoadState::Done);
                return Ok(());
            }
        };

        // imports resolve against --root, or the importing file's directory
        let default_root = canonical.parent().map(Path::to_owned).unwrap_or_default();
        let root = self.options.root.clone().unwrap_or(default_root);
        for decl in &decls {
            if let DeclKind::Import { module } = &decl.kind {
                let target = root.join(format!("{module}.hk"));
                match target.canonicalize() {
                    Ok(target) => self.load(&target, states, order, Some(decl.span))?,
                    Err(_) => {
                        let diag = Diagnostic::error(
                            codes::UNBOUND,
                            format!(
                                "cannot resolve import `{module}` (looked for {})",
                                target.display()
                            ),
                            decl.span,
                        );
                        self.record(&diag);
                    }
                }
            }
        }

        order.push(LoadedFile { display, decls });
        states.insert(canonical.to_owned(), LoadState::Done);
        Ok(())
    }

    fn check_file(&mut self, file: &LoadedFile) {
        let mut decls = 0usize;
        let mut directives = 0usize;
        let mut failed = false;
        for decl in &file.decls {
            if failed {
                break;
            }
            match &decl.kind {
                DeclKind::Import { .. } => {}
                DeclKind::Def { name, ty, body } => {
                    decls += 1;
                    if let Err(diag) = self.install_def(name, ty, body, decl.span) {
                        self.record(&diag.or_span(decl.span));
                        failed = true;
                    }
                }
                DeclKind::Axiom { name, ty } => {
                    decls += 1;
                    if let Err(diag) = self.install_axiom(name, ty, decl.span) {
                        self.record(&diag.or_span(decl.span));
                        failed = true;
                    }
                }
                DeclKind::Check(t) => {
                    directives += 1;
                    match self.run_check_directive(t) {
                        Ok(line) => self.report.outputs.push(line),
                        Err(diag) => self.record(&diag.or_span(decl.span)),
                    }
                }
                DeclKind::Normalize(t) => {
                    directives += 1;
                    match self.run_normalize_directive(t) {
                        Ok(line) => self.report.outputs.push(line),
                        Err(diag) => self.record(&diag.or_span(decl.span)),
                    }
                }
                DeclKind::AssertDefeq { lhs, rhs, ty } => {
                    directives += 1;
                    if let Err(diag) = self.run_assert_defeq(lhs, rhs, ty, decl.span) {
                        self.record(&diag.or_span(decl.span));
                    }
                }
                DeclKind::AssertType { term, ty } => {
                    directives += 1;
                    if let Err(diag) = self.run_assert_type(term, ty, decl.span) {
                        self.record(&diag.or_span(decl.span));
                    }
                }
            }
        }
        let status = if failed { "error" } else { "ok" };
        self.report.files.push(FileReport {
            file: file.display.clone(),
            decls,
            directives,
            status: status.to_owned(),
        });
    }

    fn install_def(
        &mut self,
        name: &str,
        ty: &SurfaceTerm,
        body: &SurfaceTerm,
        span: Span,
    ) -> DiagResult<()> {
        if self.genv.contains(name) {
            return Err(Diagnostic::error(
                codes::DUPLICATE,
                format!("`{name}` is already declared"),
                span,
            ));
        }
        let ty = Elaborator::new(&self.genv).term(ty)?;
        let body = Elaborator::new(&self.genv).term(body)?;
        let entry = check_definition(&self.genv, name, &ty, &body, span)?;
        self.genv.install(entry);
        Ok(())
    }

    fn install_axiom(&mut self, name: &str, ty: &SurfaceTerm, span: Span) -> DiagResult<()> {
        if self.genv.contains(name) {
            return Err(Diagnostic::error(
                codes::DUPLICATE,
                format!("`{name}` is already declared"),
                span,
            ));
        }
        let ty = Elaborator::new(&self.genv).term(ty)?;
        let entry = check_axiom(&self.genv, name, &ty, span)?;
        self.genv.install(entry);
        Ok(())
    }

    fn run_check_directive(&self, t: &SurfaceTerm) -> DiagResult<String> {
        let core = Elaborator::new(&self.genv).term(t)?;
        let ctx = Ctx::new(&self.genv);
        let ty = infer(&ctx, &core)?;
        let ty_term = readback_type(&ctx, &ty);
        let opts = PrettyOptions::default();
        Ok(format!("{} : {}", pretty(&core, &opts), pretty(&ty_term, &opts)))
    }

    fn run_normalize_directive(&self, t: &SurfaceTerm) -> DiagResult<String> {
        let core = Elaborator::new(&self.genv).term(t)?;
        let ctx = Ctx::new(&self.genv);
        let nf = normalize(&ctx, &core)?;
        Ok(pretty(&nf, &PrettyOptions::default()))
    }

    fn run_assert_defeq(
        &self,
        lhs: &SurfaceTerm,
        rhs: &SurfaceTerm,
        ty: &SurfaceTerm,
        span: Span,
    ) -> DiagResult<()> {
        let assert_err = |message: String| Diagnostic::error(codes::ASSERT, message, span);
        let inner = || -> DiagResult<(TermRef, TermRef, ValueRef)> {
            let lhs = Elaborator::new(&self.genv).term(lhs)?;
            let rhs = Elaborator::new(&self.genv).term(rhs)?;
            let ty = Elaborator::new(&self.genv).term(ty)?;
            let ctx = Ctx::new(&self.genv);
            let (ty_v, _) = check_is_type(&ctx, &ty)?;
            check(&ctx, &lhs, &ty_v)?;
            check(&ctx, &rhs, &ty_v)?;
            Ok((lhs, rhs, ty_v))
        };
        let (lhs, rhs, ty_v) =
            inner().map_err(|d| assert_err(format!("assertion is ill-typed: {}", d.message)))?;
        let ctx = Ctx::new(&self.genv);
        let lv = crate::eval::eval_closed(&self.genv, &lhs);
        let rv = crate::eval::eval_closed(&self.genv, &rhs);
        if crate::convert::convertible(&ctx, &lv, &rv, &ty_v) {
            Ok(())
        } else {
            let opts = PrettyOptions::default();
            Err(assert_err(format!(
                "assertion failed: `{}` and `{}` are not definitionally equal",
                pretty(&lhs, &opts),
                pretty(&rhs, &opts)
            )))
        }
    }

    fn run_assert_type(&self, term: &SurfaceTerm, ty: &SurfaceTerm, span: Span) -> DiagResult<()> {
        let assert_err = |message: String| Diagnostic::error(codes::ASSERT, message, span);
        let inner = || -> DiagResult<()> {
            let term = Elaborator::new(&self.genv).term(term)?;
            let ty = Elaborator::new(&self.genv).term(ty)?;
            let ctx = Ctx::new(&self.genv);
            let (ty_v, _) = check_is_type(&ctx, &ty)?;
            check(&ctx, &term, &ty_v)
        };
        inner().map_err(|d| assert_err(format!("type assertion failed: {}", d.message)))
    }

    fn finish(&mut self, started: Instant) {
        self.report.axioms = axiom_audit(&self.genv);
        self.report.elapsed_ms = started.elapsed().as_millis();
        self.report.status = if self.report.ok() { "ok" } else { "error" }.to_owned();
    }

    pub fn report(&self) -> &RunReport {
        &self.report
    }
}

fn display_path(p: &Path) -> String {
    match p.file_name() {
        Some(name) => name.to_string_lossy().into_owned(),
        None => p.display().to_string(),
    }
}

fn end_span(id: FileId, source: &str) -> Span {
    let lines = source.lines().count().max(1) as u32;
    let last_len = source.lines().last().map_or(1, |l| l.len() as u32 + 1);
    Span::new(id, (lines, last_len), (lines, last_len))
}

/// Names referenced by a term, for the axiom audit.
pub fn referenced_globals(t: &Term, out: &mut HashSet<String>) {
    use TermKind::*;
    match &t.kind {
        Ref { name } => {
            out.insert(name.clone());
        }
        Var { .. } | Universe { .. } | Nat | Zero | Unit | Star => {}
        Pi { domain, codomain, .. } => {
            referenced_globals(domain, out);
            referenced_globals(codomain, out);
        }
        Lam { annotation, body, .. } => {
            if let Some(a) = annotation {
                referenced_globals(a, out);
            }
            referenced_globals(body, out);
        }
        App { function, argument } => {
            referenced_globals(function, out);
            referenced_globals(argument, out);
        }
        Sigma { first, second, .. } => {
            referenced_globals(first, out);
            referenced_globals(second, out);
        }
        Pair { first, second } => {
            referenced_globals(first, out);
            referenced_globals(second, out);
        }
        Fst { pair } | Snd { pair } => referenced_globals(pair, out),
        Succ { pred } => referenced_globals(pred, out),
        NatRec { motive, zero_case, succ_case, scrutinee, .. } => {
            referenced_globals(motive, out);
            referenced_globals(zero_case, out);
            referenced_globals(succ_case, out);
            referenced_globals(scrutinee, out);
        }
        Id { ty, lhs, rhs } => {
            referenced_globals(ty, out);
            referenced_globals(lhs, out);
            referenced_globals(rhs, out);
        }
        Refl { ty, point } => {
            referenced_globals(ty, out);
            referenced_globals(point, out);
        }
        J { ty, base, motive, refl_case, endpoint, path, .. } => {
            referenced_globals(ty, out);
            referenced_globals(base, out);
            referenced_globals(motive, out);
            referenced_globals(refl_case, out);
            referenced_globals(endpoint, out);
            referenced_globals(path, out);
        }
        Quot { carrier, relation } => {
            referenced_globals(carrier, out);
            referenced_globals(relation, out);
        }
        QMk { carrier, relation, point } => {
            referenced_globals(carrier, out);
            referenced_globals(relation, out);
            referenced_globals(point, out);
        }
        QPath { carrier, relation, lhs, rhs, witness } => {
            referenced_globals(carrier, out);
            referenced_globals(relation, out);
            referenced_globals(lhs, out);
            referenced_globals(rhs, out);
            referenced_globals(witness, out);
        }
        QElim { carrier, relation, motive, point_case, coh_case, scrutinee, .. } => {
            referenced_globals(carrier, out);
            referenced_globals(relation, out);
            referenced_globals(motive, out);
            referenced_globals(point_case, out);
            referenced_globals(coh_case, out);
            referenced_globals(scrutinee, out);
        }
    }
}

/// For every declaration, the set of axioms its type or body transitively
/// uses. An axiom counts as using itself.
pub fn axiom_audit(genv: &GlobalEnv) -> BTreeMap<String, BTreeSet<String>> {
    fn compute(
        genv: &GlobalEnv,
        name: &str,
        memo: &mut HashMap<String, BTreeSet<String>>,
    ) -> BTreeSet<String> {
        if let Some(found) = memo.get(name) {
            return found.clone();
        }
        // the environment is acyclic by construction; this guards anyway
        memo.insert(name.to_owned(), BTreeSet::new());
        let entry = match genv.lookup(name) {
            Some(e) => e,
            None => return BTreeSet::new(),
        };
        let mut set = BTreeSet::new();
        if entry.kind == GlobalKind::Axiom {
            set.insert(name.to_owned());
        }
        let mut refs = HashSet::new();
        referenced_globals(&entry.ty_term, &mut refs);
        if let Some(body) = &entry.body_term {
            referenced_globals(body, &mut refs);
        }
        for r in refs {
            set.extend(compute(genv, &r, memo));
        }
        memo.insert(name.to_owned(), set.clone());
        set
    }

    let mut memo = HashMap::new();
    let mut out = BTreeMap::new();
    for entry in genv.iter() {
        out.insert(entry.name.clone(), compute(genv, &entry.name, &mut memo));
    }
    out
}

/// Elaborate a standalone expression against a checked environment (the
/// CLI's `normalize` and `typeof` commands).
pub fn elaborate_expression(genv: &GlobalEnv, source: &str) -> DiagResult<TermRef> {
    let id = FileId(u32::MAX - 1);
    let toks = lex(id, source)?;
    let st = parse_expression(&toks, end_span(id, source))?;
    Elaborator::new(genv).term(&st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_definitions_are_rejected() {
        let mut d = Driver::new(DriverOptions::default());
        let report = d.check_source("t.hk", "def one : Nat := 1\ndef one : Nat := 1");
        assert!(!report.ok());
        assert_eq!(report.diagnostics[0].code, codes::DUPLICATE);
    }

    #[test]
    fn assert_defeq_failure_reports_assert_code() {
        let mut d = Driver::new(DriverOptions::default());
        let report = d.check_source("t.hk", "#assert_defeq zero (succ zero) : Nat");
        assert!(!report.ok());
        assert_eq!(report.diagnostics[0].code, codes::ASSERT);
    }

    #[test]
    fn axiom_audit_marks_transitive_use() {
        let mut d = Driver::new(DriverOptions::default());
        let report = d.check_source(
            "t.hk",
            "axiom oracle : Nat\n\
             def uses : Nat := succ oracle\n\
             def plain : Nat := 3\n\
             def indirect : Nat := uses",
        );
        assert!(report.ok(), "diags: {:?}", report.diagnostics);
        assert_eq!(report.axioms["uses"], BTreeSet::from(["oracle".to_owned()]));
        assert!(report.axioms["plain"].is_empty());
        assert_eq!(report.axioms["indirect"], BTreeSet::from(["oracle".to_owned()]));
    }

    #[test]
    fn check_directive_reports_types() {
        let mut d = Driver::new(DriverOptions::default());
        let report = d.check_source("t.hk", "#check fun (n : Nat) => succ n");
        assert!(report.ok(), "diags: {:?}", report.diagnostics);
        assert_eq!(report.outputs[0], "fun (n : Nat) => succ n : Nat -> Nat");
    }

    #[test]
    fn def_with_wrong_body_type_is_mismatch() {
        let mut d = Driver::new(DriverOptions::default());
        let report = d.check_source("t.hk", "def bad : Nat := star");
        assert!(!report.ok());
        assert_eq!(report.diagnostics[0].code, codes::MISMATCH);
    }
}
