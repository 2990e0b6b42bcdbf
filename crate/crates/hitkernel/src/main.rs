use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hitkernel::ctx::Ctx;
use hitkernel::driver::{elaborate_expression, Driver, DriverOptions, RunReport};
use hitkernel::pretty::{pretty, Options as PrettyOptions};
use hitkernel::quote::readback_type;
use hitkernel::typecheck::{infer, normalize};
use hitkernel::value::Config;

/// Batch proof checker for a small dependent type theory with a
/// primitive quotient type.
#[derive(Parser)]
#[command(name = "hitkernel", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check files (and their imports) and report diagnostics.
    Check {
        /// Emit the run report as a single JSON document on stdout.
        #[arg(long)]
        json: bool,
        /// Directory against which `import` lines resolve.
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Normalize an expression in the context of the given files.
    Normalize {
        /// Context file to check before elaborating the expression
        /// (repeatable).
        #[arg(long = "ctx")]
        ctx: Vec<PathBuf>,
        #[arg(long)]
        root: Option<PathBuf>,
        /// Print numerals as `succ (succ zero)` instead of decimal.
        #[arg(long)]
        unary: bool,
        expr: String,
    },
    /// Print the inferred type of an expression.
    Typeof {
        #[arg(long = "ctx")]
        ctx: Vec<PathBuf>,
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(long)]
        unary: bool,
        expr: String,
    },
    /// Run the kernel property suites.
    Selftest {
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
}

fn config_from_env() -> Result<Config, String> {
    let mut config = Config::default();
    if let Ok(v) = std::env::var("HITKERNEL_MAX_LEVEL") {
        match v.parse::<u32>() {
            Ok(level) => config.max_level = level,
            Err(_) => return Err(format!("HITKERNEL_MAX_LEVEL is not a number: `{v}`")),
        }
    }
    Ok(config)
}

fn print_human_report(report: &RunReport) {
    for line in &report.outputs {
        println!("{line}");
    }
    for d in &report.diagnostics {
        eprintln!("{}[{}]: {} ({}:{}:{})", d.severity, d.code, d.message, d.file, d.line, d.col);
    }
    for f in &report.files {
        println!(
            "checked {}: {} declarations, {} directives [{}]",
            f.file, f.decls, f.directives, f.status
        );
    }
    let audited: Vec<_> = report.axioms.iter().filter(|(_, a)| !a.is_empty()).collect();
    if !audited.is_empty() {
        println!("axiom audit:");
        for (name, axioms) in audited {
            let list: Vec<_> = axioms.iter().map(String::as_str).collect();
            println!("  {name}: {{{}}}", list.join(", "));
        }
    }
    println!(
        "{}: {} diagnostics in {} ms",
        report.status,
        report.diagnostics.len(),
        report.elapsed_ms
    );
}

fn load_context(
    ctx: &[PathBuf],
    root: Option<PathBuf>,
    config: Config,
) -> Result<Driver, ExitCode> {
    let mut driver = Driver::new(DriverOptions { config, root });
    if !ctx.is_empty() {
        match driver.check_paths(ctx) {
            Ok(report) => {
                if !report.ok() {
                    for d in &report.diagnostics {
                        eprintln!(
                            "{}[{}]: {} ({}:{}:{})",
                            d.severity, d.code, d.message, d.file, d.line, d.col
                        );
                    }
                    return Err(ExitCode::from(1));
                }
            }
            Err(io) => {
                eprintln!("error: {io}");
                return Err(ExitCode::from(2));
            }
        }
    }
    Ok(driver)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match config_from_env() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match cli.command {
        Command::Check { json, root, files } => {
            let mut driver = Driver::new(DriverOptions { config, root });
            match driver.check_paths(&files) {
                Ok(report) => {
                    if json {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&report).expect("report serializes")
                        );
                    } else {
                        print_human_report(&report);
                    }
                    ExitCode::from(if report.ok() { 0 } else { 1 })
                }
                Err(io) => {
                    eprintln!("error: {io}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Normalize { ctx, root, unary, expr } => {
            let driver = match load_context(&ctx, root, config) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let result = elaborate_expression(&driver.genv, &expr).and_then(|core| {
                let cx = Ctx::new(&driver.genv);
                normalize(&cx, &core)
            });
            match result {
                Ok(nf) => {
                    println!("{}", pretty(&nf, &PrettyOptions { numerals: !unary }));
                    ExitCode::SUCCESS
                }
                Err(diag) => {
                    eprintln!("{diag}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Typeof { ctx, root, unary, expr } => {
            let driver = match load_context(&ctx, root, config) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let result = elaborate_expression(&driver.genv, &expr).and_then(|core| {
                let cx = Ctx::new(&driver.genv);
                let ty = infer(&cx, &core)?;
                Ok(readback_type(&cx, &ty))
            });
            match result {
                Ok(ty) => {
                    println!("{}", pretty(&ty, &PrettyOptions { numerals: !unary }));
                    ExitCode::SUCCESS
                }
                Err(diag) => {
                    eprintln!("{diag}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Selftest { seed } => {
            let report = hitkernel::selftest::run(seed);
            for group in &report.groups {
                let status = if group.failed == 0 { "pass" } else { "FAIL" };
                println!(
                    "[{status}] {}: {} passed, {} failed",
                    group.name, group.passed, group.failed
                );
                if let Some(detail) = &group.detail {
                    println!("        first failure: {detail}");
                }
            }
            if report.ok() {
                println!("selftest: all {} property groups passed", report.groups.len());
                ExitCode::SUCCESS
            } else {
                println!("selftest: FAILED");
                ExitCode::from(1)
            }
        }
    }
}
