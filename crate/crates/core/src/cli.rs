//! Command-line front end. [`run`] takes the argument vector and two output
//! streams and returns the process exit code:
//!
//! * 0: success, or the checked property holds
//! * 1: a well-formed check came out negative
//! * 2: usage error (bad flags, descriptor syntax, parameter bounds)
//! * 3: internal failure, e.g. a realization that never certified

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::catalog::{self, parse_sequence, CatalogError, Descriptor};
use crate::exactnum::{format_rational, parse_rational, rat, Matrix, Rational};
use crate::homcalc::{self, bilinear_form_data};
use crate::quiverrep::{Quiver, QuiverError};
use crate::strata::{self, ModuleBank, Side, StrataError, VerificationReport, ViolationKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Text,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "apq", version, about = "Stratifying systems over the Euclidean quiver Ã(p,q)")]
struct Cli {
    #[arg(long, global = true)]
    p: Option<usize>,
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Seed for realizations (APQ_SEED overrides it).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest τ-shift searched; defaults to 2·lcm(p,q)+p+q.
    #[arg(long = "tau-max", global = true)]
    tau_max: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Parameter of the homogeneous module in completion pools.
    #[arg(long, global = true, default_value = "1")]
    lambda: String,
    /// Worker threads for enumeration and completion searches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimension vector, support, sincerity, defect and End/Ext of a module.
    Inspect {
        #[arg(long)]
        desc: String,
    },
    /// dim Hom(left, right).
    Hom(Pair),
    /// dim Ext¹(left, right).
    Ext(Pair),
    /// Check the stratifying-system axioms for a comma-separated sequence.
    Verify {
        #[arg(long)]
        sequence: String,
    },
    /// Brute-force the Y with (F, G, Y) stratifying.
    Enumerate {
        #[arg(long)]
        side: String,
        #[arg(long)]
        compare: bool,
    },
    /// Search the completions M of (F, G, Y).
    Complete {
        #[arg(long)]
        y: String,
        #[arg(long)]
        compare: bool,
    },
    /// Compare search against the full classification.
    CheckTheorem,
    /// Cartan matrix, Coxeter matrix and null root.
    Forms,
}

#[derive(Debug, Args)]
struct Pair {
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
}

/// Failure of a command, classified by exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        let code = match e {
            CatalogError::Parse { .. }
            | CatalogError::InvalidIndex { .. }
            | CatalogError::Vanishes(_)
            | CatalogError::NeedsTopPath(_)
            | CatalogError::Quiver(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<StrataError> for Failure {
    fn from(e: StrataError) -> Self {
        match e {
            StrataError::Catalog(c) => c.into(),
            StrataError::UnknownSide(_) => Failure::usage(e.to_string()),
            other => Failure {
                code: EXIT_INTERNAL,
                message: other.to_string(),
            },
        }
    }
}

impl From<QuiverError> for Failure {
    fn from(e: QuiverError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<homcalc::HomError> for Failure {
    fn from(e: homcalc::HomError) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        }
    }
}

/// Runs the tool, reading the seed override from `APQ_SEED`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let env_seed = std::env::var("APQ_SEED").ok();
    run_with_seed_override(argv, env_seed.as_deref(), out, err)
}

/// As [`run`], with the environment override passed explicitly.
pub fn run_with_seed_override<I, S>(argv: I, seed_override: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli, seed_override) {
        Ok((code, text)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct Ctx {
    quiver: Quiver,
    seed: u64,
    tau_max: usize,
    format: Format,
    lambda: Rational,
    jobs: usize,
}

impl Ctx {
    fn bank(&self) -> ModuleBank {
        ModuleBank::new(&self.quiver, self.seed).with_lambda(self.lambda.clone())
    }

    fn parse(&self, text: &str) -> Result<Descriptor, Failure> {
        let d: Descriptor = text.parse()?;
        d.validate(&self.quiver)?;
        Ok(d)
    }

    fn no_dot(&self) -> Result<(), Failure> {
        if self.format == Format::Dot {
            return Err(Failure::usage("--format dot is only available for verify"));
        }
        Ok(())
    }
}

fn execute(cli: Cli, seed_override: Option<&str>) -> Result<(i32, String), Failure> {
    let (p, q) = match (cli.p, cli.q) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(Failure::usage("both --p and --q are required")),
    };
    let quiver = Quiver::new(p, q)?;
    let seed = match seed_override {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("APQ_SEED must be an unsigned integer, got `{s}`")))?,
        None => cli.seed,
    };
    let lambda = parse_rational(&cli.lambda).map_err(|e| Failure::usage(e.to_string()))?;
    if lambda == rat(0) {
        return Err(Failure::usage("--lambda must be nonzero"));
    }
    if cli.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let ctx = Ctx {
        tau_max: cli.tau_max.unwrap_or_else(|| strata::default_tau_max(&quiver)),
        quiver,
        seed,
        format: cli.format,
        lambda,
        jobs: cli.jobs,
    };
    match cli.command {
        Command::Inspect { desc } => inspect(&ctx, &desc),
        Command::Hom(pair) => pair_dim(&ctx, &pair, "hom"),
        Command::Ext(pair) => pair_dim(&ctx, &pair, "ext"),
        Command::Verify { sequence } => verify(&ctx, &sequence),
        Command::Enumerate { side, compare } => enumerate(&ctx, &side, compare),
        Command::Complete { y, compare } => complete(&ctx, &y, compare),
        Command::CheckTheorem => check_theorem(&ctx),
        Command::Forms => forms(&ctx),
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn inspect(ctx: &Ctx, text: &str) -> Result<(i32, String), Failure> {
    ctx.no_dot()?;
    let d = ctx.parse(text)?;
    let (rep, cert) = catalog::realize(&d, &ctx.quiver, ctx.seed)?;
    let dims = rep.dim_vector();
    let supp: Vec<usize> = rep.supp().into_iter().collect();
    let defect = homcalc::defect(&ctx.quiver, &dims)?;
    let self_ext = homcalc::self_ext(&rep);
    let class = format!("{:?}", d.class(&ctx.quiver)).to_lowercase();
    let out = match ctx.format {
        Format::Json => {
            let v = json!({
                "descriptor": d.to_string(),
                "class": class,
                "dims": dims,
                "supp": supp,
                "sincere": rep.sincere(),
                "defect": defect,
                "end_dim": cert.end_dim,
                "self_ext": self_ext,
                "retries": cert.retries,
                "representation": rep.to_json(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        Format::Tsv => {
            let mut s = String::new();
            let _ = writeln!(s, "descriptor\t{d}");
            let _ = writeln!(s, "class\t{class}");
            let _ = writeln!(s, "dims\t{}", join(&dims, ","));
            let _ = writeln!(s, "supp\t{}", join(&supp, ","));
            let _ = writeln!(s, "sincere\t{}", rep.sincere());
            let _ = writeln!(s, "defect\t{defect}");
            let _ = writeln!(s, "end_dim\t{}", cert.end_dim);
            let _ = writeln!(s, "self_ext\t{self_ext}");
            s
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "{d} over {} ({class})", ctx.quiver);
            let _ = writeln!(s, "dimension vector: ({})", join(&dims, ", "));
            let _ = writeln!(s, "support: {{{}}}", join(&supp, ", "));
            let _ = writeln!(s, "sincere: {}", rep.sincere());
            let _ = writeln!(s, "defect: {defect}");
            let _ = writeln!(s, "dim End: {}", cert.end_dim);
            let _ = writeln!(s, "dim Ext¹(M,M): {self_ext}");
            s
        }
    };
    Ok((EXIT_OK, out))
}

fn pair_dim(ctx: &Ctx, pair: &Pair, which: &str) -> Result<(i32, String), Failure> {
    ctx.no_dot()?;
    let left = ctx.parse(&pair.left)?;
    let right = ctx.parse(&pair.right)?;
    let bank = ctx.bank();
    let dim = if which == "hom" {
        bank.hom(&left, &right)?
    } else {
        bank.ext(&left, &right)?
    };
    let out = match ctx.format {
        Format::Json => format!(
            "{}\n",
            json!({"left": left.to_string(), "right": right.to_string(), which: dim})
        ),
        Format::Tsv => format!("{left}\t{right}\t{dim}\n"),
        _ => format!("{dim}\n"),
    };
    Ok((EXIT_OK, out))
}

fn verify(ctx: &Ctx, text: &str) -> Result<(i32, String), Failure> {
    let seq = parse_sequence(text, &ctx.quiver)?;
    if seq.is_empty() {
        return Err(Failure::usage("empty sequence"));
    }
    for d in &seq {
        d.validate(&ctx.quiver)?;
    }
    let report = strata::is_stratifying(&seq, &ctx.bank())?;
    let text = if ctx.format == Format::Dot {
        dot(&seq, &report)
    } else {
        render_report(ctx.format, &report)
    };
    Ok((verdict(&report), text))
}

fn dot(seq: &[Descriptor], report: &VerificationReport) -> String {
    let mut s = String::from("digraph sequence {\n  rankdir=LR;\n");
    for (k, d) in seq.iter().enumerate() {
        let _ = writeln!(s, "  n{} [label=\"{}: {}\"];", k + 1, k + 1, d);
    }
    for &(j, i, dim) in &report.nonzero_homs {
        let _ = writeln!(s, "  n{j} -> n{i} [label=\"hom {dim}\"];");
    }
    s.push_str("}\n");
    s
}

fn verdict(report: &VerificationReport) -> i32 {
    if report.passed {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn enumerate(ctx: &Ctx, side: &str, compare: bool) -> Result<(i32, String), Failure> {
    ctx.no_dot()?;
    let side: Side = side.parse()?;
    let bank = ctx.bank();
    let found = strata::enumerate_y(side, ctx.tau_max, &bank, ctx.jobs)?;
    let mut report = base_report(ctx);
    report.found = found.iter().map(ToString::to_string).collect();
    if compare {
        let expected = strata::predicted_y(side, ctx.tau_max, &ctx.quiver);
        report.expected = expected.iter().map(ToString::to_string).collect();
        diff_sets(&mut report, side, &found, &expected, &ctx.quiver);
    }
    Ok((verdict(&report), render_report(ctx.format, &report)))
}

fn base_report(ctx: &Ctx) -> VerificationReport {
    VerificationReport {
        passed: true,
        violations: Vec::new(),
        found: Vec::new(),
        expected: Vec::new(),
        p: ctx.quiver.p(),
        q: ctx.quiver.q(),
        t: Some(ctx.tau_max),
        seed: ctx.seed,
        size: None,
        complete_size: ctx.quiver.num_vertices(),
        nonzero_homs: Vec::new(),
    }
}

fn flag(report: &mut VerificationReport, kind: ViolationKind, dim: usize, witness: String) {
    report.passed = false;
    report.violations.push(strata::Violation {
        kind,
        j: 0,
        i: 0,
        dim,
        witness: Some(witness),
    });
}

fn diff_sets(
    report: &mut VerificationReport,
    side: Side,
    found: &BTreeSet<Descriptor>,
    expected: &BTreeSet<Descriptor>,
    quiver: &Quiver,
) {
    let keys = |s: &BTreeSet<Descriptor>| s.iter().map(|d| d.iso_key(quiver)).collect::<BTreeSet<_>>();
    let (fk, ek) = (keys(found), keys(expected));
    for d in expected {
        if !fk.contains(&d.iso_key(quiver)) {
            flag(report, ViolationKind::YMissing, 0, format!("{side} {d}"));
        }
    }
    for d in found {
        if !ek.contains(&d.iso_key(quiver)) {
            flag(report, ViolationKind::YUnexpected, 0, format!("{side} {d}"));
        }
    }
}

fn complete(ctx: &Ctx, y: &str, compare: bool) -> Result<(i32, String), Failure> {
    ctx.no_dot()?;
    let y = ctx.parse(y)?;
    let bank = ctx.bank();
    let found = strata::find_completion(&y, ctx.tau_max, &bank, ctx.jobs)?;
    let mut report = base_report(ctx);
    report.found = found.iter().map(ToString::to_string).collect();
    if compare {
        match strata::predicted_completion(&y, &ctx.quiver) {
            Err(e) => flag(&mut report, ViolationKind::CompletionMismatch, found.len(), e.to_string()),
            Ok(m) => {
                report.expected = vec![m.to_string()];
                if found.len() != 1 {
                    flag(
                        &mut report,
                        ViolationKind::CompletionCount,
                        found.len(),
                        format!("{y}: found {}", found.len()),
                    );
                } else {
                    let a = catalog::realize_rep(&found[0], &ctx.quiver, ctx.seed)?;
                    let b = catalog::realize_rep(&m, &ctx.quiver, ctx.seed.wrapping_add(1))?;
                    let v = homcalc::is_isomorphic(&a, &b, ctx.seed)?;
                    if !v.isomorphic {
                        flag(
                            &mut report,
                            ViolationKind::CompletionMismatch,
                            1,
                            format!("{y}: found {}, predicted {m} ({})", found[0], v.note),
                        );
                    }
                }
            }
        }
    }
    Ok((verdict(&report), render_report(ctx.format, &report)))
}

fn check_theorem(ctx: &Ctx) -> Result<(i32, String), Failure> {
    ctx.no_dot()?;
    let report = strata::check_theorem(ctx.tau_max, &ctx.bank(), ctx.jobs)?;
    Ok((verdict(&report), render_report(ctx.format, &report)))
}

pub fn render_report(format: Format, report: &VerificationReport) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(report).expect("json")),
        Format::Tsv => {
            let mut s = format!("passed\t{}\n", report.passed);
            for d in &report.found {
                let _ = writeln!(s, "found\t{d}");
            }
            for d in &report.expected {
                let _ = writeln!(s, "expected\t{d}");
            }
            for v in &report.violations {
                let _ = writeln!(
                    s,
                    "violation\t{}\t{}\t{}\t{}\t{}",
                    v.kind,
                    v.j,
                    v.i,
                    v.dim,
                    v.witness.as_deref().unwrap_or("")
                );
            }
            s
        }
        _ => {
            let mut s = format!(
                "A~({},{}) seed {}: {}\n",
                report.p,
                report.q,
                report.seed,
                if report.passed { "passed" } else { "FAILED" }
            );
            if let Some(size) = report.size {
                let _ = writeln!(s, "size {size} (complete at {})", report.complete_size);
            }
            if !report.found.is_empty() {
                let _ = writeln!(s, "found: {}", report.found.join(" "));
            }
            if !report.expected.is_empty() {
                let _ = writeln!(s, "expected: {}", report.expected.join(" "));
            }
            for v in &report.violations {
                match &v.witness {
                    Some(w) => {
                        let _ = writeln!(s, "  {}: {w}", v.kind);
                    }
                    None => {
                        let _ = writeln!(s, "  {} at ({},{}): dim {}", v.kind, v.j, v.i, v.dim);
                    }
                }
            }
            s
        }
    }
}

fn forms(ctx: &Ctx) -> Result<(i32, String), Failure> {
    ctx.no_dot()?;
    let data = bilinear_form_data(&ctx.quiver);
    let inverse = homcalc::coxeter_inverse(&ctx.quiver);
    let n = ctx.quiver.num_vertices();
    let inverse = Matrix::from_i64(n, n, &inverse.concat());
    let rows = |m: &Matrix| -> Vec<Vec<String>> {
        (0..m.rows())
            .map(|i| m.row(i).iter().map(format_rational).collect())
            .collect()
    };
    let delta: Vec<String> = data.null_root.iter().map(|&x| format_rational(&rat(x))).collect();
    let out = match ctx.format {
        Format::Json => {
            let v = json!({
                "p": ctx.quiver.p(),
                "q": ctx.quiver.q(),
                "cartan": rows(&data.cartan),
                "coxeter": rows(&data.coxeter),
                "coxeter_inverse": rows(&inverse),
                "null_root": delta,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        Format::Tsv => {
            let mut s = String::new();
            for (name, m) in [("cartan", &data.cartan), ("coxeter", &data.coxeter), ("coxeter_inverse", &inverse)] {
                for (i, r) in rows(m).into_iter().enumerate() {
                    let _ = writeln!(s, "{name}\t{i}\t{}", r.join("\t"));
                }
            }
            let _ = writeln!(s, "null_root\t{}", delta.join("\t"));
            s
        }
        _ => {
            let mut s = String::new();
            for (name, m) in [("Cartan", &data.cartan), ("Coxeter", &data.coxeter), ("inverse Coxeter", &inverse)] {
                let _ = writeln!(s, "{name}:");
                for r in rows(m) {
                    let _ = writeln!(s, "  {}", r.join(" "));
                }
            }
            let _ = writeln!(s, "null root: ({})", delta.join(", "));
            s
        }
    };
    Ok((EXIT_OK, out))
}
