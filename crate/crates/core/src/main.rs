use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use a4diff::decomp::{KgLabel, KhLabel, Star};
use a4diff::error::Error;
use a4diff::gf::{Gf, Proj};
use a4diff::ratfunc::{RatFunc, RatFuncJson};
use a4diff::report::{
    example_alpha, field_from, run_job, ExampleSpec, JobJson, JobSpec, Mode, Report,
};
use a4diff::zoo::{induce_restrict_label, zoo_json_kg, zoo_json_kh, AnyLabel, Direction};

#[derive(Parser)]
#[command(
    name = "a4diff",
    version,
    about = "Galois module structure of differentials of A4 covers in characteristic two"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ramification data and closed-form decompositions for α.
    Analyze(AlphaArgs),
    /// Same, for covers branched only at infinity, via the simplified congruences.
    Hkg(AlphaArgs),
    /// Analyze with the oracle check, for one α or a batch file.
    Verify(VerifyArgs),
    /// Matrices, induction and restriction of a single indecomposable.
    Zoo(ZooArgs),
    /// The worked families.
    Examples(ExampleArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Extension degree of GF(2^m).
    #[arg(long, default_value_t = 8)]
    m: u32,
    /// Modulus bits low to high, e.g. 1,1,0,1,1,0,0,0,1.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u8>>,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Emit the JSON report.
    #[arg(long)]
    json: bool,
    /// Emit the JSON report, indented.
    #[arg(long)]
    pretty: bool,
    /// Include wall-clock timings in the JSON report (makes it nondeterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone)]
struct AlphaArgs {
    /// α as JSON {"num": [...], "den": [...]} of element masks, or @file.
    #[arg(long)]
    alpha: String,
    #[command(flatten)]
    field: FieldArgs,
    /// Laurent coefficients of the reduced α reported per branch point.
    #[arg(long, default_value_t = 0)]
    trunc: usize,
    /// Also build the global representation and check it with the oracle.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "batch")]
    alpha: Option<String>,
    /// JSON array of jobs {alpha | example, m, modulus, hkg, trunc}, run in parallel.
    #[arg(long)]
    batch: Option<String>,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    trunc: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Kg,
    Kh,
}

#[derive(Args)]
struct ZooArgs {
    /// kG: S:i, M:dim:x:i, N:dim:0|inf:i, B:dim:mu. kH: k, M:dim:x, N:dim:lambda|inf.
    #[arg(long)]
    label: String,
    #[arg(long, value_enum, default_value_t = Side::Kg)]
    side: Side,
    /// Print the restriction (kG) or induction (kH) instead of the matrices.
    #[arg(long)]
    dictionary: bool,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    which: u8,
    #[arg(long, default_value_t = 1)]
    n: i64,
    #[arg(long, default_value_t = 1)]
    x: i64,
    /// ψ as an element mask (family 3).
    #[arg(long)]
    psi: Option<u64>,
    /// μ = ψ³ as an element mask (family 3); the field grows until ψ exists.
    #[arg(long)]
    mu: Option<u64>,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    trunc: usize,
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    out: OutArgs,
}

/// Failure with its exit code: 1 usage, 2 mathematical precondition, 3 verification.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(if e.is_math() { 2 } else { 1 }, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(1, msg.into())
}

fn read_arg(s: &str) -> Result<String, Fail> {
    match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn parse_alpha(s: &str) -> Result<RatFuncJson, Fail> {
    serde_json::from_str(&read_arg(s)?).map_err(|e| usage(format!("--alpha: {e}")))
}

fn field(a: &FieldArgs) -> Result<Gf, Fail> {
    Ok(field_from(a.m, a.modulus.as_deref())?)
}

fn emit(out: &OutArgs, v: &Value, human: impl FnOnce() -> String) {
    if out.pretty {
        println!("{}", serde_json::to_string_pretty(v).expect("json"));
    } else if out.json {
        println!("{}", serde_json::to_string(v).expect("json"));
    } else {
        print!("{}", human());
    }
}

fn finish_report(r: &Report, out: &OutArgs) -> Result<(), Fail> {
    emit(out, &r.to_json(out.timings), || r.render());
    match r.verified() {
        Some(false) => Err(Fail(3, "verification mismatch".into())),
        _ => Ok(()),
    }
}

fn run_alpha(a: &AlphaArgs, mode: Mode) -> Result<(), Fail> {
    let f = field(&a.field)?;
    let spec = JobSpec {
        field: f,
        alpha: RatFunc::from_json(&f, &parse_alpha(&a.alpha)?)?,
        mode,
        verify: a.verify,
        trunc: a.trunc,
        example: None,
    };
    finish_report(&run_job(&spec)?, &a.out)
}

fn exit_of(e: &Error) -> u8 {
    if e.is_math() {
        2
    } else {
        1
    }
}

fn run_batch(path: &str, v: &VerifyArgs) -> Result<(), Fail> {
    let jobs: Vec<JobJson> = serde_json::from_str(&read_arg(&format!("@{path}"))?)
        .map_err(|e| usage(format!("{path}: {e}")))?;
    let m = v.field.m;
    let results: Vec<(u8, Value, String)> = jobs
        .into_par_iter()
        .enumerate()
        .map(|(i, j)| {
            let trunc = j.trunc.max(v.trunc);
            match j.into_spec(m, true).and_then(|mut s| {
                s.trunc = trunc;
                run_job(&s)
            }) {
                Ok(r) => {
                    let code = if r.verified() == Some(true) { 0 } else { 3 };
                    let line = format!(
                        "job {i}: genus {} verify {}",
                        r.data.genus,
                        if code == 0 { "PASS" } else { "FAIL" }
                    );
                    (
                        code,
                        json!({"job": i, "report": r.to_json(v.out.timings)}),
                        line,
                    )
                }
                Err(e) => (
                    exit_of(&e),
                    json!({"job": i, "error": e.to_string()}),
                    format!("job {i}: error: {e}"),
                ),
            }
        })
        .collect();
    let code = results.iter().map(|r| r.0).max().unwrap_or(0);
    let all = json!({
        "schema": a4diff::report::SCHEMA,
        "jobs": results.iter().map(|r| r.1.clone()).collect::<Vec<_>>(),
    });
    emit(&v.out, &all, || {
        results.iter().map(|r| format!("{}\n", r.2)).collect()
    });
    match code {
        0 => Ok(()),
        c => Err(Fail(c, "batch had failing jobs".into())),
    }
}

fn parse_u(s: &str) -> Result<u64, Fail> {
    s.parse()
        .map_err(|_| usage(format!("bad integer {s:?} in label")))
}

fn parse_proj(f: &Gf, s: &str) -> Result<Proj, Fail> {
    if s == "inf" {
        Ok(Proj::Inf)
    } else {
        Ok(Proj::Fin(f.elem(parse_u(s)?)?))
    }
}

fn parse_small(s: &str) -> Result<u8, Fail> {
    let v = parse_u(s)?;
    u8::try_from(v).map_err(|_| usage(format!("{s} out of range")))
}

fn parse_kg(f: &Gf, s: &str) -> Result<KgLabel, Fail> {
    let p: Vec<&str> = s.split(':').collect();
    Ok(match p.as_slice() {
        ["S", i] => KgLabel::Simple { i: parse_small(i)? },
        ["M", d, x, i] => KgLabel::OddString {
            dim: parse_u(d)?,
            x: parse_small(x)?,
            i: parse_small(i)?,
        },
        ["N", d, star, i] => KgLabel::EvenString {
            dim: parse_u(d)?,
            star: match *star {
                "0" => Star::Zero,
                "inf" => Star::Inf,
                o => return Err(usage(format!("star must be 0 or inf, got {o}"))),
            },
            i: parse_small(i)?,
        },
        ["B", d, mu] => KgLabel::Band {
            dim: parse_u(d)?,
            mu: f.elem(parse_u(mu)?)?,
        },
        _ => return Err(usage(format!("cannot parse kG label {s:?}"))),
    })
}

fn parse_kh(f: &Gf, s: &str) -> Result<KhLabel, Fail> {
    let p: Vec<&str> = s.split(':').collect();
    Ok(match p.as_slice() {
        ["k"] => KhLabel::Triv,
        ["M", d, x] => KhLabel::String {
            dim: parse_u(d)?,
            x: parse_small(x)?,
        },
        ["N", d, l] => KhLabel::EvenDim {
            dim: parse_u(d)?,
            lambda: parse_proj(f, l)?,
        },
        _ => return Err(usage(format!("cannot parse kH label {s:?}"))),
    })
}

fn run_zoo(z: &ZooArgs) -> Result<(), Fail> {
    let f = field(&z.field)?;
    let label = match z.side {
        Side::Kg => AnyLabel::Kg(parse_kg(&f, &z.label)?),
        Side::Kh => AnyLabel::Kh(parse_kh(&f, &z.label)?),
    };
    let v = match (z.dictionary, label) {
        (true, AnyLabel::Kg(_)) => induce_restrict_label(&f, &label, Direction::Restrict)?,
        (true, AnyLabel::Kh(_)) => induce_restrict_label(&f, &label, Direction::Induce)?,
        (false, AnyLabel::Kg(l)) => zoo_json_kg(&f, &l)?,
        (false, AnyLabel::Kh(l)) => zoo_json_kh(&f, &l)?,
    };
    let v = json!({"schema": a4diff::report::SCHEMA, "field": f.spec(), "result": v});
    if z.pretty {
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{}", serde_json::to_string(&v).expect("json"));
    }
    Ok(())
}

fn run_examples(e: &ExampleArgs) -> Result<(), Fail> {
    let f = field(&e.field)?;
    let ex = ExampleSpec {
        which: e.which,
        n: e.n,
        x: e.x,
        psi: e.psi,
        mu: e.mu,
    };
    let (g, alpha) = example_alpha(&f, &ex)?;
    let spec = JobSpec {
        field: g,
        alpha,
        mode: Mode::Analyze,
        verify: e.verify,
        trunc: e.trunc,
        example: Some(ex),
    };
    finish_report(&run_job(&spec)?, &e.out)
}

fn run(cli: Cli) -> Result<(), Fail> {
    match &cli.cmd {
        Cmd::Analyze(a) => run_alpha(a, Mode::Analyze),
        Cmd::Hkg(a) => run_alpha(a, Mode::Hkg),
        Cmd::Verify(v) => match (&v.alpha, &v.batch) {
            (_, Some(path)) => run_batch(path, v),
            (Some(alpha), None) => run_alpha(
                &AlphaArgs {
                    alpha: alpha.clone(),
                    field: v.field.clone(),
                    trunc: v.trunc,
                    verify: true,
                    out: v.out.clone(),
                },
                Mode::Analyze,
            ),
            (None, None) => Err(usage("verify needs --alpha or --batch")),
        },
        Cmd::Zoo(z) => run_zoo(z),
        Cmd::Examples(e) => run_examples(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
