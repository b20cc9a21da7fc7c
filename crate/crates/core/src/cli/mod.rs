//! Command-line front end.
//!
//! Exit codes: `0` verified success, `1` a correctly computed negative answer,
//! `2` usage or input error, `3` search budget exhausted. Errors are printed to
//! stderr as one JSON object. Artifacts are written atomically into `--out`,
//! with the wall-clock timestamp kept apart in `meta.json`.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "intersective", version, about = "Decide and certify intersectivity of polynomial families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is there a single n making every member divisible by k?
    CheckMod(Opts),
    /// Joint solvability modulo every prime power up to -B, plus the GCD reduction.
    Joint(Opts),
    /// Decide intersectivity of one polynomial and write a certificate.
    Prove(Opts),
    /// Check a certificate file independently.
    VerifyCert(Opts),
    /// Divisibility sublattice (-k) or coset refinement (--sub).
    LatticeRefine(Opts),
    /// Normal form, orbit closure with zero, and sampling cross-check.
    TorusClosure(Opts),
    /// Densities of multiple intersections over a box of shifts.
    Scan(Opts),
    /// Average of μ(A ∩ (A − p(n)α)) over [0, N).
    Toterg(Opts),
    /// Emptiness of A ∩ (A − nα) ∩ (A − (2n+1)α) for n in [1, N].
    EmptyTriple(Opts),
    /// Every subgroup of index ≤ -B meets the image of the maps.
    Multidim(Opts),
}

impl Command {
    fn parts(self) -> (&'static str, Opts) {
        match self {
            Command::CheckMod(o) => ("check-mod", o),
            Command::Joint(o) => ("joint", o),
            Command::Prove(o) => ("prove", o),
            Command::VerifyCert(o) => ("verify-cert", o),
            Command::LatticeRefine(o) => ("lattice-refine", o),
            Command::TorusClosure(o) => ("torus-closure", o),
            Command::Scan(o) => ("scan", o),
            Command::Toterg(o) => ("toterg", o),
            Command::EmptyTriple(o) => ("empty-triple", o),
            Command::Multidim(o) => ("multidim", o),
        }
    }
}

/// Run configuration. The JSON config file uses the long flag names as keys.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct Opts {
    /// Subcommand the config file was written for; checked against the invoked one.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Polynomial (repeatable). For `multidim`, a vector such as "(n, n^2)".
    #[arg(short = 'p', long = "poly")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub poly: Vec<String>,
    /// Variable names, comma separated (default: n).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vars: Option<String>,
    #[arg(short = 'k')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    /// Modulus bound, prime-power bound or subgroup index bound.
    #[arg(short = 'B', long = "bound")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    /// Prime bound for Hensel sweeps.
    #[arg(short = 'Q', long = "prime-bound")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_bound: Option<u64>,
    /// Largest q-adic precision exponent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emax: Option<u32>,
    /// Box radius N.
    #[arg(long = "box")]
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_radius: Option<u64>,
    /// Good-set threshold, as a fraction or decimal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    /// Irrational value: decimal, `sqrt2`, `golden`, `(1+sqrt(5))/2`, …
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Evaluation budget per search.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Torus coordinates attached to the matching -p, e.g. "(alpha, 1/2)" (repeatable).
    #[arg(long = "vec")]
    #[serde(rename = "vec", skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<String>,
    /// Irrational label, optionally with a value: `beta` or `beta=sqrt3` (repeatable).
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub label: Vec<String>,
    /// Diagonal of the subgroup for coset refinement, e.g. "6" or "2,3".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub: Option<String>,
    /// Window set as JSON, or @path to a JSON file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    /// Split the window into the residue classes modulo this number.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<u64>,
    /// Arc `lo,hi` of the circle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<String>,
    /// Certificate file for verify-cert.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cert: Option<PathBuf>,
}

impl Opts {
    /// Flags given on the command line win over the config file.
    fn merged_over(self, base: Opts) -> Opts {
        fn pick<T>(a: Option<T>, b: Option<T>) -> Option<T> {
            a.or(b)
        }
        fn pick_vec<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Opts {
            command: pick(self.command, base.command),
            poly: pick_vec(self.poly, base.poly),
            vars: pick(self.vars, base.vars),
            k: pick(self.k, base.k),
            bound: pick(self.bound, base.bound),
            prime_bound: pick(self.prime_bound, base.prime_bound),
            emax: pick(self.emax, base.emax),
            box_radius: pick(self.box_radius, base.box_radius),
            eps: pick(self.eps, base.eps),
            alpha: pick(self.alpha, base.alpha),
            out: pick(self.out, base.out),
            config: self.config,
            seed: pick(self.seed, base.seed),
            budget: pick(self.budget, base.budget),
            vectors: pick_vec(self.vectors, base.vectors),
            label: pick_vec(self.label, base.label),
            sub: pick(self.sub, base.sub),
            set: pick(self.set, base.set),
            partition: pick(self.partition, base.partition),
            interval: pick(self.interval, base.interval),
            cert: pick(self.cert, base.cert),
        }
    }

    /// Every positivity problem at once.
    fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let positive = [
            ("-k", self.k),
            ("--box", self.box_radius),
            ("--budget", self.budget),
            ("--partition", self.partition),
        ];
        for (name, v) in positive {
            if v == Some(0) {
                errs.push(format!("{name} must be positive"));
            }
        }
        for (name, v) in [("-B", self.bound), ("-Q", self.prime_bound)] {
            if v.is_some_and(|v| v < 2) {
                errs.push(format!("{name} must be at least 2"));
            }
        }
        if self.emax == Some(0) {
            errs.push("--emax must be positive".into());
        }
        errs
    }
}

/// What a command produced.
pub(crate) struct Outcome {
    pub code: i32,
    pub summary: serde_json::Value,
    /// `(file name, contents)` written under `--out`.
    pub artifacts: Vec<(String, String)>,
}

/// Usage-level failure raised before or outside the library.
#[derive(Debug)]
pub(crate) struct Usage(pub Vec<String>);

pub(crate) enum Failure {
    Usage(Usage),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Inconsistent(_) | Error::PreconditionViolated(_) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn error_json(kind: &str, messages: &[String], code: i32) -> String {
    serde_json::json!({ "error": { "kind": kind, "messages": messages, "exit_code": code } }).to_string()
}

fn load_config(path: &Path) -> Result<Opts, Failure> {
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(Usage(vec![format!("config {}: {e}", path.display())])))
}

/// Writes `contents` to `dir/name` via a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, dir.join(name))
}

fn persist(dir: &Path, command: &str, outcome: &Outcome) -> std::io::Result<()> {
    for (name, contents) in &outcome.artifacts {
        write_atomic(dir, name, contents)?;
    }
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": stamp,
        "artifacts": outcome.artifacts.iter().map(|a| a.0.clone()).collect::<Vec<_>>(),
        "exit_code": outcome.code,
    });
    write_atomic(dir, "meta.json", &serde_json::to_string_pretty(&meta).expect("json"))
}

fn execute(name: &str, opts: Opts) -> Result<Outcome, Failure> {
    let opts = match &opts.config {
        Some(path) => {
            let base = load_config(path)?;
            opts.merged_over(base)
        }
        None => opts,
    };
    if let Some(c) = &opts.command {
        if c != name {
            return Err(Usage(vec![format!("config was written for '{c}', not '{name}'")]).into());
        }
    }
    let errs = opts.validate();
    if !errs.is_empty() {
        return Err(Usage(errs).into());
    }
    let outcome = commands::dispatch(name, &opts)?;
    if let Some(dir) = &opts.out {
        persist(dir, name, &outcome).map_err(Error::Io)?;
    }
    Ok(outcome)
}

/// Runs the CLI on `args` (including the program name), printing to the given streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = writeln!(stderr, "{}", error_json("usage", &[e.to_string()], code));
            }
            return code;
        }
    };
    let (name, opts) = cli.command.parts();
    match execute(name, opts) {
        Ok(out) => {
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&out.summary).expect("json"));
            out.code
        }
        Err(Failure::Usage(Usage(msgs))) => {
            let _ = writeln!(stderr, "{}", error_json("usage", &msgs, EXIT_USAGE));
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let code = exit_code(&e);
            let _ = writeln!(stderr, "{}", error_json(e.kind(), &[e.to_string()], code));
            code
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["intersective"];
        full.extend_from_slice(args);
        let code = run_with(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["check-mod", "-p", "2*n+1", "-k", "2"]).0, EXIT_NEGATIVE);
        assert_eq!(run(&["check-mod", "-p", "n^2-1", "-k", "24"]).0, EXIT_OK);
        assert_eq!(run(&["joint", "-p", "n", "-p", "n-1", "-B", "100"]).0, EXIT_NEGATIVE);
        let (code, _, err) = run(&["check-mod", "-p", "2*n+", "-k", "2"]);
        assert_eq!(code, EXIT_USAGE);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "parse");
        assert_eq!(run(&["check-mod", "-p", "n", "-k", "0"]).0, EXIT_USAGE);
        assert_eq!(run(&["no-such-command"]).0, EXIT_USAGE);
    }

    #[test]
    fn validation_collects_every_problem() {
        let (code, _, err) = run(&["joint", "-p", "n", "-B", "1", "--box", "0", "--emax", "0"]);
        assert_eq!(code, EXIT_USAGE);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["messages"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn config_round_trip() {
        let opts = Opts {
            command: Some("prove".into()),
            poly: vec!["n^2-1".into()],
            prime_bound: Some(50),
            box_radius: Some(7),
            vectors: vec!["(alpha)".into()],
            ..Opts::default()
        };
        let text = serde_json::to_string(&opts).unwrap();
        assert!(text.contains("\"box\":7") && text.contains("\"prime-bound\":50"));
        let back: Opts = serde_json::from_str(&text).unwrap();
        assert_eq!(back, opts);
        assert!(serde_json::from_str::<Opts>(r#"{"unknown": 1}"#).is_err());
    }
}
