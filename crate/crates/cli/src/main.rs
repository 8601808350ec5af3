use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cloneq::ensembles::{eigenstate_ensemble, is_prime, mub_family, ObservableSet};
use cloneq::format::{round12, sig12};
use cloneq::optimal::{
    fopt_mub, mr_fidelity_bounds, optimal_cloning_fidelity, qc_upper_bound, render_csv, sweep,
    BasisOptConfig, CloneReport, SweepMode, SweepPath,
};
use cloneq::qubit::{qubit_optimal_cloner, BlochPair};
use serde_json::{json, Value};

mod verify;

const EXIT_INPUT: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Cloning-based incompatibility of quantum observables.
#[derive(Parser, Debug)]
#[command(name = "cloneq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write JSON (or CSV for sweeps) here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Haar-random restarts of the basis search.
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,

    /// Iteration cap for each restart of the basis search.
    #[arg(long, global = true, default_value_t = 500)]
    max_iters: usize,

    /// Tolerance for Hermiticity checks on input and for reported values.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Q_c of the observables in a JSON file.
    Compute {
        #[arg(long)]
        input: PathBuf,
    },
    /// Closed-form solution for two qubit observables.
    Qubit(QubitArgs),
    /// Closed-form optimum for N mutually unbiased bases.
    Mub {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Also build the bases (prime d) and run the numerical pipeline.
        #[arg(long)]
        construct: bool,
    },
    /// CSV of Q_c for N bases over dimensions, e.g. `--d 2..11` (primes
    /// only) or `--d 2,3,4`.
    SweepD {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        d: String,
        #[arg(long)]
        construct: bool,
    },
    /// CSV of Q_c for N = 2..=N_max bases in dimension d.
    SweepN {
        #[arg(long)]
        d: usize,
        /// Largest number of bases.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        construct: bool,
    },
    /// Run the oracle suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: verify::Level,
    },
}

#[derive(Args, Debug)]
struct QubitArgs {
    /// Bloch vector of the first observable, `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    bloch_a: String,
    #[arg(long, allow_hyphen_values = true)]
    bloch_b: String,
    /// Affine coefficients `alpha_1,alpha_2` of the first observable.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Convergence,
    Verify,
}

impl From<cloneq::Error> for Failure {
    fn from(e: cloneq::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn parse_reals<const N: usize>(text: &str, what: &str) -> Result<[f64; N], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(input_err(format!("{what}: expected {N} comma-separated reals, got '{text}'")));
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| input_err(format!("{what}: '{p}' is not a number")))?;
    }
    Ok(out)
}

/// `a..b` keeps the primes in the closed range; a comma list is taken as is.
fn parse_dims(text: &str) -> Result<Vec<usize>, Failure> {
    let int = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| input_err(format!("--d: '{s}' is not a positive integer")))
    };
    let dims: Vec<usize> = if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (int(lo)?, int(hi.trim_start_matches('='))?);
        (lo.max(2)..=hi).filter(|&d| is_prime(d)).collect()
    } else {
        text.split(',').map(int).collect::<Result<_, _>>()?
    };
    if dims.is_empty() {
        return Err(input_err(format!("--d: no dimensions in '{text}'")));
    }
    if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
        return Err(input_err(format!("--d: dimension {bad} < 2")));
    }
    Ok(dims)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CLONEQ_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| input_err(format!("CLONEQ_THREADS: expected a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| input_err(format!("CLONEQ_THREADS: {e}")))
}

/// Rounds every float to 12 significant digits.
fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn to_json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&rounded(v)).expect("serialisable");
    s.push('\n');
    s
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_err(format!("cannot write {}: {e}", path.display()))),
        None => {
            say(text);
            Ok(())
        }
    }
}

fn row(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<12} {value}");
}

fn report_table(r: &CloneReport) -> String {
    let mut out = String::new();
    row(&mut out, "N", r.n);
    row(&mut out, "d", r.d);
    row(&mut out, "A_opt", sig12(r.a_opt));
    row(&mut out, "A_opt/M", sig12(r.f_mr));
    row(&mut out, "G", sig12(r.g));
    row(&mut out, "q_opt", sig12(r.params_opt.q));
    row(&mut out, "p_opt", sig12(r.params_opt.p));
    row(&mut out, "F_opt", sig12(r.f_opt));
    row(&mut out, "Q_c", sig12(r.q_c));
    row(&mut out, "bound Q_c", sig12(r.bound_qc));
    row(&mut out, "bound Q", sig12(r.bound_q));
    row(&mut out, "F boundary", sig12(r.f_boundary));
    if r.clamped {
        row(&mut out, "clamped", "yes");
    }
    let converged = r.diagnostics.iter().filter(|d| d.converged).count();
    let iters: usize = r.diagnostics.iter().map(|d| d.iterations).sum();
    row(
        &mut out,
        "search",
        format!("{converged}/{} restarts converged, {iters} iterations", r.diagnostics.len()),
    );
    out
}

fn opt_config(cli: &Cli) -> Result<BasisOptConfig, Failure> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(input_err("--tol must be positive"));
    }
    let cfg = BasisOptConfig {
        restarts: cli.restarts,
        max_iters: cli.max_iters,
        seed: cli.seed,
        value_tol: cli.tol,
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_compute(cli: &Cli, input: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(input)
        .map_err(|e| input_err(format!("cannot read {}: {e}", input.display())))?;
    let set = ObservableSet::from_json(&text, cli.tol)
        .map_err(|e| input_err(format!("{}: {e}", input.display())))?;
    let cfg = opt_config(cli)?;
    let ens = eigenstate_ensemble(&set, cli.tol)?;
    let report = optimal_cloning_fidelity(&ens, &cfg)?;
    say(&report_table(&report));
    let json = serde_json::to_value(&report).expect("serialisable");
    match &cli.output {
        Some(path) => emit(&to_json_text(json), Some(path))?,
        None => say(&format!("\n{}", to_json_text(json))),
    }
    if report.converged {
        Ok(())
    } else {
        Err(Failure::Convergence)
    }
}

fn cmd_qubit(cli: &Cli, args: &QubitArgs) -> Result<(), Failure> {
    let a: [f64; 3] = parse_reals(&args.bloch_a, "--bloch-a")?;
    let b: [f64; 3] = parse_reals(&args.bloch_b, "--bloch-b")?;
    let alpha = args.alpha.as_deref().map(|s| parse_reals::<2>(s, "--alpha")).transpose()?;
    let beta = args.beta.as_deref().map(|s| parse_reals::<2>(s, "--beta")).transpose()?;
    let pair = BlochPair::from_affine(alpha.unwrap_or([0.0, 1.0]), a, beta.unwrap_or([0.0, 1.0]), b)?;
    let s = qubit_optimal_cloner(&pair);

    let vec3 = |v: Option<[f64; 3]>| v.map_or("-".to_string(), |v| v.map(sig12).join(","));
    let mut out = String::new();
    row(&mut out, "a.b", sig12(pair.overlap()));
    row(&mut out, "A_opt", sig12(s.a_opt));
    row(&mut out, "G", sig12(s.g));
    row(&mut out, "q_opt", sig12(s.q_opt));
    row(&mut out, "p_opt", sig12(s.p_opt));
    row(&mut out, "F_opt", sig12(s.f_opt));
    row(&mut out, "Q_c", sig12(s.q_c));
    row(&mut out, "r_opt", vec3(Some(s.r_opt)));
    row(&mut out, "r_plus", vec3(s.r_plus));
    row(&mut out, "r_minus", vec3(s.r_minus));
    if s.degenerate_direction {
        row(&mut out, "note", "every direction in the a-b plane is optimal");
    }
    say(&out);
    let json = json!({ "a": a, "b": b, "overlap": pair.overlap(), "solution": s });
    match &cli.output {
        Some(path) => emit(&to_json_text(json), Some(path)),
        None => {
            say(&format!("\n{}", to_json_text(json)));
            Ok(())
        }
    }
}

fn cmd_mub(cli: &Cli, d: usize, n: usize, construct: bool) -> Result<(), Failure> {
    let opt = fopt_mub(n, d)?;
    let (f_mr, q_bound) = mr_fidelity_bounds(n, d)?;
    let mut out = String::new();
    row(&mut out, "N", n);
    row(&mut out, "d", d);
    row(&mut out, "A_opt", sig12(opt.a_opt));
    row(&mut out, "q_opt", sig12(opt.q_opt()));
    row(&mut out, "p_opt", sig12(opt.params.p));
    row(&mut out, "F_opt", sig12(opt.f_opt));
    row(&mut out, "Q_c", sig12(opt.q_c()));
    row(&mut out, "F_mr", sig12(f_mr));
    row(&mut out, "bound Q", sig12(q_bound));
    let mut json = json!({
        "n": n, "d": d, "a_opt": opt.a_opt, "q_opt": opt.q_opt(), "p_opt": opt.params.p,
        "f_opt": opt.f_opt, "q_c": opt.q_c(), "f_mr": f_mr, "bound_q": q_bound,
        "bound_qc": qc_upper_bound(n, d)?,
    });
    let mut converged = true;
    if construct {
        if !is_prime(d) {
            return Err(input_err(format!("--construct needs a prime dimension, got {d}")));
        }
        let ens = eigenstate_ensemble(&mub_family(d, n)?, cli.tol)?;
        let report = optimal_cloning_fidelity(&ens, &opt_config(cli)?)?;
        converged = report.converged;
        row(&mut out, "pipeline", format!("Q_c = {}", sig12(report.q_c)));
        row(&mut out, "difference", sig12((report.q_c - opt.q_c()).abs()));
        json["pipeline"] = serde_json::to_value(&report).expect("serialisable");
    }
    say(&out);
    match &cli.output {
        Some(path) => emit(&to_json_text(json), Some(path))?,
        None => say(&format!("\n{}", to_json_text(json))),
    }
    if converged {
        Ok(())
    } else {
        Err(Failure::Convergence)
    }
}

fn cmd_sweep(cli: &Cli, mode: SweepMode, construct: bool) -> Result<(), Failure> {
    let path = if construct {
        let dims = match &mode {
            SweepMode::VaryD { dims, .. } => dims.clone(),
            SweepMode::VaryN { d, .. } => vec![*d],
        };
        if let Some(bad) = dims.iter().find(|&&d| !is_prime(d)) {
            return Err(input_err(format!("--construct needs prime dimensions, got {bad}")));
        }
        SweepPath::Constructed(opt_config(cli)?)
    } else {
        SweepPath::ClosedForm
    };
    let rows = sweep(&mode, &path)?;
    emit(&render_csv(&rows), cli.output.as_deref())
}

fn cmd_verify(cli: &Cli, level: verify::Level) -> Result<(), Failure> {
    let results = verify::run(level, opt_config(cli)?, &verify::Subject::default());
    let mut out = String::new();
    for r in &results {
        let _ = writeln!(out, "{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(out, "{} of {} checks passed", results.len() - failed, results.len());
    emit(&out, cli.output.as_deref())?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Compute { input } => cmd_compute(cli, input),
        Command::Qubit(args) => cmd_qubit(cli, args),
        Command::Mub { d, n, construct } => cmd_mub(cli, *d, *n, *construct),
        Command::SweepD { n, d, construct } => {
            let mode = SweepMode::VaryD { n: *n, dims: parse_dims(d)? };
            cmd_sweep(cli, mode, *construct)
        }
        Command::SweepN { d, n, construct } => {
            if *n < 2 {
                return Err(input_err("--n must be at least 2"));
            }
            let mode = SweepMode::VaryN { d: *d, counts: (2..=*n).collect() };
            cmd_sweep(cli, mode, *construct)
        }
        Command::Verify { level } => cmd_verify(cli, *level),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Convergence) => {
            eprintln!("warning: basis search did not converge; best value found is reported");
            ExitCode::from(EXIT_CONVERGENCE)
        }
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_range_keeps_primes() {
        assert_eq!(parse_dims("2..11").unwrap(), vec![2, 3, 5, 7, 11]);
        assert_eq!(parse_dims("2,4,6").unwrap(), vec![2, 4, 6]);
        assert!(parse_dims("8..10").is_err());
        assert!(parse_dims("1,2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn reals_parsing() {
        assert_eq!(parse_reals::<3>("0, -1,0", "v").unwrap(), [0.0, -1.0, 0.0]);
        assert!(parse_reals::<3>("0,1", "v").is_err());
        assert!(parse_reals::<2>("a,1", "v").is_err());
    }

    #[test]
    fn rounding_is_applied_recursively() {
        let v = rounded(json!({"x": [1.0 / 3.0], "y": 2}));
        assert_eq!(v, json!({"x": [0.333333333333], "y": 2}));
    }
}
