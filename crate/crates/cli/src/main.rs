//! `sqwalk`: scattering quantum walks from the command line.
//!
//! Exit codes: 0 success, 1 cross-validation breach, 2 usage, parse or
//! validation error, 3 computation (route) failure, 4 path enumeration
//! guard, 5 output I/O failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use sqwalk::crossval::{three_routes, Residuals};
use sqwalk::lattice::{make_ballistic_lattice, make_mirror_lattice, make_unbiased_lattice};
use sqwalk::paths::{
    enumerate_paths, group_by_monomial, overall_interference, pair_interference, path_amplitude,
    ENUMERATION_LIMIT,
};
use sqwalk::random::seeded_lattice;
use sqwalk::stats::{dispersion_sweep, distribution, std_dev, Route};
use sqwalk::{BasisState, Direction, Error, Lattice};

const VERIFY_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "sqwalk",
    version,
    about = "Scattering quantum walks on the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution after m steps from one basis state.
    Evolve(EvolveArgs),
    /// Cross-check evolution, Green's function and path sum.
    Verify(VerifyArgs),
    /// Enumerate the paths between two basis states.
    Paths(PathsArgs),
    /// Spread of the walk against the classical square-root law.
    Dispersion(DispersionArgs),
}

#[derive(Args)]
struct Output {
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON destination (defaults to the CSV path with a .json extension, or stderr).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    /// Lattice JSON file, or one of: unbiased, ballistic, mirror.
    lattice: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sigma: Direction,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    j: i64,
    #[arg(long)]
    m: usize,
    /// evolve, greens or closed-form.
    #[arg(long, default_value = "evolve")]
    route: Route,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// Lattice JSON file or built-in name; omit when using --random.
    lattice: Option<String>,
    /// Number of seeded random lattices to check.
    #[arg(long, conflicts_with = "lattice")]
    random: Option<u64>,
    #[arg(long, default_value_t = 12)]
    m_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathsArgs {
    #[arg(long, allow_hyphen_values = true)]
    sigma: Direction,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    j: i64,
    #[arg(long, allow_hyphen_values = true)]
    nu: Direction,
    #[arg(long, allow_hyphen_values = true)]
    j_prime: i64,
    #[arg(long)]
    m: usize,
    /// Lattice used for path amplitudes.
    #[arg(long, default_value = "unbiased")]
    lattice: String,
    /// Also write the grouped classes and their interference verdict.
    #[arg(long)]
    group: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DispersionArgs {
    lattice: String,
    /// Comma-separated steps; items may be ranges `a..b` or `a..b:step`.
    #[arg(long)]
    m_list: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sigma: Direction,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    j: i64,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Breach(String),
    Usage(String),
    Route(Error),
    Guard(Error),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Breach(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Route(_) => 3,
            Failure::Guard(_) => 4,
            Failure::Io(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Breach(s) => format!("verification failed: {s}"),
            Failure::Usage(s) => s.clone(),
            Failure::Route(e) => format!("computation failed: {e} ({e:?})"),
            Failure::Guard(e) => format!("{e}"),
            Failure::Io(s) => format!("i/o error: {s}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EnumerationTooLarge { .. } => Failure::Guard(e),
            Error::UnitarityViolation { .. }
            | Error::InvalidWindow { .. }
            | Error::LatticeSpec(_) => Failure::Usage(format!("invalid lattice: {e}")),
            other => Failure::Route(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn load_lattice(spec: &str) -> CliResult<Lattice> {
    match spec {
        "unbiased" => Ok(make_unbiased_lattice()),
        "ballistic" => Ok(make_ballistic_lattice()),
        "mirror" => Ok(make_mirror_lattice()),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read lattice file {path}: {e}")))?;
            Lattice::from_json_str(&text)
                .map_err(|e| Failure::Usage(format!("invalid lattice file {path}: {e}")))
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(dest: Option<&Path>, text: &str, fallback_stderr: bool) -> CliResult<()> {
    match dest {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None if fallback_stderr => io::stderr()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn emit(output: &Output, csv: &str, report: &Value) -> CliResult<()> {
    write_text(output.out.as_deref(), csv, false)?;
    let json_path = output
        .json
        .clone()
        .or_else(|| output.out.as_ref().map(|p| p.with_extension("json")));
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    write_text(json_path.as_deref(), &text, true)
}

fn cmd_evolve(a: &EvolveArgs) -> CliResult<()> {
    let lat = load_lattice(&a.lattice)?;
    let initial = BasisState::new(a.sigma, a.j);
    let d = distribution(initial, &lat, a.m, a.route)?;
    let state = d
        .state
        .as_ref()
        .expect("quantum distributions carry amplitudes");

    let mut csv = String::from("j_prime,p,a_plus_re,a_plus_im,a_minus_re,a_minus_im\n");
    let mut rows = 0;
    for jp in d.allowed_sites() {
        let (ap, am) = (
            state.amplitude(BasisState::plus(jp)),
            state.amplitude(BasisState::minus(jp)),
        );
        if !lat.contains_state(BasisState::plus(jp)) && !lat.contains_state(BasisState::minus(jp)) {
            continue;
        }
        csv += &format!(
            "{jp},{},{},{},{},{}\n",
            num(d.p(jp)),
            num(ap.re),
            num(ap.im),
            num(am.re),
            num(am.im)
        );
        rows += 1;
    }
    let report = json!({
        "route": a.route.to_string(),
        "sigma": a.sigma.to_string(),
        "j": a.j,
        "m": a.m,
        "rows": rows,
        "norm": state.norm_sqr(),
        "nonzero_amplitudes": state.nonzero_count(),
        "nonzero_sites": d.probs.values().filter(|p| **p > 0.0).count(),
        "delta": std_dev(&d),
    });
    emit(&a.output, &csv, &report)
}

fn describe(r: &Residuals) -> Value {
    let pair = |w: sqwalk::crossval::Worst| {
        json!({
            "residual": w.residual,
            "sigma": w.sigma.map(|s| s.to_string()),
            "nu": w.nu.map(|s| s.to_string()),
            "j_prime": w.j_prime,
            "m": w.m,
        })
    };
    json!({
        "evolve_greens": pair(r.evolve_greens),
        "evolve_paths": pair(r.evolve_paths),
        "greens_paths": pair(r.greens_paths),
    })
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    if a.m_max > ENUMERATION_LIMIT {
        return Err(Failure::Guard(Error::EnumerationTooLarge {
            m: a.m_max,
            limit: ENUMERATION_LIMIT,
        }));
    }
    let span = a.m_max as i64 + 2;
    let lattices: Vec<(Option<u64>, Lattice)> = match (&a.lattice, a.random) {
        (Some(spec), None) => vec![(None, load_lattice(spec)?)],
        (None, Some(n)) => (0..n)
            .map(|i| (Some(i), seeded_lattice(a.seed, i, -span, span)))
            .collect(),
        _ => return Err(Failure::Usage("give either a lattice or --random N".into())),
    };

    let mut total = Residuals::default();
    let mut per_lattice = Vec::new();
    let mut breach = None;
    for (index, lat) in &lattices {
        let r = three_routes(lat, 0, a.m_max)?;
        let (pair, w) = r.worst();
        if w.residual >= VERIFY_TOL && breach.is_none() {
            breach = Some(format!(
                "{pair} residual {:.3e} on lattice {} (seed {}), sigma {}, nu {}, j' {}, m {}",
                w.residual,
                index.map_or("file".to_string(), |i| i.to_string()),
                a.seed,
                w.sigma.map_or('?', |s| s.symbol()),
                w.nu.map_or('?', |s| s.symbol()),
                w.j_prime,
                w.m
            ));
        }
        per_lattice.push(json!({ "index": index, "max_residual": r.max() }));
        total.merge(&r);
    }
    let report = json!({
        "lattices": lattices.len(),
        "seed": a.seed,
        "m_max": a.m_max,
        "tolerance": VERIFY_TOL,
        "max_residual": total.max(),
        "pairs": describe(&total),
        "per_lattice": per_lattice,
        "pass": breach.is_none(),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_text(a.out.as_deref(), &text, false)?;
    match breach {
        Some(msg) => Err(Failure::Breach(msg)),
        None => Ok(()),
    }
}

fn cmd_paths(a: &PathsArgs) -> CliResult<()> {
    let lat = load_lattice(&a.lattice)?;
    let paths = enumerate_paths(a.sigma, a.j, a.nu, a.j_prime, a.m)?;
    let amps: Vec<Complex64> = paths.iter().map(|p| path_amplitude(p, &lat)).collect();

    let mut csv = String::from("path_id,end_sigma,end_j,n_changes,amplitude_re,amplitude_im\n");
    for (i, (p, amp)) in paths.iter().zip(&amps).enumerate() {
        csv += &format!(
            "{i},{},{},{},{},{}\n",
            p.end.sigma,
            p.end.j,
            p.n_changes,
            num(amp.re),
            num(amp.im)
        );
    }
    let total: Complex64 = amps.iter().sum();
    let mut report = json!({
        "sigma": a.sigma.to_string(),
        "j": a.j,
        "nu": a.nu.to_string(),
        "j_prime": a.j_prime,
        "m": a.m,
        "paths": paths.len(),
        "amplitude": [total.re, total.im],
    });

    if a.group {
        let groups = group_by_monomial(&paths)?;
        let contributions: Vec<Complex64> = groups
            .iter()
            .map(|g| g.members.iter().map(|&i| amps[i]).sum())
            .collect();
        let group_json: Vec<Value> = groups
            .iter()
            .zip(&contributions)
            .map(|(g, c)| {
                let common = amps[g.members[0]];
                let spread = g
                    .members
                    .iter()
                    .map(|&i| (amps[i] - common).norm())
                    .fold(0.0, f64::max);
                json!({
                    "n": g.n,
                    "n_changes": g.n_changes,
                    "multiplicity": g.multiplicity,
                    "factors": {
                        "t_plus": g.factors.t_plus,
                        "t_minus": g.factors.t_minus,
                        "r_plus": g.factors.r_plus,
                        "r_minus": g.factors.r_minus,
                    },
                    "path_amplitude": [common.re, common.im],
                    "spread": spread,
                    "contribution": [c.re, c.im],
                })
            })
            .collect();
        let mut pairs = Vec::new();
        for i in 0..groups.len() {
            for k in i + 1..groups.len() {
                pairs.push(json!({
                    "n_a": groups[i].n,
                    "n_b": groups[k].n,
                    "verdict": pair_interference(contributions[i], contributions[k]),
                }));
            }
        }
        report["groups"] = Value::Array(group_json);
        report["pairs"] = Value::Array(pairs);
        report["verdict"] = json!(overall_interference(&contributions));
    }
    emit(&a.output, &csv, &report)
}

fn parse_m_list(s: &str) -> CliResult<Vec<usize>> {
    let bad = |item: &str| Failure::Usage(format!("invalid m-list item '{item}'"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (hi, step),
                None => (rest, "1"),
            };
            let lo: usize = lo.parse().map_err(|_| bad(item))?;
            let hi: usize = hi.parse().map_err(|_| bad(item))?;
            let step: usize = step.parse().map_err(|_| bad(item))?;
            if step == 0 {
                return Err(bad(item));
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(item.parse().map_err(|_| bad(item))?);
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage("m-list is empty".into()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn cmd_dispersion(a: &DispersionArgs) -> CliResult<()> {
    let ms = parse_m_list(&a.m_list)?;
    let lat = load_lattice(&a.lattice)?;
    let sweep = dispersion_sweep(&lat, BasisState::new(a.sigma, a.j), &ms)?;
    let mut csv = String::from("m,delta_q,delta_c\n");
    for r in &sweep.rows {
        csv += &format!("{},{},{}\n", r.m, num(r.delta_q), num(r.delta_c));
    }
    let report = json!({
        "points": sweep.rows.len(),
        "slope": sweep.fit.map(|f| f.slope),
        "intercept": sweep.fit.map(|f| f.intercept),
        "r_squared": sweep.fit.map(|f| f.r_squared),
    });
    emit(&a.output, &csv, &report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Paths(a) => cmd_paths(a),
        Command::Dispersion(a) => cmd_dispersion(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sqwalk: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
