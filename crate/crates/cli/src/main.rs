mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ordsearch::artifacts::{
    coefficient_csv, curve_csv, gram_csv, load, to_json, Artifact, CertificateFile, Loaded,
    SolutionFile,
};
use ordsearch::reconstruct::reconstruct_with;
use ordsearch::simulator::{exactness_report, RecursiveSearcher};
use ordsearch::solver::{search_nstar_with, SolveOutcome};
use ordsearch::stats::complexity_stats;
use ordsearch::{build_instance, solve_feasibility, Error};

use config::{Settings, Tolerances};
use manifest::Manifest;

const CURVE_POINTS: usize = 512;

/// Exit codes shared by every subcommand.
mod code {
    pub const OK: u8 = 0;
    pub const NEGATIVE: u8 = 1;
    pub const INDETERMINATE: u8 = 2;
    pub const BRACKETING: u8 = 3;
    pub const INPUT: u8 = 4;
}

#[derive(Parser)]
#[command(name = "ordsearch", version, about = "Synthesize and check exact quantum ordered-search algorithms")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory receiving artifacts and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// TOML file with a [tolerances] table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Subcommand)]
enum Command {
    /// Decide S(K, N) and write a solution or certificate.
    Solve {
        k: usize,
        n: usize,
        /// Also sample every Q_t on the unit circle.
        #[arg(long)]
        emit_curve: bool,
    },
    /// Find the largest feasible N for K queries.
    Nstar {
        k: usize,
        #[arg(long, default_value_t = 1)]
        lo: usize,
        #[arg(long, default_value_t = 4096)]
        hi: usize,
    },
    /// Re-check a solution, certificate or algorithm file.
    Verify { file: PathBuf },
    /// Turn a solution file into an algorithm file.
    Reconstruct { file: PathBuf },
    /// Simulate an algorithm file over all targets.
    Simulate {
        file: PathBuf,
        /// Search every target of an M-element list with the recursive composition.
        #[arg(long)]
        recursive: Option<usize>,
    },
    /// Reference query counts for a list of N items.
    Stats { n: u64 },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { code::INPUT } else { code::OK });
        }
    };
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Indeterminate { .. }) => code::INDETERMINATE,
        Some(Error::BoundaryNotBracketed { .. }) => code::BRACKETING,
        Some(
            Error::ReconstructionMismatch { .. }
            | Error::MagnitudeMismatch { .. }
            | Error::AtQuery { .. }
            | Error::FactorizationFailed(_)
            | Error::InexactBase { .. }
            | Error::AmbiguousMeasurement(_),
        ) => code::NEGATIVE,
        _ => code::INPUT,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let settings = Settings::resolve(cli.common.config.as_deref(), &cli.common.tol)?;
    std::fs::create_dir_all(&cli.common.out)
        .with_context(|| format!("creating {}", cli.common.out.display()))?;
    let out = cli.common.out.as_path();
    let start = Instant::now();
    let mut manifest = Manifest::new(&settings);
    let result = match cli.command {
        Command::Solve { k, n, emit_curve } => solve(k, n, emit_curve, &settings, out, &mut manifest),
        Command::Nstar { k, lo, hi } => nstar(k, lo, hi, &settings, out, &mut manifest),
        Command::Verify { file } => verify(&file, &settings, &mut manifest),
        Command::Reconstruct { file } => reconstruct(&file, &settings, out, &mut manifest),
        Command::Simulate { file, recursive } => {
            simulate(&file, recursive, &settings, out, &mut manifest)
        }
        Command::Stats { n } => stats(n, out, &mut manifest),
    };
    let exit = match &result {
        Ok(c) => *c,
        Err(e) => {
            manifest.error(&format!("{e:#}"));
            error_code(e)
        }
    };
    manifest.finish(out, start.elapsed(), exit)?;
    result
}

fn file_tag(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_artifact(path: &Path) -> anyhow::Result<Loaded> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load(&text)?)
}

/// Writes a solve outcome and returns its exit code.
fn write_outcome(
    outcome: &SolveOutcome,
    emit_curve: bool,
    out: &Path,
    manifest: &mut Manifest,
) -> anyhow::Result<u8> {
    match outcome {
        SolveOutcome::Feasible(fp) => {
            let stem = format!("k{}_n{}", fp.k, fp.n);
            let file = Artifact::Solution(SolutionFile::from_point(fp));
            manifest.write(out, &format!("solution_{stem}.json"), &to_json(&file)?)?;
            manifest.write(
                out,
                &format!("coefficients_{stem}.csv"),
                &coefficient_csv(&fp.polynomial_view),
            )?;
            if emit_curve {
                manifest.write(
                    out,
                    &format!("curve_{stem}.csv"),
                    &curve_csv(&fp.polynomial_view, CURVE_POINTS),
                )?;
            }
            println!(
                "k={} N={}: feasible (eq_violation {:.3e}, min_eig {:.3e}, margin {:.3e})",
                fp.k, fp.n, fp.eq_violation, fp.min_eig, fp.margin
            );
        }
        SolveOutcome::Infeasible(cert) => {
            let file = CertificateFile::from_certificate(cert);
            println!(
                "k={} N={}: infeasible (gap ratio {:.3e}, min slack eigenvalue {:.3e})",
                cert.k,
                cert.n,
                file.gap_ratio,
                file.slack.iter().map(|s| s.min_eig).fold(f64::INFINITY, f64::min)
            );
            let name = format!("certificate_k{}_n{}.json", cert.k, cert.n);
            manifest.write(out, &name, &to_json(&Artifact::Certificate(file))?)?;
        }
        SolveOutcome::Indeterminate(d) => {
            let name = format!("diagnostics_k{}_n{}.json", d.k, d.n);
            manifest.write(out, &name, &to_json(d)?)?;
            println!("k={} N={}: indeterminate ({})", d.k, d.n, d.reason);
        }
    }
    Ok(outcome.exit_code() as u8)
}

fn solve(
    k: usize,
    n: usize,
    emit_curve: bool,
    settings: &Settings,
    out: &Path,
    manifest: &mut Manifest,
) -> anyhow::Result<u8> {
    manifest.command("solve", &format!("k{k}_n{n}"), json!({ "k": k, "n": n, "emit_curve": emit_curve }));
    let inst = build_instance(k, n)?;
    let outcome = solve_feasibility(&inst, &settings.solver)?;
    manifest.outcome(outcome_name(&outcome));
    write_outcome(&outcome, emit_curve, out, manifest)
}

fn outcome_name(o: &SolveOutcome) -> &'static str {
    match o {
        SolveOutcome::Feasible(_) => "feasible",
        SolveOutcome::Infeasible(_) => "infeasible",
        SolveOutcome::Indeterminate(_) => "indeterminate",
    }
}

fn nstar(
    k: usize,
    lo: usize,
    hi: usize,
    settings: &Settings,
    out: &Path,
    manifest: &mut Manifest,
) -> anyhow::Result<u8> {
    manifest.command("nstar", &format!("k{k}"), json!({ "k": k, "lo": lo, "hi": hi }));
    let result = search_nstar_with(k, lo, hi, &settings.solver, |n, o| {
        eprintln!("  N={n}: {}", outcome_name(o));
    });
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            manifest.outcome(match e {
                Error::BoundaryNotBracketed { .. } => "not bracketed",
                Error::Indeterminate { .. } => "indeterminate",
                _ => "error",
            });
            return Err(e.into());
        }
    };
    write_outcome(&SolveOutcome::Feasible(result.witness.clone()), false, out, manifest)?;
    write_outcome(&SolveOutcome::Infeasible(result.refutation.clone()), false, out, manifest)?;
    let report = json!({
        "k": k,
        "n_star": result.n_star,
        "witness": format!("solution_k{k}_n{}.json", result.n_star),
        "refutation": format!("certificate_k{k}_n{}.json", result.n_star + 1),
        "evaluations": result.evaluations,
        "conditional_on_monotonicity": result.conditional_on_monotonicity,
    });
    manifest.write(out, &format!("nstar_k{k}.json"), &to_json(&report)?)?;
    manifest.outcome("bracketed");
    println!("N* = {} for k = {k}", result.n_star);
    Ok(code::OK)
}

fn verify(file: &Path, settings: &Settings, manifest: &mut Manifest) -> anyhow::Result<u8> {
    manifest.command("verify", &file_tag(file), json!({ "file": file }));
    manifest.input(file)?;
    let (ok, detail) = match read_artifact(file)? {
        Loaded::Solution(s) => {
            let c = s.verify(&settings.solver)?;
            (
                c.ok,
                format!(
                    "solution k={} N={}: eq_violation {:.3e}, min_eig {:.3e}, root mismatch {:.3e}",
                    s.k, s.n, c.eq_violation, c.min_eig, c.polynomials.root_mismatch
                ),
            )
        }
        Loaded::Certificate(cf) => {
            let c = cf.verify(&settings.solver)?;
            (
                c.ok,
                format!(
                    "certificate k={} N={}: gap ratio {:.3e}, min slack eigenvalue {:.3e}",
                    cf.k, cf.n, c.gap_ratio, c.min_slack_eig
                ),
            )
        }
        Loaded::Algorithm(a) => {
            let r = exactness_report(&a, settings.sim_tol);
            (
                r.exact,
                format!(
                    "algorithm k={} N={}: max off-diagonal {:.3e}, min diagonal {:.12}",
                    a.k, a.n, r.max_offdiag, r.min_diag
                ),
            )
        }
    };
    println!("{}: {detail}", if ok { "ok" } else { "FAILED" });
    manifest.outcome(if ok { "verified" } else { "rejected" });
    Ok(if ok { code::OK } else { code::NEGATIVE })
}

fn reconstruct(
    file: &Path,
    settings: &Settings,
    out: &Path,
    manifest: &mut Manifest,
) -> anyhow::Result<u8> {
    manifest.command("reconstruct", &file_tag(file), json!({ "file": file }));
    manifest.input(file)?;
    let Loaded::Solution(s) = read_artifact(file)? else {
        return Err(Error::Schema("reconstruct expects a solution file".into()).into());
    };
    let point = s.to_point()?;
    let algo = reconstruct_with(&point, settings.reconstruct_tol)?;
    let name = format!("algorithm_k{}_n{}.json", algo.k, algo.n);
    manifest.write(out, &name, &to_json(&algo)?)?;
    manifest.outcome("reconstructed");
    println!("wrote {name}");
    Ok(code::OK)
}

fn simulate(
    file: &Path,
    recursive: Option<usize>,
    settings: &Settings,
    out: &Path,
    manifest: &mut Manifest,
) -> anyhow::Result<u8> {
    let tag = match recursive {
        Some(m) => format!("{}_m{m}", file_tag(file)),
        None => file_tag(file),
    };
    manifest.command("simulate", &tag, json!({ "file": file, "recursive": recursive }));
    manifest.input(file)?;
    let Loaded::Algorithm(algo) = read_artifact(file)? else {
        return Err(Error::Schema("simulate expects an algorithm file".into()).into());
    };
    let stem = format!("k{}_n{}", algo.k, algo.n);
    let Some(m) = recursive else {
        let report = exactness_report(&algo, settings.sim_tol);
        manifest.write(out, &format!("report_{stem}.json"), &to_json(&report)?)?;
        manifest.write(out, &format!("gram_{stem}.csv"), &gram_csv(&report))?;
        println!(
            "exact = {} (max off-diagonal {:.3e}, min diagonal {:.12}, min success {:.12})",
            report.exact, report.max_offdiag, report.min_diag, report.min_success
        );
        manifest.outcome(if report.exact { "exact" } else { "inexact" });
        return Ok(if report.exact { code::OK } else { code::NEGATIVE });
    };
    if m == 0 {
        return Err(Error::InvalidArgument("list size must be positive".into()).into());
    }
    let searcher = RecursiveSearcher::new(&algo, settings.sim_tol)?;
    let list: Vec<usize> = (0..m).map(|i| 2 * i).collect();
    let bound = algo.k * searcher.levels(m);
    let mut correct = 0usize;
    let mut max_queries = 0usize;
    for (index, target) in list.iter().enumerate() {
        let r = searcher.search(&list, target)?;
        correct += usize::from(r.index == index);
        max_queries = max_queries.max(r.queries_used);
    }
    let report = json!({
        "k": algo.k,
        "n": algo.n,
        "list_size": m,
        "targets": m,
        "correct": correct,
        "max_queries": max_queries,
        "query_bound": bound,
    });
    manifest.write(out, &format!("recursive_{stem}_m{m}.json"), &to_json(&report)?)?;
    println!("{correct}/{m} correct, at most {max_queries} queries (bound {bound})");
    let ok = correct == m && max_queries <= bound;
    manifest.outcome(if ok { "exact" } else { "inexact" });
    Ok(if ok { code::OK } else { code::NEGATIVE })
}

fn stats(n: u64, out: &Path, manifest: &mut Manifest) -> anyhow::Result<u8> {
    manifest.command("stats", &format!("n{n}"), json!({ "n": n }));
    if n < 2 {
        return Err(Error::InvalidArgument("stats needs N >= 2".into()).into());
    }
    let s = complexity_stats(n);
    println!("N = {n}");
    println!("classical binary search   ceil(log2 N)        {}", s.classical);
    println!("52-way exact search        3 ceil(log52 N)     {}", s.three_query);
    println!("translation invariant     4 ceil(log605 N)    {}", s.this_work);
    println!("translation invariant     4 log605 N          {:.6}", s.this_work_exact);
    println!("lower bound               (ln N - 1)/pi       {:.6}", s.lower_bound);
    println!("sorting                   4 N log605 N        {:.6e}", s.sorting);
    println!("ratio 4 log605 N / log2 N                     {:.6}", s.ratio);
    manifest.write(out, &format!("stats_n{n}.json"), &to_json(&s)?)?;
    manifest.outcome("ok");
    Ok(code::OK)
}
