use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dcfac::bench::{run_bench, write_csv};
use dcfac::formats::{
    load_instance, parse_manifest, product_maxcut_from_files, write_canonical, CanonicalInstance,
    Format, Kind, Provenance,
};
use dcfac::report::{BetaArg, ReportDoc, ReportOptions};
use dcfac::verify;
use dcfac::StdClock;
use dcfac_core::generators::gen_product_random;
use dcfac_core::{solve, PenaltyConfig};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_LIMIT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "dcfac",
    version,
    about = "Penalized low-rank factorization solver for binary quadratic programs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance and write a JSON report.
    Solve(SolveArgs),
    /// Solve every instance in a manifest and write a CSV table.
    Bench(BenchArgs),
    /// Run a self-check suite.
    Verify(VerifyArgs),
    /// Generate a product instance in canonical format.
    Gen(GenArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Initial penalty parameter.
    #[arg(long)]
    rho0: Option<f64>,
    /// Penalty growth factor (> 1).
    #[arg(long)]
    sigma: Option<f64>,
    /// Rank-one gap tolerance.
    #[arg(long)]
    eps: Option<f64>,
    /// Penalty cap.
    #[arg(long = "rho-max")]
    rho_max: Option<f64>,
    /// Maximum number of outer iterations.
    #[arg(long)]
    lmax: Option<usize>,
    /// Rows of the factor matrix.
    #[arg(long)]
    m: Option<usize>,
    /// Seed of the initial point.
    #[arg(long, env = "DCFAC_SEED")]
    seed: Option<u64>,
    /// Extrapolation rule of the inner method.
    #[arg(long, value_enum)]
    beta: Option<BetaArg>,
    /// Wall-clock limit in seconds.
    #[arg(long = "time-limit")]
    time_limit: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> anyhow::Result<PenaltyConfig> {
        let d = PenaltyConfig::default();
        let cfg = PenaltyConfig {
            rho0: self.rho0.unwrap_or(d.rho0),
            sigma: self.sigma.unwrap_or(d.sigma),
            eps: self.eps.unwrap_or(d.eps),
            rho_max: self.rho_max.unwrap_or(d.rho_max),
            l_max: self.lmax.unwrap_or(d.l_max),
            m: self.m.or(d.m),
            seed: self.seed.unwrap_or(d.seed),
            beta_mode: self.beta.map_or(d.beta_mode, Into::into),
            time_limit: self.time_limit.or(d.time_limit),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Problem class; must agree with the file.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// OR-Library problem index (1-based).
    #[arg(long, default_value_t = 1)]
    index: usize,
    /// Best known objective value.
    #[arg(long)]
    bval: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the extracted real vector.
    #[arg(long = "emit-x")]
    emit_x: bool,
    /// Include every inner-iteration trace.
    #[arg(long = "emit-trace")]
    emit_trace: bool,
    /// Print a human-readable summary on standard output instead of JSON.
    #[arg(long)]
    pretty: bool,
    /// Omit wall-clock time so reports are reproducible byte for byte.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Lines of `path, format, kind[, bval]`.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the time column empty.
    #[arg(long = "no-timing")]
    no_timing: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    TinyExact,
    Invariants,
    Gradcheck,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Number of random cases (suite default when absent).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    ProductRandom,
    ProductMaxcut,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Number of binary variables per factor (product-random).
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list of the first graph (product-maxcut).
    #[arg(long)]
    w1: Option<PathBuf>,
    /// Edge list of the second graph (product-maxcut).
    #[arg(long)]
    w2: Option<PathBuf>,
    /// Destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_solve(a: &SolveArgs) -> anyhow::Result<u8> {
    let cfg = PenaltyConfig {
        record_inner_traces: a.emit_trace,
        ..a.solver.config()?
    };
    let mut inst = load_instance(&a.instance, a.format, a.kind, a.index)?;
    if a.bval.is_some() {
        inst = inst.with_known_best(a.bval);
    }
    let rep = solve(&inst, &cfg, &StdClock::start())?;
    let doc = ReportDoc::new(
        &inst,
        &cfg,
        &rep,
        ReportOptions {
            emit_x: a.emit_x,
            emit_trace: a.emit_trace,
            timing: !a.no_timing,
        },
    );
    if a.pretty {
        if let Some(p) = &a.out {
            emit(Some(p), &doc.to_json())?;
        }
        emit(None, &doc.to_pretty())?;
    } else {
        emit(a.out.as_deref(), &doc.to_json())?;
    }
    Ok(if rep.exited_normally {
        EXIT_OK
    } else {
        EXIT_LIMIT
    })
}

fn cmd_bench(a: &BenchArgs) -> anyhow::Result<u8> {
    let cfg = a.solver.config()?;
    let text = fs::read_to_string(&a.manifest)
        .with_context(|| format!("reading {}", a.manifest.display()))?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base).with_context(|| a.manifest.display().to_string())?;
    let rows = run_bench(&entries, &cfg, a.jobs, !a.no_timing)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    emit(a.out.as_deref(), std::str::from_utf8(&buf)?)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> anyhow::Result<u8> {
    let pass = match a.suite {
        Suite::TinyExact => {
            let trials = a.trials.unwrap_or(30);
            let cfg = PenaltyConfig::default();
            let cases = verify::tiny_exact(trials, a.seed, &cfg)?;
            for (i, c) in cases.iter().enumerate() {
                println!(
                    "case {i:>3}  n={:<3} obj={:<14} opt={:<14} exact={} feasible={} time={:.4}s",
                    c.n, c.obj, c.opt, c.exact, c.feasible, c.time_s
                );
            }
            let exact = cases.iter().filter(|c| c.exact).count();
            let feasible = cases.iter().all(|c| c.feasible);
            let fast = cases.iter().all(|c| c.time_s < 1.0);
            let infeas_ok = cases
                .iter()
                .filter(|c| c.exited_normally)
                .all(|c| c.infeas_two <= cfg.eps);
            let needed = (trials * 9).div_ceil(10);
            println!("exact {exact}/{trials} (need {needed}), all feasible {feasible}, all < 1 s {fast}, infeasibility within eps {infeas_ok}");
            exact >= needed && feasible && fast && infeas_ok
        }
        Suite::Invariants => {
            let trials = a.trials.unwrap_or(20);
            let d = verify::descent_suite(trials, a.seed)?;
            for (i, v) in &d.violations {
                println!(
                    "instance {i}: {:?} increased by {:.3e} at step {}",
                    v.quantity, v.increase, v.index
                );
            }
            println!(
                "descent: {} instances, {} inner runs, {} points, {} violations",
                d.instances,
                d.inner_runs,
                d.trace_points,
                d.violations.len()
            );
            let g = verify::gamma_suite(100, a.seed)?;
            println!(
                "gamma: {} checks, {} failures, worst inner product {:.3e}, Fenchel-Young {:.3e}, rank ratio {:.3e}",
                g.checks, g.failures, g.worst_inner_product, g.worst_fenchel_young, g.worst_rank_ratio
            );
            d.violations.is_empty() && g.failures == 0
        }
        Suite::Gradcheck => {
            let s = verify::gradcheck(a.trials.unwrap_or(20), a.seed)?;
            println!(
                "gradcheck: {} points, max relative error linear {:.3e}, product {:.3e}",
                s.points, s.linear_max, s.product_max
            );
            s.linear_max <= 1e-5 && s.product_max <= 1e-5
        }
    };
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_ERROR })
}

fn cmd_gen(a: &GenArgs) -> anyhow::Result<u8> {
    let doc = match a.family {
        Family::ProductRandom => {
            let Some(l) = a.l else {
                bail!("--l is required for product-random")
            };
            let inst = gen_product_random(l, a.seed)?
                .with_name(format!("product-random-l{l}-s{}", a.seed));
            CanonicalInstance::from_instance(&inst, Some(Provenance::product_random(l, a.seed)))
        }
        Family::ProductMaxcut => {
            let (Some(w1), Some(w2)) = (&a.w1, &a.w2) else {
                bail!("--w1 and --w2 are required for product-maxcut")
            };
            product_maxcut_from_files(w1, w2)?
        }
    };
    emit(a.out.as_deref(), &write_canonical(&doc))?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    let result = match &cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
