//! `lyz` — reproducible experiments for the dHYM continuity laboratory.
//!
//! Commands: `gen`, `solve`, `path`, `suite3d`, `suite4d`, `conecheck`,
//! `weaklab`, `report`. Every command is a pure function of its config and
//! seed; exit codes are 1 (precondition), 2 (solver failure), 3 (I/O).

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use lyz_core::continuation::{self, PathOptions};
use lyz_core::error::Error;
use lyz_core::labs::{cone_lab, weak_lab, ConeLabConfig, WeakLabConfig};
use lyz_core::phase;
use lyz_core::report::{self, PathReport, RunConfig, SolveReport};
use lyz_core::solver::{self, PhaseTarget};
use lyz_core::suites::{run_suite_3d, run_suite_4d, SuiteConfig};

#[derive(Parser)]
#[command(name = "lyz", version, about = "dHYM continuity-method laboratory on flat tori")]
struct Cli {
    /// Worker threads (0 = rayon default). Results are identical for any
    /// setting.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutDir {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write the χ field file and a config echo.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// One Newton solve at the schedule's t0; writes the potential and a
    /// JSON sidecar.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Full continuity path from a generated χ file: trace CSV, final
    /// potential, JSON summary.
    Path {
        #[arg(long)]
        config: PathBuf,
        /// χ field file (defaults to <out>/chi.lyzf as written by gen).
        #[arg(long)]
        chi: Option<PathBuf>,
        #[command(flatten)]
        out: OutDir,
    },
    /// 3D suite: σ₂ = 1 experiment.
    Suite3d(SuiteArgs),
    /// 4D suite: σ₃ = σ₁ experiment.
    Suite4d(SuiteArgs),
    /// Cone-algebra property sweep.
    Conecheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Accepted samples per (n, τ) configuration.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// Weak-solutions lab over quadratic samples.
    Weaklab {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Restrict to one complex dimension (default: 2, 3, 4).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// Summarize a JSON report or trace CSV on stdout.
    Report {
        /// Input file: *.json or *.csv.
        input: PathBuf,
    },
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Grid points per real axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Smallest continuation parameter.
    #[arg(long)]
    tmin: Option<f64>,
    /// Perturbation scale of the seeded example.
    #[arg(long, default_value_t = 0.05)]
    perturbation: f64,
    #[command(flatten)]
    out: OutDir,
}

impl SuiteArgs {
    fn config(&self, mut base: SuiteConfig) -> SuiteConfig {
        base.seed = self.seed;
        base.perturbation_scale = self.perturbation;
        if let Some(g) = self.grid {
            base.points_per_axis = g;
        }
        if let Some(t) = self.tmin {
            base.schedule.t_min = t;
        }
        base
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_gen(config_path: &Path, out: &Path) -> Result<(), Error> {
    let config: RunConfig = report::read_json(config_path)?;
    ensure_dir(out)?;
    let chi = config.build_chi()?;
    report::write_hermitian_field(&out.join("chi.lyzf"), &chi)?;
    report::write_json(&out.join("config.json"), &config)?;
    println!("gen: wrote {} and config echo", out.join("chi.lyzf").display());
    Ok(())
}

fn cmd_solve(config_path: &Path, out: &Path) -> Result<(), Error> {
    let config: RunConfig = report::read_json(config_path)?;
    ensure_dir(out)?;
    let chi = config.build_chi()?;
    let grid = chi.grid;
    let t = config.schedule.t0;
    let state = solver::newton_solve(
        &chi,
        t,
        &lyz_core::field::ScalarField::zeros(grid),
        &PhaseTarget::Constant,
        &config.solver.options(),
    )?;
    let mon = solver::monitors(&state);
    report::write_scalar_field(&out.join("u.lyzf"), &state.u)?;
    report::write_json(&out.join("solve.json"), &SolveReport::new(&state, &mon))?;
    println!(
        "solve: t = {t}, converged in {} iterations, res_sup = {:.3e}",
        state.iterations,
        state.residual.sup_abs()
    );
    Ok(())
}

fn cmd_path(config_path: &Path, chi_path: Option<&Path>, out: &Path) -> Result<(), Error> {
    let config: RunConfig = report::read_json(config_path)?;
    ensure_dir(out)?;
    let default_chi = out.join("chi.lyzf");
    let chi = report::read_hermitian_field(chi_path.unwrap_or(&default_chi))?;
    let opts = PathOptions {
        solver: config.solver.options(),
        keep_states: false,
    };
    let trace = continuation::run_path(&chi, &config.schedule, &opts)?;
    report::write_trace_csv(&out.join("trace.csv"), &trace)?;
    let state = trace
        .final_state
        .as_ref()
        .ok_or_else(|| Error::domain("path produced no converged state"))?;
    report::write_scalar_field(&out.join("u_final.lyzf"), &state.u)?;
    let bracket = phase::bracket_check(&chi, &config.schedule.parameters())?;
    let (hmw_max_ratio, hmw_pass) = continuation::hmw_trace_check(&trace, None)?;
    let (theta_res, sigma_res) = continuation::critical_residual(&chi, state)?;
    let d1 = solver::differentiate1_check(state)?;
    let rows = &trace.rows;
    let summary = PathReport {
        t: rows.iter().map(|r| r.t).collect(),
        hat_theta: rows.iter().map(|r| r.hat_theta).collect(),
        target_theta: rows.iter().map(|r| r.target_theta).collect(),
        c_solved: rows.iter().map(|r| r.c_solved).collect(),
        newton_iters: rows.iter().map(|r| r.newton_iters).collect(),
        converged: rows.iter().map(|r| r.converged).collect(),
        rows_converged: rows.iter().filter(|r| r.converged).count(),
        rows_total: rows.len(),
        bracket_c: bracket.c_fit,
        bracket_pass: bracket.pass,
        c_gap_max: rows
            .iter()
            .filter(|r| r.converged)
            .map(|r| (r.c_solved - r.target_theta).abs())
            .fold(0.0, f64::max),
        hmw_max_ratio,
        hmw_pass,
        critical_theta_residual: theta_res,
        critical_sigma_residual: sigma_res,
        differentiate1_normalized: d1.normalized(),
    };
    report::write_json(&out.join("path.json"), &summary)?;
    println!(
        "path: {} rows ({} converged), critical residuals {:.3e} / {:.3e}",
        summary.rows_total, summary.rows_converged, theta_res, sigma_res
    );
    Ok(())
}

fn print_named(checks: &[lyz_core::suites::NamedCheck]) {
    for c in checks {
        println!(
            "  [{}] {:<42} value = {:+.6e}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.value
        );
    }
}

fn cmd_report(input: &Path) -> Result<(), Error> {
    let text = std::fs::read_to_string(input)?;
    match input.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            let rows = report::parse_trace_csv(&text)?;
            println!("{:>12} {:>14} {:>14} {:>6} {:>12} {:>12}", "t", "hat_theta", "c_solved", "iters", "res_sup", "hmw_ratio");
            for r in rows {
                println!(
                    "{:>12.6e} {:>14.9} {:>14.9} {:>6} {:>12.3e} {:>12.3e}",
                    r.t, r.hat_theta, r.c_solved, r.newton_iters, r.res_sup, r.hmw_ratio
                );
            }
        }
        Some("json") => {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Format(format!("json decode: {e}")))?;
            if let Some(dim) = value.get("dimension") {
                // suite report
                let suite: lyz_core::suites::SuiteReport = serde_json::from_str(&text)
                    .map_err(|e| Error::Format(format!("suite decode: {e}")))?;
                println!(
                    "{}D suite (seed {}, N = {}): {}",
                    dim,
                    suite.seed,
                    suite.points_per_axis,
                    if suite.pass { "PASS" } else { "FAIL" }
                );
                println!("preconditions:");
                print_named(&suite.preconditions);
                println!(
                    "path: {}/{} rows converged, bracket C = {:?}, c gap {:.3e}, hmw max {:.3e}",
                    suite.rows_converged,
                    suite.rows_total,
                    suite.bracket_c,
                    suite.c_gap_max,
                    suite.hmw_max_ratio
                );
                println!(
                    "critical residuals: theta {:.3e}, sigma {:.3e} (tol {:.1e})",
                    suite.critical_theta_residual,
                    suite.critical_sigma_residual,
                    suite.sigma_tolerance
                );
                println!("necessity margins:");
                print_named(&suite.necessity);
            } else {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
        }
        _ => {
            return Err(Error::Format(
                "report expects a .json or .csv input".to_string(),
            ))
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen { config, out } => cmd_gen(&config, &out.out),
        Command::Solve { config, out } => cmd_solve(&config, &out.out),
        Command::Path { config, chi, out } => cmd_path(&config, chi.as_deref(), &out.out),
        Command::Suite3d(args) => {
            ensure_dir(&args.out.out)?;
            let config = args.config(SuiteConfig::default_3d());
            let report_data = run_suite_3d(&config)?;
            report::write_json(&args.out.out.join("suite3d.json"), &report_data)?;
            println!(
                "suite3d: {} (sigma residual {:.3e})",
                if report_data.pass { "PASS" } else { "FAIL" },
                report_data.critical_sigma_residual
            );
            Ok(())
        }
        Command::Suite4d(args) => {
            ensure_dir(&args.out.out)?;
            let config = args.config(SuiteConfig::default_4d());
            let report_data = run_suite_4d(&config)?;
            report::write_json(&args.out.out.join("suite4d.json"), &report_data)?;
            println!(
                "suite4d: {} (sigma residual {:.3e})",
                if report_data.pass { "PASS" } else { "FAIL" },
                report_data.critical_sigma_residual
            );
            Ok(())
        }
        Command::Conecheck { seed, samples, out } => {
            ensure_dir(&out.out)?;
            let config = ConeLabConfig {
                seed,
                samples_per_config: samples,
                ..ConeLabConfig::default()
            };
            let report_data = cone_lab(&config)?;
            report::write_json(&out.out.join("conecheck.json"), &report_data)?;
            println!(
                "conecheck: {} over {} configs",
                if report_data.pass { "PASS" } else { "FAIL" },
                report_data.configs.len()
            );
            Ok(())
        }
        Command::Weaklab {
            seed,
            n,
            samples,
            out,
        } => {
            ensure_dir(&out.out)?;
            let mut config = WeakLabConfig {
                seed,
                samples,
                ..WeakLabConfig::default()
            };
            if let Some(n) = n {
                config.dims = vec![n];
            }
            let report_data = weak_lab(&config)?;
            report::write_json(&out.out.join("weaklab.json"), &report_data)?;
            println!(
                "weaklab: {} over dims {:?}",
                if report_data.pass { "PASS" } else { "FAIL" },
                report_data.dims.iter().map(|d| d.n).collect::<Vec<_>>()
            );
            Ok(())
        }
        Command::Report { input } => cmd_report(&input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("lyz: could not configure {} threads: {e}", cli.threads);
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lyz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
