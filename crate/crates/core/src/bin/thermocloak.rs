//! Command line driver: time-domain runs, frequency-domain runs, parameter
//! sweeps with rate fits, config validation, and rate tables.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use thermocloak::grid2d::{self, Grid2D};
use thermocloak::harness::{
    field_csv, fit_sweep, response_csv, run_sweep, series_csv, sweep_csv, write_text, Report,
    SweepConfig,
};
use thermocloak::heat::{self, Scheme, TimeGrid};
use thermocloak::helmholtz::{FrequencySolver, RadialFrequencySolver};
use thermocloak::medium::{check_ellipticity, check_ellipticity_radial};
use thermocloak::radial::{load_radial, RadialGrid};
use thermocloak::solver::MgHierarchy;
use thermocloak::special::{integrated_rate, rate_frequency, rate_time};
use thermocloak::Result;

#[derive(Parser)]
#[command(
    name = "thermocloak",
    version,
    about = "Thermal cloaking experiments: transformation media, heat and frequency solves, decay sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// March the cloaked and background heat problems, record exterior error over time
    TimeRun {
        /// Flat key = value config file
        #[arg(long)]
        config: PathBuf,
    },
    /// Per-frequency response at the first configured epsilon
    FreqRun {
        #[arg(long)]
        config: PathBuf,
    },
    /// Visibility sweep over every (epsilon, omega) pair, with decay fits
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Parse the config and check that every medium is admissible
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate theoretical near-invisibility rates for the config
    Rates {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::TimeRun { config } => time_run(&config),
        Command::FreqRun { config } => freq_run(&config),
        Command::Sweep { config } => sweep(&config),
        Command::Validate { config } => validate(&config),
        Command::Rates { config } => rates(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn config_echo(report: &mut Report, cfg: &SweepConfig, command: &str) {
    report.push("command", command);
    report.push("dimension", cfg.dimension as u64);
    report.push("epsilons", cfg.epsilons.clone());
    report.push("omegas", cfg.omegas.clone());
    report.push("nx", cfg.nx as u64);
    report.push("t_final", cfg.t_final);
    report.push("dt", cfg.dt);
    report.push("object_tensor", cfg.object_tensor);
    report.push("object_density", cfg.object_density);
    report.push("source_center", cfg.source_center.clone());
    report.push("source_width", cfg.source_width);
    report.push("r_obs", cfg.r_obs);
}

fn time_run(config: &Path) -> Result<()> {
    let cfg = SweepConfig::from_file(config)?;
    let eps = cfg.epsilons[0];
    let tg = TimeGrid::new(cfg.t_final, cfg.dt)?;
    let stride = (tg.steps() / 200).max(1);
    let source = cfg.source()?;
    let envelope = source.envelope;
    let mut report = Report::new();
    config_echo(&mut report, &cfg, "time-run");
    report.push("epsilon", eps);
    report.push("scheme", "crank-nicolson");

    println!(
        "time-run: dimension {} epsilon {} horizon {} steps {}",
        cfg.dimension,
        eps,
        cfg.t_final,
        tg.steps()
    );
    let vis = match cfg.dimension {
        3 => {
            let grid = RadialGrid::graded(3, eps, 4.0)?;
            let cloak = RadialFrequencySolver::new(grid.clone(), &cfg.cloak_spec(eps)?)?;
            let homog = RadialFrequencySolver::new(grid.clone(), &cfg.homogeneous_spec()?)?;
            let load = load_radial(&grid, |r| source.spatial_radial(r));
            heat::time_visibility_radial(
                &grid,
                cloak.matrices(),
                homog.matrices(),
                &tg,
                Scheme::CrankNicolson,
                stride,
                &load,
                &|t| envelope.eval(t),
                cfg.r_obs,
            )?
        }
        _ => {
            let grid = Grid2D::standard(cfg.nx)?;
            let cloak = MgHierarchy::build(&grid, &cfg.cloak_spec(eps)?)?;
            let homog = MgHierarchy::build(&grid, &cfg.homogeneous_spec()?)?;
            let load = grid2d::load_vector(&grid, |x, y| source.spatial2(x, y));
            let vis = heat::time_visibility(
                &cloak,
                &homog,
                &tg,
                Scheme::CrankNicolson,
                stride,
                &load,
                &|t| envelope.eval(t),
                cfg.r_obs,
            )?;
            // final cloaked field for inspection
            let n = load.len();
            let final_field = heat::march(
                &cloak,
                &tg,
                Scheme::CrankNicolson,
                &vec![0.0; n],
                &load,
                &|t| envelope.eval(t),
                |_, _, _| {},
            )?;
            let full: Vec<Complex64> = grid2d::scatter(&grid, &final_field)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            let field_path = cfg.out_dir.join("field.csv");
            write_text(&field_path, &field_csv(&grid, &full)?)?;
            println!("wrote {}", field_path.display());
            vis
        }
    };
    let series_path = cfg.out_dir.join("series.csv");
    write_text(&series_path, &series_csv(&vis.times, &vis.err_l2, &vis.err_h1)?)?;
    println!("wrote {}", series_path.display());
    report.push("records", vis.times.len() as u64);
    report.push("sup_err_l2", vis.sup_l2);
    report.push("sup_err_h1", vis.sup_h1);
    report.push("rate_time", rate_time(eps, cfg.dimension)?);
    report.push("rate_integrated", integrated_rate(eps, cfg.dimension)?);
    let summary = cfg.out_dir.join("summary.json");
    report.write(&summary)?;
    println!("wrote {}", summary.display());
    Ok(())
}

fn freq_run(config: &Path) -> Result<()> {
    let cfg = SweepConfig::from_file(config)?;
    let eps = cfg.epsilons[0];
    let source = cfg.source()?;
    let mut report = Report::new();
    config_echo(&mut report, &cfg, "freq-run");
    report.push("epsilon", eps);
    println!(
        "freq-run: dimension {} epsilon {} at {} frequencies",
        cfg.dimension,
        eps,
        cfg.omegas.len()
    );
    let mut rows = Vec::new();
    match cfg.dimension {
        3 => {
            let grid = RadialGrid::graded(3, eps, 4.0)?;
            let cloak = RadialFrequencySolver::new(grid.clone(), &cfg.cloak_spec(eps)?)?;
            let homog = RadialFrequencySolver::new(grid, &cfg.homogeneous_spec()?)?;
            for &omega in &cfg.omegas {
                let vis = thermocloak::helmholtz::radial_visibility(
                    &cloak,
                    &homog,
                    omega,
                    &|r| source.spatial_radial(r),
                    cfg.r_obs,
                )?;
                rows.push((omega, vis.err_l2, vis.err_h1));
            }
        }
        _ => {
            let grid = Grid2D::standard(cfg.nx)?;
            let cloak = FrequencySolver::new(&grid, &cfg.cloak_spec(eps)?)?;
            let homog = FrequencySolver::new(&grid, &cfg.homogeneous_spec()?)?;
            for &omega in &cfg.omegas {
                let vis = thermocloak::helmholtz::grid_visibility(
                    &cloak,
                    &homog,
                    omega,
                    &|x, y| source.spatial2(x, y),
                    cfg.r_obs,
                )?;
                rows.push((omega, vis.err_l2, vis.err_h1));
            }
            // complex cloaked field at the first frequency
            let rhs = grid2d::load_vector(&grid, |x, y| {
                Complex64::new(source.spatial2(x, y), 0.0)
            });
            let (u, rep) = cloak.solve(cfg.omegas[0], &rhs)?;
            let full = grid2d::scatter(&grid, &u);
            let field_path = cfg.out_dir.join("field.csv");
            write_text(&field_path, &field_csv(&grid, &full)?)?;
            println!(
                "wrote {} (solve: {} iterations, residual {:.2e})",
                field_path.display(),
                rep.iterations,
                rep.residual
            );
        }
    }
    let resp_path = cfg.out_dir.join("response.csv");
    write_text(&resp_path, &response_csv(&rows))?;
    println!("wrote {}", resp_path.display());
    report.push("records", rows.len() as u64);
    let envelopes: Vec<f64> = cfg
        .omegas
        .iter()
        .map(|&w| rate_frequency(eps, w, cfg.dimension).unwrap_or(f64::NAN))
        .collect();
    report.push("envelopes", envelopes);
    let summary = cfg.out_dir.join("summary.json");
    report.write(&summary)?;
    println!("wrote {}", summary.display());
    Ok(())
}

fn sweep(config: &Path) -> Result<()> {
    let cfg = SweepConfig::from_file(config)?;
    println!(
        "sweep: dimension {} over {} epsilons x {} omegas",
        cfg.dimension,
        cfg.epsilons.len(),
        cfg.omegas.len()
    );
    let outcome = run_sweep(&cfg)?;
    let csv_path = cfg.out_dir.join("sweep.csv");
    write_text(&csv_path, &sweep_csv(&outcome.records))?;
    println!(
        "wrote {} ({} records, {} failures)",
        csv_path.display(),
        outcome.records.len(),
        outcome.failures.len()
    );
    for f in &outcome.failures {
        eprintln!("sweep failure: {f}");
    }
    let mut report = Report::new();
    config_echo(&mut report, &cfg, "sweep");
    report.push("records", outcome.records.len() as u64);
    report.push("failures", outcome.failures.clone());
    let mut fits = Vec::new();
    for &omega in &cfg.omegas {
        match fit_sweep(cfg.dimension, &outcome.records, omega) {
            Ok(fit) => {
                println!(
                    "omega {omega}: slope {:.4} intercept {:.4} residual {:.2e} ({} points)",
                    fit.slope, fit.intercept, fit.residual, fit.n_used
                );
                fits.push(serde_json::json!({
                    "omega": omega,
                    "slope": fit.slope,
                    "intercept": fit.intercept,
                    "residual": fit.residual,
                    "points": fit.n_used,
                }));
            }
            Err(e) => {
                eprintln!("fit at omega {omega} skipped: {e}");
            }
        }
    }
    report.push("fits", fits);
    let summary = cfg.out_dir.join("summary.json");
    report.write(&summary)?;
    println!("wrote {}", summary.display());
    Ok(())
}

/// Widest admissible eigenvalue window for the cloak at this epsilon: the
/// shell ranges from the squeezed radial direction at the inner rim up to
/// the stretched tangential one, and the object contributes its own bound.
fn expected_bounds(cfg: &SweepConfig, eps: f64) -> (f64, f64) {
    let b = 1.0 / (2.0 - eps);
    let shell_lo = match cfg.dimension {
        3 => b * eps * eps,
        _ => b * eps,
    };
    let shell_hi = match cfg.dimension {
        3 => 2.0 - eps,
        _ => (2.0 - eps) / eps,
    };
    let obj = cfg.object_tensor.max(1.0 / cfg.object_tensor);
    let lo = shell_lo.min(1.0 / obj).min(1.0) * 0.99;
    let hi = shell_hi.max(obj).max(1.0) * 1.01;
    (lo, hi)
}

fn validate(config: &Path) -> Result<()> {
    let cfg = SweepConfig::from_file(config)?;
    let mut report = Report::new();
    config_echo(&mut report, &cfg, "validate");
    let mut all_ok = true;
    let mut media = Vec::new();
    for &eps in &cfg.epsilons {
        let spec = cfg.cloak_spec(eps)?;
        let (lo, hi) = expected_bounds(&cfg, eps);
        let rep = match cfg.dimension {
            3 => {
                let grid = RadialGrid::graded(3, eps, 4.0)?;
                let field =
                    thermocloak::medium::RadialField::sample(&spec, &grid.cell_midpoints())?;
                check_ellipticity_radial(&field, lo, hi)
            }
            _ => {
                let grid = Grid2D::standard(cfg.nx)?;
                let field = grid.sample_medium(&spec)?;
                check_ellipticity(&field, lo, hi)
            }
        };
        println!(
            "epsilon {eps}: {}",
            if rep.ok { "admissible" } else { "VIOLATIONS" }
        );
        for v in &rep.violations {
            eprintln!("  {v}");
        }
        all_ok &= rep.ok;
        media.push(serde_json::json!({
            "epsilon": eps,
            "bounds": [lo, hi],
            "report": serde_json::to_value(&rep).expect("serializable report"),
        }));
    }
    report.push("media", media);
    report.push("ok", all_ok);
    let summary = cfg.out_dir.join("summary.json");
    report.write(&summary)?;
    println!("wrote {}", summary.display());
    if all_ok {
        Ok(())
    } else {
        Err(thermocloak::Error::Ellipticity(
            "validation found inadmissible media".into(),
        ))
    }
}

fn rates(config: &Path) -> Result<()> {
    let cfg = SweepConfig::from_file(config)?;
    let mut report = Report::new();
    config_echo(&mut report, &cfg, "rates");
    let mut table = Vec::new();
    println!("epsilon      rate_time    rate_integrated");
    for &eps in &cfg.epsilons {
        let rt = rate_time(eps, cfg.dimension)?;
        let ri = integrated_rate(eps, cfg.dimension)?;
        println!("{eps:<12.6} {rt:<12.6} {ri:<12.6}");
        let per_omega: Vec<serde_json::Value> = cfg
            .omegas
            .iter()
            .map(|&w| {
                serde_json::json!({
                    "omega": w,
                    "rate_frequency": rate_frequency(eps, w, cfg.dimension).unwrap_or(f64::NAN),
                })
            })
            .collect();
        table.push(serde_json::json!({
            "epsilon": eps,
            "rate_time": rt,
            "rate_integrated": ri,
            "frequency": per_omega,
        }));
    }
    report.push("rates", table);
    let summary = cfg.out_dir.join("summary.json");
    report.write(&summary)?;
    println!("wrote {}", summary.display());
    Ok(())
}
