//! Batch front-end: experiment configs in, trajectory files and drift reports out.
//!
//! Exit codes: 0 success, 1 configuration error, 2 integration failure, 3 a drift threshold was
//! exceeded.

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    chaplygin_chain, compare_with_natural_flow, energy_g0, energy_gstar, flat_testbed, jacobi_energy_report,
    natural_energy, noether_phi, normalize_unit_energy, quad_integral, DriftReport,
};
use crate::coords::{
    bm_correspondence_check, conic_residual, gamma_from_u, signed_from_squares, sort_decreasing, u_from_x, x_from_u,
    SpheroConical,
};
use crate::dynamics::Flow;
use crate::geometry::{gamma_to_x, x_to_gamma};
use crate::integrate::{integrate_with, IntegratorOptions};
use crate::reparam::{resample, time_map, Multiplier};
use crate::trajectory::Trajectory;
use crate::types::{BallConfig, SphereState};
use config::{Resolved, RunConfig, SystemKind};
pub use output::Format;
use output::{CheckedReport, Metadata, ReportFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INTEGRATION: i32 = 2;
pub const EXIT_DRIFT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "chaplygin",
    version,
    about = "Rubber Chaplygin ball on a sphere: simulation and integrability checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for random initial states; overrides every seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for running experiments in parallel.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Trajectory file format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the configured system and report its invariants.
    Simulate,
    /// Map a reduced trajectory to the zero-energy natural system and cross-check it.
    Chain,
    /// Flat testbed: Newton flow with the reparametrization force against conformal geodesics.
    FlatDemo,
    /// Run the acceptance property suite and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value = "full")]
        suite: crate::verify::Suite,
    },
    /// Sphero-conical coordinate conversions.
    Coords(CoordsArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct CoordsArgs {
    /// Inertia parameters; any order, sorted internally.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a: Vec<f64>,
    /// Point on the unit sphere in the natural-system variables.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["gamma", "u"])]
    pub x: Option<Vec<f64>>,
    /// Point on the unit sphere in the rolling variables.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "u")]
    pub gamma: Option<Vec<f64>>,
    /// Sphero-conical coordinates, interlaced with the sorted values `1/a_i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<f64>>,
}

/// A failure that ends a run with a nonzero exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Integration(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Integration(_) => EXIT_INTEGRATION,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Integration(m) => write!(f, "integration failure: {m}"),
        }
    }
}

fn integration(e: crate::Error) -> Failure {
    Failure::Integration(e.to_string())
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    pool.install(|| match &cli.command {
        Command::Simulate => with_config(cli, "simulate", cmd_simulate),
        Command::Chain => with_config(cli, "chain", cmd_chain),
        Command::FlatDemo => with_config(cli, "flat-demo", cmd_flat_demo),
        Command::Verify { suite } => cmd_verify(*suite),
        Command::Coords(args) => cmd_coords(args),
    })
}

/// What one experiment produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectories: Vec<(String, Trajectory)>,
    pub reports: Vec<CheckedReport>,
}

/// Settings shared by the config-driven commands.
#[derive(Debug, Clone)]
pub struct Job {
    pub config_path: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub format: Format,
    /// Print one summary line per report to stdout.
    pub verbose: bool,
}

fn with_config(cli: &Cli, command: &str, body: fn(&Resolved) -> Result<RunOutput, Failure>) -> i32 {
    let Some(path) = &cli.config else {
        eprintln!("config error: --config is required for {command}");
        return EXIT_CONFIG;
    };
    let job =
        Job { config_path: path.clone(), out: cli.out.clone(), seed: cli.seed, format: cli.format, verbose: true };
    run_job(&job, command, body)
}

/// Loads the config, runs every experiment in parallel and writes `<name>*.csv|json` plus
/// `<name>.report.json` to the output directory.
pub fn run_job(job: &Job, command: &str, body: fn(&Resolved) -> Result<RunOutput, Failure>) -> i32 {
    let prepared = (|| {
        let bytes = fs::read(&job.config_path).map_err(|e| format!("{}: {e}", job.config_path.display()))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| e.to_string())?;
        let cfg: RunConfig = config::parse(&text)?;
        let runs = cfg.resolve(job.seed)?;
        fs::create_dir_all(&job.out).map_err(|e| format!("{}: {e}", job.out.display()))?;
        Ok::<_, String>((output::sha256_hex(&bytes), runs))
    })();
    let (hash, runs) = match prepared {
        Ok(p) => p,
        Err(m) => {
            eprintln!("{}", Failure::Config(m));
            return EXIT_CONFIG;
        }
    };

    let results: Vec<Result<RunOutput, Failure>> = runs
        .par_iter()
        .map(|run| {
            let out = body(run)?;
            write_outputs(&job.out, run, command, &hash, &out, job.format)?;
            Ok(out)
        })
        .collect();

    let mut code = EXIT_OK;
    for (run, result) in runs.iter().zip(&results) {
        match result {
            Ok(out) => {
                for r in out.reports.iter().filter(|_| job.verbose) {
                    println!(
                        "{}: {:<28} max_abs_dev={:.3e} rel_dev={:.3e} threshold={:.1e} {}",
                        run.name,
                        r.quantity,
                        r.max_abs_dev,
                        r.rel_dev,
                        r.threshold,
                        if r.pass { "PASS" } else { "FAIL" }
                    );
                }
                if out.reports.iter().any(|r| !r.pass) && code == EXIT_OK {
                    code = EXIT_DRIFT;
                }
            }
            Err(f) => {
                eprintln!("{}: {f}", run.name);
                code = match (code, f.code()) {
                    (EXIT_CONFIG, _) | (_, EXIT_CONFIG) => EXIT_CONFIG,
                    _ => EXIT_INTEGRATION,
                };
            }
        }
    }
    code
}

fn write_outputs(
    dir: &Path,
    run: &Resolved,
    command: &str,
    hash: &str,
    out: &RunOutput,
    format: Format,
) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Config(format!("{}: {e}", dir.display()));
    for (suffix, traj) in &out.trajectories {
        output::write_trajectory(dir, &format!("{}{suffix}", run.name), traj, format).map_err(io)?;
    }
    let report = ReportFile {
        metadata: Metadata {
            command: command.to_string(),
            experiment: run.name.clone(),
            system: format!("{:?}", run.system).to_lowercase(),
            epsilon: run.ball.as_ref().map(BallConfig::epsilon),
            config_sha256: hash.to_string(),
            versions: output::versions(),
        },
        reports: out.reports.clone(),
    };
    output::write_report(dir, &run.name, &report).map_err(io)
}

fn options(run: &Resolved) -> Result<IntegratorOptions, Failure> {
    let opts = IntegratorOptions::with_tolerances(run.rel_tol, run.abs_tol);
    for tol in [run.rel_tol, run.abs_tol] {
        if !(1e-13..=1e-3).contains(&tol) {
            return Err(Failure::Config(format!("tolerance {tol} outside [1e-13, 1e-3]")));
        }
    }
    Ok(opts)
}

fn ball(run: &Resolved) -> Result<&BallConfig, Failure> {
    run.ball.as_ref().ok_or_else(|| Failure::Config("this command needs the reduced or natural system".into()))
}

fn constraint_reports(traj: &Trajectory, thresholds: &BTreeMap<String, f64>) -> Vec<CheckedReport> {
    let norms = traj.positions().iter().map(|q| q.norm() - 1.0);
    let tangency = traj.positions().iter().zip(traj.velocities()).map(|(q, v)| q.dot(v));
    vec![
        CheckedReport::check(DriftReport::against("constraint_norm", 0.0, norms), 1e-9, false, thresholds),
        CheckedReport::check(DriftReport::against("constraint_tangency", 0.0, tangency), 1e-9, false, thresholds),
    ]
}

/// Energy, constraint and Noether reports for the reduced system; for natural and flat systems the
/// corresponding conserved quantities.
pub fn cmd_simulate(run: &Resolved) -> Result<RunOutput, Failure> {
    let opts = options(run)?;
    let th = &run.thresholds;
    match run.system {
        SystemKind::Reduced => {
            let cfg = ball(run)?;
            let mut state = SphereState::with_tolerance(run.q0.clone(), run.v0.clone(), 1e-12).map_err(integration)?;
            if run.normalize {
                state = normalize_unit_energy(cfg, &state).map_err(|e| Failure::Config(e.to_string()))?;
            }
            let traj = integrate_with(&Flow::Reduced(cfg.clone()), state.gamma(), state.gamma_dot(), run.t_span, &opts)
                .map_err(integration)?;
            let mut reports = constraint_reports(&traj, th);
            let e0 =
                traj.states().map(|s| energy_g0(cfg, &s)).collect::<crate::Result<Vec<_>>>().map_err(integration)?;
            reports.push(CheckedReport::check(DriftReport::from_values("energy_g0", e0), 1e-8, true, th));

            let mult = Multiplier::chaplygin(cfg);
            let map = time_map(&traj, &mult).map_err(integration)?;
            let star = resample(&traj, &map, &mult, 2 * traj.len()).map_err(integration)?;
            let es =
                star.states().map(|s| energy_gstar(cfg, &s)).collect::<crate::Result<Vec<_>>>().map_err(integration)?;
            reports.push(CheckedReport::check(DriftReport::from_values("energy_gstar", es), 1e-7, true, th));

            for i in 0..cfg.n() {
                for j in i + 1..cfg.n() {
                    if cfg.a()[i] != cfg.a()[j] {
                        continue;
                    }
                    let phi = traj
                        .states()
                        .map(|s| noether_phi(cfg, i, j, &s).map(|p| p.value))
                        .collect::<crate::Result<Vec<_>>>()
                        .map_err(integration)?;
                    let name = format!("phi_{}_{}", i + 1, j + 1);
                    reports.push(CheckedReport::check(DriftReport::from_values(&name, phi), 1e-7, false, th));
                }
            }
            if run.normalize {
                let chain = chaplygin_chain(cfg, &traj).map_err(integration)?;
                reports.extend(chain_checks(chain.reports, th));
            }
            Ok(RunOutput { trajectories: vec![(String::new(), traj)], reports })
        }
        SystemKind::Natural => {
            let cfg = ball(run)?;
            let mut v0 = run.v0.clone();
            if run.normalize {
                let target = (2.0 * cfg.a_inv_norm2(&run.q0).powf(-1.0 / cfg.epsilon())).sqrt();
                let speed = v0.norm();
                if speed == 0.0 {
                    return Err(Failure::Config("initial velocity must be nonzero".into()));
                }
                v0 *= target / speed;
            }
            let traj =
                integrate_with(&Flow::Natural(cfg.clone()), &run.q0, &v0, run.t_span, &opts).map_err(integration)?;
            let mut reports = constraint_reports(&traj, th);
            let energies = traj.states().map(|s| natural_energy(cfg, &s));
            let energy = if run.normalize {
                CheckedReport::check(DriftReport::against("natural_energy", 0.0, energies), 1e-7, false, th)
            } else {
                CheckedReport::check(DriftReport::from_values("natural_energy", energies), 1e-8, true, th)
            };
            reports.push(energy);
            Ok(RunOutput { trajectories: vec![(String::new(), traj)], reports })
        }
        SystemKind::Flat => {
            let fields = run.flat.as_ref().ok_or_else(|| Failure::Config("missing flat fields".into()))?;
            let traj = integrate_with(&Flow::FlatNewton(fields.clone()), &run.q0, &run.v0, run.t_span, &opts)
                .map_err(integration)?;
            let quad = traj
                .positions()
                .iter()
                .zip(traj.velocities())
                .map(|(q, v)| quad_integral(fields, q, v))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(integration)?;
            let mut reports =
                vec![CheckedReport::check(DriftReport::from_values("quad_integral", quad), 1e-7, true, th)];
            if run.energy.is_some() {
                let total = traj
                    .positions()
                    .iter()
                    .zip(traj.velocities())
                    .map(|(q, v)| 0.5 * v.norm_squared() + fields.potential(q));
                reports.push(CheckedReport::check(DriftReport::from_values("flat_energy", total), 1e-8, true, th));
            }
            Ok(RunOutput { trajectories: vec![(String::new(), traj)], reports })
        }
    }
}

fn chain_checks(reports: Vec<DriftReport>, th: &BTreeMap<String, f64>) -> Vec<CheckedReport> {
    reports
        .into_iter()
        .map(|r| {
            let threshold = if r.quantity == "natural_energy" { 1e-7 } else { 1e-5 };
            CheckedReport::check(r, threshold, false, th)
        })
        .collect()
}

/// Reduced trajectory at unit `g0` energy, its image in the natural system and an independent
/// integration of the natural system for comparison.
pub fn cmd_chain(run: &Resolved) -> Result<RunOutput, Failure> {
    if run.system != SystemKind::Reduced {
        return Err(Failure::Config("chain needs system \"reduced\"".into()));
    }
    let opts = options(run)?;
    let cfg = ball(run)?;
    let state = SphereState::with_tolerance(run.q0.clone(), run.v0.clone(), 1e-12).map_err(integration)?;
    let state = normalize_unit_energy(cfg, &state).map_err(|e| Failure::Config(e.to_string()))?;
    let traj = integrate_with(&Flow::Reduced(cfg.clone()), state.gamma(), state.gamma_dot(), run.t_span, &opts)
        .map_err(integration)?;
    let chain = chaplygin_chain(cfg, &traj).map_err(integration)?;
    let deviation = compare_with_natural_flow(cfg, &chain.natural).map_err(integration)?;
    let mut reports = chain_checks(chain.reports, &run.thresholds);
    reports.push(CheckedReport::check(
        DriftReport::against("chain_cross_check", 0.0, [deviation]),
        1e-5,
        false,
        &run.thresholds,
    ));
    Ok(RunOutput { trajectories: vec![(String::new(), traj), (".natural".to_string(), chain.natural)], reports })
}

/// Newton flow against conformal geodesics, plus the Jacobi energy when an energy level is set.
pub fn cmd_flat_demo(run: &Resolved) -> Result<RunOutput, Failure> {
    let fields = run.flat.as_ref().ok_or_else(|| Failure::Config("flat-demo needs system \"flat\"".into()))?;
    let opts = options(run)?;
    let th = &run.thresholds;
    let out = flat_testbed(fields, &run.q0, &run.v0, run.t_span, &opts).map_err(integration)?;
    let mut reports: Vec<CheckedReport> = out
        .reports
        .into_iter()
        .map(|r| match r.quantity.as_str() {
            "geodesic_position_deviation" => CheckedReport::check(r, 1e-6, false, th),
            "quad_integral" => CheckedReport::check(r, 1e-7, true, th),
            _ => CheckedReport::check(r, 1e-7, false, th),
        })
        .collect();
    if let Some(h) = run.energy {
        let (_, jacobi) = jacobi_energy_report(fields, &out.newton, h).map_err(integration)?;
        reports.push(CheckedReport::check(jacobi, 1e-7, false, th));
    }
    Ok(RunOutput {
        trajectories: vec![(".newton".to_string(), out.newton), (".geodesic".to_string(), out.geodesic)],
        reports,
    })
}

/// Runs the acceptance suite and prints one line per criterion.
pub fn cmd_verify(suite: crate::verify::Suite) -> i32 {
    let outcomes = crate::verify::run_suite(suite);
    for o in &outcomes {
        println!("{o}");
    }
    if outcomes.iter().all(|o| o.pass) {
        EXIT_OK
    } else {
        EXIT_DRIFT
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoordsReport {
    /// `a` sorted decreasingly.
    pub a_sorted: Vec<f64>,
    /// `a_sorted[k] = a[permutation[k]]`.
    pub permutation: Vec<usize>,
    /// In the sorted order.
    pub u: Vec<f64>,
    /// In the original order.
    pub x: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Three dimensions only.
    pub bm_residual: Option<f64>,
    pub conic_residuals: Option<Vec<f64>>,
}

/// Converts between `x`, `gamma` and `u`. Signs of `x` and `gamma` follow the input point; from
/// `u` alone all signs are positive.
pub fn coords_report(args: &CoordsArgs) -> crate::Result<CoordsReport> {
    let n = args.a.len();
    let original = BallConfig::new(n, &args.a, 1.0)?;
    let (cfg, perm) = sort_decreasing(&original)?;
    let to_sorted = |v: &[f64]| DVector::from_fn(n, |k, _| v[perm[k]]);
    let from_sorted = |v: &DVector<f64>| {
        let mut out = vec![0.0; n];
        for (k, &i) in perm.iter().enumerate() {
            out[i] = v[k];
        }
        out
    };
    let check = |v: &[f64]| {
        if v.len() == n {
            Ok(())
        } else {
            Err(crate::Error::DimensionMismatch { expected: n, got: v.len() })
        }
    };
    let (x, u) = match (&args.x, &args.gamma, &args.u) {
        (Some(x), _, _) => {
            check(x)?;
            let x = to_sorted(x).normalize();
            let u = u_from_x(&cfg, &x)?;
            (x, u)
        }
        (None, Some(g), _) => {
            check(g)?;
            let x = gamma_to_x(&cfg, &to_sorted(g).normalize());
            let u = u_from_x(&cfg, &x)?;
            (x, u)
        }
        (None, None, Some(u)) => {
            let u = SpheroConical::new(&cfg, u.clone())?;
            let x2 = x_from_u(&cfg, &u)?;
            (signed_from_squares(&x2, &DVector::from_element(n, 1.0)), u)
        }
        (None, None, None) => return Err(crate::Error::Invalid("give one of --x, --gamma or --u".into())),
    };
    let gamma = x_to_gamma(&cfg, &x);
    let (bm_residual, conic_residuals) = if n == 3 {
        let det = cfg.a().product();
        let g = signed_from_squares(&gamma_from_u(&cfg, &u)?, &gamma);
        let conics =
            u.values().iter().map(|uk| conic_residual(&cfg, &g, det * uk)).collect::<crate::Result<Vec<_>>>()?;
        (Some(bm_correspondence_check(&cfg, &u)?), Some(conics))
    } else {
        (None, None)
    };
    Ok(CoordsReport {
        a_sorted: cfg.a().iter().copied().collect(),
        u: u.values().to_vec(),
        x: from_sorted(&x),
        gamma: from_sorted(&gamma),
        permutation: perm,
        bm_residual,
        conic_residuals,
    })
}

pub fn cmd_coords(args: &CoordsArgs) -> i32 {
    match coords_report(args) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("config error: {e}");
            EXIT_CONFIG
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(a: &[f64], x: Option<&[f64]>, gamma: Option<&[f64]>, u: Option<&[f64]>) -> CoordsArgs {
        CoordsArgs {
            a: a.to_vec(),
            x: x.map(<[f64]>::to_vec),
            gamma: gamma.map(<[f64]>::to_vec),
            u: u.map(<[f64]>::to_vec),
        }
    }

    #[test]
    fn coords_report_restores_original_order() {
        let r = coords_report(&coords(&[1.0, 3.0, 2.0], Some(&[0.3, -0.5, 0.8]), None, None)).unwrap();
        assert_eq!(r.a_sorted, vec![3.0, 2.0, 1.0]);
        assert_eq!(r.permutation, vec![1, 2, 0]);
        let x = DVector::from_column_slice(&[0.3, -0.5, 0.8]).normalize();
        for i in 0..3 {
            assert!((r.x[i] - x[i]).abs() < 1e-15);
        }
        assert!(r.u[0] > 1.0 / 3.0 && r.u[0] < 0.5 && r.u[1] > 0.5 && r.u[1] < 1.0);
        assert!(r.bm_residual.unwrap() < 1e-12);
        assert!(r.conic_residuals.unwrap().iter().all(|c| c.abs() < 1e-11));

        let g = coords_report(&coords(&[1.0, 3.0, 2.0], None, Some(&r.gamma), None)).unwrap();
        assert!(g.u.iter().zip(&r.u).all(|(a, b)| (a - b).abs() < 1e-12));
        let from_u = coords_report(&coords(&[1.0, 3.0, 2.0], None, None, Some(&r.u))).unwrap();
        assert!(from_u.x.iter().zip(&r.x).all(|(a, b)| (a - b.abs()).abs() < 1e-12));
    }

    #[test]
    fn coords_report_errors() {
        assert!(coords_report(&coords(&[3.0, 2.0, 1.0], None, None, None)).is_err());
        assert!(coords_report(&coords(&[3.0, 2.0, 1.0], Some(&[1.0, 1.0]), None, None)).is_err());
        assert!(coords_report(&coords(&[3.0, 2.0, 2.0], Some(&[1.0, 1.0, 1.0]), None, None)).is_err());
        let four = coords_report(&coords(&[4.0, 3.0, 2.0, 1.0], Some(&[1.0, 1.0, 1.0, 1.0]), None, None)).unwrap();
        assert_eq!(four.u.len(), 3);
        assert!(four.bm_residual.is_none());
    }

    #[test]
    fn failure_codes() {
        assert_eq!(Failure::Config("x".into()).code(), EXIT_CONFIG);
        assert_eq!(Failure::Integration("x".into()).code(), EXIT_INTEGRATION);
        assert!(Failure::Config("bad".into()).to_string().starts_with("config error"));
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "chaplygin",
            "simulate",
            "--config",
            "c.json",
            "--out",
            "o",
            "--seed",
            "9",
            "--threads",
            "2",
            "--format",
            "json",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Simulate));
        assert_eq!((cli.seed, cli.threads, cli.format), (Some(9), Some(2), Format::Json));
        let cli = Cli::try_parse_from(["chaplygin", "coords", "--a", "3,2,1", "--x", "-1,0.5,2"]).unwrap();
        let Command::Coords(args) = cli.command else { panic!("coords") };
        assert_eq!(args.x.unwrap(), vec![-1.0, 0.5, 2.0]);
        assert!(Cli::try_parse_from(["chaplygin", "coords", "--a", "3,2,1", "--x", "1,1,1", "--u", "1,2"]).is_err());
    }
}
