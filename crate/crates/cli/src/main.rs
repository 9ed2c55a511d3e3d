//! Command-line driver: one experiment per invocation, results persisted
//! as JSON lines with CSV mirrors and SVG charts.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error.

mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use sausage_core::asymptotics::{capacity_ball, green_bm, scaled_limit_ratio};
use sausage_core::diffusion::{
    hitting_time_with, sample_bm_path, sample_gasket_walk, sample_radial_path, HittingMode,
    RngSpec,
};
use sausage_core::experiments::{
    convergence_excess, fit_points, fluctuation_experiment, from_jsonl, green_comparison,
    lil_trace, run_ensemble, verify_sandwich, EnsembleSpec, ExcessConfig, FitModel, FitRecord,
    FluctuationConfig, GreenComparisonConfig, LilConfig, ResultRecord, SandwichConfig,
};
use sausage_core::space::{
    gasket_exponents, GasketGraph, RadialMetricProfile, ScalingFunction, SpaceDescriptor,
};

use config::{config_digest, parse_list, ConfigFile, Section};
use output::OutDir;
use svg::{Chart, Series, PALETTE};

#[derive(Parser)]
#[command(
    name = "sausage",
    about = "Monte Carlo laboratory for Wiener-sausage volumes of diffusions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// TOML configuration file with one [section] per experiment; flags
    /// given here override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for JSONL/CSV/SVG artifacts (default `results`)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: SAUSAGE_WORKERS env var, then all cores)
    #[arg(long)]
    workers: Option<usize>,

    /// Master seed for the counter-based RNG streams
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
struct SpaceArgs {
    /// Space kind: euclid, radial, or gasket
    #[arg(long)]
    space: Option<String>,

    /// Ambient dimension (1..=6 for euclid, 2..=6 for radial)
    #[arg(long)]
    dim: Option<usize>,

    /// Radial-profile breakpoints, comma separated, ascending (radii where
    /// the metric factor toggles between 1 and 4)
    #[arg(long)]
    breakpoints: Option<String>,

    /// Start the radial profile on the factor-4 plateau instead of 1
    #[arg(long)]
    starts_high: bool,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    /// Sausage radius epsilon (length units)
    #[arg(long)]
    eps: Option<f64>,

    /// Readout horizons, comma separated, ascending (time units; steps on
    /// the gasket)
    #[arg(long)]
    times: Option<String>,

    /// Number of independent paths
    #[arg(long)]
    paths: Option<u64>,

    /// Time step (time units; default 1e-3 * eps^2)
    #[arg(long)]
    dt: Option<f64>,

    /// Occupancy cell size (length units; default eps/8, at most eps/4)
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic constants table (capacity, Green value, dilation
    /// ratio) as CSV
    Constants {
        #[command(flatten)]
        common: CommonArgs,
        /// Dimension (at least 3)
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Radii to tabulate, comma separated
        #[arg(long, default_value = "1")]
        eps: String,
    },
    /// Run a sausage-volume ensemble on one space and persist the horizon
    /// profile
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Dump the first sampled path as CSV rows (t, x1..xd) for
        /// debugging
        #[arg(long)]
        dump_paths: bool,
        /// Report the first hitting time of the probe ball strictly after
        /// time zero even when the start lies inside
        #[arg(long)]
        strict_hitting: bool,
        /// Probe ball center for hitting statistics, comma separated
        #[arg(long)]
        probe_center: Option<String>,
        /// Probe ball radius for hitting statistics (defaults to eps)
        #[arg(long)]
        probe_eps: Option<f64>,
    },
    /// Fit an extrapolation model through persisted ensemble records
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// Input JSONL file of result records
        #[arg(long)]
        input: PathBuf,
        /// Model: inverse-sqrt, inverse-log, or power-law
        #[arg(long)]
        model: String,
        /// Restrict to records of this experiment id
        #[arg(long)]
        experiment: Option<String>,
    },
    /// Monte Carlo check of the two hitting-time occupation inequalities
    VerifySandwich {
        #[command(flatten)]
        common: CommonArgs,
        /// Dimension
        #[arg(long)]
        dim: Option<usize>,
        /// Target ball radius epsilon
        #[arg(long)]
        eps: Option<f64>,
        /// Inner-ball fraction a in (0,1)
        #[arg(long)]
        a: Option<f64>,
        /// Start distance |x - y| (must exceed eps)
        #[arg(long)]
        separation: Option<f64>,
        /// Hitting horizon t
        #[arg(long)]
        t: Option<f64>,
        /// Extra horizon T of the upper inequality
        #[arg(long)]
        big_t: Option<f64>,
        /// Paths from the start point
        #[arg(long)]
        paths: Option<u64>,
        /// Time step
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Per-time constants of the factor-1 and factor-4 spaces plus the
    /// shell-profile crossover
    Fluctuation {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Single long path scaled by the iterated-logarithm normalizers
    Lil {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        space: SpaceArgs,
        /// Horizon (steps on the gasket, time units otherwise)
        #[arg(long)]
        horizon: Option<f64>,
        /// Volume exponent of the normalizers (default: gasket log3/log2)
        #[arg(long)]
        alpha: Option<f64>,
        /// Time-scale exponent of the normalizers (default: gasket
        /// log5/log2)
        #[arg(long)]
        beta: Option<f64>,
        /// Sausage radius for continuum spaces
        #[arg(long)]
        eps: Option<f64>,
        /// Time step for continuum spaces
        #[arg(long)]
        dt: Option<f64>,
        /// Occupancy cell size for continuum spaces
        #[arg(long)]
        h: Option<f64>,
    },
    /// Occupation-density Green function of a bounded modification against
    /// the free-space closed form
    GreenCompare {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        space: SpaceArgs,
        /// Start radii |y| to sweep, comma separated, ascending
        #[arg(long)]
        sweep: Option<String>,
        /// Inner probe annulus radius
        #[arg(long)]
        eps1: Option<f64>,
        /// Outer probe annulus radius
        #[arg(long)]
        eps2: Option<f64>,
        /// Paths per sweep point
        #[arg(long)]
        paths: Option<u64>,
        /// Occupation horizon per path (time units)
        #[arg(long)]
        horizon: Option<f64>,
        /// Time step
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Excess of the mean sausage volume over linear capacity growth
    /// (dimension at least 6; slow)
    Excess {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Render persisted result records as an SVG line chart
    Plot {
        #[command(flatten)]
        common: CommonArgs,
        /// Input JSONL file of result records
        #[arg(long)]
        input: PathBuf,
        /// Output SVG file
        #[arg(long)]
        output: PathBuf,
        /// Vertical axis: raw, per-time, or log-log
        #[arg(long, default_value = "per-time")]
        mode: String,
    },
}

enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn config_err(e: anyhow::Error) -> CliError {
    CliError::Config(e)
}

fn runtime_err(e: anyhow::Error) -> CliError {
    CliError::Runtime(e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("runtime error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn init_workers(section: &Section) {
    let workers = section
        .workers
        .or_else(|| {
            std::env::var("SAUSAGE_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if workers > 0 {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
}

fn load_merged(common: &CommonArgs, flags: Section, experiment: &str) -> Result<Section> {
    let base = match &common.config {
        Some(path) => ConfigFile::load(path)?.section(experiment),
        None => Section::default(),
    };
    let mut merged = flags.over(base);
    if let Some(s) = common.seed {
        merged.seed = Some(s);
    }
    if let Some(o) = &common.out {
        merged.out = Some(o.clone());
    }
    if let Some(w) = common.workers {
        merged.workers = Some(w);
    }
    merged.validate_positive()?;
    Ok(merged)
}

fn space_flags_to_section(space: &SpaceArgs, grid: Option<&GridArgs>) -> Result<Section> {
    let mut s = Section {
        space: space.space.clone(),
        dim: space.dim,
        starts_high: if space.starts_high { Some(true) } else { None },
        ..Default::default()
    };
    if let Some(b) = &space.breakpoints {
        s.breakpoints = Some(parse_list(b).context("bad --breakpoints")?);
    }
    if let Some(g) = grid {
        s.eps = g.eps;
        s.paths = g.paths;
        s.dt = g.dt;
        s.h = g.h;
        if let Some(t) = &g.times {
            s.times = Some(parse_list(t).context("bad --times")?);
        }
    }
    Ok(s)
}

fn build_space(section: &Section) -> Result<SpaceDescriptor> {
    let kind = section.space.as_deref().unwrap_or("euclid");
    let dim = section.dim.unwrap_or(3);
    let descriptor = match kind {
        "euclid" | "euclidean" => SpaceDescriptor::euclidean(dim),
        "radial" => SpaceDescriptor::radial(dim, build_profile(section)?),
        "gasket" => SpaceDescriptor::gasket(),
        other => bail!("unknown space `{other}` (expected euclid, radial, or gasket)"),
    };
    descriptor
        .validate()
        .map_err(|e| anyhow!("invalid space: {e}"))?;
    Ok(descriptor)
}

fn build_profile(section: &Section) -> Result<RadialMetricProfile> {
    let breakpoints = section.breakpoints.clone().unwrap_or_default();
    let starts_high = section.starts_high.unwrap_or(false);
    RadialMetricProfile::new(breakpoints, starts_high).map_err(|e| anyhow!("bad breakpoints: {e}"))
}

fn out_dir(section: &Section) -> Result<OutDir> {
    let root = section
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"));
    OutDir::create(&root)
}

fn dispatch(command: Command) -> std::result::Result<(), CliError> {
    match command {
        Command::Constants { common, dim, eps } => {
            let section =
                load_merged(&common, Section::default(), "constants").map_err(config_err)?;
            let radii = parse_list(&eps).map_err(config_err)?;
            if dim < 3 {
                return Err(config_err(anyhow!(
                    "constants need dim >= 3 (the Green function diverges below)"
                )));
            }
            run_constants(&section, dim, &radii).map_err(runtime_err)
        }
        Command::Simulate {
            common,
            space,
            grid,
            dump_paths,
            strict_hitting,
            probe_center,
            probe_eps,
        } => {
            let mut flags = space_flags_to_section(&space, Some(&grid)).map_err(config_err)?;
            flags.dump_paths = if dump_paths { Some(true) } else { None };
            flags.strict_hitting = if strict_hitting { Some(true) } else { None };
            if let Some(pc) = &probe_center {
                flags.probe_center = Some(parse_list(pc).map_err(config_err)?);
            }
            flags.probe_eps = probe_eps;
            let section = load_merged(&common, flags, "simulate").map_err(config_err)?;
            init_workers(&section);
            run_simulate(&section).map_err(runtime_err)
        }
        Command::Fit {
            common,
            input,
            model,
            experiment,
        } => {
            let section = load_merged(&common, Section::default(), "fit").map_err(config_err)?;
            let model = parse_model(&model).map_err(config_err)?;
            run_fit(&section, &input, model, experiment.as_deref()).map_err(runtime_err)
        }
        Command::VerifySandwich {
            common,
            dim,
            eps,
            a,
            separation,
            t,
            big_t,
            paths,
            dt,
        } => {
            let flags = Section {
                dim,
                eps,
                a,
                separation,
                t,
                big_t,
                paths,
                dt,
                ..Default::default()
            };
            let section = load_merged(&common, flags, "verify-sandwich").map_err(config_err)?;
            init_workers(&section);
            run_sandwich(&section).map_err(runtime_err)
        }
        Command::Fluctuation {
            common,
            space,
            grid,
        } => {
            let flags = space_flags_to_section(&space, Some(&grid)).map_err(config_err)?;
            let section = load_merged(&common, flags, "fluctuation").map_err(config_err)?;
            init_workers(&section);
            run_fluctuation(&section).map_err(runtime_err)
        }
        Command::Lil {
            common,
            space,
            horizon,
            alpha,
            beta,
            eps,
            dt,
            h,
        } => {
            let mut flags = space_flags_to_section(&space, None).map_err(config_err)?;
            flags.horizon = horizon;
            flags.alpha = alpha;
            flags.beta = beta;
            flags.eps = eps;
            flags.dt = dt;
            flags.h = h;
            let section = load_merged(&common, flags, "lil").map_err(config_err)?;
            init_workers(&section);
            run_lil(&section).map_err(runtime_err)
        }
        Command::GreenCompare {
            common,
            space,
            sweep,
            eps1,
            eps2,
            paths,
            horizon,
            dt,
        } => {
            let mut flags = space_flags_to_section(&space, None).map_err(config_err)?;
            if let Some(sw) = &sweep {
                flags.sweep = Some(parse_list(sw).map_err(config_err)?);
            }
            flags.eps1 = eps1;
            flags.eps2 = eps2;
            flags.paths = paths;
            flags.horizon = horizon;
            flags.dt = dt;
            let section = load_merged(&common, flags, "green-compare").map_err(config_err)?;
            init_workers(&section);
            run_green(&section).map_err(runtime_err)
        }
        Command::Excess {
            common,
            space,
            grid,
        } => {
            let flags = space_flags_to_section(&space, Some(&grid)).map_err(config_err)?;
            let section = load_merged(&common, flags, "excess").map_err(config_err)?;
            init_workers(&section);
            run_excess(&section).map_err(runtime_err)
        }
        Command::Plot {
            common,
            input,
            output,
            mode,
        } => {
            let _ = load_merged(&common, Section::default(), "plot").map_err(config_err)?;
            run_plot(&input, &output, &mode).map_err(runtime_err)
        }
    }
}

fn parse_model(name: &str) -> Result<FitModel> {
    match name {
        "inverse-sqrt" => Ok(FitModel::InverseSqrt),
        "inverse-log" => Ok(FitModel::InverseLog),
        "power-law" => Ok(FitModel::PowerLaw),
        other => bail!("unknown model `{other}` (expected inverse-sqrt, inverse-log, power-law)"),
    }
}

fn run_constants(section: &Section, dim: usize, radii: &[f64]) -> Result<()> {
    let header = "dim,eps,capacity,green,scaled_ratio";
    println!("{header}");
    let mut rows = Vec::new();
    for &eps in radii {
        let row = format!(
            "{dim},{eps},{},{},{}",
            capacity_ball(dim, eps)?,
            green_bm(dim, eps)?,
            scaled_limit_ratio(dim)
        );
        println!("{row}");
        rows.push(row);
    }
    if section.out.is_some() {
        let dir = out_dir(section)?;
        let path = dir.write_csv_rows("constants.csv", header, &rows)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct HitRecord {
    experiment: String,
    t: f64,
    hit_probability: f64,
    stderr: f64,
    strict: bool,
    config_digest: String,
}

fn run_simulate(section: &Section) -> Result<()> {
    let space = build_space(section)?;
    let times = section
        .times
        .clone()
        .ok_or_else(|| anyhow!("simulate needs --times"))?;
    let spec = EnsembleSpec {
        space: space.clone(),
        eps: section.eps_or_default(),
        times,
        n_paths: section.paths.unwrap_or(1000),
        dt: section.dt_or_default(),
        h: section.h_or_default(),
        seed: section.seed.unwrap_or(42),
    };
    let digest = config_digest(section, "simulate");
    let result = run_ensemble(&spec)?;
    let records = ResultRecord::from_ensemble("simulate", &result, &digest);
    let dir = out_dir(section)?;
    dir.write_jsonl("simulate.jsonl", &records)?;
    dir.write_result_csv("simulate.csv", &records)?;
    let chart = Chart {
        title: format!("sausage volume per time, {}", spec.space.label()),
        x_label: "t (time units)".into(),
        y_label: "mean V / t".into(),
        log_x: true,
        series: vec![Series {
            label: spec.space.label(),
            points: result
                .times()
                .iter()
                .zip(&result.means)
                .map(|(&t, &m)| (t, m / t))
                .collect(),
            color: PALETTE[0],
        }],
    };
    dir.write_chart("simulate.svg", &chart)?;
    for r in &records {
        println!(
            "t={:10.3}  mean={:14.6}  stderr={:.6}  (grid band {:.3}, step band {:.3})",
            r.t, r.mean, r.stderr, r.grid_band, r.step_band
        );
    }

    if section.dump_paths.unwrap_or(false) {
        dump_first_path(&spec, &dir)?;
    }
    if let Some(center) = section.probe_center.clone() {
        probe_hitting(section, &spec, &center, &dir, &digest)?;
    }
    eprintln!("wrote {}", dir.path("simulate.jsonl").display());
    Ok(())
}

fn dump_first_path(spec: &EnsembleSpec, dir: &OutDir) -> Result<()> {
    let rng = RngSpec::new(spec.seed, 0);
    let horizon = *spec.times.last().unwrap();
    let path = match &spec.space {
        SpaceDescriptor::EuclideanBm { dim } => sample_bm_path(*dim, horizon, spec.dt, &rng)?,
        SpaceDescriptor::RadialMetricBm { dim, profile } => {
            sample_radial_path(*dim, profile, horizon, spec.dt, &rng)?
        }
        SpaceDescriptor::GasketWalk { .. } => {
            sample_gasket_walk(&GasketGraph::new(), horizon as usize, &rng)?
        }
    };
    let dim = path.dim();
    let mut rows = Vec::with_capacity(path.len());
    let mut buf = [0.0f64; sausage_core::diffusion::MAX_DIM];
    for i in 0..path.len() {
        let x = path.position(i, &mut buf);
        let coords: Vec<String> = x.iter().map(|c| format!("{c}")).collect();
        rows.push(format!("{},{}", i as f64 * path.step, coords.join(",")));
    }
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=dim).map(|k| format!("x{k}")))
        .collect();
    let path_file = dir.write_csv_rows("path_000000.csv", &header.join(","), &rows)?;
    eprintln!("wrote {}", path_file.display());
    Ok(())
}

fn probe_hitting(
    section: &Section,
    spec: &EnsembleSpec,
    center: &[f64],
    dir: &OutDir,
    digest: &str,
) -> Result<()> {
    if spec.space.is_gasket() {
        bail!("hitting probes apply to continuum spaces");
    }
    let probe_eps = section.probe_eps.unwrap_or(spec.eps);
    if center.len() != spec.space.dim() {
        bail!(
            "probe center has {} coordinates, space has dimension {}",
            center.len(),
            spec.space.dim()
        );
    }
    let strict = section.strict_hitting.unwrap_or(false);
    let mode = if strict {
        HittingMode::StrictPositive
    } else {
        HittingMode::Inclusive
    };
    let horizon = *spec.times.last().unwrap();
    let mut hits = vec![0u64; spec.times.len()];
    for i in 0..spec.n_paths {
        let rng = RngSpec::new(spec.seed, i);
        let path = match &spec.space {
            SpaceDescriptor::EuclideanBm { dim } => sample_bm_path(*dim, horizon, spec.dt, &rng)?,
            SpaceDescriptor::RadialMetricBm { dim, profile } => {
                sample_radial_path(*dim, profile, horizon, spec.dt, &rng)?
            }
            SpaceDescriptor::GasketWalk { .. } => unreachable!(),
        };
        if let Some(tau) = hitting_time_with(&path, center, probe_eps, mode) {
            for (j, &t) in spec.times.iter().enumerate() {
                if tau <= t {
                    hits[j] += 1;
                }
            }
        }
    }
    let n = spec.n_paths as f64;
    let records: Vec<HitRecord> = spec
        .times
        .iter()
        .zip(&hits)
        .map(|(&t, &k)| {
            let p = k as f64 / n;
            HitRecord {
                experiment: "hitting-probe".into(),
                t,
                hit_probability: p,
                stderr: (p * (1.0 - p) / n).sqrt(),
                strict,
                config_digest: digest.to_string(),
            }
        })
        .collect();
    dir.write_jsonl("hitting.jsonl", &records)?;
    for r in &records {
        println!(
            "P(T <= {:8.3}) = {:.4} +- {:.4}{}",
            r.t,
            r.hit_probability,
            r.stderr,
            if r.strict { " (strict)" } else { "" }
        );
    }
    Ok(())
}

fn run_fit(
    section: &Section,
    input: &PathBuf,
    model: FitModel,
    experiment: Option<&str>,
) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("cannot read {}", input.display()))?;
    let records: Vec<ResultRecord> = from_jsonl(&text)?;
    let mut filtered: Vec<&ResultRecord> = records
        .iter()
        .filter(|r| experiment.is_none_or(|e| r.experiment == e))
        .collect();
    if filtered.is_empty() {
        bail!("no matching records in {}", input.display());
    }
    filtered.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    let times: Vec<f64> = filtered.iter().map(|r| r.t).collect();
    let means: Vec<f64> = filtered.iter().map(|r| r.mean).collect();
    let stderrs: Vec<f64> = filtered.iter().map(|r| r.stderr).collect();
    let fit = fit_points(&times, &means, &stderrs, model)?;
    let digest = filtered[0].config_digest.clone();
    let record = FitRecord::from_fit(
        experiment.unwrap_or(&filtered[0].experiment),
        &fit,
        &digest,
    );
    println!(
        "model={:?}  a={:.6} +- {:.6}  b={:.6}  residual={:.3e}",
        fit.model,
        fit.a,
        fit.a_stderr(),
        fit.b,
        fit.residual_norm
    );
    let dir = out_dir(section)?;
    let path = dir.path("fits.jsonl");
    let mut existing = if path.exists() {
        std::fs::read_to_string(&path)?
    } else {
        String::new()
    };
    existing.push_str(&serde_json::to_string(&record)?);
    existing.push('\n');
    std::fs::write(&path, existing)?;
    eprintln!("appended to {}", path.display());
    Ok(())
}

fn run_sandwich(section: &Section) -> Result<()> {
    let dim = section.dim.unwrap_or(3);
    let eps = section.eps_or_default();
    let separation = section.separation.unwrap_or(2.0 * eps);
    let a = section.a.unwrap_or(0.5);
    let mut start = vec![0.0; dim];
    start[0] = separation;
    let config = SandwichConfig {
        dim,
        start,
        center: vec![0.0; dim],
        eps,
        a,
        t: section.t.unwrap_or(5.0),
        extra_t: section.big_t.unwrap_or(5.0),
        n_paths: section.paths.unwrap_or(4000),
        n_sphere_paths: None,
        sphere_points: 32,
        dt: section.dt.unwrap_or((a * eps / 10.0) * (a * eps / 10.0)),
        seed: section.seed.unwrap_or(42),
    };
    let report = verify_sandwich(&config)?;
    println!(
        "P(T <= t) = {:.4} +- {:.4}",
        report.hit_probability, report.hit_stderr
    );
    println!(
        "upper margin = {:.5} +- {:.5}  ({})",
        report.upper.margin, report.upper.margin_stderr, report.upper.sphere_effect
    );
    println!(
        "lower margin = {:.5} +- {:.5}  ({})",
        report.lower.margin, report.lower.margin_stderr, report.lower.sphere_effect
    );
    let dir = out_dir(section)?;
    dir.write_jsonl("sandwich.jsonl", &[&report])?;
    eprintln!("wrote {}", dir.path("sandwich.jsonl").display());
    Ok(())
}

fn run_fluctuation(section: &Section) -> Result<()> {
    let dim = section.dim.unwrap_or(3);
    let profile = match &section.breakpoints {
        Some(b) if !b.is_empty() => {
            RadialMetricProfile::new(b.clone(), section.starts_high.unwrap_or(false))?
        }
        _ => RadialMetricProfile::from_breakpoints(vec![12.0])?,
    };
    let config = FluctuationConfig {
        dim,
        profile,
        eps: section.eps_or_default(),
        times: section
            .times
            .clone()
            .unwrap_or_else(|| vec![5.0, 10.0, 20.0, 40.0, 80.0]),
        n_paths: section.paths.unwrap_or(1000),
        dt: section.dt_or_default(),
        h: section.h_or_default(),
        seed: section.seed.unwrap_or(42),
    };
    let digest = config_digest(section, "fluctuation");
    let report = fluctuation_experiment(&config)?;
    let dir = out_dir(section)?;
    let mut records = ResultRecord::from_ensemble("fluctuation-flat", &report.flat, &digest);
    records.extend(ResultRecord::from_ensemble(
        "fluctuation-four",
        &report.four,
        &digest,
    ));
    records.extend(ResultRecord::from_ensemble(
        "fluctuation-shell",
        &report.shell,
        &digest,
    ));
    dir.write_jsonl("fluctuation.jsonl", &records)?;
    dir.write_result_csv("fluctuation.csv", &records)?;

    let series = |label: &str, r: &sausage_core::experiments::EnsembleResult, color| Series {
        label: label.into(),
        points: r
            .times()
            .iter()
            .zip(&r.means)
            .map(|(&t, &m)| (t, m / t))
            .collect(),
        color,
    };
    let chart = Chart {
        title: format!("per-time sausage constants, d={dim}"),
        x_label: "t (time units)".into(),
        y_label: "mean V / t".into(),
        log_x: true,
        series: vec![
            series("factor 1", &report.flat, PALETTE[0]),
            series("factor 4", &report.four, PALETTE[1]),
            series("shell profile", &report.shell, PALETTE[2]),
        ],
    };
    dir.write_chart("fluctuation.svg", &chart)?;

    println!(
        "factor-1 limit: {:.5} +- {:.5}",
        report.flat_fit.a,
        report.flat_fit.a_stderr()
    );
    println!(
        "factor-4 limit: {:.5} +- {:.5}",
        report.four_fit.a,
        report.four_fit.a_stderr()
    );
    println!(
        "measured ratio: {:.4} +- {:.4}  (dilation constant {:.4}, capacity scale law {:.4})",
        report.measured_ratio,
        report.measured_ratio_stderr,
        report.claimed_ratio,
        report.capacity_scale_ratio
    );
    println!(
        "crossover ratios (shell/flat): {:?}",
        report
            .crossover_ratio
            .iter()
            .map(|r| (r * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );
    eprintln!("wrote {}", dir.path("fluctuation.jsonl").display());
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct LilRecord {
    experiment: String,
    t: f64,
    raw: f64,
    sup_scaled: f64,
    inf_scaled: f64,
    config_digest: String,
}

fn run_lil(section: &Section) -> Result<()> {
    let space = match section.space.as_deref() {
        None | Some("gasket") => SpaceDescriptor::gasket(),
        _ => build_space(section)?,
    };
    let alpha = section.alpha.unwrap_or_else(gasket_exponents::alpha);
    let beta = section.beta.unwrap_or_else(gasket_exponents::beta);
    let config = LilConfig {
        space,
        volume: ScalingFunction::pure(alpha),
        time_scale: ScalingFunction::pure(beta),
        eps: section.eps_or_default(),
        horizon: section.horizon.unwrap_or(1_000_000.0),
        dt: section.dt_or_default(),
        h: section.h_or_default(),
        seed: section.seed.unwrap_or(42),
    };
    let digest = config_digest(section, "lil");
    let trace = lil_trace(&config)?;
    let records: Vec<LilRecord> = trace
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| LilRecord {
            experiment: "lil".into(),
            t,
            raw: trace.raw[i],
            sup_scaled: trace.sup_scaled[i],
            inf_scaled: trace.inf_scaled[i],
            config_digest: digest.clone(),
        })
        .collect();
    let dir = out_dir(section)?;
    dir.write_jsonl("lil.jsonl", &records)?;
    let chart = Chart {
        title: "volume over iterated-logarithm normalizers".into(),
        x_label: "t (steps)".into(),
        y_label: "scaled volume".into(),
        log_x: true,
        series: vec![
            Series {
                label: "V / limsup normalizer".into(),
                points: trace
                    .times
                    .iter()
                    .zip(&trace.sup_scaled)
                    .map(|(&t, &v)| (t, v))
                    .collect(),
                color: PALETTE[0],
            },
            Series {
                label: "V / liminf normalizer".into(),
                points: trace
                    .times
                    .iter()
                    .zip(&trace.inf_scaled)
                    .map(|(&t, &v)| (t, v))
                    .collect(),
                color: PALETTE[1],
            },
        ],
    };
    dir.write_chart("lil.svg", &chart)?;
    let (lo, hi) = trace.late_band();
    println!("late-band extremes of the scaled series: [{lo:.4}, {hi:.4}]");
    eprintln!("wrote {}", dir.path("lil.jsonl").display());
    Ok(())
}

fn run_green(section: &Section) -> Result<()> {
    let config = GreenComparisonConfig {
        dim: section.dim.unwrap_or(3),
        profile: match &section.breakpoints {
            Some(b) if !b.is_empty() => {
                RadialMetricProfile::new(b.clone(), section.starts_high.unwrap_or(false))?
            }
            _ => RadialMetricProfile::from_breakpoints(vec![2.0, 4.0])?,
        },
        sweep: section
            .sweep
            .clone()
            .unwrap_or_else(|| vec![5.0, 10.0, 20.0]),
        eps1: section.eps1.unwrap_or(0.5),
        eps2: section.eps2.unwrap_or(1.5),
        n_paths: section.paths.unwrap_or(10_000),
        horizon: section.horizon.unwrap_or(50.0),
        dt: section.dt.unwrap_or(1e-3),
        seed: section.seed.unwrap_or(42),
    };
    let report = green_comparison(&config)?;
    let dir = out_dir(section)?;
    dir.write_jsonl("green.jsonl", &report.rows)?;
    let header = "start_radius,estimate,stderr,reference,difference";
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.start_radius, r.estimate, r.stderr, r.reference, r.difference
            )
        })
        .collect();
    dir.write_csv_rows("green.csv", header, &rows)?;
    let chart = Chart {
        title: "Green-function difference along the sweep".into(),
        x_label: "|y| (length units)".into(),
        y_label: "|estimate - free-space value|".into(),
        log_x: false,
        series: vec![Series {
            label: "occupation-density estimate".into(),
            points: report
                .rows
                .iter()
                .map(|r| (r.start_radius, r.difference.abs()))
                .collect(),
            color: PALETTE[0],
        }],
    };
    dir.write_chart("green.svg", &chart)?;
    for r in &report.rows {
        println!(
            "|y|={:6.2}  estimate={:.6} +- {:.6}  reference={:.6}  difference={:+.6}",
            r.start_radius, r.estimate, r.stderr, r.reference, r.difference
        );
    }
    eprintln!("wrote {}", dir.path("green.jsonl").display());
    Ok(())
}

fn run_excess(section: &Section) -> Result<()> {
    let config = ExcessConfig {
        dim: section.dim.unwrap_or(6),
        profile: build_profile(section)?,
        eps: section.eps_or_default(),
        times: section
            .times
            .clone()
            .unwrap_or_else(|| vec![4.0, 8.0, 16.0, 30.0]),
        n_paths: section.paths.unwrap_or(300),
        dt: section.dt.unwrap_or(1e-4),
        h: section.h.unwrap_or(section.eps_or_default() / 4.0),
        seed: section.seed.unwrap_or(42),
    };
    let digest = config_digest(section, "excess");
    let report = convergence_excess(&config)?;
    let dir = out_dir(section)?;
    let records = ResultRecord::from_ensemble("excess", &report.ensemble, &digest);
    dir.write_jsonl("excess.jsonl", &records)?;
    dir.write_result_csv("excess.csv", &records)?;
    let chart = Chart {
        title: format!("excess over linear capacity growth, d={}", config.dim),
        x_label: "t (time units)".into(),
        y_label: "mean V - t Cap".into(),
        log_x: true,
        series: vec![Series {
            label: "excess".into(),
            points: report
                .ensemble
                .times()
                .iter()
                .zip(&report.excess)
                .map(|(&t, &e)| (t, e))
                .collect(),
            color: PALETTE[0],
        }],
    };
    dir.write_chart("excess.svg", &chart)?;
    for (i, &t) in report.ensemble.times().iter().enumerate() {
        println!(
            "t={:8.2}  excess={:12.4} +- {:.4}",
            t, report.excess[i], report.stderr[i]
        );
    }
    for c in &report.checks {
        println!(
            "stabilization {:6.1} vs {:6.1}: gap={:10.4}  tolerance={:10.4}  {}",
            c.t_lo,
            c.t_hi,
            c.gap,
            c.tolerance,
            if c.within { "ok" } else { "DRIFTING" }
        );
    }
    println!("stabilized: {}", report.stabilized);
    eprintln!("wrote {}", dir.path("excess.jsonl").display());
    Ok(())
}

fn run_plot(input: &PathBuf, output: &PathBuf, mode: &str) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("cannot read {}", input.display()))?;
    let records: Vec<ResultRecord> = from_jsonl(&text)?;
    if records.is_empty() {
        bail!("no records in {}", input.display());
    }
    let mut groups: Vec<(String, Vec<&ResultRecord>)> = Vec::new();
    for r in &records {
        let key = format!("{} {}", r.experiment, r.space);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    let (y_label, log_x): (&str, bool) = match mode {
        "raw" => ("mean volume", true),
        "per-time" => ("mean V / t", true),
        "log-log" => ("log mean volume", true),
        other => bail!("unknown plot mode `{other}`"),
    };
    let series: Vec<Series> = groups
        .iter()
        .enumerate()
        .map(|(i, (key, rows))| {
            let mut pts: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| {
                    let y = match mode {
                        "raw" => r.mean,
                        "per-time" => r.mean / r.t,
                        _ => r.mean.ln(),
                    };
                    (r.t, y)
                })
                .collect();
            pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            Series {
                label: key.clone(),
                points: pts,
                color: PALETTE[i % PALETTE.len()],
            }
        })
        .collect();
    let chart = Chart {
        title: format!("{} ({mode})", input.display()),
        x_label: "t (time units)".into(),
        y_label: y_label.into(),
        log_x,
        series,
    };
    std::fs::write(output, chart.render())
        .with_context(|| format!("cannot write {}", output.display()))?;
    println!("wrote {}", output.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn every_flag_is_documented() {
        // Help coverage: every argument of every subcommand carries help
        // text, so --help lists the complete surface.
        fn check(cmd: &clap::Command) {
            for arg in cmd.get_arguments() {
                if arg.get_id() == "help" || arg.get_id() == "version" {
                    continue;
                }
                assert!(
                    arg.get_help().is_some(),
                    "undocumented flag --{} in subcommand {}",
                    arg.get_id(),
                    cmd.get_name()
                );
            }
            for sub in cmd.get_subcommands() {
                check(sub);
            }
        }
        check(&Cli::command());
    }

    #[test]
    fn cli_parses_minimal_invocations() {
        Cli::try_parse_from(["sausage", "constants", "--dim", "3", "--eps", "1"]).unwrap();
        Cli::try_parse_from([
            "sausage", "simulate", "--space", "euclid", "--dim", "3", "--eps", "1", "--times",
            "1,2", "--paths", "4", "--seed", "42",
        ])
        .unwrap();
        assert!(Cli::try_parse_from(["sausage", "simulate", "--bogus"]).is_err());
    }
}
