use std::fs::{self, File};
use std::io::{self as stdio, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgAction, Args, Parser, Subcommand};
use skyway::config::ExperimentConfig;
use skyway::harness::{self, ExperimentInputs, HarnessError, Method};
use skyway::io;
use skyway::report::{self, CompositionReport};
use skyway_core::{
    exhaustive_composition, top_k_composition, CompositionError, DeliveryQuery, DroneSpec, EnergyModelParams,
    FleetError, NodeId, QualityDirectionConfig, StationLoadProfile, StationProfiles, DEFAULT_SATURATION_CAP_MIN,
};

#[derive(Parser)]
#[command(name = "skyway", version, about = "Drone delivery composition over skyway networks")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one delivery.
    Compose(ComposeArgs),
    /// Run the seeded comparison and write metrics.csv and summary.csv.
    Experiment(ExperimentArgs),
    /// Cut a connected subnetwork out of a network.
    Extract(ExtractArgs),
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    /// Fleet CSV; the DJI M200 V2 when omitted.
    #[arg(long)]
    drones: Option<PathBuf>,
    /// Station load CSV; stations without rows use the baseline.
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long)]
    source: u64,
    #[arg(long)]
    dest: u64,
    /// Package weight in kg.
    #[arg(long)]
    weight: f64,
    /// Departure, minutes after midnight.
    #[arg(long, default_value_t = 480.0)]
    start_min: f64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Search every simple path instead of the top k.
    #[arg(long)]
    exhaustive: bool,
    /// Write the plan report as JSON to this file (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Baseline arrivals per hour.
    #[arg(long, default_value_t = 4.0)]
    rate: f64,
    /// Baseline mean pad occupancy in minutes.
    #[arg(long, default_value_t = 30.0)]
    occupancy: f64,
    #[arg(long, default_value_t = DEFAULT_SATURATION_CAP_MIN)]
    saturation_cap: f64,
    /// Override every station's pad count.
    #[arg(long)]
    pads: Option<u32>,
    #[arg(long)]
    max_hops: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// key = value file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Overrides master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides any config key, e.g. `--set node_counts=10,20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Writes `<P>.nodes.csv` and `<P>.edges.csv`.
    #[arg(long)]
    out_prefix: PathBuf,
}

enum Failure {
    Infeasible(anyhow::Error),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn classify(e: CompositionError) -> Failure {
    match e {
        CompositionError::Unreachable(..)
        | CompositionError::InfeasiblePlan { .. }
        | CompositionError::Fleet(FleetError::NoCapableDrone(_)) => Failure::Infeasible(e.into()),
        other => Failure::Input(other.into()),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn compose(args: ComposeArgs) -> Result<(), Failure> {
    let mut net = io::load_network(&args.nodes, &args.edges).map_err(anyhow::Error::from)?;
    if let Some(p) = args.pads {
        net = net.with_pads(p).map_err(anyhow::Error::from)?;
    }
    let fleet = match &args.drones {
        Some(path) => io::load_fleet(path).map_err(anyhow::Error::from)?,
        None => vec![DroneSpec::dji_m200_v2()],
    };
    let baseline = StationLoadProfile::constant(NodeId(0), args.rate, args.occupancy, 0).context("baseline load")?;
    let profiles = match &args.profiles {
        Some(path) => io::load_profiles(path, baseline, args.saturation_cap).map_err(anyhow::Error::from)?,
        None => StationProfiles::new(baseline, args.saturation_cap).context("baseline load")?,
    };
    let query = DeliveryQuery::new(NodeId(args.source), NodeId(args.dest), args.start_min, args.weight);
    let cfg = QualityDirectionConfig::default();
    let params = EnergyModelParams::default();

    let (method, plans) = if args.exhaustive {
        let plan = exhaustive_composition(&net, &fleet, &query, &profiles, &cfg, &params, args.max_hops).map_err(classify)?;
        (Method::Exhaustive, vec![plan])
    } else {
        let plans = top_k_composition(&net, &fleet, &query, args.k, &profiles, &cfg, &params).map_err(classify)?;
        (Method::TopK(args.k), plans)
    };
    let report = CompositionReport::new(method, &query, &plans);

    match args.json.as_deref() {
        Some(p) if p == Path::new("-") => {
            serde_json::to_writer_pretty(stdio::stdout().lock(), &report).context("writing JSON")?;
            println!();
        }
        Some(p) => {
            let file = File::create(p).with_context(|| format!("{}", p.display()))?;
            serde_json::to_writer_pretty(file, &report).with_context(|| format!("{}", p.display()))?;
        }
        None => {
            let mut out = stdio::stdout().lock();
            let _ = writeln!(out, "drone {}  method {}", report.drone, report.method);
            let _ = writeln!(out, "{:>4} {:>10} {:>10} {:>10}  path", "rank", "T (min)", "S (min)", "km");
            for p in &report.plans {
                let path: Vec<String> = p.nodes.iter().map(u64::to_string).collect();
                let _ = writeln!(
                    out,
                    "{:>4} {:>10.3} {:>10.3} {:>10.3}  {}",
                    p.rank,
                    p.delivery_time_min,
                    p.service_time_min,
                    p.distance_km,
                    path.join(" -> ")
                );
            }
        }
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("{}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    for kv in &args.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--set expects KEY=VALUE, got {kv:?}"))?;
        cfg.set(k.trim(), v.trim()).map_err(anyhow::Error::from)?;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    cfg.validate().map_err(anyhow::Error::from)?;

    let run = || -> Result<_, HarnessError> {
        let inputs = ExperimentInputs::from_config(&cfg)?;
        harness::run_experiment(&cfg, &inputs)
    };
    let records = run().map_err(|e| match e {
        HarnessError::Composition(c) => classify(c),
        other => Failure::Input(other.into()),
    })?;
    let (metrics, summary) = report::emit_report(&records, &args.out).map_err(anyhow::Error::from)?;
    fs::write(args.out.join("config.txt"), cfg.to_text()).context("writing config.txt")?;

    let mut out = stdio::stdout().lock();
    let _ = writeln!(out, "{:>6} {:>11} {:>5} {:>12} {:>12} {:>10}", "nodes", "method", "runs", "time (ms)", "T (min)", "km");
    for r in report::summarize(&records) {
        let _ = writeln!(
            out,
            "{:>6} {:>11} {:>5} {:>12.4} {:>12.3} {:>10.3}",
            r.node_count,
            r.method.to_string(),
            r.runs,
            r.execution_time_mean,
            r.delivery_time_mean,
            r.distance_mean
        );
    }
    let _ = writeln!(out, "wrote {} and {}", metrics.display(), summary.display());
    Ok(())
}

fn extract(args: ExtractArgs) -> Result<(), Failure> {
    let net = io::load_network(&args.nodes, &args.edges).map_err(anyhow::Error::from)?;
    let sub = net.extract_subnetwork(args.n, args.seed).map_err(anyhow::Error::from)?;
    let nodes = with_suffix(&args.out_prefix, ".nodes.csv");
    let edges = with_suffix(&args.out_prefix, ".edges.csv");
    io::save_network(&sub, &nodes, &edges).map_err(anyhow::Error::from)?;
    println!("{} nodes, {} segments -> {}, {}", sub.node_count(), sub.segment_count(), nodes.display(), edges.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Compose(a) => compose(a),
        Command::Experiment(a) => experiment(a),
        Command::Extract(a) => extract(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(e)) => {
            eprintln!("infeasible: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
