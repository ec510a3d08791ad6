use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use shrinkrank::bench::{results_csv, run_benchmark, BenchmarkPlan, CellStatus, MonitorChoice, TargetSpec};
use shrinkrank::diagnostics::{EfficiencyReport, DEFAULT_BURN_IN};
use shrinkrank::rng::SeededSource;
use shrinkrank::samplers::{run_chain, AmConfig, SamplerConfig, ShrinkConfig};
use shrinkrank::Chain;

/// Shrinking-rank slice sampling benchmarks.
#[derive(Debug, Parser)]
#[command(name = "shrinkrank", version)]
struct Cli {
    /// Directory for outputs written without an explicit path.
    #[arg(long, global = true, env = "SHRINKRANK_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one chain and write it as CSV.
    Sample(SampleArgs),
    /// Run a tuning-grid benchmark plan.
    Benchmark(BenchmarkArgs),
    /// Efficiency report for a saved chain.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Target id, optionally with options: `correlated-gaussian:dim=4,rho=0.999`.
    #[arg(long)]
    target: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Data file (Eight Schools TOML or regression CSV).
    #[arg(long)]
    data: Option<String>,
}

impl TargetArgs {
    fn spec(&self) -> Result<TargetSpec> {
        let mut spec: TargetSpec = self.target.parse()?;
        if let Some(d) = self.dim {
            spec = spec.with("dim", d);
        }
        if let Some(r) = self.rho {
            spec = spec.with("rho", r);
        }
        if let Some(p) = &self.data {
            spec = spec.with("data", p);
        }
        Ok(spec)
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// shrink-rank or adaptive-metropolis.
    #[arg(long, default_value = "shrink-rank")]
    sampler: String,
    /// Tuning value: sigma_c for shrink-rank, initial sd × sqrt(d) for
    /// adaptive-metropolis.
    #[arg(long, visible_alias = "sigma-c", default_value_t = 1.0)]
    tuning: f64,
    #[arg(long, default_value_t = 0.95)]
    theta: f64,
    #[arg(long, default_value_t = 0.1)]
    zero_density_factor: f64,
    #[arg(long, default_value_t = 10_000)]
    max_crumbs: usize,
    /// Number of iterations.
    #[arg(long, short)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; defaults to `chain.csv` in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    plan: PathBuf,
    /// Results CSV; overrides the plan's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    chain: PathBuf,
    /// `worst`, `log-density` or a coordinate index.
    #[arg(long, default_value = "worst")]
    monitored: String,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: f64,
    /// Target the chain came from; needed for `--monitored log-density`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    data: Option<String>,
    /// Append the report row to this CSV instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output_path(explicit: Option<&Path>, out_dir: &Path, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_owned(),
        None => out_dir.join(default_name),
    }
}

fn sampler_config(args: &SampleArgs) -> Result<SamplerConfig> {
    Ok(match args.sampler.as_str() {
        "shrink-rank" => {
            let cfg = ShrinkConfig {
                theta: args.theta,
                zero_density_factor: args.zero_density_factor,
                max_crumbs: args.max_crumbs,
                ..ShrinkConfig::new(args.tuning)?
            };
            cfg.validate()?;
            SamplerConfig::ShrinkRank(cfg)
        }
        "adaptive-metropolis" => SamplerConfig::AdaptiveMetropolis(AmConfig::new(args.tuning)?),
        other => bail!("unknown sampler `{other}` (expected shrink-rank or adaptive-metropolis)"),
    })
}

fn sample(args: SampleArgs, out_dir: &Path) -> Result<()> {
    let spec = args.target.spec()?;
    let target = spec.build(Path::new(".")).with_context(|| format!("building target `{spec}`"))?;
    let sampler = sampler_config(&args)?;
    let mut src = SeededSource::new(args.seed);
    let chain = run_chain(&sampler, target.as_ref(), &target.initial_point(), args.n, &mut src)?;
    let path = output_path(args.out.as_deref(), out_dir, "chain.csv");
    chain.write_csv_file(&path).with_context(|| format!("writing {}", path.display()))?;
    println!(
        "wrote {} iterations to {}: {} density evaluations, {} gradient evaluations",
        chain.len(),
        path.display(),
        chain.total_density_evals(),
        chain.total_grad_evals()
    );
    Ok(())
}

fn benchmark(args: BenchmarkArgs, out_dir: &Path) -> Result<()> {
    let plan = BenchmarkPlan::from_file(&args.plan).with_context(|| format!("reading plan {}", args.plan.display()))?;
    let path = match args.out.or_else(|| plan.output.clone()) {
        Some(p) => p,
        None => out_dir.join("results.csv"),
    };
    let results = match args.threads {
        Some(n) => rayon_pool(n)?.install(|| run_benchmark(&plan)),
        None => run_benchmark(&plan),
    };
    std::fs::write(&path, results_csv(&results)).with_context(|| format!("writing {}", path.display()))?;
    let ok = results.iter().filter(|r| r.status == CellStatus::Ok).count();
    println!("wrote {} rows to {} ({ok} ok, {} flagged)", results.len(), path.display(), results.len() - ok);
    Ok(())
}

fn rayon_pool(threads: usize) -> Result<shrinkrank::bench::ThreadPool> {
    shrinkrank::bench::thread_pool(threads).context("building worker pool")
}

fn diagnose(args: DiagnoseArgs) -> Result<()> {
    let mut chain = Chain::read_csv_file(&args.chain).with_context(|| format!("reading {}", args.chain.display()))?;
    let monitored: MonitorChoice = args.monitored.parse()?;
    if let Some(t) = &args.target {
        let spec = TargetArgs { target: t.clone(), dim: args.dim, rho: args.rho, data: args.data.clone() }.spec()?;
        let target = spec.build(Path::new("."))?;
        chain.recompute_log_densities(target.as_ref())?;
    }
    let report = monitored.report(&chain, args.burn_in)?;
    write_report(&report, args.out.as_deref())
}

fn write_report(report: &EfficiencyReport, out: Option<&Path>) -> Result<()> {
    match out {
        None => {
            println!("{}", EfficiencyReport::CSV_HEADER);
            println!("{}", report.csv_row());
        }
        Some(path) => {
            use std::io::Write;
            let fresh = !path.exists();
            let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
            if fresh {
                writeln!(f, "{}", EfficiencyReport::CSV_HEADER)?;
            }
            writeln!(f, "{}", report.csv_row())?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sample(a) => sample(a, &cli.out_dir),
        Command::Benchmark(a) => benchmark(a, &cli.out_dir),
        Command::Diagnose(a) => diagnose(a),
    }
}
