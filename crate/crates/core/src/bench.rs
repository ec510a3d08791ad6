//! Grid benchmarks over targets × samplers × tuning values.
//!
//! A plan is a flat TOML file:
//!
//! ```toml
//! targets = ["gamma-product:dim=2", "gamma-product:dim=20"]
//! samplers = ["shrink-rank", "adaptive-metropolis"]
//! shrink_rank_grid = [0.01, 0.1, 1.0, 10.0, 100.0]   # optional
//! adaptive_metropolis_grid = [0.01, 0.1, 1.0]         # optional
//! n_iterations = 60000
//! seed = 42
//! output = "results.csv"                              # optional
//! burn_in = 0.1                                       # optional
//! monitored = "worst"                                 # or "log-density" or a coordinate index
//! ```
//!
//! Cells run on a rayon pool. Cell `i` (in target-major, then sampler,
//! then grid order) draws from ChaCha stream `i` of the plan seed, so the
//! result file does not depend on scheduling.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::diagnostics::{efficiency_report, worst_coordinate_report, EfficiencyReport, Monitored, DEFAULT_BURN_IN};
use crate::error::{Error, Result};
use crate::rng::SeededSource;
use crate::samplers::{run_chain, SamplerConfig};
use crate::targets::{
    load_regression_csv, CorrelatedGaussian, EightSchools, EightSchoolsData, GammaProduct, GpData, GpRegression,
    LogisticRegression, RegressionData, TargetDistribution,
};

pub const SAMPLER_IDS: [&str; 2] = ["shrink-rank", "adaptive-metropolis"];
pub const MIN_BENCH_ITERATIONS: usize = 1000;
pub const DEFAULT_EIGHT_SCHOOLS_PATH: &str = "data/eight_schools.toml";
pub const DEFAULT_CREDIT_SEED: u64 = 1;
pub const DEFAULT_GP_SEED: u64 = 2024;
pub const DEFAULT_GP_N: usize = 30;

/// Nine points, geometric over `[1e-2, 1e2]` (half-decade spacing).
pub fn default_grid() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(-2.0 + 0.5 * i as f64)).collect()
}

/// A target identifier with `key=value` options, e.g.
/// `correlated-gaussian:dim=4,rho=0.999`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub name: String,
    pub options: Vec<(String, String)>,
}

impl std::str::FromStr for TargetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut options = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("target option `{part}` is not key=value")))?;
            options.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { name: name.trim().to_string(), options })
    }
}

impl std::fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.options.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl TargetSpec {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), options: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.options.push((key.to_string(), value.to_string()));
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.options.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Parse(format!("target `{}`: cannot parse {key}={v}", self.name))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.options.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(Error::Parse(format!("target `{}` does not take option `{k}`", self.name))),
            None => Ok(()),
        }
    }

    /// Constructs the target. Relative data paths resolve against
    /// `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Box<dyn TargetDistribution>> {
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_owned()
            } else {
                base_dir.join(p)
            }
        };
        match self.name.as_str() {
            "correlated-gaussian" => {
                self.check_keys(&["dim", "rho"])?;
                Ok(Box::new(CorrelatedGaussian::new(self.parsed("dim", 4)?, self.parsed("rho", 0.999)?)?))
            }
            "gamma-product" => {
                self.check_keys(&["dim"])?;
                Ok(Box::new(GammaProduct::new(self.parsed("dim", 2)?)?))
            }
            "eight-schools" => {
                self.check_keys(&["data"])?;
                let path = resolve(self.get("data").unwrap_or(DEFAULT_EIGHT_SCHOOLS_PATH));
                Ok(Box::new(EightSchools::new(EightSchoolsData::from_toml_file(path)?)?))
            }
            "german-credit" | "logistic-regression" => {
                self.check_keys(&["data", "data_seed"])?;
                let data = match self.get("data") {
                    Some(p) => load_regression_csv(resolve(p))?,
                    None => RegressionData::synthetic_credit(self.parsed("data_seed", DEFAULT_CREDIT_SEED)?),
                };
                Ok(Box::new(LogisticRegression::new(data).with_name(self.to_string())))
            }
            "gp-logged" | "gp-unlogged" => {
                self.check_keys(&["n", "data_seed"])?;
                let data = GpData::synthetic(self.parsed("n", DEFAULT_GP_N)?, self.parsed("data_seed", DEFAULT_GP_SEED)?)?;
                Ok(Box::new(GpRegression::new(data, self.name == "gp-logged")))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown target `{other}` (expected correlated-gaussian, gamma-product, eight-schools, \
                 german-credit, logistic-regression, gp-logged or gp-unlogged)"
            ))),
        }
    }
}

/// How each cell is summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorChoice {
    WorstCoordinate,
    Function(Monitored),
}

impl std::str::FromStr for MonitorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst" => Ok(MonitorChoice::WorstCoordinate),
            other => other.parse().map(MonitorChoice::Function),
        }
    }
}

impl MonitorChoice {
    pub fn report(&self, chain: &crate::chain::Chain, burn_in: f64) -> Result<EfficiencyReport> {
        match self {
            MonitorChoice::WorstCoordinate => worst_coordinate_report(chain, burn_in),
            MonitorChoice::Function(m) => efficiency_report(chain, *m, burn_in),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    targets: Vec<String>,
    samplers: Vec<String>,
    shrink_rank_grid: Option<Vec<f64>>,
    adaptive_metropolis_grid: Option<Vec<f64>>,
    n_iterations: usize,
    seed: u64,
    output: Option<PathBuf>,
    burn_in: Option<f64>,
    monitored: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerGrid {
    pub sampler: String,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPlan {
    pub targets: Vec<TargetSpec>,
    pub samplers: Vec<SamplerGrid>,
    pub n_iterations: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub burn_in: f64,
    pub monitored: MonitorChoice,
    /// Directory that relative data paths resolve against.
    pub base_dir: PathBuf,
}

impl BenchmarkPlan {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let file: PlanFile = toml::from_str(text).map_err(|e| Error::Parse(format!("plan file: {e}")))?;
        let targets = file.targets.iter().map(|t| t.parse()).collect::<Result<Vec<TargetSpec>>>()?;
        let mut samplers = Vec::new();
        for id in &file.samplers {
            let grid = match id.as_str() {
                "shrink-rank" => file.shrink_rank_grid.clone(),
                "adaptive-metropolis" => file.adaptive_metropolis_grid.clone(),
                other => return Err(Error::Parse(format!("plan file: unknown sampler `{other}`"))),
            }
            .unwrap_or_else(default_grid);
            samplers.push(SamplerGrid { sampler: id.clone(), grid });
        }
        let plan = Self {
            targets,
            samplers,
            n_iterations: file.n_iterations,
            seed: file.seed,
            output: file.output,
            burn_in: file.burn_in.unwrap_or(DEFAULT_BURN_IN),
            monitored: file.monitored.as_deref().unwrap_or("worst").parse()?,
            base_dir: base_dir.to_owned(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("plan: {m}")));
        if self.targets.is_empty() {
            return bad("no targets");
        }
        if self.samplers.is_empty() {
            return bad("no samplers");
        }
        if self.samplers.iter().any(|s| s.grid.is_empty()) {
            return bad("empty tuning grid");
        }
        if self.samplers.iter().flat_map(|s| &s.grid).any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("tuning values must be positive and finite");
        }
        if self.n_iterations < MIN_BENCH_ITERATIONS {
            return bad(&format!("n_iterations must be at least {MIN_BENCH_ITERATIONS}"));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return bad("burn_in must lie in [0, 1)");
        }
        Ok(())
    }

    /// Cells in output order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for target in &self.targets {
            for s in &self.samplers {
                for &tuning in &s.grid {
                    cells.push(Cell { index: cells.len(), target: target.clone(), sampler: s.sampler.clone(), tuning });
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub target: TargetSpec,
    pub sampler: String,
    pub tuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    Inestimable,
    MaxCrumbs,
    Error,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Inestimable => "inestimable",
            CellStatus::MaxCrumbs => "max-crumbs",
            CellStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub status: CellStatus,
    pub n_iterations: usize,
    pub total_density_evals: u64,
    pub total_grad_evals: u64,
    pub mean_crumbs: f64,
    pub report: Option<EfficiencyReport>,
    pub message: String,
}

/// Runs one chain for a cell and summarizes it. Failures are captured in
/// the status, never propagated.
pub fn run_cell(plan: &BenchmarkPlan, cell: &Cell) -> CellResult {
    let mut result = CellResult {
        cell: cell.clone(),
        status: CellStatus::Error,
        n_iterations: plan.n_iterations,
        total_density_evals: 0,
        total_grad_evals: 0,
        mean_crumbs: 0.0,
        report: None,
        message: String::new(),
    };
    let setup = cell
        .target
        .build(&plan.base_dir)
        .and_then(|t| SamplerConfig::from_id(&cell.sampler, cell.tuning).map(|s| (t, s)));
    let (target, sampler) = match setup {
        Ok(v) => v,
        Err(e) => {
            result.message = e.to_string();
            return result;
        }
    };
    let mut src = SeededSource::stream(plan.seed, cell.index as u64);
    let chain = match run_chain(&sampler, target.as_ref(), &target.initial_point(), plan.n_iterations, &mut src) {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.root(), Error::MaxCrumbs { .. }) {
                result.status = CellStatus::MaxCrumbs;
            }
            result.message = e.to_string();
            return result;
        }
    };
    result.total_density_evals = chain.total_density_evals();
    result.total_grad_evals = chain.total_grad_evals();
    result.mean_crumbs = chain.mean_crumbs();
    match plan.monitored.report(&chain, plan.burn_in) {
        Ok(r) => {
            result.status = CellStatus::Ok;
            result.report = Some(r);
        }
        Err(e @ Error::Inestimable(_)) => {
            result.status = CellStatus::Inestimable;
            result.message = e.to_string();
        }
        Err(e) => result.message = e.to_string(),
    }
    result
}

pub use rayon::ThreadPool;

/// A worker pool of `threads` threads for [`run_benchmark`].
pub fn thread_pool(threads: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))
}

/// Runs every cell on the current rayon pool; results are in cell order.
pub fn run_benchmark(plan: &BenchmarkPlan) -> Vec<CellResult> {
    plan.cells().par_iter().map(|cell| run_cell(plan, cell)).collect()
}

pub const RESULTS_HEADER: &str = "target,sampler,tuning,status,n_iterations,total_density_evals,total_grad_evals,\
mean_crumbs,monitored,tau,tau_lo,tau_hi,ess,evals_per_indep_obs,evals_lo,evals_hi,message";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn results_csv(results: &[CellResult]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},",
            csv_field(&r.cell.target.to_string()),
            r.cell.sampler,
            r.cell.tuning,
            r.status.as_str(),
            r.n_iterations,
            r.total_density_evals,
            r.total_grad_evals,
            r.mean_crumbs
        );
        match &r.report {
            Some(rep) => {
                let _ = write!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    rep.monitored,
                    rep.tau,
                    rep.tau_ci.0,
                    rep.tau_ci.1,
                    rep.ess,
                    rep.evals_per_indep_obs,
                    rep.evals_ci.0,
                    rep.evals_ci.1
                );
            }
            None => out.push_str(",,,,,,,"),
        }
        out.push(',');
        out.push_str(&csv_field(&r.message));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> PathBuf {
        PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
    }

    #[test]
    fn default_grid_is_geometric() {
        let g = default_grid();
        assert_eq!(g.len(), 9);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[8] - 100.0).abs() < 1e-12);
        assert!((g[4] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn target_spec_round_trip() {
        let spec: TargetSpec = "correlated-gaussian:dim=4,rho=0.999".parse().unwrap();
        assert_eq!(spec.name, "correlated-gaussian");
        assert_eq!(spec.to_string(), "correlated-gaussian:dim=4,rho=0.999");
        assert_eq!("gamma-product".parse::<TargetSpec>().unwrap(), TargetSpec::new("gamma-product"));
        assert!("gamma-product:dim".parse::<TargetSpec>().is_err());
    }

    #[test]
    fn builds_every_target() {
        for (spec, dim) in [
            ("correlated-gaussian", 4),
            ("gamma-product:dim=20", 20),
            ("eight-schools", 10),
            ("german-credit", 25),
            ("gp-logged", 3),
            ("gp-unlogged:n=10", 3),
        ] {
            let t = spec.parse::<TargetSpec>().unwrap().build(&base()).unwrap();
            assert_eq!(t.dim(), dim, "{spec}");
            assert!(t.log_density(&t.initial_point()).is_finite(), "{spec}");
        }
        assert!("nosuch".parse::<TargetSpec>().unwrap().build(&base()).is_err());
        assert!("gamma-product:rho=1".parse::<TargetSpec>().unwrap().build(&base()).is_err());
    }

    #[test]
    fn plan_parsing_and_cardinality() {
        let text = r#"
            targets = ["gamma-product:dim=2", "correlated-gaussian:dim=2,rho=0.5"]
            samplers = ["shrink-rank", "adaptive-metropolis"]
            shrink_rank_grid = [0.1, 0.3, 1.0, 3.0, 10.0]
            adaptive_metropolis_grid = [0.1, 0.3, 1.0, 3.0, 10.0]
            n_iterations = 1000
            seed = 5
        "#;
        let plan = BenchmarkPlan::parse(text, &base()).unwrap();
        assert_eq!(plan.cells().len(), 20);
        assert_eq!(plan.monitored, MonitorChoice::WorstCoordinate);
        assert_eq!(plan.burn_in, DEFAULT_BURN_IN);
    }

    #[test]
    fn plan_validation() {
        let ok = "targets=[\"gamma-product\"]\nsamplers=[\"shrink-rank\"]\nn_iterations=1000\nseed=1\n";
        let plan = BenchmarkPlan::parse(ok, &base()).unwrap();
        assert_eq!(plan.samplers[0].grid, default_grid());
        for bad in [
            "targets=[]\nsamplers=[\"shrink-rank\"]\nn_iterations=1000\nseed=1\n",
            "targets=[\"gamma-product\"]\nsamplers=[]\nn_iterations=1000\nseed=1\n",
            "targets=[\"gamma-product\"]\nsamplers=[\"shrink-rank\"]\nn_iterations=999\nseed=1\n",
            "targets=[\"gamma-product\"]\nsamplers=[\"t-walk\"]\nn_iterations=1000\nseed=1\n",
            "targets=[\"gamma-product\"]\nsamplers=[\"shrink-rank\"]\nshrink_rank_grid=[]\nn_iterations=1000\nseed=1\n",
            "targets=[\"gamma-product\"]\nsamplers=[\"shrink-rank\"]\nn_iterations=1000\nseed=1\nextra=2\n",
        ] {
            assert!(BenchmarkPlan::parse(bad, &base()).is_err(), "accepted {bad}");
        }
    }

    #[test]
    fn failing_cells_are_isolated() {
        let text = r#"
            targets = ["gamma-product:dim=2", "nosuch"]
            samplers = ["shrink-rank"]
            shrink_rank_grid = [1.0]
            n_iterations = 2000
            seed = 3
        "#;
        let results = run_benchmark(&BenchmarkPlan::parse(text, &base()).unwrap());
        assert_eq!(results.len(), 2);
        assert_eq!(results[0].status, CellStatus::Ok);
        assert_eq!(results[1].status, CellStatus::Error);
        let csv = results_csv(&results);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().starts_with("nosuch,shrink-rank,1,error,"));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
