//! Flag and config-file handling. The JSON config carries the same keys as
//! the flags; flags override the file.

use clap::{Args, Parser, Subcommand};
use orlicz_lab::SearchConfig;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "orlicz-lab",
    version,
    about = "Numerical convex analysis: Legendre transforms, subgradient selections, \
             Young/Delta-2 diagnostics, and Luxemburg/Orlicz norms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the Legendre transform of a scalar function on a grid
    Legendre(CommonArgs),
    /// Subgradient selections with certificates at a point
    Subgrad(CommonArgs),
    /// Young function tables (Phi, Psi, R) and the Delta-2 diagnostic
    Delta2(CommonArgs),
    /// Luxemburg and Orlicz norms of a vector field from a JSON input file
    Norms(CommonArgs),
    /// Mixture and convolution concavity trials for the Luxemburg functional
    Mixture(CommonArgs),
    /// Named verification suites over the function registry
    Verify(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Legendre(_) => "legendre",
            Command::Subgrad(_) => "subgrad",
            Command::Delta2(_) => "delta2",
            Command::Norms(_) => "norms",
            Command::Mixture(_) => "mixture",
            Command::Verify(_) => "verify",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Legendre(a)
            | Command::Subgrad(a)
            | Command::Delta2(a)
            | Command::Norms(a)
            | Command::Mixture(a)
            | Command::Verify(a) => a,
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Profile text (e.g. "pow(r,2)*max(r,1)") or a registry name (e.g. pow2)
    #[arg(long)]
    pub func: Option<String>,

    /// Registry name; alias of --func for registry lookups
    #[arg(long)]
    pub registry: Option<String>,

    /// Ambient dimension
    #[arg(long)]
    pub dim: Option<usize>,

    /// Norm for radial lifts: euclidean | ell_inf | ell_p:<p> | weighted:<w,..>
    #[arg(long)]
    pub norm: Option<String>,

    /// Master seed (recorded in every report)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Grid "start:stop:step" with inclusive endpoints within half a step
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// Number of random trials
    #[arg(long)]
    pub trials: Option<usize>,

    /// Comma-separated decreasing epsilon grid
    #[arg(long = "eps-grid", allow_hyphen_values = true)]
    pub eps_grid: Option<String>,

    /// Evaluation point "x1,x2,..."
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,

    /// Input path (JSON field document for `norms`)
    #[arg(long = "in")]
    pub input: Option<String>,

    /// Output path; stdout when omitted
    #[arg(long)]
    pub out: Option<String>,

    /// Output format
    #[arg(long, value_parser = ["json", "csv"])]
    pub format: Option<String>,

    /// Suite name for `verify`
    #[arg(long)]
    pub suite: Option<String>,

    /// JSON config file with the same keys as the flags; flags override it
    #[arg(long)]
    pub config: Option<String>,

    /// Record wall time in the report (off by default: timing breaks
    /// byte-for-byte determinism of outputs)
    #[arg(long = "emit-timing", default_value_t = false)]
    pub emit_timing: bool,
}

/// File form of a run configuration. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub func: Option<String>,
    pub registry: Option<String>,
    pub dim: Option<usize>,
    pub norm: Option<String>,
    pub seed: Option<u64>,
    pub grid: Option<String>,
    pub trials: Option<usize>,
    pub eps_grid: Option<String>,
    pub point: Option<String>,
    pub input: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub suite: Option<String>,
    pub search: Option<SearchConfig>,
}

/// Fully resolved run configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub func: Option<String>,
    pub dim: usize,
    pub norm: String,
    pub seed: u64,
    pub grid: Option<String>,
    pub trials: usize,
    pub eps_grid: Option<String>,
    pub point: Option<String>,
    pub input: Option<String>,
    pub format: String,
    pub suite: Option<String>,
    pub threads: usize,
    pub search: SearchConfig,
}

pub fn resolve(command: &Command) -> Result<(RunConfig, Option<String>), String> {
    let args = command.args();
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {path}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid config {path}: {e}"))?
        }
        None => FileConfig::default(),
    };

    let pick = |flag: &Option<String>, file_v: &Option<String>| -> Option<String> {
        flag.clone().or_else(|| file_v.clone())
    };

    let func = pick(&args.func, &file.func)
        .or_else(|| pick(&args.registry, &file.registry));
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let mut search = file.search.unwrap_or_default();
    search.seed = seed;

    let threads = std::env::var("ORLICZ_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n >= 1)
        .unwrap_or(1);

    let run = RunConfig {
        command: command.name().to_string(),
        func,
        dim: args.dim.or(file.dim).unwrap_or(1),
        norm: pick(&args.norm, &file.norm).unwrap_or_else(|| "euclidean".into()),
        seed,
        grid: pick(&args.grid, &file.grid),
        trials: args.trials.or(file.trials).unwrap_or(20),
        eps_grid: pick(&args.eps_grid, &file.eps_grid),
        point: pick(&args.point, &file.point),
        input: pick(&args.input, &file.input),
        format: pick(&args.format, &file.format).unwrap_or_else(|| "json".into()),
        suite: pick(&args.suite, &file.suite),
        threads,
        search,
    };
    let out = pick(&args.out, &file.out);
    Ok((run, out))
}

/// Parses "start:stop:step" into inclusive grid points (endpoints within
/// half a step).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{text}` is not start:stop:step"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| "bad grid start".to_string())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| "bad grid stop".to_string())?;
    let step: f64 = parts[2].trim().parse().map_err(|_| "bad grid step".to_string())?;
    if !(step > 0.0) || stop < start {
        return Err(format!("grid `{text}` must have positive step and stop >= start"));
    }
    let mut points = Vec::new();
    let mut k = 0u64;
    loop {
        let x = start + step * k as f64;
        if x > stop + 0.5 * step {
            break;
        }
        points.push(x.min(stop));
        k += 1;
    }
    Ok(points)
}

pub fn parse_point(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad coordinate `{s}`"))
        })
        .collect()
}

pub fn parse_eps_grid(text: &str) -> Result<Vec<f64>, String> {
    let eps: Result<Vec<f64>, String> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad epsilon `{s}`"))
        })
        .collect();
    let eps = eps?;
    if eps.is_empty() || eps.windows(2).any(|w| w[0] <= w[1]) || eps.iter().any(|e| *e <= 0.0) {
        return Err("eps grid must be positive and strictly decreasing".into());
    }
    Ok(eps)
}
