//! Command-line front end: parse a subcommand, route it through the library,
//! write the artifact, and map failures to exit codes (0 success, 2 malformed
//! input, 3 numeric/stage failure).

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skelscan::baselines::{fit_pca, fit_regression_line};
use skelscan::geometry::Dataset;
use skelscan::gridscan::{coverage_report, density_table, threshold_k, DensityOpts, NodeMode};
use skelscan::pipeline::{
    emit_report, parse_points_csv, points_to_csv, run_pipeline, ChainMode, OutputFormat,
    RunConfig, TABLE_HEAD,
};
use skelscan::synth::{generate, SynthKind, SynthSpec};
use skelscan::tuning::{adapt_radius, adapt_threshold, TuneBounds};
use skelscan::Error;

#[derive(Parser)]
#[command(
    name = "skelscan",
    about = "Find low-dimensional skeletons that dense regions of a point cloud trace out",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the density table for a point cloud.
    Scan(ScanArgs),
    /// Extract a skeleton and emit it as JSON, OBJ, or plot CSV.
    Skeleton(SkeletonArgs),
    /// Search for a threshold (or grid step) whose retained-ball count lands
    /// in a target range.
    Tune(TuneArgs),
    /// Reference fits: regression line or PCA frame.
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Generate a synthetic dataset with planted structure.
    Generate(GenerateArgs),
    /// Run the full scan -> threshold -> chain -> metrics pipeline.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct InputArg {
    /// Points CSV; '-' or omitted reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl InputArg {
    fn read(&self) -> io::Result<String> {
        match &self.input {
            Some(p) if p.as_os_str() != "-" => fs::read_to_string(p),
            _ => {
                let mut buf = String::new();
                io::stdin().read_to_string(&mut buf)?;
                Ok(buf)
            }
        }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Output path; omitted writes stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArg {
    fn write(&self, bytes: &[u8]) -> io::Result<()> {
        match &self.output {
            Some(p) => fs::write(p, bytes),
            None => io::stdout().write_all(bytes),
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArg,
    /// Grid step.
    #[arg(long)]
    r: f64,
    /// Counting radius as a multiple of r.
    #[arg(long, default_value_t = 1.0)]
    radius_scale: f64,
    /// Report the threshold cut and point coverage for this count threshold.
    #[arg(long)]
    nu: Option<usize>,
    /// Scan every grid node in the bounding box (dimension <= 3).
    #[arg(long)]
    dense_nodes: bool,
    /// Emit the whole table instead of the top 1000 rows.
    #[arg(long)]
    full_table: bool,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct SkeletonArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    nu: usize,
    #[arg(long, default_value_t = 1.0)]
    radius_scale: f64,
    #[arg(long, value_enum, default_value_t = ChainMode::Greedy)]
    chain_mode: ChainMode,
    /// Component-splitting gap as a multiple of r (greedy mode).
    #[arg(long, default_value_t = 3.0)]
    gap_factor: f64,
    /// Simplex dimension: 1 = segments, 2 = triangles, ...
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Obj)]
    format: OutputFormat,
    #[arg(long)]
    dense_nodes: bool,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    input: InputArg,
    /// Starting threshold; tunes nu over a fixed grid step --r.
    #[arg(long, conflicts_with = "r0", requires = "r")]
    nu0: Option<usize>,
    /// Starting grid step; tunes r under a fixed threshold --nu.
    #[arg(long, conflicts_with = "nu0", requires = "nu")]
    r0: Option<f64>,
    /// Grid step (with --nu0).
    #[arg(long)]
    r: Option<f64>,
    /// Count threshold (with --r0).
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    radius_scale: f64,
    #[arg(long, default_value_t = TuneBounds::DEFAULT_K_MIN)]
    k_min: usize,
    #[arg(long, default_value_t = TuneBounds::DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long, default_value_t = TuneBounds::DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Multiplicative step; defaults to 10 for nu, 2 for r.
    #[arg(long)]
    factor: Option<f64>,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Least-squares line through 2-D samples (vertical residuals).
    Regression(RegressionArgs),
    /// Principal directions of the dataset (perpendicular residuals).
    Pca(PcaArgs),
}

#[derive(Args)]
struct RegressionArgs {
    #[command(flatten)]
    input: InputArg,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct PcaArgs {
    #[command(flatten)]
    input: InputArg,
    /// Number of principal directions.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct GenerateArgs {
    /// line, polyline-curve, plane, or clusters.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    dim: usize,
    /// Points on the planted structure.
    #[arg(long)]
    structured: usize,
    /// Uniform background points.
    #[arg(long, default_value_t = 0)]
    background: usize,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    box_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    box_max: f64,
    /// Cluster count (kind = clusters).
    #[arg(long, default_value_t = 1)]
    clusters: usize,
    #[command(flatten)]
    output: OutputArg,
    /// Side file for the noiseless anchor points.
    #[arg(long)]
    truth_output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    nu: usize,
    #[arg(long, default_value_t = 1.0)]
    radius_scale: f64,
    #[arg(long, default_value_t = 3.0)]
    gap_factor: f64,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, value_enum, default_value_t = ChainMode::Greedy)]
    chain_mode: ChainMode,
    /// Tune the threshold (starting from --nu) before chaining.
    #[arg(long)]
    tune: bool,
    #[arg(long, default_value_t = TuneBounds::DEFAULT_K_MIN)]
    k_min: usize,
    #[arg(long, default_value_t = TuneBounds::DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long, default_value_t = TuneBounds::DEFAULT_MAX_STEPS)]
    max_steps: usize,
    #[arg(long, default_value_t = TuneBounds::THRESHOLD_FACTOR)]
    factor: f64,
    #[arg(long)]
    dense_nodes: bool,
    #[arg(long)]
    full_table: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(flatten)]
    output: OutputArg,
    /// Print per-stage wall-clock timings to stderr.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure {
            code: if e.is_input_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn load(input: &InputArg) -> Result<Dataset, Failure> {
    Ok(parse_points_csv(&input.read()?)?)
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Scan(args) => {
            let ds = load(&args.input)?;
            let opts = DensityOpts {
                radius_scale: args.radius_scale,
                node_mode: if args.dense_nodes {
                    NodeMode::Dense
                } else {
                    NodeMode::Candidates
                },
                workers: 0,
            };
            let table = density_table(&ds, args.r, &opts)?;
            let head = if args.full_table {
                table.len()
            } else {
                table.len().min(TABLE_HEAD)
            };
            let cut = match args.nu {
                Some(nu) => {
                    let k = threshold_k(&table, nu);
                    let (covered, uncovered) = coverage_report(&ds, &table, k)?;
                    serde_json::json!({
                        "nu": nu, "k": k, "covered": covered, "uncovered": uncovered,
                    })
                }
                None => serde_json::Value::Null,
            };
            let doc = serde_json::json!({
                "r": args.r,
                "radius": table.radius(),
                "table_len": table.len(),
                "table": table.entries()[..head],
                "threshold": cut,
            });
            args.output.write(&json_bytes(&doc))?;
            Ok(())
        }
        Command::Skeleton(args) => {
            let ds = load(&args.input)?;
            let config = RunConfig {
                radius_scale: args.radius_scale,
                gap_factor: args.gap_factor,
                s: args.s,
                chain_mode: args.chain_mode,
                dense_nodes: args.dense_nodes,
                format: args.format,
                ..RunConfig::new(args.r, args.nu)
            };
            let report = run_pipeline(&config, &ds)?;
            let emitted = emit_report(&report, args.format)?;
            if let Some(w) = &emitted.warning {
                eprintln!("warning: {w}");
            }
            args.output.write(&emitted.bytes)?;
            Ok(())
        }
        Command::Tune(args) => {
            let ds = load(&args.input)?;
            let bytes = match (args.nu0, args.r0) {
                (Some(nu0), None) => {
                    let r = args.r.expect("clap enforces --r with --nu0");
                    let bounds = TuneBounds {
                        k_min: args.k_min,
                        k_max: args.k_max,
                        max_steps: args.max_steps,
                        factor: args.factor.unwrap_or(TuneBounds::THRESHOLD_FACTOR),
                    };
                    let opts = DensityOpts {
                        radius_scale: args.radius_scale,
                        ..DensityOpts::default()
                    };
                    let table = density_table(&ds, r, &opts)?;
                    let tuned = adapt_threshold(&table, nu0, &bounds)?;
                    json_bytes(&serde_json::json!({ "target": "nu", "result": tuned }))
                }
                (None, Some(r0)) => {
                    let nu = args.nu.expect("clap enforces --nu with --r0");
                    let bounds = TuneBounds {
                        k_min: args.k_min,
                        k_max: args.k_max,
                        max_steps: args.max_steps,
                        factor: args.factor.unwrap_or(TuneBounds::RADIUS_FACTOR),
                    };
                    let tuned = adapt_radius(&ds, r0, nu, args.radius_scale, &bounds)?;
                    json_bytes(&serde_json::json!({ "target": "r", "result": tuned }))
                }
                _ => {
                    return Err(Failure {
                        code: 2,
                        message: "pass exactly one of --nu0 (with --r) or --r0 (with --nu)".into(),
                    })
                }
            };
            args.output.write(&bytes)?;
            Ok(())
        }
        Command::Baseline(BaselineCommand::Regression(args)) => {
            let ds = load(&args.input)?;
            if ds.dim() != 2 {
                return Err(Failure {
                    code: 2,
                    message: format!("regression expects 2-D samples, got dim={}", ds.dim()),
                });
            }
            let samples: Vec<(f64, f64)> = ds
                .points()
                .iter()
                .map(|p| (p.coords()[0], p.coords()[1]))
                .collect();
            let line = fit_regression_line(&samples)?;
            args.output.write(&json_bytes(&line))?;
            Ok(())
        }
        Command::Baseline(BaselineCommand::Pca(args)) => {
            let ds = load(&args.input)?;
            let frame = fit_pca(&ds, args.k)?;
            args.output.write(&json_bytes(&frame))?;
            Ok(())
        }
        Command::Generate(args) => {
            let spec = SynthSpec {
                kind: SynthKind::parse(&args.kind, args.clusters)?,
                dim: args.dim,
                structured: args.structured,
                background: args.background,
                noise_sigma: args.noise_sigma,
                seed: args.seed,
                box_min: args.box_min,
                box_max: args.box_max,
            };
            let (ds, truth) = generate(&spec)?;
            args.output.write(points_to_csv(ds.points()).as_bytes())?;
            if let Some(path) = &args.truth_output {
                fs::write(path, points_to_csv(&truth))?;
            }
            Ok(())
        }
        Command::Pipeline(args) => {
            let ds = load(&args.input)?;
            let config = RunConfig {
                radius_scale: args.radius_scale,
                gap_factor: args.gap_factor,
                s: args.s,
                chain_mode: args.chain_mode,
                tune: args.tune.then_some(TuneBounds {
                    k_min: args.k_min,
                    k_max: args.k_max,
                    max_steps: args.max_steps,
                    factor: args.factor,
                }),
                dense_nodes: args.dense_nodes,
                full_table: args.full_table,
                format: args.format,
                ..RunConfig::new(args.r, args.nu)
            };
            let report = run_pipeline(&config, &ds)?;
            if args.timing {
                for (stage, ms) in &report.timing {
                    eprintln!("timing: {stage} {ms:.1} ms");
                }
            }
            let emitted = emit_report(&report, args.format)?;
            if let Some(w) = &emitted.warning {
                eprintln!("warning: {w}");
            }
            args.output.write(&emitted.bytes)?;
            Ok(())
        }
    }
}
