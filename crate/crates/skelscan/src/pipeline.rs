//! End-to-end orchestration: CSV ingestion, run configuration, the
//! scan -> threshold -> chain -> strip -> metrics pipeline, and report
//! serialization.
//!
//! Reports must be byte-identical for identical config and input, whatever
//! the worker count, so wall-clock timings are carried on the report struct
//! but never serialized; the binary prints them to stderr instead.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::geometry::{Dataset, Point};
use crate::gridscan::{
    coverage_report, density_table, threshold_k, DensityOpts, DensityTable, NodeMode, TableEntry,
};
use crate::skeleton::{chain_by_rank, chain_greedy, simplex_strip, vertex_coverage, Skeleton};
use crate::tuning::{adapt_threshold, ThresholdTune, TuneBounds};
use crate::{Error, Result};

/// How the retained centers are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMode {
    /// Rank order, exactly as the density table lists them.
    Rank,
    /// Greedy nearest-neighbor order with gap-based component splitting.
    Greedy,
}

/// Report/skeleton output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Obj,
    Csv,
}

fn default_radius_scale() -> f64 {
    1.0
}

fn default_gap_factor() -> f64 {
    3.0
}

fn default_s() -> usize {
    1
}

fn default_chain_mode() -> ChainMode {
    ChainMode::Greedy
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

/// Everything a pipeline run needs. Round-trips losslessly through JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Grid step.
    pub r: f64,
    /// Count threshold: balls with counts strictly above it are retained.
    pub nu: usize,
    #[serde(default = "default_radius_scale")]
    pub radius_scale: f64,
    #[serde(default = "default_gap_factor")]
    pub gap_factor: f64,
    /// Simplex dimension of the emitted strip.
    #[serde(default = "default_s")]
    pub s: usize,
    #[serde(default = "default_chain_mode")]
    pub chain_mode: ChainMode,
    /// When set, the threshold is tuned starting from `nu` before chaining.
    #[serde(default)]
    pub tune: Option<TuneBounds>,
    /// Scan every grid node in the bounding box instead of the candidate
    /// nodes; dimension <= 3 only.
    #[serde(default)]
    pub dense_nodes: bool,
    /// Emit the whole density table instead of the top 1000 rows.
    #[serde(default)]
    pub full_table: bool,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(r: f64, nu: usize) -> RunConfig {
        RunConfig {
            r,
            nu,
            radius_scale: default_radius_scale(),
            gap_factor: default_gap_factor(),
            s: default_s(),
            chain_mode: default_chain_mode(),
            tune: None,
            dense_nodes: false,
            full_table: false,
            input: None,
            output: None,
            format: default_format(),
        }
    }
}

/// Rows a report keeps from the density table unless `full_table` is set.
pub const TABLE_HEAD: usize = 1000;

/// Parse strict points CSV: every non-empty, non-`#` line must hold exactly N
/// comma-separated finite numbers, N fixed by the first data line. Any
/// malformed field aborts with its line (and column) rather than silently
/// dropping rows, because dropped rows corrupt the density counts downstream.
pub fn parse_points_csv(text: &str) -> Result<Dataset> {
    let mut points: Vec<Point> = Vec::new();
    let mut width: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if let Some(w) = width {
            if fields.len() != w {
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected: w,
                    found: fields.len(),
                });
            }
        } else {
            width = Some(fields.len());
        }
        let mut coords = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let trimmed = field.trim();
            match trimmed.parse::<f64>() {
                Ok(v) if v.is_finite() => coords.push(v),
                _ => {
                    return Err(Error::BadNumber {
                        line: line_no,
                        col: col + 1,
                        text: trimmed.to_string(),
                    })
                }
            }
        }
        points.push(Point::new(coords)?);
    }
    if points.is_empty() {
        return Err(Error::NoDataRows);
    }
    Dataset::new(points)
}

/// Serialize points as CSV, one row per point. Rust's shortest round-trip
/// float formatting keeps re-parsing exact.
pub fn points_to_csv(points: &[Point]) -> String {
    let mut out = String::new();
    for p in points {
        let row: Vec<String> = p.coords().iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Skeleton plus the ball count behind each vertex.
#[derive(Debug, Clone, Serialize)]
pub struct SkeletonReport {
    #[serde(flatten)]
    pub skeleton: Skeleton,
    /// Density count of the node each vertex came from, in vertex order.
    pub vertex_counts: Vec<usize>,
}

/// Headline numbers of a run.
#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    /// Fraction of dataset points within the counting radius of a vertex.
    pub vertex_coverage: f64,
    pub covered: usize,
    pub uncovered: usize,
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub r: f64,
    pub radius: f64,
    /// Threshold actually applied (post-tuning when tuning ran).
    pub nu: usize,
    pub k: usize,
    pub s: usize,
    pub chain_mode: ChainMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuned: Option<ThresholdTune>,
    pub table_len: usize,
    /// Leading table rows (all of them under `full_table`).
    pub table: Vec<TableEntry>,
    pub skeleton: SkeletonReport,
    pub metrics: Metrics,
    /// Wall-clock milliseconds per stage; reported on stderr by the CLI and
    /// deliberately excluded from serialized output.
    #[serde(skip)]
    pub timing: Vec<(&'static str, f64)>,
}

fn stage<T>(name: &'static str, result: Result<T>) -> Result<T> {
    result.map_err(|e| e.in_stage(name))
}

/// Run scan -> (optional tuning) -> threshold -> chain -> strip -> metrics.
pub fn run_pipeline(config: &RunConfig, dataset: &Dataset) -> Result<RunReport> {
    let mut timing: Vec<(&'static str, f64)> = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |timing: &mut Vec<(&'static str, f64)>, name: &'static str| {
        timing.push((name, clock.elapsed().as_secs_f64() * 1e3));
        clock = Instant::now();
    };

    if dataset.is_empty() {
        return Err(Error::EmptyDataset.in_stage("scan"));
    }
    let opts = DensityOpts {
        radius_scale: config.radius_scale,
        node_mode: if config.dense_nodes {
            NodeMode::Dense
        } else {
            NodeMode::Candidates
        },
        workers: 0,
    };
    let table = stage("scan", density_table(dataset, config.r, &opts))?;
    lap(&mut timing, "scan");

    let (nu, tuned) = match &config.tune {
        Some(bounds) => {
            let t = stage("tune", adapt_threshold(&table, config.nu, bounds))?;
            (t.nu, Some(t))
        }
        None => (config.nu, None),
    };
    let k = threshold_k(&table, nu);
    lap(&mut timing, "threshold");

    let chain = stage(
        "chain",
        match config.chain_mode {
            ChainMode::Rank => chain_by_rank(&table, k),
            ChainMode::Greedy => {
                chain_greedy(&table.top_centers(k), Some(config.gap_factor), config.r)
            }
        },
    )?;
    let skel = stage("strip", simplex_strip(&chain, config.s))?;
    lap(&mut timing, "chain");

    let coverage = stage("metrics", vertex_coverage(dataset, &skel, table.radius()))?;
    let (covered, uncovered) = stage("metrics", coverage_report(dataset, &table, k))?;
    lap(&mut timing, "metrics");

    let vertex_counts = counts_for_vertices(&table, &skel);
    let head = if config.full_table {
        table.len()
    } else {
        table.len().min(TABLE_HEAD)
    };
    Ok(RunReport {
        r: config.r,
        radius: table.radius(),
        nu,
        k,
        s: config.s,
        chain_mode: config.chain_mode,
        tuned,
        table_len: table.len(),
        table: table.entries()[..head].to_vec(),
        skeleton: SkeletonReport {
            skeleton: skel,
            vertex_counts,
        },
        metrics: Metrics {
            vertex_coverage: coverage,
            covered,
            uncovered,
        },
        timing,
    })
}

/// Vertices are clones of table centers, so an exact bit-level lookup
/// recovers each vertex's count even after greedy reordering.
fn counts_for_vertices(table: &DensityTable, skel: &Skeleton) -> Vec<usize> {
    use std::collections::HashMap;
    let by_bits: HashMap<Vec<u64>, usize> = table
        .entries()
        .iter()
        .map(|e| {
            (
                e.center.coords().iter().map(|c| c.to_bits()).collect(),
                e.count,
            )
        })
        .collect();
    skel.vertices()
        .iter()
        .map(|v| {
            let bits: Vec<u64> = v.coords().iter().map(|c| c.to_bits()).collect();
            *by_bits.get(&bits).unwrap_or(&0)
        })
        .collect()
}

/// Serialized report plus a warning for the caller to surface, if any.
pub struct Emitted {
    pub bytes: Vec<u8>,
    pub warning: Option<String>,
}

/// Serialize a report. JSON is canonical (fixed key order, shortest
/// round-trip floats); OBJ covers s <= 2 and falls back to JSON with a
/// warning above that; CSV lists one vertex per row for plotting.
pub fn emit_report(report: &RunReport, format: OutputFormat) -> Result<Emitted> {
    match format {
        OutputFormat::Json => Ok(Emitted {
            bytes: report_json(report)?,
            warning: None,
        }),
        OutputFormat::Obj => {
            if report.skeleton.skeleton.dim_s() > 2 {
                return Ok(Emitted {
                    bytes: report_json(report)?,
                    warning: Some(format!(
                        "OBJ cannot express s = {} simplices; emitting JSON instead",
                        report.skeleton.skeleton.dim_s()
                    )),
                });
            }
            Ok(Emitted {
                bytes: skeleton_obj(&report.skeleton.skeleton).into_bytes(),
                warning: None,
            })
        }
        OutputFormat::Csv => Ok(Emitted {
            bytes: skeleton_csv(&report.skeleton).into_bytes(),
            warning: None,
        }),
    }
}

fn report_json(report: &RunReport) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| Error::InvalidParam {
        name: "report",
        reason: e.to_string(),
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// OBJ-style text: `v` per vertex, `l` per segment, `f` per triangle
/// (1-based indices).
pub fn skeleton_obj(skel: &Skeleton) -> String {
    let mut out = String::new();
    for v in skel.vertices() {
        out.push('v');
        for c in v.coords() {
            out.push(' ');
            out.push_str(&c.to_string());
        }
        out.push('\n');
    }
    let tag = if skel.dim_s() == 1 { 'l' } else { 'f' };
    for simplex in skel.simplices() {
        out.push(tag);
        for &i in simplex {
            out.push(' ');
            out.push_str(&(i + 1).to_string());
        }
        out.push('\n');
    }
    out
}

/// Plot-ready CSV: header, then one row of `index, coordinates..., count`
/// per vertex.
pub fn skeleton_csv(skel: &SkeletonReport) -> String {
    let dim = skel
        .skeleton
        .vertices()
        .first()
        .map_or(0, |v| v.coords().len());
    let mut out = String::from("index");
    for i in 0..dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",count\n");
    for (i, (v, count)) in skel
        .skeleton
        .vertices()
        .iter()
        .zip(&skel.vertex_counts)
        .enumerate()
    {
        out.push_str(&i.to_string());
        for c in v.coords() {
            out.push(',');
            out.push_str(&c.to_string());
        }
        out.push_str(&format!(",{count}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cluster_csv() -> String {
        let mut s = String::new();
        for _ in 0..5 {
            s.push_str("0.0,0.0\n");
        }
        for _ in 0..2 {
            s.push_str("10.0,0.0\n");
        }
        s
    }

    #[test]
    fn parses_plain_rows() {
        let ds = parse_points_csv("0.5,1.0\n2.0,3.5").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.point(0).coords(), &[0.5, 1.0]);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let ds = parse_points_csv("# header\n\n1,2,3\n").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.dim(), 3);
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = parse_points_csv("1,2\n3").unwrap_err();
        match err {
            Error::RaggedRow {
                line,
                expected,
                found,
            } => {
                assert_eq!((line, expected, found), (2, 2, 1));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn bad_number_reports_line_and_column() {
        let err = parse_points_csv("1,2\n3,abc").unwrap_err();
        match err {
            Error::BadNumber { line, col, text } => {
                assert_eq!((line, col), (2, 2));
                assert_eq!(text, "abc");
            }
            other => panic!("unexpected error {other}"),
        }
        assert!(parse_points_csv("1,inf").is_err());
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(parse_points_csv(""), Err(Error::NoDataRows)));
        assert!(matches!(
            parse_points_csv("# only comments\n"),
            Err(Error::NoDataRows)
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let spec = crate::synth::SynthSpec {
            kind: crate::synth::SynthKind::Line,
            dim: 5,
            structured: 200,
            background: 100,
            noise_sigma: 0.1,
            seed: 424242,
            box_min: -3.0,
            box_max: 3.0,
        };
        let (ds, _) = crate::synth::generate(&spec).unwrap();
        let csv = points_to_csv(ds.points());
        let back = parse_points_csv(&csv).unwrap();
        assert_eq!(back.len(), ds.len());
        for (p, q) in ds.points().iter().zip(back.points()) {
            for (a, b) in p.coords().iter().zip(q.coords()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut config = RunConfig::new(0.37, 41);
        config.tune = Some(TuneBounds::for_threshold());
        config.input = Some(PathBuf::from("points.csv"));
        config.format = OutputFormat::Obj;
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        let json2 = serde_json::to_string(&back).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn config_defaults_fill_in() {
        let config: RunConfig = serde_json::from_str(r#"{"r": 1.0, "nu": 3}"#).unwrap();
        assert_eq!(config.radius_scale, 1.0);
        assert_eq!(config.gap_factor, 3.0);
        assert_eq!(config.s, 1);
        assert_eq!(config.chain_mode, ChainMode::Greedy);
        assert!(config.tune.is_none());
    }

    #[test]
    fn pipeline_on_two_clusters() {
        let ds = parse_points_csv(&two_cluster_csv()).unwrap();
        let config = RunConfig::new(1.0, 1);
        let report = run_pipeline(&config, &ds).unwrap();
        assert_eq!(report.k, 2);
        assert_eq!(report.skeleton.skeleton.vertices().len(), 2);
        assert_eq!(report.metrics.vertex_coverage, 1.0);
        assert_eq!(report.metrics.covered, 7);
        assert_eq!(report.skeleton.vertex_counts, vec![5, 2]);
    }

    #[test]
    fn pipeline_rejects_empty_dataset_in_scan() {
        let config = RunConfig::new(1.0, 1);
        let err = run_pipeline(&config, &Dataset::empty(2)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("scan:"), "{msg}");
        assert!(msg.contains("empty dataset"), "{msg}");
    }

    #[test]
    fn json_emission_is_deterministic() {
        let ds = parse_points_csv(&two_cluster_csv()).unwrap();
        let config = RunConfig::new(1.0, 1);
        let report = run_pipeline(&config, &ds).unwrap();
        let a = emit_report(&report, OutputFormat::Json).unwrap();
        let b = emit_report(&report, OutputFormat::Json).unwrap();
        assert_eq!(a.bytes, b.bytes);
        assert!(a.warning.is_none());
    }

    #[test]
    fn obj_single_vertex() {
        let ds = parse_points_csv("0.0,0.0\n0.0,0.0\n").unwrap();
        let config = RunConfig::new(1.0, 1);
        let report = run_pipeline(&config, &ds).unwrap();
        let emitted = emit_report(&report, OutputFormat::Obj).unwrap();
        let text = String::from_utf8(emitted.bytes).unwrap();
        let v_lines = text.lines().filter(|l| l.starts_with("v ")).count();
        let l_lines = text.lines().filter(|l| l.starts_with("l ")).count();
        assert_eq!((v_lines, l_lines), (1, 0));
    }

    #[test]
    fn obj_falls_back_to_json_for_high_s() {
        let ds = parse_points_csv(
            "0,0\n0,0\n0,0\n1,0\n1,0\n1,0\n2,0\n2,0\n2,0\n3,0\n3,0\n3,0\n",
        )
        .unwrap();
        let mut config = RunConfig::new(1.0, 1);
        config.s = 3;
        let report = run_pipeline(&config, &ds).unwrap();
        let emitted = emit_report(&report, OutputFormat::Obj).unwrap();
        assert!(emitted.warning.is_some());
        assert!(serde_json::from_slice::<serde_json::Value>(&emitted.bytes).is_ok());
    }

    #[test]
    fn csv_has_header_plus_vertex_rows() {
        let ds = parse_points_csv(&two_cluster_csv()).unwrap();
        let config = RunConfig::new(1.0, 1);
        let report = run_pipeline(&config, &ds).unwrap();
        let emitted = emit_report(&report, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(emitted.bytes).unwrap();
        assert_eq!(
            text.lines().count(),
            report.skeleton.skeleton.vertices().len() + 1
        );
        assert!(text.starts_with("index,x0,x1,count\n"));
    }

    #[test]
    fn table_head_is_truncated_unless_full() {
        let mut rows = String::new();
        for i in 0..1500 {
            rows.push_str(&format!("{}.25,0.25\n", i * 3));
        }
        let ds = parse_points_csv(&rows).unwrap();
        let config = RunConfig {
            chain_mode: ChainMode::Rank,
            ..RunConfig::new(1.0, 0)
        };
        let report = run_pipeline(&config, &ds).unwrap();
        assert_eq!(report.table_len, 1500);
        assert_eq!(report.table.len(), TABLE_HEAD);

        let full = RunConfig {
            full_table: true,
            ..config
        };
        let report2 = run_pipeline(&full, &ds).unwrap();
        assert_eq!(report2.table.len(), 1500);
    }
}
