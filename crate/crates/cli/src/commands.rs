//! Subcommands: `detect`, `simulate`, `evaluate` and `features`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use lasa_core::features::{chain_features, ChainFeatures, RoughnessVector, SegmentFeatures, TransitionFeatures, Units};
use lasa_core::model::{cumulative_labels, log_posterior};
use lasa_core::sampler::{run_multi_chain, AcceptanceStats};
use lasa_core::sim::{ari, convex_hull_baseline, mcc_from_confusion, simulate, windowed_match, SimScenario};
use lasa_core::summaries::summarize;
use lasa_core::{Hyperparameters, LandmarkIndicator, PolygonalChain, SamplerConfig};
use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::{
    chain_csv, file_stem, fmt_opt, gamma_csv, read_chain, read_gamma, table_csv, write_atomic, write_json, LoadedChain,
};
use crate::manifest::{InputRecord, RunManifest};

pub const MANIFEST: &str = "manifest.json";
pub const SEGMENT_FEATURES: &str = "segment_features.csv";
pub const CHAIN_FEATURES: &str = "chain_features.csv";
pub const METRICS: &str = "metrics.csv";
pub const MEDIANS: &str = "medians.csv";

#[derive(Debug, Parser)]
#[command(
    name = "lasa",
    version,
    about = "Landmark detection and roughness features for closed polygonal chains"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect landmarks on one or more chains.
    Detect(DetectArgs),
    /// Generate synthetic noisy polygons with known landmarks.
    Simulate(SimulateArgs),
    /// Score landmark estimates against ground truth.
    Evaluate(EvaluateArgs),
    /// Compute roughness feature matrices.
    Features(FeaturesArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SamplerArgs {
    /// Iterations per chain [default: 100 x number of vertices].
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Fraction of each chain discarded as burn-in.
    #[arg(long, default_value_t = 0.5)]
    pub burnin: f64,

    /// Prior expected landmark count; also the initial landmark count.
    #[arg(long, default_value_t = 3)]
    pub k_hat: usize,

    #[arg(long, default_value_t = 3.0)]
    pub alpha_sigma: f64,

    /// [default: 1 / number of distinct vertices]
    #[arg(long)]
    pub beta_sigma: Option<f64>,

    /// Independent MCMC chains, run in parallel.
    #[arg(long, default_value_t = 4)]
    pub chains: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl SamplerArgs {
    fn resolve(&self, m: usize) -> Result<(Hyperparameters, SamplerConfig)> {
        let mut hyper = Hyperparameters::recommended(m, self.k_hat);
        hyper.alpha_sigma = self.alpha_sigma;
        if let Some(b) = self.beta_sigma {
            hyper.beta_sigma = b;
        }
        hyper.validate().map_err(|e| CliError::usage(e.to_string()))?;
        let mut config = SamplerConfig::for_chain_len(m, self.seed);
        if let Some(it) = self.iterations {
            config.iterations = it;
        }
        config.burnin_fraction = self.burnin;
        config.n_chains = self.chains;
        config.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok((hyper, config))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DetectArgs {
    /// Chain files (.csv or .json).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    #[command(flatten)]
    pub sampler: SamplerArgs,

    /// Also report the least-squares partition estimate (default).
    #[arg(long, overrides_with = "no_ppm")]
    pub ppm: bool,

    /// Skip the pairwise co-segmentation estimate.
    #[arg(long, overrides_with = "ppm")]
    pub no_ppm: bool,

    /// Significance level of the landmark credible intervals.
    #[arg(long, default_value_t = 0.05)]
    pub ci_alpha: f64,

    /// Windows of the radial roughness baseline.
    #[arg(long, value_delimiter = ',', default_value = "5,50,200")]
    pub tbr_window: Vec<usize>,

    /// Report distance features in input coordinates.
    #[arg(long)]
    pub raw_units: bool,

    #[arg(long, env = "LASA_OUT_DIR", default_value = "lasa-out")]
    pub out_dir: PathBuf,

    /// Resolve settings and write only the manifest.
    #[arg(long)]
    pub manifest_only: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// True number of landmarks (polygon corners).
    #[arg(long, default_value_t = 4)]
    pub k: usize,

    /// Chain size; each chain has n - 1 distinct vertices.
    #[arg(long, default_value_t = 140)]
    pub n: usize,

    /// Variance of the perpendicular displacements.
    #[arg(long, default_value_t = 0.5)]
    pub sigma2: f64,

    #[arg(long, default_value_t = 1)]
    pub replicates: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Use an equilateral polygon.
    #[arg(long)]
    pub equilateral: bool,

    #[arg(long, env = "LASA_OUT_DIR", default_value = "lasa-out")]
    pub out_dir: PathBuf,

    #[arg(long)]
    pub manifest_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    /// Landmark files `<name>.gamma.csv` from `--pred-dir`.
    Predicted,
    /// Convex-hull vertices of `<name>.csv` chains from `--chain-dir`.
    Hull,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    /// Folder of `<name>.truth.csv` ground-truth landmark files.
    #[arg(long)]
    pub truth_dir: PathBuf,

    #[arg(long, value_enum, default_value_t = EvalMethod::Predicted)]
    pub method: EvalMethod,

    #[arg(long)]
    pub pred_dir: Option<PathBuf>,

    #[arg(long)]
    pub chain_dir: Option<PathBuf>,

    /// Matching tolerance in vertices.
    #[arg(long, default_value_t = 5)]
    pub window: usize,

    #[arg(long, env = "LASA_OUT_DIR", default_value = "lasa-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(ArgGroup::new("landmarks").required(true).args(["landmark_dir", "detect"])))]
pub struct FeaturesArgs {
    /// Chain files (.csv or .json).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Folder holding `<name><suffix>` landmark files.
    #[arg(long)]
    pub landmark_dir: Option<PathBuf>,

    #[arg(long, default_value = ".gamma.csv")]
    pub landmark_suffix: String,

    /// Estimate landmarks (MAP) instead of reading them.
    #[arg(long)]
    pub detect: bool,

    #[command(flatten)]
    pub sampler: SamplerArgs,

    #[arg(long, value_delimiter = ',', default_value = "5,50,200")]
    pub tbr_window: Vec<usize>,

    #[arg(long)]
    pub raw_units: bool,

    #[arg(long, env = "LASA_OUT_DIR", default_value = "lasa-out")]
    pub out_dir: PathBuf,

    #[arg(long)]
    pub manifest_only: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Detect(a) => detect(&a),
        Command::Simulate(a) => simulate_cmd(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Features(a) => features(&a),
    }
}

fn options_json<T: Serialize>(args: &T) -> Result<serde_json::Value> {
    serde_json::to_value(args).map_err(|e| CliError::Internal(e.to_string()))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn units(raw: bool) -> Units {
    if raw {
        Units::Raw
    } else {
        Units::Normalized
    }
}

fn check_windows(windows: &[usize]) -> Result<()> {
    if windows.contains(&0) {
        return Err(CliError::usage("--tbr-window values must be positive"));
    }
    Ok(())
}

fn check_unique_stems(paths: &[PathBuf]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for p in paths {
        if !seen.insert(file_stem(p)) {
            return Err(CliError::usage(format!(
                "two inputs share the name {:?}; outputs would collide",
                file_stem(p)
            )));
        }
    }
    Ok(())
}

fn input_record(loaded: &LoadedChain) -> InputRecord {
    InputRecord {
        path: display(&loaded.path),
        vertices: loaded.chain.len(),
        normalization: loaded.chain.normalization(),
        hyperparameters: None,
        sampler: None,
        warnings: loaded.warnings.clone(),
    }
}

/// Landmark estimates of one chain.
struct Detection {
    hyper: Hyperparameters,
    config: SamplerConfig,
    gamma_map: LandmarkIndicator,
    gamma_ppm: Option<LandmarkIndicator>,
    log_post_map: f64,
    intervals: Vec<IntervalReport>,
    acceptance: AcceptanceStats,
}

fn run_detection(chain: &PolygonalChain, sampler: &SamplerArgs, with_ppm: bool, ci_alpha: f64) -> Result<Detection> {
    let normalized = chain.normalize()?;
    let (hyper, config) = sampler.resolve(chain.len())?;
    let traces = run_multi_chain(&normalized, &hyper, &config)?;
    let est = summarize(&traces, with_ppm, ci_alpha)?;
    let mut acceptance = AcceptanceStats::default();
    for t in &traces {
        acceptance.merge(&t.acceptance);
    }
    Ok(Detection {
        log_post_map: log_posterior(&normalized, &est.gamma_map, &hyper),
        intervals: est
            .credible_intervals
            .iter()
            .map(|c| IntervalReport {
                landmark: c.landmark + 1,
                lo: c.lo + 1,
                hi: c.hi + 1,
                width: c.width(),
            })
            .collect(),
        hyper,
        config,
        gamma_map: est.gamma_map,
        gamma_ppm: est.gamma_ppm,
        acceptance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    /// 1-based vertex numbers; `lo > hi` when the interval wraps.
    pub landmark: usize,
    pub lo: usize,
    pub hi: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub add_delete: Option<f64>,
    pub swap: Option<f64>,
    pub shift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub segment: usize,
    /// 1-based bounding landmarks.
    pub start: usize,
    pub end: usize,
    pub n_k: usize,
    pub roughness: RoughnessVector,
    pub transitions: Option<TransitionFeatures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub input: String,
    pub vertices: usize,
    pub k_map: usize,
    /// 1-based vertex numbers.
    pub landmarks_map: Vec<usize>,
    pub log_posterior_map: f64,
    pub k_ppm: Option<usize>,
    pub landmarks_ppm: Option<Vec<usize>>,
    pub credible_intervals: Vec<IntervalReport>,
    pub acceptance: AcceptanceReport,
    pub units: Units,
    pub segments: Vec<SegmentReport>,
}

fn one_based(gamma: &LandmarkIndicator) -> Vec<usize> {
    gamma.positions().into_iter().map(|i| i + 1).collect()
}

fn segment_rows(name: &str, segments: &[SegmentFeatures]) -> Vec<Vec<String>> {
    segments
        .iter()
        .map(|s| {
            let mut row = vec![
                name.to_string(),
                s.segment.to_string(),
                (s.start + 1).to_string(),
                (s.end + 1).to_string(),
                s.n_k.to_string(),
            ];
            row.extend(s.values().into_iter().map(fmt_opt));
            row
        })
        .collect()
}

fn segment_header() -> Vec<String> {
    ["chain", "segment", "start", "end", "n_k"]
        .into_iter()
        .chain(SegmentFeatures::COLUMNS)
        .map(String::from)
        .collect()
}

fn chain_header(windows: &[usize]) -> Vec<String> {
    std::iter::once("chain".to_string())
        .chain(ChainFeatures::columns(windows))
        .collect()
}

fn chain_row(name: &str, f: &ChainFeatures) -> Vec<String> {
    std::iter::once(name.to_string())
        .chain(f.values().into_iter().map(fmt_opt))
        .collect()
}

/// Accumulates the two feature tables across chains.
struct FeatureTables {
    windows: Vec<usize>,
    segment_rows: Vec<Vec<String>>,
    chain_rows: Vec<Vec<String>>,
}

impl FeatureTables {
    fn new(windows: &[usize]) -> Self {
        FeatureTables {
            windows: windows.to_vec(),
            segment_rows: Vec::new(),
            chain_rows: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, f: &ChainFeatures) {
        self.segment_rows.extend(segment_rows(name, &f.segments));
        self.chain_rows.push(chain_row(name, f));
    }

    fn write(&self, out_dir: &Path, manifest: &mut RunManifest) -> Result<()> {
        let seg = out_dir.join(SEGMENT_FEATURES);
        write_atomic(&seg, &table_csv(&segment_header(), &self.segment_rows)?)?;
        let ch = out_dir.join(CHAIN_FEATURES);
        write_atomic(&ch, &table_csv(&chain_header(&self.windows), &self.chain_rows)?)?;
        manifest
            .outputs
            .extend([SEGMENT_FEATURES.to_string(), CHAIN_FEATURES.to_string()]);
        Ok(())
    }
}

fn write_manifest(out_dir: &Path, manifest: &RunManifest) -> Result<()> {
    write_json(&out_dir.join(MANIFEST), manifest)
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    check_windows(&args.tbr_window)?;
    check_unique_stems(&args.inputs)?;
    if !(args.ci_alpha > 0.0 && args.ci_alpha < 1.0) {
        return Err(CliError::usage("--ci-alpha must lie in (0, 1)"));
    }
    let with_ppm = !args.no_ppm;
    let mut manifest = RunManifest::new("detect", Some(args.sampler.seed), options_json(args)?)?;
    let mut tables = FeatureTables::new(&args.tbr_window);

    for path in &args.inputs {
        let loaded = read_chain(path)?;
        let stem = loaded.stem();
        let mut record = input_record(&loaded);
        if args.manifest_only {
            let (hyper, config) = args.sampler.resolve(loaded.chain.len())?;
            record.hyperparameters = Some(hyper);
            record.sampler = Some(config);
            manifest.inputs.push(record);
            continue;
        }
        info!(
            "detecting landmarks on {} ({} vertices)",
            path.display(),
            loaded.chain.len()
        );
        let det = run_detection(&loaded.chain, &args.sampler, with_ppm, args.ci_alpha)?;
        record.hyperparameters = Some(det.hyper);
        record.sampler = Some(det.config);
        manifest.inputs.push(record);

        let feats = chain_features(&loaded.chain, &det.gamma_map, &args.tbr_window, units(args.raw_units))?;
        tables.push(&stem, &feats);
        let report = DetectionReport {
            input: display(path),
            vertices: loaded.chain.len(),
            k_map: det.gamma_map.count(),
            landmarks_map: one_based(&det.gamma_map),
            log_posterior_map: det.log_post_map,
            k_ppm: det.gamma_ppm.as_ref().map(LandmarkIndicator::count),
            landmarks_ppm: det.gamma_ppm.as_ref().map(one_based),
            credible_intervals: det.intervals,
            acceptance: AcceptanceReport {
                add_delete: det.acceptance.add_delete.rate(),
                swap: det.acceptance.swap.rate(),
                shift: det.acceptance.shift.rate(),
            },
            units: units(args.raw_units),
            segments: feats
                .segments
                .iter()
                .map(|s| SegmentReport {
                    segment: s.segment,
                    start: s.start + 1,
                    end: s.end + 1,
                    n_k: s.n_k,
                    roughness: s.roughness,
                    transitions: s.transitions,
                })
                .collect(),
        };
        let report_name = format!("{stem}.report.json");
        let gamma_name = format!("{stem}.gamma.csv");
        write_json(&args.out_dir.join(&report_name), &report)?;
        write_atomic(&args.out_dir.join(&gamma_name), &gamma_csv(&det.gamma_map)?)?;
        manifest.outputs.extend([report_name, gamma_name]);
    }
    if !args.manifest_only {
        tables.write(&args.out_dir, &mut manifest)?;
    }
    write_manifest(&args.out_dir, &manifest)
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<()> {
    let scenario = SimScenario {
        k_true: args.k,
        n: args.n,
        sigma2: args.sigma2,
        equilateral: args.equilateral,
        replicates: args.replicates,
        seed: args.seed,
    };
    scenario.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let mut manifest = RunManifest::new("simulate", Some(args.seed), options_json(args)?)?;
    if !args.manifest_only {
        for r in 0..args.replicates {
            let ds = simulate(&scenario, r)?;
            let stem = format!("sim_{:03}", r + 1);
            let chain_name = format!("{stem}.csv");
            let truth_name = format!("{stem}.truth.csv");
            write_atomic(&args.out_dir.join(&chain_name), &chain_csv(&ds.chain)?)?;
            write_atomic(&args.out_dir.join(&truth_name), &gamma_csv(&ds.gamma_true)?)?;
            manifest.outputs.extend([chain_name, truth_name]);
        }
    }
    write_manifest(&args.out_dir, &manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub name: String,
    pub method: String,
    pub vertices: usize,
    pub k_true: usize,
    pub k_hat: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub mcc: f64,
    pub ari: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

fn truth_files(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Some(stem) = name.strip_suffix(".truth.csv") {
            out.push((stem.to_string(), path));
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(CliError::data(dir, "no *.truth.csv files found"));
    }
    Ok(out)
}

fn find_chain(dir: &Path, stem: &str) -> Result<PathBuf> {
    ["csv", "json"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
        .ok_or_else(|| CliError::data(dir, format!("no chain file for {stem}")))
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let source = match args.method {
        EvalMethod::Predicted => args
            .pred_dir
            .as_ref()
            .ok_or_else(|| CliError::usage("--method predicted requires --pred-dir"))?,
        EvalMethod::Hull => args
            .chain_dir
            .as_ref()
            .ok_or_else(|| CliError::usage("--method hull requires --chain-dir"))?,
    };
    let method = match args.method {
        EvalMethod::Predicted => "predicted",
        EvalMethod::Hull => "hull",
    };
    let mut manifest = RunManifest::new("evaluate", None, options_json(args)?)?;
    let mut rows = Vec::new();
    for (stem, truth_path) in truth_files(&args.truth_dir)? {
        let truth = read_gamma(&truth_path, None)?;
        let m = truth.len();
        let pred = match args.method {
            EvalMethod::Predicted => read_gamma(&source.join(format!("{stem}.gamma.csv")), Some(m))?,
            EvalMethod::Hull => {
                let loaded = read_chain(&find_chain(source, &stem)?)?;
                if loaded.chain.len() != m {
                    return Err(CliError::data(
                        &loaded.path,
                        format!("{} vertices but the truth file has {m}", loaded.chain.len()),
                    ));
                }
                manifest.inputs.push(input_record(&loaded));
                convex_hull_baseline(&loaded.chain)?
            }
        };
        let cm = windowed_match(&truth, &pred, args.window)?;
        rows.push(MetricRow {
            name: stem,
            method: method.to_string(),
            vertices: m,
            k_true: truth.count(),
            k_hat: pred.count(),
            tp: cm.tp,
            fp: cm.fp,
            fn_: cm.fn_,
            tn: cm.tn,
            mcc: mcc_from_confusion(&cm),
            ari: ari(
                &cumulative_labels(truth.as_slice()),
                &cumulative_labels(pred.as_slice()),
            )?,
        });
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    write_atomic(&args.out_dir.join(METRICS), &bytes)?;

    let med_mcc = median(rows.iter().map(|r| r.mcc).collect());
    let med_ari = median(rows.iter().map(|r| r.ari).collect());
    let header: Vec<String> = ["method", "files", "median_mcc", "median_ari"]
        .map(String::from)
        .to_vec();
    let med_row = vec![
        method.to_string(),
        rows.len().to_string(),
        med_mcc.to_string(),
        med_ari.to_string(),
    ];
    write_atomic(&args.out_dir.join(MEDIANS), &table_csv(&header, &[med_row])?)?;
    println!(
        "{method}: {} files, median MCC {med_mcc:.4}, median ARI {med_ari:.4}",
        rows.len()
    );

    manifest.outputs.extend([METRICS.to_string(), MEDIANS.to_string()]);
    write_manifest(&args.out_dir, &manifest)
}

pub fn features(args: &FeaturesArgs) -> Result<()> {
    check_windows(&args.tbr_window)?;
    check_unique_stems(&args.inputs)?;
    let seed = args.detect.then_some(args.sampler.seed);
    let mut manifest = RunManifest::new("features", seed, options_json(args)?)?;
    let mut tables = FeatureTables::new(&args.tbr_window);
    for path in &args.inputs {
        let loaded = read_chain(path)?;
        let stem = loaded.stem();
        let mut record = input_record(&loaded);
        let gamma = match &args.landmark_dir {
            Some(dir) if !args.detect => {
                if args.manifest_only {
                    None
                } else {
                    let gpath = dir.join(format!("{stem}{}", args.landmark_suffix));
                    Some(read_gamma(&gpath, Some(loaded.chain.len()))?)
                }
            }
            _ => {
                let (hyper, config) = args.sampler.resolve(loaded.chain.len())?;
                record.hyperparameters = Some(hyper);
                record.sampler = Some(config);
                if args.manifest_only {
                    None
                } else {
                    Some(run_detection(&loaded.chain, &args.sampler, false, 0.05)?.gamma_map)
                }
            }
        };
        manifest.inputs.push(record);
        if let Some(gamma) = gamma {
            if !gamma.is_structurally_valid() {
                return Err(CliError::data(
                    path,
                    "landmarks need at least 3 vertices with no two adjacent",
                ));
            }
            let feats = chain_features(&loaded.chain, &gamma, &args.tbr_window, units(args.raw_units))
                .map_err(|e| CliError::data(path, e.to_string()))?;
            tables.push(&stem, &feats);
        }
    }
    if !args.manifest_only {
        tables.write(&args.out_dir, &mut manifest)?;
    }
    write_manifest(&args.out_dir, &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ppm_flags_override_each_other() {
        let cli = Cli::try_parse_from(["lasa", "detect", "a.csv", "--no-ppm"]).unwrap();
        let Command::Detect(a) = cli.command else { panic!() };
        assert!(a.no_ppm);
        let cli = Cli::try_parse_from(["lasa", "detect", "a.csv", "--no-ppm", "--ppm"]).unwrap();
        let Command::Detect(a) = cli.command else { panic!() };
        assert!(!a.no_ppm);
    }

    #[test]
    fn features_needs_a_landmark_source() {
        assert!(Cli::try_parse_from(["lasa", "features", "a.csv"]).is_err());
        assert!(Cli::try_parse_from(["lasa", "features", "a.csv", "--detect"]).is_ok());
        assert!(Cli::try_parse_from(["lasa", "features", "a.csv", "--detect", "--landmark-dir", "x"]).is_err());
    }

    #[test]
    fn tbr_windows_parse_as_list() {
        let cli = Cli::try_parse_from(["lasa", "features", "a.csv", "--detect", "--tbr-window", "3,7"]).unwrap();
        let Command::Features(a) = cli.command else { panic!() };
        assert_eq!(a.tbr_window, vec![3, 7]);
    }

    #[test]
    fn sampler_defaults_follow_chain_size() {
        let cli = Cli::try_parse_from(["lasa", "detect", "a.csv"]).unwrap();
        let Command::Detect(a) = cli.command else { panic!() };
        let (hyper, config) = a.sampler.resolve(99).unwrap();
        assert_eq!(config.iterations, 100 * 100);
        assert_eq!(config.n_chains, 4);
        assert!((hyper.beta_sigma - 1.0 / 99.0).abs() < 1e-15);
        let bad = SamplerArgs {
            burnin: 1.5,
            ..a.sampler
        };
        assert!(matches!(bad.resolve(99), Err(CliError::Usage(_))));
    }

    #[test]
    fn median_of_rows() {
        assert_eq!(median(vec![0.5, 0.1, 0.9]), 0.5);
        assert_eq!(median(vec![0.0, 1.0]), 0.5);
        assert!(median(vec![]).is_nan());
    }
}
