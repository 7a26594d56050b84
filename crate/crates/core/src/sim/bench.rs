use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{cumulative_labels, Hyperparameters, LandmarkIndicator};
use crate::sampler::{run_multi_chain, SamplerConfig};
use crate::summaries::summarize;

use super::derive_seed;
use super::generate::{simulate, SimScenario, SimulatedDataset};
use super::metrics::{ari, convex_hull_baseline, mcc_from_confusion, windowed_match};

/// Offset separating sampler streams from data-generation streams.
const SAMPLER_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchSettings {
    /// Iterations per chain are `iterations_per_vertex * n`.
    pub iterations_per_vertex: usize,
    pub burnin_fraction: f64,
    pub n_chains: usize,
    pub k_hat: usize,
    pub window: usize,
    pub with_ppm: bool,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            iterations_per_vertex: 100,
            burnin_fraction: 0.5,
            n_chains: 1,
            k_hat: 3,
            window: 5,
            with_ppm: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Map,
    Ppm,
    Hull,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Map => "map",
            Method::Ppm => "ppm",
            Method::Hull => "hull",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub k: usize,
    pub n: usize,
    pub sigma2: f64,
    pub equilateral: bool,
    pub replicate: usize,
    pub method: Method,
    pub mcc: f64,
    pub ari: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMedians {
    pub k: usize,
    pub n: usize,
    pub sigma2: f64,
    pub equilateral: bool,
    pub method: Method,
    pub replicates: usize,
    pub median_mcc: f64,
    pub median_ari: f64,
    pub median_runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchmarkResults {
    pub rows: Vec<BenchRow>,
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

impl BenchmarkResults {
    /// Medians per (scenario, method), in first-appearance order.
    pub fn medians(&self) -> Vec<ScenarioMedians> {
        let mut groups: Vec<(ScenarioMedians, Vec<&BenchRow>)> = Vec::new();
        for r in &self.rows {
            let key = |s: &ScenarioMedians| {
                s.k == r.k
                    && s.n == r.n
                    && s.sigma2 == r.sigma2
                    && s.equilateral == r.equilateral
                    && s.method == r.method
            };
            match groups.iter_mut().find(|(s, _)| key(s)) {
                Some((_, rows)) => rows.push(r),
                None => groups.push((
                    ScenarioMedians {
                        k: r.k,
                        n: r.n,
                        sigma2: r.sigma2,
                        equilateral: r.equilateral,
                        method: r.method,
                        replicates: 0,
                        median_mcc: 0.0,
                        median_ari: 0.0,
                        median_runtime_seconds: 0.0,
                    },
                    vec![r],
                )),
            }
        }
        groups
            .into_iter()
            .map(|(mut s, rows)| {
                let col = |f: fn(&BenchRow) -> f64| rows.iter().map(|r| f(r)).collect::<Vec<_>>();
                s.replicates = rows.len();
                s.median_mcc = median(&mut col(|r| r.mcc));
                s.median_ari = median(&mut col(|r| r.ari));
                s.median_runtime_seconds = median(&mut col(|r| r.runtime_seconds));
                s
            })
            .collect()
    }
}

fn score(
    ds: &SimulatedDataset,
    replicate: usize,
    method: Method,
    gamma_hat: &LandmarkIndicator,
    window: usize,
    runtime_seconds: f64,
) -> Result<BenchRow> {
    let cm = windowed_match(&ds.gamma_true, gamma_hat, window)?;
    let s = &ds.scenario;
    Ok(BenchRow {
        k: s.k_true,
        n: s.n,
        sigma2: s.sigma2,
        equilateral: s.equilateral,
        replicate,
        method,
        mcc: mcc_from_confusion(&cm),
        ari: ari(
            &cumulative_labels(ds.gamma_true.as_slice()),
            &cumulative_labels(gamma_hat.as_slice()),
        )?,
        tp: cm.tp,
        fp: cm.fp,
        fn_: cm.fn_,
        runtime_seconds,
    })
}

fn run_replicate(scenario: &SimScenario, replicate: usize, settings: &BenchSettings) -> Result<Vec<BenchRow>> {
    let ds = simulate(scenario, replicate)?;
    let m = ds.chain.len();
    let hyper = Hyperparameters::recommended(m, settings.k_hat);
    let config = SamplerConfig {
        iterations: settings.iterations_per_vertex * (m + 1),
        burnin_fraction: settings.burnin_fraction,
        n_chains: settings.n_chains,
        seed: derive_seed(scenario.seed, SAMPLER_STREAM + replicate as u64),
        ..SamplerConfig::for_chain_len(m, 0)
    };

    let start = Instant::now();
    let traces = run_multi_chain(&ds.chain, &hyper, &config)?;
    let est = summarize(&traces, settings.with_ppm, 0.05)?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut rows = vec![score(
        &ds,
        replicate,
        Method::Map,
        &est.gamma_map,
        settings.window,
        elapsed,
    )?];
    if let Some(ppm) = &est.gamma_ppm {
        rows.push(score(&ds, replicate, Method::Ppm, ppm, settings.window, elapsed)?);
    }
    let start = Instant::now();
    let hull = convex_hull_baseline(&ds.chain)?;
    let elapsed = start.elapsed().as_secs_f64();
    rows.push(score(&ds, replicate, Method::Hull, &hull, settings.window, elapsed)?);
    Ok(rows)
}

/// Simulates every replicate of every scenario, runs the detector and the
/// hull baseline on it, and scores both. Replicates run in parallel; row
/// order is deterministic.
pub fn run_benchmark(scenarios: &[SimScenario], settings: &BenchSettings) -> Result<BenchmarkResults> {
    for s in scenarios {
        s.validate()?;
    }
    let jobs: Vec<(usize, usize)> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..s.replicates).map(move |r| (i, r)))
        .collect();
    let per_job: Vec<Vec<BenchRow>> = jobs
        .par_iter()
        .map(|&(i, r)| run_replicate(&scenarios[i], r, settings))
        .collect::<Result<_>>()?;
    Ok(BenchmarkResults {
        rows: per_job.into_iter().flatten().collect(),
    })
}
