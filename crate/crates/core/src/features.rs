//! Boundary roughness features computed from an estimated landmark
//! configuration.
//!
//! Per-segment features come from the signed distances `d` of the interior
//! vertices to the segment's landmark line (negative inside the landmark
//! polygon). Chain-level features summarize them across segments and add the
//! radial baselines ZCC and TBR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PolygonalChain;
use crate::model::{is_valid_gamma, landmark_polygon, segment_bounds, segment_signed_distances, LandmarkIndicator};

/// Peaks and valleys averaged by RzJIS.
const RZJIS_EXTREMES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDistances {
    pub start: usize,
    pub end: usize,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDistances {
    pub segments: Vec<SegmentDistances>,
}

impl PiecewiseDistances {
    pub fn total(&self) -> usize {
        self.segments.iter().map(|s| s.d.len()).sum()
    }
}

pub fn piecewise_distances(chain: &PolygonalChain, gamma: &LandmarkIndicator) -> Result<PiecewiseDistances> {
    if gamma.len() != chain.len() || !is_valid_gamma(gamma, chain) {
        return Err(Error::constraint("landmark configuration is not valid for this chain"));
    }
    let landmarks = gamma.positions();
    let polygon = landmark_polygon(chain, &landmarks);
    let segments = segment_bounds(&landmarks)
        .map(|(start, end)| {
            Ok(SegmentDistances {
                start,
                end,
                d: segment_signed_distances(chain, start, end, &polygon)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PiecewiseDistances { segments })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoughnessVector {
    pub ra: f64,
    pub rq: f64,
    pub rv: f64,
    pub rp: f64,
    pub rz: f64,
    pub rsk: Option<f64>,
    pub rku: Option<f64>,
    pub rzjis: f64,
}

/// Surface-roughness measures of one segment. Rv and Rp are clamped at zero
/// (a segment without valleys has Rv = 0). RzJIS averages up to five of the
/// highest positive and up to five of the deepest negative distances, using
/// whatever exists when there are fewer.
pub fn roughness_measures(d: &[f64]) -> Result<RoughnessVector> {
    if d.is_empty() {
        return Err(Error::invalid("segment has no interior vertices"));
    }
    let n = d.len() as f64;
    let ra = d.iter().map(|x| x.abs()).sum::<f64>() / n;
    let rq = (d.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rv = (-min).max(0.0);
    let rp = max.max(0.0);
    let (rsk, rku) = if rq > 0.0 {
        (
            Some(d.iter().map(|x| x.powi(3)).sum::<f64>() / (n * rq.powi(3))),
            Some(d.iter().map(|x| x.powi(4)).sum::<f64>() / (n * rq.powi(4))),
        )
    } else {
        (None, None)
    };

    let mut peaks: Vec<f64> = d.iter().copied().filter(|&x| x > 0.0).collect();
    let mut valleys: Vec<f64> = d.iter().copied().filter(|&x| x < 0.0).map(|x| -x).collect();
    peaks.sort_by(|a, b| b.total_cmp(a));
    valleys.sort_by(|a, b| b.total_cmp(a));
    let top_mean = |v: &[f64]| {
        let v = &v[..v.len().min(RZJIS_EXTREMES)];
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let rzjis = top_mean(&peaks) + top_mean(&valleys);

    Ok(RoughnessVector {
        ra,
        rq,
        rv,
        rp,
        rz: rv + rp,
        rsk,
        rku,
        rzjis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignState {
    Plus,
    Minus,
}

/// `+` outside or on the landmark chain, `-` inside.
pub fn sign_states(d: &[f64]) -> Vec<SignState> {
    d.iter()
        .map(|&x| if x >= 0.0 { SignState::Plus } else { SignState::Minus })
        .collect()
}

/// Empirical transition frequencies between consecutive sign states. A row
/// is `None` when its source state never precedes another state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionFeatures {
    pub a_pp: Option<f64>,
    pub a_pm: Option<f64>,
    pub a_mp: Option<f64>,
    pub a_mm: Option<f64>,
}

/// `None` when there are fewer than two states.
pub fn transition_probabilities(states: &[SignState]) -> Option<TransitionFeatures> {
    if states.len() < 2 {
        return None;
    }
    let mut counts = [[0u32; 2]; 2];
    let idx = |s: SignState| match s {
        SignState::Plus => 0,
        SignState::Minus => 1,
    };
    for w in states.windows(2) {
        counts[idx(w[0])][idx(w[1])] += 1;
    }
    let row = |r: [u32; 2]| {
        let total = r[0] + r[1];
        if total == 0 {
            (None, None)
        } else {
            let t = f64::from(total);
            (Some(f64::from(r[0]) / t), Some(f64::from(r[1]) / t))
        }
    };
    let (a_pp, a_pm) = row(counts[0]);
    let (a_mp, a_mm) = row(counts[1]);
    Some(TransitionFeatures { a_pp, a_pm, a_mp, a_mm })
}

/// Distance of every vertex to the vertex centroid.
pub fn radial_distances(chain: &PolygonalChain) -> Vec<f64> {
    let c = chain.centroid();
    chain.vertices().iter().map(|v| v.distance(c)).collect()
}

/// Number of circular neighbor pairs on opposite sides of the mean.
pub fn zero_crossing_count(r: &[f64]) -> Result<usize> {
    if r.len() < 2 {
        return Err(Error::invalid("zero-crossing count needs at least two values"));
    }
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let n = r.len();
    Ok((0..n)
        .filter(|&i| (r[i] - mean) * (r[(i + 1) % n] - mean) < 0.0)
        .count())
}

/// Mean over consecutive windows of length `window` of the summed absolute
/// first differences inside each window. The last window may be partial.
pub fn tumor_boundary_roughness(r: &[f64], window: usize) -> Result<f64> {
    if window < 2 {
        return Err(Error::invalid("window length must be at least 2"));
    }
    if window > r.len() {
        return Err(Error::invalid(format!(
            "window length {window} exceeds the {} radial distances",
            r.len()
        )));
    }
    let ri: Vec<f64> = r
        .chunks(window)
        .map(|w| w.windows(2).map(|p| (p[1] - p[0]).abs()).sum())
        .collect();
    Ok(ri.iter().sum::<f64>() / ri.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    /// Sample standard deviation; `None` for a single value.
    pub sd: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

pub fn summarize_moments(values: &[f64]) -> Result<MomentSummary> {
    if values.is_empty() {
        return Err(Error::invalid("no values to summarize"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let central = |p: i32| values.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    let sd = (values.len() > 1).then(|| (m2 * n / (n - 1.0)).sqrt());
    let (skewness, kurtosis) = if values.len() >= 3 && m2 > 0.0 {
        (Some(central(3) / m2.powf(1.5)), Some(central(4) / (m2 * m2)))
    } else {
        (None, None)
    };
    Ok(MomentSummary {
        mean,
        sd,
        skewness,
        kurtosis,
    })
}

/// Units of distance-based features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Centered at the centroid and scaled to unit length.
    #[default]
    Normalized,
    /// Input coordinates.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFeatures {
    pub segment: usize,
    pub start: usize,
    pub end: usize,
    pub n_k: usize,
    pub roughness: RoughnessVector,
    pub transitions: Option<TransitionFeatures>,
}

impl SegmentFeatures {
    pub const COLUMNS: [&'static str; 12] = [
        "ra", "rq", "rv", "rp", "rz", "rsk", "rku", "rzjis", "a_pp", "a_pm", "a_mp", "a_mm",
    ];

    /// Values in `COLUMNS` order.
    pub fn values(&self) -> [Option<f64>; 12] {
        let r = &self.roughness;
        let t = self.transitions;
        [
            Some(r.ra),
            Some(r.rq),
            Some(r.rv),
            Some(r.rp),
            Some(r.rz),
            r.rsk,
            r.rku,
            Some(r.rzjis),
            t.and_then(|t| t.a_pp),
            t.and_then(|t| t.a_pm),
            t.and_then(|t| t.a_mp),
            t.and_then(|t| t.a_mm),
        ]
    }
}

pub fn segment_features(chain: &PolygonalChain, gamma: &LandmarkIndicator) -> Result<Vec<SegmentFeatures>> {
    piecewise_distances(chain, gamma)?
        .segments
        .into_iter()
        .enumerate()
        .map(|(segment, s)| {
            Ok(SegmentFeatures {
                segment,
                start: s.start,
                end: s.end,
                n_k: s.d.len(),
                roughness: roughness_measures(&s.d)?,
                transitions: transition_probabilities(&sign_states(&s.d)),
            })
        })
        .collect()
}

/// One row of the chain-level feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFeatures {
    pub k: usize,
    pub area: f64,
    pub zcc: usize,
    /// `(window, TBR)`; `None` when the window exceeds the chain.
    pub tbr: Vec<(usize, Option<f64>)>,
    /// Summaries of each per-segment feature in `SegmentFeatures::COLUMNS`
    /// order; `None` when no segment defines the feature.
    pub moments: Vec<Option<MomentSummary>>,
    pub segments: Vec<SegmentFeatures>,
}

impl ChainFeatures {
    /// Column names matching `values`.
    pub fn columns(windows: &[usize]) -> Vec<String> {
        let mut cols = vec!["k".to_string(), "area".to_string(), "zcc".to_string()];
        cols.extend(windows.iter().map(|w| format!("tbr_{w}")));
        for f in SegmentFeatures::COLUMNS {
            for s in ["mean", "sd", "skew", "kurt"] {
                cols.push(format!("{f}_{s}"));
            }
        }
        cols
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        let mut v = vec![Some(self.k as f64), Some(self.area), Some(self.zcc as f64)];
        v.extend(self.tbr.iter().map(|&(_, t)| t));
        for m in &self.moments {
            match m {
                Some(m) => v.extend([Some(m.mean), m.sd, m.skewness, m.kurtosis]),
                None => v.extend([None; 4]),
            }
        }
        v
    }
}

/// All features of `chain` (given in input coordinates) under `gamma`.
/// Area is always the shoelace area in input units.
pub fn chain_features(
    chain: &PolygonalChain,
    gamma: &LandmarkIndicator,
    windows: &[usize],
    units: Units,
) -> Result<ChainFeatures> {
    let normalized;
    let work = match units {
        Units::Raw => chain,
        Units::Normalized => {
            normalized = chain.normalize()?;
            &normalized
        }
    };
    let segments = segment_features(work, gamma)?;
    let r = radial_distances(work);
    let zcc = zero_crossing_count(&r)?;
    let tbr = windows
        .iter()
        .map(|&w| {
            if w > r.len() {
                Ok((w, None))
            } else {
                tumor_boundary_roughness(&r, w).map(|t| (w, Some(t)))
            }
        })
        .collect::<Result<_>>()?;
    let moments = (0..SegmentFeatures::COLUMNS.len())
        .map(|c| {
            let vals: Vec<f64> = segments.iter().filter_map(|s| s.values()[c]).collect();
            summarize_moments(&vals).ok()
        })
        .collect();
    Ok(ChainFeatures {
        k: segments.len(),
        area: chain.area(),
        zcc,
        tbr,
        moments,
        segments,
    })
}
