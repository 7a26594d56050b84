//! Point estimates and credible intervals from MCMC traces.
//!
//! A sample with sorted landmarks `l_0 < .. < l_{K-1}` partitions the chain
//! into the circular arcs `[l_j, l_{j+1})`, the last one wrapping around.
//! Co-clustering computations work on these arcs directly rather than on the
//! label vector.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::model::LandmarkIndicator;
use crate::sampler::McmcTrace;

/// Chains longer than this use the streaming Dahl route by default.
pub const DENSE_PPM_LIMIT: usize = 20_000;

fn pooled(traces: &[McmcTrace]) -> Result<usize> {
    let first = traces
        .iter()
        .find(|t| !t.is_empty())
        .ok_or_else(|| Error::invalid("no posterior samples"))?;
    let m = first.chain_len();
    if traces.iter().any(|t| t.chain_len() != m) {
        return Err(Error::invalid("traces index chains of different lengths"));
    }
    Ok(m)
}

/// Sample with the largest stored log posterior; ties go to the earliest.
pub fn map_estimate(trace: &McmcTrace) -> Result<LandmarkIndicator> {
    map_estimate_pooled(std::slice::from_ref(trace))
}

/// MAP over the concatenation of `traces` in the given order.
pub fn map_estimate_pooled(traces: &[McmcTrace]) -> Result<LandmarkIndicator> {
    pooled(traces)?;
    let mut best: Option<(usize, usize, f64)> = None;
    for (t, trace) in traces.iter().enumerate() {
        for (b, &lp) in trace.log_post().iter().enumerate() {
            if best.is_none_or(|(_, _, v)| lp > v) {
                best = Some((t, b, lp));
            }
        }
    }
    let (t, b, _) = best.expect("non-empty pooled trace");
    Ok(traces[t].gamma(b))
}

/// Distinct pooled samples in order of first appearance, with multiplicities.
struct Distinct {
    samples: Vec<Arc<[usize]>>,
    weights: Vec<u64>,
    total: u64,
}

fn distinct_samples(traces: &[McmcTrace]) -> Distinct {
    let mut index: HashMap<Arc<[usize]>, usize> = HashMap::new();
    let mut samples = Vec::new();
    let mut weights = Vec::new();
    for trace in traces {
        for b in 0..trace.len() {
            let s = trace.shared_landmarks(b);
            match index.get(s) {
                Some(&i) => weights[i] += 1,
                None => {
                    index.insert(Arc::clone(s), samples.len());
                    samples.push(Arc::clone(s));
                    weights.push(1);
                }
            }
        }
    }
    let total = weights.iter().sum();
    Distinct {
        samples,
        weights,
        total,
    }
}

/// Arcs of a sample as half-open linear ranges; the wrapping arc is split in
/// two. Each entry is `(arc id, lo, hi)`.
fn arc_ranges(landmarks: &[usize], m: usize) -> Vec<(usize, usize, usize)> {
    let k = landmarks.len();
    if k == 0 {
        return vec![(0, 0, m)];
    }
    let mut out = Vec::with_capacity(k + 1);
    for j in 0..k - 1 {
        out.push((j, landmarks[j], landmarks[j + 1]));
    }
    out.push((k - 1, landmarks[k - 1], m));
    if landmarks[0] > 0 {
        out.push((k - 1, 0, landmarks[0]));
    }
    out
}

/// Posterior pairwise co-clustering probabilities, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Ppm {
    m: usize,
    c: Vec<f64>,
}

impl Ppm {
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.c[i * self.m..(i + 1) * self.m]
    }
}

/// PPM pooled over all samples of all traces, normalized by the sample count.
pub fn compute_ppm(traces: &[McmcTrace]) -> Result<Ppm> {
    let m = pooled(traces)?;
    let distinct = distinct_samples(traces);
    let w = m + 1;
    let mut diff = vec![0i64; w * w];
    for (s, &wt) in distinct.samples.iter().zip(&distinct.weights) {
        let ranges = arc_ranges(s, m);
        for &(a, r0, r1) in &ranges {
            for &(b, c0, c1) in &ranges {
                if a != b {
                    continue;
                }
                let wt = wt as i64;
                diff[r0 * w + c0] += wt;
                diff[r0 * w + c1] -= wt;
                diff[r1 * w + c0] -= wt;
                diff[r1 * w + c1] += wt;
            }
        }
    }
    for i in 0..m {
        for j in 1..m {
            diff[i * w + j] += diff[i * w + j - 1];
        }
    }
    for i in 1..m {
        for j in 0..m {
            diff[i * w + j] += diff[(i - 1) * w + j];
        }
    }
    let total = distinct.total as f64;
    let mut c = Vec::with_capacity(m * m);
    for i in 0..m {
        c.extend(diff[i * w..i * w + m].iter().map(|&v| v as f64 / total));
    }
    Ok(Ppm { m, c })
}

/// Dahl estimate and its loss `sum_{i<i'} (delta_ii' - c_ii')^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DahlEstimate {
    pub gamma: LandmarkIndicator,
    pub loss: f64,
}

/// Sampled configuration whose association matrix is closest to the PPM in
/// squared error; ties go to the earliest sample.
pub fn dahl_estimate(ppm: &Ppm, traces: &[McmcTrace]) -> Result<DahlEstimate> {
    let m = pooled(traces)?;
    if ppm.len() != m {
        return Err(Error::invalid("PPM size differs from the trace chain length"));
    }
    // Prefix sums of (1 - 2c) give each arc's contribution in O(1).
    let w = m + 1;
    let mut pre = vec![0.0f64; w * w];
    let mut base = 0.0;
    for i in 0..m {
        for j in 0..m {
            let c = ppm.get(i, j);
            if i < j {
                base += c * c;
            }
            pre[(i + 1) * w + j + 1] = (1.0 - 2.0 * c) + pre[i * w + j + 1] + pre[(i + 1) * w + j] - pre[i * w + j];
        }
    }
    let rect = |r0: usize, r1: usize, c0: usize, c1: usize| {
        pre[r1 * w + c1] - pre[r0 * w + c1] - pre[r1 * w + c0] + pre[r0 * w + c0]
    };
    let distinct = distinct_samples(traces);
    let mut best: Option<(usize, f64)> = None;
    for (idx, s) in distinct.samples.iter().enumerate() {
        let ranges = arc_ranges(s, m);
        let mut ordered = 0.0;
        for &(a, r0, r1) in &ranges {
            for &(b, c0, c1) in &ranges {
                if a == b {
                    ordered += rect(r0, r1, c0, c1);
                }
            }
        }
        // Diagonal terms contribute (1 - 2 * 1) each.
        let loss = base + (ordered + m as f64) / 2.0;
        if best.is_none_or(|(_, l)| loss < l - 1e-12 * l.abs().max(1.0)) {
            best = Some((idx, loss));
        }
    }
    let (idx, loss) = best.expect("non-empty pooled trace");
    Ok(DahlEstimate {
        gamma: LandmarkIndicator::from_positions(m, &distinct.samples[idx])?,
        loss: loss.max(0.0),
    })
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Unordered pairs co-clustered under both samples.
fn shared_pairs(a: &[usize], b: &[usize], m: usize) -> u64 {
    let mut sa = arc_ranges(a, m);
    let mut sb = arc_ranges(b, m);
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    let (mut i, mut j) = (0, 0);
    sa.sort_by_key(|r| r.1);
    sb.sort_by_key(|r| r.1);
    while i < sa.len() && j < sb.len() {
        let lo = sa[i].1.max(sb[j].1);
        let hi = sa[i].2.min(sb[j].2);
        if hi > lo {
            *cells.entry((sa[i].0, sb[j].0)).or_default() += (hi - lo) as u64;
        }
        if sa[i].2 <= sb[j].2 {
            i += 1;
        } else {
            j += 1;
        }
    }
    cells.values().map(|&n| choose2(n)).sum()
}

fn within_pairs(a: &[usize], m: usize) -> u64 {
    let mut sizes: HashMap<usize, u64> = HashMap::new();
    for (id, lo, hi) in arc_ranges(a, m) {
        *sizes.entry(id).or_default() += (hi - lo) as u64;
    }
    sizes.values().map(|&n| choose2(n)).sum()
}

/// Dahl estimate without materializing the PPM. Cost is quadratic in the
/// number of distinct samples and linear in the landmark count.
pub fn dahl_estimate_streaming(traces: &[McmcTrace]) -> Result<DahlEstimate> {
    let m = pooled(traces)?;
    let d = distinct_samples(traces);
    let n = d.samples.len();
    let total = d.total as f64;
    let mut shared = vec![0u64; n * n];
    for a in 0..n {
        for b in a..n {
            let v = if a == b {
                within_pairs(&d.samples[a], m)
            } else {
                shared_pairs(&d.samples[a], &d.samples[b], m)
            };
            shared[a * n + b] = v;
            shared[b * n + a] = v;
        }
    }
    // sum_{i<i'} c^2 = sum_{s,t} w_s w_t shared(s,t) / total^2
    let mut base = 0.0;
    for a in 0..n {
        for b in 0..n {
            base += (d.weights[a] * d.weights[b]) as f64 * shared[a * n + b] as f64;
        }
    }
    base /= total * total;
    let mut best: Option<(usize, f64)> = None;
    for a in 0..n {
        let cross: f64 = (0..n)
            .map(|b| d.weights[b] as f64 * shared[a * n + b] as f64)
            .sum::<f64>()
            / total;
        let loss = base + shared[a * n + a] as f64 - 2.0 * cross;
        if best.is_none_or(|(_, l)| loss < l - 1e-12 * l.abs().max(1.0)) {
            best = Some((a, loss));
        }
    }
    let (idx, loss) = best.expect("non-empty pooled trace");
    Ok(DahlEstimate {
        gamma: LandmarkIndicator::from_positions(m, &d.samples[idx])?,
        loss: loss.max(0.0),
    })
}

/// One-sided p-value for negative correlation from 2x2 counts: `n` samples,
/// `na` and `nb` ones in each vector, `nab` joint ones. `None` when either
/// vector is constant.
pub fn neg_corr_pvalue_from_counts(n: u64, na: u64, nb: u64, nab: u64) -> Option<f64> {
    if n < 3 || na == 0 || na == n || nb == 0 || nb == n {
        return None;
    }
    let (n, na, nb, nab) = (n as f64, na as f64, nb as f64, nab as f64);
    let cov = n * nab - na * nb;
    let r = (cov / ((na * (n - na)).sqrt() * (nb * (n - nb)).sqrt())).clamp(-1.0, 1.0);
    let df = n - 2.0;
    if r <= -1.0 {
        return Some(0.0);
    }
    if r >= 1.0 {
        return Some(1.0);
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + t * t));
    Some(if t < 0.0 { tail } else { 1.0 - tail })
}

/// One-sided Pearson test of `H1: corr(a, b) < 0` using the Student-t
/// statistic with `len - 2` degrees of freedom.
pub fn pearson_neg_corr_pvalue(a: &[bool], b: &[bool]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::invalid("vectors differ in length"));
    }
    if a.len() < 3 {
        return Err(Error::invalid("at least three observations are required"));
    }
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count() as u64;
    let nab = a.iter().zip(b).filter(|(&x, &y)| x && y).count() as u64;
    Ok(neg_corr_pvalue_from_counts(a.len() as u64, count(a), count(b), nab))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub landmark: usize,
    /// Circular index of the left end.
    pub lo: usize,
    /// Circular index of the right end.
    pub hi: usize,
    pub left: usize,
    pub right: usize,
}

impl CredibleInterval {
    pub fn width(&self) -> usize {
        self.left + self.right
    }

    pub fn contains(&self, i: usize, m: usize) -> bool {
        (i + m - self.landmark) % m <= self.right || (self.landmark + m - i) % m <= self.left
    }
}

/// Per-landmark intervals. Starting from each landmark `t`, each side grows
/// one vertex at a time while the pooled indicator at the neighbor is
/// significantly negatively correlated with the indicator at `t`. Each side
/// is capped at `(m - 2) / 2` vertices.
pub fn credible_intervals(
    traces: &[McmcTrace],
    point_estimate: &LandmarkIndicator,
    alpha: f64,
) -> Result<Vec<CredibleInterval>> {
    let m = pooled(traces)?;
    if point_estimate.len() != m {
        return Err(Error::invalid(
            "point estimate length differs from the trace chain length",
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    let d = distinct_samples(traces);
    let has = |s: &[usize], i: usize| s.binary_search(&i).is_ok();
    let ones = |i: usize| -> u64 {
        d.samples
            .iter()
            .zip(&d.weights)
            .filter(|(s, _)| has(s, i))
            .map(|(_, &w)| w)
            .sum()
    };
    let joint = |i: usize, j: usize| -> u64 {
        d.samples
            .iter()
            .zip(&d.weights)
            .filter(|(s, _)| has(s, i) && has(s, j))
            .map(|(_, &w)| w)
            .sum()
    };
    let significant = |t: usize, nt: u64, j: usize| {
        neg_corr_pvalue_from_counts(d.total, nt, ones(j), joint(t, j)).is_some_and(|p| p < alpha)
    };
    let cap = m.saturating_sub(2) / 2;
    Ok(point_estimate
        .positions()
        .into_iter()
        .map(|t| {
            let nt = ones(t);
            let left = (1..=cap).take_while(|&u| significant(t, nt, (t + m - u) % m)).count();
            let right = (1..=cap).take_while(|&u| significant(t, nt, (t + u) % m)).count();
            CredibleInterval {
                landmark: t,
                lo: (t + m - left) % m,
                hi: (t + right) % m,
                left,
                right,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkEstimate {
    pub gamma_map: LandmarkIndicator,
    pub gamma_ppm: Option<LandmarkIndicator>,
    /// Intervals around the MAP landmarks.
    pub credible_intervals: Vec<CredibleInterval>,
}

/// MAP, optional PPM-based estimate, and MAP credible intervals from pooled
/// traces.
pub fn summarize(traces: &[McmcTrace], with_ppm: bool, alpha: f64) -> Result<LandmarkEstimate> {
    let m = pooled(traces)?;
    let gamma_map = map_estimate_pooled(traces)?;
    let gamma_ppm = if !with_ppm {
        None
    } else if m <= DENSE_PPM_LIMIT {
        Some(dahl_estimate(&compute_ppm(traces)?, traces)?.gamma)
    } else {
        Some(dahl_estimate_streaming(traces)?.gamma)
    };
    let credible_intervals = credible_intervals(traces, &gamma_map, alpha)?;
    Ok(LandmarkEstimate {
        gamma_map,
        gamma_ppm,
        credible_intervals,
    })
}
