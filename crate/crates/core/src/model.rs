//! Landmark parameterization, marginal likelihood and prior.
//!
//! Vertex indices are 0-based throughout the library. The landmark indicator
//! `gamma` marks landmark vertices; the segment labels `z` assign every vertex
//! to the segment that starts at the closest landmark at or before it
//! (circularly). Segment `k` therefore consists of landmark `L_k` followed by
//! the non-landmark vertices up to, but excluding, `L_{k+1}`.
//!
//! All densities are evaluated in natural-log space.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::{is_self_intersecting, line_through, point_in_polygon, signed_distance, Point2, PolygonalChain};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Binary landmark indicator over the distinct vertices of a chain.
///
/// Construction does not enforce the structural constraints; use
/// [`is_valid_gamma`] or [`LandmarkIndicator::is_structurally_valid`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LandmarkIndicator(Vec<bool>);

impl LandmarkIndicator {
    pub fn new(gamma: Vec<bool>) -> Self {
        LandmarkIndicator(gamma)
    }

    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut gamma = vec![false; len];
        for &p in positions {
            if p >= len {
                return Err(Error::invalid(format!(
                    "landmark index {p} out of range for {len} vertices"
                )));
            }
            gamma[p] = true;
        }
        Ok(LandmarkIndicator(gamma))
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        LandmarkIndicator(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    /// Number of landmarks `K`.
    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&g| g).count()
    }

    /// Sorted 0-based landmark indices `L_1 < ... < L_K`.
    pub fn positions(&self) -> Vec<usize> {
        landmark_positions(self)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&g| u8::from(g)).collect()
    }

    /// At least three landmarks and no two circularly adjacent.
    pub fn is_structurally_valid(&self) -> bool {
        structural_check(&self.0).is_ok()
    }

    /// Circular shift: entry `i` of the result is entry `(i + s) mod len`.
    pub fn shifted(&self, s: isize) -> Self {
        let m = self.0.len() as isize;
        LandmarkIndicator((0..m).map(|i| self.0[(i + s).rem_euclid(m) as usize]).collect())
    }
}

pub fn landmark_positions(gamma: &LandmarkIndicator) -> Vec<usize> {
    gamma
        .0
        .iter()
        .enumerate()
        .filter_map(|(i, &g)| g.then_some(i))
        .collect()
}

fn structural_check(gamma: &[bool]) -> Result<()> {
    let m = gamma.len();
    let k = gamma.iter().filter(|&&g| g).count();
    if k < 3 {
        return Err(Error::constraint(format!("{k} landmarks; at least 3 required")));
    }
    for i in 0..m {
        if gamma[i] && gamma[(i + 1) % m] {
            return Err(Error::constraint(format!(
                "vertices {} and {} are adjacent landmarks",
                i,
                (i + 1) % m
            )));
        }
    }
    Ok(())
}

/// Segment membership labels in `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentLabels(Vec<usize>);

impl SegmentLabels {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Cumulative sum of `gamma` with leading zeros replaced by `K`. Defined for
/// any binary vector; with no landmarks every label is 0.
pub fn cumulative_labels(gamma: &[bool]) -> Vec<usize> {
    let k = gamma.iter().filter(|&&g| g).count();
    let mut acc = 0;
    gamma
        .iter()
        .map(|&g| {
            acc += usize::from(g);
            if acc == 0 {
                k
            } else {
                acc
            }
        })
        .collect()
}

pub fn gamma_to_z(gamma: &LandmarkIndicator) -> Result<SegmentLabels> {
    structural_check(&gamma.0)?;
    Ok(SegmentLabels(cumulative_labels(&gamma.0)))
}

/// Circular lag-one difference of `z` with negative differences set to one.
pub fn z_to_gamma(z: &SegmentLabels) -> Result<LandmarkIndicator> {
    let labels = &z.0;
    let m = labels.len();
    if m == 0 {
        return Err(Error::constraint("empty label vector"));
    }
    let gamma: Vec<bool> = (0..m)
        .map(|i| {
            let prev = labels[(i + m - 1) % m] as i64;
            let diff = labels[i] as i64 - prev;
            diff != 0
        })
        .collect();
    structural_check(&gamma)?;
    if cumulative_labels(&gamma) != *labels {
        return Err(Error::constraint(
            "labels do not form circularly contiguous increasing runs",
        ));
    }
    Ok(LandmarkIndicator(gamma))
}

/// Structural constraints plus a simple (non-self-intersecting) landmark
/// chain.
pub fn is_valid_gamma(gamma: &LandmarkIndicator, chain: &PolygonalChain) -> bool {
    if gamma.len() != chain.len() || structural_check(&gamma.0).is_err() {
        return false;
    }
    let polygon = landmark_polygon(chain, &gamma.positions());
    !is_self_intersecting(&polygon)
}

pub fn landmark_polygon(chain: &PolygonalChain, landmarks: &[usize]) -> Vec<Point2> {
    landmarks.iter().map(|&i| chain.vertex(i)).collect()
}

/// Prior and likelihood hyperparameters. `omega` (landmark probability) and
/// the per-segment variances are integrated out; only their hyperparameters
/// remain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub alpha_omega: f64,
    pub beta_omega: f64,
    pub alpha_sigma: f64,
    pub beta_sigma: f64,
    /// Expected number of landmarks a priori; also the initial landmark count.
    pub k_hat: usize,
}

impl Hyperparameters {
    /// Recommended setting for a chain with `m` distinct vertices
    /// (`n = m + 1` counting the closing vertex): `alpha_omega = 2K/n`,
    /// `beta_omega = 2(1 - K/n)`, `alpha_sigma = 3`, `beta_sigma = 1/m`.
    pub fn recommended(m: usize, k_hat: usize) -> Self {
        let n = (m + 1) as f64;
        let kf = k_hat as f64;
        Hyperparameters {
            alpha_omega: 2.0 * kf / n,
            beta_omega: 2.0 * (1.0 - kf / n),
            alpha_sigma: 3.0,
            beta_sigma: 1.0 / m as f64,
            k_hat,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("alpha_omega", self.alpha_omega)?;
        positive("beta_omega", self.beta_omega)?;
        positive("alpha_sigma", self.alpha_sigma)?;
        positive("beta_sigma", self.beta_sigma)?;
        if self.k_hat < 3 {
            return Err(Error::invalid("k_hat must be at least 3"));
        }
        Ok(())
    }
}

/// Log marginal density of `n_k` independent zero-mean normal deviations with
/// sum of squares `ss`, after integrating the shared variance against an
/// inverse-gamma prior.
#[inline]
pub fn log_marglik_from_ss(n_k: usize, ss: f64, hyper: &Hyperparameters) -> f64 {
    let half_n = 0.5 * n_k as f64;
    let a = hyper.alpha_sigma;
    let b = hyper.beta_sigma;
    -half_n * LN_2PI + ln_gamma(a + half_n) - ln_gamma(a) + a * b.ln() - (a + half_n) * (b + 0.5 * ss).ln()
}

pub fn segment_log_marglik(d_star: &[f64], hyper: &Hyperparameters) -> Result<f64> {
    if d_star.is_empty() {
        return Err(Error::invalid("segment has no non-landmark vertices"));
    }
    if d_star.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("non-finite distance in segment"));
    }
    let ss = d_star.iter().map(|d| d * d).sum();
    Ok(log_marglik_from_ss(d_star.len(), ss, hyper))
}

/// Vertices strictly between landmarks `start` and `end` going forward
/// around a chain of `m` vertices.
pub fn segment_interior(start: usize, end: usize, m: usize) -> impl Iterator<Item = usize> {
    let count = (end + m - start - 1) % m;
    (1..=count).map(move |o| (start + o) % m)
}

/// `(start, end)` landmark pairs of every segment, in landmark order.
pub fn segment_bounds(landmarks: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let k = landmarks.len();
    (0..k).map(move |i| (landmarks[i], landmarks[(i + 1) % k]))
}

/// Signed distances of one segment's interior vertices to the line through
/// its bounding landmarks; signs from membership in `polygon`.
pub fn segment_signed_distances(
    chain: &PolygonalChain,
    start: usize,
    end: usize,
    polygon: &[Point2],
) -> Result<Vec<f64>> {
    let line = line_through(chain.vertex(start), chain.vertex(end))?;
    Ok(segment_interior(start, end, chain.len())
        .map(|i| {
            let v = chain.vertex(i);
            signed_distance(v, &line, point_in_polygon(v, polygon))
        })
        .collect())
}

/// `(n_k, sum of squared distances)` for one segment. Sign-free, so it skips
/// the point-in-polygon tests.
pub(crate) fn segment_sum_squares(chain: &PolygonalChain, start: usize, end: usize) -> (usize, f64) {
    let line = match line_through(chain.vertex(start), chain.vertex(end)) {
        Ok(l) => l,
        Err(_) => return (0, f64::NAN),
    };
    let mut n_k = 0;
    let mut ss = 0.0;
    for i in segment_interior(start, end, chain.len()) {
        let d = line.distance(chain.vertex(i));
        ss += d * d;
        n_k += 1;
    }
    (n_k, ss)
}

/// Per-segment log marginal likelihoods, in landmark order.
pub fn segment_log_likelihoods(
    chain: &PolygonalChain,
    gamma: &LandmarkIndicator,
    hyper: &Hyperparameters,
) -> Result<Vec<f64>> {
    if !is_valid_gamma(gamma, chain) {
        return Err(Error::constraint("landmark configuration is not valid for this chain"));
    }
    let landmarks = gamma.positions();
    let polygon = landmark_polygon(chain, &landmarks);
    segment_bounds(&landmarks)
        .map(|(s, e)| {
            let d = segment_signed_distances(chain, s, e, &polygon)?;
            segment_log_marglik(&d, hyper)
        })
        .collect()
}

/// Log of the full-data likelihood, the sum of the segment terms.
pub fn full_log_likelihood(chain: &PolygonalChain, gamma: &LandmarkIndicator, hyper: &Hyperparameters) -> Result<f64> {
    Ok(segment_log_likelihoods(chain, gamma, hyper)?.iter().sum())
}

/// Beta-Bernoulli log prior as a function of the landmark count `k` out of
/// `len` indicator entries, ignoring the zero-prior constraints.
pub fn log_prior_count(k: usize, len: usize, hyper: &Hyperparameters) -> f64 {
    let (a, b) = (hyper.alpha_omega, hyper.beta_omega);
    let (k, n) = (k as f64, len as f64);
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + ln_gamma(a + k) + ln_gamma(b + n - k) - ln_gamma(a + b + n)
}

/// Log prior of `gamma`; negative infinity when the configuration is not
/// valid for `chain`.
pub fn log_prior(gamma: &LandmarkIndicator, chain: &PolygonalChain, hyper: &Hyperparameters) -> f64 {
    if !is_valid_gamma(gamma, chain) {
        return f64::NEG_INFINITY;
    }
    log_prior_count(gamma.count(), gamma.len(), hyper)
}

/// Unnormalized log posterior; negative infinity for invalid configurations.
pub fn log_posterior(chain: &PolygonalChain, gamma: &LandmarkIndicator, hyper: &Hyperparameters) -> f64 {
    let lp = log_prior(gamma, chain, hyper);
    if lp == f64::NEG_INFINITY {
        return lp;
    }
    match full_log_likelihood(chain, gamma, hyper) {
        Ok(ll) => lp + ll,
        Err(_) => f64::NEG_INFINITY,
    }
}
