//! Metropolis search over the landmark indicator.
//!
//! Every iteration proposes an add-delete flip. Every `special_move_period`
//! iterations a swap and then a partial shift are additionally proposed. All
//! three proposals are symmetric, so the Hastings ratio reduces to the
//! posterior ratio; invalid configurations have zero prior and are never
//! accepted.
//!
//! The state caches one log-likelihood term per segment. A proposal only
//! recomputes the segments whose bounding landmarks changed, and only the
//! changed edges of the landmark polygon are tested for intersections.
//!
//! Random streams: chain `c` of a multi-chain run uses
//! `ChaCha8Rng::seed_from_u64(seed.wrapping_add(c))`.

use std::sync::Arc;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{edges_conflict, PolygonalChain};
use crate::model::{
    landmark_polygon, log_marglik_from_ss, log_posterior, log_prior_count, segment_sum_squares, Hyperparameters,
    LandmarkIndicator,
};

const INIT_ATTEMPTS: usize = 1000;
const COHERENCE_CHECK_PERIOD: usize = 1000;
const COHERENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub iterations: usize,
    pub burnin_fraction: f64,
    pub special_move_period: usize,
    pub shift_magnitude: usize,
    pub seed: u64,
    pub n_chains: usize,
}

impl SamplerConfig {
    /// Defaults for a chain with `m` distinct vertices: `100 n` iterations
    /// with `n = m + 1`, half discarded as burn-in, four chains.
    pub fn for_chain_len(m: usize, seed: u64) -> Self {
        SamplerConfig {
            iterations: 100 * (m + 1),
            burnin_fraction: 0.5,
            special_move_period: 20,
            shift_magnitude: 1,
            seed,
            n_chains: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 2 {
            return Err(Error::invalid("iterations must be at least 2"));
        }
        if !(self.burnin_fraction > 0.0 && self.burnin_fraction < 1.0) {
            return Err(Error::invalid("burnin_fraction must lie in (0, 1)"));
        }
        if self.burnin() < 1 {
            return Err(Error::invalid("burn-in must cover at least one iteration"));
        }
        if self.special_move_period == 0 || self.shift_magnitude == 0 || self.n_chains == 0 {
            return Err(Error::invalid(
                "special_move_period, shift_magnitude and n_chains must be positive",
            ));
        }
        Ok(())
    }

    /// Number of discarded iterations, `iterations - ceil(iterations * (1 - f))`.
    pub fn burnin(&self) -> usize {
        ((self.iterations as f64 * self.burnin_fraction) + 1e-9).floor() as usize
    }

    pub fn retained(&self) -> usize {
        self.iterations - self.burnin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    AddDelete,
    Swap,
    Shift,
}

#[derive(Debug, Clone)]
pub struct Proposal {
    pub gamma: LandmarkIndicator,
    pub kind: MoveKind,
    pub log_proposal_ratio: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MoveStats {
    pub proposed: u64,
    pub accepted: u64,
}

impl MoveStats {
    pub fn rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceStats {
    pub add_delete: MoveStats,
    pub swap: MoveStats,
    pub shift: MoveStats,
}

impl AcceptanceStats {
    fn record(&mut self, kind: MoveKind, accepted: bool) {
        let s = match kind {
            MoveKind::AddDelete => &mut self.add_delete,
            MoveKind::Swap => &mut self.swap,
            MoveKind::Shift => &mut self.shift,
        };
        s.proposed += 1;
        s.accepted += u64::from(accepted);
    }

    pub fn merge(&mut self, other: &AcceptanceStats) {
        for (a, b) in [
            (&mut self.add_delete, &other.add_delete),
            (&mut self.swap, &other.swap),
            (&mut self.shift, &other.shift),
        ] {
            a.proposed += b.proposed;
            a.accepted += b.accepted;
        }
    }
}

/// Current sampler state with per-segment likelihood cache.
#[derive(Debug, Clone)]
pub struct ChainState {
    gamma: LandmarkIndicator,
    landmarks: Arc<[usize]>,
    segment_loglik: Vec<f64>,
    log_post: f64,
}

struct Candidate {
    landmarks: Vec<usize>,
    segment_loglik: Vec<f64>,
    log_post: f64,
}

impl ChainState {
    /// Evaluates `gamma` from scratch; fails if it is not a valid
    /// configuration for `chain`.
    pub fn new(chain: &PolygonalChain, gamma: LandmarkIndicator, hyper: &Hyperparameters) -> Result<Self> {
        if gamma.len() != chain.len() {
            return Err(Error::invalid("indicator length differs from chain length"));
        }
        let landmarks = gamma.positions();
        if landmarks.len() < 3 || !gamma.is_structurally_valid() {
            return Err(Error::constraint("initial configuration violates landmark constraints"));
        }
        let polygon = landmark_polygon(chain, &landmarks);
        let all_edges: Vec<usize> = (0..landmarks.len()).collect();
        if edges_conflict(&polygon, &all_edges) {
            return Err(Error::constraint("landmark chain is self-intersecting"));
        }
        let segment_loglik = segment_terms(chain, &landmarks, hyper, |_, _| None);
        let log_post = log_prior_count(landmarks.len(), chain.len(), hyper) + segment_loglik.iter().sum::<f64>();
        Ok(ChainState {
            gamma,
            landmarks: landmarks.into(),
            segment_loglik,
            log_post,
        })
    }

    pub fn gamma(&self) -> &LandmarkIndicator {
        &self.gamma
    }

    pub fn landmarks(&self) -> &[usize] {
        &self.landmarks
    }

    pub fn log_post(&self) -> f64 {
        self.log_post
    }

    pub fn segment_loglik(&self) -> &[f64] {
        &self.segment_loglik
    }

    /// Log posterior of `gamma` reusing cached segment terms where the
    /// bounding landmarks are unchanged. `None` for invalid configurations.
    fn evaluate(
        &self,
        chain: &PolygonalChain,
        gamma: &LandmarkIndicator,
        hyper: &Hyperparameters,
    ) -> Option<Candidate> {
        if !gamma.is_structurally_valid() {
            return None;
        }
        let landmarks = gamma.positions();
        let k = landmarks.len();

        let old_next = |l: usize| -> Option<(usize, usize)> {
            let idx = self.landmarks.binary_search(&l).ok()?;
            Some((idx, self.landmarks[(idx + 1) % self.landmarks.len()]))
        };
        let changed: Vec<usize> = (0..k)
            .filter(|&i| old_next(landmarks[i]).map(|(_, n)| n) != Some(landmarks[(i + 1) % k]))
            .collect();

        let polygon = landmark_polygon(chain, &landmarks);
        if edges_conflict(&polygon, &changed) {
            return None;
        }
        let segment_loglik = segment_terms(chain, &landmarks, hyper, |start, end| {
            old_next(start)
                .filter(|&(_, n)| n == end)
                .map(|(idx, _)| self.segment_loglik[idx])
        });
        let log_post = log_prior_count(k, chain.len(), hyper) + segment_loglik.iter().sum::<f64>();
        Some(Candidate {
            landmarks,
            segment_loglik,
            log_post,
        })
    }

    /// Difference between the cached and the from-scratch log posterior.
    pub fn coherence_error(&self, chain: &PolygonalChain, hyper: &Hyperparameters) -> f64 {
        (self.log_post - log_posterior(chain, &self.gamma, hyper)).abs()
    }
}

fn segment_terms(
    chain: &PolygonalChain,
    landmarks: &[usize],
    hyper: &Hyperparameters,
    cached: impl Fn(usize, usize) -> Option<f64>,
) -> Vec<f64> {
    let k = landmarks.len();
    (0..k)
        .map(|i| {
            let (start, end) = (landmarks[i], landmarks[(i + 1) % k]);
            cached(start, end).unwrap_or_else(|| {
                let (n_k, ss) = segment_sum_squares(chain, start, end);
                log_marglik_from_ss(n_k, ss, hyper)
            })
        })
        .collect()
}

/// Flips one uniformly chosen entry.
pub fn propose_add_delete<R: Rng + ?Sized>(state: &ChainState, rng: &mut R) -> Proposal {
    let mut bits = state.gamma.as_slice().to_vec();
    let i = rng.random_range(0..bits.len());
    bits[i] = !bits[i];
    Proposal {
        gamma: LandmarkIndicator::new(bits),
        kind: MoveKind::AddDelete,
        log_proposal_ratio: 0.0,
    }
}

/// Moves one uniformly chosen landmark to one uniformly chosen non-landmark
/// vertex.
pub fn propose_swap<R: Rng + ?Sized>(state: &ChainState, rng: &mut R) -> Proposal {
    let mut bits = state.gamma.as_slice().to_vec();
    let m = bits.len();
    let k = state.landmarks.len();
    if k == 0 || k >= m {
        return Proposal {
            gamma: state.gamma.clone(),
            kind: MoveKind::Swap,
            log_proposal_ratio: 0.0,
        };
    }
    let from = state.landmarks[rng.random_range(0..k)];
    let to = loop {
        let i = rng.random_range(0..m);
        if !bits[i] {
            break i;
        }
    };
    bits[from] = false;
    bits[to] = true;
    Proposal {
        gamma: LandmarkIndicator::new(bits),
        kind: MoveKind::Swap,
        log_proposal_ratio: 0.0,
    }
}

/// Rotates the whole indicator by `s`, drawn uniformly from
/// `{-max, .., -1, 1, .., max}`.
pub fn propose_partial_shift<R: Rng + ?Sized>(state: &ChainState, max_shift: usize, rng: &mut R) -> Proposal {
    let max = max_shift.max(1) as i64;
    let r = rng.random_range(0..2 * max);
    let s = (if r < max { r - max } else { r - max + 1 }) as isize;
    Proposal {
        gamma: state.gamma.shifted(s),
        kind: MoveKind::Shift,
        log_proposal_ratio: 0.0,
    }
}

/// Metropolis accept/reject step. Returns whether the proposal was accepted;
/// on acceptance the state and its segment cache are updated in place.
pub fn accept_reject<R: Rng + ?Sized>(
    state: &mut ChainState,
    proposal: Proposal,
    chain: &PolygonalChain,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> bool {
    let Some(candidate) = state.evaluate(chain, &proposal.gamma, hyper) else {
        return false;
    };
    let log_m = candidate.log_post - state.log_post + proposal.log_proposal_ratio;
    let accept = log_m >= 0.0 || rng.random::<f64>().ln() < log_m;
    if accept {
        state.gamma = proposal.gamma;
        state.landmarks = candidate.landmarks.into();
        state.segment_loglik = candidate.segment_loglik;
        state.log_post = candidate.log_post;
    }
    accept
}

/// Post-burn-in samples of one chain. Samples are stored as sorted landmark
/// index lists; consecutive identical samples share storage.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcTrace {
    chain_len: usize,
    samples: Vec<Arc<[usize]>>,
    log_post: Vec<f64>,
    pub acceptance: AcceptanceStats,
}

impl McmcTrace {
    pub fn from_samples(chain_len: usize, samples: Vec<Vec<usize>>, log_post: Vec<f64>) -> Result<Self> {
        if samples.len() != log_post.len() {
            return Err(Error::invalid("sample and log-posterior counts differ"));
        }
        if samples.iter().flatten().any(|&i| i >= chain_len) {
            return Err(Error::invalid("landmark index out of range"));
        }
        Ok(McmcTrace {
            chain_len,
            samples: samples
                .into_iter()
                .map(|mut s| {
                    s.sort_unstable();
                    s.into()
                })
                .collect(),
            log_post,
            acceptance: AcceptanceStats::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of distinct chain vertices the samples index into.
    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn landmarks(&self, b: usize) -> &[usize] {
        &self.samples[b]
    }

    pub(crate) fn shared_landmarks(&self, b: usize) -> &Arc<[usize]> {
        &self.samples[b]
    }

    pub fn gamma(&self, b: usize) -> LandmarkIndicator {
        LandmarkIndicator::from_positions(self.chain_len, &self.samples[b]).expect("trace indices are in range")
    }

    pub fn log_post(&self) -> &[f64] {
        &self.log_post
    }
}

/// Initial indicator: `k_hat` distinct vertices drawn uniformly, retried
/// until the configuration is valid.
fn initial_state<R: Rng + ?Sized>(chain: &PolygonalChain, hyper: &Hyperparameters, rng: &mut R) -> Result<ChainState> {
    let m = chain.len();
    if hyper.k_hat > m {
        return Err(Error::Initialization(format!(
            "k_hat = {} exceeds the {m} chain vertices",
            hyper.k_hat
        )));
    }
    for _ in 0..INIT_ATTEMPTS {
        let picks = sample_indices(rng, m, hyper.k_hat).into_vec();
        let gamma = LandmarkIndicator::from_positions(m, &picks)?;
        if let Ok(state) = ChainState::new(chain, gamma, hyper) {
            return Ok(state);
        }
    }
    Err(Error::Initialization(format!(
        "no valid configuration with {} landmarks after {INIT_ATTEMPTS} attempts",
        hyper.k_hat
    )))
}

/// Runs one chain and returns its post-burn-in trace.
pub fn run_chain<R: Rng + ?Sized>(
    chain: &PolygonalChain,
    hyper: &Hyperparameters,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<McmcTrace> {
    if !chain.is_normalized() {
        return Err(Error::invalid("the sampler expects a normalized chain"));
    }
    config.validate()?;
    hyper.validate()?;
    let mut state = initial_state(chain, hyper, rng)?;
    let burnin = config.burnin();
    let mut trace = McmcTrace {
        chain_len: chain.len(),
        samples: Vec::with_capacity(config.retained()),
        log_post: Vec::with_capacity(config.retained()),
        acceptance: AcceptanceStats::default(),
    };

    for iter in 1..=config.iterations {
        let p = propose_add_delete(&state, rng);
        let ok = accept_reject(&mut state, p, chain, hyper, rng);
        trace.acceptance.record(MoveKind::AddDelete, ok);

        if iter % config.special_move_period == 0 {
            let p = propose_swap(&state, rng);
            let ok = accept_reject(&mut state, p, chain, hyper, rng);
            trace.acceptance.record(MoveKind::Swap, ok);

            let p = propose_partial_shift(&state, config.shift_magnitude, rng);
            let ok = accept_reject(&mut state, p, chain, hyper, rng);
            trace.acceptance.record(MoveKind::Shift, ok);
        }

        if cfg!(debug_assertions) && iter % COHERENCE_CHECK_PERIOD == 0 {
            let err = state.coherence_error(chain, hyper);
            if err.is_nan() || err > COHERENCE_TOL {
                return Err(Error::Internal(format!(
                    "cached log posterior drifted by {err:e} at iteration {iter}"
                )));
            }
        }

        if iter > burnin {
            trace.samples.push(Arc::clone(&state.landmarks));
            trace.log_post.push(state.log_post);
        }
    }
    Ok(trace)
}

pub fn chain_rng(seed: u64, chain_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(chain_index as u64))
}

/// Runs `config.n_chains` independent chains in parallel; traces are returned
/// in chain order.
pub fn run_multi_chain(
    chain: &PolygonalChain,
    hyper: &Hyperparameters,
    config: &SamplerConfig,
) -> Result<Vec<McmcTrace>> {
    config.validate()?;
    (0..config.n_chains)
        .into_par_iter()
        .map(|c| run_chain(chain, hyper, config, &mut chain_rng(config.seed, c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::model::is_valid_gamma;

    fn test_chain(m: usize, seed: u64) -> PolygonalChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                let r = 1.0 + 0.3 * (3.0 * t).cos() + rng.random_range(-0.05..0.05);
                Point2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        PolygonalChain::new(pts).unwrap().normalize().unwrap()
    }

    fn state_with(chain: &PolygonalChain, positions: &[usize]) -> ChainState {
        let hyper = Hyperparameters::recommended(chain.len(), 3);
        ChainState::new(
            chain,
            LandmarkIndicator::from_positions(chain.len(), positions).unwrap(),
            &hyper,
        )
        .unwrap()
    }

    #[test]
    fn config_bookkeeping() {
        let mut c = SamplerConfig::for_chain_len(12, 1);
        assert_eq!(c.iterations, 1300);
        assert_eq!(c.retained(), 650);
        c.iterations = 101;
        assert_eq!(c.retained(), 51);
        c.burnin_fraction = 0.7;
        c.iterations = 100;
        assert_eq!(c.retained(), 30);
        c.iterations = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn add_delete_changes_count_by_one_and_is_involutive() {
        let chain = test_chain(20, 3);
        let state = state_with(&chain, &[0, 7, 14]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let p = propose_add_delete(&state, &mut rng);
            let diff: Vec<usize> = (0..20).filter(|&i| p.gamma.get(i) != state.gamma().get(i)).collect();
            assert_eq!(diff.len(), 1);
            let i = diff[0];
            let k = p.gamma.count() as isize - 3;
            assert_eq!(k, if state.gamma().get(i) { -1 } else { 1 });
            let mut bits = p.gamma.as_slice().to_vec();
            bits[i] = !bits[i];
            assert_eq!(&LandmarkIndicator::new(bits), state.gamma());
            assert_eq!(p.log_proposal_ratio, 0.0);
        }
    }

    #[test]
    fn swap_preserves_count() {
        let chain = test_chain(20, 3);
        let state = state_with(&chain, &[0, 7, 14]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = propose_swap(&state, &mut rng);
            assert_eq!(p.gamma.count(), 3);
            let diff = (0..20).filter(|&i| p.gamma.get(i) != state.gamma().get(i)).count();
            assert_eq!(diff, 2);
        }
    }

    #[test]
    fn shift_examples() {
        let gamma = LandmarkIndicator::from_bits(&[1, 0, 0, 1, 0, 0, 0, 1, 0, 0]);
        assert_eq!(
            gamma.shifted(1),
            LandmarkIndicator::from_bits(&[0, 0, 1, 0, 0, 0, 1, 0, 0, 1])
        );
        assert_eq!(
            gamma.shifted(-1),
            LandmarkIndicator::from_bits(&[0, 1, 0, 0, 1, 0, 0, 0, 1, 0])
        );
        assert_eq!(gamma.shifted(1).shifted(-1), gamma);

        let chain = test_chain(20, 3);
        let state = state_with(&chain, &[0, 7, 14]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            let p = propose_partial_shift(&state, 2, &mut rng);
            assert_eq!(p.gamma.count(), 3);
            let s = (-2..=2).find(|&s| state.gamma().shifted(s) == p.gamma).unwrap();
            assert_ne!(s, 0);
            seen.insert(s);
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn invalid_proposal_never_accepted_and_identity_always_accepted() {
        let chain = test_chain(20, 3);
        let hyper = Hyperparameters::recommended(20, 3);
        let mut state = state_with(&chain, &[0, 7, 14]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let bad = Proposal {
                gamma: LandmarkIndicator::from_positions(20, &[0, 1, 7, 14]).unwrap(),
                kind: MoveKind::AddDelete,
                log_proposal_ratio: 0.0,
            };
            assert!(!accept_reject(&mut state, bad, &chain, &hyper, &mut rng));
            let same = Proposal {
                gamma: state.gamma().clone(),
                kind: MoveKind::Swap,
                log_proposal_ratio: 0.0,
            };
            assert!(accept_reject(&mut state, same, &chain, &hyper, &mut rng));
        }
    }

    #[test]
    fn local_evaluation_matches_global() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..5 {
            let chain = test_chain(30, seed);
            let hyper = Hyperparameters::recommended(30, 3);
            let mut state = state_with(&chain, &[0, 10, 20]);
            for step in 0..3000 {
                let p = match step % 3 {
                    0 => propose_add_delete(&state, &mut rng),
                    1 => propose_swap(&state, &mut rng),
                    _ => propose_partial_shift(&state, 2, &mut rng),
                };
                let global = log_posterior(&chain, &p.gamma, &hyper);
                match state.evaluate(&chain, &p.gamma, &hyper) {
                    Some(c) => {
                        assert!(is_valid_gamma(&p.gamma, &chain));
                        assert!((c.log_post - global).abs() < 1e-9);
                        assert!(
                            ((c.log_post - state.log_post) - (global - log_posterior(&chain, state.gamma(), &hyper)))
                                .abs()
                                < 1e-9
                        );
                    }
                    None => assert_eq!(global, f64::NEG_INFINITY),
                }
                accept_reject(&mut state, p, &chain, &hyper, &mut rng);
                assert!(state.coherence_error(&chain, &hyper) < 1e-9);
            }
        }
    }

    #[test]
    fn run_chain_trace_is_valid_and_deterministic() {
        let chain = test_chain(40, 11);
        let hyper = Hyperparameters::recommended(40, 3);
        let mut config = SamplerConfig::for_chain_len(40, 5);
        config.iterations = 2001;
        let a = run_chain(&chain, &hyper, &config, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = run_chain(&chain, &hyper, &config, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a.len(), 1001);
        assert_eq!(a, b);
        for i in 0..a.len() {
            assert!(is_valid_gamma(&a.gamma(i), &chain));
        }
        assert!(a.acceptance.add_delete.proposed == 2001);
        assert!(a.acceptance.swap.proposed == 100);
    }

    #[test]
    fn run_chain_rejects_unnormalized_input() {
        let chain = PolygonalChain::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
            Point2::new(-1.0, 1.0),
            Point2::new(-1.0, 0.5),
        ])
        .unwrap();
        let hyper = Hyperparameters::recommended(6, 3);
        let config = SamplerConfig::for_chain_len(6, 0);
        assert!(run_chain(&chain, &hyper, &config, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn initialization_fails_when_impossible() {
        // A triangle cannot host 3 non-adjacent landmarks.
        let chain = PolygonalChain::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
        .normalize()
        .unwrap();
        let hyper = Hyperparameters::recommended(3, 3);
        let config = SamplerConfig::for_chain_len(3, 0);
        let err = run_chain(&chain, &hyper, &config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::Initialization(_)));
    }

    #[test]
    fn multi_chain_seeding() {
        let chain = test_chain(30, 4);
        let hyper = Hyperparameters::recommended(30, 3);
        let mut config = SamplerConfig::for_chain_len(30, 42);
        config.n_chains = 1;
        let single = run_multi_chain(&chain, &hyper, &config).unwrap();
        let direct = run_chain(&chain, &hyper, &config, &mut chain_rng(42, 0)).unwrap();
        assert_eq!(single[0], direct);
        config.n_chains = 3;
        let many = run_multi_chain(&chain, &hyper, &config).unwrap();
        assert_eq!(many[0], direct);
        assert!(many[0] != many[1] || many[1] != many[2]);
    }
}
