//! Synthetic benchmark: random simple polygons, binned and perturbed into
//! noisy chains with known landmarks, plus accuracy metrics and the
//! convex-hull baseline.

mod bench;
mod generate;
mod metrics;

pub use bench::{run_benchmark, BenchRow, BenchSettings, BenchmarkResults, Method, ScenarioMedians};
pub use generate::{bin_and_perturb, generate_polygon, simulate, SimScenario, SimulatedDataset};
pub use metrics::{
    ari, ari_from_pair_counts, confusion, convex_hull_baseline, mcc, mcc_from_confusion, pair_counts, windowed_match,
    ConfusionMatrix, PairCounts,
};

/// Seed of an independent stream derived from a master seed and a stream
/// index (splitmix64 finalizer).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
