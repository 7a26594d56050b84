//! Bayesian landmark detection for closed polygonal chains.
//!
//! A closed chain is segmented by a sparse set of landmark vertices. Each
//! non-landmark vertex is scored by its signed distance to the straight line
//! joining the two landmarks that bound its segment; the segment variances are
//! integrated out analytically, leaving a Student-t marginal likelihood per
//! segment. A Metropolis sampler over the landmark indicator vector explores
//! the posterior, and the resulting segmentation feeds piecewise roughness
//! features.
//!
//! Module map:
//!
//! - [`geometry`]: chains, normalization, distances, simplicity and hull tests.
//! - [`model`]: landmark indicator, segment labels, likelihood and prior.
//! - [`sampler`]: add-delete / swap / partial-shift Metropolis search.
//! - [`summaries`]: MAP, pairwise co-segmentation matrix, least-squares
//!   partition estimate, landmark credible intervals.
//! - [`features`]: roughness measures, sign transition frequencies, radial
//!   baselines and moment summaries.
//! - [`sim`]: synthetic chain generator, accuracy metrics, convex-hull
//!   baseline and the benchmark harness.

pub mod error;
pub mod features;
pub mod geometry;
pub mod model;
pub mod sampler;
pub mod sim;
pub mod summaries;

pub use error::{Error, Result};
pub use geometry::{LineCoefficients, Point2, PolygonalChain};
pub use model::{Hyperparameters, LandmarkIndicator, SegmentLabels};
pub use sampler::{McmcTrace, SamplerConfig};
