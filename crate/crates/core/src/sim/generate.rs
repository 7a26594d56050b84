use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{conflicting_edges, is_self_intersecting, Point2, PolygonalChain};
use crate::model::LandmarkIndicator;

use super::derive_seed;

const EDGE_MIN: f64 = 50.0;
const EDGE_MAX: f64 = 100.0;
const POLYGON_ATTEMPTS: usize = 10_000;
const PERTURB_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub k_true: usize,
    pub n: usize,
    pub sigma2: f64,
    pub equilateral: bool,
    pub replicates: usize,
    pub seed: u64,
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        if self.k_true < 3 {
            return Err(Error::invalid("k_true must be at least 3"));
        }
        if self.n <= 2 * self.k_true {
            return Err(Error::invalid("n must exceed 2 k_true"));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::invalid("sigma2 must be finite and non-negative"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDataset {
    /// Normalized noisy chain with `n - 1` distinct vertices.
    pub chain: PolygonalChain,
    pub gamma_true: LandmarkIndicator,
    pub scenario: SimScenario,
    /// The noisy chain before normalization and rotation.
    pub raw_chain: PolygonalChain,
    /// Perpendicular displacement of each non-landmark vertex in raw units,
    /// in raw chain order.
    pub displacements: Vec<f64>,
}

/// Random simple polygon with `k` vertices and edge lengths in [50, 100].
///
/// The first `k - 2` edges take uniform directions; the last two close the
/// polygon exactly at a two-circle intersection. Attempts that cannot close
/// or that self-intersect are redrawn.
pub fn generate_polygon<R: Rng + ?Sized>(k: usize, equilateral: bool, rng: &mut R) -> Result<Vec<Point2>> {
    if k < 3 {
        return Err(Error::invalid("a polygon needs at least 3 vertices"));
    }
    for _ in 0..POLYGON_ATTEMPTS {
        let lengths: Vec<f64> = if equilateral {
            vec![rng.random_range(EDGE_MIN..=EDGE_MAX); k]
        } else {
            (0..k).map(|_| rng.random_range(EDGE_MIN..=EDGE_MAX)).collect()
        };
        let mut pts = vec![Point2::new(0.0, 0.0)];
        for &l in &lengths[..k - 2] {
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            let p = *pts.last().unwrap();
            pts.push(Point2::new(p.x + l * t.cos(), p.y + l * t.sin()));
        }
        let p = *pts.last().unwrap();
        let (a, b) = (lengths[k - 2], lengths[k - 1]);
        let d = p.norm();
        if d < 1e-9 || d > a + b || d < (a - b).abs() {
            continue;
        }
        // Q with |Q - P| = a and |Q| = b.
        let along = (b * b - a * a + d * d) / (2.0 * d);
        let h2 = b * b - along * along;
        if h2 < 0.0 {
            continue;
        }
        let h = h2.sqrt() * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let (ux, uy) = (p.x / d, p.y / d);
        pts.push(Point2::new(along * ux - h * uy, along * uy + h * ux));
        if !is_self_intersecting(&pts) {
            return Ok(pts);
        }
    }
    Err(Error::Generation(format!(
        "no simple polygon with {k} vertices after {POLYGON_ATTEMPTS} attempts"
    )))
}

/// Interval counts per edge summing to `total`, proportional to edge length
/// by largest remainder, with at least two per edge.
fn allocate_intervals(lengths: &[f64], total: usize) -> Vec<usize> {
    let perimeter: f64 = lengths.iter().sum();
    let ideal: Vec<f64> = lengths.iter().map(|l| total as f64 * l / perimeter).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(2)).collect();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = ideal[i] - ideal[i].floor();
        let rj = ideal[j] - ideal[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    let mut assigned: usize = counts.iter().sum();
    let mut cursor = 0;
    while assigned < total {
        counts[order[cursor % order.len()]] += 1;
        assigned += 1;
        cursor += 1;
    }
    while assigned > total {
        let i = (0..counts.len())
            .filter(|&i| counts[i] > 2)
            .min_by(|&i, &j| (ideal[i] - counts[i] as f64).total_cmp(&(ideal[j] - counts[j] as f64)))
            .expect("total >= 2 k");
        counts[i] -= 1;
        assigned -= 1;
    }
    counts
}

/// Bins the landmark polygon into `n - 1` equal-width intervals (per-edge
/// counts proportional to edge length), displaces every interior point
/// perpendicular to its edge by `N(0, sigma2)` in raw units, normalizes, and
/// rotates the start index uniformly at random.
///
/// Displacements of vertices on crossing edges are redrawn until the chain
/// is simple, so at high noise relative to the interval width the retained
/// displacements are slightly less spread than `sigma2`.
pub fn bin_and_perturb<R: Rng + ?Sized>(
    polygon: &[Point2],
    n: usize,
    sigma2: f64,
    rng: &mut R,
) -> Result<SimulatedDataset> {
    let k = polygon.len();
    if k < 3 {
        return Err(Error::invalid("the landmark polygon needs at least 3 vertices"));
    }
    if n <= 2 * k {
        return Err(Error::invalid(format!("n = {n} must exceed 2 k = {}", 2 * k)));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid("sigma2 must be finite and non-negative"));
    }
    let m = n - 1;
    let lengths: Vec<f64> = (0..k).map(|e| polygon[e].distance(polygon[(e + 1) % k])).collect();
    let counts = allocate_intervals(&lengths, m);
    let noise = Normal::new(0.0, sigma2.sqrt()).map_err(|e| Error::invalid(e.to_string()))?;

    // Unperturbed positions, unit normals, and landmark flags in chain order.
    let mut base = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    let mut landmarks = Vec::with_capacity(k);
    for e in 0..k {
        let (a, b) = (polygon[e], polygon[(e + 1) % k]);
        let dir = b - a;
        let normal = Point2::new(-dir.y / lengths[e], dir.x / lengths[e]);
        landmarks.push(base.len());
        base.push(a);
        normals.push(None);
        for j in 1..counts[e] {
            let t = j as f64 / counts[e] as f64;
            base.push(Point2::new(a.x + t * dir.x, a.y + t * dir.y));
            normals.push(Some(normal));
        }
    }
    let mut eps: Vec<f64> = normals
        .iter()
        .map(|nrm| if nrm.is_some() { noise.sample(rng) } else { 0.0 })
        .collect();
    let place = |i: usize, eps: &[f64]| match normals[i] {
        Some(nrm) => Point2::new(base[i].x + eps[i] * nrm.x, base[i].y + eps[i] * nrm.y),
        None => base[i],
    };

    // Redraw the displacements of vertices on crossing edges until the chain
    // is simple.
    let mut pts: Vec<Point2> = (0..m).map(|i| place(i, &eps)).collect();
    let mut rounds = 0;
    loop {
        let bad = conflicting_edges(&pts);
        if bad.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > PERTURB_ATTEMPTS {
            return Err(Error::Generation(format!(
                "perturbed chain still self-intersecting after {PERTURB_ATTEMPTS} redraws"
            )));
        }
        for e in bad {
            for i in [e, (e + 1) % m] {
                if normals[i].is_some() {
                    eps[i] = noise.sample(rng);
                    pts[i] = place(i, &eps);
                }
            }
        }
    }
    let displacements: Vec<f64> = (0..m).filter(|&i| normals[i].is_some()).map(|i| eps[i]).collect();
    let raw = pts;

    let raw_chain = PolygonalChain::new(raw)?;
    let shift = rng.random_range(0..m);
    let chain = raw_chain.normalize()?.rotated(shift);
    let rotated: Vec<usize> = landmarks.iter().map(|&l| (l + m - shift) % m).collect();
    let gamma_true = LandmarkIndicator::from_positions(m, &rotated)?;
    let scenario = SimScenario {
        k_true: k,
        n,
        sigma2,
        equilateral: false,
        replicates: 1,
        seed: 0,
    };
    Ok(SimulatedDataset {
        chain,
        gamma_true,
        scenario,
        raw_chain,
        displacements,
    })
}

/// Replicate `replicate` of `scenario`, reproducible from the scenario seed.
pub fn simulate(scenario: &SimScenario, replicate: usize) -> Result<SimulatedDataset> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(scenario.seed, replicate as u64));
    let polygon = generate_polygon(scenario.k_true, scenario.equilateral, &mut rng)?;
    let mut ds = bin_and_perturb(&polygon, scenario.n, scenario.sigma2, &mut rng)?;
    ds.scenario = *scenario;
    Ok(ds)
}
