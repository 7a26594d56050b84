use lasa_core::model::{log_posterior, Hyperparameters, LandmarkIndicator};
use lasa_core::{Point2, PolygonalChain};

/// Every configuration with finite posterior and its normalized probability,
/// by brute force over all `2^m` indicators.
pub fn exact_posterior(chain: &PolygonalChain, hyper: &Hyperparameters) -> Vec<(Vec<usize>, f64)> {
    let m = chain.len();
    assert!(m <= 20, "enumeration is exponential in the chain length");
    let mut states = Vec::new();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() < 3 {
            continue;
        }
        let bits: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        let gamma = LandmarkIndicator::new(bits);
        let lp = log_posterior(chain, &gamma, hyper);
        if lp.is_finite() {
            states.push((gamma.positions(), lp));
        }
    }
    let max = states.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = states.iter().map(|s| (s.1 - max).exp()).sum();
    states.into_iter().map(|(g, lp)| (g, (lp - max).exp() / z)).collect()
}

pub fn mode(post: &[(Vec<usize>, f64)]) -> Vec<usize> {
    post.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0.clone()
}

/// Polygon through `corners` with `per_edge - 1` jittered points on every
/// edge, normalized.
pub fn noisy_polygon(corners: &[(f64, f64)], per_edge: usize, jitter: &[f64]) -> PolygonalChain {
    noisy_polygon_with(corners, &vec![per_edge; corners.len()], jitter)
}

/// As [`noisy_polygon`] with a separate interval count per edge.
pub fn noisy_polygon_with(corners: &[(f64, f64)], per_edge: &[usize], jitter: &[f64]) -> PolygonalChain {
    let k = corners.len();
    let mut pts = Vec::new();
    let mut j = 0;
    for e in 0..k {
        let (ax, ay) = corners[e];
        let (bx, by) = corners[(e + 1) % k];
        let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
        let (nx, ny) = (-(by - ay) / len, (bx - ax) / len);
        pts.push(Point2::new(ax, ay));
        for s in 1..per_edge[e] {
            let t = s as f64 / per_edge[e] as f64;
            let eps = jitter[j % jitter.len()];
            j += 1;
            pts.push(Point2::new(
                ax + t * (bx - ax) + eps * nx,
                ay + t * (by - ay) + eps * ny,
            ));
        }
    }
    PolygonalChain::new(pts).unwrap().normalize().unwrap()
}
