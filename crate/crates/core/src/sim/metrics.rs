use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, PolygonalChain};
use crate::model::LandmarkIndicator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn same_len(a: &LandmarkIndicator, b: &LandmarkIndicator) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid("indicators differ in length"));
    }
    Ok(())
}

/// Position-exact confusion counts.
pub fn confusion(gamma_true: &LandmarkIndicator, gamma_hat: &LandmarkIndicator) -> Result<ConfusionMatrix> {
    same_len(gamma_true, gamma_hat)?;
    let mut cm = ConfusionMatrix::default();
    for (&t, &h) in gamma_true.as_slice().iter().zip(gamma_hat.as_slice()) {
        match (t, h) {
            (true, true) => cm.tp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Matthews correlation; 0 when any marginal is empty.
pub fn mcc_from_confusion(cm: &ConfusionMatrix) -> f64 {
    let (tp, tn, fp, fn_) = (cm.tp as f64, cm.tn as f64, cm.fp as f64, cm.fn_ as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        0.0
    } else {
        (tp * tn - fp * fn_) / denom.sqrt()
    }
}

pub fn mcc(gamma_true: &LandmarkIndicator, gamma_hat: &LandmarkIndicator) -> Result<f64> {
    Ok(mcc_from_confusion(&confusion(gamma_true, gamma_hat)?))
}

/// Counts over unordered vertex pairs: `n1` together in both partitions,
/// `n2` together only in the first, `n3` together only in the second, `n4`
/// apart in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub n4: u64,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

pub fn pair_counts(z_a: &[usize], z_b: &[usize]) -> Result<PairCounts> {
    if z_a.len() != z_b.len() {
        return Err(Error::invalid("label vectors differ in length"));
    }
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut ca: HashMap<usize, u64> = HashMap::new();
    let mut cb: HashMap<usize, u64> = HashMap::new();
    for (&a, &b) in z_a.iter().zip(z_b) {
        *joint.entry((a, b)).or_default() += 1;
        *ca.entry(a).or_default() += 1;
        *cb.entry(b).or_default() += 1;
    }
    let n1: u64 = joint.values().map(|&c| choose2(c)).sum();
    let sa: u64 = ca.values().map(|&c| choose2(c)).sum();
    let sb: u64 = cb.values().map(|&c| choose2(c)).sum();
    let total = choose2(z_a.len() as u64);
    Ok(PairCounts {
        n1,
        n2: sa - n1,
        n3: sb - n1,
        n4: total + n1 - sa - sb,
    })
}

/// Adjusted Rand index from pair counts. When the chance-expected index
/// equals its maximum (both partitions trivial), returns 1 for identical
/// pair structure and 0 otherwise.
pub fn ari_from_pair_counts(p: &PairCounts) -> f64 {
    let (n1, n2, n3, n4) = (p.n1 as f64, p.n2 as f64, p.n3 as f64, p.n4 as f64);
    let total = n1 + n2 + n3 + n4;
    let expected = (n1 + n2) * (n1 + n3) + (n3 + n4) * (n2 + n4);
    let denom = total * total - expected;
    if denom == 0.0 {
        return if p.n2 == 0 && p.n3 == 0 { 1.0 } else { 0.0 };
    }
    (total * (n1 + n4) - expected) / denom
}

pub fn ari(z_true: &[usize], z_hat: &[usize]) -> Result<f64> {
    Ok(ari_from_pair_counts(&pair_counts(z_true, z_hat)?))
}

/// Greedy one-to-one matching of predicted to true landmarks within circular
/// index distance `window`, closest pairs first.
pub fn windowed_match(
    gamma_true: &LandmarkIndicator,
    gamma_hat: &LandmarkIndicator,
    window: usize,
) -> Result<ConfusionMatrix> {
    same_len(gamma_true, gamma_hat)?;
    let m = gamma_true.len();
    let truth = gamma_true.positions();
    let pred = gamma_hat.positions();
    let mut pairs = Vec::new();
    for (ti, &t) in truth.iter().enumerate() {
        for (pi, &p) in pred.iter().enumerate() {
            let d = (t + m - p) % m;
            let d = d.min(m - d);
            if d <= window {
                pairs.push((d, ti, pi));
            }
        }
    }
    pairs.sort_unstable();
    let mut used_t = vec![false; truth.len()];
    let mut used_p = vec![false; pred.len()];
    let mut tp = 0;
    for (_, ti, pi) in pairs {
        if !used_t[ti] && !used_p[pi] {
            used_t[ti] = true;
            used_p[pi] = true;
            tp += 1;
        }
    }
    let fp = pred.len() - tp;
    let fn_ = truth.len() - tp;
    Ok(ConfusionMatrix {
        tp,
        fp,
        fn_,
        tn: m.saturating_sub(tp + fp + fn_),
    })
}

/// Indicator of the strict convex-hull vertices.
pub fn convex_hull_baseline(chain: &PolygonalChain) -> Result<LandmarkIndicator> {
    LandmarkIndicator::from_positions(chain.len(), &convex_hull(chain)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::model::cumulative_labels;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(m: usize, p: &[usize]) -> LandmarkIndicator {
        LandmarkIndicator::from_positions(m, p).unwrap()
    }

    #[test]
    fn mcc_examples() {
        let t = g(10, &[0, 3, 6]);
        assert_eq!(mcc(&t, &t).unwrap(), 1.0);
        let comp = LandmarkIndicator::new(t.as_slice().iter().map(|b| !b).collect());
        assert!(mcc(&t, &comp).unwrap() < 0.0);
        let cm = ConfusionMatrix {
            tp: 2,
            tn: 5,
            fp: 1,
            fn_: 1,
        };
        assert!((mcc_from_confusion(&cm) - 0.5).abs() < 1e-15);
        assert_eq!(mcc(&t, &g(10, &[])).unwrap(), 0.0);
    }

    // Equivalent closed form of the index, used as an independent check.
    fn ari_alt(p: &PairCounts) -> f64 {
        let (n1, n2, n3, n4) = (p.n1 as f64, p.n2 as f64, p.n3 as f64, p.n4 as f64);
        2.0 * (n1 * n4 - n2 * n3) / ((n1 + n2) * (n2 + n4) + (n1 + n3) * (n3 + n4))
    }

    fn naive_pairs(a: &[usize], b: &[usize]) -> PairCounts {
        let mut p = PairCounts {
            n1: 0,
            n2: 0,
            n3: 0,
            n4: 0,
        };
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                match (a[i] == a[j], b[i] == b[j]) {
                    (true, true) => p.n1 += 1,
                    (true, false) => p.n2 += 1,
                    (false, true) => p.n3 += 1,
                    (false, false) => p.n4 += 1,
                }
            }
        }
        p
    }

    #[test]
    fn ari_examples() {
        let z = [1, 1, 2, 2, 3, 3, 1];
        assert_eq!(ari(&z, &z).unwrap(), 1.0);
        let permuted: Vec<usize> = z.iter().map(|&l| [0, 3, 1, 2][l]).collect();
        assert_eq!(ari(&z, &permuted).unwrap(), 1.0);
        assert_eq!(ari(&[1; 5], &[1; 5]).unwrap(), 1.0);
    }

    #[test]
    fn ari_near_zero_for_independent_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mean: f64 = (0..100)
            .map(|_| {
                let a: Vec<usize> = (0..100).map(|_| rng.random_range(0..5)).collect();
                let b: Vec<usize> = (0..100).map(|_| rng.random_range(0..5)).collect();
                ari(&a, &b).unwrap()
            })
            .sum::<f64>()
            / 100.0;
        assert!(mean.abs() < 0.05, "{mean}");
    }

    #[test]
    fn windowed_examples() {
        let t = g(40, &[0, 10, 20, 30]);
        let cm = windowed_match(&t, &t, 5).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (4, 0, 0, 36));
        let off = g(40, &[3, 13, 23, 33]);
        let cm = windowed_match(&t, &off, 5).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_), (4, 0, 0));
        let cm = windowed_match(&t, &off, 2).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_), (0, 4, 4));
        let wrap = g(40, &[38, 10, 20, 30]);
        assert_eq!(windowed_match(&t, &wrap, 2).unwrap().tp, 4);

        let t = g(20, &[5]);
        let two = g(20, &[4, 7]);
        let cm = windowed_match(&t, &two, 5).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (1, 1, 0, 18));
    }

    #[test]
    fn hull_baseline_examples() {
        let sq: Vec<Point2> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| Point2::new(x, y))
            .collect();
        let c = PolygonalChain::new(sq).unwrap();
        assert_eq!(convex_hull_baseline(&c).unwrap().count(), 4);
        let star: Vec<Point2> = (0..10)
            .map(|i| {
                let r = if i % 2 == 0 { 1.0 } else { 0.4 };
                let t = std::f64::consts::PI * i as f64 / 5.0;
                Point2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let c = PolygonalChain::new(star).unwrap();
        assert_eq!(convex_hull_baseline(&c).unwrap().positions(), vec![0, 2, 4, 6, 8]);
    }

    proptest! {
        #[test]
        fn metric_invariants(
            bits_t in prop::collection::vec(any::<bool>(), 6..60),
            seed in any::<u64>(),
        ) {
            let m = bits_t.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bits_h: Vec<bool> = (0..m).map(|_| rng.random_bool(0.3)).collect();
            let t = LandmarkIndicator::new(bits_t);
            let h = LandmarkIndicator::new(bits_h);
            let v = mcc(&t, &h).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v));
            let cm = confusion(&t, &h).unwrap();
            prop_assert_eq!(cm.tp + cm.tn + cm.fp + cm.fn_, m);
            let za = cumulative_labels(t.as_slice());
            let zb = cumulative_labels(h.as_slice());
            let p = pair_counts(&za, &zb).unwrap();
            prop_assert_eq!(p, naive_pairs(&za, &zb));
            let a = ari_from_pair_counts(&p);
            prop_assert!(a <= 1.0 + 1e-12);
            let alt_denom = (p.n1 + p.n2) * (p.n2 + p.n4) + (p.n1 + p.n3) * (p.n3 + p.n4);
            if alt_denom > 0 {
                prop_assert!((a - ari_alt(&p)).abs() < 1e-9);
            }
            let w = windowed_match(&t, &h, 5).unwrap();
            prop_assert_eq!(w.tp + w.fn_, t.count());
            prop_assert_eq!(w.tp + w.fp, h.count());
        }
    }
}
