use serde::{Deserialize, Serialize};

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score 95% interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> Interval {
    if n == 0 {
        return Interval { estimate: 0.0, lo: 0.0, hi: 1.0 };
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval { estimate: p, lo: (center - half).max(0.0).min(p), hi: (center + half).min(1.0).max(p) }
}

/// Normal-approximation 95% interval for a sample mean.
pub fn mean_interval(xs: &[f64]) -> Interval {
    if xs.is_empty() {
        return Interval { estimate: 0.0, lo: 0.0, hi: 0.0 };
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return Interval { estimate: mean, lo: mean, hi: mean };
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z95 * (var / n).sqrt();
    Interval { estimate: mean, lo: mean - half, hi: mean + half }
}
