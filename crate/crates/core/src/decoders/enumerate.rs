use super::{ChildOrder, NATURAL_WINDOW};

/// Integers in ascending distance from a center.
///
/// Equidistant candidates are ordered by smaller `|z|`, then smaller `z`.
#[derive(Debug, Clone, Copy)]
pub struct SchnorrEuchner {
    center: f64,
    lo: i64,
    hi: i64,
}

#[inline]
fn closer(a: i64, b: i64, c: f64) -> bool {
    let da = (a as f64 - c).abs();
    let db = (b as f64 - c).abs();
    if da != db {
        return da < db;
    }
    (a.abs(), a) < (b.abs(), b)
}

impl SchnorrEuchner {
    pub fn new(center: f64) -> Self {
        let f = center.floor() as i64;
        Self {
            center,
            lo: f,
            hi: f + 1,
        }
    }

    /// Nearest integer to `center` under the tie-break rule.
    pub fn round(center: f64) -> i64 {
        Self::new(center).next_value()
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    #[inline]
    pub fn next_value(&mut self) -> i64 {
        if closer(self.lo, self.hi, self.center) {
            self.lo -= 1;
            self.lo + 1
        } else {
            self.hi += 1;
            self.hi - 1
        }
    }
}

/// Child generator for either ordering. Natural order is finite.
#[derive(Debug, Clone, Copy)]
pub enum ChildEnumerator {
    Se(SchnorrEuchner),
    Natural { center: f64, next: i64, end: i64 },
}

impl ChildEnumerator {
    pub fn new(order: ChildOrder, center: f64) -> Self {
        match order {
            ChildOrder::SchnorrEuchner => ChildEnumerator::Se(SchnorrEuchner::new(center)),
            ChildOrder::Natural => {
                let r = SchnorrEuchner::round(center);
                ChildEnumerator::Natural {
                    center,
                    next: r - NATURAL_WINDOW,
                    end: r + NATURAL_WINDOW,
                }
            }
        }
    }

    pub fn center(&self) -> f64 {
        match self {
            ChildEnumerator::Se(se) => se.center(),
            ChildEnumerator::Natural { center, .. } => *center,
        }
    }

    #[inline]
    pub fn next_child(&mut self) -> Option<i64> {
        match self {
            ChildEnumerator::Se(se) => Some(se.next_value()),
            ChildEnumerator::Natural { next, end, .. } => {
                if *next > *end {
                    None
                } else {
                    *next += 1;
                    Some(*next - 1)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take(c: f64, n: usize) -> Vec<i64> {
        let mut se = SchnorrEuchner::new(c);
        (0..n).map(|_| se.next_value()).collect()
    }

    #[test]
    fn zigzag_order() {
        assert_eq!(take(0.2, 5), vec![0, 1, -1, 2, -2]);
        assert_eq!(take(0.8, 5), vec![1, 0, 2, -1, 3]);
        assert_eq!(take(-1.3, 4), vec![-1, -2, 0, -3]);
    }

    #[test]
    fn ties_prefer_small_magnitude() {
        assert_eq!(take(0.5, 4), vec![0, 1, -1, 2]);
        assert_eq!(take(-0.5, 4), vec![0, -1, 1, -2]);
        assert_eq!(take(2.0, 3), vec![2, 1, 3]);
        assert_eq!(take(0.0, 3), vec![0, -1, 1]);
    }

    #[test]
    fn distances_non_decreasing() {
        for &c in &[0.37, -4.91, 12.5, 3.0] {
            let v = take(c, 30);
            for w in v.windows(2) {
                assert!((w[0] as f64 - c).abs() <= (w[1] as f64 - c).abs() + 1e-15);
            }
        }
    }

    #[test]
    fn natural_window() {
        let mut e = ChildEnumerator::new(ChildOrder::Natural, 1.2);
        let v: Vec<i64> = std::iter::from_fn(|| e.next_child()).collect();
        assert_eq!(v, (-2..=4).collect::<Vec<_>>());
    }
}
