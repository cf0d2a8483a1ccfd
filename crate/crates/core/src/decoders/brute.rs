use super::Tree;
use crate::error::{Error, Result};
use crate::frontend::DecodingProblem;

/// Largest box the exhaustive search will enumerate; `[-8, 8]^6` fits.
pub const BRUTE_FORCE_BUDGET: u128 = 25_000_000;

/// Exhaustive minimizer of `|y' - R z|^2` over `z` in `[-bound, bound]^m`.
///
/// Every point of the box is evaluated. Points are visited with `z[m-1]`
/// most significant and ties go to the first one visited. If the true
/// minimizer lies outside the box the best boundary point is returned.
pub fn brute_force_clps(prob: &DecodingProblem, bound: i64) -> Result<Vec<i64>> {
    let m = prob.dim();
    let side = (2 * bound + 1) as u128;
    let total = side.checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded(total));
    }
    let tree = Tree::new(prob);
    let mut walk = Walk {
        tree: &tree,
        bound,
        z: vec![0; m],
        best: vec![-bound; m],
        best_d: f64::INFINITY,
    };
    walk.descend(m, 0.0);
    Ok(walk.best)
}

struct Walk<'a> {
    tree: &'a Tree,
    bound: i64,
    z: Vec<i64>,
    best: Vec<i64>,
    best_d: f64,
}

impl Walk<'_> {
    /// Enumerates coordinate `i - 1` given `z[i..]` and its partial distance.
    fn descend(&mut self, i: usize, partial: f64) {
        let idx = i - 1;
        let c = self.tree.center(idx, &self.z);
        for v in -self.bound..=self.bound {
            let d = partial + self.tree.branch(idx, v, c);
            self.z[idx] = v;
            if idx == 0 {
                if d < self.best_d {
                    self.best_d = d;
                    self.best.copy_from_slice(&self.z);
                }
            } else {
                self.descend(idx, d);
            }
        }
    }
}
