//! Exact closest-point search: depth-first Schnorr-Euchner enumeration with
//! radius shrinking on every improved leaf.

use super::{DecodeOutcome, SchnorrEuchner, Tree};
use crate::error::{Error, Result};
use crate::frontend::DecodingProblem;
use crate::linalg::{RealMatrix, RealVector};

struct Best {
    z: Option<Vec<i64>>,
    dist: f64,
}

/// Enumerates every integer point with `|y - R z|^2 < radius_sq`, keeping the
/// best. `skip_zero` excludes the all-zero vector (shortest-vector mode).
fn search(
    tree: &Tree,
    radius_sq: f64,
    skip_zero: bool,
    budget: Option<u64>,
    out: &mut DecodeOutcome,
) -> std::result::Result<Best, u64> {
    let m = tree.m;
    let mut best = Best { z: None, dist: radius_sq };
    let mut z = vec![0i64; m];
    let mut en: Vec<SchnorrEuchner> = vec![SchnorrEuchner::new(0.0); m + 1];
    // partial[k] = squared distance of the path down to level k.
    let mut partial = vec![0.0; m + 1];

    let mut level = 1usize;
    en[1] = SchnorrEuchner::new(tree.center(tree.index(1), &z));
    loop {
        let i = tree.index(level);
        let cand = en[level].next_value();
        let d = partial[level - 1] + tree.branch(i, cand, en[level].center());
        out.metric_evals += 1;
        if d >= best.dist {
            // Later siblings are no closer; climb.
            level -= 1;
            if level == 0 {
                break;
            }
            continue;
        }
        z[i] = cand;
        partial[level] = d;
        out.nodes += 1;
        out.visits_per_level[level - 1] += 1;
        if budget.is_some_and(|b| out.nodes > b) {
            return Err(out.nodes);
        }
        if level == m {
            if !(skip_zero && z.iter().all(|&v| v == 0)) {
                best.dist = d;
                best.z = Some(z.clone());
                // The next sibling is farther than this leaf.
                level -= 1;
                if level == 0 {
                    break;
                }
            }
            continue;
        }
        level += 1;
        en[level] = SchnorrEuchner::new(tree.center(tree.index(level), &z));
    }
    Ok(best)
}

/// Closest integer point to `y'` under `R`.
pub fn sphere_decode(prob: &DecodingProblem) -> DecodeOutcome {
    sphere_decode_with_radius(prob, f64::INFINITY)
}

/// Same as [`sphere_decode`] with a finite initial squared radius; returns no
/// point when the sphere is empty.
pub fn sphere_decode_with_radius(prob: &DecodingProblem, radius_sq: f64) -> DecodeOutcome {
    let tree = Tree::new(prob);
    let mut out = DecodeOutcome::new(tree.m);
    let best = search(&tree, radius_sq, false, None, &mut out).expect("no budget set");
    out.z_hat = best.z;
    out
}

/// Shortest nonzero vector of the lattice generated by the columns of the
/// upper-triangular `r`: returns its integer coordinates and squared norm.
///
/// The search starts at the smallest column norm.
pub fn shortest_nonzero(r: &RealMatrix, budget: u64) -> Result<(Vec<i64>, f64)> {
    let m = r.ncols();
    let prob = DecodingProblem::new(r.clone(), RealVector::zeros(m))?;
    let tree = Tree::new(&prob);
    let min_col = r.column_iter().map(|c| c.norm_squared()).fold(f64::INFINITY, f64::min);
    let mut out = DecodeOutcome::new(m);
    let best = search(&tree, min_col * (1.0 + 1e-9), true, Some(budget), &mut out)
        .map_err(Error::GeometryUnavailable)?;
    let z = best.z.ok_or(Error::GeometryUnavailable(out.nodes))?;
    Ok((z, best.dist))
}
