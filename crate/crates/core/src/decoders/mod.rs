//! Tree-search decoders over an upper-triangular integer least-squares
//! problem `min |y' - R z|^2`, `z` integer.
//!
//! Levels count from the bottom of `R`: level `k` fixes the last `k`
//! coordinates of `z`. A node at level `k` carries the path metric
//! `mu = b*k - |y'_1^k - R_kk z_1^k|^2`.

mod babai;
mod brute;
mod enumerate;
mod fano;
mod sphere;
mod stack;

use std::io::Write;

pub use babai::babai_decode;
pub use brute::{brute_force_clps, BRUTE_FORCE_BUDGET};
pub use enumerate::{ChildEnumerator, SchnorrEuchner};
pub use fano::fano_decode;
pub use sphere::{shortest_nonzero, sphere_decode, sphere_decode_with_radius};
pub use stack::stack_decode;

use crate::frontend::DecodingProblem;

/// Order in which the children of a node are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChildOrder {
    /// Ascending branch distance around the node's center (lazy, infinite).
    #[default]
    SchnorrEuchner,
    /// Ascending integer order over a finite window around the rounded center.
    Natural,
}

/// Half-width of the candidate window used by [`ChildOrder::Natural`].
pub const NATURAL_WINDOW: i64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    /// Bias per level, in squared-distance units.
    pub bias: f64,
    /// Fano threshold step.
    pub delta: f64,
    /// Time-out limit on visited nodes.
    pub max_nodes: Option<u64>,
    pub child_order: ChildOrder,
    /// Stack size limit; the worst entry is evicted when exceeded.
    pub stack_capacity: Option<usize>,
    /// Keep the sequence of visited nodes in [`DecodeOutcome::trace`].
    pub record_trace: bool,
}

impl Default for DecoderParams {
    fn default() -> Self {
        Self {
            bias: 0.6,
            delta: 0.25,
            max_nodes: None,
            child_order: ChildOrder::SchnorrEuchner,
            stack_capacity: None,
            record_trace: false,
        }
    }
}

impl DecoderParams {
    pub fn with_bias(bias: f64) -> Self {
        Self {
            bias,
            ..Self::default()
        }
    }
}

/// One visited node, as recorded in a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub level: usize,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecodeOutcome {
    /// Decoded integer vector; `None` on time-out.
    pub z_hat: Option<Vec<i64>>,
    /// Visited-node count `C`.
    pub nodes: u64,
    pub metric_evals: u64,
    pub timed_out: bool,
    /// Visits per level; index `k - 1` holds level `k`.
    pub visits_per_level: Vec<u64>,
    /// Path metric of the returned leaf (sequential decoders).
    pub metric: Option<f64>,
    /// Best metric left in the stack when the Stack decoder terminated.
    pub frontier_best: Option<f64>,
    pub trace: Vec<TraceEvent>,
}

impl DecodeOutcome {
    pub(crate) fn new(m: usize) -> Self {
        Self {
            visits_per_level: vec![0; m],
            ..Self::default()
        }
    }

    /// Writes the trace as `level metric` lines.
    pub fn write_trace<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for ev in &self.trace {
            writeln!(out, "{} {:.17e}", ev.level, ev.metric)?;
        }
        Ok(())
    }
}

/// Row-major copy of the problem data used by the search loops.
pub(crate) struct Tree {
    pub m: usize,
    r: Vec<f64>,
    y: Vec<f64>,
}

impl Tree {
    pub fn new(prob: &DecodingProblem) -> Self {
        let m = prob.dim();
        let mut r = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                r[i * m + j] = prob.r_upper[(i, j)];
            }
        }
        Self {
            m,
            r,
            y: prob.y_prime.iter().copied().collect(),
        }
    }

    /// Coordinate index decided at tree level `level` (1-based).
    #[inline]
    pub fn index(&self, level: usize) -> usize {
        self.m - level
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.r[i * self.m + i]
    }

    /// Center of coordinate `i` given the already decided `z[i+1..]`.
    #[inline]
    pub fn center(&self, i: usize, z: &[i64]) -> f64 {
        let row = &self.r[i * self.m..(i + 1) * self.m];
        let mut acc = self.y[i];
        for j in (i + 1)..self.m {
            acc -= row[j] * z[j] as f64;
        }
        acc / row[i]
    }

    /// Squared branch residual `(r_ii (z - c))^2`.
    #[inline]
    pub fn branch(&self, i: usize, z: i64, center: f64) -> f64 {
        let e = self.diag(i) * (z as f64 - center);
        e * e
    }

    pub fn distance(&self, z: &[i64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.m {
            let row = &self.r[i * self.m..(i + 1) * self.m];
            let mut acc = self.y[i];
            for j in i..self.m {
                acc -= row[j] * z[j] as f64;
            }
            total += acc * acc;
        }
        total
    }
}

/// Squared distance `|y' - R z|^2`.
pub fn residual_norm_sq(prob: &DecodingProblem, z: &[i64]) -> f64 {
    Tree::new(prob).distance(z)
}
