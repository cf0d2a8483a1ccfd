//! Fano sequential decoder with threshold step `delta` and `O(m)` memory.

use super::{ChildEnumerator, DecodeOutcome, DecoderParams, TraceEvent, Tree};
use crate::frontend::DecodingProblem;

struct Candidate {
    z: i64,
    branch: f64,
    metric: f64,
}

struct Path<'a> {
    tree: &'a Tree,
    params: &'a DecoderParams,
    /// Indexed by level; entry 0 is the root.
    metric: Vec<f64>,
    /// Coordinates in natural index order.
    z: Vec<i64>,
    /// Enumerator of the children of the node at level `k - 1`, stored at `k`.
    children: Vec<Option<ChildEnumerator>>,
    metric_evals: u64,
}

impl Path<'_> {
    fn candidate(&mut self, level: usize, z: i64) -> Candidate {
        let i = self.tree.index(level);
        let center = self.children[level].as_ref().unwrap().center();
        let branch = self.tree.branch(i, z, center);
        self.metric_evals += 1;
        Candidate {
            z,
            branch,
            metric: self.metric[level - 1] + self.params.bias - branch,
        }
    }

    /// Best child of the node at `level`.
    fn first_child(&mut self, level: usize) -> Option<Candidate> {
        let i = self.tree.index(level + 1);
        let center = self.tree.center(i, &self.z);
        let mut en = ChildEnumerator::new(self.params.child_order, center);
        let z = en.next_child()?;
        self.children[level + 1] = Some(en);
        Some(self.candidate(level + 1, z))
    }

    /// Next-best sibling of the node at `level`.
    fn next_sibling(&mut self, level: usize) -> Option<Candidate> {
        let z = self.children[level].as_mut().unwrap().next_child()?;
        Some(self.candidate(level, z))
    }
}

/// Fano decoder. Every forward move counts toward `C`, including moves that
/// revisit a node after the threshold was lowered.
pub fn fano_decode(prob: &DecodingProblem, params: &DecoderParams) -> DecodeOutcome {
    assert!(params.delta > 0.0, "Fano step must be positive");
    let tree = Tree::new(prob);
    let m = tree.m;
    let delta = params.delta;
    let mut out = DecodeOutcome::new(m);
    let mut p = Path {
        tree: &tree,
        params,
        metric: vec![0.0; m + 1],
        z: vec![0; m],
        children: vec![None; m + 1],
        metric_evals: 0,
    };

    let mut tau = 0.0_f64;
    let mut level = 0usize;
    let mut cand = p.first_child(0);

    loop {
        match cand.take() {
            Some(c) if c.metric >= tau => {
                level += 1;
                let i = tree.index(level);
                p.z[i] = c.z;
                p.metric[level] = c.metric;
                debug_assert!((p.metric[level] - (p.metric[level - 1] + params.bias - c.branch)).abs() < 1e-12 * (1.0 + c.metric.abs()));
                out.nodes += 1;
                out.visits_per_level[level - 1] += 1;
                if params.record_trace {
                    out.trace.push(TraceEvent { level, metric: c.metric });
                }
                if level == m {
                    out.z_hat = Some(p.z.clone());
                    out.metric = Some(c.metric);
                    out.metric_evals = p.metric_evals;
                    return out;
                }
                if params.max_nodes.is_some_and(|limit| out.nodes >= limit) {
                    break;
                }
                // First visit: tighten the threshold as far as the new metric allows.
                if p.metric[level - 1] < tau + delta {
                    let steps = ((c.metric - tau) / delta).floor();
                    if steps > 0.0 {
                        tau += steps * delta;
                    }
                }
                cand = p.first_child(level);
            }
            _ => {
                // Look back until a sibling clears the threshold, or lower it.
                loop {
                    if level == 0 || p.metric[level - 1] < tau {
                        tau -= delta;
                        cand = p.first_child(level);
                        break;
                    }
                    level -= 1;
                    cand = p.next_sibling(level + 1);
                    if cand.as_ref().is_some_and(|c| c.metric >= tau) {
                        break;
                    }
                }
            }
        }
    }

    out.timed_out = true;
    out.metric_evals = p.metric_evals;
    out
}
