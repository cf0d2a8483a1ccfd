//! Best-first (Stack) sequential decoder.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeSet;

use super::{ChildEnumerator, ChildOrder, DecodeOutcome, DecoderParams, TraceEvent, Tree};
use crate::frontend::DecodingProblem;

const ROOT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    level: u16,
    z: i64,
    partial: f64,
    metric: f64,
    /// Generator of this node's later siblings (Schnorr-Euchner mode only).
    siblings: Option<ChildEnumerator>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    metric: f64,
    seq: Reverse<u64>,
    node: u32,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.metric
            .total_cmp(&other.metric)
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    tree: &'a Tree,
    bias: f64,
    order: ChildOrder,
    capacity: Option<usize>,
    nodes: Vec<Node>,
    open: BTreeSet<Key>,
    seq: u64,
    scratch: Vec<i64>,
    metric_evals: u64,
}

impl<'a> Search<'a> {
    fn push(&mut self, node: Node) {
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        self.open.insert(Key {
            metric: node.metric,
            seq: Reverse(self.seq),
            node: idx,
        });
        self.seq += 1;
        if let Some(cap) = self.capacity {
            if self.open.len() > cap {
                self.open.pop_first();
            }
        }
    }

    fn parent_of(&self, node: &Node) -> (f64, f64) {
        if node.parent == ROOT {
            (0.0, 0.0)
        } else {
            let p = &self.nodes[node.parent as usize];
            (p.partial, p.metric)
        }
    }

    /// Fills `scratch` with the path of `idx` and returns the center of the
    /// next coordinate below it.
    fn child_center(&mut self, idx: Option<u32>) -> f64 {
        let m = self.tree.m;
        let mut level = 0;
        let mut cur = idx.unwrap_or(ROOT);
        let mut first = true;
        while cur != ROOT {
            let n = &self.nodes[cur as usize];
            if first {
                level = n.level as usize;
                first = false;
            }
            self.scratch[m - n.level as usize] = n.z;
            cur = n.parent;
        }
        self.tree.center(m - level - 1, &self.scratch)
    }

    fn make_child(&mut self, parent: Option<u32>, z: i64, center: f64, en: Option<ChildEnumerator>) -> Node {
        let (p_partial, p_metric, level) = match parent {
            None => (0.0, 0.0, 1),
            Some(p) => {
                let n = &self.nodes[p as usize];
                (n.partial, n.metric, n.level as usize + 1)
            }
        };
        let i = self.tree.index(level);
        let branch = self.tree.branch(i, z, center);
        self.metric_evals += 1;
        let metric = p_metric + self.bias - branch;
        debug_assert!((metric - (self.bias * level as f64 - (p_partial + branch))).abs() <= 1e-9 * (1.0 + metric.abs()));
        Node {
            parent: parent.unwrap_or(ROOT),
            level: level as u16,
            z,
            partial: p_partial + branch,
            metric,
            siblings: en,
        }
    }

    fn expand(&mut self, parent: Option<u32>) {
        let center = self.child_center(parent);
        let mut en = ChildEnumerator::new(self.order, center);
        match self.order {
            ChildOrder::SchnorrEuchner => {
                let z = en.next_child().expect("Schnorr-Euchner enumeration is infinite");
                let child = self.make_child(parent, z, center, Some(en));
                self.push(child);
            }
            ChildOrder::Natural => {
                while let Some(z) = en.next_child() {
                    let child = self.make_child(parent, z, center, None);
                    self.push(child);
                }
            }
        }
    }

    fn push_next_sibling(&mut self, idx: u32) {
        let node = self.nodes[idx as usize];
        if let Some(mut en) = node.siblings {
            let z = en.next_child().expect("Schnorr-Euchner enumeration is infinite");
            let parent = (node.parent != ROOT).then_some(node.parent);
            let sib = self.make_child(parent, z, en.center(), Some(en));
            let (_, pm) = self.parent_of(&node);
            debug_assert!(sib.metric <= node.metric + 1e-9 * (1.0 + pm.abs()));
            self.push(sib);
        }
    }
}

/// Stack decoder: repeatedly extends the open path with the largest metric
/// and stops when that path reaches full length.
pub fn stack_decode(prob: &DecodingProblem, params: &DecoderParams) -> DecodeOutcome {
    let tree = Tree::new(prob);
    let m = tree.m;
    let mut out = DecodeOutcome::new(m);
    let mut s = Search {
        tree: &tree,
        bias: params.bias,
        order: params.child_order,
        capacity: params.stack_capacity,
        nodes: Vec::with_capacity(4 * m),
        open: BTreeSet::new(),
        seq: 0,
        scratch: vec![0; m],
        metric_evals: 0,
    };

    // The root is removed immediately; it does not count toward C.
    s.expand(None);

    while let Some(key) = s.open.pop_last() {
        let idx = key.node;
        let node = s.nodes[idx as usize];
        let level = node.level as usize;
        out.nodes += 1;
        out.visits_per_level[level - 1] += 1;
        if params.record_trace {
            out.trace.push(TraceEvent { level, metric: node.metric });
        }
        if level == m {
            let mut z = vec![0i64; m];
            let mut cur = idx;
            while cur != ROOT {
                let n = &s.nodes[cur as usize];
                z[m - n.level as usize] = n.z;
                cur = n.parent;
            }
            out.z_hat = Some(z);
            out.metric = Some(node.metric);
            out.frontier_best = s.open.last().map(|k| k.metric);
            out.metric_evals = s.metric_evals;
            return out;
        }
        if params.max_nodes.is_some_and(|limit| out.nodes >= limit) {
            break;
        }
        s.push_next_sibling(idx);
        s.expand(Some(idx));
    }

    out.timed_out = true;
    out.metric_evals = s.metric_evals;
    out
}
