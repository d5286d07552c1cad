//! Fast-SSC decoding over a tree of rate-0, rate-1, repetition and
//! single-parity-check constituent codes.

use std::fmt;

use super::kernel::{f_minsum, g_combine, levels};
use crate::channel::hard;
use crate::polar::{polar_transform, PolarCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Rate0,
    Rate1,
    Rep,
    Spc,
    Branch,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Rate0 => "RATE0",
            NodeKind::Rate1 => "RATE1",
            NodeKind::Rep => "REP",
            NodeKind::Spc => "SPC",
            NodeKind::Branch => "BRANCH",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Node {
    start: usize,
    depth: u32,
    kind: NodeKind,
    /// Left child index; the right child follows the left subtree.
    children: Option<(usize, usize)>,
}

/// A leaf of the decomposition: span `[start, start + size)` of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Leaf {
    pub start: usize,
    pub size: usize,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastSscTree {
    len: usize,
    nodes: Vec<Node>,
}

fn classify(frozen: &[bool]) -> Option<NodeKind> {
    let (first, rest) = frozen.split_first().expect("nonempty span");
    let (last, init) = frozen.split_last().expect("nonempty span");
    if frozen.iter().all(|&f| f) {
        Some(NodeKind::Rate0)
    } else if frozen.iter().all(|&f| !f) {
        Some(NodeKind::Rate1)
    } else if !*last && init.iter().all(|&f| f) {
        Some(NodeKind::Rep)
    } else if *first && rest.iter().all(|&f| !f) {
        Some(NodeKind::Spc)
    } else {
        None
    }
}

/// Greedy top-down decomposition; a span becomes a leaf as soon as it matches
/// RATE0, RATE1, REP or SPC (in that priority order).
pub fn fastssc_build_tree(code: &PolarCode) -> FastSscTree {
    fn build(nodes: &mut Vec<Node>, frozen: &[bool], start: usize, depth: u32) -> usize {
        let size = 1usize << depth;
        let idx = nodes.len();
        match classify(&frozen[start..start + size]) {
            Some(kind) => nodes.push(Node {
                start,
                depth,
                kind,
                children: None,
            }),
            None => {
                nodes.push(Node {
                    start,
                    depth,
                    kind: NodeKind::Branch,
                    children: None,
                });
                let left = build(nodes, frozen, start, depth - 1);
                let right = build(nodes, frozen, start + size / 2, depth - 1);
                nodes[idx].children = Some((left, right));
            }
        }
        idx
    }
    let mut nodes = Vec::new();
    build(&mut nodes, code.frozen_mask(), 0, code.log_len());
    FastSscTree {
        len: code.len(),
        nodes,
    }
}

impl FastSscTree {
    pub fn len(&self) -> usize {
        self.len
    }

    /// Leaves in decoding (left-to-right) order.
    pub fn leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            match node.children {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(Leaf {
                    start: node.start,
                    size: 1 << node.depth,
                    kind: node.kind,
                }),
            }
        }
        out
    }

    /// Number of leaves that update a detection metric: RATE0 and REP, plus
    /// SPC when `include_spc`.
    pub fn contributing_leaves(&self, include_spc: bool) -> usize {
        self.leaves()
            .iter()
            .filter(|l| contributes(l.kind, include_spc))
            .count()
    }
}

pub(crate) fn contributes(kind: NodeKind, include_spc: bool) -> bool {
    match kind {
        NodeKind::Rate0 | NodeKind::Rep => true,
        NodeKind::Spc => include_spc,
        _ => false,
    }
}

/// Sum of LLRs folded in the same pairwise order SC uses for a repetition
/// code, so the sign matches SC bit for bit.
pub(crate) fn rep_sum(llrs: &[f64], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(llrs);
    let mut m = scratch.len();
    while m > 1 {
        m /= 2;
        for j in 0..m {
            scratch[j] += scratch[m + j];
        }
    }
    scratch[0]
}

/// Fast-SSC decoder bound to one tree. Scratch layout matches [`super::ScDecoder`].
#[derive(Debug, Clone)]
pub struct FastSscDecoder {
    tree: FastSscTree,
    alpha: Vec<f64>,
    beta: Vec<u8>,
    u: Vec<u8>,
    scratch: Vec<f64>,
}

impl FastSscDecoder {
    pub fn new(tree: FastSscTree) -> Self {
        let len = tree.len;
        Self {
            tree,
            alpha: vec![0.0; 2 * len],
            beta: vec![0; 2 * len],
            u: vec![0; len],
            scratch: Vec::with_capacity(len),
        }
    }

    pub fn tree(&self) -> &FastSscTree {
        &self.tree
    }

    pub fn decode(&mut self, llrs: &[f64]) -> &[u8] {
        self.traverse(llrs, &mut |_, _| true);
        &self.u
    }

    /// Decodes `llrs`, handing every leaf and its input LLRs to `visit`
    /// before the leaf is decided. Traversal stops as soon as `visit`
    /// returns `false`; `u` is then only valid up to that leaf.
    pub fn traverse<F>(&mut self, llrs: &[f64], visit: &mut F)
    where
        F: FnMut(&Leaf, &[f64]) -> bool,
    {
        let len = self.tree.len;
        assert_eq!(llrs.len(), len, "LLR vector length");
        self.alpha[len..].copy_from_slice(llrs);
        self.node(0, visit);
    }

    /// Returns `false` when traversal was cut short.
    fn node<F>(&mut self, idx: usize, visit: &mut F) -> bool
    where
        F: FnMut(&Leaf, &[f64]) -> bool,
    {
        let node = self.tree.nodes[idx];
        let size = 1usize << node.depth;
        let Some((left, right)) = node.children else {
            let leaf = Leaf {
                start: node.start,
                size,
                kind: node.kind,
            };
            if !visit(&leaf, &self.alpha[size..2 * size]) {
                return false;
            }
            self.decide_leaf(&leaf);
            return true;
        };
        let m = size / 2;
        {
            let (child, cur) = levels(&mut self.alpha, m);
            let (a, b) = cur.split_at(m);
            for j in 0..m {
                child[j] = f_minsum(a[j], b[j]);
            }
        }
        if !self.node(left, visit) {
            return false;
        }
        {
            let (cb, nb) = levels(&mut self.beta, m);
            nb[..m].copy_from_slice(cb);
            let (child, cur) = levels(&mut self.alpha, m);
            let (a, b) = cur.split_at(m);
            for j in 0..m {
                child[j] = g_combine(a[j], b[j], nb[j]);
            }
        }
        if !self.node(right, visit) {
            return false;
        }
        let (cb, nb) = levels(&mut self.beta, m);
        let (l, r) = nb.split_at_mut(m);
        for j in 0..m {
            l[j] ^= cb[j];
            r[j] = cb[j];
        }
        true
    }

    fn decide_leaf(&mut self, leaf: &Leaf) {
        let size = leaf.size;
        let alpha = &self.alpha[size..2 * size];
        let beta = &mut self.beta[size..2 * size];
        match leaf.kind {
            NodeKind::Rate0 => beta.fill(0),
            NodeKind::Rate1 => {
                for (b, &a) in beta.iter_mut().zip(alpha) {
                    *b = hard(a);
                }
            }
            NodeKind::Rep => {
                let bit = hard(rep_sum(alpha, &mut self.scratch));
                beta.fill(bit);
            }
            NodeKind::Spc => {
                let mut parity = 0u8;
                let mut weakest = 0;
                for (i, (b, &a)) in beta.iter_mut().zip(alpha).enumerate() {
                    *b = hard(a);
                    parity ^= *b;
                    if a.abs() < alpha[weakest].abs() {
                        weakest = i;
                    }
                }
                beta[weakest] ^= parity;
            }
            NodeKind::Branch => unreachable!("branch nodes are not leaves"),
        }
        let u = &mut self.u[leaf.start..leaf.start + size];
        u.copy_from_slice(beta);
        polar_transform(u);
    }
}

/// One-shot Fast-SSC decode.
pub fn fastssc_decode(tree: &FastSscTree, llrs: &[f64]) -> Vec<u8> {
    FastSscDecoder::new(tree.clone()).decode(llrs).to_vec()
}
