//! Binary dendrograms over labeled leaves `0..n`.
//!
//! Children are unordered. Every traversal and the text form put the child
//! holding the smallest leaf index first, so the serialized form doubles as
//! a canonical key for a topology.
//!
//! Text format: a leaf is its decimal index, an internal node is
//! `(left,right)`, and whitespace is ignored. `((0,1),2)` is the tree that
//! separates 2 from {0, 1} at the root.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Leaf(usize),
    Internal(NodeId, NodeId),
}

/// A rooted binary tree whose leaves are the point indices `0..n_leaves`.
#[derive(Debug, Clone)]
pub struct HierTree {
    nodes: Vec<Node>,
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    leaf_node: Vec<NodeId>,
    depth: Vec<usize>,
    min_leaf: Vec<usize>,
    /// Leaves in canonical depth-first order; every subtree is a contiguous span.
    leaf_order: Vec<usize>,
    span: Vec<(usize, usize)>,
}

/// Incremental construction of a [`HierTree`] from leaves and joins.
#[derive(Debug, Default, Clone)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, index: usize) -> NodeId {
        self.nodes.push(Node::Leaf(index));
        self.nodes.len() - 1
    }

    pub fn join(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.nodes.push(Node::Internal(a, b));
        self.nodes.len() - 1
    }

    pub fn build(self, root: NodeId) -> Result<HierTree> {
        HierTree::from_nodes(self.nodes, root)
    }
}

/// The bipartition of a node's leaves induced by its two children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub parent: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Split {
    /// Builds a split from its two sides; both must be nonempty and disjoint.
    pub fn new(mut left: Vec<usize>, mut right: Vec<usize>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptySet);
        }
        left.sort_unstable();
        right.sort_unstable();
        let mut parent: Vec<usize> = left.iter().chain(&right).copied().collect();
        parent.sort_unstable();
        if parent.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("split sides overlap".into()));
        }
        Ok(Self { parent, left, right })
    }

    /// Number of pairs separated by this split.
    pub fn cross_pairs(&self) -> usize {
        self.left.len() * self.right.len()
    }
}

impl HierTree {
    /// Validates an arena of nodes rooted at `root`.
    pub fn from_nodes(nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let m = nodes.len();
        if root >= m {
            return Err(Error::Invalid(format!("root {root} is not a node")));
        }
        let mut parent = vec![None; m];
        let mut n_leaves = 0;
        for (id, node) in nodes.iter().enumerate() {
            match *node {
                Node::Leaf(_) => n_leaves += 1,
                Node::Internal(a, b) => {
                    for c in [a, b] {
                        if c >= m {
                            return Err(Error::Invalid(format!("node {id} has unknown child {c}")));
                        }
                        if c == root || parent[c].replace(id).is_some() {
                            return Err(Error::Invalid(format!("node {c} has more than one parent")));
                        }
                    }
                    if a == b {
                        return Err(Error::Invalid(format!("node {id} lists child {a} twice")));
                    }
                }
            }
        }
        if n_leaves == 0 || m != 2 * n_leaves - 1 {
            return Err(Error::Invalid(format!(
                "{m} nodes for {n_leaves} leaves; a binary tree needs {}",
                (2 * n_leaves).saturating_sub(1)
            )));
        }
        let mut leaf_node = vec![usize::MAX; n_leaves];
        for (id, node) in nodes.iter().enumerate() {
            if let Node::Leaf(i) = *node {
                if i >= n_leaves {
                    let missing = leaf_node.iter().position(|&x| x == usize::MAX).unwrap_or(0);
                    return Err(Error::Invalid(format!(
                        "leaf index {i} out of range; index {missing} is missing"
                    )));
                }
                if leaf_node[i] != usize::MAX {
                    return Err(Error::Invalid(format!("duplicate leaf index {i}")));
                }
                leaf_node[i] = id;
            }
        }

        // Post-order pass for min_leaf, then pre-order for depth and spans.
        let mut min_leaf = vec![usize::MAX; m];
        let mut order = Vec::with_capacity(m);
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            order.push(id);
            if let Node::Internal(a, b) = nodes[id] {
                stack.push(a);
                stack.push(b);
            }
        }
        if order.len() != m {
            return Err(Error::Invalid("nodes unreachable from the root".into()));
        }
        for &id in order.iter().rev() {
            min_leaf[id] = match nodes[id] {
                Node::Leaf(i) => i,
                Node::Internal(a, b) => min_leaf[a].min(min_leaf[b]),
            };
        }

        let mut depth = vec![0; m];
        let mut span = vec![(0, 0); m];
        let mut leaf_order = Vec::with_capacity(n_leaves);
        // (node, entered) so spans close after both children are visited
        let mut stack = vec![(root, false)];
        while let Some((id, entered)) = stack.pop() {
            if entered {
                span[id].1 = leaf_order.len();
                continue;
            }
            span[id].0 = leaf_order.len();
            match nodes[id] {
                Node::Leaf(i) => {
                    leaf_order.push(i);
                    span[id].1 = leaf_order.len();
                }
                Node::Internal(a, b) => {
                    let (first, second) = if min_leaf[a] < min_leaf[b] { (a, b) } else { (b, a) };
                    depth[a] = depth[id] + 1;
                    depth[b] = depth[id] + 1;
                    stack.push((id, true));
                    stack.push((second, false));
                    stack.push((first, false));
                }
            }
        }

        Ok(Self { nodes, root, parent, leaf_node, depth, min_leaf, leaf_order, span })
    }

    /// The one-leaf tree.
    pub fn singleton() -> Self {
        Self::from_nodes(vec![Node::Leaf(0)], 0).expect("single leaf is a valid tree")
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_node.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parent[id]
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.depth[id]
    }

    pub fn leaf_node(&self, index: usize) -> NodeId {
        self.leaf_node[index]
    }

    /// Children of an internal node, the one holding the smallest leaf first.
    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[id] {
            Node::Leaf(_) => None,
            Node::Internal(a, b) if self.min_leaf[a] < self.min_leaf[b] => Some((a, b)),
            Node::Internal(a, b) => Some((b, a)),
        }
    }

    pub fn leaf_count(&self, id: NodeId) -> usize {
        let (s, e) = self.span[id];
        e - s
    }

    /// Leaves under `id` in canonical depth-first order (not sorted).
    pub fn leaves_in_order(&self, id: NodeId) -> &[usize] {
        let (s, e) = self.span[id];
        &self.leaf_order[s..e]
    }

    /// Leaves under `id`, sorted ascending.
    pub fn leaves(&self, id: NodeId) -> Vec<usize> {
        let mut v = self.leaves_in_order(id).to_vec();
        v.sort_unstable();
        v
    }

    /// Internal nodes, root first, depth-first with the canonical child first.
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.n_leaves().saturating_sub(1));
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if let Some((first, second)) = self.children(id) {
                out.push(id);
                stack.push(second);
                stack.push(first);
            }
        }
        out
    }

    /// The split at internal node `id`.
    pub fn split_at(&self, id: NodeId) -> Option<Split> {
        let (a, b) = self.children(id)?;
        Some(Split { parent: self.leaves(id), left: self.leaves(a), right: self.leaves(b) })
    }

    /// All `n - 1` splits in the order of [`HierTree::internal_nodes`].
    pub fn splits(&self) -> Vec<Split> {
        self.internal_nodes()
            .into_iter()
            .filter_map(|id| self.split_at(id))
            .collect()
    }

    /// Least common ancestor of leaves `i` and `j`.
    pub fn lca(&self, i: usize, j: usize) -> NodeId {
        let (mut a, mut b) = (self.leaf_node[i], self.leaf_node[j]);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent");
            b = self.parent[b].expect("non-root has a parent");
        }
        a
    }

    /// Number of leaves under the least common ancestor of `i` and `j`.
    pub fn lca_leaf_count(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.n_leaves();
        for k in [i, j] {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
        }
        if i == j {
            return Err(Error::Invalid(format!("lca of leaf {i} with itself")));
        }
        Ok(self.leaf_count(self.lca(i, j)))
    }

    /// Canonical serialization, with `annotate` appended after each internal node's `)`.
    pub fn write_annotated(
        &self,
        out: &mut impl fmt::Write,
        annotate: &dyn Fn(NodeId) -> Option<String>,
    ) -> fmt::Result {
        enum Step {
            Open(NodeId),
            Comma,
            Close(NodeId),
        }
        let mut stack = vec![Step::Open(self.root)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Open(id) => match self.nodes[id] {
                    Node::Leaf(i) => write!(out, "{i}")?,
                    Node::Internal(..) => {
                        let (a, b) = self.children(id).expect("internal");
                        out.write_char('(')?;
                        stack.push(Step::Close(id));
                        stack.push(Step::Open(b));
                        stack.push(Step::Comma);
                        stack.push(Step::Open(a));
                    }
                },
                Step::Comma => out.write_char(',')?,
                Step::Close(id) => {
                    out.write_char(')')?;
                    if let Some(note) = annotate(id) {
                        write!(out, ":{note}")?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical text form; equal strings mean equal topologies.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for HierTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_annotated(&mut s, &|_| None)?;
        f.write_str(&s)
    }
}

impl PartialEq for HierTree {
    fn eq(&self, other: &Self) -> bool {
        self.n_leaves() == other.n_leaves() && self.canonical() == other.canonical()
    }
}

impl Eq for HierTree {}

impl FromStr for HierTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tree, weights) = parse_annotated(s)?;
        if let Some(pos) = weights.iter().flatten().map(|w| w.1).next() {
            return Err(Error::Parse { pos, msg: "unexpected weight annotation".into() });
        }
        Ok(tree)
    }
}

/// Parses the tree format, accepting an optional `:weight` after each `)`.
/// Returns the tree and, per node id, the weight with its byte position.
pub(crate) fn parse_annotated(text: &str) -> Result<(HierTree, Vec<Option<(f64, usize)>>)> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, nodes: Vec::new(), weights: Vec::new() };
    let root = p.subtree(0)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    let Parser { nodes, weights, .. } = p;
    let tree = HierTree::from_nodes(nodes, root)?;
    Ok((tree, weights))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
    weights: Vec<Option<(f64, usize)>>,
}

impl Parser<'_> {
    const MAX_DEPTH: usize = 10_000;

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn push(&mut self, node: Node, weight: Option<(f64, usize)>) -> NodeId {
        self.nodes.push(node);
        self.weights.push(weight);
        self.nodes.len() - 1
    }

    fn subtree(&mut self, depth: usize) -> Result<NodeId> {
        if depth > Self::MAX_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let a = self.subtree(depth + 1)?;
                self.expect(b',')?;
                let b = self.subtree(depth + 1)?;
                self.expect(b')')?;
                let weight = self.weight()?;
                Ok(self.push(Node::Internal(a, b), weight))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let index = digits
                    .parse()
                    .map_err(|_| Error::Parse { pos: start, msg: "leaf index too large".into() })?;
                Ok(self.push(Node::Leaf(index), None))
            }
            Some(_) => Err(self.error("expected leaf index or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn weight(&mut self) -> Result<Option<(f64, usize)>> {
        self.skip_ws();
        if self.src.get(self.pos) != Some(&b':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, b'.' | b'-' | b'+'))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(w) if w.is_finite() => Ok(Some((w, start))),
            _ => Err(Error::Parse { pos: start, msg: format!("invalid weight '{text}'") }),
        }
    }
}

/// Number of distinct trees on `n` labeled leaves, `(2n - 3)!!`.
pub fn tree_count(n: usize) -> u64 {
    (1..n as u64).map(|k| 2 * k - 1).product()
}

/// Largest leaf count accepted by [`enumerate_trees`].
pub const MAX_ENUMERATION_LEAVES: usize = 7;

/// Every distinct binary tree on leaves `0..n`, each exactly once.
///
/// Trees are generated by inserting leaf `k` above any of the `2k - 1`
/// nodes of a tree on `0..k`; a mixed-radix counter walks all choices.
pub fn enumerate_trees(n: usize) -> Result<TreeEnumerator> {
    if !(2..=MAX_ENUMERATION_LEAVES).contains(&n) {
        return Err(Error::Invalid(format!(
            "tree enumeration needs 2 <= n <= {MAX_ENUMERATION_LEAVES}, got {n}"
        )));
    }
    Ok(TreeEnumerator { choices: vec![0; n - 2], done: false })
}

#[derive(Debug, Clone)]
pub struct TreeEnumerator {
    /// `choices[k - 2]` is the node above which leaf `k` is inserted, in `0..2k - 1`.
    choices: Vec<usize>,
    done: bool,
}

impl TreeEnumerator {
    fn build(&self) -> HierTree {
        let mut nodes = vec![Node::Leaf(0), Node::Leaf(1), Node::Internal(0, 1)];
        let mut parent: Vec<Option<NodeId>> = vec![Some(2), Some(2), None];
        let mut root = 2;
        for (offset, &at) in self.choices.iter().enumerate() {
            let leaf = nodes.len();
            nodes.push(Node::Leaf(offset + 2));
            let joint = nodes.len();
            nodes.push(Node::Internal(at, leaf));
            parent.push(Some(joint));
            parent.push(parent[at]);
            match parent[at] {
                None => root = joint,
                Some(p) => {
                    if let Node::Internal(a, b) = &mut nodes[p] {
                        if *a == at {
                            *a = joint;
                        } else {
                            *b = joint;
                        }
                    }
                }
            }
            parent[at] = Some(joint);
        }
        HierTree::from_nodes(nodes, root).expect("insertion preserves validity")
    }
}

impl Iterator for TreeEnumerator {
    type Item = HierTree;

    fn next(&mut self) -> Option<HierTree> {
        if self.done {
            return None;
        }
        let tree = self.build();
        // advance the counter; digit for leaf k has radix 2k - 1
        self.done = true;
        for (offset, c) in self.choices.iter_mut().enumerate() {
            let radix = 2 * (offset + 2) - 1;
            *c += 1;
            if *c < radix {
                self.done = false;
                break;
            }
            *c = 0;
        }
        Some(tree)
    }
}
