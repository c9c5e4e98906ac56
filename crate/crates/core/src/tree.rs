//! Rooted trees, prefix-labeled tries and random tree generation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::PrefixLabel;

/// Identifier of a robot / network node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("node {0} is its own parent")]
    SelfLoop(NodeId),
    #[error("node {0} has more than one parent")]
    MultipleParents(NodeId),
    #[error("root {0} cannot have a parent")]
    RootHasParent(NodeId),
    #[error("node {0} does not reach the root")]
    Unreachable(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("no root label (length 1) among the labels")]
    MissingRoot,
    #[error("more than one root label")]
    MultipleRoots,
    #[error("label {0} is used by more than one node")]
    DuplicateLabel(PrefixLabel),
    #[error("label {label} of node {node} has no parent label in the tree")]
    OrphanLabel { node: NodeId, label: PrefixLabel },
}

/// A rooted tree given by parent pointers.
///
/// Construction checks that every node reaches the root, so a value of this
/// type is always connected (ℂ = 1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeTopology {
    root: NodeId,
    parent: BTreeMap<NodeId, NodeId>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
}

impl TreeTopology {
    /// Builds a tree from `(parent, child)` edges.
    pub fn new(
        root: NodeId,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, TopologyError> {
        let mut parent = BTreeMap::new();
        for (p, c) in edges {
            if p == c {
                return Err(TopologyError::SelfLoop(c));
            }
            if c == root {
                return Err(TopologyError::RootHasParent(root));
            }
            if parent.insert(c, p).is_some() {
                return Err(TopologyError::MultipleParents(c));
            }
        }
        Self::from_parents(root, parent)
    }

    /// Builds a tree from a parent map (the root must be absent from it).
    pub fn from_parents(
        root: NodeId,
        parent: BTreeMap<NodeId, NodeId>,
    ) -> Result<Self, TopologyError> {
        if parent.contains_key(&root) {
            return Err(TopologyError::RootHasParent(root));
        }
        let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        children.insert(root, Vec::new());
        for (&c, &p) in &parent {
            if c == p {
                return Err(TopologyError::SelfLoop(c));
            }
            children.entry(c).or_default();
            children.entry(p).or_default().push(c);
        }
        for &node in children.keys() {
            if node != root && !parent.contains_key(&node) {
                // A parent that is neither the root nor anyone's child.
                return Err(TopologyError::Unreachable(node));
            }
        }
        for kids in children.values_mut() {
            kids.sort_unstable();
        }
        let tree = TreeTopology {
            root,
            parent,
            children,
        };
        // Every node must reach the root; a BFS from the root must see all.
        let reached = tree.bfs_order().len();
        if reached != tree.children.len() {
            let seen: BTreeSet<NodeId> = tree.bfs_order().into_iter().collect();
            let lost = tree
                .children
                .keys()
                .find(|n| !seen.contains(n))
                .copied()
                .expect("some node is unreached");
            return Err(TopologyError::Unreachable(lost));
        }
        Ok(tree)
    }

    /// Orients an undirected edge list away from `root`.
    pub fn from_undirected(
        root: NodeId,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self, TopologyError> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for n in nodes {
            adj.entry(n).or_default();
        }
        adj.entry(root).or_default();
        let mut seen_edges = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen_edges.insert(key) {
                return Err(TopologyError::DuplicateEdge(a, b));
            }
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut parent = BTreeMap::new();
        let mut visited = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[&u] {
                if visited.insert(v) {
                    parent.insert(v, u);
                    queue.push_back(v);
                } else if parent.get(&u) != Some(&v) {
                    // Already visited and not the tree edge we came by: a cycle.
                    return Err(TopologyError::MultipleParents(v));
                }
            }
        }
        if let Some(&lost) = adj.keys().find(|n| !visited.contains(n)) {
            return Err(TopologyError::Unreachable(lost));
        }
        Self::from_parents(root, parent)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.children.contains_key(&v)
    }

    /// Nodes in ascending identifier order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.children.keys().copied()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(&v).copied()
    }

    pub fn parents(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.parent
    }

    /// Children in ascending identifier order.
    pub fn children(&self, v: NodeId) -> &[NodeId] {
        self.children.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(parent, child)` pairs ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    /// Breadth-first order from the root, children visited by ascending id.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.children.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            queue.extend(self.children(u).iter().copied());
        }
        order
    }

    pub fn depth(&self, v: NodeId) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    /// All descendants of `v` (excluding `v`) in breadth-first order.
    pub fn descendants(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut queue: VecDeque<NodeId> = self.children(v).iter().copied().collect();
        while let Some(u) = queue.pop_front() {
            out.push(u);
            queue.extend(self.children(u).iter().copied());
        }
        out
    }

    /// Whether `anc` is `v` or one of its ancestors.
    pub fn is_ancestor_or_self(&self, anc: NodeId, v: NodeId) -> bool {
        let mut cur = Some(v);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }

    /// Tree with the subset `keep` (which must contain the root and be closed
    /// under parents) and the induced edges.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> Result<Self, TopologyError> {
        let edges = self
            .edges()
            .filter(|(p, c)| keep.contains(p) && keep.contains(c))
            .collect::<Vec<_>>();
        let mut parent = BTreeMap::new();
        for (p, c) in edges {
            parent.insert(c, p);
        }
        for &k in keep {
            if k != self.root && !parent.contains_key(&k) {
                return Err(TopologyError::Unreachable(k));
            }
        }
        Self::from_parents(self.root, parent)
    }
}

/// A tree whose nodes carry consistent prefix labels.
#[derive(Clone, Debug)]
pub struct LabeledTree {
    topology: TreeTopology,
    labels: BTreeMap<NodeId, PrefixLabel>,
    by_label: HashMap<PrefixLabel, NodeId>,
}

impl PartialEq for LabeledTree {
    fn eq(&self, other: &Self) -> bool {
        self.topology == other.topology && self.labels == other.labels
    }
}

impl Eq for LabeledTree {}

impl LabeledTree {
    /// Rebuilds the tree from labels alone: each node's parent is the node
    /// carrying its label minus the last symbol.
    pub fn from_labels(labels: BTreeMap<NodeId, PrefixLabel>) -> Result<Self, TopologyError> {
        let mut by_label = HashMap::with_capacity(labels.len());
        let mut root = None;
        for (&node, label) in &labels {
            if by_label.insert(label.clone(), node).is_some() {
                return Err(TopologyError::DuplicateLabel(label.clone()));
            }
            if label.len() == 1 {
                if root.is_some() {
                    return Err(TopologyError::MultipleRoots);
                }
                root = Some(node);
            }
        }
        let root = root.ok_or(TopologyError::MissingRoot)?;
        let mut parent = BTreeMap::new();
        for (&node, label) in &labels {
            if let Some(pl) = label.parent() {
                let p = by_label
                    .get(&pl)
                    .copied()
                    .ok_or_else(|| TopologyError::OrphanLabel {
                        node,
                        label: label.clone(),
                    })?;
                parent.insert(node, p);
            }
        }
        let topology = TreeTopology::from_parents(root, parent)?;
        Ok(LabeledTree {
            topology,
            labels,
            by_label,
        })
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn root(&self) -> NodeId {
        self.topology.root
    }

    pub fn labels(&self) -> &BTreeMap<NodeId, PrefixLabel> {
        &self.labels
    }

    pub fn label(&self, v: NodeId) -> Option<&PrefixLabel> {
        self.labels.get(&v)
    }

    pub fn node_of(&self, label: &PrefixLabel) -> Option<NodeId> {
        self.by_label.get(label).copied()
    }

    /// Hop distance from label arithmetic: both nodes climb to their longest
    /// common prefix.
    pub fn distance(&self, u: NodeId, v: NodeId) -> Result<usize, TopologyError> {
        let lu = self.labels.get(&u).ok_or(TopologyError::UnknownNode(u))?;
        let lv = self.labels.get(&v).ok_or(TopologyError::UnknownNode(v))?;
        Ok(lu.distance(lv))
    }
}

/// Labels the tree from the root down. The root gets `0`; the children of each
/// node get suffixes `1, 2, 3, …` in ascending identifier order.
pub fn assign_prefix_labels(tree: &TreeTopology) -> LabeledTree {
    let mut labels = BTreeMap::new();
    labels.insert(tree.root, PrefixLabel::root(0));
    for u in tree.bfs_order() {
        let base = labels[&u].clone();
        for (i, &c) in tree.children(u).iter().enumerate() {
            labels.insert(c, base.child(i as u32 + 1));
        }
    }
    let by_label = labels.iter().map(|(&n, l)| (l.clone(), n)).collect();
    LabeledTree {
        topology: tree.clone(),
        labels,
        by_label,
    }
}

/// Distance between two nodes of a labeled tree.
pub fn trie_distance(tree: &LabeledTree, u: NodeId, v: NodeId) -> Result<usize, TopologyError> {
    tree.distance(u, v)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("a tree needs at least one node")]
pub struct EmptyTree;

/// Undirected edges of a uniformly random labeled tree on nodes `0..n`,
/// decoded from a uniformly random Prüfer sequence.
pub fn random_tree_edges<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<Vec<(NodeId, NodeId)>, EmptyTree> {
    if n == 0 {
        return Err(EmptyTree);
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let code: Vec<usize> = (0..n.saturating_sub(2))
        .map(|_| rng.random_range(0..n))
        .collect();
    Ok(prufer_decode(n, &code))
}

/// Uniformly random labeled tree on nodes `0..n`, rooted at node 0.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TreeTopology, EmptyTree> {
    let edges = random_tree_edges(n, rng)?;
    let nodes = (0..n as u32).map(NodeId);
    Ok(TreeTopology::from_undirected(NodeId(0), nodes, &edges)
        .expect("Prüfer decoding always yields a tree"))
}

fn prufer_decode(n: usize, code: &[usize]) -> Vec<(NodeId, NodeId)> {
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = leaves.pop_first().expect("a Prüfer step always has a leaf");
        edges.push((NodeId(leaf as u32), NodeId(c as u32)));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let a = leaves.pop_first().expect("two leaves remain");
    let b = leaves.pop_first().expect("two leaves remain");
    edges.push((NodeId(a as u32), NodeId(b as u32)));
    edges
}
