//! Dense working-graph representation shared by the searches.

use std::collections::{BTreeMap, VecDeque};

use super::Classification;
use crate::budget::EnergyBudget;
use crate::flow::FlowSet;
use crate::tree::{LabeledTree, NodeId, TreeTopology};

/// Problem data indexed densely; index order equals identifier order.
pub(crate) struct Problem {
    pub ids: Vec<NodeId>,
    pub root: usize,
    /// `(src, dst, rate)` in ascending `(src, dst)` order, like [`FlowSet::iter`].
    pub flows: Vec<(usize, usize, f64)>,
    pub init_parent: Vec<Option<usize>>,
    pub init_dist: Vec<Vec<usize>>,
    pub budget: Vec<usize>,
    /// Nearest initial-tree ancestor (or self) inside the skeleton.
    pub skeleton_ancestor: Vec<usize>,
    pub active: Vec<usize>,
}

impl Problem {
    pub fn new(
        initial: &LabeledTree,
        flows: &FlowSet,
        budgets: &EnergyBudget,
        classes: &Classification,
    ) -> Self {
        let topo = initial.topology();
        let ids: Vec<NodeId> = topo.nodes().collect();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let root = index[&topo.root()];
        let flows = flows
            .iter()
            .map(|(s, d, r)| (index[&s], index[&d], r))
            .collect();
        let init_parent = ids
            .iter()
            .map(|&v| topo.parent(v).map(|p| index[&p]))
            .collect();
        let init_dist = ids
            .iter()
            .map(|&a| {
                ids.iter()
                    .map(|&b| initial.distance(a, b).expect("same tree"))
                    .collect()
            })
            .collect();
        let budget = ids
            .iter()
            .map(|&v| budgets.effective(v, topo.root()) as usize)
            .collect();
        let skeleton: Vec<bool> = ids.iter().map(|v| classes.skeleton.contains(*v)).collect();
        let skeleton_ancestor = ids
            .iter()
            .map(|&v| {
                let mut cur = v;
                while !skeleton[index[&cur]] {
                    cur = topo.parent(cur).expect("the root is in the skeleton");
                }
                index[&cur]
            })
            .collect();
        let active = classes.active_moving.iter().map(|v| index[v]).collect();
        debug_assert!(n > 0);
        Problem {
            ids,
            root,
            flows,
            init_parent,
            init_dist,
            budget,
            skeleton_ancestor,
            active,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Skeleton plus the movers placed so far. Movers only ever join as leaves,
/// so placed nodes keep their mutual distances.
#[derive(Clone)]
pub(crate) struct WorkingGraph {
    pub parent: Vec<Option<usize>>,
    pub present: Vec<bool>,
    children: Vec<Vec<usize>>,
    /// Still hanging from its initial parent, and so is every ancestor.
    /// Such nodes never move and are the anchors of everything else.
    fixed: Vec<bool>,
    /// Nearest fixed ancestor, or self when fixed.
    anchor: Vec<usize>,
    dist: Vec<Vec<usize>>,
    members: Vec<usize>,
}

impl WorkingGraph {
    pub fn from_skeleton(problem: &Problem, skeleton: &TreeTopology) -> Self {
        let n = problem.len();
        let index = |v: NodeId| problem.ids.binary_search(&v).expect("known node");
        let mut g = WorkingGraph {
            parent: vec![None; n],
            present: vec![false; n],
            children: vec![Vec::new(); n],
            fixed: vec![false; n],
            anchor: (0..n).collect(),
            dist: vec![vec![0; n]; n],
            members: Vec::new(),
        };
        for v in skeleton.nodes() {
            let i = index(v);
            g.present[i] = true;
            g.fixed[i] = true;
            g.members.push(i);
            g.parent[i] = skeleton.parent(v).map(index);
            g.children[i] = skeleton.children(v).iter().map(|&c| index(c)).collect();
        }
        // The skeleton is an induced subtree of the initial tree containing
        // the root, so all of it is fixed.
        for &a in &g.members {
            for &b in &g.members {
                g.dist[a][b] = problem.init_dist[a][b];
            }
        }
        g
    }

    /// Positions a new leaf may hang from, in breadth-first order.
    pub fn positions(&self, root: usize) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.members.len());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            queue.extend(self.children[u].iter().copied());
        }
        order
    }

    /// Members in ascending index order.
    pub fn sorted_members(&self) -> Vec<usize> {
        let mut m = self.members.clone();
        m.sort_unstable();
        m
    }

    /// Hops `x` would travel to hang from `u`: up to the nearest fixed node at
    /// or above `u`, then down to `u`, then one more. Equals the move distance
    /// of `x` in the plan for any completion, since later leaves never change
    /// which nodes are fixed.
    pub fn move_cost(&self, problem: &Problem, x: usize, u: usize) -> usize {
        let a = self.anchor[u];
        (problem.init_dist[x][a] + self.dist[u][a] + 1).saturating_sub(2)
    }

    pub fn attach(&mut self, problem: &Problem, x: usize, u: usize) {
        debug_assert!(!self.present[x] && self.present[u]);
        for &y in &self.members {
            let d = self.dist[u][y] + 1;
            self.dist[x][y] = d;
            self.dist[y][x] = d;
        }
        self.dist[x][x] = 0;
        self.present[x] = true;
        self.parent[x] = Some(u);
        self.fixed[x] = self.fixed[u] && problem.init_parent[x] == Some(u);
        self.anchor[x] = if self.fixed[x] { x } else { self.anchor[u] };
        self.members.push(x);
        let kids = &mut self.children[u];
        let at = kids.partition_point(|&c| c < x);
        kids.insert(at, x);
    }

    /// Undoes the most recent [`attach`](Self::attach).
    pub fn detach_last(&mut self) {
        let x = self.members.pop().expect("something was attached");
        let u = self.parent[x].take().expect("attached nodes have a parent");
        self.present[x] = false;
        self.fixed[x] = false;
        self.anchor[x] = x;
        self.children[u].retain(|&c| c != x);
    }

    /// Σ f·d over flows with both endpoints present, summed in flow order so
    /// complete graphs match [`crate::flow::aggregate_traffic`] bit for bit.
    pub fn traffic(&self, problem: &Problem) -> f64 {
        let mut total = 0.0;
        for &(s, d, r) in &problem.flows {
            if self.present[s] && self.present[d] {
                total += r * self.dist[s][d] as f64;
            }
        }
        total
    }

    pub fn to_topology(&self, problem: &Problem) -> TreeTopology {
        let parents: BTreeMap<NodeId, NodeId> = self
            .members
            .iter()
            .filter_map(|&c| self.parent[c].map(|p| (problem.ids[c], problem.ids[p])))
            .collect();
        TreeTopology::from_parents(problem.ids[problem.root], parents)
            .expect("the working graph is a tree")
    }
}
