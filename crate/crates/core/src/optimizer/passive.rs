use std::collections::{BTreeMap, BTreeSet};

use crate::budget::EnergyBudget;
use crate::tree::{LabeledTree, NodeId, TreeTopology};

fn tree_distance(topo: &TreeTopology, a: NodeId, b: NodeId) -> usize {
    let (mut a, mut b) = (a, b);
    let (mut da, mut db) = (topo.depth(a), topo.depth(b));
    let mut hops = 0;
    while da > db {
        a = topo.parent(a).expect("deeper node has a parent");
        da -= 1;
        hops += 1;
    }
    while db > da {
        b = topo.parent(b).expect("deeper node has a parent");
        db -= 1;
        hops += 1;
    }
    while a != b {
        a = topo.parent(a).expect("distinct nodes below the root");
        b = topo.parent(b).expect("distinct nodes below the root");
        hops += 2;
    }
    hops
}

/// Nodes of `working` that sit exactly where they sat in the initial tree,
/// all the way up to the root.
fn fixed_nodes(working: &TreeTopology, initial: &TreeTopology) -> BTreeSet<NodeId> {
    let mut fixed = BTreeSet::from([working.root()]);
    for v in working.bfs_order() {
        if let Some(p) = working.parent(v) {
            if fixed.contains(&p) && initial.parent(v) == Some(p) {
                fixed.insert(v);
            }
        }
    }
    fixed
}

/// Re-attaches passive movers to `working`, each (in identifier order) as a
/// new leaf at the position with the fewest hops to travel within its budget.
///
/// A feasible position always exists. Let `w` be the topmost mover above a
/// passive node `c` and `g` the parent of `w`; `g` never moves. Keeping `w`
/// active required `h_c >= d_initial(w, c)`, and hanging `c` from `g` costs
/// `d_initial(c, g) + 1 - 2 = d_initial(w, c)` hops.
pub fn attach_passive(
    working: &TreeTopology,
    passive: &BTreeSet<NodeId>,
    initial: &LabeledTree,
    budgets: &EnergyBudget,
) -> TreeTopology {
    let init_topo = initial.topology();
    let root = working.root();
    let mut parents: BTreeMap<NodeId, NodeId> = working.parents().clone();
    let mut current = working.clone();
    for &c in passive {
        let fixed = fixed_nodes(&current, init_topo);
        let anchor_of = |u: NodeId| {
            let mut a = u;
            while !fixed.contains(&a) {
                a = current.parent(a).expect("the root is fixed");
            }
            a
        };
        let budget = budgets.effective(c, root) as usize;
        let mut best: Option<(usize, NodeId)> = None;
        for u in current.bfs_order() {
            let a = anchor_of(u);
            let up = initial.distance(c, a).expect("same node set");
            let d = (up + tree_distance(&current, u, a) + 1).saturating_sub(2);
            if d <= budget && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, u));
            }
        }
        let slot = best.map(|(_, u)| u).unwrap_or_else(|| {
            debug_assert!(false, "passive node {c} has no feasible slot");
            let mut g = init_topo.parent(c).expect("passive nodes are not the root");
            while !fixed.contains(&g) {
                g = init_topo.parent(g).expect("the root is fixed");
            }
            g
        });
        parents.insert(c, slot);
        current = TreeTopology::from_parents(root, parents.clone())
            .expect("leaf attachment keeps a tree");
    }
    current
}
