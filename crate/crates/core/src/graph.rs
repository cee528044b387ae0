//! Labelled directed graphs.
//!
//! A node is *external* when its only outgoing arrow is a dangling (external)
//! arrow, and *internal* when it has one or more outgoing arrows into other
//! nodes and no external arrow. Anything else cannot carry net semantics and
//! is reported as [`NodeClass::Invalid`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidGraph("node names must be non-empty".into()));
        }
        Ok(NodeId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An arrow leaving `source`. A missing `target` makes it an external arrow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub source: NodeId,
    pub target: Option<NodeId>,
}

impl Arrow {
    pub fn internal(source: &str, target: &str) -> Result<Self> {
        Ok(Arrow {
            source: NodeId::new(source)?,
            target: Some(NodeId::new(target)?),
        })
    }

    pub fn external(source: &str) -> Result<Self> {
        Ok(Arrow {
            source: NodeId::new(source)?,
            target: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Internal,
    External,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderRelation {
    Precedes,
    Succeeds,
    Concurrent,
}

/// Immutable labelled graph. Node indices follow declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledGraph {
    nodes: Vec<NodeId>,
    arrows: Vec<Arrow>,
    index: HashMap<NodeId, usize>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    external_arrows: Vec<usize>,
}

impl LabelledGraph {
    /// Builds a graph, rejecting unknown endpoints, self loops and parallel arrows.
    pub fn new(nodes: Vec<NodeId>, arrows: Vec<Arrow>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node `{n}`")));
            }
        }
        let lookup = |id: &NodeId| index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()));

        let mut children = vec![Vec::new(); nodes.len()];
        let mut parents = vec![Vec::new(); nodes.len()];
        let mut external_arrows = vec![0usize; nodes.len()];
        let mut seen = BTreeSet::new();
        for arrow in &arrows {
            let s = lookup(&arrow.source)?;
            let t = arrow.target.as_ref().map(lookup).transpose()?;
            if t == Some(s) {
                return Err(Error::InvalidGraph(format!("self loop on `{}`", arrow.source)));
            }
            if !seen.insert((s, t)) {
                return Err(Error::InvalidGraph(format!("parallel arrows from `{}`", arrow.source)));
            }
            match t {
                Some(t) => {
                    children[s].push(t);
                    parents[t].push(s);
                }
                None => external_arrows[s] += 1,
            }
        }

        Ok(LabelledGraph {
            nodes,
            arrows,
            index,
            children,
            parents,
            external_arrows,
        })
    }

    /// Builds a graph from per-node parent lists. Every node without children
    /// receives one external arrow.
    pub fn from_parents(spec: &[(&str, Vec<&str>)]) -> Result<Self> {
        let nodes = spec.iter().map(|(n, _)| NodeId::new(*n)).collect::<Result<Vec<_>>>()?;
        let mut arrows = Vec::new();
        let mut has_child = BTreeSet::new();
        for (node, parents) in spec {
            for p in parents {
                arrows.push(Arrow::internal(p, node)?);
                has_child.insert(*p);
            }
        }
        for (node, _) in spec {
            if !has_child.contains(node) {
                arrows.push(Arrow::external(node)?);
            }
        }
        Self::new(nodes, arrows)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn node(&self, i: usize) -> &NodeId {
        &self.nodes[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(&NodeId(name.to_string()))
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Parents of node `i` in arrow declaration order.
    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn classify(&self, i: usize) -> NodeClass {
        match (self.children[i].len(), self.external_arrows[i]) {
            (0, 1) => NodeClass::External,
            (n, 0) if n > 0 => NodeClass::Internal,
            _ => NodeClass::Invalid,
        }
    }

    pub fn classify_nodes(&self) -> BTreeMap<NodeId, NodeClass> {
        (0..self.len())
            .map(|i| (self.nodes[i].clone(), self.classify(i)))
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.peel_off().is_ok()
    }

    /// Node indices in chronological order: every internal arrow points from
    /// an earlier node to a later one.
    ///
    /// Nodes are peeled off the end of the ordering one at a time, each time
    /// taking a node with no arrows into the remaining graph. When several
    /// qualify, the lexicographically greatest name is placed last.
    pub fn chronological_order(&self) -> Result<Vec<usize>> {
        self.peel_off()
    }

    pub fn chronological_labelling(&self) -> Result<Vec<NodeId>> {
        Ok(self.peel_off()?.into_iter().map(|i| self.nodes[i].clone()).collect())
    }

    fn peel_off(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut remaining_out: Vec<usize> = self.children.iter().map(Vec::len).collect();
        let mut removed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let next = (0..n)
                .filter(|&i| !removed[i] && remaining_out[i] == 0)
                .max_by(|&a, &b| self.nodes[a].cmp(&self.nodes[b]))
                .ok_or(Error::CyclicGraph)?;
            removed[next] = true;
            for &p in &self.parents[next] {
                remaining_out[p] -= 1;
            }
            order.push(next);
        }
        order.reverse();
        Ok(order)
    }

    /// `true` when a directed path of internal arrows leads from `from` to `to`.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if c == to {
                    return true;
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    pub fn node_order_relation(&self, a: &str, b: &str) -> Result<OrderRelation> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        if ia == ib {
            return Err(Error::InvalidQuery(format!("`{a}` compared with itself")));
        }
        if !self.is_acyclic() {
            return Err(Error::CyclicGraph);
        }
        Ok(if self.reaches(ia, ib) {
            OrderRelation::Precedes
        } else if self.reaches(ib, ia) {
            OrderRelation::Succeeds
        } else {
            OrderRelation::Concurrent
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(spec: &[(&str, Vec<&str>)]) -> LabelledGraph {
        LabelledGraph::from_parents(spec).unwrap()
    }

    fn cycle() -> LabelledGraph {
        graph(&[("x", vec!["z"]), ("y", vec!["x"]), ("z", vec!["y"])])
    }

    #[test]
    fn two_node_chain_classification() {
        let g = graph(&[("x", vec![]), ("y", vec!["x"])]);
        let c = g.classify_nodes();
        assert_eq!(c[&NodeId::new("x").unwrap()], NodeClass::Internal);
        assert_eq!(c[&NodeId::new("y").unwrap()], NodeClass::External);
    }

    #[test]
    fn single_node_is_external() {
        let g = graph(&[("x", vec![])]);
        assert_eq!(g.classify(0), NodeClass::External);
    }

    #[test]
    fn mixed_outgoing_arrows_are_invalid() {
        let nodes = vec![NodeId::new("x").unwrap(), NodeId::new("y").unwrap()];
        let arrows = vec![
            Arrow::internal("x", "y").unwrap(),
            Arrow::external("x").unwrap(),
            Arrow::external("y").unwrap(),
        ];
        let g = LabelledGraph::new(nodes, arrows).unwrap();
        assert_eq!(g.classify(0), NodeClass::Invalid);
        assert_eq!(g.classify(1), NodeClass::External);
    }

    #[test]
    fn sink_without_external_arrow_is_invalid() {
        let nodes = vec![NodeId::new("x").unwrap()];
        let g = LabelledGraph::new(nodes, vec![]).unwrap();
        assert_eq!(g.classify(0), NodeClass::Invalid);
    }

    #[test]
    fn construction_rejects_bad_arrows() {
        let nodes = || vec![NodeId::new("x").unwrap(), NodeId::new("y").unwrap()];
        let parallel = vec![Arrow::internal("x", "y").unwrap(), Arrow::internal("x", "y").unwrap()];
        assert!(matches!(
            LabelledGraph::new(nodes(), parallel),
            Err(Error::InvalidGraph(_))
        ));
        let selfloop = vec![Arrow::internal("x", "x").unwrap()];
        assert!(LabelledGraph::new(nodes(), selfloop).is_err());
        let dangling = vec![Arrow::internal("x", "w").unwrap()];
        assert_eq!(
            LabelledGraph::new(nodes(), dangling),
            Err(Error::UnknownNode("w".into()))
        );
        assert!(NodeId::new("").is_err());
        let dup = vec![NodeId::new("x").unwrap(), NodeId::new("x").unwrap()];
        assert!(LabelledGraph::new(dup, vec![]).is_err());
    }

    #[test]
    fn acyclicity() {
        let triangle = graph(&[("x", vec![]), ("y", vec!["x"]), ("z", vec!["x", "y"])]);
        assert!(triangle.is_acyclic());
        assert!(!cycle().is_acyclic());
        assert!(LabelledGraph::new(vec![], vec![]).unwrap().is_acyclic());
    }

    #[test]
    fn fully_connected_four_nodes_has_unique_order() {
        let g = graph(&[
            ("x4", vec!["x1", "x2", "x3"]),
            ("x2", vec!["x1"]),
            ("x3", vec!["x1", "x2"]),
            ("x1", vec![]),
        ]);
        let names: Vec<_> = g
            .chronological_labelling()
            .unwrap()
            .into_iter()
            .map(|n| n.to_string())
            .collect();
        assert_eq!(names, ["x1", "x2", "x3", "x4"]);
    }

    #[test]
    fn disconnected_pairs_break_ties_by_name() {
        let g = graph(&[("d", vec!["c"]), ("b", vec!["a"]), ("c", vec![]), ("a", vec![])]);
        let names: Vec<_> = g
            .chronological_labelling()
            .unwrap()
            .into_iter()
            .map(|n| n.to_string())
            .collect();
        assert_eq!(names, ["a", "b", "c", "d"]);
    }

    #[test]
    fn cycle_has_no_labelling() {
        assert_eq!(cycle().chronological_labelling(), Err(Error::CyclicGraph));
        assert_eq!(cycle().node_order_relation("x", "y"), Err(Error::CyclicGraph));
    }

    #[test]
    fn order_relations() {
        let chain = graph(&[("x", vec![]), ("y", vec!["x"]), ("z", vec!["y"])]);
        assert_eq!(chain.node_order_relation("x", "z").unwrap(), OrderRelation::Precedes);
        assert_eq!(chain.node_order_relation("z", "x").unwrap(), OrderRelation::Succeeds);
        let collider = graph(&[("x", vec![]), ("y", vec![]), ("z", vec!["x", "y"])]);
        assert_eq!(
            collider.node_order_relation("x", "y").unwrap(),
            OrderRelation::Concurrent
        );
        assert!(chain.node_order_relation("x", "x").is_err());
    }

    /// Random DAG over `n` nodes: arrow i -> j only for i < j in a shuffled naming.
    fn random_dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<usize>)> {
        (1usize..7).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let m = pairs.len();
            (
                Just(n),
                proptest::sample::subsequence(pairs, 0..=m),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
    }

    fn build(n: usize, edges: &[(usize, usize)], names: &[usize]) -> LabelledGraph {
        let name = |i: usize| format!("n{}", names[i]);
        let owned: Vec<(String, Vec<String>)> = (0..n)
            .map(|j| (name(j), edges.iter().filter(|e| e.1 == j).map(|e| name(e.0)).collect()))
            .collect();
        let spec: Vec<(&str, Vec<&str>)> = owned
            .iter()
            .map(|(n, ps)| (n.as_str(), ps.iter().map(String::as_str).collect()))
            .collect();
        LabelledGraph::from_parents(&spec).unwrap()
    }

    /// Every topological order, by brute-force permutation filtering.
    fn all_topological_orders(g: &LabelledGraph) -> Vec<Vec<usize>> {
        fn rec(g: &LabelledGraph, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == g.len() {
                out.push(cur.clone());
                return;
            }
            for v in 0..g.len() {
                if !used[v] && g.parents(v).iter().all(|&p| used[p]) {
                    used[v] = true;
                    cur.push(v);
                    rec(g, used, cur, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(g, &mut vec![false; g.len()], &mut Vec::new(), &mut out);
        out
    }

    proptest! {
        #[test]
        fn labelling_points_every_arrow_forward((n, edges, names) in random_dag()) {
            let g = build(n, &edges, &names);
            let order = g.chronological_order().unwrap();
            let mut pos = vec![0; n];
            for (k, &v) in order.iter().enumerate() { pos[v] = k; }
            for v in 0..n {
                for &c in g.children(v) { prop_assert!(pos[v] < pos[c]); }
            }
            prop_assert_eq!(g.classify_nodes().values().filter(|c| **c == NodeClass::Invalid).count(), 0);
        }

        #[test]
        fn precedes_is_antisymmetric((n, edges, names) in random_dag()) {
            let g = build(n, &edges, &names);
            for a in 0..n {
                for b in 0..n {
                    if a == b { continue; }
                    let ab = g.node_order_relation(g.node(a).as_str(), g.node(b).as_str()).unwrap();
                    let ba = g.node_order_relation(g.node(b).as_str(), g.node(a).as_str()).unwrap();
                    let expected = match ab {
                        OrderRelation::Precedes => OrderRelation::Succeeds,
                        OrderRelation::Succeeds => OrderRelation::Precedes,
                        OrderRelation::Concurrent => OrderRelation::Concurrent,
                    };
                    prop_assert_eq!(ba, expected);
                }
            }
        }

        #[test]
        fn precedes_matches_every_completion((n, edges, names) in random_dag()) {
            let g = build(n, &edges, &names);
            let orders = all_topological_orders(&g);
            for a in 0..n {
                for b in 0..n {
                    if a == b { continue; }
                    let first = |o: &Vec<usize>| o.iter().position(|&v| v == a) < o.iter().position(|&v| v == b);
                    let always = orders.iter().all(first);
                    let never = !orders.iter().any(first);
                    let rel = g.node_order_relation(g.node(a).as_str(), g.node(b).as_str()).unwrap();
                    let expected = if always { OrderRelation::Precedes }
                        else if never { OrderRelation::Succeeds }
                        else { OrderRelation::Concurrent };
                    prop_assert_eq!(rel, expected);
                }
            }
        }

        #[test]
        fn fully_connected_order_is_unique(n in 1usize..7, names in Just((0..6).collect::<Vec<_>>()).prop_shuffle()) {
            let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let g = build(n, &edges, &names[..n]);
            let orders = all_topological_orders(&g);
            prop_assert_eq!(orders.len(), 1);
            prop_assert_eq!(&g.chronological_order().unwrap(), &orders[0]);
        }
    }
}
