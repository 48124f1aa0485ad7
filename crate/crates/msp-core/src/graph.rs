//! Directed weighted multigraphs, shortest-path machinery, arborescences
//! and routing costs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// A directed arc with a construction weight `w` and a routing length `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: f64,
    pub length: f64,
}

impl GraphArc {
    pub fn new(tail: NodeId, head: NodeId, weight: f64, length: f64) -> Self {
        GraphArc { tail, head, weight, length }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc {0} is a self-loop")]
    SelfLoop(usize),
    #[error("arc {arc} references node {node} outside 0..{node_count}")]
    NodeOutOfRange { arc: usize, node: NodeId, node_count: usize },
    #[error("arc {0} has a negative or non-finite weight or length")]
    BadArcValue(usize),
    #[error("node {0} is not connected to the root")]
    UnreachableNode(NodeId),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("arc index {0} out of range")]
    ArcOutOfRange(usize),
}

/// Directed multigraph over dense node ids `0..node_count`. Parallel arcs
/// are permitted, self-loops are not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Digraph {
    node_count: usize,
    arcs: Vec<GraphArc>,
}

impl Digraph {
    pub fn new(node_count: usize, arcs: Vec<GraphArc>) -> Result<Self, GraphError> {
        for (idx, arc) in arcs.iter().enumerate() {
            if arc.tail >= node_count {
                return Err(GraphError::NodeOutOfRange { arc: idx, node: arc.tail, node_count });
            }
            if arc.head >= node_count {
                return Err(GraphError::NodeOutOfRange { arc: idx, node: arc.head, node_count });
            }
            if arc.tail == arc.head {
                return Err(GraphError::SelfLoop(idx));
            }
            for v in [arc.weight, arc.length] {
                if !v.is_finite() || v < 0.0 {
                    return Err(GraphError::BadArcValue(idx));
                }
            }
        }
        Ok(Digraph { node_count, arcs })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[GraphArc] {
        &self.arcs
    }

    pub fn arc(&self, idx: usize) -> &GraphArc {
        &self.arcs[idx]
    }

    pub fn total_weight(&self) -> f64 {
        self.arcs.iter().map(|a| a.weight).sum()
    }
}

/// Reference set of arcs of a fixed digraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSubset {
    included: Vec<bool>,
}

impl ArcSubset {
    pub fn empty(g: &Digraph) -> Self {
        ArcSubset { included: vec![false; g.arcs.len()] }
    }

    pub fn full(g: &Digraph) -> Self {
        ArcSubset { included: vec![true; g.arcs.len()] }
    }

    pub fn from_indices(g: &Digraph, indices: &[usize]) -> Result<Self, GraphError> {
        let mut s = ArcSubset::empty(g);
        for &idx in indices {
            if idx >= s.included.len() {
                return Err(GraphError::ArcOutOfRange(idx));
            }
            s.included[idx] = true;
        }
        Ok(s)
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.included[idx]
    }

    pub fn insert(&mut self, idx: usize) {
        self.included[idx] = true;
    }

    pub fn remove(&mut self, idx: usize) {
        self.included[idx] = false;
    }

    pub fn len(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.included.iter().all(|&b| !b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.included.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &ArcSubset) -> ArcSubset {
        let included = self
            .included
            .iter()
            .zip(&other.included)
            .map(|(&a, &b)| a || b)
            .collect();
        ArcSubset { included }
    }

    pub fn weight(&self, g: &Digraph) -> f64 {
        self.indices().map(|i| g.arc(i).weight).sum()
    }
}

/// Extended-real routing cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cost {
    Finite(f64),
    Infinite,
}

impl Cost {
    pub fn finite(self) -> Option<f64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }
}

impl std::fmt::Display for Cost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

/// All-pairs shortest path lengths, `None` marking unreachable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<Option<f64>>,
}

impl DistanceMatrix {
    pub fn get(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.dist[u * self.n + v]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Length,
    Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Outbound,
    Inbound,
}

fn arc_cost(arc: &GraphArc, metric: Metric) -> f64 {
    match metric {
        Metric::Length => arc.length,
        Metric::Weight => arc.weight,
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // reversed for a min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths; arcs traversed head-to-tail when
/// `reversed` is set.
pub(crate) fn shortest_path_lengths(
    g: &Digraph,
    root: NodeId,
    metric: Metric,
    restriction: Option<&ArcSubset>,
    reversed: bool,
) -> Vec<Option<f64>> {
    let n = g.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, arc) in g.arcs().iter().enumerate() {
        if restriction.map_or(true, |r| r.contains(idx)) {
            let from = if reversed { arc.head } else { arc.tail };
            adj[from].push(idx);
        }
    }
    let mut dist: Vec<Option<f64>> = vec![None; n];
    let mut heap = std::collections::BinaryHeap::new();
    dist[root] = Some(0.0);
    heap.push(HeapEntry { dist: 0.0, node: root });
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        for &idx in &adj[u] {
            let arc = g.arc(idx);
            let v = if reversed { arc.tail } else { arc.head };
            let nd = d + arc_cost(arc, metric);
            if dist[v].map_or(true, |cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(HeapEntry { dist: nd, node: v });
            }
        }
    }
    dist
}

/// Deterministic predecessor arcs for the shortest paths out of `root`
/// (into `root` when `reversed`). Ties break lexicographically by
/// (predecessor node-id, arc index).
pub(crate) fn predecessor_arcs(
    g: &Digraph,
    root: NodeId,
    metric: Metric,
    restriction: Option<&ArcSubset>,
    reversed: bool,
) -> (Vec<Option<f64>>, Vec<Option<usize>>) {
    let dist = shortest_path_lengths(g, root, metric, restriction, reversed);
    let n = g.node_count();
    let mut pred: Vec<Option<usize>> = vec![None; n];
    for (idx, arc) in g.arcs().iter().enumerate() {
        if !restriction.map_or(true, |r| r.contains(idx)) {
            continue;
        }
        let (from, to) = if reversed { (arc.head, arc.tail) } else { (arc.tail, arc.head) };
        if to == root {
            continue;
        }
        let (Some(df), Some(dt)) = (dist[from], dist[to]) else { continue };
        if df + arc_cost(arc, metric) != dt {
            continue;
        }
        let better = match pred[to] {
            None => true,
            Some(cur) => {
                let cur_arc = g.arc(cur);
                let cur_from = if reversed { cur_arc.head } else { cur_arc.tail };
                (from, idx) < (cur_from, cur)
            }
        };
        if better {
            pred[to] = Some(idx);
        }
    }
    (dist, pred)
}

/// Shortest directed distances w.r.t. the length function `d`, optionally
/// restricted to a subset of arcs.
pub fn all_pairs_distances(g: &Digraph, restriction: Option<&ArcSubset>) -> DistanceMatrix {
    let n = g.node_count();
    let mut dist = Vec::with_capacity(n * n);
    for u in 0..n {
        dist.extend(shortest_path_lengths(g, u, Metric::Length, restriction, false));
    }
    DistanceMatrix { n, dist }
}

pub type DemandMap = BTreeMap<(NodeId, NodeId), f64>;

/// Total routing cost: the sum of `dist(u, v)` over all ordered pairs
/// `u != v`, optionally weighted by a demand map (pairs with zero demand
/// do not contribute and may be unreachable).
pub fn routing_cost(
    g: &Digraph,
    restriction: Option<&ArcSubset>,
    demand: Option<&DemandMap>,
) -> Cost {
    let n = g.node_count();
    match demand {
        Some(dem) => {
            // only source rows that actually carry demand
            let mut total = 0.0;
            let sources: std::collections::BTreeSet<NodeId> =
                dem.iter().filter(|(_, &w)| w > 0.0).map(|(&(u, _), _)| u).collect();
            for u in sources {
                let row = shortest_path_lengths(g, u, Metric::Length, restriction, false);
                for (&(s, t), &w) in dem.iter() {
                    if s != u || w == 0.0 || s == t {
                        continue;
                    }
                    match row[t] {
                        Some(d) => total += w * d,
                        None => return Cost::Infinite,
                    }
                }
            }
            Cost::Finite(total)
        }
        None => {
            let mut total = 0.0;
            for u in 0..n {
                let row = shortest_path_lengths(g, u, Metric::Length, restriction, false);
                for (v, entry) in row.iter().enumerate() {
                    if v == u {
                        continue;
                    }
                    match entry {
                        Some(d) => total += d,
                        None => return Cost::Infinite,
                    }
                }
            }
            Cost::Finite(total)
        }
    }
}

/// Shortest-path arborescence (outbound) or anti-arborescence (inbound)
/// rooted at `root`; exactly `|V|-1` arcs.
pub fn shortest_path_arborescence(
    g: &Digraph,
    root: NodeId,
    orientation: Orientation,
) -> Result<ArcSubset, GraphError> {
    let reversed = orientation == Orientation::Inbound;
    let (dist, pred) = predecessor_arcs(g, root, Metric::Length, None, reversed);
    let mut subset = ArcSubset::empty(g);
    for v in 0..g.node_count() {
        if v == root {
            continue;
        }
        if dist[v].is_none() {
            return Err(GraphError::UnreachableNode(v));
        }
        subset.insert(pred[v].expect("reachable node has a predecessor arc"));
    }
    Ok(subset)
}

/// Union of the outbound and inbound arborescences rooted at `v`; a
/// strongly connected subgraph with at most `2(|V|-1)` arcs.
pub fn shortest_path_subgraph(g: &Digraph, v: NodeId) -> Result<ArcSubset, GraphError> {
    if !is_strongly_connected(g) {
        return Err(GraphError::NotStronglyConnected);
    }
    let out = shortest_path_arborescence(g, v, Orientation::Outbound)?;
    let inb = shortest_path_arborescence(g, v, Orientation::Inbound)?;
    Ok(out.union(&inb))
}

/// Node minimizing `R+_w + R-_w`; ties break towards the smallest id.
pub fn central_node(g: &Digraph) -> Result<NodeId, GraphError> {
    if !is_strongly_connected(g) {
        return Err(GraphError::NotStronglyConnected);
    }
    let n = g.node_count();
    let dist = all_pairs_distances(g, None);
    let mut best: Option<(f64, NodeId)> = None;
    for w in 0..n {
        let mut score = 0.0;
        for u in 0..n {
            if u == w {
                continue;
            }
            score += dist.get(w, u).expect("strongly connected");
            score += dist.get(u, w).expect("strongly connected");
        }
        if best.map_or(true, |(b, _)| score < b) {
            best = Some((score, w));
        }
    }
    best.map(|(_, w)| w).ok_or(GraphError::NotStronglyConnected)
}

/// True iff the graph is weakly connected and free of directed cycles.
pub fn is_tree_like(g: &Digraph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return false;
    }
    // weak connectivity
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut undirected: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for arc in g.arcs() {
        undirected[arc.tail].push(arc.head);
        undirected[arc.head].push(arc.tail);
    }
    while let Some(u) = stack.pop() {
        for &v in &undirected[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return false;
    }
    // acyclicity via Kahn's algorithm
    let mut indeg = vec![0usize; n];
    for arc in g.arcs() {
        indeg[arc.head] += 1;
    }
    let mut queue: Vec<NodeId> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for arc in g.arcs() {
            if arc.tail == u {
                indeg[arc.head] -= 1;
                if indeg[arc.head] == 0 {
                    queue.push(arc.head);
                }
            }
        }
    }
    removed == n
}

pub fn is_strongly_connected(g: &Digraph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return true;
    }
    let fwd = shortest_path_lengths(g, 0, Metric::Length, None, false);
    let bwd = shortest_path_lengths(g, 0, Metric::Length, None, true);
    (0..n).all(|v| fwd[v].is_some() && bwd[v].is_some())
}

/// Reachability of `t` from `s` under an optional restriction.
pub fn reachable(g: &Digraph, restriction: Option<&ArcSubset>, s: NodeId, t: NodeId) -> bool {
    shortest_path_lengths(g, s, Metric::Length, restriction, false)[t].is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        let arcs = (0..n)
            .map(|i| GraphArc::new(i, (i + 1) % n, 1.0, 1.0))
            .collect();
        Digraph::new(n, arcs).unwrap()
    }

    fn complete_symmetric(n: usize) -> Digraph {
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    arcs.push(GraphArc::new(u, v, 1.0, 1.0));
                }
            }
        }
        Digraph::new(n, arcs).unwrap()
    }

    #[test]
    fn rejects_self_loops() {
        let err = Digraph::new(2, vec![GraphArc::new(1, 1, 1.0, 1.0)]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop(0));
    }

    #[test]
    fn single_node_distances() {
        let g = Digraph::new(1, vec![]).unwrap();
        let d = all_pairs_distances(&g, None);
        assert_eq!(d.get(0, 0), Some(0.0));
        assert_eq!(routing_cost(&g, None, None), Cost::Finite(0.0));
    }

    #[test]
    fn three_cycle_distances() {
        // v0 -> v1 -> v1' -> v0, all lengths 1
        let g = cycle(3);
        let d = all_pairs_distances(&g, None);
        assert_eq!(d.get(0, 2), Some(2.0));
        assert_eq!(d.get(2, 1), Some(2.0));
    }

    #[test]
    fn disconnected_pair_unreachable() {
        let g = Digraph::new(4, vec![GraphArc::new(0, 1, 1.0, 1.0), GraphArc::new(2, 3, 1.0, 1.0)])
            .unwrap();
        let d = all_pairs_distances(&g, None);
        assert_eq!(d.get(0, 2), None);
        assert_eq!(routing_cost(&g, None, None), Cost::Infinite);
    }

    #[test]
    fn routing_cost_matches_matrix_sum() {
        // fixed small digraph, summed by hand from the matrix
        let g = Digraph::new(
            5,
            vec![
                GraphArc::new(0, 1, 1.0, 2.0),
                GraphArc::new(1, 2, 1.0, 1.0),
                GraphArc::new(2, 3, 1.0, 3.0),
                GraphArc::new(3, 4, 1.0, 1.0),
                GraphArc::new(4, 0, 1.0, 2.0),
                GraphArc::new(2, 0, 1.0, 1.0),
            ],
        )
        .unwrap();
        let d = all_pairs_distances(&g, None);
        let mut sum = 0.0;
        for u in 0..5 {
            for v in 0..5 {
                if u != v {
                    sum += d.get(u, v).unwrap();
                }
            }
        }
        assert_eq!(routing_cost(&g, None, None), Cost::Finite(sum));
    }

    #[test]
    fn arborescence_on_cycle() {
        let g = cycle(4);
        let a = shortest_path_arborescence(&g, 1, Orientation::Outbound).unwrap();
        assert_eq!(a.len(), 3);
        // the arc entering the root is left out
        assert!(!a.contains(0));
    }

    #[test]
    fn arborescence_single_node() {
        let g = Digraph::new(1, vec![]).unwrap();
        let a = shortest_path_arborescence(&g, 0, Orientation::Outbound).unwrap();
        assert!(a.is_empty());
    }

    #[test]
    fn arborescence_unreachable_root() {
        let g = Digraph::new(2, vec![GraphArc::new(0, 1, 1.0, 1.0)]).unwrap();
        let err = shortest_path_arborescence(&g, 1, Orientation::Outbound).unwrap_err();
        assert_eq!(err, GraphError::UnreachableNode(0));
    }

    #[test]
    fn arborescence_paths_are_shortest() {
        let g = complete_symmetric(6);
        let d = all_pairs_distances(&g, None);
        let a = shortest_path_arborescence(&g, 2, Orientation::Outbound).unwrap();
        assert_eq!(a.len(), 5);
        let within = shortest_path_lengths(&g, 2, Metric::Length, Some(&a), false);
        for w in 0..6 {
            assert_eq!(within[w], d.get(2, w));
        }
    }

    #[test]
    fn subgraph_of_cycle_is_cycle() {
        let g = cycle(5);
        let s = shortest_path_subgraph(&g, 0).unwrap();
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn subgraph_of_complete_is_star() {
        let g = complete_symmetric(5);
        let s = shortest_path_subgraph(&g, 2).unwrap();
        assert_eq!(s.len(), 8);
        for idx in s.indices() {
            let arc = g.arc(idx);
            assert!(arc.tail == 2 || arc.head == 2);
        }
    }

    #[test]
    fn subgraph_strongly_connected() {
        for g in [cycle(6), complete_symmetric(4)] {
            let s = shortest_path_subgraph(&g, 1).unwrap();
            let fwd = shortest_path_lengths(&g, 0, Metric::Length, Some(&s), false);
            let bwd = shortest_path_lengths(&g, 0, Metric::Length, Some(&s), true);
            assert!((0..g.node_count()).all(|v| fwd[v].is_some() && bwd[v].is_some()));
        }
    }

    #[test]
    fn central_node_of_line() {
        // symmetric path 0 - 1 - 2: the middle node wins
        let g = Digraph::new(
            3,
            vec![
                GraphArc::new(0, 1, 1.0, 1.0),
                GraphArc::new(1, 0, 1.0, 1.0),
                GraphArc::new(1, 2, 1.0, 1.0),
                GraphArc::new(2, 1, 1.0, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(central_node(&g).unwrap(), 1);
    }

    #[test]
    fn central_node_ties_to_smallest_id() {
        assert_eq!(central_node(&complete_symmetric(4)).unwrap(), 0);
        assert_eq!(central_node(&cycle(5)).unwrap(), 0);
    }

    #[test]
    fn tree_like_cases() {
        let path = Digraph::new(
            3,
            vec![GraphArc::new(0, 1, 1.0, 1.0), GraphArc::new(1, 2, 1.0, 1.0)],
        )
        .unwrap();
        assert!(is_tree_like(&path));
        let two_cycle = Digraph::new(
            2,
            vec![GraphArc::new(0, 1, 1.0, 1.0), GraphArc::new(1, 0, 1.0, 1.0)],
        )
        .unwrap();
        assert!(!is_tree_like(&two_cycle));
        let disconnected = Digraph::new(
            4,
            vec![GraphArc::new(0, 1, 1.0, 1.0), GraphArc::new(2, 3, 1.0, 1.0)],
        )
        .unwrap();
        assert!(!is_tree_like(&disconnected));
    }

    #[test]
    fn strong_connectivity_cases() {
        assert!(is_strongly_connected(&cycle(3)));
        let g = Digraph::new(2, vec![GraphArc::new(0, 1, 1.0, 1.0)]).unwrap();
        assert!(!is_strongly_connected(&g));
    }

    #[test]
    fn restriction_monotone() {
        let g = complete_symmetric(4);
        let full = routing_cost(&g, None, None).finite().unwrap();
        let sub = shortest_path_subgraph(&g, 0).unwrap();
        match routing_cost(&g, Some(&sub), None) {
            Cost::Finite(r) => assert!(r >= full),
            Cost::Infinite => panic!("subgraph is strongly connected"),
        }
    }

    #[test]
    fn demand_weighted_routing_cost() {
        let g = cycle(3);
        let mut dem = DemandMap::new();
        dem.insert((0, 2), 3.0);
        assert_eq!(routing_cost(&g, None, Some(&dem)), Cost::Finite(6.0));
        // unreachable demanded pair
        let h = Digraph::new(3, vec![GraphArc::new(0, 1, 1.0, 1.0)]).unwrap();
        assert_eq!(routing_cost(&h, None, Some(&dem)), Cost::Infinite);
        // zero-demand unreachable pair is ignored
        let mut dem0 = DemandMap::new();
        dem0.insert((0, 1), 1.0);
        dem0.insert((0, 2), 0.0);
        assert_eq!(routing_cost(&h, None, Some(&dem0)), Cost::Finite(1.0));
    }

    #[test]
    fn distances_deterministic() {
        let g = complete_symmetric(5);
        let a = all_pairs_distances(&g, None);
        let b = all_pairs_distances(&g, None);
        assert_eq!(a, b);
    }
}
