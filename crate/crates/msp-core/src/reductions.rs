//! Gadget generators for the hardness reductions, each paired with an
//! extractor that reads a source-problem witness out of a target-side
//! solution. Generators are deterministic; all parameters follow the
//! closed-form constructions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ArcSubset, DemandMap, Digraph, GraphArc, NodeId};
use crate::model::{Demand, Mode, MspInstance, Solution};

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("malformed X3C instance: {0}")]
    MalformedX3c(String),
    #[error("reduction requires unit weights")]
    NonUnitWeights,
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("gadget would exceed the configured node limit")]
    GadgetTooLarge,
}

/// Exact cover by 3-sets over the ground set `{1..n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct X3cInstance {
    pub n: usize,
    pub sets: Vec<[usize; 3]>,
}

impl X3cInstance {
    pub fn new(n: usize, sets: Vec<[usize; 3]>) -> Result<Self, ReductionError> {
        if n % 3 != 0 {
            return Err(ReductionError::MalformedX3c("n must be divisible by 3".into()));
        }
        for (j, s) in sets.iter().enumerate() {
            if s[0] == s[1] || s[0] == s[2] || s[1] == s[2] {
                return Err(ReductionError::MalformedX3c(format!("set {j} has repeats")));
            }
            if s.iter().any(|&x| x < 1 || x > n) {
                return Err(ReductionError::MalformedX3c(format!("set {j} out of range")));
            }
        }
        Ok(X3cInstance { n, sets })
    }

    /// Brute-force exact-cover search; returns the set indices of a
    /// cover if one exists.
    pub fn decide(&self) -> Option<Vec<usize>> {
        fn rec(x: &X3cInstance, covered: &mut Vec<bool>, from: usize, chosen: &mut Vec<usize>) -> bool {
            let next = match covered.iter().skip(1).position(|&c| !c) {
                Some(p) => p + 1,
                None => return true,
            };
            for j in from..x.sets.len() {
                let s = x.sets[j];
                if !s.contains(&next) || s.iter().any(|&e| covered[e]) {
                    continue;
                }
                for &e in &s {
                    covered[e] = true;
                }
                chosen.push(j);
                if rec(x, covered, 0, chosen) {
                    return true;
                }
                chosen.pop();
                for &e in &s {
                    covered[e] = false;
                }
            }
            false
        }
        let mut covered = vec![false; self.n + 1];
        let mut chosen = Vec::new();
        if rec(self, &mut covered, 0, &mut chosen) {
            chosen.sort_unstable();
            Some(chosen)
        } else {
            None
        }
    }
}

/// A DiNDP instance: pick arcs of weight at most `beta` so that the
/// routing cost stays within `gamma`. The optional demand map weights
/// the routing cost (used by the star gadgets below); plain DiNDP
/// leaves it `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DindpInstance {
    pub graph: Digraph,
    pub beta: f64,
    pub gamma: f64,
    pub demand: Option<DemandMap>,
}

/// A directed Steiner arborescence instance rooted at `root`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistpInstance {
    pub graph: Digraph,
    pub root: NodeId,
    pub terminals: Vec<NodeId>,
    pub budget: f64,
}

impl DistpInstance {
    /// Brute-force decision: does an arborescence of weight at most
    /// `budget` rooted at `root` reach every terminal? Any arc set
    /// reaching all terminals prunes to such an arborescence, so plain
    /// subset enumeration over reachability suffices.
    pub fn decide(&self) -> bool {
        let arcs = self.graph.arcs().len();
        assert!(arcs <= 20, "decision helper is desk-scale only");
        'subsets: for mask in 0u32..(1u32 << arcs) {
            let mut subset = ArcSubset::empty(&self.graph);
            let mut weight = 0.0;
            for e in 0..arcs {
                if mask >> e & 1 == 1 {
                    subset.insert(e);
                    weight += self.graph.arc(e).weight;
                }
            }
            if weight > self.budget {
                continue;
            }
            for &t in &self.terminals {
                if !crate::graph::reachable(&self.graph, Some(&subset), self.root, t) {
                    continue 'subsets;
                }
            }
            return true;
        }
        false
    }
}

/// Generated instance plus the parameter record and node-role map the
/// extractors and tests address the gadget by.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutput<I> {
    pub instance: I,
    /// closed-form parameters (h, k, beta, gamma, thresholds, ...)
    pub params: BTreeMap<String, f64>,
    /// symbolic node names -> node ids ("u0", "v1", "w3", "q", ...)
    pub roles: BTreeMap<String, usize>,
    /// the construction itself already decides false (degenerate rule)
    pub false_marker: bool,
}

impl<I> ReductionOutput<I> {
    fn new(instance: I) -> Self {
        ReductionOutput {
            instance,
            params: BTreeMap::new(),
            roles: BTreeMap::new(),
            false_marker: false,
        }
    }
}

/// The six block routing costs of the X3C gadget's optimal
/// shape. Off-diagonal blocks are one-directional sums; the symmetric
/// shape makes both directions equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct X3cBlockCosts {
    pub c_uu: f64,
    pub c_uw: f64,
    pub c_vv: f64,
    pub c_vw: f64,
    pub c_ww: f64,
    pub c_uv: f64,
}

/// Closed-form block costs. `c_vw` is `3nk - 2n`: each element node
/// attaches to exactly one chosen subset node (distance 1, n pairs) and
/// sits at distance 3 from the other k-1 subset nodes (nk - n pairs),
/// giving n + 3(nk - n).
pub fn x3c_block_costs(h: usize, n: usize, k: usize) -> X3cBlockCosts {
    let (hf, nf, kf) = (h as f64, n as f64, k as f64);
    X3cBlockCosts {
        c_uu: 2.0 * hf * hf,
        c_uw: 3.0 * hf * nf + 2.0 * nf,
        c_vv: 2.0 * kf * (kf - 1.0),
        c_vw: 3.0 * nf * kf - 2.0 * nf,
        c_ww: 4.0 * nf * nf - 8.0 * nf,
        c_uv: 2.0 * hf * kf + kf,
    }
}

/// The gadget's pendant count `h` and routing-cost bound `gamma`
/// derived from the block costs.
pub fn x3c_parameters(n: usize, k: usize) -> (usize, f64) {
    // h depends only on the V/W blocks
    let base = x3c_block_costs(0, n, k);
    let h = (base.c_vv + 2.0 * base.c_vw + base.c_ww) as usize;
    let t = x3c_block_costs(h, n, k);
    let gamma = t.c_uu + t.c_vv + t.c_ww + 2.0 * (t.c_uv + t.c_uw + t.c_vw);
    (h, gamma)
}

/// X3C gadget: hub u_0 with h pendants, subset nodes v_j symmetric
/// to the hub, element nodes w_i symmetric to every subset containing
/// them; all arcs have w = d = 1, beta = 2(|V| - 1).
pub fn x3c_to_dindp(x: &X3cInstance) -> Result<ReductionOutput<DindpInstance>, ReductionError> {
    let (n, k) = (x.n, x.sets.len());
    let (h, gamma) = x3c_parameters(n, k);
    let node_count = 1 + h + k + n;
    let u0 = 0;
    let v_base = 1 + h; // v_j = v_base + j for j in 0..k
    let w_base = 1 + h + k; // w_i = w_base + i - 1 for elements 1..=n
    let mut arcs = Vec::new();
    let sym = |a: usize, b: usize, arcs: &mut Vec<GraphArc>| {
        arcs.push(GraphArc::new(a, b, 1.0, 1.0));
        arcs.push(GraphArc::new(b, a, 1.0, 1.0));
    };
    for p in 1..=h {
        sym(u0, p, &mut arcs);
    }
    for j in 0..k {
        sym(u0, v_base + j, &mut arcs);
    }
    for (j, s) in x.sets.iter().enumerate() {
        for &elem in s {
            sym(v_base + j, w_base + elem - 1, &mut arcs);
        }
    }
    let graph = Digraph::new(node_count, arcs).expect("gadget arcs are valid");
    let beta = 2.0 * (node_count as f64 - 1.0);
    let mut out = ReductionOutput::new(DindpInstance { graph, beta, gamma, demand: None });
    out.params.insert("h".into(), h as f64);
    out.params.insert("k".into(), k as f64);
    out.params.insert("n".into(), n as f64);
    out.params.insert("beta".into(), beta);
    out.params.insert("gamma".into(), gamma);
    out.roles.insert("u0".into(), u0);
    out.roles.insert("v_base".into(), v_base);
    out.roles.insert("w_base".into(), w_base);
    Ok(out)
}

/// The optimal-shape subgraph of the gadget for a given exact cover:
/// the full star around u_0 plus, per element, the symmetric arcs to
/// its covering subset node.
pub fn x3c_optimal_subgraph(
    x: &X3cInstance,
    out: &ReductionOutput<DindpInstance>,
    cover: &[usize],
) -> ArcSubset {
    let g = &out.instance.graph;
    let v_base = out.roles["v_base"];
    let w_base = out.roles["w_base"];
    let h = out.params["h"] as usize;
    let k = out.params["k"] as usize;
    let mut covering = vec![usize::MAX; x.n + 1];
    for &j in cover {
        for &elem in &x.sets[j] {
            covering[elem] = j;
        }
    }
    let mut subset = ArcSubset::empty(g);
    // star arcs to pendants and subset nodes come first by construction
    for idx in 0..2 * (h + k) {
        subset.insert(idx);
    }
    for (idx, arc) in g.arcs().iter().enumerate().skip(2 * (h + k)) {
        let (a, b) = (arc.tail.min(arc.head), arc.tail.max(arc.head));
        let (j, elem) = (a - v_base, b - w_base + 1);
        if covering[elem] == j {
            subset.insert(idx);
        }
    }
    subset
}

/// Read the chosen subsets out of a DiNDP solution: every subset node
/// with a surviving connection into the element layer is chosen.
pub fn x3c_extract_cover(
    out: &ReductionOutput<DindpInstance>,
    subset: &ArcSubset,
) -> Vec<usize> {
    let g = &out.instance.graph;
    let v_base = out.roles["v_base"];
    let w_base = out.roles["w_base"];
    let mut chosen: Vec<usize> = subset
        .indices()
        .filter_map(|idx| {
            let arc = g.arc(idx);
            let (a, b) = (arc.tail.min(arc.head), arc.tail.max(arc.head));
            (a >= v_base && b >= w_base).then(|| a - v_base)
        })
        .collect();
    chosen.sort_unstable();
    chosen.dedup();
    chosen
}

/// ESUM gadget: hub v_0, per item the cycle v_0 -> v_i -> v_i' ->
/// v_0 plus the back-arc (v_i', v_i), all four arcs with w = d = s_i.
pub fn esum_to_dindp(items: &[u64], target: u64) -> ReductionOutput<DindpInstance> {
    let n = items.len();
    let sbar: u64 = items.iter().sum();
    let mut arcs = Vec::new();
    for (i, &s) in items.iter().enumerate() {
        let (vi, vi_p) = (1 + 2 * i, 2 + 2 * i);
        let s = s as f64;
        arcs.push(GraphArc::new(0, vi, s, s));
        arcs.push(GraphArc::new(vi, vi_p, s, s));
        arcs.push(GraphArc::new(vi_p, 0, s, s));
        arcs.push(GraphArc::new(vi_p, vi, s, s)); // back-arc
    }
    let graph = Digraph::new(1 + 2 * n, arcs).expect("gadget arcs are valid");
    let beta = 3.0 * sbar as f64 + target as f64;
    let gamma = (12.0 * n as f64 - 3.0) * sbar as f64 - target as f64;
    let mut out = ReductionOutput::new(DindpInstance { graph, beta, gamma, demand: None });
    out.params.insert("sbar".into(), sbar as f64);
    out.params.insert("beta".into(), beta);
    out.params.insert("gamma".into(), gamma);
    out.roles.insert("v0".into(), 0);
    out
}

/// Cycle arcs of the ESUM gadget (everything except the back-arcs).
pub fn esum_cycle_subset(out: &ReductionOutput<DindpInstance>) -> ArcSubset {
    let g = &out.instance.graph;
    let mut subset = ArcSubset::full(g);
    for i in 0..g.arcs().len() / 4 {
        subset.remove(4 * i + 3);
    }
    subset
}

/// Read the chosen item indices out of a DiNDP solution: one per
/// included back-arc.
pub fn esum_extract_items(out: &ReductionOutput<DindpInstance>, subset: &ArcSubset) -> Vec<usize> {
    (0..out.instance.graph.arcs().len() / 4)
        .filter(|i| subset.contains(4 * i + 3))
        .collect()
}

/// Reduction DiNDP -> MSP for unit weights: huge private energy
/// forces an all-mode-1 solution, where the travel time equals the
/// routing cost of the layout support and the energy equals its
/// weight, so (a, b) = (gamma, beta). The MSP
/// budget is not part of the construction; it is set to |E| c_1 so it
/// never binds.
pub fn dindp_to_msp(i: &DindpInstance) -> Result<ReductionOutput<MspInstance>, ReductionError> {
    let g = &i.graph;
    if g.arcs().iter().any(|a| a.weight != 1.0 || a.length != 1.0) {
        return Err(ReductionError::NonUnitWeights);
    }
    let e = g.arcs().len() as f64;
    let eta0 = e * (i.beta + 1.0);
    let k1 = (g.arcs().len() * g.arcs().len()) as u64;
    let mut demand = Demand::new();
    for u in 0..g.node_count() {
        for v in 0..g.node_count() {
            if u != v {
                demand.insert((u, v), 1);
            }
        }
    }
    let inst = MspInstance::new(
        g.clone(),
        vec![Mode::new(0.25, eta0, 0.0, 1), Mode::new(1.0, 1.0, 1.0, k1)],
        demand,
        e, // = sum_e w(e) c_1, never binding
        Some((i.gamma, i.beta)),
    )
    .expect("constructed parameters are valid");
    let mut out = ReductionOutput::new(inst);
    out.false_marker = !crate::graph::is_strongly_connected(g);
    out.params.insert("eta0".into(), eta0);
    out.params.insert("k1".into(), k1 as f64);
    out.params.insert("a".into(), i.gamma);
    out.params.insert("b".into(), i.beta);
    Ok(out)
}

/// Mode-1 support of an MSP solution's layout, as an arc subset of the
/// source DiNDP graph.
pub fn dindp_extract_subset(i: &DindpInstance, sol: &Solution) -> ArcSubset {
    let mut subset = ArcSubset::empty(&i.graph);
    for (e, per_arc) in sol.layout.vehicles.iter().enumerate() {
        if per_arc.iter().any(|&c| c > 0.0) {
            subset.insert(e);
        }
    }
    subset
}

/// Reduction SSUM -> MSP: one-directed path graph, one item per
/// arc, demand 2 end to end, k_1 = 2, B = A'. With the model's energy
/// function the all-mode-0 consumption is 2 S-bar (flow 2 on every
/// arc), so the decision bound is b = 2 S-bar - A; installing the
/// vehicle on arc e_i saves exactly s_i.
pub fn ssum_to_msp(items: &[u64], a: u64, a_prime: u64) -> ReductionOutput<MspInstance> {
    let n = items.len();
    let sbar: u64 = items.iter().sum();
    let arcs = items
        .iter()
        .enumerate()
        .map(|(i, &s)| GraphArc::new(i, i + 1, s as f64, s as f64))
        .collect();
    let graph = Digraph::new(n + 1, arcs).expect("path arcs are valid");
    let mut demand = Demand::new();
    demand.insert((0, n), 2);
    let b = 2.0 * sbar as f64 - a as f64;
    let inst = MspInstance::new(
        graph,
        vec![Mode::new(1.0, 1.0, 0.0, 1), Mode::new(1.0, 1.0, 1.0, 2)],
        demand,
        a_prime as f64,
        Some((f64::INFINITY, b)),
    )
    .expect("constructed parameters are valid");
    let mut out = ReductionOutput::new(inst);
    out.params.insert("sbar".into(), sbar as f64);
    out.params.insert("b".into(), b);
    out
}

/// Arcs with an installed vehicle, i.e. the chosen subset.
pub fn ssum_extract_items(sol: &Solution) -> Vec<usize> {
    sol.layout
        .vehicles
        .iter()
        .enumerate()
        .filter(|(_, v)| v[0] > 0.0)
        .map(|(e, _)| e)
        .collect()
}

/// Reduction UKPS -> MSP: a single unit arc, one mode per item
/// with eta = s, k = 2s, c = w; D = 2 s_max A', B = A',
/// b = max(0, 2 s_max A' - A). A non-positive b marks the instance as
/// deciding false outright.
pub fn ukps_to_msp(items: &[(u64, u64)], a: u64, a_prime: u64) -> ReductionOutput<MspInstance> {
    let s_max = items.iter().map(|&(s, _)| s).max().unwrap_or(0);
    let d_total = 2 * s_max * a_prime;
    let b_raw = d_total as f64 - a as f64;
    let graph = Digraph::new(2, vec![GraphArc::new(0, 1, 1.0, 1.0)]).expect("single arc");
    let mut modes = vec![Mode::new(1.0, 1.0, 0.0, 1)];
    for &(s, w) in items {
        modes.push(Mode::new(1.0, s as f64, w as f64, 2 * s));
    }
    let mut demand = Demand::new();
    if d_total > 0 {
        demand.insert((0, 1), d_total);
    }
    let inst = MspInstance::new(
        graph,
        modes,
        demand,
        a_prime as f64,
        Some((f64::INFINITY, b_raw.max(0.0))),
    )
    .expect("constructed parameters are valid");
    let mut out = ReductionOutput::new(inst);
    out.false_marker = b_raw <= 0.0;
    out.params.insert("s_max".into(), s_max as f64);
    out.params.insert("D".into(), d_total as f64);
    out.params.insert("b".into(), b_raw.max(0.0));
    out
}

/// Item counts x_i = L(e)_i from the single-arc layout.
pub fn ukps_extract_counts(sol: &Solution) -> Vec<u64> {
    sol.layout.vehicles[0].iter().map(|&c| c.round() as u64).collect()
}

/// Inapproximability reduction DiSTP -> MSP: demand ceil(alpha (|E|+1)) from the
/// root to each terminal, one public mode with capacity equal to the
/// total demand. Solvable instances admit H <= |E|; unsolvable ones
/// force H >= alpha (|E|+1). `params["threshold"]` records the
/// separation value alpha |E|.
pub fn distp_to_msp_inapprox(
    i: &DistpInstance,
    alpha: f64,
) -> Result<ReductionOutput<MspInstance>, ReductionError> {
    let g = &i.graph;
    if g.arcs().iter().any(|a| a.weight != 1.0) {
        return Err(ReductionError::PremiseViolated("weights must be 1".into()));
    }
    if i.budget > g.arcs().len() as f64 {
        return Err(ReductionError::PremiseViolated("beta > |E|".into()));
    }
    let e = g.arcs().len() as f64;
    let per_terminal = (alpha * (e + 1.0)).ceil() as u64;
    let mut demand = Demand::new();
    for &t in &i.terminals {
        if t != i.root {
            demand.insert((i.root, t), per_terminal);
        }
    }
    let k1: u64 = demand.values().sum::<u64>().max(1);
    let inst = MspInstance::new(
        g.clone(),
        vec![Mode::new(1.0, 1.0, 0.0, 1), Mode::new(1.0, 1.0, 1.0, k1)],
        demand,
        i.budget,
        None,
    )
    .expect("constructed parameters are valid");
    let mut out = ReductionOutput::new(inst);
    out.params.insert("threshold".into(), alpha * e);
    out.params.insert("per_terminal".into(), per_terminal as f64);
    out.params.insert("k1".into(), k1 as f64);
    Ok(out)
}

/// Node cap for the star gadget.
pub const DISTP_GADGET_NODE_LIMIT: usize = 20_000;

/// Inapproximability reduction DiSTP -> DiNDP: star of `h^k` nodes per
/// terminal (w = d = 0), an artificial hub q two-way to every original
/// node (w = 0, d = 2), original arcs keep w and get d = 0. Demand 1
/// from each root-star node to each other terminal's star nodes. The
/// decision threshold `4 * star^2` is recorded in params; gamma is set
/// one below it (routing costs are even integers). `star_override`
/// replaces `h^k` for desk-scale tests.
pub fn distp_to_dindp_inapprox(
    i: &DistpInstance,
    eps: f64,
    star_override: Option<usize>,
) -> Result<ReductionOutput<DindpInstance>, ReductionError> {
    let g = &i.graph;
    let h = g.node_count();
    if h < 4 {
        return Err(ReductionError::PremiseViolated("|V| >= 4 required".into()));
    }
    if !(0.0..1.0).contains(&eps) || eps <= 0.0 {
        return Err(ReductionError::PremiseViolated("eps must lie in (0,1)".into()));
    }
    let mut k = 3usize;
    while ((k as f64) - 2.0) / ((k as f64) + 2.0) < 1.0 - eps {
        k += 1;
    }
    let star = match star_override {
        Some(s) => s,
        None => {
            let mut s: usize = 1;
            for _ in 0..k {
                s = s.saturating_mul(h);
                if s > DISTP_GADGET_NODE_LIMIT {
                    return Err(ReductionError::GadgetTooLarge);
                }
            }
            s
        }
    };
    let terminals: Vec<usize> = i.terminals.clone();
    let node_count = h + star * terminals.len() + 1;
    if node_count > DISTP_GADGET_NODE_LIMIT {
        return Err(ReductionError::GadgetTooLarge);
    }
    let q = node_count - 1;
    let mut arcs: Vec<GraphArc> = g
        .arcs()
        .iter()
        .map(|a| GraphArc::new(a.tail, a.head, a.weight, 0.0))
        .collect();
    let mut star_base = BTreeMap::new();
    let mut next = h;
    for &t in &terminals {
        star_base.insert(t, next);
        for l in 0..star {
            arcs.push(GraphArc::new(t, next + l, 0.0, 0.0));
            arcs.push(GraphArc::new(next + l, t, 0.0, 0.0));
        }
        next += star;
    }
    for v in 0..h {
        arcs.push(GraphArc::new(q, v, 0.0, 2.0));
        arcs.push(GraphArc::new(v, q, 0.0, 2.0));
    }
    let graph = Digraph::new(node_count, arcs).expect("gadget arcs are valid");
    let mut demand = DemandMap::new();
    let root_base = star_base[&i.root];
    for &t in &terminals {
        if t == i.root {
            continue;
        }
        let base = star_base[&t];
        for j in 0..star {
            for l in 0..star {
                demand.insert((root_base + j, base + l), 1.0);
            }
        }
    }
    let threshold = 4.0 * (star * star) as f64;
    let inst = DindpInstance {
        graph,
        beta: i.budget,
        gamma: threshold - 1.0,
        demand: Some(demand),
    };
    let mut out = ReductionOutput::new(inst);
    out.params.insert("h".into(), h as f64);
    out.params.insert("k".into(), k as f64);
    out.params.insert("star".into(), star as f64);
    out.params.insert("threshold".into(), threshold);
    out.roles.insert("q".into(), q);
    for (t, base) in star_base {
        out.roles.insert(format!("star_base_{t}"), base);
    }
    Ok(out)
}
