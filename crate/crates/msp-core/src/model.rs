//! Modal-split instances, solutions, objective evaluation and feasibility.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{predecessor_arcs, Digraph, Metric, NodeId};

/// Absolute tolerance for feasibility arithmetic.
pub const FEAS_TOL: f64 = 1e-9;

/// One transportation mode. Mode 0 is private transport: cost 0 and
/// capacity 1, uncapacitated in the constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// travel time per unit distance
    pub travel_time: f64,
    /// energy per unit distance (per passenger for mode 0, per vehicle otherwise)
    pub energy: f64,
    /// installation cost per unit distance and vehicle
    pub cost: f64,
    /// passengers per vehicle
    pub capacity: u64,
}

impl Mode {
    pub fn new(travel_time: f64, energy: f64, cost: f64, capacity: u64) -> Self {
        Mode { travel_time, energy, cost, capacity }
    }
}

pub type Demand = BTreeMap<(NodeId, NodeId), u64>;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("mode counts disagree between solution and instance")]
    DimensionMismatch,
    #[error("commodity ({0}, {1}) has no directed path")]
    UnroutableCommodity(NodeId, NodeId),
}

/// An MSP instance: graph (only the weight function is used), modes,
/// integral demand, budget and optional decision bounds (a, b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MspInstance {
    pub graph: Digraph,
    pub modes: Vec<Mode>,
    pub demand: Demand,
    pub budget: f64,
    pub bounds: Option<(f64, f64)>,
}

impl MspInstance {
    pub fn new(
        graph: Digraph,
        modes: Vec<Mode>,
        demand: Demand,
        budget: f64,
        bounds: Option<(f64, f64)>,
    ) -> Result<Self, ModelError> {
        if modes.is_empty() {
            return Err(ModelError::InvalidInstance("mode 0 is required".into()));
        }
        let m0 = &modes[0];
        if m0.cost != 0.0 || m0.capacity != 1 {
            return Err(ModelError::InvalidInstance(
                "mode 0 must have cost 0 and capacity 1".into(),
            ));
        }
        for (i, mode) in modes.iter().enumerate() {
            if mode.travel_time < 0.0 || mode.energy < 0.0 || mode.cost < 0.0 {
                return Err(ModelError::InvalidInstance(format!(
                    "mode {i} has a negative parameter"
                )));
            }
            if mode.capacity == 0 {
                return Err(ModelError::InvalidInstance(format!("mode {i} has capacity 0")));
            }
        }
        if budget < 0.0 {
            return Err(ModelError::InvalidInstance("negative budget".into()));
        }
        for (&(s, t), _) in demand.iter() {
            if s == t {
                return Err(ModelError::InvalidInstance(format!(
                    "demand diagonal ({s}, {s}) must be zero"
                )));
            }
            if s >= graph.node_count() || t >= graph.node_count() {
                return Err(ModelError::InvalidInstance(format!(
                    "demand pair ({s}, {t}) out of range"
                )));
            }
        }
        Ok(MspInstance { graph, modes, demand, budget, bounds })
    }

    /// Number of public modes `m` (modes beyond mode 0).
    pub fn public_mode_count(&self) -> usize {
        self.modes.len() - 1
    }

    /// Ordered pairs with positive demand.
    pub fn commodities(&self) -> Vec<(NodeId, NodeId, u64)> {
        self.demand
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&(s, t), &d)| (s, t, d))
            .collect()
    }

    pub fn total_demand(&self) -> u64 {
        self.demand.values().sum()
    }
}

/// Per-arc vehicle counts for modes `1..=m`; integral unless `relaxed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    /// vehicles[arc][mode - 1]
    pub vehicles: Vec<Vec<f64>>,
    pub relaxed: bool,
}

impl Layout {
    pub fn zero(inst: &MspInstance) -> Self {
        Layout {
            vehicles: vec![vec![0.0; inst.public_mode_count()]; inst.graph.arcs().len()],
            relaxed: false,
        }
    }

    pub fn installation_cost(&self, inst: &MspInstance) -> f64 {
        self.vehicles
            .iter()
            .enumerate()
            .map(|(e, v)| {
                let w = inst.graph.arc(e).weight;
                v.iter()
                    .enumerate()
                    .map(|(i, &count)| w * inst.modes[i + 1].cost * count)
                    .sum::<f64>()
            })
            .sum()
    }
}

/// A single commodity's arc flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommodityFlow {
    pub source: NodeId,
    pub target: NodeId,
    pub value: f64,
    /// flow per arc index
    pub arc_flow: Vec<f64>,
}

/// Full solution triplet (F, L, M). `split[commodity][arc]` holds the
/// fraction vector over modes `0..=m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub flows: Vec<CommodityFlow>,
    pub layout: Layout,
    pub split: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub travel_time: f64,
    pub energy: f64,
}

impl ObjectivePoint {
    pub fn new(travel_time: f64, energy: f64) -> Self {
        ObjectivePoint { travel_time, energy }
    }
}

/// Strict componentwise dominance: `p <= q` with at least one strict
/// inequality. Exact comparison, no tolerance.
pub fn dominates(p: ObjectivePoint, q: ObjectivePoint) -> bool {
    p.travel_time <= q.travel_time
        && p.energy <= q.energy
        && (p.travel_time < q.travel_time || p.energy < q.energy)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Budget { spent: f64, limit: f64 },
    LayoutNegative { arc: usize, mode: usize },
    LayoutFractional { arc: usize, mode: usize, value: f64 },
    FlowNegative { commodity: usize, arc: usize },
    Conservation { commodity: usize, node: NodeId, residual: f64 },
    FlowValue { commodity: usize, residual: f64 },
    SplitRange { commodity: usize, arc: usize, mode: usize, value: f64 },
    SplitSum { commodity: usize, arc: usize, sum: f64 },
    Capacity { arc: usize, mode: usize, residual: f64 },
    Structure(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Budget { spent, limit } => {
                write!(f, "budget exceeded: spent {spent} > {limit}")
            }
            Violation::LayoutNegative { arc, mode } => {
                write!(f, "negative vehicle count on arc {arc}, mode {mode}")
            }
            Violation::LayoutFractional { arc, mode, value } => {
                write!(f, "fractional vehicle count {value} on arc {arc}, mode {mode}")
            }
            Violation::FlowNegative { commodity, arc } => {
                write!(f, "negative flow for commodity {commodity} on arc {arc}")
            }
            Violation::Conservation { commodity, node, residual } => {
                write!(f, "flow conservation violated for commodity {commodity} at node {node} (residual {residual})")
            }
            Violation::FlowValue { commodity, residual } => {
                write!(f, "flow value mismatch for commodity {commodity} (residual {residual})")
            }
            Violation::SplitRange { commodity, arc, mode, value } => {
                write!(f, "split fraction {value} out of range for commodity {commodity}, arc {arc}, mode {mode}")
            }
            Violation::SplitSum { commodity, arc, sum } => {
                write!(f, "split fractions sum to {sum} for commodity {commodity} on arc {arc}")
            }
            Violation::Capacity { arc, mode, residual } => {
                write!(f, "capacity exceeded on arc {arc}, mode {mode} by {residual}")
            }
            Violation::Structure(msg) => write!(f, "structural mismatch: {msg}"),
        }
    }
}

/// Aggregated per-arc totals `(F(e), M(e))`; `M(e) = (1, 0, ..., 0)` on
/// arcs without flow.
pub fn aggregate_flow(sol: &Solution, inst: &MspInstance) -> Vec<(f64, Vec<f64>)> {
    let modes = inst.modes.len();
    let arcs = inst.graph.arcs().len();
    let mut out = Vec::with_capacity(arcs);
    for e in 0..arcs {
        let mut total = 0.0;
        let mut weighted = vec![0.0; modes];
        for (k, flow) in sol.flows.iter().enumerate() {
            let fe = flow.arc_flow[e];
            total += fe;
            for i in 0..modes {
                weighted[i] += fe * sol.split[k][e][i];
            }
        }
        if total > 0.0 {
            for w in weighted.iter_mut() {
                *w /= total;
            }
        } else {
            weighted = vec![0.0; modes];
            weighted[0] = 1.0;
        }
        out.push((total, weighted));
    }
    out
}

/// Total travel time and energy per the model's two objective functions.
pub fn evaluate(sol: &Solution, inst: &MspInstance) -> Result<ObjectivePoint, ModelError> {
    let m = inst.public_mode_count();
    if sol.layout.vehicles.len() != inst.graph.arcs().len()
        || sol.layout.vehicles.iter().any(|v| v.len() != m)
        || sol
            .split
            .iter()
            .any(|per_arc| per_arc.iter().any(|s| s.len() != m + 1))
    {
        return Err(ModelError::DimensionMismatch);
    }
    let agg = aggregate_flow(sol, inst);
    let mut travel_time = 0.0;
    let mut energy = 0.0;
    for (e, (fe, me)) in agg.iter().enumerate() {
        let w = inst.graph.arc(e).weight;
        for (i, mode) in inst.modes.iter().enumerate() {
            travel_time += w * mode.travel_time * fe * me[i];
        }
        energy += w * inst.modes[0].energy * fe * me[0];
        for i in 1..=m {
            energy += w * inst.modes[i].energy * sol.layout.vehicles[e][i - 1];
        }
    }
    Ok(ObjectivePoint::new(travel_time, energy))
}

/// All constraint families; an empty list means feasible.
pub fn check_feasibility(sol: &Solution, inst: &MspInstance) -> Vec<Violation> {
    let mut v = Vec::new();
    let m = inst.public_mode_count();
    let arcs = inst.graph.arcs().len();
    let commodities = inst.commodities();

    if sol.flows.len() != commodities.len()
        || sol.split.len() != sol.flows.len()
        || sol.layout.vehicles.len() != arcs
    {
        v.push(Violation::Structure(
            "flow/split/layout sizes do not match the instance".into(),
        ));
        return v;
    }
    for (k, flow) in sol.flows.iter().enumerate() {
        if flow.arc_flow.len() != arcs || sol.split[k].len() != arcs {
            v.push(Violation::Structure(format!("commodity {k} has wrong arc dimension")));
            return v;
        }
        if sol.split[k].iter().any(|s| s.len() != m + 1) {
            v.push(Violation::Structure(format!("commodity {k} has wrong mode dimension")));
            return v;
        }
    }
    if sol.layout.vehicles.iter().any(|per_arc| per_arc.len() != m) {
        v.push(Violation::Structure("layout has wrong mode dimension".into()));
        return v;
    }

    // budget
    let spent = sol.layout.installation_cost(inst);
    if spent > inst.budget + FEAS_TOL {
        v.push(Violation::Budget { spent, limit: inst.budget });
    }

    // layout bounds and integrality
    for (e, per_arc) in sol.layout.vehicles.iter().enumerate() {
        for (i, &count) in per_arc.iter().enumerate() {
            if count < -FEAS_TOL {
                v.push(Violation::LayoutNegative { arc: e, mode: i + 1 });
            } else if !sol.layout.relaxed && (count - count.round()).abs() > FEAS_TOL {
                v.push(Violation::LayoutFractional { arc: e, mode: i + 1, value: count });
            }
        }
    }

    // flows: non-negativity, conservation, value
    for (k, &(s, t, d)) in commodities.iter().enumerate() {
        let flow = &sol.flows[k];
        if flow.source != s || flow.target != t {
            v.push(Violation::Structure(format!(
                "commodity {k} is ({}, {}) but the instance orders it as ({s}, {t})",
                flow.source, flow.target
            )));
            continue;
        }
        let mut divergence = vec![0.0; inst.graph.node_count()];
        for (e, &fe) in flow.arc_flow.iter().enumerate() {
            if fe < -FEAS_TOL {
                v.push(Violation::FlowNegative { commodity: k, arc: e });
            }
            let arc = inst.graph.arc(e);
            divergence[arc.tail] -= fe;
            divergence[arc.head] += fe;
        }
        for (node, &res) in divergence.iter().enumerate() {
            let expected = if node == s {
                -(d as f64)
            } else if node == t {
                d as f64
            } else {
                0.0
            };
            if (res - expected).abs() > FEAS_TOL {
                if node == s || node == t {
                    v.push(Violation::FlowValue { commodity: k, residual: res - expected });
                } else {
                    v.push(Violation::Conservation { commodity: k, node, residual: res });
                }
            }
        }
    }

    // split ranges and sums
    for (k, per_arc) in sol.split.iter().enumerate() {
        for (e, fractions) in per_arc.iter().enumerate() {
            for (i, &frac) in fractions.iter().enumerate() {
                if !(-FEAS_TOL..=1.0 + FEAS_TOL).contains(&frac) {
                    v.push(Violation::SplitRange { commodity: k, arc: e, mode: i, value: frac });
                }
            }
            if sol.flows[k].arc_flow[e] > FEAS_TOL {
                let sum: f64 = fractions.iter().sum();
                if (sum - 1.0).abs() > FEAS_TOL {
                    v.push(Violation::SplitSum { commodity: k, arc: e, sum });
                }
            }
        }
    }

    // capacity coupling for public modes
    for e in 0..arcs {
        for i in 1..=m {
            let carried: f64 = sol
                .flows
                .iter()
                .enumerate()
                .map(|(k, flow)| flow.arc_flow[e] * sol.split[k][e][i])
                .sum();
            let cap = inst.modes[i].capacity as f64 * sol.layout.vehicles[e][i - 1];
            if carried > cap + FEAS_TOL {
                v.push(Violation::Capacity { arc: e, mode: i, residual: carried - cap });
            }
        }
    }

    v
}

/// Deterministic unsplit shortest-path flow per commodity w.r.t. the
/// weight function `w`; ties follow the graph tie-breaking rule.
pub fn shortest_path_flow(inst: &MspInstance) -> Result<Vec<CommodityFlow>, ModelError> {
    let arcs = inst.graph.arcs().len();
    let mut out = Vec::new();
    let mut cache: BTreeMap<NodeId, (Vec<Option<f64>>, Vec<Option<usize>>)> = BTreeMap::new();
    for (s, t, d) in inst.commodities() {
        let (dist, pred) = cache
            .entry(s)
            .or_insert_with(|| predecessor_arcs(&inst.graph, s, Metric::Weight, None, false));
        if dist[t].is_none() {
            return Err(ModelError::UnroutableCommodity(s, t));
        }
        let mut arc_flow = vec![0.0; arcs];
        let mut node = t;
        while node != s {
            let idx = pred[node].expect("reachable node has a predecessor arc");
            arc_flow[idx] += d as f64;
            node = inst.graph.arc(idx).tail;
        }
        out.push(CommodityFlow { source: s, target: t, value: d as f64, arc_flow });
    }
    Ok(out)
}

/// The baseline solution: shortest-path flows, empty layout, everyone on
/// mode 0.
pub fn all_mode_zero_solution(inst: &MspInstance) -> Result<Solution, ModelError> {
    let flows = shortest_path_flow(inst)?;
    let m = inst.public_mode_count();
    let arcs = inst.graph.arcs().len();
    let mut mode0 = vec![0.0; m + 1];
    mode0[0] = 1.0;
    let split = vec![vec![mode0; arcs]; flows.len()];
    Ok(Solution { flows, layout: Layout::zero(inst), split })
}

/// Decision-variant check against the instance's `(a, b)` bounds.
pub fn meets_bounds(point: ObjectivePoint, bounds: (f64, f64)) -> bool {
    point.travel_time <= bounds.0 + FEAS_TOL && point.energy <= bounds.1 + FEAS_TOL
}
