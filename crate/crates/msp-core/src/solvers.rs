//! Constructive algorithms and desk-scale brute-force oracles:
//! 2-approximation via shortest-path subgraphs, fixed-flow knapsack
//! constructions, relaxation segment, frontier sampling and patches.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    central_node, predecessor_arcs, routing_cost, shortest_path_subgraph, ArcSubset, Cost,
    Digraph, GraphError, Metric,
};
use crate::knapsack::{
    kps_fptas, mkps_exact, ItemTag, KnapsackError, KnapsackInstance, KnapsackItem, Multiplicity,
    Selection,
};
use crate::model::{
    check_feasibility, dominates, evaluate, shortest_path_flow, CommodityFlow, Layout, ModelError,
    MspInstance, ObjectivePoint, Solution,
};
use crate::reductions::DindpInstance;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("flow values must be integral")]
    NonIntegralFlow,
    #[error("operation requires exactly one public mode")]
    WrongModeCount,
    #[error("budget point outside [0, min(B, B-hat)]")]
    BudgetExceedsSamplingRange,
    #[error("search budget exceeded")]
    SearchBudgetExceeded,
    #[error("layout uses a public mode other than mode m")]
    LayoutNotSingleMode,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Knapsack(#[from] KnapsackError),
}

/// Line segment `p(lambda) = p0 + lambda * delta * (p1 - p0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub p0: ObjectivePoint,
    pub p1: ObjectivePoint,
    pub delta: f64,
}

impl Segment {
    pub fn at(&self, lambda: f64) -> ObjectivePoint {
        let s = lambda * self.delta;
        ObjectivePoint::new(
            self.p0.travel_time + s * (self.p1.travel_time - self.p0.travel_time),
            self.p0.energy + s * (self.p1.energy - self.p0.energy),
        )
    }

    /// Whether `p` lies on the segment within relative tolerance, by
    /// solving for lambda on the travel-time axis.
    pub fn contains(&self, p: ObjectivePoint, rel_tol: f64) -> bool {
        let scale = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1.0);
        let span_t = self.delta * (self.p1.travel_time - self.p0.travel_time);
        if span_t.abs() <= f64::EPSILON * self.p0.travel_time.abs().max(1.0) {
            return scale(p.travel_time, self.p0.travel_time) && {
                let lo = self.p0.energy.min(self.at(1.0).energy);
                let hi = self.p0.energy.max(self.at(1.0).energy);
                p.energy >= lo - rel_tol * hi.abs().max(1.0)
                    && p.energy <= hi + rel_tol * hi.abs().max(1.0)
            };
        }
        let lambda = (p.travel_time - self.p0.travel_time) / span_t;
        if !(-rel_tol..=1.0 + rel_tol).contains(&lambda) {
            return false;
        }
        let q = self.at(lambda.clamp(0.0, 1.0));
        scale(p.travel_time, q.travel_time) && scale(p.energy, q.energy)
    }
}

/// Mutually non-dominated (Solution, point) pairs.
#[derive(Debug, Clone, Default)]
pub struct ParetoSet {
    entries: Vec<(Solution, ObjectivePoint)>,
}

impl ParetoSet {
    pub fn new() -> Self {
        ParetoSet { entries: Vec::new() }
    }

    /// Insert unless dominated (or duplicated); evicts entries the new
    /// point dominates. Returns whether the point was kept.
    pub fn insert(&mut self, sol: Solution, point: ObjectivePoint) -> bool {
        for (_, q) in &self.entries {
            if dominates(*q, point) || *q == point {
                return false;
            }
        }
        self.entries.retain(|(_, q)| !dominates(point, *q));
        self.entries.push((sol, point));
        true
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Solution, ObjectivePoint)> {
        self.entries.iter()
    }

    /// Frontier points sorted by travel time ascending.
    pub fn points(&self) -> Vec<ObjectivePoint> {
        let mut pts: Vec<ObjectivePoint> = self.entries.iter().map(|(_, p)| *p).collect();
        pts.sort_by(|a, b| {
            a.travel_time
                .total_cmp(&b.travel_time)
                .then(a.energy.total_cmp(&b.energy))
        });
        pts
    }

    /// Does any entry meet `T <= bounds.0` and `E <= bounds.1`?
    pub fn meets_bounds(&self, bounds: (f64, f64)) -> bool {
        self.entries
            .iter()
            .any(|(_, p)| crate::model::meets_bounds(*p, bounds))
    }
}

/// Search caps for the brute-force oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_arcs: usize,
    pub node_limit: u64,
}

impl OracleLimits {
    /// Default caps for the MSP oracle.
    pub fn msp() -> Self {
        OracleLimits { max_arcs: 8, node_limit: 10_000_000 }
    }

    /// Default caps for the DiNDP oracle.
    pub fn dindp() -> Self {
        OracleLimits { max_arcs: 20, node_limit: 10_000_000 }
    }
}

/// Shortest-path subgraph around the central node: a 2-approximation
/// for routing cost under unit weights and budget 2(|V|-1).
pub fn dindp_two_approx(g: &Digraph) -> Result<ArcSubset, SolverError> {
    let v = central_node(g)?;
    Ok(shortest_path_subgraph(g, v)?)
}

/// Extreme-point 2-approximation for MSP instances meeting the
/// the extreme-solution premises: install one mode-1 vehicle on every arc of the
/// central shortest-path subgraph and route everyone on mode 1.
pub fn msp_two_approx_extreme(inst: &MspInstance) -> Result<Solution, SolverError> {
    let g = &inst.graph;
    let n = g.node_count();
    let mut fails = Vec::new();
    if inst.public_mode_count() != 1 {
        fails.push("m != 1".to_string());
    } else {
        let m1 = &inst.modes[1];
        if (m1.capacity as f64) < ((n - 1) * (n - 1)) as f64 {
            fails.push(format!("k_1 = {} < (|V|-1)^2", m1.capacity));
        }
        if m1.cost > 1.0 {
            fails.push(format!("c_1 = {} > 1", m1.cost));
        }
        if inst.modes[0].energy <= m1.energy {
            fails.push("eta_0 <= eta_1".to_string());
        }
    }
    if inst.budget < g.arcs().len() as f64 {
        fails.push(format!("B = {} < |E|", inst.budget));
    }
    if g.arcs().iter().any(|a| a.weight != 1.0) {
        fails.push("w(e) != 1 somewhere".to_string());
    }
    for s in 0..n {
        for t in 0..n {
            if s != t && inst.demand.get(&(s, t)).copied().unwrap_or(0) != 1 {
                fails.push(format!("D({s}, {t}) != 1"));
            }
        }
    }
    if !fails.is_empty() {
        return Err(SolverError::PremiseViolated(fails.join("; ")));
    }

    let subgraph = dindp_two_approx(g)?;
    let arcs = g.arcs().len();
    let mut layout = Layout::zero(inst);
    for e in subgraph.indices() {
        layout.vehicles[e][0] = 1.0;
    }
    let mut flows = Vec::new();
    let mut split = Vec::new();
    for (s, t, d) in inst.commodities() {
        let (dist, pred) = predecessor_arcs(g, s, Metric::Weight, Some(&subgraph), false);
        if dist[t].is_none() {
            return Err(SolverError::Model(ModelError::UnroutableCommodity(s, t)));
        }
        let mut arc_flow = vec![0.0; arcs];
        let mut node = t;
        while node != s {
            let idx = pred[node].expect("reachable node has a predecessor arc");
            arc_flow[idx] += d as f64;
            node = g.arc(idx).tail;
        }
        let per_arc: Vec<Vec<f64>> = (0..arcs)
            .map(|e| if arc_flow[e] > 0.0 { vec![0.0, 1.0] } else { vec![1.0, 0.0] })
            .collect();
        flows.push(CommodityFlow { source: s, target: t, value: d as f64, arc_flow });
        split.push(per_arc);
    }
    let sol = Solution { flows, layout, split };
    debug_assert!(check_feasibility(&sol, inst).is_empty());
    Ok(sol)
}

fn integral_flow(flow: &[f64]) -> Result<(), SolverError> {
    if flow.iter().any(|f| !f.is_finite() || *f < 0.0 || f.fract() != 0.0) {
        return Err(SolverError::NonIntegralFlow);
    }
    Ok(())
}

/// KPS item construction for a single public mode: full-vehicle
/// items per arc plus at most one rest item covering the leftover
/// passengers.
pub fn fixed_flow_items_single_mode(
    inst: &MspInstance,
    flow: &[f64],
) -> Result<KnapsackInstance, SolverError> {
    if inst.public_mode_count() != 1 {
        return Err(SolverError::WrongModeCount);
    }
    integral_flow(flow)?;
    let m1 = &inst.modes[1];
    let (eta0, eta1) = (inst.modes[0].energy, m1.energy);
    let k1 = m1.capacity as f64;
    if eta1 > eta0 * k1 {
        return Err(SolverError::PremiseViolated(
            "eta_1 > eta_0 k_1: mode 1 never reduces energy".into(),
        ));
    }
    let mut items = Vec::new();
    for (e, arc) in inst.graph.arcs().iter().enumerate() {
        let f = flow[e];
        if f == 0.0 {
            continue;
        }
        let full = (f / k1).floor();
        let rest = f - full * k1;
        if full >= 1.0 {
            items.push(KnapsackItem::new(
                arc.weight * (k1 * eta0 - eta1),
                vec![arc.weight * m1.cost],
                Multiplicity::Bounded(full as u64),
                ItemTag::Arc { arc: e, mode: 1 },
            ));
        }
        let rest_value = arc.weight * (rest * eta0 - eta1);
        if rest > 0.0 && rest_value >= 0.0 {
            items.push(KnapsackItem::new(
                rest_value,
                vec![arc.weight * m1.cost],
                Multiplicity::Bounded(1),
                ItemTag::Rest { arc: e, mode: 1 },
            ));
        }
    }
    Ok(KnapsackInstance::new(items, vec![inst.budget], None)?)
}

/// MKPS item construction for several public modes: weight dimension 0 is cost (bound
/// B), dimensions `1..=|E|` are per-arc passenger loads (bound F(e)).
pub fn fixed_flow_items_multi_mode(
    inst: &MspInstance,
    flow: &[f64],
) -> Result<KnapsackInstance, SolverError> {
    integral_flow(flow)?;
    let arcs = inst.graph.arcs().len();
    let eta0 = inst.modes[0].energy;
    let mut bounds = vec![inst.budget];
    bounds.extend_from_slice(flow);
    let mut items = Vec::new();
    for (i, mode) in inst.modes.iter().enumerate().skip(1) {
        let k = mode.capacity as f64;
        for (e, arc) in inst.graph.arcs().iter().enumerate() {
            let f = flow[e];
            if f == 0.0 {
                continue;
            }
            let weight_row = |load: f64| {
                let mut w = vec![0.0; arcs + 1];
                w[0] = arc.weight * mode.cost;
                w[e + 1] = load;
                w
            };
            let full = (f / k).floor();
            let full_value = arc.weight * (k * eta0 - mode.energy);
            if full >= 1.0 && full_value >= 0.0 {
                items.push(KnapsackItem::new(
                    full_value,
                    weight_row(k),
                    Multiplicity::Bounded(full as u64),
                    ItemTag::Arc { arc: e, mode: i },
                ));
            }
            // partial loads f' with non-negative energy reduction
            let lo = if eta0 > 0.0 {
                (mode.energy / eta0).ceil().max(1.0)
            } else if mode.energy == 0.0 {
                1.0
            } else {
                continue;
            };
            let hi = k.min(f);
            let mut load = lo;
            while load <= hi {
                items.push(KnapsackItem::new(
                    arc.weight * (load * eta0 - mode.energy),
                    weight_row(load),
                    Multiplicity::Bounded(1),
                    ItemTag::Partial { arc: e, mode: i, load: load as u64 },
                ));
                load += 1.0;
            }
        }
    }
    Ok(KnapsackInstance::new(items, bounds, None)?)
}

/// Rebuild a full solution triplet from a knapsack selection over
/// fixed-flow items.
fn solution_from_selection(
    inst: &MspInstance,
    flows: &[CommodityFlow],
    agg: &[f64],
    items: &KnapsackInstance,
    sel: &Selection,
) -> Solution {
    let m = inst.public_mode_count();
    let arcs = inst.graph.arcs().len();
    let mut layout = Layout::zero(inst);
    let mut passengers = vec![vec![0.0; m]; arcs];
    for (item, &count) in items.items.iter().zip(sel.counts.iter()) {
        if count == 0 {
            continue;
        }
        let c = count as f64;
        match item.tag {
            ItemTag::Arc { arc, mode } => {
                layout.vehicles[arc][mode - 1] += c;
                passengers[arc][mode - 1] += c * inst.modes[mode].capacity as f64;
            }
            ItemTag::Rest { arc, mode } => {
                let k = inst.modes[mode].capacity as f64;
                let rest = agg[arc] - (agg[arc] / k).floor() * k;
                layout.vehicles[arc][mode - 1] += c;
                passengers[arc][mode - 1] += c * rest;
            }
            ItemTag::Partial { arc, mode, load } => {
                layout.vehicles[arc][mode - 1] += c;
                passengers[arc][mode - 1] += c * load as f64;
            }
            ItemTag::None | ItemTag::Index(_) => {}
        }
    }
    let mode_split: Vec<Vec<f64>> = (0..arcs)
        .map(|e| {
            let mut s = vec![0.0; m + 1];
            if agg[e] > 0.0 {
                for i in 0..m {
                    s[i + 1] = passengers[e][i] / agg[e];
                }
            }
            s[0] = 1.0 - s[1..].iter().sum::<f64>();
            s
        })
        .collect();
    let split = flows
        .iter()
        .map(|flow| {
            (0..arcs)
                .map(|e| {
                    if flow.arc_flow[e] > 0.0 {
                        mode_split[e].clone()
                    } else {
                        let mut s = vec![0.0; m + 1];
                        s[0] = 1.0;
                        s
                    }
                })
                .collect()
        })
        .collect();
    Solution { flows: flows.to_vec(), layout, split }
}

fn aggregate_of(flows: &[CommodityFlow], arcs: usize) -> Vec<f64> {
    let mut agg = vec![0.0; arcs];
    for flow in flows {
        for (e, &f) in flow.arc_flow.iter().enumerate() {
            agg[e] += f;
        }
    }
    agg
}

fn all_mode_zero_with(inst: &MspInstance, flows: &[CommodityFlow]) -> Solution {
    let m = inst.public_mode_count();
    let arcs = inst.graph.arcs().len();
    let mut unit = vec![0.0; m + 1];
    unit[0] = 1.0;
    Solution {
        flows: flows.to_vec(),
        layout: Layout::zero(inst),
        split: vec![vec![unit; arcs]; flows.len()],
    }
}

/// Fixed-flow energy minimization: FPTAS via KPS for one
/// public mode, exact MKPS otherwise. Guarantees
/// `H(X) <= (1 + epsilon) * H*` for the given flow.
pub fn fixed_flow_optimize(
    inst: &MspInstance,
    flows: &[CommodityFlow],
    epsilon: f64,
) -> Result<Solution, SolverError> {
    if !(epsilon > 0.0) {
        return Err(SolverError::Knapsack(KnapsackError::InvalidEpsilon));
    }
    let arcs = inst.graph.arcs().len();
    let agg = aggregate_of(flows, arcs);
    integral_flow(&agg)?;
    let sum_wf: f64 = agg
        .iter()
        .enumerate()
        .map(|(e, f)| inst.graph.arc(e).weight * f)
        .sum();
    if sum_wf == 0.0 || inst.public_mode_count() == 0 {
        return Ok(all_mode_zero_with(inst, flows));
    }
    let eta0 = inst.modes[0].energy;
    let h0 = eta0 * sum_wf;
    // per-passenger-distance energy floor; min over mode 0 and full
    // public vehicles
    let floor_rate = inst
        .modes
        .iter()
        .skip(1)
        .map(|mo| mo.energy / mo.capacity as f64)
        .fold(eta0, f64::min);
    let h_check = floor_rate * sum_wf;
    if h0 <= h_check {
        // nothing can beat the all-mode-0 consumption
        return Ok(all_mode_zero_with(inst, flows));
    }
    let (items, sel) = if inst.public_mode_count() == 1 {
        let items = fixed_flow_items_single_mode(inst, &agg)?;
        let delta = epsilon * h_check / (h0 - h_check);
        let sel = if delta > 0.0 {
            kps_fptas(&items, delta.min(0.5))?
        } else {
            // h_check = 0: the scaling argument degenerates, solve exactly
            mkps_exact(&items)?
        };
        (items, sel)
    } else {
        let items = fixed_flow_items_multi_mode(inst, &agg)?;
        let sel = mkps_exact(&items)?;
        (items, sel)
    };
    Ok(solution_from_selection(inst, flows, &agg, &items, &sel))
}

/// Premise check for the relaxation segment; empty result means the
/// premises hold.
pub fn segment_premise_failures(inst: &MspInstance) -> Vec<String> {
    let mut fails = Vec::new();
    let m = inst.public_mode_count();
    if m == 0 {
        fails.push("no public mode".to_string());
        return fails;
    }
    let modes = &inst.modes;
    let tau0 = modes[0].travel_time;
    for (i, mo) in modes.iter().enumerate().skip(1) {
        if mo.travel_time < tau0 {
            fails.push(format!("tau_{i} < tau_0"));
        }
    }
    // tau_i k_i / eta_i non-decreasing, compared by cross-multiplication
    for i in 0..m {
        let (a, b) = (&modes[i], &modes[i + 1]);
        let lhs = a.travel_time * a.capacity as f64 * b.energy;
        let rhs = b.travel_time * b.capacity as f64 * a.energy;
        if lhs > rhs {
            fails.push(format!("tau_{i} k_{i} / eta_{i} > next ratio"));
        }
    }
    // among modes tying mode m's ratio, mode m has minimal c/k
    let last = &modes[m];
    for (i, mo) in modes.iter().enumerate().skip(1) {
        let tie = mo.travel_time * mo.capacity as f64 * last.energy
            == last.travel_time * last.capacity as f64 * mo.energy;
        if tie && last.cost * mo.capacity as f64 > mo.cost * last.capacity as f64 {
            fails.push(format!("c_m/k_m > c_{i}/k_{i} despite ratio tie"));
        }
    }
    // slope dominance: no directional vector v_i descends steeper than
    // v_m. The ratio chain above does not imply this, so it is checked
    // explicitly.
    let (km, etam, taum) = (last.capacity as f64, last.energy, last.travel_time);
    let eta0 = modes[0].energy;
    for (i, mo) in modes.iter().enumerate().skip(1) {
        let ki = mo.capacity as f64;
        let lhs = (eta0 * ki - mo.energy) * km * (taum - tau0);
        let rhs = (eta0 * km - etam) * ki * (mo.travel_time - tau0);
        if lhs > rhs {
            fails.push(format!("v_{i} descends steeper than v_m"));
        }
    }
    if shortest_path_flow(inst).is_err() {
        fails.push("some commodity is unroutable".to_string());
    }
    fails
}

fn sum_weighted_flow(inst: &MspInstance, agg: &[f64]) -> f64 {
    agg.iter()
        .enumerate()
        .map(|(e, f)| inst.graph.arc(e).weight * f)
        .sum()
}

/// The segment `Psi` of the relaxed Pareto frontier between
/// the all-mode-0 point and the full-mode-m point.
pub fn relaxation_segment(inst: &MspInstance) -> Result<Segment, SolverError> {
    let fails = segment_premise_failures(inst);
    if !fails.is_empty() {
        return Err(SolverError::PremiseViolated(fails.join("; ")));
    }
    let flows = shortest_path_flow(inst)?;
    let agg = aggregate_of(&flows, inst.graph.arcs().len());
    let sum_wf = sum_weighted_flow(inst, &agg);
    let m0 = &inst.modes[0];
    let mm = &inst.modes[inst.public_mode_count()];
    let p0 = ObjectivePoint::new(sum_wf * m0.travel_time, sum_wf * m0.energy);
    let p1 = ObjectivePoint::new(
        sum_wf * mm.travel_time,
        sum_wf * mm.energy / mm.capacity as f64,
    );
    let full_cost = sum_wf * mm.cost / mm.capacity as f64;
    let delta = if full_cost > 0.0 { inst.budget.min(full_cost) / full_cost } else { 1.0 };
    Ok(Segment { p0, p1, delta })
}

/// Maximal budget `B-hat` spendable on full mode-m vehicles along the
/// shortest-path flow.
pub fn frontier_budget_cap(inst: &MspInstance) -> Result<f64, SolverError> {
    let flows = shortest_path_flow(inst)?;
    let agg = aggregate_of(&flows, inst.graph.arcs().len());
    let mm = &inst.modes[inst.public_mode_count()];
    let k = mm.capacity as f64;
    Ok(mm.cost
        * agg
            .iter()
            .enumerate()
            .map(|(e, f)| inst.graph.arc(e).weight * (f / k).floor())
            .sum::<f64>())
}

/// One frontier sample: spend at most `budget_point` on full
/// mode-m vehicles, maximizing energy reduction via the KPS FPTAS. The
/// result is feasible, uses only modes 0 and m, and every mode-m
/// vehicle is exactly full (hence Pareto-optimal under the segment
/// premises).
pub fn frontier_sample(
    inst: &MspInstance,
    budget_point: f64,
    epsilon: f64,
) -> Result<Solution, SolverError> {
    let fails = segment_premise_failures(inst);
    if !fails.is_empty() {
        return Err(SolverError::PremiseViolated(fails.join("; ")));
    }
    let cap = frontier_budget_cap(inst)?;
    if !(0.0..=cap).contains(&budget_point) || budget_point > inst.budget {
        return Err(SolverError::BudgetExceedsSamplingRange);
    }
    let flows = shortest_path_flow(inst)?;
    let arcs = inst.graph.arcs().len();
    let agg = aggregate_of(&flows, arcs);
    let m = inst.public_mode_count();
    let mm = &inst.modes[m];
    let (eta0, etam, km) = (inst.modes[0].energy, mm.energy, mm.capacity as f64);
    let mut items = Vec::new();
    for (e, arc) in inst.graph.arcs().iter().enumerate() {
        let copies = (agg[e] / km).floor();
        let value = arc.weight * (km * eta0 - etam);
        if copies >= 1.0 && value >= 0.0 {
            items.push(KnapsackItem::new(
                value,
                vec![arc.weight * mm.cost],
                Multiplicity::Bounded(copies as u64),
                ItemTag::Arc { arc: e, mode: m },
            ));
        }
    }
    let kps = KnapsackInstance::new(items, vec![budget_point], None)?;
    let sel = kps_fptas(&kps, epsilon)?;
    Ok(solution_from_selection(inst, &flows, &agg, &kps, &sel))
}

/// Patch segment for a sampled solution: from complete rejection
/// of the layout (`p0`) to full acceptance (`p1 = evaluate(sol)`).
pub fn patch_segment(inst: &MspInstance, sol: &Solution) -> Result<Segment, SolverError> {
    let m = inst.public_mode_count();
    if m == 0 {
        return Err(SolverError::LayoutNotSingleMode);
    }
    if sol
        .layout
        .vehicles
        .iter()
        .any(|per_arc| per_arc[..m - 1].iter().any(|&c| c != 0.0))
    {
        return Err(SolverError::LayoutNotSingleMode);
    }
    let agg = crate::model::aggregate_flow(sol, inst);
    let m0 = &inst.modes[0];
    let mm = &inst.modes[m];
    let mut sum_wf = 0.0;
    let mut layout_energy = 0.0;
    let mut carried = 0.0;
    for (e, (f, me)) in agg.iter().enumerate() {
        let w = inst.graph.arc(e).weight;
        sum_wf += w * f;
        layout_energy += w * mm.energy * sol.layout.vehicles[e][m - 1];
        carried += w * f * me[m];
    }
    let p0 = ObjectivePoint::new(m0.travel_time * sum_wf, m0.energy * sum_wf + layout_energy);
    let p1 = ObjectivePoint::new(
        p0.travel_time + carried * (mm.travel_time - m0.travel_time),
        p0.energy - carried * m0.energy,
    );
    Ok(Segment { p0, p1, delta: 1.0 })
}

/// Result of the DiNDP oracle: the weight-feasible subset with minimal
/// routing cost, plus the decision `w(E') <= beta` and `R <= gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct DindpOracleResult {
    pub subset: ArcSubset,
    pub cost: Cost,
    pub decision: bool,
}

fn cost_improves(candidate: Cost, best: Option<Cost>) -> bool {
    match (candidate, best) {
        (_, None) => true,
        (Cost::Finite(c), Some(Cost::Finite(b))) => c < b,
        (Cost::Finite(_), Some(Cost::Infinite)) => true,
        (Cost::Infinite, _) => false,
    }
}

/// Exhaustive DiNDP solver: branch-and-bound over include/exclude
/// decisions per arc. `R` of the still-possible arc set is a valid
/// lower bound (routing cost is monotone under arc removal), and when
/// that set is already weight-feasible it is optimal for the subtree.
pub fn dindp_brute_force(
    inst: &DindpInstance,
    limits: OracleLimits,
) -> Result<DindpOracleResult, SolverError> {
    let g = &inst.graph;
    let arcs = g.arcs().len();
    if arcs > limits.max_arcs {
        return Err(SolverError::SearchBudgetExceeded);
    }

    struct Search<'a> {
        inst: &'a DindpInstance,
        best: Option<(ArcSubset, Cost)>,
        nodes: u64,
        limit: u64,
    }

    impl Search<'_> {
        fn dfs(
            &mut self,
            idx: usize,
            included: &mut ArcSubset,
            included_weight: f64,
            potential: &mut ArcSubset,
        ) -> Result<(), SolverError> {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(SolverError::SearchBudgetExceeded);
            }
            let g = &self.inst.graph;
            let r_pot = routing_cost(g, Some(potential), self.inst.demand.as_ref());
            match r_pot {
                Cost::Infinite => return Ok(()), // whole subtree unreachable
                Cost::Finite(_) => {
                    if !cost_improves(r_pot, self.best.as_ref().map(|(_, c)| *c)) {
                        return Ok(());
                    }
                }
            }
            if potential.weight(g) <= self.inst.beta {
                // all-include completion is feasible and optimal here
                self.best = Some((potential.clone(), r_pot));
                return Ok(());
            }
            if idx == g.arcs().len() {
                if included_weight <= self.inst.beta {
                    let r = routing_cost(g, Some(included), self.inst.demand.as_ref());
                    if cost_improves(r, self.best.as_ref().map(|(_, c)| *c)) {
                        self.best = Some((included.clone(), r));
                    }
                }
                return Ok(());
            }
            let w = g.arc(idx).weight;
            if included_weight + w <= self.inst.beta {
                included.insert(idx);
                self.dfs(idx + 1, included, included_weight + w, potential)?;
                included.remove(idx);
            }
            potential.remove(idx);
            self.dfs(idx + 1, included, included_weight, potential)?;
            potential.insert(idx);
            Ok(())
        }
    }

    let mut search = Search { inst, best: None, nodes: 0, limit: limits.node_limit };
    let mut included = ArcSubset::empty(g);
    let mut potential = ArcSubset::full(g);
    search.dfs(0, &mut included, 0.0, &mut potential)?;
    let (subset, cost) = match search.best {
        Some(b) => b,
        None => (ArcSubset::empty(g), Cost::Infinite),
    };
    let decision = match cost {
        Cost::Finite(c) => c <= inst.gamma,
        Cost::Infinite => false,
    };
    Ok(DindpOracleResult { subset, cost, decision })
}

/// All simple directed paths from `s` to `t`, as arc-index lists, in a
/// deterministic order.
fn simple_paths(g: &Digraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut visited = vec![false; g.node_count()];
    let mut stack = Vec::new();
    fn dfs(
        g: &Digraph,
        node: usize,
        t: usize,
        visited: &mut Vec<bool>,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if node == t {
            out.push(stack.clone());
            return;
        }
        visited[node] = true;
        for (idx, arc) in g.arcs().iter().enumerate() {
            if arc.tail == node && !visited[arc.head] {
                stack.push(idx);
                dfs(g, arc.head, t, visited, stack, out);
                stack.pop();
            }
        }
        visited[node] = false;
    }
    dfs(g, s, t, &mut visited, &mut stack, &mut out);
    out
}

/// Exhaustive Pareto frontier over a discretized MSP solution space:
/// unsplit simple-path routings, integral vehicle counts up to
/// `ceil(F/k)`, and integral per-arc passenger-to-mode assignments.
pub fn msp_brute_force(
    inst: &MspInstance,
    limits: OracleLimits,
) -> Result<ParetoSet, SolverError> {
    let g = &inst.graph;
    let arcs = g.arcs().len();
    if arcs > limits.max_arcs {
        return Err(SolverError::SearchBudgetExceeded);
    }
    let commodities = inst.commodities();
    let m = inst.public_mode_count();
    let mut frontier = ParetoSet::new();
    if commodities.is_empty() {
        let sol = all_mode_zero_with(inst, &[]);
        frontier.insert(sol, ObjectivePoint::new(0.0, 0.0));
        return Ok(frontier);
    }
    let mut paths_per_commodity = Vec::new();
    for &(s, t, _) in &commodities {
        let paths = simple_paths(g, s, t);
        if paths.is_empty() {
            return Ok(frontier); // unroutable: no feasible solution at all
        }
        paths_per_commodity.push(paths);
    }

    let mut nodes: u64 = 0;
    let mut choice = vec![0usize; commodities.len()];
    loop {
        // per-arc flow for this routing
        let mut agg = vec![0.0; arcs];
        for (k, &(.., d)) in commodities.iter().enumerate() {
            for &e in &paths_per_commodity[k][choice[k]] {
                agg[e] += d as f64;
            }
        }
        explore_layouts(inst, &commodities, &paths_per_commodity, &choice, &agg, m,
                        &mut frontier, &mut nodes, limits.node_limit)?;

        // odometer over path choices
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(frontier);
            }
            choice[pos] += 1;
            if choice[pos] < paths_per_commodity[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// One per-arc configuration: vehicles, integral passenger loads, and
/// the resulting cost and objective contributions.
struct ArcOption {
    vehicles: Vec<f64>,
    loads: Vec<f64>,
    cost: f64,
    t: f64,
    h: f64,
}

fn arc_options(inst: &MspInstance, e: usize, f: f64, m: usize) -> Vec<ArcOption> {
    let w = inst.graph.arc(e).weight;
    let mut out = Vec::new();
    let mut vehicles = vec![0.0; m];
    let mut loads = vec![0.0; m];
    fn rec(
        inst: &MspInstance,
        w: f64,
        f: f64,
        i: usize,
        m: usize,
        assigned: f64,
        spent: f64,
        vehicles: &mut Vec<f64>,
        loads: &mut Vec<f64>,
        out: &mut Vec<ArcOption>,
    ) {
        if i > m {
            let mode0 = f - assigned;
            let mut t = w * inst.modes[0].travel_time * mode0;
            let mut h = w * inst.modes[0].energy * mode0;
            for j in 1..=m {
                t += w * inst.modes[j].travel_time * loads[j - 1];
                h += w * inst.modes[j].energy * vehicles[j - 1];
            }
            out.push(ArcOption {
                vehicles: vehicles.clone(),
                loads: loads.clone(),
                cost: spent,
                t,
                h,
            });
            return;
        }
        let k = inst.modes[i].capacity as f64;
        let max_vehicles = (f / k).ceil() as u64;
        for v in 0..=max_vehicles {
            let added = w * inst.modes[i].cost * v as f64;
            // a single arc option already over budget can never be used
            if spent + added > inst.budget + crate::model::FEAS_TOL {
                break;
            }
            vehicles[i - 1] = v as f64;
            let max_load = (f - assigned).min(v as f64 * k);
            let mut load = 0.0;
            while load <= max_load {
                loads[i - 1] = load;
                rec(inst, w, f, i + 1, m, assigned + load, spent + added, vehicles, loads, out);
                load += 1.0;
            }
        }
        vehicles[i - 1] = 0.0;
        loads[i - 1] = 0.0;
    }
    rec(inst, w, f, 1, m, 0.0, 0.0, &mut vehicles, &mut loads, &mut out);
    // keep only (cost, t, h)-efficient options
    let mut keep: Vec<ArcOption> = Vec::new();
    for opt in out {
        if keep.iter().any(|q| {
            q.cost <= opt.cost
                && q.t <= opt.t
                && q.h <= opt.h
                && (q.cost < opt.cost || q.t < opt.t || q.h < opt.h)
        }) {
            continue;
        }
        keep.retain(|q| {
            !(opt.cost <= q.cost
                && opt.t <= q.t
                && opt.h <= q.h
                && (opt.cost < q.cost || opt.t < q.t || opt.h < q.h))
        });
        keep.push(opt);
    }
    keep
}

#[allow(clippy::too_many_arguments)]
fn explore_layouts(
    inst: &MspInstance,
    commodities: &[(usize, usize, u64)],
    paths: &[Vec<Vec<usize>>],
    choice: &[usize],
    agg: &[f64],
    m: usize,
    frontier: &mut ParetoSet,
    nodes: &mut u64,
    node_limit: u64,
) -> Result<(), SolverError> {
    let arcs = inst.graph.arcs().len();
    let used: Vec<usize> = (0..arcs).filter(|&e| agg[e] > 0.0).collect();
    let options: Vec<Vec<ArcOption>> =
        used.iter().map(|&e| arc_options(inst, e, agg[e], m)).collect();

    // partial states: (cost, t, h, option index per processed arc)
    let mut states: Vec<(f64, f64, f64, Vec<usize>)> = vec![(0.0, 0.0, 0.0, Vec::new())];
    for opts in &options {
        let mut next: Vec<(f64, f64, f64, Vec<usize>)> = Vec::new();
        for state in &states {
            for (oi, opt) in opts.iter().enumerate() {
                *nodes += 1;
                if *nodes > node_limit {
                    return Err(SolverError::SearchBudgetExceeded);
                }
                let cost = state.0 + opt.cost;
                if cost > inst.budget + crate::model::FEAS_TOL {
                    continue;
                }
                let (t, h) = (state.1 + opt.t, state.2 + opt.h);
                if next.iter().any(|q| {
                    q.0 <= cost && q.1 <= t && q.2 <= h && (q.0 < cost || q.1 < t || q.2 < h)
                }) {
                    continue;
                }
                next.retain(|q| !(cost <= q.0 && t <= q.1 && h <= q.2
                    && (cost < q.0 || t < q.1 || h < q.2)));
                let mut sel = state.3.clone();
                sel.push(oi);
                next.push((cost, t, h, sel));
            }
        }
        states = next;
    }

    for (_, t, h, sel) in states {
        let point = ObjectivePoint::new(t, h);
        // reconstruct solution only if the point can enter the frontier
        let mut layout = Layout::zero(inst);
        let mut mode_split: Vec<Vec<f64>> = vec![
            {
                let mut s = vec![0.0; m + 1];
                s[0] = 1.0;
                s
            };
            arcs
        ];
        for (pos, &e) in used.iter().enumerate() {
            let opt = &options[pos][sel[pos]];
            layout.vehicles[e] = opt.vehicles.clone();
            let mut s = vec![0.0; m + 1];
            for i in 0..m {
                s[i + 1] = opt.loads[i] / agg[e];
            }
            s[0] = 1.0 - s[1..].iter().sum::<f64>();
            mode_split[e] = s;
        }
        let mut flows = Vec::new();
        let mut split = Vec::new();
        for (k, &(s, t_node, d)) in commodities.iter().enumerate() {
            let mut arc_flow = vec![0.0; arcs];
            for &e in &paths[k][choice[k]] {
                arc_flow[e] += d as f64;
            }
            let per_arc: Vec<Vec<f64>> = (0..arcs)
                .map(|e| {
                    if arc_flow[e] > 0.0 {
                        mode_split[e].clone()
                    } else {
                        let mut s0 = vec![0.0; m + 1];
                        s0[0] = 1.0;
                        s0
                    }
                })
                .collect();
            flows.push(CommodityFlow { source: s, target: t_node, value: d as f64, arc_flow });
            split.push(per_arc);
        }
        let sol = Solution { flows, layout, split };
        debug_assert!(check_feasibility(&sol, inst).is_empty());
        debug_assert!({
            let p = evaluate(&sol, inst).unwrap();
            (p.travel_time - point.travel_time).abs() <= 1e-9 * point.travel_time.abs().max(1.0)
                && (p.energy - point.energy).abs() <= 1e-9 * point.energy.abs().max(1.0)
        });
        frontier.insert(sol, point);
    }
    Ok(())
}
