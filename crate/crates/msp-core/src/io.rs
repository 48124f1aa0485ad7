//! Instance/solution serialization: JSON instance files (tagged by
//! `kind`), JSON solution files, and the CSV frontier table. Every
//! writer's output is re-parseable by the matching reader.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DemandMap, Digraph, GraphArc};
use crate::knapsack::{ItemTag, KnapsackInstance, KnapsackItem, Multiplicity};
use crate::model::{
    check_feasibility, evaluate, Demand, Mode, MspInstance, ObjectivePoint, Solution,
};
use crate::reductions::{DindpInstance, DistpInstance, X3cInstance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Schema(e.to_string())
    }
}

/// A parsed instance file of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Msp(MspInstance),
    Dindp(DindpInstance),
    Distp(DistpInstance),
    X3c(X3cInstance),
    Kps(KnapsackInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Msp(_) => "msp",
            Instance::Dindp(_) => "dindp",
            Instance::Distp(_) => "distp",
            Instance::X3c(_) => "x3c",
            Instance::Kps(_) => "kps",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawInstance {
    Msp {
        nodes: usize,
        /// [tail, head, w, d]
        arcs: Vec<(usize, usize, f64, f64)>,
        /// [tau, eta, cost, capacity]
        modes: Vec<(f64, f64, f64, u64)>,
        /// [source, target, units]
        demand: Vec<(usize, usize, u64)>,
        budget: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
    Dindp {
        nodes: usize,
        arcs: Vec<(usize, usize, f64, f64)>,
        beta: f64,
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        demand: Option<Vec<(usize, usize, f64)>>,
    },
    Distp {
        nodes: usize,
        arcs: Vec<(usize, usize, f64, f64)>,
        root: usize,
        terminals: Vec<usize>,
        budget: f64,
    },
    X3c {
        n: usize,
        sets: Vec<[usize; 3]>,
    },
    Kps {
        /// [value, weights, count]; count null = unbounded
        items: Vec<(f64, Vec<f64>, Option<u64>)>,
        bounds: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<f64>,
    },
}

fn build_graph(nodes: usize, arcs: &[(usize, usize, f64, f64)]) -> Result<Digraph, IoError> {
    for (i, &(tail, head, w, d)) in arcs.iter().enumerate() {
        if tail >= nodes || head >= nodes {
            return Err(IoError::Schema(format!("arc {i} endpoint out of range")));
        }
        if !(w >= 0.0) || !(d >= 0.0) {
            return Err(IoError::Schema(format!("arc {i} has a negative weight or length")));
        }
    }
    let arcs = arcs
        .iter()
        .map(|&(t, h, w, d)| GraphArc::new(t, h, w, d))
        .collect();
    Digraph::new(nodes, arcs).map_err(|e| IoError::Schema(e.to_string()))
}

fn flat_arcs(g: &Digraph) -> Vec<(usize, usize, f64, f64)> {
    g.arcs()
        .iter()
        .map(|a| (a.tail, a.head, a.weight, a.length))
        .collect()
}

impl TryFrom<RawInstance> for Instance {
    type Error = IoError;

    fn try_from(raw: RawInstance) -> Result<Self, IoError> {
        match raw {
            RawInstance::Msp { nodes, arcs, modes, demand, budget, a, b } => {
                let graph = build_graph(nodes, &arcs)?;
                let modes = modes
                    .into_iter()
                    .map(|(tau, eta, cost, cap)| Mode::new(tau, eta, cost, cap))
                    .collect();
                let mut dm = Demand::new();
                for &(s, t, units) in &demand {
                    if s >= nodes || t >= nodes {
                        return Err(IoError::Schema(format!("demand pair ({s},{t}) out of range")));
                    }
                    dm.insert((s, t), units);
                }
                // a missing bound means "unbounded" on that axis
                let bounds = match (a, b) {
                    (None, None) => None,
                    (a, b) => Some((a.unwrap_or(f64::INFINITY), b.unwrap_or(f64::INFINITY))),
                };
                let inst = MspInstance::new(graph, modes, dm, budget, bounds)
                    .map_err(|e| IoError::Schema(e.to_string()))?;
                Ok(Instance::Msp(inst))
            }
            RawInstance::Dindp { nodes, arcs, beta, gamma, demand } => {
                let graph = build_graph(nodes, &arcs)?;
                let demand = match demand {
                    None => None,
                    Some(list) => {
                        let mut dm = DemandMap::new();
                        for &(s, t, units) in &list {
                            if s >= nodes || t >= nodes {
                                return Err(IoError::Schema(format!(
                                    "demand pair ({s},{t}) out of range"
                                )));
                            }
                            dm.insert((s, t), units);
                        }
                        Some(dm)
                    }
                };
                Ok(Instance::Dindp(DindpInstance { graph, beta, gamma, demand }))
            }
            RawInstance::Distp { nodes, arcs, root, terminals, budget } => {
                let graph = build_graph(nodes, &arcs)?;
                if root >= nodes || terminals.iter().any(|&t| t >= nodes) {
                    return Err(IoError::Schema("root or terminal out of range".into()));
                }
                Ok(Instance::Distp(DistpInstance { graph, root, terminals, budget }))
            }
            RawInstance::X3c { n, sets } => {
                let x = X3cInstance::new(n, sets).map_err(|e| IoError::Schema(e.to_string()))?;
                Ok(Instance::X3c(x))
            }
            RawInstance::Kps { items, bounds, target } => {
                let items = items
                    .into_iter()
                    .enumerate()
                    .map(|(i, (value, weights, count))| {
                        let mult = match count {
                            Some(c) => Multiplicity::Bounded(c),
                            None => Multiplicity::Unbounded,
                        };
                        KnapsackItem::new(value, weights, mult, ItemTag::Index(i))
                    })
                    .collect();
                let inst = KnapsackInstance::new(items, bounds, target)
                    .map_err(|e| IoError::Schema(e.to_string()))?;
                Ok(Instance::Kps(inst))
            }
        }
    }
}

impl From<&Instance> for RawInstance {
    fn from(inst: &Instance) -> Self {
        match inst {
            Instance::Msp(i) => RawInstance::Msp {
                nodes: i.graph.node_count(),
                arcs: flat_arcs(&i.graph),
                modes: i
                    .modes
                    .iter()
                    .map(|m| (m.travel_time, m.energy, m.cost, m.capacity))
                    .collect(),
                demand: i.demand.iter().map(|(&(s, t), &u)| (s, t, u)).collect(),
                budget: i.budget,
                a: i.bounds.map(|(a, _)| a).filter(|a| a.is_finite()),
                b: i.bounds.map(|(_, b)| b).filter(|b| b.is_finite()),
            },
            Instance::Dindp(i) => RawInstance::Dindp {
                nodes: i.graph.node_count(),
                arcs: flat_arcs(&i.graph),
                beta: i.beta,
                gamma: i.gamma,
                demand: i
                    .demand
                    .as_ref()
                    .map(|dm| dm.iter().map(|(&(s, t), &u)| (s, t, u)).collect()),
            },
            Instance::Distp(i) => RawInstance::Distp {
                nodes: i.graph.node_count(),
                arcs: flat_arcs(&i.graph),
                root: i.root,
                terminals: i.terminals.clone(),
                budget: i.budget,
            },
            Instance::X3c(x) => RawInstance::X3c { n: x.n, sets: x.sets.clone() },
            Instance::Kps(k) => RawInstance::Kps {
                items: k
                    .items
                    .iter()
                    .map(|it| {
                        let count = match it.multiplicity {
                            Multiplicity::Bounded(c) => Some(c),
                            Multiplicity::Unbounded => None,
                        };
                        (it.value, it.weights.clone(), count)
                    })
                    .collect(),
                bounds: k.bounds.clone(),
                target: k.target,
            },
        }
    }
}

pub fn parse_instance_str(text: &str) -> Result<Instance, IoError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    Instance::try_from(raw)
}

pub fn parse_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance_str(&std::fs::read_to_string(path)?)
}

pub fn instance_to_string(inst: &Instance) -> String {
    serde_json::to_string_pretty(&RawInstance::from(inst)).expect("instance serializes")
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), IoError> {
    std::fs::write(path, instance_to_string(inst) + "\n")?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct RawSolution {
    /// [source, target, value, per-arc flow]
    flows: Vec<(usize, usize, f64, Vec<f64>)>,
    /// vehicles[arc][mode - 1]
    layout: Vec<Vec<f64>>,
    relaxed: bool,
    /// split[commodity][arc][mode]
    split: Vec<Vec<Vec<f64>>>,
    /// evaluated (T, E)
    objective: (f64, f64),
}

/// Serialize a solution together with its evaluated objective pair.
pub fn solution_to_string(inst: &MspInstance, sol: &Solution) -> Result<String, IoError> {
    let p = evaluate(sol, inst).map_err(|e| IoError::Schema(e.to_string()))?;
    let raw = RawSolution {
        flows: sol
            .flows
            .iter()
            .map(|f| (f.source, f.target, f.value, f.arc_flow.clone()))
            .collect(),
        layout: sol.layout.vehicles.clone(),
        relaxed: sol.layout.relaxed,
        split: sol.split.clone(),
        objective: (p.travel_time, p.energy),
    };
    Ok(serde_json::to_string_pretty(&raw).expect("solution serializes"))
}

pub fn write_solution(path: &Path, inst: &MspInstance, sol: &Solution) -> Result<(), IoError> {
    std::fs::write(path, solution_to_string(inst, sol)? + "\n")?;
    Ok(())
}

fn close_relative(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Parse a solution without checking the stored objective pair; used
/// by `verify`, where the feasibility check is the authority.
pub fn parse_solution_unchecked(text: &str) -> Result<Solution, IoError> {
    let raw: RawSolution = serde_json::from_str(text)?;
    Ok(raw_to_solution(raw))
}

fn raw_to_solution(raw: RawSolution) -> Solution {
    Solution {
        flows: raw
            .flows
            .into_iter()
            .map(|(source, target, value, arc_flow)| crate::model::CommodityFlow {
                source,
                target,
                value,
                arc_flow,
            })
            .collect(),
        layout: crate::model::Layout { vehicles: raw.layout, relaxed: raw.relaxed },
        split: raw.split,
    }
}

/// Parse a solution against its instance; re-evaluation must reproduce
/// the stored objective pair within 1e-9 relative.
pub fn parse_solution_str(inst: &MspInstance, text: &str) -> Result<Solution, IoError> {
    let raw: RawSolution = serde_json::from_str(text)?;
    let (t, h) = raw.objective;
    let sol = raw_to_solution(raw);
    let p = evaluate(&sol, inst).map_err(|e| IoError::Schema(e.to_string()))?;
    if !close_relative(p.travel_time, t, 1e-9) || !close_relative(p.energy, h, 1e-9) {
        return Err(IoError::Schema(format!(
            "stored objective ({t}, {h}) does not match re-evaluation ({}, {})",
            p.travel_time, p.energy
        )));
    }
    Ok(sol)
}

pub fn parse_solution(inst: &MspInstance, path: &Path) -> Result<Solution, IoError> {
    parse_solution_str(inst, &std::fs::read_to_string(path)?)
}

/// Provenance of a frontier CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontierSource {
    Psi,
    Sample,
    Patch0,
    Patch1,
    Oracle,
}

impl FrontierSource {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontierSource::Psi => "psi",
            FrontierSource::Sample => "sample",
            FrontierSource::Patch0 => "patch0",
            FrontierSource::Patch1 => "patch1",
            FrontierSource::Oracle => "oracle",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "psi" => FrontierSource::Psi,
            "sample" => FrontierSource::Sample,
            "patch0" => FrontierSource::Patch0,
            "patch1" => FrontierSource::Patch1,
            "oracle" => FrontierSource::Oracle,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierRow {
    pub lambda: f64,
    pub budget: f64,
    pub point: ObjectivePoint,
    pub source: FrontierSource,
}

/// Render frontier rows as CSV, sorted by T ascending (stable on ties).
pub fn frontier_to_csv(rows: &[FrontierRow]) -> String {
    let mut sorted: Vec<&FrontierRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.point
            .travel_time
            .total_cmp(&b.point.travel_time)
            .then(a.point.energy.total_cmp(&b.point.energy))
    });
    let mut out = String::from("lambda,budget,T,E,source\n");
    for r in sorted {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.lambda,
            r.budget,
            r.point.travel_time,
            r.point.energy,
            r.source.as_str()
        )
        .expect("string write");
    }
    out
}

pub fn parse_frontier_csv(text: &str) -> Result<Vec<FrontierRow>, IoError> {
    let mut lines = text.lines();
    match lines.next() {
        Some("lambda,budget,T,E,source") => {}
        other => return Err(IoError::Schema(format!("bad csv header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(IoError::Schema(format!("row {i}: expected 5 fields")));
        }
        let num = |j: usize| -> Result<f64, IoError> {
            fields[j]
                .parse()
                .map_err(|_| IoError::Schema(format!("row {i}: bad number {:?}", fields[j])))
        };
        rows.push(FrontierRow {
            lambda: num(0)?,
            budget: num(1)?,
            point: ObjectivePoint::new(num(2)?, num(3)?),
            source: FrontierSource::from_str(fields[4])
                .ok_or_else(|| IoError::Schema(format!("row {i}: bad source {:?}", fields[4])))?,
        });
    }
    Ok(rows)
}

/// Convenience used by `verify`: parse, then check feasibility.
pub fn verify_solution(inst: &MspInstance, sol: &Solution) -> Vec<crate::model::Violation> {
    check_feasibility(sol, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_mode_zero_solution;

    fn sample_msp() -> MspInstance {
        let graph = Digraph::new(2, vec![GraphArc::new(0, 1, 1.0, 1.0)]).unwrap();
        let mut demand = Demand::new();
        demand.insert((0, 1), 2);
        MspInstance::new(
            graph,
            vec![Mode::new(1.0, 2.0, 0.0, 1), Mode::new(1.0, 1.0, 1.0, 2)],
            demand,
            3.0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn minimal_msp_file_parses() {
        let text = r#"{"kind":"msp","nodes":2,"arcs":[[0,1,1.0,1.0]],
            "modes":[[1,2,0,1],[1,1,1,2]],"demand":[[0,1,2]],"budget":3}"#;
        let inst = parse_instance_str(text).unwrap();
        assert_eq!(inst, Instance::Msp(sample_msp()));
    }

    #[test]
    fn arc_out_of_range_names_the_arc() {
        let text = r#"{"kind":"msp","nodes":2,"arcs":[[0,1,1,1],[0,5,1,1]],
            "modes":[[1,1,0,1]],"demand":[],"budget":0}"#;
        let err = parse_instance_str(text).unwrap_err();
        assert!(err.to_string().contains("arc 1"), "{err}");
    }

    #[test]
    fn instance_round_trips_all_kinds() {
        let kps = KnapsackInstance::new(
            vec![
                KnapsackItem::new(3.0, vec![2.0], Multiplicity::Unbounded, ItemTag::Index(0)),
                KnapsackItem::new(1.0, vec![1.0], Multiplicity::Bounded(2), ItemTag::Index(1)),
            ],
            vec![7.0],
            Some(4.0),
        )
        .unwrap();
        let x3c = X3cInstance::new(3, vec![[1, 2, 3]]).unwrap();
        let dindp = crate::reductions::x3c_to_dindp(&x3c).unwrap().instance;
        let g = Digraph::new(3, vec![GraphArc::new(0, 1, 1.0, 0.0), GraphArc::new(1, 2, 1.0, 0.0)])
            .unwrap();
        let distp = DistpInstance { graph: g, root: 0, terminals: vec![2], budget: 2.0 };
        for inst in [
            Instance::Msp(sample_msp()),
            Instance::Dindp(dindp),
            Instance::Distp(distp),
            Instance::X3c(x3c),
            Instance::Kps(kps),
        ] {
            let text = instance_to_string(&inst);
            let back = parse_instance_str(&text).unwrap();
            assert_eq!(back, inst, "kind {}", inst.kind());
        }
    }

    #[test]
    fn solution_round_trip_and_tamper_detection() {
        let inst = sample_msp();
        let sol = all_mode_zero_solution(&inst).unwrap();
        let text = solution_to_string(&inst, &sol).unwrap();
        let back = parse_solution_str(&inst, &text).unwrap();
        assert_eq!(back, sol);
        // corrupt the stored objective
        let tampered = text.replace("\"objective\": [", "\"objective\": [999.0, ");
        let tampered = {
            // drop the original first coordinate to keep the arity
            let idx = tampered.find("\"objective\"").unwrap();
            let rest = &tampered[idx..];
            let comma = idx + rest.find("999.0, ").unwrap() + "999.0, ".len();
            let end = tampered[comma..].find(',').map(|p| comma + p).unwrap();
            format!("{}{}", &tampered[..comma - "999.0, ".len() + "999.0".len()], &tampered[end..])
        };
        assert!(parse_solution_str(&inst, &tampered).is_err());
    }

    #[test]
    fn frontier_csv_round_trip_sorted() {
        let rows = vec![
            FrontierRow {
                lambda: 1.0,
                budget: 3.0,
                point: ObjectivePoint::new(9.0, 1.0),
                source: FrontierSource::Sample,
            },
            FrontierRow {
                lambda: 0.0,
                budget: 0.0,
                point: ObjectivePoint::new(4.0, 4.0),
                source: FrontierSource::Psi,
            },
        ];
        let csv = frontier_to_csv(&rows);
        assert!(csv.starts_with("lambda,budget,T,E,source\n0,0,4,4,psi\n"));
        let back = parse_frontier_csv(&csv).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].point, ObjectivePoint::new(4.0, 4.0));
        assert_eq!(back[1].source, FrontierSource::Sample);
    }

    #[test]
    fn bad_csv_header_rejected() {
        assert!(parse_frontier_csv("x,y\n").is_err());
    }
}
