//! Browser bindings for the demo page: thin JSON-string wrappers
//! around the segment, frontier-sampling, and oracle entry points of
//! `msp-core`. Each function takes an MSP instance file (the same JSON
//! the CLI reads) and returns a JSON string; errors come back as
//! `{"error": "..."}` so the page can render them without exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use msp_core::io::{parse_instance_str, Instance};
use msp_core::model::{evaluate, MspInstance, ObjectivePoint};
use msp_core::solvers::{
    frontier_budget_cap, frontier_sample, msp_brute_force, patch_segment, relaxation_segment,
    OracleLimits,
};

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

fn err(msg: impl ToString) -> String {
    serde_json::to_string(&ErrorBody { error: msg.to_string() }).expect("error body")
}

fn parse_msp(instance_json: &str) -> Result<MspInstance, String> {
    match parse_instance_str(instance_json) {
        Ok(Instance::Msp(inst)) => Ok(inst),
        Ok(other) => Err(format!("expected an msp instance, got {}", other.kind())),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Serialize)]
struct Point {
    t: f64,
    e: f64,
}

impl From<ObjectivePoint> for Point {
    fn from(p: ObjectivePoint) -> Self {
        Point { t: p.travel_time, e: p.energy }
    }
}

#[derive(Serialize)]
struct SegmentBody {
    psi0: Point,
    psi1: Point,
    delta: f64,
    budget_cap: f64,
}

/// Relaxation segment endpoints, delta, and the sampling budget cap.
#[wasm_bindgen]
pub fn segment_info(instance_json: &str) -> String {
    let inst = match parse_msp(instance_json) {
        Ok(i) => i,
        Err(e) => return err(e),
    };
    let seg = match relaxation_segment(&inst) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let cap = match frontier_budget_cap(&inst) {
        Ok(c) => c,
        Err(e) => return err(e),
    };
    serde_json::to_string(&SegmentBody {
        psi0: seg.at(0.0).into(),
        psi1: seg.at(1.0).into(),
        delta: seg.delta,
        budget_cap: cap,
    })
    .expect("segment body")
}

#[derive(Serialize)]
struct FrontierRowBody {
    lambda: f64,
    budget: f64,
    point: Point,
    source: &'static str,
}

/// Equidistant budget samples with their patch endpoints, mirroring
/// the CLI's `frontier` subcommand.
#[wasm_bindgen]
pub fn frontier_points(instance_json: &str, samples: usize, epsilon: f64) -> String {
    let inst = match parse_msp(instance_json) {
        Ok(i) => i,
        Err(e) => return err(e),
    };
    let seg = match relaxation_segment(&inst) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let cap = match frontier_budget_cap(&inst) {
        Ok(c) => c.min(inst.budget),
        Err(e) => return err(e),
    };
    let mut rows = vec![
        FrontierRowBody { lambda: 0.0, budget: 0.0, point: seg.at(0.0).into(), source: "psi" },
        FrontierRowBody { lambda: 1.0, budget: cap, point: seg.at(1.0).into(), source: "psi" },
    ];
    let samples = samples.clamp(1, 64);
    for i in 0..samples {
        let budget = if samples == 1 { 0.0 } else { cap * i as f64 / (samples - 1) as f64 };
        let lambda = if cap > 0.0 { budget / cap } else { 0.0 };
        let sol = match frontier_sample(&inst, budget, epsilon) {
            Ok(s) => s,
            Err(e) => return err(e),
        };
        let p = match evaluate(&sol, &inst) {
            Ok(p) => p,
            Err(e) => return err(e),
        };
        rows.push(FrontierRowBody { lambda, budget, point: p.into(), source: "sample" });
        if let Ok(patch) = patch_segment(&inst, &sol) {
            rows.push(FrontierRowBody {
                lambda,
                budget,
                point: patch.p0.into(),
                source: "patch0",
            });
            rows.push(FrontierRowBody {
                lambda,
                budget,
                point: patch.p1.into(),
                source: "patch1",
            });
        }
    }
    serde_json::to_string(&rows).expect("frontier rows")
}

/// Exhaustive Pareto frontier for desk-scale instances.
#[wasm_bindgen]
pub fn oracle_frontier(instance_json: &str) -> String {
    let inst = match parse_msp(instance_json) {
        Ok(i) => i,
        Err(e) => return err(e),
    };
    let limits = OracleLimits { max_arcs: 6, node_limit: 2_000_000 };
    match msp_brute_force(&inst, limits) {
        Ok(frontier) => {
            let pts: Vec<Point> = frontier.points().into_iter().map(Point::from).collect();
            serde_json::to_string(&pts).expect("oracle points")
        }
        Err(e) => err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO_INSTANCE: &str = r#"{"kind":"msp","nodes":2,"arcs":[[0,1,1.0,1.0]],
        "modes":[[1,1,0,1],[2,1,1,4]],"demand":[[0,1,4]],"budget":1}"#;

    #[test]
    fn segment_info_reports_endpoints() {
        let body: serde_json::Value = serde_json::from_str(&segment_info(DEMO_INSTANCE)).unwrap();
        assert_eq!(body["psi0"]["t"], 4.0);
        assert_eq!(body["psi1"]["e"], 1.0);
        assert_eq!(body["delta"], 1.0);
    }

    #[test]
    fn frontier_points_cover_sources() {
        let rows: serde_json::Value =
            serde_json::from_str(&frontier_points(DEMO_INSTANCE, 3, 0.1)).unwrap();
        let sources: Vec<&str> =
            rows.as_array().unwrap().iter().map(|r| r["source"].as_str().unwrap()).collect();
        assert!(sources.contains(&"psi"));
        assert!(sources.contains(&"sample"));
        assert!(sources.contains(&"patch0"));
    }

    #[test]
    fn oracle_frontier_returns_points() {
        let pts: serde_json::Value = serde_json::from_str(&oracle_frontier(DEMO_INSTANCE)).unwrap();
        assert!(!pts.as_array().unwrap().is_empty());
    }

    #[test]
    fn errors_come_back_as_json() {
        let body: serde_json::Value = serde_json::from_str(&segment_info("{}")).unwrap();
        assert!(body["error"].is_string());
    }
}
