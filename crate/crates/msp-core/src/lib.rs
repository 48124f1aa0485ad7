//! Bicriteria modal-split network design.
//!
//! The library models transit network design with two objectives, total
//! travel time and total energy, under a budget on installed vehicles.
//! It provides the instance/solution model, knapsack machinery, the
//! approximation algorithms (central-node 2-approximation, fixed-flow
//! frontier sampling), hardness-reduction gadget generators and small
//! brute-force oracles, plus JSON/CSV interchange used by the `msp` CLI.

pub mod graph;
pub mod io;
pub mod knapsack;
pub mod model;
pub mod reductions;
pub mod solvers;

pub use graph::{
    all_pairs_distances, central_node, routing_cost, shortest_path_subgraph, ArcSubset, Cost,
    Digraph, DistanceMatrix, GraphArc, GraphError, NodeId,
};
pub use model::{
    aggregate_flow, check_feasibility, dominates, evaluate, shortest_path_flow, Layout, Mode,
    ModelError, MspInstance, ObjectivePoint, Solution, Violation,
};
