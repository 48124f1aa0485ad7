//! Command-line surface: gadget generators, solvers, oracles, frontier
//! sampling, and solution verification over the JSON/CSV file formats.
//!
//! Exit codes: 0 success, 1 infeasible solution or false decision,
//! 2 usage or input error, 3 premise violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};

use msp_core::io::{
    frontier_to_csv, parse_instance, parse_solution, write_instance, write_solution, FrontierRow,
    FrontierSource, Instance,
};
use msp_core::knapsack::{kps_exact, subset_sum_decide};
use msp_core::model::{evaluate, meets_bounds, MspInstance};
use msp_core::reductions::{
    dindp_to_msp, distp_to_dindp_inapprox, distp_to_msp_inapprox, esum_to_dindp, ssum_to_msp,
    ukps_to_msp, x3c_to_dindp, ReductionOutput, X3cInstance,
};
use msp_core::solvers::{
    dindp_brute_force, dindp_two_approx, fixed_flow_optimize, frontier_budget_cap,
    frontier_sample, msp_brute_force, msp_two_approx_extreme, patch_segment, relaxation_segment,
    OracleLimits, SolverError,
};
use msp_core::{routing_cost, shortest_path_flow};

#[derive(Parser)]
#[command(name = "msp", about = "Bicriteria transit network design toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reduction gadget instance file (plus a .meta.json
    /// with parameters and node roles)
    Gen(GenArgs),
    /// Evaluate a solution's objective pair (T, E)
    Evaluate { instance: PathBuf, solution: PathBuf },
    /// Optimize energy over shortest-path flows under the budget
    SolveFixedFlow {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the relaxation segment and patch endpoints as CSV
    Frontier {
        instance: PathBuf,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Routing-cost 2-approximation (dindp) or extreme-solution
    /// 2-approximation (msp)
    TwoApprox {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive desk-scale oracle; exits 1 on a false decision
    Oracle {
        instance: PathBuf,
        /// max arcs and search-node limit, comma separated
        #[arg(long, value_parser = parse_limits)]
        limits: Option<OracleLimits>,
    },
    /// Check a solution's feasibility; exits 1 with violations
    Verify { instance: PathBuf, solution: PathBuf },
    /// Print the relaxation segment endpoints and delta
    Segment { instance: PathBuf },
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    which: GenCommand,
}

#[derive(Subcommand)]
enum GenCommand {
    /// X3C -> DiNDP gadget from inline sets ("1,2,3;4,5,6")
    X3c {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sets: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// ESUM -> DiNDP gadget from item values
    Esum {
        #[arg(long, value_delimiter = ',')]
        items: Vec<u64>,
        #[arg(long)]
        target: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// SSUM -> MSP path gadget
    Ssum {
        #[arg(long, value_delimiter = ',')]
        items: Vec<u64>,
        #[arg(long)]
        target: u64,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// UKPS -> MSP single-arc gadget; items as "value:weight" pairs
    Ukps {
        #[arg(long, value_delimiter = ',')]
        items: Vec<String>,
        #[arg(long)]
        target: u64,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// DiNDP -> MSP decision gadget from a dindp instance file
    Dindp2msp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// DiSTP -> MSP inapproximability gadget
    DistpMsp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// DiSTP -> DiNDP inapproximability gadget
    DistpDindp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        star_override: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_limits(s: &str) -> Result<OracleLimits, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected max_arcs,node_limit".into());
    }
    Ok(OracleLimits {
        max_arcs: parts[0].parse().map_err(|_| "bad max_arcs")?,
        node_limit: parts[1].parse().map_err(|_| "bad node_limit")?,
    })
}

/// Internal result carrying the process exit code.
enum Outcome {
    Ok,
    False,
    Premise(String),
    Usage(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(cli.command) {
        Ok(o) => o,
        Err(e) => e,
    };
    match outcome {
        Outcome::Ok => ExitCode::from(0),
        Outcome::False => ExitCode::from(1),
        Outcome::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Outcome::Premise(msg) => {
            eprintln!("premise violated: {msg}");
            ExitCode::from(3)
        }
    }
}

fn usage(msg: impl ToString) -> Outcome {
    Outcome::Usage(msg.to_string())
}

fn solver_outcome(e: SolverError) -> Outcome {
    match e {
        SolverError::PremiseViolated(msg) => Outcome::Premise(msg),
        other => usage(other),
    }
}

fn load(path: &Path) -> Result<Instance, Outcome> {
    parse_instance(path).map_err(usage)
}

fn load_msp(path: &Path) -> Result<MspInstance, Outcome> {
    match load(path)? {
        Instance::Msp(i) => Ok(i),
        other => Err(usage(format!("expected an msp instance, got {}", other.kind()))),
    }
}

fn run(cmd: Command) -> Result<Outcome, Outcome> {
    match cmd {
        Command::Gen(args) => run_gen(args.which),
        Command::Evaluate { instance, solution } => {
            let inst = load_msp(&instance)?;
            let sol = parse_solution(&inst, &solution).map_err(usage)?;
            let p = evaluate(&sol, &inst).map_err(usage)?;
            println!("T = {}", p.travel_time);
            println!("E = {}", p.energy);
            Ok(Outcome::Ok)
        }
        Command::SolveFixedFlow { instance, epsilon, out } => {
            let inst = load_msp(&instance)?;
            let flows = shortest_path_flow(&inst).map_err(usage)?;
            let sol = fixed_flow_optimize(&inst, &flows, epsilon).map_err(solver_outcome)?;
            let p = evaluate(&sol, &inst).map_err(usage)?;
            println!("T = {}", p.travel_time);
            println!("E = {}", p.energy);
            if let Some(out) = out {
                write_solution(&out, &inst, &sol).map_err(usage)?;
            }
            Ok(Outcome::Ok)
        }
        Command::Frontier { instance, samples, epsilon, parallel, out } => {
            let inst = load_msp(&instance)?;
            let csv = frontier_csv(&inst, samples, epsilon, parallel)?;
            match out {
                Some(path) => std::fs::write(path, &csv).map_err(usage)?,
                None => print!("{csv}"),
            }
            Ok(Outcome::Ok)
        }
        Command::TwoApprox { instance, out } => match load(&instance)? {
            Instance::Msp(inst) => {
                let sol = msp_two_approx_extreme(&inst).map_err(solver_outcome)?;
                let p = evaluate(&sol, &inst).map_err(usage)?;
                println!("T = {}", p.travel_time);
                println!("E = {}", p.energy);
                if let Some(out) = out {
                    write_solution(&out, &inst, &sol).map_err(usage)?;
                }
                Ok(Outcome::Ok)
            }
            Instance::Dindp(inst) => {
                let subset = dindp_two_approx(&inst.graph).map_err(solver_outcome)?;
                let cost = routing_cost(&inst.graph, Some(&subset), inst.demand.as_ref());
                let indices: Vec<usize> = subset.indices().collect();
                println!("arcs = {indices:?}");
                println!("weight = {}", subset.weight(&inst.graph));
                println!("R = {cost}");
                Ok(Outcome::Ok)
            }
            other => Err(usage(format!("two-approx expects msp or dindp, got {}", other.kind()))),
        },
        Command::Oracle { instance, limits } => run_oracle(&instance, limits),
        Command::Verify { instance, solution } => {
            let inst = load_msp(&instance)?;
            let text = std::fs::read_to_string(&solution).map_err(|e| usage(e))?;
            let sol = msp_core::io::parse_solution_unchecked(&text).map_err(usage)?;
            let violations = msp_core::io::verify_solution(&inst, &sol);
            if violations.is_empty() {
                println!("feasible");
                Ok(Outcome::Ok)
            } else {
                for v in violations {
                    eprintln!("violation: {v}");
                }
                Ok(Outcome::False)
            }
        }
        Command::Segment { instance } => {
            let inst = load_msp(&instance)?;
            let seg = relaxation_segment(&inst).map_err(solver_outcome)?;
            println!("psi0 = ({}, {})", seg.p0.travel_time, seg.p0.energy);
            println!("psi1 = ({}, {})", seg.p1.travel_time, seg.p1.energy);
            println!("delta = {}", seg.delta);
            Ok(Outcome::Ok)
        }
    }
}

fn write_gadget<I>(
    out: &Path,
    wrap: impl FnOnce(I) -> Instance,
    g: ReductionOutput<I>,
) -> Result<Outcome, Outcome> {
    write_instance(out, &wrap(g.instance)).map_err(usage)?;
    let meta = serde_json::json!({
        "params": g.params,
        "roles": g.roles,
        "false_marker": g.false_marker,
    });
    let meta_path = out.with_extension("meta.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("meta") + "\n")
        .map_err(usage)?;
    Ok(Outcome::Ok)
}

fn run_gen(cmd: GenCommand) -> Result<Outcome, Outcome> {
    match cmd {
        GenCommand::X3c { n, sets, out } => {
            let parsed: Result<Vec<[usize; 3]>, _> = sets
                .split(';')
                .map(|grp| {
                    let elems: Vec<usize> = grp
                        .split(',')
                        .map(|e| e.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| format!("bad set {grp:?}"))?;
                    <[usize; 3]>::try_from(elems).map_err(|_| format!("set {grp:?} is not a triple"))
                })
                .collect();
            let x = X3cInstance::new(n, parsed.map_err(usage)?).map_err(usage)?;
            let g = x3c_to_dindp(&x).map_err(usage)?;
            write_gadget(&out, Instance::Dindp, g)
        }
        GenCommand::Esum { items, target, out } => {
            write_gadget(&out, Instance::Dindp, esum_to_dindp(&items, target))
        }
        GenCommand::Ssum { items, target, bound, out } => {
            write_gadget(&out, Instance::Msp, ssum_to_msp(&items, target, bound))
        }
        GenCommand::Ukps { items, target, bound, out } => {
            let parsed: Result<Vec<(u64, u64)>, String> = items
                .iter()
                .map(|p| {
                    let (s, w) = p.split_once(':').ok_or(format!("bad item {p:?}"))?;
                    Ok((
                        s.parse().map_err(|_| format!("bad value in {p:?}"))?,
                        w.parse().map_err(|_| format!("bad weight in {p:?}"))?,
                    ))
                })
                .collect();
            write_gadget(&out, Instance::Msp, ukps_to_msp(&parsed.map_err(usage)?, target, bound))
        }
        GenCommand::Dindp2msp { input, out } => match load(&input)? {
            Instance::Dindp(i) => write_gadget(&out, Instance::Msp, dindp_to_msp(&i).map_err(usage)?),
            other => Err(usage(format!("expected a dindp instance, got {}", other.kind()))),
        },
        GenCommand::DistpMsp { input, alpha, out } => match load(&input)? {
            Instance::Distp(i) => {
                write_gadget(&out, Instance::Msp, distp_to_msp_inapprox(&i, alpha).map_err(usage)?)
            }
            other => Err(usage(format!("expected a distp instance, got {}", other.kind()))),
        },
        GenCommand::DistpDindp { input, eps, star_override, out } => match load(&input)? {
            Instance::Distp(i) => write_gadget(
                &out,
                Instance::Dindp,
                distp_to_dindp_inapprox(&i, eps, star_override).map_err(usage)?,
            ),
            other => Err(usage(format!("expected a distp instance, got {}", other.kind()))),
        },
    }
}

fn run_oracle(path: &Path, limits: Option<OracleLimits>) -> Result<Outcome, Outcome> {
    match load(path)? {
        Instance::Msp(inst) => {
            let limits = limits.unwrap_or_else(OracleLimits::msp);
            let frontier = msp_brute_force(&inst, limits).map_err(solver_outcome)?;
            for p in frontier.points() {
                println!("{} {}", p.travel_time, p.energy);
            }
            match inst.bounds {
                Some(bounds) => {
                    let ok = frontier
                        .points()
                        .iter()
                        .any(|&p| meets_bounds(p, bounds));
                    println!("decision = {ok}");
                    Ok(if ok { Outcome::Ok } else { Outcome::False })
                }
                None => Ok(Outcome::Ok),
            }
        }
        Instance::Dindp(inst) => {
            let limits = limits.unwrap_or_else(OracleLimits::dindp);
            let res = dindp_brute_force(&inst, limits).map_err(solver_outcome)?;
            let indices: Vec<usize> = res.subset.indices().collect();
            println!("arcs = {indices:?}");
            println!("R = {}", res.cost);
            println!("decision = {}", res.decision);
            Ok(if res.decision { Outcome::Ok } else { Outcome::False })
        }
        Instance::Distp(inst) => {
            let ok = inst.decide();
            println!("decision = {ok}");
            Ok(if ok { Outcome::Ok } else { Outcome::False })
        }
        Instance::X3c(inst) => match inst.decide() {
            Some(cover) => {
                println!("cover = {cover:?}");
                println!("decision = true");
                Ok(Outcome::Ok)
            }
            None => {
                println!("decision = false");
                Ok(Outcome::False)
            }
        },
        Instance::Kps(inst) => {
            if inst.target.is_some() {
                let (ok, witness) = subset_sum_decide(&inst, false).map_err(usage)?;
                println!("decision = {ok}");
                if let Some(sel) = witness {
                    println!("counts = {:?}", sel.counts);
                }
                Ok(if ok { Outcome::Ok } else { Outcome::False })
            } else {
                let sel = kps_exact(&inst).map_err(usage)?;
                println!("value = {}", sel.value);
                println!("counts = {:?}", sel.counts);
                Ok(Outcome::Ok)
            }
        }
    }
}

/// Build the frontier CSV: the two segment endpoints, one segment
/// sample per equidistant budget point in [0, B-hat], and the two
/// patch endpoints of every sampled solution. Worker threads (when
/// requested) fill a per-sample slot table, so output bytes do not
/// depend on scheduling.
fn frontier_csv(
    inst: &MspInstance,
    samples: usize,
    epsilon: f64,
    parallel: bool,
) -> Result<String, Outcome> {
    let seg = relaxation_segment(inst).map_err(solver_outcome)?;
    let cap = frontier_budget_cap(inst).map_err(solver_outcome)?;
    let mut rows = vec![
        FrontierRow { lambda: 0.0, budget: 0.0, point: seg.at(0.0), source: FrontierSource::Psi },
        FrontierRow { lambda: 1.0, budget: cap, point: seg.at(1.0), source: FrontierSource::Psi },
    ];
    let budgets: Vec<f64> = (0..samples)
        .map(|i| {
            if samples == 1 {
                0.0
            } else {
                cap * i as f64 / (samples - 1) as f64
            }
        })
        .collect();
    let job = |budget: f64| -> Result<Vec<FrontierRow>, SolverError> {
        let lambda = if cap > 0.0 { budget / cap } else { 0.0 };
        let sol = frontier_sample(inst, budget, epsilon)?;
        let p = evaluate(&sol, inst)?;
        let patch = patch_segment(inst, &sol)?;
        Ok(vec![
            FrontierRow { lambda, budget, point: p, source: FrontierSource::Sample },
            FrontierRow { lambda, budget, point: patch.p0, source: FrontierSource::Patch0 },
            FrontierRow { lambda, budget, point: patch.p1, source: FrontierSource::Patch1 },
        ])
    };
    let mut slots: Vec<Option<Result<Vec<FrontierRow>, SolverError>>> =
        (0..budgets.len()).map(|_| None).collect();
    if parallel {
        let next = AtomicUsize::new(0);
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(budgets.len().max(1));
        let results: Vec<(usize, Result<Vec<FrontierRow>, SolverError>)> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers)
                    .map(|_| {
                        let next = &next;
                        let budgets = &budgets;
                        scope.spawn(move || {
                            let mut local = Vec::new();
                            loop {
                                let i = next.fetch_add(1, Ordering::Relaxed);
                                if i >= budgets.len() {
                                    return local;
                                }
                                local.push((i, job(budgets[i])));
                            }
                        })
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
            });
        for (i, r) in results {
            slots[i] = Some(r);
        }
    } else {
        for (i, &b) in budgets.iter().enumerate() {
            slots[i] = Some(job(b));
        }
    }
    for slot in slots {
        rows.extend(slot.expect("slot filled").map_err(solver_outcome)?);
    }
    Ok(frontier_to_csv(&rows))
}
