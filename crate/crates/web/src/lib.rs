//! Browser bindings. Every export takes and returns strings; results are
//! JSON documents consumed by `www/index.html`.

use std::time::Duration;

use momst::instance::{generate_text, parse_instance, InstanceSpec};
use momst::{solve_instance, Algorithm, MultiGraph, Outcome, PipelineOptions, SolveOptions, Status};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Keeps the page responsive on hard inputs.
const TIME_LIMIT: Duration = Duration::from_secs(10);

fn options(algorithm: Algorithm, preprocess: bool) -> PipelineOptions {
    PipelineOptions {
        algorithm,
        preprocess,
        solve: SolveOptions { time_limit: Some(TIME_LIMIT), ..SolveOptions::default() },
    }
}

fn run(graph: &MultiGraph, algorithm: Algorithm, preprocess: bool) -> Result<Outcome, String> {
    solve_instance(graph, &options(algorithm, preprocess)).map_err(|e| e.to_string())
}

fn stats_json(out: &Outcome) -> Value {
    let s = &out.solution.stats;
    json!({
        "status": out.solution.status.as_str(),
        "solutions": out.solution.trees.len(),
        "iterations": s.iterations,
        "transition_nodes": s.transition_nodes,
        "max_frontier": s.max_frontier,
        "time_ms": (s.solve_time + out.preprocess_time).as_secs_f64() * 1e3,
        "red": out.reduction.red_count,
        "blue": out.reduction.blue_count,
    })
}

pub fn generate_instance(spec: &str) -> Result<String, String> {
    let spec: InstanceSpec = spec.parse()?;
    generate_text(&spec).map_err(|e| e.to_string())
}

pub fn solve_json(instance: &str, algorithm: &str, preprocess: bool) -> Result<Value, String> {
    let graph = parse_instance(instance).map_err(|e| e.to_string())?;
    let algorithm: Algorithm = algorithm.parse()?;
    let out = run(&graph, algorithm, preprocess)?;
    let edges: Vec<Value> =
        graph.edges().iter().map(|e| json!({ "u": e.u, "v": e.v, "cost": e.cost.as_slice() })).collect();
    let trees: Vec<Value> = out
        .solution
        .trees
        .iter()
        .map(|t| json!({ "cost": t.cost.as_slice(), "edges": t.edges.iter().map(|e| e.0).collect::<Vec<_>>() }))
        .collect();
    Ok(json!({
        "n": graph.node_count(),
        "d": graph.dim(),
        "root": graph.root(),
        "edges": edges,
        "trees": trees,
        "stats": stats_json(&out),
    }))
}

pub fn compare_json(instance: &str) -> Result<Value, String> {
    let graph = parse_instance(instance).map_err(|e| e.to_string())?;
    let a = run(&graph, Algorithm::IgMda, false)?;
    let b = run(&graph, Algorithm::Bn, false)?;
    let both_solved = a.solution.status == Status::Solved && b.solution.status == Status::Solved;
    Ok(json!({
        "igmda": stats_json(&a),
        "bn": stats_json(&b),
        "same_front": both_solved.then(|| a.solution.costs() == b.solution.costs()),
    }))
}

/// Instance text for a `key=value` generator spec.
#[wasm_bindgen]
pub fn generate(spec: &str) -> Result<String, JsValue> {
    generate_instance(spec).map_err(|e| JsValue::from_str(&e))
}

/// Pareto front and one tree per nondominated cost vector.
#[wasm_bindgen]
pub fn solve(instance: &str, algorithm: &str, preprocess: bool) -> Result<String, JsValue> {
    solve_json(instance, algorithm, preprocess).map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// Both solvers on the same instance, without preprocessing.
#[wasm_bindgen]
pub fn compare(instance: &str) -> Result<String, JsValue> {
    compare_json(instance).map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}
