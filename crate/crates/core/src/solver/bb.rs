//! Depth-first branch-and-bound.

use std::rc::Rc;
use std::time::Instant;

use super::simplex::{presolve, DualSimplex, LpStatus, Presolved};
use super::{Solution, SolverConfig, Status};
use crate::error::SolveError;
use crate::milp::{MilpModel, VarKind};

const INTEGRALITY_TOL: f64 = 1e-6;
/// Objective improvement needed to keep a node alive.
const PRUNE_GAP: f64 = 1e-6;
/// Tableau memory kept on the stack for warm starts.
const WARM_BUDGET: usize = 256 << 20;

struct Node {
    /// Branching decisions from the root, in order.
    path: Vec<(usize, f64)>,
    /// Parent tableau, when memory allowed keeping it.
    parent: Option<Rc<DualSimplex>>,
}

pub(crate) fn branch_and_bound(model: &MilpModel, config: &SolverConfig) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let infeasible = |nodes| Solution {
        status: Status::Infeasible,
        objective: f64::INFINITY,
        values: Vec::new(),
        solve_time: start.elapsed(),
        nodes,
    };
    let Some(pre) = presolve(model) else {
        return Ok(infeasible(0));
    };
    let root = DualSimplex::new(&pre.lp);
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut stack: Vec<Node> = Vec::new();
    let mut warm_bytes = 0usize;
    let mut current = Some((root.clone(), Vec::new()));
    let mut explored: u64 = 0;
    let mut limited = false;

    loop {
        let (mut lp, path) = match current.take() {
            Some(state) => state,
            None => match stack.pop() {
                None => break,
                Some(node) => {
                    let (&(col, val), _) = node.path.split_last().expect("child nodes carry a decision");
                    let lp = match node.parent {
                        Some(rc) => {
                            warm_bytes -= rc.tableau_bytes();
                            let mut lp = Rc::try_unwrap(rc).unwrap_or_else(|rc| (*rc).clone());
                            lp.set_bounds(col, val, val);
                            lp
                        }
                        None => {
                            let mut lp = root.clone();
                            for &(c, v) in &node.path {
                                lp.set_bounds(c, v, v);
                            }
                            lp
                        }
                    };
                    (lp, node.path)
                }
            },
        };
        if !path.is_empty() {
            explored += 1;
        }
        if start.elapsed() > config.time_limit || config.node_limit.is_some_and(|n| explored > n) {
            limited = true;
            break;
        }
        let cutoff = incumbent
            .as_ref()
            .map_or(f64::INFINITY, |(obj, _)| obj - pre.objective_constant - PRUNE_GAP);
        match lp.solve(cutoff).map_err(SolveError::Relaxation)? {
            LpStatus::Infeasible | LpStatus::Cutoff => continue,
            LpStatus::Optimal => {}
        }
        if lp.at_artificial_bound() {
            return Err(SolveError::Relaxation("relaxation is unbounded".into()));
        }
        let Some(col) = branching_column(&pre, lp.values()) else {
            let values = finish(model, &pre, lp.values());
            let exact = model.objective_value(&values);
            if incumbent.as_ref().is_none_or(|(best, _)| exact < *best) {
                incumbent = Some((exact, values));
            }
            continue;
        };
        let mut up_path = path.clone();
        up_path.push((col, 1.0));
        let parent = if warm_bytes + lp.tableau_bytes() <= WARM_BUDGET {
            warm_bytes += lp.tableau_bytes();
            Some(Rc::new(lp.clone()))
        } else {
            None
        };
        stack.push(Node { path: up_path, parent });
        let mut down_path = path;
        down_path.push((col, 0.0));
        lp.set_bounds(col, 0.0, 0.0);
        current = Some((lp, down_path));
    }

    let solve_time = start.elapsed();
    Ok(match incumbent {
        Some((objective, values)) => Solution {
            status: if limited { Status::TimeLimit } else { Status::Optimal },
            objective,
            values,
            solve_time,
            nodes: explored,
        },
        None if limited => Solution {
            status: Status::TimeLimit,
            objective: f64::INFINITY,
            values: Vec::new(),
            solve_time,
            nodes: explored,
        },
        None => infeasible(explored),
    })
}

/// Most fractional binary column, lowest index on ties.
fn branching_column(pre: &Presolved, x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in x.iter().enumerate() {
        if !pre.binary[k] {
            continue;
        }
        let frac = (v - v.floor()).min(v.ceil() - v);
        if frac > INTEGRALITY_TOL && best.is_none_or(|(_, f)| frac > f + 1e-12) {
            best = Some((k, frac));
        }
    }
    best.map(|(k, _)| k)
}

/// Full assignment with binaries snapped to 0/1 and continuous values
/// clamped into their bounds.
fn finish(model: &MilpModel, pre: &Presolved, x: &[f64]) -> Vec<f64> {
    let mut values = pre.expand(x);
    for (v, var) in values.iter_mut().zip(model.variables()) {
        *v = match var.kind {
            VarKind::Binary => v.round(),
            VarKind::Continuous => v.clamp(var.lower, var.upper),
        };
    }
    values
}
