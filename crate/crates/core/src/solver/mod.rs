//! Solving a [`MilpModel`].
//!
//! The built-in backend is a depth-first branch-and-bound over a dual
//! simplex relaxation. The external backend writes the model in LP format,
//! runs a user-supplied command and reads back a `name value` solution file.
//! Either way, a solution reported optimal is re-checked against every row
//! and bound before it is returned.

mod bb;
mod external;
mod simplex;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::milp::MilpModel;

pub use external::parse_solution;

/// Feasibility tolerance of the verification gate.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    /// A limit was hit. `values` holds the best plan found, if any.
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub objective: f64,
    /// One value per model variable; empty when no assignment exists.
    pub values: Vec<f64>,
    pub solve_time: Duration,
    /// Branch-and-bound nodes explored after the root.
    pub nodes: u64,
}

impl Solution {
    pub fn has_values(&self) -> bool {
        !self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    #[default]
    Internal,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Shell command for the external backend. `{lp}` and `{sol}` are
    /// replaced by the model and solution file paths, `{time}` by the time
    /// limit in whole seconds.
    pub external_command: Option<String>,
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::Internal,
            external_command: None,
            time_limit: Duration::from_secs(60),
            node_limit: None,
            tolerance: VERIFY_TOL,
        }
    }
}

impl SolverConfig {
    pub fn external(command: impl Into<String>) -> SolverConfig {
        SolverConfig {
            backend: Backend::External,
            external_command: Some(command.into()),
            ..SolverConfig::default()
        }
    }
}

/// Solves `model` to optimality or until a limit is reached.
pub fn solve(model: &MilpModel, config: &SolverConfig) -> Result<Solution, SolveError> {
    let solution = match config.backend {
        Backend::Internal => bb::branch_and_bound(model, config)?,
        Backend::External => external::run(model, config)?,
    };
    verify(model, &solution, config.tolerance)?;
    Ok(solution)
}

/// Checks rows, bounds and integrality of any returned assignment.
pub fn verify(model: &MilpModel, solution: &Solution, tol: f64) -> Result<(), SolveError> {
    if !solution.has_values() {
        return if solution.status == Status::Optimal {
            Err(SolveError::Unverified("optimal status without values".into()))
        } else {
            Ok(())
        };
    }
    if solution.values.len() != model.num_vars() {
        return Err(SolveError::Unverified(format!(
            "{} values for {} variables",
            solution.values.len(),
            model.num_vars()
        )));
    }
    let problems = model.violations(&solution.values, tol);
    if let Some((what, by)) = problems.first() {
        return Err(SolveError::Unverified(format!(
            "{} violations, first {what} by {by:.3e}",
            problems.len()
        )));
    }
    let obj = model.objective_value(&solution.values);
    if (obj - solution.objective).abs() > tol * (1.0 + obj.abs()) {
        return Err(SolveError::Unverified(format!(
            "reported objective {} but assignment gives {obj}",
            solution.objective
        )));
    }
    Ok(())
}
