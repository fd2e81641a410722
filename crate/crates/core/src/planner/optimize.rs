//! One optimization round: build, solve, decode and check.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use super::{decode, summarize, validate, Plan, Summary, Violation};
use crate::catalog::{Catalog, Transcript};
use crate::error::{BuildError, DecodeError, SolveError};
use crate::milp::{model_stats, ModelStats};
use crate::model::{build_model_with, normalize_preferences, BuildOptions, Family, GradeEstimates, Preferences};
use crate::solver::{solve, SolverConfig, Status};

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub plan: Plan,
    pub summary: Summary,
    pub status: Status,
    pub objective: f64,
    pub nodes: u64,
    pub solve_time: Duration,
    pub stats: ModelStats,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Build(BuildError),
    #[error("no plan satisfies all constraints ({})", tags.join(", "))]
    Infeasible { tags: Vec<String> },
    #[error("time limit reached before any plan was found")]
    NoSolution,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("solver plan breaks {} rules, first: {}", .0.len(), .0[0])]
    Breach(Vec<Violation>),
}

impl From<BuildError> for PlanError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::InfeasibleByConstruction { tags, .. } => PlanError::Infeasible { tags },
            other => PlanError::Build(other),
        }
    }
}

/// Builds and solves the model and returns the decoded plan, after checking
/// it with [`validate`]. A plan that fails the check is an error, never a
/// result.
pub fn optimize(
    catalog: &Catalog,
    transcript: &Transcript,
    prefs: &Preferences,
    estimates: &GradeEstimates,
    config: &SolverConfig,
) -> Result<Outcome, PlanError> {
    let prefs = normalize_preferences(catalog, transcript, prefs)?;
    let (model, vars) = build_model_with(catalog, transcript, &prefs, estimates, &BuildOptions::default())?;
    let solution = solve(&model, config)?;
    match solution.status {
        Status::Infeasible => {
            return Err(PlanError::Infeasible { tags: diagnose(catalog, transcript, &prefs, estimates, config) });
        }
        Status::TimeLimit if !solution.has_values() => return Err(PlanError::NoSolution),
        _ => {}
    }
    let plan = decode(&solution, &vars, catalog, transcript, estimates)?;
    let violations = validate(&plan, catalog, transcript, &prefs);
    if !violations.is_empty() {
        return Err(PlanError::Breach(violations));
    }
    Ok(Outcome {
        summary: summarize(&plan, estimates),
        plan,
        status: solution.status,
        objective: solution.objective,
        nodes: solution.nodes,
        solve_time: solution.solve_time,
        stats: model_stats(&model),
    })
}

/// Families a student controls, tried one at a time to explain infeasibility.
const SUSPECTS: [(Family, &str); 6] = [
    (Family::Pins, "eq13:pin"),
    (Family::Desired, "eq12:desired"),
    (Family::SummersOff, "eq14:summers-off"),
    (Family::CoursesPerTerm, "eq16:courses-per-term"),
    (Family::Thesis, "eq17:thesis"),
    (Family::Groups, "eq11:group"),
];

/// Tags of the student-controlled constraints whose removal alone makes the
/// model feasible. Pins are narrowed down to individual courses.
fn diagnose(
    catalog: &Catalog,
    transcript: &Transcript,
    prefs: &Preferences,
    estimates: &GradeEstimates,
    config: &SolverConfig,
) -> Vec<String> {
    let probe = SolverConfig { time_limit: config.time_limit.min(Duration::from_secs(5)), ..config.clone() };
    let feasible = |prefs: &Preferences, options: &BuildOptions| {
        build_model_with(catalog, transcript, prefs, estimates, options)
            .ok()
            .and_then(|(m, _)| solve(&m, &probe).ok())
            .is_some_and(|s| s.has_values())
    };
    let mut tags = Vec::new();
    for (family, tag) in SUSPECTS {
        if !feasible(prefs, &BuildOptions::without([family])) {
            continue;
        }
        if family == Family::Pins && !prefs.pins.is_empty() {
            for (code, term) in &prefs.pins {
                let mut pins: BTreeMap<_, _> = prefs.pins.clone();
                pins.remove(code);
                let fewer = Preferences { pins, ..prefs.clone() };
                if feasible(&fewer, &BuildOptions::default()) {
                    tags.push(format!("{tag}:{code}:s={term}"));
                }
            }
        }
        if family == Family::Pins && !prefs.windows.is_empty() {
            for code in prefs.windows.keys() {
                let mut windows = prefs.windows.clone();
                windows.remove(code);
                let fewer = Preferences { windows, ..prefs.clone() };
                if feasible(&fewer, &BuildOptions::default()) {
                    tags.push(format!("eq13:window:{code}"));
                }
            }
        }
        tags.push(tag.to_string());
    }
    if tags.is_empty() {
        tags.push("degree-requirements".to_string());
    }
    tags
}
