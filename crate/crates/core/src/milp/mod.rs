//! Solver-agnostic mixed-integer linear program.
//!
//! Variables and rows keep insertion order, which fixes the column order seen
//! by solvers and makes [`write_lp`] output reproducible.

mod lp;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::ModelError;

pub use lp::{format_number, write_lp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearConstraint {
    pub terms: Vec<(f64, VarId)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: String,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(c, v)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violate the row; 0 when satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimization problem.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(f64, VarId)>,
    #[serde(skip)]
    names: HashMap<String, VarId>,
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Sums coefficients of repeated variables (first-occurrence order) and
/// drops zero coefficients.
fn combine(terms: impl IntoIterator<Item = (f64, VarId)>) -> Vec<(f64, VarId)> {
    let mut out: Vec<(f64, VarId)> = Vec::new();
    let mut pos: HashMap<VarId, usize> = HashMap::new();
    for (c, v) in terms {
        match pos.get(&v) {
            Some(&i) => out[i].0 += c,
            None => {
                pos.insert(v, out.len());
                out.push((c, v));
            }
        }
    }
    out.retain(|&(c, _)| c != 0.0);
    out
}

impl MilpModel {
    pub fn new() -> MilpModel {
        MilpModel::default()
    }

    pub fn add_variable(&mut self, var: Variable) -> Result<VarId, ModelError> {
        if !is_valid_name(&var.name) {
            return Err(ModelError::InvalidName(var.name));
        }
        let bad_binary = var.kind == VarKind::Binary && (var.lower < 0.0 || var.upper > 1.0);
        if var.lower.is_nan() || var.upper.is_nan() || var.lower > var.upper || bad_binary {
            return Err(ModelError::InvalidBounds { name: var.name });
        }
        if self.names.contains_key(&var.name) {
            return Err(ModelError::DuplicateVariable(var.name));
        }
        let id = VarId(self.variables.len());
        self.names.insert(var.name.clone(), id);
        self.variables.push(var);
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_variable(Variable {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
        })
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId, ModelError> {
        self.add_variable(Variable {
            name: name.into(),
            kind: VarKind::Continuous,
            lower,
            upper,
        })
    }

    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<(), ModelError> {
        let var = self.variables.get_mut(id.0).ok_or(ModelError::UnknownVariable(id.0))?;
        let bad_binary = var.kind == VarKind::Binary && (lower < 0.0 || upper > 1.0);
        if lower.is_nan() || upper.is_nan() || lower > upper || bad_binary {
            return Err(ModelError::InvalidBounds { name: var.name.clone() });
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    /// Fixes a variable to `value`.
    pub fn fix(&mut self, id: VarId, value: f64) -> Result<(), ModelError> {
        self.set_bounds(id, value, value)
    }

    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (f64, VarId)>,
        sense: Sense,
        rhs: f64,
        tag: impl Into<String>,
    ) -> Result<(), ModelError> {
        let terms = combine(terms);
        if let Some(&(_, v)) = terms.iter().find(|(_, v)| v.0 >= self.variables.len()) {
            return Err(ModelError::UnknownVariable(v.0));
        }
        self.constraints.push(LinearConstraint {
            terms,
            sense,
            rhs,
            tag: tag.into(),
        });
        Ok(())
    }

    pub fn set_objective(&mut self, terms: impl IntoIterator<Item = (f64, VarId)>) -> Result<(), ModelError> {
        let terms = combine(terms);
        if let Some(&(_, v)) = terms.iter().find(|(_, v)| v.0 >= self.variables.len()) {
            return Err(ModelError::UnknownVariable(v.0));
        }
        self.objective = terms;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(f64, VarId)] {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(c, v)| c * values[v.0]).sum()
    }

    /// Every way `values` fails the model by more than `tol`: bounds,
    /// integrality of binaries, and rows. Each entry is (what, amount).
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        if values.len() != self.variables.len() {
            out.push((format!("expected {} values, got {}", self.variables.len(), values.len()), f64::INFINITY));
            return out;
        }
        for (var, &x) in self.variables.iter().zip(values) {
            if !x.is_finite() {
                out.push((format!("{} not finite", var.name), f64::INFINITY));
                continue;
            }
            let below = var.lower - x;
            let above = x - var.upper;
            if below > tol || above > tol {
                out.push((format!("bounds of {}", var.name), below.max(above)));
            }
            if var.kind == VarKind::Binary {
                let frac = (x - x.round()).abs();
                if frac > tol {
                    out.push((format!("integrality of {}", var.name), frac));
                }
            }
        }
        for row in &self.constraints {
            let v = row.violation(values);
            if v > tol {
                out.push((row.tag.clone(), v));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub n_vars: usize,
    pub n_binary: usize,
    pub n_continuous: usize,
    pub n_constraints: usize,
}

pub fn model_stats(model: &MilpModel) -> ModelStats {
    let n_binary = model.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
    ModelStats {
        n_vars: model.variables.len(),
        n_binary,
        n_continuous: model.variables.len() - n_binary,
        n_constraints: model.constraints.len(),
    }
}
