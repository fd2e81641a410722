//! Requisite normalization and the semantic registration check.
//!
//! The MILP encodes each requisite clause as one row, so expressions are
//! turned into conjunctive normal form first. [`may_register`] evaluates the
//! same rule directly on a completion history and is used by the plan
//! validator.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::catalog::{Catalog, RequisiteExpr};
use crate::error::UnknownCourse;
use crate::term::TermIndex;

/// A requisite as an AND of OR-clauses. No clauses means no requirement.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CnfRequisite {
    clauses: Vec<Vec<String>>,
}

impl CnfRequisite {
    pub fn clauses(&self) -> &[Vec<String>] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn satisfied_by(&self, mut holds: impl FnMut(&str) -> bool) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|code| holds(code)))
    }
}

/// Distributes the DNF into CNF, then drops repeated codes, repeated clauses
/// and clauses that contain another clause.
///
/// ```
/// use degreeplan::catalog::RequisiteExpr;
/// use degreeplan::prereq::dnf_to_cnf;
///
/// let expr = RequisiteExpr::parse("ITC2088 & (ITC2197 | ITC3234)").unwrap();
/// let cnf = dnf_to_cnf(&expr);
/// assert_eq!(cnf.clauses(), &[vec!["ITC2088"], vec!["ITC2197", "ITC3234"]]);
/// ```
pub fn dnf_to_cnf(expr: &RequisiteExpr) -> CnfRequisite {
    let mut clauses: Vec<Vec<String>> = Vec::new();
    for conj in expr.disjuncts() {
        if clauses.is_empty() {
            clauses = conj.iter().map(|c| vec![c.clone()]).collect();
            continue;
        }
        let mut next = Vec::with_capacity(clauses.len() * conj.len());
        for clause in &clauses {
            for code in conj {
                let mut extended = clause.clone();
                if !extended.contains(code) {
                    extended.push(code.clone());
                }
                next.push(extended);
            }
        }
        clauses = absorb(next);
    }
    let mut clauses = absorb(clauses);
    for c in &mut clauses {
        c.sort();
    }
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    CnfRequisite { clauses }
}

fn absorb(clauses: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let subset = |a: &[String], b: &[String]| a.iter().all(|x| b.contains(x));
    let mut keep: Vec<Vec<String>> = Vec::with_capacity(clauses.len());
    for clause in clauses {
        if keep.iter().any(|k| subset(k, &clause)) {
            continue;
        }
        keep.retain(|k| !subset(&clause, k));
        keep.push(clause);
    }
    keep
}

/// Whether `code` may be taken in term `s`, given completion terms in
/// `history` (0 for transfer credit) and the courses taken in `s` itself.
///
/// A prerequisite clause needs a member completed by `s - k_of(s)`; a
/// co-requisite clause also accepts a member in `concurrent`.
pub fn may_register(
    catalog: &Catalog,
    code: &str,
    s: TermIndex,
    history: &BTreeMap<String, u32>,
    concurrent: &BTreeSet<String>,
) -> Result<bool, UnknownCourse> {
    let course = catalog.course(code).ok_or_else(|| UnknownCourse(code.to_string()))?;
    let cutoff = s.last_completed_before();
    let done = |c: &str| {
        let canonical = catalog.canonical(c).unwrap_or(c);
        history.get(canonical).is_some_and(|&t| t <= cutoff)
    };
    let prereq_ok = dnf_to_cnf(&course.prereq).satisfied_by(done);
    let coreq_ok = dnf_to_cnf(&course.coreq).satisfied_by(|c| done(c) || concurrent.contains(c));
    Ok(prereq_ok && coreq_ok)
}
