//! Reading solutions back as per-term plans, checking them, and folding a
//! student's edits into the next round.

mod edit;
mod optimize;
mod validate;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, Transcript};
use crate::error::DecodeError;
use crate::grade::Grade;
use crate::model::{GradeEstimates, VarMap};
use crate::solver::Solution;
use crate::term::TermIndex;

pub use edit::{apply_edits, EditAction, EditCommand};
pub use optimize::{optimize, Outcome, PlanError};
pub use validate::{validate, Violation, ViolationKind};

/// Values within this distance of 0 or 1 count as integral.
pub const DECODE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedCourse {
    pub code: String,
    pub title: String,
    pub credits: u32,
    pub difficulty: f64,
    /// Predicted grade, when a rule gave one.
    pub estimate: Option<Grade>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanTerm {
    pub term: TermIndex,
    /// Calendar token such as `FA2024`.
    pub token: String,
    pub courses: Vec<PlannedCourse>,
}

impl PlanTerm {
    pub fn credits(&self) -> u32 {
        self.courses.iter().map(|c| c.credits).sum()
    }

    pub fn difficulty(&self) -> f64 {
        self.courses.iter().map(|c| c.difficulty).sum()
    }
}

/// Courses by term. Passed and transferred courses are listed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub s_max: u32,
    /// First term open for planning.
    pub current: TermIndex,
    pub passed: Vec<PlannedCourse>,
    /// Terms with at least one course, ascending.
    pub terms: Vec<PlanTerm>,
}

impl Plan {
    /// Builds a plan from `(code, term)` placements. Codes must be canonical
    /// catalog codes.
    pub fn from_placements(
        catalog: &Catalog,
        transcript: &Transcript,
        estimates: &GradeEstimates,
        placements: &[(String, TermIndex)],
    ) -> Plan {
        let describe = |code: &str| {
            let c = catalog.course(code).expect("placements use catalog codes");
            PlannedCourse {
                code: c.code.clone(),
                title: c.title.clone(),
                credits: c.credits,
                difficulty: c.difficulty,
                estimate: estimates.get(&c.code),
            }
        };
        let passed = transcript
            .entries()
            .iter()
            .map(|e| PlannedCourse { estimate: None, ..describe(&e.code) })
            .collect();
        let mut by_term: BTreeMap<TermIndex, Vec<PlannedCourse>> = BTreeMap::new();
        for (code, term) in placements {
            by_term.entry(*term).or_default().push(describe(code));
        }
        let cal = catalog.calendar();
        let terms = by_term
            .into_iter()
            .map(|(term, mut courses)| {
                courses.sort_by(|a, b| a.code.cmp(&b.code));
                PlanTerm { term, token: cal.token(term), courses }
            })
            .collect();
        Plan {
            s_max: cal.s_max,
            current: transcript.current_term(),
            passed,
            terms,
        }
    }

    /// `(code, term)` for every planned course, by term then code.
    pub fn placements(&self) -> Vec<(String, TermIndex)> {
        self.terms
            .iter()
            .flat_map(|t| t.courses.iter().map(move |c| (c.code.clone(), t.term)))
            .collect()
    }

    pub fn term_of(&self, code: &str) -> Option<TermIndex> {
        self.terms
            .iter()
            .find(|t| t.courses.iter().any(|c| c.code == code))
            .map(|t| t.term)
    }

    /// Last term holding a course, 0 for an empty plan.
    pub fn completion(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.term.get())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Plain-text table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, term: &str, c: &PlannedCourse| {
            let est = c.estimate.map_or_else(|| "-".to_string(), |g| g.to_string());
            let _ = writeln!(
                out,
                "{term:<8} {:<10} {:<40} {:>3} {:>6.2} {:>5}",
                c.code, c.title, c.credits, c.difficulty, est
            );
        };
        let _ = writeln!(out, "{:<8} {:<10} {:<40} {:>3} {:>6} {:>5}", "term", "code", "title", "cr", "diff", "est");
        for c in &self.passed {
            row(&mut out, "passed", c);
        }
        for t in &self.terms {
            for c in &t.courses {
                row(&mut out, &t.token, c);
            }
        }
        out
    }
}

/// Turns solver output into a plan. A course is scheduled in term `s` when
/// `x_<CODE>_<s>` rounds to 1.
pub fn decode(
    solution: &Solution,
    vars: &VarMap,
    catalog: &Catalog,
    transcript: &Transcript,
    estimates: &GradeEstimates,
) -> Result<Plan, DecodeError> {
    if !solution.has_values() {
        return Err(DecodeError::NotSolved(format!("{:?}", solution.status)));
    }
    let mut placements = Vec::new();
    for (i, course) in catalog.courses().iter().enumerate() {
        for s in 0..=vars.s_max {
            let v = solution.values[vars.taken_in(i, s).index()];
            if (v - v.round()).abs() > DECODE_TOL {
                return Err(DecodeError::FractionalBinary { name: format!("x_{}_{s}", course.code), value: v });
            }
            if s > 0 && v > 0.5 && !transcript.passed(&course.code) {
                placements.push((course.code.clone(), TermIndex::new(s).expect("s >= 1")));
            }
        }
    }
    Ok(Plan::from_placements(catalog, transcript, estimates, &placements))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermTotals {
    pub term: TermIndex,
    pub credits: u32,
    pub difficulty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Every term `1..=s_max`, empty ones included.
    pub per_term: Vec<TermTotals>,
    pub completion: u32,
    /// Largest difference in difficulty between any two terms `1..=s_max`.
    pub max_gap: f64,
    pub total_credits: u32,
    /// Mean predicted grade over scheduled courses above the eligibility
    /// threshold; `None` when there are none.
    pub expected_gpa: Option<f64>,
    pub eligible_scheduled: usize,
}

/// Largest `|difficulty(s) - difficulty(t)|` over terms in `range`.
pub fn difficulty_gap(plan: &Plan, range: std::ops::RangeInclusive<u32>) -> f64 {
    let load = |s: u32| plan.terms.iter().find(|t| t.term.get() == s).map_or(0.0, PlanTerm::difficulty);
    let loads: Vec<f64> = range.map(load).collect();
    let hi = loads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = loads.iter().copied().fold(f64::INFINITY, f64::min);
    if loads.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

pub fn summarize(plan: &Plan, estimates: &GradeEstimates) -> Summary {
    let per_term = TermIndex::range(plan.s_max)
        .map(|term| {
            let t = plan.terms.iter().find(|t| t.term == term);
            TermTotals {
                term,
                credits: t.map_or(0, PlanTerm::credits),
                difficulty: t.map_or(0.0, PlanTerm::difficulty),
            }
        })
        .collect();
    let scheduled_estimates: Vec<f64> = plan
        .terms
        .iter()
        .flat_map(|t| &t.courses)
        .filter_map(|c| estimates.get(&c.code))
        .filter(|g| *g > estimates.threshold)
        .map(Grade::value)
        .collect();
    let expected_gpa = (!scheduled_estimates.is_empty())
        .then(|| scheduled_estimates.iter().sum::<f64>() / scheduled_estimates.len() as f64);
    Summary {
        per_term,
        completion: plan.completion(),
        max_gap: difficulty_gap(plan, 1..=plan.s_max),
        total_credits: plan.passed.iter().chain(plan.terms.iter().flat_map(|t| &t.courses)).map(|c| c.credits).sum(),
        expected_gpa,
        eligible_scheduled: scheduled_estimates.len(),
    }
}
