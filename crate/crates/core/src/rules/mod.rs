//! Quantitative association rules over historical grades.
//!
//! A rule `A>=3.3 & B>=3 -> C>=3.7` says that students who earned at least
//! 3.3 in A and 3 in B tend to earn at least 3.7 in C. Rules are mined from
//! `records.csv` and later fired against one student's transcript to
//! estimate grades in courses not taken yet.

mod io;
mod mine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::Transcript;
use crate::grade::Grade;
use crate::model::GradeEstimates;

pub use io::{parse_records, parse_rules, write_rules, RECORDS_HEADER, RULES_HEADER};
pub use mine::{mine_rules, remove_dominated, MineConfig};

/// Candidate thresholds tried for every atom.
pub const DEFAULT_GRID: [Grade; 7] = [
    Grade::from_hundredths_saturating(200),
    Grade::from_hundredths_saturating(230),
    Grade::from_hundredths_saturating(270),
    Grade::from_hundredths_saturating(300),
    Grade::from_hundredths_saturating(330),
    Grade::from_hundredths_saturating(370),
    Grade::from_hundredths_saturating(400),
];

/// Grades of many students, stored sparsely: a missing course was never
/// taken, which is not the same as a zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradeDataset {
    students: Vec<String>,
    rows: Vec<BTreeMap<String, Grade>>,
}

impl GradeDataset {
    pub fn new() -> GradeDataset {
        GradeDataset::default()
    }

    /// Adds a student. Ids need not be unique; each call is one row.
    pub fn push(&mut self, student: impl Into<String>, grades: BTreeMap<String, Grade>) {
        self.students.push(student.into());
        self.rows.push(grades);
    }

    pub fn n_students(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn students(&self) -> &[String] {
        &self.students
    }

    pub fn rows(&self) -> &[BTreeMap<String, Grade>] {
        &self.rows
    }

    /// Every course code appearing in some row, sorted.
    pub fn courses(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.keys()).collect();
        set.into_iter().cloned().collect()
    }
}

/// `grade(code) >= v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub code: String,
    pub v: Grade,
}

impl Atom {
    pub fn new(code: impl Into<String>, v: Grade) -> Atom {
        Atom { code: code.into(), v }
    }

    /// False when the course is missing from `grades`.
    pub fn holds(&self, grades: &BTreeMap<String, Grade>) -> bool {
        grades.get(&self.code).is_some_and(|g| *g >= self.v)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>={}", self.code, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QRule {
    /// One to three atoms on distinct courses, sorted by code.
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
    pub support: f64,
    pub confidence: f64,
}

impl QRule {
    pub fn fires(&self, grades: &BTreeMap<String, Grade>) -> bool {
        self.antecedents.iter().all(|a| a.holds(grades))
    }
}

impl fmt::Display for QRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self.antecedents.iter().map(Atom::to_string).collect();
        write!(
            f,
            "{} -> {} (support {:.4}, confidence {:.4})",
            lhs.join(" & "),
            self.consequent,
            self.support,
            self.confidence
        )
    }
}

/// Mined rules in a canonical order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<QRule>,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QRule> {
        self.rules.iter()
    }
}

/// Support over all students and confidence among students meeting the
/// antecedents. `None` when no student meets the antecedents or the dataset
/// is empty.
///
/// ```
/// use std::collections::BTreeMap;
/// use degreeplan::rules::{support_confidence, Atom, GradeDataset};
///
/// let mut data = GradeDataset::new();
/// for (i, (a, b)) in [("3.3", "3.7"), ("3.7", "3.0"), ("2.0", "3.7"), ("3.3", "2.0")].iter().enumerate() {
///     let row = BTreeMap::from([("A".to_string(), a.parse().unwrap()), ("B".to_string(), b.parse().unwrap())]);
///     data.push(i.to_string(), row);
/// }
/// let three = "3".parse().unwrap();
/// let (s, c) = support_confidence(&[Atom::new("A", three)], &Atom::new("B", three), &data).unwrap();
/// assert_eq!(s, 0.5);
/// assert_eq!(c, 2.0 / 3.0);
/// ```
pub fn support_confidence(antecedents: &[Atom], consequent: &Atom, data: &GradeDataset) -> Option<(f64, f64)> {
    let mut matched = 0usize;
    let mut joint = 0usize;
    for row in data.rows() {
        if antecedents.iter().all(|a| a.holds(row)) {
            matched += 1;
            if consequent.holds(row) {
                joint += 1;
            }
        }
    }
    if matched == 0 {
        return None;
    }
    Some((ratio(joint, data.n_students()), ratio(joint, matched)))
}

pub(crate) fn ratio(num: usize, den: usize) -> f64 {
    num as f64 / den as f64
}

/// Highest consequent grade over the rules that fire on `grades`, for every
/// course not in `grades`. Courses no rule speaks for get no estimate.
pub fn predict_grades(rules: &RuleSet, grades: &BTreeMap<String, Grade>) -> BTreeMap<String, Grade> {
    let mut out: BTreeMap<String, Grade> = BTreeMap::new();
    for rule in rules.iter() {
        let target = &rule.consequent;
        if grades.contains_key(&target.code) || !rule.fires(grades) {
            continue;
        }
        let slot = out.entry(target.code.clone()).or_insert(target.v);
        if target.v > *slot {
            *slot = target.v;
        }
    }
    out
}

/// [`predict_grades`] over a transcript, with the default eligibility
/// threshold. An empty transcript gives no estimates.
pub fn predict(rules: &RuleSet, transcript: &Transcript) -> GradeEstimates {
    let grades: BTreeMap<String, Grade> = transcript
        .entries()
        .iter()
        .map(|e| (e.code.clone(), e.grade))
        .collect();
    GradeEstimates::new(predict_grades(rules, &grades))
}
