//! The degree-plan MILP.
//!
//! Binary `x_<CODE>` says a course is taken at all (including before the
//! student's current term), and `x_<CODE>_<s>` that it is taken in term `s`,
//! with `s = 0` standing for transfer or earlier credit. Three continuous
//! variables carry the objective: `D` (last term used), `D_L` (largest
//! difficulty gap between two terms) and `G_e` (predicted grade mass of
//! well-predicted courses).
//!
//! Rows are tagged `eq<N>:<family>:...` after the constraint family that
//! produced them. [`BuildOptions::disabled`] drops whole families, which the
//! test suite uses to check that each family matters.

mod emit;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, GroupKind, Transcript};
use crate::error::BuildError;
use crate::grade::Grade;
use crate::milp::{MilpModel, VarId};
use crate::term::TermIndex;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectivePriority {
    #[default]
    ExpectedGpa,
    FastestCompletion,
}

impl ObjectivePriority {
    /// `(b_G, b_D, b_DL)`.
    pub fn weights(self) -> (f64, f64, f64) {
        match self {
            ObjectivePriority::ExpectedGpa => (-1000.0, 100.0, 1.0),
            ObjectivePriority::FastestCompletion => (-100.0, 1000.0, 1.0),
        }
    }
}

/// What the student asks of this optimization round. Codes may be synonyms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Preferences {
    pub objective: ObjectivePriority,
    pub honors: bool,
    pub summers_off: bool,
    /// Most courses in any term.
    pub max_per_term: Option<u32>,
    /// Most courses, thesis included, in a term where the thesis is taken.
    pub thesis_max: Option<u32>,
    pub desired: BTreeSet<String>,
    pub rejected: BTreeSet<String>,
    pub pins: BTreeMap<String, TermIndex>,
    /// Courses that must be taken in one of the listed terms.
    pub windows: BTreeMap<String, BTreeSet<TermIndex>>,
    pub concentration: Option<String>,
}

/// Rule-predicted grades for courses not yet passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeEstimates {
    pub grades: BTreeMap<String, Grade>,
    /// Courses strictly above this enter the eligible set.
    pub threshold: Grade,
    /// Credit budget for eligible courses; when `None` it is the credit
    /// total still missing for graduation.
    pub credits_remaining: Option<u32>,
}

impl Default for GradeEstimates {
    fn default() -> Self {
        GradeEstimates {
            grades: BTreeMap::new(),
            threshold: DEFAULT_THRESHOLD,
            credits_remaining: None,
        }
    }
}

/// Predicted grades must exceed 2.5 to count towards the expected GPA.
pub const DEFAULT_THRESHOLD: Grade = Grade::from_hundredths_saturating(250);

impl GradeEstimates {
    pub fn new(grades: BTreeMap<String, Grade>) -> GradeEstimates {
        GradeEstimates { grades, ..GradeEstimates::default() }
    }

    pub fn get(&self, code: &str) -> Option<Grade> {
        self.grades.get(code).copied()
    }

    /// Courses with an estimate above the threshold, in code order.
    pub fn eligible(&self) -> impl Iterator<Item = (&str, Grade)> {
        self.grades
            .iter()
            .filter(|(_, g)| **g > self.threshold)
            .map(|(c, g)| (c.as_str(), *g))
    }
}

/// Constraint families, one per equation of the formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Prerequisite,
    Corequisite,
    Level5Gate,
    Level6AfterLevel5,
    Level6AfterAllLevel4,
    Offering,
    TotalCredits,
    Linking,
    LiberalCredits,
    TermCredits,
    Groups,
    Desired,
    Pins,
    SummersOff,
    SoftOrder,
    CoursesPerTerm,
    Thesis,
    Completion,
    BalanceUp,
    BalanceDown,
    GradeMass,
    GradeCredits,
}

impl Family {
    pub const ALL: [Family; 22] = [
        Family::Prerequisite,
        Family::Corequisite,
        Family::Level5Gate,
        Family::Level6AfterLevel5,
        Family::Level6AfterAllLevel4,
        Family::Offering,
        Family::TotalCredits,
        Family::Linking,
        Family::LiberalCredits,
        Family::TermCredits,
        Family::Groups,
        Family::Desired,
        Family::Pins,
        Family::SummersOff,
        Family::SoftOrder,
        Family::CoursesPerTerm,
        Family::Thesis,
        Family::Completion,
        Family::BalanceUp,
        Family::BalanceDown,
        Family::GradeMass,
        Family::GradeCredits,
    ];

    /// Equation number, 1 through 22.
    pub fn number(self) -> u32 {
        Family::ALL.iter().position(|f| *f == self).expect("listed") as u32 + 1
    }

    /// Tag prefix of the family's rows, e.g. `eq7:`.
    pub fn tag_prefix(self) -> String {
        format!("eq{}:", self.number())
    }

    /// Families realized as variable bounds instead of rows.
    pub fn is_bound_family(self) -> bool {
        matches!(self, Family::Offering | Family::SummersOff)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub disabled: BTreeSet<Family>,
}

impl BuildOptions {
    pub fn without(families: impl IntoIterator<Item = Family>) -> BuildOptions {
        BuildOptions { disabled: families.into_iter().collect() }
    }

    pub fn enabled(&self, family: Family) -> bool {
        !self.disabled.contains(&family)
    }
}

/// What a model variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRef {
    Taken(usize),
    TakenIn(usize, u32),
    Completion,
    Balance,
    GradeMass,
}

/// Handles of every model variable plus the derived quantities the builder
/// used, so a solution can be read back.
#[derive(Debug, Clone, PartialEq)]
pub struct VarMap {
    taken: Vec<VarId>,
    taken_in: Vec<Vec<VarId>>,
    pub completion: VarId,
    pub balance: VarId,
    pub grade_mass: VarId,
    pub s_max: u32,
    pub current: TermIndex,
    pub credit_cap: u32,
    /// Course indices of the eligible set.
    pub eligible: Vec<usize>,
    pub credits_remaining: u32,
    reverse: Vec<VarRef>,
}

impl VarMap {
    /// `x_i`.
    pub fn taken(&self, course: usize) -> VarId {
        self.taken[course]
    }

    /// `x_{i,s}` for `s` in `0..=s_max`.
    pub fn taken_in(&self, course: usize, s: u32) -> VarId {
        self.taken_in[course][s as usize]
    }

    pub fn courses(&self) -> usize {
        self.taken.len()
    }

    pub fn describe(&self, id: VarId) -> VarRef {
        self.reverse[id.index()]
    }
}

/// Builds the full model.
pub fn build_model(
    catalog: &Catalog,
    transcript: &Transcript,
    prefs: &Preferences,
    estimates: &GradeEstimates,
) -> Result<(MilpModel, VarMap), BuildError> {
    build_model_with(catalog, transcript, prefs, estimates, &BuildOptions::default())
}

/// [`build_model`] with some constraint families switched off.
pub fn build_model_with(
    catalog: &Catalog,
    transcript: &Transcript,
    prefs: &Preferences,
    estimates: &GradeEstimates,
    options: &BuildOptions,
) -> Result<(MilpModel, VarMap), BuildError> {
    let prefs = normalize_preferences(catalog, transcript, prefs)?;
    emit::Builder::new(catalog, transcript, &prefs, estimates, options)?.build()
}

/// Resolves synonyms and checks that the preferences are self-consistent.
pub fn normalize_preferences(catalog: &Catalog, transcript: &Transcript, prefs: &Preferences) -> Result<Preferences, BuildError> {
    let canon = |code: &str| {
        catalog
            .canonical(code)
            .map(str::to_string)
            .ok_or_else(|| BuildError::InvalidPreferences(format!("unknown course `{code}`")))
    };
    let set = |codes: &BTreeSet<String>| codes.iter().map(|c| canon(c)).collect::<Result<BTreeSet<_>, _>>();
    let desired = set(&prefs.desired)?;
    let rejected = set(&prefs.rejected)?;
    let mut pins = BTreeMap::new();
    for (code, term) in &prefs.pins {
        pins.insert(canon(code)?, *term);
    }
    let mut windows = BTreeMap::new();
    for (code, terms) in &prefs.windows {
        if terms.is_empty() {
            return Err(BuildError::InvalidPreferences(format!("empty term set for {code}")));
        }
        windows.insert(canon(code)?, terms.clone());
    }

    if let Some(code) = desired.intersection(&rejected).next() {
        return Err(BuildError::InvalidPreferences(format!("{code} is both desired and rejected")));
    }
    for code in pins.keys().chain(windows.keys()) {
        if rejected.contains(code) {
            return Err(BuildError::InvalidPreferences(format!("{code} is rejected but placed in a term")));
        }
    }
    for code in &rejected {
        if transcript.passed(code) {
            return Err(BuildError::InvalidPreferences(format!("{code} is already passed and cannot be rejected")));
        }
    }
    if prefs.max_per_term == Some(0) {
        return Err(BuildError::InvalidPreferences("courses per term must be at least 1".into()));
    }
    if prefs.thesis_max == Some(0) {
        return Err(BuildError::InvalidPreferences("thesis term size must be at least 1".into()));
    }
    if let Some(name) = &prefs.concentration {
        let ok = catalog
            .group(name)
            .is_some_and(|g| g.kind == GroupKind::Regular && g.is_concentration());
        if !ok {
            return Err(BuildError::InvalidPreferences(format!("unknown concentration `{name}`")));
        }
    }
    Ok(Preferences {
        desired,
        rejected,
        pins,
        windows,
        ..prefs.clone()
    })
}

#[cfg(test)]
mod tests;
