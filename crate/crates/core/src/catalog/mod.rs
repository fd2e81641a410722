//! Course catalog, course groups, the term calendar and student transcripts.
//!
//! A [`Catalog`] is immutable once built. Requisite expressions and group
//! members are stored under canonical course codes; synonyms are only used
//! for lookup.

mod parse;
mod requisite;
mod transcript;
mod validate;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CatalogError;
use crate::term::{Anchor, TermIndex};

pub use parse::{parse_calendar, parse_courses, parse_groups, COURSES_HEADER, GROUPS_HEADER};
pub use requisite::RequisiteExpr;
pub use transcript::{parse_transcript, Transcript, TranscriptEntry, TRANSCRIPT_HEADER};
pub use validate::{validate_catalog, Diagnostic, DiagnosticKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CourseFlag {
    LiberalEducation,
    Level4,
    Level5,
    Level6,
    Honors,
    Thesis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L4,
    L5,
    L6,
}

impl Level {
    pub fn flag(self) -> CourseFlag {
        match self {
            Level::L4 => CourseFlag::Level4,
            Level::L5 => CourseFlag::Level5,
            Level::L6 => CourseFlag::Level6,
        }
    }

    fn from_group_name(name: &str) -> Option<Level> {
        match name {
            "L4" => Some(Level::L4),
            "L5" => Some(Level::L5),
            "L6" => Some(Level::L6),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Course {
    pub id: u32,
    pub code: String,
    pub synonyms: Vec<String>,
    pub title: String,
    pub display_name: Option<String>,
    pub credits: u32,
    pub difficulty: f64,
    pub prereq: RequisiteExpr,
    pub coreq: RequisiteExpr,
    pub offered: BTreeSet<TermIndex>,
    pub flags: BTreeSet<CourseFlag>,
}

impl Course {
    /// A bare course with no requisites, offerings or flags.
    pub fn new(id: u32, code: &str, credits: u32, difficulty: f64) -> Course {
        Course {
            id,
            code: code.to_string(),
            synonyms: Vec::new(),
            title: code.to_string(),
            display_name: None,
            credits,
            difficulty,
            prereq: RequisiteExpr::none(),
            coreq: RequisiteExpr::none(),
            offered: BTreeSet::new(),
            flags: BTreeSet::new(),
        }
    }

    pub fn has(&self, flag: CourseFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn is_offered(&self, term: TermIndex) -> bool {
        self.offered.contains(&term)
    }

    pub fn level(&self) -> Option<Level> {
        [Level::L4, Level::L5, Level::L6]
            .into_iter()
            .find(|l| self.has(l.flag()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupMode {
    AtLeast,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    Regular,
    SoftOrder,
    Honors,
    LevelSet,
    LiberalEd,
    Thesis,
}

impl GroupKind {
    /// Group semantics are carried by the name.
    pub fn from_name(name: &str) -> GroupKind {
        if name.starts_with("softorder") {
            GroupKind::SoftOrder
        } else if name.starts_with("HonorGroup") {
            GroupKind::Honors
        } else if Level::from_group_name(name).is_some() {
            GroupKind::LevelSet
        } else if name == "LE" {
            GroupKind::LiberalEd
        } else if name == "Thesis" {
            GroupKind::Thesis
        } else {
            GroupKind::Regular
        }
    }
}

/// Prefix marking a concentration (pathway) group, which only applies when
/// the student selects it.
pub const CONCENTRATION_PREFIX: &str = "conc-";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CourseGroup {
    pub name: String,
    /// Member codes; for soft-order groups the order is `[before, after]`.
    pub members: Vec<String>,
    pub count: u32,
    pub mode: GroupMode,
    pub per_term: bool,
    pub kind: GroupKind,
}

impl CourseGroup {
    pub fn new(name: &str, mode: GroupMode, count: u32, per_term: bool, members: &[&str]) -> CourseGroup {
        CourseGroup {
            name: name.to_string(),
            members: members.iter().map(|m| m.to_string()).collect(),
            count,
            mode,
            per_term,
            kind: GroupKind::from_name(name),
        }
    }

    pub fn is_concentration(&self) -> bool {
        self.kind == GroupKind::Regular && self.name.starts_with(CONCENTRATION_PREFIX)
    }

    /// Ordered pair of a soft-order group.
    pub fn soft_order_pair(&self) -> Option<(&str, &str)> {
        match (self.kind, self.members.as_slice()) {
            (GroupKind::SoftOrder, [before, after]) => Some((before, after)),
            _ => None,
        }
    }
}

/// Institution-wide limits and the term numbering anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calendar {
    pub anchor: Anchor,
    pub s_max: u32,
    pub total_credits: u32,
    pub liberal_credits: u32,
    pub max_credits: u32,
    pub max_credits_honors: u32,
    /// Term the student is planning from; defaults to the term after the
    /// latest transcript entry.
    pub current: Option<TermIndex>,
}

impl Calendar {
    pub fn new(anchor: Anchor) -> Calendar {
        Calendar {
            anchor,
            s_max: 25,
            total_credits: 121,
            liberal_credits: 43,
            max_credits: 17,
            max_credits_honors: 20,
            current: None,
        }
    }

    pub fn credit_cap(&self, honors: bool) -> u32 {
        if honors {
            self.max_credits_honors
        } else {
            self.max_credits
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = TermIndex> {
        TermIndex::range(self.s_max)
    }

    pub fn token(&self, term: TermIndex) -> String {
        self.anchor.token(term)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    calendar: Calendar,
    courses: Vec<Course>,
    groups: Vec<CourseGroup>,
    #[serde(skip)]
    lookup: HashMap<String, usize>,
}

/// Codes are a letter followed by letters and digits. Underscores are kept
/// out so `x_<code>_<term>` variable names stay unambiguous.
pub(crate) fn is_valid_code(code: &str) -> bool {
    let mut chars = code.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

impl Catalog {
    /// Assembles a catalog: resolves synonyms in requisites and groups,
    /// derives course flags from the special groups, and orders courses by
    /// id and groups by name.
    pub fn new(calendar: Calendar, mut courses: Vec<Course>, mut groups: Vec<CourseGroup>) -> Result<Catalog, CatalogError> {
        courses.sort_by_key(|c| c.id);
        for pair in courses.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(CatalogError::DuplicateId(pair[0].id));
            }
        }

        let mut lookup = HashMap::new();
        for (idx, course) in courses.iter().enumerate() {
            if course.credits == 0 {
                return Err(CatalogError::Credits { course: course.code.clone() });
            }
            if !(0.0..=10.0).contains(&course.difficulty) {
                return Err(CatalogError::Difficulty {
                    course: course.code.clone(),
                    value: course.difficulty,
                });
            }
            for code in std::iter::once(&course.code).chain(&course.synonyms) {
                if !is_valid_code(code) {
                    return Err(CatalogError::InvalidCode(code.clone()));
                }
                if lookup.insert(code.clone(), idx).is_some() {
                    return Err(CatalogError::DuplicateCode(code.clone()));
                }
            }
        }

        let codes: Vec<String> = courses.iter().map(|c| c.code.clone()).collect();
        let canonical = |code: &str, context: &str| -> Result<String, CatalogError> {
            lookup
                .get(code)
                .map(|&i| codes[i].clone())
                .ok_or_else(|| CatalogError::UnknownCode {
                    context: context.to_string(),
                    code: code.to_string(),
                })
        };

        let mut resolved = Vec::with_capacity(courses.len());
        for course in &courses {
            let ctx = format!("course {}", course.code);
            let prereq = course.prereq.try_map_codes(|c| canonical(c, &ctx))?;
            let coreq = course.coreq.try_map_codes(|c| canonical(c, &ctx))?;
            resolved.push((prereq, coreq));
        }
        for (course, (prereq, coreq)) in courses.iter_mut().zip(resolved) {
            course.prereq = prereq;
            course.coreq = coreq;
        }

        groups.sort_by(|a, b| a.name.cmp(&b.name));
        for pair in groups.windows(2) {
            if pair[0].name == pair[1].name {
                return Err(CatalogError::DuplicateGroup(pair[0].name.clone()));
            }
        }
        for group in &mut groups {
            group.kind = GroupKind::from_name(&group.name);
            let ctx = format!("group {}", group.name);
            let mut members = Vec::with_capacity(group.members.len());
            for m in &group.members {
                let code = canonical(m, &ctx)?;
                if !members.contains(&code) {
                    members.push(code);
                }
            }
            group.members = members;
            check_group_shape(group)?;
        }

        for course in &mut courses {
            course.flags.retain(|f| {
                !matches!(
                    f,
                    CourseFlag::Level4 | CourseFlag::Level5 | CourseFlag::Level6
                )
            });
        }
        for group in &groups {
            let flag = match group.kind {
                GroupKind::LevelSet => Level::from_group_name(&group.name).map(Level::flag),
                GroupKind::Honors => Some(CourseFlag::Honors),
                GroupKind::LiberalEd => Some(CourseFlag::LiberalEducation),
                GroupKind::Thesis => Some(CourseFlag::Thesis),
                GroupKind::Regular | GroupKind::SoftOrder => None,
            };
            if let Some(flag) = flag {
                for m in &group.members {
                    let idx = lookup[m.as_str()];
                    courses[idx].flags.insert(flag);
                }
            }
        }
        for course in &courses {
            let levels = [CourseFlag::Level4, CourseFlag::Level5, CourseFlag::Level6]
                .iter()
                .filter(|f| course.has(**f))
                .count();
            if levels > 1 {
                return Err(CatalogError::LevelConflict(course.code.clone()));
            }
        }

        Ok(Catalog { calendar, courses, groups, lookup })
    }

    /// Loads `calendar.cfg`, `courses.csv` and `groups.csv` from a directory.
    pub fn load(dir: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| CatalogError::Io { path, source })
        };
        let calendar = parse_calendar(&read("calendar.cfg")?)?;
        let courses = parse_courses(&read("courses.csv")?, &calendar)?;
        let groups = if dir.join("groups.csv").exists() {
            parse_groups(&read("groups.csv")?)?
        } else {
            Vec::new()
        };
        Catalog::new(calendar, courses, groups)
    }

    pub fn calendar(&self) -> &Calendar {
        &self.calendar
    }

    pub fn courses(&self) -> &[Course] {
        &self.courses
    }

    pub fn groups(&self) -> &[CourseGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.courses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.courses.is_empty()
    }

    /// Index of a course by code or synonym.
    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.lookup.get(code).copied()
    }

    pub fn course(&self, code: &str) -> Option<&Course> {
        self.index_of(code).map(|i| &self.courses[i])
    }

    pub fn canonical(&self, code: &str) -> Option<&str> {
        self.course(code).map(|c| c.code.as_str())
    }

    pub fn group(&self, name: &str) -> Option<&CourseGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Indices of courses carrying `flag`, in catalog order.
    pub fn with_flag(&self, flag: CourseFlag) -> Vec<usize> {
        (0..self.courses.len()).filter(|&i| self.courses[i].has(flag)).collect()
    }

    pub fn level_set(&self, level: Level) -> Vec<usize> {
        self.with_flag(level.flag())
    }

    /// Regular groups that constrain every plan (concentration groups are
    /// excluded unless selected).
    pub fn active_groups<'a>(&'a self, concentration: Option<&'a str>) -> impl Iterator<Item = &'a CourseGroup> + 'a {
        self.groups.iter().filter(move |g| {
            g.kind == GroupKind::Regular && (!g.is_concentration() || Some(g.name.as_str()) == concentration)
        })
    }
}

pub(crate) fn check_group_shape(group: &CourseGroup) -> Result<(), CatalogError> {
    if group.count as usize > group.members.len() {
        return Err(CatalogError::GroupCount {
            group: group.name.clone(),
            count: group.count,
            members: group.members.len(),
        });
    }
    if group.kind == GroupKind::SoftOrder && group.members.len() != 2 {
        return Err(CatalogError::SoftOrderArity {
            group: group.name.clone(),
            members: group.members.len(),
        });
    }
    Ok(())
}
