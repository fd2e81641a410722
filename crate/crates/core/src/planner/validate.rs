//! Checks a plan against the degree rules directly, without the MILP.
//!
//! This deliberately re-derives every rule from the catalog so that it can
//! certify solver output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Plan;
use crate::catalog::{Catalog, CourseFlag, GroupKind, GroupMode, Level, Transcript};
use crate::model::Preferences;
use crate::prereq::may_register;
use crate::term::TermIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    UnknownCourse,
    Duplicate,
    AlreadyPassed,
    OutsideHorizon,
    PastTerm,
    Requisite,
    Level,
    NotOffered,
    TotalCredits,
    LiberalCredits,
    TermCredits,
    Group,
    Desired,
    Pin,
    Window,
    Rejected,
    Honors,
    SummersOff,
    SoftOrder,
    CoursesPerTerm,
    Thesis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub course: Option<String>,
    pub term: Option<TermIndex>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(c) = &self.course {
            write!(f, " {c}")?;
        }
        if let Some(t) = self.term {
            write!(f, " at s={t}")?;
        }
        write!(f, ": {}", self.message)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, kind: ViolationKind, course: Option<&str>, term: Option<TermIndex>, message: String) {
        self.0.push(Violation { kind, course: course.map(str::to_string), term, message });
    }
}

/// Every rule the plan breaks; empty iff the plan is valid.
pub fn validate(plan: &Plan, catalog: &Catalog, transcript: &Transcript, prefs: &Preferences) -> Vec<Violation> {
    use ViolationKind as K;
    let mut r = Report(Vec::new());
    let cal = catalog.calendar();
    let s_n = transcript.current_term();
    let canon = |code: &str| catalog.canonical(code).unwrap_or(code).to_string();

    // completion term of every course: 0 for passed ones
    let mut done: BTreeMap<String, u32> = BTreeMap::new();
    for e in transcript.entries() {
        done.insert(canon(&e.code), 0);
    }
    let mut by_term: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (code, term) in plan.placements() {
        let s = term.get();
        if catalog.course(&code).is_none() {
            r.push(K::UnknownCourse, Some(&code), Some(term), "not in the catalog".into());
            continue;
        }
        let code = canon(&code);
        if !seen.insert(code.clone()) {
            r.push(K::Duplicate, Some(&code), Some(term), "scheduled more than once".into());
            continue;
        }
        if transcript.passed(&code) {
            r.push(K::AlreadyPassed, Some(&code), Some(term), "already on the transcript".into());
            continue;
        }
        if s > cal.s_max {
            r.push(K::OutsideHorizon, Some(&code), Some(term), format!("beyond the last term {}", cal.s_max));
        }
        if term < s_n {
            r.push(K::PastTerm, Some(&code), Some(term), format!("before the current term {s_n}"));
        }
        done.insert(code.clone(), s);
        by_term.entry(s).or_default().push(code);
    }
    let taken = |code: &str| done.contains_key(code);
    let completed_by = |code: &str, last: u32| done.get(code).is_some_and(|&t| t <= last);

    for (&s, codes) in &by_term {
        let term = TermIndex::new(s).expect("planned terms are >= 1");
        let last = term.last_completed_before();
        let concurrent: BTreeSet<String> = codes.iter().cloned().collect();
        let mut credits = 0;
        for code in codes {
            let course = catalog.course(code).expect("checked above");
            credits += course.credits;
            if !may_register(catalog, code, term, &done, &concurrent).expect("catalog code") {
                r.push(K::Requisite, Some(code), Some(term), "requisites not met".into());
            }
            if !course.is_offered(term) {
                r.push(K::NotOffered, Some(code), Some(term), "not offered in this term".into());
            }
            if course.has(CourseFlag::Honors) && !prefs.honors {
                r.push(K::Honors, Some(code), Some(term), "honors course in a regular plan".into());
            }
            if prefs.summers_off && term.season().is_summer() {
                r.push(K::SummersOff, Some(code), Some(term), "summer term while summers are off".into());
            }
            let count_done = |level: Level| {
                catalog
                    .level_set(level)
                    .iter()
                    .filter(|&&i| completed_by(&catalog.courses()[i].code, last))
                    .count()
            };
            match course.level() {
                Some(Level::L5) if count_done(Level::L4) < 4 => {
                    r.push(K::Level, Some(code), Some(term), "needs four Level-4 courses first".into());
                }
                Some(Level::L6) => {
                    let all_l4 = catalog.level_set(Level::L4).len();
                    if count_done(Level::L5) < 4 || count_done(Level::L4) < all_l4 {
                        r.push(K::Level, Some(code), Some(term), "needs all Level-4 and four Level-5 courses first".into());
                    }
                }
                _ => {}
            }
        }
        let cap = cal.credit_cap(prefs.honors);
        if credits > cap {
            r.push(K::TermCredits, None, Some(term), format!("{credits} credits exceed the cap of {cap}"));
        }
        if let Some(t_mx) = prefs.max_per_term {
            if codes.len() > t_mx as usize {
                r.push(K::CoursesPerTerm, None, Some(term), format!("{} courses exceed {t_mx}", codes.len()));
            }
        }
        if let Some(theta) = prefs.thesis_max {
            for code in codes {
                if catalog.course(code).is_some_and(|c| c.has(CourseFlag::Thesis)) && codes.len() > theta as usize {
                    r.push(K::Thesis, Some(code), Some(term), format!("{} courses alongside the thesis, limit {theta}", codes.len()));
                }
            }
        }
    }

    let credits_of = |pred: &dyn Fn(&crate::catalog::Course) -> bool| -> u32 {
        done.keys()
            .filter_map(|c| catalog.course(c))
            .filter(|c| pred(c))
            .map(|c| c.credits)
            .sum()
    };
    let total = credits_of(&|_| true);
    if total < cal.total_credits {
        r.push(K::TotalCredits, None, None, format!("{total} credits, {} required", cal.total_credits));
    }
    let liberal = credits_of(&|c| c.has(CourseFlag::LiberalEducation));
    if liberal < cal.liberal_credits {
        r.push(K::LiberalCredits, None, None, format!("{liberal} liberal-education credits, {} required", cal.liberal_credits));
    }

    for g in catalog.groups() {
        let applies = match g.kind {
            GroupKind::Regular => !g.name.starts_with(crate::catalog::CONCENTRATION_PREFIX) || prefs.concentration.as_deref() == Some(&g.name),
            _ => false,
        };
        if applies {
            if g.per_term {
                for (&s, codes) in &by_term {
                    let n = codes.iter().filter(|c| g.members.contains(c)).count();
                    if n > g.count as usize {
                        let term = TermIndex::new(s).ok();
                        r.push(K::Group, None, term, format!("{n} courses of {} in one term, limit {}", g.name, g.count));
                    }
                }
            } else {
                let n = g.members.iter().filter(|m| taken(m)).count();
                let ok = match g.mode {
                    GroupMode::AtLeast => n >= g.count as usize,
                    GroupMode::Exact => n == g.count as usize,
                };
                if !ok {
                    r.push(K::Group, None, None, format!("{n} courses of {}, {:?} {} required", g.name, g.mode, g.count));
                }
            }
        }
        if g.kind == GroupKind::SoftOrder && g.members.len() == 2 {
            let (before, after) = (&g.members[0], &g.members[1]);
            if let (Some(&tb), Some(&ta)) = (done.get(before), done.get(after)) {
                if ta > 0 {
                    let last = TermIndex::new(ta).expect("planned").last_completed_before();
                    if tb > last {
                        r.push(
                            K::SoftOrder,
                            Some(after),
                            TermIndex::new(ta).ok(),
                            format!("taken before {before}, which is in the plan"),
                        );
                    }
                }
            }
        }
    }

    for code in &prefs.desired {
        let code = canon(code);
        if !taken(&code) {
            r.push(K::Desired, Some(&code), None, "desired course missing".into());
        }
    }
    for (code, term) in &prefs.pins {
        let code = canon(code);
        if done.get(&code) != Some(&term.get()) {
            r.push(K::Pin, Some(&code), Some(*term), "not in its pinned term".into());
        }
    }
    for (code, terms) in &prefs.windows {
        let code = canon(code);
        let ok = done.get(&code).is_some_and(|&s| s > 0 && terms.iter().any(|t| t.get() == s));
        if !ok {
            r.push(K::Window, Some(&code), None, "not in one of its chosen terms".into());
        }
    }
    for code in &prefs.rejected {
        let code = canon(code);
        if let Some(&s) = done.get(&code) {
            if s > 0 {
                r.push(K::Rejected, Some(&code), TermIndex::new(s).ok(), "rejected course is planned".into());
            }
        }
    }
    r.0
}
