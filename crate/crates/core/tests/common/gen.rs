//! Random small instances for the enumeration oracle.

use std::collections::{BTreeMap, BTreeSet};

use degreeplan::catalog::{Calendar, Catalog, Course, CourseGroup, GroupMode, RequisiteExpr, Transcript, TranscriptEntry};
use degreeplan::grade::Grade;
use degreeplan::model::{GradeEstimates, Preferences};
use degreeplan::term::{Anchor, TermIndex};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Instance {
    pub catalog: Catalog,
    pub transcript: Transcript,
    pub prefs: Preferences,
    pub estimates: GradeEstimates,
}

fn dnf(rng: &mut impl Rng, pool: &[String]) -> RequisiteExpr {
    let disjuncts = rng.gen_range(1..=2);
    let mut out: Vec<Vec<String>> = Vec::new();
    for _ in 0..disjuncts {
        let size = rng.gen_range(1..=2.min(pool.len()));
        out.push(pool.choose_multiple(rng, size).cloned().collect());
    }
    RequisiteExpr::from_dnf(out)
}

/// At most 6 courses and 8 terms.
pub fn instance(rng: &mut impl Rng) -> Instance {
    let n = rng.gen_range(3..=6);
    let s_max = rng.gen_range(3..=8);
    let codes: Vec<String> = (1..=n).map(|i| format!("C{i}")).collect();
    let mut courses = Vec::new();
    for (i, code) in codes.iter().enumerate() {
        let mut offered: BTreeSet<TermIndex> = TermIndex::range(s_max).filter(|_| rng.gen_bool(0.6)).collect();
        if offered.is_empty() {
            offered.insert(TermIndex::new(rng.gen_range(1..=s_max)).unwrap());
        }
        let earlier = &codes[..i];
        let prereq = if !earlier.is_empty() && rng.gen_bool(0.5) { dnf(rng, earlier) } else { RequisiteExpr::none() };
        let coreq = if !earlier.is_empty() && rng.gen_bool(0.15) {
            RequisiteExpr::from_dnf([[earlier.choose(rng).unwrap().clone()]])
        } else {
            RequisiteExpr::none()
        };
        courses.push(Course {
            prereq,
            coreq,
            offered,
            ..Course::new(i as u32 + 1, code, rng.gen_range(1..=4), f64::from(rng.gen_range(0..=6)))
        });
    }
    let total_all: u32 = courses.iter().map(|c| c.credits).sum();

    let mut groups = Vec::new();
    let pick = |rng: &mut dyn rand::RngCore, k: usize| -> Vec<&str> {
        let mut v: Vec<&str> = codes.iter().map(String::as_str).collect();
        v.shuffle(rng);
        v.truncate(k);
        v
    };
    let mut liberal = 0;
    if rng.gen_bool(0.25) {
        let members = pick(rng, 2);
        liberal = rng.gen_range(1..=3);
        groups.push(CourseGroup::new("LE", GroupMode::AtLeast, 0, false, &members));
    }
    if rng.gen_bool(0.3) {
        let size = rng.gen_range(2..=3);
        let members = pick(rng, size);
        let mode = if rng.gen_bool(0.5) { GroupMode::AtLeast } else { GroupMode::Exact };
        groups.push(CourseGroup::new("core", mode, rng.gen_range(1..=2), false, &members));
    }
    if rng.gen_bool(0.15) {
        let members = pick(rng, 3);
        groups.push(CourseGroup::new("spread", GroupMode::AtLeast, 1, true, &members));
    }
    if rng.gen_bool(0.2) {
        let members = pick(rng, 2);
        groups.push(CourseGroup::new("softorder-x", GroupMode::AtLeast, 0, false, &members));
    }
    let thesis = rng.gen_bool(0.1);
    if thesis {
        let members = pick(rng, 1);
        groups.push(CourseGroup::new("Thesis", GroupMode::AtLeast, 0, false, &members));
    }
    if n == 6 && rng.gen_bool(0.1) {
        groups.push(CourseGroup::new("L4", GroupMode::AtLeast, 0, false, &["C1", "C2", "C3", "C4"]));
        groups.push(CourseGroup::new("L5", GroupMode::AtLeast, 0, false, &["C5"]));
    }

    let cal = Calendar {
        s_max,
        total_credits: (total_all as f64 * rng.gen_range(0.2..0.8)) as u32,
        liberal_credits: liberal,
        max_credits: rng.gen_range(3..=9),
        max_credits_honors: 12,
        ..Calendar::new(Anchor::new(2022))
    };
    let catalog = Catalog::new(cal, courses, groups).unwrap();

    let mut passed = Vec::new();
    let mut current = None;
    if rng.gen_bool(0.3) {
        let first = &catalog.courses()[0];
        if first.prereq.is_empty() && first.coreq.is_empty() {
            passed.push(TranscriptEntry {
                code: first.code.clone(),
                grade: Grade::from_hundredths(rng.gen_range(200..=400)).unwrap(),
                term: None,
            });
        }
        current = Some(TermIndex::new(rng.gen_range(1..=2.min(s_max))).unwrap());
    }
    let transcript = Transcript::new(passed, current, &catalog).unwrap();

    let open: Vec<&str> = codes.iter().map(String::as_str).filter(|c| !transcript.passed(c)).collect();
    let mut prefs = Preferences {
        summers_off: rng.gen_bool(0.2),
        max_per_term: rng.gen_bool(0.2).then(|| rng.gen_range(1..=3)),
        thesis_max: (thesis && rng.gen_bool(0.6)).then(|| rng.gen_range(1..=2)),
        ..Preferences::default()
    };
    let mut chosen: Vec<&str> = open.clone();
    chosen.shuffle(rng);
    let mut chosen = chosen.into_iter();
    if rng.gen_bool(0.2) {
        prefs.desired.extend(chosen.next().map(str::to_string));
    }
    if rng.gen_bool(0.1) {
        if let Some(c) = chosen.next() {
            let s = rng.gen_range(transcript.current_term().get()..=s_max);
            prefs.pins.insert(c.to_string(), TermIndex::new(s).unwrap());
        }
    }
    if rng.gen_bool(0.1) {
        if let Some(c) = chosen.next() {
            let w: BTreeSet<TermIndex> = (0..2).map(|_| TermIndex::new(rng.gen_range(1..=s_max)).unwrap()).collect();
            prefs.windows.insert(c.to_string(), w);
        }
    }
    if rng.gen_bool(0.1) {
        prefs.rejected.extend(chosen.next().map(str::to_string));
    }

    let mut grades = BTreeMap::new();
    for c in &codes {
        if rng.gen_bool(0.5) {
            grades.insert(c.clone(), Grade::from_hundredths(rng.gen_range(200..=400)).unwrap());
        }
    }
    Instance { catalog, transcript, prefs, estimates: GradeEstimates::new(grades) }
}
