//! Terse catalog construction.

use std::collections::BTreeSet;

use degreeplan::catalog::{Calendar, Catalog, Course, CourseGroup, GroupMode, RequisiteExpr, Transcript, TranscriptEntry};
use degreeplan::term::{Anchor, TermIndex};

pub fn t(s: u32) -> TermIndex {
    TermIndex::new(s).unwrap()
}

pub fn terms(list: &[u32]) -> BTreeSet<TermIndex> {
    list.iter().map(|&s| t(s)).collect()
}

pub fn calendar(s_max: u32, total: u32, liberal: u32, cap: u32) -> Calendar {
    Calendar {
        s_max,
        total_credits: total,
        liberal_credits: liberal,
        max_credits: cap,
        max_credits_honors: cap + 3,
        ..Calendar::new(Anchor::new(2022))
    }
}

/// Course offered in every term up to `s_max` unless `offered` is given.
pub struct C<'a> {
    pub code: String,
    pub credits: u32,
    pub difficulty: f64,
    pub prereq: &'a str,
    pub coreq: &'a str,
    pub offered: Option<&'a [u32]>,
}

pub fn c(code: &str, credits: u32, difficulty: f64) -> C<'static> {
    C { code: code.to_string(), credits, difficulty, prereq: "", coreq: "", offered: None }
}

impl<'a> C<'a> {
    pub fn pre(mut self, p: &'a str) -> Self {
        self.prereq = p;
        self
    }
    pub fn co(mut self, p: &'a str) -> Self {
        self.coreq = p;
        self
    }
    pub fn at(mut self, offered: &'a [u32]) -> Self {
        self.offered = Some(offered);
        self
    }
}

pub fn group(name: &str, mode: GroupMode, count: u32, per_term: bool, members: &[&str]) -> CourseGroup {
    CourseGroup::new(name, mode, count, per_term, members)
}

pub fn catalog(cal: Calendar, courses: Vec<C<'_>>, groups: Vec<CourseGroup>) -> Catalog {
    let s_max = cal.s_max;
    let courses = courses
        .into_iter()
        .enumerate()
        .map(|(i, c)| Course {
            prereq: RequisiteExpr::parse(c.prereq).unwrap(),
            coreq: RequisiteExpr::parse(c.coreq).unwrap(),
            offered: match c.offered {
                Some(list) => terms(list),
                None => TermIndex::range(s_max).collect(),
            },
            ..Course::new(i as u32 + 1, &c.code, c.credits, c.difficulty)
        })
        .collect();
    Catalog::new(cal, courses, groups).unwrap()
}

/// Passed courses `(code, hundredths)`, planning from `current`.
pub fn transcript(cat: &Catalog, passed: &[(&str, u16)], current: Option<u32>) -> Transcript {
    let entries = passed
        .iter()
        .map(|&(code, g)| TranscriptEntry {
            code: code.to_string(),
            grade: degreeplan::grade::Grade::from_hundredths(g).unwrap(),
            term: None,
        })
        .collect();
    Transcript::new(entries, current.map(t), cat).unwrap()
}
