//! Exhaustive plan enumeration.
//!
//! Every course is either left out or placed in one open term; each complete
//! assignment is checked against the degree rules written out directly, and
//! the objective is evaluated in integer hundredths so optima compare
//! exactly.

use std::collections::{BTreeMap, BTreeSet};

use degreeplan::catalog::{Catalog, CourseFlag, GroupKind, GroupMode, Transcript};
use degreeplan::model::{GradeEstimates, ObjectivePriority, Preferences};

/// `(b_G, b_D, b_DL)` as integers.
pub fn weights(p: ObjectivePriority) -> (i64, i64, i64) {
    match p {
        ObjectivePriority::ExpectedGpa => (-1000, 100, 1),
        ObjectivePriority::FastestCompletion => (-100, 1000, 1),
    }
}

pub fn k(s: u32) -> u32 {
    if s % 5 == 0 {
        3
    } else {
        1
    }
}

pub fn is_summer(s: u32) -> bool {
    (s - 1) % 5 >= 2
}

fn hundredths(x: f64) -> i64 {
    let h = (x * 100.0).round();
    assert!((x * 100.0 - h).abs() < 1e-9, "{x} has more than two decimals");
    h as i64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    /// Objective times 100.
    pub objective: i64,
    /// An optimal placement, `(code, term)` by code.
    pub plan: Vec<(String, u32)>,
    /// Number of feasible plans seen.
    pub feasible: usize,
}

/// The rule families the enumerator enforces; all on by default.
#[derive(Debug, Clone, Copy)]
pub struct Rules {
    pub grade_credits: bool,
}

impl Default for Rules {
    fn default() -> Self {
        Rules { grade_credits: true }
    }
}

struct Ctx<'a> {
    cat: &'a Catalog,
    codes: Vec<String>,
    credits: Vec<i64>,
    diff: Vec<i64>,
    grade: Vec<Option<i64>>,
    options: Vec<Vec<Option<u32>>>,
    passed: Vec<bool>,
    s_n: u32,
    s_max: u32,
    cap: i64,
    max_per_term: Option<usize>,
    prefs: Preferences,
    c_rem: i64,
    total: i64,
    liberal: i64,
    weights: (i64, i64, i64),
    rules: Rules,
}

pub fn enumerate(cat: &Catalog, tr: &Transcript, prefs: &Preferences, est: &GradeEstimates) -> Option<Optimum> {
    enumerate_with(cat, tr, prefs, est, Rules::default())
}

fn context<'a>(cat: &'a Catalog, tr: &Transcript, prefs: &Preferences, est: &GradeEstimates, rules: Rules) -> Ctx<'a> {
    let cal = cat.calendar();
    let canon = |c: &String| cat.canonical(c).expect("known code").to_string();
    let prefs = Preferences {
        desired: prefs.desired.iter().map(canon).collect(),
        rejected: prefs.rejected.iter().map(canon).collect(),
        pins: prefs.pins.iter().map(|(c, t)| (canon(c), *t)).collect(),
        windows: prefs.windows.iter().map(|(c, w)| (canon(c), w.clone())).collect(),
        ..prefs.clone()
    };
    let s_n = tr.current_term().get();
    let s_max = cal.s_max;
    let n = cat.len();
    let mut grades: BTreeMap<String, i64> = BTreeMap::new();
    for (code, g) in &est.grades {
        if *g > est.threshold {
            grades.entry(canon(code)).or_insert(i64::from(g.hundredths()));
        }
    }
    let mut options = Vec::with_capacity(n);
    let mut passed = Vec::with_capacity(n);
    for course in cat.courses() {
        let code = &course.code;
        let done = tr.passed(code);
        passed.push(done);
        if done {
            options.push(vec![None]);
            continue;
        }
        let blocked = prefs.rejected.contains(code) || (course.has(CourseFlag::Honors) && !prefs.honors);
        let mut opts = Vec::new();
        if !prefs.desired.contains(code) && !prefs.pins.contains_key(code) && !prefs.windows.contains_key(code) {
            opts.push(None);
        }
        if !blocked {
            for s in s_n..=s_max {
                let open = course.offered.iter().any(|t| t.get() == s)
                    && !(prefs.summers_off && is_summer(s))
                    && prefs.pins.get(code).is_none_or(|p| p.get() == s)
                    && prefs.windows.get(code).is_none_or(|w| w.iter().any(|t| t.get() == s));
                if open {
                    opts.push(Some(s));
                }
            }
        }
        options.push(opts);
    }
    let earned: i64 = cat
        .courses()
        .iter()
        .zip(&passed)
        .filter(|(_, p)| **p)
        .map(|(c, _)| i64::from(c.credits))
        .sum();
    Ctx {
        cat,
        codes: cat.courses().iter().map(|c| c.code.clone()).collect(),
        credits: cat.courses().iter().map(|c| i64::from(c.credits)).collect(),
        diff: cat.courses().iter().map(|c| hundredths(c.difficulty)).collect(),
        grade: cat
            .courses()
            .iter()
            .zip(&passed)
            .map(|(c, p)| if *p { None } else { grades.get(&c.code).copied() })
            .collect(),
        options,
        passed,
        s_n,
        s_max,
        cap: i64::from(if prefs.honors { cal.max_credits_honors } else { cal.max_credits }),
        max_per_term: prefs.max_per_term.map(|m| m as usize),
        c_rem: est
            .credits_remaining
            .map_or_else(|| (i64::from(cal.total_credits) - earned).max(0), i64::from),
        total: i64::from(cal.total_credits),
        liberal: i64::from(cal.liberal_credits),
        weights: weights(prefs.objective),
        prefs,
        rules,
    }
}

pub fn enumerate_with(cat: &Catalog, tr: &Transcript, prefs: &Preferences, est: &GradeEstimates, rules: Rules) -> Option<Optimum> {
    let ctx = context(cat, tr, prefs, est, rules);
    let (n, s_max) = (cat.len(), ctx.s_max);
    let mut best: Option<Optimum> = None;
    let mut feasible = 0;
    let mut assign = vec![None; n];
    let mut load = vec![0i64; s_max as usize + 1];
    let mut count = vec![0usize; s_max as usize + 1];
    dfs(&ctx, 0, &mut assign, &mut load, &mut count, &mut best, &mut feasible);
    best.map(|b| Optimum { feasible, ..b })
}

fn dfs(
    ctx: &Ctx<'_>,
    i: usize,
    assign: &mut Vec<Option<u32>>,
    load: &mut Vec<i64>,
    count: &mut Vec<usize>,
    best: &mut Option<Optimum>,
    feasible: &mut usize,
) {
    if i == assign.len() {
        if let Some(obj) = check(ctx, assign) {
            *feasible += 1;
            let better = best.as_ref().is_none_or(|b| obj < b.objective);
            if better {
                let mut plan: Vec<(String, u32)> = assign
                    .iter()
                    .enumerate()
                    .filter_map(|(j, s)| s.map(|s| (ctx.codes[j].clone(), s)))
                    .collect();
                plan.sort();
                *best = Some(Optimum { objective: obj, plan, feasible: 0 });
            }
        }
        return;
    }
    for &opt in &ctx.options[i] {
        if let Some(s) = opt {
            let s = s as usize;
            if load[s] + ctx.credits[i] > ctx.cap || ctx.max_per_term.is_some_and(|m| count[s] + 1 > m) {
                continue;
            }
            load[s] += ctx.credits[i];
            count[s] += 1;
        }
        assign[i] = opt;
        dfs(ctx, i + 1, assign, load, count, best, feasible);
        if let Some(s) = opt {
            load[s as usize] -= ctx.credits[i];
            count[s as usize] -= 1;
        }
    }
    assign[i] = None;
}

/// Objective in hundredths, or `None` when a rule is broken.
fn check(ctx: &Ctx<'_>, assign: &[Option<u32>]) -> Option<i64> {
    let cat = ctx.cat;
    let courses = cat.courses();
    let index: BTreeMap<&str, usize> = ctx.codes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    // completion term, 0 for passed courses
    let done: Vec<Option<u32>> = (0..assign.len())
        .map(|i| if ctx.passed[i] { Some(0) } else { assign[i] })
        .collect();
    let by = |code: &str, last: i64| done[index[code]].is_some_and(|t| i64::from(t) <= last);
    let taken = |i: usize| done[i].is_some();

    for (j, course) in courses.iter().enumerate() {
        let Some(s) = assign[j] else { continue };
        let last = i64::from(s) - i64::from(k(s));
        let pre = course.prereq.disjuncts();
        if !pre.is_empty() && !pre.iter().any(|d| d.iter().all(|m| by(m, last))) {
            return None;
        }
        let co = course.coreq.disjuncts();
        if !co.is_empty() && !co.iter().any(|d| d.iter().all(|m| by(m, last) || assign[index[m.as_str()]] == Some(s))) {
            return None;
        }
        let level_done = |flag: CourseFlag| {
            (0..courses.len())
                .filter(|&m| courses[m].has(flag) && done[m].is_some_and(|t| i64::from(t) <= last))
                .count()
        };
        let all_l4 = courses.iter().filter(|c| c.has(CourseFlag::Level4)).count();
        if course.has(CourseFlag::Level5) && level_done(CourseFlag::Level4) < 4 {
            return None;
        }
        if course.has(CourseFlag::Level6) && (level_done(CourseFlag::Level5) < 4 || level_done(CourseFlag::Level4) < all_l4) {
            return None;
        }
    }

    let sum_credits = |pred: &dyn Fn(usize) -> bool| -> i64 { (0..courses.len()).filter(|&i| taken(i) && pred(i)).map(|i| ctx.credits[i]).sum() };
    if sum_credits(&|_| true) < ctx.total {
        return None;
    }
    if sum_credits(&|i| courses[i].has(CourseFlag::LiberalEducation)) < ctx.liberal {
        return None;
    }

    for g in cat.groups() {
        let members: Vec<usize> = g.members.iter().map(|m| index[m.as_str()]).collect();
        match g.kind {
            GroupKind::Regular => {
                let applies = !g.name.starts_with("conc-") || ctx.prefs.concentration.as_deref() == Some(g.name.as_str());
                if !applies {
                    continue;
                }
                if g.per_term {
                    for s in ctx.s_n..=ctx.s_max {
                        let n = members.iter().filter(|&&m| assign[m] == Some(s)).count();
                        if n > g.count as usize {
                            return None;
                        }
                    }
                } else {
                    let n = members.iter().filter(|&&m| taken(m)).count();
                    let ok = match g.mode {
                        GroupMode::AtLeast => n >= g.count as usize,
                        GroupMode::Exact => n == g.count as usize,
                    };
                    if !ok {
                        return None;
                    }
                }
            }
            GroupKind::SoftOrder if members.len() == 2 => {
                let (a, b) = (members[0], members[1]);
                if let (true, Some(s)) = (taken(a), assign[b]) {
                    let last = i64::from(s) - i64::from(k(s));
                    if done[a].is_none_or(|t| i64::from(t) > last) {
                        return None;
                    }
                }
            }
            _ => {}
        }
    }

    if let Some(theta) = ctx.prefs.thesis_max {
        for (i, course) in courses.iter().enumerate() {
            if !course.has(CourseFlag::Thesis) {
                continue;
            }
            if let Some(s) = assign[i] {
                let others = (0..courses.len()).filter(|&m| m != i && assign[m] == Some(s)).count() as i64;
                if others > i64::from(theta) - 1 {
                    return None;
                }
            }
        }
    }

    let mut grade_mass = 0;
    let mut grade_credits = 0;
    for i in 0..courses.len() {
        if let (Some(g), Some(_)) = (ctx.grade[i], assign[i]) {
            grade_mass += g;
            grade_credits += ctx.credits[i];
        }
    }
    if ctx.rules.grade_credits && grade_credits > ctx.c_rem {
        return None;
    }

    let completion = assign.iter().flatten().copied().max().unwrap_or(0);
    let mut loads = vec![0i64; ctx.s_max as usize + 1];
    for (i, s) in assign.iter().enumerate() {
        if let Some(s) = s {
            loads[*s as usize] += ctx.diff[i];
        }
    }
    let terms = &loads[1..];
    let gap = terms.iter().max().unwrap() - terms.iter().min().unwrap();
    let (bg, bd, bl) = ctx.weights;
    Some(bg * grade_mass + bd * i64::from(completion) * 100 + bl * gap)
}

/// Whether a placement obeys every rule. Codes must be canonical.
pub fn is_feasible(cat: &Catalog, tr: &Transcript, prefs: &Preferences, est: &GradeEstimates, plan: &[(String, u32)]) -> bool {
    let ctx = context(cat, tr, prefs, est, Rules::default());
    let mut assign: Vec<Option<u32>> = vec![None; cat.len()];
    for (code, s) in plan {
        let i = ctx.codes.iter().position(|c| c == code).expect("catalog code");
        if assign[i].is_some() {
            return false;
        }
        assign[i] = Some(*s);
    }
    let mut load = vec![0i64; ctx.s_max as usize + 1];
    let mut count = vec![0usize; ctx.s_max as usize + 1];
    for (i, a) in assign.iter().enumerate() {
        if !ctx.options[i].contains(a) {
            return false;
        }
        if let Some(s) = a {
            load[*s as usize] += ctx.credits[i];
            count[*s as usize] += 1;
        }
    }
    let over = load.iter().any(|&l| l > ctx.cap) || ctx.max_per_term.is_some_and(|m| count.iter().any(|&c| c > m));
    !over && check(&ctx, &assign).is_some()
}

/// Set of `(code, term)` placements as a sorted list, for comparing plans.
pub fn placements_of(pairs: impl IntoIterator<Item = (String, u32)>) -> Vec<(String, u32)> {
    let set: BTreeSet<(String, u32)> = pairs.into_iter().collect();
    set.into_iter().collect()
}
