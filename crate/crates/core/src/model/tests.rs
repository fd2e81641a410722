use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::catalog::{Calendar, Course, CourseGroup, GroupMode, RequisiteExpr, TranscriptEntry};
use crate::milp::{model_stats, LinearConstraint, Sense, VarKind};
use crate::term::{Anchor, TermIndex};

fn t(s: u32) -> TermIndex {
    TermIndex::new(s).unwrap()
}

fn every_term(s_max: u32) -> BTreeSet<TermIndex> {
    TermIndex::range(s_max).collect()
}

fn course(id: u32, code: &str, prereq: &str, coreq: &str, s_max: u32) -> Course {
    Course {
        prereq: RequisiteExpr::parse(prereq).unwrap(),
        coreq: RequisiteExpr::parse(coreq).unwrap(),
        offered: every_term(s_max),
        ..Course::new(id, code, 3, 2.0)
    }
}

fn calendar(s_max: u32) -> Calendar {
    Calendar {
        s_max,
        total_credits: 9,
        liberal_credits: 0,
        ..Calendar::new(Anchor::new(2022))
    }
}

fn six() -> Catalog {
    let s = 10;
    let courses = vec![
        course(1, "A1", "", "", s),
        course(2, "B1", "A1", "", s),
        course(3, "C1", "", "A1", s),
        course(4, "D1", "A1 & (B1 | C1)", "", s),
        course(5, "E1", "", "", s),
        Course {
            offered: [t(1), t(6)].into(),
            ..course(6, "F1", "", "", s)
        },
    ];
    Catalog::new(calendar(s), courses, vec![]).unwrap()
}

fn rows<'m>(m: &'m MilpModel, prefix: &str) -> Vec<&'m LinearConstraint> {
    m.constraints().iter().filter(|r| r.tag.starts_with(prefix)).collect()
}

fn row<'m>(m: &'m MilpModel, tag: &str) -> &'m LinearConstraint {
    m.constraints()
        .iter()
        .find(|r| r.tag == tag)
        .unwrap_or_else(|| panic!("no row {tag}"))
}

/// Row terms as (coefficient, variable name), sorted by name.
fn named(m: &MilpModel, r: &LinearConstraint) -> Vec<(f64, String)> {
    let mut v: Vec<_> = r.terms.iter().map(|&(c, id)| (c, m.variable(id).name.clone())).collect();
    v.sort_by(|a, b| a.1.cmp(&b.1));
    v
}

fn build(cat: &Catalog, prefs: &Preferences) -> (MilpModel, VarMap) {
    build_model(cat, &Transcript::empty(cat), prefs, &GradeEstimates::default()).unwrap()
}

#[test]
fn variable_counts() {
    let cat = six();
    let (m, _) = build(&cat, &Preferences::default());
    let st = model_stats(&m);
    assert_eq!(st.n_binary, 6 * 11 + 6);
    assert_eq!(st.n_continuous, 3);
    assert_eq!(st.n_vars, st.n_binary + 3);
    assert!(m.variables().iter().all(|v| v.kind == VarKind::Binary || ["D", "D_L", "G_e"].contains(&v.name.as_str())));
}

#[test]
fn prerequisite_row_at_summer_term() {
    let cat = six();
    let (m, _) = build(&cat, &Preferences::default());
    let r = row(&m, "eq1:prereq:B1:c0:s=5");
    assert_eq!(r.sense, Sense::Le);
    assert_eq!(r.rhs, 0.0);
    assert_eq!(
        named(&m, r),
        vec![(-1.0, "x_A1_0".into()), (-1.0, "x_A1_1".into()), (-1.0, "x_A1_2".into()), (1.0, "x_B1_5".into())]
    );
}

#[test]
fn corequisite_row_adds_same_term() {
    let cat = six();
    let (m, _) = build(&cat, &Preferences::default());
    let r = row(&m, "eq2:coreq:C1:c0:s=3");
    assert_eq!(
        named(&m, r),
        vec![
            (-1.0, "x_A1_0".into()),
            (-1.0, "x_A1_1".into()),
            (-1.0, "x_A1_2".into()),
            (-1.0, "x_A1_3".into()),
            (1.0, "x_C1_3".into())
        ]
    );
}

#[test]
fn clause_rows_follow_cnf() {
    let cat = six();
    let (m, _) = build(&cat, &Preferences::default());
    let r0 = row(&m, "eq1:prereq:D1:c0:s=2");
    let r1 = row(&m, "eq1:prereq:D1:c1:s=2");
    assert_eq!(named(&m, r0).len(), 3);
    let names: Vec<String> = named(&m, r1).into_iter().map(|(_, n)| n).collect();
    assert_eq!(names, vec!["x_B1_0", "x_B1_1", "x_C1_0", "x_C1_1", "x_D1_2"]);
    assert_eq!(rows(&m, "eq1:prereq:D1:").len(), 2 * 10);
}

#[test]
fn offering_and_transfer_bounds() {
    let cat = six();
    let (m, vars) = build(&cat, &Preferences::default());
    let f = cat.index_of("F1").unwrap();
    for s in 1..=10 {
        let v = m.variable(vars.taken_in(f, s));
        let open = s == 1 || s == 6;
        assert_eq!(v.upper, if open { 1.0 } else { 0.0 }, "s={s}");
    }
    assert_eq!(m.variable(vars.taken_in(f, 0)).upper, 0.0);
}

#[test]
fn passed_course_fixing() {
    let cat = six();
    let tr = Transcript::new(
        vec![TranscriptEntry { code: "A1".into(), grade: "3.0".parse().unwrap(), term: None }],
        None,
        &cat,
    )
    .unwrap();
    let (m, vars) = build_model(&cat, &tr, &Preferences::default(), &GradeEstimates::default()).unwrap();
    let a = cat.index_of("A1").unwrap();
    let x0 = m.variable(vars.taken_in(a, 0));
    assert_eq!((x0.lower, x0.upper), (1.0, 1.0));
    for s in 1..=10 {
        assert_eq!(m.variable(vars.taken_in(a, s)).upper, 0.0);
    }
}

#[test]
fn past_terms_are_closed() {
    let cat = six();
    let tr = Transcript::new(
        vec![TranscriptEntry { code: "A1".into(), grade: "3.0".parse().unwrap(), term: Some(t(3)) }],
        None,
        &cat,
    )
    .unwrap();
    assert_eq!(tr.current_term(), t(4));
    let (m, vars) = build_model(&cat, &tr, &Preferences::default(), &GradeEstimates::default()).unwrap();
    let e = cat.index_of("E1").unwrap();
    for s in 1..4 {
        assert_eq!(m.variable(vars.taken_in(e, s)).upper, 0.0);
    }
    assert_eq!(m.variable(vars.taken_in(e, 4)).upper, 1.0);
    assert!(rows(&m, "eq1:prereq:B1:c0:s=3").is_empty());
    assert_eq!(rows(&m, "eq1:prereq:B1:").len(), 7);
}

#[test]
fn credit_rows_use_calendar_defaults() {
    let s = 10;
    let le = CourseGroup::new("LE", GroupMode::AtLeast, 0, false, &["B1"]);
    let cal = Calendar { s_max: s, ..Calendar::new(Anchor::new(2022)) };
    let cat = Catalog::new(cal, vec![course(1, "A1", "", "", s), course(2, "B1", "", "", s)], vec![le]).unwrap();
    let (m, _) = build(&cat, &Preferences::default());
    assert_eq!(row(&m, "eq7:total-credits").rhs, 121.0);
    assert_eq!(row(&m, "eq9:liberal-credits").rhs, 43.0);
    assert_eq!(named(&m, row(&m, "eq9:liberal-credits")), vec![(3.0, "x_B1".into())]);
    assert_eq!(row(&m, "eq10:term-credits:s=4").rhs, 17.0);
    let honors = Preferences { honors: true, ..Preferences::default() };
    let (m, _) = build(&cat, &honors);
    assert_eq!(row(&m, "eq10:term-credits:s=4").rhs, 20.0);
}

#[test]
fn group_rows() {
    let s = 6;
    let courses = vec![
        course(1, "MA2010", "", "", s),
        course(2, "MA2021", "", "", s),
        course(3, "MA2025", "", "", s),
        course(4, "X1", "", "", s),
    ];
    let groups = vec![
        CourseGroup::new("LE-core-stat", GroupMode::Exact, 1, false, &["MA2010", "MA2021", "MA2025"]),
        CourseGroup::new("labs", GroupMode::AtLeast, 1, true, &["MA2010", "X1"]),
        CourseGroup::new("conc-data", GroupMode::AtLeast, 1, false, &["X1"]),
    ];
    let cat = Catalog::new(calendar(s), courses, groups).unwrap();
    let (m, _) = build(&cat, &Preferences::default());
    let stat = row(&m, "eq11:group:LE-core-stat");
    assert_eq!((stat.sense, stat.rhs), (Sense::Eq, 1.0));
    assert_eq!(named(&m, stat).len(), 3);
    assert_eq!(rows(&m, "eq11:group:labs:").len(), 6);
    assert_eq!(row(&m, "eq11:group:labs:s=2").sense, Sense::Le);
    assert!(rows(&m, "eq11:group:conc-data").is_empty());
    let prefs = Preferences { concentration: Some("conc-data".into()), ..Preferences::default() };
    let (m, _) = build(&cat, &prefs);
    assert_eq!(row(&m, "eq11:group:conc-data").sense, Sense::Ge);
}

#[test]
fn level_rows() {
    let s = 5;
    let mut courses = Vec::new();
    let l4 = ["a1", "a2", "a3", "a4", "a5"];
    let l5 = ["b1", "b2", "b3", "b4"];
    for (i, c) in l4.iter().chain(&l5).chain(&["c1"]).enumerate() {
        courses.push(course(i as u32, c, "", "", s));
    }
    let groups = vec![
        CourseGroup::new("L4", GroupMode::AtLeast, 0, false, &l4),
        CourseGroup::new("L5", GroupMode::AtLeast, 0, false, &l5),
        CourseGroup::new("L6", GroupMode::AtLeast, 0, false, &["c1"]),
    ];
    let cat = Catalog::new(calendar(s), courses, groups).unwrap();
    let (m, _) = build(&cat, &Preferences::default());
    let r3 = row(&m, "eq3:l5-after-l4:b1:s=2");
    assert_eq!(named(&m, r3).iter().filter(|(c, _)| *c == -0.25).count(), 5 * 2);
    let r4 = row(&m, "eq4:l6-after-l5:c1:s=3");
    assert_eq!(named(&m, r4).iter().filter(|(c, _)| *c == -0.25).count(), 4 * 3);
    let r5 = row(&m, "eq5:l6-after-all-l4:c1:s=2");
    assert!(named(&m, r5).iter().filter(|(_, n)| n.starts_with("x_a")).all(|(c, _)| *c == -0.2));
    assert_eq!(rows(&m, "eq3:").len(), 4 * 5);

    let no_l5 = Catalog::new(calendar(s), vec![course(1, "a1", "", "", s)], vec![]).unwrap();
    let (m, _) = build(&no_l5, &Preferences::default());
    assert!(rows(&m, "eq3:").is_empty() && rows(&m, "eq4:").is_empty() && rows(&m, "eq5:").is_empty());
}

#[test]
fn honors_courses_closed_for_regular_students() {
    let s = 5;
    let groups = vec![CourseGroup::new("HonorGroup1", GroupMode::AtLeast, 0, false, &["H1"])];
    let cat = Catalog::new(calendar(s), vec![course(1, "H1", "", "", s)], groups).unwrap();
    let (m, vars) = build(&cat, &Preferences::default());
    assert_eq!(m.variable(vars.taken(0)).upper, 0.0);
    let (m, vars) = build(&cat, &Preferences { honors: true, ..Preferences::default() });
    assert_eq!(m.variable(vars.taken(0)).upper, 1.0);
}

#[test]
fn selections() {
    let cat = six();
    let prefs = Preferences {
        desired: ["E1".to_string()].into(),
        rejected: ["C1".to_string()].into(),
        pins: BTreeMap::from([("B1".to_string(), t(7))]),
        ..Preferences::default()
    };
    let (m, vars) = build(&cat, &prefs);
    let d = row(&m, "eq12:desired:E1");
    assert_eq!((d.sense, d.rhs), (Sense::Eq, 1.0));
    assert_eq!(named(&m, row(&m, "eq13:pin:B1:s=7")), vec![(1.0, "x_B1_7".into())]);
    let c = cat.index_of("C1").unwrap();
    assert_eq!(m.variable(vars.taken(c)).upper, 0.0);
}

#[test]
fn windows_close_other_terms() {
    let cat = six();
    let prefs = Preferences {
        windows: BTreeMap::from([("E1".to_string(), [t(3), t(4)].into())]),
        ..Preferences::default()
    };
    let (m, vars) = build(&cat, &prefs);
    let e = cat.index_of("E1").unwrap();
    let open: Vec<u32> = (1..=10).filter(|&s| m.variable(vars.taken_in(e, s)).upper == 1.0).collect();
    assert_eq!(open, vec![3, 4]);
    assert_eq!(row(&m, "eq12:window:E1").rhs, 1.0);
}

#[test]
fn summers_off_closes_summer_terms() {
    let cat = six();
    let (m, vars) = build(&cat, &Preferences { summers_off: true, ..Preferences::default() });
    let e = cat.index_of("E1").unwrap();
    let closed: Vec<u32> = (1..=10).filter(|&s| m.variable(vars.taken_in(e, s)).upper == 0.0).collect();
    assert_eq!(closed, vec![3, 4, 5, 8, 9, 10]);
}

#[test]
fn thesis_and_count_caps() {
    let s = 5;
    let groups = vec![CourseGroup::new("Thesis", GroupMode::AtLeast, 0, false, &["T1"])];
    let cat = Catalog::new(calendar(s), vec![course(1, "A1", "", "", s), course(2, "T1", "", "", s)], groups).unwrap();
    let prefs = Preferences { thesis_max: Some(2), max_per_term: Some(3), ..Preferences::default() };
    let (m, _) = build(&cat, &prefs);
    let r = row(&m, "eq17:thesis:T1:s=2");
    assert_eq!(r.rhs, 17.0);
    assert_eq!(named(&m, r), vec![(1.0, "x_A1_2".into()), (16.0, "x_T1_2".into())]);
    assert_eq!(row(&m, "eq16:courses-per-term:s=1").rhs, 3.0);

    let err = build_model(
        &six(),
        &Transcript::empty(&six()),
        &Preferences { thesis_max: Some(2), ..Preferences::default() },
        &GradeEstimates::default(),
    );
    assert!(matches!(err, Err(BuildError::Config(_))));
}

#[test]
fn soft_order_row() {
    let s = 5;
    let groups = vec![CourseGroup::new("softorder-db-se", GroupMode::AtLeast, 0, false, &["ITC3160", "ITC2095"])];
    let cat = Catalog::new(
        calendar(s),
        vec![course(1, "ITC3160", "", "", s), course(2, "ITC2095", "", "", s)],
        groups,
    )
    .unwrap();
    let (m, _) = build(&cat, &Preferences::default());
    let r = row(&m, "eq15:softorder:softorder-db-se:s=3");
    assert_eq!(r.rhs, 1.0);
    assert_eq!(
        named(&m, r),
        vec![
            (1.0, "x_ITC2095_3".into()),
            (1.0, "x_ITC3160".into()),
            (-1.0, "x_ITC3160_0".into()),
            (-1.0, "x_ITC3160_1".into()),
            (-1.0, "x_ITC3160_2".into())
        ]
    );
}

#[test]
fn objective_rows_and_weights() {
    let cat = six();
    let mut grades = BTreeMap::new();
    grades.insert("A1".to_string(), "3.5".parse().unwrap());
    grades.insert("B1".to_string(), "3.0".parse().unwrap());
    grades.insert("C1".to_string(), "2.4".parse().unwrap());
    let est = GradeEstimates::new(grades);
    let (m, vars) = build_model(&cat, &Transcript::empty(&cat), &Preferences::default(), &est).unwrap();
    let obj: Vec<(f64, String)> = m.objective().iter().map(|&(c, v)| (c, m.variable(v).name.clone())).collect();
    assert_eq!(obj, vec![(-1000.0, "G_e".into()), (100.0, "D".into()), (1.0, "D_L".into())]);
    assert_eq!(vars.eligible.len(), 2);
    assert_eq!(m.variable(vars.grade_mass).upper, 6.5);
    let mass = row(&m, "eq21:grade-mass");
    assert_eq!(named(&m, mass), vec![(1.0, "G_e".into()), (-3.5, "x_A1".into()), (-3.0, "x_B1".into())]);
    assert_eq!(row(&m, "eq22:grade-credits").rhs, 9.0);
    assert_eq!(rows(&m, "eq19:").len(), 45);
    assert_eq!(rows(&m, "eq20:").len(), 45);
    assert_eq!(rows(&m, "eq18:").len(), 6);

    let fast = Preferences { objective: ObjectivePriority::FastestCompletion, ..Preferences::default() };
    let (m, _) = build(&cat, &fast);
    assert_eq!(m.objective()[1].0, 1000.0);
    assert_eq!(m.objective()[0].0, -100.0);
    let g = m.variable(m.id_of("G_e").unwrap());
    assert_eq!((g.lower, g.upper), (0.0, 0.0));
    assert!(rows(&m, "eq21:").is_empty() && rows(&m, "eq22:").is_empty());
}

#[test]
fn invalid_preferences() {
    let cat = six();
    let tr = Transcript::empty(&cat);
    let est = GradeEstimates::default();
    let both = Preferences {
        desired: ["A1".to_string()].into(),
        rejected: ["A1".to_string()].into(),
        ..Preferences::default()
    };
    assert!(matches!(build_model(&cat, &tr, &both, &est), Err(BuildError::InvalidPreferences(_))));
    let unknown = Preferences { desired: ["ZZ1".to_string()].into(), ..Preferences::default() };
    assert!(matches!(build_model(&cat, &tr, &unknown, &est), Err(BuildError::InvalidPreferences(_))));
    let conc = Preferences { concentration: Some("nope".into()), ..Preferences::default() };
    assert!(matches!(build_model(&cat, &tr, &conc, &est), Err(BuildError::InvalidPreferences(_))));
}

#[test]
fn pin_to_unoffered_term_is_reported_eagerly() {
    let cat = six();
    let prefs = Preferences { pins: BTreeMap::from([("F1".to_string(), t(2))]), ..Preferences::default() };
    match build_model(&cat, &Transcript::empty(&cat), &prefs, &GradeEstimates::default()) {
        Err(BuildError::InfeasibleByConstruction { tags, .. }) => {
            assert_eq!(tags, vec!["eq13:pin:F1:s=2".to_string(), "eq6:offering:F1:s=2".to_string()]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn ablation_drops_family() {
    let cat = six();
    let tr = Transcript::empty(&cat);
    let opts = BuildOptions::without([Family::Prerequisite, Family::Offering]);
    let (m, vars) = build_model_with(&cat, &tr, &Preferences::default(), &GradeEstimates::default(), &opts).unwrap();
    assert!(rows(&m, "eq1:").is_empty());
    assert!(!rows(&m, "eq2:").is_empty());
    let f = cat.index_of("F1").unwrap();
    assert_eq!(m.variable(vars.taken_in(f, 2)).upper, 1.0);
    assert_eq!(Family::GradeCredits.number(), 22);
    assert_eq!(Family::Offering.tag_prefix(), "eq6:");
}
