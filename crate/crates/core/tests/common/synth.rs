//! Institution-sized synthetic catalogs.

use std::collections::BTreeSet;

use degreeplan::catalog::{Calendar, Catalog, Course, CourseGroup, GroupMode, RequisiteExpr};
use degreeplan::term::{Anchor, Season, TermIndex};
use rand::seq::SliceRandom;
use rand::Rng;

/// `n` three-credit courses over `s_max` terms with the institutional
/// credit rules: the first 40 are liberal-education courses without
/// requisites, the rest form tracks whose courses require earlier ones.
pub fn catalog(rng: &mut impl Rng, n: usize, s_max: u32) -> Catalog {
    assert!(n >= 80);
    let codes: Vec<String> = (1..=n).map(|i| format!("SYN{i:03}")).collect();
    let offered_in = |seasons: &[Season]| -> BTreeSet<TermIndex> { TermIndex::range(s_max).filter(|t| seasons.contains(&t.season())).collect() };
    let mut courses = Vec::with_capacity(n);
    for (i, code) in codes.iter().enumerate() {
        let seasons: &[Season] = if i < 40 {
            &[Season::Fall, Season::Spring, Season::Summer1]
        } else {
            match rng.gen_range(0..10) {
                0 => &[Season::Fall],
                1 => &[Season::Spring],
                2 => &[Season::Fall, Season::Spring, Season::SummerTerm],
                _ => &[Season::Fall, Season::Spring],
            }
        };
        // tracks of 20 courses; requisites point back into the same track
        let track_start = 40 + (i.saturating_sub(40) / 20) * 20;
        let prereq = if i >= 40 && i > track_start && rng.gen_bool(0.7) {
            let pool = &codes[track_start..i];
            let disjuncts: Vec<Vec<String>> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let size = rng.gen_range(1..=2.min(pool.len()));
                    pool.choose_multiple(rng, size).cloned().collect()
                })
                .collect();
            RequisiteExpr::from_dnf(disjuncts)
        } else {
            RequisiteExpr::none()
        };
        courses.push(Course {
            title: format!("Synthetic course {}", i + 1),
            prereq,
            offered: offered_in(seasons),
            ..Course::new(i as u32 + 1, code, 3, f64::from(rng.gen_range(1..=5)))
        });
    }
    let refs = |range: std::ops::Range<usize>| -> Vec<&str> { codes[range].iter().map(String::as_str).collect() };
    let groups = vec![
        CourseGroup::new("LE", GroupMode::AtLeast, 0, false, &refs(0..40)),
        CourseGroup::new("L4", GroupMode::AtLeast, 0, false, &refs(40..46)),
        CourseGroup::new("L5", GroupMode::AtLeast, 0, false, &refs(60..70)),
        CourseGroup::new("L6", GroupMode::AtLeast, 0, false, &refs(80..88)),
        CourseGroup::new("core", GroupMode::AtLeast, 6, false, &refs(40..52)),
        CourseGroup::new("LE-core-stat", GroupMode::Exact, 1, false, &refs(0..3)),
        CourseGroup::new("softorder-a", GroupMode::AtLeast, 0, false, &refs(100..102)),
        CourseGroup::new("HonorGroup", GroupMode::AtLeast, 0, false, &refs(n - 2..n)),
        CourseGroup::new("Thesis", GroupMode::AtLeast, 0, false, &refs(n - 3..n - 2)),
    ];
    let cal = Calendar { s_max, ..Calendar::new(Anchor::new(2022)) };
    Catalog::new(cal, courses, groups).unwrap()
}
