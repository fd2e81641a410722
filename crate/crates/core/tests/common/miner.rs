//! Brute-force rule counting.

use std::collections::BTreeMap;

use degreeplan::grade::Grade;

/// `(antecedents sorted by code, consequent) -> (support, confidence)`.
pub type Rules = BTreeMap<(Vec<(String, Grade)>, (String, Grade)), (f64, f64)>;

fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in combos(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

fn grids(k: usize, g: usize) -> Vec<Vec<usize>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|v| (0..g).map(move |x| [v.clone(), vec![x]].concat()))
            .collect()
    })
}

/// Every rule with 1 to 3 antecedents on distinct courses meeting both
/// thresholds, after removing rules outranked by a same-body rule with a
/// higher consequent grade and no lower confidence.
pub fn brute_force(rows: &[BTreeMap<String, Grade>], grid: &[Grade], min_sup: f64, min_conf: f64) -> Rules {
    let n = rows.len();
    let mut courses: Vec<String> = rows.iter().flat_map(|r| r.keys().cloned()).collect();
    courses.sort();
    courses.dedup();
    let holds = |row: &BTreeMap<String, Grade>, c: &str, v: Grade| row.get(c).is_some_and(|g| *g >= v);
    let mut found: Rules = BTreeMap::new();
    for (ci, cons) in courses.iter().enumerate() {
        let others: Vec<usize> = (0..courses.len()).filter(|&i| i != ci).collect();
        for size in 1..=3 {
            for set in combos(others.len(), size) {
                let ante: Vec<usize> = set.iter().map(|&i| others[i]).collect();
                for gs in grids(size, grid.len()) {
                    let atoms: Vec<(String, Grade)> = ante.iter().zip(&gs).map(|(&c, &g)| (courses[c].clone(), grid[g])).collect();
                    for &v in grid {
                        let mut matched = 0;
                        let mut joint = 0;
                        for row in rows {
                            if atoms.iter().all(|(c, g)| holds(row, c, *g)) {
                                matched += 1;
                                if holds(row, cons, v) {
                                    joint += 1;
                                }
                            }
                        }
                        if matched == 0 {
                            continue;
                        }
                        let support = joint as f64 / n as f64;
                        let confidence = joint as f64 / matched as f64;
                        if support >= min_sup && confidence >= min_conf {
                            found.insert((atoms.clone(), (cons.clone(), v)), (support, confidence));
                        }
                    }
                }
            }
        }
    }
    let keys: Vec<_> = found.keys().cloned().collect();
    let mut out = found.clone();
    for (ante, (c, v)) in &keys {
        let conf = found[&(ante.clone(), (c.clone(), *v))].1;
        let dominated = found
            .iter()
            .any(|((a2, (c2, v2)), (_, conf2))| a2 == ante && c2 == c && v2 > v && *conf2 >= conf);
        if dominated {
            out.remove(&(ante.clone(), (c.clone(), *v)));
        }
    }
    out
}
