//! Exhaustive rule mining over a grade grid.

use rayon::prelude::*;

use super::{ratio, Atom, GradeDataset, QRule, RuleSet, DEFAULT_GRID};
use crate::grade::Grade;

#[derive(Debug, Clone, PartialEq)]
pub struct MineConfig {
    pub min_support: f64,
    pub min_confidence: f64,
    /// Ascending candidate thresholds.
    pub grid: Vec<Grade>,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            min_support: 0.005,
            min_confidence: 0.90,
            grid: DEFAULT_GRID.to_vec(),
        }
    }
}

type Bits = Vec<u64>;

fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// All rules with one to three antecedents meeting both thresholds, minus
/// dominated ones: a rule is dropped when another rule with the same
/// antecedents and consequent course predicts a higher grade with at least
/// the same confidence.
///
/// Rules are sorted by consequent course, then antecedents, then consequent
/// grade. The result does not depend on the number of worker threads.
pub fn mine_rules(data: &GradeDataset, config: &MineConfig) -> RuleSet {
    let n = data.n_students();
    if n == 0 {
        return RuleSet::default();
    }
    let mut grid = config.grid.clone();
    grid.sort();
    grid.dedup();
    let courses = data.courses();
    let words = n.div_ceil(64);
    // bits[c][g]: students with grade(c) >= grid[g]
    let bits: Vec<Vec<Bits>> = courses
        .iter()
        .map(|code| {
            grid.iter()
                .map(|v| {
                    let mut b = vec![0u64; words];
                    for (s, row) in data.rows().iter().enumerate() {
                        if row.get(code).is_some_and(|g| g >= v) {
                            b[s / 64] |= 1 << (s % 64);
                        }
                    }
                    b
                })
                .collect()
        })
        .collect();
    let supported = |joint: usize| ratio(joint, n) >= config.min_support;

    let per_consequent: Vec<Vec<QRule>> = (0..courses.len())
        .into_par_iter()
        .map(|k| {
            let mut out = Vec::new();
            let others: Vec<usize> = (0..courses.len()).filter(|&c| c != k).collect();
            let mut emit = |ante: &[(usize, usize)], set: &[u64]| {
                let matched = count(set);
                if matched == 0 {
                    return;
                }
                for (g, target) in bits[k].iter().enumerate() {
                    let joint = and_count(set, target);
                    let confidence = ratio(joint, matched);
                    // both measures only fall as the consequent grade rises
                    if !supported(joint) || confidence < config.min_confidence {
                        break;
                    }
                    out.push(QRule {
                        antecedents: ante.iter().map(|&(c, g)| Atom::new(courses[c].clone(), grid[g])).collect(),
                        consequent: Atom::new(courses[k].clone(), grid[g]),
                        support: ratio(joint, n),
                        confidence,
                    });
                }
            };
            for (p, &a) in others.iter().enumerate() {
                for (ga, ba) in bits[a].iter().enumerate() {
                    if !supported(count(ba)) {
                        break;
                    }
                    emit(&[(a, ga)], ba);
                    for (q, &b) in others.iter().enumerate().skip(p + 1) {
                        for (gb, bb) in bits[b].iter().enumerate() {
                            let ab = and(ba, bb);
                            if !supported(count(&ab)) {
                                break;
                            }
                            emit(&[(a, ga), (b, gb)], &ab);
                            for &c in others.iter().skip(q + 1) {
                                for (gc, bc) in bits[c].iter().enumerate() {
                                    let abc = and(&ab, bc);
                                    if !supported(count(&abc)) {
                                        break;
                                    }
                                    emit(&[(a, ga), (b, gb), (c, gc)], &abc);
                                }
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut rules: Vec<QRule> = per_consequent.into_iter().flatten().collect();
    rules = remove_dominated(rules);
    sort_rules(&mut rules);
    RuleSet { rules }
}

pub fn remove_dominated(rules: Vec<QRule>) -> Vec<QRule> {
    let mut rules = rules;
    sort_rules(&mut rules);
    let mut keep = vec![true; rules.len()];
    // rules sharing antecedents and consequent course are now adjacent, by
    // ascending consequent grade
    let mut start = 0;
    while start < rules.len() {
        let mut end = start + 1;
        while end < rules.len()
            && rules[end].antecedents == rules[start].antecedents
            && rules[end].consequent.code == rules[start].consequent.code
        {
            end += 1;
        }
        for i in start..end {
            keep[i] = !(i + 1..end).any(|j| {
                rules[j].consequent.v > rules[i].consequent.v && rules[j].confidence >= rules[i].confidence
            });
        }
        start = end;
    }
    rules.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

pub(crate) fn sort_rules(rules: &mut [QRule]) {
    rules.sort_by(|a, b| {
        (&a.consequent.code, &a.antecedents, a.consequent.v).cmp(&(&b.consequent.code, &b.antecedents, b.consequent.v))
    });
}
