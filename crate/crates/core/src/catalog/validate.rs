//! Structural checks on a loaded catalog. Problems are reported as
//! diagnostics rather than errors so an operator sees all of them at once.

use std::fmt;

use serde::Serialize;

use crate::catalog::{check_group_shape, Catalog, Level};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiagnosticKind {
    PrerequisiteCycle,
    CorequisiteCycle,
    LevelShortage,
    NeverOffered,
    GroupShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Course code or group name the diagnostic is about.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [{}]: {}", self.kind, self.subject, self.message)
    }
}

/// Returns every problem found; an empty list means the catalog is usable.
///
/// Prerequisite edges must be acyclic. Co-requisite edges, together with
/// prerequisite edges, must be acyclic once mutually co-requisite pairs are
/// merged into a single node (such pairs are simply taken in the same term).
pub fn validate_catalog(catalog: &Catalog) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = catalog.len();
    let courses = catalog.courses();
    let idx = |code: &str| catalog.index_of(code).expect("catalog codes are resolved");

    // prereq[j] lists i for every edge i -> j
    let mut prereq_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut coreq_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, course) in courses.iter().enumerate() {
        for code in course.prereq.codes() {
            prereq_edges[j].push(idx(code));
        }
        for code in course.coreq.codes() {
            coreq_edges[j].push(idx(code));
        }
    }

    for scc in cycles(n, |v| prereq_edges[v].clone()) {
        out.push(cycle_diagnostic(catalog, DiagnosticKind::PrerequisiteCycle, &scc));
    }

    let mut rep: Vec<usize> = (0..n).collect();
    for j in 0..n {
        for &i in &coreq_edges[j] {
            if i != j && coreq_edges[i].contains(&j) {
                let (a, b) = (find(&mut rep, i), find(&mut rep, j));
                rep[a.max(b)] = a.min(b);
            }
        }
    }
    let comp: Vec<usize> = (0..n).map(|v| find(&mut rep, v)).collect();
    let mut merged: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for &i in &prereq_edges[j] {
            merged[comp[j]].push(comp[i]);
        }
        for &i in &coreq_edges[j] {
            if comp[i] != comp[j] || i == j {
                merged[comp[j]].push(comp[i]);
            }
        }
    }
    for scc in cycles(n, |v| merged[v].clone()) {
        let mut members: Vec<usize> = (0..n).filter(|v| scc.contains(&comp[*v])).collect();
        members.sort_unstable();
        let all_prereq = out.iter().any(|d| {
            d.kind == DiagnosticKind::PrerequisiteCycle && d.subject == courses[members[0]].code
        });
        if !all_prereq {
            out.push(cycle_diagnostic(catalog, DiagnosticKind::CorequisiteCycle, &members));
        }
    }

    let l4 = catalog.level_set(Level::L4).len();
    let l5 = catalog.level_set(Level::L5).len();
    let l6 = catalog.level_set(Level::L6).len();
    if l5 > 0 && l4 < 4 {
        out.push(Diagnostic {
            kind: DiagnosticKind::LevelShortage,
            subject: "L4".to_string(),
            message: format!("{l5} Level-5 courses need 4 Level-4 courses, only {l4} exist"),
        });
    }
    if l6 > 0 && l5 < 4 {
        out.push(Diagnostic {
            kind: DiagnosticKind::LevelShortage,
            subject: "L5".to_string(),
            message: format!("{l6} Level-6 courses need 4 Level-5 courses, only {l5} exist"),
        });
    }

    let s_max = catalog.calendar().s_max;
    for course in courses {
        if !course.offered.iter().any(|t| t.get() <= s_max) {
            out.push(Diagnostic {
                kind: DiagnosticKind::NeverOffered,
                subject: course.code.clone(),
                message: format!("not offered in any term 1..{s_max}"),
            });
        }
    }

    for group in catalog.groups() {
        if let Err(e) = check_group_shape(group) {
            out.push(Diagnostic {
                kind: DiagnosticKind::GroupShape,
                subject: group.name.clone(),
                message: e.to_string(),
            });
        }
    }
    out
}

fn find(rep: &mut [usize], mut v: usize) -> usize {
    while rep[v] != v {
        rep[v] = rep[rep[v]];
        v = rep[v];
    }
    v
}

fn cycle_diagnostic(catalog: &Catalog, kind: DiagnosticKind, members: &[usize]) -> Diagnostic {
    let codes: Vec<&str> = members.iter().map(|&i| catalog.courses()[i].code.as_str()).collect();
    Diagnostic {
        kind,
        subject: codes[0].to_string(),
        message: format!("requisite cycle through {}", codes.join(", ")),
    }
}

/// Strongly connected components that contain a cycle (size > 1, or a
/// self-loop), each sorted, in order of their smallest member.
fn cycles(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    let adj: Vec<Vec<usize>> = (0..n).map(&succ).collect();
    let mut st = State {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for root in 0..n {
        if st.index[root].is_some() {
            continue;
        }
        // iterative Tarjan: (vertex, next child position)
        let mut work = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut pos)) = work.last_mut() {
            if *pos == 0 && st.index[v].is_none() {
                st.index[v] = Some(st.next);
                st.low[v] = st.next;
                st.next += 1;
                st.stack.push(v);
                st.on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                match st.index[w] {
                    None => work.push((w, 0)),
                    Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                    Some(_) => {}
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                st.low[parent] = st.low[parent].min(st.low[v]);
            }
            if Some(st.low[v]) == st.index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = st.stack.pop().expect("tarjan stack");
                    st.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                if comp.len() > 1 || adj[v].contains(&v) {
                    comp.sort_unstable();
                    st.out.push(comp);
                }
            }
        }
    }
    st.out.sort();
    st.out
}
