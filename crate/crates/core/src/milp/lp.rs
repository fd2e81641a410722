//! CPLEX LP text output.

use std::collections::HashSet;
use std::fmt::Write;

use super::{MilpModel, VarId, VarKind};

const LINE_WIDTH: usize = 200;

/// Formats a coefficient: integers plainly, otherwise up to 12 significant
/// digits with trailing zeros trimmed. Scientific notation is only used for
/// magnitudes below 1e-4.
///
/// ```
/// use degreeplan::milp::format_number;
/// assert_eq!(format_number(0.2), "0.2");
/// assert_eq!(format_number(-1000.0), "-1000");
/// assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
/// ```
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let magnitude = x.abs().log10().floor() as i32;
    if x.abs() < 1e-4 {
        let s = format!("{:.11e}", x);
        let (mantissa, exp) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Row name derived from a tag: `:` becomes `_`, characters outside
/// `[A-Za-z0-9_]` are dropped, and a leading digit gets an `r` prefix.
fn row_name(tag: &str) -> String {
    let mut out: String = tag
        .chars()
        .filter_map(|c| match c {
            ':' | '-' => Some('_'),
            c if c.is_ascii_alphanumeric() || c == '_' => Some(c),
            _ => None,
        })
        .collect();
    if out.is_empty() || !out.starts_with(|c: char| c.is_ascii_alphabetic()) {
        out.insert(0, 'r');
    }
    out
}

struct Wrapped<'a> {
    out: &'a mut String,
    line_len: usize,
}

impl Wrapped<'_> {
    fn push(&mut self, piece: &str) {
        if self.line_len + piece.len() + 1 > LINE_WIDTH {
            self.out.push_str("\n ");
            self.line_len = 1;
        }
        self.out.push(' ');
        self.out.push_str(piece);
        self.line_len += piece.len() + 1;
    }
}

fn write_terms(w: &mut Wrapped<'_>, model: &MilpModel, terms: &[(f64, VarId)]) {
    if terms.is_empty() {
        if let Some(first) = model.variables.first() {
            w.push(&format!("0 {}", first.name));
        }
        return;
    }
    for (i, &(c, v)) in terms.iter().enumerate() {
        let name = &model.variables[v.0].name;
        let piece = match (i, c) {
            (0, c) if c == 1.0 => name.clone(),
            (0, c) if c == -1.0 => format!("- {name}"),
            (0, c) => format!("{} {name}", format_number(c)),
            (_, c) if c == 1.0 => format!("+ {name}"),
            (_, c) if c == -1.0 => format!("- {name}"),
            (_, c) if c < 0.0 => format!("- {} {name}", format_number(-c)),
            (_, c) => format!("+ {} {name}", format_number(c)),
        };
        w.push(&piece);
    }
}

/// Serializes the model. Output depends only on the model, so identical
/// models give byte-identical text.
///
/// ```
/// use degreeplan::milp::{write_lp, MilpModel, Sense};
///
/// let mut m = MilpModel::new();
/// let x = m.add_binary("x").unwrap();
/// let y = m.add_binary("y").unwrap();
/// m.set_objective([(1.0, x), (2.0, y)]).unwrap();
/// m.add_constraint([(1.0, x), (1.0, y)], Sense::Ge, 1.0, "c0").unwrap();
/// let lp = write_lp(&m);
/// assert!(lp.contains("Minimize\n obj: x + 2 y\n"));
/// assert!(lp.contains(" c0: x + y >= 1\n"));
/// assert!(lp.contains("Binary\n x y\n"));
/// assert!(lp.ends_with("End\n"));
/// ```
pub fn write_lp(model: &MilpModel) -> String {
    let mut out = String::with_capacity(64 * (model.constraints.len() + model.variables.len()));
    out.push_str("\\ degree plan model\nMinimize\n");
    {
        let mut w = Wrapped { out: &mut out, line_len: 0 };
        w.push("obj:");
        write_terms(&mut w, model, &model.objective);
    }
    out.push_str("\nSubject To\n");
    let mut used: HashSet<String> = HashSet::new();
    for row in &model.constraints {
        let base = row_name(&row.tag);
        let mut name = base.clone();
        let mut k = 2;
        while !used.insert(name.clone()) {
            name = format!("{base}_{k}");
            k += 1;
        }
        let mut w = Wrapped { out: &mut out, line_len: 0 };
        w.push(&format!("{name}:"));
        write_terms(&mut w, model, &row.terms);
        w.push(row.sense.symbol());
        w.push(&format_number(row.rhs));
        out.push('\n');
    }
    out.push_str("Bounds\n");
    for var in &model.variables {
        let (lo, hi) = (var.lower, var.upper);
        match var.kind {
            VarKind::Binary if lo == hi => {
                let _ = writeln!(out, " {} = {}", var.name, format_number(lo));
            }
            VarKind::Binary => {}
            VarKind::Continuous if lo == hi => {
                let _ = writeln!(out, " {} = {}", var.name, format_number(lo));
            }
            VarKind::Continuous if lo == f64::NEG_INFINITY && hi == f64::INFINITY => {
                let _ = writeln!(out, " {} free", var.name);
            }
            VarKind::Continuous => {
                let _ = writeln!(out, " {} <= {} <= {}", format_number(lo), var.name, format_number(hi));
            }
        }
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        let mut w = Wrapped { out: &mut out, line_len: 0 };
        for name in binaries {
            w.push(name);
        }
        out.push('\n');
    }
    out.push_str("End\n");
    out
}
