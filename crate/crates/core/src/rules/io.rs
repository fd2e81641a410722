//! `records.csv` and `rules.csv`.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Atom, GradeDataset, QRule, RuleSet};
use crate::error::RuleError;
use crate::grade::Grade;

pub const RECORDS_HEADER: &str = "student_id,code,grade";
pub const RULES_HEADER: &str = "antecedents;consequent;support;confidence";

/// Long-format grade records, one `student_id,code,grade` per line. Rows of
/// the same student need not be adjacent; students keep first-seen order.
pub fn parse_records(text: &str) -> Result<GradeDataset, RuleError> {
    const FILE: &str = "records.csv";
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| RuleError::Row { file: FILE, line: 1, message: e.to_string() })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != RECORDS_HEADER {
        return Err(RuleError::Header { file: FILE, expected: RECORDS_HEADER.into() });
    }
    let mut order: Vec<String> = Vec::new();
    let mut rows: BTreeMap<String, BTreeMap<String, Grade>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| RuleError::Row {
            file: FILE,
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| RuleError::Row { file: FILE, line, message };
        let (student, code, grade) = match (record.get(0), record.get(1), record.get(2)) {
            (Some(s), Some(c), Some(g)) if !s.is_empty() && !c.is_empty() => (s, c, g),
            _ => return Err(bad("expected student_id, code and grade".into())),
        };
        let grade: Grade = grade.parse().map_err(|e| bad(format!("{e}")))?;
        let row = rows.entry(student.to_string()).or_insert_with(|| {
            order.push(student.to_string());
            BTreeMap::new()
        });
        if row.insert(code.to_string(), grade).is_some() {
            return Err(bad(format!("student {student} has two grades for {code}")));
        }
    }
    let mut data = GradeDataset::new();
    for student in order {
        let row = rows.remove(&student).expect("recorded");
        data.push(student, row);
    }
    Ok(data)
}

/// Writes `rules.csv`. Support and confidence are written with enough digits
/// to read back exactly.
pub fn write_rules(rules: &RuleSet) -> String {
    let mut out = String::from(RULES_HEADER);
    out.push('\n');
    for r in rules.iter() {
        let lhs: Vec<String> = r.antecedents.iter().map(Atom::to_string).collect();
        let _ = writeln!(out, "{};{};{:?};{:?}", lhs.join("&"), r.consequent, r.support, r.confidence);
    }
    out
}

pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    const FILE: &str = "rules.csv";
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == RULES_HEADER => {}
        _ => return Err(RuleError::Header { file: FILE, expected: RULES_HEADER.into() }),
    }
    let mut rules = Vec::new();
    for (i, line) in lines {
        let bad = |message: &str| RuleError::Row { file: FILE, line: i as u64 + 1, message: message.to_string() };
        let fields: Vec<&str> = line.split(';').map(str::trim).collect();
        let [lhs, rhs, support, confidence] = fields[..] else {
            return Err(bad("expected four `;`-separated fields"));
        };
        let atom = |s: &str| -> Result<Atom, RuleError> {
            let (code, v) = s.split_once(">=").ok_or_else(|| bad("atom must look like CODE>=v"))?;
            let v: Grade = v.trim().parse().map_err(|_| bad("bad grade in atom"))?;
            Ok(Atom::new(code.trim(), v))
        };
        let antecedents = lhs.split('&').map(atom).collect::<Result<Vec<_>, _>>()?;
        let consequent = atom(rhs)?;
        if antecedents.is_empty() || antecedents.len() > 3 {
            return Err(bad("a rule needs one to three antecedents"));
        }
        if antecedents.iter().any(|a| a.code == consequent.code) {
            return Err(bad("consequent course also appears as an antecedent"));
        }
        let num = |s: &str| s.parse::<f64>().ok().filter(|x| (0.0..=1.0).contains(x));
        let (Some(support), Some(confidence)) = (num(support), num(confidence)) else {
            return Err(bad("support and confidence must be fractions"));
        };
        rules.push(QRule { antecedents, consequent, support, confidence });
    }
    Ok(RuleSet { rules })
}
