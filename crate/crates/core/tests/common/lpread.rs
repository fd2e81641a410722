//! Minimal reader for the LP text the model writer emits.

use std::collections::BTreeMap;

#[derive(Debug, Default)]
pub struct LpFile {
    pub objective: BTreeMap<String, f64>,
    /// `(name, coefficients, sense, rhs)` in file order.
    pub rows: Vec<(String, BTreeMap<String, f64>, String, f64)>,
    /// Variables with explicit bounds: `(lower, upper)`.
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub binaries: Vec<String>,
}

fn number(s: &str) -> f64 {
    match s {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        "-inf" | "-infinity" => f64::NEG_INFINITY,
        _ => s.parse().unwrap_or_else(|_| panic!("bad number `{s}`")),
    }
}

/// Parses `[+|-] [coef] name ...` into a coefficient map.
fn linear(tokens: &[&str]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    let mut sign = 1.0;
    let mut coef = None;
    for tok in tokens {
        match *tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            t if t.parse::<f64>().is_ok() => coef = Some(t.parse::<f64>().unwrap()),
            name => {
                *out.entry(name.to_string()).or_insert(0.0) += sign * coef.unwrap_or(1.0);
                sign = 1.0;
                coef = None;
            }
        }
    }
    out
}

pub fn parse(text: &str) -> LpFile {
    let mut lp = LpFile::default();
    let mut section = "";
    // join continuation lines (leading space, no label) onto the previous entry
    let mut entries: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if line.starts_with('\\') || line.is_empty() {
            continue;
        }
        if !line.starts_with(' ') {
            section = match line {
                "Minimize" => "obj",
                "Subject To" => "rows",
                "Bounds" => "bounds",
                "Binary" => "bin",
                "End" => "end",
                other => panic!("unknown section `{other}`"),
            };
            continue;
        }
        let starts_entry = match section {
            "obj" | "rows" => line.trim_start().split_whitespace().next().is_some_and(|t| t.ends_with(':')),
            _ => true,
        };
        if starts_entry || entries.is_empty() || section == "bin" && entries.last().unwrap().0 != "bin" {
            entries.push((section.to_string(), line.trim().to_string()));
        } else {
            let last = entries.last_mut().unwrap();
            last.1.push(' ');
            last.1.push_str(line.trim());
        }
    }
    for (section, body) in entries {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match section.as_str() {
            "obj" => lp.objective = linear(&tokens[1..]),
            "rows" => {
                let name = tokens[0].trim_end_matches(':').to_string();
                let n = tokens.len();
                lp.rows.push((name, linear(&tokens[1..n - 2]), tokens[n - 2].to_string(), number(tokens[n - 1])));
            }
            "bounds" => match tokens.as_slice() {
                [name, "=", v] => {
                    lp.bounds.insert(name.to_string(), (number(v), number(v)));
                }
                [name, "free"] => {
                    lp.bounds.insert(name.to_string(), (f64::NEG_INFINITY, f64::INFINITY));
                }
                [lo, "<=", name, "<=", hi] => {
                    lp.bounds.insert(name.to_string(), (number(lo), number(hi)));
                }
                other => panic!("bad bound line {other:?}"),
            },
            "bin" => lp.binaries.extend(tokens.iter().map(|s| s.to_string())),
            _ => {}
        }
    }
    lp
}
