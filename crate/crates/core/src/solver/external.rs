//! External solver backend.

use std::collections::HashMap;
use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::{Solution, SolverConfig, Status};
use crate::error::SolveError;
use crate::milp::{write_lp, MilpModel};

/// Extra time granted to the external process beyond the configured limit.
const GRACE: Duration = Duration::from_secs(5);

/// Parsed solution file: `None` when the file declares infeasibility.
///
/// Lines are `<name> <value>`. Blank lines, `#` comments, `=obj=` lines and
/// lines whose first token ends in `:` are skipped. Variables missing from
/// the file take value 0.
///
/// ```
/// use degreeplan::milp::MilpModel;
/// use degreeplan::solver::parse_solution;
///
/// let mut m = MilpModel::new();
/// m.add_binary("x").unwrap();
/// m.add_binary("y").unwrap();
/// let values = parse_solution(&m, "# optimal\n=obj= 1\nx 1\n").unwrap();
/// assert_eq!(values, Some(vec![1.0, 0.0]));
/// assert_eq!(parse_solution(&m, "infeasible\n").unwrap(), None);
/// ```
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<Option<Vec<f64>>, SolveError> {
    if text.to_ascii_lowercase().contains("infeasible") {
        return Ok(None);
    }
    let index: HashMap<&str, usize> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let mut values = vec![0.0; model.num_vars()];
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("=obj=") {
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next().unwrap_or_default();
        if name.ends_with(':') {
            continue;
        }
        let bad = |msg: &str| SolveError::SolutionFormat(format!("line {}: {msg}", n + 1));
        let value: f64 = parts
            .next()
            .ok_or_else(|| bad("missing value"))?
            .parse()
            .map_err(|_| bad("value is not a number"))?;
        let &i = index.get(name).ok_or_else(|| bad(&format!("unknown variable `{name}`")))?;
        values[i] = value;
    }
    Ok(Some(values))
}

fn quote(path: &std::path::Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', r"'\''"))
}

pub(crate) fn run(model: &MilpModel, config: &SolverConfig) -> Result<Solution, SolveError> {
    let template = config
        .external_command
        .as_deref()
        .filter(|c| !c.trim().is_empty())
        .ok_or_else(|| SolveError::Config("external backend needs a command".into()))?;
    if !template.contains("{lp}") || !template.contains("{sol}") {
        return Err(SolveError::Config("command must mention both {lp} and {sol}".into()));
    }
    let dir = tempfile::tempdir()?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, write_lp(model))?;
    let command = template
        .replace("{lp}", &quote(&lp_path))
        .replace("{sol}", &quote(&sol_path))
        .replace("{time}", &config.time_limit.as_secs().max(1).to_string());

    let start = Instant::now();
    let mut cmd = Command::new("sh");
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
    let mut child = cmd
        .arg("-c")
        .arg(&command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolveError::External(format!("cannot start `{command}`: {e}")))?;
    let mut stdout = child.stdout.take().expect("piped");
    let mut stderr = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let deadline = config.time_limit + GRACE;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if start.elapsed() > deadline {
            // the shell's children hold the pipes open, so end the whole group
            let _ = Command::new("kill")
                .args(["-s", "KILL", "--", &format!("-{}", child.id())])
                .stderr(Stdio::null())
                .status();
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    let solve_time = start.elapsed();
    let no_values = |status| Solution {
        status,
        objective: f64::INFINITY,
        values: Vec::new(),
        solve_time,
        nodes: 0,
    };
    let Some(status) = status else {
        return Ok(no_values(Status::TimeLimit));
    };

    let sol_text = std::fs::read_to_string(&sol_path).ok();
    let says_infeasible = |s: &str| s.to_ascii_lowercase().contains("infeasible");
    if sol_text.as_deref().is_some_and(says_infeasible) || says_infeasible(&stdout) {
        return Ok(no_values(Status::Infeasible));
    }
    let Some(text) = sol_text else {
        return Err(SolveError::External(format!(
            "`{command}` exited with {status} and wrote no solution file: {}",
            stderr.trim()
        )));
    };
    if !status.success() {
        return Err(SolveError::External(format!("`{command}` exited with {status}: {}", stderr.trim())));
    }
    let values = parse_solution(model, &text)?.expect("infeasibility handled above");
    // a solver stopped early marks its incumbent with a `# ... time limit` comment
    let stopped = text
        .lines()
        .any(|l| l.starts_with('#') && l.to_ascii_lowercase().contains("time limit"));
    Ok(Solution {
        status: if stopped { Status::TimeLimit } else { Status::Optimal },
        objective: model.objective_value(&values),
        values,
        solve_time,
        nodes: 0,
    })
}
