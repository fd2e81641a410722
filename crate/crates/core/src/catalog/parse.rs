use std::collections::BTreeSet;

use crate::catalog::{check_group_shape, is_valid_code, Calendar, Course, CourseGroup, GroupKind, GroupMode, RequisiteExpr};
use crate::error::{CatalogError, TermError};
use crate::term::{Anchor, TermIndex};

pub const COURSES_HEADER: &str = "id,code,synonyms,title,credits,difficulty,prereq,coreq,display_name,terms";
pub const GROUPS_HEADER: &str = "name,mode,count,per_term,members";

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, file: &'static str, expected: &str) -> Result<(), CatalogError> {
    let found = rdr
        .headers()
        .map_err(|e| CatalogError::Row {
            file,
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if found != expected {
        return Err(CatalogError::Header {
            file,
            expected: expected.to_string(),
            found,
        });
    }
    Ok(())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Parses `courses.csv`. Offering tokens before the anchor or beyond
/// `S_max` are dropped; `EVERY:FA,SP` expands to every matching term.
pub fn parse_courses(text: &str, calendar: &Calendar) -> Result<Vec<Course>, CatalogError> {
    const FILE: &str = "courses.csv";
    let mut rdr = reader(text);
    check_header(&mut rdr, FILE, COURSES_HEADER)?;
    let mut courses = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CatalogError::Row {
            file: FILE,
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = line_of(&record);
        let row_err = |message: String| CatalogError::Row { file: FILE, line, message };
        let field = |i: usize| record.get(i).unwrap_or("");

        let id: u32 = field(0).parse().map_err(|_| row_err(format!("bad id `{}`", field(0))))?;
        let code = field(1).to_string();
        if !is_valid_code(&code) {
            return Err(CatalogError::InvalidCode(code));
        }
        let synonyms = field(2).split_whitespace().map(str::to_string).collect();
        let credits: u32 = field(4)
            .parse()
            .map_err(|_| row_err(format!("bad credits `{}`", field(4))))?;
        if credits == 0 {
            return Err(CatalogError::Credits { course: code });
        }
        let difficulty: f64 = field(5)
            .parse()
            .map_err(|_| row_err(format!("bad difficulty `{}`", field(5))))?;
        if !(0.0..=10.0).contains(&difficulty) {
            return Err(CatalogError::Difficulty { course: code, value: difficulty });
        }
        let prereq = RequisiteExpr::parse(field(6)).map_err(|message| CatalogError::Requisite {
            course: code.clone(),
            message,
        })?;
        let coreq = RequisiteExpr::parse(field(7)).map_err(|message| CatalogError::Requisite {
            course: code.clone(),
            message,
        })?;
        let display_name = Some(field(8)).filter(|s| !s.is_empty()).map(str::to_string);
        let offered = parse_offerings(field(9), &calendar.anchor, calendar.s_max).map_err(|e| row_err(e.to_string()))?;

        courses.push(Course {
            id,
            code,
            synonyms,
            title: field(3).to_string(),
            display_name,
            credits,
            difficulty,
            prereq,
            coreq,
            offered,
            flags: BTreeSet::new(),
        });
    }
    Ok(courses)
}

fn parse_offerings(text: &str, anchor: &Anchor, s_max: u32) -> Result<BTreeSet<TermIndex>, TermError> {
    let mut offered = BTreeSet::new();
    for token in text.split_whitespace() {
        if let Some(seasons) = token.strip_prefix("EVERY:") {
            offered.extend(anchor.expand_every(seasons, s_max)?);
            continue;
        }
        match anchor.term_index(token) {
            Ok(t) if t.get() <= s_max => {
                offered.insert(t);
            }
            Ok(_) | Err(TermError::BeforeAnchor(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(offered)
}

/// Parses `groups.csv`. Member codes are resolved later by
/// [`Catalog::new`](crate::catalog::Catalog::new).
pub fn parse_groups(text: &str) -> Result<Vec<CourseGroup>, CatalogError> {
    const FILE: &str = "groups.csv";
    let mut rdr = reader(text);
    check_header(&mut rdr, FILE, GROUPS_HEADER)?;
    let mut groups = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CatalogError::Row {
            file: FILE,
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = line_of(&record);
        let row_err = |message: String| CatalogError::Row { file: FILE, line, message };
        let field = |i: usize| record.get(i).unwrap_or("");

        let name = field(0).to_string();
        if name.is_empty() {
            return Err(row_err("empty group name".into()));
        }
        let mode = match field(1).to_ascii_lowercase().as_str() {
            "atleast" => GroupMode::AtLeast,
            "exact" => GroupMode::Exact,
            other => return Err(row_err(format!("unknown mode `{other}`"))),
        };
        let count: u32 = field(2).parse().map_err(|_| row_err(format!("bad count `{}`", field(2))))?;
        let per_term = match field(3).to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" | "" => false,
            other => return Err(row_err(format!("bad per_term flag `{other}`"))),
        };
        let members: Vec<String> = field(4).split_whitespace().map(str::to_string).collect();
        let group = CourseGroup {
            kind: GroupKind::from_name(&name),
            name,
            members,
            count,
            mode,
            per_term,
        };
        check_group_shape(&group)?;
        groups.push(group);
    }
    Ok(groups)
}

/// Parses `calendar.cfg`: `key = value` lines, `#` comments. `anchor` is
/// required; the remaining keys default to the institutional values.
pub fn parse_calendar(text: &str) -> Result<Calendar, CatalogError> {
    let mut anchor = None;
    let mut calendar = Calendar::new(Anchor::new(0));
    let mut current = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CatalogError::Calendar { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || value.parse::<u32>().map_err(|_| err(format!("bad value `{value}` for {key}")));
        match key.to_ascii_lowercase().as_str() {
            "anchor" => anchor = Some(Anchor::parse(value).map_err(|e| err(e.to_string()))?),
            "s_max" => calendar.s_max = number()?,
            "t_c" => calendar.total_credits = number()?,
            "l_c" => calendar.liberal_credits = number()?,
            "c_max" => calendar.max_credits = number()?,
            "c_max_honors" => calendar.max_credits_honors = number()?,
            "current" => current = Some(value.to_string()),
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    calendar.anchor = anchor.ok_or(CatalogError::Calendar {
        line: 0,
        message: "missing `anchor`".into(),
    })?;
    if calendar.s_max == 0 {
        return Err(CatalogError::Calendar {
            line: 0,
            message: "S_max must be positive".into(),
        });
    }
    if let Some(token) = current {
        let t = calendar.anchor.term_index(&token).map_err(|e| CatalogError::Calendar {
            line: 0,
            message: e.to_string(),
        })?;
        calendar.current = Some(t);
    }
    Ok(calendar)
}
