use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::TranscriptError;
use crate::grade::Grade;
use crate::term::TermIndex;

pub const TRANSCRIPT_HEADER: &str = "code,grade,term";

/// One passed course. `term` is `None` for transfer credit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub code: String,
    pub grade: Grade,
    pub term: Option<TermIndex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
    current: TermIndex,
    #[serde(skip)]
    by_code: BTreeMap<String, usize>,
}

impl Transcript {
    /// A student with nothing passed, planning from the calendar's current
    /// term (or term 1).
    pub fn empty(catalog: &Catalog) -> Transcript {
        Transcript::new(Vec::new(), None, catalog).expect("empty transcript is always valid")
    }

    /// Normalizes codes through the synonym table and fixes the current term:
    /// `current` if given, else the calendar's, else one past the latest
    /// entry.
    pub fn new(entries: Vec<TranscriptEntry>, current: Option<TermIndex>, catalog: &Catalog) -> Result<Transcript, TranscriptError> {
        let mut normalized = Vec::with_capacity(entries.len());
        let mut by_code = BTreeMap::new();
        for mut entry in entries {
            let canonical = catalog
                .canonical(&entry.code)
                .ok_or_else(|| TranscriptError::UnknownCode(entry.code.clone()))?;
            entry.code = canonical.to_string();
            if by_code.insert(entry.code.clone(), normalized.len()).is_some() {
                return Err(TranscriptError::DuplicateCourse(entry.code));
            }
            normalized.push(entry);
        }
        let latest = normalized.iter().filter_map(|e| e.term).max();
        let current = match current.or(catalog.calendar().current) {
            Some(t) => t,
            None => TermIndex::new(latest.map_or(1, |t| t.get() + 1))?,
        };
        for e in &normalized {
            if let Some(t) = e.term {
                if t >= current {
                    return Err(TranscriptError::NotInPast {
                        code: e.code.clone(),
                        term: t.get(),
                        current: current.get(),
                    });
                }
            }
        }
        Ok(Transcript { entries: normalized, current, by_code })
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `s_n`, the first term open for planning.
    pub fn current_term(&self) -> TermIndex {
        self.current
    }

    pub fn passed(&self, code: &str) -> bool {
        self.by_code.contains_key(code)
    }

    pub fn grade(&self, code: &str) -> Option<Grade> {
        self.by_code.get(code).map(|&i| self.entries[i].grade)
    }

    pub fn earned_credits(&self, catalog: &Catalog) -> u32 {
        self.entries
            .iter()
            .filter_map(|e| catalog.course(&e.code))
            .map(|c| c.credits)
            .sum()
    }
}

/// Parses `transcript.csv` (`code,grade,term`, term a token or `TRANSFER`).
/// An empty file is a freshman transcript.
pub fn parse_transcript(text: &str, catalog: &Catalog) -> Result<Transcript, TranscriptError> {
    if text.trim().is_empty() {
        return Ok(Transcript::empty(catalog));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| TranscriptError::Row { line: 1, message: e.to_string() })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != TRANSCRIPT_HEADER {
        return Err(TranscriptError::Row {
            line: 1,
            message: format!("expected header `{TRANSCRIPT_HEADER}`, found `{header}`"),
        });
    }
    let anchor = catalog.calendar().anchor;
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| TranscriptError::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let code = field(0).to_string();
        let grade = field(1)
            .parse::<Grade>()
            .map_err(|source| TranscriptError::Grade { code: code.clone(), source })?;
        let term = match field(2) {
            t if t.eq_ignore_ascii_case("TRANSFER") => None,
            t => Some(anchor.term_index(t)?),
        };
        entries.push(TranscriptEntry { code, grade, term });
    }
    Transcript::new(entries, None, catalog)
}
