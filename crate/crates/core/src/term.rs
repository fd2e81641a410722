//! Academic term calendar.
//!
//! Terms are numbered from 1 within a five-term academic year that starts in
//! the Fall: Fall=1, Spring=2, Summer1=3, Summer2=4, SummerTerm=5, then the
//! next Fall is 6 and so on. Term 0 is reserved for work completed before the
//! student's first registration (transfer credit), and is represented
//! separately rather than as a `TermIndex`.
//!
//! SummerTerm runs concurrently with Summer1 and Summer2, so a course taken
//! in either of those sessions does not count as completed before a
//! SummerTerm course of the same year. [`k_of`] captures that offset.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::TermError;

/// Number of terms in one academic year.
pub const TERMS_PER_YEAR: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Season {
    Fall,
    Spring,
    Summer1,
    Summer2,
    SummerTerm,
}

impl Season {
    pub const ALL: [Season; 5] = [
        Season::Fall,
        Season::Spring,
        Season::Summer1,
        Season::Summer2,
        Season::SummerTerm,
    ];

    /// Position within the academic year, 1..=5.
    pub fn offset(self) -> u32 {
        match self {
            Season::Fall => 1,
            Season::Spring => 2,
            Season::Summer1 => 3,
            Season::Summer2 => 4,
            Season::SummerTerm => 5,
        }
    }

    /// Two-letter token prefix (`FA`, `SP`, `S1`, `S2`, `ST`).
    pub fn prefix(self) -> &'static str {
        match self {
            Season::Fall => "FA",
            Season::Spring => "SP",
            Season::Summer1 => "S1",
            Season::Summer2 => "S2",
            Season::SummerTerm => "ST",
        }
    }

    pub fn from_prefix(prefix: &str) -> Option<Season> {
        Season::ALL.into_iter().find(|s| s.prefix() == prefix)
    }

    /// Fall and Spring are the regular semesters; everything else is summer.
    pub fn is_summer(self) -> bool {
        !matches!(self, Season::Fall | Season::Spring)
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// A registration term, `s >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct TermIndex(u32);

impl TermIndex {
    pub fn new(s: u32) -> Result<TermIndex, TermError> {
        if s == 0 {
            return Err(TermError::BeforeAnchor(String::from("term 0")));
        }
        Ok(TermIndex(s))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn season(self) -> Season {
        match self.0 % TERMS_PER_YEAR {
            1 => Season::Fall,
            2 => Season::Spring,
            3 => Season::Summer1,
            4 => Season::Summer2,
            _ => Season::SummerTerm,
        }
    }

    /// Whole academic years elapsed since the anchor year.
    pub fn academic_year_offset(self) -> u32 {
        (self.0 - 1) / TERMS_PER_YEAR
    }

    /// The term offset used by requisite sums; see [`k_of`].
    pub fn k(self) -> u32 {
        k_of(self.0)
    }

    /// Latest term whose completions count as "before" this one.
    pub fn last_completed_before(self) -> u32 {
        self.0 - self.k()
    }

    /// Iterator over `1..=s_max`.
    pub fn range(s_max: u32) -> impl Iterator<Item = TermIndex> {
        (1..=s_max).map(TermIndex)
    }
}

impl TryFrom<u32> for TermIndex {
    type Error = TermError;

    fn try_from(s: u32) -> Result<Self, Self::Error> {
        TermIndex::new(s)
    }
}

impl From<TermIndex> for u32 {
    fn from(t: TermIndex) -> u32 {
        t.0
    }
}

impl fmt::Display for TermIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Requisite offset for term `s`: 3 for SummerTerm (`s % 5 == 0`), else 1.
///
/// A requisite counts as satisfied for registration in term `s` when it was
/// completed at some `t <= s - k_of(s)`.
///
/// ```
/// use degreeplan::term::k_of;
/// assert_eq!(k_of(5), 3);
/// assert_eq!(k_of(3), 1);
/// assert_eq!(k_of(10), 3);
/// ```
pub fn k_of(s: u32) -> u32 {
    if s.is_multiple_of(TERMS_PER_YEAR) {
        3
    } else {
        1
    }
}

/// Calendar year of the Fall term numbered 1.
///
/// Term tokens carry a season and a calendar year; Spring and the summer
/// sessions belong to the academic year that started the previous Fall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Anchor {
    pub fall_year: i32,
}

impl Anchor {
    pub fn new(fall_year: i32) -> Anchor {
        Anchor { fall_year }
    }

    /// Parses an anchor token; only Fall tokens are accepted since term 1 is
    /// a Fall by construction.
    pub fn parse(token: &str) -> Result<Anchor, TermError> {
        let (season, year) = split_token(token)?;
        if season != Season::Fall {
            return Err(TermError::AnchorNotFall(token.to_string()));
        }
        Ok(Anchor { fall_year: year })
    }

    /// Resolves a token such as `SP2024` to its term number.
    pub fn term_index(&self, token: &str) -> Result<TermIndex, TermError> {
        let (season, year) = split_token(token)?;
        let academic_year = if season == Season::Fall { year } else { year - 1 };
        let s = 5 * i64::from(academic_year - self.fall_year) + i64::from(season.offset());
        if s < 1 {
            return Err(TermError::BeforeAnchor(token.to_string()));
        }
        u32::try_from(s)
            .map(TermIndex)
            .map_err(|_| TermError::Malformed(token.to_string()))
    }

    /// Inverse of [`Anchor::term_index`].
    pub fn token(&self, term: TermIndex) -> String {
        let season = term.season();
        let academic_year = self.fall_year + term.academic_year_offset() as i32;
        let year = if season == Season::Fall { academic_year } else { academic_year + 1 };
        format!("{}{}", season.prefix(), year)
    }

    /// Expands a repeat directive body such as `FA,SP` into every matching
    /// term up to `s_max`.
    pub fn expand_every(&self, seasons: &str, s_max: u32) -> Result<Vec<TermIndex>, TermError> {
        let mut wanted = Vec::new();
        for part in seasons.split([',', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("ALL") {
                wanted.extend(Season::ALL);
                continue;
            }
            let season = Season::from_prefix(&part.to_ascii_uppercase())
                .ok_or_else(|| TermError::Malformed(format!("EVERY:{seasons}")))?;
            wanted.push(season);
        }
        if wanted.is_empty() {
            return Err(TermError::Malformed(format!("EVERY:{seasons}")));
        }
        Ok(TermIndex::range(s_max).filter(|t| wanted.contains(&t.season())).collect())
    }
}

impl FromStr for Anchor {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Anchor::parse(s)
    }
}

fn split_token(token: &str) -> Result<(Season, i32), TermError> {
    let token = token.trim();
    let malformed = || TermError::Malformed(token.to_string());
    if token.len() != 6 || !token.is_ascii() {
        return Err(malformed());
    }
    let (prefix, year) = token.split_at(2);
    let season = Season::from_prefix(prefix).ok_or_else(malformed)?;
    if !year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let year = year.parse().map_err(|_| malformed())?;
    Ok((season, year))
}
