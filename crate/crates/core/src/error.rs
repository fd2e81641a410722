use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("malformed term token `{0}`")]
    Malformed(String),
    #[error("term `{0}` lies before the calendar anchor")]
    BeforeAnchor(String),
    #[error("calendar anchor `{0}` must be a Fall term")]
    AnchorNotFall(String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GradeError {
    #[error("grade {0} outside [0, 4]")]
    OutOfRange(f64),
    #[error("malformed grade `{0}`")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{file}: expected header `{expected}`, found `{found}`")]
    Header {
        file: &'static str,
        expected: String,
        found: String,
    },
    #[error("{file} line {line}: {message}")]
    Row {
        file: &'static str,
        line: u64,
        message: String,
    },
    #[error("duplicate course code or synonym `{0}`")]
    DuplicateCode(String),
    #[error("duplicate course id {0}")]
    DuplicateId(u32),
    #[error("invalid course code `{0}`")]
    InvalidCode(String),
    #[error("{context} references unknown course `{code}`")]
    UnknownCode { context: String, code: String },
    #[error("course {course}: bad requisite expression: {message}")]
    Requisite { course: String, message: String },
    #[error("course {course}: credits must be at least 1")]
    Credits { course: String },
    #[error("course {course}: difficulty {value} outside [0, 10]")]
    Difficulty { course: String, value: f64 },
    #[error("duplicate group name `{0}`")]
    DuplicateGroup(String),
    #[error("group {group}: count {count} exceeds its {members} members")]
    GroupCount {
        group: String,
        count: u32,
        members: usize,
    },
    #[error("soft-order group {group} must list exactly two courses, found {members}")]
    SoftOrderArity { group: String, members: usize },
    #[error("course {0} belongs to more than one level set")]
    LevelConflict(String),
    #[error("calendar.cfg line {line}: {message}")]
    Calendar { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("transcript line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("transcript: unknown course `{0}`")]
    UnknownCode(String),
    #[error("transcript lists course {0} more than once")]
    DuplicateCourse(String),
    #[error("transcript: course {code}: {source}")]
    Grade {
        code: String,
        #[source]
        source: GradeError,
    },
    #[error("transcript: {0}")]
    Term(#[from] TermError),
    #[error("transcript: course {code} completed in term {term}, not before current term {current}")]
    NotInPast { code: String, term: u32, current: u32 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("variable name `{0}` is already registered")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("variable `{name}` has invalid bounds")]
    InvalidBounds { name: String },
    #[error("unknown variable id {0}")]
    UnknownVariable(usize),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("invalid preferences: {0}")]
    InvalidPreferences(String),
    #[error("infeasible by construction: {message}")]
    InfeasibleByConstruction { message: String, tags: Vec<String> },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver configuration: {0}")]
    Config(String),
    #[error("external solver: {0}")]
    External(String),
    #[error("solution file: {0}")]
    SolutionFormat(String),
    #[error("solution labeled optimal fails verification: {0}")]
    Unverified(String),
    #[error("linear relaxation: {0}")]
    Relaxation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DecodeError {
    #[error("solution is not usable (status {0})")]
    NotSolved(String),
    #[error("binary variable {name} has fractional value {value}")]
    FractionalBinary { name: String, value: f64 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EditError {
    #[error("course {0} is already passed and cannot be edited")]
    PassedCourse(String),
    #[error("unknown course `{0}`")]
    UnknownCourse(String),
    #[error("move of {0} lists no terms")]
    EmptyTerms(String),
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("{file} line {line}: {message}")]
    Row {
        file: &'static str,
        line: u64,
        message: String,
    },
    #[error("{file}: expected header `{expected}`")]
    Header { file: &'static str, expected: String },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown course `{0}`")]
pub struct UnknownCourse(pub String);
