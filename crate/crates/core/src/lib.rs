//! Degree-plan optimization for a single student.
//!
//! The crate turns a course [`catalog`], a student transcript and planning
//! preferences into a mixed-integer linear program ([`model`]), solves it
//! ([`solver`]), and decodes the result into a per-term plan ([`planner`]).
//! Grade estimates for the expected-GPA objective come from association
//! rules mined over historical records ([`rules`]).

pub mod catalog;
pub mod error;
pub mod grade;
pub mod milp;
pub mod model;
pub mod planner;
pub mod prereq;
pub mod rules;
pub mod solver;
pub mod term;
