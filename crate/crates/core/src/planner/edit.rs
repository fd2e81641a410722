//! Student edits between optimization rounds.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, Transcript};
use crate::error::EditError;
use crate::model::Preferences;
use crate::term::TermIndex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EditAction {
    /// Take the course in one of these terms. A single term pins it.
    MoveToTerms(BTreeSet<TermIndex>),
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCommand {
    pub code: String,
    pub action: EditAction,
}

impl EditCommand {
    pub fn reject(code: impl Into<String>) -> EditCommand {
        EditCommand { code: code.into(), action: EditAction::Reject }
    }

    pub fn move_to(code: impl Into<String>, terms: impl IntoIterator<Item = TermIndex>) -> EditCommand {
        EditCommand { code: code.into(), action: EditAction::MoveToTerms(terms.into_iter().collect()) }
    }
}

/// Preferences for the next round. Applying the same edits twice gives the
/// same result as applying them once.
pub fn apply_edits(
    prefs: &Preferences,
    edits: &[EditCommand],
    catalog: &Catalog,
    transcript: &Transcript,
) -> Result<Preferences, EditError> {
    let mut out = prefs.clone();
    for edit in edits {
        let code = catalog
            .canonical(&edit.code)
            .ok_or_else(|| EditError::UnknownCourse(edit.code.clone()))?
            .to_string();
        if transcript.passed(&code) {
            return Err(EditError::PassedCourse(code));
        }
        // earlier placements may use a synonym
        let same = |c: &String| catalog.canonical(c) == Some(code.as_str());
        out.pins.retain(|c, _| !same(c));
        out.windows.retain(|c, _| !same(c));
        match &edit.action {
            EditAction::Reject => {
                out.desired.retain(|c| !same(c));
                out.rejected.insert(code);
            }
            EditAction::MoveToTerms(terms) => {
                out.rejected.retain(|c| !same(c));
                match terms.len() {
                    0 => return Err(EditError::EmptyTerms(code)),
                    1 => {
                        out.pins.insert(code, *terms.first().expect("one term"));
                    }
                    _ => {
                        out.windows.insert(code, terms.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}
