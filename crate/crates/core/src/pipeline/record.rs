use serde::{Deserialize, Serialize};

use crate::code::ControlCode;
use crate::expr::{Equation, EquationSet};
use crate::infix::{parse_equation, print_infix};
use crate::oracle::Verdict;

/// A templated problem: the text mentions `n_1..n_k`, whose values are
/// `givens[0..k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MwpRecord {
    pub id: String,
    pub text: String,
    pub givens: Vec<f64>,
    pub equations: EquationSet,
    pub answers: Option<Vec<f64>>,
}

/// One line of normalized JSONL.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub id: String,
    pub text: String,
    pub givens: Vec<f64>,
    pub equations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answers: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("record {record_id}: {cause}")]
pub struct FormatError {
    pub record_id: String,
    pub cause: String,
}

impl FormatError {
    pub fn new(record_id: impl Into<String>, cause: impl ToString) -> Self {
        FormatError { record_id: record_id.into(), cause: cause.to_string() }
    }
}

impl MwpRecord {
    /// Validates and builds a record. Returns soft warnings alongside.
    pub fn new(
        id: String,
        text: String,
        givens: Vec<f64>,
        equations: Vec<Equation>,
        answers: Option<Vec<f64>>,
    ) -> Result<(Self, Vec<String>), FormatError> {
        let equations = EquationSet::new(equations).map_err(|e| FormatError::new(&id, e))?;
        if let Some(&i) = equations.givens().iter().find(|&&i| i as usize > givens.len()) {
            return Err(FormatError::new(&id, format!("n_{i} used but only {} givens", givens.len())));
        }
        if givens.iter().any(|v| !v.is_finite()) {
            return Err(FormatError::new(&id, "non-finite given value"));
        }
        let warnings = (1..=givens.len())
            .filter(|i| !mentions_token(&text, &format!("n_{i}")))
            .map(|i| format!("record {id}: text does not mention n_{i}"))
            .collect();
        Ok((MwpRecord { id, text, givens, equations, answers }, warnings))
    }

    pub fn to_line(&self) -> RecordLine {
        RecordLine {
            id: self.id.clone(),
            text: self.text.clone(),
            givens: self.givens.clone(),
            equations: self.equations.equations().iter().map(print_infix).collect(),
            answers: self.answers.clone(),
        }
    }

    pub fn from_line(line: RecordLine) -> Result<(Self, Vec<String>), FormatError> {
        let equations = line
            .equations
            .iter()
            .map(|s| parse_equation(s).map_err(|e| FormatError::new(&line.id, format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        MwpRecord::new(line.id, line.text, line.givens, equations, line.answers)
    }
}

/// `token` appears in `text` not followed by another digit (so `n_1` does
/// not match inside `n_12`).
fn mentions_token(text: &str, token: &str) -> bool {
    text.match_indices(token).any(|(at, _)| {
        !text[at + token.len()..].starts_with(|c: char| c.is_ascii_digit())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verified {
    Equivalent,
    Inconclusive,
    /// Verification was switched off.
    Unverified,
}

/// One training example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentedRecord {
    /// `<source id>-<code name>`.
    pub id: String,
    pub code: ControlCode,
    pub input: String,
    /// Space-joined prefix tokens of the universal expression tree.
    pub target: String,
    pub verified: Verified,
}

impl AugmentedRecord {
    pub fn make_id(source_id: &str, code: ControlCode) -> String {
        format!("{source_id}-{}", code.name())
    }

    /// Source record id, recovered by stripping the code suffix.
    pub fn source_id(&self) -> Option<&str> {
        self.id.strip_suffix(&format!("-{}", self.code.name()))
    }
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportLine {
    pub id: String,
    pub code: ControlCode,
    #[serde(flatten)]
    pub verdict: ReportVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportVerdict {
    Oracle(Verdict),
    Problem { verdict: ProblemKind, detail: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// No source record has this id.
    IdMismatch,
    /// The target does not parse back into an equation set.
    MalformedTarget,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_mentions_respect_digit_boundaries() {
        assert!(mentions_token("a n_1 b", "n_1"));
        assert!(mentions_token("n_1.", "n_1"));
        assert!(!mentions_token("a n_12 b", "n_1"));
        assert!(mentions_token("a n_12 n_1", "n_1"));
    }

    #[test]
    fn record_invariants() {
        let eq = parse_equation("x_1 = n_1 + n_3").unwrap();
        let err = MwpRecord::new("r".into(), "n_1 n_2".into(), vec![1.0, 2.0], vec![eq], None).unwrap_err();
        assert!(err.cause.contains("n_3"));

        let eq = parse_equation("x_1 = n_1 + n_2").unwrap();
        let (_, warnings) = MwpRecord::new("r".into(), "only n_1".into(), vec![1.0, 2.0], vec![eq], None).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn report_line_json() {
        let line = ReportLine { id: "a-add".into(), code: ControlCode::Add, verdict: ReportVerdict::Oracle(Verdict::Equivalent) };
        assert_eq!(serde_json::to_string(&line).unwrap(), r#"{"id":"a-add","code":"add","verdict":"equivalent"}"#);
        let back: ReportLine = serde_json::from_str(&serde_json::to_string(&line).unwrap()).unwrap();
        assert_eq!(back, line);
        let line = ReportLine {
            id: "b-sol".into(),
            code: ControlCode::Sol,
            verdict: ReportVerdict::Problem { verdict: ProblemKind::IdMismatch, detail: "no source b".into() },
        };
        assert_eq!(
            serde_json::to_string(&line).unwrap(),
            r#"{"id":"b-sol","code":"sol","verdict":"id_mismatch","detail":"no source b"}"#
        );
    }

    #[test]
    fn source_ids() {
        let r = AugmentedRecord {
            id: AugmentedRecord::make_id("p-7", ControlCode::Var),
            code: ControlCode::Var,
            input: String::new(),
            target: String::new(),
            verified: Verified::Unverified,
        };
        assert_eq!(r.id, "p-7-var");
        assert_eq!(r.source_id(), Some("p-7"));
    }
}
