//! Reading and writing problem records.
//!
//! Normalized JSONL is the interchange format, one object per line:
//!
//! ```json
//! {"id": "7", "text": "n_1 apples and n_2 pears", "givens": [3, 4], "equations": ["x_1 = n_1 + n_2"], "answers": [7]}
//! ```
//!
//! The public dataset adapters are best effort. They read a JSON array or a
//! stream of concatenated JSON objects and map fields as follows.
//!
//! | format | id | text | equations | answers |
//! |---|---|---|---|---|
//! | `math23k-json` | `id` | `original_text` | `equation` (one string) | `ans` |
//! | `draw1k-json` | `iIndex` | `sQuestion` | `lEquations` (list) | `lSolutions` |
//! | `hmwp-json` | `id` | `original_text` | `equation` (list, or string split on `;`) | `ans` |
//!
//! Raw equations are normalized before templating: `a%` becomes `(a/100)`,
//! `×`/`÷` become `*`/`/`, and every identifier is renamed `x_1, x_2, ...`
//! in order of first appearance across the record's equations.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use super::record::{FormatError, MwpRecord, RecordLine};
use super::templatize::templatize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    NormalizedJsonl,
    Math23kJson,
    Draw1kJson,
    HmwpJson,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normalized-jsonl" | "jsonl" => Ok(InputFormat::NormalizedJsonl),
            "math23k-json" => Ok(InputFormat::Math23kJson),
            "draw1k-json" => Ok(InputFormat::Draw1kJson),
            "hmwp-json" => Ok(InputFormat::HmwpJson),
            other => Err(format!(
                "unknown format {other:?} (expected normalized-jsonl, math23k-json, draw1k-json or hmwp-json)"
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Unreadable(String),
}

/// Records that loaded, plus per-record failures and warnings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Loaded {
    pub records: Vec<MwpRecord>,
    pub errors: Vec<FormatError>,
    pub warnings: Vec<String>,
}

impl Loaded {
    fn accept(&mut self, result: Result<(MwpRecord, Vec<String>), FormatError>) {
        match result {
            Ok((record, warnings)) => {
                self.records.push(record);
                self.warnings.extend(warnings);
            }
            Err(e) => self.errors.push(e),
        }
    }
}

pub fn load_records(path: &Path, format: InputFormat) -> Result<Loaded, LoadError> {
    let io_err = |source| LoadError::Io { path: path.display().to_string(), source };
    match format {
        InputFormat::NormalizedJsonl => {
            let file = fs::File::open(path).map_err(io_err)?;
            read_jsonl(io::BufReader::new(file)).map_err(io_err)
        }
        _ => {
            let text = fs::read_to_string(path).map_err(io_err)?;
            read_dataset_json(&text, format)
        }
    }
}

pub fn read_jsonl(reader: impl BufRead) -> io::Result<Loaded> {
    let mut out = Loaded::default();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RecordLine>(&line)
            .map_err(|e| FormatError::new(format!("line {}", n + 1), e))
            .and_then(MwpRecord::from_line);
        out.accept(parsed);
    }
    Ok(out)
}

pub fn write_jsonl(records: &[MwpRecord], mut w: impl Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, &r.to_line())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn json_values(text: &str) -> Result<Vec<Value>, LoadError> {
    let mut out = Vec::new();
    for v in serde_json::Deserializer::from_str(text).into_iter::<Value>() {
        match v.map_err(|e| LoadError::Unreadable(e.to_string()))? {
            Value::Array(items) => out.extend(items),
            other => out.push(other),
        }
    }
    Ok(out)
}

fn as_string(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => {
            let s = s.trim();
            match s.strip_suffix('%') {
                Some(p) => p.trim().parse::<f64>().ok().map(|v| v / 100.0),
                None => s.parse().ok(),
            }
        }
        _ => None,
    }
}

fn as_numbers(v: Option<&Value>) -> Option<Vec<f64>> {
    match v? {
        Value::Array(items) => items.iter().map(as_number).collect(),
        single => as_number(single).map(|x| vec![x]),
    }
}

/// Rewrites dataset equation syntax into the infix grammar.
pub fn normalize_raw_equations(raw: &[String]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    raw.iter()
        .map(|eq| {
            let eq = eq.replace('×', "*").replace('÷', "/");
            let chars: Vec<char> = eq.chars().collect();
            let mut out = String::new();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                if c.is_alphabetic() || c == '_' {
                    let start = i;
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let name: String = chars[start..i].iter().collect();
                    let idx = match names.iter().position(|n| *n == name) {
                        Some(p) => p,
                        None => {
                            names.push(name);
                            names.len() - 1
                        }
                    };
                    out.push_str(&format!("x_{}", idx + 1));
                    continue;
                }
                if c.is_ascii_digit() {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                        i += 1;
                    }
                    let num: String = chars[start..i].iter().collect();
                    if chars.get(i) == Some(&'%') {
                        out.push_str(&format!("({num}/100)"));
                        i += 1;
                    } else {
                        out.push_str(&num);
                    }
                    continue;
                }
                out.push(c);
                i += 1;
            }
            out
        })
        .collect()
}

fn dataset_record(v: &Value, format: InputFormat, position: usize) -> Result<(MwpRecord, Vec<String>), FormatError> {
    let (id_key, text_key, eq_key, ans_key) = match format {
        InputFormat::Math23kJson | InputFormat::HmwpJson => ("id", "original_text", "equation", "ans"),
        InputFormat::Draw1kJson => ("iIndex", "sQuestion", "lEquations", "lSolutions"),
        InputFormat::NormalizedJsonl => unreachable!("handled by read_jsonl"),
    };
    let id = as_string(v.get(id_key)).unwrap_or_else(|| format!("#{position}"));
    let text = as_string(v.get(text_key)).ok_or_else(|| FormatError::new(&id, format!("missing {text_key}")))?;
    let raw: Vec<String> = match v.get(eq_key) {
        Some(Value::String(s)) => s.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
        Some(Value::Array(items)) => items.iter().filter_map(|e| e.as_str().map(String::from)).collect(),
        _ => return Err(FormatError::new(&id, format!("missing {eq_key}"))),
    };
    if raw.is_empty() {
        return Err(FormatError::new(&id, "no equations"));
    }
    let normalized = normalize_raw_equations(&raw);
    let t = templatize(&text, &normalized).map_err(|e| FormatError::new(&id, e))?;
    let answers = as_numbers(v.get(ans_key));
    let (record, mut warnings) = MwpRecord::new(id.clone(), t.text, t.givens, t.equations, answers)?;
    warnings.extend(t.warnings.into_iter().map(|w| format!("record {id}: {w}")));
    Ok((record, warnings))
}

pub fn read_dataset_json(text: &str, format: InputFormat) -> Result<Loaded, LoadError> {
    let mut out = Loaded::default();
    for (k, v) in json_values(text)?.iter().enumerate() {
        out.accept(dataset_record(v, format, k));
    }
    Ok(out)
}
