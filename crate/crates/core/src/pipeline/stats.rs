use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::code::ControlCode;

use super::record::AugmentedRecord;

/// Counts for one augmentation run. Merging is associative and commutative.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AugStats {
    /// Source records that were augmented.
    pub records: usize,
    /// Augmented records emitted, `orig` included.
    pub emitted: usize,
    pub per_code: BTreeMap<ControlCode, usize>,
    pub not_equivalent: usize,
    pub inconclusive: usize,
    pub parse_failures: usize,
    pub answer_warnings: usize,
}

impl AugStats {
    /// Zero counts with every code present.
    pub fn empty() -> Self {
        AugStats {
            per_code: ControlCode::ALL.iter().map(|&c| (c, 0)).collect(),
            ..Default::default()
        }
    }

    pub fn merge(&mut self, other: &AugStats) {
        self.records += other.records;
        self.emitted += other.emitted;
        for (&code, &n) in &other.per_code {
            *self.per_code.entry(code).or_default() += n;
        }
        self.not_equivalent += other.not_equivalent;
        self.inconclusive += other.inconclusive;
        self.parse_failures += other.parse_failures;
        self.answer_warnings += other.answer_warnings;
    }

    /// Augmented size over original size; `None` for an empty corpus.
    pub fn multiplier(&self) -> Option<f64> {
        (self.records > 0).then(|| self.emitted as f64 / self.records as f64)
    }

    /// Recounts an emitted corpus. Each `orig` record stands for one source.
    pub fn from_augmented(records: &[AugmentedRecord]) -> Self {
        let mut s = AugStats::empty();
        for r in records {
            *s.per_code.entry(r.code).or_default() += 1;
            s.emitted += 1;
            if r.verified == super::record::Verified::Inconclusive {
                s.inconclusive += 1;
            }
        }
        s.records = s.per_code[&ControlCode::Orig];
        s
    }

    pub fn count(&self, code: ControlCode) -> usize {
        self.per_code.get(&code).copied().unwrap_or(0)
    }
}

#[derive(Serialize)]
struct StatsJson<'a> {
    #[serde(flatten)]
    stats: &'a AugStats,
    multiplier: Option<f64>,
}

/// Machine-readable form: the counts plus the multiplier (`null` when there
/// are no records).
pub fn stats_json(s: &AugStats) -> serde_json::Value {
    serde_json::to_value(StatsJson { stats: s, multiplier: s.multiplier() }).expect("stats serialize")
}

/// Human-readable table.
pub fn stats_table(s: &AugStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>10} {:>8}", "code", "examples", "share");
    for code in ControlCode::ALL {
        let n = s.count(code);
        let share = if s.records > 0 {
            format!("{:.3}", n as f64 / s.records as f64)
        } else {
            "n/a".into()
        };
        let _ = writeln!(out, "{:<8} {:>10} {:>8}", code.token(), n, share);
    }
    let _ = writeln!(out, "{:<8} {:>10}", "total", s.emitted);
    let _ = writeln!(out, "source records        {}", s.records);
    let multiplier = s.multiplier().map_or("n/a".to_string(), |m| format!("{m:.3}"));
    let _ = writeln!(out, "multiplier            {multiplier}");
    let _ = writeln!(out, "not equivalent        {}", s.not_equivalent);
    let _ = writeln!(out, "inconclusive          {}", s.inconclusive);
    let _ = writeln!(out, "parse failures        {}", s.parse_failures);
    let _ = writeln!(out, "answer warnings       {}", s.answer_warnings);
    out
}

/// Table followed by the JSON form.
pub fn stats_report(s: &AugStats) -> (String, serde_json::Value) {
    (stats_table(s), stats_json(s))
}
