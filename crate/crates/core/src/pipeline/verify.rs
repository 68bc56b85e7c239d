use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use crate::canon::canonicalize;
use crate::code::ControlCode;
use crate::expr::EquationSet;
use crate::oracle::{check_equivalent, derive_seed, verify_transform, Correspondence, Mode, OracleConfig, Verdict};
use crate::par::{map_ordered, Execution};
use crate::prefix::parse_prefix_str;

use super::record::{AugmentedRecord, FormatError, MwpRecord, ProblemKind, ReportLine, ReportVerdict};

/// Oracle verdict for one emitted target against its source equations. Uses
/// the same per-check seed as `augment`, so both report the same verdicts.
pub fn verify_target(source: &MwpRecord, code: ControlCode, target: &EquationSet, cfg: &OracleConfig) -> Verdict {
    let cfg = cfg.with_seed(derive_seed(cfg.seed, &source.id, code));
    if code == ControlCode::Orig {
        let hint = Correspondence::identity(target.len());
        return check_equivalent(&source.equations, target, Mode::Pointwise, &hint, &cfg);
    }
    verify_transform(&canonicalize(&source.equations), code, target, &cfg)
}

fn verify_one(r: &AugmentedRecord, sources: &HashMap<&str, &MwpRecord>, cfg: &OracleConfig) -> ReportLine {
    let problem = |verdict, detail: String| ReportLine {
        id: r.id.clone(),
        code: r.code,
        verdict: ReportVerdict::Problem { verdict, detail },
    };
    let Some(source) = r.source_id().and_then(|id| sources.get(id)) else {
        return problem(ProblemKind::IdMismatch, format!("no source record for {:?}", r.id));
    };
    let target = match parse_prefix_str(&r.target).map(|t| t.into_set()) {
        Ok(Ok(set)) => set,
        Ok(Err(e)) => return problem(ProblemKind::MalformedTarget, e.to_string()),
        Err(e) => return problem(ProblemKind::MalformedTarget, e.to_string()),
    };
    ReportLine { id: r.id.clone(), code: r.code, verdict: ReportVerdict::Oracle(verify_target(source, r.code, &target, cfg)) }
}

/// Re-verifies an augmented corpus against its sources, one report line per
/// augmented record, in input order.
pub fn verify_corpus(
    augmented: &[AugmentedRecord],
    sources: &[MwpRecord],
    cfg: &OracleConfig,
    execution: Execution,
) -> Vec<ReportLine> {
    let by_id: HashMap<&str, &MwpRecord> = sources.iter().map(|r| (r.id.as_str(), r)).collect();
    map_ordered(augmented, execution, |r| verify_one(r, &by_id, cfg))
}

/// A report line that should fail a verification run.
pub fn is_failure(line: &ReportLine) -> bool {
    matches!(line.verdict, ReportVerdict::Problem { .. } | ReportVerdict::Oracle(Verdict::NotEquivalent { .. }))
}

pub fn write_augmented(records: &[AugmentedRecord], mut w: impl Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_report(lines: &[ReportLine], mut w: impl Write) -> io::Result<()> {
    for l in lines {
        serde_json::to_writer(&mut w, l)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads augmented JSONL. Malformed lines are returned as errors.
pub fn read_augmented(reader: impl BufRead) -> io::Result<(Vec<AugmentedRecord>, Vec<FormatError>)> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(r) => records.push(r),
            Err(e) => errors.push(FormatError::new(format!("line {}", n + 1), e)),
        }
    }
    Ok((records, errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{augment, AugmentOptions};
    use crate::synth::linear_corpus;

    #[test]
    fn verify_reproduces_augment_report() {
        let sources = linear_corpus(15, 4);
        let out = augment(&sources, &AugmentOptions::default());
        let report = verify_corpus(&out.records, &sources, &OracleConfig::default(), Execution::Sequential);
        assert_eq!(report, out.report);
        assert!(!report.iter().any(is_failure));
    }

    #[test]
    fn problems_are_reported() {
        let sources = linear_corpus(2, 4);
        let mut out = augment(&sources, &AugmentOptions::default()).records;
        out[0].id = "nope-orig".into();
        out[1].target = "<UET> = x_1".into();
        let report = verify_corpus(&out[..2], &sources, &OracleConfig::default(), Execution::Sequential);
        assert!(matches!(report[0].verdict, ReportVerdict::Problem { verdict: ProblemKind::IdMismatch, .. }));
        assert!(matches!(report[1].verdict, ReportVerdict::Problem { verdict: ProblemKind::MalformedTarget, .. }));
        assert!(report.iter().all(is_failure));
    }

    #[test]
    fn augmented_jsonl_round_trip() {
        let out = augment(&linear_corpus(5, 1), &AugmentOptions::default()).records;
        let mut buf = Vec::new();
        write_augmented(&out, &mut buf).unwrap();
        let (back, errors) = read_augmented(&buf[..]).unwrap();
        assert!(errors.is_empty());
        assert_eq!(back, out);
    }
}
