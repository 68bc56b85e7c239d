use std::sync::Arc;

use crate::canon::canonicalize;
use crate::code::{CodeStyle, ControlCode, Lang};
use crate::expr::{uet_from_set, EquationSet};
use crate::oracle::{compute_answer, Bindings, OracleConfig, SolveError, Verdict};
use crate::par::{map_ordered, Execution};
use crate::prefix::prefix_string;
use crate::transforms::generate_all;

use super::record::{AugmentedRecord, MwpRecord, ReportLine, ReportVerdict, Verified};
use super::stats::AugStats;
use super::verify::verify_target;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CodePosition {
    /// `"<code> <text>"`.
    #[default]
    Front,
    /// `"<text> <code>"`.
    Back,
}

/// Rewrites a transform output before verification. Test hook for checking
/// that the oracle rejects broken rewrites.
pub type FaultHook = Arc<dyn Fn(ControlCode, &EquationSet) -> EquationSet + Send + Sync>;

#[derive(Clone)]
pub struct AugmentOptions {
    /// Transform codes to try; `orig` is always emitted.
    pub codes: Vec<ControlCode>,
    pub style: CodeStyle,
    pub lang: Lang,
    pub position: CodePosition,
    pub oracle: OracleConfig,
    pub verify: bool,
    pub execution: Execution,
    pub fault: Option<FaultHook>,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        AugmentOptions {
            codes: ControlCode::TRANSFORMS.to_vec(),
            style: CodeStyle::Token,
            lang: Lang::En,
            position: CodePosition::Front,
            oracle: OracleConfig::default(),
            verify: true,
            execution: Execution::default(),
            fault: None,
        }
    }
}

impl std::fmt::Debug for AugmentOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AugmentOptions")
            .field("codes", &self.codes)
            .field("style", &self.style)
            .field("lang", &self.lang)
            .field("position", &self.position)
            .field("oracle", &self.oracle)
            .field("verify", &self.verify)
            .field("execution", &self.execution)
            .field("fault", &self.fault.is_some())
            .finish()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AugmentOutput {
    pub records: Vec<AugmentedRecord>,
    /// One line per verified output, in emission order.
    pub report: Vec<ReportLine>,
    pub stats: AugStats,
    pub warnings: Vec<String>,
}

pub fn render_input(text: &str, code: ControlCode, opts: &AugmentOptions) -> String {
    let rendered = code.render(opts.style, opts.lang);
    match opts.position {
        CodePosition::Front => format!("{rendered} {text}"),
        CodePosition::Back => format!("{text} {rendered}"),
    }
}

fn same_multiset(mut a: Vec<f64>, mut b: Vec<f64>) -> bool {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-4 * x.abs().max(y.abs()).max(1.0))
}

fn check_answers(record: &MwpRecord, cfg: &OracleConfig) -> Option<String> {
    let givens = Bindings::from_givens(&record.givens);
    match compute_answer(&record.equations, &givens, cfg) {
        Ok(solutions) => {
            let expected = record.answers.as_ref()?;
            let matches = solutions
                .iter()
                .any(|s| same_multiset(s.values().copied().collect(), expected.clone()));
            (!matches).then(|| format!("record {}: computed answer {solutions:?} differs from stored {expected:?}", record.id))
        }
        Err(SolveError::NotSolvable) => Some(format!("record {}: system is not solvable at its given values", record.id)),
        Err(SolveError::Eval(e)) => Some(format!("record {}: {e} at its given values", record.id)),
        Err(SolveError::Inconclusive(_)) => None,
    }
}

struct RecordResult {
    records: Vec<AugmentedRecord>,
    report: Vec<ReportLine>,
    stats: AugStats,
    warnings: Vec<String>,
}

fn augment_one(record: &MwpRecord, opts: &AugmentOptions) -> RecordResult {
    let mut out = RecordResult {
        records: Vec::new(),
        report: Vec::new(),
        stats: AugStats::default(),
        warnings: Vec::new(),
    };
    out.stats.records = 1;
    if let Some(w) = check_answers(record, &opts.oracle) {
        out.stats.answer_warnings += 1;
        out.warnings.push(w);
    }

    let canonical = canonicalize(&record.equations);
    for (code, mut set) in generate_all(&canonical, &opts.codes) {
        if code != ControlCode::Orig {
            if let Some(hook) = &opts.fault {
                set = hook(code, &set);
            }
        }
        let verified = if opts.verify {
            // orig is checked against the raw annotation, so canonicalization
            // is verified too
            let verdict = verify_target(record, code, &set, &opts.oracle);
            let id = AugmentedRecord::make_id(&record.id, code);
            let flag = match &verdict {
                Verdict::Equivalent => Some(Verified::Equivalent),
                Verdict::Inconclusive { .. } => {
                    out.stats.inconclusive += 1;
                    Some(Verified::Inconclusive)
                }
                Verdict::NotEquivalent { .. } => {
                    out.stats.not_equivalent += 1;
                    out.warnings.push(format!("{id}: rewrite is not equivalent, dropped"));
                    None
                }
            };
            out.report.push(ReportLine { id, code, verdict: ReportVerdict::Oracle(verdict) });
            match flag {
                Some(f) => f,
                None => continue,
            }
        } else {
            Verified::Unverified
        };
        *out.stats.per_code.entry(code).or_default() += 1;
        out.stats.emitted += 1;
        out.records.push(AugmentedRecord {
            id: AugmentedRecord::make_id(&record.id, code),
            code,
            input: render_input(&record.text, code, opts),
            target: prefix_string(&uet_from_set(&set)),
            verified,
        });
    }
    out
}

/// Canonicalizes every record, generates its control-code variants,
/// optionally verifies them and renders the training examples.
///
/// Output order is source order, then code order, whatever the execution
/// mode.
pub fn augment(records: &[MwpRecord], opts: &AugmentOptions) -> AugmentOutput {
    let results = map_ordered(records, opts.execution, |r| augment_one(r, opts));
    let mut out = AugmentOutput { stats: AugStats::empty(), ..Default::default() };
    for r in results {
        out.records.extend(r.records);
        out.report.extend(r.report);
        out.stats.merge(&r.stats);
        out.warnings.extend(r.warnings);
    }
    out
}
