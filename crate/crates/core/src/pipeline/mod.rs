//! Corpus level processing: loading, templatizing, augmenting and counting.

mod augment;
mod load;
mod record;
mod stats;
mod templatize;
mod verify;

pub use augment::{augment, render_input, AugmentOptions, AugmentOutput, CodePosition, FaultHook};
pub use load::{
    load_records, normalize_raw_equations, read_dataset_json, read_jsonl, write_jsonl, InputFormat, LoadError, Loaded,
};
pub use record::{
    AugmentedRecord, FormatError, MwpRecord, ProblemKind, RecordLine, ReportLine, ReportVerdict, Verified,
};
pub use stats::{stats_json, stats_report, stats_table, AugStats};
pub use templatize::{templatize, Templated};
pub use verify::{is_failure, read_augmented, verify_corpus, verify_target, write_augmented, write_report};
