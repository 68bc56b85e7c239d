use std::io::BufReader;

use eqaug::pipeline::{augment, load_records, read_jsonl, write_jsonl, AugmentOptions, InputFormat};
use eqaug::synth::linear_corpus;
use eqaug::Execution;

#[test]
fn jsonl_round_trip() {
    let records = linear_corpus(40, 3);
    let mut buf = Vec::new();
    write_jsonl(&records, &mut buf).unwrap();
    let loaded = read_jsonl(BufReader::new(&buf[..])).unwrap();
    assert!(loaded.errors.is_empty(), "{:?}", loaded.errors);
    assert_eq!(loaded.records.len(), records.len());
    for (a, b) in loaded.records.iter().zip(&records) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.equations, b.equations);
        assert_eq!(a.givens, b.givens);
    }
}

#[test]
fn hundred_record_file_augments_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.jsonl");
    let mut f = std::fs::File::create(&path).unwrap();
    write_jsonl(&linear_corpus(100, 9), &mut f).unwrap();
    drop(f);

    let loaded = load_records(&path, InputFormat::NormalizedJsonl).unwrap();
    assert_eq!(loaded.records.len(), 100);
    let out = augment(&loaded.records, &AugmentOptions::default());
    assert_eq!(out.stats.records, 100);
    assert_eq!(out.stats.not_equivalent, 0);
    assert_eq!(out.stats.inconclusive, 0);
    assert_eq!(out.stats.answer_warnings, 0);
    assert_eq!(out.records.len(), out.stats.emitted);
    assert!(out.stats.multiplier().unwrap() >= 1.0);
}

#[test]
fn sequential_and_parallel_agree() {
    let records = linear_corpus(60, 21);
    let seq = augment(&records, &AugmentOptions { execution: Execution::Sequential, ..Default::default() });
    let par = augment(&records, &AugmentOptions { execution: Execution::Parallel, ..Default::default() });
    assert_eq!(seq, par);
    let again = augment(&records, &AugmentOptions { execution: Execution::Parallel, ..Default::default() });
    assert_eq!(par, again);
}

#[test]
fn bad_lines_are_reported_not_fatal() {
    let text = concat!(
        r#"{"id":"a","text":"n_1 apples","givens":[3],"equations":["x_1 = n_1 + 2"]}"#,
        "\n",
        "not json\n",
        r#"{"id":"b","text":"n_1","givens":[3],"equations":["x_1 = n_1 +"]}"#,
        "\n",
        r#"{"id":"c","text":"n_1","givens":[3],"equations":["x_2 = n_1"]}"#,
        "\n",
    );
    let loaded = read_jsonl(BufReader::new(text.as_bytes())).unwrap();
    assert_eq!(loaded.records.len(), 1);
    assert_eq!(loaded.errors.len(), 3);
}
