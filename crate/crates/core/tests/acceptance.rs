//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any FAIL.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use eqaug::canon::canonicalize;
use eqaug::oracle::{verify_transform, Mode, OracleConfig, Verdict};
use eqaug::pipeline::{augment, AugmentOptions, AugmentedRecord};
use eqaug::prefix::{parse_prefix_str, prefix_string};
use eqaug::synth::{all_codes_corpus, corrupted_transform, linear_corpus, solution_form_corpus};
use eqaug::transforms::{apply, apply_equ, apply_var, swap_operands, Traversal};
use eqaug::{
    parse_equation, print_display, print_infix, uet_from_set, BinOp, ControlCode, EquationSet, Execution,
    TransformOutcome,
};
use proptest::test_runner::TestRunner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_BUDGET: Duration = Duration::from_millis(500);
const PROPERTY_BUDGET: Duration = Duration::from_secs(30);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const FAULT_BUDGET: Duration = Duration::from_secs(10);
const PIPELINE_BUDGET: Duration = Duration::from_secs(60);

const ORACLE_TOLERANCE: f64 = 1e-6;
const ORACLE_SAMPLES: usize = 100;
const LINEAR_SYSTEMS: usize = 500;
const CORRUPTED_TARGETS: usize = 50;
const PIPELINE_RECORDS: usize = 10_000;
const SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn set(eqs: &[&str]) -> EquationSet {
    EquationSet::new(eqs.iter().map(|s| parse_equation(s).unwrap()).collect()).unwrap()
}

fn goldens() -> Outcome {
    let cases = [
        (ControlCode::Add, "x_1 = n_1 + n_2 + n_3", "x_1 = n_3 + n_2 + n_1", "x_1 = n_3 + (n_2 + n_1)"),
        (ControlCode::Mul, "x_1 = n_1 * n_2 * n_3", "x_1 = n_3 * n_2 * n_1", "x_1 = n_3 * (n_2 * n_1)"),
        (ControlCode::Sol, "n_1 / x_1 = n_2", "x_1 = n_1 / n_2", "x_1 = n_1 / n_2"),
        (ControlCode::Var, "n_1 * x_1 + n_2 * x_2 = 0", "n_1 * x_2 + n_2 * x_1 = 0", "n_1 * x_2 + n_2 * x_1 = 0"),
    ];
    for (code, input, shown, exact) in cases {
        let src = set(&[input]);
        let out = apply(code, &src).into_changed().ok_or(format!("{code:?} left {input:?} unchanged"))?;
        let eq = &out.equations()[0];
        if print_display(eq) != shown {
            return Err(format!("{code:?}: got {:?}, want {shown:?}", print_display(eq)));
        }
        if print_infix(eq) != exact || parse_equation(exact).unwrap() != *eq {
            return Err(format!("{code:?}: tree is {:?}, want {exact:?}", print_infix(eq)));
        }
    }
    Ok("4/4 transformations match".into())
}

fn run_property<S: proptest::strategy::Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), String>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(common::config());
    runner
        .run(&strategy, |v| test(v).map_err(proptest::test_runner::TestCaseError::fail))
        .map_err(|e| format!("{name}: {e}"))
}

fn step(set: &EquationSet, f: fn(&EquationSet) -> TransformOutcome) -> EquationSet {
    f(set).into_changed().unwrap_or_else(|| set.clone())
}

fn check(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn properties() -> Outcome {
    let sets = || common::equation_set(true);
    run_property("add/mul involution", sets(), |s| {
        for code in [ControlCode::Add, ControlCode::Mul] {
            let once = apply(code, &s).into_changed().unwrap_or_else(|| s.clone());
            let twice = apply(code, &once).into_changed().unwrap_or_else(|| once.clone());
            check(twice == s, "applying twice is not the identity")?;
        }
        Ok(())
    })?;
    run_property("traversal order", common::equation(5, 3, true), |eq| {
        for op in [BinOp::Add, BinOp::Mul] {
            for side in [&eq.lhs, &eq.rhs] {
                check(
                    swap_operands(side, op, Traversal::PreOrder) == swap_operands(side, op, Traversal::PostOrder),
                    "pre-order and post-order swaps differ",
                )?;
            }
        }
        Ok(())
    })?;
    run_property("equ n-cycle", sets(), |s| {
        let mut cur = s.clone();
        (0..s.len()).for_each(|_| cur = step(&cur, apply_equ));
        check(cur == s, "n rotations are not the identity")
    })?;
    run_property("var m-cycle", sets(), |s| {
        let mut cur = s.clone();
        (0..s.unknown_count()).for_each(|_| cur = step(&cur, apply_var));
        check(cur == s, "m relabelings are not the identity")
    })?;
    run_property("infix round trip", common::equation(5, 3, true), |eq| {
        check(parse_equation(&print_infix(&eq)).ok() == Some(eq), "parse(print(e)) != e")
    })?;
    run_property("prefix round trip", sets(), |s| {
        let tree = uet_from_set(&s);
        check(parse_prefix_str(&prefix_string(&tree)).ok() == Some(tree), "parse(prefix(t)) != t")
    })?;
    run_property("canonicalize idempotence", sets(), |s| {
        let once = canonicalize(&s);
        check(canonicalize(&once) == once, "canon(canon(s)) != canon(s)")
    })?;
    Ok(format!("7 suites x {} cases", common::CASES))
}

fn oracle_equivalence() -> Outcome {
    let cfg = OracleConfig { samples: ORACLE_SAMPLES, ..OracleConfig::default() }.with_tolerance(ORACLE_TOLERANCE);
    let (mut equivalent, mut refuted, mut inconclusive) = (0, 0, 0);
    let mut first_problem = None;
    for r in linear_corpus(LINEAR_SYSTEMS, SEED) {
        let canon = canonicalize(&r.equations);
        for (code, out) in eqaug::generate_all(&canon, &ControlCode::TRANSFORMS).into_iter().skip(1) {
            match verify_transform(&canon, code, &out, &cfg) {
                Verdict::Equivalent => equivalent += 1,
                v => {
                    if matches!(v, Verdict::NotEquivalent { .. }) {
                        refuted += 1;
                    } else {
                        inconclusive += 1;
                    }
                    first_problem.get_or_insert(format!("{} {code:?}: {v:?}", r.id));
                }
            }
        }
    }
    let summary = format!("{equivalent} equivalent, {refuted} not equivalent, {inconclusive} inconclusive");
    match first_problem {
        None if equivalent > 0 => Ok(summary),
        None => Err("no transform outputs checked".into()),
        Some(p) => Err(format!("{summary}; first: {p}")),
    }
}

fn fault_detection() -> Outcome {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut caught = 0;
    let mut codes = ControlCode::TRANSFORMS.iter().copied().cycle();
    for r in all_codes_corpus(CORRUPTED_TARGETS, SEED) {
        let canon = canonicalize(&r.equations);
        let code = codes.next().unwrap();
        let (code, bad) = corrupted_transform(&canon, &[code], &mut rng).ok_or(format!("{}: nothing to corrupt", r.id))?;
        match verify_transform(&canon, code, &bad, &cfg) {
            Verdict::NotEquivalent { witness } if !witness.givens.is_empty() => {
                if Mode::for_code(code) == Mode::Pointwise && witness.unknowns.is_empty() {
                    return Err(format!("{} {code:?}: witness lacks unknowns", r.id));
                }
                caught += 1;
            }
            v => return Err(format!("{} {code:?}: corrupted target judged {v:?}", r.id)),
        }
    }
    Ok(format!("{caught}/{CORRUPTED_TARGETS} flagged with witnesses"))
}

fn jsonl(records: &[AugmentedRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).unwrap();
        out.push(b'\n');
    }
    out
}

fn pipeline() -> Outcome {
    let records = all_codes_corpus(PIPELINE_RECORDS, SEED);
    let opts = AugmentOptions { execution: Execution::Parallel, ..AugmentOptions::default() };
    let first = augment(&records, &opts);
    let second = augment(&records, &opts);
    let (a, b) = (jsonl(&first.records), jsonl(&second.records));
    if a != b {
        return Err("two runs differ".into());
    }
    if first.stats.not_equivalent > 0 || first.stats.inconclusive > 0 {
        return Err(format!("{} not equivalent, {} inconclusive", first.stats.not_equivalent, first.stats.inconclusive));
    }
    let missing: Vec<_> = ControlCode::ALL.iter().filter(|&&c| first.stats.count(c) != PIPELINE_RECORDS).collect();
    if !missing.is_empty() {
        return Err(format!("codes short of one per record: {missing:?}"));
    }
    Ok(format!("{} examples, {} bytes, identical", first.records.len(), a.len()))
}

fn solution_form() -> Outcome {
    let out = augment(&solution_form_corpus(300, SEED), &AugmentOptions::default());
    let sol = out.stats.count(ControlCode::Sol);
    if sol != 0 {
        return Err(format!("{sol} sol examples emitted"));
    }
    if out.stats.count(ControlCode::Orig) != 300 {
        return Err("orig examples missing".into());
    }
    Ok("0 sol examples over 300 records".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("golden transformations", GOLDEN_BUDGET, goldens),
        ("property suites", PROPERTY_BUDGET, properties),
        ("oracle equivalence on linear corpus", ORACLE_BUDGET, oracle_equivalence),
        ("fault detection", FAULT_BUDGET, fault_detection),
        ("pipeline determinism and scale", PIPELINE_BUDGET, pipeline),
        ("solution-form corpus emits no sol", Duration::from_secs(10), solution_form),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if took <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}, but took {took:.2?} (budget {budget:?})"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{took:.2?}]");
            }
        }
    }
    println!("SKIP public dataset multiplier: not asserted, datasets are not bundled");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
