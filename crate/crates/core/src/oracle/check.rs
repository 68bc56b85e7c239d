use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::ControlCode;
use crate::expr::{Equation, EquationSet};
use crate::transforms;

use super::eval::{evaluate, evaluate_with_magnitude, EvalError};
use super::solve::{solve_system, SolveError};
use super::{close, Assignment, Bindings, Correspondence, Mode, OracleConfig, Verdict};

/// Discarded samples may use up this many times the requested sample count.
const RESAMPLE_BUDGET: usize = 10;

struct Sampler {
    rng: ChaCha8Rng,
    lo: f64,
    hi: f64,
}

impl Sampler {
    fn new(cfg: &OracleConfig) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(cfg.seed), lo: cfg.range.0, hi: cfg.range.1 }
    }

    fn draw(&mut self, indices: &BTreeSet<u32>) -> std::collections::BTreeMap<u32, f64> {
        indices
            .iter()
            .map(|&i| (i, self.rng.random_range(self.lo..=self.hi)))
            .collect()
    }
}

fn sides(eq: &Equation, b: &Bindings) -> Result<(f64, f64), EvalError> {
    Ok((evaluate(&eq.lhs, b)?, evaluate(&eq.rhs, b)?))
}

enum Sample {
    Agree,
    Disagree,
    Discard,
}

fn relabel(a: &Assignment, f: impl Fn(u32) -> u32) -> Assignment {
    a.iter().map(|(&j, &v)| (f(j), v)).collect()
}

fn pointwise_sample(orig: &EquationSet, cand: &EquationSet, hint: &Correspondence, b: &Bindings, tol: f64) -> Sample {
    let cand_bindings = Bindings {
        givens: b.givens.clone(),
        unknowns: relabel(&b.unknowns, |j| hint.to_candidate(j)),
    };
    for (k, ceq) in cand.equations().iter().enumerate() {
        let oeq = &orig.equations()[hint.equation_order[k]];
        let (Ok((ol, or)), Ok((cl, cr))) = (sides(oeq, b), sides(ceq, &cand_bindings)) else {
            return Sample::Discard;
        };
        let scale = ol.abs().max(or.abs()).max(cl.abs()).max(cr.abs());
        if !scale.is_finite() {
            return Sample::Discard;
        }
        if !close(ol - or, cl - cr, scale, tol) {
            return Sample::Disagree;
        }
    }
    Sample::Agree
}

/// Does `a` (in `set`'s own labels) satisfy every equation of `set`?
fn satisfies(set: &EquationSet, givens: &Bindings, a: &Assignment, tol: f64) -> Result<bool, EvalError> {
    let b = Bindings { givens: givens.givens.clone(), unknowns: a.clone() };
    for eq in set {
        // solved forms can balance two near-zero sides built from large
        // terms, so scale by the largest intermediate value
        let (l, lm) = evaluate_with_magnitude(&eq.lhs, &b)?;
        let (r, rm) = evaluate_with_magnitude(&eq.rhs, &b)?;
        if !close(l, r, lm.max(rm), tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

enum SetSample {
    Agree,
    Disagree(Bindings),
    Discard,
    Inconclusive(String),
}

fn solution_set_sample(
    orig: &EquationSet,
    cand: &EquationSet,
    hint: &Correspondence,
    givens: &Bindings,
    cfg: &OracleConfig,
) -> SetSample {
    let tol = cfg.solution_tol;
    let orig_solutions = match solve_system(orig, givens, cfg) {
        Ok(s) => s,
        Err(SolveError::NotSolvable | SolveError::Eval(_)) => return SetSample::Discard,
        Err(SolveError::Inconclusive(why)) => return SetSample::Inconclusive(format!("original: {why}")),
    };
    for sol in &orig_solutions {
        match satisfies(cand, givens, &relabel(sol, |j| hint.to_candidate(j)), tol) {
            Ok(true) => {}
            Ok(false) => return SetSample::Disagree(givens.clone().with_unknowns(sol.clone())),
            Err(_) => return SetSample::Discard,
        }
    }
    let cand_solutions = match solve_system(cand, givens, cfg) {
        Ok(s) => s,
        Err(SolveError::NotSolvable) => return SetSample::Disagree(givens.clone()),
        Err(SolveError::Eval(_)) => return SetSample::Discard,
        Err(SolveError::Inconclusive(why)) => return SetSample::Inconclusive(format!("candidate: {why}")),
    };
    for sol in &cand_solutions {
        let back = relabel(sol, |j| hint.to_original(j));
        match satisfies(orig, givens, &back, tol) {
            Ok(true) => {}
            Ok(false) => return SetSample::Disagree(givens.clone().with_unknowns(back)),
            Err(_) => return SetSample::Discard,
        }
    }
    SetSample::Agree
}

/// Compares `cand` against `orig` on seeded random samples.
///
/// Samples whose evaluation divides by zero, leaves the real domain, or hits
/// a singular system are redrawn, up to ten times the requested count in
/// total. Too few usable samples make the verdict inconclusive.
pub fn check_equivalent(
    orig: &EquationSet,
    cand: &EquationSet,
    mode: Mode,
    hint: &Correspondence,
    cfg: &OracleConfig,
) -> Verdict {
    let mut sampler = Sampler::new(cfg);
    let givens: BTreeSet<u32> = orig.givens().union(&cand.givens()).copied().collect();
    let unknowns = orig.unknowns();
    let shape_ok = cand.len() == orig.len()
        && hint.equation_order.len() == cand.len()
        && hint.equation_order.iter().all(|&k| k < orig.len());

    let budget = cfg.samples.saturating_mul(RESAMPLE_BUDGET);
    let mut valid = 0;
    for _ in 0..budget {
        if valid == cfg.samples {
            break;
        }
        let mut b = Bindings { givens: sampler.draw(&givens), unknowns: Default::default() };
        match mode {
            Mode::Pointwise => {
                b.unknowns = sampler.draw(&unknowns);
                if !shape_ok {
                    return Verdict::NotEquivalent { witness: b };
                }
                match pointwise_sample(orig, cand, hint, &b, cfg.pointwise_tol) {
                    Sample::Agree => valid += 1,
                    Sample::Disagree => return Verdict::NotEquivalent { witness: b },
                    Sample::Discard => {}
                }
            }
            Mode::SolutionSet => match solution_set_sample(orig, cand, hint, &b, cfg) {
                SetSample::Agree => valid += 1,
                SetSample::Disagree(witness) => return Verdict::NotEquivalent { witness },
                SetSample::Discard => {}
                SetSample::Inconclusive(reason) => return Verdict::Inconclusive { reason },
            },
        }
    }
    if valid < cfg.samples {
        return Verdict::Inconclusive {
            reason: format!("only {valid} of {} samples were usable", cfg.samples),
        };
    }
    Verdict::Equivalent
}

/// Checks a transform output against its source with the mode and alignment
/// that the code calls for.
pub fn verify_transform(orig: &EquationSet, code: ControlCode, cand: &EquationSet, cfg: &OracleConfig) -> Verdict {
    let hint = transforms::correspondence(code, orig);
    check_equivalent(orig, cand, Mode::for_code(code), &hint, cfg)
}
