use super::{check_liveness, ConcreteRun, LassoWitness, Liveness, LivenessOptions, Stats};
use crate::automaton::{Gta, Gtt};
use crate::formula::Formula;
use crate::translate::{formula_to_gtt_over, gtt_to_gta, product, TranslateError};

#[derive(Clone, Debug)]
pub enum McVerdict {
    /// Every accepting run of the system satisfies the formula.
    Satisfied(Stats),
    /// A run violating the formula, with its replay when validation succeeds.
    Violated(Box<LassoWitness>, Option<Box<ConcreteRun>>, Stats),
    Inconclusive(Stats),
}

/// The system's channels followed by the formula's remaining propositions.
pub fn system_channels(system: &Gta, f: &Formula) -> Vec<String> {
    let mut ch = system.channels.clone();
    for p in f.props() {
        if !ch.contains(&p) {
            ch.push(p);
        }
    }
    ch
}

/// Synchronous product of two automata over the same channels; both Büchi
/// conditions must hold.
pub fn product_gta(a: &Gta, b: &Gta) -> Result<Gta, TranslateError> {
    let wrap = |g: &Gta| Gtt { gta: g.clone(), out_channels: Vec::new(), outputs: vec![Vec::new(); g.transitions.len()] };
    Ok(product(&wrap(a), &wrap(b))?.gta)
}

/// Checks that every run of `system` satisfies `f` at position 0 by
/// searching the product with the automaton of `¬f`.
pub fn model_check(system: &Gta, f: &Formula, opts: &LivenessOptions) -> Result<McVerdict, TranslateError> {
    Ok(verdict_of(check_liveness(&model_check_product(system, f)?, opts)))
}

/// The product of `system` with the automaton of `¬f`; empty exactly when
/// `f` holds on every accepting run.
pub fn model_check_product(system: &Gta, f: &Formula) -> Result<Gta, TranslateError> {
    let channels = system_channels(system, f);
    let mut sys = system.clone();
    sys.channels = channels.clone();
    let neg = Formula::not(f.clone());
    let a_neg = gtt_to_gta(&formula_to_gtt_over(&neg, &channels)?)?;
    product_gta(&sys, &a_neg)
}

/// Reads a liveness result on the product as a model-checking verdict.
pub fn verdict_of(res: Liveness) -> McVerdict {
    match res {
        Liveness::Empty(s) => McVerdict::Satisfied(s),
        Liveness::Inconclusive(s) => McVerdict::Inconclusive(s),
        Liveness::NonEmpty(w, s) => {
            let run = super::validate_witness(&w, 3).ok().map(Box::new);
            McVerdict::Violated(w, run, s)
        }
    }
}
