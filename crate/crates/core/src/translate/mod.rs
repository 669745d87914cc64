//! Compilation of formulae into functional timed transducers, and of
//! transducers into language automata.

mod basic;
mod combine;
mod cond;
mod network;
mod until;

pub use basic::{atomic_transducer, bool_transducer, constant_transducer, identity_transducer, next_transducer, BoolOp};
pub use combine::{compose, product};
pub use cond::Cond;
pub use network::{formula_to_network, formula_to_network_over, Network};
pub use until::{b_states_used, is_one_sided, slot_count, until_automaton_a, until_automaton_b, until_transducer};

use thiserror::Error;

use crate::automaton::{Atomic, Gta, Gtt, ZERO};
use crate::ext::ExtReal;
use crate::formula::{Formula, Interval};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("proposition `{0}` is not an input channel")]
    MissingChannel(String),
    #[error("transducer alphabets do not match: expected {expected} channels, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },
    #[error("interval {0} needs the special-point automaton")]
    TwoSided(String),
    #[error("interval {0} is decided by the witness automaton alone")]
    NotTwoSided(String),
    #[error("language automata need a single Boolean output, found {0} output channels")]
    OutputWidth(usize),
}

fn lower_atom(iv: Interval, clock: usize) -> Atomic {
    Atomic::upper(clock, !iv.lower_closed, ExtReal::int(-(iv.lower as i64)))
}

fn upper_atom(iv: Interval, clock: usize) -> Option<Atomic> {
    iv.upper.map(|c| Atomic::new(ZERO, clock, !iv.upper_closed, ExtReal::int(c as i64)))
}

/// `-clock ∈ I` for a future clock.
pub fn in_interval(iv: Interval, clock: usize) -> Cond {
    let mut c = vec![lower_atom(iv, clock)];
    c.extend(upper_atom(iv, clock));
    Cond::all(c)
}

/// `-clock` violates the lower bound of `I`.
pub fn below_interval(iv: Interval, clock: usize) -> Cond {
    Cond::atom(lower_atom(iv, clock)).not()
}

/// `-clock` violates the upper bound of `I`.
pub fn above_interval(iv: Interval, clock: usize) -> Cond {
    match upper_atom(iv, clock) {
        Some(a) => Cond::atom(a).not(),
        None => Cond::ff(),
    }
}

/// Transducer of a formula over its own propositions, sorted.
pub fn formula_to_gtt(f: &Formula) -> Gtt {
    let channels: Vec<String> = f.props().into_iter().collect();
    formula_to_gtt_over(f, &channels).expect("every proposition is a channel")
}

/// Transducer of a formula over the given input channels.
pub fn formula_to_gtt_over(f: &Formula, channels: &[String]) -> Result<Gtt, TranslateError> {
    Ok(match f {
        Formula::Prop(p) => atomic_transducer(channels, p)?,
        Formula::Not(a) => compose(&bool_transducer(BoolOp::Not), &formula_to_gtt_over(a, channels)?)?,
        Formula::And(a, b) | Formula::Or(a, b) => {
            let op = if matches!(f, Formula::And(..)) { BoolOp::And } else { BoolOp::Or };
            let pair = product(&formula_to_gtt_over(a, channels)?, &formula_to_gtt_over(b, channels)?)?;
            compose(&bool_transducer(op), &pair)?
        }
        Formula::Next(iv, a) => compose(&next_transducer(*iv), &formula_to_gtt_over(a, channels)?)?,
        Formula::Until(iv, a, b) => {
            let pair = product(&formula_to_gtt_over(a, channels)?, &formula_to_gtt_over(b, channels)?)?;
            compose(&until_transducer(*iv), &pair)?
        }
    })
}

/// Language automaton of the words whose first output is 1: every initial
/// state gets a non-accepting copy that keeps only its output-1
/// transitions; outputs are dropped.
pub fn gtt_to_gta(t: &Gtt) -> Result<Gta, TranslateError> {
    if t.out_channels.len() != 1 {
        return Err(TranslateError::OutputWidth(t.out_channels.len()));
    }
    let mut gta = t.gta.clone();
    gta.initial.clear();
    let outgoing = t.gta.outgoing();
    for init in &t.gta.initial {
        let pre = gta.add_state(format!("start:{}", t.gta.states[init.state]), false);
        gta.add_initial(pre, init.guard.clone());
        for &ti in &outgoing[init.state] {
            if t.outputs[ti][0] {
                let tr = &t.gta.transitions[ti];
                gta.add_transition(pre, tr.label.clone(), tr.prog.clone(), tr.tgt);
            }
        }
    }
    Ok(gta)
}

/// Language automaton of a formula over its own propositions.
pub fn formula_to_gta(f: &Formula) -> Gta {
    gtt_to_gta(&formula_to_gtt(f)).expect("single output")
}

/// Size counts for the transducer of one `U_I`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct UntilSize {
    pub interval: String,
    /// `1 + ⌈b/(c−b)⌉` for two-sided intervals.
    pub slots: Option<usize>,
    pub locations: usize,
    pub future_clocks: usize,
    pub location_bound: Option<usize>,
    pub b_states: Option<usize>,
    /// The `2k − 1` count for B, for comparison with `b_states`.
    pub b_states_stated: Option<usize>,
}

pub fn until_size(iv: Interval) -> UntilSize {
    let t = until_transducer(iv);
    let slots = slot_count(iv);
    UntilSize {
        interval: iv.to_string(),
        slots,
        locations: t.gta.states.len(),
        future_clocks: t.gta.future_clocks().len(),
        location_bound: slots.map(|k| 6 * k),
        b_states: slots.map(|_| b_states_used(&t)),
        b_states_stated: slots.map(|k| 2 * k - 1),
    }
}

/// One entry per `U_I` occurrence, in syntax order.
pub fn size_report(f: &Formula) -> Vec<UntilSize> {
    f.until_intervals().into_iter().map(until_size).collect()
}
