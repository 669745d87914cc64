//! Concrete semantics: valuations, delays, programs and runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{label_matches, Atomic, ClockKind, Gta, Step, ZERO};
use crate::ext::{ExtReal, Rat};

/// Clock values indexed `0..=n`; entry 0 is always 0.
pub type Valuation = Vec<ExtReal>;

/// Values for released future clocks. A value keyed by `(step, clock)`
/// applies to that step of the program only; otherwise the per-clock value
/// is used.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseChoices {
    #[serde(default)]
    pub by_step: BTreeMap<(usize, usize), ExtReal>,
    #[serde(default)]
    pub by_clock: BTreeMap<usize, ExtReal>,
}

impl ReleaseChoices {
    pub fn uniform(clocks: impl IntoIterator<Item = usize>, value: ExtReal) -> Self {
        ReleaseChoices { by_step: BTreeMap::new(), by_clock: clocks.into_iter().map(|c| (c, value)).collect() }
    }

    pub fn with_clock(mut self, clock: usize, value: ExtReal) -> Self {
        self.by_clock.insert(clock, value);
        self
    }

    pub fn with_step(mut self, step: usize, clock: usize, value: ExtReal) -> Self {
        self.by_step.insert((step, clock), value);
        self
    }

    pub fn lookup(&self, step: usize, clock: usize) -> Option<ExtReal> {
        self.by_step.get(&(step, clock)).or_else(|| self.by_clock.get(&clock)).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Blocked {
    /// Guard at this program step is false.
    Guard { step: usize },
    /// No release value was supplied.
    MissingChoice { step: usize, clock: usize },
    /// A supplied release value is positive.
    InvalidChoice { step: usize, clock: usize },
    /// Delay would make this future clock positive.
    Delay { clock: usize },
}

impl fmt::Display for Blocked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Blocked::Guard { step } => write!(f, "guard at program step {step} is false"),
            Blocked::MissingChoice { step, clock } => write!(f, "no release value for clock {clock} at step {step}"),
            Blocked::InvalidChoice { step, clock } => write!(f, "positive release value for clock {clock} at step {step}"),
            Blocked::Delay { clock } => write!(f, "delay makes future clock {clock} positive"),
        }
    }
}

pub fn guard_holds(v: &[ExtReal], g: &[Atomic]) -> bool {
    g.iter().all(|a| a.holds(v))
}

/// Runs `prog` on `v`. `kinds[i - 1]` is the kind of clock `i`.
pub fn apply_program_concrete(
    v: &[ExtReal],
    kinds: &[ClockKind],
    prog: &[Step],
    choices: &ReleaseChoices,
) -> Result<Valuation, Blocked> {
    let mut cur = v.to_vec();
    for (si, step) in prog.iter().enumerate() {
        match step {
            Step::Guard(g) => {
                if !guard_holds(&cur, g) {
                    return Err(Blocked::Guard { step: si });
                }
            }
            Step::Change(r) => {
                for &c in r {
                    match kinds[c - 1] {
                        ClockKind::History => cur[c] = ExtReal::ZERO,
                        ClockKind::Future => {
                            let val = choices.lookup(si, c).ok_or(Blocked::MissingChoice { step: si, clock: c })?;
                            if val > ExtReal::ZERO {
                                return Err(Blocked::InvalidChoice { step: si, clock: c });
                            }
                            cur[c] = val;
                        }
                    }
                }
            }
            Step::Rename(sigma) => {
                cur = sigma.iter().map(|&s| cur[s]).collect();
            }
        }
    }
    Ok(cur)
}

/// `v + d`, blocked if a future clock would become positive.
pub fn delay(v: &[ExtReal], kinds: &[ClockKind], d: Rat) -> Result<Valuation, Blocked> {
    let mut out = v.to_vec();
    for i in 1..out.len() {
        out[i] = out[i] + ExtReal::Fin(d);
        if kinds[i - 1] == ClockKind::Future && out[i] > ExtReal::ZERO {
            return Err(Blocked::Delay { clock: i });
        }
    }
    out[ZERO] = ExtReal::ZERO;
    Ok(out)
}

/// True if `v` is a valuation satisfying one of the initial guards of `state`.
pub fn initial_guard_holds(a: &Gta, state: usize, v: &[ExtReal]) -> bool {
    valid_valuation(a, v) && a.initial.iter().any(|i| i.state == state && guard_holds(v, &i.guard))
}

fn valid_valuation(a: &Gta, v: &[ExtReal]) -> bool {
    v.len() == a.num_clocks() + 1
        && v[ZERO] == ExtReal::ZERO
        && a.clocks.iter().all(|c| match c.kind {
            ClockKind::Future => v[c.index] <= ExtReal::ZERO,
            ClockKind::History => v[c.index] >= ExtReal::ZERO,
        })
}

/// Which transition to take at a position and how to release.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepChoice {
    pub transition: usize,
    #[serde(default)]
    pub releases: ReleaseChoices,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// `(state, valuation)` before the first letter and after each transition.
    pub configs: Vec<(usize, Valuation)>,
    pub transitions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    NotInitial,
    Blocked { position: usize, cause: Blocked },
    WrongSource { position: usize },
    LetterMismatch { position: usize },
    MissingStep { position: usize },
    NonMonotoneTime { position: usize },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::NotInitial => write!(f, "start configuration satisfies no initial guard"),
            RunError::Blocked { position, cause } => write!(f, "blocked at position {position}: {cause}"),
            RunError::WrongSource { position } => write!(f, "transition at position {position} leaves another state"),
            RunError::LetterMismatch { position } => write!(f, "transition at position {position} does not read the letter"),
            RunError::MissingStep { position } => write!(f, "no transition chosen for position {position}"),
            RunError::NonMonotoneTime { position } => write!(f, "timestamp decreases at position {position}"),
        }
    }
}

/// Runs `a` from `(q0, v0)` over a finite word; the first delay is `tau_0`.
pub fn run_concrete(
    a: &Gta,
    word: &[(Vec<bool>, Rat)],
    q0: usize,
    v0: &[ExtReal],
    choices: &[StepChoice],
) -> Result<Trace, RunError> {
    if !initial_guard_holds(a, q0, v0) {
        return Err(RunError::NotInitial);
    }
    let kinds = a.kinds();
    let mut trace = Trace { configs: vec![(q0, v0.to_vec())], transitions: Vec::new() };
    let (mut q, mut v) = (q0, v0.to_vec());
    let mut now = Rat::from_integer(0);
    for (pos, (letter, t)) in word.iter().enumerate() {
        if *t < now {
            return Err(RunError::NonMonotoneTime { position: pos });
        }
        v = delay(&v, &kinds, t - now).map_err(|cause| RunError::Blocked { position: pos, cause })?;
        now = *t;
        let ch = choices.get(pos).ok_or(RunError::MissingStep { position: pos })?;
        let tr = &a.transitions[ch.transition];
        if tr.src != q {
            return Err(RunError::WrongSource { position: pos });
        }
        if !label_matches(&tr.label, letter) {
            return Err(RunError::LetterMismatch { position: pos });
        }
        v = apply_program_concrete(&v, &kinds, &tr.prog, &ch.releases)
            .map_err(|cause| RunError::Blocked { position: pos, cause })?;
        q = tr.tgt;
        trace.configs.push((q, v.clone()));
        trace.transitions.push(ch.transition);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Gta;

    fn fi(c: i64) -> ExtReal {
        ExtReal::int(c)
    }

    #[test]
    fn check_then_release() {
        let prog = vec![Step::Guard(Atomic::eq(1, fi(0))), Step::Change(vec![1])];
        let kinds = [ClockKind::Future];
        let r = apply_program_concrete(&[fi(0), fi(-1)], &kinds, &prog, &ReleaseChoices::default());
        assert_eq!(r, Err(Blocked::Guard { step: 0 }));
        let ch = ReleaseChoices::default().with_clock(1, fi(-1));
        assert_eq!(apply_program_concrete(&[fi(0), fi(0)], &kinds, &prog, &ch), Ok(vec![fi(0), fi(-1)]));
    }

    #[test]
    fn history_reset() {
        let r = apply_program_concrete(&[fi(0), fi(3)], &[ClockKind::History], &[Step::Change(vec![1])], &ReleaseChoices::default());
        assert_eq!(r, Ok(vec![fi(0), fi(0)]));
    }

    #[test]
    fn delays() {
        let kinds = [ClockKind::Future, ClockKind::History];
        assert_eq!(delay(&[fi(0), fi(-1), fi(0)], &kinds, Rat::from_integer(1)), Ok(vec![fi(0), fi(0), fi(1)]));
        assert_eq!(delay(&[fi(0), fi(-1), fi(0)], &kinds, Rat::from_integer(2)), Err(Blocked::Delay { clock: 1 }));
        assert_eq!(
            delay(&[fi(0), ExtReal::NegInf, fi(0)], &kinds, Rat::from_integer(100)).unwrap()[1],
            ExtReal::NegInf
        );
    }

    #[test]
    fn empty_word_trace() {
        let mut a = Gta::new(vec!["p".into()]);
        let s = a.add_state("s", true);
        a.add_initial(s, vec![]);
        let t = run_concrete(&a, &[], s, &[fi(0)], &[]).unwrap();
        assert!(t.transitions.is_empty());
        assert_eq!(t.configs.len(), 1);
    }
}
