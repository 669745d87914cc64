//! Runs split into atomic steps, and rerouting a run so that it ends in an
//! adjusted valuation by changing last released values.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::automaton::{delay, guard_holds, Atomic, ClockKind, Gta, Step, StepChoice, Trace, Valuation};
use crate::ext::{ExtReal, Rat};

/// A guard, or a change of clocks with the values given to the released
/// future clocks (history clocks go to 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomicStep {
    Guard(Vec<Atomic>),
    Change { clocks: Vec<usize>, values: BTreeMap<usize, ExtReal> },
}

/// `(q1, v1) -δ1,t1-> (q2, v2) ... (qk, vk)` with atomic `t_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicRun {
    pub kinds: Vec<ClockKind>,
    pub start: Valuation,
    pub steps: Vec<(Rat, AtomicStep)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RerouteError {
    #[error("guard of step {0} fails")]
    Guard(usize),
    #[error("delay before step {0} makes a future clock positive")]
    Delay(usize),
    #[error("step {step} releases clock {clock} without a valid value")]
    Release { step: usize, clock: usize },
    #[error("transition at position {0} renames clocks")]
    Rename(usize),
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error("rerouted run does not end in the target valuation")]
    Mismatch,
}

impl AtomicRun {
    /// The valuations `v1, ..., vk`.
    pub fn replay(&self) -> Result<Vec<Valuation>, RerouteError> {
        let mut v = self.start.clone();
        let mut out = vec![v.clone()];
        for (i, (d, step)) in self.steps.iter().enumerate() {
            v = delay(&v, &self.kinds, *d).map_err(|_| RerouteError::Delay(i))?;
            match step {
                AtomicStep::Guard(g) => {
                    if !guard_holds(&v, g) {
                        return Err(RerouteError::Guard(i));
                    }
                }
                AtomicStep::Change { clocks, values } => {
                    for &x in clocks {
                        v[x] = match self.kinds[x - 1] {
                            ClockKind::History => ExtReal::ZERO,
                            ClockKind::Future => match values.get(&x) {
                                Some(&u) if u <= ExtReal::ZERO => u,
                                _ => return Err(RerouteError::Release { step: i, clock: x }),
                            },
                        };
                    }
                }
            }
            out.push(v.clone());
        }
        Ok(out)
    }

    /// Splits the programs of a concrete run into atomic steps; the delay
    /// of a transition goes to its first step. Renamings are rejected.
    pub fn from_trace(a: &Gta, word: &[(Vec<bool>, Rat)], trace: &Trace, choices: &[StepChoice]) -> Result<AtomicRun, RerouteError> {
        let mut steps = Vec::new();
        let mut now = Rat::from_integer(0);
        for (pos, &t) in trace.transitions.iter().enumerate() {
            let mut d = word[pos].1 - now;
            now = word[pos].1;
            for (s, step) in a.transitions[t].prog.iter().enumerate() {
                let atomic = match step {
                    Step::Guard(g) => AtomicStep::Guard(g.clone()),
                    Step::Change(r) => {
                        let values = r
                            .iter()
                            .filter(|&&x| a.kind(x) == ClockKind::Future)
                            .map(|&x| (x, choices[pos].releases.lookup(s, x).unwrap_or(ExtReal::ZERO)))
                            .collect();
                        AtomicStep::Change { clocks: r.clone(), values }
                    }
                    Step::Rename(_) => return Err(RerouteError::Rename(pos)),
                };
                steps.push((d, atomic));
                d = Rat::from_integer(0);
            }
        }
        Ok(AtomicRun { kinds: a.kinds(), start: trace.configs[0].1.clone(), steps })
    }

    /// A chain automaton for safety checks: steps not separated by a delay
    /// form one transition.
    pub fn to_gta(&self) -> Gta {
        let mut g = Gta::new(Vec::new());
        for (i, k) in self.kinds.iter().enumerate() {
            g.add_clock(format!("c{}", i + 1), *k);
        }
        let mut progs: Vec<Vec<Step>> = Vec::new();
        for (d, step) in &self.steps {
            if progs.is_empty() || *d != Rat::from_integer(0) {
                progs.push(Vec::new());
            }
            progs.last_mut().unwrap().push(match step {
                AtomicStep::Guard(gd) => Step::Guard(gd.clone()),
                AtomicStep::Change { clocks, .. } => Step::Change(clocks.clone()),
            });
        }
        let mut q = g.add_state("s0", false);
        for (i, prog) in progs.into_iter().enumerate() {
            let next = g.add_state(format!("s{}", i + 1), false);
            g.add_transition(q, Vec::new(), prog, next);
            q = next;
        }
        g
    }

    fn last_release(&self, x: usize) -> Option<usize> {
        self.steps.iter().rposition(|(_, s)| matches!(s, AtomicStep::Change { clocks, .. } if clocks.contains(&x)))
    }
}

/// Re-executes `run` with the last released values of the clocks in
/// `(-inf, -M)` at both ends shifted so that the run ends in `target`
/// (`v'k(x) − Σ δ_i` over the delays after the release), checking every
/// guard on the way.
pub fn reroute_run(run: &AtomicRun, target: &[ExtReal], m: i64) -> Result<AtomicRun, RerouteError> {
    let vals = run.replay()?;
    let (v1, vk) = (&vals[0], vals.last().unwrap());
    if target.len() != v1.len() {
        return Err(RerouteError::Precondition("target has the wrong number of clocks".into()));
    }
    let low = |a: ExtReal| a.is_finite() && a < ExtReal::int(-m);
    let mut out = run.clone();
    for x in 1..v1.len() {
        let future = run.kinds[x - 1] == ClockKind::Future;
        if future && v1[x] != ExtReal::NegInf && run.last_release(x).is_none() {
            return Err(RerouteError::Precondition(format!("future clock {x} is never released and not -inf")));
        }
        if !(low(v1[x]) && low(vk[x])) {
            if target[x] != vk[x] {
                return Err(RerouteError::Precondition(format!("target changes clock {x} outside (-inf, -M)")));
            }
            continue;
        }
        let j = run.last_release(x).expect("released");
        let later: Rat = run.steps[j + 1..].iter().map(|(d, _)| *d).sum();
        if let AtomicStep::Change { values, .. } = &mut out.steps[j].1 {
            values.insert(x, target[x] - ExtReal::Fin(later));
        }
    }
    let new_vals = out.replay()?;
    if new_vals.last().map(|v| v.as_slice()) != Some(target) {
        return Err(RerouteError::Mismatch);
    }
    Ok(out)
}
