use std::collections::BTreeSet;
use std::fmt;

use super::{Atomic, ClockKind, Gta, Step, ZERO};
use crate::ext::ExtReal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UncheckedRelease { transition: usize, step: usize, clock: usize },
    RenameMovesDiagonalClocks { transition: usize, step: usize },
    UnpinnedHistoryClock { initial: usize, clock: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UncheckedRelease { transition, step, clock } => {
                write!(f, "transition {transition}, step {step}: clock {clock} released without a 0/-inf check")
            }
            Violation::RenameMovesDiagonalClocks { transition, step } => {
                write!(f, "transition {transition}, step {step}: renaming does not preserve the diagonal clocks")
            }
            Violation::UnpinnedHistoryClock { initial, clock } => {
                write!(f, "initial pair {initial}: history clock {clock} not pinned to 0 or inf")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyReport {
    /// Future clocks occurring in future-future diagonal guards.
    pub diagonal_clocks: BTreeSet<usize>,
    pub violations: Vec<Violation>,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.violations.is_empty()
    }
}

fn forces_zero_or_minus_inf(a: &Atomic) -> Option<usize> {
    // `0 - x <= 0` pins a future clock to 0; `x - 0 <= -inf` pins it to -inf.
    if a.x == ZERO && a.y != ZERO && !a.strict && a.c == ExtReal::ZERO {
        return Some(a.y);
    }
    if a.y == ZERO && a.x != ZERO && !a.strict && a.c == ExtReal::NegInf {
        return Some(a.x);
    }
    None
}

pub fn is_safe(a: &Gta) -> SafetyReport {
    let future = |c: usize| c != ZERO && a.kind(c) == ClockKind::Future;
    let mut xd = BTreeSet::new();
    for t in &a.transitions {
        for step in &t.prog {
            if let Step::Guard(g) = step {
                for at in g {
                    if future(at.x) && future(at.y) && at.x != at.y {
                        xd.insert(at.x);
                        xd.insert(at.y);
                    }
                }
            }
        }
    }
    let mut violations = Vec::new();
    for (ti, t) in a.transitions.iter().enumerate() {
        let mut checked: BTreeSet<usize> = BTreeSet::new();
        for (si, step) in t.prog.iter().enumerate() {
            match step {
                Step::Guard(g) => {
                    checked.extend(g.iter().filter_map(forces_zero_or_minus_inf));
                }
                Step::Change(r) => {
                    for &c in r {
                        if xd.contains(&c) && !checked.contains(&c) {
                            violations.push(Violation::UncheckedRelease { transition: ti, step: si, clock: c });
                        }
                        checked.remove(&c);
                    }
                }
                Step::Rename(sigma) => {
                    let image: BTreeSet<usize> = xd.iter().map(|&c| sigma[c]).collect();
                    if image != xd {
                        violations.push(Violation::RenameMovesDiagonalClocks { transition: ti, step: si });
                    }
                    checked = (1..sigma.len()).filter(|&i| checked.contains(&sigma[i])).collect();
                }
            }
        }
    }
    for (ii, init) in a.initial.iter().enumerate() {
        for h in a.history_clocks() {
            let zero = init.guard.iter().any(|g| g.x == h && g.y == ZERO && !g.strict && g.c == ExtReal::ZERO);
            let inf = init.guard.iter().any(|g| g.x == ZERO && g.y == h && !g.strict && g.c == ExtReal::NegInf);
            if !zero && !inf {
                violations.push(Violation::UnpinnedHistoryClock { initial: ii, clock: h });
            }
        }
    }
    SafetyReport { diagonal_clocks: xd, violations }
}
