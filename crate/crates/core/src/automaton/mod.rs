//! Generalized timed automata and transducers: clocks, instantaneous
//! programs, transitions, Büchi acceptance and per-transition outputs.

mod concrete;
mod io;
mod renaming;
mod safety;

pub use concrete::{
    apply_program_concrete, delay, guard_holds, initial_guard_holds, run_concrete, Blocked, ReleaseChoices,
    RunError, StepChoice, Trace, Valuation,
};
pub use io::{fmt_atomic, fmt_label, fmt_program, gta_to_dot, gtt_to_dot};
pub use renaming::{eliminate_renamings, eliminate_renamings_gtt, Eliminated};
pub use safety::{is_safe, SafetyReport, Violation};

use serde::{Deserialize, Serialize};

use crate::ext::ExtReal;

/// Index of the special clock `0` in valuations, zones and constraints.
pub const ZERO: usize = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum ClockKind {
    Future,
    History,
}

/// A declared clock. `index` is 1-based; index 0 is the constant clock.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockId {
    pub index: usize,
    pub kind: ClockKind,
    pub name: String,
}

/// Atomic constraint `x - y ◁ c` over clock indices (0 is the constant clock).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atomic {
    pub x: usize,
    pub y: usize,
    pub strict: bool,
    pub c: ExtReal,
}

impl Atomic {
    pub fn new(x: usize, y: usize, strict: bool, c: ExtReal) -> Self {
        Atomic { x, y, strict, c }
    }

    /// `x ◁ c`.
    pub fn upper(x: usize, strict: bool, c: ExtReal) -> Self {
        Atomic::new(x, ZERO, strict, c)
    }

    /// `c ◁ x`, written as `0 - x ◁ -c`.
    pub fn lower(x: usize, strict: bool, c: ExtReal) -> Self {
        Atomic::new(ZERO, x, strict, -c)
    }

    /// `x = c` as two constraints.
    pub fn eq(x: usize, c: ExtReal) -> Vec<Atomic> {
        vec![Atomic::upper(x, false, c), Atomic::lower(x, false, c)]
    }

    /// `x = -inf`, i.e. `x - 0 <= -inf`.
    pub fn minus_infinity(x: usize) -> Self {
        Atomic::upper(x, false, ExtReal::NegInf)
    }

    pub fn holds(&self, v: &[ExtReal]) -> bool {
        let d = v[self.x] - v[self.y];
        if self.strict {
            d < self.c
        } else {
            d <= self.c
        }
    }

    /// Complement of a constraint that mentions the constant clock. For such
    /// constraints `0 - x = -(x - 0)` holds on every extended value, so the
    /// complement is again atomic.
    pub fn negate(&self) -> Atomic {
        debug_assert!(self.x == ZERO || self.y == ZERO, "negate is exact only for unary constraints");
        Atomic::new(self.y, self.x, !self.strict, -self.c)
    }

    pub fn is_diagonal(&self) -> bool {
        self.x != ZERO && self.y != ZERO
    }

    /// Applies a clock renaming to both sides.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Atomic {
        Atomic::new(f(self.x), f(self.y), self.strict, self.c)
    }
}

/// One atomic step of an instantaneous timed program.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    Guard(Vec<Atomic>),
    /// Resets history clocks to 0 and releases future clocks.
    Change(Vec<usize>),
    /// `sigma[i]` is the clock whose old value clock `i` receives; `sigma[0] = 0`.
    Rename(Vec<usize>),
}

pub type Program = Vec<Step>;

/// A cube over input channels: each entry fixes one channel to a value.
pub type Label = Vec<(usize, bool)>;

pub fn label_matches(label: &Label, letter: &[bool]) -> bool {
    label.iter().all(|&(ch, b)| letter[ch] == b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub src: usize,
    pub label: Label,
    pub prog: Program,
    pub tgt: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Initial {
    pub state: usize,
    pub guard: Vec<Atomic>,
}

/// A generalized timed automaton. Letters are valuations of the Boolean
/// input `channels`; transition labels are cubes over them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gta {
    pub states: Vec<String>,
    pub channels: Vec<String>,
    pub clocks: Vec<ClockId>,
    pub transitions: Vec<Transition>,
    pub initial: Vec<Initial>,
    pub buchi: Vec<bool>,
    /// Accepting guard; always the trivial guard in this toolkit.
    #[serde(default)]
    pub accept_guard: Vec<Atomic>,
}

/// A generalized timed transducer: a GTA with one output letter (a
/// valuation of `out_channels`) per transition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gtt {
    pub gta: Gta,
    pub out_channels: Vec<String>,
    pub outputs: Vec<Vec<bool>>,
}

impl Gta {
    pub fn new(channels: Vec<String>) -> Self {
        Gta {
            states: Vec::new(),
            channels,
            clocks: Vec::new(),
            transitions: Vec::new(),
            initial: Vec::new(),
            buchi: Vec::new(),
            accept_guard: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>, buchi: bool) -> usize {
        self.states.push(name.into());
        self.buchi.push(buchi);
        self.states.len() - 1
    }

    pub fn add_clock(&mut self, name: impl Into<String>, kind: ClockKind) -> usize {
        let index = self.clocks.len() + 1;
        self.clocks.push(ClockId { index, kind, name: name.into() });
        index
    }

    pub fn add_transition(&mut self, src: usize, label: Label, prog: Program, tgt: usize) -> usize {
        self.transitions.push(Transition { src, label, prog, tgt });
        self.transitions.len() - 1
    }

    pub fn add_initial(&mut self, state: usize, guard: Vec<Atomic>) {
        self.initial.push(Initial { state, guard });
    }

    pub fn num_clocks(&self) -> usize {
        self.clocks.len()
    }

    /// Kinds of clocks `1..=n`, in index order.
    pub fn kinds(&self) -> Vec<ClockKind> {
        self.clocks.iter().map(|c| c.kind).collect()
    }

    pub fn kind(&self, clock: usize) -> ClockKind {
        self.clocks[clock - 1].kind
    }

    pub fn future_clocks(&self) -> Vec<usize> {
        self.clocks.iter().filter(|c| c.kind == ClockKind::Future).map(|c| c.index).collect()
    }

    pub fn history_clocks(&self) -> Vec<usize> {
        self.clocks.iter().filter(|c| c.kind == ClockKind::History).map(|c| c.index).collect()
    }

    pub fn clock_name(&self, clock: usize) -> &str {
        if clock == ZERO {
            "0"
        } else {
            &self.clocks[clock - 1].name
        }
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c == name)
    }

    /// Converts a letter given as a set of channel names to a bit vector.
    /// Unknown names are ignored.
    pub fn letter_bits<S: AsRef<str>>(&self, letter: &[S]) -> Vec<bool> {
        let mut bits = vec![false; self.channels.len()];
        for name in letter {
            if let Some(i) = self.channel_index(name.as_ref()) {
                bits[i] = true;
            }
        }
        bits
    }

    /// Outgoing transition indices per state.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.src].push(i);
        }
        out
    }

    /// Checks the structural invariants: declared clocks, in-range states
    /// and channels, kind-preserving renamings.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.num_clocks();
        if self.buchi.len() != self.states.len() {
            return Err("buchi vector length differs from state count".into());
        }
        for (i, c) in self.clocks.iter().enumerate() {
            if c.index != i + 1 {
                return Err(format!("clock `{}` has index {} but position {}", c.name, c.index, i + 1));
            }
        }
        let check_atom = |a: &Atomic, ctx: &str| -> Result<(), String> {
            if a.x > n || a.y > n {
                return Err(format!("{ctx}: undeclared clock in constraint"));
            }
            Ok(())
        };
        for init in &self.initial {
            if init.state >= self.states.len() {
                return Err("initial state out of range".into());
            }
            for a in &init.guard {
                check_atom(a, "initial guard")?;
            }
        }
        for (ti, t) in self.transitions.iter().enumerate() {
            let ctx = format!("transition {ti}");
            if t.src >= self.states.len() || t.tgt >= self.states.len() {
                return Err(format!("{ctx}: state out of range"));
            }
            for &(ch, _) in &t.label {
                if ch >= self.channels.len() {
                    return Err(format!("{ctx}: channel out of range"));
                }
            }
            for step in &t.prog {
                match step {
                    Step::Guard(g) => {
                        for a in g {
                            check_atom(a, &ctx)?;
                        }
                    }
                    Step::Change(r) => {
                        if r.iter().any(|&c| c == ZERO || c > n) {
                            return Err(format!("{ctx}: change of an undeclared clock"));
                        }
                    }
                    Step::Rename(s) => {
                        if s.len() != n + 1 || s[0] != ZERO {
                            return Err(format!("{ctx}: renaming must cover all clocks and fix 0"));
                        }
                        let mut seen = vec![false; n + 1];
                        for (i, &j) in s.iter().enumerate() {
                            if j > n || seen[j] {
                                return Err(format!("{ctx}: renaming is not a permutation"));
                            }
                            seen[j] = true;
                            if i != ZERO && self.kind(i) != self.kind(j) {
                                return Err(format!("{ctx}: renaming mixes clock kinds"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl Gtt {
    pub fn validate(&self) -> Result<(), String> {
        self.gta.validate()?;
        if self.outputs.len() != self.gta.transitions.len() {
            return Err("one output letter per transition is required".into());
        }
        if self.outputs.iter().any(|o| o.len() != self.out_channels.len()) {
            return Err("output letter width differs from output channels".into());
        }
        Ok(())
    }
}
