use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ext::{rat_str, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub letter: BTreeSet<String>,
    #[serde(with = "rat_str")]
    pub t: Rat,
}

impl Event {
    pub fn new<S: AsRef<str>>(letter: &[S], t: Rat) -> Event {
        Event { letter: letter.iter().map(|s| s.as_ref().to_string()).collect(), t }
    }

    pub fn has(&self, p: &str) -> bool {
        self.letter.contains(p)
    }
}

/// A finite timed word with non-decreasing timestamps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimedWord(pub Vec<Event>);

impl TimedWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self) -> Result<(), String> {
        let mut prev = Rat::from_integer(0);
        for (i, e) in self.0.iter().enumerate() {
            if e.t < prev {
                return Err(format!("timestamp at position {i} is smaller than its predecessor"));
            }
            prev = e.t;
        }
        Ok(())
    }

    /// Letters as bit vectors over `channels`.
    pub fn to_bits(&self, channels: &[String]) -> Vec<(Vec<bool>, Rat)> {
        self.0.iter().map(|e| (channels.iter().map(|c| e.has(c)).collect(), e.t)).collect()
    }
}

/// An ultimately periodic timed word: `prefix`, then `cycle` repeated,
/// where the `k`-th repetition is shifted by `k * period`. Cycle
/// timestamps are those of the first repetition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<Event>,
    pub cycle: Vec<Event>,
    #[serde(with = "rat_str")]
    pub period: Rat,
}

impl Lasso {
    pub fn check(&self) -> Result<(), String> {
        if self.cycle.is_empty() {
            return Err("empty cycle".into());
        }
        if self.period <= Rat::from_integer(0) {
            return Err("cycle duration must be positive".into());
        }
        let first = TimedWord(self.prefix.iter().chain(self.cycle.iter()).cloned().collect());
        first.check()?;
        if self.cycle.last().expect("non-empty").t > self.cycle[0].t + self.period {
            return Err("cycle does not fit in its period".into());
        }
        Ok(())
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Event at any position of the infinite word.
    pub fn at(&self, p: usize) -> (&BTreeSet<String>, Rat) {
        let m = self.prefix.len();
        if p < m {
            let e = &self.prefix[p];
            (&e.letter, e.t)
        } else {
            let l = self.cycle.len();
            let k = (p - m) / l;
            let e = &self.cycle[(p - m) % l];
            (&e.letter, e.t + self.period * Rat::from_integer(k as i64))
        }
    }

    /// The first `prefix + k * cycle` positions as a finite word.
    pub fn unroll(&self, k: usize) -> TimedWord {
        let n = self.prefix.len() + k * self.cycle.len();
        TimedWord((0..n).map(|p| {
            let (l, t) = self.at(p);
            Event { letter: l.clone(), t }
        }).collect())
    }
}
