//! Clock-free letter transducers and the timed Next transducer.

use super::{in_interval, TranslateError};
use crate::automaton::{Atomic, ClockKind, Gta, Gtt, Step};
use crate::formula::Interval;

fn single_state(channels: Vec<String>) -> (Gta, usize) {
    let mut gta = Gta::new(channels);
    let s = gta.add_state("s", true);
    gta.add_initial(s, Vec::new());
    (gta, s)
}

/// Outputs 1 exactly on letters containing `p`.
pub fn atomic_transducer(channels: &[String], p: &str) -> Result<Gtt, TranslateError> {
    let ch = channels
        .iter()
        .position(|c| c == p)
        .ok_or_else(|| TranslateError::MissingChannel(p.to_string()))?;
    let (mut gta, s) = single_state(channels.to_vec());
    gta.add_transition(s, vec![(ch, true)], Vec::new(), s);
    gta.add_transition(s, vec![(ch, false)], Vec::new(), s);
    Ok(Gtt { gta, out_channels: vec!["o".into()], outputs: vec![vec![true], vec![false]] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Not,
    And,
    Or,
}

/// Pointwise Boolean function on one or two input channels.
pub fn bool_transducer(op: BoolOp) -> Gtt {
    let chans: Vec<String> = match op {
        BoolOp::Not => vec!["a".into()],
        _ => vec!["a".into(), "b".into()],
    };
    let (mut gta, s) = single_state(chans);
    let rows: Vec<(Vec<(usize, bool)>, bool)> = match op {
        BoolOp::Not => vec![(vec![(0, true)], false), (vec![(0, false)], true)],
        BoolOp::And => vec![
            (vec![(0, false)], false),
            (vec![(0, true), (1, false)], false),
            (vec![(0, true), (1, true)], true),
        ],
        BoolOp::Or => vec![
            (vec![(0, true)], true),
            (vec![(0, false), (1, true)], true),
            (vec![(0, false), (1, false)], false),
        ],
    };
    let mut outputs = Vec::new();
    for (label, o) in rows {
        gta.add_transition(s, label, Vec::new(), s);
        outputs.push(vec![o]);
    }
    Gtt { gta, out_channels: vec!["o".into()], outputs }
}

/// Copies each input letter to the output.
pub fn identity_transducer(width: usize) -> Gtt {
    let chans: Vec<String> = (0..width).map(|i| format!("i{i}")).collect();
    let (mut gta, s) = single_state(chans);
    let mut outputs = Vec::new();
    for bits in 0..(1usize << width) {
        let letter: Vec<bool> = (0..width).map(|i| bits >> i & 1 == 1).collect();
        gta.add_transition(s, letter.iter().copied().enumerate().collect(), Vec::new(), s);
        outputs.push(letter);
    }
    Gtt { gta, out_channels: (0..width).map(|i| format!("o{i}")).collect(), outputs }
}

/// Outputs `bit` on every letter.
pub fn constant_transducer(channels: &[String], bit: bool) -> Gtt {
    let (mut gta, s) = single_state(channels.to_vec());
    gta.add_transition(s, Vec::new(), Vec::new(), s);
    Gtt { gta, out_channels: vec!["o".into()], outputs: vec![vec![bit]] }
}

/// `X_I a` on one input channel. Location 0 expects the next letter to be
/// 1, location 1 expects 0. The future clock `x` predicts the time of the
/// next letter.
pub fn next_transducer(iv: Interval) -> Gtt {
    let mut gta = Gta::new(vec!["a".into()]);
    let l1 = gta.add_state("next=1", true);
    let l2 = gta.add_state("next=0", true);
    let x = gta.add_clock("x", ClockKind::Future);
    gta.add_initial(l1, Vec::new());
    gta.add_initial(l2, Vec::new());
    let kinds = gta.kinds();
    let base = vec![Step::Guard(Atomic::eq(x, crate::ExtReal::ZERO)), Step::Change(vec![x])];
    let inside = in_interval(iv, x);
    let mut outputs = Vec::new();
    for (src, bit) in [(l1, true), (l2, false)] {
        for (cond, o) in [(inside.clone(), true), (inside.clone().not(), false)] {
            for cube in cond.cubes(&kinds) {
                let mut prog = base.clone();
                if !cube.is_empty() {
                    prog.push(Step::Guard(cube));
                }
                gta.add_transition(src, vec![(0, bit)], prog, l1);
                outputs.push(vec![o]);
            }
        }
        gta.add_transition(src, vec![(0, bit)], base.clone(), l2);
        outputs.push(vec![false]);
    }
    Gtt { gta, out_channels: vec!["o".into()], outputs }
}
