//! Synchronous product and sequential composition of transducers.

use std::collections::{BTreeMap, VecDeque};

use super::TranslateError;
use crate::automaton::{label_matches, Atomic, Gta, Gtt, Label, Program, Step};
use crate::zone::Zone;

/// Programs of the second operand move to clock indices after the first's.
fn shift_prog(prog: &Program, offset: usize, own: usize, total: usize) -> Program {
    let f = |c: usize| if c == 0 { 0 } else { c + offset };
    prog.iter()
        .map(|s| match s {
            Step::Guard(g) => Step::Guard(g.iter().map(|a| a.map(f)).collect()),
            Step::Change(r) => Step::Change(r.iter().map(|&c| f(c)).collect()),
            Step::Rename(sigma) => {
                let mut full: Vec<usize> = (0..=total).collect();
                for i in 1..=own {
                    full[i + offset] = f(sigma[i]);
                }
                Step::Rename(full)
            }
        })
        .collect()
}

/// Extends renamings of the first operand to the combined clock set.
fn widen_prog(prog: &Program, total: usize) -> Program {
    prog.iter()
        .map(|s| match s {
            Step::Rename(sigma) => {
                let mut full: Vec<usize> = (0..=total).collect();
                full[..sigma.len()].copy_from_slice(sigma);
                Step::Rename(full)
            }
            other => other.clone(),
        })
        .collect()
}

fn merge_labels(a: &Label, b: &Label) -> Option<Label> {
    let mut out: BTreeMap<usize, bool> = a.iter().copied().collect();
    for &(ch, v) in b {
        if let Some(&w) = out.get(&ch) {
            if w != v {
                return None;
            }
        }
        out.insert(ch, v);
    }
    Some(out.into_iter().collect())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Compose,
    Product,
}

fn combine(t1: &Gtt, t2: &Gtt, mode: Mode) -> Gtt {
    let (g1, g2) = (&t1.gta, &t2.gta);
    let (n1, n2) = (g1.num_clocks(), g2.num_clocks());
    let total = n1 + n2;
    let mut gta = Gta::new(g1.channels.clone());
    for c in &g1.clocks {
        gta.add_clock(c.name.clone(), c.kind);
    }
    for c in &g2.clocks {
        let mut name = c.name.clone();
        while gta.clocks.iter().any(|d| d.name == name) {
            name.push('\'');
        }
        gta.add_clock(name, c.kind);
    }
    let kinds = gta.kinds();
    let universe = Zone::universe(&kinds);
    let all1 = g1.buchi.iter().all(|&b| b);
    let all2 = g2.buchi.iter().all(|&b| b);
    let phased = !all1 && !all2;
    let out1 = g1.outgoing();
    let out2 = g2.outgoing();

    let mut index: BTreeMap<(usize, usize, u8), usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut state = |gta: &mut Gta, queue: &mut VecDeque<(usize, usize, u8)>, key: (usize, usize, u8)| {
        *index.entry(key).or_insert_with(|| {
            queue.push_back(key);
            let (s1, s2, c) = key;
            let buchi = if phased { c == 0 && g1.buchi[s1] } else { g1.buchi[s1] && g2.buchi[s2] };
            let name = if phased {
                format!("({},{},{c})", g1.states[s1], g2.states[s2])
            } else {
                format!("({},{})", g1.states[s1], g2.states[s2])
            };
            gta.add_state(name, buchi)
        })
    };
    for i1 in &g1.initial {
        for i2 in &g2.initial {
            let mut guard = i1.guard.clone();
            guard.extend(i2.guard.iter().map(|a: &Atomic| a.map(|c| if c == 0 { 0 } else { c + n1 })));
            if Zone::initial_zone(&kinds, &guard).is_none() {
                continue;
            }
            let s = state(&mut gta, &mut queue, (i1.state, i2.state, 0));
            gta.add_initial(s, guard);
        }
    }
    let mut outputs = Vec::new();
    while let Some((s1, s2, c)) = queue.pop_front() {
        let src = state(&mut gta, &mut queue, (s1, s2, c));
        let c2 = if !phased {
            0
        } else if c == 0 && g1.buchi[s1] {
            1
        } else if c == 1 && g2.buchi[s2] {
            0
        } else {
            c
        };
        for &ti in &out1[s1] {
            let a = &g1.transitions[ti];
            for &tj in &out2[s2] {
                let b = &g2.transitions[tj];
                let (label, out) = match mode {
                    Mode::Compose => {
                        if !label_matches(&b.label, &t1.outputs[ti]) {
                            continue;
                        }
                        (a.label.clone(), t2.outputs[tj].clone())
                    }
                    Mode::Product => {
                        let Some(l) = merge_labels(&a.label, &b.label) else { continue };
                        let mut o = t1.outputs[ti].clone();
                        o.extend(t2.outputs[tj].iter().copied());
                        (l, o)
                    }
                };
                let mut prog = widen_prog(&a.prog, total);
                prog.extend(shift_prog(&b.prog, n1, n2, total));
                if universe.clone().apply_program_symbolic(&prog).is_none() {
                    continue;
                }
                let tgt = state(&mut gta, &mut queue, (a.tgt, b.tgt, c2));
                gta.add_transition(src, label, prog, tgt);
                outputs.push(out);
            }
        }
    }
    let out_channels = match mode {
        Mode::Compose => t2.out_channels.clone(),
        Mode::Product => {
            let mut o: Vec<String> = t1.out_channels.iter().map(|c| format!("l.{c}")).collect();
            o.extend(t2.out_channels.iter().map(|c| format!("r.{c}")));
            o
        }
    };
    Gtt { gta, out_channels, outputs }
}

/// `t2 ∘ t1`: feeds the outputs of `t1` to `t2`.
pub fn compose(t2: &Gtt, t1: &Gtt) -> Result<Gtt, TranslateError> {
    if t2.gta.channels.len() != t1.out_channels.len() {
        return Err(TranslateError::AlphabetMismatch {
            expected: t2.gta.channels.len(),
            found: t1.out_channels.len(),
        });
    }
    Ok(combine(t1, t2, Mode::Compose))
}

/// Runs both transducers on the same input and pairs their outputs.
pub fn product(t1: &Gtt, t2: &Gtt) -> Result<Gtt, TranslateError> {
    if t1.gta.channels != t2.gta.channels {
        return Err(TranslateError::AlphabetMismatch { expected: t1.gta.channels.len(), found: t2.gta.channels.len() });
    }
    Ok(combine(t1, t2, Mode::Product))
}
