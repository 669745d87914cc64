//! Renaming elimination: the accumulated permutation moves into the state,
//! so logical clock `i` is stored in physical clock `perm[i]`.

use std::collections::{HashMap, VecDeque};

use crate::ext::ExtReal;

use super::{Atomic, Gta, Gtt, ReleaseChoices, Step, StepChoice, Transition};

#[derive(Clone, Debug)]
pub struct Eliminated {
    pub gta: Gta,
    /// `(original state, accumulated permutation)` of each new state.
    pub origin: Vec<(usize, Vec<usize>)>,
    /// Original transition of each new transition.
    pub transition_origin: Vec<usize>,
    edge: HashMap<(usize, usize), usize>,
    start: HashMap<usize, usize>,
    original_progs: Vec<Vec<Step>>,
}

impl Eliminated {
    /// New state standing for original initial state `q` with the identity permutation.
    pub fn initial_state(&self, q: usize) -> Option<usize> {
        self.start.get(&q).copied()
    }

    /// Translates a run's choices (original transition indices, logical
    /// clocks) to the renaming-free automaton.
    pub fn translate_run(&self, q0: usize, choices: &[StepChoice]) -> Option<Vec<StepChoice>> {
        let mut q = self.initial_state(q0)?;
        let mut out = Vec::with_capacity(choices.len());
        for ch in choices {
            let nt = *self.edge.get(&(q, ch.transition))?;
            let perms = self.step_perms(q, ch.transition);
            let mut releases = ReleaseChoices::default();
            for (&(step, clock), &v) in &ch.releases.by_step {
                releases.by_step.insert((step, perms[step][clock]), v);
            }
            // A per-clock value may apply at several steps under different
            // storage locations; expand it per step.
            for (si, step) in self.original_progs[ch.transition].iter().enumerate() {
                if let Step::Change(r) = step {
                    for &c in r {
                        if ch.releases.by_step.contains_key(&(si, c)) {
                            continue;
                        }
                        if let Some(&v) = ch.releases.by_clock.get(&c) {
                            releases.by_step.insert((si, perms[si][c]), v);
                        }
                    }
                }
            }
            out.push(StepChoice { transition: nt, releases });
            q = self.gta.transitions[nt].tgt;
        }
        Some(out)
    }

    fn step_perms(&self, q: usize, t: usize) -> Vec<Vec<usize>> {
        let mut perm = self.origin[q].1.clone();
        let mut out = Vec::new();
        for step in &self.original_progs[t] {
            out.push(perm.clone());
            if let Step::Rename(sigma) = step {
                perm = sigma.iter().map(|&s| perm[s]).collect();
            }
        }
        out
    }

    /// Physical valuation to logical valuation for new state `q`.
    pub fn logical(&self, q: usize, physical: &[ExtReal]) -> Vec<ExtReal> {
        self.origin[q].1.iter().map(|&p| physical[p]).collect()
    }

    fn build(a: &Gta) -> Eliminated {
        let n = a.num_clocks();
        let identity: Vec<usize> = (0..=n).collect();
        let mut g = Gta::new(a.channels.clone());
        g.clocks = a.clocks.clone();
        g.accept_guard = a.accept_guard.clone();
        let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut origin = Vec::new();
        let mut queue = VecDeque::new();
        let mut intern = |g: &mut Gta, origin: &mut Vec<(usize, Vec<usize>)>, queue: &mut VecDeque<usize>, q: usize, p: Vec<usize>| {
            if let Some(&s) = index.get(&(q, p.clone())) {
                return s;
            }
            let name = if p == (0..p.len()).collect::<Vec<_>>() {
                a.states[q].clone()
            } else {
                format!("{}@{:?}", a.states[q], &p[1..])
            };
            let s = g.add_state(name, a.buchi[q]);
            index.insert((q, p.clone()), s);
            origin.push((q, p));
            queue.push_back(s);
            s
        };
        let mut start = HashMap::new();
        for init in &a.initial {
            let s = intern(&mut g, &mut origin, &mut queue, init.state, identity.clone());
            start.insert(init.state, s);
            g.add_initial(s, init.guard.clone());
        }
        let out = a.outgoing();
        let mut transition_origin = Vec::new();
        let mut edge = HashMap::new();
        while let Some(s) = queue.pop_front() {
            let (q, perm) = origin[s].clone();
            for &ti in &out[q] {
                let t = &a.transitions[ti];
                let mut p = perm.clone();
                let mut prog = Vec::with_capacity(t.prog.len());
                for step in &t.prog {
                    match step {
                        Step::Guard(gd) => prog.push(Step::Guard(gd.iter().map(|at: &Atomic| at.map(|c| p[c])).collect())),
                        Step::Change(r) => prog.push(Step::Change(r.iter().map(|&c| p[c]).collect())),
                        Step::Rename(sigma) => {
                            p = sigma.iter().map(|&x| p[x]).collect();
                            prog.push(Step::Guard(Vec::new()));
                        }
                    }
                }
                let tgt = intern(&mut g, &mut origin, &mut queue, t.tgt, p);
                g.transitions.push(Transition { src: s, label: t.label.clone(), prog, tgt });
                edge.insert((s, ti), g.transitions.len() - 1);
                transition_origin.push(ti);
            }
        }
        Eliminated {
            gta: g,
            origin,
            transition_origin,
            edge,
            start,
            original_progs: a.transitions.iter().map(|t| t.prog.clone()).collect(),
        }
    }
}

pub fn eliminate_renamings(a: &Gta) -> Eliminated {
    Eliminated::build(a)
}

/// Renaming elimination for a transducer; outputs follow their transitions.
pub fn eliminate_renamings_gtt(t: &Gtt) -> (Gtt, Eliminated) {
    let e = eliminate_renamings(&t.gta);
    let outputs = e.transition_origin.iter().map(|&o| t.outputs[o].clone()).collect();
    (Gtt { gta: e.gta.clone(), out_channels: t.out_channels.clone(), outputs }, e)
}
