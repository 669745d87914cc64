//! Output sets of a transducer on a finite word: symbolic runs with exact
//! delays, kept only if they extend to an accepting run on the idle
//! continuation of the word.
//!
//! Runs are explored on a [`Network`] without flattening it. Component
//! clocks are disjoint and every delay is exact, so the zone of a composed
//! run is the product of its components' zones and each component keeps
//! its own.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::graph::enabled;
use super::{has_renamings, released_by, LivenessOptions};
use crate::automaton::{eliminate_renamings_gtt, Gtt};
use crate::ext::Rat;
use crate::translate::Network;
use crate::zone::Zone;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputSets {
    /// Output letters of viable runs at each position.
    pub per_position: Vec<BTreeSet<Vec<bool>>>,
    /// False when the node budget stopped the search; the sets may then
    /// miss runs.
    pub complete: bool,
}

/// For each position of `word`, the output letters produced by runs that
/// read the whole word and continue to an accepting run on the idle tail.
pub fn symbolic_outputs(t: &Gtt, word: &[(Vec<bool>, Rat)], opts: &LivenessOptions) -> OutputSets {
    network_outputs(&Network::Leaf(Arc::new(t.clone())), word, opts)
}

/// [`symbolic_outputs`] of the flattening of `net`, computed on the tree.
pub fn network_outputs(net: &Network, word: &[(Vec<bool>, Rat)], opts: &LivenessOptions) -> OutputSets {
    Runner::new(net).outputs(word, opts)
}

enum Shape {
    Leaf(usize),
    Compose(Box<Shape>, Box<Shape>),
    Product(Box<Shape>, Box<Shape>),
}

fn shape(net: &Network, next: &mut usize) -> Shape {
    match net {
        Network::Leaf(_) => {
            *next += 1;
            Shape::Leaf(*next - 1)
        }
        Network::Compose(outer, inner) => {
            let i = shape(inner, next);
            Shape::Compose(Box::new(shape(outer, next)), Box::new(i))
        }
        Network::Product(a, b) => {
            let a = shape(a, next);
            Shape::Product(Box::new(a), Box::new(shape(b, next)))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    states: Vec<usize>,
    zones: Vec<Zone>,
}

/// One synchronous step of a subtree: a transition per leaf of its
/// contiguous leaf range, the zones after the programs, and the output.
struct Move {
    trans: Vec<usize>,
    zones: Vec<Zone>,
    out: Vec<bool>,
}

struct Runner {
    leaves: Vec<Gtt>,
    outgoing: Vec<Vec<Vec<usize>>>,
    shape: Shape,
}

impl Runner {
    fn new(net: &Network) -> Runner {
        let leaves: Vec<Gtt> = net
            .leaves()
            .into_iter()
            .map(|t| if has_renamings(&t.gta) { eliminate_renamings_gtt(t).0 } else { (**t).clone() })
            .collect();
        let outgoing = leaves.iter().map(|t| t.gta.outgoing()).collect();
        Runner { leaves, outgoing, shape: shape(net, &mut 0) }
    }

    fn step(&self, s: &Shape, cfg: &Config, input: &[bool]) -> Vec<Move> {
        match s {
            Shape::Leaf(i) => {
                let g = &self.leaves[*i];
                enabled(&g.gta, &self.outgoing[*i], cfg.states[*i], input)
                    .filter_map(|t| {
                        let z = cfg.zones[*i].clone().apply_program_symbolic(&g.gta.transitions[t].prog)?;
                        Some(Move { trans: vec![t], zones: vec![z], out: g.outputs[t].clone() })
                    })
                    .collect()
            }
            Shape::Compose(outer, inner) => {
                let mut cache: HashMap<Vec<bool>, Vec<Move>> = HashMap::new();
                let mut out = Vec::new();
                for m in self.step(inner, cfg, input) {
                    let mo = cache.entry(m.out.clone()).or_insert_with(|| self.step(outer, cfg, &m.out));
                    for o in mo.iter() {
                        out.push(Move {
                            trans: [&m.trans[..], &o.trans[..]].concat(),
                            zones: [&m.zones[..], &o.zones[..]].concat(),
                            out: o.out.clone(),
                        });
                    }
                }
                out
            }
            Shape::Product(a, b) => {
                let mb = self.step(b, cfg, input);
                let mut out = Vec::new();
                for m in self.step(a, cfg, input) {
                    for o in &mb {
                        out.push(Move {
                            trans: [&m.trans[..], &o.trans[..]].concat(),
                            zones: [&m.zones[..], &o.zones[..]].concat(),
                            out: [&m.out[..], &o.out[..]].concat(),
                        });
                    }
                }
                out
            }
        }
    }

    /// Configurations reached by a move on `input` followed by a delay of
    /// `d`, with the moves that reach them.
    fn successors(&self, cfg: &Config, input: &[bool], d: Rat) -> Vec<(Config, Move)> {
        self.step(&self.shape, cfg, input)
            .into_iter()
            .filter_map(|m| {
                let zones = m.zones.iter().map(|z| z.clone().delay_exact(d)).collect::<Option<Vec<_>>>()?;
                let states = m.trans.iter().enumerate().map(|(i, &t)| self.leaves[i].gta.transitions[t].tgt).collect();
                Some((Config { states, zones }, m))
            })
            .collect()
    }

    fn initial(&self, t0: Rat) -> Vec<Config> {
        let mut configs = vec![Config { states: Vec::new(), zones: Vec::new() }];
        for g in &self.leaves {
            let universe = Zone::universe(&g.gta.kinds());
            let starts: Vec<(usize, Zone)> = g
                .gta
                .initial
                .iter()
                .filter_map(|init| Some((init.state, universe.clone().guard(&init.guard)?.delay_exact(t0)?)))
                .collect();
            configs = configs
                .into_iter()
                .flat_map(|c| {
                    starts.iter().map(move |(q, z)| {
                        let mut c = c.clone();
                        c.states.push(*q);
                        c.zones.push(z.clone());
                        c
                    })
                })
                .collect();
        }
        let mut seen = HashSet::new();
        configs.retain(|c| seen.insert(c.clone()));
        configs
    }

    fn outputs(&self, word: &[(Vec<bool>, Rat)], opts: &LivenessOptions) -> OutputSets {
        let n = word.len();
        let mut complete = true;
        let mut budget = opts.budget;
        let t0 = word.first().map(|w| w.1).unwrap_or_else(|| Rat::from_integer(0));

        // layers[i]: configurations before reading letter i, at its
        // timestamp; layers[n]: after the last letter, one time unit later.
        let mut layers: Vec<Vec<Config>> = vec![self.initial(t0)];
        // edges[i]: (source in layer i, target in layer i+1, output).
        let mut edges: Vec<Vec<(usize, usize, Vec<bool>)>> = Vec::with_capacity(n);
        for i in 0..n {
            let (letter, ti) = &word[i];
            let d = if i + 1 < n { word[i + 1].1 - ti } else { Rat::from_integer(1) };
            let mut next = Vec::new();
            let mut seen: HashMap<Config, usize> = HashMap::new();
            let mut es = Vec::new();
            for (u, cfg) in layers[i].iter().enumerate() {
                for (c, m) in self.successors(cfg, letter, d) {
                    let v = match seen.entry(c) {
                        Entry::Occupied(e) => *e.get(),
                        Entry::Vacant(e) => {
                            if budget == 0 {
                                complete = false;
                                continue;
                            }
                            budget -= 1;
                            next.push(e.key().clone());
                            *e.insert(next.len() - 1)
                        }
                    };
                    es.push((u, v, m.out));
                }
            }
            layers.push(next);
            edges.push(es);
        }

        let (mut viable, tail_complete) = self.viable(&layers[n], budget);
        complete &= tail_complete;
        // Every layer node is reachable by construction, so an edge counts
        // exactly when its target is viable.
        let mut per_position = vec![BTreeSet::new(); n];
        for i in (0..n).rev() {
            let mut prev = vec![false; layers[i].len()];
            for (u, v, out) in &edges[i] {
                if viable[*v] {
                    prev[*u] = true;
                    per_position[i].insert(out.clone());
                }
            }
            viable = prev;
        }
        OutputSets { per_position, complete }
    }

    /// Which roots start an accepting run on empty letters one time unit
    /// apart. A position the word determines has the same value on every
    /// continuation, and time diverges along this one.
    fn viable(&self, roots: &[Config], budget: usize) -> (Vec<bool>, bool) {
        let idle = vec![false; self.leaves.first().map_or(0, |g| g.gta.channels.len())];
        let one = Rat::from_integer(1);
        let mut nodes: Vec<Config> = roots.to_vec();
        let mut index: HashMap<Config, usize> = roots.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut edges: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); nodes.len()];
        let mut complete = true;
        let mut stack: Vec<usize> = (0..nodes.len()).collect();
        while let Some(u) = stack.pop() {
            let cfg = nodes[u].clone();
            for (c, m) in self.successors(&cfg, &idle, one) {
                let v = match index.entry(c) {
                    Entry::Occupied(e) => *e.get(),
                    Entry::Vacant(e) => {
                        if nodes.len() >= roots.len() + budget {
                            complete = false;
                            continue;
                        }
                        nodes.push(e.key().clone());
                        edges.push(Vec::new());
                        stack.push(nodes.len() - 1);
                        *e.insert(nodes.len() - 1)
                    }
                };
                edges[u].push((v, m.trans));
            }
        }

        let mut g = DiGraph::<(), ()>::with_capacity(nodes.len(), 0);
        let idx: Vec<_> = (0..nodes.len()).map(|_| g.add_node(())).collect();
        for (u, es) in edges.iter().enumerate() {
            for (v, _) in es {
                g.add_edge(idx[u], idx[*v], ());
            }
        }
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0; nodes.len()];
        for (ci, scc) in sccs.iter().enumerate() {
            for x in scc {
                comp[x.index()] = ci;
            }
        }
        let mut good = vec![false; nodes.len()];
        let mut queue = VecDeque::new();
        for (ci, scc) in sccs.iter().enumerate() {
            let members: Vec<usize> = scc.iter().map(|x| x.index()).collect();
            if self.accepting(&members, &nodes, &edges, &comp, ci) {
                for &m in &members {
                    good[m] = true;
                    queue.push_back(m);
                }
            }
        }
        let mut rev = vec![Vec::new(); nodes.len()];
        for (u, es) in edges.iter().enumerate() {
            for (v, _) in es {
                rev[*v].push(u);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &rev[v] {
                if !good[u] {
                    good[u] = true;
                    queue.push_back(u);
                }
            }
        }
        good.truncate(roots.len());
        (good, complete)
    }

    /// A component with an internal edge that visits every leaf's Büchi
    /// states, at one of whose nodes the future clocks it never releases can
    /// all be `-inf`.
    fn accepting(&self, members: &[usize], nodes: &[Config], edges: &[Vec<(usize, Vec<usize>)>], comp: &[usize], ci: usize) -> bool {
        let k = self.leaves.len();
        let mut released: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        let mut has_edge = false;
        for &u in members {
            for (v, trans) in &edges[u] {
                if comp[*v] == ci {
                    has_edge = true;
                    for (i, &t) in trans.iter().enumerate() {
                        released[i].extend(released_by(&self.leaves[i].gta, t));
                    }
                }
            }
        }
        if !has_edge || !(0..k).all(|i| members.iter().any(|&u| self.leaves[i].gta.buchi[nodes[u].states[i]])) {
            return false;
        }
        let unreleased: Vec<Vec<usize>> =
            (0..k).map(|i| self.leaves[i].gta.future_clocks().into_iter().filter(|x| !released[i].contains(x)).collect()).collect();
        members.iter().any(|&u| (0..k).all(|i| nodes[u].zones[i].clone().force_minus_infinity(&unreleased[i]).is_some()))
    }
}
