//! Zone graphs of generalized timed automata, Büchi emptiness with the
//! future-clock side conditions, and lasso witnesses.

mod graph;
mod model_check;
mod symbolic;
mod witness;

pub use graph::{build_zone_graph, build_zone_graph_from, build_zone_graph_until, successor, Covering, ExploreOptions, ZgEdge, ZgNode, ZoneGraph};
pub use model_check::{model_check, model_check_product, product_gta, system_channels, verdict_of, McVerdict};
pub use symbolic::{network_outputs, symbolic_outputs, OutputSets};
pub use witness::{validate_witness, ConcreteRun, Evidence, LassoWitness, WitnessStep};

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::automaton::{eliminate_renamings, Atomic, ClockKind, Gta, Step};
use crate::ext::ExtReal;

/// Adds a future clock `z` predicting the next visit to an accepting state,
/// and Büchi copies of the Büchi states. Entering a copy checks `z = 0` and
/// predicts the next visit at least one time unit ahead. Original states
/// keep their indices and become non-accepting; accepting cycles then take
/// at least one time unit.
pub fn make_strongly_non_zeno(a: &Gta) -> Gta {
    let mut g = a.clone();
    let mut name = "z".to_string();
    while g.clocks.iter().any(|c| c.name == name) {
        name.push('\'');
    }
    let z = g.add_clock(name, ClockKind::Future);
    let n = a.states.len();
    let mut hat = vec![None; n];
    for q in 0..n {
        if a.buchi[q] {
            hat[q] = Some(g.add_state(format!("{}^", a.states[q]), true));
        }
        g.buchi[q] = false;
    }
    g.transitions.clear();
    let tick = [
        Step::Guard(Atomic::eq(z, ExtReal::ZERO)),
        Step::Change(vec![z]),
        Step::Guard(vec![Atomic::upper(z, false, ExtReal::int(-1))]),
    ];
    for t in &a.transitions {
        let sources = std::iter::once(t.src).chain(hat[t.src]);
        for src in sources {
            g.add_transition(src, t.label.clone(), t.prog.clone(), t.tgt);
            if let Some(h) = hat[t.tgt] {
                let mut prog = t.prog.clone();
                prog.extend(tick.iter().cloned());
                g.add_transition(src, t.label.clone(), prog, h);
            }
        }
    }
    g
}

#[derive(Clone, Debug)]
pub struct LivenessOptions {
    pub budget: usize,
    pub non_zeno: bool,
    /// Worker threads for successor computation; 0 uses the global pool.
    pub threads: usize,
}

impl Default for LivenessOptions {
    fn default() -> Self {
        LivenessOptions { budget: 100_000, non_zeno: true, threads: 0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes: usize,
    pub edges: usize,
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub enum Liveness {
    Empty(Stats),
    NonEmpty(Box<LassoWitness>, Stats),
    Inconclusive(Stats),
}

impl Liveness {
    pub fn stats(&self) -> &Stats {
        match self {
            Liveness::Empty(s) | Liveness::NonEmpty(_, s) | Liveness::Inconclusive(s) => s,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Liveness::Empty(_))
    }

    pub fn witness(&self) -> Option<&LassoWitness> {
        match self {
            Liveness::NonEmpty(w, _) => Some(w),
            _ => None,
        }
    }
}

pub fn has_renamings(a: &Gta) -> bool {
    a.transitions.iter().any(|t| t.prog.iter().any(|s| matches!(s, Step::Rename(_))))
}

/// The automaton actually explored: renamings eliminated, then optionally
/// the non-Zeno transformation.
pub fn prepare(a: &Gta, non_zeno: bool) -> Gta {
    let g = if has_renamings(a) { eliminate_renamings(a).gta } else { a.clone() };
    if non_zeno {
        make_strongly_non_zeno(&g)
    } else {
        g
    }
}

pub(crate) fn released_by(a: &Gta, t: usize) -> impl Iterator<Item = usize> + '_ {
    a.transitions[t].prog.iter().flat_map(|s| match s {
        Step::Change(r) => r.clone(),
        _ => Vec::new(),
    })
}

/// An accepting strongly connected component: a node of it where the
/// never-released future clocks can jointly be `-inf`.
#[derive(Clone, Debug)]
pub(crate) struct AcceptingScc {
    pub members: Vec<usize>,
    pub anchor: usize,
    pub unreleased: Vec<usize>,
}

pub(crate) fn accepting_sccs(a: &Gta, zg: &ZoneGraph) -> Vec<AcceptingScc> {
    let mut g = DiGraph::<(), usize>::with_capacity(zg.nodes.len(), 0);
    let idx: Vec<_> = (0..zg.nodes.len()).map(|_| g.add_node(())).collect();
    for (u, es) in zg.edges.iter().enumerate() {
        for e in es {
            g.add_edge(idx[u], idx[e.target], e.transition);
        }
    }
    let future: Vec<usize> = a.future_clocks();
    let mut out = Vec::new();
    let mut comp = vec![usize::MAX; zg.nodes.len()];
    let sccs = tarjan_scc(&g);
    for (ci, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = ci;
        }
    }
    for (ci, scc) in sccs.into_iter().enumerate() {
        let members: Vec<usize> = {
            let mut m: Vec<usize> = scc.iter().map(|n| n.index()).collect();
            m.sort_unstable();
            m
        };
        let mut has_edge = false;
        let mut released = BTreeSet::new();
        for &u in &members {
            for e in &zg.edges[u] {
                if comp[e.target] == ci {
                    has_edge = true;
                    released.extend(released_by(a, e.transition));
                }
            }
        }
        if !has_edge || !members.iter().any(|&u| a.buchi[zg.nodes[u].state]) {
            continue;
        }
        let unreleased: Vec<usize> = future.iter().copied().filter(|x| !released.contains(x)).collect();
        let anchor = members
            .iter()
            .copied()
            .find(|&u| zg.nodes[u].zone.clone().force_minus_infinity(&unreleased).is_some());
        if let Some(anchor) = anchor {
            out.push(AcceptingScc { members, anchor, unreleased });
        }
    }
    out
}

/// Büchi emptiness of `a` under the zone-graph semantics.
pub fn check_liveness(a: &Gta, opts: &LivenessOptions) -> Liveness {
    explore_liveness(a, opts).0
}

/// `check_liveness`, also returning the explored automaton and zone graph.
pub fn explore_liveness(a: &Gta, opts: &LivenessOptions) -> (Liveness, Gta, ZoneGraph) {
    let g = prepare(a, opts.non_zeno);
    let explore = ExploreOptions { budget: opts.budget, covering: Covering::Equivalence, threads: opts.threads };
    // Cycles of a partial graph are cycles of the full one, so the search
    // stops at the first accepting component; it is rerun whenever the
    // graph has doubled.
    let mut next_check = 256;
    let zg = graph::build_zone_graph_until(&g, graph::initial_roots(&g), &explore, |zg| {
        if zg.nodes.len() < next_check {
            return false;
        }
        next_check = 2 * zg.nodes.len();
        !accepting_sccs(&g, zg).is_empty()
    });
    let stats = Stats { nodes: zg.nodes.len(), edges: zg.edge_count(), complete: zg.complete };
    let acc = accepting_sccs(&g, &zg);
    let verdict = if let Some(scc) = acc.first() {
        Liveness::NonEmpty(Box::new(witness::extract(g.clone(), &zg, scc)), stats)
    } else if zg.complete {
        Liveness::Empty(stats)
    } else {
        Liveness::Inconclusive(stats)
    };
    (verdict, g, zg)
}
