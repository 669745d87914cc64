use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::automaton::{label_matches, Gta};
use crate::zone::Zone;

#[derive(Clone, Debug)]
pub struct ZgNode {
    pub state: usize,
    /// Canonical and closed under time elapse.
    pub zone: Zone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZgEdge {
    pub transition: usize,
    pub target: usize,
    /// The computed successor was strictly included in the target's zone.
    pub covered: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Covering {
    /// Stop at a node with an equal zone (mutual inclusion).
    Equivalence,
    /// Stop at a node whose zone includes the new one; sound for
    /// reachability only.
    Inclusion,
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub budget: usize,
    pub covering: Covering,
    pub threads: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { budget: 100_000, covering: Covering::Equivalence, threads: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ZoneGraph {
    pub nodes: Vec<ZgNode>,
    pub edges: Vec<Vec<ZgEdge>>,
    /// `(node, index into the automaton's initial list)`.
    pub roots: Vec<(usize, Option<usize>)>,
    /// False when the budget stopped the exploration.
    pub complete: bool,
}

impl ZoneGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Shortest path of `(transition, node)` steps from a root to `target`.
    pub fn path_from_root(&self, target: usize) -> (usize, Vec<(usize, usize)>) {
        let n = self.nodes.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for &(r, _) in &self.roots {
            if !seen[r] {
                seen[r] = true;
                queue.push_back(r);
            }
        }
        while let Some(u) = queue.pop_front() {
            if u == target {
                break;
            }
            for e in &self.edges[u] {
                if !seen[e.target] {
                    seen[e.target] = true;
                    parent[e.target] = Some((u, e.transition));
                    queue.push_back(e.target);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = target;
        while let Some((u, t)) = parent[v] {
            path.push((t, v));
            v = u;
        }
        path.reverse();
        (v, path)
    }

    pub fn to_dot(&self, a: &Gta) -> String {
        let names: Vec<String> = a.clocks.iter().map(|c| c.name.clone()).collect();
        let mut s = String::from("digraph zonegraph {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label = format!("{}: {}\\n{}", i, a.states[n.state], n.zone.constraint_string(&names).replace('"', "'"));
            let periph = if a.buchi[n.state] { ", peripheries=2" } else { "" };
            s.push_str(&format!("  n{i} [label=\"{label}\"{periph}];\n"));
        }
        for (u, es) in self.edges.iter().enumerate() {
            for e in es {
                let style = if e.covered { ", style=dashed" } else { "" };
                s.push_str(&format!("  n{u} -> n{} [label=\"t{}\"{style}];\n", e.target, e.transition));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Successor zone along a transition: program, then time elapse.
pub fn successor(a: &Gta, zone: &Zone, t: usize) -> Option<Zone> {
    zone.clone().apply_program_symbolic(&a.transitions[t].prog)?.elapse()
}

pub(crate) fn initial_roots(a: &Gta) -> Vec<(usize, Zone, Option<usize>)> {
    let kinds = Arc::new(a.kinds());
    let universe = Zone::universe_shared(kinds);
    a.initial
        .iter()
        .enumerate()
        .filter_map(|(i, init)| Some((init.state, universe.clone().guard(&init.guard)?.elapse()?, Some(i))))
        .collect()
}

/// Zone graph from the initial nodes of `a`.
pub fn build_zone_graph(a: &Gta, opts: &ExploreOptions) -> ZoneGraph {
    build_zone_graph_from(a, initial_roots(a), opts)
}

struct Store {
    exact: HashMap<(usize, Zone), usize>,
    by_state: Vec<Vec<usize>>,
}

/// Zone graph from the given `(state, elapsed zone, initial index)` roots.
pub fn build_zone_graph_from(a: &Gta, roots: Vec<(usize, Zone, Option<usize>)>, opts: &ExploreOptions) -> ZoneGraph {
    build_zone_graph_until(a, roots, opts, |_| false)
}

/// Breadth-first construction that calls `stop` after each layer and
/// returns the partial graph, marked incomplete, once it answers true.
pub fn build_zone_graph_until(
    a: &Gta,
    roots: Vec<(usize, Zone, Option<usize>)>,
    opts: &ExploreOptions,
    mut stop: impl FnMut(&ZoneGraph) -> bool,
) -> ZoneGraph {
    let out = a.outgoing();
    let mut zg = ZoneGraph { nodes: Vec::new(), edges: Vec::new(), roots: Vec::new(), complete: true };
    let mut store = Store { exact: HashMap::new(), by_state: vec![Vec::new(); a.states.len()] };

    let lookup = |zg: &mut ZoneGraph, store: &mut Store, state: usize, zone: Zone| -> (usize, bool, bool) {
        if let Some(&i) = store.exact.get(&(state, zone.clone())) {
            return (i, false, false);
        }
        if opts.covering == Covering::Inclusion {
            if let Some(&i) = store.by_state[state].iter().find(|&&i| zg.nodes[i].zone.includes(&zone)) {
                return (i, false, true);
            }
        }
        let i = zg.nodes.len();
        store.exact.insert((state, zone.clone()), i);
        store.by_state[state].push(i);
        zg.nodes.push(ZgNode { state, zone });
        zg.edges.push(Vec::new());
        (i, true, false)
    };

    let mut frontier = Vec::new();
    for (state, zone, init) in roots {
        let (i, fresh, _) = lookup(&mut zg, &mut store, state, zone);
        zg.roots.push((i, init));
        if fresh {
            frontier.push(i);
        }
    }
    let pool = (opts.threads > 0).then(|| rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build().ok()).flatten();
    let expand = |u: usize, nodes: &[ZgNode]| -> Vec<(usize, Zone)> {
        let n = &nodes[u];
        out[n.state].iter().filter_map(|&t| successor(a, &n.zone, t).map(|z| (t, z))).collect()
    };
    while !frontier.is_empty() {
        let succs: Vec<Vec<(usize, Zone)>> = {
            let nodes = &zg.nodes;
            let run = || frontier.par_iter().map(|&u| expand(u, nodes)).collect();
            if frontier.len() < 16 {
                frontier.iter().map(|&u| expand(u, nodes)).collect()
            } else if let Some(p) = &pool {
                p.install(run)
            } else {
                run()
            }
        };
        let mut next = Vec::new();
        for (&u, ss) in frontier.iter().zip(succs) {
            for (t, z) in ss {
                if zg.nodes.len() >= opts.budget && !store.exact.contains_key(&(a.transitions[t].tgt, z.clone())) {
                    zg.complete = false;
                    continue;
                }
                let (v, fresh, covered) = lookup(&mut zg, &mut store, a.transitions[t].tgt, z);
                zg.edges[u].push(ZgEdge { transition: t, target: v, covered });
                if fresh {
                    next.push(v);
                }
            }
        }
        frontier = next;
        if !frontier.is_empty() && stop(&zg) {
            zg.complete = false;
            break;
        }
    }
    zg
}

/// Transitions of `a` enabled on a letter at a state.
pub(crate) fn enabled<'a>(a: &'a Gta, out: &'a [Vec<usize>], state: usize, letter: &'a [bool]) -> impl Iterator<Item = usize> + 'a {
    out[state].iter().copied().filter(move |&t| label_matches(&a.transitions[t].label, letter))
}
