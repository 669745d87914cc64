//! Lasso witnesses: extraction from an accepting component and concrete
//! replay.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use serde_json::json;

use super::{released_by, AcceptingScc, ZoneGraph};
use crate::automaton::{run_concrete, Atomic, ClockKind, Gta, ReleaseChoices, Step, StepChoice, Valuation, ZERO};
use crate::ext::{fmt_rat, ExtReal, Rat};
use crate::formula::{Event, Lasso};
use crate::zone::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub transition: usize,
    /// Zone-graph node reached.
    pub node: usize,
    pub state: String,
    pub zone: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Evidence {
    /// Released at this index of the cycle.
    ReleasedAt(usize),
    /// Never released on the cycle; `-inf` is feasible at the cycle start.
    MinusInfinity,
}

#[derive(Clone, Debug, Serialize)]
pub struct LassoWitness {
    /// The automaton the steps refer to (after renaming elimination and
    /// the non-Zeno transformation, if applied).
    #[serde(skip)]
    pub automaton: Gta,
    pub initial: usize,
    pub start_state: String,
    pub start_zone: String,
    pub prefix: Vec<WitnessStep>,
    pub cycle: Vec<WitnessStep>,
    pub accepting_index: usize,
    pub evidence: BTreeMap<String, Evidence>,
}

fn bfs_within(zg: &ZoneGraph, members: &BTreeSet<usize>, from: usize, to: usize) -> Vec<(usize, usize)> {
    if from == to {
        return Vec::new();
    }
    let mut parent: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(u) = queue.pop_front() {
        for e in &zg.edges[u] {
            if members.contains(&e.target) && seen.insert(e.target) {
                parent.insert(e.target, (u, e.transition));
                if e.target == to {
                    queue.clear();
                    break;
                }
                queue.push_back(e.target);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let (u, t) = parent[&v];
        path.push((t, v));
        v = u;
    }
    path.reverse();
    path
}

pub(crate) fn extract(a: Gta, zg: &ZoneGraph, scc: &AcceptingScc) -> LassoWitness {
    let names: Vec<String> = a.clocks.iter().map(|c| c.name.clone()).collect();
    let members: BTreeSet<usize> = scc.members.iter().copied().collect();
    let n = scc.anchor;
    let (root, prefix_path) = zg.path_from_root(n);
    let initial = zg.roots.iter().find(|r| r.0 == root).and_then(|r| r.1).unwrap_or(0);

    let buchi = if a.buchi[zg.nodes[n].state] {
        n
    } else {
        *members.iter().find(|&&u| a.buchi[zg.nodes[u].state]).expect("accepting component")
    };
    let mut needed: Vec<(usize, usize, usize)> = Vec::new();
    let mut covered = BTreeSet::new();
    for x in a.future_clocks() {
        if scc.unreleased.contains(&x) || covered.contains(&x) {
            continue;
        }
        'search: for &u in &members {
            for e in &zg.edges[u] {
                if members.contains(&e.target) && released_by(&a, e.transition).any(|c| c == x) {
                    covered.extend(released_by(&a, e.transition));
                    needed.push((u, e.transition, e.target));
                    break 'search;
                }
            }
        }
    }
    let mut cycle: Vec<(usize, usize)> = Vec::new();
    let mut cur = n;
    if buchi != n {
        cycle.extend(bfs_within(zg, &members, cur, buchi));
        cur = buchi;
    }
    for (u, t, v) in needed {
        cycle.extend(bfs_within(zg, &members, cur, u));
        cycle.push((t, v));
        cur = v;
    }
    cycle.extend(bfs_within(zg, &members, cur, n));
    if cycle.is_empty() {
        let e = zg.edges[n].iter().find(|e| members.contains(&e.target)).expect("component has an edge");
        cycle.push((e.transition, e.target));
        cycle.extend(bfs_within(zg, &members, e.target, n));
    }
    let step = |(t, v): (usize, usize)| WitnessStep {
        transition: t,
        node: v,
        state: a.states[zg.nodes[v].state].clone(),
        zone: zg.nodes[v].zone.constraint_string(&names),
    };
    let accepting_index = cycle.iter().position(|&(_, v)| a.buchi[zg.nodes[v].state]).expect("cycle visits a Büchi node");
    let mut evidence = BTreeMap::new();
    for x in a.future_clocks() {
        let ev = match cycle.iter().position(|&(t, _)| released_by(&a, t).any(|c| c == x)) {
            Some(i) => Evidence::ReleasedAt(i),
            None => Evidence::MinusInfinity,
        };
        evidence.insert(a.clock_name(x).to_string(), ev);
    }
    LassoWitness {
        initial,
        start_state: a.states[zg.nodes[root].state].clone(),
        start_zone: zg.nodes[root].zone.constraint_string(&names),
        prefix: prefix_path.into_iter().map(step).collect(),
        cycle: cycle.into_iter().map(step).collect(),
        accepting_index,
        evidence,
        automaton: a,
    }
}

/// A concrete run replaying a witness over its prefix and some cycle
/// unrollings.
#[derive(Clone, Debug)]
pub struct ConcreteRun {
    pub word: Vec<(Vec<bool>, Rat)>,
    pub choices: Vec<StepChoice>,
    pub v0: Valuation,
    pub initial_state: usize,
    /// Present when consecutive unrollings are exact time shifts of each other.
    pub lasso: Option<Lasso>,
    pub unrollings: usize,
}

impl ConcreteRun {
    pub fn to_json(&self, a: &Gta) -> serde_json::Value {
        let letters: Vec<_> = self
            .word
            .iter()
            .map(|(bits, t)| {
                let names: Vec<&str> = bits.iter().zip(&a.channels).filter(|(b, _)| **b).map(|(_, c)| c.as_str()).collect();
                json!({"letter": names, "t": fmt_rat(t)})
            })
            .collect();
        let fmt_v = |v: &[ExtReal]| -> serde_json::Value {
            (1..v.len()).map(|i| (a.clock_name(i).to_string(), json!(v[i].to_string()))).collect::<serde_json::Map<_, _>>().into()
        };
        json!({
            "word": letters,
            "initial_valuation": fmt_v(&self.v0),
            "transitions": self.choices.iter().map(|c| c.transition).collect::<Vec<_>>(),
            "releases": self.choices.iter().map(|c| {
                c.releases.by_step.iter().map(|((s, x), v)| json!({"step": s, "clock": a.clock_name(*x), "value": v.to_string()})).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "lasso": self.lasso.as_ref().map(|l| serde_json::to_value(l).unwrap_or_default()),
            "unrollings": self.unrollings,
        })
    }
}

/// Difference constraints `v_i - v_j ◁ c` over rationals; variable 0 is
/// the constant 0.
struct Dcs {
    n: usize,
    m: Vec<Weight>,
}

impl Dcs {
    fn new(n: usize) -> Dcs {
        let mut m = vec![Weight::INF; n * n];
        for i in 0..n {
            m[i * n + i] = Weight::LE_ZERO;
        }
        Dcs { n, m }
    }

    fn get(&self, i: usize, j: usize) -> Weight {
        self.m[i * self.n + j]
    }

    fn add(&mut self, i: usize, j: usize, w: Weight) {
        let k = i * self.n + j;
        if w < self.m[k] {
            self.m[k] = w;
        }
    }

    fn close(&mut self) -> bool {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                let ik = self.m[i * n + k];
                if ik == Weight::INF {
                    continue;
                }
                for j in 0..n {
                    let s = ik.add(self.m[k * n + j]);
                    if s < self.m[i * n + j] {
                        self.m[i * n + j] = s;
                    }
                }
            }
        }
        (0..n).all(|i| self.get(i, i) >= Weight::LE_ZERO)
    }

    /// Adds `v_i - v_j ◁ w` to a closed system, keeping it closed.
    fn add_closed(&mut self, i: usize, j: usize, w: Weight) -> bool {
        let n = self.n;
        if w >= self.get(i, j) {
            return true;
        }
        let col: Vec<Weight> = (0..n).map(|a| self.get(a, i)).collect();
        let row: Vec<Weight> = (0..n).map(|b| self.get(j, b)).collect();
        for a in 0..n {
            if col[a] == Weight::INF {
                continue;
            }
            let aw = col[a].add(w);
            for b in 0..n {
                let s = aw.add(row[b]);
                if s < self.m[a * n + b] {
                    self.m[a * n + b] = s;
                }
            }
        }
        (0..n).all(|i| self.get(i, i) >= Weight::LE_ZERO)
    }

    /// Feasible range of `v_i`: lower bound (value, strict), upper bound.
    fn range(&self, i: usize) -> (Option<(Rat, bool)>, Option<(Rat, bool)>) {
        let lo = self.get(0, i);
        let hi = self.get(i, 0);
        (lo.c.finite().map(|c| (-c, lo.strict)), hi.c.finite().map(|c| (c, hi.strict)))
    }

    fn admits(&self, i: usize, v: Rat) -> bool {
        let (lo, hi) = self.range(i);
        lo.is_none_or(|(l, s)| if s { v > l } else { v >= l }) && hi.is_none_or(|(h, s)| if s { v < h } else { v <= h })
    }

    fn pick(&self, i: usize) -> Rat {
        let one = Rat::from_integer(1);
        match self.range(i) {
            (Some((l, _)), Some((h, _))) if l == h => l,
            (Some((l, _)), Some((h, _))) => (l + h) / Rat::from_integer(2),
            (Some((l, s)), None) => {
                if s {
                    l + one
                } else {
                    l
                }
            }
            (None, Some((h, s))) => {
                if s {
                    h - one
                } else {
                    h
                }
            }
            (None, None) => Rat::from_integer(0),
        }
    }

    fn fix(&mut self, i: usize, v: Rat) -> bool {
        self.add_closed(i, 0, Weight::le(ExtReal::Fin(v))) && self.add_closed(0, i, Weight::le(ExtReal::Fin(-v)))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cur {
    NegInf,
    /// Future: value is `t - var`; history: value is `t - var`.
    Var(usize),
}

enum Op<'a> {
    Init(&'a [Atomic]),
    At(usize),
    Guard(&'a [Atomic]),
    Change(usize, usize, &'a [usize]),
}

/// Replays the witness over its prefix and `k` cycle unrollings with
/// concrete times and release values obtained from the difference
/// constraints of the path.
pub fn validate_witness(w: &LassoWitness, k: usize) -> Result<ConcreteRun, String> {
    let a = &w.automaton;
    let k = k.max(1);
    let init = a.initial.get(w.initial).ok_or("witness refers to a missing initial entry")?;
    let mut path: Vec<usize> = w.prefix.iter().map(|s| s.transition).collect();
    for _ in 0..k {
        path.extend(w.cycle.iter().map(|s| s.transition));
    }
    let (m, l) = (w.prefix.len(), w.cycle.len());
    let len = path.len();
    let nclk = a.num_clocks();

    let mut ops = vec![Op::Init(&init.guard)];
    for (j, &t) in path.iter().enumerate() {
        ops.push(Op::At(j));
        for (si, s) in a.transitions[t].prog.iter().enumerate() {
            match s {
                Step::Guard(g) => ops.push(Op::Guard(g)),
                Step::Change(r) => ops.push(Op::Change(j, si, r)),
                Step::Rename(_) => return Err("witness automaton still contains renamings".into()),
            }
        }
    }
    // A future-clock value becomes -inf when every later test before its
    // next release accepts -inf.
    let minus_inf_ok = |from: usize, x: usize| -> bool {
        for op in &ops[from..] {
            match op {
                Op::Change(_, _, r) if r.contains(&x) => return true,
                Op::Guard(g) | Op::Init(g) => {
                    for at in g.iter() {
                        let w = Weight::new(at.strict, at.c);
                        if at.x == x && at.y != x && !w.admits(ExtReal::NegInf) {
                            return false;
                        }
                        if at.y == x && at.x != x && !w.admits(ExtReal::PosInf) {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    };

    // Variables: 0 origin, 1..=len step times, then release and reset values.
    let tvar = |j: usize| 1 + j;
    let mut nvars = 1 + len;
    let mut cur = vec![Cur::NegInf; nclk + 1];
    let mut init_choice = vec![None; nclk + 1];
    for x in 1..=nclk {
        if a.kind(x) == ClockKind::History || !minus_inf_ok(0, x) {
            cur[x] = Cur::Var(nvars);
            init_choice[x] = Some(nvars);
            nvars += 1;
        }
    }
    let mut release_vars: Vec<(usize, usize, usize, Option<usize>)> = Vec::new();
    let mut cons: Vec<(usize, usize, Weight)> = Vec::new();
    for x in 1..=nclk {
        if let Cur::Var(v) = cur[x] {
            match a.kind(x) {
                ClockKind::Future => cons.push((0, v, Weight::LE_ZERO)),
                ClockKind::History => cons.push((v, 0, Weight::LE_ZERO)),
            }
        }
    }
    let mut now = 0usize;
    let mut statics_ok = true;
    for j in 0..len {
        cons.push((if j == 0 { 0 } else { tvar(j - 1) }, tvar(j), Weight::LE_ZERO));
    }
    for (oi, op) in ops.iter().enumerate() {
        match op {
            Op::At(j) => {
                now = tvar(*j);
                for x in 1..=nclk {
                    if let (ClockKind::Future, Cur::Var(v)) = (a.kind(x), cur[x]) {
                        cons.push((now, v, Weight::LE_ZERO));
                    }
                }
            }
            Op::Init(g) | Op::Guard(g) => {
                for at in g.iter() {
                    let term = |c: usize| -> Option<(usize, usize)> {
                        if c == ZERO {
                            Some((0, 0))
                        } else {
                            match cur[c] {
                                Cur::NegInf => None,
                                Cur::Var(v) => Some((now, v)),
                            }
                        }
                    };
                    let w8 = Weight::new(at.strict, at.c);
                    match (term(at.x), term(at.y)) {
                        (Some((px, nx)), Some((py, ny))) => {
                            let mut plus = vec![px, ny];
                            let mut minus = vec![nx, py];
                            plus.retain(|&v| v != 0);
                            minus.retain(|&v| v != 0);
                            let mut i = 0;
                            while i < plus.len() {
                                if let Some(p) = minus.iter().position(|&v| v == plus[i]) {
                                    minus.remove(p);
                                    plus.remove(i);
                                } else {
                                    i += 1;
                                }
                            }
                            if plus.len() > 1 || minus.len() > 1 {
                                return Err("constraint outside difference logic".into());
                            }
                            let p = plus.first().copied().unwrap_or(0);
                            let q = minus.first().copied().unwrap_or(0);
                            if p == q {
                                statics_ok &= w8.admits(ExtReal::ZERO);
                            } else {
                                cons.push((p, q, w8));
                            }
                        }
                        (None, Some(_)) => statics_ok &= w8.admits(ExtReal::NegInf),
                        (Some(_), None) | (None, None) => statics_ok &= w8.admits(ExtReal::PosInf),
                    }
                    if !statics_ok {
                        return Err(format!("a guard cannot hold on this path (operation {oi})"));
                    }
                }
            }
            Op::Change(j, si, r) => {
                for &x in r.iter() {
                    match a.kind(x) {
                        ClockKind::History => cur[x] = Cur::Var(tvar(*j)),
                        ClockKind::Future => {
                            if minus_inf_ok(oi + 1, x) {
                                cur[x] = Cur::NegInf;
                                release_vars.push((*j, *si, x, None));
                            } else {
                                let v = nvars;
                                nvars += 1;
                                cur[x] = Cur::Var(v);
                                cons.push((tvar(*j), v, Weight::LE_ZERO));
                                release_vars.push((*j, *si, x, Some(v)));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut dcs = Dcs::new(nvars);
    for (i, j, w8) in cons {
        dcs.add(i, j, w8);
    }
    if !dcs.close() {
        return Err("the path's timing constraints are infeasible".into());
    }
    let mut times = vec![Rat::from_integer(0); len];
    let mut periodic = k >= 2 && l > 0;
    for j in 0..len {
        let v = tvar(j);
        let mut val = dcs.pick(v);
        if j >= m + l && l > 0 {
            let want = times[j - l] + (times[m + l] - times[m]);
            if j > m + l && dcs.admits(v, want) {
                val = want;
            } else if j > m + l {
                periodic = false;
            }
        }
        if !dcs.fix(v, val) {
            return Err("failed to fix a step time".into());
        }
        times[j] = val;
    }
    let mut values = vec![Rat::from_integer(0); nvars];
    for (v, t) in times.iter().enumerate() {
        values[tvar(v)] = *t;
    }
    for v in (1 + len)..nvars {
        let val = dcs.pick(v);
        if !dcs.fix(v, val) {
            return Err("failed to fix a release value".into());
        }
        values[v] = val;
    }

    let mut v0 = vec![ExtReal::ZERO; nclk + 1];
    for x in 1..=nclk {
        v0[x] = match init_choice[x] {
            None => ExtReal::NegInf,
            Some(v) => ExtReal::Fin(-values[v]),
        };
    }
    let mut choices: Vec<StepChoice> =
        path.iter().map(|&t| StepChoice { transition: t, releases: ReleaseChoices::default() }).collect();
    for (j, si, x, var) in release_vars {
        let val = match var {
            None => ExtReal::NegInf,
            Some(v) => ExtReal::Fin(times[j] - values[v]),
        };
        choices[j].releases.by_step.insert((si, x), val);
    }
    let word: Vec<(Vec<bool>, Rat)> = path
        .iter()
        .zip(&times)
        .map(|(&t, &time)| {
            let mut bits = vec![false; a.channels.len()];
            for &(ch, b) in &a.transitions[t].label {
                bits[ch] = b;
            }
            (bits, time)
        })
        .collect();
    let trace = run_concrete(a, &word, init.state, &v0, &choices).map_err(|e| format!("replay failed: {e}"))?;
    for r in 0..k {
        let visits = (0..l).any(|i| a.buchi[trace.configs[m + r * l + i + 1].0]);
        if !visits {
            return Err(format!("unrolling {r} visits no Büchi state"));
        }
    }
    let lasso = if periodic && times[m + l] > times[m] {
        let ev = |j: usize| {
            let names: Vec<&str> =
                word[j].0.iter().zip(&a.channels).filter(|(b, _)| **b).map(|(_, c)| c.as_str()).collect();
            Event::new(&names, times[j])
        };
        Some(Lasso { prefix: (0..m).map(ev).collect(), cycle: (m..m + l).map(ev).collect(), period: times[m + l] - times[m] })
    } else {
        None
    };
    Ok(ConcreteRun { word, choices, v0, initial_state: init.state, lasso, unrollings: k })
}
