//! Transducers for `p U_I q` over the input channels `(p, q)`.
//!
//! Automaton A tracks, with future clocks, the earliest witness (`x`, the
//! next `q`-position) and the last witness (`y`, the next position where
//! `q ∧ ¬(p ∧ X(p U q))` holds). That decides every interval whose lower
//! end is a closed 0 or whose upper end is infinite. For the remaining
//! intervals, automaton B keeps up to `N` pairs of predictors for special
//! points, consecutive witnesses straddling the upper bound.

use std::collections::{BTreeMap, VecDeque};

use super::cond::Cond;
use super::{above_interval, below_interval, in_interval, TranslateError};
use crate::automaton::{Atomic, ClockKind, Gta, Gtt, Program, Step};
use crate::ext::ExtReal;
use crate::formula::Interval;
use crate::zone::Zone;

const Q: usize = 0;
const W: usize = 1;
const N: usize = 2;
const A_NAMES: [&str; 3] = ["q", "!q&pUq", "!(pUq)"];

/// Whether automaton A alone decides `p U_I q`.
pub fn is_one_sided(iv: Interval) -> bool {
    iv.is_downward_closed() || iv.is_unbounded()
}

/// Number of special-point slots for a two-sided interval: `1 + ⌈b/(c−b)⌉`.
pub fn slot_count(iv: Interval) -> Option<usize> {
    if is_one_sided(iv) {
        return None;
    }
    let b = iv.lower;
    let c = iv.upper.expect("bounded");
    Some(1 + b.div_ceil(c - b) as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// Not satisfied here: output 0.
    Dead,
    /// The current position is the only witness.
    Alone,
    /// Source `q` with a continuing chain.
    QLive,
    /// Source `¬q ∧ p U q`.
    WLive,
}

struct AMove {
    src: usize,
    p: bool,
    q: bool,
    tgt: usize,
    alpha: bool,
    kind: Kind,
}

fn a_moves() -> Vec<AMove> {
    let mut v = Vec::new();
    for p in [true, false] {
        for tgt in [Q, W, N] {
            let alpha = !p || tgt == N;
            v.push(AMove { src: Q, p, q: true, tgt, alpha, kind: if alpha { Kind::Alone } else { Kind::QLive } });
        }
    }
    for tgt in [Q, W] {
        v.push(AMove { src: W, p: true, q: false, tgt, alpha: false, kind: Kind::WLive });
    }
    v.push(AMove { src: N, p: true, q: false, tgt: N, alpha: false, kind: Kind::Dead });
    for tgt in [Q, W, N] {
        v.push(AMove { src: N, p: false, q: false, tgt, alpha: false, kind: Kind::Dead });
    }
    v
}

struct Clocks {
    x: usize,
    y: usize,
    xs: Vec<usize>,
    ys: Vec<usize>,
}

fn declare_clocks(gta: &mut Gta, slots: usize) -> Clocks {
    let x = gta.add_clock("x", ClockKind::Future);
    let y = gta.add_clock("y", ClockKind::Future);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..=slots {
        xs.push(gta.add_clock(format!("x{i}"), ClockKind::Future));
        ys.push(gta.add_clock(format!("y{i}"), ClockKind::Future));
    }
    Clocks { x, y, xs, ys }
}

fn a_program(c: &Clocks, m: &AMove) -> Program {
    let zero = ExtReal::ZERO;
    if !m.q {
        Vec::new()
    } else if m.alpha {
        let mut g = Atomic::eq(c.x, zero);
        g.extend(Atomic::eq(c.y, zero));
        vec![Step::Guard(g), Step::Change(vec![c.x, c.y])]
    } else {
        vec![Step::Guard(Atomic::eq(c.x, zero)), Step::Change(vec![c.x])]
    }
}

/// A's output after its own program has run.
fn a_output(iv: Interval, c: &Clocks, kind: Kind) -> Cond {
    let zero_in = Cond::Const(iv.contains_zero());
    let later = in_interval(iv, c.x).or(in_interval(iv, c.y));
    match kind {
        Kind::Dead => Cond::ff(),
        Kind::Alone => zero_in,
        Kind::QLive => zero_in.or(later),
        Kind::WLive => later,
    }
}

struct Builder {
    gta: Gta,
    outputs: Vec<Vec<bool>>,
    kinds: Vec<ClockKind>,
    universe: Zone,
}

impl Builder {
    fn new(slots: usize) -> (Builder, Clocks) {
        let mut gta = Gta::new(vec!["p".into(), "q".into()]);
        let clocks = declare_clocks(&mut gta, slots);
        let kinds = gta.kinds();
        let universe = Zone::universe(&kinds);
        (Builder { gta, outputs: Vec::new(), kinds, universe }, clocks)
    }

    /// Adds one transition per cube of `guard ∧ out` (output 1) and of
    /// `guard ∧ ¬out` (output 0), each ending with the cube as a guard.
    fn emit(&mut self, src: usize, m: &AMove, prog: &Program, guard: Cond, out: Cond, tgt: usize) {
        if self.universe.clone().apply_program_symbolic(prog).is_none() {
            return;
        }
        for (cond, bit) in [(guard.clone().and(out.clone()), true), (guard.and(out.not()), false)] {
            for cube in cond.cubes(&self.kinds) {
                let mut p = prog.clone();
                if !cube.is_empty() {
                    p.push(Step::Guard(cube));
                }
                if self.universe.clone().apply_program_symbolic(&p).is_none() {
                    continue;
                }
                self.gta.add_transition(src, vec![(0, m.p), (1, m.q)], p, tgt);
                self.outputs.push(vec![bit]);
            }
        }
    }

    fn finish(self) -> Gtt {
        Gtt { gta: self.gta, out_channels: vec!["o".into()], outputs: self.outputs }
    }
}

/// Automaton A on its own; only defined for one-sided intervals.
pub fn until_automaton_a(iv: Interval) -> Result<Gtt, TranslateError> {
    if !is_one_sided(iv) {
        return Err(TranslateError::TwoSided(iv.to_string()));
    }
    let (mut b, c) = Builder::new(0);
    for (i, name) in A_NAMES.iter().enumerate() {
        b.gta.add_state(*name, i != W);
        b.gta.add_initial(i, Vec::new());
    }
    for m in a_moves() {
        let prog = a_program(&c, &m);
        b.emit(m.src, &m, &prog, Cond::tt(), a_output(iv, &c, m.kind), m.tgt);
    }
    Ok(b.finish())
}

/// State of automaton B: `k` open slots; `m = 2` once the earliest slot's
/// first point has been passed.
type BState = (usize, u8);

struct Verify {
    prog: Program,
    tgt: BState,
}

fn minus_inf_release(clock: usize) -> Vec<Step> {
    vec![Step::Change(vec![clock]), Step::Guard(vec![Atomic::minus_infinity(clock)])]
}

/// Cyclic renaming moving every slot down by one.
fn shift(c: &Clocks, n_clocks: usize) -> Step {
    let mut sigma: Vec<usize> = (0..=n_clocks).collect();
    let n = c.xs.len();
    for i in 0..n {
        sigma[c.xs[i]] = c.xs[(i + 1) % n];
        sigma[c.ys[i]] = c.ys[(i + 1) % n];
    }
    Step::Rename(sigma)
}

/// B's bookkeeping on reading a letter: discharging slot 1 when its
/// predicted positions are reached.
fn verify(c: &Clocks, n_clocks: usize, (k, m): BState, q: bool) -> Vec<Verify> {
    let zero = ExtReal::ZERO;
    if k == 0 {
        return vec![Verify { prog: Vec::new(), tgt: (0, 1) }];
    }
    let (x1, y1) = (c.xs[0], c.ys[0]);
    let blue = |mut prog: Program| {
        prog.push(Step::Guard(Atomic::eq(x1, zero)));
        prog.extend(minus_inf_release(x1));
        prog
    };
    let black = |mut prog: Program| {
        prog.extend(minus_inf_release(y1));
        prog.push(shift(c, n_clocks));
        prog
    };
    match (q, m) {
        (true, 1) => vec![Verify { prog: Vec::new(), tgt: (k, 1) }, Verify { prog: blue(Vec::new()), tgt: (k, 2) }],
        (true, _) => {
            let base = black(vec![Step::Guard(Atomic::eq(y1, zero))]);
            let mut v = vec![Verify { prog: base.clone(), tgt: (k - 1, 1) }];
            if k >= 2 {
                v.push(Verify { prog: blue(base), tgt: (k - 1, 2) });
            }
            v
        }
        (false, 1) => vec![Verify { prog: Vec::new(), tgt: (k, 1) }],
        (false, _) => {
            // The next q shares the predicted timestamp of slot 1's second
            // point, so the slot can be discharged early.
            let mut g = Atomic::eq(y1, zero);
            g.extend(Atomic::eq(c.x, zero));
            vec![
                Verify { prog: vec![Step::Guard(vec![Atomic::upper(y1, true, zero)])], tgt: (k, 2) },
                Verify { prog: black(vec![Step::Guard(g)]), tgt: (k - 1, 1) },
            ]
        }
    }
}

struct Decide {
    pre: Program,
    guard: Cond,
    out: Cond,
    tgt: BState,
}

/// Output selection at a position, after A's program and B's bookkeeping.
fn decide(iv: Interval, c: &Clocks, kind: Kind, (k, m): BState) -> Vec<Decide> {
    let a_out = a_output(iv, c, kind);
    if matches!(kind, Kind::Dead | Kind::Alone) {
        return vec![Decide { pre: Vec::new(), guard: Cond::tt(), out: a_out, tgt: (k, m) }];
    }
    let difficult = below_interval(iv, c.x).and(above_interval(iv, c.y));
    let mut v = vec![Decide { pre: Vec::new(), guard: difficult.clone().not(), out: a_out, tgt: (k, m) }];
    let mut open_guard = difficult.clone();
    if k >= 1 {
        let (xk, yk) = (c.xs[k - 1], c.ys[k - 1]);
        v.push(Decide {
            pre: Vec::new(),
            guard: difficult.clone().and(below_interval(iv, yk).not()),
            out: in_interval(iv, xk).or(in_interval(iv, yk)),
            tgt: (k, m),
        });
        open_guard = open_guard.and(below_interval(iv, yk));
    }
    if k < c.xs.len() {
        let (xn, yn) = (c.xs[k], c.ys[k]);
        let pre = vec![
            Step::Guard(vec![Atomic::minus_infinity(xn), Atomic::minus_infinity(yn)]),
            Step::Change(vec![xn, yn]),
        ];
        let guard = open_guard.and(above_interval(iv, xn).not()).and(above_interval(iv, yn));
        v.push(Decide { pre, guard, out: in_interval(iv, xn), tgt: (k + 1, m) });
    }
    v
}

/// Synchronized product of A and B for a two-sided interval.
fn until_product(iv: Interval, slots: usize) -> Gtt {
    let (mut b, c) = Builder::new(slots);
    let n_clocks = b.gta.num_clocks();
    let moves = a_moves();
    let mut index: BTreeMap<(usize, BState), usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut state = |b: &mut Builder, queue: &mut VecDeque<(usize, BState)>, key: (usize, BState)| {
        *index.entry(key).or_insert_with(|| {
            queue.push_back(key);
            let name = format!("{}/({},{})", A_NAMES[key.0], key.1 .0, key.1 .1);
            b.gta.add_state(name, key.0 != W)
        })
    };
    let init_guard: Vec<Atomic> = c.xs.iter().chain(&c.ys).map(|&z| Atomic::minus_infinity(z)).collect();
    for a in [Q, W, N] {
        let s = state(&mut b, &mut queue, (a, (0, 1)));
        b.gta.add_initial(s, init_guard.clone());
    }
    while let Some((a, bs)) = queue.pop_front() {
        let src = state(&mut b, &mut queue, (a, bs));
        for mv in moves.iter().filter(|mv| mv.src == a) {
            let a_prog = a_program(&c, mv);
            for ver in verify(&c, n_clocks, bs, mv.q) {
                for d in decide(iv, &c, mv.kind, ver.tgt) {
                    let (k2, _) = d.tgt;
                    // Open slots lie inside the current chain of witnesses.
                    if k2 >= 1 && (mv.tgt == N || mv.alpha) {
                        continue;
                    }
                    let mut prog = a_prog.clone();
                    prog.extend(ver.prog.iter().cloned());
                    prog.extend(d.pre);
                    let tgt = state(&mut b, &mut queue, (mv.tgt, d.tgt));
                    b.emit(src, mv, &prog, d.guard, d.out, tgt);
                }
            }
        }
    }
    b.finish()
}

/// `p U_I q` over channels `(p, q)`: A alone when it suffices, otherwise
/// the product of A with B.
pub fn until_transducer(iv: Interval) -> Gtt {
    match slot_count(iv) {
        None => until_automaton_a(iv).expect("one-sided"),
        Some(n) => until_product(iv, n),
    }
}

/// Automaton B for a two-sided interval, presented as its own transducer
/// over `(p, q, live, alpha)`: `live` marks positions where A's chain
/// continues (a difficult point may occur), `alpha` marks positions where
/// the chain ends. A's clocks `x`, `y` are declared but never changed.
pub fn until_automaton_b(iv: Interval) -> Result<Gtt, TranslateError> {
    let slots = slot_count(iv).ok_or_else(|| TranslateError::NotTwoSided(iv.to_string()))?;
    let mut gta = Gta::new(vec!["p".into(), "q".into(), "live".into(), "alpha".into()]);
    let c = declare_clocks(&mut gta, slots);
    let n_clocks = gta.num_clocks();
    let kinds = gta.kinds();
    let mut outputs = Vec::new();
    let mut index = BTreeMap::new();
    let mut order = Vec::new();
    for k in 0..=slots {
        for m in [1u8, 2] {
            if k == 0 && m == 2 {
                continue;
            }
            index.insert((k, m), gta.add_state(format!("({k},{m})"), true));
            order.push((k, m));
        }
    }
    let init_guard: Vec<Atomic> = c.xs.iter().chain(&c.ys).map(|&z| Atomic::minus_infinity(z)).collect();
    gta.add_initial(index[&(0, 1)], init_guard);
    for bs in order {
        for q in [true, false] {
            for (live, alpha) in [(true, false), (false, true), (false, false)] {
                if alpha && !q {
                    continue;
                }
                let kind = match (live, q) {
                    (true, true) => Kind::QLive,
                    (true, false) => Kind::WLive,
                    (false, _) => Kind::Dead,
                };
                for ver in verify(&c, n_clocks, bs, q) {
                    for d in decide(iv, &c, kind, ver.tgt) {
                        if d.tgt.0 >= 1 && !live {
                            continue;
                        }
                        let mut prog = ver.prog.clone();
                        prog.extend(d.pre);
                        for (cond, bit) in [(d.guard.clone().and(d.out.clone()), true), (d.guard.clone().and(d.out.not()), false)] {
                            for cube in cond.cubes(&kinds) {
                                let mut p = prog.clone();
                                if !cube.is_empty() {
                                    p.push(Step::Guard(cube));
                                }
                                gta.add_transition(
                                    index[&bs],
                                    vec![(1, q), (2, live), (3, alpha)],
                                    p,
                                    index[&d.tgt],
                                );
                                outputs.push(vec![bit]);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Gtt { gta, out_channels: vec!["o".into()], outputs })
}

/// Distinct B states occurring in the synchronized product.
pub fn b_states_used(t: &Gtt) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for s in &t.gta.states {
        if let Some((_, b)) = s.split_once('/') {
            seen.insert(b.to_string());
        }
    }
    seen.len()
}
