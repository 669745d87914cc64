//! Hand-built automata shared by the explorer and acceptance suites.

use gta_core::automaton::{Atomic, ClockKind, Gta, Step};
use gta_core::ExtReal;

/// One future clock `x`, released once to a value in `[-3, 0]` on the way
/// into a Büchi loop that checks `x = 0`; the loop also releases `x` when
/// `release_on_loop` holds.
pub fn pinned_loop(release_on_loop: bool) -> Gta {
    let mut a = Gta::new(vec![]);
    let x = a.add_clock("x", ClockKind::Future);
    let q0 = a.add_state("q0", false);
    let q1 = a.add_state("q1", true);
    a.add_initial(q0, Vec::new());
    let enter = vec![Step::Change(vec![x]), Step::Guard(vec![Atomic::lower(x, false, ExtReal::int(-3))])];
    a.add_transition(q0, Vec::new(), enter, q1);
    let mut prog = vec![Step::Guard(Atomic::eq(x, ExtReal::ZERO))];
    if release_on_loop {
        prog.push(Step::Change(vec![x]));
    }
    a.add_transition(q1, Vec::new(), prog, q1);
    a
}

/// Future clock `x` and history clock `y`: the first transition releases
/// `x` and resets `y`; `b` loops on `l1` with one time unit between
/// consecutive `b`s; `c` leads to `l2` right after a `b` once `x` reaches 0, so from
/// `x = -n` the only way to `l2` is `b^n c`.
pub fn counting_loop() -> Gta {
    let mut a = Gta::new(vec!["b".into(), "c".into()]);
    let x = a.add_clock("x", ClockKind::Future);
    let y = a.add_clock("y", ClockKind::History);
    let l0 = a.add_state("l0", false);
    let l1 = a.add_state("l1", false);
    let l2 = a.add_state("l2", true);
    a.add_initial(l0, Vec::new());
    a.add_transition(l0, vec![(0, false), (1, false)], vec![Step::Change(vec![x, y])], l1);
    let b = vec![Step::Guard(Atomic::eq(y, ExtReal::int(1))), Step::Change(vec![y])];
    a.add_transition(l1, vec![(0, true), (1, false)], b, l1);
    let c = [Atomic::eq(x, ExtReal::ZERO), Atomic::eq(y, ExtReal::ZERO)].concat();
    a.add_transition(l1, vec![(0, false), (1, true)], vec![Step::Guard(c)], l2);
    a.add_transition(l2, vec![(0, false), (1, false)], vec![Step::Guard(Atomic::eq(x, ExtReal::ZERO)), Step::Change(vec![x])], l2);
    a
}

/// Reads `p` at every integer time from 0 on.
pub fn ticking_system() -> Gta {
    let mut a = Gta::new(vec!["p".into()]);
    let x = a.add_clock("x", ClockKind::Future);
    let q = a.add_state("q", true);
    a.add_initial(q, Atomic::eq(x, ExtReal::ZERO));
    let prog = vec![Step::Guard(Atomic::eq(x, ExtReal::ZERO)), Step::Change(vec![x]), Step::Guard(Atomic::eq(x, ExtReal::int(-1)))];
    a.add_transition(q, vec![(0, true)], prog, q);
    a
}
