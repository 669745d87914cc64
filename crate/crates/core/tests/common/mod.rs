//! Random formulae, words and zones shared by the integration tests.
#![allow(dead_code)]

use gta_core::ext::Rat;
use gta_core::formula::{Event, Formula, Interval, TimedWord};
use rand::Rng;

pub const PROPS: [&str; 2] = ["p", "q"];

pub fn interval<R: Rng>(rng: &mut R, max_c: u64) -> Interval {
    loop {
        let lower = rng.gen_range(0..=max_c);
        let upper = if rng.gen_bool(0.25) { None } else { Some(rng.gen_range(0..=max_c)) };
        let lc = rng.gen_bool(0.5);
        let uc = upper.is_some() && rng.gen_bool(0.5);
        if let Ok(iv) = Interval::new(lower, upper, lc, uc) {
            return iv;
        }
    }
}

pub fn formula<R: Rng>(rng: &mut R, depth: usize, max_c: u64) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return Formula::prop(PROPS[rng.gen_range(0..PROPS.len())]);
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(formula(rng, depth - 1, max_c)),
        1 => Formula::and(formula(rng, depth - 1, max_c), formula(rng, depth - 1, max_c)),
        2 => Formula::or(formula(rng, depth - 1, max_c), formula(rng, depth - 1, max_c)),
        3 => Formula::next(interval(rng, max_c), formula(rng, depth - 1, max_c)),
        _ => Formula::until(interval(rng, max_c), formula(rng, depth - 1, max_c), formula(rng, depth - 1, max_c)),
    }
}

/// Timestamps are multiples of 1/2, with repeated timestamps allowed.
pub fn word<R: Rng>(rng: &mut R, max_len: usize) -> TimedWord {
    let n = rng.gen_range(1..=max_len);
    let mut t = Rat::from_integer(0);
    let mut evs = Vec::new();
    for _ in 0..n {
        t += Rat::new(rng.gen_range(0..=5), 2);
        let letter: Vec<&str> = PROPS.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        evs.push(Event::new(&letter, t));
    }
    TimedWord(evs)
}

pub mod automata;
pub mod valuations;
pub mod zones;
