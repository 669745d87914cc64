//! Random valuations, `≈_M` partners, guards and safe atomic runs.

use std::collections::BTreeMap;

use gta_core::automaton::{guard_holds, Atomic, ClockKind, Valuation};
use gta_core::equivalence::{
    adjust_to_region, approx_equiv, match_delay, match_release, reroute_run, sim_equiv, AtomicRun, AtomicStep, MBound,
};
use gta_core::ext::{frac_rat, ExtReal, Rat};
use rand::Rng;

/// Fractions with small denominators, so that ties are common.
pub fn fraction<R: Rng>(rng: &mut R) -> Rat {
    let d = rng.gen_range(1..=4);
    Rat::new(rng.gen_range(0..d), d)
}

pub fn kinds<R: Rng>(rng: &mut R, max: usize) -> Vec<ClockKind> {
    let n = rng.gen_range(1..=max);
    let mut k: Vec<ClockKind> = (0..n).map(|_| if rng.gen_bool(0.5) { ClockKind::Future } else { ClockKind::History }).collect();
    if !k.contains(&ClockKind::Future) {
        k[0] = ClockKind::Future;
    }
    k
}

/// Values up to `3M` in magnitude, with some infinite ones.
pub fn valuation<R: Rng>(rng: &mut R, kinds: &[ClockKind], m: i64) -> Valuation {
    let mut v = vec![ExtReal::ZERO];
    for k in kinds {
        let mag = Rat::from_integer(rng.gen_range(0..=3 * m)) + fraction(rng);
        v.push(match k {
            ClockKind::Future if rng.gen_bool(0.15) => ExtReal::NegInf,
            ClockKind::Future => ExtReal::Fin(-mag),
            ClockKind::History if rng.gen_bool(0.1) => ExtReal::PosInf,
            ClockKind::History => ExtReal::Fin(mag),
        });
    }
    v
}

/// A valuation `≈_M`-equivalent to `v`: fractional parts of the clocks in
/// `(-inf, M]` moved by a random monotone map, clocks above `M` shifted.
/// Falls back to `v` itself when the proposals fail.
pub fn approx_partner<R: Rng>(rng: &mut R, v: &[ExtReal], m: i64) -> Valuation {
    let bounded = |a: &ExtReal| a.is_finite() && *a <= ExtReal::int(m);
    let mut fr: Vec<Rat> = v.iter().skip(1).filter(|a| bounded(a)).map(|a| frac_rat(&a.finite().unwrap())).collect();
    fr.sort();
    fr.dedup();
    for _ in 0..20 {
        let mut img: Vec<Rat> = fr
            .iter()
            .map(|f| if *f == Rat::from_integer(0) { *f } else { Rat::new(rng.gen_range(1..24), 24) })
            .collect();
        img.sort();
        if img.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let mut out = v.to_vec();
        for a in out.iter_mut().skip(1) {
            if bounded(a) {
                let r = a.finite().unwrap();
                let i = fr.iter().position(|f| *f == frac_rat(&r)).unwrap();
                *a = ExtReal::Fin(r - frac_rat(&r) + img[i]);
            } else if a.is_finite() {
                *a = *a + ExtReal::Fin(Rat::new(rng.gen_range(0..8), 4));
            }
        }
        if approx_equiv(v, &out, m) {
            return out;
        }
    }
    v.to_vec()
}

pub fn guard<R: Rng>(rng: &mut R, n: usize, m: i64) -> Atomic {
    let x = rng.gen_range(0..=n);
    let mut y = rng.gen_range(0..=n);
    if y == x {
        y = (x + 1) % (n + 1);
    }
    let c = match rng.gen_range(0..10) {
        0 => ExtReal::NegInf,
        1 => ExtReal::PosInf,
        _ => ExtReal::int(rng.gen_range(-m..=m)),
    };
    Atomic::new(x, y, rng.gen_bool(0.5), c)
}

/// One randomized trial of the bisimulation properties; returns a
/// description of every failed check.
pub fn bisimulation_trial<R: Rng>(rng: &mut R) -> Vec<String> {
    let m = rng.gen_range(1..=3);
    let kinds = kinds(rng, 4);
    let n = kinds.len();
    let v1 = valuation(rng, &kinds, m);
    let v2 = approx_partner(rng, &v1, m);
    let mut bad = Vec::new();
    let ctx = format!("M={m} v1={v1:?} v2={v2:?}");
    for _ in 0..4 {
        let g = guard(rng, n, m);
        if g.holds(&v1) != g.holds(&v2) {
            bad.push(format!("guard {g:?} separates {ctx}"));
        }
    }
    // Delays up to the first future clock reaching 0.
    let room = v1.iter().zip(std::iter::once(&ClockKind::History).chain(&kinds)).filter(|(_, k)| **k == ClockKind::Future);
    let max_delay = room.filter_map(|(a, _)| a.finite()).map(|r| -r).min().unwrap_or(Rat::from_integer(3 * m));
    let d1 = if rng.gen_bool(0.3) { max_delay } else { max_delay * fraction(rng) };
    match match_delay(&v1, &v2, d1, &kinds, m) {
        Ok(d2) => {
            let a = shift(&v1, d1);
            let b = shift(&v2, d2);
            if !approx_equiv(&a, &b, m) || b.iter().zip(std::iter::once(&ClockKind::History).chain(&kinds)).any(|(x, k)| *k == ClockKind::Future && *x > ExtReal::ZERO) {
                bad.push(format!("delay {d1} matched by {d2} breaks the equivalence: {ctx}"));
            }
        }
        Err(e) => bad.push(format!("match_delay {d1}: {e}: {ctx}")),
    }
    let fut: Vec<usize> = (1..=n).filter(|&x| kinds[x - 1] == ClockKind::Future).collect();
    let x = fut[rng.gen_range(0..fut.len())];
    let mut u1 = v1.clone();
    u1[x] = if rng.gen_bool(0.2) { ExtReal::NegInf } else { ExtReal::Fin(-(Rat::from_integer(rng.gen_range(0..=3 * m)) + fraction(rng))) };
    match match_release(&v1, &v2, x, &u1, &kinds, m) {
        Ok(u2) => {
            let others_kept = (1..=n).all(|y| y == x || u2[y] == v2[y]);
            if !others_kept || u2[x] > ExtReal::ZERO || !approx_equiv(&u1, &u2, m) {
                bad.push(format!("release of {x} to {} matched by {u2:?}: {ctx}", u1[x]));
            }
            if u1[x] == ExtReal::NegInf && u2[x] != ExtReal::NegInf {
                bad.push(format!("release to -inf not copied: {ctx}"));
            }
        }
        Err(e) => bad.push(format!("match_release: {e}: {ctx}")),
    }
    if let Some(h) = (1..=n).find(|&h| kinds[h - 1] == ClockKind::History) {
        let (mut r1, mut r2) = (v1.clone(), v2.clone());
        r1[h] = ExtReal::ZERO;
        r2[h] = ExtReal::ZERO;
        if !approx_equiv(&r1, &r2, m) {
            bad.push(format!("reset of {h} breaks the equivalence: {ctx}"));
        }
    }
    bad
}

pub fn shift(v: &[ExtReal], d: Rat) -> Valuation {
    let mut out: Valuation = v.iter().map(|&a| a + ExtReal::Fin(d)).collect();
    out[0] = ExtReal::ZERO;
    out
}

/// A safe atomic run `(q1, v1) -> ... -> (qk, vk)` with `v1 ∼_M vk` in
/// which every future clock is released or starts at `-inf`: each
/// future clock first reaches 0, is checked and released, and its last
/// release aims at its target value; history clocks are reset so that
/// they end where they started. Random guards that hold are inserted.
pub fn safe_run<R: Rng>(rng: &mut R) -> (AtomicRun, MBound) {
    loop {
        if let Some(r) = try_safe_run(rng) {
            return r;
        }
    }
}

fn try_safe_run<R: Rng>(rng: &mut R) -> Option<(AtomicRun, MBound)> {
    let m = rng.gen_range(1..=3);
    let kinds = kinds(rng, 4);
    let n = kinds.len();
    let b = MBound::new(m, n).unwrap();
    let deep = 3 * (n as i64 + 1) * m;
    let mut v1 = vec![ExtReal::ZERO; n + 1];
    for x in 1..=n {
        if kinds[x - 1] == ClockKind::Future {
            v1[x] = if rng.gen_bool(0.2) {
                ExtReal::NegInf
            } else {
                ExtReal::Fin(-(Rat::from_integer(rng.gen_range(0..deep)) + fraction(rng) + Rat::new(1, 4)))
            };
        }
    }
    let first_hit = |a: ExtReal| a.finite().map(|r| -r).unwrap_or(Rat::from_integer(0));
    let horizon = (1..=n).map(|x| first_hit(v1[x])).max().unwrap() + Rat::from_integer(rng.gen_range(1..=4));
    for x in 1..=n {
        if kinds[x - 1] == ClockKind::History {
            v1[x] = if rng.gen_bool(0.2) { ExtReal::PosInf } else { ExtReal::Fin(horizon * fraction(rng)) };
        }
    }
    // Targets: deep future clocks move while staying deep.
    let mut target = v1.clone();
    for _ in 0..10 {
        let mut t = v1.clone();
        for x in 1..=n {
            if kinds[x - 1] == ClockKind::Future && t[x].is_finite() && t[x] < ExtReal::int(-m) {
                let moved = t[x] + ExtReal::Fin(Rat::new(rng.gen_range(-8..=8), 4));
                if moved < ExtReal::int(-m) {
                    t[x] = moved;
                }
            }
        }
        if sim_equiv(&v1, &t, b) {
            target = t;
            break;
        }
    }
    // (time, step) events.
    let mut events: Vec<(Rat, AtomicStep)> = Vec::new();
    let release = |x: usize, value: ExtReal| AtomicStep::Change { clocks: vec![x], values: BTreeMap::from([(x, value)]) };
    for x in 1..=n {
        match (kinds[x - 1], v1[x]) {
            (ClockKind::History, ExtReal::Fin(r)) => events.push((horizon - r, AtomicStep::Change { clocks: vec![x], values: BTreeMap::new() })),
            (ClockKind::History, _) => {}
            (ClockKind::Future, ExtReal::NegInf) => {
                if rng.gen_bool(0.5) {
                    let t = horizon * fraction(rng);
                    events.push((t, AtomicStep::Guard(vec![Atomic::minus_infinity(x)])));
                    events.push((t, release(x, ExtReal::NegInf)));
                }
            }
            (ClockKind::Future, ExtReal::Fin(r)) => {
                let mut times = vec![-r];
                for _ in 0..rng.gen_range(0..=2) {
                    let last = *times.last().unwrap();
                    let t = last + (horizon - last) * fraction(rng);
                    if t > last {
                        times.push(t);
                    }
                }
                for (i, &t) in times.iter().enumerate() {
                    let value = match times.get(i + 1) {
                        Some(&next) => ExtReal::Fin(t - next),
                        None => target[x] - ExtReal::Fin(horizon - t),
                    };
                    events.push((t, AtomicStep::Guard(Atomic::eq(x, ExtReal::ZERO))));
                    events.push((t, release(x, value)));
                }
            }
            (ClockKind::Future, ExtReal::PosInf) => unreachable!(),
        }
    }
    events.push((horizon, AtomicStep::Guard(Vec::new())));
    // Stable sort keeps each check right before its release.
    events.sort_by(|a, b| a.0.cmp(&b.0));
    let mut steps = Vec::new();
    let mut now = Rat::from_integer(0);
    for (t, s) in events {
        steps.push((t - now, s));
        now = t;
    }
    let mut run = AtomicRun { kinds, start: v1.clone(), steps };
    let vals = run.replay().ok()?;
    // Guards that hold where they are inserted.
    let mut with_guards = Vec::new();
    for (i, step) in run.steps.iter().enumerate() {
        with_guards.push(step.clone());
        if rng.gen_bool(0.5) {
            let g: Vec<Atomic> = (0..8).map(|_| guard(rng, n, m)).filter(|g| g.holds(&vals[i + 1])).take(2).collect();
            if guard_holds(&vals[i + 1], &g) {
                with_guards.push((Rat::from_integer(0), AtomicStep::Guard(g)));
            }
        }
    }
    run.steps = with_guards;
    let vals = run.replay().ok()?;
    let vk = vals.last().unwrap();
    (sim_equiv(&v1, vk, b) && vk == &target).then_some((run, b))
}

/// Adjusts the end of a safe run into `≈_M` with its start and reroutes
/// it; returns a description of the failure, if any.
pub fn reroute_trial(run: &AtomicRun, b: MBound) -> Result<(), String> {
    let vals = run.replay().map_err(|e| e.to_string())?;
    let (v1, vk) = (&vals[0], vals.last().unwrap());
    let adjusted = adjust_to_region(v1, vk, b).map_err(|e| format!("adjust: {e}"))?;
    if !approx_equiv(v1, &adjusted, b.m) {
        return Err(format!("adjusted {adjusted:?} not ≈ {v1:?}"));
    }
    let rerouted = reroute_run(run, &adjusted, b.m).map_err(|e| format!("reroute: {e}"))?;
    let end = rerouted.replay().map_err(|e| e.to_string())?;
    if end.last() != Some(&adjusted) {
        return Err("rerouted run ends elsewhere".into());
    }
    Ok(())
}
