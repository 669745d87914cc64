//! The region-like equivalence `≈_M`, the finite-index equivalence `∼_M`,
//! and the constructions that move between them: matching a delay or a
//! release across `≈_M`, adjusting a `∼_M`-equivalent valuation into an
//! `≈_M`-equivalent one, and rerouting a run to end in the adjusted
//! valuation.

mod reroute;

pub use reroute::{reroute_run, AtomicRun, AtomicStep, RerouteError};

use num_traits::Signed;
use thiserror::Error;

use crate::automaton::{ClockKind, Gta, Step, Valuation, ZERO};
use crate::ext::{floor_rat, frac_rat, ExtReal, Rat};

/// Maximal guard constant `M` and clock count `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MBound {
    pub m: i64,
    pub n: usize,
}

impl MBound {
    pub fn new(m: i64, n: usize) -> Result<MBound, EquivError> {
        if m < 1 || n < 1 {
            return Err(EquivError::BadBound { m, n });
        }
        Ok(MBound { m, n })
    }

    /// The largest finite constant of `a`'s guards and initial guards, at
    /// least 1.
    pub fn of_gta(a: &Gta) -> MBound {
        let mut m = 1;
        let mut see = |c: &ExtReal| {
            if let Some(r) = c.finite() {
                m = m.max(r.abs().ceil().to_integer());
            }
        };
        for t in &a.transitions {
            for s in &t.prog {
                if let Step::Guard(g) = s {
                    g.iter().for_each(|at| see(&at.c));
                }
            }
        }
        for i in &a.initial {
            i.guard.iter().for_each(|at| see(&at.c));
        }
        MBound { m, n: a.num_clocks().max(1) }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("bound needs M >= 1 and n >= 1, got M = {m}, n = {n}")]
    BadBound { m: i64, n: usize },
    #[error("valuations are not equivalent")]
    NotEquivalent,
    #[error("valuations have different lengths")]
    Shape,
    #[error("delayed valuation makes a future clock positive")]
    NotAValuation,
    #[error("clock {0} is not a future clock")]
    NotFuture(usize),
    #[error("released valuation differs from the original outside clock {0} or is positive there")]
    NotARelease(usize),
}

/// Position of a value relative to the integers of `[lo, hi]`; with
/// `lo = None` every integer up to `hi` counts. Two values satisfy the same
/// constraints `◁ c` (`◁ ∈ {<, ≤}`, `c ∈ {±inf} ∪ [lo, hi] ∩ ℤ`) exactly
/// when their buckets are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    NegInf,
    Below,
    Point(i64),
    /// The open interval `(k, k + 1)`.
    Open(i64),
    Above,
    PosInf,
}

pub fn bucket(a: ExtReal, lo: Option<i64>, hi: i64) -> Bucket {
    match a {
        ExtReal::NegInf => Bucket::NegInf,
        ExtReal::PosInf => Bucket::PosInf,
        ExtReal::Fin(r) => {
            if r > Rat::from_integer(hi) {
                Bucket::Above
            } else if lo.is_some_and(|lo| r < Rat::from_integer(lo)) {
                Bucket::Below
            } else if r.is_integer() {
                Bucket::Point(r.to_integer())
            } else {
                Bucket::Open(floor_rat(&r))
            }
        }
    }
}

fn frac(a: ExtReal) -> Rat {
    frac_rat(&a.finite().expect("finite value"))
}

fn in_b(a: ExtReal, m: i64) -> bool {
    a.is_finite() && a <= ExtReal::int(m)
}

/// `v1 ≈_M v2`.
pub fn approx_equiv(v1: &[ExtReal], v2: &[ExtReal], m: i64) -> bool {
    if v1.len() != v2.len() {
        return false;
    }
    let n = v1.len();
    for x in 1..n {
        if bucket(v1[x], None, m) != bucket(v2[x], None, m) {
            return false;
        }
    }
    for x in 1..n {
        for y in 1..n {
            if x != y && bucket(v1[x] - v1[y], Some(-m), m) != bucket(v2[x] - v2[y], Some(-m), m) {
                return false;
            }
        }
    }
    for x in 1..n {
        for y in 1..n {
            if in_b(v1[x], m) && in_b(v1[y], m) && (frac(v1[x]) <= frac(v1[y])) != (frac(v2[x]) <= frac(v2[y])) {
                return false;
            }
        }
    }
    true
}

/// The `∼_M` class of a valuation: the bucket of each clock up to `nM` and
/// of each ordered difference up to `(n+1)M`.
pub fn signature(v: &[ExtReal], b: MBound) -> Vec<Bucket> {
    let (nm, n1m) = (b.n as i64 * b.m, (b.n as i64 + 1) * b.m);
    let k = v.len();
    let mut sig: Vec<Bucket> = (1..k).map(|x| bucket(v[x], Some(-nm), nm)).collect();
    for x in 1..k {
        for y in 1..k {
            if x != y {
                sig.push(bucket(v[x] - v[y], Some(-n1m), n1m));
            }
        }
    }
    sig
}

/// `v1 ∼_M v2`.
pub fn sim_equiv(v1: &[ExtReal], v2: &[ExtReal], b: MBound) -> bool {
    v1.len() == v2.len() && signature(v1, b) == signature(v2, b)
}

fn mid(a: Rat, b: Rat) -> Rat {
    (a + b) / Rat::from_integer(2)
}

fn shifted(v: &[ExtReal], d: Rat) -> Valuation {
    let mut out: Valuation = v.iter().map(|&x| x + ExtReal::Fin(d)).collect();
    out[ZERO] = ExtReal::ZERO;
    out
}

/// Sorted distinct fractional parts of the clocks in `(-inf, M]`.
fn fracs(v: &[ExtReal], m: i64) -> Vec<Rat> {
    let mut f: Vec<Rat> = (1..v.len()).filter(|&x| in_b(v[x], m)).map(|x| frac(v[x])).collect();
    f.sort();
    f.dedup();
    f
}

/// A delay `δ2` with `v1 + δ1 ≈_M v2 + δ2`, given `v1 ≈_M v2`. The integral
/// part is copied; the fractional part sits in the gap of the values
/// `1 - f'_i` that matches the gap of `{δ1}` among the `1 - f_i`.
pub fn match_delay(v1: &[ExtReal], v2: &[ExtReal], d1: Rat, kinds: &[ClockKind], m: i64) -> Result<Rat, EquivError> {
    if !approx_equiv(v1, v2, m) {
        return Err(EquivError::NotEquivalent);
    }
    if !is_valuation(&shifted(v1, d1), kinds) || d1 < Rat::from_integer(0) {
        return Err(EquivError::NotAValuation);
    }
    let whole = Rat::from_integer(floor_rat(&d1));
    let fd = frac_rat(&d1);
    if fd == Rat::from_integer(0) {
        return Ok(whole);
    }
    let (one, zero) = (Rat::from_integer(1), Rat::from_integer(0));
    let (f1, f2) = (fracs(v1, m), fracs(v2, m));
    debug_assert_eq!(f1.len(), f2.len());
    let k = f1.len();
    // f_0 = 0 and f_{k+1} = 1 bracket the sorted fractional parts.
    let at = |f: &[Rat], i: usize| if i == 0 { zero } else if i == k + 1 { one } else { f[i - 1] };
    for i in 1..=k {
        if fd == one - at(&f1, i) {
            return Ok(whole + one - at(&f2, i));
        }
    }
    for i in 0..=k {
        if one - at(&f1, i + 1) < fd && fd < one - at(&f1, i) {
            return Ok(whole + mid(one - at(&f2, i + 1), one - at(&f2, i)));
        }
    }
    unreachable!("the gaps cover (0, 1)")
}

fn is_valuation(v: &[ExtReal], kinds: &[ClockKind]) -> bool {
    v[ZERO] == ExtReal::ZERO
        && kinds.iter().enumerate().all(|(i, k)| match k {
            ClockKind::Future => v[i + 1] <= ExtReal::ZERO,
            ClockKind::History => v[i + 1] >= ExtReal::ZERO,
        })
}

/// A fractional part for a value placed among fixed clocks: equal to the
/// image of a fixed clock with the same fraction, else the midpoint of the
/// matching gap.
fn place(g: Rat, fixed: &[(Rat, Rat)]) -> Rat {
    if let Some(&(_, f)) = fixed.iter().find(|(a, _)| *a == g) {
        return f;
    }
    let lo = fixed.iter().filter(|(a, _)| *a < g).map(|&(_, f)| f).max().unwrap_or(Rat::from_integer(0));
    let hi = fixed.iter().filter(|(a, _)| *a > g).map(|&(_, f)| f).min().unwrap_or(Rat::from_integer(1));
    mid(lo, hi)
}

/// `u2 ∈ [x]v2` with `u1 ≈_M u2`, given `v1 ≈_M v2` and `u1 ∈ [x]v1`.
pub fn match_release(
    v1: &[ExtReal],
    v2: &[ExtReal],
    x: usize,
    u1: &[ExtReal],
    kinds: &[ClockKind],
    m: i64,
) -> Result<Valuation, EquivError> {
    if !approx_equiv(v1, v2, m) {
        return Err(EquivError::NotEquivalent);
    }
    if x == ZERO || x >= v1.len() || kinds[x - 1] != ClockKind::Future {
        return Err(EquivError::NotFuture(x));
    }
    if u1.len() != v1.len() || u1[x] > ExtReal::ZERO || (1..v1.len()).any(|y| y != x && u1[y] != v1[y]) {
        return Err(EquivError::NotARelease(x));
    }
    let mut u2 = v2.to_vec();
    u2[x] = match u1[x] {
        ExtReal::NegInf => ExtReal::NegInf,
        ExtReal::PosInf => unreachable!("checked non-positive"),
        ExtReal::Fin(r) => {
            let whole = Rat::from_integer(floor_rat(&r));
            let g = frac_rat(&r);
            if g == Rat::from_integer(0) {
                ExtReal::Fin(whole)
            } else {
                let fixed: Vec<(Rat, Rat)> =
                    (1..v1.len()).filter(|&y| y != x && in_b(u1[y], m)).map(|y| (frac(v1[y]), frac(v2[y]))).collect();
                ExtReal::Fin(whole + place(g, &fixed))
            }
        }
    };
    Ok(u2)
}

/// A valuation agreeing with `v2` on `L = {x | -M ≤ v1(x)}` and
/// `≈_M`-equivalent to `v1`, given `v1 ∼_M v2`. Clocks of `v1` in
/// `(-inf, -M)` get `v1`'s integral part and fractional parts ordered as in
/// `v1`; new fractions in one gap are spread evenly over it.
pub fn adjust_to_region(v1: &[ExtReal], v2: &[ExtReal], b: MBound) -> Result<Valuation, EquivError> {
    if v1.len() != v2.len() {
        return Err(EquivError::Shape);
    }
    if !sim_equiv(v1, v2, b) {
        return Err(EquivError::NotEquivalent);
    }
    let m = b.m;
    let low = |a: ExtReal| a.is_finite() && a < ExtReal::int(-m);
    let mut out = v2.to_vec();
    // Clocks of B whose fractional part is already fixed: (frac in v1, frac in out).
    let mut fixed: Vec<(Rat, Rat)> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for x in 1..v1.len() {
        if v1[x] == ExtReal::NegInf {
            out[x] = ExtReal::NegInf;
        } else if low(v1[x]) {
            let r = v1[x].finite().unwrap();
            let whole = Rat::from_integer(floor_rat(&r));
            out[x] = ExtReal::Fin(whole);
            if frac_rat(&r) == Rat::from_integer(0) {
                fixed.push((Rat::from_integer(0), Rat::from_integer(0)));
            } else {
                open.push(x);
            }
        } else if in_b(v1[x], m) {
            fixed.push((frac(v1[x]), frac(v2[x])));
        }
    }
    // Distinct new fractions, grouped by the gap of fixed fractions they
    // fall into.
    let mut news: Vec<Rat> = open.iter().map(|&x| frac(v1[x])).filter(|g| !fixed.iter().any(|(a, _)| a == g)).collect();
    news.sort();
    news.dedup();
    let mut chosen: Vec<(Rat, Rat)> = Vec::new();
    let gap_of = |g: Rat| {
        let lo = fixed.iter().filter(|(a, _)| *a < g).map(|&(a, f)| (a, f)).max();
        let hi = fixed.iter().filter(|(a, _)| *a > g).map(|&(a, f)| (a, f)).min();
        (lo, hi)
    };
    let mut i = 0;
    while i < news.len() {
        let gap = gap_of(news[i]);
        let mut j = i;
        while j < news.len() && gap_of(news[j]) == gap {
            j += 1;
        }
        let lo = gap.0.map_or(Rat::from_integer(0), |p| p.1);
        let hi = gap.1.map_or(Rat::from_integer(1), |p| p.1);
        let count = Rat::from_integer((j - i) as i64 + 1);
        for (s, g) in news[i..j].iter().enumerate() {
            chosen.push((*g, lo + (hi - lo) * Rat::from_integer(s as i64 + 1) / count));
        }
        i = j;
    }
    for x in open {
        let g = frac(v1[x]);
        let f = fixed.iter().chain(chosen.iter()).find(|(a, _)| *a == g).map(|&(_, f)| f).expect("every fraction placed");
        out[x] = out[x] + ExtReal::Fin(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(c: i64) -> ExtReal {
        ExtReal::int(c)
    }

    #[test]
    fn buckets() {
        assert_eq!(bucket(fi(3), None, 2), Bucket::Above);
        assert_eq!(bucket(fi(2), None, 2), Bucket::Point(2));
        assert_eq!(bucket(fi(-30), None, 2), Bucket::Point(-30));
        assert_eq!(bucket(fi(-3), Some(-2), 2), Bucket::Below);
        assert_eq!(bucket(ExtReal::Fin(Rat::new(-3, 2)), Some(-2), 2), Bucket::Open(-2));
    }

    #[test]
    fn minus_infinity_is_its_own_class() {
        assert!(!approx_equiv(&[fi(0), ExtReal::NegInf], &[fi(0), fi(-5)], 2));
    }

    #[test]
    fn release_to_minus_infinity_is_copied() {
        let k = [ClockKind::Future];
        let v = [fi(0), fi(-1)];
        let u = match_release(&v, &v, 1, &[fi(0), ExtReal::NegInf], &k, 2).unwrap();
        assert_eq!(u[1], ExtReal::NegInf);
    }
}
