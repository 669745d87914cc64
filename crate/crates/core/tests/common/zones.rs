//! Random raw constraint matrices and an independent semantic oracle for
//! zone operations.
//!
//! The oracle enumerates which clocks are infinite (future clocks `-inf`,
//! history clocks `+inf`). For each pattern the remaining constraints are an
//! ordinary difference-bound system over the finite clocks, closed by naive
//! min-plus path relaxation. The tightest bound of an entry is the maximum
//! over the satisfiable patterns.

use gta_core::automaton::{apply_program_concrete, Atomic, ClockKind, ReleaseChoices, Step};
use gta_core::ext::{ExtReal, Rat};
use gta_core::zone::{Weight, Zone};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct RawZone {
    pub kinds: Vec<ClockKind>,
    /// Row-major `dim * dim`; entry `(i, j)` bounds `v_i - v_j`.
    pub m: Vec<Weight>,
}

impl RawZone {
    pub fn dim(&self) -> usize {
        self.kinds.len() + 1
    }

    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.m[i * self.dim() + j]
    }

    pub fn zone(&self) -> Option<Zone> {
        Zone::from_matrix(&self.kinds, self.m.clone())
    }

    /// Direct evaluation of every raw constraint and the clock domains.
    pub fn admits(&self, v: &[ExtReal]) -> bool {
        let n = self.dim();
        in_domain(&self.kinds, v) && (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).admits(v[i] - v[j])))
    }

    pub fn tightened(&self, i: usize, j: usize, w: Weight) -> RawZone {
        let mut m = self.m.clone();
        let k = i * self.dim() + j;
        m[k] = m[k].min(w);
        RawZone { kinds: self.kinds.clone(), m }
    }

    pub fn intersect(&self, o: &RawZone) -> RawZone {
        RawZone { kinds: self.kinds.clone(), m: self.m.iter().zip(&o.m).map(|(a, b)| Weight::min(*a, *b)).collect() }
    }
}

pub fn in_domain(kinds: &[ClockKind], v: &[ExtReal]) -> bool {
    v[0] == ExtReal::ZERO
        && kinds.iter().enumerate().all(|(i, k)| match k {
            ClockKind::Future => v[i + 1] <= ExtReal::ZERO,
            ClockKind::History => v[i + 1] >= ExtReal::ZERO,
        })
}

fn inf_of(k: ClockKind) -> ExtReal {
    match k {
        ClockKind::Future => ExtReal::NegInf,
        ClockKind::History => ExtReal::PosInf,
    }
}

fn kinds<R: Rng>(rng: &mut R, max: usize) -> Vec<ClockKind> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| if rng.gen_bool(0.5) { ClockKind::Future } else { ClockKind::History }).collect()
}

fn half<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rat {
    Rat::new(rng.gen_range(2 * lo..=2 * hi), 2)
}

/// A random valuation on the half-integer grid, sometimes infinite.
pub fn valuation<R: Rng>(rng: &mut R, kinds: &[ClockKind]) -> Vec<ExtReal> {
    let mut v = vec![ExtReal::ZERO];
    for &k in kinds {
        v.push(if rng.gen_bool(0.15) {
            inf_of(k)
        } else {
            match k {
                ClockKind::Future => ExtReal::Fin(half(rng, -6, 0)),
                ClockKind::History => ExtReal::Fin(half(rng, 0, 6)),
            }
        });
    }
    v
}

fn random_constant<R: Rng>(rng: &mut R) -> ExtReal {
    if rng.gen_bool(0.1) {
        if rng.gen_bool(0.5) {
            ExtReal::PosInf
        } else {
            ExtReal::NegInf
        }
    } else {
        ExtReal::int(rng.gen_range(-5..=5))
    }
}

/// Up to `max_clocks` clocks, integer constants in `[-5, 5]` plus `±inf`.
/// Half of the matrices are built around a valuation they admit.
pub fn raw_zone<R: Rng>(rng: &mut R, max_clocks: usize) -> RawZone {
    let kinds = kinds(rng, max_clocks);
    let n = kinds.len() + 1;
    let mut m = vec![Weight::INF; n * n];
    let seed = rng.gen_bool(0.5).then(|| valuation(rng, &kinds));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                m[i * n + j] = Weight::LE_ZERO;
                continue;
            }
            if !rng.gen_bool(0.4) {
                continue;
            }
            let strict = rng.gen_bool(0.4);
            let w = match &seed {
                None => Weight::new(strict, random_constant(rng)),
                Some(v) => {
                    let d = v[i] - v[j];
                    match d {
                        ExtReal::PosInf => Weight::INF,
                        ExtReal::NegInf => Weight::new(strict && rng.gen_bool(0.5), random_constant(rng)),
                        ExtReal::Fin(d) => {
                            let c = d.floor().to_integer() + rng.gen_range(0..=2);
                            if c > 5 {
                                Weight::INF
                            } else {
                                let w = Weight::new(strict, ExtReal::int(c));
                                if w.admits(ExtReal::Fin(d)) {
                                    w
                                } else {
                                    Weight::le(ExtReal::int(c))
                                }
                            }
                        }
                    }
                }
            };
            if w.admits(ExtReal::PosInf) && w.strict {
                m[i * n + j] = Weight::LT_INF;
            } else {
                m[i * n + j] = w;
            }
        }
    }
    RawZone { kinds, m }
}

/// Min-plus closure by repeated relaxation; `None` on a negative cycle.
fn naive_shortest_paths(n: usize, w: &[Weight]) -> Option<Vec<Weight>> {
    let mut d = w.to_vec();
    for _ in 0..n {
        let prev = d.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = prev[i * n + k].add(w[k * n + j]);
                    if s < d[i * n + j] {
                        d[i * n + j] = s;
                    }
                }
            }
        }
    }
    if (0..n).any(|i| d[i * n + i] < Weight::LE_ZERO) {
        None
    } else {
        Some(d)
    }
}

/// The tightest matrix describing the raw zone's valuations, or `None` if
/// it has none.
pub fn oracle_close(z: &RawZone) -> Option<Vec<Weight>> {
    let n = z.dim();
    let k = z.kinds.len();
    let mut best: Option<Vec<Weight>> = None;
    for mask in 0u32..(1 << k) {
        let inf = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
        // Infinite clocks take their value; finite ones are read as 0, which
        // does not change an infinite difference.
        let rep = |i: usize| if inf(i) { inf_of(z.kinds[i - 1]) } else { ExtReal::ZERO };
        let mut dom = z.m.clone();
        for x in 1..n {
            match z.kinds[x - 1] {
                ClockKind::Future => dom[x * n] = dom[x * n].min(Weight::LE_ZERO),
                ClockKind::History => dom[x] = dom[x].min(Weight::LE_ZERO),
            }
        }
        let fin: Vec<usize> = (0..n).filter(|&i| !inf(i)).collect();
        let f = fin.len();
        let mut ok = true;
        let mut fm = vec![Weight::INF; f * f];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = dom[i * n + j];
                if inf(i) || inf(j) {
                    ok &= w.admits(rep(i) - rep(j));
                } else if w.c == ExtReal::NegInf {
                    ok = false;
                } else if w.c != ExtReal::PosInf {
                    let (a, b) = (fin.iter().position(|&x| x == i).unwrap(), fin.iter().position(|&x| x == j).unwrap());
                    fm[a * f + b] = fm[a * f + b].min(w);
                }
            }
        }
        for a in 0..f {
            fm[a * f + a] = fm[a * f + a].min(Weight::LE_ZERO);
        }
        if !ok {
            continue;
        }
        let Some(sp) = naive_shortest_paths(f, &fm) else { continue };
        let mut bound = vec![Weight::LE_ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                bound[i * n + j] = if inf(i) || inf(j) {
                    Weight::le(rep(i) - rep(j))
                } else {
                    let (a, b) = (fin.iter().position(|&x| x == i).unwrap(), fin.iter().position(|&x| x == j).unwrap());
                    let w = sp[a * f + b];
                    if w.c == ExtReal::PosInf {
                        Weight::LT_INF
                    } else {
                        w
                    }
                };
            }
        }
        best = Some(match best {
            None => bound,
            Some(b) => b.iter().zip(&bound).map(|(x, y)| (*x).max(*y)).collect(),
        });
    }
    best
}

/// A valuation of the zone, built clock by clock from candidate values
/// that keep the raw constraints satisfiable.
pub fn member<R: Rng>(rng: &mut R, z: &RawZone) -> Option<Vec<ExtReal>> {
    let n = z.dim();
    let mut cur = RawZone { kinds: z.kinds.clone(), m: z.m.clone() };
    oracle_close(&cur)?;
    let mut v = vec![ExtReal::ZERO; n];
    for x in 1..n {
        let mut cands = candidates(&cur, x, &v, x);
        cands.shuffle(rng);
        let mut fixed = false;
        for u in cands {
            let pinned = pin(&cur, x, u);
            if oracle_close(&pinned).is_some() {
                cur = pinned;
                v[x] = u;
                fixed = true;
                break;
            }
        }
        if !fixed {
            return None;
        }
    }
    debug_assert!(z.admits(&v));
    Some(v)
}

/// Raw zone with clock `x` fixed to `u`.
fn pin(z: &RawZone, x: usize, u: ExtReal) -> RawZone {
    match u {
        ExtReal::NegInf => z.tightened(x, 0, Weight::NEG_INF),
        ExtReal::PosInf => z.tightened(0, x, Weight::NEG_INF),
        ExtReal::Fin(_) => z.tightened(x, 0, Weight::le(u)).tightened(0, x, Weight::le(-u)),
    }
}

/// Values for clock `x` at, between and around the bounds that the
/// constraints to the clocks `< upto` (already fixed in `v`) put on it.
fn candidates(z: &RawZone, x: usize, v: &[ExtReal], upto: usize) -> Vec<ExtReal> {
    let mut pts: Vec<Rat> = vec![Rat::from_integer(0)];
    for j in 0..z.dim() {
        if j == x || (j >= upto && j != 0) {
            continue;
        }
        if let (ExtReal::Fin(c), ExtReal::Fin(vj)) = (z.get(x, j).c, v[j]) {
            pts.push(vj + c);
        }
        if let (ExtReal::Fin(c), ExtReal::Fin(vj)) = (z.get(j, x).c, v[j]) {
            pts.push(vj - c);
        }
    }
    spread(pts, z.kinds[x - 1])
}

fn spread(mut pts: Vec<Rat>, k: ClockKind) -> Vec<ExtReal> {
    pts.sort();
    pts.dedup();
    let mut out: Vec<Rat> = pts.clone();
    for w in pts.windows(2) {
        out.push((w[0] + w[1]) / Rat::from_integer(2));
    }
    out.push(pts[0] - Rat::from_integer(1));
    out.push(pts[pts.len() - 1] + Rat::from_integer(1));
    let mut vals: Vec<ExtReal> = out
        .into_iter()
        .filter(|r| match k {
            ClockKind::Future => *r <= Rat::from_integer(0),
            ClockKind::History => *r >= Rat::from_integer(0),
        })
        .map(ExtReal::Fin)
        .collect();
    vals.push(inf_of(k));
    vals
}

/// Does some value `u` of clock `x` make `v[x := u]` a member of `z`?
pub fn exists_value(z: &RawZone, x: usize, v: &[ExtReal]) -> bool {
    let kind = z.kinds[x - 1];
    let mut pts = vec![Rat::from_integer(0)];
    for j in 0..z.dim() {
        if j == x {
            continue;
        }
        if let (ExtReal::Fin(c), ExtReal::Fin(vj)) = (z.get(x, j).c, v[j]) {
            pts.push(vj + c);
        }
        if let (ExtReal::Fin(c), ExtReal::Fin(vj)) = (z.get(j, x).c, v[j]) {
            pts.push(vj - c);
        }
    }
    let mut w = v.to_vec();
    spread(pts, kind).into_iter().any(|u| {
        w[x] = u;
        z.admits(&w)
    })
}

fn shift(v: &[ExtReal], d: Rat) -> Vec<ExtReal> {
    let mut w = v.to_vec();
    for x in w.iter_mut().skip(1) {
        *x = *x + ExtReal::Fin(d);
    }
    w
}

/// Is `v` reachable from the zone by letting some `δ >= 0` elapse?
pub fn elapse_preimage(z: &RawZone, v: &[ExtReal]) -> bool {
    let n = z.dim();
    let mut pts = vec![Rat::from_integer(0)];
    for i in 1..n {
        if let ExtReal::Fin(vi) = v[i] {
            pts.push(vi);
            if let ExtReal::Fin(c) = z.get(i, 0).c {
                pts.push(vi - c);
            }
            if let ExtReal::Fin(c) = z.get(0, i).c {
                pts.push(vi + c);
            }
        }
    }
    pts.sort();
    pts.dedup();
    let mut ds: Vec<Rat> = pts.clone();
    for w in pts.windows(2) {
        ds.push((w[0] + w[1]) / Rat::from_integer(2));
    }
    ds.push(pts[pts.len() - 1] + Rat::from_integer(1));
    ds.into_iter().filter(|d| *d >= Rat::from_integer(0)).any(|d| z.admits(&shift(v, -d)))
}

fn random_guard<R: Rng>(rng: &mut R, n: usize) -> Vec<Atomic> {
    (0..rng.gen_range(1..=2))
        .map(|_| {
            let x = rng.gen_range(0..n);
            let mut y = rng.gen_range(0..n);
            if y == x {
                y = (x + 1) % n;
            }
            Atomic::new(x, y, rng.gen_bool(0.5), random_constant(rng))
        })
        .collect()
}

fn probe<R: Rng>(rng: &mut R, z: &RawZone, image: impl Fn(&[ExtReal]) -> Option<Vec<ExtReal>>) -> Vec<ExtReal> {
    if rng.gen_bool(0.5) {
        if let Some(v) = member(rng, z).and_then(|v| image(&v)) {
            return v;
        }
    }
    valuation(rng, &z.kinds)
}

/// Checks canonicalization against the oracle and every zone operation
/// against concrete membership on `samples` valuations. Returns failures.
pub fn zone_trial<R: Rng>(rng: &mut R, samples: usize) -> Vec<String> {
    let raw = raw_zone(rng, 4);
    let mut bad = Vec::new();
    let got = raw.zone();
    let want = oracle_close(&raw);
    if got.as_ref().map(|z| z.matrix().to_vec()) != want {
        bad.push(format!("canonical form differs: raw {:?} got {:?} want {:?}", raw.m, got.map(|z| z.matrix().to_vec()), want));
        return bad;
    }
    let Some(z) = got else { return bad };
    let n = raw.dim();
    let kinds = raw.kinds.clone();
    let choices = |x: usize, u: ExtReal| ReleaseChoices::default().with_clock(x, u);

    // Membership of the canonical zone.
    for _ in 0..samples {
        let v = probe(rng, &raw, |v| Some(v.to_vec()));
        if z.contains(&v) != raw.admits(&v) {
            bad.push(format!("contains {v:?}"));
        }
    }
    // Guard.
    let g = random_guard(rng, n);
    let zg = z.clone().guard(&g);
    for _ in 0..samples {
        let v = probe(rng, &raw, |v| Some(v.to_vec()));
        let want = raw.admits(&v) && g.iter().all(|a| a.holds(&v));
        if zg.as_ref().is_some_and(|zg| zg.contains(&v)) != want {
            bad.push(format!("guard {g:?} at {v:?}"));
        }
    }
    // Elapse.
    let ze = z.clone().elapse().expect("elapse keeps a non-empty zone");
    for _ in 0..samples {
        let d = half(rng, 0, 4);
        let v = probe(rng, &raw, |v| {
            let w = shift(v, d);
            in_domain(&kinds, &w).then_some(w)
        });
        if ze.contains(&v) != elapse_preimage(&raw, &v) {
            bad.push(format!("elapse at {v:?}"));
        }
    }
    // Exact delay.
    let d = half(rng, 0, 2);
    let zd = z.clone().delay_exact(d);
    for _ in 0..samples {
        let v = probe(rng, &raw, |v| Some(shift(v, d)));
        let want = in_domain(&kinds, &v) && raw.admits(&shift(&v, -d));
        if zd.as_ref().is_some_and(|zd| zd.contains(&v)) != want {
            bad.push(format!("delay {d} at {v:?}"));
        }
    }
    // Change of a single clock, through the concrete semantics.
    let x = rng.gen_range(1..n);
    let zc = z.clone().change(&[x]).expect("a change keeps a non-empty zone");
    for _ in 0..samples {
        let u = match kinds[x - 1] {
            ClockKind::Future => {
                if rng.gen_bool(0.2) {
                    ExtReal::NegInf
                } else {
                    ExtReal::Fin(half(rng, -6, 0))
                }
            }
            ClockKind::History => ExtReal::ZERO,
        };
        let v = probe(rng, &raw, |v| apply_program_concrete(v, &kinds, &[Step::Change(vec![x])], &choices(x, u)).ok());
        let want = in_domain(&kinds, &v)
            && (kinds[x - 1] == ClockKind::Future || v[x] == ExtReal::ZERO)
            && exists_value(&raw, x, &v);
        if zc.contains(&v) != want {
            bad.push(format!("change {x} at {v:?}"));
        }
    }
    // Changing several clocks equals changing them one at a time.
    let many: Vec<usize> = (1..n).filter(|_| rng.gen_bool(0.5)).collect();
    let seq = many.iter().try_fold(z.clone(), |z, &c| z.change(&[c]));
    if z.clone().change(&many) != seq {
        bad.push(format!("change {many:?} differs from sequential"));
    }
    // Renaming by a kind-preserving permutation.
    let mut sigma: Vec<usize> = (0..n).collect();
    for k in [ClockKind::Future, ClockKind::History] {
        let idx: Vec<usize> = (1..n).filter(|&i| kinds[i - 1] == k).collect();
        let mut perm = idx.clone();
        perm.shuffle(rng);
        for (a, b) in idx.iter().zip(perm) {
            sigma[*a] = b;
        }
    }
    let zr = z.rename(&sigma);
    let mut inv = vec![0; n];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    for _ in 0..samples {
        let v = probe(rng, &raw, |v| apply_program_concrete(v, &kinds, &[Step::Rename(sigma.clone())], &ReleaseChoices::default()).ok());
        let pre = apply_program_concrete(&v, &kinds, &[Step::Rename(inv.clone())], &ReleaseChoices::default()).unwrap();
        if zr.contains(&v) != raw.admits(&pre) {
            bad.push(format!("rename {sigma:?} at {v:?}"));
        }
    }
    // The -inf test and its forcing.
    for x in (1..n).filter(|&x| kinds[x - 1] == ClockKind::Future) {
        let forced = raw.tightened(x, 0, Weight::NEG_INF);
        let want = oracle_close(&forced);
        if z.can_be_minus_infinity(x) != want.is_some() {
            bad.push(format!("can_be_minus_infinity({x})"));
        }
        if want.is_some() && z.clone().force_minus_infinity(&[x]).map(|f| f.matrix().to_vec()) != want {
            bad.push(format!("force_minus_infinity({x})"));
        }
    }
    // Inclusion against a second zone over the same clocks.
    let other = loop {
        let r = raw_zone(rng, 4);
        if r.kinds.len() == kinds.len() {
            break RawZone { kinds: kinds.clone(), m: r.m };
        }
    };
    if let Some(zo) = other.zone() {
        let meet = oracle_close(&raw.intersect(&other));
        let want = meet.as_deref() == Some(z.matrix());
        if zo.includes(&z) != want {
            bad.push(format!("includes: other {:?}", other.m));
        }
    }
    bad
}
