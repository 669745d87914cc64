//! Zones over future and history clocks: extended difference-bound matrices
//! whose entries may be `±inf`.
//!
//! Entry `(i, j)` bounds `v(i) - v(j)`; index 0 is the constant clock and
//! clocks are `1..=n`. The difference of two extended values is `a + (-b)`
//! under the absorbing algebra, so `v(i) - v(j)` is `+inf` when `i` is a
//! history clock at `+inf` or `j` a future clock at `-inf`, and `-inf` when
//! otherwise `i` is at `-inf` or `j` at `+inf`.
//!
//! Floyd-Warshall alone is sound but not tight in the presence of infinite
//! values, so closure alternates shortest paths with an infinity
//! normalization:
//!
//! * a future clock can be `-inf` only if its whole column is `(<=, inf)`,
//!   a history clock can be `+inf` only if its whole row is;
//! * an entry `(<=, -inf)` on `(i, j)` needs `i = -inf` or `j = +inf`; if
//!   only one of the two is possible it is forced;
//! * a difference between two clocks that cannot be infinite in the
//!   offending direction is tightened from `(<=, inf)` to `(<, inf)`.
//!
//! The diagonal is kept at `(<=, 0)` and is not a membership constraint
//! (`x - x` is `+inf` when `x` is infinite).

mod weight;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use weight::Weight;

use crate::automaton::{Atomic, ClockKind, Step, ZERO};
use crate::ext::{ExtReal, Rat};

#[derive(Clone, Debug)]
pub struct Zone {
    dim: usize,
    kinds: Arc<Vec<ClockKind>>,
    m: Vec<Weight>,
}

impl PartialEq for Zone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.m == other.m
    }
}

impl Eq for Zone {}

impl Hash for Zone {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.m.hash(state);
    }
}

impl Zone {
    /// All valuations over the given clocks (kinds of clocks `1..=n`).
    pub fn universe(kinds: &[ClockKind]) -> Zone {
        Zone::universe_shared(Arc::new(kinds.to_vec()))
    }

    pub fn universe_shared(kinds: Arc<Vec<ClockKind>>) -> Zone {
        let dim = kinds.len() + 1;
        let mut z = Zone { dim, kinds, m: vec![Weight::INF; dim * dim] };
        for i in 0..dim {
            z.set(i, i, Weight::LE_ZERO);
        }
        for x in 1..dim {
            match z.kind(x) {
                Some(ClockKind::Future) => z.set(x, ZERO, Weight::LE_ZERO),
                _ => z.set(ZERO, x, Weight::LE_ZERO),
            }
        }
        z.close().expect("the universe zone is non-empty")
    }

    /// The zone of valuations satisfying `atoms`, or `None` if empty.
    pub fn from_constraints(kinds: &[ClockKind], atoms: &[Atomic]) -> Option<Zone> {
        Zone::universe(kinds).guard(atoms)
    }

    /// Initial node zone: `g0` intersected with the domain, then elapsed.
    pub fn initial_zone(kinds: &[ClockKind], g0: &[Atomic]) -> Option<Zone> {
        Zone::from_constraints(kinds, g0).and_then(|z| z.elapse())
    }

    /// Builds a zone directly from a matrix (row-major, `dim * dim`) and
    /// closes it. The diagonal is overwritten with `(<=, 0)`.
    pub fn from_matrix(kinds: &[ClockKind], m: Vec<Weight>) -> Option<Zone> {
        let dim = kinds.len() + 1;
        assert_eq!(m.len(), dim * dim, "matrix size");
        let mut z = Zone { dim, kinds: Arc::new(kinds.to_vec()), m };
        for i in 0..dim {
            z.set(i, i, Weight::LE_ZERO);
        }
        for x in 1..dim {
            match z.kind(x) {
                Some(ClockKind::Future) => z.tighten(x, ZERO, Weight::LE_ZERO),
                _ => z.tighten(ZERO, x, Weight::LE_ZERO),
            };
        }
        z.close()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_clocks(&self) -> usize {
        self.dim - 1
    }

    pub fn kinds(&self) -> &Arc<Vec<ClockKind>> {
        &self.kinds
    }

    pub fn kind(&self, i: usize) -> Option<ClockKind> {
        if i == ZERO {
            None
        } else {
            Some(self.kinds[i - 1])
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, w: Weight) {
        self.m[i * self.dim + j] = w;
    }

    #[inline]
    fn tighten(&mut self, i: usize, j: usize, w: Weight) -> bool {
        let k = i * self.dim + j;
        if w < self.m[k] {
            self.m[k] = w;
            true
        } else {
            false
        }
    }

    pub fn matrix(&self) -> &[Weight] {
        &self.m
    }

    /// The same constraints over a larger clock set whose first clocks are
    /// this zone's; the extra clocks are unconstrained.
    pub fn embed(&self, kinds: Arc<Vec<ClockKind>>) -> Option<Zone> {
        let old = self.dim;
        assert!(kinds.len() + 1 >= old && kinds[..old - 1] == self.kinds[..], "embedding must extend the clock set");
        let mut z = Zone::universe_shared(kinds);
        for i in 0..old {
            for j in 0..old {
                if i != j {
                    z.tighten(i, j, self.get(i, j));
                }
            }
        }
        z.close()
    }

    fn is_future(&self, i: usize) -> bool {
        self.kind(i) == Some(ClockKind::Future)
    }

    fn is_history(&self, i: usize) -> bool {
        self.kind(i) == Some(ClockKind::History)
    }

    fn column_free(&self, x: usize) -> bool {
        (0..self.dim).all(|i| i == x || self.get(i, x) == Weight::INF)
    }

    fn row_free(&self, h: usize) -> bool {
        (0..self.dim).all(|j| j == h || self.get(h, j) == Weight::INF)
    }

    fn floyd_warshall(&mut self) {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.m[i * n + k];
                if ik == Weight::INF {
                    continue;
                }
                for j in 0..n {
                    let kj = self.m[k * n + j];
                    let s = ik.add(kj);
                    if s < self.m[i * n + j] {
                        self.m[i * n + j] = s;
                    }
                }
            }
        }
    }

    /// Shortest paths plus infinity normalization, to a fixpoint. Returns
    /// `None` exactly when the zone is empty.
    fn close(mut self) -> Option<Zone> {
        let n = self.dim;
        if self.m.iter().any(|w| w.is_unsatisfiable()) {
            return None;
        }
        loop {
            self.floyd_warshall();
            if (0..n).any(|i| self.get(i, i) < Weight::LE_ZERO) {
                return None;
            }
            let can_b: Vec<bool> = (0..n).map(|i| self.is_future(i) && self.column_free(i)).collect();
            let can_t: Vec<bool> = (0..n).map(|i| self.is_history(i) && self.row_free(i)).collect();
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || self.get(i, j) != Weight::NEG_INF {
                        continue;
                    }
                    match (can_b[i], can_t[j]) {
                        (false, false) => return None,
                        (true, false) => changed |= self.tighten(i, ZERO, Weight::NEG_INF),
                        (false, true) => changed |= self.tighten(ZERO, j, Weight::NEG_INF),
                        (true, true) => {}
                    }
                }
            }
            for x in 1..n {
                if self.get(x, ZERO) == Weight::NEG_INF {
                    for j in 0..n {
                        if j != x && !can_b[j] {
                            changed |= self.tighten(x, j, Weight::NEG_INF);
                        }
                    }
                }
                if self.get(ZERO, x) == Weight::NEG_INF {
                    for i in 0..n {
                        if i != x && !can_t[i] {
                            changed |= self.tighten(i, x, Weight::NEG_INF);
                        }
                    }
                }
            }
            for i in 0..n {
                if can_t[i] {
                    continue;
                }
                for j in 0..n {
                    if i != j && !can_b[j] {
                        changed |= self.tighten(i, j, Weight::LT_INF);
                    }
                }
            }
            if !changed {
                return Some(self);
            }
        }
    }

    /// Intersection with a conjunction of atomic constraints.
    pub fn guard(mut self, atoms: &[Atomic]) -> Option<Zone> {
        for a in atoms {
            let w = Weight::new(a.strict, a.c);
            if a.x == a.y {
                // `x - x` is 0 for finite values and `+inf` otherwise.
                if w.admits(ExtReal::PosInf) {
                    continue;
                }
                if !w.admits(ExtReal::ZERO) {
                    return None;
                }
                if a.x != ZERO {
                    self.tighten(a.x, ZERO, Weight::LT_INF);
                    self.tighten(ZERO, a.x, Weight::LT_INF);
                }
                continue;
            }
            self.tighten(a.x, a.y, w);
        }
        self.close()
    }

    pub fn reset_history(mut self, clocks: &[usize]) -> Option<Zone> {
        let n = self.dim;
        for &h in clocks {
            for j in 0..n {
                let w0j = self.get(ZERO, j);
                let wj0 = self.get(j, ZERO);
                self.set(h, j, w0j);
                self.set(j, h, wj0);
            }
            self.set(h, h, Weight::LE_ZERO);
            self.set(h, ZERO, Weight::LE_ZERO);
            self.set(ZERO, h, Weight::LE_ZERO);
        }
        self.close()
    }

    pub fn release_future(mut self, clocks: &[usize]) -> Option<Zone> {
        let n = self.dim;
        for &x in clocks {
            for j in 0..n {
                self.set(x, j, Weight::INF);
                self.set(j, x, Weight::INF);
            }
            self.set(x, x, Weight::LE_ZERO);
            self.set(x, ZERO, Weight::LE_ZERO);
        }
        self.close()
    }

    /// `Change(R)`: resets the history clocks and releases the future clocks of `R`.
    pub fn change(self, clocks: &[usize]) -> Option<Zone> {
        let (fut, hist): (Vec<usize>, Vec<usize>) = clocks.iter().partition(|&&c| self.is_future(c));
        let z = if fut.is_empty() { self } else { self.release_future(&fut)? };
        if hist.is_empty() {
            Some(z)
        } else {
            z.reset_history(&hist)
        }
    }

    /// `[sigma]`: the new value of clock `i` is the old value of `sigma[i]`.
    pub fn rename(&self, sigma: &[usize]) -> Zone {
        let n = self.dim;
        let mut m = vec![Weight::INF; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.get(sigma[i], sigma[j]);
            }
        }
        Zone { dim: n, kinds: self.kinds.clone(), m }
    }

    /// Time elapse, capped by the future-clock domain.
    pub fn elapse(mut self) -> Option<Zone> {
        for i in 1..self.dim {
            let w = self.get(i, ZERO);
            let up = match self.kind(i) {
                Some(ClockKind::Future) => {
                    if w == Weight::NEG_INF {
                        w
                    } else {
                        Weight::LE_ZERO
                    }
                }
                _ => {
                    if w == Weight::INF {
                        w
                    } else {
                        Weight::LT_INF
                    }
                }
            };
            self.set(i, ZERO, up);
        }
        self.close()
    }

    /// Exact delay by `d >= 0`; `None` if some future clock would become positive.
    pub fn delay_exact(mut self, d: Rat) -> Option<Zone> {
        let shift = |w: Weight, by: Rat| match w.c {
            ExtReal::Fin(c) => Weight::new(w.strict, ExtReal::Fin(c + by)),
            _ => w,
        };
        for i in 1..self.dim {
            let up = shift(self.get(i, ZERO), d);
            let lo = shift(self.get(ZERO, i), -d);
            self.set(i, ZERO, up);
            self.set(ZERO, i, lo);
            if self.is_future(i) {
                self.tighten(i, ZERO, Weight::LE_ZERO);
            }
        }
        self.close()
    }

    pub fn apply_step(self, step: &Step) -> Option<Zone> {
        match step {
            Step::Guard(g) => self.guard(g),
            Step::Change(r) => self.change(r),
            Step::Rename(s) => Some(self.rename(s)),
        }
    }

    pub fn apply_program_symbolic(self, prog: &[Step]) -> Option<Zone> {
        let mut z = self;
        for s in prog {
            z = z.apply_step(s)?;
        }
        Some(z)
    }

    /// `other ⊆ self`, by entrywise comparison.
    pub fn includes(&self, other: &Zone) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || other.get(i, j) <= self.get(i, j)))
    }

    pub fn can_be_minus_infinity(&self, x: usize) -> bool {
        self.is_future(x) && self.get(ZERO, x) == Weight::INF
    }

    /// Restricts to the valuations where every clock of `clocks` is `-inf`.
    pub fn force_minus_infinity(self, clocks: &[usize]) -> Option<Zone> {
        if clocks.is_empty() {
            return Some(self);
        }
        let atoms: Vec<Atomic> = clocks.iter().map(|&x| Atomic::minus_infinity(x)).collect();
        self.guard(&atoms)
    }

    /// Membership of a valuation indexed `0..=n` (entry 0 is ignored and read as 0).
    pub fn contains(&self, v: &[ExtReal]) -> bool {
        let n = self.dim;
        let val = |i: usize| if i == ZERO { ExtReal::ZERO } else { v[i] };
        for i in 1..n {
            let ok = match self.kind(i) {
                Some(ClockKind::Future) => val(i) <= ExtReal::ZERO,
                _ => val(i) >= ExtReal::ZERO,
            };
            if !ok {
                return false;
            }
        }
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).admits(val(i) - val(j))))
    }

    /// Prints the matrix, labelling rows and columns with `names[i]`.
    pub fn to_table(&self, names: &[String]) -> String {
        let n = self.dim;
        let label = |i: usize| if i == ZERO { "0".to_string() } else { names.get(i - 1).cloned().unwrap_or_else(|| format!("c{i}")) };
        let cells: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).to_string()).collect()).collect();
        let width = cells
            .iter()
            .flatten()
            .map(|s| s.len())
            .chain((0..n).map(|i| label(i).len()))
            .max()
            .unwrap_or(1);
        let mut out = format!("{:>width$}", "");
        for j in 0..n {
            out.push_str(&format!(" {:>width$}", label(j)));
        }
        out.push('\n');
        for (i, row) in cells.iter().enumerate() {
            out.push_str(&format!("{:>width$}", label(i)));
            for c in row {
                out.push_str(&format!(" {c:>width$}"));
            }
            out.push('\n');
        }
        out
    }

    /// Compact conjunction of the non-trivial constraints, for DOT labels.
    pub fn constraint_string(&self, names: &[String]) -> String {
        let n = self.dim;
        let label = |i: usize| if i == ZERO { "0".to_string() } else { names.get(i - 1).cloned().unwrap_or_else(|| format!("c{i}")) };
        let mut parts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = self.get(i, j);
                if i == j || w == Weight::INF || w == Weight::LT_INF {
                    continue;
                }
                let implied = (i != ZERO && j == ZERO && self.is_future(i) && w == Weight::LE_ZERO)
                    || (i == ZERO && self.is_history(j) && w == Weight::LE_ZERO);
                if implied {
                    continue;
                }
                let op = if w.strict { "<" } else { "<=" };
                if j == ZERO {
                    parts.push(format!("{}{op}{}", label(i), w.c));
                } else if i == ZERO {
                    parts.push(format!("-{}{op}{}", label(j), w.c));
                } else {
                    parts.push(format!("{}-{}{op}{}", label(i), label(j), w.c));
                }
            }
        }
        if parts.is_empty() {
            "true".into()
        } else {
            parts.join(" & ")
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..self.dim).map(|i| format!("c{i}")).collect();
        write!(f, "{}", self.to_table(&names))
    }
}
