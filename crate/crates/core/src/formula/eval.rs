//! Pointwise evaluation: three-valued on finite prefixes, exact on lassos.

use super::{Formula, Lasso, TimedWord};
use crate::ext::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict3 {
    True,
    False,
    Unknown,
}

impl Verdict3 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }

    pub fn not(self) -> Self {
        match self {
            Verdict3::True => Verdict3::False,
            Verdict3::False => Verdict3::True,
            Verdict3::Unknown => Verdict3::Unknown,
        }
    }

    pub fn and(self, o: Self) -> Self {
        match (self, o) {
            (Verdict3::False, _) | (_, Verdict3::False) => Verdict3::False,
            (Verdict3::True, Verdict3::True) => Verdict3::True,
            _ => Verdict3::Unknown,
        }
    }

    pub fn or(self, o: Self) -> Self {
        self.not().and(o.not()).not()
    }

    pub fn is_determinate(self) -> bool {
        self != Verdict3::Unknown
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict3::True => Some(true),
            Verdict3::False => Some(false),
            Verdict3::Unknown => None,
        }
    }
}

/// Verdicts at every position of a finite prefix.
pub fn eval_all(w: &TimedWord, f: &Formula) -> Vec<Verdict3> {
    let n = w.len();
    match f {
        Formula::Prop(p) => w.0.iter().map(|e| Verdict3::from_bool(e.has(p))).collect(),
        Formula::Not(a) => eval_all(w, a).into_iter().map(Verdict3::not).collect(),
        Formula::And(a, b) => {
            let (x, y) = (eval_all(w, a), eval_all(w, b));
            x.into_iter().zip(y).map(|(x, y)| x.and(y)).collect()
        }
        Formula::Or(a, b) => {
            let (x, y) = (eval_all(w, a), eval_all(w, b));
            x.into_iter().zip(y).map(|(x, y)| x.or(y)).collect()
        }
        Formula::Next(iv, a) => {
            let x = eval_all(w, a);
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        Verdict3::Unknown
                    } else if iv.contains(w.0[i + 1].t - w.0[i].t) {
                        x[i + 1]
                    } else {
                        Verdict3::False
                    }
                })
                .collect()
        }
        Formula::Until(iv, a, b) => {
            let (x, y) = (eval_all(w, a), eval_all(w, b));
            (0..n)
                .map(|i| {
                    let ti = w.0[i].t;
                    let mut chain = Verdict3::True;
                    let mut acc = Verdict3::False;
                    for j in i..n {
                        let d = w.0[j].t - ti;
                        if iv.contains(d) {
                            acc = acc.or(chain.and(y[j]));
                        }
                        chain = chain.and(x[j]);
                        if chain == Verdict3::False {
                            break;
                        }
                    }
                    // A witness beyond the prefix lies at distance at least
                    // that of the last position.
                    let reachable = iv.below_upper(w.0[n - 1].t - ti);
                    if reachable {
                        acc = acc.or(chain.and(Verdict3::Unknown));
                    }
                    acc
                })
                .collect()
        }
    }
}

pub fn eval_at(w: &TimedWord, f: &Formula, i: usize) -> Verdict3 {
    assert!(i < w.len(), "position out of range");
    eval_all(w, f)[i]
}

/// Truth values at positions `0 .. prefix + cycle`; later positions repeat
/// with the cycle length.
pub fn eval_lasso_all(l: &Lasso, f: &Formula) -> Vec<bool> {
    let m = l.prefix_len();
    let len = m + l.cycle_len();
    let norm = |p: usize| if p < len { p } else { m + (p - m) % l.cycle_len() };
    match f {
        Formula::Prop(p) => (0..len).map(|i| l.at(i).0.contains(p)).collect(),
        Formula::Not(a) => eval_lasso_all(l, a).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let (x, y) = (eval_lasso_all(l, a), eval_lasso_all(l, b));
            x.into_iter().zip(y).map(|(x, y)| x && y).collect()
        }
        Formula::Or(a, b) => {
            let (x, y) = (eval_lasso_all(l, a), eval_lasso_all(l, b));
            x.into_iter().zip(y).map(|(x, y)| x || y).collect()
        }
        Formula::Next(iv, a) => {
            let x = eval_lasso_all(l, a);
            (0..len).map(|i| iv.contains(l.at(i + 1).1 - l.at(i).1) && x[norm(i + 1)]).collect()
        }
        Formula::Until(iv, a, b) => {
            let (x, y) = (eval_lasso_all(l, a), eval_lasso_all(l, b));
            (0..len)
                .map(|i| {
                    let ti = l.at(i).1;
                    let mut settled_from: Option<usize> = None;
                    let mut j = i;
                    loop {
                        let d: Rat = l.at(j).1 - ti;
                        if !iv.below_upper(d) {
                            return false;
                        }
                        if iv.contains(d) && y[norm(j)] {
                            return true;
                        }
                        if !x[norm(j)] {
                            return false;
                        }
                        if iv.is_unbounded() && j >= m && iv.above_lower(d) {
                            let s = *settled_from.get_or_insert(j);
                            // Past this point every distance is in the
                            // interval, and a full cycle has shown no witness.
                            if j >= s + l.cycle_len() {
                                return false;
                            }
                        }
                        j += 1;
                    }
                })
                .collect()
        }
    }
}

pub fn eval_lasso(l: &Lasso, f: &Formula, i: usize) -> bool {
    let m = l.prefix_len();
    let len = m + l.cycle_len();
    let p = if i < len { i } else { m + (i - m) % l.cycle_len() };
    eval_lasso_all(l, f)[p]
}
