//! Boolean combinations of unary clock constraints, flattened into
//! disjoint conjunctive guards.

use crate::automaton::{Atomic, ClockKind};
use crate::zone::Zone;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Const(bool),
    Atom(Atomic),
    Not(Box<Cond>),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

impl Cond {
    pub fn tt() -> Cond {
        Cond::Const(true)
    }

    pub fn ff() -> Cond {
        Cond::Const(false)
    }

    pub fn atom(a: Atomic) -> Cond {
        Cond::Atom(a)
    }

    pub fn all(atoms: impl IntoIterator<Item = Atomic>) -> Cond {
        Cond::And(atoms.into_iter().map(Cond::Atom).collect())
    }

    pub fn and(self, o: Cond) -> Cond {
        Cond::And(vec![self, o])
    }

    pub fn or(self, o: Cond) -> Cond {
        Cond::Or(vec![self, o])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Cond {
        Cond::Not(Box::new(self))
    }

    fn collect_atoms(&self, out: &mut Vec<Atomic>) {
        match self {
            Cond::Const(_) => {}
            Cond::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Cond::Not(c) => c.collect_atoms(out),
            Cond::And(cs) | Cond::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Value under a partial assignment of the atoms, if already determined.
    fn eval(&self, atoms: &[Atomic], val: &[Option<bool>]) -> Option<bool> {
        match self {
            Cond::Const(b) => Some(*b),
            Cond::Atom(a) => {
                let i = atoms.iter().position(|x| x == a).expect("collected atom");
                val[i]
            }
            Cond::Not(c) => c.eval(atoms, val).map(|b| !b),
            Cond::And(cs) => {
                let mut all = Some(true);
                for c in cs {
                    match c.eval(atoms, val) {
                        Some(false) => return Some(false),
                        None => all = None,
                        Some(true) => {}
                    }
                }
                all
            }
            Cond::Or(cs) => {
                let mut any = Some(false);
                for c in cs {
                    match c.eval(atoms, val) {
                        Some(true) => return Some(true),
                        None => any = None,
                        Some(false) => {}
                    }
                }
                any
            }
        }
    }

    /// Pairwise disjoint satisfiable conjunctions whose union is the
    /// condition, by Shannon expansion over its atoms. Satisfiability is
    /// checked against the clock domains.
    pub fn cubes(&self, kinds: &[ClockKind]) -> Vec<Vec<Atomic>> {
        let mut atoms = Vec::new();
        self.collect_atoms(&mut atoms);
        let mut val = vec![None; atoms.len()];
        let mut out = Vec::new();
        self.expand(kinds, &atoms, &mut val, &mut Vec::new(), &mut out);
        out
    }

    fn expand(
        &self,
        kinds: &[ClockKind],
        atoms: &[Atomic],
        val: &mut Vec<Option<bool>>,
        cube: &mut Vec<Atomic>,
        out: &mut Vec<Vec<Atomic>>,
    ) {
        match self.eval(atoms, val) {
            Some(true) => {
                out.push(cube.clone());
                return;
            }
            Some(false) => return,
            None => {}
        }
        let i = val.iter().position(|v| v.is_none()).expect("undetermined condition has a free atom");
        for b in [true, false] {
            let lit = if b { atoms[i].clone() } else { atoms[i].negate() };
            cube.push(lit);
            if Zone::from_constraints(kinds, cube).is_some() {
                val[i] = Some(b);
                self.expand(kinds, atoms, val, cube, out);
                val[i] = None;
            }
            cube.pop();
        }
    }
}
