use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::Rational;

/// One side of an order atom: a variable index or a rational constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Const(Rational),
}

impl Term {
    pub fn var(&self) -> Option<usize> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        }
    }

    fn map_var(self, f: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            c => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Lt,
    Le,
    Eq,
    Ne,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Eq => "=",
            Op::Ne => "!=",
        }
    }

    pub fn eval<T: Ord>(self, a: T, b: T) -> bool {
        match self {
            Op::Lt => a < b,
            Op::Le => a <= b,
            Op::Eq => a == b,
            Op::Ne => a != b,
        }
    }
}

/// `lhs op rhs` over the dense order of the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderAtom {
    pub lhs: Term,
    pub op: Op,
    pub rhs: Term,
}

impl OrderAtom {
    pub fn new(lhs: Term, op: Op, rhs: Term) -> Self {
        Self { lhs, op, rhs }
    }

    pub fn vars(a: usize, op: Op, b: usize) -> Self {
        Self::new(Term::Var(a), op, Term::Var(b))
    }

    pub fn lt(a: usize, b: usize) -> Self {
        Self::vars(a, Op::Lt, b)
    }

    pub fn le(a: usize, b: usize) -> Self {
        Self::vars(a, Op::Le, b)
    }

    pub fn eq(a: usize, b: usize) -> Self {
        Self::vars(a, Op::Eq, b)
    }

    pub fn ne(a: usize, b: usize) -> Self {
        Self::vars(a, Op::Ne, b)
    }

    /// Evaluates the atom; `value` supplies each variable's value.
    pub fn holds<T: Ord + Copy>(&self, value: impl Fn(usize) -> T, konst: impl Fn(Rational) -> T) -> bool {
        let side = |t: Term| match t {
            Term::Var(v) => value(v),
            Term::Const(c) => konst(c),
        };
        self.op.eval(side(self.lhs), side(self.rhs))
    }

    /// Evaluates a constant-free atom on a rank vector (a weak order).
    pub fn holds_on_ranks(&self, ranks: &[u8]) -> bool {
        match (self.lhs, self.rhs) {
            (Term::Var(a), Term::Var(b)) => self.op.eval(ranks[a], ranks[b]),
            _ => panic!("constant in rank evaluation"),
        }
    }

    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> OrderAtom {
        OrderAtom::new(self.lhs.map_var(&f), self.op, self.rhs.map_var(&f))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.lhs.var().into_iter().chain(self.rhs.var()).max()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        AtomDisplay { atom: self, names }
    }
}

struct AtomDisplay<'a> {
    atom: &'a OrderAtom,
    names: &'a [String],
}

impl fmt::Display for AtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |t: Term| match t {
            Term::Var(v) => self
                .names
                .get(v)
                .cloned()
                .unwrap_or_else(|| format!("v{v}")),
            Term::Const(c) => c.to_string(),
        };
        write!(
            f,
            "{} {} {}",
            term(self.atom.lhs),
            self.atom.op.symbol(),
            term(self.atom.rhs)
        )
    }
}

/// A disjunction of conjunctions of atoms.
pub type Dnf = Vec<Vec<OrderAtom>>;
