//! Concrete domain elements of the calculi, all with exact rational coordinates.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Which calculus (or the bare point structure) a value or relation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Calculus {
    /// Allen's interval algebra.
    Ia,
    /// Block algebra of the given dimension; `Ba(2)` is the rectangle algebra.
    Ba(u8),
    /// Cardinal direction calculus on rational points of the plane.
    Cdc,
    /// The directed-interval fragment (cb=, cf=, eq=, Eq!=, e=).
    Dia,
}

impl Calculus {
    /// Number of rational coordinates ("endpoint slots") per domain element.
    pub fn slots(self) -> usize {
        match self {
            Calculus::Ia | Calculus::Cdc | Calculus::Dia => 2,
            Calculus::Ba(p) => 2 * p as usize,
        }
    }

    pub fn parse(name: &str) -> Option<Calculus> {
        match name {
            "IA" => Some(Calculus::Ia),
            "RA" => Some(Calculus::Ba(2)),
            "CDC" => Some(Calculus::Cdc),
            "DIA" => Some(Calculus::Dia),
            _ => {
                let p: u8 = name.strip_prefix("BA")?.parse().ok()?;
                (p >= 1).then_some(if p == 1 { Calculus::Ia } else { Calculus::Ba(p) })
            }
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calculus::Ia => write!(f, "IA"),
            Calculus::Ba(p) => write!(f, "BA{p}"),
            Calculus::Cdc => write!(f, "CDC"),
            Calculus::Dia => write!(f, "DIA"),
        }
    }
}

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::DegenerateInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            })
        }
    }

    pub fn from_ints(lo: i64, hi: i64) -> Result<Self> {
        Self::new(rat(lo), rat(hi))
    }

    pub fn lo(&self) -> Rational {
        self.lo
    }

    pub fn hi(&self) -> Rational {
        self.hi
    }

    pub fn shift(&self, q: Rational) -> Self {
        Self {
            lo: self.lo + q,
            hi: self.hi + q,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An axis-parallel box: one interval per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    axes: Vec<Interval>,
}

impl Block {
    pub fn new(axes: Vec<Interval>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> Interval {
        self.axes[i]
    }

    /// Shifts axis `i` by `offsets[i]`; a translation automorphism of the block algebra.
    pub fn translate(&self, offsets: &[Rational]) -> Result<Self> {
        if offsets.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: offsets.len(),
            });
        }
        Ok(Self {
            axes: self
                .axes
                .iter()
                .zip(offsets)
                .map(|(iv, q)| iv.shift(*q))
                .collect(),
        })
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub x: Rational,
    pub y: Rational,
}

impl PlanePoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(rat(x), rat(y))
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An interval with an orientation: it runs from `start` to `end`, which differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedInterval {
    start: Rational,
    end: Rational,
}

impl DirectedInterval {
    pub fn new(start: Rational, end: Rational) -> Result<Self> {
        if start == end {
            return Err(Error::DegenerateDirected(start.to_string()));
        }
        Ok(Self { start, end })
    }

    pub fn from_ints(start: i64, end: i64) -> Result<Self> {
        Self::new(rat(start), rat(end))
    }

    pub fn start(&self) -> Rational {
        self.start
    }

    pub fn end(&self) -> Rational {
        self.end
    }

    /// Whether the interval points along the axis (the `forw` predicate).
    pub fn is_forward(&self) -> bool {
        self.end > self.start
    }

    /// The same point set traversed the other way.
    pub fn reversed(&self) -> Self {
        Self {
            start: self.end,
            end: self.start,
        }
    }

    /// Image under the reflection `q -> -q` of the line.
    pub fn reflected(&self) -> Self {
        Self {
            start: -self.start,
            end: -self.end,
        }
    }
}

impl fmt::Display for DirectedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.start, self.end)
    }
}

/// Any domain element the toolkit can evaluate relations on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Rational(Rational),
    Interval(Interval),
    Block(Block),
    Point(PlanePoint),
    Directed(DirectedInterval),
}

impl Value {
    /// The element's coordinates in slot order: `lo, hi` per axis for intervals and
    /// blocks, `x, y` for points, `start, end` for directed intervals.
    pub fn slots(&self) -> Vec<Rational> {
        match self {
            Value::Rational(q) => vec![*q],
            Value::Interval(iv) => vec![iv.lo, iv.hi],
            Value::Block(b) => b.axes.iter().flat_map(|iv| [iv.lo, iv.hi]).collect(),
            Value::Point(p) => vec![p.x, p.y],
            Value::Directed(d) => vec![d.start, d.end],
        }
    }

    /// Rebuilds an element of `calculus` from its slot coordinates.
    pub fn from_slots(calculus: Calculus, slots: &[Rational]) -> Result<Value> {
        if slots.len() != calculus.slots() {
            return Err(Error::DimensionMismatch {
                expected: calculus.slots(),
                got: slots.len(),
            });
        }
        Ok(match calculus {
            Calculus::Ia => Value::Interval(Interval::new(slots[0], slots[1])?),
            Calculus::Ba(_) => Value::Block(Block::new(
                slots
                    .chunks(2)
                    .map(|c| Interval::new(c[0], c[1]))
                    .collect::<Result<_>>()?,
            )?),
            Calculus::Cdc => Value::Point(PlanePoint::new(slots[0], slots[1])),
            Calculus::Dia => Value::Directed(DirectedInterval::new(slots[0], slots[1])?),
        })
    }

    pub fn calculus(&self) -> Option<Calculus> {
        match self {
            Value::Rational(_) => None,
            Value::Interval(_) => Some(Calculus::Ia),
            Value::Block(b) => Some(if b.dim() == 1 {
                Calculus::Ia
            } else {
                Calculus::Ba(b.dim() as u8)
            }),
            Value::Point(_) => Some(Calculus::Cdc),
            Value::Directed(_) => Some(Calculus::Dia),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(q) => write!(f, "{q}"),
            Value::Interval(iv) => write!(f, "{iv}"),
            Value::Block(b) => write!(f, "{b}"),
            Value::Point(p) => write!(f, "{p}"),
            Value::Directed(d) => write!(f, "{d}"),
        }
    }
}

/// Shifts every axis of `block` by the matching offset.
pub fn apply_translation(block: &Block, offsets: &[Rational]) -> Result<Block> {
    block.translate(offsets)
}
