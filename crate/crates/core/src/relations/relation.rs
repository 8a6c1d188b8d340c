use std::collections::BTreeSet;
use std::fmt;

use super::basic::{BasicCode, IaBasic};
use crate::domain::Calculus;
use crate::error::{Error, Result};

/// Universe sizes up to this many basic codes are stored as a bitset.
const BITSET_LIMIT: usize = 13 * 13;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Members {
    Bits(Vec<u64>),
    Sparse(BTreeSet<usize>),
}

/// A disjunction of basic relations of one calculus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QualRelation {
    calculus: Calculus,
    members: Members,
}

pub fn universe_size(calculus: Calculus) -> usize {
    match calculus {
        Calculus::Ia => 13,
        Calculus::Ba(p) => 13usize.pow(p as u32),
        Calculus::Cdc => 8,
        Calculus::Dia => 5,
    }
}

impl QualRelation {
    pub fn empty(calculus: Calculus) -> Self {
        let n = universe_size(calculus);
        let members = if n <= BITSET_LIMIT {
            Members::Bits(vec![0; n.div_ceil(64)])
        } else {
            Members::Sparse(BTreeSet::new())
        };
        Self { calculus, members }
    }

    /// The relation holding between every pair of elements (all basics).
    pub fn full(calculus: Calculus) -> Self {
        Self::from_indices(calculus, 0..universe_size(calculus))
    }

    pub fn from_indices(calculus: Calculus, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::empty(calculus);
        for i in indices {
            r.insert_index(i);
        }
        r
    }

    pub fn new(calculus: Calculus, codes: impl IntoIterator<Item = BasicCode>) -> Result<Self> {
        let mut r = Self::empty(calculus);
        for c in codes {
            r.insert(&c)?;
        }
        Ok(r)
    }

    pub fn ia(codes: &[IaBasic]) -> Self {
        Self::from_indices(Calculus::Ia, codes.iter().map(|c| c.index()))
    }

    /// A block relation that is the product of one interval relation per axis.
    pub fn product(axes: &[QualRelation]) -> Result<Self> {
        let p = axes.len();
        if p < 2 || axes.iter().any(|a| a.calculus != Calculus::Ia) {
            return Err(Error::Unsupported(
                "products need at least two interval relations".into(),
            ));
        }
        let calculus = Calculus::Ba(p as u8);
        let mut out = Self::empty(calculus);
        let mut stack = vec![(0usize, 0usize, 1usize)];
        while let Some((axis, acc, scale)) = stack.pop() {
            if axis == p {
                out.insert_index(acc);
                continue;
            }
            for i in axes[axis].indices() {
                stack.push((axis + 1, acc + i * scale, scale * 13));
            }
        }
        Ok(out)
    }

    pub fn calculus(&self) -> Calculus {
        self.calculus
    }

    fn insert_index(&mut self, i: usize) {
        match &mut self.members {
            Members::Bits(w) => w[i / 64] |= 1 << (i % 64),
            Members::Sparse(s) => {
                s.insert(i);
            }
        }
    }

    pub fn insert(&mut self, code: &BasicCode) -> Result<()> {
        self.same_calculus(code.calculus())?;
        self.insert_index(code.index());
        Ok(())
    }

    pub fn contains_index(&self, i: usize) -> bool {
        match &self.members {
            Members::Bits(w) => w[i / 64] >> (i % 64) & 1 == 1,
            Members::Sparse(s) => s.contains(&i),
        }
    }

    pub fn contains(&self, code: &BasicCode) -> bool {
        code.calculus() == self.calculus && self.contains_index(code.index())
    }

    pub fn indices(&self) -> Vec<usize> {
        match &self.members {
            Members::Bits(w) => (0..w.len() * 64)
                .filter(|&i| w[i / 64] >> (i % 64) & 1 == 1)
                .collect(),
            Members::Sparse(s) => s.iter().copied().collect(),
        }
    }

    pub fn codes(&self) -> Vec<BasicCode> {
        self.indices()
            .into_iter()
            .map(|i| BasicCode::from_index(self.calculus, i))
            .collect()
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Bits(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            Members::Sparse(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == universe_size(self.calculus)
    }

    fn same_calculus(&self, other: Calculus) -> Result<()> {
        if self.calculus != other {
            return Err(Error::CalculusMismatch {
                left: self.calculus,
                right: other,
            });
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.same_calculus(other.calculus)?;
        Ok(Self::from_indices(
            self.calculus,
            (0..universe_size(self.calculus))
                .filter(|&i| f(self.contains_index(i), other.contains_index(i))),
        ))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if let (Members::Bits(a), Members::Bits(b)) = (&self.members, &other.members) {
            self.same_calculus(other.calculus)?;
            return Ok(Self {
                calculus: self.calculus,
                members: Members::Bits(a.iter().zip(b).map(|(x, y)| x & y).collect()),
            });
        }
        self.zip(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if let (Members::Bits(a), Members::Bits(b)) = (&self.members, &other.members) {
            self.same_calculus(other.calculus)?;
            return Ok(Self {
                calculus: self.calculus,
                members: Members::Bits(a.iter().zip(b).map(|(x, y)| x | y).collect()),
            });
        }
        self.zip(other, |a, b| a || b)
    }

    pub fn complement(&self) -> Self {
        Self::from_indices(
            self.calculus,
            (0..universe_size(self.calculus)).filter(|&i| !self.contains_index(i)),
        )
    }

    pub fn converse(&self) -> Result<Self> {
        let mut out = Self::empty(self.calculus);
        for c in self.codes() {
            out.insert(&c.converse()?)?;
        }
        Ok(out)
    }

    /// Per-axis factors when this block relation is a product of interval
    /// relations; `None` otherwise (and for non-block calculi).
    pub fn axis_factors(&self) -> Option<Vec<QualRelation>> {
        let Calculus::Ba(p) = self.calculus else {
            return None;
        };
        if self.is_empty() {
            return None;
        }
        let mut axes = vec![QualRelation::empty(Calculus::Ia); p as usize];
        for code in self.codes() {
            if let BasicCode::Ba(v) = code {
                for (i, b) in v.iter().enumerate() {
                    axes[i].insert_index(b.index());
                }
            }
        }
        let prod = QualRelation::product(&axes).ok()?;
        (prod == *self).then_some(axes)
    }
}

impl fmt::Display for QualRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for c in self.codes() {
            write!(f, " {c}")?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use IaBasic::*;

    #[test]
    fn set_operations() {
        let s = QualRelation::ia(&[S]);
        assert_eq!(s.converse().unwrap(), QualRelation::ia(&[Si]));
        assert_eq!(
            QualRelation::ia(&[S, F])
                .intersect(&QualRelation::ia(&[F, M]))
                .unwrap(),
            QualRelation::ia(&[F])
        );
        assert_eq!(
            QualRelation::empty(Calculus::Ia)
                .union(&QualRelation::ia(&[P]))
                .unwrap(),
            QualRelation::ia(&[P])
        );
        assert!(s.union(&QualRelation::full(Calculus::Cdc)).is_err());
    }

    #[test]
    fn products_and_factors() {
        let r = QualRelation::product(&[QualRelation::ia(&[S]), QualRelation::full(Calculus::Ia)])
            .unwrap();
        assert_eq!(r.len(), 13);
        let f = r.axis_factors().unwrap();
        assert_eq!(f[0], QualRelation::ia(&[S]));
        assert!(f[1].is_full());
        let mut nonprod = QualRelation::empty(Calculus::Ba(2));
        nonprod.insert(&BasicCode::Ba(vec![S, P])).unwrap();
        nonprod.insert(&BasicCode::Ba(vec![P, S])).unwrap();
        assert!(nonprod.axis_factors().is_none());
    }

    #[test]
    fn sparse_for_high_dimension() {
        let full = QualRelation::full(Calculus::Ba(3));
        assert_eq!(full.len(), 2197);
        let c = full.complement();
        assert!(c.is_empty());
        assert_eq!(full.converse().unwrap(), full);
    }
}
