use std::collections::BTreeSet;

use once_cell::sync::Lazy;

use super::atom::{Dnf, OrderAtom};
use super::weak_order::{enumerate_weak_orders, weak_order_of, WeakOrder};
use crate::domain::{Calculus, Rational};
use crate::error::Result;
use crate::relations::basic::{domain_atoms, BasicCode, IaBasic};
use crate::relations::relation::QualRelation;

/// A relation over the rationals given by the order types of its tuples.
///
/// Slots are split into independent groups: a tuple belongs to the relation
/// iff the tuple of per-group weak orders is one of `models`. Relations with a
/// single group are "flat"; block-algebra relations use one group per axis,
/// since they say nothing about how different axes interleave.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointRelation {
    arity: usize,
    groups: Vec<Vec<usize>>,
    models: BTreeSet<Vec<WeakOrder>>,
}

impl PointRelation {
    pub fn flat(arity: usize, models: impl IntoIterator<Item = WeakOrder>) -> Self {
        Self {
            arity,
            groups: vec![(0..arity).collect()],
            models: models.into_iter().map(|w| vec![w]).collect(),
        }
    }

    pub fn grouped(
        arity: usize,
        groups: Vec<Vec<usize>>,
        models: impl IntoIterator<Item = Vec<WeakOrder>>,
    ) -> Self {
        Self {
            arity,
            groups,
            models: models.into_iter().collect(),
        }
    }

    /// Every weak order on `arity` slots.
    pub fn full(arity: usize) -> Result<Self> {
        Ok(Self::flat(arity, enumerate_weak_orders(arity)?))
    }

    /// Weak orders satisfying at least one conjunction of the formula.
    pub fn from_dnf(arity: usize, dnf: &Dnf) -> Result<Self> {
        Ok(Self::flat(
            arity,
            enumerate_weak_orders(arity)?
                .into_iter()
                .filter(|w| dnf_holds_on_ranks(dnf, w.ranks())),
        ))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn is_flat(&self) -> bool {
        self.groups.len() == 1
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> impl Iterator<Item = &Vec<WeakOrder>> {
        self.models.iter()
    }

    /// Models of a flat relation.
    pub fn flat_models(&self) -> Vec<WeakOrder> {
        assert!(self.is_flat(), "flat_models on a grouped relation");
        self.models.iter().map(|m| m[0].clone()).collect()
    }

    /// Membership of a tuple given by its weak order on all slots.
    pub fn contains(&self, w: &WeakOrder) -> bool {
        let key: Vec<WeakOrder> = self.groups.iter().map(|g| w.restrict(g)).collect();
        self.models.contains(&key)
    }

    /// Membership of a tuple given by any totally ordered values.
    pub fn contains_values<T: Ord + Copy>(&self, values: &[T]) -> bool {
        self.contains(&WeakOrder::from_ranks(values))
    }

    pub fn contains_rationals(&self, values: &[Rational]) -> bool {
        self.contains(&weak_order_of(values))
    }

    /// The same relation with a single group (enumerates all weak orders).
    pub fn flatten(&self) -> Result<PointRelation> {
        if self.is_flat() {
            return Ok(self.clone());
        }
        Ok(Self::flat(
            self.arity,
            enumerate_weak_orders(self.arity)?
                .into_iter()
                .filter(|w| self.contains(w)),
        ))
    }

    /// The per-group projections, when the relation is their product.
    pub fn factors(&self) -> Option<Vec<PointRelation>> {
        let mut parts: Vec<BTreeSet<WeakOrder>> = vec![BTreeSet::new(); self.groups.len()];
        for m in &self.models {
            for (i, w) in m.iter().enumerate() {
                parts[i].insert(w.clone());
            }
        }
        if parts.iter().map(|p| p.len()).product::<usize>() != self.models.len() {
            return None;
        }
        Some(
            self.groups
                .iter()
                .zip(parts)
                .map(|(g, p)| Self::flat(g.len(), p))
                .collect(),
        )
    }

    pub fn union(&self, other: &PointRelation) -> Option<PointRelation> {
        (self.arity == other.arity && self.groups == other.groups).then(|| Self {
            arity: self.arity,
            groups: self.groups.clone(),
            models: self.models.union(&other.models).cloned().collect(),
        })
    }
}

pub fn dnf_holds_on_ranks(dnf: &Dnf, ranks: &[u8]) -> bool {
    dnf.iter()
        .any(|conj| conj.iter().all(|a| a.holds_on_ranks(ranks)))
}

pub fn conj_holds_on_ranks(conj: &[OrderAtom], ranks: &[u8]) -> bool {
    conj.iter().all(|a| a.holds_on_ranks(ranks))
}

/// Model of each interval basic on the slots `(X-, X+, Y-, Y+)`.
static IA_MODELS: Lazy<Vec<WeakOrder>> = Lazy::new(|| {
    let all = enumerate_weak_orders(4).unwrap();
    IaBasic::ALL
        .iter()
        .map(|b| {
            let f = b.atoms(0, 1, 2, 3);
            let mut hits = all
                .iter()
                .filter(|w| w.ranks()[0] < w.ranks()[1] && w.ranks()[2] < w.ranks()[3])
                .filter(|w| conj_holds_on_ranks(&f, w.ranks()));
            let m = hits.next().unwrap().clone();
            assert!(hits.next().is_none());
            m
        })
        .collect()
});

/// The order-type semantics of a qualitative relation on the pair's endpoint slots.
pub fn relation_of(rel: &QualRelation) -> PointRelation {
    let calculus = rel.calculus();
    let s = calculus.slots();
    match calculus {
        Calculus::Ba(p) => {
            let groups = pair_groups(Calculus::Ba(p));
            let models = rel.codes().into_iter().map(|c| match c {
                BasicCode::Ba(v) => v.iter().map(|b| IA_MODELS[b.index()].clone()).collect(),
                _ => unreachable!(),
            });
            PointRelation::grouped(2 * s, groups, models)
        }
        _ => {
            let mut domain = domain_atoms(calculus, 0);
            domain.extend(domain_atoms(calculus, s));
            let dnf: Dnf = rel
                .codes()
                .iter()
                .flat_map(|c| c.point_formula())
                .collect();
            let groups = pair_groups(calculus);
            let models: BTreeSet<Vec<WeakOrder>> = enumerate_weak_orders(2 * s)
                .unwrap()
                .into_iter()
                .filter(|w| conj_holds_on_ranks(&domain, w.ranks()))
                .filter(|w| dnf_holds_on_ranks(&dnf, w.ranks()))
                .map(|w| groups.iter().map(|g| w.restrict(g)).collect())
                .collect();
            PointRelation::grouped(2 * s, groups, models)
        }
    }
}

/// Independent slot groups of a pair of elements: one per axis.
pub fn pair_groups(calculus: Calculus) -> Vec<Vec<usize>> {
    let s = calculus.slots();
    match calculus {
        Calculus::Ia | Calculus::Dia => vec![(0..4).collect()],
        Calculus::Cdc => vec![vec![0, 2], vec![1, 3]],
        Calculus::Ba(p) => (0..p as usize)
            .map(|i| vec![2 * i, 2 * i + 1, s + 2 * i, s + 2 * i + 1])
            .collect(),
    }
}
