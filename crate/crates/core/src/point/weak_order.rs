//! Weak orders (ordered set partitions) as canonical rank vectors.

use std::fmt;

use crate::domain::Rational;
use crate::error::{Error, Result};

/// Largest arity `enumerate_weak_orders` will materialize.
pub const WEAK_ORDER_CAP: usize = 10;

/// A total preorder on `k` slots, stored as ranks whose image is exactly `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakOrder {
    ranks: Vec<u8>,
}

impl WeakOrder {
    /// Canonicalizes arbitrary ranks (any values, ties meaning equality).
    pub fn from_ranks<T: Ord + Copy>(values: &[T]) -> Self {
        let mut sorted: Vec<T> = values.to_vec();
        sorted.sort();
        sorted.dedup();
        Self {
            ranks: values
                .iter()
                .map(|v| sorted.binary_search(v).unwrap() as u8)
                .collect(),
        }
    }

    pub(crate) fn from_canonical(ranks: Vec<u8>) -> Self {
        Self { ranks }
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn arity(&self) -> usize {
        self.ranks.len()
    }

    pub fn rank(&self, slot: usize) -> u8 {
        self.ranks[slot]
    }

    pub fn num_classes(&self) -> usize {
        self.ranks.iter().max().map_or(0, |m| *m as usize + 1)
    }

    /// Slots grouped by rank, lowest class first.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (slot, &r) in self.ranks.iter().enumerate() {
            out[r as usize].push(slot);
        }
        out
    }

    /// The induced weak order on the listed slots.
    pub fn restrict(&self, slots: &[usize]) -> WeakOrder {
        let picked: Vec<u8> = slots.iter().map(|&s| self.ranks[s]).collect();
        WeakOrder::from_ranks(&picked)
    }

    /// Integer realization: slot `i` gets value `rank(i)`.
    pub fn realize(&self) -> Vec<Rational> {
        self.ranks
            .iter()
            .map(|&r| Rational::from_integer(r as i64))
            .collect()
    }
}

impl fmt::Display for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", r.join(","))
    }
}

/// The weak order induced by a tuple of rationals.
pub fn weak_order_of(values: &[Rational]) -> WeakOrder {
    WeakOrder::from_ranks(values)
}

/// Outcome of visiting a partial weak order during a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    /// Keep extending this prefix.
    Descend,
    /// Skip every extension of this prefix.
    Prune,
    /// Abort the whole search.
    Stop,
}

/// Depth-first generation of every weak order on `k` slots, inserting slot `i`
/// into the order of slots `0..i` either into an existing class or as a new
/// class in one of the gaps. `visit` sees each prefix (with the number of
/// placed slots); full orders have `ranks.len() == k`. Returns `false` if
/// stopped early.
pub fn search_weak_orders(k: usize, visit: &mut impl FnMut(&[u8]) -> Visit) -> bool {
    fn go(ranks: &mut Vec<u8>, m: u8, k: usize, visit: &mut impl FnMut(&[u8]) -> Visit) -> bool {
        if ranks.len() == k {
            return true;
        }
        // join an existing class
        for c in 0..m {
            ranks.push(c);
            let ok = step(ranks, m, k, visit);
            ranks.pop();
            if !ok {
                return false;
            }
        }
        // open a new class in gap g, shifting everything at or above g
        for g in 0..=m {
            for r in ranks.iter_mut() {
                if *r >= g {
                    *r += 1;
                }
            }
            ranks.push(g);
            let ok = step(ranks, m + 1, k, visit);
            ranks.pop();
            for r in ranks.iter_mut() {
                if *r > g {
                    *r -= 1;
                }
            }
            if !ok {
                return false;
            }
        }
        true
    }
    fn step(ranks: &mut Vec<u8>, m: u8, k: usize, visit: &mut impl FnMut(&[u8]) -> Visit) -> bool {
        match visit(ranks) {
            Visit::Stop => false,
            Visit::Prune => true,
            Visit::Descend => go(ranks, m, k, visit),
        }
    }
    if k == 0 {
        return !matches!(visit(&[]), Visit::Stop);
    }
    go(&mut Vec::with_capacity(k), 0, k, visit)
}

/// Every canonical weak order on `k` slots, each exactly once, sorted.
pub fn enumerate_weak_orders(k: usize) -> Result<Vec<WeakOrder>> {
    if k > WEAK_ORDER_CAP {
        return Err(Error::CapExceeded {
            arity: k,
            cap: WEAK_ORDER_CAP,
        });
    }
    let mut out = Vec::new();
    search_weak_orders(k, &mut |r| {
        if r.len() == k {
            out.push(WeakOrder::from_canonical(r.to_vec()));
        }
        Visit::Descend
    });
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rat;

    /// Ordered Bell numbers by the recurrence a(n) = sum_k C(n,k) a(n-k).
    fn fubini(n: usize) -> u64 {
        let mut a = vec![1u64];
        for m in 1..=n {
            let mut binom = 1u64;
            let mut s = 0;
            for k in 1..=m {
                binom = binom * (m - k + 1) as u64 / k as u64;
                s += binom * a[m - k];
            }
            a.push(s);
        }
        a[n]
    }

    #[test]
    fn counts_match_ordered_bell_numbers() {
        assert_eq!(enumerate_weak_orders(1).unwrap().len(), 1);
        assert_eq!(enumerate_weak_orders(2).unwrap().len(), 3);
        assert_eq!(enumerate_weak_orders(4).unwrap().len(), 75);
        for k in 0..=7 {
            let all = enumerate_weak_orders(k).unwrap();
            assert_eq!(all.len() as u64, fubini(k), "k={k}");
            let mut dedup = all.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            assert!(all.iter().all(|w| WeakOrder::from_ranks(w.ranks()) == *w));
        }
        assert!(enumerate_weak_orders(11).is_err());
    }

    #[test]
    fn weak_order_of_examples() {
        let w = |v: &[i64]| weak_order_of(&v.iter().map(|&x| rat(x)).collect::<Vec<_>>());
        assert_eq!(w(&[0, 0, 2, 2]).ranks(), &[0, 0, 1, 1]);
        assert_eq!(w(&[-1, -1, 1, 2]).ranks(), &[0, 0, 1, 2]);
        assert_eq!(w(&[5]).ranks(), &[0]);
    }

    #[test]
    fn restriction_and_classes() {
        let w = WeakOrder::from_ranks(&[2, 0, 1, 0]);
        assert_eq!(w.classes(), vec![vec![1, 3], vec![2], vec![0]]);
        assert_eq!(w.restrict(&[0, 2]).ranks(), &[1, 0]);
    }
}
