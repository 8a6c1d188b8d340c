//! Deciding clause definability of point relations by separation: `R` is
//! definable in a clause class iff every weak order outside `R` is falsified
//! by some clause of the class that holds on all of `R`. It suffices to try
//! the weakest clauses false at the excluded order.

use std::collections::{BTreeSet, HashSet};

use super::clause::{Clause, ClauseSet, LlClause, SeqLit};
use crate::error::Result;
use crate::point::relation::PointRelation;
use crate::point::weak_order::{enumerate_weak_orders, WeakOrder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definable {
    Yes(ClauseSet),
    /// An excluded weak order no clause of the class separates from `R`.
    No { witness: WeakOrder },
}

impl Definable {
    pub fn clauses(&self) -> Option<&ClauseSet> {
        match self {
            Definable::Yes(cs) => Some(cs),
            Definable::No { .. } => None,
        }
    }

    pub fn is_definable(&self) -> bool {
        matches!(self, Definable::Yes(_))
    }
}

/// Pairs of slots tied in `w` (the disequality literals false at `w`).
fn ties(w: &[u8]) -> Vec<(usize, usize)> {
    let k = w.len();
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if w[a] == w[b] {
                out.push((a, b));
            }
        }
    }
    out
}

/// Candidate clauses false at an excluded order, tried against the models
/// that agree with all of `w`'s ties (the others satisfy any such clause).
type Candidates = fn(&[u8], &[(usize, usize)], &[&[u8]]) -> Option<Clause>;

fn ord_candidate(w: &[u8], tied: &[(usize, usize)], models: &[&[u8]]) -> Option<Clause> {
    let k = w.len();
    let holds = |l: &SeqLit| models.iter().all(|m| l.holds(m));
    if models.is_empty() {
        return Some(Clause::new(tied.to_vec(), vec![]));
    }
    // `a <= b` is false at w iff w(a) > w(b) and is weaker than `a = b` and
    // `a < b`; `a < b` is only needed where w ties a and b
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let lit = if w[a] > w[b] {
                SeqLit::Le(a, b)
            } else if w[a] == w[b] {
                SeqLit::Lt(a, b)
            } else {
                continue;
            };
            if holds(&lit) {
                return Some(Clause::new(tied.to_vec(), vec![lit]));
            }
        }
    }
    None
}

fn ll_candidate(w: &[u8], tied: &[(usize, usize)], models: &[&[u8]]) -> Option<Clause> {
    let k = w.len();
    let ll = |head, tail: Vec<usize>, all_equal| LlClause {
        antecedent: tied.to_vec(),
        head: Some(head),
        tail,
        all_equal,
    };
    if models.is_empty() {
        return Some(Clause::new(tied.to_vec(), vec![]));
    }
    for h in 0..k {
        let t_max: Vec<usize> = (0..k).filter(|&z| z != h && w[z] >= w[h]).collect();
        // per model: which of t_max lie below the head, and which tie with it
        let masks: Vec<(u32, u32)> = models
            .iter()
            .map(|m| {
                let (mut below, mut tie) = (0u32, 0u32);
                for (i, &z) in t_max.iter().enumerate() {
                    if m[z] < m[h] {
                        below |= 1 << i;
                    } else if m[z] == m[h] {
                        tie |= 1 << i;
                    }
                }
                (below, tie)
            })
            .collect();
        let full = (1u32 << t_max.len()) - 1;
        if masks.iter().all(|&(below, _)| below & full != 0) {
            return Some(ll(h, t_max, false).to_clause(false));
        }
        // with the all-equal disjunct some tail variable must sit above h in w
        let above: u32 = t_max
            .iter()
            .enumerate()
            .filter(|(_, &z)| w[z] > w[h])
            .fold(0, |acc, (i, _)| acc | 1 << i);
        if above == 0 {
            continue;
        }
        let mut subsets: Vec<u32> = (1..=full).filter(|t| t & above != 0).collect();
        // prefer larger tails, matching the weakest clause when it works
        subsets.sort_by_key(|t| std::cmp::Reverse(t.count_ones()));
        for t in subsets {
            if masks.iter().all(|&(below, tie)| below & t != 0 || tie & t == t) {
                let tail = t_max
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| t >> i & 1 == 1)
                    .map(|(_, &z)| z)
                    .collect();
                return Some(ll(h, tail, true).to_clause(false));
            }
        }
    }
    None
}

fn separate(r: &PointRelation, candidates: Candidates) -> Result<Definable> {
    let r = r.flatten()?;
    let k = r.arity();
    let models: Vec<WeakOrder> = r.flat_models();
    let member: HashSet<&[u8]> = models.iter().map(|m| m.ranks()).collect();
    let mut found: BTreeSet<Clause> = BTreeSet::new();
    for w in enumerate_weak_orders(k)? {
        let w = w.ranks();
        if member.contains(w) || found.iter().any(|c| !c.holds(w)) {
            continue;
        }
        let tied = ties(w);
        let relevant: Vec<&[u8]> = models
            .iter()
            .map(|m| m.ranks())
            .filter(|m| tied.iter().all(|&(a, b)| m[a] == m[b]))
            .collect();
        match candidates(w, &tied, &relevant) {
            Some(c) => {
                found.insert(c);
            }
            None => {
                return Ok(Definable::No {
                    witness: WeakOrder::from_ranks(w),
                })
            }
        }
    }
    let mut cs = ClauseSet::with_arity(k);
    cs.clauses = found.into_iter().collect();
    Ok(Definable::Yes(cs))
}

/// Reverses every rank, turning `<` into `>`.
fn mirrored(r: &PointRelation) -> Result<PointRelation> {
    let r = r.flatten()?;
    Ok(PointRelation::flat(
        r.arity(),
        r.flat_models().iter().map(|w| {
            let top = w.num_classes() as i32;
            WeakOrder::from_ranks(&w.ranks().iter().map(|&x| top - x as i32).collect::<Vec<_>>())
        }),
    ))
}

/// ORD-Horn definability of `r`.
pub fn ordhorn_definable(r: &PointRelation) -> Result<Definable> {
    if let Some(d) = by_groups(r, ordhorn_definable, false)? {
        return Ok(d);
    }
    separate(r, ord_candidate)
}

/// ll-Horn definability of `r`; with `dual`, dual-ll-Horn (every `<` of the
/// clause shape replaced by `>`).
pub fn llhorn_definable(r: &PointRelation, dual: bool) -> Result<Definable> {
    // ll classes are closed under projection, so a failed factor decides
    if let Some(d) = by_groups(r, |g| llhorn_definable(g, dual), true)? {
        return Ok(d);
    }
    if dual {
        return Ok(match separate(&mirrored(r)?, ll_candidate)? {
            Definable::Yes(cs) => Definable::Yes(cs.mirror()),
            Definable::No { witness } => Definable::No {
                witness: WeakOrder::from_ranks(
                    &witness.ranks().iter().map(|&x| -(x as i32)).collect::<Vec<_>>(),
                ),
            },
        });
    }
    separate(r, ll_candidate)
}

/// For a relation whose groups are independent (a product of per-group
/// relations), the union of per-group definitions defines the product.
/// Returns `None` when the relation is flat or not a product, and when some
/// factor is not definable unless `closed` (the class is closed under
/// projection, so the product is not definable either). `None` leaves the
/// decision to the flattened relation.
fn by_groups(
    r: &PointRelation,
    decide: impl Fn(&PointRelation) -> Result<Definable>,
    closed: bool,
) -> Result<Option<Definable>> {
    if r.is_flat() || r.is_empty() {
        return Ok(None);
    }
    let groups = r.groups().to_vec();
    let Some(factors) = r.factors() else {
        return Ok(None);
    };
    let mut cs = ClauseSet::with_arity(r.arity());
    for (i, (g, f)) in groups.iter().zip(&factors).enumerate() {
        match decide(f)? {
            Definable::Yes(part) => {
                cs.dual = part.dual;
                cs.clauses.extend(part.clauses.iter().map(|c| c.map_vars(|v| g[v])));
            }
            Definable::No { witness } if closed => {
                // the failing group takes the witness, every other group a
                // model of its factor, each group in its own band of ranks
                let mut ranks = vec![0u32; r.arity()];
                let mut band = 0;
                for (j, (h, f)) in groups.iter().zip(&factors).enumerate() {
                    let w = if i == j { witness.clone() } else { f.flat_models()[0].clone() };
                    for (v, &slot) in h.iter().enumerate() {
                        ranks[slot] = band + w.rank(v) as u32;
                    }
                    band += w.num_classes() as u32;
                }
                return Ok(Some(Definable::No {
                    witness: WeakOrder::from_ranks(&ranks),
                }));
            }
            Definable::No { .. } => return Ok(None),
        }
    }
    Ok(Some(Definable::Yes(cs.normalized())))
}
