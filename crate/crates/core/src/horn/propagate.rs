//! ORD-Horn satisfiability by monotone propagation.
//!
//! The store holds asserted `<`, `<=`, `=` atoms. A clause fires once every
//! disequality literal is refuted, i.e. both sides are forced equal by the
//! store (one strongly connected class of its `<=`/`=` graph); firing asserts
//! the head, or refutes the instance for a headless clause. Each clause fires
//! at most once, so there are at most `#clauses` firings.
//!
//! Completeness: at a consistent fixpoint, give each forced-equal class its
//! own value along a linearization of the store. Every fired clause has its
//! head asserted; every unfired clause has a disequality between two distinct
//! classes, which is now true.

use serde::Serialize;

use super::clause::{Clause, ClauseSet};
use crate::domain::Rational;
use crate::error::{Error, Result};
use crate::point::store::ConjunctiveStore;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropagationStats {
    pub firings: usize,
    pub rounds: usize,
    /// Propagation never revisits a choice; kept so callers can assert it.
    pub backtracks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub satisfiable: bool,
    /// One value per clause-set variable when satisfiable.
    pub witness: Option<Vec<Rational>>,
    pub stats: PropagationStats,
}

pub fn propagate(cs: &ClauseSet) -> Result<Propagation> {
    let heads: Vec<_> = cs
        .clauses
        .iter()
        .map(|c| {
            c.as_ord().ok_or_else(|| {
                Error::NotOrdHorn(c.display(&cs.vars).to_string())
            })
        })
        .collect::<Result<_>>()?;
    let mut store = ConjunctiveStore::new(cs.arity());
    let mut fired = vec![false; heads.len()];
    let mut stats = PropagationStats::default();
    let unsat = |stats| Propagation {
        satisfiable: false,
        witness: None,
        stats,
    };
    loop {
        stats.rounds += 1;
        let Some(class) = store.equality_classes() else {
            return Ok(unsat(stats));
        };
        let mut changed = false;
        for (i, h) in heads.iter().enumerate() {
            if fired[i] || h.neq.iter().any(|&(a, b)| class[a] != class[b]) {
                continue;
            }
            fired[i] = true;
            stats.firings += 1;
            match h.head {
                None => return Ok(unsat(stats)),
                Some(atom) => {
                    store.add(atom);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let witness = store.witness();
    Ok(Propagation {
        satisfiable: witness.is_some(),
        witness,
        stats,
    })
}

pub fn ordhorn_satisfiable(cs: &ClauseSet) -> Result<bool> {
    propagate(cs).map(|p| p.satisfiable)
}

/// Reference decision by search over weak orders (exponential).
pub fn brute_force_satisfiable(cs: &ClauseSet) -> bool {
    let clauses: Vec<&Clause> = cs.clauses.iter().collect();
    super::clause::find_order(cs.arity(), &clauses, &[]).is_some()
}
