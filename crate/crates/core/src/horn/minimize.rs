use super::clause::{defines, entails, split_by_groups, Clause, ClauseSet, LlClause};
use crate::error::{Error, Result};
use crate::point::relation::PointRelation;

/// Clauses obtained from `c` by dropping one disjunct of its sequent. For
/// clauses of the ll shape the disjuncts are a tail variable (its strict atom
/// and its place in the all-equal disjunct) or the all-equal disjunct itself.
pub fn shrink_options(c: &Clause, dual: bool) -> Vec<Clause> {
    if let Some(ll) = c.as_ll(dual).filter(|l| l.head.is_some()) {
        let mut out = Vec::new();
        for t in &ll.tail {
            let tail: Vec<usize> = ll.tail.iter().copied().filter(|z| z != t).collect();
            let shrunk = if tail.is_empty() {
                LlClause {
                    head: None,
                    tail,
                    all_equal: false,
                    ..ll.clone()
                }
            } else {
                LlClause { tail, ..ll.clone() }
            };
            out.push(shrunk.to_clause(dual));
        }
        if ll.all_equal && !ll.tail.is_empty() {
            out.push(
                LlClause {
                    all_equal: false,
                    ..ll.clone()
                }
                .to_clause(dual),
            );
        }
        out.retain(|x| x != c);
        return out;
    }
    (0..c.seq.len())
        .map(|i| {
            let mut seq = c.seq.clone();
            seq.remove(i);
            Clause::new(c.neq.clone(), seq)
        })
        .collect()
}

/// Whether replacing clause `i` by `replacement` (or dropping it) leaves the
/// defined relation unchanged.
fn preserves(k: usize, clauses: &[Clause], i: usize, replacement: Option<&Clause>) -> bool {
    let others: Vec<&Clause> = clauses
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, c)| c)
        .collect();
    let all: Vec<&Clause> = clauses.iter().collect();
    match replacement {
        None => entails(k, &others, &clauses[i]),
        Some(r) => {
            let mut with = others.clone();
            with.push(r);
            entails(k, &all, r) && entails(k, &with, &clauses[i])
        }
    }
}

pub fn removable_clause(cs: &ClauseSet, k: usize) -> Option<usize> {
    (0..cs.clauses.len()).find(|&i| preserves(k, &cs.clauses, i, None))
}

pub fn shrinkable_clause(cs: &ClauseSet, k: usize) -> Option<(usize, Clause)> {
    for (i, c) in cs.clauses.iter().enumerate() {
        for s in shrink_options(c, cs.dual) {
            if preserves(k, &cs.clauses, i, Some(&s)) {
                return Some((i, s));
            }
        }
    }
    None
}

/// A minimal specification equivalent to `cs`: no clause can be dropped and
/// no sequent shrunk without changing the defined relation `r`.
///
/// For a nonempty grouped relation whose clauses each stay inside one group,
/// the groups are minimized separately: premises on other groups are
/// satisfiable and share no variables, so they never help an entailment.
pub fn minimize(cs: &ClauseSet, r: &PointRelation) -> Result<ClauseSet> {
    if !defines(cs, r) {
        return Err(Error::Precondition(
            "the clause set does not define the given relation".into(),
        ));
    }
    let cs = cs.normalized();
    let Some(parts) = split_by_groups(&cs, r) else {
        return Ok(minimize_within(cs, r.arity()));
    };
    let mut out = ClauseSet {
        clauses: vec![],
        ..cs.clone()
    };
    for ((part, _), g) in parts.into_iter().zip(r.groups()) {
        let part = minimize_within(part.normalized(), g.len());
        out.clauses.extend(part.clauses.iter().map(|c| c.map_vars(|v| g[v])));
    }
    Ok(out.normalized())
}

fn minimize_within(mut out: ClauseSet, k: usize) -> ClauseSet {
    loop {
        if let Some(i) = removable_clause(&out, k) {
            out.clauses.remove(i);
            continue;
        }
        if let Some((i, s)) = shrinkable_clause(&out, k) {
            out.clauses[i] = s;
            out = out.normalized();
            continue;
        }
        return out;
    }
}
