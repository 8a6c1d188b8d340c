use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::point::atom::{Op, OrderAtom};
use crate::point::relation::PointRelation;
use crate::point::weak_order::{enumerate_weak_orders, search_weak_orders, Visit, WeakOrder};

/// A disjunct of a clause's sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeqLit {
    Lt(usize, usize),
    Le(usize, usize),
    Eq(usize, usize),
    /// All listed variables are equal (three or more after normalization).
    AllEqual(Vec<usize>),
}

impl SeqLit {
    pub fn holds(&self, ranks: &[u8]) -> bool {
        match self {
            SeqLit::Lt(a, b) => ranks[*a] < ranks[*b],
            SeqLit::Le(a, b) => ranks[*a] <= ranks[*b],
            SeqLit::Eq(a, b) => ranks[*a] == ranks[*b],
            SeqLit::AllEqual(vs) => vs.windows(2).all(|p| ranks[p[0]] == ranks[p[1]]),
        }
    }

    pub fn vars(&self) -> Vec<usize> {
        match self {
            SeqLit::Lt(a, b) | SeqLit::Le(a, b) | SeqLit::Eq(a, b) => vec![*a, *b],
            SeqLit::AllEqual(vs) => vs.clone(),
        }
    }

    fn normalize(self) -> SeqLit {
        match self {
            SeqLit::Eq(a, b) => SeqLit::Eq(a.min(b), a.max(b)),
            SeqLit::AllEqual(mut vs) => {
                vs.sort();
                vs.dedup();
                match vs[..] {
                    [a, b] => SeqLit::Eq(a, b),
                    _ => SeqLit::AllEqual(vs),
                }
            }
            l => l,
        }
    }

    fn mirror(&self) -> SeqLit {
        match self {
            SeqLit::Lt(a, b) => SeqLit::Lt(*b, *a),
            SeqLit::Le(a, b) => SeqLit::Le(*b, *a),
            l => l.clone(),
        }
    }

    /// The literal as an order atom, when it is one.
    pub fn atom(&self) -> Option<OrderAtom> {
        match self {
            SeqLit::Lt(a, b) => Some(OrderAtom::lt(*a, *b)),
            SeqLit::Le(a, b) => Some(OrderAtom::le(*a, *b)),
            SeqLit::Eq(a, b) => Some(OrderAtom::eq(*a, *b)),
            SeqLit::AllEqual(_) => None,
        }
    }
}

/// `∨ (x_i ≠ y_i) ∨ ∨ seq`: disequalities (the negated antecedent) plus a
/// sequent. Kept in a normal form with sorted, deduplicated literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub neq: Vec<(usize, usize)>,
    pub seq: Vec<SeqLit>,
}

impl Clause {
    pub fn new(neq: Vec<(usize, usize)>, seq: Vec<SeqLit>) -> Self {
        let mut neq: Vec<(usize, usize)> = neq.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        neq.sort();
        neq.dedup();
        let mut seq: Vec<SeqLit> = seq.into_iter().map(SeqLit::normalize).collect();
        seq.sort();
        seq.dedup();
        Self { neq, seq }
    }

    pub fn atom(atom: SeqLit) -> Self {
        Self::new(vec![], vec![atom])
    }

    pub fn holds(&self, ranks: &[u8]) -> bool {
        self.neq.iter().any(|&(a, b)| ranks[a] != ranks[b]) || self.seq.iter().any(|l| l.holds(ranks))
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = self.neq.iter().flat_map(|&(a, b)| [a, b]).collect();
        out.extend(self.seq.iter().flat_map(|l| l.vars()));
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        self.vars().into_iter().next_back()
    }

    /// The clause with every order literal reversed (`a < b` becomes `b < a`).
    pub fn mirror(&self) -> Clause {
        Clause::new(self.neq.clone(), self.seq.iter().map(SeqLit::mirror).collect())
    }

    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Clause {
        let seq = self
            .seq
            .iter()
            .map(|l| match l {
                SeqLit::Lt(a, b) => SeqLit::Lt(f(*a), f(*b)),
                SeqLit::Le(a, b) => SeqLit::Le(f(*a), f(*b)),
                SeqLit::Eq(a, b) => SeqLit::Eq(f(*a), f(*b)),
                SeqLit::AllEqual(vs) => SeqLit::AllEqual(vs.iter().map(|v| f(*v)).collect()),
            })
            .collect();
        Clause::new(self.neq.iter().map(|&(a, b)| (f(a), f(b))).collect(), seq)
    }

    /// Reads the clause as an ll-Horn clause (heads on the right of every
    /// strict atom), or with `dual` as a dual-ll-Horn clause (heads on the left).
    pub fn as_ll(&self, dual: bool) -> Option<LlClause> {
        let orient = |a: usize, b: usize| if dual { (b, a) } else { (a, b) };
        let mut head: Option<usize> = None;
        let mut tail: BTreeSet<usize> = BTreeSet::new();
        let mut eq_sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut le: Option<(usize, usize)> = None;
        for l in &self.seq {
            match l {
                SeqLit::Lt(a, b) => {
                    let (t, h) = orient(*a, *b);
                    if head.is_some_and(|x| x != h) {
                        return None;
                    }
                    head = Some(h);
                    tail.insert(t);
                }
                SeqLit::Le(a, b) => le = Some(orient(*a, *b)),
                SeqLit::Eq(a, b) => eq_sets.push([*a, *b].into()),
                SeqLit::AllEqual(vs) => eq_sets.push(vs.iter().copied().collect()),
            }
        }
        let antecedent = self.neq.clone();
        if let Some((t, h)) = le {
            // `t <= h` is the pair {t < h, h = t}; it only fits when alone
            return (self.seq.len() == 1 && t != h).then(|| LlClause {
                antecedent,
                head: Some(h),
                tail: vec![t],
                all_equal: true,
            });
        }
        if eq_sets.len() > 1 {
            return None;
        }
        match (head, eq_sets.pop()) {
            (None, None) => Some(LlClause {
                antecedent,
                head: None,
                tail: vec![],
                all_equal: false,
            }),
            (Some(h), eq) => {
                if tail.contains(&h) {
                    return None;
                }
                let all_equal = match eq {
                    None => false,
                    Some(set) => {
                        let mut want = tail.clone();
                        want.insert(h);
                        if set != want {
                            return None;
                        }
                        true
                    }
                };
                Some(LlClause {
                    antecedent,
                    head: Some(h),
                    tail: tail.into_iter().collect(),
                    all_equal,
                })
            }
            (None, Some(set)) => {
                // a lone all-equal disjunct with an empty tail only if trivial
                (set.len() == 1).then(|| LlClause {
                    antecedent,
                    head: set.first().copied(),
                    tail: vec![],
                    all_equal: true,
                })
            }
        }
    }

    /// Reads the clause as ORD-Horn: at most one sequent literal, which is a
    /// single `<`, `<=` or `=` atom.
    pub fn as_ord(&self) -> Option<OrdClause> {
        match &self.seq[..] {
            [] => Some(OrdClause {
                neq: self.neq.clone(),
                head: None,
            }),
            [l] => l.atom().map(|a| OrdClause {
                neq: self.neq.clone(),
                head: Some(a),
            }),
            _ => None,
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ClauseDisplay { clause: self, names }
    }
}

/// `(x₁=y₁ ∧ … ∧ x_k=y_k) → z₁<z₀ ∨ … ∨ z_l<z₀ [∨ z₀=z₁=…=z_l]`.
///
/// A missing head means an empty sequent (`l = 0` without the all-equal
/// disjunct), i.e. the antecedent is forbidden.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LlClause {
    pub antecedent: Vec<(usize, usize)>,
    pub head: Option<usize>,
    pub tail: Vec<usize>,
    pub all_equal: bool,
}

impl LlClause {
    pub fn to_clause(&self, dual: bool) -> Clause {
        let mut seq = Vec::new();
        if let Some(h) = self.head {
            let lt = |t: usize| if dual { SeqLit::Lt(h, t) } else { SeqLit::Lt(t, h) };
            match (self.all_equal, &self.tail[..]) {
                (true, [t]) => seq.push(if dual { SeqLit::Le(h, *t) } else { SeqLit::Le(*t, h) }),
                (true, _) => {
                    seq.extend(self.tail.iter().map(|&t| lt(t)));
                    let mut all = self.tail.clone();
                    all.push(h);
                    seq.push(SeqLit::AllEqual(all));
                }
                (false, _) => seq.extend(self.tail.iter().map(|&t| lt(t))),
            }
        }
        Clause::new(self.antecedent.clone(), seq)
    }
}

/// Disequalities plus at most one `<`, `<=` or `=` head.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdClause {
    pub neq: Vec<(usize, usize)>,
    pub head: Option<OrderAtom>,
}

impl OrdClause {
    pub fn to_clause(&self) -> Clause {
        let seq = self
            .head
            .iter()
            .map(|a| {
                let (l, r) = (a.lhs.var().unwrap(), a.rhs.var().unwrap());
                match a.op {
                    Op::Lt => SeqLit::Lt(l, r),
                    Op::Le => SeqLit::Le(l, r),
                    Op::Eq => SeqLit::Eq(l, r),
                    Op::Ne => panic!("disequality head"),
                }
            })
            .collect();
        Clause::new(self.neq.clone(), seq)
    }
}

struct ClauseDisplay<'a> {
    clause: &'a Clause,
    names: &'a [String],
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |v: usize| self.names.get(v).cloned().unwrap_or_else(|| format!("v{v}"));
        let mut parts: Vec<String> = self
            .clause
            .neq
            .iter()
            .map(|&(a, b)| format!("{} != {}", n(a), n(b)))
            .collect();
        for l in &self.clause.seq {
            parts.push(match l {
                SeqLit::Lt(a, b) => format!("{} < {}", n(*a), n(*b)),
                SeqLit::Le(a, b) => format!("{} <= {}", n(*a), n(*b)),
                SeqLit::Eq(a, b) => format!("{} = {}", n(*a), n(*b)),
                SeqLit::AllEqual(vs) => vs.iter().map(|v| n(*v)).collect::<Vec<_>>().join(" = "),
            });
        }
        if parts.is_empty() {
            write!(f, "false")
        } else {
            write!(f, "{}", parts.join(" \\/ "))
        }
    }
}

/// A conjunction of clauses over named variables. `dual` selects which
/// orientation `is_ll_horn` accepts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClauseSet {
    pub vars: Vec<String>,
    pub clauses: Vec<Clause>,
    pub dual: bool,
}

impl ClauseSet {
    pub fn new(vars: &[&str]) -> Self {
        Self {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            ..Self::default()
        }
    }

    /// Default variable names `z0, z1, …`.
    pub fn with_arity(k: usize) -> Self {
        Self {
            vars: (0..k).map(|i| format!("z{i}")).collect(),
            ..Self::default()
        }
    }

    pub fn var(&mut self, name: &str) -> usize {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.vars.push(name.to_string());
                self.vars.len() - 1
            }
        }
    }

    pub fn push(&mut self, clause: Clause) -> Result<()> {
        if let Some(v) = clause.max_var() {
            if v >= self.vars.len() {
                return Err(Error::UnboundVariable(format!("v{v}")));
            }
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn holds(&self, ranks: &[u8]) -> bool {
        self.clauses.iter().all(|c| c.holds(ranks))
    }

    /// Sorted, deduplicated clauses.
    pub fn normalized(&self) -> ClauseSet {
        let set: BTreeSet<Clause> = self.clauses.iter().cloned().collect();
        ClauseSet {
            vars: self.vars.clone(),
            clauses: set.into_iter().collect(),
            dual: self.dual,
        }
    }

    pub fn mirror(&self) -> ClauseSet {
        ClauseSet {
            vars: self.vars.clone(),
            clauses: self.clauses.iter().map(Clause::mirror).collect(),
            dual: !self.dual,
        }
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", c.display(&self.vars))?;
        }
        Ok(())
    }
}

/// Every clause has the ll-Horn shape (dual-ll-Horn if `cs.dual`).
pub fn is_ll_horn(cs: &ClauseSet) -> bool {
    cs.clauses.iter().all(|c| c.as_ll(cs.dual).is_some())
}

/// Every clause has at most one non-disequality literal.
pub fn is_ord_horn(cs: &ClauseSet) -> bool {
    cs.clauses.iter().all(|c| c.as_ord().is_some())
}

/// The weak orders on `k ≥ |vars|` slots satisfying every clause.
pub fn models_of(cs: &ClauseSet, k: usize) -> Result<PointRelation> {
    if k < cs.arity() {
        return Err(Error::DimensionMismatch {
            expected: cs.arity(),
            got: k,
        });
    }
    Ok(PointRelation::flat(
        k,
        enumerate_weak_orders(k)?.into_iter().filter(|w| cs.holds(w.ranks())),
    ))
}

/// Searches for a weak order on `k` slots satisfying every clause of `holds`
/// and falsifying every clause of `fails`. Clauses are checked as soon as
/// their variables are placed.
pub fn find_order(k: usize, holds: &[&Clause], fails: &[&Clause]) -> Option<WeakOrder> {
    let due = |cs: &[&Clause]| {
        let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for (i, c) in cs.iter().enumerate() {
            by_len[c.max_var().map_or(0, |v| v + 1)].push(i);
        }
        by_len
    };
    let (due_h, due_f) = (due(holds), due(fails));
    if due_h[0].iter().any(|&i| !holds[i].holds(&[])) || due_f[0].iter().any(|&i| fails[i].holds(&[])) {
        return None;
    }
    let mut found = None;
    search_weak_orders(k, &mut |ranks| {
        let n = ranks.len();
        if due_h[n].iter().any(|&i| !holds[i].holds(ranks)) || due_f[n].iter().any(|&i| fails[i].holds(ranks)) {
            return Visit::Prune;
        }
        if n == k {
            found = Some(WeakOrder::from_ranks(ranks));
            return Visit::Stop;
        }
        Visit::Descend
    });
    found
}

/// `premises ⊨ goal` over weak orders on `k` slots.
pub fn entails(k: usize, premises: &[&Clause], goal: &Clause) -> bool {
    find_order(k, premises, &[goal]).is_none()
}

/// Whether the clause set defines exactly `r` (checked by pruned search in
/// both directions, so grouped relations need not be flattened).
pub fn defines(cs: &ClauseSet, r: &PointRelation) -> bool {
    let k = r.arity();
    if cs.arity() > k {
        return false;
    }
    if let Some(parts) = split_by_groups(cs, r) {
        return parts.iter().all(|(part, factor)| defines(part, factor));
    }
    let all: Vec<&Clause> = cs.clauses.iter().collect();
    let mut ok = true;
    search_weak_orders(k, &mut |ranks| {
        let n = ranks.len();
        // variable-free clauses are due at the first placed slot
        if all.iter().any(|c| c.max_var().map_or(1, |v| v + 1) == n && !c.holds(ranks)) {
            return Visit::Prune;
        }
        if n == k && !r.contains(&WeakOrder::from_ranks(ranks)) {
            ok = false;
            return Visit::Stop;
        }
        Visit::Descend
    });
    if !ok {
        return false;
    }
    // every clause holds on r: look for a member of r falsifying it
    for c in &cs.clauses {
        let mut bad = false;
        let due = c.max_var().map_or(0, |v| v + 1);
        search_weak_orders(k, &mut |ranks| {
            let n = ranks.len();
            if n == due.max(1) && c.holds(ranks) {
                return Visit::Prune;
            }
            if n == k && !c.holds(ranks) && r.contains(&WeakOrder::from_ranks(ranks)) {
                bad = true;
                return Visit::Stop;
            }
            Visit::Descend
        });
        if bad {
            return false;
        }
    }
    true
}

/// For a nonempty product relation whose clauses each stay inside one group:
/// the clauses of each group (renumbered) paired with that group's factor.
pub(crate) fn split_by_groups(cs: &ClauseSet, r: &PointRelation) -> Option<Vec<(ClauseSet, PointRelation)>> {
    if r.is_flat() || r.is_empty() {
        return None;
    }
    let groups = r.groups();
    let group_of = |c: &Clause| {
        let vars = c.vars();
        groups.iter().position(|g| !vars.is_empty() && vars.iter().all(|v| g.contains(v)))
    };
    let owners: Vec<usize> = cs.clauses.iter().map(group_of).collect::<Option<_>>()?;
    let factors = r.factors()?;
    Some(
        groups
            .iter()
            .zip(factors)
            .enumerate()
            .map(|(gi, (g, f))| {
                let mut part = ClauseSet::with_arity(g.len());
                part.dual = cs.dual;
                part.clauses = cs
                    .clauses
                    .iter()
                    .zip(&owners)
                    .filter(|(_, &o)| o == gi)
                    .map(|(c, _)| c.map_vars(|v| g.iter().position(|&s| s == v).expect("clause inside group")))
                    .collect();
                (part, f)
            })
            .collect(),
    )
}
