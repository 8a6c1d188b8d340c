//! Solving qualitative and point instances.
//!
//! Every instance is first lowered to a problem over rational "slots" (the
//! endpoint coordinates of its variables): a conjunction of base atoms plus
//! disjunctive constraints, one alternative per basic code (per disjunct of
//! its point formula). The strategies then work on that problem.

mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::domain::{Calculus, Rational, Value};
use crate::error::{Error, Result};
use crate::horn::{ordhorn_definable, propagate, Clause, ClauseSet, Definable, SeqLit};
use crate::instance::{Instance, PointInstance, QualInstance};
use crate::interp::{lookup, translate_instance};
use crate::interp::translate::expansion;
use crate::point::atom::{Op, OrderAtom, Term};
use crate::point::relation::{relation_of, PointRelation};
use crate::point::store::ConjunctiveStore;
use crate::point::weak_order::{search_weak_orders, Visit};
use crate::relations::basic::{domain_atoms, holds};
use crate::relations::relation::QualRelation;

pub use parse::parse_instance;

/// Default slot cap of the brute-force strategy.
pub const DEFAULT_MAX_SLOTS: usize = 10;

/// Largest scope of a point constraint the ORD-Horn strategy will analyse.
const ORDHORN_SCOPE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStrategy {
    Auto,
    BruteForce,
    Backtracking,
    OrdHorn,
    /// Translate through the named catalog interpretation, then solve.
    Translate(String),
}

impl fmt::Display for SolveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStrategy::Auto => write!(f, "auto"),
            SolveStrategy::BruteForce => write!(f, "bruteforce"),
            SolveStrategy::Backtracking => write!(f, "backtracking"),
            SolveStrategy::OrdHorn => write!(f, "ordhorn"),
            SolveStrategy::Translate(name) => write!(f, "translate:{name}"),
        }
    }
}

impl FromStr for SolveStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => SolveStrategy::Auto,
            "bruteforce" => SolveStrategy::BruteForce,
            "backtracking" => SolveStrategy::Backtracking,
            "ordhorn" => SolveStrategy::OrdHorn,
            _ => match s.strip_prefix("translate:") {
                Some(name) if !name.is_empty() => SolveStrategy::Translate(name.into()),
                _ => return Err(Error::Unsupported(format!("unknown strategy `{s}`"))),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Search nodes visited (weak-order prefixes or constraint choices).
    pub nodes: u64,
    /// Clause firings of ORD-Horn propagation.
    pub firings: u64,
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub satisfiable: bool,
    /// Variable name to rendered value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
    /// The strategy that decided the instance (`auto:<chosen>` under auto).
    pub strategy: String,
    pub stats: SolveStats,
    pub seed: u64,
    pub version: String,
    /// The witness as values, in variable order.
    #[serde(skip)]
    pub assignment: Option<Vec<Value>>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub strategy: SolveStrategy,
    pub max_slots: usize,
    /// Recorded in the report; solving itself is deterministic.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            strategy: SolveStrategy::Auto,
            max_slots: DEFAULT_MAX_SLOTS,
            seed: 0,
        }
    }
}

/// An instance lowered to slots: `base` must all hold, and every entry of
/// `choices` needs one of its conjunctions to hold.
#[derive(Debug, Clone)]
struct Problem {
    n: usize,
    base: Vec<OrderAtom>,
    choices: Vec<Vec<Vec<OrderAtom>>>,
}

impl Problem {
    fn require(&mut self, alts: Vec<Vec<OrderAtom>>) {
        match alts.len() {
            1 => self.base.extend(alts.into_iter().flatten()),
            _ => self.choices.push(alts),
        }
    }
}

fn skips_full(calculus: Calculus) -> bool {
    // every pair of intervals / blocks is in some basic relation
    matches!(calculus, Calculus::Ia | Calculus::Ba(_))
}

fn qual_problem(q: &QualInstance) -> Problem {
    let s = q.calculus.slots();
    let mut p = Problem {
        n: q.vars.len() * s,
        base: vec![],
        choices: vec![],
    };
    for v in 0..q.vars.len() {
        p.base.extend(domain_atoms(q.calculus, v * s));
    }
    for &v in &q.forw {
        p.base.push(OrderAtom::lt(v * s, v * s + 1));
    }
    for (x, r, y) in &q.constraints {
        if r.is_full() && skips_full(q.calculus) {
            continue;
        }
        let slot = |i: usize| if i < s { x * s + i } else { y * s + i - s };
        let alts = r
            .codes()
            .iter()
            .flat_map(|c| c.point_formula())
            .map(|conj| conj.iter().map(|a| a.map_vars(slot)).collect())
            .collect();
        p.require(alts);
    }
    p
}

fn point_problem(pi: &PointInstance) -> Problem {
    let mut p = Problem {
        n: pi.vars.len(),
        base: vec![],
        choices: vec![],
    };
    for (&v, &q) in &pi.constants {
        p.base.push(OrderAtom::new(Term::Var(v), Op::Eq, Term::Const(q)));
    }
    for dnf in &pi.constraints {
        p.require(dnf.clone());
    }
    p
}

fn problem(inst: &Instance) -> Problem {
    match inst {
        Instance::Qual(q) => qual_problem(q),
        Instance::Point(p) => point_problem(p),
    }
}

/// Slot values to domain elements.
fn decode(inst: &Instance, slots: &[Rational]) -> Result<Vec<Value>> {
    match inst {
        Instance::Qual(q) => slots
            .chunks(q.calculus.slots())
            .map(|c| Value::from_slots(q.calculus, c))
            .collect(),
        Instance::Point(_) => Ok(slots.iter().map(|&x| Value::Rational(x)).collect()),
    }
}

/// Checks an assignment against every constraint of the instance.
pub fn verify(inst: &Instance, values: &[Value]) -> Result<bool> {
    if values.len() != inst.vars().len() {
        return Ok(false);
    }
    match inst {
        Instance::Qual(q) => {
            for (x, r, y) in &q.constraints {
                let mut any = false;
                for code in r.codes() {
                    if holds(&code, &values[*x], &values[*y])? {
                        any = true;
                        break;
                    }
                }
                if !any {
                    return Ok(false);
                }
            }
            Ok(q.forw.iter().all(|&v| match &values[v] {
                Value::Directed(d) => d.is_forward(),
                _ => false,
            }))
        }
        Instance::Point(p) => {
            let num: Vec<Rational> = values
                .iter()
                .map(|v| match v {
                    Value::Rational(x) => Ok(*x),
                    other => Err(Error::Precondition(format!("not a rational: {other}"))),
                })
                .collect::<Result<_>>()?;
            let ok = p.constants.iter().all(|(&v, &c)| num[v] == c)
                && p.constraints.iter().all(|dnf| {
                    dnf.iter()
                        .any(|conj| conj.iter().all(|a| a.holds(|v| num[v], |c| c)))
                });
            Ok(ok)
        }
    }
}

/// Outcome of a strategy before rendering.
struct Outcome {
    slots: Option<Vec<Rational>>,
    stats: SolveStats,
}

type Low = (usize, Op, usize);

/// Exhaustive search over the weak orders of each group of slots that some
/// atom connects, groups nested one inside the other. Slots in different
/// groups are never compared, so their relative order is not enumerated.
fn brute_force(p: &Problem, max_slots: usize) -> Result<Outcome> {
    let mut stats = SolveStats::default();
    if p.choices.iter().any(|c| c.is_empty()) {
        return Ok(Outcome { slots: None, stats });
    }
    // constants become extra slots placed first, in increasing order
    let mut consts: Vec<Rational> = p
        .base
        .iter()
        .chain(p.choices.iter().flatten().flatten())
        .flat_map(|a| [a.lhs, a.rhs])
        .filter_map(|t| match t {
            Term::Const(q) => Some(q),
            Term::Var(_) => None,
        })
        .collect();
    consts.sort();
    consts.dedup();
    let c = consts.len();
    let k = c + p.n;
    if k > max_slots {
        return Err(Error::CapExceeded {
            arity: k,
            cap: max_slots,
        });
    }
    let term = |t: Term| match t {
        Term::Var(v) => c + v,
        Term::Const(q) => consts.binary_search(&q).expect("collected constant"),
    };
    let lower = |a: &OrderAtom| (term(a.lhs), a.op, term(a.rhs));
    let mut constraints: Vec<Vec<Vec<Low>>> = (1..c).map(|i| vec![vec![(i - 1, Op::Lt, i)]]).collect();
    constraints.extend(p.base.iter().map(|a| vec![vec![lower(a)]]));
    constraints.extend(p.choices.iter().map(|alts| alts.iter().map(|conj| conj.iter().map(lower).collect()).collect()));

    let mut groups = UnionFind::<usize>::new(k);
    for &(a, _, b) in constraints.iter().flatten().flatten() {
        groups.union(a, b);
    }
    // slots renumbered group by group
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (groups.find(i), i));
    let mut pos = vec![0; k];
    for (i, &slot) in order.iter().enumerate() {
        pos[slot] = i;
    }
    let mut sizes: Vec<usize> = Vec::new();
    for w in 0..k {
        if w == 0 || groups.find(order[w]) != groups.find(order[w - 1]) {
            sizes.push(0);
        }
        *sizes.last_mut().expect("pushed") += 1;
    }
    for alts in constraints.iter_mut() {
        for &mut (ref mut a, _, ref mut b) in alts.iter_mut().flatten() {
            (*a, *b) = (pos[*a], pos[*b]);
        }
    }
    // insertion keeps the relative order of placed slots, so an alternative
    // is refuted as soon as one of its placed atoms fails: each constraint is
    // rechecked at every position that completes one of its atoms
    let mut touched: Vec<Vec<usize>> = vec![vec![]; k.max(1)];
    for (i, alts) in constraints.iter().enumerate() {
        let mut levels: Vec<usize> = alts.iter().flatten().map(|&(a, _, b)| a.max(b)).collect();
        levels.sort();
        levels.dedup();
        for l in levels {
            touched[l].push(i);
        }
    }
    let consistent = |r: &[u8]| {
        r.is_empty()
            || touched[r.len() - 1].iter().all(|&i| {
                constraints[i].iter().any(|conj| {
                    conj.iter()
                        .filter(|&&(a, _, b)| a < r.len() && b < r.len())
                        .all(|&(a, op, b)| op.eval(r[a], r[b]))
                })
            })
    };
    let mut ranks: Vec<u8> = Vec::with_capacity(k);
    let found = nested_search(&sizes, 0, &mut ranks, &consistent, &mut stats.nodes);
    let slots = if found {
        // realize each group as a chain of its slots, constants pinned
        let t = |i: usize| if order[i] < c { Term::Const(consts[order[i]]) } else { Term::Var(order[i] - c) };
        let mut store = ConjunctiveStore::new(p.n);
        let mut start = 0;
        for &size in &sizes {
            let mut chain: Vec<usize> = (start..start + size).collect();
            chain.sort_by_key(|&i| ranks[i]);
            for w in chain.windows(2) {
                let op = if ranks[w[0]] == ranks[w[1]] { Op::Eq } else { Op::Lt };
                store.add(OrderAtom::new(t(w[0]), op, t(w[1])));
            }
            start += size;
        }
        Some(store.witness().ok_or_else(|| {
            Error::Precondition("weak order over constants is not realizable".into())
        })?)
    } else {
        None
    };
    Ok(Outcome { slots, stats })
}

/// Searches the weak orders of group `g` (positions after `ranks`), descending
/// into the next group at every complete order. Leaves the ranks of a
/// solution in `ranks`.
fn nested_search(sizes: &[usize], g: usize, ranks: &mut Vec<u8>, consistent: &dyn Fn(&[u8]) -> bool, nodes: &mut u64) -> bool {
    let Some(&size) = sizes.get(g) else {
        return true;
    };
    let offset = ranks.len();
    let mut found = false;
    search_weak_orders(size, &mut |r| {
        *nodes += 1;
        ranks.truncate(offset);
        ranks.extend_from_slice(r);
        if !consistent(ranks) {
            return Visit::Prune;
        }
        if r.len() < size {
            return Visit::Descend;
        }
        if nested_search(sizes, g + 1, ranks, consistent, nodes) {
            found = true;
            return Visit::Stop;
        }
        Visit::Prune
    });
    if !found {
        ranks.truncate(offset);
    }
    found
}

fn backtracking(p: &Problem) -> Outcome {
    let mut stats = SolveStats::default();
    let mut store = ConjunctiveStore::new(p.n);
    store.extend(p.base.iter().copied());
    if !store.is_consistent() || p.choices.iter().any(|c| c.is_empty()) {
        return Outcome { slots: None, stats };
    }
    // fewest alternatives first, then the most connected slots, then input order
    let mut degree = vec![0usize; p.n];
    let slots_of = |alts: &Vec<Vec<OrderAtom>>| {
        let mut vs: Vec<usize> = alts
            .iter()
            .flatten()
            .flat_map(|a| [a.lhs.var(), a.rhs.var()])
            .flatten()
            .collect();
        vs.sort();
        vs.dedup();
        vs
    };
    for alts in &p.choices {
        for v in slots_of(alts) {
            degree[v] += 1;
        }
    }
    let mut order: Vec<usize> = (0..p.choices.len()).collect();
    order.sort_by_key(|&i| {
        let d: usize = slots_of(&p.choices[i]).iter().map(|&v| degree[v]).sum();
        (p.choices[i].len(), std::cmp::Reverse(d), i)
    });

    fn go(
        depth: usize,
        order: &[usize],
        choices: &[Vec<Vec<OrderAtom>>],
        store: &mut ConjunctiveStore,
        stats: &mut SolveStats,
    ) -> bool {
        let Some(&i) = order.get(depth) else {
            return true;
        };
        for conj in &choices[i] {
            stats.nodes += 1;
            let len = store.len();
            store.extend(conj.iter().copied());
            if store.is_consistent() && go(depth + 1, order, choices, store, stats) {
                return true;
            }
            store.truncate(len);
        }
        false
    }
    let sat = go(0, &order, &p.choices, &mut store, &mut stats);
    Outcome {
        slots: if sat { store.witness() } else { None },
        stats,
    }
}

fn atom_clause(a: &OrderAtom) -> Option<Clause> {
    let (Term::Var(x), Term::Var(y)) = (a.lhs, a.rhs) else {
        return None;
    };
    Some(match a.op {
        Op::Lt => Clause::atom(SeqLit::Lt(x, y)),
        Op::Le => Clause::atom(SeqLit::Le(x, y)),
        Op::Eq => Clause::atom(SeqLit::Eq(x, y)),
        Op::Ne => Clause::new(vec![(x, y)], vec![]),
    })
}

/// ORD-Horn definitions of every constraint, mapped onto the slots.
/// `cheap_only` declines relations whose analysis would flatten a large
/// non-product relation.
fn ordhorn_clauses(inst: &Instance, cheap_only: bool) -> Result<Option<ClauseSet>> {
    let inapplicable = |why: &str| Err(Error::Inapplicable(format!("ordhorn ({why})")));
    let mut cs = ClauseSet::with_arity(problem_size(inst));
    let mut add_defined = |rel: &PointRelation, scope: &dyn Fn(usize) -> usize| -> Result<bool> {
        match ordhorn_definable(rel)? {
            Definable::Yes(def) => {
                for c in &def.clauses {
                    cs.push(c.map_vars(scope))?;
                }
                Ok(true)
            }
            Definable::No { .. } => Ok(false),
        }
    };
    let mut base: Vec<OrderAtom> = Vec::new();
    match inst {
        Instance::Qual(q) => {
            let s = q.calculus.slots();
            let mut cache: HashMap<QualRelation, PointRelation> = HashMap::new();
            for (x, r, y) in &q.constraints {
                if r.is_full() && skips_full(q.calculus) {
                    continue;
                }
                let rel = cache.entry(r.clone()).or_insert_with(|| relation_of(r)).clone();
                if cheap_only && !rel.is_flat() && !is_product(&rel) && rel.arity() > 4 {
                    return Ok(None);
                }
                let slot = |i: usize| if i < s { x * s + i } else { y * s + i - s };
                if !add_defined(&rel, &slot)? {
                    return Ok(None);
                }
            }
            for v in 0..q.vars.len() {
                base.extend(domain_atoms(q.calculus, v * s));
            }
            for &v in &q.forw {
                base.push(OrderAtom::lt(v * s, v * s + 1));
            }
        }
        Instance::Point(p) => {
            let has_const = p.constraints.iter().flatten().flatten().any(|a| a.lhs.var().is_none() || a.rhs.var().is_none());
            if !p.constants.is_empty() || has_const {
                return inapplicable("constants");
            }
            for dnf in &p.constraints {
                let mut scope: Vec<usize> = dnf
                    .iter()
                    .flatten()
                    .flat_map(|a| [a.lhs.var(), a.rhs.var()])
                    .flatten()
                    .collect();
                scope.sort();
                scope.dedup();
                if scope.len() > ORDHORN_SCOPE_CAP || (cheap_only && scope.len() > 4) {
                    return Ok(None);
                }
                let local: Vec<Vec<OrderAtom>> = dnf
                    .iter()
                    .map(|conj| {
                        conj.iter()
                            .map(|a| a.map_vars(|v| scope.binary_search(&v).unwrap()))
                            .collect()
                    })
                    .collect();
                let rel = PointRelation::from_dnf(scope.len(), &local)?;
                if !add_defined(&rel, &|i| scope[i])? {
                    return Ok(None);
                }
            }
        }
    }
    for a in &base {
        cs.push(atom_clause(a).expect("variable atom"))?;
    }
    Ok(Some(cs))
}

fn is_product(r: &PointRelation) -> bool {
    let mut sizes = vec![std::collections::BTreeSet::new(); r.groups().len()];
    for m in r.models() {
        for (i, w) in m.iter().enumerate() {
            sizes[i].insert(w.clone());
        }
    }
    sizes.iter().map(|s| s.len()).product::<usize>() == r.len()
}

fn problem_size(inst: &Instance) -> usize {
    match inst {
        Instance::Qual(q) => q.vars.len() * q.calculus.slots(),
        Instance::Point(p) => p.vars.len(),
    }
}

fn ordhorn(inst: &Instance, cheap_only: bool) -> Result<Option<Outcome>> {
    let Some(cs) = ordhorn_clauses(inst, cheap_only)? else {
        return Ok(None);
    };
    let prop = propagate(&cs)?;
    Ok(Some(Outcome {
        slots: prop.witness,
        stats: SolveStats {
            nodes: 0,
            firings: prop.stats.firings as u64,
            ms: 0,
        },
    }))
}

/// Solves through `name`: translate, solve the result, map the witness back.
fn via(inst: &Instance, name: &str, opts: &SolveOptions) -> Result<(bool, Option<Vec<Value>>, SolveStats, String)> {
    let interp = lookup(name)?;
    let translated = translate_instance(inst, &interp)?;
    let inner = solve(
        &translated,
        &SolveOptions {
            strategy: SolveStrategy::Auto,
            ..opts.clone()
        },
    )?;
    let label = format!("translate:{name}/{}", inner.strategy);
    let Some(values) = inner.assignment else {
        return Ok((false, None, inner.stats, label));
    };
    let coords = expansion(inst, &interp);
    let mut out = Vec::new();
    for v in inst.vars() {
        let args: Vec<Value> = coords[v]
            .iter()
            .map(|c| {
                let i = translated
                    .vars()
                    .iter()
                    .position(|t| t == c)
                    .expect("coordinate variable");
                values[i].clone()
            })
            .collect();
        let value = interp.apply(&args).ok_or_else(|| {
            Error::Precondition(format!("witness coordinates of `{v}` lie outside the image of {name}"))
        })?;
        out.push(value);
    }
    Ok((true, Some(out), inner.stats, label))
}

/// Decides satisfiability with the requested strategy. A satisfiable report
/// carries a witness that has been checked against every constraint.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let (sat, values, mut stats, label) = match &opts.strategy {
        SolveStrategy::Translate(name) => via(inst, name, opts)?,
        strategy => {
            let (outcome, label) = match strategy {
                SolveStrategy::BruteForce => (brute_force(&problem(inst), opts.max_slots)?, "bruteforce".into()),
                SolveStrategy::Backtracking => (backtracking(&problem(inst)), "backtracking".into()),
                SolveStrategy::OrdHorn => match ordhorn(inst, false)? {
                    Some(o) => (o, "ordhorn".into()),
                    None => {
                        return Err(Error::Inapplicable(
                            "ordhorn (some constraint is not ORD-Horn definable)".into(),
                        ))
                    }
                },
                _ => match ordhorn(inst, true) {
                    Ok(Some(o)) => (o, "auto:ordhorn".into()),
                    Ok(None) | Err(Error::Inapplicable(_)) => {
                        (backtracking(&problem(inst)), "auto:backtracking".into())
                    }
                    Err(e) => return Err(e),
                },
            };
            let values = outcome.slots.as_deref().map(|s| decode(inst, s)).transpose()?;
            (values.is_some(), values, outcome.stats, label)
        }
    };
    if let Some(v) = &values {
        if !verify(inst, v)? {
            return Err(Error::Precondition(format!("{label} produced a witness that fails verification")));
        }
    }
    stats.ms = start.elapsed().as_millis() as u64;
    let witness = values.as_ref().map(|vs| {
        inst.vars()
            .iter()
            .zip(vs)
            .map(|(n, v)| (n.clone(), v.to_string()))
            .collect()
    });
    Ok(SolveReport {
        satisfiable: sat,
        witness,
        strategy: label,
        stats,
        seed: opts.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        assignment: values,
    })
}

/// Solves with the given strategy and default options otherwise.
pub fn solve_with(inst: &Instance, strategy: SolveStrategy) -> Result<SolveReport> {
    solve(
        inst,
        &SolveOptions {
            strategy,
            ..SolveOptions::default()
        },
    )
}
