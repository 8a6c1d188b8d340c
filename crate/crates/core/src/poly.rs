//! Preservation of point relations by the threshold operations
//!
//! ```text
//! pp(x, y)      = x if x < 0, else y
//! dual-pp(x, y) = y if x < 0, else x
//! ```
//!
//! Relations here are unions of weak-order types, and the order type of
//! `op(t1, t2)` is fixed by the joint order type of `(t1, t2)` together with
//! where `0` falls among it. Enumerating such joint realizations is therefore
//! sound and complete for preservation. Moreover only part of the joint order
//! matters: for `pp` the result mixes the negative part of `t1` with `t2`, so
//! it suffices to interleave `t1`'s negative classes with `t2`'s classes and
//! park the rest of `t1` on top; `dual-pp` symmetrically interleaves `t1`'s
//! non-negative classes with `t2` and parks the negative ones below.
//!
//! Cost for a relation with `n` models on `k` slots: at most
//! `n² · (k+1) · D(k, k)` realizations (`D` the Delannoy numbers, D(4,4) = 321,
//! D(6,6) = 8989), hence the default arity cap of 6.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::horn::{llhorn_definable, ordhorn_definable, ClauseSet};
use crate::point::relation::PointRelation;
use crate::point::weak_order::WeakOrder;

pub const POLY_ARITY_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ThresholdOp {
    #[serde(rename = "pp")]
    Pp,
    #[serde(rename = "dual-pp")]
    DualPp,
}

impl ThresholdOp {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdOp::Pp => "pp",
            ThresholdOp::DualPp => "dual-pp",
        }
    }

    /// The operation on concrete values.
    pub fn apply<T: Ord + Default + Copy>(self, x: T, y: T) -> T {
        let neg = x < T::default();
        match (self, neg) {
            (ThresholdOp::Pp, true) | (ThresholdOp::DualPp, false) => x,
            _ => y,
        }
    }
}

impl fmt::Display for ThresholdOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where `0` sits among the classes of the combined order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ZeroCut {
    /// Strictly below class `c` (and above class `c - 1`).
    Below(usize),
    /// Equal to class `c`.
    At(usize),
    /// Above every class.
    Above,
}

/// Two `k`-tuples given by one weak order on `2k` slots (first tuple, then
/// second) plus the position of zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointRealization {
    pub combined: WeakOrder,
    pub zero_cut: ZeroCut,
}

impl JointRealization {
    pub fn arity(&self) -> usize {
        self.combined.arity() / 2
    }

    pub fn first(&self) -> WeakOrder {
        self.combined.restrict(&(0..self.arity()).collect::<Vec<_>>())
    }

    pub fn second(&self) -> WeakOrder {
        let k = self.arity();
        self.combined.restrict(&(k..2 * k).collect::<Vec<_>>())
    }

    /// Sign of a combined class relative to zero.
    fn cmp_zero(&self, class: usize) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self.zero_cut {
            ZeroCut::Below(c) => if class < c { Less } else { Greater },
            ZeroCut::At(c) => class.cmp(&c),
            ZeroCut::Above => Less,
        }
    }

    /// The smallest-magnitude integers realizing the joint order with the cut:
    /// classes below zero count down from −1, classes above count up from 1.
    pub fn render(&self) -> (Vec<i64>, Vec<i64>) {
        let m = self.combined.num_classes();
        let below = (0..m).filter(|&c| self.cmp_zero(c).is_lt()).count() as i64;
        let zero_class = matches!(self.zero_cut, ZeroCut::At(_)) as i64;
        let value = |c: usize| {
            let c = c as i64;
            if c < below {
                c - below
            } else if c < below + zero_class {
                0
            } else {
                c - below - zero_class + 1
            }
        };
        let k = self.arity();
        let r = self.combined.ranks();
        (
            (0..k).map(|i| value(r[i] as usize)).collect(),
            (k..2 * k).map(|i| value(r[i] as usize)).collect(),
        )
    }
}

/// The order type of `op` applied coordinate-wise; the sign of each entry of
/// the first tuple is read from the zero cut.
pub fn apply_op(op: ThresholdOp, jr: &JointRealization) -> WeakOrder {
    let k = jr.arity();
    let r = jr.combined.ranks();
    let picked: Vec<u8> = (0..k)
        .map(|i| {
            let neg = jr.cmp_zero(r[i] as usize).is_lt();
            let take_first = neg == (op == ThresholdOp::Pp);
            if take_first { r[i] } else { r[k + i] }
        })
        .collect();
    WeakOrder::from_ranks(&picked)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub first: Vec<i64>,
    pub second: Vec<i64>,
    pub result: Vec<i64>,
    #[serde(skip)]
    pub realization: JointRealization,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = |v: &[i64]| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        write!(f, "{}, {} -> {}", t(&self.first), t(&self.second), t(&self.result))
    }
}

/// Every interleaving of two chains of classes, where a class of `a` may also
/// be merged with a class of `b`. Each interleaving gives, per class, its
/// combined position: `(pos_a, pos_b, count)`.
fn merges(a: usize, b: usize) -> Vec<(Vec<usize>, Vec<usize>, usize)> {
    fn go(i: usize, j: usize, a: usize, b: usize, pa: &mut Vec<usize>, pb: &mut Vec<usize>, pos: usize, out: &mut Vec<(Vec<usize>, Vec<usize>, usize)>) {
        if i == a && j == b {
            out.push((pa.clone(), pb.clone(), pos));
            return;
        }
        if i < a {
            pa.push(pos);
            go(i + 1, j, a, b, pa, pb, pos + 1, out);
            pa.pop();
        }
        if j < b {
            pb.push(pos);
            go(i, j + 1, a, b, pa, pb, pos + 1, out);
            pb.pop();
        }
        if i < a && j < b {
            pa.push(pos);
            pb.push(pos);
            go(i + 1, j + 1, a, b, pa, pb, pos + 1, out);
            pa.pop();
            pb.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, a, b, &mut Vec::new(), &mut Vec::new(), 0, &mut out);
    out
}

/// The canonical realizations relevant to `op` for a pair of weak orders.
fn realizations(op: ThresholdOp, t1: &WeakOrder, t2: &WeakOrder, out: &mut Vec<JointRealization>) {
    let k = t1.arity();
    let (a, b) = (t1.num_classes(), t2.num_classes());
    for neg in 0..=a {
        // classes of t1 below `neg` are negative
        let mut class1 = vec![0usize; a];
        let mut class2 = vec![0usize; b];
        match op {
            ThresholdOp::Pp => {
                for (pa, pb, n) in merges(neg, b) {
                    let top_has_neg = neg > 0 && pa.last() == Some(&(n - 1));
                    // park the non-negative classes of t1 on top, the lowest one
                    // sharing the top class when that class holds no negatives
                    let start = if n > 0 && !top_has_neg && neg < a { n - 1 } else { n };
                    class1[..neg].copy_from_slice(&pa);
                    for (i, c) in class1[neg..].iter_mut().enumerate() {
                        *c = start + i;
                    }
                    class2.copy_from_slice(&pb);
                    // zero right above the highest negative class
                    let c = if neg == 0 { 0 } else { pa[neg - 1] + 1 };
                    out.push(build(k, t1, t2, &class1, &class2, ZeroCut::Below(c)));
                }
            }
            ThresholdOp::DualPp => {
                for (pa, pb, _) in merges(a - neg, b) {
                    for i in 0..neg {
                        class1[i] = i;
                    }
                    for (i, &p) in pa.iter().enumerate() {
                        class1[neg + i] = neg + p;
                    }
                    for (j, &p) in pb.iter().enumerate() {
                        class2[j] = neg + p;
                    }
                    out.push(build(k, t1, t2, &class1, &class2, ZeroCut::Below(neg)));
                }
            }
        }
    }
}

fn build(k: usize, t1: &WeakOrder, t2: &WeakOrder, class1: &[usize], class2: &[usize], cut: ZeroCut) -> JointRealization {
    let mut ranks: Vec<usize> = (0..k).map(|i| class1[t1.rank(i) as usize]).collect();
    ranks.extend((0..k).map(|i| class2[t2.rank(i) as usize]));
    let combined = WeakOrder::from_ranks(&ranks);
    // re-express the cut over the canonical (gap-free) classes
    let zero_cut = match cut {
        ZeroCut::Below(c) => {
            let below = ranks.iter().filter(|&&r| r < c).collect::<BTreeSet<_>>().len();
            if below == combined.num_classes() { ZeroCut::Above } else { ZeroCut::Below(below) }
        }
        other => other,
    };
    JointRealization { combined, zero_cut }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Preservation {
    Preserved,
    Violated(Violation),
}

impl Preservation {
    pub fn is_preserved(&self) -> bool {
        matches!(self, Preservation::Preserved)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Preservation::Violated(v) => Some(v),
            Preservation::Preserved => None,
        }
    }
}

/// Whether `op` preserves `r`. Among all violations the reported one
/// minimizes (entries of the second tuple below zero, classes of the joint
/// order, rendered first tuple, rendered second tuple).
pub fn preserved_by(r: &PointRelation, op: ThresholdOp) -> Result<Preservation> {
    preserved_by_with_cap(r, op, POLY_ARITY_CAP)
}

pub fn preserved_by_with_cap(r: &PointRelation, op: ThresholdOp, cap: usize) -> Result<Preservation> {
    if r.arity() > cap {
        return Err(Error::CapExceeded { arity: r.arity(), cap });
    }
    let r = r.flatten()?;
    let models = r.flat_models();
    let mut best: Option<((usize, usize, Vec<i64>, Vec<i64>), Violation)> = None;
    let mut buf = Vec::new();
    for t1 in &models {
        for t2 in &models {
            buf.clear();
            realizations(op, t1, t2, &mut buf);
            for jr in buf.drain(..) {
                let w = apply_op(op, &jr);
                if r.contains(&w) {
                    continue;
                }
                let (first, second) = jr.render();
                let key = (
                    second.iter().filter(|&&x| x < 0).count(),
                    jr.combined.num_classes(),
                    first.clone(),
                    second.clone(),
                );
                if best.as_ref().is_some_and(|(b, _)| *b <= key) {
                    continue;
                }
                let result = first.iter().zip(&second).map(|(&x, &y)| op.apply(x, y)).collect();
                best = Some((key, Violation { first, second, result, realization: jr }));
            }
        }
    }
    Ok(match best {
        Some((_, v)) => Preservation::Violated(v),
        None => Preservation::Preserved,
    })
}

/// `x = y ⇒ u = v` on four slots.
pub fn implication_relation() -> PointRelation {
    PointRelation::flat(
        4,
        crate::point::enumerate_weak_orders(4)
            .unwrap()
            .into_iter()
            .filter(|w| w.rank(0) != w.rank(1) || w.rank(2) == w.rank(3)),
    )
}

fn is_implication(r: &PointRelation) -> bool {
    if r.arity() != 4 {
        return false;
    }
    let Ok(flat) = r.flatten() else { return false };
    let models = flat.flat_models();
    let imp = implication_relation();
    // any arrangement of the four slots
    let perms = permutations(4);
    perms.iter().any(|p| {
        models.len() == imp.len()
            && models.iter().all(|w| imp.contains(&w.restrict(p)))
    })
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

pub struct ReportInput {
    pub id: String,
    pub relation: PointRelation,
    /// A defining clause set, when the relation came from one.
    pub clauses: Option<ClauseSet>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub id: String,
    pub arity: usize,
    pub models: usize,
    /// Syntactic membership of the given clause set, if any.
    pub syntactic_ll_horn: Option<bool>,
    pub syntactic_ord_horn: Option<bool>,
    pub ll_horn: bool,
    pub dual_ll_horn: bool,
    pub ord_horn: bool,
    pub pp: Preservation,
    pub dual_pp: Preservation,
    /// Human-readable summary of the memberships.
    pub classes: Vec<String>,
    /// Which of the tractable classes ll-Horn, dual-ll-Horn, pp-closed and
    /// dual-pp-closed contain the relation.
    pub maximal_classes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TractabilityReport {
    pub relations: Vec<RelationReport>,
    pub tags: Vec<String>,
}

pub const TAG_NP_HARD: &str =
    "np-hard: the implication x=y=>u=v together with a relation violating both pp and dual-pp";
pub const TAG_ORD_HORN: &str = "tractable: every relation is ORD-Horn definable";
pub const TAG_LL_HORN: &str = "tractable: every relation is ll-Horn definable";
pub const TAG_DUAL_LL_HORN: &str = "tractable: every relation is dual-ll-Horn definable";

pub fn tractability_report(inputs: &[ReportInput]) -> Result<TractabilityReport> {
    let mut relations = Vec::new();
    for input in inputs {
        let r = &input.relation;
        let ll_horn = llhorn_definable(r, false)?.is_definable();
        let dual_ll_horn = llhorn_definable(r, true)?.is_definable();
        let ord_horn = ordhorn_definable(r)?.is_definable();
        let pp = preserved_by(r, ThresholdOp::Pp)?;
        let dual_pp = preserved_by(r, ThresholdOp::DualPp)?;
        let mut classes = Vec::new();
        for (yes, name) in [(ord_horn, "ORD-Horn"), (ll_horn, "ll-Horn"), (dual_ll_horn, "dual-ll-Horn")] {
            if yes {
                classes.push(name.to_string());
            }
        }
        for (p, name) in [(&pp, "pp"), (&dual_pp, "dual-pp")] {
            classes.push(format!("{} {name}", if p.is_preserved() { "preserved by" } else { "violates" }));
        }
        let maximal_classes = [
            (ll_horn, "ll-Horn"),
            (dual_ll_horn, "dual-ll-Horn"),
            (pp.is_preserved(), "pp-closed"),
            (dual_pp.is_preserved(), "dual-pp-closed"),
        ]
        .into_iter()
        .filter(|(yes, _)| *yes)
        .map(|(_, n)| n.to_string())
        .collect();
        relations.push(RelationReport {
            id: input.id.clone(),
            arity: r.arity(),
            models: r.flatten()?.len(),
            syntactic_ll_horn: input.clauses.as_ref().map(crate::horn::is_ll_horn),
            syntactic_ord_horn: input.clauses.as_ref().map(crate::horn::is_ord_horn),
            ll_horn,
            dual_ll_horn,
            ord_horn,
            pp,
            dual_pp,
            classes,
            maximal_classes,
        });
    }
    let mut tags = Vec::new();
    // the implication itself violates both operations; the rule needs a
    // second relation that does too
    let implication: Vec<bool> = inputs.iter().map(|i| is_implication(&i.relation)).collect();
    let has_implication = implication.iter().any(|&b| b);
    let doubly_violating = relations
        .iter()
        .zip(&implication)
        .any(|(r, &imp)| !imp && !r.pp.is_preserved() && !r.dual_pp.is_preserved());
    if has_implication && doubly_violating {
        tags.push(TAG_NP_HARD.to_string());
    }
    for (all, tag) in [
        (relations.iter().all(|r| r.ord_horn), TAG_ORD_HORN),
        (relations.iter().all(|r| r.ll_horn), TAG_LL_HORN),
        (relations.iter().all(|r| r.dual_ll_horn), TAG_DUAL_LL_HORN),
    ] {
        if all {
            tags.push(tag.to_string());
        }
    }
    Ok(TractabilityReport { relations, tags })
}
