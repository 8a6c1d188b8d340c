//! Primitive positive formulas over the calculi and the point structure, and
//! their exact evaluation.
//!
//! A formula is compiled to endpoint slots: free variables with an assigned
//! value become constants, the rest are existential with their domain
//! constraints. Each atom contributes a list of alternative conjunctions (one
//! for most atoms, several for disjunctive relations); a depth-first search
//! over the alternatives with an incremental consistency check decides
//! satisfiability.

use std::collections::BTreeMap;
use std::fmt;

use crate::domain::{Calculus, Value};
use crate::error::{Error, Result};
use crate::point::atom::{OrderAtom, Term};
use crate::point::store::ConjunctiveStore;
use crate::relations::basic::domain_atoms;
use crate::relations::relation::QualRelation;

/// The structure a formula is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    /// The rationals with their order.
    Order,
    /// A calculus with its basic relations; the directed calculus also carries `forw`.
    Calculus(Calculus),
}

impl Structure {
    pub fn slots(self) -> usize {
        match self {
            Structure::Order => 1,
            Structure::Calculus(c) => c.slots(),
        }
    }

    fn accepts(self, v: &Value) -> bool {
        match (self, v) {
            (Structure::Order, Value::Rational(_)) => true,
            (Structure::Calculus(c), v) => v.calculus() == Some(c),
            _ => false,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Order => write!(f, "(Q;<)"),
            Structure::Calculus(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PpAtom {
    /// `x R y` for a (possibly disjunctive) relation of the structure's calculus.
    Rel(QualRelation, String, String),
    Eq(String, String),
    /// Point-structure atoms.
    Less(String, String),
    LessEq(String, String),
    /// Directed interval points along the axis.
    Forw(String),
}

impl PpAtom {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            PpAtom::Rel(_, a, b) | PpAtom::Eq(a, b) | PpAtom::Less(a, b) | PpAtom::LessEq(a, b) => {
                vec![a, b]
            }
            PpAtom::Forw(a) => vec![a],
        }
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> PpAtom {
        match self {
            PpAtom::Rel(r, a, b) => PpAtom::Rel(r.clone(), f(a), f(b)),
            PpAtom::Eq(a, b) => PpAtom::Eq(f(a), f(b)),
            PpAtom::Less(a, b) => PpAtom::Less(f(a), f(b)),
            PpAtom::LessEq(a, b) => PpAtom::LessEq(f(a), f(b)),
            PpAtom::Forw(a) => PpAtom::Forw(f(a)),
        }
    }
}

impl fmt::Display for PpAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PpAtom::Rel(r, a, b) => {
                let codes: Vec<String> = r.codes().iter().map(|c| c.to_string()).collect();
                if codes.len() == 1 {
                    write!(f, "{a} {} {b}", codes[0])
                } else {
                    write!(f, "{a} {{{}}} {b}", codes.join(" "))
                }
            }
            PpAtom::Eq(a, b) => write!(f, "{a} = {b}"),
            PpAtom::Less(a, b) => write!(f, "{a} < {b}"),
            PpAtom::LessEq(a, b) => write!(f, "{a} <= {b}"),
            PpAtom::Forw(a) => write!(f, "forw {a}"),
        }
    }
}

/// `exists <exists> . atom_1 & ... & atom_n` with the listed free variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PpFormula {
    pub free: Vec<String>,
    pub exists: Vec<String>,
    pub atoms: Vec<PpAtom>,
}

impl PpFormula {
    pub fn new(free: &[&str], exists: &[&str], atoms: Vec<PpAtom>) -> Self {
        Self {
            free: free.iter().map(|s| s.to_string()).collect(),
            exists: exists.iter().map(|s| s.to_string()).collect(),
            atoms,
        }
    }

    /// The always-true formula on the given free variables.
    pub fn top(free: &[&str]) -> Self {
        Self::new(free, &[], vec![])
    }

    pub fn arity(&self) -> usize {
        self.free.len()
    }

    /// Conjunction; the other formula's existentials are renamed apart.
    pub fn and(&self, other: &PpFormula) -> PpFormula {
        let mut out = self.clone();
        let rename = |v: &str| {
            if other.exists.iter().any(|e| e == v) {
                format!("{v}#{}", self.exists.len() + self.atoms.len())
            } else {
                v.to_string()
            }
        };
        for e in &other.exists {
            out.exists.push(rename(e));
        }
        for v in &other.free {
            if !out.free.contains(v) {
                out.free.push(v.clone());
            }
        }
        out.atoms.extend(other.atoms.iter().map(|a| a.rename(&rename)));
        out
    }

    /// Instantiates the free variables with the given names, renaming
    /// existentials apart with `tag`.
    pub fn instantiate(&self, args: &[String], tag: &str) -> (Vec<String>, Vec<PpAtom>) {
        assert_eq!(args.len(), self.free.len(), "arity mismatch instantiating formula");
        let map: BTreeMap<&str, String> = self
            .free
            .iter()
            .map(|s| s.as_str())
            .zip(args.iter().cloned())
            .chain(
                self.exists
                    .iter()
                    .map(|e| (e.as_str(), format!("{e}@{tag}"))),
            )
            .collect();
        let f = |v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string());
        (
            self.exists.iter().map(|e| f(e)).collect(),
            self.atoms.iter().map(|a| a.rename(&f)).collect(),
        )
    }
}

impl fmt::Display for PpFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.exists.is_empty() {
            write!(f, "exists {} . ", self.exists.join(", "))?;
        }
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        let atoms: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", atoms.join(" & "))
    }
}

/// A formula compiled to alternatives of order-atom conjunctions over slots.
#[derive(Debug, Clone)]
pub struct Compiled {
    base: BTreeMap<String, usize>,
    n_slots: usize,
    fixed: Vec<OrderAtom>,
    choices: Vec<Vec<Vec<OrderAtom>>>,
}

impl Compiled {
    /// First slot of a variable; the element's slots follow consecutively.
    pub fn slot(&self, var: &str) -> Option<usize> {
        self.base.get(var).copied()
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn satisfiable(&self) -> bool {
        self.satisfiable_with(&[])
    }

    /// Satisfiability with extra atoms over the compiled slots.
    pub fn satisfiable_with(&self, extra: &[OrderAtom]) -> bool {
        let mut store = ConjunctiveStore::new(self.n_slots);
        store.extend(self.fixed.iter().copied());
        store.extend(extra.iter().copied());
        if !store.is_consistent() {
            return false;
        }
        self.search(&mut store, 0)
    }

    fn search(&self, store: &mut ConjunctiveStore, i: usize) -> bool {
        if i == self.choices.len() {
            return true;
        }
        let mark = store.len();
        for alt in &self.choices[i] {
            store.extend(alt.iter().copied());
            if store.is_consistent() && self.search(store, i + 1) {
                return true;
            }
            store.truncate(mark);
        }
        false
    }
}

/// Alternatives for `x R y` where `x` starts at slot `xb` and `y` at `yb`.
pub fn relation_alternatives(rel: &QualRelation, xb: usize, yb: usize) -> Vec<Vec<OrderAtom>> {
    let s = rel.calculus().slots();
    let map = |a: &OrderAtom| a.map_vars(|v| if v < s { xb + v } else { yb + v - s });
    if let Some(axes) = rel.axis_factors() {
        // product of per-axis disjunctions; a full axis imposes nothing
        let mut alts: Vec<Vec<OrderAtom>> = vec![vec![]];
        for (i, axis) in axes.iter().enumerate() {
            if axis.is_full() {
                continue;
            }
            let axis_alts: Vec<Vec<OrderAtom>> = axis
                .codes()
                .iter()
                .map(|c| c.point_formula()[0].clone())
                .map(|conj| {
                    conj.iter()
                        .map(|a| {
                            a.map_vars(|v| {
                                if v < 2 {
                                    xb + 2 * i + v
                                } else {
                                    yb + 2 * i + v - 2
                                }
                            })
                        })
                        .collect()
                })
                .collect();
            alts = alts
                .iter()
                .flat_map(|a| {
                    axis_alts.iter().map(move |b| {
                        let mut c = a.clone();
                        c.extend(b.iter().copied());
                        c
                    })
                })
                .collect();
        }
        return alts;
    }
    if rel.is_full() && rel.calculus() != Calculus::Dia && rel.calculus() != Calculus::Cdc {
        return vec![vec![]];
    }
    let mut alts: Vec<Vec<OrderAtom>> = rel
        .codes()
        .iter()
        .flat_map(|c| c.point_formula())
        .map(|conj| conj.iter().map(map).collect())
        .collect();
    alts.sort();
    alts.dedup();
    alts
}

/// Compiles `formula` in `structure`; free variables missing from
/// `assignment` are treated as existential.
pub fn compile(
    structure: Structure,
    formula: &PpFormula,
    assignment: &BTreeMap<String, Value>,
) -> Result<Compiled> {
    let s = structure.slots();
    let mut base = BTreeMap::new();
    let mut n_slots = 0;
    for v in formula.free.iter().chain(&formula.exists) {
        if !base.contains_key(v) {
            base.insert(v.clone(), n_slots);
            n_slots += s;
        }
    }
    let mut fixed = Vec::new();
    for (v, &b) in &base {
        match assignment.get(v).filter(|_| formula.free.contains(v)) {
            Some(val) => {
                if !structure.accepts(val) {
                    return Err(Error::StructureMismatch(format!(
                        "value {val} for `{v}` is not an element of {structure}"
                    )));
                }
                for (k, q) in val.slots().into_iter().enumerate() {
                    fixed.push(OrderAtom::new(
                        Term::Var(b + k),
                        crate::point::Op::Eq,
                        Term::Const(q),
                    ));
                }
            }
            None => {
                if let Structure::Calculus(c) = structure {
                    fixed.extend(domain_atoms(c, b));
                }
            }
        }
    }
    let slot = |v: &str| {
        base.get(v)
            .copied()
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    };
    let mut choices = Vec::new();
    for atom in &formula.atoms {
        match (atom, structure) {
            (PpAtom::Eq(a, b), _) => {
                let (a, b) = (slot(a)?, slot(b)?);
                fixed.extend((0..s).map(|k| OrderAtom::eq(a + k, b + k)));
            }
            (PpAtom::Less(a, b), Structure::Order) => fixed.push(OrderAtom::lt(slot(a)?, slot(b)?)),
            (PpAtom::LessEq(a, b), Structure::Order) => {
                fixed.push(OrderAtom::le(slot(a)?, slot(b)?))
            }
            (PpAtom::Forw(a), Structure::Calculus(Calculus::Dia)) => {
                let a = slot(a)?;
                fixed.push(OrderAtom::lt(a, a + 1));
            }
            (PpAtom::Rel(r, a, b), Structure::Calculus(c)) if r.calculus() == c => {
                let mut alts = relation_alternatives(r, slot(a)?, slot(b)?);
                if alts.len() == 1 {
                    fixed.append(&mut alts[0]);
                } else {
                    choices.push(alts);
                }
            }
            (a, _) => {
                return Err(Error::UnknownSymbol(format!("{a} in {structure}")));
            }
        }
    }
    choices.sort_by_key(|c| c.len());
    Ok(Compiled {
        base,
        n_slots,
        fixed,
        choices,
    })
}

/// Whether the formula holds in `structure` under the assignment of its free variables.
pub fn eval_pp_formula(
    structure: Structure,
    formula: &PpFormula,
    assignment: &BTreeMap<String, Value>,
) -> Result<bool> {
    for v in &formula.free {
        if !assignment.contains_key(v) {
            return Err(Error::UnboundVariable(v.clone()));
        }
    }
    Ok(compile(structure, formula, assignment)?.satisfiable())
}

/// Convenience for building assignments.
pub fn assign<'a>(pairs: impl IntoIterator<Item = (&'a str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{rat, Interval};
    use crate::relations::IaBasic::*;

    fn iv(a: i64, b: i64) -> Value {
        Value::Interval(Interval::from_ints(a, b).unwrap())
    }

    fn start_less() -> PpFormula {
        let r = |b, x: &str, y: &str| PpAtom::Rel(QualRelation::ia(&[b]), x.into(), y.into());
        PpFormula::new(
            &["X", "Y"],
            &["Y'", "W"],
            vec![r(S, "Y", "Y'"), r(S, "X", "W"), r(F, "Y'", "W")],
        )
    }

    #[test]
    fn start_point_order_formula() {
        let f = start_less();
        let half = Value::Interval(Interval::new(rat(1) / rat(2), rat(2)).unwrap());
        assert!(eval_pp_formula(
            Structure::Calculus(Calculus::Ia),
            &f,
            &assign([("X", iv(0, 1)), ("Y", half)])
        )
        .unwrap());
        assert!(!eval_pp_formula(
            Structure::Calculus(Calculus::Ia),
            &f,
            &assign([("X", iv(0, 1)), ("Y", iv(0, 2))])
        )
        .unwrap());
    }

    #[test]
    fn point_domain_formula() {
        let f = PpFormula::new(&["a", "b"], &[], vec![PpAtom::Less("a".into(), "b".into())]);
        let q = |n| Value::Rational(rat(n));
        assert!(eval_pp_formula(Structure::Order, &f, &assign([("a", q(0)), ("b", q(1))])).unwrap());
        assert!(!eval_pp_formula(Structure::Order, &f, &assign([("a", q(1)), ("b", q(1))])).unwrap());
    }

    #[test]
    fn errors() {
        let f = start_less();
        assert!(matches!(
            eval_pp_formula(Structure::Order, &f, &assign([("X", iv(0, 1)), ("Y", iv(0, 1))])),
            Err(Error::StructureMismatch(_))
        ));
        assert!(matches!(
            eval_pp_formula(Structure::Calculus(Calculus::Ia), &f, &assign([("X", iv(0, 1))])),
            Err(Error::UnboundVariable(_))
        ));
        let bad = PpFormula::new(&["a", "b"], &[], vec![PpAtom::Less("a".into(), "b".into())]);
        assert!(matches!(
            eval_pp_formula(
                Structure::Calculus(Calculus::Ia),
                &bad,
                &assign([("a", iv(0, 1)), ("b", iv(0, 1))])
            ),
            Err(Error::UnknownSymbol(_))
        ));
    }
}
