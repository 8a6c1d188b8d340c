//! Constraint instances: binary qualitative networks over a calculus, and
//! order-constraint instances over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use crate::domain::{Calculus, Rational};
use crate::point::atom::{Dnf, OrderAtom};
use crate::point::relation::PointRelation;
use crate::pp::Structure;
use crate::relations::relation::QualRelation;

/// A network `x R y` over one calculus, with optional unary `forw` constraints
/// for directed intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualInstance {
    pub calculus: Calculus,
    pub vars: Vec<String>,
    pub constraints: Vec<(usize, QualRelation, usize)>,
    pub forw: Vec<usize>,
}

impl QualInstance {
    pub fn new(calculus: Calculus, vars: &[&str]) -> Self {
        Self {
            calculus,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            constraints: vec![],
            forw: vec![],
        }
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Adds a variable (or returns the existing one of that name).
    pub fn add_var(&mut self, name: &str) -> usize {
        self.var(name).unwrap_or_else(|| {
            self.vars.push(name.to_string());
            self.vars.len() - 1
        })
    }

    pub fn constrain(&mut self, x: usize, rel: QualRelation, y: usize) -> &mut Self {
        self.constraints.push((x, rel, y));
        self
    }
}

impl fmt::Display for QualInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = match self.calculus {
            Calculus::Ba(2) => "RA".to_string(),
            c => c.to_string(),
        };
        writeln!(f, "algebra {alg}")?;
        writeln!(f, "vars {}", self.vars.join(" "))?;
        for &v in &self.forw {
            writeln!(f, "forw {}", self.vars[v])?;
        }
        for (x, r, y) in &self.constraints {
            writeln!(f, "{} {} {}", self.vars[*x], r, self.vars[*y])?;
        }
        Ok(())
    }
}

/// Order constraints over rational-valued variables. Each constraint is a
/// disjunction of conjunctions of atoms; atoms may mention constants, and
/// `constants` pins variables outright.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointInstance {
    pub vars: Vec<String>,
    pub constraints: Vec<Dnf>,
    pub constants: BTreeMap<usize, Rational>,
}

impl PointInstance {
    pub fn new(vars: &[&str]) -> Self {
        Self {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn add_var(&mut self, name: &str) -> usize {
        self.var(name).unwrap_or_else(|| {
            self.vars.push(name.to_string());
            self.vars.len() - 1
        })
    }

    /// Adds `rel` on the given scope, one disjunct per model.
    pub fn add_relation(&mut self, scope: &[usize], rel: &PointRelation) {
        self.constraints.push(relation_dnf(scope, rel));
    }

    /// Every atom of the instance, for instances without disjunction.
    pub fn conjunctive_atoms(&self) -> Option<Vec<OrderAtom>> {
        let mut out = Vec::new();
        for c in &self.constraints {
            match c.as_slice() {
                [conj] => out.extend(conj.iter().copied()),
                _ => return None,
            }
        }
        Some(out)
    }
}

/// A conjunction pinning the order type of each group of a model.
pub fn relation_dnf(scope: &[usize], rel: &PointRelation) -> Dnf {
    rel.models()
        .map(|model| {
            let mut conj = Vec::new();
            for (group, w) in rel.groups().iter().zip(model) {
                let mut by_rank: Vec<(u8, usize)> =
                    group.iter().enumerate().map(|(i, &s)| (w.rank(i), scope[s])).collect();
                by_rank.sort();
                for pair in by_rank.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    conj.push(if a.0 == b.0 {
                        OrderAtom::eq(a.1, b.1)
                    } else {
                        OrderAtom::lt(a.1, b.1)
                    });
                }
            }
            conj
        })
        .collect()
}

impl fmt::Display for PointInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra POINT")?;
        writeln!(f, "vars {}", self.vars.join(" "))?;
        for (v, q) in &self.constants {
            writeln!(f, "{} = {}", self.vars[*v], q)?;
        }
        for c in &self.constraints {
            match c.as_slice() {
                [conj] => {
                    for a in conj {
                        writeln!(f, "{}", a.display(&self.vars))?;
                    }
                }
                _ => {
                    let alts: Vec<String> = c
                        .iter()
                        .map(|conj| {
                            let atoms: Vec<String> =
                                conj.iter().map(|a| a.display(&self.vars).to_string()).collect();
                            atoms.join(" , ")
                        })
                        .collect();
                    writeln!(f, "{{ {} }}", alts.join(" | "))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Qual(QualInstance),
    Point(PointInstance),
}

impl Instance {
    pub fn structure(&self) -> Structure {
        match self {
            Instance::Qual(q) => Structure::Calculus(q.calculus),
            Instance::Point(_) => Structure::Order,
        }
    }

    pub fn vars(&self) -> &[String] {
        match self {
            Instance::Qual(q) => &q.vars,
            Instance::Point(p) => &p.vars,
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Qual(q) => q.fmt(f),
            Instance::Point(p) => p.fmt(f),
        }
    }
}
