//! Translating instances along an interpretation: every variable becomes a
//! tuple of source variables constrained by the domain formula, and every
//! constraint is replaced by its defining formula.

use std::collections::BTreeMap;

use super::interpretation::{coord, Interpretation, RelKey};
use crate::domain::Calculus;
use crate::error::{Error, Result};
use crate::instance::{Instance, PointInstance, QualInstance};
use crate::point::atom::{Op, OrderAtom, Term};
use crate::pp::{PpAtom, PpFormula, Structure};
use crate::relations::basic::{BasicCode, DiaBasic};
use crate::relations::relation::QualRelation;

enum Builder {
    Point(PointInstance),
    Qual {
        inst: QualInstance,
        merges: Vec<(usize, usize)>,
    },
}

impl Builder {
    fn var(&mut self, name: &str) -> usize {
        match self {
            Builder::Point(p) => p.add_var(name),
            Builder::Qual { inst, .. } => inst.add_var(name),
        }
    }

    /// Adds a disjunction of instantiated formulas (each a list of fresh
    /// existentials plus atoms).
    fn add(&mut self, alternatives: Vec<(Vec<String>, Vec<PpAtom>)>) -> Result<()> {
        if let Builder::Qual { .. } = self {
            if alternatives.len() > 1 {
                return Err(Error::Unsupported(
                    "disjunctive constraints translate only into the point language".into(),
                ));
            }
        }
        let mut dnf = Vec::new();
        for (fresh, atoms) in alternatives {
            for v in &fresh {
                self.var(v);
            }
            let mut conj = Vec::new();
            for atom in atoms {
                match (&mut *self, atom) {
                    (Builder::Point(p), PpAtom::Less(a, b)) => {
                        conj.push(OrderAtom::lt(p.add_var(&a), p.add_var(&b)))
                    }
                    (Builder::Point(p), PpAtom::LessEq(a, b)) => {
                        conj.push(OrderAtom::le(p.add_var(&a), p.add_var(&b)))
                    }
                    (Builder::Point(p), PpAtom::Eq(a, b)) => {
                        conj.push(OrderAtom::eq(p.add_var(&a), p.add_var(&b)))
                    }
                    (Builder::Qual { inst, .. }, PpAtom::Rel(r, a, b)) => {
                        let (a, b) = (inst.add_var(&a), inst.add_var(&b));
                        inst.constraints.push((a, r, b));
                    }
                    (Builder::Qual { inst, .. }, PpAtom::Forw(a)) => {
                        let a = inst.add_var(&a);
                        inst.forw.push(a);
                    }
                    (Builder::Qual { inst, merges }, PpAtom::Eq(a, b)) => {
                        merges.push((inst.add_var(&a), inst.add_var(&b)));
                    }
                    (_, atom) => {
                        return Err(Error::StructureMismatch(format!(
                            "atom `{atom}` does not belong to the source structure"
                        )))
                    }
                }
            }
            dnf.push(conj);
        }
        if let Builder::Point(p) = self {
            p.constraints.push(dnf);
        }
        Ok(())
    }

    fn finish(self) -> Instance {
        match self {
            Builder::Point(p) => Instance::Point(p),
            Builder::Qual { inst, merges } => Instance::Qual(merge_variables(inst, &merges)),
        }
    }
}

/// Identifies variables related by equality atoms; each class keeps its
/// first-declared name.
fn merge_variables(inst: QualInstance, merges: &[(usize, usize)]) -> QualInstance {
    if merges.is_empty() {
        return inst;
    }
    let n = inst.vars.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in merges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut new_index = vec![usize::MAX; n];
    let mut vars = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if new_index[r] == usize::MAX {
            new_index[r] = vars.len();
            vars.push(inst.vars[r].clone());
        }
        new_index[v] = new_index[r];
    }
    let mut forw: Vec<usize> = inst.forw.iter().map(|&v| new_index[v]).collect();
    forw.dedup();
    QualInstance {
        calculus: inst.calculus,
        vars,
        constraints: inst
            .constraints
            .into_iter()
            .map(|(a, r, b)| (new_index[a], r, new_index[b]))
            .collect(),
        forw,
    }
}

struct Translator<'a> {
    interp: &'a Interpretation,
    builder: Builder,
    counter: usize,
}

impl Translator<'_> {
    fn coords(&self, var: &str) -> Vec<String> {
        (1..=self.interp.dim).map(|c| coord(var, c, self.interp.dim)).collect()
    }

    fn instantiate(&mut self, phi: &PpFormula, elements: &[&str]) -> (Vec<String>, Vec<PpAtom>) {
        let args: Vec<String> = elements.iter().flat_map(|v| self.coords(v)).collect();
        self.counter += 1;
        phi.instantiate(&args, &self.counter.to_string())
    }

    fn symbol(&mut self, key: &RelKey, elements: &[&str]) -> Result<(Vec<String>, Vec<PpAtom>)> {
        let phi = self.interp.formula(key)?.clone();
        Ok(self.instantiate(&phi, elements))
    }
}

/// Translates `inst` (over the interpretation's target) into an instance over
/// the interpretation's source. The result is satisfiable iff `inst` is,
/// provided every element of the target lies in the image of the coordinate
/// map.
pub fn translate_instance(inst: &Instance, interp: &Interpretation) -> Result<Instance> {
    if inst.structure() != interp.target {
        return Err(Error::StructureMismatch(format!(
            "instance over {} cannot be translated by {}, which interprets {}",
            inst.structure(),
            interp.name,
            interp.target
        )));
    }
    let builder = match interp.source {
        Structure::Order => Builder::Point(PointInstance::default()),
        Structure::Calculus(c) => Builder::Qual {
            inst: QualInstance::new(c, &[]),
            merges: vec![],
        },
    };
    let mut t = Translator {
        interp,
        builder,
        counter: 0,
    };
    let names: Vec<String> = inst.vars().to_vec();
    for v in &names {
        for c in t.coords(v) {
            t.builder.var(&c);
        }
    }
    for v in &names {
        let domain = interp.domain.clone();
        let alt = t.instantiate(&domain, &[v]);
        t.builder.add(vec![alt])?;
    }
    match inst {
        Instance::Qual(q) => {
            for (x, r, y) in &q.constraints {
                let (x, y) = (q.vars[*x].as_str(), q.vars[*y].as_str());
                // the full relation of the interval and block algebras holds everywhere
                if r.is_full() && matches!(q.calculus, Calculus::Ia | Calculus::Ba(_)) {
                    continue;
                }
                let mut alts = Vec::new();
                for code in r.codes() {
                    alts.push(t.symbol(&RelKey::Basic(code), &[x, y])?);
                }
                if alts.is_empty() {
                    t.builder.add(vec![])?;
                    if let Builder::Qual { inst, .. } = &mut t.builder {
                        let c = inst.calculus;
                        inst.constraints.push((0, QualRelation::empty(c), 0));
                    }
                    continue;
                }
                t.builder.add(alts)?;
            }
            for &v in &q.forw {
                let alt = t.symbol(&RelKey::Forw, &[q.vars[v].as_str()])?;
                t.builder.add(vec![alt])?;
            }
        }
        Instance::Point(p) => {
            if !p.constants.is_empty() {
                return Err(Error::Unsupported("constants cannot be translated".into()));
            }
            for dnf in &p.constraints {
                let mut alts = Vec::new();
                for conj in dnf {
                    let mut fresh = Vec::new();
                    let mut atoms = Vec::new();
                    for a in conj {
                        let (Term::Var(l), Term::Var(r)) = (a.lhs, a.rhs) else {
                            return Err(Error::Unsupported(
                                "constants cannot be translated".into(),
                            ));
                        };
                        let key = match a.op {
                            Op::Lt => RelKey::Less,
                            Op::Eq => RelKey::Eq,
                            op => {
                                return Err(Error::MissingFormula {
                                    interpretation: interp.name.clone(),
                                    symbol: op.symbol().to_string(),
                                })
                            }
                        };
                        let (f, at) = t.symbol(&key, &[p.vars[l].as_str(), p.vars[r].as_str()])?;
                        fresh.extend(f);
                        atoms.extend(at);
                    }
                    alts.push((fresh, atoms));
                }
                t.builder.add(alts)?;
            }
        }
    }
    Ok(t.builder.finish())
}

/// `same(U, V) := ∃U',V' (U e= U' ∧ V e= V' ∧ U' eq= V')`: `U` and `V` point
/// the same way.
pub fn same_direction_formula() -> PpFormula {
    let atom = |b: DiaBasic, x: &str, y: &str| {
        PpAtom::Rel(
            QualRelation::from_indices(Calculus::Dia, [BasicCode::Dia(b).index()]),
            x.into(),
            y.into(),
        )
    };
    PpFormula::new(
        &["U", "V"],
        &["U'", "V'"],
        vec![
            atom(DiaBasic::EEq, "U", "U'"),
            atom(DiaBasic::EEq, "V", "V'"),
            atom(DiaBasic::EqEq, "U'", "V'"),
        ],
    )
}

/// Replaces the `forw` constraints on `X_1, …, X_m` by the chain
/// `X_1 same X_2 ∧ … ∧ X_{m-1} same X_m`, introducing the existentials of
/// `same` as fresh variables.
///
/// Equisatisfiable: a solution of the input solves the output; a solution of
/// the output has all `X_i` pointing one way, and if that way is backwards
/// the reflection `q ↦ -q` (which preserves every relation of the fragment)
/// turns it into a solution of the input.
pub fn eliminate_forw(inst: &QualInstance) -> Result<QualInstance> {
    if inst.calculus != Calculus::Dia {
        return Err(Error::CalculusMismatch {
            left: Calculus::Dia,
            right: inst.calculus,
        });
    }
    let mut out = inst.clone();
    out.forw.clear();
    let mut chain: Vec<usize> = Vec::new();
    for &v in &inst.forw {
        if !chain.contains(&v) {
            chain.push(v);
        }
    }
    let same = same_direction_formula();
    for (k, pair) in chain.windows(2).enumerate() {
        let args = [inst.vars[pair[0]].clone(), inst.vars[pair[1]].clone()];
        let (fresh, atoms) = same.instantiate(&args, &format!("same{}", k + 1));
        for f in &fresh {
            out.add_var(f);
        }
        for atom in atoms {
            let PpAtom::Rel(r, a, b) = atom else {
                unreachable!("same is a conjunction of relation atoms")
            };
            let (a, b) = (out.add_var(&a), out.add_var(&b));
            out.constraints.push((a, r, b));
        }
    }
    Ok(out)
}

/// Names of the coordinates each source variable was expanded into.
pub fn expansion(inst: &Instance, interp: &Interpretation) -> BTreeMap<String, Vec<String>> {
    inst.vars()
        .iter()
        .map(|v| {
            (
                v.clone(),
                (1..=interp.dim).map(|c| coord(v, c, interp.dim)).collect(),
            )
        })
        .collect()
}
