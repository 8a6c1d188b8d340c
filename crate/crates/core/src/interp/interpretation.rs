use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::domain::Value;
use crate::error::{Error, Result};
use crate::pp::{PpAtom, PpFormula, Structure};
use crate::relations::basic::BasicCode;
use crate::relations::relation::{universe_size, QualRelation};

/// A relation symbol of a structure: a basic code, equality, the order of the
/// rationals, or the `forw` predicate of directed intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelKey {
    Basic(BasicCode),
    Eq,
    Less,
    Forw,
}

impl RelKey {
    pub fn arity(&self) -> usize {
        match self {
            RelKey::Forw => 1,
            _ => 2,
        }
    }

    /// The atom `R(args)` in the structure that owns this symbol.
    pub fn atom(&self, args: &[String]) -> PpAtom {
        match self {
            RelKey::Basic(b) => PpAtom::Rel(
                QualRelation::from_indices(b.calculus(), [b.index()]),
                args[0].clone(),
                args[1].clone(),
            ),
            RelKey::Eq => PpAtom::Eq(args[0].clone(), args[1].clone()),
            RelKey::Less => PpAtom::Less(args[0].clone(), args[1].clone()),
            RelKey::Forw => PpAtom::Forw(args[0].clone()),
        }
    }

    /// The symbol of a single atom, when it is one of the structure's own
    /// symbols (disjunctive relations are not).
    pub fn of_atom(atom: &PpAtom) -> Option<(RelKey, Vec<String>)> {
        Some(match atom {
            PpAtom::Rel(r, a, b) => {
                if r.len() != 1 {
                    return None;
                }
                (RelKey::Basic(r.codes().remove(0)), vec![a.clone(), b.clone()])
            }
            PpAtom::Eq(a, b) => (RelKey::Eq, vec![a.clone(), b.clone()]),
            PpAtom::Less(a, b) => (RelKey::Less, vec![a.clone(), b.clone()]),
            PpAtom::LessEq(..) => return None,
            PpAtom::Forw(a) => (RelKey::Forw, vec![a.clone()]),
        })
    }

    /// Every symbol of a structure.
    pub fn all(structure: Structure) -> Vec<RelKey> {
        match structure {
            Structure::Order => vec![RelKey::Less, RelKey::Eq],
            Structure::Calculus(c) => {
                let mut keys: Vec<RelKey> = (0..universe_size(c))
                    .map(|i| RelKey::Basic(BasicCode::from_index(c, i)))
                    .collect();
                keys.push(RelKey::Eq);
                if c == crate::domain::Calculus::Dia {
                    keys.push(RelKey::Forw);
                }
                keys
            }
        }
    }
}

impl fmt::Display for RelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelKey::Basic(b) => write!(f, "{b}"),
            RelKey::Eq => write!(f, "="),
            RelKey::Less => write!(f, "<"),
            RelKey::Forw => write!(f, "forw"),
        }
    }
}

/// The coordinate map `g`: a partial function from `k` source elements to a
/// target element, `None` outside its domain.
pub type CoordMap = Arc<dyn Fn(&[Value]) -> Option<Value> + Send + Sync>;

/// An interpretation `(k, δ, g)` of `target` in `source`.
///
/// The domain formula has free variables standing for the `k` source
/// elements; a relation formula for a symbol of arity `a` has `a·k` free
/// variables, element by element.
#[derive(Clone)]
pub struct Interpretation {
    pub name: String,
    pub source: Structure,
    pub target: Structure,
    pub dim: usize,
    pub domain: PpFormula,
    pub relations: BTreeMap<RelKey, PpFormula>,
    pub map: CoordMap,
    /// Caveats on the definition (e.g. a domain admitting degenerate elements).
    pub warnings: Vec<String>,
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Interpretation")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("dim", &self.dim)
            .field("domain", &self.domain.to_string())
            .field("relations", &self.relations.len())
            .finish()
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} in {}, dimension {}",
            self.name, self.target, self.source, self.dim
        )?;
        writeln!(f, "  domain({}) := {}", self.domain.free.join(", "), self.domain)?;
        for (k, phi) in &self.relations {
            writeln!(f, "  {k}({}) := {phi}", phi.free.join(", "))?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

impl Interpretation {
    pub fn formula(&self, key: &RelKey) -> Result<&PpFormula> {
        self.relations
            .get(key)
            .ok_or_else(|| Error::MissingFormula {
                interpretation: self.name.clone(),
                symbol: key.to_string(),
            })
    }

    /// Applies the coordinate map.
    pub fn apply(&self, args: &[Value]) -> Option<Value> {
        if args.len() != self.dim {
            return None;
        }
        (self.map)(args)
    }

    /// The identity interpretation of a structure.
    pub fn identity(structure: Structure) -> Interpretation {
        let relations = RelKey::all(structure)
            .into_iter()
            .map(|k| {
                let names: Vec<String> = (1..=k.arity()).map(|i| format!("x{i}")).collect();
                let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                let atom = k.atom(&names);
                (k, PpFormula::new(&refs, &[], vec![atom]))
            })
            .collect();
        Interpretation {
            name: format!("id.{structure}"),
            source: structure,
            target: structure,
            dim: 1,
            domain: PpFormula::top(&["x"]),
            relations,
            map: Arc::new(|a: &[Value]| Some(a[0].clone())),
            warnings: vec![],
        }
    }
}

/// Name of coordinate `c` (1-based) of the element named `v`.
pub fn coord(v: &str, c: usize, dim: usize) -> String {
    if dim == 1 {
        v.to_string()
    } else {
        format!("{v}.{c}")
    }
}

/// Rewrites `phi` (over `J.source`) by replacing every element variable with
/// its coordinates and every atom with its definition under the given
/// per-variable interpretation. Existential elements get the domain formula of
/// their interpretation.
fn substitute(
    phi: &PpFormula,
    interp_of: &impl Fn(&str) -> Result<Interpretation>,
    free: Vec<String>,
    counter: &mut usize,
) -> Result<PpFormula> {
    let mut out = PpFormula {
        free,
        exists: vec![],
        atoms: vec![],
    };
    for e in &phi.exists {
        let ie = interp_of(e)?;
        let coords: Vec<String> = (1..=ie.dim).map(|c| coord(e, c, ie.dim)).collect();
        out.exists.extend(coords.iter().cloned());
        *counter += 1;
        let (ex, atoms) = ie.domain.instantiate(&coords, &counter.to_string());
        out.exists.extend(ex);
        out.atoms.extend(atoms);
    }
    for atom in &phi.atoms {
        let (key, args) = RelKey::of_atom(atom).ok_or_else(|| {
            Error::Unsupported(format!("atom `{atom}` is not a single symbol"))
        })?;
        let interps: Vec<Interpretation> =
            args.iter().map(|a| interp_of(a)).collect::<Result<_>>()?;
        let first = &interps[0];
        if interps.iter().any(|i| i.name != first.name) {
            return Err(Error::StructureMismatch(format!(
                "atom `{atom}` mixes coordinates of different interpretations; \
                 a homotopy witness is needed"
            )));
        }
        let def = first.formula(&key)?;
        let coords: Vec<String> = args
            .iter()
            .flat_map(|a| (1..=first.dim).map(move |c| coord(a, c, first.dim)))
            .collect();
        *counter += 1;
        let (ex, atoms) = def.instantiate(&coords, &counter.to_string());
        out.exists.extend(ex);
        out.atoms.extend(atoms);
    }
    Ok(out)
}

/// Position of each element variable of a formula over `J.source`: free
/// variable `i` of a symbol of arity `a` is coordinate `i mod J.dim`.
fn positions(phi: &PpFormula, dim: usize) -> BTreeMap<String, usize> {
    phi.free
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i % dim))
        .collect()
}

/// `J ∘ (I_1, …, I_j)`.
///
/// When all `I_i` coincide the result is built by substitution. Otherwise a
/// homotopy witness `θ(z, x̄)` over the common base structure is required
/// (the composed map then lands back in the base): the domain becomes
/// `∃z θ(z, x̄)` and each symbol `R` becomes `∃z̄ (R(z̄) ∧ ⋀ θ(z_l, x̄_l))`.
pub fn compose(
    j: &Interpretation,
    is: &[Interpretation],
    witness: Option<&PpFormula>,
) -> Result<Interpretation> {
    if is.len() != j.dim {
        return Err(Error::DimensionMismatch {
            expected: j.dim,
            got: is.len(),
        });
    }
    let first = &is[0];
    for i in is {
        if i.target != j.source {
            return Err(Error::StructureMismatch(format!(
                "{} interprets {}, but {} needs {}",
                i.name, i.target, j.name, j.source
            )));
        }
        if i.source != first.source {
            return Err(Error::StructureMismatch(format!(
                "{} and {} have different base structures",
                i.name, first.name
            )));
        }
        if i.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                got: i.dim,
            });
        }
    }
    let (i_dim, total) = (first.dim, first.dim * j.dim);
    let names: Vec<&str> = is.iter().map(|i| i.name.as_str()).collect();
    let name = format!("{}∘({})", j.name, names.join(","));

    let maps: Vec<CoordMap> = is.iter().map(|i| i.map.clone()).collect();
    let outer = j.map.clone();
    let map: CoordMap = Arc::new(move |xs: &[Value]| {
        let inner: Option<Vec<Value>> = maps
            .iter()
            .enumerate()
            .map(|(l, g)| g(&xs[l * i_dim..(l + 1) * i_dim]))
            .collect();
        outer(&inner?)
    });

    // element variable `v` of a formula over J.source becomes `v.1 … v.i`;
    // its coordinates over the base come from its position's interpretation
    let expand = |phi: &PpFormula, counter: &mut usize| -> Result<PpFormula> {
        let pos = positions(phi, j.dim);
        let free: Vec<String> = phi
            .free
            .iter()
            .flat_map(|v| (1..=i_dim).map(move |c| coord(v, c, i_dim)))
            .collect();
        let interp_of = |v: &str| -> Result<Interpretation> {
            match pos.get(v) {
                Some(&p) => Ok(is[p].clone()),
                // existentials are only supported when all I_i coincide
                None if is.iter().all(|i| i.name == first.name) => Ok(first.clone()),
                None => Err(Error::StructureMismatch(format!(
                    "existential `{v}` has no fixed interpretation"
                ))),
            }
        };
        substitute(phi, &interp_of, free, counter)
    };

    let mut counter = 0;
    let homogeneous = is.iter().all(|i| i.name == first.name);
    let (domain, relations) = if homogeneous || witness.is_none() {
        let mut domain = expand(&j.domain, &mut counter)?;
        // δ_1(x_1) ∧ … ∧ δ_j(x_j)
        for (l, v) in j.domain.free.iter().enumerate() {
            let coords: Vec<String> = (1..=i_dim).map(|c| coord(v, c, i_dim)).collect();
            counter += 1;
            let (ex, atoms) = is[l].domain.instantiate(&coords, &counter.to_string());
            domain.exists.extend(ex);
            domain.atoms.extend(atoms);
        }
        let mut relations = BTreeMap::new();
        for (key, phi) in &j.relations {
            relations.insert(key.clone(), expand(phi, &mut counter)?);
        }
        (domain, relations)
    } else {
        let theta = witness.expect("checked above");
        if first.source != j.target {
            return Err(Error::StructureMismatch(format!(
                "a homotopy witness needs {} to interpret {}",
                name, first.source
            )));
        }
        if theta.arity() != total + 1 {
            return Err(Error::DimensionMismatch {
                expected: total + 1,
                got: theta.arity(),
            });
        }
        let xs = |tag: &str| -> Vec<String> { (1..=total).map(|c| format!("{tag}.{c}")).collect() };
        let with_theta = |z: &str, x: &[String], counter: &mut usize| {
            let mut args = vec![z.to_string()];
            args.extend(x.iter().cloned());
            *counter += 1;
            theta.instantiate(&args, &counter.to_string())
        };
        let x0 = xs("x");
        let (ex, atoms) = with_theta("z", &x0, &mut counter);
        let refs: Vec<&str> = x0.iter().map(|s| s.as_str()).collect();
        let mut domain = PpFormula::new(&refs, &["z"], atoms);
        domain.exists.extend(ex);
        let mut relations = BTreeMap::new();
        for key in RelKey::all(first.source) {
            let tags: Vec<String> = (1..=key.arity()).map(|l| format!("x{l}")).collect();
            let zs: Vec<String> = (1..=key.arity()).map(|l| format!("z{l}")).collect();
            let mut phi = PpFormula {
                free: tags.iter().flat_map(|t| xs(t)).collect(),
                exists: zs.clone(),
                atoms: vec![key.atom(&zs)],
            };
            for (t, z) in tags.iter().zip(&zs) {
                let (ex, atoms) = with_theta(z, &xs(t), &mut counter);
                phi.exists.extend(ex);
                phi.atoms.extend(atoms);
            }
            relations.insert(key, phi);
        }
        (domain, relations)
    };
    let mut warnings: Vec<String> = j.warnings.clone();
    for i in is {
        warnings.extend(i.warnings.iter().cloned());
    }
    warnings.dedup();
    Ok(Interpretation {
        name,
        source: first.source,
        target: j.target,
        dim: total,
        domain,
        relations,
        map,
        warnings,
    })
}
