//! The named interpretations between the calculi and the rational order, and
//! a few pp-definitions of derived relations.

use std::collections::BTreeMap;
use std::sync::Arc;

use once_cell::sync::Lazy;

use super::interpretation::{Interpretation, RelKey};
use crate::domain::{Calculus, Rational, Value};
use crate::error::{Error, Result};
use crate::point::atom::{Op, OrderAtom, Term};
use crate::pp::{PpAtom, PpFormula, Structure};
use crate::relations::basic::{BasicCode, DiaBasic, IaBasic};
use crate::relations::relation::{universe_size, QualRelation};

const ORDER: Structure = Structure::Order;
const IA: Structure = Structure::Calculus(Calculus::Ia);
const RA: Structure = Structure::Calculus(Calculus::Ba(2));
const CDC: Structure = Structure::Calculus(Calculus::Cdc);
const DIA: Structure = Structure::Calculus(Calculus::Dia);

fn s(v: &str) -> String {
    v.to_string()
}

/// `x R y` for a relation given by its codes in `calculus`.
pub fn rel(calculus: Calculus, codes: &str, x: &str, y: &str) -> PpAtom {
    let codes = codes
        .split_whitespace()
        .map(|c| BasicCode::parse(calculus, c))
        .collect::<Result<Vec<_>>>()
        .expect("catalog codes are valid");
    PpAtom::Rel(
        QualRelation::new(calculus, codes).expect("one calculus"),
        s(x),
        s(y),
    )
}

/// `(a, ⊤)` or `(⊤, a)` in the rectangle algebra.
pub fn ra_axis(axis: usize, code: IaBasic, x: &str, y: &str) -> PpAtom {
    let mut axes = vec![QualRelation::full(Calculus::Ia); 2];
    axes[axis] = QualRelation::ia(&[code]);
    PpAtom::Rel(QualRelation::product(&axes).expect("two IA factors"), s(x), s(y))
}

fn order_atom_to_pp(a: &OrderAtom, names: &[String]) -> PpAtom {
    let n = |t: Term| match t {
        Term::Var(v) => names[v].clone(),
        Term::Const(_) => unreachable!("basic definitions have no constants"),
    };
    match a.op {
        Op::Lt => PpAtom::Less(n(a.lhs), n(a.rhs)),
        Op::Le => PpAtom::LessEq(n(a.lhs), n(a.rhs)),
        Op::Eq => PpAtom::Eq(n(a.lhs), n(a.rhs)),
        Op::Ne => unreachable!("no basic definition uses !="),
    }
}

fn coord_names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// The formula over `(u_1..u_k, v_1..v_k)` given by a basic code's endpoint
/// definition (single conjunction).
fn endpoint_formula(code: &BasicCode, k: usize) -> PpFormula {
    let names: Vec<String> = coord_names("u", k).into_iter().chain(coord_names("v", k)).collect();
    let dnf = code.point_formula();
    assert_eq!(dnf.len(), 1, "endpoint formula must be a single conjunction");
    PpFormula {
        free: names.clone(),
        exists: vec![],
        atoms: dnf[0].iter().map(|a| order_atom_to_pp(a, &names)).collect(),
    }
}

fn coordinate_equality(k: usize) -> PpFormula {
    let u = coord_names("u", k);
    let v = coord_names("v", k);
    PpFormula {
        free: u.iter().chain(&v).cloned().collect(),
        exists: vec![],
        atoms: u.iter().zip(&v).map(|(a, b)| PpAtom::Eq(a.clone(), b.clone())).collect(),
    }
}

fn rationals(args: &[Value]) -> Option<Vec<Rational>> {
    args.iter()
        .map(|v| match v {
            Value::Rational(q) => Some(*q),
            _ => None,
        })
        .collect()
}

/// `J`: elements of `calculus` as `k`-tuples of rationals, with every basic
/// relation given by its endpoint definition.
fn endpoint_j(name: &str, calculus: Calculus, domain: PpFormula) -> Interpretation {
    let k = calculus.slots();
    let mut relations: BTreeMap<RelKey, PpFormula> = (0..universe_size(calculus))
        .map(|i| {
            let b = BasicCode::from_index(calculus, i);
            (RelKey::Basic(b.clone()), endpoint_formula(&b, k))
        })
        .collect();
    relations.insert(RelKey::Eq, coordinate_equality(k));
    Interpretation {
        name: name.into(),
        source: ORDER,
        target: Structure::Calculus(calculus),
        dim: k,
        domain,
        relations,
        map: Arc::new(move |a: &[Value]| Value::from_slots(calculus, &rationals(a)?).ok()),
        warnings: vec![],
    }
}

/// `I`: the rationals inside `calculus` via one coordinate of an element.
fn projection(
    name: &str,
    structure: Structure,
    slot: usize,
    domain: PpFormula,
    less: PpFormula,
    eq: PpFormula,
) -> Interpretation {
    let forward_only = structure == DIA;
    let mut relations = BTreeMap::new();
    relations.insert(RelKey::Less, less);
    relations.insert(RelKey::Eq, eq);
    Interpretation {
        name: name.into(),
        source: structure,
        target: ORDER,
        dim: 1,
        domain,
        relations,
        map: Arc::new(move |a: &[Value]| {
            if let (true, Value::Directed(d)) = (forward_only, &a[0]) {
                if !d.is_forward() {
                    return None;
                }
            }
            if a[0].calculus() != structure_calculus(structure) {
                return None;
            }
            a[0].slots().get(slot).map(|q| Value::Rational(*q))
        }),
        warnings: vec![],
    }
}

fn structure_calculus(s: Structure) -> Option<Calculus> {
    match s {
        Structure::Order => None,
        Structure::Calculus(c) => Some(c),
    }
}

/// `(X<Y)` read on start points: `∃Y',W (Y s Y' ∧ X s W ∧ Y' f W)`, with the
/// calculus-specific versions of `s` and `f` supplied as atom builders.
fn start_less(
    s_atom: &dyn Fn(&str, &str) -> PpAtom,
    f_atom: &dyn Fn(&str, &str) -> PpAtom,
) -> PpFormula {
    PpFormula::new(
        &["X", "Y"],
        &["Y'", "W"],
        vec![s_atom("Y", "Y'"), s_atom("X", "W"), f_atom("Y'", "W")],
    )
}

/// `(X<Y)` read on end points: `∃X',W (X f X' ∧ Y f W ∧ X' s W)`.
fn end_less(
    s_atom: &dyn Fn(&str, &str) -> PpAtom,
    f_atom: &dyn Fn(&str, &str) -> PpAtom,
) -> PpFormula {
    PpFormula::new(
        &["X", "Y"],
        &["X'", "W"],
        vec![f_atom("X", "X'"), f_atom("Y", "W"), s_atom("X'", "W")],
    )
}

/// Equality of the coordinate read through `a`: `∃Z (X a Z ∧ Y a Z)`.
fn common_extension(a: &dyn Fn(&str, &str) -> PpAtom) -> PpFormula {
    PpFormula::new(&["X", "Y"], &["Z"], vec![a("X", "Z"), a("Y", "Z")])
}

fn build() -> Vec<Interpretation> {
    let mut out = Vec::new();

    // --- interval algebra
    let ia_s = |x: &str, y: &str| rel(Calculus::Ia, "s", x, y);
    let ia_f = |x: &str, y: &str| rel(Calculus::Ia, "f", x, y);
    out.push(projection(
        "ia.I1",
        IA,
        0,
        PpFormula::top(&["X"]),
        start_less(&ia_s, &ia_f),
        common_extension(&ia_s),
    ));
    out.push(projection(
        "ia.I2",
        IA,
        1,
        PpFormula::top(&["X"]),
        end_less(&ia_s, &ia_f),
        common_extension(&ia_f),
    ));
    out.push(endpoint_j(
        "ia.J",
        Calculus::Ia,
        PpFormula::new(&["u1", "u2"], &[], vec![PpAtom::Less(s("u1"), s("u2"))]),
    ));

    // --- rectangle algebra
    use IaBasic::{F, S};
    let ra = |axis: usize, code: IaBasic| move |x: &str, y: &str| ra_axis(axis, code, x, y);
    let (s1, f1, s2, f2) = (ra(0, S), ra(0, F), ra(1, S), ra(1, F));
    out.push(projection("ra.I1", RA, 0, PpFormula::top(&["X"]), start_less(&s1, &f1), common_extension(&s1)));
    out.push(projection("ra.I2", RA, 1, PpFormula::top(&["X"]), end_less(&s1, &f1), common_extension(&f1)));
    out.push(projection("ra.I3", RA, 2, PpFormula::top(&["X"]), start_less(&s2, &f2), common_extension(&s2)));
    out.push(projection("ra.I4", RA, 3, PpFormula::top(&["X"]), end_less(&s2, &f2), common_extension(&f2)));
    out.push(endpoint_j(
        "ra.J",
        Calculus::Ba(2),
        PpFormula::new(
            &["u1", "u2", "u3", "u4"],
            &[],
            vec![PpAtom::Less(s("u1"), s("u2")), PpAtom::Less(s("u3"), s("u4"))],
        ),
    ));

    // --- cardinal directions
    let cdc = |code: &'static str| move |x: &str, y: &str| rel(Calculus::Cdc, code, x, y);
    let (n, e, w, so) = (cdc("N"), cdc("E"), cdc("W"), cdc("S"));
    out.push(projection(
        "cdc.I1",
        CDC,
        0,
        PpFormula::top(&["X"]),
        PpFormula::new(&["X", "Y"], &["X'", "Y'"], vec![n("X'", "X"), n("Y'", "Y"), w("X'", "Y'")]),
        PpFormula::new(&["X", "Y"], &["Z"], vec![n("Z", "X"), n("Z", "Y")]),
    ));
    out.push(projection(
        "cdc.I2",
        CDC,
        1,
        PpFormula::top(&["X"]),
        PpFormula::new(&["X", "Y"], &["X'", "Y'"], vec![e("X'", "X"), e("Y'", "Y"), so("X'", "Y'")]),
        PpFormula::new(&["X", "Y"], &["Z"], vec![e("Z", "X"), e("Z", "Y")]),
    ));
    out.push(endpoint_j("cdc.J", Calculus::Cdc, PpFormula::top(&["u1", "u2"])));

    // --- directed intervals (with forw)
    let cb = |x: &str, y: &str| rel(Calculus::Dia, "cb=", x, y);
    let cf = |x: &str, y: &str| rel(Calculus::Dia, "cf=", x, y);
    let forw = PpFormula::new(&["X"], &[], vec![PpAtom::Forw(s("X"))]);
    out.push(projection("dia.I1", DIA, 0, forw.clone(), start_less(&cb, &cf), common_extension(&cb)));
    out.push(projection("dia.I2", DIA, 1, forw, end_less(&cb, &cf), common_extension(&cf)));
    out.push(dia_j());

    out
}

fn dia_j() -> Interpretation {
    let uv = ["u1", "u2", "v1", "v2"];
    let f = |atoms: Vec<PpAtom>| PpFormula::new(&uv, &[], atoms);
    let (u1, u2, v1, v2) = (s("u1"), s("u2"), s("v1"), s("v2"));
    let mut relations = BTreeMap::new();
    let code = |b: DiaBasic| RelKey::Basic(BasicCode::Dia(b));
    relations.insert(
        code(DiaBasic::CbEq),
        f(vec![PpAtom::Eq(u1.clone(), v1.clone()), PpAtom::Less(u2.clone(), v2.clone())]),
    );
    relations.insert(
        code(DiaBasic::CfEq),
        f(vec![PpAtom::Less(v1.clone(), u1.clone()), PpAtom::Eq(u2.clone(), v2.clone())]),
    );
    relations.insert(
        code(DiaBasic::EqEq),
        f(vec![PpAtom::Eq(u1.clone(), v1.clone()), PpAtom::Eq(u2.clone(), v2.clone())]),
    );
    // both images point forwards, so they are never reversals of each other
    relations.insert(code(DiaBasic::EqNe), f(vec![PpAtom::Less(u1.clone(), u1.clone())]));
    relations.insert(code(DiaBasic::EEq), f(vec![PpAtom::Less(u2.clone(), v1.clone())]));
    relations.insert(RelKey::Eq, coordinate_equality(2));
    relations.insert(RelKey::Forw, PpFormula::top(&["u1", "u2"]));
    Interpretation {
        name: "dia.J".into(),
        source: ORDER,
        target: DIA,
        dim: 2,
        domain: PpFormula::new(&["u1", "u2"], &[], vec![PpAtom::LessEq(u1, u2)]),
        relations,
        map: Arc::new(|a: &[Value]| {
            let q = rationals(a)?;
            // undefined on u1 = u2: the pair would be a point-like interval
            (q[0] < q[1]).then(|| Value::from_slots(Calculus::Dia, &q).ok()).flatten()
        }),
        warnings: vec![
            "domain u1 <= u2 admits u1 = u2, where no directed interval exists; \
             the coordinate map is undefined there"
                .into(),
        ],
    }
}

static CATALOG: Lazy<Vec<Interpretation>> = Lazy::new(build);

/// Every named interpretation.
pub fn catalog() -> &'static [Interpretation] {
    &CATALOG
}

pub fn lookup(name: &str) -> Result<Interpretation> {
    CATALOG
        .iter()
        .find(|i| i.name == name)
        .cloned()
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

/// A pp-definition of a relation of a calculus.
#[derive(Debug, Clone)]
pub struct Definition {
    pub name: &'static str,
    pub structure: Structure,
    pub formula: PpFormula,
    /// The relation the formula is claimed to define.
    pub defines: QualRelation,
    /// Whether the formula was worked out here rather than taken as given.
    pub derived: bool,
}

pub fn definitions() -> Vec<Definition> {
    let m = |x: &str, y: &str| rel(Calculus::Ia, "m", x, y);
    let ba = |c: &str, x: &str, y: &str| rel(Calculus::Ba(2), c, x, y);
    vec![
        Definition {
            name: "ia.s-from-m",
            structure: IA,
            formula: PpFormula::new(
                &["X", "Y"],
                &["Z", "U", "V"],
                vec![m("Z", "X"), m("Z", "Y"), m("X", "U"), m("U", "V"), m("Y", "V")],
            ),
            defines: QualRelation::ia(&[IaBasic::S]),
            derived: true,
        },
        Definition {
            name: "ia.f-from-m",
            structure: IA,
            formula: PpFormula::new(
                &["X", "Y"],
                &["Z", "U", "V"],
                vec![m("X", "Z"), m("Y", "Z"), m("V", "U"), m("U", "X"), m("V", "Y")],
            ),
            defines: QualRelation::ia(&[IaBasic::F]),
            derived: true,
        },
        Definition {
            name: "ra.s-top",
            structure: RA,
            formula: PpFormula::new(
                &["X", "Y"],
                &["Z"],
                vec![ba("(s,p)", "X", "Z"), ba("(s,pi)", "Z", "Y")],
            ),
            defines: QualRelation::product(&[
                QualRelation::ia(&[IaBasic::S]),
                QualRelation::full(Calculus::Ia),
            ])
            .expect("two IA factors"),
            derived: false,
        },
    ]
}

pub fn definition(name: &str) -> Result<Definition> {
    definitions()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}
