//! Basic relations and their endpoint definitions.
//!
//! Slot layout for a pair `(X, Y)` of elements with `s` slots each: `X` uses
//! slots `0..s`, `Y` uses `s..2s`. Intervals are `(lo, hi)`, block axis `i` is
//! `(2i, 2i+1)`, points are `(x, y)`, directed intervals `(start, end)`.

use std::cmp::Ordering;
use std::fmt;

use crate::domain::{Calculus, Value};
use crate::error::{Error, Result};
use crate::point::atom::{Dnf, Op, OrderAtom};

/// The thirteen interval relations, in the order of the usual table
/// (each primitive followed by its converse, identity last).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IaBasic {
    P,
    Pi,
    M,
    Mi,
    O,
    Oi,
    D,
    Di,
    S,
    Si,
    F,
    Fi,
    Eq,
}

impl IaBasic {
    pub const ALL: [IaBasic; 13] = [
        IaBasic::P,
        IaBasic::Pi,
        IaBasic::M,
        IaBasic::Mi,
        IaBasic::O,
        IaBasic::Oi,
        IaBasic::D,
        IaBasic::Di,
        IaBasic::S,
        IaBasic::Si,
        IaBasic::F,
        IaBasic::Fi,
        IaBasic::Eq,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> IaBasic {
        Self::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            IaBasic::P => "p",
            IaBasic::Pi => "pi",
            IaBasic::M => "m",
            IaBasic::Mi => "mi",
            IaBasic::O => "o",
            IaBasic::Oi => "oi",
            IaBasic::D => "d",
            IaBasic::Di => "di",
            IaBasic::S => "s",
            IaBasic::Si => "si",
            IaBasic::F => "f",
            IaBasic::Fi => "fi",
            IaBasic::Eq => "eq",
        }
    }

    /// Accepts `pi`, `p~`, `p⌣` for converses and `eq`, `=`, `≡` for identity.
    pub fn parse(s: &str) -> Option<IaBasic> {
        let (base, conv) = if let Some(b) = s.strip_suffix('⌣').or_else(|| s.strip_suffix('~')) {
            (b, true)
        } else if s.len() == 2 && s.ends_with('i') {
            (&s[..1], true)
        } else {
            (s, false)
        };
        let b = match base {
            "p" => IaBasic::P,
            "m" => IaBasic::M,
            "o" => IaBasic::O,
            "d" => IaBasic::D,
            "s" => IaBasic::S,
            "f" => IaBasic::F,
            "eq" | "=" | "≡" if !conv => return Some(IaBasic::Eq),
            _ => return None,
        };
        Some(if conv { b.converse() } else { b })
    }

    pub fn converse(self) -> IaBasic {
        use IaBasic::*;
        match self {
            P => Pi,
            Pi => P,
            M => Mi,
            Mi => M,
            O => Oi,
            Oi => O,
            D => Di,
            Di => D,
            S => Si,
            Si => S,
            F => Fi,
            Fi => F,
            Eq => Eq,
        }
    }

    /// Endpoint definition with `X = (xl, xh)` and `Y = (yl, yh)`.
    pub fn atoms(self, xl: usize, xh: usize, yl: usize, yh: usize) -> Vec<OrderAtom> {
        use IaBasic::*;
        let lt = OrderAtom::lt;
        let eq = OrderAtom::eq;
        match self {
            P => vec![lt(xh, yl)],
            Pi => vec![lt(yh, xl)],
            M => vec![eq(xh, yl)],
            Mi => vec![eq(yh, xl)],
            O => vec![lt(xl, yl), lt(yl, xh), lt(xh, yh)],
            Oi => vec![lt(yl, xl), lt(xl, yh), lt(yh, xh)],
            D => vec![lt(yl, xl), lt(xh, yh)],
            Di => vec![lt(xl, yl), lt(yh, xh)],
            S => vec![eq(xl, yl), lt(xh, yh)],
            Si => vec![eq(xl, yl), lt(yh, xh)],
            F => vec![eq(xh, yh), lt(yl, xl)],
            Fi => vec![eq(xh, yh), lt(xl, yl)],
            Eq => vec![eq(xl, yl), eq(xh, yh)],
        }
    }

    /// Direct classification from endpoint comparisons of two proper intervals.
    pub fn classify<T: Ord>(xl: T, xh: T, yl: T, yh: T) -> IaBasic {
        use Ordering::*;
        match (xl.cmp(&yl), xh.cmp(&yh)) {
            (Equal, Equal) => IaBasic::Eq,
            (Equal, Less) => IaBasic::S,
            (Equal, Greater) => IaBasic::Si,
            (Greater, Equal) => IaBasic::F,
            (Less, Equal) => IaBasic::Fi,
            (Greater, Less) => IaBasic::D,
            (Less, Greater) => IaBasic::Di,
            (Less, Less) => match xh.cmp(&yl) {
                Less => IaBasic::P,
                Equal => IaBasic::M,
                Greater => IaBasic::O,
            },
            (Greater, Greater) => match yh.cmp(&xl) {
                Less => IaBasic::Pi,
                Equal => IaBasic::Mi,
                Greater => IaBasic::Oi,
            },
        }
    }
}

/// The eight projective cardinal directions between distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CdcBasic {
    N,
    S,
    E,
    W,
    Ne,
    Se,
    Sw,
    Nw,
}

impl CdcBasic {
    pub const ALL: [CdcBasic; 8] = [
        CdcBasic::N,
        CdcBasic::S,
        CdcBasic::E,
        CdcBasic::W,
        CdcBasic::Ne,
        CdcBasic::Se,
        CdcBasic::Sw,
        CdcBasic::Nw,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            CdcBasic::N => "N",
            CdcBasic::S => "S",
            CdcBasic::E => "E",
            CdcBasic::W => "W",
            CdcBasic::Ne => "NE",
            CdcBasic::Se => "SE",
            CdcBasic::Sw => "SW",
            CdcBasic::Nw => "NW",
        }
    }

    pub fn parse(s: &str) -> Option<CdcBasic> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn converse(self) -> CdcBasic {
        use CdcBasic::*;
        match self {
            N => S,
            S => N,
            E => W,
            W => E,
            Ne => Sw,
            Sw => Ne,
            Se => Nw,
            Nw => Se,
        }
    }

    /// Coordinate definition for `(x, y)` against `(x', y')`.
    pub fn atoms(self, x: usize, y: usize, x2: usize, y2: usize) -> Vec<OrderAtom> {
        use CdcBasic::*;
        let lt = OrderAtom::lt;
        let eq = OrderAtom::eq;
        match self {
            N => vec![lt(y2, y), eq(x, x2)],
            E => vec![lt(x2, x), eq(y, y2)],
            S => vec![lt(y, y2), eq(x, x2)],
            W => vec![lt(x, x2), eq(y, y2)],
            Ne => vec![lt(y2, y), lt(x2, x)],
            Se => vec![lt(y, y2), lt(x2, x)],
            Sw => vec![lt(y, y2), lt(x, x2)],
            Nw => vec![lt(y2, y), lt(x, x2)],
        }
    }

    pub fn classify<T: Ord>(x: T, y: T, x2: T, y2: T) -> Option<CdcBasic> {
        use Ordering::*;
        match (x.cmp(&x2), y.cmp(&y2)) {
            (Equal, Equal) => None,
            (Equal, Greater) => Some(CdcBasic::N),
            (Equal, Less) => Some(CdcBasic::S),
            (Greater, Equal) => Some(CdcBasic::E),
            (Less, Equal) => Some(CdcBasic::W),
            (Greater, Greater) => Some(CdcBasic::Ne),
            (Greater, Less) => Some(CdcBasic::Se),
            (Less, Less) => Some(CdcBasic::Sw),
            (Less, Greater) => Some(CdcBasic::Nw),
        }
    }
}

/// The directed-interval relations this toolkit supports.
///
/// `cb=` and `cf=` are "starts" and "finishes" read along the common direction of
/// travel, `eq=` is identity, `Eq!=` relates an interval to its reversal, and `e=`
/// says `X` ends before `Y` begins, again along the common direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiaBasic {
    CbEq,
    CfEq,
    EqEq,
    EqNe,
    EEq,
}

impl DiaBasic {
    pub const ALL: [DiaBasic; 5] = [
        DiaBasic::CbEq,
        DiaBasic::CfEq,
        DiaBasic::EqEq,
        DiaBasic::EqNe,
        DiaBasic::EEq,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DiaBasic::CbEq => "cb=",
            DiaBasic::CfEq => "cf=",
            DiaBasic::EqEq => "eq=",
            DiaBasic::EqNe => "Eq!=",
            DiaBasic::EEq => "e=",
        }
    }

    pub fn parse(s: &str) -> Option<DiaBasic> {
        match s {
            "Eq≠" => Some(DiaBasic::EqNe),
            _ => Self::ALL.into_iter().find(|b| b.name() == s),
        }
    }

    pub fn converse(self) -> Option<DiaBasic> {
        match self {
            DiaBasic::EqEq | DiaBasic::EqNe => Some(self),
            _ => None,
        }
    }

    /// Definition as one conjunction per direction case.
    pub fn dnf(self, xs: usize, xe: usize, ys: usize, ye: usize) -> Dnf {
        let lt = OrderAtom::lt;
        let eq = OrderAtom::eq;
        // forward pair, then backward pair (the mirror image)
        match self {
            DiaBasic::CbEq => vec![
                vec![lt(xs, xe), lt(ys, ye), eq(xs, ys), lt(xe, ye)],
                vec![lt(xe, xs), lt(ye, ys), eq(xs, ys), lt(ye, xe)],
            ],
            DiaBasic::CfEq => vec![
                vec![lt(xs, xe), lt(ys, ye), eq(xe, ye), lt(ys, xs)],
                vec![lt(xe, xs), lt(ye, ys), eq(xe, ye), lt(xs, ys)],
            ],
            DiaBasic::EqEq => vec![
                vec![lt(xs, xe), eq(xs, ys), eq(xe, ye)],
                vec![lt(xe, xs), eq(xs, ys), eq(xe, ye)],
            ],
            DiaBasic::EqNe => vec![vec![eq(xs, ye), eq(xe, ys)]],
            DiaBasic::EEq => vec![
                vec![lt(xs, xe), lt(ys, ye), lt(xe, ys)],
                vec![lt(xe, xs), lt(ye, ys), lt(ys, xe)],
            ],
        }
    }
}

/// A basic relation of one of the calculi.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicCode {
    Ia(IaBasic),
    /// One interval relation per axis; length is the block dimension (at least 2).
    Ba(Vec<IaBasic>),
    Cdc(CdcBasic),
    Dia(DiaBasic),
}

impl BasicCode {
    pub fn calculus(&self) -> Calculus {
        match self {
            BasicCode::Ia(_) => Calculus::Ia,
            BasicCode::Ba(v) => Calculus::Ba(v.len() as u8),
            BasicCode::Cdc(_) => Calculus::Cdc,
            BasicCode::Dia(_) => Calculus::Dia,
        }
    }

    /// Parses a code written the way the instance format writes it:
    /// `s`, `pi`, `(s,p)`, `NE`, `cb=`.
    pub fn parse(calculus: Calculus, text: &str) -> Result<BasicCode> {
        let unknown = || Error::UnknownCode {
            calculus,
            code: text.to_string(),
        };
        match calculus {
            Calculus::Ia => IaBasic::parse(text).map(BasicCode::Ia).ok_or_else(unknown),
            Calculus::Ba(p) => {
                let inner = text
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(unknown)?;
                let parts: Vec<IaBasic> = inner
                    .split(',')
                    .map(|c| IaBasic::parse(c.trim()))
                    .collect::<Option<_>>()
                    .ok_or_else(unknown)?;
                if parts.len() != p as usize {
                    return Err(unknown());
                }
                Ok(BasicCode::Ba(parts))
            }
            Calculus::Cdc => CdcBasic::parse(text).map(BasicCode::Cdc).ok_or_else(unknown),
            Calculus::Dia => DiaBasic::parse(text).map(BasicCode::Dia).ok_or_else(unknown),
        }
    }

    /// Dense index within the calculus's universe of basic codes.
    pub fn index(&self) -> usize {
        match self {
            BasicCode::Ia(b) => b.index(),
            BasicCode::Ba(v) => v.iter().rev().fold(0, |acc, b| acc * 13 + b.index()),
            BasicCode::Cdc(b) => b.index(),
            BasicCode::Dia(b) => b.index(),
        }
    }

    pub fn from_index(calculus: Calculus, index: usize) -> BasicCode {
        match calculus {
            Calculus::Ia => BasicCode::Ia(IaBasic::from_index(index)),
            Calculus::Ba(p) => {
                let mut rest = index;
                BasicCode::Ba(
                    (0..p)
                        .map(|_| {
                            let b = IaBasic::from_index(rest % 13);
                            rest /= 13;
                            b
                        })
                        .collect(),
                )
            }
            Calculus::Cdc => BasicCode::Cdc(CdcBasic::ALL[index]),
            Calculus::Dia => BasicCode::Dia(DiaBasic::ALL[index]),
        }
    }

    pub fn converse(&self) -> Result<BasicCode> {
        Ok(match self {
            BasicCode::Ia(b) => BasicCode::Ia(b.converse()),
            BasicCode::Ba(v) => BasicCode::Ba(v.iter().map(|b| b.converse()).collect()),
            BasicCode::Cdc(b) => BasicCode::Cdc(b.converse()),
            BasicCode::Dia(b) => BasicCode::Dia(b.converse().ok_or_else(|| {
                Error::Unsupported(format!("converse of `{}` lies outside the fragment", b.name()))
            })?),
        })
    }

    /// Endpoint definition on the pair's slots, as a disjunction of conjunctions.
    /// Every calculus except the directed one yields a single conjunction.
    pub fn point_formula(&self) -> Dnf {
        match self {
            BasicCode::Ia(b) => vec![b.atoms(0, 1, 2, 3)],
            BasicCode::Ba(v) => {
                let s = 2 * v.len();
                vec![v
                    .iter()
                    .enumerate()
                    .flat_map(|(i, b)| b.atoms(2 * i, 2 * i + 1, s + 2 * i, s + 2 * i + 1))
                    .collect()]
            }
            BasicCode::Cdc(b) => vec![b.atoms(0, 1, 2, 3)],
            BasicCode::Dia(b) => b.dnf(0, 1, 2, 3),
        }
    }
}

impl fmt::Display for BasicCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicCode::Ia(b) => write!(f, "{}", b.name()),
            BasicCode::Ba(v) => {
                let names: Vec<_> = v.iter().map(|b| b.name()).collect();
                write!(f, "({})", names.join(","))
            }
            BasicCode::Cdc(b) => write!(f, "{}", b.name()),
            BasicCode::Dia(b) => write!(f, "{}", b.name()),
        }
    }
}

/// Domain constraints on the slots of one element starting at `base`.
pub fn domain_atoms(calculus: Calculus, base: usize) -> Vec<OrderAtom> {
    match calculus {
        Calculus::Ia => vec![OrderAtom::lt(base, base + 1)],
        Calculus::Ba(p) => (0..p as usize)
            .map(|i| OrderAtom::lt(base + 2 * i, base + 2 * i + 1))
            .collect(),
        Calculus::Cdc => vec![],
        Calculus::Dia => vec![OrderAtom::vars(base, Op::Ne, base + 1)],
    }
}

/// The defining formula of a basic code over the pair's endpoint slots.
pub fn basic_to_point_formula(code: &BasicCode) -> Result<Dnf> {
    let dnf = code.point_formula();
    if dnf.is_empty() {
        return Err(Error::DefinitionMissing(code.to_string()));
    }
    Ok(dnf)
}

fn check_pair(calculus: Calculus, a: &Value, b: &Value) -> Result<()> {
    for v in [a, b] {
        match v.calculus() {
            Some(c) if c == calculus => {}
            other => {
                return Err(Error::CalculusMismatch {
                    left: calculus,
                    right: other.unwrap_or(calculus),
                })
            }
        }
    }
    Ok(())
}

/// Evaluates a basic relation on concrete elements through its endpoint definition.
pub fn holds(code: &BasicCode, a: &Value, b: &Value) -> Result<bool> {
    check_pair(code.calculus(), a, b)?;
    let slots: Vec<_> = a.slots().into_iter().chain(b.slots()).collect();
    Ok(code
        .point_formula()
        .iter()
        .any(|conj| conj.iter().all(|at| at.holds(|v| slots[v], |q| q))))
}

/// The basic code holding between two elements, by direct coordinate comparison.
/// `None` for coincident CDC points and for directed pairs outside the fragment.
pub fn classify_pair(calculus: Calculus, a: &Value, b: &Value) -> Result<Option<BasicCode>> {
    check_pair(calculus, a, b)?;
    let (x, y) = (a.slots(), b.slots());
    Ok(classify_slots(calculus, &x, &y))
}

/// Classification on raw slot coordinates (any totally ordered type, so rank
/// vectors work as well as rationals).
pub fn classify_slots<T: Ord + Copy>(calculus: Calculus, x: &[T], y: &[T]) -> Option<BasicCode> {
    match calculus {
        Calculus::Ia => Some(BasicCode::Ia(IaBasic::classify(x[0], x[1], y[0], y[1]))),
        Calculus::Ba(p) => Some(BasicCode::Ba(
            (0..p as usize)
                .map(|i| IaBasic::classify(x[2 * i], x[2 * i + 1], y[2 * i], y[2 * i + 1]))
                .collect(),
        )),
        Calculus::Cdc => CdcBasic::classify(x[0], x[1], y[0], y[1]).map(BasicCode::Cdc),
        Calculus::Dia => {
            let slots = [x[0], x[1], y[0], y[1]];
            DiaBasic::ALL
                .into_iter()
                .find(|b| {
                    b.dnf(0, 1, 2, 3)
                        .iter()
                        .any(|c| c.iter().all(|at| at.holds(|v| slots[v], |_| unreachable!())))
                })
                .map(BasicCode::Dia)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DirectedInterval, Interval, PlanePoint};
    use crate::point::atom::Term;

    fn iv(a: i64, b: i64) -> Value {
        Value::Interval(Interval::from_ints(a, b).unwrap())
    }

    #[test]
    fn table_rows() {
        let s = basic_to_point_formula(&BasicCode::Ia(IaBasic::S)).unwrap();
        assert_eq!(s, vec![vec![OrderAtom::eq(0, 2), OrderAtom::lt(1, 3)]]);
        let e = basic_to_point_formula(&BasicCode::Ia(IaBasic::Eq)).unwrap();
        assert_eq!(e, vec![vec![OrderAtom::eq(0, 2), OrderAtom::eq(1, 3)]]);
        // N: y > y' and x = x'
        let n = basic_to_point_formula(&BasicCode::Cdc(CdcBasic::N)).unwrap();
        assert_eq!(n, vec![vec![OrderAtom::lt(3, 1), OrderAtom::eq(0, 2)]]);
        assert!(matches!(n[0][0].lhs, Term::Var(3)));
    }

    #[test]
    fn holds_examples() {
        assert!(holds(&BasicCode::Ia(IaBasic::S), &iv(0, 1), &iv(0, 2)).unwrap());
        assert!(holds(&BasicCode::Ia(IaBasic::Eq), &iv(0, 1), &iv(0, 1)).unwrap());
        let p = |x, y| Value::Point(PlanePoint::from_ints(x, y));
        assert!(holds(&BasicCode::Cdc(CdcBasic::N), &p(0, 2), &p(0, 1)).unwrap());
        assert!(holds(&BasicCode::Cdc(CdcBasic::N), &iv(0, 1), &p(0, 1)).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_pair(Calculus::Ia, &iv(0, 1), &iv(2, 3)).unwrap(),
            Some(BasicCode::Ia(IaBasic::P))
        );
        let r = Value::Block(
            crate::domain::Block::new(vec![
                Interval::from_ints(0, 1).unwrap(),
                Interval::from_ints(0, 1).unwrap(),
            ])
            .unwrap(),
        );
        assert_eq!(
            classify_pair(Calculus::Ba(2), &r, &r).unwrap(),
            Some(BasicCode::Ba(vec![IaBasic::Eq, IaBasic::Eq]))
        );
        let p = Value::Point(PlanePoint::from_ints(1, 1));
        assert_eq!(classify_pair(Calculus::Cdc, &p, &p).unwrap(), None);
    }

    #[test]
    fn classification_agrees_with_definitions_on_small_grid() {
        for a in 0..5 {
            for b in a + 1..5 {
                for c in 0..5 {
                    for d in c + 1..5 {
                        let (x, y) = (iv(a, b), iv(c, d));
                        let cls = classify_pair(Calculus::Ia, &x, &y).unwrap().unwrap();
                        let holding: Vec<_> = IaBasic::ALL
                            .into_iter()
                            .filter(|r| holds(&BasicCode::Ia(*r), &x, &y).unwrap())
                            .collect();
                        assert_eq!(holding, vec![match cls {
                            BasicCode::Ia(r) => r,
                            _ => unreachable!(),
                        }]);
                    }
                }
            }
        }
    }

    #[test]
    fn directed_semantics() {
        let d = |a, b| Value::Directed(DirectedInterval::from_ints(a, b).unwrap());
        let cb = BasicCode::Dia(DiaBasic::CbEq);
        assert!(holds(&cb, &d(0, 1), &d(0, 2)).unwrap());
        // backward: mirror image
        assert!(holds(&cb, &d(0, -1), &d(0, -2)).unwrap());
        assert!(!holds(&cb, &d(0, 1), &d(0, -2)).unwrap());
        let eq_ne = BasicCode::Dia(DiaBasic::EqNe);
        assert!(holds(&eq_ne, &d(0, 1), &d(1, 0)).unwrap());
        let e = BasicCode::Dia(DiaBasic::EEq);
        assert!(holds(&e, &d(0, 1), &d(2, 3)).unwrap());
        assert!(holds(&e, &d(3, 2), &d(1, 0)).unwrap());
        assert!(!holds(&e, &d(2, 3), &d(0, 1)).unwrap());
    }

    #[test]
    fn parse_codes() {
        assert_eq!(
            BasicCode::parse(Calculus::Ia, "p⌣").unwrap(),
            BasicCode::Ia(IaBasic::Pi)
        );
        assert_eq!(
            BasicCode::parse(Calculus::Ia, "≡").unwrap(),
            BasicCode::Ia(IaBasic::Eq)
        );
        assert_eq!(
            BasicCode::parse(Calculus::Ba(2), "(s,p)").unwrap(),
            BasicCode::Ba(vec![IaBasic::S, IaBasic::P])
        );
        assert!(BasicCode::parse(Calculus::Ba(2), "(s)").is_err());
        assert!(BasicCode::parse(Calculus::Ia, "x").is_err());
        assert_eq!(
            BasicCode::parse(Calculus::Dia, "Eq≠").unwrap(),
            BasicCode::Dia(DiaBasic::EqNe)
        );
        for i in 0..169 {
            assert_eq!(BasicCode::from_index(Calculus::Ba(2), i).index(), i);
        }
    }
}
