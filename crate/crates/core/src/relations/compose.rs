//! Composition of qualitative relations, derived by enumerating the order types
//! of three elements' endpoints. No tables are hard-coded.

use once_cell::sync::Lazy;

use super::basic::{classify_slots, domain_atoms, BasicCode};
use super::relation::{universe_size, QualRelation};
use crate::domain::Calculus;
use crate::error::{Error, Result};
use crate::point::relation::conj_holds_on_ranks;
use crate::point::weak_order::enumerate_weak_orders;

type Table = Vec<Vec<QualRelation>>;

/// `table[r][s]` = every `t` with some `a r b`, `b s c`, `a t c`.
fn derive_table(calculus: Calculus) -> Table {
    let s = calculus.slots();
    let n = universe_size(calculus);
    let mut domain = Vec::new();
    for e in 0..3 {
        domain.extend(domain_atoms(calculus, e * s));
    }
    let mut table = vec![vec![QualRelation::empty(calculus); n]; n];
    for w in enumerate_weak_orders(3 * s).unwrap() {
        let r = w.ranks();
        if !conj_holds_on_ranks(&domain, r) {
            continue;
        }
        let (a, b, c) = (&r[..s], &r[s..2 * s], &r[2 * s..]);
        if let (Some(x), Some(y), Some(z)) = (
            classify_slots(calculus, a, b),
            classify_slots(calculus, b, c),
            classify_slots(calculus, a, c),
        ) {
            table[x.index()][y.index()].insert(&z).unwrap();
        }
    }
    table
}

static IA_TABLE: Lazy<Table> = Lazy::new(|| derive_table(Calculus::Ia));
static CDC_TABLE: Lazy<Table> = Lazy::new(|| derive_table(Calculus::Cdc));

/// Composition of two basic interval relations.
pub fn compose_ia_basic(r: usize, s: usize) -> &'static QualRelation {
    &IA_TABLE[r][s]
}

pub fn compose(r: &QualRelation, s: &QualRelation) -> Result<QualRelation> {
    if r.calculus() != s.calculus() {
        return Err(Error::CalculusMismatch {
            left: r.calculus(),
            right: s.calculus(),
        });
    }
    let calculus = r.calculus();
    let table = match calculus {
        Calculus::Ia => &*IA_TABLE,
        Calculus::Cdc => &*CDC_TABLE,
        Calculus::Ba(_) => return compose_blocks(r, s),
        Calculus::Dia => {
            return Err(Error::Unsupported(
                "composition leaves the directed-interval fragment".into(),
            ))
        }
    };
    let mut out = QualRelation::empty(calculus);
    for a in r.indices() {
        for b in s.indices() {
            out = out.union(&table[a][b])?;
        }
    }
    Ok(out)
}

/// Axes of a block are independent, so basic tuples compose axis by axis.
fn compose_blocks(r: &QualRelation, s: &QualRelation) -> Result<QualRelation> {
    let calculus = r.calculus();
    let mut out = QualRelation::empty(calculus);
    for x in r.codes() {
        for y in s.codes() {
            let (BasicCode::Ba(xv), BasicCode::Ba(yv)) = (&x, &y) else {
                unreachable!()
            };
            let axes: Vec<QualRelation> = xv
                .iter()
                .zip(yv)
                .map(|(a, b)| IA_TABLE[a.index()][b.index()].clone())
                .collect();
            out = out.union(&QualRelation::product(&axes)?)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::basic::IaBasic::*;

    #[test]
    fn examples() {
        let c = |a, b| compose(&QualRelation::ia(&[a]), &QualRelation::ia(&[b])).unwrap();
        assert_eq!(c(S, S), QualRelation::ia(&[S]));
        assert_eq!(c(Eq, M), QualRelation::ia(&[M]));
        assert_eq!(c(M, M), QualRelation::ia(&[P]));
        assert_eq!(c(P, Pi), QualRelation::full(Calculus::Ia));
    }

    #[test]
    fn blocks_compose_per_axis() {
        let r = QualRelation::product(&[QualRelation::ia(&[M]), QualRelation::ia(&[S])]).unwrap();
        let rr = compose(&r, &r).unwrap();
        assert_eq!(
            rr,
            QualRelation::product(&[QualRelation::ia(&[P]), QualRelation::ia(&[S])]).unwrap()
        );
    }

    #[test]
    fn cdc_north_north() {
        let n = QualRelation::new(Calculus::Cdc, [BasicCode::Cdc(super::super::basic::CdcBasic::N)])
            .unwrap();
        assert_eq!(compose(&n, &n).unwrap(), n);
        assert!(compose(
            &QualRelation::full(Calculus::Dia),
            &QualRelation::full(Calculus::Dia)
        )
        .is_err());
    }
}
