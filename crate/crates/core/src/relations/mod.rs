//! Domain calculi: basic codes, their endpoint semantics, and disjunctive relations.

pub mod basic;
pub mod compose;
pub mod relation;

pub use basic::{
    basic_to_point_formula, classify_pair, holds, BasicCode, CdcBasic, DiaBasic, IaBasic,
};
pub use compose::compose;
pub use relation::QualRelation;
