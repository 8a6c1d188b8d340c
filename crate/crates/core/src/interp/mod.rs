//! Interpretations between structures as executable data.

pub mod catalog;
pub mod homotopy;
pub mod interpretation;
pub mod translate;

pub use catalog::{catalog, definition, definitions, lookup, Definition};
pub use homotopy::{
    check_homotopy_identity, check_sample, homotopy_samples, homotopy_witness, run_homotopy_check,
    HomotopyReport, HomotopyWitness, SampleCheck,
};
pub use interpretation::{compose, CoordMap, Interpretation, RelKey};
pub use translate::{eliminate_forw, same_direction_formula, translate_instance};
