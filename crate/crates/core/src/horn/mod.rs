//! ll-Horn and ORD-Horn clauses over the rational order.

pub mod clause;
pub mod definable;
pub mod minimize;
pub mod parse;
pub mod propagate;

pub use clause::{defines, entails, find_order, is_ll_horn, is_ord_horn, models_of, Clause, ClauseSet, LlClause, OrdClause, SeqLit};
pub use definable::{llhorn_definable, ordhorn_definable, Definable};
pub use minimize::{minimize, removable_clause, shrink_options, shrinkable_clause};
pub use parse::parse_clause;
pub use propagate::{brute_force_satisfiable, ordhorn_satisfiable, propagate, Propagation, PropagationStats};
