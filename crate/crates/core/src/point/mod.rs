//! The point language over the dense order of the rationals.

pub mod atom;
pub mod relation;
pub mod store;
pub mod weak_order;

pub use atom::{Dnf, Op, OrderAtom, Term};
pub use relation::{relation_of, PointRelation};
pub use store::{conjunction_satisfiable, ConjunctiveStore};
pub use weak_order::{enumerate_weak_orders, weak_order_of, WeakOrder};
