//! Well-structured transition systems: orderings and upward-closed sets,
//! model classes, the classical decision procedures, monotonic abstractions,
//! and a Presburger-based monotonicity checker.

pub mod abstraction;
pub mod algorithms;
pub mod models;
pub mod monotonicity;
pub mod wqo;
