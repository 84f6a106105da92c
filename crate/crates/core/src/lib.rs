//! Trapezoid orders: posets, trapezoid representations and the decision
//! procedures that classify orders by the kinds of representations they admit.

pub mod catalog;
pub mod classify;
pub mod constructions;
pub mod format;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod poset;
pub mod rational;
pub mod svg;

pub use geometry::{Interval, Property, PropertySet, Representation, Trapezoid};
pub use poset::Poset;
pub use rational::Rational;
