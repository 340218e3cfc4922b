//! Belief merging for propositional knowledge bases.
//!
//! The library implements two merge operators — distance-based weighted
//! merging of two bases and prioritized merging of arbitrarily many — together
//! with their inverse problems: given the bases and a desired merge result,
//! decide whether some choice of weights or priority ordering produces exactly
//! that result, and synthesize one when it exists.
//!
//! Modules build on each other in order: [`logic`] (formulas and models),
//! [`distance`] (metrics and the forward weighted merge), [`weights`] (the
//! inverse weighted problem), [`maxsets`] (maximal consistent subsets),
//! [`priority`] (prioritized merging and its inverse), and [`segraph`]
//! (a graph calculus deciding the inverse prioritized problem for binary
//! maxset families).

pub mod distance;
pub mod error;
pub mod logic;
pub mod maxsets;
pub mod priority;
pub mod segraph;
pub mod weights;

pub use error::MergeError;
pub use logic::{Formula, Interpretation, VariableUniverse};
