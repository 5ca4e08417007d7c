//! Combinatorial toolkit for finitely generated subgroups of free groups
//! and finite two-complexes: Stallings automata, fiber products and the
//! rank-1 Hanna Neumann sum, the reduction/collapse calculus on
//! two-complexes, bounded immersion scans, integer cellular homology and
//! one-relator hierarchy steps.

pub mod error;
pub mod words;
pub mod graphs;
pub mod presentations;
pub mod subgroups;
pub mod complexes;
pub mod homology;
pub mod immersions;

pub use error::Error;
