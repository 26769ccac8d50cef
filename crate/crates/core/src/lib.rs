//! Exact, finite-scale realization of a choice-free construction of a maximal
//! cofinitary group.
//!
//! The infinite objects (permutations of ℕ, the action of the free group on
//! continuum many generators, transmutation sites) are represented lazily:
//! points are arbitrary-precision naturals, the interval partition of ℕ is
//! built level by level, and every predicate that quantifies over an infinite
//! set is evaluated on an explicit window and reported as a [`TriBool`].

pub mod bignum;
pub mod coding;
pub mod dpipeline;
pub mod injection;
pub mod map;
pub mod mcg;
pub mod scenarios;
pub mod suites;
pub mod surgery;
pub mod tower;
pub mod tribool;
pub mod words;

pub use num_bigint::BigUint as Nat;
pub use tribool::TriBool;
