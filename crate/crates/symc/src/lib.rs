//! Exact-arithmetic computations in classical symmetric Lie algebras.
//!
//! A symmetric Lie algebra is a pair `(g, k)` where `g` is a reductive Lie
//! algebra with an involution `θ` and `k` its fixed subalgebra; `p` denotes the
//! `−1` eigenspace, so `g = k ⊕ p`.  This crate realizes the classical
//! families over `ℚ` or `ℚ(i)`, and computes structural invariants of
//! commuting pairs `(x, y) ∈ p × p` — centralizers, Jordan decompositions,
//! p-Levi subalgebras, irregularity numbers, ab-diagrams, Satake diagram
//! combinatorics — entirely in exact rational arithmetic.
//!
//! Everything here is deterministic: all randomized searches take explicit
//! seeds and derive their streams with a counter-based generator.

pub mod error;
pub mod par;

pub mod linalg;

pub mod analysis;
pub mod pairs;
pub mod sampling;
pub mod structure;

pub use error::{Error, Result};
