//! Exact and asymptotic machinery for two random models of binary trees:
//! phylogenetic trees (rooted binary, leaves labeled 1..=n) and their
//! unlabeled shapes.
//!
//! The crate computes, with exact integer/rational arithmetic,
//!
//! - tree counts: `(2n−3)!!` labeled trees, Wedderburn–Etherington shape
//!   counts u_n;
//! - the bivariate series `F(z,u) = Σ_t u^sym(t) z^|t|` over shapes, where
//!   `sym(t)` counts internal nodes whose two subtrees are isomorphic;
//! - the probability p_n that two independent uniform phylogenetic trees
//!   are isomorphic, via `p_n = (n!/(2n−3)!!)²·[zⁿ]F(z,1/4)`;
//! - the exact laws, moments and coincidence probabilities of the
//!   symmetrical-node count under both models;
//!
//! and, in floating point, the singularity analysis behind the asymptotic
//! regime: the dominant singularity ρ(u) of `z ↦ F(z,u)`, the constants of
//! `p_n ∼ a·b^{−n}·n^{3/2}`, Gaussian limit-law parameters, and growth rates
//! of `E[2^sym]`. Exact-uniform samplers for both models close the loop
//! between formulas and brute-force enumeration.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `phylosym-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asym;
pub mod error;
pub mod sample;
pub mod series;
pub mod stats;
pub mod tree;
mod util;

pub use error::{Error, Result};
pub use util::{ln_ratio, ratio_to_f64};
