//! Exact distribution of the symmetrical-node count under both uniform
//! models, moments, coincidence probabilities, and the local-limit
//! diagnostic.
//!
//! For a uniform shape (the Otter model) the count has pmf
//! `P[X_n = k] = [u^k]f_n(u) / u_n`. For a uniform labeled tree the shape t
//! appears with probability `w(t)/(2n-3)!!`, `w(t) = n!/2^sym(t)`, so
//! `P[Y_n = k] = n! · [u^k]f_n(u) / ((2n-3)!! · 2^k)`.
//!
//! Everything here is exact; floats appear only in the Gaussian comparison
//! and in the convenience decimal fields.

use alloc::collections::BTreeMap;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::BivariateSeries;
use crate::tree::{count_phylo, factorial};
use crate::util::{self, ratio_to_f64};

/// Which uniform distribution the tree is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Uniform over the `u_n` shapes of size n.
    Otter,
    /// Uniform over the `(2n-3)!!` labeled trees of size n.
    Phylo,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Otter => "otter",
            Model::Phylo => "phylo",
        }
    }
}

/// Exact pmf of the symmetrical-node count at one size. Only sym values with
/// nonzero probability are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SymDistribution {
    pub model: Model,
    pub n: usize,
    pub pmf: BTreeMap<u32, BigRational>,
}

impl SymDistribution {
    pub fn prob(&self, k: u32) -> BigRational {
        self.pmf.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Sum of all probabilities; exactly 1 for a valid distribution.
    pub fn total(&self) -> BigRational {
        self.pmf.values().sum()
    }
}

/// Exact mean and variance plus decimal `mean/n`, `variance/n` (the scale on
/// which the constants μ and σ² live).
#[derive(Clone, Debug)]
pub struct MomentSummary {
    pub n: usize,
    pub mean: BigRational,
    pub variance: BigRational,
    pub mean_over_n: f64,
    pub variance_over_n: f64,
}

fn check_order(n: usize, f: &BivariateSeries) -> Result<()> {
    if n == 0 {
        return Err(Error::OrderTooSmall { needed: 1, have: 0 });
    }
    if n > f.order() {
        return Err(Error::OrderTooSmall {
            needed: n,
            have: f.order(),
        });
    }
    Ok(())
}

/// Law of the symmetrical-node count over a uniform shape of size n.
pub fn sym_pmf_unlabeled(n: usize, f: &BivariateSeries) -> Result<SymDistribution> {
    check_order(n, f)?;
    let total = f.row_sum(n);
    let mut pmf = BTreeMap::new();
    for (k, c) in f.poly(n).iter().enumerate() {
        if !c.is_zero() {
            pmf.insert(
                k as u32,
                BigRational::new(BigInt::from(c.clone()), BigInt::from(total.clone())),
            );
        }
    }
    Ok(SymDistribution {
        model: Model::Otter,
        n,
        pmf,
    })
}

/// Law of the symmetrical-node count over a uniform labeled tree of size n.
pub fn sym_pmf_labeled(n: usize, f: &BivariateSeries) -> Result<SymDistribution> {
    check_order(n, f)?;
    let n_fact = factorial(n);
    let b_n = count_phylo(n);
    let mut pmf = BTreeMap::new();
    for (k, c) in f.poly(n).iter().enumerate() {
        if !c.is_zero() {
            pmf.insert(
                k as u32,
                BigRational::new(
                    BigInt::from(&n_fact * c),
                    BigInt::from(&b_n << k),
                ),
            );
        }
    }
    Ok(SymDistribution {
        model: Model::Phylo,
        n,
        pmf,
    })
}

/// Exact first and second moments.
pub fn moments(d: &SymDistribution) -> MomentSummary {
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for (&k, p) in &d.pmf {
        let k = BigRational::from_integer(BigInt::from(k));
        mean += &k * p;
        second += &k * &k * p;
    }
    let variance = second - &mean * &mean;
    let n_rat = BigRational::from_integer(BigInt::from(d.n as u64));
    MomentSummary {
        n: d.n,
        mean_over_n: ratio_to_f64(&(&mean / &n_rat)),
        variance_over_n: ratio_to_f64(&(&variance / &n_rat)),
        mean,
        variance,
    }
}

/// Probability that two independent draws share the same sym count: `Σ P[k]²`.
pub fn coincidence_prob(d: &SymDistribution) -> BigRational {
    d.pmf.values().map(|p| p * p).sum()
}

/// `sup_k |σ_n·P[k] − g((k−μ_n)/σ_n)|` over the support, with g the standard
/// normal density. Gaussian values are taken exactly at the lattice points,
/// without continuity correction.
pub fn local_limit_deviation(d: &SymDistribution) -> Result<f64> {
    let m = moments(d);
    if m.variance.is_zero() {
        return Err(Error::DegenerateDistribution { n: d.n });
    }
    let mu = ratio_to_f64(&m.mean);
    let sigma = util::sqrt(ratio_to_f64(&m.variance));
    let norm = 1.0 / util::sqrt(2.0 * PI);
    let mut sup: f64 = 0.0;
    for (&k, p) in &d.pmf {
        let x = (k as f64 - mu) / sigma;
        let g = norm * util::exp(-0.5 * x * x);
        let dev = util::abs(sigma * ratio_to_f64(p) - g);
        if dev > sup {
            sup = dev;
        }
    }
    Ok(sup)
}

/// Limit value of `√(2πn)·σ·Σ P[k]²` rendered as the coincidence prediction
/// `1/(2σ√(πn))`.
pub fn coincidence_asymptotic(n: usize, sigma: f64) -> f64 {
    1.0 / (2.0 * sigma * util::sqrt(PI * n as f64))
}

/// `K = 1/(2√π)`, the coincidence constant of the standard Gaussian density.
pub const COINCIDENCE_K: f64 = 0.282_094_791_773_878_14;

/// Eliminates `c₁/n + c₂/n²` from samples of `c₀ + c₁/n + c₂/n²` taken at
/// n, 2n, 4n; returns the extrapolated `c₀ = (y_n − 6·y_2n + 8·y_4n)/3`.
pub fn richardson3(y_n: f64, y_2n: f64, y_4n: f64) -> f64 {
    (y_n - 6.0 * y_2n + 8.0 * y_4n) / 3.0
}
