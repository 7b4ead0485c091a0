//! Exact truncated power series and the coefficient recursions for the three
//! defining functional equations:
//!
//! ```text
//! B(z) = z + B(z)²/2                      (labeled trees, EGF)
//! U(z) = z + (U(z)² + U(z²))/2            (shape counts)
//! F(z,u) = z + F(z,u)²/2 + (u-½)F(z²,u²)  (shapes weighted u^sym)
//! ```
//!
//! All three are solved by coefficient recursion; closed forms exist for the
//! first (`[zⁿ]B = (2n-3)!!/n!`) and serve as cross-checks only.
//!
//! The bivariate recursion is run in an integer-only rearrangement. With
//! `p(u) = f_{n/2}(u)` the even-n correction `(u-½)·p(u²)` combines with the
//! `k = n/2` convolution term into
//!
//! ```text
//! (p(u)² - p(u²))/2  +  u·p(u²)
//! ```
//!
//! whose subtraction is coefficientwise nonnegative and whose halving is
//! exact: `[u^{2m}](p² - p∘u²) = 2·(Σ_{i<j, i+j=2m} c_i c_j + C(c_m, 2))` and
//! odd coefficients of `p²` are plain doubled cross terms. Everything stays
//! in `BigUint`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{CheckedSub, One, Zero};

use crate::error::{Error, Result};
use crate::tree::{count_phylo, factorial};

/// Series with exact rational coefficients for `z^0..z^N`; index = power.
/// Tree series have zero constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl RationalSeries {
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        RationalSeries { coeffs }
    }

    /// Truncation order N (largest stored power).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `[zⁿ]`, panics above the order.
    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn get(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.get(n)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }
}

/// The bivariate series `F(z,u) = Σ f_n(u) zⁿ`: one dense integer polynomial
/// in `u` per power of `z`. `polys[n][k]` counts shapes of size n with
/// exactly k symmetrical nodes.
#[derive(Clone, Debug)]
pub struct BivariateSeries {
    polys: Vec<Vec<BigUint>>,
}

impl BivariateSeries {
    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.polys.len() - 1
    }

    /// The polynomial `f_n(u)` as a dense coefficient slice (index = power
    /// of u). Empty slice above the order.
    pub fn poly(&self, n: usize) -> &[BigUint] {
        self.polys.get(n).map_or(&[], Vec::as_slice)
    }

    /// `f_n(1) = u_n`, the number of shapes of size n.
    pub fn row_sum(&self, n: usize) -> BigUint {
        self.poly(n).iter().sum()
    }

    fn require(&self, n: usize) -> Result<()> {
        if n > self.order() {
            return Err(Error::OrderTooSmall {
                needed: n,
                have: self.order(),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Kronecker-substitution polynomial arithmetic on BigUint coefficients
// ---------------------------------------------------------------------------

const WORD_BITS: u64 = 32;

fn max_bits(p: &[BigUint]) -> u64 {
    p.iter().map(BigUint::bits).max().unwrap_or(0)
}

/// Packs `p` into one integer with `words` 32-bit words per coefficient slot.
fn pack(p: &[BigUint], words: usize) -> BigUint {
    let mut digits = vec![0u32; p.len() * words];
    for (i, c) in p.iter().enumerate() {
        for (j, d) in c.iter_u32_digits().enumerate() {
            digits[i * words + j] = d;
        }
    }
    BigUint::new(digits)
}

fn unpack(packed: &BigUint, words: usize, len: usize) -> Vec<BigUint> {
    let digits = packed.to_u32_digits();
    (0..len)
        .map(|i| {
            let lo = (i * words).min(digits.len());
            let hi = ((i + 1) * words).min(digits.len());
            BigUint::new(digits[lo..hi].to_vec())
        })
        .collect()
}

/// Product of two dense polynomials via a single big-integer multiplication.
/// Slot width covers the largest possible convolution coefficient, so slots
/// never carry into each other.
fn upoly_mul(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let slot_bits = max_bits(a) + max_bits(b) + ilog2_ceil(a.len().min(b.len())) + 1;
    let words = slot_bits.div_ceil(WORD_BITS) as usize;
    let prod = pack(a, words) * pack(b, words);
    unpack(&prod, words, a.len() + b.len() - 1)
}

fn ilog2_ceil(n: usize) -> u64 {
    (usize::BITS - n.next_power_of_two().leading_zeros()) as u64
}

fn add_assign_shifted(acc: &mut Vec<BigUint>, add: &[BigUint], shift: usize) {
    if acc.len() < add.len() + shift {
        acc.resize(add.len() + shift, BigUint::zero());
    }
    for (i, c) in add.iter().enumerate() {
        acc[i + shift] += c;
    }
}

/// `p(u²)` as a dense polynomial (exponent doubling).
fn spread_square(p: &[BigUint]) -> Vec<BigUint> {
    if p.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigUint::zero(); 2 * p.len() - 1];
    for (i, c) in p.iter().enumerate() {
        out[2 * i] = c.clone();
    }
    out
}

fn trim(mut v: Vec<BigUint>) -> Vec<BigUint> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

// ---------------------------------------------------------------------------
// The three recursions
// ---------------------------------------------------------------------------

/// Shape counts `u_n` for `n = 0..=N` by the quadratic recursion.
pub fn otter_counts(n_max: usize) -> Vec<BigUint> {
    let mut u = vec![BigUint::zero(); n_max + 1];
    if n_max >= 1 {
        u[1] = BigUint::one();
    }
    for n in 2..=n_max {
        let mut s = BigUint::zero();
        for k in 1..=(n - 1) / 2 {
            s += &u[k] * &u[n - k];
        }
        if n % 2 == 0 {
            let m = &u[n / 2];
            s += m * (m + 1u32) >> 1;
        }
        u[n] = s;
    }
    u
}

/// `U(z)` to order N as a series (integer coefficients).
pub fn otter_series(n_max: usize) -> RationalSeries {
    RationalSeries::from_coeffs(
        otter_counts(n_max)
            .into_iter()
            .map(|c| BigRational::from_integer(BigInt::from(c)))
            .collect(),
    )
}

/// The EGF `B(z)` to order N via `B = z + B²/2`; `[zⁿ]B = (2n-3)!!/n!`.
pub fn phylo_egf(n_max: usize) -> RationalSeries {
    let mut w = vec![BigRational::zero(); n_max + 1];
    if n_max >= 1 {
        w[1] = BigRational::one();
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for n in 2..=n_max {
        let mut s = BigRational::zero();
        for k in 1..n {
            s += &w[k] * &w[n - k];
        }
        w[n] = s * &half;
    }
    RationalSeries::from_coeffs(w)
}

/// Closed form `(2n-3)!!/n!` for `[zⁿ]B(z)`.
pub fn phylo_egf_closed(n: usize) -> BigRational {
    BigRational::new(BigInt::from(count_phylo(n)), BigInt::from(factorial(n)))
}

/// Builds `F(z,u)` to order N by the integer recursion described in the
/// module docs.
pub fn bivariate_f(n_max: usize) -> BivariateSeries {
    let mut polys: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    polys.push(Vec::new());
    if n_max >= 1 {
        polys.push(vec![BigUint::one()]); // f_1 = 1 (a leaf has sym 0)
    }
    for n in 2..=n_max {
        let mut acc: Vec<BigUint> = Vec::new();
        for k in 1..=(n - 1) / 2 {
            add_assign_shifted(&mut acc, &upoly_mul(&polys[k], &polys[n - k]), 0);
        }
        if n % 2 == 0 {
            let p = &polys[n / 2];
            let sq = upoly_mul(p, p);
            let spread = spread_square(p);
            // (p² - p∘u²)/2, exact and nonnegative
            let mut mixed = Vec::with_capacity(sq.len());
            for (i, c) in sq.iter().enumerate() {
                let d = match spread.get(i) {
                    Some(s) => c
                        .checked_sub(s)
                        .expect("p² dominates p(u²) coefficientwise"),
                    None => c.clone(),
                };
                debug_assert!(!d.bit(0), "difference must be even");
                mixed.push(d >> 1);
            }
            add_assign_shifted(&mut acc, &mixed, 0);
            add_assign_shifted(&mut acc, &spread, 1); // u·p(u²)
        }
        polys.push(trim(acc));
    }
    BivariateSeries { polys }
}

// ---------------------------------------------------------------------------
// Specialization and p_n
// ---------------------------------------------------------------------------

/// Evaluates a dense integer polynomial at an exact rational point.
pub fn eval_upoly(poly: &[BigUint], u0: &BigRational) -> BigRational {
    if poly.is_empty() {
        return BigRational::zero();
    }
    let p = u0.numer();
    let q = u0.denom();
    let d = poly.len() - 1;
    // homogeneous Horner: Σ c_k p^k q^{d-k} / q^d
    let mut acc = BigInt::from(poly[d].clone());
    let mut qpow = BigInt::one();
    for k in (0..d).rev() {
        qpow *= q;
        acc = acc * p + BigInt::from(poly[k].clone()) * &qpow;
    }
    BigRational::new(acc, q.pow(d as u32))
}

/// The univariate series `z ↦ F(z, u0)` with exact coefficients.
pub fn specialize(f: &BivariateSeries, u0: &BigRational) -> RationalSeries {
    RationalSeries::from_coeffs(
        f.polys
            .iter()
            .map(|p| eval_upoly(p, u0))
            .collect(),
    )
}

/// Exact probability that two independent uniform phylogenetic trees of size
/// n are isomorphic: `p_n = (n!/(2n-3)!!)² · f_n(1/4)`, with `p_1 = 1`.
pub fn pn_exact(n: usize, f: &BivariateSeries) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::OrderTooSmall { needed: 1, have: 0 });
    }
    if n == 1 {
        return Ok(BigRational::one());
    }
    f.require(n)?;
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let fn_quarter = eval_upoly(f.poly(n), &quarter);
    let norm = BigRational::new(BigInt::from(factorial(n)), BigInt::from(count_phylo(n)));
    Ok(&norm * &norm * fn_quarter)
}

/// `p_n` for `n = 0..=max_n` (index n; the n=0 slot repeats p₁=1).
pub fn pn_list(f: &BivariateSeries, max_n: usize) -> Result<Vec<BigRational>> {
    f.require(max_n)?;
    let mut out = Vec::with_capacity(max_n + 1);
    out.push(BigRational::one());
    for n in 1..=max_n {
        out.push(pn_exact(n, f)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_shapes;
    use alloc::string::ToString;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn otter_prefix() {
        let u = otter_counts(12);
        let expect = [0u32, 1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207, 451];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(u[n], BigUint::from(*e));
        }
    }

    #[test]
    fn egf_matches_closed_form() {
        let b = phylo_egf(64);
        assert_eq!(b.coeff(1), &BigRational::one());
        assert_eq!(b.coeff(2), &ratio(1, 2));
        assert_eq!(b.coeff(4), &ratio(5, 8));
        for n in 1..=64 {
            assert_eq!(b.coeff(n), &phylo_egf_closed(n));
        }
    }

    #[test]
    fn bivariate_first_terms() {
        // F = z + uz² + uz³ + (u³+u)z⁴ + ...
        let f = bivariate_f(4);
        assert_eq!(f.poly(1), &[BigUint::one()]);
        assert_eq!(f.poly(2), &[BigUint::zero(), BigUint::one()]);
        assert_eq!(f.poly(3), &[BigUint::zero(), BigUint::one()]);
        assert_eq!(
            f.poly(4),
            &[
                BigUint::zero(),
                BigUint::one(),
                BigUint::zero(),
                BigUint::one()
            ]
        );
    }

    #[test]
    fn bivariate_matches_enumeration() {
        let f = bivariate_f(10);
        for n in 1..=10 {
            let table = enumerate_shapes(n).unwrap();
            let mut counts = vec![BigUint::zero(); n];
            for e in &table.entries {
                counts[e.sym as usize] += 1u32;
            }
            let counts = trim(counts);
            assert_eq!(f.poly(n), counts.as_slice(), "n={n}");
        }
    }

    #[test]
    fn row_sums_are_otter_numbers() {
        let f = bivariate_f(40);
        let u = otter_counts(40);
        for n in 1..=40 {
            assert_eq!(f.row_sum(n), u[n]);
            if n >= 2 {
                assert!(f.poly(n)[0].is_zero(), "sym ≥ 1 for n ≥ 2");
            }
        }
    }

    #[test]
    fn specialize_at_two() {
        let f = bivariate_f(8);
        let s = specialize(&f, &ratio(2, 1));
        let expect = [1u32, 2, 2, 10, 14, 42, 90, 354];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(s.coeff(i + 1), &BigRational::from_integer(BigInt::from(*e)));
        }
    }

    #[test]
    fn specialize_at_half_is_egf() {
        let f = bivariate_f(32);
        let s = specialize(&f, &ratio(1, 2));
        for n in 1..=32 {
            let lhs = s.coeff(n) * BigRational::from_integer(BigInt::from(factorial(n)));
            assert_eq!(lhs, BigRational::from_integer(BigInt::from(count_phylo(n))));
        }
    }

    #[test]
    fn pn_small_values() {
        let f = bivariate_f(10);
        assert_eq!(pn_exact(1, &f).unwrap(), BigRational::one());
        assert_eq!(pn_exact(4, &f).unwrap(), ratio(17, 25));
        assert_eq!(pn_exact(5, &f).unwrap(), ratio(3, 7));
        assert_eq!(pn_exact(6, &f).unwrap(), ratio(5, 21));
        assert_eq!(pn_exact(7, &f).unwrap(), ratio(13, 99));
        assert!(pn_exact(11, &f).is_err());
    }

    #[test]
    fn pn_equals_kappa_sum_at_6() {
        // Σ κ(t)² over shapes, κ(t) = w(t)/(2n-3)!!
        let f = bivariate_f(6);
        let table = enumerate_shapes(6).unwrap();
        let total = BigRational::from_integer(BigInt::from(count_phylo(6)));
        let mut acc = BigRational::zero();
        for e in &table.entries {
            let k = BigRational::from_integer(BigInt::from(e.labelings.clone())) / &total;
            acc += &k * &k;
        }
        assert_eq!(acc, pn_exact(6, &f).unwrap());
    }

    #[test]
    fn kronecker_against_schoolbook() {
        // mixed-magnitude coefficients
        let a: Vec<BigUint> = (0..17u32)
            .map(|i| BigUint::from(i) * BigUint::from(u64::MAX) + BigUint::from(i * i + 1))
            .collect();
        let b: Vec<BigUint> = (0..9u32)
            .map(|i| BigUint::from(u32::MAX - i) * BigUint::from(i % 3))
            .collect();
        let fast = upoly_mul(&a, &b);
        let mut slow = vec![BigUint::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn series_text_sanity() {
        let f = bivariate_f(4);
        let s = specialize(&f, &ratio(1, 4));
        assert_eq!(s.coeff(4).to_string(), "17/64");
    }
}
