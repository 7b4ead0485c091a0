//! Floating-point singularity analysis.
//!
//! Everything rests on the nested square-root form
//!
//! ```text
//! F(z,u) = 1 − √(1 − 2z − (2u−1)·F(z², u²))
//! ```
//!
//! which evaluates F at a point by descending through (z^{2^j}, u^{2^j})
//! until the correction term is negligible, then unwinding. The dominant
//! singularity ρ(u) of z ↦ F(z,u) is the branch point of the outermost
//! square root, i.e. the smallest positive root of
//!
//! ```text
//! R(z) = 1 − 2z − (2u−1)·F(z², u²) = 0,
//! ```
//!
//! the inner F being analytic there because ρ(u)² stays well inside the
//! radius of F(·, u²). A negative radicand during evaluation is reported as
//! [`Error::PastSingularity`] and doubles as the root-finder's bracket
//! signal.
//!
//! The asymptotic machinery derived from this (constant `a`, the c₁ fit,
//! quasi-power means and variances) lives here too; exact inputs (the p_n
//! and the E[2^sym] sequences) come from the series module.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::series::{eval_upoly, BivariateSeries, RationalSeries};
use crate::stats::richardson3;
use crate::tree::{count_phylo, factorial};
use crate::util::{self, ln_big, ln_ratio, ratio_to_f64};

const MAX_DEPTH: usize = 64;
const EVAL_TOL: f64 = 1e-15;

/// Location of the dominant singularity of `z ↦ F(z,u)`.
#[derive(Clone, Copy, Debug)]
pub struct SingularityResult {
    pub u: f64,
    pub rho_u: f64,
    /// Value of the singular equation at `rho_u`.
    pub residual: f64,
    /// Nesting depth the evaluator used at the root.
    pub depth: usize,
}

/// The constants of the leading asymptotic form `a·b^{−n}·n^{3/2}(1 + c₁/n)`.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticConstants {
    pub rho: f64,
    pub b: f64,
    pub a: f64,
    pub c1: f64,
}

impl AsymptoticConstants {
    /// How each constant was obtained.
    pub fn provenance() -> [(&'static str, &'static str); 4] {
        [
            ("rho", "smallest positive root of 1 − 2z + F(z², 1/16)/2, bisection + Newton"),
            ("b", "4·rho exactly"),
            ("a", "2·√(π·rho·(2 − rho·F_z(rho², 1/16))) from the square-root singular expansion"),
            ("c1", "least-squares fit of exact p_n against a·b^{−n}·n^{3/2}(1 + c₁/n + c₂/n²)"),
        ]
    }
}

/// Exponential growth rates of the two E[2^sym] sequences.
#[derive(Clone, Copy, Debug)]
pub struct GrowthRates {
    pub rho1: f64,
    pub rho2: f64,
    /// `1/(2ρ₁)`, labeled model.
    pub labeled: f64,
    /// `ρ₁/ρ(2)`, unlabeled model.
    pub unlabeled: f64,
}

/// Limit mean and standard deviation of sym/√n-normalized counts:
/// `X_n ≈ μn + σ√n·N(0,1)` (unlabeled), `Y_n ≈ μ̂n + σ̂√n·N(0,1)` (labeled).
#[derive(Clone, Copy, Debug)]
pub struct QuasiPowers {
    pub mu: f64,
    pub sigma: f64,
    pub mu_hat: f64,
    pub sigma_hat: f64,
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

/// F, ∂F/∂z and the nesting depth, by descent and unwind.
fn eval_f_all(z: f64, u: f64, tol: f64) -> Result<(f64, f64, usize)> {
    let mut levels: Vec<(f64, f64)> = Vec::new();
    let (mut zj, mut uj) = (z, u);
    loop {
        levels.push((zj, uj));
        let (zn, un) = (zj * zj, uj * uj);
        if !(util::abs((2.0 * un - 1.0) * zn) > 0.125 * tol)
            || levels.len() >= MAX_DEPTH
            || !zn.is_finite()
            || !un.is_finite()
        {
            break;
        }
        zj = zn;
        uj = un;
    }
    let depth = levels.len();
    let (mut f, mut df) = (0.0f64, 0.0f64);
    for &(zj, uj) in levels.iter().rev() {
        let w = 2.0 * uj - 1.0;
        let rad = 1.0 - 2.0 * zj - w * f;
        if !(rad > 0.0) {
            return Err(Error::PastSingularity { z, radicand: rad });
        }
        let s = util::sqrt(rad);
        df = (2.0 + w * 2.0 * zj * df) / (2.0 * s);
        f = 1.0 - s;
    }
    Ok((f, df, depth))
}

/// `F(z,u)` to within `tol`, for z inside the disk of convergence.
pub fn eval_f_numeric(z: f64, u: f64, tol: f64) -> Result<f64> {
    eval_f_all(z, u, tol).map(|(f, _, _)| f)
}

/// `F` and `∂F/∂z` together.
pub fn eval_f_dz(z: f64, u: f64, tol: f64) -> Result<(f64, f64)> {
    eval_f_all(z, u, tol).map(|(f, df, _)| (f, df))
}

/// The singular equation `R(z) = 1 − 2z − (2u−1)F(z²,u²)` and its
/// z-derivative.
fn radicand(z: f64, u: f64) -> Result<(f64, f64, usize)> {
    let (fi, fzi, depth) = eval_f_all(z * z, u * u, EVAL_TOL)?;
    let w = 2.0 * u - 1.0;
    Ok((
        1.0 - 2.0 * z - w * fi,
        -2.0 - w * 2.0 * z * fzi,
        depth + 1,
    ))
}

/// Horner evaluation of an exact series at a float point.
pub fn eval_series_f64(s: &RationalSeries, z: f64) -> f64 {
    let mut acc = 0.0f64;
    for c in s.coeffs().iter().rev() {
        acc = acc * z + ratio_to_f64(c);
    }
    acc
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

fn solve_in_bracket(u: f64, mut lo: f64, mut hi: f64) -> Result<SingularityResult> {
    // positive side of R, with "past the singularity" counting as negative
    let positive = |z: f64| -> Result<bool> {
        match radicand(z, u) {
            Ok((r, _, _)) => Ok(r > 0.0),
            Err(Error::PastSingularity { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !positive(lo)? || positive(hi)? {
        return Err(Error::Bracket { lo, hi });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // polish from the evaluable side; adopt a Newton step only if it stays in
    // the bracket and still evaluates
    let mut best = radicand(lo, u).map(|(r, dr, depth)| (lo, r, dr, depth))?;
    for _ in 0..4 {
        let (z, r, dr, _) = best;
        let next = z - r / dr;
        if !(next >= lo && next <= hi) || next == z {
            break;
        }
        match radicand(next, u) {
            Ok((r2, dr2, d2)) if util::abs(r2) <= util::abs(r) => {
                best = (next, r2, dr2, d2);
            }
            _ => break,
        }
    }
    let (rho_u, residual, _, depth) = best;
    if !(util::abs(residual) < 1e-11) {
        return Err(Error::Precision {
            what: "singular-equation residual",
            disagreement: residual,
        });
    }
    Ok(SingularityResult {
        u,
        rho_u,
        residual,
        depth,
    })
}

/// Dominant singularity of `z ↦ F(z,u)` for u in roughly [1/5, 2.1].
pub fn solve_rho_at(u: f64) -> Result<SingularityResult> {
    solve_in_bracket(u, 0.25, 0.68)
}

/// The singularity ρ of `f(z) = F(z,1/4)`, bracketed a priori in
/// `[0.4, 0.625]`.
pub fn solve_rho() -> Result<SingularityResult> {
    solve_in_bracket(0.25, 0.4, 0.625)
}

// ---------------------------------------------------------------------------
// Constants of the asymptotic law
// ---------------------------------------------------------------------------

/// The multiplicative constant `a`.
///
/// Near ρ the radicand is `R(z) ≈ (−R′(ρ))·ρ·(1 − z/ρ)`, so
/// `f(z) = 1 − √(ρ(−R′(ρ)))·(1−z/ρ)^{1/2} + …`, and coefficient transfer
/// plus Stirling for `(n!/(2n−3)!!)² ~ 4πn³·4^{−n}` give
/// `a = 2√(π·ρ·(−R′(ρ)))` with `R′(ρ) = −2 + ρ·F_z(ρ², 1/16)`.
pub fn constant_a(rho: f64) -> Result<f64> {
    let z2 = rho * rho;
    let (_, fz, _) = eval_f_all(z2, 1.0 / 16.0, EVAL_TOL)?;
    // cross-check the analytic derivative by central differences
    let h = 1e-6;
    let fd = (eval_f_numeric(z2 + h, 1.0 / 16.0, EVAL_TOL)?
        - eval_f_numeric(z2 - h, 1.0 / 16.0, EVAL_TOL)?)
        / (2.0 * h);
    if util::abs(fd - fz) > 1e-6 {
        return Err(Error::Precision {
            what: "F_z analytic vs finite-difference",
            disagreement: fd - fz,
        });
    }
    let minus_rprime = 2.0 - rho * fz;
    Ok(2.0 * util::sqrt(PI * rho * minus_rprime))
}

/// Least-squares c₁ from exact p_n over a window: fits
/// `p_n·bⁿ·n^{−3/2}/a − 1 ≈ c₁/n + c₂/n²` and reports c₁ (c₂ absorbs the
/// next-order term).
pub fn fit_c1(pn: &[BigRational], window: RangeInclusive<usize>, a: f64, b: f64) -> Result<f64> {
    let (lo, hi) = (*window.start(), *window.end());
    if hi >= pn.len() {
        return Err(Error::OrderTooSmall {
            needed: hi,
            have: pn.len().saturating_sub(1),
        });
    }
    let points = hi.saturating_sub(lo) + 1;
    if lo < 2 || points < 10 {
        return Err(Error::WindowTooSmall { points, min: 10 });
    }
    let (ln_a, ln_b) = (util::ln(a), util::ln(b));
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in lo..=hi {
        let nf = n as f64;
        let ln_y = ln_ratio(&pn[n]) + nf * ln_b - 1.5 * util::ln(nf) - ln_a;
        let y = util::exp(ln_y) - 1.0;
        let x1 = 1.0 / nf;
        let x2 = x1 * x1;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        t1 += x1 * y;
        t2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    Ok((t1 * s22 - t2 * s12) / det)
}

/// One row of the approximation-accuracy table.
#[derive(Clone, Copy, Debug)]
pub struct AccuracyRow {
    pub n: usize,
    pub exact: f64,
    pub approx: f64,
    pub rel_error: f64,
}

/// Relative error of `a·b^{−n}·n^{3/2}(1 + c₁/n)` against exact p_n, for
/// every n ≥ 2 available. Ratios are formed in log space so the table stays
/// meaningful long after p_n underflows intuition.
pub fn accuracy_report(pn: &[BigRational], a: f64, b: f64, c1: f64) -> Vec<AccuracyRow> {
    let (ln_a, ln_b) = (util::ln(a), util::ln(b));
    (2..pn.len())
        .map(|n| {
            let nf = n as f64;
            let ln_exact = ln_ratio(&pn[n]);
            let ln_approx = ln_a - nf * ln_b + 1.5 * util::ln(nf) + util::ln(1.0 + c1 / nf);
            AccuracyRow {
                n,
                exact: util::exp(ln_exact),
                approx: util::exp(ln_approx),
                rel_error: util::abs(util::exp(ln_approx - ln_exact) - 1.0),
            }
        })
        .collect()
}

/// Growth rates of E[2^sym] from the singularity radii.
pub fn growth_rates() -> Result<GrowthRates> {
    let rho1 = solve_rho_at(1.0)?.rho_u;
    let rho2 = solve_rho_at(2.0)?.rho_u;
    Ok(GrowthRates {
        rho1,
        rho2,
        labeled: 1.0 / (2.0 * rho1),
        unlabeled: rho1 / rho2,
    })
}

/// The same two rates from nth roots of the exact sequences, Richardson-
/// extrapolated at n ∈ {base, 2·base, 4·base}. The sequences are
/// `E[2^sym] = f_n(2)/u_n` (unlabeled) and `n!·u_n/(2n−3)!!` (labeled); both
/// are pure exponentials times `1 + O(1/n)`, so `ln E(n)/n` has the
/// `c₀ + c₁/n (+ c₂/n²)` shape richardson3 expects.
pub fn nth_root_rates(f: &BivariateSeries, base: usize) -> Result<(f64, f64)> {
    if f.order() < 4 * base {
        return Err(Error::OrderTooSmall {
            needed: 4 * base,
            have: f.order(),
        });
    }
    let two = BigRational::from_integer(2.into());
    let at = |n: usize| -> (f64, f64) {
        let f2 = eval_upoly(f.poly(n), &two);
        let un = f.row_sum(n);
        let unl = (ln_big(f2.numer()) - ln_big(&un.clone().into())) / n as f64;
        let lab = (ln_big(&(factorial(n) * &un).into()) - ln_big(&count_phylo(n).into()))
            / n as f64;
        (unl, lab)
    };
    let (u1, l1) = at(base);
    let (u2, l2) = at(2 * base);
    let (u4, l4) = at(4 * base);
    Ok((
        util::exp(richardson3(u1, u2, u4)),
        util::exp(richardson3(l1, l2, l4)),
    ))
}

// ---------------------------------------------------------------------------
// Quasi-power constants
// ---------------------------------------------------------------------------

/// ρ(u), first and second derivatives at u0 by 5-point central stencils.
fn rho_derivs(u0: f64, h: f64) -> Result<(f64, f64, f64)> {
    let r = |du: f64| -> Result<f64> { Ok(solve_rho_at(u0 + du)?.rho_u) };
    let (m2, m1, z0, p1, p2) = (r(-2.0 * h)?, r(-h)?, r(0.0)?, r(h)?, r(2.0 * h)?);
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z0 + 16.0 * p1 - p2) / (12.0 * h * h);
    Ok((z0, d1, d2))
}

/// Mean/variance constants from one probability-generating-function scaling:
/// with `h(s) = ln ρ(u0) − ln ρ(u0·e^s)` (the per-step exponent of the
/// quasi-power form at substitution point u0), `μ = h′(0)` and `σ² = h″(0)`:
///
/// ```text
/// μ  = −u0·ρ′(u0)/ρ(u0)
/// σ² = −u0²·ρ″(u0)/ρ(u0) − u0·ρ′(u0)/ρ(u0) + (u0·ρ′(u0)/ρ(u0))²
/// ```
fn quasi_pair(u0: f64, h: f64) -> Result<(f64, f64)> {
    let (r, d1, d2) = rho_derivs(u0, h)?;
    let g = u0 * d1 / r;
    let mu = -g;
    let var = -(u0 * u0 * d2) / r - g + g * g;
    Ok((mu, var))
}

/// μ, σ (unlabeled) and μ̂, σ̂ (labeled) from the ρ(u) route, with a
/// step-halving stability check on the numerical derivatives.
///
/// The labeled law is the unlabeled one tilted by 2^{−sym}: its pgf scaling
/// uses ρ at u0 = 1/2, so the same formulas apply with u0 = 1/2.
pub fn derive_sigma() -> Result<QuasiPowers> {
    let h = 1e-2;
    let coarse = (quasi_pair(1.0, h)?, quasi_pair(0.5, h)?);
    let fine = (quasi_pair(1.0, 0.5 * h)?, quasi_pair(0.5, 0.5 * h)?);
    let checks = [
        coarse.0 .0 - fine.0 .0,
        coarse.0 .1 - fine.0 .1,
        coarse.1 .0 - fine.1 .0,
        coarse.1 .1 - fine.1 .1,
    ];
    for d in checks {
        if util::abs(d) > 1e-6 {
            return Err(Error::Precision {
                what: "quasi-power derivative step-halving",
                disagreement: d,
            });
        }
    }
    let ((mu, var), (mu_hat, var_hat)) = fine;
    Ok(QuasiPowers {
        mu,
        sigma: util::sqrt(var),
        mu_hat,
        sigma_hat: util::sqrt(var_hat),
    })
}

/// Bundle ρ, b, a and the fitted c₁.
pub fn constants(pn: &[BigRational], window: RangeInclusive<usize>) -> Result<AsymptoticConstants> {
    let rho = solve_rho()?.rho_u;
    let a = constant_a(rho)?;
    let b = 4.0 * rho;
    let c1 = fit_c1(pn, window, a, b)?;
    Ok(AsymptoticConstants { rho, b, a, c1 })
}

/// `[zⁿ]s · ρⁿ · n^{3/2}` — converges to `a/(4π)` for the p_n-generating
/// specialization; a direct check that exact coefficients see the same
/// singularity the solver found.
pub fn singular_coefficient_limit(s: &RationalSeries, rho: f64, n: usize) -> f64 {
    util::exp(ln_ratio(s.coeff(n)) + n as f64 * util::ln(rho) + 1.5 * util::ln(n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{bivariate_f, pn_list, specialize};
    use num_bigint::BigInt;
    use std::sync::OnceLock;

    fn shared() -> &'static BivariateSeries {
        static CELL: OnceLock<BivariateSeries> = OnceLock::new();
        CELL.get_or_init(|| bivariate_f(200))
    }

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn closed_form_at_half() {
        // (2u−1) vanishes: F(z,1/2) = 1 − √(1−2z)
        let v = eval_f_numeric(0.3, 0.5, 1e-14).unwrap();
        assert!((v - (1.0 - 0.4f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn eval_matches_exact_series() {
        let f = shared();
        for (num, den) in [(1i64, 16i64), (1, 4), (1, 2), (1, 1), (2, 1)] {
            let s = specialize(f, &ratio(num, den));
            let u = num as f64 / den as f64;
            for z in [0.05, 0.15, 0.25] {
                let direct = eval_f_numeric(z, u, 1e-14).unwrap();
                let series = eval_series_f64(&s, z);
                assert!(
                    (direct - series).abs() < 1e-9,
                    "z={z} u={u}: {direct} vs {series}"
                );
            }
        }
    }

    #[test]
    fn past_singularity_signals() {
        assert!(matches!(
            eval_f_numeric(0.45, 1.0, 1e-12),
            Err(Error::PastSingularity { .. })
        ));
    }

    #[test]
    fn rho_locations() {
        let r = solve_rho().unwrap();
        assert!((r.rho_u - 0.589_918_409_274_932_2).abs() < 5e-13);
        assert!(r.residual.abs() < 1e-11);
        assert!(r.rho_u > 0.4 && r.rho_u < 0.625);
        assert!(r.depth > 1);

        let r1 = solve_rho_at(1.0).unwrap();
        assert!((r1.rho_u - 0.402_697_503_671_441_3).abs() < 1e-10);
        assert!(r.rho_u > r1.rho_u);

        let rh = solve_rho_at(0.5).unwrap();
        assert!((rh.rho_u - 0.5).abs() < 1e-13);

        let rq = solve_rho_at(0.25).unwrap();
        assert!((rq.rho_u - r.rho_u).abs() < 1e-14);

        let r2 = solve_rho_at(2.0).unwrap();
        assert!((r2.rho_u - 0.301_398_664_653_658_2).abs() < 1e-10);
    }

    #[test]
    fn constant_a_value() {
        let rho = solve_rho().unwrap().rho_u;
        let a = constant_a(rho).unwrap();
        assert!((a - 3.174_701_064_8).abs() < 5e-8, "a={a}");
    }

    #[test]
    fn quasi_power_values() {
        let q = derive_sigma().unwrap();
        assert!((q.mu - 0.358_695_748_8).abs() < 1e-7, "mu={}", q.mu);
        assert!((q.mu_hat - 0.271_041_668_5).abs() < 1e-7, "mu_hat={}", q.mu_hat);
        assert!((q.sigma - 0.388_223_131_8).abs() < 1e-6, "sigma={}", q.sigma);
        assert!(
            (q.sigma_hat - 0.323_950_679_4).abs() < 1e-6,
            "sigma_hat={}",
            q.sigma_hat
        );
    }

    #[test]
    fn growth_rate_values() {
        let g = growth_rates().unwrap();
        assert!((g.labeled - 1.241_626_768_1).abs() < 1e-8);
        assert!((g.unlabeled - 1.336_095_845_5).abs() < 1e-8);

        let (unl, lab) = nth_root_rates(shared(), 50).unwrap();
        assert!((unl - g.unlabeled).abs() < 2e-3, "unl={unl}");
        assert!((lab - g.labeled).abs() < 2e-3, "lab={lab}");
    }

    #[test]
    fn c1_fit_and_accuracy() {
        let pn = pn_list(shared(), 160).unwrap();
        let rho = solve_rho().unwrap().rho_u;
        let a = constant_a(rho).unwrap();
        let b = 4.0 * rho;
        let c1 = fit_c1(&pn, 40..=80, a, b).unwrap();
        assert!((c1 + 0.605).abs() < 0.02, "c1={c1}");

        assert!(matches!(
            fit_c1(&pn, 100..=105, a, b),
            Err(Error::WindowTooSmall { .. })
        ));

        let report = accuracy_report(&pn, a, b, c1);
        for row in report.iter().filter(|r| r.n >= 12 && r.n <= 160) {
            assert!(row.rel_error < 1e-2, "n={} err={}", row.n, row.rel_error);
        }
    }

    #[test]
    fn coefficients_see_the_singularity() {
        let f = shared();
        let s = specialize(f, &ratio(1, 4));
        let rho = solve_rho().unwrap().rho_u;
        let a = constant_a(rho).unwrap();
        let target = a / (4.0 * PI);
        for n in [120usize, 180] {
            let lim = singular_coefficient_limit(&s, rho, n);
            assert!((lim / target - 1.0).abs() < 0.02, "n={n}: {lim} vs {target}");
        }
    }

    #[test]
    fn bracket_rejects_bad_range() {
        assert!(matches!(
            solve_in_bracket(0.25, 0.61, 0.68),
            Err(Error::Bracket { .. })
        ));
    }
}
