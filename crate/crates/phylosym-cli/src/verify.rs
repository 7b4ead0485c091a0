//! Self-verification suites. `fast` cross-checks the exact machinery
//! against exhaustive enumeration and the embedded reference data in a few
//! seconds; `full` adds sampling uniformity tests and asymptotic coherence
//! checks that need more computation.

use std::collections::HashMap;

use anyhow::Result;
use clap::ValueEnum;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phylosym::asym;
use phylosym::sample::{self, UTable};
use phylosym::series::{self, BivariateSeries};
use phylosym::stats;
use phylosym::tree;

use crate::bfile;
use crate::chi_p_value;

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

/// Outcome of one named check: either a detail line or a failure reason.
type Check = std::result::Result<String, String>;

struct Suite {
    passed: usize,
    failed: usize,
}

impl Suite {
    fn report(&mut self, name: &str, outcome: Check) {
        match outcome {
            Ok(detail) => {
                self.passed += 1;
                println!("ok   {name}: {detail}");
            }
            Err(reason) => {
                self.failed += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    }
}

pub fn run(level: Level, order: usize, precision: f64, seed: u64) -> Result<bool> {
    let mut suite = Suite { passed: 0, failed: 0 };
    let ord = order.clamp(16, 128);
    let f = series::bivariate_f(ord);

    suite.report("enumeration vs series", enumeration_vs_series(&f));
    suite.report("reference prefixes", prefixes(ord));
    suite.report("labeled specialization", egf_specialization(&f));
    suite.report("isomorphism probabilities", pn_spot_values(&f));
    suite.report("Cauchy-Schwarz bound", cauchy_schwarz(&f));
    suite.report("singularity locations", singularities());
    suite.report("evaluator agreement", evaluator_agreement(&f, precision));
    suite.report("sampler determinism", sampler_determinism(&f, seed));

    if level == Level::Full {
        let full_order = order.max(256);
        let f_full = series::bivariate_f(full_order);
        suite.report("uniformity over labeled trees (n = 6)", uniform_labeled(6, seed));
        suite.report("uniformity over shapes (n = 10)", uniform_shapes(10, seed));
        suite.report("sym histogram fit (n = 100)", histogram_pvalues(&f_full, seed));
        suite.report("growth-rate coherence", growth_coherence(&f_full));
    }

    println!("verify: {} passed, {} failed", suite.passed, suite.failed);
    Ok(suite.failed == 0)
}

fn enumeration_vs_series(f: &BivariateSeries) -> Check {
    for n in 1..=10usize {
        let table = tree::enumerate_shapes(n).map_err(|e| e.to_string())?;
        let poly = f.poly(n);
        let mut counts = vec![0u64; n.max(poly.len())];
        for e in &table.entries {
            counts[e.sym as usize] += 1;
        }
        for (k, c) in poly.iter().enumerate() {
            if *c != BigUint::from(counts[k]) {
                return Err(format!("n = {n}, sym = {k}: series {c}, enumeration {}", counts[k]));
            }
        }
        if counts.iter().skip(poly.len()).any(|&c| c != 0) {
            return Err(format!("n = {n}: enumeration produced sym values missing from the series"));
        }
        if table.total_labelings() != tree::count_phylo(n) {
            return Err(format!("n = {n}: Σ n!/2^sym does not equal (2n-3)!!"));
        }
    }
    Ok("sym polynomials and labeling totals match for n ≤ 10".into())
}

fn prefixes(order: usize) -> Check {
    bfile::verify_prefixes(order).map_err(|e| format!("{e:#}"))?;
    Ok("A001190, A003609 and A001147 reproduced".into())
}

fn egf_specialization(f: &BivariateSeries) -> Check {
    let half = BigRational::new(1.into(), 2.into());
    let s = series::specialize(f, &half);
    for n in 1..=f.order() {
        let lhs = s.coeff(n) * BigRational::from_integer(BigInt::from(tree::factorial(n)));
        let rhs = BigRational::from_integer(BigInt::from(tree::count_phylo(n)));
        if lhs != rhs {
            return Err(format!("n = {n}: n!·[zⁿ]F(z,1/2) = {lhs}, but (2n-3)!! = {rhs}"));
        }
    }
    Ok(format!("n!·[zⁿ]F(z,1/2) = (2n-3)!! for n ≤ {}", f.order()))
}

fn pn_spot_values(f: &BivariateSeries) -> Check {
    let pn = series::pn_list(f, 7).map_err(|e| e.to_string())?;
    let expected: [(usize, i64, i64); 6] =
        [(2, 1, 1), (3, 1, 1), (4, 17, 25), (5, 3, 7), (6, 5, 21), (7, 13, 99)];
    for (n, num, den) in expected {
        let want = BigRational::new(num.into(), den.into());
        if pn[n] != want {
            return Err(format!("p_{n} = {}, expected {want}", pn[n]));
        }
    }
    Ok("p_2..p_7 equal 1, 1, 17/25, 3/7, 5/21, 13/99".into())
}

fn cauchy_schwarz(f: &BivariateSeries) -> Check {
    let pn = series::pn_list(f, f.order()).map_err(|e| e.to_string())?;
    let u = series::otter_counts(f.order());
    for n in 2..=f.order() {
        let prod = &pn[n] * BigRational::from_integer(BigInt::from(u[n].clone()));
        let one: BigRational = One::one();
        if u[n].is_one() {
            if prod != one {
                return Err(format!("n = {n}: single shape but p_n ≠ 1"));
            }
        } else if prod <= one {
            return Err(format!("n = {n}: p_n·u_n = {prod} violates the strict bound"));
        }
    }
    Ok(format!("p_n·u_n ≥ 1 with equality exactly at u_n = 1, n ≤ {}", f.order()))
}

fn singularities() -> Check {
    let rho = asym::solve_rho().map_err(|e| e.to_string())?;
    let again = asym::solve_rho_at(0.25).map_err(|e| e.to_string())?;
    let rho1 = asym::solve_rho_at(1.0).map_err(|e| e.to_string())?;
    let rho_half = asym::solve_rho_at(0.5).map_err(|e| e.to_string())?;
    let rho2 = asym::solve_rho_at(2.0).map_err(|e| e.to_string())?;
    for r in [&rho, &again, &rho1, &rho_half, &rho2] {
        if r.residual.abs() > 1e-10 {
            return Err(format!("residual {:.2e} at u = {}", r.residual, r.u));
        }
    }
    if (rho.rho_u - again.rho_u).abs() > 1e-13 {
        return Err("solve_rho and solve_rho_at(1/4) disagree".into());
    }
    if !(0.4 < rho.rho_u && rho.rho_u < 0.625) {
        return Err(format!("ρ = {} outside (0.4, 0.625)", rho.rho_u));
    }
    if (rho_half.rho_u - 0.5).abs() > 1e-9 {
        return Err(format!("ρ(1/2) = {} but the EGF pole is exactly 1/2", rho_half.rho_u));
    }
    if !(rho2.rho_u < rho1.rho_u && rho1.rho_u < rho_half.rho_u && rho_half.rho_u < rho.rho_u) {
        return Err("radii are not decreasing in u".into());
    }
    Ok(format!(
        "ρ(2) = {:.6} < ρ(1) = {:.6} < ρ(1/2) = {:.6} < ρ(1/4) = {:.6}",
        rho2.rho_u, rho1.rho_u, rho_half.rho_u, rho.rho_u
    ))
}

fn evaluator_agreement(f: &BivariateSeries, precision: f64) -> Check {
    let tol = precision.clamp(1e-15, 1e-6);
    let mut compared = 0usize;
    for (num, den) in [(1i64, 4i64), (1, 2), (1, 1), (2, 1)] {
        let u0 = BigRational::new(num.into(), den.into());
        let s = series::specialize(f, &u0);
        let uf = num as f64 / den as f64;
        let radius = asym::solve_rho_at(uf).map_err(|e| e.to_string())?.rho_u;
        for z in [0.05f64, 0.1, 0.2] {
            // skip points where series truncation itself exceeds the bar
            if (f.order() as f64) * (z / radius).ln() > -30.0 {
                continue;
            }
            let from_series = asym::eval_series_f64(&s, z);
            let direct = asym::eval_f_numeric(z, uf, tol).map_err(|e| e.to_string())?;
            if (from_series - direct).abs() > 1e-9 + tol {
                return Err(format!(
                    "z = {z}, u = {uf}: series {from_series:.15}, evaluator {direct:.15}"
                ));
            }
            compared += 1;
        }
    }
    if compared < 6 {
        return Err(format!("only {compared} points inside the truncation budget; raise --order"));
    }
    Ok(format!("{compared} evaluation points agree within 1e-9"))
}

fn sampler_determinism(f: &BivariateSeries, seed: u64) -> Check {
    let n = 16;
    let unlabeled = stats::sym_pmf_unlabeled(n, f).map_err(|e| e.to_string())?;
    let labeled = stats::sym_pmf_labeled(n, f).map_err(|e| e.to_string())?;
    for d in [&unlabeled, &labeled] {
        let a = sample::empirical_histogram(d, 2000, seed);
        let b = sample::empirical_histogram(d, 2000, seed);
        if a != b {
            return Err(format!("{} model: same seed, different report", d.model.name()));
        }
        let total: u64 = a.histogram.values().sum();
        if total != 2000 {
            return Err(format!("{} model: histogram sums to {total}", d.model.name()));
        }
        let c = sample::empirical_histogram(d, 2000, seed.wrapping_add(1));
        if c.histogram == a.histogram {
            return Err(format!(
                "{} model: distinct seeds produced identical histograms",
                d.model.name()
            ));
        }
    }
    Ok("reports reproduce bit-for-bit under a fixed seed".into())
}

/// Pearson statistic for a uniform law over `cells` categories, of which
/// only the observed ones appear in `counts`.
fn uniform_chi_square(counts: &HashMap<String, u64>, cells: u64, trials: u64) -> (f64, usize) {
    let e = trials as f64 / cells as f64;
    let mut chi = 0.0;
    for &o in counts.values() {
        let d = o as f64 - e;
        chi += d * d / e;
    }
    chi += (cells - counts.len() as u64) as f64 * e;
    (chi, (cells - 1) as usize)
}

fn uniform_check(counts: HashMap<String, u64>, cells: u64, trials: u64) -> Check {
    if counts.len() as u64 > cells {
        return Err(format!("{} distinct objects sampled, only {cells} exist", counts.len()));
    }
    let (chi, df) = uniform_chi_square(&counts, cells, trials);
    let p = chi_p_value(chi, df).expect("df > 0");
    if p < 1e-3 {
        return Err(format!("χ² = {chi:.1} on {df} cells gives p = {p:.2e}"));
    }
    Ok(format!(
        "{} of {cells} objects seen, χ² = {chi:.1}, p = {p:.3}",
        counts.len()
    ))
}

fn uniform_labeled(n: usize, seed: u64) -> Check {
    let trials = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: HashMap<String, u64> = HashMap::new();
    for _ in 0..trials {
        let t = sample::sample_phylo(n, &mut rng);
        *counts.entry(tree::phylo_key(&t)).or_default() += 1;
    }
    let cells: u64 = tree::count_phylo(n)
        .try_into()
        .map_err(|_| "cell count overflow".to_string())?;
    uniform_check(counts, cells, trials)
}

fn uniform_shapes(n: usize, seed: u64) -> Check {
    let trials = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = UTable::new(n);
    let mut counts: HashMap<String, u64> = HashMap::new();
    for _ in 0..trials {
        let s = sample::sample_otter(n, &table, &mut rng).map_err(|e| e.to_string())?;
        *counts.entry(s.to_string()).or_default() += 1;
    }
    let cells: u64 = table
        .count(n)
        .try_into()
        .map_err(|_| "cell count overflow".to_string())?;
    uniform_check(counts, cells, trials)
}

fn histogram_pvalues(f: &BivariateSeries, seed: u64) -> Check {
    let n = 100;
    let trials = 20_000;
    let mut details = Vec::new();
    let unlabeled = stats::sym_pmf_unlabeled(n, f).map_err(|e| e.to_string())?;
    let labeled = stats::sym_pmf_labeled(n, f).map_err(|e| e.to_string())?;
    for d in [&unlabeled, &labeled] {
        let r = sample::empirical_histogram(d, trials, seed);
        if r.low_expectation {
            return Err(format!("{}: pooling failed to reach expectation 5", d.model.name()));
        }
        let p = chi_p_value(r.chi_square, r.df)
            .ok_or_else(|| format!("{}: degenerate histogram", d.model.name()))?;
        if p < 1e-3 {
            return Err(format!(
                "{}: χ² = {:.1} on {} cells gives p = {p:.2e}",
                d.model.name(),
                r.chi_square,
                r.df + 1
            ));
        }
        details.push(format!("{} p = {p:.3}", d.model.name()));
    }
    Ok(details.join(", "))
}

fn growth_coherence(f: &BivariateSeries) -> Check {
    if f.order() < 200 {
        return Err(format!("needs --order ≥ 200, series has {}", f.order()));
    }
    let base = (f.order() / 4).min(100);
    let rates = asym::growth_rates().map_err(|e| e.to_string())?;
    let (unlabeled, labeled) = asym::nth_root_rates(f, base).map_err(|e| e.to_string())?;
    if (unlabeled - rates.unlabeled).abs() > 5e-3 {
        return Err(format!(
            "unlabeled: nth-root {unlabeled:.6} vs radius ratio {:.6}",
            rates.unlabeled
        ));
    }
    if (labeled - rates.labeled).abs() > 5e-3 {
        return Err(format!(
            "labeled: nth-root {labeled:.6} vs radius ratio {:.6}",
            rates.labeled
        ));
    }
    Ok(format!(
        "nth-root estimates {unlabeled:.5} and {labeled:.5} match the radius ratios"
    ))
}
