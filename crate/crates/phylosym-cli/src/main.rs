//! Command-line front end: exact tables, asymptotic constants, sampling
//! reports and the verification suites, as CSV on stdout for tabular data
//! and JSON for structured results. Exact rationals are always rendered as
//! fraction strings, never floats.

mod bfile;
mod verify;

use std::io;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use phylosym::asym;
use phylosym::ratio_to_f64;
use phylosym::sample::{empirical_histogram, SampleReport};
use phylosym::series::{self, BivariateSeries};
use phylosym::stats::{self, Model, SymDistribution};
use phylosym::tree;

#[derive(Parser)]
#[command(name = "phylosym", version, about = "Symmetry statistics of random phylogenetic trees and their shapes")]
struct Cli {
    /// Truncation order for exact series computations
    #[arg(long, global = true, default_value_t = 256)]
    order: usize,
    /// Tolerance for floating-point evaluations and reports
    #[arg(long, global = true, default_value_t = 1e-12)]
    precision: f64,
    /// Seed for sampling commands
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum CliModel {
    /// Uniform over shapes
    Otter,
    /// Uniform over labeled trees
    Phylo,
}

impl From<CliModel> for Model {
    fn from(m: CliModel) -> Model {
        match m {
            CliModel::Otter => Model::Otter,
            CliModel::Phylo => Model::Phylo,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact counts b_n, u_n and the EGF coefficients W_n
    Counts {
        #[arg(long, default_value_t = 20)]
        max_n: usize,
    },
    /// Exact isomorphism probabilities p_n
    Pn {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Add the asymptotic approximation and its relative error
        #[arg(long)]
        asymptotic: bool,
    },
    /// The constants of the asymptotic laws, as JSON
    Constants,
    /// Exact pmf (or moments) of the symmetrical-node count
    Dist {
        #[arg(long, value_enum)]
        model: CliModel,
        #[arg(long)]
        n: usize,
        /// Print exact moments as JSON instead of the pmf table
        #[arg(long)]
        moments: bool,
    },
    /// Exact sym-coincidence probabilities against the Gaussian prediction
    Coincide {
        #[arg(long, value_enum)]
        model: CliModel,
        /// Sizes to evaluate
        #[arg(long, num_args = 1.., default_values_t = [100usize, 200, 400])]
        n: Vec<usize>,
    },
    /// Sample trees and report the sym histogram with a chi-square check
    Sample {
        #[arg(long, value_enum)]
        model: CliModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Plot-ready histogram CSV: counts, exact pmf and Gaussian overlay
    Histo {
        #[arg(long, value_enum)]
        model: CliModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Run the verification suites
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: verify::Level,
    },
    /// Check an OEIS b-file against embedded and computed values
    BfileCheck {
        #[arg(long, value_enum)]
        id: bfile::SeqId,
        #[arg(long)]
        path: std::path::PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Counts { max_n } => cmd_counts(max_n)?,
        Cmd::Pn { max_n, asymptotic } => cmd_pn(cli.order, max_n, asymptotic)?,
        Cmd::Constants => cmd_constants(cli.order, cli.precision)?,
        Cmd::Dist { model, n, moments } => cmd_dist(cli.order, model.into(), n, moments)?,
        Cmd::Coincide { model, n } => cmd_coincide(cli.order, model.into(), &n)?,
        Cmd::Sample { model, n, trials } => cmd_sample(cli.order, model.into(), n, trials, cli.seed)?,
        Cmd::Histo { model, n, trials } => cmd_histo(cli.order, model.into(), n, trials, cli.seed)?,
        Cmd::Verify { level } => {
            if !verify::run(level, cli.order, cli.precision, cli.seed)? {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::BfileCheck { id, path } => {
            let report = bfile::load_and_check(id, &path, cli.order)?;
            println!(
                "{}: {} lines checked, {} beyond the computed range",
                report.id.name(),
                report.checked,
                report.skipped
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn pmf_for(model: Model, n: usize, f: &BivariateSeries) -> Result<SymDistribution> {
    let d = match model {
        Model::Otter => stats::sym_pmf_unlabeled(n, f),
        Model::Phylo => stats::sym_pmf_labeled(n, f),
    };
    Ok(d?)
}

pub(crate) fn chi_p_value(chi: f64, df: usize) -> Option<f64> {
    if df == 0 {
        return None;
    }
    ChiSquared::new(df as f64).ok().map(|d| 1.0 - d.cdf(chi))
}

fn cmd_counts(max_n: usize) -> Result<()> {
    let u = series::otter_counts(max_n);
    let w = series::phylo_egf(max_n);
    let mut wtr = csv::Writer::from_writer(io::stdout());
    wtr.write_record(["n", "b_n", "u_n", "W_n"])?;
    for n in 1..=max_n {
        wtr.write_record([
            n.to_string(),
            tree::count_phylo(n).to_string(),
            u[n].to_string(),
            w.coeff(n).to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// The default fit window [100, 250], clamped into the available order.
fn c1_window(order: usize) -> (usize, usize) {
    let hi = order.min(250);
    let lo = 100.min(hi / 2).max(5);
    (lo, hi)
}

fn cmd_pn(order: usize, max_n: usize, asymptotic: bool) -> Result<()> {
    let needed = if asymptotic { order.max(max_n).max(60) } else { order.max(max_n) };
    let f = series::bivariate_f(needed);
    let pn = series::pn_list(&f, needed)?;
    let approx = if asymptotic {
        let (lo, hi) = c1_window(needed);
        let c = asym::constants(&pn, lo..=hi)?;
        Some(asym::accuracy_report(&pn, c.a, c.b, c.c1))
    } else {
        None
    };
    let mut wtr = csv::Writer::from_writer(io::stdout());
    if approx.is_some() {
        wtr.write_record(["n", "p_n", "decimal", "approximation", "rel_error"])?;
    } else {
        wtr.write_record(["n", "p_n", "decimal"])?;
    }
    for n in 1..=max_n {
        let mut row = vec![
            n.to_string(),
            pn[n].to_string(),
            format!("{:.12e}", ratio_to_f64(&pn[n])),
        ];
        if let Some(rows) = &approx {
            if n >= 2 {
                let r = rows[n - 2];
                row.push(format!("{:.12e}", r.approx));
                row.push(format!("{:.3e}", r.rel_error));
            } else {
                row.push(String::new());
                row.push(String::new());
            }
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn cmd_constants(order: usize, precision: f64) -> Result<()> {
    let f = series::bivariate_f(order);
    let pn = series::pn_list(&f, order.min(250))?;
    let (lo, hi) = c1_window(order);
    let rho = asym::solve_rho()?;
    let a = asym::constant_a(rho.rho_u)?;
    let c1 = asym::fit_c1(&pn, lo..=hi, a, 4.0 * rho.rho_u)?;
    let q = asym::derive_sigma()?;
    let g = asym::growth_rates()?;
    let rho_half = asym::solve_rho_at(0.5)?;
    let nth = if order >= 160 {
        Some(asym::nth_root_rates(&f, (order / 4).min(100))?)
    } else {
        None
    };
    let bundle = serde_json::json!({
        "rho": rho.rho_u,
        "b": 4.0 * rho.rho_u,
        "a": a,
        "c1": c1,
        "rho1": g.rho1,
        "rho_half": rho_half.rho_u,
        "rho2": g.rho2,
        "mu": q.mu,
        "sigma": q.sigma,
        "mu_hat": q.mu_hat,
        "sigma_hat": q.sigma_hat,
        "growth_labeled": g.labeled,
        "growth_unlabeled": g.unlabeled,
        "growth_labeled_nth_root": nth.map(|t| t.1),
        "growth_unlabeled_nth_root": nth.map(|t| t.0),
        "coincidence_constant": stats::COINCIDENCE_K,
        "precision": {
            "requested": precision,
            "rho_residual": rho.residual,
            "rho_half_residual": rho_half.residual,
            "evaluation_depth": rho.depth,
            "c1_window": [lo, hi],
            "derivative_check": "step-halved central differences, tolerance 1e-6",
        },
        "provenance": asym::AsymptoticConstants::provenance()
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(*v)))
            .collect::<serde_json::Map<_, _>>(),
    });
    println!("{}", serde_json::to_string_pretty(&bundle)?);
    Ok(())
}

fn gaussian_overlay(d: &SymDistribution) -> Option<(f64, f64)> {
    let m = stats::moments(d);
    let var = ratio_to_f64(&m.variance);
    (var > 0.0).then(|| (ratio_to_f64(&m.mean), var.sqrt()))
}

fn gauss_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn cmd_dist(order: usize, model: Model, n: usize, moments: bool) -> Result<()> {
    let f = series::bivariate_f(order.max(n));
    let d = pmf_for(model, n, &f)?;
    if moments {
        let m = stats::moments(&d);
        let deviation = stats::local_limit_deviation(&d).ok();
        let out = serde_json::json!({
            "model": model.name(),
            "n": n,
            "mean": m.mean.to_string(),
            "mean_decimal": ratio_to_f64(&m.mean),
            "variance": m.variance.to_string(),
            "variance_decimal": ratio_to_f64(&m.variance),
            "mean_over_n": m.mean_over_n,
            "variance_over_n": m.variance_over_n,
            "local_limit_deviation": deviation,
            "coincidence": stats::coincidence_prob(&d).to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(());
    }
    let overlay = gaussian_overlay(&d);
    let mut wtr = csv::Writer::from_writer(io::stdout());
    if overlay.is_some() {
        wtr.write_record(["k", "probability", "decimal", "gaussian"])?;
    } else {
        wtr.write_record(["k", "probability", "decimal"])?;
    }
    for (k, p) in &d.pmf {
        let mut row = vec![
            k.to_string(),
            p.to_string(),
            format!("{:.12e}", ratio_to_f64(p)),
        ];
        if let Some((mu, sigma)) = overlay {
            row.push(format!(
                "{:.12e}",
                gauss_density((*k as f64 - mu) / sigma) / sigma
            ));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn cmd_coincide(order: usize, model: Model, ns: &[usize]) -> Result<()> {
    let max_n = ns.iter().copied().max().unwrap_or(0);
    let f = series::bivariate_f(order.max(max_n));
    let q = asym::derive_sigma()?;
    let sigma = match model {
        Model::Otter => q.sigma,
        Model::Phylo => q.sigma_hat,
    };
    let mut wtr = csv::Writer::from_writer(io::stdout());
    wtr.write_record(["n", "exact", "decimal", "prediction", "ratio"])?;
    for &n in ns {
        let d = pmf_for(model, n, &f)?;
        let exact = stats::coincidence_prob(&d);
        let decimal = ratio_to_f64(&exact);
        let pred = stats::coincidence_asymptotic(n, sigma);
        wtr.write_record([
            n.to_string(),
            exact.to_string(),
            format!("{:.12e}", decimal),
            format!("{:.12e}", pred),
            format!("{:.6}", decimal / pred),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn report_json(r: &SampleReport, p_value: Option<f64>) -> serde_json::Value {
    serde_json::json!({
        "model": r.model.name(),
        "n": r.n,
        "trials": r.trials,
        "seed": r.seed,
        "rng": r.rng_algorithm,
        "histogram": r
            .histogram
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(*v)))
            .collect::<serde_json::Map<_, _>>(),
        "chi_square": r.chi_square,
        "df": r.df,
        "p_value": p_value,
        "low_expectation": r.low_expectation,
    })
}

fn cmd_sample(order: usize, model: Model, n: usize, trials: u64, seed: u64) -> Result<()> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let f = series::bivariate_f(order.max(n));
    let d = pmf_for(model, n, &f)?;
    let report = empirical_histogram(&d, trials, seed);
    let p = chi_p_value(report.chi_square, report.df);
    println!("{}", serde_json::to_string_pretty(&report_json(&report, p))?);
    Ok(())
}

fn cmd_histo(order: usize, model: Model, n: usize, trials: u64, seed: u64) -> Result<()> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let f = series::bivariate_f(order.max(n));
    let d = pmf_for(model, n, &f)?;
    let report = empirical_histogram(&d, trials, seed);
    let overlay = gaussian_overlay(&d);
    let mut wtr = csv::Writer::from_writer(io::stdout());
    wtr.write_record(["k", "count", "frequency", "exact_probability", "gaussian"])?;
    let zero = BigRational::from_integer(0.into());
    let keys: std::collections::BTreeSet<u32> = d
        .pmf
        .keys()
        .copied()
        .chain(report.histogram.keys().copied())
        .collect();
    for k in keys {
        let count = report.histogram.get(&k).copied().unwrap_or(0);
        let p = d.pmf.get(&k).unwrap_or(&zero);
        let gauss = overlay
            .map(|(mu, sigma)| {
                format!("{:.12e}", gauss_density((k as f64 - mu) / sigma) / sigma)
            })
            .unwrap_or_default();
        wtr.write_record([
            k.to_string(),
            count.to_string(),
            format!("{:.8e}", count as f64 / trials as f64),
            format!("{:.12e}", ratio_to_f64(p)),
            gauss,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

