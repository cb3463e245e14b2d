use clap::Args;
use kicktop_core::coeff_stats::{
    chisq_cdf, chisq_pdf, distance_report, empirical_log_histogram, pool_coefficients, Binning,
    RmseForm,
};
use kicktop_core::floquet::KickedTopParams;
use serde::Serialize;

use super::{resolve, slug, Run};
use crate::config::{parse_basis, usage, CommonDefaults, FIGURE_KAPPAS};
use crate::error::Result;
use crate::output::num;
use crate::CommonArgs;

/// Points of the empirical CDF written per pool.
const CDF_POINTS: usize = 400;

#[derive(Args, Debug)]
pub struct CoeffdistArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Random coherent states pooled per (j, kappa, alpha).
    #[arg(long)]
    samples: Option<usize>,
    /// Comma list of chi^2 degrees of freedom to compare against.
    #[arg(long)]
    nu: Option<String>,
    /// Expansion basis: full, even or odd.
    #[arg(long)]
    basis: Option<String>,
    /// squared or literal (unsquared integrand).
    #[arg(long)]
    rmse: Option<String>,
    /// Fixed number of ln x bins; Freedman-Diaconis when absent.
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Serialize)]
struct Settings {
    samples: usize,
    nu: String,
    basis: String,
    rmse: String,
    bins: Option<usize>,
}

const DEFAULTS: CommonDefaults = CommonDefaults {
    j: "150",
    kappa: FIGURE_KAPPAS,
    alpha: "4pi/7",
};

pub fn run(args: CoeffdistArgs) -> Result<()> {
    let (layers, common) = resolve("coeffdist", args.common, &DEFAULTS)?;
    let settings = Settings {
        samples: layers.value(args.samples, "samples", 10_000)?,
        nu: layers.text(args.nu, "nu", "2")?,
        basis: layers.text(args.basis, "basis", "full")?,
        rmse: layers.text(args.rmse, "rmse", "squared")?,
        bins: layers.value(args.bins.map(Some), "bins", None)?,
    };
    let nus: Vec<f64> = settings
        .nu
        .split(',')
        .map(|t| match t.trim() {
            "1" => Ok(1.0),
            "2" => Ok(2.0),
            "4" => Ok(4.0),
            other => Err(usage(format!("nu '{other}' (expected 1, 2 or 4)"))),
        })
        .collect::<Result<_>>()?;
    let basis = parse_basis(&settings.basis)?;
    let form = match settings.rmse.as_str() {
        "squared" => RmseForm::Squared,
        "literal" => RmseForm::LiteralAbs,
        f => return Err(usage(format!("rmse '{f}' (expected squared or literal)"))),
    };
    let binning = match settings.bins {
        None => Binning::FreedmanDiaconis,
        Some(0) => return Err(usage("bins must be >= 1".into())),
        Some(b) => Binning::Fixed(b),
    };
    let mut run = Run::start(&layers, common, None, &settings)?;
    let seed = run.common.seed;
    let nu_cols: Vec<String> = nus.iter().map(|n| format!("chi2_{n}")).collect();
    let mut summary = Vec::new();
    for (j, kappa, alpha) in run.points() {
        let eig = run.eigensystem(&KickedTopParams::new(j, kappa, alpha)?)?;
        let pool = pool_coefficients(&eig, basis, settings.samples, seed)?;
        let mean_x = pool.mean();
        let tag = slug(Some(j), kappa, alpha);

        let hist = empirical_log_histogram(&pool, binning)?;
        let mut columns = vec!["ln_x", "density"];
        columns.extend(nu_cols.iter().map(String::as_str));
        let rows = hist.centers().into_iter().zip(&hist.density).map(|(l, &d)| {
            let x = l.exp();
            let mut r = vec![num(l), num(d)];
            // density of ln x is x P(x)
            r.extend(nus.iter().map(|&nu| num(x * chisq_pdf(x, nu, mean_x))));
            r
        });
        run.out.csv(&format!("coeffdist-hist-{tag}.csv"), &columns, rows)?;

        let mut sorted: Vec<f64> = pool.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut columns = vec!["x", "empirical"];
        columns.extend(nu_cols.iter().map(String::as_str));
        let rows = (1..=CDF_POINTS.min(n)).map(|k| {
            let idx = (k * n) / CDF_POINTS.min(n) - 1;
            let x = sorted[idx];
            let mut r = vec![num(x), num((idx + 1) as f64 / n as f64)];
            r.extend(nus.iter().map(|&nu| num(chisq_cdf(x, nu, mean_x))));
            r
        });
        run.out.csv(&format!("coeffdist-cdf-{tag}.csv"), &columns, rows)?;

        for &nu in &nus {
            let rep = distance_report(&pool, nu, form)?;
            summary.push(vec![
                j.to_string(),
                num(kappa),
                num(alpha),
                num(nu),
                num(rep.mean_x),
                num(rep.skld),
                num(rep.rmse),
                num(rep.x_range.0),
                num(rep.x_range.1),
                rep.bins.to_string(),
                rep.samples.to_string(),
                rep.zeros_excluded.to_string(),
            ]);
        }
    }
    run.out.csv(
        "coeffdist-summary.csv",
        &["j", "kappa", "alpha", "nu", "mean_x", "skld", "rmse", "x0", "xm", "bins", "samples", "zeros_excluded"],
        summary,
    )?;
    run.finish()
}
