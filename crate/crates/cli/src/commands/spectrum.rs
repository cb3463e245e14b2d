use clap::Args;
use kicktop_core::floquet::{sector_quasienergies, KickedTopParams};
use kicktop_core::spectral::{
    brody_pdf, fit_brody, ratio_stats, spacing_histogram, spacings_from_quasienergies,
};
use serde::Serialize;

use super::{resolve, slug, Run};
use crate::config::{parse_parity, usage, CommonDefaults, FIGURE_KAPPAS};
use crate::error::Result;
use crate::output::num;
use crate::CommonArgs;

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// even, odd or both (each sector is analysed separately).
    #[arg(long)]
    parity: Option<String>,
    /// Histogram bins on [0, s_max).
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    s_max: Option<f64>,
    /// Include the gap across the branch cut at pi.
    #[arg(long)]
    periodic: Option<bool>,
}

#[derive(Serialize)]
struct Settings {
    parity: String,
    bins: usize,
    s_max: f64,
    periodic: bool,
}

const DEFAULTS: CommonDefaults = CommonDefaults {
    j: "1000",
    kappa: FIGURE_KAPPAS,
    alpha: "4pi/7",
};

pub fn run(args: SpectrumArgs) -> Result<()> {
    let (layers, common) = resolve("spectrum", args.common, &DEFAULTS)?;
    let settings = Settings {
        parity: layers.text(args.parity, "parity", "even")?,
        bins: layers.value(args.bins, "bins", 50)?,
        s_max: layers.value(args.s_max, "s_max", 4.0)?,
        periodic: layers.value(args.periodic, "periodic", true)?,
    };
    let parities = parse_parity(&settings.parity)?;
    if settings.bins == 0 || settings.s_max <= 0.0 {
        return Err(usage("bins and s_max must be positive".into()));
    }
    let mut run = Run::start(&layers, common, None, &settings)?;
    let mut summary = Vec::new();
    for (j, kappa, alpha) in run.points() {
        let params = KickedTopParams::new(j, kappa, alpha)?;
        for &parity in &parities {
            let nu = sector_quasienergies(&params, parity)?;
            let ens = spacings_from_quasienergies(&nu, settings.periodic)?;
            let fit = fit_brody(&ens)?;
            let ratios = ratio_stats(&ens.raw_gaps)?;
            let hist = spacing_histogram(&ens.spacings, settings.bins, settings.s_max);
            let rows = hist.centers.iter().zip(&hist.density).map(|(&s, &d)| {
                vec![
                    num(s),
                    num(d),
                    num(brody_pdf(s, fit.beta)),
                    num(brody_pdf(s, 0.0)),
                    num(brody_pdf(s, 1.0)),
                ]
            });
            run.out.csv(
                &format!("spectrum-hist-{}-{}.csv", slug(Some(j), kappa, alpha), parity.name()),
                &["s", "density", "brody_fit", "poisson", "wigner"],
                rows,
            )?;
            summary.push(vec![
                j.to_string(),
                num(kappa),
                num(alpha),
                parity.name().to_string(),
                nu.len().to_string(),
                num(fit.beta),
                num(fit.fit_error),
                num(ratios.mean_r),
                ratios.count.to_string(),
                ens.zero_gaps.to_string(),
            ]);
        }
    }
    run.out.csv(
        "spectrum-summary.csv",
        &["j", "kappa", "alpha", "parity", "levels", "beta", "fit_error", "mean_r", "ratios", "zero_gaps"],
        summary,
    )?;
    run.finish()
}
