use clap::Args;
use kicktop_core::classical::{
    averaged_lyapunov, kappa_threshold, lyapunov_field, GridSpec, LyapunovOptions, MapParams,
    ThresholdOptions,
};
use kicktop_core::Error;
use serde::Serialize;

use super::{peek_config, resolve, slug, Run};
use crate::config::{usage, CommonDefaults, FIGURE_KAPPAS};
use crate::error::Result;
use crate::output::num;
use crate::CommonArgs;

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// field (per initial condition), scan (phase-space average over kappa
    /// and alpha) or threshold (kappa_c(alpha) by bisection).
    #[arg(long)]
    mode: Option<String>,
    /// Grid points per angle in field mode.
    #[arg(long)]
    grid: Option<usize>,
    /// Random initial conditions per average.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    kicks: Option<usize>,
    /// Averaged exponent that defines kappa_c.
    #[arg(long)]
    threshold: Option<f64>,
    /// Upper end of the kappa bracket in threshold mode.
    #[arg(long)]
    kappa_max: Option<f64>,
    /// Bisection resolution in kappa.
    #[arg(long)]
    resolution: Option<f64>,
}

#[derive(Serialize)]
struct Settings {
    grid: usize,
    samples: usize,
    kicks: usize,
    threshold: f64,
    kappa_max: f64,
    resolution: f64,
}

pub fn run(args: LyapunovArgs) -> Result<()> {
    let mode = peek_config(&args.common, "lyapunov")?.text(args.mode.clone(), "mode", "field")?;
    let defaults = match mode.as_str() {
        "field" => CommonDefaults { j: "1", kappa: FIGURE_KAPPAS, alpha: "4pi/7" },
        "scan" => CommonDefaults { j: "1", kappa: "0:10:0.5", alpha: "0:2pi:pi/20" },
        "threshold" => CommonDefaults { j: "1", kappa: "10", alpha: "pi/20:19pi/20:pi/20" },
        m => return Err(usage(format!("mode '{m}' (expected field, scan or threshold)"))),
    };
    let (layers, common) = resolve("lyapunov", args.common, &defaults)?;
    let (samples, kicks) = if mode == "scan" { (200, 2000) } else { (1000, 5000) };
    let settings = Settings {
        grid: layers.value(args.grid, "grid", 200)?,
        samples: layers.value(args.samples, "samples", samples)?,
        kicks: layers.value(args.kicks, "kicks", kicks)?,
        threshold: layers.value(args.threshold, "threshold", 0.002)?,
        kappa_max: layers.value(args.kappa_max, "kappa_max", 10.0)?,
        resolution: layers.value(args.resolution, "resolution", 0.05)?,
    };
    let opts = LyapunovOptions::with_kicks(settings.kicks);
    let mut run = Run::start(&layers, common, Some(&mode), &settings)?;
    let seed = run.common.seed;
    match mode.as_str() {
        "field" => {
            let grid = GridSpec::square(settings.grid)?;
            for kappa in run.common.kappa.clone() {
                for alpha in run.common.alpha.clone() {
                    let field = lyapunov_field(&MapParams { kappa, alpha }, &grid, &opts)?;
                    let rows: Vec<Vec<String>> = field
                        .cells()
                        .map(|(phi, theta, l)| vec![num(phi), num(theta), num(l)])
                        .collect();
                    run.out.csv(
                        &format!("lyapunov-field-{}.csv", slug(None, kappa, alpha)),
                        &["phi", "theta", "lambda"],
                        rows,
                    )?;
                }
            }
        }
        "scan" => {
            let mut rows = Vec::new();
            let mut crossings = Vec::new();
            let mut kappas = run.common.kappa.clone();
            kappas.sort_by(f64::total_cmp);
            for alpha in run.common.alpha.clone() {
                let mut curve = Vec::new();
                for &kappa in &kappas {
                    let avg = averaged_lyapunov(&MapParams { kappa, alpha }, settings.samples, &opts, seed)?;
                    rows.push(vec![num(kappa), num(alpha), num(avg.mean), num(avg.stderr), avg.samples.to_string()]);
                    curve.push((kappa, avg.mean));
                }
                crossings.push(vec![num(alpha), num(first_crossing(&curve, settings.threshold))]);
            }
            run.out.csv("lyapunov-scan.csv", &["kappa", "alpha", "mean_lambda", "stderr", "samples"], rows)?;
            run.out.csv("lyapunov-kappa-c.csv", &["alpha", "kappa_c"], crossings)?;
        }
        _ => {
            let topts = ThresholdOptions {
                threshold: settings.threshold,
                kappa_max: settings.kappa_max,
                resolution: settings.resolution,
                n_samples: settings.samples,
                lyapunov: opts,
                seed,
            };
            let mut rows = Vec::new();
            for alpha in run.common.alpha.clone() {
                let (value, status) = match kappa_threshold(alpha, &topts) {
                    Ok(k) => (k, "ok"),
                    Err(Error::NoCrossing { .. }) => (f64::NAN, "no-crossing"),
                    Err(e) => return Err(e.into()),
                };
                rows.push(vec![num(alpha), num(value), status.to_string()]);
            }
            run.out.csv("lyapunov-threshold.csv", &["alpha", "kappa_c", "status"], rows)?;
        }
    }
    run.finish()
}

/// Smallest kappa where the curve first rises through `threshold`, by
/// linear interpolation; NaN when it never does.
fn first_crossing(curve: &[(f64, f64)], threshold: f64) -> f64 {
    for w in curve.windows(2) {
        let ((k0, l0), (k1, l1)) = (w[0], w[1]);
        if l0 <= threshold && l1 > threshold {
            return k0 + (threshold - l0) * (k1 - k0) / (l1 - l0);
        }
    }
    f64::NAN
}
