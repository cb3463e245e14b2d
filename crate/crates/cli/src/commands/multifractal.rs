use clap::Args;
use kicktop_core::classical::GridSpec;
use kicktop_core::floquet::KickedTopParams;
use kicktop_core::multifractal::{averaged_dq, dq_field, scaling_fit, ScalingModel};
use serde::Serialize;

use super::{peek_config, resolve, slug, Run};
use crate::config::{parse_basis, usage, CommonDefaults, FIGURE_KAPPAS};
use crate::error::Result;
use crate::output::num;
use crate::values::parse_q;
use crate::CommonArgs;

#[derive(Args, Debug)]
pub struct MultifractalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// field (per coherent state on a grid), average (phase-space means
    /// over j and kappa) or scaling (means versus N with fits in 1/ln N).
    #[arg(long)]
    mode: Option<String>,
    /// Grid points per angle in field mode.
    #[arg(long)]
    grid: Option<usize>,
    /// Random coherent states per average.
    #[arg(long)]
    samples: Option<usize>,
    /// Comma list of q values; inf selects the extreme-value dimension.
    #[arg(long)]
    q: Option<String>,
    /// Expansion basis: full, even or odd.
    #[arg(long)]
    basis: Option<String>,
}

/// `(kappa, alpha, q index)` of one `(N, mean D_q)` curve.
type CurveKey = (f64, f64, usize);

#[derive(Serialize)]
struct Settings {
    grid: usize,
    samples: usize,
    q: String,
    basis: String,
}

pub fn run(args: MultifractalArgs) -> Result<()> {
    let mode = peek_config(&args.common, "multifractal")?.text(args.mode.clone(), "mode", "field")?;
    let (defaults, samples) = match mode.as_str() {
        "field" => (CommonDefaults { j: "150", kappa: FIGURE_KAPPAS, alpha: "4pi/7" }, 10_000),
        "average" => (CommonDefaults { j: "50,100,150", kappa: "0:10:0.5", alpha: "4pi/7" }, 10_000),
        "scaling" => (
            CommonDefaults { j: "100,200,300,400,600,800", kappa: "0.4,7", alpha: "4pi/7" },
            1000,
        ),
        m => return Err(usage(format!("mode '{m}' (expected field, average or scaling)"))),
    };
    let (layers, common) = resolve("multifractal", args.common, &defaults)?;
    let settings = Settings {
        grid: layers.value(args.grid, "grid", 100)?,
        samples: layers.value(args.samples, "samples", samples)?,
        q: layers.text(args.q, "q", "1,2,inf")?,
        basis: layers.text(args.basis, "basis", "full")?,
    };
    let qs = parse_q(&settings.q).map_err(usage)?;
    let basis = parse_basis(&settings.basis)?;
    if mode == "scaling" && common.j.len() < 4 {
        return Err(usage("scaling mode needs at least 4 values of j".into()));
    }
    let mut run = Run::start(&layers, common, Some(&mode), &settings)?;
    let seed = run.common.seed;
    let q_names: Vec<String> = qs.iter().map(|&q| format!("D_{}", num(q))).collect();

    match mode.as_str() {
        "field" => {
            let grid = GridSpec::square(settings.grid)?;
            let mut columns = vec!["phi", "theta"];
            columns.extend(q_names.iter().map(String::as_str));
            for (j, kappa, alpha) in run.points() {
                let eig = run.eigensystem(&KickedTopParams::new(j, kappa, alpha)?)?;
                let field = dq_field(&eig, &grid, &qs, basis)?;
                let rows: Vec<Vec<String>> = field
                    .cells()
                    .map(|(phi, theta, d)| {
                        let mut r = vec![num(phi), num(theta)];
                        r.extend(d.iter().map(|&x| num(x)));
                        r
                    })
                    .collect();
                run.out.csv(
                    &format!("multifractal-field-{}.csv", slug(Some(j), kappa, alpha)),
                    &columns,
                    rows,
                )?;
            }
        }
        _ => {
            let mut rows = Vec::new();
            let mut curves: Vec<(CurveKey, Vec<(f64, f64)>)> = Vec::new();
            for (j, kappa, alpha) in run.points() {
                let eig = run.eigensystem(&KickedTopParams::new(j, kappa, alpha)?)?;
                let avg = averaged_dq(&eig, settings.samples, &qs, seed, basis)?;
                for (k, &q) in qs.iter().enumerate() {
                    rows.push(vec![
                        j.to_string(),
                        avg.basis_dim.to_string(),
                        num(kappa),
                        num(alpha),
                        num(q),
                        num(avg.mean[k]),
                        num(avg.stderr[k]),
                        avg.samples.to_string(),
                    ]);
                    let key = (kappa, alpha, k);
                    match curves.iter_mut().find(|(c, _)| *c == key) {
                        Some((_, pts)) => pts.push((avg.basis_dim as f64, avg.mean[k])),
                        None => curves.push((key, vec![(avg.basis_dim as f64, avg.mean[k])])),
                    }
                }
            }
            let name = if mode == "average" { "multifractal-average.csv" } else { "multifractal-scaling-data.csv" };
            run.out.csv(
                name,
                &["j", "N", "kappa", "alpha", "q", "mean", "stderr", "samples"],
                rows,
            )?;
            if mode == "scaling" {
                let mut fits = Vec::new();
                for ((kappa, alpha, k), pts) in &curves {
                    for model in [ScalingModel::InverseLog, ScalingModel::LogLogOverLog] {
                        let f = scaling_fit(pts, model)?;
                        fits.push(vec![
                            num(*kappa),
                            num(*alpha),
                            num(qs[*k]),
                            model.name().to_string(),
                            num(f.intercept),
                            num(f.slope),
                            num(f.residual),
                            num(f.n_min),
                            num(f.n_max),
                        ]);
                    }
                }
                run.out.csv(
                    "multifractal-scaling-fits.csv",
                    &["kappa", "alpha", "q", "model", "intercept", "slope", "residual", "n_min", "n_max"],
                    fits,
                )?;
            }
        }
    }
    run.finish()
}
