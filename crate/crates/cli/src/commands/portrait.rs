use clap::Args;
use kicktop_core::classical::{portrait, MapParams};
use serde::Serialize;

use super::{resolve, slug, Run};
use crate::config::{CommonDefaults, FIGURE_KAPPAS};
use crate::error::{CliError, Result};
use crate::output::num;
use crate::CommonArgs;

#[derive(Args, Debug)]
pub struct PortraitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of random initial conditions.
    #[arg(long)]
    orbits: Option<usize>,
    /// Kicks per orbit.
    #[arg(long)]
    kicks: Option<usize>,
}

#[derive(Serialize)]
struct Settings {
    orbits: usize,
    kicks: usize,
}

const DEFAULTS: CommonDefaults = CommonDefaults {
    j: "1",
    kappa: FIGURE_KAPPAS,
    alpha: "4pi/7",
};

pub fn run(args: PortraitArgs) -> Result<()> {
    let (layers, common) = resolve("portrait", args.common, &DEFAULTS)?;
    let settings = Settings {
        orbits: layers.value(args.orbits, "orbits", 289)?,
        kicks: layers.value(args.kicks, "kicks", 300)?,
    };
    if settings.orbits == 0 {
        return Err(CliError::Usage("orbits must be >= 1".into()));
    }
    let mut run = Run::start(&layers, common, None, &settings)?;
    for kappa in run.common.kappa.clone() {
        for alpha in run.common.alpha.clone() {
            let pts = portrait(&MapParams { kappa, alpha }, settings.orbits, settings.kicks, run.common.seed);
            let per_orbit = settings.kicks + 1;
            let rows = pts.iter().enumerate().map(|(i, p)| {
                vec![
                    p.orbit.to_string(),
                    (i % per_orbit).to_string(),
                    num(p.phi),
                    num(p.theta),
                ]
            });
            run.out.csv(
                &format!("portrait-{}.csv", slug(None, kappa, alpha)),
                &["orbit", "kick", "phi", "theta"],
                rows,
            )?;
        }
    }
    run.finish()
}
