pub mod coeffdist;
pub mod lyapunov;
pub mod multifractal;
pub mod portrait;
pub mod spectrum;

use std::time::Instant;

use kicktop_core::floquet::{eigensystem, EigenCache, FloquetEigensystem, KickedTopParams};
use serde::Serialize;
use serde_json::json;

use crate::config::{Common, CommonDefaults, Layers};
use crate::error::Result;
use crate::output::Output;
use crate::values::label;
use crate::CommonArgs;

/// Resolved settings, output sink and eigensystem cache of one invocation.
pub struct Run {
    pub common: Common,
    pub out: Output,
    cache: Option<EigenCache>,
    started: Instant,
}

impl Run {
    pub fn start<S: Serialize>(
        layers: &Layers,
        common: Common,
        mode: Option<&str>,
        settings: &S,
    ) -> Result<Self> {
        // a second global pool in the same process keeps the first one
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global();
        let config = json!({
            "command": layers.command(),
            "mode": mode,
            "common": common,
            "settings": settings,
        });
        let out = Output::new(&common.out, layers.command(), common.seed, config)?;
        let cache = if common.cache {
            Some(EigenCache::new(out.dir().join("cache"))?)
        } else {
            None
        };
        Ok(Self {
            common,
            out,
            cache,
            started: Instant::now(),
        })
    }

    pub fn eigensystem(&self, params: &KickedTopParams) -> Result<FloquetEigensystem> {
        let method = self.common.method;
        Ok(match &self.cache {
            Some(c) => c.get_or_compute(params, method)?,
            None => eigensystem(params, method)?,
        })
    }

    /// Every `(j, kappa, alpha)` combination, `j` slowest.
    pub fn points(&self) -> Vec<(u32, f64, f64)> {
        let c = &self.common;
        let mut v = Vec::new();
        for &j in &c.j {
            for &k in &c.kappa {
                for &a in &c.alpha {
                    v.push((j, k, a));
                }
            }
        }
        v
    }

    pub fn finish(self) -> Result<()> {
        let path = self.out.finish(self.started.elapsed())?;
        println!("{}", path.display());
        Ok(())
    }
}

pub fn resolve(
    command: &'static str,
    args: CommonArgs,
    defaults: &CommonDefaults,
) -> Result<(Layers, Common)> {
    let (input, config) = args.split();
    let layers = Layers::new(command, config.as_deref())?;
    let common = Common::resolve(input, &layers, defaults)?;
    Ok((layers, common))
}

/// Config-file lookup of the mode before the mode-dependent defaults are known.
pub fn peek_config(args: &CommonArgs, command: &'static str) -> Result<Layers> {
    let (_, config) = args.clone().split();
    Layers::new(command, config.as_deref())
}

pub fn slug(j: Option<u32>, kappa: f64, alpha: f64) -> String {
    match j {
        Some(j) => format!("j{j}-k{}-a{}", label(kappa), label(alpha)),
        None => format!("k{}-a{}", label(kappa), label(alpha)),
    }
}
