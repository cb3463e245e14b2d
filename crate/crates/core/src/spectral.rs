//! Level statistics of quasienergy spectra: normalized nearest-neighbour
//! spacings, the Brody interpolation between Poisson and Wigner-Dyson, and
//! the consecutive spacing ratio.
//!
//! All routines expect the levels of a single parity sector; mixing
//! sectors destroys level repulsion.

use std::f64::consts::PI;

use rand::Rng;
use statrs::function::gamma::gamma;

use crate::{Error, Result};

/// Mean of `r` for uncorrelated levels.
pub const MEAN_R_POISSON: f64 = 0.386;
/// Mean of `r` for the circular orthogonal ensemble.
pub const MEAN_R_COE: f64 = 0.527;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SpacingEnsemble {
    /// Gaps between neighbouring levels, in level order.
    pub raw_gaps: Vec<f64>,
    /// `raw_gaps` divided by their mean.
    pub spacings: Vec<f64>,
    pub mean_gap: f64,
    /// Number of exactly repeated levels.
    pub zero_gaps: usize,
    pub periodic: bool,
}

impl SpacingEnsemble {
    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut s = self.spacings.clone();
        s.sort_by(f64::total_cmp);
        s
    }
}

/// Gaps of an ascending spectrum on `[-pi, pi)`. With `periodic` the gap
/// across `pi` is included.
pub fn spacings_from_quasienergies(nu: &[f64], periodic: bool) -> Result<SpacingEnsemble> {
    if nu.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} levels (need at least 3)",
            nu.len()
        )));
    }
    if nu.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite quasienergy".into()));
    }
    if nu.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("quasienergies must be sorted".into()));
    }
    let mut raw_gaps: Vec<f64> = nu.windows(2).map(|w| w[1] - w[0]).collect();
    if periodic {
        raw_gaps.push((nu[0] + 2.0 * PI - nu[nu.len() - 1]).max(0.0));
    }
    let mean_gap = raw_gaps.iter().sum::<f64>() / raw_gaps.len() as f64;
    if mean_gap <= 0.0 {
        return Err(Error::Degenerate("all levels coincide".into()));
    }
    let zero_gaps = raw_gaps.iter().filter(|&&d| d == 0.0).count();
    let spacings = raw_gaps.iter().map(|d| d / mean_gap).collect();
    Ok(SpacingEnsemble {
        raw_gaps,
        spacings,
        mean_gap,
        zero_gaps,
        periodic,
    })
}

/// `b_beta = Gamma((beta + 2)/(beta + 1))^(beta + 1)`, fixing unit mean.
pub fn brody_b(beta: f64) -> f64 {
    gamma((beta + 2.0) / (beta + 1.0)).powf(beta + 1.0)
}

/// `P(s) = b (beta + 1) s^beta exp(-b s^(beta + 1))`.
pub fn brody_pdf(s: f64, beta: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    let b = brody_b(beta);
    b * (beta + 1.0) * s.powf(beta) * (-b * s.powf(beta + 1.0)).exp()
}

pub fn brody_cdf(s: f64, beta: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    -(-brody_b(beta) * s.powf(beta + 1.0)).exp_m1()
}

/// One spacing drawn from the Brody law by inverting its CDF.
pub fn brody_sample<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (-(-u).ln_1p() / brody_b(beta)).powf(1.0 / (beta + 1.0))
}

/// Mean log-likelihood of strictly positive spacings under the Brody law.
pub fn brody_log_likelihood(spacings: &[f64], beta: f64) -> f64 {
    let b = brody_b(beta);
    let head = b.ln() + (beta + 1.0).ln();
    let mut total = 0.0;
    let mut n = 0usize;
    for &s in spacings.iter().filter(|&&s| s > 0.0) {
        total += head + beta * s.ln() - b * s.powf(beta + 1.0);
        n += 1;
    }
    total / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum FitMethod {
    MaximumLikelihood,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BrodyFit {
    /// Repulsion exponent in `[0, 1]`.
    pub beta: f64,
    /// Negative log-likelihood per spacing at `beta`.
    pub fit_error: f64,
    pub method: FitMethod,
    /// Spacings that entered the fit (zero spacings are excluded).
    pub used: usize,
}

/// Maximum-likelihood Brody exponent by golden-section search on `[0, 1]`.
pub fn fit_brody(ensemble: &SpacingEnsemble) -> Result<BrodyFit> {
    let used = ensemble.spacings.iter().filter(|&&s| s > 0.0).count();
    if used < 2 {
        return Err(Error::Degenerate(format!(
            "{used} positive spacings, cannot fit"
        )));
    }
    let nll = |beta: f64| -brody_log_likelihood(&ensemble.spacings, beta);
    let beta = golden_section_min(nll, 0.0, 1.0, 1e-9);
    // the box edges are candidates too, since the search only narrows the interior
    let beta = [0.0, beta, 1.0]
        .into_iter()
        .min_by(|a, b| nll(*a).total_cmp(&nll(*b)))
        .unwrap();
    Ok(BrodyFit {
        beta,
        fit_error: nll(beta),
        method: FitMethod::MaximumLikelihood,
        used,
    })
}

pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RatioStats {
    pub mean_r: f64,
    /// Ratios that entered the mean.
    pub count: usize,
    /// Neighbouring gap pairs skipped because one gap was zero.
    pub excluded: usize,
}

/// `r_i = min(d_{i+1}, d_i) / max(d_{i+1}, d_i)` averaged over neighbouring gaps.
pub fn ratio_stats(raw_gaps: &[f64]) -> Result<RatioStats> {
    if raw_gaps.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} gaps (need at least 3)",
            raw_gaps.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0;
    let mut excluded = 0;
    for w in raw_gaps.windows(2) {
        let (lo, hi) = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
        if lo <= 0.0 {
            excluded += 1;
            continue;
        }
        sum += lo / hi;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Degenerate("every gap pair contains a zero gap".into()));
    }
    Ok(RatioStats {
        mean_r: sum / count as f64,
        count,
        excluded,
    })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Histogram {
    pub centers: Vec<f64>,
    /// Counts divided by `(total samples) * (bin width)`.
    pub density: Vec<f64>,
}

/// Density histogram on `[0, max)`; samples beyond `max` still count in the
/// normalization.
pub fn spacing_histogram(spacings: &[f64], bins: usize, max: f64) -> Histogram {
    let width = max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in spacings {
        let k = (s / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    let norm = spacings.len().max(1) as f64 * width;
    Histogram {
        centers: (0..bins).map(|k| (k as f64 + 0.5) * width).collect(),
        density: counts.iter().map(|&c| c as f64 / norm).collect(),
    }
}
