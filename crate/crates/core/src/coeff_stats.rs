//! Statistics of rescaled expansion coefficients `x = N |w|^2` against the
//! chi-squared family of random-matrix predictions.

use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::floquet::FloquetEigensystem;
use crate::multifractal::{for_each_expansion, ExpansionBasis, ExpansionCoefficients};
use crate::sampling::haar_points;
use crate::{Error, Result};

/// Floor on reference bin masses inside the divergence sum.
pub const MASS_FLOOR: f64 = 1e-300;

/// Upper bound on the number of log-space bins.
const MAX_BINS: usize = 100_000;

fn check_nu(nu: f64, mean_x: f64) -> Result<()> {
    if !(nu > 0.0 && nu.is_finite() && mean_x > 0.0 && mean_x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need nu > 0 and mean > 0, got nu = {nu}, mean = {mean_x}"
        )));
    }
    Ok(())
}

/// `P(x) = (nu/(2m))^{nu/2} x^{nu/2 - 1} exp(-nu x/(2m)) / Gamma(nu/2)`.
pub fn chisq_pdf(x: f64, nu: f64, mean_x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let h = 0.5 * nu;
    if x == 0.0 {
        return match h.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0 / mean_x,
            _ => 0.0,
        };
    }
    let rate = h / mean_x;
    (h * rate.ln() + (h - 1.0) * x.ln() - rate * x - ln_gamma(h)).exp()
}

/// Density of `ln x`, equal to `x P(x)`; its maximum sits at `x = mean_x`.
pub fn chisq_logpdf_form(x: f64, nu: f64, mean_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    x * chisq_pdf(x, nu, mean_x)
}

/// Regularized lower incomplete gamma `gamma(nu/2, nu x/(2m)) / Gamma(nu/2)`.
pub fn chisq_cdf(x: f64, nu: f64, mean_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = 0.5 * nu * x / mean_x;
    if nu == 2.0 {
        -(-y).exp_m1()
    } else {
        gamma_lr(0.5 * nu, y)
    }
}

/// `x_i = N |w_i|^2` pooled over many states.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RescaledCoefficients {
    x: Vec<f64>,
}

impl RescaledCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("rescaled coefficients must be >= 0".into()));
        }
        Ok(Self { x })
    }

    pub fn push(&mut self, coeffs: &ExpansionCoefficients) {
        let n = coeffs.basis_dim() as f64;
        self.x.extend(coeffs.weights().iter().map(|w| n * w));
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Pooled empirical mean.
    pub fn mean(&self) -> f64 {
        self.x.iter().sum::<f64>() / self.x.len() as f64
    }

    /// Strictly positive entries, sorted, and the number of zeros dropped.
    fn positive_sorted(&self) -> (Vec<f64>, usize) {
        let mut v: Vec<f64> = self.x.iter().copied().filter(|&x| x > 0.0).collect();
        v.sort_by(f64::total_cmp);
        let zeros = self.x.len() - v.len();
        (v, zeros)
    }
}

/// Pools the rescaled coefficients of `n_samples` Haar-random coherent states.
pub fn pool_coefficients(
    eig: &FloquetEigensystem,
    basis: ExpansionBasis,
    n_samples: usize,
    seed: u64,
) -> Result<RescaledCoefficients> {
    let mut pool = RescaledCoefficients::new();
    pool.x.reserve(n_samples * eig.len());
    for_each_expansion(eig, basis, &haar_points(seed, n_samples), |_, w| {
        pool.push(&w);
        Ok(())
    })?;
    Ok(pool)
}

/// Histogram in the variable `ln x`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LogHistogram {
    /// Bin edges in `ln x`, one more than the number of bins.
    pub edges: Vec<f64>,
    /// Density in `ln x`: counts / (positive samples * bin width).
    pub density: Vec<f64>,
    pub counts: Vec<usize>,
    pub samples: usize,
    pub zeros_excluded: usize,
}

impl LogHistogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Binning {
    /// Width `2 IQR n^{-1/3}` in `ln x`.
    FreedmanDiaconis,
    Fixed(usize),
}

fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let pos = p * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

fn log_histogram_sorted(logs: &[f64], zeros: usize, binning: Binning) -> Result<LogHistogram> {
    let n = logs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} positive coefficients")));
    }
    let (lo, hi) = (logs[0], logs[n - 1]);
    if hi <= lo {
        return Err(Error::Degenerate("all coefficients are equal".into()));
    }
    let bins = match binning {
        Binning::Fixed(b) if b > 0 => b,
        Binning::Fixed(_) => return Err(Error::InvalidParameter("zero bins".into())),
        Binning::FreedmanDiaconis => {
            let iqr = quantile_sorted(logs, 0.75) - quantile_sorted(logs, 0.25);
            let width = 2.0 * iqr * (n as f64).powf(-1.0 / 3.0);
            if width > 0.0 {
                (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
            } else {
                MAX_BINS
            }
        }
    };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &l in logs {
        let k = (((l - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let density = counts.iter().map(|&c| c as f64 / (n as f64 * width)).collect();
    Ok(LogHistogram {
        edges,
        density,
        counts,
        samples: n,
        zeros_excluded: zeros,
    })
}

/// Density histogram of `ln x` over the positive entries of the pool.
pub fn empirical_log_histogram(pool: &RescaledCoefficients, binning: Binning) -> Result<LogHistogram> {
    if pool.is_empty() {
        return Err(Error::InsufficientData("empty pool".into()));
    }
    let (pos, zeros) = pool.positive_sorted();
    let logs: Vec<f64> = pos.iter().map(|x| x.ln()).collect();
    log_histogram_sorted(&logs, zeros, binning)
}

/// How the cumulative-distribution distance is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RmseForm {
    /// `sqrt( (x_m - x_0)^{-1} int (F - F_nu)^2 dx )`.
    #[default]
    Squared,
    /// `sqrt( |(x_m - x_0)^{-1} int (F - F_nu) dx| )`, the unsquared variant.
    LiteralAbs,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DistanceReport {
    pub nu: f64,
    /// Scale of the reference law (pooled mean of the coefficients).
    pub mean_x: f64,
    /// Square root of the Kullback-Leibler divergence of the pool from the reference.
    pub skld: f64,
    pub rmse: f64,
    pub rmse_form: RmseForm,
    /// Smallest and largest positive coefficient.
    pub x_range: (f64, f64),
    pub bins: usize,
    pub bin_width_lnx: f64,
    pub samples: usize,
    pub zeros_excluded: usize,
}

/// SKLD and RMSE of a pooled sample against `chi^2_nu` with the pooled mean.
pub fn distance_report(pool: &RescaledCoefficients, nu: f64, form: RmseForm) -> Result<DistanceReport> {
    if pool.is_empty() {
        return Err(Error::InsufficientData("empty pool".into()));
    }
    let mean_x = pool.mean();
    check_nu(nu, mean_x)?;
    let (pos, zeros) = pool.positive_sorted();
    let logs: Vec<f64> = pos.iter().map(|x| x.ln()).collect();
    let hist = log_histogram_sorted(&logs, zeros, Binning::FreedmanDiaconis)?;
    let n = pos.len() as f64;

    // bin masses of the reference law from CDF differences
    let cdf_at_edges: Vec<f64> = hist
        .edges
        .iter()
        .map(|e| chisq_cdf(e.exp(), nu, mean_x))
        .collect();
    let mut kl = 0.0;
    for (b, &c) in hist.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let p = c as f64 / n;
        let q = (cdf_at_edges[b + 1] - cdf_at_edges[b]).max(MASS_FLOOR);
        kl += p * (p / q).ln();
    }

    let (x0, xm) = (pos[0], pos[pos.len() - 1]);
    let f_at: Vec<f64> = pos.iter().map(|&x| chisq_cdf(x, nu, mean_x)).collect();
    let mut integral = 0.0;
    for k in 0..pos.len() - 1 {
        let (a, b) = (pos[k], pos[k + 1]);
        if b <= a {
            continue;
        }
        // empirical CDF is (k + 1)/n on [x_k, x_{k+1})
        let fe = (k + 1) as f64 / n;
        let fm = chisq_cdf(0.5 * (a + b), nu, mean_x);
        let g = |f: f64| match form {
            RmseForm::Squared => (fe - f).powi(2),
            RmseForm::LiteralAbs => fe - f,
        };
        integral += (b - a) / 6.0 * (g(f_at[k]) + 4.0 * g(fm) + g(f_at[k + 1]));
    }
    let rmse = (integral / (xm - x0)).abs().sqrt();

    Ok(DistanceReport {
        nu,
        mean_x,
        skld: kl.max(0.0).sqrt(),
        rmse,
        rmse_form: form,
        x_range: (x0, xm),
        bins: hist.counts.len(),
        bin_width_lnx: hist.bin_width(),
        samples: pos.len(),
        zeros_excluded: zeros,
    })
}

/// `n` draws from `chi^2_nu` with the given mean (sum of `nu` squared
/// Gaussians, rescaled). Integer `nu` only.
pub fn chisq_sample<R: rand::Rng + ?Sized>(nu: u32, mean_x: f64, rng: &mut R) -> f64 {
    let mut s = 0.0;
    for _ in 0..nu {
        // Box-Muller
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        s += z * z;
    }
    s * mean_x / nu as f64
}
