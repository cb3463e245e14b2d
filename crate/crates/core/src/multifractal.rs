//! Rényi entropies and fractal dimensions of coherent states expanded in
//! the Floquet eigenbasis, their phase-space fields and averages, and
//! finite-size scaling fits of the averages.

use faer::{c64, Mat, MatRef};

use crate::classical::GridSpec;
use crate::floquet::{FloquetEigensystem, Parity};
use crate::sampling::haar_points;
use crate::spin::{coherent_state, CoherentState};
use crate::{Error, Result};

/// Weights below this are dropped from the `q <= 1` sums.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Coherent states projected per matrix product.
const BATCH: usize = 256;

/// Squared overlaps `|<nu_i|psi>|^2` over an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionCoefficients {
    weights: Vec<f64>,
}

impl ExpansionCoefficients {
    /// Validates that the weights are non-negative and sum to one within 1e-10.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis_dim(&self) -> usize {
        self.weights.len()
    }
}

/// Which eigenvectors the state is expanded in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ExpansionBasis {
    /// All `2j + 1` eigenvectors.
    #[default]
    Full,
    /// Eigenvectors of one parity; weights renormalized within the sector.
    Sector(Parity),
}

impl ExpansionBasis {
    fn columns(&self, eig: &FloquetEigensystem) -> Vec<usize> {
        match self {
            ExpansionBasis::Full => (0..eig.len()).collect(),
            ExpansionBasis::Sector(p) => (0..eig.len())
                .filter(|&i| eig.parities()[i] == *p)
                .collect(),
        }
    }
}

pub fn expand_in_floquet_basis(
    state: &CoherentState,
    eig: &FloquetEigensystem,
) -> Result<ExpansionCoefficients> {
    expand_in_basis(state, eig, ExpansionBasis::Full)
}

pub fn expand_in_basis(
    state: &CoherentState,
    eig: &FloquetEigensystem,
    basis: ExpansionBasis,
) -> Result<ExpansionCoefficients> {
    let n = eig.len();
    if state.amplitudes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.amplitudes.len(),
        });
    }
    let cols = basis.columns(eig);
    let v = sub_basis(eig.eigenvectors(), &cols);
    let c = Mat::<c64>::from_fn(n, 1, |r, _| state.amplitudes[r]);
    let w = v.adjoint() * &c;
    let weights: Vec<f64> = (0..cols.len()).map(|i| w[(i, 0)].norm_sqr()).collect();
    finish_weights(weights, basis)
}

fn sub_basis(v: MatRef<'_, c64>, cols: &[usize]) -> Mat<c64> {
    Mat::from_fn(v.nrows(), cols.len(), |r, c| v[(r, cols[c])])
}

fn finish_weights(weights: Vec<f64>, basis: ExpansionBasis) -> Result<ExpansionCoefficients> {
    match basis {
        ExpansionBasis::Full => ExpansionCoefficients::new(weights),
        ExpansionBasis::Sector(_) => {
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                return Err(Error::Degenerate("state has no weight in the sector".into()));
            }
            ExpansionCoefficients::new(weights.iter().map(|w| w / total).collect())
        }
    }
}

/// Fractal dimensions `D_q = S_q / ln N` for a set of `q` values. Use
/// `f64::INFINITY` for the extreme-value dimension.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MultifractalResult {
    pub q_values: Vec<f64>,
    /// Rényi entropies in nats.
    pub entropies: Vec<f64>,
    pub dimensions: Vec<f64>,
}

impl MultifractalResult {
    pub fn dimension(&self, q: f64) -> Option<f64> {
        self.q_values
            .iter()
            .position(|&x| x == q)
            .map(|i| self.dimensions[i])
    }
}

fn check_q(q_values: &[f64]) -> Result<()> {
    if q_values.is_empty() || q_values.iter().any(|q| q.is_nan() || *q < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "q values must be >= 0, got {q_values:?}"
        )));
    }
    Ok(())
}

/// Rényi entropy of a normalized weight vector.
pub fn renyi_entropy(weights: &[f64], q: f64) -> f64 {
    let pmax = weights.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() {
        return -pmax.ln();
    }
    if q == 0.0 {
        return (weights.iter().filter(|&&w| w > WEIGHT_FLOOR).count() as f64).ln();
    }
    if q == 1.0 {
        return -weights
            .iter()
            .filter(|&&w| w > WEIGHT_FLOOR)
            .map(|&w| w * w.ln())
            .sum::<f64>();
    }
    // factor out p_max^q to keep large q from underflowing
    let rel: f64 = weights
        .iter()
        .filter(|&&w| w > WEIGHT_FLOOR)
        .map(|&w| (w / pmax).powf(q))
        .sum();
    (q * pmax.ln() + rel.ln()) / (1.0 - q)
}

pub fn fractal_dimensions(
    coeffs: &ExpansionCoefficients,
    q_values: &[f64],
) -> Result<MultifractalResult> {
    check_q(q_values)?;
    dimensions_unchecked(coeffs.weights(), q_values)
}

fn dimensions_unchecked(weights: &[f64], q_values: &[f64]) -> Result<MultifractalResult> {
    let n = weights.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "fractal dimensions need a basis of size >= 2".into(),
        ));
    }
    let ln_n = (n as f64).ln();
    let entropies: Vec<f64> = q_values.iter().map(|&q| renyi_entropy(weights, q)).collect();
    let dimensions = entropies.iter().map(|s| s / ln_n).collect();
    Ok(MultifractalResult {
        q_values: q_values.to_vec(),
        entropies,
        dimensions,
    })
}

/// Expansion weights of many coherent states, computed in batches of
/// matrix products. `f` receives the state index and its weights.
pub fn for_each_expansion(
    eig: &FloquetEigensystem,
    basis: ExpansionBasis,
    points: &[(f64, f64)],
    mut f: impl FnMut(usize, ExpansionCoefficients) -> Result<()>,
) -> Result<()> {
    let spin = eig.params().basis();
    let n = eig.len();
    let cols = basis.columns(eig);
    let vh = sub_basis(eig.eigenvectors(), &cols).adjoint().to_owned();
    for (b, chunk) in points.chunks(BATCH).enumerate() {
        let states = chunk
            .iter()
            .map(|&(t, p)| coherent_state(spin, t, p))
            .collect::<Result<Vec<_>>>()?;
        let c = Mat::<c64>::from_fn(n, chunk.len(), |r, k| states[k].amplitudes[r]);
        let w = &vh * &c;
        for k in 0..chunk.len() {
            let weights = (0..cols.len()).map(|i| w[(i, k)].norm_sqr()).collect();
            f(b * BATCH + k, finish_weights(weights, basis)?)?;
        }
    }
    Ok(())
}

/// Per-cell fractal dimensions on a uniform angular grid, theta-major.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DqField {
    pub grid: GridSpec,
    pub q_values: Vec<f64>,
    /// `values[cell][k]` is `D_{q_k}` of that cell.
    pub values: Vec<Vec<f64>>,
}

impl DqField {
    /// `(phi, theta, D_q...)` per cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, &[f64])> + '_ {
        self.values.iter().enumerate().map(|(i, d)| {
            let (t, p) = self.grid.cell(i);
            (p, t, d.as_slice())
        })
    }

    pub fn column(&self, q: f64) -> Option<Vec<f64>> {
        let k = self.q_values.iter().position(|&x| x == q)?;
        Some(self.values.iter().map(|d| d[k]).collect())
    }
}

pub fn dq_field(
    eig: &FloquetEigensystem,
    grid: &GridSpec,
    q_values: &[f64],
    basis: ExpansionBasis,
) -> Result<DqField> {
    check_q(q_values)?;
    let points: Vec<(f64, f64)> = (0..grid.len()).map(|i| grid.cell(i)).collect();
    let mut values = vec![Vec::new(); points.len()];
    for_each_expansion(eig, basis, &points, |i, w| {
        values[i] = dimensions_unchecked(w.weights(), q_values)?.dimensions;
        Ok(())
    })?;
    Ok(DqField {
        grid: *grid,
        q_values: q_values.to_vec(),
        values,
    })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AveragedDq {
    pub q_values: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
    pub basis_dim: usize,
}

/// Haar average of `D_q` over `n_samples` coherent states; sample `i` is
/// drawn from stream `i` of `seed`.
pub fn averaged_dq(
    eig: &FloquetEigensystem,
    n_samples: usize,
    q_values: &[f64],
    seed: u64,
    basis: ExpansionBasis,
) -> Result<AveragedDq> {
    check_q(q_values)?;
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("n_samples = {n_samples}")));
    }
    let points = haar_points(seed, n_samples);
    let k = q_values.len();
    let mut sum = vec![0.0; k];
    let mut sum_sq = vec![0.0; k];
    let mut basis_dim = 0;
    for_each_expansion(eig, basis, &points, |_, w| {
        basis_dim = w.basis_dim();
        let d = dimensions_unchecked(w.weights(), q_values)?.dimensions;
        for i in 0..k {
            sum[i] += d[i];
            sum_sq[i] += d[i] * d[i];
        }
        Ok(())
    })?;
    let n = n_samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let stderr = (0..k)
        .map(|i| ((sum_sq[i] / n - mean[i] * mean[i]).max(0.0) * n / (n - 1.0) / n).sqrt())
        .collect();
    Ok(AveragedDq {
        q_values: q_values.to_vec(),
        mean,
        stderr,
        samples: n_samples,
        basis_dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ScalingModel {
    /// `D = a - g / ln N`.
    InverseLog,
    /// `D = a - g ln(ln N) / ln N`.
    LogLogOverLog,
}

impl ScalingModel {
    pub fn regressor(self, n: f64) -> f64 {
        let l = n.ln();
        match self {
            ScalingModel::InverseLog => 1.0 / l,
            ScalingModel::LogLogOverLog => l.ln() / l,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalingModel::InverseLog => "inverse_log",
            ScalingModel::LogLogOverLog => "loglog_over_log",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ScalingFit {
    pub model: ScalingModel,
    /// Extrapolated value at `N -> infinity`.
    pub intercept: f64,
    /// Coefficient `g` in `D = a - g x`.
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub n_min: f64,
    pub n_max: f64,
}

impl ScalingFit {
    /// Model value inside the fitted range of `N`.
    pub fn evaluate(&self, n: f64) -> Result<f64> {
        if n < self.n_min || n > self.n_max {
            return Err(Error::InvalidParameter(format!(
                "N = {n} outside fitted range [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        Ok(self.intercept - self.slope * self.model.regressor(n))
    }
}

/// Least-squares fit of `(N, D)` pairs; needs at least four sizes.
pub fn scaling_fit(points: &[(f64, f64)], model: ScalingModel) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} sizes (need at least 4)",
            points.len()
        )));
    }
    if points.iter().any(|(n, d)| !(*n > 1.0 && d.is_finite())) {
        return Err(Error::InvalidParameter("need N > 1 and finite D".into()));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| model.regressor(*n)).collect();
    let k = points.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all sizes coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(points).map(|(x, p)| (p.1 - a - b * x).powi(2)).sum();
    Ok(ScalingFit {
        model,
        intercept: a,
        slope: -b,
        residual: (rss / k).sqrt(),
        n_min: points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        n_max: points.iter().map(|p| p.0).fold(0.0, f64::max),
    })
}
