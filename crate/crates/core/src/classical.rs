//! Classical limit of the kicked top: the stroboscopic map of a unit spin
//! vector, its tangent dynamics and largest Lyapunov exponents.
//!
//! One kick is a rotation about `x` by `alpha` followed by a rotation about
//! `z` by the state-dependent angle `Xi = kappa [S_y sin(alpha) + S_z cos(alpha)]`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::sampling::{haar_point, task_rng};
use crate::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapParams {
    pub kappa: f64,
    pub alpha: f64,
}

/// Unit spin vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalState {
    s: Vec3,
}

impl ClassicalState {
    /// Accepts any nonzero finite vector and normalizes it.
    pub fn new(s: Vec3) -> Result<Self> {
        let n = norm(s);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize {s:?}")));
        }
        Ok(Self {
            s: [s[0] / n, s[1] / n, s[2] / n],
        })
    }

    /// `S = (cos(phi) sin(theta), sin(phi) sin(theta), cos(theta))`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            s: [cp * st, sp * st, ct],
        }
    }

    pub fn vector(&self) -> Vec3 {
        self.s
    }

    pub fn norm(&self) -> f64 {
        norm(self.s)
    }

    /// `(theta, phi)` with `theta` in `[0, pi]` and `phi` in `(-pi, pi]`.
    pub fn angles(&self) -> (f64, f64) {
        (self.s[2].clamp(-1.0, 1.0).acos(), self.s[1].atan2(self.s[0]))
    }
}

fn norm(v: Vec3) -> f64 {
    dot(v, v).sqrt()
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

fn rotate_x(v: Vec3, alpha: f64) -> Vec3 {
    let (sa, ca) = alpha.sin_cos();
    [v[0], ca * v[1] - sa * v[2], sa * v[1] + ca * v[2]]
}

fn rotate_z(v: Vec3, xi: f64) -> Vec3 {
    let (sx, cx) = xi.sin_cos();
    [cx * v[0] - sx * v[1], sx * v[0] + cx * v[1], v[2]]
}

/// The one-kick matrix `M(S)` with `S' = M(S) S`. Orthogonal for every `S`.
pub fn map_matrix(s: &ClassicalState, params: &MapParams) -> Mat3 {
    let (sa, ca) = params.alpha.sin_cos();
    let v = s.s;
    let xi = params.kappa * (v[1] * sa + v[2] * ca);
    let (sx, cx) = xi.sin_cos();
    [
        [cx, -ca * sx, sa * sx],
        [sx, ca * cx, -sa * cx],
        [0.0, sa, ca],
    ]
}

pub fn classical_step(s: &ClassicalState, params: &MapParams) -> ClassicalState {
    let u = rotate_x(s.s, params.alpha);
    ClassicalState {
        s: rotate_z(u, params.kappa * u[2]),
    }
}

/// `dS'/dS` including the dependence of `Xi` on `S`.
pub fn jacobian(s: &ClassicalState, params: &MapParams) -> Mat3 {
    let m = map_matrix(s, params);
    let next = mat_vec(&m, s.s);
    let (sa, ca) = params.alpha.sin_cos();
    // dS'/dXi = (-S'_y, S'_x, 0), dXi/dS = kappa (0, sin a, cos a)
    let dxi = [0.0, params.kappa * sa, params.kappa * ca];
    let dxi_ds = [-next[1], next[0], 0.0];
    let mut t = m;
    for r in 0..3 {
        for c in 0..3 {
            t[r][c] += dxi_ds[r] * dxi[c];
        }
    }
    t
}

/// Unit tangent vector and the log-stretch accumulated so far.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentFrame {
    pub delta: Vec3,
    pub log_norm_accum: f64,
}

impl TangentFrame {
    /// Starts from the coordinate axis least aligned with `s`, projected
    /// onto the tangent plane.
    pub fn initial(s: &ClassicalState) -> Self {
        let v = s.s;
        let axis = (0..3)
            .min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
            .unwrap();
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let p = v[axis];
        let d = [e[0] - p * v[0], e[1] - p * v[1], e[2] - p * v[2]];
        let n = norm(d);
        Self {
            delta: [d[0] / n, d[1] / n, d[2] / n],
            log_norm_accum: 0.0,
        }
    }
}

/// Advances the tangent vector from `s` to the image of `s`, renormalizes
/// it and adds the log of the stretch factor.
pub fn tangent_step(s: &ClassicalState, frame: &TangentFrame, params: &MapParams) -> TangentFrame {
    let t = jacobian(s, params);
    let next = classical_step(s, params).s;
    let mut d = mat_vec(&t, frame.delta);
    let radial = dot(d, next);
    for k in 0..3 {
        d[k] -= radial * next[k];
    }
    let n = norm(d);
    TangentFrame {
        delta: [d[0] / n, d[1] / n, d[2] / n],
        log_norm_accum: frame.log_norm_accum + n.ln(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LyapunovOptions {
    /// Kicks over which the stretch is accumulated.
    pub n_kicks: usize,
    /// Kicks iterated (with renormalization) before accumulation starts.
    pub transient: usize,
    /// Equal blocks used for the standard error.
    pub blocks: usize,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            n_kicks: 5000,
            transient: 100,
            blocks: 10,
        }
    }
}

impl LyapunovOptions {
    pub fn with_kicks(n_kicks: usize) -> Self {
        Self {
            n_kicks,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_kicks < 100 {
            return Err(Error::InvalidParameter(format!(
                "n_kicks = {} (need at least 100)",
                self.n_kicks
            )));
        }
        if self.blocks < 2 || self.blocks > self.n_kicks {
            return Err(Error::InvalidParameter(format!("blocks = {}", self.blocks)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LyapunovEstimate {
    /// Largest exponent per kick.
    pub lambda: f64,
    /// Standard error from the spread of block means.
    pub stderr: f64,
}

/// Largest Lyapunov exponent of the orbit through `s0` by tangent-vector
/// renormalization at every kick.
pub fn lyapunov_exponent(
    s0: &ClassicalState,
    params: &MapParams,
    opts: &LyapunovOptions,
) -> Result<LyapunovEstimate> {
    opts.validate()?;
    Ok(lyapunov_unchecked(s0, params, opts))
}

fn lyapunov_unchecked(
    s0: &ClassicalState,
    params: &MapParams,
    opts: &LyapunovOptions,
) -> LyapunovEstimate {
    let mut s = *s0;
    let mut frame = TangentFrame::initial(&s);
    for _ in 0..opts.transient {
        frame = tangent_step(&s, &frame, params);
        s = classical_step(&s, params);
    }
    frame.log_norm_accum = 0.0;

    let mut block_rates = Vec::with_capacity(opts.blocks);
    let mut done = 0;
    for b in 0..opts.blocks {
        let end = (b + 1) * opts.n_kicks / opts.blocks;
        let start_log = frame.log_norm_accum;
        for _ in done..end {
            frame = tangent_step(&s, &frame, params);
            s = classical_step(&s, params);
        }
        block_rates.push((frame.log_norm_accum - start_log) / (end - done) as f64);
        done = end;
    }
    let lambda = frame.log_norm_accum / opts.n_kicks as f64;
    LyapunovEstimate {
        lambda,
        stderr: standard_error(&block_rates),
    }
}

fn standard_error(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Uniform cell-centered grid over `phi` in `[-pi, pi)` and `theta` in `(0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub n_phi: usize,
    pub n_theta: usize,
}

impl GridSpec {
    pub fn new(n_phi: usize, n_theta: usize) -> Result<Self> {
        if n_phi == 0 || n_theta == 0 {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        Ok(Self { n_phi, n_theta })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn len(&self) -> usize {
        self.n_phi * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self, i: usize) -> f64 {
        -PI + (i as f64 + 0.5) * 2.0 * PI / self.n_phi as f64
    }

    pub fn theta(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * PI / self.n_theta as f64
    }

    /// `(theta, phi)` of cell `idx`, ordered theta-major.
    pub fn cell(&self, idx: usize) -> (f64, f64) {
        (self.theta(idx / self.n_phi), self.phi(idx % self.n_phi))
    }
}

/// Per-cell largest Lyapunov exponents, theta-major.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LyapunovField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl LyapunovField {
    pub fn get(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta * self.grid.n_phi + i_phi]
    }

    /// `(phi, theta, lambda)` per cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &l)| {
            let (t, p) = self.grid.cell(i);
            (p, t, l)
        })
    }
}

pub fn lyapunov_field(
    params: &MapParams,
    grid: &GridSpec,
    opts: &LyapunovOptions,
) -> Result<LyapunovField> {
    opts.validate()?;
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (t, p) = grid.cell(i);
            lyapunov_unchecked(&ClassicalState::from_angles(t, p), params, opts).lambda
        })
        .collect();
    Ok(LyapunovField {
        grid: *grid,
        values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct AveragedLyapunov {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl AveragedLyapunov {
    /// Integral of the largest exponent over the sphere.
    pub fn ks_entropy(&self) -> f64 {
        4.0 * PI * self.mean
    }
}

/// Haar average of the largest exponent; sample `i` uses stream `i` of `seed`.
pub fn averaged_lyapunov(
    params: &MapParams,
    n_samples: usize,
    opts: &LyapunovOptions,
    seed: u64,
) -> Result<AveragedLyapunov> {
    opts.validate()?;
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("n_samples = {n_samples}")));
    }
    let lambdas: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let (t, p) = haar_point(&mut task_rng(seed, i as u64));
            lyapunov_unchecked(&ClassicalState::from_angles(t, p), params, opts).lambda
        })
        .collect();
    let mean = lambdas.iter().sum::<f64>() / n_samples as f64;
    Ok(AveragedLyapunov {
        mean,
        stderr: standard_error(&lambdas),
        samples: n_samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PortraitPoint {
    pub phi: f64,
    pub theta: f64,
    pub orbit: usize,
}

/// Orbits from Haar-random starting points, recorded after every kick
/// (the starting point included).
pub fn portrait(params: &MapParams, n_orbits: usize, n_kicks: usize, seed: u64) -> Vec<PortraitPoint> {
    (0..n_orbits)
        .into_par_iter()
        .flat_map_iter(|orbit| {
            let (t, p) = haar_point(&mut task_rng(seed, orbit as u64));
            let mut s = ClassicalState::from_angles(t, p);
            let mut pts = Vec::with_capacity(n_kicks + 1);
            for k in 0..=n_kicks {
                if k > 0 {
                    s = classical_step(&s, params);
                }
                let (theta, phi) = s.angles();
                pts.push(PortraitPoint { phi, theta, orbit });
            }
            pts
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdOptions {
    pub threshold: f64,
    pub kappa_max: f64,
    pub resolution: f64,
    pub n_samples: usize,
    pub lyapunov: LyapunovOptions,
    pub seed: u64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            threshold: 0.002,
            kappa_max: 10.0,
            resolution: 0.05,
            n_samples: 1000,
            lyapunov: LyapunovOptions::default(),
            seed: 0,
        }
    }
}

/// Kicking strength at which the averaged exponent crosses `threshold`,
/// located by bisection on `[0, kappa_max]` to within `resolution`.
pub fn kappa_threshold(alpha: f64, opts: &ThresholdOptions) -> Result<f64> {
    let no_crossing = || Error::NoCrossing {
        alpha,
        threshold: opts.threshold,
        kappa_max: opts.kappa_max,
    };
    let reduced = alpha.rem_euclid(PI);
    if reduced.min(PI - reduced) < 1e-12 {
        return Err(no_crossing());
    }
    let avg = |kappa: f64| {
        averaged_lyapunov(
            &MapParams { kappa, alpha },
            opts.n_samples,
            &opts.lyapunov,
            opts.seed,
        )
        .map(|a| a.mean)
    };
    let (mut lo, mut hi) = (0.0, opts.kappa_max);
    if avg(hi)? <= opts.threshold {
        return Err(no_crossing());
    }
    while hi - lo > opts.resolution {
        let mid = 0.5 * (lo + hi);
        if avg(mid)? > opts.threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
