//! Spin-j algebra in the Dicke basis.
//!
//! Basis index `i` corresponds to the magnetic quantum number `m = -j + i`,
//! so index `0` is `|j,-j>` and index `2j` is `|j,j>`.

use faer::{c64, Mat};

use crate::{Error, Result};

/// Spin quantum number `j` and the associated `2j + 1` Dicke states.
///
/// Stored as `2j` so that half-integer spins are represented exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinBasis {
    twice_j: u32,
}

impl SpinBasis {
    /// Spin `j`, which must be a positive integer or half-integer.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice.is_finite() && twice >= 1.0 && twice.fract() == 0.0 && twice <= u32::MAX as f64)
        {
            return Err(Error::InvalidSpin(format!(
                "j = {j} (must be a positive multiple of 1/2)"
            )));
        }
        Ok(Self {
            twice_j: twice as u32,
        })
    }

    pub fn from_twice_j(twice_j: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(Error::InvalidSpin("j = 0".into()));
        }
        Ok(Self { twice_j })
    }

    /// Integer spin `j >= 1`.
    pub fn integer(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidSpin("j = 0".into()));
        }
        Ok(Self { twice_j: 2 * j })
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    /// Hilbert-space dimension `2j + 1`.
    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn is_integer(&self) -> bool {
        self.twice_j.is_multiple_of(2)
    }

    /// Magnetic quantum number of basis index `index`.
    pub fn m(&self, index: usize) -> f64 {
        index as f64 - self.j()
    }

    pub fn index_of(&self, m: f64) -> Option<usize> {
        let i = m + self.j();
        (i >= 0.0 && i.fract() == 0.0 && (i as usize) < self.dim()).then_some(i as usize)
    }

    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(|i| self.m(i))
    }

    /// `<m+1| J_+ |m> = sqrt(j(j+1) - m(m+1))` for the state at `index`.
    pub fn raising_element(&self, index: usize) -> f64 {
        let j = self.j();
        let m = self.m(index);
        (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense complex operator in the Dicke basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix(Mat<c64>);

impl OperatorMatrix {
    pub fn from_mat(m: Mat<c64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Mat::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &Mat<c64> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }

    /// `[self, rhs] = self rhs - rhs self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0 - &rhs.0 * &self.0)
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        assert_eq!(v.len(), self.dim());
        let n = self.dim();
        (0..n)
            .map(|r| (0..n).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Largest entry-wise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        crate::linalg::max_abs_diff(self.0.as_ref(), rhs.0.as_ref())
    }

    /// `max |A^dagger - A|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |A^dagger A - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        crate::linalg::max_abs_diff(prod.as_ref(), Mat::<c64>::identity(self.dim(), self.dim()).as_ref())
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    /// Expectation value `<v|A|v>` (no normalization applied).
    pub fn expectation(&self, v: &[c64]) -> c64 {
        let av = self.apply(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Matrix of `J_x`, `J_y` or `J_z` in the Dicke basis.
pub fn angular_momentum(basis: SpinBasis, axis: Axis) -> OperatorMatrix {
    let n = basis.dim();
    let mut m = Mat::<c64>::zeros(n, n);
    match axis {
        Axis::Z => {
            for i in 0..n {
                m[(i, i)] = c64::new(basis.m(i), 0.0);
            }
        }
        Axis::X | Axis::Y => {
            for i in 0..n - 1 {
                // J_+ has <i+1|J_+|i> = r, J_- its transpose
                let r = basis.raising_element(i);
                let (up, down) = match axis {
                    Axis::X => (c64::new(0.5 * r, 0.0), c64::new(0.5 * r, 0.0)),
                    // J_y = (J_+ - J_-) / 2i
                    _ => (c64::new(0.0, -0.5 * r), c64::new(0.0, 0.5 * r)),
                };
                m[(i + 1, i)] = up;
                m[(i, i + 1)] = down;
            }
        }
    }
    OperatorMatrix(m)
}

/// SU(2) spin coherent state `|theta, phi>` in the Dicke basis.
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub amplitudes: Vec<c64>,
    pub theta: f64,
    pub phi: f64,
}

impl CoherentState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `(<J_x>, <J_y>, <J_z>) / j`.
    pub fn mean_spin(&self, basis: SpinBasis) -> [f64; 3] {
        assert_eq!(basis.dim(), self.amplitudes.len());
        let a = &self.amplitudes;
        let mut raise = c64::new(0.0, 0.0);
        let mut z = 0.0;
        for i in 0..a.len() {
            z += basis.m(i) * a[i].norm_sqr();
            if i + 1 < a.len() {
                raise += a[i + 1].conj() * a[i] * basis.raising_element(i);
            }
        }
        let j = basis.j();
        [raise.re / j, raise.im / j, z / j]
    }
}

/// Builds `|theta, phi> = sum_m zeta^{j-m} (1+|zeta|^2)^{-j} sqrt(C(2j, j-m)) |j,m>`
/// with `zeta = tan(theta/2) e^{i phi}`.
///
/// Magnitudes are accumulated in log space, using
/// `|zeta|^{j-m} (1+|zeta|^2)^{-j} = sin(theta/2)^{j-m} cos(theta/2)^{j+m}`,
/// so large `j` neither overflows nor underflows prematurely. The poles
/// `theta = 0` and `theta = pi` return `|j,j>` and `|j,-j>` exactly.
pub fn coherent_state(basis: SpinBasis, theta: f64, phi: f64) -> Result<CoherentState> {
    if !(theta.is_finite() && phi.is_finite()) || !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "coherent state angles (theta = {theta}, phi = {phi}); theta must lie in [0, pi]"
        )));
    }
    let n = basis.dim();
    let mut amplitudes = vec![c64::new(0.0, 0.0); n];
    if theta == 0.0 {
        amplitudes[n - 1] = c64::new(1.0, 0.0);
        return Ok(CoherentState { amplitudes, theta, phi });
    }
    if theta == std::f64::consts::PI {
        amplitudes[0] = c64::new(1.0, 0.0);
        return Ok(CoherentState { amplitudes, theta, phi });
    }

    let ln_sin = (0.5 * theta).sin().ln();
    let ln_cos = (0.5 * theta).cos().ln();
    let ln_binom = ln_binomial_row(basis.twice_j());
    let tj = basis.twice_j() as usize;
    for (i, amp) in amplitudes.iter_mut().enumerate() {
        // i = j + m, so j - m = 2j - i
        let k = tj - i;
        let ln_mag = 0.5 * ln_binom[k] + k as f64 * ln_sin + i as f64 * ln_cos;
        *amp = c64::from_polar(ln_mag.exp(), k as f64 * phi);
    }
    Ok(CoherentState { amplitudes, theta, phi })
}

/// `ln C(n, k)` for `k = 0..=n` by accumulating log ratios.
fn ln_binomial_row(n: u32) -> Vec<f64> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    row.push(acc);
    for k in 1..=n {
        acc += ((n - k + 1) as f64).ln() - (k as f64).ln();
        row.push(acc);
    }
    row
}
