//! Floquet operator of the kicked top in the Dicke basis.
//!
//! `F = exp(-i kappa/(2j) J_z^2) exp(-i alpha J_x)` with matrix elements
//! `<m|F|m'> = exp(-i kappa m^2 / (2j)) d_{m m'}(alpha)`. The rotation
//! `d(alpha)` is assembled from the eigenvectors of the tridiagonal `J_x`,
//! which also carry the parity `Pi = exp(i pi (J_x + j))` as the sign
//! `(-1)^(k_x + j)`.
//!
//! Quasienergies follow `F|nu> = e^{+i nu}|nu>` and live in `[-pi, pi)`.

mod cache;

pub use cache::{read_eigensystem, write_eigensystem, EigenCache};

use std::f64::consts::PI;

use faer::{c64, Mat, MatRef};

use crate::classical::MapParams;
use crate::linalg::{self, hermitian_eigen, normal_eigen, select_columns};
use crate::spin::{OperatorMatrix, SpinBasis};
use crate::{Error, Result};

/// Phase gap below which eigenvectors are re-resolved jointly. The dense
/// solver mixes eigenvectors of nearly equal eigenvalues by roughly
/// `N eps / gap`, which has to stay well below the parity tolerance.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Splitting below which eigenvalues count as exactly degenerate and the
/// basis is fixed by diagonalizing `J_z^2`.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Maximum allowed deviation of `|<v|Pi|v>|` from one.
pub const PARITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KickedTopParams {
    pub j: u32,
    pub kappa: f64,
    /// Precession angle, reduced to `[0, 2 pi)`.
    pub alpha: f64,
}

impl KickedTopParams {
    pub fn new(j: u32, kappa: f64, alpha: f64) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidSpin("kicked top needs integer j >= 1".into()));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} must be >= 0")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
        }
        let alpha = alpha.rem_euclid(2.0 * PI);
        let alpha = if alpha >= 2.0 * PI { 0.0 } else { alpha };
        Ok(Self { j, kappa, alpha })
    }

    pub fn basis(&self) -> SpinBasis {
        SpinBasis::integer(self.j).expect("validated j >= 1")
    }

    pub fn dim(&self) -> usize {
        2 * self.j as usize + 1
    }

    pub fn map_params(&self) -> MapParams {
        MapParams {
            kappa: self.kappa,
            alpha: self.alpha,
        }
    }

    fn solver_error(&self, dim: usize) -> Error {
        Error::Eigensolver {
            dim,
            j: self.j as f64,
            kappa: self.kappa,
            alpha: self.alpha,
        }
    }
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Maps a phase onto `[-pi, pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

/// Eigenvectors of `J_x` in the Dicke basis.
///
/// Eigenvalues are snapped to the exact ladder `-j, ..., j`; the vectors are
/// real because `J_x` is a real symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct JxEigenbasis {
    basis: SpinBasis,
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

pub fn jx_eigenbasis(basis: SpinBasis) -> Result<JxEigenbasis> {
    let n = basis.dim();
    let mut jx = Mat::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        let r = 0.5 * basis.raising_element(i);
        jx[(i + 1, i)] = r;
        jx[(i, i + 1)] = r;
    }
    let fail = || Error::Eigensolver {
        dim: n,
        j: basis.j(),
        kappa: 0.0,
        alpha: 0.0,
    };
    let (raw, vectors) = linalg::symmetric_eigen(jx.as_ref()).ok_or_else(fail)?;
    let mut eigenvalues = Vec::with_capacity(n);
    for (i, &k) in raw.iter().enumerate() {
        let exact = basis.m(i);
        if (k - exact).abs() > 1e-6 {
            return Err(fail());
        }
        eigenvalues.push(exact);
    }
    Ok(JxEigenbasis {
        basis,
        eigenvalues,
        vectors,
    })
}

impl JxEigenbasis {
    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    /// Eigenvalues `k_x`, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `c` is the eigenvector for `eigenvalues()[c]`.
    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    /// Parity label of eigenvector `c`. Integer `j` only.
    pub fn parity(&self, c: usize) -> Parity {
        let s = (self.eigenvalues[c] + self.basis.j()).round() as i64;
        if s.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sector_indices(&self, parity: Parity) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|&c| self.parity(c) == parity)
            .collect()
    }

    /// `sum_k e^{-i alpha k} |k><k|` expressed in the Dicke basis.
    pub fn rotation(&self, alpha: f64) -> OperatorMatrix {
        let n = self.basis.dim();
        let u = &self.vectors;
        let scaled = Mat::<c64>::from_fn(n, n, |r, c| {
            c64::from_polar(u[(r, c)], -alpha * self.eigenvalues[c])
        });
        let ut = linalg::to_complex(u.transpose());
        OperatorMatrix::from_mat(&scaled * &ut)
    }

    fn parity_matrix_real(&self) -> Mat<f64> {
        let n = self.basis.dim();
        let u = &self.vectors;
        let signed = Mat::<f64>::from_fn(n, n, |r, c| u[(r, c)] * self.parity(c).sign());
        &signed * u.transpose()
    }
}

/// `d_{m m'}(alpha) = <j,m| e^{-i alpha J_x} |j,m'>`.
pub fn wigner_d_matrix(basis: SpinBasis, alpha: f64) -> Result<OperatorMatrix> {
    Ok(jx_eigenbasis(basis)?.rotation(alpha))
}

/// Diagonal of the kick `exp(-i kappa m^2 / (2j))`, indexed like the basis.
pub fn kick_phases(params: &KickedTopParams) -> Vec<c64> {
    let basis = params.basis();
    let scale = params.kappa / (2.0 * basis.j());
    basis
        .m_values()
        .map(|m| c64::from_polar(1.0, -scale * m * m))
        .collect()
}

#[derive(Clone, Debug)]
pub struct FloquetOperator {
    params: KickedTopParams,
    matrix: OperatorMatrix,
}

impl FloquetOperator {
    pub fn params(&self) -> &KickedTopParams {
        &self.params
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.unitarity_defect()
    }

    /// `max |F Pi - Pi F|`.
    pub fn parity_defect(&self, parity: &OperatorMatrix) -> f64 {
        let c = self.matrix.commutator(parity);
        c.max_abs_diff(&OperatorMatrix::from_mat(Mat::zeros(self.dim(), self.dim())))
    }
}

pub fn build_floquet(params: &KickedTopParams) -> Result<FloquetOperator> {
    let d = wigner_d_matrix(params.basis(), params.alpha)?.into_mat();
    Ok(floquet_from_rotation(params, d))
}

fn floquet_from_rotation(params: &KickedTopParams, d: Mat<c64>) -> FloquetOperator {
    let kick = kick_phases(params);
    let n = kick.len();
    let f = Mat::from_fn(n, n, |r, c| kick[r] * d[(r, c)]);
    FloquetOperator {
        params: *params,
        matrix: OperatorMatrix::from_mat(f),
    }
}

/// Parity `Pi = exp(i pi (J_x + j))`, built from the `J_x` eigenbasis.
pub fn parity_operator(basis: SpinBasis) -> Result<OperatorMatrix> {
    if !basis.is_integer() {
        return Err(Error::InvalidSpin(format!(
            "parity is defined for integer j, got j = {}",
            basis.j()
        )));
    }
    let jx = jx_eigenbasis(basis)?;
    Ok(OperatorMatrix::from_mat(linalg::to_complex(
        jx.parity_matrix_real().as_ref(),
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EigenMethod {
    /// Dense eigensolver on the full Floquet matrix, parity read off afterwards.
    Full,
    /// Even and odd blocks in the `J_x` eigenbasis diagonalized separately.
    Sector,
}

/// Quasienergies, orthonormal eigenvectors and parity labels of `F`.
///
/// Sorted by quasienergy, ties broken even-first.
#[derive(Clone, Debug)]
pub struct FloquetEigensystem {
    params: KickedTopParams,
    method: EigenMethod,
    quasienergies: Vec<f64>,
    eigenvectors: Mat<c64>,
    parities: Vec<Parity>,
    degenerate_clusters: usize,
}

impl FloquetEigensystem {
    pub fn params(&self) -> &KickedTopParams {
        &self.params
    }

    pub fn method(&self) -> EigenMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quasienergies.is_empty()
    }

    pub fn quasienergies(&self) -> &[f64] {
        &self.quasienergies
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    /// Column `i` is `|nu_i>` in the Dicke basis.
    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigenvectors.as_ref()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<c64> {
        (0..self.eigenvectors.nrows())
            .map(|r| self.eigenvectors[(r, i)])
            .collect()
    }

    /// Number of (near-)degenerate clusters that were re-resolved. Nonzero
    /// values mean the eigenvector gauge was fixed by convention.
    pub fn degenerate_clusters(&self) -> usize {
        self.degenerate_clusters
    }

    /// Sorted quasienergies of one parity sector.
    pub fn sector(&self, parity: Parity) -> Vec<f64> {
        self.quasienergies
            .iter()
            .zip(&self.parities)
            .filter(|(_, p)| **p == parity)
            .map(|(q, _)| *q)
            .collect()
    }

    pub fn sector_count(&self, parity: Parity) -> usize {
        self.parities.iter().filter(|p| **p == parity).count()
    }

    pub(crate) fn from_parts(
        params: KickedTopParams,
        method: EigenMethod,
        quasienergies: Vec<f64>,
        eigenvectors: Mat<c64>,
        parities: Vec<Parity>,
        degenerate_clusters: usize,
    ) -> Self {
        Self {
            params,
            method,
            quasienergies,
            eigenvectors,
            parities,
            degenerate_clusters,
        }
    }

    fn sorted(
        params: KickedTopParams,
        method: EigenMethod,
        phases: Vec<f64>,
        vectors: Mat<c64>,
        parities: Vec<Parity>,
        degenerate_clusters: usize,
    ) -> Self {
        let mut order: Vec<usize> = (0..phases.len()).collect();
        order.sort_by(|&a, &b| {
            phases[a]
                .total_cmp(&phases[b])
                .then(parities[a].cmp(&parities[b]))
        });
        Self {
            params,
            method,
            quasienergies: order.iter().map(|&i| phases[i]).collect(),
            eigenvectors: select_columns(vectors.as_ref(), &order),
            parities: order.iter().map(|&i| parities[i]).collect(),
            degenerate_clusters,
        }
    }
}

/// Diagonalizes `F` with a dense general eigensolver and labels each
/// eigenvector by the sign of `<v|Pi|v>`.
pub fn diagonalize(f: &FloquetOperator, parity: &OperatorMatrix) -> Result<FloquetEigensystem> {
    let params = *f.params();
    let n = f.dim();
    if parity.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: parity.dim(),
        });
    }
    let fm = f.matrix().as_mat();
    let pm = parity.as_mat();
    let (values, mut vectors) = normal_eigen(fm.as_ref()).ok_or_else(|| params.solver_error(n))?;
    let mut phases: Vec<f64> = values.iter().map(|z| wrap_phase(z.arg())).collect();

    let m2: Vec<f64> = params.basis().m_values().map(|m| m * m).collect();
    let apply_f = |w: MatRef<'_, c64>| fm * w;
    let apply_p = |w: MatRef<'_, c64>| pm * w;
    let apply_gauge = |w: MatRef<'_, c64>| scale_rows(w, &m2);
    let clusters = resolve_clusters(
        &mut phases,
        &mut vectors,
        &apply_f,
        Some(&apply_p),
        &apply_gauge,
    )
    .map_err(|_| params.solver_error(n))?;

    let pv = pm * &vectors;
    let mut parities = Vec::with_capacity(n);
    for c in 0..n {
        let e: f64 = (0..n).map(|r| (vectors[(r, c)].conj() * pv[(r, c)]).re).sum();
        if (e.abs() - 1.0).abs() > PARITY_TOL {
            return Err(Error::DegenerateSubspace {
                index: c,
                expectation: e,
            });
        }
        parities.push(if e > 0.0 { Parity::Even } else { Parity::Odd });
    }
    Ok(FloquetEigensystem::sorted(
        params,
        EigenMethod::Full,
        phases,
        vectors,
        parities,
        clusters,
    ))
}

/// Floquet block of one parity sector in `J_x`-eigenbasis coordinates,
/// together with the complexified sector basis (Dicke rows, sector columns).
struct SectorBlock {
    block: Mat<c64>,
    basis: Mat<c64>,
}

fn sector_block(params: &KickedTopParams, jx: &JxEigenbasis, parity: Parity) -> SectorBlock {
    let idx = jx.sector_indices(parity);
    let v = linalg::to_complex(select_columns(jx.vectors(), &idx).as_ref());
    let kick = kick_phases(params);
    let dv = scale_rows_c(v.as_ref(), &kick);
    let mut block = v.transpose() * &dv;
    for (c, &k) in idx.iter().enumerate() {
        let ph = c64::from_polar(1.0, -params.alpha * jx.eigenvalues()[k]);
        for r in 0..block.nrows() {
            block[(r, c)] *= ph;
        }
    }
    SectorBlock { block, basis: v }
}

/// Diagonalizes the even and odd blocks separately. Each eigenvector has
/// exact parity by construction; the Dicke-basis Floquet matrix is never
/// formed, so this route is independent of [`build_floquet`].
pub fn diagonalize_by_sector(params: &KickedTopParams) -> Result<FloquetEigensystem> {
    let basis = params.basis();
    let n = basis.dim();
    let jx = jx_eigenbasis(basis)?;
    let m2: Vec<f64> = basis.m_values().map(|m| m * m).collect();

    let mut phases = Vec::with_capacity(n);
    let mut parities = Vec::with_capacity(n);
    let mut vectors = Mat::<c64>::zeros(n, n);
    let mut col = 0;
    let mut clusters = 0;
    for parity in [Parity::Even, Parity::Odd] {
        let SectorBlock { block, basis: v } = sector_block(params, &jx, parity);
        let d = block.nrows();
        let (values, mut u) =
            normal_eigen(block.as_ref()).ok_or_else(|| params.solver_error(d))?;
        let mut ph: Vec<f64> = values.iter().map(|z| wrap_phase(z.arg())).collect();
        let apply_f = |w: MatRef<'_, c64>| &block * w;
        let apply_gauge = |w: MatRef<'_, c64>| {
            let dicke = &v * w;
            v.transpose() * scale_rows(dicke.as_ref(), &m2)
        };
        clusters += resolve_clusters(&mut ph, &mut u, &apply_f, None, &apply_gauge)
            .map_err(|_| params.solver_error(d))?;
        let dicke = &v * &u;
        for c in 0..d {
            for r in 0..n {
                vectors[(r, col + c)] = dicke[(r, c)];
            }
        }
        col += d;
        phases.extend(ph);
        parities.extend(std::iter::repeat_n(parity, d));
    }
    Ok(FloquetEigensystem::sorted(
        *params,
        EigenMethod::Sector,
        phases,
        vectors,
        parities,
        clusters,
    ))
}

/// Builds and diagonalizes `F` by the requested route.
pub fn eigensystem(params: &KickedTopParams, method: EigenMethod) -> Result<FloquetEigensystem> {
    match method {
        EigenMethod::Full => {
            let f = build_floquet(params)?;
            let p = parity_operator(params.basis())?;
            diagonalize(&f, &p)
        }
        EigenMethod::Sector => diagonalize_by_sector(params),
    }
}

/// Sorted quasienergies of a single parity sector, without eigenvectors.
pub fn sector_quasienergies(params: &KickedTopParams, parity: Parity) -> Result<Vec<f64>> {
    let jx = jx_eigenbasis(params.basis())?;
    let SectorBlock { block, .. } = sector_block(params, &jx, parity);
    let values = linalg::normal_eigenvalues(block.as_ref())
        .ok_or_else(|| params.solver_error(block.nrows()))?;
    let mut phases: Vec<f64> = values.iter().map(|z| wrap_phase(z.arg())).collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// `F^n |psi_0>` by repeated application.
pub fn evolve_state(f: &FloquetOperator, psi0: &[c64], n_kicks: usize) -> Result<Vec<c64>> {
    let n = f.dim();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi0.len(),
        });
    }
    let fm = f.matrix().as_mat();
    let mut psi = Mat::<c64>::from_fn(n, 1, |r, _| psi0[r]);
    for _ in 0..n_kicks {
        psi = fm * &psi;
    }
    Ok((0..n).map(|r| psi[(r, 0)]).collect())
}

fn scale_rows(w: MatRef<'_, c64>, d: &[f64]) -> Mat<c64> {
    Mat::from_fn(w.nrows(), w.ncols(), |r, c| w[(r, c)] * d[r])
}

fn scale_rows_c(w: MatRef<'_, c64>, d: &[c64]) -> Mat<c64> {
    Mat::from_fn(w.nrows(), w.ncols(), |r, c| d[r] * w[(r, c)])
}

type BlockOp<'a> = &'a dyn Fn(MatRef<'_, c64>) -> Mat<c64>;

/// Re-resolves groups of eigenvectors whose phases lie within
/// [`CLUSTER_TOL`] of each other (cyclically). Inside a group the basis is
/// rotated so that it diagonalizes, in turn, the parity (if given), the
/// operator itself and finally the gauge operator. Returns the number of
/// groups touched.
fn resolve_clusters(
    phases: &mut [f64],
    vectors: &mut Mat<c64>,
    op: BlockOp<'_>,
    parity: Option<BlockOp<'_>>,
    gauge: BlockOp<'_>,
) -> std::result::Result<usize, ()> {
    let n = phases.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if phases[i] - phases[*g.last().unwrap()] < CLUSTER_TOL => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    if groups.len() > 1 {
        let first = phases[groups[0][0]];
        let last = phases[*groups.last().unwrap().last().unwrap()];
        if first + 2.0 * PI - last < CLUSTER_TOL {
            let tail = groups.pop().unwrap();
            groups[0].extend(tail);
        }
    }

    let mut touched = 0;
    for g in groups.iter().filter(|g| g.len() > 1) {
        touched += 1;
        let q = select_columns(vectors.as_ref(), g);
        let resolved = resolve_group(q, op, parity, gauge)?;
        let fq = op(resolved.as_ref());
        for (c, &col) in g.iter().enumerate() {
            let mut rq = c64::new(0.0, 0.0);
            for r in 0..vectors.nrows() {
                vectors[(r, col)] = resolved[(r, c)];
                rq += resolved[(r, c)].conj() * fq[(r, c)];
            }
            phases[col] = wrap_phase(rq.arg());
        }
    }
    Ok(touched)
}

fn resolve_group(
    q: Mat<c64>,
    op: BlockOp<'_>,
    parity: Option<BlockOp<'_>>,
    gauge: BlockOp<'_>,
) -> std::result::Result<Mat<c64>, ()> {
    let subspaces = match parity {
        Some(p) => {
            let h = hermitian_part(&(q.adjoint() * p(q.as_ref())));
            let (vals, u) = hermitian_eigen(h.as_ref()).ok_or(())?;
            let even: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.0).collect();
            let odd: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= 0.0).collect();
            [even, odd]
                .into_iter()
                .filter(|s| !s.is_empty())
                .map(|s| &q * select_columns(u.as_ref(), &s))
                .collect()
        }
        None => vec![q],
    };

    let mut cols: Vec<Mat<c64>> = Vec::new();
    for w in subspaces {
        if w.ncols() == 1 {
            cols.push(w);
            continue;
        }
        // phase deviations inside the group: Im(e^{-i nu_bar} G) is Hermitian
        // with eigenvalues sin(nu - nu_bar)
        let g = w.adjoint() * op(w.as_ref());
        let tr: c64 = (0..g.nrows()).map(|i| g[(i, i)]).sum();
        let rot = if tr.norm() > 0.0 {
            tr.conj() / tr.norm()
        } else {
            c64::new(1.0, 0.0)
        };
        let k = g.nrows();
        let h = Mat::<c64>::from_fn(k, k, |r, c| {
            (g[(r, c)] * rot - (g[(c, r)] * rot).conj()) * c64::new(0.0, -0.5)
        });
        let (vals, u) = hermitian_eigen(hermitian_part(&h).as_ref()).ok_or(())?;
        let y = &w * &u;

        let mut start = 0;
        while start < k {
            let mut end = start + 1;
            while end < k && vals[end] - vals[end - 1] < DEGENERACY_TOL {
                end += 1;
            }
            let run: Vec<usize> = (start..end).collect();
            let z = select_columns(y.as_ref(), &run);
            if run.len() == 1 {
                cols.push(z);
            } else {
                let gm = hermitian_part(&(z.adjoint() * gauge(z.as_ref())));
                let (_, gu) = hermitian_eigen(gm.as_ref()).ok_or(())?;
                cols.push(&z * &gu);
            }
            start = end;
        }
    }
    let nrows = cols[0].nrows();
    let total: usize = cols.iter().map(|c| c.ncols()).sum();
    let mut out = Mat::<c64>::zeros(nrows, total);
    let mut at = 0;
    for block in cols {
        for c in 0..block.ncols() {
            for r in 0..nrows {
                out[(r, at + c)] = block[(r, c)];
            }
        }
        at += block.ncols();
    }
    Ok(out)
}

fn hermitian_part(a: &Mat<c64>) -> Mat<c64> {
    let n = a.nrows();
    Mat::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5)
}
