//! Numerical laboratory for the quantum kicked top.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`] – Dicke basis bookkeeping, angular-momentum matrices and SU(2)
//!   coherent states.
//! * [`floquet`] – the one-period Floquet operator, its parity symmetry,
//!   eigendecomposition into quasienergies and stroboscopic evolution.
//! * [`classical`] – the classical stroboscopic map on the unit sphere,
//!   tangent dynamics and largest Lyapunov exponents.
//! * [`spectral`] – nearest-neighbour spacing statistics, Brody fits and the
//!   consecutive spacing ratio.
//! * [`multifractal`] – Rényi entropies and fractal dimensions of coherent
//!   states expanded in the Floquet eigenbasis.
//! * [`coeff_stats`] – χ²_ν reference laws for rescaled expansion
//!   coefficients and the SKLD / RMSE distances to them.
//!
//! All numerical entry points are pure functions of their inputs. Work that
//! is naturally data-parallel (grids, Monte-Carlo averages) runs on the
//! ambient rayon pool, with per-task random streams so results do not depend
//! on scheduling.

pub mod classical;
pub mod coeff_stats;
mod error;
pub mod floquet;
mod linalg;
pub mod multifractal;
pub mod sampling;
pub mod spectral;
pub mod spin;

pub use error::{Error, Result};
pub use faer::c64;
pub use faer::Mat;

pub use classical::{ClassicalState, GridSpec, LyapunovOptions, MapParams};
pub use floquet::{FloquetEigensystem, FloquetOperator, KickedTopParams, Parity};
pub use multifractal::{ExpansionCoefficients, MultifractalResult};
pub use spin::{Axis, CoherentState, OperatorMatrix, SpinBasis};
