//! Bell-inequality monogamy and multiparty quantum correlations of pure
//! qubit states.
//!
//! The kernels are generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix the common choices. Experiment
//! drivers in [`experiments`] run in `f64`.
//!
//! ```
//! use qcorr::{bell::bell_scores, families::w_state, State};
//!
//! let w: State = w_state(3).unwrap();
//! let s = bell_scores(&w, 0).unwrap();
//! assert!((s.delta_bv - (2.0 * (17.0f64 / 9.0).sqrt() - 2.0)).abs() < 1e-9);
//! ```

pub mod bell;
mod error;
pub mod experiments;
pub mod families;
pub mod measures;
pub mod numerics;
pub mod qstate;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub use bell::{bell_scores, BellScores};
pub use families::{FamilyKind, FamilySpec};
pub use measures::Arrow;
pub use qstate::{DensityMatrix, PureState};

pub type State = qstate::PureState<f64>;
pub type StateF32 = qstate::PureState<f32>;
pub type Density = qstate::DensityMatrix<f64>;
pub type DensityF32 = qstate::DensityMatrix<f32>;
pub type Matrix = numerics::ComplexMatrix<f64>;
pub type MatrixF32 = numerics::ComplexMatrix<f32>;
pub type Complex64 = Cplx<f64>;
