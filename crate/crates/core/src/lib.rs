//! Generalized trigonometric and Jacobian elliptic functions, and the closed-form
//! spectra of the one-dimensional eigenvalue problems
//! `(φ_p(u'))' + λ φ_q(u) = 0` and `(φ_p(u'))' + λ φ_q(u)(1 - |u|^q) = 0`
//! with Dirichlet conditions on `(0, T)`.
//!
//! Every module is generic over the scalar type through [`Real`]; the `*64` aliases
//! below fix it to `f64`.

pub mod error;
pub mod gelliptic;
pub mod gtrig;
pub mod numerics;
mod real;
pub mod spectra;
mod wave;

pub use error::{Error, Result};
pub use gelliptic::{EllipticContext, Modulus};
pub use gtrig::{GenTrig, HalfPeriod, PQPair, Regime};
pub use numerics::{DerivativeOrder, QuadratureSpec, Tolerance};
pub use real::{signed_pow, Real};
pub use spectra::{
    Branch, EigenKind, EigenSolution, ModeReport, ProblemSpec, SpectrumReport, Thresholds,
};

pub type PQPair64 = PQPair<f64>;
pub type Modulus64 = Modulus<f64>;
pub type Tolerance64 = Tolerance<f64>;
pub type GenTrig64 = GenTrig<f64>;
pub type EllipticContext64 = EllipticContext<f64>;
pub type ProblemSpec64 = ProblemSpec<f64>;
pub type EigenSolution64 = EigenSolution<f64>;
pub type SpectrumReport64 = SpectrumReport<f64>;
