//! Exact and approximate spectra of quasi-exactly solvable sextic oscillators.
//!
//! * [`poly`]: exact rationals, polynomials and Sturm root isolation.
//! * [`euler`]: series solutions of Euler-form operators `F(D) + P(x, d/dx)`.
//! * [`qes`]: sextic models, their measures and the exactly solvable levels.
//! * [`variational`]: residual minimization for levels outside that sector.
//! * [`reference`]: a finite-difference eigensolver used as an oracle.
//! * [`validation`]: checks of quoted closed forms against derived ones.

pub mod euler;
pub mod poly;
pub mod qes;
pub mod quad;
pub mod reference;
pub mod validation;
pub mod variational;

pub use euler::{EngineError, EulerOperator, MonomialTerm, XSeries};
pub use poly::{Poly, PolyError, Rational};
pub use qes::{ExactSpectrum, Measure, QesError, QesModel};
pub use reference::{ReferenceError, ReferenceSpectrum};
pub use variational::{DeltaCurve, DeltaMode, Parity, TruncatedState, VariationalError};

/// Any failure raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Qes(#[from] QesError),
    #[error(transparent)]
    Variational(#[from] VariationalError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
}
