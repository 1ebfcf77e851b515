//! Sobolev spaces `H^s_gamma(G)` on finite abelian groups, the string-field
//! operator `L_c = Delta e^{-c Delta} - Id` as a Fourier multiplier, and a
//! damped fixed-point solver for `Delta e^{-c Delta} phi = U(x, phi)`.

pub mod checks;
pub mod error;
pub mod group;
pub mod io;
pub mod nonlinear;
pub mod sampling;
pub mod sobolev;
pub mod spectral;
pub mod stringop;
pub mod sum;

pub use error::{Error, Result};
pub use group::{DualCharacter, FiniteAbelianGroup, GroupElement};
pub use sobolev::{SobolevParams, Weight, WeightProfile};
pub use spectral::{GroupRef, Signal, Spectrum};
pub use nonlinear::{Nonlinearity, SolveReport, SolverConfig};
pub use stringop::{OperatorParams, StringOperator};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
