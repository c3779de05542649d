//! Stark effect of atomic hydrogen, computed two independent ways.
//!
//! [`perturbation`] builds the energy expansion in the field strength from
//! exact rational closed forms and, separately, from the associated Laguerre
//! integrals of [`integrals`]. [`siegert`] solves the separated parabolic
//! channel equations numerically for complex resonance energies.
//!
//! Numerical code is generic over [`scalar::Real`]; the aliases below fix the
//! common choices.

pub mod exact;
pub mod integrals;
pub mod laguerre;
pub mod perturbation;
pub mod scalar;
pub mod siegert;

use twofloat::TwoFloat;

pub use perturbation::{Order, ParabolicState, StarkExpansion, StateError};
pub use siegert::{Boundary, SiegertError, SolverOptions};

pub type GaussLaguerreF64 = integrals::GaussLaguerre<f64>;
/// Double-double rule used as the integral oracle.
pub type GaussLaguerreDd = integrals::GaussLaguerre<TwoFloat>;
pub type FirstOrderPairF64 = perturbation::wavefunction::FirstOrderPair<f64>;
pub type ResidualSampleF64 = perturbation::wavefunction::ResidualSample<f64>;
pub type SiegertSolutionF64 = siegert::SiegertSolution<f64>;
pub type ChannelProblemF64 = siegert::ChannelProblem<f64>;
