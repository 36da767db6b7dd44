//! Numerical laboratory for thinning-invariant triangular arrays.
//!
//! * [`measures`]: dense joint measures on `X^n` with the thinning and
//!   exchangeable transition operators.
//! * [`profile`]: step-function profiles `t ↦ μ(·, t)` and the exact
//!   thinning-invariant family each one generates.
//! * [`spin_chain`]: oriented mean-field spin chains, Gibbs states, pressure
//!   and ground states.
//! * [`asep`]: the mean-field asymmetric exclusion process, its stationary
//!   measures and the limiting density profile.
//! * [`sampling`]: seeded Monte Carlo checks of the constructions.

pub mod asep;
pub mod combinatorics;
pub mod error;
pub mod measures;
pub mod profile;
pub mod quadrature;
pub mod sampling;
pub mod spin_chain;

pub use error::{Error, Result};
pub use measures::{check_thinning_invariance, Alphabet, InvarianceReport, JointMeasure};
pub use profile::{build_joint, coordinate_marginal, kink_profile, profile_mean, PiecewiseProfile};
pub use spin_chain::{cw_interaction, gibbs, hamiltonian, GibbsSolution, Interaction};
pub use asep::{stationary_measure, AsepModel, ProfileSolution, SectorMeasure};
