//! Simulation and analysis of the off-resonant atom-optics kicked-rotor
//! ratchet.
//!
//! Three descriptions of the same ratchet current are provided and can be
//! cross-checked against each other:
//!
//! * [`quantum`]: exact Floquet evolution in the momentum basis,
//! * [`eps_classical`]: the epsilon-classical map on phase-space ensembles,
//! * [`pendulum`]: the pendulum approximation and its one-parameter scaling
//!   function `F(x)/x`.
//!
//! [`beta_spread`] adds the effect of a finite quasi-momentum spread.

pub mod bessel;
pub mod beta_spread;
pub mod eps_classical;
pub mod error;
pub mod numeric;
pub mod params;
pub mod pendulum;
pub mod quantum;

pub use error::{RatchetError, Result};
pub use params::{InitialState, LabUnits, RatchetParams};
