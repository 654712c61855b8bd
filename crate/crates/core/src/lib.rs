//! Thermalization of a two-level atom near a dielectric slab out of thermal
//! equilibrium with its environment.
//!
//! The pipeline runs from axial wavevectors ([`math`]) through Fresnel and
//! slab coefficients and the absorption integrand ([`layered`]) to the
//! effective occupation, rates and temperature ([`nonequilibrium`]) and the
//! master-equation evolution ([`dynamics`]).

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod layered;
pub mod math;
pub mod nonequilibrium;
pub mod quadrature;

pub use dynamics::{evolve, steady_state, Relaxation, TwoLevelState};
pub use error::{Error, Result};
pub use layered::{scattering_alpha, SlabGeometry, Thickness};
pub use math::{bose_occupation, Frequency, Permittivity, ThermalPair};
pub use nonequilibrium::{
    effective_occupation, effective_temperature, g_coincident, g_halfspace, thickness_criterion,
    transition_rates, AtomSpec, RateBundle, ThicknessCriterion,
};
pub use quadrature::{QuadratureResult, QuadratureSpec};
