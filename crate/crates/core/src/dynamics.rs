//! Closed-form evolution of the two-level density matrix under thermal
//! emission and absorption.
//!
//! Populations obey `d rho22/dt = -down rho22 + up rho11`; the coherence
//! `rho12` rotates at `omega0` and decays at `(down + up)/2`. Level shifts
//! would only add to the rotation frequency and are not modelled.

use num_complex::Complex64;

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{non_negative, Error, Result};
use crate::math::Frequency;
use crate::nonequilibrium::RateBundle;

const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    rho11: f64,
    rho22: f64,
    rho12: Complex64,
}

impl TwoLevelState {
    pub fn new(rho11: f64, rho22: f64, rho12: Complex64) -> Result<Self> {
        for (name, v) in [("rho11", rho11), ("rho22", rho22)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput {
                    name,
                    value: v,
                    reason: "population must lie in [0, 1]",
                });
            }
        }
        if (rho11 + rho22 - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidInput {
                name: "trace",
                value: rho11 + rho22,
                reason: "populations must sum to 1",
            });
        }
        if !rho12.is_finite() || rho12.norm_sqr() > rho11 * rho22 * (1.0 + 1e-12) {
            return Err(Error::InvalidInput {
                name: "rho12",
                value: rho12.norm(),
                reason: "coherence must satisfy |rho12|^2 <= rho11 rho22",
            });
        }
        Ok(Self { rho11, rho22, rho12 })
    }

    /// Population `rho22` with no coherence.
    pub fn diagonal(rho22: f64) -> Result<Self> {
        Self::new(1.0 - rho22, rho22, Complex64::new(0.0, 0.0))
    }

    pub fn excited() -> Self {
        Self {
            rho11: 0.0,
            rho22: 1.0,
            rho12: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho22(&self) -> f64 {
        self.rho22
    }

    pub fn rho12(&self) -> Complex64 {
        self.rho12
    }
}

/// Downward and upward rates (1/s) plus the transition frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    down: f64,
    up: f64,
    omega0: Frequency,
}

impl Relaxation {
    pub fn new(down: f64, up: f64, omega0: Frequency) -> Result<Self> {
        non_negative("gamma_down", down)?;
        non_negative("gamma_up", up)?;
        if up > down {
            return Err(Error::InvalidInput {
                name: "gamma_up",
                value: up,
                reason: "upward rate cannot exceed the downward rate",
            });
        }
        Ok(Self { down, up, omega0 })
    }

    /// Rates of a computed bundle; fails when the bundle carries none
    /// (lossless finite slab).
    pub fn from_bundle(bundle: &RateBundle, omega0: Frequency) -> Result<Self> {
        match (bundle.gamma_down, bundle.gamma_up) {
            (Some(down), Some(up)) => Self::new(down, up, omega0),
            _ => Err(Error::LosslessSlab),
        }
    }

    pub fn down(&self) -> f64 {
        self.down
    }

    pub fn up(&self) -> f64 {
        self.up
    }

    pub fn total(&self) -> f64 {
        self.down + self.up
    }

    pub fn omega0(&self) -> Frequency {
        self.omega0
    }

    fn stationary_rho22(&self) -> f64 {
        self.up / (self.down + self.up)
    }
}

pub fn evolve(state: &TwoLevelState, rates: &Relaxation, t: f64) -> Result<TwoLevelState> {
    non_negative("t", t)?;
    if t == 0.0 {
        return Ok(*state);
    }
    let total = rates.total();
    let (rho22, decay) = if total > 0.0 {
        let decay = (-total * t).exp();
        let inf = rates.stationary_rho22();
        (inf + (state.rho22 - inf) * decay, decay)
    } else {
        (state.rho22, 1.0)
    };
    let rotation = Complex64::from_polar(decay.sqrt(), rates.omega0.omega() * t);
    Ok(TwoLevelState {
        rho11: 1.0 - rho22,
        rho22,
        rho12: state.rho12 * rotation,
    })
}

pub fn steady_state(rates: &Relaxation) -> Result<TwoLevelState> {
    if !(rates.total() > 0.0) {
        return Err(Error::InvalidInput {
            name: "gamma_down + gamma_up",
            value: rates.total(),
            reason: "steady state needs a nonzero total rate",
        });
    }
    let rho22 = rates.stationary_rho22();
    Ok(TwoLevelState {
        rho11: 1.0 - rho22,
        rho22,
        rho12: Complex64::new(0.0, 0.0),
    })
}

/// Temperature for which `rho22 / rho11` is the Boltzmann factor; zero for
/// an unpopulated upper level.
pub fn boltzmann_temperature(state: &TwoLevelState, omega0: Frequency) -> f64 {
    if state.rho22 == 0.0 {
        return 0.0;
    }
    HBAR * omega0.omega() / (BOLTZMANN * (state.rho11 / state.rho22).ln())
}
