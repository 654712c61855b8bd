//! Scalar building blocks: Bose–Einstein occupation and the complex axial
//! wavevectors of a plane wave with transverse wavenumber `k`.
//!
//! The axial wavevectors are evaluated from the explicit real formulas for
//! their squared real and imaginary parts rather than a generic complex square
//! root, so both components are always non-negative and a lossless medium
//! yields a purely real or purely imaginary value with the other component
//! exactly zero.
//!
//! Internally everything is dimensionless: `x = c k / omega` for wavenumbers
//! and `zeta = omega z / c` for lengths.

use num_complex::Complex64;

use crate::constants::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::error::{finite, non_negative, positive, Error, Result};

/// Angular frequency in rad/s, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(omega: f64) -> Result<Self> {
        positive("omega", omega).map(Self)
    }

    /// Frequency whose reduced wavelength `c / omega` equals `lambda0`.
    pub fn from_reduced_wavelength(lambda0: f64) -> Result<Self> {
        positive("lambda0", lambda0)?;
        Self::new(SPEED_OF_LIGHT / lambda0)
    }

    pub fn omega(self) -> f64 {
        self.0
    }

    /// Vacuum wavenumber `omega / c`, 1/m.
    pub fn wavenumber(self) -> f64 {
        self.0 / SPEED_OF_LIGHT
    }

    /// `c / omega`, m. This is the length unit of every dimensionless quantity.
    pub fn reduced_wavelength(self) -> f64 {
        SPEED_OF_LIGHT / self.0
    }
}

/// Relative permittivity of a passive dielectric at the working frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Permittivity {
    re: f64,
    im: f64,
}

impl Permittivity {
    pub const VACUUM: Permittivity = Permittivity { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        finite("eps.re", re)?;
        finite("eps.im", im)?;
        if re < 1.0 {
            return Err(Error::InvalidInput {
                name: "eps.re",
                value: re,
                reason: "must be >= 1",
            });
        }
        non_negative("eps.im", im)?;
        Ok(Self { re, im })
    }

    pub fn re(self) -> f64 {
        self.re
    }

    pub fn im(self) -> f64 {
        self.im
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_vacuum(self) -> bool {
        self.re == 1.0 && self.im == 0.0
    }

    pub fn is_lossless(self) -> bool {
        self.im == 0.0
    }
}

/// Transverse wavenumber together with the axial wavenumbers in vacuum and
/// in the medium, all in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialWavevectors {
    pub k: f64,
    pub b0: Complex64,
    pub b1: Complex64,
}

/// Environment temperature `T0` and slab temperature `T1`, in kelvin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPair {
    t_env: f64,
    t_slab: f64,
}

impl ThermalPair {
    pub fn new(t_env: f64, t_slab: f64) -> Result<Self> {
        Ok(Self {
            t_env: non_negative("t_env", t_env)?,
            t_slab: non_negative("t_slab", t_slab)?,
        })
    }

    pub fn t_env(self) -> f64 {
        self.t_env
    }

    pub fn t_slab(self) -> f64 {
        self.t_slab
    }

    /// `hbar c / (k_B T0)` in meters; infinite at zero temperature.
    pub fn beta_env(self) -> f64 {
        thermal_length(self.t_env)
    }

    /// `hbar c / (k_B T1)` in meters; infinite at zero temperature.
    pub fn beta_slab(self) -> f64 {
        thermal_length(self.t_slab)
    }

    pub fn is_equilibrium(self) -> bool {
        self.t_env == self.t_slab
    }
}

fn thermal_length(temperature: f64) -> f64 {
    HBAR * SPEED_OF_LIGHT / (BOLTZMANN * temperature)
}

/// Mean photon number `1 / (exp(hbar omega / k_B T) - 1)`; exactly zero at `T = 0`.
pub fn bose_occupation(omega: Frequency, temperature: f64) -> Result<f64> {
    non_negative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(bose_from_ratio(
        HBAR * omega.omega() / (BOLTZMANN * temperature),
    ))
}

/// Occupation for a given `hbar omega / k_B T`.
pub(crate) fn bose_from_ratio(ratio: f64) -> f64 {
    1.0 / ratio.exp_m1()
}

/// Square root of `w + i im` (with `im >= 0`) on the branch `Re >= 0, Im >= 0`.
///
/// Uses `Re^2 = (w + h)/2`, `Im^2 = (-w + h)/2`, `h = |w + i im|`, evaluating
/// whichever component does not cancel and recovering the other from
/// `2 Re Im = im`.
pub(crate) fn branch_sqrt(w: f64, im: f64) -> Complex64 {
    debug_assert!(im >= 0.0);
    let h = w.hypot(im);
    if w >= 0.0 {
        let re = (0.5 * (w + h)).sqrt();
        let imag = if re > 0.0 { im / (2.0 * re) } else { 0.0 };
        Complex64::new(re, imag)
    } else {
        let imag = (0.5 * (h - w)).sqrt();
        Complex64::new(im / (2.0 * imag), imag)
    }
}

/// Dimensionless vacuum axial wavenumber `sqrt(1 - x^2)` for `x = c k / omega >= 0`.
pub(crate) fn vacuum_axial_hat(x: f64) -> Complex64 {
    // (1 - x)(1 + x) keeps full precision near the branch point.
    branch_sqrt((1.0 - x) * (1.0 + x), 0.0)
}

/// Dimensionless medium axial wavenumber `sqrt(eps - x^2)` from the real
/// detuning `w = Re eps - x^2`.
pub(crate) fn medium_axial_hat(w: f64, eps: Permittivity) -> Complex64 {
    branch_sqrt(w, eps.im)
}

fn transverse_ratio(k: f64, omega: Frequency) -> Result<f64> {
    non_negative("k", k)?;
    Ok(k / omega.wavenumber())
}

/// Vacuum axial wavenumber `b0 = sqrt(omega^2/c^2 - k^2)`, 1/m: real for
/// `k <= omega/c`, positive imaginary beyond.
pub fn axial_vacuum(k: f64, omega: Frequency) -> Result<Complex64> {
    let x = transverse_ratio(k, omega)?;
    Ok(vacuum_axial_hat(x) * omega.wavenumber())
}

/// Medium axial wavenumber `b1 = sqrt(eps omega^2/c^2 - k^2)`, 1/m, with
/// `Re b1 >= 0` and `Im b1 >= 0`.
pub fn axial_medium(k: f64, omega: Frequency, eps: Permittivity) -> Result<Complex64> {
    let x = transverse_ratio(k, omega)?;
    Ok(medium_axial_hat(eps.re - x * x, eps) * omega.wavenumber())
}

pub fn axial_wavevectors(k: f64, omega: Frequency, eps: Permittivity) -> Result<AxialWavevectors> {
    Ok(AxialWavevectors {
        k,
        b0: axial_vacuum(k, omega)?,
        b1: axial_medium(k, omega, eps)?,
    })
}

/// Smallest `Im b1` over the evanescent range `k >= omega/c`, reached at
/// `k = omega/c`, in 1/m.
pub fn min_im_b1(omega: Frequency, eps: Permittivity) -> f64 {
    min_im_b1_hat(eps) * omega.wavenumber()
}

pub(crate) fn min_im_b1_hat(eps: Permittivity) -> f64 {
    medium_axial_hat(eps.re - 1.0, eps).im
}
