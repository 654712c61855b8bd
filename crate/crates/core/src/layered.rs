//! Electromagnetic kernel for a dielectric slab of thickness `d` in vacuum,
//! its right face at `z = 0`, and an atom at height `z_A > 0`.
//!
//! Sign convention: `r_s`, `r_p` in [`FresnelSet`] are the single-interface
//! coefficients seen from inside the dielectric, `(b1 - b0)/(b1 + b0)` and
//! `(b1 - eps b0)/(b1 + eps b0)`. The coefficient seen from the vacuum side,
//! used by [`slab_reflection`] and the decay-rate factor, is their negative.
//!
//! The absorption integrand `g` lives only on the evanescent range
//! `k > omega/c`. There it is integrated in `u = sqrt(x^2 - 1)`
//! (`x = c k / omega`), so that `x dx / |b0|^2 = du / u` and
//! `exp(-2 Im b0 z) = exp(-2 u zeta)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::MU_0;
use crate::error::{non_negative, positive, Error, Result};
use crate::math::{branch_sqrt, medium_axial_hat, vacuum_axial_hat, Frequency, Permittivity};
use crate::quadrature::{
    integrate_evanescent_with_breaks, integrate_panels, QuadratureResult, QuadratureSpec,
};

/// Slab thickness; the half-space is a separate variant rather than a magic number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thickness {
    Finite(f64),
    HalfSpace,
}

impl Thickness {
    pub fn finite(d: f64) -> Result<Self> {
        non_negative("thickness", d).map(Self::Finite)
    }

    fn scaled(self, length_unit: f64) -> Option<f64> {
        match self {
            Thickness::Finite(d) => Some(d / length_unit),
            Thickness::HalfSpace => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabGeometry {
    thickness: Thickness,
    atom_height: f64,
}

impl SlabGeometry {
    pub fn new(thickness: Thickness, atom_height: f64) -> Result<Self> {
        if let Thickness::Finite(d) = thickness {
            non_negative("thickness", d)?;
        }
        positive("atom_height", atom_height)?;
        Ok(Self {
            thickness,
            atom_height,
        })
    }

    pub fn thickness(&self) -> Thickness {
        self.thickness
    }

    pub fn atom_height(&self) -> f64 {
        self.atom_height
    }
}

/// Single-interface coefficients and slab denominators at one transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelSet {
    pub r_s: Complex64,
    pub r_p: Complex64,
    pub t_s: Complex64,
    pub t_p: Complex64,
    pub d_s: Complex64,
    pub d_p: Complex64,
}

/// Polarization weights of the absorption integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandWeights {
    pub a_plus: f64,
    pub a_minus: f64,
    pub a_s: f64,
}

/// Vacuum-side reflection of the whole slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabReflection {
    pub s: Complex64,
    pub p: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizationSplit {
    pub s: f64,
    pub p: f64,
}

impl PolarizationSplit {
    pub fn total(self) -> f64 {
        self.s + self.p
    }
}

// ---------------------------------------------------------------------------
// dimensionless kernel (lengths in c/omega)

/// `exp(2 i b1 d)`, written so that infinite `d` or overflow cannot produce NaN.
fn round_trip(b1: Complex64, d_hat: f64) -> Complex64 {
    if d_hat == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let magnitude = attenuation(b1, d_hat);
    if magnitude == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(magnitude, 2.0 * b1.re * d_hat)
    }
}

/// `exp(-2 Im b1 d)`.
fn attenuation(b1: Complex64, d_hat: f64) -> f64 {
    if b1.im == 0.0 || d_hat == 0.0 {
        1.0
    } else {
        (-2.0 * b1.im * d_hat).exp()
    }
}

/// `c * a`, exactly zero whenever `c` is zero (even if `a` is infinite or NaN).
fn weighted(c: f64, a: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * a
    }
}

fn ratio(num: Complex64, den: Complex64, x: f64) -> Result<Complex64> {
    if den == Complex64::new(0.0, 0.0) {
        Err(Error::DegenerateInterface { x })
    } else {
        Ok(num / den)
    }
}

fn fresnel_hat(
    x: f64,
    b0: Complex64,
    b1: Complex64,
    eps: Permittivity,
    d_hat: Option<f64>,
) -> Result<FresnelSet> {
    let one = Complex64::new(1.0, 0.0);
    if eps.is_vacuum() {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(FresnelSet {
            r_s: zero,
            r_p: zero,
            t_s: one,
            t_p: one,
            d_s: one,
            d_p: one,
        });
    }
    let e = eps.as_complex();
    let r_s = ratio(b1 - b0, b1 + b0, x)?;
    let r_p = ratio(b1 - e * b0, b1 + e * b0, x)?;
    let inv_sqrt_eps = e.sqrt().inv();
    let (d_s, d_p) = match d_hat {
        Some(d) => {
            let phase = round_trip(b1, d);
            (one - r_s * r_s * phase, one - r_p * r_p * phase)
        }
        None => (one, one),
    };
    Ok(FresnelSet {
        r_s,
        r_p,
        t_s: inv_sqrt_eps * (one - r_s),
        t_p: inv_sqrt_eps * (one - r_p),
        d_s,
        d_p,
    })
}

fn slab_reflection_hat(
    x: f64,
    b0: Complex64,
    b1: Complex64,
    eps: Permittivity,
    d_hat: Option<f64>,
) -> Result<SlabReflection> {
    let zero = Complex64::new(0.0, 0.0);
    if eps.is_vacuum() || d_hat == Some(0.0) {
        return Ok(SlabReflection { s: zero, p: zero });
    }
    let e = eps.as_complex();
    let rs = ratio(b0 - b1, b0 + b1, x)?;
    let rp = ratio(e * b0 - b1, e * b0 + b1, x)?;
    let Some(d) = d_hat else {
        return Ok(SlabReflection { s: rs, p: rp });
    };
    let phase = round_trip(b1, d);
    let airy = |r: Complex64| {
        let den = 1.0 - r * r * phase;
        if den == zero || !den.is_finite() {
            Err(Error::GuidedModePole { x })
        } else {
            Ok(r * (1.0 - phase) / den)
        }
    };
    Ok(SlabReflection {
        s: airy(rs)?,
        p: airy(rp)?,
    })
}

/// Absorption integrand on the evanescent range in the `u` variable, without
/// the `exp(-2 u zeta)` weight and in units of `mu0 omega^3 / c`.
///
/// The `|t|^2 / |b0|^2` ratios are taken in closed form so the integrand is
/// regular at `u -> 0`.
fn g_integrand_u(u: f64, eps: Permittivity, d_hat: Option<f64>) -> PolarizationSplit {
    if eps.is_vacuum() || d_hat == Some(0.0) {
        return PolarizationSplit::default();
    }
    let x2 = 1.0 + u * u;
    let b0 = Complex64::new(0.0, u);
    let b1 = medium_axial_hat(eps.re() - 1.0 - u * u, eps);
    let e = eps.as_complex();
    let eps_abs = e.norm();

    let r_s = (b1 - b0) / (b1 + b0);
    let r_p = (b1 - e * b0) / (b1 + e * b0);
    let ts_over_b0 = 4.0 / (eps_abs * (b1 + b0).norm_sqr());
    let tp_over_b0 = 4.0 * eps_abs / (b1 + e * b0).norm_sqr();

    let one = Complex64::new(1.0, 0.0);
    let phase = d_hat.map(|d| round_trip(b1, d));
    let denominator = |r: Complex64| phase.map_or(1.0, |ph| (one - r * r * ph).norm_sqr());

    let b1_abs2 = b1.norm_sqr();
    let geometry = (x2 + u * u) / eps_abs;
    let tp_d = tp_over_b0 / denominator(r_p);
    let a_plus = tp_d * (x2 + b1_abs2) * geometry;
    let a_minus = tp_d * (x2 - b1_abs2) * geometry;
    let a_s = ts_over_b0 / denominator(r_s);

    let bracket = |a_plus: f64, a_minus: f64, r: Complex64| -> f64 {
        let Some(d) = d_hat else {
            return weighted(b1.re, a_plus);
        };
        let att = attenuation(b1, d);
        let absorbed = -(-2.0 * b1.im * d).exp_m1();
        let one_pass = if b1.im == 0.0 { 0.0 } else { absorbed };
        let mut total = weighted(b1.re * one_pass, a_plus);
        if att != 0.0 {
            let theta = 2.0 * b1.re * d;
            let interference = weighted(b1.re * r.norm_sqr() * one_pass, a_plus)
                + weighted(2.0 * b1.im * r.re * theta.sin(), a_minus)
                + weighted(2.0 * b1.im * r.im * (theta.cos() - 1.0), a_minus);
            total += att * interference;
        }
        total
    };

    let scale = u / (8.0 * PI * PI);
    PolarizationSplit {
        s: scale * bracket(a_s, a_s, r_s),
        p: scale * bracket(a_plus, a_minus, r_p),
    }
}

/// Breakpoints in `u` for the evanescent integrals: the medium light line
/// `u_c = sqrt(Re eps - 1)` plus a partition of `[0, u_c]` fine enough to
/// resolve the slab's Fabry–Perot / guided-mode structure.
fn evanescent_breaks(eps: Permittivity, d_hat: Option<f64>, max_panels: usize) -> Vec<f64> {
    let uc = (eps.re() - 1.0).max(0.0).sqrt();
    if uc == 0.0 {
        return Vec::new();
    }
    let oscillations = d_hat.map_or(0.0, |d| 2.0 * d * uc / PI);
    let n = ((oscillations.ceil() as usize) + 4).min(max_panels / 4).max(1);
    let mut breaks: Vec<f64> = (1..n)
        .map(|i| uc * (0.5 * PI * i as f64 / n as f64).sin())
        .collect();
    breaks.push(uc);
    breaks.push(2.0 * uc + 1.0);
    breaks
}

/// Dimensionless coincident-point absorption integral `g c / (mu0 omega^3)`.
pub(crate) fn g_hat(
    zeta: f64,
    eps: Permittivity,
    d_hat: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let breaks = evanescent_breaks(eps, d_hat, spec.max_subdivisions);
    integrate_evanescent_with_breaks(
        |u| g_integrand_u(u, eps, d_hat).total(),
        zeta,
        &breaks,
        spec,
    )
}

/// Scattering part of the isotropic decay-rate factor, split into the
/// propagating range (variable `v = b0 = sqrt(1 - x^2)`) and the evanescent
/// range (variable `u`).
pub(crate) fn alpha_hat(
    zeta: f64,
    eps: Permittivity,
    d_hat: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    if eps.is_vacuum() || d_hat == Some(0.0) {
        return Ok(QuadratureResult {
            value: 1.0,
            ..QuadratureResult::ZERO
        });
    }
    if eps.is_lossless() && d_hat.is_some() {
        return Err(Error::LosslessSlab);
    }
    // alpha is O(1); an absolute floor keeps a near-cancelling part from
    // demanding relative accuracy on round-off.
    let spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(1e-2 * spec.rel_tol),
        ..*spec
    };

    let re = eps.re();
    let propagating = |v: f64| -> f64 {
        let b0 = Complex64::new(v, 0.0);
        let b1 = branch_sqrt(re - 1.0 + v * v, eps.im());
        let x = (1.0 - v * v).max(0.0).sqrt();
        match slab_reflection_hat(x, b0, b1, eps, d_hat) {
            Ok(r) => {
                let field = r.s + (1.0 - 2.0 * v * v) * r.p;
                0.5 * (Complex64::new(0.0, 2.0 * zeta * v).exp() * field).re
            }
            Err(_) => f64::NAN,
        }
    };
    let span = 2.0 * zeta + 2.0 * d_hat.unwrap_or(0.0) * re.sqrt();
    let n = ((span / PI).ceil() as usize + 4).min(spec.max_subdivisions / 4).max(1);
    let points: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let prop = integrate_panels(propagating, &points, &spec);

    let evanescent = |u: f64| -> f64 {
        let b0 = Complex64::new(0.0, u);
        let b1 = medium_axial_hat(re - 1.0 - u * u, eps);
        match slab_reflection_hat((1.0 + u * u).sqrt(), b0, b1, eps, d_hat) {
            Ok(r) => 0.5 * (r.s.im + (2.0 * u * u + 1.0) * r.p.im),
            Err(_) => f64::NAN,
        }
    };
    let breaks = evanescent_breaks(eps, d_hat, spec.max_subdivisions);
    let evan = integrate_evanescent_with_breaks(evanescent, zeta, &breaks, &spec)?;

    let mut total = prop.combine(evan);
    if !total.value.is_finite() {
        total.converged = false;
    }
    total.value += 1.0;
    Ok(total)
}

// ---------------------------------------------------------------------------
// SI entry points

fn check_k(k: f64) -> Result<f64> {
    non_negative("k", k)
}

fn evanescent_u(k: f64, omega: Frequency) -> Result<(f64, f64)> {
    check_k(k)?;
    let x = k / omega.wavenumber();
    if x <= 1.0 {
        return Err(Error::InvalidInput {
            name: "k",
            value: k,
            reason: "absorption integrand is defined only for k > omega/c",
        });
    }
    Ok((x, ((x - 1.0) * (x + 1.0)).sqrt()))
}

/// Fresnel coefficients, transmission coefficients `t = sqrt(1/eps) (1 - r)`
/// and slab denominators `D = 1 - r^2 exp(2 i b1 d)` (`D = 1` for a half-space).
pub fn fresnel(k: f64, omega: Frequency, eps: Permittivity, thickness: Thickness) -> Result<FresnelSet> {
    check_k(k)?;
    let x = k / omega.wavenumber();
    let b0 = vacuum_axial_hat(x);
    let b1 = medium_axial_hat(eps.re() - x * x, eps);
    fresnel_hat(x, b0, b1, eps, thickness.scaled(omega.reduced_wavelength()))
}

/// Vacuum-side reflection of a slab of thickness `d` (Airy sum).
pub fn slab_reflection(k: f64, omega: Frequency, eps: Permittivity, d: f64) -> Result<SlabReflection> {
    check_k(k)?;
    non_negative("thickness", d)?;
    let x = k / omega.wavenumber();
    let b0 = vacuum_axial_hat(x);
    let b1 = medium_axial_hat(eps.re() - x * x, eps);
    slab_reflection_hat(x, b0, b1, eps, Some(d / omega.reduced_wavelength()))
}

pub fn integrand_weights(
    k: f64,
    omega: Frequency,
    eps: Permittivity,
    thickness: Thickness,
) -> Result<IntegrandWeights> {
    let set = fresnel(k, omega, eps, thickness)?;
    let x = k / omega.wavenumber();
    let b0 = vacuum_axial_hat(x);
    let b1 = medium_axial_hat(eps.re() - x * x, eps);
    let eps_abs = eps.as_complex().norm();
    let tp = (set.t_p / set.d_p).norm_sqr();
    let geometry = (x * x + b0.norm_sqr()) / eps_abs;
    Ok(IntegrandWeights {
        a_plus: tp * (x * x + b1.norm_sqr()) * geometry,
        a_minus: tp * (x * x - b1.norm_sqr()) * geometry,
        a_s: (set.t_s / set.d_s).norm_sqr(),
    })
}

/// Absorption integrand with respect to `k` (SI, units of `mu0 omega^2` per
/// unit `k` per meter), split by polarization.
pub fn g_integrand_by_polarization(
    k: f64,
    omega: Frequency,
    eps: Permittivity,
    thickness: Thickness,
    z: f64,
) -> Result<PolarizationSplit> {
    positive("z", z)?;
    if let Thickness::Finite(d) = thickness {
        non_negative("thickness", d)?;
    }
    let (x, u) = evanescent_u(k, omega)?;
    let lambda = omega.reduced_wavelength();
    let split = g_integrand_u(u, eps, thickness.scaled(lambda));
    let w = omega.omega();
    let factor = MU_0 * w * w * x * (-2.0 * u * z / lambda).exp() / u;
    Ok(PolarizationSplit {
        s: factor * split.s,
        p: factor * split.p,
    })
}

/// Finite-slab absorption integrand at transverse wavenumber `k > omega/c`.
pub fn g_slab_integrand(k: f64, omega: Frequency, eps: Permittivity, d: f64, z: f64) -> Result<f64> {
    g_integrand_by_polarization(k, omega, eps, Thickness::finite(d)?, z).map(PolarizationSplit::total)
}

/// Half-space absorption integrand at transverse wavenumber `k > omega/c`.
pub fn g_halfspace_integrand(k: f64, omega: Frequency, eps: Permittivity, z: f64) -> Result<f64> {
    g_integrand_by_polarization(k, omega, eps, Thickness::HalfSpace, z).map(PolarizationSplit::total)
}

/// Isotropic decay-rate factor: total over free-space spontaneous emission
/// rate for an atom at height `z`.
pub fn scattering_alpha(
    z: f64,
    omega: Frequency,
    eps: Permittivity,
    thickness: Thickness,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    positive("z", z)?;
    if let Thickness::Finite(d) = thickness {
        non_negative("thickness", d)?;
    }
    let lambda = omega.reduced_wavelength();
    alpha_hat(z / lambda, eps, thickness.scaled(lambda), spec)?.require("alpha")
}
