//! Effective photon occupation, rates and temperature of a two-level atom
//! above a slab held at `T1` inside an environment at `T0`.

use std::f64::consts::PI;

use crate::constants::{BOLTZMANN, EPSILON_0, HBAR, MU_0, SPEED_OF_LIGHT};
use crate::error::{non_negative, positive, Error, Result};
use crate::layered::{alpha_hat, g_hat, SlabGeometry, Thickness};
use crate::math::{bose_occupation, min_im_b1_hat, Frequency, Permittivity, ThermalPair};
use crate::quadrature::{QuadratureResult, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec {
    omega0: Frequency,
    dipole_sq: f64,
}

impl AtomSpec {
    /// `dipole_sq` is `|d12|^2` in C^2 m^2.
    pub fn new(omega0: Frequency, dipole_sq: f64) -> Result<Self> {
        Ok(Self {
            omega0,
            dipole_sq: positive("dipole_sq", dipole_sq)?,
        })
    }

    /// From the reduced transition wavelength `c / omega0`.
    pub fn from_lambda0(lambda0: f64, dipole_sq: f64) -> Result<Self> {
        Self::new(Frequency::from_reduced_wavelength(lambda0)?, dipole_sq)
    }

    /// From the free-space spontaneous emission rate instead of the dipole.
    pub fn from_gamma0(omega0: Frequency, gamma0: f64) -> Result<Self> {
        positive("gamma0", gamma0)?;
        let w = omega0.omega();
        let dipole_sq = gamma0 * 3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3) / w.powi(3);
        Self::new(omega0, dipole_sq)
    }

    pub fn omega0(&self) -> Frequency {
        self.omega0
    }

    pub fn dipole_sq(&self) -> f64 {
        self.dipole_sq
    }

    pub fn lambda0(&self) -> f64 {
        self.omega0.reduced_wavelength()
    }

    /// `omega0^3 |d12|^2 / (3 pi eps0 hbar c^3)`, 1/s.
    pub fn gamma0(&self) -> f64 {
        let w = self.omega0.omega();
        w.powi(3) * self.dipole_sq / (3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3))
    }
}

/// Everything computed at one parameter point.
///
/// `alpha` and the rates are `None` for a lossless finite slab, whose guided
/// modes make the decay-rate factor ill-defined; `n_eff` and `t_eff` are
/// still exact there because the slab term vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBundle {
    pub alpha: Option<f64>,
    /// `g(z_A, z_A, omega0)` in units of `mu0 omega0^2` per meter.
    pub g: f64,
    /// Dimensionless `g c / (mu0 omega0^3)`.
    pub g_hat: f64,
    /// Weight of the slab occupation in `n_eff`, `2 pi^2 g_hat / alpha`.
    pub slab_weight: f64,
    pub n_env: f64,
    pub n_slab: f64,
    pub n_eff: f64,
    pub gamma0: f64,
    pub gamma_down: Option<f64>,
    pub gamma_up: Option<f64>,
    pub t_eff: f64,
    pub g_quadrature: QuadratureResult,
    pub alpha_quadrature: Option<QuadratureResult>,
}

fn g_hat_coincident(
    geom: &SlabGeometry,
    omega: Frequency,
    eps: Permittivity,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let lambda = omega.reduced_wavelength();
    let d_hat = match geom.thickness() {
        Thickness::Finite(d) => {
            if d == 0.0 || eps.is_lossless() {
                return Ok(QuadratureResult::ZERO);
            }
            Some(d / lambda)
        }
        Thickness::HalfSpace => {
            if eps.is_vacuum() {
                return Ok(QuadratureResult::ZERO);
            }
            None
        }
    };
    g_hat(geom.atom_height() / lambda, eps, d_hat, spec)?.require("g")
}

fn g_unit(omega: Frequency) -> f64 {
    MU_0 * omega.omega().powi(3) / SPEED_OF_LIGHT
}

/// Slab-absorption integral at the atom position, in `mu0 omega^2` per meter.
/// Zero exactly for a lossless finite slab, zero thickness, or vacuum.
pub fn g_coincident(
    geom: &SlabGeometry,
    omega: Frequency,
    eps: Permittivity,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    Ok(g_hat_coincident(geom, omega, eps, spec)?.scaled(g_unit(omega)))
}

/// Half-space limit of [`g_coincident`].
pub fn g_halfspace(
    z: f64,
    omega: Frequency,
    eps: Permittivity,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    g_coincident(&SlabGeometry::new(Thickness::HalfSpace, z)?, omega, eps, spec)
}

/// `(gamma_down, gamma_up) = alpha gamma0 (1 + n, n)`.
pub fn transition_rates(atom: &AtomSpec, n_eff: f64, alpha: f64) -> Result<(f64, f64)> {
    non_negative("n_eff", n_eff)?;
    positive("alpha", alpha)?;
    let base = alpha * atom.gamma0();
    Ok((base * (1.0 + n_eff), base * n_eff))
}

/// Temperature whose Bose occupation at `omega0` is `n_eff`; zero for `n_eff = 0`.
pub fn effective_temperature(atom: &AtomSpec, n_eff: f64) -> Result<f64> {
    non_negative("n_eff", n_eff)?;
    if n_eff == 0.0 {
        return Ok(0.0);
    }
    Ok(HBAR * atom.omega0().omega() / (BOLTZMANN * (1.0 / n_eff).ln_1p()))
}

/// Full pipeline at one point: `g`, `alpha`, `n_eff`, rates and `t_eff`.
pub fn effective_occupation(
    atom: &AtomSpec,
    geom: &SlabGeometry,
    eps: Permittivity,
    baths: ThermalPair,
    spec: &QuadratureSpec,
) -> Result<RateBundle> {
    spec.validate()?;
    let omega = atom.omega0();
    let lambda = omega.reduced_wavelength();
    let n_env = bose_occupation(omega, baths.t_env())?;
    let n_slab = bose_occupation(omega, baths.t_slab())?;

    let g_quadrature = g_hat_coincident(geom, omega, eps, spec)?;
    let g_hat = g_quadrature.value;

    let d_hat = match geom.thickness() {
        Thickness::Finite(d) => Some(d / lambda),
        Thickness::HalfSpace => None,
    };
    let alpha_quadrature = match alpha_hat(geom.atom_height() / lambda, eps, d_hat, spec) {
        Ok(q) => Some(q.require("alpha")?),
        Err(Error::LosslessSlab) => None,
        Err(e) => return Err(e),
    };
    let alpha = alpha_quadrature.map(|q| q.value);

    let slab_weight = if g_hat == 0.0 {
        0.0
    } else {
        match alpha {
            Some(a) if a > 0.0 => 2.0 * PI * PI * g_hat / a,
            Some(a) => {
                return Err(Error::InvalidInput {
                    name: "alpha",
                    value: a,
                    reason: "decay-rate factor must be positive",
                })
            }
            None => unreachable!("g vanishes whenever alpha is undefined"),
        }
    };

    let correction = slab_weight * (n_slab - n_env);
    let n_eff = n_env + correction;
    let (low, high) = (n_env.min(n_slab), n_env.max(n_slab));
    let slack = 1e-12 * high;
    if !(n_eff >= low - slack && n_eff <= high + slack) {
        return Err(Error::SandwichViolation { n_eff, low, high });
    }

    let t_eff = if correction == 0.0 {
        baths.t_env()
    } else {
        let t = effective_temperature(atom, n_eff)?;
        let (t_low, t_high) = (
            baths.t_env().min(baths.t_slab()),
            baths.t_env().max(baths.t_slab()),
        );
        // inverting the Bose function can step outside [t_low, t_high] by
        // round-off when n_eff sits on a bound; anything larger is a bug
        if t < t_low * (1.0 - 1e-12) || t > t_high * (1.0 + 1e-12) {
            return Err(Error::SandwichViolation { n_eff, low, high });
        }
        t.clamp(t_low, t_high)
    };

    let (gamma_down, gamma_up) = match alpha {
        Some(a) => {
            let (down, up) = transition_rates(atom, n_eff.max(0.0), a)?;
            (Some(down), Some(up))
        }
        None => (None, None),
    };

    Ok(RateBundle {
        alpha,
        g: g_hat * g_unit(omega),
        g_hat,
        slab_weight,
        n_env,
        n_slab,
        n_eff,
        gamma0: atom.gamma0(),
        gamma_down,
        gamma_up,
        t_eff,
        g_quadrature,
        alpha_quadrature,
    })
}

/// Thickness criterion for a finite slab to act as a half-space.
///
/// `lhs_exact = 2 d min(Im b1)` over the evanescent range; the small-loss form
/// is its leading term `Im eps / sqrt(Re eps - 1) * d / lambda0`. Each is
/// computed as `d / d_min`, so `d = d_min` gives exactly 1 and, the
/// inequality being strict, is not satisfied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessCriterion {
    pub lhs_exact: f64,
    pub lhs_smallloss: Option<f64>,
    pub satisfied_exact: bool,
    pub satisfied_smallloss: Option<bool>,
    /// Infinite for a lossless medium.
    pub d_min_exact: f64,
    pub d_min_smallloss: Option<f64>,
}

pub fn thickness_criterion(eps: Permittivity, d: f64, lambda0: f64) -> Result<ThicknessCriterion> {
    non_negative("thickness", d)?;
    positive("lambda0", lambda0)?;
    let d_min_exact = lambda0 * (0.5 / min_im_b1_hat(eps));
    let lhs_exact = d / d_min_exact;
    let d_min_smallloss = (eps.re() > 1.0).then(|| lambda0 * ((eps.re() - 1.0).sqrt() / eps.im()));
    let lhs_smallloss = d_min_smallloss.map(|m| d / m);
    Ok(ThicknessCriterion {
        lhs_exact,
        lhs_smallloss,
        satisfied_exact: lhs_exact > 1.0,
        satisfied_smallloss: lhs_smallloss.map(|l| l > 1.0),
        d_min_exact,
        d_min_smallloss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA0: f64 = 1.0e-6;

    fn atom() -> AtomSpec {
        AtomSpec::from_lambda0(LAMBDA0, 1.0e-58).unwrap()
    }

    fn eps(re: f64, im: f64) -> Permittivity {
        Permittivity::new(re, im).unwrap()
    }

    fn slab(d_lam: f64, z_lam: f64) -> SlabGeometry {
        SlabGeometry::new(Thickness::Finite(d_lam * LAMBDA0), z_lam * LAMBDA0).unwrap()
    }

    #[test]
    fn gamma0_round_trip() {
        let a = atom();
        let b = AtomSpec::from_gamma0(a.omega0(), a.gamma0()).unwrap();
        assert_relative_eq!(b.dipole_sq(), a.dipole_sq(), max_relative = 1e-14);
        assert_relative_eq!(a.lambda0(), LAMBDA0, max_relative = 1e-15);
        assert!(AtomSpec::from_lambda0(LAMBDA0, 0.0).is_err());
    }

    #[test]
    fn rates_structure() {
        let a = atom();
        let (down, up) = transition_rates(&a, 0.0, 1.3).unwrap();
        assert_eq!(up, 0.0);
        assert_relative_eq!(down, 1.3 * a.gamma0(), max_relative = 1e-15);
        let (down, up) = transition_rates(&a, 0.37, 0.8).unwrap();
        assert_relative_eq!(up / down, 0.37 / 1.37, max_relative = 1e-14);
        assert!(transition_rates(&a, 0.3, 0.0).is_err());
    }

    #[test]
    fn free_space_equilibrium_rate() {
        let a = atom();
        let n = bose_occupation(a.omega0(), 5000.0).unwrap();
        let (down, _) = transition_rates(&a, n, 1.0).unwrap();
        assert_relative_eq!(down, a.gamma0() * (1.0 + n), max_relative = 1e-15);
    }

    #[test]
    fn effective_temperature_examples() {
        let a = atom();
        assert_eq!(effective_temperature(&a, 0.0).unwrap(), 0.0);
        let t = effective_temperature(&a, 1.0).unwrap();
        assert_relative_eq!(
            t,
            HBAR * a.omega0().omega() / (BOLTZMANN * 2f64.ln()),
            max_relative = 1e-15
        );
        let n0 = bose_occupation(a.omega0(), 4321.0).unwrap();
        assert_relative_eq!(effective_temperature(&a, n0).unwrap(), 4321.0, max_relative = 1e-12);
    }

    #[test]
    fn lossless_finite_slab_gives_null_result() {
        let spec = QuadratureSpec::default();
        let g = g_coincident(&slab(2000.0, 0.7), atom().omega0(), eps(2.0, 0.0), &spec).unwrap();
        assert_eq!(g.value, 0.0);
        let baths = ThermalPair::new(300.0, 900.0).unwrap();
        let r = effective_occupation(&atom(), &slab(3.0, 0.7), eps(4.0, 0.0), baths, &spec).unwrap();
        assert_eq!(r.g, 0.0);
        assert_eq!(r.t_eff, 300.0);
        assert_eq!(r.n_eff, r.n_env);
        assert!(r.alpha.is_none() && r.gamma_down.is_none());
    }

    #[test]
    fn vacuum_and_zero_thickness_give_zero() {
        let spec = QuadratureSpec::default();
        let w = atom().omega0();
        assert_eq!(g_coincident(&slab(3.0, 1.0), w, Permittivity::VACUUM, &spec).unwrap().value, 0.0);
        assert_eq!(g_coincident(&slab(0.0, 1.0), w, eps(3.0, 1.0), &spec).unwrap().value, 0.0);
        assert_eq!(g_halfspace(LAMBDA0, w, Permittivity::VACUUM, &spec).unwrap().value, 0.0);
    }

    #[test]
    fn lossless_half_space_contributes() {
        let spec = QuadratureSpec::default();
        let g = g_halfspace(LAMBDA0, atom().omega0(), eps(2.0, 0.0), &spec).unwrap();
        assert!(g.value > 0.0);
    }

    #[test]
    fn half_space_golden_value() {
        let spec = QuadratureSpec::default();
        let w = atom().omega0();
        let g = g_halfspace(LAMBDA0, w, eps(2.0, 0.1), &spec).unwrap();
        let g_hat = g.value / g_unit(w);
        assert_relative_eq!(g_hat, 1.318_217_201_679_542_3e-2, max_relative = 1e-6);
    }

    #[test]
    fn half_space_decreasing_in_height() {
        let spec = QuadratureSpec::default();
        let w = atom().omega0();
        let mut last = f64::INFINITY;
        for z in [0.05, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0] {
            let g = g_halfspace(z * LAMBDA0, w, eps(3.0, 0.4), &spec).unwrap().value;
            assert!(g > 0.0 && g < last, "z = {z}");
            last = g;
        }
    }

    #[test]
    fn thick_slab_matches_half_space_within_envelope() {
        // |g(d) - g_half| / g_half <= exp(-lhs_exact) on a geometric grid of d
        let spec = QuadratureSpec::default();
        let w = atom().omega0();
        let e = eps(2.0, 0.1);
        let half = g_halfspace(LAMBDA0, w, e, &spec).unwrap().value;
        let crit = thickness_criterion(e, LAMBDA0, LAMBDA0).unwrap();
        for lhs in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let d = lhs * crit.d_min_exact;
            let geom = SlabGeometry::new(Thickness::Finite(d), LAMBDA0).unwrap();
            let g = g_coincident(&geom, w, e, &spec).unwrap().value;
            let dev = (g - half).abs() / half;
            assert!(dev <= (-lhs).exp(), "lhs = {lhs}: {dev:e}");
        }
    }

    #[test]
    fn equilibrium_identity() {
        let spec = QuadratureSpec::default();
        let baths = ThermalPair::new(300.0, 300.0).unwrap();
        let r = effective_occupation(&atom(), &slab(2.0, 0.5), eps(5.0, 1.5), baths, &spec).unwrap();
        assert_eq!(r.t_eff, 300.0);
        assert!(r.g > 0.0);
    }

    #[test]
    fn cold_environment_hot_slab() {
        let spec = QuadratureSpec::default();
        let baths = ThermalPair::new(0.0, 3000.0).unwrap();
        let geom = SlabGeometry::new(Thickness::HalfSpace, 0.3 * LAMBDA0).unwrap();
        let r = effective_occupation(&atom(), &geom, eps(4.0, 0.5), baths, &spec).unwrap();
        assert!(r.n_eff > 0.0 && r.n_eff < r.n_slab);
        assert!(r.t_eff > 0.0 && r.t_eff < 3000.0);
        let (down, up) = (r.gamma_down.unwrap(), r.gamma_up.unwrap());
        assert!(down >= up && up > 0.0);
        assert_relative_eq!(down / up, (1.0 + r.n_eff) / r.n_eff, max_relative = 1e-12);
    }

    #[test]
    fn criterion_examples() {
        let e = eps(2.0, 0.1);
        let c = thickness_criterion(e, 20.0 * LAMBDA0, LAMBDA0).unwrap();
        assert_relative_eq!(c.lhs_smallloss.unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(c.satisfied_smallloss, Some(true));
        assert_eq!(c.d_min_smallloss, Some(10.0 * LAMBDA0));
        let c = thickness_criterion(e, 10.0 * LAMBDA0, LAMBDA0).unwrap();
        assert_eq!(c.lhs_smallloss, Some(1.0));
        assert_eq!(c.satisfied_smallloss, Some(false));

        let c = thickness_criterion(eps(3.0, 0.0), 1.0, LAMBDA0).unwrap();
        assert_eq!(c.lhs_exact, 0.0);
        assert!(!c.satisfied_exact);
        assert_eq!(c.satisfied_smallloss, Some(false));

        let c = thickness_criterion(eps(1.0, 0.5), LAMBDA0, LAMBDA0).unwrap();
        assert!(c.lhs_smallloss.is_none() && c.d_min_smallloss.is_none());
        assert!(c.lhs_exact > 0.0);
    }

    #[test]
    fn criterion_forms_agree_at_small_loss() {
        for re in [1.5, 2.0, 6.0] {
            let c = thickness_criterion(eps(re, 1e-3), 37.0 * LAMBDA0, LAMBDA0).unwrap();
            let ratio = c.lhs_smallloss.unwrap() / c.lhs_exact;
            assert!((ratio - 1.0).abs() <= 1e-5, "re = {re}: {ratio}");
        }
    }

    #[test]
    fn criterion_matches_closed_form() {
        let (re, im) = (3.7, 0.9);
        let c = thickness_criterion(eps(re, im), 4.2 * LAMBDA0, LAMBDA0).unwrap();
        let expected = 2f64.sqrt() * 4.2 * (-(re - 1.0) + im.hypot(re - 1.0)).sqrt();
        assert_relative_eq!(c.lhs_exact, expected, max_relative = 1e-14);
    }
}
