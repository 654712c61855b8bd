//! Adaptive quadrature against brute-force fixed grids and closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabtherm::layered::g_halfspace_integrand;
use slabtherm::quadrature::{integrate_evanescent, integrate_finite, Endpoint};
use slabtherm::{
    g_halfspace, scattering_alpha, Frequency, Permittivity, QuadratureSpec, Thickness,
};

const LAMBDA0: f64 = 2.0e-7;

/// (Re eps, Im eps, d / lambda0 or half-space, z / lambda0, g_hat half-space, alpha),
/// from the 2M-node trapezoid oracle in `oracle/trapezoid_oracle.py`.
const GOLDEN: [(f64, f64, Option<f64>, f64, f64, f64); 10] = [
    (2.0, 0.1, Some(5.0), 1.0, 1.318_217_201_679_542_3e-2, 1.079_081_813_122_055_2),
    (2.0, 0.1, None, 1.0, 1.318_217_201_679_542_3e-2, 1.087_486_865_577_821_2),
    (10.0, 1.0, None, 0.5, 3.470_273_512_812_447_5e-2, 1.495_349_952_121_765),
    (10.0, 5.0, Some(2.0), 0.3, 8.635_419_390_900_679_6e-2, 2.577_171_132_239_369),
    (4.0, 0.5, Some(1.0), 2.0, 5.554_112_716_501_141_3e-3, 1.109_449_146_982_419_3),
    (1.5, 0.2, Some(10.0), 0.2, 1.296_517_420_605_598_8e-1, 3.350_675_419_454_297),
    (12.0, 3.0, None, 5.0, 1.476_832_252_098_191_9e-3, 1.041_693_869_115_191_6),
    (3.0, 0.3, Some(0.5), 1.5, 8.563_604_326_740_574_5e-3, 1.031_409_040_840_994_6),
    (6.0, 2.0, Some(3.0), 0.1, 1.056_353_860_499_787_3, 21.873_870_364_755_444),
    (2.5, 1.0, None, 10.0, 2.867_014_140_631_449_3e-4, 0.987_112_828_189_640_9),
];

fn omega() -> Frequency {
    Frequency::from_reduced_wavelength(LAMBDA0).unwrap()
}

fn g_unit() -> f64 {
    let w = omega().omega();
    slabtherm::constants::MU_0 * w.powi(3) / slabtherm::constants::SPEED_OF_LIGHT
}

#[test]
fn golden_points() {
    let spec = QuadratureSpec::default();
    for (re, im, d, z, g_gold, a_gold) in GOLDEN {
        let eps = Permittivity::new(re, im).unwrap();
        let g = g_halfspace(z * LAMBDA0, omega(), eps, &spec).unwrap().value / g_unit();
        assert!(((g - g_gold) / g_gold).abs() <= 1e-6, "g at {re}+{im}i z={z}: {g:e} vs {g_gold:e}");
        let thickness = d.map_or(Thickness::HalfSpace, |d| Thickness::Finite(d * LAMBDA0));
        let a = scattering_alpha(z * LAMBDA0, omega(), eps, thickness, &spec).unwrap().value;
        assert!(((a - a_gold) / a_gold).abs() <= 1e-6, "alpha at {re}+{im}i d={d:?} z={z}: {a} vs {a_gold}");
    }
}

/// The half-space integrand written directly from the single-interface
/// Fresnel coefficients, in `x = cosh t`, integrated by a 10^6-point
/// midpoint rule.
#[test]
fn half_space_against_dense_fixed_grid() {
    let (re, im, zeta) = (2.0, 0.1, 1.0);
    let eps = Complex64::new(re, im);
    let integrand = |t: f64| -> f64 {
        let (x, u) = (t.cosh(), t.sinh());
        let b0 = Complex64::new(0.0, u);
        let mut b1 = (eps - x * x).sqrt();
        if b1.im < 0.0 {
            b1 = -b1;
        }
        let r_s = (b1 - b0) / (b1 + b0);
        let r_p = (b1 - eps * b0) / (b1 + eps * b0);
        let inv = 1.0 / eps.norm();
        let t_s2 = inv * (1.0 - r_s).norm_sqr();
        let t_p2 = inv * (1.0 - r_p).norm_sqr();
        let a_bar = t_s2;
        let a_bar_plus = t_p2 * (x * x + b1.norm_sqr()) * (x * x + u * u) / eps.norm();
        // x dx / |b0|^2 = x u dt / u^2
        x / u * (-2.0 * u * zeta).exp() * b1.re * (a_bar_plus + a_bar) / (8.0 * PI * PI)
    };
    let (n, upper) = (1_000_000, 5.0);
    let h = upper / n as f64;
    let oracle: f64 = (0..n).map(|i| integrand((i as f64 + 0.5) * h)).sum::<f64>() * h;

    let spec = QuadratureSpec::default();
    let eps_p = Permittivity::new(re, im).unwrap();
    let got = g_halfspace(zeta * LAMBDA0, omega(), eps_p, &spec).unwrap().value / g_unit();
    assert!(((got - oracle) / oracle).abs() <= 1e-6, "{got:e} vs {oracle:e}");

    // pointwise: the public SI integrand agrees with the formula above
    let w = omega();
    for t in [0.01, 0.3, 1.0, 2.0] {
        let (x, u) = (f64::cosh(t), f64::sinh(t));
        let si = g_halfspace_integrand(x * w.wavenumber(), w, eps_p, zeta * LAMBDA0).unwrap();
        let per_x = si * w.wavenumber() / g_unit();
        let expected = integrand(t) / u;
        assert!(((per_x - expected) / expected).abs() <= 1e-12, "t = {t}");
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn evanescent_families_match_fixed_grid() {
    let spec = QuadratureSpec::default();
    let omega = omega();
    let k0 = omega.wavenumber();
    let cases: Vec<(String, Box<dyn Fn(f64) -> f64>, f64)> = vec![
        ("u^3".into(), Box::new(|u: f64| u.powi(3)), 0.7),
        ("cos(9u)".into(), Box::new(|u: f64| (9.0 * u).cos()), 0.4),
        ("1/(1+u^2)".into(), Box::new(|u: f64| 1.0 / (1.0 + u * u)), 1.3),
        (
            "half-space 6+0.8i".into(),
            Box::new(move |u: f64| {
                if u == 0.0 {
                    return 0.0;
                }
                let x = (1.0 + u * u).sqrt();
                let eps = Permittivity::new(6.0, 0.8).unwrap();
                // strip the weight back off the SI integrand: per-u density
                let z = 1.0 / k0;
                g_halfspace_integrand(x * k0, omega, eps, z).unwrap() * u / x * (2.0 * u).exp()
            }),
            1.0,
        ),
    ];
    for (name, f, z) in &cases {
        let got = integrate_evanescent(f, *z, &spec).unwrap();
        assert!(got.converged, "{name}");
        let upper = 40.0 / z;
        let oracle = simpson(|u| f(u) * (-2.0 * z * u).exp(), 0.0, upper, 4_000_000);
        let scale = oracle.abs().max(1e-300);
        assert!(
            (got.value - oracle).abs() <= 10.0 * spec.rel_tol * scale,
            "{name}: {} vs {oracle}",
            got.value
        );
    }
}

/// Closed-form families with random parameters: the reported error estimate
/// must bound five times the true error in at least 99% of cases.
#[test]
fn error_estimates_are_honest() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut honest = 0;
    let total = 600;
    for i in 0..total {
        let rel_tol = 10f64.powf(rng.gen_range(-12.0..-5.0));
        let spec = QuadratureSpec::new(rel_tol, 1e-30, 2000).unwrap();
        let (got, exact) = match i % 4 {
            0 => {
                let n = rng.gen_range(0..6);
                let z: f64 = rng.gen_range(0.05..5.0);
                let exact = (1..=n).product::<i32>() as f64 / (2.0 * z).powi(n + 1);
                (integrate_evanescent(|u| u.powi(n), z, &spec).unwrap(), exact)
            }
            1 => {
                let a = rng.gen_range(0.0..40.0);
                let z: f64 = rng.gen_range(0.05..5.0);
                let exact = 2.0 * z / (4.0 * z * z + a * a);
                (integrate_evanescent(|u| (a * u).cos(), z, &spec).unwrap(), exact)
            }
            2 => {
                let a: f64 = rng.gen_range(1.0..60.0);
                let b = rng.gen_range(0.5..4.0);
                let exact = (a * b).sin() / a;
                (
                    integrate_finite(|x| (a * x).cos(), 0.0, b, Endpoint::Regular, &spec).unwrap(),
                    exact,
                )
            }
            _ => {
                let p = rng.gen_range(-0.9..3.0);
                let exact = 1.0 / (p + 1.0);
                let endpoint = if p < 0.0 { Endpoint::SqrtLower } else { Endpoint::Regular };
                (
                    integrate_finite(|x: f64| x.powf(p), 0.0, 1.0, endpoint, &spec).unwrap(),
                    exact,
                )
            }
        };
        let err = (got.value - exact).abs();
        if err <= 5.0 * got.error_estimate || err <= 4.0 * f64::EPSILON * exact.abs() {
            honest += 1;
        }
    }
    assert!(honest as f64 >= 0.99 * total as f64, "{honest}/{total}");
}

#[test]
fn repeated_runs_are_bit_identical() {
    let spec = QuadratureSpec::default();
    let eps = Permittivity::new(3.3, 0.25).unwrap();
    let run = || {
        let a = scattering_alpha(0.8 * LAMBDA0, omega(), eps, Thickness::Finite(4.0 * LAMBDA0), &spec).unwrap();
        let g = g_halfspace(0.8 * LAMBDA0, omega(), eps, &spec).unwrap();
        (a.value.to_bits(), a.error_estimate.to_bits(), g.value.to_bits())
    };
    let first = run();
    for _ in 0..3 {
        assert_eq!(run(), first);
    }
}
