//! Adaptive Gauss–Kronrod quadrature for the two integral shapes the physics
//! needs: semi-infinite integrals with an exponential weight `exp(-2 u z)`
//! (the evanescent range after the substitution `u = sqrt(x^2 - 1)`), and
//! finite oscillatory integrals (the propagating range).
//!
//! The integrators are deterministic: fixed abscissae, a fixed bisection rule
//! (largest error first, lowest index on ties) and a final compensated sum
//! over panels ordered by their left endpoint.

use crate::error::{Error, Result};

/// Tolerances and limits for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Length scale (in the integration variable) beyond which the integrand
    /// is negligible; `0.0` if unknown. Only used to place the truncation point.
    pub decay_scale: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-30,
            max_subdivisions: 2000,
            decay_scale: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            decay_scale: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_decay_scale(mut self, decay_scale: f64) -> Self {
        self.decay_scale = decay_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidInput {
                name: "rel_tol",
                value: self.rel_tol,
                reason: "must be positive and finite",
            });
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidInput {
                name: "abs_tol",
                value: self.abs_tol,
                reason: "must be non-negative and finite",
            });
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidInput {
                name: "max_subdivisions",
                value: self.max_subdivisions as f64,
                reason: "must be at least 1",
            });
        }
        if !(self.decay_scale >= 0.0 && self.decay_scale.is_finite()) {
            return Err(Error::InvalidInput {
                name: "decay_scale",
                value: self.decay_scale,
                reason: "must be non-negative and finite",
            });
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Exact zero with no work done.
    pub const ZERO: QuadratureResult = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
        converged: true,
    };

    /// Multiplies value and error estimate by a constant (unit conversion).
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }

    /// Sum of two independent integrals over disjoint ranges.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    /// `Ok(self)` when converged, otherwise a quadrature error carrying the partial result.
    pub fn require(self, quantity: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Quadrature {
                quantity,
                partial: self,
            })
        }
    }
}

/// Where an integrable endpoint singularity of the form `1/sqrt(distance)` sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoint {
    #[default]
    Regular,
    /// Singular at `a`: integrates over `t` with `x = a + t^2`.
    SqrtLower,
    /// Singular at `b`: integrates over `t` with `x = b - t^2`.
    SqrtUpper,
}

// Gauss–Kronrod 10/21 abscissae and weights (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_958_808_890,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Neumaier-compensated sum in iteration order.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Adaptive integration over consecutive breakpoints `points[0] < points[1] < ...`.
///
/// Each initial interval becomes one panel; the panel with the largest error
/// estimate is bisected until the global estimate meets the tolerance or the
/// panel count reaches `max_subdivisions`.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> QuadratureResult {
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    if points.len() < 2 {
        return QuadratureResult::ZERO;
    }
    let mut panels: Vec<Panel> = points
        .windows(2)
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * panels.len();
    let mut value: f64 = panels.iter().map(|p| p.value).sum();
    let mut error: f64 = panels.iter().map(|p| p.error).sum();
    let mut converged = error <= spec.tolerance(value);

    while !converged && panels.len() < spec.max_subdivisions {
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.error > be {
                    (i, p.error)
                } else {
                    (bi, be)
                }
            });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // interval exhausted at double precision
            break;
        }
        let left = gauss_kronrod(&f, a, mid);
        let right = gauss_kronrod(&f, mid, b);
        evaluations += 42;
        value += left.value + right.value - panels[worst].value;
        error += left.error + right.error - panels[worst].error;
        panels[worst] = left;
        panels.push(right);
        // Re-sum occasionally so running totals do not drift.
        if panels.len() % 64 == 0 {
            value = panels.iter().map(|p| p.value).sum();
            error = panels.iter().map(|p| p.error).sum();
        }
        converged = error <= spec.tolerance(value);
    }

    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = compensated_sum(panels.iter().map(|p| p.value));
    let error_estimate = compensated_sum(panels.iter().map(|p| p.error));
    QuadratureResult {
        value,
        error_estimate,
        evaluations,
        converged: error_estimate <= spec.tolerance(value),
    }
}

/// Integrates `f` over `[a, b]`, optionally removing a `1/sqrt` endpoint
/// singularity by a square-root change of variables.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    endpoint: Endpoint,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInput {
            name: "interval",
            value: b - a,
            reason: "needs finite a < b",
        });
    }
    let span = b - a;
    Ok(match endpoint {
        Endpoint::Regular => integrate_panels(f, &[a, b], spec),
        Endpoint::SqrtLower => {
            integrate_panels(|t| 2.0 * t * f(a + t * t), &[0.0, span.sqrt()], spec)
        }
        Endpoint::SqrtUpper => {
            integrate_panels(|t| 2.0 * t * f(b - t * t), &[0.0, span.sqrt()], spec)
        }
    })
}

/// `integral_0^inf f(u) exp(-2 u z) du`, for `f` finite on `(0, inf)`.
pub fn integrate_evanescent<F: Fn(f64) -> f64>(
    f: F,
    z: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    integrate_evanescent_with_breaks(f, z, &[], spec)
}

/// As [`integrate_evanescent`], with interior breakpoints where `f` has
/// known structure (kinks, narrow peaks).
pub fn integrate_evanescent_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    z: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidInput {
            name: "z",
            value: z,
            reason: "decay length must be positive and finite",
        });
    }
    // exp(-2 U z) = exp(-30) at the nominal truncation point
    let mut upper = (15.0 / z).max(10.0 * spec.decay_scale);
    if let Some(last) = breaks.iter().copied().filter(|b| b.is_finite()).reduce(f64::max) {
        upper = upper.max(last * 1.25);
    }
    let mut points = vec![0.0];
    let mut interior: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b < upper)
        .collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    points.extend(interior);
    points.push(upper);

    let weighted = |u: f64| f(u) * (-2.0 * z * u).exp();
    let inner = spec.tightened(0.5);
    let mut result = integrate_panels(&weighted, &points, &inner);

    // Tail beyond `upper`: bounded by max|f| exp(-2 U z) / (2 z), with |f|
    // sampled on [U, 2U]. Extend the range while that bound is not negligible.
    let tail_bound = |upper: f64| {
        let fmax = [1.0, 1.5, 2.0]
            .iter()
            .map(|s| f(s * upper).abs())
            .fold(0.0, f64::max);
        2.0 * fmax * (-2.0 * z * upper).exp() / (2.0 * z)
    };
    let mut tail = tail_bound(upper);
    result.evaluations += 3;
    let mut extensions = 0;
    while !(tail <= 0.5 * spec.tolerance(result.value)) && extensions < 16 {
        let next = 2.0 * upper;
        let piece = integrate_panels(&weighted, &[upper, next], &inner);
        result = result.combine(piece);
        upper = next;
        tail = tail_bound(upper);
        result.evaluations += 3;
        extensions += 1;
    }
    if !tail.is_finite() {
        tail = f64::INFINITY;
    }
    result.error_estimate += tail;
    result.converged = result.error_estimate <= spec.tolerance(result.value);
    Ok(result)
}
