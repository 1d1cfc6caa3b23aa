//! Scalar special functions: Γ, Γ_m, the exponential integral on the negative
//! axis, the reciprocal gamma function near its zero, and the one-dimensional
//! Shimura functions ζ_1 and ω_1.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    central_derivative, integrate_1d, integrate_semi_infinite, Direction, QuadratureSpec,
};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConstants {
    pub euler_gamma: f64,
    /// Γ'(1), stored as exactly `-euler_gamma`.
    pub gamma_prime_at_one: f64,
}

impl EulerConstants {
    pub const VALUES: EulerConstants = EulerConstants {
        euler_gamma: EULER_GAMMA,
        gamma_prime_at_one: -EULER_GAMMA,
    };
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

pub fn gamma(x: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(Error::PoleAtNonPositiveInteger { factor: 0, argument: x });
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// `Γ_m(s) = π^{m(m−1)/2} ∏_{k=0}^{m−1} Γ(s − k)`; `Γ_0 = 1`.
pub fn gamma_m(m: usize, s: f64) -> Result<f64> {
    let mut product = PI.powf((m * m.saturating_sub(1)) as f64 / 2.0);
    for k in 0..m {
        let arg = s - k as f64;
        if is_pole(arg) {
            return Err(Error::PoleAtNonPositiveInteger { factor: k, argument: arg });
        }
        product *= statrs::function::gamma::gamma(arg);
    }
    Ok(product)
}

// Taylor coefficients of 1/Γ(z) = Σ c_k z^k, k = 1..22 (Abramowitz & Stegun 6.1.34).
const RECIP_GAMMA_COEFFS: [f64; 22] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
];

/// `1/Γ(eps)` from its power series at the origin, `eps + γ eps² + …`.
/// Accurate for `|eps| < 0.5`.
pub fn recip_gamma_series(eps: f64) -> f64 {
    RECIP_GAMMA_COEFFS
        .iter()
        .rev()
        .fold(0.0, |acc, c| (acc + c) * eps)
}

/// `1/Γ(x)` for every real `x`, zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else if x.abs() < 0.1 {
        recip_gamma_series(x)
    } else {
        1.0 / statrs::function::gamma::gamma(x)
    }
}

/// Below this magnitude `Ei` uses its power series, above it the continued
/// fraction for `E_1`.
pub const EI_SERIES_CUTOFF: f64 = 1.0;

/// Exponential integral `Ei(x)` for `x < 0`, i.e. `−E_1(−x)`.
pub fn ei(x: f64) -> Result<f64> {
    if !(x < 0.0) {
        return Err(Error::Domain(format!("Ei is implemented for x < 0 only (got {x})")));
    }
    let t = -x;
    // E_1(t) < e^{−t}/t underflows to zero here
    if t > 745.0 {
        return Ok(0.0);
    }
    if t <= EI_SERIES_CUTOFF {
        Ok(ei_series(x))
    } else {
        Ok(-e1_continued_fraction(t))
    }
}

/// `γ + ln|x| + Σ_{k≥1} x^k / (k·k!)`
fn ei_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= x / kf;
        let contribution = term / kf;
        sum += contribution;
        if contribution.abs() < f64::EPSILON * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    EULER_GAMMA + x.abs().ln() + sum
}

/// `E_1(t)` for `t > 1` by the modified Lentz continued fraction.
fn e1_continued_fraction(t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = t + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h * (-t).exp()
}

/// `ζ_1(z; α, β) = ∫_0^∞ e^{−zx} (x + 1)^{α−1} x^{β−1} dx`.
///
/// For `β < 1` the `x^{β−1}` endpoint behaviour is split off analytically:
/// `∫_0^1 φ x^{β−1} = 1/β + ∫_0^1 (φ − 1) x^{β−1}` with `φ(0) = 1`.
pub fn zeta_1(z: f64, alpha: f64, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(z > 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!("zeta_1 needs z > 0 and beta > 0 (got z = {z}, beta = {beta})")));
    }
    let log_phi = move |x: f64| -z * x + (alpha - 1.0) * x.ln_1p();
    if beta >= 1.0 {
        let integrand = |x: f64| (log_phi(x) + (beta - 1.0) * x.ln()).exp();
        return Ok(integrate_semi_infinite(integrand, 0.0, Direction::ToPlusInfinity, spec)?.value);
    }
    let near = integrate_1d(
        |x: f64| log_phi(x).exp_m1() * x.powf(beta - 1.0),
        0.0,
        1.0,
        spec,
    )?;
    let far = integrate_semi_infinite(
        |x: f64| (log_phi(x) + (beta - 1.0) * x.ln()).exp(),
        1.0,
        Direction::ToPlusInfinity,
        spec,
    )?;
    Ok(1.0 / beta + near.value + far.value)
}

/// `ω_1(z; α, β) = Γ(β)^{−1} z^β ζ_1(z; α, β)`.
pub fn omega_1(z: f64, alpha: f64, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let zeta = zeta_1(z, alpha, beta, spec)?;
    Ok(recip_gamma(beta) * z.powf(beta) * zeta)
}

const PROBE_BETA: f64 = 1e-3;
const PROBE_ALPHA_STEP: f64 = 1e-3;

/// `∂/∂α ω_1(z; α, β)` at `β → 0⁺`.
///
/// The α-derivative is taken by Richardson-extrapolated central differences at
/// `β = 10⁻³` and `2·10⁻³`, then extrapolated linearly to `β = 0`. The result
/// should vanish.
pub fn alpha_derivative_probe(z: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    let derivative_at = |beta: f64| -> Result<f64> {
        let failure = RefCell::new(None);
        let d = central_derivative(
            |a| match omega_1(z, a, beta, spec) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            alpha,
            PROBE_ALPHA_STEP,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => d,
        }
    };
    let d1 = derivative_at(PROBE_BETA)?;
    let d2 = derivative_at(2.0 * PROBE_BETA)?;
    Ok(2.0 * d1 - d2)
}
