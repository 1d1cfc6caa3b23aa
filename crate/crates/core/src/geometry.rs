//! The unit ball `D ⊂ C^{n−1}`: the function `R(x, z)`, the Green function
//! `ξ(x) = −Ei(−4πR)`, the Chern form density, Kudla–Millson form
//! coefficients, and the disc integral `∫_D ξ(x) c_1` at `n = 2`.
//!
//! Form coefficients are reported in the real normalization where the Chern
//! form at `n = 2` has density `−(1/π)(1 − |z|²)^{−2}` against `dx ∧ dy`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{integrate_disc_radial, IntegrationResult, QuadratureSpec};
use crate::special::ei;

/// Below this value of `R` a point counts as lying on the special cycle.
pub const ON_CYCLE_THRESHOLD: f64 = 1e-14;

/// A point `z = (z_1, …, z_{n−1})` with `Σ |z_j|² < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    z: Vec<Complex64>,
    norm_sq: f64,
}

impl BallPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        let norm_sq = z.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if !(norm_sq < 1.0) {
            return Err(Error::Domain(format!("point must lie in the open unit ball (|z|^2 = {norm_sq})")));
        }
        Ok(BallPoint { z, norm_sq })
    }

    pub fn origin(dim: usize) -> Self {
        BallPoint { z: vec![Complex64::new(0.0, 0.0); dim], norm_sq: 0.0 }
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// `zz̄ = Σ |z_j|²`
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
}

/// `x = Σ a_j e_j` in `C^n`; `e_n` is the negative direction.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVector {
    a: Vec<Complex64>,
}

impl AmbientVector {
    pub fn new(a: Vec<Complex64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidInput(format!("ambient dimension must be at least 2 (got {})", a.len())));
        }
        Ok(AmbientVector { a })
    }

    pub fn from_real(a: &[f64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_real(&vec![0.0; n])
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        AmbientVector { a: self.a.iter().map(|c| c * lambda).collect() }
    }

    fn check_point(&self, z: &BallPoint) -> Result<()> {
        if z.dim() + 1 != self.n() {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates but x lives in C^{}",
                z.dim(),
                self.n()
            )));
        }
        Ok(())
    }

    /// `L = Σ_{j<n} a_j z̄_j − a_n`
    fn linear(&self, z: &BallPoint) -> Complex64 {
        let n = self.n();
        self.a[..n - 1]
            .iter()
            .zip(&z.z)
            .map(|(a, zj)| a * zj.conj())
            .sum::<Complex64>()
            - self.a[n - 1]
    }
}

/// `R(x, z) = |Σ_{j<n} a_j z̄_j − a_n|² / (1 − zz̄)`
pub fn r_function(x: &AmbientVector, z: &BallPoint) -> Result<f64> {
    x.check_point(z)?;
    Ok(x.linear(z).norm_sqr() / (1.0 - z.norm_sq))
}

/// `ξ(x)(z) = −Ei(−4πR(x, z))`
pub fn green_xi(x: &AmbientVector, z: &BallPoint) -> Result<f64> {
    let r = r_function(x, z)?;
    if r < ON_CYCLE_THRESHOLD {
        return Err(Error::OnCycle { r });
    }
    Ok(-ei(-4.0 * PI * r)?)
}

/// Density of `c_1` at `n = 2` against `dx ∧ dy`: `−(1/π)(1 − |z|²)^{−2}`.
pub fn chern_density_n2(z: &BallPoint) -> Result<f64> {
    if z.dim() != 1 {
        return Err(Error::InvalidInput(format!("expected a point of the disc (got dimension {})", z.dim())));
    }
    let w = 1.0 - z.norm_sq;
    Ok(-1.0 / (PI * w * w))
}

/// `∫_D ξ(x) c_1` at `n = 2` for the normal form of `x` with `(x, x) = T`:
/// `x = (√T, 0)` for `T > 0`, `x = (0, √−T)` for `T < 0`.
pub fn integral_xi_c1_n2(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(integral_xi_c1_n2_detailed(t, spec)?.value)
}

/// [`integral_xi_c1_n2`] with the quadrature error estimate.
pub fn integral_xi_c1_n2_detailed(t: f64, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("T must be finite and nonzero (got {t})")));
    }
    let x = if t > 0.0 {
        AmbientVector::from_real(&[t.sqrt(), 0.0])?
    } else {
        AmbientVector::from_real(&[0.0, (-t).sqrt()])?
    };
    // ξ depends on |z| only; the cycle point r = 0 (T > 0) is never sampled
    // by the open rule
    let g = |r: f64| {
        BallPoint::from_real(&[r])
            .and_then(|z| green_xi(&x, &z))
            .unwrap_or(f64::NAN)
    };
    integrate_disc_radial(g, spec)
}

/// First and second partials of `R` at `z`.
struct RPartials {
    r: f64,
    /// `∂R/∂z_i`
    d: Vec<Complex64>,
    /// `∂R/∂z̄_j`
    dbar: Vec<Complex64>,
}

impl RPartials {
    fn new(x: &AmbientVector, z: &BallPoint) -> Self {
        let l = x.linear(z);
        let n_val = l.norm_sqr();
        let w = 1.0 - z.norm_sq;
        let dim = z.dim();
        let d = (0..dim)
            .map(|i| l * x.a[i].conj() / w + n_val * z.z[i].conj() / (w * w))
            .collect();
        let dbar = (0..dim)
            .map(|j| x.a[j] * l.conj() / w + n_val * z.z[j] / (w * w))
            .collect();
        RPartials { r: n_val / w, d, dbar }
    }

    /// `∂²R/∂z_i∂z̄_j`
    fn mixed(x: &AmbientVector, z: &BallPoint, i: usize, j: usize) -> Complex64 {
        let l = x.linear(z);
        let n_val = l.norm_sqr();
        let w = 1.0 - z.norm_sq;
        let (zi_bar, zj) = (z.z[i].conj(), z.z[j]);
        let n_i = l * x.a[i].conj();
        let n_jbar = x.a[j] * l.conj();
        let delta = if i == j { 1.0 } else { 0.0 };
        x.a[j] * x.a[i].conj() / w
            + (n_i * zj + n_jbar * zi_bar + n_val * delta) / (w * w)
            + 2.0 * n_val * zi_bar * zj / (w * w * w)
    }
}

fn check_indices(dim: usize, i: usize, j: usize) -> Result<()> {
    for index in [i, j] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    Ok(())
}

/// Coefficient of `dz_i ∧ dz̄_j` (0-based) in `ω(x)`:
/// `−(1/π) e^{−4πR} (−4π R_i R_j̄ / R + R_{ij̄} / R − R_i R_j̄ / R²)`.
///
/// For `x = 0` this is the Chern form coefficient
/// `−(1/π)(δ_ij / (1 − zz̄) + z̄_i z_j / (1 − zz̄)²)`.
pub fn km_form_coefficient(x: &AmbientVector, z: &BallPoint, i: usize, j: usize) -> Result<Complex64> {
    x.check_point(z)?;
    check_indices(z.dim(), i, j)?;
    if x.is_zero() {
        return Ok(chern_coefficient(z, i, j));
    }
    let p = RPartials::new(x, z);
    if p.r < ON_CYCLE_THRESHOLD {
        return Err(Error::OnCycle { r: p.r });
    }
    let r = p.r;
    let first = p.d[i] * p.dbar[j];
    let bracket = -4.0 * PI * first / r + RPartials::mixed(x, z, i, j) / r - first / (r * r);
    Ok(-(-4.0 * PI * r).exp() / PI * bracket)
}

fn chern_coefficient(z: &BallPoint, i: usize, j: usize) -> Complex64 {
    let w = 1.0 - z.norm_sq;
    let delta = if i == j { 1.0 } else { 0.0 };
    -(delta / w + z.z[i].conj() * z.z[j] / (w * w)) / PI
}

/// `max_{i,j} (1 − zz̄)³ |ω(x)_{i,j}(z)|`
pub fn scaled_km_max(x: &AmbientVector, z: &BallPoint) -> Result<f64> {
    let w = 1.0 - z.norm_sq;
    let mut worst: f64 = 0.0;
    for i in 0..z.dim() {
        for j in 0..z.dim() {
            worst = worst.max(w * w * w * km_form_coefficient(x, z, i, j)?.norm());
        }
    }
    Ok(worst)
}

/// Sample `index` of the probe stream: direction uniform on the sphere,
/// radius `1 − (1 − cap)^u` with `u` uniform on `[0, 1)`. Each index owns its
/// own ChaCha stream, so samples do not depend on evaluation order, and the
/// same `(seed, index)` gives the same direction and `u` for every cap.
pub fn probe_point(dim: usize, radius_cap: f64, seed: u64, index: u64, attempt: u32) -> BallPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.set_word_pos(u128::from(attempt) << 32);
    let direction: Vec<f64> = (0..2 * dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let radius = 1.0 - (1.0 - radius_cap).powf(u);
    let z = direction
        .chunks(2)
        .map(|c| Complex64::new(c[0], c[1]) * (radius / norm))
        .collect();
    BallPoint::new(z).expect("radius below 1 by construction")
}

const MAX_RESAMPLES: u32 = 64;

/// Largest `(1 − zz̄)³ |ω(x)_{i,j}|` over `samples` boundary-concentrated
/// points with radius at most `radius_cap`. Points on the cycle `D(x)` are
/// redrawn.
pub fn boundedness_probe(
    x: &AmbientVector,
    samples: usize,
    seed: u64,
    radius_cap: f64,
    exec: Execution,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be >= 1".into()));
    }
    if !(radius_cap > 0.0 && radius_cap < 1.0) {
        return Err(Error::InvalidInput(format!("radius cap must lie in (0, 1) (got {radius_cap})")));
    }
    let dim = x.n() - 1;
    let values = exec.map_range(samples, |index| -> Result<f64> {
        for attempt in 0..MAX_RESAMPLES {
            let z = probe_point(dim, radius_cap, seed, index as u64, attempt);
            match scaled_km_max(x, &z) {
                Err(Error::OnCycle { .. }) => continue,
                other => return other,
            }
        }
        Err(Error::BudgetExceeded(format!("sample {index} stayed on the cycle after {MAX_RESAMPLES} draws")))
    });
    values.into_iter().try_fold(0.0, |acc: f64, v| Ok(acc.max(v?)))
}
