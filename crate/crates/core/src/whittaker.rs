//! Normalized Archimedean Whittaker values `W*_T(s)°_n` and their derivatives.
//!
//! Three pieces:
//!
//! - the scalar case `n = 2` through its one-dimensional integral
//!   representations, with the closed form of the derivative at `s = 1/2`;
//! - the positive-definite two-variable function `W*_{T♭}(n, β)` in exact
//!   arithmetic through the Δ-operator, and its `β`-derivative at 0;
//! - the split form `d/ds|_{s=0} W*_T = −Ei(b) + ∫_{−∞}^{b} (1 − f_m) e^x / x`
//!   for `T = (−4π)^{−1} diag(a, −b)`, and the sweep `b → 0⁻` that recovers
//!   `h_m(0)`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{FromPrimitive, One};
use serde::Serialize;

use crate::combinatorial::{h_m_at_zero, FloatHelpers, NegativeTuple};
use crate::delta::{delta_formula, DiagonalPositive, RationalMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::rational::{factorial, int, interpolating_polynomial, to_f64};
use crate::numerics::{integrate_1d, integrate_semi_infinite, Direction, QuadratureSpec};
use crate::special::{ei, omega_1, recip_gamma};

fn check_t(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("T must be finite and nonzero (got {t})")));
    }
    Ok(())
}

/// `∫_lo^∞ g`, split at `split` so an endpoint singularity at `lo` gets a
/// finite panel of its own.
fn integrate_from(g: impl Fn(f64) -> f64 + Copy, lo: f64, split: f64, spec: &QuadratureSpec) -> Result<f64> {
    let near = integrate_1d(g, lo, split, spec)?;
    let far = integrate_semi_infinite(g, split, Direction::ToPlusInfinity, spec)?;
    Ok(near.value + far.value)
}

/// `W*_T(s)°_2` for a nonzero scalar `T`.
///
/// `T > 0`: `1 + Γ(s−½)^{−1} |4πT|^{s−½} ∫_0^∞ e^{−4πTu} ((u+1)^{s+½} − 1) u^{s−3/2} du`,
/// valid for `s > −1/2`.
/// `T < 0`: `Γ(s−½)^{−1} |4πT|^{s−½} ∫_1^∞ e^{4πTu} (u−1)^{s+½} u^{s−3/2} du`,
/// valid for `s > −3/2`.
pub fn w_star_n2(t: f64, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_t(t)?;
    let c = 4.0 * PI * t;
    let prefactor = recip_gamma(s - 0.5) * c.abs().powf(s - 0.5);
    if t > 0.0 {
        if !(s > -0.5) {
            return Err(Error::Domain(format!("positive T needs s > -1/2 (got {s})")));
        }
        if prefactor == 0.0 {
            return Ok(1.0);
        }
        let g = move |u: f64| ((s + 0.5) * u.ln_1p()).exp_m1() * (-c * u + (s - 1.5) * u.ln()).exp();
        Ok(1.0 + prefactor * integrate_from(g, 0.0, 1.0, spec)?)
    } else {
        if !(s > -1.5) {
            return Err(Error::Domain(format!("negative T needs s > -3/2 (got {s})")));
        }
        if prefactor == 0.0 {
            return Ok(0.0);
        }
        let g = move |u: f64| (c * u + (s + 0.5) * (u - 1.0).ln() + (s - 1.5) * u.ln()).exp();
        Ok(prefactor * integrate_from(g, 1.0, 2.0, spec)?)
    }
}

/// The other `T > 0` representation,
/// `Γ(s−½)^{−1} |4πT|^{s−½} ∫_0^∞ e^{−4πTu} (u+1)^{s+½} u^{s−3/2} du`,
/// convergent only for `s > 1/2`.
pub fn w_star_n2_positive1(t: f64, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_t(t)?;
    if !(t > 0.0 && s > 0.5) {
        return Err(Error::Domain(format!("this representation needs T > 0 and s > 1/2 (got T = {t}, s = {s})")));
    }
    let c = 4.0 * PI * t;
    let g = move |u: f64| (-c * u + (s + 0.5) * u.ln_1p() + (s - 1.5) * u.ln()).exp();
    Ok(recip_gamma(s - 0.5) * c.powf(s - 0.5) * integrate_from(g, 0.0, 1.0, spec)?)
}

/// `d/ds|_{s=1/2} W*_T(s)°_2` by quadrature. The reciprocal gamma factor
/// vanishes at `s = 1/2` with slope 1, so the derivative is the bare integral
/// at `s = 1/2`.
pub fn w_star_n2_deriv_at_half(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_t(t)?;
    let c = 4.0 * PI * t;
    if t > 0.0 {
        // ((u + 1) − 1) u^{−1} = 1
        let g = move |u: f64| (-c * u).exp();
        Ok(integrate_semi_infinite(g, 0.0, Direction::ToPlusInfinity, spec)?.value)
    } else {
        let g = move |u: f64| (c * u).exp() * (u - 1.0) / u;
        Ok(integrate_semi_infinite(g, 1.0, Direction::ToPlusInfinity, spec)?.value)
    }
}

/// `−d/ds|_{s=1/2} W*_T(s)°_2` in closed form: `(−4πT)^{−1}` for `T > 0`,
/// `(4πT)^{−1} e^{4πT} − Ei(4πT)` for `T < 0`.
pub fn closed_form_deriv(t: f64) -> Result<f64> {
    check_t(t)?;
    let c = 4.0 * PI * t;
    if t > 0.0 {
        Ok(-1.0 / c)
    } else {
        Ok(c.exp() / c - ei(c)?)
    }
}

/// `W*_{T♭}(n, β)` for `T♭ = (−4π)^{−1} diag(a)`, `n = m + 1`, through
/// `(−1)^m det(−a)^{−1} Δ|_{z=1}(e^{tr(az)} det(z)^{−β})` with the
/// exponential prefactors cancelled.
pub fn w_star_pos_def_two_var(a: &NegativeTuple, beta: &BigRational) -> Result<BigRational> {
    let m = a.len();
    if m == 0 {
        return Ok(BigRational::one());
    }
    let u = RationalMatrix::diagonal(a.entries());
    let delta = delta_formula(&u, &DiagonalPositive::identity(m), &-beta)?;
    let det_neg: BigRational = a.entries().iter().fold(BigRational::one(), |acc, x| acc * -x);
    let sign = if m.is_multiple_of(2) { int(1) } else { int(-1) };
    Ok(sign * delta / det_neg)
}

/// Quadrature oracle for `m = 1`: `Γ(β)^{−1} (−a_1)^β ζ_1(−a_1; 2, β)`.
pub fn w_star_pos_def_m1_quadrature(a1: f64, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(a1 < 0.0) {
        return Err(Error::Domain(format!("a_1 must be negative (got {a1})")));
    }
    omega_1(-a1, 2.0, beta, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMethod {
    /// Exact derivative of the Δ-form, which is a degree-`m` polynomial in `β`.
    DeltaBased,
    /// `det(a)^{−1} Σ_{t=0}^{m−1} (m−1−t)! e_t(a)`.
    ExplicitSum,
}

/// `−∂/∂β|_{β=0} W*_{T♭}(n, β)`, exactly.
pub fn deriv_beta_at_zero(a: &NegativeTuple, method: DerivMethod) -> Result<BigRational> {
    let m = a.len();
    if m == 0 {
        return Err(Error::InvalidInput("the beta-derivative needs m >= 1".into()));
    }
    match method {
        DerivMethod::DeltaBased => {
            let points = (0..=m as i64)
                .map(|k| Ok((int(k), w_star_pos_def_two_var(a, &int(k))?)))
                .collect::<Result<Vec<_>>>()?;
            let coeffs = interpolating_polynomial(&points)?;
            Ok(-coeffs[1].clone())
        }
        DerivMethod::ExplicitSum => {
            let e = crate::combinatorial::elementary_symmetric(a);
            let sum: BigRational = (0..m).map(|t| factorial(m - 1 - t) * &e[t]).sum();
            Ok(sum / a.det())
        }
    }
}

/// Input of the split form: `T = (−4π)^{−1} diag(a, −b)` with `a_i < 0`,
/// `b < 0`. `T` itself is never built.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMatrixInput {
    pub a: NegativeTuple,
    pub b: f64,
}

impl SplitMatrixInput {
    pub fn new(a: NegativeTuple, b: f64) -> Result<Self> {
        if !(b < 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!("b must be negative (got {b})")));
        }
        Ok(SplitMatrixInput { a, b })
    }
}

/// `d/ds|_{s=0} W*_T(s)°_n = −Ei(b) + ∫_{−∞}^{b} (1 − f_m(x)) e^x x^{−1} dx`.
///
/// The integrand is bounded as `x → 0⁻` since `f_m(0) = 1`.
pub fn split_deriv_at_zero(input: &SplitMatrixInput, spec: &QuadratureSpec) -> Result<f64> {
    let helpers = FloatHelpers::new(&input.a);
    let tail = if helpers.m() == 0 {
        0.0
    } else {
        integrate_semi_infinite(
            |x| helpers.antiderivative_rhs(x),
            input.b,
            Direction::FromMinusInfinity,
            spec,
        )?
        .value
    };
    Ok(-ei(input.b)? + tail)
}

/// The same quantity as [`split_deriv_at_zero`] from the unsplit form
/// `−∫_{−∞}^{b} f_m(x) e^x x^{−1} dx`, integrated in two pieces meeting at
/// `2b`.
pub fn split_deriv_at_zero_direct(input: &SplitMatrixInput, spec: &QuadratureSpec) -> Result<f64> {
    let helpers = FloatHelpers::new(&input.a);
    let g = |x: f64| helpers.f(x) * x.exp() / x;
    let b = input.b;
    let far = integrate_semi_infinite(g, 2.0 * b, Direction::FromMinusInfinity, spec)?;
    let near = integrate_1d(g, 2.0 * b, b, spec)?;
    Ok(-(far.value + near.value))
}

/// `b ∈ {−10⁻¹, −10⁻², −10⁻³, −10⁻⁴}`.
pub const DEFAULT_B_GRID: [f64; 4] = [-1e-1, -1e-2, -1e-3, -1e-4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub b: f64,
    pub split_deriv: f64,
    pub ei_b: f64,
    /// `split_deriv + ei_b`
    pub combination: f64,
    pub target: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSweepResult {
    pub rows: Vec<SweepRow>,
    pub extrapolated_limit: f64,
    pub target: f64,
}

impl LimitSweepResult {
    pub fn b_grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.b).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }

    pub fn residuals_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].residual < w[0].residual)
    }
}

fn check_grid(b_grid: &[f64]) -> Result<()> {
    if b_grid.is_empty() {
        return Err(Error::InvalidInput("b grid is empty".into()));
    }
    if let Some(bad) = b_grid.iter().find(|b| !(**b < 0.0 && b.is_finite())) {
        return Err(Error::InvalidInput(format!("b grid points must be negative (got {bad})")));
    }
    if b_grid.windows(2).any(|w| !(w[1].abs() < w[0].abs())) {
        return Err(Error::InvalidInput("b grid must shrink strictly toward 0".into()));
    }
    Ok(())
}

/// Evaluates `d/ds|_0 W*_T + Ei(b)` over `b_grid` and extrapolates to
/// `b → 0⁻` with the model `C_0 + C_1 b ln|b| + C_2 b`, fitted exactly
/// through the three points closest to 0.
pub fn limit_sweep(
    a: &NegativeTuple,
    b_grid: &[f64],
    spec: &QuadratureSpec,
    exec: Execution,
) -> Result<LimitSweepResult> {
    check_grid(b_grid)?;
    let target = to_f64(&h_m_at_zero(a));
    let rows = exec
        .map(b_grid, |&b| -> Result<SweepRow> {
            let input = SplitMatrixInput::new(a.clone(), b)?;
            let split_deriv = split_deriv_at_zero(&input, spec)?;
            let ei_b = ei(b)?;
            let combination = split_deriv + ei_b;
            Ok(SweepRow {
                b,
                split_deriv,
                ei_b,
                combination,
                target,
                residual: (combination - target).abs(),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.b, r.combination)).collect();
    Ok(LimitSweepResult {
        extrapolated_limit: extrapolate_to_zero(&points),
        rows,
        target,
    })
}

/// Constant term of `C_0 + C_1 b ln|b| + C_2 b` through the last three
/// points; fewer points drop `C_2`, then `C_1`.
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let basis = |b: f64| [1.0, b * b.abs().ln(), b];
    let k = points.len().min(3);
    let tail = &points[points.len() - k..];
    let mut rows: Vec<Vec<f64>> = tail
        .iter()
        .map(|&(b, y)| {
            let mut row = basis(b)[..k].to_vec();
            row.push(y);
            row
        })
        .collect();
    solve_in_place(&mut rows)[0]
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)`
/// system.
fn solve_in_place(rows: &mut [Vec<f64>]) -> Vec<f64> {
    let k = rows.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs()))
            .unwrap();
        rows.swap(col, pivot);
        for r in col + 1..k {
            let factor = rows[r][col] / rows[col][col];
            for c in col..=k {
                rows[r][c] -= factor * rows[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let tail: f64 = (r + 1..k).map(|c| rows[r][c] * x[c]).sum();
        x[r] = (rows[r][k] - tail) / rows[r][r];
    }
    x
}

/// Three computations of `d/ds|_{s=−1/2} W*_{T♭}(s)°_2` for `T♭ > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleCheck {
    pub t_flat: f64,
    pub closed_form: f64,
    pub explicit_sum: f64,
    pub sweep_extrapolation: f64,
    pub max_discrepancy: f64,
}

/// Compares the closed form, the exact explicit sum with `a_1 = −4πT♭`, and
/// the `b → 0⁻` sweep extrapolation over [`DEFAULT_B_GRID`].
pub fn triple_crosscheck_n2(t_flat: f64, spec: &QuadratureSpec, exec: Execution) -> Result<TripleCheck> {
    if !(t_flat > 0.0 && t_flat.is_finite()) {
        return Err(Error::Domain(format!("T_flat must be positive (got {t_flat})")));
    }
    let a1 = -4.0 * PI * t_flat;
    let exact_a1 = BigRational::from_f64(a1)
        .ok_or_else(|| Error::InvalidInput(format!("cannot represent {a1} exactly")))?;
    let a = NegativeTuple::new(vec![exact_a1])?;
    let closed_form = closed_form_deriv(t_flat)?;
    let explicit_sum = to_f64(&deriv_beta_at_zero(&a, DerivMethod::ExplicitSum)?);
    let sweep_extrapolation = limit_sweep(&a, &DEFAULT_B_GRID, spec, exec)?.extrapolated_limit;
    let values = [closed_form, explicit_sum, sweep_extrapolation];
    let max_discrepancy = values
        .iter()
        .flat_map(|x| values.iter().map(move |y| (x - y).abs()))
        .fold(0.0, f64::max);
    Ok(TripleCheck {
        t_flat,
        closed_form,
        explicit_sum,
        sweep_extrapolation,
        max_discrepancy,
    })
}

/// For `T` with at least two negative eigenvalues both sides of the local
/// identity vanish; this is a constant, not a computation.
pub fn higher_signature_value(negative_eigenvalues: usize) -> Result<f64> {
    if negative_eigenvalues < 2 {
        return Err(Error::Domain(format!(
            "only signatures with at least two negative eigenvalues are constant (got {negative_eigenvalues})"
        )));
    }
    Ok(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorial::{random_tuple, FloatHelpers};
    use crate::numerics::central_derivative;
    use crate::numerics::rational::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn t(values: &[i64]) -> NegativeTuple {
        NegativeTuple::from_ints(values).unwrap()
    }

    #[test]
    fn n2_values_at_half() {
        assert!((w_star_n2(1.0, 0.5, &spec()).unwrap() - 1.0).abs() <= 1e-9);
        assert!(w_star_n2(-1.0, 0.5, &spec()).unwrap().abs() <= 1e-9);
        assert!(w_star_n2(1.0, -0.6, &spec()).is_err());
        assert!(w_star_n2(-1.0, -1.6, &spec()).is_err());
        assert!(w_star_n2(0.0, 1.0, &spec()).is_err());
    }

    #[test]
    fn positive_representations_agree() {
        let p1 = w_star_n2_positive1(1.0, 1.5, &spec()).unwrap();
        let p2 = w_star_n2(1.0, 1.5, &spec()).unwrap();
        assert!((p1 - p2).abs() <= 1e-8, "{p1} {p2}");
        let p1 = w_star_n2_positive1(0.3, 2.5, &spec()).unwrap();
        let p2 = w_star_n2(0.3, 2.5, &spec()).unwrap();
        assert!((p1 - p2).abs() <= 1e-8 * p1.abs().max(1.0));
    }

    #[test]
    fn derivative_at_half() {
        let d = w_star_n2_deriv_at_half(1.0, &spec()).unwrap();
        assert!((d - 1.0 / (4.0 * PI)).abs() <= 1e-8);
        for tv in [0.25, 1.0, 4.0, -0.25, -1.0, -4.0] {
            let d = w_star_n2_deriv_at_half(tv, &spec()).unwrap();
            let closed = closed_form_deriv(tv).unwrap();
            assert!((d + closed).abs() <= 1e-8, "T = {tv}: {d} vs {closed}");
        }
        assert!((closed_form_deriv(1.0).unwrap() + 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for tv in [0.5, -0.5] {
            let fd = central_derivative(|s| w_star_n2(tv, s, &spec()).unwrap(), 0.5, 1e-3).unwrap();
            let d = w_star_n2_deriv_at_half(tv, &spec()).unwrap();
            assert!((fd - d).abs() <= 1e-5, "T = {tv}: {fd} vs {d}");
        }
    }

    #[test]
    fn two_variable_examples() {
        assert_eq!(w_star_pos_def_two_var(&t(&[-1]), &int(1)).unwrap(), int(2));
        assert_eq!(w_star_pos_def_two_var(&t(&[-2]), &int(1)).unwrap(), rat(3, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for i in 0..20 {
            let a = random_tuple(&mut rng, i % 7);
            assert_eq!(w_star_pos_def_two_var(&a, &int(0)).unwrap(), int(1));
        }
        let oracle = w_star_pos_def_m1_quadrature(-1.0, 1.0, &spec()).unwrap();
        assert!((oracle - 2.0).abs() <= 1e-8);
        let oracle = w_star_pos_def_m1_quadrature(-2.0, 1.0, &spec()).unwrap();
        assert!((oracle - 1.5).abs() <= 1e-8);
    }

    #[test]
    fn beta_derivative_methods_agree() {
        assert_eq!(deriv_beta_at_zero(&t(&[-1]), DerivMethod::ExplicitSum).unwrap(), int(-1));
        assert_eq!(deriv_beta_at_zero(&t(&[-1, -2]), DerivMethod::DeltaBased).unwrap(), int(-1));
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for i in 0..30 {
            let a = random_tuple(&mut rng, 1 + i % 6);
            let delta = deriv_beta_at_zero(&a, DerivMethod::DeltaBased).unwrap();
            assert_eq!(delta, deriv_beta_at_zero(&a, DerivMethod::ExplicitSum).unwrap());
            assert_eq!(delta, h_m_at_zero(&a));
        }
        assert!(deriv_beta_at_zero(&t(&[]), DerivMethod::ExplicitSum).is_err());
    }

    #[test]
    fn split_form_examples() {
        for b in [-0.5, -0.01] {
            let input = SplitMatrixInput::new(t(&[]), b).unwrap();
            assert_eq!(split_deriv_at_zero(&input, &spec()).unwrap(), -ei(b).unwrap());
        }
        let input = SplitMatrixInput::new(t(&[-1]), -0.01).unwrap();
        let v = split_deriv_at_zero(&input, &spec()).unwrap();
        assert!((v + ei(-0.01).unwrap() + 1.0).abs() <= 0.05);
        assert!(SplitMatrixInput::new(t(&[-1]), 0.0).is_err());
    }

    #[test]
    fn split_and_direct_forms_agree() {
        for a in [t(&[-1]), t(&[-1, -2]), NegativeTuple::parse_csv("-1/2,-3").unwrap()] {
            for b in [-1.0, -0.1, -0.001] {
                let input = SplitMatrixInput::new(a.clone(), b).unwrap();
                let split = split_deriv_at_zero(&input, &spec()).unwrap();
                let direct = split_deriv_at_zero_direct(&input, &spec()).unwrap();
                assert!((split - direct).abs() <= 1e-8 * split.abs().max(1.0), "{a} {b}: {split} {direct}");
            }
        }
    }

    #[test]
    fn combination_is_h_at_b() {
        // ∫_{−∞}^{b} (1 − f_m) e^x / x = h_m(b), since h_m' = (1 − f_m) e^x / x and h_m(−∞) = 0
        let a = NegativeTuple::parse_csv("-1/2,-3").unwrap();
        let helpers = FloatHelpers::new(&a);
        for b in [-2.0, -0.3, -0.01] {
            let input = SplitMatrixInput::new(a.clone(), b).unwrap();
            let combination = split_deriv_at_zero(&input, &spec()).unwrap() + ei(b).unwrap();
            assert!((combination - helpers.h_with_exp(b)).abs() <= 1e-9);
        }
    }

    #[test]
    fn sweep_converges_to_h_at_zero() {
        for a in [t(&[-1]), t(&[-1, -2]), NegativeTuple::parse_csv("-1/2,-3").unwrap()] {
            let sweep = limit_sweep(&a, &DEFAULT_B_GRID, &spec(), Execution::default()).unwrap();
            assert!(sweep.residuals_strictly_decreasing(), "{:?}", sweep.residuals());
            assert!((sweep.extrapolated_limit - sweep.target).abs() <= 1e-4);
        }
        let empty = limit_sweep(&t(&[]), &DEFAULT_B_GRID, &spec(), Execution::Sequential).unwrap();
        assert!(empty.residuals().iter().all(|r| *r <= 1e-10));
        assert!(limit_sweep(&t(&[-1]), &[-1e-2, -1e-1], &spec(), Execution::Sequential).is_err());
        assert!(limit_sweep(&t(&[-1]), &[0.1], &spec(), Execution::Sequential).is_err());
    }

    #[test]
    fn sweep_modes_agree() {
        let a = t(&[-1, -2]);
        let par = limit_sweep(&a, &DEFAULT_B_GRID, &spec(), Execution::Parallel).unwrap();
        let seq = limit_sweep(&a, &DEFAULT_B_GRID, &spec(), Execution::Sequential).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn extrapolation_recovers_the_model() {
        let model = |b: f64| 0.7 - 2.0 * b * b.abs().ln() + 3.0 * b;
        let points: Vec<_> = DEFAULT_B_GRID.iter().map(|&b| (b, model(b))).collect();
        assert!((extrapolate_to_zero(&points) - 0.7).abs() < 1e-10);
        assert_eq!(extrapolate_to_zero(&[(-0.1, 4.0)]), 4.0);
    }

    #[test]
    fn triple_crosscheck() {
        for tf in [1.0 / (4.0 * PI), 1.0] {
            let check = triple_crosscheck_n2(tf, &spec(), Execution::default()).unwrap();
            assert!(check.max_discrepancy <= 1e-4, "{check:?}");
        }
        let one = closed_form_deriv(1.0).unwrap();
        let two = closed_form_deriv(2.0).unwrap();
        assert!((two - one / 2.0).abs() <= 1e-6);
    }

    #[test]
    fn higher_signature_is_constant() {
        assert_eq!(higher_signature_value(2).unwrap(), 0.0);
        assert!(higher_signature_value(1).is_err());
    }
}
