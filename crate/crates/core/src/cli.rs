//! Verification suites, sweep tables and single-function evaluation behind
//! the `archsw` binary.
//!
//! Reports are JSON documents. Exact cases carry `null` residual and
//! tolerance; numeric cases pass when `residual <= tolerance`, where the
//! tolerance has already been multiplied by the run's `tol_scale`.

use std::f64::consts::PI;
use std::io::Write;

use chrono::{SecondsFormat, Utc};
use clap::ValueEnum;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::combinatorial::{
    d_m, f_m, h_m_at_zero, h_m_rational_factor, random_negative_rational, random_regular_point,
    random_tuple, verify_antiderivative, verify_f_step, verify_h_recursion, verify_telescoping,
    verify_u_identity, FloatHelpers, NegativeTuple,
};
use crate::delta::{
    delta_bruteforce, delta_formula, n_st_closed, n_st_enumerate, polynomial_extension_sides, DiagonalPositive,
    RationalMatrix,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{
    boundedness_probe, chern_density_n2, green_xi, integral_xi_c1_n2, integral_xi_c1_n2_detailed,
    km_form_coefficient, AmbientVector, BallPoint,
};
use crate::numerics::rational::{format_ratio, int, parse_ratio, rat, to_f64};
use crate::numerics::{central_derivative, integrate_semi_infinite, Direction, QuadratureSpec};
use crate::special::{alpha_derivative_probe, ei, gamma_m, recip_gamma, EULER_GAMMA};
use crate::whittaker::{
    closed_form_deriv, deriv_beta_at_zero, limit_sweep, split_deriv_at_zero, split_deriv_at_zero_direct,
    triple_crosscheck_n2, w_star_n2, w_star_n2_deriv_at_half, w_star_n2_positive1, w_star_pos_def_m1_quadrature,
    w_star_pos_def_two_var, DerivMethod, LimitSweepResult, SplitMatrixInput, DEFAULT_B_GRID,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub name: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Case {
    fn exact(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Case {
            name: name.into(),
            status: if holds { Status::Pass } else { Status::Fail },
            residual: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Case {
            name: name.into(),
            status: Status::Fail,
            residual: None,
            tolerance: None,
            detail: err.to_string(),
        }
    }
}

/// Collects cases for one suite, applying `tol_scale` to numeric checks.
struct Cases {
    prefix: &'static str,
    tol_scale: f64,
    list: Vec<Case>,
}

impl Cases {
    fn new(prefix: &'static str, tol_scale: f64) -> Self {
        Cases { prefix, tol_scale, list: Vec::new() }
    }

    fn name(&self, name: &str) -> String {
        format!("{}/{}", self.prefix, name)
    }

    fn exact(&mut self, name: &str, outcome: Result<bool>, detail: impl Into<String>) {
        let full = self.name(name);
        self.list.push(match outcome {
            Ok(holds) => Case::exact(full, holds, detail),
            Err(e) => Case::failed(full, &e),
        });
    }

    /// Passes when `residual <= tolerance · tol_scale`.
    fn numeric(&mut self, name: &str, residual: Result<f64>, tolerance: f64, detail: impl Into<String>) {
        let full = self.name(name);
        let tolerance = tolerance * self.tol_scale;
        self.list.push(match residual {
            Ok(r) => Case {
                name: full,
                status: if r <= tolerance { Status::Pass } else { Status::Fail },
                residual: Some(r),
                tolerance: Some(tolerance),
                detail: detail.into(),
            },
            Err(e) => Case::failed(full, &e),
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Combinatorial,
    Delta,
    Special,
    Whittaker,
    Geometry,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Combinatorial => "combinatorial",
            Suite::Delta => "delta",
            Suite::Special => "special",
            Suite::Whittaker => "whittaker",
            Suite::Geometry => "geometry",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Combinatorial,
                Suite::Delta,
                Suite::Geometry,
                Suite::Special,
                Suite::Whittaker,
            ],
            single => vec![single],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub tol_scale: f64,
    pub seed: u64,
    pub m_max: usize,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { tol_scale: 1.0, seed: 0, m_max: 6, exec: Execution::default() }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(Error::InvalidInput(format!("tol-scale must be positive (got {})", self.tol_scale)));
        }
        if self.m_max > NegativeTuple::MAX_LEN {
            return Err(Error::InvalidInput(format!(
                "m-max must be at most {} (got {})",
                NegativeTuple::MAX_LEN,
                self.m_max
            )));
        }
        Ok(())
    }

    /// Independent deterministic stream per suite.
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(salt);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub overall: Overall,
    pub cases: Vec<Case>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == Overall::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Runs `suite` (every member suite for `all`) and returns the report with
/// cases sorted by name.
pub fn run_verify(suite: Suite, config: &VerifyConfig) -> Result<VerificationReport> {
    config.validate()?;
    let started_at = timestamp();
    let members = suite.members();
    let mut cases: Vec<Case> = config
        .exec
        .map(&members, |&member| suite_cases(member, config))
        .into_iter()
        .flatten()
        .collect();
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    let overall = if cases.iter().any(|c| c.status == Status::Fail) {
        Overall::Fail
    } else {
        Overall::Pass
    };
    Ok(VerificationReport {
        suite: suite.name().to_string(),
        seed: config.seed,
        started_at,
        finished_at: timestamp(),
        overall,
        cases,
    })
}

fn suite_cases(suite: Suite, config: &VerifyConfig) -> Vec<Case> {
    match suite {
        Suite::Combinatorial => combinatorial_suite(config),
        Suite::Delta => delta_suite(config),
        Suite::Special => special_suite(config),
        Suite::Whittaker => whittaker_suite(config),
        Suite::Geometry => geometry_suite(config),
        Suite::All => unreachable!("expanded by Suite::members"),
    }
}

/// Random tuples per identity in the combinatorial suite.
pub const RANDOM_TUPLES: usize = 100;

fn combinatorial_suite(config: &VerifyConfig) -> Vec<Case> {
    let mut cases = Cases::new("combinatorial", config.tol_scale);
    let mut rng = config.rng(1);
    let m_max = config.m_max;
    for k in 0..RANDOM_TUPLES {
        let a = random_tuple(&mut rng, k % (m_max + 1));
        cases.exact(
            &format!("f_at_zero/{k:03}"),
            f_m(&a, &int(0)).map(|v| v == int(1)),
            format!("a = {a}"),
        );
    }
    for k in 0..RANDOM_TUPLES {
        let m = 1 + k % m_max.max(1);
        let a = random_tuple(&mut rng, m);
        let all = (0..m).map(|t| verify_telescoping(&a, t)).collect::<Result<Vec<_>>>();
        cases.exact(
            &format!("telescoping/{k:03}"),
            all.map(|v| v.into_iter().all(|ok| ok)),
            format!("a = {a}, t = 0..{}", m - 1),
        );
    }
    for k in 0..RANDOM_TUPLES {
        let a = random_tuple(&mut rng, k % m_max.max(1));
        let next = random_negative_rational(&mut rng);
        let longer = a.appended(next.clone()).expect("m < MAX_LEN");
        let x = random_regular_point(&mut rng, &longer);
        let detail = format!("a = {a}, a_next = {next}, x = {x}");
        cases.exact(&format!("h_recursion/{k:03}"), verify_h_recursion(&a, &next, &x), detail.clone());
        cases.exact(&format!("u_identity/{k:03}"), verify_u_identity(&a, &next, &x), detail.clone());
        cases.exact(&format!("f_step/{k:03}"), verify_f_step(&a, &next, &x), detail);
    }
    for k in 0..50 {
        let a = random_tuple(&mut rng, 1 + k % 8);
        let agree = h_m_rational_factor(&a, &int(0)).map(|h| h == h_m_at_zero(&a));
        cases.exact(&format!("h_at_zero_two_paths/{k:02}"), agree, format!("a = {a}"));
    }
    let grid = [-5.0, -2.0, -0.5, -0.05];
    for values in [vec![-1], vec![-1, -2], vec![-1, -2, -3]] {
        let a = NegativeTuple::from_ints(&values).expect("negative entries");
        cases.numeric(
            &format!("antiderivative/m{}", a.len()),
            verify_antiderivative(&a, &grid, 1e-4),
            1e-6,
            format!("a = {a}, grid {grid:?}, step 1e-4"),
        );
    }
    cases.list
}

fn delta_suite(config: &VerifyConfig) -> Vec<Case> {
    let mut cases = Cases::new("delta", config.tol_scale);
    let mut rng = config.rng(2);
    let m_top = config.m_max.clamp(1, 3);
    for m in 1..=m_top {
        for s in 0..=3u32 {
            for k in 0..20 {
                let u = RationalMatrix::random(&mut rng, m);
                let z0 = DiagonalPositive::random(&mut rng, m);
                let outcome = delta_formula(&u, &z0, &int(s as i64)).and_then(|formula| {
                    Ok(formula == delta_bruteforce(&u, &z0, s, config.exec)?)
                });
                cases.exact(&format!("formula_vs_bruteforce/m{m}/s{s}/{k:02}"), outcome, "exact");
            }
        }
        let u = RationalMatrix::random(&mut rng, m);
        let z0 = DiagonalPositive::random(&mut rng, m);
        let outcome = polynomial_extension_sides(&u, &z0, &rat(-7, 3)).map(|(d, i)| d == i);
        cases.exact(&format!("polynomial_in_s/m{m}"), outcome, "s = -7/3 against interpolation through s = 1..m+1");
    }
    for s in 1..=5u64 {
        for t in 0..=5u64 {
            let outcome = n_st_closed(s, t).and_then(|c| Ok(c == n_st_enumerate(s, t)?));
            cases.exact(&format!("n_st/s{s}/t{t}"), outcome, "closed product vs enumeration");
        }
    }
    cases.list
}

fn special_suite(config: &VerifyConfig) -> Vec<Case> {
    let mut cases = Cases::new("special", config.tol_scale);
    let spec = QuadratureSpec::default();
    for (label, c) in [("0.1", 0.1), ("1", 1.0), ("4pi", 4.0 * PI)] {
        let residual = integrate_semi_infinite(|t| (-t).exp() / t, c, Direction::ToPlusInfinity, &spec)
            .and_then(|tail| Ok((ei(-c)? + tail.value).abs()));
        cases.numeric(&format!("ei_tail_integral/{label}"), residual, 1e-10, format!("Ei(-c) = -int_c^inf e^-t/t, c = {c}"));
    }
    for b in [-1e-3, -1e-4, -1e-5] {
        let residual = ei(b).map(|v| (v - b.abs().ln() - EULER_GAMMA).abs());
        cases.numeric(&format!("ei_near_zero/{b:e}"), residual, 2.0 * b.abs(), "|Ei(b) - log|b| - gamma| <= 2|b|");
    }
    let residual = ei(-1.0 - 1e-12).and_then(|l| Ok((l - ei(-1.0 + 1e-12)?).abs()));
    cases.numeric("ei_continuity/cutoff", residual, 1e-10, "series and continued fraction meet at x = -1");
    for x in [0.3, 1.7, 4.2] {
        let residual = Ok((recip_gamma(x) - 1.0 / statrs::function::gamma::gamma(x)).abs());
        cases.numeric(&format!("recip_gamma/{x}"), residual, 1e-13, "series/statrs agreement");
    }
    let residual = Ok((recip_gamma(1e-3) - crate::special::recip_gamma_series(1e-3)).abs());
    cases.numeric("recip_gamma/near_pole", residual, 1e-15, "series branch");
    let residual = gamma_m(2, 3.0).map(|v| (v - PI * 2.0).abs());
    cases.numeric("gamma_m/2_at_3", residual, 1e-12, "pi * Gamma(3) * Gamma(2)");
    for (z, alpha) in [(4.0 * PI, 1.0), (4.0 * PI, 2.0), (1.0, 3.0)] {
        let residual = alpha_derivative_probe(z, alpha, &spec).map(f64::abs);
        cases.numeric(
            &format!("alpha_derivative_vanishes/z{z:.4}_alpha{alpha}"),
            residual,
            1e-5,
            "d/d alpha omega_1 at beta -> 0",
        );
    }
    cases.list
}

fn whittaker_suite(config: &VerifyConfig) -> Vec<Case> {
    let mut cases = Cases::new("whittaker", config.tol_scale);
    let spec = QuadratureSpec::default();
    let mut rng = config.rng(4);
    for t in [0.25, 1.0, 4.0, -0.25, -1.0, -4.0] {
        let residual = w_star_n2_deriv_at_half(t, &spec).and_then(|d| Ok((d + closed_form_deriv(t)?).abs()));
        cases.numeric(&format!("n2_deriv_vs_closed_form/T{t}"), residual, 1e-8, "quadrature at s = 1/2 vs closed form");
    }
    let residual = w_star_n2_positive1(1.0, 1.5, &spec).and_then(|p1| Ok((p1 - w_star_n2(1.0, 1.5, &spec)?).abs()));
    cases.numeric("n2_representations/s1.5_T1", residual, 1e-8, "two T > 0 representations");
    cases.numeric("n2_at_half/T1", w_star_n2(1.0, 0.5, &spec).map(|v| (v - 1.0).abs()), 1e-9, "W*_1(1/2) = 1");
    cases.numeric("n2_at_half/T-1", w_star_n2(-1.0, 0.5, &spec).map(f64::abs), 1e-9, "W*_{-1}(1/2) = 0");
    for t in [0.5, -0.5] {
        let residual = w_star_n2_deriv_at_half(t, &spec).and_then(|d| {
            let fd = finite_difference(|s| w_star_n2(t, s, &spec), 0.5, 1e-3)?;
            Ok((fd - d).abs())
        });
        cases.numeric(&format!("n2_deriv_vs_finite_difference/T{t}"), residual, 1e-5, "step 1e-3");
    }
    for k in 0..50 {
        let a = random_tuple(&mut rng, 1 + k % config.m_max.max(1));
        let outcome = (|| -> Result<bool> {
            let delta = deriv_beta_at_zero(&a, DerivMethod::DeltaBased)?;
            let explicit = deriv_beta_at_zero(&a, DerivMethod::ExplicitSum)?;
            Ok(delta == explicit && explicit == h_m_at_zero(&a))
        })();
        cases.exact(&format!("beta_derivative/{k:02}"), outcome, format!("a = {a}"));
        let constant = w_star_pos_def_two_var(&a, &int(0)).map(|v| v == int(1));
        cases.exact(&format!("two_var_at_beta_zero/{k:02}"), constant, format!("a = {a}"));
    }
    let residual = w_star_pos_def_m1_quadrature(-1.0, 1.0, &spec).and_then(|q| {
        let exact = w_star_pos_def_two_var(&NegativeTuple::from_ints(&[-1])?, &int(1))?;
        Ok((q - to_f64(&exact)).abs())
    });
    cases.numeric("two_var_m1_beta1_vs_quadrature", residual, 1e-8, "a = (-1), beta = 1");
    let tuples = sweep_tuples();
    for a in &tuples {
        for b in [-1.0, -0.1, -0.001] {
            let residual = SplitMatrixInput::new(a.clone(), b).and_then(|input| {
                let split = split_deriv_at_zero(&input, &spec)?;
                let direct = split_deriv_at_zero_direct(&input, &spec)?;
                Ok((split - direct).abs() / split.abs().max(1.0))
            });
            cases.numeric(&format!("split_vs_direct/{a}/b{b:e}"), residual, 1e-8, "two forms of the split derivative");
        }
    }
    for a in &tuples {
        match limit_sweep(a, &DEFAULT_B_GRID, &spec, config.exec) {
            Ok(sweep) => {
                cases.exact(
                    &format!("limit_sweep/{a}/monotone"),
                    Ok(sweep.residuals_strictly_decreasing()),
                    format!("residuals {:?}", sweep.residuals()),
                );
                cases.numeric(
                    &format!("limit_sweep/{a}/extrapolation"),
                    Ok((sweep.extrapolated_limit - sweep.target).abs()),
                    1e-4,
                    format!("limit {} vs target {}", sweep.extrapolated_limit, sweep.target),
                );
            }
            Err(e) => cases.list.push(Case::failed(cases.name(&format!("limit_sweep/{a}")), &e)),
        }
    }
    for (label, t_flat) in [("1_over_4pi", 1.0 / (4.0 * PI)), ("1", 1.0)] {
        let residual = triple_crosscheck_n2(t_flat, &spec, config.exec).map(|c| c.max_discrepancy);
        cases.numeric(&format!("triple_crosscheck/T{label}"), residual, 1e-4, "closed form, explicit sum, sweep");
    }
    cases.list
}

/// The tuples of the limit checks: `(−1)`, `(−1, −2)`, `(−1/2, −3)`.
pub fn sweep_tuples() -> Vec<NegativeTuple> {
    vec![
        NegativeTuple::from_ints(&[-1]).expect("negative"),
        NegativeTuple::from_ints(&[-1, -2]).expect("negative"),
        NegativeTuple::new(vec![rat(-1, 2), int(-3)]).expect("negative"),
    ]
}

fn finite_difference(f: impl Fn(f64) -> Result<f64>, x: f64, step: f64) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let d = central_derivative(
        |s| {
            f(s).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            })
        },
        x,
        step,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => d,
    }
}

/// Samples per boundedness probe.
pub const PROBE_SAMPLES: usize = 10_000;

/// The `x` choices of the boundedness probe in `C^n`: zero, the negative
/// direction `e_n`, and `e_1 + e_n`.
pub fn probe_vectors(n: usize) -> Vec<(&'static str, AmbientVector)> {
    let mut negative = vec![0.0; n];
    negative[n - 1] = 1.0;
    let mut mixed = negative.clone();
    mixed[0] = 1.0;
    vec![
        ("zero", AmbientVector::zero(n).expect("n >= 2")),
        ("negative", AmbientVector::from_real(&negative).expect("n >= 2")),
        ("mixed", AmbientVector::from_real(&mixed).expect("n >= 2")),
    ]
}

/// Probe maxima at radius caps 0.99 and 0.999, on the same samples.
pub fn probe_growth(x: &AmbientVector, samples: usize, seed: u64, exec: Execution) -> Result<(f64, f64)> {
    let low = boundedness_probe(x, samples, seed, 0.99, exec)?;
    let high = boundedness_probe(x, samples, seed, 0.999, exec)?;
    Ok((low, high))
}

fn geometry_suite(config: &VerifyConfig) -> Vec<Case> {
    let mut cases = Cases::new("geometry", config.tol_scale);
    let spec = QuadratureSpec::default();
    for t in [0.25, 1.0, 4.0, -0.25, -1.0, -4.0] {
        let outcome = integral_xi_c1_n2(t, &spec).and_then(|v| Ok((v, closed_form_deriv(t)?)));
        let (residual, tolerance) = match outcome {
            Ok((v, closed)) if t > 0.0 => (Ok((v - closed).abs()), 1e-6 * closed.abs().max(1.0)),
            Ok((v, closed)) => (Ok((v - closed).abs()), 1e-9),
            Err(e) => (Err(e), 1e-6),
        };
        cases.numeric(&format!("disc_integral_vs_closed_form/T{t}"), residual, tolerance, "int_D xi c_1");
    }
    let residual = chern_density_n2(&BallPoint::origin(1)).map(|c| (c + 1.0 / PI).abs());
    cases.numeric("chern_density/origin", residual, 1e-15, "-1/pi");
    let residual = (|| -> Result<f64> {
        let x = AmbientVector::from_real(&[0.0, 1e-4])?;
        Ok((km_form_coefficient(&x, &BallPoint::origin(1), 0, 0)?.re + 1.0 / PI).abs())
    })();
    cases.numeric("km_limit_to_chern/origin", residual, 1e-3, "x = 1e-4 e_2, z = 0");
    let residual = (|| -> Result<f64> {
        let x = AmbientVector::from_real(&[0.0, 1.0])?;
        let c = km_form_coefficient(&x, &BallPoint::origin(1), 0, 0)?.re;
        let h = 1e-4;
        let xi = |re: f64, im: f64| green_xi(&x, &BallPoint::new(vec![num_complex::Complex64::new(re, im)])?);
        let lap = (xi(h, 0.0)? + xi(-h, 0.0)? + xi(0.0, h)? + xi(0.0, -h)? - 4.0 * xi(0.0, 0.0)?) / (h * h);
        Ok((c - lap / (4.0 * PI)).abs() / c.abs())
    })();
    cases.numeric("km_vs_finite_difference/e2_origin", residual, 1e-4, "relative, step 1e-4");
    for n in [2usize, 3] {
        for (label, x) in probe_vectors(n) {
            let residual = probe_growth(&x, PROBE_SAMPLES, config.seed, config.exec).map(|(low, high)| high / low - 1.0);
            cases.numeric(
                &format!("boundedness/n{n}/{label}"),
                residual,
                0.05,
                format!("{PROBE_SAMPLES} samples, growth of the max from cap 0.99 to 0.999"),
            );
        }
    }
    cases.list
}

/// Parses `start:factor:count` or a comma-separated list.
pub fn parse_b_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("malformed b grid {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, factor, count] => {
            // exact rational powers, rounded once, so -1e-1:0.1:4 gives -1e-4 exactly
            let start = parse_ratio(start).map_err(|_| bad())?;
            let factor = parse_ratio(factor).map_err(|_| bad())?;
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            let mut b = start;
            let mut grid = Vec::with_capacity(count);
            for _ in 0..count {
                grid.push(to_f64(&b));
                b *= &factor;
            }
            grid
        }
        [list] => list
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|b| !(*b < 0.0 && b.is_finite())) {
        return Err(Error::InvalidInput(format!("b grid must be non-empty and negative (got {grid:?})")));
    }
    Ok(grid)
}

/// `b` sorted by `|b|` descending.
pub fn sorted_grid(mut grid: Vec<f64>) -> Vec<f64> {
    grid.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
    grid
}

pub const SWEEP_HEADER: [&str; 6] = ["b", "split_deriv", "ei_b", "combination", "target", "residual"];

fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `b,split_deriv,ei_b,combination,target,residual` and
/// values at 17 significant digits.
pub fn write_sweep_csv<W: Write>(sweep: &LimitSweepResult, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("writing CSV: {e}"));
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SWEEP_HEADER).map_err(io)?;
    for row in &sweep.rows {
        writer
            .write_record([row.b, row.split_deriv, row.ei_b, row.combination, row.target, row.residual].map(sig17))
            .map_err(io)?;
    }
    writer.flush().map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn run_sweep(a: &NegativeTuple, grid: Vec<f64>, exec: Execution) -> Result<LimitSweepResult> {
    limit_sweep(a, &sorted_grid(grid), &QuadratureSpec::default(), exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum EvalFn {
    Ei,
    GammaM,
    F,
    H,
    D,
    WhittakerN2,
    GreenIntegral,
    DerivBeta,
}

impl EvalFn {
    fn name(self) -> &'static str {
        match self {
            EvalFn::Ei => "ei",
            EvalFn::GammaM => "gamma_m",
            EvalFn::F => "f",
            EvalFn::H => "h",
            EvalFn::D => "d",
            EvalFn::WhittakerN2 => "whittaker_n2",
            EvalFn::GreenIntegral => "green_integral",
            EvalFn::DerivBeta => "deriv_beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum HMode {
    RationalFactor,
    WithExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MethodArg {
    DeltaBased,
    ExplicitSum,
}

/// Raw flag values for `eval`; which ones are required depends on the
/// function.
#[derive(Debug, Clone, Default)]
pub struct EvalParams {
    pub x: Option<String>,
    pub a: Option<String>,
    pub t: Option<f64>,
    pub s: Option<f64>,
    pub m: Option<usize>,
    pub mode: Option<HMode>,
    pub method: Option<MethodArg>,
}

/// Why `eval` did not produce a value.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalFailure {
    /// Missing or malformed flags (exit 2).
    Usage(String),
    /// The function itself failed (exit 1).
    Evaluation(Value),
}

impl EvalParams {
    fn json(&self) -> Value {
        let mut map = Map::new();
        if let Some(x) = &self.x {
            map.insert("x".into(), json!(x));
        }
        if let Some(a) = &self.a {
            map.insert("a".into(), json!(a));
        }
        if let Some(t) = self.t {
            map.insert("T".into(), json!(t));
        }
        if let Some(s) = self.s {
            map.insert("s".into(), json!(s));
        }
        if let Some(m) = self.m {
            map.insert("m".into(), json!(m));
        }
        if let Some(mode) = self.mode {
            map.insert("mode".into(), json!(match mode {
                HMode::RationalFactor => "rational_factor",
                HMode::WithExp => "with_exp",
            }));
        }
        if let Some(method) = self.method {
            map.insert("method".into(), json!(match method {
                MethodArg::DeltaBased => "delta_based",
                MethodArg::ExplicitSum => "explicit_sum",
            }));
        }
        Value::Object(map)
    }
}

fn need<T: Clone>(value: &Option<T>, flag: &str, func: EvalFn) -> std::result::Result<T, EvalFailure> {
    value
        .clone()
        .ok_or_else(|| EvalFailure::Usage(format!("{} needs --{flag}", func.name())))
}

fn usage(e: Error) -> EvalFailure {
    EvalFailure::Usage(e.to_string())
}

/// Evaluates one function and returns the JSON object
/// `{fn, params, value, error_estimate?}`.
pub fn run_eval(func: EvalFn, params: &EvalParams) -> std::result::Result<Value, EvalFailure> {
    let spec = QuadratureSpec::default();
    let tuple = || -> std::result::Result<NegativeTuple, EvalFailure> {
        NegativeTuple::parse_csv(&need(&params.a, "a", func)?).map_err(usage)
    };
    let rational_x = || -> std::result::Result<BigRational, EvalFailure> {
        parse_ratio(&need(&params.x, "x", func)?).map_err(usage)
    };
    let real_x = || -> std::result::Result<f64, EvalFailure> {
        let text = need(&params.x, "x", func)?;
        text.trim()
            .parse::<f64>()
            .or_else(|_| parse_ratio(&text).map(|q| to_f64(&q)))
            .map_err(|_| EvalFailure::Usage(format!("--x is not a number: {text:?}")))
    };
    let mut error_estimate = None;
    let value: Result<Value> = match func {
        EvalFn::Ei => ei(real_x()?).map(|v| json!(v)),
        EvalFn::GammaM => gamma_m(need(&params.m, "m", func)?, need(&params.s, "s", func)?).map(|v| json!(v)),
        EvalFn::F => f_m(&tuple()?, &rational_x()?).map(|v| json!(format_ratio(&v))),
        EvalFn::H => {
            let a = tuple()?;
            match params.mode.unwrap_or(HMode::RationalFactor) {
                HMode::RationalFactor => h_m_rational_factor(&a, &rational_x()?).map(|v| json!(format_ratio(&v))),
                HMode::WithExp => {
                    let x = real_x()?;
                    if a.entries().iter().any(|ai| to_f64(ai) + x == 0.0) {
                        Err(Error::PoleHit {
                            index: 1 + a.entries().iter().position(|ai| to_f64(ai) + x == 0.0).unwrap_or(0),
                        })
                    } else {
                        Ok(json!(FloatHelpers::new(&a).h_with_exp(x)))
                    }
                }
            }
        }
        EvalFn::D => Ok(json!(format_ratio(&d_m(&tuple()?)))),
        EvalFn::WhittakerN2 => w_star_n2(need(&params.t, "T", func)?, need(&params.s, "s", func)?, &spec).map(|v| json!(v)),
        EvalFn::GreenIntegral => integral_xi_c1_n2_detailed(need(&params.t, "T", func)?, &spec).map(|r| {
            error_estimate = Some(r.error_estimate);
            json!(r.value)
        }),
        EvalFn::DerivBeta => {
            let method = match params.method.unwrap_or(MethodArg::ExplicitSum) {
                MethodArg::DeltaBased => DerivMethod::DeltaBased,
                MethodArg::ExplicitSum => DerivMethod::ExplicitSum,
            };
            deriv_beta_at_zero(&tuple()?, method).map(|v| json!(format_ratio(&v)))
        }
    };
    let mut out = Map::new();
    out.insert("fn".into(), json!(func.name()));
    out.insert("params".into(), params.json());
    match value {
        Ok(v) => {
            out.insert("value".into(), v);
            if let Some(e) = error_estimate {
                out.insert("error_estimate".into(), json!(e));
            }
            Ok(Value::Object(out))
        }
        Err(e) => {
            out.insert("error".into(), json!(e.to_string()));
            Err(EvalFailure::Evaluation(Value::Object(out)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_b_grid("-1e-1:0.1:4").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g, vec![-1e-1, -1e-2, -1e-3, -1e-4]);
        assert_eq!(parse_b_grid("-0.5,-0.25").unwrap(), vec![-0.5, -0.25]);
        assert!(parse_b_grid("0.1:0.1:3").is_err());
        assert!(parse_b_grid("-1:x:3").is_err());
        assert_eq!(sorted_grid(vec![-0.01, -0.1]), vec![-0.1, -0.01]);
    }

    #[test]
    fn exact_cases_ignore_tol_scale() {
        let mut cases = Cases::new("t", 1e-9);
        cases.exact("e", Ok(true), "");
        cases.numeric("n", Ok(1e-12), 1e-6, "");
        assert_eq!(cases.list[0].status, Status::Pass);
        assert_eq!(cases.list[0].residual, None);
        assert_eq!(cases.list[1].status, Status::Fail);
        assert_eq!(cases.list[1].tolerance, Some(1e-6 * 1e-9));
    }

    #[test]
    fn eval_examples() {
        let v = run_eval(EvalFn::Ei, &EvalParams { x: Some("-1".into()), ..Default::default() }).unwrap();
        assert!((v["value"].as_f64().unwrap() + 0.219_383_934_395_520_3).abs() < 1e-14);
        let v = run_eval(
            EvalFn::F,
            &EvalParams { a: Some("-1,-2".into()), x: Some("0".into()), ..Default::default() },
        )
        .unwrap();
        assert_eq!(v["value"], json!("1/1"));
        let err = run_eval(EvalFn::F, &EvalParams { a: Some("-1".into()), x: Some("1".into()), ..Default::default() });
        assert!(matches!(err, Err(EvalFailure::Evaluation(_))));
        let err = run_eval(EvalFn::F, &EvalParams { a: Some("-1".into()), ..Default::default() });
        assert!(matches!(err, Err(EvalFailure::Usage(_))));
    }
}
