//! The helper family `d_m, q_m, r_m, u_m, f_m, h_m` attached to a tuple of
//! negative rationals `(a_1, …, a_m)`, in exact arithmetic, together with
//! verifiers for the identities relating them.
//!
//! All subset sums run over bitmasks of `{1, …, m}`; `m` is capped at
//! [`NegativeTuple::MAX_LEN`].

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::central_derivative;
use crate::numerics::rational::{factorial, int, parse_ratio, rat, to_f64};

/// `(a_1, …, a_m)` with every `a_i < 0`; the empty tuple is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NegativeTuple {
    entries: Vec<BigRational>,
}

impl NegativeTuple {
    pub const MAX_LEN: usize = 20;

    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() > Self::MAX_LEN {
            return Err(Error::BudgetExceeded(format!(
                "tuple length {} exceeds {}",
                entries.len(),
                Self::MAX_LEN
            )));
        }
        if let Some(bad) = entries.iter().find(|a| !a.is_negative()) {
            return Err(Error::InvalidInput(format!("tuple entries must be negative (got {bad})")));
        }
        Ok(NegativeTuple { entries })
    }

    pub fn empty() -> Self {
        NegativeTuple::default()
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    /// Comma-separated rationals, e.g. `-1,-2` or `-1/2,-3`. Empty text is the
    /// empty tuple.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty());
        }
        Self::new(text.split(',').map(parse_ratio).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn appended(&self, a_next: BigRational) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.push(a_next);
        Self::new(entries)
    }

    /// `det(a) = ∏ a_i` for the diagonal matrix `diag(a)`.
    pub fn det(&self) -> BigRational {
        self.entries.iter().fold(BigRational::one(), |acc, a| acc * a)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(to_f64).collect()
    }

    fn masks(&self) -> std::ops::Range<u32> {
        0..(1u32 << self.len())
    }

    fn subset_product(&self, mask: u32) -> BigRational {
        self.entries
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(BigRational::one(), |acc, (_, a)| acc * a)
    }
}

impl std::fmt::Display for NegativeTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Elementary symmetric sums `e_0, …, e_m`, by subset enumeration.
pub fn elementary_symmetric(a: &NegativeTuple) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); a.len() + 1];
    for mask in a.masks() {
        e[mask.count_ones() as usize] += a.subset_product(mask);
    }
    e
}

/// Reciprocals `(x + a_i)^{−1}`, or `PoleHit` at the first `x = −a_i`.
fn shifted_reciprocals(a: &NegativeTuple, x: &BigRational) -> Result<Vec<BigRational>> {
    a.entries
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            let s = x + ai;
            if s.is_zero() {
                Err(Error::PoleHit { index: i + 1 })
            } else {
                Ok(s.recip())
            }
        })
        .collect()
}

/// `d_m = Σ_{I} (m − |I|)! ∏_{i∈I} a_i`
pub fn d_m(a: &NegativeTuple) -> BigRational {
    let m = a.len();
    a.masks()
        .map(|mask| factorial(m - mask.count_ones() as usize) * a.subset_product(mask))
        .sum()
}

/// `q_m(x) = ∏ (x + a_i)^{−1}`
pub fn q_m(a: &NegativeTuple, x: &BigRational) -> Result<BigRational> {
    Ok(shifted_reciprocals(a, x)?.into_iter().product())
}

/// `r_m(x) = 1 − Σ (x + a_i)^{−1}`
pub fn r_m(a: &NegativeTuple, x: &BigRational) -> Result<BigRational> {
    let recips = shifted_reciprocals(a, x)?;
    Ok(BigRational::one() - recips.into_iter().sum::<BigRational>())
}

/// `u_m(x) = Σ_I (m − |I|)! ∏_{i∈I} a_i (1 − Σ_{i∈I} (x + a_i)^{−1})`
pub fn u_m(a: &NegativeTuple, x: &BigRational) -> Result<BigRational> {
    let m = a.len();
    let recips = shifted_reciprocals(a, x)?;
    let mut total = BigRational::zero();
    for mask in a.masks() {
        let mut product = BigRational::one();
        let mut bracket = BigRational::one();
        for (i, ai) in a.entries.iter().enumerate() {
            if mask >> i & 1 == 1 {
                product *= ai;
                bracket -= &recips[i];
            }
        }
        total += factorial(m - mask.count_ones() as usize) * product * bracket;
    }
    Ok(total)
}

/// `f_m(x) = q_m(x) u_m(x)`
pub fn f_m(a: &NegativeTuple, x: &BigRational) -> Result<BigRational> {
    Ok(q_m(a, x)? * u_m(a, x)?)
}

/// `h_m(x) e^{−x} = q_m(x) Σ_{k=0}^{m−1} Σ_{t=0}^{k} (m−1−k)! e_t x^{k−t}`
pub fn h_m_rational_factor(a: &NegativeTuple, x: &BigRational) -> Result<BigRational> {
    let m = a.len();
    let q = q_m(a, x)?;
    if m == 0 {
        return Ok(BigRational::zero());
    }
    let e = elementary_symmetric(a);
    let mut powers = vec![BigRational::one()];
    for _ in 1..m {
        let next = powers.last().unwrap() * x;
        powers.push(next);
    }
    let mut sum = BigRational::zero();
    for k in 0..m {
        let weight = factorial(m - 1 - k);
        for t in 0..=k {
            sum += &weight * &e[t] * &powers[k - t];
        }
    }
    Ok(q * sum)
}

/// `h_m(0)` through the closed form
/// `det(a)^{−1} Σ_{|I| ≤ m−1} (m − 1 − |I|)! ∏_{i∈I} a_i`; zero for `m = 0`.
pub fn h_m_at_zero(a: &NegativeTuple) -> BigRational {
    let m = a.len();
    if m == 0 {
        return BigRational::zero();
    }
    let sum: BigRational = a
        .masks()
        .filter(|mask| (mask.count_ones() as usize) < m)
        .map(|mask| factorial(m - 1 - mask.count_ones() as usize) * a.subset_product(mask))
        .sum();
    sum / a.det()
}

/// Double-precision evaluation of `f_m` and `h_m` for quadrature and
/// finite differences.
#[derive(Debug, Clone)]
pub struct FloatHelpers {
    a: Vec<f64>,
    factorials: Vec<f64>,
    elementary: Vec<f64>,
}

impl FloatHelpers {
    pub fn new(a: &NegativeTuple) -> Self {
        let m = a.len();
        let factorials = (0..=m)
            .scan(1.0, |acc, k| {
                if k > 0 {
                    *acc *= k as f64;
                }
                Some(*acc)
            })
            .collect();
        FloatHelpers {
            a: a.to_f64(),
            factorials,
            elementary: elementary_symmetric(a).iter().map(to_f64).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self, x: f64) -> f64 {
        self.a.iter().map(|ai| 1.0 / (x + ai)).product()
    }

    pub fn f(&self, x: f64) -> f64 {
        let m = self.m();
        let recips: Vec<f64> = self.a.iter().map(|ai| 1.0 / (x + ai)).collect();
        let mut u = 0.0;
        for mask in 0u32..(1 << m) {
            let mut product = 1.0;
            let mut bracket = 1.0;
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    product *= self.a[i];
                    bracket -= recips[i];
                }
            }
            u += self.factorials[m - mask.count_ones() as usize] * product * bracket;
        }
        recips.iter().product::<f64>() * u
    }

    /// `h_m(x)` including the `e^x` factor.
    pub fn h_with_exp(&self, x: f64) -> f64 {
        let m = self.m();
        if m == 0 {
            return 0.0;
        }
        let mut sum = 0.0;
        for k in 0..m {
            let weight = self.factorials[m - 1 - k];
            for t in 0..=k {
                sum += weight * self.elementary[t] * x.powi((k - t) as i32);
            }
        }
        self.q(x) * x.exp() * sum
    }

    /// `(1 − f_m(x)) e^x / x`, the derivative of `h_m`.
    pub fn antiderivative_rhs(&self, x: f64) -> f64 {
        (1.0 - self.f(x)) * x.exp() / x
    }
}

/// Both sides of the telescoping step behind `f_m(0) = 1`:
///
/// `Σ_{|I|=t} (m−t)! ∏_{j∉I} a_j^{−1}` and
/// `Σ_{|I'|=t+1} (m−t−1)! ∏_{j∉I'} a_j^{−1} Σ_{i∈I'} a_i^{−1}`.
pub fn telescoping_sides(a: &NegativeTuple, t: usize) -> Result<(BigRational, BigRational)> {
    let m = a.len();
    if m == 0 || t >= m {
        return Err(Error::InvalidInput(format!("telescoping needs 0 <= t <= m - 1 (t = {t}, m = {m})")));
    }
    let inv: Vec<BigRational> = a.entries.iter().map(|x| x.recip()).collect();
    let complement_product = |mask: u32| -> BigRational {
        (0..m)
            .filter(|i| mask >> i & 1 == 0)
            .fold(BigRational::one(), |acc, i| acc * &inv[i])
    };
    let mut lhs = BigRational::zero();
    let mut rhs = BigRational::zero();
    for mask in a.masks() {
        let size = mask.count_ones() as usize;
        if size == t {
            lhs += factorial(m - t) * complement_product(mask);
        } else if size == t + 1 {
            let inner: BigRational = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inv[i].clone()).sum();
            rhs += factorial(m - t - 1) * complement_product(mask) * inner;
        }
    }
    Ok((lhs, rhs))
}

pub fn verify_telescoping(a: &NegativeTuple, t: usize) -> Result<bool> {
    let (lhs, rhs) = telescoping_sides(a, t)?;
    Ok(lhs == rhs)
}

fn check_next(a_next: &BigRational) -> Result<()> {
    if a_next.is_negative() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("a_next must be negative (got {a_next})")))
    }
}

/// `h_{m+1} e^{−x} = h_m e^{−x} + q_{m+1}(x) d_m`, where the `(m+1)`-tuple
/// appends `a_next`.
pub fn verify_h_recursion(a: &NegativeTuple, a_next: &BigRational, x: &BigRational) -> Result<bool> {
    check_next(a_next)?;
    let longer = a.appended(a_next.clone())?;
    let lhs = h_m_rational_factor(&longer, x)?;
    let rhs = h_m_rational_factor(a, x)? + q_m(&longer, x)? * d_m(a);
    Ok(lhs == rhs)
}

/// `(x + a_{m+1}) u_m(x) − u_{m+1}(x) = x r_{m+1}(x) d_m`
pub fn verify_u_identity(a: &NegativeTuple, a_next: &BigRational, x: &BigRational) -> Result<bool> {
    check_next(a_next)?;
    let longer = a.appended(a_next.clone())?;
    let lhs = (x + a_next) * u_m(a, x)? - u_m(&longer, x)?;
    let rhs = x * r_m(&longer, x)? * d_m(a);
    Ok(lhs == rhs)
}

/// `f_m(x) − f_{m+1}(x) = x q_{m+1}(x) r_{m+1}(x) d_m`
pub fn verify_f_step(a: &NegativeTuple, a_next: &BigRational, x: &BigRational) -> Result<bool> {
    check_next(a_next)?;
    let longer = a.appended(a_next.clone())?;
    let lhs = f_m(a, x)? - f_m(&longer, x)?;
    let rhs = x * q_m(&longer, x)? * r_m(&longer, x)? * d_m(a);
    Ok(lhs == rhs)
}

/// Largest relative gap between a finite-difference derivative of `h_m` and
/// `(1 − f_m(x)) e^x / x` over `grid`.
pub fn verify_antiderivative(a: &NegativeTuple, grid: &[f64], step: f64) -> Result<f64> {
    if let Some(&bad) = grid.iter().find(|&&x| !(x <= -0.01)) {
        return Err(Error::InvalidInput(format!("grid points must be <= -0.01 (got {bad})")));
    }
    let helpers = FloatHelpers::new(a);
    let mut worst: f64 = 0.0;
    for &x in grid {
        let numeric = central_derivative(|t| helpers.h_with_exp(t), x, step)?;
        let exact = helpers.antiderivative_rhs(x);
        worst = worst.max((numeric - exact).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

/// Random negative rational `−p/q` with `1 ≤ p ≤ 24`, `1 ≤ q ≤ 12`.
pub fn random_negative_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    rat(-rng.random_range(1..=24), rng.random_range(1..=12))
}

pub fn random_tuple<R: Rng + ?Sized>(rng: &mut R, m: usize) -> NegativeTuple {
    NegativeTuple::new((0..m).map(|_| random_negative_rational(rng)).collect())
        .expect("entries are negative by construction")
}

/// Random rational `x ∈ [−6, 6]` that avoids the poles `−a_i` of `a`.
pub fn random_regular_point<R: Rng + ?Sized>(rng: &mut R, a: &NegativeTuple) -> BigRational {
    loop {
        let x = rat(rng.random_range(-72..=72), rng.random_range(1..=12));
        if a.entries.iter().all(|ai| !(&x + ai).is_zero()) {
            return x;
        }
    }
}
