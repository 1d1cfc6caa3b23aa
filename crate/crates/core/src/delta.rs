//! The determinant differential operator `Δ = det(∂/∂z_{j,k})` applied to
//! `e^{tr(uz)} det(z)^s` at a diagonal positive point `z_0`.
//!
//! [`delta_formula`] evaluates the closed combinatorial form through minors;
//! [`delta_bruteforce`] differentiates symbolically and serves as its oracle.
//! Both return the value with the prefactor `e^{tr(u z_0)} det(z_0)^s`
//! stripped, so everything stays in exact rationals.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::rational::{int, rat};

/// Square matrix with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix must be at least 1x1".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Ok(RationalMatrix { dim, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn zero(dim: usize) -> Self {
        RationalMatrix { dim, entries: vec![BigRational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![BigRational::one(); dim])
    }

    pub fn diagonal(diag: &[BigRational]) -> Self {
        let mut m = Self::zero(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * m.dim + i] = d.clone();
        }
        m
    }

    /// Entries `p/q` with `|p| ≤ 9`, `1 ≤ q ≤ 5`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        let entries = (0..dim * dim)
            .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=5)))
            .collect();
        RationalMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.dim + col]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c).clone()).collect())
            .collect()
    }

    pub fn determinant(&self) -> BigRational {
        determinant(self.submatrix(&(0..self.dim).collect::<Vec<_>>(), &(0..self.dim).collect::<Vec<_>>()))
    }
}

/// Fraction-exact Gaussian elimination; the empty matrix has determinant 1.
pub fn determinant(mut rows: Vec<Vec<BigRational>>) -> BigRational {
    let n = rows.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let p = rows[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &p;
            for c in col..n {
                let delta = &factor * &rows[col][c];
                rows[r][c] -= delta;
            }
        }
    }
    det
}

/// Diagonal matrix with strictly positive entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalPositive {
    diag: Vec<BigRational>,
}

impl DiagonalPositive {
    pub fn new(diag: Vec<BigRational>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidInput("diagonal must be non-empty".into()));
        }
        if let Some(bad) = diag.iter().find(|d| !d.is_positive()) {
            return Err(Error::InvalidInput(format!("diagonal entries must be positive (got {bad})")));
        }
        Ok(DiagonalPositive { diag })
    }

    pub fn identity(dim: usize) -> Self {
        DiagonalPositive { diag: vec![BigRational::one(); dim] }
    }

    /// Entries `p/q` with `1 ≤ p ≤ 7`, `1 ≤ q ≤ 4`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        let diag = (0..dim)
            .map(|_| rat(rng.random_range(1..=7), rng.random_range(1..=4)))
            .collect();
        DiagonalPositive { diag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.diag
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        RationalMatrix::diagonal(&self.diag)
    }
}

fn check_index_sets(dim: usize, rows: &[usize], cols: &[usize]) -> Result<()> {
    if rows.len() != cols.len() {
        return Err(Error::InvalidInput(format!(
            "index sets differ in size ({} vs {})",
            rows.len(),
            cols.len()
        )));
    }
    if let Some(&index) = rows.iter().chain(cols).find(|&&i| i >= dim) {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    Ok(())
}

/// Determinant of the submatrix keeping rows `rows` and columns `cols`
/// (0-based); empty sets give 1.
pub fn minor_keep(u: &RationalMatrix, rows: &[usize], cols: &[usize]) -> Result<BigRational> {
    check_index_sets(u.dim, rows, cols)?;
    Ok(determinant(u.submatrix(rows, cols)))
}

/// Determinant of the submatrix left after discarding rows `rows` and
/// columns `cols` (0-based); discarding everything gives 1.
pub fn minor_drop(u: &RationalMatrix, rows: &[usize], cols: &[usize]) -> Result<BigRational> {
    check_index_sets(u.dim, rows, cols)?;
    let keep_rows: Vec<usize> = (0..u.dim).filter(|i| !rows.contains(i)).collect();
    let keep_cols: Vec<usize> = (0..u.dim).filter(|i| !cols.contains(i)).collect();
    Ok(determinant(u.submatrix(&keep_rows, &keep_cols)))
}

/// `∏_{k=1}^{t} (s + k − 1)`
pub fn rising_factorial(s: &BigRational, t: usize) -> BigRational {
    (1..=t as i64).fold(BigRational::one(), |acc, k| acc * (s + int(k - 1)))
}

/// `Σ_{J} (∏_{k=1}^{|J|} (s + k − 1)) |z_{0,J,J}|^{−1} |u^{J,J}|`, summed over
/// all subsets `J ⊆ {1, …, m}`.
pub fn delta_formula(u: &RationalMatrix, z0: &DiagonalPositive, s: &BigRational) -> Result<BigRational> {
    let m = u.dim;
    if z0.dim() != m {
        return Err(Error::InvalidInput(format!("u is {m}x{m} but z0 has dimension {}", z0.dim())));
    }
    let mut total = BigRational::zero();
    for mask in 0u32..(1 << m) {
        let j: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let kept = j.iter().fold(BigRational::one(), |acc, &i| acc * &z0.diag[i]);
        total += rising_factorial(s, j.len()) * minor_drop(u, &j, &j)? / kept;
    }
    Ok(total)
}

/// `P(z) e^{tr(uz)}` with `P` a polynomial in the `m²` independent entries
/// `z_{j,k}` (variable index `j·m + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolynomial {
    dim: usize,
    exponent: RationalMatrix,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl ExpPolynomial {
    /// `det(z)^s e^{tr(uz)}`.
    pub fn det_power(u: &RationalMatrix, s: u32) -> Self {
        let m = u.dim;
        let mut det_terms = BTreeMap::new();
        for (perm, sign) in permutations(m) {
            let mut degrees = vec![0u32; m * m];
            for (j, &k) in perm.iter().enumerate() {
                degrees[j * m + k] += 1;
            }
            det_terms.insert(degrees, int(sign));
        }
        let mut terms = BTreeMap::from([(vec![0u32; m * m], BigRational::one())]);
        for _ in 0..s {
            terms = multiply(&terms, &det_terms);
        }
        ExpPolynomial { dim: m, exponent: u.clone(), terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `∂/∂z_{j,k}`, using `∂ tr(uz) / ∂z_{j,k} = u_{k,j}`.
    pub fn differentiate(&self, j: usize, k: usize) -> Self {
        let var = j * self.dim + k;
        let factor = self.exponent.get(k, j);
        let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (degrees, coeff) in &self.terms {
            if degrees[var] > 0 {
                let mut lowered = degrees.clone();
                lowered[var] -= 1;
                *out.entry(lowered).or_insert_with(BigRational::zero) += coeff * int(degrees[var] as i64);
            }
            if !factor.is_zero() {
                *out.entry(degrees.clone()).or_insert_with(BigRational::zero) += coeff * factor;
            }
        }
        out.retain(|_, c| !c.is_zero());
        ExpPolynomial { dim: self.dim, exponent: self.exponent.clone(), terms: out }
    }

    /// `P(z_0)` for diagonal `z_0`; the exponential factor is left out.
    pub fn polynomial_at_diagonal(&self, z0: &DiagonalPositive) -> BigRational {
        let m = self.dim;
        self.terms
            .iter()
            .filter(|(degrees, _)| {
                degrees.iter().enumerate().all(|(v, &d)| d == 0 || v / m == v % m)
            })
            .map(|(degrees, coeff)| {
                (0..m).fold(coeff.clone(), |acc, i| {
                    acc * num_traits::pow(z0.diag[i].clone(), degrees[i * m + i] as usize)
                })
            })
            .sum()
    }
}

fn multiply(
    a: &BTreeMap<Vec<u32>, BigRational>,
    b: &BTreeMap<Vec<u32>, BigRational>,
) -> BTreeMap<Vec<u32>, BigRational> {
    let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (da, ca) in a {
        for (db, cb) in b {
            let degrees: Vec<u32> = da.iter().zip(db).map(|(x, y)| x + y).collect();
            *out.entry(degrees).or_insert_with(BigRational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// All permutations of `0..m` with their signs.
fn permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; m], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

pub const BRUTEFORCE_MAX_DIM: usize = 3;
pub const BRUTEFORCE_MAX_S: u32 = 6;

/// Symbolic evaluation of `Δ(e^{tr(uz)} det(z)^s)` at `z_0`, divided by
/// `e^{tr(u z_0)} det(z_0)^s`. The `m!` permutation terms of `Δ` are spread
/// over `exec`.
pub fn delta_bruteforce(u: &RationalMatrix, z0: &DiagonalPositive, s: u32, exec: Execution) -> Result<BigRational> {
    let m = u.dim;
    if m > BRUTEFORCE_MAX_DIM || s > BRUTEFORCE_MAX_S {
        return Err(Error::BudgetExceeded(format!(
            "brute-force delta supports m <= {BRUTEFORCE_MAX_DIM}, s <= {BRUTEFORCE_MAX_S} (got m = {m}, s = {s})"
        )));
    }
    if z0.dim() != m {
        return Err(Error::InvalidInput(format!("u is {m}x{m} but z0 has dimension {}", z0.dim())));
    }
    let base = ExpPolynomial::det_power(u, s);
    let perms = permutations(m);
    let parts = exec.map(&perms, |(perm, sign)| {
        let derived = perm
            .iter()
            .enumerate()
            .fold(base.clone(), |p, (j, &k)| p.differentiate(j, k));
        derived.polynomial_at_diagonal(z0) * int(*sign)
    });
    let total: BigRational = parts.into_iter().sum();
    let det_z0 = z0.diag.iter().fold(BigRational::one(), |acc, d| acc * d);
    Ok(total / num_traits::pow(det_z0, s as usize))
}

/// `N_{s,t} = ∏_{k=1}^{t} (s + k − 1)`
pub fn n_st_closed(s: u64, t: u64) -> Result<u128> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be >= 1".into()));
    }
    (1..=t).try_fold(1u128, |acc, k| acc.checked_mul((s + k - 1) as u128))
        .ok_or_else(|| Error::BudgetExceeded(format!("N_{{{s},{t}}} overflows u128")))
}

pub const ENUMERATE_MAX: u64 = 5;

/// Counts ordered assignments of a `t`-set into `s` possibly-empty blocks,
/// each block weighted by the number of its orderings `|J_i|!`.
pub fn n_st_enumerate(s: u64, t: u64) -> Result<u128> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be >= 1".into()));
    }
    if s > ENUMERATE_MAX || t > ENUMERATE_MAX {
        return Err(Error::BudgetExceeded(format!(
            "enumeration supports s, t <= {ENUMERATE_MAX} (got s = {s}, t = {t})"
        )));
    }
    let factorial = |n: usize| (1..=n as u128).product::<u128>();
    let assignments = (s as u128).pow(t as u32);
    let mut total = 0u128;
    for code in 0..assignments {
        let mut sizes = vec![0usize; s as usize];
        let mut rest = code;
        for _ in 0..t {
            sizes[(rest % s as u128) as usize] += 1;
            rest /= s as u128;
        }
        total += sizes.iter().map(|&n| factorial(n)).product::<u128>();
    }
    Ok(total)
}

/// Both sides of the extension-to-all-`s` check: `delta_formula` at `s`
/// directly, and the degree-`m` polynomial through its values at
/// `s = 1, …, m + 1` evaluated at `s`.
pub fn polynomial_extension_sides(
    u: &RationalMatrix,
    z0: &DiagonalPositive,
    s: &BigRational,
) -> Result<(BigRational, BigRational)> {
    use crate::numerics::rational::{interpolating_polynomial, poly_eval};
    let points = (1..=u.dim as i64 + 1)
        .map(|k| Ok((int(k), delta_formula(u, z0, &int(k))?)))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = interpolating_polynomial(&points)?;
    Ok((delta_formula(u, z0, s)?, poly_eval(&coeffs, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m22() -> RationalMatrix {
        RationalMatrix::from_ints(&[&[1, 2], &[3, 4]]).unwrap()
    }

    #[test]
    fn minors() {
        let id3 = RationalMatrix::identity(3);
        assert_eq!(minor_keep(&id3, &[0, 2], &[0, 2]).unwrap(), int(1));
        assert_eq!(minor_keep(&m22(), &[0, 1], &[0, 1]).unwrap(), int(-2));
        assert_eq!(minor_keep(&m22(), &[], &[]).unwrap(), int(1));
        assert_eq!(minor_drop(&m22(), &[0], &[0]).unwrap(), int(4));
        assert_eq!(minor_drop(&m22(), &[0, 1], &[0, 1]).unwrap(), int(1));
        let d = RationalMatrix::diagonal(&[int(5), int(6), int(7)]);
        assert_eq!(minor_drop(&d, &[1], &[1]).unwrap(), int(35));
        assert_eq!(minor_keep(&m22(), &[2], &[0]), Err(Error::IndexOutOfRange { index: 2, dim: 2 }));
        assert!(minor_drop(&m22(), &[0], &[]).is_err());
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = RationalMatrix::from_ints(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]).unwrap();
        assert_eq!(m.determinant(), int(-2));
        let singular = RationalMatrix::from_ints(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(singular.determinant(), int(0));
    }

    #[test]
    fn formula_examples() {
        let u = RationalMatrix::from_ints(&[&[2]]).unwrap();
        let z0 = DiagonalPositive::identity(1);
        assert_eq!(delta_formula(&u, &z0, &int(1)).unwrap(), int(3));
        assert_eq!(delta_formula(&m22(), &DiagonalPositive::identity(2), &int(0)).unwrap(), int(-2));
        assert_eq!(
            delta_formula(&RationalMatrix::zero(2), &DiagonalPositive::identity(2), &int(1)).unwrap(),
            int(2)
        );
    }

    #[test]
    fn bruteforce_examples() {
        let u = RationalMatrix::from_ints(&[&[2]]).unwrap();
        let z1 = DiagonalPositive::identity(1);
        let z2 = DiagonalPositive::identity(2);
        assert_eq!(delta_bruteforce(&u, &z1, 1, Execution::Sequential).unwrap(), int(3));
        let id = RationalMatrix::identity(2);
        assert_eq!(
            delta_bruteforce(&id, &z2, 1, Execution::Sequential).unwrap(),
            delta_formula(&id, &z2, &int(1)).unwrap()
        );
        assert_eq!(delta_bruteforce(&m22(), &z2, 0, Execution::Parallel).unwrap(), int(-2));
        assert!(matches!(
            delta_bruteforce(&RationalMatrix::identity(4), &DiagonalPositive::identity(4), 1, Execution::Sequential),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(delta_bruteforce(&u, &z1, 7, Execution::Sequential), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn formula_matches_bruteforce_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=3 {
            for s in 0..=3u32 {
                for _ in 0..4 {
                    let u = RationalMatrix::random(&mut rng, m);
                    let z0 = DiagonalPositive::random(&mut rng, m);
                    assert_eq!(
                        delta_formula(&u, &z0, &int(s as i64)).unwrap(),
                        delta_bruteforce(&u, &z0, s, Execution::Sequential).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn execution_modes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = RationalMatrix::random(&mut rng, 3);
        let z0 = DiagonalPositive::random(&mut rng, 3);
        assert_eq!(
            delta_bruteforce(&u, &z0, 2, Execution::Parallel).unwrap(),
            delta_bruteforce(&u, &z0, 2, Execution::Sequential).unwrap()
        );
    }

    #[test]
    fn polynomial_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in 1..=3 {
            let u = RationalMatrix::random(&mut rng, m);
            let z0 = DiagonalPositive::random(&mut rng, m);
            let (direct, interpolated) = polynomial_extension_sides(&u, &z0, &rat(-7, 3)).unwrap();
            assert_eq!(direct, interpolated);
        }
    }

    #[test]
    fn diagonal_u_at_identity() {
        // Σ_t (s)_t e_{m−t}(u): the off-diagonal derivatives of det(z)^s
        // turn s^t into the rising factorial, so no product over j
        let diag = [rat(3, 2), int(-1), rat(2, 5)];
        let u = RationalMatrix::diagonal(&diag);
        let z0 = DiagonalPositive::identity(3);
        let s = rat(5, 7);
        let mut e = vec![BigRational::zero(); 4];
        for mask in 0u32..8 {
            let p = (0..3).filter(|i| mask >> i & 1 == 1).fold(BigRational::one(), |acc, i| acc * &diag[i]);
            e[mask.count_ones() as usize] += p;
        }
        let expected: BigRational = (0..=3).map(|t| rising_factorial(&s, t) * &e[3 - t]).sum();
        assert_eq!(delta_formula(&u, &z0, &s).unwrap(), expected);
        let product = diag.iter().fold(BigRational::one(), |acc, d| acc * (d + &s));
        assert_ne!(delta_formula(&u, &z0, &s).unwrap(), product);
        // m = 1 and s = 0 do factor
        assert_eq!(delta_formula(&u, &z0, &int(0)).unwrap(), u.determinant());
        let one = RationalMatrix::diagonal(&diag[..1]);
        assert_eq!(delta_formula(&one, &DiagonalPositive::identity(1), &s).unwrap(), &diag[0] + &s);
        // the symbolic oracle agrees with the rising-factorial form
        assert_eq!(
            delta_bruteforce(&u, &z0, 2, Execution::Sequential).unwrap(),
            (0..=3).map(|t| rising_factorial(&int(2), t) * &e[3 - t]).sum::<BigRational>()
        );
    }

    #[test]
    fn n_st_examples() {
        assert_eq!(n_st_closed(1, 4).unwrap(), 24);
        assert_eq!(n_st_closed(7, 0).unwrap(), 1);
        assert_eq!(n_st_closed(2, 3).unwrap(), 24);
        assert_eq!(n_st_enumerate(1, 3).unwrap(), 6);
        assert_eq!(n_st_enumerate(3, 0).unwrap(), 1);
        assert_eq!(n_st_enumerate(2, 2).unwrap(), 6);
        assert!(matches!(n_st_enumerate(6, 1), Err(Error::BudgetExceeded(_))));
        for s in 1..=5 {
            for t in 0..=5 {
                assert_eq!(n_st_closed(s, t).unwrap(), n_st_enumerate(s, t).unwrap());
            }
        }
    }

    #[test]
    fn validation() {
        assert!(DiagonalPositive::new(vec![int(1), int(0)]).is_err());
        assert!(RationalMatrix::new(vec![vec![int(1), int(2)]]).is_err());
        assert!(delta_formula(&m22(), &DiagonalPositive::identity(3), &int(1)).is_err());
    }
}
