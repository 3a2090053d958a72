//! Singularity analysis for the capped tree families.
//!
//! Every family here has a square-root type dominant singularity `rho`, so
//! its coefficients behave like `amplitude * n^(-3/2) * rho^(-n)`.
//!
//! Ordered trees: `rho_k` is the smallest positive root of
//! `1 - 4x + 2^(k+1) x^(k+1)`, bracketed in `(1/4, 2/5)` for `k >= 2`.
//!
//! Unordered trees: `W_k = 1 - sqrt(1 - 2 phi_k(x))` with
//! `phi_k(x) = x - x^(k+1) + W_k(x^2)/2`. `W_k(x^2)` is replaced by its first
//! `m` exact coefficients and `phi_k(x) = 1/2` is solved numerically. The
//! truncation only sees the cap when `k < m`; for `k >= m` the truncated
//! series is indistinguishable from the unconstrained one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::counts::{self, Family};
use crate::error::{Error, Result};
use crate::real::Real;

/// `lambda / (2 sqrt(pi))` for all unordered trees, as published.
pub const WEDDERBURN_AMPLITUDE: &str = "0.3187766259";
/// Dominant singularity of the Wedderburn-Etherington series, as published.
pub const WEDDERBURN_RHO: &str = "0.40269750367";

/// Decimal digits to which the singularities are refined by default.
pub const DEFAULT_DIGITS: u32 = 60;
/// Largest precision the working arithmetic can honour.
pub const MAX_DIGITS: u32 = 70;

/// Step count of the scan that locates the first sign change of
/// `phi_k(x) - 1/2` on `(0, 1/2]`.
const SCAN_STEPS: usize = 2000;
const MAX_NEWTON_STEPS: usize = 200;

/// `amplitude * n^(-3/2) * rho^(-n)` together with the parameters it came from.
#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    pub family: Family,
    pub k: usize,
    /// Truncation order, unordered family only.
    pub m: Option<usize>,
    pub rho: Real,
    pub amplitude: Real,
}

impl AsymptoticModel {
    /// The asymptotic estimate of the size-`n` coefficient.
    pub fn estimate(&self, n: usize) -> Real {
        let n_real = Real::from_i64(n as i64);
        let n32 = &n_real * n_real.sqrt();
        &self.amplitude / n32 * self.rho.powi_neg(n)
    }
}

/// Polynomial with coefficients listed from degree 0 upward.
#[derive(Debug, Clone)]
struct Poly(Vec<Real>);

impl Poly {
    fn from_rationals(coeffs: &[BigRational]) -> Self {
        Poly(coeffs.iter().map(Real::from_ratio).collect())
    }

    fn eval(&self, x: &Real) -> Real {
        self.0.iter().rev().fold(Real::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Real::from_i64(i as i64))
                .collect(),
        )
    }
}

fn tolerance(digits: u32) -> Real {
    Real::parse(&format!("1e-{digits}")).expect("valid literal")
}

fn check_digits(digits: u32) -> Result<()> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::InvalidParameter(format!(
            "precision must be between 1 and {MAX_DIGITS} digits, got {digits}"
        )));
    }
    Ok(())
}

/// Root of `p` inside `[lo, hi]`, where `p(lo)` and `p(hi)` have opposite
/// signs: bisection down to a 1e-10 bracket, then Newton until the step drops
/// below `10^-digits`. Newton iterates leaving the bracket are rejected.
fn refine_root(p: &Poly, lo: Real, hi: Real, digits: u32) -> Result<Real> {
    let dp = p.derivative();
    let (mut lo, mut hi) = (lo, hi);
    let lo_negative = p.eval(&lo).is_negative();
    let coarse = tolerance(10);
    let two = Real::from_i64(2);
    let mut guard = 0;
    while &hi - &lo > coarse {
        let mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_negative() == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        guard += 1;
        if guard > 200 {
            return Err(Error::NoConvergence(
                "bisection did not shrink the bracket".into(),
            ));
        }
    }
    let tol = tolerance(digits);
    let mut x = (&lo + &hi) / &two;
    for _ in 0..MAX_NEWTON_STEPS {
        let slope = dp.eval(&x);
        if slope == Real::zero() {
            return Err(Error::NoConvergence("vanishing derivative".into()));
        }
        let step = p.eval(&x) / slope;
        let next = &x - &step;
        if next < lo || next > hi {
            return Err(Error::NoConvergence(
                "Newton iterate left the bracket".into(),
            ));
        }
        x = next;
        if step.abs() < tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(format!(
        "no {digits}-digit convergence after {MAX_NEWTON_STEPS} Newton steps"
    )))
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// `1 - 4x + 2^(k+1) x^(k+1)`.
fn ordered_singularity_poly(k: usize) -> Poly {
    let mut c = vec![BigRational::zero(); k + 2];
    c[0] = BigRational::one();
    c[1] = BigRational::from_integer((-4).into());
    c[k + 1] = BigRational::from_integer(pow2(k + 1));
    Poly::from_rationals(&c)
}

fn check_ordered_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "ordered singularity needs k >= 2, got {k}"
        )));
    }
    Ok(())
}

/// Dominant singularity of the ordered family with gamma at most `k`, to
/// `digits` decimal digits.
pub fn rho_ordered(k: usize, digits: u32) -> Result<Real> {
    check_ordered_k(k)?;
    check_digits(digits)?;
    let p = ordered_singularity_poly(k);
    let lo = Real::from_ratio(&BigRational::new(1.into(), 4.into()));
    let hi = Real::from_ratio(&BigRational::new(2.into(), 5.into()));
    refine_root(&p, lo, hi, digits)
}

/// The bracket `(1/4 (1 + 2^(-k-1)), 1/4 (1 + (4/5)^(k+1)))` that contains
/// `rho_k` for every `k >= 2`.
pub fn bootstrap_bracket(k: usize) -> (Real, Real) {
    let quarter = BigRational::new(1.into(), 4.into());
    let lower = &quarter * (BigRational::one() + BigRational::new(1.into(), pow2(k + 1)));
    let ratio = BigRational::new(4.into(), 5.into());
    let upper = &quarter * (BigRational::one() + num_traits::pow(ratio, k + 1));
    (Real::from_ratio(&lower), Real::from_ratio(&upper))
}

/// `B(x) = 4 - 2^(k+1) sum_{i=0}^{k} rho^i x^(k-i)`, the cofactor in
/// `1 - 4x + 2^(k+1) x^(k+1) = (rho - x) B(x)`.
pub fn cofactor_b(k: usize, rho: &Real, x: &Real) -> Real {
    let mut sum = Real::zero();
    for i in 0..=k {
        sum = sum + rho.powi(i) * x.powi(k - i);
    }
    Real::from_i64(4) - Real::from_bigint(&pow2(k + 1)) * sum
}

/// Asymptotic model for the ordered family:
/// amplitude `(1/4) sqrt((4 rho - (k+1) 2^(k+1) rho^(k+1)) / pi)`.
pub fn ordered_model(k: usize) -> Result<AsymptoticModel> {
    let rho = rho_ordered(k, DEFAULT_DIGITS)?;
    let scale = Real::from_bigint(&(pow2(k + 1) * BigInt::from(k + 1)));
    let inner = Real::from_i64(4) * &rho - scale * rho.powi(k + 1);
    let amplitude = (inner / Real::pi()).sqrt() / Real::from_i64(4);
    Ok(AsymptoticModel {
        family: Family::Ordered,
        k,
        m: None,
        rho,
        amplitude,
    })
}

/// Asymptotic estimate of [`counts::f_minus`].
pub fn asym_f_minus(k: usize, n: usize) -> Result<Real> {
    Ok(ordered_model(k)?.estimate(n))
}

/// `[x^n]` of `U~(x) = 1/2 + 1/(2 sqrt 2) + sqrt(1-4x) (1/4 - 1/sqrt 2 + log2 sqrt(1-4x))`
/// for `n >= 1`, where the constants no longer contribute.
///
/// `sqrt(1-4x) = 1 - 2C(x)` and `log2 sqrt(1-4x) = ln(1-4x) / (2 ln 2)` with
/// `ln(1-4x) = -sum 4^j x^j / j`; the product of the two series is summed
/// exactly and `1/ln 2` applied once at the end.
pub fn u_tilde_coefficient(n: usize) -> Real {
    assert!(n >= 1, "coefficients start at n = 1");
    let sqrt_coeff = |j: usize| -> BigInt {
        if j == 0 {
            BigInt::one()
        } else {
            -(counts::catalan(j) << 1usize)
        }
    };
    // sum_{j<n} s_j * (-4^(n-j) / (n-j)) over the common denominator lcm(1..n)
    let lcm = (1..=n).fold(BigInt::one(), |acc, d| {
        num_integer::lcm(acc, BigInt::from(d))
    });
    let mut numer = BigInt::zero();
    for j in 0..n {
        let d = n - j;
        numer -= sqrt_coeff(j) * (BigInt::one() << (2 * d)) * (&lcm / BigInt::from(d));
    }
    let log_product = BigRational::new(numer, lcm);
    let s_n = Real::from_bigint(&sqrt_coeff(n));
    let linear = Real::from_ratio(&BigRational::new(1.into(), 4.into()))
        - Real::one() / Real::from_i64(2).sqrt();
    linear * s_n + Real::from_ratio(&log_product) / (Real::from_i64(2) * Real::ln2())
}

/// How [`expected_gamma_approx`] estimates the mean of gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedMode {
    /// `[x^n] U~(x) / C_n`.
    Ratio,
    /// `log2(n)`.
    Log2,
}

pub fn expected_gamma_approx(n: usize, mode: ExpectedMode) -> Result<Real> {
    if n < 2 {
        return Err(Error::SizeTooSmall { size: n, min: 1 });
    }
    Ok(match mode {
        ExpectedMode::Ratio => u_tilde_coefficient(n) / Real::from_bigint(&counts::catalan(n)),
        ExpectedMode::Log2 => Real::from_i64(n as i64).log2(),
    })
}

/// The numerically estimated singularity data of the unordered family.
#[derive(Debug, Clone)]
pub struct UnorderedConstants {
    pub k: usize,
    pub m: usize,
    pub rho: Real,
    /// `W_k'(rho^2)` from the truncated series.
    pub w_prime: Real,
    /// `lambda_k`, with `W_k(x) ~ 1 - lambda_k sqrt(1 - x/rho)`.
    pub lambda: Real,
    /// `lambda_k / (2 sqrt(pi))`.
    pub amplitude: Real,
}

impl UnorderedConstants {
    pub fn model(&self) -> AsymptoticModel {
        AsymptoticModel {
            family: Family::Unordered,
            k: self.k,
            m: Some(self.m),
            rho: self.rho.clone(),
            amplitude: self.amplitude.clone(),
        }
    }
}

fn check_unordered_params(k: usize, m: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "unordered singularity needs k >= 2, got {k}"
        )));
    }
    if k >= m {
        return Err(Error::KTooLargeForTruncation { k, m });
    }
    Ok(())
}

/// Smallest positive solution `rho_k` of the truncated `phi_k(x) = 1/2` and
/// the normalized amplitude `lambda_k / (2 sqrt(pi))`, using the first `m`
/// coefficients of `W_k`.
pub fn rho_lambda_unordered(k: usize, m: usize) -> Result<UnorderedConstants> {
    check_unordered_params(k, m)?;
    let w: Vec<BigInt> = (1..=m).map(|i| counts::w_minus(k, i)).collect();

    // phi_k(x) - 1/2 = -1/2 + x - x^(k+1) + (1/2) sum w_i x^(2i)
    let mut c = vec![BigRational::zero(); 2 * m + 1];
    let half = BigRational::new(1.into(), 2.into());
    c[0] = -half.clone();
    c[1] += BigRational::one();
    c[k + 1] -= BigRational::one();
    for (i, wi) in w.iter().enumerate() {
        c[2 * (i + 1)] += &half * BigRational::from_integer(wi.clone());
    }
    let p = Poly::from_rationals(&c);

    let upper = Real::from_ratio(&half);
    let step = &upper / Real::from_i64(SCAN_STEPS as i64);
    let mut lo = Real::zero();
    let mut bracket = None;
    for s in 1..=SCAN_STEPS {
        let x = &step * Real::from_i64(s as i64);
        if !p.eval(&x).is_negative() {
            bracket = Some((lo, x));
            break;
        }
        lo = x;
    }
    let (lo, hi) = bracket
        .ok_or_else(|| Error::NoConvergence("phi_k(x) = 1/2 has no root in (0, 1/2]".into()))?;
    let rho = refine_root(&p, lo, hi, DEFAULT_DIGITS)?;

    let rho2 = &rho * &rho;
    let mut w_prime = Real::zero();
    for (i, wi) in w.iter().enumerate() {
        let i = i + 1;
        w_prime = w_prime + Real::from_bigint(&(wi * BigInt::from(i))) * rho2.powi(i - 1);
    }
    let two = Real::from_i64(2);
    let rho_k1 = rho.powi(k + 1);
    let radicand = &two * &rho - &two * &rho_k1 - &two * Real::from_i64(k as i64) * &rho_k1
        + &two * &rho2 * &w_prime;
    let lambda = radicand.sqrt();
    let amplitude = &lambda / (&two * Real::pi().sqrt());
    Ok(UnorderedConstants {
        k,
        m,
        rho,
        w_prime,
        lambda,
        amplitude,
    })
}

/// Asymptotic estimate of [`counts::w_minus`].
pub fn asym_w_minus(k: usize, n: usize, m: usize) -> Result<Real> {
    Ok(rho_lambda_unordered(k, m)?.model().estimate(n))
}

/// Exact probability that a uniform unordered tree of size `n` has gamma at
/// most `k`.
pub fn prob_gamma_le_exact(n: usize, k: usize) -> BigRational {
    BigRational::new(counts::w_minus(k, n), counts::wedderburn(n))
}

/// Asymptotic probability that a uniform unordered tree of size `n` has
/// gamma at most `k`: `(amp_k / amp) * (rho_k / rho)^(-n)` against the
/// published unconstrained constants. Not clipped.
pub fn prob_gamma_le(n: usize, k: usize, m: usize) -> Result<Real> {
    let c = rho_lambda_unordered(k, m)?;
    Ok(prob_from_constants(&c, n))
}

/// [`prob_gamma_le`] from constants computed once.
pub fn prob_from_constants(c: &UnorderedConstants, n: usize) -> Real {
    let amp0 = Real::parse(WEDDERBURN_AMPLITUDE).expect("valid literal");
    let rho0 = Real::parse(WEDDERBURN_RHO).expect("valid literal");
    (&c.amplitude / amp0) * (&c.rho / rho0).powi_neg(n)
}
