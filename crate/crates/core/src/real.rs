//! Thin value type over `astro_float::BigFloat` with a fixed working precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Working precision in bits (about 77 decimal digits).
pub const WORK_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

fn consts() -> Consts {
    Consts::new().expect("allocating the constants cache")
}

#[derive(Clone, Debug)]
pub struct Real(BigFloat);

impl Real {
    pub fn from_i64(v: i64) -> Self {
        Real(BigFloat::from_i64(v, WORK_BITS))
    }

    pub fn from_f64(v: f64) -> Self {
        Real(BigFloat::from_f64(v, WORK_BITS))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Real(BigFloat::parse(
            &v.to_string(),
            Radix::Dec,
            WORK_BITS,
            RM,
            &mut consts(),
        ))
    }

    pub fn from_ratio(v: &BigRational) -> Self {
        Real::from_bigint(v.numer()) / Real::from_bigint(v.denom())
    }

    /// Parse a decimal literal such as `"0.40269750367"`.
    pub fn parse(s: &str) -> Option<Self> {
        let v = BigFloat::parse(s, Radix::Dec, WORK_BITS, RM, &mut consts());
        (!v.is_nan()).then_some(Real(v))
    }

    pub fn zero() -> Self {
        Real::from_i64(0)
    }

    pub fn one() -> Self {
        Real::from_i64(1)
    }

    pub fn pi() -> Self {
        Real(consts().pi(WORK_BITS, RM))
    }

    pub fn ln2() -> Self {
        Real(consts().ln_2(WORK_BITS, RM))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(WORK_BITS, RM))
    }

    pub fn ln(&self) -> Self {
        Real(self.0.ln(WORK_BITS, RM, &mut consts()))
    }

    pub fn log2(&self) -> Self {
        self.ln() / Real::ln2()
    }

    pub fn powi(&self, n: usize) -> Self {
        Real(self.0.powi(n, WORK_BITS, RM))
    }

    /// `self^(-n)` for a nonzero base.
    pub fn powi_neg(&self, n: usize) -> Self {
        Real::one() / self.powi(n)
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Exact value of the binary float as a rational.
    pub fn to_rational(&self) -> BigRational {
        let text = self.0.to_string();
        parse_decimal(&text).expect("BigFloat renders as a decimal literal")
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        self.0.to_string().parse().unwrap_or(f64::NAN)
    }
}

/// Parse `[-]d.ddd[e[+-]N]` exactly.
pub(crate) fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= BigRational::from_integer(scale);
    } else {
        value /= BigRational::from_integer(scale);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// How the last kept digit is chosen when rendering decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    HalfEven,
    /// Drop the remaining digits.
    TowardZero,
}

/// Render `value` with exactly `places` digits after the decimal point,
/// rounding half to even.
pub fn format_fixed(value: &BigRational, places: usize) -> String {
    format_fixed_with(value, places, Rounding::HalfEven)
}

pub fn format_fixed_with(value: &BigRational, places: usize, rounding: Rounding) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = value * BigRational::from_integer(scale);
    let n = match rounding {
        Rounding::TowardZero => scaled.trunc().to_integer(),
        Rounding::HalfEven => {
            let floor = scaled.floor();
            let frac = &scaled - &floor;
            let half = BigRational::new(BigInt::one(), BigInt::from(2u32));
            let mut n = floor.to_integer();
            match frac.cmp(&half) {
                Ordering::Greater => n += 1u32,
                Ordering::Equal if n.is_odd() => n += 1u32,
                _ => {}
            }
            n
        }
    };
    let negative = n.is_negative() || (n.is_zero() && value.is_negative());
    let digits = n.abs().to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let (int, frac) = padded.split_at(padded.len() - places);
        format!("{int}.{frac}")
    };
    if negative && body.bytes().any(|b| (b'1'..=b'9').contains(&b)) {
        format!("-{body}")
    } else {
        body
    }
}

/// Render with `digits` significant digits, rounding half to even.
pub fn format_significant(value: &BigRational, digits: usize) -> String {
    format_significant_with(value, digits, Rounding::HalfEven)
}

pub fn format_significant_with(value: &BigRational, digits: usize, rounding: Rounding) -> String {
    if value.is_zero() {
        return format_fixed(value, digits.saturating_sub(1));
    }
    let abs = value.abs();
    // position of the leading digit: 10^lead <= |v| < 10^(lead+1)
    let mut lead: i64 = abs.numer().to_string().len() as i64 - abs.denom().to_string().len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10u32));
    let pow10 = |e: i64| {
        if e >= 0 {
            num_traits::pow(ten.clone(), e as usize)
        } else {
            BigRational::one() / num_traits::pow(ten.clone(), (-e) as usize)
        }
    };
    while pow10(lead) > abs {
        lead -= 1;
    }
    while pow10(lead + 1) <= abs {
        lead += 1;
    }
    let places = (digits as i64 - 1 - lead).max(0) as usize;
    format_fixed_with(value, places, rounding)
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&format_fixed(&self.to_rational(), p)),
            None => write!(f, "{}", self.0),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$method(&rhs.0, WORK_BITS, RM))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-&self.0)
    }
}
