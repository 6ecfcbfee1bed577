//! High-precision real inputs and small-denominator rational detection.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Decimal digits used for irrational constants.
pub const DEFAULT_DIGITS: u32 = 250;

/// Best rational approximation `p/q` with `q <= qmax` when it matches `x`
/// to a few ulps.
pub fn small_rational(x: f64, qmax: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e18 {
            return None;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > qmax as i128 {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2 as i64, q2 as u64));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = y - a;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// Same test for an exact value: its reduced denominator is small, or a
/// convergent with small denominator agrees to relative precision 1e-15.
pub fn small_rational_big(x: &BigRational, qmax: u64) -> Option<(BigInt, BigInt)> {
    if x.denom() <= &BigInt::from(qmax) {
        return Some((x.numer().clone(), x.denom().clone()));
    }
    let tol = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(15)) * x.abs().max(BigRational::one());
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut y = x.clone();
    for _ in 0..200 {
        let a = y.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > BigInt::from(qmax) {
            return None;
        }
        let approx = BigRational::new(p2.clone(), q2.clone());
        if (x - &approx).abs() <= tol {
            return Some((p2, q2));
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &y - BigRational::from_integer(a);
        if frac.is_zero() {
            return None;
        }
        y = frac.recip();
    }
    None
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['+', '-']);
    let (int, frac) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().ok()? / 10;
    let mut r = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    let ten = BigRational::from_integer(BigInt::from(10));
    for _ in 0..exp.unsigned_abs() {
        if exp > 0 {
            r *= &ten;
        } else {
            r /= &ten;
        }
    }
    Some(if neg { -r } else { r })
}

/// Square root of a nonnegative rational truncated to `digits` decimals.
pub fn sqrt_rational(n: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (n * BigRational::from_integer(&scale * &scale)).to_integer();
    BigRational::new(scaled.sqrt(), scale)
}

/// Parses a real number exactly or to `digits` decimals.
///
/// Accepted forms: `p/q`, decimals (`0.25`, `1e-3`), `golden`, `sqrt(N)`,
/// and `sqrt(N)+M` / `sqrt(N)-M`.
pub fn parse_real(s: &str, digits: u32) -> Result<BigRational> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Usage(format!("cannot parse real number `{s}`"));
    if t == "golden" || t == "phi" {
        let five = BigRational::from_integer(BigInt::from(5));
        return Ok((sqrt_rational(&five, digits) + BigRational::one()) / BigRational::from_integer(BigInt::from(2)));
    }
    if let Some(rest) = t.strip_prefix("sqrt(") {
        let close = rest.find(')').ok_or_else(bad)?;
        let n = parse_real(&rest[..close], digits)?;
        if n.is_negative() {
            return Err(bad());
        }
        let root = sqrt_rational(&n, digits);
        let tail = &rest[close + 1..];
        if tail.is_empty() {
            return Ok(root);
        }
        let off = parse_real(tail.trim_start_matches('+'), digits)?;
        return Ok(root + off);
    }
    if let Some((a, b)) = t.split_once('/') {
        let p = parse_decimal(a).ok_or_else(bad)?;
        let q = parse_decimal(b).ok_or_else(bad)?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(p / q);
    }
    parse_decimal(&t).ok_or_else(bad)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
