//! Scalar arithmetic contract with two interchangeable backends.
//!
//! Exact big-rational arithmetic makes "cycles indefinitely" a decidable
//! state-repetition check; binary64 exercises the EXPAND tolerances the way
//! they are deployed. A run is generic over one backend; mixing backends is a
//! compile error rather than a runtime check.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// One arithmetic backend. Values are immutable and freely shared between
/// threads.
pub trait Scalar:
    num::traits::Signed + PartialOrd + Clone + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// True when arithmetic is exact (rationals in lowest terms, arbitrary
    /// precision integers).
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// num/den as a scalar; den must be nonzero.
    fn from_fraction(num: i64, den: i64) -> Self;

    /// Parses a plain finite decimal with optional sign ("0.4", "-13.55").
    /// Exponent notation is rejected. The exact backend returns the rational
    /// equal to the decimal: "0.4" is 2/5.
    fn parse_decimal(text: &str) -> Result<Self>;

    /// Parses either a decimal or a quotient of two decimals ("-2.15/2.3").
    fn parse_number(text: &str) -> Result<Self> {
        match text.split_once('/') {
            None => Self::parse_decimal(text),
            Some((num, den)) => {
                let n = Self::parse_decimal(num)?;
                let d = Self::parse_decimal(den)?;
                if d.is_zero() {
                    return Err(Error::ParseNumber {
                        text: text.to_owned(),
                        ch: '0',
                        pos: text.find('/').unwrap_or(0) + 1,
                    });
                }
                Ok(n / d)
            }
        }
    }

    fn to_f64_lossy(&self) -> f64;

    /// Decimal rendering: exact when the value terminates, otherwise 17
    /// significant digits. Used by the MPS writer.
    fn render_decimal(&self) -> String;

    /// Lossless rendering for the instance text format: exact decimal when
    /// terminating, "p/q" otherwise. Binary64 renders shortest round-trip.
    fn render_exact(&self) -> String;

    /// Equality for comparing tableau coefficient patterns: exact for the
    /// rational backend, relative tolerance 1e-9 for binary64.
    fn pattern_eq(&self, other: &Self) -> bool;

    /// |a - b| <= tol. With tol = 0 this is exact equality.
    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= *tol
    }
}

/// The exact backend.
pub type Rational = BigRational;

/// Validated decimal split into (negative, integer digits, fraction digits).
fn split_decimal(text: &str) -> Result<(bool, &str, &str)> {
    if text.is_empty() {
        return Err(Error::EmptyNumber(text.to_owned()));
    }
    let bytes = text.as_bytes();
    let mut pos = 0;
    let negative = match bytes[0] {
        b'-' => {
            pos = 1;
            true
        }
        b'+' => {
            pos = 1;
            false
        }
        _ => false,
    };
    let digits = &text[pos..];
    let (int_part, frac_part) = match digits.split_once('.') {
        None => (digits, ""),
        Some((i, f)) => (i, f),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::EmptyNumber(text.to_owned()));
    }
    for (off, part) in [(pos, int_part), (pos + int_part.len() + 1, frac_part)] {
        if let Some(bad) = part.find(|c: char| !c.is_ascii_digit()) {
            return Err(Error::ParseNumber {
                text: text.to_owned(),
                ch: part[bad..].chars().next().unwrap(),
                pos: off + bad,
            });
        }
    }
    Ok((negative, int_part, frac_part))
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_decimal(text: &str) -> Result<Self> {
        let (negative, int_part, frac_part) = split_decimal(text)?;
        let mut digits = String::with_capacity(int_part.len() + frac_part.len());
        digits.push_str(int_part);
        digits.push_str(frac_part);
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().expect("validated digits")
        };
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = BigRational::new(numer, denom);
        Ok(if negative { -value } else { value })
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn render_decimal(&self) -> String {
        match terminating_digits(self.denom()) {
            Some(places) => render_fixed(self, places),
            None => render_significant(self, 17),
        }
    }

    fn render_exact(&self) -> String {
        match terminating_digits(self.denom()) {
            Some(places) => render_fixed(self, places),
            None => format!("{}", self),
        }
    }

    fn pattern_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// Number of decimal places needed when denom = 2^a * 5^b, else None.
fn terminating_digits(denom: &BigInt) -> Option<u32> {
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut d = denom.abs();
    let mut a = 0u32;
    let mut b = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    (d == BigInt::from(1)).then_some(a.max(b))
}

fn render_fixed(value: &BigRational, places: u32) -> String {
    let scaled = (value * BigRational::from_integer(BigInt::from(10u32).pow(places)))
        .to_integer()
        .abs();
    let sign = if value.is_negative() { "-" } else { "" };
    let digits = scaled.to_string();
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let places = places as usize;
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Long-division rendering to `sig` significant digits (round half away from
/// zero on the digit after the last kept one).
fn render_significant(value: &BigRational, sig: usize) -> String {
    let numer = value.numer().abs();
    let denom = value.denom().abs();
    let int_part = &numer / &denom;
    let int_str = int_part.to_string();
    let int_digits = if int_part.is_zero() { 0 } else { int_str.len() };

    // leading zeros between the point and the first significant digit
    let ten = BigInt::from(10);
    let mut leading = 0usize;
    if int_digits == 0 {
        let mut rem = &numer % &denom;
        loop {
            rem *= &ten;
            if &rem / &denom > BigInt::zero() || leading > 64 {
                break;
            }
            leading += 1;
        }
    }

    let frac_places = if int_digits >= sig {
        0
    } else {
        sig - int_digits + leading
    };
    let scale = BigInt::from(10u32).pow(frac_places as u32 + 1);
    let scaled = &numer * &scale / &denom;
    // round the extra digit
    let rounded = (&scaled + BigInt::from(5)) / &ten;
    let sign = if value.is_negative() { "-" } else { "" };
    let digits = rounded.to_string();
    if frac_places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = frac_places + 1);
    let (i, f) = padded.split_at(padded.len() - frac_places);
    let f = f.trim_end_matches('0');
    if f.is_empty() {
        format!("{sign}{i}")
    } else {
        format!("{sign}{i}.{f}")
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn parse_decimal(text: &str) -> Result<Self> {
        split_decimal(text)?;
        text.parse::<f64>().map_err(|_| Error::EmptyNumber(text.to_owned()))
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn render_decimal(&self) -> String {
        format!("{self}")
    }

    fn render_exact(&self) -> String {
        format!("{self}")
    }

    fn pattern_eq(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= 1e-9 * scale
    }
}

/// Convenience for tests and constructors: "7/2", "-2.15/2.3", "0.4".
pub fn rat(text: &str) -> Rational {
    Rational::parse_number(text).expect("literal rational")
}
