//! Integer polynomials in one variable, with a small text parser.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `coeffs[i]` is the coefficient of `m^i`; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Poly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: impl Into<BigInt>) -> Poly {
        Poly::new(alloc::vec![c.into()])
    }

    /// The identity polynomial `m`.
    pub fn var() -> Poly {
        Poly::new(alloc::vec![BigInt::zero(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `p(x) mod m` in `[0, m)` for `m >= 1`.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let m128 = m as u128;
        let xm = x as u128 % m128;
        self.coeffs.iter().rev().fold(0u128, |acc, c| {
            let c = c.mod_floor(&BigInt::from(m)).to_u128().unwrap_or(0);
            (acc * xm + c) % m128
        }) as u64
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    f.write_str("m")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    /// Parses sums of terms like `3*m^2`, `2m`, `-m`, `7`. Any single ASCII
    /// letter may serve as the variable, but only one per polynomial.
    fn from_str(s: &str) -> Result<Poly> {
        let err = |msg: &str| Error::Parse(format!("polynomial `{s}`: {msg}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut var: Option<char> = None;
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body_start) = match rest.as_bytes()[0] {
                b'+' => (1, 1),
                b'-' => (-1, 1),
                _ if rest.len() == compact.len() => (1, 0),
                _ => return Err(err("expected + or -")),
            };
            rest = &rest[body_start..];
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let digits_end = term.find(|c: char| !c.is_ascii_digit()).unwrap_or(term.len());
            let coef = if digits_end == 0 {
                BigInt::one()
            } else {
                BigInt::from_str(&term[..digits_end]).map_err(|_| err("bad coefficient"))?
            };
            let mut tail = &term[digits_end..];
            let mut power = 0usize;
            if !tail.is_empty() {
                if digits_end > 0 {
                    tail = tail.strip_prefix('*').unwrap_or(tail);
                }
                let mut chars = tail.chars();
                let v = chars.next().ok_or_else(|| err("dangling *"))?;
                if !v.is_ascii_alphabetic() {
                    return Err(err("expected variable"));
                }
                match var {
                    Some(w) if w != v => return Err(err("more than one variable")),
                    _ => var = Some(v),
                }
                let after = chars.as_str();
                power = if after.is_empty() {
                    1
                } else {
                    let e = after.strip_prefix('^').ok_or_else(|| err("expected ^"))?;
                    e.parse::<usize>().map_err(|_| err("bad exponent"))?
                };
                if power > 64 {
                    return Err(err("degree above 64"));
                }
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += coef * sign;
        }
        Ok(Poly::new(coeffs))
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Poly {
        Poly::constant(c)
    }
}
