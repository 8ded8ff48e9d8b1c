//! Exact points of the circle `ℝ/ℤ`, the `×q` map, and rational stand-ins
//! for the irrational starting points the experiments need.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A rational point of `ℝ/ℤ`, stored as `num/den` in lowest terms with
/// `0 <= num < den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CirclePoint {
    num: BigUint,
    den: BigUint,
}

impl CirclePoint {
    pub fn zero() -> CirclePoint {
        CirclePoint { num: BigUint::zero(), den: BigUint::one() }
    }

    /// `num/den mod 1` in lowest terms.
    pub fn reduce(num: &BigInt, den: &BigInt) -> Result<CirclePoint> {
        if !den.is_positive() {
            return Err(Error::InvalidDenominator);
        }
        let r = num.mod_floor(den);
        let g = r.gcd(den);
        let (num, den) = if g.is_zero() { (BigInt::zero(), BigInt::one()) } else { (&r / &g, den / &g) };
        Ok(CirclePoint { num: num.into_parts().1, den: den.into_parts().1 })
    }

    /// Convenience constructor from anything convertible to `BigInt`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<CirclePoint> {
        CirclePoint::reduce(&num.into(), &den.into())
    }

    pub fn from_rational(q: &BigRational) -> CirclePoint {
        CirclePoint::reduce(q.numer(), q.denom()).expect("rational denominators are positive")
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new_raw(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }

    /// `k·x mod 1` for a non-negative integer `k`.
    pub fn scale(&self, k: &BigUint) -> CirclePoint {
        if k.is_zero() || self.num.is_zero() {
            return CirclePoint::zero();
        }
        let r = (&self.num * k) % &self.den;
        // gcd(num·k mod den, den) = gcd(k, den) because gcd(num, den) = 1.
        let g = if k < &self.den { (&self.den % k).gcd(k) } else { k.gcd(&self.den) };
        if g.is_one() {
            CirclePoint { num: r, den: self.den.clone() }
        } else if r.is_zero() {
            CirclePoint::zero()
        } else {
            CirclePoint { num: r / &g, den: &self.den / &g }
        }
    }

    /// `k·x mod 1` for any integer `k`.
    pub fn scale_int(&self, k: &BigInt) -> CirclePoint {
        let s = self.scale(k.magnitude());
        if k.sign() == Sign::Minus {
            s.neg()
        } else {
            s
        }
    }

    /// `-x mod 1`.
    pub fn neg(&self) -> CirclePoint {
        if self.num.is_zero() {
            return self.clone();
        }
        CirclePoint { num: &self.den - &self.num, den: self.den.clone() }
    }

    pub fn add(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::from_rational(&(self.to_rational() + other.to_rational()))
    }

    pub fn sub(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::from_rational(&(self.to_rational() - other.to_rational()))
    }

    /// The `×q` map: `q·x mod 1`.
    pub fn times_q(&self, q: u64) -> Result<CirclePoint> {
        if q < 2 {
            return Err(Error::InvalidMultiplier(q));
        }
        Ok(self.scale(&BigUint::from(q)))
    }

    /// Distance to the nearest integer, `min(x, 1 - x)`.
    pub fn dist_to_zero(&self) -> BigRational {
        let twice = &self.num << 1u32;
        let num = if twice <= self.den { self.num.clone() } else { &self.den - &self.num };
        BigRational::new(BigInt::from(num), BigInt::from(self.den.clone()))
    }

    /// Circle distance between two points.
    pub fn dist(&self, other: &CirclePoint) -> BigRational {
        self.sub(other).dist_to_zero()
    }

    /// Index of the half-open interval `[j/m, (j+1)/m)` containing the point.
    pub fn cell(&self, m: &BigUint) -> BigUint {
        (&self.num * m) / &self.den
    }
}

impl Ord for CirclePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for CirclePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CirclePoint {
    type Err = Error;

    /// Accepts `"num/den"` or a bare integer; the result is re-reduced.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad integer `{t}`")));
        match s.split_once('/') {
            Some((n, d)) => CirclePoint::reduce(&parse(n)?, &parse(d)?),
            None => CirclePoint::reduce(&parse(s)?, &BigInt::one()),
        }
    }
}

pub fn reduce(num: &BigInt, den: &BigInt) -> Result<CirclePoint> {
    CirclePoint::reduce(num, den)
}

pub fn times_q(x: &CirclePoint, q: u64) -> Result<CirclePoint> {
    x.times_q(q)
}

pub fn dist_to_zero(x: &CirclePoint) -> BigRational {
    x.dist_to_zero()
}

/// `[x, T_q x, …, T_q^{len-1} x]`.
pub fn orbit(x: &CirclePoint, q: u64, len: usize) -> Result<Vec<CirclePoint>> {
    if q < 2 {
        return Err(Error::InvalidMultiplier(q));
    }
    let q = BigUint::from(q);
    let mut out = Vec::with_capacity(len);
    let mut cur = x.clone();
    for _ in 0..len {
        let next = cur.scale(&q);
        out.push(cur);
        cur = next;
    }
    Ok(out)
}

/// Which number a surrogate stands in for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetTag {
    Sqrt2,
    Sqrt3,
    /// The fractional part of the golden ratio, `(√5 − 1)/2`.
    Golden,
    Rational(CirclePoint),
}

impl fmt::Display for TargetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetTag::Sqrt2 => f.write_str("sqrt2"),
            TargetTag::Sqrt3 => f.write_str("sqrt3"),
            TargetTag::Golden => f.write_str("golden"),
            TargetTag::Rational(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for TargetTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sqrt2" => Ok(TargetTag::Sqrt2),
            "sqrt3" => Ok(TargetTag::Sqrt3),
            "golden" => Ok(TargetTag::Golden),
            other if other.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-') => {
                Ok(TargetTag::Rational(other.parse()?))
            }
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }
}

/// A rational point within `10^-error_exponent` of its target.
///
/// `residual` is the integer certificate of the bound: `|p² − k·q²|` for the
/// convergent `p/q` of `√k`, `|p² + pq − q²|` for the golden case, and 0 for
/// explicit rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrationalSurrogate {
    pub point: CirclePoint,
    pub error_exponent: u32,
    pub tag: TargetTag,
    pub residual: BigUint,
}

impl IrrationalSurrogate {
    pub fn is_exact(&self) -> bool {
        matches!(self.tag, TargetTag::Rational(_))
    }

    /// Upper bound on `|point − target|`: `10^-D`, or 0 when exact.
    pub fn error_bound(&self) -> BigRational {
        if self.is_exact() {
            BigRational::zero()
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), self.error_exponent as usize))
        }
    }

    /// Re-derives the error bound from the certificate.
    pub fn verify(&self) -> bool {
        let ten_d = num_traits::pow(BigUint::from(10u32), self.error_exponent as usize);
        let q = self.point.denom().clone();
        match &self.tag {
            TargetTag::Rational(r) => r == &self.point,
            TargetTag::Golden => {
                let p = self.point.numer().clone();
                let lhs = BigInt::from(&p * &p + &p * &q) - BigInt::from(&q * &q);
                lhs.magnitude() == &self.residual && &self.residual * &ten_d < &q * &q
            }
            TargetTag::Sqrt2 | TargetTag::Sqrt3 => {
                let k = if self.tag == TargetTag::Sqrt2 { 2u32 } else { 3 };
                // The convergent is 1 + point.
                let p = self.point.numer() + &q;
                let lhs = BigInt::from(&p * &p) - BigInt::from(&q * &q * k);
                lhs.magnitude() == &self.residual && &self.residual * &ten_d < &p * &q
            }
        }
    }

    /// Refuses a computation whose largest integer multiplier would amplify
    /// the surrogate error past `resolution`: requires `max·10^-D < resolution`.
    pub fn check_budget(&self, max_multiplier: &BigUint, resolution: &BigRational) -> Result<()> {
        if self.is_exact() {
            return Ok(());
        }
        let ten_d = num_traits::pow(BigInt::from(10), self.error_exponent as usize);
        let lhs = BigInt::from(max_multiplier.clone()) * resolution.denom();
        let rhs = resolution.numer() * ten_d;
        if lhs < rhs {
            Ok(())
        } else {
            Err(Error::InsufficientPrecision(format!(
                "multiplier with {} bits times 10^-{} is not below resolution {}",
                max_multiplier.bits(),
                self.error_exponent,
                resolution
            )))
        }
    }
}

/// Continued-fraction convergents of `√k` for non-square `k`.
struct SqrtConvergents {
    k: u64,
    a0: u64,
    m: u64,
    d: u64,
    a: u64,
    p: (BigUint, BigUint),
    q: (BigUint, BigUint),
}

impl SqrtConvergents {
    fn new(k: u64) -> Self {
        let a0 = num_integer::Roots::sqrt(&k);
        SqrtConvergents {
            k,
            a0,
            m: 0,
            d: 1,
            a: a0,
            p: (BigUint::one(), BigUint::from(a0)),
            q: (BigUint::zero(), BigUint::one()),
        }
    }

    fn current(&self) -> (&BigUint, &BigUint) {
        (&self.p.1, &self.q.1)
    }

    fn advance(&mut self) {
        self.m = self.d * self.a - self.m;
        self.d = (self.k - self.m * self.m) / self.d;
        self.a = (self.a0 + self.m) / self.d;
        let a = BigUint::from(self.a);
        let np = &a * &self.p.1 + &self.p.0;
        let nq = &a * &self.q.1 + &self.q.0;
        self.p = (core::mem::take(&mut self.p.1), np);
        self.q = (core::mem::take(&mut self.q.1), nq);
    }
}

/// A rational surrogate for `tag` with guaranteed error below `10^-digits`.
pub fn approx_irrational(tag: &TargetTag, digits: u32) -> Result<IrrationalSurrogate> {
    if digits == 0 {
        return Err(Error::InvalidArgument("digits must be at least 1".to_string()));
    }
    let ten_d = num_traits::pow(BigUint::from(10u32), digits as usize);
    match tag {
        TargetTag::Rational(x) => Ok(IrrationalSurrogate {
            point: x.clone(),
            error_exponent: digits,
            tag: tag.clone(),
            residual: BigUint::zero(),
        }),
        TargetTag::Sqrt2 | TargetTag::Sqrt3 => {
            let k: u64 = if *tag == TargetTag::Sqrt2 { 2 } else { 3 };
            let mut cf = SqrtConvergents::new(k);
            loop {
                let (p, q) = cf.current();
                let resid = (BigInt::from(p * p) - BigInt::from(q * q * k)).magnitude().clone();
                // |p/q − √k| = |p² − kq²| / (q(p + q√k)) < |p² − kq²| / (pq)
                if !p.is_zero() && &resid * &ten_d < p * q {
                    let num = BigInt::from(p.clone()) - BigInt::from(q * cf.a0);
                    let point = CirclePoint::reduce(&num, &BigInt::from(q.clone()))?;
                    return Ok(IrrationalSurrogate {
                        point,
                        error_exponent: digits,
                        tag: tag.clone(),
                        residual: resid,
                    });
                }
                cf.advance();
            }
        }
        TargetTag::Golden => {
            // F_n / F_{n+1} → (√5 − 1)/2 with |p² + pq − q²| = 1.
            let (mut p, mut q) = (BigUint::one(), BigUint::from(2u32));
            loop {
                let resid = (BigInt::from(&p * &p + &p * &q) - BigInt::from(&q * &q)).magnitude().clone();
                // |x − r| = |p² + pq − q²| / (q²·|x + φ|) < |p² + pq − q²| / q²
                if &resid * &ten_d < &q * &q {
                    let point = CirclePoint::reduce(&BigInt::from(p), &BigInt::from(q))?;
                    return Ok(IrrationalSurrogate {
                        point,
                        error_exponent: digits,
                        tag: tag.clone(),
                        residual: resid,
                    });
                }
                let next = &p + &q;
                p = core::mem::replace(&mut q, next);
            }
        }
    }
}
