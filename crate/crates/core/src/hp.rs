//! Fixed-point reals with 256 fractional bits (about 77 decimal digits).
//!
//! Only the handful of transcendental values the lab needs are provided:
//! natural logarithms of positive rationals, `π`, and `cos`/`sin` of `2πθ`
//! for exact rational `θ`. Series are summed with 32 guard bits and rounded
//! back, so results are good to within a few units of `2^-256`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u64 = 256;
const GUARD_BITS: u64 = 32;
const WORK_BITS: u64 = FRAC_BITS + GUARD_BITS;
/// Angles are divided by `2^HALVINGS` before the Taylor series.
const HALVINGS: u64 = 8;

/// A real number `m / 2^256`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real {
    m: BigInt,
}

fn round_shift(x: BigInt, bits: u64) -> BigInt {
    if bits == 0 {
        return x;
    }
    let half = BigInt::one() << (bits - 1);
    (x + half) >> bits
}

fn from_work(x: BigInt) -> Real {
    Real { m: round_shift(x, GUARD_BITS) }
}

fn work_one() -> BigInt {
    BigInt::one() << WORK_BITS
}

/// `atanh(s)` for a work-scale `s` with `|s| <= 1/3`.
fn atanh_work(s: &BigInt) -> BigInt {
    let s2 = (s * s) >> WORK_BITS;
    let mut term = s.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(k);
        term = (term * &s2) >> WORK_BITS;
        k += 2;
    }
    sum
}

/// `atan(1/x)` at work scale, for integer `x >= 2`.
fn atan_inv_work(x: u64) -> BigInt {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut term = work_one() / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    let mut positive = true;
    while !term.is_zero() {
        let t = &term / BigInt::from(k);
        if positive {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &x2;
        k += 2;
        positive = !positive;
    }
    sum
}

fn ln2_work() -> BigInt {
    // ln 2 = 2 atanh(1/3)
    atanh_work(&(work_one() / BigInt::from(3))) << 1
}

fn pi_work() -> BigInt {
    // Machin: π = 16 atan(1/5) − 4 atan(1/239)
    (atan_inv_work(5) << 4) - (atan_inv_work(239) << 2)
}

/// `ln(n)` at work scale for `n >= 1`, given `ln 2` at work scale.
fn ln_uint_work(n: &BigUint, ln2: &BigInt) -> BigInt {
    debug_assert!(!n.is_zero());
    let k = n.bits() - 1;
    // y = n / 2^k in [1, 2)
    let y = (BigInt::from(n.clone()) << WORK_BITS) >> k;
    let one = work_one();
    let s = ((&y - &one) << WORK_BITS) / (&y + &one);
    (atanh_work(&s) << 1) + ln2 * BigInt::from(k)
}

/// Caches π at working precision for repeated trigonometric calls.
#[derive(Clone, Debug)]
pub struct TurnTrig {
    pi: BigInt,
}

impl Default for TurnTrig {
    fn default() -> Self {
        TurnTrig::new()
    }
}

impl TurnTrig {
    pub fn new() -> Self {
        TurnTrig { pi: pi_work() }
    }

    /// `(cos 2πθ, sin 2πθ)`.
    pub fn cos_sin(&self, theta: &BigRational) -> (Real, Real) {
        Real::cos_sin_turns_with_pi(theta, &self.pi)
    }
}

/// Caches `ln 2` and logarithms of small integers across many calls.
#[derive(Debug)]
pub struct LnTable {
    ln2: BigInt,
    small: BTreeMap<u64, BigInt>,
}

impl Default for LnTable {
    fn default() -> Self {
        Self::new()
    }
}

impl LnTable {
    pub fn new() -> Self {
        LnTable { ln2: ln2_work(), small: BTreeMap::new() }
    }

    fn ln_work(&mut self, n: &BigUint) -> BigInt {
        if let Some(k) = n.to_u64() {
            if let Some(v) = self.small.get(&k) {
                return v.clone();
            }
            let v = ln_uint_work(n, &self.ln2);
            self.small.insert(k, v.clone());
            v
        } else {
            ln_uint_work(n, &self.ln2)
        }
    }

    /// Natural log of a positive integer.
    pub fn ln_uint(&mut self, n: &BigUint) -> Real {
        assert!(!n.is_zero(), "ln(0)");
        from_work(self.ln_work(n))
    }

    /// Natural log of a positive rational.
    pub fn ln_rational(&mut self, q: &BigRational) -> Real {
        assert!(q.is_positive(), "ln of non-positive rational");
        let num = q.numer().magnitude().clone();
        let den = q.denom().magnitude().clone();
        from_work(self.ln_work(&num) - self.ln_work(&den))
    }

    /// `Σ c·ln(c)` over positive integer counts, at full precision.
    pub fn sum_x_ln_x(&mut self, counts: impl IntoIterator<Item = BigUint>) -> Real {
        let mut acc = BigInt::zero();
        for c in counts {
            if c.is_one() || c.is_zero() {
                continue;
            }
            acc += self.ln_work(&c) * BigInt::from(c);
        }
        from_work(acc)
    }
}

impl Real {
    pub fn zero() -> Real {
        Real { m: BigInt::zero() }
    }

    pub fn one() -> Real {
        Real { m: BigInt::one() << FRAC_BITS }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Real {
        Real { m: n.into() << FRAC_BITS }
    }

    /// Nearest fixed-point value to `num/den` (`den != 0`).
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Real {
        assert!(!den.is_zero(), "zero denominator");
        let scaled = num << (FRAC_BITS + 1);
        let q = scaled.div_floor(den);
        Real { m: round_shift(q, 1) }
    }

    pub fn from_rational(q: &BigRational) -> Real {
        Real::from_ratio(q.numer(), q.denom())
    }

    pub fn ln2() -> Real {
        from_work(ln2_work())
    }

    pub fn pi() -> Real {
        from_work(pi_work())
    }

    /// Natural log of a positive integer.
    pub fn ln_uint(n: &BigUint) -> Real {
        LnTable::new().ln_uint(n)
    }

    pub fn ln_rational(q: &BigRational) -> Real {
        LnTable::new().ln_rational(q)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Real {
        Real { m: self.m.abs() }
    }

    pub fn div_int(&self, d: impl Into<BigInt>) -> Real {
        let d = d.into();
        assert!(!d.is_zero(), "division by zero");
        Real { m: round_shift((&self.m << 1u32).div_floor(&d), 1) }
    }

    pub fn div(&self, other: &Real) -> Real {
        assert!(!other.m.is_zero(), "division by zero");
        Real { m: round_shift((&self.m << (FRAC_BITS + 1)).div_floor(&other.m), 1) }
    }

    /// Square root of a non-negative value.
    pub fn sqrt(&self) -> Real {
        assert!(!self.is_negative(), "sqrt of negative");
        Real { m: (&self.m << FRAC_BITS).sqrt() }
    }

    /// `e^x`, accurate to a few units of `2^-256` relative to the result.
    pub fn exp(&self) -> Real {
        let x = &self.m << GUARD_BITS;
        let ln2 = ln2_work();
        // x = k·ln2 + r with |r| <= ln2/2.
        let k = round_shift((&x << 1u32).div_floor(&ln2), 1);
        let r = &x - &ln2 * &k;
        let mut sum = BigInt::zero();
        let mut term = work_one();
        let mut i = 1u64;
        while !term.is_zero() {
            sum += &term;
            term = ((term * &r) >> WORK_BITS) / BigInt::from(i);
            i += 1;
        }
        let k = k.to_i64().expect("exponent fits in i64");
        let shifted = if k >= 0 { sum << k as u64 } else { sum >> (-k) as u64 };
        from_work(shifted)
    }

    /// `⌊self · k⌋`.
    pub fn floor_mul(&self, k: &BigInt) -> BigInt {
        (&self.m * k) >> FRAC_BITS
    }

    /// `(cos 2πθ, sin 2πθ)` for an exact rational number of turns `θ`.
    pub fn cos_sin_turns(theta: &BigRational) -> (Real, Real) {
        Real::cos_sin_turns_with_pi(theta, &pi_work())
    }

    fn cos_sin_turns_with_pi(theta: &BigRational, pi: &BigInt) -> (Real, Real) {
        // Reduce to t in (-1/2, 1/2].
        let mut t = theta - theta.floor();
        if t > BigRational::new(BigInt::one(), BigInt::from(2)) {
            t -= BigRational::one();
        }
        if t.is_zero() {
            return (Real::one(), Real::zero());
        }
        let angle = (BigInt::from(2) * pi * t.numer()).div_floor(t.denom());
        let x = angle >> HALVINGS;
        let x2 = (&x * &x) >> WORK_BITS;
        let one = work_one();

        let mut cos = BigInt::zero();
        let mut term = one.clone();
        let mut k = 0u64;
        while !term.is_zero() {
            cos += &term;
            term = -((term * &x2) >> WORK_BITS) / BigInt::from((k + 1) * (k + 2));
            k += 2;
        }
        let mut sin = BigInt::zero();
        let mut term = x.clone();
        let mut k = 1u64;
        while !term.is_zero() {
            sin += &term;
            term = -((term * &x2) >> WORK_BITS) / BigInt::from((k + 1) * (k + 2));
            k += 2;
        }
        for _ in 0..HALVINGS {
            let c2 = ((&cos * &cos) - (&sin * &sin)) >> WORK_BITS;
            let s2 = (&sin * &cos) >> (WORK_BITS - 1);
            cos = c2;
            sin = s2;
        }
        (from_work(cos), from_work(sin))
    }

    pub fn to_f64(&self) -> f64 {
        // 2^-256 as an f64 bit pattern.
        let scale = f64::from_bits((1023 - FRAC_BITS) << 52);
        let shift = self.m.bits().saturating_sub(64);
        let top = (&self.m >> shift).to_f64().unwrap_or(0.0);
        let mut v = top * scale;
        for _ in 0..shift {
            v *= 2.0;
        }
        v
    }

    /// Decimal expansion rounded to `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let mag = self.m.magnitude();
        let ten_pow = num_traits::pow(BigUint::from(10u32), digits);
        let scaled: BigUint = ((mag * &ten_pow) + (BigUint::one() << (FRAC_BITS - 1))) >> FRAC_BITS;
        let (int_part, frac_part) = scaled.div_rem(&ten_pow);
        let mut out = String::new();
        if neg && !scaled.is_zero() {
            out.push('-');
        }
        use core::fmt::Write;
        let _ = write!(out, "{int_part}");
        if digits > 0 {
            let _ = write!(out, ".{:0>width$}", frac_part.to_str_radix(10), width = digits);
        }
        out
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// True if `|self - other| <= 2^-bits`.
    pub fn approx_eq(&self, other: &Real, bits: u64) -> bool {
        let diff = (&self.m - &other.m).abs();
        diff.bits() <= FRAC_BITS.saturating_sub(bits) + 1
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.write_str(&self.to_decimal(digits))
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        Real { m: self.m + rhs.m }
    }
}

impl<'a> Add<&'a Real> for &'a Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real { m: &self.m + &rhs.m }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        Real { m: self.m - rhs.m }
    }
}

impl<'a> Sub<&'a Real> for &'a Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real { m: &self.m - &rhs.m }
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        Real { m: round_shift(self.m * rhs.m, FRAC_BITS) }
    }
}

impl<'a> Mul<&'a Real> for &'a Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real { m: round_shift(&self.m * &rhs.m, FRAC_BITS) }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { m: -self.m }
    }
}

impl core::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2_60: &str = "0.693147180559945309417232121458176568075500134360255254120680";
    const PI_60: &str = "3.141592653589793238462643383279502884197169399375105820974945";
    const LN10_50: &str = "2.30258509299404568401799145468436420760110148862877";

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constants_match_published_digits() {
        assert_eq!(Real::ln2().to_decimal(60), LN2_60);
        assert_eq!(Real::pi().to_decimal(60), PI_60);
        assert_eq!(Real::ln_uint(&BigUint::from(10u32)).to_decimal(50), LN10_50);
        assert!(Real::ln_uint(&BigUint::one()).is_zero());
    }

    #[test]
    fn log_identities() {
        let mut t = LnTable::new();
        let six = t.ln_uint(&BigUint::from(6u32));
        let two = t.ln_uint(&BigUint::from(2u32));
        let three = t.ln_uint(&BigUint::from(3u32));
        assert!(six.approx_eq(&(&two + &three), 250));
        let big = BigUint::from(3u32).pow(200);
        let lb = t.ln_uint(&big);
        assert!(lb.approx_eq(&(&three * &Real::from_int(200)), 240));
        let q = t.ln_rational(&rat(1, 3));
        assert!(q.approx_eq(&-three.clone(), 250));
    }

    #[test]
    fn exp_inverts_ln() {
        let ten = Real::ln_uint(&BigUint::from(10u32));
        assert!(ten.exp().approx_eq(&Real::from_int(10), 250));
        assert!(Real::zero().exp() == Real::one());
        let back = (-Real::ln_uint(&BigUint::from(7u32))).exp();
        assert!(back.approx_eq(&Real::from_ratio(&1.into(), &7.into()), 250));
    }

    #[test]
    fn trig_special_angles() {
        let (c, s) = Real::cos_sin_turns(&rat(1, 4));
        assert!(c.abs().approx_eq(&Real::zero(), 240));
        assert!(s.approx_eq(&Real::one(), 240));
        let (c, s) = Real::cos_sin_turns(&rat(1, 2));
        assert!(c.approx_eq(&-Real::one(), 240));
        assert!(s.approx_eq(&Real::zero(), 240));
        let (c, _) = Real::cos_sin_turns(&rat(1, 6));
        assert!(c.approx_eq(&Real::from_ratio(&1.into(), &2.into()), 240));
        let (c, s) = Real::cos_sin_turns(&rat(-7, 5));
        let norm = &(&c * &c) + &(&s * &s);
        assert!(norm.approx_eq(&Real::one(), 240));
        let (c0, s0) = Real::cos_sin_turns(&rat(0, 1));
        assert_eq!((c0, s0), (Real::one(), Real::zero()));
    }

    #[test]
    fn decimal_and_float_views() {
        let x = Real::from_ratio(&BigInt::from(-1), &BigInt::from(8));
        assert_eq!(x.to_decimal(4), "-0.1250");
        assert_eq!(x.to_f64(), -0.125);
        assert!((Real::from_int(5).sqrt().to_f64() - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(Real::from_int(3).to_decimal(0), "3");
    }
}
