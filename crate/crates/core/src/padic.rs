//! Fixed-precision p-adic integers, the exponential and logarithm series,
//! Mahler coefficients, and certificates for interpolating `n ↦ a^{Sn}`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factorial_valuation, gcd, is_prime, multiplicative_order};
use crate::error::{Error, Result};
use crate::seqgen::{Poly, SequenceSpec};

/// A p-adic valuation as seen at finite precision `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    /// The value is divisible by `p^N`; only the lower bound is known.
    AtLeast(u32),
}

impl Valuation {
    /// The known lower bound (the exact value when finite).
    pub fn lower(&self) -> u32 {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exact `v_p(n)` for `n != 0`.
pub fn valuation_big(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut v = 0;
    let mut cur = n.clone();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        cur = q;
        v += 1;
    }
}

/// `v_p(n)`, reported as `>= N` once `p^N | n`.
pub fn val(n: &BigInt, p: u64, precision: u32) -> Result<Valuation> {
    check_prime(p)?;
    if n.is_zero() {
        return Ok(Valuation::AtLeast(precision));
    }
    let v = valuation_big(n.magnitude(), p);
    Ok(if v >= precision { Valuation::AtLeast(precision) } else { Valuation::Finite(v) })
}

/// An element of `ℤ/p^N`, read as a p-adic integer known to precision `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u64,
    n: u32,
    r: BigUint,
    modulus: BigUint,
}

impl PadicInt {
    pub fn new(p: u64, n: u32, value: &BigInt) -> Result<PadicInt> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::InvalidLevel);
        }
        let modulus = num_traits::pow(BigUint::from(p), n as usize);
        let r = value.mod_floor(&BigInt::from(modulus.clone())).into_parts().1;
        Ok(PadicInt { p, n, r, modulus })
    }

    pub fn from_i64(p: u64, n: u32, value: i64) -> Result<PadicInt> {
        PadicInt::new(p, n, &BigInt::from(value))
    }

    fn with_residue(&self, r: BigUint) -> PadicInt {
        PadicInt { p: self.p, n: self.n, r: r % &self.modulus, modulus: self.modulus.clone() }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn residue(&self) -> &BigUint {
        &self.r
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero()
    }

    pub fn val(&self) -> Valuation {
        if self.r.is_zero() {
            Valuation::AtLeast(self.n)
        } else {
            Valuation::Finite(valuation_big(&self.r, self.p))
        }
    }

    pub fn is_unit(&self) -> bool {
        self.val() == Valuation::Finite(0)
    }

    fn check_same(&self, other: &PadicInt) -> Result<()> {
        if self.p == other.p && self.n == other.n {
            Ok(())
        } else {
            Err(Error::PadicMismatch)
        }
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_same(other)?;
        Ok(self.with_residue(&self.r + &other.r))
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_same(other)?;
        Ok(self.with_residue(&self.r + &self.modulus - &other.r))
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_same(other)?;
        Ok(self.with_residue(&self.r * &other.r))
    }

    pub fn neg(&self) -> PadicInt {
        self.with_residue(&self.modulus - &self.r)
    }

    pub fn pow(&self, e: &BigUint) -> PadicInt {
        self.with_residue(self.r.modpow(e, &self.modulus))
    }

    pub fn one_like(&self) -> PadicInt {
        self.with_residue(BigUint::one())
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<PadicInt> {
        let r = BigInt::from(self.r.clone());
        let m = BigInt::from(self.modulus.clone());
        let g = r.extended_gcd(&m);
        if !g.gcd.is_one() {
            return Err(Error::NotAUnit { a: (&self.r % self.p).to_u64().unwrap_or(0), p: self.p });
        }
        Ok(self.with_residue(g.x.mod_floor(&m).into_parts().1))
    }

    /// The same element viewed at a lower precision.
    pub fn truncate(&self, n: u32) -> Result<PadicInt> {
        if n == 0 || n > self.n {
            return Err(Error::InvalidLevel);
        }
        PadicInt::new(self.p, n, &BigInt::from(self.r.clone()))
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.r.clone())
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} : {}", self.p, self.n, self.r)
    }
}

impl FromStr for PadicInt {
    type Err = Error;

    /// Parses `"p^N : r"`.
    fn from_str(s: &str) -> Result<PadicInt> {
        let bad = || Error::Parse(format!("expected `p^N : r`, got `{s}`"));
        let (head, r) = s.split_once(':').ok_or_else(bad)?;
        let (p, n) = head.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let r = BigInt::from_str(r.trim()).map_err(|_| bad())?;
        PadicInt::new(p, n, &r)
    }
}

/// Minimum valuation of the series argument for `exp` to converge.
fn exp_guard(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// `k·p^e` split as `(e, k / p^e)`.
fn split_power(k: u64, p: u64) -> (u32, u64) {
    let mut e = 0;
    let mut k = k;
    while k % p == 0 {
        k /= p;
        e += 1;
    }
    (e, k)
}

/// `x / p^e` modulo `p^n`, given `x` exactly divisible by `p^e`.
fn shift_down(x: &BigUint, p: u64, e: u64) -> BigUint {
    x / num_traits::pow(BigUint::from(p), e as usize)
}

/// `log(u) = Σ (−1)^{k+1} (u−1)^k / k`, needing `u ≡ 1` mod `p` (mod 4 if `p = 2`).
pub fn padic_log(u: &PadicInt) -> Result<PadicInt> {
    let (p, n) = (u.p, u.n);
    let z = u.sub(&u.one_like())?;
    let v = match z.val() {
        Valuation::AtLeast(_) => return Ok(z),
        Valuation::Finite(v) if v >= exp_guard(p) => v as u64,
        Valuation::Finite(_) => return Err(Error::LogDomain),
    };
    // Terms with k·v − v_p(k) >= N vanish; k·v − ⌊log_p k⌋ bounds that from
    // below and is nondecreasing, so stop once it reaches N.
    let mut k_max = 1u64;
    while k_max * v - floor_log(k_max, p) < n as u64 {
        k_max += 1;
    }
    let extra = floor_log(k_max, p);
    let work = num_traits::pow(BigUint::from(p), (n as u64 + extra + 2) as usize);
    let target = u.modulus.clone();
    let mut zk = BigUint::one();
    let mut acc = BigInt::zero();
    for k in 1..=k_max {
        zk = (&zk * &z.r) % &work;
        let (e, unit) = split_power(k, p);
        let term = shift_down(&zk, p, e as u64) % &target;
        let inv = PadicInt::new(p, n, &BigInt::from(unit))?.inverse()?;
        let t = BigInt::from((term * &inv.r) % &target);
        if k % 2 == 1 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    PadicInt::new(p, n, &acc)
}

fn floor_log(k: u64, p: u64) -> u64 {
    let mut e = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        e += 1;
    }
    e
}

/// `exp(z) = Σ z^k / k!`, needing `val(z) > 1/(p−1)`.
pub fn padic_exp(z: &PadicInt) -> Result<PadicInt> {
    let (p, n) = (z.p, z.n);
    let v = match z.val() {
        Valuation::AtLeast(_) => return Ok(z.one_like()),
        Valuation::Finite(v) if v >= exp_guard(p) => v as u64,
        Valuation::Finite(_) => return Err(Error::ExpDomain),
    };
    // v_p(k!) <= (k−1)/(p−1), so k·v − (k−1)/(p−1) bounds the term valuation
    // from below and increases with k.
    let mut k_max = 1u64;
    while (k_max * v) * (p - 1) < n as u64 * (p - 1) + (k_max - 1) {
        k_max += 1;
    }
    let fv_max = factorial_valuation(k_max, p);
    let work = num_traits::pow(BigUint::from(p), (n as u64 + fv_max + 2) as usize);
    let target = z.modulus.clone();
    let mut acc = BigUint::one();
    let mut zk = BigUint::one();
    let mut fact_unit = BigUint::one();
    let mut fact_val = 0u64;
    for k in 1..k_max {
        zk = (&zk * &z.r) % &work;
        let (e, unit) = split_power(k, p);
        fact_val += e as u64;
        fact_unit = (fact_unit * unit) % &target;
        let term = shift_down(&zk, p, fact_val) % &target;
        let inv = z.with_residue(fact_unit.clone()).inverse()?;
        acc += (term * &inv.r) % &target;
    }
    Ok(z.with_residue(acc))
}

/// `c_k = (Δ^k a)(0)` for `k = 0..=k_max`.
pub fn mahler_coefficients(spec: &SequenceSpec, k_max: usize) -> Result<Vec<BigInt>> {
    let mut row = (0..=k_max as u64).map(|n| spec.term(n)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(k_max + 1);
    for _ in 0..=k_max {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuityVerdict {
    Plausible,
    Fails,
    Inconclusive,
}

impl fmt::Display for ContinuityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContinuityVerdict::Plausible => "plausible",
            ContinuityVerdict::Fails => "fails",
            ContinuityVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityReport {
    pub verdict: ContinuityVerdict,
    /// `v_p(c_k)` for each `k`; `None` when `c_k = 0`.
    pub trace: Vec<Option<u32>>,
    /// First index of the tail examined by the verdict.
    pub tail_start: usize,
}

/// Default growth slope for [`continuity_test`].
pub fn default_slope() -> BigRational {
    BigRational::new(1.into(), 4.into())
}

/// Screens Mahler's criterion `v_p(c_k) → ∞` on the top half of `k`.
///
/// Plausible when every tail coefficient satisfies `v_p(c_k) >= ε·k` (zero
/// counts as infinite). Fails when every tail coefficient is non-zero with
/// `v_p(c_k) < ε·k_start`, so valuations never climb over the tail.
pub fn continuity_test(spec: &SequenceSpec, p: u64, k_max: usize, slope: &BigRational) -> Result<ContinuityReport> {
    check_prime(p)?;
    if k_max < 2 {
        return Err(Error::InvalidArgument("k_max must be at least 2".into()));
    }
    let coeffs = mahler_coefficients(spec, k_max)?;
    let trace: Vec<Option<u32>> =
        coeffs.iter().map(|c| if c.is_zero() { None } else { Some(valuation_big(c.magnitude(), p)) }).collect();
    let tail_start = k_max.div_ceil(2);
    let tail = &trace[tail_start..];
    let meets = |v: u32, k: usize| BigRational::from_integer(v.into()) >= slope * BigInt::from(k);
    let plausible = tail.iter().enumerate().all(|(i, v)| v.map_or(true, |v| meets(v, tail_start + i)));
    let fails = tail.iter().all(|v| v.is_some_and(|v| !meets(v, tail_start)));
    let verdict = if plausible {
        ContinuityVerdict::Plausible
    } else if fails {
        ContinuityVerdict::Fails
    } else {
        ContinuityVerdict::Inconclusive
    };
    Ok(ContinuityReport { verdict, trace, tail_start })
}

/// Evidence that `n ↦ a^{S n}` extends to a p-adic analytic function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationCertificate {
    pub a: u64,
    pub p: u64,
    pub stride: u64,
    pub order: u64,
    pub v_log: u32,
    pub guard_ok: bool,
    pub critical_point_count: u64,
}

impl fmt::Display for InterpolationCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={}, p={}, d={}, S={}, v_log={}, guard_ok={}",
            self.a, self.p, self.order, self.stride, self.v_log, self.guard_ok
        )
    }
}

impl FromStr for InterpolationCertificate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = [None::<&str>; 6];
        const KEYS: [&str; 6] = ["a", "p", "d", "S", "v_log", "guard_ok"];
        for part in s.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("field `{part}` lacks `=`")))?;
            let i = KEYS
                .iter()
                .position(|key| *key == k.trim())
                .ok_or_else(|| Error::Parse(format!("unknown certificate field `{}`", k.trim())))?;
            fields[i] = Some(v.trim());
        }
        let get = |i: usize| fields[i].ok_or_else(|| Error::Parse(format!("missing `{}`", KEYS[i])));
        let num = |i: usize| -> Result<u64> { get(i)?.parse().map_err(|_| Error::Parse(format!("bad `{}`", KEYS[i]))) };
        Ok(InterpolationCertificate {
            a: num(0)?,
            p: num(1)?,
            order: num(2)?,
            stride: num(3)?,
            v_log: num(4)? as u32,
            guard_ok: get(5)?.parse().map_err(|_| Error::Parse("bad `guard_ok`".into()))?,
            critical_point_count: 0,
        })
    }
}

/// Picks the stride `S = d` that puts `a^S` in `1 + p ℤ_p` (`1 + 4ℤ_2` when `p = 2`).
pub fn interpolation_stride(a: u64, p: u64) -> Result<InterpolationCertificate> {
    check_prime(p)?;
    if a < 2 {
        return Err(Error::InvalidBase(a));
    }
    if gcd(a, p) != 1 {
        return Err(Error::NotAUnit { a, p });
    }
    let d = if p == 2 {
        if a % 4 == 1 {
            1
        } else {
            2
        }
    } else {
        multiplicative_order(a, p).expect("a is a unit mod p")
    };
    let ad = num_traits::pow(BigUint::from(a), d as usize);
    let v_log = valuation_big(&(ad - 1u32), p);
    let guard_ok = v_log >= exp_guard(p);
    Ok(InterpolationCertificate { a, p, stride: d, order: d, v_log, guard_ok, critical_point_count: 0 })
}

fn log_of_power(cert: &InterpolationCertificate, n: u32) -> Result<PadicInt> {
    if !cert.guard_ok || cert.a < 2 {
        return Err(Error::NoAnalyticModel);
    }
    let base = PadicInt::from_i64(cert.p, n, cert.a as i64)?;
    padic_log(&base.pow(&BigUint::from(cert.stride)))
}

/// `f(x) = exp(x · log(a^S))` at precision `n`.
pub fn interpolate_eval(cert: &InterpolationCertificate, x: &PadicInt, n: u32) -> Result<PadicInt> {
    if x.prime() != cert.p {
        return Err(Error::PadicMismatch);
    }
    let l = log_of_power(cert, n)?;
    let x = if x.precision() >= n {
        x.truncate(n)?
    } else {
        return Err(Error::PadicMismatch);
    };
    padic_exp(&x.mul(&l)?)
}

/// Result of [`critical_point_scan`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPointReport {
    /// Strassmann bound on the zeros of `f′` in `ℤ_p`.
    pub count: u64,
    /// `v_p(log(a^S))`, the constant valuation of `f′/f`.
    pub witness_v_log: u32,
}

/// Bounds the critical points of `f(x) = a^{Sx}` in the unit disc.
///
/// `f′(x) = Σ_k L^{k+1} x^k / k!` with `L = log(a^S)`; the coefficient
/// valuations `(k+1)·v − v_p(k!)` go into the Strassmann bound.
pub fn critical_point_scan(cert: &InterpolationCertificate, n: u32) -> Result<CriticalPointReport> {
    let l = log_of_power(cert, n)?;
    let v = match l.val() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::InsufficientPrecision(format!("log(a^S) vanishes modulo {}^{n}", cert.p)))
        }
    };
    let vals: Vec<Option<u64>> =
        (0..=(n as u64 + 2)).map(|k| Some((k + 1) * v as u64 - factorial_valuation(k, cert.p))).collect();
    let count = strassmann_bound(&vals).expect("coefficients are non-zero") as u64;
    Ok(CriticalPointReport { count, witness_v_log: v })
}

/// Largest index attaining the minimal coefficient valuation; `None` marks
/// zero coefficients. Bounds the number of zeros in `ℤ_p` of a power series
/// whose coefficients tend to zero.
pub fn strassmann_bound(valuations: &[Option<u64>]) -> Option<usize> {
    let min = valuations.iter().flatten().min()?;
    valuations.iter().rposition(|v| v.as_ref() == Some(min))
}

/// Coefficient valuations of an integer polynomial (`None` for zeros).
pub fn poly_valuations(poly: &Poly, p: u64) -> Vec<Option<u64>> {
    poly.coeffs().iter().map(|c| (!c.is_zero()).then(|| valuation_big(c.magnitude(), p) as u64)).collect()
}

/// Strassmann bound on the critical points of a polynomial in `ℤ_p`.
/// `None` when the derivative vanishes identically.
pub fn polynomial_critical_bound(poly: &Poly, p: u64) -> Option<usize> {
    let deriv: Vec<BigInt> = poly.coeffs().iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    strassmann_bound(&poly_valuations(&Poly::new(deriv), p))
}

impl PadicInt {
    /// `true` when `self ≡ 1` closely enough for the log series to converge.
    pub fn in_log_domain(&self) -> bool {
        let one = self.one_like();
        self.sub(&one).map(|z| z.val().lower() >= exp_guard(self.p)).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pz(p: u64, n: u32, v: i64) -> PadicInt {
        PadicInt::from_i64(p, n, v).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(val(&48.into(), 2, 20).unwrap(), Valuation::Finite(4));
        assert_eq!(val(&0.into(), 5, 7).unwrap(), Valuation::AtLeast(7));
        let big = BigInt::from(1u64 << 32);
        assert_eq!(val(&big, 2, 64).unwrap(), Valuation::Finite(32));
        assert_eq!(val(&big, 2, 10).unwrap(), Valuation::AtLeast(10));
        assert_eq!(val(&12.into(), 4, 3), Err(Error::NotPrime(4)));
        assert_eq!(Valuation::AtLeast(7).to_string(), ">=7");
    }

    /// Exact rational sum of the log series, reduced mod p^n.
    fn log_oracle(p: u64, n: u32, z: i64, terms: u64) -> BigInt {
        let mut sum = BigRational::zero();
        let zr = BigRational::from_integer(z.into());
        for k in 1..=terms {
            let t = num_traits::pow(zr.clone(), k as usize) / BigRational::from_integer(k.into());
            if k % 2 == 1 {
                sum += t;
            } else {
                sum -= t;
            }
        }
        let m = BigInt::from(p).pow(n);
        let den_inv = sum.denom().modinv(&m).expect("denominator is a unit");
        (sum.numer() * den_inv).mod_floor(&m)
    }

    #[test]
    fn log_examples() {
        assert!(padic_log(&pz(3, 6, 1)).unwrap().is_zero());
        let l = padic_log(&pz(3, 4, 4)).unwrap();
        assert_eq!(l.to_bigint(), log_oracle(3, 4, 3, 12));
        for p in [3u64, 5] {
            let u = pz(p, 10, 1 + p as i64);
            let lhs = padic_log(&u.mul(&u).unwrap()).unwrap();
            let l = padic_log(&u).unwrap();
            assert_eq!(lhs, l.add(&l).unwrap());
        }
        assert_eq!(padic_log(&pz(3, 5, 2)), Err(Error::LogDomain));
        assert_eq!(padic_log(&pz(2, 5, 3)), Err(Error::LogDomain));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(padic_exp(&pz(7, 5, 0)).unwrap(), pz(7, 5, 1));
        let u = pz(5, 6, 6);
        assert_eq!(padic_exp(&padic_log(&u).unwrap()).unwrap(), u);
        assert_eq!(padic_exp(&pz(2, 8, 2)), Err(Error::ExpDomain));
        assert!(padic_exp(&pz(2, 8, 4)).is_ok());
    }

    #[test]
    fn text_form() {
        let x: PadicInt = "3^4 : 85".parse().unwrap();
        assert_eq!(x, pz(3, 4, 4));
        assert_eq!(x.to_string(), "3^4 : 4");
        assert!("3^4 - 4".parse::<PadicInt>().is_err());
        assert!("4^4 : 1".parse::<PadicInt>().is_err());
    }

    #[test]
    fn mahler_examples() {
        let sq = SequenceSpec::polynomial("m^2").unwrap();
        let c: Vec<i64> = mahler_coefficients(&sq, 5).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(c, [0, 1, 2, 0, 0, 0]);
        let g3 = SequenceSpec::geometric(3).unwrap();
        for (k, c) in mahler_coefficients(&g3, 12).unwrap().into_iter().enumerate() {
            assert_eq!(c, BigInt::from(2).pow(k as u32));
        }
        let g2 = SequenceSpec::geometric(2).unwrap();
        assert!(mahler_coefficients(&g2, 10).unwrap().iter().all(|c| c.is_one()));
        let c7 = SequenceSpec::constant(7).unwrap();
        let c: Vec<i64> = mahler_coefficients(&c7, 3).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(c, [7, 0, 0, 0]);
    }

    #[test]
    fn continuity_examples() {
        let eps = default_slope();
        let g3 = SequenceSpec::geometric(3).unwrap();
        let rep = continuity_test(&g3, 2, 24, &eps).unwrap();
        assert_eq!(rep.verdict, ContinuityVerdict::Plausible);
        assert_eq!(rep.trace[5], Some(5));
        let g2 = SequenceSpec::geometric(2).unwrap();
        let rep = continuity_test(&g2, 2, 24, &eps).unwrap();
        assert_eq!(rep.verdict, ContinuityVerdict::Fails);
        assert!(rep.trace.iter().all(|v| *v == Some(0)));
        let cube = SequenceSpec::polynomial("m^3").unwrap();
        for p in [2, 3, 5, 7] {
            assert_eq!(continuity_test(&cube, p, 16, &eps).unwrap().verdict, ContinuityVerdict::Plausible);
        }
    }

    #[test]
    fn stride_examples() {
        let c = interpolation_stride(3, 2).unwrap();
        assert_eq!((c.order, c.stride, c.v_log, c.guard_ok), (2, 2, 3, true));
        let c = interpolation_stride(5, 3).unwrap();
        assert_eq!((c.order, c.stride, c.v_log, c.guard_ok), (2, 2, 1, true));
        let c = interpolation_stride(4, 3).unwrap();
        assert_eq!((c.order, c.stride, c.v_log, c.guard_ok), (1, 1, 1, true));
        assert_eq!(interpolation_stride(6, 3), Err(Error::NotAUnit { a: 6, p: 3 }));
        assert_eq!(interpolation_stride(1, 3), Err(Error::InvalidBase(1)));
        let text = c.to_string();
        assert_eq!(text, "a=4, p=3, d=1, S=1, v_log=1, guard_ok=true");
        assert_eq!(text.parse::<InterpolationCertificate>().unwrap(), c);
    }

    #[test]
    fn interpolation_examples() {
        let c = interpolation_stride(2, 3).unwrap();
        assert_eq!(c.stride, 2);
        let f1 = interpolate_eval(&c, &pz(3, 5, 1), 5).unwrap();
        assert_eq!(f1, pz(3, 5, 4));
        assert_eq!(interpolate_eval(&c, &pz(3, 5, 0), 5).unwrap(), pz(3, 5, 1));
        let mut bad = c.clone();
        bad.guard_ok = false;
        assert_eq!(interpolate_eval(&bad, &pz(3, 5, 1), 5), Err(Error::NoAnalyticModel));
    }

    #[test]
    fn critical_points() {
        let c = interpolation_stride(3, 2).unwrap();
        assert_eq!(critical_point_scan(&c, 20).unwrap(), CriticalPointReport { count: 0, witness_v_log: 3 });
        let c = interpolation_stride(4, 3).unwrap();
        assert_eq!(critical_point_scan(&c, 20).unwrap(), CriticalPointReport { count: 0, witness_v_log: 1 });
        let mut degenerate = c.clone();
        degenerate.a = 1;
        assert_eq!(critical_point_scan(&degenerate, 20), Err(Error::NoAnalyticModel));
    }

    #[test]
    fn strassmann_examples() {
        // x(x−1)(x−2) = x³ − 3x² + 2x over ℤ_3: three roots.
        let f: Poly = "m^3-3m^2+2m".parse().unwrap();
        assert_eq!(strassmann_bound(&poly_valuations(&f, 3)), Some(3));
        // 3x² + x has the single 3-adic root 0.
        let g: Poly = "3m^2+m".parse().unwrap();
        assert_eq!(strassmann_bound(&poly_valuations(&g, 3)), Some(1));
        // Derivative of m^2 + 1 is 2m: one critical point.
        let h: Poly = "m^2+1".parse().unwrap();
        assert_eq!(polynomial_critical_bound(&h, 3), Some(1));
        assert_eq!(polynomial_critical_bound(&Poly::constant(4), 3), None);
    }
}
