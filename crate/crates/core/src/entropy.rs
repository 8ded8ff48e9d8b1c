//! Combinatorial entropy: how many residues modulo `ℓ^N` a sequence hits.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::arith::{checked_pow, factorize};
use crate::error::{Error, Result};
use crate::hp::Real;
use crate::seqgen::SequenceSpec;

/// Largest modulus `ℓ^N` the counting routines accept.
pub const MODULUS_GUARD: u64 = 1_000_000_000_000;

/// How many indices `K(N)` to scan at exponent `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KPolicy {
    /// `K(N) = min(cap, factor·ℓ^N)`.
    Scaled {
        factor: u64,
        cap: u64,
    },
    Fixed(u64),
}

impl Default for KPolicy {
    fn default() -> Self {
        KPolicy::Scaled { factor: 4, cap: 1_000_000 }
    }
}

impl KPolicy {
    pub fn cutoff(&self, modulus: u64) -> u64 {
        match *self {
            KPolicy::Scaled { factor, cap } => factor.saturating_mul(modulus).min(cap).max(1),
            KPolicy::Fixed(k) => k.max(1),
        }
    }
}

fn modulus(ell: u64, n: u32) -> Result<u64> {
    if ell < 2 {
        return Err(Error::InvalidArgument(format!("base {ell} must be at least 2")));
    }
    if n == 0 {
        return Err(Error::InvalidLevel);
    }
    checked_pow(ell, n)
        .filter(|&m| m <= MODULUS_GUARD)
        .ok_or_else(|| Error::ModulusGuard(format!("{ell}^{n} exceeds {MODULUS_GUARD}")))
}

fn distinct(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v.dedup();
    v.len() as u64
}

/// `|{a_k mod ℓ^N : 0 <= k < K}|`.
pub fn residue_count(spec: &SequenceSpec, ell: u64, n: u32, k: u64) -> Result<u64> {
    let m = modulus(ell, n)?;
    if k == 0 {
        return Err(Error::InvalidArgument("cutoff K must be at least 1".into()));
    }
    Ok(distinct(spec.residues(0..k, m)?))
}

/// `ln(residue_count) / N`.
pub fn comb_entropy(spec: &SequenceSpec, ell: u64, n: u32, k: u64) -> Result<Real> {
    let count = residue_count(spec, ell, n, k)?;
    Ok(Real::ln_uint(&BigUint::from(count)).div_int(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyRow {
    pub n: u32,
    pub k: u64,
    pub count: u64,
    pub h: Real,
}

/// One entropy row at exponent `n` with the policy's cutoff.
pub fn entropy_row(spec: &SequenceSpec, ell: u64, n: u32, policy: KPolicy) -> Result<EntropyRow> {
    let k = policy.cutoff(modulus(ell, n)?);
    let count = residue_count(spec, ell, n, k)?;
    let h = Real::ln_uint(&BigUint::from(count)).div_int(n);
    Ok(EntropyRow { n, k, count, h })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyProfile {
    pub ell: u64,
    pub rows: Vec<EntropyRow>,
    /// Largest `h` over the tail window.
    pub tail_sup: Real,
    /// Smallest `N` in the tail window; the window runs to the last row.
    pub tail_start: u32,
}

impl EntropyProfile {
    /// Assembles a profile from rows for `N = 1..=N_max` in any order.
    ///
    /// The tail window is the top `⌊N_max/3⌋` rows (at least one).
    pub fn from_rows(ell: u64, mut rows: Vec<EntropyRow>) -> Result<EntropyProfile> {
        if rows.is_empty() {
            return Err(Error::InvalidLevel);
        }
        rows.sort_by_key(|r| r.n);
        let window = (rows.len() / 3).max(1);
        let tail = &rows[rows.len() - window..];
        let tail_start = tail[0].n;
        let tail_sup = tail.iter().map(|r| r.h.clone()).max().expect("non-empty tail");
        Ok(EntropyProfile { ell, rows, tail_sup, tail_start })
    }

    /// `tail_sup / ln ℓ`, the fraction of full entropy in the tail.
    pub fn tail_fraction(&self) -> Real {
        self.tail_sup.div(&Real::ln_uint(&BigUint::from(self.ell)))
    }
}

/// Profile for `N = 1..=n_max`.
pub fn upper_entropy_estimate(spec: &SequenceSpec, ell: u64, n_max: u32, policy: KPolicy) -> Result<EntropyProfile> {
    if n_max == 0 {
        return Err(Error::InvalidLevel);
    }
    let rows = (1..=n_max).map(|n| entropy_row(spec, ell, n, policy)).collect::<Result<Vec<_>>>()?;
    EntropyProfile::from_rows(ell, rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeVerdict {
    pub p: u64,
    pub profile: EntropyProfile,
    /// `fraction · ln p`.
    pub threshold: Real,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityReport {
    pub q: u64,
    pub per_prime: Vec<PrimeVerdict>,
    pub positive: bool,
}

impl PositivityReport {
    /// Primes whose tail entropy cleared the threshold.
    pub fn witnesses(&self) -> impl Iterator<Item = u64> + '_ {
        self.per_prime.iter().filter(|v| v.positive).map(|v| v.p)
    }
}

/// Default threshold, as a fraction of `ln p`.
pub fn default_threshold_fraction() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Runs [`upper_entropy_estimate`] for each prime `p | q` and declares the
/// sequence positive when some `tail_sup > fraction · ln p`.
pub fn local_positivity(
    spec: &SequenceSpec,
    q: u64,
    n_max: u32,
    policy: KPolicy,
    fraction: &BigRational,
) -> Result<PositivityReport> {
    if q < 2 {
        return Err(Error::InvalidMultiplier(q));
    }
    let frac = Real::from_rational(fraction);
    let mut per_prime = Vec::new();
    for (p, _) in factorize(q) {
        let profile = upper_entropy_estimate(spec, p, n_max, policy)?;
        let threshold = &frac * &Real::ln_uint(&BigUint::from(p));
        let positive = profile.tail_sup > threshold;
        per_prime.push(PrimeVerdict { p, profile, threshold, positive });
    }
    let positive = per_prime.iter().any(|v| v.positive);
    Ok(PositivityReport { q, per_prime, positive })
}
