//! Uniform partitions of the circle, finitely supported measures and their
//! entropies, difference points of `×q` orbits, and the finite-scale
//! empirical-measure pipeline built from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::density::PointCloud;
use crate::entropy::MODULUS_GUARD;
use crate::error::{Error, Result};
use crate::hp::{LnTable, Real, TurnTrig};
use crate::seqgen::SequenceSpec;
use crate::torus::{CirclePoint, IrrationalSurrogate};

/// Rounding allowance when comparing high-precision entropies.
fn slack() -> Real {
    Real::from_ratio(&BigInt::one(), &(BigInt::one() << 200u32))
}

/// Atoms `[t + j/M, t + (j+1)/M)` for `j` in `[0, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformPartition {
    modulus: u64,
    translate: CirclePoint,
}

impl UniformPartition {
    pub fn new(modulus: u64, translate: CirclePoint) -> Result<UniformPartition> {
        if modulus < 2 {
            return Err(Error::InvalidArgument(format!("partition modulus {modulus} must be at least 2")));
        }
        Ok(UniformPartition { modulus, translate })
    }

    /// The untranslated partition `P_M`.
    pub fn standard(modulus: u64) -> Result<UniformPartition> {
        UniformPartition::new(modulus, CirclePoint::zero())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn translate(&self) -> &CirclePoint {
        &self.translate
    }

    fn offset(&self, x: &CirclePoint) -> CirclePoint {
        if self.translate.is_zero() {
            x.clone()
        } else {
            x.sub(&self.translate)
        }
    }

    /// `⌊M·((x − t) mod 1)⌋`.
    pub fn atom_index(&self, x: &CirclePoint) -> u64 {
        let cell = self.offset(x).cell(&BigUint::from(self.modulus));
        cell.to_u64().expect("cell index below modulus")
    }

    /// True if `x` sits exactly on the left endpoint of its atom.
    pub fn on_boundary(&self, x: &CirclePoint) -> bool {
        let o = self.offset(x);
        (o.numer() * self.modulus % o.denom()).is_zero()
    }
}

/// A probability measure with finite support and exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    support: Vec<(CirclePoint, BigRational)>,
}

impl EmpiricalMeasure {
    /// Merges repeated points; weights must be positive and sum to 1.
    pub fn new(pairs: Vec<(CirclePoint, BigRational)>) -> Result<EmpiricalMeasure> {
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("measure needs a nonempty support".into()));
        }
        if pairs.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::InvalidArgument("measure weights must be positive".into()));
        }
        let mu = EmpiricalMeasure::merged(pairs);
        let total: BigRational = mu.support.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("measure weights sum to {total}, not 1")));
        }
        Ok(mu)
    }

    fn merged(mut pairs: Vec<(CirclePoint, BigRational)>) -> EmpiricalMeasure {
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut support: Vec<(CirclePoint, BigRational)> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match support.last_mut() {
                Some((y, acc)) if *y == x => *acc += w,
                _ => support.push((x, w)),
            }
        }
        EmpiricalMeasure { support }
    }

    pub fn point_mass(x: CirclePoint) -> EmpiricalMeasure {
        EmpiricalMeasure { support: alloc::vec![(x, BigRational::one())] }
    }

    /// Equal weight on each listed point; repeats add up.
    pub fn uniform(points: Vec<CirclePoint>) -> Result<EmpiricalMeasure> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(points.len()));
        Ok(EmpiricalMeasure::merged(points.into_iter().map(|x| (x, w.clone())).collect()))
    }

    /// Support points in increasing order with their weights.
    pub fn support(&self) -> &[(CirclePoint, BigRational)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Exact mass of every occupied atom.
    pub fn atom_masses(&self, partition: &UniformPartition) -> BTreeMap<u64, BigRational> {
        let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (x, w) in &self.support {
            *out.entry(partition.atom_index(x)).or_insert_with(BigRational::zero) += w;
        }
        out
    }

    /// `Σ w_i·e^{2πi h x_i}` as `(re, im)`.
    fn character(&self, h: &BigUint, trig: &TurnTrig) -> (Real, Real) {
        let (mut re, mut im) = (Real::zero(), Real::zero());
        for (x, w) in &self.support {
            let (c, s) = trig.cos_sin(&x.scale(h).to_rational());
            let w = Real::from_rational(w);
            re = re + &w * &c;
            im = im + &w * &s;
        }
        (re, im)
    }

    /// Convex combination `Σ λ_i μ_i`; the `λ_i` must be positive and sum to 1.
    pub fn mixture(parts: &[(BigRational, &EmpiricalMeasure)]) -> Result<EmpiricalMeasure> {
        let mut pairs = Vec::new();
        for (lambda, mu) in parts {
            for (x, w) in &mu.support {
                pairs.push((x.clone(), w * lambda));
            }
        }
        EmpiricalMeasure::new(pairs)
    }
}

/// `−Σ_s μ(s)·ln μ(s)` over occupied atoms, using a shared log table.
pub fn shannon_entropy_with(table: &mut LnTable, mu: &EmpiricalMeasure, partition: &UniformPartition) -> Real {
    let masses = mu.atom_masses(partition);
    // With a common denominator D and counts c_s = D·μ(s),
    // H = ln D − (1/D)·Σ c_s ln c_s.
    let d = masses.values().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
    let counts = masses.values().map(|m| {
        let c = m.numer() * (&d / m.denom());
        c.magnitude().clone()
    });
    let sum = table.sum_x_ln_x(counts);
    let du = d.magnitude().clone();
    let h = table.ln_uint(&du) - sum.div_int(d);
    if h.is_negative() {
        Real::zero()
    } else {
        h
    }
}

/// Shannon entropy of `μ` with respect to the atoms of `partition`.
pub fn shannon_entropy(mu: &EmpiricalMeasure, partition: &UniformPartition) -> Real {
    shannon_entropy_with(&mut LnTable::new(), mu, partition)
}

/// An orbit pair whose difference lies within tolerance of `ℓ/qⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceWitness {
    pub level: u32,
    pub ell: u64,
    /// Orbit indices of `u = qⁱx` and `v = qʲx`.
    pub i: usize,
    pub j: usize,
    pub u: CirclePoint,
    pub v: CirclePoint,
    /// `‖(u − v) − ℓ/qⁿ‖`.
    pub residual: BigRational,
    pub gcd_d: u64,
}

impl DifferenceWitness {
    /// True if `next` is one level deeper with `ℓ' ≡ ℓ mod qⁿ`.
    pub fn chains_to(&self, next: &DifferenceWitness, q: u64) -> bool {
        next.level == self.level + 1 && {
            let m = num_traits::pow(BigUint::from(q), self.level as usize);
            BigUint::from(next.ell) % &m == BigUint::from(self.ell) % &m
        }
    }
}

/// Default search tolerance `q^{−(n+2)}`.
pub fn default_tolerance(q: u64, n: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(q), n as usize + 2))
}

fn level_modulus(q: u64, n: u32) -> Result<u64> {
    arith::checked_pow(q, n)
        .filter(|&m| m <= MODULUS_GUARD)
        .ok_or_else(|| Error::ModulusGuard(format!("{q}^{n} exceeds {MODULUS_GUARD}")))
}

/// Pairs `(u, v)` of the length-`len` orbit of `x` with `‖(u − v) − ℓ/qⁿ‖ < tol`
/// for some `ℓ ∈ [1, qⁿ)` with `q ∤ ℓ`.
///
/// The orbit is sorted once and each shifted grid point `v + ℓ/qⁿ` is located by
/// binary search. Requires `q^{len−1}·10^{−D} < tol/10` and `tol < 1/(2qⁿ)`.
pub fn difference_point_search(
    x: &IrrationalSurrogate,
    q: u64,
    n: u32,
    len: usize,
    tol: &BigRational,
) -> Result<Vec<DifferenceWitness>> {
    if q < 2 {
        return Err(Error::InvalidMultiplier(q));
    }
    if n == 0 {
        return Err(Error::InvalidLevel);
    }
    let qn = level_modulus(q, n)?;
    let half_step = BigRational::new(BigInt::one(), BigInt::from(2u64) * BigInt::from(qn));
    if !tol.is_positive() || *tol >= half_step {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must lie in (0, 1/(2·{q}^{n}))")));
    }
    if len < 2 {
        return Ok(Vec::new());
    }
    let amplification = num_traits::pow(BigUint::from(q), len - 1);
    x.check_budget(&amplification, &(tol / BigRational::from_integer(BigInt::from(10))))?;

    // Orbit numerators over the fixed denominator b, scaled by qⁿ so the grid
    // step ℓ/qⁿ becomes the integer ℓ·b over B = b·qⁿ.
    let b = x.point.denom().clone();
    let qn_big = BigUint::from(qn);
    let big_b = &b * &qn_big;
    let mut r = x.point.numer().clone();
    let mut scaled = Vec::with_capacity(len);
    for idx in 0..len {
        scaled.push((&r * &qn_big, idx));
        r = (r * q) % &b;
    }
    let mut sorted = scaled.clone();
    sorted.sort_unstable();

    // Largest integer distance w with w·td < tn·B.
    let tn = tol.numer().magnitude();
    let td = tol.denom().magnitude();
    let limit = tn * &big_b;
    let w_max = (&limit - 1u32) / td;

    let orbit_point = |idx: usize| -> CirclePoint {
        let num = &scaled[idx].0 / &qn_big;
        CirclePoint::reduce(&BigInt::from(num), &BigInt::from(b.clone())).expect("nonzero denominator")
    };
    let lower = |v: &BigUint| sorted.partition_point(|(s, _)| s < v);
    let upper = |v: &BigUint| sorted.partition_point(|(s, _)| s <= v);

    let mut out = Vec::new();
    for (uj, j) in &scaled {
        for ell in 1..qn {
            if ell % q == 0 {
                continue;
            }
            let target = (uj + &b * ell) % &big_b;
            // Circular window [target − w, target + w], split at 0 if needed.
            let mut ranges = Vec::with_capacity(2);
            let lo_wraps = target < w_max;
            let hi = &target + &w_max;
            let hi_wraps = hi >= big_b;
            let lo = if lo_wraps { BigUint::zero() } else { &target - &w_max };
            let hi_main = if hi_wraps { &big_b - 1u32 } else { hi.clone() };
            ranges.push(lower(&lo)..upper(&hi_main));
            if lo_wraps {
                ranges.push(lower(&(&big_b + &target - &w_max))..sorted.len());
            }
            if hi_wraps {
                ranges.push(0..upper(&(&hi - &big_b)));
            }
            for range in ranges {
                for (ui, i) in &sorted[range] {
                    let diff = if ui >= &target { ui - &target } else { &target - ui };
                    let diff = if &diff * 2u32 > big_b { &big_b - &diff } else { diff };
                    out.push(DifferenceWitness {
                        level: n,
                        ell,
                        i: *i,
                        j: *j,
                        u: orbit_point(*i),
                        v: orbit_point(*j),
                        residual: BigRational::new(BigInt::from(diff), BigInt::from(big_b.clone())),
                        gcd_d: arith::gcd(ell, q),
                    });
                }
            }
        }
    }
    out.sort_unstable_by_key(|w| (w.i, w.j));
    Ok(out)
}

/// Which cloud supplies the larger atom set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Atom bookkeeping for two clouds and their difference set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaAtoms {
    /// Atoms hit by `A − B`.
    pub delta: Vec<u64>,
    pub a_atoms: Vec<u64>,
    pub b_atoms: Vec<u64>,
    pub chosen: Side,
}

impl DeltaAtoms {
    pub fn chosen_atoms(&self) -> &[u64] {
        match self.chosen {
            Side::A => &self.a_atoms,
            Side::B => &self.b_atoms,
        }
    }
}

fn atom_set(points: &[CirclePoint], partition: &UniformPartition) -> Vec<u64> {
    let set: BTreeSet<u64> = points.iter().map(|x| partition.atom_index(x)).collect();
    set.into_iter().collect()
}

/// Atoms hit by `A − B`, by `A` and by `B`; the larger of the last two is
/// chosen (ties go to `A`) and always satisfies `|M| ≥ ½·|Δ|^{1/2}`.
pub fn delta_atoms(a: &PointCloud, b: &PointCloud, partition: &UniformPartition) -> Result<DeltaAtoms> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut delta = BTreeSet::new();
    for x in &a.points {
        for y in &b.points {
            delta.insert(partition.atom_index(&x.sub(y)));
        }
    }
    let a_atoms = atom_set(&a.points, partition);
    let b_atoms = atom_set(&b.points, partition);
    let chosen = if a_atoms.len() >= b_atoms.len() { Side::A } else { Side::B };
    let out = DeltaAtoms { delta: delta.into_iter().collect(), a_atoms, b_atoms, chosen };
    let m = out.chosen_atoms().len() as u128;
    assert!(4 * m * m >= out.delta.len() as u128, "|M| >= sqrt|Δ|/2 violated");
    Ok(out)
}

/// Number of cloud points lying exactly on an atom boundary.
pub fn boundary_hits(cloud: &PointCloud, partition: &UniformPartition) -> usize {
    cloud.points.iter().filter(|x| partition.on_boundary(x)).count()
}

/// One representative per occupied atom, the point closest to the atom's
/// left end, with uniform weights.
pub fn build_m_n(source: &PointCloud, partition: &UniformPartition) -> Result<EmpiricalMeasure> {
    if source.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut reps: BTreeMap<u64, (CirclePoint, &CirclePoint)> = BTreeMap::new();
    for x in &source.points {
        let off = partition.offset(x);
        let atom = off.cell(&BigUint::from(partition.modulus)).to_u64().expect("cell below modulus");
        match reps.get(&atom) {
            Some((best, _)) if *best <= off => {}
            _ => {
                reps.insert(atom, (off, x));
            }
        }
    }
    EmpiricalMeasure::uniform(reps.into_values().map(|(_, x)| x.clone()).collect())
}

/// Image of `μ` under `x ↦ qx mod 1`, colliding masses summed.
pub fn pushforward(mu: &EmpiricalMeasure, q: u64) -> Result<EmpiricalMeasure> {
    if q < 2 {
        return Err(Error::InvalidMultiplier(q));
    }
    let qb = BigUint::from(q);
    Ok(EmpiricalMeasure::merged(mu.support.iter().map(|(x, w)| (x.scale(&qb), w.clone())).collect()))
}

/// `[μ, T_qμ, …, T_q^{k−1}μ]`.
pub fn pushforward_iterates(mu: &EmpiricalMeasure, q: u64, k: u64) -> Result<Vec<EmpiricalMeasure>> {
    if k == 0 {
        return Err(Error::InvalidArgument("average length k must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(k as usize);
    out.push(mu.clone());
    for _ in 1..k {
        let next = pushforward(out.last().expect("nonempty"), q)?;
        out.push(next);
    }
    Ok(out)
}

fn uniform_mixture(parts: &[EmpiricalMeasure]) -> Result<EmpiricalMeasure> {
    let lambda = BigRational::new(BigInt::one(), BigInt::from(parts.len()));
    let weighted: Vec<_> = parts.iter().map(|m| (lambda.clone(), m)).collect();
    EmpiricalMeasure::mixture(&weighted)
}

/// `(1/k)·Σ_{i<k} T_q^i μ`.
pub fn average_t(mu: &EmpiricalMeasure, q: u64, k: u64) -> Result<EmpiricalMeasure> {
    uniform_mixture(&pushforward_iterates(mu, q, k)?)
}

/// `max_{1 ≤ h ≤ h_max} |μ(e_h∘T_q) − μ(e_h)|` with `e_h(x) = e^{2πihx}`.
pub fn invariance_defect(mu: &EmpiricalMeasure, q: u64, h_max: u64) -> Result<Real> {
    if q < 2 {
        return Err(Error::InvalidMultiplier(q));
    }
    if h_max == 0 {
        return Err(Error::InvalidArgument("frequency cap must be at least 1".into()));
    }
    let trig = TurnTrig::new();
    let mut worst = Real::zero();
    for h in 1..=h_max {
        let (re1, im1) = mu.character(&BigUint::from(h), &trig);
        let (re2, im2) = mu.character(&(BigUint::from(h) * q), &trig);
        let (re, im) = (re2 - re1, im2 - im1);
        worst = worst.max((&re * &re + &im * &im).sqrt());
    }
    Ok(worst)
}

/// Entropies of `μ` under `P_M` and `t + P_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslateCheck {
    pub plain: Real,
    pub shifted: Real,
    pub diff: Real,
    /// `diff ≤ ln 2`.
    pub within_bound: bool,
}

pub fn translate_entropy_check(mu: &EmpiricalMeasure, modulus: u64, t: &CirclePoint) -> Result<TranslateCheck> {
    let mut table = LnTable::new();
    let plain = shannon_entropy_with(&mut table, mu, &UniformPartition::standard(modulus)?);
    let shifted = shannon_entropy_with(&mut table, mu, &UniformPartition::new(modulus, t.clone())?);
    let diff = (&plain - &shifted).abs();
    let within_bound = diff <= Real::ln2() + slack();
    Ok(TranslateCheck { plain, shifted, diff, within_bound })
}

/// Smallest `k ≥ 1` with `k ≥ n^δ`.
pub fn averaging_length(n: u32, delta: &BigRational) -> Result<u64> {
    if delta.is_negative() {
        return Err(Error::InvalidArgument(format!("averaging exponent {delta} must be non-negative")));
    }
    let a = delta
        .numer()
        .to_usize()
        .filter(|&a| a <= 64)
        .ok_or_else(|| Error::GuardExceeded(format!("averaging exponent {delta} too large")))?;
    let b = delta.denom().to_u32().ok_or_else(|| Error::GuardExceeded(format!("averaging exponent {delta}")))?;
    let target = num_traits::pow(BigUint::from(n), a);
    // k^b >= n^a; start from an integer root and adjust.
    let mut k = num_integer::Roots::nth_root(&target, b);
    while k.pow(b) < target {
        k += 1u32;
    }
    let k = k.to_u64().ok_or_else(|| Error::GuardExceeded("averaging length".into()))?;
    Ok(k.max(1))
}

/// Parameters of [`entropy_growth_experiment`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthConfig {
    pub q: u64,
    /// Entropy-carrying prime `p | q`.
    pub prime: u64,
    pub levels: RangeInclusive<u32>,
    /// Averaging exponent: `k = ⌈N^δ⌉`.
    pub delta: BigRational,
    /// Orbit steps `i` in the source cloud `{qⁱ·a_m·x}`.
    pub orbit_steps: u32,
    /// Sequence indices `m ∈ [0, terms]`.
    pub terms: u64,
    /// Orbit length for the difference search.
    pub search_len: usize,
    /// Frequency cap for the invariance defect.
    pub h_max: u64,
}

impl GrowthConfig {
    /// Defaults: largest prime of `q`, `δ = 1/2`, `i < 8`, `m ≤ 400`, `L = 256`, `h ≤ 8`.
    pub fn new(q: u64, levels: RangeInclusive<u32>) -> Result<GrowthConfig> {
        if q < 2 {
            return Err(Error::InvalidMultiplier(q));
        }
        let prime = *arith::prime_divisors(q).last().expect("q >= 2 has a prime divisor");
        Ok(GrowthConfig {
            q,
            prime,
            levels,
            delta: BigRational::new(BigInt::one(), BigInt::from(2)),
            orbit_steps: 8,
            terms: 400,
            search_len: 256,
            h_max: 8,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidMultiplier(self.q));
        }
        if !arith::is_prime(self.prime) {
            return Err(Error::NotPrime(self.prime));
        }
        if self.q % self.prime != 0 {
            return Err(Error::InvalidArgument(format!("prime {} does not divide q = {}", self.prime, self.q)));
        }
        if self.levels.is_empty() || *self.levels.start() == 0 {
            return Err(Error::InvalidLevel);
        }
        if self.orbit_steps == 0 || self.h_max == 0 {
            return Err(Error::InvalidArgument("orbit_steps and h_max must be at least 1".into()));
        }
        level_modulus(self.q, *self.levels.end()).map(|_| ())
    }
}

/// One level of the growth experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: u32,
    pub k: u64,
    pub occupied: usize,
    pub h_raw: Real,
    pub h_avg: Real,
    pub defect: Real,
    /// `H_avg / (N·ln p)`.
    pub ratio: Real,
    /// `H_raw / (N·ln p)`.
    pub raw_ratio: Real,
    pub witnesses: usize,
    /// Distinct `gcd(ℓ, q)` over the witnesses.
    pub gcds: Vec<u64>,
    /// `|Δ_N|` for the lowest-index witness, when precision allows.
    pub delta_atoms: Option<usize>,
    pub boundary_hits: usize,
    /// Every pushforward lost at most `ln q` of entropy.
    pub drop_ok: bool,
    /// `H_avg` is at least the mean entropy of the iterates.
    pub concave_ok: bool,
    /// `defect ≤ 2/k`.
    pub defect_ok: bool,
}

impl GrowthRow {
    pub fn checks_pass(&self) -> bool {
        self.drop_ok && self.concave_ok && self.defect_ok
    }
}

/// Per-level rows plus the observed constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyGrowthReport {
    pub rows: Vec<GrowthRow>,
    /// `min ln|Δ_N| / (N·ln p)` over rows where `Δ_N` was computed.
    pub c1: Option<Real>,
    /// `min H_raw / (N·ln p)`.
    pub c2: Real,
    /// `min H_avg / (N·ln p)`.
    pub c3: Real,
    pub delta: BigRational,
    /// `ln q / ln p`, the ceiling on every ratio.
    pub ratio_cap: Real,
    pub ratios_capped: bool,
}

impl EntropyGrowthReport {
    /// Assembles a report from rows computed in any order.
    pub fn from_rows(mut rows: Vec<GrowthRow>, cfg: &GrowthConfig) -> EntropyGrowthReport {
        rows.sort_by_key(|r| r.n);
        let mut table = LnTable::new();
        let ln_p = table.ln_uint(&BigUint::from(cfg.prime));
        let ratio_cap = table.ln_uint(&BigUint::from(cfg.q)).div(&ln_p);
        let min = |it: &mut dyn Iterator<Item = Real>| it.reduce(|a, b| if b < a { b } else { a });
        let c1 = min(&mut rows
            .iter()
            .filter_map(|r| r.delta_atoms.map(|d| table.ln_uint(&BigUint::from(d)).div(&ln_p).div_int(r.n))));
        let c2 = min(&mut rows.iter().map(|r| r.raw_ratio.clone())).unwrap_or_else(Real::zero);
        let c3 = min(&mut rows.iter().map(|r| r.ratio.clone())).unwrap_or_else(Real::zero);
        let bound = &ratio_cap + &slack();
        let ratios_capped = rows.iter().all(|r| r.ratio <= bound && r.raw_ratio <= bound);
        EntropyGrowthReport { rows, c1, c2, c3, delta: cfg.delta.clone(), ratio_cap, ratios_capped }
    }

    pub fn checks_pass(&self) -> bool {
        self.ratios_capped && self.rows.iter().all(GrowthRow::checks_pass)
    }
}

/// Source cloud `{qⁱ·a_m·x : i < orbit_steps, 0 ≤ m ≤ terms}`, precision-checked
/// at resolution `10^{−6}`.
pub fn growth_source(x: &IrrationalSurrogate, a_spec: &SequenceSpec, cfg: &GrowthConfig) -> Result<PointCloud> {
    cfg.validate()?;
    let terms = (0..=cfg.terms)
        .map(|m| {
            let t = a_spec.term(m)?;
            t.to_biguint().ok_or_else(|| Error::InvalidSequence(format!("negative term a({m})")))
        })
        .collect::<Result<Vec<BigUint>>>()?;
    let max_term = terms.iter().max().cloned().unwrap_or_default();
    let q_max = num_traits::pow(BigUint::from(cfg.q), cfg.orbit_steps as usize - 1);
    let resolution = BigRational::new(BigInt::one(), BigInt::from(1_000_000u32));
    x.check_budget(&(&max_term * &q_max), &resolution)?;
    let qb = BigUint::from(cfg.q);
    let mut points = Vec::with_capacity(terms.len() * cfg.orbit_steps as usize);
    for a in &terms {
        let mut p = x.point.scale(a);
        for _ in 0..cfg.orbit_steps {
            let next = p.scale(&qb);
            points.push(p);
            p = next;
        }
    }
    Ok(PointCloud::new(points, format!("q^i*a_m*x, i<{}, m<={}", cfg.orbit_steps, cfg.terms)))
}

fn delta_for_witness(
    x: &IrrationalSurrogate,
    a_spec: &SequenceSpec,
    cfg: &GrowthConfig,
    w: &DifferenceWitness,
    partition: &UniformPartition,
) -> Result<Option<usize>> {
    let terms =
        (0..=cfg.terms).map(|m| a_spec.term(m).map(|t| t.magnitude().clone())).collect::<Result<Vec<BigUint>>>()?;
    let max_term = terms.iter().max().cloned().unwrap_or_default();
    let amp = num_traits::pow(BigUint::from(cfg.q), w.i.max(w.j)) * max_term;
    let resolution = BigRational::new(BigInt::one(), BigInt::from(1_000_000u32));
    if x.check_budget(&amp, &resolution).is_err() {
        return Ok(None);
    }
    let a = PointCloud::new(terms.iter().map(|t| w.u.scale(t)).collect(), "a_m*u");
    let b = PointCloud::new(terms.iter().map(|t| w.v.scale(t)).collect(), "a_m*v");
    Ok(Some(delta_atoms(&a, &b, partition)?.delta.len()))
}

/// Runs one level `N` of the experiment on a prepared source cloud.
pub fn growth_row(
    x: &IrrationalSurrogate,
    a_spec: &SequenceSpec,
    source: &PointCloud,
    cfg: &GrowthConfig,
    n: u32,
) -> Result<GrowthRow> {
    cfg.validate()?;
    let q = cfg.q;
    let qn = level_modulus(q, n)?;
    let partition = UniformPartition::standard(qn)?;

    let witnesses = difference_point_search(x, q, n, cfg.search_len, &default_tolerance(q, n))?;
    let gcds: BTreeSet<u64> = witnesses.iter().map(|w| w.gcd_d).collect();
    let delta_count = match witnesses.iter().min_by_key(|w| (w.i.max(w.j), w.i, w.j)) {
        Some(w) => delta_for_witness(x, a_spec, cfg, w, &partition)?,
        None => None,
    };

    let mut table = LnTable::new();
    let m_n = build_m_n(source, &partition)?;
    let h_raw = shannon_entropy_with(&mut table, &m_n, &partition);

    let k = averaging_length(n, &cfg.delta)?;
    let iterates = pushforward_iterates(&m_n, q, k)?;
    let entropies: Vec<Real> = iterates.iter().map(|mu| shannon_entropy_with(&mut table, mu, &partition)).collect();
    let ln_q = table.ln_uint(&BigUint::from(q));
    let drop_ok = entropies.windows(2).all(|w| &w[1] + &ln_q + slack() >= w[0]);
    let avg = uniform_mixture(&iterates)?;
    let h_avg = shannon_entropy_with(&mut table, &avg, &partition);
    let mean: Real = entropies.iter().cloned().sum::<Real>().div_int(k);
    let concave_ok = &h_avg + &slack() >= mean;

    let defect = invariance_defect(&avg, q, cfg.h_max)?;
    let defect_ok = defect <= Real::from_ratio(&BigInt::from(2), &BigInt::from(k)) + slack();

    let scale = table.ln_uint(&BigUint::from(cfg.prime)) * Real::from_int(n);
    Ok(GrowthRow {
        n,
        k,
        occupied: m_n.len(),
        ratio: h_avg.div(&scale),
        raw_ratio: h_raw.div(&scale),
        h_raw,
        h_avg,
        defect,
        witnesses: witnesses.len(),
        gcds: gcds.into_iter().collect(),
        delta_atoms: delta_count,
        boundary_hits: boundary_hits(source, &partition),
        drop_ok,
        concave_ok,
        defect_ok,
    })
}

/// Runs every level of `cfg.levels` in order and collects the report.
pub fn entropy_growth_experiment(
    x: &IrrationalSurrogate,
    a_spec: &SequenceSpec,
    cfg: &GrowthConfig,
) -> Result<EntropyGrowthReport> {
    let source = growth_source(x, a_spec, cfg)?;
    let rows = cfg.levels.clone().map(|n| growth_row(x, a_spec, &source, cfg, n)).collect::<Result<Vec<_>>>()?;
    Ok(EntropyGrowthReport::from_rows(rows, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{approx_irrational, TargetTag};

    fn pt(a: i64, b: i64) -> CirclePoint {
        CirclePoint::new(a, b).unwrap()
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn close(a: &Real, b: &Real) -> bool {
        a.approx_eq(b, 200)
    }

    #[test]
    fn partition_atoms() {
        let p = UniformPartition::standard(4).unwrap();
        assert_eq!(p.atom_index(&pt(1, 4)), 1);
        assert_eq!(p.atom_index(&pt(3, 13)), 0);
        assert!(p.on_boundary(&pt(1, 2)));
        let shifted = UniformPartition::new(4, pt(1, 8)).unwrap();
        assert_eq!(shifted.atom_index(&pt(0, 1)), 3);
        assert_eq!(shifted.atom_index(&pt(1, 8)), 0);
        assert!(UniformPartition::standard(1).is_err());
    }

    #[test]
    fn entropy_examples() {
        let p = UniformPartition::standard(5).unwrap();
        let grid = EmpiricalMeasure::uniform((0..5).map(|k| pt(k, 5)).collect()).unwrap();
        assert!(close(&shannon_entropy(&grid, &p), &Real::ln_uint(&BigUint::from(5u32))));
        assert!(shannon_entropy(&EmpiricalMeasure::point_mass(pt(1, 3)), &p).is_zero());
        let two = EmpiricalMeasure::uniform(vec![pt(0, 1), pt(1, 2)]).unwrap();
        assert!(close(&shannon_entropy(&two, &UniformPartition::standard(2).unwrap()), &Real::ln2()));
        // (1/2, 1/4, 1/4): H = 1.5 ln 2
        let mixed =
            EmpiricalMeasure::new(vec![(pt(0, 1), ratio(1, 2)), (pt(1, 3), ratio(1, 4)), (pt(2, 3), ratio(1, 4))])
                .unwrap();
        let h = shannon_entropy(&mixed, &UniformPartition::standard(3).unwrap());
        assert!(close(&h, &(Real::ln2() * Real::from_ratio(&3.into(), &2.into()))));
    }

    #[test]
    fn measure_validation() {
        assert!(EmpiricalMeasure::new(vec![(pt(0, 1), ratio(1, 2))]).is_err());
        assert!(EmpiricalMeasure::new(vec![(pt(0, 1), ratio(3, 2)), (pt(1, 2), ratio(-1, 2))]).is_err());
        let merged = EmpiricalMeasure::new(vec![(pt(1, 2), ratio(1, 2)), (pt(1, 2), ratio(1, 2))]).unwrap();
        assert_eq!(merged, EmpiricalMeasure::point_mass(pt(1, 2)));
    }

    #[test]
    fn pushforward_examples() {
        let zero = EmpiricalMeasure::point_mass(CirclePoint::zero());
        assert_eq!(pushforward(&zero, 5).unwrap(), zero);
        let halves = EmpiricalMeasure::uniform(vec![pt(0, 1), pt(1, 2)]).unwrap();
        assert_eq!(pushforward(&halves, 2).unwrap(), zero);
        let ninths = EmpiricalMeasure::uniform((0..9).map(|k| pt(k, 9)).collect()).unwrap();
        let thirds = EmpiricalMeasure::uniform((0..3).map(|k| pt(k, 3)).collect()).unwrap();
        assert_eq!(pushforward(&ninths, 3).unwrap(), thirds);
    }

    #[test]
    fn average_examples() {
        let mu = EmpiricalMeasure::uniform(vec![pt(1, 7), pt(3, 5)]).unwrap();
        assert_eq!(average_t(&mu, 3, 1).unwrap(), mu);
        let zero = EmpiricalMeasure::point_mass(CirclePoint::zero());
        assert_eq!(average_t(&zero, 3, 9).unwrap(), zero);
        assert!(average_t(&mu, 3, 0).is_err());
        // 1/7 under ×2 cycles through {1,2,4}/7.
        let avg = average_t(&EmpiricalMeasure::point_mass(pt(1, 7)), 2, 3).unwrap();
        assert_eq!(avg, EmpiricalMeasure::uniform(vec![pt(1, 7), pt(2, 7), pt(4, 7)]).unwrap());
    }

    #[test]
    fn defect_examples() {
        let zero = EmpiricalMeasure::point_mass(CirclePoint::zero());
        assert!(invariance_defect(&zero, 3, 5).unwrap().is_zero());
        let grid = EmpiricalMeasure::uniform((0..27).map(|k| pt(k, 27)).collect()).unwrap();
        let tiny = Real::from_ratio(&BigInt::one(), &num_traits::pow(BigInt::from(10), 50));
        assert!(invariance_defect(&grid, 3, 8).unwrap() < tiny);
        // The cycle average of a periodic point is exactly invariant.
        let cyc = EmpiricalMeasure::uniform(vec![pt(1, 7), pt(2, 7), pt(4, 7)]).unwrap();
        assert!(invariance_defect(&cyc, 2, 6).unwrap() < tiny);
        let nu = EmpiricalMeasure::uniform(vec![pt(1, 11), pt(2, 13), pt(5, 17)]).unwrap();
        let avg = average_t(&nu, 3, 10).unwrap();
        assert!(invariance_defect(&avg, 3, 4).unwrap() <= Real::from_ratio(&1.into(), &5.into()));
        assert!(invariance_defect(&zero, 3, 0).is_err());
    }

    #[test]
    fn translate_examples() {
        let mu = EmpiricalMeasure::uniform(vec![pt(1, 10), pt(3, 10), pt(7, 10)]).unwrap();
        let same = translate_entropy_check(&mu, 5, &CirclePoint::zero()).unwrap();
        assert!(same.diff.is_zero());
        let point = translate_entropy_check(&EmpiricalMeasure::point_mass(pt(2, 9)), 4, &pt(1, 3)).unwrap();
        assert!(point.plain.is_zero() && point.shifted.is_zero());
        // Two points in one atom of P_2 split by the translate 1/4.
        let split = EmpiricalMeasure::uniform(vec![pt(1, 8), pt(3, 8)]).unwrap();
        let c = translate_entropy_check(&split, 2, &pt(1, 4)).unwrap();
        assert!(c.plain.is_zero());
        assert!(close(&c.shifted, &Real::ln2()));
        assert!(c.within_bound);
    }

    #[test]
    fn delta_examples() {
        let p1 = UniformPartition::standard(3).unwrap();
        let zero = PointCloud::new(vec![CirclePoint::zero()], "");
        let d = delta_atoms(&zero, &zero, &p1).unwrap();
        assert_eq!((d.delta.len(), d.chosen_atoms().len()), (1, 1));
        let p4 = UniformPartition::standard(4).unwrap();
        let quarters = PointCloud::new((0..4).map(|k| pt(k, 4)).collect(), "");
        let d = delta_atoms(&quarters, &zero, &p4).unwrap();
        assert_eq!(d.delta, vec![0, 1, 2, 3]);
        assert_eq!((d.chosen, d.chosen_atoms().len()), (Side::A, 4));
        assert!(delta_atoms(&PointCloud::new(vec![], ""), &zero, &p1).is_err());
    }

    #[test]
    fn build_m_n_examples() {
        let p = UniformPartition::standard(6).unwrap();
        let single = PointCloud::new(vec![pt(1, 50), pt(1, 20), pt(1, 9)], "");
        let m = build_m_n(&single, &p).unwrap();
        assert_eq!(m, EmpiricalMeasure::point_mass(pt(1, 50)));
        assert!(shannon_entropy(&m, &p).is_zero());
        let grid = PointCloud::new((0..6).rev().map(|k| pt(k, 6)).collect(), "");
        let m = build_m_n(&grid, &p).unwrap();
        assert_eq!(m.len(), 6);
        assert!(close(&shannon_entropy(&m, &p), &Real::ln_uint(&BigUint::from(6u32))));
        // Translated partition picks the point nearest each atom's left end.
        let shifted = UniformPartition::new(2, pt(1, 4)).unwrap();
        let cloud = PointCloud::new(vec![pt(1, 8), pt(1, 2), pt(3, 10)], "");
        let m = build_m_n(&cloud, &shifted).unwrap();
        let reps: Vec<_> = m.support().iter().map(|(x, _)| x.clone()).collect();
        assert_eq!(reps, vec![pt(1, 8), pt(3, 10)]);
    }

    /// Exhaustive ordered-pair scan used as an independent check of the search.
    fn pair_scan(x: &CirclePoint, q: u64, n: u32, len: usize, tol: &BigRational) -> Vec<(usize, usize, u64)> {
        let orbit = crate::torus::orbit(x, q, len).unwrap();
        let qn = q.pow(n);
        let mut out = Vec::new();
        for (i, u) in orbit.iter().enumerate() {
            for (j, v) in orbit.iter().enumerate() {
                for ell in 1..qn {
                    if ell % q == 0 {
                        continue;
                    }
                    let d = u.sub(v).sub(&pt(ell as i64, qn as i64)).dist_to_zero();
                    if d < *tol {
                        out.push((i, j, ell));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn difference_search_matches_pair_scan() {
        let x = approx_irrational(&TargetTag::Sqrt2, 60).unwrap();
        let tol = default_tolerance(3, 2);
        let found = difference_point_search(&x, 3, 2, 40, &tol).unwrap();
        let mut got: Vec<_> = found.iter().map(|w| (w.i, w.j, w.ell)).collect();
        got.sort_unstable();
        assert_eq!(got, pair_scan(&x.point, 3, 2, 40, &tol));
        assert!(!found.is_empty());
        for w in &found {
            assert!(w.residual < tol);
            assert_eq!(w.gcd_d, 1);
            let exact = w.u.sub(&w.v).sub(&pt(w.ell as i64, 9)).dist_to_zero();
            assert_eq!(exact, w.residual);
        }
    }

    #[test]
    fn difference_search_sqrt2_level3() {
        let x = approx_irrational(&TargetTag::Sqrt2, 100).unwrap();
        let tol = ratio(1, 3i64.pow(9));
        let found = difference_point_search(&x, 3, 3, 199, &tol).unwrap();
        assert!(!found.is_empty());
        assert!(found.iter().all(|w| w.gcd_d == 1));
        assert!(matches!(difference_point_search(&x, 3, 3, 2000, &tol), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn difference_search_rational_cycle() {
        let x = approx_irrational(&TargetTag::Rational(pt(1, 7)), 1).unwrap();
        // Differences are multiples of 1/7; the closest grid point ℓ/27 with
        // 3 ∤ ℓ is at distance min |27k − 7ℓ|/189 = 1/189.
        let found = difference_point_search(&x, 3, 3, 30, &ratio(1, 190)).unwrap();
        assert!(found.is_empty());
        assert!(matches!(difference_point_search(&x, 3, 0, 30, &ratio(1, 190)), Err(Error::InvalidLevel)));
        assert!(difference_point_search(&x, 3, 3, 30, &ratio(1, 54)).is_err());
    }

    #[test]
    fn composite_witness_chains() {
        let x = approx_irrational(&TargetTag::Golden, 200).unwrap();
        let l1 = difference_point_search(&x, 6, 1, 120, &default_tolerance(6, 1)).unwrap();
        let l2 = difference_point_search(&x, 6, 2, 120, &default_tolerance(6, 2)).unwrap();
        assert!(l2.iter().any(|w| w.gcd_d > 1));
        for a in &l1 {
            for b in l2.iter().filter(|b| a.chains_to(b, 6)) {
                assert_eq!(a.gcd_d, b.gcd_d);
            }
        }
    }

    #[test]
    fn averaging_lengths() {
        let half = ratio(1, 2);
        assert_eq!(averaging_length(6, &half).unwrap(), 3);
        assert_eq!(averaging_length(9, &half).unwrap(), 3);
        assert_eq!(averaging_length(10, &half).unwrap(), 4);
        assert_eq!(averaging_length(5, &BigRational::zero()).unwrap(), 1);
        assert_eq!(averaging_length(8, &ratio(2, 3)).unwrap(), 4);
    }

    #[test]
    fn growth_constant_sequence_uses_bare_orbit() {
        let x = approx_irrational(&TargetTag::Sqrt2, 80).unwrap();
        let mut cfg = GrowthConfig::new(3, 2..=3).unwrap();
        cfg.terms = 0;
        cfg.orbit_steps = 12;
        cfg.search_len = 40;
        let one = SequenceSpec::constant(1).unwrap();
        let report = entropy_growth_experiment(&x, &one, &cfg).unwrap();
        let orbit = crate::torus::orbit(&x.point, 3, 12).unwrap();
        for row in &report.rows {
            let p = UniformPartition::standard(3u64.pow(row.n)).unwrap();
            let occupied: BTreeSet<u64> = orbit.iter().map(|z| p.atom_index(z)).collect();
            assert_eq!(row.occupied, occupied.len());
            assert!(close(&row.h_raw, &Real::ln_uint(&BigUint::from(occupied.len()))));
        }
        assert!(report.checks_pass());
    }
}
