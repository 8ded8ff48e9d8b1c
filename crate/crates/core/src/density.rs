//! Finite point clouds on the circle and the diagnostics run on them:
//! discrepancy, Weyl sums, gaps, ε-density witnesses, exceptional-set grid
//! scans and box-counting slopes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hp::{Real, TurnTrig};
use crate::seqgen::SequenceSpec;
use crate::torus::{CirclePoint, IrrationalSurrogate};

/// A finite multiset of circle points with a note on how it was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCloud {
    pub points: Vec<CirclePoint>,
    pub provenance: String,
}

impl PointCloud {
    pub fn new(points: Vec<CirclePoint>, provenance: impl Into<String>) -> PointCloud {
        PointCloud { points, provenance: provenance.into() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn sorted(&self) -> Result<Vec<&CirclePoint>> {
        if self.points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let mut v: Vec<&CirclePoint> = self.points.iter().collect();
        v.sort_unstable();
        Ok(v)
    }

    fn sorted_distinct(&self) -> Result<Vec<&CirclePoint>> {
        let mut v = self.sorted()?;
        v.dedup();
        Ok(v)
    }
}

/// An unreduced non-negative fraction, compared by cross-multiplication.
#[derive(Clone, Debug)]
struct Frac {
    num: BigUint,
    den: BigUint,
}

impl Frac {
    fn cmp(&self, other: &Frac) -> Ordering {
        if self.den == other.den {
            self.num.cmp(&other.num)
        } else {
            (&self.num * &other.den).cmp(&(&other.num * &self.den))
        }
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone().into(), self.den.clone().into())
    }
}

/// `b − a` for points `a <= b`.
fn diff(a: &CirclePoint, b: &CirclePoint) -> Frac {
    if a.denom() == b.denom() {
        Frac { num: b.numer() - a.numer(), den: a.denom().clone() }
    } else {
        Frac { num: b.numer() * a.denom() - a.numer() * b.denom(), den: a.denom() * b.denom() }
    }
}

/// Gaps between consecutive distinct sorted points, wrap-around gap last.
fn gaps(sorted: &[&CirclePoint]) -> Vec<Frac> {
    let mut out: Vec<Frac> = sorted.windows(2).map(|w| diff(w[0], w[1])).collect();
    let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
    // 1 − last + first
    let wrap = if first.denom() == last.denom() {
        Frac { num: last.denom() - last.numer() + first.numer(), den: last.denom().clone() }
    } else {
        Frac {
            num: (last.denom() - last.numer()) * first.denom() + first.numer() * last.denom(),
            den: last.denom() * first.denom(),
        }
    };
    out.push(wrap);
    out
}

/// Exact star discrepancy `max_i max(i/N − x_(i), x_(i) − (i−1)/N)`.
pub fn star_discrepancy(cloud: &PointCloud) -> Result<BigRational> {
    let sorted = cloud.sorted()?;
    let n = BigUint::from(sorted.len());
    let mut best = Frac { num: BigUint::zero(), den: BigUint::one() };
    for (i, x) in sorted.iter().enumerate() {
        let i = BigUint::from(i);
        // Compare i/N, x, (i+1)/N over the common denominator N·den.
        let xs = x.numer() * &n;
        let lo = &i * x.denom();
        let hi = (&i + 1u32) * x.denom();
        let den = x.denom() * &n;
        let cand = if hi > xs {
            Frac { num: &hi - &xs, den: den.clone() }
        } else {
            Frac { num: BigUint::zero(), den: den.clone() }
        };
        if cand.cmp(&best) == Ordering::Greater {
            best = cand;
        }
        if xs > lo {
            let cand = Frac { num: xs - lo, den };
            if cand.cmp(&best) == Ordering::Greater {
                best = cand;
            }
        }
    }
    Ok(best.to_rational())
}

/// `|1/N Σ_j e^{2πi h x_j}|` at about 77 significant digits.
pub fn weyl_sum(cloud: &PointCloud, h: i64) -> Result<Real> {
    if h == 0 {
        return Err(Error::UseMassInstead);
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let trig = TurnTrig::new();
    let hb = BigInt::from(h);
    let (mut re, mut im) = (Real::zero(), Real::zero());
    for x in &cloud.points {
        let theta = x.scale_int(&hb).to_rational();
        let (c, s) = trig.cos_sin(&theta);
        re = re + c;
        im = im + s;
    }
    let mag = (&re * &re + &im * &im).sqrt();
    Ok(mag.div_int(cloud.len()))
}

/// Largest circular gap between consecutive distinct points.
pub fn max_gap(cloud: &PointCloud) -> Result<BigRational> {
    let sorted = cloud.sorted_distinct()?;
    let g = gaps(&sorted);
    let best = g.iter().max_by(|a, b| a.cmp(b)).expect("at least one gap");
    Ok(best.to_rational())
}

/// Smallest positive circular distance between distinct points, or `None`
/// for a single distinct point.
pub fn min_gap(cloud: &PointCloud) -> Result<Option<BigRational>> {
    let sorted = cloud.sorted_distinct()?;
    if sorted.len() < 2 {
        return Ok(None);
    }
    let g = gaps(&sorted);
    Ok(g.iter().min_by(|a, b| a.cmp(b)).map(Frac::to_rational))
}

/// Output of [`epsilon_dense_witness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonWitness {
    /// Largest index `<= bound` at which `a(n+1) − a(n) < ε·a(n)` fails.
    pub n0: Option<u64>,
    /// Witness indices, a contiguous run.
    pub indices: RangeInclusive<u64>,
    /// `max_gap({a_i·x0 : i in indices})`.
    pub gap: BigRational,
}

/// Default search bound for `n0`.
pub const DEFAULT_SEARCH_BOUND: u64 = 4096;

/// Largest witness set the constructor will materialize.
pub const MAX_WITNESS: u64 = 1 << 22;

/// Constructs indices `S` such that `{a_i·x0 : i ∈ S}` is ε-dense.
///
/// Finds the last failure `n0 <= bound` of `a(n+1) − a(n) < ε·a(n)`, takes
/// the indices with `a(n0+1) <= a_i <= 1/x0`, and if the lowest point then
/// sits more than `ε` from its neighbour across 0, extends the run downward.
/// The returned gap is computed exactly.
pub fn epsilon_dense_witness(
    x0: &CirclePoint,
    spec: &SequenceSpec,
    eps: &BigRational,
    bound: u64,
) -> Result<EpsilonWitness> {
    if x0.is_zero() {
        return Err(Error::InvalidArgument("x0 must be non-zero".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let x = x0.to_rational();
    let scaled = |i: u64| -> Result<BigRational> { Ok(BigRational::from_integer(spec.term(i)?) * &x) };
    let cloud_gap = |r: &RangeInclusive<u64>| -> Result<BigRational> {
        let pts = r.clone().map(|i| Ok(CirclePoint::from_rational(&scaled(i)?))).collect::<Result<Vec<_>>>()?;
        max_gap(&PointCloud::new(pts, ""))
    };
    if *eps >= BigRational::one() {
        let indices = 0..=0;
        let gap = cloud_gap(&indices)?;
        return Ok(EpsilonWitness { n0: None, indices, gap });
    }

    // Last n <= bound where the ratio condition fails.
    let mut n0 = None;
    let mut cur = spec.term(0)?;
    for n in 0..=bound {
        let next = spec.term(n + 1)?;
        if next <= cur {
            return Err(Error::NotIncreasing(n));
        }
        let holds = BigRational::from_integer(&next - &cur) < BigRational::from_integer(cur.clone()) * eps;
        if !holds {
            n0 = Some(n);
        }
        cur = next;
    }
    if n0 == Some(bound) {
        return Err(Error::NonLacunarityNotWitnessed);
    }
    let start = n0.map_or(0, |n| n + 1);

    let one = BigRational::one();
    if scaled(start)? > one {
        return Err(Error::ShrinkX0(format!("a({start})·x0 already exceeds 1")));
    }
    // Extend upward while a_i·x0 <= 1.
    let mut hi = start;
    while scaled(hi + 1)? <= one {
        hi += 1;
        if hi - start > MAX_WITNESS {
            return Err(Error::GuardExceeded(format!("witness set beyond {MAX_WITNESS} indices")));
        }
    }
    // The run covers [a_lo·x0, a_hi·x0]; the gap across 0 is
    // (1 − a_hi·x0) + a_lo·x0. Extend downward until it is at most ε.
    let top_slack = &one - scaled(hi)?;
    let mut lo = start;
    while lo > 0 && &top_slack + scaled(lo)? > *eps {
        let prev = scaled(lo - 1)?;
        if prev.is_negative() {
            break;
        }
        lo -= 1;
    }
    let indices = lo..=hi;
    let gap = cloud_gap(&indices)?;
    if gap > *eps {
        return Err(Error::ShrinkX0(format!("witness gap {gap} exceeds eps {eps}")));
    }
    Ok(EpsilonWitness { n0, indices, gap })
}

/// Index boxes and a magnitude cap for [`triple_product_points`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleBudget {
    pub a: RangeInclusive<u64>,
    pub b: RangeInclusive<u64>,
    pub c: RangeInclusive<u64>,
    pub max_product: BigUint,
}

impl TripleBudget {
    /// Indices `1..=count` for each sequence.
    pub fn counts(count: u64, max_product: BigUint) -> TripleBudget {
        TripleBudget { a: 1..=count, b: 1..=count, c: 1..=count, max_product }
    }
}

fn term_list(spec: &SequenceSpec, range: &RangeInclusive<u64>, cap: &BigUint) -> Result<Vec<BigUint>> {
    let mut out = Vec::new();
    for n in range.clone() {
        let t = spec.term(n)?;
        if t.is_negative() {
            return Err(Error::InvalidSequence(format!("negative term at index {n}")));
        }
        let t = t.into_parts().1;
        if &t <= cap {
            out.push(t);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// All distinct products `a_n b_m c_k <= max_product` (indices from the
/// budget), each multiplied by `x` modulo 1, deduplicated and sorted.
pub fn triple_product_points(
    x: &IrrationalSurrogate,
    a: &SequenceSpec,
    b: &SequenceSpec,
    c: &SequenceSpec,
    budget: &TripleBudget,
) -> Result<PointCloud> {
    let resolution = BigRational::new(BigInt::one(), BigInt::from(1_000_000u32));
    x.check_budget(&budget.max_product, &resolution)?;
    let cap = &budget.max_product;
    let (ta, tb, tc) = (term_list(a, &budget.a, cap)?, term_list(b, &budget.b, cap)?, term_list(c, &budget.c, cap)?);

    let products: Vec<BigUint> = if cap.bits() <= 120 {
        let cap = cap.to_u128().expect("fits");
        let small = |v: &[BigUint]| v.iter().map(|t| t.to_u128().expect("below cap")).collect::<Vec<_>>();
        let (sa, sb, sc) = (small(&ta), small(&tb), small(&tc));
        let mut ab: Vec<u128> = Vec::new();
        for &u in &sa {
            for &v in &sb {
                match u.checked_mul(v) {
                    Some(p) if p <= cap => ab.push(p),
                    _ => {}
                }
            }
        }
        ab.sort_unstable();
        ab.dedup();
        let mut abc: Vec<u128> = Vec::new();
        for &p in &ab {
            for &w in &sc {
                match p.checked_mul(w) {
                    Some(r) if r <= cap => abc.push(r),
                    _ => {}
                }
            }
        }
        abc.sort_unstable();
        abc.dedup();
        abc.into_iter().map(BigUint::from).collect()
    } else {
        let mut ab: Vec<BigUint> = Vec::new();
        for u in &ta {
            for v in &tb {
                let p = u * v;
                if &p <= cap {
                    ab.push(p);
                }
            }
        }
        ab.sort_unstable();
        ab.dedup();
        let mut abc = Vec::new();
        for p in &ab {
            for w in &tc {
                let r = p * w;
                if &r <= cap {
                    abc.push(r);
                }
            }
        }
        abc.sort_unstable();
        abc.dedup();
        abc
    };
    let mut points: Vec<CirclePoint> = products.iter().map(|k| x.point.scale(k)).collect();
    points.sort_unstable();
    points.dedup();
    let provenance = format!(
        "x={} (D={}); a={{{a}}} n in {:?}; b={{{b}}} m in {:?}; c={{{c}}} k in {:?}; max_product={}",
        x.tag, x.error_exponent, budget.a, budget.b, budget.c, budget.max_product
    );
    Ok(PointCloud::new(points, provenance))
}

/// Exceptional grid points of a scan and their covering counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub q: u64,
    pub lo: BigRational,
    pub hi: BigRational,
    pub m: u64,
    /// Numerators `j` of the exceptional grid points `j/Q`.
    pub exceptional: Vec<u64>,
    /// `(δ, N_δ)` for `δ = 2^i/Q`, `δ <= 1/2`.
    pub covering: Vec<(BigRational, u64)>,
}

/// Grid points `j/Q` whose orbit `{a_m·j/Q : 1 <= m <= M}` misses the open
/// interval `(lo, hi)`.
pub fn exceptional_scan(spec: &SequenceSpec, lo: &BigRational, hi: &BigRational, q: u64, m: u64) -> Result<ScanReport> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if lo < &zero || hi > &one || lo >= hi || (hi - lo) >= one {
        return Err(Error::InvalidArgument(format!("interval ({lo}, {hi}) must satisfy 0 < |I| < 1")));
    }
    if q == 0 || m == 0 {
        return Err(Error::InvalidArgument("Q and M must be positive".into()));
    }
    let limit = BigRational::from_integer(1_000_000.into()) / (hi - lo);
    if BigRational::from_integer(q.into()) > limit {
        return Err(Error::GuardExceeded(format!("Q = {q} exceeds 10^6/|I|")));
    }
    let qr = BigInt::from(q);
    // inside[r] iff r/Q lies in (lo, hi)
    let inside: Vec<bool> = (0..q)
        .map(|r| {
            let v = BigRational::new(r.into(), qr.clone());
            &v > lo && &v < hi
        })
        .collect();
    let ev = spec.mod_evaluator(q)?;
    let mut mults: Vec<u64> = (1..=m).map(|i| ev.eval(i)).collect::<Result<_>>()?;
    mults.sort_unstable();
    mults.dedup();
    let exceptional: Vec<u64> =
        (0..q).filter(|&j| !mults.iter().any(|&a| inside[((a as u128 * j as u128) % q as u128) as usize])).collect();
    let mut covering = Vec::new();
    let mut step = 1u64;
    while BigRational::new(step.into(), qr.clone()) <= BigRational::new(1.into(), 2.into()) {
        let mut cells: Vec<u64> = exceptional.iter().map(|j| j / step).collect();
        cells.dedup();
        covering.push((BigRational::new(step.into(), qr.clone()), cells.len() as u64));
        step *= 2;
    }
    Ok(ScanReport { q, lo: lo.clone(), hi: hi.clone(), m, exceptional, covering })
}

/// Box-counting counts over a scale window and their log-log slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDimension {
    pub delta_min: BigRational,
    pub delta_max: BigRational,
    /// `(δ, N_δ)` from `δ_max` down to `δ_min`.
    pub counts: Vec<(BigRational, u64)>,
    /// Least-squares slope of `ln N_δ` against `ln(1/δ)`.
    pub slope: Real,
}

/// Number of grid cells `[kδ, (k+1)δ)` containing a point.
pub fn box_count(cloud: &PointCloud, delta: &BigRational) -> Result<u64> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let dn = delta.numer().magnitude();
    let dd = delta.denom().magnitude();
    let mut cells: Vec<BigUint> = cloud.points.iter().map(|x| (x.numer() * dd) / (x.denom() * dn)).collect();
    cells.sort_unstable();
    cells.dedup();
    Ok(cells.len() as u64)
}

/// Integer `b` with `b^k = r`, if one exists.
fn exact_root(r: &BigRational, k: u32) -> Option<BigUint> {
    if !r.is_integer() || k == 0 {
        return None;
    }
    let n = r.numer().magnitude();
    let b = n.nth_root(k);
    (num_traits::pow(b.clone(), k as usize) == *n).then_some(b)
}

/// Geometrically spaced scales from `δ_max` down to `δ_min`.
///
/// Exact when `δ_max/δ_min` is a perfect `(scales−1)`-th power, otherwise
/// each scale is rounded to a rational with a `2^64` denominator.
pub fn geometric_scales(delta_min: &BigRational, delta_max: &BigRational, scales: usize) -> Vec<BigRational> {
    let ratio = delta_max / delta_min;
    let steps = (scales - 1) as u32;
    if let Some(b) = exact_root(&ratio, steps) {
        let b = BigInt::from(b);
        return (0..scales).map(|i| delta_max / BigRational::from_integer(num_traits::pow(b.clone(), i))).collect();
    }
    let ln_ratio = Real::ln_rational(&ratio);
    let two64 = BigInt::one() << 64u32;
    (0..scales)
        .map(|i| {
            // δ_max · exp(−i/steps · ln ratio), evaluated via its logarithm.
            let target = Real::ln_rational(delta_max) - ln_ratio.div_int(steps as u64) * Real::from_int(i as u64);
            let num = target.exp().floor_mul(&two64);
            BigRational::new(num.max(BigInt::one()), two64.clone())
        })
        .collect()
}

/// Box-counting slope over `scales` geometric scales in `[δ_min, δ_max]`.
pub fn box_dimension_estimate(
    cloud: &PointCloud,
    delta_min: &BigRational,
    delta_max: &BigRational,
    scales: usize,
) -> Result<BoxDimension> {
    let half = BigRational::new(1.into(), 2.into());
    if !delta_min.is_positive() || delta_min >= delta_max || *delta_max > half || scales < 2 {
        return Err(Error::DegenerateWindow(format!(
            "need 0 < δ_min < δ_max <= 1/2 and at least 2 scales, got [{delta_min}, {delta_max}] x {scales}"
        )));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let deltas = geometric_scales(delta_min, delta_max, scales);
    let counts = deltas.into_iter().map(|d| box_count(cloud, &d).map(|n| (d, n))).collect::<Result<Vec<_>>>()?;
    let us: Vec<Real> = counts.iter().map(|(d, _)| -Real::ln_rational(d)).collect();
    let vs: Vec<Real> = counts.iter().map(|(_, n)| Real::ln_uint(&BigUint::from(*n))).collect();
    let slope = least_squares_slope(&us, &vs)?;
    Ok(BoxDimension { delta_min: delta_min.clone(), delta_max: delta_max.clone(), counts, slope })
}

fn least_squares_slope(us: &[Real], vs: &[Real]) -> Result<Real> {
    let n = us.len() as u64;
    let ubar = us.iter().cloned().sum::<Real>().div_int(n);
    let vbar = vs.iter().cloned().sum::<Real>().div_int(n);
    let mut sxy = Real::zero();
    let mut sxx = Real::zero();
    for (u, v) in us.iter().zip(vs) {
        let du = u.clone() - ubar.clone();
        let dv = v.clone() - vbar.clone();
        sxy = sxy + &du * &dv;
        sxx = sxx + &du * &du;
    }
    if sxx.is_zero() {
        return Err(Error::DegenerateWindow("all scales coincide".into()));
    }
    Ok(sxy.div(&sxx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::TargetTag;

    fn cp(n: u64, d: u64) -> CirclePoint {
        CirclePoint::new(n, d).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn grid(n: u64) -> PointCloud {
        PointCloud::new((0..n).map(|k| cp(k, n)).collect(), "grid")
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(star_discrepancy(&grid(8)).unwrap(), r(1, 8));
        let centered = PointCloud::new((1..=10).map(|i| cp(2 * i - 1, 20)).collect(), "c");
        assert_eq!(star_discrepancy(&centered).unwrap(), r(1, 20));
        assert_eq!(star_discrepancy(&PointCloud::new(vec![CirclePoint::zero()], "")).unwrap(), r(1, 1));
        assert_eq!(star_discrepancy(&PointCloud::new(vec![], "")), Err(Error::EmptyCloud));
    }

    #[test]
    fn weyl_examples() {
        let g = grid(12);
        for h in [1i64, 5, -7, 11, 13] {
            let w = weyl_sum(&g, h).unwrap();
            assert!(w.approx_eq(&Real::zero(), 133), "h={h}: {w}");
        }
        assert!(weyl_sum(&g, 12).unwrap().approx_eq(&Real::one(), 200));
        let same = PointCloud::new(vec![cp(2, 7); 5], "");
        assert!(weyl_sum(&same, 3).unwrap().approx_eq(&Real::one(), 200));
        assert_eq!(weyl_sum(&g, 0), Err(Error::UseMassInstead));
    }

    #[test]
    fn gap_examples() {
        let two = PointCloud::new(vec![CirclePoint::zero(), cp(1, 2)], "");
        assert_eq!(max_gap(&two).unwrap(), r(1, 2));
        assert_eq!(max_gap(&grid(9)).unwrap(), r(1, 9));
        let three = PointCloud::new(vec![CirclePoint::zero(), cp(1, 4), cp(3, 8)], "");
        assert_eq!(max_gap(&three).unwrap(), r(5, 8));
        assert_eq!(min_gap(&three).unwrap(), Some(r(1, 8)));
        assert_eq!(max_gap(&PointCloud::new(vec![cp(1, 3)], "")).unwrap(), r(1, 1));
    }

    #[test]
    fn epsilon_density_examples() {
        let id = SequenceSpec::polynomial("m").unwrap();
        let w = epsilon_dense_witness(&cp(1, 1000), &id, &r(1, 100), DEFAULT_SEARCH_BOUND).unwrap();
        assert_eq!(w.n0, Some(100));
        assert!(*w.indices.start() <= 101 && *w.indices.end() >= 1000);
        assert!(w.gap <= r(1, 100));
        let w = epsilon_dense_witness(&cp(1, 7), &id, &r(1, 1), 10).unwrap();
        assert_eq!(w.indices.clone().count(), 1);
        let pow2 = SequenceSpec::geometric(2).unwrap();
        assert_eq!(epsilon_dense_witness(&cp(1, 1000), &pow2, &r(1, 10), 64), Err(Error::NonLacunarityNotWitnessed));
        let sq = SequenceSpec::polynomial("m^2+1").unwrap();
        assert!(matches!(epsilon_dense_witness(&cp(1, 2), &sq, &r(1, 100), 1000), Err(Error::ShrinkX0(_))));
    }

    #[test]
    fn triple_product_examples() {
        let one = SequenceSpec::constant(1).unwrap();
        let x = crate::torus::approx_irrational(&TargetTag::Sqrt2, 60).unwrap();
        let b = TripleBudget::counts(4, BigUint::from(1000u32));
        let cloud = triple_product_points(&x, &one, &one, &one, &b).unwrap();
        assert_eq!(cloud.points, vec![x.point.clone()]);

        let fifth = crate::torus::approx_irrational(&TargetTag::Rational(cp(1, 5)), 10).unwrap();
        let id = SequenceSpec::polynomial("m").unwrap();
        let b = TripleBudget { a: 1..=3, b: 1..=1, c: 1..=1, max_product: BigUint::from(100u32) };
        let cloud = triple_product_points(&fifth, &id, &one, &one, &b).unwrap();
        assert_eq!(cloud.points, vec![cp(1, 5), cp(2, 5), cp(3, 5)]);

        let tight = TripleBudget::counts(3, BigUint::from(10u32).pow(60));
        assert!(matches!(triple_product_points(&x, &id, &one, &one, &tight), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn scan_examples() {
        let id = SequenceSpec::polynomial("m").unwrap();
        let rep = exceptional_scan(&id, &r(2, 5), &r(3, 5), 10, 10).unwrap();
        assert!(rep.exceptional.contains(&0));
        assert!(!rep.exceptional.contains(&1));
        let one = SequenceSpec::constant(1).unwrap();
        let rep = exceptional_scan(&one, &r(2, 5), &r(3, 5), 10, 5).unwrap();
        assert_eq!(rep.exceptional, vec![0, 1, 2, 3, 4, 6, 7, 8, 9]);
        assert_eq!(rep.covering[0], (r(1, 10), 9));
        assert!(exceptional_scan(&id, &r(0, 1), &r(1, 1), 10, 10).is_err());
        assert!(matches!(exceptional_scan(&id, &r(0, 1), &r(1, 2), 3_000_000, 1), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn box_dimension_examples() {
        let g = grid(729);
        let est = box_dimension_estimate(&g, &r(1, 729), &r(1, 3), 6).unwrap();
        assert_eq!(est.counts.iter().map(|c| c.1).collect::<Vec<_>>(), [3, 9, 27, 81, 243, 729]);
        assert!(est.slope.approx_eq(&Real::one(), 200));
        let single = PointCloud::new(vec![cp(1, 3)], "");
        assert!(box_dimension_estimate(&single, &r(1, 100), &r(1, 4), 5).unwrap().slope.is_zero());
        assert!(matches!(box_dimension_estimate(&g, &r(1, 2), &r(1, 4), 5), Err(Error::DegenerateWindow(_))));
        let scales = geometric_scales(&r(1, 100), &r(1, 2), 4);
        assert_eq!(scales.len(), 4);
        assert_eq!(scales[0], r(1, 2));
        let last = scales[3].clone() - r(1, 100);
        assert!(last.abs() < r(1, 1_000_000_000));
    }
}
