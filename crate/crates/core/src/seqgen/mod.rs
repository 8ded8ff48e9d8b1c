//! Integer sequences `a_0, a_1, …` with exact and modular term evaluation.

pub mod poly;
pub mod tower;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{mul_mod, pow_mod};
use crate::error::{Error, Result};

pub use poly::Poly;
pub use tower::{powmod_tower, PowerTower, TowerExponent, TowerModulus};

/// A declarative integer sequence indexed from `n = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceSpec {
    /// `c^n`.
    Geometric { c: BigUint },
    /// `p(n)`.
    Polynomial { p: Poly },
    /// `c^(d^n)`.
    DoubleExp { c: BigUint, d: BigUint },
    /// `base^(base^(⋯^p(n)))` with `height` copies of `base`.
    Tower { base: BigUint, height: u32, top: Poly },
    /// `⌊n^α⌋`.
    FloorPower { alpha: BigRational },
    /// `a(n)·b(n)`.
    Product(Box<SequenceSpec>, Box<SequenceSpec>),
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSequence(msg.into())
}

impl SequenceSpec {
    pub fn geometric(c: u64) -> Result<SequenceSpec> {
        let s = SequenceSpec::Geometric { c: c.into() };
        s.validate()?;
        Ok(s)
    }

    pub fn polynomial(p: &str) -> Result<SequenceSpec> {
        let s = SequenceSpec::Polynomial { p: p.parse()? };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(c: u64) -> Result<SequenceSpec> {
        let s = SequenceSpec::Polynomial { p: Poly::constant(c) };
        s.validate()?;
        Ok(s)
    }

    pub fn double_exp(c: u64, d: u64) -> Result<SequenceSpec> {
        let s = SequenceSpec::DoubleExp { c: c.into(), d: d.into() };
        s.validate()?;
        Ok(s)
    }

    pub fn tower(base: u64, height: u32, top: &str) -> Result<SequenceSpec> {
        let s = SequenceSpec::Tower { base: base.into(), height, top: top.parse()? };
        s.validate()?;
        Ok(s)
    }

    pub fn floor_power(num: u64, den: u64) -> Result<SequenceSpec> {
        if den == 0 {
            return Err(invalid("floor_power exponent has zero denominator"));
        }
        let s = SequenceSpec::FloorPower { alpha: BigRational::new(num.into(), den.into()) };
        s.validate()?;
        Ok(s)
    }

    pub fn product(a: SequenceSpec, b: SequenceSpec) -> Result<SequenceSpec> {
        let s = SequenceSpec::Product(Box::new(a), Box::new(b));
        s.validate()?;
        Ok(s)
    }

    /// Checks the parameter constraints of each kind.
    pub fn validate(&self) -> Result<()> {
        let two = BigUint::from(2u32);
        match self {
            SequenceSpec::Geometric { c } if *c < two => {
                Err(invalid(format!("geometric ratio {c} must be at least 2")))
            }
            SequenceSpec::Polynomial { p } if !p.leading().is_positive() => {
                Err(invalid(format!("polynomial {p} needs a positive leading coefficient")))
            }
            SequenceSpec::DoubleExp { c, d } if *c < two || *d < two => {
                Err(invalid("double_exp needs c >= 2 and d >= 2"))
            }
            SequenceSpec::Tower { base, height, top } => {
                if *base < two {
                    Err(invalid("tower base must be at least 2"))
                } else if *height == 0 {
                    Err(invalid("tower height must be at least 1"))
                } else if top.degree() == 0 || !top.leading().is_positive() {
                    Err(invalid(format!("tower top {top} must be non-constant with positive leading coefficient")))
                } else {
                    Ok(())
                }
            }
            SequenceSpec::FloorPower { alpha } if *alpha < BigRational::one() => {
                Err(invalid(format!("floor_power exponent {alpha} must be at least 1")))
            }
            SequenceSpec::FloorPower { alpha } if alpha.numer().bits() > 32 => {
                Err(invalid("floor_power exponent numerator is too large"))
            }
            SequenceSpec::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    fn tower_top(top: &Poly, n: u64) -> Result<BigUint> {
        let t = top.eval(&BigInt::from(n));
        match t.sign() {
            Sign::Minus => Err(invalid(format!("tower top is negative at n = {n}"))),
            _ => Ok(t.into_parts().1),
        }
    }

    /// The exact `n`-th term.
    pub fn term(&self, n: u64) -> Result<BigInt> {
        Ok(match self {
            SequenceSpec::Geometric { c } => PowerTower::new(alloc::vec![c.clone()], n.into()).value()?.into(),
            SequenceSpec::Polynomial { p } => p.eval(&BigInt::from(n)),
            SequenceSpec::DoubleExp { c, d } => {
                PowerTower::new(alloc::vec![c.clone(), d.clone()], n.into()).value()?.into()
            }
            SequenceSpec::Tower { base, height, top } => {
                let bases = alloc::vec![base.clone(); *height as usize];
                PowerTower::new(bases, Self::tower_top(top, n)?).value()?.into()
            }
            SequenceSpec::FloorPower { alpha } => {
                let a = alpha.numer().to_u32().expect("validated numerator");
                let b = alpha.denom().to_u32().unwrap_or(u32::MAX);
                if (a as u64).saturating_mul(64 - n.leading_zeros() as u64) > tower::MAX_TERM_BITS {
                    return Err(Error::TooLarge(format!("floor_power term at n = {n}")));
                }
                BigInt::from(num_traits::pow(BigUint::from(n), a as usize).nth_root(b))
            }
            SequenceSpec::Product(a, b) => a.term(n)? * b.term(n)?,
        })
    }

    /// `term(n) mod m` in `[0, m)`, without materializing the term.
    pub fn term_mod(&self, n: u64, m: u64) -> Result<u64> {
        self.mod_evaluator(m)?.eval(n)
    }

    /// A reusable evaluator for many indices modulo a fixed `m`.
    pub fn mod_evaluator(&self, m: u64) -> Result<ModEvaluator<'_>> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be at least 1".into()));
        }
        let tm = match self {
            SequenceSpec::DoubleExp { .. } | SequenceSpec::Tower { .. } => Some(TowerModulus::new(m)),
            _ => None,
        };
        let parts = match self {
            SequenceSpec::Product(a, b) => Some(Box::new((a.mod_evaluator(m)?, b.mod_evaluator(m)?))),
            _ => None,
        };
        let bases = match self {
            SequenceSpec::DoubleExp { c, d } => alloc::vec![c.clone(), d.clone()],
            SequenceSpec::Tower { base, height, .. } => alloc::vec![base.clone(); *height as usize],
            _ => Vec::new(),
        };
        let c_mod = match self {
            SequenceSpec::Geometric { c } => (c % m).to_u64().expect("below modulus"),
            _ => 0,
        };
        Ok(ModEvaluator { spec: self, m, tm, parts, bases, c_mod })
    }

    /// `[term_mod(n, m) for n in range]`.
    pub fn residues(&self, range: core::ops::Range<u64>, m: u64) -> Result<Vec<u64>> {
        let ev = self.mod_evaluator(m)?;
        if let SequenceSpec::Geometric { .. } = self {
            // Successive products avoid a modular power per index.
            let mut out = Vec::with_capacity(range.end.saturating_sub(range.start) as usize);
            let mut cur = pow_mod(ev.c_mod, range.start, m);
            for _ in range {
                out.push(cur);
                cur = mul_mod(cur, ev.c_mod, m);
            }
            return Ok(out);
        }
        range.map(|n| ev.eval(n)).collect()
    }
}

/// Evaluates `term_mod(·, m)` for one spec and modulus.
#[derive(Clone, Debug)]
pub struct ModEvaluator<'a> {
    spec: &'a SequenceSpec,
    m: u64,
    tm: Option<TowerModulus>,
    parts: Option<Box<(ModEvaluator<'a>, ModEvaluator<'a>)>>,
    bases: Vec<BigUint>,
    c_mod: u64,
}

impl ModEvaluator<'_> {
    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn eval(&self, n: u64) -> Result<u64> {
        let m = self.m;
        Ok(match self.spec {
            SequenceSpec::Geometric { .. } => pow_mod(self.c_mod, n, m),
            SequenceSpec::Polynomial { p } => p.eval_mod(n, m),
            SequenceSpec::DoubleExp { .. } => {
                tower::tower_mod(&self.bases, &BigUint::from(n), self.tm.as_ref().expect("chain"))
            }
            SequenceSpec::Tower { top, .. } => {
                let t = SequenceSpec::tower_top(top, n)?;
                tower::tower_mod(&self.bases, &t, self.tm.as_ref().expect("chain"))
            }
            SequenceSpec::FloorPower { .. } => {
                let t = self.spec.term(n)?;
                t.mod_floor(&BigInt::from(m)).to_u64().expect("below modulus")
            }
            SequenceSpec::Product(..) => {
                let (a, b) = &**self.parts.as_ref().expect("product parts");
                mul_mod(a.eval(n)?, b.eval(n)?, m)
            }
        })
    }
}

/// Result of [`ratio_test`]: the largest `a(n+1)/a(n) − 1` and where it occurs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub max_deviation: BigRational,
    pub at: u64,
}

impl RatioReport {
    /// Non-lacunary at this scale when the deviation is below `threshold`.
    pub fn non_lacunary_at(&self, threshold: &BigRational) -> bool {
        &self.max_deviation < threshold
    }
}

/// Exact `max |a(n+1)/a(n) − 1|` over `n` in `range`.
pub fn ratio_test(spec: &SequenceSpec, range: RangeInclusive<u64>) -> Result<RatioReport> {
    let (lo, hi) = range.into_inner();
    if lo > hi {
        return Err(Error::InvalidArgument("empty index range".into()));
    }
    let mut best: Option<RatioReport> = None;
    let mut cur = spec.term(lo)?;
    for n in lo..=hi {
        let next = spec.term(n + 1)?;
        if next <= cur {
            return Err(Error::NotIncreasing(n));
        }
        if !cur.is_positive() {
            return Err(invalid(format!("term {n} is not positive")));
        }
        let dev = BigRational::new(&next - &cur, cur.clone());
        if best.as_ref().map_or(true, |b| dev > b.max_deviation) {
            best = Some(RatioReport { max_deviation: dev, at: n });
        }
        cur = next;
    }
    Ok(best.expect("non-empty range"))
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Geometric { c } => write!(f, "kind=geometric, c={c}"),
            SequenceSpec::Polynomial { p } => write!(f, "kind=polynomial, p=\"{p}\""),
            SequenceSpec::DoubleExp { c, d } => write!(f, "kind=double_exp, c={c}, d={d}"),
            SequenceSpec::Tower { base, height, top } => {
                write!(f, "kind=tower, base={base}, height={height}, top=\"{top}\"")
            }
            SequenceSpec::FloorPower { alpha } => write!(f, "kind=floor_power, alpha={alpha}"),
            SequenceSpec::Product(a, b) => write!(f, "kind=product, a={{{a}}}, b={{{b}}}"),
        }
    }
}

/// Splits `k=v, k=v, …` at top-level commas, honouring quotes and braces.
fn split_fields(s: &str) -> Result<Vec<(&str, &str)>> {
    let mut out = Vec::new();
    let (mut depth, mut quoted, mut start) = (0i32, false, 0usize);
    let bytes = s.as_bytes();
    for i in 0..=bytes.len() {
        let c = bytes.get(i).copied();
        match c {
            Some(b'"') => quoted = !quoted,
            Some(b'{') if !quoted => depth += 1,
            Some(b'}') if !quoted => depth -= 1,
            Some(b',') | None if !quoted && depth == 0 => {
                let field = s[start..i].trim();
                if !field.is_empty() {
                    let (k, v) =
                        field.split_once('=').ok_or_else(|| Error::Parse(format!("field `{field}` lacks `=`")))?;
                    out.push((k.trim(), v.trim()));
                }
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse("unbalanced braces".into()));
        }
    }
    if quoted || depth != 0 {
        return Err(Error::Parse("unterminated quote or brace".into()));
    }
    Ok(out)
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(v)
}

fn unbrace(v: &str) -> Result<&str> {
    v.strip_prefix('{')
        .and_then(|v| v.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("expected a braced sequence, got `{v}`")))
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// Parses the `kind=…, key=value` form produced by `Display`.
    fn from_str(s: &str) -> Result<SequenceSpec> {
        let fields = split_fields(s.trim())?;
        let get = |key: &str| -> Result<&str> {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse(format!("missing field `{key}` in `{s}`")))
        };
        let uint = |key: &str| -> Result<BigUint> {
            let v = unquote(get(key)?);
            BigUint::from_str(v).map_err(|_| Error::Parse(format!("field `{key}`: bad integer `{v}`")))
        };
        let kind = unquote(get("kind")?);
        let allowed: &[&str] = match kind {
            "geometric" => &["kind", "c"],
            "polynomial" => &["kind", "p"],
            "double_exp" => &["kind", "c", "d"],
            "tower" => &["kind", "base", "height", "top"],
            "floor_power" => &["kind", "alpha"],
            "product" => &["kind", "a", "b"],
            other => return Err(Error::Parse(format!("unknown sequence kind `{other}`"))),
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::Parse(format!("unknown field `{k}` for kind `{kind}`")));
        }
        let spec = match kind {
            "geometric" => SequenceSpec::Geometric { c: uint("c")? },
            "polynomial" => SequenceSpec::Polynomial { p: unquote(get("p")?).parse()? },
            "double_exp" => SequenceSpec::DoubleExp { c: uint("c")?, d: uint("d")? },
            "tower" => SequenceSpec::Tower {
                base: uint("base")?,
                height: uint("height")?.to_u32().ok_or_else(|| Error::Parse("tower height too large".into()))?,
                top: unquote(get("top")?).parse()?,
            },
            "floor_power" => {
                let v = unquote(get("alpha")?);
                let alpha = BigRational::from_str(v).map_err(|_| Error::Parse(format!("bad rational `{v}`")))?;
                SequenceSpec::FloorPower { alpha }
            }
            _ => SequenceSpec::Product(Box::new(unbrace(get("a")?)?.parse()?), Box::new(unbrace(get("b")?)?.parse()?)),
        };
        spec.validate()?;
        Ok(spec)
    }
}
