//! Right-associated power towers `b₀^(b₁^(⋯^(b_{k-1}^top)))`, evaluated
//! exactly when small and modulo `m` through the totient chain otherwise.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{pow_mod, totient_chain};
use crate::error::{Error, Result};

/// Largest term, in bits, that [`PowerTower::value`] will materialize.
pub const MAX_TERM_BITS: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTower {
    pub bases: Vec<BigUint>,
    pub top: BigUint,
}

/// Size knowledge carried up the tower: either the exact value (when it
/// fits in a `u64`) or the fact that it is at least `2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Size {
    Exact(u64),
    Huge,
}

fn pow_size(base: &BigUint, e: Size) -> Size {
    match e {
        Size::Exact(0) => Size::Exact(1),
        _ if base.is_zero() => Size::Exact(0),
        _ if base.is_one() => Size::Exact(1),
        Size::Huge => Size::Huge,
        Size::Exact(v) => {
            if base.bits().saturating_mul(v) > 64 + v {
                // base >= 2^(bits-1), so base^v >= 2^((bits-1)·v) >= 2^64.
                return Size::Huge;
            }
            let b = match base.to_u64() {
                Some(b) => b,
                None => return Size::Huge,
            };
            let mut acc: u64 = 1;
            for _ in 0..v {
                match acc.checked_mul(b) {
                    Some(x) => acc = x,
                    None => return Size::Huge,
                }
            }
            Size::Exact(acc)
        }
    }
}

/// Precomputed totient chain for evaluating many towers modulo one `m`.
#[derive(Clone, Debug)]
pub struct TowerModulus {
    chain: Vec<u64>,
}

impl TowerModulus {
    pub fn new(m: u64) -> TowerModulus {
        assert!(m >= 1, "modulus must be positive");
        TowerModulus { chain: totient_chain(m) }
    }

    pub fn modulus(&self) -> u64 {
        self.chain[0]
    }

    fn at(&self, level: usize) -> u64 {
        self.chain.get(level).copied().unwrap_or(1)
    }
}

impl PowerTower {
    pub fn new(bases: Vec<BigUint>, top: BigUint) -> PowerTower {
        PowerTower { bases, top }
    }

    /// Exact value, refusing anything above [`MAX_TERM_BITS`].
    pub fn value(&self) -> Result<BigUint> {
        let mut e = self.top.clone();
        for b in self.bases.iter().rev() {
            if e.is_zero() {
                e = BigUint::one();
                continue;
            }
            if b.is_zero() || b.is_one() {
                e = b.clone();
                continue;
            }
            // (bits - 1)·e is a lower bound on the bit length of b^e.
            let exp = e.to_u64().filter(|&x| (b.bits() - 1).saturating_mul(x) <= MAX_TERM_BITS);
            let Some(x) = exp else {
                return Err(self.too_large());
            };
            e = num_traits::pow(b.clone(), x as usize);
            if e.bits() > MAX_TERM_BITS {
                return Err(self.too_large());
            }
        }
        Ok(e)
    }

    fn too_large(&self) -> Error {
        Error::TooLarge(format!(
            "tower of height {} with a {}-bit top exceeds {} bits",
            self.bases.len(),
            self.top.bits(),
            MAX_TERM_BITS
        ))
    }

    /// Value modulo `m`.
    pub fn value_mod(&self, m: u64) -> u64 {
        self.value_mod_with(&TowerModulus::new(m))
    }

    pub fn value_mod_with(&self, tm: &TowerModulus) -> u64 {
        tower_mod(&self.bases, &self.top, tm)
    }
}

/// `bases[0]^(bases[1]^(⋯^top)) mod tm.modulus()`.
pub fn tower_mod(bases: &[BigUint], top: &BigUint, tm: &TowerModulus) -> u64 {
    eval_level(bases, top, 0, tm).0
}

fn eval_level(bases: &[BigUint], top: &BigUint, level: usize, tm: &TowerModulus) -> (u64, Size) {
    let m = tm.at(level);
    if level == bases.len() {
        let size = top.to_u64().map_or(Size::Huge, Size::Exact);
        let r = (top % m).to_u64().expect("residue below a u64 modulus");
        return (r, size);
    }
    let a = &bases[level];
    let a_mod = (a % m).to_u64().expect("residue below a u64 modulus");
    let (e_res, e_size) = eval_level(bases, top, level + 1, tm);
    let size = pow_size(a, e_size);
    let r = match e_size {
        Size::Exact(v) => pow_mod(a_mod, v, m),
        // e >= 2^64 > log2(m): a^e ≡ a^((e mod φ(m)) + φ(m)) (mod m).
        Size::Huge => pow_mod(a_mod, e_res + tm.at(level + 1), m),
    };
    (r, size)
}

/// `t` with `t₀ = top` and `t_{i+1} = base^{t_i}`, taken to `height` levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerExponent {
    pub base: u64,
    pub height: u32,
    pub top: BigUint,
}

impl TowerExponent {
    pub fn new(base: u64, height: u32, top: impl Into<BigUint>) -> Result<TowerExponent> {
        let top = top.into();
        if base < 2 {
            return Err(Error::InvalidSequence(format!("tower base {base} must be at least 2")));
        }
        if top.is_zero() {
            return Err(Error::InvalidSequence("tower top must be at least 1".into()));
        }
        Ok(TowerExponent { base, height, top })
    }

    fn as_tower_over(&self, a: &BigUint) -> PowerTower {
        let mut bases = Vec::with_capacity(self.height as usize + 1);
        bases.push(a.clone());
        bases.extend((0..self.height).map(|_| BigUint::from(self.base)));
        PowerTower::new(bases, self.top.clone())
    }
}

/// `a^t mod m` for a tower exponent `t`.
pub fn powmod_tower(a: &BigUint, t: &TowerExponent, m: u64) -> u64 {
    t.as_tower_over(a).value_mod(m)
}
