use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use timesq_core::arith::{gcd, pow_mod};
use timesq_core::seqgen::{powmod_tower, Poly, TowerExponent};
use timesq_core::SequenceSpec;

fn spec() -> impl Strategy<Value = SequenceSpec> {
    let leaf = prop_oneof![
        (2u64..12).prop_map(|c| SequenceSpec::geometric(c).unwrap()),
        (1i64..5, -5i64..5, -5i64..5)
            .prop_map(|(a, b, c)| SequenceSpec::Polynomial { p: Poly::new(vec![c.into(), b.into(), a.into()]) }),
        (2u64..5, 2u64..4).prop_map(|(c, d)| SequenceSpec::double_exp(c, d).unwrap()),
        (1u64..4, 1u64..4).prop_map(|(a, b)| SequenceSpec::floor_power(a + b, b).unwrap()),
        (2u64..4, 1u32..3).prop_map(|(b, h)| SequenceSpec::tower(b, h, "m+1").unwrap()),
    ];
    leaf.prop_recursive(1, 4, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| SequenceSpec::product(a, b).unwrap()))
}

fn exact_mod(spec: &SequenceSpec, n: u64, m: u64) -> Option<u64> {
    let t = spec.term(n).ok()?;
    let r = t.mod_floor_compat(m);
    Some(r)
}

trait ModFloor {
    fn mod_floor_compat(&self, m: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_compat(&self, m: u64) -> u64 {
        let m = BigInt::from(m);
        (((self % &m) + &m) % &m).to_u64().unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn term_mod_agrees_with_exact(s in spec(), n in 0u64..6, m in 1u64..1_000_000) {
        if let Some(expected) = exact_mod(&s, n, m) {
            prop_assert_eq!(s.term_mod(n, m).unwrap(), expected);
        }
    }

    #[test]
    fn text_round_trip(s in spec()) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<SequenceSpec>().unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tower_matches_direct_exponentiation(a in 2u64..6, base in 2u64..6, height in 0u32..3, top in 1u64..4, m in 1u64..1_000_000) {
        let t = TowerExponent::new(base, height, top).unwrap();
        let mut e = BigUint::from(top);
        for _ in 0..height {
            e = num_traits::pow(BigUint::from(base), e.to_usize().unwrap());
        }
        let direct = BigUint::from(a).modpow(&e, &BigUint::from(m)).to_u64().unwrap();
        prop_assert_eq!(powmod_tower(&BigUint::from(a), &t, m), direct);
    }

    #[test]
    fn tower_respects_crt(a in 2u64..6, base in 2u64..4, height in 1u32..4, top in 1u64..4, m1 in 2u64..1000, m2 in 2u64..1000) {
        prop_assume!(gcd(m1, m2) == 1);
        let t = TowerExponent::new(base, height, top).unwrap();
        let whole = powmod_tower(&BigUint::from(a), &t, m1 * m2);
        prop_assert_eq!(whole % m1, powmod_tower(&BigUint::from(a), &t, m1));
        prop_assert_eq!(whole % m2, powmod_tower(&BigUint::from(a), &t, m2));
    }

    #[test]
    fn residues_match_term_mod(s in spec(), m in 1u64..100_000) {
        let bulk = s.residues(0..6, m).unwrap();
        for (n, r) in bulk.iter().enumerate() {
            prop_assert_eq!(*r, s.term_mod(n as u64, m).unwrap());
        }
    }

    #[test]
    fn geometric_residues_are_powers(c in 2u64..50, m in 1u64..1_000_000, n in 0u64..10_000) {
        let s = SequenceSpec::geometric(c).unwrap();
        prop_assert_eq!(s.term_mod(n, m).unwrap(), pow_mod(c, n, m));
    }
}

#[test]
fn zero_modulus_is_rejected_or_trivial() {
    let s = SequenceSpec::geometric(2).unwrap();
    assert!(s.term_mod(3, 0).is_err() || s.term_mod(3, 1).unwrap().is_zero());
}
