use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;
use timesq_core::density::{
    box_count, exceptional_scan, max_gap, min_gap, star_discrepancy, triple_product_points, weyl_sum, PointCloud,
    TripleBudget,
};
use timesq_core::hp::Real;
use timesq_core::torus::approx_irrational;
use timesq_core::{CirclePoint, SequenceSpec, TargetTag};

fn cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((0u64..1000, 1u64..1000), 1..60).prop_map(|v| {
        let pts = v.into_iter().map(|(a, b)| CirclePoint::new(a % b, b).unwrap()).collect();
        PointCloud::new(pts, "random")
    })
}

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn distinct(c: &PointCloud) -> usize {
    let mut v = c.points.clone();
    v.sort();
    v.dedup();
    v.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gap_bounds(c in cloud()) {
        let n = distinct(&c) as i64;
        let g = max_gap(&c).unwrap();
        prop_assert!(g >= ratio(1, n));
        if let Some(m) = min_gap(&c).unwrap() {
            prop_assert!(m <= ratio(1, n));
            prop_assert!(m <= g);
        }
    }

    #[test]
    fn gap_is_at_most_twice_discrepancy(c in cloud()) {
        let d = star_discrepancy(&c).unwrap();
        prop_assert!(d >= ratio(1, 2 * c.len() as i64));
        prop_assert!(max_gap(&c).unwrap() <= d * ratio(2, 1));
    }

    #[test]
    fn weyl_sum_is_at_most_one(c in cloud(), h in 1i64..50) {
        prop_assert!(weyl_sum(&c, h).unwrap() <= Real::one());
    }

    #[test]
    fn adding_points_never_widens_the_gap(c in cloud(), extra in cloud()) {
        let mut all = c.points.clone();
        all.extend(extra.points.iter().cloned());
        prop_assert!(max_gap(&PointCloud::new(all, "union")).unwrap() <= max_gap(&c).unwrap());
    }

    #[test]
    fn box_counts_grow_as_scale_shrinks(c in cloud(), k in 1u32..10) {
        let coarse = box_count(&c, &ratio(1, 1 << k)).unwrap();
        let fine = box_count(&c, &ratio(1, 1 << (k + 1))).unwrap();
        prop_assert!(coarse <= fine && fine <= 2 * coarse);
        prop_assert!(fine as usize <= distinct(&c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn exceptional_set_shrinks_with_more_terms(c in 2u64..7, q in 10u64..400, m in 1u64..20, lo in 0i64..8) {
        let spec = SequenceSpec::geometric(c).unwrap();
        let (a, b) = (ratio(lo, 10), ratio(lo + 2, 10));
        let short = exceptional_scan(&spec, &a, &b, q, m).unwrap();
        let long = exceptional_scan(&spec, &a, &b, q, m + 5).unwrap();
        prop_assert!(long.exceptional.iter().all(|j| short.exceptional.contains(j)));
        for w in short.covering.windows(2) {
            prop_assert!(w[0].1 >= w[1].1);
        }
    }

    #[test]
    fn triple_gap_shrinks_with_budget(n in 2u64..25) {
        let x = approx_irrational(&TargetTag::Sqrt3, 40).unwrap();
        let a = SequenceSpec::polynomial("m").unwrap();
        let c = SequenceSpec::geometric(2).unwrap();
        let cap = BigUint::from(1u64 << 40);
        let small = TripleBudget { a: 1..=n, b: 1..=n, c: 0..=2, max_product: cap.clone() };
        let large = TripleBudget { a: 1..=2 * n, b: 1..=2 * n, c: 0..=4, max_product: cap };
        let g1 = max_gap(&triple_product_points(&x, &a, &a, &c, &small).unwrap()).unwrap();
        let g2 = max_gap(&triple_product_points(&x, &a, &a, &c, &large).unwrap()).unwrap();
        prop_assert!(g2 <= g1);
    }
}
