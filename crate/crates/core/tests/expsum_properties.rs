use proptest::prelude::*;

use zaremba_core::cf::gcd;
use zaremba_core::dimension::truncate_decimals;
use zaremba_core::ensemble::build_ensemble;
use zaremba_core::expsum::{
    classify_region, dirichlet_decompose, l2_ratio_report, partition_grid, region_mass,
    region_ranges, spectrum, threshold_arithmetic, Region, RegionParams, SpectrumHistogram,
};
use zaremba_core::Alphabet;

fn histogram() -> impl Strategy<Value = SpectrumHistogram> {
    prop::collection::vec((1u64..5_000, 1u64..20), 1..60).prop_map(SpectrumHistogram::from_pairs)
}

proptest! {
    #[test]
    fn magnitude_and_symmetry(h in histogram(), theta in 0.0f64..1.0) {
        let total = h.total() as f64;
        let s = h.s_n(theta);
        prop_assert!(s.norm() <= total * (1.0 + 1e-12));
        let c = h.s_n(1.0 - theta).conj();
        prop_assert!((c - s).norm() <= 1e-9 * total);
        prop_assert!((h.s_n(0.0).re - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn dirichlet_constraints(theta in 0.0f64..1.0, n in 2u64..1_000_000_000) {
        let p = dirichlet_decompose(theta, n);
        let root = (n as f64).sqrt();
        prop_assert_eq!(gcd(p.a as u128, p.q as u128), 1);
        prop_assert!(p.q as f64 <= root && p.a <= p.q);
        prop_assert!(p.q == 1 || (p.a >= 1 && p.a < p.q));
        prop_assert!(p.k.abs() <= root / p.q as f64 * (1.0 + 1e-12));
        prop_assert!((p.theta() - theta).abs() <= 1e-12 * theta.max(1e-3));
    }

    #[test]
    fn one_label_per_admissible_point(
        ln_n in 8.0f64..25.0,
        gamma in 0.0f64..0.3,
        nu in 1.0f64..=2.0,
        qt in 0.0f64..1.0,
        kt in 0.0f64..1.0,
    ) {
        let n = ln_n.exp() as u64;
        let p = RegionParams::new(n, gamma, 0.001, nu, 10).unwrap();
        prop_assume!(p.q_max() > 10);
        let q = 11 + ((p.q_max() - 11) as f64 * qt) as u64;
        let (lo, hi) = p.k_range(q).unwrap();
        let k = lo * (hi / lo).powf(kt);
        let r = classify_region(q, k, &p);
        prop_assert_ne!(r, Region::Outside);
        let i = r.number() as usize - 1;
        prop_assert!(region_ranges(q, k, &p)[i]);
        prop_assert_eq!(classify_region(q, -k, &p), r);
    }
}

#[test]
fn grids_partition_at_several_scales() {
    for (n, gamma, nu) in [
        (1e6 as u64, 0.125, 1.5),
        (1e8 as u64, 0.15, 1.0),
        (1e10 as u64, 0.1, 2.0),
    ] {
        let p = RegionParams::new(n, gamma, 0.001, nu, 10).unwrap();
        let g = partition_grid(&p, 256, 256).unwrap();
        assert_eq!(g.counts.iter().sum::<usize>(), g.points);
        assert_eq!((g.outside, g.inconsistent, g.uncovered), (0, 0, 0));
    }
}

#[test]
fn region_masses_stable_under_doubling() {
    let a = Alphabet::new([1, 2]).unwrap();
    let h = spectrum(&build_ensemble(&a, 10_000, 2.0).unwrap());
    let p = RegionParams::new(10_000, 0.2, 0.001, 1.5, 10).unwrap();
    let r = region_mass(&h, &p, 4.0, 1e-4).unwrap();
    assert!(r.share_change < 0.05);
    assert!(r.relative_gap < 1e-3);
    let dominant = r
        .regions
        .iter()
        .max_by(|x, y| x.share.total_cmp(&y.share))
        .unwrap();
    assert_eq!(dominant.region, Region::R2);
    // regions 1 and 3 need |K| >= xi1 or q > N^(gamma+5 eps0) with large |K|;
    // both are empty at N = 1e4
    for x in &r.regions {
        if matches!(x.region, Region::R1 | Region::R3) {
            assert_eq!((x.count, x.mass, x.share), (0, 0.0, 0.0));
        }
    }
}

#[test]
fn empirical_l2_constant_does_not_explode() {
    let a = Alphabet::new([1, 2]).unwrap();
    let c: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let h = spectrum(&build_ensemble(&a, n, 2.0).unwrap());
            l2_ratio_report(&h, n).unwrap().c_emp
        })
        .collect();
    // first run: 5.841, 5.484, 5.194
    assert!(c[2] <= 10.0 * c[0], "{c:?}");
    assert!(c.iter().all(|&x| x > 1.0 && x < 10.0), "{c:?}");
}

#[test]
fn printed_threshold_constants() {
    let b = threshold_arithmetic(1.5, 0.0).unwrap();
    assert_eq!(b.combined, 0.125);
    assert_eq!(truncate_decimals(1.0 - b.combined, 4), 0.875);
    let k = 1.0 / (8.0 + 34f64.sqrt());
    assert_eq!(truncate_decimals(1.0 - k, 4), 0.9276);
}
