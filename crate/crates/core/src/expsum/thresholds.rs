//! Admissible `gamma = 1 - delta` for each piece of the arc decomposition,
//! and the choice of `nu` that balances the last two pieces.

use serde::Serialize;

use crate::error::{param, Result};

/// Region 5 (short arcs, `|K| <= min(q^nu, xi1/q)`): `1/(5 + 2 nu)`.
pub fn short_arc_bound(nu: f64) -> f64 {
    1.0 / (5.0 + 2.0 * nu)
}

/// Region 6 (`q^nu <= |K| <= xi1/q`): `5(1 + nu)/(46 + 36 nu)`.
pub fn middle_arc_bound(nu: f64) -> f64 {
    5.0 * (1.0 + nu) / (46.0 + 36.0 * nu)
}

/// Region 6 via Kloosterman sums: `(nu - 1/2)/(10 (1 + nu))`.
pub fn kloosterman_bound(nu: f64) -> f64 {
    (nu - 0.5) / (10.0 * (1.0 + nu))
}

/// Maximiser of `min(kloosterman_bound, short_arc_bound)`: `(3 + sqrt 34)/2`.
pub fn optimal_nu() -> f64 {
    (3.0 + 34f64.sqrt()) / 2.0
}

/// Each bound already carries its `eps0` penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaBounds {
    pub nu: f64,
    pub eps0: f64,
    /// Small `q` and small `|K|` terms: `5/36 - 6 eps0`.
    pub outer: f64,
    /// Region 2: `1/8 - 4 eps0`.
    pub large_modulus: f64,
    /// Regions 3 and 4: `1/8 - 5 eps0`.
    pub intermediate: f64,
    /// Region 6: `5(1+nu)/(46+36nu) - 6 eps0`.
    pub middle_arc: f64,
    /// Region 5: `1/(5+2nu) - 6 eps0`.
    pub short_arc: f64,
    /// The `|K| <= Q0` part of region 5: `1/6 - 5 eps0`.
    pub short_arc_core: f64,
    pub combined: f64,
}

pub fn threshold_arithmetic(nu: f64, eps0: f64) -> Result<GammaBounds> {
    if !(1.0..=2.0).contains(&nu) {
        return Err(param("nu", format!("{nu} not in [1, 2]")));
    }
    if !(eps0 >= 0.0) {
        return Err(param("eps0", "must be nonnegative"));
    }
    let b = GammaBounds {
        nu,
        eps0,
        outer: 5.0 / 36.0 - 6.0 * eps0,
        large_modulus: 0.125 - 4.0 * eps0,
        intermediate: 0.125 - 5.0 * eps0,
        middle_arc: middle_arc_bound(nu) - 6.0 * eps0,
        short_arc: short_arc_bound(nu) - 6.0 * eps0,
        short_arc_core: 1.0 / 6.0 - 5.0 * eps0,
        combined: 0.0,
    };
    let combined = [
        b.outer,
        b.large_modulus,
        b.intermediate,
        b.middle_arc,
        b.short_arc,
        b.short_arc_core,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    Ok(GammaBounds { combined, ..b })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuOptimum {
    pub nu_star: f64,
    /// `min` of the two bounds at `nu_star`, without the `eps0` penalty.
    pub value: f64,
    pub scan_nu: f64,
    pub scan_value: f64,
    pub scan_step: f64,
}

/// Dense scan of `min(kloosterman_bound, short_arc_bound)` on `(lo, hi]`.
pub fn scan_balanced_nu(lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let f = |nu: f64| kloosterman_bound(nu).min(short_arc_bound(nu));
    let n = ((hi - lo) / step).round() as usize;
    (1..=n)
        .map(|i| lo + i as f64 * step)
        .map(|nu| (nu, f(nu)))
        .fold((f64::NAN, f64::NEG_INFINITY), |best, x| {
            if x.1 > best.1 {
                x
            } else {
                best
            }
        })
}

pub fn balanced_nu(step: f64) -> NuOptimum {
    let nu_star = optimal_nu();
    let (scan_nu, scan_value) = scan_balanced_nu(0.5, 5.0, step);
    NuOptimum {
        nu_star,
        value: kloosterman_bound(nu_star).min(short_arc_bound(nu_star)),
        scan_nu,
        scan_value,
        scan_step: step,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_halves() {
        assert_eq!(short_arc_bound(1.5), 0.125);
        assert_eq!(middle_arc_bound(1.5), 0.125);
        let e = 1e-4;
        let b = threshold_arithmetic(1.5, e).unwrap();
        assert!((b.combined - (0.125 - 6.0 * e)).abs() < 1e-15);
        assert!(threshold_arithmetic(0.9, e).is_err());
        assert!(threshold_arithmetic(2.1, e).is_err());
    }

    #[test]
    fn kloosterman_balance() {
        let nu = optimal_nu();
        let target = 1.0 / (8.0 + 34f64.sqrt());
        assert!((kloosterman_bound(nu) - target).abs() < 1e-15);
        assert!((short_arc_bound(nu) - target).abs() < 1e-15);
        assert!((target - 0.072302).abs() < 1e-6);
        assert_eq!(crate::dimension::truncate_decimals(1.0 - target, 4), 0.9276);
        let o = balanced_nu(1e-4);
        assert!((o.scan_nu - nu).abs() < 1e-3, "{o:?}");
        assert!(o.scan_value <= o.value + 1e-15);
    }

    #[test]
    fn bounds_are_monotone_in_nu() {
        let mut prev = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=100 {
            let nu = 1.0 + i as f64 / 100.0;
            let s = short_arc_bound(nu);
            let k = kloosterman_bound(nu);
            assert!(s < prev.0 && k > prev.1);
            prev = (s, k);
        }
    }
}
