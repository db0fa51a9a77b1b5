use serde::Serialize;

use crate::error::{param, Error, Result};

// Relative slack on the hypothesis comparison so rounding in a prefix sum
// does not decide the outcome.
const HYPOTHESIS_RTOL: f64 = 1e-12;

fn within(sum: f64, bound: f64) -> bool {
    sum <= bound + HYPOTHESIS_RTOL * bound.abs().max(sum.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetBound {
    pub size: usize,
    pub sum_squares: f64,
    pub max_value: f64,
    /// `C1^2 log |W| + C2 max f`.
    pub scale: f64,
    /// Smallest `c` with `sum f^2 <= c * scale`.
    pub constant: f64,
}

/// The largest subset sum of each size `k` comes from the `k` largest values,
/// so `sum_Z f <= C1 |Z|^(1/2) + C2` for every `Z` reduces to the prefix
/// sums of the descending sort. Returns the first violating `k` otherwise.
pub fn first_violation(values: &[f64], c1: f64, c2: f64) -> Option<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        sum += v;
        let k = i + 1;
        if !within(sum, c1 * (k as f64).sqrt() + c2) {
            return Some(k);
        }
    }
    None
}

pub fn subset_bound_verify(values: &[f64], c1: f64, c2: f64) -> Result<SubsetBound> {
    if values.len() <= 10 {
        return Err(param(
            "W",
            format!("need more than 10 values, got {}", values.len()),
        ));
    }
    if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(param("values", "must be finite and nonnegative"));
    }
    if let Some(k) = first_violation(values, c1, c2) {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        return Err(Error::HypothesisViolated {
            k,
            sum: sorted[..k].iter().sum(),
            bound: c1 * (k as f64).sqrt() + c2,
        });
    }
    let sum_squares: f64 = values.iter().map(|v| v * v).sum();
    let max_value = values.iter().copied().fold(0.0, f64::max);
    let scale = c1 * c1 * (values.len() as f64).ln() + c2 * max_value;
    Ok(SubsetBound {
        size: values.len(),
        sum_squares,
        max_value,
        scale,
        constant: if scale > 0.0 {
            sum_squares / scale
        } else {
            0.0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    // every subset, by bitmask
    fn exhaustive_holds(values: &[f64], c1: f64, c2: f64) -> bool {
        let n = values.len();
        (1u32..1 << n).all(|mask| {
            let mut sum = 0.0;
            for (i, v) in values.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    sum += v;
                }
            }
            within(sum, c1 * (mask.count_ones() as f64).sqrt() + c2)
        })
    }

    #[test]
    fn constant_profile() {
        let r = subset_bound_verify(&[1.0; 16], 4.0, 0.0).unwrap();
        assert_eq!(r.sum_squares, 16.0);
        assert!((r.constant - 1.0 / 16f64.ln()).abs() < 1e-15);
        assert!((r.constant - 0.3607).abs() < 1e-4);
    }

    #[test]
    fn single_atom() {
        let mut v = vec![0.0; 12];
        v[3] = 1e6;
        let r = subset_bound_verify(&v, 0.0, 1e6).unwrap();
        assert_eq!(r.constant, 1.0);
    }

    #[test]
    fn violation_and_size() {
        match subset_bound_verify(&[1.0; 16], 0.5, 0.0) {
            Err(Error::HypothesisViolated { k, .. }) => assert_eq!(k, 1),
            other => panic!("{other:?}"),
        }
        assert!(subset_bound_verify(&[1.0; 10], 4.0, 0.0).is_err());
        assert!(subset_bound_verify(&[-1.0; 12], 4.0, 0.0).is_err());
    }

    #[test]
    fn prefix_rule_matches_exhaustive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1405);
        for trial in 0..400 {
            let n = 1 + trial % 14;
            let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(3)).collect();
            let c2 = rng.gen::<f64>() * 0.5;
            let c1 = rng.gen::<f64>() * 1.5;
            assert_eq!(
                first_violation(&v, c1, c2).is_none(),
                exhaustive_holds(&v, c1, c2),
                "{v:?} {c1} {c2}"
            );
        }
    }
}
