use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Multiplicities `r(m) = #{gamma in Omega : |gamma| = m}`, stored densely
/// from the smallest to the largest occurring norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumHistogram {
    offset: u64,
    counts: Vec<u64>,
    total: u64,
}

/// `e(x) = exp(2 pi i x)`, reducing `x` mod 1 first.
pub fn e(x: f64) -> Complex64 {
    Complex64::cis(TAU * (x - x.floor()))
}

impl SpectrumHistogram {
    pub fn from_norms(norms: impl IntoIterator<Item = u64>) -> Self {
        let norms: Vec<u64> = norms.into_iter().collect();
        let (Some(&lo), Some(&hi)) = (norms.iter().min(), norms.iter().max()) else {
            return Self {
                offset: 0,
                counts: Vec::new(),
                total: 0,
            };
        };
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for &m in &norms {
            counts[(m - lo) as usize] += 1;
        }
        Self {
            offset: lo,
            counts,
            total: norms.len() as u64,
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = Self::from_norms(std::iter::empty());
        let pairs: Vec<(u64, u64)> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        let (Some(lo), Some(hi)) = (
            pairs.iter().map(|p| p.0).min(),
            pairs.iter().map(|p| p.0).max(),
        ) else {
            return h;
        };
        h.offset = lo;
        h.counts = vec![0; (hi - lo + 1) as usize];
        for (m, r) in pairs {
            h.counts[(m - lo) as usize] += r;
            h.total += r;
        }
        h
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// `|Omega_N|`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn min_norm(&self) -> Option<u64> {
        (!self.is_empty()).then_some(self.offset)
    }

    pub fn max_norm(&self) -> Option<u64> {
        (!self.is_empty()).then(|| self.offset + self.counts.len() as u64 - 1)
    }

    pub fn get(&self, m: u64) -> u64 {
        m.checked_sub(self.offset)
            .and_then(|i| self.counts.get(i as usize).copied())
            .unwrap_or(0)
    }

    /// Nonzero `(m, r(m))` in increasing `m`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0)
            .map(move |(i, &r)| (self.offset + i as u64, r))
    }

    pub fn support_len(&self) -> usize {
        self.iter().count()
    }

    /// `S(theta) = sum_m r(m) e(theta m)`.
    ///
    /// Horner in `z = e(theta)` over the dense range, then one rotation by
    /// `e(theta m_min)`.
    pub fn s_n(&self, theta: f64) -> Complex64 {
        if self.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let z = e(theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for &r in self.counts.iter().rev() {
            acc = acc * z + r as f64;
        }
        acc * e(theta * self.offset as f64)
    }

    /// `|S(theta)|^2`.
    pub fn power(&self, theta: f64) -> f64 {
        self.s_n(theta).norm_sqr()
    }

    /// `int_0^1 |S|^2 = sum_m r(m)^2`.
    pub fn l2_exact(&self) -> f64 {
        self.counts.iter().map(|&r| (r * r) as f64).sum()
    }

    /// CSV with header `m,r`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,r\n");
        for (m, r) in self.iter() {
            writeln!(out, "{m},{r}").unwrap();
        }
        out
    }
}

pub fn spectrum(e: &Ensemble) -> SpectrumHistogram {
    SpectrumHistogram::from_norms(e.norms())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L2Report {
    pub horizon: u64,
    pub members: u64,
    pub l2: f64,
    /// `|Omega|^2 / N`.
    pub scale: f64,
    /// `l2 * N / |Omega|^2`.
    pub c_emp: f64,
}

pub fn l2_ratio_report(h: &SpectrumHistogram, horizon: u64) -> Result<L2Report> {
    if h.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let l2 = h.l2_exact();
    let omega = h.total() as f64;
    let scale = omega * omega / horizon as f64;
    Ok(L2Report {
        horizon,
        members: h.total(),
        l2,
        scale,
        c_emp: l2 / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Alphabet;
    use crate::ensemble::build_ensemble;

    fn direct(norms: &[u64], theta: f64) -> Complex64 {
        norms
            .iter()
            .map(|&m| Complex64::cis(TAU * theta * m as f64))
            .sum()
    }

    #[test]
    fn single_member() {
        let h = SpectrumHistogram::from_norms([7]);
        assert_eq!(h.get(7), 1);
        assert_eq!(h.total(), 1);
        assert_eq!(h.l2_exact(), 1.0);
        assert!((h.s_n(0.3).norm() - 1.0).abs() < 1e-14);
        let h = SpectrumHistogram::from_norms([7, 7, 7]);
        assert_eq!(h.l2_exact(), 9.0);
    }

    #[test]
    fn small_ensemble_spectrum() {
        let a = Alphabet::new([1, 2]).unwrap();
        let e = build_ensemble(&a, 10, 2.0).unwrap();
        let h = spectrum(&e);
        assert_eq!(h.total() as usize, e.len());
        assert!(h.min_norm().unwrap() >= 6 && h.max_norm().unwrap() <= 10);
        // r(d) from every b/d with its twin expansion
        let oracle = |d: u64| -> u64 {
            (1..=d)
                .filter(|&b| crate::cf::gcd(b as u128, d as u128) == 1)
                .map(|b| {
                    let w = crate::cf::cf_of_rational(b as u128, d as u128).unwrap();
                    let t = w.twin().filter(|t| t.in_alphabet(&a));
                    w.in_alphabet(&a) as u64 + t.is_some() as u64
                })
                .sum()
        };
        for d in 6..=10 {
            assert_eq!(h.get(d), oracle(d), "d={d}");
        }
        // [1,2,2], [1,2,1,1], [2,2,1], [1,1,2,1]
        assert_eq!(h.get(7), 4);
        assert_eq!(
            h.iter().collect::<Vec<_>>(),
            vec![(7, h.get(7)), (8, h.get(8)), (10, h.get(10))]
        );
    }

    #[test]
    fn identities_at_zero_and_half() {
        let a = Alphabet::new([1, 2, 3]).unwrap();
        let e = build_ensemble(&a, 2000, 2.0).unwrap();
        let h = spectrum(&e);
        let s0 = h.s_n(0.0);
        assert!((s0.re - h.total() as f64).abs() < 1e-9 && s0.im.abs() < 1e-9);
        let parity: i64 = h
            .iter()
            .map(|(m, r)| if m % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum();
        let half = h.s_n(0.5);
        assert!((half.re - parity as f64).abs() < 1e-8 && half.im.abs() < 1e-8);
    }

    #[test]
    fn matches_per_member_sum() {
        let a = Alphabet::new([1, 2]).unwrap();
        let e = build_ensemble(&a, 20_000, 2.0).unwrap();
        let h = spectrum(&e);
        let norms: Vec<u64> = e.norms().collect();
        let omega = h.total() as f64;
        for i in 0..50 {
            let theta = (i as f64 * 0.618_033_988_75).fract();
            let d = (h.s_n(theta) - direct(&norms, theta)).norm();
            assert!(d <= 1e-10 * omega, "theta={theta} diff={d}");
            assert!(h.s_n(theta).norm() <= omega * (1.0 + 1e-12));
            let c = h.s_n(1.0 - theta).conj();
            assert!((c - h.s_n(theta)).norm() <= 1e-10 * omega);
        }
    }

    #[test]
    fn l2_report() {
        let h = SpectrumHistogram::from_norms([3, 4, 5, 6]);
        let r = l2_ratio_report(&h, 10).unwrap();
        assert_eq!(r.l2, 4.0);
        assert!((r.c_emp - 10.0 / 4.0).abs() < 1e-15);
        assert_eq!(
            l2_ratio_report(&SpectrumHistogram::from_norms([]), 10),
            Err(Error::EmptyHistogram)
        );
    }

    #[test]
    fn csv_and_pairs() {
        let h = SpectrumHistogram::from_pairs([(5, 2), (9, 1), (7, 0)]);
        assert_eq!(h.to_csv(), "m,r\n5,2\n9,1\n");
        assert_eq!(h.total(), 3);
        assert_eq!(h, SpectrumHistogram::from_norms([9, 5, 5]));
    }
}
