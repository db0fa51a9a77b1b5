use std::collections::BTreeSet;

use serde::Serialize;

use super::{Ensemble, FactorizationParams};
use crate::cf::{matrix_of_word, CfWord, Mat2};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Regular,
    /// Prefix and suffix meet exactly; the middle factor is the identity.
    IdentityMiddle,
    /// Prefix and suffix overlap; the suffix was shortened and the middle
    /// factor is the identity.
    Overlap,
    /// The word never reaches `M1` (or `M3`); kept whole as the first factor.
    TooShort,
}

/// `gamma = gamma1 * gamma2 * gamma3` with `gamma1 = w[..prefix_len]`,
/// `gamma2 = w[prefix_len..suffix_start]`, `gamma3 = w[suffix_start..]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub prefix_len: usize,
    pub suffix_start: usize,
    pub factors: [Mat2; 3],
    pub kind: SplitKind,
}

impl Split {
    pub fn norms(&self) -> [u128; 3] {
        self.factors.map(|m| m.norm())
    }

    pub fn product(&self) -> Result<Mat2> {
        self.factors[0]
            .checked_mul(&self.factors[1])?
            .checked_mul(&self.factors[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    pub horizon: u64,
    pub params: FactorizationParams,
    pub slack: f64,
    pub members: usize,
    pub regular: usize,
    pub identity_middle: usize,
    pub overlap: usize,
    pub too_short: usize,
    pub omega_sizes: [usize; 3],
    pub window1_fraction: f64,
    pub window2_fraction: f64,
    pub window3_fraction: f64,
    /// Fraction of members meeting all three windows at the given slack.
    pub all_windows_fraction: f64,
    /// Smallest slack each member needs, summarised.
    pub required_slack_median: f64,
    pub required_slack_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub omega1: BTreeSet<Mat2>,
    pub omega2: BTreeSet<Mat2>,
    pub omega3: BTreeSet<Mat2>,
    pub splits: Vec<Split>,
    pub report: FactorReport,
}

fn sub_matrix(w: &CfWord, start: usize, end: usize) -> Result<Mat2> {
    match w.slice(start, end) {
        Some(s) => matrix_of_word(&s),
        None => Ok(Mat2::IDENTITY),
    }
}

/// Earliest prefix with norm `>= m1`, latest suffix with norm `>= m3`.
pub fn split_word(w: &CfWord, m1: f64, m3: f64) -> Result<Split> {
    let q = w.quotients();
    let k = q.len();

    // prefix continuants K(d_1..d_i)
    let mut prefix_len = None;
    let (mut prev, mut cur) = (0u128, 1u128);
    for (i, &d) in q.iter().enumerate() {
        (prev, cur) = (cur, d as u128 * cur + prev);
        if cur as f64 >= m1 {
            prefix_len = Some(i + 1);
            break;
        }
    }
    // suffix continuants K(d_j..d_k), scanned right to left
    let mut suffix_start = None;
    let (mut next, mut cur) = (0u128, 1u128);
    for j in (0..k).rev() {
        (next, cur) = (cur, q[j] as u128 * cur + next);
        if cur as f64 >= m3 {
            suffix_start = Some(j);
            break;
        }
    }

    let (p, s, kind) = match (prefix_len, suffix_start) {
        (Some(p), Some(s)) if p < s => (p, s, SplitKind::Regular),
        (Some(p), Some(s)) if p == s => (p, s, SplitKind::IdentityMiddle),
        (Some(p), Some(_)) if p < k => (p, p, SplitKind::Overlap),
        _ => (k, k, SplitKind::TooShort),
    };
    Ok(Split {
        prefix_len: p,
        suffix_start: s,
        factors: [
            sub_matrix(w, 0, p)?,
            sub_matrix(w, p, s)?,
            sub_matrix(w, s, k)?,
        ],
        kind,
    })
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Splits every member into three factors and measures how well the factor
/// norms sit inside the windows
/// `M1 <= |g1| <= C' M1^(1+2e)`, `M3 <= |g3| <= C' M3^(1+2e)`,
/// `N / (C' (M1 M3)^(1+2e)) <= |g2| <= C' N / (M1 M3)`.
pub fn factorize(e: &Ensemble, p: &FactorizationParams, slack: f64) -> Result<Factorization> {
    p.validate(e.horizon())?;
    let n = e.horizon() as f64;
    let pow = 1.0 + 2.0 * p.eps0;
    let w1_hi = p.m1.powf(pow);
    let w3_hi = p.m3.powf(pow);
    let w2_lo = n / (p.m1 * p.m3).powf(pow);
    let w2_hi = n / (p.m1 * p.m3);

    let mut splits = Vec::with_capacity(e.len());
    let mut sets: [BTreeSet<Mat2>; 3] = Default::default();
    let mut counts = [0usize; 4];
    let mut ok = [0usize; 4];
    let mut needed = Vec::with_capacity(e.len());

    for m in e.members() {
        let s = split_word(&m.word, p.m1, p.m3)?;
        counts[s.kind as usize] += 1;
        let [g1, g2, g3] = s.norms().map(|x| x as f64);
        let r1 = (g1 / w1_hi).max(p.m1 / g1);
        let r3 = (g3 / w3_hi).max(p.m3 / g3);
        let r2 = (g2 / w2_hi).max(w2_lo / g2);
        let r = [r1, r2, r3];
        for (i, x) in r.iter().enumerate() {
            if *x <= slack {
                ok[i] += 1;
            }
        }
        let worst = r1.max(r2).max(r3);
        if worst <= slack {
            ok[3] += 1;
        }
        needed.push(worst);
        for (set, f) in sets.iter_mut().zip(s.factors) {
            set.insert(f);
        }
        splits.push(s);
    }

    let total = e.len().max(1) as f64;
    let [omega1, omega2, omega3] = sets;
    let report = FactorReport {
        horizon: e.horizon(),
        params: *p,
        slack,
        members: e.len(),
        regular: counts[SplitKind::Regular as usize],
        identity_middle: counts[SplitKind::IdentityMiddle as usize],
        overlap: counts[SplitKind::Overlap as usize],
        too_short: counts[SplitKind::TooShort as usize],
        omega_sizes: [omega1.len(), omega2.len(), omega3.len()],
        window1_fraction: ok[0] as f64 / total,
        window2_fraction: ok[1] as f64 / total,
        window3_fraction: ok[2] as f64 / total,
        all_windows_fraction: ok[3] as f64 / total,
        required_slack_max: needed.iter().copied().fold(f64::NAN, f64::max),
        required_slack_median: median(&mut needed),
    };
    Ok(Factorization {
        omega1,
        omega2,
        omega3,
        splits,
        report,
    })
}
