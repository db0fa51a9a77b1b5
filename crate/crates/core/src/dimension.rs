//! Hausdorff dimension of `E_A`, the Cantor set of infinite continued
//! fractions with all partial quotients in `A`.
//!
//! The dimension is the zero of the pressure `P(s)` of the Gauss map
//! restricted to `A`. Everything here is computed from the depth-`k`
//! cylinders `I_w`, whose inverse branches are
//! `psi_w(x) = (p_k + x p_{k-1}) / (q_k + x q_{k-1})` with
//! `|psi_w'(x)| = (q_k + x q_{k-1})^-2`. Two independent brackets come out of
//! the same data and the reported one is their intersection:
//!
//! * **distortion sandwich.** On a cylinder `sup |psi_w'| / inf |psi_w'| <=
//!   ((q_k + q_{k-1}) / q_k)^2 <= 4 = DISTORTION`, hence
//!   `D^-1 |I_u||I_v| <= |I_uv| <= D |I_u||I_v|` and
//!   `(log Z_k(s) - s log D)/k <= P(s) <= (log Z_k(s) + s log D)/k` with
//!   `Z_k(s) = sum |I_w|^s`. Cheap and crude; width decays like `1/k`.
//! * **operator bound.** With `L_s` the transfer operator,
//!   `L_s^k 1 (x) = sum_w (q_k + x q_{k-1})^{-2s}`. For positive `f`,
//!   `min L f / f <= rho(L_s) <= max L f / f`; using `f = L_s^k 1` the ratio
//!   `L^{k+1}1 / L^k 1` squeezes the spectral radius geometrically fast and
//!   the bounds nest as `k` grows. The min and max over `x` are taken on a
//!   fixed grid of `[0, 1]`, so this is certified only up to that sampling.
//!
//! `delta` satisfies `rho(L_delta) = 1`, i.e. `P(delta) = 0`.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{Alphabet, CfWord};
use crate::error::{Error, Result};

/// Bounded-distortion constant of inverse Gauss branches on `[0, 1]`.
pub const DISTORTION: f64 = 4.0;

/// Sample points for the min/max of the operator ratio.
pub const RATIO_GRID: usize = 17;

/// Maximum number of depth-`(k+1)` words the solver will materialise.
pub const MAX_WORDS: u64 = 4_000_000;

const MAX_BISECTIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    pub iterations: usize,
    /// Bracket from the distortion sandwich alone.
    pub distortion: (f64, f64),
    /// Bracket from the operator ratio alone.
    pub operator: (f64, f64),
}

impl DimensionBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Admissibility thresholds on the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSet {
    /// `1 - 5/(sqrt(369) + 23)`.
    pub t1: f64,
    /// `7/8`.
    pub t2: f64,
    /// `1 - 1/(8 + sqrt(34))`.
    pub t3: f64,
}

impl Default for ThresholdSet {
    fn default() -> Self {
        Self {
            t1: 1.0 - 5.0 / (369f64.sqrt() + 23.0),
            t2: 7.0 / 8.0,
            t3: 1.0 - 1.0 / (8.0 + 34f64.sqrt()),
        }
    }
}

/// Truncates (not rounds) `x >= 0` to `places` decimals.
pub fn truncate_decimals(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale + 1e-9).floor() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

pub fn verdict(bracket: &DimensionBracket, threshold: f64) -> Verdict {
    if bracket.lower > threshold {
        Verdict::Pass
    } else if bracket.upper <= threshold {
        Verdict::Fail
    } else {
        Verdict::Undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdVerdicts {
    pub t1: Verdict,
    pub t2: Verdict,
    pub t3: Verdict,
}

pub fn check_thresholds(bracket: &DimensionBracket, t: &ThresholdSet) -> ThresholdVerdicts {
    ThresholdVerdicts {
        t1: verdict(bracket, t.t1),
        t2: verdict(bracket, t.t2),
        t3: verdict(bracket, t.t3),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub alphabet: Vec<u64>,
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    pub iterations: usize,
    pub thresholds: ThresholdSet,
    pub verdicts: ThresholdVerdicts,
}

impl DimensionReport {
    pub fn new(alphabet: &Alphabet, bracket: &DimensionBracket) -> Self {
        let thresholds = ThresholdSet::default();
        Self {
            alphabet: alphabet.letters().to_vec(),
            depth: bracket.depth,
            lower: bracket.lower,
            upper: bracket.upper,
            midpoint: bracket.midpoint(),
            iterations: bracket.iterations,
            verdicts: check_thresholds(bracket, &thresholds),
            thresholds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub word: CfWord,
    /// `1 / (q_k (q_k + q_{k-1}))`.
    pub length: Ratio<u128>,
}

fn word_budget(alphabet: &Alphabet, depth: usize) -> Result<()> {
    let n = (alphabet.len() as f64).powi(depth as i32);
    if n > MAX_WORDS as f64 {
        return Err(Error::Budget {
            what: "cylinder count",
            limit: MAX_WORDS,
        });
    }
    Ok(())
}

/// `(q_k, q_{k-1})` for every word of length `depth`, lexicographic order.
fn continuant_pairs(alphabet: &Alphabet, depth: usize) -> Vec<(u128, u128)> {
    let mut level = vec![(1u128, 0u128)];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|&(q, p)| {
                alphabet
                    .letters()
                    .iter()
                    .map(move |&a| (a as u128 * q + p, q))
            })
            .collect();
    }
    level
}

/// All depth-`k` cylinders with their exact lengths.
pub fn cylinder_intervals(alphabet: &Alphabet, depth: usize) -> Result<Vec<Cylinder>> {
    if depth == 0 {
        return Err(crate::error::param("depth", "must be at least 1"));
    }
    word_budget(alphabet, depth)?;
    let letters = alphabet.letters();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<u64>, u128, u128)> = vec![(Vec::new(), 1, 0)];
    // explicit stack in reverse letter order keeps the output lexicographic
    while let Some((word, q, p)) = stack.pop() {
        if word.len() == depth {
            out.push(Cylinder {
                length: Ratio::new(1, q * (q + p)),
                word: CfWord::new(word).expect("nonempty positive word"),
            });
            continue;
        }
        for &a in letters.iter().rev() {
            let mut w = word.clone();
            w.push(a);
            stack.push((w, a as u128 * q + p, q));
        }
    }
    Ok(out)
}

/// Largest `s` in `[0, 1]` (to within `tol`) with `holds(s)`, assuming
/// `holds(0)`. The returned point always satisfies the predicate.
fn bisect_last_true(tol: f64, holds: impl Fn(f64) -> bool) -> Result<(f64, usize)> {
    if holds(1.0) {
        return Ok((1.0, 0));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut it = 0;
    while hi - lo > tol {
        if it == MAX_BISECTIONS {
            return Err(Error::NoConvergence(it));
        }
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    Ok((lo, it))
}

/// Smallest `s` with `holds(s)`, assuming `holds(1)`; mirror of the above.
fn bisect_first_true(tol: f64, holds: impl Fn(f64) -> bool) -> Result<(f64, usize)> {
    if holds(0.0) {
        return Ok((0.0, 0));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut it = 0;
    while hi - lo > tol {
        if it == MAX_BISECTIONS {
            return Err(Error::NoConvergence(it));
        }
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        it += 1;
    }
    Ok((hi, it))
}

// Pairwise-stable sum of exp(-s * l) over precomputed logs.
fn sum_exp(logs: &[f64], s: f64) -> f64 {
    logs.par_chunks(1 << 14)
        .map(|c| c.iter().map(|&l| (-s * l).exp()).sum::<f64>())
        .collect::<Vec<_>>()
        .iter()
        .sum()
}

struct OperatorData {
    // per grid point: logs of (q_k + x q_{k-1})^2 at depth k and k+1
    shallow: Vec<Vec<f64>>,
    deep: Vec<Vec<f64>>,
}

impl OperatorData {
    fn new(alphabet: &Alphabet, depth: usize) -> Self {
        let shallow_pairs = continuant_pairs(alphabet, depth);
        let deep_pairs = continuant_pairs(alphabet, depth + 1);
        let logs = |pairs: &[(u128, u128)], x: f64| -> Vec<f64> {
            pairs
                .par_iter()
                .map(|&(q, p)| 2.0 * (q as f64 + x * p as f64).ln())
                .collect()
        };
        let grid: Vec<f64> = (0..RATIO_GRID)
            .map(|i| i as f64 / (RATIO_GRID - 1) as f64)
            .collect();
        Self {
            shallow: grid.iter().map(|&x| logs(&shallow_pairs, x)).collect(),
            deep: grid.iter().map(|&x| logs(&deep_pairs, x)).collect(),
        }
    }

    fn ratio_range(&self, s: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in self.shallow.iter().zip(&self.deep) {
            let r = sum_exp(b, s) / sum_exp(a, s);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (lo, hi)
    }
}

/// Brackets `delta_A` using depth-`k` cylinders; see the module docs.
pub fn pressure_bisection(alphabet: &Alphabet, depth: usize, tol: f64) -> Result<DimensionBracket> {
    alphabet.require_nontrivial()?;
    if depth == 0 {
        return Err(crate::error::param("depth", "must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(crate::error::param("tol", "must be positive"));
    }
    word_budget(alphabet, depth + 1)?;

    // log |I_w| = -log(q_k (q_k + q_{k-1}))
    let lengths: Vec<f64> = continuant_pairs(alphabet, depth)
        .par_iter()
        .map(|&(q, p)| (q as f64).ln() + ((q + p) as f64).ln())
        .collect();
    let log_d = DISTORTION.ln();
    let z = |s: f64| sum_exp(&lengths, s).ln();
    let (dist_lo, it1) = bisect_last_true(tol, |s| z(s) - s * log_d >= 0.0)?;
    let (dist_hi, it2) = bisect_first_true(tol, |s| z(s) + s * log_d <= 0.0)?;

    let op = OperatorData::new(alphabet, depth);
    let (op_lo, it3) = bisect_last_true(tol, |s| op.ratio_range(s).0 >= 1.0)?;
    let (op_hi, it4) = bisect_first_true(tol, |s| op.ratio_range(s).1 <= 1.0)?;

    let lower = dist_lo.max(op_lo);
    let upper = dist_hi.min(op_hi);
    Ok(DimensionBracket {
        lower,
        upper: upper.max(lower),
        depth,
        iterations: it1.max(it2).max(it3).max(it4),
        distortion: (dist_lo, dist_hi),
        operator: (op_lo, op_hi),
    })
}
