use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::dirichlet::isqrt;
use super::spectrum::SpectrumHistogram;
use crate::cf::gcd;
use crate::error::{param, Error, Result};

pub const MAX_DOUBLINGS: usize = 6;

/// Pairwise summation; the order depends only on the length.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        return x.iter().fold(0.0, |s, v| s + v);
    }
    let (l, r) = x.split_at(x.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn nonempty(h: &SpectrumHistogram) -> Result<u64> {
    h.max_norm().ok_or(Error::EmptyHistogram)
}

/// Trapezoid rule for `int_0^1 |S|^2` on `points` equispaced nodes.
/// `|S(j/M)|^2` for all `j` at once via one FFT of the folded coefficients.
pub fn trapezoid_l2(h: &SpectrumHistogram, points: usize) -> Result<f64> {
    nonempty(h)?;
    if points == 0 {
        return Err(param("points", "must be positive"));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    for (m, r) in h.iter() {
        buf[(m % points as u64) as usize] += r as f64;
    }
    FftPlanner::new().plan_fft_forward(points).process(&mut buf);
    let p: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();
    Ok(pairwise_sum(&p) / points as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalCheck {
    pub exact: f64,
    pub quadrature: f64,
    pub points: usize,
    pub doublings: usize,
    pub relative_error: f64,
}

/// Starts from `20 N_max` nodes and doubles until two successive values
/// agree to `stab_tol`.
pub fn parseval_check(h: &SpectrumHistogram, stab_tol: f64) -> Result<ParsevalCheck> {
    let n_max = nonempty(h)? as usize;
    let mut points = 20 * n_max;
    let mut prev = trapezoid_l2(h, points)?;
    for doublings in 1..=MAX_DOUBLINGS {
        points *= 2;
        let cur = trapezoid_l2(h, points)?;
        let change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        if change <= stab_tol {
            let exact = h.l2_exact();
            return Ok(ParsevalCheck {
                exact,
                quadrature: cur,
                points,
                doublings,
                relative_error: (cur - exact).abs() / exact,
            });
        }
        prev = cur;
    }
    Err(Error::GridUnstable {
        change: f64::NAN,
        doublings: MAX_DOUBLINGS,
    })
}

/// Composite Simpson for `f` on `[lo, hi]` with `n` (rounded up to even)
/// subintervals.
pub fn simpson(f: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let step = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * f(lo + i as f64 * step)
        })
        .collect();
    pairwise_sum(&vals) * step / 3.0
}

/// `(a, q)` with `0 <= a <= q <= sqrt N` and `gcd(a, q) = 1`.
pub fn farey_pairs(horizon: u64) -> Vec<(u64, u64)> {
    let qmax = isqrt(horizon);
    let mut out = Vec::new();
    for q in 1..=qmax {
        for a in 0..=q {
            if gcd(a as u128, q as u128) == 1 {
                out.push((a, q));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcCover {
    pub horizon: u64,
    /// `int_0^1 |S|^2` by the trapezoid rule.
    pub lhs: f64,
    pub lhs_exact: f64,
    /// `sum over (a,q) of int_{|theta - a/q| <= 1/(q sqrt N)} |S|^2`.
    pub rhs: f64,
    pub arcs: usize,
    /// Nodes per unit of `theta`, in multiples of `N_max`.
    pub grid: f64,
    pub doublings: usize,
    pub holds: bool,
}

fn arc_sum(h: &SpectrumHistogram, pairs: &[(u64, u64)], root: f64, density: f64) -> f64 {
    let parts: Vec<f64> = pairs
        .iter()
        .map(|&(a, q)| {
            let c = a as f64 / q as f64;
            let half = 1.0 / (q as f64 * root);
            let n = (2.0 * half * density).ceil() as usize;
            simpson(|t| h.power(t), c - half, c + half, n)
        })
        .collect();
    pairwise_sum(&parts)
}

/// Both sides of `int_0^1 |S|^2 <= (1/N) sum* int_{|K| <= sqrt N / q} |S(a/q + K/N)|^2 dK`
/// on grids of `grid * N_max` nodes per unit, doubling until the right side
/// moves by at most `stab_tol` relatively.
pub fn arc_cover_check(
    h: &SpectrumHistogram,
    horizon: u64,
    grid: f64,
    tol: f64,
    stab_tol: f64,
) -> Result<ArcCover> {
    let n_max = nonempty(h)? as f64;
    if horizon < 2 {
        return Err(param("N", "arc cover needs N >= 2"));
    }
    if !(grid > 0.0) {
        return Err(param("grid", "must be positive"));
    }
    let pairs = farey_pairs(horizon);
    let root = (horizon as f64).sqrt();
    let mut g = grid;
    let mut prev = arc_sum(h, &pairs, root, g * n_max);
    let mut change = f64::NAN;
    for doublings in 1..=MAX_DOUBLINGS {
        g *= 2.0;
        let rhs = arc_sum(h, &pairs, root, g * n_max);
        change = (rhs - prev).abs() / rhs;
        if change <= stab_tol {
            let lhs = trapezoid_l2(h, (g * n_max).ceil() as usize)?;
            return Ok(ArcCover {
                horizon,
                lhs,
                lhs_exact: h.l2_exact(),
                rhs,
                arcs: pairs.len(),
                grid: g,
                doublings,
                holds: lhs <= rhs * (1.0 + tol),
            });
        }
        prev = rhs;
    }
    Err(Error::GridUnstable {
        change,
        doublings: MAX_DOUBLINGS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub horizon: u64,
    pub density: u64,
    pub base_points: usize,
    pub samples: usize,
    /// `max |S(theta0 + lambda/N) - S(theta0)| / (2 pi N_max (lambda/N) |Omega|)`.
    pub max_ratio: f64,
    /// `max |S(theta0 + 1/(TN)) - S(theta0)|`, the worst offset inside a cell.
    pub max_error: f64,
}

/// `64 * (number of decimal digits of N_max)`.
pub fn default_density(n_max: u64) -> u64 {
    64 * (n_max.max(1).ilog10() as u64 + 1)
}

const LIPSCHITZ_MAX_Q: u64 = 12;
const LIPSCHITZ_K_PER_ARC: u64 = 9;
const LIPSCHITZ_LAMBDA_STEPS: u64 = 8;

/// Grid points `a/q + K/N` (integer `K`, so they lie on every `T`-grid)
/// for small `q`.
pub fn lipschitz_base_points(horizon: u64) -> Vec<f64> {
    let n = horizon as f64;
    let qmax = isqrt(horizon).min(LIPSCHITZ_MAX_Q);
    let mut out = Vec::new();
    for (a, q) in farey_pairs(horizon) {
        if q > qmax || (q == 1 && a == 1) {
            continue;
        }
        let kmax = ((n.sqrt() / q as f64).floor()) as i64;
        let step = ((2 * kmax) as u64 / (LIPSCHITZ_K_PER_ARC - 1)).max(1) as i64;
        let mut k = -kmax;
        while k <= kmax {
            out.push(a as f64 / q as f64 + k as f64 / n);
            k += step;
        }
    }
    out
}

/// Offsets `lambda = j/(8T)`, `j = 1..=8`, from each base point.
pub fn lipschitz_check(
    h: &SpectrumHistogram,
    horizon: u64,
    density: u64,
) -> Result<LipschitzReport> {
    let n_max = nonempty(h)? as f64;
    if density == 0 {
        return Err(param("T", "must be at least 1"));
    }
    if horizon == 0 {
        return Err(param("N", "must be positive"));
    }
    let n = horizon as f64;
    let omega = h.total() as f64;
    let t = density as f64;
    let base = lipschitz_base_points(horizon);
    let per_point: Vec<(f64, f64)> = base
        .par_iter()
        .map(|&theta0| {
            let s0 = h.s_n(theta0);
            let mut worst: f64 = 0.0;
            let mut at_edge = 0.0;
            for j in 1..=LIPSCHITZ_LAMBDA_STEPS {
                let lambda = j as f64 / (LIPSCHITZ_LAMBDA_STEPS as f64 * t);
                let d = (h.s_n(theta0 + lambda / n) - s0).norm();
                worst = worst.max(d / (TAU * n_max * (lambda / n) * omega));
                if j == LIPSCHITZ_LAMBDA_STEPS {
                    at_edge = d;
                }
            }
            (worst, at_edge)
        })
        .collect();
    Ok(LipschitzReport {
        horizon,
        density,
        base_points: base.len(),
        samples: base.len() * LIPSCHITZ_LAMBDA_STEPS as usize,
        max_ratio: per_point.iter().map(|p| p.0).fold(0.0, f64::max),
        max_error: per_point.iter().map(|p| p.1).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Alphabet;
    use crate::ensemble::build_ensemble;
    use crate::expsum::spectrum::spectrum;

    #[test]
    fn trapezoid_is_exact_beyond_the_bandwidth() {
        let h = SpectrumHistogram::from_pairs([(40, 3), (41, 1), (47, 2), (60, 5)]);
        let exact = h.l2_exact();
        assert_eq!(exact, 9.0 + 1.0 + 4.0 + 25.0);
        for points in [21, 64, 1200] {
            assert!((trapezoid_l2(&h, points).unwrap() - exact).abs() < 1e-9);
        }
        // too few nodes alias 40 and 60
        assert!((trapezoid_l2(&h, 20).unwrap() - exact).abs() > 1.0);
        let c = parseval_check(&h, 1e-9).unwrap();
        assert!(c.relative_error < 1e-12);
    }

    #[test]
    fn simpson_polynomial() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn farey() {
        assert_eq!(farey_pairs(9), vec![(0, 1), (1, 1), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn arc_cover_single_norm() {
        // |S|^2 = 1 everywhere: rhs is the total arc length
        let h = SpectrumHistogram::from_norms([5]);
        let c = arc_cover_check(&h, 100, 4.0, 1e-3, 1e-9).unwrap();
        let length: f64 = farey_pairs(100)
            .iter()
            .map(|&(_, q)| 2.0 / (q as f64 * 10.0))
            .sum();
        assert!((c.rhs - length).abs() < 1e-12);
        assert!((c.lhs - 1.0).abs() < 1e-12);
        assert!(c.holds);
        assert!(arc_cover_check(&h, 1, 4.0, 1e-3, 1e-9).is_err());
    }

    #[test]
    fn arc_cover_small_ensemble() {
        let a = Alphabet::new([1, 2]).unwrap();
        let e = build_ensemble(&a, 300, 2.0).unwrap();
        let h = spectrum(&e);
        let c = arc_cover_check(&h, 300, 8.0, 1e-3, 1e-6).unwrap();
        assert!(c.holds, "{c:?}");
        assert!((c.lhs - c.lhs_exact).abs() < 1e-9 * c.lhs_exact);
    }

    #[test]
    fn lipschitz_small() {
        let a = Alphabet::new([1, 2]).unwrap();
        let e = build_ensemble(&a, 1000, 2.0).unwrap();
        let h = spectrum(&e);
        let r = lipschitz_check(&h, 1000, 64).unwrap();
        assert!(r.max_ratio <= 1.0 && r.max_ratio > 0.0, "{r:?}");
        let r2 = lipschitz_check(&h, 1000, 128).unwrap();
        let halving = r.max_error / r2.max_error;
        assert!((halving - 2.0).abs() < 0.2, "{halving}");
        assert_eq!(default_density(999), 192);
        assert_eq!(default_density(1000), 256);
    }
}
