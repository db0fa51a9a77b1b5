use serde::Serialize;

use crate::error::{param, Result};

/// `theta = a/q + K/N` with `(a, q) = 1`, `q <= sqrt N`, `|K| <= sqrt N / q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FareyPoint {
    pub a: u64,
    pub q: u64,
    pub k: f64,
    pub beta: f64,
    pub kbar: f64,
    pub horizon: u64,
}

impl FareyPoint {
    pub fn new(a: u64, q: u64, k: f64, horizon: u64) -> Self {
        Self {
            a,
            q,
            k,
            beta: k / horizon as f64,
            kbar: k.abs().max(1.0),
            horizon,
        }
    }

    pub fn theta(&self) -> f64 {
        self.a as f64 / self.q as f64 + self.beta
    }
}

/// `floor(sqrt n)` computed exactly.
pub fn isqrt(n: u64) -> u64 {
    let n = n as u128;
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r as u64
}

// theta scaled to an exact fraction n / 2^64.
const SCALE_BITS: u32 = 64;

/// Last continued-fraction convergent `a/q` of `theta` with
/// `q <= floor(sqrt N)`, so `|theta - a/q| < 1/(q (floor(sqrt N) + 1))`.
/// `theta` is reduced mod 1 and read as an exact fraction over `2^64`.
pub fn dirichlet_decompose(theta: f64, horizon: u64) -> FareyPoint {
    let theta = theta - theta.floor();
    let qmax = isqrt(horizon.max(1)) as u128;
    let den: u128 = 1 << SCALE_BITS;
    let num = (theta * den as f64).round() as u128;

    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let (mut x, mut y) = (num, den);
    while y != 0 {
        let t = x / y;
        let (p2, q2) = (t * p1 + p0, t * q1 + q0);
        if q2 > qmax {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        (x, y) = (y, x % y);
    }
    let (a, q) = (p1 as u64, q1 as u64);
    let k = (theta - a as f64 / q as f64) * horizon as f64;
    FareyPoint::new(a, q, k, horizon)
}

/// `theta = a/q + l/(T N)` on the grid of density `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscretizedAngle {
    pub base: FareyPoint,
    pub density: u64,
    pub l: i64,
    pub lbar: f64,
}

impl DiscretizedAngle {
    /// Nearest grid point below `K` in steps of `1/T`.
    pub fn from_point(base: FareyPoint, density: u64) -> Result<Self> {
        if density == 0 {
            return Err(param("T", "must be at least 1"));
        }
        let t = density as f64;
        let l = (base.k * t).floor() as i64;
        Ok(Self {
            base,
            density,
            l,
            lbar: (l.unsigned_abs() as f64 / t).max(1.0),
        })
    }

    pub fn theta(&self) -> f64 {
        let b = &self.base;
        b.a as f64 / b.q as f64 + self.l as f64 / (self.density as f64 * b.horizon as f64)
    }

    /// `lambda` in `theta = a/q + l/(TN) + lambda/N`, within `[0, 1/T)`.
    pub fn lambda(&self) -> f64 {
        self.base.k - self.l as f64 / self.density as f64
    }
}
