//! The `(q, K)` domain `Q0 < q <= sqrt N`, `Q0/q <= |K| <= sqrt N / q` of the
//! main arc integral, cut into six regions. The region ranges overlap on
//! their boundaries; [`classify_region`] resolves this with lower bounds
//! inclusive, upper bounds exclusive and the priority order 2, 1, 3, 4, 6, 5.

use serde::{Serialize, Serializer};

use super::dirichlet::isqrt;
use super::quadrature::{pairwise_sum, simpson, MAX_DOUBLINGS};
use super::spectrum::SpectrumHistogram;
use crate::cf::gcd;
use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionParams {
    pub horizon: u64,
    /// `gamma = 1 - delta`.
    pub gamma: f64,
    pub eps0: f64,
    pub nu: f64,
    pub q0_eff: u64,
    /// `xi1 = N^(2 gamma + 7 eps0)`.
    pub xi1: f64,
}

impl RegionParams {
    pub fn new(horizon: u64, gamma: f64, eps0: f64, nu: f64, q0_eff: u64) -> Result<Self> {
        if horizon < 4 {
            return Err(param("N", "must be at least 4"));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(param("gamma", format!("{gamma} not in [0, 1)")));
        }
        if !(eps0 > 0.0 && eps0 < 1.0) {
            return Err(param("eps0", format!("{eps0} not in (0, 1)")));
        }
        if !(1.0..=2.0).contains(&nu) {
            return Err(param("nu", format!("{nu} not in [1, 2]")));
        }
        if q0_eff == 0 {
            return Err(param("Q0", "must be positive"));
        }
        Ok(Self {
            horizon,
            gamma,
            eps0,
            nu,
            q0_eff,
            xi1: (horizon as f64).powf(2.0 * gamma + 7.0 * eps0),
        })
    }

    fn n(&self) -> f64 {
        self.horizon as f64
    }

    pub fn q_max(&self) -> u64 {
        isqrt(self.horizon)
    }

    /// `N^(gamma + 5 eps0)`, the lower end of `q` in region 3.
    pub fn region3_q(&self) -> f64 {
        self.n().powf(self.gamma + 5.0 * self.eps0)
    }

    /// `N^(3 gamma + 12 eps0)`; region 3 has `|K| >= this / q`.
    pub fn region3_k(&self) -> f64 {
        self.n().powf(3.0 * self.gamma + 12.0 * self.eps0)
    }

    /// `xi1^(1/(nu+1))`, the upper end of `q` in region 6.
    pub fn region6_q(&self) -> f64 {
        self.xi1.powf(1.0 / (self.nu + 1.0))
    }

    /// `|K|` range of the domain at this `q`, if `q` is in it.
    pub fn k_range(&self, q: u64) -> Option<(f64, f64)> {
        if q <= self.q0_eff || q > self.q_max() {
            return None;
        }
        let q = q as f64;
        Some((self.q0_eff as f64 / q, self.n().sqrt() / q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    Outside,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::R1,
        Region::R2,
        Region::R3,
        Region::R4,
        Region::R5,
        Region::R6,
    ];

    /// 1..=6, or 0 outside.
    pub fn number(self) -> u8 {
        match self {
            Region::R1 => 1,
            Region::R2 => 2,
            Region::R3 => 3,
            Region::R4 => 4,
            Region::R5 => 5,
            Region::R6 => 6,
            Region::Outside => 0,
        }
    }

    fn index(self) -> Option<usize> {
        (self != Region::Outside).then(|| self.number() as usize - 1)
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Region::Outside => s.serialize_str("OUTSIDE"),
            r => s.serialize_u8(r.number()),
        }
    }
}

pub fn classify_region(q: u64, k: f64, p: &RegionParams) -> Region {
    let Some((lo, hi)) = p.k_range(q) else {
        return Region::Outside;
    };
    let k = k.abs();
    if !(lo <= k && k <= hi) {
        return Region::Outside;
    }
    let qf = q as f64;
    if qf > p.xi1 {
        Region::R2
    } else if k >= p.xi1 {
        Region::R1
    } else if qf > p.region3_q() && k >= p.region3_k() / qf {
        Region::R3
    } else if k >= p.xi1 / qf {
        Region::R4
    } else if qf <= p.region6_q() && k >= qf.powf(p.nu) {
        Region::R6
    } else {
        Region::R5
    }
}

/// Closed range of each region exactly as stated, without arbitration:
/// entry `i` is whether `(q, K)` lies in region `i + 1`.
pub fn region_ranges(q: u64, k: f64, p: &RegionParams) -> [bool; 6] {
    let Some((lo, hi)) = p.k_range(q) else {
        return [false; 6];
    };
    let k = k.abs();
    if !(lo <= k && k <= hi) {
        return [false; 6];
    }
    let qf = q as f64;
    let xi = p.xi1;
    let k3 = p.region3_k() / qf;
    [
        qf <= xi && xi <= k,
        qf > xi,
        qf > p.region3_q() && qf <= xi && k3 <= k && k <= xi,
        qf <= xi && xi / qf <= k && k <= xi.min(k3),
        qf <= xi && k <= qf.powf(p.nu).min(xi / qf),
        qf <= p.region6_q() && qf.powf(p.nu) <= k && k <= xi / qf,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCensus {
    pub params: RegionParams,
    pub q_values: usize,
    pub k_values: usize,
    pub points: usize,
    /// Points per region 1..6.
    pub counts: [usize; 6],
    pub outside: usize,
    /// Labelled points that are not in their region's stated range.
    pub inconsistent: usize,
    /// Points in no stated range at all.
    pub uncovered: usize,
}

/// `nq` consecutive moduli from `Q0 + 1` (capped at `sqrt N`) times `nk`
/// log-spaced `|K|` across each column's admissible range.
pub fn partition_grid(p: &RegionParams, nq: usize, nk: usize) -> Result<GridCensus> {
    if nq == 0 || nk < 2 {
        return Err(param("grid", "need nq >= 1 and nk >= 2"));
    }
    let q_hi = p.q_max().min(p.q0_eff + nq as u64);
    if q_hi <= p.q0_eff {
        return Err(param("Q0", "no modulus between Q0 and sqrt N"));
    }
    let mut g = GridCensus {
        params: *p,
        q_values: (q_hi - p.q0_eff) as usize,
        k_values: nk,
        points: 0,
        counts: [0; 6],
        outside: 0,
        inconsistent: 0,
        uncovered: 0,
    };
    for q in p.q0_eff + 1..=q_hi {
        let (lo, hi) = p.k_range(q).expect("q in range");
        let ratio = (hi / lo).ln();
        for j in 0..nk {
            let k = if j + 1 == nk {
                hi
            } else {
                lo * (ratio * j as f64 / (nk - 1) as f64).exp()
            };
            g.points += 1;
            let ranges = region_ranges(q, k, p);
            if !ranges.iter().any(|&b| b) {
                g.uncovered += 1;
            }
            match classify_region(q, k, p).index() {
                Some(i) => {
                    g.counts[i] += 1;
                    if !ranges[i] {
                        g.inconsistent += 1;
                    }
                }
                None => g.outside += 1,
            }
        }
    }
    Ok(g)
}

/// Breakpoints of the classification in `|K|` at fixed `q`, clipped to the
/// domain, so each piece carries a single label.
fn k_pieces(q: u64, p: &RegionParams) -> Vec<(f64, f64, Region)> {
    let Some((lo, hi)) = p.k_range(q) else {
        return Vec::new();
    };
    let qf = q as f64;
    let mut cuts = vec![lo, hi];
    for c in [p.xi1, p.region3_k() / qf, p.xi1 / qf, qf.powf(p.nu)] {
        if c > lo && c < hi {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| (w[0], w[1], classify_region(q, 0.5 * (w[0] + w[1]), p)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionEntry {
    pub region: Region,
    /// Quadrature nodes used for this region.
    pub count: usize,
    pub mass: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub params: RegionParams,
    pub members: u64,
    pub grid: f64,
    pub doublings: usize,
    pub regions: Vec<RegionEntry>,
    pub mass_sum: f64,
    /// The same integral over the whole domain, without the split.
    pub first_term_total: f64,
    pub relative_gap: f64,
    /// Largest change of a share in the last grid doubling.
    pub share_change: f64,
    /// `2 Q0^2 |Omega|^2 / N`.
    pub baseline_term: f64,
}

struct Masses {
    mass: [f64; 6],
    count: [usize; 6],
    total: f64,
}

fn nodes(len: f64, density: f64) -> usize {
    ((len * density).ceil() as usize).max(2)
}

// density: nodes per unit of K
fn masses(h: &SpectrumHistogram, p: &RegionParams, density: f64) -> Masses {
    let n = p.n();
    let mut out = Masses {
        mass: [0.0; 6],
        count: [0; 6],
        total: 0.0,
    };
    let mut parts: [Vec<f64>; 6] = Default::default();
    let mut totals = Vec::new();
    for q in p.q0_eff + 1..=p.q_max() {
        let pieces = k_pieces(q, p);
        let (lo, hi) = p.k_range(q).expect("q in range");
        for a in (1..q).filter(|&a| gcd(a as u128, q as u128) == 1) {
            let c = a as f64 / q as f64;
            for sign in [1.0, -1.0] {
                let f = |k: f64| h.power(c + sign * k / n) / n;
                for &(l, r, region) in &pieces {
                    let i = region.index().expect("pieces lie in the domain");
                    let m = nodes(r - l, density);
                    parts[i].push(simpson(f, l, r, m));
                    out.count[i] += m + 1;
                }
                totals.push(simpson(f, lo, hi, nodes(hi - lo, density)));
            }
        }
    }
    for i in 0..6 {
        out.mass[i] = pairwise_sum(&parts[i]);
    }
    out.total = pairwise_sum(&totals);
    out
}

/// Mass of `(1/N) sum* int |S(a/q + K/N)|^2 dK` in each region, on
/// `grid * N_max / N` nodes per unit of `K`, doubling until the whole-domain
/// total moves by at most `stab_tol`.
pub fn region_mass(
    h: &SpectrumHistogram,
    p: &RegionParams,
    grid: f64,
    stab_tol: f64,
) -> Result<RegionReport> {
    let n_max = h.max_norm().ok_or(Error::EmptyHistogram)? as f64;
    if !(grid > 0.0) {
        return Err(param("grid", "must be positive"));
    }
    if p.q_max() <= p.q0_eff {
        return Err(param("Q0", "no modulus between Q0 and sqrt N"));
    }
    let scale = n_max / p.n();
    let mut g = grid;
    let mut prev = masses(h, p, g * scale);
    let mut change = f64::NAN;
    for doublings in 1..=MAX_DOUBLINGS {
        g *= 2.0;
        let cur = masses(h, p, g * scale);
        change = (cur.total - prev.total).abs() / cur.total;
        if change <= stab_tol {
            let mass_sum: f64 = cur.mass.iter().sum();
            let share = |m: &Masses, i: usize| {
                let s: f64 = m.mass.iter().sum();
                if s > 0.0 {
                    m.mass[i] / s
                } else {
                    0.0
                }
            };
            let share_change = (0..6)
                .map(|i| (share(&cur, i) - share(&prev, i)).abs())
                .fold(0.0, f64::max);
            let regions = Region::ALL
                .iter()
                .enumerate()
                .map(|(i, &region)| RegionEntry {
                    region,
                    count: cur.count[i],
                    mass: cur.mass[i],
                    share: share(&cur, i),
                })
                .collect();
            let omega = h.total() as f64;
            let q0 = p.q0_eff as f64;
            return Ok(RegionReport {
                params: *p,
                members: h.total(),
                grid: g,
                doublings,
                regions,
                mass_sum,
                first_term_total: cur.total,
                relative_gap: (mass_sum - cur.total).abs() / cur.total,
                share_change,
                baseline_term: 2.0 * q0 * q0 * omega * omega / p.n(),
            });
        }
        prev = cur;
    }
    Err(Error::GridUnstable {
        change,
        doublings: MAX_DOUBLINGS,
    })
}
