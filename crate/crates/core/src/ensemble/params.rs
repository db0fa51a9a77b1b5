use serde::Serialize;

use crate::error::{param, Error, Result};

/// `eps0` must lie in the open interval `(0, EPS0_MAX)`.
pub const EPS0_MAX: f64 = 1.0 / 2500.0;

fn check_eps0(eps0: f64) -> Result<()> {
    if eps0 > 0.0 && eps0 < EPS0_MAX {
        Ok(())
    } else {
        Err(param("eps0", format!("{eps0} not in (0, 1/2500)")))
    }
}

/// Natural log of `Q_0 = max(exp(1e5 A^4 / eps0^2), exp(eps0^-5))`.
///
/// `Q_0` itself is far beyond any machine number.
pub fn q0_log(max_letter: u64, eps0: f64) -> Result<f64> {
    check_eps0(eps0)?;
    let a4 = (max_letter as f64).powi(4);
    Ok((1e5 * a4 / (eps0 * eps0)).max(eps0.powi(-5)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationParams {
    pub m1: f64,
    pub m3: f64,
    pub eps0: f64,
    /// `log Q_0` for the alphabet.
    pub q0_log: f64,
    /// Desk-scale stand-in for `Q_0`.
    pub q0_override: Option<u64>,
}

impl FactorizationParams {
    pub fn new(
        max_letter: u64,
        m1: f64,
        m3: f64,
        eps0: f64,
        q0_override: Option<u64>,
    ) -> Result<Self> {
        Ok(Self {
            m1,
            m3,
            eps0,
            q0_log: q0_log(max_letter, eps0)?,
            q0_override,
        })
    }

    /// The `Q_0` actually used: the override when present, otherwise the
    /// true value (which saturates to infinity).
    pub fn q0_effective(&self) -> f64 {
        match self.q0_override {
            Some(q) => q as f64,
            None => self.q0_log.exp(),
        }
    }

    /// `Q_0 <= M1, M3 <= N/Q_0` and `M1 M3 < N^(1 - eps0)`.
    pub fn validate(&self, horizon: u64) -> Result<()> {
        check_eps0(self.eps0)?;
        let n = horizon as f64;
        let q0 = self.q0_effective();
        for (name, m) in [("M1", self.m1), ("M3", self.m3)] {
            if !(q0 <= m && m <= n / q0) {
                return Err(param(
                    name,
                    format!("{m} outside [Q0, N/Q0] = [{q0}, {}]", n / q0),
                ));
            }
        }
        if !(self.m1 * self.m3 < n.powf(1.0 - self.eps0)) {
            return Err(param("M1*M3", "must be below N^(1-eps0)"));
        }
        Ok(())
    }
}

// The ladder formulas make sense for any eps0 in (0, 1); what-if runs use
// values above 1/2500.
fn check_ladder_eps0(eps0: f64) -> Result<()> {
    if eps0 > 0.0 && eps0 < 1.0 {
        Ok(())
    } else {
        Err(param("eps0", format!("{eps0} not in (0, 1)")))
    }
}

/// `J(N) = floor((log log N - 4 log(10A) + 2 log eps0) / -log(1 - eps0))`,
/// with `N` given through `log_n = ln N`.
pub fn ladder_depth(log_n: f64, eps0: f64, max_letter: u64) -> Result<i64> {
    check_ladder_eps0(eps0)?;
    if !(log_n > 1.0) {
        return Err(param("N", "need log N > 1"));
    }
    let num = log_n.ln() - 4.0 * (10.0 * max_letter as f64).ln() + 2.0 * eps0.ln();
    Ok((num / -(1.0 - eps0).ln()).floor() as i64)
}

/// `N_j = N^{e_j}` for `-1-J <= j <= J+1`, stored as exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSequence {
    pub depth: i64,
    pub log_n: f64,
    pub eps0: f64,
    /// `(j, e_j)` in increasing `j`.
    pub exponents: Vec<(i64, f64)>,
}

impl LadderSequence {
    /// Exponent from the lower branch, valid for `-1-J <= j <= 1`.
    pub fn low_branch(eps0: f64, j: i64) -> f64 {
        (1.0 - eps0).powi((1 - j) as i32) / (2.0 - eps0)
    }

    /// Exponent from the upper branch, valid for `0 <= j <= J`.
    pub fn high_branch(eps0: f64, j: i64) -> f64 {
        1.0 - (1.0 - eps0).powi(j as i32) / (2.0 - eps0)
    }

    pub fn exponent(&self, j: i64) -> Option<f64> {
        let first = self.exponents.first()?.0;
        let i = usize::try_from(j - first).ok()?;
        self.exponents.get(i).map(|&(_, e)| e)
    }

    pub fn log_value(&self, j: i64) -> Option<f64> {
        self.exponent(j).map(|e| e * self.log_n)
    }

    pub fn value(&self, j: i64) -> Option<f64> {
        self.log_value(j).map(f64::exp)
    }

    /// Steps `j -> j+1` where `N_j >= N_{j+1}^(1-eps0)` fails.
    pub fn covering_failures(&self) -> Vec<i64> {
        self.exponents
            .windows(2)
            .filter(|w| w[0].1 < w[1].1 * (1.0 - self.eps0) - 1e-12)
            .map(|w| w[0].0)
            .collect()
    }
}

/// Full ladder with `J` forced, for desk-scale experiments where the
/// formula for `J` would give a negative depth.
pub fn ladder_with_depth(log_n: f64, eps0: f64, depth: i64) -> Result<LadderSequence> {
    check_ladder_eps0(eps0)?;
    if depth < 0 {
        return Err(param("J", "must be nonnegative"));
    }
    let mut exponents = Vec::with_capacity((2 * depth + 3) as usize);
    for j in (-1 - depth)..=(depth + 1) {
        let e = if j == depth + 1 {
            1.0
        } else if j <= 0 {
            LadderSequence::low_branch(eps0, j)
        } else {
            LadderSequence::high_branch(eps0, j)
        };
        exponents.push((j, e));
    }
    Ok(LadderSequence {
        depth,
        log_n,
        eps0,
        exponents,
    })
}

/// Ladder with `J = J(N)`; requires `J >= 10`.
pub fn ladder(log_n: f64, eps0: f64, max_letter: u64) -> Result<LadderSequence> {
    let depth = ladder_depth(log_n, eps0, max_letter)?;
    if depth < 10 {
        let min_log_log_n =
            4.0 * (10.0 * max_letter as f64).ln() - 2.0 * eps0.ln() + 10.0 * -(1.0 - eps0).ln();
        return Err(Error::LadderTooShort {
            depth,
            min_log_log_n,
        });
    }
    ladder_with_depth(log_n, eps0, depth)
}
