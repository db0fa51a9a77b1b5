//! Desk-scale ensembles `Omega_N`: all alphabet words whose matrix norm lies in
//! the window `(N/C, N]`, together with the three-factor norm-window split
//! and the parameter ladder `Q_0`, `J`, `N_j` that controls the arc geometry.
//!
//! This is a surrogate for the pruned construction used in the literature:
//! it keeps what the downstream code relies on (a norm window, products of
//! quotient matrices, polynomial growth in `N`) and nothing else.

mod factor;
mod params;

pub use factor::{factorize, split_word, FactorReport, Factorization, Split, SplitKind};
pub use params::{
    ladder, ladder_depth, ladder_with_depth, q0_log, FactorizationParams, LadderSequence, EPS0_MAX,
};

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cf::{Alphabet, CfWord, Mat2};
use crate::error::{param, Error, Result};

pub const DEFAULT_MEMBER_CAP: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub word: CfWord,
    pub matrix: Mat2,
}

impl Member {
    pub fn norm(&self) -> u128 {
        self.matrix.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    horizon: u64,
    window_ratio: f64,
    alphabet: Alphabet,
    members: Vec<Member>,
}

impl Ensemble {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn window_ratio(&self) -> f64 {
        self.window_ratio
    }

    /// Exclusive lower end `N/C` of the norm window.
    pub fn window_floor(&self) -> f64 {
        self.horizon as f64 / self.window_ratio
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn norms(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|m| m.norm() as u64)
    }

    /// `log |Omega_N| / log N`, to compare against `2 delta`.
    pub fn growth_exponent(&self) -> f64 {
        (self.members.len() as f64).ln() / (self.horizon as f64).ln()
    }

    /// Portable text form: one `d_1 d_2 ... d_k` line per member.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for m in &self.members {
            writeln!(out, "{}", m.word).unwrap();
        }
        out
    }

    /// Rebuilds an ensemble from [`Ensemble::to_lines`] output.
    pub fn from_lines(
        alphabet: &Alphabet,
        horizon: u64,
        window_ratio: f64,
        text: &str,
    ) -> Result<Self> {
        let mut members = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let q = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| param("ensemble line", line.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let word = CfWord::over(alphabet, q)?;
            let matrix = crate::cf::matrix_of_word(&word)?;
            members.push(Member { word, matrix });
        }
        Ok(Self {
            horizon,
            window_ratio,
            alphabet: alphabet.clone(),
            members,
        })
    }
}

fn collect_window(
    letters: &[u64],
    horizon: u64,
    floor: f64,
    path: &mut Vec<u64>,
    m: Mat2,
    out: &mut Vec<Member>,
) {
    for &d in letters {
        let next = match m.push_quotient(d) {
            Ok(x) if x.a() <= horizon as u128 => x,
            _ => break,
        };
        path.push(d);
        if next.a() as f64 > floor {
            out.push(Member {
                word: CfWord::new(path.clone()).expect("positive letters"),
                matrix: next,
            });
        }
        collect_window(letters, horizon, floor, path, next, out);
        path.pop();
    }
}

pub fn build_ensemble(alphabet: &Alphabet, horizon: u64, window_ratio: f64) -> Result<Ensemble> {
    build_ensemble_capped(alphabet, horizon, window_ratio, DEFAULT_MEMBER_CAP)
}

/// Words in lexicographic (depth-first) order whose norm is in `(N/C, N]`.
pub fn build_ensemble_capped(
    alphabet: &Alphabet,
    horizon: u64,
    window_ratio: f64,
    cap: usize,
) -> Result<Ensemble> {
    if horizon == 0 {
        return Err(param("N", "must be positive"));
    }
    if !(window_ratio > 1.0 && window_ratio <= 10.0) {
        return Err(param(
            "window_ratio",
            format!("{window_ratio} not in (1, 10]"),
        ));
    }
    let floor = horizon as f64 / window_ratio;
    let letters = alphabet.letters();
    let roots: Vec<u64> = letters.iter().copied().filter(|&d| d <= horizon).collect();
    let chunks: Vec<Vec<Member>> = roots
        .par_iter()
        .map(|&d| {
            let m = Mat2::quotient(d).expect("positive letter");
            let mut out = Vec::new();
            if d as f64 > floor {
                out.push(Member {
                    word: CfWord::new(vec![d]).unwrap(),
                    matrix: m,
                });
            }
            collect_window(letters, horizon, floor, &mut vec![d], m, &mut out);
            out
        })
        .collect();
    let total: usize = chunks.iter().map(Vec::len).sum();
    if total > cap {
        return Err(Error::Budget {
            what: "ensemble members",
            limit: cap as u64,
        });
    }
    Ok(Ensemble {
        horizon,
        window_ratio,
        alphabet: alphabet.clone(),
        members: chunks.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_window() {
        let a = Alphabet::new([1, 2]).unwrap();
        let e = build_ensemble(&a, 10, 2.0).unwrap();
        let mut norms: Vec<u64> = e.norms().collect();
        norms.sort_unstable();
        norms.dedup();
        assert_eq!(norms, vec![7, 8, 10]);
        // census at N=10 minus census at N=5
        let census = crate::census::enumerate_denominators(&a, 10).unwrap();
        let expect: Vec<u64> = census.iter().filter(|&d| d > 5).collect();
        assert_eq!(norms, expect);
        for m in e.members() {
            assert!(m.norm() > 5 && m.norm() <= 10);
            assert_eq!(m.norm(), m.matrix.a());
        }
        let distinct: HashSet<Mat2> = e.members().iter().map(|m| m.matrix).collect();
        assert_eq!(distinct.len(), e.len());
    }

    #[test]
    fn unit_horizon() {
        let a = Alphabet::new([1, 2]).unwrap();
        let e = build_ensemble(&a, 1, 2.0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.members()[0].word.quotients(), &[1]);
    }

    #[test]
    fn parameter_checks() {
        let a = Alphabet::new([1, 2]).unwrap();
        assert!(build_ensemble(&a, 10, 1.0).is_err());
        assert!(build_ensemble(&a, 10, 11.0).is_err());
        assert!(build_ensemble(&a, 0, 2.0).is_err());
        assert!(matches!(
            build_ensemble_capped(&a, 10_000, 2.0, 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn lines_round_trip() {
        let a = Alphabet::new([1, 2, 3]).unwrap();
        let e = build_ensemble(&a, 300, 3.0).unwrap();
        let back = Ensemble::from_lines(&a, 300, 3.0, &e.to_lines()).unwrap();
        assert_eq!(back, e);
        assert!(Ensemble::from_lines(&a, 300, 3.0, "1 4\n").is_err());
    }

    #[test]
    fn order_is_deterministic() {
        let a = Alphabet::range(4).unwrap();
        let x = build_ensemble(&a, 2000, 2.0).unwrap();
        let y = build_ensemble(&a, 2000, 2.0).unwrap();
        assert_eq!(x, y);
        let words: Vec<&CfWord> = x.members().iter().map(|m| &m.word).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
    }
}
