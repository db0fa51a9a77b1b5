use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Alphabet, Mat2};
use crate::error::{Error, Result};

/// A finite continued fraction `[d_1, ..., d_k] = 1/(d_1 + 1/(d_2 + ... + 1/d_k))`.
///
/// Every rational in `(0, 1]` has exactly two such words, one ending in a
/// quotient `>= 2` (canonical) and its twin ending in `1`. The single
/// exception is `1 = [1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CfWord {
    quotients: Vec<u64>,
}

impl CfWord {
    pub fn new(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::EmptyWord);
        }
        if quotients.contains(&0) {
            return Err(Error::ZeroQuotient);
        }
        Ok(Self { quotients })
    }

    /// Builds a word and checks that every quotient is a letter of `alphabet`.
    pub fn over(alphabet: &Alphabet, quotients: Vec<u64>) -> Result<Self> {
        let w = Self::new(quotients)?;
        if let Some(&d) = w.quotients.iter().find(|&&d| !alphabet.contains(d)) {
            return Err(Error::LetterNotInAlphabet(d));
        }
        Ok(w)
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_canonical(&self) -> bool {
        self.quotients == [1] || *self.quotients.last().unwrap() >= 2
    }

    /// The other word with the same value, if any.
    pub fn twin(&self) -> Option<CfWord> {
        let k = self.quotients.len();
        let last = self.quotients[k - 1];
        if last >= 2 {
            let mut q = self.quotients.clone();
            q[k - 1] = last - 1;
            q.push(1);
            Some(CfWord { quotients: q })
        } else if k >= 2 {
            let mut q = self.quotients[..k - 1].to_vec();
            q[k - 2] += 1;
            Some(CfWord { quotients: q })
        } else {
            None
        }
    }

    pub fn in_alphabet(&self, alphabet: &Alphabet) -> bool {
        self.quotients.iter().all(|&d| alphabet.contains(d))
    }

    /// True when this word or its twin uses only letters of `alphabet`.
    pub fn admissible_in(&self, alphabet: &Alphabet) -> bool {
        self.in_alphabet(alphabet) || self.twin().is_some_and(|t| t.in_alphabet(alphabet))
    }

    pub fn reversed(&self) -> CfWord {
        let mut q = self.quotients.clone();
        q.reverse();
        CfWord { quotients: q }
    }

    /// Words `w[..i]` for `i` in `range`, used when splitting products.
    pub fn slice(&self, start: usize, end: usize) -> Option<CfWord> {
        (start < end && end <= self.len()).then(|| CfWord {
            quotients: self.quotients[start..end].to_vec(),
        })
    }
}

impl TryFrom<Vec<u64>> for CfWord {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CfWord> for Vec<u64> {
    fn from(w: CfWord) -> Self {
        w.quotients
    }
}

impl fmt::Display for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in &self.quotients {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

pub fn quotient_matrix(d: u64) -> Result<Mat2> {
    Mat2::quotient(d)
}

/// `(d_1 1; 1 0) ... (d_k 1; 1 0)`.
///
/// The result is `(K(d_1..d_k) K(d_1..d_{k-1}); K(d_2..d_k) K(d_2..d_{k-1}))`
/// in continuant notation.
pub fn matrix_of_word(w: &CfWord) -> Result<Mat2> {
    w.quotients
        .iter()
        .try_fold(Mat2::IDENTITY, |m, &d| m.push_quotient(d))
}

/// Denominator of `[d_1, ..., d_k]` in lowest terms.
pub fn continuant(w: &CfWord) -> Result<u128> {
    // q_{-1} = 0, q_0 = 1, q_j = d_j q_{j-1} + q_{j-2}
    let (mut prev, mut cur) = (0u128, 1u128);
    for &d in &w.quotients {
        let next = (d as u128)
            .checked_mul(cur)
            .and_then(|x| x.checked_add(prev))
            .ok_or(Error::Overflow)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `(b, d)` with `b/d = [d_1, ..., d_k]`, `gcd(b, d) = 1`.
pub fn convergent(w: &CfWord) -> Result<(u128, u128)> {
    let m = matrix_of_word(w)?;
    Ok((m.c(), m.a()))
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Canonical expansion of `b/d` for coprime `1 <= b <= d`.
///
/// The quotients are not checked against any alphabet.
pub fn cf_of_rational(b: u128, d: u128) -> Result<CfWord> {
    if b == 0 || b > d {
        return Err(Error::NotProperFraction { b, d });
    }
    let g = gcd(b, d);
    if g != 1 {
        return Err(Error::NotCoprime { b, d, gcd: g });
    }
    let mut quotients = Vec::new();
    let (mut num, mut den) = (d, b);
    while den != 0 {
        let q = num / den;
        quotients.push(u64::try_from(q).map_err(|_| Error::Overflow)?);
        (num, den) = (den, num - q * den);
    }
    Ok(CfWord { quotients })
}
