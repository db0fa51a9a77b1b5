use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of admissible partial quotients, kept sorted and distinct.
///
/// Single-letter alphabets are accepted so that the combinatorial layer can
/// still enumerate their (very thin) denominator sets; everything that needs
/// the `|A| >= 2` regime calls [`Alphabet::require_nontrivial`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Alphabet {
    letters: Vec<u64>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut letters: Vec<u64> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(Error::InvalidAlphabet("no letters".into()));
        }
        if letters.contains(&0) {
            return Err(Error::InvalidAlphabet("letters must be positive".into()));
        }
        letters.sort_unstable();
        let len = letters.len();
        letters.dedup();
        if letters.len() != len {
            return Err(Error::InvalidAlphabet("repeated letter".into()));
        }
        Ok(Self { letters })
    }

    /// `{1, 2, ..., max}`.
    pub fn range(max: u64) -> Result<Self> {
        Self::new(1..=max)
    }

    pub fn letters(&self) -> &[u64] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest letter.
    pub fn max_letter(&self) -> u64 {
        *self.letters.last().expect("alphabet is nonempty")
    }

    pub fn contains(&self, d: u64) -> bool {
        self.letters.binary_search(&d).is_ok()
    }

    pub fn require_nontrivial(&self) -> Result<()> {
        if self.letters.len() < 2 {
            Err(Error::TrivialAlphabet(self.letters.len()))
        } else {
            Ok(())
        }
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.letters.iter().all(|&d| other.contains(d))
    }
}

impl TryFrom<Vec<u64>> for Alphabet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Alphabet> for Vec<u64> {
    fn from(a: Alphabet) -> Self {
        a.letters
    }
}

/// Accepts comma-separated letters and inclusive ranges, e.g. `1,2,5` or `1..10`.
impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidAlphabet(format!("cannot parse {part:?}"));
            if let Some((lo, hi)) = part.split_once("..") {
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi
                    .trim_start_matches('=')
                    .trim()
                    .parse()
                    .map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                letters.extend(lo..=hi);
            } else {
                letters.push(part.parse().map_err(|_| bad())?);
            }
        }
        Self::new(letters)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
