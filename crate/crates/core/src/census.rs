//! Exact enumeration of the denominator set `D_A(N)`: every `d <= N` that is
//! the continuant of some word over the alphabet.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{cf_of_rational, gcd, Alphabet, CfWord};
use crate::error::{Error, Result};

/// Default bitset cap: 2^33 bits, i.e. 1 GiB.
pub const DEFAULT_MAX_BITS: u64 = 1 << 33;

/// The quadratic oracle is only meant for small horizons.
pub const ORACLE_MAX_N: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Keep, for every member, the lexicographically first word producing it.
    pub witnesses: bool,
    pub max_bits: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            witnesses: false,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenominatorSet {
    horizon: u64,
    alphabet: Alphabet,
    // bit d-1 of the packed words marks d
    bits: Vec<u64>,
    witnesses: Option<BTreeMap<u64, CfWord>>,
}

impl DenominatorSet {
    fn empty(alphabet: &Alphabet, horizon: u64) -> Self {
        Self {
            horizon,
            alphabet: alphabet.clone(),
            bits: vec![0; horizon.div_ceil(64) as usize],
            witnesses: None,
        }
    }

    fn insert(&mut self, d: u64) {
        let i = d - 1;
        self.bits[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn contains(&self, d: u64) -> bool {
        if d == 0 || d > self.horizon {
            return false;
        }
        let i = d - 1;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `#D_A(n)` for `n <= horizon`.
    pub fn count_up_to(&self, n: u64) -> u64 {
        let n = n.min(self.horizon);
        let full = (n / 64) as usize;
        let mut c: u64 = self.bits[..full]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let rem = n % 64;
        if rem > 0 {
            c += (self.bits[full] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        c
    }

    pub fn ratio(&self) -> f64 {
        self.count() as f64 / self.horizon as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.horizon).filter(|&d| self.contains(d))
    }

    pub fn members(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn witness(&self, d: u64) -> Option<&CfWord> {
        self.witnesses.as_ref()?.get(&d)
    }

    pub fn witnesses(&self) -> Option<&BTreeMap<u64, CfWord>> {
        self.witnesses.as_ref()
    }

    pub fn is_subset_of(&self, other: &DenominatorSet) -> bool {
        self.iter().all(|d| other.contains(d))
    }

    /// Witness file body: one `d: d_1 d_2 ... d_k` line per member.
    pub fn witness_lines(&self) -> Option<String> {
        let w = self.witnesses.as_ref()?;
        let mut out = String::new();
        for (d, word) in w {
            writeln!(out, "{d}: {word}").unwrap();
        }
        Some(out)
    }
}

fn check_horizon(n: u64, max_bits: u64) -> Result<()> {
    if n == 0 {
        return Err(crate::error::param("N", "horizon must be at least 1"));
    }
    if n > max_bits {
        return Err(Error::Budget {
            what: "denominator bitset",
            limit: max_bits,
        });
    }
    Ok(())
}

/// Depth-first walk over all words whose continuant stays `<= n`, calling
/// `visit(continuant)` at every node. `prev`/`cur` are the last two
/// continuants of the current prefix.
fn walk(letters: &[u64], n: u64, prev: u64, cur: u64, visit: &mut impl FnMut(u64)) {
    for &d in letters {
        // letters are sorted, so once one child overshoots all later ones do
        let next = match d.checked_mul(cur).and_then(|x| x.checked_add(prev)) {
            Some(x) if x <= n => x,
            _ => break,
        };
        visit(next);
        walk(letters, n, cur, next, visit);
    }
}

pub fn enumerate_denominators(alphabet: &Alphabet, n: u64) -> Result<DenominatorSet> {
    enumerate_with(alphabet, n, CensusOptions::default())
}

pub fn enumerate_with(alphabet: &Alphabet, n: u64, opts: CensusOptions) -> Result<DenominatorSet> {
    check_horizon(n, opts.max_bits)?;
    let letters = alphabet.letters();
    let mut set = DenominatorSet::empty(alphabet, n);

    if opts.witnesses {
        let mut path: Vec<u64> = Vec::new();
        let mut found: BTreeMap<u64, CfWord> = BTreeMap::new();
        witness_walk(letters, n, 0, 1, &mut path, &mut found);
        for &d in found.keys() {
            set.insert(d);
        }
        set.witnesses = Some(found);
        return Ok(set);
    }

    // Subtrees rooted at two-letter prefixes are independent; OR-ing into a
    // shared atomic bitset makes the result independent of scheduling.
    let atoms: Vec<AtomicU64> = (0..set.bits.len()).map(|_| AtomicU64::new(0)).collect();
    let mark = |d: u64| {
        let i = d - 1;
        atoms[(i / 64) as usize].fetch_or(1 << (i % 64), Ordering::Relaxed);
    };
    let mut roots = Vec::new();
    for &d1 in letters {
        if d1 > n {
            break;
        }
        mark(d1);
        for &d2 in letters {
            match d2.checked_mul(d1).and_then(|x| x.checked_add(1)) {
                Some(q) if q <= n => roots.push((d1, q)),
                _ => break,
            }
        }
    }
    roots.par_iter().for_each(|&(prev, cur)| {
        mark(cur);
        walk(letters, n, prev, cur, &mut |d| mark(d));
    });
    set.bits = atoms.into_iter().map(AtomicU64::into_inner).collect();
    Ok(set)
}

fn witness_walk(
    letters: &[u64],
    n: u64,
    prev: u64,
    cur: u64,
    path: &mut Vec<u64>,
    found: &mut BTreeMap<u64, CfWord>,
) {
    for &d in letters {
        let next = match d.checked_mul(cur).and_then(|x| x.checked_add(prev)) {
            Some(x) if x <= n => x,
            _ => break,
        };
        path.push(d);
        found
            .entry(next)
            .or_insert_with(|| CfWord::new(path.clone()).expect("letters are positive"));
        witness_walk(letters, n, cur, next, path, found);
        path.pop();
    }
}

/// Independent quadratic check: expand every coprime `b/d` and test both
/// representations against the alphabet.
pub fn census_oracle(alphabet: &Alphabet, n: u64) -> Result<DenominatorSet> {
    if n > ORACLE_MAX_N {
        return Err(Error::Budget {
            what: "census oracle horizon",
            limit: ORACLE_MAX_N,
        });
    }
    check_horizon(n, DEFAULT_MAX_BITS)?;
    let hits: Vec<bool> = (1..=n)
        .into_par_iter()
        .map(|d| {
            (1..=d).any(|b| {
                gcd(b as u128, d as u128) == 1
                    && cf_of_rational(b as u128, d as u128)
                        .expect("coprime proper fraction")
                        .admissible_in(alphabet)
            })
        })
        .collect();
    let mut set = DenominatorSet::empty(alphabet, n);
    for (i, hit) in hits.into_iter().enumerate() {
        if hit {
            set.insert(i as u64 + 1);
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProportionRow {
    pub n: u64,
    pub count: u64,
    pub ratio: f64,
}

/// `(N, #D_A(N), #D_A(N)/N)` for each horizon, from one enumeration at the
/// largest horizon.
pub fn proportion_table(alphabet: &Alphabet, horizons: &[u64]) -> Result<Vec<ProportionRow>> {
    alphabet.require_nontrivial()?;
    if horizons.is_empty() {
        return Ok(Vec::new());
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(crate::error::param(
            "horizons",
            "must be strictly increasing",
        ));
    }
    let top = *horizons.last().unwrap();
    let set = enumerate_denominators(alphabet, top)?;
    Ok(table_from_set(&set, horizons))
}

pub fn table_from_set(set: &DenominatorSet, horizons: &[u64]) -> Vec<ProportionRow> {
    horizons
        .iter()
        .map(|&n| {
            let count = set.count_up_to(n);
            ProportionRow {
                n,
                count,
                ratio: count as f64 / n as f64,
            }
        })
        .collect()
}

pub fn proportion_csv(rows: &[ProportionRow]) -> String {
    let mut out = String::from("N,count,ratio\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.n, r.count, crate::json::fmt_f64(r.ratio)).unwrap();
    }
    out
}
