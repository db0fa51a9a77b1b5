use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative 2x2 integer matrix with determinant +1 or -1.
///
/// Row-major: `(a b; c d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    a: u128,
    b: u128,
    c: u128,
    d: u128,
}

// (high, low) halves of the 256-bit product.
fn wide_mul(x: u128, y: u128) -> (u128, u128) {
    const LO: u128 = u64::MAX as u128;
    let (x1, x0) = (x >> 64, x & LO);
    let (y1, y0) = (y >> 64, y & LO);
    let p00 = x0 * y0;
    let p01 = x0 * y1;
    let p10 = x1 * y0;
    let p11 = x1 * y1;
    let mid = (p00 >> 64) + (p01 & LO) + (p10 & LO);
    let lo = (p00 & LO) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

fn wide_inc((hi, lo): (u128, u128)) -> (u128, u128) {
    match lo.checked_add(1) {
        Some(lo) => (hi, lo),
        None => (hi.wrapping_add(1), 0),
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: u128, b: u128, c: u128, d: u128) -> Result<Self> {
        let m = Mat2 { a, b, c, d };
        m.det()?;
        Ok(m)
    }

    /// `(d 1; 1 0)`.
    pub fn quotient(d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroQuotient);
        }
        Ok(Mat2 {
            a: d as u128,
            b: 1,
            c: 1,
            d: 0,
        })
    }

    pub fn entries(&self) -> [u128; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> u128 {
        self.a
    }

    pub fn b(&self) -> u128 {
        self.b
    }

    pub fn c(&self) -> u128 {
        self.c
    }

    pub fn d(&self) -> u128 {
        self.d
    }

    /// `ad - bc`, which is always +1 or -1 for a valid value. Exact for all
    /// entries: the products are formed in 256 bits.
    pub fn det(&self) -> Result<i8> {
        let ad = wide_mul(self.a, self.d);
        let bc = wide_mul(self.b, self.c);
        if ad == wide_inc(bc) {
            Ok(1)
        } else if bc == wide_inc(ad) {
            Ok(-1)
        } else {
            Err(Error::InvalidAlphabet(format!(
                "matrix {self} has determinant outside {{+1, -1}}"
            )))
        }
    }

    /// Max-entry norm.
    pub fn norm(&self) -> u128 {
        self.a.max(self.b).max(self.c).max(self.d)
    }

    pub fn checked_mul(&self, rhs: &Mat2) -> Result<Mat2> {
        let dot = |x: u128, y: u128, z: u128, w: u128| -> Result<u128> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(Error::Overflow)
        };
        Ok(Mat2 {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    /// Right-multiplies by `(q 1; 1 0)`. This is the hot step of every word
    /// traversal, so it skips the generic product.
    pub fn push_quotient(&self, q: u64) -> Result<Mat2> {
        let q = q as u128;
        let a = q
            .checked_mul(self.a)
            .and_then(|x| x.checked_add(self.b))
            .ok_or(Error::Overflow)?;
        let c = q
            .checked_mul(self.c)
            .and_then(|x| x.checked_add(self.d))
            .ok_or(Error::Overflow)?;
        Ok(Mat2 {
            a,
            b: self.a,
            c,
            d: self.c,
        })
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_matrices() {
        for d in [1u64, 2, 7] {
            let m = Mat2::quotient(d).unwrap();
            assert_eq!(m.entries(), [d as u128, 1, 1, 0]);
            assert_eq!(m.det().unwrap(), -1);
        }
        assert_eq!(Mat2::quotient(0), Err(Error::ZeroQuotient));
    }

    #[test]
    fn push_matches_product() {
        let m = Mat2::quotient(3).unwrap().push_quotient(4).unwrap();
        let p = Mat2::quotient(3)
            .unwrap()
            .checked_mul(&Mat2::quotient(4).unwrap())
            .unwrap();
        assert_eq!(m, p);
        assert_eq!(m.det().unwrap(), 1);
    }

    #[test]
    fn wide_products() {
        assert_eq!(wide_mul(1 << 127, 4), (2, 0));
        assert_eq!(wide_mul(u128::MAX, u128::MAX), (u128::MAX - 1, 1));
        assert_eq!(wide_mul(12345, 678), (0, 12345 * 678));
        assert_eq!(wide_inc((0, u128::MAX)), (1, 0));
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            Mat2::new(u128::MAX, 1, 1, 2),
            Err(Error::InvalidAlphabet(_))
        ));
        let big = Mat2::new(u128::MAX, u128::MAX - 1, 1, 1).unwrap();
        assert_eq!(big.det(), Ok(1));
        assert_eq!(big.checked_mul(&big), Err(Error::Overflow));
        let m = Mat2::quotient(u64::MAX).unwrap();
        let mut acc = m;
        let mut failed = false;
        for _ in 0..4 {
            match acc.push_quotient(u64::MAX) {
                Ok(next) => acc = next,
                Err(e) => {
                    assert_eq!(e, Error::Overflow);
                    failed = true;
                    break;
                }
            }
        }
        assert!(failed);
    }

    #[test]
    fn rejects_bad_determinant() {
        assert!(Mat2::new(2, 0, 0, 2).is_err());
        assert!(Mat2::new(1, 0, 0, 1).is_ok());
    }
}
