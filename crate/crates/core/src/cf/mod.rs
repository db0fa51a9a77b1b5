//! Exact continued fractions over a finite alphabet: words, continuants and
//! the matching products of `(d 1; 1 0)` matrices.

mod alphabet;
mod matrix;
mod word;

pub use alphabet::Alphabet;
pub use matrix::Mat2;
pub use word::{
    cf_of_rational, continuant, convergent, gcd, matrix_of_word, quotient_matrix, CfWord,
};
