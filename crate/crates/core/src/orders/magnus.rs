//! The Magnus bi-order on a free group.
//!
//! `w` is sent to `1 + Σ c_m X^m` in the ring of noncommuting power series
//! with integer coefficients, via `x_i ↦ 1 + X_i`. The sign of `w ≠ 1` is
//! the sign of the first nonzero `c_m`, monomials ordered by degree and then
//! lexicographically on generator indices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::word::Word;

use super::Sign;

type Series = BTreeMap<Vec<u32>, BigInt>;

/// Generalised binomial coefficient `C(e, k)` for integer `e`.
fn binom(e: i64, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(e - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `s · (1 + X_g)^e`, truncated above `degree`.
fn mul_syllable(s: &Series, g: u32, e: i64, degree: usize) -> Series {
    let coeffs: Vec<BigInt> = (0..=degree).map(|k| binom(e, k)).collect();
    let mut out = Series::new();
    for (mono, c) in s {
        for (k, b) in coeffs.iter().enumerate().take(degree + 1 - mono.len()) {
            if b.is_zero() {
                continue;
            }
            let mut m = mono.clone();
            m.extend(std::iter::repeat_n(g, k));
            let entry = out.entry(m).or_insert_with(BigInt::zero);
            *entry += c * b;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn expansion(w: &Word, degree: usize) -> Series {
    let mut s = Series::new();
    s.insert(Vec::new(), BigInt::one());
    for &(g, e) in w.syllables() {
        s = mul_syllable(&s, g as u32, e, degree);
    }
    s
}

fn leading(s: &Series, degree: usize) -> Option<Sign> {
    (1..=degree).find_map(|d| {
        s.iter()
            .filter(|(m, _)| m.len() == d)
            .find(|(_, c)| !c.is_zero())
            .map(|(_, c)| if c.is_positive() { Sign::Pos } else { Sign::Neg })
    })
}

/// Magnus sign of a freely reduced word; `None` for the empty word.
///
/// The truncation degree is doubled until a nonzero term appears, which
/// always happens by degree `letter_len(w)`.
pub fn magnus_sign(w: &Word) -> Option<Sign> {
    if w.is_identity() {
        return None;
    }
    let mut degree = 2usize;
    loop {
        let d = degree.min(w.letter_len().max(1));
        if let Some(s) = leading(&expansion(w, d), d) {
            return Some(s);
        }
        if d == w.letter_len().max(1) {
            // unreachable for reduced words: the expansion is injective
            return None;
        }
        degree *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(p: &[(usize, i64)]) -> Word {
        Word::from_pairs(p.iter().copied())
    }

    #[test]
    fn binomials_match_series_inverse() {
        // (1+X)^-1 = 1 - X + X^2 - ...
        assert_eq!(binom(-1, 3), BigInt::from(-1));
        assert_eq!(binom(-2, 2), BigInt::from(3));
        assert_eq!(binom(3, 4), BigInt::zero());
    }

    #[test]
    fn generators_positive_inverses_negative() {
        assert_eq!(magnus_sign(&w(&[(0, 1)])), Some(Sign::Pos));
        assert_eq!(magnus_sign(&w(&[(1, -3)])), Some(Sign::Neg));
    }

    #[test]
    fn commutator_decided_in_degree_two() {
        // [x, y] = x y x^-1 y^-1 = 1 + XY - YX + ...
        let c = w(&[(0, 1), (1, 1), (0, -1), (1, -1)]);
        assert_eq!(magnus_sign(&c), Some(Sign::Pos));
        assert_eq!(magnus_sign(&c.inverse()), Some(Sign::Neg));
    }

    #[test]
    fn agrees_with_abelian_part() {
        // degree-one term is the exponent-sum vector
        let a = w(&[(1, 2), (0, -1), (1, -1)]);
        assert_eq!(magnus_sign(&a), Some(Sign::Neg));
    }
}
