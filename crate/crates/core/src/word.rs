use serde::{Deserialize, Serialize};

/// A group word stored as syllables `(generator index, nonzero exponent)`.
///
/// Adjacent syllables always carry distinct generators; every constructor
/// merges and cancels as it goes, so a `Word` is freely reduced as written.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(index: usize) -> Self {
        Word(vec![(index, 1)])
    }

    pub fn power_of(index: usize, exp: i64) -> Self {
        let mut w = Word::identity();
        w.push(index, exp);
        w
    }

    /// Builds a word from arbitrary pairs, merging and cancelling adjacent syllables.
    pub fn from_pairs<I: IntoIterator<Item = (usize, i64)>>(pairs: I) -> Self {
        let mut w = Word::identity();
        for (g, e) in pairs {
            w.push(g, e);
        }
        w
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of letters, i.e. the sum of absolute exponents.
    pub fn letter_len(&self) -> usize {
        self.0.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    /// Appends `g^e`, merging with the last syllable when the generator repeats.
    pub fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        match self.0.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    self.0.pop();
                }
            }
            _ => self.0.push((g, e)),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &(g, e) in &other.0 {
            out.push(g, e);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Letters one at a time, each as `(generator, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|&(g, _)| g).max()
    }

    /// Re-indexes generators through `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Word {
        Word::from_pairs(self.0.iter().map(|&(g, e)| (map(g), e)))
    }
}
