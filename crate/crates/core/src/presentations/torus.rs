//! Normal forms in ⟨u, v | u^p = v^q⟩, an amalgam of two infinite cyclic
//! groups over the central subgroup ⟨z⟩, z = u^p = v^q.

use crate::word::Word;

/// `z^k · s₁ s₂ … s_n` with alternating syllables `u^i` (0 < i < p) and `v^j` (0 < j < q).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct TorusElement {
    pub center: i64,
    /// `(is_u, exponent)`
    pub syllables: Vec<(bool, i64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TorusShape {
    pub u: usize,
    pub v: usize,
    pub p: i64,
    pub q: i64,
}

impl TorusShape {
    fn period(&self, is_u: bool) -> i64 {
        if is_u {
            self.p
        } else {
            self.q
        }
    }

    pub fn mul_letter(&self, el: &mut TorusElement, is_u: bool, e: i64) {
        let n = self.period(is_u);
        let total = match el.syllables.last() {
            Some(&(last_u, x)) if last_u == is_u => {
                el.syllables.pop();
                x + e
            }
            _ => e,
        };
        el.center += total.div_euclid(n);
        let rem = total.rem_euclid(n);
        if rem != 0 {
            el.syllables.push((is_u, rem));
        }
    }

    pub fn element_of(&self, w: &Word) -> TorusElement {
        let mut el = TorusElement::default();
        self.mul_word(&mut el, w);
        el
    }

    pub fn mul_word(&self, el: &mut TorusElement, w: &Word) {
        for &(g, e) in w.syllables() {
            self.mul_letter(el, g == self.u, e);
        }
    }

    /// `u^{pk}` followed by the syllables; injective on normal forms.
    pub fn word_of(&self, el: &TorusElement) -> Word {
        let mut w = Word::power_of(self.u, self.p * el.center);
        for &(is_u, e) in &el.syllables {
            w.push(if is_u { self.u } else { self.v }, e);
        }
        w
    }

    pub fn syllables_word(&self, el: &TorusElement) -> Word {
        self.word_of(&TorusElement {
            center: 0,
            syllables: el.syllables.clone(),
        })
    }

    /// Integers `(a, b)` with `a q + b p = 1` and the smallest nonnegative `a`.
    pub fn bezout(&self) -> Option<(i64, i64)> {
        (0..self.p).find_map(|a| {
            let rest = 1 - a * self.q;
            (rest % self.p == 0).then(|| (a, rest / self.p))
        })
    }

    /// Abelianisation: u ↦ q, v ↦ p.
    pub fn abelian(&self, w: &Word) -> i64 {
        w.syllables()
            .iter()
            .map(|&(g, e)| if g == self.u { self.q * e } else { self.p * e })
            .sum()
    }
}
