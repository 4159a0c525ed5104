//! Normal forms for an amalgamated product of two backends over identified
//! peripheral ℤ² subgroups.

use std::sync::Arc;

use super::backend::{Family, GroupBackend};
use super::{PeripheralSubgroup, Presentation};
use crate::error::{Error, Result};
use crate::word::Word;

/// `G₁ *_{ℤ²} G₂`, where peripheral `left_peripheral` of `G₁` is glued to
/// peripheral `right_peripheral` of `G₂` by `matrix`: the class with
/// coordinates `(m, l)` in the left basis equals `matrix · (m, l)` in the
/// right basis.
#[derive(Debug, Clone)]
pub struct AmalgamSpec {
    pub left: Arc<GroupBackend>,
    pub right: Arc<GroupBackend>,
    pub left_peripheral: PeripheralSubgroup,
    pub right_peripheral: PeripheralSubgroup,
    pub matrix: [[i64; 2]; 2],
    pub certified_radius: usize,
    /// Both factors split cosets exactly, so no input length is uncertified.
    pub exact: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct AmalgamElement {
    /// `(side, coset representative in that factor's generators)`
    syllables: Vec<(usize, Word)>,
    /// Edge-group coordinates in the left basis.
    edge: (i64, i64),
}

fn apply(m: &[[i64; 2]; 2], v: (i64, i64)) -> (i64, i64) {
    (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
}

fn inverse_unimodular(m: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] * det, -m[0][1] * det], [-m[1][0] * det, m[0][0] * det]]
}

impl AmalgamSpec {
    fn factor(&self, side: usize) -> (&GroupBackend, &PeripheralSubgroup) {
        if side == 0 {
            (&self.left, &self.left_peripheral)
        } else {
            (&self.right, &self.right_peripheral)
        }
    }

    fn offset(&self, side: usize) -> usize {
        if side == 0 {
            0
        } else {
            self.left.rank()
        }
    }

    fn edge_in(&self, side: usize, edge: (i64, i64)) -> (i64, i64) {
        if side == 0 {
            edge
        } else {
            apply(&self.matrix, edge)
        }
    }

    fn edge_from(&self, side: usize, coords: (i64, i64)) -> (i64, i64) {
        if side == 0 {
            coords
        } else {
            apply(&inverse_unimodular(&self.matrix), coords)
        }
    }

    fn mul_letter(&self, el: &mut AmalgamElement, gen: usize, e: i64) -> Result<()> {
        let side = usize::from(gen >= self.left.rank());
        let local = gen - self.offset(side);
        let (g, p) = self.factor(side);
        let (m, l) = self.edge_in(side, el.edge);
        let mut t = p.element(m, l);
        t.push(local, e);
        if matches!(el.syllables.last(), Some((s, _)) if *s == side) {
            let (_, rep) = el.syllables.pop().unwrap();
            t = rep.mul(&t);
        }
        let (rep, coords, _) = g.coset_split(p, &t)?;
        if !rep.is_identity() {
            el.syllables.push((side, rep));
        }
        el.edge = self.edge_from(side, coords);
        Ok(())
    }

    pub(crate) fn normal_form(&self, w: &Word) -> Result<Word> {
        if !self.exact && w.letter_len() > self.certified_radius {
            return Err(Error::Unknown(format!(
                "word of length {} beyond certified radius {}",
                w.letter_len(),
                self.certified_radius
            )));
        }
        let mut el = AmalgamElement::default();
        for (g, e) in w.letters() {
            self.mul_letter(&mut el, g, e)?;
        }
        Ok(self.to_word(&el))
    }

    /// Syllable words, then the edge element written in the factor opposite
    /// to the last syllable so that runs decode unambiguously.
    fn to_word(&self, el: &AmalgamElement) -> Word {
        let mut out = Word::identity();
        for (side, rep) in &el.syllables {
            let off = self.offset(*side);
            out = out.mul(&rep.relabel(|g| g + off));
        }
        let side = match el.syllables.last() {
            Some((0, _)) => 1,
            _ => 0,
        };
        let (g, p) = self.factor(side);
        let (m, l) = self.edge_in(side, el.edge);
        let edge = g.normal_form(&p.element(m, l)).expect("factor word problem");
        let off = self.offset(side);
        out.mul(&edge.relabel(|x| x + off))
    }

    /// Number of factor syllables in the normal form of `w`.
    pub fn syllable_count(&self, w: &Word) -> Result<usize> {
        let mut el = AmalgamElement::default();
        for (g, e) in w.letters() {
            self.mul_letter(&mut el, g, e)?;
        }
        Ok(el.syllables.len())
    }
}

impl GroupBackend {
    /// Builds the amalgam backend. Rejects gluings where a factor is its own
    /// edge group.
    pub fn amalgam(
        left: Arc<GroupBackend>,
        left_peripheral: &str,
        right: Arc<GroupBackend>,
        right_peripheral: &str,
        matrix: [[i64; 2]; 2],
        certified_radius: usize,
    ) -> Result<GroupBackend> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::Invalid(format!("gluing matrix has determinant {det}")));
        }
        let lp = left
            .peripheral(left_peripheral)
            .ok_or_else(|| Error::Invalid(format!("no peripheral `{left_peripheral}` on left factor")))?
            .clone();
        let rp = right
            .peripheral(right_peripheral)
            .ok_or_else(|| Error::Invalid(format!("no peripheral `{right_peripheral}` on right factor")))?
            .clone();
        for (g, p, side) in [(&left, &lp, "left"), (&right, &rp, "right")] {
            let mut all_in = true;
            for i in 0..g.rank() {
                if g.peripheral_coords(p, &Word::gen(i))?.is_none() {
                    all_in = false;
                }
            }
            if all_in {
                return Err(Error::Invalid(format!(
                    "{side} factor equals edge group; the gluing is degenerate"
                )));
            }
        }
        let exact = [(&left, &lp), (&right, &rp)].iter().all(|(g, p)| {
            matches!(
                g.family,
                Family::KleinBottle { .. } | Family::TorusKnot { .. } | Family::TorusBundle { .. }
            ) && g.coset_split(p, &Word::identity()).map(|s| s.2).unwrap_or(false)
        });

        let mut generators = Vec::new();
        for (g, suffix) in [(&left, "1"), (&right, "2")] {
            for name in &g.presentation.generators {
                let mut n = format!("{name}{suffix}");
                while generators.contains(&n) {
                    n.push('_');
                }
                generators.push(n);
            }
        }
        let off = left.rank();
        let mut relators: Vec<Word> = left.presentation.relators.clone();
        relators.extend(right.presentation.relators.iter().map(|r| r.relabel(|g| g + off)));
        let img_mu = rp.element(matrix[0][0], matrix[1][0]).relabel(|g| g + off);
        let img_la = rp.element(matrix[0][1], matrix[1][1]).relabel(|g| g + off);
        relators.push(lp.mu.mul(&img_mu.inverse()));
        relators.push(lp.lambda.mul(&img_la.inverse()));
        let mut peripherals = Vec::new();
        for p in left.peripherals() {
            if p.name != lp.name {
                peripherals.push(PeripheralSubgroup::new(
                    format!("{}1", p.name),
                    p.mu.clone(),
                    p.lambda.clone(),
                ));
            }
        }
        for p in right.peripherals() {
            if p.name != rp.name {
                peripherals.push(PeripheralSubgroup::new(
                    format!("{}2", p.name),
                    p.mu.relabel(|g| g + off),
                    p.lambda.relabel(|g| g + off),
                ));
            }
        }
        let spec = AmalgamSpec {
            left,
            right,
            left_peripheral: lp,
            right_peripheral: rp,
            matrix,
            certified_radius,
            exact,
        };
        Ok(GroupBackend::from_parts(
            Presentation {
                generators,
                relators,
                peripherals,
            },
            Family::BoundedAmalgam(Arc::new(spec)),
        ))
    }

    pub fn amalgam_spec(&self) -> Option<&AmalgamSpec> {
        match &self.family {
            Family::BoundedAmalgam(a) => Some(a),
            _ => None,
        }
    }
}
