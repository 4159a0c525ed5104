//! Finite restrictions of positive cones to Cayley balls.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentations::{Ball, GroupBackend};
use crate::word::Word;

use super::{OrderOracle, Sign};

/// Signs of the nontrivial elements of `B_radius`, in ball order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSnapshot {
    pub radius: usize,
    /// `(normal form, word length, sign)`
    pub entries: Vec<(Word, usize, Sign)>,
}

/// A failed cone axiom on a snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeViolation {
    Antisymmetry { element: Word },
    Closure { g: Word, h: Word, product: Word },
}

impl ConeSnapshot {
    pub fn from_signs(ball: &Ball, signs: &[Sign]) -> Self {
        let entries = ball
            .elements()
            .iter()
            .enumerate()
            .skip(1)
            .zip(signs)
            .map(|((i, w), &s)| (w.clone(), ball.length(i), s))
            .collect();
        ConeSnapshot {
            radius: ball.radius,
            entries,
        }
    }

    pub fn sign(&self, nf: &Word) -> Option<Sign> {
        self.entries.iter().find(|e| &e.0 == nf).map(|e| e.2)
    }

    pub fn positive(&self) -> impl Iterator<Item = &Word> {
        self.entries.iter().filter(|e| e.2 == Sign::Pos).map(|e| &e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Canonical table: one `<normal-form> <sign>` line per element.
    pub fn to_text(&self, group: &GroupBackend) -> String {
        let mut s = String::new();
        for (w, _, sign) in &self.entries {
            s.push_str(&group.format(w));
            s.push(' ');
            s.push(sign.as_char());
            s.push('\n');
        }
        s
    }

    /// Parses a table written by [`ConeSnapshot::to_text`]. Rows must cover
    /// `B_radius ∖ {1}` exactly; they are reordered into ball order.
    pub fn from_text(group: &GroupBackend, radius: usize, text: &str) -> Result<Self> {
        let ball = group.ball(radius)?;
        let mut signs: HashMap<Word, Sign> = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, sign) = line.rsplit_once(char::is_whitespace).ok_or_else(|| Error::Syntax {
                line: n + 1,
                column: 1,
                message: "expected `<word> <sign>`".to_string(),
            })?;
            let sign = match sign {
                "+" => Sign::Pos,
                "-" => Sign::Neg,
                other => {
                    return Err(Error::Syntax {
                        line: n + 1,
                        column: line.len() - other.len() + 1,
                        message: format!("bad sign `{other}`"),
                    })
                }
            };
            let nf = group.normal_form(&group.parse_word(word.trim())?)?;
            if !ball.contains(&nf) || nf.is_identity() {
                return Err(Error::Invalid(format!(
                    "{} is not a nontrivial element of B_{radius}",
                    word.trim()
                )));
            }
            signs.insert(nf, sign);
        }
        let mut ordered = Vec::with_capacity(ball.len() - 1);
        for w in ball.elements().iter().skip(1) {
            ordered.push(
                *signs
                    .get(w)
                    .ok_or_else(|| Error::Invalid(format!("missing sign for {}", group.format(w))))?,
            );
        }
        Ok(ConeSnapshot::from_signs(&ball, &ordered))
    }

    /// Restriction to a smaller radius.
    pub fn restrict(&self, r: usize) -> ConeSnapshot {
        ConeSnapshot {
            radius: r.min(self.radius),
            entries: self.entries.iter().filter(|e| e.1 <= r).cloned().collect(),
        }
    }
}

pub fn snapshot_on(o: &OrderOracle, ball: &Ball) -> Result<ConeSnapshot> {
    let signs = ball
        .elements()
        .iter()
        .skip(1)
        .map(|w| o.sign_of(w))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConeSnapshot::from_signs(ball, &signs))
}

pub fn snapshot(o: &OrderOracle, r: usize) -> Result<ConeSnapshot> {
    snapshot_on(o, &o.group().ball(r)?)
}

/// `2^{-m}` with `m` the least word length where the snapshots disagree, or 0.
pub fn sikora_distance(a: &ConeSnapshot, b: &ConeSnapshot) -> Result<BigRational> {
    if a.radius != b.radius || a.entries.len() != b.entries.len() {
        return Err(Error::Mismatch(format!(
            "snapshots of radius {} and {} are not comparable",
            a.radius, b.radius
        )));
    }
    let mut first: Option<usize> = None;
    for (x, y) in a.entries.iter().zip(&b.entries) {
        if x.0 != y.0 {
            return Err(Error::Mismatch("snapshots list different elements".to_string()));
        }
        if x.2 != y.2 {
            first = Some(first.map_or(x.1, |m| m.min(x.1)));
        }
    }
    Ok(match first {
        None => BigRational::zero(),
        Some(m) => BigRational::new(BigInt::one(), BigInt::one() << m),
    })
}

/// Checks antisymmetry and closure of a snapshot inside its own ball.
pub fn validate_cone(group: &GroupBackend, s: &ConeSnapshot) -> Result<Option<ConeViolation>> {
    let table: HashMap<&Word, Sign> = s.entries.iter().map(|e| (&e.0, e.2)).collect();
    for (w, _, sign) in &s.entries {
        let inv = group.inverse(w)?;
        if inv.is_identity() || table.get(&inv) == Some(sign) {
            return Ok(Some(ConeViolation::Antisymmetry { element: w.clone() }));
        }
    }
    let pos: Vec<&Word> = s.positive().collect();
    for g in &pos {
        for h in &pos {
            let gh = group.mul(g, h)?;
            if gh.is_identity() || table.get(&gh) == Some(&Sign::Neg) {
                return Ok(Some(ConeViolation::Closure {
                    g: (*g).clone(),
                    h: (*h).clone(),
                    product: gh,
                }));
            }
        }
    }
    Ok(None)
}
