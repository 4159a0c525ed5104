//! Group presentations, exact word problems for the built-in families,
//! Cayley-ball enumeration and peripheral subgroup data.

mod amalgam;
mod backend;
mod finite;
mod parse;
mod torus;

pub use amalgam::AmalgamSpec;
pub use backend::{Ball, Family, GroupBackend, DEFAULT_BALL_CAP};
pub use parse::parse_presentation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::Word;

/// A peripheral ℤ² subgroup with an ordered basis `(μ, λ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralSubgroup {
    pub name: String,
    pub mu: Word,
    pub lambda: Word,
}

impl PeripheralSubgroup {
    pub fn new(name: impl Into<String>, mu: Word, lambda: Word) -> Self {
        PeripheralSubgroup {
            name: name.into(),
            mu,
            lambda,
        }
    }

    /// The word `μ^a λ^b` (not normalised).
    pub fn element(&self, a: i64, b: i64) -> Word {
        self.mu.pow(a).mul(&self.lambda.pow(b))
    }

    /// The conjugate subgroup `g P g⁻¹` with basis `(gμg⁻¹, gλg⁻¹)`.
    pub fn conjugated(&self, g: &Word) -> PeripheralSubgroup {
        let gi = g.inverse();
        PeripheralSubgroup {
            name: format!("{}^g", self.name),
            mu: g.mul(&self.mu).mul(&gi),
            lambda: g.mul(&self.lambda).mul(&gi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub peripherals: Vec<PeripheralSubgroup>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        let p = Presentation {
            generators,
            relators,
            peripherals: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].contains(g) {
                return Err(Error::DuplicateGenerator(g.clone()));
            }
        }
        let n = self.rank();
        let words = self
            .relators
            .iter()
            .chain(self.peripherals.iter().flat_map(|p| [&p.mu, &p.lambda]));
        for w in words {
            if let Some(g) = w.max_generator() {
                if g >= n {
                    return Err(Error::UndeclaredGenerator(format!("#{g}")));
                }
            }
        }
        Ok(())
    }

    /// Renders a word as whitespace-separated `gen` / `gen^k` tokens; `1` for the identity.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        w.syllables()
            .iter()
            .map(|&(g, e)| {
                let name = self.generators.get(g).cloned().unwrap_or_else(|| format!("g{g}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a single word in the presentation-file token syntax.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse::parse_word_tokens(self, text)
    }

    /// Canonical text form; `parse_presentation(p.to_text())` returns `p`.
    pub fn to_text(&self) -> String {
        let mut out = format!("gens {};\n", self.generators.join(" "));
        for r in &self.relators {
            out.push_str(&format!("rel {};\n", self.format_word(r)));
        }
        for p in &self.peripherals {
            out.push_str(&format!(
                "peripheral {} = {}, {};\n",
                p.name,
                self.format_word(&p.mu),
                self.format_word(&p.lambda)
            ));
        }
        out
    }
}
