//! Orders pulled back from order-preserving actions on totally ordered sets.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presentations::{Ball, GroupBackend};
use crate::word::Word;

use super::{OrderOracle, Provenance, Sign};

/// A left action of a group on a totally ordered set by order-preserving maps.
///
/// The comparator on points is part of the action: no canonical order on
/// the underlying set is assumed.
pub trait OrderedAction: Send + Sync {
    type Point: Clone + Send + Sync + 'static;

    fn name(&self) -> String;
    fn act(&self, g: &Word, x: &Self::Point) -> Result<Self::Point>;
    fn compare(&self, a: &Self::Point, b: &Self::Point) -> Result<Ordering>;
    fn describe_point(&self, x: &Self::Point) -> String;

    /// Checks `a < b ⇒ g·a < g·b` for all `g` in the ball, on the orbit points of the ball.
    fn check_order_preserving(&self, ball: &Ball, x: &Self::Point) -> Result<Option<(Word, Word, Word)>> {
        let orbit: Vec<(Word, Self::Point)> = ball
            .elements()
            .iter()
            .map(|g| Ok((g.clone(), self.act(g, x)?)))
            .collect::<Result<_>>()?;
        for (g, _) in &orbit {
            for (h1, a) in &orbit {
                for (h2, b) in &orbit {
                    if self.compare(a, b)? != Ordering::Less {
                        continue;
                    }
                    let ga = self.act(g, a)?;
                    let gb = self.act(g, b)?;
                    if self.compare(&ga, &gb)? != Ordering::Less {
                        return Ok(Some((g.clone(), h1.clone(), h2.clone())));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// `G → ℤ` through integer weights on the exponent sums, acting on ℤ by translation.
///
/// Valid only when every relator has weighted exponent sum zero, which the
/// constructor checks.
#[derive(Debug, Clone)]
pub struct TranslationAction {
    weights: Vec<i64>,
    names: Vec<String>,
}

impl TranslationAction {
    pub fn new(group: &GroupBackend, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != group.rank() {
            return Err(Error::Invalid(format!(
                "translation action needs {} weights, got {}",
                group.rank(),
                weights.len()
            )));
        }
        for r in &group.presentation.relators {
            let s: i64 = group.exponent_sums(r).iter().zip(&weights).map(|(e, w)| e * w).sum();
            if s != 0 {
                return Err(Error::Invalid(format!(
                    "weights do not vanish on relator {}",
                    group.format(r)
                )));
            }
        }
        Ok(TranslationAction {
            weights,
            names: group.presentation.generators.clone(),
        })
    }

    pub fn translation(&self, g: &Word) -> i64 {
        g.syllables().iter().map(|&(i, e)| self.weights[i] * e).sum()
    }
}

impl OrderedAction for TranslationAction {
    type Point = i64;

    fn name(&self) -> String {
        let parts: Vec<String> = self
            .names
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| format!("{n}:{w}"))
            .collect();
        format!("translate[{}]", parts.join(","))
    }

    fn act(&self, g: &Word, x: &i64) -> Result<i64> {
        Ok(x + self.translation(g))
    }

    fn compare(&self, a: &i64, b: &i64) -> Result<Ordering> {
        Ok(a.cmp(b))
    }

    fn describe_point(&self, x: &i64) -> String {
        x.to_string()
    }
}

/// `g > 1` iff `g·x > x`, with `stabiliser` deciding when `g·x = x`.
///
/// `stabiliser` is consulted only on elements fixing `x`; `None` asserts the
/// stabiliser is trivial and turns any nontrivial fixer into an error.
pub fn order_from_action<A: OrderedAction + 'static>(
    group: Arc<GroupBackend>,
    action: Arc<A>,
    x: A::Point,
    stabiliser: Option<OrderOracle>,
) -> OrderOracle {
    let prov = Provenance::FromAction {
        action: action.name(),
        point: action.describe_point(&x),
        stabiliser: Box::new(
            stabiliser
                .as_ref()
                .map(|o| o.provenance.clone())
                .unwrap_or_else(|| Provenance::named("trivial")),
        ),
    };
    OrderOracle::from_fn(group.clone(), prov, move |g| {
        let gx = action.act(g, &x)?;
        match action.compare(&gx, &x)? {
            Ordering::Greater => Ok(Sign::Pos),
            Ordering::Less => Ok(Sign::Neg),
            Ordering::Equal => match &stabiliser {
                Some(o) => o.sign_of(g),
                None => Err(Error::Invalid(format!(
                    "{} fixes the base point but no stabiliser order was given",
                    group.format(g)
                ))),
            },
        }
    })
}
