//! Dynamic realisations at window scale.
//!
//! The ball `B_R`, `R = max(r, 2r − 2)`, is sorted by the order and placed
//! at consecutive integers with `t(1) = 0`. Each generator `s` acts by the
//! PL map through the points `(t(h), t(sh))` for `h, sh ∈ B_R`, with slope
//! 1 beyond them. Every suffix of `gh` with `g, h ∈ B_{r−1}` lies in `B_R`,
//! so `ρ(g)(t(h)) = t(gh)` holds exactly on `B_{r−1}`.

mod pl;
mod svg;

pub use pl::{PLHomeo, PLTable};
pub use svg::svg_graphs;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orders::{OrderOracle, OrderedAction, Provenance, Sign};
use crate::presentations::GroupBackend;
use crate::word::Word;

#[derive(Debug, Clone)]
pub struct PLAction {
    group: Arc<GroupBackend>,
    /// Radius on which the orbit law is certified is `radius − 1`.
    pub radius: usize,
    pub table_radius: usize,
    /// Ball elements in increasing order; position `i − k₀`.
    table: Vec<Word>,
    position: HashMap<Word, i64>,
    certified: HashSet<Word>,
    gens: Vec<PLHomeo>,
    pub source: Provenance,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Builds the realisation of `o` with window radius `r ≥ 1`.
pub fn build_realisation(o: &OrderOracle, r: usize) -> Result<PLAction> {
    if r == 0 {
        return Err(Error::Invalid("window radius must be at least 1".to_string()));
    }
    let group = o.group().clone();
    let table_radius = r.max(2 * r - 2);
    let ball = group.ball(table_radius)?;
    let mut table: Vec<Word> = ball.elements().to_vec();
    o.sort(&mut table)?;
    let k0 = table.iter().position(|w| w.is_identity()).expect("ball contains 1") as i64;
    let position: HashMap<Word, i64> = table
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as i64 - k0))
        .collect();
    let mut gens = Vec::with_capacity(group.rank());
    for s in 0..group.rank() {
        let gs = Word::gen(s);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for h in &table {
            if let Some(&y) = position.get(&group.mul(&gs, h)?) {
                xs.push(int(position[h]));
                ys.push(int(y));
            }
        }
        gens.push(PLHomeo::new(xs, ys).map_err(|_| {
            Error::NotAnOrder(format!(
                "left multiplication by {} is not monotone on the table",
                group.format(&gs)
            ))
        })?);
    }
    let certified = group.ball(r - 1)?.elements().iter().cloned().collect();
    Ok(PLAction {
        group,
        radius: r,
        table_radius,
        table,
        position,
        certified,
        gens,
        source: o.provenance.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedPointVerdict {
    FixedPointFreeOnWindow,
    HasFixedPoints,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointReport {
    pub element: Word,
    pub window: (BigRational, BigRational),
    /// Maximal fixed intervals inside the window; points are `(x, x)`.
    pub intervals: Vec<(BigRational, BigRational)>,
    pub verdict: FixedPointVerdict,
}

impl FixedPointReport {
    pub fn to_json(&self, group: &GroupBackend) -> serde_json::Value {
        serde_json::json!({
            "element": group.format(&self.element),
            "window": [self.window.0.to_string(), self.window.1.to_string()],
            "intervals": self.intervals.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
            "verdict": self.verdict,
        })
    }
}

impl PLAction {
    pub fn group(&self) -> &Arc<GroupBackend> {
        &self.group
    }

    /// `t(h)` for `h` in the table.
    pub fn t(&self, h: &Word) -> Result<Option<i64>> {
        Ok(self.position.get(&self.group.normal_form(h)?).copied())
    }

    /// Table elements in increasing order.
    pub fn table(&self) -> &[Word] {
        &self.table
    }

    pub fn window(&self) -> (BigRational, BigRational) {
        let k0 = self.position[&Word::identity()];
        let n = self.table.len() as i64;
        (int(-k0), int(n - 1 - k0))
    }

    pub fn generator(&self, s: usize) -> &PLHomeo {
        &self.gens[s]
    }

    /// Elements on which the orbit law is certified: `B_{r−1}`.
    pub fn is_certified(&self, nf: &Word) -> bool {
        self.certified.contains(nf)
    }

    /// `ρ(w)(x)`, rightmost letter first.
    pub fn evaluate(&self, w: &Word, x: &BigRational) -> BigRational {
        let letters: Vec<(usize, i64)> = w.letters().collect();
        let mut y = x.clone();
        for &(g, e) in letters.iter().rev() {
            y = if e > 0 {
                self.gens[g].eval(&y)
            } else {
                self.gens[g].eval_inverse(&y)
            };
        }
        y
    }

    /// `ρ(w)` as a single PL map.
    pub fn rho(&self, w: &Word) -> PLHomeo {
        let mut f = PLHomeo::identity();
        for (g, e) in w.letters() {
            let s = if e > 0 {
                self.gens[g].clone()
            } else {
                self.gens[g].inverse()
            };
            f = f.compose(&s);
        }
        f
    }

    pub fn fixed_points(&self, w: &Word) -> FixedPointReport {
        let (lo, hi) = self.window();
        let intervals = self.rho(w).fixed_set(&lo, &hi);
        let verdict = if intervals.is_empty() {
            FixedPointVerdict::FixedPointFreeOnWindow
        } else if intervals.iter().all(|(a, b)| *a == lo || *b == hi) {
            FixedPointVerdict::Inconclusive
        } else {
            FixedPointVerdict::HasFixedPoints
        };
        FixedPointReport {
            element: w.clone(),
            window: (lo, hi),
            intervals,
            verdict,
        }
    }

    /// Order from the orbit of `x`: `g > 1` iff `ρ(g)(x) > x`, with `stabiliser`
    /// deciding when `g` fixes `x`. Elements outside `B_{r−1}` are `Unknown`.
    pub fn order_at_point(&self, x: BigRational, stabiliser: Option<OrderOracle>) -> OrderOracle {
        let me = Arc::new(self.clone());
        let prov = Provenance::FromAction {
            action: format!("dynreal(r={})", self.radius),
            point: x.to_string(),
            stabiliser: Box::new(
                stabiliser
                    .as_ref()
                    .map(|o| o.provenance.clone())
                    .unwrap_or_else(|| Provenance::named("none")),
            ),
        };
        OrderOracle::from_fn(self.group.clone(), prov, move |g| {
            if !me.is_certified(g) {
                return Err(Error::Unknown(format!(
                    "{} lies outside the certified ball B_{}",
                    me.group.format(g),
                    me.radius - 1
                )));
            }
            let d = me.evaluate(g, &x) - &x;
            if d > BigRational::zero() {
                Ok(Sign::Pos)
            } else if d < BigRational::zero() {
                Ok(Sign::Neg)
            } else {
                match &stabiliser {
                    Some(o) => o.sign_of(g),
                    None => Err(Error::Unknown(format!(
                        "{} fixes {x} and the stabiliser is not certified",
                        me.group.format(g)
                    ))),
                }
            }
        })
    }
}

impl OrderedAction for PLAction {
    type Point = BigRational;

    fn name(&self) -> String {
        format!("dynreal(r={})", self.radius)
    }

    fn act(&self, g: &Word, x: &BigRational) -> Result<BigRational> {
        Ok(self.evaluate(g, x))
    }

    fn compare(&self, a: &BigRational, b: &BigRational) -> Result<Ordering> {
        Ok(a.cmp(b))
    }

    fn describe_point(&self, x: &BigRational) -> String {
        x.to_string()
    }
}

#[cfg(test)]
mod tests;
