use std::cmp::Ordering;

use serde::Serialize;

use super::{is_undecided, slope_of_order};
use crate::dynreal::{FixedPointVerdict, PLAction};
use crate::error::{Error, Result};
use crate::lattice::Slope;
use crate::orders::{OrderOracle, Sign};
use crate::presentations::PeripheralSubgroup;
use crate::word::Word;

/// Power bound used when none is given.
pub fn default_n_max(r: usize) -> i64 {
    2 * r as i64 + 4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cofinality {
    CofinalAtRadius,
    BoundedAtRadius,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct CofinalityReport {
    pub verdict: Cofinality,
    /// The element, oriented to be positive.
    pub element: String,
    pub radius: usize,
    pub n_max: i64,
    /// Least `n` that brackets every element of the ball, when cofinal.
    pub needed_power: Option<i64>,
    /// An element of the ball beyond `w^{±2 n_max}`, when bounded.
    pub bound: Option<String>,
    pub fixed_points: Option<FixedPointVerdict>,
    /// Cofinal elements must not have certified fixed points.
    pub coherent: Option<bool>,
}

/// Whether `w^{−n} < g < w^n` brackets each `g ∈ B_r` for some `n ≤ n_max`.
///
/// Bounded means some `g` lies beyond `w^{2 n_max}` or below `w^{−2 n_max}`:
/// the gap persists after doubling the range. With an action, the
/// fixed-point verdict of `ρ(w)` is recorded and checked for coherence.
pub fn cofinality_check(
    o: &OrderOracle,
    w: &Word,
    r: usize,
    n_max: i64,
    action: Option<&PLAction>,
) -> Result<CofinalityReport> {
    let group = o.group().clone();
    let mut w = group.normal_form(w)?;
    if w.is_identity() {
        return Err(Error::IdentityElement);
    }
    let mut report = CofinalityReport {
        verdict: Cofinality::Unknown,
        element: String::new(),
        radius: r,
        n_max,
        needed_power: None,
        bound: None,
        fixed_points: None,
        coherent: None,
    };
    match run(o, &mut w, r, n_max, &mut report) {
        Ok(()) => {}
        Err(e) if is_undecided(&e) => report.verdict = Cofinality::Unknown,
        Err(e) => return Err(e),
    }
    report.element = group.format(&w);
    if let Some(a) = action {
        let fp = a.fixed_points(&w).verdict;
        report.coherent =
            Some(!(report.verdict == Cofinality::CofinalAtRadius && fp == FixedPointVerdict::HasFixedPoints));
        report.fixed_points = Some(fp);
    }
    Ok(report)
}

fn run(o: &OrderOracle, w: &mut Word, r: usize, n_max: i64, report: &mut CofinalityReport) -> Result<()> {
    let group = o.group().clone();
    if o.sign_of(w)? == Sign::Neg {
        *w = group.inverse(w)?;
    }
    let ball = group.ball(r)?;
    let power = |n: i64| group.pow(w, n);
    let ups: Vec<Word> = (0..=2 * n_max).map(power).collect::<Result<_>>()?;
    let downs: Vec<Word> = (0..=2 * n_max).map(|n| power(-n)).collect::<Result<_>>()?;
    let brackets = |g: &Word, n: usize| -> Result<bool> {
        Ok(o.compare(&downs[n], g)? == Ordering::Less && o.compare(g, &ups[n])? == Ordering::Less)
    };
    let mut needed = 0i64;
    for g in ball.elements() {
        if !brackets(g, n_max as usize)? {
            let far = 2 * n_max as usize;
            if o.compare(g, &ups[far])? != Ordering::Less || o.compare(&downs[far], g)? != Ordering::Less {
                report.verdict = Cofinality::BoundedAtRadius;
                report.bound = Some(group.format(g));
            }
            return Ok(());
        }
        // the brackets are nested, so the least n is found by bisection
        let (mut lo, mut hi) = (0usize, n_max as usize);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if brackets(g, mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        needed = needed.max(hi as i64);
    }
    report.verdict = Cofinality::CofinalAtRadius;
    report.needed_power = Some(needed);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCofinality {
    BoundaryCofinalAtRadius,
    NotBoundaryCofinal,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub verdict: BoundaryCofinality,
    pub peripheral: String,
    pub estimate: String,
    pub witness: Option<String>,
    pub cofinality: Option<CofinalityReport>,
}

/// Tests a peripheral element off the detected line for cofinality.
///
/// Off-line elements are the ones cofinal in the peripheral order, so the
/// first of `μ, λ, μλ, μλ⁻¹` outside the slope estimate is used.
pub fn boundary_cofinality_report(
    o: &OrderOracle,
    p: &PeripheralSubgroup,
    r: usize,
    n_max: i64,
) -> Result<BoundaryReport> {
    let group = o.group().clone();
    let est = slope_of_order(o, p, r)?;
    let mut report = BoundaryReport {
        verdict: BoundaryCofinality::Unknown,
        peripheral: p.name.clone(),
        estimate: est.to_string(),
        witness: None,
        cofinality: None,
    };
    let candidates = [(0, 1), (1, 0), (1, 1), (-1, 1)];
    let Some(v) = candidates
        .into_iter()
        .find(|v| Slope::through(*v).is_ok_and(|s| !est.contains(&s)))
    else {
        return Ok(report);
    };
    let w = p.element(v.1, v.0);
    let c = cofinality_check(o, &w, r, n_max, None)?;
    report.verdict = match c.verdict {
        Cofinality::CofinalAtRadius => BoundaryCofinality::BoundaryCofinalAtRadius,
        Cofinality::BoundedAtRadius => BoundaryCofinality::NotBoundaryCofinal,
        Cofinality::Unknown => BoundaryCofinality::Unknown,
    };
    report.witness = Some(group.format(&group.normal_form(&w)?));
    report.cofinality = Some(c);
    Ok(report)
}
