//! Slopes of orders and the three levels of order-detection.
//!
//! Every certificate here is stamped with the radius it was checked at.
//! The one global statement is strong detection through a normal kernel,
//! where convexity and normality are algebraic facts about the epimorphism.

mod cofinal;
mod svg;

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

pub use cofinal::{
    boundary_cofinality_report, cofinality_check, default_n_max, BoundaryCofinality, BoundaryReport, Cofinality,
    CofinalityReport,
};
pub use svg::slope_circle_svg;

use crate::conesearch::{search, Certificate, ConeConstraint, SearchOptions, SearchOutcome};
use crate::error::{Error, Result};
use crate::lattice::{line_of_points, LineEstimate, Slope};
use crate::orders::{lex_extend, Epimorphism, OrderOracle, Sign};
use crate::presentations::{GroupBackend, PeripheralSubgroup};
use crate::word::Word;

/// Candidate slopes of an order on one peripheral torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeEstimate {
    pub lower: Slope,
    pub upper: Slope,
    pub simplest: Slope,
    /// Side of `simplest` carrying the positive points off it.
    pub side: i32,
    pub radius: usize,
    /// The sign table pins a single rational line.
    pub exact: bool,
    pub sector: LineEstimate,
}

impl SlopeEstimate {
    pub fn contains(&self, s: &Slope) -> bool {
        if self.exact {
            *s == self.lower
        } else {
            self.sector.contains(s)
        }
    }

    /// The exact slope, if pinned.
    pub fn slope(&self) -> Option<Slope> {
        self.exact.then_some(self.lower)
    }
}

impl fmt::Display for SlopeEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{} (exact, r={})", self.lower, self.radius)
        } else {
            write!(
                f,
                "[{}, {}] (simplest {}, r={})",
                self.lower, self.upper, self.simplest, self.radius
            )
        }
    }
}

fn plane_word(mu: &Word, lambda: &Word, v: (i64, i64)) -> Word {
    mu.pow(v.1).mul(&lambda.pow(v.0))
}

fn sign_at(o: &OrderOracle, mu: &Word, lambda: &Word, v: (i64, i64)) -> Result<Sign> {
    o.sign_of(&plane_word(mu, lambda, v))
}

/// Whether points off the line through the primitive vector `v` are signed by
/// side, sampled on `u + n v` and `−u + n v` for `|n| ≤ depth`, `det(v, u) = 1`.
/// `Ok(None)` means the order could not be evaluated that far out.
fn probe_line(o: &OrderOracle, mu: &Word, lambda: &Word, v: (i64, i64), depth: i64) -> Result<Option<bool>> {
    let e = v.0.extended_gcd(&v.1);
    let s = e.gcd.signum();
    // v.0·x + v.1·y = 1 gives det(v, (−y, x)) = 1
    let u = (-e.y * s, e.x * s);
    let side = match sign_at(o, mu, lambda, u) {
        Ok(sg) => sg,
        Err(Error::Unknown(_)) | Err(Error::ResourceLimit(_)) => return Ok(None),
        Err(err) => return Err(err),
    };
    for n in -depth..=depth {
        for (w, want) in [
            ((u.0 + n * v.0, u.1 + n * v.1), side),
            ((-u.0 + n * v.0, -u.1 + n * v.1), side.flip()),
        ] {
            match sign_at(o, mu, lambda, w) {
                Ok(sg) if sg == want => {}
                Ok(_) => return Ok(Some(false)),
                Err(Error::Unknown(_)) | Err(Error::ResourceLimit(_)) => return Ok(None),
                Err(err) => return Err(err),
            }
        }
    }
    Ok(Some(true))
}

/// Slope estimate from the signs of `μ^m λ^l`, `|m|, |l| ≤ r`, in the basis `(mu, lambda)`.
pub fn slope_of_order_on(o: &OrderOracle, mu: &Word, lambda: &Word, r: usize) -> Result<SlopeEstimate> {
    let r = r.max(1) as i64;
    let mut pts = Vec::new();
    for m in -r..=r {
        for l in -r..=r {
            if (l, m) != (0, 0) {
                pts.push(((l, m), sign_at(o, mu, lambda, (l, m))?));
            }
        }
    }
    let sector = line_of_points(&pts)?;
    let mut candidates = vec![sector.from];
    if sector.to.0 * sector.from.1 != sector.to.1 * sector.from.0 {
        candidates.push(sector.to);
    }
    let depth = 4 * r * r;
    let mut passing = Vec::new();
    for v in candidates {
        if probe_line(o, mu, lambda, v, depth)? == Some(true) {
            passing.push(v);
        }
    }
    let radius = r as usize;
    if let [v] = passing[..] {
        let s = Slope::through(v)?;
        let side = pts
            .iter()
            .map(|(p, sg)| s.side_of(*p) * if *sg == Sign::Pos { 1 } else { -1 })
            .find(|&x| x != 0)
            .unwrap_or(1);
        return Ok(SlopeEstimate {
            lower: s,
            upper: s,
            simplest: s,
            side,
            radius,
            exact: true,
            sector,
        });
    }
    Ok(SlopeEstimate {
        lower: sector.lower(),
        upper: sector.upper(),
        simplest: sector.simplest,
        side: sector.side,
        radius,
        exact: false,
        sector,
    })
}

/// Slope estimate of `o` on the peripheral torus `p`.
pub fn slope_of_order(o: &OrderOracle, p: &PeripheralSubgroup, r: usize) -> Result<SlopeEstimate> {
    slope_of_order_on(o, &p.mu, &p.lambda, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionLevel {
    Weak,
    Regular,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionStatus {
    Certified,
    /// No radius-`r` cone detects the slope; carries a certificate.
    RefutedAtRadius,
    /// The witness does not detect the slope; nothing is said about other orders.
    NotCertified,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Order {
        provenance: String,
        estimate: String,
    },
    Conjugate {
        by: String,
        provenance: String,
        estimate: String,
    },
    Epimorphism {
        name: String,
        image_of_slope: String,
        induced: Option<String>,
    },
    Exclusion {
        constraint: String,
        leaves: usize,
    },
    None,
}

/// Outcome of one detection check.
#[derive(Debug, Clone, Serialize)]
pub struct DetectionVerdict {
    pub level: DetectionLevel,
    pub slope: Slope,
    pub status: DetectionStatus,
    pub radius: usize,
    pub witness: Witness,
    pub detail: Option<String>,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
    /// The order induced by a strong witness.
    #[serde(skip)]
    pub induced: Option<OrderOracle>,
}

impl DetectionVerdict {
    fn new(level: DetectionLevel, slope: Slope, status: DetectionStatus, radius: usize, witness: Witness) -> Self {
        DetectionVerdict {
            level,
            slope,
            status,
            radius,
            witness,
            detail: None,
            certificate: None,
            induced: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.status == DetectionStatus::Certified
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("verdicts serialise");
        v["slope"] = serde_json::Value::String(self.slope.to_string());
        v
    }
}

fn is_undecided(e: &Error) -> bool {
    matches!(e, Error::Unknown(_) | Error::ResourceLimit(_))
}

fn weak_on(o: &OrderOracle, mu: &Word, lambda: &Word, slope: &Slope, r: usize) -> Result<(DetectionStatus, String)> {
    let est = match slope_of_order_on(o, mu, lambda, r) {
        Ok(e) => e,
        Err(e) if is_undecided(&e) => return Ok((DetectionStatus::Unknown, e.to_string())),
        Err(e) => return Err(e),
    };
    let mut ok = est.contains(slope);
    if ok && !est.exact {
        if let Some(v) = slope.direction() {
            // a rational slope inside a wide sector must still pass the probe
            ok = probe_line(o, mu, lambda, v, 4 * (r * r) as i64)? == Some(true);
        }
    }
    let status = if ok {
        DetectionStatus::Certified
    } else {
        DetectionStatus::NotCertified
    };
    Ok((status, est.to_string()))
}

/// Weak detection of `slope` by `o` on `p`, judged on the signs of the box `|m|, |l| ≤ r`.
pub fn weak_detect(o: &OrderOracle, p: &PeripheralSubgroup, slope: &Slope, r: usize) -> Result<DetectionVerdict> {
    let (status, estimate) = weak_on(o, &p.mu, &p.lambda, slope, r)?;
    let witness = Witness::Order {
        provenance: o.provenance.describe(),
        estimate,
    };
    Ok(DetectionVerdict::new(DetectionLevel::Weak, *slope, status, r, witness))
}

/// Weak detection by every conjugate `g·o`, `g ∈ B_{r_conj}`.
///
/// A failing conjugate shows `o` does not regularly detect the slope; other
/// orders may still do so, so the status is `NotCertified`.
pub fn regular_detect_check(
    o: &OrderOracle,
    p: &PeripheralSubgroup,
    slope: &Slope,
    r_conj: usize,
    r_slope: usize,
) -> Result<DetectionVerdict> {
    let group = o.group().clone();
    let ball = group.ball(r_conj)?;
    let results: Vec<Result<(DetectionStatus, String)>> = ball
        .elements()
        .par_iter()
        .map(|g| weak_on(&o.conjugate(g)?, &p.mu, &p.lambda, slope, r_slope))
        .collect();
    let mut unknown = None;
    for (g, res) in ball.elements().iter().zip(results) {
        let (status, estimate) = res?;
        let witness = || Witness::Conjugate {
            by: group.format(g),
            provenance: o.provenance.describe(),
            estimate: estimate.clone(),
        };
        match status {
            DetectionStatus::NotCertified => {
                let mut v = DetectionVerdict::new(DetectionLevel::Regular, *slope, status, r_conj, witness());
                v.detail = Some(format!("conjugate by {} has slope {}", group.format(g), estimate));
                return Ok(v);
            }
            DetectionStatus::Unknown if unknown.is_none() => unknown = Some(witness()),
            _ => {}
        }
    }
    if let Some(w) = unknown {
        return Ok(DetectionVerdict::new(
            DetectionLevel::Regular,
            *slope,
            DetectionStatus::Unknown,
            r_conj,
            w,
        ));
    }
    let (_, estimate) = weak_on(o, &p.mu, &p.lambda, slope, r_slope)?;
    let witness = Witness::Order {
        provenance: o.provenance.describe(),
        estimate,
    };
    let mut v = DetectionVerdict::new(
        DetectionLevel::Regular,
        *slope,
        DetectionStatus::Certified,
        r_conj,
        witness,
    );
    v.detail = Some(format!("all {} conjugates by B_{} agree", ball.len(), r_conj));
    Ok(v)
}

/// Strong detection through an epimorphism onto a left-ordered group.
///
/// Certified when `φ(α) = 1` for the primitive `α = μ^p λ^q` and `φ` reaches
/// every target generator from `B_r`. The kernel is then a proper normal
/// subgroup, convex in any lexicographic extension. With a kernel order the
/// extension is built and returned as `induced`.
pub fn strong_detect_witness(
    p: &PeripheralSubgroup,
    slope: &Slope,
    phi: &Epimorphism,
    target_order: &OrderOracle,
    kernel_order: Option<&OrderOracle>,
    r: usize,
) -> Result<DetectionVerdict> {
    let (q, pp) = slope
        .direction()
        .ok_or_else(|| Error::Invalid("strong detection needs a rational slope".to_string()))?;
    let alpha = p.element(pp, q);
    let image = phi.apply(&alpha)?;
    let shown = phi.target.format(&image);
    let witness = |induced: Option<String>| Witness::Epimorphism {
        name: phi.name.clone(),
        image_of_slope: shown.clone(),
        induced,
    };
    if !image.is_identity() {
        let mut v = DetectionVerdict::new(
            DetectionLevel::Strong,
            *slope,
            DetectionStatus::NotCertified,
            r,
            witness(None),
        );
        v.detail = Some(format!("{}(α) = {} is not trivial", phi.name, shown));
        return Ok(v);
    }
    if phi.target.rank() == 0 || !phi.hits_generators(r)? {
        let mut v = DetectionVerdict::new(
            DetectionLevel::Strong,
            *slope,
            DetectionStatus::Unknown,
            r,
            witness(None),
        );
        v.detail = Some(format!("surjectivity of {} not confirmed from B_{r}", phi.name));
        return Ok(v);
    }
    let induced = kernel_order.map(|k| lex_extend(k, target_order, phi)).transpose()?;
    let mut v = DetectionVerdict::new(
        DetectionLevel::Strong,
        *slope,
        DetectionStatus::Certified,
        r,
        witness(induced.as_ref().map(|o| o.provenance.describe())),
    );
    v.detail = Some(format!("ker({}) is normal, proper and contains α", phi.name));
    v.induced = induced;
    Ok(v)
}

/// Searches for a radius-`r` cone whose peripheral signs fit the line of
/// `slope`. A certificate means no radius-`r` cone detects the slope; its
/// absence proves nothing.
pub fn exclusion_search(
    group: &GroupBackend,
    p: &PeripheralSubgroup,
    slope: &Slope,
    r: usize,
    opts: &SearchOptions,
) -> Result<DetectionVerdict> {
    let constraint = ConeConstraint::PeripheralLine {
        peripheral: p.name.clone(),
        slope: *slope,
        side: None,
    };
    let desc = constraint.describe(group);
    let opts = SearchOptions { limit: 1, ..*opts };
    let outcome = search(group, r, std::slice::from_ref(&constraint), &opts);
    let (status, leaves, cert, detail) = match outcome {
        Ok(SearchOutcome::Unsat(c)) => (DetectionStatus::RefutedAtRadius, c.root.leaves(), Some(c), None),
        Ok(SearchOutcome::Enumeration { snapshots, .. }) if !snapshots.is_empty() => (
            DetectionStatus::Unknown,
            0,
            None,
            Some("a consistent cone exists at this radius".to_string()),
        ),
        Ok(SearchOutcome::Enumeration { .. }) => {
            (DetectionStatus::Unknown, 0, None, Some("search incomplete".to_string()))
        }
        Err(e) if is_undecided(&e) => (DetectionStatus::Unknown, 0, None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let mut v = DetectionVerdict::new(
        DetectionLevel::Weak,
        *slope,
        status,
        r,
        Witness::Exclusion {
            constraint: desc,
            leaves,
        },
    );
    v.certificate = cert;
    v.detail = detail;
    Ok(v)
}

/// One radius of an exclusion frontier.
#[derive(Debug, Clone, Serialize)]
pub struct FrontierStep {
    pub radius: usize,
    pub status: DetectionStatus,
    pub millis: u128,
}

/// Runs `exclusion_search` at `r = 1, …, r_max`, stopping at the first certificate.
pub fn exclusion_frontier(
    group: &GroupBackend,
    p: &PeripheralSubgroup,
    slope: &Slope,
    r_max: usize,
    opts: &SearchOptions,
) -> Result<(Vec<FrontierStep>, Option<DetectionVerdict>)> {
    let mut steps = Vec::new();
    for r in 1..=r_max {
        let t = std::time::Instant::now();
        let v = exclusion_search(group, p, slope, r, opts)?;
        steps.push(FrontierStep {
            radius: r,
            status: v.status,
            millis: t.elapsed().as_millis(),
        });
        if v.status == DetectionStatus::RefutedAtRadius {
            return Ok((steps, Some(v)));
        }
    }
    Ok((steps, None))
}

/// One slope per declared peripheral torus, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multislope {
    pub slopes: Vec<(String, Slope)>,
}

impl Multislope {
    pub fn new(group: &GroupBackend, slopes: Vec<Slope>) -> Result<Self> {
        let ps = group.peripherals();
        if ps.len() != slopes.len() {
            return Err(Error::Invalid(format!(
                "multislope needs {} slopes, got {}",
                ps.len(),
                slopes.len()
            )));
        }
        Ok(Multislope {
            slopes: ps.iter().map(|p| p.name.clone()).zip(slopes).collect(),
        })
    }

    /// The multislope of `o`, when every torus has an exact slope at radius `r`.
    pub fn of_order(o: &OrderOracle, r: usize) -> Result<Option<Self>> {
        let mut out = Vec::new();
        for p in o.group().peripherals() {
            match slope_of_order(o, p, r)?.slope() {
                Some(s) => out.push((p.name.clone(), s)),
                None => return Ok(None),
            }
        }
        Ok(Some(Multislope { slopes: out }))
    }
}

impl fmt::Display for Multislope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.slopes.iter().map(|(n, s)| format!("{n}:{s}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}
