//! Gluing peripheral tori: slope transport, the Bludov–Glass compatibility
//! check on finite normal families, and coherence over gluing graphs.

mod graph;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

pub use graph::{
    coherence_check, fixture_orders, parse_assignment, CoherenceOptions, CoherenceReport, EdgeReport, GluingEdge,
    GluingGraph, Vertex, VertexReport, WitnessSource,
};

use crate::error::{Error, Result};
use crate::lattice::Slope;
use crate::orders::{snapshot, ConeSnapshot, OrderOracle, Sign};
use crate::presentations::GroupBackend;

/// Radius at which normal-family closure is checked.
pub const CLOSURE_RADIUS: usize = 3;

/// Identification of peripheral tori: the class `μ^m λ^l` of the source is
/// `μ'^{m'} λ'^{l'}` in the target with `(m', l') = matrix · (m, l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluingMap {
    pub source: String,
    pub target: String,
    pub matrix: [[i64; 2]; 2],
}

impl GluingMap {
    pub fn new(source: impl Into<String>, target: impl Into<String>, matrix: [[i64; 2]; 2]) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::Invalid(format!(
                "gluing matrix {matrix:?} has determinant {det}"
            )));
        }
        Ok(GluingMap {
            source: source.into(),
            target: target.into(),
            matrix,
        })
    }

    pub fn identity(source: impl Into<String>, target: impl Into<String>) -> Self {
        GluingMap::new(source, target, [[1, 0], [0, 1]]).expect("unimodular")
    }

    pub fn det(&self) -> i64 {
        let m = self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> GluingMap {
        let (m, d) = (self.matrix, self.det());
        GluingMap {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix: [[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]],
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &GluingMap) -> GluingMap {
        let (a, b) = (other.matrix, self.matrix);
        let mut m = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        GluingMap {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: m,
        }
    }

    /// Peripheral coordinates `(m, l)` in the target basis.
    pub fn apply(&self, v: (i64, i64)) -> (i64, i64) {
        let m = self.matrix;
        (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
    }
}

/// Image of a slope under the gluing, acting projectively on `p/q ↔ μ^p λ^q`.
pub fn transport_slope(f: &GluingMap, s: &Slope) -> Slope {
    let m = f.matrix;
    match *s {
        Slope::Rational { p, q } => {
            let (p2, q2) = f.apply((p, q));
            Slope::rational(p2, q2).expect("unimodular maps keep directions nonzero")
        }
        Slope::QuadraticIrrational { a, b, c, d } => {
            let [[m00, m01], [m10, m11]] = m.map(|r| r.map(i128::from));
            let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
            // (A + B√d) / (C + D√d), then rationalise the denominator
            let (na, nb) = (m00 * a + m01 * c, m00 * b);
            let (da, db) = (m10 * a + m11 * c, m10 * b);
            let num_a = na * da - nb * db * d;
            let num_b = nb * da - na * db;
            let den = da * da - db * db * d;
            let g = num_integer::gcd(num_integer::gcd(num_a, num_b), den);
            let cv = |x: i128| i64::try_from(x / g).expect("slope coefficients fit in i64");
            Slope::quadratic(cv(num_a), cv(num_b), cv(den), d as i64).expect("den is nonzero for irrational slopes")
        }
    }
}

/// A finite family of orders on one group, with its checked closure properties.
#[derive(Clone)]
pub struct NormalFamilyFixture {
    pub name: String,
    pub group: Arc<GroupBackend>,
    pub orders: Vec<OrderOracle>,
    pub opposite_closed: bool,
    /// Conjugating by each generator permutes the snapshots at this radius.
    pub conjugate_closed_at: Option<usize>,
}

impl NormalFamilyFixture {
    /// Computes the closure tags on `B_3`.
    pub fn new(name: impl Into<String>, orders: Vec<OrderOracle>) -> Result<Self> {
        let group = orders
            .first()
            .ok_or_else(|| Error::Invalid("a normal family needs at least one order".to_string()))?
            .group()
            .clone();
        if orders.iter().any(|o| o.group().presentation != group.presentation) {
            return Err(Error::Invalid("family members live on different groups".to_string()));
        }
        let snaps: Vec<ConeSnapshot> = orders
            .iter()
            .map(|o| snapshot(o, CLOSURE_RADIUS))
            .collect::<Result<_>>()?;
        let known: BTreeSet<Vec<Sign>> = snaps.iter().map(signs).collect();
        let mut opposite_closed = true;
        for o in &orders {
            if !known.contains(&signs(&snapshot(&o.opposite(), CLOSURE_RADIUS)?)) {
                opposite_closed = false;
            }
        }
        let mut conjugate_closed = true;
        'outer: for o in &orders {
            for i in 0..group.rank() {
                for e in [1, -1] {
                    let g = crate::word::Word::power_of(i, e);
                    if !known.contains(&signs(&snapshot(&o.conjugate(&g)?, CLOSURE_RADIUS)?)) {
                        conjugate_closed = false;
                        break 'outer;
                    }
                }
            }
        }
        Ok(NormalFamilyFixture {
            name: name.into(),
            group,
            orders,
            opposite_closed,
            conjugate_closed_at: conjugate_closed.then_some(CLOSURE_RADIUS),
        })
    }

    fn require_closed(&self) -> Result<()> {
        if self.conjugate_closed_at.is_none() {
            return Err(Error::Invalid(format!(
                "family `{}` is not closed under conjugation on B_{CLOSURE_RADIUS}",
                self.name
            )));
        }
        Ok(())
    }
}

fn signs(s: &ConeSnapshot) -> Vec<Sign> {
    s.entries.iter().map(|e| e.2).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compatibility {
    Compatible,
    Incompatible,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub verdict: Compatibility,
    pub radius: usize,
    /// Peripheral points `(m, l)` whose image also lies in the box.
    pub domain: usize,
    pub restrictions: (usize, usize),
    pub reason: Option<String>,
    pub interpretation: Option<String>,
}

fn restriction_table(o: &OrderOracle, peripheral: &str, domain: &[(i64, i64)]) -> Result<Vec<Sign>> {
    let p = o
        .group()
        .peripheral(peripheral)
        .ok_or_else(|| Error::Invalid(format!("no peripheral `{peripheral}`")))?
        .clone();
    domain.iter().map(|&(m, l)| o.sign_of(&p.element(m, l))).collect()
}

/// Compares the peripheral restrictions of two normal families through `f`.
///
/// Restrictions are sign tables on the points `(m, l)` with `|m|, |l| ≤ r`
/// whose image under `f` also lies in the box; the families are compatible
/// when `f` matches the two sets of tables exactly.
pub fn bludov_glass_check(
    n1: &NormalFamilyFixture,
    n2: &NormalFamilyFixture,
    f: &GluingMap,
    r: usize,
) -> Result<CompatibilityReport> {
    n1.require_closed()?;
    n2.require_closed()?;
    let r = r as i64;
    let in_box = |v: (i64, i64)| v.0.abs() <= r && v.1.abs() <= r;
    let mut domain = Vec::new();
    for m in -r..=r {
        for l in -r..=r {
            if (m, l) != (0, 0) && in_box(f.apply((m, l))) {
                domain.push((m, l));
            }
        }
    }
    let image: Vec<(i64, i64)> = domain.iter().map(|&v| f.apply(v)).collect();
    let mut report = CompatibilityReport {
        verdict: Compatibility::Unknown,
        radius: r as usize,
        domain: domain.len(),
        restrictions: (0, 0),
        reason: None,
        interpretation: None,
    };
    let tables = |fam: &NormalFamilyFixture, peripheral: &str, pts: &[(i64, i64)]| -> Result<Vec<Vec<Sign>>> {
        fam.orders
            .iter()
            .map(|o| restriction_table(o, peripheral, pts))
            .collect()
    };
    let (t1, t2) = match (tables(n1, &f.source, &domain), tables(n2, &f.target, &image)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) if matches!(e, Error::Unknown(_) | Error::ResourceLimit(_)) => {
            report.reason = Some(e.to_string());
            return Ok(report);
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let s1: BTreeSet<&Vec<Sign>> = t1.iter().collect();
    let s2: BTreeSet<&Vec<Sign>> = t2.iter().collect();
    report.restrictions = (s1.len(), s2.len());
    let orphan = t1
        .iter()
        .zip(&n1.orders)
        .find(|(t, _)| !s2.contains(t))
        .map(|(_, o)| (o, &n1.name, &n2.name))
        .or_else(|| {
            t2.iter()
                .zip(&n2.orders)
                .find(|(t, _)| !s1.contains(t))
                .map(|(_, o)| (o, &n2.name, &n1.name))
        });
    match orphan {
        Some((o, mine, theirs)) => {
            report.verdict = Compatibility::Incompatible;
            report.reason = Some(format!(
                "restriction of {} in `{mine}` has no partner in `{theirs}`",
                o.provenance.describe()
            ));
        }
        None => {
            report.verdict = Compatibility::Compatible;
            report.interpretation = Some(format!(
                "restrictions agree at radius {r}; by the Bludov–Glass criterion the amalgam is left-orderable (the order itself is not constructed)"
            ));
        }
    }
    Ok(report)
}

/// The amalgam of two backends along `f`, with normal forms certified to `radius`.
pub fn build_amalgam(
    g1: Arc<GroupBackend>,
    g2: Arc<GroupBackend>,
    f: &GluingMap,
    radius: usize,
) -> Result<GroupBackend> {
    GroupBackend::amalgam(g1, &f.source, g2, &f.target, f.matrix, radius)
}
