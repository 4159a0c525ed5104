//! Order theory of ℤ²: lines of left-orders, slopes, the two-or-four
//! classification and cofinal elements.
//!
//! Lattice points are `(a, b)`, the exponents of the two generators of
//! `GroupBackend::zn(2)`. The slope `p/q` is the line spanned by `(q, p)`;
//! an irrational slope `s` is the line spanned by `(1, s)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orders::{ConeSnapshot, OrderOracle, Provenance, Sign};
use crate::presentations::{Family, GroupBackend};
use crate::word::Word;

/// A point of the projective line over ℚ(√d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slope {
    /// `p/q` with `q ≥ 0`, `gcd(|p|, q) = 1`; `1/0` is vertical.
    Rational { p: i64, q: i64 },
    /// `(a + b√d)/c` with `b ≠ 0`, `c > 0`, `d ≥ 2` square-free and `gcd(a, b, c) = 1`.
    QuadraticIrrational { a: i64, b: i64, c: i64, d: i64 },
}

/// Sign of `x + y√d`, `d` not a square.
pub fn sign_quadratic(x: i128, y: i128, d: i128) -> i32 {
    let (sx, sy) = (x.signum() as i32, y.signum() as i32);
    if sx == 0 || sx == sy {
        return sy;
    }
    if sy == 0 {
        return sx;
    }
    // opposite signs: compare x² with y²d
    match (x * x).cmp(&(y * y * d)) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => 0,
    }
}

fn square_free_part(d: i64) -> (i64, i64) {
    // d = k² · f with f square-free
    let (mut k, mut f) = (1i64, d);
    let mut i = 2i64;
    while i * i <= f {
        while f % (i * i) == 0 {
            f /= i * i;
            k *= i;
        }
        i += 1;
    }
    (k, f)
}

impl Slope {
    pub fn rational(p: i64, q: i64) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::Invalid("0/0 is not a slope".to_string()));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope::Rational { p, q })
    }

    pub fn infinity() -> Slope {
        Slope::Rational { p: 1, q: 0 }
    }

    /// `(a + b√d)/c`; collapses to a rational when `d` is a square or `b = 0`.
    pub fn quadratic(a: i64, b: i64, c: i64, d: i64) -> Result<Slope> {
        if c == 0 || d < 0 {
            return Err(Error::Invalid(format!("({a}+{b}√{d})/{c} is not a real slope")));
        }
        let (k, f) = if d == 0 { (0, 1) } else { square_free_part(d) };
        let b = b * k;
        if b == 0 || f == 1 {
            return Slope::rational(a + b, c);
        }
        let (mut a, mut b, mut c) = (a, b, c);
        if c < 0 {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        Ok(Slope::QuadraticIrrational {
            a: a / g,
            b: b / g,
            c: c / g,
            d: f,
        })
    }

    pub fn sqrt(d: i64) -> Result<Slope> {
        Slope::quadratic(0, 1, 1, d)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Slope::Rational { .. })
    }

    /// Primitive lattice direction `(q, p)` of a rational slope.
    pub fn direction(&self) -> Option<(i64, i64)> {
        match *self {
            Slope::Rational { p, q } => Some((q, p)),
            _ => None,
        }
    }

    /// The rational slope through a nonzero lattice point.
    pub fn through(v: (i64, i64)) -> Result<Slope> {
        Slope::rational(v.1, v.0)
    }

    /// Sign of `cross(u, dir(self))` for a lattice vector `u`.
    fn cross_from(&self, u: (i64, i64)) -> i32 {
        let (u0, u1) = (u.0 as i128, u.1 as i128);
        match *self {
            Slope::Rational { p, q } => (u0 * p as i128 - u1 * q as i128).signum() as i32,
            Slope::QuadraticIrrational { a, b, c, d } => {
                // dir = (c, a + b√d)
                sign_quadratic(u0 * a as i128 - u1 * c as i128, u0 * b as i128, d as i128)
            }
        }
    }

    /// Side of the line containing `v`: sign of `cross(dir, v)`, 0 on the line.
    pub fn side_of(&self, v: (i64, i64)) -> i32 {
        -self.cross_from(v)
    }

    pub fn contains_point(&self, v: (i64, i64)) -> bool {
        self.side_of(v) == 0
    }

    /// Height `|p| + |q|` of a rational slope.
    pub fn height(&self) -> Option<i64> {
        match *self {
            Slope::Rational { p, q } => Some(p.abs() + q),
            _ => None,
        }
    }

    /// Approximate value, for drawing only.
    pub fn to_f64(&self) -> f64 {
        match *self {
            Slope::Rational { p, q } => {
                if q == 0 {
                    f64::INFINITY
                } else {
                    p as f64 / q as f64
                }
            }
            Slope::QuadraticIrrational { a, b, c, d } => (a as f64 + b as f64 * (d as f64).sqrt()) / c as f64,
        }
    }

    /// Angle of the line in `[0, π)`, for drawing only.
    pub fn angle(&self) -> f64 {
        let (x, y) = match *self {
            Slope::Rational { p, q } => (q as f64, p as f64),
            _ => (1.0, self.to_f64()),
        };
        let t = y.atan2(x);
        if t < 0.0 {
            t + std::f64::consts::PI
        } else {
            t
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Slope::Rational { p: 1, q: 0 } => write!(f, "∞"),
            Slope::Rational { p, q } => write!(f, "{p}/{q}"),
            Slope::QuadraticIrrational { a, b, c, d } => {
                // unit coefficients and zero terms are dropped; the output parses back
                let coeff = match b.abs() {
                    1 => String::new(),
                    n => n.to_string(),
                };
                let num = match (a, b < 0) {
                    (0, false) => format!("{coeff}√{d}"),
                    (0, true) => format!("-{coeff}√{d}"),
                    (_, neg) => format!("{a}{}{coeff}√{d}", if neg { '-' } else { '+' }),
                };
                if c == 1 {
                    write!(f, "{num}")
                } else {
                    write!(f, "({num})/{c}")
                }
            }
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Accepts `p/q`, an integer `p`, `∞`/`inf`, `√d`, `sqrt(d)` and
    /// `(a+b√d)/c` (with `sqrt(d)` allowed for `√d`).
    fn from_str(s: &str) -> Result<Slope> {
        let bad = || Error::Invalid(format!("cannot parse slope `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.replace("sqrt(", "√(");
        if t == "∞" || t == "inf" || t == "infinity" {
            return Ok(Slope::infinity());
        }
        if !t.contains('√') {
            let (p, q) = t.split_once('/').unwrap_or((&t, "1"));
            return Slope::rational(p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
        }
        // split an optional trailing /c off a parenthesised numerator
        let (num, c) = match t.strip_prefix('(') {
            Some(rest) if rest.contains(")/") => {
                let (n, c) = rest.rsplit_once(")/").ok_or_else(bad)?;
                (n.to_string(), c.parse::<i64>().map_err(|_| bad())?)
            }
            _ => (t.clone(), 1),
        };
        let root = num.find('√').ok_or_else(bad)?;
        let d_text = num[root + '√'.len_utf8()..]
            .trim_start_matches('(')
            .trim_end_matches(')');
        let d: i64 = d_text.parse().map_err(|_| bad())?;
        let head = &num[..root];
        // head is "[a](+|-)[b]" or "[b]"
        let split = head.rfind(['+', '-']).filter(|&i| i > 0);
        let (a, b_text) = match split {
            Some(i) => (head[..i].parse::<i64>().map_err(|_| bad())?, &head[i..]),
            None => (0, head),
        };
        let b = match b_text.trim_end_matches('*') {
            "" | "+" => 1,
            "-" => -1,
            other => other.parse::<i64>().map_err(|_| bad())?,
        };
        Slope::quadratic(a, b, c, d)
    }
}

/// A line through the origin with a chosen positive open half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLine {
    pub slope: Slope,
    /// `+1`: the side where `cross(dir, v) > 0` is positive; `-1`: the other.
    pub side: i32,
}

impl LatticeLine {
    pub fn new(slope: Slope, side: i32) -> Self {
        LatticeLine {
            slope,
            side: if side < 0 { -1 } else { 1 },
        }
    }

    /// `L₀ = L ∩ ℤ²`, generated by the primitive direction; `None` if irrational.
    pub fn lattice_generator(&self) -> Option<(i64, i64)> {
        self.slope.direction()
    }
}

/// The order with a given line, positive side and, for rational slopes,
/// the sign of the primitive direction `(q, p)` on `L₀`.
pub fn line_sign(slope: &Slope, side: i32, axis: i32, v: (i64, i64)) -> Option<Sign> {
    let s = slope.side_of(v);
    if s != 0 {
        return Sign::from_int((s * side) as i64);
    }
    let (q, p) = slope.direction()?;
    Sign::from_int(axis as i64 * (v.0 * q + v.1 * p))
}

fn z2_coords(w: &Word) -> (i64, i64) {
    let mut v = [0i64; 2];
    for &(g, e) in w.syllables() {
        v[g] += e;
    }
    (v[0], v[1])
}

fn require_z2(group: &GroupBackend) -> Result<()> {
    if matches!(group.family, Family::Zn(2)) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "ℤ² lattice operations on {}",
            group.family.tag()
        )))
    }
}

/// One line-order on ℤ². `axis` is ignored for irrational slopes.
pub fn line_order(group: Arc<GroupBackend>, slope: Slope, side: i32, axis: i32) -> Result<OrderOracle> {
    require_z2(&group)?;
    let name = if slope.is_rational() {
        format!("line({slope}, side {side:+}, axis {axis:+})")
    } else {
        format!("line({slope}, side {side:+})")
    };
    Ok(OrderOracle::from_fn(group, Provenance::named(name), move |w| {
        line_sign(&slope, side, axis, z2_coords(w)).ok_or(Error::IdentityElement)
    }))
}

/// Every left-order on ℤ² with line `L`: `[o, o^op, o*, (o*)^op]` for a
/// rational slope and `[o, o^op]` otherwise. `o` takes the side of `L`
/// and makes the primitive direction positive; `o*` differs from `o` on
/// `L₀` only.
pub fn classify_line_orders(group: Arc<GroupBackend>, line: &LatticeLine) -> Result<Vec<OrderOracle>> {
    let s = line.side;
    let choices: Vec<(i32, i32)> = if line.slope.is_rational() {
        vec![(s, 1), (-s, -1), (s, -1), (-s, 1)]
    } else {
        vec![(s, 1), (-s, 1)]
    };
    choices
        .into_iter()
        .map(|(side, axis)| line_order(group.clone(), line.slope, side, axis))
        .collect()
}

/// `B_r ∖ L`: the lattice points of word length at most `r` off the line.
pub fn cofinal_elements(line: &LatticeLine, r: usize) -> Vec<(i64, i64)> {
    let r = r as i64;
    let mut out = Vec::new();
    for a in -r..=r {
        let rest = r - a.abs();
        for b in -rest..=rest {
            if !line.slope.contains_point((a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Angular comparison of nonzero vectors, angles in `[0, 2π)`.
fn angle_cmp(u: (i64, i64), v: (i64, i64)) -> Ordering {
    let half = |w: (i64, i64)| if w.1 > 0 || (w.1 == 0 && w.0 > 0) { 0 } else { 1 };
    half(u).cmp(&half(v)).then_with(|| {
        let c = u.0 as i128 * v.1 as i128 - u.1 as i128 * v.0 as i128;
        0.cmp(&c)
    })
}

fn cross(u: (i64, i64), v: (i64, i64)) -> i128 {
    u.0 as i128 * v.1 as i128 - u.1 as i128 * v.0 as i128
}

fn primitive(v: (i64, i64)) -> (i64, i64) {
    let g = v.0.gcd(&v.1);
    (v.0 / g, v.1 / g)
}

/// The closed ccw sector of line directions from `from` to `to` (angle at
/// most π) compatible with a sign table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineEstimate {
    pub from: (i64, i64),
    pub to: (i64, i64),
    /// Slope of the least height inside the sector.
    pub simplest: Slope,
    /// Side of `simplest` that carries the positive points strictly off it.
    pub side: i32,
}

impl LineEstimate {
    pub fn lower(&self) -> Slope {
        Slope::through(self.from).expect("nonzero")
    }

    pub fn upper(&self) -> Slope {
        Slope::through(self.to).expect("nonzero")
    }

    /// The sector is a single line.
    pub fn is_exact(&self) -> bool {
        cross(self.from, self.to) == 0 && (self.from.0 * self.to.0 + self.from.1 * self.to.1) > 0
    }

    fn is_half_plane(&self) -> bool {
        cross(self.from, self.to) == 0 && !self.is_exact()
    }

    /// Whether the line of `s` is one of the candidates.
    pub fn contains(&self, s: &Slope) -> bool {
        if self.is_half_plane() {
            return true;
        }
        // a direction d or -d lies in the sector
        let a = s.cross_from(self.from);
        let b = -s.cross_from(self.to);
        (a >= 0 && b >= 0) || (a <= 0 && b <= 0)
    }

    /// Every candidate of `other` is a candidate of `self`.
    pub fn contains_estimate(&self, other: &LineEstimate) -> bool {
        self.contains(&other.lower()) && self.contains(&other.upper())
    }
}

impl fmt::Display for LineEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.simplest)
        } else {
            write!(f, "[{}, {}] (simplest {})", self.lower(), self.upper(), self.simplest)
        }
    }
}

/// Candidate lines for a table of signs on lattice points.
///
/// A line is a candidate when every point strictly on one side is positive
/// and every point strictly on the other is negative, i.e. when the positive
/// points lie in one of its closed half-planes. Errors when no such line
/// exists or no point is positive.
pub fn line_of_points(points: &[((i64, i64), Sign)]) -> Result<LineEstimate> {
    let mut pos: Vec<(i64, i64)> = points
        .iter()
        .filter(|(v, s)| *s == Sign::Pos && *v != (0, 0))
        .map(|(v, _)| primitive(*v))
        .collect();
    let neg: Vec<(i64, i64)> = points
        .iter()
        .filter(|(v, s)| *s == Sign::Neg && *v != (0, 0))
        .map(|(v, _)| primitive((-v.0, -v.1)))
        .collect();
    pos.extend(neg);
    pos.sort_by(|a, b| angle_cmp(*a, *b));
    pos.dedup();
    if pos.is_empty() {
        return Err(Error::NotAnOrder("no signed lattice points".to_string()));
    }
    let n = pos.len();
    // a gap of at least π from pos[i] to pos[i+1]
    let gap = (0..n).find(|&i| {
        let (u, v) = (pos[i], pos[(i + 1) % n]);
        n == 1 || cross(u, v) < 0 || (cross(u, v) == 0 && u.0 * v.0 + u.1 * v.1 < 0)
    });
    let i = gap.ok_or_else(|| Error::NotAnOrder("no line separates the positive and negative points".to_string()))?;
    let e2 = pos[i];
    let e1 = pos[(i + 1) % n];
    let mut est = LineEstimate {
        from: (-e2.0, -e2.1),
        to: e1,
        simplest: Slope::infinity(),
        side: 1,
    };
    est.simplest = simplest_in(&est);
    // positive points lie left of from→…; orient by a strictly-off point
    let s = est.simplest;
    est.side = pos.iter().map(|v| s.side_of(*v)).find(|&x| x != 0).unwrap_or(1);
    Ok(est)
}

fn simplest_in(est: &LineEstimate) -> Slope {
    for h in 1i64.. {
        for p in -h..=h {
            let q = h - p.abs();
            if p.gcd(&q) != 1 || (q == 0 && p < 0) {
                continue;
            }
            let s = Slope::Rational { p, q };
            if est.contains(&s) {
                return s;
            }
        }
    }
    unreachable!("the sector contains a lattice direction")
}

/// Candidate lines of a ℤ² snapshot.
pub fn line_of_cone(group: &GroupBackend, s: &ConeSnapshot) -> Result<LineEstimate> {
    require_z2(group)?;
    let pts: Vec<((i64, i64), Sign)> = s.entries.iter().map(|e| (z2_coords(&e.0), e.2)).collect();
    line_of_points(&pts)
}
