//! Left-orders as sign oracles, the standard combinators on them, and
//! finite snapshots of positive cones.

mod action;
mod families;
mod magnus;
mod snapshot;

pub use action::{order_from_action, OrderedAction, TranslationAction};
pub use families::{
    abelianisation_to_z, cyclic_kernel_order, klein_order, klein_orders, named_order, order_names,
    torus_bundle_lex_order, torus_kernel_order, torus_lex_order, z_order,
};
pub use magnus::magnus_sign;
pub use snapshot::{sikora_distance, snapshot, snapshot_on, validate_cone, ConeSnapshot, ConeViolation};

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentations::{Ball, GroupBackend};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn from_int(v: i64) -> Option<Sign> {
        match v.signum() {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// How an oracle was built. Kept as a tree so reports can show the full
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Named {
        name: String,
    },
    Opposite {
        of: Box<Provenance>,
    },
    Conjugate {
        by: String,
        of: Box<Provenance>,
    },
    ConvexSwap {
        subgroup: String,
        of: Box<Provenance>,
    },
    LexExtend {
        epimorphism: String,
        kernel: Box<Provenance>,
        quotient: Box<Provenance>,
    },
    FromAction {
        action: String,
        point: String,
        stabiliser: Box<Provenance>,
    },
}

impl Provenance {
    pub fn named(name: impl Into<String>) -> Self {
        Provenance::Named { name: name.into() }
    }

    /// Compact one-line rendering, e.g. `conj(x, op(klein(+x,+y)))`.
    pub fn describe(&self) -> String {
        match self {
            Provenance::Named { name } => name.clone(),
            Provenance::Opposite { of } => format!("op({})", of.describe()),
            Provenance::Conjugate { by, of } => format!("conj({by}, {})", of.describe()),
            Provenance::ConvexSwap { subgroup, of } => format!("swap({subgroup}, {})", of.describe()),
            Provenance::LexExtend {
                epimorphism,
                kernel,
                quotient,
            } => format!("lex({epimorphism}; {} | {})", kernel.describe(), quotient.describe()),
            Provenance::FromAction {
                action,
                point,
                stabiliser,
            } => format!("action({action} @ {point}; {})", stabiliser.describe()),
        }
    }
}

pub type SignFn = Arc<dyn Fn(&Word) -> Result<Sign> + Send + Sync>;
pub type MembershipFn = Arc<dyn Fn(&Word) -> Result<bool> + Send + Sync>;

/// A left-order given by its sign function on nontrivial elements.
///
/// The sign function is only ever called on normal forms of nontrivial
/// elements. Oracles are immutable; every combinator returns a new one.
#[derive(Clone)]
pub struct OrderOracle {
    group: Arc<GroupBackend>,
    sign: SignFn,
    pub provenance: Provenance,
}

impl fmt::Debug for OrderOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderOracle")
            .field("group", &self.group.family.tag())
            .field("provenance", &self.provenance.describe())
            .finish()
    }
}

impl OrderOracle {
    pub fn new(group: Arc<GroupBackend>, provenance: Provenance, sign: SignFn) -> Self {
        OrderOracle {
            group,
            sign,
            provenance,
        }
    }

    pub fn from_fn(
        group: Arc<GroupBackend>,
        provenance: Provenance,
        f: impl Fn(&Word) -> Result<Sign> + Send + Sync + 'static,
    ) -> Self {
        Self::new(group, provenance, Arc::new(f))
    }

    pub fn group(&self) -> &Arc<GroupBackend> {
        &self.group
    }

    pub fn sign_of(&self, w: &Word) -> Result<Sign> {
        let nf = self.group.normal_form(w)?;
        if nf.is_identity() {
            return Err(Error::IdentityElement);
        }
        (self.sign)(&nf)
    }

    /// `g <_o h` iff `g⁻¹h` is positive.
    pub fn less(&self, g: &Word, h: &Word) -> Result<bool> {
        Ok(self.compare(g, h)? == Ordering::Less)
    }

    pub fn compare(&self, g: &Word, h: &Word) -> Result<Ordering> {
        let d = self.group.normal_form(&g.inverse().mul(h))?;
        if d.is_identity() {
            return Ok(Ordering::Equal);
        }
        Ok(match (self.sign)(&d)? {
            Sign::Pos => Ordering::Less,
            Sign::Neg => Ordering::Greater,
        })
    }

    /// Sorts elements increasingly.
    pub fn sort(&self, items: &mut [Word]) -> Result<()> {
        let mut err = None;
        items.sort_by(|a, b| match self.compare(a, b) {
            Ok(o) => o,
            Err(e) => {
                err.get_or_insert(e);
                Ordering::Equal
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn opposite(&self) -> OrderOracle {
        let inner = self.sign.clone();
        OrderOracle::from_fn(
            self.group.clone(),
            Provenance::Opposite {
                of: Box::new(self.provenance.clone()),
            },
            move |w| Ok(inner(w)?.flip()),
        )
    }

    /// `g·o`, with positive cone `g P g⁻¹`: sign'(h) = sign(g⁻¹ h g).
    pub fn conjugate(&self, g: &Word) -> Result<OrderOracle> {
        let g = self.group.normal_form(g)?;
        let inner = self.clone();
        let by = self.group.format(&g);
        Ok(OrderOracle::from_fn(
            self.group.clone(),
            Provenance::Conjugate {
                by,
                of: Box::new(self.provenance.clone()),
            },
            move |h| inner.sign_of(&g.inverse().mul(h).mul(&g)),
        ))
    }

    /// Flips signs on `C ∖ {1}`. The witness is refutation-checked on `B_radius` first.
    pub fn convex_swap(&self, c: &ConvexWitness, radius: usize) -> Result<OrderOracle> {
        let ball = self.group.ball(radius)?;
        if let Some(t) = c.refute(self, &ball)? {
            return Err(t.into_error(&self.group));
        }
        let inner = self.sign.clone();
        let member = c.member.clone();
        Ok(OrderOracle::from_fn(
            self.group.clone(),
            Provenance::ConvexSwap {
                subgroup: c.name.clone(),
                of: Box::new(self.provenance.clone()),
            },
            move |w| {
                let s = inner(w)?;
                Ok(if member(w)? { s.flip() } else { s })
            },
        ))
    }

    pub fn transform(&self, t: &Transform, radius: usize) -> Result<OrderOracle> {
        match t {
            Transform::Opposite => Ok(self.opposite()),
            Transform::Conjugate(g) => self.conjugate(g),
            Transform::ConvexSwap(c) => self.convex_swap(c, radius),
        }
    }

    /// Restriction of `o` to the cosets of a convex subgroup.
    pub fn quotient_order(&self, c: &ConvexWitness, radius: usize) -> Result<CosetOrder> {
        let ball = self.group.ball(radius)?;
        if let Some(t) = c.refute(self, &ball)? {
            return Err(t.into_error(&self.group));
        }
        Ok(CosetOrder {
            order: self.clone(),
            subgroup: c.clone(),
        })
    }
}

#[derive(Clone)]
pub enum Transform {
    Opposite,
    Conjugate(Word),
    ConvexSwap(ConvexWitness),
}

/// A subgroup membership oracle claimed to be convex for some order.
#[derive(Clone)]
pub struct ConvexWitness {
    pub name: String,
    pub member: MembershipFn,
}

impl fmt::Debug for ConvexWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvexWitness({})", self.name)
    }
}

/// `lower < middle < upper` with the ends in the subgroup and the middle outside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationTriple {
    pub lower: Word,
    pub middle: Word,
    pub upper: Word,
}

impl RefutationTriple {
    pub fn into_error(self, g: &GroupBackend) -> Error {
        Error::ConvexityRefuted {
            lower: g.format(&self.lower),
            middle: g.format(&self.middle),
            upper: g.format(&self.upper),
        }
    }
}

impl ConvexWitness {
    pub fn new(name: impl Into<String>, f: impl Fn(&Word) -> Result<bool> + Send + Sync + 'static) -> Self {
        ConvexWitness {
            name: name.into(),
            member: Arc::new(f),
        }
    }

    pub fn trivial() -> Self {
        ConvexWitness::new("1", |w| Ok(w.is_identity()))
    }

    pub fn contains(&self, nf: &Word) -> Result<bool> {
        (self.member)(nf)
    }

    /// Searches the ball for `1 < g < h` or `h < g < 1` with `h ∈ C`, `g ∉ C`.
    pub fn refute(&self, o: &OrderOracle, ball: &Ball) -> Result<Option<RefutationTriple>> {
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for w in ball.elements().iter().skip(1) {
            if self.contains(w)? {
                inside.push((w.clone(), o.sign_of(w)?));
            } else {
                outside.push((w.clone(), o.sign_of(w)?));
            }
        }
        for (g, sg) in &outside {
            for (h, sh) in inside.iter().filter(|(_, s)| s == sg) {
                // same side of 1: g strictly between 1 and h?
                let between = match sg {
                    Sign::Pos => o.less(g, h)?,
                    Sign::Neg => o.less(h, g)?,
                };
                if between {
                    let _ = sh;
                    return Ok(Some(match sg {
                        Sign::Pos => RefutationTriple {
                            lower: Word::identity(),
                            middle: g.clone(),
                            upper: h.clone(),
                        },
                        Sign::Neg => RefutationTriple {
                            lower: h.clone(),
                            middle: g.clone(),
                            upper: Word::identity(),
                        },
                    }));
                }
            }
        }
        Ok(None)
    }
}

/// The order induced on left cosets `G/C` by an order for which `C` is convex.
#[derive(Clone, Debug)]
pub struct CosetOrder {
    order: OrderOracle,
    subgroup: ConvexWitness,
}

impl CosetOrder {
    /// `gC < hC` iff `g⁻¹h ∉ C` and `g < h`.
    pub fn compare(&self, g: &Word, h: &Word) -> Result<Ordering> {
        let group = self.order.group();
        let d = group.normal_form(&g.inverse().mul(h))?;
        if self.subgroup.contains(&d)? {
            return Ok(Ordering::Equal);
        }
        self.order.compare(g, h)
    }

    /// Checks on the ball that comparisons do not depend on representatives.
    pub fn check_well_defined(&self, ball: &Ball, reps: usize) -> Result<bool> {
        let group = self.order.group();
        let members: Vec<&Word> = ball
            .elements()
            .iter()
            .filter(|w| self.subgroup.contains(w).unwrap_or(false))
            .take(reps)
            .collect();
        let sample: Vec<&Word> = ball.elements().iter().take(reps * 4).collect();
        for g in &sample {
            for h in &sample {
                let base = self.compare(g, h)?;
                for c in &members {
                    let g2 = group.mul(g, c)?;
                    for d in &members {
                        let h2 = group.mul(h, d)?;
                        if self.compare(&g2, &h2)? != base {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// A homomorphism given by generator images, assumed surjective.
#[derive(Clone, Debug)]
pub struct Epimorphism {
    pub name: String,
    pub source: Arc<GroupBackend>,
    pub target: Arc<GroupBackend>,
    pub images: Vec<Word>,
}

impl Epimorphism {
    pub fn new(
        name: impl Into<String>,
        source: Arc<GroupBackend>,
        target: Arc<GroupBackend>,
        images: Vec<Word>,
    ) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::Invalid(format!(
                "epimorphism needs {} generator images, got {}",
                source.rank(),
                images.len()
            )));
        }
        for r in &source.presentation.relators {
            let img = Self::apply_raw(&images, r);
            if !target.is_identity(&img)? {
                return Err(Error::Invalid(format!(
                    "generator images do not respect relator {}",
                    source.format(r)
                )));
            }
        }
        Ok(Epimorphism {
            name: name.into(),
            source,
            target,
            images,
        })
    }

    fn apply_raw(images: &[Word], w: &Word) -> Word {
        let mut out = Word::identity();
        for &(g, e) in w.syllables() {
            out = out.mul(&images[g].pow(e));
        }
        out
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.target.normal_form(&Self::apply_raw(&self.images, w))
    }

    pub fn in_kernel(&self, w: &Word) -> Result<bool> {
        Ok(self.apply(w)?.is_identity())
    }

    /// Surjectivity check: each target generator is the image of some element of `B_r`.
    pub fn hits_generators(&self, r: usize) -> Result<bool> {
        let ball = self.source.ball(r)?;
        let mut image = std::collections::HashSet::new();
        for w in ball.elements() {
            image.insert(self.apply(w)?);
        }
        for i in 0..self.target.rank() {
            if !image.contains(&self.target.normal_form(&Word::gen(i))?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn kernel_witness(&self) -> ConvexWitness {
        let me = self.clone();
        ConvexWitness::new(format!("ker({})", self.name), move |w| me.in_kernel(w))
    }
}

/// Lexicographic order from `1 → K → G → Q → 1`: the quotient decides unless
/// the image is trivial, in which case the kernel order does.
pub fn lex_extend(kernel: &OrderOracle, quotient: &OrderOracle, proj: &Epimorphism) -> Result<OrderOracle> {
    if !Arc::ptr_eq(kernel.group(), &proj.source) && kernel.group().presentation != proj.source.presentation {
        return Err(Error::Invalid("kernel order lives on a different group".to_string()));
    }
    let k = kernel.clone();
    let q = quotient.clone();
    let p = proj.clone();
    Ok(OrderOracle::from_fn(
        proj.source.clone(),
        Provenance::LexExtend {
            epimorphism: proj.name.clone(),
            kernel: Box::new(kernel.provenance.clone()),
            quotient: Box::new(quotient.provenance.clone()),
        },
        move |w| {
            let img = p.apply(w)?;
            if img.is_identity() {
                k.sign_of(w)
            } else {
                q.sign_of(&img)
            }
        },
    ))
}

#[cfg(test)]
mod tests;
