use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::amalgam::AmalgamSpec;
use super::finite::FiniteTable;
use super::torus::{TorusElement, TorusShape};
use super::{PeripheralSubgroup, Presentation};
use crate::error::{Error, Result};
use crate::word::Word;

/// Ball enumeration refuses to grow past this many elements unless told otherwise.
pub const DEFAULT_BALL_CAP: usize = 200_000;

const FINITE_COSET_LIMIT: usize = 20_000;

#[derive(Debug, Clone)]
pub enum Family {
    Zn(usize),
    Free(usize),
    /// ⟨x, y | x y x⁻¹ = y⁻¹⟩, storing the generator indices of `x` and `y`.
    KleinBottle {
        x: usize,
        y: usize,
    },
    TorusKnot {
        u: usize,
        v: usize,
        p: i64,
        q: i64,
    },
    /// A finite group solved by coset enumeration.
    Finite(Arc<FiniteTableHandle>),
    BoundedAmalgam(Arc<AmalgamSpec>),
    /// ℤ² ⋊_A ℤ with `t v t⁻¹ = A v`; `m` is row-major, acting on (a, b) exponent columns.
    TorusBundle {
        a: usize,
        b: usize,
        t: usize,
        m: [[i64; 2]; 2],
    },
}

/// Opaque wrapper so the coset table stays private to the module.
#[derive(Debug)]
pub struct FiniteTableHandle(pub(crate) FiniteTable);

impl Family {
    pub fn tag(&self) -> String {
        match self {
            Family::Zn(n) => format!("Zn({n})"),
            Family::Free(n) => format!("Free({n})"),
            Family::KleinBottle { .. } => "KleinBottle".to_string(),
            Family::TorusKnot { p, q, .. } => format!("TorusKnot({p},{q})"),
            Family::Finite(t) => format!("Finite({})", t.0.order()),
            Family::BoundedAmalgam(a) => format!("BoundedAmalgam(r={})", a.certified_radius),
            Family::TorusBundle { m, .. } => format!("TorusBundle({m:?})"),
        }
    }
}

/// A finitely presented group with a solved word problem.
///
/// Values are immutable once built; every operation is a pure function of
/// its inputs, so a backend can be shared freely between threads.
#[derive(Debug, Clone)]
pub struct GroupBackend {
    pub presentation: Presentation,
    pub family: Family,
}

/// The ball `B_r`, in the order (word length, normal form).
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: usize,
    elements: Vec<Word>,
    lengths: Vec<usize>,
    /// A word of minimal length for each element, found first by the search.
    geodesics: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Word {
        &self.elements[i]
    }

    /// Word length of the `i`-th element.
    pub fn length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    /// A geodesic word for the `i`-th element: it has `length(i)` letters.
    pub fn geodesic(&self, i: usize) -> &Word {
        &self.geodesics[i]
    }

    /// Index of an element given in normal form.
    pub fn index_of(&self, nf: &Word) -> Option<usize> {
        self.index.get(nf).copied()
    }

    pub fn contains(&self, nf: &Word) -> bool {
        self.index.contains_key(nf)
    }

    pub fn length_of(&self, nf: &Word) -> Option<usize> {
        self.index_of(nf).map(|i| self.lengths[i])
    }

    /// Elements of length at most `r`; a prefix of the stored order.
    pub fn within(&self, r: usize) -> &[Word] {
        let n = self.lengths.partition_point(|&l| l <= r);
        &self.elements[..n]
    }
}

fn solve_lattice(mu: (i64, i64), lambda: (i64, i64), target: (i64, i64)) -> Option<(i64, i64)> {
    let det = mu.0 * lambda.1 - mu.1 * lambda.0;
    if det == 0 {
        return None;
    }
    let a = target.0 * lambda.1 - target.1 * lambda.0;
    let b = mu.0 * target.1 - mu.1 * target.0;
    (a % det == 0 && b % det == 0).then(|| (a / det, b / det))
}

fn is_commutator(w: &Word) -> Option<(usize, usize)> {
    match w.syllables() {
        &[(a, 1), (b, 1), (a2, -1), (b2, -1)] if a == a2 && b == b2 && a != b => Some((a.min(b), a.max(b))),
        _ => None,
    }
}

fn mat_mul(x: [[i64; 2]; 2], y: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut z = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

/// `m^k` for unimodular `m`; negative powers use the adjugate.
pub(crate) fn mat_pow(m: [[i64; 2]; 2], k: i64) -> [[i64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let base = if k >= 0 {
        m
    } else {
        [[m[1][1] * det, -m[0][1] * det], [-m[1][0] * det, m[0][0] * det]]
    };
    let mut acc = [[1, 0], [0, 1]];
    for _ in 0..k.unsigned_abs() {
        acc = mat_mul(acc, base);
    }
    acc
}

/// Matches `t x t⁻¹ w` with `w` a word in `a, b`; returns `x` and the exponent vector of `w⁻¹`.
fn bundle_relator(r: &Word, a: usize, b: usize) -> Option<(usize, usize, [i64; 2])> {
    match r.syllables() {
        [(t, 1), (x, 1), (t2, -1), rest @ ..] if t == t2 && (*x == a || *x == b) && *t != a && *t != b => {
            let mut v = [0i64; 2];
            for &(g, e) in rest {
                if g == a {
                    v[0] -= e;
                } else if g == b {
                    v[1] -= e;
                } else {
                    return None;
                }
            }
            Some((*t, *x, v))
        }
        _ => None,
    }
}

fn recognise_bundle(rels: &[&Word]) -> Option<Family> {
    if rels.len() != 3 {
        return None;
    }
    let ci = rels.iter().position(|r| is_commutator(r).is_some())?;
    let (a, b) = is_commutator(rels[ci])?;
    let mut cols: [Option<[i64; 2]>; 2] = [None, None];
    let mut tt = None;
    for (i, r) in rels.iter().enumerate() {
        if i == ci {
            continue;
        }
        let (t, x, v) = bundle_relator(r, a, b)?;
        if tt.is_some_and(|s| s != t) {
            return None;
        }
        tt = Some(t);
        cols[usize::from(x == b)] = Some(v);
    }
    let (ca, cb) = (cols[0]?, cols[1]?);
    let m = [[ca[0], cb[0]], [ca[1], cb[1]]];
    let t = tt?;
    ((m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() == 1).then_some(Family::TorusBundle { a, b, t, m })
}

impl GroupBackend {
    /// Recognises the built-in families from a presentation; falls back to
    /// coset enumeration for finite groups. Declared peripherals are checked.
    pub fn from_presentation(presentation: Presentation) -> Result<Self> {
        presentation.validate()?;
        let n = presentation.rank();
        let rels = &presentation.relators;
        let rels_nontrivial: Vec<&Word> = rels.iter().filter(|r| !r.is_identity()).collect();
        let family = if rels_nontrivial.is_empty() {
            Family::Free(n)
        } else if n >= 2 && {
            let mut pairs: Vec<_> = rels_nontrivial.iter().filter_map(|r| is_commutator(r)).collect();
            pairs.sort();
            pairs.dedup();
            pairs.len() == n * (n - 1) / 2 && rels_nontrivial.iter().all(|r| is_commutator(r).is_some())
        } {
            Family::Zn(n)
        } else if let Some(f) = (n == 3).then(|| recognise_bundle(&rels_nontrivial)).flatten() {
            f
        } else if n == 2 && rels_nontrivial.len() == 1 {
            match *rels_nontrivial[0].syllables() {
                [(x, 1), (y, 1), (x2, -1), (y2, 1)] if x == x2 && y == y2 && x != y => Family::KleinBottle { x, y },
                [(u, p), (v, mq)] if u != v && p >= 2 && mq <= -2 => Family::TorusKnot { u, v, p, q: -mq },
                _ => Self::finite_family(&presentation)?,
            }
        } else {
            Self::finite_family(&presentation)?
        };
        let g = GroupBackend { presentation, family };
        g.validate_peripherals()?;
        Ok(g)
    }

    fn finite_family(p: &Presentation) -> Result<Family> {
        match FiniteTable::enumerate(p.rank(), &p.relators, FINITE_COSET_LIMIT) {
            Ok(t) => Ok(Family::Finite(Arc::new(FiniteTableHandle(t)))),
            Err(Error::ResourceLimit(_)) => Err(Error::Unsupported(
                "no exact word problem for this presentation (not a built-in family and coset enumeration did not close)".to_string(),
            )),
            Err(e) => Err(e),
        }
    }

    pub(crate) fn from_parts(presentation: Presentation, family: Family) -> Self {
        GroupBackend { presentation, family }
    }

    fn named(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// ℤⁿ on generators `a, b, c, …` (or `e0, e1, …` beyond 26).
    pub fn zn(n: usize) -> Self {
        let gens: Vec<String> = (0..n)
            .map(|i| {
                if n <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("e{i}")
                }
            })
            .collect();
        let mut relators = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                relators.push(Word::from_pairs([(i, 1), (j, 1), (i, -1), (j, -1)]));
            }
        }
        let mut presentation = Presentation {
            generators: gens,
            relators,
            peripherals: Vec::new(),
        };
        if n == 2 {
            // Peripheral coordinates (m, l) = μ^m λ^l land on the plane point (l, m) = (a, b).
            presentation
                .peripherals
                .push(PeripheralSubgroup::new("T", Word::gen(1), Word::gen(0)));
        }
        GroupBackend {
            presentation,
            family: Family::Zn(n),
        }
    }

    /// ℤ² ⋊_A ℤ on `a, b, t` with `t v t⁻¹ = A v`, peripheral `T = (b, a)` on the fibre.
    pub fn torus_bundle(m: [[i64; 2]; 2]) -> Result<Self> {
        if (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() != 1 {
            return Err(Error::Unsupported(format!("monodromy {m:?} is not unimodular")));
        }
        let image = |c: usize| Word::from_pairs([(0, m[0][c]), (1, m[1][c])]);
        let conj = |x: usize| Word::from_pairs([(2, 1), (x, 1), (2, -1)]).mul(&image(x).inverse());
        let presentation = Presentation {
            generators: Self::named(&["a", "b", "t"]),
            relators: vec![Word::from_pairs([(0, 1), (1, 1), (0, -1), (1, -1)]), conj(0), conj(1)],
            peripherals: vec![PeripheralSubgroup::new("T", Word::gen(1), Word::gen(0))],
        };
        Ok(GroupBackend {
            presentation,
            family: Family::TorusBundle { a: 0, b: 1, t: 2, m },
        })
    }

    /// Fibre vector and `t`-exponent of `w = a^x b^y t^k`.
    pub(crate) fn bundle_coords(&self, w: &Word) -> Option<([i64; 2], i64)> {
        let Family::TorusBundle { a, b, t, m } = self.family else {
            return None;
        };
        let (mut v, mut k) = ([0i64; 2], 0i64);
        for &(g, e) in w.syllables() {
            if g == t {
                k += e;
            } else {
                let p = mat_pow(m, k);
                let c = usize::from(g == b);
                debug_assert!(g == a || g == b);
                v[0] += e * p[0][c];
                v[1] += e * p[1][c];
            }
        }
        Some((v, k))
    }

    pub fn free(n: usize) -> Self {
        let gens = (0..n).map(|i| format!("x{i}")).collect();
        GroupBackend {
            presentation: Presentation {
                generators: gens,
                relators: Vec::new(),
                peripherals: Vec::new(),
            },
            family: Family::Free(n),
        }
    }

    /// ⟨x, y | x y x⁻¹ = y⁻¹⟩ with peripheral basis `(x², y)`.
    pub fn klein_bottle() -> Self {
        GroupBackend {
            presentation: Presentation {
                generators: Self::named(&["x", "y"]),
                relators: vec![Word::from_pairs([(0, 1), (1, 1), (0, -1), (1, 1)])],
                peripherals: vec![PeripheralSubgroup::new("T", Word::power_of(0, 2), Word::gen(1))],
            },
            family: Family::KleinBottle { x: 0, y: 1 },
        }
    }

    /// ⟨u, v | u^p = v^q⟩ with μ = u^a v^b (a q + b p = 1) and λ = u^p μ^{-pq}.
    pub fn torus_knot(p: i64, q: i64) -> Result<Self> {
        if p < 2 || q < 2 || num_integer::gcd(p, q) != 1 {
            return Err(Error::Invalid(format!(
                "torus knot parameters must be coprime and at least 2, got ({p},{q})"
            )));
        }
        let shape = TorusShape { u: 0, v: 1, p, q };
        let (a, b) = shape.bezout().expect("coprime parameters");
        let mu = Word::from_pairs([(0, a), (1, b)]);
        let lambda = Word::power_of(0, p).mul(&mu.pow(-p * q));
        Ok(GroupBackend {
            presentation: Presentation {
                generators: Self::named(&["u", "v"]),
                relators: vec![Word::from_pairs([(0, p), (1, -q)])],
                peripherals: vec![PeripheralSubgroup::new("T", mu, lambda)],
            },
            family: Family::TorusKnot { u: 0, v: 1, p, q },
        })
    }

    pub fn trefoil() -> Self {
        Self::torus_knot(2, 3).expect("(2,3) is valid")
    }

    /// Cyclic group of order `n` as ⟨x | xⁿ⟩.
    pub fn cyclic(n: i64) -> Result<Self> {
        Self::from_presentation(Presentation::new(Self::named(&["x"]), vec![Word::power_of(0, n)])?)
    }

    pub fn klein_four() -> Self {
        Self::from_presentation(Presentation {
            generators: Self::named(&["x", "y"]),
            relators: vec![
                Word::power_of(0, 2),
                Word::power_of(1, 2),
                Word::from_pairs([(0, 1), (1, 1), (0, 1), (1, 1)]),
            ],
            peripherals: Vec::new(),
        })
        .expect("finite presentation")
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    pub fn peripherals(&self) -> &[PeripheralSubgroup] {
        &self.presentation.peripherals
    }

    pub fn peripheral(&self, name: &str) -> Option<&PeripheralSubgroup> {
        self.presentation.peripherals.iter().find(|p| p.name == name)
    }

    pub fn format(&self, w: &Word) -> String {
        self.presentation.format_word(w)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.presentation.parse_word(text)
    }

    pub(crate) fn torus_shape(&self) -> Option<TorusShape> {
        match self.family {
            Family::TorusKnot { u, v, p, q } => Some(TorusShape { u, v, p, q }),
            _ => None,
        }
    }

    /// Klein-bottle coordinates `(a, b)` of `x^a y^b`.
    pub(crate) fn klein_coords(x: usize, w: &Word) -> (i64, i64) {
        let (mut a, mut b) = (0i64, 0i64);
        for &(g, e) in w.syllables() {
            if g == x {
                if e.rem_euclid(2) == 1 {
                    b = -b;
                }
                a += e;
            } else {
                b += e;
            }
        }
        (a, b)
    }

    /// Canonical representative; equal outputs iff equal group elements.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        if let Some(g) = w.max_generator() {
            if g >= self.rank() {
                return Err(Error::UndeclaredGenerator(format!("#{g}")));
            }
        }
        Ok(match &self.family {
            Family::Free(_) => w.clone(),
            Family::Zn(n) => {
                let mut exps = vec![0i64; *n];
                for &(g, e) in w.syllables() {
                    exps[g] += e;
                }
                Word::from_pairs(exps.into_iter().enumerate())
            }
            Family::KleinBottle { x, y } => {
                let (a, b) = Self::klein_coords(*x, w);
                Word::from_pairs([(*x, a), (*y, b)])
            }
            Family::TorusKnot { .. } => {
                let shape = self.torus_shape().unwrap();
                shape.word_of(&shape.element_of(w))
            }
            Family::Finite(t) => t.0.normal_form(w),
            Family::BoundedAmalgam(a) => a.normal_form(w)?,
            Family::TorusBundle { a, b, t, .. } => {
                let (v, k) = self.bundle_coords(w).unwrap();
                Word::from_pairs([(*a, v[0]), (*b, v[1]), (*t, k)])
            }
        })
    }

    pub fn mul(&self, a: &Word, b: &Word) -> Result<Word> {
        self.normal_form(&a.mul(b))
    }

    pub fn inverse(&self, a: &Word) -> Result<Word> {
        self.normal_form(&a.inverse())
    }

    pub fn pow(&self, a: &Word, n: i64) -> Result<Word> {
        self.normal_form(&a.pow(n))
    }

    pub fn conjugate(&self, g: &Word, h: &Word) -> Result<Word> {
        self.normal_form(&g.mul(h).mul(&g.inverse()))
    }

    pub fn equal(&self, a: &Word, b: &Word) -> Result<bool> {
        Ok(self.normal_form(&a.mul(&b.inverse()))?.is_identity())
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        Ok(self.normal_form(w)?.is_identity())
    }

    /// `B_r`: all elements of word length at most `r`, deduplicated by normal form.
    pub fn enumerate_ball(&self, r: usize, cap: usize) -> Result<Ball> {
        let mut elements = vec![Word::identity()];
        let mut lengths = vec![0];
        let mut geodesics = vec![Word::identity()];
        let mut index = HashMap::new();
        index.insert(Word::identity(), 0);
        let mut frontier = 0..1;
        for d in 1..=r {
            let mut fresh: Vec<(Word, Word)> = Vec::new();
            for i in frontier.clone() {
                for g in 0..self.rank() {
                    for e in [-1, 1] {
                        let mut w = elements[i].clone();
                        w.push(g, e);
                        let nf = self.normal_form(&w)?;
                        if !index.contains_key(&nf) {
                            index.insert(nf.clone(), usize::MAX);
                            let mut geo = geodesics[i].clone();
                            geo.push(g, e);
                            fresh.push((nf, geo));
                        }
                    }
                }
            }
            fresh.sort();
            if elements.len() + fresh.len() > cap {
                return Err(Error::ResourceLimit(format!(
                    "ball of radius {d} exceeds {cap} elements"
                )));
            }
            let start = elements.len();
            for (w, geo) in fresh {
                index.insert(w.clone(), elements.len());
                elements.push(w);
                lengths.push(d);
                geodesics.push(geo);
            }
            frontier = start..elements.len();
        }
        Ok(Ball {
            radius: r,
            elements,
            lengths,
            geodesics,
            index,
        })
    }

    pub fn ball(&self, r: usize) -> Result<Ball> {
        self.enumerate_ball(r, DEFAULT_BALL_CAP)
    }

    /// Torus-knot chart: `(c, k)` with `w = μ₀^c z^k`, where μ₀ is the standard meridian.
    fn torus_chart(&self, shape: &TorusShape, w: &Word) -> Option<(i64, i64)> {
        let el = shape.element_of(w);
        let (a, b) = shape.bezout()?;
        let mu0 = Word::from_pairs([(shape.u, a), (shape.v, b)]);
        let half = el.syllables.len() as i64 / 2;
        if el.syllables.len() % 2 == 1 {
            return None;
        }
        for c in [half, -half] {
            let m = shape.element_of(&mu0.pow(c));
            if m.syllables == el.syllables {
                return Some((c, el.center - m.center));
            }
        }
        None
    }

    /// Coordinates in a family chart: a fixed lattice containing every
    /// peripheral subgroup the family supports exactly.
    fn chart(&self, w: &Word) -> Option<Option<(i64, i64)>> {
        match &self.family {
            Family::Zn(2) => {
                let nf = self.normal_form(w).ok()?;
                let mut v = [0i64; 2];
                for &(g, e) in nf.syllables() {
                    v[g] = e;
                }
                Some(Some((v[0], v[1])))
            }
            Family::KleinBottle { x, .. } => {
                let (a, b) = Self::klein_coords(*x, w);
                Some((a % 2 == 0).then_some((a / 2, b)))
            }
            Family::TorusKnot { .. } => {
                let shape = self.torus_shape().unwrap();
                Some(self.torus_chart(&shape, w))
            }
            Family::TorusBundle { .. } => {
                let (v, k) = self.bundle_coords(w)?;
                Some((k == 0).then_some((v[0], v[1])))
            }
            _ => None,
        }
    }

    /// `(a, b)` with `w = μ^a λ^b`, or `None` when `w` is not in the subgroup.
    pub fn peripheral_coords(&self, p: &PeripheralSubgroup, w: &Word) -> Result<Option<(i64, i64)>> {
        if let (Some(Some(m)), Some(Some(l))) = (self.chart(&p.mu), self.chart(&p.lambda)) {
            if let Some(target) = self.chart(w) {
                let Some(t) = target else { return Ok(None) };
                let sol = solve_lattice(m, l, t);
                if sol.is_some() || (m.0 * l.1 - m.1 * l.0) != 0 {
                    return Ok(sol);
                }
            }
        }
        // Bounded search; the window scales with the length of the normal form.
        let nf = self.normal_form(w)?;
        let window = nf.letter_len() as i64 + 2;
        let mu_len = self.normal_form(&p.mu)?.letter_len().max(1) as i64;
        let la_len = self.normal_form(&p.lambda)?.letter_len().max(1) as i64;
        let wa = window / mu_len + 2;
        let wb = window / la_len + 2;
        for a in -wa..=wa {
            let base = self.normal_form(&p.mu.pow(a))?;
            for b in -wb..=wb {
                if self.equal(&base.mul(&p.lambda.pow(b)), &nf)? {
                    return Ok(Some((a, b)));
                }
            }
        }
        Ok(None)
    }

    /// Canonical left-coset representative of `g C`, `C` the peripheral
    /// subgroup, together with the coordinates of `rep⁻¹ g` in `C`.
    /// The representative is the identity exactly when `g ∈ C`.
    pub(crate) fn coset_split(&self, p: &PeripheralSubgroup, g: &Word) -> Result<(Word, (i64, i64), bool)> {
        let standard_chart = |m: Option<Option<(i64, i64)>>, l: Option<Option<(i64, i64)>>| match (m, l) {
            (Some(Some(m)), Some(Some(l))) => (m.0 * l.1 - m.1 * l.0).abs() == 1,
            _ => false,
        };
        let exact = standard_chart(self.chart(&p.mu), self.chart(&p.lambda));
        let rep = match (&self.family, exact) {
            (Family::KleinBottle { x, y }, true) => {
                let (a, _) = Self::klein_coords(*x, g);
                let _ = y;
                Word::power_of(*x, a.rem_euclid(2))
            }
            (Family::TorusKnot { .. }, true) => {
                let shape = self.torus_shape().unwrap();
                let (a, b) = shape.bezout().unwrap();
                let mu0 = Word::from_pairs([(shape.u, a), (shape.v, b)]);
                let s = shape.syllables_word(&shape.element_of(g));
                let bound = (shape.p.max(shape.q)) * (s.syllables().len() as i64 + 2);
                let mut best: Option<Word> = None;
                for c in -bound..=bound {
                    let el: TorusElement = shape.element_of(&s.mul(&mu0.pow(c)));
                    let cand = shape.syllables_word(&el);
                    if best
                        .as_ref()
                        .is_none_or(|b| (cand.letter_len(), &cand) < (b.letter_len(), b))
                    {
                        best = Some(cand);
                    }
                }
                best.unwrap()
            }
            // The fibre is normal; cosets are indexed by the t-exponent.
            (Family::TorusBundle { t, .. }, true) => {
                let (_, k) = self.bundle_coords(g).unwrap();
                Word::power_of(*t, k)
            }
            _ => {
                let nf = self.normal_form(g)?;
                let window = nf.letter_len() as i64 + 2;
                let mut best: Option<Word> = None;
                for a in -window..=window {
                    for b in -window..=window {
                        let cand = self.normal_form(&nf.mul(&p.element(a, b)))?;
                        if best
                            .as_ref()
                            .is_none_or(|b| (cand.letter_len(), &cand) < (b.letter_len(), b))
                        {
                            best = Some(cand);
                        }
                    }
                }
                best.unwrap()
            }
        };
        let rep = self.normal_form(&rep)?;
        let rest = rep.inverse().mul(g);
        let coords = self
            .peripheral_coords(p, &rest)?
            .ok_or_else(|| Error::Unknown("coset representative search left the subgroup".to_string()))?;
        Ok((rep, coords, exact))
    }

    /// Checks that each declared peripheral basis commutes and spans a
    /// subgroup with no relation `μ^a λ^b = 1`, `|a|, |b| ≤ 6`.
    pub fn validate_peripherals(&self) -> Result<()> {
        for p in self.peripherals() {
            let comm = p.mu.mul(&p.lambda).mul(&p.mu.inverse()).mul(&p.lambda.inverse());
            if !self.is_identity(&comm)? {
                return Err(Error::Invalid(format!(
                    "peripheral {}: basis elements do not commute",
                    p.name
                )));
            }
            for a in -6..=6i64 {
                for b in -6..=6i64 {
                    if (a, b) != (0, 0) && self.is_identity(&p.element(a, b))? {
                        return Err(Error::Invalid(format!(
                            "peripheral {}: relation mu^{a} lambda^{b} = 1",
                            p.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exponent-sum vector of a word.
    pub fn exponent_sums(&self, w: &Word) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        for &(g, e) in w.syllables() {
            v[g] += e;
        }
        v
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BallListing {
    pub radius: usize,
    pub size: usize,
    pub elements: Vec<String>,
}

impl Ball {
    pub fn listing(&self, g: &GroupBackend) -> BallListing {
        BallListing {
            radius: self.radius,
            size: self.len(),
            elements: self.elements.iter().map(|w| g.format(w)).collect(),
        }
    }
}
