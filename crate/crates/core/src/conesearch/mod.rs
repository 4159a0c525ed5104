//! Exhaustive search for positive cones on a Cayley ball.
//!
//! Variables are the inversion pairs of `B_r ∖ {1}`; a full assignment is a
//! ball cone. Closure is ball-local: `P(g) ∧ P(h) ⇒ P(gh)` whenever `g`,
//! `h`, `gh ∈ B_r`. Unit propagation is exactly forward closure of the
//! positive set, so every propagated literal comes with a closure step and
//! every conflict is an element forced positive together with its inverse.
//!
//! Exclusion results are sound for genuine orders; existence results are
//! only claims about ball cones.

mod certificate;

pub use certificate::{validate_certificate, Certificate, ProofNode, Step};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::Slope;
use crate::orders::{ConeSnapshot, ConvexWitness, Sign};
use crate::presentations::{Ball, GroupBackend};
use crate::word::Word;

#[derive(Debug, Clone)]
pub enum ConeConstraint {
    /// `element` has the given sign.
    Sign { element: Word, sign: Sign },
    /// Peripheral elements of the ball strictly off the line through
    /// `slope` are signed by their side. `side: None` leaves the positive
    /// side open, so both choices are searched.
    PeripheralLine {
        peripheral: String,
        slope: Slope,
        side: Option<i32>,
    },
    /// The subgroup is convex.
    Convex(ConvexWitness),
}

impl ConeConstraint {
    /// `Some(0)` when the constraint has no side, `None` when the side is free.
    pub(crate) fn fixed_side(&self) -> Option<i32> {
        match self {
            ConeConstraint::PeripheralLine { side, .. } => *side,
            _ => Some(0),
        }
    }

    pub fn describe(&self, group: &GroupBackend) -> String {
        match self {
            ConeConstraint::Sign { element, sign } => format!("sign {} {}", group.format(element), sign),
            ConeConstraint::PeripheralLine {
                peripheral,
                slope,
                side,
            } => match side {
                Some(s) => format!("line {peripheral} {slope} side {s:+}"),
                None => format!("line {peripheral} {slope} either side"),
            },
            ConeConstraint::Convex(c) => format!("convex {}", c.name),
        }
    }
}

impl fmt::Display for ConeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeConstraint::Sign { element, sign } => write!(f, "sign {element:?} {sign}"),
            ConeConstraint::PeripheralLine {
                peripheral,
                slope,
                side,
            } => {
                write!(f, "line {peripheral} {slope} {side:?}")
            }
            ConeConstraint::Convex(c) => write!(f, "convex {}", c.name),
        }
    }
}

/// Plane point `(l, m)` of a peripheral element `μ^m λ^l`.
pub fn peripheral_plane_point(group: &GroupBackend, peripheral: &str, w: &Word) -> Result<Option<(i64, i64)>> {
    let p = group
        .peripheral(peripheral)
        .ok_or_else(|| Error::Invalid(format!("unknown peripheral subgroup `{peripheral}`")))?;
    Ok(group.peripheral_coords(p, w)?.map(|(m, l)| (l, m)))
}

/// Literals forced by the constraints, for the given side choices.
pub(crate) fn constraint_axioms(
    group: &GroupBackend,
    constraints: &[ConeConstraint],
    radius: usize,
    sides: &[Option<i32>],
) -> Result<Vec<(Word, Sign)>> {
    let mut out = Vec::new();
    let mut ball: Option<Ball> = None;
    for (c, side) in constraints.iter().zip(sides) {
        match c {
            ConeConstraint::Sign { element, sign } => {
                let nf = group.normal_form(element)?;
                if nf.is_identity() {
                    return Err(Error::IdentityElement);
                }
                out.push((nf, *sign));
            }
            ConeConstraint::PeripheralLine { peripheral, slope, .. } => {
                let side = side.ok_or_else(|| Error::Invalid("line side undecided".to_string()))?;
                let ball = match &ball {
                    Some(b) => b,
                    None => ball.insert(group.ball(radius)?),
                };
                for w in ball.elements().iter().skip(1) {
                    if let Some(v) = peripheral_plane_point(group, peripheral, w)? {
                        if let Some(s) = Sign::from_int((slope.side_of(v) * side) as i64) {
                            out.push((w.clone(), s));
                        }
                    }
                }
            }
            ConeConstraint::Convex(_) => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Maximum number of cones returned.
    pub limit: usize,
    /// Maximum number of search nodes before giving up.
    pub node_cap: usize,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            limit: 10_000,
            node_cap: 2_000_000,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Enumeration {
        snapshots: Vec<ConeSnapshot>,
        complete: bool,
    },
    Unsat(Certificate),
}

impl SearchOutcome {
    pub fn count(&self) -> Option<usize> {
        match self {
            SearchOutcome::Enumeration {
                snapshots,
                complete: true,
            } => Some(snapshots.len()),
            SearchOutcome::Unsat(_) => Some(0),
            _ => None,
        }
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SearchOutcome::Unsat(_))
    }
}

const NONE: u32 = u32::MAX;

struct Tables {
    n: usize,
    inv: Vec<u32>,
    prod: Vec<u32>,
    decision_order: Vec<u32>,
    /// `(constraint index, membership, nontrivial members)`
    convex: Vec<(usize, Vec<bool>, Vec<u32>)>,
}

impl Tables {
    fn build(group: &GroupBackend, ball: &Ball, constraints: &[ConeConstraint]) -> Result<Tables> {
        let n = ball.len();
        let index: HashMap<&Word, u32> = ball.elements().iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
        let elems = ball.elements();
        let inv = elems
            .iter()
            .map(|w| Ok(index.get(&group.inverse(w)?).copied().unwrap_or(NONE)))
            .collect::<Result<Vec<u32>>>()?;
        let rows: Vec<Vec<u32>> = elems
            .par_iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| Ok(index.get(&group.mul(a, b)?).copied().unwrap_or(NONE)))
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?;
        let prod = rows.into_iter().flatten().collect();
        let mut decision_order: Vec<u32> = (1..n as u32).filter(|&i| inv[i as usize] == i).collect();
        decision_order.extend((1..n as u32).filter(|&i| inv[i as usize] != i));
        let mut convex = Vec::new();
        for (ci, c) in constraints.iter().enumerate() {
            if let ConeConstraint::Convex(wit) = c {
                let member = elems.iter().map(|w| wit.contains(w)).collect::<Result<Vec<bool>>>()?;
                let members = (1..n as u32).filter(|&i| member[i as usize]).collect();
                convex.push((ci, member, members));
            }
        }
        Ok(Tables {
            n,
            inv,
            prod,
            decision_order,
            convex,
        })
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.prod[a as usize * self.n + b as usize]
    }
}

#[derive(Debug, Clone, Copy)]
enum Reason {
    None,
    Decision(u32),
    Axiom,
    Product(u32, u32),
    Convex {
        constraint: u32,
        g: u32,
        c: u32,
        right: bool,
    },
}

#[derive(Clone)]
struct State {
    sign: Vec<i8>,
    reason: Vec<Reason>,
    stamp: Vec<u32>,
    positives: Vec<u32>,
    clock: u32,
    /// The clashing derivation of the conflict element.
    clash: Option<(u32, Reason)>,
}

impl State {
    fn new(n: usize) -> Self {
        let mut sign = vec![0i8; n];
        sign[0] = -1;
        State {
            sign,
            reason: vec![Reason::None; n],
            stamp: vec![0; n],
            positives: Vec::new(),
            clock: 0,
            clash: None,
        }
    }

    /// Marks `x` positive; `Err(x)` if that contradicts the current signs.
    fn assign(&mut self, t: &Tables, x: u32, why: Reason, queue: &mut Vec<u32>) -> std::result::Result<(), u32> {
        let xi = x as usize;
        match self.sign[xi] {
            1 => Ok(()),
            -1 => {
                self.clash = Some((x, why));
                Err(x)
            }
            _ => {
                self.clock += 1;
                self.sign[xi] = 1;
                self.reason[xi] = why;
                self.stamp[xi] = self.clock;
                let inv = t.inv[xi];
                if inv == x {
                    self.clash = Some((x, why));
                    return Err(x);
                }
                if inv != NONE {
                    self.sign[inv as usize] = -1;
                }
                self.positives.push(x);
                queue.push(x);
                Ok(())
            }
        }
    }

    fn propagate(&mut self, t: &Tables, queue: &mut Vec<u32>) -> std::result::Result<(), u32> {
        let mut head = 0;
        while head < queue.len() {
            let a = queue[head];
            head += 1;
            let mut i = 0;
            while i < self.positives.len() {
                let b = self.positives[i];
                i += 1;
                for (l, r) in [(a, b), (b, a)] {
                    let p = t.mul(l, r);
                    if p != NONE {
                        self.assign(t, p, Reason::Product(l, r), queue)?;
                    }
                }
            }
            for (ci, member, members) in &t.convex {
                if member[a as usize] {
                    continue;
                }
                for &c in members {
                    for right in [true, false] {
                        let p = if right { t.mul(a, c) } else { t.mul(c, a) };
                        if p != NONE {
                            let why = Reason::Convex {
                                constraint: *ci as u32,
                                g: a,
                                c,
                                right,
                            };
                            self.assign(t, p, why, queue)?;
                        }
                    }
                }
            }
        }
        queue.clear();
        Ok(())
    }

    /// Leaf proof for the conflict at `x`, and the decision depths it uses.
    fn leaf(&self, t: &Tables, ball: &Ball, x: u32) -> (ProofNode, BTreeSet<u32>) {
        let (_, clash) = self.clash.expect("conflict recorded");
        let mut used = BTreeSet::new();
        let mut needed: HashSet<u32> = HashSet::new();
        let mut stack: Vec<u32> = Vec::new();
        let visit = |r: Reason, stack: &mut Vec<u32>, used: &mut BTreeSet<u32>| match r {
            Reason::Product(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            Reason::Convex { g, .. } => stack.push(g),
            Reason::Decision(d) => {
                used.insert(d);
            }
            Reason::Axiom | Reason::None => {}
        };
        // fresh: x is newly derived while x⁻¹ is positive (or x = 1);
        // otherwise x is self-inverse and already positive
        let fresh = self.sign[x as usize] == -1;
        if fresh {
            visit(clash, &mut stack, &mut used);
            if x != 0 {
                stack.push(t.inv[x as usize]);
            }
        } else {
            stack.push(x);
        }
        while let Some(e) = stack.pop() {
            if needed.insert(e) {
                visit(self.reason[e as usize], &mut stack, &mut used);
            }
        }
        let mut order: Vec<u32> = needed.into_iter().collect();
        order.sort_by_key(|&e| self.stamp[e as usize]);
        let w = |i: u32| ball.element(i as usize).clone();
        let to_step = |r: Reason| match r {
            Reason::Product(a, b) => Some(Step::Product { a: w(a), b: w(b) }),
            Reason::Convex {
                constraint,
                g,
                c,
                right,
            } => Some(Step::Convex {
                constraint: constraint as usize,
                g: w(g),
                c: w(c),
                right,
            }),
            _ => None,
        };
        let mut steps: Vec<Step> = order.iter().filter_map(|&e| to_step(self.reason[e as usize])).collect();
        if fresh {
            steps.extend(to_step(clash));
        }
        (ProofNode::Leaf { steps, conflict: w(x) }, used)
    }
}

/// Result of a subtree: cones found, or a refutation when there are none.
struct Sub {
    cones: Vec<Vec<i8>>,
    proof: Option<(ProofNode, BTreeSet<u32>)>,
    aborted: bool,
}

impl Sub {
    fn cones(cones: Vec<Vec<i8>>) -> Sub {
        Sub {
            cones,
            proof: None,
            aborted: false,
        }
    }

    fn aborted() -> Sub {
        Sub {
            cones: Vec::new(),
            proof: None,
            aborted: true,
        }
    }
}

struct Solver<'a> {
    t: &'a Tables,
    ball: &'a Ball,
    nodes: AtomicUsize,
    cap: usize,
}

impl Solver<'_> {
    fn branch(&self, state: &State, lit: u32, depth: u32, want: usize, par: u32) -> Sub {
        let mut s = state.clone();
        let mut queue = Vec::new();
        let r = s
            .assign(self.t, lit, Reason::Decision(depth), &mut queue)
            .and_then(|_| s.propagate(self.t, &mut queue));
        match r {
            Err(x) => Sub {
                cones: Vec::new(),
                proof: Some(s.leaf(self.t, self.ball, x)),
                aborted: false,
            },
            Ok(()) => self.solve(s, depth + 1, want, par),
        }
    }

    /// Depth-first, positive branch first. `want` is one more than the
    /// number of cones the caller can use, so hitting it means "more exist".
    fn solve(&self, state: State, depth: u32, want: usize, par: u32) -> Sub {
        if self.nodes.fetch_add(1, AtomicOrdering::Relaxed) >= self.cap {
            return Sub::aborted();
        }
        let Some(&e) = self.t.decision_order.iter().find(|&&e| state.sign[e as usize] == 0) else {
            return Sub::cones(vec![state.sign]);
        };
        let neg_lit = self.t.inv[e as usize];
        let (pos, neg) = if par > 0 {
            let (p, n) = rayon::join(
                || self.branch(&state, e, depth, want, par - 1),
                || self.branch(&state, neg_lit, depth, want, par - 1),
            );
            (p, Some(n))
        } else {
            (self.branch(&state, e, depth, want, 0), None)
        };
        if pos.aborted {
            return pos;
        }
        if let Some((_, used)) = &pos.proof {
            if !used.contains(&depth) {
                return pos;
            }
        }
        if pos.cones.len() >= want {
            return pos;
        }
        let neg = neg.unwrap_or_else(|| self.branch(&state, neg_lit, depth, want - pos.cones.len(), 0));
        if let Some((_, used)) = &neg.proof {
            if !used.contains(&depth) && pos.cones.is_empty() {
                return neg;
            }
        }
        merge_split(
            pos,
            neg,
            want,
            |p, n| ProofNode::Split {
                element: self.ball.element(e as usize).clone(),
                pos: Box::new(p),
                neg: Box::new(n),
            },
            Some(depth),
        )
    }
}

fn merge_split(
    pos: Sub,
    neg: Sub,
    want: usize,
    node: impl FnOnce(ProofNode, ProofNode) -> ProofNode,
    depth: Option<u32>,
) -> Sub {
    match (pos.proof, neg.proof) {
        (Some((p, mut up)), Some((n, un))) if !neg.aborted => {
            up.extend(un);
            if let Some(d) = depth {
                up.remove(&d);
            }
            Sub {
                cones: Vec::new(),
                proof: Some((node(p, n), up)),
                aborted: false,
            }
        }
        _ => {
            let mut cones = pos.cones;
            for c in neg.cones {
                if cones.len() >= want {
                    break;
                }
                if !cones.contains(&c) {
                    cones.push(c);
                }
            }
            Sub {
                cones,
                proof: None,
                aborted: neg.aborted,
            }
        }
    }
}

fn par_depth(jobs: usize) -> u32 {
    if jobs <= 1 {
        0
    } else {
        (usize::BITS - (jobs - 1).leading_zeros()) + 2
    }
}

/// Enumerates ball cones on `B_r` satisfying the constraints.
///
/// Results come in depth-first order (positive branch first, side `+`
/// first) and are identical for every `jobs` value.
pub fn search(
    group: &GroupBackend,
    r: usize,
    constraints: &[ConeConstraint],
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let ball = group.ball(r)?;
    let run = || search_on(group, &ball, constraints, opts);
    if opts.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?
            .install(run)
    } else {
        run()
    }
}

fn search_on(
    group: &GroupBackend,
    ball: &Ball,
    constraints: &[ConeConstraint],
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let t = Tables::build(group, ball, constraints)?;
    let solver = Solver {
        t: &t,
        ball,
        nodes: AtomicUsize::new(0),
        cap: opts.node_cap,
    };
    let want = opts.limit.saturating_add(1);
    let mut sides: Vec<Option<i32>> = constraints.iter().map(|c| c.fixed_side()).collect();
    let sub = by_side(
        group,
        ball,
        constraints,
        &solver,
        &mut sides,
        want,
        par_depth(opts.jobs),
    )?;
    if let Some((root, _)) = sub.proof {
        return Ok(SearchOutcome::Unsat(Certificate {
            radius: ball.radius,
            root,
        }));
    }
    let complete = !sub.aborted && sub.cones.len() < want;
    let snapshots = sub
        .cones
        .iter()
        .take(opts.limit)
        .map(|signs| {
            let s: Vec<Sign> = signs[1..]
                .iter()
                .map(|&x| if x > 0 { Sign::Pos } else { Sign::Neg })
                .collect();
            ConeSnapshot::from_signs(ball, &s)
        })
        .collect();
    Ok(SearchOutcome::Enumeration { snapshots, complete })
}

fn by_side(
    group: &GroupBackend,
    ball: &Ball,
    constraints: &[ConeConstraint],
    solver: &Solver,
    sides: &mut Vec<Option<i32>>,
    want: usize,
    par: u32,
) -> Result<Sub> {
    if let Some(i) = sides.iter().position(|s| s.is_none()) {
        sides[i] = Some(1);
        let pos = by_side(group, ball, constraints, solver, sides, want, par)?;
        sides[i] = Some(-1);
        let neg = if pos.aborted {
            Sub::aborted()
        } else {
            by_side(group, ball, constraints, solver, sides, want, par)?
        };
        sides[i] = None;
        if pos.aborted {
            return Ok(pos);
        }
        return Ok(merge_split(
            pos,
            neg,
            want,
            |p, n| ProofNode::SideSplit {
                constraint: i,
                pos: Box::new(p),
                neg: Box::new(n),
            },
            None,
        ));
    }
    let t = solver.t;
    let index: HashMap<&Word, u32> = ball.elements().iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
    let mut state = State::new(t.n);
    let mut queue = Vec::new();
    let mut outcome = Ok(());
    for (w, s) in constraint_axioms(group, constraints, ball.radius, sides)? {
        let lit = match s {
            Sign::Pos => w,
            Sign::Neg => group.inverse(&w)?,
        };
        // axioms outside the ball cannot interact with ball closure
        let Some(&i) = index.get(&lit) else { continue };
        outcome = state.assign(t, i, Reason::Axiom, &mut queue);
        if outcome.is_err() {
            break;
        }
    }
    let outcome = outcome.and_then(|_| state.propagate(t, &mut queue));
    Ok(match outcome {
        Err(x) => Sub {
            cones: Vec::new(),
            proof: Some(state.leaf(t, ball, x)),
            aborted: false,
        },
        Ok(()) => solver.solve(state, 0, want, par),
    })
}

/// Number of ball cones, or `None` when the node cap was hit.
pub fn count_classes(
    group: &GroupBackend,
    r: usize,
    constraints: &[ConeConstraint],
    opts: &SearchOptions,
) -> Result<Option<usize>> {
    let opts = SearchOptions {
        limit: usize::MAX - 1,
        ..*opts
    };
    Ok(search(group, r, constraints, &opts)?.count())
}

/// Searches unconstrained balls of increasing radius for a refutation.
/// A certificate proves the group has no left-order; `None` proves nothing.
pub fn certify_nonorderable(group: &GroupBackend, r_max: usize, opts: &SearchOptions) -> Result<Option<Certificate>> {
    let opts = SearchOptions { limit: 1, ..*opts };
    for r in 1..=r_max {
        match search(group, r, &[], &opts) {
            Ok(SearchOutcome::Unsat(c)) => return Ok(Some(c)),
            Ok(_) => {}
            Err(Error::ResourceLimit(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}
