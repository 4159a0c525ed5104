//! Unsat certificates and their replay.
//!
//! A certificate is a case split tree. Each leaf lists closure steps that
//! derive, from the assumptions on its path, an element `x` with both `x`
//! and `x⁻¹` positive. Replay recomputes products with the group's word
//! problem and the constraint axioms from scratch; it shares no tables with
//! the solver.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orders::Sign;
use crate::presentations::GroupBackend;
use crate::word::Word;

use super::{constraint_axioms, ConeConstraint};

/// One derivation: the product of two positive elements is positive, or
/// an element outside a convex subgroup stays positive after multiplying
/// by a subgroup element on either side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Product {
        a: Word,
        b: Word,
    },
    Convex {
        constraint: usize,
        g: Word,
        c: Word,
        right: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProofNode {
    /// Either side of a side-free line constraint.
    SideSplit {
        constraint: usize,
        pos: Box<ProofNode>,
        neg: Box<ProofNode>,
    },
    /// `element` positive, or `element⁻¹` positive.
    Split {
        element: Word,
        pos: Box<ProofNode>,
        neg: Box<ProofNode>,
    },
    Leaf {
        steps: Vec<Step>,
        conflict: Word,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub radius: usize,
    pub root: ProofNode,
}

impl ProofNode {
    pub fn leaves(&self) -> usize {
        match self {
            ProofNode::Leaf { .. } => 1,
            ProofNode::Split { pos, neg, .. } | ProofNode::SideSplit { pos, neg, .. } => pos.leaves() + neg.leaves(),
        }
    }
}

impl Certificate {
    /// Numbered assignments and closure steps, one per line.
    pub fn to_text(&self, group: &GroupBackend) -> String {
        let mut out = format!("# unsat certificate, radius {}\n", self.radius);
        let mut n = 0usize;
        write_node(&self.root, group, 0, &mut n, &mut out);
        out
    }
}

fn write_node(node: &ProofNode, g: &GroupBackend, depth: usize, n: &mut usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let line = |n: &mut usize, out: &mut String, text: String| {
        *n += 1;
        out.push_str(&format!("{n:>4}. {pad}{text}\n"));
    };
    match node {
        ProofNode::SideSplit { constraint, pos, neg } => {
            line(n, out, format!("case constraint #{constraint} side +"));
            write_node(pos, g, depth + 1, n, out);
            line(n, out, format!("case constraint #{constraint} side -"));
            write_node(neg, g, depth + 1, n, out);
        }
        ProofNode::Split { element, pos, neg } => {
            let e = g.format(element);
            line(n, out, format!("assume {e} > 1"));
            write_node(pos, g, depth + 1, n, out);
            line(n, out, format!("assume {e} < 1"));
            write_node(neg, g, depth + 1, n, out);
        }
        ProofNode::Leaf { steps, conflict } => {
            for s in steps {
                let text = match s {
                    Step::Product { a, b } => {
                        format!("{} > 1 from ({}) ({})", g.format(&a.mul(b)), g.format(a), g.format(b))
                    }
                    Step::Convex {
                        constraint,
                        g: x,
                        c,
                        right,
                    } => {
                        let (l, r) = if *right { (x, c) } else { (c, x) };
                        format!(
                            "{} > 1 by convexity #{constraint} from ({}) ({})",
                            g.format(&l.mul(r)),
                            g.format(l),
                            g.format(r)
                        )
                    }
                };
                line(n, out, text);
            }
            let c = g.format(conflict);
            line(n, out, format!("contradiction: {c} > 1 and ({c})^-1 > 1"));
        }
    }
}

/// Replays a certificate. `Ok(())` means every leaf derives its conflict
/// and every split is exhaustive, so no left-order satisfies the constraints.
pub fn validate_certificate(group: &GroupBackend, constraints: &[ConeConstraint], cert: &Certificate) -> Result<()> {
    let sides: Vec<Option<i32>> = constraints.iter().map(|c| c.fixed_side()).collect();
    replay(
        group,
        constraints,
        cert.radius,
        &cert.root,
        &mut sides.clone(),
        &mut Vec::new(),
    )
}

fn replay(
    group: &GroupBackend,
    constraints: &[ConeConstraint],
    radius: usize,
    node: &ProofNode,
    sides: &mut Vec<Option<i32>>,
    assumed: &mut Vec<Word>,
) -> Result<()> {
    let bad = |m: String| Err(Error::Invalid(format!("certificate rejected: {m}")));
    match node {
        ProofNode::SideSplit { constraint, pos, neg } => {
            if !matches!(sides.get(*constraint), Some(None)) {
                return bad(format!("constraint #{constraint} has no free side"));
            }
            for (s, branch) in [(1, pos), (-1, neg)] {
                sides[*constraint] = Some(s);
                replay(group, constraints, radius, branch, sides, assumed)?;
            }
            sides[*constraint] = None;
            Ok(())
        }
        ProofNode::Split { element, pos, neg } => {
            let e = group.normal_form(element)?;
            if e.is_identity() {
                return bad("split on the identity".to_string());
            }
            for (w, branch) in [(e.clone(), pos), (group.inverse(&e)?, neg)] {
                assumed.push(w);
                let r = replay(group, constraints, radius, branch, sides, assumed);
                assumed.pop();
                r?;
            }
            Ok(())
        }
        ProofNode::Leaf { steps, conflict } => {
            if sides.iter().any(|s| s.is_none()) {
                return bad("leaf reached with an undecided line side".to_string());
            }
            let mut positive: HashSet<Word> = assumed.iter().cloned().collect();
            for (w, s) in constraint_axioms(group, constraints, radius, sides)? {
                positive.insert(match s {
                    Sign::Pos => w,
                    Sign::Neg => group.inverse(&w)?,
                });
            }
            for step in steps {
                let derived = match step {
                    Step::Product { a, b } => {
                        let (a, b) = (group.normal_form(a)?, group.normal_form(b)?);
                        if !positive.contains(&a) || !positive.contains(&b) {
                            return bad(format!(
                                "product of non-derived {} and {}",
                                group.format(&a),
                                group.format(&b)
                            ));
                        }
                        group.mul(&a, &b)?
                    }
                    Step::Convex {
                        constraint,
                        g,
                        c,
                        right,
                    } => {
                        let ConeConstraint::Convex(wit) = constraints.get(*constraint).ok_or_else(|| {
                            Error::Invalid(format!("certificate rejected: no constraint #{constraint}"))
                        })?
                        else {
                            return bad(format!("constraint #{constraint} is not a convexity constraint"));
                        };
                        let (g, c) = (group.normal_form(g)?, group.normal_form(c)?);
                        if !positive.contains(&g) || wit.contains(&g)? || !wit.contains(&c)? {
                            return bad(format!(
                                "convexity step on {} and {}",
                                group.format(&g),
                                group.format(&c)
                            ));
                        }
                        if *right {
                            group.mul(&g, &c)?
                        } else {
                            group.mul(&c, &g)?
                        }
                    }
                };
                positive.insert(derived);
            }
            let x = group.normal_form(conflict)?;
            let both = positive.contains(&x) && positive.contains(&group.inverse(&x)?);
            if both || (x.is_identity() && positive.contains(&x)) {
                Ok(())
            } else {
                bad(format!("conflict at {} is not derived", group.format(&x)))
            }
        }
    }
}
