//! Explicit orders on the supported group families.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{line_order, line_sign, Slope};
use crate::presentations::{Family, GroupBackend};
use crate::word::Word;

use super::magnus::magnus_sign;
use super::{lex_extend, Epimorphism, OrderOracle, Provenance, Sign};

fn sign_label(pos: bool) -> char {
    if pos {
        '+'
    } else {
        '-'
    }
}

/// An order on a group whose normal forms are powers of one generator:
/// `ℤ`, or `F₁`. `positive` chooses the standard order or its opposite.
pub fn z_order(group: Arc<GroupBackend>, positive: bool) -> Result<OrderOracle> {
    if group.rank() != 1 || !matches!(group.family, Family::Zn(1) | Family::Free(1)) {
        return Err(Error::Unsupported(format!("ℤ order on {}", group.family.tag())));
    }
    let base = if positive { Sign::Pos } else { Sign::Neg };
    Ok(OrderOracle::from_fn(
        group,
        Provenance::named(format!("Z({})", sign_label(positive))),
        move |w| {
            let e: i64 = w.syllables().iter().map(|s| s.1).sum();
            Ok(Sign::from_int(e).expect("nontrivial").times(base))
        },
    ))
}

fn klein_gens(group: &GroupBackend) -> Result<(usize, usize)> {
    match group.family {
        Family::KleinBottle { x, y } => Ok((x, y)),
        _ => Err(Error::Unsupported(format!(
            "Klein-bottle order on {}",
            group.family.tag()
        ))),
    }
}

/// Lex order on `x^a y^b`: `a` decides, then `b`. The name lists the
/// generators that are positive.
pub fn klein_order(group: Arc<GroupBackend>, x_pos: bool, y_pos: bool) -> Result<OrderOracle> {
    let (x, _) = klein_gens(&group)?;
    let mut name = Vec::new();
    if x_pos {
        name.push("x");
    }
    if y_pos {
        name.push("y");
    }
    let name = if name.is_empty() {
        "o".to_string()
    } else {
        format!("o({})", name.join(","))
    };
    let (sx, sy) = (
        if x_pos { Sign::Pos } else { Sign::Neg },
        if y_pos { Sign::Pos } else { Sign::Neg },
    );
    Ok(OrderOracle::from_fn(group, Provenance::named(name), move |w| {
        let (a, b) = GroupBackend::klein_coords(x, w);
        Ok(match Sign::from_int(a) {
            Some(s) => s.times(sx),
            None => Sign::from_int(b).expect("nontrivial").times(sy),
        })
    }))
}

/// The four Klein-bottle orders in the order `o, o(x), o(y), o(x,y)`.
pub fn klein_orders(group: Arc<GroupBackend>) -> Result<Vec<OrderOracle>> {
    [(false, false), (true, false), (false, true), (true, true)]
        .into_iter()
        .map(|(a, b)| klein_order(group.clone(), a, b))
        .collect()
}

/// The homomorphism onto `ℤ = ⟨a⟩` whose kernel is used for lex orders:
/// `u ↦ q, v ↦ p` for torus knots, `x ↦ 1, y ↦ 0` for the Klein bottle.
pub fn abelianisation_to_z(group: Arc<GroupBackend>) -> Result<Epimorphism> {
    let images = match group.family {
        Family::TorusKnot { u, v, p, q } => {
            let mut im = vec![Word::identity(); 2];
            im[u] = Word::power_of(0, q);
            im[v] = Word::power_of(0, p);
            im
        }
        Family::KleinBottle { x, y } => {
            let mut im = vec![Word::identity(); 2];
            im[x] = Word::gen(0);
            im[y] = Word::identity();
            im
        }
        Family::Zn(1) | Family::Free(1) => vec![Word::gen(0)],
        _ => {
            return Err(Error::Unsupported(format!(
                "canonical map to ℤ for {}",
                group.family.tag()
            )))
        }
    };
    Epimorphism::new("ab", group, Arc::new(GroupBackend::zn(1)), images)
}

/// Free-basis coordinates of a kernel element of a torus-knot group.
///
/// The kernel of `u ↦ q, v ↦ p` meets the centre trivially, so it embeds in
/// `ℤ_p * ℤ_q` (kill `z`), inside the kernel of `ℤ_p * ℤ_q → ℤ_p × ℤ_q`.
/// With transversal `a^i b^j`, reading `a` in state `(i, j)`, `j ≥ 1`,
/// contributes the generator `x_{i,j}`, and `x_{p-1,j}` is eliminated as
/// `(x_{0,j} ⋯ x_{p-2,j})⁻¹`. The remaining `(p-1)(q-1)` generators are free.
fn torus_kernel_coords(group: &GroupBackend, w: &Word) -> Result<Word> {
    let shape = group
        .torus_shape()
        .ok_or_else(|| Error::Unsupported(format!("torus kernel on {}", group.family.tag())))?;
    let (p, q) = (shape.p, shape.q);
    let el = shape.element_of(w);
    let index = |i: i64, j: i64| ((j - 1) * (p - 1) + i) as usize;
    let (mut i, mut j) = (0i64, 0i64);
    let mut out = Word::identity();
    for &(is_u, e) in &el.syllables {
        for _ in 0..e {
            if is_u {
                if j >= 1 {
                    if i < p - 1 {
                        out.push(index(i, j), 1);
                    } else {
                        for k in (0..p - 1).rev() {
                            out.push(index(k, j), -1);
                        }
                    }
                }
                i = (i + 1) % p;
            } else {
                j = (j + 1) % q;
            }
        }
    }
    if (i, j) != (0, 0) || shape.abelian(w) != 0 {
        return Err(Error::Invalid(format!(
            "{} is not in the kernel of the map to ℤ",
            group.format(w)
        )));
    }
    Ok(out)
}

/// Magnus order (or its opposite) on the kernel of the canonical map to ℤ.
///
/// Only kernel elements may be queried; anything else is an error.
pub fn torus_kernel_order(group: Arc<GroupBackend>, positive: bool) -> Result<OrderOracle> {
    group
        .torus_shape()
        .ok_or_else(|| Error::Unsupported(format!("torus kernel on {}", group.family.tag())))?;
    let g = group.clone();
    let base = if positive { Sign::Pos } else { Sign::Neg };
    Ok(OrderOracle::from_fn(
        group,
        Provenance::named(format!("magnus({})", sign_label(positive))),
        move |w| {
            let f = torus_kernel_coords(&g, w)?;
            magnus_sign(&f).map(|s| s.times(base)).ok_or(Error::IdentityElement)
        },
    ))
}

/// Lex order from the kernel Magnus order and the order on ℤ.
pub fn torus_lex_order(group: Arc<GroupBackend>, kernel_pos: bool, quotient_pos: bool) -> Result<OrderOracle> {
    let proj = abelianisation_to_z(group.clone())?;
    let k = torus_kernel_order(group, kernel_pos)?;
    let q = z_order(proj.target.clone(), quotient_pos)?;
    lex_extend(&k, &q, &proj)
}

/// Klein-bottle kernel order: sign of the `y`-exponent, for elements of `⟨y⟩`.
pub fn cyclic_kernel_order(group: Arc<GroupBackend>, positive: bool) -> Result<OrderOracle> {
    let (x, _) = klein_gens(&group)?;
    let base = if positive { Sign::Pos } else { Sign::Neg };
    let g = group.clone();
    Ok(OrderOracle::from_fn(
        group,
        Provenance::named(format!("<y>({})", sign_label(positive))),
        move |w| {
            let (a, b) = GroupBackend::klein_coords(x, w);
            if a != 0 {
                return Err(Error::Invalid(format!("{} is not in <y>", g.format(w))));
            }
            Ok(Sign::from_int(b).expect("nontrivial").times(base))
        },
    ))
}

/// Lex order on ℤ² ⋊_A ℤ: the `t`-exponent decides, then the line order of
/// `slope` (side `+1`, axis `+1`) on the fibre coordinates `(a, b)`.
pub fn torus_bundle_lex_order(group: Arc<GroupBackend>, slope: Slope) -> Result<OrderOracle> {
    let Family::TorusBundle { t, .. } = group.family else {
        return Err(Error::Unsupported(format!(
            "torus-bundle order on {}",
            group.family.tag()
        )));
    };
    let quotient = Arc::new(GroupBackend::zn(1));
    let mut images = vec![Word::identity(); 3];
    images[t] = Word::gen(0);
    let proj = Epimorphism::new("t-exponent", group.clone(), quotient.clone(), images)?;
    let g = group.clone();
    let fibre = OrderOracle::from_fn(group, Provenance::named(format!("fibre({slope})")), move |w| {
        let (v, k) = g.bundle_coords(w).expect("torus bundle");
        if k != 0 {
            return Err(Error::Invalid(format!("{} is not in the fibre", g.format(w))));
        }
        line_sign(&slope, 1, 1, (v[0], v[1])).ok_or(Error::IdentityElement)
    });
    lex_extend(&fibre, &z_order(quotient, true)?, &proj)
}

/// Built-in orders by name: `o`, `o(x)`, `o(y)`, `o(x,y)` on the Klein bottle;
/// `lex±±` (kernel sign, then quotient sign) on torus knots; `z+`, `z-` on ℤ;
/// `line:<slope>[:<side>[:<axis>]]` on ℤ²; `bundle:<slope>` on torus bundles.
pub fn named_order(group: Arc<GroupBackend>, spec: &str) -> Result<OrderOracle> {
    let bad = || Error::Invalid(format!("unknown order `{spec}` for {}", group.family.tag()));
    let pm = |c: char| match c {
        '+' => Ok(true),
        '-' => Ok(false),
        _ => Err(bad()),
    };
    if let Some(rest) = spec.strip_prefix("line:") {
        let mut parts = rest.split(':');
        let slope: Slope = parts.next().unwrap_or("").parse()?;
        let mut num = || -> Result<i32> {
            match parts.next() {
                None => Ok(1),
                Some(x) => x.trim_start_matches('+').parse::<i32>().map_err(|_| bad()),
            }
        };
        let (side, axis) = (num()?, num()?);
        return line_order(group, slope, side, axis);
    }
    if let Some(rest) = spec.strip_prefix("bundle:") {
        return torus_bundle_lex_order(group, rest.parse()?);
    }
    match (&group.family, spec) {
        (Family::KleinBottle { .. }, _) => klein_orders(group.clone())?
            .into_iter()
            .find(|o| o.provenance.describe() == spec)
            .ok_or_else(bad),
        (Family::TorusKnot { .. }, s) if s.len() == 5 && s.starts_with("lex") => {
            let c: Vec<char> = s[3..].chars().collect();
            torus_lex_order(group.clone(), pm(c[0])?, pm(c[1])?)
        }
        (Family::Zn(1) | Family::Free(1), "z+" | "z-") => z_order(group.clone(), spec == "z+"),
        _ => Err(bad()),
    }
}

/// Names accepted by [`named_order`] for this group (line orders excepted).
pub fn order_names(group: &GroupBackend) -> Vec<String> {
    let names: &[&str] = match group.family {
        Family::KleinBottle { .. } => &["o", "o(x)", "o(y)", "o(x,y)"],
        Family::TorusKnot { .. } => &["lex++", "lex+-", "lex-+", "lex--"],
        Family::Zn(1) | Family::Free(1) => &["z+", "z-"],
        Family::Zn(2) => &["line:<slope>[:<side>[:<axis>]]"],
        Family::TorusBundle { .. } => &["bundle:<slope>"],
        _ => &[],
    };
    names.iter().map(|s| s.to_string()).collect()
}
