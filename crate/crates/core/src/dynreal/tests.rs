use super::*;
use crate::lattice::{line_order, Slope};
use crate::orders::{klein_order, snapshot_on, z_order};

fn q(n: i64) -> BigRational {
    int(n)
}

#[test]
fn integers_act_by_translation() {
    let z = Arc::new(GroupBackend::zn(1));
    let a = build_realisation(&z_order(z.clone(), true).unwrap(), 3).unwrap();
    assert_eq!(a.generator(0), &PLHomeo::translation(q(1)));
    assert_eq!(a.evaluate(&Word::power_of(0, 5), &q(0)), q(5));
    assert_eq!(
        a.fixed_points(&Word::gen(0)).verdict,
        FixedPointVerdict::FixedPointFreeOnWindow
    );
}

#[test]
fn inverse_law() {
    let g = Arc::new(GroupBackend::klein_bottle());
    let a = build_realisation(&klein_order(g.clone(), true, true).unwrap(), 3).unwrap();
    let w = g.parse_word("x y^-1 x").unwrap();
    for n in -7..7 {
        let x = BigRational::new(n.into(), 3.into());
        assert_eq!(a.evaluate(&w.mul(&w.inverse()), &x), x);
        assert_eq!(a.rho(&w).eval(&x), a.evaluate(&w, &x));
    }
}

fn orbit_law_and_recovery(o: &OrderOracle, r: usize) {
    let a = build_realisation(o, r).unwrap();
    let g = o.group();
    let ball = g.ball(r - 1).unwrap();
    for x in ball.elements() {
        for h in ball.elements() {
            let th = q(a.t(h).unwrap().unwrap());
            let xh = g.mul(x, h).unwrap();
            assert_eq!(a.evaluate(x, &th), q(a.t(&xh).unwrap().unwrap()));
        }
        if !x.is_identity() {
            let d = a.evaluate(x, &q(0));
            let s = if d > q(0) { Sign::Pos } else { Sign::Neg };
            assert_eq!(s, o.sign_of(x).unwrap());
        }
    }
}

#[test]
fn realisation_law_on_fixtures() {
    let z2 = Arc::new(GroupBackend::zn(2));
    orbit_law_and_recovery(
        &line_order(z2.clone(), Slope::rational(0, 1).unwrap(), 1, 1).unwrap(),
        3,
    );
    orbit_law_and_recovery(&line_order(z2, Slope::sqrt(2).unwrap(), -1, 1).unwrap(), 3);
    let k = Arc::new(GroupBackend::klein_bottle());
    for (x, y) in [(true, true), (false, true)] {
        orbit_law_and_recovery(&klein_order(k.clone(), x, y).unwrap(), 3);
    }
}

#[test]
fn vertical_generator_clears_the_axis_block() {
    let g = Arc::new(GroupBackend::zn(2));
    let o = line_order(g.clone(), Slope::rational(0, 1).unwrap(), 1, 1).unwrap();
    let a = build_realisation(&o, 2).unwrap();
    let b = Word::gen(1);
    let axis_top = a
        .table()
        .iter()
        .filter(|w| w.syllables().iter().all(|s| s.0 == 0))
        .map(|w| a.t(w).unwrap().unwrap())
        .max()
        .unwrap();
    // points of B_1 on or above the axis
    for h in g
        .ball(1)
        .unwrap()
        .elements()
        .iter()
        .filter(|w| w.syllables().iter().all(|s| s.0 == 0 || s.1 > 0))
    {
        let moved = a.evaluate(&b, &q(a.t(h).unwrap().unwrap()));
        assert!(moved > q(axis_top));
    }
}

#[test]
fn klein_table_lookup() {
    let g = Arc::new(GroupBackend::klein_bottle());
    let a = build_realisation(&klein_order(g.clone(), true, true).unwrap(), 3).unwrap();
    let x = g.parse_word("x").unwrap();
    let y = g.parse_word("y").unwrap();
    let ty = q(a.t(&y).unwrap().unwrap());
    assert_eq!(a.evaluate(&x, &ty), q(a.t(&x.mul(&y)).unwrap().unwrap()));
}

#[test]
fn klein_fixed_point_verdicts() {
    let g = Arc::new(GroupBackend::klein_bottle());
    let o = klein_order(g.clone(), true, true).unwrap();
    let x2 = g.parse_word("x^2").unwrap();
    let y = g.parse_word("y").unwrap();
    for r in 3..=4 {
        let a = build_realisation(&o, r).unwrap();
        assert_eq!(
            a.fixed_points(&x2).verdict,
            FixedPointVerdict::FixedPointFreeOnWindow,
            "r={r}"
        );
    }
    let a = build_realisation(&o, 4).unwrap();
    let rep = a.fixed_points(&y);
    assert_eq!(rep.verdict, FixedPointVerdict::HasFixedPoints);
    // fixed points of y lie strictly between consecutive x-blocks
    let tx = q(a.t(&g.parse_word("x").unwrap()).unwrap().unwrap());
    assert!(rep.intervals.iter().any(|(s, e)| s > &q(0) && e < &tx));
}

#[test]
fn orders_at_orbit_points_are_conjugates() {
    let g = Arc::new(GroupBackend::klein_bottle());
    let o = klein_order(g.clone(), true, false).unwrap();
    let r = 4;
    let a = build_realisation(&o, r).unwrap();
    let inner = g.ball(r - 2).unwrap();
    let at0 = a.order_at_point(q(0), None);
    assert_eq!(snapshot_on(&at0, &inner).unwrap(), snapshot_on(&o, &inner).unwrap());
    for h in inner.elements() {
        let x = q(a.t(h).unwrap().unwrap());
        let oh = a.order_at_point(x, None);
        let conj = o.conjugate(h).unwrap();
        assert_eq!(snapshot_on(&oh, &inner).unwrap(), snapshot_on(&conj, &inner).unwrap());
    }
    let far = g.parse_word("x^5").unwrap();
    assert!(matches!(at0.sign_of(&far), Err(Error::Unknown(_))));
}

#[test]
fn gap_points_give_the_same_order() {
    let z = Arc::new(GroupBackend::zn(1));
    let o = z_order(z.clone(), true).unwrap();
    let a = build_realisation(&o, 4).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    let ball = z.ball(3).unwrap();
    assert_eq!(
        snapshot_on(&a.order_at_point(half, None), &ball).unwrap(),
        snapshot_on(&a.order_at_point(q(0), None), &ball).unwrap()
    );
    let via_action = crate::orders::order_from_action(z.clone(), Arc::new(a.clone()), q(0), None);
    assert_eq!(
        snapshot_on(&via_action, &ball).unwrap(),
        snapshot_on(&o, &ball).unwrap()
    );
}

#[test]
fn svg_renders() {
    let z = Arc::new(GroupBackend::zn(1));
    let a = build_realisation(&z_order(z, true).unwrap(), 2).unwrap();
    let svg = svg_graphs(&a, &[("a".to_string(), Word::gen(0))]);
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}
