use super::*;

fn klein() -> Arc<GroupBackend> {
    Arc::new(GroupBackend::klein_bottle())
}

fn w(g: &GroupBackend, s: &str) -> Word {
    g.parse_word(s).unwrap()
}

#[test]
fn klein_lex_sign_decided_by_x_exponent() {
    let g = klein();
    let o = klein_order(g.clone(), true, true).unwrap();
    assert_eq!(o.sign_of(&w(&g, "x^-1 y^5")).unwrap(), Sign::Neg);
    assert_eq!(o.sign_of(&w(&g, "y")).unwrap(), Sign::Pos);
    assert!(matches!(o.sign_of(&w(&g, "x y x^-1 y")), Err(Error::IdentityElement)));
}

#[test]
fn conjugating_by_x_flips_y() {
    let g = klein();
    let o = klein_order(g.clone(), true, true).unwrap();
    let c = o.conjugate(&w(&g, "x")).unwrap();
    assert_eq!(c.sign_of(&w(&g, "y")).unwrap(), Sign::Neg);
    assert_eq!(c.sign_of(&w(&g, "x")).unwrap(), Sign::Pos);
}

#[test]
fn opposite_is_an_involution() {
    let g = klein();
    let o = klein_order(g.clone(), false, true).unwrap();
    assert_eq!(snapshot(&o.opposite().opposite(), 5).unwrap(), snapshot(&o, 5).unwrap());
    assert_ne!(snapshot(&o.opposite(), 1).unwrap(), snapshot(&o, 1).unwrap());
}

#[test]
fn conjugation_is_an_action() {
    let g = klein();
    let o = klein_order(g.clone(), true, false).unwrap();
    let ball = g.ball(2).unwrap();
    let target = g.ball(4).unwrap();
    for a in ball.elements() {
        for b in ball.elements() {
            let lhs = o.conjugate(b).unwrap().conjugate(a).unwrap();
            let rhs = o.conjugate(&a.mul(b)).unwrap();
            assert_eq!(snapshot_on(&lhs, &target).unwrap(), snapshot_on(&rhs, &target).unwrap());
        }
    }
    let id = o.conjugate(&Word::identity()).unwrap();
    assert_eq!(snapshot_on(&id, &target).unwrap(), snapshot_on(&o, &target).unwrap());
}

#[test]
fn lex_extend_reproduces_klein_orders() {
    let g = klein();
    let proj = abelianisation_to_z(g.clone()).unwrap();
    let ball = g.ball(4).unwrap();
    for (xp, yp) in [(false, false), (true, false), (false, true), (true, true)] {
        let k = cyclic_kernel_order(g.clone(), yp).unwrap();
        let q = z_order(proj.target.clone(), xp).unwrap();
        let lex = lex_extend(&k, &q, &proj).unwrap();
        let direct = klein_order(g.clone(), xp, yp).unwrap();
        assert_eq!(snapshot_on(&lex, &ball).unwrap(), snapshot_on(&direct, &ball).unwrap());
        let kernel = proj.kernel_witness();
        assert!(kernel.refute(&lex, &g.ball(5).unwrap()).unwrap().is_none());
    }
}

#[test]
fn trefoil_meridian_positive_under_standard_quotient() {
    let g = Arc::new(GroupBackend::trefoil());
    let mu = g.peripherals()[0].mu.clone();
    let proj = abelianisation_to_z(g.clone()).unwrap();
    assert_eq!(proj.apply(&mu).unwrap(), Word::gen(0));
    for kp in [true, false] {
        let o = torus_lex_order(g.clone(), kp, true).unwrap();
        assert_eq!(o.sign_of(&mu).unwrap(), Sign::Pos);
        let s = snapshot(&o, 3).unwrap();
        assert_eq!(validate_cone(&g, &s).unwrap(), None);
    }
}

#[test]
fn quotient_order_on_klein_cosets() {
    let g = klein();
    let o = klein_order(g.clone(), true, true).unwrap();
    let yw = ConvexWitness::new("<y>", |w: &Word| Ok(GroupBackend::klein_coords(0, w).0 == 0));
    let q = o.quotient_order(&yw, 4).unwrap();
    let x = |n: i64| Word::power_of(0, n);
    for a in -3..=3 {
        for b in -3..=3 {
            let got = q.compare(&x(a).mul(&w(&g, "y^2")), &x(b)).unwrap();
            assert_eq!(got, a.cmp(&b));
        }
    }
    assert!(q.check_well_defined(&g.ball(3).unwrap(), 4).unwrap());

    let trivial = o.quotient_order(&ConvexWitness::trivial(), 3).unwrap();
    for a in g.ball(2).unwrap().elements() {
        for b in g.ball(2).unwrap().elements() {
            assert_eq!(trivial.compare(a, b).unwrap(), o.compare(a, b).unwrap());
        }
    }
}

#[test]
fn convex_swap_and_refutation() {
    let g = klein();
    let o = klein_order(g.clone(), true, true).unwrap();
    let yw = ConvexWitness::new("<y>", |w: &Word| Ok(GroupBackend::klein_coords(0, w).0 == 0));
    let swapped = o.transform(&Transform::ConvexSwap(yw.clone()), 4).unwrap();
    let expect = klein_order(g.clone(), true, false).unwrap();
    let ball = g.ball(4).unwrap();
    assert_eq!(
        snapshot_on(&swapped, &ball).unwrap(),
        snapshot_on(&expect, &ball).unwrap()
    );
    let back = swapped.convex_swap(&yw, 4).unwrap();
    assert_eq!(snapshot_on(&back, &ball).unwrap(), snapshot_on(&o, &ball).unwrap());

    let x2 = ConvexWitness::new("<x^2>", |w: &Word| {
        let (a, b) = GroupBackend::klein_coords(0, w);
        Ok(a % 2 == 0 && b == 0)
    });
    match o.convex_swap(&x2, 2) {
        Err(Error::ConvexityRefuted { .. }) => {}
        other => panic!("expected refutation, got {other:?}"),
    }
}

#[test]
fn order_from_translation_action() {
    let z = Arc::new(GroupBackend::zn(1));
    let act = Arc::new(TranslationAction::new(&z, vec![1]).unwrap());
    let o = order_from_action(z.clone(), act, 0, None);
    let std = z_order(z.clone(), true).unwrap();
    let ball = z.ball(5).unwrap();
    assert_eq!(snapshot_on(&o, &ball).unwrap(), snapshot_on(&std, &ball).unwrap());

    let g = klein();
    let act = Arc::new(TranslationAction::new(&g, vec![1, 0]).unwrap());
    assert!(act.check_order_preserving(&g.ball(2).unwrap(), &0).unwrap().is_none());
    let stab = cyclic_kernel_order(g.clone(), true).unwrap();
    let o = order_from_action(g.clone(), act.clone(), 0, Some(stab));
    let ball = g.ball(4).unwrap();
    let expect = klein_order(g.clone(), true, true).unwrap();
    assert_eq!(snapshot_on(&o, &ball).unwrap(), snapshot_on(&expect, &ball).unwrap());
    for a in ball.elements() {
        for b in ball.elements() {
            if o.compare(a, b).unwrap() != Ordering::Greater {
                assert!(act.translation(a) <= act.translation(b));
            }
        }
    }
    assert!(TranslationAction::new(&g, vec![0, 1]).is_err());
}

#[test]
fn sikora_distances() {
    let g = klein();
    let a = snapshot(&klein_order(g.clone(), true, true).unwrap(), 3).unwrap();
    let b = snapshot(&klein_order(g.clone(), true, false).unwrap(), 3).unwrap();
    let half = num_rational::BigRational::new(1.into(), 2.into());
    assert_eq!(sikora_distance(&a, &b).unwrap(), half);
    assert_eq!(
        sikora_distance(&a, &a).unwrap(),
        num_rational::BigRational::from_integer(0.into())
    );
    let c = snapshot(&klein_order(g.clone(), true, true).unwrap(), 2).unwrap();
    assert!(matches!(sikora_distance(&a, &c), Err(Error::Mismatch(_))));
}

#[test]
fn snapshot_text_round_trip() {
    let g = klein();
    let o = klein_order(g.clone(), false, true).unwrap();
    let s = snapshot(&o, 3).unwrap();
    let text = s.to_text(&g);
    assert!(text.starts_with("x^-1 "));
    let back = ConeSnapshot::from_text(&g, 3, &text).unwrap();
    assert_eq!(back, s);
    assert!(ConeSnapshot::from_text(&g, 3, "x +\n").is_err());
}

#[test]
fn validator_flags_bad_tables() {
    let g = klein();
    let o = klein_order(g.clone(), true, true).unwrap();
    let mut s = snapshot(&o, 2).unwrap();
    let i = s.entries.iter().position(|e| e.0 == Word::gen(1)).unwrap();
    s.entries[i].2 = Sign::Neg;
    assert!(validate_cone(&g, &s).unwrap().is_some());
}
