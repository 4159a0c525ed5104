//! Cross-module invariants checked through the public API against
//! independent oracles: faithful matrix and affine models for the word
//! problem, and the cone axioms on random words beyond the ball.

use std::sync::Arc;

use proptest::prelude::*;

use ordlab::conesearch::{search, ConeConstraint, SearchOptions, SearchOutcome};
use ordlab::detection::{regular_detect_check, strong_detect_witness, weak_detect};
use ordlab::lattice::{classify_line_orders, LatticeLine, Slope};
use ordlab::orders::{
    abelianisation_to_z, klein_orders, snapshot, torus_kernel_order, torus_lex_order, validate_cone, z_order,
    OrderOracle, Sign,
};
use ordlab::{GroupBackend, Word};

type M2 = [[i64; 2]; 2];

fn mm(a: M2, b: M2) -> M2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn inv(a: M2) -> M2 {
    // determinant one
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

/// Trefoil oracle: the image in SL(2,ℤ) under u ↦ σ₁σ₂σ₁, v ↦ σ₁σ₂ together
/// with the abelianisation u ↦ 3, v ↦ 2. The kernel of the matrix map is
/// generated by u⁴, which the abelianisation detects, so the pair is faithful.
fn trefoil_oracle(w: &Word) -> (M2, i64) {
    let s1 = [[1, 1], [0, 1]];
    let s2 = [[1, 0], [-1, 1]];
    let v = mm(s1, s2);
    let u = mm(v, s1);
    let mut m = [[1, 0], [0, 1]];
    let mut ab = 0;
    for &(g, e) in w.syllables() {
        let (base, weight) = if g == 0 { (u, 3) } else { (v, 2) };
        let step = if e > 0 { base } else { inv(base) };
        for _ in 0..e.abs() {
            m = mm(m, step);
        }
        ab += weight * e;
    }
    (m, ab)
}

/// Klein oracle: the free deck action x(a,b) = (a+1, −b), y(a,b) = (a, b+1)
/// on the plane, recorded as the affine map it induces.
fn klein_oracle(w: &Word) -> (i64, i64, i64) {
    // (a, b) ↦ (a + s, ε b + t) stored as (s, ε, t)
    let mut f = (0i64, 1i64, 0i64);
    for &(g, e) in w.syllables().iter().rev() {
        for _ in 0..e.abs() {
            let (s, eps, t) = f;
            f = match (g, e > 0) {
                (0, true) => (s + 1, -eps, -t),
                (0, false) => (s - 1, -eps, -t),
                (_, true) => (s, eps, t + 1),
                (_, false) => (s, eps, t - 1),
            };
        }
    }
    f
}

#[test]
fn word_problem_matches_independent_oracles() {
    let t = GroupBackend::trefoil();
    let k = GroupBackend::klein_bottle();
    for (g, name) in [(&t, "trefoil"), (&k, "klein")] {
        let ball = g.ball(4).unwrap();
        let n = ball.len();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (ball.geodesic(i), ball.geodesic(j));
                let same = if name == "trefoil" {
                    trefoil_oracle(a) == trefoil_oracle(b)
                } else {
                    klein_oracle(a) == klein_oracle(b)
                };
                assert_eq!(same, i == j, "{name}: {} vs {}", g.format(a), g.format(b));
            }
        }
    }
}

#[test]
fn peripheral_subgroups_are_free_abelian_of_rank_two() {
    let fixtures = [
        GroupBackend::trefoil(),
        GroupBackend::klein_bottle(),
        GroupBackend::zn(2),
        GroupBackend::torus_bundle([[2, 1], [1, 1]]).unwrap(),
    ];
    for g in &fixtures {
        for p in g.peripherals() {
            let comm = p.mu.mul(&p.lambda).mul(&p.mu.inverse()).mul(&p.lambda.inverse());
            assert!(g.normal_form(&comm).unwrap().is_identity());
            for a in -6..=6 {
                for b in -6..=6 {
                    if (a, b) != (0, 0) {
                        assert!(!g.normal_form(&p.element(a, b)).unwrap().is_identity(), "{a} {b}");
                    }
                }
            }
        }
    }
}

#[test]
fn balls_are_monotone_and_closed_under_inversion() {
    for g in [
        GroupBackend::trefoil(),
        GroupBackend::klein_bottle(),
        GroupBackend::zn(3),
    ] {
        let big = g.ball(4).unwrap();
        for r in 0..4 {
            let small = g.ball(r).unwrap();
            assert_eq!(small.elements(), big.within(r));
        }
        for w in big.elements() {
            assert!(big.contains(&g.normal_form(&w.inverse()).unwrap()));
        }
    }
}

fn fixture_orders() -> Vec<OrderOracle> {
    let mut v = klein_orders(Arc::new(GroupBackend::klein_bottle())).unwrap();
    let tr = Arc::new(GroupBackend::trefoil());
    v.push(torus_lex_order(tr.clone(), true, true).unwrap());
    v.push(torus_lex_order(tr, false, true).unwrap());
    let z2 = Arc::new(GroupBackend::zn(2));
    for s in ["1/2", "√3"] {
        v.extend(classify_line_orders(z2.clone(), &LatticeLine::new(s.parse().unwrap(), 1)).unwrap());
    }
    v
}

fn word(len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0usize..2, prop_oneof![Just(-1i64), Just(1i64)]), 0..=len).prop_map(Word::from_pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cone_axioms_on_random_words(i in 0usize..10, g in word(8), h in word(8)) {
        let orders = fixture_orders();
        let o = &orders[i % orders.len()];
        let grp = o.group();
        prop_assume!(!grp.normal_form(&g).unwrap().is_identity());
        prop_assume!(!grp.normal_form(&h).unwrap().is_identity());
        let sg = o.sign_of(&g).unwrap();
        prop_assert_eq!(o.sign_of(&g.inverse()).unwrap(), sg.flip());
        let sh = o.sign_of(&h).unwrap();
        if sg == Sign::Pos && sh == Sign::Pos {
            prop_assert_eq!(o.sign_of(&g.mul(&h)).unwrap(), Sign::Pos);
        }
    }

    #[test]
    fn conjugation_acts_and_commutes_with_opposite(i in 0usize..10, g in word(4), h in word(4), k in word(6)) {
        let orders = fixture_orders();
        let o = &orders[i % orders.len()];
        prop_assume!(!o.group().normal_form(&k).unwrap().is_identity());
        let twice = o.conjugate(&h).unwrap().conjugate(&g).unwrap();
        let once = o.conjugate(&g.mul(&h)).unwrap();
        prop_assert_eq!(twice.sign_of(&k).unwrap(), once.sign_of(&k).unwrap());
        let a = o.conjugate(&g).unwrap().opposite();
        let b = o.opposite().conjugate(&g).unwrap();
        prop_assert_eq!(a.sign_of(&k).unwrap(), b.sign_of(&k).unwrap());
        prop_assert_eq!(o.conjugate(&Word::identity()).unwrap().sign_of(&k).unwrap(), o.sign_of(&k).unwrap());
    }
}

#[test]
fn oracle_snapshots_satisfy_the_cone_axioms() {
    for o in fixture_orders() {
        let s = snapshot(&o, 4).unwrap();
        assert_eq!(
            validate_cone(o.group(), &s).unwrap(),
            None,
            "{}",
            o.provenance.describe()
        );
    }
}

#[test]
fn enumerated_cones_are_valid_and_constraints_shrink() {
    let z = GroupBackend::zn(2);
    let opts = SearchOptions::default();
    let count = |cs: &[ConeConstraint]| match search(&z, 2, cs, &opts).unwrap() {
        SearchOutcome::Enumeration { snapshots, .. } => {
            for s in &snapshots {
                assert_eq!(validate_cone(&z, s).unwrap(), None);
            }
            snapshots.len()
        }
        SearchOutcome::Unsat(_) => 0,
    };
    let line = ConeConstraint::PeripheralLine {
        peripheral: "T".into(),
        slope: "1".parse().unwrap(),
        side: None,
    };
    let sign = ConeConstraint::Sign {
        element: Word::gen(0),
        sign: Sign::Pos,
    };
    let all = count(&[]);
    let lined = count(std::slice::from_ref(&line));
    let both = count(&[line, sign]);
    assert!(all >= lined && lined >= both && both > 0, "{all} {lined} {both}");
}

#[test]
fn detection_levels_are_nested() {
    let tr = Arc::new(GroupBackend::trefoil());
    let p = tr.peripheral("T").unwrap().clone();
    let phi = abelianisation_to_z(tr.clone()).unwrap();
    let zo = z_order(phi.target.clone(), true).unwrap();
    let kernel = torus_kernel_order(tr.clone(), true).unwrap();
    let zero: Slope = "0".parse().unwrap();
    let strong = strong_detect_witness(&p, &zero, &phi, &zo, Some(&kernel), 3).unwrap();
    assert!(strong.is_certified());
    let induced = strong.induced.unwrap();
    let regular = regular_detect_check(&induced, &p, &zero, 3, 3).unwrap();
    assert!(regular.is_certified());
    assert!(weak_detect(&induced, &p, &zero, 3).unwrap().is_certified());

    for o in fixture_orders() {
        let Some(p) = o.group().peripheral("T").cloned() else {
            continue;
        };
        for s in ["0", "1/0", "1/2", "-1", "√3"] {
            let s: Slope = s.parse().unwrap();
            if regular_detect_check(&o, &p, &s, 2, 3).unwrap().is_certified() {
                assert!(
                    weak_detect(&o, &p, &s, 3).unwrap().is_certified(),
                    "{} {s}",
                    o.provenance.describe()
                );
            }
        }
    }
}
