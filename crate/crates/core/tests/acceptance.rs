//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails. Criteria 1–7 return deterministic JSON reports,
//! which criterion 9 compares across repeated runs and worker counts.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use ordlab::conesearch::{
    certify_nonorderable, search, validate_certificate, ConeConstraint, SearchOptions, SearchOutcome,
};
use ordlab::detection::{
    boundary_cofinality_report, default_n_max, exclusion_frontier, regular_detect_check, slope_of_order,
    strong_detect_witness, weak_detect, BoundaryCofinality, DetectionStatus,
};
use ordlab::dynreal::build_realisation;
use ordlab::gluing::{
    bludov_glass_check, coherence_check, fixture_orders, CoherenceOptions, Compatibility, GluingGraph, GluingMap,
    NormalFamilyFixture,
};
use ordlab::lattice::{classify_line_orders, LatticeLine, Slope};
use ordlab::orders::{
    abelianisation_to_z, klein_orders, snapshot_on, torus_kernel_order, torus_lex_order, z_order, ConeSnapshot,
    OrderOracle, Sign,
};
use ordlab::{parse_presentation, GroupBackend, PeripheralSubgroup};

type Run = Result<Value, String>;

/// Collects failed expectations for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, report: Value) -> Run {
        if self.failures.is_empty() {
            Ok(report)
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn slope(s: &str) -> Slope {
    s.parse().expect("valid slope literal")
}

fn t_of(g: &GroupBackend) -> PeripheralSubgroup {
    g.peripheral("T").expect("fixture has T").clone()
}

fn opts(jobs: usize) -> SearchOptions {
    SearchOptions {
        jobs,
        ..SearchOptions::default()
    }
}

fn enumerate(g: &GroupBackend, r: usize, cs: &[ConeConstraint], jobs: usize) -> Result<Vec<ConeSnapshot>, String> {
    match search(g, r, cs, &opts(jobs)).map_err(e2s)? {
        SearchOutcome::Enumeration {
            snapshots,
            complete: true,
        } => Ok(snapshots),
        SearchOutcome::Enumeration { .. } => Err(format!("search on B_{r} hit its limit")),
        SearchOutcome::Unsat(_) => Ok(Vec::new()),
    }
}

fn cone_words(g: &GroupBackend, cones: &[ConeSnapshot]) -> Vec<Vec<String>> {
    cones
        .iter()
        .map(|c| c.positive().map(|w| g.format(w)).collect())
        .collect()
}

/// Every oracle snapshot is among the cones and the cones are exactly as many.
fn matches_oracles(
    g: &GroupBackend,
    r: usize,
    cones: &[ConeSnapshot],
    oracles: &[OrderOracle],
) -> Result<bool, String> {
    let ball = g.ball(r).map_err(e2s)?;
    let found: BTreeSet<String> = cones.iter().map(|c| format!("{:?}", c.entries)).collect();
    let mut expected = BTreeSet::new();
    for o in oracles {
        expected.insert(format!("{:?}", snapshot_on(o, &ball).map_err(e2s)?.entries));
    }
    Ok(found == expected)
}

fn criterion_1(jobs: usize) -> Run {
    let z = Arc::new(GroupBackend::zn(2));
    let mut c = Checks::default();
    let mut rows = Vec::new();
    // A rational line whose primitive vector leaves B_3 cuts the ball only at
    // the origin, so the axis choice is invisible there and 2 cones remain.
    for (s, want) in [
        ("0", 4),
        ("1/0", 4),
        ("1/2", 4),
        ("-1", 4),
        ("-2/3", 2),
        ("3/1", 2),
        ("√2", 2),
    ] {
        let s = slope(s);
        let line = ConeConstraint::PeripheralLine {
            peripheral: "T".into(),
            slope: s,
            side: None,
        };
        let cones = enumerate(&z, 3, &[line], jobs)?;
        let oracles = classify_line_orders(z.clone(), &LatticeLine::new(s, 1)).map_err(e2s)?;
        let matched = matches_oracles(&z, 3, &cones, &oracles)?;
        c.expect(cones.len() == want, || {
            format!("slope {s}: {} cones, expected {want}", cones.len())
        });
        c.expect(matched, || {
            format!("slope {s}: cones differ from the line-order snapshots")
        });
        rows.push(json!({"slope": s.to_string(), "count": cones.len(), "cones": cone_words(&z, &cones)}));
    }
    c.finish(json!(rows))
}

fn criterion_2(jobs: usize) -> Run {
    let k = Arc::new(GroupBackend::klein_bottle());
    let p = t_of(&k);
    let orders = klein_orders(k.clone()).map_err(e2s)?;
    let mut c = Checks::default();
    let mut report = json!({});
    for r in [3, 4] {
        let cones = enumerate(&k, r, &[], jobs)?;
        c.expect(cones.len() == 4, || format!("B_{r}: {} cones", cones.len()));
        c.expect(matches_oracles(&k, r, &cones, &orders)?, || {
            format!("B_{r}: cones differ from the 4-family")
        });
        report[format!("cones_r{r}")] = json!(cone_words(&k, &cones));
    }
    let mut per_order = Vec::new();
    for o in &orders {
        let mut detected = Vec::new();
        for q in 0..=4i64 {
            for pp in -4..=4i64 {
                if num_integer::gcd(pp, q) != 1 {
                    continue;
                }
                let s = Slope::rational(pp, q).map_err(e2s)?;
                let w = weak_detect(o, &p, &s, 3).map_err(e2s)?.is_certified();
                let reg = regular_detect_check(o, &p, &s, 3, 3).map_err(e2s)?.is_certified();
                c.expect(w == reg, || {
                    format!("{}: weak and regular disagree on {s}", o.provenance.describe())
                });
                if w {
                    detected.push(s.to_string());
                }
            }
        }
        c.expect(detected == ["0/1"], || {
            format!("{} detects {detected:?}", o.provenance.describe())
        });
        let b = boundary_cofinality_report(o, &p, 3, default_n_max(3)).map_err(e2s)?;
        c.expect(b.verdict == BoundaryCofinality::BoundaryCofinalAtRadius, || {
            format!("{} boundary verdict {:?}", o.provenance.describe(), b.verdict)
        });
        per_order.push(json!({
            "order": o.provenance.describe(),
            "detected": detected,
            "boundary": serde_json::to_value(&b).map_err(e2s)?,
        }));
    }
    report["orders"] = json!(per_order);
    c.finish(report)
}

fn realisation_laws(o: &OrderOracle, c: &mut Checks) -> Result<Value, String> {
    const WINDOW: usize = 4;
    let a = build_realisation(o, WINDOW).map_err(e2s)?;
    let g = o.group();
    let name = o.provenance.describe();
    // the law is certified for g, h in B_{WINDOW-1}
    let inner = g.ball(WINDOW - 1).map_err(e2s)?;
    let mut pairs = 0usize;
    for (i, x) in inner.elements().iter().enumerate() {
        // ρ is evaluated letter by letter, so x is read along a geodesic
        let geo = inner.geodesic(i);
        for h in inner.elements() {
            let (Some(th), Some(txh)) = (a.t(h).map_err(e2s)?, a.t(&g.mul(x, h).map_err(e2s)?).map_err(e2s)?) else {
                continue;
            };
            pairs += 1;
            let moved = a.evaluate(geo, &num_rational::BigRational::from_integer(th.into()));
            let ok = moved == num_rational::BigRational::from_integer(txh.into());
            c.expect(ok, || {
                format!("{name}: orbit law fails at ({}, {})", g.format(x), g.format(h))
            });
        }
    }
    let zero = num_rational::BigRational::from_integer(0.into());
    let b3 = g.ball(3).map_err(e2s)?;
    for (i, x) in b3.elements().iter().enumerate().skip(1) {
        let d = a.evaluate(b3.geodesic(i), &zero);
        let s = if d > zero { Sign::Pos } else { Sign::Neg };
        c.expect(d != zero && s == o.sign_of(x).map_err(e2s)?, || {
            format!("{name}: sign recovery fails at {}", g.format(x))
        });
    }
    Ok(json!({"order": name, "pairs": pairs, "points": a.table().len()}))
}

fn criterion_3(_jobs: usize) -> Run {
    let mut fixtures = Vec::new();
    let z = Arc::new(GroupBackend::zn(1));
    fixtures.push(z_order(z.clone(), true).map_err(e2s)?);
    fixtures.push(z_order(z, false).map_err(e2s)?);
    let z2 = Arc::new(GroupBackend::zn(2));
    for s in ["0", "1/2", "√2"] {
        fixtures.extend(classify_line_orders(z2.clone(), &LatticeLine::new(slope(s), 1)).map_err(e2s)?);
    }
    fixtures.extend(klein_orders(Arc::new(GroupBackend::klein_bottle())).map_err(e2s)?);
    let tr = Arc::new(GroupBackend::trefoil());
    fixtures.push(torus_lex_order(tr.clone(), true, true).map_err(e2s)?);
    fixtures.push(torus_lex_order(tr, false, true).map_err(e2s)?);
    let mut c = Checks::default();
    let mut rows = Vec::new();
    for o in &fixtures {
        rows.push(realisation_laws(o, &mut c)?);
    }
    c.finish(json!(rows))
}

fn criterion_4(_jobs: usize) -> Run {
    let k = Arc::new(GroupBackend::klein_bottle());
    let tr = Arc::new(GroupBackend::trefoil());
    let mut fixtures = klein_orders(k).map_err(e2s)?;
    fixtures.push(torus_lex_order(tr.clone(), true, true).map_err(e2s)?);
    fixtures.push(torus_lex_order(tr, true, false).map_err(e2s)?);
    let mut c = Checks::default();
    let mut compared = 0usize;
    for o in &fixtures {
        let g = o.group().clone();
        let p = t_of(&g);
        for h in g.ball(3).map_err(e2s)?.elements() {
            // g⁻¹·o on ∂M against o on g ∂M g⁻¹
            let moved = o.conjugate(&h.inverse()).map_err(e2s)?;
            let q = p.conjugated(h);
            for (a, b) in (-3..=3i64).flat_map(|a| (-3..=3i64).map(move |b| (a, b))) {
                if (a, b) == (0, 0) {
                    continue;
                }
                let lhs = moved.sign_of(&p.element(a, b)).map_err(e2s)?;
                let rhs = o.sign_of(&q.element(a, b)).map_err(e2s)?;
                c.expect(lhs == rhs, || {
                    format!(
                        "{} by {}: signs differ at μ^{a}λ^{b}",
                        o.provenance.describe(),
                        g.format(h)
                    )
                });
            }
            let lhs = slope_of_order(&moved, &p, 3).map_err(e2s)?;
            let rhs = slope_of_order(o, &q, 3).map_err(e2s)?;
            c.expect(lhs == rhs, || {
                format!("{} by {}: {lhs} vs {rhs}", o.provenance.describe(), g.format(h))
            });
            compared += 1;
        }
    }
    c.finish(json!({"fixtures": fixtures.len(), "conjugators": compared}))
}

/// Membership in the interval (−∞, 1) of detected trefoil slopes.
fn below_one(s: &Slope) -> bool {
    match *s {
        Slope::Rational { p, q } => q != 0 && p < q,
        _ => s.angle().tan() < 1.0,
    }
}

fn criterion_5(_jobs: usize) -> Run {
    let tr = Arc::new(GroupBackend::trefoil());
    let p = t_of(&tr);
    let phi = abelianisation_to_z(tr.clone()).map_err(e2s)?;
    let zo = z_order(phi.target.clone(), true).map_err(e2s)?;
    let kernel = torus_kernel_order(tr.clone(), true).map_err(e2s)?;
    let mut c = Checks::default();
    let lam = strong_detect_witness(&p, &slope("0"), &phi, &zo, Some(&kernel), 3).map_err(e2s)?;
    c.expect(lam.is_certified(), || format!("slope 0: {:?}", lam.status));
    let mu = strong_detect_witness(&p, &slope("1/0"), &phi, &zo, Some(&kernel), 3).map_err(e2s)?;
    c.expect(mu.status == DetectionStatus::NotCertified, || {
        format!("slope ∞: {:?}", mu.status)
    });
    let induced = lam.induced.as_ref().ok_or("no induced order for slope 0")?;
    let reg = regular_detect_check(induced, &p, &slope("0"), 3, 3).map_err(e2s)?;
    c.expect(reg.is_certified(), || format!("induced order: {:?}", reg.status));
    c.expect(below_one(&slope("0")), || "0 is not below 1".into());
    c.expect(!below_one(&slope("1/0")), || "∞ is below 1".into());
    c.finish(json!({"lambda": lam.to_json(), "mu": mu.to_json(), "induced_regular": reg.to_json()}))
}

fn family(name: &str, orders: Vec<OrderOracle>) -> Result<NormalFamilyFixture, String> {
    NormalFamilyFixture::new(name, orders).map_err(e2s)
}

fn two_vertex(a: Arc<GroupBackend>, b: Arc<GroupBackend>, m: [[i64; 2]; 2]) -> Result<GluingGraph, String> {
    let mut g = GluingGraph::default();
    g.add_vertex("A", a).map_err(e2s)?;
    g.add_vertex("B", b).map_err(e2s)?;
    g.add_edge(("A", "T"), ("B", "T"), m).map_err(e2s)?;
    Ok(g)
}

fn criterion_6(_jobs: usize) -> Run {
    const ID: [[i64; 2]; 2] = [[1, 0], [0, 1]];
    const SWAP: [[i64; 2]; 2] = [[0, 1], [1, 0]];
    let k = Arc::new(GroupBackend::klein_bottle());
    let tr = Arc::new(GroupBackend::trefoil());
    let kf = family("klein", klein_orders(k.clone()).map_err(e2s)?)?;
    let tf = family("trefoil", fixture_orders(&tr, &[slope("0")]).map_err(e2s)?)?;
    let mut c = Checks::default();
    let mut rows = Vec::new();
    let opts = CoherenceOptions::default();
    let cases = [
        (
            "klein ∪id klein",
            &kf,
            &kf,
            ID,
            k.clone(),
            k.clone(),
            "l,l",
            Compatibility::Compatible,
        ),
        (
            "trefoil ∪id klein",
            &tf,
            &kf,
            ID,
            tr.clone(),
            k.clone(),
            "0,0",
            Compatibility::Compatible,
        ),
        (
            "klein ∪swap klein",
            &kf,
            &kf,
            SWAP,
            k.clone(),
            k.clone(),
            "l,l",
            Compatibility::Incompatible,
        ),
    ];
    for (name, f1, f2, m, g1, g2, assign, want) in cases {
        let map = GluingMap::new("T", "T", m).map_err(e2s)?;
        let bg = bludov_glass_check(f1, f2, &map, 3).map_err(e2s)?;
        c.expect(bg.verdict == want, || format!("{name}: {:?}", bg.verdict));
        let graph = two_vertex(g1, g2, m)?;
        let assignment = ordlab::gluing::parse_assignment(assign).map_err(e2s)?;
        let coh = coherence_check(&graph, &assignment, &fixture_orders, &opts).map_err(e2s)?;
        c.expect(coh.passes == (want == Compatibility::Compatible), || {
            format!("{name}: coherence {} ({:?})", coh.passes, coh.failure)
        });
        rows.push(json!({
            "case": name,
            "bludov_glass": serde_json::to_value(&bg).map_err(e2s)?,
            "coherence": serde_json::to_value(&coh).map_err(e2s)?,
        }));
    }
    // the swap graph with the transported assignment still fails at the vertex
    let swap = two_vertex(k.clone(), k, SWAP)?;
    let coh = coherence_check(&swap, &[slope("0"), slope("1/0")], &fixture_orders, &opts).map_err(e2s)?;
    c.expect(!coh.passes, || "swap graph with l,m passes".into());
    rows.push(json!({"case": "klein ∪swap klein, l,m", "coherence": serde_json::to_value(&coh).map_err(e2s)?}));
    c.finish(json!(rows))
}

fn criterion_7(jobs: usize) -> Run {
    let mut c = Checks::default();
    let mut rows = Vec::new();
    for (name, text) in [
        ("⟨x|x²⟩", "gens x; rel x^2;"),
        ("⟨x|x³⟩", "gens x; rel x^3;"),
        ("Klein four", "gens x y; rel x^2; rel y^2; rel x y x y;"),
    ] {
        let g = GroupBackend::from_presentation(parse_presentation(text).map_err(e2s)?).map_err(e2s)?;
        match certify_nonorderable(&g, 3, &opts(jobs)).map_err(e2s)? {
            Some(cert) => {
                let replay = validate_certificate(&g, &[], &cert);
                c.expect(replay.is_ok(), || format!("{name}: replay failed: {replay:?}"));
                rows.push(json!({"group": name, "radius": cert.radius, "leaves": cert.root.leaves(), "text": cert.to_text(&g)}));
            }
            None => c.expect(false, || format!("{name}: no certificate up to radius 3")),
        }
    }
    c.finish(json!(rows))
}

/// Exploratory: the trefoil frontier for slope 2.
fn criterion_8() -> (bool, String) {
    let tr = GroupBackend::trefoil();
    let p = t_of(&tr);
    let r_max = std::env::var("ORDLAB_FRONTIER_MAX")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(8);
    match exclusion_frontier(&tr, &p, &slope("2"), r_max, &SearchOptions::default()) {
        Ok((steps, verdict)) => {
            let trace: Vec<String> = steps
                .iter()
                .map(|s| format!("r={} {:?} {}ms", s.radius, s.status, s.millis))
                .collect();
            match verdict {
                Some(v) => {
                    let Some(cert) = v.certificate.as_ref() else {
                        return (false, "exclusion claimed without a certificate".into());
                    };
                    let replay = validate_certificate(&tr, &[line_constraint(&p, "2")], cert);
                    (
                        replay.is_ok(),
                        format!("certificate at radius {} [{}]", v.radius, trace.join(", ")),
                    )
                }
                None => {
                    let reached = steps.last().map(|s| s.radius).unwrap_or(0);
                    (
                        true,
                        format!("no certificate; frontier radius {reached} [{}]", trace.join(", ")),
                    )
                }
            }
        }
        Err(e) => (true, format!("search stopped: {e}")),
    }
}

fn line_constraint(p: &PeripheralSubgroup, s: &str) -> ConeConstraint {
    ConeConstraint::PeripheralLine {
        peripheral: p.name.clone(),
        slope: slope(s),
        side: None,
    }
}

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Duration,
    run: fn(usize) -> Run,
}

const CRITERIA: [Criterion; 7] = [
    Criterion {
        id: 1,
        title: "ℤ² line classification",
        budget: Duration::from_secs(5),
        run: criterion_1,
    },
    Criterion {
        id: 2,
        title: "Klein bottle cones and detection",
        budget: Duration::from_secs(30),
        run: criterion_2,
    },
    Criterion {
        id: 3,
        title: "dynamic realisation laws",
        budget: Duration::from_secs(10),
        run: criterion_3,
    },
    Criterion {
        id: 4,
        title: "conjugation dictionary",
        budget: Duration::from_secs(10),
        run: criterion_4,
    },
    Criterion {
        id: 5,
        title: "trefoil strong detection",
        budget: Duration::from_secs(5),
        run: criterion_5,
    },
    Criterion {
        id: 6,
        title: "gluing verdicts",
        budget: Duration::from_secs(30),
        run: criterion_6,
    },
    Criterion {
        id: 7,
        title: "non-orderability certificates",
        budget: Duration::from_secs(5),
        run: criterion_7,
    },
];

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
        .install(f)
}

fn line(id: usize, title: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id} [{title}]: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut reports = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let out = in_pool(1, || (c.run)(1));
        let took = start.elapsed();
        let (pass, detail) = match &out {
            Ok(_) if took > c.budget => (false, format!("took {took:.2?}, budget {:?}", c.budget)),
            Ok(_) => (true, format!("({took:.2?})")),
            Err(e) => (false, e.clone()),
        };
        line(c.id, c.title, pass, &detail);
        all_pass &= pass;
        reports.push(out.ok().map(|v| serde_json::to_string(&v).expect("serialisable")));
    }

    let (pass, detail) = criterion_8();
    line(8, "trefoil slope-2 exclusion frontier", pass, &detail);
    all_pass &= pass;

    let mut drift = Vec::new();
    for (run, jobs) in [("repeat", 1), ("jobs 4", 4)] {
        for (c, first) in CRITERIA.iter().zip(&reports) {
            let again = in_pool(jobs, || (c.run)(jobs))
                .ok()
                .map(|v| serde_json::to_string(&v).expect("serialisable"));
            if first.is_none() || &again != first {
                drift.push(format!("{} ({run})", c.id));
            }
        }
    }
    let pass = drift.is_empty();
    let detail = if pass {
        "reports of 1–7 identical across a repeat and jobs 1 vs 4".to_string()
    } else {
        format!("reports differ or failed for {}", drift.join(", "))
    };
    line(9, "determinism", pass, &detail);
    all_pass &= pass;

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
