use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use ordlab::conesearch::{certify_nonorderable, search, ConeConstraint, SearchOptions, SearchOutcome};
use ordlab::detection::{
    boundary_cofinality_report, cofinality_check, default_n_max, exclusion_search, regular_detect_check,
    slope_circle_svg, slope_of_order, strong_detect_witness, weak_detect, DetectionStatus,
};
use ordlab::dynreal::{build_realisation, svg_graphs};
use ordlab::gluing::{
    bludov_glass_check, coherence_check, fixture_orders, parse_assignment, CoherenceOptions, NormalFamilyFixture,
};
use ordlab::lattice::{classify_line_orders, LatticeLine, Slope};
use ordlab::orders::{
    abelianisation_to_z, cyclic_kernel_order, named_order, order_names, torus_kernel_order, z_order, OrderOracle, Sign,
};
use ordlab::presentations::Family;
use ordlab::{parse_presentation, GroupBackend, PeripheralSubgroup};

use crate::{Command, Level};

/// What a subcommand produced: a summary, a JSON report and extra files.
pub struct Outcome {
    pub summary: String,
    pub report: Value,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(summary: String, report: Value) -> Self {
        Outcome {
            summary,
            report,
            files: Vec::new(),
        }
    }
}

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Ball { .. } => "ball",
        Command::ConeSearch { .. } => "cone-search",
        Command::ClassifyZ2 { .. } => "classify-z2",
        Command::Slope { .. } => "slope",
        Command::Detect { .. } => "detect",
        Command::Cofinal { .. } => "cofinal",
        Command::Dynreal { .. } => "dynreal",
        Command::Glue { .. } => "glue",
        Command::CertifyNonorderable { .. } => "certify-nonorderable",
    }
}

fn load(path: &Path) -> Result<Arc<GroupBackend>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p = parse_presentation(&text)?;
    Ok(Arc::new(GroupBackend::from_presentation(p)?))
}

fn peripheral(g: &GroupBackend, name: &str) -> Result<PeripheralSubgroup> {
    g.peripheral(name)
        .cloned()
        .ok_or_else(|| ordlab::Error::Invalid(format!("no peripheral subgroup `{name}`")).into())
}

fn slope(text: &str) -> Result<Slope> {
    Ok(parse_assignment(text)?
        .pop()
        .ok_or_else(|| ordlab::Error::Invalid("empty slope".to_string()))?)
}

fn order(g: &Arc<GroupBackend>, spec: &str) -> Result<OrderOracle> {
    named_order(g.clone(), spec).map_err(|e| match e {
        ordlab::Error::Invalid(m) => {
            ordlab::Error::Invalid(format!("{m} (available: {})", order_names(g).join(", "))).into()
        }
        e => e.into(),
    })
}

pub fn run(c: &Command, jobs: usize) -> Result<Outcome> {
    match c {
        Command::Parse { file } => parse(file),
        Command::Ball { file, radius, list } => ball(file, *radius, *list),
        Command::ConeSearch {
            file,
            radius,
            line,
            sign,
            limit,
            node_cap,
            emit_certificate,
        } => {
            let opts = SearchOptions {
                limit: *limit as usize,
                node_cap: *node_cap,
                jobs,
            };
            cone_search(file, *radius, line, sign, &opts, emit_certificate.as_deref())
        }
        Command::ClassifyZ2 { slope, radius } => classify_z2(slope, *radius),
        Command::Slope {
            file,
            order,
            peripheral,
            radius,
        } => slope_cmd(file, order, peripheral, *radius),
        Command::Detect { .. } => detect(c, jobs),
        Command::Cofinal { .. } => cofinal(c),
        Command::Dynreal {
            file,
            order,
            radius,
            element,
            svg,
        } => dynreal(file, order, *radius, element, svg.as_deref()),
        Command::Glue {
            file,
            assign,
            radius,
            r_conj,
            compat,
        } => glue(file, assign, *radius, *r_conj, *compat),
        Command::CertifyNonorderable {
            file,
            max_radius,
            emit_certificate,
        } => {
            let opts = SearchOptions {
                jobs,
                ..SearchOptions::default()
            };
            certify(file, *max_radius, &opts, emit_certificate.as_deref())
        }
    }
}

fn parse(file: &Path) -> Result<Outcome> {
    let g = load(file)?;
    let p = &g.presentation;
    let rels: Vec<String> = p.relators.iter().map(|r| g.format(r)).collect();
    let periph: Vec<Value> = g
        .peripherals()
        .iter()
        .map(|q| json!({"name": q.name, "mu": g.format(&q.mu), "lambda": g.format(&q.lambda)}))
        .collect();
    let mut s = format!("family: {}\ngenerators: {}\n", g.family.tag(), p.generators.join(" "));
    for r in &rels {
        let _ = writeln!(s, "relator: {r}");
    }
    for q in g.peripherals() {
        let _ = writeln!(
            s,
            "peripheral {}: mu = {}, lambda = {}",
            q.name,
            g.format(&q.mu),
            g.format(&q.lambda)
        );
    }
    let names = order_names(&g);
    if !names.is_empty() {
        let _ = writeln!(s, "built-in orders: {}", names.join(", "));
    }
    let report = json!({
        "family": g.family.tag(),
        "generators": p.generators,
        "relators": rels,
        "peripherals": periph,
        "orders": names,
    });
    Ok(Outcome::new(s, report))
}

fn ball(file: &Path, radius: usize, list: bool) -> Result<Outcome> {
    let g = load(file)?;
    let b = g.ball(radius)?;
    let sizes: Vec<usize> = (0..=radius).map(|r| b.within(r).len()).collect();
    let mut s = format!("|B_r| for r = 0..{radius}: {sizes:?}\n");
    let elements: Vec<String> = b.elements().iter().map(|w| g.format(w)).collect();
    if list {
        for e in &elements {
            let _ = writeln!(s, "{e}");
        }
    }
    let mut report = json!({"radius": radius, "sizes": sizes});
    if list {
        report["elements"] = json!(elements);
    }
    Ok(Outcome::new(s, report))
}

fn parse_line(text: &str) -> Result<ConeConstraint> {
    let mut parts = text.split(':');
    let peripheral = parts.next().unwrap_or("").to_string();
    let s = slope(
        parts
            .next()
            .ok_or_else(|| ordlab::Error::Invalid(format!("bad line constraint `{text}`")))?,
    )?;
    let side = match parts.next() {
        None => None,
        Some(x) => Some(
            x.trim_start_matches('+')
                .parse::<i32>()
                .map_err(|_| ordlab::Error::Invalid(format!("bad side in `{text}`")))?,
        ),
    };
    Ok(ConeConstraint::PeripheralLine {
        peripheral,
        slope: s,
        side,
    })
}

fn parse_sign(g: &GroupBackend, text: &str) -> Result<ConeConstraint> {
    let (w, s) = text
        .rsplit_once(':')
        .ok_or_else(|| ordlab::Error::Invalid(format!("expected `<word>:+` or `<word>:-`, got `{text}`")))?;
    let sign = match s {
        "+" => Sign::Pos,
        "-" => Sign::Neg,
        _ => bail!(ordlab::Error::Invalid(format!("bad sign `{s}`"))),
    };
    Ok(ConeConstraint::Sign {
        element: g.parse_word(w)?,
        sign,
    })
}

fn cone_search(
    file: &Path,
    radius: usize,
    lines: &[String],
    signs: &[String],
    opts: &SearchOptions,
    cert_path: Option<&Path>,
) -> Result<Outcome> {
    let g = load(file)?;
    let mut cs = Vec::new();
    for l in lines {
        cs.push(parse_line(l)?);
    }
    for s in signs {
        cs.push(parse_sign(&g, s)?);
    }
    let constraints: Vec<String> = cs.iter().map(|c| c.describe(&g)).collect();
    let mut out = match search(&g, radius, &cs, opts)? {
        SearchOutcome::Enumeration { snapshots, complete } => {
            let cones: Vec<Vec<String>> = snapshots
                .iter()
                .map(|s| s.positive().map(|w| g.format(w)).collect())
                .collect();
            let mut s = format!(
                "{} cone(s) on B_{radius}{}\n",
                snapshots.len(),
                if complete { "" } else { " (limit reached, incomplete)" }
            );
            for (i, c) in cones.iter().enumerate() {
                let _ = writeln!(s, "cone {}: {}", i + 1, c.join(" "));
            }
            Outcome::new(
                s,
                json!({"radius": radius, "constraints": constraints, "count": snapshots.len(), "complete": complete, "unsat": false, "cones": cones}),
            )
        }
        SearchOutcome::Unsat(cert) => {
            let text = cert.to_text(&g);
            let s = format!("no cone on B_{radius}: refutation with {} leaves\n", cert.root.leaves());
            let mut o = Outcome::new(
                s,
                json!({"radius": radius, "constraints": constraints, "count": 0, "complete": true, "unsat": true, "leaves": cert.root.leaves()}),
            );
            if let Some(p) = cert_path {
                o.files.push((p.to_path_buf(), text));
            }
            o
        }
    };
    out.report["input"] = json!(file.display().to_string());
    Ok(out)
}

fn classify_z2(slope_text: &str, radius: usize) -> Result<Outcome> {
    let g = Arc::new(GroupBackend::zn(2));
    let s = slope(slope_text)?;
    let orders = classify_line_orders(g.clone(), &LatticeLine::new(s, 1))?;
    let ball = g.ball(radius)?;
    let mut out = format!("slope {s}: {} line orders\n", orders.len());
    let mut list = Vec::new();
    for o in &orders {
        let pos: Vec<String> = ball
            .elements()
            .iter()
            .skip(1)
            .filter(|w| o.sign_of(w).map(|x| x == Sign::Pos).unwrap_or(false))
            .map(|w| g.format(w))
            .collect();
        let _ = writeln!(
            out,
            "{}: positive on B_{radius}: {}",
            o.provenance.describe(),
            pos.join(" ")
        );
        list.push(json!({"order": o.provenance.describe(), "positive": pos}));
    }
    Ok(Outcome::new(
        out,
        json!({"slope": s.to_string(), "count": orders.len(), "orders": list}),
    ))
}

fn slope_cmd(file: &Path, spec: &str, periph: &str, radius: usize) -> Result<Outcome> {
    let g = load(file)?;
    let o = order(&g, spec)?;
    let p = peripheral(&g, periph)?;
    let e = slope_of_order(&o, &p, radius)?;
    let mut report = serde_json::to_value(&e)?;
    report["display"] = json!(e.to_string());
    report["order"] = json!(o.provenance.describe());
    Ok(Outcome::new(
        format!("slope of {} on {periph}: {e}\n", o.provenance.describe()),
        report,
    ))
}

fn detect(c: &Command, jobs: usize) -> Result<Outcome> {
    let Command::Detect {
        file,
        slope: slope_text,
        level,
        order: spec,
        epi,
        peripheral: periph,
        radius,
        r_conj,
        exclude,
        emit_certificate,
        svg,
    } = c
    else {
        unreachable!()
    };
    let g = load(file)?;
    let p = peripheral(&g, periph)?;
    let s = slope(slope_text)?;
    let need_order = || -> Result<OrderOracle> {
        let spec = spec
            .as_deref()
            .ok_or_else(|| ordlab::Error::Invalid("this level needs --order".to_string()))?;
        order(&g, spec)
    };
    let mut verdicts = Vec::new();
    match level {
        Level::Weak => verdicts.push(weak_detect(&need_order()?, &p, &s, *radius)?),
        Level::Regular => verdicts.push(regular_detect_check(&need_order()?, &p, &s, *r_conj, *radius)?),
        Level::Strong => {
            match epi.as_deref() {
                Some("ab") | None => {}
                Some(other) => bail!(ordlab::Error::Invalid(format!(
                    "unknown epimorphism `{other}`; use `ab`"
                ))),
            }
            let phi = abelianisation_to_z(g.clone())?;
            let zo = z_order(phi.target.clone(), true)?;
            let kernel = match g.family {
                Family::TorusKnot { .. } => Some(torus_kernel_order(g.clone(), true)?),
                Family::KleinBottle { .. } => Some(cyclic_kernel_order(g.clone(), true)?),
                _ => None,
            };
            verdicts.push(strong_detect_witness(&p, &s, &phi, &zo, kernel.as_ref(), *radius)?);
        }
    }
    let mut files = Vec::new();
    if *exclude {
        let opts = SearchOptions {
            jobs,
            ..SearchOptions::default()
        };
        let v = exclusion_search(&g, &p, &s, *radius, &opts)?;
        if let (Some(path), Some(cert)) = (emit_certificate, &v.certificate) {
            files.push((path.clone(), cert.to_text(&g)));
        }
        verdicts.push(v);
    }
    let mut summary = String::new();
    for v in &verdicts {
        let wording = match v.status {
            DetectionStatus::RefutedAtRadius => format!("no radius-{} cone detects {}", v.radius, v.slope),
            st => format!("{:?}", st)
                .to_lowercase()
                .replace("notcertified", "not certified"),
        };
        let _ = writeln!(
            summary,
            "{:?} detection of {} at radius {}: {}{}",
            v.level,
            v.slope,
            v.radius,
            wording,
            v.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()
        );
    }
    if let Some(path) = svg {
        let certified: Vec<Slope> = verdicts.iter().filter(|v| v.is_certified()).map(|v| v.slope).collect();
        let excluded: Vec<Slope> = verdicts
            .iter()
            .filter(|v| v.status == DetectionStatus::RefutedAtRadius)
            .map(|v| v.slope)
            .collect();
        files.push((path.clone(), slope_circle_svg(&certified, &excluded, &[])));
    }
    let report = json!({
        "input": file.display().to_string(),
        "verdicts": verdicts.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
    });
    Ok(Outcome { summary, report, files })
}

fn cofinal(c: &Command) -> Result<Outcome> {
    let Command::Cofinal {
        file,
        order: spec,
        element,
        boundary,
        peripheral: periph,
        radius,
        n_max,
        realise,
    } = c
    else {
        unreachable!()
    };
    let g = load(file)?;
    let o = order(&g, spec)?;
    let n_max = n_max.unwrap_or_else(|| default_n_max(*radius));
    if *boundary {
        let p = peripheral(&g, periph)?;
        let b = boundary_cofinality_report(&o, &p, *radius, n_max)?;
        let s = format!(
            "boundary cofinality of {} on {periph}: {:?} (witness {})\n",
            o.provenance.describe(),
            b.verdict,
            b.witness.as_deref().unwrap_or("none")
        );
        return Ok(Outcome::new(s, serde_json::to_value(&b)?));
    }
    let w = element
        .as_deref()
        .ok_or_else(|| ordlab::Error::Invalid("give --element or --boundary".to_string()))?;
    let word = g.parse_word(w)?;
    let action = if *realise {
        Some(build_realisation(&o, *radius)?)
    } else {
        None
    };
    let r = cofinality_check(&o, &word, *radius, n_max, action.as_ref())?;
    let s = format!(
        "{w} under {}: {:?} (positive orientation {})\n",
        o.provenance.describe(),
        r.verdict,
        r.element
    );
    Ok(Outcome::new(s, serde_json::to_value(&r)?))
}

fn dynreal(file: &Path, spec: &str, radius: usize, elements: &[String], svg: Option<&Path>) -> Result<Outcome> {
    let g = load(file)?;
    let o = order(&g, spec)?;
    let a = build_realisation(&o, radius)?;
    let (lo, hi) = a.window();
    let mut s = format!(
        "realisation of {} on [{lo}, {hi}] from {} ball elements\n",
        o.provenance.describe(),
        a.table().len()
    );
    let gens: Vec<Value> = (0..g.rank())
        .map(|i| json!({"generator": g.presentation.generators[i], "map": a.generator(i).to_table()}))
        .collect();
    let mut reports = Vec::new();
    let mut plotted = Vec::new();
    for e in elements {
        let w = g.parse_word(e)?;
        let fp = a.fixed_points(&w);
        let _ = writeln!(s, "{e}: {:?}", fp.verdict);
        reports.push(fp.to_json(&g));
        plotted.push((e.clone(), w));
    }
    let mut out = Outcome::new(
        s,
        json!({"order": o.provenance.describe(), "window": [lo.to_string(), hi.to_string()], "generators": gens, "fixed_points": reports}),
    );
    if let Some(path) = svg {
        if plotted.is_empty() {
            plotted = (0..g.rank())
                .map(|i| (g.presentation.generators[i].clone(), ordlab::Word::gen(i)))
                .collect();
        }
        out.files.push((path.to_path_buf(), svg_graphs(&a, &plotted)));
    }
    Ok(out)
}

fn glue(file: &Path, assign: &str, radius: usize, r_conj: usize, compat: Option<usize>) -> Result<Outcome> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let base = file.parent().unwrap_or(Path::new("."));
    let graph = ordlab::gluing::GluingGraph::parse(&text, base)?;
    let assignment = parse_assignment(assign)?;
    let opts = CoherenceOptions {
        r_conj,
        r_slope: radius,
    };
    let rep = coherence_check(&graph, &assignment, &fixture_orders, &opts)?;
    let mut s = if rep.passes {
        format!("gluing coherent at radius {r_conj}\n")
    } else {
        format!("not coherent: {}\n", rep.failure.as_deref().unwrap_or(""))
    };
    let mut report = serde_json::to_value(&rep)?;
    if let Some(r) = compat {
        let tori = graph.tori();
        let mut checks = Vec::new();
        for e in &graph.edges {
            let family = |v: &(String, String)| -> Result<NormalFamilyFixture> {
                let vx = graph.vertex(&v.0).expect("validated edge");
                let slopes: Vec<Slope> = tori
                    .iter()
                    .zip(&assignment)
                    .filter(|(t, _)| t.0 == v.0)
                    .map(|(_, s)| *s)
                    .collect();
                Ok(NormalFamilyFixture::new(
                    v.0.clone(),
                    fixture_orders(&vx.group, &slopes)?,
                )?)
            };
            let c = bludov_glass_check(&family(&e.from)?, &family(&e.to)?, &e.map, r)?;
            let _ = writeln!(
                s,
                "edge {}.{} -> {}.{}: {:?}",
                e.from.0, e.from.1, e.to.0, e.to.1, c.verdict
            );
            checks.push(serde_json::to_value(&c)?);
        }
        report["compatibility"] = json!(checks);
    }
    report["input"] = json!(file.display().to_string());
    Ok(Outcome::new(s, report))
}

fn certify(file: &Path, max_radius: usize, opts: &SearchOptions, cert_path: Option<&Path>) -> Result<Outcome> {
    let g = load(file)?;
    match certify_nonorderable(&g, max_radius, opts)? {
        Some(cert) => {
            let mut o = Outcome::new(
                format!(
                    "not left-orderable: refutation at radius {} with {} leaves\n",
                    cert.radius,
                    cert.root.leaves()
                ),
                json!({"input": file.display().to_string(), "certified": true, "radius": cert.radius, "leaves": cert.root.leaves()}),
            );
            if let Some(p) = cert_path {
                o.files.push((p.to_path_buf(), cert.to_text(&g)));
            }
            Ok(o)
        }
        None => Ok(Outcome::new(
            format!("no certificate up to radius {max_radius}\n"),
            json!({"input": file.display().to_string(), "certified": false, "max_radius": max_radius}),
        )),
    }
}
