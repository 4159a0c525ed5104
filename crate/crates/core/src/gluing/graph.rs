use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use super::{transport_slope, GluingMap};
use crate::detection::{regular_detect_check, DetectionVerdict};
use crate::error::{Error, Result};
use crate::lattice::{classify_line_orders, LatticeLine, Slope};
use crate::orders::{klein_orders, torus_lex_order, OrderOracle};
use crate::presentations::{parse_presentation, Family, GroupBackend};

#[derive(Debug, Clone)]
pub struct Vertex {
    pub name: String,
    pub group: Arc<GroupBackend>,
    pub source: Option<PathBuf>,
    /// Allowed slopes per peripheral torus; absent tori are unconstrained.
    pub candidates: HashMap<String, Vec<Slope>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingEdge {
    pub from: (String, String),
    pub to: (String, String),
    pub map: GluingMap,
}

/// Pieces joined along peripheral tori. Each torus is glued at most once.
#[derive(Debug, Clone, Default)]
pub struct GluingGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<GluingEdge>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column: 1,
        message: message.into(),
    }
}

fn split_endpoint(s: &str, line: usize) -> Result<(String, String)> {
    s.split_once('.')
        .map(|(v, t)| (v.to_string(), t.to_string()))
        .ok_or_else(|| syntax(line, format!("expected `vertex.torus`, got `{s}`")))
}

impl GluingGraph {
    pub fn add_vertex(&mut self, name: impl Into<String>, group: Arc<GroupBackend>) -> Result<()> {
        let name = name.into();
        if self.vertex(&name).is_some() {
            return Err(Error::Invalid(format!("duplicate vertex `{name}`")));
        }
        self.vertices.push(Vertex {
            name,
            group,
            source: None,
            candidates: HashMap::new(),
        });
        Ok(())
    }

    /// Glues `from = (vertex, torus)` to `to` by `matrix`.
    pub fn add_edge(&mut self, from: (&str, &str), to: (&str, &str), matrix: [[i64; 2]; 2]) -> Result<()> {
        for (v, t) in [from, to] {
            let vx = self
                .vertex(v)
                .ok_or_else(|| Error::Invalid(format!("unknown vertex `{v}`")))?;
            if vx.group.peripheral(t).is_none() {
                return Err(Error::Invalid(format!("vertex `{v}` has no peripheral `{t}`")));
            }
        }
        let used: HashSet<(&str, &str)> = self
            .edges
            .iter()
            .flat_map(|e| {
                [
                    (e.from.0.as_str(), e.from.1.as_str()),
                    (e.to.0.as_str(), e.to.1.as_str()),
                ]
            })
            .collect();
        if from == to || used.contains(&from) || used.contains(&to) {
            return Err(Error::Invalid(format!(
                "torus {}.{} or {}.{} is glued twice",
                from.0, from.1, to.0, to.1
            )));
        }
        let map = GluingMap::new(from.1, to.1, matrix)?;
        self.edges.push(GluingEdge {
            from: (from.0.to_string(), from.1.to_string()),
            to: (to.0.to_string(), to.1.to_string()),
            map,
        });
        Ok(())
    }

    pub fn vertex(&self, name: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.name == name)
    }

    /// Reads the line format
    ///
    /// ```text
    /// vertex K1 klein.grp
    /// candidates K1.T 0/1 1/0
    /// edge K1.T K2.T [[1,0],[0,1]]
    /// ```
    ///
    /// with presentation paths relative to `base`. `#` starts a comment.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut g = GluingGraph::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut parts = body.splitn(2, char::is_whitespace);
            let head = parts.next().unwrap_or("");
            let rest = parts.next().unwrap_or("").trim();
            match head {
                "vertex" => {
                    let (name, path) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| syntax(line, "expected `vertex <name> <path>`"))?;
                    let path = base.join(path.trim());
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
                    let group = Arc::new(GroupBackend::from_presentation(parse_presentation(&text)?)?);
                    g.add_vertex(name, group).map_err(|e| syntax(line, e.to_string()))?;
                    g.vertices.last_mut().expect("just added").source = Some(path);
                }
                "candidates" => {
                    let mut it = rest.split_whitespace();
                    let (v, t) = split_endpoint(it.next().unwrap_or(""), line)?;
                    let slopes: Vec<Slope> = it.map(|s| s.parse()).collect::<Result<_>>()?;
                    let vx = g
                        .vertices
                        .iter_mut()
                        .find(|x| x.name == v)
                        .ok_or_else(|| syntax(line, format!("unknown vertex `{v}`")))?;
                    vx.candidates.insert(t, slopes);
                }
                "edge" => {
                    let mut it = rest.splitn(3, char::is_whitespace);
                    let from = split_endpoint(it.next().unwrap_or(""), line)?;
                    let to = split_endpoint(it.next().unwrap_or("").trim(), line)?;
                    let m = it.next().unwrap_or("").trim();
                    let matrix: [[i64; 2]; 2] =
                        serde_json::from_str(m).map_err(|e| syntax(line, format!("bad matrix `{m}`: {e}")))?;
                    g.add_edge((&from.0, &from.1), (&to.0, &to.1), matrix)
                        .map_err(|e| syntax(line, e.to_string()))?;
                }
                other => return Err(syntax(line, format!("unknown directive `{other}`"))),
            }
        }
        Ok(g)
    }

    /// Every `(vertex, torus)` in declaration order; assignments follow it.
    pub fn tori(&self) -> Vec<(String, String)> {
        self.vertices
            .iter()
            .flat_map(|v| v.group.peripherals().iter().map(|p| (v.name.clone(), p.name.clone())))
            .collect()
    }
}

/// Parses a comma-separated slope list; `l`/`λ` is `0/1` and `m`/`μ` is `1/0`.
pub fn parse_assignment(text: &str) -> Result<Vec<Slope>> {
    text.split(',')
        .map(|t| match t.trim() {
            "l" | "λ" => Slope::rational(0, 1),
            "m" | "μ" => Slope::rational(1, 0),
            s => s.parse(),
        })
        .collect()
}

/// Built-in candidate witnesses for a vertex with the given multislope.
pub fn fixture_orders(group: &Arc<GroupBackend>, slopes: &[Slope]) -> Result<Vec<OrderOracle>> {
    Ok(match group.family {
        Family::KleinBottle { .. } => klein_orders(group.clone())?,
        Family::TorusKnot { .. } => [(true, true), (true, false), (false, true), (false, false)]
            .into_iter()
            .map(|(k, q)| torus_lex_order(group.clone(), k, q))
            .collect::<Result<_>>()?,
        Family::Zn(2) => match slopes.first() {
            Some(s) => classify_line_orders(group.clone(), &LatticeLine::new(*s, 1))?,
            None => Vec::new(),
        },
        _ => Vec::new(),
    })
}

/// Candidate witness orders for a vertex group carrying the given multislope.
pub type WitnessSource = dyn Fn(&Arc<GroupBackend>, &[Slope]) -> Result<Vec<OrderOracle>>;

#[derive(Debug, Clone, Copy)]
pub struct CoherenceOptions {
    pub r_conj: usize,
    pub r_slope: usize,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        CoherenceOptions { r_conj: 3, r_slope: 3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeReport {
    pub edge: String,
    pub source_slope: String,
    pub transported: String,
    pub target_slope: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexReport {
    pub vertex: String,
    pub multislope: Vec<String>,
    pub ok: bool,
    pub witness: Option<String>,
    pub verdicts: Vec<serde_json::Value>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherenceReport {
    pub passes: bool,
    pub radius: usize,
    pub edges: Vec<EdgeReport>,
    pub vertices: Vec<VertexReport>,
    pub failure: Option<String>,
    pub interpretation: Option<String>,
}

/// Checks that an assignment of slopes is coherent: glued tori carry
/// matching slopes, and each vertex has one order regularly detecting its
/// whole multislope at radius `r_conj`.
pub fn coherence_check(
    graph: &GluingGraph,
    assignment: &[Slope],
    witnesses: &WitnessSource,
    opts: &CoherenceOptions,
) -> Result<CoherenceReport> {
    let tori = graph.tori();
    if tori.len() != assignment.len() {
        return Err(Error::Invalid(format!(
            "assignment has {} slopes for {} tori",
            assignment.len(),
            tori.len()
        )));
    }
    let slope_of: HashMap<(String, String), Slope> = tori.iter().cloned().zip(assignment.iter().copied()).collect();
    let mut failure = None;

    let mut edges = Vec::new();
    for e in &graph.edges {
        let s = slope_of[&e.from];
        let t = slope_of[&e.to];
        let moved = transport_slope(&e.map, &s);
        let name = format!("{}.{} -> {}.{}", e.from.0, e.from.1, e.to.0, e.to.1);
        if moved != t && failure.is_none() {
            failure = Some(format!("edge {name}: {s} is sent to {moved}, not {t}"));
        }
        edges.push(EdgeReport {
            edge: name,
            source_slope: s.to_string(),
            transported: moved.to_string(),
            target_slope: t.to_string(),
            ok: moved == t,
        });
    }

    let mut vertices = Vec::new();
    for v in &graph.vertices {
        let ps = v.group.peripherals();
        let slopes: Vec<Slope> = ps.iter().map(|p| slope_of[&(v.name.clone(), p.name.clone())]).collect();
        let mut rep = VertexReport {
            vertex: v.name.clone(),
            multislope: slopes.iter().map(|s| s.to_string()).collect(),
            ok: false,
            witness: None,
            verdicts: Vec::new(),
            reason: None,
        };
        let excluded = ps
            .iter()
            .zip(&slopes)
            .find(|(p, s)| v.candidates.get(&p.name).is_some_and(|c| !c.contains(s)));
        if let Some((p, s)) = excluded {
            rep.reason = Some(format!("{s} is not a candidate slope on {}", p.name));
        } else {
            'orders: for o in witnesses(&v.group, &slopes)? {
                let mut verdicts: Vec<DetectionVerdict> = Vec::new();
                for (p, s) in ps.iter().zip(&slopes) {
                    let d = regular_detect_check(&o, p, s, opts.r_conj, opts.r_slope)?;
                    if !d.is_certified() {
                        continue 'orders;
                    }
                    verdicts.push(d);
                }
                rep.ok = true;
                rep.witness = Some(o.provenance.describe());
                rep.verdicts = verdicts.iter().map(|d| d.to_json()).collect();
                break;
            }
            if !rep.ok {
                rep.reason = Some("no witness order regularly detects the multislope".to_string());
            }
        }
        if !rep.ok && failure.is_none() {
            failure = Some(format!("vertex {}: {}", v.name, rep.reason.clone().unwrap_or_default()));
        }
        vertices.push(rep);
    }

    let passes = failure.is_none();
    Ok(CoherenceReport {
        passes,
        radius: opts.r_conj,
        edges,
        vertices,
        failure,
        interpretation: passes.then(|| {
            format!(
                "gluing coherent at radius {}: with witnesses that are genuine regular detections, the glued group is left-orderable",
                opts.r_conj
            )
        }),
    })
}
