//! Model files and their resolution. A model is either a JSON document
//! on disk or a catalog id (exact, or an unambiguous fragment like
//! `minisuperspace`); both resolve to the same working context.
//!
//! Model-file schema (all expressions use the shared grammar):
//!
//! ```json
//! {
//!   "chart": ["x", "y"],
//!   "metric": [["1", "0"], ["0", "1"]],
//!   "singular": ["x"],
//!   "potential": "x^(-2)*f(y/x)",
//!   "vector_fields": { "dilation": { "x": "x", "y": "y" } },
//!   "lagrangian": { "potential": "-2*a", "time": "t" },
//!   "constants": { "m": [0.5, 1.0] },
//!   "opaque": { "f": { "arity": 1, "default": "s^2" } }
//! }
//! ```
//!
//! Formal parameters of `opaque` defaults are `s` for arity 1, `s, t`
//! for arity 2, and `s1..sk` beyond.

use std::collections::BTreeMap;

use geosym_core::catalog::{Catalog, EntryKind, Instantiation, Payload};
use geosym_core::expr::{Expr, SampleDomain};
use geosym_core::geometry::{Chart, Metric, VectorField};
use geosym_core::symmetry::Lagrangian;
use serde::Deserialize;

#[derive(Debug)]
pub struct ModelError(pub String);

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError(msg.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    chart: Vec<String>,
    metric: Vec<Vec<String>>,
    #[serde(default)]
    singular: Vec<String>,
    #[serde(default)]
    potential: Option<String>,
    #[serde(default)]
    vector_fields: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    lagrangian: Option<LagrangianFile>,
    #[serde(default)]
    constants: BTreeMap<String, (f64, f64)>,
    #[serde(default)]
    opaque: BTreeMap<String, OpaqueFile>,
}

#[derive(Debug, Deserialize)]
struct LagrangianFile {
    potential: String,
    #[serde(default = "default_time")]
    time: String,
}

fn default_time() -> String {
    "t".to_string()
}

#[derive(Debug, Deserialize)]
struct OpaqueFile {
    arity: usize,
    default: String,
}

/// Formal parameter names for opaque defaults, by arity.
pub fn formal_params(arity: usize) -> Vec<String> {
    match arity {
        1 => vec!["s".to_string()],
        2 => vec!["s".to_string(), "t".to_string()],
        k => (1..=k).map(|i| format!("s{i}")).collect(),
    }
}

/// Resolved working context for the checks.
pub struct ModelContext {
    /// Display name (file path or catalog id).
    #[allow(dead_code)]
    pub name: String,
    pub metric: Metric,
    pub potential: Option<Expr>,
    pub vectors: BTreeMap<String, VectorField>,
    pub lagrangian: Option<Lagrangian>,
    pub domain: SampleDomain,
    pub instantiations: Vec<Instantiation>,
}

impl ModelContext {
    pub fn vector(&self, name: &str) -> Result<&VectorField, ModelError> {
        if let Some(v) = self.vectors.get(name) {
            return Ok(v);
        }
        // case-insensitive fallback
        let lower = name.to_lowercase();
        let mut matches: Vec<&String> = self
            .vectors
            .keys()
            .filter(|k| k.to_lowercase() == lower)
            .collect();
        matches.sort();
        match matches.len() {
            1 => Ok(&self.vectors[matches[0]]),
            0 => err(format!(
                "vector field '{name}' not found; available: {}",
                self.vectors.keys().cloned().collect::<Vec<_>>().join(", ")
            )),
            _ => err(format!("vector field '{name}' is ambiguous")),
        }
    }

    /// Applies every default instantiation whose function occurs in the
    /// expression; errors when an opaque function remains unbound.
    pub fn instantiate_fully(&self, e: &Expr, what: &str) -> Result<Expr, ModelError> {
        let mut out = e.clone();
        for inst in &self.instantiations {
            if out.opaque_names().contains(&inst.name) {
                out = inst.apply(&out);
            }
        }
        let leftover = out.opaque_names();
        if !leftover.is_empty() {
            return err(format!(
                "{what} uses arbitrary function(s) {:?} with no instantiation; declare them under \"opaque\" or pass --define",
                leftover.into_iter().collect::<Vec<_>>()
            ));
        }
        Ok(out)
    }
}

fn parse_expr(s: &str, what: &str) -> Result<Expr, ModelError> {
    Expr::parse(s).map_err(|e| ModelError(format!("{what}: {e} in '{s}'")))
}

pub fn load_model(catalog: &Catalog, spec: &str) -> Result<ModelContext, ModelError> {
    if std::path::Path::new(spec).is_file() {
        load_model_file(spec)
    } else {
        load_catalog_model(catalog, spec)
    }
}

fn load_model_file(path: &str) -> Result<ModelContext, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError(format!("cannot read '{path}': {e}")))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| ModelError(format!("'{path}' does not match the model schema: {e}")))?;

    if file.chart.is_empty() {
        return err("chart must list at least one coordinate");
    }
    let coords: Vec<&str> = file.chart.iter().map(|s| s.as_str()).collect();
    let mut chart = Chart::new(&coords);
    for s in &file.singular {
        chart = chart.with_singular(parse_expr(s, "singular set")?);
    }

    let n = chart.dim();
    if file.metric.len() != n || file.metric.iter().any(|r| r.len() != n) {
        return err("metric must be an n x n array of expression strings");
    }
    let mut rows = Vec::new();
    for r in &file.metric {
        let mut row = Vec::new();
        for s in r {
            row.push(parse_expr(s, "metric component")?);
        }
        rows.push(row);
    }
    let metric =
        Metric::new(chart.clone(), rows).map_err(|e| ModelError(format!("metric: {e}")))?;

    let mut vectors = BTreeMap::new();
    for (name, comps) in &file.vector_fields {
        let mut v = Vec::new();
        for c in chart.coords() {
            let Some(expr) = comps.get(c) else {
                return err(format!(
                    "vector field '{name}' is missing component '{c}'"
                ));
            };
            v.push(parse_expr(expr, "vector component")?);
        }
        let field = VectorField::new(chart.clone(), v)
            .map_err(|e| ModelError(format!("vector '{name}': {e}")))?;
        vectors.insert(name.clone(), field);
    }

    let potential = match &file.potential {
        Some(p) => Some(parse_expr(p, "potential")?),
        None => None,
    };

    let lagrangian = match &file.lagrangian {
        Some(l) => Some(
            Lagrangian::new(metric.clone(), parse_expr(&l.potential, "lagrangian")?, &l.time)
                .map_err(|e| ModelError(format!("lagrangian: {e}")))?,
        ),
        None => None,
    };

    let mut domain = SampleDomain::default();
    for c in chart.coords() {
        domain = domain.with_interval(c, 0.7, 1.8);
    }
    for (name, (lo, hi)) in &file.constants {
        if hi <= lo {
            return err(format!("constant '{name}': empty interval"));
        }
        domain = domain.with_interval(name, *lo, *hi);
    }
    for s in chart.singular_sets() {
        domain = domain.with_avoid(s.clone());
    }

    let mut instantiations = Vec::new();
    for (name, o) in &file.opaque {
        if o.arity == 0 {
            return err(format!("opaque '{name}': arity must be at least 1"));
        }
        let params = formal_params(o.arity);
        let body = parse_expr(&o.default, "opaque default")?;
        for sym in body.free_symbols() {
            let _ = sym; // formal check below covers arity mismatches at use sites
        }
        let params_ref: Vec<&str> = params.iter().map(|p| p.as_str()).collect();
        instantiations.push(Instantiation::new(
            name,
            &params_ref,
            &format!("{body}"),
        ));
    }

    Ok(ModelContext {
        name: path.to_string(),
        metric,
        potential,
        vectors,
        lagrangian,
        domain,
        instantiations,
    })
}

/// Resolves a catalog fragment to a metric or Lagrangian entry and
/// assembles the context (linked vectors come along). Preference
/// order: metrics before Lagrangians, entries with linked vector
/// fields before bare ones, then lexicographic id.
fn load_catalog_model(catalog: &Catalog, fragment: &str) -> Result<ModelContext, ModelError> {
    let entry = match catalog.load(fragment) {
        Some(e) => e,
        None => {
            let linked_vectors = |id: &str| -> usize {
                catalog
                    .enumerate(Some(EntryKind::Vector))
                    .iter()
                    .filter(|ve| {
                        matches!(&ve.payload, Payload::Vector { metric_id, .. } if *metric_id == id)
                    })
                    .count()
            };
            let mut candidates: Vec<_> = catalog
                .enumerate(None)
                .into_iter()
                .filter(|e| {
                    matches!(e.kind, EntryKind::Metric | EntryKind::Lagrangian)
                        && e.id.contains(fragment)
                })
                .collect();
            candidates.sort_by_key(|e| {
                (
                    if e.kind == EntryKind::Metric { 0 } else { 1 },
                    usize::MAX - linked_vectors(e.id),
                    e.id,
                )
            });
            match candidates.first() {
                Some(e) => *e,
                None => {
                    return err(format!(
                        "no catalog metric or Lagrangian matches '{fragment}' (try `geosym catalog list`)"
                    ))
                }
            }
        }
    };
    let (metric, lagrangian, metric_id) = match &entry.payload {
        Payload::Metric(m) => (m.clone(), None, entry.id),
        Payload::Lagrangian(l) => (l.kinetic_metric().clone(), Some(l.clone()), entry.id),
        _ => return err(format!("'{}' is not a metric or Lagrangian", entry.id)),
    };
    // Vectors resolve by name: anything on the same chart is
    // addressable, with exact metric links taking precedence on a
    // name collision.
    let mut vectors = BTreeMap::new();
    for exact_pass in [false, true] {
        for ve in catalog.enumerate(Some(EntryKind::Vector)) {
            let Payload::Vector {
                metric_id: linked,
                field,
            } = &ve.payload
            else {
                continue;
            };
            let exact = *linked == metric_id;
            let compatible = field.chart().coords() == metric.chart().coords();
            if (exact_pass && exact) || (!exact_pass && compatible) {
                let short = ve.id.rsplit('.').next().unwrap_or(ve.id).to_string();
                vectors.insert(short, field.clone());
            }
        }
    }
    Ok(ModelContext {
        name: entry.id.to_string(),
        metric,
        potential: None,
        vectors,
        lagrangian,
        domain: entry.domain.clone(),
        instantiations: entry.instantiations.clone(),
    })
}

/// Exact id, else unique substring match among the given kinds
/// (deterministic tie-break: shortest id, then lexicographic).
pub fn resolve_entry<'c>(
    catalog: &'c Catalog,
    fragment: &str,
    kinds: &[EntryKind],
) -> Result<&'c geosym_core::catalog::CatalogEntry, ModelError> {
    if let Some(e) = catalog.load(fragment) {
        return Ok(e);
    }
    let mut candidates: Vec<_> = catalog
        .enumerate(None)
        .into_iter()
        .filter(|e| kinds.contains(&e.kind) && e.id.contains(fragment))
        .collect();
    candidates.sort_by_key(|e| (e.id.len(), e.id));
    match candidates.len() {
        0 => err(format!(
            "no catalog entry matches '{fragment}' (try `geosym catalog list`)"
        )),
        _ => Ok(candidates[0]),
    }
}
