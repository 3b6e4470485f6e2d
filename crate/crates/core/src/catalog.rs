//! Machine-readable library of metrics, vector fields, potential
//! families, Lagrangians, first integrals, PDE models, closed-form
//! solutions, generator/potential table rows and drift scenarios, each
//! with its sampling domain and default instantiations for arbitrary
//! functions.
//!
//! Entries are identified by stable dotted ids
//! (`metric.minisuperspace.sc01a`, `table1.row5`, ...); enumeration is
//! id-sorted and the whole catalog is immutable after construction.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::expr::{Bindings, Expr, SampleDomain, ZeroOptions};
use crate::geometry::{Chart, Metric, PdeModel, VectorField};
use crate::symmetry::{
    self, ConstraintReport, Lagrangian, SymmetryError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryKind {
    Metric,
    Vector,
    Potential,
    Lagrangian,
    Integral,
    Pde,
    Solution,
    TableRow,
    Scenario,
}

impl EntryKind {
    pub fn name(self) -> &'static str {
        match self {
            EntryKind::Metric => "metric",
            EntryKind::Vector => "vector",
            EntryKind::Potential => "potential",
            EntryKind::Lagrangian => "lagrangian",
            EntryKind::Integral => "integral",
            EntryKind::Pde => "pde",
            EntryKind::Solution => "solution",
            EntryKind::TableRow => "table-row",
            EntryKind::Scenario => "scenario",
        }
    }

    pub fn from_name(s: &str) -> Option<EntryKind> {
        Some(match s {
            "metric" => EntryKind::Metric,
            "vector" => EntryKind::Vector,
            "potential" => EntryKind::Potential,
            "lagrangian" => EntryKind::Lagrangian,
            "integral" => EntryKind::Integral,
            "pde" => EntryKind::Pde,
            "solution" => EntryKind::Solution,
            "table-row" => EntryKind::TableRow,
            "scenario" => EntryKind::Scenario,
            _ => return None,
        })
    }
}

/// Default instantiation for an arbitrary (opaque) function.
#[derive(Clone, Debug)]
pub struct Instantiation {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
}

impl Instantiation {
    pub fn new(name: &str, params: &[&str], body: &str) -> Instantiation {
        Instantiation {
            name: name.to_string(),
            params: params.iter().map(|p| p.to_string()).collect(),
            body: Expr::parse(body).expect("catalog instantiation parses"),
        }
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        let params: Vec<&str> = self.params.iter().map(|p| p.as_str()).collect();
        e.instantiate(&self.name, &params, &self.body)
    }

    pub fn bind(&self, bindings: &mut Bindings) {
        let params: Vec<&str> = self.params.iter().map(|p| p.as_str()).collect();
        bindings.define(&self.name, &params, self.body.clone());
    }
}

/// One generator/potential pair of the flat-space classification
/// tables.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub table: u8,
    pub label: &'static str,
    pub metric_id: &'static str,
    pub generator: VectorField,
    pub potential: Expr,
    /// Populated when the row cannot be verified as printed; carries
    /// the reason it is reported `Skipped`.
    pub skip: Option<&'static str>,
}

/// Numeric drift scenario: a Lagrangian, concrete constants and
/// initial data, and the first integrals to monitor.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub lagrangian_id: &'static str,
    pub constants: Vec<(&'static str, f64)>,
    /// Initial coordinates followed by initial velocities.
    pub initial: Vec<f64>,
    pub span: (f64, f64),
    pub step: f64,
    pub integral_ids: Vec<&'static str>,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Metric(Metric),
    Vector {
        metric_id: &'static str,
        field: VectorField,
    },
    Potential {
        metric_id: &'static str,
        expr: Expr,
    },
    Lagrangian(Lagrangian),
    Integral {
        scenario_hint: Option<&'static str>,
        expr: Expr,
        /// Convention note when the stored expression differs from the
        /// crate's Noether-integral output by an overall sign.
        sign_note: Option<&'static str>,
    },
    Pde(PdeModel),
    Solution {
        /// The PDE (or Lagrangian) entry this family solves.
        pde_id: &'static str,
        field: Expr,
        /// For trajectory families: per-coordinate closed forms in the
        /// evolution parameter (empty for PDE candidates).
        components: Vec<(&'static str, Expr)>,
        constants: Vec<(&'static str, f64)>,
    },
    TableRow(TableRow),
    Scenario(Scenario),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    pub payload: Payload,
    pub domain: SampleDomain,
    pub instantiations: Vec<Instantiation>,
}

impl CatalogEntry {
    pub fn metric(&self) -> Option<&Metric> {
        match &self.payload {
            Payload::Metric(m) => Some(m),
            _ => None,
        }
    }

    pub fn lagrangian(&self) -> Option<&Lagrangian> {
        match &self.payload {
            Payload::Lagrangian(l) => Some(l),
            _ => None,
        }
    }

    pub fn table_row(&self) -> Option<&TableRow> {
        match &self.payload {
            Payload::TableRow(r) => Some(r),
            _ => None,
        }
    }

    pub fn scenario(&self) -> Option<&Scenario> {
        match &self.payload {
            Payload::Scenario(s) => Some(s),
            _ => None,
        }
    }
}

pub struct Catalog {
    entries: BTreeMap<&'static str, CatalogEntry>,
}

/// Result of running a drift scenario.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub trajectory: crate::dynamics::Trajectory,
    pub drifts: Vec<(String, crate::dynamics::DriftReport)>,
}

#[derive(Clone, Debug)]
pub enum ScenarioError {
    UnknownId(String),
    Symmetry(SymmetryError),
    Dynamics(crate::dynamics::DynamicsError),
}

impl core::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScenarioError::UnknownId(id) => write!(f, "unknown catalog id '{id}'"),
            ScenarioError::Symmetry(e) => write!(f, "{e}"),
            ScenarioError::Dynamics(e) => write!(f, "{e}"),
        }
    }
}

fn dom(pairs: &[(&str, f64, f64)]) -> SampleDomain {
    let mut d = SampleDomain::default();
    for (name, lo, hi) in pairs {
        d = d.with_interval(name, *lo, *hi);
    }
    d
}

fn coords_dom(coords: &[&str]) -> SampleDomain {
    let mut d = SampleDomain::default();
    for c in coords {
        d = d.with_interval(c, 0.7, 1.8);
    }
    d
}

/// The two default instantiations used for every one-argument
/// arbitrary function: smooth, with nonvanishing derivatives on the
/// sampling boxes.
pub fn default_instantiations_1(name: &str) -> Vec<Instantiation> {
    vec![
        Instantiation::new(name, &["s"], "s^2"),
        Instantiation::new(name, &["s"], "exp(s)"),
    ]
}

/// Default pair for two-argument arbitrary functions.
pub fn default_instantiations_2(name: &str) -> Vec<Instantiation> {
    vec![
        Instantiation::new(name, &["s", "t"], "s*t"),
        Instantiation::new(name, &["s", "t"], "exp(s) + t^2"),
    ]
}

impl Catalog {
    pub fn load(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.get(id)
    }

    /// Id-sorted enumeration, optionally filtered by kind.
    pub fn enumerate(&self, kind: Option<EntryKind>) -> Vec<&CatalogEntry> {
        self.entries
            .values()
            .filter(|e| kind.map(|k| e.kind == k).unwrap_or(true))
            .collect()
    }

    pub fn table_rows(&self, table: u8) -> Vec<&CatalogEntry> {
        self.entries
            .values()
            .filter(|e| matches!(&e.payload, Payload::TableRow(r) if r.table == table))
            .collect()
    }

    /// Resolves a metric id to its payload.
    pub fn metric(&self, id: &str) -> Option<&Metric> {
        self.load(id).and_then(|e| e.metric())
    }

    pub fn lagrangian(&self, id: &str) -> Option<&Lagrangian> {
        self.load(id).and_then(|e| e.lagrangian())
    }

    /// Verifies one table row: the Klein–Gordon symmetry condition for
    /// the row's generator and potential under every default
    /// instantiation. `None` when the row is flagged skipped.
    pub fn verify_table_row(
        &self,
        entry: &CatalogEntry,
        opts: &ZeroOptions,
    ) -> Option<Result<ConstraintReport, SymmetryError>> {
        let row = entry.table_row()?;
        if row.skip.is_some() {
            return None;
        }
        let metric = self.metric(row.metric_id)?;
        let insts: Vec<(String, Vec<String>, Expr)> = entry
            .instantiations
            .iter()
            .map(|i| (i.name.clone(), i.params.clone(), i.body.clone()))
            .collect();
        Some(symmetry::verify_potential_family(
            metric,
            &row.generator,
            &row.potential,
            &insts,
            &entry.domain,
            opts,
        ))
    }

    /// Integrates a drift scenario and measures every linked first
    /// integral along the trajectory.
    pub fn run_scenario(
        &self,
        id: &str,
        step_override: Option<f64>,
        span_override: Option<(f64, f64)>,
    ) -> Result<ScenarioRun, ScenarioError> {
        let entry = self
            .load(id)
            .ok_or_else(|| ScenarioError::UnknownId(id.to_string()))?;
        let scenario = entry
            .scenario()
            .ok_or_else(|| ScenarioError::UnknownId(id.to_string()))?;
        let lag_entry = self
            .load(scenario.lagrangian_id)
            .ok_or_else(|| ScenarioError::UnknownId(scenario.lagrangian_id.to_string()))?;
        let lagrangian = lag_entry
            .lagrangian()
            .ok_or_else(|| ScenarioError::UnknownId(scenario.lagrangian_id.to_string()))?;

        // Scenario instantiations first, then the Lagrangian entry's
        // own defaults for anything still opaque.
        let instantiate_all = |e: &Expr| -> Expr {
            let mut out = e.clone();
            for inst in entry
                .instantiations
                .iter()
                .chain(lag_entry.instantiations.iter())
            {
                if out.opaque_names().contains(&inst.name) {
                    out = inst.apply(&out);
                }
            }
            out
        };

        let potential = instantiate_all(lagrangian.potential());
        let concrete =
            Lagrangian::new(lagrangian.kinetic_metric().clone(), potential, lagrangian.time())
                .map_err(ScenarioError::Symmetry)?;
        let sys = crate::dynamics::euler_lagrange(&concrete).map_err(ScenarioError::Dynamics)?;

        let mut constants = Bindings::new();
        for (name, value) in &scenario.constants {
            constants.set(name, *value);
        }
        let span = span_override.unwrap_or(scenario.span);
        let step = step_override.unwrap_or(scenario.step);
        let trajectory =
            crate::dynamics::integrate(&sys, &scenario.initial, span, step, &constants)
                .map_err(ScenarioError::Dynamics)?;

        let mut drifts = Vec::new();
        for integral_id in &scenario.integral_ids {
            let ie = self
                .load(integral_id)
                .ok_or_else(|| ScenarioError::UnknownId(integral_id.to_string()))?;
            let Payload::Integral { expr, .. } = &ie.payload else {
                return Err(ScenarioError::UnknownId(integral_id.to_string()));
            };
            let mut concrete_integral = expr.clone();
            for inst in entry.instantiations.iter().chain(ie.instantiations.iter()) {
                if concrete_integral.opaque_names().contains(&inst.name) {
                    concrete_integral = inst.apply(&concrete_integral);
                }
            }
            let report =
                crate::dynamics::drift(&sys, &trajectory, &concrete_integral, &constants)
                    .map_err(ScenarioError::Dynamics)?;
            drifts.push((integral_id.to_string(), report));
        }
        Ok(ScenarioRun {
            trajectory,
            drifts,
        })
    }

    /// Builds the full standard catalog.
    pub fn standard() -> Catalog {
        let mut entries: BTreeMap<&'static str, CatalogEntry> = BTreeMap::new();
        let mut put = |e: CatalogEntry| {
            let prev = entries.insert(e.id, e);
            assert!(prev.is_none(), "duplicate catalog id");
        };

        // ---- charts ---------------------------------------------------
        let e2 = Chart::new(&["x", "y"]);
        let e3 = Chart::new(&["x", "y", "z"]);
        let polar2 = Chart::new(&["r", "theta"]).with_singular(ex("r"));
        let spherical3 = Chart::new(&["r", "theta", "phi"])
            .with_singular(ex("r"))
            .with_singular(ex("sin(theta)"));
        let null2 = Chart::new(&["w", "z"]);
        let mini = Chart::new(&["a", "b"])
            .with_singular(ex("a"))
            .with_singular(ex("b"));
        let m6_chart = Chart::new(&["t", "R", "theta", "phi"])
            .with_singular(ex("R - 2*m"))
            .with_singular(ex("sin(theta)"));
        let sc_chart = Chart::new(&["t", "tau", "theta", "phi"]).with_singular(ex("sin(theta)"));
        let ermakov_chart = Chart::new(&["r", "theta"]).with_singular(ex("r"));

        // ---- metrics ---------------------------------------------------
        put(CatalogEntry {
            id: "metric.euclid2.cartesian",
            kind: EntryKind::Metric,
            description: "Euclidean plane, Cartesian chart",
            payload: Payload::Metric(diag(&e2, &["1", "1"])),
            domain: coords_dom(&["x", "y"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.euclid2.polar",
            kind: EntryKind::Metric,
            description: "Euclidean plane, polar chart",
            payload: Payload::Metric(diag(&polar2, &["1", "r^2"])),
            domain: coords_dom(&["r", "theta"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.euclid3.cartesian",
            kind: EntryKind::Metric,
            description: "Euclidean 3-space, Cartesian chart",
            payload: Payload::Metric(diag(&e3, &["1", "1", "1"])),
            domain: coords_dom(&["x", "y", "z"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.euclid3.spherical",
            kind: EntryKind::Metric,
            description: "Euclidean 3-space, spherical chart",
            payload: Payload::Metric(diag(&spherical3, &["1", "r^2", "r^2*sin(theta)^2"])),
            domain: dom(&[("r", 0.7, 1.8), ("theta", 0.4, 2.7), ("phi", 0.3, 2.8)]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.null2.flat",
            kind: EntryKind::Metric,
            description: "flat plane in null coordinates, line element 2 dw dz",
            payload: Payload::Metric(
                Metric::parse(&null2, &[&["0", "1"], &["1", "0"]]).expect("null metric"),
            ),
            domain: coords_dom(&["w", "z"]),
            instantiations: vec![],
        });
        let s3_conf = "4/(1 + x^2 + y^2 + z^2)^2";
        put(CatalogEntry {
            id: "metric.s3.round",
            kind: EntryKind::Metric,
            description: "round unit 3-sphere, stereographic chart (scalar curvature 6)",
            payload: Payload::Metric(diag(&e3, &[s3_conf, s3_conf, s3_conf])),
            domain: dom(&[("x", 0.3, 1.2), ("y", 0.3, 1.2), ("z", 0.3, 1.2)]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.schwarzschild.sc",
            kind: EntryKind::Metric,
            description: "static spherically symmetric vacuum ansatz with free profiles a(tau), b(tau)",
            payload: Payload::Metric(diag(
                &sc_chart,
                &[
                    "-(af(tau)^2)",
                    "1",
                    "bf(tau)^2",
                    "bf(tau)^2*sin(theta)^2",
                ],
            )),
            domain: dom(&[("tau", 0.7, 1.8), ("theta", 0.4, 2.7), ("t", 0.5, 2.0), ("phi", 0.3, 2.8)]),
            instantiations: vec![
                Instantiation::new("af", &["s"], "1 + s"),
                Instantiation::new("bf", &["s"], "s"),
            ],
        });
        put(CatalogEntry {
            id: "metric.schwarzschild.m6",
            kind: EntryKind::Metric,
            description: "exterior vacuum solution in standard coordinates",
            payload: Payload::Metric(diag(
                &m6_chart,
                &[
                    "-(1 - 2*m/R)",
                    "1/(1 - 2*m/R)",
                    "R^2",
                    "R^2*sin(theta)^2",
                ],
            )),
            domain: dom(&[
                ("t", 0.5, 2.0),
                ("R", 3.0, 5.0),
                ("theta", 0.4, 2.7),
                ("phi", 0.3, 2.8),
                ("m", 0.5, 1.0),
            ]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.minisuperspace.sc01a",
            kind: EntryKind::Metric,
            description: "two-dimensional cosmological kinetic metric (line-element normalization)",
            payload: Payload::Metric(
                Metric::parse(&mini, &[&["0", "2*b"], &["2*b", "2*a"]]).expect("sc01a"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.minisuperspace.kinetic",
            kind: EntryKind::Metric,
            description: "kinetic metric of the cosmological Lagrangian (twice the line-element normalization)",
            payload: Payload::Metric(
                Metric::parse(&mini, &[&["0", "4*b"], &["4*b", "4*a"]]).expect("kinetic"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "metric.conformal.m1",
            kind: EntryKind::Metric,
            description: "conformal family N^2 (4a db^2 + 8b da db) with N = g(b) sqrt(a)",
            payload: Payload::Metric(
                Metric::parse(
                    &mini,
                    &[
                        &["0", "4*a*b*gf(b)^2"],
                        &["4*a*b*gf(b)^2", "4*a^2*gf(b)^2"],
                    ],
                )
                .expect("m1"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![
                Instantiation::new("gf", &["s"], "1"),
                Instantiation::new("gf", &["s"], "s"),
            ],
        });
        put(CatalogEntry {
            id: "metric.conformal.m1g0",
            kind: EntryKind::Metric,
            description: "conformal family member with constant profile, N = g0 sqrt(a)",
            payload: Payload::Metric(
                Metric::parse(
                    &mini,
                    &[
                        &["0", "4*g0^2*a*b"],
                        &["4*g0^2*a*b", "4*g0^2*a^2"],
                    ],
                )
                .expect("m1g0"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![],
        });

        // ---- vector fields --------------------------------------------
        let vector = |id: &'static str,
                      desc: &'static str,
                      metric_id: &'static str,
                      chart: &Chart,
                      comps: &[&str],
                      domain: SampleDomain| CatalogEntry {
            id,
            kind: EntryKind::Vector,
            description: desc,
            payload: Payload::Vector {
                metric_id,
                field: VectorField::parse(chart, comps).expect("catalog vector"),
            },
            domain,
            instantiations: vec![],
        };
        put(vector(
            "vector.euclid2.translation-x",
            "plane translation along x (gradient Killing vector)",
            "metric.euclid2.cartesian",
            &e2,
            &["1", "0"],
            coords_dom(&["x", "y"]),
        ));
        put(vector(
            "vector.euclid2.rotation",
            "plane rotation (non-gradient Killing vector)",
            "metric.euclid2.cartesian",
            &e2,
            &["y", "-x"],
            coords_dom(&["x", "y"]),
        ));
        put(vector(
            "vector.euclid2.dilation",
            "plane dilation (gradient homothetic vector)",
            "metric.euclid2.cartesian",
            &e2,
            &["x", "y"],
            coords_dom(&["x", "y"]),
        ));
        put(vector(
            "vector.euclid3.dilation",
            "dilation of Euclidean 3-space (gradient homothetic vector)",
            "metric.euclid3.cartesian",
            &e3,
            &["x", "y", "z"],
            coords_dom(&["x", "y", "z"]),
        ));
        put(vector(
            "vector.euclid3.spckv.1",
            "special conformal Killing vector with factor x",
            "metric.euclid3.cartesian",
            &e3,
            &["(x^2 - y^2 - z^2)/2", "x*y", "x*z"],
            coords_dom(&["x", "y", "z"]),
        ));
        put(vector(
            "vector.euclid3.spckv.2",
            "special conformal Killing vector with factor y",
            "metric.euclid3.cartesian",
            &e3,
            &["x*y", "(y^2 - x^2 - z^2)/2", "y*z"],
            coords_dom(&["x", "y", "z"]),
        ));
        put(vector(
            "vector.euclid3.spckv.3",
            "special conformal Killing vector with factor z",
            "metric.euclid3.cartesian",
            &e3,
            &["x*z", "y*z", "(z^2 - x^2 - y^2)/2"],
            coords_dom(&["x", "y", "z"]),
        ));
        let s3_dom = dom(&[("x", 0.3, 1.2), ("y", 0.3, 1.2), ("z", 0.3, 1.2)]);
        put(vector(
            "vector.s3.rotation-xy",
            "sphere isometry: rotation in the xy chart plane",
            "metric.s3.round",
            &e3,
            &["y", "-x", "0"],
            s3_dom.clone(),
        ));
        put(vector(
            "vector.s3.rotation-yz",
            "sphere isometry: rotation in the yz chart plane",
            "metric.s3.round",
            &e3,
            &["0", "z", "-y"],
            s3_dom.clone(),
        ));
        put(vector(
            "vector.s3.rotation-zx",
            "sphere isometry: rotation in the zx chart plane",
            "metric.s3.round",
            &e3,
            &["-z", "0", "x"],
            s3_dom.clone(),
        ));
        // translation-like sphere isometries: P_i + K_i in the
        // stereographic chart
        put(vector(
            "vector.s3.translation-x",
            "sphere isometry transverse to the chart equator (x direction)",
            "metric.s3.round",
            &e3,
            &[
                "1 + 2*x^2 - (x^2 + y^2 + z^2)",
                "2*x*y",
                "2*x*z",
            ],
            s3_dom.clone(),
        ));
        put(vector(
            "vector.s3.translation-y",
            "sphere isometry transverse to the chart equator (y direction)",
            "metric.s3.round",
            &e3,
            &["2*x*y", "1 + 2*y^2 - (x^2 + y^2 + z^2)", "2*y*z"],
            s3_dom.clone(),
        ));
        put(vector(
            "vector.s3.translation-z",
            "sphere isometry transverse to the chart equator (z direction)",
            "metric.s3.round",
            &e3,
            &["2*x*z", "2*y*z", "1 + 2*z^2 - (x^2 + y^2 + z^2)"],
            s3_dom.clone(),
        ));
        put(vector(
            "vector.minisuperspace.h",
            "non-gradient homothetic vector of the cosmological kinetic metric",
            "metric.minisuperspace.sc01a",
            &mini,
            &["-2*a", "2*b"],
            coords_dom(&["a", "b"]),
        ));
        put(vector(
            "vector.minisuperspace.x2",
            "proper conformal Killing vector 1/(ab) d_a",
            "metric.minisuperspace.sc01a",
            &mini,
            &["1/(a*b)", "0"],
            coords_dom(&["a", "b"]),
        ));
        put(vector(
            "vector.minisuperspace.x3",
            "proper conformal Killing vector a/(2b) d_a - d_b",
            "metric.minisuperspace.sc01a",
            &mini,
            &["a/(2*b)", "-1"],
            coords_dom(&["a", "b"]),
        ));
        put(vector(
            "vector.m6.time-translation",
            "static Killing vector of the exterior vacuum metric",
            "metric.schwarzschild.m6",
            &m6_chart,
            &["1", "0", "0", "0"],
            dom(&[
                ("t", 0.5, 2.0),
                ("R", 3.0, 5.0),
                ("theta", 0.4, 2.7),
                ("phi", 0.3, 2.8),
                ("m", 0.5, 1.0),
            ]),
        ));
        put(vector(
            "vector.m6.rotation-phi",
            "axial Killing vector of the exterior vacuum metric",
            "metric.schwarzschild.m6",
            &m6_chart,
            &["0", "0", "0", "1"],
            dom(&[
                ("t", 0.5, 2.0),
                ("R", 3.0, 5.0),
                ("theta", 0.4, 2.7),
                ("phi", 0.3, 2.8),
                ("m", 0.5, 1.0),
            ]),
        ));

        // ---- potentials ------------------------------------------------
        let spckv_potentials: [(&'static str, &'static str, &'static str); 3] = [
            (
                "potential.euclid3.spckv.1",
                "z^(-2)*F(y/z, (x^2 + y^2 + z^2)/z)",
                "potential family admitting the special conformal symmetry with factor x",
            ),
            (
                "potential.euclid3.spckv.2",
                "x^(-2)*F(z/x, (x^2 + y^2 + z^2)/x)",
                "potential family admitting the special conformal symmetry with factor y",
            ),
            (
                "potential.euclid3.spckv.3",
                "y^(-2)*F(x/y, (x^2 + y^2 + z^2)/y)",
                "potential family admitting the special conformal symmetry with factor z",
            ),
        ];
        for (id, expr, desc) in spckv_potentials {
            put(CatalogEntry {
                id,
                kind: EntryKind::Potential,
                description: desc,
                payload: Payload::Potential {
                    metric_id: "metric.euclid3.cartesian",
                    expr: ex(expr),
                },
                domain: coords_dom(&["x", "y", "z"]),
                instantiations: default_instantiations_2("F"),
            });
        }

        // ---- Lagrangians ----------------------------------------------
        let x1 = Chart::new(&["x"]);
        put(CatalogEntry {
            id: "lagrangian.free2",
            kind: EntryKind::Lagrangian,
            description: "free particle on the Euclidean plane",
            payload: Payload::Lagrangian(
                Lagrangian::new(diag(&e2, &["1", "1"]), Expr::int(0), "t").expect("free2"),
            ),
            domain: coords_dom(&["x", "y"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "lagrangian.linear1",
            kind: EntryKind::Lagrangian,
            description: "decomposable system with a linear potential term (gradient-KV reading)",
            payload: Payload::Lagrangian(
                Lagrangian::new(diag(&x1, &["1"]), ex("-(mu^2*x)"), "t").expect("linear1"),
            ),
            domain: coords_dom(&["x"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "lagrangian.oscillator1",
            kind: EntryKind::Lagrangian,
            description: "hyperbolic oscillator reading: L = x_dot^2/2 + mu^2 x^2/2",
            payload: Payload::Lagrangian(
                Lagrangian::new(diag(&x1, &["1"]), ex("-(mu^2*x^2/2)"), "t")
                    .expect("oscillator1"),
            ),
            domain: coords_dom(&["x"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "lagrangian.ermakov2",
            kind: EntryKind::Lagrangian,
            description: "two-dimensional Ermakov system with angular potential F(theta)/r^2",
            payload: Payload::Lagrangian(
                Lagrangian::new(
                    diag(&ermakov_chart, &["1", "r^2"]),
                    ex("-(mu^2*r^2/2) + F(theta)/r^2"),
                    "t",
                )
                .expect("ermakov2"),
            ),
            domain: dom(&[("r", 0.7, 1.8), ("theta", 0.3, 1.2)]),
            instantiations: default_instantiations_1("F"),
        });
        put(CatalogEntry {
            id: "lagrangian.minisuperspace.sc01",
            kind: EntryKind::Lagrangian,
            description: "cosmological Lagrangian 2a b'^2 + 4b a'b' + 2a in the radial parameter",
            payload: Payload::Lagrangian(
                Lagrangian::new(
                    Metric::parse(&mini, &[&["0", "4*b"], &["4*b", "4*a"]]).expect("kin"),
                    ex("-2*a"),
                    "tau",
                )
                .expect("sc01"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "lagrangian.conformal.m2",
            kind: EntryKind::Lagrangian,
            description: "conformally transported cosmological Lagrangian, free profile g(b)",
            payload: Payload::Lagrangian(
                Lagrangian::new(
                    Metric::parse(
                        &mini,
                        &[
                            &["0", "4*a*b*gf(b)^2"],
                            &["4*a*b*gf(b)^2", "4*a^2*gf(b)^2"],
                        ],
                    )
                    .expect("m2 kinetic"),
                    ex("-2/gf(b)^2"),
                    "r",
                )
                .expect("m2"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![
                Instantiation::new("gf", &["s"], "1"),
                Instantiation::new("gf", &["s"], "s"),
            ],
        });
        put(CatalogEntry {
            id: "lagrangian.conformal.m2a",
            kind: EntryKind::Lagrangian,
            description: "conformally transported cosmological Lagrangian with constant profile g0",
            payload: Payload::Lagrangian(
                Lagrangian::new(
                    Metric::parse(
                        &mini,
                        &[
                            &["0", "4*g0^2*a*b"],
                            &["4*g0^2*a*b", "4*g0^2*a^2"],
                        ],
                    )
                    .expect("m2a kinetic"),
                    ex("-2/g0^2"),
                    "r",
                )
                .expect("m2a"),
            ),
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![],
        });

        // ---- first integrals --------------------------------------------
        let integral = |id: &'static str,
                        desc: &'static str,
                        scenario_hint: Option<&'static str>,
                        expr: &str,
                        sign_note: Option<&'static str>| CatalogEntry {
            id,
            kind: EntryKind::Integral,
            description: desc,
            payload: Payload::Integral {
                scenario_hint,
                expr: ex(expr),
                sign_note,
            },
            domain: SampleDomain::default(),
            instantiations: vec![],
        };
        put(integral(
            "integral.oscillator.iplus",
            "growing-mode integral of the hyperbolic oscillator",
            Some("scenario.oscillator"),
            "exp(mu*t)*x_dot - mu*exp(mu*t)*x",
            Some("the crate's Noether integral convention yields the opposite overall sign"),
        ));
        put(integral(
            "integral.oscillator.iminus",
            "decaying-mode integral of the hyperbolic oscillator",
            Some("scenario.oscillator"),
            "exp(-(mu*t))*x_dot + mu*exp(-(mu*t))*x",
            Some("the crate's Noether integral convention yields the opposite overall sign"),
        ));
        put(integral(
            "integral.oscillator.i0",
            "time-free combination of the two exponential-mode integrals",
            Some("scenario.oscillator"),
            "x_dot^2 - mu^2*x^2",
            None,
        ));
        put(integral(
            "integral.oscillator.h",
            "oscillator Hamiltonian",
            Some("scenario.oscillator"),
            "x_dot^2/2 - mu^2*x^2/2",
            None,
        ));
        put(integral(
            "integral.ermakov.h",
            "Ermakov Hamiltonian",
            Some("scenario.ermakov"),
            "r_dot^2/2 + r^2*theta_dot^2/2 - mu^2*r^2/2 + F(theta)/r^2",
            None,
        ));
        let ermakov_h = "(r_dot^2/2 + r^2*theta_dot^2/2 - mu^2*r^2/2 + F(theta)/r^2)";
        put(CatalogEntry {
            id: "integral.ermakov.iplus",
            kind: EntryKind::Integral,
            description: "growing sl(2,R) integral of the Ermakov system",
            payload: Payload::Integral {
                scenario_hint: Some("scenario.ermakov"),
                expr: ex(&alloc::format!(
                    "({ermakov_h}/mu)*exp(2*mu*t) - exp(2*mu*t)*r*r_dot + mu*exp(2*mu*t)*r^2"
                )),
                sign_note: None,
            },
            domain: SampleDomain::default(),
            instantiations: default_instantiations_1("F"),
        });
        put(CatalogEntry {
            id: "integral.ermakov.iminus",
            kind: EntryKind::Integral,
            description: "decaying sl(2,R) integral of the Ermakov system",
            payload: Payload::Integral {
                scenario_hint: Some("scenario.ermakov"),
                expr: ex(&alloc::format!(
                    "({ermakov_h}/mu)*exp(-2*mu*t) + exp(-2*mu*t)*r*r_dot + mu*exp(-2*mu*t)*r^2"
                )),
                sign_note: None,
            },
            domain: SampleDomain::default(),
            instantiations: default_instantiations_1("F"),
        });
        put(CatalogEntry {
            id: "integral.ermakov.phi0",
            kind: EntryKind::Integral,
            description: "Ermakov invariant r^4 theta_dot^2 + 2F(theta)",
            payload: Payload::Integral {
                scenario_hint: Some("scenario.ermakov"),
                expr: ex("r^4*theta_dot^2 + 2*F(theta)"),
                sign_note: Some(
                    "equals Ip*Im - h^2/mu^2; the displayed combination h^2 - Ip*Im reproduces it up to overall sign only at mu = 1",
                ),
            },
            domain: SampleDomain::default(),
            instantiations: default_instantiations_1("F"),
        });
        put(integral(
            "integral.minisuperspace.h",
            "cosmological Hamiltonian 2a b'^2 + 4b a'b' - 2a (vanishes on vacuum solutions)",
            Some("scenario.minisuperspace"),
            "2*a*b_dot^2 + 4*b*a_dot*b_dot - 2*a",
            None,
        ));
        put(integral(
            "integral.m2a.h",
            "Hamiltonian of the conformally transported Lagrangian",
            Some("scenario.m2a"),
            "g0^2*(2*a^2*b_dot^2 + 4*a*b*a_dot*b_dot) - 2/g0^2",
            None,
        ));

        // ---- PDE models --------------------------------------------------
        let pde = |id: &'static str,
                   desc: &'static str,
                   model: PdeModel,
                   domain: SampleDomain,
                   insts: Vec<Instantiation>| CatalogEntry {
            id,
            kind: EntryKind::Pde,
            description: desc,
            payload: Payload::Pde(model),
            domain,
            instantiations: insts,
        };
        let e2_metric = diag(&e2, &["1", "1"]);
        put(pde(
            "pde.schrodinger.e2",
            "plane diffusion-type equation with a free potential",
            e2_metric
                .laplacian()
                .expect("laplacian")
                .with_potential(ex("W(x, y)"))
                .expect("potential")
                .with_time_derivative(),
            coords_dom(&["x", "y"]),
            default_instantiations_2("W"),
        ));
        put(pde(
            "pde.kg.e2",
            "plane wave-operator model with a free potential",
            e2_metric
                .laplacian()
                .expect("laplacian")
                .with_potential(ex("W(x, y)"))
                .expect("potential"),
            coords_dom(&["x", "y"]),
            default_instantiations_2("W"),
        ));
        put(pde(
            "pde.kg.cr05",
            "separable model with quadratic-plus-angular potential on the plane",
            diag(&e2, &["1", "1"])
                .laplacian()
                .expect("laplacian")
                .with_potential(ex("mu^2*x^2 + F(y)"))
                .expect("potential"),
            coords_dom(&["x", "y"]),
            default_instantiations_1("F"),
        ));
        put(pde(
            "pde.kg.cr11",
            "separable model of the Ermakov kinetic metric",
            diag(&ermakov_chart, &["1", "r^2"])
                .laplacian()
                .expect("laplacian")
                .with_potential(ex("-(mu^2*r^2) - 2*F(theta)/r^2"))
                .expect("potential"),
            dom(&[("r", 0.7, 1.8), ("theta", 0.3, 1.2)]),
            default_instantiations_1("F"),
        ));
        // the displayed-coefficient form of the cosmological wave
        // equation (half the Laplace-Beltrami model of the kinetic
        // metric)
        let sc02 = PdeModel {
            chart: mini.clone(),
            second: vec![
                vec![ex("-(a/(4*b^2))"), ex("1/(4*b)")],
                vec![ex("1/(4*b)"), Expr::int(0)],
            ],
            first: vec![ex("-(1/(4*b^2))"), Expr::int(0)],
            potential: ex("2*a"),
            time_derivative: false,
        };
        put(pde(
            "pde.minisuperspace.sc02",
            "cosmological wave equation in the displayed coefficient normalization",
            sc02,
            coords_dom(&["a", "b"]),
            vec![],
        ));
        let s3_metric = diag(&e3, &[s3_conf, s3_conf, s3_conf]);
        put(pde(
            "pde.conformal-laplace.s3",
            "conformally coupled Laplace equation on the round 3-sphere (potential -R/8 = -3/4)",
            s3_metric
                .laplacian()
                .expect("laplacian")
                .with_potential(ex("-3/4"))
                .expect("potential"),
            dom(&[("x", 0.3, 1.2), ("y", 0.3, 1.2), ("z", 0.3, 1.2)]),
            vec![],
        ));

        // ---- closed-form solutions ----------------------------------------
        put(CatalogEntry {
            id: "solution.sc02.bessel1",
            kind: EntryKind::Solution,
            description: "scaling-invariant modified-Bessel family of the cosmological wave equation",
            payload: Payload::Solution {
                pde_id: "pde.minisuperspace.sc02",
                field: ex("a^c*(c1*besseli(c, 2*sqrt(2)*a*b) + c2*besselk(c, 2*sqrt(2)*a*b))"),
                components: vec![],
                constants: vec![("c", 1.0), ("c1", 0.4), ("c2", 0.7)],
            },
            domain: coords_dom(&["a", "b"]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "solution.sc02.bessel2",
            kind: EntryKind::Solution,
            description: "second invariant modified-Bessel family of the cosmological wave equation",
            payload: Payload::Solution {
                pde_id: "pde.minisuperspace.sc02",
                field: ex(
                    "(a^2 - e/b)^(c/4)*(c1*besseli(-c/2, 2*sqrt(2*b*(a^2*b - e))) + c2*besselk(c/2, 2*sqrt(2*b*(a^2*b - e))))",
                ),
                components: vec![],
                constants: vec![("c", 1.0), ("c1", 0.4), ("c2", 0.7), ("e", 1.0)],
            },
            domain: dom(&[("a", 1.1, 1.8), ("b", 1.1, 1.8)]),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "solution.m2a.closed",
            kind: EntryKind::Solution,
            description: "closed-form vacuum family: b linear in the parameter, a^2 a ratio of affine functions",
            payload: Payload::Solution {
                pde_id: "lagrangian.conformal.m2a",
                field: ex("(V0*r + 2*a1*b1)/(2*b1*(b1*r + b2))"),
                components: vec![
                    ("a", ex("((V0*r + 2*a1*b1)/(2*b1*(b1*r + b2)))^(1/2)")),
                    ("b", ex("b1*r + b2")),
                ],
                constants: vec![("V0", 2.0), ("a1", 1.0), ("b1", 1.0), ("b2", 2.0)],
            },
            domain: dom(&[("r", 0.5, 2.0)]),
            instantiations: vec![],
        });

        // ---- table rows -----------------------------------------------------
        let row1 = |id: &'static str,
                    label: &'static str,
                    comps: [&str; 2],
                    potential: &str,
                    insts: Vec<Instantiation>| CatalogEntry {
            id,
            kind: EntryKind::TableRow,
            description: "plane generator/potential pair admitting a point symmetry",
            payload: Payload::TableRow(TableRow {
                table: 1,
                label,
                metric_id: "metric.euclid2.cartesian",
                generator: VectorField::parse(&e2, &comps).expect("row generator"),
                potential: ex(potential),
                skip: None,
            }),
            domain: coords_dom(&["x", "y"]),
            instantiations: insts,
        };
        put(row1(
            "table1.row1",
            "d_x | f(y)",
            ["1", "0"],
            "f(y)",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row2",
            "d_y | f(x)",
            ["0", "1"],
            "f(x)",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row3",
            "rotation | f(r)",
            ["y", "-x"],
            "f((x^2 + y^2)^(1/2))",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row4",
            "shifted rotation | f((x^2+y^2)/2 + ay - bx)",
            ["a + y", "b - x"],
            "f((x^2 + y^2)/2 + a*y - b*x)",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row5",
            "dilation | x^-2 f(y/x)",
            ["x", "y"],
            "x^(-2)*f(y/x)",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row6",
            "slanted translation | f(y - bx)",
            ["1", "b"],
            "f(y - b*x)",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row7",
            "dilation + rotation | r^-2 f(theta - a ln r)",
            ["x + a*y", "y - a*x"],
            "(x^2 + y^2)^(-1)*f(arctan(x/y) - (a/2)*ln(x^2 + y^2))",
            default_instantiations_1("f"),
        ));
        put(row1(
            "table1.row8",
            "shifted dilation | (a+x)^-2 f((b+y)/(a+x))",
            ["a + x", "b + y"],
            "(a + x)^(-2)*f((b + y)/(a + x))",
            default_instantiations_1("f"),
        ));

        let row2 = |id: &'static str,
                    label: &'static str,
                    comps: [&str; 3],
                    potential: &str,
                    skip: Option<&'static str>,
                    insts: Vec<Instantiation>| CatalogEntry {
            id,
            kind: EntryKind::TableRow,
            description: "three-dimensional generator/potential pair admitting a point symmetry",
            payload: Payload::TableRow(TableRow {
                table: 2,
                label,
                metric_id: "metric.euclid3.cartesian",
                generator: VectorField::parse(&e3, &comps).expect("row generator"),
                potential: ex(potential),
                skip,
            }),
            domain: coords_dom(&["x", "y", "z"]),
            instantiations: insts,
        };
        put(row2(
            "table2.row1",
            "translations | f(y - (b/a)x, z - (c/a)x)",
            ["a", "b", "c"],
            "f(y - (b/a)*x, z - (c/a)*x)",
            None,
            default_instantiations_2("f"),
        ));
        put(row2(
            "table2.row2",
            "translations + rotation | f((c/2)(x^2+y^2) - bx + ay, z)",
            ["a + c*y", "b - c*x", "0"],
            "f((c/2)*(x^2 + y^2) - b*x + a*y, z)",
            None,
            default_instantiations_2("f"),
        ));
        put(row2(
            "table2.row3",
            "translations + rotation | f(y - (b/c) arctan(cx/(a+cz)), (x^2+z^2)/2 + (a/c)z)",
            ["a + c*z", "b", "-(c*x)"],
            "f(y - (b/c)*arctan(c*x/(a + c*z)), (x^2 + z^2)/2 + (a/c)*z)",
            None,
            default_instantiations_2("f"),
        ));
        put(row2(
            "table2.row4",
            "translation + two rotations | f(x^2 + y^2(1 - c^2/b^2) + (2a/b + (2c/b)z)y, z - (c/b)y)",
            ["a + b*y + c*z", "-(b*x)", "-(c*x)"],
            "f(x^2 + y^2*(1 - c^2/b^2) + (2*a/b + (2*c/b)*z)*y, z - (c/b)*y)",
            None,
            default_instantiations_2("f"),
        ));
        put(row2(
            "table2.row5",
            "so(3) linear combination | F(R, b tan(theta) sin(phi) + c cos(phi) - a M1)",
            ["b*y + c*z", "-(b*x)", "-(c*x)"],
            "F((x^2 + y^2 + z^2)^(1/2), M1)",
            Some("the potential references the symbol M1, which is never defined; stored unverified"),
            default_instantiations_2("F"),
        ));
        put(row2(
            "table2.row6",
            "translation + rotation + dilation | r^-2 f(theta - (b/c) ln r, (a+cx)/(cr))",
            ["a + c*x", "c*y - b*z", "c*z + b*y"],
            "(y^2 + z^2)^(-1)*f(arctan(z/y) - (b/(2*c))*ln(y^2 + z^2), (a + c*x)/(c*(y^2 + z^2)^(1/2)))",
            None,
            default_instantiations_2("f"),
        ));
        put(row2(
            "table2.row7",
            "shifted dilation | (a+lx)^-2 f((b+ly)/(l(a+lx)), (c+lz)/(l(a+lx)))",
            ["a + l*x", "b + l*y", "c + l*z"],
            "(a + l*x)^(-2)*f((b + l*y)/(l*(a + l*x)), (c + l*z)/(l*(a + l*x)))",
            None,
            default_instantiations_2("f"),
        ));

        // ---- scenarios ---------------------------------------------------
        put(CatalogEntry {
            id: "scenario.oscillator",
            kind: EntryKind::Scenario,
            description: "hyperbolic oscillator trajectory for integral drift checks",
            payload: Payload::Scenario(Scenario {
                lagrangian_id: "lagrangian.oscillator1",
                constants: vec![("mu", 1.0)],
                initial: vec![1.0, 0.0],
                span: (0.0, 5.0),
                step: 1e-3,
                integral_ids: vec![
                    "integral.oscillator.iplus",
                    "integral.oscillator.iminus",
                    "integral.oscillator.i0",
                    "integral.oscillator.h",
                ],
            }),
            domain: SampleDomain::default(),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "scenario.ermakov",
            kind: EntryKind::Scenario,
            description: "Ermakov trajectory with unit angular profile",
            payload: Payload::Scenario(Scenario {
                lagrangian_id: "lagrangian.ermakov2",
                constants: vec![("mu", 1.0)],
                initial: vec![1.0, 0.3, 0.2, 0.7],
                span: (0.0, 5.0),
                step: 1e-3,
                integral_ids: vec![
                    "integral.ermakov.h",
                    "integral.ermakov.iplus",
                    "integral.ermakov.iminus",
                    "integral.ermakov.phi0",
                ],
            }),
            domain: SampleDomain::default(),
            instantiations: vec![Instantiation::new("F", &["s"], "1")],
        });
        put(CatalogEntry {
            id: "scenario.minisuperspace",
            kind: EntryKind::Scenario,
            description: "cosmological trajectory started on the vanishing-Hamiltonian surface",
            payload: Payload::Scenario(Scenario {
                lagrangian_id: "lagrangian.minisuperspace.sc01",
                constants: vec![],
                // h = 2a b'^2 + 4b a'b' - 2a = 0 at (a,b,a',b') below
                initial: vec![1.0, 1.0, 0.75, 0.5],
                span: (0.0, 5.0),
                step: 1e-3,
                integral_ids: vec!["integral.minisuperspace.h"],
            }),
            domain: SampleDomain::default(),
            instantiations: vec![],
        });
        put(CatalogEntry {
            id: "scenario.m2a",
            kind: EntryKind::Scenario,
            description: "transported cosmological system started on the closed-form solution",
            payload: Payload::Scenario(Scenario {
                lagrangian_id: "lagrangian.conformal.m2a",
                constants: vec![("g0", 1.0)],
                // on the closed form with V0 = 2, a1 = 1, b1 = 1,
                // b2 = 2: a(0) = sqrt(1/2), a'(0) = 1/(4 a(0)),
                // b(0) = 2, b'(0) = 1
                initial: vec![
                    0.7071067811865476,
                    2.0,
                    0.17677669529663687,
                    1.0,
                ],
                span: (0.0, 5.0),
                step: 1e-3,
                integral_ids: vec!["integral.m2a.h"],
            }),
            domain: SampleDomain::default(),
            instantiations: vec![],
        });

        Catalog { entries }
    }
}

fn ex(s: &str) -> Expr {
    Expr::parse(s).expect("catalog expression parses")
}

fn diag(chart: &Chart, entries: &[&str]) -> Metric {
    Metric::diagonal(chart.clone(), entries.iter().map(|s| ex(s)).collect())
        .expect("catalog metric")
}
