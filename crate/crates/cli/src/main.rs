//! `geosym` — batch front end for the symbolic symmetry-verification
//! engine: load a model file or a catalog entry, run a check, get a
//! deterministic JSON (or human-readable) report and a meaningful exit
//! code.
//!
//! Exit codes: 0 every check passed (skips allowed); 1 at least one
//! residual is provably nonzero; 2 input or schema error; 3 some
//! checks were inconclusive and none failed.

mod model;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use clap::{Parser, Subcommand};
use geosym_core::catalog::{Catalog, EntryKind, Instantiation, Payload};
use geosym_core::dynamics;
use geosym_core::expr::{Expr, ZeroOptions};
use geosym_core::symmetry::{self, PointSymmetry};

use model::{load_model, resolve_entry, ModelContext, ModelError};
use report::{Check, Report};

#[derive(Parser)]
#[command(
    name = "geosym",
    version,
    about = "Symbolic differential-geometry and symmetry verification",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Zero-test tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Zero-test sample count.
    #[arg(long, global = true, default_value_t = 24)]
    trials: u32,

    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,

    /// Emit the JSON report instead of the text rendering.
    #[arg(long, global = true)]
    json: bool,

    /// Suppress residuals and notes in the text rendering.
    #[arg(long, global = true)]
    quiet: bool,

    /// Omit timings so reports are byte-reproducible.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a vector field against a metric.
    Classify {
        #[arg(long)]
        model: String,
        #[arg(long)]
        vector: String,
    },
    /// Wave-operator (Klein-Gordon) point-symmetry condition.
    CheckKg {
        #[arg(long)]
        model: String,
        #[arg(long)]
        vector: String,
        /// Potential expression; defaults to the model's.
        #[arg(long)]
        potential: Option<String>,
        /// Instantiation like "f(s) = s^2" (repeatable).
        #[arg(long = "define")]
        defines: Vec<String>,
    },
    /// Diffusion-type (Schrödinger) point-symmetry condition.
    CheckSchrodinger {
        #[arg(long)]
        model: String,
        /// Killing/homothetic generator (non-gradient branch).
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        a0: Option<String>,
        /// Gradient potential S for the gradient branch.
        #[arg(long)]
        gradient: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        potential: Option<String>,
        #[arg(long = "define")]
        defines: Vec<String>,
    },
    /// Noether point-symmetry condition for the model Lagrangian.
    CheckNoether {
        #[arg(long)]
        model: String,
        /// Time component of the generator (expression; default 0).
        #[arg(long)]
        xi: Option<String>,
        /// Named vector field supplying the spatial components.
        #[arg(long)]
        eta: String,
        /// Gauge function (expression; default 0).
        #[arg(long)]
        gauge: Option<String>,
        #[arg(long = "define")]
        defines: Vec<String>,
    },
    /// Reduced conformal (Yamabe) symmetry condition.
    CheckYamabe {
        #[arg(long)]
        model: String,
        #[arg(long)]
        vector: String,
        #[arg(long)]
        potential: Option<String>,
        #[arg(long = "define")]
        defines: Vec<String>,
    },
    /// Christoffel symbols, Ricci tensor and scalar of a metric.
    Curvature {
        #[arg(long)]
        model: String,
    },
    /// Conformal rescaling of the model metric (and Lagrangian).
    Conformal {
        #[arg(long)]
        model: String,
        #[arg(long)]
        factor: String,
        #[arg(long)]
        emit_lagrangian: bool,
    },
    /// Verification of the generator/potential tables.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
    /// First-integral drift along an integrated scenario.
    Drift {
        #[arg(long)]
        scenario: String,
        /// Step override.
        #[arg(long)]
        h: Option<f64>,
        /// Span-length override (from the scenario's start).
        #[arg(long)]
        span: Option<f64>,
    },
    /// Verify a closed-form solution entry.
    VerifySolution {
        #[arg(long)]
        scenario: String,
    },
    /// Polynomial Killing-vector discovery on a flat chart.
    DiscoverKv {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1)]
        degree: u32,
    },
    /// Catalog inspection and export.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum TablesAction {
    /// Run every (or one) table row.
    Verify {
        #[arg(long)]
        table: Option<u8>,
        #[arg(long)]
        row: Option<String>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List every entry with kind and description.
    List,
    /// Export an entry in the model-file schema.
    Export { id: String },
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let opts = ZeroOptions {
        trials: cli.trials.max(1),
        tol: cli.tol,
        seed: cli.seed,
    };
    let catalog = Catalog::standard();
    let mut rpt = Report::new(argv, cli.seed);

    let outcome = dispatch(&cli.command, &catalog, &opts, &mut rpt);
    let code = match outcome {
        Ok(()) => rpt.finalize(),
        Err(e) => {
            rpt.push(Check::skipped("input", &format!("{e}")));
            rpt.finalize();
            rpt.exit_code = 2;
            if !cli.json {
                eprintln!("error: {e}");
            }
            2
        }
    };
    if !cli.no_timings {
        rpt.timings_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    if cli.json {
        println!("{}", rpt.render_json());
    } else {
        print!("{}", rpt.render_text(cli.quiet));
    }
    std::process::exit(code);
}

fn dispatch(
    command: &Command,
    catalog: &Catalog,
    opts: &ZeroOptions,
    rpt: &mut Report,
) -> Result<(), ModelError> {
    match command {
        Command::Classify { model, vector } => {
            let ctx = load_model(catalog, model)?;
            let field = ctx.vector(vector)?;
            let class = symmetry::classify(&ctx.metric, field, &ctx.domain, opts)
                .map_err(|e| ModelError(format!("{e}")))?;
            let mut check = Check {
                name: format!("classify {vector}"),
                verdict: if class.class.is_conformal() {
                    "zero".to_string()
                } else {
                    "nonzero".to_string()
                },
                residuals: Vec::new(),
                witness: None,
                notes: vec![
                    format!("class: {}", class.class.name()),
                    format!("conformal factor: {}", class.psi),
                    format!("gradient: {}", class.gradient),
                ],
                value: None,
            };
            if let Some(s) = &class.potential {
                check.notes.push(format!("gradient potential: {s}"));
            }
            if let Some(h) = &class.homothety {
                check.notes.push(format!("homothety constant: {h}"));
            }
            rpt.insert_data("class", serde_json::json!(class.class.name()));
            rpt.insert_data("psi", serde_json::json!(format!("{}", class.psi)));
            rpt.push(check);
            Ok(())
        }
        Command::CheckKg {
            model,
            vector,
            potential,
            defines,
        } => {
            let mut ctx = load_model(catalog, model)?;
            apply_defines(&mut ctx, defines)?;
            let field = ctx.vector(vector)?.clone();
            let v = resolve_potential(&ctx, potential)?;
            let v = ctx.instantiate_fully(&v, "potential")?;
            let rep = symmetry::kg_symmetry_residual(&ctx.metric, &v, &field, &ctx.domain, opts)
                .map_err(|e| ModelError(format!("{e}")))?;
            rpt.push(Check::from_report("kg-symmetry-condition", &rep));
            Ok(())
        }
        Command::CheckSchrodinger {
            model,
            vector,
            a0,
            gradient,
            c,
            d,
            potential,
            defines,
        } => {
            let mut ctx = load_model(catalog, model)?;
            apply_defines(&mut ctx, defines)?;
            let v = resolve_potential(&ctx, potential)?;
            let v = ctx.instantiate_fully(&v, "potential")?;
            if let Some(s) = gradient {
                let s = parse_arg(s, "--gradient")?;
                let c = parse_opt(c, "--c", "0")?;
                let d = parse_opt(d, "--d", "0")?;
                let rep = symmetry::schrodinger_check_gradient(
                    &ctx.metric,
                    &v,
                    &s,
                    &c,
                    &d,
                    "t",
                    None,
                    &ctx.domain,
                    opts,
                )
                .map_err(|e| ModelError(format!("{e}")))?;
                rpt.push(Check::from_report("schrodinger-gradient-condition", &rep));
            } else {
                let Some(vector) = vector else {
                    return Err(ModelError(
                        "--vector is required unless --gradient is given".to_string(),
                    ));
                };
                let field = ctx.vector(vector)?.clone();
                let a0 = parse_opt(a0, "--a0", "0")?;
                let rep = symmetry::schrodinger_check_nongradient(
                    &ctx.metric,
                    &v,
                    &field,
                    &a0,
                    &ctx.domain,
                    opts,
                )
                .map_err(|e| ModelError(format!("{e}")))?;
                rpt.push(Check::from_report("schrodinger-condition", &rep));
            }
            Ok(())
        }
        Command::CheckNoether {
            model,
            xi,
            eta,
            gauge,
            defines,
        } => {
            let mut ctx = load_model(catalog, model)?;
            apply_defines(&mut ctx, defines)?;
            let Some(lagrangian) = ctx.lagrangian.clone() else {
                return Err(ModelError(
                    "the model does not define a Lagrangian".to_string(),
                ));
            };
            let inst_potential =
                ctx.instantiate_fully(lagrangian.potential(), "lagrangian potential")?;
            let lagrangian = geosym_core::symmetry::Lagrangian::new(
                lagrangian.kinetic_metric().clone(),
                inst_potential,
                lagrangian.time(),
            )
            .map_err(|e| ModelError(format!("{e}")))?;
            let eta_field = ctx.vector(eta)?;
            let xi = parse_opt(xi, "--xi", "0")?;
            let gauge = parse_opt(gauge, "--gauge", "0")?;
            let x = PointSymmetry::new(xi, eta_field.components().to_vec());
            let rep = symmetry::noether_residual(&lagrangian, &x, &gauge, &ctx.domain, opts)
                .map_err(|e| ModelError(format!("{e}")))?;
            rpt.push(Check::from_report("noether-condition", &rep));
            Ok(())
        }
        Command::CheckYamabe {
            model,
            vector,
            potential,
            defines,
        } => {
            let mut ctx = load_model(catalog, model)?;
            apply_defines(&mut ctx, defines)?;
            let field = ctx.vector(vector)?.clone();
            let v = resolve_potential(&ctx, potential)?;
            let v = ctx.instantiate_fully(&v, "potential")?;
            let rep = symmetry::yamabe_residual(&ctx.metric, &v, &field, &ctx.domain, opts)
                .map_err(|e| ModelError(format!("{e}")))?;
            rpt.push(Check::from_report("yamabe-condition", &rep));
            Ok(())
        }
        Command::Curvature { model } => {
            let ctx = load_model(catalog, model)?;
            let curv = ctx
                .metric
                .curvature()
                .map_err(|e| ModelError(format!("{e}")))?;
            let n = ctx.metric.dim();
            let chart = ctx.metric.chart();
            let mut gamma = BTreeMap::new();
            for i in 0..n {
                for j in 0..n {
                    for k in j..n {
                        if curv.christoffel[i][j][k].is_zero_literal() {
                            continue;
                        }
                        gamma.insert(
                            format!(
                                "Gamma^{}_{{{} {}}}",
                                chart.coord(i),
                                chart.coord(j),
                                chart.coord(k)
                            ),
                            serde_json::json!(format!("{}", curv.christoffel[i][j][k])),
                        );
                    }
                }
            }
            rpt.insert_data("christoffel", serde_json::json!(gamma));
            let mut ricci = BTreeMap::new();
            for i in 0..n {
                for j in i..n {
                    if curv.ricci[i][j].is_zero_literal() {
                        continue;
                    }
                    ricci.insert(
                        format!("R_{{{} {}}}", chart.coord(i), chart.coord(j)),
                        serde_json::json!(format!("{}", curv.ricci[i][j])),
                    );
                }
            }
            rpt.insert_data("ricci", serde_json::json!(ricci));
            rpt.insert_data(
                "ricci_scalar",
                serde_json::json!(format!("{}", curv.ricci_scalar)),
            );
            // symmetry self-checks
            let mut all = geosym_core::expr::ZeroVerdict::Zero;
            for j in 0..n {
                for l in 0..n {
                    let resid = (curv.ricci[j][l].clone() - curv.ricci[l][j].clone())
                        .normalize()
                        .map_err(|e| ModelError(format!("{e}")))?;
                    let v = resid.is_zero(&ctx.domain, opts);
                    if !v.is_zero() {
                        all = v;
                    }
                }
            }
            rpt.push(Check::from_verdict("ricci-symmetry", &all));
            Ok(())
        }
        Command::Conformal {
            model,
            factor,
            emit_lagrangian,
        } => {
            let ctx = load_model(catalog, model)?;
            let nf = parse_arg(factor, "--factor")?;
            let rescaled = ctx
                .metric
                .conformal_transform(&nf)
                .map_err(|e| ModelError(format!("{e}")))?;
            let mut comps = Vec::new();
            for row in rescaled.components() {
                comps.push(
                    row.iter()
                        .map(|e| format!("{e}"))
                        .collect::<Vec<_>>(),
                );
            }
            rpt.insert_data("metric", serde_json::json!(comps));
            let det = rescaled
                .determinant()
                .map_err(|e| ModelError(format!("{e}")))?;
            let nondegenerate = match det.is_zero(&ctx.domain, opts) {
                geosym_core::expr::ZeroVerdict::Zero => geosym_core::expr::ZeroVerdict::NonZero(
                    geosym_core::expr::Witness {
                        bindings: BTreeMap::new(),
                        value: 0.0,
                        scale: 0.0,
                    },
                ),
                _ => geosym_core::expr::ZeroVerdict::Zero,
            };
            rpt.push(Check::from_verdict("nondegenerate", &nondegenerate));
            if *emit_lagrangian {
                let Some(l) = &ctx.lagrangian else {
                    return Err(ModelError(
                        "the model does not define a Lagrangian".to_string(),
                    ));
                };
                let lbar = symmetry::conformal_lagrangian(l, &nf)
                    .map_err(|e| ModelError(format!("{e}")))?;
                rpt.insert_data(
                    "lagrangian_potential",
                    serde_json::json!(format!("{}", lbar.potential())),
                );
                rpt.insert_data(
                    "reparametrization",
                    serde_json::json!(format!("{}", lbar.reparametrization().unwrap())),
                );
            }
            Ok(())
        }
        Command::Tables { action } => {
            let TablesAction::Verify { table, row } = action;
            let mut matched = 0;
            for entry in catalog.enumerate(Some(EntryKind::TableRow)) {
                let r = entry.table_row().unwrap();
                if let Some(t) = table {
                    if r.table != *t {
                        continue;
                    }
                }
                if let Some(label) = row {
                    if !entry.id.contains(label.as_str()) && !r.label.contains(label.as_str()) {
                        continue;
                    }
                }
                matched += 1;
                match catalog.verify_table_row(entry, opts) {
                    None => {
                        rpt.push(Check::skipped(entry.id, r.skip.unwrap_or("skipped")));
                    }
                    Some(result) => {
                        let rep = result.map_err(|e| ModelError(format!("{e}")))?;
                        rpt.push(Check::from_report(entry.id, &rep));
                    }
                }
            }
            if matched == 0 {
                return Err(ModelError("no rows matched the filter".to_string()));
            }
            Ok(())
        }
        Command::Drift { scenario, h, span } => {
            let entry = resolve_entry(catalog, scenario, &[EntryKind::Scenario])?;
            let span_override = span.map(|len| {
                let s = entry.scenario().map(|s| s.span.0).unwrap_or(0.0);
                (s, s + len)
            });
            let run = catalog
                .run_scenario(entry.id, *h, span_override)
                .map_err(|e| ModelError(format!("{e}")))?;
            if run.trajectory.truncated {
                rpt.push(Check::skipped(
                    "trajectory",
                    "integration left the evaluable domain early",
                ));
            }
            for (integral_id, drift) in &run.drifts {
                let mut check = Check::numeric(integral_id, drift.max_abs, 1e-6);
                check.notes.push(format!("initial value {}", drift.initial));
                if let Some(rel) = drift.relative {
                    check.notes.push(format!("relative drift {rel:e}"));
                }
                rpt.push(check);
            }
            Ok(())
        }
        Command::VerifySolution { scenario } => {
            let entry = resolve_entry(catalog, scenario, &[EntryKind::Solution])?;
            let Payload::Solution {
                pde_id,
                field,
                components,
                constants,
            } = &entry.payload
            else {
                return Err(ModelError(format!("'{}' is not a solution", entry.id)));
            };
            let target = catalog
                .load(pde_id)
                .ok_or_else(|| ModelError(format!("dangling link '{pde_id}'")))?;
            match &target.payload {
                Payload::Pde(pde) => {
                    let mut bindings = geosym_core::expr::Bindings::new();
                    dynamics::standard_natives(&mut bindings);
                    for (name, value) in constants {
                        bindings.set(name, *value);
                    }
                    let cand = dynamics::SolutionCandidate::new(field.clone(), bindings);
                    let coords = pde.chart.coords().to_vec();
                    let points: Vec<Vec<f64>> = (0..12)
                        .map(|k| {
                            let s = k as f64 / 11.0;
                            coords
                                .iter()
                                .map(|c| {
                                    let (lo, hi) = entry.domain.interval(c);
                                    lo + (hi - lo) * (0.08 + 0.84 * s)
                                })
                                .collect()
                        })
                        .collect();
                    let worst = dynamics::pde_residual(
                        pde,
                        &cand,
                        &points,
                        dynamics::DEFAULT_STENCIL_STEP,
                    )
                    .map_err(|e| ModelError(format!("{e}")))?;
                    let mut check = Check::numeric("max-pointwise-residual", worst, 1e-6);
                    check
                        .notes
                        .push(format!("12 points in the declared sampling box"));
                    rpt.push(check);
                }
                Payload::Lagrangian(l) => {
                    let sys = dynamics::euler_lagrange(l)
                        .map_err(|e| ModelError(format!("{e}")))?;
                    let mut family = BTreeMap::new();
                    for (coord, e) in components {
                        family.insert(coord.to_string(), e.clone());
                    }
                    let extra: Vec<(String, Expr)> = constraint_list(entry.id);
                    let rep = dynamics::verify_closed_form(
                        &sys,
                        &family,
                        &extra,
                        &entry.domain,
                        opts,
                    )
                    .map_err(|e| ModelError(format!("{e}")))?;
                    rpt.push(Check::from_report("closed-form", &rep));
                }
                _ => {
                    return Err(ModelError(format!(
                        "solution '{}' links to an unsupported entry kind",
                        entry.id
                    )))
                }
            }
            Ok(())
        }
        Command::DiscoverKv { model, degree } => {
            let ctx = load_model(catalog, model)?;
            let (fields, dim) = symmetry::kv_discover_polynomial(&ctx.metric, *degree)
                .map_err(|e| ModelError(format!("{e}")))?;
            rpt.insert_data("dimension", serde_json::json!(dim));
            let rendered: Vec<Vec<String>> = fields
                .iter()
                .map(|f| f.components().iter().map(|c| format!("{c}")).collect())
                .collect();
            rpt.insert_data("basis", serde_json::json!(rendered));
            let mut check = Check::from_verdict(
                "kv-discovery",
                &geosym_core::expr::ZeroVerdict::Zero,
            );
            check
                .notes
                .push(format!("isometry-algebra dimension {dim} at degree {degree}"));
            rpt.push(check);
            Ok(())
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let listing: Vec<serde_json::Value> = catalog
                    .enumerate(None)
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "id": e.id,
                            "kind": e.kind.name(),
                            "description": e.description,
                        })
                    })
                    .collect();
                rpt.insert_data("entries", serde_json::json!(listing));
                rpt.push(Check::from_verdict(
                    "catalog-list",
                    &geosym_core::expr::ZeroVerdict::Zero,
                ));
                Ok(())
            }
            CatalogAction::Export { id } => {
                let entry = resolve_entry(catalog, id, &[EntryKind::Metric])?;
                let exported = export_metric_entry(catalog, entry)?;
                rpt.insert_data("model", exported);
                rpt.push(Check::from_verdict(
                    "catalog-export",
                    &geosym_core::expr::ZeroVerdict::Zero,
                ));
                Ok(())
            }
        },
    }
}

/// Extra symbolic constraints attached to specific closed-form
/// entries (the vanishing-Hamiltonian condition of the transported
/// cosmological system).
fn constraint_list(id: &str) -> Vec<(String, Expr)> {
    if id == "solution.m2a.closed" {
        vec![(
            "hamiltonian-constraint".to_string(),
            Expr::parse("a^2*b_dot^2 + 2*a*b*a_dot*b_dot - V0/2").unwrap(),
        )]
    } else {
        Vec::new()
    }
}

fn parse_arg(s: &str, what: &str) -> Result<Expr, ModelError> {
    Expr::parse(s).map_err(|e| ModelError(format!("{what}: {e}")))
}

fn parse_opt(s: &Option<String>, what: &str, default: &str) -> Result<Expr, ModelError> {
    match s {
        Some(s) => parse_arg(s, what),
        None => parse_arg(default, what),
    }
}

fn resolve_potential(ctx: &ModelContext, flag: &Option<String>) -> Result<Expr, ModelError> {
    if let Some(p) = flag {
        return parse_arg(p, "--potential");
    }
    if let Some(p) = &ctx.potential {
        return Ok(p.clone());
    }
    Err(ModelError(
        "no potential: give --potential or add one to the model".to_string(),
    ))
}

/// Parses `--define "f(s) = s^2"` style instantiations.
fn apply_defines(ctx: &mut ModelContext, defines: &[String]) -> Result<(), ModelError> {
    for d in defines {
        let (head, body) = d
            .split_once('=')
            .ok_or_else(|| ModelError(format!("--define '{d}': expected name(params) = body")))?;
        let head = head.trim().trim_end_matches(':');
        let open = head
            .find('(')
            .ok_or_else(|| ModelError(format!("--define '{d}': missing parameter list")))?;
        let name = head[..open].trim();
        let params_str = head[open + 1..]
            .trim_end()
            .strip_suffix(')')
            .ok_or_else(|| ModelError(format!("--define '{d}': missing ')'")))?;
        let params: Vec<&str> = params_str.split(',').map(|p| p.trim()).collect();
        if name.is_empty() || params.iter().any(|p| p.is_empty()) {
            return Err(ModelError(format!("--define '{d}': malformed")));
        }
        Expr::parse(body.trim())
            .map_err(|e| ModelError(format!("--define '{d}': {e}")))?;
        ctx.instantiations
            .insert(0, Instantiation::new(name, &params, body.trim()));
    }
    Ok(())
}

/// Exports a metric entry (with its linked vector fields and defaults)
/// in the model-file schema.
fn export_metric_entry(
    catalog: &Catalog,
    entry: &geosym_core::catalog::CatalogEntry,
) -> Result<serde_json::Value, ModelError> {
    let Some(metric) = entry.metric() else {
        return Err(ModelError(format!("'{}' is not a metric", entry.id)));
    };
    let chart = metric.chart();
    let comps: Vec<Vec<String>> = metric
        .components()
        .iter()
        .map(|row| row.iter().map(|e| format!("{e}")).collect())
        .collect();
    let singular: Vec<String> = chart
        .singular_sets()
        .iter()
        .map(|e| format!("{e}"))
        .collect();
    let mut vector_fields = BTreeMap::new();
    for ve in catalog.enumerate(Some(EntryKind::Vector)) {
        let Payload::Vector { metric_id, field } = &ve.payload else {
            continue;
        };
        if *metric_id != entry.id {
            continue;
        }
        let short = ve.id.rsplit('.').next().unwrap_or(ve.id).to_string();
        let mut comps = BTreeMap::new();
        for (c, e) in chart.coords().iter().zip(field.components()) {
            comps.insert(c.clone(), format!("{e}"));
        }
        vector_fields.insert(short, comps);
    }
    let mut constants = BTreeMap::new();
    for (name, (lo, hi)) in &entry.domain.intervals {
        if chart.coords().contains(name) {
            continue;
        }
        constants.insert(name.clone(), vec![*lo, *hi]);
    }
    let mut opaque = BTreeMap::new();
    for inst in &entry.instantiations {
        opaque.insert(
            inst.name.clone(),
            serde_json::json!({
                "arity": inst.params.len(),
                "default": format!("{}", inst.body),
            }),
        );
    }
    Ok(serde_json::json!({
        "chart": chart.coords(),
        "metric": comps,
        "singular": singular,
        "vector_fields": vector_fields,
        "constants": constants,
        "opaque": opaque,
    }))
}
