//! Conformal classification of vector fields and verification of the
//! symmetry constraint equations: Klein–Gordon and Schrödinger Lie
//! point symmetry conditions, the conformal (Yamabe) reduction, the
//! CKV–Ricci identity, the Noether point-symmetry condition for
//! classical Lagrangians with its first integrals, and polynomial
//! Killing-vector discovery on flat charts.
//!
//! Everything reports through [`ConstraintReport`]: the symbolic
//! residuals together with an aggregated [`ZeroVerdict`] from the
//! sampling oracle.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero as NumZero};

use crate::expr::{Expr, NormalizeError, Rational, SampleDomain, ZeroOptions, ZeroVerdict};
use crate::geometry::{Chart, GeometryError, Metric, VectorField};

#[derive(Clone, Debug, PartialEq)]
pub enum SymmetryError {
    Geometry(GeometryError),
    Normalize(NormalizeError),
    /// The candidate is not a conformal Killing vector of the metric.
    NotConformal,
    /// The operation needs a Killing or homothetic vector.
    NotKillingOrHomothetic,
    /// The candidate failed the Noether condition, so no integral.
    NotASymmetry,
    /// A declared functional dependency is violated.
    DependencyViolation(&'static str),
    /// Polynomial discovery needs polynomial metric components with
    /// rational coefficients.
    NonPolynomialMetric,
    /// A formula or family referenced a name that was not supplied.
    UnknownName(String),
    ChartMismatch,
}

impl From<GeometryError> for SymmetryError {
    fn from(e: GeometryError) -> Self {
        SymmetryError::Geometry(e)
    }
}

impl From<NormalizeError> for SymmetryError {
    fn from(e: NormalizeError) -> Self {
        SymmetryError::Normalize(e)
    }
}

impl core::fmt::Display for SymmetryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SymmetryError::Geometry(e) => write!(f, "{e}"),
            SymmetryError::Normalize(e) => write!(f, "{e}"),
            SymmetryError::NotConformal => {
                write!(f, "vector field is not conformal for this metric")
            }
            SymmetryError::NotKillingOrHomothetic => {
                write!(f, "vector field is not a Killing or homothetic vector")
            }
            SymmetryError::NotASymmetry => {
                write!(f, "the Noether condition fails for this generator")
            }
            SymmetryError::DependencyViolation(what) => write!(f, "{what}"),
            SymmetryError::NonPolynomialMetric => write!(
                f,
                "metric components must be polynomial with rational coefficients"
            ),
            SymmetryError::UnknownName(n) => write!(f, "unknown name '{n}'"),
            SymmetryError::ChartMismatch => write!(f, "operands on different charts"),
        }
    }
}

type SResult<T> = Result<T, SymmetryError>;

/// Conformal class of a vector field with respect to a metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CkvClass {
    /// `L_ξ g = 0`.
    Killing,
    /// `L_ξ g = 2ψ g` with `ψ` a nonzero constant.
    Homothetic,
    /// Conformal with a vanishing covariant Hessian of `ψ`.
    SpecialConformal,
    /// Conformal and none of the stricter classes.
    ProperConformal,
    /// Not conformal at all.
    NotConformal,
}

impl CkvClass {
    pub fn name(self) -> &'static str {
        match self {
            CkvClass::Killing => "killing",
            CkvClass::Homothetic => "homothetic",
            CkvClass::SpecialConformal => "special-conformal",
            CkvClass::ProperConformal => "proper-conformal",
            CkvClass::NotConformal => "not-conformal",
        }
    }

    pub fn is_conformal(self) -> bool {
        !matches!(self, CkvClass::NotConformal)
    }

    pub fn is_killing_or_homothetic(self) -> bool {
        matches!(self, CkvClass::Killing | CkvClass::Homothetic)
    }
}

/// Result of classifying a vector field against a metric.
#[derive(Clone, Debug)]
pub struct ConformalClassification {
    pub class: CkvClass,
    /// Conformal factor `ψ` with `L_ξ g = 2ψ g` (zero for a KV).
    pub psi: Expr,
    /// Whether the lowered field is closed (its curl vanishes).
    pub gradient: bool,
    /// A verified potential `S` with `dS = ξ_♭`, when one could be
    /// constructed (polynomial lowered components only).
    pub potential: Option<Expr>,
    /// The homothety constant, for class [`CkvClass::Homothetic`].
    pub homothety: Option<Expr>,
}

/// One labelled residual with its oracle verdict.
#[derive(Clone, Debug)]
pub struct LabeledResidual {
    pub label: String,
    pub expr: Expr,
    pub verdict: ZeroVerdict,
}

/// Residuals of one constraint check plus the aggregate verdict:
/// `Zero` iff every residual is `Zero`, `NonZero` as soon as one is.
#[derive(Clone, Debug)]
pub struct ConstraintReport {
    pub residuals: Vec<LabeledResidual>,
    pub verdict: ZeroVerdict,
    /// Free-form annotations (generic symmetry vector, instantiations
    /// used, convention notes).
    pub notes: Vec<String>,
}

impl ConstraintReport {
    /// Builds a report, aggregating the verdict across the residuals.
    pub fn from_parts(residuals: Vec<LabeledResidual>, notes: Vec<String>) -> ConstraintReport {
        let mut verdict = ZeroVerdict::Zero;
        for r in &residuals {
            match &r.verdict {
                ZeroVerdict::Zero => {}
                ZeroVerdict::NonZero(w) => {
                    verdict = ZeroVerdict::NonZero(w.clone());
                    break;
                }
                ZeroVerdict::Inconclusive => verdict = ZeroVerdict::Inconclusive,
            }
        }
        ConstraintReport {
            residuals,
            verdict,
            notes,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.verdict.is_zero()
    }
}

/// Point symmetry generator `X = ξ(t,x) ∂_t + η^i(t,x) ∂_i` (the
/// `u`-direction coefficients of PDE symmetries are carried by the
/// checks that need them).
#[derive(Clone, Debug)]
pub struct PointSymmetry {
    pub time_component: Expr,
    pub space_components: Vec<Expr>,
}

impl PointSymmetry {
    pub fn new(time_component: Expr, space_components: Vec<Expr>) -> PointSymmetry {
        PointSymmetry {
            time_component,
            space_components,
        }
    }

    /// Purely spatial generator.
    pub fn spatial(space_components: Vec<Expr>) -> PointSymmetry {
        PointSymmetry::new(Expr::int(0), space_components)
    }

    /// Time translation `∂_t`.
    pub fn time_translation(dim: usize) -> PointSymmetry {
        PointSymmetry::new(Expr::int(1), vec![Expr::int(0); dim])
    }
}

/// Classical Lagrangian `L = ½ g_ij ẋ^i ẋ^j − V(x)` with an explicit
/// evolution-parameter symbol. Velocities are ordinary symbols named
/// `<coord>_dot`, so all symbolic machinery stays inside the
/// expression kernel.
#[derive(Clone, Debug)]
pub struct Lagrangian {
    metric: Metric,
    potential: Expr,
    time: String,
    /// `N²` of the reparametrization `dτ = N² dt` when this Lagrangian
    /// was produced by a conformal transport.
    reparametrization: Option<Expr>,
}

pub fn velocity_name(coord: &str) -> String {
    format!("{coord}_dot")
}

pub fn acceleration_name(coord: &str) -> String {
    format!("{coord}_ddot")
}

impl Lagrangian {
    pub fn new(metric: Metric, potential: Expr, time: &str) -> SResult<Lagrangian> {
        let potential = potential.normalize()?;
        // Autonomous: the potential must not depend on the evolution
        // parameter.
        if potential.contains_symbol(time) {
            return Err(SymmetryError::DependencyViolation(
                "potential must not depend on the evolution parameter",
            ));
        }
        Ok(Lagrangian {
            metric,
            potential,
            time: time.to_string(),
            reparametrization: None,
        })
    }

    pub fn kinetic_metric(&self) -> &Metric {
        &self.metric
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    pub fn time(&self) -> &str {
        &self.time
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    pub fn reparametrization(&self) -> Option<&Expr> {
        self.reparametrization.as_ref()
    }

    pub fn velocity_symbols(&self) -> Vec<String> {
        self.chart()
            .coords()
            .iter()
            .map(|c| velocity_name(c))
            .collect()
    }

    /// Kinetic energy `½ g_ij ẋ^i ẋ^j`.
    pub fn kinetic_expr(&self) -> Expr {
        let n = self.metric.dim();
        let vels = self.velocity_symbols();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let gij = self.metric.component(i, j);
                if gij.is_zero_literal() {
                    continue;
                }
                terms.push(
                    Expr::rational(1, 2)
                        * gij.clone()
                        * Expr::sym(&vels[i])
                        * Expr::sym(&vels[j]),
                );
            }
        }
        let raw = Expr::sum(terms);
        raw.normalize().unwrap_or(raw)
    }

    /// `L = T − V`.
    pub fn expr(&self) -> Expr {
        let raw = self.kinetic_expr() - self.potential.clone();
        raw.normalize().unwrap_or(raw)
    }

    /// `h = T + V`, the Noether integral of time translation.
    pub fn hamiltonian(&self) -> Expr {
        let raw = self.kinetic_expr() + self.potential.clone();
        raw.normalize().unwrap_or(raw)
    }
}

/// Sampling domain that also avoids the chart's declared singular sets.
pub fn chart_domain(chart: &Chart, base: &SampleDomain) -> SampleDomain {
    let mut d = base.clone();
    for s in chart.singular_sets() {
        d.avoid.push(s.clone());
    }
    d
}

fn is_zero_in(e: &Expr, chart: &Chart, domain: &SampleDomain, opts: &ZeroOptions) -> ZeroVerdict {
    e.is_zero(&chart_domain(chart, domain), opts)
}

/// Classifies a vector field against a metric.
///
/// The conformal factor is extracted by the trace formula
/// `ψ = tr((L_ξ g)·g⁻¹) / (2n)` (robust against vanishing metric
/// components) and the defining relation `L_ξ g − 2ψ g = 0` is then
/// verified component by component; failure of any component makes the
/// class [`CkvClass::NotConformal`].
pub fn classify(
    g: &Metric,
    xi: &VectorField,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConformalClassification> {
    if xi.chart() != g.chart() {
        return Err(SymmetryError::ChartMismatch);
    }
    let n = g.dim();
    let chart = g.chart();
    let lie = g.lie_derivative(xi)?;
    let inv = g.inverse()?;

    let mut trace_terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if lie[i][j].is_zero_literal() || inv[j][i].is_zero_literal() {
                continue;
            }
            trace_terms.push(lie[i][j].clone() * inv[j][i].clone());
        }
    }
    let psi =
        (Expr::rational(1, 2 * n as i64) * Expr::sum(trace_terms)).rational_compact()?;

    // Defining relation.
    let mut conformal = true;
    for i in 0..n {
        for j in i..n {
            let resid = (lie[i][j].clone()
                - Expr::int(2) * psi.clone() * g.component(i, j).clone())
            .rational_compact()?;
            if !is_zero_in(&resid, chart, domain, opts).is_zero() {
                conformal = false;
            }
        }
    }

    // Gradient test on the lowered field.
    let lowered = g.lower(xi)?;
    let mut gradient = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let curl = (lowered[i].diff(chart.coord(j)) - lowered[j].diff(chart.coord(i)))
                .rational_compact()?;
            if !is_zero_in(&curl, chart, domain, opts).is_zero() {
                gradient = false;
            }
        }
    }
    let potential = if gradient {
        gradient_potential(chart, &lowered, domain, opts)
    } else {
        None
    };

    if !conformal {
        return Ok(ConformalClassification {
            class: CkvClass::NotConformal,
            psi,
            gradient,
            potential,
            homothety: None,
        });
    }

    if is_zero_in(&psi, chart, domain, opts).is_zero() {
        return Ok(ConformalClassification {
            class: CkvClass::Killing,
            psi: Expr::int(0),
            gradient,
            potential,
            homothety: None,
        });
    }

    let psi_constant = chart
        .coords()
        .iter()
        .all(|c| is_zero_in(&psi.diff(c), chart, domain, opts).is_zero());
    if psi_constant {
        return Ok(ConformalClassification {
            class: CkvClass::Homothetic,
            psi: psi.clone(),
            gradient,
            potential,
            homothety: Some(psi),
        });
    }

    let hessian = g.covariant_hessian(&psi)?;
    let special = hessian
        .iter()
        .flatten()
        .all(|h| is_zero_in(h, chart, domain, opts).is_zero());
    let class = if special {
        CkvClass::SpecialConformal
    } else {
        CkvClass::ProperConformal
    };
    Ok(ConformalClassification {
        class,
        psi,
        gradient,
        potential,
        homothety: None,
    })
}

/// Potential for a closed lowered field by the star-shaped homotopy
/// formula `S(x) = ∫₀¹ ξ_i(t·x) x^i dt`, which is elementary when every
/// lowered component is polynomial in the chart coordinates. The
/// candidate is verified (`∂_i S = ξ_i`) before being returned.
fn gradient_potential(
    chart: &Chart,
    lowered: &[Expr],
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> Option<Expr> {
    let t = "__homotopy_t";
    let mut integrand_terms = Vec::new();
    for (i, w) in lowered.iter().enumerate() {
        if w.is_zero_literal() {
            continue;
        }
        let mut scaled = w.clone();
        for c in chart.coords() {
            scaled = scaled.subst_symbol(c, &(Expr::sym(t) * Expr::sym(c)));
        }
        integrand_terms.push(scaled * Expr::sym(chart.coord(i)));
    }
    let integrand = Expr::sum(integrand_terms).normalize().ok()?;
    let s = integrate_unit_interval(&integrand, t)?;
    // Verify the candidate.
    for (i, w) in lowered.iter().enumerate() {
        let resid = (s.diff(chart.coord(i)) - w.clone()).normalize().ok()?;
        if !is_zero_in(&resid, chart, domain, opts).is_zero() {
            return None;
        }
    }
    Some(s)
}

/// `∫₀¹ e dt` for `e` polynomial in the symbol `t` (arbitrary in
/// everything else): divides the coefficient of `t^k` by `k+1`.
fn integrate_unit_interval(e: &Expr, t: &str) -> Option<Expr> {
    let n = e.normalize().ok()?;
    let terms: Vec<Expr> = match &n {
        Expr::Sum(ts) => ts.clone(),
        other => vec![other.clone()],
    };
    let mut out = Vec::new();
    for term in terms {
        let (k, stripped) = strip_power(&term, t)?;
        out.push(Expr::rational(1, k + 1) * stripped);
    }
    Expr::sum(out).normalize().ok()
}

/// Splits `term = t^k · rest`; `None` if `t` occurs other than as a
/// plain nonnegative integer power.
fn strip_power(term: &Expr, t: &str) -> Option<(i64, Expr)> {
    let factors: Vec<Expr> = match term {
        Expr::Product(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let mut k = 0i64;
    let mut rest = Vec::new();
    for f in factors {
        match &f {
            Expr::Symbol(s) if s == t => k += 1,
            Expr::Power(b, e) => {
                if let Expr::Symbol(s) = &**b {
                    if s == t {
                        let kk = e.as_integer()?;
                        if kk < 0 {
                            return None;
                        }
                        k += kk;
                        continue;
                    }
                }
                if f.contains_symbol(t) {
                    return None;
                }
                rest.push(f);
            }
            other => {
                if other.contains_symbol(t) {
                    return None;
                }
                rest.push(f);
            }
        }
    }
    Some((k, Expr::product(rest)))
}

/// Lie point symmetry condition of the Klein–Gordon equation
/// `Δu = V u` for a conformal vector `ξ` with factor `ψ`:
/// `ξ^k V_{,k} + 2ψV − ((2−n)/2) Δψ = 0` for `n ≠ 2`, and
/// `ξ^k V_{,k} + 2ψV = 0` for `n = 2`.
pub fn kg_symmetry_residual(
    g: &Metric,
    v: &Expr,
    xi: &VectorField,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let class = classify(g, xi, domain, opts)?;
    if !class.class.is_conformal() {
        return Err(SymmetryError::NotConformal);
    }
    let n = g.dim();
    let mut residual = xi.apply(v) + Expr::int(2) * class.psi.clone() * v.clone();
    if n != 2 {
        let lap_psi = g.scalar_laplacian(&class.psi)?;
        residual = residual - Expr::rational(2 - n as i64, 2) * lap_psi;
    }
    let residual = residual.rational_compact()?;
    let verdict = is_zero_in(&residual, g.chart(), domain, opts);
    Ok(ConstraintReport::from_parts(
        vec![LabeledResidual {
            label: "kg-symmetry-condition".to_string(),
            expr: residual,
            verdict,
        }],
        vec![format!(
            "class {} with conformal factor {}",
            class.class.name(),
            class.psi
        )],
    ))
}

/// Symmetry condition of the conformal Klein–Gordon (Yamabe) equation:
/// the reduced residual `ξ^k V̄_{,k} + 2ψV̄`, cross-checked against the
/// full Klein–Gordon condition with `V = −((n−2)/(4(n−1))) R + V̄`.
pub fn yamabe_residual(
    g: &Metric,
    v_bar: &Expr,
    xi: &VectorField,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let class = classify(g, xi, domain, opts)?;
    if !class.class.is_conformal() {
        return Err(SymmetryError::NotConformal);
    }
    let n = g.dim() as i64;
    let reduced = (xi.apply(v_bar) + Expr::int(2) * class.psi.clone() * v_bar.clone())
        .rational_compact()?;
    let reduced_verdict = is_zero_in(&reduced, g.chart(), domain, opts);

    let curv = g.curvature()?;
    let v_full = (v_bar.clone()
        - Expr::rational(n - 2, 4 * (n - 1)) * curv.ricci_scalar.clone())
    .rational_compact()?;
    let full = kg_symmetry_residual(g, &v_full, xi, domain, opts)?;
    let full_residual = full.residuals.into_iter().next().expect("one residual");

    let agree = matches!(
        (&reduced_verdict, &full_residual.verdict),
        (ZeroVerdict::Zero, ZeroVerdict::Zero)
            | (ZeroVerdict::NonZero(_), ZeroVerdict::NonZero(_))
    );
    let notes = vec![format!(
        "reduced and full Klein-Gordon verdicts {}",
        if agree { "agree" } else { "disagree" }
    )];
    Ok(ConstraintReport::from_parts(
        vec![
            LabeledResidual {
                label: "yamabe-reduced-condition".to_string(),
                expr: reduced,
                verdict: reduced_verdict,
            },
            LabeledResidual {
                label: "kg-condition-with-conformal-potential".to_string(),
                expr: full_residual.expr,
                verdict: full_residual.verdict,
            },
        ],
        notes,
    ))
}

/// Identity satisfied by every genuine CKV:
/// `ξ^k R_{,k} + 2ψR + 2(n−1)Δψ = 0`. A self-test of the curvature
/// pipeline.
pub fn ckv_ricci_identity(
    g: &Metric,
    xi: &VectorField,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let class = classify(g, xi, domain, opts)?;
    if !class.class.is_conformal() {
        return Err(SymmetryError::NotConformal);
    }
    let n = g.dim() as i64;
    let curv = g.curvature()?;
    let r = curv.ricci_scalar.clone();
    let lap_psi = g.scalar_laplacian(&class.psi)?;
    let residual = (xi.apply(&r)
        + Expr::int(2) * class.psi.clone() * r
        + Expr::int(2 * (n - 1)) * lap_psi)
        .rational_compact()?;
    let verdict = is_zero_in(&residual, g.chart(), domain, opts);
    Ok(ConstraintReport::from_parts(
        vec![LabeledResidual {
            label: "ckv-ricci-identity".to_string(),
            expr: residual,
            verdict,
        }],
        vec![format!("class {}", class.class.name())],
    ))
}

/// Schrödinger symmetry condition for a (non-gradient) KV/HV `Y`:
/// `L_Y V + 2ψV + a₀ = 0`. The free scale of the generator is
/// absorbed (only `a₀` relative to it matters).
pub fn schrodinger_check_nongradient(
    g: &Metric,
    v: &Expr,
    y: &VectorField,
    a0: &Expr,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let class = classify(g, y, domain, opts)?;
    if !class.class.is_killing_or_homothetic() {
        return Err(SymmetryError::NotKillingOrHomothetic);
    }
    let residual = (y.apply(v) + Expr::int(2) * class.psi.clone() * v.clone() + a0.clone())
        .rational_compact()?;
    let verdict = is_zero_in(&residual, g.chart(), domain, opts);
    let notes = vec![
        format!(
            "generic symmetry vector: X = (2*({})*t + c1)*d_t + Y^i*d_i + ({})*u*d_u",
            class.psi, a0
        ),
        format!("gradient flag: {}", class.gradient),
    ];
    Ok(ConstraintReport::from_parts(
        vec![LabeledResidual {
            label: "schrodinger-condition".to_string(),
            expr: residual,
            verdict,
        }],
        notes,
    ))
}

/// Schrödinger symmetry condition in the gradient case. `s` is the
/// potential of the gradient KV/HV (`Y^i = S^{,i}`); the spatial
/// constraint is `L_Y V + 2ψV − ½c²S + d = 0`. Optional time-part
/// candidates `(T(t), F(t))` are checked against `T'' = c²T` and
/// `½T'ψ + F' = T d`.
#[allow(clippy::too_many_arguments)]
pub fn schrodinger_check_gradient(
    g: &Metric,
    v: &Expr,
    s: &Expr,
    c: &Expr,
    d: &Expr,
    time: &str,
    time_candidates: Option<(&Expr, &Expr)>,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let chart = g.chart();
    let grads: Vec<Expr> = chart.coords().iter().map(|x| s.diff(x)).collect();
    let y = g.raise(&grads)?;
    let class = classify(g, &y, domain, opts)?;
    if !class.class.is_killing_or_homothetic() {
        return Err(SymmetryError::NotKillingOrHomothetic);
    }
    let mut residuals = Vec::new();
    let spatial = (y.apply(v) + Expr::int(2) * class.psi.clone() * v.clone()
        - Expr::rational(1, 2) * Expr::pow_i(c.clone(), 2) * s.clone()
        + d.clone())
    .rational_compact()?;
    let verdict = is_zero_in(&spatial, chart, domain, opts);
    residuals.push(LabeledResidual {
        label: "schrodinger-gradient-condition".to_string(),
        expr: spatial,
        verdict,
    });
    if let Some((t_fn, f_fn)) = time_candidates {
        let mut time_domain = domain.clone();
        time_domain
            .intervals
            .insert(time.to_string(), (0.1, 1.5));
        let t_tt = (t_fn.diff(time).diff(time) - Expr::pow_i(c.clone(), 2) * t_fn.clone())
            .rational_compact()?;
        let tv = t_tt.is_zero(&time_domain, opts);
        residuals.push(LabeledResidual {
            label: "time-system-T".to_string(),
            expr: t_tt,
            verdict: tv,
        });
        let second = (Expr::rational(1, 2) * t_fn.diff(time) * class.psi.clone()
            + f_fn.diff(time)
            - t_fn.clone() * d.clone())
        .rational_compact()?;
        let sv = second.is_zero(&time_domain, opts);
        residuals.push(LabeledResidual {
            label: "time-system-F".to_string(),
            expr: second,
            verdict: sv,
        });
    }
    let notes = vec![format!(
        "gradient generator with psi = {}, class {}",
        class.psi,
        class.class.name()
    )];
    Ok(ConstraintReport::from_parts(residuals, notes))
}

/// Total derivative along trajectories for expressions in `(t, x)`:
/// `D_t e = e_{,t} + ẋ^j e_{,j}`.
fn total_time_derivative(e: &Expr, time: &str, chart: &Chart) -> Expr {
    let mut terms = vec![e.diff(time)];
    for c in chart.coords() {
        let de = e.diff(c);
        if de.is_zero_literal() {
            continue;
        }
        terms.push(Expr::sym(&velocity_name(c)) * de);
    }
    let raw = Expr::sum(terms);
    raw.normalize().unwrap_or(raw)
}

/// Noether point-symmetry condition
/// `X^{[1]}L + (D_t ξ)L − D_t f = 0`, required to hold identically in
/// `(t, x, ẋ)`. The first prolongation is
/// `η^{[1]i} = D_t η^i − ẋ^i D_t ξ`. The residual is split into
/// coefficients of velocity monomials and each coefficient is tested
/// separately; pointwise sampling over `(t,x)` alone would be unsound.
pub fn noether_residual(
    lagrangian: &Lagrangian,
    x: &PointSymmetry,
    gauge: &Expr,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let chart = lagrangian.chart().clone();
    let n = chart.dim();
    if x.space_components.len() != n {
        return Err(SymmetryError::ChartMismatch);
    }
    let time = lagrangian.time().to_string();
    let l = lagrangian.expr();
    let vels = lagrangian.velocity_symbols();

    let dt_xi = total_time_derivative(&x.time_component, &time, &chart);
    let mut terms = Vec::new();
    let dl_dt = l.diff(&time);
    if !dl_dt.is_zero_literal() {
        terms.push(x.time_component.clone() * dl_dt);
    }
    for i in 0..n {
        let eta = &x.space_components[i];
        let dl_dx = l.diff(chart.coord(i));
        if !eta.is_zero_literal() && !dl_dx.is_zero_literal() {
            terms.push(eta.clone() * dl_dx);
        }
        let eta1 = (total_time_derivative(eta, &time, &chart)
            - Expr::sym(&vels[i]) * dt_xi.clone())
        .normalize()?;
        let dl_dv = l.diff(&vels[i]);
        if !eta1.is_zero_literal() && !dl_dv.is_zero_literal() {
            terms.push(eta1 * dl_dv);
        }
    }
    if !dt_xi.is_zero_literal() {
        terms.push(dt_xi * l.clone());
    }
    terms.push(-total_time_derivative(gauge, &time, &chart));

    let residual = Expr::sum(terms).rational_compact()?;
    let groups = group_by_velocity_monomial(&residual, &vels)?;

    let mut residuals = Vec::new();
    for (monomial, coeff) in groups {
        let verdict = is_zero_in(&coeff, &chart, domain, opts);
        residuals.push(LabeledResidual {
            label: if monomial.is_empty() {
                "coefficient of 1".to_string()
            } else {
                format!("coefficient of {monomial}")
            },
            expr: coeff,
            verdict,
        });
    }
    if residuals.is_empty() {
        residuals.push(LabeledResidual {
            label: "coefficient of 1".to_string(),
            expr: Expr::int(0),
            verdict: ZeroVerdict::Zero,
        });
    }
    Ok(ConstraintReport::from_parts(residuals, Vec::new()))
}

/// Splits a canonical expression into velocity monomials and their
/// coefficients. Velocity symbols buried inside function kernels stay
/// with the coefficient (the oracle then samples them too, which keeps
/// the test sound).
fn group_by_velocity_monomial(e: &Expr, vels: &[String]) -> SResult<Vec<(String, Expr)>> {
    let terms: Vec<Expr> = match e {
        Expr::Sum(ts) => ts.clone(),
        other if other.is_zero_literal() => Vec::new(),
        other => vec![other.clone()],
    };
    let mut groups: BTreeMap<Vec<(String, i64)>, Vec<Expr>> = BTreeMap::new();
    for term in terms {
        let factors: Vec<Expr> = match &term {
            Expr::Product(fs) => fs.clone(),
            other => vec![other.clone()],
        };
        let mut key: Vec<(String, i64)> = Vec::new();
        let mut coeff_factors: Vec<Expr> = Vec::new();
        for f in factors {
            match &f {
                Expr::Symbol(s) if vels.contains(s) => key.push((s.clone(), 1)),
                Expr::Power(b, x) => {
                    if let (Expr::Symbol(s), Some(k)) = (&**b, x.as_integer()) {
                        if vels.contains(s) && k > 0 {
                            key.push((s.clone(), k));
                            continue;
                        }
                    }
                    coeff_factors.push(f);
                }
                _ => coeff_factors.push(f),
            }
        }
        key.sort();
        let mut merged: Vec<(String, i64)> = Vec::new();
        for (s, k) in key {
            if let Some(last) = merged.last_mut() {
                if last.0 == s {
                    last.1 += k;
                    continue;
                }
            }
            merged.push((s, k));
        }
        groups
            .entry(merged)
            .or_default()
            .push(Expr::product(coeff_factors));
    }
    let mut out = Vec::new();
    for (key, coeffs) in groups {
        let label = if key.is_empty() {
            String::new()
        } else {
            let parts: Vec<String> = key
                .iter()
                .map(|(s, k)| {
                    if *k == 1 {
                        s.clone()
                    } else {
                        format!("{s}^{k}")
                    }
                })
                .collect();
            parts.join("*")
        };
        out.push((label, Expr::sum(coeffs).normalize()?));
    }
    Ok(out)
}

/// First integral of a verified Noether symmetry:
/// `I = ξ(ẋ^k ∂L/∂ẋ^k − L) − η^i ∂L/∂ẋ^i + f`.
pub fn noether_integral(
    lagrangian: &Lagrangian,
    x: &PointSymmetry,
    gauge: &Expr,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<Expr> {
    let report = noether_residual(lagrangian, x, gauge, domain, opts)?;
    if !report.is_zero() {
        return Err(SymmetryError::NotASymmetry);
    }
    let l = lagrangian.expr();
    let vels = lagrangian.velocity_symbols();
    let mut energy_terms = Vec::new();
    for v in &vels {
        let dl_dv = l.diff(v);
        if !dl_dv.is_zero_literal() {
            energy_terms.push(Expr::sym(v) * dl_dv);
        }
    }
    let energy = Expr::sum(energy_terms) - l.clone();
    let mut terms = vec![x.time_component.clone() * energy];
    for (i, v) in vels.iter().enumerate() {
        let dl_dv = l.diff(v);
        if x.space_components[i].is_zero_literal() || dl_dv.is_zero_literal() {
            continue;
        }
        terms.push(-(x.space_components[i].clone() * dl_dv));
    }
    terms.push(gauge.clone());
    Ok(Expr::sum(terms).rational_compact()?)
}

/// Substitutes named integrals into a combination formula and
/// normalizes; e.g. `formula = "Ip*Im"` with inputs `Ip`, `Im`.
pub fn combine_integrals(inputs: &[(&str, &Expr)], formula: &str) -> SResult<Expr> {
    let parsed =
        Expr::parse(formula).map_err(|e| SymmetryError::UnknownName(e.to_string()))?;
    let known: BTreeMap<String, Expr> = inputs
        .iter()
        .map(|(k, v)| (k.to_string(), (*v).clone()))
        .collect();
    let substituted = parsed.subst_symbols(&known);
    Ok(substituted.rational_compact()?)
}

/// Conformal transport of a Lagrangian: kinetic metric `N²g`,
/// potential `V/N²`, with the reparametrization `dτ = N² dt` recorded.
pub fn conformal_lagrangian(lagrangian: &Lagrangian, n_factor: &Expr) -> SResult<Lagrangian> {
    let metric = lagrangian.kinetic_metric().conformal_transform(n_factor)?;
    let n2 = Expr::pow_i(n_factor.clone(), 2);
    let potential =
        (lagrangian.potential().clone() * Expr::pow_i(n2.clone(), -1)).rational_compact()?;
    let mut out = Lagrangian::new(metric, potential, lagrangian.time())?;
    out.reparametrization = Some(n2.normalize()?);
    Ok(out)
}

/// Transformation law of the conformal factor between `g` and
/// `ḡ = N²g` for a common CKV `ξ`: `N²ψ = N²ψ̄ − N N_{,i} ξ^i`.
pub fn conformal_psi_law(
    g: &Metric,
    n_factor: &Expr,
    xi: &VectorField,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let class_base = classify(g, xi, domain, opts)?;
    let g_bar = g.conformal_transform(n_factor)?;
    let class_bar = classify(&g_bar, xi, domain, opts)?;
    if !class_base.class.is_conformal() || !class_bar.class.is_conformal() {
        return Err(SymmetryError::NotConformal);
    }
    let n2 = Expr::pow_i(n_factor.clone(), 2);
    let transport: Expr = {
        let mut terms = Vec::new();
        for (i, c) in g.chart().coords().iter().enumerate() {
            let dn = n_factor.diff(c);
            if dn.is_zero_literal() {
                continue;
            }
            terms.push(n_factor.clone() * dn * xi.component(i).clone());
        }
        Expr::sum(terms)
    };
    let residual = (n2.clone() * class_base.psi.clone() - n2 * class_bar.psi.clone()
        + transport)
        .rational_compact()?;
    let verdict = is_zero_in(&residual, g.chart(), domain, opts);
    Ok(ConstraintReport::from_parts(
        vec![LabeledResidual {
            label: "conformal-factor-transport".to_string(),
            expr: residual,
            verdict,
        }],
        vec![format!(
            "base class {}, rescaled class {}",
            class_base.class.name(),
            class_bar.class.name()
        )],
    ))
}

/// Symmetry condition of the two-dimensional Klein–Gordon equation in
/// null coordinates (`u_{wz} + V u = 0` with generator
/// `F(w)∂_w + G(z)∂_z`): `(FV)_{,w} + (GV)_{,z} = 0`.
#[allow(clippy::too_many_arguments)]
pub fn null2d_condition(
    f: &Expr,
    g: &Expr,
    v: &Expr,
    w: &str,
    z: &str,
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    if f.contains_symbol(z) {
        return Err(SymmetryError::DependencyViolation(
            "first generator component must depend only on the first null coordinate",
        ));
    }
    if g.contains_symbol(w) {
        return Err(SymmetryError::DependencyViolation(
            "second generator component must depend only on the second null coordinate",
        ));
    }
    let residual = ((f.clone() * v.clone()).diff(w) + (g.clone() * v.clone()).diff(z))
        .rational_compact()?;
    let verdict = residual.is_zero(domain, opts);
    Ok(ConstraintReport::from_parts(
        vec![LabeledResidual {
            label: "null-coordinate-condition".to_string(),
            expr: residual,
            verdict,
        }],
        Vec::new(),
    ))
}

/// Discovers the Killing vectors of a polynomial (typically flat)
/// metric whose components have rational coefficients, by a polynomial
/// ansatz of the given total degree and exact rational elimination.
/// Returns a basis of the solution space and its dimension.
pub fn kv_discover_polynomial(g: &Metric, degree: u32) -> SResult<(Vec<VectorField>, usize)> {
    let chart = g.chart().clone();
    let n = chart.dim();
    let monomials = monomials_up_to(chart.coords(), degree);
    let m = monomials.len();

    // Ansatz ξ^i = Σ_k c_{i,k} · monomial_k with unknown rationals.
    let mut unknown_names = Vec::new();
    let mut components = Vec::new();
    for i in 0..n {
        let mut terms = Vec::new();
        for (k, mono) in monomials.iter().enumerate() {
            let name = format!("__kv_{i}_{k}");
            unknown_names.push(name.clone());
            terms.push(Expr::sym(&name) * mono.clone());
        }
        components.push(Expr::sum(terms));
    }
    let xi = VectorField::new(chart.clone(), components)?;
    let lie = g.lie_derivative(&xi)?;

    // Coefficient matching: every (component, coordinate-monomial)
    // pair gives one homogeneous linear equation over the unknowns.
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let coords = chart.coords().to_vec();
    for i in 0..n {
        for j in i..n {
            let entry = lie[i][j].normalize()?;
            let terms: Vec<Expr> = match &entry {
                Expr::Sum(ts) => ts.clone(),
                e if e.is_zero_literal() => Vec::new(),
                other => vec![other.clone()],
            };
            let mut row_map: BTreeMap<Vec<(String, i64)>, Vec<Rational>> = BTreeMap::new();
            for term in terms {
                let (mono_key, unknown_idx, coeff) =
                    split_linear_term(&term, &coords, &unknown_names)?;
                let entry = row_map
                    .entry(mono_key)
                    .or_insert_with(|| vec![Rational::zero(); unknown_names.len()]);
                entry[unknown_idx] += coeff;
            }
            for (_, row) in row_map {
                rows.push(row);
            }
        }
    }

    let basis = nullspace(rows, unknown_names.len());
    let dim = basis.len();
    let mut fields = Vec::new();
    for vecb in basis {
        let mut comps = Vec::new();
        for i in 0..n {
            let mut terms = Vec::new();
            for (k, mono) in monomials.iter().enumerate() {
                let c = &vecb[i * m + k];
                if c.is_zero() {
                    continue;
                }
                terms.push(Expr::Rational(c.clone()) * mono.clone());
            }
            comps.push(Expr::sum(terms));
        }
        fields.push(VectorField::new(chart.clone(), comps)?);
    }
    Ok((fields, dim))
}

fn monomials_up_to(coords: &[String], degree: u32) -> Vec<Expr> {
    let mut out = vec![Expr::int(1)];
    let mut frontier = vec![Expr::int(1)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for f in &frontier {
            for c in coords {
                let mono = (f.clone() * Expr::sym(c)).normalize().unwrap();
                if !out.contains(&mono) {
                    out.push(mono.clone());
                    next.push(mono);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Splits one canonical term of an expression linear in the unknowns
/// into (coordinate monomial key, unknown index, rational coefficient).
fn split_linear_term(
    term: &Expr,
    coords: &[String],
    unknowns: &[String],
) -> SResult<(Vec<(String, i64)>, usize, Rational)> {
    let factors: Vec<Expr> = match term {
        Expr::Product(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let mut coeff = Rational::one();
    let mut mono: Vec<(String, i64)> = Vec::new();
    let mut unknown: Option<usize> = None;
    for f in factors {
        match &f {
            Expr::Rational(r) => coeff *= r.clone(),
            Expr::Symbol(s) => {
                if let Some(idx) = unknowns.iter().position(|u| u == s) {
                    if unknown.is_some() {
                        return Err(SymmetryError::NonPolynomialMetric);
                    }
                    unknown = Some(idx);
                } else if coords.contains(s) {
                    mono.push((s.clone(), 1));
                } else {
                    return Err(SymmetryError::NonPolynomialMetric);
                }
            }
            Expr::Power(b, e) => {
                let (Expr::Symbol(s), Some(k)) = (&**b, e.as_integer()) else {
                    return Err(SymmetryError::NonPolynomialMetric);
                };
                if coords.contains(s) && k > 0 {
                    mono.push((s.clone(), k));
                } else {
                    return Err(SymmetryError::NonPolynomialMetric);
                }
            }
            _ => return Err(SymmetryError::NonPolynomialMetric),
        }
    }
    let Some(idx) = unknown else {
        return Err(SymmetryError::NonPolynomialMetric);
    };
    mono.sort();
    Ok((mono, idx, coeff))
}

/// Nullspace basis of a homogeneous system by exact Gauss–Jordan
/// elimination.
fn nullspace(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let mut pivot = None;
        for r in rank..rows.len() {
            if !rows[r][col].is_zero() {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][col].clone().recip();
        for x in rows[rank].iter_mut() {
            *x *= inv.clone();
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for cidx in 0..cols {
                let sub = factor.clone() * rows[rank][cidx].clone();
                rows[r][cidx] -= sub;
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![Rational::zero(); cols];
        v[fc] = Rational::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -rows[r][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// Runs the Klein–Gordon symmetry check for a potential family with
/// arbitrary functions, once per instantiation; the family passes only
/// if every instantiation passes.
pub fn verify_potential_family(
    g: &Metric,
    xi: &VectorField,
    potential: &Expr,
    instantiations: &[(String, Vec<String>, Expr)],
    domain: &SampleDomain,
    opts: &ZeroOptions,
) -> SResult<ConstraintReport> {
    let opaque = potential.opaque_names();
    if opaque.is_empty() {
        return kg_symmetry_residual(g, potential, xi, domain, opts);
    }
    let mut residuals = Vec::new();
    let mut notes = Vec::new();
    for (idx, (name, params, body)) in instantiations.iter().enumerate() {
        if !opaque.contains(name) {
            continue;
        }
        let params_ref: Vec<&str> = params.iter().map(|p| p.as_str()).collect();
        let inst = potential.instantiate(name, &params_ref, body).normalize()?;
        let rep = kg_symmetry_residual(g, &inst, xi, domain, opts)?;
        notes.push(format!("instantiation {idx}: {name} := {body}"));
        for mut r in rep.residuals {
            r.label = format!("{} [{} := {}]", r.label, name, body);
            residuals.push(r);
        }
    }
    if residuals.is_empty() {
        return Err(SymmetryError::UnknownName(
            "no instantiation matched the potential's arbitrary functions".to_string(),
        ));
    }
    Ok(ConstraintReport::from_parts(residuals, notes))
}
