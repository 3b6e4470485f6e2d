//! Tensor calculus over a coordinate chart.
//!
//! A [`Metric`] is a symmetric matrix of expressions over a [`Chart`];
//! everything else (inverse, Christoffel symbols, Riemann/Ricci
//! curvature, the Laplace–Beltrami operator, Lie derivatives along
//! vector fields, covariant Hessians, conformal rescalings) is derived
//! from it. All operations are pure and the results are normalized
//! expressions.
//!
//! Curvature sign convention:
//! `R^i_{jkl} = Γ^i_{jl,k} − Γ^i_{jk,l} + Γ^i_{mk}Γ^m_{jl} − Γ^i_{ml}Γ^m_{jk}`,
//! `R_{jl} = R^i_{jil}`, `R = g^{jl} R_{jl}`; with it the round unit
//! 3-sphere has scalar curvature +6. Lorentzian signatures are allowed;
//! only nondegeneracy is required.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::expr::{Expr, NormalizeError};

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryError {
    /// Determinant normalizes to syntactic zero.
    SingularMetric,
    /// Operands live on different charts.
    ChartMismatch,
    /// Matrix/vector shape does not match the chart dimension.
    DimensionMismatch,
    /// Metric is not symmetric after normalization.
    NotSymmetric { row: usize, col: usize },
    /// A conformal factor that is syntactically zero.
    ZeroConformalFactor,
    Normalize(NormalizeError),
}

impl From<NormalizeError> for GeometryError {
    fn from(e: NormalizeError) -> Self {
        GeometryError::Normalize(e)
    }
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeometryError::SingularMetric => write!(f, "metric determinant is syntactically zero"),
            GeometryError::ChartMismatch => write!(f, "operands are defined on different charts"),
            GeometryError::DimensionMismatch => write!(f, "shape does not match chart dimension"),
            GeometryError::NotSymmetric { row, col } => {
                write!(f, "metric component ({row},{col}) is not symmetric")
            }
            GeometryError::ZeroConformalFactor => {
                write!(f, "conformal factor is syntactically zero")
            }
            GeometryError::Normalize(e) => write!(f, "{e}"),
        }
    }
}

type GResult<T> = Result<T, GeometryError>;

/// Ordered coordinate symbols plus declared singular sets (expressions
/// that must stay nonzero when the chart is sampled).
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    singular: Vec<Expr>,
}

impl Chart {
    pub fn new(coords: &[&str]) -> Chart {
        let names: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert!(
            dedup.len() == names.len() && !names.is_empty(),
            "chart coordinates must be distinct and nonempty"
        );
        Chart {
            coords: names,
            singular: Vec::new(),
        }
    }

    pub fn with_singular(mut self, e: Expr) -> Chart {
        self.singular.push(e);
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn singular_sets(&self) -> &[Expr] {
        &self.singular
    }
}

/// Square matrix of expressions.
pub type ExprMatrix = Vec<Vec<Expr>>;

fn normalize_matrix(m: &ExprMatrix) -> GResult<ExprMatrix> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|e| compact(e))
                .collect()
        })
        .collect()
}

/// Common-denominator compaction keeps curvature-grade rational
/// expressions from exploding term by term.
fn compact(e: &Expr) -> GResult<Expr> {
    e.rational_compact().map_err(GeometryError::from)
}

/// Determinant by cofactor expansion (the working dimension of the
/// catalog is at most 4, where this stays small).
fn det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut terms = Vec::with_capacity(n);
    for j in 0..n {
        if m[0][j].is_zero_literal() {
            continue;
        }
        let minor = minor_matrix(m, 0, j);
        let cof = det(&minor);
        let signed = if j % 2 == 0 {
            m[0][j].clone() * cof
        } else {
            -(m[0][j].clone() * cof)
        };
        terms.push(signed);
    }
    Expr::sum(terms)
}

fn minor_matrix(m: &[Vec<Expr>], row: usize, col: usize) -> ExprMatrix {
    let n = m.len();
    let mut out = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == row {
            continue;
        }
        let mut r = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == col {
                continue;
            }
            r.push(m[i][j].clone());
        }
        out.push(r);
    }
    out
}

/// Vector field: one component expression per chart coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    chart: Chart,
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: Chart, components: Vec<Expr>) -> GResult<VectorField> {
        if components.len() != chart.dim() {
            return Err(GeometryError::DimensionMismatch);
        }
        let components = components
            .iter()
            .map(|e| e.normalize().map_err(GeometryError::from))
            .collect::<GResult<Vec<_>>>()?;
        Ok(VectorField { chart, components })
    }

    pub fn parse(chart: &Chart, components: &[&str]) -> GResult<VectorField> {
        let comps = components
            .iter()
            .map(|s| Expr::parse(s).map_err(|_| GeometryError::DimensionMismatch))
            .collect::<GResult<Vec<_>>>()?;
        VectorField::new(chart.clone(), comps)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }

    /// Directional derivative `ξ^k ∂_k s`.
    pub fn apply(&self, s: &Expr) -> Expr {
        let terms: Vec<Expr> = self
            .components
            .iter()
            .zip(self.chart.coords())
            .map(|(xi, c)| xi.clone() * s.diff(c))
            .collect();
        let raw = Expr::sum(terms);
        raw.normalize().unwrap_or(raw)
    }
}

/// Christoffel symbols and curvature tensors of a metric, computed once
/// and shared.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    /// `Γ^i_{jk}`, indexed `[i][j][k]`, symmetric in `(j,k)`.
    pub christoffel: Vec<ExprMatrix>,
    /// `Γ^i = g^{jk} Γ^i_{jk}`.
    pub contracted: Vec<Expr>,
    /// `R^i_{jkl}`, indexed `[i][j][k][l]`.
    pub riemann: Vec<Vec<ExprMatrix>>,
    /// `R_{jl}`.
    pub ricci: ExprMatrix,
    /// `R = g^{jl} R_{jl}`.
    pub ricci_scalar: Expr,
}

/// Second-order linear PDE in coefficient form
/// `A^{ab} u_{,ab} + B^a u_{,a} − V·u (− u_t) = 0`.
#[derive(Clone, Debug)]
pub struct PdeModel {
    pub chart: Chart,
    /// Symmetric second-order coefficients `A^{ab}`.
    pub second: ExprMatrix,
    /// First-order coefficients `B^a` (for a Laplace–Beltrami operator
    /// these are `−Γ^a`).
    pub first: Vec<Expr>,
    /// Potential multiplying `u`.
    pub potential: Expr,
    /// Whether the model carries a `−u_t` diffusion term.
    pub time_derivative: bool,
}

impl PdeModel {
    pub fn with_potential(mut self, v: Expr) -> GResult<PdeModel> {
        self.potential = v.normalize()?;
        Ok(self)
    }

    pub fn with_time_derivative(mut self) -> PdeModel {
        self.time_derivative = true;
        self
    }

    /// Applies the spatial operator to a symbolic scalar:
    /// `A^{ab} s_{,ab} + B^a s_{,a}` (no potential term).
    pub fn apply_operator(&self, s: &Expr) -> Expr {
        let n = self.chart.dim();
        let mut terms = Vec::new();
        let first_partials: Vec<Expr> =
            self.chart.coords().iter().map(|c| s.diff(c)).collect();
        for a in 0..n {
            for b in 0..n {
                if self.second[a][b].is_zero_literal() {
                    continue;
                }
                let sab = first_partials[a].diff(self.chart.coord(b));
                terms.push(self.second[a][b].clone() * sab);
            }
        }
        for a in 0..n {
            if self.first[a].is_zero_literal() {
                continue;
            }
            terms.push(self.first[a].clone() * first_partials[a].clone());
        }
        let raw = Expr::sum(terms);
        raw.rational_compact().unwrap_or(raw)
    }

    /// Full symbolic residual for a time-independent candidate `u`:
    /// `A^{ab} u_{,ab} + B^a u_{,a} − V u`.
    pub fn residual(&self, u: &Expr) -> Expr {
        let op = self.apply_operator(u);
        let raw = op - self.potential.clone() * u.clone();
        raw.rational_compact().unwrap_or(raw)
    }
}

/// Symmetric metric over a chart. The inverse and curvature are
/// computed on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    chart: Chart,
    components: ExprMatrix,
}

impl Metric {
    pub fn new(chart: Chart, components: ExprMatrix) -> GResult<Metric> {
        let n = chart.dim();
        if components.len() != n || components.iter().any(|r| r.len() != n) {
            return Err(GeometryError::DimensionMismatch);
        }
        let components = normalize_matrix(&components)?;
        for i in 0..n {
            for j in (i + 1)..n {
                let diffed =
                    (components[i][j].clone() - components[j][i].clone()).normalize()?;
                if !diffed.is_zero_literal() {
                    return Err(GeometryError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Metric { chart, components })
    }

    pub fn parse(chart: &Chart, rows: &[&[&str]]) -> GResult<Metric> {
        let comps = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| Expr::parse(s).map_err(|_| GeometryError::DimensionMismatch))
                    .collect::<GResult<Vec<_>>>()
            })
            .collect::<GResult<Vec<_>>>()?;
        Metric::new(chart.clone(), comps)
    }

    pub fn diagonal(chart: Chart, entries: Vec<Expr>) -> GResult<Metric> {
        let n = chart.dim();
        if entries.len() != n {
            return Err(GeometryError::DimensionMismatch);
        }
        let mut m = vec![vec![Expr::int(0); n]; n];
        for (i, e) in entries.into_iter().enumerate() {
            m[i][i] = e;
        }
        Metric::new(chart, m)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn components(&self) -> &ExprMatrix {
        &self.components
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i][j]
    }

    pub fn determinant(&self) -> GResult<Expr> {
        Ok(det(&self.components).normalize()?)
    }

    /// Inverse by adjugate over determinant; errors when the
    /// determinant is syntactically zero.
    pub fn inverse(&self) -> GResult<ExprMatrix> {
        let n = self.dim();
        let d = self.determinant()?;
        if d.is_zero_literal() {
            return Err(GeometryError::SingularMetric);
        }
        let d_inv = Expr::pow_i(d, -1);
        let mut out = vec![vec![Expr::int(0); n]; n];
        for i in 0..n {
            for j in 0..n {
                if n == 1 {
                    out[0][0] = compact(&d_inv)?;
                    continue;
                }
                let cof = det(&minor_matrix(&self.components, j, i));
                let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                out[i][j] = compact(&(signed * d_inv.clone()))?;
            }
        }
        Ok(out)
    }

    /// Christoffel symbols, Riemann and Ricci tensors, and the Ricci
    /// scalar, in the crate's sign convention.
    pub fn curvature(&self) -> GResult<CurvatureBundle> {
        let n = self.dim();
        let inv = self.inverse()?;
        let coords = self.chart.coords().to_vec();

        // g_{ij,k}
        let mut dg = vec![vec![vec![Expr::int(0); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    dg[i][j][k] = self.components[i][j].diff(&coords[k]);
                }
            }
        }

        let mut gamma = vec![vec![vec![Expr::int(0); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let mut terms = Vec::new();
                    for m in 0..n {
                        if inv[i][m].is_zero_literal() {
                            continue;
                        }
                        let bracket =
                            dg[m][j][k].clone() + dg[m][k][j].clone() - dg[j][k][m].clone();
                        terms.push(inv[i][m].clone() * bracket);
                    }
                    let g = compact(&(Expr::rational(1, 2) * Expr::sum(terms)))?;
                    gamma[i][j][k] = g.clone();
                    gamma[i][k][j] = g;
                }
            }
        }

        let mut contracted = vec![Expr::int(0); n];
        for i in 0..n {
            let mut terms = Vec::new();
            for j in 0..n {
                for k in 0..n {
                    if inv[j][k].is_zero_literal() || gamma[i][j][k].is_zero_literal() {
                        continue;
                    }
                    terms.push(inv[j][k].clone() * gamma[i][j][k].clone());
                }
            }
            contracted[i] = compact(&Expr::sum(terms))?;
        }

        // R^i_{jkl} = Γ^i_{jl,k} − Γ^i_{jk,l} + Γ^i_{mk}Γ^m_{jl} − Γ^i_{ml}Γ^m_{jk}
        let mut riemann = vec![vec![vec![vec![Expr::int(0); n]; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if l < k {
                            // antisymmetry in (k,l)
                            let r = riemann[i][j][l][k].clone();
                            riemann[i][j][k][l] = compact(&-r)?;
                            continue;
                        }
                        if k == l {
                            continue;
                        }
                        let mut terms = vec![
                            gamma[i][j][l].diff(&coords[k]),
                            -(gamma[i][j][k].diff(&coords[l])),
                        ];
                        for m in 0..n {
                            if !gamma[i][m][k].is_zero_literal()
                                && !gamma[m][j][l].is_zero_literal()
                            {
                                terms.push(gamma[i][m][k].clone() * gamma[m][j][l].clone());
                            }
                            if !gamma[i][m][l].is_zero_literal()
                                && !gamma[m][j][k].is_zero_literal()
                            {
                                terms
                                    .push(-(gamma[i][m][l].clone() * gamma[m][j][k].clone()));
                            }
                        }
                        riemann[i][j][k][l] = compact(&Expr::sum(terms))?;
                    }
                }
            }
        }

        let mut ricci = vec![vec![Expr::int(0); n]; n];
        for j in 0..n {
            for l in 0..n {
                let mut terms = Vec::new();
                for i in 0..n {
                    if !riemann[i][j][i][l].is_zero_literal() {
                        terms.push(riemann[i][j][i][l].clone());
                    }
                }
                ricci[j][l] = compact(&Expr::sum(terms))?;
            }
        }

        let mut scalar_terms = Vec::new();
        for j in 0..n {
            for l in 0..n {
                if inv[j][l].is_zero_literal() || ricci[j][l].is_zero_literal() {
                    continue;
                }
                scalar_terms.push(inv[j][l].clone() * ricci[j][l].clone());
            }
        }
        let ricci_scalar = compact(&Expr::sum(scalar_terms))?;

        Ok(CurvatureBundle {
            christoffel: gamma,
            contracted,
            riemann,
            ricci,
            ricci_scalar,
        })
    }

    /// The Laplace–Beltrami operator as a PDE model:
    /// `Δu = g^{ij} u_{,ij} − Γ^i u_{,i}`.
    pub fn laplacian(&self) -> GResult<PdeModel> {
        let inv = self.inverse()?;
        let curv = self.curvature()?;
        let first = curv
            .contracted
            .iter()
            .map(|g| compact(&-g.clone()))
            .collect::<GResult<Vec<_>>>()?;
        Ok(PdeModel {
            chart: self.chart.clone(),
            second: inv,
            first,
            potential: Expr::int(0),
            time_derivative: false,
        })
    }

    /// `Δs` for a concrete scalar expression.
    pub fn scalar_laplacian(&self, s: &Expr) -> GResult<Expr> {
        Ok(self.laplacian()?.apply_operator(s))
    }

    /// `(L_ξ g)_{ij} = ξ^k g_{ij,k} + g_{kj} ξ^k_{,i} + g_{ik} ξ^k_{,j}`.
    pub fn lie_derivative(&self, xi: &VectorField) -> GResult<ExprMatrix> {
        if xi.chart() != &self.chart {
            return Err(GeometryError::ChartMismatch);
        }
        let n = self.dim();
        let coords = self.chart.coords().to_vec();
        let mut out = vec![vec![Expr::int(0); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut terms = Vec::new();
                for k in 0..n {
                    let dgij = self.components[i][j].diff(&coords[k]);
                    if !dgij.is_zero_literal() {
                        terms.push(xi.component(k).clone() * dgij);
                    }
                    let dxik_i = xi.component(k).diff(&coords[i]);
                    if !dxik_i.is_zero_literal() && !self.components[k][j].is_zero_literal() {
                        terms.push(self.components[k][j].clone() * dxik_i);
                    }
                    let dxik_j = xi.component(k).diff(&coords[j]);
                    if !dxik_j.is_zero_literal() && !self.components[i][k].is_zero_literal() {
                        terms.push(self.components[i][k].clone() * dxik_j);
                    }
                }
                let e = compact(&Expr::sum(terms))?;
                out[i][j] = e.clone();
                out[j][i] = e;
            }
        }
        Ok(out)
    }

    /// Covariant Hessian `s_{;ij} = s_{,ij} − Γ^k_{ij} s_{,k}`.
    pub fn covariant_hessian(&self, s: &Expr) -> GResult<ExprMatrix> {
        let n = self.dim();
        let coords = self.chart.coords().to_vec();
        let curv = self.curvature()?;
        let firsts: Vec<Expr> = coords.iter().map(|c| s.diff(c)).collect();
        let mut out = vec![vec![Expr::int(0); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut terms = vec![firsts[i].diff(&coords[j])];
                for k in 0..n {
                    if curv.christoffel[k][i][j].is_zero_literal()
                        || firsts[k].is_zero_literal()
                    {
                        continue;
                    }
                    terms.push(-(curv.christoffel[k][i][j].clone() * firsts[k].clone()));
                }
                let e = compact(&Expr::sum(terms))?;
                out[i][j] = e.clone();
                out[j][i] = e;
            }
        }
        Ok(out)
    }

    /// Conformally rescaled metric `N²·g`. Errors when `N` normalizes
    /// to zero.
    pub fn conformal_transform(&self, n_factor: &Expr) -> GResult<Metric> {
        let nf = n_factor.normalize()?;
        if nf.is_zero_literal() {
            return Err(GeometryError::ZeroConformalFactor);
        }
        let n2 = Expr::pow_i(nf, 2);
        let comps = self
            .components
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        (n2.clone() * e.clone())
                            .normalize()
                            .map_err(GeometryError::from)
                    })
                    .collect::<GResult<Vec<_>>>()
            })
            .collect::<GResult<Vec<_>>>()?;
        Metric::new(self.chart.clone(), comps)
    }

    /// Lowers a vector field: `ξ_i = g_{ij} ξ^j`.
    pub fn lower(&self, xi: &VectorField) -> GResult<Vec<Expr>> {
        if xi.chart() != &self.chart {
            return Err(GeometryError::ChartMismatch);
        }
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut terms = Vec::new();
            for j in 0..n {
                if self.components[i][j].is_zero_literal() {
                    continue;
                }
                terms.push(self.components[i][j].clone() * xi.component(j).clone());
            }
            out.push(compact(&Expr::sum(terms))?);
        }
        Ok(out)
    }

    /// Raises an index: `ξ^i = g^{ij} w_j`.
    pub fn raise(&self, w: &[Expr]) -> GResult<VectorField> {
        if w.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch);
        }
        let inv = self.inverse()?;
        let n = self.dim();
        let mut comps = Vec::with_capacity(n);
        for i in 0..n {
            let mut terms = Vec::new();
            for j in 0..n {
                if inv[i][j].is_zero_literal() {
                    continue;
                }
                terms.push(inv[i][j].clone() * w[j].clone());
            }
            comps.push(Expr::sum(terms));
        }
        VectorField::new(self.chart.clone(), comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{SampleDomain, ZeroOptions, ZeroVerdict};

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn assert_zero_numeric(x: &Expr, domain: &SampleDomain) {
        assert_eq!(
            x.is_zero(domain, &ZeroOptions::default()),
            ZeroVerdict::Zero,
            "expression not zero: {x}"
        );
    }

    #[test]
    fn euclidean_inverse_is_identity() {
        let chart = Chart::new(&["x", "y"]);
        let g = Metric::diagonal(chart, vec![Expr::int(1), Expr::int(1)]).unwrap();
        let inv = g.inverse().unwrap();
        assert_eq!(inv[0][0], Expr::int(1));
        assert_eq!(inv[0][1], Expr::int(0));
    }

    #[test]
    fn minisuperspace_inverse() {
        // [[0, 2b], [2b, 2a]] inverts to [[-a/(2b^2), 1/(2b)], [1/(2b), 0]]
        let chart = Chart::new(&["a", "b"]);
        let g = Metric::parse(&chart, &[&["0", "2*b"], &["2*b", "2*a"]]).unwrap();
        let inv = g.inverse().unwrap();
        assert!((inv[0][0].clone() - e("-a/(2*b^2)")).is_zero_symbolic());
        assert!((inv[0][1].clone() - e("1/(2*b)")).is_zero_symbolic());
        assert!(inv[1][1].is_zero_literal());
        // and g·g^{-1} samples to the identity
        let domain = SampleDomain::default();
        for i in 0..2 {
            for j in 0..2 {
                let mut terms = Vec::new();
                for k in 0..2 {
                    terms.push(g.component(i, k).clone() * inv[k][j].clone());
                }
                let target = if i == j { Expr::int(1) } else { Expr::int(0) };
                assert_zero_numeric(&(Expr::sum(terms) - target), &domain);
            }
        }
    }

    #[test]
    fn polar_curvature() {
        let chart = Chart::new(&["r", "theta"]).with_singular(e("r"));
        let g = Metric::diagonal(chart, vec![Expr::int(1), e("r^2")]).unwrap();
        let curv = g.curvature().unwrap();
        // Γ^r_{θθ} = -r, Γ^θ_{rθ} = 1/r, flat
        assert!((curv.christoffel[0][1][1].clone() + e("r")).is_zero_symbolic());
        assert!((curv.christoffel[1][0][1].clone() - e("1/r")).is_zero_symbolic());
        let domain = SampleDomain::default();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_zero_numeric(&curv.riemann[i][j][k][l], &domain);
                    }
                }
            }
        }
        assert!(curv.ricci_scalar.is_zero_symbolic());
    }

    #[test]
    fn polar_laplacian() {
        let chart = Chart::new(&["r", "theta"]).with_singular(e("r"));
        let g = Metric::diagonal(chart, vec![Expr::int(1), e("r^2")]).unwrap();
        let lap = g.laplacian().unwrap();
        // u_rr + (1/r) u_r + (1/r^2) u_θθ on a sample scalar
        let u = e("r^3*sin(theta)");
        let direct = lap.apply_operator(&u);
        let expected = e("9*r*sin(theta) - r*sin(theta)");
        assert_zero_numeric(&(direct - expected), &SampleDomain::default());
    }

    #[test]
    fn rotation_is_killing_dilation_is_homothetic() {
        let chart = Chart::new(&["x", "y"]);
        let g = Metric::diagonal(chart.clone(), vec![Expr::int(1), Expr::int(1)]).unwrap();
        let rot = VectorField::parse(&chart, &["y", "-x"]).unwrap();
        let lie = g.lie_derivative(&rot).unwrap();
        for row in &lie {
            for x in row {
                assert!(x.is_zero_literal());
            }
        }
        let dil = VectorField::parse(&chart, &["x", "y"]).unwrap();
        let lie = g.lie_derivative(&dil).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { Expr::int(2) } else { Expr::int(0) };
                assert!((lie[i][j].clone() - expect).is_zero_symbolic());
            }
        }
    }

    #[test]
    fn minisuperspace_homothety() {
        // H = -2a ∂a + 2b ∂b has L_H g = 2 g on [[0,2b],[2b,2a]]
        let chart = Chart::new(&["a", "b"]);
        let g = Metric::parse(&chart, &[&["0", "2*b"], &["2*b", "2*a"]]).unwrap();
        let h = VectorField::parse(&chart, &["-2*a", "2*b"]).unwrap();
        let lie = g.lie_derivative(&h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = Expr::int(2) * g.component(i, j).clone();
                assert!((lie[i][j].clone() - expect).is_zero_symbolic());
            }
        }
    }

    #[test]
    fn hessian_examples() {
        let chart = Chart::new(&["x", "y"]);
        let g = Metric::diagonal(chart.clone(), vec![Expr::int(1), Expr::int(1)]).unwrap();
        let h = g.covariant_hessian(&e("x")).unwrap();
        assert!(h.iter().flatten().all(|x| x.is_zero_literal()));
        let h2 = g.covariant_hessian(&e("x^2")).unwrap();
        assert_eq!(h2[0][0], Expr::int(2));
        assert!(h2[0][1].is_zero_literal() && h2[1][1].is_zero_literal());

        // polar chart: Hess(r) has θθ entry r from -Γ^r_{θθ}
        let chart = Chart::new(&["r", "theta"]).with_singular(e("r"));
        let gp = Metric::diagonal(chart, vec![Expr::int(1), e("r^2")]).unwrap();
        let hp = gp.covariant_hessian(&e("r")).unwrap();
        assert!(hp[0][0].is_zero_literal());
        assert!((hp[1][1].clone() - e("r")).is_zero_symbolic());
    }

    #[test]
    fn conformal_transform_scales_components() {
        let chart = Chart::new(&["x", "y"]);
        let g = Metric::diagonal(chart, vec![Expr::int(1), Expr::int(1)]).unwrap();
        let gbar = g.conformal_transform(&e("x")).unwrap();
        assert!((gbar.component(0, 0).clone() - e("x^2")).is_zero_symbolic());
        assert!(matches!(
            g.conformal_transform(&e("x - x")),
            Err(GeometryError::ZeroConformalFactor)
        ));
    }

    #[test]
    fn sphere_scalar_curvature() {
        // unit round 3-sphere in stereographic coordinates:
        // g = 4 δ/(1+ρ²)², scalar curvature 6
        let chart = Chart::new(&["x", "y", "z"]);
        let conf = e("4/(1 + x^2 + y^2 + z^2)^2");
        let g = Metric::diagonal(chart, vec![conf.clone(), conf.clone(), conf]).unwrap();
        let curv = g.curvature().unwrap();
        assert_zero_numeric(
            &(curv.ricci_scalar.clone() - Expr::int(6)),
            &SampleDomain::default(),
        );
        // Ricci symmetry comes along
        for j in 0..3 {
            for l in 0..3 {
                assert!(
                    (curv.ricci[j][l].clone() - curv.ricci[l][j].clone()).is_zero_symbolic()
                );
            }
        }
    }
}
