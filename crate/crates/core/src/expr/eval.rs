//! IEEE-double evaluation under explicit bindings.
//!
//! Every free symbol must be bound to a value and every opaque function
//! to either a symbolic instantiation (an expression over formal
//! parameters, so derivative multi-indices can be resolved exactly) or
//! a native numeric routine (used for special functions; natives cannot
//! carry derivative orders).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use super::{Builtin, Expr};

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    UnboundSymbol(String),
    UnboundOpaque(String),
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    /// ln/sqrt of a negative value, fractional power of a negative
    /// base, or similar.
    Domain(&'static str),
    /// Division by a value with magnitude below 1e-300.
    DivisionByNearZero,
    /// The result (or an intermediate) overflowed or is NaN.
    NonFinite,
    /// A native opaque binding cannot supply derivatives.
    DerivativeOfNative(String),
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::UnboundSymbol(s) => write!(f, "unbound symbol '{s}'"),
            EvalError::UnboundOpaque(s) => write!(f, "unbound opaque function '{s}'"),
            EvalError::ArityMismatch {
                name,
                expected,
                got,
            } => write!(
                f,
                "opaque function '{name}' expects {expected} argument(s), got {got}"
            ),
            EvalError::Domain(what) => write!(f, "domain error: {what}"),
            EvalError::DivisionByNearZero => write!(f, "division by value below 1e-300"),
            EvalError::NonFinite => write!(f, "non-finite result"),
            EvalError::DerivativeOfNative(s) => {
                write!(f, "native function '{s}' cannot be differentiated")
            }
        }
    }
}

/// How an opaque function evaluates.
#[derive(Clone)]
pub enum OpaqueBinding {
    /// `params |-> body`; the body may reference outer symbols.
    Instantiation { params: Vec<String>, body: Expr },
    /// Native numeric routine.
    Native {
        arity: usize,
        f: Arc<dyn Fn(&[f64]) -> Result<f64, EvalError> + Send + Sync>,
    },
}

impl core::fmt::Debug for OpaqueBinding {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OpaqueBinding::Instantiation { params, body } => f
                .debug_struct("Instantiation")
                .field("params", params)
                .field("body", body)
                .finish(),
            OpaqueBinding::Native { arity, .. } => {
                f.debug_struct("Native").field("arity", arity).finish()
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Bindings {
    symbols: BTreeMap<String, f64>,
    opaques: BTreeMap<String, OpaqueBinding>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.symbols.insert(name.to_string(), value);
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.symbols.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.symbols.iter()
    }

    /// Binds an opaque function to a symbolic instantiation.
    pub fn define(&mut self, name: &str, params: &[&str], body: Expr) -> &mut Self {
        self.opaques.insert(
            name.to_string(),
            OpaqueBinding::Instantiation {
                params: params.iter().map(|p| p.to_string()).collect(),
                body,
            },
        );
        self
    }

    /// Binds an opaque function to a native numeric routine.
    pub fn define_native(
        &mut self,
        name: &str,
        arity: usize,
        f: Arc<dyn Fn(&[f64]) -> Result<f64, EvalError> + Send + Sync>,
    ) -> &mut Self {
        self.opaques
            .insert(name.to_string(), OpaqueBinding::Native { arity, f });
        self
    }

    pub fn opaque(&self, name: &str) -> Option<&OpaqueBinding> {
        self.opaques.get(name)
    }
}

pub fn eval(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    let v = eval_inner(e, b)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_inner(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    match e {
        Expr::Rational(r) => r.to_f64().ok_or(EvalError::NonFinite),
        Expr::Symbol(s) => b
            .get(s)
            .ok_or_else(|| EvalError::UnboundSymbol(s.clone())),
        Expr::Neg(a) => Ok(-eval_inner(a, b)?),
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_inner(t, b)?;
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            let mut acc = 1.0;
            for x in fs {
                acc *= eval_inner(x, b)?;
            }
            Ok(acc)
        }
        Expr::Power(base, exp) => {
            let bv = eval_inner(base, b)?;
            let ev = eval_inner(exp, b)?;
            power(bv, ev)
        }
        Expr::Builtin(f, a) => {
            let x = eval_inner(a, b)?;
            Ok(match f {
                Builtin::Sin => libm::sin(x),
                Builtin::Cos => libm::cos(x),
                Builtin::Tan => libm::tan(x),
                Builtin::Exp => libm::exp(x),
                Builtin::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain("ln of a non-positive value"));
                    }
                    libm::log(x)
                }
                Builtin::Sqrt => {
                    if x < 0.0 {
                        return Err(EvalError::Domain("sqrt of a negative value"));
                    }
                    libm::sqrt(x)
                }
                Builtin::Sinh => libm::sinh(x),
                Builtin::Cosh => libm::cosh(x),
                Builtin::Arctan => libm::atan(x),
            })
        }
        Expr::Opaque(app) => {
            let binding = b
                .opaque(&app.name)
                .ok_or_else(|| EvalError::UnboundOpaque(app.name.clone()))?
                .clone();
            match binding {
                OpaqueBinding::Instantiation { params, body } => {
                    if params.len() != app.args.len() {
                        return Err(EvalError::ArityMismatch {
                            name: app.name.clone(),
                            expected: params.len(),
                            got: app.args.len(),
                        });
                    }
                    let mut inst = body;
                    for (param, order) in params.iter().zip(app.orders.iter()) {
                        for _ in 0..*order {
                            inst = inst.d(param);
                        }
                    }
                    let mut scope = b.clone();
                    for (param, arg) in params.iter().zip(app.args.iter()) {
                        let v = eval_inner(arg, b)?;
                        scope.set(param, v);
                    }
                    eval_inner(&inst, &scope)
                }
                OpaqueBinding::Native { arity, f } => {
                    if app.orders.iter().any(|&k| k > 0) {
                        return Err(EvalError::DerivativeOfNative(app.name.clone()));
                    }
                    if arity != app.args.len() {
                        return Err(EvalError::ArityMismatch {
                            name: app.name.clone(),
                            expected: arity,
                            got: app.args.len(),
                        });
                    }
                    let mut argv = Vec::with_capacity(app.args.len());
                    for a in &app.args {
                        argv.push(eval_inner(a, b)?);
                    }
                    f(&argv)
                }
            }
        }
    }
}

fn power(base: f64, exp: f64) -> Result<f64, EvalError> {
    if exp < 0.0 && base.abs() < 1e-300 {
        return Err(EvalError::DivisionByNearZero);
    }
    if base < 0.0 {
        // Negative bases only with (numerically) integer exponents.
        let rounded = libm::round(exp);
        if (exp - rounded).abs() > 1e-9 {
            return Err(EvalError::Domain("fractional power of a negative base"));
        }
        return Ok(libm::pow(base, rounded));
    }
    Ok(libm::pow(base, exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn basic_evaluation() {
        let b = Bindings::new().with("x", 3.0);
        assert_eq!(n("x^2").eval(&b).unwrap(), 9.0);
    }

    #[test]
    fn instantiated_opaque() {
        let mut b = Bindings::new().with("x", 2.0).with("y", 4.0);
        b.define("f", &["s"], n("s^2"));
        assert_eq!(n("f(y/x)").eval(&b).unwrap(), 4.0);
    }

    #[test]
    fn opaque_derivative_orders_evaluate() {
        // f := s -> s^3, so f''(2) = 12.
        let mut b = Bindings::new().with("x", 2.0);
        b.define("f", &["s"], n("s^3"));
        let e = n("f(x)").diff("x").diff("x");
        assert!((e.eval(&b).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let b = Bindings::new().with("x", 0.0);
        assert_eq!(
            n("1/x").eval(&b).unwrap_err(),
            EvalError::DivisionByNearZero
        );
        let b = Bindings::new().with("x", -1.0);
        assert!(matches!(
            n("ln(x)").eval(&b).unwrap_err(),
            EvalError::Domain(_)
        ));
        let b = Bindings::new();
        assert!(matches!(
            n("x").eval(&b).unwrap_err(),
            EvalError::UnboundSymbol(_)
        ));
    }
}
