//! Symbolic expression kernel.
//!
//! [`Expr`] is an immutable tree over exact rationals, symbols, a fixed
//! set of builtin functions, and *opaque* function applications
//! (`f(u, v)` with an attached partial-derivative multi-index, so that
//! `f` can stay arbitrary through differentiation and be instantiated
//! later). Canonical form is a multivariate polynomial over "kernel"
//! factors with rational coefficients: see [`normalize`].
//!
//! No trigonometric or logarithmic identities are applied anywhere;
//! zero equivalence beyond the polynomial algebra is delegated to the
//! sampling oracle in [`zero`].

mod diff;
mod eval;
mod normalize;
mod parse;
mod print;
mod zero;

pub use eval::{Bindings, EvalError, OpaqueBinding};
pub use normalize::NormalizeError;
pub use parse::ParseError;
pub use zero::{SampleDomain, SplitMix64, Witness, ZeroOptions, ZeroVerdict};

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational scalar used throughout the kernel.
pub type Rational = BigRational;

/// Builtin scalar functions. `sqrt` is accepted by the parser but is
/// rewritten to a rational power during normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Arctan,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Tan => "tan",
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::Sqrt => "sqrt",
            Builtin::Sinh => "sinh",
            Builtin::Cosh => "cosh",
            Builtin::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "sin" => Some(Builtin::Sin),
            "cos" => Some(Builtin::Cos),
            "tan" => Some(Builtin::Tan),
            "exp" => Some(Builtin::Exp),
            "ln" => Some(Builtin::Ln),
            "sqrt" => Some(Builtin::Sqrt),
            "sinh" => Some(Builtin::Sinh),
            "cosh" => Some(Builtin::Cosh),
            "arctan" => Some(Builtin::Arctan),
            _ => None,
        }
    }
}

/// An application of an opaque (user-declared) function.
///
/// `orders[j]` counts how often the application has been partially
/// differentiated with respect to its `j`-th argument slot; the
/// multi-index always has the same length as `args`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpaqueApp {
    pub name: String,
    pub args: Vec<Expr>,
    pub orders: Vec<u32>,
}

/// Immutable symbolic expression tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Rational(Rational),
    Symbol(String),
    Builtin(Builtin, Box<Expr>),
    Opaque(OpaqueApp),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Rational(Rational::from_integer(BigInt::from(n)))
    }

    /// Exact rational `p/q`. Panics on `q == 0`.
    pub fn rational(p: i64, q: i64) -> Expr {
        assert!(q != 0, "rational with zero denominator");
        Expr::Rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Symbol(name.to_string())
    }

    pub fn builtin(f: Builtin, arg: Expr) -> Expr {
        Expr::Builtin(f, Box::new(arg))
    }

    /// Opaque application with a fresh (all-zero) derivative multi-index.
    pub fn opaque(name: &str, args: Vec<Expr>) -> Expr {
        let orders = vec![0; args.len()];
        Expr::Opaque(OpaqueApp {
            name: name.to_string(),
            args,
            orders,
        })
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        Expr::Power(Box::new(base), Box::new(exponent))
    }

    pub fn pow_i(base: Expr, exponent: i64) -> Expr {
        Expr::pow(base, Expr::int(exponent))
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::builtin(Builtin::Sqrt, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::builtin(Builtin::Exp, arg)
    }

    pub fn ln(arg: Expr) -> Expr {
        Expr::builtin(Builtin::Ln, arg)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::int(0),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::int(1),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Product(factors),
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_one())
    }

    /// The exact rational value, if this node is a rational constant.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expr::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// The exact integer value, if this node is an integer constant
    /// that fits in `i64`.
    pub fn as_integer(&self) -> Option<i64> {
        let r = self.as_rational()?;
        if !r.is_integer() {
            return None;
        }
        let n = r.numer();
        let (sign, digits) = n.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => {
                let mag = digits[0];
                match sign {
                    num_bigint::Sign::Minus => {
                        if mag <= i64::MAX as u64 + 1 {
                            Some((mag as i128 * -1) as i64)
                        } else {
                            None
                        }
                    }
                    _ => {
                        if mag <= i64::MAX as u64 {
                            Some(mag as i64)
                        } else {
                            None
                        }
                    }
                }
            }
            _ => None,
        }
    }

    /// All free symbol names, in sorted order.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Symbol(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Names of all opaque functions applied anywhere in the tree.
    pub fn opaque_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Opaque(app) = e {
                out.insert(app.name.clone());
            }
        });
        out
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if let Expr::Symbol(s) = e {
                if s == name {
                    found = true;
                }
            }
        });
        found
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Rational(_) | Expr::Symbol(_) => {}
            Expr::Builtin(_, a) => a.walk(f),
            Expr::Opaque(app) => {
                for a in &app.args {
                    a.walk(f);
                }
            }
            Expr::Sum(ts) => {
                for t in ts {
                    t.walk(f);
                }
            }
            Expr::Product(fs) => {
                for x in fs {
                    x.walk(f);
                }
            }
            Expr::Power(b, e) => {
                b.walk(f);
                e.walk(f);
            }
            Expr::Neg(a) => a.walk(f),
        }
    }

    /// Structural map over children (bottom-up).
    fn map(&self, f: &impl Fn(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Rational(_) | Expr::Symbol(_) => self.clone(),
            Expr::Builtin(b, a) => Expr::Builtin(*b, Box::new(a.map(f))),
            Expr::Opaque(app) => Expr::Opaque(OpaqueApp {
                name: app.name.clone(),
                args: app.args.iter().map(|a| a.map(f)).collect(),
                orders: app.orders.clone(),
            }),
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| t.map(f)).collect()),
            Expr::Product(fs) => Expr::Product(fs.iter().map(|x| x.map(f)).collect()),
            Expr::Power(b, e) => Expr::Power(Box::new(b.map(f)), Box::new(e.map(f))),
            Expr::Neg(a) => Expr::Neg(Box::new(a.map(f))),
        };
        f(rebuilt)
    }

    /// Replaces every occurrence of the symbol `name` by `value`.
    /// The result is not normalized.
    pub fn subst_symbol(&self, name: &str, value: &Expr) -> Expr {
        self.map(&|e| match &e {
            Expr::Symbol(s) if s == name => value.clone(),
            _ => e,
        })
    }

    /// Applies several symbol substitutions simultaneously.
    pub fn subst_symbols(&self, map: &BTreeMap<String, Expr>) -> Expr {
        self.map(&|e| match &e {
            Expr::Symbol(s) => map.get(s).cloned().unwrap_or(e),
            _ => e,
        })
    }

    /// Replaces applications of the opaque function `name` by the
    /// instantiation `body`, written in terms of the formal parameters
    /// `params`. Derivative multi-indices are honoured: an application
    /// carrying orders `(k1, .., kn)` is replaced by
    /// `∂^k1..∂^kn body` (differentiated with respect to the formals)
    /// with the actual arguments substituted afterwards.
    pub fn instantiate(&self, name: &str, params: &[&str], body: &Expr) -> Expr {
        self.map(&|e| match &e {
            Expr::Opaque(app) if app.name == name => {
                if app.args.len() != params.len() {
                    return e; // arity mismatch: leave untouched, eval will report
                }
                let mut inst = body.clone();
                for (param, order) in params.iter().zip(app.orders.iter()) {
                    for _ in 0..*order {
                        inst = inst.d(param);
                    }
                }
                // Two-phase substitution through placeholders so that a
                // formal parameter appearing in an actual argument is
                // not rewritten twice.
                let mut placeholders = BTreeMap::new();
                for (j, param) in params.iter().enumerate() {
                    let ph = alloc::format!("__inst_{j}");
                    placeholders.insert((*param).to_string(), Expr::sym(&ph));
                }
                inst = inst.subst_symbols(&placeholders);
                for (j, arg) in app.args.iter().enumerate() {
                    let ph = alloc::format!("__inst_{j}");
                    inst = inst.subst_symbol(&ph, arg);
                }
                inst
            }
            _ => e,
        })
    }

    /// Canonical form; see the module docs of [`normalize`].
    pub fn normalize(&self) -> Result<Expr, NormalizeError> {
        normalize::normalize(self)
    }

    /// Multiplies through by every syntactic denominator (kernel bases
    /// raised to negative integer powers) and re-normalizes. Sound for
    /// identity checking: the cleared form is the zero polynomial iff
    /// the original expression is identically zero as a rational
    /// expression in its kernels.
    pub fn clear_denominators(&self) -> Result<Expr, NormalizeError> {
        normalize::clear_denominators(self)
    }

    /// Value-preserving variant of [`Expr::clear_denominators`]: the
    /// expression is rewritten as `numerator · denominator⁻¹` with the
    /// numerator fully collected. Keeps rational-function arithmetic
    /// (curvature pipelines in particular) compact.
    pub fn rational_compact(&self) -> Result<Expr, NormalizeError> {
        normalize::rational_compact(self)
    }

    /// True when the expression normalizes to the zero polynomial,
    /// trying denominator clearing as a second stage.
    pub fn is_zero_symbolic(&self) -> bool {
        match self.normalize() {
            Ok(n) => {
                if n.is_zero_literal() {
                    return true;
                }
                matches!(normalize::clear_denominators(&n), Ok(c) if c.is_zero_literal())
            }
            Err(_) => false,
        }
    }

    /// Exact partial derivative with respect to `var`. Total on any
    /// input; the result is normalized whenever normalization succeeds
    /// (it can only fail on inputs carrying a syntactic division by
    /// zero, which are returned unnormalized).
    pub fn diff(&self, var: &str) -> Expr {
        let raw = self.d(var);
        raw.normalize().unwrap_or(raw)
    }

    /// Raw (unnormalized) partial derivative.
    pub(crate) fn d(&self, var: &str) -> Expr {
        diff::d(self, var)
    }

    /// Numeric evaluation under the given bindings.
    pub fn eval(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        eval::eval(self, bindings)
    }

    /// Probabilistic zero test; see [`zero::is_zero`].
    pub fn is_zero(&self, domain: &SampleDomain, options: &ZeroOptions) -> ZeroVerdict {
        zero::is_zero(self, domain, options)
    }

    /// Parses an expression string (see the grammar in [`parse`]) and
    /// normalizes the result.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, Expr::pow_i(rhs, -1)])
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}
