//! Exact partial differentiation.
//!
//! Opaque applications differentiate by the chain rule, incrementing
//! the derivative multi-index of the application; everything else is
//! the standard calculus on the expression tree. Results are raw trees
//! (callers normalize).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::{Builtin, Expr, OpaqueApp};

pub fn d(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Rational(_) => Expr::int(0),
        Expr::Symbol(s) => {
            if s == var {
                Expr::int(1)
            } else {
                Expr::int(0)
            }
        }
        Expr::Neg(a) => Expr::Neg(Box::new(d(a, var))),
        Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| d(t, var)).collect()),
        Expr::Product(fs) => {
            let mut terms = Vec::new();
            for (i, fi) in fs.iter().enumerate() {
                let dfi = d(fi, var);
                if dfi.is_zero_literal() {
                    continue;
                }
                let mut factors = vec![dfi];
                for (j, fj) in fs.iter().enumerate() {
                    if i != j {
                        factors.push(fj.clone());
                    }
                }
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        Expr::Power(b, x) => {
            let db = d(b, var);
            let dx = d(x, var);
            let mut terms = Vec::new();
            if !db.is_zero_literal() {
                // e·b^(e-1)·b'
                let em1 = Expr::Sum(vec![(**x).clone(), Expr::int(-1)]);
                terms.push(Expr::product(vec![
                    (**x).clone(),
                    Expr::pow((**b).clone(), em1),
                    db,
                ]));
            }
            if !dx.is_zero_literal() {
                // b^e·ln(b)·e'
                terms.push(Expr::product(vec![
                    Expr::pow((**b).clone(), (**x).clone()),
                    Expr::ln((**b).clone()),
                    dx,
                ]));
            }
            Expr::sum(terms)
        }
        Expr::Builtin(f, a) => {
            let da = d(a, var);
            if da.is_zero_literal() {
                return Expr::int(0);
            }
            let arg = (**a).clone();
            let outer = match f {
                Builtin::Sin => Expr::builtin(Builtin::Cos, arg),
                Builtin::Cos => Expr::Neg(Box::new(Expr::builtin(Builtin::Sin, arg))),
                Builtin::Tan => {
                    // 1 + tan^2
                    Expr::Sum(vec![
                        Expr::int(1),
                        Expr::pow_i(Expr::builtin(Builtin::Tan, arg), 2),
                    ])
                }
                Builtin::Exp => Expr::builtin(Builtin::Exp, arg),
                Builtin::Ln => Expr::pow_i(arg, -1),
                Builtin::Sqrt => {
                    // (1/2)·arg^(-1/2)
                    Expr::product(vec![
                        Expr::rational(1, 2),
                        Expr::pow(arg, Expr::rational(-1, 2)),
                    ])
                }
                Builtin::Sinh => Expr::builtin(Builtin::Cosh, arg),
                Builtin::Cosh => Expr::builtin(Builtin::Sinh, arg),
                Builtin::Arctan => {
                    // 1/(1 + arg^2)
                    Expr::pow_i(Expr::Sum(vec![Expr::int(1), Expr::pow_i(arg, 2)]), -1)
                }
            };
            Expr::product(vec![outer, da])
        }
        Expr::Opaque(app) => {
            let mut terms = Vec::new();
            for (j, arg) in app.args.iter().enumerate() {
                let darg = d(arg, var);
                if darg.is_zero_literal() {
                    continue;
                }
                let mut orders = app.orders.clone();
                orders[j] += 1;
                terms.push(Expr::product(vec![
                    Expr::Opaque(OpaqueApp {
                        name: app.name.clone(),
                        args: app.args.clone(),
                        orders,
                    }),
                    darg,
                ]));
            }
            Expr::sum(terms)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::Expr;

    fn n(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn polynomial_rules() {
        assert_eq!(n("x^2").diff("x"), n("2*x"));
        assert_eq!(n("x*y").diff("x"), n("y"));
        assert_eq!(n("1/x").diff("x"), n("-(x^(-2))"));
        assert_eq!(n("7").diff("x"), Expr::int(0));
    }

    #[test]
    fn chain_rule_through_opaque() {
        // d/dx f(y - b x) = -b f'(y - b x)
        let e = n("f(y - b*x)").diff("x");
        let expected =
            (-(Expr::sym("b"))) * Expr::parse("f(y - b*x)").unwrap().diff_opaque_once();
        assert!((e - expected).is_zero_symbolic());
    }

    #[test]
    fn exponential_and_symbolic_exponent() {
        assert!((n("exp(2*m*t)").diff("t") - n("2*m*exp(2*m*t)")).is_zero_symbolic());
        // d/da a^c = c a^(c-1) for a constant exponent symbol
        assert!((n("a^c").diff("a") - n("c*a^(c - 1)")).is_zero_symbolic());
        // exponent depending on the variable brings in ln
        let e = n("a^x").diff("x");
        assert!((e - n("a^x*ln(a)")).is_zero_symbolic());
    }

    #[test]
    fn builtins() {
        assert!((n("sin(x^2)").diff("x") - n("2*x*cos(x^2)")).is_zero_symbolic());
        assert!((n("ln(x)").diff("x") - n("1/x")).is_zero_symbolic());
        assert!((n("arctan(x)").diff("x") - n("1/(1 + x^2)")).is_zero_symbolic());
        assert!((n("sqrt(x)").diff("x") - n("(1/2)*x^(-1/2)")).is_zero_symbolic());
    }
}

#[cfg(test)]
impl Expr {
    /// Test helper: the same application with its (single) derivative
    /// order incremented.
    fn diff_opaque_once(&self) -> Expr {
        match self {
            Expr::Opaque(app) => {
                let mut orders = app.orders.clone();
                orders[0] += 1;
                Expr::Opaque(super::OpaqueApp {
                    name: app.name.clone(),
                    args: app.args.clone(),
                    orders,
                })
            }
            _ => panic!("not an opaque application"),
        }
    }
}
