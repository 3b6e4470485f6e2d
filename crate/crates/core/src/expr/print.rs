//! Precedence-aware printing. `parse(print(e))` reconstructs
//! `normalize(e)` for every expression the grammar can denote;
//! derivative-marked opaque applications print in prime notation
//! (`f'(u)`), which is display-only and deliberately outside the
//! grammar.

use core::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Expr, Rational};

const PREC_SUM: u8 = 0;
const PREC_PRODUCT: u8 = 1;
const PREC_POWER: u8 = 2;
const PREC_ATOM: u8 = 3;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, PREC_SUM, f)
    }
}

fn fmt_prec(e: &Expr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Rational(r) => fmt_rational(r, prec, f),
        Expr::Symbol(s) => f.write_str(s),
        Expr::Builtin(b, a) => {
            write!(f, "{}(", b.name())?;
            fmt_prec(a, PREC_SUM, f)?;
            f.write_char(')')
        }
        Expr::Opaque(app) => {
            f.write_str(&app.name)?;
            let total: u32 = app.orders.iter().sum();
            if total > 0 {
                if app.args.len() == 1 && app.orders[0] <= 3 {
                    for _ in 0..app.orders[0] {
                        f.write_char('\'')?;
                    }
                } else {
                    f.write_str("^(")?;
                    for (i, k) in app.orders.iter().enumerate() {
                        if i > 0 {
                            f.write_char(',')?;
                        }
                        write!(f, "{k}")?;
                    }
                    f.write_char(')')?;
                }
            }
            f.write_char('(')?;
            for (i, a) in app.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                fmt_prec(a, PREC_SUM, f)?;
            }
            f.write_char(')')
        }
        Expr::Sum(ts) => {
            let parens = prec > PREC_SUM;
            if parens {
                f.write_char('(')?;
            }
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    fmt_prec(t, PREC_PRODUCT, f)?;
                } else if let Some(pos) = negated(t) {
                    f.write_str(" - ")?;
                    fmt_prec(&pos, PREC_PRODUCT, f)?;
                } else {
                    f.write_str(" + ")?;
                    fmt_prec(t, PREC_PRODUCT, f)?;
                }
            }
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
        Expr::Product(fs) => {
            let parens = prec > PREC_PRODUCT;
            if parens {
                f.write_char('(')?;
            }
            // A leading -1 coefficient prints as a sign.
            let mut rest: &[Expr] = fs;
            if let Some(Expr::Rational(r)) = fs.first() {
                if *r == -Rational::one() && fs.len() > 1 {
                    f.write_char('-')?;
                    rest = &fs[1..];
                }
            }
            for (i, x) in rest.iter().enumerate() {
                if i > 0 {
                    f.write_char('*')?;
                }
                fmt_prec(x, PREC_POWER, f)?;
            }
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
        Expr::Power(b, x) => {
            let parens = prec > PREC_POWER;
            if parens {
                f.write_char('(')?;
            }
            fmt_prec(b, PREC_ATOM, f)?;
            f.write_char('^')?;
            // Exponents always print parenthesized unless they are
            // bare nonnegative integers or symbols, keeping the output
            // unambiguous under the right-associative '^'.
            match &**x {
                Expr::Rational(r) if r.is_integer() && !r.is_negative() => {
                    fmt_prec(x, PREC_ATOM, f)?;
                }
                Expr::Symbol(_) => fmt_prec(x, PREC_ATOM, f)?,
                _ => {
                    f.write_char('(')?;
                    fmt_prec(x, PREC_SUM, f)?;
                    f.write_char(')')?;
                }
            }
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
        Expr::Neg(a) => {
            let parens = prec > PREC_PRODUCT;
            if parens {
                f.write_char('(')?;
            }
            f.write_char('-')?;
            fmt_prec(a, PREC_POWER, f)?;
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn fmt_rational(r: &Rational, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let needs_parens = if r.is_integer() {
        r.is_negative() && prec >= PREC_ATOM
    } else {
        prec >= PREC_POWER || (r.is_negative() && prec >= PREC_PRODUCT)
    };
    if needs_parens {
        f.write_char('(')?;
    }
    if r.is_integer() {
        write!(f, "{}", r.numer())?;
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())?;
    }
    if needs_parens {
        f.write_char(')')?;
    }
    Ok(())
}

/// For display: if `t` is a negated term, its positive counterpart.
fn negated(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Rational(r) if r.is_negative() => Some(Expr::Rational(-r.clone())),
        Expr::Neg(a) => Some((**a).clone()),
        Expr::Product(fs) => {
            let Some(Expr::Rational(r)) = fs.first() else {
                return None;
            };
            if !r.is_negative() {
                return None;
            }
            let mut out = alloc::vec::Vec::with_capacity(fs.len());
            let flipped = -r.clone();
            if !(flipped.is_one() && fs.len() > 1) {
                out.push(Expr::Rational(flipped));
            }
            out.extend(fs.iter().skip(1).cloned());
            Some(Expr::product(out))
        }
        _ => None,
    }
}
