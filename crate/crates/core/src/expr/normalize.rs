//! Canonical form: a multivariate polynomial, with rational
//! coefficients, over *kernel* factors (symbols, builtin applications,
//! opaque applications, and non-expandable powers).
//!
//! The normal form flattens sums and products, folds rational
//! constants, expands products over sums and small positive integer
//! powers of sums, merges powers of structurally equal bases, and
//! collects like terms. Exponentials are treated multiplicatively
//! (`exp(u)·exp(v) → exp(u+v)`, `exp(u)^k → exp(k·u)`), which is exact
//! on the reals and is what makes combined first integrals close
//! symbolically. No other function identities are applied: in
//! particular `sin(x)^2 + cos(x)^2` does not simplify.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Builtin, Expr, OpaqueApp, Rational};

/// Largest positive integer exponent for which a power of a sum is
/// expanded. Larger powers stay as atomic factors.
const EXPAND_POW_LIMIT: i64 = 16;

/// Cap on the total clearing exponent budget in
/// [`clear_denominators`]; beyond it the expression is returned as-is.
const CLEAR_BUDGET: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeError {
    /// A syntactic zero was raised to a negative power (this is the
    /// form division takes after parsing).
    DivisionByZero,
}

impl core::fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormalizeError::DivisionByZero => write!(f, "division by syntactic zero"),
        }
    }
}

type NResult<T> = Result<T, NormalizeError>;

/// A product of kernel powers, sorted by (base, exponent); the rational
/// coefficient lives outside in the [`Poly`] map.
type Monomial = Vec<(Expr, Expr)>;

#[derive(Clone, Debug, Default)]
struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    fn zero() -> Poly {
        Poly::default()
    }

    fn constant(r: Rational) -> Poly {
        let mut p = Poly::zero();
        if !r.is_zero() {
            p.terms.insert(Vec::new(), r);
        }
        p
    }

    fn single(coeff: Rational, monomial: Monomial) -> Poly {
        let mut p = Poly::zero();
        if !coeff.is_zero() {
            p.terms.insert(monomial, coeff);
        }
        p
    }

    fn kernel(base: Expr) -> Poly {
        Poly::single(Rational::one(), vec![(base, Expr::int(1))])
    }

    fn add_term(&mut self, monomial: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(monomial);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
        self
    }

    fn scale(mut self, r: &Rational) -> Poly {
        if r.is_zero() {
            return Poly::zero();
        }
        for c in self.terms.values_mut() {
            *c *= r.clone();
        }
        self
    }

    fn mul(&self, other: &Poly) -> NResult<Poly> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut coeff = c1.clone() * c2.clone();
                let monomial = mul_monomials(m1, m2, &mut coeff)?;
                out.add_term(monomial, coeff);
            }
        }
        Ok(out)
    }

    fn pow_uint(&self, n: u64) -> NResult<Poly> {
        let mut result = Poly::constant(Rational::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn into_expr(self) -> Expr {
        let mut terms: Vec<Expr> = Vec::with_capacity(self.terms.len());
        for (monomial, coeff) in self.terms {
            terms.push(term_expr(coeff, monomial));
        }
        Expr::sum(terms)
    }
}

fn term_expr(coeff: Rational, monomial: Monomial) -> Expr {
    let mut factors: Vec<Expr> = Vec::with_capacity(monomial.len() + 1);
    if !coeff.is_one() || monomial.is_empty() {
        factors.push(Expr::Rational(coeff));
    }
    for (base, exp) in monomial {
        if exp.is_one_literal() {
            factors.push(base);
        } else {
            factors.push(Expr::Power(Box::new(base), Box::new(exp)));
        }
    }
    Expr::product(factors)
}

/// Merges two sorted factor lists, adding exponents of equal bases and
/// coalescing exponential kernels.
fn mul_monomials(m1: &Monomial, m2: &Monomial, coeff: &mut Rational) -> NResult<Monomial> {
    let mut by_base: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut exp_arg_terms: Vec<Expr> = Vec::new();
    for (base, exp) in m1.iter().chain(m2.iter()) {
        if let Expr::Builtin(Builtin::Exp, arg) = base {
            exp_arg_terms.push(Expr::Product(vec![exp.clone(), (**arg).clone()]));
        } else {
            by_base.entry(base.clone()).or_default().push(exp.clone());
        }
    }
    let mut out: Monomial = Vec::new();
    for (base, exps) in by_base {
        let exp = if exps.len() == 1 {
            exps.into_iter().next().unwrap()
        } else {
            normalize(&Expr::Sum(exps))?
        };
        push_factor(&mut out, base, exp, coeff)?;
    }
    if !exp_arg_terms.is_empty() {
        let arg = normalize(&Expr::Sum(exp_arg_terms))?;
        if !arg.is_zero_literal() {
            push_factor(
                &mut out,
                Expr::Builtin(Builtin::Exp, Box::new(arg)),
                Expr::int(1),
                coeff,
            )?;
        }
    }
    out.sort();
    Ok(out)
}

/// Appends `base^exp` to a factor list, folding rational bases into the
/// coefficient where exact.
fn push_factor(out: &mut Monomial, base: Expr, exp: Expr, coeff: &mut Rational) -> NResult<()> {
    if exp.is_zero_literal() {
        return Ok(());
    }
    if let Expr::Rational(r) = &base {
        if let Some(e) = exp.as_rational() {
            if r.is_zero() {
                // 0^positive kills the term; 0^nonpositive is an error.
                if e.is_positive() {
                    *coeff = Rational::zero();
                    return Ok(());
                }
                return Err(NormalizeError::DivisionByZero);
            }
            // Split the exponent into integer and fractional-in-[0,1)
            // parts: r^(d + m/q) = r^d · r^(m/q), the first exact.
            let d = e.floor();
            let frac = e.clone() - d.clone();
            if let Some(di) = rational_to_i64(&d) {
                *coeff *= rational_pow(r, di)?;
                if frac.is_zero() {
                    return Ok(());
                }
                // Try an exact q-th root for the fractional part.
                if let Some(rooted) = exact_rational_root(r, &frac) {
                    *coeff *= rooted;
                    return Ok(());
                }
                out.push((base, Expr::Rational(frac)));
                return Ok(());
            }
        }
    }
    out.push((base, exp));
    Ok(())
}

fn rational_to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

fn rational_pow(r: &Rational, n: i64) -> NResult<Rational> {
    if n == 0 {
        return Ok(Rational::one());
    }
    if r.is_zero() && n < 0 {
        return Err(NormalizeError::DivisionByZero);
    }
    let mag = r.pow(n.unsigned_abs().min(i32::MAX as u64) as i32);
    Ok(if n < 0 { mag.recip() } else { mag })
}

/// `r^(m/q)` when it is exactly rational (`0 < m/q < 1`), else `None`.
fn exact_rational_root(r: &Rational, frac: &Rational) -> Option<Rational> {
    let q = frac.denom().to_u32()?;
    let m = frac.numer().to_i64()?;
    if r.is_negative() && q % 2 == 0 {
        return None;
    }
    let num_root = exact_int_root(r.numer(), q)?;
    let den_root = exact_int_root(r.denom(), q)?;
    let root = Rational::new(num_root, den_root);
    rational_pow(&root, m).ok()
}

/// Exact integer k-th root, honoring sign for odd k.
fn exact_int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return exact_int_root(&-n, k).map(|r| -r);
    }
    if n.is_zero() || n.is_one() {
        return Some(n.clone());
    }
    let approx = n.to_f64()?;
    let guess = libm::pow(approx, 1.0 / k as f64);
    let base = guess as i64;
    for cand in base.saturating_sub(2)..=base.saturating_add(2) {
        if cand < 0 {
            continue;
        }
        let c = BigInt::from(cand);
        if num_traits::pow::pow(c.clone(), k as usize) == *n {
            return Some(c);
        }
    }
    None
}

pub fn normalize(e: &Expr) -> NResult<Expr> {
    Ok(norm_poly(e)?.into_expr())
}

fn norm_poly(e: &Expr) -> NResult<Poly> {
    match e {
        Expr::Rational(r) => Ok(Poly::constant(r.clone())),
        Expr::Symbol(_) => Ok(Poly::kernel(e.clone())),
        Expr::Neg(a) => Ok(norm_poly(a)?.scale(&-Rational::one())),
        Expr::Sum(ts) => {
            let mut acc = Poly::zero();
            for t in ts {
                acc = acc.add(norm_poly(t)?);
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            let mut acc = Poly::constant(Rational::one());
            for f in fs {
                let p = norm_poly(f)?;
                if p.is_zero() {
                    // Division by zero in a sibling factor must still
                    // surface, so scan the rest before returning.
                    for rest in fs {
                        norm_poly(rest)?;
                    }
                    return Ok(Poly::zero());
                }
                acc = acc.mul(&p)?;
            }
            Ok(acc)
        }
        Expr::Power(b, x) => {
            let base = norm_poly(b)?.into_expr();
            let exp = norm_poly(x)?.into_expr();
            pow_expr(base, exp)
        }
        Expr::Builtin(f, a) => {
            let arg = norm_poly(a)?.into_expr();
            match f {
                Builtin::Sqrt => pow_expr(arg, Expr::rational(1, 2)),
                Builtin::Exp => {
                    if arg.is_zero_literal() {
                        Ok(Poly::constant(Rational::one()))
                    } else {
                        Ok(Poly::kernel(Expr::Builtin(Builtin::Exp, Box::new(arg))))
                    }
                }
                Builtin::Ln => {
                    if arg.is_one_literal() {
                        Ok(Poly::zero())
                    } else {
                        Ok(Poly::kernel(Expr::Builtin(Builtin::Ln, Box::new(arg))))
                    }
                }
                Builtin::Sin | Builtin::Tan | Builtin::Sinh | Builtin::Arctan => {
                    if arg.is_zero_literal() {
                        Ok(Poly::zero())
                    } else {
                        Ok(Poly::kernel(Expr::Builtin(*f, Box::new(arg))))
                    }
                }
                Builtin::Cos | Builtin::Cosh => {
                    if arg.is_zero_literal() {
                        Ok(Poly::constant(Rational::one()))
                    } else {
                        Ok(Poly::kernel(Expr::Builtin(*f, Box::new(arg))))
                    }
                }
            }
        }
        Expr::Opaque(app) => {
            let args = app
                .args
                .iter()
                .map(|a| Ok(norm_poly(a)?.into_expr()))
                .collect::<NResult<Vec<_>>>()?;
            Ok(Poly::kernel(Expr::Opaque(OpaqueApp {
                name: app.name.clone(),
                args,
                orders: app.orders.clone(),
            })))
        }
    }
}

/// Power of canonical `base` to canonical `exp`, as a polynomial.
fn pow_expr(base: Expr, exp: Expr) -> NResult<Poly> {
    if exp.is_zero_literal() {
        // Includes 0^0 = 1 by convention.
        return Ok(Poly::constant(Rational::one()));
    }
    if exp.is_one_literal() {
        return poly_of_canonical(base);
    }
    // exp kernels absorb any exponent into their argument.
    if let Expr::Builtin(Builtin::Exp, arg) = &base {
        let scaled = normalize(&Expr::Product(vec![exp, (**arg).clone()]))?;
        if scaled.is_zero_literal() {
            return Ok(Poly::constant(Rational::one()));
        }
        return Ok(Poly::kernel(Expr::Builtin(Builtin::Exp, Box::new(scaled))));
    }
    if let Expr::Rational(r) = &base {
        if r.is_zero() {
            if let Some(e) = exp.as_rational() {
                if e.is_positive() {
                    return Ok(Poly::zero());
                }
                return Err(NormalizeError::DivisionByZero);
            }
            // 0^symbolic: keep (never produced by the front ends).
            return Ok(Poly::single(
                Rational::one(),
                vec![(base, exp)],
            ));
        }
        let mut coeff = Rational::one();
        let mut factors = Vec::new();
        push_factor(&mut factors, base, exp, &mut coeff)?;
        factors.sort();
        return Ok(Poly::single(coeff, factors));
    }
    let int_exp = exp.as_rational().and_then(rational_to_i64);
    match (&base, int_exp) {
        // (b^e2)^n with integer n collapses; non-integer outer
        // exponents must not ((x^2)^(1/2) is |x|, not x).
        (Expr::Power(b2, e2), Some(_)) => {
            let inner = normalize(&Expr::Product(vec![(**e2).clone(), exp.clone()]))?;
            pow_expr((**b2).clone(), inner)
        }
        // Integer powers distribute over products.
        (Expr::Product(fs), Some(n)) => {
            let mut acc = Poly::constant(Rational::one());
            for f in fs {
                acc = acc.mul(&pow_expr(f.clone(), Expr::int(n))?)?;
            }
            Ok(acc)
        }
        // Small positive integer powers of sums expand.
        (Expr::Sum(_), Some(n)) if n > 1 && n <= EXPAND_POW_LIMIT => {
            let p = poly_of_canonical(base)?;
            p.pow_uint(n as u64)
        }
        _ => {
            // Atomic power; extract content from sum bases so that
            // proportional denominators share one canonical base.
            let (content, monomial_content, reduced) = extract_content(base, &exp)?;
            let mut coeff = Rational::one();
            let mut factors = Vec::new();
            if !content.is_one() {
                push_factor(
                    &mut factors,
                    Expr::Rational(content),
                    exp.clone(),
                    &mut coeff,
                )?;
            }
            for (b, m) in monomial_content {
                let scaled = normalize(&Expr::Product(vec![Expr::int(m), exp.clone()]))?;
                push_factor(&mut factors, b, scaled, &mut coeff)?;
            }
            push_factor(&mut factors, reduced, exp, &mut coeff)?;
            factors.sort();
            Ok(Poly::single(coeff, factors))
        }
    }
}

/// Decomposes an already canonical expression into a polynomial without
/// re-normalizing subtrees.
fn poly_of_canonical(e: Expr) -> NResult<Poly> {
    match e {
        Expr::Rational(r) => Ok(Poly::constant(r)),
        Expr::Sum(ts) => {
            let mut acc = Poly::zero();
            for t in ts {
                acc = acc.add(poly_of_canonical(t)?);
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            let mut coeff = Rational::one();
            let mut monomial: Monomial = Vec::new();
            for f in fs {
                match f {
                    Expr::Rational(r) => coeff *= r,
                    Expr::Power(b, e) => push_factor(&mut monomial, *b, *e, &mut coeff)?,
                    other => push_factor(&mut monomial, other, Expr::int(1), &mut coeff)?,
                }
            }
            monomial.sort();
            Ok(Poly::single(coeff, monomial))
        }
        Expr::Power(b, e) => pow_expr(*b, *e),
        other => Ok(Poly::kernel(other)),
    }
}

/// Pulls content out of a canonical sum used as a power base: the
/// rational gcd of the coefficients, and — for integer exponents, where
/// it is sign-safe — the sign of the leading term and the common
/// kernel-power monomial of all terms. `(2x + 2)^-1` becomes
/// `(1/2)(x + 1)^-1` and `(1 - 2m/R)^-1` becomes `R(R - 2m)^-1`, so
/// proportional bases cancel structurally and cleared numerators are
/// genuine polynomials in their kernels.
fn extract_content(base: Expr, exp: &Expr) -> NResult<(Rational, Vec<(Expr, i64)>, Expr)> {
    let Expr::Sum(_) = &base else {
        return Ok((Rational::one(), Vec::new(), base));
    };
    let poly = poly_of_canonical(base.clone())?;
    let integer_exp = exp.as_rational().map(|r| r.is_integer()).unwrap_or(false);

    let mut content: Option<Rational> = None;
    for c in poly.terms.values() {
        let c_abs = c.abs();
        content = Some(match content {
            None => c_abs,
            Some(acc) => rational_gcd(&acc, &c_abs),
        });
    }
    let mut content = content.unwrap_or_else(Rational::one);
    if content.is_zero() {
        content = Rational::one();
    }

    // Common kernel-power monomial: for each base present in every
    // term with an integer exponent, the minimum exponent (negative
    // allowed, which is what turns 1 - 2m/R into R^{-1}(R - 2m)).
    let mut monomial: Vec<(Expr, i64)> = Vec::new();
    if integer_exp {
        let mut common: Option<BTreeMap<Expr, i64>> = None;
        for m in poly.terms.keys() {
            let mut exps: BTreeMap<Expr, i64> = BTreeMap::new();
            let mut ok = true;
            for (b, e) in m {
                match e.as_rational().and_then(|r| rational_to_i64(r)) {
                    Some(k) => {
                        exps.insert(b.clone(), k);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                common = None;
                break;
            }
            common = Some(match common {
                None => exps,
                Some(acc) => {
                    let mut merged = BTreeMap::new();
                    for (b, k) in acc {
                        let other = exps.get(&b).copied().unwrap_or(0);
                        merged.insert(b, k.min(other));
                    }
                    for (b, k) in exps {
                        merged.entry(b).or_insert_with(|| k.min(0));
                    }
                    merged
                }
            });
        }
        if let Some(common) = common {
            for (b, k) in common {
                if k != 0 {
                    monomial.push((b, k));
                }
            }
        }
    }

    // Divide the sum through by the extracted content.
    let inv = content.recip();
    let mut reduced = Poly::zero();
    'term: for (m, c) in &poly.terms {
        let mut coeff = c.clone() * inv.clone();
        let mut factors: Monomial = Vec::new();
        let mut adjust: BTreeMap<&Expr, i64> = BTreeMap::new();
        for (b, k) in &monomial {
            adjust.insert(b, *k);
        }
        for (b, e) in m {
            let shift = adjust.remove(b).unwrap_or(0);
            if shift == 0 {
                push_factor(&mut factors, b.clone(), e.clone(), &mut coeff)?;
            } else {
                let new_exp = normalize(&Expr::Sum(vec![e.clone(), Expr::int(-shift)]))?;
                push_factor(&mut factors, b.clone(), new_exp, &mut coeff)?;
            }
        }
        for (b, shift) in adjust {
            push_factor(&mut factors, b.clone(), Expr::int(-shift), &mut coeff)?;
        }
        if coeff.is_zero() {
            continue 'term;
        }
        factors.sort();
        reduced.add_term(factors, coeff);
    }
    // Sign normalization (integer exponents only, where it is sound):
    // decided on the reduced base so renormalization is stable.
    if integer_exp {
        let negative_lead = reduced
            .terms
            .iter()
            .next()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if negative_lead {
            content = -content;
            reduced = reduced.scale(&-Rational::one());
        }
    }
    Ok((content, monomial, reduced.into_expr()))
}

fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    Rational::new(
        a.numer().gcd(b.numer()),
        a.denom().lcm(b.denom()),
    )
}

/// The positive power of each base needed to cancel every negative
/// integer exponent occurring in the polynomial.
fn clearing_map(poly: &Poly) -> BTreeMap<Expr, i64> {
    let mut clearing: BTreeMap<Expr, i64> = BTreeMap::new();
    for monomial in poly.terms.keys() {
        for (base, exp) in monomial {
            if let Some(k) = exp.as_rational().and_then(rational_to_i64) {
                if k < 0 {
                    let need = clearing.entry(base.clone()).or_insert(0);
                    *need = (*need).max(-k);
                }
            }
        }
    }
    clearing
}

fn cleared_poly(poly: &Poly, clearing: &BTreeMap<Expr, i64>) -> NResult<Poly> {
    let mut out = Poly::zero();
    for (monomial, coeff) in &poly.terms {
        let mut term = Poly::single(coeff.clone(), Vec::new());
        let mut seen: BTreeMap<&Expr, &Expr> = BTreeMap::new();
        for (base, exp) in monomial {
            seen.insert(base, exp);
        }
        // Existing factors, with clearing exponents added on top.
        for (base, exp) in monomial {
            let boost = clearing.get(base).copied().unwrap_or(0);
            let new_exp = if boost == 0 {
                exp.clone()
            } else {
                normalize(&Expr::Sum(vec![exp.clone(), Expr::int(boost)]))?
            };
            term = term.mul(&pow_expr(base.clone(), new_exp)?)?;
        }
        // Clearing bases absent from this term.
        for (base, boost) in clearing.iter() {
            if !seen.contains_key(base) {
                term = term.mul(&pow_expr(base.clone(), Expr::int(*boost))?)?;
            }
        }
        out = out.add(term);
    }
    Ok(out)
}

/// Multiplies every term by enough positive powers of each denominator
/// base to eliminate all negative integer exponents, then re-collects.
/// Identity-preserving for zero testing: the result is the zero
/// polynomial iff the input is identically zero as a rational
/// expression in its kernels.
pub fn clear_denominators(e: &Expr) -> NResult<Expr> {
    let n = normalize(e)?;
    let poly = poly_of_canonical(n.clone())?;
    let clearing = clearing_map(&poly);
    if clearing.is_empty() {
        return Ok(n);
    }
    let budget: i64 = clearing.values().sum();
    if budget > CLEAR_BUDGET {
        return Ok(n);
    }
    Ok(cleared_poly(&poly, &clearing)?.into_expr())
}

/// Collects a rational expression over the common denominator of its
/// terms and cancels whole powers of each denominator base out of the
/// numerator by exact polynomial division: the result is
/// `P · Πᵢ baseᵢ^(−kᵢ)` with `P` fully collected and not divisible by
/// any remaining base. Value-preserving (unlike
/// [`clear_denominators`]) and idempotent; keeps curvature-style
/// rational sums compact.
pub fn rational_compact(e: &Expr) -> NResult<Expr> {
    let n = normalize(e)?;
    let poly = poly_of_canonical(n.clone())?;
    if poly.terms.len() <= 1 {
        return Ok(n);
    }
    let clearing = clearing_map(&poly);
    if clearing.is_empty() {
        return Ok(n);
    }
    let budget: i64 = clearing.values().sum();
    if budget > CLEAR_BUDGET {
        return Ok(n);
    }
    let mut numerator = cleared_poly(&poly, &clearing)?;
    let mut remaining: Vec<(Expr, i64)> = clearing.into_iter().collect();
    for (base, k) in remaining.iter_mut() {
        if matches!(base, Expr::Sum(_)) {
            let den = poly_of_canonical(base.clone())?;
            while *k > 0 {
                match try_exact_division(&numerator, &den) {
                    Some(q) => {
                        numerator = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
    }
    let mut coeff = Rational::one();
    let mut denom_factors: Monomial = Vec::new();
    for (base, k) in remaining {
        if k > 0 {
            push_factor(&mut denom_factors, base, Expr::int(-k), &mut coeff)?;
        }
    }
    denom_factors.sort();
    let denominator = Poly::single(coeff, denom_factors);
    Ok(numerator.mul(&denominator)?.into_expr())
}

/// Exact multivariate polynomial division in the kernel-power algebra,
/// graded-lex order over the union of bases. `Some(q)` iff
/// `num == q·den` exactly; requires every exponent in both operands to
/// be a nonnegative integer.
fn try_exact_division(num: &Poly, den: &Poly) -> Option<Poly> {
    if den.terms.is_empty() {
        return None;
    }
    let mut vars: Vec<Expr> = Vec::new();
    for m in num.terms.keys().chain(den.terms.keys()) {
        for (b, e) in m {
            let k = e.as_rational().and_then(rational_to_i64)?;
            if k < 0 {
                return None;
            }
            if !vars.contains(b) {
                vars.push(b.clone());
            }
        }
    }
    vars.sort();
    let to_key = |m: &Monomial| -> Option<(i64, Vec<i64>)> {
        let mut v = alloc::vec![0i64; vars.len()];
        let mut total = 0;
        for (b, e) in m {
            let k = e.as_rational().and_then(rational_to_i64)?;
            let idx = vars.binary_search(b).ok()?;
            v[idx] = k;
            total += k;
        }
        Some((total, v))
    };

    type Graded = BTreeMap<(i64, Vec<i64>), Rational>;
    let mut r: Graded = BTreeMap::new();
    for (m, c) in &num.terms {
        r.insert(to_key(m)?, c.clone());
    }
    let mut d: Graded = BTreeMap::new();
    for (m, c) in &den.terms {
        d.insert(to_key(m)?, c.clone());
    }
    let (lt_d, lc_d) = {
        let (k, c) = d.iter().next_back()?;
        (k.clone(), c.clone())
    };

    let mut q: Graded = BTreeMap::new();
    while let Some((lt_r, lc_r)) = r.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
        // monomial divisibility
        let mut diff = alloc::vec![0i64; vars.len()];
        let mut ok = true;
        for i in 0..vars.len() {
            let dlt = lt_r.1[i] - lt_d.1[i];
            if dlt < 0 {
                ok = false;
                break;
            }
            diff[i] = dlt;
        }
        if !ok {
            return None;
        }
        let qc = lc_r / lc_d.clone();
        let qk = (lt_r.0 - lt_d.0, diff);
        // r -= q_term * den
        for (mk, mc) in &d {
            let prod_key = (
                qk.0 + mk.0,
                qk.1.iter().zip(&mk.1).map(|(a, b)| a + b).collect::<Vec<_>>(),
            );
            let delta = qc.clone() * mc.clone();
            match r.entry(prod_key) {
                alloc::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-delta);
                }
                alloc::collections::btree_map::Entry::Occupied(mut o) => {
                    let nv = o.get().clone() - delta;
                    if nv.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = nv;
                    }
                }
            }
        }
        q.insert(qk, qc);
    }

    // rebuild
    let mut out = Poly::zero();
    for ((_, v), c) in q {
        let mut factors: Monomial = Vec::new();
        for (i, k) in v.iter().enumerate() {
            if *k != 0 {
                factors.push((vars[i].clone(), Expr::int(*k)));
            }
        }
        factors.sort();
        out.add_term(factors, c);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use alloc::string::ToString;

    fn n(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn like_terms_collect() {
        assert_eq!(n("x + x"), n("2*x"));
        assert_eq!(n("x*y - y*x"), Expr::int(0));
        assert_eq!(n("3*(x + y) - 3*x"), n("3*y"));
    }

    #[test]
    fn syntactic_cancellation() {
        assert_eq!(n("(a*b)/(a*b)"), Expr::int(1));
        assert_eq!(n("x^2/x"), n("x"));
    }

    #[test]
    fn no_trig_identities() {
        let e = n("sin(x)^2 + cos(x)^2");
        assert!(matches!(e, Expr::Sum(_)));
        assert_eq!(e.clone().normalize().unwrap(), e);
    }

    #[test]
    fn idempotent() {
        for s in [
            "x^2 + 1/2",
            "(x + y)^3",
            "exp(2*t)*exp(-2*t)*x",
            "1/(1 - 2*m/r)",
            "f(y - b*x)^2/f(y - b*x)",
            "sqrt(a)^2",
            "2^(1/2)*2^(1/2)",
        ] {
            let once = n(s);
            assert_eq!(once.normalize().unwrap(), once, "not idempotent: {s}");
        }
    }

    #[test]
    fn exponentials_merge() {
        assert_eq!(n("exp(m*t)*exp(-m*t)"), Expr::int(1));
        assert_eq!(n("exp(t)^2"), n("exp(2*t)"));
        assert_eq!(n("sqrt(a)^2"), n("a"));
        // but (x^2)^(1/2) must stay put
        let e = n("(x^2)^(1/2)");
        assert!(matches!(e, Expr::Power(_, _)));
    }

    #[test]
    fn rational_folding() {
        assert_eq!(n("2^10"), Expr::int(1024));
        assert_eq!(n("4^(1/2)"), Expr::int(2));
        assert_eq!(n("8^(2/3)"), Expr::int(4));
        assert_eq!(n("(1/4)^(-1/2)"), Expr::int(2));
        assert_eq!(n("2^(3/2)"), n("2*2^(1/2)"));
        assert_eq!(n("0^3"), Expr::int(0));
        assert_eq!(n("0^0"), Expr::int(1));
    }

    #[test]
    fn division_by_syntactic_zero_errors() {
        assert_eq!(
            Expr::parse("x/(1 - 1)").unwrap_err().to_string(),
            "division by syntactic zero at offset 0"
        );
        assert!(matches!(
            (Expr::sym("x") / Expr::int(0)).normalize(),
            Err(NormalizeError::DivisionByZero)
        ));
    }

    #[test]
    fn content_extraction_cancels_proportional_denominators() {
        let e = n("(2*x + 2)^(-1) - (1/2)*(x + 1)^(-1)");
        assert!(e.is_zero_literal(), "got {e:?}");
    }

    #[test]
    fn clear_denominators_closes_rational_identities() {
        // r/(r+1) + 1/(r+1) - 1 is zero only after clearing.
        let e = n("r/(r + 1) + 1/(r + 1) - 1");
        assert!(!e.is_zero_literal());
        assert!(e.clear_denominators().unwrap().is_zero_literal());
        // and a two-denominator case
        let f = n("1/(x*(x + 1)) - 1/x + 1/(x + 1)");
        assert!(f.clear_denominators().unwrap().is_zero_literal());
    }

    #[test]
    fn product_of_sums_expands() {
        let e = n("(x - y)*(x + y) - x^2 + y^2");
        assert!(e.is_zero_literal());
        let p = n("(x + y)^2 - x^2 - 2*x*y - y^2");
        assert!(p.is_zero_literal());
    }
}
