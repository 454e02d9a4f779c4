//! Partial factorization of polynomial expressions. Complete for the shapes
//! the constraint engine splits on: monomial content, linear forms, perfect
//! powers, and quadratics whose discriminant is a polynomial square.
//! Anything else is returned as a coarse square-free factor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::{Expr, ExprError};
use super::gcd::{factor_order, gcd, poly_sqrt, square_free_decomposition};
use super::poly::{Monomial, Poly};
use super::var::Var;

/// Factors a polynomial expression into non-constant, content-free factors
/// with multiplicities; the product of the factors equals the input up to a
/// rational constant.
pub fn factor(e: &Expr) -> Result<Vec<(Expr, u32)>, ExprError> {
    let p = e.as_poly()?;
    Ok(factor_poly(p)
        .into_iter()
        .map(|(f, m)| (Expr::from_poly(f), m))
        .collect())
}

pub fn factor_poly(p: &Poly) -> Vec<(Poly, u32)> {
    if p.is_constant() {
        return Vec::new();
    }
    let mut out: Vec<(Poly, u32)> = Vec::new();
    // Monomial part: variables dividing every term.
    let mono = monomial_gcd(p);
    for (v, e) in mono.powers() {
        out.push((Poly::var(v.clone()), *e));
    }
    let rest = p
        .div_exact(&Poly::from_terms([(mono, BigRational::one())]))
        .expect("monomial gcd divides")
        .primitive_part();
    if !rest.is_constant() {
        for (sq, mult) in square_free_decomposition(&rest) {
            for piece in split_square_free(&sq) {
                out.push((piece, mult));
            }
        }
    }
    merge(out)
}

fn merge(factors: Vec<(Poly, u32)>) -> Vec<(Poly, u32)> {
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (p, m) in factors {
        if let Some(entry) = merged.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += m;
        } else {
            merged.push((p, m));
        }
    }
    merged.sort_by(factor_order);
    merged
}

fn monomial_gcd(p: &Poly) -> Monomial {
    let mut iter = p.terms();
    let first = match iter.next() {
        Some((m, _)) => m.clone(),
        None => return Monomial::unit(),
    };
    let mut powers: Vec<(Var, u32)> = first.powers().to_vec();
    for (m, _) in iter {
        powers = powers
            .into_iter()
            .filter_map(|(v, e)| {
                let o = m.exponent(&v);
                if o == 0 {
                    None
                } else {
                    Some((v, e.min(o)))
                }
            })
            .collect();
        if powers.is_empty() {
            break;
        }
    }
    Monomial::from_powers(powers)
}

/// Attempts to break a primitive square-free polynomial into smaller
/// factors. Degree-1 polynomials in the main variable split off the gcd of
/// their coefficients; degree-2 splits via the quadratic formula when the
/// discriminant is a square; univariate inputs additionally peel rational
/// roots. Returns the input unchanged when no split is found.
fn split_square_free(p: &Poly) -> Vec<Poly> {
    let p = p.primitive_part();
    if p.total_degree() <= 1 {
        return vec![p];
    }
    let vars = p.vars();
    let v = match vars.iter().next_back() {
        Some(v) => v.clone(),
        None => return vec![p],
    };
    if vars.len() == 1 {
        return split_univariate(&p, &v);
    }
    match p.degree_in(&v) {
        1 => {
            let coeffs = p.univariate_in(&v);
            let a = coeffs[1].clone();
            let b = coeffs[0].clone();
            let g = gcd(&a, &b);
            if g.is_constant() {
                return vec![p];
            }
            let reduced = Poly::from_univariate(
                &v,
                &[
                    b.div_exact(&g).expect("gcd divides"),
                    a.div_exact(&g).expect("gcd divides"),
                ],
            );
            let mut out = split_square_free(&g);
            out.push(reduced.primitive_part());
            out
        }
        2 => split_quadratic(&p, &v),
        _ => vec![p],
    }
}

fn split_quadratic(p: &Poly, v: &Var) -> Vec<Poly> {
    let coeffs = p.univariate_in(v);
    if coeffs.len() != 3 {
        return vec![p.clone()];
    }
    let (a, b, c) = (&coeffs[2], &coeffs[1], &coeffs[0]);
    let four_ac = (&(a * c)).scale(&BigRational::from_integer(BigInt::from(4)));
    let disc = &(b * b) - &four_ac;
    let root = match poly_sqrt(&disc.sign_normalized().primitive_part()) {
        Some(r) => {
            // Restore the discarded content: disc = k^2 * r^2 must hold.
            let content = disc.content();
            match super::gcd::rational_sqrt(&content) {
                Some(k) => r.scale(&k),
                None => return vec![p.clone()],
            }
        }
        None => return vec![p.clone()],
    };
    if &(&root * &root) != &disc {
        return vec![p.clone()];
    }
    let two_a = a.scale(&BigRational::from_integer(BigInt::from(2)));
    let f1 = &Poly::from_univariate(v, &[&b - &root, two_a.clone()]) * &Poly::one();
    let f2 = Poly::from_univariate(v, &[&b + &root, two_a]);
    let f1 = f1.primitive_part();
    let f2 = f2.primitive_part();
    // 4a * p = f1 * f2 up to content, so the primitive parts must multiply
    // back to p up to a constant; verify before trusting the split.
    let prod = &f1 * &f2;
    if prod.primitive_part() == p.primitive_part() {
        let mut out = split_square_free(&f1);
        out.extend(split_square_free(&f2));
        out
    } else {
        vec![p.clone()]
    }
}

fn split_univariate(p: &Poly, v: &Var) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut rest = p.clone();
    // Peel rational roots r = num/den with num | a0 and den | an.
    'peel: while rest.degree_in(v) >= 2 {
        let coeffs = rest.univariate_in(v);
        let a0 = match coeffs[0].constant_value() {
            Some(c) => c,
            None => break,
        };
        if a0.is_zero() {
            // Square-free input keeps v out of the content, but guard anyway.
            break;
        }
        let an = coeffs.last().unwrap().constant_value().expect("univariate");
        let scale = a0.denom().lcm(an.denom());
        let a0_int = (a0 * BigRational::from_integer(scale.clone())).to_integer();
        let an_int = (an * BigRational::from_integer(scale)).to_integer();
        for num in small_divisors(&a0_int) {
            for den in small_divisors(&an_int) {
                for sign in [1i64, -1] {
                    let r = BigRational::new(&num * BigInt::from(sign), den.clone());
                    let mut pt = std::collections::BTreeMap::new();
                    pt.insert(v.clone(), r.clone());
                    if rest.eval(&pt).expect("univariate").is_zero() {
                        // (den*v - num*sign) divides rest.
                        let lin = Poly::from_univariate(
                            v,
                            &[
                                Poly::constant(-r * BigRational::from_integer(den.clone())),
                                Poly::constant(BigRational::from_integer(den.clone())),
                            ],
                        )
                        .primitive_part();
                        if let Some(q) = rest.div_exact(&lin) {
                            out.push(lin);
                            rest = q.primitive_part();
                            continue 'peel;
                        }
                    }
                }
            }
        }
        break;
    }
    if rest.degree_in(v) == 2 {
        out.extend(split_quadratic(&rest, v));
    } else if !rest.is_constant() {
        out.push(rest);
    }
    out
}

use num_integer::Integer;

/// Positive divisors, abandoning the search for large inputs where trial
/// division would be wasteful; callers then keep the coarse factor.
fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() || n > BigInt::from(1_000_000) {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse::parse_expr;
    use std::collections::BTreeMap;

    fn table() -> BTreeMap<String, Var> {
        let mut t = BTreeMap::new();
        for name in ["x", "y"] {
            t.insert(name.to_string(), Var::state(name));
        }
        t.insert("q_z".to_string(), Var::momentum("q_z"));
        t.insert("u2".to_string(), Var::control("u2"));
        t
    }

    fn parse(s: &str) -> Expr {
        parse_expr(s, &table()).unwrap()
    }

    fn factor_strings(e: &Expr) -> Vec<(String, u32)> {
        factor(e)
            .unwrap()
            .into_iter()
            .map(|(f, m)| (format!("{f}"), m))
            .collect()
    }

    #[test]
    fn splits_monomial_times_linear() {
        // x^2*q_z*u2 - x*q_z*u2 = x (x-1) q_z u2
        let e = parse("x^2*q_z*u2 - x*q_z*u2");
        let fs = factor_strings(&e);
        assert_eq!(
            fs,
            vec![
                ("x".to_string(), 1),
                ("q_z".to_string(), 1),
                ("u2".to_string(), 1),
                ("x - 1".to_string(), 1),
            ]
        );
    }

    #[test]
    fn perfect_square() {
        let e = parse("x^2 - 2*x + 1");
        assert_eq!(factor_strings(&e), vec![("x - 1".to_string(), 2)]);
    }

    #[test]
    fn content_is_ignored() {
        let a = parse("x^2 - 2*x + 1");
        let b = parse("-7/3*x^2 + 14/3*x - 7/3");
        assert_eq!(factor(&a).unwrap(), factor(&b).unwrap());
    }

    #[test]
    fn factor_of_non_polynomial_rejected() {
        let e = parse("1/(x+1)");
        assert_eq!(factor(&e), Err(ExprError::NonPolynomial));
    }

    #[test]
    fn soundness_product_restores_input() {
        let e = parse("(x - y)*(x + y)*u2^2");
        let fs = factor(&e).unwrap();
        let mut prod = Expr::one();
        for (f, m) in &fs {
            prod = &prod * &f.powi(*m as i32).unwrap();
        }
        // Equal up to a rational constant.
        let q = e.checked_div(&prod).unwrap();
        assert!(q.is_constant() && !q.is_zero());
        assert_eq!(fs.len(), 3, "u2^2 and the two linear forms: {fs:?}");
    }

    #[test]
    fn univariate_rational_roots() {
        let e = parse("2*x^3 - 3*x^2 - 3*x + 2"); // (x-2)(2x-1)(x+1)
        let fs = factor_strings(&e);
        assert_eq!(fs.len(), 3);
        assert!(fs.iter().all(|(_, m)| *m == 1));
    }
}
