//! Multivariate polynomial gcd over Q via a primitive pseudo-remainder
//! sequence, plus the square-free machinery built on top of it. Good enough
//! for the desk-scale constraint chains this crate manipulates; no attempt
//! at modular or sparse-interpolation speedups.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::var::Var;

/// Primitive gcd of two polynomials, normalized to coprime integer
/// coefficients with positive leading coefficient. Constants are units, so
/// any nonzero constant input yields 1.
pub fn gcd(f: &Poly, g: &Poly) -> Poly {
    if f.is_zero() {
        return normalize(g);
    }
    if g.is_zero() {
        return normalize(f);
    }
    if f.is_constant() || g.is_constant() {
        return Poly::one();
    }
    let mut vars = f.vars();
    vars.extend(g.vars());
    let v = vars.iter().next_back().unwrap().clone();
    match (f.contains_var(&v), g.contains_var(&v)) {
        (true, false) => gcd(&content_in(f, &v), g),
        (false, true) => gcd(f, &content_in(g, &v)),
        (false, false) => unreachable!("v occurs in f or g"),
        (true, true) => {
            let cf = content_in(f, &v);
            let cg = content_in(g, &v);
            let c = gcd(&cf, &cg);
            let pf = f.div_exact(&cf).expect("content divides");
            let pg = g.div_exact(&cg).expect("content divides");
            let prs = prs_gcd(&pf, &pg, &v);
            normalize(&(&c * &prs))
        }
    }
}

fn normalize(p: &Poly) -> Poly {
    p.primitive_part()
}

/// Content of `f` with respect to `v`: gcd of the coefficients of f seen as
/// univariate in v.
pub fn content_in(f: &Poly, v: &Var) -> Poly {
    let coeffs = f.univariate_in(v);
    let mut acc = Poly::zero();
    for c in coeffs {
        if !c.is_zero() {
            acc = gcd(&acc, &c);
            if acc.is_one() {
                return acc;
            }
        }
    }
    acc
}

/// Euclidean loop on primitive parts; inputs must both contain `v` and be
/// primitive with respect to it.
fn prs_gcd(f: &Poly, g: &Poly, v: &Var) -> Poly {
    let (mut a, mut b) = if f.degree_in(v) >= g.degree_in(v) {
        (f.clone(), g.clone())
    } else {
        (g.clone(), f.clone())
    };
    loop {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return primitive_in(&b, v);
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        a = b;
        b = primitive_in(&r, v);
    }
}

fn primitive_in(f: &Poly, v: &Var) -> Poly {
    let c = content_in(f, v);
    f.div_exact(&c).expect("content divides")
}

/// Pseudo-remainder of f by g with respect to v: the remainder of
/// lc(g)^(deg f - deg g + 1) * f under univariate division by g.
pub fn pseudo_rem(f: &Poly, g: &Poly, v: &Var) -> Poly {
    let df = f.degree_in(v);
    let dg = g.degree_in(v);
    debug_assert!(dg >= 1 && df >= dg);
    let gc = g.univariate_in(v);
    let lc = gc.last().unwrap().clone();
    let mut rem = f.univariate_in(v);
    for _ in 0..=(df - dg) {
        let dr = rem.len() - 1;
        if dr < dg as usize {
            break;
        }
        let top = rem.last().unwrap().clone();
        // rem := lc * rem - top * v^(dr-dg) * g
        for c in rem.iter_mut() {
            *c = &*c * &lc;
        }
        let shift = dr - dg as usize;
        for (i, gcoef) in gc.iter().enumerate() {
            rem[shift + i] = &rem[shift + i] - &(&top * gcoef);
        }
        while rem.len() > 1 && rem.last().unwrap().is_zero() {
            rem.pop();
        }
        if rem.len() == 1 {
            break;
        }
    }
    Poly::from_univariate(v, &rem)
}

/// Square-free decomposition of a nonzero polynomial: returns pairs
/// (factor, multiplicity) with pairwise coprime square-free factors whose
/// product with multiplicities equals the primitive part of the input.
pub fn square_free_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out: Vec<(Poly, u32)> = Vec::new();
    let mut rest = f.primitive_part();
    while !rest.is_constant() {
        let v = rest.vars().into_iter().next_back().unwrap();
        let df = rest.derivative(&v);
        let g = gcd(&rest, &df);
        // Yun's loop relative to v. Factors free of v stay inside `y` and
        // are handled by the next round with a different main variable.
        let mut w = rest.div_exact(&g).expect("gcd divides");
        let mut y = g;
        let mut mult = 1u32;
        while !w.is_constant() {
            let w_next = gcd(&w, &y);
            let part = w.div_exact(&w_next).expect("gcd divides");
            if !part.is_constant() {
                out.push((part.primitive_part(), mult));
            }
            y = y.div_exact(&w_next).expect("gcd divides");
            w = w_next;
            mult += 1;
        }
        rest = y;
    }
    merge_factors(out)
}

fn merge_factors(factors: Vec<(Poly, u32)>) -> Vec<(Poly, u32)> {
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

pub fn factor_order(a: &(Poly, u32), b: &(Poly, u32)) -> std::cmp::Ordering {
    (a.0.total_degree(), a.0.term_count())
        .cmp(&(b.0.total_degree(), b.0.term_count()))
        .then_with(|| {
            let la = a.0.leading().map(|(m, _)| m.clone()).unwrap_or_default();
            let lb = b.0.leading().map(|(m, _)| m.clone()).unwrap_or_default();
            la.cmp(&lb)
        })
        .then_with(|| format!("{}", a.0).cmp(&format!("{}", b.0)))
}

/// Exact square root of a polynomial, if one exists.
pub fn poly_sqrt(f: &Poly) -> Option<Poly> {
    if f.is_zero() {
        return Some(Poly::zero());
    }
    let content = f.content();
    if content.is_negative() {
        return None;
    }
    let root_c = rational_sqrt(&content)?;
    let prim = f.primitive_part();
    let mut root = Poly::constant(root_c);
    for (p, m) in square_free_decomposition(&prim) {
        if m % 2 != 0 {
            return None;
        }
        root = &root * &p.pow(m / 2);
    }
    // The square-free factors are sign-normalized, so verify the product.
    if &(&root * &root) == f {
        Some(root)
    } else {
        None
    }
}

pub fn rational_sqrt(c: &BigRational) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    if c.is_zero() {
        return Some(BigRational::zero());
    }
    let num = c.numer().sqrt();
    let den = c.denom().sqrt();
    if &(&num * &num) == c.numer() && &(&den * &den) == c.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

pub fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    use num_integer::Integer;
    let num: BigInt = a.numer().gcd(b.numer());
    let den: BigInt = a.denom().lcm(b.denom());
    if num.is_zero() {
        BigRational::zero()
    } else {
        BigRational::new(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::var::Var;

    fn pv(name: &str) -> Poly {
        Poly::var(Var::state(name))
    }

    #[test]
    fn gcd_of_products() {
        let x = pv("x");
        let y = pv("y");
        let a = &(&x + &Poly::one()) * &(&x - &y); // (x+1)(x-y)
        let b = &(&x + &Poly::one()) * &(&y + &Poly::from_int(2)); // (x+1)(y+2)
        let g = gcd(&a, &b);
        assert_eq!(g, &x + &Poly::one());
    }

    #[test]
    fn gcd_detects_coprime() {
        let x = pv("x");
        let y = pv("y");
        assert!(gcd(&(&x + &Poly::one()), &(&y - &Poly::one())).is_one());
    }

    #[test]
    fn square_free_of_perfect_square() {
        let x = pv("x");
        let f = (&(&x - &Poly::one())).pow(2);
        let dec = square_free_decomposition(&f);
        assert_eq!(dec, vec![(&x - &Poly::one(), 2)]);
    }

    #[test]
    fn square_free_mixed_variables() {
        let x = pv("x");
        let y = pv("y");
        let f = &(&y * &y) * &(&x + &Poly::one()); // y^2 (x+1)
        let mut dec = square_free_decomposition(&f);
        dec.sort_by(factor_order);
        assert_eq!(dec, vec![(y.clone(), 2), (&x + &Poly::one(), 1)]);
    }

    #[test]
    fn sqrt_of_discriminant() {
        let x = pv("x");
        let y = pv("y");
        let s = &(&x * &y).scale(&BigRational::from_integer(2.into())) + &Poly::one();
        let f = &s * &s;
        assert_eq!(poly_sqrt(&f), Some(s));
        assert_eq!(poly_sqrt(&(&x * &x).scale(&BigRational::from_integer(2.into()))), None);
    }
}
