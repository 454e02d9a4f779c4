use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::var::Var;

/// Power product of variables, kept sorted by the canonical variable order
/// with no zero exponents. The empty product is the monomial 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Exact quotient, or None when some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            let mut e = *e;
            while j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                if other.0[j].1 > e {
                    return None;
                }
                e -= other.0[j].1;
                j += 1;
            }
            if e > 0 {
                out.push((v.clone(), e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Drops `v` from the power product, returning the removed exponent.
    fn without(&self, v: &Var) -> (Monomial, u32) {
        let mut out = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for (w, e) in &self.0 {
            if w == v {
                exp = *e;
            } else {
                out.push((w.clone(), *e));
            }
        }
        (Monomial(out), exp)
    }
}

/// Graded-lexicographic order: total degree first, ties broken
/// lexicographically with earlier variables dominating.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                // The side that still has an exponent on an earlier variable
                // is lexicographically greater.
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((v, e)), Some((w, f))) => match v.cmp(w) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match e.cmp(f) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in &self.0 {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
/// Invariant: no stored coefficient is zero; the map order is the term order,
/// so the last entry is the leading term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), BigRational::one());
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut out = Poly::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_unit())
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms.values().next().unwrap().clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.powers() {
                out.insert(v.clone());
            }
        }
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = &out * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn derivative(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let (rest, _) = m.without(v);
            let lowered = if e > 1 {
                rest.mul(&Monomial::from_powers([(v.clone(), e - 1)]))
            } else {
                rest
            };
            out.add_term(lowered, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact evaluation; every variable of the polynomial must be bound.
    pub fn eval(&self, point: &BTreeMap<Var, BigRational>) -> Result<BigRational, Var> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.powers() {
                let val = point.get(v).ok_or_else(|| v.clone())?;
                for _ in 0..*e {
                    term *= val;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating evaluation for the integrator and sampling probes.
    pub fn eval_f64(&self, point: &BTreeMap<Var, f64>) -> Result<f64, Var> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = rational_to_f64(c);
            for (v, e) in m.powers() {
                let val = *point.get(v).ok_or_else(|| v.clone())?;
                term *= val.powi(*e as i32);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Rational content: gcd of coefficient numerators over lcm of
    /// denominators, carrying the sign of the leading coefficient.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mut content = BigRational::new(num, den);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        content
    }

    /// Divides out the rational content; the result has coprime integer
    /// coefficients and positive leading coefficient.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    /// Flips the sign when the leading coefficient is negative.
    pub fn sign_normalized(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Exact polynomial division; None when `self` is not a multiple of `d`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            quo.add_term(qm.clone(), qc.clone());
            let sub = d.mul_monomial(&qm, &qc);
            rem = &rem - &sub;
        }
        Some(quo)
    }

    /// Coefficients of the polynomial viewed as univariate in `v`, index i
    /// holding the coefficient of v^i.
    pub fn univariate_in(&self, v: &Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut coeffs = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            coeffs[e as usize].add_term(rest, c.clone());
        }
        coeffs
    }

    pub fn from_univariate(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            let shift = Monomial::from_powers([(v.clone(), i as u32)]);
            for (m, a) in &c.terms {
                out.add_term(m.mul(&shift), a.clone());
            }
        }
        out
    }

    /// Simultaneous substitution of polynomials for variables.
    pub fn substitute_polys(&self, bindings: &BTreeMap<Var, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (v, e) in m.powers() {
                match bindings.get(v) {
                    Some(p) => term = &term * &p.pow(*e),
                    None => {
                        term = term.mul_monomial(
                            &Monomial::from_powers([(v.clone(), *e)]),
                            &BigRational::one(),
                        )
                    }
                }
            }
            out = &out + &term;
        }
        out
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    // Exact conversion would overflow for huge integers; split into
    // quotient plus remainder so typical magnitudes stay precise.
    let (q, r) = c.numer().div_rem(c.denom());
    let qf = bigint_to_f64(&q);
    let rf = bigint_to_f64(&r) / bigint_to_f64(c.denom());
    qf + rf
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // Leading term first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_unit() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Var {
        Var::state("x")
    }

    fn y() -> Var {
        Var::state("y")
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let x2 = Monomial::from_powers([(x(), 2)]);
        let xy = Monomial::from_powers([(x(), 1), (y(), 1)]);
        let y2 = Monomial::from_powers([(y(), 2)]);
        let x1 = Monomial::var(x());
        assert!(x2 > xy && xy > y2, "lex tie-break, earlier variable wins");
        assert!(y2 > x1, "degree dominates");
    }

    #[test]
    fn arithmetic_and_derivative() {
        let p = &(&Poly::var(x()) * &Poly::var(x())) - &Poly::from_int(1); // x^2 - 1
        let d = p.derivative(&x());
        assert_eq!(d, Poly::var(x()).scale(&BigRational::from_integer(2.into())));
        assert!(p.derivative(&y()).is_zero());
    }

    #[test]
    fn exact_division() {
        let p = &(&Poly::var(x()) + &Poly::from_int(1)) * &(&Poly::var(x()) - &Poly::from_int(1));
        let q = p.div_exact(&(&Poly::var(x()) - &Poly::from_int(1))).unwrap();
        assert_eq!(q, &Poly::var(x()) + &Poly::from_int(1));
        assert!(p.div_exact(&(&Poly::var(x()) + &Poly::from_int(2))).is_none());
    }

    #[test]
    fn content_and_primitive() {
        let p = (&(&Poly::var(x()) + &Poly::from_int(1)) * &Poly::from_int(1)).scale(
            &BigRational::new(BigInt::from(-4), BigInt::from(6)),
        );
        let prim = p.primitive_part();
        assert_eq!(prim, &Poly::var(x()) + &Poly::from_int(1));
        assert_eq!(prim.scale(&p.content()), p);
    }
}
