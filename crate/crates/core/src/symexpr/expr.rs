use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::gcd::gcd;
use super::poly::{rational_to_f64, Poly};
use super::var::{Var, VarKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("division by an expression identically zero")]
    DivisionByZero,
    #[error("factor requires polynomial")]
    NonPolynomial,
    #[error("unbound variable `{0}` in evaluation point")]
    UnboundVariable(String),
    #[error("denominator vanishes at the evaluation point")]
    ZeroDenominatorAtPoint,
    #[error("cyclic bindings: `{0}` is reachable from its own binding")]
    CyclicBindings(String),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("exponent out of range")]
    ExponentRange,
}

/// Normalized rational expression: an expanded numerator and denominator
/// with their common factor cancelled and the denominator monic under the
/// term order. Polynomials have denominator 1. Construction is the only
/// way to make one, so every `Expr` in the program is in canonical form and
/// structural equality decides expression equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Expr {
            num: Poly::from_int(n),
            den: Poly::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn var(v: Var) -> Self {
        Expr {
            num: Poly::var(v),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    fn make(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        let (mut num, mut den) = (num, den);
        if !den.is_constant() {
            let g = gcd(&num, &den);
            if !g.is_one() {
                num = num.div_exact(&g).expect("gcd divides");
                den = den.div_exact(&g).expect("gcd divides");
            }
        }
        // Monic denominator: scale both sides by 1/lc(den).
        let lc = den.leading().expect("nonzero").1.clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(Expr { num, den })
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Result<&Poly, ExprError> {
        if self.is_polynomial() {
            Ok(&self.num)
        } else {
            Err(ExprError::NonPolynomial)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        match (self.num.constant_value(), self.den.constant_value()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.num.vars();
        out.extend(self.den.vars());
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn contains_kind(&self, kind: VarKind) -> bool {
        self.vars().iter().any(|v| v.kind() == kind)
    }

    /// Normalization is performed on construction, so this is the identity;
    /// it exists so callers can state intent and tests can check idempotence.
    pub fn normalize(&self) -> Expr {
        self.clone()
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        if rhs.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Expr::make(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn powi(&self, n: i32) -> Result<Expr, ExprError> {
        if n >= 0 {
            Expr::make(self.num.pow(n as u32), self.den.pow(n as u32))
        } else {
            if self.is_zero() {
                return Err(ExprError::DivisionByZero);
            }
            let k = n.unsigned_abs();
            Expr::make(self.den.pow(k), self.num.pow(k))
        }
    }

    /// Exact partial derivative, via the quotient rule for rational inputs.
    pub fn differentiate(&self, v: &Var) -> Expr {
        if self.den.is_one() {
            return Expr::from_poly(self.num.derivative(v));
        }
        let num = &(&self.num.derivative(v) * &self.den) - &(&self.num * &self.den.derivative(v));
        let den = &self.den * &self.den;
        Expr::make(num, den).expect("denominator nonzero")
    }

    /// Simultaneous substitution followed by normalization. Bindings must be
    /// acyclic: no variable may be reachable from its own binding.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, ExprError> {
        check_acyclic(bindings)?;
        let num = substitute_poly(&self.num, bindings)?;
        let den = substitute_poly(&self.den, bindings)?;
        num.checked_div(&den)
    }

    /// Exact rational evaluation; every variable must be bound and the
    /// denominator must not vanish at the point.
    pub fn eval_at(&self, point: &BTreeMap<Var, BigRational>) -> Result<BigRational, ExprError> {
        let num = self
            .num
            .eval(point)
            .map_err(|v| ExprError::UnboundVariable(v.name().to_string()))?;
        let den = self
            .den
            .eval(point)
            .map_err(|v| ExprError::UnboundVariable(v.name().to_string()))?;
        if den.is_zero() {
            return Err(ExprError::ZeroDenominatorAtPoint);
        }
        Ok(num / den)
    }

    pub fn eval_f64(&self, point: &BTreeMap<Var, f64>) -> Result<f64, ExprError> {
        let num = self
            .num
            .eval_f64(point)
            .map_err(|v| ExprError::UnboundVariable(v.name().to_string()))?;
        let den = self
            .den
            .eval_f64(point)
            .map_err(|v| ExprError::UnboundVariable(v.name().to_string()))?;
        Ok(num / den)
    }
}

fn substitute_poly(p: &Poly, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, ExprError> {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::constant(c.clone());
        for (v, e) in m.powers() {
            let base = match bindings.get(v) {
                Some(b) => b.clone(),
                None => Expr::var(v.clone()),
            };
            let p = base.powi(*e as i32)?;
            term = &term * &p;
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

fn check_acyclic(bindings: &BTreeMap<Var, Expr>) -> Result<(), ExprError> {
    for start in bindings.keys() {
        let mut stack: Vec<&Var> = vec![start];
        let mut seen: BTreeSet<&Var> = BTreeSet::new();
        while let Some(v) = stack.pop() {
            if let Some(e) = bindings.get(v) {
                for w in e.vars() {
                    if &w == start {
                        return Err(ExprError::CyclicBindings(start.name().to_string()));
                    }
                    if let Some((k, _)) = bindings.get_key_value(&w) {
                        if seen.insert(k) {
                            stack.push(k);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        Expr::make(num, den).expect("denominator nonzero")
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        Expr::make(num, den).expect("denominator nonzero")
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::make(&self.num * &rhs.num, &self.den * &rhs.den).expect("denominator nonzero")
    }
}

impl Div for &Expr {
    type Output = Expr;
    /// Panics when dividing by zero; use `checked_div` where the divisor is
    /// not known to be nonzero.
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var(Var::state("x"))
    }

    fn qy() -> Expr {
        Expr::var(Var::momentum("q_y"))
    }

    fn qz() -> Expr {
        Expr::var(Var::momentum("q_z"))
    }

    #[test]
    fn algebraic_identity_normalizes_to_zero() {
        // (1-x)*q_y + x^2*q_z - (q_y - x*q_y + x^2*q_z) == 0
        let lhs = &(&(&Expr::one() - &x()) * &qy()) + &(&(&x() * &x()) * &qz());
        let rhs = &(&qy() - &(&x() * &qy())) + &(&(&x() * &x()) * &qz());
        assert!((&lhs - &rhs).is_zero());
    }

    #[test]
    fn division_by_zero_rejected() {
        let z = &x() - &x();
        assert_eq!(x().checked_div(&z), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn rational_functions_cancel() {
        let num = &(&x() * &x()) - &Expr::one();
        let den = &x() - &Expr::one();
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, &x() + &Expr::one());
    }

    #[test]
    fn substitute_is_simultaneous() {
        // {x -> y, y -> z} applied at once sends x*y to y*z, not z*z.
        let y = Expr::var(Var::state("y"));
        let z = Expr::var(Var::state("z"));
        let e = &x() * &y;
        let mut b = BTreeMap::new();
        b.insert(Var::state("x"), y.clone());
        b.insert(Var::state("y"), z.clone());
        assert_eq!(e.substitute(&b).unwrap(), &y * &z);
    }

    #[test]
    fn cyclic_binding_rejected() {
        let mut b = BTreeMap::new();
        b.insert(Var::state("x"), &x() + &Expr::one());
        assert!(matches!(
            x().substitute(&b),
            Err(ExprError::CyclicBindings(_))
        ));
    }

    #[test]
    fn eval_exact() {
        // eval(x^2, x = 3/2) = 9/4
        let e = x().powi(2).unwrap();
        let mut pt = BTreeMap::new();
        pt.insert(
            Var::state("x"),
            BigRational::new(BigInt::from(3), BigInt::from(2)),
        );
        assert_eq!(
            e.eval_at(&pt).unwrap(),
            BigRational::new(BigInt::from(9), BigInt::from(4))
        );
    }
}
