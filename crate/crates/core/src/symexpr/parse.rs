//! Infix expression parser over a caller-supplied symbol table. Syntax:
//! `+ - * / ^` with integer exponents, rational literals via `/`, and
//! identifiers matching `[A-Za-z_][A-Za-z0-9_]*`. The printer in `expr.rs`
//! emits this same syntax, so `parse(print(e))` normalizes equal to `e`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::{Expr, ExprError};
use super::var::Var;

pub fn parse_expr(src: &str, symbols: &BTreeMap<String, Var>) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        symbols,
    };
    let e = p.parse_sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    symbols: &'a BTreeMap<String, Var>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_sum(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.parse_product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.parse_product()?;
                    acc = &acc + &rhs;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.parse_product()?;
                    acc = &acc - &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_product(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    acc = &acc * &rhs;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let e = self.parse_unary()?;
            Ok(-&e)
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Expr, ExprError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.parse_exponent()?;
            base.powi(exp)
        } else {
            Ok(base)
        }
    }

    fn parse_exponent(&mut self) -> Result<i32, ExprError> {
        self.skip_ws();
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: i32 = digits.parse().map_err(|_| ExprError::ExponentRange)?;
        if parenthesized {
            if self.peek() != Some(b')') {
                return Err(self.error("expected `)` after exponent"));
            }
            self.pos += 1;
        }
        Ok(if neg { -value } else { value })
    }

    fn parse_atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = digits.parse().expect("digits");
                Ok(Expr::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.symbols.get(name) {
                    Some(v) => Ok(Expr::var(v.clone())),
                    None => Err(ExprError::UnknownIdentifier(name.to_string())),
                }
            }
            _ => Err(self.error("expected expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::var::Var;

    fn table() -> BTreeMap<String, Var> {
        let mut t = BTreeMap::new();
        for name in ["x", "y"] {
            t.insert(name.to_string(), Var::state(name));
        }
        t.insert("q_y".to_string(), Var::momentum("q_y"));
        t.insert("u2".to_string(), Var::control("u2"));
        t
    }

    #[test]
    fn parses_rational_literals_and_powers() {
        let t = table();
        let e = parse_expr("3/4*x^2 - 1/2", &t).unwrap();
        let x = Expr::var(Var::state("x"));
        let expected = &(&Expr::ratio(3, 4) * &x.powi(2).unwrap()) - &Expr::ratio(1, 2);
        assert_eq!(e, expected);
    }

    #[test]
    fn print_parse_round_trip() {
        let t = table();
        let e = parse_expr("(1-x)*q_y + x^2*u2 - 5/3", &t).unwrap();
        let reparsed = parse_expr(&format!("{e}"), &t).unwrap();
        assert_eq!(e, reparsed);
    }

    #[test]
    fn round_trip_of_rational_function() {
        let t = table();
        let e = parse_expr("(x+1)/(y^2 - 2)", &t).unwrap();
        let reparsed = parse_expr(&format!("{e}"), &t).unwrap();
        assert_eq!(e, reparsed);
    }

    #[test]
    fn unknown_identifier_is_reported() {
        let t = table();
        assert_eq!(
            parse_expr("x + nope", &t),
            Err(ExprError::UnknownIdentifier("nope".to_string()))
        );
    }

    #[test]
    fn negative_exponents() {
        let t = table();
        let e = parse_expr("x^-2", &t).unwrap();
        let x = Expr::var(Var::state("x"));
        assert_eq!(e, Expr::one().checked_div(&x.powi(2).unwrap()).unwrap());
    }
}
