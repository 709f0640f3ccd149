//! Rational-coefficient Laurent polynomials in the ansatz parameters.
//!
//! The ansatz families have diagonal metrics whose entries are monomials in
//! the parameters, so every division the tensor pipeline performs is by a
//! monomial and the whole computation closes over Laurent polynomials. This
//! lets the engine derive the reduced ODE systems exactly and print them.
//!
//! Division by anything other than a single monomial panics.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{rational_root, Rational};

/// Ansatz parameter. The order here is the canonical variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    F,
    H,
    A,
    B,
    C,
}

pub const NPARAM: usize = 5;

impl Param {
    pub const ALL: [Param; NPARAM] = [Param::F, Param::H, Param::A, Param::B, Param::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::F => "f",
            Param::H => "h",
            Param::A => "a",
            Param::B => "b",
            Param::C => "c",
        }
    }

    pub fn from_name(s: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == s)
    }
}

type Exps = [i32; NPARAM];

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    // Exponent vectors mapped to nonzero coefficients.
    terms: BTreeMap<Exps, Rational>,
}

impl Laurent {
    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; NPARAM], c);
        }
        Laurent { terms }
    }

    pub fn var(p: Param) -> Self {
        Self::monomial(Rational::one(), &[(p, 1)])
    }

    pub fn monomial(coeff: Rational, powers: &[(Param, i32)]) -> Self {
        let mut e = [0; NPARAM];
        for &(p, k) in powers {
            e[p.index()] += k;
        }
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(e, coeff);
        }
        Laurent { terms }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32; NPARAM], &Rational)> {
        self.terms.iter()
    }

    /// Constant value, if the polynomial has no parameter dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                if e.iter().all(|&k| k == 0) {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Parameters that actually occur.
    pub fn support(&self) -> Vec<Param> {
        Param::ALL
            .into_iter()
            .filter(|p| self.terms.keys().any(|e| e[p.index()] != 0))
            .collect()
    }

    fn add_term(&mut self, e: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn eval_f64(&self, values: &[f64; NPARAM]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = crate::scalar::rational_to_f64(c);
                for (k, &p) in e.iter().enumerate() {
                    if p != 0 {
                        v *= values[k].powi(p);
                    }
                }
                v
            })
            .sum()
    }

    pub fn eval_rational(&self, values: &[Rational; NPARAM]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (k, &p) in e.iter().enumerate() {
                if p != 0 {
                    v *= num_traits::Pow::pow(&values[k], p);
                }
            }
            acc += v;
        }
        acc
    }

    /// Replace parameter `from` by parameter `to` (e.g. collapse a, b, c to h).
    pub fn rename(&self, from: Param, to: Param) -> Laurent {
        let mut out = Laurent::default();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[from.index()];
            e2[from.index()] = 0;
            e2[to.index()] += k;
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Compile into a form that evaluates quickly on `f64` inputs.
    pub fn compile(&self) -> CompiledLaurent {
        CompiledLaurent {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (crate::scalar::rational_to_f64(c), *e))
                .collect(),
        }
    }

    fn exact_div_monomial(&self, e: &Exps, c: &Rational) -> Laurent {
        let mut out = Laurent::default();
        for (e1, c1) in &self.terms {
            let mut e2 = *e1;
            for k in 0..NPARAM {
                e2[k] -= e[k];
            }
            out.terms.insert(e2, c1 / c);
        }
        out
    }

    /// Parse the textual form produced by `Display`, or hand-written formulas
    /// such as `f^3(4a^4(b^4+c^4)-b^4c^4)/(2a^2b^4c^4)`.
    ///
    /// Juxtaposition multiplies. `^` takes a signed integer exponent. Only
    /// monomial divisors are accepted.
    pub fn parse(src: &str) -> Result<Laurent, ParseError> {
        let mut p = Parser {
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let v = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse expression at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Laurent, ParseError> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -self.term()?
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    // tolerate doubled signs such as "+-"
                    if self.peek() == Some('-') {
                        self.pos += 1;
                        acc = acc - self.term()?;
                    } else {
                        acc = acc + self.term()?;
                    }
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Laurent, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if !d.is_monomial() {
                        return Err(self.err("divisor is not a monomial"));
                    }
                    acc = acc / d;
                }
                Some(c) if c == '(' || c.is_ascii_alphanumeric() => {
                    acc = acc * self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Laurent, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let k = self.integer()?;
            let k = i32::try_from(k).map_err(|_| self.err("exponent too large"))?;
            let k = if neg { -k } else { k };
            if k < 0 && !base.is_monomial() {
                return Err(self.err("negative power of a non-monomial"));
            }
            return Ok(crate::scalar::Scalar::powi(&base, k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("integer out of range"))
    }

    fn atom(&mut self) -> Result<Laurent, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Laurent::constant(Rational::from_integer(BigInt::from(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let p = Param::from_name(&c.to_string())
                    .ok_or_else(|| self.err("unknown parameter"))?;
                Ok(Laurent::var(p))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

/// Canonical text: terms in descending exponent order, each written as
/// `coeff * x^k * y^m` with the coefficient omitted when it is ±1.
impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if n == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            let has_vars = e.iter().any(|&k| k != 0);
            if !mag.is_one() || !has_vars {
                factors.push(mag.to_string());
            }
            for p in Param::ALL {
                let k = e[p.index()];
                match k {
                    0 => {}
                    1 => factors.push(p.name().to_string()),
                    _ => factors.push(format!("{}^{}", p.name(), k)),
                }
            }
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(mut self, rhs: Laurent) -> Laurent {
        for (e, c) in rhs.terms {
            self.add_term(e, -c);
        }
        self
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(mut self) -> Laurent {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let mut e = *e1;
                for k in 0..NPARAM {
                    e[k] += e2[k];
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Div for Laurent {
    type Output = Laurent;
    fn div(self, rhs: Laurent) -> Laurent {
        assert!(
            rhs.is_monomial(),
            "Laurent division requires a monomial divisor, got {rhs}"
        );
        let (e, c) = rhs.terms.iter().next().unwrap();
        self.exact_div_monomial(e, c)
    }
}

impl crate::scalar::Scalar for Laurent {
    const DEFAULT_TOL: f64 = 0.0;

    fn zero() -> Self {
        Laurent::default()
    }
    fn one() -> Self {
        Laurent::constant(<Rational as One>::one())
    }
    fn from_i64(n: i64) -> Self {
        Laurent::constant(Rational::from_integer(BigInt::from(n)))
    }
    fn from_rational(r: &Rational) -> Self {
        Laurent::constant(r.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn root(&self, n: u32) -> Option<Self> {
        if !self.is_monomial() || n == 0 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let mut e2 = [0; NPARAM];
        for k in 0..NPARAM {
            if e[k] % n as i32 != 0 {
                return None;
            }
            e2[k] = e[k] / n as i32;
        }
        let c2 = rational_root(c, n)?;
        let mut terms = BTreeMap::new();
        terms.insert(e2, c2);
        Some(Laurent { terms })
    }
    fn is_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.values().all(Signed::is_positive)
    }
    fn to_f64(&self) -> f64 {
        self.as_constant()
            .map(|c| crate::scalar::rational_to_f64(&c))
            .unwrap_or(f64::NAN)
    }
    fn pivot_weight(&self) -> f64 {
        match self.terms.len() {
            0 => 0.0,
            1 => 2.0,
            _ => 1.0,
        }
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

/// A Laurent polynomial prepared for repeated `f64` evaluation.
#[derive(Clone, Debug)]
pub struct CompiledLaurent {
    terms: Vec<(f64, Exps)>,
}

impl CompiledLaurent {
    pub fn eval(&self, values: &[f64; NPARAM]) -> f64 {
        let mut sum = 0.0;
        for (c, e) in &self.terms {
            let mut v = *c;
            for k in 0..NPARAM {
                if e[k] != 0 {
                    v *= values[k].powi(e[k]);
                }
            }
            sum += v;
        }
        sum
    }
}
