//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: Vec<String>) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vec<String>, c: Rational) -> Self {
        let mut p = Polynomial::zero(vars);
        let key = vec![0; p.vars.len()];
        p.add_term(key, c);
        p
    }

    pub fn var(vars: Vec<String>, index: usize) -> Self {
        let mut key = vec![0; vars.len()];
        key[index] = 1;
        let mut p = Polynomial::zero(vars);
        p.add_term(key, Rational::one());
        p
    }

    pub fn from_terms(vars: Vec<String>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), p.vars.len(), "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    /// Variable names `prefix1..prefixN`.
    pub fn indexed_vars(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Total degree restricted to the variables in `indices`.
    pub fn degree_in(&self, indices: std::ops::Range<usize>) -> u32 {
        self.terms
            .keys()
            .map(|m| m[indices.clone()].iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn abs_coefficient_sum(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "evaluation arity");
        // one gcd per term instead of one per factor
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let (mut num, mut den) = (c.numer().clone(), c.denom().clone());
            for (x, &e) in point.iter().zip(m) {
                match e {
                    0 => {}
                    1 => {
                        num *= x.numer();
                        den *= x.denom();
                    }
                    _ => {
                        num *= num::pow(x.numer().clone(), e as usize);
                        den *= num::pow(x.denom().clone(), e as usize);
                    }
                }
            }
            total += Rational::new(num, den);
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(crate::rational::to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Polynomial::zero(self.vars.clone());
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars.len(), other.vars.len(), "adding polynomials over different rings");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars.len(), other.vars.len(), "multiplying polynomials over different rings");
        let mut out = Polynomial::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Polynomial::constant(self.vars.clone(), Rational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `images[i]` for variable `i`. All images must share one ring,
    /// which becomes the ring of the result.
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.vars.len(), "composition arity");
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_default();
        let mut out = Polynomial::zero(target.clone());
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(target.clone(), c.clone());
            for (img, &e) in images.iter().zip(m) {
                if e > 0 {
                    acc = acc.mul(&img.pow(e));
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Same coefficients in a ring with renamed (or re-embedded) variables:
    /// variable `i` becomes variable `map[i]` of a ring named `vars`.
    pub fn relabel(&self, vars: Vec<String>, map: &[usize]) -> Polynomial {
        assert_eq!(map.len(), self.vars.len());
        let n = vars.len();
        let mut out = Polynomial::zero(vars);
        for (m, c) in &self.terms {
            let mut key = vec![0; n];
            for (i, &e) in m.iter().enumerate() {
                key[map[i]] += e;
            }
            out.add_term(key, c.clone());
        }
        out
    }

    /// Univariate view: coefficient list, lowest degree first. Panics unless
    /// the ring has exactly one variable.
    pub fn univariate_coeffs(&self) -> Vec<Rational> {
        assert_eq!(self.vars.len(), 1, "univariate view of a multivariate polynomial");
        let deg = self.degree() as usize;
        let mut out = vec![Rational::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m[0] as usize] = c.clone();
        }
        out
    }

    /// `coeff:monomial` pairs separated by spaces, e.g. `1:s1*t2 -1/2:s1^2*t2`;
    /// the constant monomial is written `1` and the zero polynomial `0`.
    pub fn to_pairs(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("{c}:{}", self.monomial_text(m, "1")))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_pairs(vars: Vec<String>, text: &str) -> Result<Polynomial> {
        let mut p = Polynomial::zero(vars);
        let text = text.trim();
        if text == "0" {
            return Ok(p);
        }
        if text.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        for pair in text.split_whitespace() {
            let (c, mono) = pair
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected coeff:monomial, got `{pair}`")))?;
            let c = parse_rational(c)?;
            let m = p.parse_monomial(mono)?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn parse_monomial(&self, text: &str) -> Result<Monomial> {
        let mut m = vec![0; self.vars.len()];
        if text == "1" {
            return Ok(m);
        }
        for factor in text.split('*') {
            let (name, e) = match factor.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?,
                ),
                None => (factor, 1),
            };
            let idx = self
                .vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
            m[idx] += e;
        }
        Ok(m)
    }

    fn monomial_text(&self, m: &[u32], unit: &str) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.vars)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        if parts.is_empty() {
            unit.to_string()
        } else {
            parts.join("*")
        }
    }

    /// Parses an infix expression such as `x^2 - y^2 - 1` or `(x-1)*(x+1/2)`.
    pub fn parse_infix(vars: Vec<String>, text: &str) -> Result<Polynomial> {
        let tokens = tokenize(text)?;
        let mut parser = InfixParser {
            vars: &vars,
            tokens,
            pos: 0,
        };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{text}`")));
        }
        Ok(p)
    }
}

impl fmt::Display for Polynomial {
    /// Infix rendering that [`Polynomial::parse_infix`] reads back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads naturally
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            let mono = self.monomial_text(m, "");
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono,
                (false, false) => format!("{mag}*{mono}"),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
                first = false;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // `p/q` literal only when a digit follows the slash
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(parse_rational(&lit)?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct InfixParser<'a> {
    vars: &'a [String],
    tokens: Vec<Token>,
    pos: usize,
}

impl InfixParser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek_op() == Some('*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(e)) if e.is_integer() && !e.is_negative() => {
                    let e = e.to_integer();
                    self.pos += 1;
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("expected a non-negative integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(c) => Ok(Polynomial::constant(self.vars.to_vec(), c)),
            Token::Ident(name) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
                Ok(Polynomial::var(self.vars.to_vec(), idx))
            }
            Token::Op('(') => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }
}
