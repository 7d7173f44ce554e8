//! Integer sets: finite prefixes and closed-form descriptors.
//!
//! A [`SetDescriptor`] names a possibly infinite set `{a(n) : n >= start}`
//! where `a` is a sum of constants, monomials `c n^e`, geometric terms
//! `c b^n` and `c n!`, or a finite list, a union, or a truncation of these.
//! Closed forms can report their residues modulo `q` over the whole infinite
//! set, which is what makes rational-rotation gaps exact.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the number of sequence steps a residue scan may take.
pub const RESIDUE_SCAN_CAP: u64 = 1 << 20;

/// Finite strictly increasing set of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntegerSet {
    elements: Vec<u64>,
    tag: String,
}

impl IntegerSet {
    pub fn new(elements: Vec<u64>, tag: impl Into<String>) -> Result<Self> {
        if let Some(i) = elements.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing(i + 1));
        }
        Ok(IntegerSet {
            elements,
            tag: tag.into(),
        })
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut elements: Vec<u64>, tag: impl Into<String>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        IntegerSet {
            elements,
            tag: tag.into(),
        }
    }

    pub fn empty() -> Self {
        IntegerSet {
            elements: Vec::new(),
            tag: "empty".into(),
        }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Smallest common element, if any.
    pub fn common_element(&self, other: &IntegerSet) -> Option<u64> {
        let (mut i, mut j) = (0, 0);
        while i < self.elements.len() && j < other.elements.len() {
            match self.elements[i].cmp(&other.elements[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(self.elements[i]),
            }
        }
        None
    }

    pub fn ensure_disjoint(&self, other: &IntegerSet) -> Result<()> {
        match self.common_element(other) {
            Some(x) => Err(Error::SetsNotDisjoint(x)),
            None => Ok(()),
        }
    }

    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        let mut v = self.elements.clone();
        v.extend_from_slice(&other.elements);
        IntegerSet::from_unsorted(v, format!("{}|{}", self.tag, other.tag))
    }

    pub fn prefix(&self, n: usize) -> IntegerSet {
        IntegerSet {
            elements: self.elements[..n.min(self.elements.len())].to_vec(),
            tag: self.tag.clone(),
        }
    }
}

/// One summand of a closed-form sequence `a(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Const(i64),
    /// `coeff * n^exp`
    Monomial { coeff: i64, exp: u32 },
    /// `coeff * base^n`
    Geometric { coeff: i64, base: u64 },
    /// `coeff * n!`
    Factorial { coeff: i64 },
}

impl Term {
    fn value(&self, n: u64) -> Option<i128> {
        let n = n as i128;
        match *self {
            Term::Const(c) => Some(c as i128),
            Term::Monomial { coeff, exp } => n.checked_pow(exp)?.checked_mul(coeff as i128),
            Term::Geometric { coeff, base } => (base as i128)
                .checked_pow(u32::try_from(n).ok()?)?
                .checked_mul(coeff as i128),
            Term::Factorial { coeff } => {
                let mut f: i128 = 1;
                for j in 2..=n {
                    f = f.checked_mul(j)?;
                }
                f.checked_mul(coeff as i128)
            }
        }
    }
}

/// `a(n)` for `n >= start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub terms: Vec<Term>,
    pub start: u64,
}

impl Formula {
    pub fn value(&self, n: u64) -> Result<u64> {
        let mut total: i128 = 0;
        for t in &self.terms {
            total = t
                .value(n)
                .and_then(|v| total.checked_add(v))
                .ok_or_else(|| Error::Overflow(format!("{self} at n = {n}")))?;
        }
        u64::try_from(total).map_err(|_| Error::Overflow(format!("{self} at n = {n} is {total}")))
    }

    /// `a(n) mod q` for consecutive `n` starting at `start`, without
    /// materializing `a(n)`.
    fn residue_scan(&self, q: u64, steps: u64) -> impl Iterator<Item = u64> + '_ {
        let qi = q as i128;
        let mut geo: Vec<i128> = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Geometric { base, .. } => pow_mod(*base as i128, self.start, qi),
                _ => 0,
            })
            .collect();
        let mut fact: i128 = (1..=self.start as i128).fold(1 % qi, |acc, j| acc * (j % qi) % qi);
        (0..steps).map(move |step| {
            let n = self.start + step;
            let mut acc: i128 = 0;
            for (t, g) in self.terms.iter().zip(geo.iter_mut()) {
                let v = match *t {
                    Term::Const(c) => c as i128 % qi,
                    Term::Monomial { coeff, exp } => coeff as i128 % qi * pow_mod(n as i128, exp as u64, qi) % qi,
                    Term::Geometric { coeff, base } => {
                        let v = coeff as i128 % qi * *g % qi;
                        *g = *g * (base as i128 % qi) % qi;
                        v
                    }
                    Term::Factorial { coeff } => coeff as i128 % qi * fact % qi,
                };
                acc = (acc + v) % qi;
            }
            fact = fact * ((n as i128 + 1) % qi) % qi;
            acc.rem_euclid(qi) as u64
        })
    }
}

fn pow_mod(base: i128, mut e: u64, q: i128) -> i128 {
    let mut b = base.rem_euclid(q);
    let mut r = 1 % q;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    r
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            let (c, body) = match *t {
                Term::Const(c) => (c, String::new()),
                Term::Monomial { coeff, exp: 1 } => (coeff, "n".to_string()),
                Term::Monomial { coeff, exp } => (coeff, format!("n^{exp}")),
                Term::Geometric { coeff, base } => (coeff, format!("{base}^n")),
                Term::Factorial { coeff } => (coeff, "n!".to_string()),
            };
            let sign = if c < 0 { "-" } else { "+" };
            if i > 0 || c < 0 {
                write!(f, "{sign}")?;
            }
            let mag = c.unsigned_abs();
            match (body.is_empty(), mag) {
                (true, _) => write!(f, "{mag}")?,
                (false, 1) => write!(f, "{body}")?,
                (false, _) => write!(f, "{mag}*{body}")?,
            }
        }
        if self.start != 1 {
            write!(f, "@{}", self.start)?;
        }
        Ok(())
    }
}

/// Residues of a set modulo `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residues {
    pub modulus: u64,
    pub values: BTreeSet<u64>,
    /// True when `values` is the residue set of the whole (possibly
    /// infinite) set, false when it only reflects a truncation.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetDescriptor {
    Formula(Formula),
    Finite(Vec<u64>),
    Union(Vec<SetDescriptor>),
    /// Elements of `inner` not exceeding `bound`, standing in for the
    /// infinite set (results over it are never exact).
    Truncated { inner: Box<SetDescriptor>, bound: u64 },
}

impl SetDescriptor {
    pub fn formula(terms: Vec<Term>) -> Self {
        SetDescriptor::Formula(Formula { terms, start: 1 })
    }

    /// `c * b^n`
    pub fn geometric(coeff: i64, base: u64) -> Self {
        SetDescriptor::formula(vec![Term::Geometric { coeff, base }])
    }

    pub fn powers_of_two() -> Self {
        SetDescriptor::geometric(1, 2)
    }

    pub fn squares() -> Self {
        SetDescriptor::formula(vec![Term::Monomial { coeff: 1, exp: 2 }])
    }

    pub fn finite(mut values: Vec<u64>) -> Self {
        values.sort_unstable();
        values.dedup();
        SetDescriptor::Finite(values)
    }

    pub fn truncated(self, bound: u64) -> Self {
        SetDescriptor::Truncated {
            inner: Box::new(self),
            bound,
        }
    }

    pub fn is_infinite(&self) -> bool {
        match self {
            SetDescriptor::Formula(_) => true,
            SetDescriptor::Finite(_) | SetDescriptor::Truncated { .. } => false,
            SetDescriptor::Union(parts) => parts.iter().any(|p| p.is_infinite()),
        }
    }

    /// First `count` elements.
    pub fn prefix(&self, count: usize) -> Result<IntegerSet> {
        let tag = self.to_string();
        match self {
            SetDescriptor::Formula(f) => {
                let mut out: Vec<u64> = Vec::with_capacity(count);
                for n in f.start.. {
                    if out.len() == count {
                        break;
                    }
                    out.push(f.value(n)?);
                }
                IntegerSet::new(out, tag)
            }
            SetDescriptor::Finite(v) => IntegerSet::new(v[..count.min(v.len())].to_vec(), tag),
            SetDescriptor::Union(parts) => {
                let mut all = Vec::new();
                for p in parts {
                    all.extend_from_slice(p.prefix(count)?.elements());
                }
                let mut set = IntegerSet::from_unsorted(all, tag);
                set.elements.truncate(count);
                Ok(set)
            }
            SetDescriptor::Truncated { inner, bound } => {
                let mut set = inner.up_to(*bound)?;
                set.elements.truncate(count);
                set.tag = tag;
                Ok(set)
            }
        }
    }

    /// All elements `<= bound`.
    pub fn up_to(&self, bound: u64) -> Result<IntegerSet> {
        let tag = self.to_string();
        match self {
            SetDescriptor::Formula(f) => {
                let mut out: Vec<u64> = Vec::new();
                for n in f.start.. {
                    let v = match f.value(n) {
                        Ok(v) => v,
                        // past u64 means past any u64 bound, provided the
                        // sequence has been increasing so far
                        Err(Error::Overflow(_)) if !out.is_empty() => break,
                        Err(e) => return Err(e),
                    };
                    if let Some(&last) = out.last() {
                        if v <= last {
                            return Err(Error::NotIncreasing(out.len()));
                        }
                    }
                    if v > bound {
                        break;
                    }
                    out.push(v);
                }
                IntegerSet::new(out, tag)
            }
            SetDescriptor::Finite(v) => {
                IntegerSet::new(v.iter().copied().filter(|&x| x <= bound).collect(), tag)
            }
            SetDescriptor::Union(parts) => {
                let mut all = Vec::new();
                for p in parts {
                    all.extend_from_slice(p.up_to(bound)?.elements());
                }
                Ok(IntegerSet::from_unsorted(all, tag))
            }
            SetDescriptor::Truncated { inner, bound: b } => {
                let mut set = inner.up_to(bound.min(*b))?;
                set.tag = tag;
                Ok(set)
            }
        }
    }

    /// Residues modulo `q`, scanning at most `cap` sequence steps per
    /// closed-form component.
    pub fn residues(&self, q: u64, cap: u64) -> Result<Residues> {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus 0".into()));
        }
        match self {
            SetDescriptor::Formula(f) => {
                // eventually periodic mod q: preperiod <= q, period | lcm(q, lambda(q))
                let needed = q.saturating_add(q.saturating_mul(q));
                let steps = needed.min(cap);
                Ok(Residues {
                    modulus: q,
                    values: f.residue_scan(q, steps).collect(),
                    exact: steps == needed,
                })
            }
            SetDescriptor::Finite(v) => Ok(Residues {
                modulus: q,
                values: v.iter().map(|x| x % q).collect(),
                exact: true,
            }),
            SetDescriptor::Union(parts) => {
                let mut values = BTreeSet::new();
                let mut exact = true;
                for p in parts {
                    let r = p.residues(q, cap)?;
                    values.extend(r.values);
                    exact &= r.exact;
                }
                Ok(Residues {
                    modulus: q,
                    values,
                    exact,
                })
            }
            SetDescriptor::Truncated { .. } => {
                let set = self.up_to(u64::MAX)?;
                Ok(Residues {
                    modulus: q,
                    values: set.elements().iter().map(|x| x % q).collect(),
                    exact: false,
                })
            }
        }
    }

    /// The set translated by `c` (elements must stay non-negative).
    pub fn shift(&self, c: i64) -> Result<SetDescriptor> {
        Ok(match self {
            SetDescriptor::Formula(f) => {
                let mut f = f.clone();
                match f.terms.iter_mut().find(|t| matches!(t, Term::Const(_))) {
                    Some(Term::Const(k)) => *k += c,
                    _ => f.terms.push(Term::Const(c)),
                }
                f.terms.retain(|t| *t != Term::Const(0));
                SetDescriptor::Formula(f)
            }
            SetDescriptor::Finite(v) => SetDescriptor::Finite(
                v.iter()
                    .map(|&x| x.checked_add_signed(c).ok_or_else(|| Error::Overflow(format!("{x}{c:+}"))))
                    .collect::<Result<_>>()?,
            ),
            SetDescriptor::Union(parts) => {
                SetDescriptor::Union(parts.iter().map(|p| p.shift(c)).collect::<Result<_>>()?)
            }
            SetDescriptor::Truncated { inner, bound } => SetDescriptor::Truncated {
                inner: Box::new(inner.shift(c)?),
                bound: bound
                    .checked_add_signed(c)
                    .ok_or_else(|| Error::Overflow("shifted bound".into()))?,
            },
        })
    }

    /// Drops the first `k` elements. Only for formulas and finite lists.
    pub fn skip(&self, k: u64) -> Result<SetDescriptor> {
        match self {
            SetDescriptor::Formula(f) => Ok(SetDescriptor::Formula(Formula {
                terms: f.terms.clone(),
                start: f.start + k,
            })),
            SetDescriptor::Finite(v) => Ok(SetDescriptor::Finite(v.iter().skip(k as usize).copied().collect())),
            _ => Err(Error::InvalidArgument(format!("cannot skip elements of `{self}`"))),
        }
    }

    /// Parses a descriptor.
    ///
    /// * aliases: `squares`, `cubes`, `pow<b>`, `odd`, `even`, `naturals`,
    ///   `factorial`
    /// * formulas: `2^n+2n-1`, `3*2^n`, `n^2+1`, `n!`, with an optional
    ///   `@k` suffix for `n >= k`
    /// * finite: `a..b`, `1,4,9`, and `{}` for the empty set
    /// * unions: `pow2|pow2+1`
    pub fn parse(text: &str) -> Result<SetDescriptor> {
        let text = text.trim();
        if text.contains('|') {
            let parts = text
                .split('|')
                .map(SetDescriptor::parse)
                .collect::<Result<Vec<_>>>()?;
            return Ok(SetDescriptor::Union(parts));
        }
        if text == "{}" {
            return Ok(SetDescriptor::Finite(Vec::new()));
        }
        if let Some((a, b)) = text.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad range `{text}`")))?;
            let b: u64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad range `{text}`")))?;
            return Ok(SetDescriptor::Finite((a..=b).collect()));
        }
        if text.contains(',') || text.chars().all(|c| c.is_ascii_digit()) && !text.is_empty() {
            let values = text
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad list `{text}`"))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SetDescriptor::finite(values));
        }
        parse_formula(text).map(SetDescriptor::Formula)
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescriptor::Formula(x) => write!(f, "{x}"),
            SetDescriptor::Finite(v) if v.is_empty() => write!(f, "{{}}"),
            SetDescriptor::Finite(v) if v.len() == 1 => write!(f, "{},", v[0]),
            SetDescriptor::Finite(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", s.join(","))
            }
            SetDescriptor::Union(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join("|"))
            }
            SetDescriptor::Truncated { inner, bound } => write!(f, "{inner} (<= {bound})"),
        }
    }
}

fn expand_aliases(text: &str) -> String {
    let mut s = text.replace(' ', "");
    for (alias, expr) in [
        ("squares", "n^2"),
        ("cubes", "n^3"),
        ("naturals", "n"),
        ("factorial", "n!"),
        ("odd", "2n-1"),
        ("even", "2n"),
    ] {
        s = s.replace(alias, expr);
    }
    // pow<b> -> b^n
    while let Some(i) = s.find("pow") {
        let digits: String = s[i + 3..].chars().take_while(|c| c.is_ascii_digit()).collect();
        let replacement = format!("{digits}^n");
        s.replace_range(i..i + 3 + digits.len(), &replacement);
    }
    s
}

fn parse_formula(text: &str) -> Result<Formula> {
    let bad = || Error::Parse(format!("bad set descriptor `{text}`"));
    let expanded = expand_aliases(text);
    let (body, start) = match expanded.split_once('@') {
        Some((b, s)) => (b.to_string(), s.parse::<u64>().map_err(|_| bad())?),
        None => (expanded.clone(), 1),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let mut terms: Vec<Term> = Vec::new();
    let mut sign = 1i64;
    let mut current = String::new();
    let mut flush = |current: &mut String, sign: i64| -> Result<()> {
        if current.is_empty() {
            return Err(bad());
        }
        let t = parse_term(current, sign).ok_or_else(bad)?;
        terms.push(t);
        current.clear();
        Ok(())
    };
    for (i, c) in body.chars().enumerate() {
        match c {
            '+' | '-' if i > 0 => {
                flush(&mut current, sign)?;
                sign = if c == '-' { -1 } else { 1 };
            }
            '-' => sign = -1,
            _ => current.push(c),
        }
    }
    flush(&mut current, sign)?;
    // fold constants together
    let konst: i64 = terms
        .iter()
        .filter_map(|t| if let Term::Const(c) = t { Some(*c) } else { None })
        .sum();
    terms.retain(|t| !matches!(t, Term::Const(_)));
    if konst != 0 {
        terms.push(Term::Const(konst));
    }
    Ok(Formula { terms, start })
}

fn parse_term(t: &str, sign: i64) -> Option<Term> {
    let digits: String = t.chars().take_while(|c| c.is_ascii_digit()).collect();
    let rest = &t[digits.len()..];
    if rest.is_empty() {
        return Some(Term::Const(sign * digits.parse::<i64>().ok()?));
    }
    if rest == "^n" {
        return Some(Term::Geometric {
            coeff: sign,
            base: digits.parse().ok()?,
        });
    }
    let coeff = if digits.is_empty() { 1 } else { digits.parse::<i64>().ok()? } * sign;
    let atom = rest.strip_prefix('*').unwrap_or(rest);
    if digits.is_empty() && rest.starts_with('*') {
        return None;
    }
    match atom {
        "n" => Some(Term::Monomial { coeff, exp: 1 }),
        "n!" => Some(Term::Factorial { coeff }),
        _ => {
            if let Some(e) = atom.strip_prefix("n^") {
                return Some(Term::Monomial {
                    coeff,
                    exp: e.parse().ok()?,
                });
            }
            let base = atom.strip_suffix("^n")?;
            Some(Term::Geometric {
                coeff,
                base: base.parse().ok()?,
            })
        }
    }
}
