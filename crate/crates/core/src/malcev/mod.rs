//! Nilpotent Lie groups presented in Mal'cev coordinates.
//!
//! A group of dimension `m` is given by structure polynomials
//! `P_1, ..., P_{m-1}`, `P_i` in the variables `s1..si, t1..ti`, and the
//! product
//!
//! ```text
//! (s * t)_1 = s_1 + t_1
//! (s * t)_i = s_i + t_i + P_{i-1}(s_1..s_{i-1}, t_1..t_{i-1})
//! ```
//!
//! All arithmetic here is exact.

mod spec_file;

use std::fmt;

use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{self, Rational};

pub use spec_file::{parse_spec_text, spec_to_text};

/// Unvalidated presentation: dimension, step and structure polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilGroupSpec {
    pub id: String,
    pub m: usize,
    pub k: u32,
    /// `structure[i - 1]` is `P_i`.
    pub structure: Vec<Polynomial>,
}

/// Variables of `P_i`: `s1..si, t1..ti`.
pub fn structure_vars(i: usize) -> Vec<String> {
    let mut v = Polynomial::indexed_vars("s", i);
    v.extend(Polynomial::indexed_vars("t", i));
    v
}

impl NilGroupSpec {
    pub fn new(id: impl Into<String>, m: usize, k: u32, structure: Vec<Polynomial>) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::InvalidArgument("dimension and step must be positive".into()));
        }
        if structure.len() != m - 1 {
            return Err(Error::InvalidArgument(format!(
                "{} structure polynomials for dimension {m}",
                structure.len()
            )));
        }
        for (idx, p) in structure.iter().enumerate() {
            let i = idx + 1;
            let expected = structure_vars(i);
            if p.vars() != expected.as_slice() {
                let variable = p
                    .vars()
                    .iter()
                    .find(|v| !expected.contains(v))
                    .cloned()
                    .unwrap_or_else(|| p.vars().join(","));
                return Err(Error::BadVariable { index: i, variable });
            }
        }
        Ok(NilGroupSpec {
            id: id.into(),
            m,
            k,
            structure,
        })
    }

    /// Builds `P_i` from an infix expression in `s1..si, t1..ti`.
    pub fn poly(i: usize, text: &str) -> Result<Polynomial> {
        Polynomial::parse_infix(structure_vars(i), text)
    }
}

/// How the degree bound on the structure polynomials is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DegreePolicy {
    /// Total degree of every `P_i` at most `k - 1`.
    #[default]
    Strict,
    /// Total degree at most `k`, with degree at most `k - 1` in the `s` block
    /// and in the `t` block separately (the usual Heisenberg presentation
    /// `P_2 = s1*t2` needs this).
    AllowDegreeK,
}

/// Deterministic sample coordinates for the identity-axiom witness search.
const SAMPLE: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];
const SAMPLE_CAP: usize = 4096;

/// A presentation that passed [`validate_spec`]. Group operations live here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilGroup {
    spec: NilGroupSpec,
    degree_k_flag: bool,
}

pub fn validate_spec(spec: NilGroupSpec, policy: DegreePolicy) -> Result<NilGroup> {
    let k = spec.k;
    let mut flagged = false;
    for (idx, p) in spec.structure.iter().enumerate() {
        let i = idx + 1;
        let total = p.degree();
        let s_deg = p.degree_in(0..i);
        let t_deg = p.degree_in(i..2 * i);
        let ok = match policy {
            DegreePolicy::Strict => total < k,
            DegreePolicy::AllowDegreeK => total <= k && s_deg < k && t_deg < k,
        };
        if !ok {
            let bound = match policy {
                DegreePolicy::Strict => k - 1,
                DegreePolicy::AllowDegreeK => k,
            };
            return Err(Error::DegreeTooHigh {
                index: i,
                degree: total,
                bound,
            });
        }
        flagged |= total == k;
        check_identity_axiom(i, p)?;
    }
    Ok(NilGroup {
        spec,
        degree_k_flag: flagged,
    })
}

/// `P_i(0, t) = 0` and `P_i(s, 0) = 0`. Decided symbolically (a monomial free
/// of all `s` variables survives at `s = 0`); a witness point is then looked
/// up on the sample grid.
fn check_identity_axiom(i: usize, p: &Polynomial) -> Result<()> {
    for (block, other) in [(0..i, i..2 * i), (i..2 * i, 0..i)] {
        let survives = p
            .terms()
            .any(|(m, _)| m[block.clone()].iter().all(|&e| e == 0));
        if !survives {
            continue;
        }
        let witness = sample_points(other.len())
            .find_map(|free| {
                let mut point = vec![Rational::zero(); 2 * i];
                for (slot, v) in other.clone().zip(free) {
                    point[slot] = v;
                }
                let value = p.eval(&point);
                (!value.is_zero()).then(|| describe_point(i, &point))
            })
            .unwrap_or_else(|| {
                let (m, _) = p
                    .terms()
                    .find(|(m, _)| m[block.clone()].iter().all(|&e| e == 0))
                    .expect("surviving monomial");
                format!("monomial exponents {m:?}")
            });
        return Err(Error::IdentityAxiomViolated { index: i, witness });
    }
    Ok(())
}

fn sample_points(n: usize) -> impl Iterator<Item = Vec<Rational>> {
    let total = SAMPLE.len().saturating_pow(n as u32).min(SAMPLE_CAP);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let (p, q) = SAMPLE[code % SAMPLE.len()];
                code /= SAMPLE.len();
                rational::ratio(p, q)
            })
            .collect()
    })
}

fn describe_point(i: usize, point: &[Rational]) -> String {
    format!(
        "s=({}), t=({})",
        rational::format_list(&point[..i]),
        rational::format_list(&point[i..])
    )
}

/// Exact Mal'cev coordinates of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement(#[serde(with = "rational::serde_str::vec")] pub Vec<Rational>);

impl GroupElement {
    pub fn zero(m: usize) -> Self {
        GroupElement(vec![Rational::zero(); m])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(GroupElement(rational::parse_rational_list(text)?))
    }

    pub fn from_ints(values: &[i64]) -> Self {
        GroupElement(values.iter().map(|&v| rational::int(v)).collect())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", rational::format_list(&self.0))
    }
}

impl From<Vec<Rational>> for GroupElement {
    fn from(v: Vec<Rational>) -> Self {
        GroupElement(v)
    }
}

/// Integer point of the lattice `Z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn to_element(&self) -> GroupElement {
        GroupElement(self.0.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn max_abs(&self) -> BigInt {
        use num::Signed;
        self.0.iter().map(|z| z.abs()).max().unwrap_or_default()
    }
}

impl NilGroup {
    pub fn spec(&self) -> &NilGroupSpec {
        &self.spec
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn dim(&self) -> usize {
        self.spec.m
    }

    pub fn step(&self) -> u32 {
        self.spec.k
    }

    /// True when some `P_i` has total degree `k` (accepted only under
    /// [`DegreePolicy::AllowDegreeK`]).
    pub fn degree_k_flag(&self) -> bool {
        self.degree_k_flag
    }

    /// `P_i`, 1-based.
    pub fn structure_poly(&self, i: usize) -> &Polynomial {
        &self.spec.structure[i - 1]
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::zero(self.spec.m)
    }

    pub fn check_dim(&self, x: &GroupElement) -> Result<()> {
        if x.dim() != self.spec.m {
            return Err(Error::DimensionMismatch {
                expected: self.spec.m,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// `P_{i}(s_1..s_i, t_1..t_i)`, with `P_0 = 0`.
    pub(crate) fn correction(&self, i: usize, s: &[Rational], t: &[Rational]) -> Rational {
        if i == 0 {
            return Rational::zero();
        }
        let p = &self.spec.structure[i - 1];
        if p.is_zero() {
            return Rational::zero();
        }
        let mut point = Vec::with_capacity(2 * i);
        point.extend_from_slice(&s[..i]);
        point.extend_from_slice(&t[..i]);
        p.eval(&point)
    }

    pub fn multiply(&self, s: &GroupElement, t: &GroupElement) -> Result<GroupElement> {
        self.check_dim(s)?;
        self.check_dim(t)?;
        Ok(self.mul_unchecked(s.coords(), t.coords()))
    }

    pub(crate) fn mul_unchecked(&self, s: &[Rational], t: &[Rational]) -> GroupElement {
        GroupElement(
            (0..self.spec.m)
                .map(|i| &s[i] + &t[i] + self.correction(i, s, t))
                .collect(),
        )
    }

    /// Solves `s * y = 0` coordinate by coordinate.
    pub fn inverse(&self, s: &GroupElement) -> Result<GroupElement> {
        self.check_dim(s)?;
        let s = s.coords();
        let mut y: Vec<Rational> = Vec::with_capacity(self.spec.m);
        for i in 0..self.spec.m {
            let c = self.correction(i, s, &y);
            y.push(-&s[i] - c);
        }
        Ok(GroupElement(y))
    }

    /// `n`-fold product by repeated multiplication; `x^0` is the identity.
    pub fn power_iter(&self, x: &GroupElement, n: u64) -> Result<GroupElement> {
        self.check_dim(x)?;
        let mut acc = self.identity();
        for _ in 0..n {
            acc = self.mul_unchecked(x.coords(), acc.coords());
        }
        Ok(acc)
    }

    /// Evaluates `Q_{i,n}(x) = n x_i + sum_{j<n} P_{i-1}(x_{<i}, Q_{<i,j}(x))`
    /// numerically, one coordinate at a time.
    pub fn power_closed(&self, x: &GroupElement, n: u64) -> Result<GroupElement> {
        self.check_dim(x)?;
        if n == 0 {
            return Ok(self.identity());
        }
        let m = self.spec.m;
        let x = x.coords();
        let len = n as usize;
        // q[j - 1][l] = Q_{l+1, j}(x) for j = 1..n
        let mut q: Vec<Vec<Rational>> = vec![Vec::with_capacity(m); len];
        for i in 0..m {
            let mut running = Rational::zero();
            for j in 1..=len {
                let value = rational::int(j as i64) * &x[i] + &running;
                if j < len {
                    running += self.correction(i, x, &q[j - 1]);
                }
                q[j - 1].push(value);
            }
        }
        Ok(GroupElement(q.pop().expect("n >= 1")))
    }

    /// Square-and-multiply power; agrees with [`NilGroup::power_iter`] by
    /// associativity and is what orbit computations use.
    pub fn pow(&self, x: &GroupElement, n: u64) -> Result<GroupElement> {
        self.check_dim(x)?;
        Ok(self.pow_unchecked(x, n))
    }

    pub(crate) fn pow_unchecked(&self, x: &GroupElement, mut n: u64) -> GroupElement {
        let mut result = self.identity();
        let mut base = x.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul_unchecked(result.coords(), base.coords());
            }
            n >>= 1;
            if n > 0 {
                base = self.mul_unchecked(base.coords(), base.coords());
            }
        }
        result
    }

    /// Coefficient-wise majorant of the structure polynomials, in the ring
    /// `s1..s_{m-1}, t1..t_{m-1}`.
    pub fn majorant(&self) -> Polynomial {
        let w = self.spec.m.saturating_sub(1);
        let vars = structure_vars(w);
        let mut best: std::collections::BTreeMap<Vec<u32>, Rational> = Default::default();
        for (idx, p) in self.spec.structure.iter().enumerate() {
            let i = idx + 1;
            let map: Vec<usize> = (0..i).chain(w..w + i).collect();
            let lifted = p.relabel(vars.clone(), &map);
            for (mono, c) in lifted.terms() {
                let a = rational::abs(c);
                let slot = best.entry(mono.clone()).or_insert_with(Rational::zero);
                if a > *slot {
                    *slot = a;
                }
            }
        }
        Polynomial::from_terms(vars, best)
    }

    /// `S(x) = x + (x - 1) P(1, ..., 1, x, ..., x)` for the majorant `P`.
    pub fn growth_polynomial(&self) -> Polynomial {
        let xv = vec!["x".to_string()];
        let x = Polynomial::var(xv.clone(), 0);
        let w = self.spec.m.saturating_sub(1);
        let one = Polynomial::constant(xv.clone(), Rational::one());
        let images: Vec<Polynomial> = (0..2 * w)
            .map(|j| if j < w { one.clone() } else { x.clone() })
            .collect();
        let p_at = if w == 0 {
            Polynomial::zero(xv)
        } else {
            self.majorant().compose(&images)
        };
        x.add(&x.sub(&one).mul(&p_at))
    }

    /// `R = S o ... o S` (`m - 1` copies).
    pub fn bound_polynomial(&self) -> Polynomial {
        let s = self.growth_polynomial();
        let mut r = Polynomial::var(vec!["x".to_string()], 0);
        for _ in 1..self.spec.m {
            r = s.compose(&[r]);
        }
        r
    }

    /// `R(n)`: bounds the absolute coefficient sum of every `Q_{i,n}`.
    pub fn coeff_bound(&self, n: u64) -> Rational {
        let s = self.growth_polynomial();
        let mut value = rational::int(n as i64);
        for _ in 1..self.spec.m {
            value = s.eval(&[value]);
        }
        value
    }
}

/// Direct product: coordinates of `a` first, then those of `b`, with no
/// cross terms.
pub fn product_spec(a: &NilGroup, b: &NilGroup) -> NilGroup {
    let m1 = a.dim();
    let m2 = b.dim();
    let m = m1 + m2;
    let mut structure = Vec::with_capacity(m - 1);
    for i in 1..m {
        let vars = structure_vars(i);
        let p = if i < m1 {
            a.structure_poly(i).clone()
        } else if i == m1 {
            Polynomial::zero(vars)
        } else {
            let j = i - m1;
            // s_l -> s_{m1+l}, t_l -> t_{m1+l}
            let map: Vec<usize> = (0..j).map(|l| m1 + l).chain((0..j).map(|l| i + m1 + l)).collect();
            b.structure_poly(j).relabel(vars, &map)
        };
        structure.push(p);
    }
    let spec = NilGroupSpec {
        id: format!("{}x{}", a.id(), b.id()),
        m,
        k: a.step().max(b.step()),
        structure,
    };
    NilGroup {
        spec,
        degree_k_flag: a.degree_k_flag || b.degree_k_flag,
    }
}

/// Built-in presentations.
pub mod registry {
    use super::*;

    pub fn abelian(d: usize) -> NilGroup {
        assert!(d >= 1, "abelian group of dimension 0");
        let structure = (1..d).map(|i| Polynomial::zero(structure_vars(i))).collect();
        let spec = NilGroupSpec::new(format!("abelian{d}"), d, 1, structure).expect("abelian spec");
        validate_spec(spec, DegreePolicy::Strict).expect("abelian spec is valid")
    }

    /// `m = 3, k = 2`, `P_1 = 0`, `P_2 = s1*t2`.
    pub fn heisenberg() -> NilGroup {
        let structure = vec![
            Polynomial::zero(structure_vars(1)),
            NilGroupSpec::poly(2, "s1*t2").expect("heisenberg P_2"),
        ];
        let spec = NilGroupSpec::new("heisenberg", 3, 2, structure).expect("heisenberg spec");
        validate_spec(spec, DegreePolicy::AllowDegreeK).expect("heisenberg spec is valid")
    }

    /// `m = 4, k = 3`: `P_1 = 0`, `P_2 = s1*t2`, `P_3 = s1*t3 + s1(s1-1)/2*t2`.
    pub fn filiform() -> NilGroup {
        let structure = vec![
            Polynomial::zero(structure_vars(1)),
            NilGroupSpec::poly(2, "s1*t2").expect("filiform P_2"),
            NilGroupSpec::poly(3, "s1*t3 + 1/2*s1*(s1 - 1)*t2").expect("filiform P_3"),
        ];
        let spec = NilGroupSpec::new("filiform", 4, 3, structure).expect("filiform spec");
        validate_spec(spec, DegreePolicy::AllowDegreeK).expect("filiform spec is valid")
    }

    /// `abelian`, `abelian<d>`, `heisenberg`, `filiform`.
    pub fn lookup(name: &str) -> Option<NilGroup> {
        match name {
            "heisenberg" => Some(heisenberg()),
            "filiform" => Some(filiform()),
            "abelian" => Some(abelian(1)),
            _ => {
                let d: usize = name.strip_prefix("abelian")?.parse().ok()?;
                (d >= 1).then(|| abelian(d))
            }
        }
    }

    pub fn all() -> Vec<NilGroup> {
        vec![abelian(1), abelian(2), abelian(3), heisenberg(), filiform()]
    }
}
