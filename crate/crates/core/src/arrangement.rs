//! Regions cut out by the zero sets of finitely many real polynomials.
//!
//! Two counters: an exact one for univariate arrangements (square-free
//! reduction plus Sturm sequences), and a grid counter for any dimension
//! that labels grid points by their sign vector, drops points within a
//! guard `delta` of some zero set, and counts axis-connected components.

use std::collections::VecDeque;

use num::{BigUint, One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::malcev::{GroupElement, NilGroup};
use crate::orbit;
use crate::poly::Polynomial;
use crate::rational::{self, Rational};
use crate::sets::IntegerSet;

/// Axis-aligned box `prod [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalBox(#[serde(serialize_with = "serialize_box")] pub Vec<(Rational, Rational)>);

fn serialize_box<S: serde::Serializer>(b: &[(Rational, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(b.len()))?;
    for (lo, hi) in b {
        seq.serialize_element(&[lo.to_string(), hi.to_string()])?;
    }
    seq.end()
}

impl RationalBox {
    pub fn cube(m: usize, lo: Rational, hi: Rational) -> Self {
        RationalBox(vec![(lo, hi); m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Grid coordinate `lo + (hi - lo) j / (res - 1)`.
    pub fn grid_coord(&self, axis: usize, j: usize, res: usize) -> Rational {
        let (lo, hi) = &self.0[axis];
        lo + (hi - lo) * Rational::new((j as i64).into(), ((res - 1) as i64).into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    pub polys: Vec<Polynomial>,
    pub degree_bound: u32,
    pub bounds: RationalBox,
}

impl Arrangement {
    pub fn new(polys: Vec<Polynomial>, degree_bound: u32, bounds: RationalBox) -> Result<Self> {
        let m = bounds.dim();
        if m == 0 || bounds.0.iter().any(|(lo, hi)| lo >= hi) {
            return Err(Error::InvalidArrangement("empty box".into()));
        }
        for p in &polys {
            if p.nvars() != m {
                return Err(Error::InvalidArrangement(format!("`{p}` has {} variables, box has {m}", p.nvars())));
            }
            if p.degree() > degree_bound {
                return Err(Error::InvalidArrangement(format!(
                    "`{p}` has degree {} > {degree_bound}",
                    p.degree()
                )));
            }
            if p.is_zero() {
                return Err(Error::InvalidArrangement("zero polynomial".into()));
            }
        }
        Ok(Arrangement {
            polys,
            degree_bound,
            bounds,
        })
    }

    /// Uses the largest total degree as the bound.
    pub fn from_polys(polys: Vec<Polynomial>, bounds: RationalBox) -> Result<Self> {
        let b = polys.iter().map(|p| p.degree()).max().unwrap_or(1).max(1);
        Arrangement::new(polys, b, bounds)
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bound(&self) -> BigUint {
        region_bound(self.degree_bound as u64, self.polys.len() as u64, self.dim() as u32)
    }
}

/// `(2 b l)^m`.
pub fn region_bound(b: u64, l: u64, m: u32) -> BigUint {
    num::pow(BigUint::from(2 * b * l), m as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMethod {
    Grid,
    Exact1d,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionCensus {
    pub region_count: u64,
    pub method: CensusMethod,
    pub resolution: usize,
    #[serde(with = "rational::serde_str")]
    pub guard: Rational,
}

// ---------------------------------------------------------------------------
// exact univariate counting

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dense(Vec<Rational>);

impl Dense {
    fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Dense(c)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Dense {
        Dense::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    fn mul(&self, other: &Dense) -> Dense {
        if self.is_zero() || other.is_zero() {
            return Dense(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Dense::new(out)
    }

    fn div_rem(&self, d: &Dense) -> (Dense, Dense) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0.last().expect("nonzero").clone();
        if r.len() < d.0.len() {
            return (Dense(Vec::new()), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            for (j, dj) in d.0.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Dense::new(q), Dense::new(r))
    }

    fn monic(&self) -> Dense {
        let lead = self.0.last().expect("nonzero").clone();
        Dense(self.0.iter().map(|c| c / &lead).collect())
    }

    fn gcd(&self, other: &Dense) -> Dense {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn square_free(&self) -> Dense {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }
}

struct Sturm(Vec<Dense>);

impl Sturm {
    fn new(p: &Dense) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(Dense(r.0.iter().map(|c| -c).collect()));
        }
        seq.pop();
        Sturm(seq)
    }

    fn variations(&self, x: &Rational) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .map(|p| p.eval(x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Disjoint rational brackets `(a, b]`, each holding exactly one distinct
/// real root of the arrangement, in increasing order.
pub fn isolate_roots(polys: &[Polynomial], lo: &Rational, hi: &Rational) -> Result<Vec<(Rational, Rational)>> {
    let mut product = Dense(vec![Rational::one()]);
    for p in polys {
        if p.nvars() != 1 {
            return Err(Error::InvalidArrangement(format!("`{p}` is not univariate")));
        }
        let d = Dense::new(p.univariate_coeffs());
        if d.is_zero() {
            return Err(Error::InvalidArrangement("zero polynomial".into()));
        }
        product = product.mul(&d);
    }
    if lo >= hi {
        return Err(Error::InvalidArrangement("empty interval".into()));
    }
    if product.degree() == 0 {
        return Ok(Vec::new());
    }
    let sf = product.square_free();
    for end in [lo, hi] {
        if sf.eval(end).is_zero() {
            return Err(Error::RootIsolationFailed(end.to_string()));
        }
    }
    let sturm = Sturm::new(&sf);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let mid = (&a + &b) / rational::int(2);
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Exact number of open intervals into which the distinct real roots of the
/// polynomials cut `[lo, hi]`.
pub fn count_regions_1d(polys: &[Polynomial], lo: &Rational, hi: &Rational) -> Result<RegionCensus> {
    let roots = isolate_roots(polys, lo, hi)?;
    Ok(RegionCensus {
        region_count: roots.len() as u64 + 1,
        method: CensusMethod::Exact1d,
        resolution: 0,
        guard: Rational::zero(),
    })
}

// ---------------------------------------------------------------------------
// grid counting

/// Sign vector of one grid point, `None` on the guarded boundary. Bit `i`
/// set means indicator `i` is positive.
type Label = Option<u64>;

fn grid_size(m: usize, resolution: usize) -> Result<usize> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} < 8")));
    }
    (0..m)
        .try_fold(1usize, |acc, _| acc.checked_mul(resolution))
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::InvalidArgument(format!("grid {resolution}^{m} is too large")))
}

fn unflatten(mut idx: usize, m: usize, res: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = idx % res;
        idx /= res;
    }
    out
}

/// Axis-connected components of equal, non-boundary labels.
fn count_components(m: usize, res: usize, labels: &[Label]) -> Result<u64> {
    if labels.iter().all(|l| l.is_none()) {
        return Err(Error::AllPointsBoundary);
    }
    let strides: Vec<usize> = (0..m).map(|a| res.pow((m - 1 - a) as u32)).collect();
    let mut seen = vec![false; labels.len()];
    let mut count = 0u64;
    let mut queue = VecDeque::new();
    for start in 0..labels.len() {
        if seen[start] || labels[start].is_none() {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let coords = unflatten(i, m, res);
            for (axis, &stride) in strides.iter().enumerate() {
                let mut neighbors = [None, None];
                if coords[axis] > 0 {
                    neighbors[0] = Some(i - stride);
                }
                if coords[axis] + 1 < res {
                    neighbors[1] = Some(i + stride);
                }
                for j in neighbors.into_iter().flatten() {
                    if !seen[j] && labels[j] == labels[i] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Polynomial compiled for fast floating-point evaluation.
struct Compiled(Vec<(f64, Vec<i32>)>);

impl Compiled {
    fn new(p: &Polynomial) -> Self {
        Compiled(
            p.terms()
                .map(|(mono, c)| (rational::to_f64(c), mono.iter().map(|&e| e as i32).collect()))
                .collect(),
        )
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, &v)| acc * v.powi(k)))
            .sum()
    }
}

/// Sign-vector component count on a `resolution^m` grid over the box.
///
/// Polynomial values are computed in `f64` at grid points that are exact
/// rationals rounded once; points with `|p| < guard` for some `p` are
/// dropped, so rounding can only matter within the guard band.
pub fn count_regions_grid(arr: &Arrangement, resolution: usize, guard: &Rational) -> Result<RegionCensus> {
    if !guard.is_positive() {
        return Err(Error::InvalidArgument("guard must be positive".into()));
    }
    if arr.polys.len() > 64 {
        return Err(Error::InvalidArrangement("more than 64 polynomials".into()));
    }
    let m = arr.dim();
    let size = grid_size(m, resolution)?;
    let axes: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            (0..resolution)
                .map(|j| rational::to_f64(&arr.bounds.grid_coord(a, j, resolution)))
                .collect()
        })
        .collect();
    let compiled: Vec<Compiled> = arr.polys.iter().map(Compiled::new).collect();
    let delta = rational::to_f64(guard);
    let labels: Vec<Label> = (0..size)
        .into_par_iter()
        .map(|idx| {
            let x: Vec<f64> = unflatten(idx, m, resolution)
                .iter()
                .enumerate()
                .map(|(a, &j)| axes[a][j])
                .collect();
            let mut bits = 0u64;
            for (i, p) in compiled.iter().enumerate() {
                let v = p.eval(&x);
                if v.abs() < delta {
                    return None;
                }
                if v > 0.0 {
                    bits |= 1 << i;
                }
            }
            Some(bits)
        })
        .collect();
    Ok(RegionCensus {
        region_count: count_components(m, resolution, &labels)?,
        method: CensusMethod::Grid,
        resolution,
        guard: guard.clone(),
    })
}

/// Census plus the stability reruns: resolution `2 res - 1` (a refinement
/// of the same grid) and guard `delta / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub polys: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: RationalBox,
    pub resolution: usize,
    #[serde(with = "rational::serde_str")]
    pub guard: Rational,
    pub count: u64,
    pub refined_count: u64,
    pub half_guard_count: u64,
    pub stable: bool,
    pub bound: String,
    pub within_bound: bool,
}

pub fn census_report(arr: &Arrangement, resolution: usize, guard: &Rational) -> Result<CensusReport> {
    let base = count_regions_grid(arr, resolution, guard)?;
    let refined = count_regions_grid(arr, 2 * resolution - 1, guard)?;
    let half = count_regions_grid(arr, resolution, &(guard / rational::int(2)))?;
    let bound = arr.bound();
    let count = base.region_count;
    Ok(CensusReport {
        polys: arr.polys.iter().map(|p| p.to_string()).collect(),
        bounds: arr.bounds.clone(),
        resolution,
        guard: guard.clone(),
        count,
        refined_count: refined.region_count,
        half_guard_count: half.region_count,
        stable: count == refined.region_count && count == half.region_count,
        within_bound: BigUint::from(count) < bound,
        bound: bound.to_string(),
    })
}

/// Regions of `[-M, M]^m` on which every pairwise indicator
/// `d(g^a 1_X, g^b 1_X) - eps` (`a < b` in `R`) keeps a constant sign.
///
/// The indicators are evaluated exactly at rational grid points; a point is
/// boundary when some indicator has absolute value `< guard`, or is zero.
pub fn separability_equation_census(
    group: &NilGroup,
    r: &IntegerSet,
    big_m: &Rational,
    eps: &Rational,
    resolution: usize,
    guard: &Rational,
) -> Result<RegionCensus> {
    let n = r.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if pairs.len() > 64 {
        return Err(Error::InvalidArgument(format!("|R| = {n} gives more than 64 indicators")));
    }
    let m = group.dim();
    let size = grid_size(m, resolution)?;
    let bounds = RationalBox::cube(m, -big_m.clone(), big_m.clone());
    let axes: Vec<Vec<Rational>> = (0..m)
        .map(|a| (0..resolution).map(|j| bounds.grid_coord(a, j, resolution)).collect())
        .collect();
    let base = group.identity();
    let labels: Vec<Label> = (0..size)
        .into_par_iter()
        .map(|idx| -> Result<Label> {
            let g = GroupElement(
                unflatten(idx, m, resolution)
                    .iter()
                    .enumerate()
                    .map(|(a, &j)| axes[a][j].clone())
                    .collect(),
            );
            let o = orbit::orbit(group, &g, &base, r)?;
            let mut bits = 0u64;
            for (bit, &(i, j)) in pairs.iter().enumerate() {
                let f = orbit::cube_distance(&o.points[i], &o.points[j]) - eps;
                if f.is_zero() || f.abs() < *guard {
                    return Ok(None);
                }
                if f.is_positive() {
                    bits |= 1 << bit;
                }
            }
            Ok(Some(bits))
        })
        .collect::<Result<_>>()?;
    Ok(RegionCensus {
        region_count: count_components(m, resolution, &labels)?,
        method: CensusMethod::Grid,
        resolution,
        guard: guard.clone(),
    })
}

/// Parses `lo,hi` per axis from a flat list `lo1,hi1,lo2,hi2,...`, or one
/// `lo,hi` pair repeated over `m` axes.
pub fn parse_box(text: &str, m: usize) -> Result<RationalBox> {
    let v = rational::parse_rational_list(text)?;
    let pairs: Vec<(Rational, Rational)> = match v.len() {
        2 => vec![(v[0].clone(), v[1].clone()); m],
        n if n == 2 * m => v.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect(),
        _ => return Err(Error::Parse(format!("box `{text}` needs 2 or {} values", 2 * m))),
    };
    Ok(RationalBox(pairs))
}
