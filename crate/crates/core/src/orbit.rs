//! Points of `X = G / Gamma` via the fundamental domain `[0,1)^m`, the cube
//! metric, and orbits of integer sets under a nilrotation.

use std::fmt;

use num::{BigInt, Complex, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::malcev::{GroupElement, LatticeVector, NilGroup};
use crate::rational::{self, Rational};
use crate::sets::IntegerSet;

/// Representative of a point of `X` in `[0,1)^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ManifoldPoint(#[serde(with = "rational::serde_str::vec")] pub Vec<Rational>);

impl ManifoldPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| c.is_negative_or_ge_one()) {
            return Err(Error::InvalidArgument(format!("coordinate {c} is outside [0,1)")));
        }
        Ok(ManifoldPoint(coords))
    }

    pub fn origin(m: usize) -> Self {
        ManifoldPoint(vec![Rational::zero(); m])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

trait UnitInterval {
    fn is_negative_or_ge_one(&self) -> bool;
}

impl UnitInterval for Rational {
    fn is_negative_or_ge_one(&self) -> bool {
        *self < Rational::zero() || *self >= Rational::one()
    }
}

impl fmt::Display for ManifoldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", rational::format_list(&self.0))
    }
}

/// The integer vector `z` with `x * z` in `[0,1)^m`:
/// `z_i = -floor(x_i + P_{i-1}(x_{<i}, z_{<i}))`.
pub fn z_vector(group: &NilGroup, x: &GroupElement) -> Result<LatticeVector> {
    group.check_dim(x)?;
    let (z, _) = reduce_parts(group, x.coords());
    Ok(LatticeVector(z.iter().map(|v| v.to_integer()).collect()))
}

/// `x * z(x)`.
pub fn reduce(group: &NilGroup, x: &GroupElement) -> Result<ManifoldPoint> {
    group.check_dim(x)?;
    Ok(reduce_parts(group, x.coords()).1)
}

fn reduce_parts(group: &NilGroup, x: &[Rational]) -> (Vec<Rational>, ManifoldPoint) {
    let m = x.len();
    let mut z: Vec<Rational> = Vec::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let shifted = &x[i] + group.correction(i, x, &z);
        let fl = shifted.floor();
        out.push(shifted - &fl);
        z.push(-fl);
    }
    (z, ManifoldPoint(out))
}

/// `(c1, c2)` with `c1 = k^(m-1)` and `c2 = c1 * deg R`.
pub fn z_growth_exponents(group: &NilGroup) -> (u64, u64) {
    let c1 = (group.step() as u64).pow(group.dim() as u32 - 1);
    let deg_r = group.bound_polynomial().degree() as u64;
    (c1, c1 * deg_r)
}

/// `c3 = 2 c2 m^2`, the exponent in the region count for the nice-set census.
pub fn region_exponent(group: &NilGroup) -> u64 {
    let (_, c2) = z_growth_exponents(group);
    let m = group.dim() as u64;
    2 * c2 * m * m
}

/// `max_i ||p_i - q_i||` with `||.||` the distance to the nearest integer.
pub fn torus_distance(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<Rational> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(cube_distance(p, q))
}

pub(crate) fn cube_distance(p: &ManifoldPoint, q: &ManifoldPoint) -> Rational {
    p.0.iter()
        .zip(&q.0)
        .map(|(a, b)| rational::circle_norm(&(a - b)))
        .max()
        .unwrap_or_else(Rational::zero)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitTable {
    pub spec_id: String,
    pub generator: GroupElement,
    pub base: GroupElement,
    pub exponents: Vec<u64>,
    pub points: Vec<ManifoldPoint>,
}

impl OrbitTable {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("exponent");
        for i in 1..=self.dim() {
            out.push_str(&format!(",coord_{i}"));
        }
        out.push('\n');
        for (a, p) in self.exponents.iter().zip(&self.points) {
            out.push_str(&a.to_string());
            for c in p.coords() {
                out.push(',');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("orbit tables serialize")
    }

    /// Subtable restricted to the first `n` exponents.
    pub fn prefix(&self, n: usize) -> OrbitTable {
        let n = n.min(self.len());
        OrbitTable {
            spec_id: self.spec_id.clone(),
            generator: self.generator.clone(),
            base: self.base.clone(),
            exponents: self.exponents[..n].to_vec(),
            points: self.points[..n].to_vec(),
        }
    }
}

/// `reduce(g^a * base)` for every `a` in `set`.
///
/// Walks the exponents in increasing order using
/// `reduce(g^d * reduce(y)) = reduce(g^d * y)`, so only reduced points and
/// powers of `g` by consecutive gaps are ever formed.
pub fn orbit(group: &NilGroup, g: &GroupElement, base: &GroupElement, set: &IntegerSet) -> Result<OrbitTable> {
    group.check_dim(g)?;
    group.check_dim(base)?;
    let mut points = Vec::with_capacity(set.len());
    let mut current = reduce(group, base)?;
    let mut previous = 0u64;
    for &a in set.elements() {
        let step = group.pow_unchecked(g, a - previous);
        let moved = group.mul_unchecked(step.coords(), current.coords());
        current = reduce_parts(group, moved.coords()).1;
        points.push(current.clone());
        previous = a;
    }
    Ok(OrbitTable {
        spec_id: group.id().to_string(),
        generator: g.clone(),
        base: base.clone(),
        exponents: set.elements().to_vec(),
        points,
    })
}

/// Exact `min` of the distance over all pairs of points.
pub fn min_pair_distance(o1: &OrbitTable, o2: &OrbitTable) -> Result<Rational> {
    if o1.is_empty() || o2.is_empty() {
        return Err(Error::EmptyOrbit);
    }
    if o1.dim() != o2.dim() {
        return Err(Error::DimensionMismatch {
            expected: o1.dim(),
            found: o2.dim(),
        });
    }
    Ok(o1
        .points
        .iter()
        .flat_map(|p| o2.points.iter().map(move |q| cube_distance(p, q)))
        .min()
        .expect("both orbits nonempty"))
}

/// Whether `g^A` and `g^B` (from the base point `1_X`) stay at distance at
/// least `eps`. An empty side is separable from anything.
pub fn is_eps_separable(
    group: &NilGroup,
    g: &GroupElement,
    a: &IntegerSet,
    b: &IntegerSet,
    eps: &Rational,
) -> Result<bool> {
    a.ensure_disjoint(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let base = group.identity();
    let oa = orbit(group, g, &base, a)?;
    let ob = orbit(group, g, &base, b)?;
    Ok(min_pair_distance(&oa, &ob)? >= *eps)
}

/// Components of the graph joining points at distance `< eps`, as index
/// blocks sorted by least member.
pub fn cluster_points(points: &[ManifoldPoint], eps: &Rational) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if cube_distance(&points[i], &points[j]) < *eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match slot[r] {
            Some(b) => blocks[b].push(i),
            None => {
                slot[r] = Some(blocks.len());
                blocks.push(vec![i]);
            }
        }
    }
    blocks
}

/// [`cluster_points`] on an orbit, reported as blocks of exponents.
pub fn cluster_components(o: &OrbitTable, eps: &Rational) -> Vec<Vec<u64>> {
    let mut blocks: Vec<Vec<u64>> = cluster_points(&o.points, eps)
        .into_iter()
        .map(|b| {
            let mut e: Vec<u64> = b.into_iter().map(|i| o.exponents[i]).collect();
            e.sort_unstable();
            e
        })
        .collect();
    blocks.sort();
    blocks
}

/// `min_{r in R} d(g^r 1_X, 1_X)` over the given finite truncation.
pub fn recurrence_gap(group: &NilGroup, g: &GroupElement, r: &IntegerSet) -> Result<Rational> {
    let o = orbit(group, g, &group.identity(), r)?;
    let origin = ManifoldPoint::origin(group.dim());
    o.points
        .iter()
        .map(|p| cube_distance(p, &origin))
        .min()
        .ok_or(Error::EmptyOrbit)
}

/// Character observable `F(x) = exp(2 pi i <w, x>)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionDescriptor {
    pub frequency: Vec<i64>,
}

/// Exact phase `<w, reduce(g^n * base)> mod 1`.
pub fn nilsequence_phase(
    group: &NilGroup,
    g: &GroupElement,
    base: &GroupElement,
    f: &FunctionDescriptor,
    n: u64,
) -> Result<Rational> {
    group.check_dim(g)?;
    group.check_dim(base)?;
    if f.frequency.len() != group.dim() {
        return Err(Error::DimensionMismatch {
            expected: group.dim(),
            found: f.frequency.len(),
        });
    }
    let gn = group.pow_unchecked(g, n);
    let x = group.mul_unchecked(gn.coords(), base.coords());
    let p = reduce_parts(group, x.coords()).1;
    let phase = p
        .coords()
        .iter()
        .zip(&f.frequency)
        .fold(Rational::zero(), |acc, (c, &w)| acc + c * BigInt::from(w));
    Ok(rational::frac(&phase))
}

/// `F(g^n x)`; the only floating-point value in the crate.
pub fn nilsequence_eval(
    group: &NilGroup,
    g: &GroupElement,
    base: &GroupElement,
    f: &FunctionDescriptor,
    n: u64,
) -> Result<Complex<f64>> {
    let phase = nilsequence_phase(group, g, base, f, n)?;
    let theta = 2.0 * std::f64::consts::PI * rational::to_f64(&phase);
    Ok(Complex::from_polar(1.0, theta))
}

/// Fixed 12-digit rendering used in reports.
pub fn format_complex(z: Complex<f64>) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    format!("{:.12}{:+.12}i", clean(z.re), clean(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malcev::registry;
    use crate::rational::{int, ratio};

    fn el(text: &str) -> GroupElement {
        GroupElement::parse(text).unwrap()
    }

    fn pt(text: &str) -> ManifoldPoint {
        ManifoldPoint::new(rational::parse_rational_list(text).unwrap()).unwrap()
    }

    fn set(v: &[u64]) -> IntegerSet {
        IntegerSet::new(v.to_vec(), "custom").unwrap()
    }

    #[test]
    fn heisenberg_reduction() {
        let h = registry::heisenberg();
        let x = el("3/2,3/10,-1/5");
        let z = z_vector(&h, &x).unwrap();
        assert_eq!(z.0, vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)]);
        assert_eq!(reduce(&h, &x).unwrap(), pt("1/2,3/10,4/5"));
        assert_eq!(h.multiply(&x, &z.to_element()).unwrap().0, pt("1/2,3/10,4/5").0);
        assert_eq!(reduce(&h, &h.identity()).unwrap(), ManifoldPoint::origin(3));
    }

    #[test]
    fn abelian_reduction() {
        let a = registry::abelian(1);
        assert_eq!(z_vector(&a, &el("-1/4")).unwrap().0, vec![BigInt::from(1)]);
        assert_eq!(reduce(&a, &el("-1/4")).unwrap(), pt("3/4"));
        let inside = el("1/3");
        assert_eq!(z_vector(&a, &inside).unwrap().0, vec![BigInt::from(0)]);
    }

    #[test]
    fn growth_exponents() {
        assert_eq!(z_growth_exponents(&registry::abelian(1)), (1, 1));
        assert_eq!(z_growth_exponents(&registry::heisenberg()), (4, 16));
        assert_eq!(region_exponent(&registry::heisenberg()), 288);
        assert_eq!(z_growth_exponents(&registry::filiform()).0, 27);
    }

    #[test]
    fn distances() {
        assert_eq!(torus_distance(&pt("9/10"), &pt("1/10")).unwrap(), ratio(1, 5));
        assert_eq!(torus_distance(&pt("1/4,0"), &pt("3/4,2/5")).unwrap(), ratio(1, 2));
        assert_eq!(torus_distance(&pt("1/3"), &pt("1/3")).unwrap(), int(0));
        assert!(torus_distance(&pt("0"), &pt("0,0")).is_err());
        assert!(ManifoldPoint::new(vec![int(1)]).is_err());
    }

    #[test]
    fn orbits() {
        let a = registry::abelian(1);
        let o = orbit(&a, &el("1/3"), &el("0"), &set(&[1, 2, 3])).unwrap();
        assert_eq!(o.points, vec![pt("1/3"), pt("2/3"), pt("0")]);
        let h = registry::heisenberg();
        let o = orbit(&h, &el("1/2,1/2,0"), &h.identity(), &set(&[1, 2])).unwrap();
        assert_eq!(o.points, vec![pt("1/2,1/2,0"), pt("0,0,1/4")]);
        let o = orbit(&h, &el("1/2,1/2,0"), &h.identity(), &set(&[0])).unwrap();
        assert_eq!(o.points, vec![ManifoldPoint::origin(3)]);
        assert_eq!(o.to_csv(), "exponent,coord_1,coord_2,coord_3\n0,0,0,0\n");
    }

    #[test]
    fn orbit_with_base_matches_direct_reduction() {
        let h = registry::heisenberg();
        let g = el("2/3,-7/5,1/9");
        let base = el("0,0,1/3");
        let o = orbit(&h, &g, &base, &set(&[1, 4, 9, 16, 25])).unwrap();
        for (a, p) in o.exponents.iter().zip(&o.points) {
            let direct = h.multiply(&h.power_iter(&g, *a).unwrap(), &base).unwrap();
            assert_eq!(&reduce(&h, &direct).unwrap(), p);
        }
    }

    #[test]
    fn pair_distance_and_separability() {
        let a = registry::abelian(1);
        let g = el("1/2");
        let o1 = orbit(&a, &g, &el("0"), &set(&[2, 4])).unwrap();
        let o2 = orbit(&a, &g, &el("0"), &set(&[1, 3])).unwrap();
        assert_eq!(min_pair_distance(&o1, &o2).unwrap(), ratio(1, 2));
        assert_eq!(min_pair_distance(&o1, &o1).unwrap(), int(0));
        let empty = orbit(&a, &g, &el("0"), &IntegerSet::empty()).unwrap();
        assert_eq!(min_pair_distance(&o1, &empty), Err(Error::EmptyOrbit));

        let pow2: Vec<u64> = (1..=8).map(|n| 1 << n).collect();
        let pow2p1: Vec<u64> = pow2.iter().map(|x| x + 1).collect();
        assert!(is_eps_separable(&a, &g, &set(&pow2), &set(&pow2p1), &ratio(1, 2)).unwrap());
        assert!(is_eps_separable(&a, &g, &set(&[1, 2]), &set(&[3]), &int(0)).unwrap());
        assert_eq!(
            is_eps_separable(&a, &g, &set(&[1, 2]), &set(&[2]), &int(0)),
            Err(Error::SetsNotDisjoint(2))
        );
    }

    #[test]
    fn clustering() {
        let pts = vec![pt("0"), pt("2/5"), pt("9/20")];
        assert_eq!(cluster_points(&pts, &ratio(1, 10)), vec![vec![0], vec![1, 2]]);
        assert_eq!(cluster_points(&pts, &ratio(3, 5)), vec![vec![0, 1, 2]]);
        let a = registry::abelian(1);
        let o = orbit(&a, &el("1/2"), &el("0"), &set(&[1, 2, 3, 4])).unwrap();
        assert_eq!(cluster_components(&o, &ratio(1, 4)), vec![vec![1, 3], vec![2, 4]]);
    }

    #[test]
    fn recurrence() {
        let a = registry::abelian(1);
        assert_eq!(recurrence_gap(&a, &el("1/3"), &set(&[3, 6, 9])).unwrap(), int(0));
        let odd: Vec<u64> = (0..50).map(|n| 2 * n + 1).collect();
        assert_eq!(recurrence_gap(&a, &el("1/2"), &set(&odd)).unwrap(), ratio(1, 2));
    }

    #[test]
    fn nilsequences() {
        let a = registry::abelian(1);
        let f = FunctionDescriptor { frequency: vec![1] };
        let z = nilsequence_eval(&a, &el("1/4"), &el("0"), &f, 1).unwrap();
        assert!((z - Complex::new(0.0, 1.0)).norm() < 1e-12);
        let h = registry::heisenberg();
        let f0 = FunctionDescriptor { frequency: vec![0, 0, 0] };
        let one = nilsequence_eval(&h, &el("1/3,1/5,0"), &h.identity(), &f0, 7).unwrap();
        assert_eq!(format_complex(one), "1.000000000000+0.000000000000i");
        // with g = (1, alpha, 0) the third coordinate of g^n is n(n-1)/2 alpha mod 1
        let alpha = ratio(3, 7);
        let g = GroupElement(vec![int(1), alpha.clone(), int(0)]);
        let f = FunctionDescriptor { frequency: vec![0, 0, 1] };
        for n in 1..30u64 {
            let expected = rational::frac(&(rational::int((n * (n - 1) / 2) as i64) * &alpha));
            assert_eq!(nilsequence_phase(&h, &g, &h.identity(), &f, n).unwrap(), expected);
        }
    }
}
