mod common;

use nilsep::malcev::registry;
use nilsep::orbit::{
    cluster_components, cluster_points, is_eps_separable, min_pair_distance, orbit, recurrence_gap, reduce,
    torus_distance, z_growth_exponents, z_vector,
};
use nilsep::rational::{circle_norm, int, ratio, Rational};
use nilsep::{GroupElement, IntegerSet, ManifoldPoint, NilGroup};
use num::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

fn in_unit_cube(x: &GroupElement) -> bool {
    x.0.iter().all(|c| !c.is_negative() && *c < Rational::one())
}

/// Every `z' = z + e` with `e` in `{-1,0,1}^m \ {0}` lands outside the cube.
fn z_is_locally_unique(g: &NilGroup, x: &GroupElement, z: &[Rational]) -> bool {
    let m = z.len();
    (0..3usize.pow(m as u32)).filter(|&code| code != (3usize.pow(m as u32) - 1) / 2).all(|mut code| {
        let shifted: Vec<Rational> = z
            .iter()
            .map(|zi| {
                let e = (code % 3) as i64 - 1;
                code /= 3;
                zi + int(e)
            })
            .collect();
        !in_unit_cube(&g.multiply(x, &GroupElement(shifted)).unwrap())
    })
}

fn point_strategy(m: usize) -> impl Strategy<Value = ManifoldPoint> {
    proptest::collection::vec((0i64..48).prop_map(|p| ratio(p, 48)), m).prop_map(|v| ManifoldPoint::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reduction_lands_in_cube_and_z_is_unique(idx in 0usize..5, seed in any::<u64>()) {
        let g = &registry::all()[idx];
        let mut r = common::rng(seed);
        let x = common::element(&mut r, g.dim(), 200, 17);
        let z = z_vector(g, &x).unwrap().to_element();
        let xz = g.multiply(&x, &z).unwrap();
        prop_assert!(in_unit_cube(&xz));
        prop_assert_eq!(&reduce(g, &x).unwrap().0, &xz.0);
        prop_assert!(z_is_locally_unique(g, &x, &z.0));
    }

    #[test]
    fn reduction_is_invariant_under_lattice(idx in 0usize..5, seed in any::<u64>()) {
        let g = &registry::all()[idx];
        let mut r = common::rng(seed);
        let x = common::element(&mut r, g.dim(), 50, 9);
        let gamma = GroupElement((0..g.dim()).map(|_| int(r.gen_range(-4..=4))).collect());
        let moved = g.multiply(&x, &gamma).unwrap();
        prop_assert_eq!(reduce(g, &moved).unwrap(), reduce(g, &x).unwrap());
    }

    #[test]
    fn left_multiplication_commutes_with_reduction(idx in 0usize..5, seed in any::<u64>()) {
        let g = &registry::all()[idx];
        let mut r = common::rng(seed);
        let (a, y) = (common::element(&mut r, g.dim(), 30, 11), common::element(&mut r, g.dim(), 30, 11));
        let ry = GroupElement(reduce(g, &y).unwrap().0);
        prop_assert_eq!(
            reduce(g, &g.multiply(&a, &ry).unwrap()).unwrap(),
            reduce(g, &g.multiply(&a, &y).unwrap()).unwrap()
        );
    }

    #[test]
    fn metric_axioms(p in point_strategy(3), q in point_strategy(3), s in point_strategy(3)) {
        let d = |a: &ManifoldPoint, b: &ManifoldPoint| torus_distance(a, b).unwrap();
        prop_assert!(d(&p, &q) >= Rational::zero());
        prop_assert!(d(&p, &q) <= ratio(1, 2));
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert_eq!(d(&p, &p), Rational::zero());
        prop_assert_eq!(d(&p, &q).is_zero(), p == q);
        prop_assert!(d(&p, &s) <= d(&p, &q) + d(&q, &s));
    }

    #[test]
    fn orbit_matches_direct_powers(idx in 0usize..5, seed in any::<u64>()) {
        let g = &registry::all()[idx];
        let mut r = common::rng(seed);
        let x = common::element(&mut r, g.dim(), 20, 13);
        let base = common::element(&mut r, g.dim(), 20, 13);
        let set = IntegerSet::from_unsorted((0..8).map(|_| r.gen_range(0..200u64)).collect(), "rand");
        let o = orbit(g, &x, &base, &set).unwrap();
        for (a, p) in o.exponents.iter().zip(&o.points) {
            let direct = reduce(g, &g.multiply(&g.power_iter(&x, *a).unwrap(), &base).unwrap()).unwrap();
            prop_assert_eq!(p, &direct);
        }
    }

    #[test]
    fn clustering_matches_separability(idx in 0usize..5, seed in any::<u64>()) {
        let g = &registry::all()[idx];
        let mut r = common::rng(seed);
        let x = common::element(&mut r, g.dim(), 12, 7);
        let size = r.gen_range(1..=8usize);
        let set = IntegerSet::from_unsorted((0..size).map(|_| r.gen_range(1..60u64)).collect(), "rand");
        let eps = ratio(r.gen_range(1..=8), 16);
        let blocks = cluster_components(&orbit(g, &x, &g.identity(), &set).unwrap(), &eps);
        let n = set.len();
        for mask in 0u32..(1 << n) {
            let (inside, outside): (Vec<u64>, Vec<u64>) = (0..n)
                .map(|i| (mask >> i & 1 == 1, set.elements()[i]))
                .fold((vec![], vec![]), |(mut a, mut b), (bit, v)| {
                    if bit { a.push(v) } else { b.push(v) }
                    (a, b)
                });
            let union_of_blocks = blocks.iter().all(|b| b.iter().all(|v| inside.contains(v)) || b.iter().all(|v| outside.contains(v)));
            let a = IntegerSet::new(inside, "A").unwrap();
            let b = IntegerSet::new(outside, "B").unwrap();
            prop_assert_eq!(union_of_blocks, is_eps_separable(g, &x, &a, &b, &eps).unwrap());
        }
    }
}

#[test]
fn clustering_is_single_linkage() {
    let p = |v: &[i64]| ManifoldPoint::new(v.iter().map(|&c| ratio(c, 20)).collect()).unwrap();
    // 0 and 19/20 are neighbors across the wrap.
    let pts = vec![p(&[0]), p(&[3]), p(&[19]), p(&[10]), p(&[12])];
    assert_eq!(cluster_points(&pts, &ratio(1, 8)), vec![vec![0, 2], vec![1], vec![3, 4]]);
    assert_eq!(cluster_points(&pts, &ratio(1, 20)), vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
    assert_eq!(cluster_points(&pts, &ratio(1, 2)).len(), 1);
}

#[test]
fn min_pair_distance_brute_force() {
    let g = registry::heisenberg();
    let x = GroupElement(vec![ratio(1, 3), ratio(2, 7), ratio(1, 5)]);
    let a = IntegerSet::new(vec![1, 4, 9, 16], "A").unwrap();
    let b = IntegerSet::new(vec![2, 3, 5, 7, 11], "B").unwrap();
    let oa = orbit(&g, &x, &g.identity(), &a).unwrap();
    let ob = orbit(&g, &x, &g.identity(), &b).unwrap();
    let mut best: Option<Rational> = None;
    for i in a.elements() {
        for j in b.elements() {
            let pi = reduce(&g, &g.power_iter(&x, *i).unwrap()).unwrap();
            let pj = reduce(&g, &g.power_iter(&x, *j).unwrap()).unwrap();
            let d = pi.0.iter().zip(&pj.0).map(|(u, v)| circle_norm(&(u - v))).max().unwrap();
            best = Some(best.map_or(d.clone(), |b: Rational| b.min(d)));
        }
    }
    assert_eq!(min_pair_distance(&oa, &ob).unwrap(), best.unwrap());
}

#[test]
fn recurrence_gap_of_rational_rotation() {
    let g = registry::abelian(1);
    let x = GroupElement(vec![ratio(1, 5)]);
    let r = IntegerSet::new(vec![1, 2, 3, 4], "R").unwrap();
    assert_eq!(recurrence_gap(&g, &x, &r).unwrap(), ratio(1, 5));
    let r5 = IntegerSet::new(vec![1, 5], "R").unwrap();
    assert!(recurrence_gap(&g, &x, &r5).unwrap().is_zero());
}

/// Least-squares slope of `log max|z(n x)|` against `log n` stays below `c2`.
#[test]
fn z_growth_is_polynomial() {
    for g in [registry::heisenberg(), registry::filiform()] {
        let (_, c2) = z_growth_exponents(&g);
        let mut r = common::rng(7);
        let xs: Vec<GroupElement> = (0..20).map(|_| common::element(&mut r, g.dim(), 10, 10)).collect();
        let ns: Vec<u64> = (3..=9).map(|k| 1u64 << k).collect();
        let points: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n| {
                let worst = xs
                    .iter()
                    .map(|x| {
                        let y = GroupElement(x.0.iter().map(|c| c * int(n as i64)).collect());
                        let z = z_vector(&g, &y).unwrap();
                        nilsep::rational::to_f64(&Rational::from_integer(z.max_abs()))
                    })
                    .fold(1.0f64, f64::max);
                ((n as f64).ln(), worst.ln())
            })
            .collect();
        let k = points.len() as f64;
        let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / k, sy / k);
        let slope = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
        assert!(slope <= c2 as f64, "{} slope {slope}", g.id());
    }
}
