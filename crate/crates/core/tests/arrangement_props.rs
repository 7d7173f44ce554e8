mod common;

use common::{random_arrangement, x_vars};
use nilsep::arrangement::{count_regions_1d, count_regions_grid, isolate_roots, region_bound, Arrangement, RationalBox};
use nilsep::malcev::registry;
use nilsep::poly::Polynomial;
use nilsep::rational::{int, ratio};
use nilsep::IntegerSet;
use num::BigUint;

#[test]
fn grid_and_exact_counts_agree_on_random_univariate_arrangements() {
    let mut rng = common::rng(2024);
    let (lo, hi) = (int(-4), int(4));
    for _ in 0..50 {
        let (polys, roots) = random_arrangement(&mut rng);
        let oracle = roots.len() as u64 + 1;
        let exact = count_regions_1d(&polys, &lo, &hi).unwrap();
        assert_eq!(exact.region_count, oracle);
        let arr = Arrangement::from_polys(polys, RationalBox::cube(1, lo.clone(), hi.clone())).unwrap();
        let grid = count_regions_grid(&arr, 801, &ratio(1, 10_000)).unwrap();
        assert_eq!(grid.region_count, oracle);
    }
}

#[test]
fn isolating_intervals_contain_the_roots() {
    let mut rng = common::rng(11);
    for _ in 0..30 {
        let (polys, roots) = random_arrangement(&mut rng);
        let iv = isolate_roots(&polys, &int(-4), &int(4)).unwrap();
        assert_eq!(iv.len(), roots.len());
        for ((a, b), r) in iv.iter().zip(&roots) {
            assert!(a <= r && r <= b, "{r} not in [{a}, {b}]");
        }
    }
}

#[test]
fn irrational_roots_are_counted() {
    let p = Polynomial::parse_infix(x_vars(), "x^2 - 2").unwrap();
    let q = Polynomial::parse_infix(x_vars(), "x^3 - 3*x + 1").unwrap();
    assert_eq!(count_regions_1d(std::slice::from_ref(&p), &int(-2), &int(2)).unwrap().region_count, 3);
    assert_eq!(count_regions_1d(&[p, q], &int(-2), &int(2)).unwrap().region_count, 6);
}

#[test]
fn doubling_resolution_does_not_decrease_count() {
    let vars = vec!["x".to_string(), "y".to_string()];
    let cases = ["x*y", "x^2 + y^2 - 1", "x^2 - y - 1", "x - y"];
    for text in cases {
        let p = Polynomial::parse_infix(vars.clone(), text).unwrap();
        let arr = Arrangement::from_polys(vec![p], RationalBox::cube(2, int(-2), int(2))).unwrap();
        let mut last = 0;
        for res in [41, 81, 161] {
            let c = count_regions_grid(&arr, res, &ratio(1, 1000)).unwrap().region_count;
            assert!(c >= last, "{text}: {c} < {last} at {res}");
            last = c;
        }
    }
}

#[test]
fn planar_instances_with_known_counts() {
    let vars = vec!["x".to_string(), "y".to_string()];
    let p = |t: &str| Polynomial::parse_infix(vars.clone(), t).unwrap();
    let bx = RationalBox::cube(2, int(-3), int(3));
    let count = |polys: Vec<Polynomial>| {
        count_regions_grid(&Arrangement::from_polys(polys, bx.clone()).unwrap(), 301, &ratio(1, 1000))
            .unwrap()
            .region_count
    };
    assert_eq!(count(vec![p("x*y")]), 4);
    assert_eq!(count(vec![p("x^2 + y^2 - 1")]), 2);
    assert_eq!(count(vec![p("x"), p("y"), p("x - y")]), 6);
    assert_eq!(count(vec![p("x^2 - y^2 - 1"), p("4*x^2 - y^2 - 16")]), 9);
}

#[test]
fn region_bound_values() {
    assert_eq!(region_bound(2, 2, 2), BigUint::from(64u32));
    assert_eq!(region_bound(1, 3, 1), BigUint::from(6u32));
    assert_eq!(region_bound(4, 10, 3), BigUint::from(512_000u32));
}

#[test]
fn separability_census_on_the_circle() {
    let g = registry::abelian(1);
    let r = IntegerSet::new(vec![1, 2], "R").unwrap();
    // d(x, 2x) = ||x|| on [-1, 1]; >= 1/4 on two intervals, < 1/4 on three.
    let c = nilsep::arrangement::separability_equation_census(&g, &r, &int(1), &ratio(1, 4), 801, &ratio(1, 10_000))
        .unwrap();
    assert_eq!(c.region_count, 5);
}
