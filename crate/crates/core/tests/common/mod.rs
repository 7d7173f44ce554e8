#![allow(dead_code)]

use std::collections::BTreeSet;

use nilsep::malcev::NilGroup;
use nilsep::poly::Polynomial;
use nilsep::rational::{int, ratio, Rational};
use nilsep::GroupElement;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn element(rng: &mut ChaCha8Rng, m: usize, num: i64, den: i64) -> GroupElement {
    GroupElement((0..m).map(|_| rational(rng, num, den)).collect())
}

pub fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=24).prop_map(|(p, q)| ratio(p, q))
}

pub fn element_strategy(m: usize) -> impl Strategy<Value = GroupElement> {
    proptest::collection::vec(rational_strategy(), m).prop_map(GroupElement)
}

/// Symbolic `x^n` with `x^n = x * x^{n-1}`, coordinates as polynomials in
/// `x1..xm`.
pub fn symbolic_powers(g: &NilGroup, n_max: usize) -> Vec<Vec<Polynomial>> {
    let m = g.dim();
    let vars = Polynomial::indexed_vars("x", m);
    let x: Vec<Polynomial> = (0..m).map(|i| Polynomial::var(vars.clone(), i)).collect();
    let mut out = vec![x.clone()];
    for _ in 1..n_max {
        let prev = out.last().unwrap();
        let mut next = Vec::with_capacity(m);
        for i in 0..m {
            let mut c = x[i].add(&prev[i]);
            if i > 0 {
                let images: Vec<Polynomial> = x[..i].iter().chain(prev[..i].iter()).cloned().collect();
                c = c.add(&g.structure_poly(i).compose(&images));
            }
            next.push(c);
        }
        out.push(next);
    }
    out
}

pub fn x_vars() -> Vec<String> {
    vec!["x".into()]
}

/// Product of `(x - r)` over the given roots, times an optional `x^2 + 1`.
pub fn from_roots(roots: &[Rational], scale: i64, with_quadratic: bool) -> Polynomial {
    let x = Polynomial::var(x_vars(), 0);
    let mut p = Polynomial::constant(x_vars(), int(scale));
    for r in roots {
        p = p.mul(&x.sub(&Polynomial::constant(x_vars(), r.clone())));
    }
    if with_quadratic {
        p = p.mul(&x.mul(&x).add(&Polynomial::constant(x_vars(), int(1))));
    }
    p
}

/// Random univariate arrangement together with its distinct roots.
pub fn random_arrangement(rng: &mut ChaCha8Rng) -> (Vec<Polynomial>, BTreeSet<Rational>) {
    let mut all = BTreeSet::new();
    let polys = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut roots = BTreeSet::new();
            for _ in 0..rng.gen_range(1..=3) {
                roots.insert(ratio(rng.gen_range(-24..=24), 8));
            }
            all.extend(roots.iter().cloned());
            let scale = *[-3i64, -1, 1, 2, 5].get(rng.gen_range(0..5)).unwrap();
            from_roots(&roots.into_iter().collect::<Vec<_>>(), scale, rng.gen_bool(0.3))
        })
        .collect();
    (polys, all)
}
