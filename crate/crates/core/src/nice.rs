//! Lacunarity classification and the census of `R`-nice sets.
//!
//! For a finite `R` and a group element `g`, a subset `A` of `R` is nice
//! when `g^A 1_X` and `g^(R \ A) 1_X` are at distance at least `eps`. The
//! census samples `g` on a grid over `[-M, M]^m` and counts the distinct nice
//! sets realized by some sampled `g`. A set on which every function is a
//! nilsequence needs all `2^N` subsets of its first `N` elements to be
//! realized; for sublacunary sets the count falls short.

use std::collections::BTreeSet;

use num::{BigUint, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::malcev::{GroupElement, NilGroup};
use crate::orbit::{self, ManifoldPoint};
use crate::rational::{self, Rational};
use crate::sets::{IntegerSet, SetDescriptor};

/// Finite prefixes with every consecutive ratio at least this are treated
/// as lacunary.
pub fn lacunary_threshold() -> Rational {
    rational::ratio(5, 4)
}

/// Default cutoff for the slope of `log r_n` against `n`.
pub const SUBLACUNARY_THRESHOLD: f64 = 0.1;

/// `min r_{n+1} / r_n` over the prefix (pairs with `r_n = 0` skipped).
pub fn lacunary_ratio(e: &IntegerSet) -> Result<Rational> {
    if e.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            found: e.len(),
        });
    }
    e.elements()
        .windows(2)
        .filter(|w| w[0] > 0)
        .map(|w| rational::ratio(w[1] as i64, w[0] as i64))
        .min()
        .ok_or(Error::TooShort {
            needed: 2,
            found: e.len(),
        })
}

pub fn is_lacunary_prefix(e: &IntegerSet) -> Result<bool> {
    Ok(lacunary_ratio(e)? >= lacunary_threshold())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SublacunarityReport {
    /// `log r_N / N`
    pub end_slope: f64,
    /// Least-squares slope of `log r_n` against `n` over the second half.
    pub tail_slope: f64,
    pub threshold: f64,
    pub consistent: bool,
}

/// Slopes of `log r_n` against `n` (with `n` counted from 1).
pub fn sublacunarity_slope(e: &IntegerSet, threshold: f64) -> Result<SublacunarityReport> {
    let n = e.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, found: n });
    }
    let logs: Vec<f64> = e.elements().iter().map(|&r| (r.max(1) as f64).ln()).collect();
    let end_slope = logs[n - 1] / n as f64;
    let from = (n / 2).min(n - 2);
    let xs: Vec<f64> = (from..n).map(|i| (i + 1) as f64).collect();
    let ys = &logs[from..];
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let tail_slope = sxy / sxx;
    Ok(SublacunarityReport {
        end_slope,
        tail_slope,
        threshold,
        consistent: end_slope < threshold && tail_slope < threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub tag: String,
    pub len: usize,
    #[serde(with = "rational::serde_str")]
    pub lacunary_ratio: Rational,
    pub lacunary: bool,
    pub sublacunarity: SublacunarityReport,
}

pub fn classify(e: &IntegerSet) -> Result<Classification> {
    let ratio = lacunary_ratio(e)?;
    Ok(Classification {
        tag: e.tag().to_string(),
        len: e.len(),
        lacunary: ratio >= lacunary_threshold(),
        lacunary_ratio: ratio,
        sublacunarity: sublacunarity_slope(e, SUBLACUNARY_THRESHOLD)?,
    })
}

/// Sampling parameters of a census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusGrid {
    pub big_m: Rational,
    pub eps: Rational,
    pub resolution: usize,
}

impl CensusGrid {
    /// The points `-M + 2M j / (res - 1)`; a single point `0` when
    /// `res = 1`.
    pub fn axis(&self) -> Result<Vec<Rational>> {
        match self.resolution {
            0 => Err(Error::GridTooCoarse("resolution 0".into())),
            1 => Ok(vec![rational::int(0)]),
            res => Ok((0..res)
                .map(|j| {
                    -&self.big_m + &self.big_m * rational::ratio(2 * j as i64, (res - 1) as i64)
                })
                .collect()),
        }
    }

    pub fn points(&self, m: usize) -> Result<Vec<GroupElement>> {
        let axis = self.axis()?;
        let total = axis
            .len()
            .checked_pow(m as u32)
            .filter(|&t| t <= 1 << 24)
            .ok_or_else(|| Error::InvalidArgument("census grid too large".into()))?;
        Ok((0..total)
            .map(|mut idx| {
                let mut coords = vec![rational::int(0); m];
                for slot in coords.iter_mut().rev() {
                    *slot = axis[idx % axis.len()].clone();
                    idx /= axis.len();
                }
                GroupElement(coords)
            })
            .collect())
    }

    /// `ceil((1/eps)^m)`.
    pub fn component_cap(&self, m: usize) -> Result<u64> {
        if self.eps <= rational::int(0) {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        let v = num::pow(rational::int(1) / &self.eps, m);
        v.ceil()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Overflow("component cap".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NiceCensus {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    #[serde(rename = "M", with = "rational::serde_str")]
    pub big_m: Rational,
    pub resolution: usize,
    pub sampled: usize,
    pub realized_nice_sets: u64,
    pub realized_partitions: u64,
    pub component_cap: u64,
    pub max_components: usize,
}

/// Partition of `0..N` as block bitmasks, blocks ordered by least member.
type Partition = Vec<u64>;

fn partition_of(points: &[ManifoldPoint], eps: &Rational) -> Partition {
    orbit::cluster_points(points, eps)
        .into_iter()
        .map(|b| b.into_iter().fold(0u64, |acc, i| acc | 1 << i))
        .collect()
}

/// All unions of blocks.
fn unions(partition: &Partition) -> impl Iterator<Item = u64> + '_ {
    (0u64..1 << partition.len()).map(move |choice| {
        partition
            .iter()
            .enumerate()
            .filter(|(b, _)| choice >> b & 1 == 1)
            .fold(0u64, |acc, (_, mask)| acc | mask)
    })
}

/// Orbits of the first `n_max` elements of `r` for every grid point.
fn sampled_orbits(group: &NilGroup, r: &IntegerSet, grid: &CensusGrid) -> Result<Vec<Vec<ManifoldPoint>>> {
    let base = group.identity();
    grid.points(group.dim())?
        .par_iter()
        .map(|g| Ok(orbit::orbit(group, g, &base, r)?.points))
        .collect()
}

const MAX_CENSUS_N: usize = 24;

fn census_from_orbits(orbits: &[Vec<ManifoldPoint>], n: usize, grid: &CensusGrid, m: usize) -> Result<NiceCensus> {
    if orbits.is_empty() {
        return Err(Error::GridTooCoarse("no sample points".into()));
    }
    if n > MAX_CENSUS_N {
        return Err(Error::InvalidArgument(format!("N = {n} exceeds {MAX_CENSUS_N}")));
    }
    let mut partitions: Vec<Partition> = orbits.par_iter().map(|pts| partition_of(&pts[..n], &grid.eps)).collect();
    partitions.sort_unstable();
    partitions.dedup();
    let mut seen = vec![false; 1 << n];
    for p in &partitions {
        for a in unions(p) {
            seen[a as usize] = true;
        }
    }
    Ok(NiceCensus {
        n,
        eps: grid.eps.clone(),
        big_m: grid.big_m.clone(),
        resolution: grid.resolution,
        sampled: orbits.len(),
        realized_nice_sets: seen.iter().filter(|&&s| s).count() as u64,
        realized_partitions: partitions.len() as u64,
        component_cap: grid.component_cap(m)?,
        max_components: partitions.iter().map(|p| p.len()).max().unwrap_or(0),
    })
}

/// Census for `R` = the first `n` elements of `e`.
pub fn nice_census(group: &NilGroup, e: &SetDescriptor, n: usize, grid: &CensusGrid) -> Result<NiceCensus> {
    let r = e.prefix(n)?;
    if r.len() < n {
        return Err(Error::TooShort { needed: n, found: r.len() });
    }
    let orbits = sampled_orbits(group, &r, grid)?;
    census_from_orbits(&orbits, n, grid, group.dim())
}

/// Nice sets for each sampled `g`, found by testing every subset of `R`
/// against its complement with the exact pairwise distances. Returns the
/// number of grid points where this disagrees with the clustering route,
/// and the union of all nice sets found.
pub fn exhaustive_cross_check(
    group: &NilGroup,
    e: &SetDescriptor,
    n: usize,
    grid: &CensusGrid,
) -> Result<(usize, u64)> {
    if n > 16 {
        return Err(Error::InvalidArgument(format!("exhaustive check needs N <= 16, got {n}")));
    }
    let r = e.prefix(n)?;
    let orbits = sampled_orbits(group, &r, grid)?;
    let full: u64 = (1u64 << n) - 1;
    let per_g: Vec<(bool, Vec<u64>)> = orbits
        .par_iter()
        .map(|pts| {
            let close: Vec<u64> = (0..n)
                .map(|i| {
                    (0..n)
                        .filter(|&j| j != i && orbit::cube_distance(&pts[i], &pts[j]) < grid.eps)
                        .fold(0u64, |acc, j| acc | 1 << j)
                })
                .collect();
            let direct: BTreeSet<u64> = (0..=full)
                .filter(|&a| (0..n).all(|i| a >> i & 1 == 0 || close[i] & !a & full == 0))
                .collect();
            let via_clusters: BTreeSet<u64> = unions(&partition_of(pts, &grid.eps)).collect();
            (direct == via_clusters, direct.into_iter().collect())
        })
        .collect();
    let mismatches = per_g.iter().filter(|(ok, _)| !ok).count();
    let mut all = BTreeSet::new();
    for (_, sets) in per_g {
        all.extend(sets);
    }
    Ok((mismatches, all.len() as u64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub realized_nice_sets: u64,
    pub realized_partitions: u64,
    pub two_pow_n: u64,
    /// `r_N^{c3}` written out in decimal.
    pub rn_c3: String,
    pub max_components: usize,
    pub component_cap: u64,
    /// Count at resolution `2 res - 1`, when requested.
    pub refined_nice_sets: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub spec_id: String,
    pub set: String,
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    #[serde(rename = "M", with = "rational::serde_str")]
    pub big_m: Rational,
    pub resolution: usize,
    pub c3: u64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,realized_nice_sets,two_pow_N,rN_c3,eps,M,resolution,spec_id\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n, r.realized_nice_sets, r.two_pow_n, r.rn_c3, self.eps, self.big_m, self.resolution, self.spec_id
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("growth tables serialize")
    }
}

/// Census for every `N` in `ns`, sharing one orbit computation. With
/// `refine`, each row also carries the count at resolution `2 res - 1`.
pub fn growth_experiment(
    group: &NilGroup,
    e: &SetDescriptor,
    ns: &[usize],
    grid: &CensusGrid,
    refine: bool,
) -> Result<GrowthTable> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let r = e.prefix(n_max)?;
    if r.len() < n_max {
        return Err(Error::TooShort {
            needed: n_max,
            found: r.len(),
        });
    }
    let m = group.dim();
    let c3 = orbit::region_exponent(group);
    let orbits = sampled_orbits(group, &r, grid)?;
    let refined_orbits = if refine {
        let fine = CensusGrid {
            resolution: 2 * grid.resolution - 1,
            ..grid.clone()
        };
        Some((sampled_orbits(group, &r, &fine)?, fine))
    } else {
        None
    };
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let c = census_from_orbits(&orbits, n, grid, m)?;
        let refined_nice_sets = match &refined_orbits {
            Some((o, fine)) => Some(census_from_orbits(o, n, fine, m)?.realized_nice_sets),
            None => None,
        };
        let r_n = if n == 0 { 1 } else { r.elements()[n - 1] };
        rows.push(GrowthRow {
            n,
            realized_nice_sets: c.realized_nice_sets,
            realized_partitions: c.realized_partitions,
            two_pow_n: 1 << n,
            rn_c3: num::pow(BigUint::from(r_n), c3 as usize).to_string(),
            max_components: c.max_components,
            component_cap: c.component_cap,
            refined_nice_sets,
        });
    }
    Ok(GrowthTable {
        spec_id: group.id().to_string(),
        set: e.to_string(),
        eps: grid.eps.clone(),
        big_m: grid.big_m.clone(),
        resolution: grid.resolution,
        c3,
        rows,
    })
}

/// Parses `a..b` or a single `N`.
pub fn parse_n_range(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad N range `{text}`"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b || a == 0 {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}
