//! Torus rotations: separating integer sets, non-recurrence witnesses, and
//! the partition of `{r_n} ∪ {r_n + t_n}` into pairwise separable pieces.
//!
//! Rotations are rational, `alpha = (p_1, ..., p_d) / q`. Then `a alpha`
//! depends only on `a mod q`, so for closed-form sets the distance between
//! `A alpha` and `B alpha` is a minimum over the finite difference set
//! `{(a - b) mod q}` and holds for the whole infinite sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num::{BigInt, Integer, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nice;
use crate::rational::{self, Rational};
use crate::sets::{IntegerSet, SetDescriptor, RESIDUE_SCAN_CAP};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TorusRotation {
    #[serde(with = "rational::serde_str::vec")]
    pub alpha: Vec<Rational>,
}

impl TorusRotation {
    /// Coordinates are taken mod 1.
    pub fn new(alpha: Vec<Rational>) -> Self {
        TorusRotation {
            alpha: alpha.iter().map(rational::frac).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(TorusRotation::new(rational::parse_rational_list(text)?))
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Common denominator `q` and numerators `p_i` with `alpha_i = p_i / q`.
    pub fn common_form(&self) -> Result<(u64, Vec<u64>)> {
        let q = rational::lcm_denominators(&self.alpha);
        let qn = q
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("denominator {q}")))?;
        let ps = self
            .alpha
            .iter()
            .map(|a| {
                (a * Rational::from_integer(q.clone()))
                    .to_integer()
                    .to_u64()
                    .expect("0 <= p < q")
            })
            .collect();
        Ok((qn, ps))
    }

    /// `||n alpha||` in the max metric of `T^d`.
    pub fn norm_of_multiple(&self, n: i128) -> Rational {
        self.alpha
            .iter()
            .map(|a| rational::circle_norm(&(a * BigInt::from(n))))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// `None` stands for `+inf` (an empty side).
pub type Gap = Option<Rational>;

fn serialize_gap<S: Serializer>(gap: &Gap, s: S) -> std::result::Result<S::Ok, S::Error> {
    match gap {
        Some(g) => s.serialize_str(&g.to_string()),
        None => s.serialize_str("inf"),
    }
}

fn gap_cmp(a: &Gap, b: &Gap) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationCertificate {
    #[serde(with = "rational::serde_str::vec")]
    pub alpha: Vec<Rational>,
    #[serde(serialize_with = "serialize_gap")]
    pub gap: Gap,
    pub truncation: u64,
    /// The gap holds for the full infinite sets, not just the truncation.
    pub exact: bool,
}

impl SeparationCertificate {
    pub fn rotation(&self) -> TorusRotation {
        TorusRotation {
            alpha: self.alpha.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

/// Residues of `s` mod `q`: exact when `s` is a closed form whose residues
/// were scanned over a full period, otherwise from the elements `<= truncation`.
fn residues(s: &SetDescriptor, q: u64, truncation: u64, cap: u64) -> Result<(BTreeSet<u64>, bool)> {
    let r = s.residues(q, cap)?;
    if r.exact {
        return Ok((r.values, true));
    }
    let finite = s.up_to(truncation)?;
    Ok((finite.elements().iter().map(|x| x % q).collect(), false))
}

fn differences(a: &BTreeSet<u64>, b: &BTreeSet<u64>, q: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert((x + q - y) % q);
        }
    }
    out
}

/// `min_{r in set} max_i ||r p_i / q||`, as a numerator over `q`; `None`
/// for an empty set.
fn residue_gap(set: &BTreeSet<u64>, q: u64, ps: &[u64]) -> Option<u64> {
    set.iter()
        .map(|&r| {
            ps.iter()
                .map(|&p| {
                    let v = ((r as u128 * p as u128) % q as u128) as u64;
                    v.min(q - v)
                })
                .max()
                .unwrap_or(0)
        })
        .min()
}

fn check_disjoint(a: &SetDescriptor, b: &SetDescriptor, truncation: u64) -> Result<()> {
    a.up_to(truncation)?.ensure_disjoint(&b.up_to(truncation)?)
}

/// Distance between `A alpha` and `B alpha`.
pub fn rotation_gap(
    rotation: &TorusRotation,
    a: &SetDescriptor,
    b: &SetDescriptor,
    truncation: u64,
) -> Result<SeparationCertificate> {
    check_disjoint(a, b, truncation)?;
    let (q, ps) = rotation.common_form()?;
    let (ra, ea) = residues(a, q, truncation, RESIDUE_SCAN_CAP)?;
    let (rb, eb) = residues(b, q, truncation, RESIDUE_SCAN_CAP)?;
    let gap = residue_gap(&differences(&ra, &rb, q), q, &ps).map(|g| rational::ratio(g as i64, q as i64));
    Ok(SeparationCertificate {
        alpha: rotation.alpha.clone(),
        gap,
        truncation,
        exact: (ra.is_empty() && ea) || (rb.is_empty() && eb) || (ea && eb),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub d_max: usize,
    pub max_denominator: u64,
    pub random_budget: usize,
    pub seed: u64,
    /// Smallest gap accepted from a certificate that is not exact.
    pub min_gap: Rational,
    /// Value bound for sets without exact residues.
    pub truncation: u64,
    pub residue_cap: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            d_max: 2,
            max_denominator: 64,
            random_budget: 256,
            seed: 0,
            min_gap: rational::ratio(1, 16),
            truncation: 1 << 20,
            residue_cap: RESIDUE_SCAN_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Candidate {
    q: u64,
    ps: Vec<u64>,
    gap: Option<u64>,
    exact: bool,
}

impl Candidate {
    fn gap(&self) -> Gap {
        self.gap.map(|g| rational::ratio(g as i64, self.q as i64))
    }

    /// Larger gap first, then smaller dimension, denominator, numerators.
    fn better_than(&self, other: &Candidate) -> bool {
        gap_cmp(&self.gap(), &other.gap())
            .then_with(|| other.ps.len().cmp(&self.ps.len()))
            .then_with(|| other.q.cmp(&self.q))
            .then_with(|| other.ps.cmp(&self.ps))
            == Ordering::Greater
    }

    fn certificate(&self, truncation: u64) -> SeparationCertificate {
        SeparationCertificate {
            alpha: self.ps.iter().map(|&p| rational::ratio(p as i64, self.q as i64)).collect(),
            gap: self.gap(),
            truncation,
            exact: self.exact,
        }
    }
}

fn numerator_tuples(q: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (q as usize).pow(d as u32);
    (0..total).filter_map(move |mut idx| {
        let mut ps = vec![0u64; d];
        for slot in ps.iter_mut().rev() {
            *slot = (idx % q as usize) as u64;
            idx /= q as usize;
        }
        let g = ps.iter().fold(q, |acc, &p| acc.gcd(&p));
        (g == 1).then_some(ps)
    })
}

/// Best rotation for the residue sets produced by `sets(q)`; the score of a
/// rotation is `min_{r in sets(q)} ||r alpha||`.
fn search<F>(budget: &SearchBudget, sets: F) -> Result<(Candidate, usize)>
where
    F: Fn(u64) -> Result<(BTreeSet<u64>, bool)> + Sync,
{
    if budget.d_max == 0 || budget.max_denominator < 2 {
        return Err(Error::InvalidArgument("search needs d_max >= 1 and a denominator budget >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut random: Vec<(u64, Vec<u64>)> = Vec::with_capacity(budget.random_budget);
    for _ in 0..budget.random_budget {
        let d = rng.gen_range(1..=budget.d_max);
        let q = rng.gen_range(budget.max_denominator + 1..=4 * budget.max_denominator);
        let ps = (0..d).map(|_| rng.gen_range(0..q)).collect();
        random.push((q, ps));
    }
    let mut qs: BTreeSet<u64> = (2..=budget.max_denominator).collect();
    qs.extend(random.iter().map(|(q, _)| *q));
    let per_q: Vec<(u64, Vec<Candidate>)> = qs
        .into_par_iter()
        .map(|q| -> Result<(u64, Vec<Candidate>)> {
            let (set, exact) = sets(q)?;
            let tuples: Vec<Vec<u64>> = if q <= budget.max_denominator {
                (1..=budget.d_max).flat_map(|d| numerator_tuples(q, d)).collect()
            } else {
                random.iter().filter(|(rq, _)| *rq == q).map(|(_, ps)| ps.clone()).collect()
            };
            let cands = tuples
                .into_iter()
                .map(|ps| Candidate {
                    gap: residue_gap(&set, q, &ps),
                    q,
                    ps,
                    exact,
                })
                .collect();
            Ok((q, cands))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<Candidate> = None;
    let mut tried = 0usize;
    for (_, cands) in per_q {
        for c in cands {
            tried += 1;
            if best.as_ref().is_none_or(|b| c.better_than(b)) {
                best = Some(c);
            }
        }
    }
    Ok((best.expect("at least one candidate"), tried))
}

fn accepted(c: &Candidate, min_gap: &Rational) -> bool {
    match c.gap() {
        None => true,
        Some(g) => g > Rational::zero() && (c.exact || g >= *min_gap),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found {
        certificate: SeparationCertificate,
        candidates: usize,
    },
    /// Carries the largest gap seen, which fell short.
    NotFound {
        best: SeparationCertificate,
        candidates: usize,
    },
}

impl SearchOutcome {
    pub fn certificate(&self) -> &SeparationCertificate {
        match self {
            SearchOutcome::Found { certificate, .. } => certificate,
            SearchOutcome::NotFound { best, .. } => best,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcomes serialize")
    }
}

/// Searches rational rotations `p / q`, `q <= budget.max_denominator`, in
/// dimensions `1..=d_max`, then `random_budget` seeded random rotations
/// with larger denominators, and keeps the one with the largest gap.
pub fn find_separating_rotation(a: &SetDescriptor, b: &SetDescriptor, budget: &SearchBudget) -> Result<SearchOutcome> {
    check_disjoint(a, b, budget.truncation)?;
    let (best, candidates) = search(budget, |q| {
        let (ra, ea) = residues(a, q, budget.truncation, budget.residue_cap)?;
        let (rb, eb) = residues(b, q, budget.truncation, budget.residue_cap)?;
        Ok((differences(&ra, &rb, q), ea && eb))
    })?;
    let certificate = best.certificate(budget.truncation);
    Ok(if accepted(&best, &budget.min_gap) {
        SearchOutcome::Found { certificate, candidates }
    } else {
        SearchOutcome::NotFound {
            best: certificate,
            candidates,
        }
    })
}

/// Best gap found when both sets are cut at each bound in turn.
pub fn best_gap_curve(
    a: &SetDescriptor,
    b: &SetDescriptor,
    bounds: &[u64],
    budget: &SearchBudget,
) -> Result<Vec<(u64, Gap)>> {
    bounds
        .iter()
        .map(|&n| {
            let outcome = find_separating_rotation(&a.clone().truncated(n), &b.clone().truncated(n), budget)?;
            Ok((n, outcome.certificate().gap.clone()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessOutcome {
    /// `||t alpha|| >= eps` for every `t` in the set.
    Found {
        #[serde(with = "rational::serde_str::vec")]
        alpha: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        eps: Rational,
        exact: bool,
    },
    NotFound {
        #[serde(with = "rational::serde_str::vec")]
        best_alpha: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        best_eps: Rational,
    },
}

impl WitnessOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcomes serialize")
    }
}

/// A rotation keeping `T alpha` away from `0`, i.e. evidence that `T` is
/// not a set of Bohr recurrence.
pub fn nonrecurrence_witness(t: &SetDescriptor, budget: &SearchBudget) -> Result<WitnessOutcome> {
    let (best, _) = search(budget, |q| residues(t, q, budget.truncation, budget.residue_cap))?;
    let cert = best.certificate(budget.truncation);
    let eps = cert.gap.clone().unwrap_or_else(|| rational::ratio(1, 2));
    Ok(if accepted(&best, &budget.min_gap) {
        WitnessOutcome::Found {
            alpha: cert.alpha,
            eps,
            exact: best.exact,
        }
    } else {
        WitnessOutcome::NotFound {
            best_alpha: cert.alpha,
            best_eps: eps,
        }
    })
}

/// `alpha = 1 / (2c)`, `eps = 1/2` for the constant set `{c}`, checked exactly.
pub fn constant_witness(c: u64) -> Result<(TorusRotation, Rational)> {
    if c == 0 {
        return Err(Error::InvalidArgument("{0} is a set of recurrence".into()));
    }
    let rotation = TorusRotation::new(vec![rational::ratio(1, 2 * c as i64)]);
    let eps = rational::ratio(1, 2);
    let norm = rotation.norm_of_multiple(c as i128);
    if norm < eps {
        return Err(Error::WitnessInvalid {
            t: c,
            norm: norm.to_string(),
            eps: eps.to_string(),
        });
    }
    Ok((rotation, eps))
}

// ---------------------------------------------------------------------------
// partition of lacunary-plus-shift sets

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct I0Partition {
    /// `F_1..F_l` followed by `F'_1..F'_l`.
    pub pieces: Vec<Vec<u64>>,
    pub labels: Vec<String>,
    pub rotation: TorusRotation,
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    /// Side of the half-open cubes, `eps / 2`.
    #[serde(with = "rational::serde_str")]
    pub cube_side: Rational,
    pub cubes_per_axis: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl I0Partition {
    pub fn cells(&self) -> usize {
        self.pieces.len() / 2
    }

    /// Centers of the covering cubes, in cube order.
    pub fn centers(&self) -> Vec<Vec<Rational>> {
        let d = self.rotation.dim();
        let k = self.cubes_per_axis as usize;
        let half = &self.cube_side / rational::int(2);
        (0..self.cells())
            .map(|mut idx| {
                let mut c = vec![Rational::zero(); d];
                for slot in c.iter_mut().rev() {
                    *slot = &self.cube_side * rational::int((idx % k) as i64) + &half;
                    idx /= k;
                }
                c
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("partitions serialize")
    }
}

/// Lexicographic index of the cube of side `side` containing `n alpha`.
fn cube_index(rotation: &TorusRotation, n: u64, side: &Rational, per_axis: u64) -> usize {
    rotation.alpha.iter().fold(0usize, |acc, a| {
        let x = rational::frac(&(a * BigInt::from(n)));
        let j = (x / side).floor().to_integer().to_u64().expect("nonnegative");
        acc * per_axis as usize + j.min(per_axis - 1) as usize
    })
}

/// Splits `E = {r_n} ∪ {r_n + t_n}` into `2l` pieces: cover the torus by
/// `l` half-open cubes of side `eps / 2`; for `i = 1..l`, `F_i` takes the
/// unassigned elements landing in cube `i` and `F'_i` their partners.
pub fn i0_partition(pairs: &[(u64, u64)], rotation: &TorusRotation, eps: &Rational) -> Result<I0Partition> {
    if *eps <= Rational::zero() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    for &(r, s) in pairs {
        if s <= r {
            return Err(Error::HypothesisViolated(format!("pair ({r}, {s}) has t <= 0")));
        }
        let norm = rotation.norm_of_multiple((s - r) as i128);
        if norm < *eps {
            return Err(Error::WitnessInvalid {
                t: s - r,
                norm: norm.to_string(),
                eps: eps.to_string(),
            });
        }
    }
    let mut elements: Vec<u64> = pairs.iter().flat_map(|&(r, s)| [r, s]).collect();
    elements.sort_unstable();
    if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::HypothesisViolated(format!("{} occurs in more than one pair", w[0])));
    }
    let partner = |x: u64| -> u64 {
        pairs
            .iter()
            .find_map(|&(r, s)| {
                if r == x {
                    Some(s)
                } else if s == x {
                    Some(r)
                } else {
                    None
                }
            })
            .expect("element of a pair")
    };
    let side = eps / rational::int(2);
    let per_axis = (rational::int(1) / &side)
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Overflow("cube count".into()))?;
    let cells = (per_axis as usize)
        .checked_pow(rotation.dim() as u32)
        .filter(|&c| c <= 1 << 20)
        .ok_or_else(|| Error::InvalidArgument("too many covering cubes".into()))?;
    let cell_of: std::collections::HashMap<u64, usize> = elements
        .iter()
        .map(|&x| (x, cube_index(rotation, x, &side, per_axis)))
        .collect();
    let mut assigned: std::collections::HashSet<u64> = Default::default();
    let mut f: Vec<Vec<u64>> = vec![Vec::new(); cells];
    let mut f_prime: Vec<Vec<u64>> = vec![Vec::new(); cells];
    for i in 0..cells {
        let here: Vec<u64> = elements
            .iter()
            .copied()
            .filter(|x| !assigned.contains(x) && cell_of[x] == i)
            .collect();
        for &x in &here {
            assigned.insert(x);
        }
        for &x in &here {
            let y = partner(x);
            // a partner is never in the same cube, since ||t alpha|| >= eps > eps/2
            debug_assert!(!assigned.contains(&y));
            assigned.insert(y);
            f_prime[i].push(y);
        }
        f[i] = here;
        f_prime[i].sort_unstable();
    }
    let labels = (1..=cells)
        .map(|i| format!("F_{i}"))
        .chain((1..=cells).map(|i| format!("F'_{i}")))
        .collect();
    Ok(I0Partition {
        pieces: f.into_iter().chain(f_prime).collect(),
        labels,
        rotation: rotation.clone(),
        eps: eps.clone(),
        cube_side: side,
        cubes_per_axis: per_axis,
        pairs: pairs.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct I0Verification {
    pub disjoint_cover: bool,
    pub pairs_split: bool,
    pub lacunary: bool,
    pub partner_gap: bool,
    /// Smallest `||(a - b) alpha||` over `a` in `F_i`, `b` in `F'_i`.
    #[serde(serialize_with = "serialize_gap")]
    pub min_partner_gap: Gap,
    #[serde(with = "rational::serde_str")]
    pub min_lacunary_ratio: Rational,
    pub failures: Vec<String>,
}

impl I0Verification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn lacunary_or_short(set: &[u64]) -> Option<Rational> {
    if set.len() < 2 {
        return None;
    }
    let s = IntegerSet::new(set.to_vec(), "").ok()?;
    nice::lacunary_ratio(&s).ok()
}

/// Checks the four properties the construction promises:
/// (1) the pieces are disjoint and cover `E`; (2) no piece holds both
/// members of a pair; (3) every piece and every union of two pieces other
/// than `F_i ∪ F'_i` is lacunary (ratio at least the lacunary threshold);
/// (4) `F_i` and `F'_i` are at distance at least `eps / 2` under `alpha`.
pub fn verify_i0_partition(p: &I0Partition) -> I0Verification {
    let mut failures = Vec::new();
    let mut all: Vec<u64> = p.pieces.iter().flatten().copied().collect();
    let total = all.len();
    all.sort_unstable();
    all.dedup();
    let mut expected: Vec<u64> = p.pairs.iter().flat_map(|&(r, s)| [r, s]).collect();
    expected.sort_unstable();
    let disjoint_cover = all.len() == total && all == expected;
    if !disjoint_cover {
        failures.push("pieces are not a disjoint cover of E".to_string());
    }

    let piece_of = |x: u64| p.pieces.iter().position(|piece| piece.contains(&x));
    let mut pairs_split = true;
    for &(r, s) in &p.pairs {
        if piece_of(r).is_some() && piece_of(r) == piece_of(s) {
            pairs_split = false;
            failures.push(format!("{r} and {s} share piece {}", p.labels[piece_of(r).unwrap()]));
        }
    }

    let threshold = nice::lacunary_threshold();
    let l = p.cells();
    let mut min_ratio: Option<Rational> = None;
    let mut lacunary = true;
    let mut check = |label: String, set: Vec<u64>| {
        if let Some(r) = lacunary_or_short(&set) {
            if r < threshold {
                lacunary = false;
                failures.push(format!("{label} has ratio {r}"));
            }
            if min_ratio.as_ref().is_none_or(|m| r < *m) {
                min_ratio = Some(r);
            }
        }
    };
    let nonempty: Vec<usize> = (0..p.pieces.len()).filter(|&i| !p.pieces[i].is_empty()).collect();
    for &i in &nonempty {
        check(p.labels[i].clone(), p.pieces[i].clone());
    }
    for (x, &i) in nonempty.iter().enumerate() {
        for &j in &nonempty[x + 1..] {
            if j == i + l {
                continue;
            }
            let mut u = p.pieces[i].clone();
            u.extend_from_slice(&p.pieces[j]);
            u.sort_unstable();
            check(format!("{} ∪ {}", p.labels[i], p.labels[j]), u);
        }
    }

    let half = &p.eps / rational::int(2);
    let mut min_gap: Gap = None;
    let mut partner_gap = true;
    for i in 0..l {
        for &a in &p.pieces[i] {
            for &b in &p.pieces[i + l] {
                let g = p.rotation.norm_of_multiple(a as i128 - b as i128);
                if g < half {
                    partner_gap = false;
                }
                if gap_cmp(&Some(g.clone()), &min_gap) == Ordering::Less {
                    min_gap = Some(g);
                }
            }
        }
    }
    if !partner_gap {
        failures.push(format!("some F_i, F'_i are closer than {half}"));
    }
    I0Verification {
        disjoint_cover,
        pairs_split,
        lacunary,
        partner_gap,
        min_partner_gap: min_gap,
        min_lacunary_ratio: min_ratio.unwrap_or_else(|| rational::int(0)),
        failures,
    }
}

// ---------------------------------------------------------------------------
// squaring and finite shifts

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareLiftReport {
    pub squared_pairs: Vec<(u64, u64)>,
    /// `s_n = 2 r_n t_n + t_n^2`
    pub shifts: Vec<u64>,
    #[serde(with = "rational::serde_str")]
    pub shift_lacunary_ratio: Rational,
    /// `s_{n+1}/s_n >= (2r_{n+1}+t_{n+1})/(2r_n+t_n)` and
    /// `s_{n+1}/s_n >= r_{n+1}/r_n`, per index.
    pub chain: Vec<bool>,
    pub chain_holds: bool,
    /// `(2r_{n+1}+t_{n+1})/(2r_n+t_n) >= r_{n+1}/r_n` per index; only the
    /// liminf version is needed, so this is informational.
    pub middle_link: Vec<bool>,
    pub t_nondecreasing: bool,
    /// `s_N / r_N^2` at the end of the prefix.
    #[serde(with = "rational::serde_str")]
    pub final_shift_ratio: Rational,
}

/// `t_n / r_n` must be non-increasing over the second half of the prefix
/// (a finite stand-in for `t_n / r_n -> 0`).
fn tends_down(r: &[u64], t: &[u64]) -> bool {
    let n = r.len();
    let q: Vec<Rational> = r.iter().zip(t).map(|(&a, &b)| rational::ratio(b as i64, a as i64)).collect();
    q[n / 2..].windows(2).all(|w| w[1] <= w[0])
}

pub fn square_lift(r: &IntegerSet, t: &[u64]) -> Result<SquareLiftReport> {
    let rs = r.elements();
    if rs.len() != t.len() {
        return Err(Error::InvalidArgument(format!("{} values of r, {} of t", rs.len(), t.len())));
    }
    if !nice::is_lacunary_prefix(r)? {
        return Err(Error::HypothesisViolated(format!(
            "r is not lacunary: ratio {}",
            nice::lacunary_ratio(r)?
        )));
    }
    if rs.contains(&0) || t.contains(&0) {
        return Err(Error::HypothesisViolated("r_n and t_n must be positive".into()));
    }
    if !tends_down(rs, t) {
        return Err(Error::HypothesisViolated("t_n / r_n is not decreasing on the prefix".into()));
    }
    let ov = |what: &str| Error::Overflow(what.to_string());
    let mut squared_pairs = Vec::with_capacity(rs.len());
    let mut shifts = Vec::with_capacity(rs.len());
    for (&a, &b) in rs.iter().zip(t) {
        let a2 = a.checked_mul(a).ok_or_else(|| ov("r_n^2"))?;
        let s = 2u64
            .checked_mul(a)
            .and_then(|x| x.checked_mul(b))
            .and_then(|x| x.checked_add(b.checked_mul(b)?))
            .ok_or_else(|| ov("2 r_n t_n + t_n^2"))?;
        squared_pairs.push((a2, a2.checked_add(s).ok_or_else(|| ov("(r_n + t_n)^2"))?));
        shifts.push(s);
    }
    let shift_set = IntegerSet::new(shifts.clone(), "2rt+t^2")
        .map_err(|_| Error::HypothesisViolated("2 r_n t_n + t_n^2 is not increasing".into()))?;
    let frac = |num: u64, den: u64| rational::ratio(num as i64, den as i64);
    let mut chain = Vec::new();
    let mut middle_link = Vec::new();
    for n in 0..rs.len().saturating_sub(1) {
        let s_ratio = frac(shifts[n + 1], shifts[n]);
        let mid = frac(2 * rs[n + 1] + t[n + 1], 2 * rs[n] + t[n]);
        let r_ratio = frac(rs[n + 1], rs[n]);
        chain.push(s_ratio >= mid && s_ratio >= r_ratio);
        middle_link.push(mid >= r_ratio);
    }
    let last = rs.len() - 1;
    Ok(SquareLiftReport {
        shift_lacunary_ratio: nice::lacunary_ratio(&shift_set)?,
        chain_holds: chain.iter().all(|&c| c),
        chain,
        middle_link,
        t_nondecreasing: t.windows(2).all(|w| w[0] <= w[1]),
        final_shift_ratio: rational::ratio(shifts[last] as i64, 1) / (rational::int(rs[last] as i64).pow(2)),
        squared_pairs,
        shifts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftPairReport {
    pub i: u64,
    pub j: u64,
    #[serde(with = "rational::serde_str::vec")]
    pub witness_alpha: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub witness_eps: Rational,
    /// Leading elements of `E` dropped so that `E + i` and `E + j` are disjoint.
    pub dropped: u64,
    pub outcome: SearchOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub pairs: Vec<ShiftPairReport>,
    pub all_certified: bool,
}

impl SumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// For each `i < j` in `F`: the constant-shift witness for `{j - i}` and a
/// separating rotation for `E + i` against `E + j`. Where the two overlap
/// (finitely often, `E` being lacunary) the leading elements of `E` are
/// dropped first; separability is unaffected by finitely many elements.
pub fn sum_with_finite(e: &SetDescriptor, f: &[u64], budget: &SearchBudget) -> Result<SumReport> {
    let mut f = f.to_vec();
    f.sort_unstable();
    f.dedup();
    let head = e.up_to(1 << 40)?;
    let mut pairs = Vec::new();
    for (x, &i) in f.iter().enumerate() {
        for &j in &f[x + 1..] {
            let (rotation, eps) = constant_witness(j - i)?;
            // e + i = e' + j with both in the head
            let dropped = head
                .elements()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v + i >= j && head.contains(v + i - j))
                .map(|(idx, _)| idx as u64 + 1)
                .max()
                .unwrap_or(0);
            let tail = e.skip(dropped)?;
            let outcome = find_separating_rotation(&tail.shift(i as i64)?, &tail.shift(j as i64)?, budget)?;
            pairs.push(ShiftPairReport {
                i,
                j,
                witness_alpha: rotation.alpha,
                witness_eps: eps,
                dropped,
                outcome,
            });
        }
    }
    Ok(SumReport {
        all_certified: pairs.iter().all(|p| p.outcome.is_found()),
        pairs,
    })
}

/// Pairs `(r_n, r_n + t_n)` for the first `n` terms.
pub fn pairs_from(r: &SetDescriptor, t: &SetDescriptor, n: usize) -> Result<Vec<(u64, u64)>> {
    let rs = r.prefix(n)?;
    let ts = t.prefix(n)?;
    if rs.len() < n || ts.len() < n {
        return Err(Error::TooShort {
            needed: n,
            found: rs.len().min(ts.len()),
        });
    }
    rs.elements()
        .iter()
        .zip(ts.elements())
        .map(|(&a, &b)| {
            a.checked_add(b)
                .map(|s| (a, s))
                .ok_or_else(|| Error::Overflow("r_n + t_n".into()))
        })
        .collect()
}
