use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nilsep::arrangement::{self, Arrangement};
use nilsep::bohr::{self, SearchBudget, TorusRotation};
use nilsep::malcev::parse_spec_text;
use nilsep::nice::{self, CensusGrid};
use nilsep::orbit;
use nilsep::rational::{self, parse_rational, Rational};
use nilsep::{registry, validate_spec, DegreePolicy, GroupElement, IntegerSet, NilGroup, Polynomial, SetDescriptor};
use serde_json::json;

use crate::{
    CensusArgs, ClassifyArgs, Command, Common, Format, I0Args, OrbitArgs, RegionsArgs, SeparateArgs, SpecArgs,
};

pub enum Status {
    Ok,
    PropertyFailed(String),
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Orbit(a) => orbit_cmd(a),
        Command::NiceCensus(a) => census_cmd(a),
        Command::Separate(a) => separate_cmd(a),
        Command::I0(a) => i0_cmd(a),
        Command::Regions(a) => regions_cmd(a),
        Command::Classify(a) => classify_cmd(a),
    }
}

fn setup(common: &Common) -> Result<()> {
    if let Some(n) = common.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn emit(common: &Common, default: Format, csv: Option<String>, json: String) -> Result<()> {
    let text = match common.format.unwrap_or(default) {
        Format::Json => json,
        Format::Csv => csv.ok_or_else(|| anyhow!("this report has no CSV form; use --format json"))?,
    };
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing `{path}`")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn load_group(name: &str, allow_degree_k: bool) -> Result<NilGroup> {
    if let Some(g) = registry::lookup(name) {
        return Ok(g);
    }
    let path = Path::new(name);
    if !path.is_file() {
        bail!("unknown spec `{name}`: not a registry name or a readable file");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading `{name}`"))?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    let policy = if allow_degree_k {
        DegreePolicy::AllowDegreeK
    } else {
        DegreePolicy::Strict
    };
    Ok(validate_spec(parse_spec_text(id, &text)?, policy)?)
}

fn group_of(spec: &SpecArgs) -> Result<NilGroup> {
    load_group(&spec.spec, spec.allow_degree_k)
}

fn element(group: &NilGroup, text: &str, what: &str) -> Result<GroupElement> {
    let x = GroupElement::parse(text).with_context(|| format!("parsing --{what}"))?;
    group.check_dim(&x).with_context(|| format!("--{what}"))?;
    Ok(x)
}

fn rat(text: &str, what: &str) -> Result<Rational> {
    parse_rational(text).with_context(|| format!("parsing --{what}"))
}

fn set_of(text: &str) -> Result<SetDescriptor> {
    SetDescriptor::parse(text).with_context(|| format!("parsing set `{text}`"))
}

/// The first `n` elements, or all of a finite set when `n` is absent.
fn take(set: &SetDescriptor, n: Option<usize>, what: &str) -> Result<IntegerSet> {
    match n {
        Some(n) => Ok(set.prefix(n)?),
        None if set.is_infinite() => bail!("--{what} is infinite; give --N"),
        None => Ok(set.prefix(usize::MAX)?),
    }
}

fn orbit_cmd(a: OrbitArgs) -> Result<Status> {
    setup(&a.common)?;
    let group = group_of(&a.spec)?;
    let g = element(&group, &a.g, "g")?;
    let base = match &a.base {
        Some(b) => element(&group, b, "base")?,
        None => group.identity(),
    };
    let set = take(&set_of(&a.set)?, a.n, "set")?;
    let table = orbit::orbit(&group, &g, &base, &set)?;
    emit(&a.common, Format::Csv, Some(table.to_csv()), table.to_json())?;
    Ok(Status::Ok)
}

fn census_cmd(a: CensusArgs) -> Result<Status> {
    setup(&a.common)?;
    let group = group_of(&a.spec)?;
    let e = set_of(&a.set)?;
    let ns = nice::parse_n_range(&a.n)?;
    let grid = CensusGrid {
        big_m: rat(&a.big_m, "M")?,
        eps: rat(&a.eps, "eps")?,
        resolution: a.res,
    };
    if grid.big_m <= rational::int(0) || grid.eps <= rational::int(0) {
        bail!("--M and --eps must be positive");
    }
    let table = nice::growth_experiment(&group, &e, &ns, &grid, a.refine)?;
    emit(&a.common, Format::Csv, Some(table.to_csv()), table.to_json())?;
    if a.cross_check {
        let mut bad = Vec::new();
        for row in table.rows.iter().filter(|r| r.n <= 16) {
            let (mismatches, total) = nice::exhaustive_cross_check(&group, &e, row.n, &grid)?;
            eprintln!("cross-check N={}: {mismatches} mismatched grid points, {total} nice sets", row.n);
            if mismatches > 0 || total != row.realized_nice_sets {
                bad.push(row.n);
            }
        }
        if !bad.is_empty() {
            return Ok(Status::PropertyFailed(format!("exhaustive cross-check disagrees at N = {bad:?}")));
        }
    }
    Ok(Status::Ok)
}

fn separate_cmd(a: SeparateArgs) -> Result<Status> {
    setup(&a.common)?;
    let set_a = set_of(&a.a)?;
    if let Some(g) = &a.g {
        return nil_separate(&a, &set_a, g);
    }
    let budget = SearchBudget {
        d_max: a.dmax,
        max_denominator: a.den,
        random_budget: a.random,
        seed: a.seed,
        min_gap: rat(&a.min_gap, "min-gap")?,
        truncation: a.truncation,
        ..SearchBudget::default()
    };
    if let Some(f) = &a.f {
        let f = set_of(f)?;
        if f.is_infinite() {
            bail!("--F must be finite");
        }
        let report = bohr::sum_with_finite(&set_a, f.prefix(usize::MAX)?.elements(), &budget)?;
        emit(&a.common, Format::Json, None, report.to_json())?;
        return Ok(Status::Ok);
    }
    let set_b = set_of(a.b.as_deref().ok_or_else(|| anyhow!("--B is required"))?)?;
    let json = match &a.alpha {
        Some(alpha) => {
            let rotation = TorusRotation::parse(alpha).context("parsing --alpha")?;
            bohr::rotation_gap(&rotation, &set_a, &set_b, a.truncation)?.to_json()
        }
        None => bohr::find_separating_rotation(&set_a, &set_b, &budget)?.to_json(),
    };
    emit(&a.common, Format::Json, None, json)?;
    Ok(Status::Ok)
}

fn nil_separate(a: &SeparateArgs, set_a: &SetDescriptor, g: &str) -> Result<Status> {
    let spec = a.spec.as_deref().ok_or_else(|| anyhow!("--g needs --spec"))?;
    let group = load_group(spec, a.allow_degree_k)?;
    let g = element(&group, g, "g")?;
    let eps = rat(a.eps.as_deref().ok_or_else(|| anyhow!("--g needs --eps"))?, "eps")?;
    let set_b = set_of(a.b.as_deref().ok_or_else(|| anyhow!("--B is required"))?)?;
    let (ra, rb) = (take(set_a, a.n, "A")?, take(&set_b, a.n, "B")?);
    let separable = orbit::is_eps_separable(&group, &g, &ra, &rb, &eps)?;
    let distance = if ra.is_empty() || rb.is_empty() {
        "inf".to_string()
    } else {
        let base = group.identity();
        orbit::min_pair_distance(&orbit::orbit(&group, &g, &base, &ra)?, &orbit::orbit(&group, &g, &base, &rb)?)?
            .to_string()
    };
    let report = json!({
        "spec_id": group.id(),
        "g": g,
        "eps": eps.to_string(),
        "A": ra.elements(),
        "B": rb.elements(),
        "min_distance": distance,
        "separable": separable,
    });
    emit(&a.common, Format::Json, None, pretty(&report))?;
    Ok(Status::Ok)
}

fn i0_cmd(a: I0Args) -> Result<Status> {
    setup(&a.common)?;
    let (r, t) = (set_of(&a.r)?, set_of(&a.t)?);
    let pairs = bohr::pairs_from(&r, &t, a.n)?;
    let rotation = TorusRotation::parse(&a.alpha).context("parsing --alpha")?;
    let partition = bohr::i0_partition(&pairs, &rotation, &rat(&a.eps, "eps")?)?;
    let verification = bohr::verify_i0_partition(&partition);
    let mut failures = verification.failures.clone();
    let mut report = json!({
        "partition": partition,
        "verification": verification,
    });
    if a.square_lift {
        let ts: Vec<u64> = pairs.iter().map(|(x, y)| y - x).collect();
        let rs = IntegerSet::new(pairs.iter().map(|p| p.0).collect(), a.r.clone())?;
        let lift = bohr::square_lift(&rs, &ts)?;
        if !lift.chain_holds {
            failures.push("square-lift ratio chain fails".into());
        }
        report["square_lift"] = serde_json::to_value(&lift)?;
    }
    emit(&a.common, Format::Json, None, pretty(&report))?;
    Ok(if failures.is_empty() {
        Status::Ok
    } else {
        Status::PropertyFailed(failures.join("; "))
    })
}

fn default_vars(m: usize) -> Vec<String> {
    match m {
        1..=3 => ["x", "y", "z"][..m].iter().map(|s| s.to_string()).collect(),
        _ => Polynomial::indexed_vars("x", m),
    }
}

/// Box dimension from `--vars`, `--dim`, a multi-pair `--box`, or else the
/// highest of `x`, `y`, `z` appearing in the polynomials.
fn infer_dim(a: &RegionsArgs) -> Result<usize> {
    if let Some(v) = &a.vars {
        return Ok(v.split(',').count());
    }
    if let Some(d) = a.dim {
        return Ok(d);
    }
    let pairs = a.bounds.split(',').count() / 2;
    if pairs > 1 {
        return Ok(pairs);
    }
    let text = a.poly.concat();
    Ok(if text.contains('z') {
        3
    } else if text.contains('y') {
        2
    } else {
        1
    })
}

fn regions_cmd(a: RegionsArgs) -> Result<Status> {
    setup(&a.common)?;
    let delta = rat(&a.delta, "delta")?;
    if let Some(spec) = &a.spec {
        let group = load_group(spec, a.allow_degree_k)?;
        let set = set_of(a.set.as_deref().ok_or_else(|| anyhow!("--spec needs --set"))?)?;
        let r = take(&set, a.n, "set")?;
        let census = arrangement::separability_equation_census(
            &group,
            &r,
            &rat(&a.big_m, "M")?,
            &rat(&a.eps, "eps")?,
            a.res,
            &delta,
        )?;
        let report = json!({"spec_id": group.id(), "R": r.elements(), "census": census});
        emit(&a.common, Format::Json, None, pretty(&report))?;
        return Ok(Status::Ok);
    }
    if a.poly.is_empty() {
        bail!("give at least one --poly, or --spec with --set");
    }
    let m = infer_dim(&a)?;
    let vars = match &a.vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        None => default_vars(m),
    };
    let polys = a
        .poly
        .iter()
        .map(|p| Polynomial::parse_infix(vars.clone(), p).with_context(|| format!("parsing --poly `{p}`")))
        .collect::<Result<Vec<_>>>()?;
    let bounds = arrangement::parse_box(&a.bounds, m)?;
    let arr = match a.degree {
        Some(b) => Arrangement::new(polys, b, bounds)?,
        None => Arrangement::from_polys(polys, bounds)?,
    };
    let census = arrangement::census_report(&arr, a.res, &delta)?;
    let mut report = serde_json::to_value(&census)?;
    let mut status = Status::Ok;
    if a.exact {
        if m != 1 {
            bail!("--exact needs a single variable");
        }
        let (lo, hi) = &arr.bounds.0[0];
        let exact = arrangement::count_regions_1d(&arr.polys, lo, hi)?.region_count;
        report["exact_count"] = json!(exact);
        if exact != census.count {
            status = Status::PropertyFailed(format!("grid count {} != exact count {exact}", census.count));
        }
    }
    emit(&a.common, Format::Json, None, pretty(&report))?;
    Ok(status)
}

fn classify_cmd(a: ClassifyArgs) -> Result<Status> {
    setup(&a.common)?;
    let set = set_of(&a.set)?.prefix(a.n)?;
    let mut c = nice::classify(&set)?;
    c.sublacunarity = nice::sublacunarity_slope(&set, a.threshold)?;
    emit(&a.common, Format::Json, None, pretty(&serde_json::to_value(&c)?))?;
    Ok(Status::Ok)
}
