//! Textual group-spec format.
//!
//! ```text
//! 3 2
//! 0
//! 1:s1*t2
//! ```
//!
//! Header `m k`, then `m - 1` lines holding `P_1..P_{m-1}` as
//! `coeff:monomial` pairs.

use super::{structure_vars, NilGroupSpec};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

pub fn parse_spec_text(id: &str, text: &str) -> Result<NilGroupSpec> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty group spec".into()))?;
    let mut fields = header.split_whitespace();
    let (m, k) = match (fields.next(), fields.next(), fields.next()) {
        (Some(m), Some(k), None) => (
            m.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension `{m}`")))?,
            k.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad step `{k}`")))?,
        ),
        _ => return Err(Error::Parse(format!("bad header `{header}`, expected `m k`"))),
    };
    if m == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut structure = Vec::with_capacity(m - 1);
    for i in 1..m {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing line for P_{i}")))?;
        structure.push(Polynomial::parse_pairs(structure_vars(i), line)?);
    }
    if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
        return Err(Error::Parse(format!("unexpected trailing line `{extra}`")));
    }
    NilGroupSpec::new(id, m, k, structure)
}

pub fn spec_to_text(spec: &NilGroupSpec) -> String {
    let mut out = format!("{} {}\n", spec.m, spec.k);
    for p in &spec.structure {
        out.push_str(&p.to_pairs());
        out.push('\n');
    }
    out
}
