//! Polygon arguments: a JSON file, inline JSON, `-` for stdin, or a family
//! shorthand such as `quad` or `penthouse:a=2,b=3/5`.

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use symbill_core::families::FamilySpec;
use symbill_core::geometry::ValidationReport;
use symbill_core::rational;
use symbill_core::{Polygon, PolygonSpec};

pub enum Source {
    Vertices(PolygonSpec),
    Family(FamilySpec),
}

impl Source {
    pub fn parse(arg: &str) -> Result<Self> {
        let text = if arg == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else if arg.trim_start().starts_with('{') {
            arg.to_string()
        } else if Path::new(arg).is_file() {
            std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
        } else {
            return shorthand(arg).map(Source::Family);
        };
        let value: serde_json::Value = serde_json::from_str(&text).context("polygon input is not valid JSON")?;
        if value.get("family").is_some() {
            Ok(Source::Family(serde_json::from_value(value).context("bad family spec")?))
        } else {
            Ok(Source::Vertices(serde_json::from_value(value).context("bad polygon")?))
        }
    }

    /// The polygon, with the validation report for raw vertices.
    pub fn build(&self) -> Result<(Polygon, Option<ValidationReport>)> {
        match self {
            Source::Vertices(spec) => {
                let (p, r) = spec.validate()?;
                Ok((p, Some(r)))
            }
            Source::Family(spec) => Ok((spec.build()?, None)),
        }
    }
}

pub fn load_polygon(arg: &str) -> Result<Polygon> {
    Ok(Source::parse(arg)?.build()?.0)
}

fn shorthand(arg: &str) -> Result<FamilySpec> {
    let (family, rest) = arg.split_once(':').unwrap_or((arg, ""));
    if family.is_empty() || !family.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        bail!("{arg:?} is neither a file, JSON, nor a family name");
    }
    let mut params = Vec::new();
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let Some((k, v)) = kv.split_once('=') else { bail!("expected key=value, got {kv:?}") };
        params.push((k.trim(), rational::parse(v.trim())?));
    }
    let params: Vec<(&str, _)> = params.iter().map(|(k, v)| (*k, v.clone())).collect();
    Ok(FamilySpec::new(family, &params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symbill_core::rational::{int, ratio};

    #[test]
    fn shorthand_builds_family_specs() {
        let Source::Family(spec) = Source::parse("penthouse:a=2,b=3/5").unwrap() else { panic!() };
        assert_eq!(spec, FamilySpec::new("penthouse", &[("a", int(2)), ("b", ratio(3, 5))]));
        assert!(Source::parse("quad").unwrap().build().unwrap().1.is_none());
        assert!(Source::parse("no/such/file.json").is_err());
    }

    #[test]
    fn inline_json_vertices_are_validated() {
        let (p, r) = Source::parse(r#"{"vertices": [[0, 0], [0, 1], [1, 0]]}"#).unwrap().build().unwrap();
        assert_eq!(p.len(), 3);
        assert!(r.unwrap().reversed);
    }
}
