//! The `scan` subcommand: parameter boxes and the summary table.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use symbill_core::families::FamilySpec;
use symbill_core::rational::{self, int, Rat};
use symbill_core::reproduce::penthouse_scan_params;
use symbill_core::scan::{self, grid, period_key, ScanOptions, ScanReport};
use symbill_core::tiling::{Budget, TilingVerdict};

use crate::Outcome;

/// `key=value` pairs of a `--box` argument.
fn pairs(text: Option<&str>) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for kv in text.unwrap_or("").split(',').filter(|s| !s.trim().is_empty()) {
        let Some((k, v)) = kv.split_once('=') else { bail!("expected key=value in --box, got {kv:?}") };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// A rational, `x|y|z`, or `lo..hi:steps`.
fn values(text: &str) -> Result<Vec<Rat>> {
    if let Some((range, steps)) = text.split_once(':') {
        let (lo, hi) = range.split_once("..").with_context(|| format!("expected lo..hi:steps, got {text:?}"))?;
        let steps: usize = steps.parse().with_context(|| format!("bad step count in {text:?}"))?;
        return Ok(grid(&rational::parse(lo)?, &rational::parse(hi)?, steps));
    }
    text.split('|').map(|v| Ok(rational::parse(v)?)).collect()
}

fn bound(box_: &BTreeMap<String, String>, key: &str, default: i64) -> Result<i64> {
    match box_.get(key) {
        None => Ok(default),
        Some(v) => v.parse().with_context(|| format!("{key} must be an integer")),
    }
}

fn check_keys(box_: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    for k in box_.keys() {
        if !allowed.contains(&k.as_str()) {
            bail!("unknown --box key {k:?}; expected one of {}", allowed.join(", "));
        }
    }
    Ok(())
}

fn rat_values(box_: &BTreeMap<String, String>, key: &str, default: &str) -> Result<Vec<Rat>> {
    values(box_.get(key).map(String::as_str).unwrap_or(default))
}

fn trapezoid_box(box_: &BTreeMap<String, String>) -> Result<Vec<FamilySpec>> {
    let us = rat_values(box_, "u", "1..6:10")?;
    let vs = rat_values(box_, "v", "1/2|1|2")?;
    let offsets = rat_values(box_, "offset", "0")?;
    let hs = rat_values(box_, "h", "1")?;
    let mut out = Vec::new();
    for u in &us {
        for v in vs.iter().filter(|v| *v > &int(0) && *v < u) {
            for o in &offsets {
                for h in &hs {
                    out.push(FamilySpec::new("trapezoid", &[("u", u.clone()), ("v", v.clone()), ("offset", o.clone()), ("h", h.clone())]));
                }
            }
        }
    }
    Ok(out)
}

fn print_table(r: &ScanReport) {
    let s = &r.summary;
    println!("{}: {} members, {} fully periodic, {} conforming, {} failed, {} checker failures", r.family, s.members, s.fully_periodic, s.conforming, s.failed, s.check_failures);
    println!("{:>8}  periods", "members");
    for (key, count) in &s.period_sets {
        println!("{count:>8}  {key}");
    }
    for (spec, periods) in r.figure_matches() {
        let params: Vec<String> = spec.params.iter().map(|(k, v)| format!("{k}={}", v.0)).collect();
        println!("figure set {{{}}} at {}", period_key(periods), params.join(","));
    }
    for spec in &r.counterexamples {
        println!("counterexample: {}", serde_json::to_string(spec).unwrap_or_default());
    }
}

fn outcome(r: &ScanReport) -> Outcome {
    if r.entries.iter().any(|e| e.verdict == Some(TilingVerdict::Inconclusive)) {
        Outcome::BudgetExhausted
    } else if !r.all_conform() {
        Outcome::VerificationFailure
    } else {
        Outcome::Success
    }
}

pub fn run(family: &str, bounds: Option<&str>, out: Option<PathBuf>, jobs: Option<usize>, budget: Budget) -> Result<Outcome> {
    let box_ = pairs(bounds)?;
    let opts = ScanOptions { jobs, out };
    let report = match family {
        "penthouse" => {
            check_keys(&box_, &["a", "b"])?;
            let (da, db) = penthouse_scan_params();
            let a = if box_.contains_key("a") { rat_values(&box_, "a", "")? } else { da };
            let b = if box_.contains_key("b") { rat_values(&box_, "b", "")? } else { db };
            let r = scan::scan_penthouse(&a, &b, budget, &opts)?;
            for bf in &r.bifurcations {
                println!("modulus {} -> {}: {{{}}} -> {{{}}}, at transition {{{}}}, persisting {{{}}}", bf.m_below, bf.m_above, period_key(&bf.periods_below), period_key(&bf.periods_above), period_key(&bf.periods_at), period_key(&bf.persisting));
            }
            r.scan
        }
        "trapezoid" => {
            check_keys(&box_, &["u", "v", "offset", "h"])?;
            scan::scan_family(family, trapezoid_box(&box_)?, budget, &opts)?
        }
        "hexhouse" => {
            check_keys(&box_, &["w", "h"])?;
            scan::scan_family(family, scan::hexhouse_box(bound(&box_, "w", 6)?, bound(&box_, "h", 4)?), budget, &opts)?
        }
        "special_octagon" => {
            check_keys(&box_, &["W", "H"])?;
            scan::scan_family(family, scan::special_octagon_box(bound(&box_, "W", 5)?, bound(&box_, "H", 5)?), budget, &opts)?
        }
        "lattice_hexagon" => {
            check_keys(&box_, &["max"])?;
            scan::scan_family(family, scan::lattice_hexagon_box(bound(&box_, "max", 3)?), budget, &opts)?
        }
        other => bail!("no scan for family {other:?}"),
    };
    print_table(&report);
    Ok(outcome(&report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symbill_core::rational::ratio;

    #[test]
    fn value_syntax() {
        assert_eq!(values("1/2").unwrap(), vec![ratio(1, 2)]);
        assert_eq!(values("1|3/2").unwrap(), vec![int(1), ratio(3, 2)]);
        assert_eq!(values("1..2:2").unwrap(), vec![int(1), ratio(3, 2), int(2)]);
        assert!(values("1..2").is_err());
    }

    #[test]
    fn trapezoid_box_keeps_u_above_v() {
        let b = pairs(Some("u=1|2|3,v=2")).unwrap();
        assert_eq!(trapezoid_box(&b).unwrap().len(), 1);
    }
}
