//! `symbill`: exact symplectic billiards from the command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure,
//! 3 budget exhausted.

mod input;
mod scan;

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use symbill_core::billiard::{FloatMap, FloatPhasePoint, OrbitMode};
use symbill_core::families;
use symbill_core::portrait::{self, ImageFormat, PortraitSpec};
use symbill_core::rational::{self, int, RatText};
use symbill_core::reproduce::{self, KNOWN_FAILURES};
use symbill_core::scan::{search_kite, SearchOptions};
use symbill_core::tiling::{check_certificate, TilingVerdict};
use symbill_core::*;

use input::{load_polygon, Source};

#[derive(Parser)]
#[command(name = "symbill", version, about = "Exact symplectic billiards in convex polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for OrbitMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => OrbitMode::Exact,
            ModeArg::Float => OrbitMode::Float,
        }
    }
}

/// POLYGON is a JSON file (vertices or family spec), inline JSON, `-` for
/// stdin, or a family shorthand like `quad` or `penthouse:a=2,b=3/5`.
#[derive(Subcommand)]
enum Command {
    /// Check convexity and orientation; print the validation report.
    Validate { polygon: String },
    /// Apply the map (or its inverse) once.
    Step {
        polygon: String,
        /// Phase point as `i,s,j,t`: tail side, tail fraction, head side, head fraction.
        #[arg(long)]
        phase: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Apply the inverse map.
        #[arg(long)]
        back: bool,
    },
    /// Iterate until the start recurs, the map halts, or --max steps pass.
    Orbit {
        polygon: String,
        #[arg(long)]
        phase: String,
        #[arg(long, default_value_t = 1000)]
        max: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Include every visited phase point.
        #[arg(long)]
        points: bool,
    },
    /// Search for a periodic tiling; exit 0 iff the polygon is certified fully periodic.
    Certify {
        polygon: String,
        #[arg(long, default_value_t = Budget::default().max_tiles)]
        max_tiles: usize,
        #[arg(long, default_value_t = Budget::default().max_steps)]
        max_steps: usize,
        /// Write the certificate here and print a summary instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a certificate independently.
    CheckCert { certificate: PathBuf },
    /// Render a period-colored phase portrait.
    Portrait {
        polygon: String,
        /// `NXxNY` or `N`.
        #[arg(long, default_value = "256x256")]
        res: String,
        /// Output file; the extension picks ppm, png, or json.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        max: usize,
        /// Defaults to exact up to 256x256 cells, float beyond.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Pixels per cell in images.
        #[arg(long, default_value_t = 1)]
        scale: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Difference body and both sides of its area identity.
    Diffbody { polygon: String },
    /// Seeded random perturbation of the vertices by at most eps per coordinate.
    Perturb {
        polygon: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certify every member of a parameter box and compare with the predicted periods.
    Scan {
        /// penthouse, trapezoid, lattice_hexagon, hexhouse, or special_octagon.
        family: String,
        /// Comma-separated `key=value`. Integer families take bounds
        /// (hexhouse `w=6,h=4`, special_octagon `W=5,H=5`, lattice_hexagon
        /// `max=3`); penthouse and trapezoid take a rational, a list
        /// `x|y|z`, or a grid `lo..hi:steps` per parameter.
        #[arg(long = "box")]
        bounds: Option<String>,
        /// JSONL results; existing entries are reused.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = Budget::default().max_tiles)]
        max_tiles: usize,
        #[arg(long, default_value_t = Budget::default().max_steps)]
        max_steps: usize,
    },
    /// Look for periodic orbits of the kite below a period bound.
    SearchKite {
        #[arg(long, default_value_t = reproduce::kite_search_options().max_period)]
        max_period: usize,
        /// Sample the cell centers of a GRID x GRID portrait.
        #[arg(long, default_value_t = reproduce::kite_search_options().grid)]
        grid: usize,
        #[arg(long, default_value_t = reproduce::kite_search_options().random_samples)]
        random: usize,
        #[arg(long, default_value_t = reproduce::kite_search_options().seed)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Rerun every published result and print a pass/fail table.
    VerifyPaper {
        /// Comma-separated subset of: quad, penthouse, bifurcation,
        /// trapezoid, hexagon, properties, stability, kite, scans.
        #[arg(long)]
        only: Option<String>,
    },
    /// Start the JSON service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Wall-clock limit per request, in seconds.
        #[arg(long, default_value_t = 30)]
        time_limit: u64,
        /// Allowed CORS origin; any if omitted.
        #[arg(long)]
        origin: Option<String>,
    },
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Success,
    VerificationFailure,
    BudgetExhausted,
}

impl Outcome {
    fn code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::VerificationFailure => 2,
            Outcome::BudgetExhausted => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// A reader that closed the pipe early is not an error.
fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = jobs {
        builder = builder.num_threads(k);
    }
    Ok(builder.build()?.install(f))
}

fn list(periods: impl IntoIterator<Item = usize>) -> String {
    periods.into_iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

fn parse_resolution(text: &str) -> Result<[usize; 2]> {
    let parse = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad resolution {text:?}"));
    match text.split_once(['x', 'X']) {
        Some((a, b)) => Ok([parse(a)?, parse(b)?]),
        None => {
            let n = parse(text)?;
            Ok([n, n])
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Validate { polygon } => {
            let source = Source::parse(&polygon)?;
            match source.build() {
                Ok((p, report)) => {
                    let report = match report {
                        Some(r) => r,
                        None => p.to_spec().validate()?.1,
                    };
                    print_json(&json!({ "valid": true, "polygon": p, "report": report }))?;
                    Ok(Outcome::Success)
                }
                Err(e) => {
                    print_json(&json!({ "valid": false, "error": format!("{e:#}") }))?;
                    Ok(Outcome::VerificationFailure)
                }
            }
        }
        Command::Step { polygon, phase, mode, back } => {
            let map = BilliardMap::new(load_polygon(&polygon)?);
            let pp = PhasePoint::parse(map.polygon(), &phase)?;
            let out = match (OrbitMode::from(mode), back) {
                (OrbitMode::Exact, false) => step_json(map.step(&pp)),
                (OrbitMode::Exact, true) => step_json(map.step_back(&pp)),
                (OrbitMode::Float, false) => match FloatMap::new(&map).step(&FloatPhasePoint::from(&pp)) {
                    Ok(next) => json!({ "next": next }),
                    Err(reason) => json!({ "halt": reason }),
                },
                (OrbitMode::Float, true) => {
                    // The inverse is conjugate to the map by chord reversal.
                    match FloatMap::new(&map).step(&FloatPhasePoint::from(&pp.reversed())) {
                        Ok(p) => json!({ "next": FloatPhasePoint { tail_side: p.head_side, tail: p.head, head_side: p.tail_side, head: p.tail } }),
                        Err(reason) => json!({ "halt": reason }),
                    }
                }
            };
            print_json(&out)?;
            Ok(Outcome::Success)
        }
        Command::Orbit { polygon, phase, max, mode, points } => {
            let map = BilliardMap::new(load_polygon(&polygon)?);
            let pp = PhasePoint::parse(map.polygon(), &phase)?;
            let report = match OrbitMode::from(mode) {
                OrbitMode::Exact => {
                    let opts = OrbitOptions::new(max);
                    map.orbit(&pp, if points { opts.collecting() } else { opts })
                }
                OrbitMode::Float => FloatMap::new(&map).orbit(&FloatPhasePoint::from(&pp), max, points),
            };
            print_json(&report)?;
            Ok(match report.status {
                OrbitStatus::Capped { .. } => Outcome::BudgetExhausted,
                _ => Outcome::Success,
            })
        }
        Command::Certify { polygon, max_tiles, max_steps, out } => {
            let map = BilliardMap::new(load_polygon(&polygon)?);
            let cert = certify(&map, Budget { max_tiles, max_steps })?;
            let verdict = match &cert.verdict {
                TilingVerdict::FullyPeriodic => "fully periodic".to_string(),
                TilingVerdict::Incomplete { residual } => format!("incomplete, uncovered area {}", residual.0),
                TilingVerdict::Inconclusive => "inconclusive, tile budget exhausted".to_string(),
            };
            let summary = format!("{verdict}; {} tile orbits; periods {}", cert.tile_orbits.len(), list(cert.point_periods()));
            match out {
                Some(path) => {
                    fs::write(&path, serde_json::to_string_pretty(&cert)?).with_context(|| format!("writing {}", path.display()))?;
                    println!("{summary}");
                }
                None => {
                    print_json(&cert)?;
                    eprintln!("{summary}");
                }
            }
            Ok(match cert.verdict {
                TilingVerdict::FullyPeriodic => Outcome::Success,
                TilingVerdict::Inconclusive => Outcome::BudgetExhausted,
                TilingVerdict::Incomplete { .. } if cert.stats.abandoned > 0 => Outcome::BudgetExhausted,
                TilingVerdict::Incomplete { .. } => Outcome::VerificationFailure,
            })
        }
        Command::CheckCert { certificate } => {
            let text = fs::read_to_string(&certificate).with_context(|| format!("reading {}", certificate.display()))?;
            let cert: PeriodicityCertificate = serde_json::from_str(&text).context("not a certificate")?;
            let report = check_certificate(&cert);
            print_json(&report)?;
            Ok(if report.ok { Outcome::Success } else { Outcome::VerificationFailure })
        }
        Command::Portrait { polygon, res, out, max, mode, scale, jobs } => {
            let map = BilliardMap::new(load_polygon(&polygon)?);
            let [nx, ny] = parse_resolution(&res)?;
            let mut spec = PortraitSpec::new(nx, ny, max);
            if let Some(m) = mode {
                spec = spec.with_mode(m.into());
            }
            let p = in_pool(jobs, || portrait::compute(&map, spec))??;
            write_portrait(&p, &out, scale)?;
            println!("periods: {}", list(p.periods()));
            Ok(Outcome::Success)
        }
        Command::Diffbody { polygon } => {
            let p = load_polygon(&polygon)?;
            let d = difference_body(&p);
            let area = d.area();
            let phase = phase_area(&p);
            let twice = &phase * int(2);
            print_json(&json!({
                "difference_body": d,
                "area": RatText(area.clone()),
                "phase_area": RatText(phase.clone()),
                "twice_phase_area": RatText(twice.clone()),
                "area_equals_twice_phase_area": area == twice,
                "area_equals_phase_area": area == phase,
            }))?;
            Ok(Outcome::Success)
        }
        Command::Perturb { polygon, eps, seed } => {
            let eps = rational::parse(&eps)?;
            if eps < int(0) {
                bail!("eps must be non-negative");
            }
            print_json(&families::perturb(&load_polygon(&polygon)?, &eps, seed)?)?;
            Ok(Outcome::Success)
        }
        Command::Scan { family, bounds, out, jobs, max_tiles, max_steps } => scan::run(&family, bounds.as_deref(), out, jobs, Budget { max_tiles, max_steps }),
        Command::SearchKite { max_period, grid, random, seed, mode, jobs } => {
            let opts = SearchOptions { max_period, grid, random_samples: random, seed, mode: mode.into() };
            let report = in_pool(jobs, || search_kite(opts))?;
            print_json(&report)?;
            eprintln!("{}", report.summary);
            Ok(Outcome::Success)
        }
        Command::VerifyPaper { only } => verify_paper(only.as_deref()),
        Command::Serve { port, host, time_limit, origin } => {
            let config = symbill_service::Config { time_limit: Duration::from_secs(time_limit), allowed_origin: origin };
            let addr = SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            tokio::runtime::Runtime::new()?.block_on(symbill_service::serve(addr, config))?;
            Ok(Outcome::Success)
        }
    }
}

fn step_json(r: StepResult) -> serde_json::Value {
    match r {
        StepResult::Next(next) => json!({ "next": next }),
        StepResult::Halt(reason) => json!({ "halt": reason }),
    }
}

fn write_portrait(p: &portrait::Portrait, out: &Path, scale: usize) -> Result<()> {
    let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("");
    let bytes = if ext.eq_ignore_ascii_case("json") {
        p.to_json().into_bytes()
    } else {
        p.render(ImageFormat::from_name(ext)?, scale.max(1))?
    };
    fs::write(out, bytes).with_context(|| format!("writing {}", out.display()))
}

fn verify_paper(only: Option<&str>) -> Result<Outcome> {
    let checks = reproduce::checks();
    let selected: Vec<_> = match only {
        None => checks,
        Some(keys) => {
            let keys: Vec<&str> = keys.split(',').map(str::trim).collect();
            for k in &keys {
                if !checks.iter().any(|(name, _)| name == k) {
                    bail!("unknown check {k:?}");
                }
            }
            checks.into_iter().filter(|(name, _)| keys.contains(name)).collect()
        }
    };
    let (mut passed, mut unexpected, mut known) = (0, 0, 0);
    for (_, check) in selected {
        for r in check() {
            println!("{}", r.line());
            if r.passed {
                passed += 1;
            } else if KNOWN_FAILURES.contains(&r.name.as_str()) {
                known += 1;
            } else {
                unexpected += 1;
            }
        }
    }
    println!("{passed} passed, {known} known failures, {unexpected} unexpected failures");
    Ok(if unexpected == 0 { Outcome::Success } else { Outcome::VerificationFailure })
}
