//! Family sweeps and the periodic-orbit search.
//!
//! A sweep certifies every member of a parameter box, checks each
//! certificate independently and records whether the member behaves as the
//! family is expected to. Results can be streamed to a JSONL file; a rerun
//! against the same file only computes what is missing.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::{BilliardMap, FloatMap, FloatPhasePoint, OrbitMode, OrbitOptions, OrbitStatus, PhasePoint};
use crate::families::{self, FamilySpec, HexagonSides};
use crate::geometry::Polygon;
use crate::portrait::cell_center;
use crate::rational::{int, Rat};
use crate::tiling::{certify, check_certificate, Budget, PeriodicityCertificate, TilingVerdict};

/// Period sets shown in the hexhouse and octagon figures.
pub const FIGURE_PERIOD_SETS: [&[usize]; 6] = [
    &[4, 12, 28],
    &[4, 28, 108, 188],
    &[4, 44, 68, 92],
    &[4, 28, 44, 60, 68, 84, 108],
    &[4, 56, 68, 108],
    &[4, 16, 32, 44, 68, 92],
];

/// `{16m-4, 16m+4, 16m+12}`.
pub fn penthouse_periods(m: i64) -> Vec<usize> {
    [16 * m - 4, 16 * m + 4, 16 * m + 12].iter().map(|&p| p as usize).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub spec: FamilySpec,
    pub budget: Budget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
    /// Period set predicted for this member, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<usize>>,
    /// Upper bound on periods, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_bound: Option<usize>,
    pub verdict: Option<TilingVerdict>,
    pub periods: Vec<usize>,
    pub conforms: bool,
    pub check_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PeriodicityCertificate>,
}

impl ScanEntry {
    pub fn is_fully_periodic(&self) -> bool {
        self.verdict == Some(TilingVerdict::FullyPeriodic)
    }
}

fn param(spec: &FamilySpec, key: &str) -> Option<Rat> {
    spec.params.get(key).map(|r| r.0.clone())
}

fn small(spec: &FamilySpec, key: &str) -> Option<i64> {
    param(spec, key).filter(|r| r.is_integer()).and_then(|r| num_traits::ToPrimitive::to_i64(&r.to_integer()))
}

/// Modulus, predicted periods and period bound for a family member.
fn expectation(spec: &FamilySpec) -> (Option<i64>, Option<Vec<usize>>, Option<usize>) {
    match spec.family.as_str() {
        "penthouse" => match param(spec, "a") {
            Some(a) if a > int(0) => {
                let m = families::penthouse_modulus(&a);
                (Some(m), families::penthouse_is_generic(&a).then(|| penthouse_periods(m)), None)
            }
            _ => (None, None, None),
        },
        "trapezoid" => match (param(spec, "u"), param(spec, "v")) {
            (Some(u), Some(v)) if u > v && v > int(0) => {
                let m = families::trapezoid_modulus(&u, &v);
                (Some(m), families::trapezoid_is_generic(&u, &v).then(|| penthouse_periods(m)), None)
            }
            _ => (None, None, None),
        },
        "lattice_hexagon" => {
            let sides = (|| HexagonSides::new(small(spec, "p1")?, small(spec, "q1")?, small(spec, "r1")?, small(spec, "p2")?).ok())();
            (None, None, sides.map(|s| 4 * s.n() as usize))
        }
        _ => (None, None, None),
    }
}

/// Certifies and checks one family member.
pub fn scan_member(spec: &FamilySpec, budget: Budget) -> ScanEntry {
    let (modulus, expected, period_bound) = expectation(spec);
    let mut entry = ScanEntry {
        spec: spec.clone(),
        budget,
        modulus,
        expected,
        period_bound,
        verdict: None,
        periods: Vec::new(),
        conforms: false,
        check_ok: false,
        error: None,
        certificate: None,
    };
    let polygon = match spec.build() {
        Ok(p) => p,
        Err(e) => {
            entry.error = Some(e.to_string());
            return entry;
        }
    };
    let cert = match certify(&BilliardMap::new(polygon), budget) {
        Ok(c) => c,
        Err(e) => {
            entry.error = Some(e.to_string());
            return entry;
        }
    };
    let check = check_certificate(&cert);
    entry.check_ok = check.ok;
    if !check.ok {
        entry.error = Some(check.failures.join("; "));
    }
    entry.periods = cert.point_periods().into_iter().collect();
    entry.verdict = Some(cert.verdict.clone());
    entry.conforms = cert.is_fully_periodic()
        && check.ok
        && entry.expected.as_ref().is_none_or(|e| *e == entry.periods)
        && entry.period_bound.is_none_or(|b| entry.periods.iter().all(|&p| p <= b));
    entry.certificate = Some(cert);
    entry
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub members: usize,
    pub fully_periodic: usize,
    pub conforming: usize,
    pub failed: usize,
    pub check_failures: usize,
    /// Members per period set, keyed like `"4,12,28"`.
    pub period_sets: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub family: String,
    pub budget: Budget,
    pub summary: ScanSummary,
    pub counterexamples: Vec<FamilySpec>,
    pub entries: Vec<ScanEntry>,
}

pub fn period_key(periods: &[usize]) -> String {
    periods.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

impl ScanReport {
    fn new(family: &str, budget: Budget, mut entries: Vec<ScanEntry>) -> Self {
        entries.sort_by(|a, b| a.spec.cmp(&b.spec));
        let mut summary = ScanSummary { members: entries.len(), ..Default::default() };
        for e in &entries {
            summary.fully_periodic += e.is_fully_periodic() as usize;
            summary.conforming += e.conforms as usize;
            summary.failed += e.certificate.is_none() as usize;
            summary.check_failures += (e.certificate.is_some() && !e.check_ok) as usize;
            if e.is_fully_periodic() {
                *summary.period_sets.entry(period_key(&e.periods)).or_default() += 1;
            }
        }
        let counterexamples = entries.iter().filter(|e| !e.conforms).map(|e| e.spec.clone()).collect();
        ScanReport { family: family.to_string(), budget, summary, counterexamples, entries }
    }

    pub fn all_conform(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Members whose period set is one of [`FIGURE_PERIOD_SETS`].
    pub fn figure_matches(&self) -> Vec<(&FamilySpec, &[usize])> {
        self.entries
            .iter()
            .filter(|e| e.is_fully_periodic())
            .filter_map(|e| FIGURE_PERIOD_SETS.iter().find(|s| **s == e.periods.as_slice()).map(|s| (&e.spec, *s)))
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// JSONL file to stream entries to and resume from.
    pub out: Option<PathBuf>,
}

/// Previously stored entries computed under `budget`. A torn last line from
/// an interrupted run is dropped.
pub fn load_entries(path: &Path, budget: Budget) -> io::Result<Vec<ScanEntry>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        if let Ok(entry) = serde_json::from_str::<ScanEntry>(&line?) {
            if entry.budget == budget {
                out.push(entry);
            }
        }
    }
    Ok(out)
}

fn write_sorted(path: &Path, entries: &[ScanEntry]) -> io::Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = io::BufWriter::new(File::create(&tmp)?);
        for e in entries {
            serde_json::to_writer(&mut f, e)?;
            f.write_all(b"\n")?;
        }
        f.flush()?;
    }
    fs::rename(tmp, path)
}

fn in_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> io::Result<T> {
    match jobs {
        None => Ok(work()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build().map_err(io::Error::other)?;
            Ok(pool.install(work))
        }
    }
}

/// Certifies every member of `specs`. With an output file, entries already
/// stored under the same budget are reused and new ones are appended as they
/// finish; the file is rewritten sorted at the end.
pub fn scan_members(family: &str, specs: Vec<FamilySpec>, budget: Budget, opts: &ScanOptions) -> io::Result<ScanReport> {
    let wanted: BTreeSet<FamilySpec> = specs.into_iter().collect();
    let mut done = match &opts.out {
        Some(path) => load_entries(path, budget)?,
        None => Vec::new(),
    };
    done.retain(|e| wanted.contains(&e.spec));
    let have: HashSet<FamilySpec> = done.iter().map(|e| e.spec.clone()).collect();
    let todo: Vec<FamilySpec> = wanted.into_iter().filter(|s| !have.contains(s)).collect();

    let sink = match &opts.out {
        Some(path) => {
            write_sorted(path, &done)?;
            Some(Mutex::new(OpenOptions::new().append(true).open(path)?))
        }
        None => None,
    };
    let fresh: Vec<ScanEntry> = in_pool(opts.jobs, || {
        todo.par_iter()
            .map(|spec| {
                let entry = scan_member(spec, budget);
                if let Some(sink) = &sink {
                    let mut line = serde_json::to_vec(&entry)?;
                    line.push(b'\n');
                    let mut f = sink.lock().expect("scan sink poisoned");
                    f.write_all(&line)?;
                    f.flush()?;
                }
                Ok(entry)
            })
            .collect::<io::Result<Vec<_>>>()
    })??;
    done.extend(fresh);
    let report = ScanReport::new(family, budget, done);
    if let Some(path) = &opts.out {
        write_sorted(path, &report.entries)?;
    }
    Ok(report)
}

/// `lo, lo + (hi-lo)/steps, ..., hi`.
pub fn grid(lo: &Rat, hi: &Rat, steps: usize) -> Vec<Rat> {
    if steps == 0 {
        return vec![lo.clone()];
    }
    let n = Rat::from_integer(steps.into());
    (0..=steps).map(|k| lo + (hi - lo) * Rat::from_integer(k.into()) / &n).collect()
}

fn int_spec(family: &str, params: &[(&str, i64)]) -> FamilySpec {
    let params: Vec<(&str, Rat)> = params.iter().map(|&(k, v)| (k, int(v))).collect();
    FamilySpec::new(family, &params)
}

/// Hexhouses with `0 < x1 < x2 < w <= max_w` and `1 <= h <= max_h`.
pub fn hexhouse_box(max_w: i64, max_h: i64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for w in 1..=max_w {
        for x1 in 1..w {
            for x2 in x1 + 1..w {
                for h in 1..=max_h {
                    out.push(int_spec("hexhouse", &[("w", w), ("x1", x1), ("x2", x2), ("h", h)]));
                }
            }
        }
    }
    out
}

/// Special octagons with `W <= max_w`, `H <= max_h` and both cuts strictly
/// between `max(W,H)` and `W+H`.
pub fn special_octagon_box(max_w: i64, max_h: i64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for w in 1..=max_w {
        for h in 1..=max_h {
            for c1 in w.max(h) + 1..w + h {
                for c2 in w.max(h) + 1..w + h {
                    out.push(int_spec("special_octagon", &[("W", w), ("H", h), ("c1", c1), ("c2", c2)]));
                }
            }
        }
    }
    out
}

/// Lattice hexagons all of whose six side counts are at most `max`.
pub fn lattice_hexagon_box(max: i64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for p1 in 1..=max {
        for q1 in 1..=max {
            for r1 in 1..=max {
                for p2 in 1..=max {
                    if HexagonSides::new(p1, q1, r1, p2).is_ok_and(|s| s.as_array().iter().all(|&k| k <= max)) {
                        out.push(int_spec("lattice_hexagon", &[("p1", p1), ("q1", q1), ("r1", r1), ("p2", p2)]));
                    }
                }
            }
        }
    }
    out
}

pub fn scan_family(family: &str, specs: Vec<FamilySpec>, budget: Budget, opts: &ScanOptions) -> io::Result<ScanReport> {
    scan_members(family, specs, budget, opts)
}

/// Period sets on either side of a change of modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub m_below: i64,
    pub m_above: i64,
    pub periods_below: Vec<usize>,
    pub periods_above: Vec<usize>,
    /// Periods of scanned members sitting exactly at the transition.
    pub periods_at: Vec<usize>,
    pub persisting: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenthouseReport {
    pub scan: ScanReport,
    pub bifurcations: Vec<Bifurcation>,
}

fn union(entries: &[&ScanEntry]) -> BTreeSet<usize> {
    entries.iter().filter(|e| e.is_fully_periodic()).flat_map(|e| e.periods.iter().copied()).collect()
}

/// Certifies `penthouse(a, b)` for every pair and compares the period sets
/// across consecutive moduli.
pub fn scan_penthouse(a_values: &[Rat], b_values: &[Rat], budget: Budget, opts: &ScanOptions) -> io::Result<PenthouseReport> {
    let specs = a_values
        .iter()
        .flat_map(|a| b_values.iter().map(move |b| FamilySpec::new("penthouse", &[("a", a.clone()), ("b", b.clone())])))
        .collect();
    let scan = scan_members("penthouse", specs, budget, opts)?;

    let mut generic: BTreeMap<i64, Vec<&ScanEntry>> = BTreeMap::new();
    let mut boundary: BTreeMap<i64, Vec<&ScanEntry>> = BTreeMap::new();
    for e in &scan.entries {
        let Some(m) = e.modulus else { continue };
        if e.expected.is_some() {
            generic.entry(m).or_default().push(e);
        } else {
            boundary.entry(m).or_default().push(e);
        }
    }
    let ms: Vec<i64> = generic.keys().copied().collect();
    let bifurcations = ms
        .windows(2)
        .map(|w| {
            let below = union(&generic[&w[0]]);
            let above = union(&generic[&w[1]]);
            // (a+1)/a = m+1 is where the modulus steps from m to m+1.
            let at = boundary.get(&w[1]).map(|v| union(v)).unwrap_or_default();
            Bifurcation {
                m_below: w[0],
                m_above: w[1],
                persisting: below.intersection(&above).copied().collect(),
                periods_below: below.into_iter().collect(),
                periods_above: above.into_iter().collect(),
                periods_at: at.into_iter().collect(),
            }
        })
        .collect();
    Ok(PenthouseReport { scan, bifurcations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub max_period: usize,
    /// Cell centers of a `grid x grid` portrait are sampled.
    pub grid: usize,
    pub random_samples: usize,
    pub seed: u64,
    pub mode: OrbitMode,
}

impl SearchOptions {
    pub fn new(max_period: usize, grid: usize, random_samples: usize) -> Self {
        SearchOptions { max_period, grid, random_samples, seed: 0, mode: OrbitMode::Exact }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoundOrbit {
    pub start: PhasePoint,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub polygon: Polygon,
    pub options: SearchOptions,
    pub samples: usize,
    pub periodic: Vec<FoundOrbit>,
    pub halted: usize,
    pub capped: usize,
    pub precision_overflow: usize,
    /// Steps survived by orbits that stopped before the cap, in decades.
    pub histogram: Vec<HistogramBin>,
    pub longest_before_cap: usize,
    pub summary: String,
}

impl SearchReport {
    pub fn periods(&self) -> BTreeSet<usize> {
        self.periodic.iter().map(|f| f.period).collect()
    }
}

pub fn random_phase_point(polygon: &Polygon, rng: &mut ChaCha8Rng) -> PhasePoint {
    let n = polygon.len();
    loop {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j || polygon.side_cross(i, j) == int(0) {
            continue;
        }
        let mut frac = || {
            let q: i64 = rng.gen_range(2..=1000);
            Rat::new(rng.gen_range(1..q).into(), q.into())
        };
        let (s, t) = (frac(), frac());
        return PhasePoint::new(polygon, i, s, j, t).expect("fractions are inside (0,1)");
    }
}

/// Sample points: grid cell centers row by row, then seeded random rational
/// points.
pub fn sample_points(polygon: &Polygon, grid: usize, random: usize, seed: u64) -> Vec<PhasePoint> {
    let mut out = Vec::new();
    for cy in 0..grid {
        for cx in 0..grid {
            if let Ok(pp) = cell_center(polygon, [grid, grid], cx, cy) {
                out.push(pp);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..random).map(|_| random_phase_point(polygon, &mut rng)));
    out
}

/// Runs orbits of length up to `max_period` from sample points of `polygon`
/// and reports every periodic one found.
pub fn search_periodic(polygon: &Polygon, opts: SearchOptions) -> SearchReport {
    let map = BilliardMap::new(polygon.clone());
    let float = (opts.mode == OrbitMode::Float).then(|| FloatMap::new(&map));
    let points = sample_points(polygon, opts.grid, opts.random_samples, opts.seed);
    let statuses: Vec<OrbitStatus> = points
        .par_iter()
        .map(|pp| match &float {
            Some(fm) => fm.orbit(&FloatPhasePoint::from(pp), opts.max_period, false).status,
            None => {
                let mut o = OrbitOptions::new(opts.max_period);
                o.bit_budget = u64::MAX;
                map.orbit(pp, o).status
            }
        })
        .collect();

    let mut periodic = Vec::new();
    let (mut halted, mut capped, mut overflow) = (0, 0, 0);
    let mut stopped = BTreeMap::<usize, usize>::new();
    for (pp, status) in points.iter().zip(&statuses) {
        let survived = match *status {
            OrbitStatus::Periodic { period } => {
                periodic.push(FoundOrbit { start: pp.clone(), period });
                period
            }
            OrbitStatus::HaltedForward { steps, .. } => {
                halted += 1;
                steps
            }
            OrbitStatus::Capped { precision_overflow, .. } => {
                capped += 1;
                overflow += precision_overflow as usize;
                continue;
            }
        };
        *stopped.entry(survived).or_default() += 1;
    }
    let mut histogram = Vec::new();
    let mut from = 0;
    let mut to = 10;
    while from < opts.max_period.max(1) {
        let count = stopped.range(from..to).map(|(_, c)| c).sum();
        histogram.push(HistogramBin { from, to: to.min(opts.max_period.max(1)), count });
        from = to;
        to *= 10;
    }
    let longest_before_cap = stopped.keys().next_back().copied().unwrap_or(0);
    let summary = if periodic.is_empty() {
        format!("none below {}", opts.max_period)
    } else {
        let periods: Vec<usize> = periodic.iter().map(|f| f.period).collect::<BTreeSet<_>>().into_iter().collect();
        format!("periods found: {}", period_key(&periods))
    };
    SearchReport {
        polygon: polygon.clone(),
        options: opts,
        samples: points.len(),
        periodic,
        halted,
        capped,
        precision_overflow: overflow,
        histogram,
        longest_before_cap,
        summary,
    }
}

pub fn search_kite(opts: SearchOptions) -> SearchReport {
    search_periodic(&families::kite(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn penthouse_formula() {
        assert_eq!(penthouse_periods(1), vec![12, 20, 28]);
        assert_eq!(penthouse_periods(2), vec![28, 36, 44]);
    }

    #[test]
    fn boxes_have_expected_sizes() {
        // C(w-1, 2) roofs for each w, times 4 heights.
        assert_eq!(hexhouse_box(6, 4).len(), (1 + 3 + 6 + 10) * 4);
        assert!(special_octagon_box(1, 1).is_empty());
        assert_eq!(special_octagon_box(2, 2).len(), 1);
        assert_eq!(lattice_hexagon_box(1).len(), 1);
    }

    #[test]
    fn grid_includes_ends() {
        assert_eq!(grid(&int(1), &int(2), 4), vec![int(1), ratio(5, 4), ratio(3, 2), ratio(7, 4), int(2)]);
    }

    #[test]
    fn member_entry_for_square_hexagon() {
        let e = scan_member(&int_spec("lattice_hexagon", &[("p1", 1), ("q1", 1), ("r1", 1), ("p2", 1)]), Budget::default());
        assert!(e.conforms && e.check_ok);
        assert_eq!(e.period_bound, Some(4 * 12));
    }

    #[test]
    fn bad_member_is_recorded_not_raised() {
        let e = scan_member(&int_spec("hexhouse", &[("w", 2), ("x1", 0), ("x2", 2), ("h", 1)]), Budget::default());
        assert!(e.error.is_some() && !e.conforms && e.certificate.is_none());
    }

    #[test]
    fn triangle_search_finds_period_three() {
        let tri = Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap();
        let r = search_periodic(&tri, SearchOptions::new(10, 3, 20));
        assert!(r.periods().contains(&3));
    }
}
