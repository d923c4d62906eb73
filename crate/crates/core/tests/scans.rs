use std::fs;
use std::io::Write;

use symbill_core::rational::{int, ratio};
use symbill_core::scan::*;
use symbill_core::tiling::check_certificate;
use symbill_core::{Budget, Polygon};

fn small_box() -> Vec<symbill_core::families::FamilySpec> {
    hexhouse_box(4, 2)
}

#[test]
fn embedded_certificates_pass_the_checker() {
    let r = scan_family("hexhouse", small_box(), Budget::default(), &ScanOptions::default()).unwrap();
    assert_eq!(r.summary.members, 8);
    assert!(r.all_conform());
    for e in &r.entries {
        assert!(check_certificate(e.certificate.as_ref().unwrap()).ok);
    }
}

#[test]
fn output_does_not_depend_on_jobs() {
    let run = |jobs| scan_family("hexhouse", small_box(), Budget::default(), &ScanOptions { jobs: Some(jobs), out: None }).unwrap();
    let (a, b) = (run(1), run(3));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn jsonl_resume_skips_stored_members() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.jsonl");
    let opts = ScanOptions { jobs: None, out: Some(path.clone()) };
    let specs = small_box();

    let first = scan_family("hexhouse", specs[..3].to_vec(), Budget::default(), &opts).unwrap();
    assert_eq!(first.summary.members, 3);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 3);

    // An interrupted writer leaves a torn last line.
    fs::OpenOptions::new().append(true).open(&path).unwrap().write_all(b"{\"spec\":{\"fam").unwrap();
    assert_eq!(load_entries(&path, Budget::default()).unwrap().len(), 3);

    let full = scan_family("hexhouse", specs.clone(), Budget::default(), &opts).unwrap();
    let fresh = scan_family("hexhouse", specs, Budget::default(), &ScanOptions::default()).unwrap();
    assert_eq!(full, fresh);
    let stored = load_entries(&path, Budget::default()).unwrap();
    assert_eq!(stored, fresh.entries);
}

#[test]
fn stored_entries_under_another_budget_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.jsonl");
    let opts = ScanOptions { jobs: None, out: Some(path.clone()) };
    let tiny = Budget { max_tiles: 1, max_steps: 1 };
    let a = scan_family("hexhouse", small_box(), tiny, &opts).unwrap();
    assert_eq!(a.summary.fully_periodic, 0);
    let b = scan_family("hexhouse", small_box(), Budget::default(), &opts).unwrap();
    assert_eq!(b.summary.fully_periodic, b.summary.members);
}

#[test]
fn tall_penthouse_periods_do_not_depend_on_roof_position() {
    let r = scan_penthouse(&[int(2)], &[ratio(1, 4), ratio(3, 5), ratio(9, 10)], Budget::default(), &ScanOptions::default()).unwrap();
    assert_eq!(r.scan.summary.members, 3);
    for e in &r.scan.entries {
        assert_eq!(e.periods, vec![12, 20, 28]);
        assert!(e.conforms);
    }
}

#[test]
fn modulus_two_matches_formula() {
    let r = scan_penthouse(&[ratio(2, 3)], &[ratio(1, 3), ratio(1, 2)], Budget::default(), &ScanOptions::default()).unwrap();
    assert!(r.scan.entries.iter().all(|e| e.periods == vec![28, 36, 44] && e.conforms));
}

#[test]
fn bifurcation_keeps_the_largest_period() {
    let a = [int(2), int(1), ratio(2, 3)];
    let r = scan_penthouse(&a, &[ratio(3, 5)], Budget::default(), &ScanOptions::default()).unwrap();
    assert_eq!(r.bifurcations.len(), 1);
    let bf = &r.bifurcations[0];
    assert_eq!((bf.m_below, bf.m_above), (1, 2));
    assert_eq!(bf.persisting, vec![28]);
    assert!(bf.periods_at.contains(&28));
}

#[test]
fn hexagon_scan_respects_four_n() {
    let r = scan_family("lattice_hexagon", lattice_hexagon_box(2), Budget::default(), &ScanOptions::default()).unwrap();
    assert!(r.summary.members > 1);
    for e in &r.entries {
        let bound = e.period_bound.unwrap();
        assert!(e.periods.iter().all(|&p| p <= bound));
    }
}

#[test]
fn search_finds_triangle_period_three() {
    let tri = Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap();
    let r = search_periodic(&tri, SearchOptions::new(10, 3, 30));
    assert!(r.periods().contains(&3));
    assert_ne!(r.summary, "none below 10");
}

#[test]
fn search_is_seeded() {
    let a = search_kite(SearchOptions { seed: 7, ..SearchOptions::new(50, 8, 40) });
    let b = search_kite(SearchOptions { seed: 7, ..SearchOptions::new(50, 8, 40) });
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.samples, 8 * 8 - 16 + 40);
    let total: usize = a.histogram.iter().map(|b| b.count).sum();
    assert_eq!(total + a.capped, a.samples);
}
