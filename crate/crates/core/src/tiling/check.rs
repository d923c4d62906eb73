//! Independent verification of a periodicity certificate.
//!
//! Works from the polygon in the plane only: no branch table, no search
//! state. Each tile orbit is replayed by intersecting reflection lines with
//! the sides, the return map is rebuilt from the images of three corners,
//! and the areas are summed against a fresh phase-area computation.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::certify::{PeriodicityCertificate, TilingVerdict};
use super::rect::TileRect;
use crate::billiard::{land, Landing};
use crate::geometry::{cross, Point, Polygon};
use crate::rational::{half, Rat, RatText};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub orbits_checked: usize,
    pub rectangles_checked: usize,
    pub phase_area: RatText,
    pub covered_area: RatText,
    pub failures: Vec<String>,
}

type Mat = [[Rat; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let e = |r: usize, c: usize| &a[r][0] * &b[0][c] + &a[r][1] * &b[1][c];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn scaled_identity(k: i64) -> Mat {
    let k = Rat::from_integer(k.into());
    [[k.clone(), Rat::zero()], [Rat::zero(), k]]
}

fn order_of_matrix(m: &Mat) -> Option<u8> {
    if *m == scaled_identity(1) {
        Some(1)
    } else if *m == scaled_identity(-1) {
        Some(2)
    } else if mat_mul(m, m) == scaled_identity(-1) {
        Some(4)
    } else {
        None
    }
}

/// Fraction on side `k` where the line through `x` with direction `dir`
/// crosses the line of that side.
fn hit_fraction(polygon: &Polygon, k: usize, x: &Point, dir: &Point) -> Rat {
    cross(&(x - polygon.vertex(k)), dir) / cross(polygon.side(k), dir)
}

struct Replay {
    rects: Vec<TileRect>,
    end: TileRect,
    linear: Mat,
}

/// Pushes `start` forward `length` times, failing if a vertex line cuts
/// through the rectangle on the way.
fn replay(polygon: &Polygon, start: &TileRect, length: usize) -> Result<Replay, String> {
    let mut rect = start.clone();
    let (s0, s1) = start.s.clone();
    let (t0, t1) = start.t.clone();
    let mut corners = [[s0.clone(), t0.clone()], [s1.clone(), t0.clone()], [s0.clone(), t1.clone()]];
    let mut rects = Vec::with_capacity(length);
    for step in 0..length {
        let (i, j) = (rect.tail_side, rect.head_side);
        if !polygon.side_cross(i, j).is_positive() {
            return Err(format!("step {step}: side pair ({i},{j}) is not positive"));
        }
        let vj = polygon.side(j);
        let at = |s: &Rat| polygon.point_on_side(i, s);
        let (x0, x1) = (at(&rect.s.0), at(&rect.s.1));
        for (m, p) in polygon.vertices().iter().enumerate() {
            let g0 = cross(&(p - &x0), vj);
            let g1 = cross(&(p - &x1), vj);
            if (g0.is_positive() && g1.is_negative()) || (g0.is_negative() && g1.is_positive()) {
                return Err(format!("step {step}: vertex {m} splits {rect}"));
            }
        }
        let mid = at(&((&rect.s.0 + &rect.s.1) * half()));
        let k = match land(polygon, i, &mid, vj) {
            Landing::Side(k, _) => k,
            other => return Err(format!("step {step}: midpoint of {rect} lands on {other:?}")),
        };
        let u = |s: &Rat| hit_fraction(polygon, k, &at(s), vj);
        let (u0, u1) = (u(&rect.s.0), u(&rect.s.1));
        let (lo, hi) = if u0 <= u1 { (u0, u1) } else { (u1, u0) };
        if lo.is_negative() || hi > Rat::one() {
            return Err(format!("step {step}: image of {rect} leaves side {k}"));
        }
        for c in corners.iter_mut() {
            let image = u(&c[0]);
            let t = c[1].clone();
            *c = [t, image];
        }
        let next = TileRect::raw(j, k, rect.t.clone(), (lo, hi));
        rects.push(std::mem::replace(&mut rect, next));
    }
    let ds = &s1 - &s0;
    let dt = &t1 - &t0;
    let col = |c: &[Rat; 2], d: &Rat| [(&c[0] - &corners[0][0]) / d, (&c[1] - &corners[0][1]) / d];
    let a = col(&corners[1], &ds);
    let b = col(&corners[2], &dt);
    let linear = [[a[0].clone(), b[0].clone()], [a[1].clone(), b[1].clone()]];
    Ok(Replay { rects, end: rect, linear })
}

fn independent_phase_area(polygon: &Polygon) -> Rat {
    let n = polygon.len();
    let mut total = Rat::zero();
    for i in 0..n {
        for j in 0..n {
            let c = cross(polygon.side(i), polygon.side(j));
            if c.is_positive() {
                total += c;
            }
        }
    }
    total
}

/// Re-verifies every claim in `cert` without trusting the search.
pub fn check_certificate(cert: &PeriodicityCertificate) -> CheckReport {
    let polygon = &cert.polygon;
    let mut failures = Vec::new();
    let mut all: BTreeMap<(usize, usize), Vec<TileRect>> = BTreeMap::new();
    let mut covered = Rat::zero();
    let mut rectangles = 0;

    for (idx, orbit) in cert.tile_orbits.iter().enumerate() {
        let rep = &orbit.representative;
        if rep.is_degenerate() {
            failures.push(format!("orbit {idx}: degenerate representative {rep}"));
            continue;
        }
        let run = match replay(polygon, rep, orbit.length) {
            Ok(run) => run,
            Err(e) => {
                failures.push(format!("orbit {idx}: {e}"));
                continue;
            }
        };
        if &run.end != rep {
            failures.push(format!("orbit {idx}: {rep} does not return after {} steps", orbit.length));
            continue;
        }
        if let Some(first) = run.rects.iter().skip(1).position(|r| r == rep) {
            failures.push(format!("orbit {idx}: returns already after {} steps", first + 1));
        }
        match order_of_matrix(&run.linear) {
            Some(order) if order == orbit.return_order => {}
            found => failures.push(format!("orbit {idx}: return order {found:?}, claimed {}", orbit.return_order)),
        }
        if orbit.point_period != orbit.length * orbit.return_order as usize {
            failures.push(format!("orbit {idx}: point period {} inconsistent", orbit.point_period));
        }
        let symbolic: Vec<usize> = run.rects.iter().map(|r| r.tail_side).collect();
        if symbolic != orbit.symbolic {
            failures.push(format!("orbit {idx}: symbolic orbit mismatch"));
        }
        let area: Rat = run.rects.iter().map(|r| r.area(polygon)).sum();
        if area != orbit.orbit_area.0 {
            failures.push(format!("orbit {idx}: orbit area {} claimed, {} replayed", orbit.orbit_area.0, area));
        }
        covered += area;
        rectangles += run.rects.len();
        for r in run.rects {
            all.entry((r.tail_side, r.head_side)).or_default().push(r);
        }
    }

    for rects in all.values_mut() {
        rects.sort_by(|a, b| a.s.0.cmp(&b.s.0));
        for (a_idx, a) in rects.iter().enumerate() {
            for b in &rects[a_idx + 1..] {
                if b.s.0 >= a.s.1 {
                    break;
                }
                if a.overlaps(b) {
                    failures.push(format!("tiles {a} and {b} overlap"));
                }
            }
        }
    }

    let total = independent_phase_area(polygon);
    if total != cert.total_phase_area.0 {
        failures.push(format!("phase area {} claimed, {} computed", cert.total_phase_area.0, total));
    }
    if covered != cert.covered_area.0 {
        failures.push(format!("covered area {} claimed, {} replayed", cert.covered_area.0, covered));
    }
    match &cert.verdict {
        TilingVerdict::FullyPeriodic if covered != total => {
            failures.push(format!("fully periodic claimed but {} of {} covered", covered, total));
        }
        TilingVerdict::Incomplete { residual } if residual.0 != &total - &covered => {
            failures.push(format!("residual {} claimed, {} computed", residual.0, &total - &covered));
        }
        _ => {}
    }

    CheckReport {
        ok: failures.is_empty(),
        orbits_checked: cert.tile_orbits.len(),
        rectangles_checked: rectangles,
        phase_area: RatText(total),
        covered_area: RatText(covered),
        failures,
    }
}
