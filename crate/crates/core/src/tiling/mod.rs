//! Tile decomposition of the reduced phase space.
//!
//! A tile is the set of phase points sharing a symbolic orbit. Rectangles
//! with axis-parallel sides map to such rectangles under every branch of the
//! map, so the search tracks whole rectangles: each is pushed forward until
//! it either straddles a discontinuity (and is split, the split pulled back
//! to where the rectangle started) or returns exactly onto itself. A closed
//! rectangle is a periodic tile; exact area accounting against the total
//! phase area decides whether the tiles found cover everything.

mod certify;
mod check;
mod rect;

pub use certify::{certify, certify_until, return_order, Budget, CertificateStats, PeriodicityCertificate, TileOrbit, TilingVerdict};
pub use check::{check_certificate, CheckReport};
pub use rect::{propagate, TileRect};

use num_traits::{One, Signed, Zero};

use crate::affine::{AxisAffine, Box2};
use crate::billiard::{BilliardMap, OrbitOptions, OrbitStatus, PhasePoint};
use crate::error::TilingError;
use crate::rational::Rat;

/// Order of the return map of a closed rectangle orbit, read off its
/// composite linear part.
pub fn order_of(f: &AxisAffine) -> Option<u8> {
    let one = Rat::one();
    if f.swap {
        (&f.scale[0] * &f.scale[1] == -&one).then_some(4)
    } else if f.scale[0].is_one() && f.scale[1].is_one() {
        Some(1)
    } else if f.scale[0] == -&one && f.scale[1] == -&one {
        Some(2)
    } else {
        None
    }
}

fn intersect(a: &Box2, b: &Box2) -> Box2 {
    [0, 1].map(|c| {
        let lo = a[c].0.clone().max(b[c].0.clone());
        let hi = a[c].1.clone().min(b[c].1.clone());
        (lo, hi)
    })
}

fn unit_box() -> Box2 {
    [(Rat::zero(), Rat::one()), (Rat::zero(), Rat::one())]
}

/// Points following the same branches as `pp` for `depth` forward steps,
/// as a box in `pp`'s coordinates.
fn forward_itinerary_box(map: &BilliardMap, pp: &PhasePoint, depth: usize) -> Result<Box2, TilingError> {
    let mut acc = unit_box();
    let mut f = AxisAffine::identity();
    let mut cur = pp.clone();
    for _ in 0..depth {
        let table = map
            .branches(cur.tail_side, cur.head_side)
            .ok_or(TilingError::HaltEncountered(crate::billiard::HaltReason::ParallelSides))?;
        let k = table.locate(&cur.tail).ok_or(TilingError::HaltEncountered(crate::billiard::HaltReason::HitVertex))?;
        let piece: Box2 = [table.interval(k), (Rat::zero(), Rat::one())];
        acc = intersect(&acc, &f.inverse().apply_box(&piece));
        let (next, step) = map.step_with_map(&cur).map_err(TilingError::HaltEncountered)?;
        f = step.after(&f);
        cur = next;
    }
    Ok(intersect(&acc, &f.inverse().apply_box(&unit_box())))
}

/// The tile containing `pp`, approximated by itinerary constraints over
/// `depth` steps in both directions.
///
/// If `pp` is periodic with period `n <= depth` the result is exact: a
/// point tile when the return map is hyperbolic, otherwise the constraint
/// box over `4n` forward steps, which is invariant under `T^n`.
pub fn tile_of(map: &BilliardMap, pp: &PhasePoint, depth: usize) -> Result<TileRect, TilingError> {
    let (i, j) = (pp.tail_side, pp.head_side);
    if let OrbitStatus::Periodic { period } = map.orbit(pp, OrbitOptions::new(depth.max(1))).status {
        let (f, _) = crate::billiard::compose_along(map, pp, period).expect("periodic orbit does not halt");
        if order_of(&f).is_none() {
            let point = |r: &Rat| (r.clone(), r.clone());
            return Ok(TileRect::raw(i, j, point(&pp.tail), point(&pp.head)));
        }
        let b = forward_itinerary_box(map, pp, 4 * period)?;
        return Ok(TileRect::raw(i, j, b[0].clone(), b[1].clone()));
    }
    let fwd = forward_itinerary_box(map, pp, depth)?;
    let back = forward_itinerary_box(map, &pp.reversed(), depth)?;
    let b = intersect(&fwd, &[back[1].clone(), back[0].clone()]);
    if b.iter().any(|(lo, hi)| (hi - lo).is_negative()) {
        return Err(TilingError::DegenerateRect("empty itinerary box".into()));
    }
    Ok(TileRect::raw(i, j, b[0].clone(), b[1].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::rational::{half, int, ratio};

    #[test]
    fn order_classification() {
        assert_eq!(order_of(&AxisAffine::identity()), Some(1));
        let half_turn = AxisAffine { swap: false, scale: [int(-1), int(-1)], offset: [int(1), int(1)] };
        assert_eq!(order_of(&half_turn), Some(2));
        let quarter = AxisAffine { swap: true, scale: [int(2), ratio(-1, 2)], offset: [int(0), int(0)] };
        assert_eq!(order_of(&quarter), Some(4));
        let hyperbolic = AxisAffine { swap: false, scale: [int(2), ratio(1, 2)], offset: [int(0), int(0)] };
        assert_eq!(order_of(&hyperbolic), None);
    }

    /// Brute-force oracle: grid points of the rectangle that share the
    /// symbolic orbit of `center` over many periods.
    fn sampled_tile_bounds(map: &BilliardMap, center: &PhasePoint, grid: i64, steps: usize) -> (Rat, Rat, Rat, Rat) {
        let code = |p: &PhasePoint| -> Option<Vec<(usize, usize)>> {
            let mut cur = p.clone();
            let mut out = Vec::new();
            for _ in 0..steps {
                out.push((cur.tail_side, cur.head_side));
                cur = map.step(&cur).next()?;
            }
            Some(out)
        };
        let want = code(center).unwrap();
        let (mut s_lo, mut s_hi, mut t_lo, mut t_hi) = (int(1), int(0), int(1), int(0));
        for a in 1..grid {
            for b in 1..grid {
                let p = PhasePoint::raw(center.tail_side, ratio(a, grid), center.head_side, ratio(b, grid));
                if code(&p).as_ref() == Some(&want) {
                    s_lo = s_lo.min(p.tail.clone());
                    s_hi = s_hi.max(p.tail.clone());
                    t_lo = t_lo.min(p.head.clone());
                    t_hi = t_hi.max(p.head.clone());
                }
            }
        }
        (s_lo, s_hi, t_lo, t_hi)
    }

    #[test]
    fn triangle_midpoint_tile_matches_sampling() {
        let map = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap());
        let center = PhasePoint::raw(0, half(), 1, half());
        let tile = tile_of(&map, &center, 3).unwrap();
        assert!(tile.area(map.polygon()) > int(0));
        assert!(tile.contains(&center));
        let grid = 48;
        let (s_lo, s_hi, t_lo, t_hi) = sampled_tile_bounds(&map, &center, grid, 12);
        let cell = ratio(1, grid);
        // sampled extremes lie inside the tile and within one grid cell of its edges
        assert!(tile.s.0 < s_lo && s_lo <= &tile.s.0 + &cell);
        assert!(tile.s.1 > s_hi && s_hi >= &tile.s.1 - &cell);
        assert!(tile.t.0 < t_lo && t_lo <= &tile.t.0 + &cell);
        assert!(tile.t.1 > t_hi && t_hi >= &tile.t.1 - &cell);
    }
}
