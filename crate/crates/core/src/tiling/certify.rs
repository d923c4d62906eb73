use std::collections::{BTreeSet, HashSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::order_of;
use super::rect::{propagate_with_maps, TileRect};
use crate::affine::AxisAffine;
use crate::billiard::BilliardMap;
use crate::error::TilingError;
use crate::geometry::{phase_area, Polygon};
use crate::rational::{Rat, RatText};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Rectangles taken off the work list before giving up.
    pub max_tiles: usize,
    /// Steps a single rectangle may be pushed without closing.
    pub max_steps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_tiles: 1_000_000, max_steps: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileOrbit {
    pub representative: TileRect,
    /// Steps until the rectangle first returns onto itself.
    pub length: usize,
    pub return_order: u8,
    /// Period of a generic point of the tile.
    pub point_period: usize,
    pub orbit_area: RatText,
    /// Tail sides along one turn of the orbit, from the representative.
    pub symbolic: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TilingVerdict {
    FullyPeriodic,
    /// Search finished but the tiles found leave `residual` uncovered.
    Incomplete { residual: RatText },
    /// The tile budget ran out.
    Inconclusive,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStats {
    pub rectangles: usize,
    pub splits: usize,
    /// Rectangles dropped after `max_steps` without closing.
    pub abandoned: usize,
    pub abandoned_area: RatText,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityCertificate {
    pub polygon: Polygon,
    pub budget: Budget,
    pub tile_orbits: Vec<TileOrbit>,
    pub total_phase_area: RatText,
    pub covered_area: RatText,
    pub verdict: TilingVerdict,
    pub stats: CertificateStats,
}

impl PeriodicityCertificate {
    pub fn is_fully_periodic(&self) -> bool {
        self.verdict == TilingVerdict::FullyPeriodic
    }

    pub fn point_periods(&self) -> BTreeSet<usize> {
        self.tile_orbits.iter().map(|o| o.point_period).collect()
    }

    /// `(length, return_order)` of every tile orbit, sorted.
    pub fn structure(&self) -> Vec<(usize, u8)> {
        let mut v: Vec<_> = self.tile_orbits.iter().map(|o| (o.length, o.return_order)).collect();
        v.sort_unstable();
        v
    }
}

struct Item {
    /// The rectangle being followed, in the coordinates where it started.
    origin: TileRect,
    current: TileRect,
    /// Affine map from `origin` to `current`.
    f: AxisAffine,
    depth: usize,
}

/// Searches for a periodic tiling of the reduced phase space.
///
/// Every positive side-pair rectangle is seeded in lexicographic order of
/// the side pair. Rectangles are followed depth first; when one straddles a
/// discontinuity the pieces are pulled back to the seed coordinates and
/// continued in ascending order, so the certificate is reproducible. A
/// rectangle that lands exactly on a known tile is already accounted for.
pub fn certify(map: &BilliardMap, budget: Budget) -> Result<PeriodicityCertificate, TilingError> {
    certify_until(map, budget, &|| false)
}

/// [`certify`] that also gives up, with an inconclusive verdict, once `stop`
/// returns true. Polled once per rectangle.
pub fn certify_until(map: &BilliardMap, budget: Budget, stop: &dyn Fn() -> bool) -> Result<PeriodicityCertificate, TilingError> {
    let polygon = map.polygon();
    let n = polygon.len();
    let total = phase_area(polygon);

    let mut stack: Vec<Item> = Vec::new();
    for i in (0..n).rev() {
        for j in (0..n).rev() {
            if i != j && polygon.side_cross(i, j).is_positive() {
                let r = TileRect::full(i, j);
                stack.push(Item { origin: r.clone(), current: r, f: AxisAffine::identity(), depth: 0 });
            }
        }
    }

    let mut known: HashSet<TileRect> = HashSet::new();
    let mut orbits = Vec::new();
    let mut covered = Rat::zero();
    let mut stats = CertificateStats::default();
    let mut abandoned_area = Rat::zero();
    let mut exhausted = false;

    'items: while let Some(mut item) = stack.pop() {
        stats.rectangles += 1;
        if stats.rectangles > budget.max_tiles || stop() {
            exhausted = true;
            break;
        }
        loop {
            if known.contains(&item.current) {
                continue 'items;
            }
            if item.depth > 0 && item.current == item.origin {
                let orbit = close_orbit(map, &item.origin, item.depth)?;
                covered += &orbit.orbit_area.0;
                register(map, &orbit, &mut known)?;
                orbits.push(orbit);
                continue 'items;
            }
            if item.depth >= budget.max_steps {
                stats.abandoned += 1;
                abandoned_area += item.origin.area(polygon);
                continue 'items;
            }
            let mut pieces = propagate_with_maps(map, &item.current)?;
            if pieces.len() == 1 {
                let (_, image, step) = pieces.pop().unwrap();
                item.current = image;
                item.f = step.after(&item.f);
                item.depth += 1;
                continue;
            }
            stats.splits += 1;
            let back = item.f.inverse();
            for (piece, image, step) in pieces.into_iter().rev() {
                let origin = item.origin.with_box(back.apply_box(&piece.as_box()));
                stack.push(Item { origin, current: image, f: step.after(&item.f), depth: item.depth + 1 });
            }
            continue 'items;
        }
    }

    stats.abandoned_area = RatText(abandoned_area);
    let verdict = if exhausted {
        TilingVerdict::Inconclusive
    } else if covered == total {
        TilingVerdict::FullyPeriodic
    } else {
        TilingVerdict::Incomplete { residual: RatText(&total - &covered) }
    };
    Ok(PeriodicityCertificate {
        polygon: polygon.clone(),
        budget,
        tile_orbits: orbits,
        total_phase_area: RatText(total),
        covered_area: RatText(covered),
        verdict,
        stats,
    })
}

/// The rectangles of one turn of the orbit of `start`, which must close
/// after `length` steps without splitting.
fn members(map: &BilliardMap, start: &TileRect, length: usize) -> Result<(Vec<TileRect>, AxisAffine), TilingError> {
    let mut out = Vec::with_capacity(length);
    let mut cur = start.clone();
    let mut f = AxisAffine::identity();
    for _ in 0..length {
        let mut pieces = propagate_with_maps(map, &cur)?;
        if pieces.len() != 1 {
            return Err(TilingError::NotClosed(format!("{cur} splits")));
        }
        let (_, image, step) = pieces.pop().unwrap();
        out.push(std::mem::replace(&mut cur, image));
        f = step.after(&f);
    }
    if &cur != start {
        return Err(TilingError::NotClosed(format!("{start} does not return after {length} steps")));
    }
    Ok((out, f))
}

/// Closes the orbit of `origin`, which returned onto itself after `depth`
/// steps. A rectangle can be cut down after passing its first return, so the
/// minimal length may be a proper divisor of `depth`.
fn close_orbit(map: &BilliardMap, origin: &TileRect, depth: usize) -> Result<TileOrbit, TilingError> {
    let (rects, _) = members(map, origin, depth)?;
    let length = (1..depth).find(|&k| depth.is_multiple_of(k) && &rects[k] == origin).unwrap_or(depth);
    let (rects, f) = members(map, origin, length)?;
    let order = order_of(&f).ok_or_else(|| TilingError::NotClosed(format!("return map of {origin} has no finite order")))?;
    let (first, representative) = rects.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).map(|(k, r)| (k, r.clone())).unwrap();
    let symbolic = (0..length).map(|k| rects[(first + k) % length].tail_side).collect();
    let orbit_area = representative.area(map.polygon()) * Rat::from_integer(length.into());
    Ok(TileOrbit {
        representative,
        length,
        return_order: order,
        point_period: length * order as usize,
        orbit_area: RatText(orbit_area),
        symbolic,
    })
}

fn register(map: &BilliardMap, orbit: &TileOrbit, known: &mut HashSet<TileRect>) -> Result<(), TilingError> {
    let (rects, _) = members(map, &orbit.representative, orbit.length)?;
    known.extend(rects);
    Ok(())
}

/// Replays a tile orbit and reads the order of its return map off the
/// composite linear part.
pub fn return_order(map: &BilliardMap, orbit: &TileOrbit) -> Result<u8, TilingError> {
    let (_, f) = members(map, &orbit.representative, orbit.length)?;
    order_of(&f).ok_or_else(|| TilingError::NotClosed(format!("return map of {} has no finite order", orbit.representative)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn triangle_is_fully_periodic() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap());
        let c = certify(&m, Budget::default()).unwrap();
        assert_eq!(c.verdict, TilingVerdict::FullyPeriodic);
        assert_eq!(c.total_phase_area.0, int(3));
        for o in &c.tile_orbits {
            assert_eq!(return_order(&m, o).unwrap(), o.return_order);
        }
    }

    #[test]
    fn square_is_fully_periodic_with_identity_return() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap());
        let c = certify(&m, Budget::default()).unwrap();
        assert_eq!(c.verdict, TilingVerdict::FullyPeriodic);
        assert_eq!(c.point_periods(), BTreeSet::from([4]));
        assert_eq!(c.structure(), vec![(4, 1)]);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (2, 0), (3, 2), (1, 3), (-1, 1)]).unwrap());
        let c = certify(&m, Budget { max_tiles: 1, max_steps: 10 }).unwrap();
        assert_eq!(c.verdict, TilingVerdict::Inconclusive);
    }
}
