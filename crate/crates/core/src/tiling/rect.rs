use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine::{AxisAffine, Box2};
use crate::billiard::{BilliardMap, HaltReason, PhasePoint};
use crate::error::{PhaseError, TilingError};
use crate::geometry::Polygon;
use crate::rational::{self, half, Rat};

/// Open rectangle `(s0, s1) x (t0, t1)` of chords from side `tail_side` to
/// side `head_side`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TileRect {
    pub tail_side: usize,
    pub head_side: usize,
    #[serde(with = "rational::text_pair")]
    pub s: (Rat, Rat),
    #[serde(with = "rational::text_pair")]
    pub t: (Rat, Rat),
}

impl TileRect {
    /// Checked constructor: positive side pair, nonempty intervals inside
    /// `[0, 1]`.
    pub fn new(polygon: &Polygon, tail_side: usize, head_side: usize, s: (Rat, Rat), t: (Rat, Rat)) -> Result<Self, TilingError> {
        let n = polygon.len();
        if tail_side >= n || head_side >= n {
            return Err(PhaseError::SideOutOfRange(tail_side.max(head_side), n).into());
        }
        if !polygon.side_cross(tail_side, head_side).is_positive() {
            return Err(TilingError::DegenerateRect(format!("side pair ({tail_side},{head_side}) is not positive")));
        }
        let r = TileRect { tail_side, head_side, s, t };
        let inside = |(lo, hi): &(Rat, Rat)| !lo.is_negative() && lo < hi && hi <= &Rat::from_integer(1.into());
        if !inside(&r.s) || !inside(&r.t) {
            return Err(TilingError::DegenerateRect(r.to_string()));
        }
        Ok(r)
    }

    pub(crate) fn raw(tail_side: usize, head_side: usize, s: (Rat, Rat), t: (Rat, Rat)) -> Self {
        TileRect { tail_side, head_side, s, t }
    }

    /// The whole side-pair rectangle.
    pub fn full(tail_side: usize, head_side: usize) -> Self {
        let unit = || (Rat::zero(), Rat::from_integer(1.into()));
        TileRect::raw(tail_side, head_side, unit(), unit())
    }

    pub fn area(&self, polygon: &Polygon) -> Rat {
        polygon.side_cross(self.tail_side, self.head_side).abs() * (&self.s.1 - &self.s.0) * (&self.t.1 - &self.t.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.s.0 >= self.s.1 || self.t.0 >= self.t.1
    }

    /// Membership in the closed rectangle.
    pub fn contains(&self, p: &PhasePoint) -> bool {
        p.tail_side == self.tail_side
            && p.head_side == self.head_side
            && self.s.0 <= p.tail
            && p.tail <= self.s.1
            && self.t.0 <= p.head
            && p.head <= self.t.1
    }

    pub fn as_box(&self) -> Box2 {
        [self.s.clone(), self.t.clone()]
    }

    pub(crate) fn with_box(&self, b: Box2) -> TileRect {
        let [s, t] = b;
        TileRect::raw(self.tail_side, self.head_side, s, t)
    }

    pub fn center(&self) -> PhasePoint {
        let mid = |(lo, hi): &(Rat, Rat)| (lo + hi) * half();
        PhasePoint::raw(self.tail_side, mid(&self.s), self.head_side, mid(&self.t))
    }

    /// Whether the open interiors meet.
    pub fn overlaps(&self, other: &TileRect) -> bool {
        let meet = |a: &(Rat, Rat), b: &(Rat, Rat)| a.0 < b.1 && b.0 < a.1;
        self.tail_side == other.tail_side && self.head_side == other.head_side && meet(&self.s, &other.s) && meet(&self.t, &other.t)
    }
}

impl std::fmt::Display for TileRect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let iv = |(lo, hi): &(Rat, Rat)| format!("({},{})", rational::to_text(lo), rational::to_text(hi));
        write!(f, "{}x{} {}x{}", self.tail_side, self.head_side, iv(&self.s), iv(&self.t))
    }
}

/// One step of `r` split along the discontinuities it straddles: each piece
/// of `r` with its image and the affine branch that maps one to the other.
pub(crate) fn propagate_with_maps(map: &BilliardMap, r: &TileRect) -> Result<Vec<(TileRect, TileRect, AxisAffine)>, TilingError> {
    if r.is_degenerate() {
        return Err(TilingError::DegenerateRect(r.to_string()));
    }
    let table = map.branches(r.tail_side, r.head_side).ok_or(TilingError::HaltEncountered(HaltReason::ParallelSides))?;
    let mut cuts = vec![r.s.0.clone()];
    cuts.extend(table.breaks.iter().filter(|b| **b > r.s.0 && **b < r.s.1).cloned());
    cuts.push(r.s.1.clone());
    let mut out = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let piece = TileRect::raw(r.tail_side, r.head_side, (w[0].clone(), w[1].clone()), r.t.clone());
        let mid = (&w[0] + &w[1]) * half();
        let k = table.locate(&mid).expect("midpoint of a cut interval is not a break");
        let branch = &table.branches[k];
        let f = AxisAffine::step(branch.slope.clone(), branch.offset.clone());
        let image = TileRect::raw(r.head_side, branch.landing, (Rat::zero(), Rat::zero()), (Rat::zero(), Rat::zero()))
            .with_box(f.apply_box(&piece.as_box()));
        out.push((piece, image, f));
    }
    Ok(out)
}

/// Applies the map to `r` as a set, splitting it into maximal pieces that
/// each follow a single branch. Returns each piece with its image.
pub fn propagate(map: &BilliardMap, r: &TileRect) -> Result<Vec<(TileRect, TileRect)>, TilingError> {
    Ok(propagate_with_maps(map, r)?.into_iter().map(|(piece, image, _)| (piece, image)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn triangle() -> BilliardMap {
        BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap())
    }

    #[test]
    fn triangle_full_rectangle_moves_without_splitting() {
        let m = triangle();
        let out = propagate(&m, &TileRect::full(0, 1)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].1, TileRect::full(1, 2));
    }

    #[test]
    fn pentagon_rectangle_splits_and_keeps_area() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (2, 0), (3, 2), (1, 3), (-1, 1)]).unwrap());
        let p = m.polygon();
        let mut split_seen = false;
        for i in 0..5 {
            for j in 0..5 {
                if i == j || !p.side_cross(i, j).is_positive() {
                    continue;
                }
                let r = TileRect::full(i, j);
                let out = propagate(&m, &r).unwrap();
                split_seen |= out.len() > 1;
                let pieces: Rat = out.iter().map(|(a, _)| a.area(p)).sum();
                let images: Rat = out.iter().map(|(_, b)| b.area(p)).sum();
                assert_eq!(pieces, r.area(p));
                assert_eq!(images, r.area(p));
            }
        }
        assert!(split_seen);
    }

    #[test]
    fn constructor_rejects_bad_rectangles() {
        let p = Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap();
        assert!(TileRect::new(&p, 1, 0, (int(0), int(1)), (int(0), int(1))).is_err());
        assert!(TileRect::new(&p, 0, 1, (ratio(1, 2), ratio(1, 2)), (int(0), int(1))).is_err());
        assert!(TileRect::new(&p, 0, 1, (int(0), int(2)), (int(0), int(1))).is_err());
        assert!(TileRect::new(&p, 0, 1, (int(0), ratio(1, 2)), (int(0), int(1))).is_ok());
    }

    #[test]
    fn json_uses_fraction_text() {
        let r = TileRect::raw(0, 1, (ratio(1, 3), int(1)), (int(0), ratio(1, 2)));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"tail_side":0,"head_side":1,"s":["1/3","1"],"t":["0","1/2"]}"#);
        assert_eq!(serde_json::from_str::<TileRect>(&json).unwrap(), r);
    }
}
