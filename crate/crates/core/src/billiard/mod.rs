//! The symplectic billiard map on a convex polygon.
//!
//! A phase point is an oriented chord `x -> y` with `x` on side `i` and `y`
//! on side `j`. The image is the chord `y -> z`, where `z` is the second
//! boundary point of the line through `x` parallel to side `j`.
//!
//! Positions on sides are fractions in `(0, 1)`, so for a rational polygon
//! each branch of the map is affine with rational coefficients.

mod float;
mod orbit;
mod phase;
mod stability;

pub use float::{FloatMap, FloatPhasePoint};
pub use orbit::{orbit, Mode as OrbitMode, OrbitOptions, OrbitReport, OrbitStatus, DEFAULT_BIT_BUDGET};
pub use phase::PhasePoint;
pub use stability::{classify, compose_along, continue_periodic_point, ParityClass, StabilityReport, Verdict};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine::AxisAffine;
use crate::geometry::{cross, Point, Polygon};
use crate::rational::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HaltReason {
    /// The new head would be a vertex.
    HitVertex,
    /// Tail and head lie on parallel sides.
    ParallelSides,
    /// The reflection line contains a whole side.
    LineSupportsEdge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Next(PhasePoint),
    Halt(HaltReason),
}

impl StepResult {
    pub fn next(self) -> Option<PhasePoint> {
        match self {
            StepResult::Next(p) => Some(p),
            StepResult::Halt(_) => None,
        }
    }
}

/// One continuity piece of the map for a fixed side pair: tails in this
/// piece land on side `landing` at fraction `slope * s + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub landing: usize,
    pub slope: Rat,
    pub offset: Rat,
}

/// Continuity structure of the map on the side pair `(i, j)`.
///
/// `breaks` are the tail fractions in `(0, 1)` whose reflection line passes
/// through a vertex, sorted ascending; `branches[k]` covers the open interval
/// between `breaks[k - 1]` and `breaks[k]` (with 0 and 1 at the ends).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branches {
    pub breaks: Vec<Rat>,
    pub branches: Vec<Branch>,
}

impl Branches {
    /// Branch index of the open interval containing `s`, or `None` if `s` is
    /// a break point.
    pub fn locate(&self, s: &Rat) -> Option<usize> {
        self.breaks.binary_search(s).err()
    }

    /// Endpoints of branch `k`.
    pub fn interval(&self, k: usize) -> (Rat, Rat) {
        let lo = if k == 0 { Rat::zero() } else { self.breaks[k - 1].clone() };
        let hi = self.breaks.get(k).cloned().unwrap_or_else(Rat::one);
        (lo, hi)
    }
}

/// Second intersection of a reflection line with the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Landing {
    Side(usize, Rat),
    Vertex,
    Supports,
}

/// Intersects the line through `x` (interior of side `from_side`) with
/// direction `dir` against every other side, directly in the plane.
///
/// This is the geometric definition of the reflection and is used both to
/// build the branch table and as an independent check of it.
pub fn land(polygon: &Polygon, from_side: usize, x: &Point, dir: &Point) -> Landing {
    let n = polygon.len();
    let mut hits: Vec<(usize, Rat)> = Vec::new();
    for k in (0..n).filter(|&k| k != from_side) {
        let vk = polygon.side(k);
        let pk = polygon.vertex(k);
        let denom = cross(vk, dir);
        if denom.is_zero() {
            if cross(&(pk - x), dir).is_zero() {
                return Landing::Supports;
            }
            continue;
        }
        let u = cross(&(x - pk), dir) / denom;
        if !u.is_negative() && u <= Rat::one() {
            hits.push((k, u));
        }
    }
    if hits.iter().any(|(_, u)| u.is_zero() || u.is_one()) {
        return Landing::Vertex;
    }
    debug_assert_eq!(hits.len(), 1, "a transversal line meets a convex boundary twice");
    match hits.pop() {
        Some((k, u)) => Landing::Side(k, u),
        None => Landing::Vertex,
    }
}

/// Reference implementation of one step by direct line intersection.
pub fn geometric_step(polygon: &Polygon, pp: &PhasePoint) -> StepResult {
    let (i, j) = (pp.tail_side, pp.head_side);
    if polygon.side_cross(i, j).is_zero() {
        return StepResult::Halt(HaltReason::ParallelSides);
    }
    let x = polygon.point_on_side(i, &pp.tail);
    match land(polygon, i, &x, polygon.side(j)) {
        Landing::Side(k, u) => StepResult::Next(PhasePoint::raw(j, pp.head.clone(), k, u)),
        Landing::Vertex => StepResult::Halt(HaltReason::HitVertex),
        Landing::Supports => StepResult::Halt(HaltReason::LineSupportsEdge),
    }
}

/// A polygon together with its precomputed branch table.
#[derive(Clone, Debug)]
pub struct BilliardMap {
    polygon: Polygon,
    table: Vec<Option<Branches>>,
}

impl BilliardMap {
    pub fn new(polygon: Polygon) -> Self {
        let n = polygon.len();
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(build_branches(&polygon, i, j));
            }
        }
        BilliardMap { polygon, table }
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn sides(&self) -> usize {
        self.polygon.len()
    }

    /// `None` for `i == j` and for parallel sides.
    pub fn branches(&self, i: usize, j: usize) -> Option<&Branches> {
        self.table[i * self.polygon.len() + j].as_ref()
    }

    pub fn step(&self, pp: &PhasePoint) -> StepResult {
        match self.step_with_map(pp) {
            Ok((next, _)) => StepResult::Next(next),
            Err(reason) => StepResult::Halt(reason),
        }
    }

    /// The step together with the affine map of its continuity piece.
    pub fn step_with_map(&self, pp: &PhasePoint) -> Result<(PhasePoint, AxisAffine), HaltReason> {
        let Some(table) = self.branches(pp.tail_side, pp.head_side) else {
            return Err(HaltReason::ParallelSides);
        };
        let k = table.locate(&pp.tail).ok_or(HaltReason::HitVertex)?;
        let b = &table.branches[k];
        let u = &b.slope * &pp.tail + &b.offset;
        let next = PhasePoint::raw(pp.head_side, pp.head.clone(), b.landing, u);
        Ok((next, AxisAffine::step(b.slope.clone(), b.offset.clone())))
    }

    /// Inverse step, as chord reversal conjugating the forward step.
    pub fn step_back(&self, pp: &PhasePoint) -> StepResult {
        match self.step(&pp.reversed()) {
            StepResult::Next(p) => StepResult::Next(p.reversed()),
            halt => halt,
        }
    }

    /// Endpoints of the chord in the plane.
    pub fn chord(&self, pp: &PhasePoint) -> (Point, Point) {
        (self.polygon.point_on_side(pp.tail_side, &pp.tail), self.polygon.point_on_side(pp.head_side, &pp.head))
    }
}

fn build_branches(polygon: &Polygon, i: usize, j: usize) -> Option<Branches> {
    let vi = polygon.side(i);
    let vj = polygon.side(j);
    let c = cross(vi, vj);
    if i == j || c.is_zero() {
        return None;
    }
    let pi = polygon.vertex(i);
    let mut breaks: Vec<Rat> = polygon
        .vertices()
        .iter()
        .map(|pm| cross(&(pm - pi), vj) / &c)
        .filter(|s| s.is_positive() && s < &Rat::one())
        .collect();
    breaks.sort();
    breaks.dedup();
    let mut out = Branches { breaks, branches: Vec::new() };
    for k in 0..=out.breaks.len() {
        let (lo, hi) = out.interval(k);
        let mid = (lo + hi) / Rat::from_integer(2.into());
        let x = polygon.point_on_side(i, &mid);
        let landing = match land(polygon, i, &x, vj) {
            Landing::Side(k, _) => k,
            other => unreachable!("interior of a continuity interval landed on {other:?}"),
        };
        let vk = polygon.side(landing);
        let denom = cross(vk, vj);
        out.branches.push(Branch {
            landing,
            slope: &c / &denom,
            offset: cross(&(pi - polygon.vertex(landing)), vj) / &denom,
        });
    }
    Some(out)
}
