//! Double-precision variant of the map, for portraits and interactive use.

use serde::{Deserialize, Serialize};

use super::orbit::{Mode, OrbitReport, OrbitStatus};
use super::{BilliardMap, HaltReason, PhasePoint};
use crate::rational;

pub const DEFAULT_RECURRENCE_TOL: f64 = 1e-9;
pub const DEFAULT_VERTEX_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatPhasePoint {
    pub tail_side: usize,
    pub tail: f64,
    pub head_side: usize,
    pub head: f64,
}

impl From<&PhasePoint> for FloatPhasePoint {
    fn from(p: &PhasePoint) -> Self {
        FloatPhasePoint {
            tail_side: p.tail_side,
            tail: rational::to_f64(&p.tail),
            head_side: p.head_side,
            head: rational::to_f64(&p.head),
        }
    }
}

impl FloatPhasePoint {
    fn distance(&self, other: &FloatPhasePoint) -> Option<f64> {
        (self.tail_side == other.tail_side && self.head_side == other.head_side)
            .then(|| (self.tail - other.tail).abs().max((self.head - other.head).abs()))
    }
}

#[derive(Clone, Debug)]
struct FloatBranches {
    breaks: Vec<f64>,
    /// `(landing, slope, offset)` per interval.
    branches: Vec<(usize, f64, f64)>,
}

/// The branch table of a [`BilliardMap`] rounded to doubles.
#[derive(Clone, Debug)]
pub struct FloatMap {
    n: usize,
    table: Vec<Option<FloatBranches>>,
    pub recurrence_tol: f64,
    pub vertex_tol: f64,
}

impl FloatMap {
    pub fn new(map: &BilliardMap) -> Self {
        let n = map.sides();
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(map.branches(i, j).map(|b| FloatBranches {
                    breaks: b.breaks.iter().map(rational::to_f64).collect(),
                    branches: b
                        .branches
                        .iter()
                        .map(|br| (br.landing, rational::to_f64(&br.slope), rational::to_f64(&br.offset)))
                        .collect(),
                }));
            }
        }
        FloatMap { n, table, recurrence_tol: DEFAULT_RECURRENCE_TOL, vertex_tol: DEFAULT_VERTEX_TOL }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        assert!(tol > 0.0, "tolerance must be positive");
        self.recurrence_tol = tol;
        self
    }

    pub fn step(&self, p: &FloatPhasePoint) -> Result<FloatPhasePoint, HaltReason> {
        let table = self.table[p.tail_side * self.n + p.head_side].as_ref().ok_or(HaltReason::ParallelSides)?;
        let s = p.tail;
        if table.breaks.iter().any(|b| (b - s).abs() <= self.vertex_tol) {
            return Err(HaltReason::HitVertex);
        }
        let k = table.breaks.partition_point(|b| *b < s);
        let (landing, slope, offset) = table.branches[k];
        let u = slope * s + offset;
        if u <= self.vertex_tol || u >= 1.0 - self.vertex_tol {
            return Err(HaltReason::HitVertex);
        }
        Ok(FloatPhasePoint { tail_side: p.head_side, tail: p.head, head_side: landing, head: u })
    }

    /// Float orbit. A period `p` is accepted when the state comes back within
    /// `recurrence_tol` after `p` steps and again after `2p` steps.
    pub fn orbit(&self, start: &FloatPhasePoint, max_steps: usize, collect_points: bool) -> OrbitReport {
        let mut symbolic = vec![start.tail_side];
        let mut points = collect_points.then(|| vec![*start]);
        let mut cur = *start;
        let mut candidate: Option<usize> = None;
        let mut status = OrbitStatus::Capped { max_steps, precision_overflow: false };
        let mut step = 0usize;
        loop {
            step += 1;
            if candidate.is_none() && step > max_steps.max(1) {
                break;
            }
            match self.step(&cur) {
                Err(reason) => {
                    status = OrbitStatus::HaltedForward { reason, steps: step - 1 };
                    break;
                }
                Ok(next) => {
                    let close = next.distance(start).is_some_and(|d| d < self.recurrence_tol);
                    match candidate {
                        None if close => candidate = Some(step),
                        Some(p) if step == 2 * p => {
                            if close {
                                status = OrbitStatus::Periodic { period: p };
                                break;
                            }
                            candidate = None;
                        }
                        _ => {}
                    }
                    symbolic.push(next.tail_side);
                    if let Some(pts) = points.as_mut() {
                        pts.push(next);
                    }
                    cur = next;
                }
            }
        }
        if let OrbitStatus::Periodic { period } = status {
            symbolic.truncate(period);
            if let Some(pts) = points.as_mut() {
                pts.truncate(period);
            }
        }
        OrbitReport { mode: Mode::Float, status, symbolic, points: None, float_points: points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::rational::half;

    #[test]
    fn triangle_midpoints_float() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap());
        let f = FloatMap::new(&m).with_tolerance(1e-9);
        let start = FloatPhasePoint::from(&PhasePoint::raw(0, half(), 1, half()));
        let r = f.orbit(&start, 100, true);
        assert_eq!(r.status, OrbitStatus::Periodic { period: 3 });
        assert_eq!(r.symbolic, vec![0, 1, 2]);
        assert_eq!(r.float_points.unwrap().len(), 3);
        assert_eq!(r.mode, Mode::Float);
    }

    #[test]
    fn float_parallel_halt() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap());
        let f = FloatMap::new(&m);
        let start = FloatPhasePoint { tail_side: 0, tail: 0.5, head_side: 2, head: 0.5 };
        assert_eq!(f.step(&start), Err(HaltReason::ParallelSides));
    }
}
