use serde::{Deserialize, Serialize};

use super::{BilliardMap, FloatPhasePoint, HaltReason, PhasePoint, StepResult};

/// Default cap on numerator/denominator size during exact iteration.
pub const DEFAULT_BIT_BUDGET: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitStatus {
    Periodic { period: usize },
    HaltedForward { reason: HaltReason, steps: usize },
    /// No recurrence within `max_steps`, or the rationals outgrew the bit
    /// budget (`precision_overflow`).
    Capped { max_steps: usize, precision_overflow: bool },
}

impl OrbitStatus {
    pub fn period(&self) -> Option<usize> {
        match self {
            OrbitStatus::Periodic { period } => Some(*period),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub mode: Mode,
    pub status: OrbitStatus,
    /// Tail side of every visited state, starting with the initial one.
    pub symbolic: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PhasePoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float_points: Option<Vec<FloatPhasePoint>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitOptions {
    pub max_steps: usize,
    pub collect_points: bool,
    pub bit_budget: u64,
}

impl OrbitOptions {
    pub fn new(max_steps: usize) -> Self {
        OrbitOptions { max_steps, collect_points: false, bit_budget: DEFAULT_BIT_BUDGET }
    }

    pub fn collecting(mut self) -> Self {
        self.collect_points = true;
        self
    }
}

/// Iterates the exact map until the start state recurs, the map halts, or
/// the step budget runs out.
///
/// The map is injective where defined, so the first repeated state is the
/// start itself and the first return time is the minimal period.
pub fn orbit(map: &BilliardMap, start: &PhasePoint, opts: OrbitOptions) -> OrbitReport {
    let mut symbolic = vec![start.tail_side];
    let mut points = opts.collect_points.then(|| vec![start.clone()]);
    let mut cur = start.clone();
    let mut status = OrbitStatus::Capped { max_steps: opts.max_steps, precision_overflow: false };
    for step in 1..=opts.max_steps.max(1) {
        match map.step(&cur) {
            StepResult::Halt(reason) => {
                status = OrbitStatus::HaltedForward { reason, steps: step - 1 };
                break;
            }
            StepResult::Next(next) => {
                if &next == start {
                    status = OrbitStatus::Periodic { period: step };
                    break;
                }
                if next.max_bits() > opts.bit_budget {
                    status = OrbitStatus::Capped { max_steps: opts.max_steps, precision_overflow: true };
                    break;
                }
                symbolic.push(next.tail_side);
                if let Some(pts) = points.as_mut() {
                    pts.push(next.clone());
                }
                cur = next;
            }
        }
    }
    OrbitReport { mode: Mode::Exact, status, symbolic, points, float_points: None }
}

impl BilliardMap {
    pub fn orbit(&self, start: &PhasePoint, opts: OrbitOptions) -> OrbitReport {
        orbit(self, start, opts)
    }
}
