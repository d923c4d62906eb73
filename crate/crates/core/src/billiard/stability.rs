//! Linear stability of periodic orbits.
//!
//! The differential of `T^n` at an `n`-periodic point is the composition of
//! the `n` branch maps. For odd `n` it is anti-diagonal, for even `n`
//! diagonal; the diagonal entry on the tail side is the length distortion
//! `lambda` of the first return to that side.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{BilliardMap, OrbitOptions, OrbitStatus, PhasePoint};
use crate::affine::AxisAffine;
use crate::error::StabilityError;
use crate::rational::{self, Rat, RatText};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    Odd,
    TwoModFour,
    ZeroModFour,
}

impl ParityClass {
    pub fn of(n: usize) -> Self {
        match n % 4 {
            1 | 3 => ParityClass::Odd,
            2 => ParityClass::TwoModFour,
            _ => ParityClass::ZeroModFour,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Odd period: the tile return map has order 4.
    StableOrder4,
    /// `n = 2 mod 4` with `lambda = 1`: the return map is a point reflection.
    StableOrder2,
    /// Even period with `lambda != 1`: isolated, persists under perturbation.
    HyperbolicStable,
    /// `n = 0 mod 4` with `lambda = 1`: the return map is the identity and
    /// the orbit may or may not survive perturbation.
    IdentityIndeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub period: usize,
    pub parity: ParityClass,
    /// Absolute length distortion of the return to the tail side; even
    /// periods only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<RatText>,
    pub verdict: Verdict,
    /// Linear part of `T^n`, row-major.
    pub linear: [[RatText; 2]; 2],
}

/// Composite branch map along `len` steps starting at `pp`, with the side
/// sequence visited. `None` if the orbit halts.
pub fn compose_along(map: &BilliardMap, pp: &PhasePoint, len: usize) -> Option<(AxisAffine, PhasePoint)> {
    let mut acc = AxisAffine::identity();
    let mut cur = pp.clone();
    for _ in 0..len {
        let (next, f) = map.step_with_map(&cur).ok()?;
        acc = f.after(&acc);
        cur = next;
    }
    Some((acc, cur))
}

pub fn classify(map: &BilliardMap, pp: &PhasePoint, max_steps: usize) -> Result<StabilityReport, StabilityError> {
    let report = map.orbit(pp, OrbitOptions::new(max_steps));
    let n = match report.status {
        OrbitStatus::Periodic { period } => period,
        other => return Err(StabilityError::NotPeriodic(format!("{other:?}"))),
    };
    let (composite, end) = compose_along(map, pp, n).ok_or_else(|| StabilityError::NotPeriodic("orbit halts".into()))?;
    debug_assert_eq!(&end, pp);
    let parity = ParityClass::of(n);
    let (lambda, verdict) = match parity {
        ParityClass::Odd => (None, Verdict::StableOrder4),
        ParityClass::TwoModFour | ParityClass::ZeroModFour => {
            let lambda = composite.scale[0].abs();
            let unit = lambda.is_one();
            let verdict = match (parity, unit) {
                (ParityClass::TwoModFour, true) => Verdict::StableOrder2,
                (ParityClass::ZeroModFour, true) => Verdict::IdentityIndeterminate,
                _ => Verdict::HyperbolicStable,
            };
            (Some(RatText(lambda)), verdict)
        }
    };
    let linear = composite.linear().map(|row| row.map(RatText));
    Ok(StabilityReport { period: n, parity, lambda, verdict, linear })
}

/// Follows the itinerary of `seed` for `len` steps and solves for the fixed
/// point of the resulting affine return map. Returns it if it is a genuine
/// periodic point whose period divides `len`.
///
/// Used to continue a periodic orbit into a perturbed table: seed with a
/// point whose first `len` steps follow the surviving itinerary.
pub fn continue_periodic_point(map: &BilliardMap, seed: &PhasePoint, len: usize) -> Option<PhasePoint> {
    let (f, end) = compose_along(map, seed, len)?;
    if (end.tail_side, end.head_side) != (seed.tail_side, seed.head_side) {
        return None;
    }
    let one = Rat::one();
    let fixed = if f.swap {
        let det = &one - &f.scale[0] * &f.scale[1];
        if det.is_zero() {
            return None;
        }
        let s = (&f.scale[0] * &f.offset[1] + &f.offset[0]) / det;
        let t = &f.scale[1] * &s + &f.offset[1];
        [s, t]
    } else {
        let solve = |c: usize, seed_value: &Rat| -> Option<Rat> {
            if f.scale[c].is_one() {
                f.offset[c].is_zero().then(|| seed_value.clone())
            } else {
                Some(&f.offset[c] / (&one - &f.scale[c]))
            }
        };
        [solve(0, &seed.tail)?, solve(1, &seed.head)?]
    };
    let [s, t] = fixed;
    if !rational::is_in_open_unit(&s) || !rational::is_in_open_unit(&t) || s.is_negative() {
        return None;
    }
    let candidate = PhasePoint::raw(seed.tail_side, s, seed.head_side, t);
    match map.orbit(&candidate, OrbitOptions::new(len)).status {
        OrbitStatus::Periodic { period } if len.is_multiple_of(period) => Some(candidate),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::rational::{half, int};

    #[test]
    fn square_four_orbit_is_indeterminate() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap());
        let r = classify(&m, &PhasePoint::raw(0, half(), 1, half()), 100).unwrap();
        assert_eq!(r.period, 4);
        assert_eq!(r.parity, ParityClass::ZeroModFour);
        assert_eq!(r.lambda, Some(RatText(int(1))));
        assert_eq!(r.verdict, Verdict::IdentityIndeterminate);
    }

    #[test]
    fn triangle_three_orbit_is_order_four() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap());
        let r = classify(&m, &PhasePoint::raw(0, half(), 1, half()), 100).unwrap();
        assert_eq!(r.period, 3);
        assert_eq!(r.verdict, Verdict::StableOrder4);
        assert_eq!(r.lambda, None);
        // anti-diagonal with square -I
        assert_eq!(r.linear[0][0].0, int(0));
        assert_eq!(&r.linear[0][1].0 * &r.linear[1][0].0, int(-1));
    }

    #[test]
    fn non_periodic_is_an_error() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap());
        assert!(classify(&m, &PhasePoint::raw(0, half(), 2, half()), 100).is_err());
    }

    #[test]
    fn continuation_recovers_triangle_center() {
        let m = BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap());
        let seed = PhasePoint::raw(0, crate::rational::ratio(2, 5), 1, crate::rational::ratio(3, 5));
        let p = continue_periodic_point(&m, &seed, 3).unwrap();
        assert_eq!(p, PhasePoint::raw(0, half(), 1, half()));
    }
}
