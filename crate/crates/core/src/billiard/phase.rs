use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::PhaseError;
use crate::geometry::Polygon;
use crate::rational::{self, Rat};

/// An oriented chord: tail at fraction `tail` of side `tail_side`, head at
/// fraction `head` of side `head_side`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhasePoint {
    pub tail_side: usize,
    #[serde(with = "rational::text")]
    pub tail: Rat,
    pub head_side: usize,
    #[serde(with = "rational::text")]
    pub head: Rat,
}

impl PhasePoint {
    /// Validated constructor. Fractions must lie strictly inside `(0, 1)`;
    /// chords between parallel sides are accepted (the map halts on them).
    pub fn new(polygon: &Polygon, tail_side: usize, tail: Rat, head_side: usize, head: Rat) -> Result<Self, PhaseError> {
        let n = polygon.len();
        for side in [tail_side, head_side] {
            if side >= n {
                return Err(PhaseError::SideOutOfRange(side, n));
            }
        }
        if tail_side == head_side {
            return Err(PhaseError::SameSide(tail_side));
        }
        for f in [&tail, &head] {
            if !rational::is_in_open_unit(f) {
                return Err(PhaseError::FractionOutOfRange(rational::to_text(f)));
            }
        }
        Ok(PhasePoint { tail_side, tail, head_side, head })
    }

    pub(crate) fn raw(tail_side: usize, tail: Rat, head_side: usize, head: Rat) -> Self {
        PhasePoint { tail_side, tail, head_side, head }
    }

    /// Chord reversal, the time-reversal involution.
    pub fn reversed(&self) -> PhasePoint {
        PhasePoint::raw(self.head_side, self.head.clone(), self.tail_side, self.tail.clone())
    }

    /// Belongs to the reduced phase space: `[v_tail, v_head] > 0`.
    pub fn is_positive(&self, polygon: &Polygon) -> bool {
        polygon.side_cross(self.tail_side, self.head_side).is_positive()
    }

    pub fn fractions(&self) -> [Rat; 2] {
        [self.tail.clone(), self.head.clone()]
    }

    pub fn max_bits(&self) -> u64 {
        rational::bit_size(&self.tail).max(rational::bit_size(&self.head))
    }

    /// Parses `"i,s,j,t"` (fractions as `p/q` or decimals).
    pub fn parse(polygon: &Polygon, text: &str) -> Result<Self, crate::error::ParseError> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [i, s, j, t] = parts.as_slice() else {
            return Err(crate::error::ParseError::Malformed(format!("expected i,s,j,t but got {text:?}")));
        };
        let side = |x: &str| x.parse::<usize>().map_err(|_| crate::error::ParseError::Malformed(format!("bad side index {x:?}")));
        PhasePoint::new(polygon, side(i)?, rational::parse(s)?, side(j)?, rational::parse(t)?)
            .map_err(|e| crate::error::ParseError::Malformed(e.to_string()))
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.tail_side,
            rational::to_text(&self.tail),
            self.head_side,
            rational::to_text(&self.head)
        )
    }
}
