//! Affine maps of the phase plane whose linear part is diagonal or
//! anti-diagonal. Every iterate of the billiard map restricted to a
//! continuity rectangle has this shape, so boxes map to boxes.

use num_traits::{One, Signed, Zero};

use crate::rational::Rat;

/// `out[c] = scale[c] * in[c ^ swap] + offset[c]` for `c` in `{0, 1}`
/// (coordinate 0 is the tail fraction, 1 the head fraction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisAffine {
    pub swap: bool,
    pub scale: [Rat; 2],
    pub offset: [Rat; 2],
}

/// Open axis-aligned box `(lo0, hi0) x (lo1, hi1)`.
pub type Box2 = [(Rat, Rat); 2];

impl AxisAffine {
    pub fn identity() -> Self {
        AxisAffine { swap: false, scale: [Rat::one(), Rat::one()], offset: [Rat::zero(), Rat::zero()] }
    }

    /// One billiard step on a continuity piece: `(s, t) -> (t, slope * s + offset)`.
    pub fn step(slope: Rat, offset: Rat) -> Self {
        AxisAffine { swap: true, scale: [Rat::one(), slope], offset: [Rat::zero(), offset] }
    }

    fn src(&self, c: usize) -> usize {
        c ^ usize::from(self.swap)
    }

    pub fn apply(&self, p: &[Rat; 2]) -> [Rat; 2] {
        [0, 1].map(|c| &self.scale[c] * &p[self.src(c)] + &self.offset[c])
    }

    pub fn apply_f64(&self, p: [f64; 2]) -> [f64; 2] {
        use num_traits::ToPrimitive;
        [0, 1].map(|c| {
            self.scale[c].to_f64().unwrap_or(f64::NAN) * p[self.src(c)] + self.offset[c].to_f64().unwrap_or(f64::NAN)
        })
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &AxisAffine) -> AxisAffine {
        let mut scale = [Rat::zero(), Rat::zero()];
        let mut offset = [Rat::zero(), Rat::zero()];
        for c in 0..2 {
            let g = self.src(c);
            scale[c] = &self.scale[c] * &inner.scale[g];
            offset[c] = &self.scale[c] * &inner.offset[g] + &self.offset[c];
        }
        AxisAffine { swap: self.swap ^ inner.swap, scale, offset }
    }

    pub fn inverse(&self) -> AxisAffine {
        let mut scale = [Rat::zero(), Rat::zero()];
        let mut offset = [Rat::zero(), Rat::zero()];
        for d in 0..2 {
            let c = self.src(d);
            scale[d] = self.scale[c].recip();
            offset[d] = -&self.offset[c] / &self.scale[c];
        }
        AxisAffine { swap: self.swap, scale, offset }
    }

    pub fn apply_box(&self, b: &Box2) -> Box2 {
        [0, 1].map(|c| {
            let (lo, hi) = &b[self.src(c)];
            let a = &self.scale[c] * lo + &self.offset[c];
            let z = &self.scale[c] * hi + &self.offset[c];
            if a <= z {
                (a, z)
            } else {
                (z, a)
            }
        })
    }

    /// Row-major linear part.
    pub fn linear(&self) -> [[Rat; 2]; 2] {
        let z = Rat::zero;
        if self.swap {
            [[z(), self.scale[0].clone()], [self.scale[1].clone(), z()]]
        } else {
            [[self.scale[0].clone(), z()], [z(), self.scale[1].clone()]]
        }
    }

    /// `|det|` of the linear part.
    pub fn abs_det(&self) -> Rat {
        (&self.scale[0] * &self.scale[1]).abs()
    }

    pub fn is_identity(&self) -> bool {
        *self == AxisAffine::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = Rat> {
        (-20i64..20, 1i64..9).prop_map(|(p, q)| ratio(p, q))
    }

    fn nonzero() -> impl Strategy<Value = Rat> {
        rat().prop_filter("nonzero", |r| !r.is_zero())
    }

    fn affine() -> impl Strategy<Value = AxisAffine> {
        (any::<bool>(), nonzero(), nonzero(), rat(), rat())
            .prop_map(|(swap, a, b, c, d)| AxisAffine { swap, scale: [a, b], offset: [c, d] })
    }

    proptest! {
        #[test]
        fn composition_matches_sequential_application(f in affine(), g in affine(), x in rat(), y in rat()) {
            let p = [x, y];
            prop_assert_eq!(g.after(&f).apply(&p), g.apply(&f.apply(&p)));
        }

        #[test]
        fn inverse_round_trips(f in affine(), x in rat(), y in rat()) {
            let p = [x, y];
            prop_assert_eq!(f.inverse().apply(&f.apply(&p)), p.clone());
            prop_assert!(f.after(&f.inverse()).is_identity());
        }
    }

    #[test]
    fn step_swaps_coordinates() {
        let f = AxisAffine::step(int(-1), int(1));
        assert_eq!(f.apply(&[ratio(1, 4), ratio(1, 2)]), [ratio(1, 2), ratio(3, 4)]);
        let b = f.apply_box(&[(int(0), ratio(1, 2)), (ratio(1, 3), int(1))]);
        assert_eq!(b, [(ratio(1, 3), int(1)), (ratio(1, 2), int(1))]);
    }
}
