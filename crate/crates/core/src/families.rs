//! Constructors for the tables studied here, and seeded perturbation.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::FamilyError;
use crate::geometry::{Point, Polygon};
use crate::rational::{self, int, Rat, RatText};

fn pt(x: Rat, y: Rat) -> Point {
    Point::new(x, y)
}

fn build(vertices: Vec<Point>, name: String) -> Result<Polygon, FamilyError> {
    Polygon::new(vertices).map(|p| p.with_name(name)).map_err(FamilyError::NotConvex)
}

fn out_of_range(msg: impl Into<String>) -> FamilyError {
    FamilyError::ParamOutOfRange(msg.into())
}

/// The quadrilateral whose orbits all have period 20 or 36.
pub fn quad() -> Polygon {
    Polygon::from_ints(&[(0, 1), (0, 0), (1, 0), (QUAD_D.0, QUAD_D.1)]).expect("quad is convex").with_name("quad")
}

/// Fourth vertex of [`quad`]; the other three are `(0,1), (0,0), (1,0)`.
pub const QUAD_D: (i64, i64) = (3, 4);

/// Unit square with a roof: `A=(0,1), B=(0,0), C=(1,0), D=(1,1)` and apex
/// `E=(b, 1+a)`.
pub fn penthouse(a: &Rat, b: &Rat) -> Result<Polygon, FamilyError> {
    if !a.is_positive() {
        return Err(out_of_range(format!("penthouse needs a > 0, got {}", rational::to_text(a))));
    }
    if !rational::is_in_open_unit(b) {
        return Err(out_of_range(format!("penthouse needs 0 < b < 1, got {}", rational::to_text(b))));
    }
    let one = Rat::one();
    let vertices = vec![
        pt(Rat::zero(), one.clone()),
        pt(Rat::zero(), Rat::zero()),
        pt(one.clone(), Rat::zero()),
        pt(one.clone(), one.clone()),
        pt(b.clone(), &one + a),
    ];
    build(vertices, format!("penthouse(a={},b={})", rational::to_text(a), rational::to_text(b)))
}

/// `floor((a+1)/a)`.
pub fn penthouse_modulus(a: &Rat) -> i64 {
    rational::floor(&((a + Rat::one()) / a)).to_i64().expect("modulus fits in i64")
}

/// Whether `(a+1)/a` is not an integer.
pub fn penthouse_is_generic(a: &Rat) -> bool {
    !((a + Rat::one()) / a).is_integer()
}

/// Trapezoid `(0,0), (u,0), (offset+v,h), (offset,h)` with parallel sides
/// of lengths `u > v`.
pub fn trapezoid(u: &Rat, v: &Rat, offset: &Rat, h: &Rat) -> Result<Polygon, FamilyError> {
    if !(v.is_positive() && u > v && h.is_positive()) {
        return Err(out_of_range("trapezoid needs u > v > 0 and h > 0"));
    }
    let vertices = vec![
        pt(Rat::zero(), Rat::zero()),
        pt(u.clone(), Rat::zero()),
        pt(offset + v, h.clone()),
        pt(offset.clone(), h.clone()),
    ];
    let name = format!(
        "trapezoid(u={},v={},offset={},h={})",
        rational::to_text(u),
        rational::to_text(v),
        rational::to_text(offset),
        rational::to_text(h)
    );
    build(vertices, name)
}

/// `floor(u/(u-v))`.
pub fn trapezoid_modulus(u: &Rat, v: &Rat) -> i64 {
    rational::floor(&(u / (u - v))).to_i64().expect("modulus fits in i64")
}

pub fn trapezoid_is_generic(u: &Rat, v: &Rat) -> bool {
    !(u / (u - v)).is_integer()
}

/// Side counts of a lattice hexagon with sides of slopes 0, 1, infinity,
/// in elementary lattice segments, in cyclic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonSides {
    pub p1: i64,
    pub q1: i64,
    pub r1: i64,
    pub p2: i64,
    pub q2: i64,
    pub r2: i64,
}

impl HexagonSides {
    /// Closes the boundary: `q2 = q1 + p1 - p2`, `r2 = r1 - p1 + p2`.
    pub fn new(p1: i64, q1: i64, r1: i64, p2: i64) -> Result<Self, FamilyError> {
        if p1 <= 0 || q1 <= 0 || r1 <= 0 || p2 <= 0 {
            return Err(out_of_range("hexagon side counts must be positive"));
        }
        let q2 = q1 + p1 - p2;
        let r2 = r1 - p1 + p2;
        if q2 <= 0 || r2 <= 0 {
            return Err(FamilyError::ClosureViolated(format!("q2={q2}, r2={r2} for ({p1},{q1},{r1},{p2})")));
        }
        Ok(HexagonSides { p1, q1, r1, p2, q2, r2 })
    }

    pub fn as_array(&self) -> [i64; 6] {
        [self.p1, self.q1, self.r1, self.p2, self.q2, self.r2]
    }

    /// Sum of products of the side counts over all non-opposite pairs.
    pub fn n(&self) -> i64 {
        let [p1, q1, r1, p2, q2, r2] = self.as_array();
        p1 * q1 + q1 * r1 + r1 * p2 + p2 * q2 + q2 * r2 + r2 * p1 + p1 * r1 + q1 * p2 + r1 * q2 + p2 * r2 + q2 * p1 + r2 * q1
    }

    /// Edge vectors in order.
    pub fn edges(&self) -> [(i64, i64); 6] {
        let [p1, q1, r1, p2, q2, r2] = self.as_array();
        [(p1, 0), (q1, q1), (0, r1), (-p2, 0), (-q2, -q2), (0, -r2)]
    }
}

pub fn lattice_hexagon(p1: i64, q1: i64, r1: i64, p2: i64) -> Result<Polygon, FamilyError> {
    let sides = HexagonSides::new(p1, q1, r1, p2)?;
    let mut at = (0i64, 0i64);
    let mut vertices = Vec::with_capacity(6);
    for (dx, dy) in sides.edges() {
        vertices.push(Point::from_ints(at.0, at.1));
        at = (at.0 + dx, at.1 + dy);
    }
    debug_assert_eq!(at, (0, 0));
    build(vertices, format!("hexagon({p1},{q1},{r1},{p2})"))
}

/// Square of side `w` with a trapezoid roof of height `h` whose top edge
/// runs from `x1` to `x2`.
pub fn hexhouse(w: i64, x1: i64, x2: i64, h: i64) -> Result<Polygon, FamilyError> {
    if !(w > 0 && h > 0 && 0 <= x1 && x1 < x2 && x2 <= w) {
        return Err(out_of_range(format!("hexhouse needs 0 <= x1 < x2 <= w and h > 0, got w={w}, x1={x1}, x2={x2}, h={h}")));
    }
    if x1 == 0 && x2 == w {
        return Err(out_of_range("hexhouse roof degenerates to a rectangle"));
    }
    let p = Point::from_ints;
    let vertices = vec![p(0, 0), p(w, 0), p(w, w), p(x2, w + h), p(x1, w + h), p(0, w)];
    build(vertices, format!("hexhouse({w},{x1},{x2},{h})"))
}

/// Rectangle `[-W,W] x [-H,H]` with the top corners cut by `|x| + y = c1`
/// and the bottom corners by `|x| - y = c2`.
pub fn special_octagon(w: i64, h: i64, c1: i64, c2: i64) -> Result<Polygon, FamilyError> {
    let lo = w.max(h);
    if w <= 0 || h <= 0 || !(lo < c1 && c1 < w + h) || !(lo < c2 && c2 < w + h) {
        return Err(out_of_range(format!("special octagon needs max(W,H) < c1, c2 < W+H, got W={w}, H={h}, c1={c1}, c2={c2}")));
    }
    let p = Point::from_ints;
    let vertices = vec![
        p(-(c2 - h), -h),
        p(c2 - h, -h),
        p(w, w - c2),
        p(w, c1 - w),
        p(c1 - h, h),
        p(-(c1 - h), h),
        p(-w, c1 - w),
        p(-w, w - c2),
    ];
    build(vertices, format!("octagon({w},{h},{c1},{c2})"))
}

/// The kite with corners `(-1,1), (-1,-1), (1,-1), (3,3)`.
pub fn kite() -> Polygon {
    Polygon::from_ints(&[(-1, 1), (-1, -1), (1, -1), (3, 3)]).expect("kite is convex").with_name("kite")
}

/// Resolution of the perturbation offsets: each coordinate moves by
/// `eps * k / PERTURB_STEPS` with `k` uniform in `[-PERTURB_STEPS, PERTURB_STEPS]`.
pub const PERTURB_STEPS: i64 = 1_000_000;

/// Moves every vertex by an independent offset in `[-eps, eps]^2` drawn
/// from ChaCha8 seeded with `seed`.
pub fn perturb(polygon: &Polygon, eps: &Rat, seed: u64) -> Result<Polygon, FamilyError> {
    if eps.is_negative() {
        return Err(out_of_range("eps must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offset = || eps * Rat::new(rng.gen_range(-PERTURB_STEPS..=PERTURB_STEPS).into(), PERTURB_STEPS.into());
    let vertices = polygon.vertices().iter().map(|v| pt(&v.x + offset(), &v.y + offset())).collect();
    let name = format!("{} perturbed(eps={},seed={seed})", polygon.name().unwrap_or("polygon"), rational::to_text(eps));
    Polygon::new(vertices).map(|p| p.with_name(name)).map_err(FamilyError::NotConvexAfterPerturbation)
}

/// `{"family": "penthouse", "params": {"a": "2", "b": "3/5"}}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, RatText>,
}

impl FamilySpec {
    pub fn new(family: &str, params: &[(&str, Rat)]) -> Self {
        FamilySpec {
            family: family.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), RatText(v.clone()))).collect(),
        }
    }

    fn rat(&self, key: &str) -> Result<Rat, FamilyError> {
        self.params.get(key).map(|r| r.0.clone()).ok_or_else(|| out_of_range(format!("missing parameter {key}")))
    }

    fn rat_or(&self, key: &str, default: Rat) -> Rat {
        self.params.get(key).map(|r| r.0.clone()).unwrap_or(default)
    }

    fn integer(&self, key: &str) -> Result<i64, FamilyError> {
        let r = self.rat(key)?;
        if !r.is_integer() {
            return Err(out_of_range(format!("parameter {key} must be an integer")));
        }
        r.to_integer().to_i64().ok_or_else(|| out_of_range(format!("parameter {key} too large")))
    }

    pub fn build(&self) -> Result<Polygon, FamilyError> {
        match self.family.as_str() {
            "quad" => Ok(quad()),
            "kite" => Ok(kite()),
            "penthouse" => penthouse(&self.rat("a")?, &self.rat("b")?),
            "trapezoid" => trapezoid(&self.rat("u")?, &self.rat("v")?, &self.rat_or("offset", Rat::zero()), &self.rat_or("h", int(1))),
            "lattice_hexagon" => lattice_hexagon(self.integer("p1")?, self.integer("q1")?, self.integer("r1")?, self.integer("p2")?),
            "hexhouse" => hexhouse(self.integer("w")?, self.integer("x1")?, self.integer("x2")?, self.integer("h")?),
            "special_octagon" => special_octagon(self.integer("W")?, self.integer("H")?, self.integer("c1")?, self.integer("c2")?),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub domain: &'static str,
    pub default: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyInfo {
    pub family: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamInfo>,
}

/// Every family accepted by [`FamilySpec::build`], with parameter domains.
pub fn catalog() -> Vec<FamilyInfo> {
    let p = |name, domain, default| ParamInfo { name, domain, default };
    vec![
        FamilyInfo { family: "quad", description: "quadrilateral with periods 20 and 36", params: vec![] },
        FamilyInfo {
            family: "penthouse",
            description: "unit square with apex (b, 1+a)",
            params: vec![p("a", "rational, a > 0", "2"), p("b", "rational, 0 < b < 1", "3/5")],
        },
        FamilyInfo {
            family: "trapezoid",
            description: "(0,0), (u,0), (offset+v,h), (offset,h)",
            params: vec![
                p("u", "rational, u > v", "3"),
                p("v", "rational, v > 0", "1"),
                p("offset", "rational", "0"),
                p("h", "rational, h > 0", "1"),
            ],
        },
        FamilyInfo {
            family: "lattice_hexagon",
            description: "lattice hexagon with side slopes 0, 1, infinity",
            params: vec![
                p("p1", "integer >= 1", "1"),
                p("q1", "integer >= 1", "1"),
                p("r1", "integer >= 1", "1"),
                p("p2", "integer >= 1, q1+p1-p2 >= 1, r1-p1+p2 >= 1", "1"),
            ],
        },
        FamilyInfo {
            family: "hexhouse",
            description: "square of side w with a trapezoid roof from x1 to x2 at height w+h",
            params: vec![
                p("w", "integer >= 1", "4"),
                p("x1", "integer, 0 <= x1 < x2", "1"),
                p("x2", "integer, x2 <= w", "3"),
                p("h", "integer >= 1", "2"),
            ],
        },
        FamilyInfo {
            family: "special_octagon",
            description: "rectangle [-W,W]x[-H,H] with corners cut by |x|+y=c1 and |x|-y=c2",
            params: vec![
                p("W", "integer >= 1", "2"),
                p("H", "integer >= 1", "2"),
                p("c1", "integer, max(W,H) < c1 < W+H", "3"),
                p("c2", "integer, max(W,H) < c2 < W+H", "3"),
            ],
        },
        FamilyInfo { family: "kite", description: "kite (-1,1), (-1,-1), (1,-1), (3,3)", params: vec![] },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GeometryError;
    use crate::geometry::phase_area;
    use crate::rational::ratio;

    #[test]
    fn penthouse_rectangle_areas() {
        let (a, b) = (ratio(2, 1), ratio(3, 5));
        let p = penthouse(&a, &b).unwrap();
        // sides: 0 AB, 1 BC, 2 CD, 3 DE, 4 EA
        let one = int(1);
        let cases = [
            ((0, 1), one.clone()),
            ((1, 3), a.clone()),
            ((2, 3), &one - &b),
            ((2, 4), b.clone()),
            ((3, 4), a.clone()),
            ((3, 0), &one - &b),
            ((4, 0), b.clone()),
            ((4, 1), a.clone()),
            ((1, 2), one.clone()),
        ];
        for ((i, j), want) in cases {
            assert_eq!(p.side_cross(i, j), want, "sides {i},{j}");
        }
        assert_eq!(phase_area(&p), int(4) + int(3) * &a);
    }

    #[test]
    fn penthouse_rejects_bad_params() {
        assert!(penthouse(&int(0), &ratio(1, 2)).is_err());
        assert!(penthouse(&int(1), &int(1)).is_err());
    }

    #[test]
    fn moduli() {
        assert_eq!(penthouse_modulus(&int(2)), 1);
        assert_eq!(penthouse_modulus(&ratio(2, 5)), 3);
        assert!(!penthouse_is_generic(&int(1)));
        assert_eq!(trapezoid_modulus(&int(3), &int(1)), 1);
        assert!(trapezoid_is_generic(&int(3), &int(1)));
        assert_eq!(trapezoid_modulus(&int(5), &int(3)), 2);
    }

    #[test]
    fn hexagon_closure_and_n() {
        let s = HexagonSides::new(1, 1, 1, 1).unwrap();
        assert_eq!(s.n(), 12);
        assert!(matches!(HexagonSides::new(2, 1, 1, 1), Err(FamilyError::ClosureViolated(_))));
        let s = HexagonSides::new(2, 1, 2, 1).unwrap();
        assert_eq!((s.q2, s.r2), (2, 1));
        let sum = s.edges().iter().fold((0, 0), |acc, e| (acc.0 + e.0, acc.1 + e.1));
        assert_eq!(sum, (0, 0));
        let hex = lattice_hexagon(2, 1, 2, 1).unwrap();
        assert_eq!(phase_area(&hex), int(s.n()));
    }

    #[test]
    fn hexhouse_domain() {
        assert!(matches!(hexhouse(4, 3, 2, 1), Err(FamilyError::ParamOutOfRange(_))));
        assert!(hexhouse(4, 1, 3, 2).is_ok());
        // a roof edge flush with the wall leaves three collinear vertices
        assert!(matches!(hexhouse(4, 0, 3, 2), Err(FamilyError::NotConvex(GeometryError::CollinearVertices(_)))));
    }

    #[test]
    fn octagon_is_mirror_symmetric() {
        let p = special_octagon(2, 2, 3, 3).unwrap();
        assert_eq!(p.len(), 8);
        let mut vs: Vec<Point> = p.vertices().to_vec();
        let mut mirrored: Vec<Point> = vs.iter().map(|v| Point::new(-v.x.clone(), v.y.clone())).collect();
        vs.sort();
        mirrored.sort();
        assert_eq!(vs, mirrored);
        assert!(special_octagon(2, 2, 2, 3).is_err());
    }

    #[test]
    fn kite_vertices() {
        let k = kite();
        assert_eq!(k.vertices()[3], Point::from_ints(3, 3));
        assert!(phase_area(&k).is_positive());
    }

    #[test]
    fn perturbation_is_seeded() {
        let q = quad();
        assert_eq!(perturb(&q, &Rat::zero(), 7).unwrap().vertices(), q.vertices());
        let a = perturb(&q, &ratio(1, 100), 1).unwrap();
        let b = perturb(&q, &ratio(1, 100), 1).unwrap();
        let c = perturb(&q, &ratio(1, 100), 2).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_ne!(a.vertices(), c.vertices());
        for (v, w) in q.vertices().iter().zip(a.vertices()) {
            assert!((&w.x - &v.x).abs() <= ratio(1, 100) && (&w.y - &v.y).abs() <= ratio(1, 100));
        }
    }

    #[test]
    fn family_spec_json() {
        let spec: FamilySpec = serde_json::from_str(r#"{"family":"penthouse","params":{"a":"2","b":"3/5"}}"#).unwrap();
        let p = spec.build().unwrap();
        assert_eq!(p.vertices()[4], Point::new(ratio(3, 5), int(3)));
        let bad: FamilySpec = serde_json::from_str(r#"{"family":"dodecahedron"}"#).unwrap();
        assert!(matches!(bad.build(), Err(FamilyError::UnknownFamily(_))));
    }
}
