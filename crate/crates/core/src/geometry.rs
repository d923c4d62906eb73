//! Exact plane geometry for convex billiard tables.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, ParseError};
use crate::rational::{self, Rat, RatText};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

/// Displacement between two points. Same representation as [`Point`].
pub type Vec2 = Point;

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(rational::int(x), rational::int(y))
    }

    pub fn scale(&self, k: &Rat) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [rational::to_f64(&self.x), rational::to_f64(&self.y)]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rational::to_text(&self.x), rational::to_text(&self.y))
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-&self.x, -&self.y)
    }
}

/// Determinant `[u, v] = u.x * v.y - u.y * v.x`.
pub fn cross(u: &Vec2, v: &Vec2) -> Rat {
    &u.x * &v.y - &u.y * &v.x
}

pub fn cross_f64(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// A strictly convex polygon with counterclockwise vertices.
///
/// Side `i` runs from vertex `i` to vertex `i + 1` (cyclically) and has edge
/// vector `v_i = P_{i+1} - P_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    name: Option<String>,
    vertices: Vec<Point>,
    sides: Vec<Vec2>,
}

/// Outcome of [`validate`] besides the polygon itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Input was clockwise and has been reversed.
    pub reversed: bool,
    pub vertex_count: usize,
    /// Edge vectors `v_i` after orientation fix-up, as `["x", "y"]`.
    pub sides: Vec<[RatText; 2]>,
    /// Unordered side pairs `{i, j}` with `[v_i, v_j] = 0`.
    pub parallel_pairs: Vec<(usize, usize)>,
    #[serde(with = "rational::text")]
    pub area: Rat,
    #[serde(with = "rational::text")]
    pub phase_area: Rat,
}

/// Checks convexity and orientation. Clockwise input is reversed.
pub fn validate(vertices: Vec<Point>) -> Result<(Polygon, ValidationReport), GeometryError> {
    let n = vertices.len();
    if n < 3 {
        return Err(GeometryError::TooFewVertices(n));
    }
    for i in 0..n {
        for j in 0..i {
            if vertices[i] == vertices[j] {
                return Err(GeometryError::DuplicateVertex(i));
            }
        }
    }
    let mut vertices = vertices;
    let twice_area = shoelace(&vertices);
    if twice_area.is_zero() {
        return Err(GeometryError::CollinearVertices(0));
    }
    let reversed = twice_area.is_negative();
    if reversed {
        vertices.reverse();
    }
    let sides = edge_vectors(&vertices);
    for i in 0..n {
        let turn = cross(&sides[i], &sides[(i + 1) % n]);
        if turn.is_zero() {
            return Err(GeometryError::CollinearVertices((i + 1) % n));
        }
        if turn.is_negative() {
            return Err(GeometryError::NotConvex((i + 1) % n));
        }
    }
    // Left turns everywhere still admits star polygons; every vertex must lie
    // strictly left of every non-incident side.
    for i in 0..n {
        for k in 0..n {
            if k == i || k == (i + 1) % n {
                continue;
            }
            if !cross(&sides[i], &(&vertices[k] - &vertices[i])).is_positive() {
                return Err(GeometryError::NotConvex(k));
            }
        }
    }
    let polygon = Polygon { name: None, vertices, sides };
    let report = ValidationReport {
        reversed,
        vertex_count: n,
        sides: polygon
            .sides
            .iter()
            .map(|v| [RatText(v.x.clone()), RatText(v.y.clone())])
            .collect(),
        parallel_pairs: polygon.parallel_pairs(),
        area: polygon.area(),
        phase_area: phase_area(&polygon),
    };
    Ok((polygon, report))
}

fn edge_vectors(vertices: &[Point]) -> Vec<Vec2> {
    let n = vertices.len();
    (0..n).map(|i| &vertices[(i + 1) % n] - &vertices[i]).collect()
}

fn shoelace(vertices: &[Point]) -> Rat {
    let n = vertices.len();
    (0..n)
        .map(|i| cross(&vertices[i], &vertices[(i + 1) % n]))
        .fold(Rat::zero(), |a, b| a + b)
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        validate(vertices).map(|(p, _)| p)
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self, GeometryError> {
        Polygon::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i % self.vertices.len()]
    }

    pub fn sides(&self) -> &[Vec2] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> &Vec2 {
        &self.sides[i]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `[v_i, v_j]`.
    pub fn side_cross(&self, i: usize, j: usize) -> Rat {
        cross(&self.sides[i], &self.sides[j])
    }

    /// Point at fraction `t` along side `i`.
    pub fn point_on_side(&self, i: usize, t: &Rat) -> Point {
        &self.vertices[i] + &self.sides[i].scale(t)
    }

    pub fn parallel_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.side_cross(i, j).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Euclidean area (shoelace).
    pub fn area(&self) -> Rat {
        shoelace(&self.vertices) / rational::int(2)
    }

    /// Image under `p -> A p + b` for a 2x2 matrix `A` given row-major.
    /// Orientation is re-normalized, so reflections are allowed.
    pub fn transformed(&self, a: [[Rat; 2]; 2], b: &Point) -> Result<Polygon, GeometryError> {
        let vertices = self
            .vertices
            .iter()
            .map(|p| {
                Point::new(
                    &a[0][0] * &p.x + &a[0][1] * &p.y + &b.x,
                    &a[1][0] * &p.x + &a[1][1] * &p.y + &b.y,
                )
            })
            .collect();
        let out = Polygon::new(vertices)?;
        Ok(match &self.name {
            Some(n) => out.with_name(n.clone()),
            None => out,
        })
    }

    pub fn to_f64(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(Point::to_f64).collect()
    }

    pub fn to_spec(&self) -> PolygonSpec {
        PolygonSpec {
            name: self.name.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|p| [RatText(p.x.clone()), RatText(p.y.clone())])
                .collect(),
        }
    }
}

/// Total phase area: the sum of `[v_i, v_j]` over ordered side pairs with
/// positive bracket.
pub fn phase_area(polygon: &Polygon) -> Rat {
    let n = polygon.len();
    let mut total = Rat::zero();
    for i in 0..n {
        for j in 0..n {
            let c = polygon.side_cross(i, j);
            if c.is_positive() {
                total += c;
            }
        }
    }
    total
}

/// Upper half-plane first, then counterclockwise.
fn angular_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    fn half(v: &Vec2) -> u8 {
        if v.y.is_positive() || (v.y.is_zero() && v.x.is_positive()) {
            0
        } else {
            1
        }
    }
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

fn lowest_vertex(vertices: &[Point]) -> &Point {
    vertices
        .iter()
        .min_by(|a, b| a.y.cmp(&b.y).then_with(|| a.x.cmp(&b.x)))
        .expect("nonempty polygon")
}

/// Minkowski sum `P + (-P)`, by merging the edge vectors of `P` and `-P` in
/// angular order. Parallel edges are fused, so the result is strictly convex.
pub fn difference_body(polygon: &Polygon) -> Polygon {
    let mut edges: Vec<Vec2> = polygon.sides.iter().cloned().chain(polygon.sides.iter().map(|v| -v)).collect();
    edges.sort_by(angular_cmp);
    let mut merged: Vec<Vec2> = Vec::with_capacity(edges.len());
    for e in edges {
        match merged.last_mut() {
            Some(last) if angular_cmp(last, &e) == Ordering::Equal => *last = &*last + &e,
            _ => merged.push(e),
        }
    }
    let negated: Vec<Point> = polygon.vertices.iter().map(|p| -p).collect();
    let start = lowest_vertex(&polygon.vertices) + lowest_vertex(&negated);
    let mut vertices = Vec::with_capacity(merged.len());
    let mut cur = start;
    for e in &merged {
        vertices.push(cur.clone());
        cur = &cur + e;
    }
    debug_assert_eq!(cur, vertices[0]);
    Polygon::new(vertices).expect("Minkowski sum of a convex polygon is convex")
}

/// JSON form of a polygon: `{"name": ..., "vertices": [[x, y], ...]}` where
/// each coordinate is a number or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<[RatText; 2]>,
}

impl PolygonSpec {
    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|[x, y]| Point::new(x.0.clone(), y.0.clone())).collect()
    }

    pub fn validate(&self) -> Result<(Polygon, ValidationReport), GeometryError> {
        let (p, r) = validate(self.points())?;
        Ok((
            match &self.name {
                Some(n) => p.with_name(n.clone()),
                None => p,
            },
            r,
        ))
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Malformed(e.to_string()))
    }
}

impl Serialize for Polygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = PolygonSpec::deserialize(d)?;
        spec.validate().map(|(p, _)| p).map_err(serde::de::Error::custom)
    }
}
