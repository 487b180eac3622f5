//! Road scenes, vehicle placement and line-of-sight queries.

mod los;
mod placement;
mod scene;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use los::{los_clear, segment_enters_polygon};
pub use placement::{advance, place_vehicles, place_vehicles_fixed, VehicleTemplate};
pub use scene::{build_cloverleaf, build_cross_junction, build_urban_grid, RAMP_CHORDS};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2D {
    type Output = Point2D;
    fn add(self, rhs: Self) -> Self {
        Point2D::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2D {
    type Output = Point2D;
    fn sub(self, rhs: Self) -> Self {
        Point2D::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2D {
    type Output = Point2D;
    fn mul(self, k: f64) -> Self {
        Point2D::new(self.x * k, self.y * k)
    }
}

/// A straight stretch of road centerline with a carriageway width.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSegment {
    pub id: usize,
    pub start: Point2D,
    pub end: Point2D,
    pub width: f64,
}

impl RoadSegment {
    pub fn new(id: usize, start: Point2D, end: Point2D, width: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidScene(format!("segment {id} has non-finite endpoints")));
        }
        if !(width > 0.0) {
            return Err(Error::param("width", format!("must be > 0, got {width}")));
        }
        if !(start.distance(end) > 0.0) {
            return Err(Error::InvalidScene(format!("segment {id} has zero length")));
        }
        Ok(Self { id, start, end, width })
    }

    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }

    /// Unit vector from `start` to `end`.
    pub fn direction(&self) -> Point2D {
        (self.end - self.start) * (1.0 / self.length())
    }

    /// Left-hand unit normal.
    pub fn normal(&self) -> Point2D {
        let d = self.direction();
        Point2D::new(-d.y, d.x)
    }

    /// Point at arc length `along` from `start`, shifted `lateral` meters along the normal.
    pub fn point_at(&self, along: f64, lateral: f64) -> Point2D {
        self.start + self.direction() * along + self.normal() * lateral
    }

    /// Perpendicular distance from `p` to the centerline (as a finite segment).
    pub fn distance_to(&self, p: Point2D) -> f64 {
        let d = self.end - self.start;
        let t = ((p - self.start).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        p.distance(self.start + d * t)
    }

    /// Corners of the width-inflated rectangle, counter-clockwise.
    pub fn footprint(&self) -> [Point2D; 4] {
        let n = self.normal() * (self.width / 2.0);
        [self.start - n, self.end - n, self.end + n, self.start + n]
    }
}

/// A connected polyline of segments that vehicles travel along and wrap around.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Indices into [`RoadNetwork::segments`], in travel order.
    pub segments: Vec<usize>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    pub segments: Vec<RoadSegment>,
    pub routes: Vec<Route>,
    /// Side of the square bounding region centered on the origin.
    pub region_side: f64,
    pub total_centerline_length: f64,
}

impl RoadNetwork {
    /// Assembles a network from routes given as segment lists.
    pub(crate) fn from_routes(region_side: f64, routes: Vec<Vec<RoadSegment>>) -> Result<Self> {
        let mut segments = Vec::new();
        let mut out_routes = Vec::with_capacity(routes.len());
        for route in routes {
            let mut idx = Vec::with_capacity(route.len());
            let mut length = 0.0;
            for mut seg in route {
                seg.id = segments.len();
                length += seg.length();
                idx.push(seg.id);
                segments.push(seg);
            }
            out_routes.push(Route { segments: idx, length });
        }
        let total_centerline_length = out_routes.iter().map(|r| r.length).sum();
        let net = Self {
            segments,
            routes: out_routes,
            region_side,
            total_centerline_length,
        };
        let half = region_side / 2.0 + 1e-9 * region_side.max(1.0);
        for s in &net.segments {
            for p in [s.start, s.end] {
                if p.x.abs() > half || p.y.abs() > half {
                    return Err(Error::InvalidScene(format!(
                        "segment {} leaves the bounding region",
                        s.id
                    )));
                }
            }
        }
        Ok(net)
    }

    /// Area of the bounding region in km².
    pub fn region_area_km2(&self) -> f64 {
        self.region_side * self.region_side * 1e-6
    }

    /// Locates arc length `arc` (in `[0, length)`) on a route.
    pub fn locate(&self, route: usize, arc: f64) -> (&RoadSegment, f64) {
        let r = &self.routes[route];
        let mut rem = arc;
        for (k, &si) in r.segments.iter().enumerate() {
            let seg = &self.segments[si];
            let len = seg.length();
            if rem < len || k + 1 == r.segments.len() {
                return (seg, rem.min(len));
            }
            rem -= len;
        }
        unreachable!("routes are never empty")
    }
}

/// Convex building footprint with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingFootprint {
    vertices: Vec<Point2D>,
}

impl BuildingFootprint {
    /// Validates convexity, orientation and positive area.
    pub fn new(vertices: Vec<Point2D>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidScene(format!("polygon has {n} vertices, need at least 3")));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidScene("polygon has non-finite vertices".into()));
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(Error::InvalidScene(
                    "polygon is not strictly convex and counter-clockwise".into(),
                ));
            }
        }
        let fp = Self { vertices };
        if !(fp.area() > 0.0) {
            return Err(Error::InvalidScene("polygon has zero area".into()));
        }
        Ok(fp)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![
            Point2D::new(x0, y0),
            Point2D::new(x1, y0),
            Point2D::new(x1, y1),
            Point2D::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2D] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
            / 2.0
    }

    pub fn centroid(&self) -> Point2D {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold(Point2D::default(), |acc, &v| acc + v);
        s * (1.0 / n)
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounds(&self) -> (Point2D, Point2D) {
        let mut lo = Point2D::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2D::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Point2D::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2D::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    /// Strict interior test.
    pub fn contains_interior(&self, p: Point2D) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) > 0.0
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrbanScene {
    pub network: RoadNetwork,
    pub buildings: Vec<BuildingFootprint>,
}

/// Spatial substrate of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum Scene {
    /// Open road network; LOS is drawn from the RMa LOS probability.
    Suburban(RoadNetwork),
    /// Road network with buildings; LOS is geometric.
    Urban(UrbanScene),
}

impl Scene {
    pub fn network(&self) -> &RoadNetwork {
        match self {
            Scene::Suburban(n) => n,
            Scene::Urban(u) => &u.network,
        }
    }

    pub fn buildings(&self) -> &[BuildingFootprint] {
        match self {
            Scene::Suburban(_) => &[],
            Scene::Urban(u) => &u.buildings,
        }
    }

    pub fn is_urban(&self) -> bool {
        matches!(self, Scene::Urban(_))
    }
}

/// Where a vehicle sits on its route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPosition {
    pub route: usize,
    /// Arc length from the route start, in `[0, route length)`.
    pub arc: f64,
    /// Signed perpendicular offset from the centerline.
    pub lateral: f64,
    /// Travels toward increasing arc length.
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleNode {
    pub id: usize,
    pub position: Point2D,
    /// Radians, counter-clockwise from +x.
    pub heading: f64,
    /// m/s
    pub speed: f64,
    pub antenna_height: f64,
    pub track: TrackPosition,
}

/// One Monte Carlo realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub vehicles: Vec<VehicleNode>,
    pub buildings: Vec<BuildingFootprint>,
    pub seed: u64,
}

impl Snapshot {
    /// Checks that ids are dense in `[0, N)` and in order.
    pub fn new(vehicles: Vec<VehicleNode>, buildings: Vec<BuildingFootprint>, seed: u64) -> Result<Self> {
        if let Some((i, v)) = vehicles.iter().enumerate().find(|(i, v)| v.id != *i) {
            return Err(Error::InvalidInput(format!(
                "vehicle at index {i} has id {}, ids must be dense and ordered",
                v.id
            )));
        }
        Ok(Self { vehicles, buildings, seed })
    }
}
