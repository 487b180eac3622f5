use std::f64::consts::PI;

use super::{BuildingFootprint, Point2D, RoadNetwork, RoadSegment, UrbanScene};
use crate::{Error, Result};

/// Chords per cloverleaf loop ramp (16 per quarter turn).
pub const RAMP_CHORDS: usize = 48;

/// Angular sweep of a cloverleaf loop ramp.
const RAMP_SWEEP: f64 = 1.5 * PI;

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be a positive finite number, got {v}")))
    }
}

fn cross_arms(arm_length: f64, road_width: f64) -> Result<Vec<Vec<RoadSegment>>> {
    let a = arm_length;
    Ok(vec![
        vec![RoadSegment::new(0, Point2D::new(-a, 0.0), Point2D::new(a, 0.0), road_width)?],
        vec![RoadSegment::new(0, Point2D::new(0.0, -a), Point2D::new(0.0, a), road_width)?],
    ])
}

/// Two perpendicular highways of length `2·arm_length` crossing at the origin.
pub fn build_cross_junction(arm_length: f64, road_width: f64) -> Result<RoadNetwork> {
    positive("arm_length", arm_length)?;
    positive("road_width", road_width)?;
    RoadNetwork::from_routes(2.0 * arm_length, cross_arms(arm_length, road_width)?)
}

/// Cross junction plus one loop ramp per quadrant.
///
/// Each loop is a three-quarter circle of radius `loop_radius` tangent to
/// both highways, leaving the horizontal arm at `(±r, 0)` and merging onto
/// the vertical arm at `(0, ±r)`; it is approximated by [`RAMP_CHORDS`]
/// chords.
pub fn build_cloverleaf(arm_length: f64, loop_radius: f64, road_width: f64) -> Result<RoadNetwork> {
    positive("arm_length", arm_length)?;
    positive("loop_radius", loop_radius)?;
    positive("road_width", road_width)?;
    if arm_length <= 4.0 * loop_radius {
        return Err(Error::param(
            "loop_radius",
            format!("loops do not fit: arm_length {arm_length} must exceed 4·loop_radius = {}", 4.0 * loop_radius),
        ));
    }
    let mut routes = cross_arms(arm_length, road_width)?;
    let r = loop_radius;
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        let pts: Vec<Point2D> = (0..=RAMP_CHORDS)
            .map(|k| {
                let theta = -PI / 2.0 + RAMP_SWEEP * k as f64 / RAMP_CHORDS as f64;
                Point2D::new(sx * r * (1.0 + theta.cos()), sy * r * (1.0 + theta.sin()))
            })
            .collect();
        let ramp = pts
            .windows(2)
            .map(|w| RoadSegment::new(0, w[0], w[1], road_width))
            .collect::<Result<Vec<_>>>()?;
        routes.push(ramp);
    }
    RoadNetwork::from_routes(2.0 * arm_length, routes)
}

/// Manhattan grid centered on the origin with one building per block.
///
/// Streets run along block edges, `blocks_per_side + 1` in each direction;
/// each building fills its block inset by `street_width / 2`, so its walls
/// coincide with the street edges.
pub fn build_urban_grid(blocks_per_side: usize, block_size: f64, street_width: f64) -> Result<UrbanScene> {
    if blocks_per_side == 0 {
        return Err(Error::param("blocks_per_side", "must be at least 1"));
    }
    positive("block_size", block_size)?;
    positive("street_width", street_width)?;
    if block_size <= street_width {
        return Err(Error::param(
            "street_width",
            format!("must be smaller than block_size ({street_width} >= {block_size})"),
        ));
    }
    let side = blocks_per_side as f64 * block_size;
    let half = side / 2.0;
    let lines: Vec<f64> = (0..=blocks_per_side).map(|i| -half + i as f64 * block_size).collect();

    let mut routes = Vec::with_capacity(2 * lines.len());
    for &y in &lines {
        routes.push(vec![RoadSegment::new(0, Point2D::new(-half, y), Point2D::new(half, y), street_width)?]);
    }
    for &x in &lines {
        routes.push(vec![RoadSegment::new(0, Point2D::new(x, -half), Point2D::new(x, half), street_width)?]);
    }
    let network = RoadNetwork::from_routes(side, routes)?;

    let inset = street_width / 2.0;
    let mut buildings = Vec::with_capacity(blocks_per_side * blocks_per_side);
    for j in 0..blocks_per_side {
        for i in 0..blocks_per_side {
            buildings.push(BuildingFootprint::rectangle(
                lines[i] + inset,
                lines[j] + inset,
                lines[i + 1] - inset,
                lines[j + 1] - inset,
            )?);
        }
    }
    Ok(UrbanScene { network, buildings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::los::segment_enters_polygon;

    #[test]
    fn cross_junction_dimensions() {
        let net = build_cross_junction(500.0, 20.0).unwrap();
        assert_eq!(net.segments.len(), 2);
        assert_eq!(net.total_centerline_length, 2000.0);
        assert_eq!(net.region_side, 1000.0);
        let (h, v) = (&net.segments[0], &net.segments[1]);
        assert_eq!(h.length(), 1000.0);
        assert_eq!(h.direction().dot(v.direction()), 0.0);
        // both centerlines pass through the origin
        assert_eq!(h.distance_to(Point2D::default()), 0.0);
        assert_eq!(v.distance_to(Point2D::default()), 0.0);

        let small = build_cross_junction(250.0, 10.0).unwrap();
        assert!((small.region_area_km2() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn cross_junction_rejects_bad_dimensions() {
        for (a, w) in [(0.0, 20.0), (-1.0, 20.0), (500.0, 0.0), (500.0, -3.0)] {
            assert!(matches!(build_cross_junction(a, w), Err(Error::InvalidParameter { .. })));
        }
    }

    #[test]
    fn cloverleaf_structure() {
        let net = build_cloverleaf(500.0, 50.0, 20.0).unwrap();
        assert_eq!(net.routes.len(), 6);
        assert_eq!(net.routes[0].segments.len(), 1);
        assert_eq!(net.routes[1].segments.len(), 1);
        for ramp in &net.routes[2..] {
            assert_eq!(ramp.segments.len(), RAMP_CHORDS);
        }
        let ramps: f64 = net.routes[2..].iter().map(|r| r.length).sum();
        assert!((net.total_centerline_length - (2000.0 + ramps)).abs() < 1e-9);
    }

    #[test]
    fn cloverleaf_ramp_length_close_to_arc() {
        let net = build_cloverleaf(500.0, 50.0, 20.0).unwrap();
        let arc = 0.75 * 2.0 * PI * 50.0;
        for ramp in &net.routes[2..] {
            // the chord sum is computed from segment endpoints independently of Route::length
            let chord_sum: f64 = ramp
                .segments
                .iter()
                .map(|&i| {
                    let s = &net.segments[i];
                    ((s.end.x - s.start.x).powi(2) + (s.end.y - s.start.y).powi(2)).sqrt()
                })
                .sum();
            assert!((chord_sum - arc).abs() / arc < 0.01, "{chord_sum} vs {arc}");
            assert!(chord_sum < arc);
        }
    }

    #[test]
    fn cloverleaf_ramps_join_arms() {
        let net = build_cloverleaf(500.0, 50.0, 20.0).unwrap();
        for ramp in &net.routes[2..] {
            let first = &net.segments[ramp.segments[0]];
            let last = &net.segments[*ramp.segments.last().unwrap()];
            assert!(first.start.y.abs() < 1e-9 && (first.start.x.abs() - 50.0).abs() < 1e-9);
            assert!(last.end.x.abs() < 1e-9 && (last.end.y.abs() - 50.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cloverleaf_rejects_oversized_loops() {
        assert!(matches!(build_cloverleaf(500.0, 200.0, 20.0), Err(Error::InvalidParameter { .. })));
        assert!(build_cloverleaf(500.0, 125.0, 20.0).is_err());
        assert!(build_cloverleaf(500.0, 0.0, 20.0).is_err());
    }

    #[test]
    fn urban_grid_counts() {
        let one = build_urban_grid(1, 100.0, 20.0).unwrap();
        assert_eq!(one.network.segments.len(), 4);
        assert_eq!(one.buildings.len(), 1);
        let (lo, hi) = one.buildings[0].bounds();
        assert!((hi.x - lo.x - 80.0).abs() < 1e-9 && (hi.y - lo.y - 80.0).abs() < 1e-9);

        let four = build_urban_grid(4, 100.0, 20.0).unwrap();
        assert_eq!(four.buildings.len(), 16);
        assert_eq!(four.network.segments.len(), 10);
        assert_eq!(four.network.total_centerline_length, 10.0 * 400.0);
    }

    #[test]
    fn urban_grid_rejects_bad_dimensions() {
        assert!(build_urban_grid(0, 100.0, 20.0).is_err());
        assert!(build_urban_grid(2, 20.0, 20.0).is_err());
        assert!(build_urban_grid(2, 100.0, 0.0).is_err());
        assert!(build_urban_grid(2, -100.0, 10.0).is_err());
    }

    /// Brute force: a convex polygon and a rectangle overlap with positive
    /// area iff some point of a fine grid over the polygon's bounding box lies
    /// strictly inside both.
    fn overlap_by_sampling(b: &BuildingFootprint, rect: &BuildingFootprint) -> bool {
        let (lo, hi) = b.bounds();
        let n = 200;
        for i in 0..=n {
            for j in 0..=n {
                let p = Point2D::new(
                    lo.x + (hi.x - lo.x) * i as f64 / n as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / n as f64,
                );
                if b.contains_interior(p) && rect.contains_interior(p) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn urban_grid_buildings_clear_of_streets() {
        for (blocks, size, width) in [(2, 100.0, 20.0), (4, 250.0, 20.0), (3, 60.0, 15.0)] {
            let scene = build_urban_grid(blocks, size, width).unwrap();
            for seg in &scene.network.segments {
                let rect = BuildingFootprint::new(seg.footprint().to_vec()).unwrap();
                for b in &scene.buildings {
                    assert!(!overlap_by_sampling(b, &rect));
                    // no edge of the street rectangle passes through a building interior
                    let fp = seg.footprint();
                    for k in 0..4 {
                        assert!(!segment_enters_polygon(fp[k], fp[(k + 1) % 4], b));
                    }
                }
            }
        }
    }
}
