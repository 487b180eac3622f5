use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{RoadNetwork, TrackPosition, VehicleNode};
use crate::{Error, Result};

/// Per-vehicle attributes that do not come from the point process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleTemplate {
    pub antenna_height: f64,
    pub speed: f64,
}

impl Default for VehicleTemplate {
    fn default() -> Self {
        Self { antenna_height: 1.5, speed: 0.0 }
    }
}

/// Resolves a track position to a planar position and heading.
pub(crate) fn resolve(network: &RoadNetwork, track: &TrackPosition) -> (super::Point2D, f64) {
    let (seg, along) = network.locate(track.route, track.arc);
    let pos = seg.point_at(along, track.lateral);
    let d = seg.direction();
    let mut heading = if track.forward { d.y.atan2(d.x) } else { (-d.y).atan2(-d.x) };
    // (-π, π]
    if heading <= -std::f64::consts::PI {
        heading += 2.0 * std::f64::consts::PI;
    }
    (pos, heading)
}

fn place_one<R: Rng + ?Sized>(
    network: &RoadNetwork,
    id: usize,
    template: VehicleTemplate,
    rng: &mut R,
) -> VehicleNode {
    // arc position along the concatenation of all routes = length-proportional segment choice
    let mut u = rng.random::<f64>() * network.total_centerline_length;
    let mut route = network.routes.len() - 1;
    for (i, r) in network.routes.iter().enumerate() {
        if u < r.length {
            route = i;
            break;
        }
        u -= r.length;
    }
    let arc = u.clamp(0.0, network.routes[route].length * (1.0 - f64::EPSILON));
    let (seg, _) = network.locate(route, arc);
    let half_width = seg.width / 2.0;
    let lateral = rng.random_range(-half_width..=half_width);
    let forward = rng.random_bool(0.5);
    let track = TrackPosition { route, arc, lateral, forward };
    let (position, heading) = resolve(network, &track);
    VehicleNode {
        id,
        position,
        heading,
        speed: template.speed,
        antenna_height: template.antenna_height,
        track,
    }
}

/// Poisson point process on the road network.
///
/// The vehicle count is `Poisson(density · region area in km²)`; each vehicle
/// lands uniformly on the total centerline length with a uniform lateral
/// offset within the carriageway and a random travel direction.
pub fn place_vehicles<R: Rng + ?Sized>(
    network: &RoadNetwork,
    density: f64,
    template: VehicleTemplate,
    rng: &mut R,
) -> Result<Vec<VehicleNode>> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(Error::param("density", format!("must be >= 0, got {density}")));
    }
    let mean = density * network.region_area_km2();
    let n = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|e| Error::param("density", e.to_string()))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    Ok(place_vehicles_fixed(network, n, template, rng))
}

/// Places exactly `n` vehicles (fixed-count mode).
pub fn place_vehicles_fixed<R: Rng + ?Sized>(
    network: &RoadNetwork,
    n: usize,
    template: VehicleTemplate,
    rng: &mut R,
) -> Vec<VehicleNode> {
    (0..n).map(|id| place_one(network, id, template, rng)).collect()
}

/// Constant-speed motion along each vehicle's route, wrapping at the route
/// end back to its start so the density stays stationary.
pub fn advance(vehicles: &[VehicleNode], network: &RoadNetwork, dt: f64) -> Vec<VehicleNode> {
    vehicles
        .iter()
        .map(|v| {
            if dt == 0.0 || v.speed == 0.0 {
                return v.clone();
            }
            let len = network.routes[v.track.route].length;
            let step = if v.track.forward { v.speed * dt } else { -v.speed * dt };
            let mut arc = (v.track.arc + step).rem_euclid(len);
            if arc >= len {
                arc = 0.0;
            }
            let track = TrackPosition { arc, ..v.track };
            let (position, heading) = resolve(network, &track);
            VehicleNode { position, heading, track, ..v.clone() }
        })
        .collect()
}
