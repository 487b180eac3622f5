use super::{BuildingFootprint, Point2D};

/// Parametric slack below which an entry/exit interval counts as a touch.
const GRAZE_EPS: f64 = 1e-9;

/// True iff the open segment `(p, q)` passes through the interior of `poly`.
///
/// Cyrus–Beck clipping against the strict half-planes of each edge. A
/// segment that only touches an edge or a vertex yields an empty (or
/// zero-length) parameter interval and does not count.
pub fn segment_enters_polygon(p: Point2D, q: Point2D, poly: &BuildingFootprint) -> bool {
    let d = q - p;
    let vs = poly.vertices();
    let n = vs.len();
    let mut t_enter = 0.0_f64;
    let mut t_exit = 1.0_f64;
    for i in 0..n {
        let a = vs[i];
        let edge = vs[(i + 1) % n] - a;
        // > 0 on the inner side for a counter-clockwise polygon
        let num = edge.cross(p - a);
        let den = edge.cross(d);
        if den == 0.0 {
            if num <= 0.0 {
                return false;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            t_enter = t_enter.max(t);
        } else {
            t_exit = t_exit.min(t);
        }
        if t_exit - t_enter <= GRAZE_EPS {
            return false;
        }
    }
    t_exit - t_enter > GRAZE_EPS
}

/// Line-of-sight between `p` and `q`: clear unless the segment enters some
/// building interior. Grazing an edge or a corner is clear.
pub fn los_clear(p: Point2D, q: Point2D, buildings: &[BuildingFootprint]) -> bool {
    let (lo, hi) = (
        Point2D::new(p.x.min(q.x), p.y.min(q.y)),
        Point2D::new(p.x.max(q.x), p.y.max(q.y)),
    );
    !buildings.iter().any(|b| {
        let (blo, bhi) = b.bounds();
        let disjoint = hi.x <= blo.x || lo.x >= bhi.x || hi.y <= blo.y || lo.y >= bhi.y;
        !disjoint && segment_enters_polygon(p, q, b)
    })
}
