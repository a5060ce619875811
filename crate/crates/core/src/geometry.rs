//! Oriented 3D boxes and exact rotated IoU in bird's-eye view and 3D.
//!
//! Boxes live in the LiDAR frame: x forward, y left, z up. Yaw is
//! counterclockwise about +z with `r = 0` meaning the length axis points
//! along +x. BEV footprints are convex quadrilaterals; intersection areas
//! come from Sutherland–Hodgman clipping followed by the shoelace formula.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Wrap an angle into `[-pi, pi)`.
pub fn normalize_angle(r: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut a = (r + PI).rem_euclid(two_pi) - PI;
    // rem_euclid can round up to exactly two_pi for tiny negative inputs
    if a >= PI {
        a -= two_pi;
    }
    a
}

/// Oriented 3D box: center `(x, y, z)`, dimensions `(w, l, h)`, yaw `r`.
///
/// `l` is the extent along the heading axis (+x at `r = 0`), `w` the lateral
/// extent, `h` the vertical extent. `z` is the center height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub l: f64,
    pub h: f64,
    pub r: f64,
}

impl Box3D {
    /// Build a box, normalizing yaw into `[-pi, pi)`.
    pub fn new(x: f64, y: f64, z: f64, w: f64, l: f64, h: f64, r: f64) -> Self {
        debug_assert!(w > 0.0 && l > 0.0 && h > 0.0, "non-positive box dims");
        Self {
            x,
            y,
            z,
            w,
            l,
            h,
            r: normalize_angle(r),
        }
    }

    /// Check the type invariants (positive dims, finite fields).
    pub fn validate(&self) -> crate::Result<()> {
        let fields = [self.x, self.y, self.z, self.w, self.l, self.h, self.r];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(crate::Error::Invalid(format!("non-finite box field: {self:?}")));
        }
        if self.w <= 0.0 || self.l <= 0.0 || self.h <= 0.0 {
            return Err(crate::Error::Invalid(format!(
                "non-positive box dims (w={}, l={}, h={})",
                self.w, self.l, self.h
            )));
        }
        Ok(())
    }

    pub fn bev_center(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Half-diagonal of the BEV footprint; an upper bound on the distance
    /// from the center to any footprint point.
    pub fn bev_circumradius(&self) -> f64 {
        0.5 * self.l.hypot(self.w)
    }

    pub fn volume(&self) -> f64 {
        self.w * self.l * self.h
    }

    /// True if the point lies inside the box (closed bounds, optional margin).
    pub fn contains_point(&self, p: [f64; 3], eps: f64) -> bool {
        let (dz, ok_z) = (p[2] - self.z, self.h * 0.5 + eps);
        if dz.abs() > ok_z {
            return false;
        }
        self.bev_contains(p[0], p[1], eps)
    }

    /// True if `(px, py)` lies inside the BEV footprint (closed bounds).
    pub fn bev_contains(&self, px: f64, py: f64, eps: f64) -> bool {
        let (sin, cos) = self.r.sin_cos();
        let dx = px - self.x;
        let dy = py - self.y;
        // rotate into the box frame
        let lx = cos * dx + sin * dy;
        let ly = -sin * dx + cos * dy;
        lx.abs() <= self.l * 0.5 + eps && ly.abs() <= self.w * 0.5 + eps
    }

    /// Box rotated about the z axis through the origin.
    pub fn rotated_z(&self, theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Box3D::new(
            cos * self.x - sin * self.y,
            sin * self.x + cos * self.y,
            self.z,
            self.w,
            self.l,
            self.h,
            self.r + theta,
        )
    }

    /// Box rotated about its own center.
    pub fn rotated_about_center(&self, theta: f64) -> Self {
        Box3D::new(self.x, self.y, self.z, self.w, self.l, self.h, self.r + theta)
    }

    pub fn translated(&self, dx: f64, dy: f64, dz: f64) -> Self {
        Box3D::new(self.x + dx, self.y + dy, self.z + dz, self.w, self.l, self.h, self.r)
    }

    /// Uniform scale about the origin (centers and dimensions).
    pub fn scaled(&self, s: f64) -> Self {
        Box3D::new(self.x * s, self.y * s, self.z * s, self.w * s, self.l * s, self.h * s, self.r)
    }

    /// Mirror across the x axis (y and yaw negate).
    pub fn flipped_y(&self) -> Self {
        Box3D::new(self.x, -self.y, self.z, self.w, self.l, self.h, -self.r)
    }

    fn field_order(&self, other: &Self) -> Ordering {
        let a = [self.x, self.y, self.z, self.w, self.l, self.h, self.r];
        let b = [other.x, other.y, other.z, other.w, other.l, other.h, other.r];
        for (u, v) in a.iter().zip(b.iter()) {
            match u.total_cmp(v) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// 2D point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

#[inline]
fn cross(a: Point2, b: Point2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Convex counterclockwise polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    verts: Vec<Point2>,
}

impl Polygon2D {
    /// Validate and build: at least 3 vertices, counterclockwise, convex,
    /// no repeated consecutive vertices.
    pub fn new(verts: Vec<Point2>) -> crate::Result<Self> {
        if verts.len() < 3 {
            return Err(crate::Error::Invalid(format!(
                "polygon needs >= 3 vertices, got {}",
                verts.len()
            )));
        }
        let n = verts.len();
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            let c = verts[(i + 2) % n];
            if (b - a).x == 0.0 && (b - a).y == 0.0 {
                return Err(crate::Error::Invalid("repeated consecutive vertex".into()));
            }
            if cross(b - a, c - b) < 0.0 {
                return Err(crate::Error::Invalid("polygon not convex/counterclockwise".into()));
            }
        }
        Ok(Self { verts })
    }

    fn unchecked(verts: Vec<Point2>) -> Self {
        Self { verts }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.verts
    }

    /// Signed shoelace area (positive for counterclockwise order).
    pub fn area(&self) -> f64 {
        shoelace(&self.verts)
    }
}

fn shoelace(verts: &[Point2]) -> f64 {
    if verts.len() < 3 {
        return 0.0;
    }
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

fn corner_array(b: &Box3D) -> [Point2; 4] {
    let (sin, cos) = b.r.sin_cos();
    let hl = b.l * 0.5;
    let hw = b.w * 0.5;
    // local corners counterclockwise starting at (+l/2, +w/2)
    let local = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)];
    local.map(|(lx, ly)| Point2::new(b.x + cos * lx - sin * ly, b.y + sin * lx + cos * ly))
}

/// BEV footprint corners, counterclockwise.
pub fn corners_bev(b: &Box3D) -> Polygon2D {
    Polygon2D::unchecked(corner_array(b).to_vec())
}

const CLIP_CAP: usize = 16;

struct ClipBuf {
    pts: [Point2; CLIP_CAP],
    len: usize,
}

impl ClipBuf {
    fn from_slice(s: &[Point2]) -> Self {
        let mut pts = [Point2::new(0.0, 0.0); CLIP_CAP];
        pts[..s.len()].copy_from_slice(s);
        Self { pts, len: s.len() }
    }

    fn push(&mut self, p: Point2) {
        debug_assert!(self.len < CLIP_CAP);
        self.pts[self.len] = p;
        self.len += 1;
    }

    fn as_slice(&self) -> &[Point2] {
        &self.pts[..self.len]
    }
}

/// Intersection point of segment `pq` with the infinite line through `ab`.
/// Caller guarantees `p` and `q` lie strictly on opposite sides.
fn edge_intersection(p: Point2, q: Point2, a: Point2, b: Point2) -> Point2 {
    let d1 = cross(b - a, p - a);
    let d2 = cross(b - a, q - a);
    let t = d1 / (d1 - d2);
    p + (q - p) * t
}

/// Area of the intersection of two convex counterclockwise polygons.
///
/// Points exactly on a clip edge count as inside, so shared edges do not
/// produce spurious empty results; degenerate slivers come out as ~0 area.
fn convex_intersection_area(subject: &[Point2], clip: &[Point2]) -> f64 {
    let mut out = ClipBuf::from_slice(subject);
    let n = clip.len();
    for i in 0..n {
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let input = out;
        if input.len == 0 {
            return 0.0;
        }
        out = ClipBuf { pts: input.pts, len: 0 };
        let pts = input.as_slice();
        for j in 0..pts.len() {
            let p = pts[j];
            let q = pts[(j + 1) % pts.len()];
            let p_in = cross(b - a, p - a) >= 0.0;
            let q_in = cross(b - a, q - a) >= 0.0;
            if p_in {
                out.push(p);
                if !q_in {
                    out.push(edge_intersection(p, q, a, b));
                }
            } else if q_in {
                out.push(edge_intersection(p, q, a, b));
            }
        }
    }
    shoelace(out.as_slice()).max(0.0)
}

/// BEV (footprint) intersection-over-union of two boxes.
///
/// Exact for convex quadrilaterals up to floating point; bit-exact symmetric
/// because the operands are put in a canonical order before clipping.
pub fn bev_iou(a: &Box3D, b: &Box3D) -> f64 {
    let (p, q) = if a.field_order(b) == Ordering::Greater { (b, a) } else { (a, b) };
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let reach = p.bev_circumradius() + q.bev_circumradius();
    if dx * dx + dy * dy > reach * reach {
        return 0.0;
    }
    let ca = corner_array(p);
    let cb = corner_array(q);
    let inter = convex_intersection_area(&ca, &cb);
    if inter <= 0.0 {
        return 0.0;
    }
    // areas via the same shoelace route so identical boxes give exactly 1
    let union = shoelace(&ca) + shoelace(&cb) - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Full 3D intersection-over-union: BEV intersection area times the z
/// overlap length, over the union of the two volumes.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let (p, q) = if a.field_order(b) == Ordering::Greater { (b, a) } else { (a, b) };
    let p_lo = p.z - p.h * 0.5;
    let p_hi = p.z + p.h * 0.5;
    let q_lo = q.z - q.h * 0.5;
    let q_hi = q.z + q.h * 0.5;
    let z_overlap = p_hi.min(q_hi) - p_lo.max(q_lo);
    if z_overlap <= 0.0 {
        return 0.0;
    }
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let reach = p.bev_circumradius() + q.bev_circumradius();
    if dx * dx + dy * dy > reach * reach {
        return 0.0;
    }
    let ca = corner_array(p);
    let cb = corner_array(q);
    let inter_area = convex_intersection_area(&ca, &cb);
    if inter_area <= 0.0 {
        return 0.0;
    }
    let inter_vol = inter_area * z_overlap;
    // heights recomputed from the same lo/hi values so a box against itself
    // cancels exactly
    let vol_p = shoelace(&ca) * (p_hi - p_lo);
    let vol_q = shoelace(&cb) * (q_hi - q_lo);
    let union = vol_p + vol_q - inter_vol;
    if union <= 0.0 {
        return 0.0;
    }
    (inter_vol / union).clamp(0.0, 1.0)
}
