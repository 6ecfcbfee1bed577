//! Planar vectors and the tolerance-aware predicates shared by every module.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Incidence tolerance for flat-length predicates.
pub const TOL: f64 = 1e-9;

/// Relative tolerance used when deciding on which side of a ray a developed
/// point lies.
pub const ANGLE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn sup(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn approx_eq(self, o: Vec2, tol: f64) -> bool {
        (self.x - o.x).abs() <= tol && (self.y - o.y).abs() <= tol
    }

    /// True when the vector points into the open upper half plane, or along
    /// the positive horizontal axis. Exactly one of `v`, `-v` is positive.
    pub fn is_positive(self) -> bool {
        let scale = self.sup().max(1.0);
        if self.y > ANGLE_TOL * scale {
            true
        } else if self.y < -ANGLE_TOL * scale {
            false
        } else {
            self.x > 0.0
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl From<(f64, f64)> for Vec2 {
    fn from((x, y): (f64, f64)) -> Self {
        Vec2::new(x, y)
    }
}

/// A 2x2 real matrix acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn diag(sx: f64, sy: f64) -> Mat2 {
        Mat2 { a: sx, b: 0.0, c: 0.0, d: sy }
    }

    /// Teichmüller deformation at time `t`.
    pub fn flow(t: f64) -> Mat2 {
        Mat2::diag((t / 2.0).exp(), (-t / 2.0).exp())
    }

    pub fn rotation(angle: f64) -> Mat2 {
        let (s, c) = angle.sin_cos();
        Mat2 { a: c, b: -s, c: s, d: c }
    }

    /// Rotation taking the direction of `dir` onto the positive vertical axis.
    pub fn rotate_to_vertical(dir: Vec2) -> Mat2 {
        let u = dir.normalized();
        // rows: (u.y, -u.x), (u.x, u.y)
        Mat2 { a: u.y, b: -u.x, c: u.x, d: u.y }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2 { a: self.d / det, b: -self.b / det, c: -self.c / det, d: self.a / det }
    }
}

/// Length of a holonomy vector under the chosen norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Euclid,
    Sup,
}

impl Norm {
    pub fn length(self, v: Vec2) -> f64 {
        match self {
            Norm::Euclid => v.norm(),
            Norm::Sup => v.sup(),
        }
    }

    /// Smallest Euclidean radius containing the ball of radius `r` in this norm.
    pub fn euclid_radius(self, r: f64) -> f64 {
        match self {
            Norm::Euclid => r,
            Norm::Sup => r * std::f64::consts::SQRT_2,
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclid" | "euclidean" => Ok(Norm::Euclid),
            "sup" => Ok(Norm::Sup),
            other => Err(format!("unknown norm `{other}` (expected sup|euclid)")),
        }
    }
}

/// Signed area of the polygon, positive for counterclockwise order.
pub fn polygon_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Interior angle at `b` of the counterclockwise polygon corner `a, b, c`,
/// in `(0, 2π)`.
pub fn interior_angle(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let u = c - b;
    let w = a - b;
    let ang = u.cross(w).atan2(u.dot(w));
    if ang <= 0.0 {
        ang + 2.0 * std::f64::consts::PI
    } else {
        ang
    }
}

/// Parameter `s` along `p + s·d` and `u` along `a + u·(b - a)` where the two
/// lines meet, or `None` when parallel.
pub fn ray_segment(p: Vec2, d: Vec2, a: Vec2, b: Vec2) -> Option<(f64, f64)> {
    let e = b - a;
    let den = d.cross(e);
    if den.abs() <= 1e-300 {
        return None;
    }
    let ap = a - p;
    let s = ap.cross(e) / den;
    let u = ap.cross(d) / den;
    Some((s, u))
}

/// Distance from the origin-relative point `c` to the closed segment `ab`.
pub fn point_segment_distance(c: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let len2 = e.norm2();
    if len2 == 0.0 {
        return (c - a).norm();
    }
    let u = ((c - a).dot(e) / len2).clamp(0.0, 1.0);
    (a + e * u - c).norm()
}

/// Circumcenter of the triangle `a, b, c`.
pub fn circumcenter(a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let bx = b - a;
    let cx = c - a;
    let d = 2.0 * bx.cross(cx);
    let b2 = bx.norm2();
    let c2 = cx.norm2();
    a + Vec2::new((cx.y * b2 - bx.y * c2) / d, (bx.x * c2 - cx.x * b2) / d)
}
