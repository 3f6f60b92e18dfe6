//! Small double-precision geometry kernel.
//!
//! Everything downstream converts between solid-angle and area measure
//! through [`solid_angle_to_area`] and [`geometry_term`], so those two live
//! here next to the vector type they operate on.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn abs_dot(self, o: Vec3) -> f64 {
        self.dot(o).abs()
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn length(self) -> f64 {
        self.length_squared().sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.length()
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Mirror `self` about the unit normal `n`.
    pub fn reflect(self, n: Vec3) -> Vec3 {
        n * (2.0 * self.dot(n)) - self
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
    pub t_min: f64,
    pub t_max: f64,
}

/// Relative offset used to keep secondary rays off the surface they leave.
pub const RAY_EPSILON: f64 = 1e-7;

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Self { origin, direction, t_min: RAY_EPSILON, t_max: f64::INFINITY }
    }

    /// Shadow ray that tests the open segment between two points.
    pub fn segment(from: Vec3, to: Vec3) -> Self {
        let d = to - from;
        let dist = d.length();
        Self { origin: from, direction: d / dist, t_min: RAY_EPSILON * dist.max(1.0), t_max: dist * (1.0 - 1e-6) }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Orthonormal frame with `n` as the local +z axis.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub s: Vec3,
    pub t: Vec3,
    pub n: Vec3,
}

impl Frame {
    /// Duff et al. branchless basis construction.
    pub fn from_normal(n: Vec3) -> Self {
        let sign = 1.0f64.copysign(n.z);
        let a = -1.0 / (sign + n.z);
        let b = n.x * n.y * a;
        let s = Vec3::new(1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x);
        let t = Vec3::new(b, sign + n.y * n.y * a, -n.y);
        Self { s, t, n }
    }

    pub fn to_world(&self, local: Vec3) -> Vec3 {
        self.s * local.x + self.t * local.y + self.n * local.z
    }

    pub fn to_local(&self, w: Vec3) -> Vec3 {
        Vec3::new(w.dot(self.s), w.dot(self.t), w.dot(self.n))
    }
}

/// `|<n_a, w>| |<n_b, w>| / |x_a - x_b|^2` with `w` the unit direction from `x_a` to `x_b`.
pub fn geometry_term(x_a: Vec3, n_a: Vec3, x_b: Vec3, n_b: Vec3) -> Result<f64> {
    let d = x_b - x_a;
    let dist2 = d.length_squared();
    if !(dist2 > 0.0) {
        return Err(Error::DegenerateSegment);
    }
    let w = d / dist2.sqrt();
    Ok(n_a.abs_dot(w) * n_b.abs_dot(w) / dist2)
}

/// Converts a per-steradian density at the source into a per-area density at
/// the target.
pub fn solid_angle_to_area(pdf_sa: f64, dist: f64, cos_target: f64) -> Result<f64> {
    if !(dist > 0.0) {
        return Err(Error::DegenerateSegment);
    }
    Ok(pdf_sa * cos_target.abs() / (dist * dist))
}
