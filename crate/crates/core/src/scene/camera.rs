use crate::error::{Error, Result};
use crate::vecmath::Vec3;

use super::SurfacePoint;

/// Pinhole camera with the image plane at unit distance.
///
/// Importance and directional density are defined over the whole image
/// plane, so one eye sub-path per pixel sample and one light sub-path per
/// pixel sample share the same normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub position: Vec3,
    pub look_at: Vec3,
    pub up: Vec3,
    pub fov_y: f64,
    pub width: usize,
    pub height: usize,
    forward: Vec3,
    right: Vec3,
    true_up: Vec3,
    half_w: f64,
    half_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraResponse {
    pub importance: f64,
    pub pdf_dir: f64,
    pub pixel: Option<(usize, usize)>,
}

impl Camera {
    pub fn new(position: Vec3, look_at: Vec3, up: Vec3, fov_y: f64, width: usize, height: usize) -> Result<Self> {
        if !(fov_y > 0.0 && fov_y < 180.0) {
            return Err(Error::InvalidScene(format!("fov_y must lie in (0, 180), got {fov_y}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidScene("resolution must be at least 1x1".into()));
        }
        let f = look_at - position;
        if !(f.length() > 0.0) {
            return Err(Error::InvalidScene("camera look_at equals position".into()));
        }
        let forward = f.normalized();
        let r = forward.cross(up);
        if !(r.length() > 1e-12) {
            return Err(Error::InvalidScene("camera up is parallel to the view direction".into()));
        }
        let right = r.normalized();
        let true_up = right.cross(forward);
        let half_h = (fov_y.to_radians() * 0.5).tan();
        let half_w = half_h * width as f64 / height as f64;
        Ok(Self { position, look_at, up, fov_y, width, height, forward, right, true_up, half_w, half_h })
    }

    pub fn forward(&self) -> Vec3 {
        self.forward
    }

    pub fn image_plane_area(&self) -> f64 {
        4.0 * self.half_w * self.half_h
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Vertex `x_0` of every eye sub-path.
    pub fn vertex(&self) -> SurfacePoint {
        SurfacePoint { position: self.position, n_g: self.forward, n_s: self.forward, ..SurfacePoint::default() }
    }

    /// Direction through image position `(i + u, j + v)`, rows counted from the top.
    pub fn direction(&self, i: usize, j: usize, u: f64, v: f64) -> Vec3 {
        let x = -self.half_w + 2.0 * self.half_w * (i as f64 + u) / self.width as f64;
        let y = self.half_h - 2.0 * self.half_h * (j as f64 + v) / self.height as f64;
        (self.forward + self.right * x + self.true_up * y).normalized()
    }

    /// Importance `W`, directional density and pixel for a unit direction
    /// leaving the camera.
    pub fn we_pdf(&self, w: Vec3) -> CameraResponse {
        let none = CameraResponse { importance: 0.0, pdf_dir: 0.0, pixel: None };
        let cos = w.dot(self.forward);
        if cos <= 0.0 {
            return none;
        }
        let p = w / cos;
        let x = p.dot(self.right);
        let y = p.dot(self.true_up);
        if x.abs() > self.half_w || y.abs() > self.half_h {
            return none;
        }
        let i = (((x + self.half_w) / (2.0 * self.half_w)) * self.width as f64) as usize;
        let j = (((self.half_h - y) / (2.0 * self.half_h)) * self.height as f64) as usize;
        let a = self.image_plane_area();
        let cos3 = cos * cos * cos;
        CameraResponse {
            importance: 1.0 / (a * cos3 * cos),
            pdf_dir: 1.0 / (a * cos3),
            pixel: Some((i.min(self.width - 1), j.min(self.height - 1))),
        }
    }
}

/// Free-function form of [`Camera::we_pdf`]; `x0` must be the camera position.
pub fn camera_we_pdf(camera: &Camera, x0: Vec3, w: Vec3) -> CameraResponse {
    debug_assert!((x0 - camera.position).length() == 0.0);
    camera.we_pdf(w)
}
