//! Scene description: analytic shapes, diffuse/glossy materials, area
//! emitters and a pinhole camera.
//!
//! All surfaces are two-sided. Geometric normals are fixed per surface
//! (outward for spheres, by winding for quads) and never flipped toward the
//! ray; callers orient by the side the incident direction lies on.

mod bxdf;
mod camera;
mod parse;

use std::f64::consts::PI;

use rand::Rng;

pub use bxdf::{bxdf_eval, bxdf_pdf, bxdf_sample, BxdfSample, PdfDirection, Transport};
pub use camera::{camera_we_pdf, Camera, CameraResponse};
pub use parse::{parse_scene, serialize_scene};

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::vecmath::{Frame, Ray, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialKind {
    Lambert,
    Phong { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    pub kind: MaterialKind,
    pub albedo: Rgb,
}

/// Sinusoidal normal perturbation on spheres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Sphere {
        center: Vec3,
        radius: f64,
        bump: Option<Bump>,
    },
    /// Planar quad `a b c d`, split into triangles `abc` and `acd`.
    Quad {
        corners: [Vec3; 4],
        normals: Option<[Vec3; 4]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub geometry: Geometry,
    pub material: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Emitter {
    pub shape: usize,
    pub radiance: Rgb,
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneOptions {
    /// First bounce index at which Russian roulette applies.
    pub rr_depth: usize,
    /// Continuation probability; `1.0` disables roulette.
    pub rr_q: f64,
    /// Maximum number of vertices of a complete path, camera included.
    pub max_depth: usize,
    /// Merge radius; `None` means 1% of the largest scene extent.
    pub merge_radius: Option<f64>,
    pub random_connect: bool,
}

impl Default for SceneOptions {
    fn default() -> Self {
        Self { rr_depth: 3, rr_q: 1.0, max_depth: 8, merge_radius: None, random_connect: false }
    }
}

impl SceneOptions {
    /// Continuation probability applied when a walk leaves the vertex with
    /// the given bounce index (0 = the walk's origin).
    pub fn continuation(&self, bounce: usize) -> f64 {
        if bounce >= self.rr_depth {
            self.rr_q
        } else {
            1.0
        }
    }

    pub fn roulette_active(&self) -> bool {
        self.rr_q < 1.0
    }
}

/// A point on a surface or the camera position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub n_g: Vec3,
    pub n_s: Vec3,
    pub uv: (f64, f64),
    pub shape: Option<usize>,
    pub material: Option<usize>,
    pub emitter: Option<usize>,
}

impl SurfacePoint {
    pub fn is_camera(&self) -> bool {
        self.shape.is_none()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub point: SurfacePoint,
}

#[derive(Debug, Clone, Copy)]
pub struct EmitterSample {
    pub point: SurfacePoint,
    pub pdf_area: f64,
    pub radiance: Rgb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub camera: Camera,
    pub materials: Vec<Material>,
    pub shapes: Vec<Shape>,
    pub emitters: Vec<Emitter>,
    pub options: SceneOptions,
    emitter_of_shape: Vec<Option<usize>>,
    total_emitter_area: f64,
}

impl Scene {
    /// Validates and assembles a scene. `lights` pairs a shape index with
    /// its radiance.
    pub fn new(
        camera: Camera,
        materials: Vec<Material>,
        shapes: Vec<Shape>,
        lights: Vec<(usize, Rgb)>,
        options: SceneOptions,
    ) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidScene(m));
        for m in &materials {
            for c in m.albedo.to_array() {
                if !(0.0..1.0).contains(&c) {
                    return Err(Error::InvalidAlbedo(c));
                }
            }
            if let MaterialKind::Phong { exponent } = m.kind {
                if !(exponent >= 0.0 && exponent.is_finite()) {
                    return invalid(format!("phong exponent must be >= 0 (got {exponent})"));
                }
            }
        }
        for (i, s) in shapes.iter().enumerate() {
            if s.material >= materials.len() {
                return invalid(format!("shape {i} references unknown material"));
            }
            validate_geometry(&s.geometry).map_err(|m| Error::InvalidScene(format!("shape {i}: {m}")))?;
        }
        if lights.is_empty() {
            return invalid("scene needs at least one light".into());
        }
        let mut emitter_of_shape = vec![None; shapes.len()];
        let mut emitters = Vec::with_capacity(lights.len());
        for (shape, radiance) in lights {
            if shape >= shapes.len() {
                return invalid(format!("light references unknown shape {shape}"));
            }
            if emitter_of_shape[shape].is_some() {
                return invalid(format!("shape {shape} has more than one light"));
            }
            if !(radiance.r >= 0.0 && radiance.g >= 0.0 && radiance.b >= 0.0) || !radiance.is_finite() {
                return invalid("light radiance must be finite and >= 0".into());
            }
            if has_shading_normals(&shapes[shape].geometry) {
                return invalid(format!("emitting shape {shape} must not carry shading normals"));
            }
            let area = geometry_area(&shapes[shape].geometry);
            if !(area > 0.0) {
                return invalid(format!("emitter on shape {shape} has zero area"));
            }
            emitter_of_shape[shape] = Some(emitters.len());
            emitters.push(Emitter { shape, radiance, area });
        }
        if options.max_depth < 2 {
            return invalid("max_depth must be >= 2".into());
        }
        if !(options.rr_q > 0.0 && options.rr_q <= 1.0) {
            return invalid("rr_q must lie in (0, 1]".into());
        }
        if let Some(r) = options.merge_radius {
            if !(r > 0.0 && r.is_finite()) {
                return invalid("merge_radius must be > 0".into());
            }
        }
        let total_emitter_area = emitters.iter().map(|e| e.area).sum();
        Ok(Self { camera, materials, shapes, emitters, options, emitter_of_shape, total_emitter_area })
    }

    pub fn lights(&self) -> Vec<(usize, Rgb)> {
        self.emitters.iter().map(|e| (e.shape, e.radiance)).collect()
    }

    pub fn total_emitter_area(&self) -> f64 {
        self.total_emitter_area
    }

    /// Copy of the scene with every shading normal replaced by the geometric one.
    pub fn without_shading_normals(&self) -> Scene {
        let mut s = self.clone();
        for shape in &mut s.shapes {
            match &mut shape.geometry {
                Geometry::Sphere { bump, .. } => *bump = None,
                Geometry::Quad { normals, .. } => *normals = None,
            }
        }
        s
    }

    pub fn has_shading_normals(&self) -> bool {
        self.shapes.iter().any(|s| has_shading_normals(&s.geometry))
    }

    /// Copy of the scene with all emitted radiance multiplied by `k`.
    pub fn scaled_emission(&self, k: f64) -> Scene {
        let mut s = self.clone();
        for e in &mut s.emitters {
            e.radiance = e.radiance * k;
        }
        s
    }

    pub fn with_options(&self, options: SceneOptions) -> Scene {
        let mut s = self.clone();
        s.options = options;
        s
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for s in &self.shapes {
            match &s.geometry {
                Geometry::Sphere { center, radius, .. } => {
                    let r = Vec3::new(*radius, *radius, *radius);
                    lo = lo.min(*center - r);
                    hi = hi.max(*center + r);
                }
                Geometry::Quad { corners, .. } => {
                    for c in corners {
                        lo = lo.min(*c);
                        hi = hi.max(*c);
                    }
                }
            }
        }
        (lo, hi)
    }

    pub fn merge_radius(&self) -> f64 {
        self.options.merge_radius.unwrap_or_else(|| {
            let (lo, hi) = self.bounds();
            let e = hi - lo;
            0.01 * e.x.max(e.y).max(e.z)
        })
    }

    pub fn material(&self, p: &SurfacePoint) -> Option<&Material> {
        p.material.map(|m| &self.materials[m])
    }

    pub fn emitted_radiance(&self, p: &SurfacePoint) -> Rgb {
        p.emitter.map_or(Rgb::BLACK, |e| self.emitters[e].radiance)
    }

    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<(f64, usize)> = None;
        let mut t_max = ray.t_max;
        for (i, s) in self.shapes.iter().enumerate() {
            if let Some(t) = intersect_geometry(&s.geometry, ray, t_max) {
                t_max = t;
                best = Some((t, i));
            }
        }
        best.map(|(t, i)| Hit { t, point: self.surface_point(i, ray.at(t)) })
    }

    /// True when nothing blocks the open segment between the two points.
    pub fn visible(&self, a: Vec3, b: Vec3) -> bool {
        let ray = Ray::segment(a, b);
        self.shapes.iter().all(|s| intersect_geometry(&s.geometry, &ray, ray.t_max).is_none())
    }

    /// Surface data at a point assumed to lie on `shape`.
    pub fn surface_point(&self, shape: usize, p: Vec3) -> SurfacePoint {
        let s = &self.shapes[shape];
        let (n_g, n_s, uv) = match &s.geometry {
            Geometry::Sphere { center, radius, bump } => {
                let n = ((p - *center) / *radius).normalized();
                let uv = (n.y.atan2(n.x), n.z.clamp(-1.0, 1.0).acos());
                let ns = match bump {
                    Some(b) => bump_normal(n, p, b),
                    None => n,
                };
                (n, ns, uv)
            }
            Geometry::Quad { corners, normals } => {
                let (tri, b1, b2) = quad_barycentrics(corners, p);
                let ng = quad_normal(corners);
                let ns = match normals {
                    Some(ns) => {
                        let (i1, i2) = if tri == 0 { (1, 2) } else { (2, 3) };
                        (ns[0] * (1.0 - b1 - b2) + ns[i1] * b1 + ns[i2] * b2).normalized()
                    }
                    None => ng,
                };
                (ng, ns, (b1, b2))
            }
        };
        SurfacePoint { position: p, n_g, n_s, uv, shape: Some(shape), material: Some(s.material), emitter: self.emitter_of_shape[shape] }
    }

    /// Uniform point on a shape. Returns the point and the shape's area.
    pub fn sample_shape<R: Rng + ?Sized>(&self, shape: usize, rng: &mut R) -> (SurfacePoint, f64) {
        let g = &self.shapes[shape].geometry;
        let p = match g {
            Geometry::Sphere { center, radius, .. } => {
                let z = 1.0 - 2.0 * rng.gen::<f64>();
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = 2.0 * PI * rng.gen::<f64>();
                *center + Vec3::new(r * phi.cos(), r * phi.sin(), z) * *radius
            }
            Geometry::Quad { corners, .. } => {
                let [a, b, c, d] = *corners;
                let a1 = (b - a).cross(c - a).length();
                let a2 = (c - a).cross(d - a).length();
                let (p1, p2) = if rng.gen::<f64>() * (a1 + a2) < a1 { (b, c) } else { (c, d) };
                let su = rng.gen::<f64>().sqrt();
                let v = rng.gen::<f64>();
                a * (1.0 - su) + p1 * (su * (1.0 - v)) + p2 * (su * v)
            }
        };
        (self.surface_point(shape, p), geometry_area(g))
    }

    /// Uniform sample over the union of all emitter surfaces.
    pub fn emitter_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EmitterSample {
        let mut u = rng.gen::<f64>() * self.total_emitter_area;
        let mut chosen = self.emitters.len() - 1;
        for (i, e) in self.emitters.iter().enumerate() {
            if u < e.area {
                chosen = i;
                break;
            }
            u -= e.area;
        }
        let e = &self.emitters[chosen];
        let (point, _) = self.sample_shape(e.shape, rng);
        EmitterSample { point, pdf_area: 1.0 / self.total_emitter_area, radiance: e.radiance }
    }

    /// Area density of [`Scene::emitter_sample`] at `p`.
    pub fn emitter_pdf_area(&self, p: &SurfacePoint) -> f64 {
        if p.emitter.is_some() {
            1.0 / self.total_emitter_area
        } else {
            0.0
        }
    }

    /// Emission is diffuse from both sides: pick a side, then cosine-sample.
    pub fn sample_emission<R: Rng + ?Sized>(&self, p: &SurfacePoint, rng: &mut R) -> (Vec3, f64) {
        let n = if rng.gen::<f64>() < 0.5 { p.n_g } else { -p.n_g };
        let w = Frame::from_normal(n).to_world(cosine_hemisphere(rng.gen(), rng.gen()));
        (w, self.emission_pdf(p, w))
    }

    pub fn emission_pdf(&self, p: &SurfacePoint, w: Vec3) -> f64 {
        p.n_g.abs_dot(w) / (2.0 * PI)
    }
}

/// Cosine-weighted direction about local +z.
/// Scenes shipped with the crate, by name.
pub const BUILTIN_SCENES: [(&str, &str); 3] = [
    ("furnace", include_str!("../../scenes/furnace.scene")),
    ("box", include_str!("../../scenes/box.scene")),
    ("smalllight", include_str!("../../scenes/smalllight.scene")),
];

pub fn builtin_scene(name: &str) -> Option<Scene> {
    BUILTIN_SCENES.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_scene(text).expect("shipped scenes parse"))
}

pub fn cosine_hemisphere(u1: f64, u2: f64) -> Vec3 {
    let r = u1.sqrt();
    let phi = 2.0 * PI * u2;
    Vec3::new(r * phi.cos(), r * phi.sin(), (1.0 - u1).max(0.0).sqrt())
}

fn bump_normal(n: Vec3, p: Vec3, b: &Bump) -> Vec3 {
    let f = b.frequency;
    let wave = Vec3::new((f * p.x).sin(), (f * p.y).sin(), (f * p.z).sin());
    let tangent = wave - n * wave.dot(n);
    (n + tangent * b.amplitude).normalized()
}

fn has_shading_normals(g: &Geometry) -> bool {
    match g {
        Geometry::Sphere { bump, .. } => bump.is_some_and(|b| b.amplitude != 0.0),
        Geometry::Quad { normals, .. } => normals.is_some(),
    }
}

pub(crate) fn quad_normal(c: &[Vec3; 4]) -> Vec3 {
    (c[1] - c[0]).cross(c[2] - c[0]).normalized()
}

fn geometry_area(g: &Geometry) -> f64 {
    match g {
        Geometry::Sphere { radius, .. } => 4.0 * PI * radius * radius,
        Geometry::Quad { corners: [a, b, c, d], .. } => 0.5 * ((*b - *a).cross(*c - *a).length() + (*c - *a).cross(*d - *a).length()),
    }
}

fn validate_geometry(g: &Geometry) -> std::result::Result<(), String> {
    match g {
        Geometry::Sphere { center, radius, bump } => {
            if !(center.is_finite() && *radius > 0.0 && radius.is_finite()) {
                return Err("sphere radius must be > 0".into());
            }
            if let Some(b) = bump {
                if !(b.amplitude >= 0.0 && b.amplitude.is_finite() && b.frequency.is_finite()) {
                    return Err("bump amplitude must be >= 0".into());
                }
            }
        }
        Geometry::Quad { corners, normals } => {
            let [a, b, c, d] = *corners;
            let cross1 = (b - a).cross(c - a);
            let cross2 = (c - a).cross(d - a);
            if !(cross1.length() > 0.0 && cross2.length() > 0.0) {
                return Err("degenerate quad".into());
            }
            let n = cross1.normalized();
            if cross2.normalized().dot(n) < 1.0 - 1e-9 {
                return Err("quad corners must be planar and convex".into());
            }
            let scale = (b - a).length().max((d - a).length());
            if (d - a).dot(n).abs() > 1e-9 * scale {
                return Err("quad corners must be planar".into());
            }
            if let Some(ns) = normals {
                for nn in ns {
                    if !(nn.length() > 0.0) || nn.normalized().dot(n) <= 0.0 {
                        return Err("shading normal flipped against the geometric normal".into());
                    }
                }
            }
        }
    }
    Ok(())
}

fn intersect_geometry(g: &Geometry, ray: &Ray, t_max: f64) -> Option<f64> {
    match g {
        Geometry::Sphere { center, radius, .. } => {
            let oc = ray.origin - *center;
            let b = oc.dot(ray.direction);
            let c = oc.length_squared() - radius * radius;
            let disc = b * b - c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            // Numerically stable root pair.
            let q = if b > 0.0 { -b - sq } else { -b + sq };
            let (mut t0, mut t1) = (q, c / q);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            let t_min = ray.t_min * radius.max(1.0);
            [t0, t1].into_iter().find(|t| *t > t_min && *t < t_max)
        }
        Geometry::Quad { corners: [a, b, c, d], .. } => {
            let t1 = intersect_triangle(ray, *a, *b, *c, t_max);
            let t2 = intersect_triangle(ray, *a, *c, *d, t1.unwrap_or(t_max));
            t2.or(t1)
        }
    }
}

/// Moller-Trumbore.
fn intersect_triangle(ray: &Ray, a: Vec3, b: Vec3, c: Vec3, t_max: f64) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = ray.direction.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - a;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = ray.direction.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    (t > ray.t_min && t < t_max).then_some(t)
}

/// Which triangle of the quad holds `p`, with barycentrics of its second and
/// third corner.
fn quad_barycentrics(c: &[Vec3; 4], p: Vec3) -> (usize, f64, f64) {
    let bary = |a: Vec3, b: Vec3, cc: Vec3| {
        let v0 = b - a;
        let v1 = cc - a;
        let v2 = p - a;
        let d00 = v0.dot(v0);
        let d01 = v0.dot(v1);
        let d11 = v1.dot(v1);
        let d20 = v2.dot(v0);
        let d21 = v2.dot(v1);
        let den = d00 * d11 - d01 * d01;
        ((d11 * d20 - d01 * d21) / den, (d00 * d21 - d01 * d20) / den)
    };
    let (u, v) = bary(c[0], c[1], c[2]);
    if u >= -1e-9 && v >= -1e-9 && u + v <= 1.0 + 1e-9 {
        (0, u.clamp(0.0, 1.0), v.clamp(0.0, 1.0))
    } else {
        let (u, v) = bary(c[0], c[2], c[3]);
        (1, u.clamp(0.0, 1.0), v.clamp(0.0, 1.0))
    }
}

impl Default for SurfacePoint {
    fn default() -> Self {
        Self {
            position: Vec3::ZERO,
            n_g: Vec3::new(0.0, 0.0, 1.0),
            n_s: Vec3::new(0.0, 0.0, 1.0),
            uv: (0.0, 0.0),
            shape: None,
            material: None,
            emitter: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sampler, Stream};

    fn sphere_scene(bump: Option<Bump>) -> Scene {
        let camera = Camera::new(Vec3::new(0.0, 0.0, -3.0), Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0), 40.0, 4, 4).unwrap();
        let mat = Material { name: "m".into(), kind: MaterialKind::Lambert, albedo: Rgb::gray(0.5) };
        let shapes = vec![
            Shape { geometry: Geometry::Sphere { center: Vec3::ZERO, radius: 1.0, bump }, material: 0 },
            Shape {
                geometry: Geometry::Quad {
                    corners: [Vec3::new(-1.0, 5.0, -1.0), Vec3::new(1.0, 5.0, -1.0), Vec3::new(1.0, 5.0, 0.0), Vec3::new(-1.0, 5.0, 0.0)],
                    normals: None,
                },
                material: 0,
            },
        ];
        Scene::new(camera, vec![mat], shapes, vec![(1, Rgb::WHITE)], SceneOptions::default()).unwrap()
    }

    #[test]
    fn sphere_hits_and_misses() {
        let s = sphere_scene(None);
        let hit = s.intersect(&Ray::new(Vec3::new(0.0, 0.0, -3.0), Vec3::new(0.0, 0.0, 1.0))).unwrap();
        assert!((hit.point.position - Vec3::new(0.0, 0.0, -1.0)).length() < 1e-12);
        assert!(s.intersect(&Ray::new(Vec3::new(2.0, 0.0, -3.0), Vec3::new(0.0, 0.0, 1.0))).is_none());
        // From inside: the far wall, with the outward normal reported.
        let inside = s.intersect(&Ray::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0))).unwrap();
        assert!((inside.point.position - Vec3::new(0.0, 0.0, 1.0)).length() < 1e-12);
        assert!(inside.point.n_g.dot(Vec3::new(0.0, 0.0, 1.0)) > 0.99);
    }

    #[test]
    fn quad_hit_and_visibility() {
        let s = sphere_scene(None);
        let hit = s.intersect(&Ray::new(Vec3::new(0.5, 2.0, -0.5), Vec3::new(0.0, 1.0, 0.0))).unwrap();
        assert!((hit.point.position.y - 5.0).abs() < 1e-12);
        assert_eq!(hit.point.emitter, Some(0));
        assert!(!s.visible(Vec3::new(0.0, -3.0, 0.0), Vec3::new(0.0, 3.0, 0.0)));
        assert!(s.visible(Vec3::new(3.0, -3.0, 0.0), Vec3::new(3.0, 3.0, 0.0)));
    }

    #[test]
    fn emitter_pdf_is_inverse_total_area() {
        let s = sphere_scene(None);
        let mut rng = sampler(1, 0, 0, Stream::Verify);
        let e = s.emitter_sample(&mut rng);
        assert!((e.pdf_area - 0.5).abs() < 1e-12);
        assert_eq!(e.pdf_area * s.total_emitter_area(), 1.0);
        assert!((e.point.position.y - 5.0).abs() < 1e-12);
    }

    #[test]
    fn split_emitter_area_fractions() {
        let mut s = sphere_scene(None);
        // Second light: a 1x3 quad.
        s.shapes.push(Shape {
            geometry: Geometry::Quad {
                corners: [Vec3::new(10.0, 0.0, 0.0), Vec3::new(11.0, 0.0, 0.0), Vec3::new(11.0, 3.0, 0.0), Vec3::new(10.0, 3.0, 0.0)],
                normals: None,
            },
            material: 0,
        });
        s.shapes[1].geometry = Geometry::Quad {
            corners: [Vec3::new(-0.5, 5.0, -1.0), Vec3::new(0.5, 5.0, -1.0), Vec3::new(0.5, 5.0, 0.0), Vec3::new(-0.5, 5.0, 0.0)],
            normals: None,
        };
        let s =
            Scene::new(s.camera.clone(), s.materials.clone(), s.shapes.clone(), vec![(1, Rgb::WHITE), (2, Rgb::WHITE)], s.options).unwrap();
        let n = 100_000;
        let mut rng = sampler(9, 0, 0, Stream::Verify);
        let mut hits = 0usize;
        for _ in 0..n {
            let e = s.emitter_sample(&mut rng);
            assert_eq!(e.pdf_area, 0.25);
            if e.point.emitter == Some(1) {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        let sigma = (0.75f64 * 0.25 / n as f64).sqrt();
        assert!((frac - 0.75).abs() < 3.0 * sigma, "fraction {frac}");
    }

    #[test]
    fn bump_keeps_shading_normal_on_geometric_side() {
        let s = sphere_scene(Some(Bump { amplitude: 0.8, frequency: 7.0 }));
        let mut rng = sampler(3, 0, 0, Stream::Verify);
        for _ in 0..1000 {
            let (p, _) = s.sample_shape(0, &mut rng);
            assert!(p.n_g.dot(p.n_s) > 0.0);
            assert!((p.n_s.length() - 1.0).abs() < 1e-9);
        }
        assert!(s.has_shading_normals());
        assert!(!s.without_shading_normals().has_shading_normals());
    }
}
