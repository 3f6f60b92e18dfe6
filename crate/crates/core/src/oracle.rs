//! Ground truth recomputed from raw scene queries.
//!
//! Nothing here reads walk records or the weight engines. Path densities are
//! rebuilt segment by segment; throughputs come from the measurement
//! contribution divided by the strategy's density.

use std::f64::consts::PI;

use rand::Rng;

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::misweights::{Strategy, Technique};
use crate::scene::{bxdf_eval, bxdf_pdf, PdfDirection, Scene, SurfacePoint, Transport};
use crate::vecmath::{Ray, Vec3};

pub const REJECTION_BUDGET: usize = 100_000;

pub fn furnace_reference(albedo: f64, emitted: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&albedo) {
        return Err(Error::InvalidAlbedo(albedo));
    }
    Ok(emitted / (1.0 - albedo))
}

struct Seg {
    dir: Vec3,
    d2: f64,
}

fn seg(a: &SurfacePoint, b: &SurfacePoint) -> Result<Seg> {
    let d = b.position - a.position;
    let d2 = d.dot(d);
    if !(d2 > 0.0) || !d2.is_finite() {
        return Err(Error::DegenerateSegment);
    }
    Ok(Seg { dir: d / d2.sqrt(), d2 })
}

/// Adjoint factor, written out independently of the production helper.
fn adjoint(p: &SurfacePoint, toward_light: Vec3, toward_eye: Vec3) -> f64 {
    let num = (p.n_s.dot(toward_light) * p.n_g.dot(toward_eye)).abs();
    let den = (p.n_g.dot(toward_light) * p.n_s.dot(toward_eye)).abs();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Solid-angle density of leaving `pts[i]` toward `pts[i + 1]`, eye direction.
fn eye_sa(scene: &Scene, pts: &[SurfacePoint], i: usize) -> Result<f64> {
    let out = seg(&pts[i], &pts[i + 1])?.dir;
    if i == 0 {
        return Ok(scene.camera.we_pdf(out).pdf_dir);
    }
    let back = seg(&pts[i], &pts[i - 1])?.dir;
    let m = scene.material(&pts[i]).ok_or(Error::InvalidPath("interior vertex without material"))?;
    Ok(bxdf_pdf(m, &pts[i], back, out, PdfDirection::Forward))
}

/// Solid-angle density of leaving `pts[i]` toward `pts[i - 1]`, light direction.
fn light_sa(scene: &Scene, pts: &[SurfacePoint], i: usize) -> Result<f64> {
    let out = seg(&pts[i], &pts[i - 1])?.dir;
    if i == pts.len() - 1 {
        return Ok(scene.emission_pdf(&pts[i], out));
    }
    let back = seg(&pts[i], &pts[i + 1])?.dir;
    let m = scene.material(&pts[i]).ok_or(Error::InvalidPath("interior vertex without material"))?;
    Ok(bxdf_pdf(m, &pts[i], back, out, PdfDirection::Forward))
}

/// `p(x_{i-1} -> x_i)` in the shading-cosine area measure.
fn eye_area(scene: &Scene, pts: &[SurfacePoint], i: usize) -> Result<f64> {
    let sg = seg(&pts[i - 1], &pts[i])?;
    let q = scene.options.continuation(i - 1);
    Ok(eye_sa(scene, pts, i - 1)? * q * pts[i].n_s.dot(sg.dir).abs() / sg.d2)
}

/// `p(x_i <- x_{i+1})` before the adjoint division.
fn light_area(scene: &Scene, pts: &[SurfacePoint], i: usize) -> Result<f64> {
    let k = pts.len();
    if i == k - 1 {
        return Ok(scene.emitter_pdf_area(&pts[i]));
    }
    let sg = seg(&pts[i + 1], &pts[i])?;
    let q = scene.options.continuation(k - 2 - i);
    Ok(light_sa(scene, pts, i + 1)? * q * pts[i].n_s.dot(sg.dir).abs() / sg.d2)
}

fn connect_pdf(scene: &Scene, pts: &[SurfacePoint], s: usize) -> Result<f64> {
    let k = pts.len();
    let mut p = 1.0;
    for i in 1..s {
        p *= eye_area(scene, pts, i)?;
    }
    for i in s..k {
        let mut a = light_area(scene, pts, i)?;
        if i < k - 1 {
            let c = adjoint(&pts[i], seg(&pts[i], &pts[i + 1])?.dir, seg(&pts[i], &pts[i - 1])?.dir);
            a = if c == 0.0 { 0.0 } else { a / c };
        }
        p *= a;
    }
    Ok(p)
}

/// Product area density of the path under `strategy`, from scratch.
pub fn brute_path_pdf(scene: &Scene, pts: &[SurfacePoint], strategy: &Strategy) -> Result<f64> {
    let k = pts.len();
    let opts = &scene.options;
    if k < 2 || k > opts.max_depth || strategy.s < 1 {
        return Ok(0.0);
    }
    let s = strategy.s;
    match strategy.technique {
        Technique::Connect => {
            if s + strategy.t != k {
                return Ok(0.0);
            }
            let mut p = connect_pdf(scene, pts, s)?;
            if opts.random_connect && s >= 2 && strategy.t >= 2 {
                p /= (opts.max_depth - s - 1) as f64;
            }
            Ok(p)
        }
        Technique::Merge => {
            if s < 2 || strategy.t < 1 || s + strategy.t - 1 != k {
                return Ok(0.0);
            }
            let arrival = if s == k {
                scene.emitter_pdf_area(&pts[k - 1])
            } else {
                let sg = seg(&pts[s], &pts[s - 1])?;
                light_sa(scene, pts, s)? * opts.continuation(k - 1 - s) * pts[s - 1].n_g.dot(sg.dir).abs() / sg.d2
            };
            let r = scene.merge_radius();
            Ok(connect_pdf(scene, pts, s)? * arrival * PI * r * r)
        }
    }
}

/// Measurement contribution in the shading-cosine area measure: importance,
/// emission, every BxDF value and every two-sided cosine over distance.
pub fn measurement_contribution(scene: &Scene, pts: &[SurfacePoint]) -> Result<Rgb> {
    let k = pts.len();
    let first = seg(&pts[0], &pts[1])?;
    let mut f = Rgb::gray(scene.camera.we_pdf(first.dir).importance) * scene.emitted_radiance(&pts[k - 1]);
    for i in 0..k - 1 {
        let sg = seg(&pts[i], &pts[i + 1])?;
        f = f * (pts[i].n_s.dot(sg.dir).abs() * pts[i + 1].n_s.dot(sg.dir).abs() / sg.d2);
    }
    for i in 1..k - 1 {
        let m = scene.material(&pts[i]).ok_or(Error::InvalidPath("interior vertex without material"))?;
        let wi = seg(&pts[i], &pts[i - 1])?.dir;
        let wo = seg(&pts[i], &pts[i + 1])?.dir;
        f = f * bxdf_eval(m, &pts[i], wi, wo, Transport::Importance);
    }
    Ok(f)
}

/// Sample value of the path as if `strategy` had produced it (luminance).
pub fn brute_throughput(scene: &Scene, pts: &[SurfacePoint], strategy: &Strategy) -> Result<f64> {
    let p = brute_path_pdf(scene, pts, strategy)?;
    if !(p > 0.0) {
        return Ok(0.0);
    }
    Ok(measurement_contribution(scene, pts)?.luminance() / p)
}

fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z = 1.0 - 2.0 * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

const MIN_COS: f64 = 1e-6;

fn usable_edge(a: &SurfacePoint, b: &SurfacePoint) -> bool {
    let d = b.position - a.position;
    let l = d.length();
    if !(l > 1e-9) {
        return false;
    }
    let w = d / l;
    a.n_g.dot(w).abs() > MIN_COS && a.n_s.dot(w).abs() > MIN_COS && b.n_g.dot(w).abs() > MIN_COS && b.n_s.dot(w).abs() > MIN_COS
}

fn try_path<R: Rng + ?Sized>(scene: &Scene, rng: &mut R, len: usize) -> Option<Vec<SurfacePoint>> {
    let cam = &scene.camera;
    let mut pts = vec![cam.vertex()];
    if len > 2 {
        let i = rng.gen_range(0..cam.width);
        let j = rng.gen_range(0..cam.height);
        let w = cam.direction(i, j, rng.gen(), rng.gen());
        pts.push(scene.intersect(&Ray::new(cam.position, w))?.point);
    }
    while pts.len() < len - 1 {
        let from = pts.last().unwrap().position;
        pts.push(scene.intersect(&Ray::new(from, uniform_sphere(rng)))?.point);
    }
    let lights = scene.lights();
    let (shape, _) = lights[rng.gen_range(0..lights.len())];
    let (end, _) = scene.sample_shape(shape, rng);
    let prev = *pts.last().unwrap();
    if !scene.visible(prev.position, end.position) || !usable_edge(&prev, &end) {
        return None;
    }
    pts.push(end);
    cam.we_pdf((pts[1].position - pts[0].position).normalized()).pixel?;
    for w in pts.windows(2) {
        if !usable_edge(&w[0], &w[1]) {
            return None;
        }
    }
    for i in 1..len - 1 {
        let m = scene.material(&pts[i])?;
        let wi = (pts[i - 1].position - pts[i].position).normalized();
        let wo = (pts[i + 1].position - pts[i].position).normalized();
        if bxdf_eval(m, &pts[i], wi, wo, Transport::Importance).is_black() {
            return None;
        }
    }
    Some(pts)
}

/// Random camera-to-emitter path with `len` vertices, plus the number of
/// attempts the rejection sampler needed.
pub fn random_valid_path_counted<R: Rng + ?Sized>(scene: &Scene, rng: &mut R, len: usize) -> Result<(Vec<SurfacePoint>, usize)> {
    if len < 2 || len > scene.options.max_depth {
        return Err(Error::InvalidPath("path length outside 2..=max_depth"));
    }
    for attempt in 1..=REJECTION_BUDGET {
        if let Some(p) = try_path(scene, rng, len) {
            return Ok((p, attempt));
        }
    }
    Err(Error::RejectionBudget(REJECTION_BUDGET))
}

pub fn random_valid_path<R: Rng + ?Sized>(scene: &Scene, rng: &mut R, len: usize) -> Result<Vec<SurfacePoint>> {
    random_valid_path_counted(scene, rng, len).map(|(p, _)| p)
}
