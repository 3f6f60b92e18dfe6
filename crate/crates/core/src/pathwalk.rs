//! Eye and light random walks, and assembly of complete paths.
//!
//! A [`SubPath`] stores its vertices in walk order: "forward" always means
//! the direction the walk travelled. [`fill_reverse_pdfs`] joins an eye and
//! a light sub-path into a [`FullPath`] indexed from the camera, where every
//! vertex carries the densities and scattering values of both directions.

use rand::Rng;

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::misweights::{shading_normal_correction, Strategy, Technique};
use crate::scene::{bxdf_eval, bxdf_pdf, bxdf_sample, PdfDirection, Scene, SceneOptions, SurfacePoint, Transport};
use crate::vecmath::{solid_angle_to_area, Ray, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Sensor,
    Emitter,
}

/// Which deliberately wrong MIS bookkeeping to apply. Only the
/// probability-based densities are affected; throughputs stay correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WrongWeights {
    #[default]
    None,
    /// Densities evaluated for the non-sampled direction ignore roulette.
    OmitRr,
    /// Light-direction densities are not divided by the adjoint factor.
    OmitShadingCorrection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathVertex {
    pub point: SurfacePoint,
    /// Unit direction toward the previous vertex; zero at the origin.
    pub w_in: Vec3,
    /// Area density with which the walk generated this vertex, roulette
    /// included. At the origin this is the endpoint density.
    pub pdf_fwd_area: f64,
    /// Solid-angle density of the direction sampled here; 0 on the last vertex.
    pub pdf_sa: f64,
    /// Scattering value times outgoing cosine toward the next vertex.
    pub f_fwd: Rgb,
    /// Continuation probability applied to reach the next vertex.
    pub rr_prob: f64,
    /// Throughput of the prefix ending at this vertex.
    pub partial_throughput: Rgb,
    pub is_endpoint: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubPath {
    pub origin: Origin,
    pub vertices: Vec<PathVertex>,
    pub endpoint_pdf: f64,
    /// Emitted radiance for light sub-paths, camera importance of the first
    /// direction for eye sub-paths.
    pub endpoint_value: Rgb,
}

impl SubPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn transport(&self) -> Transport {
        match self.origin {
            Origin::Sensor => Transport::Importance,
            Origin::Emitter => Transport::Light,
        }
    }
}

/// Records the step `last -> next` and appends `next`.
fn extend(path: &mut SubPath, next: SurfacePoint, pdf_sa: f64, f: Rgb, rr: f64) -> Result<()> {
    let last = path.vertices.last_mut().expect("sub-path has an origin");
    last.pdf_sa = pdf_sa;
    last.f_fwd = f;
    last.rr_prob = rr;
    let d = next.position - last.point.position;
    let dist = d.length();
    let w = d / dist;
    let pdf_fwd_area = solid_angle_to_area(pdf_sa * rr, dist, next.n_s.dot(w))?;
    let partial_throughput = last.partial_throughput * f / (pdf_sa * rr);
    path.vertices.push(PathVertex {
        point: next,
        w_in: -w,
        pdf_fwd_area,
        pdf_sa: 0.0,
        f_fwd: Rgb::BLACK,
        rr_prob: 1.0,
        partial_throughput,
        is_endpoint: false,
    });
    Ok(())
}

fn origin_vertex(point: SurfacePoint, pdf: f64, throughput: Rgb) -> PathVertex {
    PathVertex {
        point,
        w_in: Vec3::ZERO,
        pdf_fwd_area: pdf,
        pdf_sa: 0.0,
        f_fwd: Rgb::BLACK,
        rr_prob: 1.0,
        partial_throughput: throughput,
        is_endpoint: true,
    }
}

/// Roulette decision for leaving a vertex with the given bounce index.
fn survives<R: Rng + ?Sized>(opts: &SceneOptions, bounce: usize, rng: &mut R) -> Option<f64> {
    let q = opts.continuation(bounce);
    if q < 1.0 && rng.gen::<f64>() >= q {
        None
    } else {
        Some(q)
    }
}

/// Directional density and scattering value (times outgoing cosine) for
/// leaving the last vertex of `path` along `wo`.
fn step_value(scene: &Scene, path: &SubPath, wo: Vec3) -> Result<(f64, Rgb)> {
    let cur = path.vertices.last().expect("sub-path has an origin");
    let p = &cur.point;
    if path.len() == 1 {
        return Ok(match path.origin {
            Origin::Sensor => {
                let r = scene.camera.we_pdf(wo);
                (r.pdf_dir, Rgb::gray(r.importance * p.n_g.abs_dot(wo)))
            }
            Origin::Emitter => (scene.emission_pdf(p, wo), Rgb::gray(p.n_g.abs_dot(wo))),
        });
    }
    let m = scene.material(p).ok_or(Error::InvalidPath("interior vertex without material"))?;
    let pdf = bxdf_pdf(m, p, cur.w_in, wo, PdfDirection::Forward);
    Ok((pdf, bxdf_eval(m, p, cur.w_in, wo, path.transport()) * p.n_s.abs_dot(wo)))
}

/// Appends `next`, re-evaluating the step along the direction between the
/// two positions so that walks and replays store identical numbers.
/// Returns false when that step has zero density or value.
fn step_to(scene: &Scene, path: &mut SubPath, next: SurfacePoint, rr: f64) -> Result<bool> {
    let from = path.vertices.last().unwrap().point.position;
    let wo = (next.position - from).normalized();
    let (pdf, f) = step_value(scene, path, wo)?;
    if !(pdf > 0.0) || f.is_black() {
        return Ok(false);
    }
    extend(path, next, pdf, f, rr)?;
    Ok(true)
}

/// Samples a direction at the last vertex, applies roulette and traces.
fn walk<R: Rng + ?Sized>(scene: &Scene, path: &mut SubPath, max_vertices: usize, rng: &mut R) -> Result<()> {
    while path.len() < max_vertices {
        let v = *path.vertices.last().unwrap();
        let bounce = path.len() - 1;
        let wo = if bounce == 0 {
            match path.origin {
                Origin::Sensor => unreachable!("camera rays are generated per pixel"),
                Origin::Emitter => scene.sample_emission(&v.point, rng).0,
            }
        } else {
            let m = scene.material(&v.point).expect("surface vertex has a material");
            let s = bxdf_sample(m, &v.point, v.w_in, rng, path.transport())?;
            if s.value.is_black() {
                return Ok(());
            }
            s.wo
        };
        let Some(rr) = survives(&scene.options, bounce, rng) else { return Ok(()) };
        let Some(hit) = scene.intersect(&Ray::new(v.point.position, wo)) else { return Ok(()) };
        if !step_to(scene, path, hit.point, rr)? {
            return Ok(());
        }
    }
    Ok(())
}

pub fn generate_eye_subpath<R: Rng + ?Sized>(scene: &Scene, pixel: (usize, usize), rng: &mut R) -> Result<SubPath> {
    let cam = &scene.camera;
    let x0 = cam.vertex();
    let w = cam.direction(pixel.0, pixel.1, rng.gen(), rng.gen());
    let mut path = SubPath {
        origin: Origin::Sensor,
        vertices: vec![origin_vertex(x0, 1.0, Rgb::WHITE)],
        endpoint_pdf: 1.0,
        endpoint_value: Rgb::gray(cam.we_pdf(w).importance),
    };
    let max_vertices = scene.options.max_depth;
    if max_vertices < 2 {
        return Ok(path);
    }
    let Some(rr) = survives(&scene.options, 0, rng) else { return Ok(path) };
    if let Some(hit) = scene.intersect(&Ray::new(x0.position, w)) {
        if step_to(scene, &mut path, hit.point, rr)? {
            walk(scene, &mut path, max_vertices, rng)?;
        }
    }
    Ok(path)
}

pub fn generate_light_subpath<R: Rng + ?Sized>(scene: &Scene, rng: &mut R) -> Result<SubPath> {
    let e = scene.emitter_sample(rng);
    let mut path = SubPath {
        origin: Origin::Emitter,
        vertices: vec![origin_vertex(e.point, e.pdf_area, e.radiance / e.pdf_area)],
        endpoint_pdf: e.pdf_area,
        endpoint_value: e.radiance,
    };
    if e.radiance.is_black() {
        return Ok(path);
    }
    walk(scene, &mut path, scene.options.max_depth - 1, rng)?;
    Ok(path)
}

fn replay(scene: &Scene, mut path: SubPath, points: &[SurfacePoint]) -> Result<SubPath> {
    for (i, next) in points.iter().enumerate().skip(1) {
        if !step_to(scene, &mut path, *next, scene.options.continuation(i - 1))? {
            return Err(Error::InvalidPath("replayed step has zero density"));
        }
    }
    Ok(path)
}

/// Rebuilds the record an eye walk would have produced passing through the
/// given points; `points[0]` must be the camera vertex.
pub fn eye_subpath_through(scene: &Scene, points: &[SurfacePoint]) -> Result<SubPath> {
    let x0 = scene.camera.vertex();
    let importance = points.get(1).map_or(0.0, |p| scene.camera.we_pdf((p.position - x0.position).normalized()).importance);
    let path = SubPath {
        origin: Origin::Sensor,
        vertices: vec![origin_vertex(x0, 1.0, Rgb::WHITE)],
        endpoint_pdf: 1.0,
        endpoint_value: Rgb::gray(importance),
    };
    replay(scene, path, points)
}

/// Light-walk counterpart of [`eye_subpath_through`]; `points[0]` must lie on an emitter.
pub fn light_subpath_through(scene: &Scene, points: &[SurfacePoint]) -> Result<SubPath> {
    let y0 = points[0];
    if y0.emitter.is_none() {
        return Err(Error::InvalidPath("light sub-path must start on an emitter"));
    }
    let pdf_a = scene.emitter_pdf_area(&y0);
    let le = scene.emitted_radiance(&y0);
    let path =
        SubPath { origin: Origin::Emitter, vertices: vec![origin_vertex(y0, pdf_a, le / pdf_a)], endpoint_pdf: pdf_a, endpoint_value: le };
    replay(scene, path, points)
}

/// One vertex of a complete path, indexed from the camera (`x_0`) to the
/// emitter (`x_{k-1}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullVertex {
    pub point: SurfacePoint,
    /// Solid-angle density of sampling the direction toward `x_{i+1}` here
    /// (camera: the pinhole's directional density).
    pub pdf_eye_sa: f64,
    /// Solid-angle density of sampling the direction toward `x_{i-1}` here
    /// (emitter endpoint: the emission density).
    pub pdf_light_sa: f64,
    pub rr_eye: f64,
    pub rr_light: f64,
    /// Scattering value times cosine toward `x_{i+1}`, importance transport.
    pub f_eye: Rgb,
    /// Scattering value times cosine toward `x_{i-1}`, light transport
    /// (adjoint factor included).
    pub f_light: Rgb,
    /// Adjoint shading-normal factor for light arriving from `x_{i+1}` and
    /// leaving toward `x_{i-1}`; 1 at endpoints.
    pub correction: f64,
    /// `p(x_{i-1} -> x_i)`; 1 on the camera vertex.
    pub pdf_eye_area: f64,
    /// `p(x_i <- x_{i+1})` before the adjoint division; on the last vertex
    /// the emitter's area density, on the camera 0.
    pub pdf_light_area_raw: f64,
    /// What the light-direction density is divided by for MIS.
    pub light_area_divisor: f64,
    /// Squared distance to `x_{i+1}`.
    pub dist2_next: f64,
}

impl FullVertex {
    /// `p(x_i <- x_{i+1})` as used by the probability engine.
    pub fn pdf_light_area(&self) -> f64 {
        self.pdf_light_area_raw / self.light_area_divisor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullPath {
    pub vertices: Vec<FullVertex>,
    /// Radiance leaving `x_{k-1}` toward `x_{k-2}`.
    pub emitted: Rgb,
    pub options: SceneOptions,
    pub merge_radius: f64,
    pub wrong_weights: WrongWeights,
}

impl FullPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Joins the first `s` eye vertices and the first `t` light vertices into a
/// complete path and evaluates every density the walks did not sample.
pub fn fill_reverse_pdfs(scene: &Scene, eye: &SubPath, s: usize, light: &SubPath, t: usize, wrong: WrongWeights) -> Result<FullPath> {
    annotate(scene, &eye.vertices[..s], &light.vertices[..t], false, wrong)
}

/// Like [`fill_reverse_pdfs`] for a merge: the light sub-path's last vertex
/// (index `t - 1`) coincides with the eye sub-path's last vertex and is not
/// repeated; its arrival density counts as sampled.
pub fn fill_reverse_pdfs_merged(
    scene: &Scene,
    eye: &SubPath,
    s: usize,
    light: &SubPath,
    t: usize,
    wrong: WrongWeights,
) -> Result<FullPath> {
    annotate(scene, &eye.vertices[..s], &light.vertices[..t], true, wrong)
}

fn annotate(scene: &Scene, eye: &[PathVertex], light: &[PathVertex], merged: bool, wrong: WrongWeights) -> Result<FullPath> {
    let s = eye.len();
    let light_body = if merged { &light[..light.len() - 1] } else { light };
    let k = s + light_body.len();
    if s == 0 || k < 2 {
        return Err(Error::InvalidPath("a complete path needs the camera and at least one more vertex"));
    }
    let points: Vec<SurfacePoint> = eye.iter().map(|v| v.point).chain(light_body.iter().rev().map(|v| v.point)).collect();
    let last = points[k - 1];
    if last.emitter.is_none() {
        return Err(Error::InvalidPath("path must end on an emitter"));
    }
    let opts = scene.options;
    let cam = &scene.camera;
    let rr_eval = |bounce: usize| if wrong == WrongWeights::OmitRr { 1.0 } else { opts.continuation(bounce) };

    // One direction and length per segment; every cosine below uses these.
    let mut dirs = Vec::with_capacity(k - 1);
    let mut lens = Vec::with_capacity(k - 1);
    for w in points.windows(2) {
        let d = w[1].position - w[0].position;
        lens.push(d.length());
        dirs.push(d.normalized());
    }

    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let p = points[i];
        let to_prev = (i > 0).then(|| -dirs[i - 1]);
        let to_next = (i + 1 < k).then(|| dirs[i]);
        let mut v = FullVertex {
            point: p,
            pdf_eye_sa: 0.0,
            pdf_light_sa: 0.0,
            rr_eye: if i + 1 < k { opts.continuation(i) } else { 1.0 },
            rr_light: if i > 0 { opts.continuation(k - 1 - i) } else { 1.0 },
            f_eye: Rgb::BLACK,
            f_light: Rgb::BLACK,
            correction: 1.0,
            pdf_eye_area: 1.0,
            pdf_light_area_raw: 0.0,
            light_area_divisor: 1.0,
            dist2_next: if i + 1 < k { lens[i] * lens[i] } else { 0.0 },
        };
        if i == 0 {
            let w = to_next.unwrap();
            let resp = cam.we_pdf(w);
            v.pdf_eye_sa = resp.pdf_dir;
            v.f_eye = Rgb::gray(resp.importance * p.n_g.abs_dot(w));
        } else if i == k - 1 {
            let w = to_prev.unwrap();
            v.pdf_light_sa = scene.emission_pdf(&p, w);
            v.f_light = Rgb::gray(p.n_g.abs_dot(w));
        } else {
            let (wp, wn) = (to_prev.unwrap(), to_next.unwrap());
            let m = scene.material(&p).ok_or(Error::InvalidPath("interior vertex without material"))?;
            v.pdf_eye_sa = bxdf_pdf(m, &p, wp, wn, PdfDirection::Forward);
            v.pdf_light_sa = bxdf_pdf(m, &p, wp, wn, PdfDirection::Reverse);
            v.f_eye = bxdf_eval(m, &p, wp, wn, Transport::Importance) * p.n_s.abs_dot(wn);
            v.f_light = bxdf_eval(m, &p, wn, wp, Transport::Light) * p.n_s.abs_dot(wp);
            v.correction = shading_normal_correction(wn, wp, p.n_s, p.n_g);
            if wrong != WrongWeights::OmitShadingCorrection {
                v.light_area_divisor = v.correction;
            }
        }
        out.push(v);
    }

    for i in 1..k {
        out[i].pdf_eye_area = if i < s {
            eye[i].pdf_fwd_area
        } else {
            solid_angle_to_area(out[i - 1].pdf_eye_sa * rr_eval(i - 1), lens[i - 1], points[i].n_s.dot(dirs[i - 1]))?
        };
    }
    let light_eval = |i: usize, rr: f64| solid_angle_to_area(out[i + 1].pdf_light_sa * rr, lens[i], points[i].n_s.dot(dirs[i]));
    let mut raw = vec![0.0; k];
    for i in 1..k {
        raw[i] = if i >= s {
            light_body[k - 1 - i].pdf_fwd_area
        } else if i == k - 1 {
            scene.emitter_pdf_area(&points[i])
        } else if merged && i == s - 1 {
            // The photon was sampled, but its density is evaluated at the
            // eye vertex it merged with.
            light_eval(i, opts.continuation(k - 2 - i))?
        } else {
            light_eval(i, rr_eval(k - 2 - i))?
        };
    }
    for (v, r) in out.iter_mut().zip(raw) {
        v.pdf_light_area_raw = r;
    }

    let emitted = scene.emitted_radiance(&last);
    Ok(FullPath { vertices: out, emitted, options: opts, merge_radius: scene.merge_radius(), wrong_weights: wrong })
}

/// Annotates a path given by its points as if `strategy` had sampled it.
pub fn full_path_from_points(scene: &Scene, pts: &[SurfacePoint], strategy: &Strategy, wrong: WrongWeights) -> Result<FullPath> {
    let s = strategy.s;
    let eye = eye_subpath_through(scene, &pts[..s])?;
    match strategy.technique {
        Technique::Connect => {
            let rev: Vec<SurfacePoint> = pts[s..].iter().rev().copied().collect();
            if rev.is_empty() {
                let empty = SubPath { origin: Origin::Emitter, vertices: Vec::new(), endpoint_pdf: 0.0, endpoint_value: Rgb::BLACK };
                return fill_reverse_pdfs(scene, &eye, s, &empty, 0, wrong);
            }
            let light = light_subpath_through(scene, &rev)?;
            fill_reverse_pdfs(scene, &eye, s, &light, rev.len(), wrong)
        }
        Technique::Merge => {
            let rev: Vec<SurfacePoint> = pts[s - 1..].iter().rev().copied().collect();
            let light = light_subpath_through(scene, &rev)?;
            fill_reverse_pdfs_merged(scene, &eye, s, &light, rev.len(), wrong)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sampler, Stream};
    use crate::scene::parse_scene;

    const FURNACE: &str = "\
camera 0 0 0  0 0 1  0 1 0  60 4 4
material grey lambert 0.5 0.5 0.5
sphere 0 0 0 5 grey
light 0 1 1 1
option max_depth 6
";

    #[test]
    fn max_depth_one_vertex_is_rejected_by_scene() {
        assert!(parse_scene(&FURNACE.replace("max_depth 6", "max_depth 1")).is_err());
    }

    #[test]
    fn furnace_throughput_halves_per_bounce() {
        let scene = parse_scene(FURNACE).unwrap();
        let mut rng = sampler(1, 2, 3, Stream::Eye);
        let p = generate_eye_subpath(&scene, (1, 2), &mut rng).unwrap();
        assert_eq!(p.len(), 6);
        for (i, v) in p.vertices.iter().enumerate().skip(1) {
            let expected = 0.5f64.powi(i as i32 - 1);
            assert!((v.partial_throughput.g - expected).abs() < 1e-12 * expected, "vertex {i}: {:?}", v.partial_throughput);
        }
    }

    #[test]
    fn throughput_prefix_recurrence_holds() {
        let scene = parse_scene(&format!("{FURNACE}option rr_q 0.7\noption rr_depth 1\n")).unwrap();
        for n in 0..50 {
            let mut rng = sampler(4, n, 0, Stream::Light);
            let p = generate_light_subpath(&scene, &mut rng).unwrap();
            assert!((p.vertices[0].partial_throughput.r - p.endpoint_value.r / p.endpoint_pdf).abs() < 1e-12);
            for w in p.vertices.windows(2) {
                let expect = w[0].partial_throughput * w[0].f_fwd / (w[0].pdf_sa * w[0].rr_prob);
                assert_eq!(expect, w[1].partial_throughput);
            }
        }
    }

    #[test]
    fn depth_one_light_path_is_the_emitter_sample() {
        let scene = parse_scene(&FURNACE.replace("max_depth 6", "max_depth 2")).unwrap();
        let mut rng = sampler(2, 0, 0, Stream::Light);
        let p = generate_light_subpath(&scene, &mut rng).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.endpoint_value, Rgb::WHITE);
        let area = 4.0 * std::f64::consts::PI * 25.0;
        assert!((p.vertices[0].partial_throughput.r - area).abs() < 1e-9);
    }

    #[test]
    fn replay_reproduces_walk_densities() {
        let scene = parse_scene(&format!("{FURNACE}option rr_q 0.8\noption rr_depth 2\n")).unwrap();
        for n in 0..40 {
            let mut rng = sampler(5, n, 0, Stream::Eye);
            let walk = generate_eye_subpath(&scene, (2, 1), &mut rng).unwrap();
            let pts: Vec<_> = walk.vertices.iter().map(|v| v.point).collect();
            let replay = eye_subpath_through(&scene, &pts).unwrap();
            for (a, b) in walk.vertices.iter().zip(&replay.vertices) {
                let tol = 1e-12 * a.pdf_fwd_area.abs();
                assert!((a.pdf_fwd_area - b.pdf_fwd_area).abs() <= tol);
            }
            // Vertices beyond the roulette depth carry exactly one factor q.
            for (i, v) in walk.vertices.iter().enumerate().skip(1).take(walk.len().saturating_sub(2)) {
                assert_eq!(v.rr_prob, scene.options.continuation(i));
            }
        }
    }

    #[test]
    fn three_vertex_path_densities() {
        let text = "\
camera 0 2 -3  0 0 0  0 1 0  60 4 4
material grey lambert 0.5 0.5 0.5
quad -5 0 -5  -5 0 5  5 0 5  5 0 -5 grey
quad -0.5 3 -0.5  0.5 3 -0.5  0.5 3 0.5  -0.5 3 0.5 grey
light 1 1 1 1
";
        let scene = parse_scene(text).unwrap();
        let cam = scene.camera.vertex();
        let floor = scene.surface_point(0, Vec3::ZERO);
        let lamp = scene.surface_point(1, Vec3::new(0.0, 3.0, 0.0));
        let eye = eye_subpath_through(&scene, &[cam, floor]).unwrap();
        let light = light_subpath_through(&scene, &[lamp]).unwrap();
        let full = fill_reverse_pdfs(&scene, &eye, 2, &light, 1, WrongWeights::None).unwrap();
        let pi = std::f64::consts::PI;
        let v = &full.vertices;
        assert_eq!(v.len(), 3);
        assert_eq!(v[0].pdf_light_area_raw, 0.0);
        assert_eq!(v[0].pdf_eye_area, 1.0);
        assert!((v[2].pdf_light_area() - 1.0).abs() < 1e-12);
        assert!((v[1].pdf_light_area() - 1.0 / (18.0 * pi)).abs() < 1e-15);
        assert!((v[2].pdf_eye_area - 1.0 / (9.0 * pi)).abs() < 1e-15);
        assert_eq!(full.emitted, Rgb::WHITE);
        // The same path seen from the other side agrees on every density.
        let eye3 = eye_subpath_through(&scene, &[cam, floor, lamp]).unwrap();
        let light0 = light_subpath_through(&scene, &[lamp]).unwrap();
        let alt = fill_reverse_pdfs(&scene, &eye3, 3, &light0, 0, WrongWeights::None).unwrap();
        for (a, b) in alt.vertices.iter().zip(v) {
            assert!((a.pdf_eye_area - b.pdf_eye_area).abs() <= 1e-15 * b.pdf_eye_area);
            assert!((a.pdf_light_area() - b.pdf_light_area()).abs() <= 1e-15 * b.pdf_light_area().max(1e-300));
        }
    }
}
