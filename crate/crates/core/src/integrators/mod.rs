//! Estimators built on the sub-path walks: path tracing, light tracing,
//! bidirectional path tracing and bidirectional tracing with vertex merging.
//!
//! Rendering runs in iterations, one sample per pixel each. Every pixel owns
//! one eye sub-path and one light sub-path per iteration, both drawn from
//! counter-keyed streams, so images do not depend on the thread count.

mod photon;
mod stats;

use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

pub use photon::{Photon, PhotonGrid};
pub use stats::{agreement_fraction, CompensatedSum, EstimatorStats, PixelAccumulator, RgbSum, StrategyMoments};

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::misweights::{
    enumerate_strategies, merge_pdf_factor, random_connection_choices, relative_difference, weight_probability, weight_throughput, Strategy,
};
use crate::pathwalk::{fill_reverse_pdfs, fill_reverse_pdfs_merged, generate_eye_subpath, generate_light_subpath, SubPath, WrongWeights};
use crate::rng::{sampler, Stream};
use crate::scene::{bxdf_eval, Scene, Transport};
use crate::vecmath::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Pt,
    Lt,
    Bpt,
    Vcm,
}

impl FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pt" => Ok(Self::Pt),
            "lt" => Ok(Self::Lt),
            "bpt" => Ok(Self::Bpt),
            "vcm" => Ok(Self::Vcm),
            _ => Err(format!("unknown integrator '{s}'")),
        }
    }
}

impl Integrator {
    fn uses_eye(self) -> bool {
        self != Self::Lt
    }

    fn uses_light(self) -> bool {
        self != Self::Pt
    }

    fn weighted(self) -> bool {
        matches!(self, Self::Bpt | Self::Vcm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    Prob,
    Thru,
    Both,
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "prob" => Ok(Self::Prob),
            "thru" => Ok(Self::Thru),
            "both" => Ok(Self::Both),
            _ => Err(format!("unknown weight mode '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    pub integrator: Integrator,
    pub spp: usize,
    pub seed: u64,
    /// Weight every path with both engines and track their deviation.
    pub verify_mode: bool,
    pub weight_mode: WeightMode,
    pub wrong_weights: WrongWeights,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl RenderConfig {
    pub fn new(integrator: Integrator, spp: usize, seed: u64) -> Self {
        Self { integrator, spp, seed, verify_mode: false, weight_mode: WeightMode::Prob, wrong_weights: WrongWeights::None, threads: None }
    }
}

/// One weighted contribution and the strategy that produced it.
#[derive(Debug, Clone, Copy)]
struct Contribution {
    strategy: Strategy,
    value: Rgb,
}

#[derive(Default)]
struct SampleOutput {
    eye: Rgb,
    /// `(pixel index, value)` light-image splats.
    splats: Vec<(usize, Rgb)>,
    contributions: Vec<Contribution>,
    nan: usize,
    weighted: usize,
    max_dev: f64,
}

struct Ctx<'a> {
    scene: &'a Scene,
    config: &'a RenderConfig,
    merging: bool,
    radius: f64,
    light_count: usize,
}

impl Ctx<'_> {
    fn weight(&self, path: Result<crate::pathwalk::FullPath>, st: &Strategy, out: &mut SampleOutput) -> f64 {
        if !self.config.integrator.weighted() {
            return 1.0;
        }
        let Ok(path) = path else { return 0.0 };
        let set = enumerate_strategies(path.len(), self.merging);
        let both = self.config.verify_mode || self.config.weight_mode == WeightMode::Both;
        let wp = if both || self.config.weight_mode == WeightMode::Prob { weight_probability(&path, st, &set).ok() } else { None };
        let wt = if both || self.config.weight_mode == WeightMode::Thru { weight_throughput(&path, st, &set).ok() } else { None };
        out.weighted += 1;
        if let (Some(a), Some(b)) = (wp, wt) {
            out.max_dev = out.max_dev.max(relative_difference(a, b));
        }
        match self.config.weight_mode {
            WeightMode::Thru => wt.unwrap_or(0.0),
            _ => wp.unwrap_or(0.0),
        }
    }

    fn record(&self, out: &mut SampleOutput, st: Strategy, value: Rgb, splat: Option<usize>) {
        if !value.is_finite() {
            out.nan += 1;
            return;
        }
        if value.is_black() {
            return;
        }
        out.contributions.push(Contribution { strategy: st, value });
        match splat {
            Some(p) => out.splats.push((p, value)),
            None => out.eye += value,
        }
    }
}

/// Unweighted connection value of eye vertex `s - 1` with light vertex `t - 1`
/// (`s, t >= 1`), or `None` when it is occluded, outside the image or zero.
/// Also returns the pixel for light-tracing splats.
pub fn connection_value(scene: &Scene, eye: &SubPath, s: usize, light: &SubPath, t: usize) -> Option<(Rgb, Option<usize>)> {
    let e = &eye.vertices[s - 1];
    let l = &light.vertices[t - 1];
    let d = l.point.position - e.point.position;
    let d2 = d.length_squared();
    if !(d2 > 0.0) {
        return None;
    }
    let w = d / d2.sqrt();
    let mut pixel = None;
    let f_e = if s == 1 {
        let resp = scene.camera.we_pdf(w);
        let (i, j) = resp.pixel?;
        pixel = Some(j * scene.camera.width + i);
        Rgb::gray(resp.importance * e.point.n_g.abs_dot(w))
    } else {
        let m = scene.material(&e.point)?;
        bxdf_eval(m, &e.point, e.w_in, w, Transport::Importance) * e.point.n_s.abs_dot(w)
    };
    let f_l = if t == 1 {
        Rgb::gray(l.point.n_g.abs_dot(w))
    } else {
        let m = scene.material(&l.point)?;
        bxdf_eval(m, &l.point, l.w_in, -w, Transport::Light) * l.point.n_s.abs_dot(w)
    };
    let value = e.partial_throughput * f_e * f_l * l.partial_throughput / d2;
    if value.is_black() || !scene.visible(e.point.position, l.point.position) {
        return None;
    }
    Some((value, pixel))
}

/// Weighted contribution of connecting `s` eye with `t` light vertices.
/// Returns the value and, for `s = 1`, the pixel it splats to.
pub fn connect_subpaths(scene: &Scene, eye: &SubPath, light: &SubPath, s: usize, t: usize, config: &RenderConfig) -> (Rgb, Option<usize>) {
    let ctx = Ctx { scene, config, merging: config.integrator == Integrator::Vcm, radius: scene.merge_radius(), light_count: 1 };
    let mut out = SampleOutput::default();
    let st = Strategy::connect(s, t);
    match connection_value(scene, eye, s, light, t) {
        Some((v, px)) => {
            let w = ctx.weight(fill_reverse_pdfs(scene, eye, s, light, t, config.wrong_weights), &st, &mut out);
            (v * w, px)
        }
        None => (Rgb::BLACK, None),
    }
}

/// Unweighted merge value at eye vertex `s - 1` for one photon, before the
/// division by the number of light paths.
pub fn merge_value(scene: &Scene, eye: &SubPath, s: usize, light: &SubPath, t: usize, radius: f64) -> Rgb {
    let e = &eye.vertices[s - 1];
    let ph = &light.vertices[t - 1];
    let kernel = 1.0 / merge_pdf_factor(radius);
    if t == 1 {
        return e.partial_throughput * ph.partial_throughput * kernel;
    }
    let prev = light.vertices[t - 2].point.position;
    let w = (prev - e.point.position).normalized();
    let Some(m) = scene.material(&e.point) else { return Rgb::BLACK };
    let cg = e.point.n_g.abs_dot(w);
    if cg == 0.0 {
        return Rgb::BLACK;
    }
    let f = bxdf_eval(m, &e.point, e.w_in, w, Transport::Importance) * (e.point.n_s.abs_dot(w) / cg);
    e.partial_throughput * f * ph.partial_throughput * kernel
}

/// Weighted merge contribution at eye vertex `s - 1` against all photons.
pub fn merge_at_vertex(scene: &Scene, eye: &SubPath, s: usize, photons: &PhotonGrid, lights: &[SubPath], config: &RenderConfig) -> Rgb {
    let ctx = Ctx { scene, config, merging: true, radius: scene.merge_radius(), light_count: lights.len() };
    let mut out = SampleOutput::default();
    merge_into(&ctx, eye, s, photons, lights, &mut out);
    out.eye
}

fn merge_into(ctx: &Ctx, eye: &SubPath, s: usize, photons: &PhotonGrid, lights: &[SubPath], out: &mut SampleOutput) {
    let scene = ctx.scene;
    let e = &eye.vertices[s - 1];
    let max_depth = scene.options.max_depth;
    photons.query(e.point.position, |ph| {
        let t = ph.vertex + 1;
        if ph.shape != e.point.shape || s + t - 1 > max_depth {
            return;
        }
        if t == 1 && e.point.emitter.is_none() {
            return;
        }
        let light = &lights[ph.path];
        let v = merge_value(scene, eye, s, light, t, ctx.radius) / ctx.light_count as f64;
        if v.is_black() {
            return;
        }
        let st = Strategy::merge(s, t);
        let w = ctx.weight(fill_reverse_pdfs_merged(scene, eye, s, light, t, ctx.config.wrong_weights), &st, out);
        ctx.record(out, st, v * w, None);
    });
}

fn sample(
    ctx: &Ctx,
    eye: Option<&SubPath>,
    light: Option<&SubPath>,
    grid: Option<(&PhotonGrid, &[SubPath])>,
    rc_rng: &mut impl Rng,
) -> SampleOutput {
    let scene = ctx.scene;
    let config = ctx.config;
    let max_depth = scene.options.max_depth;
    let mut out = SampleOutput::default();
    let none = SubPath { origin: crate::pathwalk::Origin::Emitter, vertices: Vec::new(), endpoint_pdf: 0.0, endpoint_value: Rgb::BLACK };
    let light_ref = light.unwrap_or(&none);

    if let Some(eye) = eye {
        let integ = config.integrator;
        for s in 2..=eye.len() {
            let v = &eye.vertices[s - 1];
            if v.point.emitter.is_some() {
                let st = Strategy::connect(s, 0);
                let value = v.partial_throughput * scene.emitted_radiance(&v.point);
                if !value.is_black() {
                    let w = ctx.weight(fill_reverse_pdfs(scene, eye, s, light_ref, 0, config.wrong_weights), &st, &mut out);
                    ctx.record(&mut out, st, value * w, None);
                }
            }
            if integ == Integrator::Pt {
                continue;
            }
            let Some(light) = light else { continue };
            let max_t = (max_depth - s).min(light.len());
            let chosen = if scene.options.random_connect && random_connection_choices(max_depth, s) >= 1 {
                let l = random_connection_choices(max_depth, s);
                Some((rc_rng.gen_range(2..2 + l), l))
            } else {
                None
            };
            for t in 1..=max_t {
                let mut scale = 1.0;
                if t >= 2 {
                    if let Some((ct, l)) = chosen {
                        if ct != t {
                            continue;
                        }
                        scale = l as f64;
                    }
                }
                if let Some((value, _)) = connection_value(scene, eye, s, light, t) {
                    let st = Strategy::connect(s, t);
                    let w = ctx.weight(fill_reverse_pdfs(scene, eye, s, light, t, config.wrong_weights), &st, &mut out);
                    ctx.record(&mut out, st, value * (w * scale), None);
                }
            }
            if let Some((grid, lights)) = grid {
                merge_into(ctx, eye, s, grid, lights, &mut out);
            }
        }
    }

    if let Some(light) = light {
        if config.integrator != Integrator::Pt {
            let cam_only = crate::pathwalk::SubPath {
                origin: crate::pathwalk::Origin::Sensor,
                vertices: vec![eye.map_or_else(|| camera_origin(scene), |e| e.vertices[0])],
                endpoint_pdf: 1.0,
                endpoint_value: Rgb::BLACK,
            };
            for t in 1..=light.len().min(max_depth - 1) {
                if let Some((value, Some(px))) = connection_value(scene, &cam_only, 1, light, t) {
                    let st = Strategy::connect(1, t);
                    let w = ctx.weight(fill_reverse_pdfs(scene, &cam_only, 1, light, t, config.wrong_weights), &st, &mut out);
                    ctx.record(&mut out, st, value * w, Some(px));
                }
            }
        }
    }
    out
}

fn camera_origin(scene: &Scene) -> crate::pathwalk::PathVertex {
    crate::pathwalk::PathVertex {
        point: scene.camera.vertex(),
        w_in: Vec3::ZERO,
        pdf_fwd_area: 1.0,
        pdf_sa: 0.0,
        f_fwd: Rgb::BLACK,
        rr_prob: 1.0,
        partial_throughput: Rgb::WHITE,
        is_endpoint: true,
    }
}

/// Renders the scene. The image is the per-pixel estimate; the statistics
/// carry the moments needed for standard errors.
pub fn render(scene: &Scene, config: &RenderConfig) -> Result<(Image, EstimatorStats)> {
    if config.spp == 0 {
        return Err(Error::InvalidScene("spp must be at least 1".into()));
    }
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidScene(format!("thread pool: {e}")))?;
            pool.install(|| render_inner(scene, config))
        }
        None => render_inner(scene, config),
    }
}

fn render_inner(scene: &Scene, config: &RenderConfig) -> Result<(Image, EstimatorStats)> {
    let (w, h) = (scene.camera.width, scene.camera.height);
    let n_pix = w * h;
    let integ = config.integrator;
    let light_paths = if integ.uses_light() { n_pix * config.spp } else { 0 };
    let mut stats = EstimatorStats::new(w, h, config.spp, light_paths);
    let ctx = Ctx { scene, config, merging: integ == Integrator::Vcm, radius: scene.merge_radius(), light_count: n_pix };

    for n in 0..config.spp {
        let lights: Vec<SubPath> = if integ.uses_light() {
            (0..n_pix)
                .into_par_iter()
                .map(|p| generate_light_subpath(scene, &mut sampler(config.seed, p as u64, n as u64, Stream::Light)))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let grid = (integ == Integrator::Vcm).then(|| PhotonGrid::build(&lights, ctx.radius));
        let rows: Vec<Vec<SampleOutput>> = (0..h)
            .into_par_iter()
            .map(|j| {
                (0..w)
                    .map(|i| {
                        let p = j * w + i;
                        let mut rng = sampler(config.seed, p as u64, n as u64, Stream::Eye);
                        let eye = if integ.uses_eye() { Some(generate_eye_subpath(scene, (i, j), &mut rng)?) } else { None };
                        let light = lights.get(p);
                        let g = grid.as_ref().map(|g| (g, lights.as_slice()));
                        Ok(sample(&ctx, eye.as_ref(), light, g, &mut rng))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let mut splat_totals: Vec<Option<Rgb>> = vec![None; n_pix];
        for (p, out) in rows.into_iter().flatten().enumerate() {
            let acc = &mut stats.pixels[p];
            acc.eye_sum.add(out.eye);
            acc.eye_sq.add_squared(out.eye);
            // Splats of light path `p` are grouped by the pixel they land on.
            let mut touched: Vec<usize> = Vec::new();
            for &(q, v) in &out.splats {
                let slot = splat_totals[q].get_or_insert(Rgb::BLACK);
                *slot += v;
                touched.push(q);
            }
            touched.sort_unstable();
            touched.dedup();
            for q in touched {
                let v = splat_totals[q].take().unwrap();
                stats.pixels[q].light_sum.add(v);
                stats.pixels[q].light_sq.add_squared(v);
            }
            for c in &out.contributions {
                let lum = c.value.luminance();
                let m = stats.strategies.entry(c.strategy).or_default();
                m.sum.add(lum);
                m.sum_sq.add(lum * lum);
                m.count += 1;
            }
            stats.nan_count += out.nan;
            stats.weighted_paths += out.weighted;
            stats.max_engine_deviation = stats.max_engine_deviation.max(out.max_dev);
        }
    }

    let mut img = Image::new(w, h);
    for p in 0..n_pix {
        img.pixels[p] = stats.mean(p);
    }
    Ok((img, stats))
}
