//! Lambert and normalized Phong reflectance.
//!
//! Direction convention: `wi` points toward the vertex the walk arrived
//! from, `wo` toward the vertex it continues to. Both point away from the
//! surface. A BxDF value is nonzero only when both directions lie on the
//! same geometric side and above the shading hemisphere oriented to that
//! side, which keeps the function reciprocal.

use std::f64::consts::PI;

use rand::Rng;

use super::{cosine_hemisphere, Material, MaterialKind, SurfacePoint};
use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::misweights::shading_normal_correction;
use crate::vecmath::{Frame, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transport {
    /// Walks starting at the camera.
    Importance,
    /// Walks starting at an emitter; these carry the adjoint shading-normal
    /// correction.
    Light,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfDirection {
    /// Density of `wo` given `wi`.
    Forward,
    /// Density of `wi` given `wo`.
    Reverse,
}

#[derive(Debug, Clone, Copy)]
pub struct BxdfSample {
    pub wo: Vec3,
    pub pdf: f64,
    pub value: Rgb,
}

const MAX_SAMPLE_RETRIES: usize = 8;

/// Cosine between `b` and the mirror image of `a`, computed identically for
/// either argument order.
fn mirror_cosine(n: Vec3, a: Vec3, b: Vec3) -> f64 {
    (2.0 * (n.dot(a) * n.dot(b)) - a.dot(b)).max(0.0)
}

fn oriented_shading_normal(p: &SurfacePoint, w: Vec3) -> Vec3 {
    if p.n_g.dot(w) < 0.0 {
        -p.n_s
    } else {
        p.n_s
    }
}

pub fn bxdf_eval(m: &Material, p: &SurfacePoint, wi: Vec3, wo: Vec3, transport: Transport) -> Rgb {
    let gi = p.n_g.dot(wi);
    let go = p.n_g.dot(wo);
    if gi * go <= 0.0 {
        return Rgb::BLACK;
    }
    let ns = oriented_shading_normal(p, wi);
    if ns.dot(wi) <= 0.0 || ns.dot(wo) <= 0.0 {
        return Rgb::BLACK;
    }
    let rho = match m.kind {
        MaterialKind::Lambert => m.albedo / PI,
        MaterialKind::Phong { exponent } => {
            let cos_a = mirror_cosine(ns, wi, wo);
            m.albedo * ((exponent + 2.0) / (2.0 * PI) * cos_a.powf(exponent))
        }
    };
    match transport {
        Transport::Importance => rho,
        Transport::Light => rho * shading_normal_correction(wi, wo, p.n_s, p.n_g),
    }
}

fn pdf_given(m: &Material, p: &SurfacePoint, from: Vec3, to: Vec3) -> f64 {
    let ns = oriented_shading_normal(p, from);
    match m.kind {
        MaterialKind::Lambert => ns.dot(to).max(0.0) / PI,
        MaterialKind::Phong { exponent } => {
            let cos_a = mirror_cosine(ns, from, to);
            (exponent + 1.0) / (2.0 * PI) * cos_a.powf(exponent)
        }
    }
}

pub fn bxdf_pdf(m: &Material, p: &SurfacePoint, wi: Vec3, wo: Vec3, dir: PdfDirection) -> f64 {
    match dir {
        PdfDirection::Forward => pdf_given(m, p, wi, wo),
        PdfDirection::Reverse => pdf_given(m, p, wo, wi),
    }
}

pub fn bxdf_sample<R: Rng + ?Sized>(m: &Material, p: &SurfacePoint, wi: Vec3, rng: &mut R, transport: Transport) -> Result<BxdfSample> {
    let ns = oriented_shading_normal(p, wi);
    for _ in 0..MAX_SAMPLE_RETRIES {
        let wo = match m.kind {
            MaterialKind::Lambert => Frame::from_normal(ns).to_world(cosine_hemisphere(rng.gen(), rng.gen())),
            MaterialKind::Phong { exponent } => {
                let r = wi.reflect(ns);
                let cos_a = rng.gen::<f64>().powf(1.0 / (exponent + 1.0));
                let sin_a = (1.0 - cos_a * cos_a).max(0.0).sqrt();
                let phi = 2.0 * PI * rng.gen::<f64>();
                Frame::from_normal(r).to_world(Vec3::new(sin_a * phi.cos(), sin_a * phi.sin(), cos_a))
            }
        };
        let wo = wo.normalized();
        let pdf = pdf_given(m, p, wi, wo);
        if pdf > 0.0 && pdf.is_finite() {
            return Ok(BxdfSample { wo, pdf, value: bxdf_eval(m, p, wi, wo, transport) });
        }
    }
    Err(Error::SamplingFailed(MAX_SAMPLE_RETRIES))
}
