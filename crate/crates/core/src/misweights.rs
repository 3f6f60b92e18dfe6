//! Balance-heuristic weights computed two ways: from ratios of path
//! densities and from ratios of path throughputs.
//!
//! Both engines read the same [`FullPath`]. With vertices `x_0 .. x_{k-1}`
//! (camera first), a connect strategy `(s, t)` has `s + t = k`; a merge
//! strategy `(s, t)` joins eye vertex `x_{s-1}` with the `t`-th light vertex
//! landing nearby, so `k = s + t - 1`.

use std::f64::consts::PI;

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::pathwalk::FullPath;
use crate::vecmath::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Technique {
    Connect,
    Merge,
}

impl Technique {
    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Connect => "connect",
            Technique::Merge => "merge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    pub s: usize,
    pub t: usize,
    pub technique: Technique,
}

impl Strategy {
    pub const fn connect(s: usize, t: usize) -> Self {
        Self { s, t, technique: Technique::Connect }
    }

    pub const fn merge(s: usize, t: usize) -> Self {
        Self { s, t, technique: Technique::Merge }
    }

    pub fn path_len(&self) -> usize {
        match self.technique {
            Technique::Connect => self.s + self.t,
            Technique::Merge => self.s + self.t - 1,
        }
    }

    pub fn is_merge(&self) -> bool {
        self.technique == Technique::Merge
    }
}

pub fn enumerate_strategies(path_len: usize, merging: bool) -> Vec<Strategy> {
    let mut out: Vec<Strategy> = (1..=path_len).map(|s| Strategy::connect(s, path_len - s)).collect();
    if merging {
        out.extend((2..=path_len).map(|s| Strategy::merge(s, path_len - s + 1)));
    }
    out
}

/// Adjoint factor for light travelling along `-w_in` into the surface and
/// leaving along `w_out`. Grazing configurations give 0.
pub fn shading_normal_correction(w_in: Vec3, w_out: Vec3, n_s: Vec3, n_g: Vec3) -> f64 {
    let den = n_g.dot(w_in).abs() * n_s.dot(w_out).abs();
    if den == 0.0 {
        return 0.0;
    }
    n_s.dot(w_in).abs() * n_g.dot(w_out).abs() / den
}

pub fn merge_pdf_factor(r: f64) -> f64 {
    PI * r * r
}

pub fn random_connection_factor(mean_len: f64) -> f64 {
    1.0 / mean_len
}

/// Number of light sub-path lengths a random connection chooses from at
/// eye vertex count `s`: every `t` in `2..=max_depth - s`.
pub fn random_connection_choices(max_depth: usize, s: usize) -> usize {
    max_depth.saturating_sub(s + 1)
}

fn uses_random_connection(path: &FullPath, st: &Strategy) -> bool {
    path.options.random_connect && st.technique == Technique::Connect && st.s >= 2 && st.t >= 2
}

/// Selection probability folded into a connect strategy's density.
fn selection(path: &FullPath, st: &Strategy) -> f64 {
    if uses_random_connection(path, st) {
        let l = random_connection_choices(path.options.max_depth, st.s);
        if l == 0 {
            return 0.0;
        }
        random_connection_factor(l as f64)
    } else {
        1.0
    }
}

fn feasible(path: &FullPath, st: &Strategy) -> bool {
    let k = path.len();
    st.s >= 1
        && st.path_len() == k
        && k <= path.options.max_depth
        && match st.technique {
            Technique::Connect => true,
            Technique::Merge => st.s >= 2 && st.t >= 1,
        }
}

/// Density of the photon landing on `x_{s-1}` in true area measure.
fn merge_arrival(path: &FullPath, s: usize) -> f64 {
    let k = path.len();
    let v = &path.vertices[s - 1];
    if s == k {
        return v.pdf_light_area_raw;
    }
    let w = (path.vertices[s].point.position - v.point.position).normalized();
    let cs = v.point.n_s.abs_dot(w);
    if cs == 0.0 {
        return 0.0;
    }
    v.pdf_light_area_raw * v.point.n_g.abs_dot(w) / cs
}

/// Factor a strategy multiplies onto the plain connect density with the
/// same number of eye vertices.
fn extra_factor(path: &FullPath, st: &Strategy) -> f64 {
    match st.technique {
        Technique::Connect => selection(path, st),
        Technique::Merge => merge_arrival(path, st.s) * merge_pdf_factor(path.merge_radius),
    }
}

fn plain_connect_pdf(path: &FullPath, s: usize) -> f64 {
    let v = &path.vertices;
    let eye: f64 = v[1..s].iter().map(|x| x.pdf_eye_area).product();
    let light: f64 = v[s..].iter().map(|x| x.pdf_light_area()).product();
    eye * light
}

pub fn path_pdf(path: &FullPath, st: &Strategy) -> f64 {
    if !feasible(path, st) {
        return 0.0;
    }
    plain_connect_pdf(path, st.s) * extra_factor(path, st)
}

/// `p_b / p_a` for plain connect densities with `s_a` and `s_b` eye vertices.
fn telescope(path: &FullPath, s_a: usize, s_b: usize) -> f64 {
    let v = &path.vertices;
    let mut r = 1.0;
    if s_b < s_a {
        for x in &v[s_b..s_a] {
            if x.pdf_eye_area == 0.0 {
                return f64::INFINITY;
            }
            r *= x.pdf_light_area() / x.pdf_eye_area;
        }
    } else {
        for x in &v[s_a..s_b] {
            let den = x.pdf_light_area();
            if den == 0.0 {
                return f64::INFINITY;
            }
            r *= x.pdf_eye_area / den;
        }
    }
    r
}

/// `path_pdf(b) / path_pdf(a)` for connect strategies, by telescoping; +inf
/// when `a` cannot produce the path.
pub fn pdf_ratio(path: &FullPath, a: &Strategy, b: &Strategy) -> f64 {
    relative_pdf(path, a, b)
}

/// [`pdf_ratio`] extended to merge strategies.
pub fn relative_pdf(path: &FullPath, a: &Strategy, b: &Strategy) -> f64 {
    if a == b {
        return 1.0;
    }
    if !feasible(path, b) {
        return 0.0;
    }
    let ea = extra_factor(path, a);
    if !feasible(path, a) || ea == 0.0 {
        return f64::INFINITY;
    }
    let r = telescope(path, a.s, b.s);
    if r.is_infinite() {
        return r;
    }
    r * extra_factor(path, b) / ea
}

fn eye_prefix(path: &FullPath, s: usize) -> Rgb {
    let mut acc = Rgb::WHITE;
    for x in &path.vertices[..s - 1] {
        acc = acc * x.f_eye / (x.pdf_eye_sa * x.rr_eye);
    }
    acc
}

/// Throughput of light vertices `x_s .. x_{k-1}`, up to and including `x_s`.
fn light_prefix(path: &FullPath, s: usize) -> Rgb {
    let v = &path.vertices;
    let k = v.len();
    let mut acc = path.emitted / v[k - 1].pdf_light_area_raw;
    for x in v[s + 1..].iter().rev() {
        acc = acc * x.f_light / (x.pdf_light_sa * x.rr_light);
    }
    acc
}

pub fn path_throughput_rgb(path: &FullPath, st: &Strategy) -> Rgb {
    if !feasible(path, st) {
        return Rgb::BLACK;
    }
    let v = &path.vertices;
    let k = v.len();
    let s = st.s;
    let value = match st.technique {
        Technique::Connect if st.t == 0 => eye_prefix(path, k) * path.emitted,
        Technique::Connect => {
            let e = &v[s - 1];
            let conn = e.f_eye * v[s].f_light / e.dist2_next;
            eye_prefix(path, s) * conn * light_prefix(path, s) / selection(path, st)
        }
        Technique::Merge if s == k => {
            eye_prefix(path, k) * path.emitted / (v[k - 1].pdf_light_area_raw * merge_pdf_factor(path.merge_radius))
        }
        Technique::Merge => {
            let e = &v[s - 1];
            let w = (v[s].point.position - e.point.position).normalized();
            let photon = light_prefix(path, s) * v[s].f_light / (v[s].pdf_light_sa * v[s].rr_light);
            let kernel = e.f_eye / (e.point.n_g.abs_dot(w) * merge_pdf_factor(path.merge_radius));
            eye_prefix(path, s) * kernel * photon
        }
    };
    if value.is_finite() {
        value
    } else {
        Rgb::BLACK
    }
}

/// Luminance of [`path_throughput_rgb`].
pub fn path_throughput(path: &FullPath, st: &Strategy) -> f64 {
    path_throughput_rgb(path, st).luminance()
}

pub fn weight_probability(path: &FullPath, a: &Strategy, set: &[Strategy]) -> Result<f64> {
    if !(path_pdf(path, a) > 0.0) {
        return Err(Error::ImpossibleStrategy);
    }
    let mut sum = 0.0;
    for b in set.iter().filter(|b| *b != a) {
        let r = relative_pdf(path, a, b);
        if r.is_finite() {
            sum += r;
        }
    }
    Ok(1.0 / (1.0 + sum))
}

pub fn weight_throughput(path: &FullPath, a: &Strategy, set: &[Strategy]) -> Result<f64> {
    let sa = path_throughput(path, a);
    if !(sa > 0.0) || !sa.is_finite() {
        return Err(Error::ZeroThroughput);
    }
    let mut sum = 0.0;
    for b in set.iter().filter(|b| *b != a) {
        let sb = path_throughput(path, b);
        if sb > 0.0 && sb.is_finite() {
            sum += sa / sb;
        }
    }
    Ok(1.0 / (1.0 + sum))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyWeight {
    pub strategy: Strategy,
    pub pdf_path: f64,
    pub throughput: f64,
    /// `None` when the strategy cannot produce the path.
    pub weight_prob: Option<f64>,
    pub weight_thru: Option<f64>,
}

impl StrategyWeight {
    pub fn rel_diff(&self) -> f64 {
        match (self.weight_prob, self.weight_thru) {
            (Some(p), Some(t)) => relative_difference(p, t),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightBreakdown {
    pub entries: Vec<StrategyWeight>,
}

impl WeightBreakdown {
    /// Evaluates every strategy of `set` on one annotated path.
    pub fn evaluate(path: &FullPath, set: &[Strategy]) -> Self {
        let entries = set
            .iter()
            .map(|st| StrategyWeight {
                strategy: *st,
                pdf_path: path_pdf(path, st),
                throughput: path_throughput(path, st),
                weight_prob: weight_probability(path, st, set).ok(),
                weight_thru: weight_throughput(path, st, set).ok(),
            })
            .collect();
        Self { entries }
    }

    pub fn get(&self, st: &Strategy) -> Option<&StrategyWeight> {
        self.entries.iter().find(|e| e.strategy == *st)
    }

    pub fn max_rel_diff(&self) -> f64 {
        self.entries.iter().map(StrategyWeight::rel_diff).fold(0.0, f64::max)
    }
}

/// `|a - b| / max(|a|, |b|)`, 0 when both are 0.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_strategies(2, false), vec![Strategy::connect(1, 1), Strategy::connect(2, 0)]);
        assert_eq!(enumerate_strategies(6, false).len(), 6);
        assert!(enumerate_strategies(6, false).contains(&Strategy::connect(3, 3)));
        let m = enumerate_strategies(3, true);
        assert_eq!(m.iter().filter(|s| s.is_merge()).count(), 2);
        assert_eq!(m.len(), 5);
        for st in &m {
            assert_eq!(st.path_len(), 3);
            if st.is_merge() {
                assert!(st.s >= 2 && st.t >= 1);
            }
        }
    }

    #[test]
    fn correction_factor_examples() {
        let n = Vec3::new(0.0, 0.0, 1.0);
        let a = Vec3::new(0.3, 0.1, 0.9).normalized();
        let b = Vec3::new(-0.5, 0.2, 0.6).normalized();
        assert_eq!(shading_normal_correction(a, b, n, n), 1.0);
        let ns = Vec3::new(0.2, -0.1, 1.0).normalized();
        let ab = shading_normal_correction(a, b, ns, n);
        let ba = shading_normal_correction(b, a, ns, n);
        assert!((ab * ba - 1.0).abs() < 1e-15);
        assert_eq!(shading_normal_correction(Vec3::new(1.0, 0.0, 0.0), b, ns, n), 0.0);
    }

    #[test]
    fn factor_examples() {
        assert!((merge_pdf_factor(1.0) - PI).abs() < 1e-15);
        assert!((merge_pdf_factor(0.2) * 4.0 - merge_pdf_factor(0.4)).abs() < 1e-15);
        assert_eq!(random_connection_factor(1.0), 1.0);
        assert_eq!(random_connection_factor(4.0), 0.25);
        assert_eq!(random_connection_choices(8, 2), 5);
        assert_eq!(random_connection_choices(3, 2), 0);
    }

    #[test]
    fn relative_difference_is_symmetric() {
        assert_eq!(relative_difference(0.0, 0.0), 0.0);
        assert_eq!(relative_difference(1.0, 0.5), relative_difference(0.5, 1.0));
    }
}
