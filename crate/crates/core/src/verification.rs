//! Machine checks of the weight engines over random paths.

use std::fmt::Write as _;

use crate::error::Result;
use crate::misweights::{
    enumerate_strategies, path_pdf, path_throughput, relative_difference, relative_pdf, weight_probability, weight_throughput, Strategy,
};
use crate::oracle::{brute_path_pdf, brute_throughput, random_valid_path_counted};
use crate::pathwalk::{full_path_from_points, FullPath, WrongWeights};
use crate::rng::{sampler, Stream};
use crate::scene::{Scene, SceneOptions, SurfacePoint};

pub const EQUIVALENCE_TOL: f64 = 1e-9;
pub const PARTITION_TOL: f64 = 1e-9;
pub const RATIO_TOL: f64 = 1e-12;
pub const MERGE_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-12;
/// Deviation counted as a visible violation by the falsifiability checks.
pub const VIOLATION_THRESHOLD: f64 = 1e-3;

pub const RR_Q_ON: f64 = 0.8;
pub const RR_DEPTH_ON: usize = 3;
pub const MAX_VERIFY_LEN: usize = 8;

/// Option axes; `None` enumerates both settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub rr: Option<bool>,
    pub shading: Option<bool>,
    pub random_connect: Option<bool>,
    pub wrong_weights: WrongWeights,
}

fn on_off(v: &str) -> std::result::Result<bool, String> {
    match v {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(format!("expected on|off, got '{v}'")),
    }
}

pub fn parse_wrong_weights(v: &str) -> std::result::Result<WrongWeights, String> {
    match v {
        "none" => Ok(WrongWeights::None),
        "omit_rr" => Ok(WrongWeights::OmitRr),
        "omit_shading_correction" => Ok(WrongWeights::OmitShadingCorrection),
        _ => Err(format!("unknown wrong-weights mode '{v}'")),
    }
}

impl VerifyOptions {
    /// Parses `key=value` tokens; commas also separate tokens.
    pub fn parse<S: AsRef<str>>(tokens: &[S]) -> std::result::Result<Self, String> {
        let mut o = Self::default();
        for tok in tokens.iter().flat_map(|t| t.as_ref().split(',').map(str::to_owned).collect::<Vec<_>>()) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let (k, v) = tok.split_once('=').ok_or_else(|| format!("option '{tok}' is not key=value"))?;
            match k.replace('-', "_").as_str() {
                "rr" => o.rr = Some(on_off(v)?),
                "shading" | "shading_normals" => o.shading = Some(on_off(v)?),
                "random_connect" => o.random_connect = Some(on_off(v)?),
                "wrong_weights" => o.wrong_weights = parse_wrong_weights(v)?,
                _ => return Err(format!("unknown option '{k}'")),
            }
        }
        Ok(o)
    }

    pub fn combinations(&self) -> Vec<Combination> {
        let axis = |v: Option<bool>| v.map_or(vec![false, true], |b| vec![b]);
        let mut out = Vec::new();
        for rr in axis(self.rr) {
            for shading in axis(self.shading) {
                for random_connect in axis(self.random_connect) {
                    out.push(Combination { rr, shading, random_connect });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Combination {
    pub rr: bool,
    pub shading: bool,
    pub random_connect: bool,
}

impl Combination {
    pub fn apply(&self, scene: &Scene) -> Scene {
        let base = if self.shading { scene.clone() } else { scene.without_shading_normals() };
        let mut o: SceneOptions = base.options;
        if self.rr {
            o.rr_q = RR_Q_ON;
            o.rr_depth = RR_DEPTH_ON;
        } else {
            o.rr_q = 1.0;
        }
        o.random_connect = self.random_connect;
        base.with_options(o)
    }

    pub fn label(&self) -> String {
        let f = |b: bool| if b { "on" } else { "off" };
        format!("rr={} shading={} random_connect={}", f(self.rr), f(self.shading), f(self.random_connect))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub n_cases: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, n_cases: 0, max_rel_err: 0.0, tolerance }
    }

    fn record(&mut self, err: f64) {
        self.n_cases += 1;
        if !(err <= self.max_rel_err) {
            self.max_rel_err = if err.is_nan() { f64::INFINITY } else { err.max(self.max_rel_err) };
        }
    }

    pub fn pass(&self) -> bool {
        self.max_rel_err <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DumpRow {
    pub path_id: usize,
    pub strategy: Strategy,
    pub pdf_path: f64,
    pub throughput: f64,
    pub w_prob: Option<f64>,
    pub w_thru: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    pub n_paths: usize,
    pub attempts: usize,
    /// Paths whose own strategy set includes a roulette factor.
    pub rr_affected: usize,
    /// Of those, paths whose weight sum misses 1 by more than [`VIOLATION_THRESHOLD`].
    pub rr_violations: usize,
    /// Paths with an engine disagreement above [`VIOLATION_THRESHOLD`].
    pub equivalence_breaks: usize,
    pub skipped: usize,
    pub dump: Vec<DumpRow>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(SuiteResult::pass)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.n_paths as f64 / self.attempts as f64
        }
    }

    pub fn rr_violation_fraction(&self) -> f64 {
        if self.rr_affected == 0 {
            0.0
        } else {
            self.rr_violations as f64 / self.rr_affected as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("test,n_cases,max_rel_err,pass\n");
        for r in &self.suites {
            let _ = writeln!(s, "{},{},{:e},{}", r.name, r.n_cases, r.max_rel_err, r.pass());
        }
        s
    }

    pub fn dump_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:e}"));
        let mut s = String::from("path_id,s,t,technique,pdf_path,S,w_prob,w_thru,abs_rel_diff\n");
        for r in &self.dump {
            let diff = match (r.w_prob, r.w_thru) {
                (Some(a), Some(b)) => format!("{:e}", relative_difference(a, b)),
                _ => String::new(),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{:e},{:e},{},{},{}",
                r.path_id,
                r.strategy.s,
                r.strategy.t,
                r.strategy.technique.as_str(),
                r.pdf_path,
                r.throughput,
                opt(r.w_prob),
                opt(r.w_thru),
                diff
            );
        }
        s
    }
}

const SUITES: [(&str, f64); 9] = [
    ("engine_equivalence", EQUIVALENCE_TOL),
    ("partition_connect", PARTITION_TOL),
    ("partition_connect_merge", PARTITION_TOL),
    ("ratio_quotient", RATIO_TOL),
    ("ratio_antisymmetry", RATIO_TOL),
    ("scale_invariance", 0.0),
    ("merge_factor", MERGE_TOL),
    ("oracle_pdf", ORACLE_TOL),
    ("oracle_throughput", ORACLE_TOL),
];

struct Suites([SuiteResult; 9]);

impl Suites {
    fn new() -> Self {
        Self(SUITES.map(|(n, t)| SuiteResult::new(n, t)))
    }

    fn get(&mut self, name: &str) -> &mut SuiteResult {
        self.0.iter_mut().find(|s| s.name == name).expect("known suite")
    }
}

struct Evaluated {
    strategy: Strategy,
    path: FullPath,
    pdf: f64,
    thru: f64,
}

fn evaluate(scene: &Scene, pts: &[SurfacePoint], set: &[Strategy], wrong: WrongWeights) -> Result<Vec<Evaluated>> {
    set.iter()
        .map(|st| {
            let path = full_path_from_points(scene, pts, st, wrong)?;
            Ok(Evaluated { strategy: *st, pdf: path_pdf(&path, st), thru: path_throughput(&path, st), path })
        })
        .collect()
}

/// Probability-engine weights of each strategy on the path it sampled.
fn own_weights(ev: &[Evaluated], set: &[Strategy]) -> Vec<Option<f64>> {
    ev.iter().map(|e| if set.contains(&e.strategy) { weight_probability(&e.path, &e.strategy, set).ok() } else { None }).collect()
}

fn weight_sum(w: &[Option<f64>]) -> f64 {
    w.iter().flatten().sum()
}

/// Runs every suite on `n_paths` random paths per option combination.
pub fn run_verify(scene: &Scene, n_paths: usize, seed: u64, opts: &VerifyOptions, dump: bool) -> Result<VerifyReport> {
    let mut suites = Suites::new();
    let mut report = VerifyReport {
        suites: Vec::new(),
        n_paths: 0,
        attempts: 0,
        rr_affected: 0,
        rr_violations: 0,
        equivalence_breaks: 0,
        skipped: 0,
        dump: Vec::new(),
    };
    let wrong = opts.wrong_weights;
    for (ci, combo) in opts.combinations().iter().enumerate() {
        let sc = combo.apply(scene);
        let scaled = sc.scaled_emission(4.0);
        let mut wide_opts = sc.options;
        wide_opts.merge_radius = Some(2.0 * sc.merge_radius());
        let wide = sc.with_options(wide_opts);
        let max_len = sc.options.max_depth.min(MAX_VERIFY_LEN);
        let mut rng = sampler(seed, ci as u64, 0, Stream::Verify);
        for n in 0..n_paths {
            let len = 2 + n % (max_len - 1);
            let (pts, attempts) = random_valid_path_counted(&sc, &mut rng, len)?;
            report.attempts += attempts;
            report.n_paths += 1;
            let path_id = report.n_paths - 1;
            if verify_path(&sc, &scaled, &wide, &pts, wrong, &mut suites, &mut report, dump.then_some(path_id)).is_err() {
                report.skipped += 1;
            }
        }
    }
    report.suites = suites.0.to_vec();
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn verify_path(
    sc: &Scene,
    scaled: &Scene,
    wide: &Scene,
    pts: &[SurfacePoint],
    wrong: WrongWeights,
    suites: &mut Suites,
    report: &mut VerifyReport,
    dump_id: Option<usize>,
) -> Result<()> {
    let k = pts.len();
    let conn = enumerate_strategies(k, false);
    let all = enumerate_strategies(k, true);
    let ev = evaluate(sc, pts, &all, wrong)?;

    let mut worst_equiv: f64 = 0.0;
    for set in [&conn, &all] {
        for e in ev.iter().filter(|e| set.contains(&e.strategy) && e.pdf > 0.0 && e.thru > 0.0) {
            let wp = weight_probability(&e.path, &e.strategy, set)?;
            let wt = weight_throughput(&e.path, &e.strategy, set)?;
            let d = relative_difference(wp, wt);
            worst_equiv = worst_equiv.max(d);
            suites.get("engine_equivalence").record(d);
        }
    }
    if worst_equiv > VIOLATION_THRESHOLD {
        report.equivalence_breaks += 1;
    }

    let w_conn = own_weights(&ev, &conn);
    let w_all = own_weights(&ev, &all);
    let dev_conn = (weight_sum(&w_conn) - 1.0).abs();
    let dev_all = (weight_sum(&w_all) - 1.0).abs();
    suites.get("partition_connect").record(dev_conn);
    suites.get("partition_connect_merge").record(dev_all);
    if sc.options.roulette_active() && k >= sc.options.rr_depth + 2 {
        report.rr_affected += 1;
        if dev_conn.max(dev_all) > VIOLATION_THRESHOLD {
            report.rr_violations += 1;
        }
    }

    // Densities of one annotated path, compared pairwise.
    let base = &ev[k - 1].path;
    for a in &conn {
        let pa = path_pdf(base, a);
        for b in &conn {
            let pb = path_pdf(base, b);
            if pa > 0.0 && pb > 0.0 {
                suites.get("ratio_quotient").record(relative_difference(relative_pdf(base, a, b) * pa, pb));
                let r = relative_pdf(base, a, b) * relative_pdf(base, b, a);
                if r.is_finite() {
                    suites.get("ratio_antisymmetry").record((r - 1.0).abs());
                }
            }
        }
    }

    let ev4 = evaluate(scaled, pts, &all, wrong)?;
    for (e, e4) in ev.iter().zip(&ev4) {
        if e.pdf > 0.0 && e.thru > 0.0 {
            for set in [&conn, &all] {
                if !set.contains(&e.strategy) {
                    continue;
                }
                let same = weight_probability(&e.path, &e.strategy, set)? == weight_probability(&e4.path, &e4.strategy, set)?
                    && weight_throughput(&e.path, &e.strategy, set)? == weight_throughput(&e4.path, &e4.strategy, set)?;
                suites.get("scale_invariance").record(if same { 0.0 } else { 1.0 });
            }
        }
    }

    let ev2 = evaluate(wide, pts, &all, wrong)?;
    for (e, e2) in ev.iter().zip(&ev2).filter(|(e, _)| e.strategy.is_merge() && e.pdf > 0.0) {
        suites.get("merge_factor").record(relative_difference(e2.pdf / e.pdf, 4.0));
    }
    let w_wide = own_weights(&ev2, &all);
    suites.get("partition_connect_merge").record((weight_sum(&w_wide) - 1.0).abs());

    for e in &ev {
        let bp = brute_path_pdf(sc, pts, &e.strategy)?;
        suites.get("oracle_pdf").record(relative_difference(bp, e.pdf));
        let bt = brute_throughput(sc, pts, &e.strategy)?;
        suites.get("oracle_throughput").record(relative_difference(bt, e.thru));
    }

    if let Some(path_id) = dump_id {
        for (e, w) in ev.iter().zip(&w_all) {
            let w_thru = if e.pdf > 0.0 { weight_throughput(&e.path, &e.strategy, &all).ok() } else { None };
            report.dump.push(DumpRow { path_id, strategy: e.strategy, pdf_path: e.pdf, throughput: e.thru, w_prob: *w, w_thru });
        }
    }
    Ok(())
}
