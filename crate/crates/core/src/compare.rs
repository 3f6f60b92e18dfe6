//! Matched-budget comparison of pt, lt and bpt against a high-sample bpt
//! reference.

use std::fmt::Write as _;

use crate::error::Result;
use crate::image::Image;
use crate::integrators::{render, EstimatorStats, Integrator, RenderConfig};
use crate::scene::Scene;

pub const DEFAULT_REFERENCE_SPP: usize = 65536;

/// Reference renders use a stream disjoint from the compared renders, so the
/// bpt error is not understated by shared samples.
pub fn reference_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub integrator: Integrator,
    pub mse: f64,
    pub stats: EstimatorStats,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub spp: usize,
    pub reference_spp: usize,
    pub reference: Image,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn mse(&self, integrator: Integrator) -> Option<f64> {
        self.rows.iter().find(|r| r.integrator == integrator).map(|r| r.mse)
    }

    /// Image rows carry the MSE; strategy rows carry the per-sample
    /// luminance mean, second moment and variance of each strategy.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,integrator,s,t,technique,mse,mean,m2,variance,count\n");
        for r in &self.rows {
            let name = integrator_name(r.integrator);
            let _ = writeln!(s, "image,{name},,,,{:e},,,,{}", r.mse, r.stats.spp);
            let denom = (r.stats.width * r.stats.height * r.stats.spp) as f64;
            for (st, m) in &r.stats.strategies {
                let mean = m.sum.value() / denom;
                let m2 = m.sum_sq.value() / denom;
                let _ = writeln!(
                    s,
                    "strategy,{name},{},{},{},,{mean:e},{m2:e},{:e},{}",
                    st.s,
                    st.t,
                    st.technique.as_str(),
                    (m2 - mean * mean).max(0.0),
                    m.count
                );
            }
        }
        s
    }
}

pub fn integrator_name(i: Integrator) -> &'static str {
    match i {
        Integrator::Pt => "pt",
        Integrator::Lt => "lt",
        Integrator::Bpt => "bpt",
        Integrator::Vcm => "vcm",
    }
}

/// Renders pt, lt and bpt at `spp` each and scores them against a bpt render
/// at `reference_spp`.
pub fn compare(scene: &Scene, spp: usize, seed: u64, reference_spp: usize, threads: Option<usize>) -> Result<CompareReport> {
    let mut cfg = RenderConfig::new(Integrator::Bpt, reference_spp, reference_seed(seed));
    cfg.threads = threads;
    let (reference, _) = render(scene, &cfg)?;
    let mut rows = Vec::new();
    for integrator in [Integrator::Pt, Integrator::Lt, Integrator::Bpt] {
        let mut cfg = RenderConfig::new(integrator, spp, seed);
        cfg.threads = threads;
        let (img, stats) = render(scene, &cfg)?;
        rows.push(CompareRow { integrator, mse: img.mse(&reference), stats });
    }
    Ok(CompareReport { spp, reference_spp, reference, rows })
}
