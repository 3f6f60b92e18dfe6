use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::color::Rgb;
use crate::misweights::Strategy;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RgbSum([CompensatedSum; 3]);

impl RgbSum {
    pub fn add(&mut self, c: Rgb) {
        for (acc, v) in self.0.iter_mut().zip(c.to_array()) {
            acc.add(v);
        }
    }

    pub fn add_squared(&mut self, c: Rgb) {
        self.add(c * c);
    }

    pub fn value(&self) -> Rgb {
        Rgb::from_array(self.0.map(|a| a.value()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PixelAccumulator {
    pub eye_sum: RgbSum,
    pub eye_sq: RgbSum,
    /// Per-light-path splat totals reaching this pixel, and their squares.
    pub light_sum: RgbSum,
    pub light_sq: RgbSum,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StrategyMoments {
    pub sum: CompensatedSum,
    pub sum_sq: CompensatedSum,
    pub count: usize,
}

/// Moments of a finished render.
///
/// The pixel estimate is the eye-side sample mean plus the light image; the
/// light image at pixel `p` is `(w * h) / N` times the sum of what each of the
/// `N` light paths splatted onto `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorStats {
    pub width: usize,
    pub height: usize,
    pub spp: usize,
    pub light_paths: usize,
    pub pixels: Vec<PixelAccumulator>,
    pub strategies: BTreeMap<Strategy, StrategyMoments>,
    pub nan_count: usize,
    pub weighted_paths: usize,
    pub max_engine_deviation: f64,
}

fn sample_variance(sum: Rgb, sq: Rgb, n: usize) -> Rgb {
    if n < 2 {
        return Rgb::BLACK;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let v = (sq / nf - mean * mean) * (nf / (nf - 1.0));
    Rgb::new(v.r.max(0.0), v.g.max(0.0), v.b.max(0.0))
}

impl EstimatorStats {
    pub fn new(width: usize, height: usize, spp: usize, light_paths: usize) -> Self {
        Self {
            width,
            height,
            spp,
            light_paths,
            pixels: vec![PixelAccumulator::default(); width * height],
            strategies: BTreeMap::new(),
            nan_count: 0,
            weighted_paths: 0,
            max_engine_deviation: 0.0,
        }
    }

    fn light_scale(&self) -> f64 {
        if self.light_paths == 0 {
            0.0
        } else {
            (self.width * self.height) as f64 / self.light_paths as f64
        }
    }

    pub fn mean(&self, p: usize) -> Rgb {
        let a = &self.pixels[p];
        a.eye_sum.value() / self.spp as f64 + a.light_sum.value() * self.light_scale()
    }

    /// Squared standard error of [`EstimatorStats::mean`].
    pub fn variance_of_mean(&self, p: usize) -> Rgb {
        let a = &self.pixels[p];
        let ve = sample_variance(a.eye_sum.value(), a.eye_sq.value(), self.spp) / self.spp as f64;
        if self.light_paths == 0 {
            return ve;
        }
        let vl = sample_variance(a.light_sum.value(), a.light_sq.value(), self.light_paths);
        let wh = (self.width * self.height) as f64;
        ve + vl * (wh * wh / self.light_paths as f64)
    }

    pub fn std_error(&self, p: usize) -> Rgb {
        let v = self.variance_of_mean(p);
        Rgb::new(v.r.sqrt(), v.g.sqrt(), v.b.sqrt())
    }

    /// Second moment of an equivalent single-sample estimator.
    pub fn second_moment(&self, p: usize) -> Rgb {
        let m = self.mean(p);
        self.variance_of_mean(p) * self.spp as f64 + m * m
    }

    pub fn to_csv(&self) -> String {
        self.csv(false)
    }

    /// As [`EstimatorStats::to_csv`] with a trailing column holding the
    /// render-wide maximum relative deviation between the weight engines.
    pub fn to_csv_with_deviation(&self) -> String {
        self.csv(true)
    }

    fn csv(&self, deviation: bool) -> String {
        let mut s = String::from("pixel_i,pixel_j,mean_r,mean_g,mean_b,m2_r,m2_g,m2_b,n");
        s.push_str(if deviation { ",max_engine_deviation\n" } else { "\n" });
        for j in 0..self.height {
            for i in 0..self.width {
                let p = j * self.width + i;
                let (m, m2) = (self.mean(p), self.second_moment(p));
                let _ = write!(s, "{i},{j},{:e},{:e},{:e},{:e},{:e},{:e},{}", m.r, m.g, m.b, m2.r, m2.g, m2.b, self.spp);
                if deviation {
                    let _ = write!(s, ",{:e}", self.max_engine_deviation);
                }
                s.push('\n');
            }
        }
        s
    }

    /// Per-strategy luminance contribution to the image average.
    pub fn strategies_csv(&self) -> String {
        let denom = (self.width * self.height * self.spp) as f64;
        let mut s = String::from("s,t,technique,mean,m2,count\n");
        for (st, m) in &self.strategies {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{:e},{}",
                st.s,
                st.t,
                st.technique.as_str(),
                m.sum.value() / denom,
                m.sum_sq.value() / denom,
                m.count
            );
        }
        s
    }
}

/// Fraction of pixels whose means agree within `k` combined standard errors
/// in every channel.
pub fn agreement_fraction(a: &EstimatorStats, b: &EstimatorStats, k: f64) -> f64 {
    assert_eq!(a.pixels.len(), b.pixels.len());
    let n = a.pixels.len();
    let ok = (0..n)
        .filter(|&p| {
            let d = (a.mean(p) - b.mean(p)).to_array();
            let v = (a.variance_of_mean(p) + b.variance_of_mean(p)).to_array();
            d.iter().zip(v).all(|(d, v)| d.abs() <= k * v.sqrt())
        })
        .count();
    ok as f64 / n.max(1) as f64
}
