use std::collections::HashMap;

use crate::pathwalk::SubPath;
use crate::vecmath::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photon {
    pub path: usize,
    pub vertex: usize,
    pub position: Vec3,
    pub shape: Option<usize>,
}

/// Uniform hash grid with cell size equal to the query radius.
#[derive(Debug, Clone)]
pub struct PhotonGrid {
    radius: f64,
    photons: Vec<Photon>,
    cells: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl PhotonGrid {
    /// Stores every vertex of every light sub-path.
    pub fn build(paths: &[SubPath], radius: f64) -> Self {
        let mut grid = Self { radius, photons: Vec::new(), cells: HashMap::new() };
        for (pi, p) in paths.iter().enumerate() {
            for (vi, v) in p.vertices.iter().enumerate() {
                let ph = Photon { path: pi, vertex: vi, position: v.point.position, shape: v.point.shape };
                let idx = grid.photons.len();
                grid.cells.entry(grid.cell(ph.position)).or_default().push(idx);
                grid.photons.push(ph);
            }
        }
        grid
    }

    fn cell(&self, p: Vec3) -> (i64, i64, i64) {
        let f = |x: f64| (x / self.radius).floor() as i64;
        (f(p.x), f(p.y), f(p.z))
    }

    pub fn len(&self) -> usize {
        self.photons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.photons.is_empty()
    }

    /// Photons strictly within the radius of `p`, in a fixed order.
    pub fn query(&self, p: Vec3, mut visit: impl FnMut(&Photon)) {
        let (cx, cy, cz) = self.cell(p);
        let r2 = self.radius * self.radius;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(ids) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) else { continue };
                    for &i in ids {
                        let ph = &self.photons[i];
                        if (ph.position - p).length_squared() < r2 {
                            visit(ph);
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Rgb;
    use crate::pathwalk::{Origin, PathVertex};
    use crate::scene::SurfacePoint;

    fn path_at(points: &[Vec3]) -> SubPath {
        let vertices = points
            .iter()
            .map(|&position| PathVertex {
                point: SurfacePoint { position, ..SurfacePoint::default() },
                w_in: Vec3::ZERO,
                pdf_fwd_area: 1.0,
                pdf_sa: 0.0,
                f_fwd: Rgb::BLACK,
                rr_prob: 1.0,
                partial_throughput: Rgb::WHITE,
                is_endpoint: false,
            })
            .collect();
        SubPath { origin: Origin::Emitter, vertices, endpoint_pdf: 1.0, endpoint_value: Rgb::WHITE }
    }

    #[test]
    fn query_matches_brute_force() {
        let pts: Vec<Vec3> = (0..200)
            .map(|i| {
                let f = i as f64;
                Vec3::new((f * 0.37).sin(), (f * 0.11).cos(), (f * 0.73).sin() * 0.5)
            })
            .collect();
        let grid = PhotonGrid::build(&[path_at(&pts)], 0.2);
        assert_eq!(grid.len(), 200);
        let q = Vec3::new(0.1, 0.2, 0.0);
        let mut found = Vec::new();
        grid.query(q, |ph| found.push(ph.vertex));
        found.sort();
        let expect: Vec<usize> = (0..200).filter(|&i| (pts[i] - q).length_squared() < 0.04).collect();
        assert_eq!(found, expect);
    }

    #[test]
    fn empty_neighbourhood_yields_nothing() {
        let grid = PhotonGrid::build(&[path_at(&[Vec3::new(5.0, 5.0, 5.0)])], 0.1);
        let mut n = 0;
        grid.query(Vec3::ZERO, |_| n += 1);
        assert_eq!(n, 0);
    }
}
