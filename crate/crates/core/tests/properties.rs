use proptest::prelude::*;

use misweave::color::Rgb;
use misweave::image::Image;
use misweave::integrators::CompensatedSum;
use misweave::misweights::{
    enumerate_strategies, path_pdf, path_throughput, relative_pdf, weight_probability, weight_throughput, Strategy,
};
use misweave::oracle::{brute_path_pdf, brute_throughput, furnace_reference, random_valid_path};
use misweave::pathwalk::{full_path_from_points, FullPath, WrongWeights};
use misweave::rng::{sampler, Stream};
use misweave::scene::{builtin_scene, Scene, SurfacePoint};
use misweave::verification::Combination;

fn scene_for(idx: usize, combo: usize) -> Scene {
    let name = ["furnace", "box", "smalllight"][idx];
    let c = Combination { rr: combo & 1 != 0, shading: combo & 2 != 0, random_connect: combo & 4 != 0 };
    c.apply(&builtin_scene(name).unwrap())
}

fn sample_path(scene: &Scene, seed: u64, len: usize) -> Vec<SurfacePoint> {
    let len = len.clamp(2, scene.options.max_depth.min(8));
    random_valid_path(scene, &mut sampler(seed, 0, 0, Stream::Verify), len).unwrap()
}

/// Strategies of `set` able to produce the path, each with the path built for it.
fn feasible(scene: &Scene, pts: &[SurfacePoint], set: &[Strategy]) -> Vec<(Strategy, FullPath)> {
    set.iter()
        .filter_map(|st| {
            let p = full_path_from_points(scene, pts, st, WrongWeights::None).ok()?;
            (path_pdf(&p, st) > 0.0 && path_throughput(&p, st) > 0.0).then_some((*st, p))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn weights_partition_unity_and_engines_agree(idx in 0usize..3, combo in 0usize..8, seed in any::<u64>(), len in 2usize..9) {
        let scene = scene_for(idx, combo);
        let pts = sample_path(&scene, seed, len);
        for merging in [false, true] {
            let set = enumerate_strategies(pts.len(), merging);
            let ev = feasible(&scene, &pts, &set);
            prop_assert!(!ev.is_empty());
            let mut sum = 0.0;
            for (st, p) in &ev {
                let wp = weight_probability(p, st, &set).unwrap();
                let wt = weight_throughput(p, st, &set).unwrap();
                prop_assert!((wp - wt).abs() <= 1e-9 * wp.max(wt), "{wp} vs {wt}");
                prop_assert!((0.0..=1.0 + 1e-12).contains(&wp));
                sum += wp;
            }
            prop_assert!((sum - 1.0).abs() <= 1e-9, "sum {sum}");
        }
    }

    #[test]
    fn relative_densities_are_antisymmetric(idx in 0usize..3, combo in 0usize..8, seed in any::<u64>(), len in 2usize..9) {
        let scene = scene_for(idx, combo);
        let pts = sample_path(&scene, seed, len);
        let ev = feasible(&scene, &pts, &enumerate_strategies(pts.len(), true));
        let (a, path) = &ev[0];
        for (b, _) in &ev {
            let r = relative_pdf(path, a, b) * relative_pdf(path, b, a);
            prop_assert!((r - 1.0).abs() <= 1e-12, "{r}");
        }
    }

    #[test]
    fn brute_force_matches_production(idx in 0usize..3, combo in 0usize..8, seed in any::<u64>(), len in 2usize..9) {
        let scene = scene_for(idx, combo);
        let pts = sample_path(&scene, seed, len);
        for (st, p) in feasible(&scene, &pts, &enumerate_strategies(pts.len(), true)) {
            let (a, b) = (path_pdf(&p, &st), brute_path_pdf(&scene, &pts, &st).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{st:?} pdf {a} vs {b}");
            let (a, b) = (path_throughput(&p, &st), brute_throughput(&scene, &pts, &st).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{st:?} S {a} vs {b}");
        }
    }

    #[test]
    fn weights_ignore_emission_scale(seed in any::<u64>(), len in 2usize..9, k in 0.01f64..100.0) {
        let scene = builtin_scene("box").unwrap();
        let pts = sample_path(&scene, seed, len);
        let set = enumerate_strategies(pts.len(), true);
        let scaled = scene.scaled_emission(k);
        for (st, p) in feasible(&scene, &pts, &set) {
            let q = full_path_from_points(&scaled, &pts, &st, WrongWeights::None).unwrap();
            let (a, b) = (weight_throughput(&p, &st, &set).unwrap(), weight_throughput(&q, &st, &set).unwrap());
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn merge_densities_scale_with_query_area(seed in any::<u64>(), len in 3usize..9, scale in 0.25f64..4.0) {
        let scene = builtin_scene("box").unwrap();
        let pts = sample_path(&scene, seed, len);
        let mut o = scene.options;
        o.merge_radius = Some(scene.merge_radius() * scale);
        let wide = scene.with_options(o);
        for st in enumerate_strategies(pts.len(), true).into_iter().filter(Strategy::is_merge) {
            let a = path_pdf(&full_path_from_points(&scene, &pts, &st, WrongWeights::None).unwrap(), &st);
            let b = path_pdf(&full_path_from_points(&wide, &pts, &st, WrongWeights::None).unwrap(), &st);
            if a > 0.0 {
                prop_assert!((b / a - scale * scale).abs() <= 1e-12 * scale * scale);
            }
        }
    }

    #[test]
    fn furnace_reference_is_the_geometric_series(albedo in 0.0f64..0.999, le in 0.0f64..10.0) {
        let v = furnace_reference(albedo, le).unwrap();
        prop_assert!((v * (1.0 - albedo) - le).abs() <= 1e-12 * le.max(1.0));
    }

    #[test]
    fn compensated_sum_is_order_independent(xs in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let (mut a, mut b) = (CompensatedSum::default(), CompensatedSum::default());
        xs.iter().for_each(|&x| a.add(x));
        xs.iter().rev().for_each(|&x| b.add(x));
        prop_assert!((a.value() - b.value()).abs() <= 1e-9);
    }

    #[test]
    fn pfm_round_trips(w in 1usize..6, h in 1usize..6, vals in prop::collection::vec(-1e3f32..1e3, 90)) {
        let mut img = Image::new(w, h);
        for (k, p) in img.pixels.iter_mut().enumerate() {
            *p = Rgb::new(vals[3 * k] as f64, vals[3 * k + 1] as f64, vals[3 * k + 2] as f64);
        }
        prop_assert_eq!(Image::decode_pfm(&img.encode_pfm()).unwrap(), img);
    }
}

#[test]
fn furnace_reference_rejects_unit_albedo() {
    assert!(furnace_reference(1.0, 1.0).is_err());
    assert_eq!(furnace_reference(0.5, 1.0).unwrap(), 2.0);
    assert_eq!(furnace_reference(0.0, 1.0).unwrap(), 1.0);
    assert!((furnace_reference(0.9, 2.0).unwrap() - 20.0).abs() < 1e-12);
}
