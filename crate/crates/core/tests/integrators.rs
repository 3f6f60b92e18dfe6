use std::f64::consts::PI;

use misweave::color::Rgb;
use misweave::integrators::{connect_subpaths, connection_value, merge_at_vertex, render, Integrator, PhotonGrid, RenderConfig};
use misweave::pathwalk::{eye_subpath_through, generate_light_subpath, light_subpath_through};
use misweave::rng::{sampler, Stream};
use misweave::scene::{builtin_scene, parse_scene, Scene};
use misweave::vecmath::Vec3;

const ALL: [Integrator; 4] = [Integrator::Pt, Integrator::Lt, Integrator::Bpt, Integrator::Vcm];

/// Floor at y = 0 lit by a 1 x 1 quad facing down at height 1.
const NEE_SCENE: &str = "\
camera 0 3 -3  0 0 0  0 1 0  40 4 4
material floor lambert 0.6 0.6 0.6
material lamp lambert 0 0 0
quad -5 0 -5  -5 0 5  5 0 5  5 0 -5 floor
quad -0.5 1 -0.5  0.5 1 -0.5  0.5 1 0.5  -0.5 1 0.5 lamp
light 1 3 3 3
option max_depth 2
";

fn irradiance_below_corner(a: f64, b: f64, h: f64, radiance: f64) -> f64 {
    let (x, y) = (a / h, b / h);
    let (sx, sy) = ((1.0 + x * x).sqrt(), (1.0 + y * y).sqrt());
    let form = (x / sx * (y / sx).atan() + y / sy * (x / sy).atan()) / (2.0 * PI);
    PI * radiance * form
}

#[test]
fn renders_are_identical_across_thread_counts() {
    let scene = builtin_scene("box").unwrap();
    for integrator in ALL {
        let mut a = RenderConfig::new(integrator, 3, 42);
        a.threads = Some(1);
        let mut b = a;
        b.threads = Some(3);
        let (ia, sa) = render(&scene, &a).unwrap();
        let (ib, sb) = render(&scene, &b).unwrap();
        assert_eq!(ia, ib, "{integrator:?}");
        assert_eq!(sa.to_csv(), sb.to_csv());
        assert_eq!(sa.strategies_csv(), sb.strategies_csv());
    }
}

#[test]
fn different_seeds_give_different_images() {
    let scene = builtin_scene("box").unwrap();
    let a = render(&scene, &RenderConfig::new(Integrator::Bpt, 2, 1)).unwrap().0;
    let b = render(&scene, &RenderConfig::new(Integrator::Bpt, 2, 2)).unwrap().0;
    assert_ne!(a, b);
}

#[test]
fn black_scene_renders_exactly_zero() {
    let text = NEE_SCENE.replace("light 1 3 3 3", "light 1 0 0 0");
    let scene = parse_scene(&text).unwrap();
    for integrator in ALL {
        let (img, stats) = render(&scene, &RenderConfig::new(integrator, 8, 5)).unwrap();
        assert!(img.pixels.iter().all(|p| *p == Rgb::BLACK), "{integrator:?}");
        assert_eq!(stats.nan_count, 0);
    }
}

#[test]
fn pt_furnace_converges_with_zero_nans() {
    let scene = builtin_scene("furnace").unwrap();
    let (img, stats) = render(&scene, &RenderConfig::new(Integrator::Pt, 64, 3)).unwrap();
    assert_eq!(stats.nan_count, 0);
    for p in &img.pixels {
        assert!((p.g - 2.0).abs() < 0.02, "{p:?}");
    }
}

#[test]
fn verify_mode_engines_agree_during_render() {
    let scene = builtin_scene("box").unwrap();
    for integrator in [Integrator::Bpt, Integrator::Vcm] {
        let mut c = RenderConfig::new(integrator, 2, 9);
        c.verify_mode = true;
        let (_, stats) = render(&scene, &c).unwrap();
        assert!(stats.weighted_paths > 0);
        assert!(stats.max_engine_deviation <= 1e-9, "{}", stats.max_engine_deviation);
    }
}

#[test]
fn second_moments_dominate_squared_means() {
    let scene = builtin_scene("smalllight").unwrap();
    let (_, stats) = render(&scene, &RenderConfig::new(Integrator::Bpt, 16, 4)).unwrap();
    for p in 0..stats.pixels.len() {
        let (m, m2) = (stats.mean(p), stats.second_moment(p));
        for (a, b) in m.to_array().into_iter().zip(m2.to_array()) {
            assert!(b >= a * a * (1.0 - 1e-12), "pixel {p}: {b} < {a}^2");
        }
    }
}

#[test]
fn next_event_matches_analytic_direct_lighting() {
    let scene = parse_scene(NEE_SCENE).unwrap();
    let x = scene.surface_point(0, Vec3::new(0.0, 0.0, 0.0));
    let eye = eye_subpath_through(&scene, &[scene.camera.vertex(), x]).unwrap();
    let prefix = eye.vertices[1].partial_throughput.g;
    let n = 100_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for k in 0..n {
        let light = generate_light_subpath(&scene, &mut sampler(11, 0, k, Stream::Light)).unwrap();
        let v = connection_value(&scene, &eye, 2, &light, 1).map_or(0.0, |(v, _)| v.g / prefix);
        sum += v;
        sq += v * v;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let se = ((sq / nf - mean * mean) / (nf - 1.0)).sqrt();
    let expected = 0.6 / PI * 4.0 * irradiance_below_corner(0.5, 0.5, 1.0, 3.0);
    assert!((mean - expected).abs() <= 3.0 * se, "mean {mean} expected {expected} se {se}");
}

#[test]
fn occluded_and_off_frustum_connections_are_zero() {
    let blocked = NEE_SCENE
        .replace("light 1 3 3 3", "material wall lambert 0.5 0.5 0.5\nquad -2 0.5 -2  2 0.5 -2  2 0.5 2  -2 0.5 2 wall\nlight 1 3 3 3");
    let scene = parse_scene(&blocked).unwrap();
    let x = scene.surface_point(0, Vec3::ZERO);
    let eye = eye_subpath_through(&scene, &[scene.camera.vertex(), x]).unwrap();
    let y = scene.surface_point(1, Vec3::new(0.0, 1.0, 0.0));
    let light = light_subpath_through(&scene, &[y]).unwrap();
    assert!(connection_value(&scene, &eye, 2, &light, 1).is_none());
    let cfg = RenderConfig::new(Integrator::Bpt, 1, 0);
    assert_eq!(connect_subpaths(&scene, &eye, &light, 2, 1, &cfg).0, Rgb::BLACK);

    // Behind the camera: no pixel receives the splat.
    let scene = parse_scene(NEE_SCENE).unwrap();
    let behind = scene.surface_point(0, Vec3::new(0.0, 0.0, -4.9));
    let cam = eye_subpath_through(&scene, &[scene.camera.vertex()]).unwrap();
    let light = light_subpath_through(&scene, &[scene.surface_point(1, Vec3::new(0.0, 1.0, 0.0)), behind]).unwrap();
    assert!(connection_value(&scene, &cam, 1, &light, 2).is_none());
}

#[test]
fn merge_without_nearby_photons_is_zero() {
    let scene = parse_scene(&NEE_SCENE.replace("max_depth 2", "max_depth 3")).unwrap();
    let x = scene.surface_point(0, Vec3::new(0.5, 0.0, 0.5));
    let eye = eye_subpath_through(&scene, &[scene.camera.vertex(), x]).unwrap();
    let y = scene.surface_point(1, Vec3::new(0.0, 1.0, 0.0));
    let lights = vec![light_subpath_through(&scene, &[y, scene.surface_point(0, Vec3::new(-4.0, 0.0, -4.0))]).unwrap()];
    let grid = PhotonGrid::build(&lights, scene.merge_radius());
    let cfg = RenderConfig::new(Integrator::Vcm, 1, 0);
    assert_eq!(merge_at_vertex(&scene, &eye, 2, &grid, &lights, &cfg), Rgb::BLACK);
}

fn image_mean(scene: &Scene, integrator: Integrator, spp: usize, seed: u64) -> Rgb {
    let (img, stats) = render(scene, &RenderConfig::new(integrator, spp, seed)).unwrap();
    assert_eq!(stats.nan_count, 0);
    img.pixels.iter().fold(Rgb::BLACK, |a, &p| a + p) / img.pixels.len() as f64
}

#[test]
fn vcm_matches_bpt_on_box() {
    let scene = builtin_scene("box").unwrap();
    let bpt = image_mean(&scene, Integrator::Bpt, 256, 21);
    let vcm = image_mean(&scene, Integrator::Vcm, 64, 22);
    for (a, b) in vcm.to_array().into_iter().zip(bpt.to_array()) {
        assert!((a - b).abs() <= 0.03 * b, "vcm {a} bpt {b}");
    }
}

#[test]
fn estimators_agree_on_furnace_image_mean() {
    let scene = builtin_scene("furnace").unwrap();
    for integrator in ALL {
        let (img, stats) = render(&scene, &RenderConfig::new(integrator, 256, 8)).unwrap();
        let n = img.pixels.len() as f64;
        let mean = img.pixels.iter().map(|p| p.g).sum::<f64>() / n;
        // Pixels are treated as independent, which ignores light paths that splat twice.
        let se = (0..img.pixels.len()).map(|p| stats.variance_of_mean(p).g).sum::<f64>().sqrt() / n;
        assert!((mean - 2.0).abs() <= 4.0 * se + 0.005, "{integrator:?} mean {mean} se {se}");
    }
}

#[test]
fn compare_is_reproducible() {
    let scene = builtin_scene("smalllight").unwrap();
    let a = misweave::compare::compare(&scene, 4, 3, 16, None).unwrap();
    let b = misweave::compare::compare(&scene, 4, 3, 16, Some(2)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("row,integrator,s,t,technique,mse,mean,m2,variance,count\n"));
}
