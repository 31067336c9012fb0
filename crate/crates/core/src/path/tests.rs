use super::*;
use crate::env::{build_info_map, Aabb, GaussianFeature, VelocityField, Workspace};
use crate::vehicle::synthesize_speed;
use nalgebra::{Matrix3, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn env_with(obstacles: ObstacleSet, calm: bool) -> Environment {
    let ws = Workspace::standard();
    let f = GaussianFeature::new(Point3::new(2500.0, 2500.0, 0.0), Matrix3::identity() * 4e5, 1.0).unwrap();
    let g = GaussianFeature::new(Point3::new(1000.0, 4000.0, -150.0), Matrix3::identity() * 1e5, 1.0).unwrap();
    let info = build_info_map(&[f, g], &ws, 1.0, 1.0).unwrap();
    let velocity = if calm {
        VelocityField::calm(&ws)
    } else {
        let cfg = crate::env::EnvironmentConfig::default();
        crate::env::generate_random_environment(3, &cfg).unwrap().velocity().clone()
    };
    Environment::new(info, velocity, obstacles).unwrap()
}

/// Barycentric membership in some tetrahedron of the point set; by
/// Caratheodory this is exactly convex-hull membership in 3D.
fn in_hull(p: &Point3, pts: &[Point3]) -> bool {
    let n = pts.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let m = Matrix4::new(
                        pts[a].x, pts[b].x, pts[c].x, pts[d].x, pts[a].y, pts[b].y, pts[c].y, pts[d].y, pts[a].z,
                        pts[b].z, pts[c].z, pts[d].z, 1.0, 1.0, 1.0, 1.0,
                    );
                    if let Some(inv) = m.try_inverse() {
                        let w = inv * Vector4::new(p.x, p.y, p.z, 1.0);
                        if w.iter().all(|x| *x >= -1e-9) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

#[test]
fn two_nodes_give_a_straight_line() {
    let a = Point3::new(100.0, 200.0, -50.0);
    let b = Point3::new(1300.0, 900.0, 120.0);
    let path = smooth_path(&[a, b], 25.0).unwrap();
    let dir = (b - a).normalize();
    for s in path.samples() {
        let v = s.position - a;
        assert!((v - dir * v.dot(&dir)).norm() < 1e-9);
    }
    assert_eq!(path.transitions(), 1);
    assert!(path.samples().iter().any(|s| s.position.z == 0.0));
}

#[test]
fn endpoints_and_spacing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..10 {
        let pts: Vec<Point3> = (0..n)
            .map(|_| Point3::new(rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0), rng.gen_range(-300.0..300.0)))
            .collect();
        let path = smooth_path(&pts, 25.0).unwrap();
        assert!((path.samples()[0].position - pts[0]).norm() <= 1e-9);
        assert!((path.samples().last().unwrap().position - pts[n - 1]).norm() <= 1e-9);
        for w in path.samples().windows(2) {
            assert!((w[1].position - w[0].position).norm() <= 25.0 + 1e-9);
            let (a, b) = (w[0].position.z, w[1].position.z);
            assert!(!(a > 0.0 && b < 0.0) && !(a < 0.0 && b > 0.0), "unsplit crossing");
        }
    }
}

#[test]
fn samples_stay_in_the_convex_hull() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let pts: Vec<Point3> = (0..6)
            .map(|_| Point3::new(rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0), rng.gen_range(-300.0..300.0)))
            .collect();
        let path = smooth_path(&pts, 50.0).unwrap();
        for s in path.samples() {
            assert!(in_hull(&s.position, &pts), "{:?}", s.position);
        }
    }
}

#[test]
fn too_few_nodes() {
    assert!(matches!(smooth_path(&[Point3::zeros()], 25.0), Err(Error::TooFewNodes(1))));
}

#[test]
fn collision_checks() {
    let b = Aabb::new([900.0, 900.0, -100.0], [1100.0, 1100.0, 100.0]).unwrap();
    let through = smooth_path(&[Point3::new(500.0, 1000.0, 0.0), Point3::new(1500.0, 1000.0, 0.0)], 25.0).unwrap();
    assert!(collision_free(&through, &ObstacleSet::empty()));
    assert!(!collision_free(&through, &ObstacleSet::new(vec![b], None).unwrap()));
    // one sample lands exactly on the face x = 900
    let graze = smooth_path(&[Point3::new(800.0, 1000.0, 0.0), Point3::new(900.0, 1000.0, 0.0)], 25.0).unwrap();
    assert_eq!(graze.samples().last().unwrap().position.x, 900.0);
    assert!(!collision_free(&graze, &ObstacleSet::new(vec![b], None).unwrap()));
}

#[test]
fn degenerate_single_point_path() {
    let env = env_with(ObstacleSet::empty(), true);
    let model = VehicleModel::default();
    let p = Point3::new(2525.0, 2525.0, 0.0);
    let task = Task::new(p, p, f64::INFINITY);
    let r = evaluate_fitness(&[p, p, p], &task, &env, &model).unwrap();
    assert!(r.ig > 0.0);
    assert_eq!(r.e, 0.0);
    assert_eq!(r.t, 0.0);
    assert!(r.feasible);
}

#[test]
fn long_flight_exhausts_the_budget() {
    let env = env_with(ObstacleSet::empty(), true);
    let model = VehicleModel::default();
    let pts = [
        Point3::new(100.0, 100.0, 200.0),
        Point3::new(4900.0, 100.0, 200.0),
        Point3::new(4900.0, 4900.0, 200.0),
        Point3::new(100.0, 4900.0, 200.0),
        Point3::new(100.0, 200.0, 200.0),
        Point3::new(4000.0, 200.0, 200.0),
    ];
    let task = Task::new(pts[0], pts[5], f64::INFINITY);
    let r = evaluate_fitness(&pts, &task, &env, &model).unwrap();
    assert_eq!(r.t_sea, 0.0);
    assert!(r.t_air > 900.0);
    assert!(r.e > model.vehicle.e_max);
    assert!(!r.feasible);
    assert!((r.e - r.t_air / 900.0).abs() < 1e-12);
}

#[test]
fn evaluation_is_pure_and_consistent() {
    let env = env_with(ObstacleSet::empty(), false);
    let model = VehicleModel::default();
    let pts = [
        Point3::new(1000.0, 3750.0, 0.0),
        Point3::new(1500.0, 3500.0, 150.0),
        Point3::new(2000.0, 3300.0, -100.0),
        Point3::new(2600.0, 3600.0, -250.0),
        Point3::new(3300.0, 3700.0, 100.0),
        Point3::new(4000.0, 3750.0, 0.0),
    ];
    let task = Task::new(pts[0], pts[5], f64::INFINITY);
    let a = evaluate_fitness(&pts, &task, &env, &model).unwrap();
    let b = evaluate_fitness(&pts, &task, &env, &model).unwrap();
    assert_eq!(a, b);
    assert!(a.reachable);
    assert!(a.transitions >= 2);
    // re-derive time and energy from the tagged samples
    let v = &model.vehicle;
    let (mut t_air, mut t_sea) = (0.0, 0.0);
    for w in a.path.samples().windows(2) {
        let (p, q) = (w[0].position, w[1].position);
        let len = (q - p).norm();
        if len == 0.0 {
            continue;
        }
        let mid = (p + q) * 0.5;
        let m = Medium::at_height(mid.z);
        let vc = env.velocity().velocity_at(&mid).unwrap();
        let speed = synthesize_speed(&((q - p) / len), &vc, v.speed(m)).unwrap();
        match m {
            Medium::Air => t_air += len / speed,
            Medium::Sea => t_sea += len / speed,
        }
    }
    let n = a.path.transitions() as f64;
    assert_eq!(a.transitions, a.path.transitions());
    assert!((a.e - (v.p_air * t_air + v.p_sea * t_sea + n * v.e_switch)).abs() <= 1e-9);
    assert!((a.t - (t_air + t_sea + n * v.t_switch)).abs() <= 1e-9);
    let ub = env.info().weighted_total() * model.sensor.a_dmax;
    assert!(a.ig > 0.0 && a.ig <= ub);
    let profile = path_profile(&a.path, &env, &model.vehicle);
    let (t_end, e_end) = profile.last().unwrap().unwrap();
    assert!((t_end - a.t).abs() < 1e-9 && (e_end - a.e).abs() < 1e-12);
}

#[test]
fn adding_samples_never_lowers_information() {
    let env = env_with(ObstacleSet::empty(), true);
    let model = VehicleModel::default();
    let short = [Point3::new(1000.0, 2500.0, 0.0), Point3::new(2500.0, 2500.0, 0.0)];
    let path = smooth_path(&short, 25.0).unwrap();
    let mut m = MeasuredArray::for_map(env.info());
    accumulate_information(&path, env.info(), &model.sensor, &mut m);
    let before = total_information(&m, env.info());
    let more = smooth_path(&[Point3::new(2500.0, 2500.0, 0.0), Point3::new(2500.0, 4000.0, -100.0)], 25.0).unwrap();
    accumulate_information(&more, env.info(), &model.sensor, &mut m);
    assert!(total_information(&m, env.info()) >= before);
}

#[test]
fn task_json_uses_null_for_unbounded_time() {
    let t = Task::new(Point3::new(1.0, 2.0, 0.0), Point3::new(3.0, 4.0, 0.0), f64::INFINITY);
    let s = serde_json::to_string(&t).unwrap();
    assert!(s.contains("\"t_max\":null"));
    let back: Task = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
}
