use proptest::prelude::*;

use hauv_ipp::env::{normalize_by_side, Workspace};
use hauv_ipp::ingest::{interpolate_to_workspace, parse_grid, write_grid, RawGrid};
use hauv_ipp::path::{bernstein_basis, smooth_path};
use hauv_ipp::vehicle::{sensor_attenuation, synthesize_speed, SensorParams};
use hauv_ipp::Point3;

fn unit() -> impl Strategy<Value = Point3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(x, y, z)| Point3::new(x, y, z).normalize())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn speed_solves_the_triangle(dir in unit(), c in unit(), mag in 0.0..12.0f64, v_hauv in 0.1..10.0f64) {
        let v_c = c * mag;
        let p = v_c.dot(&dir);
        if let Some(v) = synthesize_speed(&dir, &v_c, v_hauv) {
            prop_assert!(v > 0.0);
            let residual = v_c.norm_squared() + v * v - 2.0 * p * v - v_hauv * v_hauv;
            prop_assert!(residual.abs() <= 1e-9 * (1.0 + v_hauv * v_hauv + mag * mag));
            // The vehicle's own velocity has the commanded magnitude.
            prop_assert!(((dir * v - v_c).norm() - v_hauv).abs() <= 1e-9 * (1.0 + v_hauv));
        } else {
            prop_assert!(mag >= v_hauv);
        }
    }

    #[test]
    fn tail_and_head_flows(dir in unit(), frac in 0.0..0.999f64, v_hauv in 0.1..10.0f64) {
        let tail = synthesize_speed(&dir, &(dir * frac * v_hauv), v_hauv).unwrap();
        prop_assert!(tail >= v_hauv * (1.0 - 1e-12));
        let head = synthesize_speed(&dir, &(-dir * frac * v_hauv), v_hauv).unwrap();
        prop_assert!(head > 0.0 && head <= v_hauv * (1.0 + 1e-12));
    }

    #[test]
    fn attenuation_is_non_increasing(a in 0.0..150.0f64, b in 0.0..150.0f64) {
        let s = SensorParams::default();
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(sensor_attenuation(near, &s) >= sensor_attenuation(far, &s));
    }

    #[test]
    fn bernstein_partition_of_unity(s in 0.0..=1.0f64, big_n in 1usize..8) {
        let sum: f64 = (0..=big_n).map(|n| bernstein_basis(n, big_n, s)).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn smoothing_keeps_endpoints_and_bounds(
        pts in prop::collection::vec((0.0..5000.0f64, 0.0..5000.0f64, -300.0..300.0f64), 2..12),
        ds in 5.0..100.0f64,
    ) {
        let pts: Vec<Point3> = pts.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect();
        let path = smooth_path(&pts, ds).unwrap();
        let s = path.samples();
        prop_assert!((s[0].position - pts[0]).norm() <= 1e-9);
        prop_assert!((s[s.len() - 1].position - pts[pts.len() - 1]).norm() <= 1e-9);
        for axis in 0..3 {
            let lo = pts.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s.iter().all(|x| x.position[axis] >= lo - 1e-9 && x.position[axis] <= hi + 1e-9));
        }
        prop_assert!(s.windows(2).all(|w| (w[1].position - w[0].position).norm() <= ds + 1e-9));
        prop_assert!(s.windows(2).all(|w| w[0].position.z * w[1].position.z >= 0.0));
    }

    #[test]
    fn normalization_is_idempotent_and_monotone(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let ws = Workspace::new(4, 3, 6, 50.0, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..ws.len()).map(|_| rng.gen_range(-3.0..7.0)).collect();
        let (once, _) = normalize_by_side(&raw, &ws).unwrap();
        let (twice, _) = normalize_by_side(&once, &ws).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        let air = |i: usize| ws.is_air_layer(ws.ijk(i).2);
        for i in 0..ws.len() {
            prop_assert!((0.0..=1.0).contains(&once[i]));
            for j in 0..ws.len() {
                if air(i) == air(j) && raw[i] < raw[j] {
                    prop_assert!(once[i] <= once[j]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn grid_text_round_trips(
        nx in 1usize..5, ny in 1usize..5, nz in 1usize..4,
        seed in any::<u64>(),
        spacing in (1.0..2000.0f64, 1.0..2000.0f64, 1.0..200.0f64),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = nx * ny * nz;
        let mut field = || (0..n).map(|_| rng.gen_range(-1e3..1e3f64)).collect::<Vec<_>>();
        let grid = RawGrid::new(
            [nx, ny, nz],
            [spacing.0, spacing.1, spacing.2],
            [-1.5, 0.25, -300.0],
            field(),
            field(),
            field(),
        ).unwrap();
        let text = write_grid(&grid);
        let back = parse_grid(&text).unwrap();
        prop_assert_eq!(&back, &grid);
        prop_assert_eq!(write_grid(&back), text);
    }
}

#[test]
fn interpolation_stays_within_raw_range() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let dims = [6, 6, 4];
    let n = 6 * 6 * 4;
    let mut field = || (0..n).map(|_| rng.gen_range(-2.0..2.0f64)).collect::<Vec<_>>();
    let raw = RawGrid::new(dims, [1000.0, 1000.0, 200.0], [0.0, 0.0, -300.0], field(), field(), field()).unwrap();
    let ws = Workspace::standard();
    let (info, vel) = interpolate_to_workspace(&raw, &ws).unwrap();
    let range = |f: &[f64]| (f.iter().cloned().fold(f64::INFINITY, f64::min), f.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (lo, hi) = range(&raw.info);
    assert!(info.iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12));
    let (ulo, uhi) = range(&raw.u);
    for idx in (0..ws.len()).step_by(97) {
        let (i, j, k) = ws.ijk(idx);
        let u = vel.velocity_at(&ws.grid_point(i, j, k)).unwrap().x;
        assert!(u >= ulo - 1e-12 && u <= uhi + 1e-12);
    }

    // A raw grid that falls short of the workspace is refused.
    let small = RawGrid::new([2, 2, 2], [100.0, 100.0, 100.0], [0.0, 0.0, 0.0], vec![0.0; 8], vec![0.0; 8], vec![0.0; 8])
        .unwrap();
    assert!(interpolate_to_workspace(&small, &ws).is_err());
}
