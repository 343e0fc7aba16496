use std::f64::consts::PI;
use std::path::PathBuf;

use povmquad::quadrature::{read_pointset_file, DEFAULT_TOLERANCE};
use povmquad::simulator::{outcome_probabilities, sample_outcome};
use povmquad::sphere::overlap_sq_cartesian;
use povmquad::*;
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..=1.0, 0.0f64..2.0 * PI).prop_map(|(z, phi)| Direction::new(z.acos(), phi))
}

fn rotation() -> impl Strategy<Value = Rotation> {
    (0.0f64..2.0 * PI, 0.0f64..PI, 0.0f64..2.0 * PI)
        .prop_map(|(a, b, c)| Rotation::from_euler_zyz(a, b, c))
}

proptest! {
    #[test]
    fn overlap_is_symmetric(a in direction(), b in direction()) {
        prop_assert!((overlap_sq(&a, &b) - overlap_sq(&b, &a)).abs() < 1e-15);
    }

    #[test]
    fn overlap_with_antipode_complements(a in direction(), b in direction()) {
        let s = overlap_sq(&a, &b) + overlap_sq(&a, &b.antipode());
        prop_assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cartesian_round_trip(d in direction()) {
        let v = d.to_cartesian();
        let back = Direction::from_cartesian(v).unwrap().to_cartesian();
        prop_assert!((back.x - v.x).abs() < 1e-14);
        prop_assert!((back.y - v.y).abs() < 1e-14);
        prop_assert!((back.z - v.z).abs() < 1e-14);
    }

    #[test]
    fn rotation_preserves_overlap(a in direction(), b in direction(), r in rotation()) {
        let before = overlap_sq(&a, &b);
        let after = overlap_sq_cartesian(&r.apply(&a.to_cartesian()), &r.apply(&b.to_cartesian()));
        prop_assert!((before - after).abs() < 1e-13);
    }

    #[test]
    fn product_rule_strength_is_order(order in 1usize..=24) {
        let q = product_rule(order);
        prop_assert_eq!(q.len(), (order + 1) * (order + 1).div_ceil(2));
        prop_assert!((q.weight_sum() - 4.0 * PI).abs() < 1e-12);
        let s = detect_strength(&q, order + 1, DEFAULT_TOLERANCE).unwrap();
        prop_assert!(s >= order);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn strength_survives_rotation(order in 1usize..=10, r in rotation()) {
        let q = product_rule(order);
        let s = detect_strength(&q.rotated(&r), order, DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(s, order);
    }
}

/// Kolmogorov–Smirnov distance of `samples` (sorted in place) from
/// uniform on [lo, hi].
fn ks_uniform(samples: &mut [f64], lo: f64, hi: f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn rotated_samples_are_uniform() {
    // z and azimuth of a uniform sphere point are independent uniforms on
    // [-1, 1] and [0, 2π); a fixed rotation must not change that
    const N: usize = 1_000_000;
    let r = Rotation::from_euler_zyz(0.3, 1.1, -2.0);
    let mut sampler = SphereSampler::new(2024);
    let mut z = Vec::with_capacity(N);
    let mut phi = Vec::with_capacity(N);
    for _ in 0..N {
        let d = r.apply_direction(&sampler.sample());
        z.push(d.theta().cos());
        phi.push(d.phi());
    }
    // critical value at α = 1e-3
    let critical = 1.9495 / (N as f64).sqrt();
    let dz = ks_uniform(&mut z, -1.0, 1.0);
    let dphi = ks_uniform(&mut phi, 0.0, 2.0 * PI);
    assert!(dz < critical, "z: D = {dz}, critical {critical}");
    assert!(dphi < critical, "phi: D = {dphi}, critical {critical}");
}

#[test]
fn sample_moments() {
    const N: usize = 1_000_000;
    let mut sampler = SphereSampler::new(99);
    let fixed = Direction::new(0.7, 2.5);
    let mut z = 0.0;
    let mut overlap = 0.0;
    for _ in 0..N {
        let d = sampler.sample();
        z += d.theta().cos();
        overlap += overlap_sq(&fixed, &d);
    }
    let (z, overlap) = (z / N as f64, overlap / N as f64);
    assert!(z.abs() < 0.003, "mean z {z}");
    assert!((overlap - 0.5).abs() < 0.001, "mean overlap {overlap}");
}

fn grid(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../grids")
        .join(name)
}

#[test]
fn fourteen_point_rule_matches_hand_solution() {
    // octahedron vertices share A and cube diagonals share B; integrating
    // 1 and the degree-4 invariant x⁴ + y⁴ + z⁴ exactly gives
    // 6A + 8B = 4π and 2A + 8B/9 = 12π/5
    let a = 4.0 * PI / 15.0;
    let b = 3.0 * PI / 10.0;
    let q = read_pointset_file(&grid("lebedev_005.txt"), None)
        .unwrap()
        .quadrature;
    assert_eq!(q.len(), 14);
    for p in q.points() {
        let v = p.direction.to_cartesian();
        let on_axis = v.x.abs().max(v.y.abs()).max(v.z.abs()) > 0.99;
        let want = if on_axis { a } else { b };
        assert!(
            (p.weight - want).abs() < 1e-13,
            "{v:?}: {} vs {want}",
            p.weight
        );
    }
    assert_eq!(detect_strength(&q, 8, DEFAULT_TOLERANCE).unwrap(), 5);
}

#[test]
fn outcome_frequencies_follow_born_rule() {
    let p = povm_from_quadrature(&product_rule(2), 2).unwrap();
    let state = Direction::new(1.0, 0.4);
    let probs = outcome_probabilities(&p, &state);
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    const DRAWS: usize = 200_000;
    let mut counts = vec![0usize; probs.len()];
    let mut sampler = SphereSampler::new(5);
    for _ in 0..DRAWS {
        counts[sample_outcome(&probs, total, sampler.uniform())] += 1;
    }
    for (k, (&c, &pk)) in counts.iter().zip(&probs).enumerate() {
        let mean = pk * DRAWS as f64;
        let sigma = (DRAWS as f64 * pk * (1.0 - pk)).sqrt();
        assert!(
            (c as f64 - mean).abs() < 4.0 * sigma + 1.0,
            "outcome {k}: {c} vs {mean:.1}"
        );
    }
}

#[test]
fn povm_json_round_trip_is_exact() {
    let p = povm_from_quadrature(&product_rule(7), 7).unwrap();
    let back = FinitePovm::from_json(&p.to_json().unwrap()).unwrap();
    assert_eq!(back, p);
}
