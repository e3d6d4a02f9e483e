use auvplan::obstacles::{
    collision_violation, spawn_obstacles, KindCounts, ObstacleKind, ObstacleParams, OperationWindow,
};
use auvplan::{Aabb, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn window() -> OperationWindow {
    OperationWindow::around(Point3::new(0.0, 0.0, 50.0), Point3::new(3000.0, 2000.0, 60.0), 0.25).unwrap()
}

/// Penetration summed over the polyline, each segment scanned at 400 points.
fn brute_force_violation(samples: &[Point3], centres: &[(Point3, f64)]) -> f64 {
    let depth = |p: &Point3| -> Vec<f64> {
        centres
            .iter()
            .map(|(c, r)| {
                let d = ((p.x - c.x).powi(2) + (p.y - c.y).powi(2) + (p.z - c.z).powi(2)).sqrt();
                if d < *r { (r - d) / r } else { 0.0 }
            })
            .collect()
    };
    let mut total = 0.0;
    for j in 0..samples.len() {
        let mut worst = depth(&samples[j]);
        if let Some(next) = samples.get(j + 1) {
            for k in 1..=400 {
                let p = samples[j].lerp(next, k as f64 / 400.0);
                for (w, d) in worst.iter_mut().zip(depth(&p)) {
                    *w = w.max(d);
                }
            }
        }
        total += worst.iter().sum::<f64>();
    }
    total
}

#[test]
fn collision_violation_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..100 {
        let counts = KindCounts([1, 1, 2, 2]);
        let mut field = spawn_obstacles(window(), counts, ObstacleParams::default(), seed).unwrap();
        for _ in 0..seed % 7 {
            field.step_in_place();
        }
        let b = field.window.bounds;
        // A random walk of short hops across the window.
        let mut p = Point3::new(
            rng.random_range(b.min.x..b.max.x),
            rng.random_range(b.min.y..b.max.y),
            rng.random_range(b.min.z..=b.max.z),
        );
        let mut samples = Vec::new();
        for _ in 0..200 {
            samples.push(p);
            let hop = Point3::new(rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0), rng.random_range(-5.0..5.0));
            p = p + hop;
        }
        let centres: Vec<_> = field.obstacles.iter().map(|o| (o.position, o.radius + o.halo)).collect();
        let got = collision_violation(&samples, &field);
        let want = brute_force_violation(&samples, &centres);
        assert!((got - want).abs() <= 1e-4 * samples.len() as f64, "seed {seed}: {got} vs {want}");
        assert!(got >= want - 1e-12);
    }
}

#[test]
fn spawned_centres_respect_truncation_over_many_draws() {
    let w = window();
    let b = w.bounds;
    let params = ObstacleParams::default();
    let mut draws = 0;
    for seed in 0..2500 {
        let field = spawn_obstacles(w, KindCounts([1, 1, 1, 1]), params, seed).unwrap();
        for o in &field.obstacles {
            draws += 1;
            assert!(o.radius >= params.radius_min && o.radius <= params.radius_max);
            assert!(o.position.x >= b.min.x + o.radius && o.position.x <= b.max.x - o.radius);
            assert!(o.position.y >= b.min.y + o.radius && o.position.y <= b.max.y - o.radius);
            assert!(o.position.z >= b.min.z && o.position.z <= b.max.z);
            let clearance = o.radius * (1.0 + params.clearance_ratio) + params.clearance_margin;
            assert!(o.position.distance(&w.start) > clearance);
            assert!(o.position.distance(&w.target) > clearance);
        }
    }
    assert_eq!(draws, 10_000);
}

#[test]
fn moving_obstacle_displacement_grows_like_square_root_of_steps() {
    // A window far larger than the walk so clamping never engages.
    let big = OperationWindow::new(
        Aabb::new(Point3::new(-1e6, -1e6, -1e6), Point3::new(1e6, 1e6, 1e6)),
        Point3::new(-9e5, -9e5, 0.0),
        Point3::new(9e5, 9e5, 0.0),
    )
    .unwrap();
    let params = ObstacleParams { radius_sigma: 10.0, ..ObstacleParams::default() };
    let sigma = params.motion_sigma;
    let checkpoints = [4usize, 16, 64];
    let mut sq = [0.0; 3];
    let runs = 400;
    for seed in 0..runs {
        let mut f = spawn_obstacles(big, KindCounts::of(ObstacleKind::SelfMotivated, 5), params, seed).unwrap();
        let origin: Vec<Point3> = f.obstacles.iter().map(|o| o.position).collect();
        let mut k = 0;
        for (c, &target) in checkpoints.iter().enumerate() {
            while k < target {
                f.step_in_place();
                k += 1;
            }
            for (o, p0) in f.obstacles.iter().zip(&origin) {
                sq[c] += o.position.distance(p0).powi(2);
            }
        }
    }
    for (c, &k) in checkpoints.iter().enumerate() {
        let rms = (sq[c] / (runs as f64 * 5.0)).sqrt();
        let expected = sigma * (3.0 * k as f64).sqrt();
        assert!((rms / expected - 1.0).abs() < 0.08, "k={k}: rms {rms}, expected {expected}");
    }
}

#[test]
fn static_known_obstacles_never_change() {
    for seed in 0..20 {
        let f0 = spawn_obstacles(window(), KindCounts::of(ObstacleKind::StaticKnown, 4), ObstacleParams::default(), seed)
            .unwrap();
        let mut f = f0.clone();
        for _ in 0..100 {
            f.step_in_place();
        }
        assert_eq!(f.obstacles, f0.obstacles);
    }
}

#[test]
fn zero_current_keeps_halo_at_zero() {
    for seed in 0..20 {
        let mut f = spawn_obstacles(window(), KindCounts::of(ObstacleKind::CurrentDriven, 4), ObstacleParams::default(), seed)
            .unwrap()
            .with_current(0.0);
        for _ in 0..100 {
            f.step_in_place();
            assert!(f.obstacles.iter().all(|o| o.halo == 0.0));
        }
        assert!(f.predict_states(10).iter().all(|p| p.obstacles.iter().all(|o| o.halo == 0.0)));
    }
}

#[test]
fn current_driven_effective_radius_never_shrinks() {
    for seed in 0..20 {
        let mut f = spawn_obstacles(window(), KindCounts::of(ObstacleKind::CurrentDriven, 4), ObstacleParams::default(), seed)
            .unwrap()
            .with_current(0.5);
        let mut prev: Vec<f64> = f.obstacles.iter().map(|o| o.effective_radius()).collect();
        for _ in 0..100 {
            f.step_in_place();
            let now: Vec<f64> = f.obstacles.iter().map(|o| o.effective_radius()).collect();
            assert!(now.iter().zip(&prev).all(|(a, b)| a >= b));
            prev = now;
        }
    }
}

#[test]
fn static_uncertain_radius_stays_in_its_bound() {
    let params = ObstacleParams::default();
    for seed in 0..20 {
        let mut f = spawn_obstacles(window(), KindCounts::of(ObstacleKind::StaticUncertain, 4), params, seed).unwrap();
        let base: Vec<(Point3, f64)> = f.obstacles.iter().map(|o| (o.position, o.base_radius)).collect();
        for _ in 0..100 {
            f.step_in_place();
            for (o, (p, r)) in f.obstacles.iter().zip(&base) {
                assert_eq!(o.position, *p);
                assert!((o.radius - r).abs() <= params.uncertain_spread * r + 1e-9);
            }
        }
    }
}
