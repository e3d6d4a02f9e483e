use auvplan::harness::{scenario_field, ExperimentConfig, Scenario};
use auvplan::lpp::{
    control_point_bounds, division_points, plan_path, BSplineConfig, BasisTable, Inertia, PsoConfig,
};
use auvplan::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng) -> Point3 {
    Point3::new(rng.random_range(-5e3..5e3), rng.random_range(-5e3..5e3), rng.random_range(0.0..300.0))
}

#[test]
fn bounds_contain_the_straight_line_and_pin_the_ends() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..10_000 {
        let (s, t) = (random_point(&mut rng), random_point(&mut rng));
        let n = rng.random_range(2..12);
        let half = rng.random_range(0.0..0.8) * s.distance(&t);
        let boxes = control_point_bounds(s, t, n, half, 100.0).unwrap();
        let div = division_points(s, t, n);
        assert_eq!(boxes.len(), n);
        assert_eq!((boxes[0].min, boxes[0].max), (s, s));
        assert_eq!((boxes[n - 1].min, boxes[n - 1].max), (t, t));
        for (i, b) in boxes.iter().enumerate().take(n - 1).skip(1) {
            for a in 0..3 {
                assert!(b.min.axis(a) <= b.max.axis(a));
            }
            for p in [div[i - 1], div[i], div[i - 1].lerp(&div[i], 0.5)] {
                assert!(b.contains(&p), "box {i} {b:?} misses {p:?}");
            }
        }
    }
}

#[test]
fn zero_violation_paths_stay_clear_under_denser_sampling() {
    let cfg = ExperimentConfig::default();
    let pso = PsoConfig { swarm_size: 60, iterations: 60, ..PsoConfig::default() };
    let dense = BSplineConfig { samples: 10 * cfg.spline.samples, ..cfg.spline };
    let table = BasisTable::new(&dense).unwrap();
    let mut checked = 0;
    for scenario in [Scenario::Static, Scenario::Moving, Scenario::CurrentDriven, Scenario::Composite] {
        for seed in 0..5 {
            let field = scenario_field(&cfg, scenario, 5, seed).unwrap();
            let (path, stats) =
                plan_path(cfg.path.start, cfg.path.target, &field, cfg.vehicle_speed, &cfg.spline, &pso, seed).unwrap();
            if path.violation > 0.0 {
                continue;
            }
            checked += 1;
            for p in table.evaluate(&path.control_points) {
                for o in &stats.best_field.obstacles {
                    let depth = o.effective_radius() - o.position.distance(&p);
                    assert!(
                        depth <= 0.01 * o.effective_radius(),
                        "scenario {} seed {seed}: {depth} m inside an obstacle of radius {}",
                        scenario.id(),
                        o.effective_radius()
                    );
                }
            }
        }
    }
    assert!(checked >= 15, "only {checked} collision-free paths to check");
}

fn slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let num: f64 = y.iter().enumerate().map(|(i, v)| (i as f64 - xm) * (v - ym)).sum();
    let den: f64 = (0..y.len()).map(|i| (i as f64 - xm).powi(2)).sum();
    num / den
}

// The constant default inertia with c1 = c2 = 2 keeps the swarm oscillating,
// so the late-run contraction is checked under the decaying schedule.
#[test]
fn swarm_mean_cost_falls_late_in_static_fields_under_decaying_inertia() {
    let pso = PsoConfig { inertia: Inertia::Linear(0.9, 0.4), ..PsoConfig::default() };
    let cfg = ExperimentConfig { pso, ..ExperimentConfig::default() };
    let seeds = 20u64;
    for count in 3..=6 {
        let mut avg = vec![0.0; 21];
        let mut falling = 0;
        for seed in 0..seeds {
            let field = scenario_field(&cfg, Scenario::Static, count, seed).unwrap();
            let (_, stats) =
                plan_path(cfg.path.start, cfg.path.target, &field, cfg.vehicle_speed, &cfg.spline, &cfg.pso, seed)
                    .unwrap();
            let m = &stats.mean_cost;
            let tail = &m[m.len() - 21..];
            for (a, v) in avg.iter_mut().zip(tail) {
                *a += v / seeds as f64;
            }
            falling += usize::from(slope(tail) <= 0.0);
        }
        assert!(slope(&avg) <= 0.0, "{count} obstacles: seed-averaged mean cost rises, slope {}", slope(&avg));
        assert!(falling * 2 > seeds as usize, "{count} obstacles: only {falling} of {seeds} runs fall");
    }
}
