//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DVector, Matrix2, Vector2};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;
use rand_distr::StandardNormal;
use rssgeo::analysis::{
    detectability_threshold, difference_cdf, fit_lognormal_sum, monte_carlo_resolution, prob_correct_assignment,
    ResolutionQuery,
};
use rssgeo::experiment::{simulate_recover, RecoveryRun};
use rssgeo::ingest::fit_pathloss;
use rssgeo::noise::{expected_residual_sq_bound, noise_moments, simulate_noisy_data_with, Seed, ETA};
use rssgeo::scene::{
    build_measurement_matrix, forward, signature, CandidateGrid, Emitter, MeasurementMatrix, PathlossModel, Point,
    Scenario, SensorArray,
};
use rssgeo::solver::{bloomp_solve, coherence, PursuitSolver, SolverConfig, Strategy as Pursuit};

const FIG1_POWERS: [f64; 3] = [1.7424, 0.8830, 1.1712];

struct Outcome {
    pass: bool,
    detail: String,
}

fn scenario(name: &str) -> Scenario {
    Scenario::load(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(format!("{name}.json")),
    )
    .unwrap()
}

fn within_budget(elapsed: Duration, seconds: u64) -> bool {
    elapsed <= Duration::from_secs(seconds)
}

fn list(values: &[f64], digits: usize) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.digits$}")).collect();
    parts.join("/")
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn shadowing_moments() -> Outcome {
    let start = Instant::now();
    let n = 1_000_000;
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, sigma_db) in [1.0, 3.0, 5.0].into_iter().enumerate() {
        let mut rng = Seed(1).trial_rng(k as u64);
        let x: Vec<f64> = (0..n)
            .map(|_| (ETA * sigma_db * rng.sample::<f64, _>(StandardNormal)).exp_m1())
            .collect();
        let (mean, se_mean) = mean_and_se(&x);
        let centered: Vec<f64> = x.iter().map(|v| (v - mean).powi(2)).collect();
        let (var, se_var) = mean_and_se(&centered);
        let m = noise_moments(sigma_db);
        let z_mean = (mean - m.mu0) / se_mean;
        let z_var = (var - m.sigma0_sq) / se_var;
        pass &= z_mean.abs() <= 3.0 && z_var.abs() <= 3.0;
        detail.push(format!("σ={sigma_db}: z_mean={z_mean:+.2}, z_var={z_var:+.2}"));
    }
    let elapsed = start.elapsed();
    pass &= within_budget(elapsed, 5);
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn residual_energy(emitters: &[Emitter], sensors: &SensorArray, model: &PathlossModel, trials: u64) -> (f64, f64, f64) {
    let mut d0 = DVector::zeros(sensors.len());
    for e in emitters {
        d0 += signature(&e.position_m, sensors, model).unwrap() * e.power;
    }
    let samples: Vec<f64> = (0..trials)
        .map(|t| {
            let d = simulate_noisy_data_with(emitters, sensors, model, 3.0, &mut Seed(2).trial_rng(t)).unwrap();
            (d - &d0).norm_squared()
        })
        .collect();
    let (mean, se) = mean_and_se(&samples);
    (mean, se, expected_residual_sq_bound(&d0, 3.0))
}

fn residual_bound() -> Outcome {
    let start = Instant::now();
    let fig1 = scenario("fig1");
    let single = [Emitter::new(Point::new(24.0, 41.0), 1.0)];
    let (mean1, _, bound1) = residual_energy(&single, &fig1.sensors, &fig1.model, 100_000);
    let rel = mean1 / bound1 - 1.0;
    let (mean3, se3, bound3) = residual_energy(&fig1.emitters, &fig1.sensors, &fig1.model, 100_000);
    let excess = (mean3 - bound3) / se3;
    let pass = rel.abs() <= 0.02 && mean3 <= bound3 + 3.0 * se3 && within_budget(start.elapsed(), 30);
    Outcome {
        pass,
        detail: format!(
            "single emitter MC/bound − 1 = {rel:+.4}; three emitters MC/bound = {:.4} ({excess:+.1} SE)",
            mean3 / bound3
        ),
    }
}

fn ls_residual(matrix: &MeasurementMatrix, d: &DVector<f64>, i: usize, j: Option<usize>) -> f64 {
    let a = matrix.column(i);
    match j {
        None => {
            let x = a.dot(d) / a.dot(&a);
            (d - a * x).norm()
        }
        Some(j) => {
            let b = matrix.column(j);
            let gram = Matrix2::new(a.dot(&a), a.dot(&b), a.dot(&b), b.dot(&b));
            let rhs = Vector2::new(a.dot(d), b.dot(d));
            match gram.lu().solve(&rhs) {
                Some(x) => (d - a * x[0] - b * x[1]).norm(),
                None => f64::INFINITY,
            }
        }
    }
}

/// Best support of the given sparsity by exhaustive least squares.
fn brute_force(matrix: &MeasurementMatrix, d: &DVector<f64>, sparsity: usize) -> Vec<usize> {
    let n = matrix.ncols();
    let mut best = (f64::INFINITY, vec![]);
    for i in 0..n {
        if sparsity == 1 {
            let r = ls_residual(matrix, d, i, None);
            if r < best.0 {
                best = (r, vec![i]);
            }
            continue;
        }
        for j in i + 1..n {
            let r = ls_residual(matrix, d, i, Some(j));
            if r < best.0 {
                best = (r, vec![i, j]);
            }
        }
    }
    best.1
}

fn exactly_recovered(matrix: &MeasurementMatrix, truth: &[(usize, f64)], config: &SolverConfig) -> (bool, bool) {
    let mut p = DVector::zeros(matrix.ncols());
    for &(i, v) in truth {
        p[i] = v;
    }
    let d = forward(matrix, &p).unwrap();
    let solution = bloomp_solve(matrix, &d, config).unwrap();
    let mut got: Vec<(usize, f64)> = solution
        .support
        .iter()
        .copied()
        .zip(solution.powers.iter().copied())
        .collect();
    got.sort_by_key(|e| e.0);
    let exact = got.len() == truth.len()
        && got
            .iter()
            .zip(truth)
            .all(|(g, w)| g.0 == w.0 && (g.1 - w.1).abs() <= 1e-6 * w.1.max(1.0));
    let indices: Vec<usize> = truth.iter().map(|e| e.0).collect();
    (exact, brute_force(matrix, &d, truth.len()) == indices)
}

fn exact_recovery() -> Outcome {
    let start = Instant::now();
    let grid = CandidateGrid::new(8, 8, 6.25, Point::new(0.0, 0.0)).unwrap();
    let sensors = SensorArray::random_layout(12, 50.0, 10.0, 0).unwrap();
    let matrix = build_measurement_matrix(&grid, &sensors, &PathlossModel::new(3.5, 1.0).unwrap()).unwrap();
    let config = SolverConfig::default();
    let mut rng = Seed(3).trial_rng(0);

    let (mut single_ok, mut single_oracle) = (0, 0);
    for i in 0..matrix.ncols() {
        let (exact, oracle) = exactly_recovered(&matrix, &[(i, rng.random_range(0.2..3.0))], &config);
        single_ok += exact as usize;
        single_oracle += oracle as usize;
    }
    let (mut pair_ok, mut pair_oracle, mut pairs) = (0, 0, 0);
    while pairs < 500 {
        let i = rng.random_range(0..matrix.ncols());
        let j = rng.random_range(0..matrix.ncols());
        if i == j || coherence(&matrix.column(i), &matrix.column(j)).unwrap() > config.band_threshold {
            continue;
        }
        let truth = [
            (i.min(j), rng.random_range(0.2..3.0)),
            (i.max(j), rng.random_range(0.2..3.0)),
        ];
        let (exact, oracle) = exactly_recovered(&matrix, &truth, &config);
        pair_ok += exact as usize;
        pair_oracle += oracle as usize;
        pairs += 1;
    }
    let n = matrix.ncols();
    let pass = single_ok == n && pair_ok == pairs && single_oracle == n && pair_oracle == pairs;
    Outcome {
        pass: pass && within_budget(start.elapsed(), 120),
        detail: format!(
            "1-sparse exact {single_ok}/{n}, 2-sparse exact {pair_ok}/{pairs}; \
             brute force singles out the truth in {single_oracle}/{n} and {pair_oracle}/{pairs}"
        ),
    }
}

fn run(scenario: &Scenario) -> RecoveryRun {
    simulate_recover(scenario, 500, Seed(42)).unwrap()
}

fn rates(run: &RecoveryRun) -> Vec<f64> {
    run.emitters.iter().map(|e| e.location_rate).collect()
}

fn powers(run: &RecoveryRun) -> Vec<f64> {
    run.emitters.iter().map(|e| e.mean_recovered_power).collect()
}

fn fig1_reproduction(fig1: &RecoveryRun, elapsed: Duration) -> Outcome {
    let located = rates(fig1).iter().all(|&r| r >= 0.9);
    let in_band = powers(fig1)
        .iter()
        .zip(FIG1_POWERS)
        .all(|(&p, reference)| (p / reference - 1.0).abs() <= 0.5);
    Outcome {
        pass: located && in_band && within_budget(elapsed, 300),
        detail: format!(
            "location rates {} (need ≥ 0.90 each); mean powers {} vs {} ±50%",
            list(&rates(fig1), 3),
            list(&powers(fig1), 4),
            list(&FIG1_POWERS, 4)
        ),
    }
}

fn wrong_exponent() -> Outcome {
    let start = Instant::now();
    let fig2 = run(&scenario("fig2"));
    let located = rates(&fig2).iter().all(|&r| r >= 0.9);
    let depressed = powers(&fig2).iter().all(|&p| p < 0.3);
    Outcome {
        pass: located && depressed && within_budget(start.elapsed(), 300),
        detail: format!(
            "location rates {} (need ≥ 0.90 each); mean powers {} (need < 0.3 each)",
            list(&rates(&fig2), 3),
            list(&powers(&fig2), 4)
        ),
    }
}

fn resolution_table() -> Outcome {
    let start = Instant::now();
    let fig3 = scenario("fig3");
    let (anchor, target) = (fig3.anchor_m.unwrap(), fig3.target_m.unwrap());
    let mut agree = 0;
    let mut worst = 0.0f64;
    for m in [10, 20, 30] {
        let sensors = fig3.sensors.prefix(m).unwrap();
        for sigma_db in [1.0, 2.0, 3.0, 4.0, 5.0] {
            let query = ResolutionQuery {
                q1: anchor,
                q2: target,
                sensors: &sensors,
                model: &fig3.model,
                sigma_db,
            };
            let analytic = prob_correct_assignment(&query).unwrap();
            let mc = monte_carlo_resolution(&query, 10_000, Seed(42)).unwrap();
            let gap = (analytic - mc).abs();
            worst = worst.max(gap);
            agree += (gap <= 0.05) as usize;
        }
    }
    Outcome {
        pass: agree >= 14 && within_budget(start.elapsed(), 180),
        detail: format!("{agree}/15 cells within 0.05 (need ≥ 14); largest gap {worst:.4}"),
    }
}

fn detectability(fig1: &RecoveryRun) -> Outcome {
    let fig1_scenario = scenario("fig1");
    let matrix = build_measurement_matrix(&fig1_scenario.grid, &fig1_scenario.sensors, &fig1_scenario.model).unwrap();
    let norm = matrix.column_norm(1019);
    let threshold = detectability_threshold(&matrix, 1019, 2e-4).unwrap();

    let mut weak = fig1_scenario.clone();
    weak.emitters[1].power = 0.25;
    let weak_rate = run(&weak).emitters[1].location_rate;
    let strong_rate = fig1.emitters[1].location_rate;

    let norm_ok = (norm / 3.56e-4 - 1.0).abs() <= 0.1;
    let threshold_ok = (threshold / 1.1 - 1.0).abs() <= 0.1;
    Outcome {
        pass: norm_ok && threshold_ok && weak_rate < 0.2 && strong_rate > 0.9,
        detail: format!(
            "‖Φ_1019‖ = {norm:.4e} (3.56e-4 ±10%); threshold = {threshold:.4} (1.1 ±10%); \
             (19.3,20.1) recovery rate {weak_rate:.3} at power 0.25 (need < 0.2), {strong_rate:.3} at power 1 (need > 0.9)"
        ),
    }
}

fn pathloss_fit() -> Outcome {
    let distances: Vec<f64> = (0..15).map(|i| 3.0 + 2.5 * i as f64).collect();
    let noiseless: Vec<(f64, f64)> = distances.iter().map(|&d| (d, 2.0 * d.powf(-3.5))).collect();
    let exact = fit_pathloss(&noiseless, 1.0).unwrap();
    let exact_ok = (exact.n_hat - 3.5).abs() <= 1e-10 && exact.sigma_db_hat.abs() <= 1e-10;

    let reps = 10_000u64;
    let estimates: Vec<f64> = (0..reps)
        .map(|rep| {
            let mut rng = Seed(8).trial_rng(rep);
            let points: Vec<(f64, f64)> = distances
                .iter()
                .map(|&d| {
                    let shadow_db = 1.86 * rng.sample::<f64, _>(StandardNormal);
                    (d, d.powf(-3.45) * 10f64.powf(shadow_db / 10.0))
                })
                .collect();
            fit_pathloss(&points, 1.0).unwrap().n_hat
        })
        .collect();
    let (mean, se) = mean_and_se(&estimates);
    let bias = mean - 3.45;
    Outcome {
        pass: exact_ok && bias.abs() < 0.05,
        detail: format!(
            "noiseless n error {:.1e}, σ {:.1e}; bias over {reps} replicates {bias:+.4} (SE {se:.4}, need |bias| < 0.05)",
            (exact.n_hat - 3.5).abs(),
            exact.sigma_db_hat.abs()
        ),
    }
}

fn invariant_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, result: Result<(), String>| {
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };
    let runner = || {
        TestRunner::new(Config {
            cases: 64,
            failure_persistence: None,
            ..Config::default()
        })
    };

    let vectors = (
        prop::collection::vec(-10.0f64..10.0, 8),
        prop::collection::vec(-10.0f64..10.0, 8),
    );
    check(
        "coherence bounds",
        runner()
            .run(&vectors, |(x, y)| {
                let (x, y) = (DVector::from_vec(x), DVector::from_vec(y));
                prop_assume!(x.norm() > 1e-6 && y.norm() > 1e-6);
                let c = coherence(&x, &y).unwrap();
                prop_assert!((0.0..=1.0).contains(&c));
                prop_assert!((c - coherence(&y, &x).unwrap()).abs() < 1e-15);
                prop_assert!((coherence(&x, &(&x * -3.0)).unwrap() - 1.0).abs() < 1e-12);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    let grid = CandidateGrid::new(15, 15, 2.0, Point::new(0.0, 0.0)).unwrap();
    let sensors = SensorArray::random_layout(16, 30.0, 6.0, 1).unwrap();
    let model = PathlossModel::new(3.2, 1.0).unwrap();
    let matrix = build_measurement_matrix(&grid, &sensors, &model).unwrap();
    let problems = (
        prop::collection::vec((0.0f64..30.0, 0.0f64..30.0, 0.05f64..3.0), 1..4),
        0.0f64..5.0,
        any::<u64>(),
        any::<bool>(),
    );
    check(
        "solver monotonicity, nonnegativity, band exclusion",
        runner()
            .run(&problems, |(emitters, sigma_db, seed, bloomp)| {
                let emitters: Vec<Emitter> = emitters
                    .into_iter()
                    .map(|(x, y, p)| Emitter::new(Point::new(x, y), p))
                    .collect();
                let d = simulate_noisy_data_with(&emitters, &sensors, &model, sigma_db, &mut Seed(seed).trial_rng(0))
                    .unwrap();
                let config = SolverConfig::default().with_sigma_db(sigma_db);
                let strategy = if bloomp { Pursuit::Bloomp } else { Pursuit::Omp };
                let solver = PursuitSolver::new(&matrix, config.clone(), strategy).unwrap();
                let (solution, history) = solver.solve_traced(&d).unwrap();
                prop_assert!(history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
                prop_assert!(solution.powers.iter().all(|&p| p >= 0.0));
                let residual = (&d - matrix.entries() * solution.dense(matrix.ncols())).norm();
                prop_assert!((residual - solution.residual_norm).abs() <= 1e-10 * residual.max(1e-300));
                if bloomp {
                    for (a, &i) in solution.support.iter().enumerate() {
                        for &k in &solution.support[a + 1..] {
                            prop_assert!(
                                coherence(&matrix.column(i), &matrix.column(k)).unwrap() <= config.band_threshold
                            );
                        }
                    }
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    let fits = (
        prop::collection::vec(0.01f64..5.0, 1..6),
        prop::collection::vec(0.01f64..5.0, 1..6),
        0.5f64..6.0,
    );
    check(
        "quadrature monotonicity",
        runner()
            .run(&fits, |(plus, minus, sigma_db)| {
                let (plus, minus) = (fit_lognormal_sum(&plus, sigma_db), fit_lognormal_sum(&minus, sigma_db));
                let mut last = 0.0;
                for k in -20..=20 {
                    let h = difference_cdf(&plus, &minus, k as f64 * 0.5).unwrap();
                    prop_assert!((-1e-7..=1.0 + 1e-7).contains(&h));
                    prop_assert!(h >= last - 1e-7);
                    last = h;
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    let small = Scenario {
        grid,
        sensors: sensors.clone(),
        model,
        sigma_db: 3.0,
        emitters: vec![
            Emitter::new(Point::new(7.0, 9.0), 1.0),
            Emitter::new(Point::new(21.0, 20.0), 0.6),
        ],
        assumed_exponent: None,
        anchor_m: None,
        target_m: None,
        solver: None,
    };
    check(
        "seed determinism",
        runner()
            .run(&any::<u64>(), |seed| {
                let a = simulate_recover(&small, 6, Seed(seed)).unwrap();
                let b = simulate_recover(&small, 6, Seed(seed)).unwrap();
                prop_assert_eq!(a, b);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "coherence bounds, residual monotonicity, nonnegativity, band exclusion, quadrature monotonicity, seed determinism: 64 cases each".into()
        } else {
            failures.join("; ")
        },
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |number: u8, name: &str, outcome: Outcome, elapsed: Duration| {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        failed += (!outcome.pass) as usize;
        println!(
            "criterion {number} {status} [{name}] {} ({:.1} s)",
            outcome.detail,
            elapsed.as_secs_f64()
        );
    };

    let start = Instant::now();
    report(1, "shadowing moments", shadowing_moments(), start.elapsed());
    let start = Instant::now();
    report(2, "residual energy bound", residual_bound(), start.elapsed());
    let start = Instant::now();
    report(3, "exact recovery", exact_recovery(), start.elapsed());

    let start = Instant::now();
    let fig1 = run(&scenario("fig1"));
    let fig1_time = start.elapsed();
    report(4, "fig1 recovery", fig1_reproduction(&fig1, fig1_time), fig1_time);
    let start = Instant::now();
    report(5, "wrong exponent", wrong_exponent(), start.elapsed());
    let start = Instant::now();
    report(6, "resolution approximation", resolution_table(), start.elapsed());
    let start = Instant::now();
    report(7, "detectability", detectability(&fig1), start.elapsed());
    let start = Instant::now();
    report(8, "pathloss fit", pathloss_fit(), start.elapsed());
    let start = Instant::now();
    report(9, "invariant suites", invariant_suites(), start.elapsed());

    if failed > 0 {
        println!("{failed} of 9 acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
