use g2kit_core::regression::{g2_curve, steady_state};
use g2kit_core::sde::{sample_noise, simulate_curve, simulate_ensemble, step, EnsembleConfig, Scheme};
use g2kit_core::{Complex, DomainError, Error, SystemParams, TauGrid};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// Sample mean and standard error of the mean.
fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn noise_increment_moments() {
    let n = 1_000_000;
    let dt = 0.01;
    for p in [
        SystemParams::real(1.0, 0.0, 0.0, 1.0),
        SystemParams::new(1.0, 0.2, Complex::new(0.3, -0.2), 0.5),
        SystemParams::real(1.0, 0.2, -0.4, 0.4),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws: Vec<Complex> = (0..n).map(|_| sample_noise(&p, dt, &mut rng).unwrap().value).collect();
        let sigma_over_root_n = (p.noise_c * dt).sqrt() / (n as f64).sqrt();
        let (mx, _) = mean_se(&draws.iter().map(|e| e.re).collect::<Vec<_>>());
        let (my, _) = mean_se(&draws.iter().map(|e| e.im).collect::<Vec<_>>());
        assert!(Complex::new(mx, my).norm() <= 4.0 * sigma_over_root_n);

        let target_sq = -p.noise_b * dt;
        let (sq_re, se_re) = mean_se(&draws.iter().map(|e| (e * e).re).collect::<Vec<_>>());
        let (sq_im, se_im) = mean_se(&draws.iter().map(|e| (e * e).im).collect::<Vec<_>>());
        assert!((sq_re - target_sq.re).abs() <= 4.0 * se_re, "{sq_re} vs {}", target_sq.re);
        assert!((sq_im - target_sq.im).abs() <= 4.0 * se_im.max(1e-300), "{sq_im} vs {}", target_sq.im);

        let (abs_sq, se_abs) = mean_se(&draws.iter().map(|e| e.norm_sqr()).collect::<Vec<_>>());
        assert!((abs_sq - p.noise_c * dt).abs() <= 4.0 * se_abs);
    }
}

#[test]
fn noise_rejects_non_psd_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [SystemParams::real(1.0, 0.0, 0.6, 0.5), SystemParams::new(1.0, 0.0, Complex::new(0.3, 0.45), 0.5)] {
        assert!(matches!(sample_noise(&p, 0.1, &mut rng), Err(Error::Domain(DomainError::Noise { .. }))));
    }
}

#[test]
fn exact_step_matches_ou_increment_covariance() {
    let p = SystemParams::new(1.0, 0.2, Complex::new(0.1, 0.2), 0.5);
    let dt = 0.7;
    let (lm, lp) = (p.lambda_minus(), p.lambda_plus());
    // ∫₀^dt e^{−(kᵢ+kⱼ)s} ds with kₓ = λ₋/2, k_y = λ₊/2
    let var_x = 0.5 * (p.noise_c - p.noise_b.re) * (1.0 - (-lm * dt).exp()) / lm;
    let var_y = 0.5 * (p.noise_c + p.noise_b.re) * (1.0 - (-lp * dt).exp()) / lp;
    let cov_xy = -0.5 * p.noise_b.im * (1.0 - (-p.mu * dt).exp()) / p.mu;

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let samples: Vec<Complex> =
        (0..1_000_000).map(|_| step(&p, Complex::new(0.0, 0.0), dt, &mut rng, Scheme::ExactOu).unwrap()).collect();
    for (values, target) in [
        (samples.iter().map(|a| a.re * a.re).collect::<Vec<_>>(), var_x),
        (samples.iter().map(|a| a.im * a.im).collect(), var_y),
        (samples.iter().map(|a| a.re * a.im).collect(), cov_xy),
    ] {
        let (m, se) = mean_se(&values);
        assert!((m - target).abs() <= 3.0 * se, "{m} vs {target} (se {se})");
    }
}

#[test]
fn raw_fourth_moment_obeys_isserlis() {
    let p = SystemParams::real(1.0, 0.2, 0.1, 0.5);
    let grid = TauGrid::uniform(5.0, 10).unwrap();
    let cfg = EnsembleConfig { n_traj: 100_000, seed: 11, dt: 0.01, t_relax: 0.0, scheme: Scheme::ExactOu };
    let est = simulate_ensemble(&p, &cfg, &grid).unwrap();
    for (k, (r, se)) in est.isserlis_residual.iter().zip(&est.isserlis_err).enumerate() {
        assert!(r.abs() <= 3.0 * se, "tau={}: residual {r} se {se}", grid.points()[k]);
    }
    let ss = steady_state(&p).unwrap();
    assert!((est.n - ss.n).abs() <= 4.0 * est.n_err);
}

#[test]
fn standard_errors_scale_as_inverse_root_n() {
    let p = SystemParams::real(1.0, 0.2, 0.0, 0.5);
    let grid = TauGrid::uniform(5.0, 10).unwrap();
    let run = |n_traj| {
        let cfg = EnsembleConfig { n_traj, seed: 5, dt: 0.01, t_relax: 0.0, scheme: Scheme::ExactOu };
        simulate_curve(&p, &cfg, &grid).unwrap()
    };
    let (small, large) = (run(20_000), run(80_000));
    for (a, b) in small.g2_err.unwrap().iter().zip(large.g2_err.unwrap()) {
        let ratio = a / b;
        assert!((ratio / 2.0 - 1.0).abs() <= 0.2, "ratio {ratio}");
    }
}

#[test]
fn relaxation_from_vacuum_reaches_the_steady_state() {
    let p = SystemParams::real(1.0, 0.2, 0.0, 0.5);
    let grid = TauGrid::uniform(5.0, 10).unwrap();
    let cfg = EnsembleConfig { n_traj: 100_000, seed: 9, dt: 0.05, t_relax: 30.0, scheme: Scheme::ExactOu };
    let curve = simulate_curve(&p, &cfg, &grid).unwrap();
    let exact = g2_curve(&p, &grid).unwrap();
    let (g2, err) = (curve.g2.unwrap(), curve.g2_err.unwrap());
    for k in 0..grid.len() {
        assert!((g2[k] - exact.g2.as_ref().unwrap()[k]).abs() <= 4.0 * err[k]);
    }
}

#[test]
fn euler_maruyama_bias_is_first_order() {
    let p = SystemParams::real(1.0, 0.2, 0.0, 0.5);
    let grid = TauGrid::new(vec![0.0, 0.5]).unwrap();
    let (kx, ky) = (0.5 * p.lambda_minus(), 0.5 * p.lambda_plus());
    let (sx, sy) = (0.5 * p.noise_c, 0.5 * p.noise_c);
    // stationary variance of x ← (1 − kh)x + N(0, s·h) is s/(2k − k²h)
    let em_occupation = |h: f64| sx / (2.0 * kx - kx * kx * h) + sy / (2.0 * ky - ky * ky * h);
    let n_exact = steady_state(&p).unwrap().n;

    let mut biases = Vec::new();
    for dt in [0.0625, 0.03125] {
        let cfg = EnsembleConfig { n_traj: 400_000, seed: 3, dt, t_relax: 15.0, scheme: Scheme::EulerMaruyama };
        let est = simulate_ensemble(&p, &cfg, &grid).unwrap();
        assert!((est.n - em_occupation(dt)).abs() <= 4.0 * est.n_err, "dt={dt}: {} vs {}", est.n, em_occupation(dt));
        biases.push(est.n - n_exact);
    }
    let predicted = (em_occupation(0.0625) - n_exact) / (em_occupation(0.03125) - n_exact);
    assert!((predicted - 2.0).abs() < 0.05);
    assert!(biases[0] > 0.0 && biases[1] < biases[0]);
}

#[test]
fn runs_are_reproducible() {
    let p = SystemParams::new(1.0, 0.2, Complex::new(0.1, 0.05), 0.5);
    let grid = TauGrid::uniform(2.0, 8).unwrap();
    for scheme in [Scheme::ExactOu, Scheme::EulerMaruyama] {
        let cfg = EnsembleConfig { n_traj: 3_000, seed: 42, dt: 0.02, t_relax: 0.0, scheme };
        assert_eq!(simulate_curve(&p, &cfg, &grid).unwrap(), simulate_curve(&p, &cfg, &grid).unwrap());
        let other = EnsembleConfig { seed: 43, ..cfg };
        assert_ne!(simulate_curve(&p, &cfg, &grid).unwrap(), simulate_curve(&p, &other, &grid).unwrap());
    }
}
