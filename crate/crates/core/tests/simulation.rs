use arps_sde::decline::{arps_cumulative, arps_rate, model1_moments, model2_moments};
use arps_sde::sim::{
    cumulative_path, gaussian_increments, simulate_ensemble, simulate_path, NoiseSpec, Path, Scheme, TimeGrid,
};
use arps_sde::stats::ks_two_sample;
use arps_sde::{ArpsParams, ModelKind};

fn fig1(b: f64) -> ArpsParams {
    ArpsParams::with_sigma2(380.0, 3e-4, b, 1.0).unwrap()
}

#[test]
fn increments_have_standard_normal_mean_and_independent_streams() {
    let n = 1_000_000;
    let a = gaussian_increments(NoiseSpec::new(5, 0), n);
    let b = gaussian_increments(NoiseSpec::new(5, 1), n);
    assert_eq!(a, gaussian_increments(NoiseSpec::new(5, 0), n));
    let bound = 4.0 / (n as f64).sqrt();
    let mean = a.iter().sum::<f64>() / n as f64;
    assert!(mean.abs() < bound, "mean {mean}");
    let second = a.iter().map(|z| z * z).sum::<f64>() / n as f64;
    assert!((second - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt(), "second moment {second}");
    let cross = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n as f64;
    assert!(cross.abs() < bound, "cross {cross}");
}

#[test]
fn exact_const_vol_ensemble_mean_at_1000() {
    let grid = TimeGrid::new(vec![0.0, 500.0, 1000.0]).unwrap();
    let n = 100_000;
    let ens = simulate_ensemble(&fig1(0.5), ModelKind::ConstantVol, Scheme::Exact, &grid, n, 2024).unwrap();
    let m = model1_moments(&fig1(0.5), 500.0, 1000.0).unwrap();
    assert!((m.mean - 287.335).abs() < 1e-3);
    let tol = 3.0 * (771.0 / n as f64).sqrt();
    assert!((ens.mean[2] - 287.335).abs() < tol, "mean {}", ens.mean[2]);

    // Variance: SE of a Gaussian sample variance is v sqrt(2/(n-1)).
    let v_se = m.variance * (2.0 / (n as f64 - 1.0)).sqrt();
    assert!((ens.variance[2] - m.variance).abs() < 4.0 * v_se, "variance {}", ens.variance[2]);

    let s = ens.column(1);
    let t = ens.column(2);
    let (ms, mt) = (ens.mean[1], ens.mean[2]);
    let cov = s.iter().zip(&t).map(|(a, b)| (a - ms) * (b - mt)).sum::<f64>() / (n as f64 - 1.0);
    let vs = model1_moments(&fig1(0.5), 500.0, 500.0).unwrap().variance;
    let cov_true = m.covariance.unwrap();
    let cov_se = ((vs * m.variance + cov_true * cov_true) / n as f64).sqrt();
    assert!((cov - cov_true).abs() < 4.0 * cov_se, "cov {cov} vs {cov_true}");
}

#[test]
fn exact_linear_vol_log_moments() {
    let params = ArpsParams::with_sigma2(380.0, 3e-4, 0.5, 0.01).unwrap();
    let grid = TimeGrid::new(vec![0.0, 1000.0]).unwrap();
    let n = 100_000;
    let ens = simulate_ensemble(&params, ModelKind::LinearVol, Scheme::Exact, &grid, n, 77).unwrap();
    let logs: Vec<f64> = ens.column(1).iter().map(|q| q.ln()).collect();
    let mean = logs.iter().sum::<f64>() / n as f64;
    let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let m = model2_moments(&params, 1000.0).unwrap();
    let loc = m.lognormal_location.unwrap();
    let s2 = m.lognormal_scale2.unwrap();
    assert!((mean - loc).abs() < 4.0 * (s2 / n as f64).sqrt(), "log mean {mean} vs {loc}");
    assert!((var - s2).abs() < 4.0 * s2 * (2.0 / n as f64).sqrt(), "log var {var} vs {s2}");
}

#[test]
fn exact_marginal_matches_time_changed_brownian_motion() {
    let params = fig1(0.5);
    let t = 1000.0;
    let n = 10_000;
    let grid = TimeGrid::uniform(50.0, t).unwrap();
    let ens = simulate_ensemble(&params, ModelKind::ConstantVol, Scheme::Exact, &grid, n, 31).unwrap();
    let sampled = ens.column(grid.steps());
    let tau = arps_sde::decline::time_change_tau(&params, t).unwrap();
    let factor = arps_rate(&params, t).unwrap() / params.q0();
    let z = gaussian_increments(NoiseSpec::new(32, 0), n);
    let direct: Vec<f64> = z.iter().map(|z| factor * (params.q0() + params.sigma() * tau.sqrt() * z)).collect();
    let d = ks_two_sample(&sampled, &direct).unwrap();
    let crit = arps_sde::stats::ks_critical_two_sample(n, n, 0.01);
    assert!(d < crit, "KS {d} >= {crit}");
}

fn em_mean_error(dt: f64) -> f64 {
    let params = ArpsParams::new(380.0, 0.05, 0.5, 0.01).unwrap();
    let grid = TimeGrid::uniform(dt, 20.0).unwrap();
    let ens = simulate_ensemble(&params, ModelKind::ConstantVol, Scheme::EulerMaruyama, &grid, 2000, 9).unwrap();
    ens.mean[grid.steps()] - arps_rate(&params, 20.0).unwrap()
}

#[test]
fn euler_mean_error_halves_with_step() {
    let errors: Vec<f64> = [1.0, 0.5, 0.25, 0.125].iter().map(|&dt| em_mean_error(dt)).collect();
    for pair in errors.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((0.4..0.6).contains(&ratio), "errors {errors:?}");
    }
}

#[test]
fn single_path_ensemble() {
    let grid = TimeGrid::uniform(10.0, 2000.0).unwrap();
    let params = fig1(0.25);
    let ens = simulate_ensemble(&params, ModelKind::ConstantVol, Scheme::Exact, &grid, 1, 3).unwrap();
    let path = simulate_path(&params, ModelKind::ConstantVol, Scheme::Exact, &grid, NoiseSpec::new(3, 0)).unwrap();
    assert_eq!(ens.mean, path.values);
    assert!(ens.variance.iter().all(|v| *v == 0.0 || v.is_nan()));
}

#[test]
fn noiseless_cumulative_matches_closed_form() {
    let params = ArpsParams::new(380.0, 3e-4, 0.0, 0.0).unwrap();
    let grid = TimeGrid::uniform(1.0, 1000.0).unwrap();
    let path = simulate_path(&params, ModelKind::ConstantVol, Scheme::Exact, &grid, NoiseSpec::new(0, 0)).unwrap();
    let cum = cumulative_path(&path);
    let exact = arps_cumulative(&params, 1000.0).unwrap();
    assert!((exact - 328296.9).abs() < 0.1);
    let last = *cum.values.last().unwrap();
    assert!(((last - exact) / exact).abs() < 0.01);
    assert_eq!(cum.values[0], 0.0);
}

#[test]
fn cumulative_of_constant_is_linear() {
    let grid = TimeGrid::new(vec![0.0, 0.5, 2.0, 7.25]).unwrap();
    let path = Path::new(grid, vec![3.0; 4]).unwrap();
    let cum = cumulative_path(&path);
    assert_eq!(cum.values, vec![0.0, 1.5, 6.0, 21.75]);
}

#[test]
fn linear_vol_paths_increase_with_b_under_common_noise() {
    let grid = TimeGrid::uniform(5.0, 10_000.0).unwrap();
    let noise = NoiseSpec::new(8, 4);
    let mut previous: Option<Vec<f64>> = None;
    for b in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let params = ArpsParams::with_sigma2(380.0, 3e-4, b, 0.01).unwrap();
        let path = simulate_path(&params, ModelKind::LinearVol, Scheme::Exact, &grid, noise).unwrap();
        if let Some(prev) = &previous {
            assert!(prev.iter().zip(&path.values).all(|(a, c)| a <= c), "b = {b}");
        }
        previous = Some(path.values);
    }
}
