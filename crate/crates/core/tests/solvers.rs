mod common;

use approx::assert_relative_eq;
use common::{logspace, max_abs_diff, norm};
use nalgebra::DMatrix;
use proptest::prelude::*;
use soar::bench::fit_loglog;
use soar::filters::{closed_form_solution, DampingConfig};
use soar::problems::{add_noise, build_integral_problem, l2_relative_error, ProblemLabel};
use soar::solvers::*;
use soar::stopping::{StopReason, StoppingRule};
use soar::{DenseOperator, SoarError};

fn random_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(m, n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

fn run_steps(op: &DenseOperator, y: &[f64], cfg: &SolverConfig, steps: usize) -> Vec<SolverState> {
    let mut s = SolverState::initial(op, y, cfg).unwrap();
    let mut out = vec![s.clone()];
    for _ in 0..steps {
        s = step(&s, op, y, cfg).unwrap();
        out.push(s.clone());
    }
    out
}

#[test]
fn verlet_scalar_hand_values() {
    let op = DenseOperator::identity(1).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, 3.0)
        .unwrap()
        .with_dt(0.1)
        .with_x0(vec![1.0]);
    let s = run_steps(&op, &[0.0], &cfg, 1);
    let v_half = -0.05 / 1.15;
    assert_relative_eq!(v_half, -0.043478, max_relative = 1e-5);
    assert_relative_eq!(s[1].x[0], 1.0 + 0.1 * v_half, max_relative = 1e-15);
    assert_relative_eq!(s[1].x[0], 0.995652, max_relative = 1e-6);
    let v1 = v_half + 0.05 * (-s[1].x[0] - 3.0 * v_half);
    assert_relative_eq!(s[1].v[0], v1, max_relative = 1e-15);
}

#[test]
fn euler_scalar_hand_values() {
    let op = DenseOperator::identity(1).unwrap();
    let cfg = SolverConfig::new(Method::SoarEuler, &op, 3.0)
        .unwrap()
        .with_dt(0.1)
        .with_x0(vec![1.0]);
    let s = run_steps(&op, &[0.0], &cfg, 2);
    assert_eq!(s[1].x[0], 1.0);
    assert_relative_eq!(s[1].v[0], -0.1, max_relative = 1e-15);
    assert_relative_eq!(s[2].x[0], 0.99, max_relative = 1e-15);
}

#[test]
fn landweber_scalar() {
    let op = DenseOperator::diagonal(&[2.0]).unwrap();
    let cfg = SolverConfig::new(Method::Landweber, &op, 1.0).unwrap().with_dt(0.2);
    let s = run_steps(&op, &[1.0], &cfg, 40);
    assert_relative_eq!(s[1].x[0], 0.4, max_relative = 1e-15);
    assert_relative_eq!(s[2].x[0], 0.48, max_relative = 1e-15);
    for w in s.windows(2) {
        let (a, b) = ((0.5 - w[0].x[0]).abs(), (0.5 - w[1].x[0]).abs());
        assert_relative_eq!(b, 0.2 * a, max_relative = 1e-9, epsilon = 1e-15);
    }
}

#[test]
fn nesterov_first_step_is_gradient_step() {
    let op = DenseOperator::new(random_matrix(4, 3, 5)).unwrap();
    let y = [1.0, -0.5, 0.2, 0.3];
    let x0 = vec![0.1, 0.2, -0.3];
    let nes = SolverConfig::new(Method::Nesterov, &op, 1.0).unwrap().with_x0(x0.clone());
    let lw = SolverConfig::new(Method::Landweber, &op, 1.0).unwrap().with_x0(x0).with_dt(nes.dt);
    let a = run_steps(&op, &y, &nes, 1);
    let b = run_steps(&op, &y, &lw, 1);
    assert_eq!(a[1].x, b[1].x);
    let a2 = run_steps(&op, &y, &nes, 2);
    let b2 = run_steps(&op, &y, &lw, 2);
    assert!(max_abs_diff(&a2[2].x, &b2[2].x) > 0.0);
}

#[test]
fn cgne_finite_termination() {
    let op = DenseOperator::from_row_major(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
    let x_true = [1.0, -2.0, 0.5];
    let y = op.apply(&x_true).unwrap();
    let cfg = SolverConfig::new(Method::Cgne, &op, 1.0).unwrap();
    let s = run_steps(&op, &y, &cfg, 3);
    assert!(max_abs_diff(&s[3].x, &x_true) < 1e-10);
    let err = step(&s[3], &op, &y, &cfg);
    assert!(s[3].residual_norm < 1e-12);
    if let Err(e) = err {
        assert!(matches!(e, SoarError::Breakdown { step: 3 }));
    }
}

#[test]
fn cgne_breakdown_on_exact_start() {
    let op = DenseOperator::identity(2).unwrap();
    let cfg = SolverConfig::new(Method::Cgne, &op, 1.0).unwrap().with_x0(vec![1.0, 1.0]);
    let s = SolverState::initial(&op, &[1.0, 1.0], &cfg).unwrap();
    assert!(matches!(step(&s, &op, &[1.0, 1.0], &cfg), Err(SoarError::Breakdown { step: 0 })));
}

#[test]
fn cgne_recurrence_stays_on_true_residual() {
    let p = build_integral_problem(60, ProblemLabel::Example2).unwrap();
    let cfg = SolverConfig::new(Method::Cgne, &p.op, 1.0).unwrap();
    let noisy = add_noise(&p, 1e-2, 1).unwrap();
    let s = run_steps(&p.op, &noisy.y_delta, &cfg, 70);
    for st in &s[60..] {
        let ax = p.op.apply(&st.x).unwrap();
        let true_res: Vec<f64> = ax.iter().zip(&noisy.y_delta).map(|(a, b)| a - b).collect();
        assert_relative_eq!(st.residual_norm, norm(&true_res), max_relative = 1e-6);
    }
}

#[test]
fn chebyshev_golden_trajectory() {
    let text = include_str!("fixtures/chebyshev_golden.csv");
    let sigma = [1.0, 0.8, 0.5, 0.3, 0.1, 0.03];
    let x_dag = [1.0, -2.0, 0.5, 3.0, -1.0, 2.0];
    let op = DenseOperator::diagonal(&sigma).unwrap();
    // The fixture scales by the exact norm; take it from the SVD.
    op.svd().unwrap();
    let y = op.apply(&x_dag).unwrap();
    let cfg = SolverConfig::new(Method::Chebyshev, &op, 1.0).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let states = run_steps(&op, &y, &cfg, rows.len() - 1);
    for (row, st) in rows.iter().zip(&states) {
        assert_eq!(row[0] as usize, st.k);
        assert!(max_abs_diff(&row[1..], &st.x) < 1e-11, "k = {} diff {}", st.k, max_abs_diff(&row[1..], &st.x));
    }
}

#[test]
fn nu_coefficients_first_steps() {
    assert_eq!(nu_method_coefficients(0.5, 1), (0.0, 4.0 / 3.0));
    let (mu, om) = nu_method_coefficients(0.5, 2);
    assert_relative_eq!(mu, 1.0 * 1.0 * 4.0 / (2.0 * 5.0 * 2.0), max_relative = 1e-15);
    assert_relative_eq!(om, 4.0 * 4.0 * 1.5 / (2.0 * 5.0), max_relative = 1e-15);
}

#[test]
fn fixed_point_for_every_method() {
    let op = DenseOperator::new(random_matrix(5, 4, 8)).unwrap();
    let x = vec![0.3, -0.2, 0.5, 1.0];
    let y = op.apply(&x).unwrap();
    for m in Method::ALL {
        if m == Method::Cgne {
            continue;
        }
        let cfg = SolverConfig::new(m, &op, 1.0).unwrap().with_x0(x.clone());
        let s = run_steps(&op, &y, &cfg, 50);
        let last = s.last().unwrap();
        assert!(max_abs_diff(&last.x, &x) < 1e-14, "{m}");
        assert!(norm(&last.v) < 1e-14);
    }
}

fn order_errors(method: Method, dts: &[f64]) -> Vec<f64> {
    let sigma: Vec<f64> = (1..=10).map(|j| 1.0 / j as f64).collect();
    let op = DenseOperator::diagonal(&sigma).unwrap();
    let eta = 0.8;
    let x0: Vec<f64> = (0..10).map(|i| 1.0 - 0.1 * i as f64).collect();
    let v0: Vec<f64> = (0..10).map(|i| 0.05 * i as f64).collect();
    let y: Vec<f64> = (0..10).map(|i| 0.2 * ((i as f64) * 0.7).sin()).collect();
    let t = 5.0;
    let dcfg = DampingConfig::from_operator(&op, eta).unwrap();
    let (xc, _) = closed_form_solution(&op, &dcfg, &x0, &v0, &y, t).unwrap();
    dts.iter()
        .map(|&dt| {
            let cfg = SolverConfig::new(method, &op, eta)
                .unwrap()
                .with_dt(dt)
                .with_x0(x0.clone())
                .with_v0(v0.clone());
            let steps = (t / dt).round() as usize;
            let s = run_steps(&op, &y, &cfg, steps);
            max_abs_diff(&s[steps].x, &xc)
        })
        .collect()
}

#[test]
fn verlet_is_second_order() {
    let e = order_errors(Method::SoarStormerVerlet, &[1e-2, 5e-3, 2.5e-3]);
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "{e:?}");
    }
}

#[test]
fn euler_is_first_order() {
    let e = order_errors(Method::SoarEuler, &[1e-2, 5e-3, 2.5e-3]);
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..=2.4).contains(&ratio), "{e:?}");
    }
}

/// Literal recurrence `x+ = x + mu (x - x_prev) + omega A^T (y - A x)`.
#[test]
fn euler_equals_three_term_recurrence() {
    let op = DenseOperator::new(random_matrix(5, 5, 42)).unwrap();
    let y = [0.3, -1.0, 0.2, 0.7, 0.1];
    let x0 = vec![0.5, 0.1, -0.4, 0.0, 0.9];
    let v0 = vec![0.2, -0.1, 0.0, 0.3, -0.2];
    let eta = 0.7;
    let cfg = SolverConfig::new(Method::SoarEuler, &op, eta).unwrap().with_x0(x0.clone()).with_v0(v0.clone());
    let s = run_steps(&op, &y, &cfg, 100);
    let (mu, omega) = cfg.semi_iterative_coefficients();
    assert_eq!(mu, 1.0 - cfg.dt * eta);
    assert_eq!(omega, cfg.dt * cfg.dt);
    let mut xp = x0.clone();
    let mut x: Vec<f64> = x0.iter().zip(&v0).map(|(a, b)| a + cfg.dt * b).collect();
    assert!(max_abs_diff(&x, &s[1].x) <= 1e-12);
    for st in &s[2..] {
        let ax = op.apply(&x).unwrap();
        let r: Vec<f64> = y.iter().zip(&ax).map(|(a, b)| a - b).collect();
        let g = op.apply_adjoint(&r).unwrap();
        let next: Vec<f64> = (0..5).map(|i| x[i] + mu * (x[i] - xp[i]) + omega * g[i]).collect();
        xp = std::mem::replace(&mut x, next);
        assert!(max_abs_diff(&x, &st.x) <= 1e-12, "k = {}", st.k);
    }
}

#[test]
fn mode_eigenvalue_examples() {
    let (eta, dt) = (0.7, 0.4);
    let [p, m] = sv_mode_eigenvalues(eta, dt, 0.0);
    assert_eq!(p, (1.0, 0.0));
    assert_relative_eq!(m.0, (2.0 - dt * eta) / (2.0 + dt * eta), max_relative = 1e-15);
    for (re, im) in sv_mode_eigenvalues(eta, dt, 2.0) {
        assert!(im != 0.0);
        assert_relative_eq!(re * re + im * im, (2.0 - dt * eta) / (2.0 + dt * eta), max_relative = 1e-14);
    }
}

/// `B` assembled column by column from single steps with zero data.
fn stepped_matrix(op: &DenseOperator, cfg: &SolverConfig) -> DMatrix<f64> {
    let n = op.cols();
    let y = vec![0.0; op.rows()];
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        let mut x0 = vec![0.0; n];
        let mut v0 = vec![0.0; n];
        if j < n {
            x0[j] = 1.0;
        } else {
            v0[j - n] = 1.0;
        }
        let c = cfg.clone().with_x0(x0).with_v0(v0);
        let s = step(&SolverState::initial(op, &y, &c).unwrap(), op, &y, &c).unwrap();
        for i in 0..n {
            b[(i, j)] = s.x[i];
            b[(n + i, j)] = s.v[i];
        }
    }
    b
}

#[test]
fn iteration_matrix_matches_stepping() {
    let op = DenseOperator::new(random_matrix(6, 4, 11)).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, 0.9).unwrap();
    let b = iteration_matrix(&op, &cfg).unwrap();
    assert!((b - stepped_matrix(&op, &cfg)).abs().max() < 1e-13);
}

#[test]
fn spectrum_matches_dense_eigensolve() {
    let op = DenseOperator::new(random_matrix(7, 5, 12)).unwrap();
    for eta in [0.3, 1.0, 6.0] {
        let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, eta).unwrap();
        let mut formula = iteration_matrix_spectrum(&op, &cfg).unwrap();
        let mut dense: Vec<f64> = iteration_matrix(&op, &cfg)
            .unwrap()
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .collect();
        formula.sort_by(f64::total_cmp);
        dense.sort_by(f64::total_cmp);
        assert!(max_abs_diff(&formula, &dense) < 1e-6, "eta = {eta}");
    }
}

#[test]
fn step_size_violation_is_config_error() {
    let op = DenseOperator::diagonal(&[1.0, 0.5]).unwrap();
    let bad = SolverConfig::new(Method::SoarStormerVerlet, &op, 0.1).unwrap().with_dt(1.5);
    let e = SolverState::initial(&op, &[0.0, 0.0], &bad).unwrap_err();
    assert!(matches!(&e, SoarError::Config(m) if m.contains("step size")));
    assert!(SolverState::initial(&op, &[0.0, 0.0], &bad.clone().with_unstable_step(true)).is_ok());
    let lw = SolverConfig::new(Method::Landweber, &op, 1.0).unwrap().with_dt(2.1);
    assert!(SolverState::initial(&op, &[0.0, 0.0], &lw).is_err());
    let nes = SolverConfig::new(Method::Nesterov, &op, 1.0).unwrap().with_nesterov_alpha(3.0);
    assert!(SolverState::initial(&op, &[0.0, 0.0], &nes).is_err());
}

#[test]
fn method_mismatch_is_rejected() {
    let op = DenseOperator::identity(2).unwrap();
    let cfg = SolverConfig::new(Method::Landweber, &op, 1.0).unwrap();
    let s = SolverState::initial(&op, &[1.0, 0.0], &cfg).unwrap();
    assert!(step_soar_sv(&s, &op, &[1.0, 0.0], &cfg).is_err());
    assert!(iteration_matrix_spectrum(&op, &cfg).is_err());
}

#[test]
fn divergence_names_the_step() {
    let op = DenseOperator::identity(1).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, 1.0)
        .unwrap()
        .with_dt(50.0)
        .with_unstable_step(true)
        .with_x0(vec![1.0]);
    let e = run(&op, &[0.0], &cfg, &StoppingRule::max_iter_only()).unwrap_err();
    assert!(matches!(e, SoarError::Diverged { step } if step > 1));
}

/// Only in the fine-step regime: at steps near the stability limit the
/// residual-plus-velocity energy of the discrete scheme can rise.
#[test]
fn energy_trend_on_test_matrix() {
    let p = build_integral_problem(100, ProblemLabel::Example1).unwrap();
    let noisy = add_noise(&p, 1e-3, 0).unwrap();
    let norm = p.op.operator_norm();
    for eta in [norm, 2.5648e-2, 2.5648e-3] {
        let cfg = SolverConfig::new(Method::SoarStormerVerlet, &p.op, eta)
            .unwrap()
            .with_dt(max_soar_dt(norm, eta) / 50.0)
            .with_x0(vec![1.0; 100])
            .with_max_iter(5000);
        let out = run(&p.op, &noisy.y_delta, &cfg, &StoppingRule::max_iter_only()).unwrap();
        assert!(out.energy_monotone, "eta = {eta}");
        assert_eq!(out.decision.reason, StopReason::MaxIterExceeded);
        assert!(!out.decision.fired);
    }
}

#[test]
fn immediate_stop_when_noise_dominates() {
    let op = DenseOperator::identity(2).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, 1.0).unwrap();
    let out = run(&op, &[0.1, 0.1], &cfg, &StoppingRule::morozov(2.0, 1.0).unwrap()).unwrap();
    assert_eq!(out.decision.k_star, 0);
    assert_eq!(out.decision.reason, StopReason::ImmediateStop);
    assert!(out.decision.fired);
}

#[test]
fn example1_discrepancy_run() {
    let p = build_integral_problem(400, ProblemLabel::Example1).unwrap();
    let noisy = add_noise(&p, 1e-3, 0).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &p.op, 2.5648e-4)
        .unwrap()
        .with_dt(19.4946)
        .with_unstable_step(true)
        .with_x0(vec![1.0; 400]);
    let out = run(&p.op, &noisy.y_delta, &cfg, &StoppingRule::morozov(2.0, noisy.delta).unwrap()).unwrap();
    assert!((500..=5000).contains(&out.decision.k_star), "{}", out.decision.k_star);
    let err = l2_relative_error(&out.state.x, &p).unwrap();
    assert!((0.13 / 2.0..=0.13 * 2.0).contains(&err), "{err}");
}

#[test]
fn noise_free_residual_decay() {
    let sigma: Vec<f64> = (1..=30).map(|j| 1.0 / j as f64).collect();
    let op = DenseOperator::diagonal(&sigma).unwrap();
    let y = op.apply(&vec![1.0; 30]).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, 1.0)
        .unwrap()
        .with_dt(0.05)
        .with_max_iter(40_000)
        .with_thinning(Thinning { dense_until: usize::MAX, stride: 1 });
    let out = run(&op, &y, &cfg, &StoppingRule::max_iter_only()).unwrap();
    let tail: Vec<_> = out.trajectory.iter().filter(|p| p.t >= 200.0).collect();
    for w in tail.windows(2) {
        assert!(w[1].residual_norm <= w[0].residual_norm * (1.0 + 1e-12));
    }
    let ts: Vec<f64> = tail.iter().map(|p| p.t).collect();
    let rs: Vec<f64> = tail.iter().map(|p| p.residual_norm).collect();
    let fit = fit_loglog(&ts, &rs).unwrap();
    assert!(fit.slope <= -0.5, "{}", fit.slope);
}

#[test]
fn trajectory_thinning_and_time() {
    let op = DenseOperator::identity(1).unwrap();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &op, 1.0)
        .unwrap()
        .with_dt(0.25)
        .with_x0(vec![1.0])
        .with_max_iter(45)
        .with_thinning(Thinning { dense_until: 20, stride: 10 });
    let out = run(&op, &[0.0], &cfg, &StoppingRule::max_iter_only()).unwrap();
    let ks: Vec<usize> = out.trajectory.iter().map(|p| p.k).collect();
    assert_eq!(&ks[..21], &(0..=20).collect::<Vec<_>>()[..]);
    assert_eq!(&ks[21..], &[30, 40, 45]);
    for p in &out.trajectory {
        assert_relative_eq!(p.t, p.k as f64 * 0.25, max_relative = 1e-12);
    }
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &out.trajectory).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("k,t,residual_norm,velocity_norm,energy\n"));
    assert_eq!(text.lines().count(), out.trajectory.len() + 1);
}

#[test]
fn default_step_sizes() {
    let op = DenseOperator::diagonal(&[2.0, 1.0]).unwrap();
    let sv = SolverConfig::new(Method::SoarStormerVerlet, &op, 0.5).unwrap();
    assert_relative_eq!(sv.dt, 0.9 * (2f64.sqrt() / 2.0), max_relative = 1e-9);
    let sv = SolverConfig::new(Method::SoarStormerVerlet, &op, 10.0).unwrap();
    assert_relative_eq!(sv.dt, 0.9 * 0.2, max_relative = 1e-9);
    assert_eq!(SolverConfig::new(Method::Nesterov, &op, 1.0).unwrap().nesterov_alpha, 3.1);
}

fn arb_method() -> impl Strategy<Value = Method> {
    proptest::sample::select(Method::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stable_steps_keep_moduli_bounded(
        eta in 1e-3f64..10.0,
        frac in 0.01f64..=1.0,
        lambdas in proptest::collection::vec(0.0f64..4.0, 1..20),
    ) {
        let l_max = lambdas.iter().copied().fold(0.0, f64::max);
        let dt = frac * max_soar_dt(l_max.sqrt(), eta);
        for &l in &lambdas {
            for (re, im) in sv_mode_eigenvalues(eta, dt, l) {
                prop_assert!(re.hypot(im) <= 1.0 + 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn step_increments_k_and_leaves_inputs(method in arb_method(), seed in any::<u64>()) {
        let op = DenseOperator::new(random_matrix(5, 4, seed)).unwrap();
        let before = op.matrix().clone();
        let y = vec![0.4, -0.2, 0.1, 0.0, 0.3];
        let y_before = y.clone();
        let cfg = SolverConfig::new(method, &op, 0.8).unwrap().with_x0(vec![0.1; 4]);
        let s0 = SolverState::initial(&op, &y, &cfg).unwrap();
        let s0_copy = s0.clone();
        match step(&s0, &op, &y, &cfg) {
            Ok(s1) => {
                prop_assert_eq!(s1.k, s0.k + 1);
                prop_assert!((s1.t - cfg.dt).abs() <= 1e-12 * cfg.dt);
            }
            Err(SoarError::Breakdown { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
        prop_assert_eq!(&s0, &s0_copy);
        prop_assert_eq!(op.matrix(), &before);
        prop_assert_eq!(&y, &y_before);
    }

    #[test]
    fn runs_are_deterministic(method in arb_method(), seed in 0u64..1000) {
        let op = DenseOperator::new(random_matrix(6, 4, seed)).unwrap();
        let y = vec![0.4, -0.2, 0.1, 0.0, 0.3, 0.2];
        let cfg = SolverConfig::new(method, &op, 0.8).unwrap().with_max_iter(30);
        let rule = StoppingRule::morozov(2.0, 0.01).unwrap();
        let a = run(&op, &y, &cfg, &rule);
        let b = run(&op, &y, &cfg, &rule);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.state, b.state);
                prop_assert_eq!(a.decision, b.decision);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false),
        }
    }
}

#[test]
fn logspace_helper_sanity() {
    let g = logspace(1.0, 100.0, 3);
    assert_relative_eq!(g[1], 10.0, max_relative = 1e-14);
}
