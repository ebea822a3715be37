//! Test problems built on the Green's function of `-d^2/ds^2` on `[0, 1]`,
//! `K(s, t) = s (1 - t)` for `s <= t` and `t (1 - s)` otherwise, discretized
//! with linear finite elements on a uniform grid.
//!
//! Scaling: with hat functions `phi_i` on `n` nodes, step `h = 1/(n-1)`,
//!
//! ```text
//! A_ij = (1/h) int int K(s, t) phi_i(s) phi_j(t) ds dt
//! y_j  = (1/h) int y(t) phi_j(t) dt
//! ```
//!
//! so that `A` acts on nodal values and its spectrum approaches the
//! continuous one, `sigma_j = (j pi)^{-2}`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SoarError};
use crate::operator::DenseOperator;

pub const MIN_NODES: usize = 8;

const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_888_9),
    (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
];
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];
const GL6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152_1, 0.171_324_492_379_170_3),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691_0),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691_0),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152_1, 0.171_324_492_379_170_3),
];

fn gauss<F: Fn(f64) -> f64>(rule: &[(f64, f64)], a: f64, b: f64, f: F) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    rule.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemLabel {
    /// `y = s (1 - s)`, `x = 2`
    Example1,
    /// `y = s^4 (1 - s)^3`, `x = -6 t^2 (1 - t)(2 - 8 t + 7 t^2)`
    Example2,
    Custom,
}

impl ProblemLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemLabel::Example1 => "example1",
            ProblemLabel::Example2 => "example2",
            ProblemLabel::Custom => "custom",
        }
    }
}

impl std::fmt::Display for ProblemLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProblemLabel {
    type Err = SoarError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(ProblemLabel::Example1),
            "example2" => Ok(ProblemLabel::Example2),
            "custom" => Ok(ProblemLabel::Custom),
            _ => Err(SoarError::Config(format!("unknown problem `{s}`"))),
        }
    }
}

pub fn green_kernel(s: f64, t: f64) -> f64 {
    if s <= t {
        s * (1.0 - t)
    } else {
        t * (1.0 - s)
    }
}

#[derive(Debug, Clone)]
pub struct IntegralProblem {
    pub n: usize,
    pub op: Arc<DenseOperator>,
    pub y_exact: Vec<f64>,
    pub x_exact: Vec<f64>,
    /// Reference Hölder exponent of the source condition.
    pub p_smoothness: f64,
    pub label: ProblemLabel,
    pub nodes: Vec<f64>,
}

impl IntegralProblem {
    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }
}

fn example1_y(s: f64) -> f64 {
    s * (1.0 - s)
}

fn example2_y(s: f64) -> f64 {
    s.powi(4) * (1.0 - s).powi(3)
}

fn example2_x(t: f64) -> f64 {
    -6.0 * t * t * (1.0 - t) * (2.0 - 8.0 * t + 7.0 * t * t)
}

pub fn build_integral_problem(n: usize, label: ProblemLabel) -> Result<IntegralProblem> {
    match label {
        ProblemLabel::Example1 => build_with(n, label, example1_y, |_| 2.0, 0.1125),
        ProblemLabel::Example2 => build_with(n, label, example2_y, example2_x, 0.5625),
        ProblemLabel::Custom => Err(SoarError::Config(
            "custom problems are built with build_custom".into(),
        )),
    }
}

/// Problem with data `y` and reference solution `x` on the same kernel.
pub fn build_custom<Y, X>(n: usize, y: Y, x: X, p_smoothness: f64) -> Result<IntegralProblem>
where
    Y: Fn(f64) -> f64,
    X: Fn(f64) -> f64,
{
    build_with(n, ProblemLabel::Custom, y, x, p_smoothness)
}

fn build_with<Y, X>(n: usize, label: ProblemLabel, y: Y, x: X, p: f64) -> Result<IntegralProblem>
where
    Y: Fn(f64) -> f64,
    X: Fn(f64) -> f64,
{
    if n < MIN_NODES {
        return Err(SoarError::Config(format!("need at least {MIN_NODES} nodes, got {n}")));
    }
    let nodes = grid(n);
    Ok(IntegralProblem {
        n,
        op: Arc::new(assemble_operator(n)?),
        y_exact: project_rhs(n, y),
        x_exact: nodes.iter().map(|&t| x(t)).collect(),
        p_smoothness: p,
        label,
        nodes,
    })
}

fn grid(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n).map(|i| i as f64 * h).collect()
}

fn hat(nodes: &[f64], h: f64, j: usize, t: f64) -> f64 {
    (1.0 - (t - nodes[j]).abs() / h).max(0.0)
}

/// Galerkin matrix of the kernel, scaled by `1/h`.
pub fn assemble_operator(n: usize) -> Result<DenseOperator> {
    if n < MIN_NODES {
        return Err(SoarError::Config(format!("need at least {MIN_NODES} nodes, got {n}")));
    }
    let nodes = grid(n);
    let h = 1.0 / (n - 1) as f64;
    let ne = n - 1;

    // P_j(s) = int_0^s t phi_j, U_j(s) = int_0^s (1 - t) phi_j.
    let mut p_full = vec![0.0; n];
    let mut u_full = vec![0.0; n];
    for e in 0..ne {
        let (a, b) = (nodes[e], nodes[e + 1]);
        for j in [e, e + 1] {
            p_full[j] += gauss(&GL3, a, b, |t| t * hat(&nodes, h, j, t));
            u_full[j] += gauss(&GL3, a, b, |t| (1.0 - t) * hat(&nodes, h, j, t));
        }
    }

    let mut g = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut w = vec![0.0; n];
    for e in 0..ne {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
        for (xq, wq) in GL4 {
            let s = m + r * xq;
            // w_j(s) = int K(s, t) phi_j(t) dt = (1 - s) P_j(s) + s (U_j(1) - U_j(s))
            for j in 0..n {
                w[j] = if j + 1 <= e {
                    (1.0 - s) * p_full[j]
                } else if j >= e + 2 {
                    s * u_full[j]
                } else {
                    let left = |f: &dyn Fn(f64) -> f64| {
                        let below = if j == e && e > 0 {
                            gauss(&GL3, nodes[e - 1], a, |t| f(t) * hat(&nodes, h, j, t))
                        } else {
                            0.0
                        };
                        below + gauss(&GL3, a, s, |t| f(t) * hat(&nodes, h, j, t))
                    };
                    let p = left(&|t| t);
                    let u = left(&|t| 1.0 - t);
                    (1.0 - s) * p + s * (u_full[j] - u)
                };
            }
            let weight = wq * r;
            for (i, phi_i) in [(e, (b - s) / h), (e + 1, (s - a) / h)] {
                let c = weight * phi_i;
                for j in 0..n {
                    g[(i, j)] += c * w[j];
                }
            }
        }
    }
    g /= h;
    DenseOperator::new(g)
}

/// `(1/h) int y phi_j` for every node.
pub fn project_rhs<Y: Fn(f64) -> f64>(n: usize, y: Y) -> Vec<f64> {
    let nodes = grid(n);
    let h = 1.0 / (n - 1) as f64;
    let mut out = vec![0.0; n];
    for e in 0..n - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        out[e] += gauss(&GL6, a, b, |t| y(t) * (b - t) / h);
        out[e + 1] += gauss(&GL6, a, b, |t| y(t) * (t - a) / h);
    }
    out.iter_mut().for_each(|v| *v /= h);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyData {
    pub y_delta: Vec<f64>,
    /// `||y_delta - y||_2`, unweighted.
    pub delta: f64,
    /// `sqrt(h) ||y_delta - y||_2`, the mesh-weighted norm.
    pub delta_weighted: f64,
    pub delta_prime: f64,
    pub seed: u64,
}

/// `y_delta_j = (1 + delta' (2 U_j - 1)) y_j` with `U_j` uniform on `[0, 1)`
/// drawn from ChaCha8 seeded with `seed`.
pub fn add_noise(problem: &IntegralProblem, delta_prime: f64, seed: u64) -> Result<NoisyData> {
    if !(delta_prime >= 0.0 && delta_prime.is_finite()) {
        return Err(SoarError::Config(format!(
            "delta_prime must be nonnegative, got {delta_prime}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y_delta: Vec<f64> = problem
        .y_exact
        .iter()
        .map(|&y| {
            let u: f64 = rng.random();
            (1.0 + delta_prime * (2.0 * u - 1.0)) * y
        })
        .collect();
    let delta = crate::vecops::norm(&crate::vecops::sub(&y_delta, &problem.y_exact));
    Ok(NoisyData {
        y_delta,
        delta,
        delta_weighted: problem.h().sqrt() * delta,
        delta_prime,
        seed,
    })
}

/// Trapezoidal approximation of the `L^2(0, 1)` norm of nodal values.
pub fn trapezoid_l2_norm(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        sum += w * v * v;
    }
    (h * sum).sqrt()
}

pub fn l2_relative_error(x_approx: &[f64], problem: &IntegralProblem) -> Result<f64> {
    check_len(problem.n, x_approx.len())?;
    let h = problem.h();
    let denom = trapezoid_l2_norm(&problem.x_exact, h);
    if denom == 0.0 {
        return Err(SoarError::UndefinedMetric);
    }
    let diff = crate::vecops::sub(x_approx, &problem.x_exact);
    Ok(trapezoid_l2_norm(&diff, h) / denom)
}

/// Estimate of `||(I - P_n) A||` over the first `modes` eigenfunctions
/// `sqrt(2) sin(j pi t)` of the continuous operator, with `P_n` the `L^2`
/// projection onto the hat functions.
pub fn projection_error(n: usize, modes: usize) -> Result<f64> {
    if n < MIN_NODES {
        return Err(SoarError::Config(format!("need at least {MIN_NODES} nodes, got {n}")));
    }
    let h = 1.0 / (n - 1) as f64;
    let mut worst: f64 = 0.0;
    for j in 1..=modes {
        let jp = j as f64 * std::f64::consts::PI;
        let u = |t: f64| std::f64::consts::SQRT_2 * (jp * t).sin();
        // b_i = int u phi_i; project_rhs divides by h.
        let b: Vec<f64> = project_rhs(n, u).into_iter().map(|v| v * h).collect();
        let c = solve_mass(n, h, &b);
        let proj_sq: f64 = b.iter().zip(&c).map(|(x, y)| x * y).sum();
        let err = (1.0 - proj_sq).max(0.0).sqrt();
        worst = worst.max(err / (jp * jp));
    }
    Ok(worst)
}

/// Solves the tridiagonal P1 mass system by the Thomas algorithm.
fn solve_mass(n: usize, h: f64, b: &[f64]) -> Vec<f64> {
    let diag = |i: usize| if i == 0 || i + 1 == n { h / 3.0 } else { 2.0 * h / 3.0 };
    let off = h / 6.0;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = off / diag(0);
    d[0] = b[0] / diag(0);
    for i in 1..n {
        let m = diag(i) - off * c[i - 1];
        c[i] = off / m;
        d[i] = (b[i] - off * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn too_few_nodes() {
        assert!(matches!(build_integral_problem(7, ProblemLabel::Example1), Err(SoarError::Config(_))));
    }

    #[test]
    fn example2_endpoints_vanish() {
        assert_eq!(example2_x(0.0), 0.0);
        assert_eq!(example2_x(1.0), 0.0);
    }

    #[test]
    fn example2_solution_is_minus_second_derivative() {
        let hh = 1e-4;
        for &t in &[0.1, 0.37, 0.5, 0.81] {
            let d2 = (example2_y(t + hh) - 2.0 * example2_y(t) + example2_y(t - hh)) / (hh * hh);
            assert!((-d2 - example2_x(t)).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn constant_two_maps_to_projected_data() {
        let p = build_integral_problem(40, ProblemLabel::Example1).unwrap();
        let ax = p.op.apply(&p.x_exact).unwrap();
        for (a, b) in ax.iter().zip(&p.y_exact) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn noise_free_and_deterministic() {
        let p = build_integral_problem(20, ProblemLabel::Example1).unwrap();
        let clean = add_noise(&p, 0.0, 3).unwrap();
        assert_eq!(clean.y_delta, p.y_exact);
        assert_eq!(clean.delta, 0.0);
        let a = add_noise(&p, 1e-2, 7).unwrap();
        let b = add_noise(&p, 1e-2, 7).unwrap();
        assert_eq!(a.y_delta, b.y_delta);
        assert_ne!(a.y_delta, add_noise(&p, 1e-2, 8).unwrap().y_delta);
    }

    #[test]
    fn relative_error_examples() {
        let p = build_integral_problem(30, ProblemLabel::Example2).unwrap();
        assert_eq!(l2_relative_error(&p.x_exact, &p).unwrap(), 0.0);
        assert_relative_eq!(l2_relative_error(&vec![0.0; 30], &p).unwrap(), 1.0, max_relative = 1e-15);
        let scaled: Vec<f64> = p.x_exact.iter().map(|v| 1.1 * v).collect();
        assert!((l2_relative_error(&scaled, &p).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_reference_is_undefined() {
        let p = build_custom(10, |_| 0.0, |_| 0.0, 1.0).unwrap();
        assert!(matches!(l2_relative_error(&vec![0.0; 10], &p), Err(SoarError::UndefinedMetric)));
    }

    #[test]
    fn mass_solve_reproduces_linear_functions() {
        // The L2 projection of a linear function onto P1 is the function itself.
        let n = 12;
        let h = 1.0 / (n - 1) as f64;
        let b: Vec<f64> = project_rhs(n, |t| 3.0 * t - 1.0).into_iter().map(|v| v * h).collect();
        let c = solve_mass(n, h, &b);
        for (i, ci) in c.iter().enumerate() {
            assert!((ci - (3.0 * i as f64 * h - 1.0)).abs() < 1e-12);
        }
    }
}
