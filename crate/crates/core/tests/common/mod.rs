#![allow(dead_code)]

use soar::filters::DampingConfig;

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// One config per damping regime with `||A|| = 1`, each carrying a
/// log-spaced spectrum on `[1e-6, 1]`.
pub fn regimes(points: usize) -> Vec<(&'static str, DampingConfig, Vec<f64>)> {
    let grid = logspace(1e-6, 1.0, points);
    [("overdamped", 4.0), ("underdamped", 0.5), ("critical", 2.0)]
        .into_iter()
        .map(|(name, eta)| {
            let cfg = DampingConfig::new(eta, 1.0).unwrap().with_spectrum(&grid);
            (name, cfg, grid.clone())
        })
        .collect()
}

/// RK4 for `xi'' + eta xi' + lambda xi = b`.
pub fn rk4_mode(eta: f64, lambda: f64, b: f64, xi0: f64, dxi0: f64, t: f64, steps: usize) -> (f64, f64) {
    let h = t / steps as f64;
    let f = |x: f64, v: f64| (v, b - eta * v - lambda * x);
    let (mut x, mut v) = (xi0, dxi0);
    for _ in 0..steps {
        let k1 = f(x, v);
        let k2 = f(x + 0.5 * h * k1.0, v + 0.5 * h * k1.1);
        let k3 = f(x + 0.5 * h * k2.0, v + 0.5 * h * k2.1);
        let k4 = f(x + h * k3.0, v + h * k3.1);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (x, v)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
