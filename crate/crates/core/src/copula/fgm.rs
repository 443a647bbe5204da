//! Farlie–Gumbel–Morgenstern copula, `c(u, v) = 1 + θ(1-2u)(1-2v)`.

use rand::Rng;

pub(super) fn log_density(theta: f64, u: &[f64]) -> f64 {
    (1.0 + theta * (1.0 - 2.0 * u[0]) * (1.0 - 2.0 * u[1])).ln()
}

pub(super) fn eval(theta: f64, u: &[f64], which: Option<usize>, grad: &mut [f64]) -> (f64, f64) {
    let a = 1.0 - 2.0 * u[0];
    let b = 1.0 - 2.0 * u[1];
    let c = 1.0 + theta * a * b;
    grad[0] = a * b / c;
    let dlog_du = match which {
        Some(0) => -2.0 * theta * b / c,
        Some(1) => -2.0 * theta * a / c,
        _ => 0.0,
    };
    (c.ln(), dlog_du)
}

/// Conditional inversion: given `u`, `C(v | u) = v + a v (1 - v)` with
/// `a = θ(1 - 2u)` is solved for `v` at a uniform level `w`.
pub(super) fn sample<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Vec<f64> {
    let u: f64 = rng.random();
    let w: f64 = rng.random();
    let a = theta * (1.0 - 2.0 * u);
    let v = if a.abs() < 1e-12 {
        w
    } else {
        let b = 1.0 + a;
        // numerically stable root of a v² - (1 + a) v + w = 0 in [0, 1]
        2.0 * w / (b + (b * b - 4.0 * a * w).max(0.0).sqrt())
    };
    vec![u, v]
}
