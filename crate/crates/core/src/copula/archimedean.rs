//! Exchangeable Clayton copula,
//! `C(u) = (Σ u_i^{-δ} - d + 1)^{-1/δ}`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

/// `ln S` with `S = 1 + Σ (u_i^{-δ} - 1)`, plus each `ln u_i^{-δ}`.
fn log_generator_sum(delta: f64, u: &[f64], powers: &mut [f64]) -> f64 {
    let mut max_p = f64::NEG_INFINITY;
    for (p, &x) in powers.iter_mut().zip(u) {
        *p = -delta * x.ln();
        max_p = max_p.max(*p);
    }
    if max_p < 700.0 {
        powers.iter().map(|p| p.exp_m1()).sum::<f64>().ln_1p()
    } else {
        let s: f64 = powers.iter().map(|p| (p - max_p).exp()).sum();
        let big = max_p + s.ln();
        big + (-(u.len() as f64 - 1.0) * (-big).exp()).ln_1p()
    }
}

pub(super) fn clayton_log_density(delta: f64, u: &[f64]) -> f64 {
    let mut powers = vec![0.0; u.len()];
    clayton_core(delta, u, &mut powers).0
}

fn clayton_core(delta: f64, u: &[f64], powers: &mut [f64]) -> (f64, f64) {
    let d = u.len() as f64;
    let ln_s = log_generator_sum(delta, u, powers);
    let norm: f64 = (1..u.len()).map(|k| (k as f64 * delta).ln_1p()).sum();
    let sum_ln_u: f64 = u.iter().map(|x| x.ln()).sum();
    let log_density = norm - (delta + 1.0) * sum_ln_u - (1.0 / delta + d) * ln_s;
    (log_density, ln_s)
}

pub(super) fn clayton_eval(delta: f64, u: &[f64], which: Option<usize>, grad: &mut [f64]) -> (f64, f64) {
    let dim = u.len();
    let d = dim as f64;
    let mut powers = vec![0.0; dim];
    let (log_density, ln_s) = clayton_core(delta, u, &mut powers);

    // d/dδ of each term; u_i^{-δ}/S is formed in log space
    let d_norm: f64 = (1..dim).map(|k| k as f64 / (1.0 + k as f64 * delta)).sum();
    let sum_ln_u: f64 = u.iter().map(|x| x.ln()).sum();
    let ds_over_s: f64 = powers
        .iter()
        .zip(u)
        .map(|(p, x)| (p - ln_s).exp() * (-x.ln()))
        .sum();
    grad[0] = d_norm - sum_ln_u + ln_s / (delta * delta) - (1.0 / delta + d) * ds_over_s;

    let dlog_du = match which {
        Some(k) => (-(delta + 1.0) + (1.0 + d * delta) * (powers[k] - ln_s).exp()) / u[k],
        None => 0.0,
    };
    (log_density, dlog_du)
}

/// Marshall–Olkin frailty construction: `V ~ Gamma(1/δ, 1)`,
/// `U_i = (1 + E_i / V)^{-1/δ}` with `E_i ~ Exp(1)`.
pub(super) fn clayton_sample<R: Rng + ?Sized>(delta: f64, dim: usize, rng: &mut R) -> Vec<f64> {
    let v = Gamma::new(1.0 / delta, 1.0)
        .expect("delta > 0")
        .sample(rng)
        .max(f64::MIN_POSITIVE);
    (0..dim)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            (-(e / v).ln_1p() / delta).exp()
        })
        .collect()
}
