//! Test-side oracles written independently of the library code paths they
//! check: closed-form densities, brute-force metrics and quadrature
//! likelihoods.
#![allow(dead_code)]

use copreg_core::quadrature::GaussLegendre;
use statrs::distribution::{Beta, Continuous, ContinuousCDF, Normal};

pub fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

/// Bivariate Gaussian copula log-density and its derivative in ρ.
pub fn gauss2_log_density(rho: f64, u: f64, v: f64) -> (f64, f64) {
    let n = std_normal();
    let (a, b) = (n.inverse_cdf(u), n.inverse_cdf(v));
    let r2 = 1.0 - rho * rho;
    let q = rho * rho * (a * a + b * b) - 2.0 * rho * a * b;
    let logc = -0.5 * r2.ln() - q / (2.0 * r2);
    let dq = 2.0 * rho * (a * a + b * b) - 2.0 * a * b;
    let dlogc = rho / r2 - (dq * r2 + 2.0 * rho * q) / (2.0 * r2 * r2);
    (logc, dlogc)
}

/// Gaussian copula log-density for any dimension:
/// `-½ log det R - ½ zᵀ(R⁻¹ - I)z` with `z = Φ⁻¹(u)`.
pub fn gauss_log_density(corr: &[Vec<f64>], u: &[f64]) -> f64 {
    let n = std_normal();
    let z: Vec<f64> = u.iter().map(|&v| n.inverse_cdf(v)).collect();
    let w = solve(corr.to_vec(), z.clone());
    let quad: f64 = z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - z.iter().map(|a| a * a).sum::<f64>();
    -0.5 * log_det(corr.to_vec()) - 0.5 * quad
}

/// Log-determinant of a positive definite matrix by elimination.
pub fn log_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        acc += a[k][k].abs().ln();
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    acc
}

/// Bivariate Clayton copula density.
pub fn clayton2_density(delta: f64, u: f64, v: f64) -> f64 {
    (1.0 + delta)
        * (u * v).powf(-delta - 1.0)
        * (u.powf(-delta) + v.powf(-delta) - 1.0).powf(-1.0 / delta - 2.0)
}

/// 256 nodes, geometrically graded toward both ends so that Beta
/// densities with shapes below one are integrated accurately.
pub fn rule256() -> GaussLegendre {
    GaussLegendre::new(8).graded(16)
}

/// One binary observation of a bivariate model with uniform covariate
/// margin: covariate level `u` and label `y`.
pub type Obs = (f64, u8);

/// `Σ_n log ∫ c_ρ(u_n, F_φ(z)) z^y (1-z)^(1-y) f_φ(z) dz` by quadrature in z.
pub fn quad_loglik(rho: f64, log_a: f64, log_b: f64, data: &[Obs]) -> f64 {
    let beta = Beta::new(log_a.exp(), log_b.exp()).unwrap();
    let rule = rule256();
    data.iter()
        .map(|&(u, y)| {
            rule.integrate(|z| {
                let v = beta.cdf(z).clamp(1e-15, 1.0 - 1e-15);
                let c = gauss2_log_density(rho, v, u).0.exp();
                let b = if y == 1 { z } else { 1.0 - z };
                c * b * beta.pdf(z)
            })
            .ln()
        })
        .sum()
}

/// Exact ρ-derivative of [`quad_loglik`] (same rule, differentiated under
/// the integral).
pub fn quad_dloglik_drho(rho: f64, log_a: f64, log_b: f64, data: &[Obs]) -> f64 {
    let beta = Beta::new(log_a.exp(), log_b.exp()).unwrap();
    let rule = rule256();
    data.iter()
        .map(|&(u, y)| {
            let (mut num, mut den) = (0.0, 0.0);
            for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = beta.cdf(z).clamp(1e-15, 1.0 - 1e-15);
                let (logc, dlogc) = gauss2_log_density(rho, v, u);
                let b = if y == 1 { z } else { 1.0 - z };
                let f = w * logc.exp() * b * beta.pdf(z);
                num += dlogc * f;
                den += f;
            }
            num / den
        })
        .sum()
}

/// Central differences of [`quad_loglik`] in (ρ, ln α, ln β).
pub fn quad_fd_grad(rho: f64, log_a: f64, log_b: f64, data: &[Obs], h: f64) -> [f64; 3] {
    let f = |r: f64, a: f64, b: f64| quad_loglik(r, a, b, data);
    [
        (f(rho + h, log_a, log_b) - f(rho - h, log_a, log_b)) / (2.0 * h),
        (f(rho, log_a + h, log_b) - f(rho, log_a - h, log_b)) / (2.0 * h),
        (f(rho, log_a, log_b + h) - f(rho, log_a, log_b - h)) / (2.0 * h),
    ]
}

/// AUC by counting every (positive, negative) pair.
pub fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut twice, mut pairs) = (0u64, 0u64);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1;
                if scores[i] > scores[j] {
                    twice += 2;
                } else if scores[i] == scores[j] {
                    twice += 1;
                }
            }
        }
    }
    twice as f64 / (2 * pairs) as f64
}

/// KS separation by trying every observed score as a threshold, plus the
/// threshold above all scores.
pub fn brute_ks(scores: &[f64], labels: &[u8]) -> f64 {
    let pos = labels.iter().filter(|&&l| l == 1).count() as i64;
    let neg = labels.len() as i64 - pos;
    let mut best = 0i64;
    for &t in scores {
        let tp = (0..scores.len()).filter(|&i| labels[i] == 1 && scores[i] >= t).count() as i64;
        let fp = (0..scores.len()).filter(|&i| labels[i] == 0 && scores[i] >= t).count() as i64;
        best = best.max((tp * neg - fp * pos).abs());
    }
    best as f64 / (pos * neg) as f64
}

/// Least squares by Householder QR on `[1, x]`.
pub fn qr_least_squares(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let p = x[0].len() + 1;
    let mut a: Vec<Vec<f64>> = x
        .iter()
        .map(|r| std::iter::once(1.0).chain(r.iter().cloned()).collect())
        .collect();
    let mut b = y.to_vec();
    for k in 0..p {
        let norm = (k..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|t| t * t).sum::<f64>();
        if vn == 0.0 {
            continue;
        }
        for j in k..p {
            let s = (k..n).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vn;
            for i in k..n {
                a[i][j] -= s * v[i - k];
            }
        }
        let s = (k..n).map(|i| v[i - k] * b[i]).sum::<f64>() * 2.0 / vn;
        for i in k..n {
            b[i] -= s * v[i - k];
        }
    }
    let mut coef = vec![0.0; p];
    for k in (0..p).rev() {
        let s: f64 = (k + 1..p).map(|j| a[k][j] * coef[j]).sum();
        coef[k] = (b[k] - s) / a[k][k];
    }
    coef
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// One-sample KS statistic of `sample` against `cdf`.
pub fn ks_one_sample(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}
