mod common;

use common::{clayton2_density, solve, std_normal};
use copreg_core::quadrature::GaussLegendre;
use copreg_core::regression::{self, fit_copula, imse_decompose, oracle_m, pseudo_loglik, CrFitOptions};
use copreg_core::simlab::dgp::{ic_correlation, DgpId, IB_THETA};
use copreg_core::simlab::generate;
use copreg_core::{CopulaSpec, CrModel, Dataset, Error, Family, MarginalModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{Continuous, ContinuousCDF};

fn std_normal_margin() -> MarginalModel {
    MarginalModel::Normal { mean: 0.0, sd: 1.0 }
}

/// Composite Gauss-Legendre on `[-a, a]` in the normal-scores variable.
fn normal_line(f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(20).composite(200);
    let a = 12.0;
    2.0 * a * rule.integrate(|s| f(-a + 2.0 * a * s))
}

#[test]
fn independence_predicts_the_sample_mean_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let y: Vec<f64> = (0..200).map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0 + 3.0).collect();
    let xs: Vec<f64> = (0..200).map(|_| rng.random()).collect();
    let margin_y = copreg_core::fit_empirical(&y).unwrap();
    let margin_x = copreg_core::fit_empirical(&xs).unwrap();
    let model = CrModel::from_parts(CopulaSpec::independence(2), vec![margin_x], margin_y).unwrap();
    let preds: Vec<f64> = (0..50).map(|i| model.predict_mean(&[i as f64 / 49.0]).unwrap()).collect();
    let lo = preds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = preds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo < 1e-8, "{lo} .. {hi}");
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    assert!((preds[0] - mean).abs() < 1e-6, "{} vs {mean}", preds[0]);
}

#[test]
fn fgm_gumbel_design_matches_the_integrated_oracle() {
    // m(x) = θ(1-2F(x)) ∫ Φ⁻¹(u)(1-2u) du, integrated in normal scores
    let n = std_normal();
    let kernel = normal_line(|t| t * (1.0 - 2.0 * n.cdf(t)) * n.pdf(t));
    let model = CrModel::from_parts(CopulaSpec::fgm(IB_THETA).unwrap(), vec![MarginalModel::Gumbel], std_normal_margin()).unwrap();
    for i in 0..50 {
        let x = -4.0 + 5.5 * i as f64 / 49.0;
        let f = 1.0 - (-(x as f64).exp()).exp();
        let want = IB_THETA * (1.0 - 2.0 * f) * kernel;
        let got = model.predict_mean(&[x]).unwrap();
        assert!((got - want).abs() < 1e-6, "x={x}: {got} vs {want}");
        assert!((oracle_m(DgpId::Ib, &[x]).unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn gaussian_uniform_design_matches_the_closed_form() {
    let corr = ic_correlation();
    let sx: Vec<Vec<f64>> = (1..4).map(|i| (1..4).map(|j| corr[i][j]).collect()).collect();
    let rho: Vec<f64> = (1..4).map(|j| corr[0][j]).collect();
    let a = solve(sx, rho.clone());
    let denom = (2.0 - rho.iter().zip(&a).map(|(r, b)| r * b).sum::<f64>()).sqrt();
    let model = CrModel::from_parts(
        CopulaSpec::gaussian(&corr).unwrap(),
        vec![std_normal_margin(); 3],
        MarginalModel::Uniform01,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let x: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let want = std_normal().cdf(a.iter().zip(&x).map(|(b, t)| b * t).sum::<f64>() / denom);
        let got = model.predict_mean(&x).unwrap();
        assert!((got - want).abs() < 1e-3, "{x:?}: {got} vs {want}");
        assert!((oracle_m(DgpId::Ic, &x).unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn clayton_design_matches_direct_integration() {
    let n = std_normal();
    let model = CrModel::from_parts(
        CopulaSpec::clayton(2, 1.0).unwrap(),
        vec![std_normal_margin()],
        MarginalModel::Normal { mean: 1.0, sd: 1.0 },
    )
    .unwrap();
    for x in [-2.5, -1.0, -0.3, 0.0, 0.4, 1.2, 2.5] {
        let u = n.cdf(x);
        let want = 1.0 + normal_line(|t| t * clayton2_density(1.0, n.cdf(t), u) * n.pdf(t));
        let got = model.predict_mean(&[x]).unwrap();
        assert!((got - want).abs() < 1e-4, "x={x}: {got} vs {want}");
        let oracle = oracle_m(DgpId::Ia, &[x]).unwrap();
        assert!((oracle - want).abs() < 1e-6, "x={x}: oracle {oracle} vs {want}");
    }
}

fn bivariate(copula: &CopulaSpec, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nrm = std_normal();
    let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let u = copula.sample_one(&mut rng);
        y.push(nrm.inverse_cdf(u[0]));
        x.push(vec![nrm.inverse_cdf(u[1])]);
    }
    Dataset::new(x, y).unwrap()
}

#[test]
fn recovers_independence() {
    let data = bivariate(&CopulaSpec::independence(2), 10_000, 3);
    let model = regression::fit(&data, Family::Gaussian).unwrap();
    let rho = model.copula().params()[0];
    assert!(rho.abs() < 0.03, "{rho}");
}

#[test]
fn recovers_clayton_dependence() {
    let data = bivariate(&CopulaSpec::clayton(2, 1.0).unwrap(), 10_000, 4);
    let model = regression::fit(&data, Family::Clayton).unwrap();
    let delta = model.copula().params()[0];
    assert!(delta > 0.85 && delta < 1.15, "{delta}");
}

#[test]
fn fitted_copula_is_stationary() {
    let data = generate(DgpId::Ic, 300, &mut ChaCha8Rng::seed_from_u64(5));
    let model = regression::fit(&data, Family::Gaussian).unwrap();
    let obs = regression::pseudo_observations(&data, model.margins_x(), model.margin_y());
    let (_, grad) = pseudo_loglik(model.copula(), &obs);
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    assert!(norm < 1e-4, "{grad:?}");
    let info = model.fit_info().unwrap();
    assert!(info.iterations <= CrFitOptions::default().max_iter);
}

#[test]
fn fit_refuses_tiny_samples() {
    let data = bivariate(&CopulaSpec::independence(2), 10, 6);
    assert!(matches!(regression::fit(&data, Family::Gaussian), Err(Error::InsufficientData { .. })));
}

#[test]
fn student_t_fit_picks_a_grid_df() {
    let data = generate(DgpId::IId, 200, &mut ChaCha8Rng::seed_from_u64(7));
    let obs = {
        let mx: Vec<_> = (0..3).map(|j| copreg_core::fit_empirical(&data.column(j)).unwrap()).collect();
        let my = copreg_core::fit_empirical(data.y()).unwrap();
        regression::pseudo_observations(&data, &mx, &my)
    };
    let opts = CrFitOptions::default();
    let fit = fit_copula(&obs, Family::StudentT, &opts).unwrap();
    assert!(opts.df_grid.contains(&fit.copula.df().unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn imse_identity_and_direct_sums(seed in any::<u64>(), reps in 1usize..6, points in 1usize..21) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let preds: Vec<Vec<f64>> = (0..reps).map(|_| (0..points).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let truth: Vec<f64> = (0..points).map(|_| rng.random_range(-3.0..3.0)).collect();
        let r = imse_decompose(&preds, &truth).unwrap();
        prop_assert!((r.imse - (r.ibias + r.ivar)).abs() < 1e-12);
        let (nf, mf) = (reps as f64, points as f64);
        let mut direct = 0.0;
        let mut second_moment_var = 0.0;
        for i in 0..points {
            for p in &preds {
                direct += (p[i] - truth[i]).powi(2) / (nf * mf);
            }
            let m1 = preds.iter().map(|p| p[i]).sum::<f64>() / nf;
            let m2 = preds.iter().map(|p| p[i] * p[i]).sum::<f64>() / nf;
            second_moment_var += (m2 - m1 * m1) / mf;
        }
        prop_assert!((r.imse - direct).abs() < 1e-12);
        prop_assert!((r.ivar - second_moment_var).abs() < 1e-10);
    }
}
