mod common;

use common::{brute_auc, brute_ks, ks_one_sample, qr_least_squares, std_normal};
use copreg_core::kendall::kendall_tau;
use copreg_core::simlab::dgp::IIIC_BETA;
use copreg_core::simlab::{
    auc, fit_logit, fit_ols, generate, ks_stat, run_experiment, DgpId, ExperimentConfig, Method, Metrics,
};
use copreg_core::special::sigmoid;
use copreg_core::Dataset;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, ContinuousCDF, Normal};

fn labelled(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    // few distinct score levels so that ties are common
    (2..=max_len)
        .prop_flat_map(|n| (prop::collection::vec(0u8..12, n), prop::collection::vec(0u8..2, n)))
        .prop_map(|(s, mut l)| {
            l[0] = 0;
            l[1] = 1;
            (s.into_iter().map(|v| v as f64 / 4.0 - 1.0).collect(), l)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auc_equals_pair_counting((scores, labels) in labelled(200)) {
        prop_assert_eq!(auc(&scores, &labels).unwrap(), brute_auc(&scores, &labels));
    }

    #[test]
    fn ks_equals_threshold_enumeration((scores, labels) in labelled(200)) {
        prop_assert_eq!(ks_stat(&scores, &labels).unwrap(), brute_ks(&scores, &labels));
    }

    #[test]
    fn auc_is_invariant_under_exp((scores, labels) in labelled(200)) {
        let e: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        prop_assert_eq!(auc(&scores, &labels).unwrap(), auc(&e, &labels).unwrap());
    }
}

#[test]
fn metrics_on_the_six_point_instance() {
    let s = [0.1, 0.4, 0.35, 0.8];
    let l = [0, 0, 1, 1];
    assert_eq!(auc(&s, &l).unwrap(), 0.75);
    assert_eq!(ks_stat(&s, &l).unwrap(), 0.5);
    assert!(auc(&s, &[1, 1, 1, 1]).is_err());
}

#[test]
fn logit_recovers_the_iiic_coefficients() {
    let data = generate(DgpId::IIIc, 10_000, &mut ChaCha8Rng::seed_from_u64(11));
    let fit = fit_logit(&data).unwrap();
    assert!(!fit.separated);
    assert!(fit.coef[0].abs() < 0.1, "intercept {}", fit.coef[0]);
    for (b, t) in fit.coef[1..].iter().zip(IIIC_BETA) {
        assert!((b - t).abs() < 0.1, "{:?}", fit.coef);
    }
}

#[test]
fn logit_flags_separation() {
    let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
    let y: Vec<f64> = (0..20).map(|i| (i >= 10) as u8 as f64).collect();
    assert!(fit_logit(&Dataset::new(x, y).unwrap()).unwrap().separated);
}

#[test]
fn ols_matches_householder_qr() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x: Vec<Vec<f64>> = (0..100).map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let y: Vec<f64> = x.iter().map(|r| 0.5 + r[0] - 2.0 * r[2] + rng.random_range(-1.0..1.0)).collect();
    let want = qr_least_squares(&x, &y);
    let got = fit_ols(&Dataset::new(x, y).unwrap()).unwrap();
    for (a, b) in got.coef.iter().zip(&want) {
        assert!((a - b).abs() < 1e-8, "{:?} vs {want:?}", got.coef);
    }
}

#[test]
fn ols_interpolates_exact_linear_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let x: Vec<Vec<f64>> = (0..50).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let y: Vec<f64> = x.iter().map(|r| 1.0 + 3.0 * r[0] - r[1]).collect();
    let data = Dataset::new(x.clone(), y.clone()).unwrap();
    let fit = fit_ols(&data).unwrap();
    let rss: f64 = x.iter().zip(&y).map(|(r, t)| (fit.predict(r) - t).powi(2)).sum();
    assert!(rss < 1e-16 * 50.0, "{rss}");
}

fn gumbel_cdf(x: f64) -> f64 {
    1.0 - (-x.exp()).exp()
}

#[test]
fn generated_margins_pass_goodness_of_fit() {
    let n = 10_000;
    let crit = 1.628 / (n as f64).sqrt();
    let std = std_normal();
    let shifted = Normal::new(1.0, 1.0).unwrap();
    let arcsine = Beta::new(0.5, 0.5).unwrap();
    let unif = |z: f64| z.clamp(0.0, 1.0);
    for dgp in DgpId::ALL {
        let mut passes = vec![0usize; dgp.dim() + 1];
        for seed in 0..100 {
            let data = generate(dgp, n, &mut ChaCha8Rng::seed_from_u64(1000 + seed));
            for j in 0..dgp.dim() {
                let d = match dgp {
                    DgpId::Ib => ks_one_sample(data.column(j), gumbel_cdf),
                    _ => ks_one_sample(data.column(j), |v| std.cdf(v)),
                };
                passes[j] += (d < crit) as usize;
            }
            // the response, or the latent probability of binary designs
            let y = data.z_true().unwrap_or(data.y()).to_vec();
            let d = match dgp {
                DgpId::Ia => ks_one_sample(y, |v| shifted.cdf(v)),
                DgpId::Ib => ks_one_sample(y, |v| std.cdf(v)),
                DgpId::IIc | DgpId::IId => ks_one_sample(y, |v| arcsine.cdf(v)),
                DgpId::IIIc => 0.0,
                _ => ks_one_sample(y, unif),
            };
            passes[dgp.dim()] += (d < crit) as usize;
        }
        assert!(passes.iter().all(|&p| p >= 95), "{dgp}: {passes:?}");
    }
}

#[test]
fn clayton_design_has_the_analytic_kendall_tau() {
    let data = generate(DgpId::Ia, 100_000, &mut ChaCha8Rng::seed_from_u64(14));
    let tau = kendall_tau(&data.column(0), data.y());
    assert!((tau - 1.0 / 3.0).abs() < 0.02, "{tau}");
}

#[test]
fn iiic_latent_is_the_logistic_index() {
    let data = generate(DgpId::IIIc, 500, &mut ChaCha8Rng::seed_from_u64(15));
    for (row, &z) in data.rows().iter().zip(data.z_true().unwrap()) {
        let eta: f64 = row.iter().zip(IIIC_BETA).map(|(a, b)| a * b).sum();
        assert_eq!(z, sigmoid(eta));
    }
}

#[test]
fn generation_is_deterministic() {
    for dgp in DgpId::ALL {
        let a = generate(dgp, 50, &mut ChaCha8Rng::seed_from_u64(16));
        let b = generate(dgp, 50, &mut ChaCha8Rng::seed_from_u64(16));
        assert_eq!(a, b, "{dgp}");
    }
}

#[test]
fn experiments_are_reproducible() {
    let mut config = ExperimentConfig::continuous(DgpId::Ic, 21);
    config.replications = 4;
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    assert_eq!(a, b);
    for r in &a.results {
        let Some(Metrics::Imse(m)) = r.metrics else {
            panic!("{}: no IMSE", r.method)
        };
        assert!((m.imse - (m.ibias + m.ivar)).abs() < 1e-12);
    }
}

#[test]
fn single_replication_ols_smoke_test() {
    let mut config = ExperimentConfig::continuous(DgpId::Ib, 22);
    config.replications = 1;
    config.methods = vec![Method::Ols];
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.results.len(), 1);
    let r = &report.results[0];
    assert_eq!((r.succeeded, r.failed), (1, 0));
    let Some(Metrics::Imse(m)) = r.metrics else {
        panic!("no IMSE")
    };
    assert!(m.ivar == 0.0 && (m.imse - m.ibias).abs() < 1e-12);
}

#[test]
fn experiment_validation_rejects_mismatched_methods() {
    let mut config = ExperimentConfig::continuous(DgpId::Ia, 1);
    config.methods = vec![Method::Logit];
    assert!(run_experiment(&config).is_err());
    let mut config = ExperimentConfig::continuous(DgpId::IIa, 1);
    config.replications = 0;
    assert!(run_experiment(&config).is_err());
}
