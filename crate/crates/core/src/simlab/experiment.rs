//! Replication harness.
//!
//! Continuous designs: one evaluation set drawn once, then `N` training sets,
//! each fitted by every method; predictions at the evaluation points are
//! scored by IMSE/IBIAS/IVAR. Binary designs: `N` samples, each split into
//! train and test parts; AUC and KS are averaged over replications.
//!
//! Replication `r` draws from `ChaCha8Rng::seed_from_u64(base_seed + r)`;
//! the evaluation set uses stream 1 of `base_seed`.

use super::baselines::{fit_logit, fit_ols};
use super::dgp::{generate, DgpId};
use super::metrics::{auc, ks_stat};
use crate::bocr::{self, FitConfig};
use crate::copula::Family;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::regression::{self, imse_decompose, oracle_m, Imse};
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ols,
    /// Copula regression with a fixed family.
    Cr(Family),
    Logit,
    Bocr(Family),
}

impl Method {
    pub fn is_binary(self) -> bool {
        matches!(self, Method::Logit | Method::Bocr(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ols => f.write_str("OLS"),
            Method::Cr(fam) => write!(f, "CR-{fam}"),
            Method::Logit => f.write_str("logit"),
            Method::Bocr(fam) => write!(f, "BOCR-{fam}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "ols" => return Ok(Method::Ols),
            "logit" => return Ok(Method::Logit),
            _ => {}
        }
        if let Some(fam) = lower.strip_prefix("cr-") {
            return Ok(Method::Cr(fam.parse()?));
        }
        if let Some(fam) = lower.strip_prefix("bocr-") {
            return Ok(Method::Bocr(fam.parse()?));
        }
        Err(Error::Parse(format!("unknown method `{s}`")))
    }
}

/// Target used in IMSE: the closed-form regression function or the
/// observed response at each evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Oracle,
    Response,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Oracle => "oracle",
            Convention::Response => "response",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dgp: DgpId,
    pub replications: usize,
    pub train_size: usize,
    /// Evaluation-set size for continuous designs, test-set size for
    /// binary ones.
    pub eval_size: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub convention: Convention,
    /// Settings for BOCR fits; the seed is replaced per replication.
    pub bocr: FitConfig,
}

impl ExperimentConfig {
    /// N = 200 replications of n = 100 with I = 150 evaluation points,
    /// copula regression with the design's family against OLS.
    pub fn continuous(dgp: DgpId, base_seed: u64) -> Self {
        Self {
            dgp,
            replications: 200,
            train_size: 100,
            eval_size: 150,
            methods: vec![Method::Cr(dgp.family()), Method::Ols],
            base_seed,
            convention: if dgp.has_oracle() {
                Convention::Oracle
            } else {
                Convention::Response
            },
            bocr: FitConfig::default(),
        }
    }

    /// N = 20 samples of 300 split 200/100, logit against BOCR.
    pub fn binary(dgp: DgpId, family: Family, base_seed: u64) -> Self {
        Self {
            dgp,
            replications: 20,
            train_size: 200,
            eval_size: 100,
            methods: vec![Method::Logit, Method::Bocr(family)],
            base_seed,
            convention: Convention::Response,
            bocr: FitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if self.train_size < 10 || self.eval_size < 10 {
            return Err(Error::InvalidParameter(format!(
                "train and evaluation sizes must be at least 10, got {} and {}",
                self.train_size, self.eval_size
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods given".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| m.is_binary() != self.dgp.is_binary()) {
            return Err(Error::InvalidParameter(format!(
                "method {m} does not apply to design {}",
                self.dgp
            )));
        }
        if self.convention == Convention::Oracle && !self.dgp.has_oracle() {
            return Err(Error::InvalidParameter(format!(
                "design {} has no closed-form regression function",
                self.dgp
            )));
        }
        self.bocr.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Metrics {
    Imse(Imse),
    Classification { auc: f64, ks: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    /// `None` when every replication failed.
    pub metrics: Option<Metrics>,
    pub succeeded: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub dgp: DgpId,
    pub replications: usize,
    pub train_size: usize,
    pub eval_size: usize,
    pub seed: u64,
    pub convention: Convention,
    pub results: Vec<MethodResult>,
    /// Not part of equality: reports of identical runs compare equal.
    pub wall_time: Duration,
}

impl PartialEq for MetricsReport {
    fn eq(&self, o: &Self) -> bool {
        self.dgp == o.dgp
            && self.replications == o.replications
            && self.train_size == o.train_size
            && self.eval_size == o.eval_size
            && self.seed == o.seed
            && self.convention == o.convention
            && self.results == o.results
    }
}

impl MetricsReport {
    pub fn result(&self, method: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method)
    }
}

fn replication_rng(base: u64, r: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base.wrapping_add(r as u64))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricsReport> {
    config.validate()?;
    let start = Instant::now();
    let results = if config.dgp.is_binary() {
        run_binary(config)
    } else {
        run_continuous(config)?
    };
    Ok(MetricsReport {
        dgp: config.dgp,
        replications: config.replications,
        train_size: config.train_size,
        eval_size: config.eval_size,
        seed: config.base_seed,
        convention: config.convention,
        results,
        wall_time: start.elapsed(),
    })
}

fn fit_predict_continuous(method: Method, train: &Dataset, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    match method {
        Method::Ols => {
            let f = fit_ols(train)?;
            Ok(xs.iter().map(|x| f.predict(x)).collect())
        }
        Method::Cr(family) => regression::fit(train, family)?.predict_many(xs),
        _ => Err(Error::InvalidParameter(format!("{method} needs a binary response"))),
    }
}

fn run_continuous(config: &ExperimentConfig) -> Result<Vec<MethodResult>> {
    let mut eval_rng = ChaCha8Rng::seed_from_u64(config.base_seed);
    eval_rng.set_stream(1);
    let eval = generate(config.dgp, config.eval_size, &mut eval_rng);
    let xs: Vec<Vec<f64>> = eval.rows().to_vec();
    let truth: Vec<f64> = match config.convention {
        Convention::Oracle => xs
            .iter()
            .map(|x| oracle_m(config.dgp, x))
            .collect::<Result<_>>()?,
        Convention::Response => eval.y().to_vec(),
    };
    let mut preds: Vec<Vec<Vec<f64>>> = vec![Vec::new(); config.methods.len()];
    let mut failed = vec![0usize; config.methods.len()];
    for r in 0..config.replications {
        let mut rng = replication_rng(config.base_seed, r);
        let train = generate(config.dgp, config.train_size, &mut rng);
        for (k, &m) in config.methods.iter().enumerate() {
            match fit_predict_continuous(m, &train, &xs) {
                Ok(p) if p.iter().all(|v| v.is_finite()) => preds[k].push(p),
                _ => failed[k] += 1,
            }
        }
    }
    config
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let metrics = if preds[k].is_empty() {
                None
            } else {
                Some(Metrics::Imse(imse_decompose(&preds[k], &truth)?))
            };
            Ok(MethodResult {
                method,
                metrics,
                succeeded: preds[k].len(),
                failed: failed[k],
            })
        })
        .collect()
}

fn fit_score_binary(method: Method, train: &Dataset, test: &Dataset, bocr_config: &FitConfig) -> Result<(f64, f64)> {
    let labels = test.labels()?;
    let scores: Vec<f64> = match method {
        Method::Logit => {
            let f = fit_logit(train)?;
            test.rows().iter().map(|x| f.predict_prob(x)).collect()
        }
        Method::Bocr(family) => {
            let (model, _) = bocr::fit(train, family, bocr_config)?;
            model.predict_many(test.rows())?
        }
        _ => return Err(Error::InvalidParameter(format!("{method} needs a continuous response"))),
    };
    Ok((auc(&scores, &labels)?, ks_stat(&scores, &labels)?))
}

fn run_binary(config: &ExperimentConfig) -> Vec<MethodResult> {
    let total = config.train_size + config.eval_size;
    let mut sums = vec![(0.0, 0.0); config.methods.len()];
    let mut ok = vec![0usize; config.methods.len()];
    let mut failed = vec![0usize; config.methods.len()];
    for r in 0..config.replications {
        let mut rng = replication_rng(config.base_seed, r);
        let data = generate(config.dgp, total, &mut rng);
        let mut order: Vec<usize> = (0..total).collect();
        order.shuffle(&mut rng);
        let pick = |idx: &[usize]| {
            let x = idx.iter().map(|&i| data.row(i).to_vec()).collect();
            let y = idx.iter().map(|&i| data.y()[i]).collect();
            Dataset::new(x, y).expect("subset of a valid dataset")
        };
        let train = pick(&order[..config.train_size]);
        let test = pick(&order[config.train_size..]);
        let fit_seed = rng.next_u64();
        let bocr_config = FitConfig {
            seed: fit_seed,
            ..config.bocr.clone()
        };
        for (k, &m) in config.methods.iter().enumerate() {
            match fit_score_binary(m, &train, &test, &bocr_config) {
                Ok((a, s)) => {
                    sums[k].0 += a;
                    sums[k].1 += s;
                    ok[k] += 1;
                }
                Err(_) => failed[k] += 1,
            }
        }
    }
    config
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| MethodResult {
            method,
            metrics: (ok[k] > 0).then(|| Metrics::Classification {
                auc: sums[k].0 / ok[k] as f64,
                ks: sums[k].1 / ok[k] as f64,
            }),
            succeeded: ok[k],
            failed: failed[k],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Ols,
            Method::Logit,
            Method::Cr(Family::Clayton),
            Method::Bocr(Family::Gaussian),
            Method::Cr(Family::StudentT),
        ] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }

    #[test]
    fn mismatched_methods_are_rejected() {
        let mut c = ExperimentConfig::continuous(DgpId::Ib, 1);
        c.methods = vec![Method::Logit];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::continuous(DgpId::IIa, 1);
        c.convention = Convention::Oracle;
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_ols_replication() {
        let mut c = ExperimentConfig::continuous(DgpId::Ib, 3);
        c.replications = 1;
        c.methods = vec![Method::Ols];
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.results.len(), 1);
        let Some(Metrics::Imse(m)) = r.results[0].metrics else {
            panic!("expected an IMSE triple");
        };
        assert!((m.imse - (m.ibias + m.ivar)).abs() < 1e-12);
        assert_eq!(m.ivar, 0.0);
    }
}
