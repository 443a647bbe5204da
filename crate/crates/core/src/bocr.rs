//! Binary-outcome copula regression.
//!
//! `Y | Z ~ Bernoulli(Z)` with a latent success probability `Z` whose law is
//! Beta(α, β), coupled to the covariates by a copula over `(Z, X_1..X_d)`.
//! The marginal likelihood of an observation is an expectation over `Z`,
//! estimated by sampling; its score is a ratio of such expectations.

use crate::copula::{project_params, CopulaParams, CopulaSpec, Family, U_EPS};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::marginals::{fit_empirical, BetaScorer, LatentParams, MarginalModel};
use crate::quadrature::response_rule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

/// Latent draws are clamped into `[Z_EPS, 1 - Z_EPS]`.
pub const Z_EPS: f64 = 1e-12;

/// How per-sample score terms are combined across observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    /// `Σ_n (Σ_k b a) / (Σ_k b)`: the score of the summed log-likelihood.
    #[default]
    PerObservation,
    /// `(Σ_nk b a) / (Σ_nk b)`: one ratio over all observations and draws.
    Pooled,
}

impl std::str::FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "perobservation" | "observation" => Ok(Pooling::PerObservation),
            "pooled" => Ok(Pooling::Pooled),
            other => Err(Error::Parse(format!("unknown pooling `{other}`"))),
        }
    }
}

impl std::fmt::Display for Pooling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Pooling::PerObservation => "per-observation",
            Pooling::Pooled => "pooled",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Step size ε.
    pub step: f64,
    /// Latent draws per observation and iteration, K.
    pub mc_samples: usize,
    pub max_iter: usize,
    /// Early stop when the max-norms of both mean gradients fall below this.
    pub grad_tol: f64,
    pub seed: u64,
    pub pooling: Pooling,
    /// Use `ε / √t` at iteration `t` (1-based) instead of a constant step.
    pub decay: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            step: 0.05,
            mc_samples: 50,
            max_iter: 300,
            grad_tol: 1e-3,
            seed: 0,
            pooling: Pooling::PerObservation,
            decay: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!("step must be positive, got {}", self.step)));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidParameter("mc_samples must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.grad_tol.is_nan() || self.grad_tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grad_tol must be nonnegative, got {}",
                self.grad_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Monte-Carlo log-likelihood at the iterate, from this iteration's draws.
    pub loglik: f64,
    pub loglik_se: f64,
    /// Max-norms of the mean gradients that triggered the update.
    pub grad_theta: f64,
    pub grad_phi: f64,
    /// Copula parameters followed by `(ln α, ln β)`, before the update.
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitTrace {
    pub records: Vec<TraceRecord>,
}

impl FitTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn loglik(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loglik).collect()
    }

    /// Trailing moving average of the log-likelihood trace.
    pub fn moving_average(&self, window: usize) -> Vec<f64> {
        let l = self.loglik();
        if window == 0 || l.len() < window {
            return Vec::new();
        }
        l.windows(window).map(|w| w.iter().sum::<f64>() / window as f64).collect()
    }
}

/// A fitted binary-outcome model.
#[derive(Debug, Clone)]
pub struct BocrModel {
    copula: CopulaSpec,
    latent: LatentParams,
    margins_x: Vec<MarginalModel>,
    /// Latent quantiles at the nodes of [`response_rule`].
    z_levels: Vec<f64>,
}

impl PartialEq for BocrModel {
    fn eq(&self, other: &Self) -> bool {
        self.copula == other.copula && self.latent == other.latent && self.margins_x == other.margins_x
    }
}

impl BocrModel {
    pub fn new(copula: CopulaSpec, latent: LatentParams, margins_x: Vec<MarginalModel>) -> Result<Self> {
        if copula.dim() != margins_x.len() + 1 {
            return Err(Error::Shape(format!(
                "copula of dimension {} needs {} covariate margins, got {}",
                copula.dim(),
                copula.dim() - 1,
                margins_x.len()
            )));
        }
        latent.validate()?;
        let z_levels = latent.model().quantiles_sorted(&response_rule().nodes)?;
        Ok(Self {
            copula,
            latent,
            margins_x,
            z_levels,
        })
    }

    pub fn copula(&self) -> &CopulaSpec {
        &self.copula
    }

    pub fn latent(&self) -> &LatentParams {
        &self.latent
    }

    pub fn margins_x(&self) -> &[MarginalModel] {
        &self.margins_x
    }

    pub fn dim(&self) -> usize {
        self.margins_x.len()
    }

    /// Pseudo-observations of a covariate row.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "expected {} covariates, got {}",
                self.dim(),
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite covariate".into()));
        }
        Ok(self.margins_x.iter().zip(x).map(|(m, &v)| m.pseudo_obs(v)).collect())
    }

    fn transform_data(&self, data: &Dataset) -> Result<(Vec<Vec<f64>>, Vec<u8>)> {
        if data.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let labels = data.labels()?;
        let ux = data.rows().iter().map(|r| self.transform(r)).collect::<Result<Vec<_>>>()?;
        Ok((ux, labels))
    }

    /// `E(Z | X = x)`, computed as `∫ F_φ⁻¹(v) c(v, û_x) dv / ∫ c(v, û_x) dv`,
    /// which is the latent-space ratio after substituting `v = F_φ(z)`.
    pub fn predict_prob(&self, x: &[f64]) -> Result<f64> {
        let ux = self.transform(x)?;
        self.predict_prob_u(&ux)
    }

    /// [`BocrModel::predict_prob`] at covariate pseudo-observations.
    pub fn predict_prob_u(&self, u_x: &[f64]) -> Result<f64> {
        if u_x.len() != self.dim() {
            return Err(Error::Shape(format!("expected {} coordinates, got {}", self.dim(), u_x.len())));
        }
        crate::copula::check_interior(u_x)?;
        let rule = response_rule();
        let mut u = Vec::with_capacity(u_x.len() + 1);
        u.push(0.5);
        u.extend_from_slice(u_x);
        let mut logs = Vec::with_capacity(rule.len());
        for &v in &rule.nodes {
            u[0] = v;
            logs.push(self.copula.log_density_unchecked(&u));
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for ((&w, &l), &z) in rule.weights.iter().zip(&logs).zip(&self.z_levels) {
            let c = w * (l - top).exp();
            num += c * z;
            den += c;
        }
        let p = num / den;
        if !p.is_finite() {
            return Err(Error::Numeric(format!("latent-mean quadrature gave {p}")));
        }
        Ok(p.clamp(f64::EPSILON, 1.0 - f64::EPSILON))
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict_prob(x)).collect()
    }
}

/// `c(û_x, F_φ(z)) · z^y (1 - z)^(1 - y)`.
pub fn joint_weight(model: &BocrModel, u_x: &[f64], y: u8, z: f64) -> Result<f64> {
    if u_x.len() != model.dim() {
        return Err(Error::Shape(format!("expected {} coordinates, got {}", model.dim(), u_x.len())));
    }
    crate::copula::check_interior(u_x)?;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("latent value {z} is not inside (0,1)")));
    }
    if y > 1 {
        return Err(Error::Domain(format!("binary response must be 0 or 1, got {y}")));
    }
    let v = model.latent.cdf(z).clamp(U_EPS, 1.0 - U_EPS);
    let mut u = Vec::with_capacity(u_x.len() + 1);
    u.push(v);
    u.extend_from_slice(u_x);
    let c = model.copula.log_density_unchecked(&u).exp();
    Ok(c * if y == 1 { z } else { 1.0 - z })
}

/// A Monte-Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub se: f64,
}

/// Score estimates with delta-method standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEstimate {
    pub g_theta: Vec<f64>,
    pub g_phi: [f64; 2],
    pub se_theta: Vec<f64>,
    pub se_phi: [f64; 2],
    /// Log-likelihood estimate from the same draws.
    pub loglik: McEstimate,
}

/// Draws `n * k` latent values, observation-major, from the current latent
/// law.
fn draw_latents<R: Rng + ?Sized>(latent: &LatentParams, n: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let dist = Beta::new(latent.alpha(), latent.beta()).expect("latent parameters are boxed");
    (0..n * k)
        .map(|_| {
            let z: f64 = dist.sample(rng);
            z.clamp(Z_EPS, 1.0 - Z_EPS)
        })
        .collect()
}

fn log_bernoulli(y: u8, z: f64) -> f64 {
    if y == 1 {
        z.ln()
    } else {
        (-z).ln_1p()
    }
}

/// `Σ_n log[(1/K) Σ_k weight(z_nk)]` with `z_nk ~ f_φ`.
pub fn mc_loglik<R: Rng + ?Sized>(model: &BocrModel, data: &Dataset, k: usize, rng: &mut R) -> Result<McEstimate> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let (ux, labels) = model.transform_data(data)?;
    let z = draw_latents(&model.latent, ux.len(), k, rng);
    let (a, b) = (model.latent.alpha(), model.latent.beta());
    let mut u = vec![0.0; model.dim() + 1];
    let mut logs = vec![0.0; k];
    let (mut total, mut var) = (0.0, 0.0);
    for (n, (row, &y)) in ux.iter().zip(&labels).enumerate() {
        u[1..].copy_from_slice(row);
        for (j, &zk) in z[n * k..(n + 1) * k].iter().enumerate() {
            u[0] = crate::special::beta_reg(a, b, zk).clamp(U_EPS, 1.0 - U_EPS);
            logs[j] = model.copula.log_density_unchecked(&u) + log_bernoulli(y, zk);
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Underflow { observation: n });
        }
        let (mut s1, mut s2) = (0.0, 0.0);
        for &l in &logs {
            let w = (l - top).exp();
            s1 += w;
            s2 += w * w;
        }
        let kf = k as f64;
        let mean = s1 / kf;
        total += top + mean.ln();
        if k > 1 {
            let sample_var = (s2 / kf - mean * mean).max(0.0) * kf / (kf - 1.0);
            var += sample_var / (kf * mean * mean);
        }
    }
    Ok(McEstimate {
        value: total,
        se: var.sqrt(),
    })
}

/// Running sums for one ratio `Σ b a / Σ b` and its delta-method variance.
struct RatioAccumulator {
    sb: f64,
    sbb: f64,
    sa: Vec<f64>,
    saa: Vec<f64>,
    sab: Vec<f64>,
    count: f64,
}

impl RatioAccumulator {
    fn new(p: usize) -> Self {
        Self {
            sb: 0.0,
            sbb: 0.0,
            sa: vec![0.0; p],
            saa: vec![0.0; p],
            sab: vec![0.0; p],
            count: 0.0,
        }
    }

    fn reset(&mut self) {
        self.sb = 0.0;
        self.sbb = 0.0;
        self.count = 0.0;
        for v in self.sa.iter_mut().chain(self.saa.iter_mut()).chain(self.sab.iter_mut()) {
            *v = 0.0;
        }
    }

    fn push(&mut self, b: f64, a: &[f64]) {
        self.sb += b;
        self.sbb += b * b;
        self.count += 1.0;
        for (j, &aj) in a.iter().enumerate() {
            let ba = b * aj;
            self.sa[j] += ba;
            self.saa[j] += ba * ba;
            self.sab[j] += ba * b;
        }
    }

    /// Adds each ratio to `out` and its estimated variance to `var`.
    fn finish(&self, out: &mut [f64], var: &mut [f64]) {
        let k = self.count;
        let mb = self.sb / k;
        for j in 0..out.len() {
            let r = self.sa[j] / self.sb;
            out[j] += r;
            if k > 1.0 {
                let ma = self.sa[j] / k;
                let va = self.saa[j] / k - ma * ma;
                let vb = self.sbb / k - mb * mb;
                let cab = self.sab[j] / k - ma * mb;
                let v = (va - 2.0 * r * cab + r * r * vb) / (k - 1.0) / (mb * mb);
                var[j] += v.max(0.0);
            }
        }
    }
}

/// Monte-Carlo estimates of `∂l/∂θ` and `∂l/∂(ln α, ln β)`.
pub fn score_gradients<R: Rng + ?Sized>(
    model: &BocrModel,
    data: &Dataset,
    k: usize,
    pooling: Pooling,
    rng: &mut R,
) -> Result<ScoreEstimate> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let (ux, labels) = model.transform_data(data)?;
    score_pass(&model.copula, &model.latent, &ux, &labels, k, pooling, rng)
}

/// One Monte-Carlo pass over pre-transformed data.
fn score_pass<R: Rng + ?Sized>(
    copula: &CopulaSpec,
    latent: &LatentParams,
    ux: &[Vec<f64>],
    labels: &[u8],
    k: usize,
    pooling: Pooling,
    rng: &mut R,
) -> Result<ScoreEstimate> {
    let n = ux.len();
    let dim = copula.dim();
    let pt = copula.params().len();
    let p = pt + 2;
    let z = draw_latents(latent, n, k, rng);
    let scorer = BetaScorer::new(latent);

    // per-draw log weights and score vectors, one observation at a time
    let mut logs = vec![0.0; k];
    let mut scores = vec![0.0; k * p];
    let mut u = vec![0.0; dim];
    let mut grad = vec![0.0; pt];

    let mut g = vec![0.0; p];
    let mut var = vec![0.0; p];
    let mut acc = RatioAccumulator::new(p);
    let (mut loglik, mut loglik_var) = (0.0, 0.0);

    // pooled mode keeps every draw so one global scale can be applied
    let mut pooled: Vec<(f64, Vec<f64>)> = Vec::new();
    for (obs, (row, &y)) in ux.iter().zip(labels).enumerate() {
        u[1..].copy_from_slice(row);
        for j in 0..k {
            let zk = z[obs * k + j];
            let (v, dcdf) = scorer.cdf(zk);
            u[0] = v.clamp(U_EPS, 1.0 - U_EPS);
            let (logc, dlog_dv) = copula.evaluate_into(&u, Some(0), &mut grad);
            logs[j] = logc + log_bernoulli(y, zk);
            let s = &mut scores[j * p..(j + 1) * p];
            s[..pt].copy_from_slice(&grad);
            let dlogf = scorer.dlogf(zk);
            s[pt] = dlog_dv * dcdf[0] + dlogf[0];
            s[pt + 1] = dlog_dv * dcdf[1] + dlogf[1];
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Underflow { observation: obs });
        }
        acc.reset();
        for j in 0..k {
            acc.push((logs[j] - top).exp(), &scores[j * p..(j + 1) * p]);
        }
        let kf = k as f64;
        let mean = acc.sb / kf;
        loglik += top + mean.ln();
        if k > 1 {
            let sv = (acc.sbb / kf - mean * mean).max(0.0) * kf / (kf - 1.0);
            loglik_var += sv / (kf * mean * mean);
        }
        match pooling {
            Pooling::PerObservation => acc.finish(&mut g, &mut var),
            Pooling::Pooled => {
                for j in 0..k {
                    pooled.push((logs[j], scores[j * p..(j + 1) * p].to_vec()));
                }
            }
        }
    }
    if pooling == Pooling::Pooled {
        let top = pooled.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
        let mut all = RatioAccumulator::new(p);
        for (l, s) in &pooled {
            all.push((l - top).exp(), s);
        }
        all.finish(&mut g, &mut var);
    }
    let se: Vec<f64> = var.iter().map(|v| v.sqrt()).collect();
    Ok(ScoreEstimate {
        g_theta: g[..pt].to_vec(),
        g_phi: [g[pt], g[pt + 1]],
        se_theta: se[..pt].to_vec(),
        se_phi: [se[pt], se[pt + 1]],
        loglik: McEstimate {
            value: loglik,
            se: loglik_var.sqrt(),
        },
    })
}

/// Starting copula: independence for elliptical and FGM families, δ = 0.5
/// for Clayton.
pub fn initial_copula(family: Family, dim: usize) -> Result<CopulaSpec> {
    match family {
        Family::Gaussian => Ok(CopulaSpec::independence(dim)),
        Family::StudentT => CopulaSpec::new(CopulaParams {
            family,
            dim,
            values: vec![0.0; dim * (dim - 1) / 2],
            df: Some(STUDENT_DF),
        }),
        Family::Clayton => CopulaSpec::clayton(dim, 0.5),
        Family::Fgm => {
            if dim != 2 {
                return Err(Error::InvalidParameter(format!(
                    "the FGM copula is bivariate; got {} covariates",
                    dim - 1
                )));
            }
            CopulaSpec::fgm(0.0)
        }
    }
}

/// Largest change of any single parameter in one iteration.
pub const MAX_STEP: f64 = 0.1;

/// Degrees of freedom used when a Student-t copula is fitted here.
pub const STUDENT_DF: f64 = 5.0;

/// Score-gradient ascent: fresh latent draws every iteration, an
/// additive step on the copula parameters followed by projection, and an
/// additive step on `(ln α, ln β)` clamped into its box.
///
/// With per-observation pooling the summed score is divided by `n`, so the
/// step acts on the same scale as the pooled ratio.
pub fn fit(data: &Dataset, family: Family, config: &FitConfig) -> Result<(BocrModel, FitTrace)> {
    config.validate()?;
    let labels = data.labels()?;
    let ones = labels.iter().filter(|&&y| y == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::DegenerateData(
            "column y has a single class; both 0 and 1 are required".into(),
        ));
    }
    let margins_x = (0..data.dim())
        .map(|j| fit_empirical(&data.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let ux: Vec<Vec<f64>> = data
        .rows()
        .iter()
        .map(|r| margins_x.iter().zip(r).map(|(m, &x)| m.pseudo_obs(x)).collect())
        .collect();

    let mut copula = initial_copula(family, data.dim() + 1)?;
    let mut latent = LatentParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = FitTrace::default();
    let scale = match config.pooling {
        Pooling::PerObservation => 1.0 / data.len() as f64,
        Pooling::Pooled => 1.0,
    };
    for it in 0..config.max_iter {
        let est = score_pass(&copula, &latent, &ux, &labels, config.mc_samples, config.pooling, &mut rng)?;
        let g_theta: Vec<f64> = est.g_theta.iter().map(|v| v * scale).collect();
        let g_phi = [est.g_phi[0] * scale, est.g_phi[1] * scale];
        let mut params = copula.params().to_vec();
        params.extend(latent.as_array());
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (nt, np) = (max_abs(&g_theta), max_abs(&g_phi));
        let finite = g_theta.iter().chain(&g_phi).all(|v| v.is_finite());
        trace.records.push(TraceRecord {
            iteration: it,
            loglik: est.loglik.value,
            loglik_se: est.loglik.se,
            grad_theta: nt,
            grad_phi: np,
            params,
        });
        if !finite {
            return Err(Error::Divergence {
                iteration: it,
                trace: Box::new(trace),
            });
        }
        if nt < config.grad_tol && np < config.grad_tol {
            break;
        }
        let eps = if config.decay {
            config.step / ((it + 1) as f64).sqrt()
        } else {
            config.step
        };
        // near a singular correlation matrix the scores explode; cap the move
        let eps = eps.min(MAX_STEP / nt.max(np));
        copula = project_params(&copula.stepped(&g_theta, eps));
        latent = latent.stepped(g_phi, eps);
    }
    Ok((BocrModel::new(copula, latent, margins_x)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform_model(copula: CopulaSpec, latent: LatentParams) -> BocrModel {
        let d = copula.dim() - 1;
        BocrModel::new(copula, latent, vec![MarginalModel::Uniform01; d]).unwrap()
    }

    #[test]
    fn joint_weight_examples() {
        let m = uniform_model(CopulaSpec::independence(2), LatentParams::default());
        assert_relative_eq!(joint_weight(&m, &[0.4], 1, 0.3).unwrap(), 0.3, epsilon = 1e-15);
        assert_relative_eq!(joint_weight(&m, &[0.4], 0, 0.3).unwrap(), 0.7, epsilon = 1e-15);
        let m = uniform_model(CopulaSpec::clayton(2, 1.0).unwrap(), LatentParams::default());
        assert_relative_eq!(joint_weight(&m, &[0.5], 1, 0.5).unwrap(), 32.0 / 27.0 * 0.5, epsilon = 1e-12);
        assert!(matches!(joint_weight(&m, &[0.5], 1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(joint_weight(&m, &[0.0], 1, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn predict_prob_under_independence_is_latent_mean() {
        let m = uniform_model(CopulaSpec::independence(3), LatentParams::default());
        assert_relative_eq!(m.predict_prob(&[0.1, 0.8]).unwrap(), 0.5, epsilon = 1e-12);
        let m = uniform_model(CopulaSpec::independence(3), LatentParams::from_shape(2.0, 1.0).unwrap());
        for x in [[0.1, 0.8], [0.5, 0.5], [0.99, 0.01]] {
            assert_relative_eq!(m.predict_prob(&x).unwrap(), 2.0 / 3.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn config_validation() {
        let bad = FitConfig {
            mc_samples: 0,
            ..FitConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(FitConfig::default().validate().is_ok());
        assert_eq!("pooled".parse::<Pooling>().unwrap(), Pooling::Pooled);
    }

    #[test]
    fn single_class_is_rejected() {
        let d = Dataset::new((0..20).map(|i| vec![i as f64]).collect(), vec![1.0; 20]).unwrap();
        assert!(matches!(fit(&d, Family::Gaussian, &FitConfig::default()), Err(Error::DegenerateData(_))));
    }
}
