//! Marginal distributions: the parametric laws used by the simulation
//! designs and the latent success probability, plus a kernel-smoothed
//! empirical CDF for semi-parametric fitting.

use crate::error::{Error, Result};
use crate::special::{
    beta_ln_pdf, beta_quantile, beta_reg, digamma, norm_cdf, norm_pdf, norm_quantile, IncompleteBeta,
};

/// Smallest sample accepted by [`fit_empirical`].
pub const MIN_EMPIRICAL: usize = 10;
/// Box for the log-parameters of the latent Beta law.
pub const LATENT_BOX: f64 = 10.0;
/// Pseudo-observations are kept inside `[PSEUDO_EPS, 1 - PSEUDO_EPS]`.
pub const PSEUDO_EPS: f64 = 1e-12;

/// Kernel-smoothed empirical CDF with a Gaussian kernel:
/// `F(x) = (1/n) Σ Φ((x - X_i) / h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sample: Vec<f64>,
    bandwidth: f64,
}

/// Kernel contributions beyond this many bandwidths are 0 or 1 to double
/// precision.
const KERNEL_REACH: f64 = 9.0;

impl EmpiricalCdf {
    pub fn new(mut sample: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if sample.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite value in sample".into()));
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        sample.sort_by(f64::total_cmp);
        Ok(Self { sample, bandwidth })
    }

    /// Sorted sample.
    pub fn sample(&self) -> &[f64] {
        &self.sample
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    fn window(&self, x: f64) -> (usize, usize) {
        let reach = KERNEL_REACH * self.bandwidth;
        let lo = self.sample.partition_point(|&s| s < x - reach);
        let hi = self.sample.partition_point(|&s| s <= x + reach);
        (lo, hi)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        // everything left of the window contributes exactly one
        let inside: f64 = self.sample[lo..hi]
            .iter()
            .map(|&s| norm_cdf((x - s) / self.bandwidth))
            .sum();
        (lo as f64 + inside) / self.sample.len() as f64
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let s: f64 = self.sample[lo..hi]
            .iter()
            .map(|&s| norm_pdf((x - s) / self.bandwidth))
            .sum();
        s / (self.sample.len() as f64 * self.bandwidth)
    }

    /// Inverts the smoothed CDF: Newton steps kept inside a shrinking
    /// bisection bracket.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sample.len();
        let idx = ((p * n as f64) as usize).min(n - 1);
        self.quantile_from(p, self.sample[idx])
    }

    /// [`EmpiricalCdf::quantile`] started from `guess`, e.g. the quantile
    /// of a nearby level.
    pub fn quantile_from(&self, p: f64, guess: f64) -> f64 {
        let n = self.sample.len();
        let reach = (KERNEL_REACH + 1.0) * self.bandwidth;
        let mut lo = self.sample[0] - reach;
        let mut hi = self.sample[n - 1] + reach;
        let mut x = guess.clamp(lo, hi);
        for _ in 0..200 {
            let f = self.cdf(x) - p;
            if f == 0.0 {
                return x;
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.pdf(x);
            let newton = x - f / d;
            let next = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-15 * x.abs().max(self.bandwidth) || next <= lo || next >= hi {
                return next.clamp(lo, hi);
            }
            x = next;
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarginalModel {
    Normal { mean: f64, sd: f64 },
    Uniform01,
    Beta { alpha: f64, beta: f64 },
    /// `F(x) = 1 - exp(-exp(x))`.
    Gumbel,
    Empirical(EmpiricalCdf),
}

impl MarginalModel {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) || !mean.is_finite() || !sd.is_finite() {
            return Err(Error::InvalidParameter(format!("normal sd must be positive, got {sd}")));
        }
        Ok(MarginalModel::Normal { mean, sd })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta parameters must be positive, got ({alpha}, {beta})"
            )));
        }
        Ok(MarginalModel::Beta { alpha, beta })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Normal { mean, sd } => norm_cdf((x - mean) / sd),
            MarginalModel::Uniform01 => x.clamp(0.0, 1.0),
            MarginalModel::Beta { alpha, beta } => beta_reg(*alpha, *beta, x),
            MarginalModel::Gumbel => -(-x.exp()).exp_m1(),
            MarginalModel::Empirical(e) => e.cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Normal { mean, sd } => norm_pdf((x - mean) / sd) / sd,
            MarginalModel::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            MarginalModel::Beta { alpha, beta } => {
                if x > 0.0 && x < 1.0 {
                    beta_ln_pdf(*alpha, *beta, x).exp()
                } else {
                    0.0
                }
            }
            MarginalModel::Gumbel => (x - x.exp()).exp(),
            MarginalModel::Empirical(e) => e.pdf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} is not inside (0,1)")));
        }
        Ok(match self {
            MarginalModel::Normal { mean, sd } => mean + sd * norm_quantile(p),
            MarginalModel::Uniform01 => p,
            MarginalModel::Beta { alpha, beta } => beta_quantile(*alpha, *beta, p),
            MarginalModel::Gumbel => (-(-p).ln_1p()).ln(),
            MarginalModel::Empirical(e) => e.quantile(p),
        })
    }

    /// Quantiles at increasing levels `ps`, each solve warm-started from
    /// the previous one.
    pub fn quantiles_sorted(&self, ps: &[f64]) -> Result<Vec<f64>> {
        match self {
            MarginalModel::Empirical(e) => {
                let mut out = Vec::with_capacity(ps.len());
                let mut prev: Option<f64> = None;
                for &p in ps {
                    if !(p > 0.0 && p < 1.0) {
                        return Err(Error::Domain(format!("quantile level {p} is not inside (0,1)")));
                    }
                    let q = match prev {
                        Some(g) => e.quantile_from(p, g),
                        None => e.quantile(p),
                    };
                    out.push(q);
                    prev = Some(q);
                }
                Ok(out)
            }
            other => ps.iter().map(|&p| other.quantile(p)).collect(),
        }
    }

    /// Pseudo-observation of `x`: the CDF value, rescaled by `n/(n+1)` for
    /// empirical margins, kept strictly inside (0, 1).
    pub fn pseudo_obs(&self, x: f64) -> f64 {
        let u = match self {
            MarginalModel::Empirical(e) => {
                let n = e.len() as f64;
                n / (n + 1.0) * e.cdf(x)
            }
            other => other.cdf(x),
        };
        u.clamp(PSEUDO_EPS, 1.0 - PSEUDO_EPS)
    }
}

/// Fits the kernel-smoothed empirical CDF with bandwidth
/// `h = 1.06 σ̂ n^(-1/3)`.
pub fn fit_empirical(sample: &[f64]) -> Result<MarginalModel> {
    let n = sample.len();
    if n < MIN_EMPIRICAL {
        return Err(Error::InsufficientData {
            needed: MIN_EMPIRICAL,
            got: n,
        });
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value in sample".into()));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateScale);
    }
    let h = 1.06 * sd * nf.powf(-1.0 / 3.0);
    Ok(MarginalModel::Empirical(EmpiricalCdf::new(sample.to_vec(), h)?))
}

/// Unconstrained parameters `(ln α, ln β)` of the latent Beta law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentParams {
    pub log_alpha: f64,
    pub log_beta: f64,
}

impl Default for LatentParams {
    /// Beta(1, 1), the uniform law.
    fn default() -> Self {
        Self {
            log_alpha: 0.0,
            log_beta: 0.0,
        }
    }
}

impl LatentParams {
    pub fn new(log_alpha: f64, log_beta: f64) -> Result<Self> {
        let p = Self {
            log_alpha,
            log_beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_shape(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha.ln(), beta.ln())
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.log_alpha, self.log_beta] {
            if !v.is_finite() || v.abs() > LATENT_BOX {
                return Err(Error::InvalidParameter(format!(
                    "latent log-parameter {v} outside [-{LATENT_BOX}, {LATENT_BOX}]"
                )));
            }
        }
        Ok(())
    }

    /// Additive step followed by clamping into the optimizer box.
    pub fn stepped(&self, direction: [f64; 2], step: f64) -> Self {
        let clamp = |v: f64| {
            if v.is_nan() {
                0.0
            } else {
                v.clamp(-LATENT_BOX, LATENT_BOX)
            }
        };
        Self {
            log_alpha: clamp(self.log_alpha + step * direction[0]),
            log_beta: clamp(self.log_beta + step * direction[1]),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn beta(&self) -> f64 {
        self.log_beta.exp()
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.log_alpha, self.log_beta]
    }

    pub fn model(&self) -> MarginalModel {
        MarginalModel::Beta {
            alpha: self.alpha(),
            beta: self.beta(),
        }
    }

    pub fn mean(&self) -> f64 {
        let (a, b) = (self.alpha(), self.beta());
        a / (a + b)
    }

    pub fn cdf(&self, z: f64) -> f64 {
        beta_reg(self.alpha(), self.beta(), z)
    }

    pub fn ln_pdf(&self, z: f64) -> f64 {
        beta_ln_pdf(self.alpha(), self.beta(), z)
    }
}

/// Scores of the latent Beta law w.r.t. `(ln α, ln β)` at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaScore {
    /// `∂ ln f_φ(z) / ∂φ`.
    pub dlogf: [f64; 2],
    /// `∂ F_φ(z) / ∂φ`.
    pub d_cdf: [f64; 2],
}

/// Per-parameter constants, so that per-sample scores cost two
/// logarithms and one continued fraction.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BetaScorer {
    alpha: f64,
    beta: f64,
    psi_a: f64,
    psi_b: f64,
    psi_ab: f64,
    cdf: IncompleteBeta,
}

impl BetaScorer {
    pub(crate) fn new(phi: &LatentParams) -> Self {
        let (alpha, beta) = (phi.alpha(), phi.beta());
        Self {
            alpha,
            beta,
            psi_a: digamma(alpha),
            psi_b: digamma(beta),
            psi_ab: digamma(alpha + beta),
            cdf: IncompleteBeta::new(alpha, beta),
        }
    }

    pub(crate) fn dlogf(&self, z: f64) -> [f64; 2] {
        [
            self.alpha * (z.ln() + self.psi_ab - self.psi_a),
            self.beta * ((-z).ln_1p() + self.psi_ab - self.psi_b),
        ]
    }

    /// `F_φ(z)` and its gradient in `(ln α, ln β)`.
    pub(crate) fn cdf(&self, z: f64) -> (f64, [f64; 2]) {
        let (v, [da, db]) = self.cdf.eval(z);
        (v, [self.alpha * da, self.beta * db])
    }
}

pub fn beta_score(phi: &LatentParams, z: f64) -> Result<BetaScore> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("latent value {z} is not inside (0,1)")));
    }
    let s = BetaScorer::new(phi);
    Ok(BetaScore {
        dlogf: s.dlogf(z),
        d_cdf: s.cdf(z).1,
    })
}
