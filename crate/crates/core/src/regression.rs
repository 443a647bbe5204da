//! Semi-parametric copula regression for a continuous response:
//! kernel-smoothed margins, pseudo-maximum-likelihood copula fit, and the
//! conditional mean `E(Y | X = x)` computed from the fitted copula.

use crate::copula::{project_params, CopulaSpec, Family};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kendall::kendall_matrix;
use crate::marginals::{fit_empirical, MarginalModel};
use crate::quadrature::{response_rule, GaussLegendre};
use crate::simlab::dgp::{self, DgpId};
use crate::special::{norm_cdf, norm_quantile};
use std::sync::OnceLock;

/// Smallest training set accepted by [`fit`].
pub const MIN_TRAIN: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct CrFitOptions {
    pub max_iter: usize,
    /// Tolerance on the norm of the projected gradient of the mean
    /// pseudo-log-likelihood.
    pub grad_tol: f64,
    /// Student-t degrees of freedom tried; the best likelihood wins.
    pub df_grid: Vec<f64>,
}

impl Default for CrFitOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-5,
            df_grid: vec![3.0, 5.0, 8.0, 15.0],
        }
    }
}

/// Outcome of maximizing the pseudo-log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaFit {
    pub copula: CopulaSpec,
    /// Mean log copula density over the pseudo-observations.
    pub loglik: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// A fitted (or assembled) copula regression model.
#[derive(Debug, Clone)]
pub struct CrModel {
    copula: CopulaSpec,
    margins_x: Vec<MarginalModel>,
    margin_y: MarginalModel,
    /// Response quantiles at the nodes of [`response_rule`].
    y_levels: Vec<f64>,
    fit: Option<CopulaFit>,
}

impl PartialEq for CrModel {
    fn eq(&self, other: &Self) -> bool {
        self.copula == other.copula
            && self.margins_x == other.margins_x
            && self.margin_y == other.margin_y
    }
}

impl CrModel {
    /// Assembles a model from known parts, e.g. the true copula and margins
    /// of a simulation design.
    pub fn from_parts(
        copula: CopulaSpec,
        margins_x: Vec<MarginalModel>,
        margin_y: MarginalModel,
    ) -> Result<Self> {
        if copula.dim() != margins_x.len() + 1 {
            return Err(Error::Shape(format!(
                "copula of dimension {} needs {} covariate margins, got {}",
                copula.dim(),
                copula.dim() - 1,
                margins_x.len()
            )));
        }
        let y_levels = margin_y.quantiles_sorted(&response_rule().nodes)?;
        Ok(Self {
            copula,
            margins_x,
            margin_y,
            y_levels,
            fit: None,
        })
    }

    pub fn copula(&self) -> &CopulaSpec {
        &self.copula
    }

    pub fn margins_x(&self) -> &[MarginalModel] {
        &self.margins_x
    }

    pub fn margin_y(&self) -> &MarginalModel {
        &self.margin_y
    }

    pub fn fit_info(&self) -> Option<&CopulaFit> {
        self.fit.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.margins_x.len()
    }

    /// `E(Y | X = x)`: the ratio of `∫ F₀⁻¹(v) c(v, û_x) dv` to the
    /// covariate-block copula density at `û_x`.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
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
        let mut u = Vec::with_capacity(self.dim() + 1);
        u.push(0.5);
        u.extend(self.margins_x.iter().zip(x).map(|(m, &xi)| m.pseudo_obs(xi)));
        let rule = response_rule();
        let mut num = 0.0;
        for ((&v, &w), &y) in rule.nodes.iter().zip(&rule.weights).zip(&self.y_levels) {
            u[0] = v;
            num += w * y * self.copula.log_density_unchecked(&u).exp();
        }
        let den = self.copula.covariate_margin_log_density_unchecked(&u[1..]).exp();
        let m = num / den;
        if !m.is_finite() {
            return Err(Error::Numeric(format!("conditional-mean quadrature gave {m}")));
        }
        Ok(m)
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict_mean(x)).collect()
    }
}

/// Rows of pseudo-observations `(û_y, û_x1, ..., û_xd)`.
pub fn pseudo_observations(
    data: &Dataset,
    margins_x: &[MarginalModel],
    margin_y: &MarginalModel,
) -> Vec<Vec<f64>> {
    data.rows()
        .iter()
        .zip(data.y())
        .map(|(row, &y)| {
            let mut u = Vec::with_capacity(row.len() + 1);
            u.push(margin_y.pseudo_obs(y));
            u.extend(margins_x.iter().zip(row).map(|(m, &x)| m.pseudo_obs(x)));
            u
        })
        .collect()
}

/// Fits empirical margins and a copula of the given family by pseudo-MLE.
pub fn fit(data: &Dataset, family: Family) -> Result<CrModel> {
    fit_with(data, family, &CrFitOptions::default())
}

pub fn fit_with(data: &Dataset, family: Family, opts: &CrFitOptions) -> Result<CrModel> {
    if data.len() < MIN_TRAIN {
        return Err(Error::InsufficientData {
            needed: MIN_TRAIN,
            got: data.len(),
        });
    }
    let d = data.dim();
    if family == Family::Fgm && d != 1 {
        return Err(Error::InvalidParameter(format!(
            "the FGM copula is bivariate; got {d} covariates"
        )));
    }
    let margins_x = (0..d)
        .map(|j| fit_empirical(&data.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let margin_y = fit_empirical(data.y())?;
    let obs = pseudo_observations(data, &margins_x, &margin_y);
    let copula_fit = fit_copula(&obs, family, opts)?;
    let mut model = CrModel::from_parts(copula_fit.copula.clone(), margins_x, margin_y)?;
    model.fit = Some(copula_fit);
    Ok(model)
}

/// Mean log density and its parameter gradient over `obs`.
pub fn pseudo_loglik(copula: &CopulaSpec, obs: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let p = copula.params().len();
    let mut total = 0.0;
    let mut grad = vec![0.0; p];
    let mut g = vec![0.0; p];
    for u in obs {
        let (l, _) = copula.evaluate_into(u, None, &mut g);
        total += l;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    let n = obs.len() as f64;
    grad.iter_mut().for_each(|v| *v /= n);
    (total / n, grad)
}

/// Kendall-tau (or normal-scores) starting point for the optimizer.
pub fn initial_copula(obs: &[Vec<f64>], family: Family, df: Option<f64>) -> Result<CopulaSpec> {
    let dim = obs.first().map_or(0, Vec::len);
    if dim < 2 {
        return Err(Error::Shape("need at least one covariate".into()));
    }
    let columns: Vec<Vec<f64>> = (0..dim).map(|j| obs.iter().map(|u| u[j]).collect()).collect();
    let mean_tau = || {
        let tau = kendall_matrix(&columns);
        let mut s = 0.0;
        let mut c = 0.0;
        for i in 0..dim {
            for j in i + 1..dim {
                if tau[i][j].is_finite() {
                    s += tau[i][j];
                    c += 1.0;
                }
            }
        }
        if c > 0.0 { s / c } else { 0.0 }
    };
    let values = match family {
        Family::Gaussian => {
            let scores: Vec<Vec<f64>> = columns
                .iter()
                .map(|c| c.iter().map(|&u| norm_quantile(u)).collect())
                .collect();
            crate::copula::offdiag_pairs(dim)
                .map(|(i, j)| pearson(&scores[i], &scores[j]))
                .collect()
        }
        Family::StudentT => {
            let tau = kendall_matrix(&columns);
            crate::copula::offdiag_pairs(dim)
                .map(|(i, j)| {
                    let t = if tau[i][j].is_finite() { tau[i][j] } else { 0.0 };
                    family.param_from_tau(t)
                })
                .collect()
        }
        Family::Clayton | Family::Fgm => vec![family.param_from_tau(mean_tau())],
    };
    Ok(project_params(&crate::copula::CopulaParams {
        family,
        dim,
        values,
        df,
    }))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    let r = sab / (saa * sbb).sqrt();
    if r.is_finite() { r } else { 0.0 }
}

/// Maximizes the mean pseudo-log-likelihood over the copula parameters.
/// Student-t fits are repeated over `opts.df_grid`.
pub fn fit_copula(obs: &[Vec<f64>], family: Family, opts: &CrFitOptions) -> Result<CopulaFit> {
    if family != Family::StudentT {
        let start = initial_copula(obs, family, None)?;
        return ascend(start, obs, opts);
    }
    let mut best: Option<CopulaFit> = None;
    let mut first_err = None;
    for &df in &opts.df_grid {
        match initial_copula(obs, family, Some(df)).and_then(|s| ascend(s, obs, opts)) {
            Ok(f) => {
                if best.as_ref().is_none_or(|b| f.loglik > b.loglik) {
                    best = Some(f);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or(Error::InvalidParameter("empty df grid".into())))
}

/// Objective values remembered by the nonmonotone line search.
const LINE_SEARCH_MEMORY: usize = 10;

/// Projected gradient ascent: Barzilai–Borwein trial steps, projection
/// after every step, and Armijo backtracking by halving against the worst
/// of the last few objective values. A monotone test rejects too many BB
/// steps on ill-conditioned problems (|ρ| near 1) and stalls.
pub fn ascend(start: CopulaSpec, obs: &[Vec<f64>], opts: &CrFitOptions) -> Result<CopulaFit> {
    if obs.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut spec = start;
    let (mut f, mut g) = pseudo_loglik(&spec, obs);
    if !f.is_finite() {
        return Err(Error::Numeric(format!("initial pseudo-log-likelihood is {f}")));
    }
    let mut step = 1.0;
    let mut recent = std::collections::VecDeque::with_capacity(LINE_SEARCH_MEMORY);
    for it in 0..opts.max_iter {
        if recent.len() == LINE_SEARCH_MEMORY {
            recent.pop_front();
        }
        recent.push_back(f);
        let reference = recent.iter().cloned().fold(f64::INFINITY, f64::min);
        let gn = norm(&projected_gradient(&spec, &g));
        if gn < opts.grad_tol {
            return Ok(CopulaFit {
                copula: spec,
                loglik: f,
                iterations: it,
                grad_norm: gn,
            });
        }
        let mut accepted = None;
        for _ in 0..80 {
            let cand = project_params(&spec.stepped(&g, step));
            let moved: Vec<f64> = cand.params().iter().zip(spec.params()).map(|(a, b)| a - b).collect();
            let (fc, gc) = pseudo_loglik(&cand, obs);
            if fc.is_finite() && fc >= reference + 1e-4 * dot(&g, &moved) && moved.iter().any(|&m| m != 0.0) {
                accepted = Some((cand, fc, gc, moved));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc, gc, moved)) = accepted else {
            return Err(Error::Convergence {
                iterations: it,
                grad_norm: gn,
                last: spec.params().to_vec(),
            });
        };
        let yv: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
        let curv = -dot(&moved, &yv);
        step = if curv > 0.0 {
            (dot(&moved, &moved) / curv).clamp(1e-10, 1e6)
        } else {
            (step * 4.0).min(1e6)
        };
        spec = cand;
        f = fc;
        g = gc;
    }
    let gn = norm(&projected_gradient(&spec, &g));
    if gn < opts.grad_tol {
        return Ok(CopulaFit {
            copula: spec,
            loglik: f,
            iterations: opts.max_iter,
            grad_norm: gn,
        });
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        grad_norm: gn,
        last: spec.params().to_vec(),
    })
}

/// `(P(θ + h g) - θ) / h` for a small `h`: the gradient with components
/// that would leave the feasible set removed.
fn projected_gradient(spec: &CopulaSpec, g: &[f64]) -> Vec<f64> {
    let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let h = 1e-7 / scale;
    let moved = project_params(&spec.stepped(g, h));
    moved
        .params()
        .iter()
        .zip(spec.params())
        .map(|(a, b)| (a - b) / h)
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Fixed evaluation points `(x_i, target_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSet {
    points: Vec<(Vec<f64>, f64)>,
}

impl EvalSet {
    pub fn new(points: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let d = points[0].0.len();
        if points.iter().any(|p| p.0.len() != d) {
            return Err(Error::Shape("evaluation points differ in dimension".into()));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(Vec<f64>, f64)] {
        &self.points
    }

    pub fn xs(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

/// Integrated squared error and its bias/variance split over replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Imse {
    pub imse: f64,
    pub ibias: f64,
    pub ivar: f64,
}

/// `predictions[l][i]` is replication `l`'s prediction at evaluation point
/// `i`. Variances use the `1/N` convention so `imse = ibias + ivar`.
pub fn imse_decompose(predictions: &[Vec<f64>], truth: &[f64]) -> Result<Imse> {
    let n_rep = predictions.len();
    if n_rep == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let m = truth.len();
    if m == 0 {
        return Err(Error::Shape("empty evaluation set".into()));
    }
    if let Some(l) = predictions.iter().position(|p| p.len() != m) {
        return Err(Error::Shape(format!(
            "replication {l} has {} predictions, expected {m}",
            predictions[l].len()
        )));
    }
    let nf = n_rep as f64;
    let mf = m as f64;
    let (mut imse, mut ibias, mut ivar) = (0.0, 0.0, 0.0);
    for i in 0..m {
        let mean = predictions.iter().map(|p| p[i]).sum::<f64>() / nf;
        ibias += (truth[i] - mean).powi(2);
        ivar += predictions.iter().map(|p| (p[i] - mean).powi(2)).sum::<f64>() / nf;
        imse += predictions.iter().map(|p| (p[i] - truth[i]).powi(2)).sum::<f64>() / nf;
    }
    Ok(Imse {
        imse: imse / mf,
        ibias: ibias / mf,
        ivar: ivar / mf,
    })
}

/// Closed-form regression function `m(x) = E(Y | X = x)` of the
/// continuous-response designs Ia, Ib and Ic.
pub fn oracle_m(dgp: DgpId, x: &[f64]) -> Result<f64> {
    let want = match dgp {
        DgpId::Ia | DgpId::Ib => 1,
        DgpId::Ic => 3,
        other => {
            return Err(Error::Domain(format!("no closed-form regression function for {other}")));
        }
    };
    if x.len() != want {
        return Err(Error::Shape(format!("{dgp} has {want} covariates, got {}", x.len())));
    }
    Ok(match dgp {
        DgpId::Ia => {
            let (mu, sigma) = dgp::IA_Y;
            let u = norm_cdf(x[0]);
            mu + sigma * clayton_oracle_expectation(dgp::IA_DELTA, u)
        }
        DgpId::Ib => {
            let (mu, sigma) = dgp::IB_Y;
            let f1 = MarginalModel::Gumbel.cdf(x[0]);
            fgm_oracle(dgp::IB_THETA, mu, sigma, f1)
        }
        _ => {
            let corr = dgp::ic_correlation();
            // standard normal covariates: Φ⁻¹(F_j(x_j)) = x_j
            gaussian_uniform_oracle(&corr, x)
        }
    })
}

/// `μ - θσ/√π + 2θσ F₁/√π`.
pub fn fgm_oracle(theta: f64, mu: f64, sigma: f64, f1: f64) -> f64 {
    let k = theta * sigma / std::f64::consts::PI.sqrt();
    mu - k + 2.0 * k * f1
}

/// `Φ(aᵀt / √(2 - ρᵀa))` with `a = Σ_X⁻¹ρ`, for a uniform response under a
/// Gaussian copula whose first row is `(1, ρᵀ)`.
pub fn gaussian_uniform_oracle(corr: &[Vec<f64>], t: &[f64]) -> f64 {
    let d = corr.len() - 1;
    let sx = nalgebra::DMatrix::from_fn(d, d, |i, j| corr[i + 1][j + 1]);
    let rho = nalgebra::DVector::from_fn(d, |i, _| corr[0][i + 1]);
    let a = sx.lu().solve(&rho).expect("covariate block is nonsingular");
    let at: f64 = a.iter().zip(t).map(|(ai, ti)| ai * ti).sum();
    norm_cdf(at / (2.0 - rho.dot(&a)).sqrt())
}

/// `E[Φ⁻¹(T^(-1/δ))]` for `T` with density
/// `(1/δ+1)(1+ξ)^(1/δ+1) / (t+ξ)^(1/δ+2)` on `t > 1`, `ξ = u^(-δ) - 1`.
/// After `s = 1/t` the integrand lives on (0, 1) and is integrated with
/// a graded 9600-node rule.
pub fn clayton_oracle_expectation(delta: f64, u: f64) -> f64 {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(100).graded(48));
    let xi = u.powf(-delta) - 1.0;
    let a = 1.0 / delta + 1.0;
    let log_c = a.ln() + a * xi.ln_1p();
    rule.integrate(|s| {
        let log_w = log_c + (a - 1.0) * s.ln() - (a + 1.0) * (xi * s).ln_1p();
        // the finest panels put nodes within rounding of s = 1
        let q = s.powf(1.0 / delta).min(1.0 - f64::EPSILON / 2.0);
        norm_quantile(q) * log_w.exp()
    })
}
