//! Parametric copula families.
//!
//! Coordinate 0 of every pseudo-observation is the response (or the latent
//! success probability in the binary model); coordinates `1..dim` are the
//! covariates. Elliptical families are parametrized by the strictly upper
//! triangle of the correlation matrix in row-major order, so the free
//! parameter vector of a `dim`-variate Gaussian copula has
//! `dim * (dim - 1) / 2` entries and the diagonal is pinned at one.

mod archimedean;
mod elliptical;
mod fgm;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

pub use elliptical::{offdiag_index, offdiag_pairs};

/// Pseudo-observations are clamped into `[U_EPS, 1 - U_EPS]` wherever they
/// are produced by a transform that could round onto the boundary.
pub const U_EPS: f64 = 1e-15;

pub const CLAYTON_MIN: f64 = 1e-4;
pub const CLAYTON_MAX: f64 = 50.0;
pub const FGM_BOUND: f64 = 0.999;
/// Eigenvalue floor enforced by projection.
pub const EIG_FLOOR: f64 = 1e-6;
/// Smallest eigenvalue accepted by validation.
pub const EIG_VALID: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Clayton,
    Fgm,
    StudentT,
}

impl Family {
    pub fn param_count(self, dim: usize) -> usize {
        match self {
            Family::Gaussian | Family::StudentT => dim * (dim - 1) / 2,
            Family::Clayton | Family::Fgm => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Clayton => "clayton",
            Family::Fgm => "fgm",
            Family::StudentT => "t",
        }
    }

    pub fn is_elliptical(self) -> bool {
        matches!(self, Family::Gaussian | Family::StudentT)
    }

    /// Kendall's tau of a bivariate margin with dependence parameter `p`
    /// (correlation for elliptical families).
    pub fn kendall_tau(self, p: f64) -> f64 {
        match self {
            Family::Gaussian | Family::StudentT => 2.0 * p.asin() / std::f64::consts::PI,
            Family::Clayton => p / (p + 2.0),
            Family::Fgm => 2.0 * p / 9.0,
        }
    }

    /// Inverse of [`Family::kendall_tau`], clamped into the family's domain.
    pub fn param_from_tau(self, tau: f64) -> f64 {
        match self {
            Family::Gaussian | Family::StudentT => (std::f64::consts::FRAC_PI_2 * tau).sin(),
            Family::Clayton => {
                let t = tau.clamp(0.0, 0.95);
                (2.0 * t / (1.0 - t)).clamp(CLAYTON_MIN, CLAYTON_MAX)
            }
            Family::Fgm => (4.5 * tau).clamp(-FGM_BOUND, FGM_BOUND),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "clayton" => Ok(Family::Clayton),
            "fgm" => Ok(Family::Fgm),
            "t" | "student" | "studentt" | "student-t" => Ok(Family::StudentT),
            other => Err(Error::Parse(format!("unknown copula family `{other}`"))),
        }
    }
}

/// Unvalidated copula parameters, e.g. the result of an additive gradient
/// step. Turn into a [`CopulaSpec`] with [`CopulaSpec::new`] (checked) or
/// [`project_params`] (total).
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaParams {
    pub family: Family,
    pub dim: usize,
    pub values: Vec<f64>,
    /// Degrees of freedom, Student-t only.
    pub df: Option<f64>,
}

/// A pseudo-observation: a point strictly inside the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservation(Vec<f64>);

impl PseudoObservation {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        check_interior(&u)?;
        Ok(Self(u))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for PseudoObservation {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_interior(u: &[f64]) -> Result<()> {
    for (i, &x) in u.iter().enumerate() {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!(
                "pseudo-observation coordinate {i} = {x} is not inside (0,1)"
            )));
        }
    }
    Ok(())
}

/// Log density together with its derivatives at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub log_density: f64,
    /// Gradient of the log density w.r.t. the free parameters.
    pub grad: Vec<f64>,
    /// Derivative of the log density w.r.t. the requested coordinate.
    pub dlog_du: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Gaussian(elliptical::Elliptical),
    StudentT(elliptical::Elliptical, f64),
    Clayton(f64),
    Fgm(f64),
}

/// A validated copula: family, dimension and parameters, with the
/// factorizations needed for density evaluation cached.
#[derive(Debug, Clone)]
pub struct CopulaSpec {
    family: Family,
    dim: usize,
    values: Vec<f64>,
    kind: Kind,
}

impl PartialEq for CopulaSpec {
    fn eq(&self, other: &Self) -> bool {
        self.to_params() == other.to_params()
    }
}

impl CopulaSpec {
    pub fn new(params: CopulaParams) -> Result<Self> {
        let CopulaParams {
            family,
            dim,
            values,
            df,
        } = params;
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "copula dimension must be at least 2, got {dim}"
            )));
        }
        let expected = family.param_count(dim);
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{family} copula of dimension {dim} takes {expected} parameters, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        let kind = match family {
            Family::Clayton => {
                let delta = values[0];
                if delta <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "Clayton delta must be positive, got {delta}"
                    )));
                }
                Kind::Clayton(delta)
            }
            Family::Fgm => {
                if dim != 2 {
                    return Err(Error::InvalidParameter(
                        "FGM copula is bivariate only".into(),
                    ));
                }
                let theta = values[0];
                if theta.abs() > 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "FGM theta must lie in [-1,1], got {theta}"
                    )));
                }
                Kind::Fgm(theta)
            }
            Family::Gaussian => Kind::Gaussian(elliptical::Elliptical::new(dim, &values)?),
            Family::StudentT => {
                let df = df.ok_or_else(|| {
                    Error::InvalidParameter("Student-t copula needs degrees of freedom".into())
                })?;
                if !(df > 2.0) || !df.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "Student-t df must exceed 2, got {df}"
                    )));
                }
                Kind::StudentT(elliptical::Elliptical::new(dim, &values)?, df)
            }
        };
        Ok(Self {
            family,
            dim,
            values,
            kind,
        })
    }

    pub fn independence(dim: usize) -> Self {
        Self::gaussian_offdiag(dim, vec![0.0; dim * (dim - 1) / 2])
            .expect("identity correlation is valid")
    }

    pub fn gaussian_offdiag(dim: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(CopulaParams {
            family: Family::Gaussian,
            dim,
            values,
            df: None,
        })
    }

    /// Gaussian copula from a full correlation matrix given as rows.
    pub fn gaussian(corr: &[Vec<f64>]) -> Result<Self> {
        let (dim, values) = elliptical::offdiag_from_rows(corr)?;
        Self::gaussian_offdiag(dim, values)
    }

    pub fn student_t(corr: &[Vec<f64>], df: f64) -> Result<Self> {
        let (dim, values) = elliptical::offdiag_from_rows(corr)?;
        Self::new(CopulaParams {
            family: Family::StudentT,
            dim,
            values,
            df: Some(df),
        })
    }

    pub fn clayton(dim: usize, delta: f64) -> Result<Self> {
        Self::new(CopulaParams {
            family: Family::Clayton,
            dim,
            values: vec![delta],
            df: None,
        })
    }

    pub fn fgm(theta: f64) -> Result<Self> {
        Self::new(CopulaParams {
            family: Family::Fgm,
            dim: 2,
            values: vec![theta],
            df: None,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Free parameters in the layout described in the module docs.
    pub fn params(&self) -> &[f64] {
        &self.values
    }

    pub fn df(&self) -> Option<f64> {
        match self.kind {
            Kind::StudentT(_, df) => Some(df),
            _ => None,
        }
    }

    pub fn to_params(&self) -> CopulaParams {
        CopulaParams {
            family: self.family,
            dim: self.dim,
            values: self.values.clone(),
            df: self.df(),
        }
    }

    /// Full correlation matrix for elliptical families.
    pub fn correlation(&self) -> Option<DMatrix<f64>> {
        self.family
            .is_elliptical()
            .then(|| elliptical::matrix_from_offdiag(self.dim, &self.values))
    }

    /// Parameters after an additive step, not yet validated.
    pub fn stepped(&self, direction: &[f64], step: f64) -> CopulaParams {
        let mut p = self.to_params();
        for (v, d) in p.values.iter_mut().zip(direction) {
            *v += step * d;
        }
        p
    }

    fn check_point(&self, u: &[f64], dim: usize) -> Result<()> {
        if u.len() != dim {
            return Err(Error::Shape(format!(
                "expected a point of dimension {dim}, got {}",
                u.len()
            )));
        }
        check_interior(u)
    }

    pub fn log_density(&self, u: &[f64]) -> Result<f64> {
        self.check_point(u, self.dim)?;
        Ok(self.log_density_unchecked(u))
    }

    pub fn density(&self, u: &[f64]) -> Result<f64> {
        Ok(self.log_density(u)?.exp())
    }

    pub(crate) fn log_density_unchecked(&self, u: &[f64]) -> f64 {
        match &self.kind {
            Kind::Gaussian(e) => e.gaussian_log_density(u),
            Kind::StudentT(e, df) => e.t_log_density(u, *df),
            Kind::Clayton(delta) => archimedean::clayton_log_density(*delta, u),
            Kind::Fgm(theta) => fgm::log_density(*theta, u),
        }
    }

    /// Gradient of `log c(u)` with respect to the free parameters.
    pub fn log_density_grad(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(u, None)?.grad)
    }

    /// `∂c/∂u_which` at `u`.
    pub fn density_partial_arg(&self, u: &[f64], which: usize) -> Result<f64> {
        if which >= self.dim {
            return Err(Error::Shape(format!(
                "coordinate {which} out of range for dimension {}",
                self.dim
            )));
        }
        let ev = self.evaluate(u, Some(which))?;
        Ok(ev.log_density.exp() * ev.dlog_du)
    }

    /// Log density, its parameter gradient and (optionally) its derivative
    /// in one coordinate, sharing the quantile transforms.
    pub fn evaluate(&self, u: &[f64], which: Option<usize>) -> Result<Evaluation> {
        self.check_point(u, self.dim)?;
        let mut grad = vec![0.0; self.values.len()];
        let (log_density, dlog_du) = self.evaluate_into(u, which, &mut grad);
        Ok(Evaluation {
            log_density,
            grad,
            dlog_du,
        })
    }

    pub(crate) fn evaluate_into(&self, u: &[f64], which: Option<usize>, grad: &mut [f64]) -> (f64, f64) {
        match &self.kind {
            Kind::Gaussian(e) => e.gaussian_eval(u, which, grad),
            Kind::StudentT(e, df) => e.t_eval(u, *df, which, grad),
            Kind::Clayton(delta) => archimedean::clayton_eval(*delta, u, which, grad),
            Kind::Fgm(theta) => fgm::eval(*theta, u, which, grad),
        }
    }

    /// Copula density of the covariate block `(u_1, ..., u_d)` with the
    /// response coordinate integrated out.
    pub fn covariate_margin_density(&self, u_x: &[f64]) -> Result<f64> {
        self.check_point(u_x, self.dim - 1)?;
        Ok(self.covariate_margin_log_density_unchecked(u_x).exp())
    }

    pub(crate) fn covariate_margin_log_density_unchecked(&self, u_x: &[f64]) -> f64 {
        if u_x.len() < 2 {
            return 0.0;
        }
        match &self.kind {
            Kind::Gaussian(e) => e.covariate_block().gaussian_log_density(u_x),
            Kind::StudentT(e, df) => e.covariate_block().t_log_density(u_x, *df),
            Kind::Clayton(delta) => archimedean::clayton_log_density(*delta, u_x),
            Kind::Fgm(_) => 0.0,
        }
    }

    /// Draws `n` i.i.d. points from the copula.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<PseudoObservation> {
        (0..n)
            .map(|_| PseudoObservation(self.sample_one(rng)))
            .collect()
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut u = match &self.kind {
            Kind::Gaussian(e) => e.sample_gaussian(rng),
            Kind::StudentT(e, df) => e.sample_t(*df, rng),
            Kind::Clayton(delta) => archimedean::clayton_sample(*delta, self.dim, rng),
            Kind::Fgm(theta) => fgm::sample(*theta, rng),
        };
        for x in &mut u {
            *x = x.clamp(U_EPS, 1.0 - U_EPS);
        }
        u
    }

    /// Nearest feasible copula; identity on already-feasible parameters.
    pub fn project(&self) -> CopulaSpec {
        project_params(&self.to_params())
    }
}

/// Maps possibly infeasible parameters onto the feasible set: scalars are
/// clamped (Clayton delta to `[1e-4, 50]`, FGM theta to `[-0.999, 0.999]`);
/// correlation matrices are symmetrized, eigenvalue-clipped at `1e-6` and
/// rescaled to unit diagonal.
pub fn project_params(params: &CopulaParams) -> CopulaSpec {
    let dim = params.dim.max(2);
    let mut values = params.values.clone();
    values.resize(params.family.param_count(dim), 0.0);
    let values = match params.family {
        Family::Clayton => {
            let d = if values[0].is_nan() { CLAYTON_MIN } else { values[0] };
            vec![d.clamp(CLAYTON_MIN, CLAYTON_MAX)]
        }
        Family::Fgm => {
            let t = if values[0].is_nan() { 0.0 } else { values[0] };
            vec![t.clamp(-FGM_BOUND, FGM_BOUND)]
        }
        Family::Gaussian | Family::StudentT => project_correlation(dim, &values),
    };
    let df = match params.family {
        Family::StudentT => Some(match params.df {
            Some(df) if df > 2.0 && df.is_finite() => df,
            Some(df) if df.is_infinite() && df > 0.0 => 1e6,
            _ => 2.0 + 1e-6,
        }),
        _ => None,
    };
    CopulaSpec::new(CopulaParams {
        family: params.family,
        dim: if params.family == Family::Fgm { 2 } else { dim },
        values,
        df,
    })
    .expect("projected parameters are feasible")
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn project_correlation(dim: usize, values: &[f64]) -> Vec<f64> {
    let cleaned: Vec<f64> = values
        .iter()
        .map(|v| if v.is_finite() { *v } else { 0.0 })
        .collect();
    let mut m = elliptical::matrix_from_offdiag(dim, &cleaned);
    if min_eigenvalue(&m) >= EIG_FLOOR {
        return cleaned;
    }
    let mut floor = EIG_FLOOR;
    for _ in 0..60 {
        let eig = SymmetricEigen::new(m.clone());
        let lambda = eig.eigenvalues.map(|l| l.max(floor));
        let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&lambda) * eig.eigenvectors.transpose();
        let rebuilt = (&rebuilt + rebuilt.transpose()) * 0.5;
        let scale: Vec<f64> = (0..dim).map(|i| 1.0 / rebuilt[(i, i)].sqrt()).collect();
        let rescaled: Vec<f64> = offdiag_pairs(dim)
            .map(|(i, j)| (rebuilt[(i, j)] * scale[i] * scale[j]).clamp(-1.0, 1.0))
            .collect();
        // rebuilt from the upper triangle so the feasibility check below is
        // the same computation a second projection would perform
        m = elliptical::matrix_from_offdiag(dim, &rescaled);
        if min_eigenvalue(&m) >= EIG_FLOOR {
            return rescaled;
        }
        floor *= 2.0;
    }
    elliptical::offdiag_of(&m)
}
