//! Linear and logistic regression baselines, both with an intercept.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::special::sigmoid;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

const RIDGE: f64 = 1e-10;
/// Smallest eigenvalue ratio of the scaled Gram matrix treated as full rank.
const RANK_TOL: f64 = 1e-12;

/// Coefficients `[intercept, slope_1, ..., slope_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coef: Vec<f64>,
}

impl OlsFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        linear(&self.coef, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogitFit {
    pub coef: Vec<f64>,
    pub iterations: usize,
    /// Newton–Raphson did not settle: the classes are (quasi-)separated and
    /// the maximum-likelihood estimate does not exist.
    pub separated: bool,
}

impl LogitFit {
    pub fn predict_prob(&self, x: &[f64]) -> f64 {
        sigmoid(linear(&self.coef, x))
    }
}

fn linear(coef: &[f64], x: &[f64]) -> f64 {
    coef[0] + coef[1..].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
}

fn design(data: &Dataset) -> DMatrix<f64> {
    let d = data.dim();
    DMatrix::from_fn(data.len(), d + 1, |i, j| if j == 0 { 1.0 } else { data.row(i)[j - 1] })
}

/// Rank check on the Gram matrix scaled to unit diagonal.
fn check_rank(gram: &DMatrix<f64>) -> Result<()> {
    let p = gram.nrows();
    let diag: Vec<f64> = (0..p).map(|i| gram[(i, i)]).collect();
    if diag.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::SingularDesign);
    }
    let scaled = DMatrix::from_fn(p, p, |i, j| gram[(i, j)] / (diag[i] * diag[j]).sqrt());
    let eig = SymmetricEigen::new(scaled).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > RANK_TOL * max) {
        return Err(Error::SingularDesign);
    }
    Ok(())
}

/// Least squares via the normal equations with a `1e-10` ridge.
pub fn fit_ols(data: &Dataset) -> Result<OlsFit> {
    let p = data.dim() + 1;
    if data.len() <= p {
        return Err(Error::InsufficientData {
            needed: p + 1,
            got: data.len(),
        });
    }
    let x = design(data);
    let y = DVector::from_column_slice(data.y());
    let gram = x.transpose() * &x;
    check_rank(&gram)?;
    let a = gram + DMatrix::identity(p, p) * RIDGE;
    let rhs = x.transpose() * y;
    let coef = a.cholesky().ok_or(Error::SingularDesign)?.solve(&rhs);
    Ok(OlsFit {
        coef: coef.iter().cloned().collect(),
    })
}

pub const LOGIT_TOL: f64 = 1e-8;
pub const LOGIT_MAX_ITER: usize = 100;

/// Logistic regression by Newton–Raphson (IRLS). The `1e-10` ridge on the
/// Hessian keeps steps defined for rank-deficient designs, e.g. an all-zero
/// covariate, whose coefficient then stays at zero.
pub fn fit_logit(data: &Dataset) -> Result<LogitFit> {
    let labels = data.labels()?;
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::DegenerateData(
            "column y has a single class; both 0 and 1 are required".into(),
        ));
    }
    let x = design(data);
    let (n, p) = x.shape();
    let y = DVector::from_iterator(n, labels.iter().map(|&l| l as f64));
    let mut beta = DVector::zeros(p);
    for it in 1..=LOGIT_MAX_ITER {
        let eta = &x * &beta;
        let prob = eta.map(sigmoid);
        let w = prob.map(|q| q * (1.0 - q));
        let grad = x.transpose() * (&y - &prob);
        let mut hess = DMatrix::zeros(p, p);
        for i in 0..n {
            let row = x.row(i);
            hess += row.transpose() * row * w[i];
        }
        hess += DMatrix::identity(p, p) * RIDGE;
        let Some(chol) = hess.cholesky() else {
            return Ok(LogitFit {
                coef: beta.iter().cloned().collect(),
                iterations: it,
                separated: true,
            });
        };
        let delta = chol.solve(&grad);
        let next = &beta + &delta;
        if !next.iter().all(|b| b.is_finite()) {
            // the likelihood keeps rising toward a separating direction
            return Ok(LogitFit {
                coef: beta.iter().cloned().collect(),
                iterations: it,
                separated: true,
            });
        }
        beta = next;
        if delta.amax() < LOGIT_TOL {
            return Ok(LogitFit {
                coef: beta.iter().cloned().collect(),
                iterations: it,
                separated: false,
            });
        }
    }
    Ok(LogitFit {
        coef: beta.iter().cloned().collect(),
        iterations: LOGIT_MAX_ITER,
        separated: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_response() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i % 7) as f64]).collect();
        let d = Dataset::new(x, vec![3.5; 20]).unwrap();
        let f = fit_ols(&d).unwrap();
        assert!((f.coef[0] - 3.5).abs() < 1e-8);
        assert!(f.coef[1].abs() < 1e-9 && f.coef[2].abs() < 1e-9);
    }

    #[test]
    fn collinear_design_is_singular() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let d = Dataset::new(x, (0..20).map(|i| i as f64).collect()).unwrap();
        assert!(matches!(fit_ols(&d), Err(Error::SingularDesign)));
    }

    #[test]
    fn balanced_logit_with_zero_covariates() {
        let x = vec![vec![0.0, 0.0]; 10];
        let y = (0..10).map(|i| (i % 2) as f64).collect();
        let f = fit_logit(&Dataset::new(x, y).unwrap()).unwrap();
        assert!(!f.separated);
        assert!(f.coef.iter().all(|c| c.abs() < 1e-12), "{:?}", f.coef);
        assert_eq!(f.predict_prob(&[0.0, 0.0]), 0.5);
    }

    #[test]
    fn separation_is_flagged() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y = (0..10).map(|i| if i < 5 { 0.0 } else { 1.0 }).collect();
        let f = fit_logit(&Dataset::new(x, y).unwrap()).unwrap();
        assert!(f.separated);
    }
}
