use super::{EIG_VALID, U_EPS};
use crate::error::{Error, Result};
use crate::special::{
    ln_gamma, norm_cdf, norm_ln_pdf, norm_quantile, student_t_cdf, student_t_ln_pdf,
    student_t_quantile,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

/// Strict upper-triangle index pairs in row-major order.
pub fn offdiag_pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dim).flat_map(move |i| (i + 1..dim).map(move |j| (i, j)))
}

/// Position of the pair `(i, j)` (either order) in the parameter vector.
pub fn offdiag_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

pub(crate) fn matrix_from_offdiag(dim: usize, values: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    for ((i, j), &v) in offdiag_pairs(dim).zip(values) {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

pub(crate) fn offdiag_of(m: &DMatrix<f64>) -> Vec<f64> {
    offdiag_pairs(m.nrows()).map(|(i, j)| m[(i, j)]).collect()
}

pub(crate) fn offdiag_from_rows(rows: &[Vec<f64>]) -> Result<(usize, Vec<f64>)> {
    let dim = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::Shape("correlation matrix must be square".into()));
        }
        if (r[i] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "correlation matrix must have unit diagonal".into(),
            ));
        }
    }
    for (i, j) in offdiag_pairs(dim) {
        if (rows[i][j] - rows[j][i]).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "correlation matrix must be symmetric".into(),
            ));
        }
    }
    Ok((dim, offdiag_pairs(dim).map(|(i, j)| rows[i][j]).collect()))
}

/// Cached factorization of a correlation matrix.
#[derive(Debug, Clone)]
pub(crate) struct Elliptical {
    dim: usize,
    inv: Vec<f64>,
    log_det: f64,
    chol: Vec<f64>,
    block: Option<Box<Elliptical>>,
}

impl Elliptical {
    pub(crate) fn new(dim: usize, values: &[f64]) -> Result<Self> {
        let m = matrix_from_offdiag(dim, values);
        let min_eig = SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(min_eig >= EIG_VALID) {
            return Err(Error::IllConditioned(format!(
                "smallest eigenvalue {min_eig:e} is below {EIG_VALID:e}"
            )));
        }
        Self::factor(m, true)
    }

    fn factor(m: DMatrix<f64>, with_block: bool) -> Result<Self> {
        let dim = m.nrows();
        let block = if with_block && dim > 2 {
            Some(Box::new(Self::factor(
                m.view((1, 1), (dim - 1, dim - 1)).into_owned(),
                false,
            )?))
        } else {
            None
        };
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::IllConditioned("Cholesky factorization failed".into()))?;
        let l = chol.l();
        let log_det = 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let inv = chol.inverse();
        Ok(Self {
            dim,
            inv: (0..dim * dim).map(|k| inv[(k / dim, k % dim)]).collect(),
            log_det,
            chol: (0..dim * dim).map(|k| l[(k / dim, k % dim)]).collect(),
            block,
        })
    }

    pub(crate) fn covariate_block(&self) -> &Elliptical {
        self.block
            .as_deref()
            .expect("covariate block exists for dimension > 2")
    }

    /// `w = Σ⁻¹ t` and `q = tᵀ Σ⁻¹ t`.
    fn solve(&self, t: &[f64], w: &mut [f64]) -> f64 {
        let d = self.dim;
        let mut q = 0.0;
        for i in 0..d {
            let row = &self.inv[i * d..(i + 1) * d];
            let wi: f64 = row.iter().zip(t).map(|(a, b)| a * b).sum();
            w[i] = wi;
            q += wi * t[i];
        }
        q
    }

    pub(crate) fn gaussian_log_density(&self, u: &[f64]) -> f64 {
        let t: Vec<f64> = u.iter().map(|&x| norm_quantile(x)).collect();
        let mut w = vec![0.0; self.dim];
        let q = self.solve(&t, &mut w);
        let tt: f64 = t.iter().map(|x| x * x).sum();
        -0.5 * self.log_det - 0.5 * (q - tt)
    }

    pub(crate) fn gaussian_eval(&self, u: &[f64], which: Option<usize>, grad: &mut [f64]) -> (f64, f64) {
        let d = self.dim;
        let t: Vec<f64> = u.iter().map(|&x| norm_quantile(x)).collect();
        let mut w = vec![0.0; d];
        let q = self.solve(&t, &mut w);
        let tt: f64 = t.iter().map(|x| x * x).sum();
        let log_density = -0.5 * self.log_det - 0.5 * (q - tt);
        // ∂/∂Σ = ½ Σ⁻¹ t tᵀ Σ⁻¹ − ½ Σ⁻¹; a free off-diagonal entry moves both
        // (i,j) and (j,i), doubling the entrywise derivative.
        for ((i, j), g) in offdiag_pairs(d).zip(grad.iter_mut()) {
            *g = w[i] * w[j] - self.inv[i * d + j];
        }
        let dlog_du = match which {
            Some(k) => -(w[k] - t[k]) / norm_ln_pdf(t[k]).exp(),
            None => 0.0,
        };
        (log_density, dlog_du)
    }

    fn t_const(&self, df: f64) -> f64 {
        let d = self.dim as f64;
        ln_gamma(0.5 * (df + d)) + (d - 1.0) * ln_gamma(0.5 * df) - d * ln_gamma(0.5 * (df + 1.0))
    }

    pub(crate) fn t_log_density(&self, u: &[f64], df: f64) -> f64 {
        let mut grad: [f64; 0] = [];
        self.t_eval_inner(u, df, None, &mut grad, false).0
    }

    pub(crate) fn t_eval(&self, u: &[f64], df: f64, which: Option<usize>, grad: &mut [f64]) -> (f64, f64) {
        self.t_eval_inner(u, df, which, grad, true)
    }

    fn t_eval_inner(
        &self,
        u: &[f64],
        df: f64,
        which: Option<usize>,
        grad: &mut [f64],
        want_grad: bool,
    ) -> (f64, f64) {
        let d = self.dim;
        let t: Vec<f64> = u.iter().map(|&x| student_t_quantile(x, df)).collect();
        let mut w = vec![0.0; d];
        let q = self.solve(&t, &mut w);
        let marg: f64 = t.iter().map(|x| (x * x / df).ln_1p()).sum();
        let df_d = df + d as f64;
        let log_density = self.t_const(df) - 0.5 * self.log_det - 0.5 * df_d * (q / df).ln_1p()
            + 0.5 * (df + 1.0) * marg;
        if want_grad {
            let scale = df_d / (df + q);
            for ((i, j), g) in offdiag_pairs(d).zip(grad.iter_mut()) {
                *g = scale * w[i] * w[j] - self.inv[i * d + j];
            }
        }
        let dlog_du = match which {
            Some(k) => {
                let dt = -df_d / (df + q) * w[k] + (df + 1.0) * t[k] / (df + t[k] * t[k]);
                dt / student_t_ln_pdf(t[k], df).exp()
            }
            None => 0.0,
        };
        (log_density, dlog_du)
    }

    fn correlated_normals<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim;
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        (0..d)
            .map(|i| (0..=i).map(|j| self.chol[i * d + j] * z[j]).sum())
            .collect()
    }

    pub(crate) fn sample_gaussian<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.correlated_normals(rng)
            .into_iter()
            .map(|x| norm_cdf(x).clamp(U_EPS, 1.0 - U_EPS))
            .collect()
    }

    pub(crate) fn sample_t<R: Rng + ?Sized>(&self, df: f64, rng: &mut R) -> Vec<f64> {
        let x = self.correlated_normals(rng);
        let chi = ChiSquared::new(df).expect("df > 2").sample(rng);
        let s = (chi / df).sqrt();
        x.into_iter()
            .map(|v| student_t_cdf(v / s, df).clamp(U_EPS, 1.0 - U_EPS))
            .collect()
    }
}
