use copreg_core::bocr;
use copreg_core::model_io::{read_model, write_model, SavedModel};
use copreg_core::regression;
use copreg_core::simlab::{self, BenchOverrides, DgpId, TableId};
use copreg_core::{CopulaSpec, Dataset, Family, FitConfig, Pooling};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

create_exception!(copreg, CopregError, PyValueError);

fn err(e: copreg_core::Error) -> PyErr {
    CopregError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = copreg_core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// A parametric copula.
#[pyclass(name = "Copula", module = "copreg", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCopula(CopulaSpec);

#[pymethods]
impl PyCopula {
    #[staticmethod]
    fn gaussian(corr: Vec<Vec<f64>>) -> PyResult<Self> {
        CopulaSpec::gaussian(&corr).map(Self).map_err(err)
    }

    #[staticmethod]
    fn student_t(corr: Vec<Vec<f64>>, df: f64) -> PyResult<Self> {
        CopulaSpec::student_t(&corr, df).map(Self).map_err(err)
    }

    #[staticmethod]
    fn clayton(dim: usize, delta: f64) -> PyResult<Self> {
        CopulaSpec::clayton(dim, delta).map(Self).map_err(err)
    }

    #[staticmethod]
    fn fgm(theta: f64) -> PyResult<Self> {
        CopulaSpec::fgm(theta).map(Self).map_err(err)
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.0.family().name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn params(&self) -> Vec<f64> {
        self.0.params().to_vec()
    }

    fn density(&self, u: Vec<f64>) -> PyResult<f64> {
        self.0.density(&u).map_err(err)
    }

    fn log_density(&self, u: Vec<f64>) -> PyResult<f64> {
        self.0.log_density(&u).map_err(err)
    }

    /// Gradient of the log-density in the copula parameters.
    fn log_density_grad(&self, u: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.log_density_grad(&u).map_err(err)
    }

    fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.0.sample_one(&mut rng)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Copula({}, dim={}, params={:?})", self.0.family().name(), self.0.dim(), self.0.params())
    }
}

/// A fitted model: copula regression for continuous responses or the
/// binary-outcome model, as produced by `fit_cr` / `fit_bocr`.
#[pyclass(name = "Model", module = "copreg", frozen)]
struct PyModel {
    inner: SavedModel,
    loglik: Vec<f64>,
}

#[pymethods]
impl PyModel {
    /// `"cr"` or `"bocr"`.
    #[getter]
    fn task(&self) -> &'static str {
        match self.inner {
            SavedModel::Cr(_) => "cr",
            SavedModel::Bocr(_) => "bocr",
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn copula(&self) -> PyCopula {
        PyCopula(match &self.inner {
            SavedModel::Cr(m) => m.copula().clone(),
            SavedModel::Bocr(m) => m.copula().clone(),
        })
    }

    /// `(ln α, ln β)` of the latent Beta law; None for continuous models.
    #[getter]
    fn latent(&self) -> Option<(f64, f64)> {
        match &self.inner {
            SavedModel::Bocr(m) => Some((m.latent().log_alpha, m.latent().log_beta)),
            SavedModel::Cr(_) => None,
        }
    }

    /// Monte-Carlo log-likelihood per ascent iteration (empty for `cr`).
    #[getter]
    fn loglik_trace(&self) -> Vec<f64> {
        self.loglik.clone()
    }

    /// Conditional mean (`cr`) or success probability (`bocr`) per row.
    fn predict(&self, py: Python<'_>, x: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        py.detach(|| x.iter().map(|r| self.inner.predict(r)).collect::<Result<Vec<_>, _>>())
            .map_err(err)
    }

    /// The text model format read by `copreg predict`.
    fn to_text(&self) -> String {
        write_model(&self.inner, None)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: read_model(text).map_err(err)?,
            loglik: Vec::new(),
        })
    }
}

fn dataset(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Dataset> {
    Dataset::new(x, y).map_err(err)
}

/// Fit copula regression with kernel-smoothed margins.
#[pyfunction]
fn fit_cr(py: Python<'_>, x: Vec<Vec<f64>>, y: Vec<f64>, family: &str) -> PyResult<PyModel> {
    let family: Family = parse(family)?;
    let data = dataset(x, y)?;
    let model = py.detach(|| regression::fit(&data, family)).map_err(err)?;
    Ok(PyModel {
        inner: SavedModel::Cr(model),
        loglik: Vec::new(),
    })
}

/// Fit the binary-outcome model by Monte-Carlo score ascent.
#[pyfunction]
#[pyo3(signature = (x, y, family, seed, step=None, mc_samples=None, max_iter=None, grad_tol=None, pooling=None))]
#[allow(clippy::too_many_arguments)]
fn fit_bocr(
    py: Python<'_>,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    family: &str,
    seed: u64,
    step: Option<f64>,
    mc_samples: Option<usize>,
    max_iter: Option<usize>,
    grad_tol: Option<f64>,
    pooling: Option<&str>,
) -> PyResult<PyModel> {
    let family: Family = parse(family)?;
    let d = FitConfig::default();
    let config = FitConfig {
        step: step.unwrap_or(d.step),
        mc_samples: mc_samples.unwrap_or(d.mc_samples),
        max_iter: max_iter.unwrap_or(d.max_iter),
        grad_tol: grad_tol.unwrap_or(d.grad_tol),
        seed,
        pooling: pooling.map(parse::<Pooling>).transpose()?.unwrap_or(d.pooling),
        ..d
    };
    let data = dataset(x, y)?;
    let (model, trace) = py.detach(|| bocr::fit(&data, family, &config)).map_err(err)?;
    Ok(PyModel {
        inner: SavedModel::Bocr(model),
        loglik: trace.loglik(),
    })
}

/// Draw `n` rows from a simulation design. Returns `(x, y, z_true)`, with
/// `z_true` None for continuous designs.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn simulate(dgp: &str, n: usize, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, Option<Vec<f64>>)> {
    let dgp: DgpId = parse(dgp)?;
    let data = simlab::generate(dgp, n, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok((data.rows().to_vec(), data.y().to_vec(), data.z_true().map(<[f64]>::to_vec)))
}

#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<u8>) -> PyResult<f64> {
    simlab::auc(&scores, &labels).map_err(err)
}

#[pyfunction]
fn ks_stat(scores: Vec<f64>, labels: Vec<u8>) -> PyResult<f64> {
    simlab::ks_stat(&scores, &labels).map_err(err)
}

/// Run a simulation table and return its CSV report.
#[pyfunction]
#[pyo3(name = "bench", signature = (table, seed, replications=None, n=None, eval_size=None))]
fn run_bench(
    py: Python<'_>,
    table: &str,
    seed: u64,
    replications: Option<usize>,
    n: Option<usize>,
    eval_size: Option<usize>,
) -> PyResult<String> {
    let table: TableId = parse(table)?;
    let overrides = BenchOverrides {
        replications,
        train_size: n,
        eval_size,
        bocr: None,
    };
    let report = py.detach(|| simlab::run_table(table, seed, &overrides)).map_err(err)?;
    Ok(report.to_csv())
}

#[pymodule]
fn copreg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CopregError", m.py().get_type::<CopregError>())?;
    m.add_class::<PyCopula>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(fit_cr, m)?)?;
    m.add_function(wrap_pyfunction!(fit_bocr, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(ks_stat, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
