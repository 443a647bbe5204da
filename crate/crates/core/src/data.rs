use crate::error::{Error, Result};

/// `n` observations of `d` continuous covariates and one response.
///
/// For binary data generated by a simulation design the latent success
/// probability is kept in `z_true`. Fitting code never reads it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    z_true: Option<Vec<f64>>,
}

impl Dataset {
    /// `x` holds one row of covariates per observation.
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Shape(format!(
                "{} covariate rows but {} responses",
                x.len(),
                y.len()
            )));
        }
        if let Some(first) = x.first() {
            let d = first.len();
            if d == 0 {
                return Err(Error::Shape("no covariates".into()));
            }
            if let Some(bad) = x.iter().position(|r| r.len() != d) {
                return Err(Error::Shape(format!(
                    "row {bad} has {} covariates, expected {d}",
                    x[bad].len()
                )));
            }
        }
        if x.iter().flatten().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite value in dataset".into()));
        }
        Ok(Self { x, y, z_true: None })
    }

    pub fn with_latent(mut self, z: Vec<f64>) -> Result<Self> {
        if z.len() != self.y.len() {
            return Err(Error::Shape("latent column length differs from response".into()));
        }
        self.z_true = Some(z);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of covariates (0 for an empty dataset).
    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i]
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z_true(&self) -> Option<&[f64]> {
        self.z_true.as_deref()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.iter().map(|r| r[j]).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.y.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Binary labels; errors if any response is not exactly 0 or 1.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.y
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == 0.0 {
                    Ok(0)
                } else if v == 1.0 {
                    Ok(1)
                } else {
                    Err(Error::DegenerateData(format!(
                        "response y in row {i} is {v}, expected 0 or 1"
                    )))
                }
            })
            .collect()
    }

    /// Rows `range` as a new dataset, latent column included.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Dataset {
        Dataset {
            x: self.x[range.clone()].to_vec(),
            y: self.y[range.clone()].to_vec(),
            z_true: self.z_true.as_ref().map(|z| z[range].to_vec()),
        }
    }
}
