//! Plain-text model files.
//!
//! ```text
//! copreg-model v1
//! task = cr
//! family = gaussian
//! dim = 2
//! params = 0.5
//! margin_y = empirical 0.31 1.2 1.9 ...
//! margin_x1 = normal 0 1
//! ```
//!
//! Floats are written in shortest round-trip form, so a loaded model
//! predicts exactly like the one that was saved. Lines starting with `#`
//! are comments.

use crate::bocr::{BocrModel, FitTrace};
use crate::copula::{CopulaParams, CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::marginals::{EmpiricalCdf, LatentParams, MarginalModel};
use crate::regression::CrModel;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const FORMAT_TAG: &str = "copreg-model v1";
/// Trace records written as trailing comments.
pub const TRACE_TAIL: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum SavedModel {
    Cr(CrModel),
    Bocr(BocrModel),
}

impl SavedModel {
    pub fn dim(&self) -> usize {
        match self {
            SavedModel::Cr(m) => m.dim(),
            SavedModel::Bocr(m) => m.dim(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            SavedModel::Cr(m) => m.predict_mean(x),
            SavedModel::Bocr(m) => m.predict_prob(x),
        }
    }
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn write_margin(m: &MarginalModel) -> String {
    match m {
        MarginalModel::Normal { mean, sd } => format!("normal {mean:?} {sd:?}"),
        MarginalModel::Uniform01 => "uniform".into(),
        MarginalModel::Beta { alpha, beta } => format!("beta {alpha:?} {beta:?}"),
        MarginalModel::Gumbel => "gumbel".into(),
        MarginalModel::Empirical(e) => format!("empirical {:?} {}", e.bandwidth(), floats(e.sample())),
    }
}

fn write_copula(s: &mut String, c: &CopulaSpec) {
    let _ = writeln!(s, "family = {}", c.family());
    let _ = writeln!(s, "dim = {}", c.dim());
    if let Some(df) = c.df() {
        let _ = writeln!(s, "df = {df:?}");
    }
    let _ = writeln!(s, "params = {}", floats(c.params()));
}

pub fn write_cr(model: &CrModel) -> String {
    let mut s = format!("{FORMAT_TAG}\ntask = cr\n");
    write_copula(&mut s, model.copula());
    let _ = writeln!(s, "margin_y = {}", write_margin(model.margin_y()));
    for (j, m) in model.margins_x().iter().enumerate() {
        let _ = writeln!(s, "margin_x{} = {}", j + 1, write_margin(m));
    }
    if let Some(f) = model.fit_info() {
        let _ = writeln!(
            s,
            "# pseudo-MLE: mean loglik {:?}, {} iterations, gradient norm {:?}",
            f.loglik, f.iterations, f.grad_norm
        );
    }
    s
}

pub fn write_bocr(model: &BocrModel, trace: Option<&FitTrace>) -> String {
    let mut s = format!("{FORMAT_TAG}\ntask = bocr\n");
    write_copula(&mut s, model.copula());
    let l = model.latent();
    let _ = writeln!(s, "latent = {:?} {:?}", l.log_alpha, l.log_beta);
    for (j, m) in model.margins_x().iter().enumerate() {
        let _ = writeln!(s, "margin_x{} = {}", j + 1, write_margin(m));
    }
    if let Some(t) = trace {
        let _ = writeln!(s, "# trace ({} iterations): iteration loglik loglik_se grad_theta grad_phi", t.len());
        for r in t.records.iter().skip(t.len().saturating_sub(TRACE_TAIL)) {
            let _ = writeln!(
                s,
                "# {} {:?} {:?} {:?} {:?}",
                r.iteration, r.loglik, r.loglik_se, r.grad_theta, r.grad_phi
            );
        }
    }
    s
}

pub fn write_model(model: &SavedModel, trace: Option<&FitTrace>) -> String {
    match model {
        SavedModel::Cr(m) => write_cr(m),
        SavedModel::Bocr(m) => write_bocr(m, trace),
    }
}

fn parse_floats(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{key}`: `{t}` is not a number")))
        })
        .collect()
}

fn parse_margin(key: &str, v: &str) -> Result<MarginalModel> {
    let (kind, rest) = v.trim().split_once(' ').unwrap_or((v.trim(), ""));
    let nums = parse_floats(key, rest)?;
    let want = |n: usize| -> Result<()> {
        if nums.len() != n {
            return Err(Error::Parse(format!("`{key}`: {kind} takes {n} numbers, got {}", nums.len())));
        }
        Ok(())
    };
    match kind {
        "normal" => {
            want(2)?;
            MarginalModel::normal(nums[0], nums[1])
        }
        "uniform" => {
            want(0)?;
            Ok(MarginalModel::Uniform01)
        }
        "beta" => {
            want(2)?;
            MarginalModel::beta(nums[0], nums[1])
        }
        "gumbel" => {
            want(0)?;
            Ok(MarginalModel::Gumbel)
        }
        "empirical" => {
            if nums.len() < 2 {
                return Err(Error::Parse(format!("`{key}`: empirical margin needs a bandwidth and a sample")));
            }
            Ok(MarginalModel::Empirical(EmpiricalCdf::new(nums[1..].to_vec(), nums[0])?))
        }
        other => Err(Error::Parse(format!("`{key}`: unknown margin kind `{other}`"))),
    }
}

pub fn read_model(text: &str) -> Result<SavedModel> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l.trim() == FORMAT_TAG => {}
        Some(l) => {
            return Err(Error::Parse(format!(
                "unsupported model format `{}` (expected `{FORMAT_TAG}`)",
                l.trim()
            )));
        }
        None => return Err(Error::Parse("empty model file".into())),
    }
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 2)))?;
        if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate key `{}`", k.trim())));
        }
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| Error::Parse(format!("missing key `{k}`")));
    let family: Family = get("family")?.parse()?;
    let dim: usize = get("dim")?
        .parse()
        .map_err(|_| Error::Parse("`dim` is not an integer".into()))?;
    let df = kv.get("df").map(|v| parse_floats("df", v)).transpose()?;
    let df = match df {
        Some(v) if v.len() == 1 => Some(v[0]),
        Some(_) => return Err(Error::Parse("`df` takes one number".into())),
        None => None,
    };
    let values = parse_floats("params", get("params")?)?;
    let copula = CopulaSpec::new(CopulaParams {
        family,
        dim,
        values,
        df,
    })?;
    if dim < 2 {
        return Err(Error::Parse("`dim` must be at least 2".into()));
    }
    let margins_x = (1..dim)
        .map(|j| {
            let key = format!("margin_x{j}");
            parse_margin(&key, get(&key)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let known = |k: &str| {
        matches!(k, "task" | "family" | "dim" | "df" | "params" | "margin_y" | "latent")
            || k.strip_prefix("margin_x")
                .and_then(|j| j.parse::<usize>().ok())
                .is_some_and(|j| j >= 1 && j < dim)
    };
    if let Some(k) = kv.keys().find(|k| !known(k)) {
        return Err(Error::Parse(format!("unknown key `{k}`")));
    }
    match get("task")?.as_str() {
        "cr" => {
            let margin_y = parse_margin("margin_y", get("margin_y")?)?;
            Ok(SavedModel::Cr(CrModel::from_parts(copula, margins_x, margin_y)?))
        }
        "bocr" => {
            let l = parse_floats("latent", get("latent")?)?;
            if l.len() != 2 {
                return Err(Error::Parse("`latent` takes two numbers".into()));
            }
            let latent = LatentParams::new(l[0], l[1])?;
            Ok(SavedModel::Bocr(BocrModel::new(copula, latent, margins_x)?))
        }
        other => Err(Error::Parse(format!("unknown task `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_parameters_exactly() {
        let sample: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let emp = crate::marginals::fit_empirical(&sample).unwrap();
        let copula = CopulaSpec::gaussian_offdiag(3, vec![0.1 / 3.0, -0.2, 0.3]).unwrap();
        let m = CrModel::from_parts(copula, vec![emp.clone(), MarginalModel::Gumbel], emp).unwrap();
        let text = write_cr(&m);
        let back = read_model(&text).unwrap();
        assert_eq!(back, SavedModel::Cr(m.clone()));
        let x = [0.05, -0.3];
        assert_eq!(back.predict(&x).unwrap(), m.predict_mean(&x).unwrap());
    }

    #[test]
    fn rejects_wrong_tag_and_unknown_keys() {
        assert!(read_model("copreg-model v2\n").is_err());
        let bad = "copreg-model v1\ntask = bocr\nfamily = fgm\ndim = 2\nparams = 0.1\nlatent = 0 0\nmargin_x1 = uniform\ncolour = red\n";
        assert!(matches!(read_model(bad), Err(Error::Parse(_))));
        let good = bad.replace("colour = red\n", "");
        assert!(read_model(&good).is_ok());
    }
}
