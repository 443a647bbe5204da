use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::table::{emit, to_csv, write_atomic, Table};
use copreg_core::bocr::{self, FitTrace};
use copreg_core::model_io::{read_model, write_model, SavedModel};
use copreg_core::regression::{self, CrFitOptions};
use copreg_core::simlab::{auc, generate, ks_stat, run_table, BenchOverrides, DgpId, TableId};
use copreg_core::{Error, Family, FitConfig, Pooling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn num(v: f64) -> String {
    v.to_string()
}

pub struct SimulateArgs {
    pub dgp: Option<DgpId>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub z_true: bool,
}

pub fn simulate(cfg: &RunConfig, a: SimulateArgs) -> CliResult<()> {
    let dgp: DgpId = cfg.require(a.dgp, "dgp")?;
    let n: usize = cfg.require(a.n, "n")?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let seed = seed_or_entropy(cfg.pick(a.seed, "seed")?);
    let z_true = a.z_true || cfg.get::<bool>("z_true")?.unwrap_or(false);
    if z_true && !dgp.is_binary() {
        return Err(CliError::Usage(format!("{dgp} has no latent column")));
    }
    let out: Option<PathBuf> = cfg.pick(a.out, "out")?;
    let data = generate(dgp, n, &mut ChaCha8Rng::seed_from_u64(seed));
    let mut headers: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    headers.push("y".into());
    if z_true {
        headers.push("z_true".into());
    }
    let rows: Vec<Vec<String>> = (0..data.len())
        .map(|i| {
            let mut r: Vec<String> = data.row(i).iter().map(|&v| num(v)).collect();
            r.push(num(data.y()[i]));
            if let (true, Some(z)) = (z_true, data.z_true()) {
                r.push(num(z[i]));
            }
            r
        })
        .collect();
    emit(out.as_deref(), &to_csv(&headers, &rows)?)
}

pub struct FitArgs {
    pub task: Option<String>,
    pub family: Option<Family>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tuning: Tuning,
}

/// Optimizer settings settable by flag or config key.
#[derive(Default)]
pub struct Tuning {
    pub step: Option<f64>,
    pub mc_samples: Option<usize>,
    pub max_iter: Option<usize>,
    pub grad_tol: Option<f64>,
    pub pooling: Option<Pooling>,
    pub decay: bool,
}

impl Tuning {
    fn any(&self, cfg: &RunConfig) -> CliResult<bool> {
        let in_file = ["step", "mc_samples", "max_iter", "grad_tol", "pooling", "decay"]
            .iter()
            .map(|k| cfg.get::<String>(k))
            .collect::<CliResult<Vec<_>>>()?
            .iter()
            .any(Option::is_some);
        Ok(in_file
            || self.step.is_some()
            || self.mc_samples.is_some()
            || self.max_iter.is_some()
            || self.grad_tol.is_some()
            || self.pooling.is_some()
            || self.decay)
    }

    fn bocr(&self, cfg: &RunConfig, seed: u64) -> CliResult<FitConfig> {
        let d = FitConfig::default();
        Ok(FitConfig {
            step: cfg.pick(self.step, "step")?.unwrap_or(d.step),
            mc_samples: cfg.pick(self.mc_samples, "mc_samples")?.unwrap_or(d.mc_samples),
            max_iter: cfg.pick(self.max_iter, "max_iter")?.unwrap_or(d.max_iter),
            grad_tol: cfg.pick(self.grad_tol, "grad_tol")?.unwrap_or(d.grad_tol),
            seed,
            pooling: cfg.pick(self.pooling, "pooling")?.unwrap_or(d.pooling),
            decay: self.decay || cfg.get::<bool>("decay")?.unwrap_or(d.decay),
        })
    }

    fn cr(&self, cfg: &RunConfig) -> CliResult<CrFitOptions> {
        let d = CrFitOptions::default();
        Ok(CrFitOptions {
            max_iter: cfg.pick(self.max_iter, "max_iter")?.unwrap_or(d.max_iter),
            grad_tol: cfg.pick(self.grad_tol, "grad_tol")?.unwrap_or(d.grad_tol),
            ..d
        })
    }
}

fn trace_csv(trace: &FitTrace) -> String {
    let mut s = String::from("iteration,loglik,loglik_se,grad_theta,grad_phi,params\n");
    for r in &trace.records {
        let params: Vec<String> = r.params.iter().map(|&v| num(v)).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.iteration,
            num(r.loglik),
            num(r.loglik_se),
            num(r.grad_theta),
            num(r.grad_phi),
            params.join(" ")
        );
    }
    s
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn fit(cfg: &RunConfig, a: FitArgs) -> CliResult<()> {
    let task: String = cfg.require(a.task, "task")?;
    let family: Family = cfg.require(a.family, "family")?;
    let data_path: PathBuf = cfg.require(a.data, "data")?;
    let out: PathBuf = cfg.require(a.out, "out")?;
    let data = Table::read(&data_path)?.dataset()?;
    let text = match task.as_str() {
        "cr" => {
            let model = regression::fit_with(&data, family, &a.tuning.cr(cfg)?)?;
            write_model(&SavedModel::Cr(model), None)
        }
        "bocr" => {
            let seed = seed_or_entropy(cfg.pick(a.seed, "seed")?);
            let config = a.tuning.bocr(cfg, seed)?;
            match bocr::fit(&data, family, &config) {
                Ok((model, trace)) => {
                    let mut s = write_model(&SavedModel::Bocr(model), Some(&trace));
                    let _ = writeln!(s, "# seed {seed}");
                    s
                }
                Err(Error::Divergence { iteration, trace }) => {
                    let path = with_suffix(&out, ".trace.csv");
                    write_atomic(&path, trace_csv(&trace).as_bytes())?;
                    return Err(CliError::Numeric(format!(
                        "fit diverged at iteration {iteration}; trace written to {}",
                        path.display()
                    )));
                }
                Err(e) => return Err(e.into()),
            }
        }
        other => return Err(CliError::Usage(format!("unknown task `{other}` (expected cr or bocr)"))),
    };
    write_atomic(&out, text.as_bytes())
}

pub struct PredictArgs {
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn predict(cfg: &RunConfig, a: PredictArgs) -> CliResult<()> {
    let model_path: PathBuf = cfg.require(a.model, "model")?;
    let data_path: PathBuf = cfg.require(a.data, "data")?;
    let out: Option<PathBuf> = cfg.pick(a.out, "out")?;
    let text = std::fs::read_to_string(&model_path).map_err(|e| CliError::io(&model_path, e))?;
    let model = read_model(&text)?;
    let table = Table::read(&data_path)?;
    let d = table.dim()?;
    if d != model.dim() {
        return Err(CliError::Usage(format!(
            "model expects {} covariates, input has {d}",
            model.dim()
        )));
    }
    let xs = table.covariates()?;
    let mut headers = table.headers.clone();
    headers.push("prediction".into());
    let rows = table
        .rows
        .iter()
        .zip(&xs)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(num(model.predict(x)?));
            Ok(r)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    emit(out.as_deref(), &to_csv(&headers, &rows)?)
}

pub struct EvalArgs {
    pub data: Option<PathBuf>,
    pub metrics: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn eval(cfg: &RunConfig, a: EvalArgs) -> CliResult<()> {
    let data_path: PathBuf = cfg.require(a.data, "data")?;
    let out: Option<PathBuf> = cfg.pick(a.out, "out")?;
    let table = Table::read(&data_path)?;
    let pred = table.numeric_column("prediction")?;
    let y = table.numeric_column("y")?;
    let binary = y.iter().all(|&v| v == 0.0 || v == 1.0);
    let metrics: Vec<String> = match cfg.pick(a.metrics, "metrics")? {
        Some(list) => list.split(',').map(|m| m.trim().to_ascii_lowercase()).collect(),
        None if binary => vec!["auc".into(), "ks".into(), "mse".into()],
        None => vec!["mse".into()],
    };
    let labels = || -> CliResult<Vec<u8>> {
        if !binary {
            return Err(CliError::Usage("auc and ks need column y to hold 0/1 labels".into()));
        }
        Ok(y.iter().map(|&v| v as u8).collect())
    };
    let mut s = String::from("metric,value\n");
    for m in &metrics {
        let v = match m.as_str() {
            "auc" => auc(&pred, &labels()?)?,
            "ks" => ks_stat(&pred, &labels()?)?,
            "mse" => {
                if y.is_empty() {
                    return Err(CliError::Usage("mse of an empty file".into()));
                }
                pred.iter().zip(&y).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / y.len() as f64
            }
            other => return Err(CliError::Usage(format!("unknown metric `{other}` (expected auc, ks or mse)"))),
        };
        let _ = writeln!(s, "{m},{v:?}");
    }
    print!("{s}");
    if let Some(p) = out {
        write_atomic(&p, s.as_bytes())?;
    }
    Ok(())
}

pub struct BenchArgs {
    pub table: Option<TableId>,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub n: Option<usize>,
    pub eval_size: Option<usize>,
    pub out: Option<PathBuf>,
    pub tuning: Tuning,
}

/// Writes `<out>.csv` and `<out>.txt`, which depend only on the flags, and
/// `<out>.timing.txt` with wall-clock times.
pub fn bench(cfg: &RunConfig, a: BenchArgs) -> CliResult<()> {
    let table: TableId = cfg.require(a.table, "table")?;
    let seed: u64 = cfg
        .pick(a.seed, "seed")?
        .ok_or_else(|| CliError::Usage("bench needs --seed: reports must be reproducible".into()))?;
    let bocr = if a.tuning.any(cfg)? {
        Some(a.tuning.bocr(cfg, seed)?)
    } else {
        None
    };
    let overrides = BenchOverrides {
        replications: cfg.pick(a.replications, "replications")?,
        train_size: cfg.pick(a.n, "n")?,
        eval_size: cfg.pick(a.eval_size, "eval_size")?,
        bocr,
    };
    let out: PathBuf = cfg
        .pick(a.out, "out")?
        .unwrap_or_else(|| PathBuf::from(format!("bench-{table}")));
    let report = run_table(table, seed, &overrides)?;
    let text = report.to_text();
    write_atomic(&with_suffix(&out, ".csv"), report.to_csv().as_bytes())?;
    write_atomic(&with_suffix(&out, ".txt"), text.as_bytes())?;
    let mut timing = String::from("dgp,wall_seconds\n");
    for e in &report.experiments {
        let _ = writeln!(timing, "{},{:.3}", e.dgp, e.wall_time.as_secs_f64());
    }
    let _ = writeln!(timing, "total,{:.3}", report.wall_time().as_secs_f64());
    write_atomic(&with_suffix(&out, ".timing.txt"), timing.as_bytes())?;
    print!("{text}");
    println!("wall time {:.1} s", report.wall_time().as_secs_f64());
    Ok(())
}
