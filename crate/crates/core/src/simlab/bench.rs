//! The three simulation tables: CSV and aligned-text renderings.

use super::dgp::DgpId;
use super::experiment::{run_experiment, ExperimentConfig, Method, Metrics, MetricsReport};
use crate::bocr::FitConfig;
use crate::copula::Family;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    /// Continuous designs with the copula family known.
    T1,
    /// Multivariate continuous designs, IMSE against observed responses.
    T2,
    /// Binary designs: logit against BOCR.
    T4,
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(TableId::T1),
            "T2" | "2" => Ok(TableId::T2),
            "T4" | "4" => Ok(TableId::T4),
            _ => Err(Error::Parse(format!("unknown table `{s}` (expected T1, T2 or T4)"))),
        }
    }
}

impl std::fmt::Display for TableId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TableId::T1 => "T1",
            TableId::T2 => "T2",
            TableId::T4 => "T4",
        })
    }
}

/// Optional replacements for a table's default protocol.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchOverrides {
    pub replications: Option<usize>,
    pub train_size: Option<usize>,
    pub eval_size: Option<usize>,
    pub bocr: Option<FitConfig>,
}

impl TableId {
    /// Designs of the table with the copula family fitted to each.
    pub fn rows(self) -> Vec<(DgpId, Family)> {
        match self {
            TableId::T1 => vec![
                (DgpId::Ia, Family::Clayton),
                (DgpId::Ib, Family::Fgm),
                (DgpId::Ic, Family::Gaussian),
            ],
            TableId::T2 => vec![
                (DgpId::IIa, Family::Gaussian),
                (DgpId::IIc, Family::Clayton),
                (DgpId::IId, Family::StudentT),
            ],
            TableId::T4 => vec![
                (DgpId::IIIa, Family::Clayton),
                (DgpId::IIIb, Family::Gaussian),
                (DgpId::IIIc, Family::Gaussian),
            ],
        }
    }

    pub fn configs(self, seed: u64, o: &BenchOverrides) -> Vec<ExperimentConfig> {
        self.rows()
            .into_iter()
            .map(|(dgp, family)| {
                let mut c = if dgp.is_binary() {
                    ExperimentConfig::binary(dgp, family, seed)
                } else {
                    let mut c = ExperimentConfig::continuous(dgp, seed);
                    c.methods = vec![Method::Cr(family), Method::Ols];
                    c
                };
                if let Some(v) = o.replications {
                    c.replications = v;
                }
                if let Some(v) = o.train_size {
                    c.train_size = v;
                }
                if let Some(v) = o.eval_size {
                    c.eval_size = v;
                }
                if let Some(b) = &o.bocr {
                    c.bocr = b.clone();
                }
                c
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub table: TableId,
    pub seed: u64,
    pub experiments: Vec<MetricsReport>,
}

pub fn run_table(table: TableId, seed: u64, overrides: &BenchOverrides) -> Result<TableReport> {
    let experiments = table
        .configs(seed, overrides)
        .iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport {
        table,
        seed,
        experiments,
    })
}

fn margin_label(m: &MarginalModel) -> String {
    match m {
        MarginalModel::Normal { .. } => "normal".into(),
        MarginalModel::Uniform01 => "Uniform".into(),
        MarginalModel::Beta { alpha, beta } => format!("Beta({alpha},{beta})"),
        MarginalModel::Gumbel => "Gumbel".into(),
        MarginalModel::Empirical(_) => "empirical".into(),
    }
}

fn copula_label(f: Family) -> &'static str {
    match f {
        Family::Gaussian => "Gaussian",
        Family::Clayton => "Clayton",
        Family::Fgm => "FGM",
        Family::StudentT => "T",
    }
}

/// Quotes a CSV field that holds a comma, as in `Beta(0.5,0.5)`.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

impl TableReport {
    pub fn wall_time(&self) -> Duration {
        self.experiments.iter().map(|e| e.wall_time).sum()
    }

    /// One row per (design, method), full-precision values.
    pub fn to_csv(&self) -> String {
        let binary = self.table == TableId::T4;
        let mut s = String::new();
        if binary {
            s.push_str("table,dgp,copula,method,seed,replications,train,test,succeeded,failed,auc,ks\n");
        } else {
            s.push_str(
                "table,dgp,y_margin,copula,method,seed,replications,train,eval,convention,succeeded,failed,imse,ibias,ivar\n",
            );
        }
        for (e, (_, family)) in self.experiments.iter().zip(self.table.rows()) {
            for r in &e.results {
                let head = format!("{},{},", self.table, e.dgp);
                match (&r.metrics, binary) {
                    (m, true) => {
                        let (a, k) = match m {
                            Some(Metrics::Classification { auc, ks }) => (Some(*auc), Some(*ks)),
                            _ => (None, None),
                        };
                        let _ = writeln!(
                            s,
                            "{head}{},{},{},{},{},{},{},{},{},{}",
                            copula_label(family),
                            r.method,
                            e.seed,
                            e.replications,
                            e.train_size,
                            e.eval_size,
                            r.succeeded,
                            r.failed,
                            fmt_opt(a),
                            fmt_opt(k)
                        );
                    }
                    (m, false) => {
                        let t = match m {
                            Some(Metrics::Imse(t)) => Some(*t),
                            _ => None,
                        };
                        let _ = writeln!(
                            s,
                            "{head}{},{},{},{},{},{},{},{},{},{},{},{},{}",
                            csv_field(&margin_label(&e.dgp.margin_y())),
                            copula_label(family),
                            r.method,
                            e.seed,
                            e.replications,
                            e.train_size,
                            e.eval_size,
                            e.convention,
                            r.succeeded,
                            r.failed,
                            fmt_opt(t.map(|t| t.imse)),
                            fmt_opt(t.map(|t| t.ibias)),
                            fmt_opt(t.map(|t| t.ivar))
                        );
                    }
                }
            }
        }
        s
    }

    /// Layout of the reference tables: one line per design, the two
    /// methods side by side for each metric.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f4 = |v: Option<f64>, p: usize| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.p$}"));
        match self.table {
            TableId::T4 => {
                let _ = writeln!(s, "BOCR and logit (seed {})", self.seed);
                let _ = writeln!(
                    s,
                    "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8}",
                    "design", "AUC", "", "KS", "", "failed"
                );
                let _ = writeln!(
                    s,
                    "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8}",
                    "", "logit", "BOCR", "logit", "BOCR", ""
                );
                for e in &self.experiments {
                    let get = |m: usize| match e.results.get(m).and_then(|r| r.metrics.clone()) {
                        Some(Metrics::Classification { auc, ks }) => (Some(auc), Some(ks)),
                        _ => (None, None),
                    };
                    let (la, lk) = get(0);
                    let (ba, bk) = get(1);
                    let failed: usize = e.results.iter().map(|r| r.failed).sum();
                    let _ = writeln!(
                        s,
                        "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8}",
                        e.dgp.name(),
                        f4(la, 3),
                        f4(ba, 3),
                        f4(lk, 3),
                        f4(bk, 3),
                        failed
                    );
                }
            }
            _ => {
                let title = if self.table == TableId::T1 {
                    "Copula regression and OLS: known copula structure"
                } else {
                    "Copula regression and OLS: fitted with the design's family, IMSE against observed y"
                };
                let _ = writeln!(s, "{title} (seed {})", self.seed);
                let _ = writeln!(
                    s,
                    "{:<16} {:<9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}",
                    "Y margin", "copula", "IMSE", "", "IBIAS", "", "IVAR", "", "failed"
                );
                let _ = writeln!(
                    s,
                    "{:<16} {:<9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}",
                    "", "", "copula", "OLS", "copula", "OLS", "copula", "OLS", ""
                );
                for (e, (_, family)) in self.experiments.iter().zip(self.table.rows()) {
                    let get = |m: usize| match e.results.get(m).and_then(|r| r.metrics.clone()) {
                        Some(Metrics::Imse(t)) => Some(t),
                        _ => None,
                    };
                    let (c, o) = (get(0), get(1));
                    let failed: usize = e.results.iter().map(|r| r.failed).sum();
                    let _ = writeln!(
                        s,
                        "{:<16} {:<9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}",
                        margin_label(&e.dgp.margin_y()),
                        copula_label(family),
                        f4(c.map(|t| t.imse), 4),
                        f4(o.map(|t| t.imse), 4),
                        f4(c.map(|t| t.ibias), 4),
                        f4(o.map(|t| t.ibias), 4),
                        f4(c.map(|t| t.ivar), 4),
                        f4(o.map(|t| t.ivar), 4),
                        failed
                    );
                }
            }
        }
        let e = &self.experiments[0];
        let _ = writeln!(
            s,
            "replications {}, train {}, {} {}",
            e.replications,
            e.train_size,
            if self.table == TableId::T4 { "test" } else { "eval" },
            e.eval_size
        );
        s
    }
}
