//! The simulation designs.

use crate::copula::{CopulaSpec, Family};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::special::{norm_quantile, sigmoid};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DgpId {
    Ia,
    Ib,
    Ic,
    IIa,
    IIc,
    IId,
    IIIa,
    IIIb,
    IIIc,
}

pub const IA_DELTA: f64 = 1.0;
/// `(μ, σ)` of the response.
pub const IA_Y: (f64, f64) = (1.0, 1.0);
pub const IB_THETA: f64 = 0.8;
pub const IB_Y: (f64, f64) = (0.0, 1.0);
pub const IIC_DELTA: f64 = 1.0;
pub const IID_DF: f64 = 5.0;
pub const IIIA_DELTA: f64 = 1.0;
pub const IIIC_BETA: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Correlation matrix shared by Ic, IIa, IId, IIIb (response first) and by
/// the covariates of IIIc.
pub fn ic_correlation() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 0.23, 0.90, 0.67],
        vec![0.23, 1.0, 0.51, 0.26],
        vec![0.90, 0.51, 1.0, 0.49],
        vec![0.67, 0.26, 0.49, 1.0],
    ]
}

impl DgpId {
    pub const ALL: [DgpId; 9] = [
        DgpId::Ia,
        DgpId::Ib,
        DgpId::Ic,
        DgpId::IIa,
        DgpId::IIc,
        DgpId::IId,
        DgpId::IIIa,
        DgpId::IIIb,
        DgpId::IIIc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DgpId::Ia => "Ia",
            DgpId::Ib => "Ib",
            DgpId::Ic => "Ic",
            DgpId::IIa => "IIa",
            DgpId::IIc => "IIc",
            DgpId::IId => "IId",
            DgpId::IIIa => "IIIa",
            DgpId::IIIb => "IIIb",
            DgpId::IIIc => "IIIc",
        }
    }

    /// Binary response drawn as Bernoulli of a latent probability.
    pub fn is_binary(self) -> bool {
        matches!(self, DgpId::IIIa | DgpId::IIIb | DgpId::IIIc)
    }

    /// Whether [`crate::regression::oracle_m`] has a closed form.
    pub fn has_oracle(self) -> bool {
        matches!(self, DgpId::Ia | DgpId::Ib | DgpId::Ic)
    }

    /// Number of covariates.
    pub fn dim(self) -> usize {
        match self {
            DgpId::Ia | DgpId::Ib => 1,
            DgpId::IIc => 2,
            DgpId::IIIc => 4,
            _ => 3,
        }
    }

    /// Copula family of the design (the family fitted when the structure
    /// is known).
    pub fn family(self) -> Family {
        match self {
            DgpId::Ia | DgpId::IIc | DgpId::IIIa => Family::Clayton,
            DgpId::Ib => Family::Fgm,
            DgpId::IId => Family::StudentT,
            DgpId::Ic | DgpId::IIa | DgpId::IIIb | DgpId::IIIc => Family::Gaussian,
        }
    }

    /// True copula over `(response or latent, covariates)`; `None` for
    /// IIIc, whose latent is a deterministic function of the covariates.
    pub fn copula(self) -> Option<CopulaSpec> {
        let spec = match self {
            DgpId::Ia => CopulaSpec::clayton(2, IA_DELTA),
            DgpId::Ib => CopulaSpec::fgm(IB_THETA),
            DgpId::Ic | DgpId::IIa | DgpId::IIIb => CopulaSpec::gaussian(&ic_correlation()),
            DgpId::IIc => CopulaSpec::clayton(3, IIC_DELTA),
            DgpId::IId => CopulaSpec::student_t(&ic_correlation(), IID_DF),
            DgpId::IIIa => CopulaSpec::clayton(4, IIIA_DELTA),
            DgpId::IIIc => return None,
        };
        Some(spec.expect("design parameters are valid"))
    }

    /// Law of the response (or of the latent probability).
    pub fn margin_y(self) -> MarginalModel {
        match self {
            DgpId::Ia => MarginalModel::Normal {
                mean: IA_Y.0,
                sd: IA_Y.1,
            },
            DgpId::Ib => MarginalModel::Normal {
                mean: IB_Y.0,
                sd: IB_Y.1,
            },
            DgpId::IIc | DgpId::IId => MarginalModel::Beta {
                alpha: 0.5,
                beta: 0.5,
            },
            _ => MarginalModel::Uniform01,
        }
    }

    pub fn margins_x(self) -> Vec<MarginalModel> {
        let m = match self {
            DgpId::Ib => MarginalModel::Gumbel,
            _ => MarginalModel::Normal { mean: 0.0, sd: 1.0 },
        };
        vec![m; self.dim()]
    }
}

impl fmt::Display for DgpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DgpId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '.' && *c != '_').collect();
        DgpId::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(&key))
            .ok_or_else(|| Error::Parse(format!("unknown DGP `{s}`")))
    }
}

/// Draws `n` observations. For binary designs the latent probability is
/// kept in [`Dataset::z_true`].
pub fn generate<R: Rng + ?Sized>(dgp: DgpId, n: usize, rng: &mut R) -> Dataset {
    let d = dgp.dim();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    match dgp.copula() {
        Some(copula) => {
            let my = dgp.margin_y();
            let mx = dgp.margins_x();
            for _ in 0..n {
                let u = copula.sample_one(rng);
                let row: Vec<f64> = mx
                    .iter()
                    .zip(&u[1..])
                    .map(|(m, &ui)| m.quantile(ui).expect("sampled levels are interior"))
                    .collect();
                let resp = my.quantile(u[0]).expect("sampled levels are interior");
                x.push(row);
                if dgp.is_binary() {
                    z.push(resp);
                    y.push(bernoulli(resp, rng));
                } else {
                    y.push(resp);
                }
            }
        }
        None => {
            let normals = CopulaSpec::gaussian(&ic_correlation()).expect("valid correlation");
            for _ in 0..n {
                let row: Vec<f64> = normals.sample_one(rng).into_iter().map(norm_quantile).collect();
                let eta: f64 = row.iter().zip(IIIC_BETA).map(|(a, b)| a * b).sum();
                let p = sigmoid(eta);
                x.push(row);
                z.push(p);
                y.push(bernoulli(p, rng));
            }
        }
    }
    debug_assert!(x.iter().all(|r| r.len() == d));
    let data = Dataset::new(x, y).expect("generated data is rectangular and finite");
    if dgp.is_binary() {
        data.with_latent(z).expect("latent column matches")
    } else {
        data
    }
}

fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let w: f64 = rng.random();
    if w < p {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip() {
        for d in DgpId::ALL {
            assert_eq!(d.name().parse::<DgpId>().unwrap(), d);
        }
        assert_eq!("III.c".parse::<DgpId>().unwrap(), DgpId::IIIc);
        assert_eq!("iia".parse::<DgpId>().unwrap(), DgpId::IIa);
        assert!("IV".parse::<DgpId>().is_err());
    }

    #[test]
    fn iiic_latent_at_origin_is_half() {
        let eta: f64 = [0.0; 4].iter().zip(IIIC_BETA).map(|(a, b)| a * b).sum();
        assert_eq!(sigmoid(eta), 0.5);
    }

    #[test]
    fn shapes_and_latent_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in DgpId::ALL {
            let data = generate(d, 50, &mut rng);
            assert_eq!(data.len(), 50);
            assert_eq!(data.dim(), d.dim());
            assert_eq!(data.is_binary(), d.is_binary() || data.is_binary());
            assert_eq!(data.z_true().is_some(), d.is_binary());
            if d.is_binary() {
                assert!(data.is_binary());
            }
        }
    }

    #[test]
    fn same_seed_same_data() {
        for d in DgpId::ALL {
            let a = generate(d, 100, &mut ChaCha8Rng::seed_from_u64(9));
            let b = generate(d, 100, &mut ChaCha8Rng::seed_from_u64(9));
            assert_eq!(a, b);
        }
    }
}
