//! Scalar special functions shared by the copula and marginal code.

use statrs::function::{beta, erf, gamma};
use std::f64::consts::{PI, SQRT_2};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

pub fn norm_ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal quantile. Callers guarantee `p` in (0, 1).
pub fn norm_quantile(p: f64) -> f64 {
    -SQRT_2 * erf::erfc_inv(2.0 * p)
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn digamma(x: f64) -> f64 {
    gamma::digamma(x)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    beta::ln_beta(a, b)
}

/// Regularized incomplete beta function I_x(a, b).
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta::beta_reg(a, b, x)
    }
}

/// A value with its partial derivatives in `(a, b)`.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    da: f64,
    db: f64,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, da: 0.0, db: 0.0 }
    }

    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            da: self.da + o.da,
            db: self.db + o.db,
        }
    }

    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            da: self.da * o.v + self.v * o.da,
            db: self.db * o.v + self.v * o.db,
        }
    }

    fn recip(self) -> Dual {
        let r = 1.0 / self.v;
        Dual {
            v: r,
            da: -self.da * r * r,
            db: -self.db * r * r,
        }
    }

    fn div(self, o: Dual) -> Dual {
        self.mul(o.recip())
    }

    /// Lentz's guard against a vanishing denominator.
    fn guarded(self) -> Dual {
        if self.v.abs() < 1e-300 {
            Dual { v: 1e-300, ..self }
        } else {
            self
        }
    }
}

/// `I_x(a, b)` together with `∂/∂a` and `∂/∂b` for fixed `(a, b)`.
///
/// The continued fraction is evaluated once in forward-mode dual numbers,
/// which costs about as much as two plain evaluations.
#[derive(Debug, Clone, Copy)]
pub struct IncompleteBeta {
    a: f64,
    b: f64,
    ln_beta: f64,
    psi_a: f64,
    psi_b: f64,
    psi_ab: f64,
}

impl IncompleteBeta {
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            ln_beta: ln_beta(a, b),
            psi_a: digamma(a),
            psi_b: digamma(b),
            psi_ab: digamma(a + b),
        }
    }

    /// Returns `(I_x, [∂I/∂a, ∂I/∂b])`.
    pub fn eval(&self, x: f64) -> (f64, [f64; 2]) {
        if x <= 0.0 {
            return (0.0, [0.0, 0.0]);
        }
        if x >= 1.0 {
            return (1.0, [0.0, 0.0]);
        }
        let (a, b) = (self.a, self.b);
        if x < (a + 1.0) / (a + b + 2.0) {
            self.lower(a, b, x, self.psi_a, self.psi_b)
        } else {
            // I_x(a, b) = 1 - I_{1-x}(b, a), with the roles of a and b swapped
            let (v, [db, da]) = self.lower(b, a, 1.0 - x, self.psi_b, self.psi_a);
            (1.0 - v, [-da, -db])
        }
    }

    /// Continued-fraction branch; derivatives are w.r.t. its own `(a, b)`.
    fn lower(&self, a: f64, b: f64, x: f64, psi_a: f64, psi_b: f64) -> (f64, [f64; 2]) {
        const EPS: f64 = 1e-16;
        const MAX_ITER: usize = 10_000;
        let da = Dual { v: a, da: 1.0, db: 0.0 };
        let db = Dual { v: b, da: 0.0, db: 1.0 };
        let one = Dual::constant(1.0);
        let xd = Dual::constant(x);
        let qab = da.add(db);
        let qap = da.add(one);
        let mut c = one;
        let mut d = one
            .add(Dual::constant(-1.0).mul(qab).mul(xd).div(qap))
            .guarded()
            .recip();
        let mut h = d;
        for m in 1..=MAX_ITER {
            let mf = m as f64;
            let m2 = Dual::constant(2.0 * mf);
            // even step: m (b - m) x / ((a + 2m - 1)(a + 2m))
            let num = Dual::constant(mf).mul(db.add(Dual::constant(-mf))).mul(xd);
            let aa = num.div(da.add(m2).add(Dual::constant(-1.0)).mul(da.add(m2)));
            d = one.add(aa.mul(d)).guarded().recip();
            c = one.add(aa.div(c)).guarded();
            h = h.mul(d).mul(c);
            // odd step: -(a + m)(a + b + m) x / ((a + 2m)(a + 2m + 1))
            let mm = Dual::constant(mf);
            let num = Dual::constant(-1.0).mul(da.add(mm)).mul(qab.add(mm)).mul(xd);
            let aa = num.div(da.add(m2).mul(qap.add(m2)));
            d = one.add(aa.mul(d)).guarded().recip();
            c = one.add(aa.div(c)).guarded();
            let del = d.mul(c);
            h = h.mul(del);
            if (del.v - 1.0).abs() < EPS && del.da.abs() < EPS && del.db.abs() < EPS {
                break;
            }
        }
        // I = exp(a ln x + b ln(1-x) - ln B(a,b)) / a · h
        let ln_front = a * x.ln() + b * (-x).ln_1p() - self.ln_beta - a.ln();
        let value = ln_front.exp() * h.v;
        let dln_da = x.ln() - psi_a + self.psi_ab - 1.0 / a;
        let dln_db = (-x).ln_1p() - psi_b + self.psi_ab;
        (
            value,
            [
                value * (dln_da + h.da / h.v),
                value * (dln_db + h.db / h.v),
            ],
        )
    }
}

pub fn beta_ln_pdf(a: f64, b: f64, x: f64) -> f64 {
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)
}

/// Inverse of the regularized incomplete beta function, polished by
/// safeguarded Newton steps so that `beta_reg(a, b, q) = p` to ~1e-14.
pub fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut x = beta::inv_beta_reg(a, b, p).clamp(1e-300, 1.0 - 1e-16);
    if !x.is_finite() {
        x = 0.5;
    }
    let ln_b = ln_beta(a, b);
    for _ in 0..100 {
        let f = beta_reg(a, b, x) - p;
        if f.abs() <= 1e-15 {
            break;
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dens = ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp();
        let mut next = x - f / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-17 * x.max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// CDF of Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let tail = 0.5 * beta_reg(0.5 * df, 0.5, x);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

pub fn student_t_ln_pdf(t: f64, df: f64) -> f64 {
    ln_gamma(0.5 * (df + 1.0))
        - ln_gamma(0.5 * df)
        - 0.5 * (df * PI).ln()
        - 0.5 * (df + 1.0) * (t * t / df).ln_1p()
}

/// Student's t quantile via the incomplete-beta inverse, polished with
/// Newton iterations on the CDF.
pub fn student_t_quantile(p: f64, df: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let tail = if p < 0.5 { p } else { 1.0 - p };
    let x = beta::inv_beta_reg(0.5 * df, 0.5, 2.0 * tail);
    let mut t = (df * (1.0 - x) / x).sqrt();
    if p < 0.5 {
        t = -t;
    }
    if !t.is_finite() {
        t = norm_quantile(p);
    }
    for _ in 0..4 {
        let f = student_t_cdf(t, df) - p;
        let step = f / student_t_ln_pdf(t, df).exp();
        if !step.is_finite() {
            break;
        }
        t -= step;
        if step.abs() < 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            let x = norm_quantile(p);
            assert!((norm_cdf(x) - p).abs() < 1e-10 * p.max(1e-3), "p={p}");
        }
        assert_eq!(norm_quantile(0.5), 0.0);
    }

    #[test]
    fn beta_quantile_round_trip() {
        for &(a, b) in &[(0.5, 0.5), (1.0, 1.0), (2.0, 5.0), (0.3, 3.0)] {
            for &p in &[0.001, 0.2, 0.5, 0.9, 0.9999] {
                let q = beta_quantile(a, b, p);
                assert!((beta_reg(a, b, q) - p).abs() < 1e-12, "a={a} b={b} p={p}");
            }
        }
        // Arcsine law has a closed-form quantile.
        let q = beta_quantile(0.5, 0.5, 0.3);
        assert_relative_eq!(q, (PI * 0.3 / 2.0).sin().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn student_t_quantile_round_trip() {
        for &df in &[3.0, 5.0, 15.0] {
            for &p in &[1e-6, 0.05, 0.4, 0.5, 0.8, 0.999] {
                let t = student_t_quantile(p, df);
                assert!((student_t_cdf(t, df) - p).abs() < 1e-12, "df={df} p={p}");
            }
        }
    }

    #[test]
    fn sigmoid_is_symmetric() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_relative_eq!(sigmoid(3.0) + sigmoid(-3.0), 1.0, epsilon = 1e-15);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn incomplete_beta_value_and_derivatives() {
        for &(a, b) in &[(1.0, 1.0), (0.4, 2.5), (3.0, 0.7), (0.2, 0.2), (40.0, 15.0), (2000.0, 3.0)] {
            let ib = IncompleteBeta::new(a, b);
            for &x in &[1e-9, 0.01, 0.2, 0.5, 0.75, 0.97, 1.0 - 1e-9] {
                let (v, g) = ib.eval(x);
                let reference = beta::beta_reg(a, b, x);
                assert!((v - reference).abs() < 1e-13, "a={a} b={b} x={x}: {v} vs {reference}");
                let h = 1e-5;
                let fd = [
                    (beta::beta_reg(a + h, b, x) - beta::beta_reg(a - h, b, x)) / (2.0 * h),
                    (beta::beta_reg(a, b + h, x) - beta::beta_reg(a, b - h, x)) / (2.0 * h),
                ];
                for k in 0..2 {
                    // relative agreement plus the roundoff floor of the difference quotient
                    let tol = 1e-6 * fd[k].abs() + 1e-10;
                    assert!((g[k] - fd[k]).abs() < tol, "a={a} b={b} x={x} k={k}: {} vs {}", g[k], fd[k]);
                }
            }
        }
        // I_x(a, 1) = x^a, so ∂/∂a = x^a ln x
        let (v, g) = IncompleteBeta::new(2.0, 1.0).eval(0.3);
        assert_relative_eq!(v, 0.09, epsilon = 1e-15);
        assert_relative_eq!(g[0], 0.09 * 0.3f64.ln(), epsilon = 1e-14);
    }
}
