//! Gauss–Legendre rules mapped to the unit interval.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on (0, 1).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n, starting from the
    /// Tricomi approximation of each root.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // x is the i-th largest root on (-1, 1); map to (0, 1)
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            nodes[i] = 0.5 * (1.0 - x);
            weights[n - 1 - i] = 0.5 * w;
            weights[i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Composite rule: `panels` equal sub-intervals of (0, 1), each with
    /// this rule's nodes.
    pub fn composite(&self, panels: usize) -> GaussLegendre {
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * self.len());
        let mut weights = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let a = p as f64 * h;
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                nodes.push(a + h * x);
                weights.push(h * w);
            }
        }
        GaussLegendre { nodes, weights }
    }

    /// Composite rule on panels whose breakpoints are `2^-j` and
    /// `1 - 2^-j` for `j = 1..=depth`, plus the two end panels.
    /// The panels shrink geometrically toward both endpoints, which handles
    /// integrands with endpoint singularities such as a normal quantile.
    pub fn graded(&self, depth: u32) -> GaussLegendre {
        let mut breaks = vec![0.0];
        breaks.extend((1..=depth).rev().map(|j| 0.5f64.powi(j as i32)));
        breaks.extend((2..=depth).map(|j| 1.0 - 0.5f64.powi(j as i32)));
        breaks.push(1.0);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * self.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, h) = (w[0], w[1] - w[0]);
            for (&x, &wt) in self.nodes.iter().zip(&self.weights) {
                nodes.push(a + h * x);
                weights.push(h * wt);
            }
        }
        GaussLegendre { nodes, weights }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}

pub fn gl256() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(256))
}

/// Rule for the conditional-mean integral over the response level `v`:
/// 8-node panels graded down to `2^-40` at both ends (640 nodes).
pub fn response_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8).graded(40))
}
