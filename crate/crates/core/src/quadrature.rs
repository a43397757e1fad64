//! Gauss–Legendre rules and composite integration along polylines.

use num_complex::Complex64;

use crate::summation::CompensatedSum;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guess `cos(π(k − ¼)/(n + ½))`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for k in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: CompensatedSum = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .collect();
        half * s.value()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Line integral `∫_path Re(ω(w) dw)` of the real 1-form `Re(ω dw)` along a
/// polyline, each edge split into pieces of length at most `max_segment`.
pub fn polyline_integral<F>(
    rule: &GaussLegendre,
    path: &[Complex64],
    max_segment: f64,
    omega: F,
) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    let mut total = CompensatedSum::new();
    for edge in path.windows(2) {
        let (p, q) = (edge[0], edge[1]);
        let len = (q - p).norm();
        if len == 0.0 {
            continue;
        }
        let pieces = (len / max_segment).ceil().max(1.0) as usize;
        let step = (q - p) / pieces as f64;
        for k in 0..pieces {
            let start = p + step * k as f64;
            // parametrize w(t) = start + t·step, t ∈ [0, 1]
            let v = rule.integrate(0.0, 1.0, |t| (omega(start + step * t) * step).re);
            total.add(v);
        }
    }
    total.value()
}
