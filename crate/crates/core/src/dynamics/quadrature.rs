use std::f64::consts::PI;

/// Default number of Gauss-Legendre nodes for averaged Jacobians.
pub const DEFAULT_QUADRATURE_ORDER: usize = 32;

/// Gauss-Legendre rule mapped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

// P_n(x) and P_n'(x) by the three-term recurrence
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        if order == 1 {
            return GaussLegendre { nodes: vec![0.5], weights: vec![1.0] };
        }
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 0..order {
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(order, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(order, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes.push(0.5 * (1.0 - x));
            weights.push(0.5 * w);
        }
        GaussLegendre { nodes, weights }
    }

    /// `∫_0^1 f(r) dr`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for order in [1, 2, 5, 16, 24] {
            let g = GaussLegendre::new(order);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "order {order}: {s}");
            assert!(g.nodes.iter().all(|&r| r > 0.0 && r < 1.0));
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let g = GaussLegendre::new(16);
        for deg in 0..32 {
            let got = g.integrate(|r| r.powi(deg));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn smooth_rational() {
        let g = GaussLegendre::new(16);
        let got = g.integrate(|r| 1.0 / (1.0 + r).powi(2));
        assert!((got - 0.5).abs() < 1e-14);
    }
}
