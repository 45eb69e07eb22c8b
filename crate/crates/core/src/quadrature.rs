//! Panel quadrature: Gauss–Legendre rules, product-integration weights for
//! logarithmically singular integrands, and spectral differentiation.
//!
//! Everything here works on the reference interval `[-1, 1]`. Densities on a
//! panel are represented by their Legendre expansion through the panel nodes,
//! so a singular rule for a target `u0` is exact whenever the smooth factor
//! multiplying `log|u - u0|` is a polynomial of degree below the node count.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Number of Gauss–Legendre nodes per boundary panel.
pub const PANEL_ORDER: usize = 16;

/// A quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Number of nodes; the rule is exact for polynomials of degree `2 * order - 1`.
    pub order: usize,
}

impl QuadRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre rule with `n` nodes, `1 <= n <= 64`, nodes ascending.
pub fn gauss_legendre(n: usize) -> QuadRule {
    assert!((1..=64).contains(&n), "gauss_legendre: n = {n} out of range");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadRule {
        nodes,
        weights,
        order: n,
    }
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = if (1.0 - x * x).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * x.powi(n as i32 + 1)
    } else {
        n as f64 * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, d)
}

/// `P_0(x), ..., P_{n-1}(x)`.
pub fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    if n > 1 {
        out.push(x);
    }
    for k in 1..n.saturating_sub(1) {
        let next = ((2 * k + 1) as f64 * x * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
        out.push(next);
    }
    out
}

/// `P_0'(x), ..., P_{n-1}'(x)` via `P'_{k+1} = P'_{k-1} + (2k+1) P_k`.
fn legendre_derivatives(n: usize, x: f64) -> Vec<f64> {
    let p = legendre_values(n, x);
    let mut d = vec![0.0; n];
    for k in 1..n {
        let prev = if k >= 2 { d[k - 2] } else { 0.0 };
        d[k] = prev + (2 * k - 1) as f64 * p[k - 1];
    }
    d
}

/// Moments `I_k = ∫_{-1}^{1} P_k(u) log|u - u0| du` for `k < n`.
///
/// Uses `I_k = -(J_{k+1} - J_{k-1}) / (2k + 1)` with
/// `J_k = ∫ P_k(u) / (u - u0) du` (principal value when `|u0| < 1`).
/// `J_k` is generated by forward recurrence inside the interval and by
/// Miller's backward recurrence for the Legendre functions of the second
/// kind outside it, where forward recurrence is unstable.
pub fn log_moments(n: usize, u0: f64) -> Vec<f64> {
    let mut moments = vec![0.0; n];
    if n == 0 {
        return moments;
    }
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() };
    moments[0] = xlogx(1.0 - u0) + xlogx(1.0 + u0) - 2.0;
    if n == 1 {
        return moments;
    }
    let j = cauchy_moments(n + 1, u0);
    for k in 1..n {
        moments[k] = -(j[k + 1] - j[k - 1]) / (2 * k + 1) as f64;
    }
    moments
}

/// `J_k = ∫_{-1}^{1} P_k(u) / (u - u0) du` for `k < n`.
fn cauchy_moments(n: usize, u0: f64) -> Vec<f64> {
    let mut j = vec![0.0; n];
    if u0.abs() <= 1.0 {
        // Endpoint targets are nudged inside; the log-divergent parts cancel in I_k.
        let u = u0.clamp(-1.0 + 1e-15, 1.0 - 1e-15);
        j[0] = ((1.0 - u) / (1.0 + u)).abs().ln();
        if n > 1 {
            j[1] = 2.0 + u * j[0];
        }
        for k in 1..n.saturating_sub(1) {
            j[k + 1] = ((2 * k + 1) as f64 * u * j[k] - k as f64 * j[k - 1]) / (k + 1) as f64;
        }
        return j;
    }
    // Outside: J_k = -2 Q_k(u0), Q_k the minimal solution of the Legendre recurrence.
    let z = u0.abs();
    let rho = z + (z * z - 1.0).sqrt();
    let extra = (40.0 / rho.ln()).ceil() as usize + 10;
    let top = n + extra;
    let mut q = vec![0.0; top + 2];
    q[top] = 1.0;
    for k in (1..=top).rev() {
        // (k+1) Q_{k+1} - (2k+1) z Q_k + k Q_{k-1} = 0
        q[k - 1] = ((2 * k + 1) as f64 * z * q[k] - (k + 1) as f64 * q[k + 1]) / k as f64;
        if q[k - 1].abs() > 1e250 {
            for v in q.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
    let scale = q0 / q[0];
    for k in 0..n {
        // Q_k(-z) = (-1)^{k+1} Q_k(z)
        let sign = if u0 < 0.0 && k % 2 == 0 { -1.0 } else { 1.0 };
        j[k] = -2.0 * sign * q[k] * scale;
    }
    j
}

/// Product-integration rule for `∫_{-1}^{1} f(u) log|u - u0| du`, sampling
/// `f` at the nodes of `rule`.
#[derive(Debug, Clone)]
pub struct SingularRule {
    pub target: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SingularRule {
    /// Weights exact when `f` is a polynomial of degree below `rule.order`.
    pub fn new(rule: &QuadRule, u0: f64) -> Self {
        let n = rule.order;
        let moments = log_moments(n, u0);
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| {
                let p = legendre_values(n, u);
                w * (0..n)
                    .map(|k| 0.5 * (2 * k + 1) as f64 * moments[k] * p[k])
                    .sum::<f64>()
            })
            .collect();
        SingularRule {
            target: u0,
            nodes: rule.nodes.clone(),
            weights,
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Cached per-order data for the standard boundary panel.
#[derive(Debug)]
pub struct PanelBasis {
    pub rule: QuadRule,
    /// `coef[k][j]`: Legendre coefficient `k` contributed by nodal value `j`.
    coef: Vec<Vec<f64>>,
    /// `diff[i][j]`: d/du at node `i` of the interpolant of nodal value `j`.
    diff: Vec<Vec<f64>>,
    /// `self_log[i][j]`: singular weights for target node `i`.
    self_log: Vec<Vec<f64>>,
}

impl PanelBasis {
    pub fn new(order: usize) -> Self {
        let rule = gauss_legendre(order);
        let n = order;
        let coef: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&u, &w)| 0.5 * (2 * k + 1) as f64 * w * legendre_values(n, u)[k])
                    .collect()
            })
            .collect();
        let diff = rule
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let dp = legendre_derivatives(n, u);
                let mut row: Vec<f64> = (0..n)
                    .map(|j| (0..n).map(|k| dp[k] * coef[k][j]).sum())
                    .collect();
                let off: f64 = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
                row[i] = -off;
                row
            })
            .collect();
        let self_log = rule
            .nodes
            .iter()
            .map(|&u| SingularRule::new(&rule, u).weights)
            .collect();
        PanelBasis {
            rule,
            coef,
            diff,
            self_log,
        }
    }

    /// The shared 16-node basis used for every boundary panel.
    pub fn standard() -> &'static PanelBasis {
        static BASIS: OnceLock<PanelBasis> = OnceLock::new();
        BASIS.get_or_init(|| PanelBasis::new(PANEL_ORDER))
    }

    pub fn order(&self) -> usize {
        self.rule.order
    }

    /// Log weights for a target that is node `i` of the same panel.
    pub fn self_log_weights(&self, i: usize) -> &[f64] {
        &self.self_log[i]
    }

    /// Log weights for an arbitrary target parameter `u0` (inside or outside).
    pub fn log_weights(&self, u0: f64) -> Vec<f64> {
        SingularRule::new(&self.rule, u0).weights
    }

    /// Row vector mapping nodal values to the interpolant at `u`.
    pub fn interp_row(&self, u: f64) -> Vec<f64> {
        let n = self.order();
        let p = legendre_values(n, u);
        (0..n)
            .map(|j| (0..n).map(|k| p[k] * self.coef[k][j]).sum())
            .collect()
    }

    /// Differentiation matrix on the reference interval (d/du).
    pub fn diff_matrix(&self) -> &[Vec<f64>] {
        &self.diff
    }

    /// Legendre coefficients of nodal values.
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        self.coef
            .iter()
            .map(|row| row.iter().zip(values).map(|(c, v)| c * v).sum())
            .collect()
    }
}

/// Derivative with respect to arclength of nodal values on one panel.
///
/// `half_width` is half the parameter length of the panel and `speeds` are
/// `|x'(t)|` at the panel nodes.
pub fn panel_diff(values: &[f64], half_width: f64, speeds: &[f64]) -> Vec<f64> {
    let basis = PanelBasis::standard();
    assert_eq!(values.len(), basis.order());
    basis
        .diff_matrix()
        .iter()
        .zip(speeds)
        .map(|(row, &s)| {
            row.iter().zip(values).map(|(d, v)| d * v).sum::<f64>() / (half_width * s)
        })
        .collect()
}
