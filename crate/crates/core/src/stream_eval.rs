//! Stream function evaluation.
//!
//! The double layer stream function contains the multivalued term
//! `v₁ = (1/4π) ∫ m arg(ξ − z) dS`. It is recovered as the harmonic conjugate
//! of `v₂ = (1/4π) ∫ m log|ξ − z| dS` through the Neumann problem
//! `(½I + Kᴸ + W) σ = −∂v₂/∂τ`, `v₁ = Sᴸσ`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, Domain, FlatNodes, Point};
use crate::kernels::{
    charge_stream, charge_velocity, cplx, dlp_diagonal_limit, laplace_dlp_adjoint_diagonal, rho_from_mu,
    stokeslet_smooth, stokeslet_smooth_diagonal, dlp_kernel_raw, wd1_density, wd1_diagonal, ws_density,
    ws_log_coefficient, ws_smooth, C,
};
use crate::linalg::{DenseFactorization, Matrix};
use crate::quadrature::PanelBasis;

/// `L[i][j]` with `Σ_j L_ij f_j ≈ ∫_Γ log|y − x_i| f(y) dS(y)` at every node.
#[derive(Debug, Clone)]
pub struct LogMatrix {
    n: usize,
    data: Vec<f64>,
}

impl LogMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn apply_transpose(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &gi) in g.iter().enumerate() {
            if gi != 0.0 {
                for (o, &l) in out.iter_mut().zip(self.row(i)) {
                    *o += gi * l;
                }
            }
        }
        out
    }
}

/// A point on the boundary, located by component, panel and panel coordinate.
#[derive(Debug, Clone, Copy)]
pub struct CurveTarget {
    pub component: usize,
    /// Global panel index.
    pub panel: usize,
    /// Parameter in the component's traversal direction.
    pub t: f64,
    /// Coordinate on the panel's reference interval.
    pub u: f64,
    /// Set when the target is a quadrature node.
    pub node: Option<usize>,
    pub pos: Point,
    pub tangent: Point,
    pub normal: Point,
}

/// Boundary densities of a solved (or trial) representation.
#[derive(Debug, Clone)]
pub struct LayerDensity {
    pub mu: Vec<[f64; 2]>,
    pub rho: Vec<C>,
    /// Conjugate density with `v₁ = Sᴸσ`.
    pub sigma: Vec<f64>,
    /// `c₀, c₁..c_N`.
    pub charges: Vec<f64>,
}

impl LayerDensity {
    /// `∫_Γ ρ dS`.
    pub fn rho_total(&self, nodes: &FlatNodes) -> C {
        self.rho.iter().zip(&nodes.weight).map(|(r, w)| r * w).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    /// On a boundary node or checkpoint, using singular weights.
    Boundary,
    /// Plain panel quadrature.
    Direct,
    /// Adaptively refined source panels.
    Refined,
}

#[derive(Debug, Clone)]
pub struct StreamField {
    pub targets: Vec<Point>,
    pub w: Vec<f64>,
    pub inside: Vec<bool>,
    pub path: Vec<EvalPath>,
}

/// Discretized boundary with the shared log matrix and the factored
/// conjugate system.
pub struct BoundaryOperators {
    pub domain: Domain,
    pub nodes: FlatNodes,
    pub log: LogMatrix,
    conj: DenseFactorization,
    node_param: Vec<f64>,
}

impl BoundaryOperators {
    pub fn new(domain: Domain) -> Result<Self> {
        let nodes = domain.nodes().collect();
        let mut node_param = Vec::with_capacity(nodes.len());
        for c in &domain.components {
            for p in &c.panels {
                node_param.extend_from_slice(&p.node_params);
            }
        }
        let mut ops = BoundaryOperators {
            domain,
            nodes,
            log: LogMatrix { n: 0, data: Vec::new() },
            conj: DenseFactorization::new(Matrix::identity(1, 1).as_ref())?,
            node_param,
        };
        let n = ops.n_nodes();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ops.log_row(&ops.node_target(i)))
            .collect();
        ops.log = LogMatrix {
            n,
            data: rows.concat(),
        };
        let c = ops.conjugate_matrix();
        ops.conj = DenseFactorization::new(c.as_ref()).map_err(|e| e.at("conjugate system"))?;
        Ok(ops)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_target(&self, i: usize) -> CurveTarget {
        let k = self.domain.component_of(i);
        let panel = self.domain.panel_of(i);
        let local = i - self.domain.panels()[panel].first;
        CurveTarget {
            component: k,
            panel,
            t: self.node_param[i],
            u: PanelBasis::standard().rule.nodes[local],
            node: Some(i),
            pos: self.nodes.pos[i],
            tangent: self.nodes.tangent[i],
            normal: self.nodes.normal[i],
        }
    }

    /// Boundary point of component `k` at parameter `t`.
    pub fn curve_target(&self, k: usize, t: f64) -> CurveTarget {
        let comp = &self.domain.components[k];
        let t = t.rem_euclid(comp.period());
        let local = comp
            .panels
            .iter()
            .position(|p| t < p.t_hi)
            .unwrap_or(comp.panels.len() - 1);
        let panel = self.domain.panels().partition_point(|p| p.component < k) + local;
        let pn = &comp.panels[local];
        let cp = comp.point_at(t);
        CurveTarget {
            component: k,
            panel,
            t,
            u: (t - pn.mid()) / pn.half_width(),
            node: None,
            pos: cp.pos,
            tangent: cp.tangent,
            normal: cp.normal,
        }
    }

    /// Global node range of panel `p`.
    fn panel_nodes(&self, p: usize) -> std::ops::Range<usize> {
        let first = self.domain.panels()[p].first;
        first..first + PanelBasis::standard().order()
    }

    /// Quadrature row for `∫ log|y − x| f(y) dS(y)` at a boundary target.
    pub fn log_row(&self, tg: &CurveTarget) -> Vec<f64> {
        let basis = PanelBasis::standard();
        let refs = self.domain.panels();
        let own = refs[tg.panel];
        let mut row = vec![0.0; self.n_nodes()];
        for (q, pr) in refs.iter().enumerate() {
            let near = pr.component == tg.component && (q == tg.panel || q == own.prev || q == own.next);
            let range = self.panel_nodes(q);
            if !near {
                for j in range {
                    row[j] = self.nodes.weight[j] * norm(sub(self.nodes.pos[j], tg.pos)).ln();
                }
                continue;
            }
            let (comp, pan) = self.domain.panel(q);
            let h = pan.half_width();
            let (u0, own_node) = if q == tg.panel {
                (tg.u, tg.node.map(|i| i - pr.first))
            } else {
                let per = comp.period();
                let mut dt = tg.t - pan.mid();
                dt -= per * (dt / per).round();
                (dt / h, None)
            };
            let owned;
            let wts: &[f64] = match own_node {
                Some(a) => basis.self_log_weights(a),
                None => {
                    owned = basis.log_weights(u0);
                    &owned
                }
            };
            for (a, j) in range.enumerate() {
                let s = self.nodes.speed[j];
                let rem = if own_node == Some(a) {
                    (h * s).ln()
                } else {
                    let uj = basis.rule.nodes[a];
                    (norm(sub(self.nodes.pos[j], tg.pos)) / (uj - u0).abs()).ln()
                };
                row[j] = h * s * (wts[a] + basis.rule.weights[a] * rem);
            }
        }
        row
    }

    /// `½I + Kᴸ + W` at the nodes.
    pub fn conjugate_matrix(&self) -> Matrix {
        let n = self.n_nodes();
        let nd = &self.nodes;
        Matrix::from_fn(n, n, |i, j| {
            let k = if i == j {
                laplace_dlp_adjoint_diagonal(nd.curvature[i])
            } else {
                let r = sub(nd.pos[i], nd.pos[j]);
                -dot(r, nd.normal[i]) / (2.0 * PI * dot(r, r))
            };
            let mut v = (k + 1.0) * nd.weight[j];
            if i == j {
                v += 0.5;
            }
            v
        })
    }

    /// Arclength derivative of nodal values, panel by panel.
    pub fn tangential_derivative(&self, f: &[f64]) -> Vec<f64> {
        let basis = PanelBasis::standard();
        let d = basis.diff_matrix();
        let mut out = vec![0.0; f.len()];
        for p in 0..self.domain.n_panels() {
            let (_, pan) = self.domain.panel(p);
            let h = pan.half_width();
            let r = self.panel_nodes(p);
            let first = r.start;
            for a in 0..basis.order() {
                let s: f64 = (0..basis.order()).map(|b| d[a][b] * f[first + b]).sum();
                out[first + a] = s / (h * self.nodes.speed[first + a]);
            }
        }
        out
    }

    pub fn tangential_derivative_transpose(&self, g: &[f64]) -> Vec<f64> {
        let basis = PanelBasis::standard();
        let d = basis.diff_matrix();
        let mut out = vec![0.0; g.len()];
        for p in 0..self.domain.n_panels() {
            let (_, pan) = self.domain.panel(p);
            let h = pan.half_width();
            let first = self.panel_nodes(p).start;
            for a in 0..basis.order() {
                let ga = g[first + a] / (h * self.nodes.speed[first + a]);
                for b in 0..basis.order() {
                    out[first + b] += d[a][b] * ga;
                }
            }
        }
        out
    }

    /// `m/2 = μ·n` at the nodes.
    fn half_line_density(&self, mu: &[[f64; 2]]) -> Vec<f64> {
        mu.iter().zip(&self.nodes.normal).map(|(m, n)| dot(*m, *n)).collect()
    }

    /// `v₂` at the boundary nodes.
    pub fn eval_v2_nodes(&self, mu: &[[f64; 2]]) -> Vec<f64> {
        let mn = self.half_line_density(mu);
        self.log.apply(&mn).into_iter().map(|v| v / (2.0 * PI)).collect()
    }

    /// `v₂` at off-boundary targets by plain quadrature.
    pub fn eval_v2(&self, targets: &[Point], mu: &[[f64; 2]]) -> Vec<f64> {
        let mn = self.half_line_density(mu);
        targets
            .iter()
            .map(|&z| {
                (0..self.n_nodes())
                    .map(|j| mn[j] * norm(sub(self.nodes.pos[j], z)).ln() * self.nodes.weight[j])
                    .sum::<f64>()
                    / (2.0 * PI)
            })
            .collect()
    }

    /// Conjugate density σ for the vector density `μ`.
    pub fn solve_conjugate(&self, mu: &[[f64; 2]]) -> Result<Vec<f64>> {
        if mu.len() != self.n_nodes() {
            return Err(Error::Dimension {
                expected: self.n_nodes(),
                got: mu.len(),
            });
        }
        let v2 = self.eval_v2_nodes(mu);
        let rhs: Vec<f64> = self.tangential_derivative(&v2).into_iter().map(|v| -v).collect();
        self.conj.solve(&rhs)
    }

    /// Solves `(½I + Kᴸ + W)ᵀ z = y`.
    pub fn solve_conjugate_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.conj.solve_transpose(y)
    }

    /// Solves the transposed conjugate system for every column of `y`.
    pub fn solve_conjugate_transpose_in_place(&self, y: &mut Matrix) -> Result<()> {
        self.conj.solve_transpose_in_place(y)
    }

    /// `v₁ = Sᴸσ` at the nodes.
    pub fn v1_nodes(&self, sigma: &[f64]) -> Vec<f64> {
        self.log.apply(sigma).into_iter().map(|v| -v / (2.0 * PI)).collect()
    }

    /// `Sᴸσ` at off-boundary targets by plain quadrature.
    pub fn laplace_single_layer(&self, z: Point, sigma: &[f64]) -> f64 {
        -(0..self.n_nodes())
            .map(|j| sigma[j] * norm(sub(self.nodes.pos[j], z)).ln() * self.nodes.weight[j])
            .sum::<f64>()
            / (2.0 * PI)
    }

    /// Builds the full density (including σ) from `μ` and the charges.
    pub fn density(&self, mu: Vec<[f64; 2]>, charges: Vec<f64>) -> Result<LayerDensity> {
        if charges.len() != self.domain.n_holes() + 1 {
            return Err(Error::Dimension {
                expected: self.domain.n_holes() + 1,
                got: charges.len(),
            });
        }
        let sigma = self.solve_conjugate(&mu)?;
        let rho = mu.iter().map(|&m| rho_from_mu(m)).collect();
        Ok(LayerDensity {
            mu,
            rho,
            sigma,
            charges,
        })
    }

    /// Charge part `c₀ + Σ c_k r_k² log r_k` of the stream function.
    pub fn charge_part(&self, z: Point, charges: &[f64]) -> Result<f64> {
        let mut w = charges[0];
        for (k, zk) in self.domain.charge_points.iter().enumerate() {
            if charges[k + 1] != 0.0 {
                w += charges[k + 1] * charge_stream(z, *zk)?;
            }
        }
        Ok(w)
    }

    /// Stream function at a boundary target (the limit from inside `D`).
    pub fn w_at_curve(&self, tg: &CurveTarget, d: &LayerDensity) -> Result<f64> {
        let owned;
        let row: &[f64] = match tg.node {
            Some(i) => self.log.row(i),
            None => {
                owned = self.log_row(tg);
                &owned
            }
        };
        let z = cplx(tg.pos);
        let nd = &self.nodes;
        let mut w = 0.0;
        for j in 0..self.n_nodes() {
            let xi = cplx(nd.pos[j]);
            let rho = d.rho[j];
            w += ws_log_coefficient(z, xi, rho) * row[j] + ws_smooth(z, xi, rho) * nd.weight[j];
            w -= d.sigma[j] * row[j] / (2.0 * PI);
            w += if tg.node == Some(j) {
                wd1_diagonal(cplx(nd.tangent[j]), rho)
            } else {
                wd1_density(z, xi, cplx(nd.tangent[j]), rho)
            } * nd.weight[j];
        }
        w += (z.conj() * d.rho_total(nd)).re;
        Ok(w + self.charge_part(tg.pos, &d.charges)?)
    }

    pub fn w_nodes(&self, d: &LayerDensity) -> Result<Vec<f64>> {
        (0..self.n_nodes())
            .into_par_iter()
            .map(|i| self.w_at_curve(&self.node_target(i), d))
            .collect()
    }

    /// Stream function at an off-boundary point by plain quadrature.
    pub fn w_direct(&self, z: Point, d: &LayerDensity) -> Result<f64> {
        let zc = cplx(z);
        let nd = &self.nodes;
        let mut w = 0.0;
        for j in 0..self.n_nodes() {
            let xi = cplx(nd.pos[j]);
            if xi == zc {
                return Err(Error::OnBoundary { point: z, distance: 0.0 });
            }
            let rho = d.rho[j];
            let lg = norm(sub(nd.pos[j], z)).ln();
            w += (ws_density(zc, xi, rho) + wd1_density(zc, xi, cplx(nd.tangent[j]), rho)) * nd.weight[j];
            w -= d.sigma[j] * lg * nd.weight[j] / (2.0 * PI);
        }
        w += (zc.conj() * d.rho_total(nd)).re;
        Ok(w + self.charge_part(z, &d.charges)?)
    }

    /// Stream function at arbitrary targets by plain quadrature; targets
    /// outside `D` are flagged but still evaluated.
    pub fn eval_w_total(&self, d: &LayerDensity, targets: &[Point]) -> Result<StreamField> {
        let mut inside = Vec::with_capacity(targets.len());
        for &t in targets {
            inside.push(self.domain.contains(t)?);
        }
        let w = targets
            .par_iter()
            .map(|&t| self.w_direct(t, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(StreamField {
            targets: targets.to_vec(),
            w,
            inside,
            path: vec![EvalPath::Direct; targets.len()],
        })
    }

    /// Density `μ` interpolated to a boundary target.
    pub fn mu_at(&self, tg: &CurveTarget, mu: &[[f64; 2]]) -> [f64; 2] {
        if let Some(i) = tg.node {
            return mu[i];
        }
        let row = PanelBasis::standard().interp_row(tg.u);
        let first = self.domain.panels()[tg.panel].first;
        let mut m = [0.0; 2];
        for (a, r) in row.iter().enumerate() {
            m[0] += r * mu[first + a][0];
            m[1] += r * mu[first + a][1];
        }
        m
    }

    /// Representation velocity `−½μ + Sμ + D^PV μ + Wμ + Bc` at a boundary
    /// target (the limit from inside `D`).
    pub fn velocity_at_curve(&self, tg: &CurveTarget, d: &LayerDensity) -> Result<Point> {
        let owned;
        let row: &[f64] = match tg.node {
            Some(i) => self.log.row(i),
            None => {
                owned = self.log_row(tg);
                &owned
            }
        };
        let nd = &self.nodes;
        let m0 = self.mu_at(tg, &d.mu);
        let mut u = [-0.5 * m0[0], -0.5 * m0[1]];
        for j in 0..self.n_nodes() {
            let w = nd.weight[j];
            let mj = d.mu[j];
            let (g, k) = if tg.node == Some(j) {
                (
                    stokeslet_smooth_diagonal(nd.tangent[j]),
                    dlp_diagonal_limit(nd.tangent[j], nd.curvature[j]),
                )
            } else {
                let r = sub(tg.pos, nd.pos[j]);
                let r2 = dot(r, r);
                (stokeslet_smooth(r, r2), dlp_kernel_raw(r, r2, nd.normal[j]))
            };
            let lg = -row[j] / (4.0 * PI);
            for a in 0..2 {
                u[a] += lg * mj[a] + w * (mj[a] + (g[a][0] + k[a][0]) * mj[0] + (g[a][1] + k[a][1]) * mj[1]);
            }
        }
        for (k, zk) in self.domain.charge_points.iter().enumerate() {
            let v = charge_velocity(tg.pos, *zk)?;
            u[0] += d.charges[k + 1] * v[0];
            u[1] += d.charges[k + 1] * v[1];
        }
        Ok(u)
    }

    /// `(w, ∂w/∂n)` at a boundary target, from the inside.
    pub fn boundary_values(&self, tg: &CurveTarget, d: &LayerDensity) -> Result<(f64, f64)> {
        let w = self.w_at_curve(tg, d)?;
        let u = self.velocity_at_curve(tg, d)?;
        let grad = [-u[1], u[0]];
        Ok((w, dot(grad, tg.normal)))
    }
}
