//! Dense block systems for the clamped plate problem.
//!
//! Unknowns are ordered `[μ₁(x₁), μ₂(x₁), μ₁(x₂), …, c₀, c₁, …, c_N]`. The
//! first `2n_d` rows enforce the boundary velocity, the last `N + 1` rows
//! enforce `∫_{Γ_k} w dS = ∫_{Γ_k} f dS`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dot, sub, Point};
use crate::kernels::{
    charge_stream, charge_velocity, cplx, dlp_diagonal_limit, dlp_kernel_raw, farkas_diagonal, farkas_kernels,
    stokeslet_smooth, stokeslet_smooth_diagonal, wd1_density, wd1_diagonal, ws_log_coefficient, ws_smooth, C,
};
use crate::linalg::{DenseFactorization, Matrix};
use crate::stream_eval::{BoundaryOperators, LayerDensity};

/// `ρ` of the unit densities `μ = e₁` and `μ = e₂`.
const UNIT_RHO: [C; 2] = [C::new(0.0, 1.0), C::new(-1.0, 0.0)];

/// Boundary data `w = f`, `∂w/∂n = g` sampled at the nodes.
#[derive(Debug, Clone)]
pub struct DirichletData {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub f_tau: Vec<f64>,
    /// `b_k = ∫_{Γ_k} f dS`.
    pub b: Vec<f64>,
    /// Velocity data `∇⊥w` on the boundary.
    pub h: Vec<[f64; 2]>,
}

impl DirichletData {
    /// Data of a known function `w` with gradient `grad`.
    pub fn from_function(ops: &BoundaryOperators, w: impl Fn(Point) -> f64, grad: impl Fn(Point) -> Point) -> Self {
        let nd = &ops.nodes;
        let f: Vec<f64> = nd.pos.iter().map(|&p| w(p)).collect();
        let grads: Vec<Point> = nd.pos.iter().map(|&p| grad(p)).collect();
        let g = grads.iter().zip(&nd.normal).map(|(a, n)| dot(*a, *n)).collect();
        let f_tau = grads.iter().zip(&nd.tangent).map(|(a, t)| dot(*a, *t)).collect();
        Self::assemble(ops, f, g, f_tau)
    }

    /// Data from node samples of `f` and `g`; `∂f/∂τ` by spectral
    /// differentiation on each panel.
    pub fn from_samples(ops: &BoundaryOperators, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        let n = ops.n_nodes();
        for v in [&f, &g] {
            if v.len() != n {
                return Err(Error::Dimension { expected: n, got: v.len() });
            }
        }
        let f_tau = ops.tangential_derivative(&f);
        Ok(Self::assemble(ops, f, g, f_tau))
    }

    fn assemble(ops: &BoundaryOperators, f: Vec<f64>, g: Vec<f64>, f_tau: Vec<f64>) -> Self {
        let nd = &ops.nodes;
        let b = (0..ops.domain.components.len())
            .map(|k| ops.domain.node_range(k).map(|i| nd.weight[i] * f[i]).sum())
            .collect();
        let h = (0..nd.len())
            .map(|i| {
                let (t, n) = (nd.tangent[i], nd.normal[i]);
                let grad = [f_tau[i] * t[0] + g[i] * n[0], f_tau[i] * t[1] + g[i] * n[1]];
                [grad[1], -grad[0]]
            })
            .collect();
        DirichletData { f, g, f_tau, b, h }
    }
}

/// Block matrix with optional diagonal similarity scaling
/// `Ã = R A C`, `x = C x̃`, `b̃ = R b`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub matrix: Matrix,
    pub row_scale: Vec<f64>,
    pub col_scale: Vec<f64>,
    pub n_nodes: usize,
    pub n_holes: usize,
}

impl BlockSystem {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Scaled right-hand side `[h; b]`.
    pub fn rhs(&self, data: &DirichletData) -> Result<Vec<f64>> {
        if data.h.len() != self.n_nodes || data.b.len() != self.n_holes + 1 {
            return Err(Error::Dimension {
                expected: self.n_nodes,
                got: data.h.len(),
            });
        }
        let mut r: Vec<f64> = data.h.iter().flat_map(|h| *h).collect();
        r.extend_from_slice(&data.b);
        Ok(r.iter().zip(&self.row_scale).map(|(a, s)| a * s).collect())
    }

    pub fn factor(&self) -> Result<BlockSolver> {
        Ok(BlockSolver {
            lu: DenseFactorization::new(self.matrix.as_ref()).map_err(|e| e.at("block factorization"))?,
            system: BlockSystem {
                matrix: Matrix::new(),
                row_scale: self.row_scale.clone(),
                col_scale: self.col_scale.clone(),
                n_nodes: self.n_nodes,
                n_holes: self.n_holes,
            },
        })
    }

    pub fn solve(&self, ops: &BoundaryOperators, data: &DirichletData) -> Result<LayerDensity> {
        self.factor()?.solve(ops, data)
    }
}

/// A factored [`BlockSystem`], reusable for several right-hand sides.
pub struct BlockSolver {
    lu: DenseFactorization,
    system: BlockSystem,
}

impl BlockSolver {
    pub fn solve(&self, ops: &BoundaryOperators, data: &DirichletData) -> Result<LayerDensity> {
        let b = self.system.rhs(data)?;
        let x = self.lu.solve(&b)?;
        let x: Vec<f64> = x.iter().zip(&self.system.col_scale).map(|(a, s)| a * s).collect();
        let n = self.system.n_nodes;
        let mu = (0..n).map(|j| [x[2 * j], x[2 * j + 1]]).collect();
        ops.density(mu, x[2 * n..].to_vec())
    }
}

/// `−½I + S + D + W + N` at the nodes, `2n_d × 2n_d`, written into the
/// top-left block of `m`. `Nμ(x) = n(x) ∫_Γ μ·n dS` removes the flux null
/// vector of the velocity operator; it vanishes on solutions for
/// compatible data.
fn fill_velocity_block(ops: &BoundaryOperators, m: &mut Matrix) {
    let n = ops.n_nodes();
    let nd = &ops.nodes;
    let top = m.as_mut().subrows_mut(0, 2 * n);
    top.par_row_chunks_mut(2).enumerate().for_each(|(i, mut rows)| {
        let lrow = ops.log.row(i);
        let ni = nd.normal[i];
        for j in 0..n {
            let w = nd.weight[j];
            let (g, k) = if i == j {
                (
                    stokeslet_smooth_diagonal(nd.tangent[j]),
                    dlp_diagonal_limit(nd.tangent[j], nd.curvature[j]),
                )
            } else {
                let r = sub(nd.pos[i], nd.pos[j]);
                let r2 = dot(r, r);
                (stokeslet_smooth(r, r2), dlp_kernel_raw(r, r2, nd.normal[j]))
            };
            let lg = -lrow[j] / (4.0 * PI);
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = w * (g[a][b] + k[a][b] + ni[a] * nd.normal[j][b]);
                    if a == b {
                        v += lg + w;
                        if i == j {
                            v -= 0.5;
                        }
                    }
                    rows[(a, 2 * j + b)] = v;
                }
            }
        }
    });
}

/// Charge columns `B` (velocity rows) and the charge block `F` (constraint
/// rows).
fn fill_charge_columns(ops: &BoundaryOperators, m: &mut Matrix) -> Result<()> {
    let n = ops.n_nodes();
    let nd = &ops.nodes;
    let zs = &ops.domain.charge_points;
    for (l, &zl) in zs.iter().enumerate() {
        let col = 2 * n + 1 + l;
        for i in 0..n {
            let v = charge_velocity(nd.pos[i], zl).map_err(|_| Error::OnBoundary { point: zl, distance: 0.0 })?;
            m[(2 * i, col)] = v[0];
            m[(2 * i + 1, col)] = v[1];
        }
    }
    for k in 0..ops.domain.components.len() {
        let row = 2 * n + k;
        let range = ops.domain.node_range(k);
        m[(row, 2 * n)] = range.clone().map(|i| nd.weight[i]).sum();
        for (l, &zl) in zs.iter().enumerate() {
            let mut s = 0.0;
            for i in range.clone() {
                s += nd.weight[i] * charge_stream(nd.pos[i], zl)?;
            }
            m[(row, 2 * n + 1 + l)] = s;
        }
    }
    Ok(())
}

/// Rows `D_k` mapping nodal `μ` to `∫_{Γ_k} w dS` (charges excluded), as an
/// `(N+1) × 2n_d` row-major array.
pub fn constraint_rows(ops: &BoundaryOperators) -> Result<Vec<Vec<f64>>> {
    let n = ops.n_nodes();
    let nc = ops.domain.components.len();
    let nd = &ops.nodes;
    // Direct terms: w_S, the single-valued part of w_D and the completion.
    let direct = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0; nc * 2 * n],
            |mut acc, i| {
                let k = ops.domain.component_of(i);
                let wi = nd.weight[i];
                let z = cplx(nd.pos[i]);
                let lrow = ops.log.row(i);
                let row = &mut acc[k * 2 * n..(k + 1) * 2 * n];
                for j in 0..n {
                    let xi = cplx(nd.pos[j]);
                    let tau = cplx(nd.tangent[j]);
                    let wj = nd.weight[j];
                    for (c, &rho) in UNIT_RHO.iter().enumerate() {
                        let wd = if i == j { wd1_diagonal(tau, rho) } else { wd1_density(z, xi, tau, rho) };
                        let v = ws_log_coefficient(z, xi, rho) * lrow[j]
                            + (ws_smooth(z, xi, rho) + wd + (z.conj() * rho).re) * wj;
                        row[2 * j + c] += wi * v;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0.0; nc * 2 * n],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    // Conjugate terms: ∫_{Γ_k} v₁ dS through the transposed Neumann solve.
    let mut y = Matrix::zeros(n, nc);
    for k in 0..nc {
        for i in ops.domain.node_range(k) {
            let s = -nd.weight[i] / (2.0 * PI);
            for (j, l) in ops.log.row(i).iter().enumerate() {
                y[(j, k)] += s * l;
            }
        }
    }
    let mut z = y;
    ops.solve_conjugate_transpose_in_place(&mut z)?;
    let mut rows = Vec::with_capacity(nc);
    for k in 0..nc {
        let zk: Vec<f64> = (0..n).map(|j| z[(j, k)]).collect();
        let g = ops.tangential_derivative_transpose(&zk);
        let h = ops.log.apply_transpose(&g);
        let mut row = direct[k * 2 * n..(k + 1) * 2 * n].to_vec();
        for j in 0..n {
            let nj = nd.normal[j];
            for c in 0..2 {
                row[2 * j + c] -= nj[c] * h[j] / (2.0 * PI);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Unscaled block system.
pub fn assemble_block_system(ops: &BoundaryOperators) -> Result<BlockSystem> {
    let n = ops.n_nodes();
    let nh = ops.domain.n_holes();
    let size = 2 * n + nh + 1;
    let mut m = Matrix::zeros(size, size);
    fill_velocity_block(ops, &mut m);
    fill_charge_columns(ops, &mut m)?;
    let d = constraint_rows(ops)?;
    for (k, row) in d.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(2 * n + k, j)] = *v;
        }
    }
    Ok(BlockSystem {
        matrix: m,
        row_scale: vec![1.0; size],
        col_scale: vec![1.0; size],
        n_nodes: n,
        n_holes: nh,
    })
}

/// Applies `√w` scaling to the density rows and columns and divides
/// constraint row `k` by `√|Γ_k|`.
pub fn scale_system(ops: &BoundaryOperators, sys: BlockSystem) -> BlockSystem {
    let n = sys.n_nodes;
    let size = sys.size();
    let mut r = vec![1.0; size];
    let mut c = vec![1.0; size];
    for j in 0..n {
        let s = ops.nodes.weight[j].sqrt();
        for a in 0..2 {
            r[2 * j + a] = s;
            c[2 * j + a] = 1.0 / s;
        }
    }
    for k in 0..=sys.n_holes {
        r[2 * n + k] = 1.0 / ops.domain.components[k].arclength().sqrt();
    }
    let mut m = sys.matrix;
    for j in 0..size {
        for i in 0..size {
            m[(i, j)] *= r[i] * c[j];
        }
    }
    BlockSystem {
        matrix: m,
        row_scale: sys.row_scale.iter().zip(&r).map(|(a, b)| a * b).collect(),
        col_scale: sys.col_scale.iter().zip(&c).map(|(a, b)| a * b).collect(),
        n_nodes: n,
        n_holes: sys.n_holes,
    }
}

/// The reference representation: `w = ∫ K₁σ₁ + K₂σ₂ dS` with the boundary
/// equations `[f; g] = ∫ Kσ dS + [[½, 0], [−κ, ½]] σ`.
#[derive(Debug, Clone)]
pub struct FarkasSystem {
    pub matrix: Matrix,
    /// `√w` at each node when scaled, else ones.
    pub scale: Vec<f64>,
}

pub fn assemble_farkas(ops: &BoundaryOperators, scaled: bool) -> Result<FarkasSystem> {
    if ops.domain.n_holes() > 0 {
        return Err(Error::Unsupported("reference representation on a multiply connected domain".into()));
    }
    let n = ops.n_nodes();
    let nd = &ops.nodes;
    let scale: Vec<f64> = if scaled {
        nd.weight.iter().map(|w| w.sqrt()).collect()
    } else {
        vec![1.0; n]
    };
    let mut m = Matrix::zeros(2 * n, 2 * n);
    let res: Result<()> = m.par_row_chunks_mut(2).enumerate().try_for_each(|(i, mut rows)| {
        for j in 0..n {
            let k = if i == j {
                farkas_diagonal(nd.curvature[i])
            } else {
                farkas_kernels(nd.pos[i], nd.pos[j], nd.normal[i], nd.normal[j])?
            };
            let w = nd.weight[j] * scale[i] / scale[j];
            rows[(0, 2 * j)] = w * k.k1;
            rows[(0, 2 * j + 1)] = w * k.k2;
            rows[(1, 2 * j)] = w * k.k21;
            rows[(1, 2 * j + 1)] = w * k.k22;
        }
        rows[(0, 2 * i)] += 0.5;
        rows[(1, 2 * i)] -= nd.curvature[i];
        rows[(1, 2 * i + 1)] += 0.5;
        Ok(())
    });
    res?;
    Ok(FarkasSystem { matrix: m, scale })
}

impl FarkasSystem {
    /// Solves for `(σ₁, σ₂)` at the nodes.
    pub fn solve(&self, f: &[f64], g: &[f64]) -> Result<Vec<[f64; 2]>> {
        let n = self.scale.len();
        let mut b = Vec::with_capacity(2 * n);
        for i in 0..n {
            b.push(f[i] * self.scale[i]);
            b.push(g[i] * self.scale[i]);
        }
        let x = DenseFactorization::new(self.matrix.as_ref())?.solve(&b)?;
        Ok((0..n).map(|j| [x[2 * j] / self.scale[j], x[2 * j + 1] / self.scale[j]]).collect())
    }
}

/// `w(z) = ∫ K₁σ₁ + K₂σ₂ dS` for the reference representation.
pub fn farkas_eval(ops: &BoundaryOperators, sigma: &[[f64; 2]], z: Point) -> Result<f64> {
    let nd = &ops.nodes;
    let mut w = 0.0;
    for j in 0..nd.len() {
        let k = farkas_kernels(z, nd.pos[j], nd.normal[j], nd.normal[j])?;
        w += nd.weight[j] * (k.k1 * sigma[j][0] + k.k2 * sigma[j][1]);
    }
    Ok(w)
}
