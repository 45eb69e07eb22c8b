//! Pointwise kernels.
//!
//! Points are real pairs; the Goursat-form potentials work with the complex
//! coordinate `z = x₁ + i x₂`. Velocities are `u = ∇⊥w = (∂₂w, −∂₁w)` and the
//! complex density of a vector density `μ` is `ρ = −μ₂ + iμ₁`.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{dot, FlatNodes, Point};

pub type C = Complex64;
pub type Mat2 = [[f64; 2]; 2];

const INV_4PI_I: C = C::new(0.0, -0.25 / PI);

#[inline]
pub fn cplx(p: Point) -> C {
    C::new(p[0], p[1])
}

#[inline]
pub fn rho_from_mu(mu: [f64; 2]) -> C {
    C::new(-mu[1], mu[0])
}

#[inline]
pub fn mu_from_rho(rho: C) -> [f64; 2] {
    [rho.im, -rho.re]
}

#[inline]
fn separation(x: Point, y: Point) -> Result<(Point, f64)> {
    let r = [x[0] - y[0], x[1] - y[1]];
    let r2 = r[0] * r[0] + r[1] * r[1];
    if r2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok((r, r2))
}

/// `G^B(x, y) = |x−y|² log|x−y| / 8π`.
pub fn biharm_green(x: Point, y: Point) -> Result<f64> {
    let (_, r2) = separation(x, y)?;
    Ok(r2 * 0.5 * r2.ln() / (8.0 * PI))
}

/// Gradient of `G^B` with respect to `x`.
pub fn biharm_green_gradient(x: Point, y: Point) -> Result<Point> {
    let (r, r2) = separation(x, y)?;
    let f = (r2.ln() + 1.0) / (8.0 * PI);
    Ok([f * r[0], f * r[1]])
}

pub fn stokeslet(x: Point, y: Point) -> Result<Mat2> {
    let (r, r2) = separation(x, y)?;
    let lg = -0.5 * r2.ln();
    let mut g = stokeslet_smooth(r, r2);
    g[0][0] += lg / (4.0 * PI);
    g[1][1] += lg / (4.0 * PI);
    Ok(g)
}

/// The `r r / r²` part of the Stokeslet, which is smooth along a curve.
#[inline]
pub fn stokeslet_smooth(r: Point, r2: f64) -> Mat2 {
    let c = 1.0 / (4.0 * PI * r2);
    [
        [c * r[0] * r[0], c * r[0] * r[1]],
        [c * r[0] * r[1], c * r[1] * r[1]],
    ]
}

/// Limit of [`stokeslet_smooth`] as the source approaches the target along a
/// curve with unit tangent `tau`.
#[inline]
pub fn stokeslet_smooth_diagonal(tau: Point) -> Mat2 {
    let c = 1.0 / (4.0 * PI);
    [
        [c * tau[0] * tau[0], c * tau[0] * tau[1]],
        [c * tau[0] * tau[1], c * tau[1] * tau[1]],
    ]
}

/// Stokes double layer kernel `M(x, y)` with `[Dμ](x) = ∫ M μ dS(y)`.
pub fn stresslet_dlp_kernel(x: Point, y: Point, ny: Point) -> Result<Mat2> {
    let (r, r2) = separation(x, y)?;
    Ok(dlp_kernel_raw(r, r2, ny))
}

#[inline]
pub(crate) fn dlp_kernel_raw(r: Point, r2: f64, ny: Point) -> Mat2 {
    let c = dot(r, ny) / (PI * r2 * r2);
    [
        [c * r[0] * r[0], c * r[0] * r[1]],
        [c * r[0] * r[1], c * r[1] * r[1]],
    ]
}

/// Limit of the double layer kernel at a curve point with tangent `tau` and
/// signed curvature `kappa`.
#[inline]
pub fn dlp_diagonal_limit(tau: Point, kappa: f64) -> Mat2 {
    let c = -kappa / (2.0 * PI);
    [
        [c * tau[0] * tau[0], c * tau[0] * tau[1]],
        [c * tau[0] * tau[1], c * tau[1] * tau[1]],
    ]
}

/// Values of a Goursat pair `(φ, ψ)` and `φ′` at one target.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GoursatEval {
    pub phi: C,
    pub dphi: C,
    pub psi: C,
}

impl Add for GoursatEval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GoursatEval {
            phi: self.phi + o.phi,
            dphi: self.dphi + o.dphi,
            psi: self.psi + o.psi,
        }
    }
}

impl Sub for GoursatEval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GoursatEval {
            phi: self.phi - o.phi,
            dphi: self.dphi - o.dphi,
            psi: self.psi - o.psi,
        }
    }
}

impl AddAssign for GoursatEval {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Mul<f64> for GoursatEval {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        GoursatEval {
            phi: self.phi * s,
            dphi: self.dphi * s,
            psi: self.psi * s,
        }
    }
}

/// Single layer Goursat integrands per unit arclength at source `xi`.
///
/// `φ_S` and `ψ_S` use the principal logarithm; the branch cancels in
/// [`muskhelishvili_gradient`].
#[inline]
pub fn slp_goursat_density(z: C, xi: C, rho: C) -> GoursatEval {
    let d = xi - z;
    let lg = d.ln();
    let c = 1.0 / (8.0 * PI);
    GoursatEval {
        phi: (rho - rho * lg) * c,
        dphi: rho / d * c,
        psi: -(rho.conj() * lg + xi.conj() * rho / d) * c,
    }
}

/// Double layer Goursat integrands per unit arclength; `tau` is the complex
/// unit tangent so that `dξ = τ dS`.
#[inline]
pub fn dlp_goursat_density(z: C, xi: C, tau: C, rho: C) -> GoursatEval {
    let d = xi - z;
    let rt = rho * tau;
    let m = 2.0 * (rho.conj() * tau).re;
    let d2 = d * d;
    GoursatEval {
        phi: -INV_4PI_I * rt / d,
        dphi: -INV_4PI_I * rt / d2,
        psi: INV_4PI_I * (xi.conj() * rt / d2 - m / d),
    }
}

/// `φ_S″` integrand per unit arclength.
#[inline]
pub fn slp_phi2_density(z: C, xi: C, rho: C) -> C {
    let d = xi - z;
    rho / (d * d) / (8.0 * PI)
}

/// `φ_D″` integrand per unit arclength.
#[inline]
pub fn dlp_phi2_density(z: C, xi: C, tau: C, rho: C) -> C {
    let d = xi - z;
    -INV_4PI_I * 2.0 * rho * tau / (d * d * d)
}

/// `w_S` integrand per unit arclength.
#[inline]
pub fn ws_density(z: C, xi: C, rho: C) -> f64 {
    let d = xi - z;
    let a = (d.conj() * rho).re;
    a * (0.5 * d.norm_sqr().ln() / (4.0 * PI) - 1.0 / (8.0 * PI)) + (z.conj() * rho).re / (8.0 * PI)
}

/// Part of [`ws_density`] multiplying `log|ξ − z|`.
#[inline]
pub fn ws_log_coefficient(z: C, xi: C, rho: C) -> f64 {
    ((xi - z).conj() * rho).re / (4.0 * PI)
}

/// Part of [`ws_density`] without the logarithm.
#[inline]
pub fn ws_smooth(z: C, xi: C, rho: C) -> f64 {
    -((xi - z).conj() * rho).re / (8.0 * PI) + (z.conj() * rho).re / (8.0 * PI)
}

/// Single-valued first term of `w_D` per unit arclength.
#[inline]
pub fn wd1_density(z: C, xi: C, tau: C, rho: C) -> f64 {
    let d = xi - z;
    (INV_4PI_I * d.conj() / d * rho * tau).re
}

/// Limit of [`wd1_density`] as `ξ → z` along the curve.
#[inline]
pub fn wd1_diagonal(tau: C, rho: C) -> f64 {
    (INV_4PI_I * tau.conj() * rho).re
}

/// Real line density `m` with `m dS = ρ̄ dξ + ρ dξ̄`.
#[inline]
pub fn line_density(tau: C, rho: C) -> f64 {
    2.0 * (rho.conj() * tau).re
}

/// `(∂₁w, ∂₂w)` from a Goursat pair.
#[inline]
pub fn muskhelishvili_gradient(g: &GoursatEval, z: C) -> Point {
    let v = g.phi + z * g.dphi.conj() + g.psi.conj();
    [v.re, v.im]
}

/// Rotates a gradient into the velocity `∇⊥w`.
#[inline]
pub fn perp(grad: Point) -> Point {
    [grad[1], -grad[0]]
}

/// Biharmonic charge `r² log r` about `zk`.
pub fn charge_stream(x: Point, zk: Point) -> Result<f64> {
    let (_, r2) = separation(x, zk)?;
    Ok(0.5 * r2 * r2.ln())
}

pub fn charge_gradient(x: Point, zk: Point) -> Result<Point> {
    let (r, r2) = separation(x, zk)?;
    let f = r2.ln() + 1.0;
    Ok([f * r[0], f * r[1]])
}

pub fn charge_velocity(x: Point, zk: Point) -> Result<Point> {
    Ok(perp(charge_gradient(x, zk)?))
}

/// `φ″` of the charge, so that `Δu = 4(−Im φ″, −Re φ″)`.
pub fn charge_phi2(x: Point, zk: Point) -> Result<C> {
    separation(x, zk)?;
    Ok(1.0 / (cplx(x) - cplx(zk)))
}

/// `Δu` from the accumulated `φ″`.
#[inline]
pub fn laplacian_velocity(phi2: C) -> Point {
    [-4.0 * phi2.im, -4.0 * phi2.re]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceKernels {
    pub slp: f64,
    pub dlp_adjoint: f64,
}

/// Laplace single layer kernel and the adjoint double layer kernel
/// `∂/∂n_x` of it.
pub fn laplace_kernels(x: Point, y: Point, nx: Point) -> Result<LaplaceKernels> {
    let (r, r2) = separation(x, y)?;
    Ok(LaplaceKernels {
        slp: -0.25 * r2.ln() / PI,
        dlp_adjoint: -dot(r, nx) / (2.0 * PI * r2),
    })
}

#[inline]
pub fn laplace_dlp_adjoint_diagonal(kappa: f64) -> f64 {
    -kappa / (4.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarkasKernels {
    pub k1: f64,
    pub k2: f64,
    pub k21: f64,
    pub k22: f64,
}

/// `K₁`, `K₂` and their normal derivatives in `x`, with `r = y − x`.
pub fn farkas_kernels(x: Point, y: Point, nx: Point, ny: Point) -> Result<FarkasKernels> {
    let (r, rr) = separation(y, x)?;
    let rny = dot(r, ny);
    let rnx = dot(r, nx);
    let nn = dot(nx, ny);
    Ok(FarkasKernels {
        k1: rny.powi(3) / (PI * rr * rr),
        k2: (0.5 - rny * rny / rr) / (2.0 * PI),
        k21: (-3.0 * rny * rny * nn / (rr * rr) + 4.0 * rny.powi(3) * rnx / (rr * rr * rr)) / PI,
        k22: (rny * nn / rr - rny * rny * rnx / (rr * rr)) / PI,
    })
}

/// On-curve limits of the Farkas kernels at a point of signed curvature `kappa`.
pub fn farkas_diagonal(kappa: f64) -> FarkasKernels {
    FarkasKernels {
        k1: 0.0,
        k2: 0.25 / PI,
        k21: -0.75 * kappa * kappa / PI,
        k22: 0.5 * kappa / PI,
    }
}

/// Plain-quadrature single layer Goursat functions and `w_S` at off-curve
/// targets.
pub fn goursat_slp(targets: &[Point], nodes: &FlatNodes, rho: &[C]) -> Vec<(GoursatEval, f64)> {
    targets
        .iter()
        .map(|&t| {
            let z = cplx(t);
            let mut g = GoursatEval::default();
            let mut w = 0.0;
            for j in 0..nodes.len() {
                let xi = cplx(nodes.pos[j]);
                g += slp_goursat_density(z, xi, rho[j]) * nodes.weight[j];
                w += ws_density(z, xi, rho[j]) * nodes.weight[j];
            }
            (g, w)
        })
        .collect()
}

/// Plain-quadrature double layer Goursat functions and the first term of
/// `w_D` at off-curve targets.
pub fn goursat_dlp(targets: &[Point], nodes: &FlatNodes, rho: &[C]) -> Vec<(GoursatEval, f64)> {
    targets
        .iter()
        .map(|&t| {
            let z = cplx(t);
            let mut g = GoursatEval::default();
            let mut w = 0.0;
            for j in 0..nodes.len() {
                let xi = cplx(nodes.pos[j]);
                let tau = cplx(nodes.tangent[j]);
                g += dlp_goursat_density(z, xi, tau, rho[j]) * nodes.weight[j];
                w += wd1_density(z, xi, tau, rho[j]) * nodes.weight[j];
            }
            (g, w)
        })
        .collect()
}

/// Stokes single and double layer velocities at an off-curve target.
pub fn stokes_layers(x: Point, nodes: &FlatNodes, mu: &[[f64; 2]]) -> Result<(Point, Point)> {
    let mut s = [0.0; 2];
    let mut d = [0.0; 2];
    for j in 0..nodes.len() {
        let g = stokeslet(x, nodes.pos[j])?;
        let m = stresslet_dlp_kernel(x, nodes.pos[j], nodes.normal[j])?;
        let w = nodes.weight[j];
        for a in 0..2 {
            for b in 0..2 {
                s[a] += w * g[a][b] * mu[j][b];
                d[a] += w * m[a][b] * mu[j][b];
            }
        }
    }
    Ok((s, d))
}
