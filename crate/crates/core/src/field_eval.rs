//! Evaluation of the solved stream function, its gradient and `Δu` away from
//! the boundary, with adaptive refinement of source panels near targets.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, winding_number, Domain, Point};
use crate::kernels::{
    charge_gradient, charge_phi2, cplx, dlp_goursat_density, dlp_phi2_density, laplacian_velocity,
    muskhelishvili_gradient, slp_goursat_density, slp_phi2_density, wd1_density, ws_density, C,
};
use crate::quadrature::PanelBasis;
use crate::stream_eval::{BoundaryOperators, EvalPath, LayerDensity};

/// Panels closer than this many panel lengths to a target are refined.
pub const NEAR_FACTOR: f64 = 2.5;
/// Relative agreement required between successive refinement levels.
pub const REFINE_TOL: f64 = 1e-13;
const MAX_DEPTH: u32 = 40;

/// One source point of the boundary: position, unit tangent, arclength
/// weight and the interpolated densities there.
#[derive(Debug, Clone, Copy)]
struct Source {
    xi: C,
    tau: C,
    ds: f64,
    rho: C,
    sigma: f64,
}

/// Field samples on a grid or at a list of targets.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub targets: Vec<Point>,
    /// `(nx, ny)` for grids, row-major in `x`.
    pub shape: Option<(usize, usize)>,
    pub inside: Vec<bool>,
    /// `Some` exactly where the target is inside.
    pub w: Vec<Option<f64>>,
    pub path: Vec<Option<EvalPath>>,
    pub w_ref: Option<Vec<Option<f64>>>,
    pub abs_err: Option<Vec<Option<f64>>>,
}

impl FieldGrid {
    /// Cell-centred `nx × ny` grid over `[x0, x1] × [y0, y1]`; points on the
    /// boundary count as outside.
    pub fn from_bbox(domain: &Domain, bbox: [f64; 4], nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!("grid must be nonempty, got {nx}x{ny}")));
        }
        let [x0, x1, y0, y1] = bbox;
        let mut targets = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                targets.push([
                    x0 + (x1 - x0) * (i as f64 + 0.5) / nx as f64,
                    y0 + (y1 - y0) * (j as f64 + 0.5) / ny as f64,
                ]);
            }
        }
        let polys = Polygons::new(domain);
        let inside = targets
            .par_iter()
            .map(|&p| match polys.contains(domain, p) {
                Ok(b) => Ok(b),
                Err(Error::OnBoundary { .. }) => Ok(false),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_mask(targets, inside, Some((nx, ny))))
    }

    /// Explicit targets; a target on the boundary is an error.
    pub fn from_targets(domain: &Domain, targets: Vec<Point>) -> Result<Self> {
        let polys = Polygons::new(domain);
        let inside = targets
            .par_iter()
            .map(|&p| polys.contains(domain, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_mask(targets, inside, None))
    }

    fn with_mask(targets: Vec<Point>, inside: Vec<bool>, shape: Option<(usize, usize)>) -> Self {
        let n = targets.len();
        FieldGrid {
            targets,
            shape,
            inside,
            w: vec![None; n],
            path: vec![None; n],
            w_ref: None,
            abs_err: None,
        }
    }

    /// Attaches reference values at the inside targets and the pointwise errors.
    pub fn set_reference(&mut self, reference: impl Fn(Point) -> f64) {
        let r: Vec<Option<f64>> = self
            .targets
            .iter()
            .zip(&self.inside)
            .map(|(&p, &ins)| ins.then(|| reference(p)))
            .collect();
        self.abs_err = Some(
            self.w
                .iter()
                .zip(&r)
                .map(|(w, r)| match (w, r) {
                    (Some(a), Some(b)) => Some((a - b).abs()),
                    _ => None,
                })
                .collect(),
        );
        self.w_ref = Some(r);
    }

    pub fn max_abs_err(&self) -> Option<f64> {
        self.abs_err
            .as_ref()
            .map(|e| e.iter().flatten().fold(0.0f64, |a, &b| a.max(b)))
    }
}

/// Inscribed polygons of every component, shared by all points of a grid.
/// Points close to a chord fall back to the exact winding number.
struct Polygons {
    verts: Vec<Vec<Point>>,
}

impl Polygons {
    fn new(domain: &Domain) -> Self {
        let verts = domain
            .components
            .iter()
            .map(|c| c.sample(32 * c.panels.len().max(4)).into_iter().map(|(_, p)| p).collect())
            .collect();
        Polygons { verts }
    }

    fn winding(&self, domain: &Domain, k: usize, p: Point) -> Result<i32> {
        let v = &self.verts[k];
        let mut total = 0.0;
        for i in 0..v.len() {
            let a = sub(v[i], p);
            let b = sub(v[(i + 1) % v.len()], p);
            let ab = sub(b, a);
            let len2 = dot(ab, ab);
            let s = (-dot(a, ab) / len2.max(1e-300)).clamp(0.0, 1.0);
            let closest = [a[0] + s * ab[0], a[1] + s * ab[1]];
            if dot(closest, closest) < len2 {
                return winding_number(p, &domain.components[k]);
            }
            total += (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
        }
        Ok((total / (2.0 * PI)).round() as i32)
    }

    fn contains(&self, domain: &Domain, p: Point) -> Result<bool> {
        if self.winding(domain, 0, p)? != 1 {
            return Ok(false);
        }
        for k in 1..domain.components.len() {
            if self.winding(domain, k, p)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A solved representation bound to its boundary operators.
pub struct FieldEvaluator<'a> {
    pub ops: &'a BoundaryOperators,
    pub density: &'a LayerDensity,
    panel_len: Vec<f64>,
    rho_total: C,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(ops: &'a BoundaryOperators, density: &'a LayerDensity) -> Self {
        let panel_len = (0..ops.domain.n_panels())
            .map(|p| ops.domain.panel(p).1.arclength())
            .collect();
        FieldEvaluator {
            ops,
            density,
            panel_len,
            rho_total: density.rho_total(&ops.nodes),
        }
    }

    fn node_source(&self, j: usize) -> Source {
        let nd = &self.ops.nodes;
        Source {
            xi: cplx(nd.pos[j]),
            tau: cplx(nd.tangent[j]),
            ds: nd.weight[j],
            rho: self.density.rho[j],
            sigma: self.density.sigma[j],
        }
    }

    /// Panels that need refinement for target `z` with their depth limits, or
    /// an error if `z` is on the boundary. Below the limit a subinterval is
    /// far shorter than its distance to `z` and the Gauss rule is exact to
    /// rounding, so further splitting only chases noise.
    fn near_panels(&self, z: Point) -> Result<Vec<(usize, u32)>> {
        let order = PanelBasis::standard().order();
        let nd = &self.ops.nodes;
        let mut near = Vec::new();
        for (p, r) in self.ops.domain.panels().iter().enumerate() {
            let d = (r.first..r.first + order)
                .map(|j| norm(sub(nd.pos[j], z)))
                .fold(f64::INFINITY, f64::min);
            let mut dist = 0.5 * d;
            if d < 0.1 * self.panel_len[p] {
                dist = self.panel_distance(p, z);
                if dist <= 1e-12 * self.ops.domain.outer().arclength() {
                    return Err(Error::OnBoundary { point: z, distance: dist });
                }
            }
            if d < NEAR_FACTOR * self.panel_len[p] {
                let depth = (self.panel_len[p] / dist).log2().ceil().max(0.0) as u32 + 6;
                near.push((p, depth.min(MAX_DEPTH)));
            }
        }
        Ok(near)
    }

    /// Distance from `z` to the curve piece of panel `p`, by golden-section
    /// search on the parameter.
    fn panel_distance(&self, p: usize, z: Point) -> f64 {
        let (comp, pan) = self.ops.domain.panel(p);
        let f = |t: f64| norm(sub(comp.point_at(t).pos, z));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (pan.t_lo, pan.t_hi);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..60 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2);
            }
        }
        f(0.5 * (lo + hi)).min(f(pan.t_lo)).min(f(pan.t_hi))
    }

    /// Boundary integral of `f` against all panels, refining those in `near`.
    fn layer_integral<const M: usize>(
        &self,
        z: Point,
        near: &[(usize, u32)],
        f: &(impl Fn(&Source) -> [f64; M] + Sync),
    ) -> [f64; M] {
        let order = PanelBasis::standard().order();
        let mut acc = [0.0; M];
        let mut ni = 0;
        for (p, r) in self.ops.domain.panels().iter().enumerate() {
            let v = if ni < near.len() && near[ni].0 == p {
                ni += 1;
                self.refined_panel(p, z, near[ni - 1].1, f)
            } else {
                let mut v = [0.0; M];
                for j in r.first..r.first + order {
                    let s = self.node_source(j);
                    let fj = f(&s);
                    for m in 0..M {
                        v[m] += fj[m] * s.ds;
                    }
                }
                v
            };
            for m in 0..M {
                acc[m] += v[m];
            }
        }
        acc
    }

    fn refined_panel<const M: usize>(&self, p: usize, z: Point, max_depth: u32, f: &impl Fn(&Source) -> [f64; M]) -> [f64; M] {
        let first = self.ops.domain.panels()[p].first;
        let order = PanelBasis::standard().order();
        let mut mag = 0.0;
        for j in first..first + order {
            let s = self.node_source(j);
            mag += f(&s).iter().fold(0.0f64, |a, b| a.max(b.abs())) * s.ds;
        }
        let (_, pan) = self.ops.domain.panel(p);
        let whole = self.sample_interval(p, pan.t_lo, pan.t_hi, f);
        self.refine(p, z, (pan.t_lo, pan.t_hi), whole, f, REFINE_TOL * mag, max_depth)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<const M: usize>(
        &self,
        p: usize,
        z: Point,
        (a, b): (f64, f64),
        whole: [f64; M],
        f: &impl Fn(&Source) -> [f64; M],
        tol: f64,
        levels: u32,
    ) -> [f64; M] {
        let m = 0.5 * (a + b);
        if self.resolved(p, z, a, m, b) {
            return whole;
        }
        let l = self.sample_interval(p, a, m, f);
        let r = self.sample_interval(p, m, b, f);
        let mut err = 0.0f64;
        let mut sum = [0.0; M];
        for k in 0..M {
            sum[k] = l[k] + r[k];
            err = err.max((sum[k] - whole[k]).abs());
        }
        if err <= tol || levels == 0 {
            return sum;
        }
        let l = self.refine(p, z, (a, m), l, f, 0.5 * tol, levels - 1);
        let r = self.refine(p, z, (m, b), r, f, 0.5 * tol, levels - 1);
        let mut out = [0.0; M];
        for k in 0..M {
            out[k] = l[k] + r[k];
        }
        out
    }

    /// True when the curve piece over `[a, b]` is no longer than its distance
    /// to `z`, where the Gauss rule is already exact to rounding.
    fn resolved(&self, p: usize, z: Point, a: f64, m: f64, b: f64) -> bool {
        let comp = self.ops.domain.panel(p).0;
        let (xa, xm, xb) = (comp.point_at(a).pos, comp.point_at(m).pos, comp.point_at(b).pos);
        let len = norm(sub(xa, xm)) + norm(sub(xm, xb));
        let d = norm(sub(xa, z)).min(norm(sub(xm, z))).min(norm(sub(xb, z))) - 0.5 * len;
        d >= len
    }

    /// Gauss rule on the parameter interval `[a, b]` of panel `p`, with the
    /// densities interpolated from the panel's nodes.
    fn sample_interval<const M: usize>(&self, p: usize, a: f64, b: f64, f: &impl Fn(&Source) -> [f64; M]) -> [f64; M] {
        let basis = PanelBasis::standard();
        let (comp, pan) = self.ops.domain.panel(p);
        let first = self.ops.domain.panels()[p].first;
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut out = [0.0; M];
        for (&u, &gw) in basis.rule.nodes.iter().zip(&basis.rule.weights) {
            let t = mid + half * u;
            let cp = comp.point_at(t);
            let row = basis.interp_row((t - pan.mid()) / pan.half_width());
            let mut rho = C::new(0.0, 0.0);
            let mut sigma = 0.0;
            for (i, c) in row.iter().enumerate() {
                rho += self.density.rho[first + i] * c;
                sigma += self.density.sigma[first + i] * c;
            }
            let s = Source {
                xi: cplx(cp.pos),
                tau: cplx(cp.tangent),
                ds: gw * half * cp.speed,
                rho,
                sigma,
            };
            let v = f(&s);
            for k in 0..M {
                out[k] += v[k] * s.ds;
            }
        }
        out
    }

    /// Stream function at an interior target and the path used.
    pub fn w(&self, z: Point) -> Result<(f64, EvalPath)> {
        let near = self.near_panels(z)?;
        if near.is_empty() {
            return Ok((self.ops.w_direct(z, self.density)?, EvalPath::Direct));
        }
        let zc = cplx(z);
        let [layer] = self.layer_integral(z, &near, &|s: &Source| {
            let lg = (s.xi - zc).norm().ln();
            [ws_density(zc, s.xi, s.rho) + wd1_density(zc, s.xi, s.tau, s.rho) - s.sigma * lg / (2.0 * PI)]
        });
        let w = layer + (zc.conj() * self.rho_total).re + self.ops.charge_part(z, &self.density.charges)?;
        Ok((w, EvalPath::Refined))
    }

    /// `∇w` from the Goursat functions of both layers, the completion term
    /// and the charges.
    pub fn gradient(&self, z: Point) -> Result<Point> {
        let near = self.near_panels(z)?;
        let zc = cplx(z);
        let g = self.layer_integral(z, &near, &|s: &Source| {
            let g = slp_goursat_density(zc, s.xi, s.rho) + dlp_goursat_density(zc, s.xi, s.tau, s.rho);
            muskhelishvili_gradient(&g, zc)
        });
        let mut out = [g[0] + self.rho_total.re, g[1] + self.rho_total.im];
        for (k, zk) in self.ops.domain.charge_points.iter().enumerate() {
            let c = self.density.charges[k + 1];
            if c != 0.0 {
                let cg = charge_gradient(z, *zk)?;
                out[0] += c * cg[0];
                out[1] += c * cg[1];
            }
        }
        Ok(out)
    }

    /// `Δu` with `u = ∇⊥w`.
    pub fn laplacian_velocity(&self, z: Point) -> Result<Point> {
        let near = self.near_panels(z)?;
        let zc = cplx(z);
        let v = self.layer_integral(z, &near, &|s: &Source| {
            let p = slp_phi2_density(zc, s.xi, s.rho) + dlp_phi2_density(zc, s.xi, s.tau, s.rho);
            [p.re, p.im]
        });
        let mut phi2 = C::new(v[0], v[1]);
        for (k, zk) in self.ops.domain.charge_points.iter().enumerate() {
            phi2 += self.density.charges[k + 1] * charge_phi2(z, *zk)?;
        }
        Ok(laplacian_velocity(phi2))
    }

    /// Fills `grid.w` at every inside target.
    pub fn eval_field(&self, grid: &mut FieldGrid) -> Result<()> {
        let vals = grid
            .targets
            .par_iter()
            .zip(&grid.inside)
            .map(|(&p, &ins)| if ins { self.w(p).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?;
        grid.w = vals.iter().map(|v| v.map(|x| x.0)).collect();
        grid.path = vals.iter().map(|v| v.map(|x| x.1)).collect();
        Ok(())
    }

    pub fn eval_w(&self, targets: &[Point]) -> Result<Vec<f64>> {
        targets.par_iter().map(|&p| self.w(p).map(|x| x.0)).collect()
    }

    pub fn eval_gradient(&self, targets: &[Point]) -> Result<Vec<Point>> {
        targets.par_iter().map(|&p| self.gradient(p)).collect()
    }

    /// `∮ Δu·τ dS` over the clockwise circle of radius `r` about `center`,
    /// by the trapezoid rule with `n` points.
    pub fn circulation(&self, center: Point, r: f64, n: usize) -> Result<f64> {
        let sum = (0..n)
            .into_par_iter()
            .map(|i| {
                let th = 2.0 * PI * i as f64 / n as f64;
                let (s, c) = th.sin_cos();
                let z = [center[0] + r * c, center[1] - r * s];
                let lu = self.laplacian_velocity(z)?;
                Ok(dot(lu, [-s, -c]))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(sum.iter().sum::<f64>() * 2.0 * PI * r / n as f64)
    }
}

/// `∮_{Γ_k} u·n dS` for every component, from the boundary limit of the
/// representation velocity at the nodes.
pub fn boundary_flux(ops: &BoundaryOperators, d: &LayerDensity) -> Result<Vec<f64>> {
    let per_node = (0..ops.n_nodes())
        .into_par_iter()
        .map(|i| {
            let u = ops.velocity_at_curve(&ops.node_target(i), d)?;
            Ok(dot(u, ops.nodes.normal[i]) * ops.nodes.weight[i])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((0..ops.domain.components.len())
        .map(|k| ops.domain.node_range(k).map(|i| per_node[i]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_circle, make_rounded_rectangle};
    use approx::assert_abs_diff_eq;

    /// Smooth density with zero normal flux through every component, so the
    /// double layer stream function is single valued.
    fn random_density(ops: &BoundaryOperators, charges: Vec<f64>) -> LayerDensity {
        let nd = &ops.nodes;
        let mut mu: Vec<[f64; 2]> = nd
            .pos
            .iter()
            .map(|p| [(2.0 * p[1]).sin() + 0.3 * p[0], p[0] * p[0] - 0.5 * p[1]])
            .collect();
        for k in 0..ops.domain.components.len() {
            let r = ops.domain.node_range(k);
            let flux: f64 = r.clone().map(|i| dot(mu[i], nd.normal[i]) * nd.weight[i]).sum();
            let len: f64 = r.clone().map(|i| nd.weight[i]).sum();
            for i in r {
                mu[i][0] -= flux / len * nd.normal[i][0];
                mu[i][1] -= flux / len * nd.normal[i][1];
            }
        }
        ops.density(mu, charges).unwrap()
    }

    fn rect_ops(np: usize) -> BoundaryOperators {
        BoundaryOperators::new(Domain::simply_connected(make_rounded_rectangle(1.0, 0.5, 0.05, np).unwrap()).unwrap())
            .unwrap()
    }

    fn holed_ops() -> BoundaryOperators {
        let outer = make_circle([0.0, 0.0], 1.0, 16).unwrap();
        let hole = make_circle([0.3, 0.1], 0.2, 8).unwrap();
        BoundaryOperators::new(Domain::new(outer, vec![hole]).unwrap()).unwrap()
    }

    #[test]
    fn far_targets_use_plain_quadrature() {
        let ops = rect_ops(48);
        let d = random_density(&ops, vec![0.2]);
        let fe = FieldEvaluator::new(&ops, &d);
        let z = [0.5, 0.25];
        let (w, path) = fe.w(z).unwrap();
        assert_eq!(path, EvalPath::Direct);
        assert_eq!(w, ops.w_direct(z, &d).unwrap());
    }

    #[test]
    fn refined_matches_plain_where_both_are_accurate() {
        // Targets just inside the near zone, where plain quadrature is still good.
        let ops = rect_ops(24);
        let d = random_density(&ops, vec![0.0]);
        let fe = FieldEvaluator::new(&ops, &d);
        let z = [0.5, 0.12];
        let (w, path) = fe.w(z).unwrap();
        assert_eq!(path, EvalPath::Refined);
        assert_abs_diff_eq!(w, ops.w_direct(z, &d).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn near_boundary_target_matches_oversampled_oracle() {
        let ops = rect_ops(24);
        let d = random_density(&ops, vec![0.0]);
        let fe = FieldEvaluator::new(&ops, &d);
        let z = [0.37, 0.001];
        let (w, path) = fe.w(z).unwrap();
        assert_eq!(path, EvalPath::Refined);
        // Brute force: 10⁴ Gauss points per panel, densities interpolated.
        let zc = cplx(z);
        let fine = crate::quadrature::gauss_legendre(20);
        let basis = PanelBasis::standard();
        let mut layer = 0.0;
        for p in 0..ops.domain.n_panels() {
            let (comp, pan) = ops.domain.panel(p);
            let first = ops.domain.panels()[p].first;
            let sub_n = 500;
            for s in 0..sub_n {
                let a = pan.t_lo + (pan.t_hi - pan.t_lo) * s as f64 / sub_n as f64;
                let h = 0.5 * (pan.t_hi - pan.t_lo) / sub_n as f64;
                for (&u, &gw) in fine.nodes.iter().zip(&fine.weights) {
                    let t = a + h * (1.0 + u);
                    let cp = comp.point_at(t);
                    let row = basis.interp_row((t - pan.mid()) / pan.half_width());
                    let rho: C = row.iter().enumerate().map(|(i, c)| d.rho[first + i] * c).sum();
                    let sigma: f64 = row.iter().enumerate().map(|(i, c)| d.sigma[first + i] * c).sum();
                    let xi = cplx(cp.pos);
                    let tau = cplx(cp.tangent);
                    let f = ws_density(zc, xi, rho) + wd1_density(zc, xi, tau, rho)
                        - sigma * (xi - zc).norm().ln() / (2.0 * PI);
                    layer += f * gw * h * cp.speed;
                }
            }
        }
        let oracle = layer + (zc.conj() * d.rho_total(&ops.nodes)).re + d.charges[0];
        assert_abs_diff_eq!(w, oracle, epsilon = 1e-8);
    }

    #[test]
    fn target_on_boundary_is_rejected() {
        let ops = rect_ops(16);
        let d = random_density(&ops, vec![0.0]);
        let fe = FieldEvaluator::new(&ops, &d);
        let z = ops.nodes.pos[37];
        assert!(matches!(fe.w(z), Err(Error::OnBoundary { .. })));
        let tg = ops.curve_target(0, 0.123);
        assert!(matches!(fe.w(tg.pos), Err(Error::OnBoundary { .. })));
    }

    #[test]
    fn charges_only_gradient() {
        let ops = holed_ops();
        let mu = vec![[0.0; 2]; ops.n_nodes()];
        let d = ops.density(mu, vec![0.0, 1.0]).unwrap();
        let fe = FieldEvaluator::new(&ops, &d);
        let zk = ops.domain.charge_points[0];
        for z in [[-0.5, 0.2], [0.3, 0.7], [0.55, 0.1]] {
            let g = fe.gradient(z).unwrap();
            let r = sub(z, zk);
            let f = 2.0 * norm(r).ln() + 1.0;
            assert_abs_diff_eq!(g[0], f * r[0], epsilon = 1e-13);
            assert_abs_diff_eq!(g[1], f * r[1], epsilon = 1e-13);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ops = holed_ops();
        let d = random_density(&ops, vec![0.1, 0.7]);
        let fe = FieldEvaluator::new(&ops, &d);
        let h = 1e-4;
        // One far target and two in the refinement zone.
        for z in [[-0.4, -0.3], [0.3, 0.33], [0.0, 0.97]] {
            let w = |p: Point| fe.w(p).unwrap().0;
            let gx = (w([z[0] + h, z[1]]) - w([z[0] - h, z[1]])) / (2.0 * h);
            let gy = (w([z[0], z[1] + h]) - w([z[0], z[1] - h])) / (2.0 * h);
            let g = fe.gradient(z).unwrap();
            assert_abs_diff_eq!(g[0], gx, epsilon = 1e-7);
            assert_abs_diff_eq!(g[1], gy, epsilon = 1e-7);
        }
    }

    #[test]
    fn laplacian_velocity_matches_finite_differences() {
        let ops = holed_ops();
        let d = random_density(&ops, vec![0.0, 0.4]);
        let fe = FieldEvaluator::new(&ops, &d);
        let h = 1e-3;
        for z in [[-0.4, -0.3], [0.3, 0.4]] {
            let u = |p: Point| {
                let g = fe.gradient(p).unwrap();
                [g[1], -g[0]]
            };
            let c = u(z);
            let mut lap = [0.0; 2];
            for dz in [[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]] {
                let v = u([z[0] + dz[0], z[1] + dz[1]]);
                lap[0] += (v[0] - c[0]) / (h * h);
                lap[1] += (v[1] - c[1]) / (h * h);
            }
            let l = fe.laplacian_velocity(z).unwrap();
            assert_abs_diff_eq!(l[0], lap[0], epsilon = 1e-4 * (1.0 + l[0].abs()));
            assert_abs_diff_eq!(l[1], lap[1], epsilon = 1e-4 * (1.0 + l[1].abs()));
        }
    }

    #[test]
    fn biharmonicity_probe() {
        let ops = BoundaryOperators::new(Domain::simply_connected(make_circle([0.0, 0.0], 1.0, 16).unwrap()).unwrap())
            .unwrap();
        let mu = ops.nodes.pos.iter().map(|p| [0.3 + 0.2 * p[0], 0.1 * p[1] - 0.2 * p[0] * p[1]]).collect();
        let d = ops.density(mu, vec![0.2]).unwrap();
        let fe = FieldEvaluator::new(&ops, &d);
        let h = 1e-2;
        for z in [[-0.2, 0.0], [0.1, -0.25], [0.3, 0.2]] {
            let w = |i: i32, j: i32| fe.w([z[0] + i as f64 * h, z[1] + j as f64 * h]).unwrap().0;
            let bi = 20.0 * w(0, 0) - 8.0 * (w(1, 0) + w(-1, 0) + w(0, 1) + w(0, -1))
                + 2.0 * (w(1, 1) + w(1, -1) + w(-1, 1) + w(-1, -1))
                + w(2, 0)
                + w(-2, 0)
                + w(0, 2)
                + w(0, -2);
            let scale = w(0, 0).abs().max(1.0);
            assert!((bi / h.powi(4)).abs() <= 1e-4 * scale);
        }
    }

    #[test]
    fn circulation_of_single_charge() {
        let ops = holed_ops();
        let mu = vec![[0.0; 2]; ops.n_nodes()];
        let d = ops.density(mu, vec![0.0, 1.0]).unwrap();
        let fe = FieldEvaluator::new(&ops, &d);
        let c = fe.circulation(ops.domain.charge_points[0], 0.3, 128).unwrap();
        assert_abs_diff_eq!(c, 8.0 * PI, epsilon = 1e-10);
    }

    #[test]
    fn layer_circulation_vanishes_around_hole() {
        let ops = holed_ops();
        let d = random_density(&ops, vec![0.0, 0.0]);
        let fe = FieldEvaluator::new(&ops, &d);
        let c = fe.circulation(ops.domain.charge_points[0], 0.3, 256).unwrap();
        assert_abs_diff_eq!(c, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn polygon_mask_agrees_with_exact_winding() {
        let ops = holed_ops();
        let polys = Polygons::new(&ops.domain);
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..400 {
            let p = [rng.range(-1.05, 1.05), rng.range(-1.05, 1.05)];
            assert_eq!(polys.contains(&ops.domain, p).unwrap(), ops.domain.contains(p).unwrap());
        }
        // Just inside and just outside the hole.
        let c = ops.domain.charge_points[0];
        assert!(polys.contains(&ops.domain, [c[0] + 0.2 + 1e-9, c[1]]).unwrap());
        assert!(!polys.contains(&ops.domain, [c[0] + 0.2 - 1e-9, c[1]]).unwrap());
    }

    #[test]
    fn grid_mask_and_reference() {
        let ops = holed_ops();
        let d = ops.density(vec![[0.0; 2]; ops.n_nodes()], vec![2.0, 0.0]).unwrap();
        let fe = FieldEvaluator::new(&ops, &d);
        let mut g = FieldGrid::from_bbox(&ops.domain, [-1.1, 1.1, -1.1, 1.1], 9, 7).unwrap();
        fe.eval_field(&mut g).unwrap();
        g.set_reference(|_| 2.0);
        assert_eq!(g.shape, Some((9, 7)));
        for i in 0..g.targets.len() {
            assert_eq!(g.inside[i], g.w[i].is_some());
        }
        assert!(g.inside.iter().any(|&b| b) && g.inside.iter().any(|&b| !b));
        assert!(g.max_abs_err().unwrap() < 1e-13);
    }
}
