//! Closed boundary curves, their panelization, and multiply connected domains.
//!
//! Every component is stored with the domain on its left: the outer boundary
//! runs counterclockwise and holes run clockwise. With that single convention
//! the normal `n = (τ₂, -τ₁)` points out of the domain on every component
//! and the signed curvature of a hole is negative.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::PanelBasis;

pub type Point = [f64; 2];

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Smoothed rectangle `[0,a] x [0,b]`: the arclength parametrization of the
/// sharp rectangle convolved (periodically) with a Gaussian of standard
/// deviation `h`. The parameter origin sits at the middle of the bottom edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedRectangle {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

struct Edge {
    start: f64,
    end: f64,
    origin: Point,
    dir: Point,
}

impl RoundedRectangle {
    pub fn new(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Geometry(format!("rectangle sides must be positive (a={a}, b={b})")));
        }
        if !(h > 0.0) || h > 0.5 * a.min(b) {
            return Err(Error::Geometry(format!(
                "rounding h={h} must lie in (0, min(a,b)/2]; larger values merge the corners"
            )));
        }
        Ok(RoundedRectangle { a, b, h })
    }

    pub fn perimeter_sharp(&self) -> f64 {
        2.0 * (self.a + self.b)
    }

    fn edges(&self) -> [Edge; 5] {
        let (a, b) = (self.a, self.b);
        let s1 = 0.5 * a;
        let s2 = s1 + b;
        let s3 = s2 + a;
        let s4 = s3 + b;
        let l = s4 + 0.5 * a;
        [
            Edge { start: 0.0, end: s1, origin: [0.5 * a, 0.0], dir: [1.0, 0.0] },
            Edge { start: s1, end: s2, origin: [a, 0.0], dir: [0.0, 1.0] },
            Edge { start: s2, end: s3, origin: [a, b], dir: [-1.0, 0.0] },
            Edge { start: s3, end: s4, origin: [0.0, b], dir: [0.0, -1.0] },
            Edge { start: s4, end: l, origin: [0.0, 0.0], dir: [1.0, 0.0] },
        ]
    }

    /// Position, velocity and acceleration of the smoothed curve at `t`.
    fn eval(&self, t: f64) -> [Point; 3] {
        let l = self.perimeter_sharp();
        let t = t.rem_euclid(l);
        let h = self.h;
        let gauss = |u: f64| (-(u * u) / (2.0 * h * h)).exp() / ((2.0 * PI).sqrt() * h);
        let cdf = |u: f64| 0.5 * (1.0 + libm::erf(u / (SQRT_2 * h)));
        let mut pos = [0.0; 2];
        let mut vel = [0.0; 2];
        let mut acc = [0.0; 2];
        for shift in [-l, 0.0, l] {
            for e in self.edges() {
                let lo = e.start + shift - t;
                let hi = e.end + shift - t;
                let mass = cdf(hi) - cdf(lo);
                let first = h * h * (gauss(lo) - gauss(hi));
                let dens = gauss(lo) - gauss(hi);
                // Point on the sharp edge at parameter t (extended linearly).
                let along = t - (e.start + shift);
                for c in 0..2 {
                    pos[c] += (e.origin[c] + e.dir[c] * along) * mass + e.dir[c] * first;
                    vel[c] += e.dir[c] * mass;
                    acc[c] += e.dir[c] * dens;
                }
            }
        }
        [pos, vel, acc]
    }
}

/// Analytic parametrization of a closed curve, traversed counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurveParam {
    Circle { center: Point, radius: f64 },
    RoundedRectangle(RoundedRectangle),
}

impl CurveParam {
    pub fn period(&self) -> f64 {
        match self {
            CurveParam::Circle { .. } => 2.0 * PI,
            CurveParam::RoundedRectangle(r) => r.perimeter_sharp(),
        }
    }

    /// Position, velocity and acceleration at parameter `t`.
    pub fn eval(&self, t: f64) -> [Point; 3] {
        match self {
            CurveParam::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                [
                    [center[0] + radius * c, center[1] + radius * s],
                    [-radius * s, radius * c],
                    [-radius * c, -radius * s],
                ]
            }
            CurveParam::RoundedRectangle(r) => r.eval(t),
        }
    }

    pub fn position(&self, t: f64) -> Point {
        self.eval(t)[0]
    }

    pub fn velocity(&self, t: f64) -> Point {
        self.eval(t)[1]
    }

    pub fn acceleration(&self, t: f64) -> Point {
        self.eval(t)[2]
    }

    /// A point strictly inside the curve, used as the default charge location.
    pub fn interior_point(&self) -> Point {
        match self {
            CurveParam::Circle { center, .. } => *center,
            CurveParam::RoundedRectangle(r) => [0.5 * r.a, 0.5 * r.b],
        }
    }
}

/// How panel breakpoints are placed along the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PanelLayout {
    /// Equal parameter length.
    #[default]
    Uniform,
    /// Equidistributes `|x'| (1 + L |κ| / 2π)`: half of the panels follow the
    /// turning of the tangent, concentrating them at rounded corners.
    Graded,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub t_lo: f64,
    pub t_hi: f64,
    pub node_params: Vec<f64>,
    pub arclength_weights: Vec<f64>,
}

impl Panel {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.t_hi - self.t_lo)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.t_hi + self.t_lo)
    }

    pub fn arclength(&self) -> f64 {
        self.arclength_weights.iter().sum()
    }
}

/// Geometric data at one point of an oriented component.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub pos: Point,
    pub tangent: Point,
    pub normal: Point,
    pub speed: f64,
    pub curvature: f64,
}

/// One closed boundary curve with its panels and per-node data.
#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub curve: CurveParam,
    /// +1 when traversed along the curve parameter, -1 when reversed.
    pub orientation: i8,
    pub panels: Vec<Panel>,
    pub nodes: Vec<Point>,
    pub tangents: Vec<Point>,
    pub normals: Vec<Point>,
    pub curvature: Vec<f64>,
    pub weights: Vec<f64>,
    pub speeds: Vec<f64>,
}

impl BoundaryComponent {
    pub fn new(curve: CurveParam, n_panels: usize, layout: PanelLayout) -> Result<Self> {
        if n_panels == 0 {
            return Err(Error::Geometry("a component needs at least one panel".into()));
        }
        let breaks = match layout {
            PanelLayout::Uniform => {
                let p = curve.period();
                (0..=n_panels).map(|i| p * i as f64 / n_panels as f64).collect()
            }
            PanelLayout::Graded => graded_breaks(&curve, n_panels),
        };
        let mut comp = BoundaryComponent {
            curve,
            orientation: 1,
            panels: Vec::new(),
            nodes: Vec::new(),
            tangents: Vec::new(),
            normals: Vec::new(),
            curvature: Vec::new(),
            weights: Vec::new(),
            speeds: Vec::new(),
        };
        comp.rebuild(&breaks);
        comp.check_regular()?;
        Ok(comp)
    }

    fn rebuild(&mut self, breaks: &[f64]) {
        let basis = PanelBasis::standard();
        self.panels.clear();
        self.nodes.clear();
        self.tangents.clear();
        self.normals.clear();
        self.curvature.clear();
        self.weights.clear();
        self.speeds.clear();
        for w in breaks.windows(2) {
            let (t_lo, t_hi) = (w[0], w[1]);
            let half = 0.5 * (t_hi - t_lo);
            let mid = 0.5 * (t_hi + t_lo);
            let mut params = Vec::with_capacity(basis.order());
            let mut wts = Vec::with_capacity(basis.order());
            for (&u, &gw) in basis.rule.nodes.iter().zip(&basis.rule.weights) {
                let t = mid + half * u;
                let p = self.point_at(t);
                params.push(t);
                wts.push(gw * half * p.speed);
                self.nodes.push(p.pos);
                self.tangents.push(p.tangent);
                self.normals.push(p.normal);
                self.curvature.push(p.curvature);
                self.speeds.push(p.speed);
            }
            self.weights.extend_from_slice(&wts);
            self.panels.push(Panel {
                t_lo,
                t_hi,
                node_params: params,
                arclength_weights: wts,
            });
        }
    }

    /// Reverses the traversal direction, keeping the same panel breakpoints.
    pub fn reversed(&self) -> Self {
        let p = self.curve.period();
        let mut breaks: Vec<f64> = self.panels.iter().map(|pn| pn.t_lo).collect();
        breaks.push(self.panels.last().map_or(p, |pn| pn.t_hi));
        let mut rev: Vec<f64> = breaks.iter().rev().map(|&t| p - t).collect();
        rev[0] = 0.0;
        *rev.last_mut().unwrap() = p;
        let mut comp = self.clone();
        comp.orientation = -self.orientation;
        comp.rebuild(&rev);
        comp
    }

    /// Geometry at parameter `t` in this component's traversal direction.
    pub fn point_at(&self, t: f64) -> CurvePoint {
        let [pos, vel, acc] = if self.orientation >= 0 {
            self.curve.eval(t)
        } else {
            let [p, v, a] = self.curve.eval(self.curve.period() - t);
            [p, [-v[0], -v[1]], a]
        };
        let speed = norm(vel);
        let tangent = [vel[0] / speed, vel[1] / speed];
        CurvePoint {
            pos,
            tangent,
            normal: [tangent[1], -tangent[0]],
            speed,
            curvature: (vel[0] * acc[1] - vel[1] * acc[0]) / speed.powi(3),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn arclength(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn period(&self) -> f64 {
        self.curve.period()
    }

    fn check_regular(&self) -> Result<()> {
        let p = self.period();
        let n = 64 * self.panels.len().max(16);
        for i in 0..n {
            let s = self.point_at(p * i as f64 / n as f64).speed;
            if !(s > 1e-8) {
                return Err(Error::Geometry("curve velocity vanishes".into()));
            }
        }
        Ok(())
    }

    /// Dense samples `(t, point)` along the traversal.
    pub fn sample(&self, n: usize) -> Vec<(f64, Point)> {
        let p = self.period();
        (0..n)
            .map(|i| {
                let t = p * i as f64 / n as f64;
                (t, self.point_at(t).pos)
            })
            .collect()
    }

    /// Distance from `p` to the curve, minimized over a fine sample and then
    /// refined by golden-section search on the parameter.
    pub fn distance_to(&self, p: Point) -> (f64, f64) {
        let per = self.period();
        let n = 64 * self.panels.len().max(8);
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..n {
            let t = per * i as f64 / n as f64;
            let d = norm(sub(self.point_at(t).pos, p));
            if d < best.0 {
                best = (d, t);
            }
        }
        let step = per / n as f64;
        let (mut lo, mut hi) = (best.1 - step, best.1 + step);
        let f = |t: f64| norm(sub(self.point_at(t).pos, p));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..80 {
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
        let t = 0.5 * (lo + hi);
        (f(t).min(best.0), t.rem_euclid(per))
    }
}

fn graded_breaks(curve: &CurveParam, n_panels: usize) -> Vec<f64> {
    let p = curve.period();
    let m = 8192.max(64 * n_panels);
    let samples: Vec<(f64, f64)> = (0..=m)
        .map(|i| {
            let [_, v, a] = curve.eval(p * i as f64 / m as f64);
            let s = norm(v);
            (s, (v[0] * a[1] - v[1] * a[0]).abs() / (s * s))
        })
        .collect();
    let length: f64 = samples.iter().map(|&(s, _)| s).sum::<f64>() * p / m as f64;
    let gamma = length / (2.0 * PI);
    // Cumulative density by the trapezoid rule, then linear inversion.
    let mut cum = vec![0.0; m + 1];
    for i in 1..=m {
        let d0 = samples[i - 1].0 + gamma * samples[i - 1].1;
        let d1 = samples[i].0 + gamma * samples[i].1;
        cum[i] = cum[i - 1] + 0.5 * (d0 + d1) * p / m as f64;
    }
    let total = cum[m];
    let mut breaks = Vec::with_capacity(n_panels + 1);
    breaks.push(0.0);
    let mut j = 0;
    for k in 1..n_panels {
        let target = total * k as f64 / n_panels as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        breaks.push(p * (j as f64 + frac) / m as f64);
    }
    breaks.push(p);
    breaks
}

/// Winding number of the oriented component around `p`.
///
/// Sums angle increments along a polygon inscribed in the curve, bisecting
/// any chord that passes close to `p` so the polygon cannot cut across it.
pub fn winding_number(p: Point, comp: &BoundaryComponent) -> Result<i32> {
    let per = comp.period();
    let scale = comp.arclength();
    let tol = 1e-12 * scale;
    let n = 32 * comp.panels.len().max(4);
    let mut total = 0.0;
    for i in 0..n {
        let t0 = per * i as f64 / n as f64;
        let t1 = per * (i + 1) as f64 / n as f64;
        total += angle_sweep(comp, p, t0, t1, tol, 0)?;
    }
    Ok((total / (2.0 * PI)).round() as i32)
}

fn angle_sweep(comp: &BoundaryComponent, p: Point, t0: f64, t1: f64, tol: f64, depth: u32) -> Result<f64> {
    let a = sub(comp.point_at(t0).pos, p);
    let b = sub(comp.point_at(t1).pos, p);
    let (da, db) = (norm(a), norm(b));
    if da < tol || db < tol {
        return Err(Error::OnBoundary { point: p, distance: da.min(db) });
    }
    let chord = norm(sub(b, a));
    // Distance from p to the chord.
    let ab = sub(b, a);
    let s = (-dot(a, ab) / (chord * chord).max(1e-300)).clamp(0.0, 1.0);
    let closest = [a[0] + s * ab[0], a[1] + s * ab[1]];
    if norm(closest) < chord && depth < 60 {
        let tm = 0.5 * (t0 + t1);
        return Ok(angle_sweep(comp, p, t0, tm, tol, depth + 1)? + angle_sweep(comp, p, tm, t1, tol, depth + 1)?);
    }
    if depth >= 60 {
        return Err(Error::OnBoundary { point: p, distance: norm(closest) });
    }
    Ok((a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b)))
}

/// Counterclockwise circle with uniform panels.
pub fn make_circle(center: Point, radius: f64, n_panels: usize) -> Result<BoundaryComponent> {
    if !(radius > 0.0) {
        return Err(Error::Geometry(format!("circle radius must be positive, got {radius}")));
    }
    BoundaryComponent::new(CurveParam::Circle { center, radius }, n_panels, PanelLayout::Uniform)
}

/// Rounded rectangle with vertices `(0,0), (a,0), (a,b), (0,b)`, uniform panels.
pub fn make_rounded_rectangle(a: f64, b: f64, h: f64, n_panels: usize) -> Result<BoundaryComponent> {
    make_rounded_rectangle_with(a, b, h, n_panels, PanelLayout::Uniform)
}

pub fn make_rounded_rectangle_with(
    a: f64,
    b: f64,
    h: f64,
    n_panels: usize,
    layout: PanelLayout,
) -> Result<BoundaryComponent> {
    let rect = RoundedRectangle::new(a, b, h)?;
    BoundaryComponent::new(CurveParam::RoundedRectangle(rect), n_panels, layout)
}

/// Location of a panel in the flattened node numbering.
#[derive(Debug, Clone, Copy)]
pub struct PanelRef {
    pub component: usize,
    /// Index of the panel within its component.
    pub local: usize,
    /// Global index of the panel's first node.
    pub first: usize,
    pub prev: usize,
    pub next: usize,
}

/// A bounded domain: outer boundary `Γ₀` plus holes `Γ₁..Γ_N`, each hole
/// carrying one charge point.
#[derive(Debug, Clone)]
pub struct Domain {
    pub components: Vec<BoundaryComponent>,
    pub charge_points: Vec<Point>,
    panels: Vec<PanelRef>,
    node_offsets: Vec<usize>,
}

impl Domain {
    pub fn simply_connected(outer: BoundaryComponent) -> Result<Self> {
        Self::new(outer, Vec::new())
    }

    /// Builds a domain from counterclockwise components; holes are reversed
    /// so the domain lies on the left of every component. Charge points
    /// default to each hole's [`CurveParam::interior_point`].
    pub fn new(outer: BoundaryComponent, holes: Vec<BoundaryComponent>) -> Result<Self> {
        let charges = holes.iter().map(|h| h.curve.interior_point()).collect();
        Self::with_charges(outer, holes, charges)
    }

    pub fn with_charges(outer: BoundaryComponent, holes: Vec<BoundaryComponent>, charge_points: Vec<Point>) -> Result<Self> {
        if charge_points.len() != holes.len() {
            return Err(Error::Geometry(format!(
                "{} holes but {} charge points",
                holes.len(),
                charge_points.len()
            )));
        }
        let outer = if outer.orientation > 0 { outer } else { outer.reversed() };
        let mut components = vec![outer];
        for h in holes {
            components.push(if h.orientation < 0 { h } else { h.reversed() });
        }
        let dom = Self::assemble(components, charge_points);
        dom.validate()?;
        Ok(dom)
    }

    fn assemble(components: Vec<BoundaryComponent>, charge_points: Vec<Point>) -> Self {
        let order = PanelBasis::standard().order();
        let mut panels = Vec::new();
        let mut node_offsets = vec![0];
        let mut first = 0;
        for (ci, c) in components.iter().enumerate() {
            let np = c.panels.len();
            let base = panels.len();
            for k in 0..np {
                panels.push(PanelRef {
                    component: ci,
                    local: k,
                    first,
                    prev: base + (k + np - 1) % np,
                    next: base + (k + 1) % np,
                });
                first += order;
            }
            node_offsets.push(first);
        }
        Domain {
            components,
            charge_points,
            panels,
            node_offsets,
        }
    }

    fn validate(&self) -> Result<()> {
        let outer = &self.components[0];
        for (k, hole) in self.holes().iter().enumerate() {
            let z = self.charge_points[k];
            if winding_number(z, hole)?.abs() != 1 {
                return Err(Error::Geometry(format!("charge point {k} is not inside its hole")));
            }
            for (l, other) in self.holes().iter().enumerate() {
                if l != k && winding_number(z, other)? != 0 {
                    return Err(Error::Geometry(format!("charge point {k} lies inside hole {l}")));
                }
            }
            for &p in hole.nodes.iter().step_by(4) {
                if winding_number(p, outer)? != 1 {
                    return Err(Error::Geometry(format!("hole {k} is not inside the outer boundary")));
                }
                for (l, other) in self.holes().iter().enumerate() {
                    if l != k && winding_number(p, other)? != 0 {
                        return Err(Error::Geometry(format!("holes {k} and {l} overlap")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn outer(&self) -> &BoundaryComponent {
        &self.components[0]
    }

    pub fn holes(&self) -> &[BoundaryComponent] {
        &self.components[1..]
    }

    pub fn n_holes(&self) -> usize {
        self.components.len() - 1
    }

    /// Total number of boundary nodes `n_d`.
    pub fn n_nodes(&self) -> usize {
        *self.node_offsets.last().unwrap()
    }

    pub fn n_panels(&self) -> usize {
        self.panels.len()
    }

    pub fn panels(&self) -> &[PanelRef] {
        &self.panels
    }

    /// Global node range of component `k`.
    pub fn node_range(&self, k: usize) -> std::ops::Range<usize> {
        self.node_offsets[k]..self.node_offsets[k + 1]
    }

    /// Size of the full block system, `2 n_d + N + 1`.
    pub fn system_size(&self) -> usize {
        2 * self.n_nodes() + self.n_holes() + 1
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.node_offsets.partition_point(|&o| o <= node) - 1
    }

    pub fn panel_of(&self, node: usize) -> usize {
        let k = self.component_of(node);
        let local = (node - self.node_offsets[k]) / PanelBasis::standard().order();
        self.panels.partition_point(|p| p.component < k) + local
    }

    pub fn panel(&self, p: usize) -> (&BoundaryComponent, &Panel) {
        let r = self.panels[p];
        let c = &self.components[r.component];
        (c, &c.panels[r.local])
    }

    /// Flattened node data for the whole boundary.
    pub fn nodes(&self) -> NodeView<'_> {
        NodeView { domain: self }
    }

    /// Whether `p` is in the open domain (winding 1 about the outer
    /// boundary, 0 about every hole).
    pub fn contains(&self, p: Point) -> Result<bool> {
        if winding_number(p, self.outer())? != 1 {
            return Ok(false);
        }
        for h in self.holes() {
            if winding_number(p, h)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Shortest distance from `p` to any component, with the component index
    /// and the parameter of the closest point.
    pub fn distance_to_boundary(&self, p: Point) -> (f64, usize, f64) {
        self.components
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let (d, t) = c.distance_to(p);
                (d, k, t)
            })
            .fold((f64::INFINITY, 0, 0.0), |a, b| if b.0 < a.0 { b } else { a })
    }
}

/// Index-based access to the node arrays of all components.
#[derive(Clone, Copy)]
pub struct NodeView<'a> {
    domain: &'a Domain,
}

impl<'a> NodeView<'a> {
    #[inline]
    fn locate(&self, i: usize) -> (&'a BoundaryComponent, usize) {
        let k = self.domain.component_of(i);
        (&self.domain.components[k], i - self.domain.node_offsets[k])
    }

    pub fn pos(&self, i: usize) -> Point {
        let (c, j) = self.locate(i);
        c.nodes[j]
    }

    pub fn tangent(&self, i: usize) -> Point {
        let (c, j) = self.locate(i);
        c.tangents[j]
    }

    pub fn normal(&self, i: usize) -> Point {
        let (c, j) = self.locate(i);
        c.normals[j]
    }

    pub fn curvature(&self, i: usize) -> f64 {
        let (c, j) = self.locate(i);
        c.curvature[j]
    }

    pub fn weight(&self, i: usize) -> f64 {
        let (c, j) = self.locate(i);
        c.weights[j]
    }

    pub fn speed(&self, i: usize) -> f64 {
        let (c, j) = self.locate(i);
        c.speeds[j]
    }

    /// Flattened copies, convenient for assembly loops.
    pub fn collect(&self) -> FlatNodes {
        let mut f = FlatNodes::default();
        for c in &self.domain.components {
            f.pos.extend_from_slice(&c.nodes);
            f.tangent.extend_from_slice(&c.tangents);
            f.normal.extend_from_slice(&c.normals);
            f.curvature.extend_from_slice(&c.curvature);
            f.weight.extend_from_slice(&c.weights);
            f.speed.extend_from_slice(&c.speeds);
        }
        f
    }
}

#[derive(Debug, Clone, Default)]
pub struct FlatNodes {
    pub pos: Vec<Point>,
    pub tangent: Vec<Point>,
    pub normal: Vec<Point>,
    pub curvature: Vec<f64>,
    pub weight: Vec<f64>,
    pub speed: Vec<f64>,
}

impl FlatNodes {
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }
}
