//! Experiment configuration, the numerical experiments, and their output files.
//!
//! Random draws come from [`SplitMix64`] in a fixed order. Simply connected
//! instance: 8 source offsets (`δ₁..δ₈`, paired as `(x, y)` per source),
//! 8 target offsets, then 4 strengths. Multiply connected instance: 20 source
//! offsets, 24 target offsets, then 10 strengths.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::assembly::{assemble_block_system, assemble_farkas, scale_system, BlockSystem, DirichletData};
use crate::error::{Error, Result};
use crate::field_eval::{boundary_flux, FieldEvaluator, FieldGrid};
use crate::geometry::{make_circle, make_rounded_rectangle, Domain, Point, RoundedRectangle};
use crate::kernels::{biharm_green, biharm_green_gradient, charge_gradient, charge_stream};
use crate::linalg::condition_number;
use crate::rng::{SplitMix64, DEFAULT_SEED};
use crate::stream_eval::{BoundaryOperators, LayerDensity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Simply,
    Multi,
}

/// All experiment parameters. Every field has a default, so a config file
/// only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Rectangle length, height and corner rounding.
    pub a: f64,
    pub b: f64,
    pub h: f64,
    /// Obstacles of the multiply connected domain.
    pub circles: Vec<CircleSpec>,
    /// Panel ladder of the simply connected study.
    pub panels: Vec<usize>,
    /// Total panel ladder of the multiply connected study.
    pub multi_panels: Vec<usize>,
    /// Fewest panels on any obstacle.
    pub min_circle_panels: usize,
    pub condition_h: Vec<f64>,
    pub condition_panels: usize,
    /// Panels for single solves (`solve`, `eval-grid`); total panels when
    /// the domain is multiply connected.
    pub solve_panels: usize,
    pub greens_panels: usize,
    pub domain: DomainKind,
    pub seed: u64,
    /// Distance of the simply connected sources from the rectangle.
    pub source_offset: f64,
    /// Half width of the simply connected offsets `δ`.
    pub delta: f64,
    /// Half width of the multiply connected offsets, in obstacle radii.
    pub hole_delta: f64,
    pub grid: [usize; 2],
    /// Loads compared by the Green's function symmetry check.
    pub symmetry_pair: [usize; 2],
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut circles = Vec::new();
        for i in 0..5 {
            circles.push(CircleSpec { center: [0.12 + 0.2 * i as f64, 0.15], radius: 0.04 });
        }
        for i in 0..5 {
            circles.push(CircleSpec { center: [0.08 + 0.2 * i as f64, 0.35], radius: 0.04 });
        }
        RunConfig {
            a: 1.0,
            b: 0.5,
            h: 0.05,
            circles,
            panels: vec![48, 72, 96, 144],
            multi_panels: vec![88, 132, 176],
            min_circle_panels: 4,
            condition_h: vec![0.2, 0.1, 0.05, 0.025],
            condition_panels: 48,
            solve_panels: 96,
            greens_panels: 132,
            domain: DomainKind::Simply,
            seed: DEFAULT_SEED,
            source_offset: 0.2,
            delta: 0.05,
            hole_delta: 0.5,
            grid: [200, 100],
            symmetry_pair: [4, 5],
            out: None,
        }
    }
}

const MIN_PANELS: usize = 4;

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Uses `n` panels everywhere a panel count appears. Counts for the
    /// domain with obstacles are raised to the smallest valid total.
    pub fn set_panels(&mut self, n: usize) {
        let multi = n.max(MIN_PANELS + self.circles.len() * self.min_circle_panels);
        self.panels = vec![n];
        self.multi_panels = vec![multi];
        self.condition_panels = n;
        self.solve_panels = if self.domain == DomainKind::Multi { multi } else { n };
        self.greens_panels = multi;
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        RoundedRectangle::new(self.a, self.b, self.h).map_err(|e| Error::Config(e.to_string()))?;
        for &h in &self.condition_h {
            RoundedRectangle::new(self.a, self.b, h).map_err(|e| Error::Config(e.to_string()))?;
        }
        let singles = [self.condition_panels, self.solve_panels, self.greens_panels];
        if let Some(n) = self.panels.iter().chain(&singles).find(|&&n| n < MIN_PANELS) {
            return bad(format!("panel count {n} is below the minimum {MIN_PANELS}"));
        }
        if self.panels.is_empty() || self.multi_panels.is_empty() || self.condition_h.is_empty() {
            return bad("panel ladders and condition_h must be nonempty".into());
        }
        if self.min_circle_panels < 1 {
            return bad("min_circle_panels must be at least 1".into());
        }
        let multi_min = MIN_PANELS + self.circles.len() * self.min_circle_panels;
        if let Some(n) = self.multi_panels.iter().find(|&&n| n < multi_min) {
            return bad(format!("multiply connected panel count {n} is below {multi_min}"));
        }
        if self.circles.iter().any(|c| !(c.radius > 0.0)) {
            return bad("circle radii must be positive".into());
        }
        if !(self.delta >= 0.0 && self.hole_delta >= 0.0 && self.hole_delta < 1.0 / 2f64.sqrt()) {
            return bad("offset widths must be nonnegative and keep sources inside obstacles".into());
        }
        if !(self.source_offset > self.delta) {
            return bad("source_offset must exceed delta so sources stay outside the domain".into());
        }
        if self.grid[0] == 0 || self.grid[1] == 0 {
            return bad("grid dimensions must be positive".into());
        }
        if self.symmetry_pair[0] == self.symmetry_pair[1] {
            return bad("symmetry_pair needs two different loads".into());
        }
        Ok(())
    }
}

/// `w = Σ q_j |x − s_j|² log|x − s_j|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManufacturedSolution {
    pub sources: Vec<Point>,
    pub strengths: Vec<f64>,
}

impl ManufacturedSolution {
    pub fn w(&self, x: Point) -> f64 {
        self.sources
            .iter()
            .zip(&self.strengths)
            .map(|(&s, &q)| q * charge_stream(x, s).unwrap_or(0.0))
            .sum()
    }

    pub fn gradient(&self, x: Point) -> Point {
        let mut g = [0.0; 2];
        for (&s, &q) in self.sources.iter().zip(&self.strengths) {
            let c = charge_gradient(x, s).unwrap_or([0.0; 2]);
            g[0] += q * c[0];
            g[1] += q * c[1];
        }
        g
    }

    pub fn data(&self, ops: &BoundaryOperators) -> DirichletData {
        DirichletData::from_function(ops, |p| self.w(p), |p| self.gradient(p))
    }
}

/// A manufactured problem: exact solution plus evaluation targets.
#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub solution: ManufacturedSolution,
    pub targets: Vec<Point>,
}

/// Sources outside the rectangle and targets inside it.
pub fn simply_connected_instance(cfg: &RunConfig) -> Instance {
    let mut rng = SplitMix64::new(cfg.seed);
    let mut draw = |n: usize, w: f64| -> Vec<f64> { (0..n).map(|_| rng.range(-w, w)).collect() };
    let ds = draw(8, cfg.delta);
    let dt = draw(8, cfg.delta);
    let (a, b, o) = (cfg.a, cfg.b, cfg.source_offset);
    let base_s = [[a + o, 0.5 * b], [0.5 * a, b + o], [-o, 0.5 * b], [0.5 * a, -o]];
    let base_t = [[0.25 * a, 0.25 * b], [0.25 * a, 0.75 * b], [0.75 * a, 0.25 * b], [0.75 * a, 0.75 * b]];
    let sources = (0..4).map(|j| [base_s[j][0] + ds[2 * j], base_s[j][1] + ds[2 * j + 1]]).collect();
    let targets = (0..4).map(|j| [base_t[j][0] + dt[2 * j], base_t[j][1] + dt[2 * j + 1]]).collect();
    let strengths = (0..4).map(|_| rng.uniform()).collect();
    Instance {
        solution: ManufacturedSolution { sources, strengths },
        targets,
    }
}

/// The twelve interior target locations of the multiply connected domain.
pub fn multi_target_bases() -> Vec<Point> {
    let mut t = Vec::new();
    for i in 0..4 {
        t.push([0.22 + 0.2 * i as f64, 0.05]);
    }
    for i in 0..4 {
        t.push([0.22 + 0.2 * i as f64, 0.25]);
    }
    for i in 0..4 {
        t.push([0.18 + 0.2 * i as f64, 0.45]);
    }
    t
}

/// One source inside each obstacle and twelve perturbed targets.
pub fn multiply_connected_instance(cfg: &RunConfig) -> Result<Instance> {
    let mut rng = SplitMix64::new(cfg.seed);
    let r0 = cfg.circles.iter().map(|c| c.radius).fold(f64::INFINITY, f64::min);
    let w = cfg.hole_delta * r0;
    let nc = cfg.circles.len();
    let ds: Vec<f64> = (0..2 * nc).map(|_| rng.range(-w, w)).collect();
    let bases = multi_target_bases();
    let dt: Vec<f64> = (0..2 * bases.len()).map(|_| rng.range(-w, w)).collect();
    let strengths: Vec<f64> = (0..nc).map(|_| rng.uniform()).collect();
    let mut sources = Vec::with_capacity(nc);
    for (i, c) in cfg.circles.iter().enumerate() {
        let s = [c.center[0] + ds[2 * i], c.center[1] + ds[2 * i + 1]];
        if ((s[0] - c.center[0]).hypot(s[1] - c.center[1])) >= c.radius {
            return Err(Error::Config(format!("source {i} lies outside its obstacle")));
        }
        sources.push(s);
    }
    let targets = bases
        .iter()
        .enumerate()
        .map(|(i, t)| [t[0] + dt[2 * i], t[1] + dt[2 * i + 1]])
        .collect();
    Ok(Instance {
        solution: ManufacturedSolution { sources, strengths },
        targets,
    })
}

pub fn simply_connected_domain(a: f64, b: f64, h: f64, n_panels: usize) -> Result<Domain> {
    Domain::simply_connected(make_rounded_rectangle(a, b, h, n_panels)?)
}

/// Panels per component for a total budget: by arclength, with at least
/// `min_circle` per obstacle and the rest on the outer boundary.
pub fn allocate_panels(outer_len: f64, circle_lens: &[f64], total: usize, min_circle: usize) -> Result<Vec<usize>> {
    let all: f64 = outer_len + circle_lens.iter().sum::<f64>();
    let circles: Vec<usize> = circle_lens
        .iter()
        .map(|l| ((total as f64 * l / all).round() as usize).max(min_circle))
        .collect();
    let used: usize = circles.iter().sum();
    if used + MIN_PANELS > total {
        return Err(Error::Config(format!("{total} panels cannot cover the obstacles")));
    }
    let mut split = vec![total - used];
    split.extend(circles);
    Ok(split)
}

/// Rounded rectangle with the configured obstacles; returns the domain and
/// the panel split `[outer, circle₁, ..]`.
pub fn multiply_connected_domain(cfg: &RunConfig, total_panels: usize) -> Result<(Domain, Vec<usize>)> {
    let probe = make_rounded_rectangle(cfg.a, cfg.b, cfg.h, 64)?;
    let lens: Vec<f64> = cfg.circles.iter().map(|c| 2.0 * std::f64::consts::PI * c.radius).collect();
    let split = allocate_panels(probe.arclength(), &lens, total_panels, cfg.min_circle_panels)?;
    let outer = make_rounded_rectangle(cfg.a, cfg.b, cfg.h, split[0])?;
    let holes = cfg
        .circles
        .iter()
        .zip(&split[1..])
        .map(|(c, &n)| make_circle(c.center, c.radius, n))
        .collect::<Result<Vec<_>>>()?;
    Ok((Domain::new(outer, holes)?, split))
}

/// Boundary operators together with the factored, scaled block system.
pub struct Problem {
    pub ops: BoundaryOperators,
    pub system_size: usize,
    solver: crate::assembly::BlockSolver,
}

impl Problem {
    pub fn new(domain: Domain) -> Result<Self> {
        let ops = BoundaryOperators::new(domain).map_err(|e| e.at("boundary operators"))?;
        let sys = scaled_system(&ops)?;
        let solver = sys.factor()?;
        Ok(Problem {
            system_size: sys.size(),
            ops,
            solver,
        })
    }

    pub fn solve(&self, data: &DirichletData) -> Result<LayerDensity> {
        self.solver.solve(&self.ops, data).map_err(|e| e.at("block solve"))
    }

    pub fn evaluator<'a>(&'a self, d: &'a LayerDensity) -> FieldEvaluator<'a> {
        FieldEvaluator::new(&self.ops, d)
    }
}

pub fn scaled_system(ops: &BoundaryOperators) -> Result<BlockSystem> {
    let sys = assemble_block_system(ops).map_err(|e| e.at("assembly"))?;
    Ok(scale_system(ops, sys))
}

/// Relative ℓ₂ error over the targets.
pub fn relative_error(computed: &[f64], exact: &[f64]) -> f64 {
    let num: f64 = computed.iter().zip(exact).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = exact.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n_panels: usize,
    pub n_d: usize,
    pub system_size: usize,
    pub eps: f64,
}

/// Outcome of one manufactured solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub row: ConvergenceRow,
    pub panel_split: Vec<usize>,
    pub computed: Vec<f64>,
    pub exact: Vec<f64>,
    /// `∮ u·n dS` per component.
    pub flux: Vec<f64>,
    pub charges: Vec<f64>,
}

pub fn solve_instance(domain: Domain, inst: &Instance, n_panels: usize, split: Vec<usize>) -> Result<SolveReport> {
    let p = Problem::new(domain)?;
    let data = inst.solution.data(&p.ops);
    let d = p.solve(&data)?;
    let computed = p.evaluator(&d).eval_w(&inst.targets).map_err(|e| e.at("evaluation"))?;
    let exact: Vec<f64> = inst.targets.iter().map(|&t| inst.solution.w(t)).collect();
    let flux = boundary_flux(&p.ops, &d)?;
    Ok(SolveReport {
        row: ConvergenceRow {
            n_panels,
            n_d: p.ops.n_nodes(),
            system_size: p.system_size,
            eps: relative_error(&computed, &exact),
        },
        panel_split: split,
        computed,
        exact,
        flux,
        charges: d.charges.clone(),
    })
}

pub fn run_convergence_simply_connected(cfg: &RunConfig) -> Result<Vec<SolveReport>> {
    let inst = simply_connected_instance(cfg);
    cfg.panels
        .iter()
        .map(|&np| {
            let dom = simply_connected_domain(cfg.a, cfg.b, cfg.h, np)?;
            solve_instance(dom, &inst, np, vec![np])
        })
        .collect()
}

pub fn run_convergence_multiply_connected(cfg: &RunConfig) -> Result<Vec<SolveReport>> {
    let inst = multiply_connected_instance(cfg)?;
    cfg.multi_panels
        .iter()
        .map(|&np| {
            let (dom, split) = multiply_connected_domain(cfg, np)?;
            solve_instance(dom, &inst, np, split)
        })
        .collect()
}

/// Least-squares slope `p` of `log ε = c − p log N`.
pub fn fitted_order(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.system_size as f64).ln(), r.eps.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub h: f64,
    pub kappa_ours: f64,
    pub kappa_farkas: f64,
}

pub fn run_condition_study(cfg: &RunConfig) -> Result<Vec<ConditionRow>> {
    cfg.condition_h
        .iter()
        .map(|&h| {
            let dom = simply_connected_domain(cfg.a, cfg.b, h, cfg.condition_panels)?;
            let ops = BoundaryOperators::new(dom)?;
            let ours = scaled_system(&ops)?;
            let kappa_ours = condition_number(ours.matrix.as_ref()).map_err(|e| e.at("condition number"))?;
            drop(ours);
            let farkas = assemble_farkas(&ops, true)?;
            let kappa_farkas = condition_number(farkas.matrix.as_ref()).map_err(|e| e.at("condition number"))?;
            Ok(ConditionRow { h, kappa_ours, kappa_farkas })
        })
        .collect()
}

/// Sum of free-space Green's functions `G^B(·, t_j)`.
#[derive(Debug, Clone)]
pub struct LoadSet {
    pub loads: Vec<Point>,
}

impl LoadSet {
    pub fn w(&self, x: Point) -> f64 {
        self.loads.iter().map(|&t| biharm_green(x, t).unwrap_or(0.0)).sum()
    }

    pub fn gradient(&self, x: Point) -> Point {
        let mut g = [0.0; 2];
        for &t in &self.loads {
            let c = biharm_green_gradient(x, t).unwrap_or([0.0; 2]);
            g[0] += c[0];
            g[1] += c[1];
        }
        g
    }

    /// Homogeneous data `(−w_p, −∂w_p/∂n)`.
    pub fn homogeneous_data(&self, ops: &BoundaryOperators) -> DirichletData {
        DirichletData::from_function(ops, |p| -self.w(p), |p| {
            let g = self.gradient(p);
            [-g[0], -g[1]]
        })
    }
}

/// Domain Green's function `w = w_p + w_h` for a set of loads.
pub struct GreensFunction<'a> {
    pub problem: &'a Problem,
    pub loads: LoadSet,
    pub density: LayerDensity,
}

impl<'a> GreensFunction<'a> {
    pub fn new(problem: &'a Problem, loads: Vec<Point>) -> Result<Self> {
        for &t in &loads {
            if !problem.ops.domain.contains(t)? {
                return Err(Error::Config(format!("load point {t:?} is outside the domain")));
            }
        }
        let loads = LoadSet { loads };
        let density = problem.solve(&loads.homogeneous_data(&problem.ops))?;
        Ok(GreensFunction { problem, loads, density })
    }

    pub fn w(&self, x: Point) -> Result<f64> {
        Ok(self.loads.w(x) + self.problem.evaluator(&self.density).w(x)?.0)
    }

    /// Largest `|w|` and `|∂w/∂n|` over off-node checkpoints at panel
    /// midpoints, with the largest `|w_p|` and `|∂w_p/∂n|` there.
    pub fn boundary_residuals(&self) -> Result<BoundaryResiduals> {
        let ops = &self.problem.ops;
        let mut r = BoundaryResiduals::default();
        for p in 0..ops.domain.n_panels() {
            let (_, pan) = ops.domain.panel(p);
            let k = ops.domain.panels()[p].component;
            for frac in [0.5, 0.17] {
                let tg = ops.curve_target(k, pan.t_lo + frac * (pan.t_hi - pan.t_lo));
                let (wh, gh) = ops.boundary_values(&tg, &self.density)?;
                let wp = self.loads.w(tg.pos);
                let gp = self.loads.gradient(tg.pos);
                let gpn = gp[0] * tg.normal[0] + gp[1] * tg.normal[1];
                r.max_w = r.max_w.max((wh + wp).abs());
                r.max_dwdn = r.max_dwdn.max((gh + gpn).abs());
                r.max_wp = r.max_wp.max(wp.abs());
                r.max_dwpdn = r.max_dwpdn.max(gpn.abs());
            }
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct BoundaryResiduals {
    pub max_w: f64,
    pub max_dwdn: f64,
    pub max_wp: f64,
    pub max_dwpdn: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryCheck {
    pub load_a: Point,
    pub load_b: Point,
    pub g_ab: f64,
    pub g_ba: f64,
    pub rel_diff: f64,
}

pub struct GreensReport {
    pub grid: FieldGrid,
    pub residuals: BoundaryResiduals,
    pub symmetry: SymmetryCheck,
    pub loads: Vec<Point>,
    pub panel_split: Vec<usize>,
}

/// Twelve loads at the multiply connected targets, a grid of the combined
/// field, and the two-solve symmetry check.
pub fn run_greens_function(cfg: &RunConfig) -> Result<GreensReport> {
    let inst = multiply_connected_instance(cfg)?;
    let (dom, split) = multiply_connected_domain(cfg, cfg.greens_panels)?;
    let problem = Problem::new(dom)?;
    let g = GreensFunction::new(&problem, inst.targets.clone())?;
    let residuals = g.boundary_residuals()?;
    let mut grid = FieldGrid::from_bbox(&problem.ops.domain, [0.0, cfg.a, 0.0, cfg.b], cfg.grid[0], cfg.grid[1])?;
    for (i, t) in grid.targets.iter().enumerate() {
        if inst.targets.iter().any(|l| l == t) {
            grid.inside[i] = false;
        }
    }
    let fe = problem.evaluator(&g.density);
    fe.eval_field(&mut grid).map_err(|e| e.at("grid evaluation"))?;
    for (w, t) in grid.w.iter_mut().zip(&grid.targets) {
        if let Some(v) = w {
            *v += g.loads.w(*t);
        }
    }
    let [ia, ib] = cfg.symmetry_pair;
    let (ta, tb) = match (inst.targets.get(ia), inst.targets.get(ib)) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Config("symmetry_pair index out of range".into())),
    };
    let ga = GreensFunction::new(&problem, vec![ta])?;
    let gb = GreensFunction::new(&problem, vec![tb])?;
    let g_ab = ga.w(tb)?;
    let g_ba = gb.w(ta)?;
    Ok(GreensReport {
        grid,
        residuals,
        symmetry: SymmetryCheck {
            load_a: ta,
            load_b: tb,
            g_ab,
            g_ba,
            rel_diff: (g_ab - g_ba).abs() / g_ab.abs().max(g_ba.abs()),
        },
        loads: inst.targets,
        panel_split: split,
    })
}

/// Manufactured solve on the configured domain, evaluated on a grid.
pub fn run_eval_grid(cfg: &RunConfig) -> Result<(FieldGrid, SolveReport)> {
    let (inst, dom, split) = configured_problem(cfg)?;
    let np = cfg.solve_panels;
    let problem = Problem::new(dom)?;
    let d = problem.solve(&inst.solution.data(&problem.ops))?;
    let mut grid = FieldGrid::from_bbox(&problem.ops.domain, [0.0, cfg.a, 0.0, cfg.b], cfg.grid[0], cfg.grid[1])?;
    problem.evaluator(&d).eval_field(&mut grid).map_err(|e| e.at("grid evaluation"))?;
    grid.set_reference(|p| inst.solution.w(p));
    let computed = problem.evaluator(&d).eval_w(&inst.targets)?;
    let exact: Vec<f64> = inst.targets.iter().map(|&t| inst.solution.w(t)).collect();
    let report = SolveReport {
        row: ConvergenceRow {
            n_panels: np,
            n_d: problem.ops.n_nodes(),
            system_size: problem.system_size,
            eps: relative_error(&computed, &exact),
        },
        panel_split: split,
        computed,
        exact,
        flux: boundary_flux(&problem.ops, &d)?,
        charges: d.charges.clone(),
    };
    Ok((grid, report))
}

/// Manufactured solve at `solve_panels` on the configured domain.
pub fn run_solve(cfg: &RunConfig) -> Result<(Instance, SolveReport)> {
    let (inst, dom, split) = configured_problem(cfg)?;
    let rep = solve_instance(dom, &inst, cfg.solve_panels, split)?;
    Ok((inst, rep))
}

fn configured_problem(cfg: &RunConfig) -> Result<(Instance, Domain, Vec<usize>)> {
    Ok(match cfg.domain {
        DomainKind::Simply => (
            simply_connected_instance(cfg),
            simply_connected_domain(cfg.a, cfg.b, cfg.h, cfg.solve_panels)?,
            vec![cfg.solve_panels],
        ),
        DomainKind::Multi => {
            let (d, s) = multiply_connected_domain(cfg, cfg.solve_panels)?;
            (multiply_connected_instance(cfg)?, d, s)
        }
    })
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::File::create(path)?)
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "n_panels,n_d,system_size,eps")?;
    for r in rows {
        writeln!(f, "{},{},{},{:e}", r.n_panels, r.n_d, r.system_size, r.eps)?;
    }
    Ok(())
}

pub fn write_condition_csv(path: &Path, rows: &[ConditionRow]) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "h,kappa_ours,kappa_farkas")?;
    for r in rows {
        writeln!(f, "{},{:e},{:e}", r.h, r.kappa_ours, r.kappa_farkas)?;
    }
    Ok(())
}

/// `x,y,inside,w[,w_ref,abs_err]`; `w` is empty outside the domain.
pub fn write_grid_csv(path: &Path, grid: &FieldGrid) -> Result<()> {
    let mut f = std::io::BufWriter::new(create(path)?);
    let with_ref = grid.w_ref.is_some();
    writeln!(f, "x,y,inside,w{}", if with_ref { ",w_ref,abs_err" } else { "" })?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for i in 0..grid.targets.len() {
        let p = grid.targets[i];
        write!(f, "{:e},{:e},{},{}", p[0], p[1], u8::from(grid.inside[i]), opt(grid.w[i]))?;
        if let (Some(r), Some(e)) = (&grid.w_ref, &grid.abs_err) {
            write!(f, ",{},{}", opt(r[i]), opt(e[i]))?;
        }
        writeln!(f)?;
    }
    f.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

/// Sidecar for a grid file: the config plus experiment-specific fields.
pub fn grid_sidecar(cfg: &RunConfig, grid: &FieldGrid, extra: Value) -> Value {
    let mut v = json!({
        "config": cfg,
        "nx": grid.shape.map(|s| s.0),
        "ny": grid.shape.map(|s| s.1),
        "bbox": [0.0, cfg.a, 0.0, cfg.b],
        "columns": if grid.w_ref.is_some() { "x,y,inside,w,w_ref,abs_err" } else { "x,y,inside,w" },
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}
