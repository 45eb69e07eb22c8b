//! Acceptance run: one PASS/FAIL line per criterion. Failures are reported,
//! not hidden; the process exits 0 so the suite can be read in full.

use std::f64::consts::PI;
use std::time::Instant;

use biharm::assembly::DirichletData;
use biharm::driver::{
    self, multiply_connected_domain, multiply_connected_instance, GreensFunction, ManufacturedSolution, Problem,
    RunConfig,
};
use biharm::field_eval::{boundary_flux, FieldEvaluator};
use biharm::geometry::Point;
use biharm::kernels::stokes_layers;
use biharm::linalg::condition_number;
use biharm::stream_eval::{BoundaryOperators, LayerDensity};

struct Tally {
    pass: usize,
    fail: usize,
    /// Largest `|∮ u·n dS|` over every solve in the run.
    max_flux: f64,
    solves: usize,
}

impl Tally {
    fn report(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }

    fn flux(&mut self, f: &[f64]) {
        self.solves += 1;
        for v in f {
            self.max_flux = self.max_flux.max(v.abs());
        }
    }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn within_factor(x: f64, reference: f64, factor: f64) -> bool {
    x <= reference * factor && x >= reference / factor
}

fn simply_connected(t: &mut Tally, cfg: &RunConfig) {
    let reference = [3.09e-4, 1.65e-7, 1.84e-10, 1.33e-12];
    let start = Instant::now();
    let reps = match driver::run_convergence_simply_connected(cfg) {
        Ok(r) => r,
        Err(e) => return t.report("simply connected convergence", false, format!("error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    for r in &reps {
        t.flux(&r.flux);
    }
    let eps: Vec<f64> = reps.iter().map(|r| r.row.eps).collect();
    let sizes: Vec<usize> = reps.iter().map(|r| r.row.system_size).collect();
    let monotone = eps.windows(2).all(|w| w[1] < w[0]);
    let finest = eps[3] <= 1e-10;
    let near: Vec<bool> = eps.iter().zip(reference).map(|(&e, p)| within_factor(e, p, 100.0)).collect();
    let sizes_ok = sizes == [1537, 2305, 3073, 4609];
    let ok = monotone && finest && near.iter().all(|&b| b) && sizes_ok && secs <= 300.0;
    t.report(
        "simply connected convergence",
        ok,
        format!(
            "N={sizes:?} eps={} monotone={monotone} eps(2304)<=1e-10:{finest} within 100x of reference={near:?} runtime={secs:.1}s",
            sci(&eps)
        ),
    );
}

fn conditioning(t: &mut Tally, cfg: &RunConfig) {
    let rows = match driver::run_condition_study(cfg) {
        Ok(r) => r,
        Err(e) => return t.report("conditioning", false, format!("error: {e}")),
    };
    let ours: Vec<f64> = rows.iter().map(|r| r.kappa_ours).collect();
    let farkas: Vec<f64> = rows.iter().map(|r| r.kappa_farkas).collect();
    let ours_band = ours.iter().all(|&k| (5.0..=200.0).contains(&k));
    let ours_ratio = ours[3] / ours[0];
    let farkas_ratio = farkas[3] / farkas[0];
    let ok = ours_band && ours_ratio <= 3.0 && farkas_ratio >= 100.0 && farkas[3] >= 1e5;
    t.report(
        "conditioning",
        ok,
        format!(
            "h={:?} kappa_ours={} (in [5,200]: {ours_band}, ratio {ours_ratio:.2} <= 3) kappa_farkas={} (ratio {farkas_ratio:.1} >= 100: {}, kappa(0.025) >= 1e5: {})",
            cfg.condition_h,
            sci(&ours),
            sci(&farkas),
            farkas_ratio >= 100.0,
            farkas[3] >= 1e5
        ),
    );
}

fn multiply_connected(t: &mut Tally, cfg: &RunConfig) {
    let reps = match driver::run_convergence_multiply_connected(cfg) {
        Ok(r) => r,
        Err(e) => return t.report("multiply connected convergence", false, format!("error: {e}")),
    };
    for r in &reps {
        t.flux(&r.flux);
    }
    let rows: Vec<_> = reps.iter().map(|r| r.row.clone()).collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let sizes: Vec<usize> = rows.iter().map(|r| r.system_size).collect();
    let order = driver::fitted_order(&rows);
    let last = *eps.last().unwrap();
    let ok = sizes == [2827, 4235, 5643] && last <= 1e-9 && order >= 10.0;
    t.report(
        "multiply connected convergence",
        ok,
        format!("N={sizes:?} eps={} eps(5643)<=1e-9:{} fitted order {order:.2} >= 10", sci(&eps), last <= 1e-9),
    );
}

fn injectivity(t: &mut Tally, p: &Problem) {
    let n = p.ops.n_nodes();
    let res = DirichletData::from_samples(&p.ops, vec![0.0; n], vec![0.0; n]).and_then(|d| p.solve(&d));
    match res {
        Ok(d) => {
            t.flux(&boundary_flux(&p.ops, &d).unwrap_or_default());
            let mu = d.mu.iter().fold(0.0f64, |a, m| a.max(m[0].abs()).max(m[1].abs()));
            let c = d.charges.iter().fold(0.0f64, |a, c| a.max(c.abs()));
            let kappa = driver::scaled_system(&p.ops).and_then(|s| condition_number(s.matrix.as_ref()));
            let kappa = kappa.map_or_else(|e| format!("error: {e}"), |k| format!("{k:.3e}"));
            t.report(
                "injectivity",
                mu <= 1e-10 && c <= 1e-10,
                format!("10 holes, n_d={n}: max|mu|={mu:.2e} max|c|={c:.2e} (<= 1e-10), scaled system condition number {kappa}"),
            );
        }
        Err(e) => t.report("injectivity", false, format!("error: {e}")),
    }
}

fn charge_completion(t: &mut Tally, p: &Problem) {
    let zs = p.ops.domain.charge_points.clone();
    let mut worst_c: f64 = 0.0;
    let mut worst_other_c: f64 = 0.0;
    let mut worst_circ_k: f64 = 0.0;
    let mut worst_circ_other: f64 = 0.0;
    for (k, &zk) in zs.iter().enumerate() {
        let sol = ManufacturedSolution { sources: vec![zk], strengths: vec![1.0] };
        let d = match p.solve(&sol.data(&p.ops)) {
            Ok(d) => d,
            Err(e) => return t.report("charge completion", false, format!("error: {e}")),
        };
        t.flux(&boundary_flux(&p.ops, &d).unwrap_or_default());
        for (j, c) in d.charges[1..].iter().enumerate() {
            if j == k {
                worst_c = worst_c.max((c - 1.0).abs());
            } else {
                worst_other_c = worst_other_c.max(c.abs());
            }
        }
        let fe = FieldEvaluator::new(&p.ops, &d);
        for (j, &zj) in zs.iter().enumerate() {
            let circ = match fe.circulation(zj, 0.06, 256) {
                Ok(c) => c,
                Err(e) => return t.report("charge completion", false, format!("error: {e}")),
            };
            if j == k {
                worst_circ_k = worst_circ_k.max((circ - 8.0 * PI).abs());
            } else {
                worst_circ_other = worst_circ_other.max(circ.abs());
            }
        }
    }
    let ok = worst_c <= 1e-8 && worst_circ_k <= 1e-6 && worst_circ_other <= 1e-8;
    t.report(
        "charge completion",
        ok,
        format!(
            "all 10 holes: max|c_k-1|={worst_c:.2e} (<=1e-8) max|c_j|, j!=k ={worst_other_c:.2e} max|circ_k-8pi|={worst_circ_k:.2e} (<=1e-6) max|circ_j|, j!=k ={worst_circ_other:.2e} (<=1e-8)"
        ),
    );
}

fn smooth_density(ops: &BoundaryOperators) -> LayerDensity {
    let mu = ops
        .nodes
        .pos
        .iter()
        .map(|p| [(3.0 * p[0]).cos() + 0.5 * p[1], 0.3 - p[0] * p[1] + (2.0 * p[1]).sin()])
        .collect();
    ops.density(mu, vec![0.0]).unwrap()
}

/// `S_Γμ + D_Γμ + ∫μ dS` by plain quadrature.
fn real_kernel_velocity(ops: &BoundaryOperators, d: &LayerDensity, x: Point) -> Point {
    let (s, dl) = stokes_layers(x, &ops.nodes, &d.mu).unwrap();
    let mut m = [0.0; 2];
    for (mu, w) in d.mu.iter().zip(&ops.nodes.weight) {
        m[0] += mu[0] * w;
        m[1] += mu[1] * w;
    }
    [s[0] + dl[0] + m[0], s[1] + dl[1] + m[1]]
}

fn layer_identities(t: &mut Tally) {
    let dom = driver::simply_connected_domain(1.0, 0.5, 0.05, 48).unwrap();
    let ops = BoundaryOperators::new(dom).unwrap();
    let d = smooth_density(&ops);
    let fe = FieldEvaluator::new(&ops, &d);

    // Goursat path and finite differences of w against the real kernels, at
    // targets at least one panel length from the boundary.
    let mut goursat_err: f64 = 0.0;
    let mut fd_err: f64 = 0.0;
    let w = |p: Point| fe.w(p).unwrap().0;
    for z in [[0.3, 0.2], [0.6, 0.3], [0.5, 0.25], [0.75, 0.15]] {
        let u = real_kernel_velocity(&ops, &d, z);
        let g = fe.gradient(z).unwrap();
        goursat_err = goursat_err.max((g[1] - u[0]).abs()).max((-g[0] - u[1]).abs());
        let fd = |h: f64| {
            [
                (w([z[0] + h, z[1]]) - w([z[0] - h, z[1]])) / (2.0 * h),
                (w([z[0], z[1] + h]) - w([z[0], z[1] - h])) / (2.0 * h),
            ]
        };
        let (a, b) = (fd(1e-5), fd(2e-5));
        let gx = (4.0 * a[0] - b[0]) / 3.0;
        let gy = (4.0 * a[1] - b[1]) / 3.0;
        fd_err = fd_err.max((gy - u[0]).abs()).max((-gx - u[1]).abs());
    }

    // Interior limit of the velocity at points midway between nodes against
    // -½μ + PV, extrapolated from two small distances.
    let mut jump_err: f64 = 0.0;
    for i in [5usize, 77, 200, 411, 640] {
        let (a, b) = (ops.node_target(i), ops.node_target(i + 1));
        let tg = ops.curve_target(0, 0.5 * (a.t + b.t));
        let limit = ops.velocity_at_curve(&tg, &d).unwrap();
        let at = |e: f64| {
            let g = fe.gradient([tg.pos[0] - e * tg.normal[0], tg.pos[1] - e * tg.normal[1]]).unwrap();
            [g[1], -g[0]]
        };
        let (u1, u2) = (at(1e-5), at(2e-5));
        for c in 0..2 {
            jump_err = jump_err.max((2.0 * u1[c] - u2[c] - limit[c]).abs());
        }
    }
    let ok = goursat_err <= 1e-8 && fd_err <= 1e-8 && jump_err <= 1e-6;
    t.report(
        "jump relation and Goursat/real-kernel equivalence",
        ok,
        format!(
            "Goursat vs real kernels {goursat_err:.2e}, finite differences vs real kernels {fd_err:.2e} (<=1e-8), interior limit vs -mu/2+PV {jump_err:.2e} (<=1e-6)"
        ),
    );
}

fn greens(t: &mut Tally, cfg: &RunConfig) {
    let mut run = || -> biharm::Result<(bool, String)> {
        let inst = multiply_connected_instance(cfg)?;
        let (dom, _) = multiply_connected_domain(cfg, cfg.greens_panels)?;
        let p = Problem::new(dom)?;
        let g = GreensFunction::new(&p, inst.targets.clone())?;
        t.flux(&boundary_flux(&p.ops, &g.density)?);
        let r = g.boundary_residuals()?;
        let [ia, ib] = cfg.symmetry_pair;
        let (ta, tb) = (inst.targets[ia], inst.targets[ib]);
        let ga = GreensFunction::new(&p, vec![ta])?;
        let gb = GreensFunction::new(&p, vec![tb])?;
        t.flux(&boundary_flux(&p.ops, &ga.density)?);
        t.flux(&boundary_flux(&p.ops, &gb.density)?);
        let (gab, gba) = (ga.w(tb)?, gb.w(ta)?);
        let rel = (gab - gba).abs() / gab.abs().max(gba.abs());
        let w_ok = r.max_w <= 1e-7 * r.max_wp;
        let g_ok = r.max_dwdn <= 1e-5 * r.max_dwpdn;
        let ok = w_ok && g_ok && rel <= 1e-7;
        Ok((ok, format!(
            "|w|={:.2e} <= 1e-7*{:.3e}: {w_ok}; |dw/dn|={:.2e} <= 1e-5*{:.3e}: {g_ok}; G(t{},t{})={gab:.6e} vs {gba:.6e}, rel {rel:.2e} <= 1e-7",
            r.max_w,
            r.max_wp,
            r.max_dwdn,
            r.max_dwpdn,
            ia + 1,
            ib + 1
        )))
    };
    match run() {
        Ok((ok, msg)) => t.report("Green's function", ok, msg),
        Err(e) => t.report("Green's function", false, format!("error: {e}")),
    }
}

fn main() {
    let cfg = RunConfig::default();
    let mut t = Tally { pass: 0, fail: 0, max_flux: 0.0, solves: 0 };
    simply_connected(&mut t, &cfg);
    conditioning(&mut t, &cfg);
    multiply_connected(&mut t, &cfg);
    let (dom, _) = multiply_connected_domain(&cfg, cfg.multi_panels[0]).expect("obstacle geometry");
    let p = Problem::new(dom).expect("obstacle system");
    injectivity(&mut t, &p);
    charge_completion(&mut t, &p);
    greens(&mut t, &cfg);
    let flux_ok = t.max_flux <= 1e-12;
    let (solves, max_flux) = (t.solves, t.max_flux);
    t.report(
        "single-valuedness",
        flux_ok,
        format!("max |flux through a component| over {solves} solves = {max_flux:.2e} (<= 1e-12)"),
    );
    layer_identities(&mut t);
    println!("acceptance: {} passed, {} failed", t.pass, t.fail);
}
