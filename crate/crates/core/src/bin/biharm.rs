use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use biharm::driver::{self, RunConfig};
use biharm::{Error, Result};

#[derive(Parser)]
#[command(name = "biharm", version, about = "Clamped plate solver and the numerical experiments built on it")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution solve on the configured domain.
    Solve(Common),
    /// Error ladder on the rounded rectangle.
    ConvergenceSimply(Common),
    /// Condition numbers of both representations as the corners sharpen.
    ConditionStudy(Common),
    /// Error ladder on the rectangle with ten obstacles.
    ConvergenceMulti(Common),
    /// Green's function of the plate with obstacles, on a grid.
    Greens(Common),
    /// Manufactured solution and its error on a grid.
    EvalGrid(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Panel count replacing every ladder and single-solve setting.
    #[arg(long)]
    panels: Option<usize>,
    /// Grid size as NX,NY.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
}

fn parse_grid(s: &str) -> std::result::Result<[usize; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected NX,NY")?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v}: {e}"));
    Ok([p(a)?, p(b)?])
}

impl Common {
    fn config(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.panels {
            cfg.set_panels(n);
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        cfg.validate()?;
        let out = self.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
        Ok((cfg, out))
    }
}

fn run(cmd: Command) -> Result<Value> {
    match cmd {
        Command::Solve(c) => {
            let (cfg, out) = c.config()?;
            let (inst, rep) = driver::run_solve(&cfg)?;
            let path = out.join("solve.json");
            driver::write_json(&path, &json!({ "config": cfg, "instance": inst, "report": rep }))?;
            Ok(json!({
                "command": "solve",
                "eps": rep.row.eps,
                "system_size": rep.row.system_size,
                "max_abs_flux": rep.flux.iter().fold(0.0f64, |a, b| a.max(b.abs())),
                "output": path,
            }))
        }
        Command::ConvergenceSimply(c) => {
            let (cfg, out) = c.config()?;
            let reps = driver::run_convergence_simply_connected(&cfg)?;
            convergence_output(&cfg, &out, "convergence", reps)
        }
        Command::ConvergenceMulti(c) => {
            let (cfg, out) = c.config()?;
            let reps = driver::run_convergence_multiply_connected(&cfg)?;
            convergence_output(&cfg, &out, "convergence_multi", reps)
        }
        Command::ConditionStudy(c) => {
            let (cfg, out) = c.config()?;
            let rows = driver::run_condition_study(&cfg)?;
            let path = out.join("condition.csv");
            driver::write_condition_csv(&path, &rows)?;
            driver::write_json(&out.join("condition.json"), &json!({ "config": cfg, "rows": rows }))?;
            Ok(json!({ "command": "condition-study", "rows": rows, "output": path }))
        }
        Command::Greens(c) => {
            let (cfg, out) = c.config()?;
            let rep = driver::run_greens_function(&cfg)?;
            let path = out.join("greens.csv");
            driver::write_grid_csv(&path, &rep.grid)?;
            let extra = json!({
                "loads": rep.loads,
                "panel_split": rep.panel_split,
                "boundary_residuals": rep.residuals,
                "symmetry": rep.symmetry,
            });
            driver::write_json(&out.join("greens.json"), &driver::grid_sidecar(&cfg, &rep.grid, extra))?;
            Ok(json!({
                "command": "greens",
                "max_w_residual": rep.residuals.max_w,
                "max_dwdn_residual": rep.residuals.max_dwdn,
                "symmetry_rel_diff": rep.symmetry.rel_diff,
                "output": path,
            }))
        }
        Command::EvalGrid(c) => {
            let (cfg, out) = c.config()?;
            let (grid, rep) = driver::run_eval_grid(&cfg)?;
            let path = out.join("grid.csv");
            driver::write_grid_csv(&path, &grid)?;
            let extra = json!({ "panel_split": rep.panel_split, "report": rep });
            driver::write_json(&out.join("grid.json"), &driver::grid_sidecar(&cfg, &grid, extra))?;
            Ok(json!({
                "command": "eval-grid",
                "eps": rep.row.eps,
                "max_abs_err": grid.max_abs_err(),
                "output": path,
            }))
        }
    }
}

fn convergence_output(cfg: &RunConfig, out: &std::path::Path, name: &str, reps: Vec<driver::SolveReport>) -> Result<Value> {
    let rows: Vec<_> = reps.iter().map(|r| r.row.clone()).collect();
    let path = out.join(format!("{name}.csv"));
    driver::write_convergence_csv(&path, &rows)?;
    let order = (rows.len() > 1).then(|| driver::fitted_order(&rows));
    driver::write_json(
        &out.join(format!("{name}.json")),
        &json!({ "config": cfg, "reports": reps, "fitted_order": order }),
    )?;
    Ok(json!({
        "command": name,
        "eps": rows.iter().map(|r| r.eps).collect::<Vec<_>>(),
        "fitted_order": order,
        "output": path,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        2
    } else {
        3
    }
}
