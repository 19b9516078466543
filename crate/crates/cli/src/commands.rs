//! Subcommand implementations.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use lwnls::rearrange::{rearrange, rearrangement_report};
use lwnls::solver::{descend, ground_state, SolverConfig};
use lwnls::verify::{run_suite, Suite};
use lwnls::{Field, Grid, Problem};

use crate::config::RunConfig;
use crate::output::{float, opt_float, OutputDir, RunManifest};
use crate::CliError;

pub struct RunOptions<'a> {
    pub config_path: &'a Path,
    pub out: &'a Path,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub refine: bool,
}

pub enum Outcome {
    Converged,
    NotConverged,
}

/// Everything computed for one problem instance.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub u: Field,
    pub c: f64,
    pub c_infinity: f64,
    pub residual: f64,
    pub nonneg_violation: f64,
    pub symmetry_defect: f64,
    /// `max_{|x| ≥ 0.9L} |u| / max |u|`: how much of the profile reaches the
    /// edge of the periodic box.
    pub truncation_err: f64,
    /// Relative change of `c` on `(L, 2N)`.
    pub drift_2n: Option<f64>,
    /// Relative change of `c` on `(2L, 2N)`.
    pub drift_2l: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl PointResult {
    /// Largest of the two refinement drifts, when refinement ran.
    pub fn refinement_drift(&self) -> Option<f64> {
        match (self.drift_2n, self.drift_2l) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        }
    }
}

fn tail_ratio(u: &Field) -> f64 {
    let g = u.grid();
    let edge = 0.9 * g.half_length();
    let top = u.values().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let tail = g
        .points()
        .zip(u.values())
        .filter(|(x, _)| x.abs() >= edge)
        .fold(0.0_f64, |m, (_, v)| m.max(v.abs()));
    tail / top
}

fn rerun(prob: &Problem, grid: Grid, u: &Field, cfg: &SolverConfig, c: f64) -> Result<f64, CliError> {
    let p = prob.on_grid(grid);
    let d = descend(&p, &u.resample(p.grid()), cfg)?;
    Ok((d.c - c).abs() / c.abs())
}

pub fn solve_point(prob: &Problem, cfg: &SolverConfig, refine: bool) -> Result<PointResult, CliError> {
    let r = ground_state(prob, cfg)?;
    let (drift_2n, drift_2l) = if refine {
        let g = prob.grid();
        (
            Some(rerun(prob, g.refined(), &r.u, cfg, r.c)?),
            Some(rerun(prob, g.extended(), &r.u, cfg, r.c)?),
        )
    } else {
        (None, None)
    };
    Ok(PointResult {
        truncation_err: tail_ratio(&r.u),
        u: r.u,
        c: r.c,
        c_infinity: r.c_infinity,
        residual: r.residual,
        nonneg_violation: r.nonneg_violation,
        symmetry_defect: r.symmetry_defect,
        drift_2n,
        drift_2l,
        iterations: r.iterations,
        converged: r.converged,
    })
}

fn load(opts: &RunOptions) -> Result<(RunConfig, Vec<u8>), CliError> {
    let bytes = fs::read(opts.config_path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = opts.seed {
        cfg.solver.seed = seed;
    }
    Ok((cfg, bytes))
}

/// Scalar ground-state report; field order is the JSON key order.
#[derive(Serialize)]
struct GroundStateJson<'a> {
    tag: &'a str,
    alpha: f64,
    #[serde(rename = "L")]
    half_length: f64,
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    c: f64,
    c_infinity: f64,
    residual: f64,
    nonneg_violation: f64,
    symmetry_defect: f64,
    truncation_err: f64,
    refinement_drift: Option<f64>,
    drift_2n: Option<f64>,
    drift_2l: Option<f64>,
    iterations: usize,
    converged: bool,
}

fn profile_csv(u: &Field) -> String {
    let star = rearrange(u);
    let mut s = String::from("x,u,u_star\n");
    for ((x, a), b) in u.grid().points().zip(u.values()).zip(star.values()) {
        s.push_str(&format!("{},{},{}\n", float(x), float(*a), float(*b)));
    }
    s
}

pub fn cmd_ground_state(opts: &RunOptions) -> Result<Outcome, CliError> {
    let (cfg, bytes) = load(opts)?;
    let manifest = RunManifest::new("ground-state", &bytes, cfg.solver.seed);
    let prob = cfg.problem()?;
    let r = solve_point(&prob, &cfg.solver_config(), opts.refine)?;

    let stem = cfg.stem();
    let mut out = OutputDir::create(opts.out)?;
    out.write_json(
        &format!("{stem}.json"),
        &GroundStateJson {
            tag: &cfg.tag,
            alpha: cfg.alpha,
            half_length: cfg.half_length,
            n: cfg.n,
            seed: cfg.solver.seed,
            c: r.c,
            c_infinity: r.c_infinity,
            residual: r.residual,
            nonneg_violation: r.nonneg_violation,
            symmetry_defect: r.symmetry_defect,
            truncation_err: r.truncation_err,
            refinement_drift: r.refinement_drift(),
            drift_2n: r.drift_2n,
            drift_2l: r.drift_2l,
            iterations: r.iterations,
            converged: r.converged,
        },
    )?;
    out.write(&format!("{stem}.csv"), &profile_csv(&r.u))?;
    out.finish(&stem, manifest)?;

    println!(
        "c = {}  c_inf = {}  residual = {:.3e}  iterations = {}  converged = {}",
        float(r.c),
        float(r.c_infinity),
        r.residual,
        r.iterations,
        r.converged
    );
    Ok(if r.converged {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}

pub const SWEEP_HEADER: &str = "value,c,c_inf,residual,symmetry_defect,truncation_err,refinement_drift,status";

fn sweep_row(value: f64, res: &Result<PointResult, CliError>) -> String {
    match res {
        Ok(r) => format!(
            "{},{},{},{},{},{},{},{}",
            float(value),
            float(r.c),
            float(r.c_infinity),
            float(r.residual),
            float(r.symmetry_defect),
            float(r.truncation_err),
            opt_float(r.refinement_drift()),
            if r.converged { "converged" } else { "not_converged" }
        ),
        Err(e) => {
            let msg = e.to_string().replace([',', '\n', '"'], ";");
            format!("{},nan,nan,nan,nan,nan,nan,error: {msg}", float(value))
        }
    }
}

pub fn cmd_sweep(opts: &RunOptions) -> Result<Outcome, CliError> {
    let (cfg, bytes) = load(opts)?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("config has no [sweep] section".into()))?;
    if sweep.values.is_empty() {
        return Err(CliError::Config("sweep values are empty".into()));
    }
    let manifest = RunManifest::new("sweep", &bytes, cfg.solver.seed);
    let solver = cfg.solver_config();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    let results: Vec<Result<PointResult, CliError>> = pool.install(|| {
        sweep
            .values
            .par_iter()
            .map(|&v| {
                let p = cfg.sweep_problem(sweep.parameter, v)?;
                solve_point(&p, &solver, opts.refine)
            })
            .collect()
    });

    let mut csv = format!("{SWEEP_HEADER}\n");
    for (v, r) in sweep.values.iter().zip(&results) {
        csv.push_str(&sweep_row(*v, r));
        csv.push('\n');
    }
    let stem = format!("{}_sweep_{}", cfg.stem(), sweep.parameter.name());
    let mut out = OutputDir::create(opts.out)?;
    out.write(&format!("{stem}.csv"), &csv)?;
    out.finish(&stem, manifest)?;
    print!("{csv}");

    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        return Err(CliError::Config(format!("sweep point failed: {e}")));
    }
    let all = results.iter().all(|r| matches!(r, Ok(p) if p.converged));
    Ok(if all { Outcome::Converged } else { Outcome::NotConverged })
}

/// Returns whether every check passed.
pub fn cmd_verify(suite: &str, seed: u64) -> Result<bool, CliError> {
    let suite: Suite = suite.parse()?;
    let checks = run_suite(suite, seed)?;
    let mut all = true;
    for c in &checks {
        all &= c.passed;
        println!(
            "{suite} {:<28} {}  margin {:.3e}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.margin
        );
    }
    println!(
        "{suite}: {}/{} passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    Ok(all)
}

/// Reads an `x,u` CSV on a uniform grid `x_j = -L + j dx`.
fn read_profile(path: &Path) -> Result<Field, CliError> {
    let text = fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = |name: &str| -> Result<f64, CliError> {
            cols.next()
                .ok_or_else(|| CliError::Config(format!("line {}: missing {name}", i + 1)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))
        };
        xs.push(next("x")?);
        us.push(next("u")?);
    }
    if xs.len() < 2 {
        return Err(CliError::Config("profile needs at least two rows".into()));
    }
    let dx = xs[1] - xs[0];
    let half = 0.5 * dx * xs.len() as f64;
    let grid = Grid::new(half, xs.len())?;
    let tol = 1e-9 * half;
    if let Some(j) = (0..xs.len()).find(|&j| (xs[j] - grid.point(j)).abs() > tol) {
        return Err(CliError::Config(format!(
            "x column is not the grid -L + j dx (row {j}: {} vs {})",
            xs[j],
            grid.point(j)
        )));
    }
    Ok(Field::new(&grid, us)?)
}

pub fn cmd_rearrange(input: &Path, out: &Path) -> Result<(), CliError> {
    let u = read_profile(input)?;
    let report = rearrangement_report(&u, None);
    let stem = input
        .file_stem()
        .map_or_else(|| "profile".to_string(), |s| s.to_string_lossy().into_owned());
    let mut csv = String::from("x,u,u_star\n");
    for ((x, a), b) in u.grid().points().zip(u.values()).zip(report.u_star.values()) {
        csv.push_str(&format!("{},{},{}\n", float(x), float(*a), float(*b)));
    }
    let mut dir = OutputDir::create(out)?;
    let path = dir.write(&format!("{stem}.rearranged.csv"), &csv)?;
    for (q, d) in &report.lp_drift {
        println!("L^{q} drift {d:.3e}");
    }
    println!("wrote {}", path.display());
    Ok(())
}
