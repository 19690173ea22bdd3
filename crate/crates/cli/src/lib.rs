//! Command-line front end: argument and config parsing plus the four commands.

pub mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};
use skewdiff::harness::{
    dt_ladder, preset, run_studies, summary_json, write_csv, ConvergenceReport, Method,
    MonteCarloSettings, Scenario,
};
use skewdiff::ifem::{evaluate_uh, theta_scheme_solve_with, IfeSystem, Mesh1D, Record};
use skewdiff::oracle::ExactSolution;
use skewdiff::sde::{monte_carlo_estimate, SimConfig};
use skewdiff::{Execution, InterfaceProblem};

pub use config::{parse_config, parse_config_text, resolve, CommandKind, Flags, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or configuration.
    #[error("{0}")]
    Usage(String),
    /// A computation failed.
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
    /// `--help` or `--version`; the text goes to stdout.
    #[error("{0}")]
    Info(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Info(_) => 0,
            CliError::Numeric(_) => 1,
            CliError::Io(_) => 2,
            CliError::Usage(_) => 64,
        }
    }

    pub(crate) fn from_clap(e: clap::Error) -> Self {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<skewdiff::Error> for CliError {
    fn from(e: skewdiff::Error) -> Self {
        match e.root() {
            skewdiff::Error::Io(_) => CliError::Io(e.to_string()),
            _ if e.is_input_error() => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// What a command produced: a summary line, a table and a JSON document.
struct Output {
    summary: String,
    csv: String,
    json: Value,
}

/// Runs the command described by `cfg`, printing its summary and writing any files.
pub fn dispatch(cfg: &RunConfig) -> Result<(), CliError> {
    let exec = Execution::from_env();
    let started = Instant::now();
    let out = match cfg.command {
        CommandKind::SolvePde => solve_pde(cfg)?,
        CommandKind::SimulateSde => simulate_sde(cfg, exec)?,
        CommandKind::Exact => exact(cfg)?,
        CommandKind::Converge => converge(cfg, exec)?,
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    if cfg.timing {
        println!("{} [{wall_ms:.0} ms]", out.summary);
    } else {
        println!("{}", out.summary);
    }
    if let Some(path) = &cfg.out {
        let mut json = out.json;
        if cfg.timing {
            json["wall-ms"] = json!(wall_ms);
        }
        write_file(path, out.csv.as_bytes())?;
        let text = serde_json::to_string_pretty(&json).expect("JSON values always serialize");
        write_file(&json_path(path), format!("{text}\n").as_bytes())?;
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(args).and_then(|cfg| dispatch(&cfg));
    match result {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("skewdiff: {}", text.trim_end());
            if let CliError::Usage(_) = e {
                if !text.contains("Usage:") {
                    eprintln!("Usage: skewdiff <solve-pde|simulate-sde|exact|converge> [OPTIONS]");
                }
            }
            e.exit_code()
        }
    }
}

/// `out.csv` → `out.json`.
pub fn json_path(out: &Path) -> PathBuf {
    let p = out.with_extension("json");
    if p == out {
        out.with_extension("summary.json")
    } else {
        p
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(bytes).map_err(io)?;
    w.flush().map_err(io)
}

fn problem_json(cfg: &RunConfig, problem: &InterfaceProblem) -> Value {
    json!({
        "D_plus": problem.d_plus,
        "D_minus": problem.d_minus,
        "lambda": problem.lambda,
        "T": problem.final_time,
        "L": problem.half_width,
        "command": cfg.command.name(),
    })
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn solve_pde(cfg: &RunConfig) -> Result<Output, CliError> {
    let problem = cfg.problem.problem()?;
    let mesh = Mesh1D::with_spacing(problem.half_width, cfg.method.h)?;
    let system = Arc::new(IfeSystem::new(mesh, problem.symmetrize())?);
    let sol = theta_scheme_solve_with(&problem, system, cfg.method.theta, cfg.pde_dt(), Record::Final)?;
    let oracle = ExactSolution::new(&problem);
    let last = sol.levels.len() - 1;

    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut max_err: f64 = 0.0;
    for &x in &cfg.points {
        let uh = evaluate_uh(&sol, last, x)?;
        let u = oracle.value(problem.final_time, x)?;
        max_err = max_err.max((uh - u).abs());
        rows.push(vec![x.to_string(), uh.to_string(), u.to_string(), (uh - u).to_string()]);
        values.push(json!({"x": x, "u_h": uh, "exact": u, "error": uh - u}));
    }
    let mut json = problem_json(cfg, &problem);
    json["theta"] = json!(sol.theta);
    json["h"] = json!(sol.system.mesh.h);
    json["dt"] = json!(sol.dt);
    json["steps"] = json!(sol.steps);
    json["values"] = Value::Array(values);
    Ok(Output {
        summary: format!(
            "solve-pde D+={} D-={} lambda={:.6} theta={} h={} dt={:.3e} steps={}: max |u_h - u| = {max_err:.3e}",
            problem.d_plus, problem.d_minus, problem.lambda, sol.theta, sol.system.mesh.h, sol.dt, sol.steps
        ),
        csv: csv_table(&["x", "u_h", "exact", "error"], &rows),
        json,
    })
}

fn simulate_sde(cfg: &RunConfig, exec: Execution) -> Result<Output, CliError> {
    let problem = cfg.problem.problem()?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut first = None;
    for &x in &cfg.points {
        let sim = SimConfig::with_dt(problem.final_time, cfg.sde_dt(), cfg.method.n_paths, cfg.method.seed, x)?;
        let est = monte_carlo_estimate(&problem, &sim, exec)?;
        first.get_or_insert(est);
        rows.push(vec![
            x.to_string(),
            est.mean.to_string(),
            est.std_error.to_string(),
            est.n_paths.to_string(),
            est.seed.to_string(),
            est.delta_t.to_string(),
        ]);
        values.push(json!(est));
    }
    let est = first.expect("at least one point");
    let mut json = problem_json(cfg, &problem);
    json["estimates"] = Value::Array(values);
    Ok(Output {
        summary: format!(
            "simulate-sde D+={} D-={} lambda={:.6} dt={:.3e} paths={}: u({}, {}) ~ {:.6} +/- {:.2e}{}",
            problem.d_plus,
            problem.d_minus,
            problem.lambda,
            est.delta_t,
            est.n_paths,
            problem.final_time,
            est.x0,
            est.mean,
            est.std_error,
            if cfg.points.len() > 1 { format!(" (+{} more points)", cfg.points.len() - 1) } else { String::new() }
        ),
        csv: csv_table(&["x", "mean", "std_error", "n_paths", "seed", "dt"], &rows),
        json,
    })
}

fn exact(cfg: &RunConfig) -> Result<Output, CliError> {
    let problem = cfg.problem.problem()?;
    let oracle = ExactSolution::new(&problem);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &x in &cfg.points {
        let u = oracle.value(cfg.t, x)?;
        rows.push(vec![cfg.t.to_string(), x.to_string(), u.to_string()]);
        values.push(json!({"t": cfg.t, "x": x, "u": u}));
    }
    let shown: Vec<String> = rows
        .iter()
        .map(|r| format!("u({}, {}) = {}", r[0], r[1], r[2]))
        .collect();
    let mut json = problem_json(cfg, &problem);
    json["values"] = Value::Array(values);
    Ok(Output {
        summary: format!(
            "exact D+={} D-={} lambda={:.6}: {}",
            problem.d_plus,
            problem.d_minus,
            problem.lambda,
            shown.join(", ")
        ),
        csv: csv_table(&["t", "x", "u"], &rows),
        json,
    })
}

/// Scenarios for `converge`: the preset when given, otherwise one built from the flags.
pub fn converge_scenarios(cfg: &RunConfig) -> Result<Vec<Scenario>, CliError> {
    if let Some(name) = &cfg.preset {
        return Ok(preset(name)?);
    }
    let p = &cfg.problem;
    let method = cfg.method.method.unwrap_or(if cfg.method.theta == 1.0 { Method::IfemBe } else { Method::IfemCn });
    let base = format!("{}-dp{}-dm{}-l{:.4}", method.tag(), p.d_plus, p.d_minus, p.lambda);
    let finish = |mut s: Scenario| {
        s.final_time = p.final_time;
        s.half_width = p.half_width;
        s
    };
    Ok(match method {
        Method::SdeEm => cfg
            .points
            .iter()
            .map(|&x| {
                finish(Scenario::sde(format!("{base}-x{x}"), p.d_plus, p.d_minus, p.lambda, x))
                    .with_ladder(dt_ladder(p.final_time))
                    .with_monte_carlo(MonteCarloSettings {
                        n_paths: cfg.method.n_paths,
                        seed: cfg.method.seed,
                        ..MonteCarloSettings::default()
                    })
            })
            .collect(),
        _ => vec![finish(Scenario::pde(base, p.d_plus, p.d_minus, p.lambda, method))],
    })
}

fn converge(cfg: &RunConfig, exec: Execution) -> Result<Output, CliError> {
    let scenarios = converge_scenarios(cfg)?;
    let reports: Vec<ConvergenceReport> =
        run_studies(&scenarios, exec).into_iter().collect::<Result<_, _>>()?;
    let mut csv = Vec::new();
    write_csv(&reports, &mut csv, cfg.timing)?;
    let slopes: Vec<String> = reports
        .iter()
        .map(|r| match r.slope() {
            Some(s) => format!("{} slope {s:.3}", r.scenario.id),
            None => format!("{} slope n/a", r.scenario.id),
        })
        .collect();
    Ok(Output {
        summary: format!("converge: {}", slopes.join("; ")),
        csv: String::from_utf8(csv).expect("CSV output is UTF-8"),
        json: summary_json(&reports, cfg.timing),
    })
}
