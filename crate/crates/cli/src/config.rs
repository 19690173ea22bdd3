use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use skewdiff::harness::{Method, PRESET_NAMES, SDE_POINTS};
use skewdiff::problem::{lambda_star, InterfaceProblem, LAMBDA_SHARP};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    SolvePde,
    SimulateSde,
    Exact,
    Converge,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::SolvePde => "solve-pde",
            CommandKind::SimulateSde => "simulate-sde",
            CommandKind::Exact => "exact",
            CommandKind::Converge => "converge",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Immersed finite element solve with the θ-scheme
    SolvePde,
    /// Euler–Maruyama Monte Carlo estimate of u(T, x)
    SimulateSde,
    /// Reference solution by quadrature against the transition density
    Exact,
    /// Convergence study against the reference solution
    Converge,
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::SolvePde => CommandKind::SolvePde,
            Command::SimulateSde => CommandKind::SimulateSde,
            Command::Exact => CommandKind::Exact,
            Command::Converge => CommandKind::Converge,
        }
    }
}

/// `λ` as a number or one of the named choices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Value(f64),
    /// `D⁺/(D⁺ + D⁻)`, continuity of flux
    Star,
    /// `1/2`, continuity of derivatives
    Sharp,
}

impl LambdaSpec {
    pub fn resolve(self, d_plus: f64, d_minus: f64) -> f64 {
        match self {
            LambdaSpec::Value(v) => v,
            LambdaSpec::Star => lambda_star(d_plus, d_minus),
            LambdaSpec::Sharp => LAMBDA_SHARP,
        }
    }
}

impl FromStr for LambdaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "lambda-star" | "star" => Ok(LambdaSpec::Star),
            "lambda-sharp" | "sharp" => Ok(LambdaSpec::Sharp),
            other => other.parse::<f64>().map(LambdaSpec::Value).map_err(|_| {
                format!("'{other}' is neither a number nor one of lambda-star, lambda-sharp")
            }),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(LambdaSpec::Value(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Comma-separated list of evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointList(pub Vec<f64>);

impl FromStr for PointList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{}' is not a number", p.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(PointList)
    }
}

impl<'de> Deserialize<'de> for PointList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(PointList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Path counts may be written as `1000000` or `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("'{s}' is not a nonnegative integer")),
    }
}

/// Every option, from the command line or from a config file. Keys in the file
/// are the flag names without the leading dashes.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Diffusion coefficient right of the interface
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dplus: Option<f64>,
    /// Diffusion coefficient left of the interface
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dminus: Option<f64>,
    /// Interface parameter: a number in (0, 1), lambda-star or lambda-sharp
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<LambdaSpec>,
    /// Final time
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    #[serde(rename = "T")]
    pub final_time: Option<f64>,
    /// Half-width of the computational domain (chosen from D and T when absent)
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    /// θ of the time stepping: 1 backward Euler, 0.5 Crank–Nicolson
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Mesh spacing
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Time step
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Number of Monte Carlo paths
    #[arg(long, global = true, value_parser = parse_count)]
    pub paths: Option<u64>,
    /// Random seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated evaluation points
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub points: Option<PointList>,
    /// Evaluation time for `exact` (defaults to T)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Single evaluation point
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Method for `converge`: ifem-be, ifem-cn or sde-em
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// Named scenario group for `converge`
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output file; a JSON summary is written next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave timings out of every output
    #[arg(long = "no-timing", global = true)]
    #[serde(rename = "no-timing", default)]
    pub no_timing: bool,
    /// Flat key = value file with defaults for any of these flags
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Command, for config files only
    #[arg(skip)]
    pub command: Option<CommandKind>,
}

impl Flags {
    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: Flags) -> Flags {
        Flags {
            dplus: self.dplus.or(base.dplus),
            dminus: self.dminus.or(base.dminus),
            lambda: self.lambda.or(base.lambda),
            final_time: self.final_time.or(base.final_time),
            half_width: self.half_width.or(base.half_width),
            theta: self.theta.or(base.theta),
            h: self.h.or(base.h),
            dt: self.dt.or(base.dt),
            paths: self.paths.or(base.paths),
            seed: self.seed.or(base.seed),
            points: self.points.or(base.points),
            t: self.t.or(base.t),
            x: self.x.or(base.x),
            method: self.method.or(base.method),
            preset: self.preset.or(base.preset),
            out: self.out.or(base.out),
            no_timing: self.no_timing || base.no_timing,
            config: self.config.or(base.config),
            command: self.command.or(base.command),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "skewdiff", version, about = "Diffusion across an interface with a flux-jump condition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemBlock {
    pub d_plus: f64,
    pub d_minus: f64,
    pub lambda: f64,
    pub final_time: f64,
    pub half_width: Option<f64>,
}

impl ProblemBlock {
    pub fn problem(&self) -> skewdiff::Result<InterfaceProblem> {
        let p = InterfaceProblem::new(self.d_plus, self.d_minus, self.lambda, self.final_time)?;
        match self.half_width {
            Some(l) => p.with_half_width(l),
            None => Ok(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodBlock {
    pub method: Option<Method>,
    pub theta: f64,
    pub h: f64,
    /// `None` picks `h²` for backward Euler, `h/4` otherwise, and `T/512` for Monte Carlo.
    pub dt: Option<f64>,
    pub n_paths: u64,
    pub seed: u64,
}

/// Fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub problem: ProblemBlock,
    pub method: MethodBlock,
    pub points: Vec<f64>,
    pub t: f64,
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

impl RunConfig {
    pub fn pde_dt(&self) -> f64 {
        let h = self.method.h;
        self.method.dt.unwrap_or(if self.method.theta == 1.0 { h * h } else { h / 4.0 })
    }

    pub fn sde_dt(&self) -> f64 {
        self.method.dt.unwrap_or(self.problem.final_time / 512.0)
    }
}

pub fn parse_config_text(text: &str) -> Result<Flags, CliError> {
    toml::from_str::<Flags>(text).map_err(|e| CliError::Usage(format!("config file: {}", e.message())))
}

/// Parses command-line arguments (program name first), merging in `--config`.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::from_clap)?;
    let mut flags = cli.flags;
    if let Some(cmd) = &cli.command {
        flags.command = Some(cmd.kind());
    }
    if let Some(path) = flags.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        flags = flags.over(parse_config_text(&text)?);
    }
    resolve(flags)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

/// Fills defaults and validates.
pub fn resolve(flags: Flags) -> Result<RunConfig, CliError> {
    let command = flags.command.ok_or_else(|| CliError::Usage("missing required field 'command'".into()))?;
    let d_plus = positive("dplus", flags.dplus.unwrap_or(10.0))?;
    let d_minus = positive("dminus", flags.dminus.unwrap_or(1.0))?;
    let lambda = flags.lambda.unwrap_or(LambdaSpec::Sharp).resolve(d_plus, d_minus);
    let final_time = positive("T", flags.final_time.unwrap_or(0.2))?;
    let problem = ProblemBlock { d_plus, d_minus, lambda, final_time, half_width: flags.half_width };
    problem.problem().map_err(|e| CliError::Usage(e.to_string()))?;

    let method = match &flags.method {
        Some(tag) => Some(
            Method::from_tag(tag)
                .ok_or_else(|| CliError::Usage(format!("unknown method '{tag}' (ifem-be, ifem-cn, sde-em)")))?,
        ),
        None => None,
    };
    let theta = flags.theta.or(method.and_then(Method::theta)).unwrap_or(0.5);
    if !(0.0..=1.0).contains(&theta) {
        return Err(CliError::Usage(format!("--theta must lie in [0, 1], got {theta}")));
    }
    let h = positive("h", flags.h.unwrap_or(0.025))?;
    let dt = flags.dt.map(|v| positive("dt", v)).transpose()?;
    let n_paths = flags.paths.unwrap_or(1_000_000);
    if n_paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    let seed = flags.seed.unwrap_or(42);

    let points = match (flags.points, flags.x) {
        (Some(PointList(p)), Some(x)) => {
            let mut p = p;
            p.push(x);
            p
        }
        (Some(PointList(p)), None) => p,
        (None, Some(x)) => vec![x],
        (None, None) if command == CommandKind::Exact => {
            return Err(CliError::Usage("missing required field 'x' (or 'points')".into()))
        }
        (None, None) => SDE_POINTS.to_vec(),
    };
    if points.is_empty() || points.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage("--points needs at least one finite number".into()));
    }
    let t = flags.t.unwrap_or(final_time);
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::Usage(format!("--t must be nonnegative, got {t}")));
    }
    if let Some(name) = &flags.preset {
        if !PRESET_NAMES.contains(&name.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown preset '{name}' (one of {})",
                PRESET_NAMES.join(", ")
            )));
        }
    }

    Ok(RunConfig {
        command,
        problem,
        method: MethodBlock { method, theta, h, dt, n_paths, seed },
        points,
        t,
        preset: flags.preset,
        out: flags.out,
        timing: !flags.no_timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_config(std::iter::once("skewdiff").chain(args.iter().copied()))
    }

    #[test]
    fn lambda_star_resolves() {
        let c = parse(&["converge", "--dplus", "10", "--lambda", "lambda-star", "--method", "ifem-cn"]).unwrap();
        assert_eq!(c.problem.lambda, 10.0 / 11.0);
        assert_eq!(c.method.method, Some(Method::IfemCn));
        assert_eq!(c.method.theta, 0.5);
        assert_eq!(parse(&["exact", "--x", "0", "--lambda", "lambda-sharp"]).unwrap().problem.lambda, 0.5);
    }

    #[test]
    fn lambda_out_of_range_rejected() {
        assert!(matches!(parse(&["exact", "--x", "0", "--lambda", "1.5"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["exact", "--x", "0", "--lambda", "nope"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_command_is_usage_error() {
        assert!(matches!(parse(&[]), Err(CliError::Usage(_))));
        let e = parse(&["exact"]).unwrap_err();
        assert!(e.to_string().contains("'x'"), "{e}");
    }

    #[test]
    fn negative_values_and_lists() {
        let c = parse(&["simulate-sde", "--points", "-1.5,0,2.5", "--paths", "1e4"]).unwrap();
        assert_eq!(c.points, vec![-1.5, 0.0, 2.5]);
        assert_eq!(c.method.n_paths, 10_000);
        let c = parse(&["exact", "--x", "-0.5"]).unwrap();
        assert_eq!(c.points, vec![-0.5]);
    }

    #[test]
    fn config_text_and_overrides() {
        let file = parse_config_text(
            "command = \"simulate-sde\"\ndplus = 100\nlambda = \"lambda-star\"\npoints = [-1.5, 2.5]\nno-timing = true\nT = 0.1\n",
        )
        .unwrap();
        let flags = Flags { dplus: Some(10.0), ..Default::default() };
        let c = resolve(flags.over(file)).unwrap();
        assert_eq!(c.command, CommandKind::SimulateSde);
        assert_eq!(c.problem.d_plus, 10.0);
        assert_eq!(c.problem.lambda, 10.0 / 11.0);
        assert_eq!(c.problem.final_time, 0.1);
        assert_eq!(c.points, vec![-1.5, 2.5]);
        assert!(!c.timing);
    }

    #[test]
    fn unknown_config_key_named() {
        let e = parse_config_text("dplus = 10\nbogus = 3\n").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        assert!(parse_config_text("[table]\nx = 1\n").is_err());
    }

    #[test]
    fn default_steps() {
        let be = parse(&["solve-pde", "--theta", "1", "--h", "0.1"]).unwrap();
        assert!((be.pde_dt() - 0.01).abs() < 1e-15);
        let cn = parse(&["solve-pde", "--h", "0.1"]).unwrap();
        assert_eq!(cn.pde_dt(), 0.025);
        assert_eq!(cn.sde_dt(), 0.2 / 512.0);
    }
}
