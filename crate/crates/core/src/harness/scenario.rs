use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{lambda_star, InterfaceProblem, LAMBDA_SHARP};
use crate::sde::GaussianSampler;

/// Solution method under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    IfemBe,
    IfemCn,
    SdeEm,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::IfemBe => "ifem-be",
            Method::IfemCn => "ifem-cn",
            Method::SdeEm => "sde-em",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        match tag.trim().to_ascii_lowercase().as_str() {
            "ifem-be" | "be" => Some(Method::IfemBe),
            "ifem-cn" | "cn" => Some(Method::IfemCn),
            "sde-em" | "sde" | "em" => Some(Method::SdeEm),
            _ => None,
        }
    }

    /// Time-stepping parameter, `None` for the stochastic method.
    pub fn theta(self) -> Option<f64> {
        match self {
            Method::IfemBe => Some(1.0),
            Method::IfemCn => Some(0.5),
            Method::SdeEm => None,
        }
    }

    pub fn is_pde(self) -> bool {
        !matches!(self, Method::SdeEm)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// `Δt = coefficient · h^exponent` for the PDE ladders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    pub coefficient: f64,
    pub exponent: f64,
}

impl StepRule {
    pub const H_SQUARED: StepRule = StepRule { coefficient: 1.0, exponent: 2.0 };
    pub const QUARTER_H: StepRule = StepRule { coefficient: 0.25, exponent: 1.0 };

    pub fn dt(&self, h: f64) -> f64 {
        self.coefficient * h.powf(self.exponent)
    }

    pub fn default_for(method: Method) -> StepRule {
        match method {
            Method::IfemBe => StepRule::H_SQUARED,
            _ => StepRule::QUARTER_H,
        }
    }
}

/// Where the error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evaluation {
    /// Discrete L² norm over the mesh nodes in `[lo, hi]`, maximised over stored
    /// time levels. Only the output time is stored unless `all_levels` is set.
    Window { lo: f64, hi: f64, all_levels: bool },
    /// Absolute error of `u(T, x)`.
    Point { x: f64 },
}

impl Evaluation {
    pub const DEFAULT_WINDOW: Evaluation = Evaluation::Window { lo: -5.0, hi: 5.0, all_levels: false };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSettings {
    pub n_paths: u64,
    pub seed: u64,
    pub sampler: GaussianSampler,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        MonteCarloSettings { n_paths: 1_000_000, seed: 42, sampler: GaussianSampler::default() }
    }
}

/// One convergence experiment: a problem, a method and a refinement ladder.
///
/// `ladder` holds `h` values for the finite element methods and `Δt` values for
/// the stochastic one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub d_plus: f64,
    pub d_minus: f64,
    pub lambda: f64,
    pub final_time: f64,
    /// Half-width of the computational domain; the problem default when `None`.
    pub half_width: Option<f64>,
    pub method: Method,
    pub ladder: Vec<f64>,
    pub step_rule: StepRule,
    pub evaluation: Evaluation,
    pub monte_carlo: MonteCarloSettings,
}

pub const H_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// `T/2^4, …, T/2^9`.
pub fn dt_ladder(final_time: f64) -> Vec<f64> {
    (4..=9).map(|k| final_time / f64::from(1u32 << k)).collect()
}

pub const SDE_POINTS: [f64; 3] = [-1.5, 0.0, 2.5];

impl Scenario {
    /// PDE scenario on the default window with the method's default step rule.
    pub fn pde(id: impl Into<String>, d_plus: f64, d_minus: f64, lambda: f64, method: Method) -> Self {
        Scenario {
            id: id.into(),
            d_plus,
            d_minus,
            lambda,
            final_time: 0.2,
            half_width: None,
            method,
            ladder: H_LADDER.to_vec(),
            step_rule: StepRule::default_for(method),
            evaluation: Evaluation::DEFAULT_WINDOW,
            monte_carlo: MonteCarloSettings::default(),
        }
    }

    /// Monte Carlo scenario at a single point.
    pub fn sde(id: impl Into<String>, d_plus: f64, d_minus: f64, lambda: f64, x: f64) -> Self {
        Scenario {
            id: id.into(),
            d_plus,
            d_minus,
            lambda,
            final_time: 0.2,
            half_width: None,
            method: Method::SdeEm,
            ladder: dt_ladder(0.2),
            step_rule: StepRule::QUARTER_H,
            evaluation: Evaluation::Point { x },
            monte_carlo: MonteCarloSettings::default(),
        }
    }

    pub fn with_ladder(mut self, ladder: Vec<f64>) -> Self {
        self.ladder = ladder;
        self
    }

    pub fn with_monte_carlo(mut self, mc: MonteCarloSettings) -> Self {
        self.monte_carlo = mc;
        self
    }

    pub fn problem(&self) -> Result<InterfaceProblem> {
        let p = InterfaceProblem::new(self.d_plus, self.d_minus, self.lambda, self.final_time)?;
        match self.half_width {
            Some(l) => p.with_half_width(l),
            None => Ok(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        if self.ladder.len() < 3 {
            return Err(Error::invalid(format!(
                "resolution ladder needs at least 3 entries, got {}",
                self.ladder.len()
            )));
        }
        if self.ladder.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::invalid("resolution ladder entries must be positive"));
        }
        if self.ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("resolution ladder must be strictly decreasing"));
        }
        match (self.method.is_pde(), self.evaluation) {
            (true, Evaluation::Window { lo, hi, .. }) => {
                if !(lo < hi) {
                    return Err(Error::invalid(format!("empty error window [{lo}, {hi}]")));
                }
            }
            (false, Evaluation::Point { x }) => {
                if !x.is_finite() {
                    return Err(Error::invalid("evaluation point is not finite"));
                }
            }
            (true, _) => return Err(Error::invalid("finite element studies need a window evaluation")),
            (false, _) => return Err(Error::invalid("Monte Carlo studies need a point evaluation")),
        }
        if self.method == Method::SdeEm && self.monte_carlo.n_paths == 0 {
            return Err(Error::invalid("n_paths must be at least 1"));
        }
        Ok(())
    }
}

fn lambda_tag(d_plus: f64, d_minus: f64, lambda: f64) -> &'static str {
    if lambda == LAMBDA_SHARP {
        "sharp"
    } else if lambda == lambda_star(d_plus, d_minus) {
        "star"
    } else {
        "custom"
    }
}

/// The four `(D⁺, λ)` pairs of the convergence studies, `D⁻ = 1`.
pub fn study_parameters() -> [(f64, f64); 4] {
    [
        (10.0, LAMBDA_SHARP),
        (10.0, lambda_star(10.0, 1.0)),
        (100.0, LAMBDA_SHARP),
        (100.0, lambda_star(100.0, 1.0)),
    ]
}

pub fn pde_scenarios(method: Method) -> Vec<Scenario> {
    study_parameters()
        .iter()
        .map(|&(dp, lam)| {
            let id = format!("{}-d{}-{}", method.tag(), dp, lambda_tag(dp, 1.0, lam));
            Scenario::pde(id, dp, 1.0, lam, method)
        })
        .collect()
}

pub fn sde_scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for &(dp, lam) in &study_parameters() {
        for &x in &SDE_POINTS {
            let id = format!("sde-em-d{}-{}-x{}", dp, lambda_tag(dp, 1.0, lam), x);
            out.push(Scenario::sde(id, dp, 1.0, lam, x));
        }
    }
    out
}

/// Named scenario groups: `ifem-be`, `ifem-cn`, `sde-em` and `pde` (both finite
/// element groups). A `-d10` or `-d100` suffix keeps only `D⁺ = 10` or `D⁺ = 100`.
pub fn preset(name: &str) -> Result<Vec<Scenario>> {
    let (group, d_plus) = if let Some(g) = name.strip_suffix("-d100") {
        (g, Some(100.0))
    } else if let Some(g) = name.strip_suffix("-d10") {
        (g, Some(10.0))
    } else {
        (name, None)
    };
    let all = match group {
        "ifem-be" => pde_scenarios(Method::IfemBe),
        "ifem-cn" => pde_scenarios(Method::IfemCn),
        "sde-em" => sde_scenarios(),
        "pde" => {
            let mut v = pde_scenarios(Method::IfemBe);
            v.extend(pde_scenarios(Method::IfemCn));
            v
        }
        _ => return Err(Error::invalid(format!("unknown preset '{name}'"))),
    };
    Ok(match d_plus {
        Some(dp) => all.into_iter().filter(|s| s.d_plus == dp).collect(),
        None => all,
    })
}

pub const PRESET_NAMES: [&str; 12] = [
    "ifem-be", "ifem-be-d10", "ifem-be-d100", "ifem-cn", "ifem-cn-d10", "ifem-cn-d100", "sde-em",
    "sde-em-d10", "sde-em-d100", "pde", "pde-d10", "pde-d100",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        let l = dt_ladder(0.2);
        assert_eq!(l.len(), 6);
        assert_eq!(l[0], 0.2 / 16.0);
        assert_eq!(l[5], 0.2 / 512.0);
    }

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            let s = preset(name).unwrap();
            assert!(!s.is_empty(), "{name}");
            for sc in &s {
                sc.validate().unwrap();
            }
        }
        assert_eq!(preset("ifem-be").unwrap().len(), 4);
        assert_eq!(preset("ifem-cn-d100").unwrap().len(), 2);
        assert_eq!(preset("sde-em").unwrap().len(), 12);
        assert!(preset("ifem-xx").is_err());
        let ids: Vec<String> = preset("ifem-be-d10").unwrap().into_iter().map(|s| s.id).collect();
        assert_eq!(ids, ["ifem-be-d10-sharp", "ifem-be-d10-star"]);
    }

    #[test]
    fn ladder_invariants() {
        let s = Scenario::pde("x", 10.0, 1.0, 0.5, Method::IfemBe);
        assert!(s.clone().with_ladder(vec![0.2, 0.1]).validate().is_err());
        assert!(s.clone().with_ladder(vec![0.2, 0.1, 0.1]).validate().is_err());
        assert!(s.clone().with_ladder(vec![0.1, 0.2, 0.05]).validate().is_err());
        let mut bad = s.clone();
        bad.evaluation = Evaluation::Window { lo: 1.0, hi: 1.0, all_levels: false };
        assert!(bad.validate().is_err());
        let mut wrong = s;
        wrong.evaluation = Evaluation::Point { x: 0.0 };
        assert!(wrong.validate().is_err());
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [Method::IfemBe, Method::IfemCn, Method::SdeEm] {
            assert_eq!(Method::from_tag(m.tag()), Some(m));
        }
        assert_eq!(Method::from_tag("nope"), None);
    }
}
