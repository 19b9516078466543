//! TOML run configuration.

use serde::Deserialize;

use lwnls::problem::Table;
use lwnls::solver::{Preconditioner, SolverConfig, Start, StepRule};
use lwnls::{FractionalOrder, Grid, Nonlinearity, Potential, PotentialFlags, Problem};

use crate::CliError;

// Sample count for the hypothesis validators.
const VALIDATION_SAMPLES: usize = 400;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_tag")]
    pub tag: String,
    pub alpha: f64,
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub nonlinearity: NonlinearityConfig,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub solver: SolverSection,
    pub sweep: Option<SweepConfig>,
}

fn default_tag() -> String {
    "run".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub kind: NonlinearityKind,
    pub p: Option<f64>,
    pub p0: f64,
    pub theta: Option<f64>,
    pub xi: Option<Vec<f64>>,
    pub f: Option<Vec<f64>>,
    pub df: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearityKind {
    Power,
    Table,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub expr: Option<String>,
    pub t: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    #[serde(rename = "V0")]
    pub v0: f64,
    #[serde(rename = "Vinf")]
    pub v_inf: f64,
    #[serde(default)]
    pub flags: FlagsConfig,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsConfig {
    #[serde(default)]
    pub radial_increasing: bool,
    #[serde(default)]
    pub below_v_inf: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step: StepKind,
    pub tau: f64,
    pub beta: f64,
    pub c1: f64,
    pub start: StartKind,
    pub center: f64,
    pub width: f64,
    pub preconditioner: PreconditionerKind,
    pub seed: u64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-6,
            step: StepKind::Backtracking,
            tau: 0.1,
            beta: 0.5,
            c1: 1e-4,
            start: StartKind::Gaussian,
            center: 0.0,
            width: 1.0,
            preconditioner: PreconditionerKind::Sobolev,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Fixed,
    Backtracking,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartKind {
    Gaussian,
    Random,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionerKind {
    Sobolev,
    Identity,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Shift `V + ε` (floor and asymptote shifted alike).
    Epsilon,
    Alpha,
    #[serde(rename = "L")]
    HalfLength,
    #[serde(rename = "N")]
    Points,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Epsilon => "epsilon",
            SweepParameter::Alpha => "alpha",
            SweepParameter::HalfLength => "L",
            SweepParameter::Points => "N",
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Base name `{tag}_{alpha}_{N}` for output files.
    pub fn stem(&self) -> String {
        format!("{}_{}_{}", self.tag, self.alpha, self.n)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            max_iters: s.max_iters,
            grad_tol: s.grad_tol,
            step_rule: match s.step {
                StepKind::Fixed => StepRule::Fixed { tau: s.tau },
                StepKind::Backtracking => StepRule::Backtracking { beta: s.beta, c1: s.c1 },
            },
            seed: s.seed,
            start: match s.start {
                StartKind::Gaussian => Start::GaussianBump {
                    center: s.center,
                    width: s.width,
                },
                StartKind::Random => Start::Random,
            },
            preconditioner: match s.preconditioner {
                PreconditionerKind::Sobolev => Preconditioner::Sobolev,
                PreconditionerKind::Identity => Preconditioner::Identity,
            },
        }
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, CliError> {
        let c = &self.nonlinearity;
        let f = match c.kind {
            NonlinearityKind::Power => {
                let p =
                    c.p.ok_or_else(|| CliError::Config("power nonlinearity needs p".into()))?;
                let f = Nonlinearity::power(p, c.p0)?;
                match c.theta {
                    Some(t) => f.with_theta(t),
                    None => f,
                }
            }
            NonlinearityKind::Table => {
                let (Some(xi), Some(f), Some(df)) = (c.xi.clone(), c.f.clone(), c.df.clone()) else {
                    return Err(CliError::Config("table nonlinearity needs xi, f and df".into()));
                };
                let theta = c
                    .theta
                    .ok_or_else(|| CliError::Config("table nonlinearity needs theta".into()))?;
                Nonlinearity::tabulated(Table::new(xi, f, df)?, theta, c.p0)?
            }
        };
        Ok(f)
    }

    pub fn potential(&self) -> Result<Potential, CliError> {
        let c = &self.potential;
        let flags = PotentialFlags {
            radial_increasing: c.flags.radial_increasing,
            below_v_inf: c.flags.below_v_inf,
        };
        match (&c.expr, &c.t, &c.v) {
            (Some(e), None, None) => Ok(Potential::from_expr(e, c.v0, c.v_inf, flags)?),
            (None, Some(t), Some(v)) => Ok(Potential::from_table(t.clone(), v.clone(), c.v0, c.v_inf, flags)?),
            _ => Err(CliError::Config("potential needs either expr or both t and v".into())),
        }
    }

    /// Builds and validates the problem.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let p = Problem::new(
            FractionalOrder::new(self.alpha)?,
            Grid::new(self.half_length, self.n)?,
            self.nonlinearity()?,
            self.potential()?,
        );
        p.validate(VALIDATION_SAMPLES)?;
        self.solver_config().validate()?;
        Ok(p)
    }

    /// The configuration with one sweep parameter replaced.
    pub fn with_parameter(&self, param: SweepParameter, value: f64) -> Result<Self, CliError> {
        let mut c = self.clone();
        match param {
            SweepParameter::Epsilon => {}
            SweepParameter::Alpha => c.alpha = value,
            SweepParameter::HalfLength => c.half_length = value,
            SweepParameter::Points => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(CliError::Config(format!("N must be a whole number, got {value}")));
                }
                c.n = value as usize;
            }
        }
        Ok(c)
    }

    /// Problem for one sweep point; `ε` shifts the potential.
    pub fn sweep_problem(&self, param: SweepParameter, value: f64) -> Result<Problem, CliError> {
        let c = self.with_parameter(param, value)?;
        let p = c.problem()?;
        if param == SweepParameter::Epsilon {
            let shifted = p.with_potential(p.potential().shifted(value));
            shifted.validate(VALIDATION_SAMPLES)?;
            return Ok(shifted);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANONICAL: &str = r#"
        tag = "canonical"
        alpha = 0.75
        L = 20.0
        N = 1024
        [nonlinearity]
        kind = "power"
        p = 3.0
        p0 = 3.5
        [potential]
        expr = "1"
        V0 = 1.0
        Vinf = 1.0
        flags = { radial_increasing = true }
    "#;

    #[test]
    fn parses_canonical() {
        let c = RunConfig::parse(CANONICAL).unwrap();
        assert_eq!(c.stem(), "canonical_0.75_1024");
        let p = c.problem().unwrap();
        assert_eq!(p.grid().len(), 1024);
        assert_eq!(p.nonlinearity().theta(), 4.0);
        assert!(p.potential().flags().radial_increasing);
        assert_eq!(c.solver_config(), SolverConfig::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_potential() {
        assert!(RunConfig::parse(&format!("{CANONICAL}\nextra = 1")).is_err());
        let both = CANONICAL.replace("expr = \"1\"", "expr = \"1\"\nt = [0.0, 1.0]\nv = [1.0, 1.0]");
        assert!(RunConfig::parse(&both).unwrap().potential().is_err());
    }

    #[test]
    fn validation_names_hypothesis() {
        let bad = CANONICAL.replace("p = 3.0", "p = 1.0");
        let err = RunConfig::parse(&bad).unwrap().problem().unwrap_err();
        assert!(err.to_string().contains("(f1)"), "{err}");
    }

    #[test]
    fn table_potential_and_nonlinearity() {
        let text = CANONICAL
            .replace("expr = \"1\"", "t = [0.0, 1.0]\nv = [1.0, 1.0]")
            .replace(
                "kind = \"power\"\n        p = 3.0",
                "kind = \"table\"\ntheta = 4.0\nxi = [0.0, 1.0, 2.0]\nf = [0.0, 1.0, 8.0]\ndf = [0.0, 3.0, 12.0]",
            );
        let c = RunConfig::parse(&text).unwrap();
        let p = c.problem().unwrap();
        assert!((p.nonlinearity().f(1.5) - 3.375).abs() < 1e-12);
    }

    #[test]
    fn sweep_points() {
        let c = RunConfig::parse(CANONICAL).unwrap();
        assert_eq!(c.with_parameter(SweepParameter::Points, 512.0).unwrap().n, 512);
        assert!(c.with_parameter(SweepParameter::Points, 512.5).is_err());
        let p = c.sweep_problem(SweepParameter::Epsilon, 0.5).unwrap();
        assert_eq!(p.potential().v_inf(), 1.5);
    }
}
