//! JSON configuration documents. Every object rejects unknown keys.

use std::fmt;
use std::path::Path;

use minimax_core::problems::{self, ProblemSpec, QuadraticScsc};
use minimax_core::report::EtaChoice;
use minimax_core::{ConstantsMode, ConstraintSet, MinimaxProblem, SolverOptions};
use serde::{Deserialize, Serialize};

/// A configuration that cannot be run as written.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<minimax_core::Error> for ConfigError {
    fn from(e: minimax_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    WholeSpace { dim: usize },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Simplex { dim: usize },
}

impl SetConfig {
    pub fn build(&self) -> Result<ConstraintSet, ConfigError> {
        Ok(match self {
            SetConfig::WholeSpace { dim } => ConstraintSet::whole_space(*dim)?,
            SetConfig::Box { lower, upper } => ConstraintSet::boxed(lower.clone(), upper.clone())?,
            SetConfig::Ball { center, radius } => ConstraintSet::ball(center.clone(), *radius)?,
            SetConfig::Simplex { dim } => ConstraintSet::simplex(*dim)?,
        })
    }
}

fn default_coupling() -> f64 {
    0.5
}

/// One problem instance. Matrices are row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// `x'Px/2 + x'Ay - y'Qy/2 + b'x + c'y`
    QuadraticScsc {
        dim_x: usize,
        dim_y: usize,
        p: Vec<f64>,
        a: Vec<f64>,
        q: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        set_x: SetConfig,
        set_y: SetConfig,
    },
    /// Random rotation of a quadratic with the requested condition numbers.
    RandomQuadratic {
        dim_x: usize,
        dim_y: usize,
        kappa_x: f64,
        kappa_y: f64,
        #[serde(default = "default_coupling")]
        coupling: f64,
        seed: u64,
    },
    /// Two-by-two diagonal quadratic with `ell = 1` and exact condition numbers.
    DiagonalQuadratic {
        kappa_x: f64,
        kappa_y: f64,
        #[serde(default = "default_coupling")]
        coupling: f64,
        #[serde(default)]
        seed: u64,
    },
    BilinearSimplex { m: usize, n: usize, a: Vec<f64> },
    SccBilinear { mu_x: f64, b: Vec<f64>, m: usize, n: usize, a: Vec<f64>, diameter: f64 },
    NcScSin { dim: usize, mu_y: f64, r: f64 },
    NcCToy { dim: usize, r: f64 },
}

impl ProblemConfig {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemConfig::QuadraticScsc { .. } | ProblemConfig::RandomQuadratic { .. } | ProblemConfig::DiagonalQuadratic { .. } => "quadratic_scsc",
            ProblemConfig::BilinearSimplex { .. } => "bilinear_simplex",
            ProblemConfig::SccBilinear { .. } => "scc_bilinear",
            ProblemConfig::NcScSin { .. } => "nc_sc_sin",
            ProblemConfig::NcCToy { .. } => "nc_c_toy",
        }
    }

    pub fn to_spec(&self) -> Result<ProblemSpec, ConfigError> {
        Ok(match self.clone() {
            ProblemConfig::QuadraticScsc { dim_x, dim_y, p, a, q, b, c, set_x, set_y } => {
                let q = QuadraticScsc { dim_x, dim_y, p, a, q, b, c, set_x: set_x.build()?, set_y: set_y.build()? };
                ProblemSpec::QuadraticScsc(q)
            }
            ProblemConfig::RandomQuadratic { dim_x, dim_y, kappa_x, kappa_y, coupling, seed } => {
                ProblemSpec::RandomQuadratic { dim_x, dim_y, kappa_x, kappa_y, coupling, seed }
            }
            ProblemConfig::DiagonalQuadratic { kappa_x, kappa_y, coupling, seed } => {
                let mut list = problems::condition_sweep(&[(kappa_x, kappa_y)], coupling, seed)?;
                ProblemSpec::QuadraticScsc(list.remove(0))
            }
            ProblemConfig::BilinearSimplex { m, n, a } => ProblemSpec::BilinearSimplex { m, n, a },
            ProblemConfig::SccBilinear { mu_x, b, m, n, a, diameter } => ProblemSpec::SccBilinear { mu_x, b, m, n, a, diameter },
            ProblemConfig::NcScSin { dim, mu_y, r } => ProblemSpec::NcScSin { dim, mu_y, r },
            ProblemConfig::NcCToy { dim, r } => ProblemSpec::NcCToy { dim, r },
        })
    }

    pub fn build(&self) -> Result<MinimaxProblem, ConfigError> {
        Ok(problems::make(&self.to_spec()?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    MinimaxAppa,
    MaximinAg2,
    SccSolve,
    CcSolve,
    MinimaxPpa,
    NcSolve,
    NcMoreauSolve,
    ScscNearOptimal,
    SccNearOptimal,
    NscAccelerated,
    NcAccelerated,
}

impl SolverName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverName::MinimaxAppa => "minimax_appa",
            SolverName::MaximinAg2 => "maximin_ag2",
            SolverName::SccSolve => "scc_solve",
            SolverName::CcSolve => "cc_solve",
            SolverName::MinimaxPpa => "minimax_ppa",
            SolverName::NcSolve => "nc_solve",
            SolverName::NcMoreauSolve => "nc_moreau_solve",
            SolverName::ScscNearOptimal => "scsc_near_optimal",
            SolverName::SccNearOptimal => "scc_near_optimal",
            SolverName::NscAccelerated => "nsc_accelerated",
            SolverName::NcAccelerated => "nc_accelerated",
        }
    }

    /// Solvers that draw a random iterate and so need a seed.
    pub fn is_randomized(&self) -> bool {
        matches!(self, SolverName::MinimaxPpa | SolverName::NcSolve | SolverName::NcMoreauSolve | SolverName::NscAccelerated | SolverName::NcAccelerated)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Faithful,
    Practical,
}

impl Mode {
    pub fn constants(&self) -> ConstantsMode {
        match self {
            Mode::Faithful => ConstantsMode::Faithful,
            Mode::Practical => ConstantsMode::Practical,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaConfig {
    #[default]
    Eps,
    EpsBar,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    pub max_outer: Option<u64>,
    pub max_inner: Option<u64>,
    pub hard_cap: Option<u64>,
}

fn default_cert_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub name: SolverName,
    pub eps: f64,
    /// Outer iteration count `T`; derived from the problem when omitted and
    /// the solver has a formula for it.
    #[serde(default)]
    pub iterations: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub y0: Option<Vec<f64>>,
    #[serde(default)]
    pub eta: EtaConfig,
    #[serde(default)]
    pub warm_start_inner: bool,
    /// Inner tolerance used by the optimality certificate.
    #[serde(default = "default_cert_tol")]
    pub cert_tol: f64,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(invalid("solver.eps must be a positive finite number"));
        }
        if self.name.is_randomized() && self.seed.is_none() {
            return Err(invalid(format!("solver {} needs a seed", self.name.as_str())));
        }
        if !(self.cert_tol.is_finite() && self.cert_tol > 0.0) {
            return Err(invalid("solver.cert_tol must be positive"));
        }
        Ok(())
    }

    pub fn options(&self, caps: &Caps) -> SolverOptions {
        let mut opts = SolverOptions {
            mode: self.mode.constants(),
            max_outer: caps.max_outer,
            max_inner: caps.max_inner,
            warm_start_inner: self.warm_start_inner,
            scc_eta: match self.eta {
                EtaConfig::Eps => EtaChoice::Eps,
                EtaConfig::EpsBar => EtaChoice::EpsBar,
            },
            ..SolverOptions::default()
        };
        if let Some(h) = caps.hard_cap {
            opts.hard_cap = h;
        }
        opts
    }
}

/// `solve` input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub caps: Caps,
    /// Where to write the JSON record; stdout when absent.
    #[serde(default)]
    pub output: Option<String>,
    /// Record wall-clock time. Off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
}

/// Problem template of a sweep; condition numbers come from the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepProblem {
    DiagonalQuadratic {
        #[serde(default = "default_coupling")]
        coupling: f64,
    },
    RandomQuadratic {
        dim_x: usize,
        dim_y: usize,
        #[serde(default = "default_coupling")]
        coupling: f64,
    },
    /// The same instance in every cell; the grid must not list condition numbers.
    Fixed { problem: ProblemConfig },
}

/// A solver entry of a sweep; `eps` and `seed` come from the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSolver {
    pub name: SolverName,
    #[serde(default)]
    pub iterations: Option<u64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub eta: EtaConfig,
    #[serde(default)]
    pub warm_start_inner: bool,
    #[serde(default = "default_cert_tol")]
    pub cert_tol: f64,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub kappa_x: Vec<f64>,
    #[serde(default)]
    pub kappa_y: Vec<f64>,
    pub eps: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

/// `sweep` input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub solvers: Vec<SweepSolver>,
    pub problem: SweepProblem,
    pub grid: Grid,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub timing: bool,
    /// Concurrent cells; `MINIMAX_BENCH_WORKERS` overrides it.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.solvers.is_empty() {
            return Err(invalid("sweep needs at least one solver"));
        }
        if self.grid.eps.is_empty() || self.grid.seeds.is_empty() {
            return Err(invalid("grid.eps and grid.seeds must be non-empty"));
        }
        if self.grid.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(invalid("grid.eps values must be positive"));
        }
        let has_kappa = !self.grid.kappa_x.is_empty() || !self.grid.kappa_y.is_empty();
        match &self.problem {
            SweepProblem::Fixed { .. } if has_kappa => Err(invalid("a fixed problem cannot be swept over condition numbers")),
            SweepProblem::Fixed { .. } => Ok(()),
            _ if self.grid.kappa_x.is_empty() || self.grid.kappa_y.is_empty() => {
                Err(invalid("grid.kappa_x and grid.kappa_y are required for quadratic templates"))
            }
            _ => Ok(()),
        }
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    parse_json(&text)
}
