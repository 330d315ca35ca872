//! Solver options, run status and the tolerance ledger.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::oracle::OracleCounts;

/// How the tolerance exponents of the nested solvers are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConstantsMode {
    /// The printed constants (e.g. `eps / (10 kx ky)^7`).
    #[default]
    Faithful,
    /// Every exponent above 2 replaced by 2, for tractable sweeps.
    Practical,
}

impl ConstantsMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantsMode::Faithful => "faithful",
            ConstantsMode::Practical => "practical",
        }
    }

    /// `faithful` when the mode is faithful, otherwise 2.
    pub(crate) fn exponent(&self, faithful: i32) -> i32 {
        match self {
            ConstantsMode::Faithful => faithful,
            ConstantsMode::Practical => faithful.min(2),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    #[default]
    Ok,
    BudgetExhausted,
    NumericalFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::BudgetExhausted => "budget_exhausted",
            Status::NumericalFailure => "numerical_failure",
        }
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: Status) -> Status {
        self.max(other)
    }

    pub fn is_ok(&self) -> bool {
        *self == Status::Ok
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tolerance or threshold a solver used.
#[derive(Clone, Debug, PartialEq)]
pub struct ToleranceEntry {
    pub name: String,
    pub theoretical: f64,
    pub applied: f64,
    /// `false` when the applied value differs from the theoretical one.
    pub faithful: bool,
    pub occurrences: u64,
}

/// Record of every theoretical constant a run computed and what it applied.
///
/// Entries are keyed by name; repeated records of the same name (e.g. one per
/// inner solve) are merged, keeping the first values and a count. A clamp
/// anywhere marks the merged entry as unfaithful.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ToleranceLedger {
    entries: Vec<ToleranceEntry>,
}

impl ToleranceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, name: &str, theoretical: f64, applied: f64) {
        let faithful = theoretical.to_bits() == applied.to_bits();
        self.push(ToleranceEntry { name: name.into(), theoretical, applied, faithful, occurrences: 1 });
    }

    fn push(&mut self, e: ToleranceEntry) {
        if let Some(old) = self.entries.iter_mut().find(|o| o.name == e.name) {
            old.occurrences += e.occurrences;
            if !e.faithful && old.faithful {
                old.faithful = false;
                old.theoretical = e.theoretical;
                old.applied = e.applied;
            }
        } else {
            self.entries.push(e);
        }
    }

    /// Merges another ledger, prefixing its names with `scope/`.
    pub fn absorb(&mut self, scope: &str, other: &ToleranceLedger) {
        for e in &other.entries {
            let mut e = e.clone();
            let mut name = String::from(scope);
            name.push('/');
            name.push_str(&e.name);
            e.name = name;
            self.push(e);
        }
    }

    pub fn entries(&self) -> &[ToleranceEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&ToleranceEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn any_clamped(&self) -> bool {
        self.entries.iter().any(|e| !e.faithful)
    }

    pub fn clamped_names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter(|e| !e.faithful).map(|e| e.name.as_str())
    }

    /// Applies `max(theoretical, floor)` (a NaN or zero theoretical value
    /// falls to the floor) and records the outcome.
    pub fn clamp(&mut self, name: &str, theoretical: f64, floor: f64) -> f64 {
        let applied = if theoretical.is_finite() && theoretical >= floor { theoretical } else { floor };
        self.record(name, theoretical, applied);
        applied
    }
}

/// Floor factor applied to theoretical tolerances relative to their natural
/// scale.
pub const CLAMP_FACTOR: f64 = 1e-14;

/// Absolute iteration limit for any loop.
pub const HARD_CAP: u64 = 10_000_000;

/// Which regularization weight the strongly-convex-concave near-optimal
/// driver uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EtaChoice {
    /// `eta = eps`
    #[default]
    Eps,
    /// `eta = eps_bar`, the inner tolerance.
    EpsBar,
}

/// Knobs shared by the nested solvers. `None` caps fall back to the
/// theory-derived defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub mode: ConstantsMode,
    pub max_outer: Option<u64>,
    pub max_inner: Option<u64>,
    pub hard_cap: u64,
    /// Start inner minimizations from the previous iterate instead of `x0`.
    /// Off by default; a deviation kept for experiments.
    pub warm_start_inner: bool,
    pub scc_eta: EtaChoice,
    /// Initial `y` for the general iterations; defaults to the projection of
    /// the origin.
    pub y_start: Option<Vec<f64>>,
    /// Keep every outer iterate in the report.
    pub record_trajectory: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            mode: ConstantsMode::Faithful,
            max_outer: None,
            max_inner: None,
            hard_cap: HARD_CAP,
            warm_start_inner: false,
            scc_eta: EtaChoice::Eps,
            y_start: None,
            record_trajectory: false,
        }
    }
}

impl SolverOptions {
    pub fn practical() -> Self {
        SolverOptions { mode: ConstantsMode::Practical, ..Self::default() }
    }

    pub(crate) fn outer_cap(&self, theory: u64) -> u64 {
        self.max_outer.unwrap_or(theory).min(self.hard_cap).max(1)
    }

    /// Options for a nested call: outer caps do not propagate, the inner cap
    /// becomes the nested solver's outer cap.
    pub(crate) fn nested(&self) -> SolverOptions {
        SolverOptions {
            max_outer: self.max_inner,
            record_trajectory: false,
            y_start: None,
            ..self.clone()
        }
    }
}

/// What a solver did.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverReport {
    pub status: Status,
    pub counts: OracleCounts,
    pub outer_iters: u64,
    pub inner_iters: u64,
    pub ledger: ToleranceLedger,
    pub seed: Option<u64>,
    /// Index of the randomly selected iterate, for randomized drivers.
    pub selected_index: Option<u64>,
    /// Outer iterates, when requested.
    pub trajectory: Vec<Vec<f64>>,
}

impl SolverReport {
    pub fn merge_status(&mut self, s: Status) {
        self.status = self.status.worst(s);
    }
}
