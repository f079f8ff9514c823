//! Solver-agnostic MILP representation and a bundled exact branch-and-bound
//! reference solver.
//!
//! The solve contract is `(MilpModel, gap, time limit) -> SolveResult`.
//! External high-performance solvers can be attached by implementing
//! [`Backend`]; the bundled reference solver keeps the tool self-contained
//! for desk-scale instances.

mod bb;
mod check;
mod lp;
mod lpfile;

pub use check::{check_solution, RowViolation};
pub use lpfile::write_lp_format;

use serde::{Deserialize, Serialize};
use std::time::Duration;
use thiserror::Error;

/// Feasibility tolerance, absolute, for constraint rows and bounds.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Integrality tolerance: values within this of an integer count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Default relative optimality gap.
pub const DEFAULT_GAP: f64 = 0.01;
/// Relative gap below which a solve is reported as proven optimal.
const PROVEN_OPTIMAL_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: String,
    /// Group label used for Table-II-style constraint accounting.
    pub group: String,
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization MILP: variables with bounds and integrality marks, sparse
/// constraint rows, and a sparse linear objective.
#[derive(Clone, Debug, Default)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(VarId, f64)>,
    pub objective_constant: f64,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("variable {0}: lower bound {1} exceeds upper bound {2}")]
    InvertedBounds(String, f64, f64),
    #[error("constraint {0} references undeclared variable index {1}")]
    UnknownVariable(String, usize),
    #[error("duplicate variable name {0}")]
    DuplicateName(String),
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, kind: VarKind) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            name: name.into(),
            lb,
            ub,
            kind,
        });
        id
    }

    pub fn add_con(
        &mut self,
        name: impl Into<String>,
        group: impl Into<String>,
        coeffs: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            group: group.into(),
            coeffs,
            sense,
            rhs,
        });
    }

    pub fn set_objective_term(&mut self, var: VarId, coeff: f64) {
        self.objective.push((var, coeff));
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn integer_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind != VarKind::Continuous)
            .map(|(i, _)| VarId(i))
    }

    /// Checks structural invariants: bound ordering, coefficient references,
    /// and name uniqueness.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut names = std::collections::HashSet::with_capacity(self.variables.len());
        for v in &self.variables {
            if v.lb > v.ub {
                return Err(ModelError::InvertedBounds(v.name.clone(), v.lb, v.ub));
            }
            if !names.insert(v.name.as_str()) {
                return Err(ModelError::DuplicateName(v.name.clone()));
            }
        }
        for c in &self.constraints {
            for &(VarId(i), _) in &c.coeffs {
                if i >= self.variables.len() {
                    return Err(ModelError::UnknownVariable(c.name.clone(), i));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the objective at a point, including the constant term.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_constant
            + self
                .objective
                .iter()
                .map(|&(VarId(i), c)| c * values[i])
                .sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    FeasibleAtGap,
    Infeasible,
    Unbounded,
    TimeLimit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    /// Proven relative gap at termination.
    pub gap: f64,
    pub wall_time_s: f64,
    pub node_count: u64,
}

impl SolveResult {
    pub fn has_solution(&self) -> bool {
        matches!(
            self.status,
            SolveStatus::Optimal | SolveStatus::FeasibleAtGap
        )
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("unknown backend `{0}`")]
    UnknownBackend(String),
    #[error("malformed model: {0}")]
    MalformedModel(#[from] ModelError),
    #[error("LP oracle failure: {0}")]
    LpOracle(String),
}

/// Pluggable solve contract. Implementations must be deterministic for a
/// fixed model and options when running single-threaded.
pub trait Backend {
    fn name(&self) -> &str;
    fn solve(
        &self,
        model: &MilpModel,
        gap: f64,
        time_limit: Option<Duration>,
    ) -> Result<SolveResult, SolveError>;
}

/// Bundled exact branch-and-bound backend.
pub struct ReferenceBackend;

impl Backend for ReferenceBackend {
    fn name(&self) -> &str {
        "reference"
    }

    fn solve(
        &self,
        model: &MilpModel,
        gap: f64,
        time_limit: Option<Duration>,
    ) -> Result<SolveResult, SolveError> {
        reference_bb_solve(model, gap, time_limit)
    }
}

/// Solves `model` to the requested relative gap with the named backend.
pub fn solve(
    model: &MilpModel,
    gap: f64,
    time_limit: Option<Duration>,
    backend: &str,
) -> Result<SolveResult, SolveError> {
    match backend {
        "reference" => ReferenceBackend.solve(model, gap, time_limit),
        other => Err(SolveError::UnknownBackend(other.to_string())),
    }
}

/// Solves the LP relaxation (integrality dropped). Used for root-node gap
/// diagnostics.
pub fn lp_relax_solve(model: &MilpModel) -> Result<SolveResult, SolveError> {
    model.validate()?;
    let start = std::time::Instant::now();
    let outcome = lp::solve_lp(model, &[])?;
    let result = match outcome {
        lp::LpOutcome::Optimal { objective, values } => SolveResult {
            status: SolveStatus::Optimal,
            objective,
            values,
            gap: 0.0,
            wall_time_s: start.elapsed().as_secs_f64(),
            node_count: 0,
        },
        lp::LpOutcome::Infeasible => SolveResult {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            values: vec![],
            gap: f64::INFINITY,
            wall_time_s: start.elapsed().as_secs_f64(),
            node_count: 0,
        },
        lp::LpOutcome::Unbounded => SolveResult {
            status: SolveStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            values: vec![],
            gap: f64::INFINITY,
            wall_time_s: start.elapsed().as_secs_f64(),
            node_count: 0,
        },
    };
    Ok(result)
}

/// Exact branch-and-bound over the LP relaxation: best-first node order,
/// most-fractional branching with ties broken by lowest variable id,
/// incumbent pruning at the requested relative gap.
pub fn reference_bb_solve(
    model: &MilpModel,
    gap: f64,
    time_limit: Option<Duration>,
) -> Result<SolveResult, SolveError> {
    model.validate()?;
    bb::branch_and_bound(model, gap, time_limit)
}

pub(crate) fn relative_gap(upper: f64, lower: f64) -> f64 {
    if upper.is_infinite() || lower.is_infinite() {
        return f64::INFINITY;
    }
    (upper - lower).max(0.0) / upper.abs().max(1e-9)
}

pub(crate) fn is_proven_optimal(gap: f64) -> bool {
    gap <= PROVEN_OPTIMAL_GAP
}
