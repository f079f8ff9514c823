//! Bridge from [`MilpModel`] to the microlp bounded-simplex LP oracle.
//!
//! Integrality marks are ignored here; branch-and-bound enforces them by
//! tightening variable bounds node by node.

use super::{MilpModel, Sense, SolveError, VarId};
use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

pub(crate) enum LpOutcome {
    Optimal { objective: f64, values: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Solves the LP relaxation of `model` with per-variable bound overrides.
///
/// `overrides` is a sparse list of (variable, lb, ub) tightenings applied on
/// top of the model bounds.
pub(crate) fn solve_lp(
    model: &MilpModel,
    overrides: &[(VarId, f64, f64)],
) -> Result<LpOutcome, SolveError> {
    let mut bounds: Vec<(f64, f64)> = model.variables.iter().map(|v| (v.lb, v.ub)).collect();
    for &(VarId(i), lb, ub) in overrides {
        let b = &mut bounds[i];
        b.0 = b.0.max(lb);
        b.1 = b.1.min(ub);
        if b.0 > b.1 {
            return Ok(LpOutcome::Infeasible);
        }
    }

    let mut obj = vec![0.0; model.num_vars()];
    for &(VarId(i), c) in &model.objective {
        obj[i] += c;
    }

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..model.num_vars())
        .map(|i| problem.add_var(obj[i], bounds[i]))
        .collect();
    for con in &model.constraints {
        let mut expr = LinearExpr::empty();
        // microlp panics on repeated variables in a row; accumulate first.
        let mut dense: Vec<(usize, f64)> = Vec::with_capacity(con.coeffs.len());
        for &(VarId(i), c) in &con.coeffs {
            match dense.iter_mut().find(|(j, _)| *j == i) {
                Some((_, acc)) => *acc += c,
                None => dense.push((i, c)),
            }
        }
        for (i, c) in dense {
            expr.add(vars[i], c);
        }
        let op = match con.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
            Sense::Ge => ComparisonOp::Ge,
        };
        problem.add_constraint(expr, op, con.rhs);
    }

    match problem.solve() {
        Ok(outcome) => {
            let solution = outcome
                .into_solution()
                .map_err(|_| SolveError::LpOracle("LP solve interrupted".into()))?;
            let values: Vec<f64> = vars.iter().map(|&v| solution.var_value(v)).collect();
            let objective = model.objective_constant
                + values
                    .iter()
                    .zip(&obj)
                    .map(|(x, c)| x * c)
                    .sum::<f64>();
            Ok(LpOutcome::Optimal { objective, values })
        }
        Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
        Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
        Err(e) => Err(SolveError::LpOracle(e.to_string())),
    }
}
