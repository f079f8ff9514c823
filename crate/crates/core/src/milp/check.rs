//! Independent row-evaluation pass.
//!
//! Re-evaluates every constraint, bound, and integrality mark of a model at
//! a candidate point without going through the solver, so a buggy solve
//! cannot vouch for itself.

use super::{MilpModel, Sense, VarId, VarKind};

#[derive(Clone, Debug)]
pub struct RowViolation {
    pub name: String,
    pub amount: f64,
}

/// Returns all constraint/bound/integrality violations exceeding `tol`.
pub fn check_solution(model: &MilpModel, values: &[f64], tol: f64) -> Vec<RowViolation> {
    let mut violations = Vec::new();
    if values.len() != model.num_vars() {
        violations.push(RowViolation {
            name: "solution-length".into(),
            amount: (values.len() as f64 - model.num_vars() as f64).abs(),
        });
        return violations;
    }
    for (i, var) in model.variables.iter().enumerate() {
        let v = values[i];
        if v < var.lb - tol || v > var.ub + tol {
            violations.push(RowViolation {
                name: format!("bound:{}", var.name),
                amount: (var.lb - v).max(v - var.ub),
            });
        }
        if var.kind != VarKind::Continuous {
            let dist = (v - v.round()).abs();
            if dist > tol {
                violations.push(RowViolation {
                    name: format!("integrality:{}", var.name),
                    amount: dist,
                });
            }
        }
    }
    for con in &model.constraints {
        let lhs: f64 = con.coeffs.iter().map(|&(VarId(i), c)| c * values[i]).sum();
        let slack = match con.sense {
            Sense::Le => con.rhs - lhs,
            Sense::Ge => lhs - con.rhs,
            Sense::Eq => -(lhs - con.rhs).abs(),
        };
        if slack < -tol {
            violations.push(RowViolation {
                name: con.name.clone(),
                amount: -slack,
            });
        }
    }
    violations
}
