//! Plain-text model dump in LP-format-style syntax for cross-checking
//! against external solvers.
//!
//! Grammar (one statement per line inside each section):
//!   Minimize / obj: <term>...
//!   Subject To / <name>: <term>... {<=,=,>=} <rhs>
//!   Bounds / <lb> <= <name> <= <ub>   (infinite bounds written as -inf/+inf)
//!   Generals / <name>...              (integer variables)
//!   Binaries / <name>...
//!   End
//! Terms are `<+/-> <coeff> <name>`. Variable names are used verbatim, so
//! formulation code must keep them LP-compatible (no whitespace).

use super::{MilpModel, Sense, VarId, VarKind};
use std::fmt::Write;

pub fn write_lp_format(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    for &(VarId(i), c) in &model.objective {
        write_term(&mut out, c, &model.variables[i].name);
    }
    if model.objective_constant != 0.0 {
        let _ = write!(out, " + {}", model.objective_constant);
    }
    out.push_str("\nSubject To\n");
    for con in &model.constraints {
        let _ = write!(out, " {}:", con.name);
        for &(VarId(i), c) in &con.coeffs {
            write_term(&mut out, c, &model.variables[i].name);
        }
        let op = match con.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {} {}", op, con.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let lb = if v.lb == f64::NEG_INFINITY {
            "-inf".to_string()
        } else {
            format!("{}", v.lb)
        };
        let ub = if v.ub == f64::INFINITY {
            "+inf".to_string()
        } else {
            format!("{}", v.ub)
        };
        let _ = writeln!(out, " {} <= {} <= {}", lb, v.name, ub);
    }
    let generals: Vec<_> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| v.name.as_str())
        .collect();
    if !generals.is_empty() {
        let _ = writeln!(out, "Generals\n {}", generals.join(" "));
    }
    let binaries: Vec<_> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binaries\n {}", binaries.join(" "));
    }
    out.push_str("End\n");
    out
}

fn write_term(out: &mut String, coeff: f64, name: &str) {
    if coeff >= 0.0 {
        let _ = write!(out, " + {} {}", coeff, name);
    } else {
        let _ = write!(out, " - {} {}", -coeff, name);
    }
}
