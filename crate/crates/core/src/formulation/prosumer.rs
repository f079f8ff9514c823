//! Prosumer aggregates minimize their own electricity bill, independent of
//! system cost. Two interchangeable treatments:
//!
//! * presolve — each prosumer LP is solved up front and its import/export
//!   traces become fixed demand in the balance rows;
//! * KKT — the LP's optimality conditions are embedded in the MILP with
//!   indicator binaries for complementarity.
//!
//! Both use the identical perturbed objective, so the prosumer optimum is
//! unique and the two modes agree.

use super::index::{ProsumerVar, Quantity};
use super::{Ctx, FormulationError};
use crate::milp::{lp_relax_solve, MilpModel, Sense, SolveError, VarId, VarKind};
use crate::model::{Case, InitialState, ProsumerAggregate};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Tie-break reward for stored battery energy: prefer the fullest battery
/// among bill-equal plans. Small against the 1-per-MWh import cost.
pub const EPS_ENERGY: f64 = 1e-4;
/// Tie-break penalty on exports: prefer self-consumption among bill-equal
/// plans. Strictly dominated by [`EPS_ENERGY`].
pub const EPS_EXPORT: f64 = 1e-6;
/// Bound on dual multipliers in the KKT embedding. Prosumer objective
/// coefficients are O(1), so optimal duals are far below this; solutions
/// with a dual at the bound are rejected after the solve.
pub const M_DUAL: f64 = 50.0;

/// Fixed traces from one prosumer's solved lower-level problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProsumerSolution {
    pub import_mw: Vec<f64>,
    pub export_mw: Vec<f64>,
    pub battery_mw: Vec<f64>,
    pub battery_energy_mwh: Vec<f64>,
    /// Perturbed objective value, used for the strong-duality check.
    pub objective: f64,
}

/// Sub-model variable ids, slot-indexed 0..T-1, in definition order
/// (import, export, battery power, battery energy per slot).
pub struct ProsumerLayout {
    pub import: Vec<VarId>,
    pub export: Vec<VarId>,
    pub battery: Vec<VarId>,
    pub energy: Vec<VarId>,
}

const PRIMAL_ORDER: [ProsumerVar; 4] = [
    ProsumerVar::Import,
    ProsumerVar::Export,
    ProsumerVar::Battery,
    ProsumerVar::BatteryEnergy,
];

fn primal_quantity(v: ProsumerVar) -> Quantity {
    match v {
        ProsumerVar::Import => Quantity::ProsImport,
        ProsumerVar::Export => Quantity::ProsExport,
        ProsumerVar::Battery => Quantity::ProsBattery,
        ProsumerVar::BatteryEnergy => Quantity::ProsBatteryEnergy,
    }
}

/// Per-slot bounds for each primal variable. All finite, which the KKT
/// big-M derivation relies on.
fn primal_bounds(
    pros: &ProsumerAggregate,
    load: f64,
    pv: f64,
) -> [(f64, f64); 4] {
    // Import peaks when everything is consumed or stored; export peaks
    // when PV and a full discharge both leave the premises.
    let import_ub = load + pros.battery_charge_limit_mw;
    let export_ub = pv - pros.battery_discharge_limit_mw;
    [
        (0.0, import_ub.max(0.0)),
        (0.0, export_ub.max(0.0)),
        (pros.battery_discharge_limit_mw, pros.battery_charge_limit_mw),
        (pros.battery_e_min_mwh, pros.battery_e_max_mwh),
    ]
}

/// Builds one prosumer's lower-level LP:
/// minimize sum_t dt (import - lambda export) with tie-break perturbation,
/// subject to premises balance and battery energy carryover.
pub fn prosumer_lp(
    case: &Case,
    init: &InitialState,
    pros: &ProsumerAggregate,
) -> (MilpModel, ProsumerLayout) {
    let slots = case.scenario.slots;
    let dt = case.scenario.dt_hours;
    let load = &case.scenario.prosumer_load_mw[&pros.id];
    let pv = &case.scenario.prosumer_pv_mw[&pros.id];
    let e_init = init.prosumer_battery_mwh[&pros.id];

    let mut model = MilpModel::new();
    let mut layout = ProsumerLayout {
        import: Vec::with_capacity(slots),
        export: Vec::with_capacity(slots),
        battery: Vec::with_capacity(slots),
        energy: Vec::with_capacity(slots),
    };
    for t in 1..=slots {
        let bounds = primal_bounds(pros, load[t - 1], pv[t - 1]);
        let gp = model.add_var(format!("gp_t{t}"), bounds[0].0, bounds[0].1, VarKind::Continuous);
        let gm = model.add_var(format!("gm_t{t}"), bounds[1].0, bounds[1].1, VarKind::Continuous);
        let pb = model.add_var(format!("pb_t{t}"), bounds[2].0, bounds[2].1, VarKind::Continuous);
        let eb = model.add_var(format!("eb_t{t}"), bounds[3].0, bounds[3].1, VarKind::Continuous);
        model.set_objective_term(gp, dt);
        model.set_objective_term(gm, -pros.feed_in_ratio * dt + EPS_EXPORT);
        model.set_objective_term(eb, -EPS_ENERGY);
        layout.import.push(gp);
        layout.export.push(gm);
        layout.battery.push(pb);
        layout.energy.push(eb);
    }
    for t in 1..=slots {
        let i = t - 1;
        // import + pv = load + battery charge + export
        model.add_con(
            format!("pbal_t{t}"),
            "prosumer_balance",
            vec![
                (layout.import[i], 1.0),
                (layout.export[i], -1.0),
                (layout.battery[i], -1.0),
            ],
            Sense::Eq,
            load[i] - pv[i],
        );
        let mut soc = vec![(layout.energy[i], 1.0), (layout.battery[i], -dt)];
        let rhs = if t == 1 {
            pros.battery_efficiency * e_init
        } else {
            soc.push((layout.energy[i - 1], -pros.battery_efficiency));
            0.0
        };
        model.add_con(format!("psoc_t{t}"), "prosumer_soc", soc, Sense::Eq, rhs);
    }
    (model, layout)
}

/// Solves every prosumer's LP and returns the fixed traces keyed by
/// prosumer id.
pub fn presolve_prosumers(
    case: &Case,
    init: &InitialState,
) -> Result<BTreeMap<String, ProsumerSolution>, FormulationError> {
    let mut out = BTreeMap::new();
    for pros in &case.system.prosumers {
        let (model, layout) = prosumer_lp(case, init, pros);
        let result = match lp_relax_solve(&model) {
            Ok(r) => r,
            Err(SolveError::LpOracle(msg)) => return Err(FormulationError::Lp(msg)),
            Err(e) => return Err(FormulationError::Lp(e.to_string())),
        };
        if !result.has_solution() {
            return Err(FormulationError::InfeasibleProsumer(pros.id.clone()));
        }
        let values = &result.values;
        let take = |ids: &[VarId]| ids.iter().map(|id| values[id.0]).collect::<Vec<f64>>();
        out.insert(
            pros.id.clone(),
            ProsumerSolution {
                import_mw: take(&layout.import),
                export_mw: take(&layout.export),
                battery_mw: take(&layout.battery),
                battery_energy_mwh: take(&layout.energy),
                objective: result.objective,
            },
        );
    }
    Ok(out)
}

/// Defines the prosumer primal variables in the main model (KKT mode),
/// mirroring the standalone LP's bounds, so balance rows can reference
/// imports and exports.
pub(crate) fn define_prosumer_primal(ctx: &mut Ctx<'_>) {
    let slots = ctx.case.scenario.slots;
    for pros in ctx.case.system.prosumers.clone() {
        let load = ctx.case.scenario.prosumer_load_mw[&pros.id].clone();
        let pv = ctx.case.scenario.prosumer_pv_mw[&pros.id].clone();
        for t in 1..=slots {
            let bounds = primal_bounds(&pros, load[t - 1], pv[t - 1]);
            for (k, pvar) in PRIMAL_ORDER.iter().enumerate() {
                let (lb, ub) = bounds[k];
                ctx.define(
                    &pros.id,
                    None,
                    primal_quantity(*pvar),
                    t,
                    format!("{}_{}_t{t}", var_tag(*pvar), pros.id),
                    lb,
                    ub,
                    VarKind::Continuous,
                );
            }
        }
    }
}

fn var_tag(v: ProsumerVar) -> &'static str {
    match v {
        ProsumerVar::Import => "gp",
        ProsumerVar::Export => "gm",
        ProsumerVar::Battery => "pb",
        ProsumerVar::BatteryEnergy => "eb",
    }
}

/// Embeds each prosumer LP's KKT system: the primal rows, stationarity,
/// and big-M complementarity with indicator binaries. The primal variables
/// must already exist (see [`define_prosumer_primal`]).
pub(crate) fn emit_prosumer_kkt(ctx: &mut Ctx<'_>) -> Result<(), FormulationError> {
    let slots = ctx.case.scenario.slots;
    for pros in ctx.case.system.prosumers.clone() {
        let (sub, _layout) = prosumer_lp(ctx.case, ctx.init, &pros);

        // Sub-model variable j -> (main id, primal kind, slot). Definition
        // order in prosumer_lp is the PRIMAL_ORDER block per slot.
        let mut main_of: Vec<VarId> = Vec::with_capacity(sub.num_vars());
        let mut meta: Vec<(ProsumerVar, usize)> = Vec::with_capacity(sub.num_vars());
        for t in 1..=slots {
            for pvar in PRIMAL_ORDER {
                main_of.push(ctx.index.lookup(&pros.id, None, primal_quantity(pvar), t));
                meta.push((pvar, t));
            }
        }

        // Primal equality rows, re-stated on the main variables. Row order
        // in prosumer_lp: balance then SOC, per slot.
        let mut dual_of_row: Vec<VarId> = Vec::with_capacity(sub.num_constraints());
        for (row_idx, con) in sub.constraints.iter().enumerate() {
            let t = row_idx / 2 + 1;
            let quantity = if row_idx % 2 == 0 {
                Quantity::DualBalance
            } else {
                Quantity::DualSoc
            };
            let coeffs: Vec<(VarId, f64)> = con
                .coeffs
                .iter()
                .map(|(id, c)| (main_of[id.0], *c))
                .collect();
            ctx.model.add_con(
                format!("{}_{}", con.name, pros.id),
                con.group.clone(),
                coeffs,
                con.sense,
                con.rhs,
            );
            let nu = ctx.define(
                &pros.id,
                None,
                quantity,
                t,
                format!("nu_{}_{}", con.name, pros.id),
                -M_DUAL,
                M_DUAL,
                VarKind::Continuous,
            );
            dual_of_row.push(nu);
        }

        // Objective coefficients per sub variable.
        let mut cost = vec![0.0; sub.num_vars()];
        for (id, c) in &sub.objective {
            cost[id.0] += c;
        }

        for j in 0..sub.num_vars() {
            let (pvar, t) = meta[j];
            let x = main_of[j];
            let (lb, ub) = (sub.variables[j].lb, sub.variables[j].ub);
            let width = ub - lb;

            let lo = ctx.define(
                &pros.id,
                None,
                Quantity::DualLo(pvar),
                t,
                format!("lam_lo_{}_{}_t{t}", var_tag(pvar), pros.id),
                0.0,
                M_DUAL,
                VarKind::Continuous,
            );
            let hi = ctx.define(
                &pros.id,
                None,
                Quantity::DualHi(pvar),
                t,
                format!("lam_hi_{}_{}_t{t}", var_tag(pvar), pros.id),
                0.0,
                M_DUAL,
                VarKind::Continuous,
            );

            // Stationarity: c_j - sum_i A_ij nu_i - lam_lo + lam_hi = 0.
            let mut stat: Vec<(VarId, f64)> = vec![(lo, -1.0), (hi, 1.0)];
            for (row_idx, con) in sub.constraints.iter().enumerate() {
                for (id, c) in &con.coeffs {
                    if id.0 == j {
                        stat.push((dual_of_row[row_idx], -c));
                    }
                }
            }
            ctx.model.add_con(
                format!("kkt_stat_{}_{}_t{t}", var_tag(pvar), pros.id),
                "kkt_stationarity",
                stat,
                Sense::Eq,
                -cost[j],
            );

            // Complementarity. A zero-width bound pair pins the variable;
            // its multipliers may then take any sign split, so no
            // indicators are needed.
            if width <= 0.0 {
                continue;
            }
            let zlo = ctx.define(
                &pros.id,
                None,
                Quantity::BinLo(pvar),
                t,
                format!("z_lo_{}_{}_t{t}", var_tag(pvar), pros.id),
                0.0,
                1.0,
                VarKind::Binary,
            );
            let zhi = ctx.define(
                &pros.id,
                None,
                Quantity::BinHi(pvar),
                t,
                format!("z_hi_{}_{}_t{t}", var_tag(pvar), pros.id),
                0.0,
                1.0,
                VarKind::Binary,
            );
            // lam_lo > 0 only when x sits at its lower bound.
            ctx.model.add_con(
                format!("kkt_lo_dual_{}_{}_t{t}", var_tag(pvar), pros.id),
                "kkt_complementarity",
                vec![(lo, 1.0), (zlo, -M_DUAL)],
                Sense::Le,
                0.0,
            );
            ctx.model.add_con(
                format!("kkt_lo_primal_{}_{}_t{t}", var_tag(pvar), pros.id),
                "kkt_complementarity",
                vec![(x, 1.0), (zlo, width)],
                Sense::Le,
                ub,
            );
            // lam_hi > 0 only when x sits at its upper bound.
            ctx.model.add_con(
                format!("kkt_hi_dual_{}_{}_t{t}", var_tag(pvar), pros.id),
                "kkt_complementarity",
                vec![(hi, 1.0), (zhi, -M_DUAL)],
                Sense::Le,
                0.0,
            );
            ctx.model.add_con(
                format!("kkt_hi_primal_{}_{}_t{t}", var_tag(pvar), pros.id),
                "kkt_complementarity",
                vec![(x, -1.0), (zhi, width)],
                Sense::Le,
                width - ub,
            );
        }
    }
    Ok(())
}

/// Names of dual variables sitting at the big-M bound in a solved KKT
/// model — a non-empty result means the embedding's M was too small and
/// the solution must be rejected.
pub fn kkt_duals_at_bound(
    model: &MilpModel,
    values: &[f64],
) -> Vec<String> {
    let mut hits = Vec::new();
    for (j, var) in model.variables.iter().enumerate() {
        let is_dual = var.name.starts_with("nu_") || var.name.starts_with("lam_");
        if is_dual && values[j].abs() >= M_DUAL - 1e-6 {
            hits.push(var.name.clone());
        }
    }
    hits
}
