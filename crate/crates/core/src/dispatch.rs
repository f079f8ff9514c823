//! Solve pipeline: assemble, solve, tighten the reserve auxiliaries,
//! audit the raw solution against every model row, and extract
//! plant/network/storage traces in physical units.

use crate::formulation::index::Quantity;
use crate::formulation::{
    assemble, kkt_duals_at_bound, AssembleOptions, Assembled, FormulationError, ModelCounts,
    ProsumerMode, ProsumerSolution, Variant, EPS_ENERGY, EPS_EXPORT,
};
use crate::clipping::ClippingReport;
use crate::milp::{check_solution, RowViolation};
use crate::milp::{solve, SolveError, SolveResult, SolveStatus, FEASIBILITY_TOL};
use crate::model::{Case, InitialState, PlantClass};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("model has no feasible solution (status {0:?})")]
    NoSolution(SolveStatus),
    #[error("solution failed the feasibility audit: {} row(s), worst `{}` by {:.3e}",
        .0.len(), .0[0].name, .0[0].amount)]
    AuditFailed(Vec<RowViolation>),
    #[error("KKT dual multiplier(s) at the big-M bound: {0:?}")]
    DualAtBound(Vec<String>),
}

/// Per-plant commitment and dispatch traces, slot-indexed 0..T-1. Unit
/// counts are physical: per-unit binaries are summed and the aggregated
/// variant's plant binary is multiplied by the unit count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlantDispatch {
    pub units_online: Vec<f64>,
    pub startups: Vec<f64>,
    pub shutdowns: Vec<f64>,
    pub dispatch_mw: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DispatchResult {
    pub variant: Variant,
    pub status: SolveStatus,
    pub objective: f64,
    pub gap: f64,
    pub wall_time_s: f64,
    pub node_count: u64,
    pub plants: BTreeMap<String, PlantDispatch>,
    pub flows_mw: BTreeMap<String, Vec<f64>>,
    pub angles_rad: BTreeMap<String, Vec<f64>>,
    pub cst_energy_mwh_th: BTreeMap<String, Vec<f64>>,
    pub storage_power_mw: BTreeMap<String, Vec<f64>>,
    pub storage_energy_mwh: BTreeMap<String, Vec<f64>>,
    pub prosumers: BTreeMap<String, ProsumerSolution>,
    pub counts: ModelCounts,
    pub clipping: ClippingReport,
}

/// End-to-end solve of one case under one formulation. Every path runs the
/// row-by-row feasibility audit on the raw variable vector before any
/// extraction; an audit failure is an error, never a silent result.
pub fn solve_case(
    case: &Case,
    init: &InitialState,
    variant: Variant,
    options: AssembleOptions,
    gap: f64,
    time_limit: Option<Duration>,
    backend: &str,
) -> Result<DispatchResult, DispatchError> {
    let assembled = assemble(case, init, variant, options)?;
    let result = solve(&assembled.model, gap, time_limit, backend)?;
    finish_solve(case, &assembled, result)
}

/// Audit + extraction for an already-solved model. Split out so callers
/// that assemble once and solve repeatedly share the same safeguards.
pub fn finish_solve(
    case: &Case,
    assembled: &Assembled,
    mut result: SolveResult,
) -> Result<DispatchResult, DispatchError> {
    if !result.has_solution() {
        return Err(DispatchError::NoSolution(result.status));
    }
    tighten_reserve_aux(case, assembled, &mut result.values);

    let violations = check_solution(&assembled.model, &result.values, FEASIBILITY_TOL);
    if !violations.is_empty() {
        return Err(DispatchError::AuditFailed(violations));
    }
    if assembled.options.prosumer_mode == ProsumerMode::Kkt {
        let at_bound = kkt_duals_at_bound(&assembled.model, &result.values);
        if !at_bound.is_empty() {
            return Err(DispatchError::DualAtBound(at_bound));
        }
    }
    Ok(extract(case, assembled, &result))
}

/// The reserve auxiliary m is only bounded above by the two CST headroom
/// terms; rows leave it slack below the true min when reserve is abundant.
/// Setting it to the exact min keeps every row satisfied (it only moves m
/// upward) and makes the stored solution state the reserve contribution
/// exactly.
fn tighten_reserve_aux(case: &Case, assembled: &Assembled, values: &mut [f64]) {
    let dt = case.scenario.dt_hours;
    for plant in &case.system.plants {
        if !plant.is_cst() {
            continue;
        }
        for t in 1..=case.scenario.slots {
            let mut online_cap = 0.0;
            let mut dispatch = 0.0;
            for e in &assembled.entities {
                if case.system.plants[e.plant_idx].id != plant.id {
                    continue;
                }
                let s = values[assembled.index.lookup(&plant.id, e.unit, Quantity::Status, t).0];
                let p = values[assembled.index.lookup(&plant.id, e.unit, Quantity::Dispatch, t).0];
                online_cap += plant.p_max_mw * e.scale * s.round();
                dispatch += p;
            }
            let energy = values[assembled.index.lookup(&plant.id, None, Quantity::CstEnergy, t).0];
            let m = (online_cap - dispatch).min(energy / dt - dispatch);
            values[assembled.index.lookup(&plant.id, None, Quantity::ReserveAux, t).0] = m;
        }
    }
}

fn extract(case: &Case, assembled: &Assembled, result: &SolveResult) -> DispatchResult {
    let slots = case.scenario.slots;
    let values = &result.values;
    let at = |id: crate::milp::VarId| values[id.0];

    let mut plants: BTreeMap<String, PlantDispatch> = BTreeMap::new();
    for plant in &case.system.plants {
        if plant.class == PlantClass::Res {
            let mut pd = PlantDispatch {
                units_online: vec![plant.unit_count as f64; slots],
                startups: vec![0.0; slots],
                shutdowns: vec![0.0; slots],
                dispatch_mw: vec![0.0; slots],
            };
            for t in 1..=slots {
                pd.dispatch_mw[t - 1] =
                    at(assembled.index.lookup(&plant.id, None, Quantity::Dispatch, t));
            }
            plants.insert(plant.id.clone(), pd);
            continue;
        }
        let mut pd = PlantDispatch {
            units_online: vec![0.0; slots],
            startups: vec![0.0; slots],
            shutdowns: vec![0.0; slots],
            dispatch_mw: vec![0.0; slots],
        };
        for e in &assembled.entities {
            if case.system.plants[e.plant_idx].id != plant.id {
                continue;
            }
            for t in 1..=slots {
                let s = at(assembled.index.lookup(&plant.id, e.unit, Quantity::Status, t));
                let u = at(assembled.index.lookup(&plant.id, e.unit, Quantity::Startup, t));
                let d = at(assembled.index.lookup(&plant.id, e.unit, Quantity::Shutdown, t));
                pd.units_online[t - 1] += (s * e.scale).round();
                pd.startups[t - 1] += (u * e.scale).round();
                pd.shutdowns[t - 1] += (d * e.scale).round();
                pd.dispatch_mw[t - 1] +=
                    at(assembled.index.lookup(&plant.id, e.unit, Quantity::Dispatch, t));
            }
        }
        plants.insert(plant.id.clone(), pd);
    }

    let mut flows_mw = BTreeMap::new();
    for line_id in case
        .system
        .network
        .ac_lines
        .iter()
        .map(|l| &l.id)
        .chain(case.system.network.hvdc_lines.iter().map(|l| &l.id))
    {
        let trace: Vec<f64> = (1..=slots)
            .map(|t| at(assembled.index.lookup(line_id, None, Quantity::Flow, t)))
            .collect();
        flows_mw.insert(line_id.clone(), trace);
    }
    let mut angles_rad = BTreeMap::new();
    for node in &case.system.network.nodes {
        let trace: Vec<f64> = (1..=slots)
            .map(|t| at(assembled.index.lookup(node, None, Quantity::Angle, t)))
            .collect();
        angles_rad.insert(node.clone(), trace);
    }

    let mut cst_energy_mwh_th = BTreeMap::new();
    for plant in &case.system.plants {
        if plant.tes.is_some() {
            let trace: Vec<f64> = (1..=slots)
                .map(|t| at(assembled.index.lookup(&plant.id, None, Quantity::CstEnergy, t)))
                .collect();
            cst_energy_mwh_th.insert(plant.id.clone(), trace);
        }
    }
    let mut storage_power_mw = BTreeMap::new();
    let mut storage_energy_mwh = BTreeMap::new();
    for s in &case.system.storage {
        storage_power_mw.insert(
            s.id.clone(),
            (1..=slots)
                .map(|t| at(assembled.index.lookup(&s.id, None, Quantity::StoragePower, t)))
                .collect(),
        );
        storage_energy_mwh.insert(
            s.id.clone(),
            (1..=slots)
                .map(|t| at(assembled.index.lookup(&s.id, None, Quantity::StorageEnergy, t)))
                .collect(),
        );
    }

    let prosumers = match (&assembled.presolved_prosumers, assembled.options.prosumer_mode) {
        (Some(traces), _) => traces.clone(),
        (None, ProsumerMode::Kkt) => {
            let mut out = BTreeMap::new();
            for pros in &case.system.prosumers {
                let grab = |q: Quantity| -> Vec<f64> {
                    (1..=slots)
                        .map(|t| at(assembled.index.lookup(&pros.id, None, q, t)))
                        .collect()
                };
                let import_mw = grab(Quantity::ProsImport);
                let export_mw = grab(Quantity::ProsExport);
                let battery_mw = grab(Quantity::ProsBattery);
                let battery_energy_mwh = grab(Quantity::ProsBatteryEnergy);
                let dt = case.scenario.dt_hours;
                let objective: f64 = (0..slots)
                    .map(|i| {
                        import_mw[i] * dt
                            + export_mw[i] * (-pros.feed_in_ratio * dt + EPS_EXPORT)
                            - battery_energy_mwh[i] * EPS_ENERGY
                    })
                    .sum();
                out.insert(
                    pros.id.clone(),
                    ProsumerSolution {
                        import_mw,
                        export_mw,
                        battery_mw,
                        battery_energy_mwh,
                        objective,
                    },
                );
            }
            out
        }
        (None, _) => BTreeMap::new(),
    };

    DispatchResult {
        variant: assembled.variant,
        status: result.status,
        objective: result.objective,
        gap: result.gap,
        wall_time_s: result.wall_time_s,
        node_count: result.node_count,
        plants,
        flows_mw,
        angles_rad,
        cst_energy_mwh_th,
        storage_power_mw,
        storage_energy_mwh,
        prosumers,
        counts: assembled.counts.clone(),
        clipping: assembled.clipping.clone(),
    }
}
