//! Post-solve analytics: cost recomputation from traces, inertia and
//! commitment time series, spillage, cross-run comparison, and an
//! independent physical re-evaluation of a dispatch against the original
//! case (used to certify stitched rolling-horizon solutions on the full
//! horizon).

use crate::dispatch::DispatchResult;
use crate::model::{Case, InitialState, PlantClass};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Total cost implied by the committed traces: fixed + startup + shutdown
/// + variable energy cost. Matches the solver objective on a monolithic
/// solve; on a stitched rolling solution it is the only meaningful total.
pub fn total_cost(case: &Case, result: &DispatchResult) -> f64 {
    let dt = case.scenario.dt_hours;
    let mut cost = 0.0;
    for plant in &case.system.plants {
        let pd = &result.plants[&plant.id];
        for i in 0..case.scenario.slots {
            if plant.class == PlantClass::Res {
                cost += plant.cost_fixed + plant.cost_variable_per_mwh * pd.dispatch_mw[i] * dt;
            } else {
                cost += plant.cost_fixed * pd.units_online[i]
                    + plant.cost_startup * pd.startups[i]
                    + plant.cost_shutdown * pd.shutdowns[i]
                    + plant.cost_variable_per_mwh * pd.dispatch_mw[i] * dt;
            }
        }
    }
    cost
}

/// Synchronous inertia online per (region, slot), MW.s: sum over online
/// units of H * S.
pub fn inertia_timeseries(case: &Case, result: &DispatchResult) -> BTreeMap<String, Vec<f64>> {
    let slots = case.scenario.slots;
    let mut out: BTreeMap<String, Vec<f64>> = case
        .system
        .network
        .regions
        .iter()
        .map(|r| (r.clone(), vec![0.0; slots]))
        .collect();
    for plant in &case.system.plants {
        if !plant.is_synchronous() {
            continue;
        }
        let region = &case.system.network.node_region[&plant.node];
        let trace = out.get_mut(region).expect("region");
        let pd = &result.plants[&plant.id];
        for i in 0..slots {
            trace[i] += pd.units_online[i] * plant.unit_inertia_mws();
        }
    }
    out
}

/// Online synchronous units per slot, summed over all plants.
pub fn online_units_timeseries(case: &Case, result: &DispatchResult) -> Vec<f64> {
    let slots = case.scenario.slots;
    let mut out = vec![0.0; slots];
    for plant in &case.system.plants {
        if !plant.is_synchronous() {
            continue;
        }
        let pd = &result.plants[&plant.id];
        for i in 0..slots {
            out[i] += pd.units_online[i];
        }
    }
    out
}

/// Curtailed renewable energy, MWh: available minus dispatched, summed
/// over RES plants and slots.
pub fn res_spillage_mwh(case: &Case, result: &DispatchResult) -> f64 {
    let dt = case.scenario.dt_hours;
    let mut spill = 0.0;
    for plant in &case.system.plants {
        if plant.class != PlantClass::Res {
            continue;
        }
        let avail = &case.scenario.res_availability_mw[&plant.id];
        let pd = &result.plants[&plant.id];
        for i in 0..case.scenario.slots {
            spill += (avail[i] - pd.dispatch_mw[i]).max(0.0) * dt;
        }
    }
    spill
}

/// Side-by-side deltas of two solved runs on the same case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Comparison {
    pub objective_a: f64,
    pub objective_b: f64,
    /// (b - a) / |a|
    pub objective_rel_diff: f64,
    pub total_cost_a: f64,
    pub total_cost_b: f64,
    pub spillage_mwh_a: f64,
    pub spillage_mwh_b: f64,
    pub wall_time_s_a: f64,
    pub wall_time_s_b: f64,
    /// Largest absolute unit-count difference over plants and slots.
    pub max_commitment_diff: f64,
    /// Largest absolute per-region inertia difference, MW.s.
    pub max_inertia_diff_mws: f64,
}

pub fn compare(case: &Case, a: &DispatchResult, b: &DispatchResult) -> Comparison {
    let mut max_commitment_diff: f64 = 0.0;
    for plant in &case.system.plants {
        let pa = &a.plants[&plant.id];
        let pb = &b.plants[&plant.id];
        for i in 0..case.scenario.slots {
            max_commitment_diff =
                max_commitment_diff.max((pa.units_online[i] - pb.units_online[i]).abs());
        }
    }
    let ia = inertia_timeseries(case, a);
    let ib = inertia_timeseries(case, b);
    let mut max_inertia_diff_mws: f64 = 0.0;
    for (region, ta) in &ia {
        for (x, y) in ta.iter().zip(&ib[region]) {
            max_inertia_diff_mws = max_inertia_diff_mws.max((x - y).abs());
        }
    }
    Comparison {
        objective_a: a.objective,
        objective_b: b.objective,
        objective_rel_diff: (b.objective - a.objective) / a.objective.abs().max(1e-9),
        total_cost_a: total_cost(case, a),
        total_cost_b: total_cost(case, b),
        spillage_mwh_a: res_spillage_mwh(case, a),
        spillage_mwh_b: res_spillage_mwh(case, b),
        wall_time_s_a: a.wall_time_s,
        wall_time_s_b: b.wall_time_s,
        max_commitment_diff,
        max_inertia_diff_mws,
    }
}

/// One violated physical requirement found by [`evaluate_dispatch`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhysicalViolation {
    pub what: String,
    pub slot: usize,
    pub amount: f64,
}

/// Re-evaluates a dispatch against the case's physics at the plant level,
/// independent of any MILP, from the stored traces alone. Valid for every
/// formulation because per-unit rows sum to the clustered plant-level form
/// checked here.
pub fn evaluate_dispatch(
    case: &Case,
    init: &InitialState,
    result: &DispatchResult,
    tol: f64,
) -> Vec<PhysicalViolation> {
    let mut v: Vec<PhysicalViolation> = Vec::new();
    let slots = case.scenario.slots;
    let dt = case.scenario.dt_hours;
    let mut push = |what: String, slot: usize, amount: f64| {
        if amount > tol {
            v.push(PhysicalViolation { what, slot, amount });
        }
    };

    // Power balance per node.
    for node in &case.system.network.nodes {
        for t in 1..=slots {
            let i = t - 1;
            let mut net = 0.0;
            for plant in &case.system.plants {
                if plant.node == *node {
                    net += result.plants[&plant.id].dispatch_mw[i];
                }
            }
            for s in &case.system.storage {
                if s.node == *node {
                    net -= result.storage_power_mw[&s.id][i];
                }
            }
            for c in &case.scenario.consumers {
                if c.node == *node {
                    net -= case.scenario.consumer_load_mw[&c.id][i];
                }
            }
            for pros in &case.system.prosumers {
                if pros.node == *node {
                    let sol = &result.prosumers[&pros.id];
                    net -= sol.import_mw[i] - sol.export_mw[i];
                }
            }
            for line in &case.system.network.ac_lines {
                if line.from_node == *node {
                    net -= result.flows_mw[&line.id][i];
                } else if line.to_node == *node {
                    net += result.flows_mw[&line.id][i];
                }
            }
            for line in &case.system.network.hvdc_lines {
                if line.from_node == *node {
                    net -= result.flows_mw[&line.id][i];
                } else if line.to_node == *node {
                    net += result.flows_mw[&line.id][i];
                }
            }
            push(format!("balance:{node}"), t, net.abs());
        }
    }

    // Network: flow limits, DC relation, angle bounds.
    for line in &case.system.network.ac_lines {
        let flow = &result.flows_mw[&line.id];
        let ax = &result.angles_rad[&line.from_node];
        let ay = &result.angles_rad[&line.to_node];
        for t in 1..=slots {
            let i = t - 1;
            push(
                format!("thermal:{}", line.id),
                t,
                flow[i].abs() - line.thermal_limit_mw,
            );
            let diff = ax[i] - ay[i];
            push(
                format!("dc_flow:{}", line.id),
                t,
                (flow[i] - line.susceptance_mw_per_rad * diff).abs(),
            );
            push(
                format!("angle:{}", line.id),
                t,
                diff.abs() - case.system.network.angle_bound_rad,
            );
        }
    }
    for line in &case.system.network.hvdc_lines {
        let flow = &result.flows_mw[&line.id];
        for t in 1..=slots {
            push(format!("hvdc:{}", line.id), t, flow[t - 1].abs() - line.limit_mw);
        }
    }

    // Plant-level commitment physics.
    for plant in &case.system.plants {
        let pd = &result.plants[&plant.id];
        if plant.class == PlantClass::Res {
            let avail = &case.scenario.res_availability_mw[&plant.id];
            for t in 1..=slots {
                push(format!("res_avail:{}", plant.id), t, pd.dispatch_mw[t - 1] - avail[t - 1]);
                push(format!("res_nonneg:{}", plant.id), t, -pd.dispatch_mw[t - 1]);
            }
            continue;
        }
        let s_init = init.units_online(&plant.id) as f64;
        let p_init = init.dispatch(&plant.id);
        for t in 1..=slots {
            let i = t - 1;
            let s = pd.units_online[i];
            let p = pd.dispatch_mw[i];
            push(format!("unit_count:{}", plant.id), t, s - plant.unit_count as f64);
            push(format!("unit_count:{}", plant.id), t, -s);
            push(format!("gen_max:{}", plant.id), t, p - s * plant.p_max_mw);
            push(format!("gen_min:{}", plant.id), t, s * plant.p_min_mw - p);
            let (s_prev, p_prev) = if t == 1 {
                (s_init, p_init)
            } else {
                (pd.units_online[i - 1], pd.dispatch_mw[i - 1])
            };
            push(
                format!("logic:{}", plant.id),
                t,
                (pd.startups[i] - pd.shutdowns[i] - (s - s_prev)).abs(),
            );
            push(format!("startup_nonneg:{}", plant.id), t, -pd.startups[i]);
            push(format!("shutdown_nonneg:{}", plant.id), t, -pd.shutdowns[i]);
            push(
                format!("ramp_up:{}", plant.id),
                t,
                p - p_prev - s * plant.ramp_up_mw_per_h * dt,
            );
            push(
                format!("ramp_down:{}", plant.id),
                t,
                p_prev - p - s_prev * plant.ramp_down_mw_per_h * dt,
            );
            // Minimum up/down windows with carried history at the boundary.
            let tau_u = plant.min_up_slots as usize;
            if tau_u > 1 {
                let start = t.saturating_sub(tau_u - 1).max(1);
                let recent: f64 = (start..=t).map(|j| pd.startups[j - 1]).sum();
                let carried = if t < tau_u {
                    init.must_stay_on(&plant.id, t) as f64
                } else {
                    0.0
                };
                push(format!("min_up:{}", plant.id), t, recent + carried - s);
            }
            let tau_d = plant.min_down_slots as usize;
            if tau_d > 1 {
                let start = t.saturating_sub(tau_d - 1).max(1);
                let recent: f64 = (start..=t).map(|j| pd.shutdowns[j - 1]).sum();
                let carried = if t < tau_d {
                    init.must_stay_off(&plant.id, t) as f64
                } else {
                    0.0
                };
                push(
                    format!("min_down:{}", plant.id),
                    t,
                    s + recent + carried - plant.unit_count as f64,
                );
            }
        }
        // TES energy balance.
        if let Some(tes) = &plant.tes {
            let e = &result.cst_energy_mwh_th[&plant.id];
            let capture = &case.scenario.cst_capture_mwh_th[&plant.id];
            for t in 1..=slots {
                let i = t - 1;
                let prev = if t == 1 {
                    init.cst_energy_mwh_th[&plant.id]
                } else {
                    e[i - 1]
                };
                let expect = tes.efficiency * prev + capture[i] - pd.dispatch_mw[i] * dt;
                push(format!("cst_soc:{}", plant.id), t, (e[i] - expect).abs());
                push(format!("cst_min:{}", plant.id), t, tes.e_min_mwh_th - e[i]);
                push(format!("cst_max:{}", plant.id), t, e[i] - tes.e_max_mwh_th);
            }
        }
    }

    // Utility storage energy balance and limits.
    for s in &case.system.storage {
        let e = &result.storage_energy_mwh[&s.id];
        let p = &result.storage_power_mw[&s.id];
        for t in 1..=slots {
            let i = t - 1;
            let prev = if t == 1 { init.storage_energy_mwh[&s.id] } else { e[i - 1] };
            push(
                format!("storage_soc:{}", s.id),
                t,
                (e[i] - (s.efficiency * prev + p[i] * dt)).abs(),
            );
            push(format!("storage_min:{}", s.id), t, s.e_min_mwh - e[i]);
            push(format!("storage_max:{}", s.id), t, e[i] - s.e_max_mwh);
            push(format!("storage_charge:{}", s.id), t, p[i] - s.charge_limit_mw);
            push(format!("storage_discharge:{}", s.id), t, s.discharge_limit_mw - p[i]);
        }
    }

    // Regional reserve (CST contributes min(headroom, stored energy rate))
    // and inertia.
    for region in &case.system.network.regions {
        for t in 1..=slots {
            let i = t - 1;
            let reserve_req: f64 = case
                .system
                .network
                .nodes_in_region(region)
                .filter_map(|n| case.scenario.reserve_req_mw.get(n))
                .map(|tr| tr[i])
                .sum();
            let inertia_req: f64 = case
                .system
                .network
                .nodes_in_region(region)
                .filter_map(|n| case.scenario.inertia_req_mws.get(n))
                .map(|tr| tr[i])
                .sum();
            let mut reserve = 0.0;
            let mut inertia = 0.0;
            for plant in &case.system.plants {
                if !plant.is_synchronous()
                    || case.system.network.node_region[&plant.node] != *region
                {
                    continue;
                }
                let pd = &result.plants[&plant.id];
                inertia += pd.units_online[i] * plant.unit_inertia_mws();
                let headroom = pd.units_online[i] * plant.p_max_mw - pd.dispatch_mw[i];
                reserve += if plant.is_cst() {
                    let rate = result.cst_energy_mwh_th[&plant.id][i] / dt - pd.dispatch_mw[i];
                    headroom.min(rate)
                } else {
                    headroom
                };
            }
            push(format!("reserve:{region}"), t, reserve_req - reserve);
            push(format!("inertia:{region}"), t, inertia_req - inertia);
        }
    }

    // Prosumer premises balance and battery carryover.
    for pros in &case.system.prosumers {
        let sol = &result.prosumers[&pros.id];
        let load = &case.scenario.prosumer_load_mw[&pros.id];
        let pv = &case.scenario.prosumer_pv_mw[&pros.id];
        for t in 1..=slots {
            let i = t - 1;
            push(
                format!("prosumer_balance:{}", pros.id),
                t,
                (sol.import_mw[i] + pv[i] - load[i] - sol.battery_mw[i] - sol.export_mw[i]).abs(),
            );
            let prev = if t == 1 {
                init.prosumer_battery_mwh[&pros.id]
            } else {
                sol.battery_energy_mwh[i - 1]
            };
            push(
                format!("prosumer_soc:{}", pros.id),
                t,
                (sol.battery_energy_mwh[i]
                    - (pros.battery_efficiency * prev + sol.battery_mw[i] * dt))
                    .abs(),
            );
        }
    }

    v
}
