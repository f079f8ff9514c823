//! Invariant and cross-reference checks. Violations are data, not errors:
//! the report lists everything wrong at once.

use super::{Case, InitialState, PlantClass};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

macro_rules! when {
    ($out:ident, $cond:expr, $entity:expr, $($msg:tt)*) => {
        if $cond {
            $out.push(Violation {
                entity: $entity.to_string(),
                message: format!($($msg)*),
            });
        }
    };
}

/// Checks every model invariant plus cross-references. An empty report
/// means the case is safe to feed to the formulation without index errors.
pub fn validate(case: &Case, init: &InitialState) -> Vec<Violation> {
    let mut out = Vec::new();
    let net = &case.system.network;
    let sc = &case.scenario;
    let nodes: BTreeSet<&str> = net.nodes.iter().map(|s| s.as_str()).collect();
    let regions: BTreeSet<&str> = net.regions.iter().map(|s| s.as_str()).collect();

    when!(out, nodes.len() != net.nodes.len(), "network", "duplicate node ids");
    for node in &net.nodes {
        match net.node_region.get(node) {
            None => when!(out, true, node, "node is not assigned to a region"),
            Some(r) => when!(out, !regions.contains(r.as_str()), node, "unknown region {r}"),
        }
    }
    for (node, _) in &net.node_region {
        when!(out, !nodes.contains(node.as_str()), "network", "region map references unknown node {node}");
    }
    for l in &net.ac_lines {
        when!(out, !nodes.contains(l.from_node.as_str()), l.id, "unknown from-node {}", l.from_node);
        when!(out, !nodes.contains(l.to_node.as_str()), l.id, "unknown to-node {}", l.to_node);
        when!(out, l.susceptance_mw_per_rad <= 0.0, l.id, "susceptance must be positive");
        when!(out, l.thermal_limit_mw < 0.0, l.id, "thermal limit must be nonnegative");
        when!(out, !(0.0..1.0).contains(&l.loss_factor), l.id, "loss factor must be in [0,1)");
    }
    for l in &net.hvdc_lines {
        when!(out, !nodes.contains(l.from_node.as_str()), l.id, "unknown from-node {}", l.from_node);
        when!(out, !nodes.contains(l.to_node.as_str()), l.id, "unknown to-node {}", l.to_node);
        when!(out, l.limit_mw < 0.0, l.id, "limit must be nonnegative");
    }
    when!(
        out,
        !(net.angle_bound_rad > 0.0 && net.angle_bound_rad <= std::f64::consts::FRAC_PI_2),
        "network",
        "angle bound must be in (0, pi/2]"
    );

    let plant_ids: BTreeSet<&str> = case.system.plants.iter().map(|p| p.id.as_str()).collect();
    when!(out, plant_ids.len() != case.system.plants.len(), "plants", "duplicate plant ids");
    for p in &case.system.plants {
        when!(out, !nodes.contains(p.node.as_str()), p.id, "unknown node {}", p.node);
        when!(out, p.unit_count < 1, p.id, "unit count must be at least 1");
        when!(out, p.p_min_mw < 0.0, p.id, "p_min must be nonnegative");
        when!(out, p.p_min_mw > p.p_max_mw, p.id, "p_min {} exceeds p_max {}", p.p_min_mw, p.p_max_mw);
        when!(out, p.min_up_slots < 1 || p.min_down_slots < 1, p.id, "minimum up/down times must be at least one slot");
        when!(out, p.inertia_s < 0.0 || p.rating_mva < 0.0, p.id, "inertia and rating must be nonnegative");
        when!(out, p.ramp_up_mw_per_h < 0.0 || p.ramp_down_mw_per_h < 0.0, p.id, "ramp rates must be nonnegative");
        match p.class {
            PlantClass::Res => {
                when!(out, p.unit_count != 1, p.id, "RES must be aggregated: unit count must be 1");
                when!(out, p.min_up_slots != 1 || p.min_down_slots != 1, p.id, "RES must have unit up/down times");
                when!(out, p.cost_startup != 0.0 || p.cost_shutdown != 0.0, p.id, "RES must have zero startup/shutdown costs");
                when!(out, p.tes.is_some(), p.id, "RES cannot carry a TES");
                when!(out, !sc.res_availability_mw.contains_key(&p.id), p.id, "missing RES availability trace");
            }
            PlantClass::SynCst => match &p.tes {
                None => when!(out, true, p.id, "CST plant must declare TES parameters"),
                Some(tes) => {
                    when!(out, tes.e_min_mwh_th > tes.e_max_mwh_th, p.id, "TES lower bound exceeds upper bound");
                    when!(out, !(tes.efficiency > 0.0 && tes.efficiency <= 1.0), p.id, "TES efficiency must be in (0,1]");
                    when!(out, !sc.cst_capture_mwh_th.contains_key(&p.id), p.id, "missing CST thermal capture trace");
                }
            },
            PlantClass::SynThermal => {
                when!(out, p.tes.is_some(), p.id, "non-CST plant cannot carry a TES");
            }
        }
    }

    for s in &case.system.storage {
        when!(out, !nodes.contains(s.node.as_str()), s.id, "unknown node {}", s.node);
        when!(out, s.e_min_mwh > s.e_max_mwh, s.id, "energy lower bound exceeds upper bound");
        when!(out, s.discharge_limit_mw > 0.0, s.id, "discharge limit must be non-positive");
        when!(out, s.charge_limit_mw < 0.0, s.id, "charge limit must be nonnegative");
        when!(out, !(s.efficiency > 0.0 && s.efficiency <= 1.0), s.id, "efficiency must be in (0,1]");
    }

    for p in &case.system.prosumers {
        when!(out, !nodes.contains(p.node.as_str()), p.id, "unknown node {}", p.node);
        when!(out, p.battery_e_min_mwh > p.battery_e_max_mwh, p.id, "battery lower bound exceeds upper bound");
        when!(out, p.battery_discharge_limit_mw > 0.0, p.id, "battery discharge limit must be non-positive");
        when!(out, p.battery_charge_limit_mw < 0.0, p.id, "battery charge limit must be nonnegative");
        when!(out, !(p.battery_efficiency > 0.0 && p.battery_efficiency <= 1.0), p.id, "battery efficiency must be in (0,1]");
        when!(out, !(0.0..=1.0).contains(&p.feed_in_ratio), p.id, "feed-in ratio must be in [0,1]");
        when!(out, !sc.prosumer_load_mw.contains_key(&p.id), p.id, "missing prosumer load trace");
        when!(out, !sc.prosumer_pv_mw.contains_key(&p.id), p.id, "missing prosumer PV trace");
    }

    // Scenario traces: length, nonnegativity, and reference checks.
    when!(out, sc.dt_hours <= 0.0, "scenario", "time resolution must be positive");
    when!(out, sc.slots == 0, "scenario", "horizon must span at least one slot");
    for c in &sc.consumers {
        when!(out, !nodes.contains(c.node.as_str()), c.id, "unknown node {}", c.node);
        when!(out, !sc.consumer_load_mw.contains_key(&c.id), c.id, "missing load trace");
    }
    let consumer_ids: BTreeSet<&str> = sc.consumers.iter().map(|c| c.id.as_str()).collect();
    let prosumer_ids: BTreeSet<&str> = case.system.prosumers.iter().map(|p| p.id.as_str()).collect();

    let trace_groups: [(&str, &std::collections::BTreeMap<String, Vec<f64>>, &BTreeSet<&str>); 6] = [
        ("consumer load", &sc.consumer_load_mw, &consumer_ids),
        ("prosumer load", &sc.prosumer_load_mw, &prosumer_ids),
        ("prosumer PV", &sc.prosumer_pv_mw, &prosumer_ids),
        ("RES availability", &sc.res_availability_mw, &plant_ids),
        ("CST capture", &sc.cst_capture_mwh_th, &plant_ids),
        ("reserve requirement", &sc.reserve_req_mw, &nodes),
    ];
    for (kind, traces, ids) in trace_groups {
        for (id, trace) in traces.iter() {
            when!(out, !ids.contains(id.as_str()), id, "{kind} trace references undeclared entity");
            when!(out, trace.len() != sc.slots, id, "{kind} trace has {} slots, horizon has {}", trace.len(), sc.slots);
            when!(out, trace.iter().any(|v| *v < 0.0), id, "{kind} trace has negative entries");
        }
    }
    for (id, trace) in sc.inertia_req_mws.iter() {
        when!(out, !nodes.contains(id.as_str()), id, "inertia requirement trace references undeclared node");
        when!(out, trace.len() != sc.slots, id, "inertia requirement trace has {} slots, horizon has {}", trace.len(), sc.slots);
        when!(out, trace.iter().any(|v| *v < 0.0), id, "inertia requirement trace has negative entries");
    }

    // Initial state consistency.
    for (id, &s_hat) in &init.units_online {
        match case.system.plants.iter().find(|p| p.id == *id) {
            None => when!(out, true, id, "initial state references undeclared plant"),
            Some(p) => {
                when!(out, s_hat > p.unit_count, id, "initial online units {s_hat} exceed unit count {}", p.unit_count);
                let p_hat = init.dispatch(id);
                if s_hat > 0 {
                    let lo = p.p_min_mw * s_hat as f64;
                    let hi = p.p_max_mw * s_hat as f64;
                    when!(out, p_hat < lo - 1e-9 || p_hat > hi + 1e-9, id, "initial dispatch {p_hat} outside [{lo}, {hi}]");
                } else {
                    when!(out, p_hat.abs() > 1e-9, id, "initial dispatch must be zero when no units are online");
                }
                if let Some(hist) = init.up_history.get(id) {
                    when!(out, hist.len() + 1 > p.min_up_slots as usize, id, "up history longer than minimum up time allows");
                    when!(out, hist.iter().any(|&u| u > s_hat), id, "up history demands more units than are online");
                }
                if let Some(hist) = init.down_history.get(id) {
                    when!(out, hist.len() + 1 > p.min_down_slots as usize, id, "down history longer than minimum down time allows");
                    when!(out, hist.iter().any(|&d| d > p.unit_count - s_hat), id, "down history demands more units than are offline");
                }
            }
        }
    }
    for (id, &e) in &init.cst_energy_mwh_th {
        match case.system.plants.iter().find(|p| p.id == *id).and_then(|p| p.tes.as_ref()) {
            None => when!(out, true, id, "initial TES energy references a plant without TES"),
            Some(tes) => when!(out, e < tes.e_min_mwh_th - 1e-9 || e > tes.e_max_mwh_th + 1e-9, id, "initial TES energy {e} outside bounds"),
        }
    }
    for (id, &e) in &init.storage_energy_mwh {
        match case.system.storage.iter().find(|s| s.id == *id) {
            None => when!(out, true, id, "initial storage energy references undeclared storage"),
            Some(s) => when!(out, e < s.e_min_mwh - 1e-9 || e > s.e_max_mwh + 1e-9, id, "initial storage energy {e} outside bounds"),
        }
    }
    for (id, &e) in &init.prosumer_battery_mwh {
        match case.system.prosumers.iter().find(|p| p.id == *id) {
            None => when!(out, true, id, "initial battery energy references undeclared prosumer"),
            Some(p) => when!(out, e < p.battery_e_min_mwh - 1e-9 || e > p.battery_e_max_mwh + 1e-9, id, "initial battery energy {e} outside bounds"),
        }
    }
    out
}
