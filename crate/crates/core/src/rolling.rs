//! Rolling-horizon decomposition: the horizon is solved in overlapping
//! windows of W slots, of which the first C are committed; boundary state
//! (unit counts, dispatch, stored energy, startup/shutdown obligations)
//! carries into the next window. A window spanning the whole horizon
//! reduces exactly to the monolithic solve.

use crate::dispatch::{solve_case, DispatchError, DispatchResult, PlantDispatch};
use crate::formulation::{AssembleOptions, ProsumerSolution, Variant};
use crate::metrics::{evaluate_dispatch, total_cost, PhysicalViolation};
use crate::milp::{SolveStatus, FEASIBILITY_TOL};
use crate::model::{Case, InitialState, Scenario};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HorizonPlan {
    /// Slots visible to each window's model.
    pub window_slots: usize,
    /// Leading slots of each window that become final.
    pub commit_slots: usize,
}

impl HorizonPlan {
    pub fn monolithic(total_slots: usize) -> Self {
        Self {
            window_slots: total_slots,
            commit_slots: total_slots,
        }
    }
}

/// Global 1-based slot ranges of one window.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
    pub commit_end: usize,
}

#[derive(Debug, Error)]
pub enum RollingError {
    #[error("bad horizon plan: {0}")]
    BadPlan(String),
    #[error("window {start}..{end}: {source}")]
    Window {
        start: usize,
        end: usize,
        #[source]
        source: DispatchError,
    },
    #[error("stitched solution violates {} full-horizon requirement(s), worst `{}` at slot {} by {:.3e}",
        .0.len(), .0[0].what, .0[0].slot, .0[0].amount)]
    StitchedInfeasible(Vec<PhysicalViolation>),
}

/// Splits `total_slots` into committed windows. The final window commits
/// everything it sees, lookahead included.
pub fn windows(total_slots: usize, plan: HorizonPlan) -> Result<Vec<Window>, RollingError> {
    if plan.commit_slots == 0 {
        return Err(RollingError::BadPlan("commit span must be at least 1 slot".into()));
    }
    if plan.commit_slots > plan.window_slots {
        return Err(RollingError::BadPlan(
            "commit span cannot exceed the window length".into(),
        ));
    }
    let mut out = Vec::new();
    let mut start = 1;
    while start <= total_slots {
        let end = (start + plan.window_slots - 1).min(total_slots);
        let commit_end = if end == total_slots {
            end
        } else {
            (start + plan.commit_slots - 1).min(end)
        };
        out.push(Window { start, end, commit_end });
        start = commit_end + 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowReport {
    pub window: Window,
    pub status: SolveStatus,
    pub objective: f64,
    pub gap: f64,
    pub wall_time_s: f64,
    pub node_count: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RollingResult {
    pub result: DispatchResult,
    pub windows: Vec<WindowReport>,
    /// Cost of the committed traces over the full horizon.
    pub total_cost: f64,
}

/// Solves the case over rolling windows and stitches the committed slots
/// into one full-horizon dispatch, which is then re-certified against the
/// case physics independent of any window model.
#[allow(clippy::too_many_arguments)]
pub fn run_rolling(
    case: &Case,
    init: &InitialState,
    variant: Variant,
    options: AssembleOptions,
    plan: HorizonPlan,
    gap: f64,
    time_limit: Option<Duration>,
    backend: &str,
) -> Result<RollingResult, RollingError> {
    let total = case.scenario.slots;
    let wins = windows(total, plan)?;

    // One window covering everything is the monolithic solve, byte for
    // byte: same case object, same code path.
    if wins.len() == 1 && wins[0].start == 1 && wins[0].end == total {
        let result = solve_case(case, init, variant, options, gap, time_limit, backend)
            .map_err(|source| RollingError::Window { start: 1, end: total, source })?;
        let report = WindowReport {
            window: wins[0],
            status: result.status,
            objective: result.objective,
            gap: result.gap,
            wall_time_s: result.wall_time_s,
            node_count: result.node_count,
        };
        let cost = total_cost(case, &result);
        return Ok(RollingResult {
            result,
            windows: vec![report],
            total_cost: cost,
        });
    }

    let mut stitched = empty_result(case, variant);
    let mut reports = Vec::with_capacity(wins.len());
    let mut window_init = init.clone();

    for win in &wins {
        let sub = Case {
            system: case.system.clone(),
            scenario: slice_scenario(&case.scenario, win.start, win.end),
        };
        let result = solve_case(&sub, &window_init, variant, options, gap, time_limit, backend)
            .map_err(|source| RollingError::Window {
                start: win.start,
                end: win.end,
                source,
            })?;
        reports.push(WindowReport {
            window: *win,
            status: result.status,
            objective: result.objective,
            gap: result.gap,
            wall_time_s: result.wall_time_s,
            node_count: result.node_count,
        });
        commit(&mut stitched, &result, win);
        if win.commit_end < total {
            window_init = carry_state(case, init, &stitched, win.commit_end);
        }
    }

    stitched.status = reports
        .iter()
        .map(|r| r.status)
        .fold(SolveStatus::Optimal, |acc, s| {
            if s == SolveStatus::Optimal { acc } else { s }
        });
    stitched.gap = reports.iter().map(|r| r.gap).fold(0.0, f64::max);
    stitched.wall_time_s = reports.iter().map(|r| r.wall_time_s).sum();
    stitched.node_count = reports.iter().map(|r| r.node_count).sum();
    let cost = total_cost(case, &stitched);
    stitched.objective = cost;

    let violations = evaluate_dispatch(case, init, &stitched, FEASIBILITY_TOL * 10.0);
    if !violations.is_empty() {
        return Err(RollingError::StitchedInfeasible(violations));
    }

    Ok(RollingResult {
        result: stitched,
        windows: reports,
        total_cost: cost,
    })
}

/// Boundary state at global slot `committed_through`, for a window whose
/// local slot 1 is global slot `committed_through + 1`.
pub fn carry_state(
    case: &Case,
    original_init: &InitialState,
    stitched: &DispatchResult,
    committed_through: usize,
) -> InitialState {
    let t_star = committed_through;
    let mut next = InitialState::default();
    for plant in &case.system.plants {
        if !plant.is_synchronous() {
            continue;
        }
        let pd = &stitched.plants[&plant.id];
        next.units_online
            .insert(plant.id.clone(), pd.units_online[t_star - 1].round() as u32);
        next.dispatch_mw
            .insert(plant.id.clone(), pd.dispatch_mw[t_star - 1]);

        // A startup at global slot j keeps units online through
        // j + tau_u - 1; it binds local slot k when j > t* - tau_u + k.
        let tau_u = plant.min_up_slots as usize;
        if tau_u > 1 {
            let mut hist = Vec::with_capacity(tau_u - 1);
            for k in 1..tau_u {
                let from = (t_star + k + 1).saturating_sub(tau_u).max(1);
                let recent: f64 = (from..=t_star).map(|j| pd.startups[j - 1]).sum();
                let original = original_init.must_stay_on(&plant.id, t_star + k);
                hist.push(recent.round() as u32 + original);
            }
            next.up_history.insert(plant.id.clone(), hist);
        }
        let tau_d = plant.min_down_slots as usize;
        if tau_d > 1 {
            let mut hist = Vec::with_capacity(tau_d - 1);
            for k in 1..tau_d {
                let from = (t_star + k + 1).saturating_sub(tau_d).max(1);
                let recent: f64 = (from..=t_star).map(|j| pd.shutdowns[j - 1]).sum();
                let original = original_init.must_stay_off(&plant.id, t_star + k);
                hist.push(recent.round() as u32 + original);
            }
            next.down_history.insert(plant.id.clone(), hist);
        }
    }
    for plant in &case.system.plants {
        if plant.tes.is_some() {
            next.cst_energy_mwh_th.insert(
                plant.id.clone(),
                stitched.cst_energy_mwh_th[&plant.id][t_star - 1],
            );
        }
    }
    for s in &case.system.storage {
        next.storage_energy_mwh
            .insert(s.id.clone(), stitched.storage_energy_mwh[&s.id][t_star - 1]);
    }
    for pros in &case.system.prosumers {
        next.prosumer_battery_mwh.insert(
            pros.id.clone(),
            stitched.prosumers[&pros.id].battery_energy_mwh[t_star - 1],
        );
    }
    next
}

/// Restricts every trace to global slots `start..=end` (1-based,
/// inclusive).
pub fn slice_scenario(scenario: &Scenario, start: usize, end: usize) -> Scenario {
    let cut = |m: &BTreeMap<String, Vec<f64>>| -> BTreeMap<String, Vec<f64>> {
        m.iter()
            .map(|(k, v)| (k.clone(), v[start - 1..end].to_vec()))
            .collect()
    };
    Scenario {
        dt_hours: scenario.dt_hours,
        slots: end - start + 1,
        consumers: scenario.consumers.clone(),
        consumer_load_mw: cut(&scenario.consumer_load_mw),
        prosumer_load_mw: cut(&scenario.prosumer_load_mw),
        prosumer_pv_mw: cut(&scenario.prosumer_pv_mw),
        res_availability_mw: cut(&scenario.res_availability_mw),
        cst_capture_mwh_th: cut(&scenario.cst_capture_mwh_th),
        reserve_req_mw: cut(&scenario.reserve_req_mw),
        inertia_req_mws: cut(&scenario.inertia_req_mws),
    }
}

fn empty_result(case: &Case, variant: Variant) -> DispatchResult {
    let slots = case.scenario.slots;
    let zero = || vec![0.0; slots];
    let mut plants = BTreeMap::new();
    for plant in &case.system.plants {
        plants.insert(
            plant.id.clone(),
            PlantDispatch {
                units_online: zero(),
                startups: zero(),
                shutdowns: zero(),
                dispatch_mw: zero(),
            },
        );
    }
    let mut flows_mw = BTreeMap::new();
    for line in &case.system.network.ac_lines {
        flows_mw.insert(line.id.clone(), zero());
    }
    for line in &case.system.network.hvdc_lines {
        flows_mw.insert(line.id.clone(), zero());
    }
    let mut angles_rad = BTreeMap::new();
    for node in &case.system.network.nodes {
        angles_rad.insert(node.clone(), zero());
    }
    let mut cst_energy_mwh_th = BTreeMap::new();
    for plant in &case.system.plants {
        if plant.tes.is_some() {
            cst_energy_mwh_th.insert(plant.id.clone(), zero());
        }
    }
    let mut storage_power_mw = BTreeMap::new();
    let mut storage_energy_mwh = BTreeMap::new();
    for s in &case.system.storage {
        storage_power_mw.insert(s.id.clone(), zero());
        storage_energy_mwh.insert(s.id.clone(), zero());
    }
    let mut prosumers = BTreeMap::new();
    for pros in &case.system.prosumers {
        prosumers.insert(
            pros.id.clone(),
            ProsumerSolution {
                import_mw: zero(),
                export_mw: zero(),
                battery_mw: zero(),
                battery_energy_mwh: zero(),
                objective: 0.0,
            },
        );
    }
    DispatchResult {
        variant,
        status: SolveStatus::Optimal,
        objective: 0.0,
        gap: 0.0,
        wall_time_s: 0.0,
        node_count: 0,
        plants,
        flows_mw,
        angles_rad,
        cst_energy_mwh_th,
        storage_power_mw,
        storage_energy_mwh,
        prosumers,
        counts: Default::default(),
        clipping: Default::default(),
    }
}

/// Copies the committed local slots of a window result into the global
/// stitched traces.
fn commit(stitched: &mut DispatchResult, window_result: &DispatchResult, win: &Window) {
    let n = win.commit_end - win.start + 1;
    let copy = |dst: &mut [f64], src: &[f64]| {
        dst[win.start - 1..win.start - 1 + n].copy_from_slice(&src[..n]);
    };
    for (id, pd) in &window_result.plants {
        let target = stitched.plants.get_mut(id).expect("plant");
        copy(&mut target.units_online, &pd.units_online);
        copy(&mut target.startups, &pd.startups);
        copy(&mut target.shutdowns, &pd.shutdowns);
        copy(&mut target.dispatch_mw, &pd.dispatch_mw);
    }
    for (id, trace) in &window_result.flows_mw {
        copy(stitched.flows_mw.get_mut(id).expect("line"), trace);
    }
    for (id, trace) in &window_result.angles_rad {
        copy(stitched.angles_rad.get_mut(id).expect("node"), trace);
    }
    for (id, trace) in &window_result.cst_energy_mwh_th {
        copy(stitched.cst_energy_mwh_th.get_mut(id).expect("cst"), trace);
    }
    for (id, trace) in &window_result.storage_power_mw {
        copy(stitched.storage_power_mw.get_mut(id).expect("storage"), trace);
    }
    for (id, trace) in &window_result.storage_energy_mwh {
        copy(stitched.storage_energy_mwh.get_mut(id).expect("storage"), trace);
    }
    for (id, sol) in &window_result.prosumers {
        let target = stitched.prosumers.get_mut(id).expect("prosumer");
        copy(&mut target.import_mw, &sol.import_mw);
        copy(&mut target.export_mw, &sol.export_mw);
        copy(&mut target.battery_mw, &sol.battery_mw);
        copy(&mut target.battery_energy_mwh, &sol.battery_energy_mwh);
    }
    stitched.counts = window_result.counts.clone();
    stitched.clipping = window_result.clipping.clone();
}
