//! Domain data model for networks, plants, storage, prosumers, and
//! scenarios.
//!
//! Conventions: powers in MW, energies in MWh (thermal energy in MWh_th),
//! inertia contributions in MW.s, angles in radians, time slot-indexed
//! 1..T with uniform resolution `dt_hours`. All values are immutable after
//! construction and safe for concurrent reads.

mod validate;

pub use validate::{validate, Violation};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_ANGLE_BOUND_RAD: f64 = std::f64::consts::FRAC_PI_6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AcLine {
    pub id: String,
    pub from_node: String,
    pub to_node: String,
    /// Flow per radian of angle difference: p [MW] = B (delta_x - delta_y).
    pub susceptance_mw_per_rad: f64,
    pub thermal_limit_mw: f64,
    /// Fraction of flow lost on the line; 0 = lossless.
    #[serde(default)]
    pub loss_factor: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HvdcLine {
    pub id: String,
    pub from_node: String,
    pub to_node: String,
    pub limit_mw: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkModel {
    pub nodes: Vec<String>,
    pub regions: Vec<String>,
    /// Every node maps to exactly one region; the regions partition the
    /// node set.
    pub node_region: BTreeMap<String, String>,
    pub ac_lines: Vec<AcLine>,
    pub hvdc_lines: Vec<HvdcLine>,
    #[serde(default = "default_angle_bound")]
    pub angle_bound_rad: f64,
}

fn default_angle_bound() -> f64 {
    DEFAULT_ANGLE_BOUND_RAD
}

impl NetworkModel {
    pub fn nodes_in_region<'a>(&'a self, region: &'a str) -> impl Iterator<Item = &'a str> {
        self.node_region
            .iter()
            .filter(move |(_, r)| r.as_str() == region)
            .map(|(n, _)| n.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantClass {
    /// Conventional synchronous thermal/hydro units.
    SynThermal,
    /// Concentrated solar thermal: synchronous, with a thermal energy store.
    SynCst,
    /// Variable renewables (wind, PV), aggregated to a single unit.
    Res,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TesParams {
    /// Slot-to-slot carryover efficiency, in (0, 1].
    pub efficiency: f64,
    pub e_min_mwh_th: f64,
    pub e_max_mwh_th: f64,
}

/// A plant of `unit_count` identical units. Limits, ramps, costs, and
/// inertia are per unit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorCluster {
    pub id: String,
    pub node: String,
    pub class: PlantClass,
    pub unit_count: u32,
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    pub ramp_up_mw_per_h: f64,
    pub ramp_down_mw_per_h: f64,
    pub min_up_slots: u32,
    pub min_down_slots: u32,
    pub cost_fixed: f64,
    pub cost_startup: f64,
    pub cost_shutdown: f64,
    pub cost_variable_per_mwh: f64,
    pub inertia_s: f64,
    pub rating_mva: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tes: Option<TesParams>,
}

impl GeneratorCluster {
    pub fn is_synchronous(&self) -> bool {
        matches!(self.class, PlantClass::SynThermal | PlantClass::SynCst)
    }

    pub fn is_cst(&self) -> bool {
        self.class == PlantClass::SynCst
    }

    /// Inertia contribution of one online unit, in MW.s.
    pub fn unit_inertia_mws(&self) -> f64 {
        self.inertia_s * self.rating_mva
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StoragePlant {
    pub id: String,
    pub node: String,
    /// Slot-to-slot carryover efficiency, in (0, 1].
    pub efficiency: f64,
    pub e_min_mwh: f64,
    pub e_max_mwh: f64,
    /// Maximum discharge rate; non-positive by convention (power flow is
    /// positive when charging).
    pub discharge_limit_mw: f64,
    pub charge_limit_mw: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProsumerAggregate {
    pub id: String,
    pub node: String,
    pub battery_efficiency: f64,
    pub battery_e_min_mwh: f64,
    pub battery_e_max_mwh: f64,
    /// Non-positive by convention, like utility storage.
    pub battery_discharge_limit_mw: f64,
    pub battery_charge_limit_mw: f64,
    /// Feed-in price ratio; 0 means pure self-consumption maximization.
    #[serde(default)]
    pub feed_in_ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Consumer {
    pub id: String,
    pub node: String,
}

/// Time-indexed traces plus horizon configuration. Trace vectors are
/// slot-indexed 0..T-1 (slot t in equations is index t-1 here).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub dt_hours: f64,
    pub slots: usize,
    pub consumers: Vec<Consumer>,
    pub consumer_load_mw: BTreeMap<String, Vec<f64>>,
    pub prosumer_load_mw: BTreeMap<String, Vec<f64>>,
    pub prosumer_pv_mw: BTreeMap<String, Vec<f64>>,
    /// Per RES cluster: maximum output, MW.
    pub res_availability_mw: BTreeMap<String, Vec<f64>>,
    /// Per CST plant: thermal energy captured per slot, MWh_th.
    pub cst_capture_mwh_th: BTreeMap<String, Vec<f64>>,
    /// Per node: regional reserve requirement contribution, MW.
    pub reserve_req_mw: BTreeMap<String, Vec<f64>>,
    /// Per node: synchronous inertia requirement contribution, MW.s.
    pub inertia_req_mws: BTreeMap<String, Vec<f64>>,
}

/// Boundary conditions at the start of a (sub-)horizon.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    /// Units online per plant at horizon start.
    pub units_online: BTreeMap<String, u32>,
    /// Plant dispatch at horizon start, MW.
    pub dispatch_mw: BTreeMap<String, f64>,
    pub cst_energy_mwh_th: BTreeMap<String, f64>,
    pub storage_energy_mwh: BTreeMap<String, f64>,
    pub prosumer_battery_mwh: BTreeMap<String, f64>,
    /// `up_history[g][k-1]` = units that must remain online through slot k
    /// of the new horizon (k = 1..min_up-1), from startups late in the
    /// previous horizon.
    pub up_history: BTreeMap<String, Vec<u32>>,
    /// Analogous for shutdowns: units that must remain offline.
    pub down_history: BTreeMap<String, Vec<u32>>,
}

impl InitialState {
    pub fn units_online(&self, plant: &str) -> u32 {
        self.units_online.get(plant).copied().unwrap_or(0)
    }

    pub fn dispatch(&self, plant: &str) -> f64 {
        self.dispatch_mw.get(plant).copied().unwrap_or(0.0)
    }

    pub fn must_stay_on(&self, plant: &str, slot: usize) -> u32 {
        self.up_history
            .get(plant)
            .and_then(|h| h.get(slot - 1))
            .copied()
            .unwrap_or(0)
    }

    pub fn must_stay_off(&self, plant: &str, slot: usize) -> u32 {
        self.down_history
            .get(plant)
            .and_then(|h| h.get(slot - 1))
            .copied()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerSystem {
    pub network: NetworkModel,
    pub plants: Vec<GeneratorCluster>,
    pub storage: Vec<StoragePlant>,
    pub prosumers: Vec<ProsumerAggregate>,
}

/// A complete, self-consistent simulation input: the physical system plus
/// the scenario traces covering the horizon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Case {
    pub system: PowerSystem,
    pub scenario: Scenario,
}

/// All plants offline with zero dispatch, all stores at their lower bound,
/// empty up/down histories.
pub fn default_initial_state(system: &PowerSystem) -> InitialState {
    let mut init = InitialState::default();
    for plant in &system.plants {
        if plant.is_synchronous() {
            init.units_online.insert(plant.id.clone(), 0);
            init.dispatch_mw.insert(plant.id.clone(), 0.0);
        }
        if let Some(tes) = &plant.tes {
            init.cst_energy_mwh_th
                .insert(plant.id.clone(), tes.e_min_mwh_th);
        }
    }
    for s in &system.storage {
        init.storage_energy_mwh.insert(s.id.clone(), s.e_min_mwh);
    }
    for p in &system.prosumers {
        init.prosumer_battery_mwh
            .insert(p.id.clone(), p.battery_e_min_mwh);
    }
    init
}
