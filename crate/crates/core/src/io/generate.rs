//! Deterministic synthetic case generator.
//!
//! Produces a multi-region system in the style of a small national market:
//! a handful of multi-unit coal, combined-cycle, open-cycle and hydro
//! plants spread round-robin over chained regional networks, a two-peak
//! diurnal load with weekly modulation and seeded noise, and renewable
//! clusters scaled so renewable energy hits an exact share of load energy.
//! At high penetration a solar-thermal plant with storage, a utility
//! battery, and a prosumer aggregate join the mix. A fixed seed yields a
//! bitwise-identical case.

use crate::model::{
    default_initial_state, AcLine, Case, Consumer, GeneratorCluster, HvdcLine, InitialState,
    NetworkModel, PlantClass, PowerSystem, ProsumerAggregate, Scenario, StoragePlant, TesParams,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SyntheticCaseSpec {
    pub regions: usize,
    pub slots: usize,
    pub dt_hours: f64,
    /// Maximum simultaneous system load.
    pub peak_load_mw: f64,
    /// Target renewable share of load energy over the horizon, in [0, 1).
    pub res_penetration: f64,
    /// Reserve requirement as a fraction of load.
    pub reserve_fraction: f64,
    /// Inertia requirement in MW.s per MW of load.
    pub inertia_load_factor: f64,
    /// Scales the per-plant unit counts (floor 1); < 1 gives bench-sized
    /// systems with the same structure.
    pub unit_count_scale: f64,
    pub seed: u64,
}

impl Default for SyntheticCaseSpec {
    fn default() -> Self {
        Self {
            regions: 4,
            slots: 168,
            dt_hours: 1.0,
            peak_load_mw: 10_000.0,
            res_penetration: 0.0,
            reserve_fraction: 0.10,
            inertia_load_factor: 3.0,
            unit_count_scale: 1.0,
            seed: 1,
        }
    }
}

/// Thermal/hydro fleet template: 14 plants whose capacity shares lean
/// heavily on coal with smaller gas and hydro fractions, in the spirit of
/// a coal-dominated market's zero-renewables year.
struct PlantTemplate {
    class: PlantClass,
    tag: &'static str,
    base_units: u32,
    unit_mw: f64,
    p_min_frac: f64,
    /// Per-hour ramp as a fraction of unit capacity. At least p_min_frac,
    /// so units can reach the stable band in the slot they start.
    ramp_frac: f64,
    min_up_slots: u32,
    min_down_slots: u32,
    cost_fixed: f64,
    cost_startup: f64,
    cost_variable: f64,
    inertia_s: f64,
}

const FLEET: [PlantTemplate; 14] = [
    PlantTemplate { class: PlantClass::SynThermal, tag: "coal", base_units: 12, unit_mw: 200.0, p_min_frac: 0.55, ramp_frac: 0.55, min_up_slots: 8, min_down_slots: 5, cost_fixed: 300.0, cost_startup: 2500.0, cost_variable: 24.0, inertia_s: 5.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "coal", base_units: 10, unit_mw: 220.0, p_min_frac: 0.55, ramp_frac: 0.55, min_up_slots: 8, min_down_slots: 5, cost_fixed: 320.0, cost_startup: 2700.0, cost_variable: 26.0, inertia_s: 5.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "coal", base_units: 10, unit_mw: 180.0, p_min_frac: 0.50, ramp_frac: 0.55, min_up_slots: 8, min_down_slots: 4, cost_fixed: 280.0, cost_startup: 2300.0, cost_variable: 23.0, inertia_s: 5.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "coal", base_units: 9, unit_mw: 210.0, p_min_frac: 0.55, ramp_frac: 0.60, min_up_slots: 8, min_down_slots: 5, cost_fixed: 310.0, cost_startup: 2600.0, cost_variable: 25.0, inertia_s: 5.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "coal", base_units: 10, unit_mw: 190.0, p_min_frac: 0.50, ramp_frac: 0.55, min_up_slots: 6, min_down_slots: 4, cost_fixed: 290.0, cost_startup: 2400.0, cost_variable: 27.0, inertia_s: 4.5 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "coal", base_units: 9, unit_mw: 205.0, p_min_frac: 0.55, ramp_frac: 0.55, min_up_slots: 8, min_down_slots: 5, cost_fixed: 305.0, cost_startup: 2550.0, cost_variable: 28.0, inertia_s: 5.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "ccgt", base_units: 6, unit_mw: 120.0, p_min_frac: 0.40, ramp_frac: 0.70, min_up_slots: 3, min_down_slots: 2, cost_fixed: 180.0, cost_startup: 900.0, cost_variable: 55.0, inertia_s: 4.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "ccgt", base_units: 6, unit_mw: 110.0, p_min_frac: 0.40, ramp_frac: 0.70, min_up_slots: 3, min_down_slots: 2, cost_fixed: 175.0, cost_startup: 850.0, cost_variable: 58.0, inertia_s: 4.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "ccgt", base_units: 5, unit_mw: 130.0, p_min_frac: 0.40, ramp_frac: 0.75, min_up_slots: 3, min_down_slots: 2, cost_fixed: 185.0, cost_startup: 950.0, cost_variable: 60.0, inertia_s: 4.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "ccgt", base_units: 5, unit_mw: 115.0, p_min_frac: 0.35, ramp_frac: 0.70, min_up_slots: 2, min_down_slots: 2, cost_fixed: 170.0, cost_startup: 800.0, cost_variable: 62.0, inertia_s: 3.8 },
    // Open-cycle turbines and hydro traverse their whole range within an
    // hour (ramp >= rated power), so their ramp rows clip away.
    PlantTemplate { class: PlantClass::SynThermal, tag: "ocgt", base_units: 5, unit_mw: 80.0, p_min_frac: 0.25, ramp_frac: 1.20, min_up_slots: 1, min_down_slots: 1, cost_fixed: 90.0, cost_startup: 150.0, cost_variable: 95.0, inertia_s: 3.5 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "ocgt", base_units: 5, unit_mw: 75.0, p_min_frac: 0.25, ramp_frac: 1.25, min_up_slots: 1, min_down_slots: 1, cost_fixed: 85.0, cost_startup: 140.0, cost_variable: 100.0, inertia_s: 3.5 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "hydro", base_units: 4, unit_mw: 90.0, p_min_frac: 0.10, ramp_frac: 1.00, min_up_slots: 1, min_down_slots: 1, cost_fixed: 40.0, cost_startup: 30.0, cost_variable: 8.0, inertia_s: 3.0 },
    PlantTemplate { class: PlantClass::SynThermal, tag: "hydro", base_units: 4, unit_mw: 85.0, p_min_frac: 0.10, ramp_frac: 1.00, min_up_slots: 1, min_down_slots: 1, cost_fixed: 38.0, cost_startup: 30.0, cost_variable: 9.0, inertia_s: 3.0 },
];

const NODES_PER_REGION: usize = 3;
/// Total thermal capacity relative to peak load.
const CAPACITY_MARGIN: f64 = 1.4;

/// Builds the case and its initial state (everything offline, stores at
/// their lower bounds). The result always passes model validation.
pub fn generate_case(spec: &SyntheticCaseSpec) -> (Case, InitialState) {
    assert!(spec.regions >= 1, "need at least one region");
    assert!(
        (0.0..1.0).contains(&spec.res_penetration),
        "penetration must be in [0, 1)"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let slots = spec.slots;
    let dt = spec.dt_hours;

    let network = build_network(spec, &mut rng);
    let nodes: Vec<String> = network.nodes.clone();

    // Load first: renewable sizing is defined against realized load energy.
    let (consumers, consumer_load) = build_load(spec, &nodes, &mut rng);
    let load_energy_mwh: f64 = consumer_load.values().flatten().sum::<f64>() * dt;

    // Thermal fleet, round-robin over nodes, capacity normalized to
    // CAPACITY_MARGIN x peak.
    let scale_units = |u: u32| -> u32 {
        ((u as f64 * spec.unit_count_scale).round() as u32).max(1)
    };
    let raw_capacity: f64 = FLEET
        .iter()
        .map(|t| scale_units(t.base_units) as f64 * t.unit_mw)
        .sum();
    let size_factor = CAPACITY_MARGIN * spec.peak_load_mw / raw_capacity;
    let mut plants = Vec::new();
    for (i, t) in FLEET.iter().enumerate() {
        let units = scale_units(t.base_units);
        let p_max = t.unit_mw * size_factor;
        let node = nodes[i % nodes.len()].clone();
        plants.push(GeneratorCluster {
            id: format!("{}{:02}", t.tag, i + 1),
            node,
            class: t.class,
            unit_count: units,
            p_min_mw: t.p_min_frac * p_max,
            p_max_mw: p_max,
            ramp_up_mw_per_h: t.ramp_frac * p_max,
            ramp_down_mw_per_h: t.ramp_frac * p_max,
            min_up_slots: t.min_up_slots,
            min_down_slots: t.min_down_slots,
            cost_fixed: t.cost_fixed,
            cost_startup: t.cost_startup,
            cost_shutdown: t.cost_startup * 0.1,
            cost_variable_per_mwh: t.cost_variable,
            inertia_s: t.inertia_s,
            rating_mva: 1.1 * p_max,
            tes: None,
        });
    }

    // Renewables sized so sum(RES energy) = penetration x load energy,
    // exactly, by scaling the generated shapes.
    let mut res_availability: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut cst_capture: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut storage = Vec::new();
    let mut prosumers = Vec::new();
    let mut prosumer_load: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut prosumer_pv: BTreeMap<String, Vec<f64>> = BTreeMap::new();

    if spec.res_penetration > 0.0 {
        let target_mwh = spec.res_penetration * load_energy_mwh;
        let shares = [("wind", 0.6), ("pv", 0.4)];
        // One cluster per (kind, region); equal energy split within a kind.
        // Shapes with no energy in the window (PV on a night-only horizon)
        // are dropped and their share moves to the remaining clusters, so
        // the total still meets the penetration target exactly.
        let mut shaped: Vec<(&str, usize, Vec<f64>, f64)> = Vec::new();
        for (kind, share) in shares {
            for r in 0..spec.regions {
                let shape: Vec<f64> = match kind {
                    "wind" => wind_shape(slots, &mut rng),
                    _ => pv_shape(slots, &mut rng),
                };
                let weight = if shape.iter().sum::<f64>() * dt > 1e-9 {
                    share / spec.regions as f64
                } else {
                    0.0
                };
                shaped.push((kind, r, shape, weight));
            }
        }
        let total_weight: f64 = shaped.iter().map(|(_, _, _, w)| w).sum();
        for (kind, r, shape, weight) in shaped {
            if weight == 0.0 {
                continue;
            }
            let cluster_mwh = weight / total_weight * target_mwh;
            {
                let shape_mwh: f64 = shape.iter().sum::<f64>() * dt;
                let cap = cluster_mwh / shape_mwh;
                let id = format!("{kind}{:02}", r + 1);
                let node = nodes[(r * NODES_PER_REGION + 1) % nodes.len()].clone();
                res_availability.insert(id.clone(), shape.iter().map(|v| v * cap).collect());
                plants.push(GeneratorCluster {
                    id,
                    node,
                    class: PlantClass::Res,
                    unit_count: 1,
                    p_min_mw: 0.0,
                    p_max_mw: cap,
                    ramp_up_mw_per_h: cap,
                    ramp_down_mw_per_h: cap,
                    min_up_slots: 1,
                    min_down_slots: 1,
                    cost_fixed: 0.0,
                    cost_startup: 0.0,
                    cost_shutdown: 0.0,
                    cost_variable_per_mwh: 0.5,
                    inertia_s: 0.0,
                    rating_mva: cap,
                    tes: None,
                });
            }
        }
    }

    if spec.res_penetration >= 0.5 {
        // Solar-thermal plant with an 8-hour store.
        let cst_unit_mw = 0.01 * spec.peak_load_mw;
        let cst_units = 2u32.max(scale_units(2));
        let plant_cap = cst_unit_mw * cst_units as f64;
        let e_max = 8.0 * plant_cap;
        plants.push(GeneratorCluster {
            id: "cst01".into(),
            node: nodes[0].clone(),
            class: PlantClass::SynCst,
            unit_count: cst_units,
            p_min_mw: 0.3 * cst_unit_mw,
            p_max_mw: cst_unit_mw,
            ramp_up_mw_per_h: cst_unit_mw,
            ramp_down_mw_per_h: cst_unit_mw,
            min_up_slots: 1,
            min_down_slots: 1,
            cost_fixed: 50.0,
            cost_startup: 200.0,
            cost_shutdown: 20.0,
            cost_variable_per_mwh: 2.0,
            inertia_s: 4.0,
            rating_mva: 1.1 * cst_unit_mw,
            tes: Some(TesParams {
                efficiency: 0.995,
                e_min_mwh_th: 0.0,
                e_max_mwh_th: e_max,
            }),
        });
        // Capture: midday bell sized for roughly ten full-load hours/day.
        let bell = pv_shape(slots, &mut rng);
        let bell_sum_per_day: f64 = bell.iter().sum::<f64>() * dt * 24.0 / slots as f64;
        let capture_scale = 10.0 * plant_cap / bell_sum_per_day.max(1e-9);
        cst_capture.insert(
            "cst01".into(),
            bell.iter().map(|v| v * capture_scale * dt).collect(),
        );

        let batt_mw = 0.02 * spec.peak_load_mw;
        storage.push(StoragePlant {
            id: "batt01".into(),
            node: nodes[nodes.len() / 2].clone(),
            efficiency: 0.999,
            e_min_mwh: 0.0,
            e_max_mwh: 4.0 * batt_mw,
            discharge_limit_mw: -batt_mw,
            charge_limit_mw: batt_mw,
        });

        let pros_peak = 0.03 * spec.peak_load_mw;
        prosumers.push(ProsumerAggregate {
            id: "pros01".into(),
            node: nodes[nodes.len() - 1].clone(),
            battery_efficiency: 0.998,
            battery_e_min_mwh: 0.0,
            battery_e_max_mwh: 2.0 * pros_peak,
            battery_discharge_limit_mw: -0.5 * pros_peak,
            battery_charge_limit_mw: 0.5 * pros_peak,
            feed_in_ratio: 0.3,
        });
        let shape = diurnal_shape(slots, &mut rng);
        prosumer_load.insert(
            "pros01".into(),
            shape.iter().map(|v| v * pros_peak).collect(),
        );
        let pv = pv_shape(slots, &mut rng);
        prosumer_pv.insert(
            "pros01".into(),
            pv.iter().map(|v| v * 1.2 * pros_peak).collect(),
        );
    }

    // Requirements scale with the local load.
    let mut reserve_req: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut inertia_req: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for c in &consumers {
        let trace = &consumer_load[&c.id];
        reserve_req.insert(
            c.node.clone(),
            trace.iter().map(|v| v * spec.reserve_fraction).collect(),
        );
        inertia_req.insert(
            c.node.clone(),
            trace.iter().map(|v| v * spec.inertia_load_factor).collect(),
        );
    }

    let system = PowerSystem {
        network,
        plants,
        storage,
        prosumers,
    };
    let scenario = Scenario {
        dt_hours: dt,
        slots,
        consumers,
        consumer_load_mw: consumer_load,
        prosumer_load_mw: prosumer_load,
        prosumer_pv_mw: prosumer_pv,
        res_availability_mw: res_availability,
        cst_capture_mwh_th: cst_capture,
        reserve_req_mw: reserve_req,
        inertia_req_mws: inertia_req,
    };
    let case = Case { system, scenario };
    let init = build_initial_state(&case, spec);
    (case, init)
}

/// Initial state with enough thermal units already online to carry the
/// first-slot load plus reserve. An all-dark start can be infeasible when
/// the horizon opens near the load peak, because freshly started units are
/// held to one slot of ramping.
fn build_initial_state(case: &Case, spec: &SyntheticCaseSpec) -> InitialState {
    let mut init = default_initial_state(&case.system);
    let first_load: f64 = case
        .scenario
        .consumer_load_mw
        .values()
        .map(|trace| trace.first().copied().unwrap_or(0.0))
        .sum();
    let target_cap = first_load * (1.0 + spec.reserve_fraction + 0.05);

    // Commit whole plants in merit order until the online capacity covers
    // the target; cheap baseload ends up online, peakers stay dark.
    let mut merit: Vec<&GeneratorCluster> = case
        .system
        .plants
        .iter()
        .filter(|p| p.class == PlantClass::SynThermal)
        .collect();
    merit.sort_by(|a, b| {
        a.cost_variable_per_mwh
            .partial_cmp(&b.cost_variable_per_mwh)
            .unwrap()
            .then_with(|| a.id.cmp(&b.id))
    });
    let mut committed: Vec<(&GeneratorCluster, u32)> = Vec::new();
    let mut cap = 0.0;
    for plant in merit {
        if cap >= target_cap {
            break;
        }
        let need = ((target_cap - cap) / plant.p_max_mw).ceil() as u32;
        let units = need.min(plant.unit_count);
        cap += f64::from(units) * plant.p_max_mw;
        committed.push((plant, units));
    }

    // Dispatch the committed units to meet the first-slot load exactly:
    // everyone at minimum, then fill headroom in merit order.
    let min_total: f64 = committed
        .iter()
        .map(|(p, u)| f64::from(*u) * p.p_min_mw)
        .sum();
    let mut extra = (first_load - min_total).max(0.0);
    for (plant, units) in committed {
        let lo = f64::from(units) * plant.p_min_mw;
        let headroom = f64::from(units) * plant.p_max_mw - lo;
        let take = extra.min(headroom);
        extra -= take;
        init.units_online.insert(plant.id.clone(), units);
        init.dispatch_mw.insert(plant.id.clone(), lo + take);
    }
    init
}

/// Chained regional grids: nodes within a region in a string, region r's
/// last node tied to region r+1's first. The final inter-region tie is
/// HVDC, leaving two AC islands when there are two or more regions.
fn build_network(spec: &SyntheticCaseSpec, rng: &mut ChaCha8Rng) -> NetworkModel {
    let mut nodes = Vec::new();
    let mut regions = Vec::new();
    let mut node_region = BTreeMap::new();
    for r in 1..=spec.regions {
        let region = format!("R{r}");
        regions.push(region.clone());
        for k in 1..=NODES_PER_REGION {
            let node = format!("r{r}n{k}");
            node_region.insert(node.clone(), region.clone());
            nodes.push(node);
        }
    }
    let mut ac_lines = Vec::new();
    let mut hvdc_lines = Vec::new();
    let intra_limit = 0.5 * spec.peak_load_mw;
    let inter_limit = 0.35 * spec.peak_load_mw;
    for r in 1..=spec.regions {
        for k in 1..NODES_PER_REGION {
            let jitter: f64 = rng.gen_range(0.9..1.1);
            ac_lines.push(AcLine {
                id: format!("r{r}l{k}"),
                from_node: format!("r{r}n{k}"),
                to_node: format!("r{r}n{}", k + 1),
                susceptance_mw_per_rad: intra_limit / 0.15 * jitter,
                thermal_limit_mw: intra_limit * jitter,
                loss_factor: 0.02,
            });
        }
    }
    for r in 1..spec.regions {
        let from = format!("r{r}n{NODES_PER_REGION}");
        let to = format!("r{}n1", r + 1);
        if r == spec.regions - 1 {
            hvdc_lines.push(HvdcLine {
                id: format!("hvdc{r}"),
                from_node: from,
                to_node: to,
                limit_mw: inter_limit,
            });
        } else {
            let jitter: f64 = rng.gen_range(0.9..1.1);
            ac_lines.push(AcLine {
                id: format!("tie{r}"),
                from_node: from,
                to_node: to,
                susceptance_mw_per_rad: inter_limit / 0.2 * jitter,
                thermal_limit_mw: inter_limit * jitter,
                loss_factor: 0.025,
            });
        }
    }
    NetworkModel {
        nodes,
        regions,
        node_region,
        ac_lines,
        hvdc_lines,
        angle_bound_rad: PI / 6.0,
    }
}

/// One consumer per node with a random weight; total peak normalized to
/// the requested system peak.
fn build_load(
    spec: &SyntheticCaseSpec,
    nodes: &[String],
    rng: &mut ChaCha8Rng,
) -> (Vec<Consumer>, BTreeMap<String, Vec<f64>>) {
    let weights: Vec<f64> = nodes.iter().map(|_| rng.gen_range(0.7..1.3)).collect();
    let weight_sum: f64 = weights.iter().sum();
    let shapes: Vec<Vec<f64>> = nodes
        .iter()
        .map(|_| diurnal_shape(spec.slots, rng))
        .collect();
    // Normalize against the realized total peak so max_t(sum) is exact.
    let mut peak_total: f64 = 0.0;
    for i in 0..spec.slots {
        let total: f64 = shapes
            .iter()
            .zip(&weights)
            .map(|(s, w)| s[i] * w / weight_sum)
            .sum();
        peak_total = peak_total.max(total);
    }
    let scale = spec.peak_load_mw / peak_total;
    let mut consumers = Vec::new();
    let mut load = BTreeMap::new();
    for (n, node) in nodes.iter().enumerate() {
        let id = format!("load_{node}");
        consumers.push(Consumer {
            id: id.clone(),
            node: node.clone(),
        });
        load.insert(
            id,
            shapes[n]
                .iter()
                .map(|s| s * weights[n] / weight_sum * scale)
                .collect(),
        );
    }
    (consumers, load)
}

/// Two-peak weekday shape (morning and evening bumps), weekend damping,
/// and +/-2% seeded noise. Values in (0, ~1.1].
fn diurnal_shape(slots: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..slots)
        .map(|i| {
            let hour = (i as f64) % 24.0;
            let day = i / 24;
            let weekend = day % 7 >= 5;
            let morning = 0.25 * (-((hour - 9.0) / 2.5).powi(2)).exp();
            let evening = 0.35 * (-((hour - 19.0) / 3.0).powi(2)).exp();
            let base = 0.55 + morning + evening;
            let weekly = if weekend { 0.85 } else { 1.0 };
            let noise = 1.0 + rng.gen_range(-0.02..0.02);
            base * weekly * noise
        })
        .collect()
}

/// Smooth pseudo-random wind availability in [0.05, 1] of capacity: two
/// incommensurate sinusoids with random phases plus mild noise.
fn wind_shape(slots: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let phase1: f64 = rng.gen_range(0.0..2.0 * PI);
    let phase2: f64 = rng.gen_range(0.0..2.0 * PI);
    (0..slots)
        .map(|i| {
            let t = i as f64;
            let v = 0.45
                + 0.25 * (2.0 * PI * t / 37.0 + phase1).sin()
                + 0.20 * (2.0 * PI * t / 13.0 + phase2).sin()
                + rng.gen_range(-0.05..0.05);
            v.clamp(0.05, 1.0)
        })
        .collect()
}

/// Daylight bell in [0, 1] of capacity with day-to-day strength variation.
fn pv_shape(slots: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let days = slots / 24 + 1;
    let strength: Vec<f64> = (0..days).map(|_| rng.gen_range(0.7..1.0)).collect();
    (0..slots)
        .map(|i| {
            let hour = (i as f64) % 24.0;
            let day = i / 24;
            if (6.0..=18.0).contains(&hour) {
                (PI * (hour - 6.0) / 12.0).sin().powf(1.5) * strength[day]
            } else {
                0.0
            }
        })
        .collect()
}
