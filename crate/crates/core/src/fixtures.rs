//! Small shared test systems used by the test suite, the benchmarks, and
//! CLI smoke runs. Everything here is deterministic in its inputs.

use crate::model::{
    default_initial_state, AcLine, Case, Consumer, GeneratorCluster, InitialState, NetworkModel,
    PlantClass, PowerSystem, ProsumerAggregate, Scenario, StoragePlant, TesParams,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// One-node network (single region, no lines).
pub fn single_node_network() -> NetworkModel {
    NetworkModel {
        nodes: vec!["n1".into()],
        regions: vec!["R1".into()],
        node_region: BTreeMap::from([("n1".into(), "R1".into())]),
        ac_lines: vec![],
        hvdc_lines: vec![],
        angle_bound_rad: std::f64::consts::FRAC_PI_6,
    }
}

/// Two nodes joined by one AC line, one region.
pub fn two_node_network(susceptance: f64, limit_mw: f64) -> NetworkModel {
    NetworkModel {
        nodes: vec!["n1".into(), "n2".into()],
        regions: vec!["R1".into()],
        node_region: BTreeMap::from([
            ("n1".into(), "R1".into()),
            ("n2".into(), "R1".into()),
        ]),
        ac_lines: vec![AcLine {
            id: "l1".into(),
            from_node: "n1".into(),
            to_node: "n2".into(),
            susceptance_mw_per_rad: susceptance,
            thermal_limit_mw: limit_mw,
            loss_factor: 0.0,
        }],
        hvdc_lines: vec![],
        angle_bound_rad: std::f64::consts::FRAC_PI_6,
    }
}

fn thermal(
    id: &str,
    node: &str,
    units: u32,
    p_min: f64,
    p_max: f64,
    ramp: f64,
    min_up: u32,
    min_down: u32,
    costs: (f64, f64, f64, f64),
) -> GeneratorCluster {
    GeneratorCluster {
        id: id.into(),
        node: node.into(),
        class: PlantClass::SynThermal,
        unit_count: units,
        p_min_mw: p_min,
        p_max_mw: p_max,
        ramp_up_mw_per_h: ramp,
        ramp_down_mw_per_h: ramp,
        min_up_slots: min_up,
        min_down_slots: min_down,
        cost_fixed: costs.0,
        cost_startup: costs.1,
        cost_shutdown: costs.2,
        cost_variable_per_mwh: costs.3,
        inertia_s: 5.0,
        rating_mva: 1.1 * p_max,
        tes: None,
    }
}

fn scenario_skeleton(slots: usize, consumers: Vec<Consumer>) -> Scenario {
    Scenario {
        dt_hours: 1.0,
        slots,
        consumers,
        consumer_load_mw: BTreeMap::new(),
        prosumer_load_mw: BTreeMap::new(),
        prosumer_pv_mw: BTreeMap::new(),
        res_availability_mw: BTreeMap::new(),
        cst_capture_mwh_th: BTreeMap::new(),
        reserve_req_mw: BTreeMap::new(),
        inertia_req_mws: BTreeMap::new(),
    }
}

/// Randomized micro-case exercising ramps, minimum up/down windows, a CST
/// plant with storage, and a utility battery on one node. Small enough for
/// the reference solver at gap 0. All plants built of identical units with
/// all-off symmetric initial state, so per-unit and clustered commitment
/// must agree exactly.
pub fn micro_case(seed: u64) -> (Case, InitialState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = rng.gen_range(6..=10);

    let coal_units = rng.gen_range(2..=3);
    let coal_pmax = rng.gen_range(80.0..120.0);
    let peaker_pmax = rng.gen_range(40.0..70.0);
    let mut plants = vec![
        thermal(
            "coal",
            "n1",
            coal_units,
            0.5 * coal_pmax,
            coal_pmax,
            0.55 * coal_pmax,
            rng.gen_range(2..=3),
            2,
            (120.0, 600.0, 60.0, rng.gen_range(18.0..26.0)),
        ),
        thermal(
            "peaker",
            "n1",
            2,
            0.2 * peaker_pmax,
            peaker_pmax,
            1.5 * peaker_pmax, // traverses its range in one slot: clipped
            1,
            1,
            (40.0, 80.0, 8.0, rng.gen_range(60.0..90.0)),
        ),
    ];
    let cst_pmax = rng.gen_range(25.0..40.0);
    plants.push(GeneratorCluster {
        id: "cst".into(),
        node: "n1".into(),
        class: PlantClass::SynCst,
        unit_count: rng.gen_range(1..=2),
        p_min_mw: 0.3 * cst_pmax,
        p_max_mw: cst_pmax,
        ramp_up_mw_per_h: cst_pmax,
        ramp_down_mw_per_h: cst_pmax,
        min_up_slots: 1,
        min_down_slots: 1,
        cost_fixed: 20.0,
        cost_startup: 50.0,
        cost_shutdown: 5.0,
        cost_variable_per_mwh: 3.0,
        inertia_s: 4.0,
        rating_mva: 1.1 * cst_pmax,
        tes: Some(TesParams {
            efficiency: 0.99,
            e_min_mwh_th: 0.0,
            e_max_mwh_th: 6.0 * cst_pmax,
        }),
    });

    let batt_mw = rng.gen_range(10.0..25.0);
    let storage = vec![StoragePlant {
        id: "batt".into(),
        node: "n1".into(),
        efficiency: 0.995,
        e_min_mwh: 0.0,
        e_max_mwh: 3.0 * batt_mw,
        discharge_limit_mw: -batt_mw,
        charge_limit_mw: batt_mw,
    }];

    let capacity: f64 = plants
        .iter()
        .map(|p| p.unit_count as f64 * p.p_max_mw)
        .sum();
    let load: Vec<f64> = (0..slots)
        .map(|i| {
            let swing = 0.25 * ((i as f64) * std::f64::consts::PI / 4.0).sin();
            capacity * (0.45 + swing) * rng.gen_range(0.95..1.05)
        })
        .collect();
    let capture: Vec<f64> = (0..slots)
        .map(|_| rng.gen_range(0.0..0.8) * cst_pmax)
        .collect();
    let reserve: Vec<f64> = load.iter().map(|v| 0.05 * v).collect();

    let mut scenario = scenario_skeleton(
        slots,
        vec![Consumer {
            id: "load".into(),
            node: "n1".into(),
        }],
    );
    scenario.consumer_load_mw.insert("load".into(), load);
    scenario.cst_capture_mwh_th.insert("cst".into(), capture);
    scenario.reserve_req_mw.insert("n1".into(), reserve);
    scenario
        .inertia_req_mws
        .insert("n1".into(), vec![0.0; slots]);

    let case = Case {
        system: PowerSystem {
            network: single_node_network(),
            plants,
            storage,
            prosumers: vec![],
        },
        scenario,
    };
    let init = default_initial_state(&case.system);
    (case, init)
}

/// Illustrative divergence fixture: one plant of three identical units
/// (p_min 0.4, p_max 1.0 per unit, H = 5 s) plus an expensive
/// no-inertia backstop, at a flat total demand `p_total`. The aggregated
/// formulation can only commit all three units or none.
pub fn three_unit_case(p_total: f64, slots: usize) -> (Case, InitialState) {
    let plant = GeneratorCluster {
        id: "plant".into(),
        node: "n1".into(),
        class: PlantClass::SynThermal,
        unit_count: 3,
        p_min_mw: 0.4,
        p_max_mw: 1.0,
        ramp_up_mw_per_h: 1.0,
        ramp_down_mw_per_h: 1.0,
        min_up_slots: 1,
        min_down_slots: 1,
        cost_fixed: 0.05,
        cost_startup: 0.02,
        cost_shutdown: 0.01,
        cost_variable_per_mwh: 1.0,
        inertia_s: 5.0,
        rating_mva: 1.0,
        tes: None,
    };
    // Backstop: dispatchable, no commitment, no inertia, priced far above
    // the plant so it only serves demand the plant cannot.
    let backstop = GeneratorCluster {
        id: "backstop".into(),
        node: "n1".into(),
        class: PlantClass::Res,
        unit_count: 1,
        p_min_mw: 0.0,
        p_max_mw: 10.0,
        ramp_up_mw_per_h: 10.0,
        ramp_down_mw_per_h: 10.0,
        min_up_slots: 1,
        min_down_slots: 1,
        cost_fixed: 0.0,
        cost_startup: 0.0,
        cost_shutdown: 0.0,
        cost_variable_per_mwh: 1000.0,
        inertia_s: 0.0,
        rating_mva: 10.0,
        tes: None,
    };
    let mut scenario = scenario_skeleton(
        slots,
        vec![Consumer {
            id: "load".into(),
            node: "n1".into(),
        }],
    );
    scenario
        .consumer_load_mw
        .insert("load".into(), vec![p_total; slots]);
    scenario
        .res_availability_mw
        .insert("backstop".into(), vec![10.0; slots]);
    scenario
        .reserve_req_mw
        .insert("n1".into(), vec![0.0; slots]);
    scenario
        .inertia_req_mws
        .insert("n1".into(), vec![0.0; slots]);

    let case = Case {
        system: PowerSystem {
            network: single_node_network(),
            plants: vec![plant, backstop],
            storage: vec![],
            prosumers: vec![],
        },
        scenario,
    };
    let init = default_initial_state(&case.system);
    (case, init)
}

/// Prosumer-only fixture: one cheap flexible plant serving net demand from
/// a prosumer aggregate with PV and a battery. Used to compare the
/// presolved and KKT-embedded treatments.
pub fn prosumer_case(seed: u64, slots: usize) -> (Case, InitialState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen_pmax = 40.0;
    let plants = vec![thermal(
        "gen",
        "n1",
        2,
        0.1 * gen_pmax,
        gen_pmax,
        gen_pmax,
        1,
        1,
        (5.0, 10.0, 1.0, 20.0),
    )];
    let pros_peak = 10.0;
    let prosumers = vec![ProsumerAggregate {
        id: "pros".into(),
        node: "n1".into(),
        battery_efficiency: 0.99,
        battery_e_min_mwh: 0.0,
        battery_e_max_mwh: rng.gen_range(1.0..2.0) * pros_peak,
        battery_discharge_limit_mw: -0.6 * pros_peak,
        battery_charge_limit_mw: 0.6 * pros_peak,
        feed_in_ratio: rng.gen_range(0.0..0.6),
    }];
    let load: Vec<f64> = (0..slots)
        .map(|_| rng.gen_range(0.3..1.0) * pros_peak)
        .collect();
    let pv: Vec<f64> = (0..slots)
        .map(|i| {
            let hour = (i % 24) as f64;
            if (7.0..=17.0).contains(&hour) {
                rng.gen_range(0.6..1.4) * pros_peak
            } else {
                0.0
            }
        })
        .collect();
    let base_load: Vec<f64> = (0..slots)
        .map(|_| rng.gen_range(10.0..25.0))
        .collect();

    let mut scenario = scenario_skeleton(
        slots,
        vec![Consumer {
            id: "town".into(),
            node: "n1".into(),
        }],
    );
    scenario.consumer_load_mw.insert("town".into(), base_load);
    scenario.prosumer_load_mw.insert("pros".into(), load);
    scenario.prosumer_pv_mw.insert("pros".into(), pv);
    scenario
        .reserve_req_mw
        .insert("n1".into(), vec![0.0; slots]);
    scenario
        .inertia_req_mws
        .insert("n1".into(), vec![0.0; slots]);

    let case = Case {
        system: PowerSystem {
            network: single_node_network(),
            plants,
            storage: vec![],
            prosumers,
        },
        scenario,
    };
    let init = default_initial_state(&case.system);
    (case, init)
}

/// Storage-free two-plant fixture with MUDT windows, for rolling-horizon
/// consistency checks: overlap >= max(min_up, min_down) keeps stitched
/// commitments feasible on the full horizon.
pub fn rolling_case(seed: u64, slots: usize) -> (Case, InitialState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_pmax = 100.0;
    let plants = vec![
        thermal(
            "base",
            "n1",
            3,
            0.5 * base_pmax,
            base_pmax,
            0.6 * base_pmax,
            3,
            2,
            (100.0, 500.0, 50.0, 20.0),
        ),
        thermal(
            "peak",
            "n2",
            2,
            10.0,
            60.0,
            90.0,
            1,
            1,
            (30.0, 60.0, 6.0, 70.0),
        ),
    ];
    let capacity = 3.0 * base_pmax + 120.0;
    let load: Vec<f64> = (0..slots)
        .map(|i| {
            let swing = 0.2 * ((i as f64) * std::f64::consts::PI / 6.0).sin();
            capacity * (0.4 + swing) * rng.gen_range(0.97..1.03)
        })
        .collect();
    let split: Vec<f64> = load.iter().map(|v| 0.6 * v).collect();
    let rest: Vec<f64> = load.iter().map(|v| 0.4 * v).collect();

    let mut scenario = scenario_skeleton(
        slots,
        vec![
            Consumer {
                id: "c1".into(),
                node: "n1".into(),
            },
            Consumer {
                id: "c2".into(),
                node: "n2".into(),
            },
        ],
    );
    scenario.consumer_load_mw.insert("c1".into(), split);
    scenario.consumer_load_mw.insert("c2".into(), rest);
    scenario
        .reserve_req_mw
        .insert("n1".into(), load.iter().map(|v| 0.04 * v).collect());
    scenario
        .inertia_req_mws
        .insert("n1".into(), vec![0.0; slots]);

    let case = Case {
        system: PowerSystem {
            network: two_node_network(3000.0, 250.0),
            plants,
            storage: vec![],
            prosumers: vec![],
        },
        scenario,
    };
    let init = default_initial_state(&case.system);
    (case, init)
}
