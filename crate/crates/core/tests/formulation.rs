//! Formulation tests: variable accounting, per-constraint-group behavior
//! exercised through hand-sized solves, and structural invariants
//! (determinism, feasibility of every returned point, variant ordering).

use std::collections::BTreeMap;
use ucsim_core::fixtures::{micro_case, single_node_network, two_node_network};
use ucsim_core::formulation::index::Quantity;
use ucsim_core::formulation::{assemble, AssembleOptions, Variant};
use ucsim_core::milp::{check_solution, reference_bb_solve, write_lp_format, FEASIBILITY_TOL};
use ucsim_core::model::{
    default_initial_state, Case, Consumer, GeneratorCluster, InitialState, PlantClass,
    PowerSystem, Scenario, TesParams,
};

fn plant(id: &str, units: u32, p_min: f64, p_max: f64) -> GeneratorCluster {
    GeneratorCluster {
        id: id.into(),
        node: "n1".into(),
        class: PlantClass::SynThermal,
        unit_count: units,
        p_min_mw: p_min,
        p_max_mw: p_max,
        ramp_up_mw_per_h: p_max,
        ramp_down_mw_per_h: p_max,
        min_up_slots: 1,
        min_down_slots: 1,
        cost_fixed: 10.0,
        cost_startup: 50.0,
        cost_shutdown: 0.0,
        cost_variable_per_mwh: 20.0,
        inertia_s: 5.0,
        rating_mva: 100.0,
        tes: None,
    }
}

/// Single-node system: the given plants plus one consumer with the given
/// load trace. Empty requirement traces, one-hour slots.
fn small_case(plants: Vec<GeneratorCluster>, load: Vec<f64>) -> (Case, InitialState) {
    let slots = load.len();
    let case = Case {
        system: PowerSystem {
            network: single_node_network(),
            plants,
            storage: vec![],
            prosumers: vec![],
        },
        scenario: Scenario {
            dt_hours: 1.0,
            slots,
            consumers: vec![Consumer { id: "load".into(), node: "n1".into() }],
            consumer_load_mw: BTreeMap::from([("load".into(), load)]),
            prosumer_load_mw: BTreeMap::new(),
            prosumer_pv_mw: BTreeMap::new(),
            res_availability_mw: BTreeMap::new(),
            cst_capture_mwh_th: BTreeMap::new(),
            reserve_req_mw: BTreeMap::new(),
            inertia_req_mws: BTreeMap::new(),
        },
    };
    let init = default_initial_state(&case.system);
    (case, init)
}

fn solve_exact(case: &Case, init: &InitialState, variant: Variant) -> (ucsim_core::formulation::Assembled, Vec<f64>, f64) {
    let asm = assemble(case, init, variant, AssembleOptions::default()).unwrap();
    let r = reference_bb_solve(&asm.model, 0.0, None).unwrap();
    assert!(r.has_solution(), "{variant}: {:?}", r.status);
    assert!(check_solution(&asm.model, &r.values, FEASIBILITY_TOL).is_empty());
    (asm, r.values, r.objective)
}

fn value(asm: &ucsim_core::formulation::Assembled, values: &[f64], entity: &str, unit: Option<u32>, q: Quantity, t: usize) -> f64 {
    values[asm.index.lookup(entity, unit, q, t).0]
}

#[test]
fn commitment_variable_accounting_per_variant() {
    // One 8-unit plant over 24 slots: per-unit binaries give 8*3*24 = 576
    // commitment variables and 192 unit dispatches; clustered integers
    // give 3*24 = 72 and 24 plant dispatches.
    let (case, init) = small_case(vec![plant("p1", 8, 10.0, 100.0)], vec![50.0; 24]);
    let buc = assemble(&case, &init, Variant::Buc, AssembleOptions::default()).unwrap();
    assert_eq!(buc.counts.commitment_variables, 576);
    assert_eq!(buc.counts.binary_variables, 576);
    let dispatches = (0..8)
        .flat_map(|u| (1..=24).map(move |t| (u, t)))
        .filter(|&(u, t)| buc.index.get("p1", Some(u), Quantity::Dispatch, t).is_some())
        .count();
    assert_eq!(dispatches, 192);

    let mst = assemble(&case, &init, Variant::Mst, AssembleOptions::default()).unwrap();
    assert_eq!(mst.counts.commitment_variables, 72);
    assert_eq!(mst.counts.binary_variables, 0);
    assert!(mst.counts.integer_variables >= 72);

    let agg = assemble(&case, &init, Variant::Agg, AssembleOptions::default()).unwrap();
    assert_eq!(agg.counts.commitment_variables, 72);
    assert_eq!(agg.counts.binary_variables, 72);
}

#[test]
fn objective_arithmetic_one_unit_two_slots() {
    // One unit online both slots at 100 MW: fixed 10*2, one startup 50,
    // energy 20*100*2 -> 4070.
    let (case, init) = small_case(vec![plant("p1", 1, 0.0, 150.0)], vec![100.0, 100.0]);
    let (_, _, obj) = solve_exact(&case, &init, Variant::Mst);
    assert!((obj - 4070.0).abs() < 1e-6, "objective {obj}");
}

#[test]
fn zero_load_means_zero_cost() {
    let (case, init) = small_case(vec![plant("p1", 2, 0.0, 150.0)], vec![0.0, 0.0, 0.0]);
    for variant in [Variant::Mst, Variant::Buc, Variant::Agg] {
        let (_, _, obj) = solve_exact(&case, &init, variant);
        assert!(obj.abs() < 1e-9, "{variant}: {obj}");
    }
}

#[test]
fn island_balance_forces_dispatch_equal_to_load() {
    let (case, init) = small_case(vec![plant("p1", 2, 10.0, 100.0)], vec![130.0, 60.0]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    assert!((value(&asm, &vals, "p1", None, Quantity::Dispatch, 1) - 130.0).abs() < 1e-6);
    assert!((value(&asm, &vals, "p1", None, Quantity::Dispatch, 2) - 60.0).abs() < 1e-6);
}

#[test]
fn two_node_flow_carries_remote_load() {
    // Generation at n1, 100 MW load at n2, lossless line: the full 100 MW
    // flows n1 -> n2 and the angle spread matches p = B * delta.
    let (mut case, _) = small_case(vec![plant("p1", 2, 0.0, 100.0)], vec![100.0; 2]);
    case.system.network = two_node_network(1000.0, 500.0);
    case.scenario.consumers[0].node = "n2".into();
    let init = default_initial_state(&case.system);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let flow = value(&asm, &vals, "l1", None, Quantity::Flow, 1);
    assert!((flow - 100.0).abs() < 1e-6, "flow {flow}");
    let d1 = value(&asm, &vals, "n1", None, Quantity::Angle, 1);
    let d2 = value(&asm, &vals, "n2", None, Quantity::Angle, 1);
    assert!((flow - 1000.0 * (d1 - d2)).abs() < 1e-6);
}

#[test]
fn line_thermal_limit_caps_the_transfer() {
    // Same two-node system but the line only carries 40 MW: remote load of
    // 100 MW cannot be served.
    let (mut case, _) = small_case(vec![plant("p1", 2, 0.0, 100.0)], vec![100.0; 2]);
    case.system.network = two_node_network(1000.0, 40.0);
    case.scenario.consumers[0].node = "n2".into();
    let init = default_initial_state(&case.system);
    let asm = assemble(&case, &init, Variant::Mst, AssembleOptions::default()).unwrap();
    let r = reference_bb_solve(&asm.model, 0.0, None).unwrap();
    assert!(!r.has_solution());
}

#[test]
fn inertia_requirement_forces_extra_units_online()  {
    // Tiny load, but the region needs 1500 MW.s while each unit carries
    // H*S = 5*100 = 500 MW.s: exactly three units must run.
    let (mut case, init) = small_case(vec![plant("p1", 4, 0.0, 100.0)], vec![5.0; 2]);
    case.scenario.inertia_req_mws = BTreeMap::from([("n1".into(), vec![1500.0; 2])]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    for t in 1..=2 {
        let s = value(&asm, &vals, "p1", None, Quantity::Status, t);
        assert!((s - 3.0).abs() < 1e-6, "t{t}: s = {s}");
    }
}

#[test]
fn reserve_requirement_forces_headroom() {
    // Load 90 with a 50 MW reserve requirement on 100 MW units: one unit
    // has only 10 MW headroom, so a second must come online.
    let (mut case, init) = small_case(vec![plant("p1", 2, 0.0, 100.0)], vec![90.0; 2]);
    case.scenario.reserve_req_mw = BTreeMap::from([("n1".into(), vec![50.0; 2])]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let s = value(&asm, &vals, "p1", None, Quantity::Status, 1);
    assert!((s - 2.0).abs() < 1e-6, "s = {s}");
}

#[test]
fn startup_count_matches_status_jump() {
    // All-off start, three units needed immediately: u - d = s1 - 0 = 3.
    let (case, init) = small_case(vec![plant("p1", 3, 0.0, 100.0)], vec![250.0, 250.0]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let s1 = value(&asm, &vals, "p1", None, Quantity::Status, 1);
    let u1 = value(&asm, &vals, "p1", None, Quantity::Startup, 1);
    let d1 = value(&asm, &vals, "p1", None, Quantity::Shutdown, 1);
    assert!((s1 - 3.0).abs() < 1e-6);
    assert!((u1 - d1 - 3.0).abs() < 1e-6);
    // Constant commitment afterwards: no further events at optimum.
    let u2 = value(&asm, &vals, "p1", None, Quantity::Startup, 2);
    assert!(u2.abs() < 1e-6);
}

#[test]
fn ramp_limit_blocks_an_oversized_step() {
    let mut slow = plant("p1", 1, 0.0, 200.0);
    slow.ramp_up_mw_per_h = 50.0;
    slow.ramp_down_mw_per_h = 50.0;
    // 100 -> 200 needs a 100 MW step against a 50 MW/h limit.
    let (case, init) = small_case(vec![slow.clone()], vec![100.0, 200.0]);
    let asm = assemble(&case, &init, Variant::Mst, AssembleOptions::default()).unwrap();
    let r = reference_bb_solve(&asm.model, 0.0, None).unwrap();
    assert!(!r.has_solution());

    // Relaxing the limit to 120 MW/h makes the same profile feasible.
    slow.ramp_up_mw_per_h = 120.0;
    let (case, init) = small_case(vec![slow], vec![100.0, 200.0]);
    solve_exact(&case, &init, Variant::Mst);
}

#[test]
fn initial_dispatch_bounds_the_first_slot_ramp() {
    // Unit starts online at 100 MW with a 50 MW/h down-ramp: slot-1 output
    // below 50 MW is unreachable.
    let mut slow = plant("p1", 1, 0.0, 200.0);
    slow.ramp_up_mw_per_h = 50.0;
    slow.ramp_down_mw_per_h = 50.0;
    let (case, mut init) = small_case(vec![slow], vec![30.0, 30.0]);
    init.units_online.insert("p1".into(), 1);
    init.dispatch_mw.insert("p1".into(), 100.0);
    let asm = assemble(&case, &init, Variant::Mst, AssembleOptions::default()).unwrap();
    let r = reference_bb_solve(&asm.model, 0.0, None).unwrap();
    assert!(!r.has_solution());

    // Load 50 sits exactly on the boundary form p_hat - p_1 <= r_dn.
    let (case, mut init) = small_case(
        vec![{
            let mut p = plant("p1", 1, 0.0, 200.0);
            p.ramp_up_mw_per_h = 50.0;
            p.ramp_down_mw_per_h = 50.0;
            p
        }],
        vec![50.0, 50.0],
    );
    init.units_online.insert("p1".into(), 1);
    init.dispatch_mw.insert("p1".into(), 100.0);
    solve_exact(&case, &init, Variant::Mst);
}

#[test]
fn fast_plants_get_no_ramp_rows() {
    // r * dt >= p_max: the limit can never bind, so no rows are emitted and
    // the clipping report accounts for them.
    let (case, init) = small_case(vec![plant("p1", 2, 10.0, 100.0)], vec![50.0; 4]);
    let asm = assemble(&case, &init, Variant::Mst, AssembleOptions::default()).unwrap();
    assert_eq!(asm.counts.constraints_by_group.get("ramp_up"), None);
    assert_eq!(asm.counts.constraints_by_group.get("ramp_down"), None);
    assert!(asm.clipping.total_clipped() > 0);

    // With clipping disabled the rows come back.
    let opts = AssembleOptions { clipping: false, ..AssembleOptions::default() };
    let asm = assemble(&case, &init, Variant::Mst, opts).unwrap();
    assert_eq!(asm.counts.constraints_by_group.get("ramp_up"), Some(&4));
}

#[test]
fn minimum_up_time_keeps_a_started_unit_online() {
    // Startup is only worthwhile in slot 2; min_up = 3 pins the unit
    // through slot 4 even though the load is gone.
    let mut p = plant("p1", 1, 0.0, 100.0);
    p.min_up_slots = 3;
    let (case, init) = small_case(vec![p], vec![0.0, 80.0, 0.0, 0.0, 0.0]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let s: Vec<f64> = (1..=5)
        .map(|t| value(&asm, &vals, "p1", None, Quantity::Status, t))
        .collect();
    assert!(s[0].abs() < 1e-6, "slot 1 off");
    for t in [2, 3, 4] {
        assert!((s[t - 1] - 1.0).abs() < 1e-6, "slot {t} pinned on: {s:?}");
    }
    assert!(s[4].abs() < 1e-6, "slot 5 free to shut down: {s:?}");
}

#[test]
fn up_history_pins_units_at_the_boundary() {
    // Two units started just before the horizon: the carried window forces
    // s_1 >= 2 despite zero load.
    let mut p = plant("p1", 3, 0.0, 100.0);
    p.min_up_slots = 3;
    let (case, mut init) = small_case(vec![p], vec![0.0, 0.0, 0.0]);
    init.units_online.insert("p1".into(), 2);
    init.dispatch_mw.insert("p1".into(), 0.0);
    init.up_history.insert("p1".into(), vec![2, 2]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let s1 = value(&asm, &vals, "p1", None, Quantity::Status, 1);
    let s2 = value(&asm, &vals, "p1", None, Quantity::Status, 2);
    let s3 = value(&asm, &vals, "p1", None, Quantity::Status, 3);
    assert!(s1 >= 2.0 - 1e-6 && s2 >= 2.0 - 1e-6, "history window: {s1} {s2}");
    assert!(s3 < 1e-6, "window expired: {s3}");
}

#[test]
fn single_slot_updown_times_are_clipped() {
    let (case, init) = small_case(vec![plant("p1", 2, 10.0, 100.0)], vec![50.0; 4]);
    let asm = assemble(&case, &init, Variant::Mst, AssembleOptions::default()).unwrap();
    assert_eq!(asm.counts.constraints_by_group.get("min_up"), None);
    assert_eq!(asm.counts.constraints_by_group.get("min_down"), None);
}

#[test]
fn tes_carryover_decays_by_efficiency() {
    // Offline CST plant, no capture: e_t = 0.95 * e_{t-1} from 100.
    let mut cst = plant("cst", 1, 0.0, 50.0);
    cst.class = PlantClass::SynCst;
    cst.tes = Some(TesParams { efficiency: 0.95, e_min_mwh_th: 0.0, e_max_mwh_th: 200.0 });
    let (mut case, mut init) = small_case(vec![cst, plant("p1", 1, 0.0, 100.0)], vec![10.0, 10.0]);
    case.scenario.cst_capture_mwh_th = BTreeMap::from([("cst".into(), vec![0.0, 0.0])]);
    init.cst_energy_mwh_th.insert("cst".into(), 100.0);
    // Make CST energy uneconomic so it stays off and the recurrence is pure decay.
    case.system.plants[0].cost_variable_per_mwh = 1000.0;
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let e1 = value(&asm, &vals, "cst", None, Quantity::CstEnergy, 1);
    let e2 = value(&asm, &vals, "cst", None, Quantity::CstEnergy, 2);
    assert!((e1 - 95.0).abs() < 1e-6, "e1 = {e1}");
    assert!((e2 - 90.25).abs() < 1e-6, "e2 = {e2}");
}

#[test]
fn cst_generation_draws_down_the_store() {
    // eta = 1, start 100 MWh_th, capture 20, dispatch 30 MW for 1 h -> 90.
    let mut cst = plant("cst", 1, 0.0, 50.0);
    cst.class = PlantClass::SynCst;
    cst.cost_variable_per_mwh = 0.0;
    cst.tes = Some(TesParams { efficiency: 1.0, e_min_mwh_th: 0.0, e_max_mwh_th: 200.0 });
    let (mut case, mut init) = small_case(vec![cst], vec![30.0]);
    case.scenario.cst_capture_mwh_th = BTreeMap::from([("cst".into(), vec![20.0])]);
    init.cst_energy_mwh_th.insert("cst".into(), 100.0);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let e1 = value(&asm, &vals, "cst", None, Quantity::CstEnergy, 1);
    assert!((e1 - 90.0).abs() < 1e-6, "e1 = {e1}");
}

#[test]
fn storage_shifts_energy_across_slots() {
    // Generation exists only in slots 1-2 (RES), load only in slot 3: the
    // battery must charge 10+10 and discharge 20, and its SOC trace must
    // follow e_t = e_{t-1} + p_t * dt.
    let res = GeneratorCluster {
        id: "res".into(),
        node: "n1".into(),
        class: PlantClass::Res,
        unit_count: 1,
        p_min_mw: 0.0,
        p_max_mw: 50.0,
        ramp_up_mw_per_h: 50.0,
        ramp_down_mw_per_h: 50.0,
        min_up_slots: 1,
        min_down_slots: 1,
        cost_fixed: 0.0,
        cost_startup: 0.0,
        cost_shutdown: 0.0,
        cost_variable_per_mwh: 0.0,
        inertia_s: 0.0,
        rating_mva: 0.0,
        tes: None,
    };
    let (mut case, _) = small_case(vec![res], vec![0.0, 0.0, 20.0]);
    case.scenario.res_availability_mw = BTreeMap::from([("res".into(), vec![10.0, 10.0, 0.0])]);
    case.system.storage.push(ucsim_core::model::StoragePlant {
        id: "bat".into(),
        node: "n1".into(),
        efficiency: 1.0,
        e_min_mwh: 0.0,
        e_max_mwh: 50.0,
        discharge_limit_mw: -30.0,
        charge_limit_mw: 30.0,
    });
    let init = default_initial_state(&case.system);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let e: Vec<f64> = (1..=3)
        .map(|t| value(&asm, &vals, "bat", None, Quantity::StorageEnergy, t))
        .collect();
    assert!((e[0] - 10.0).abs() < 1e-6 && (e[1] - 20.0).abs() < 1e-6, "{e:?}");
    assert!(e[2].abs() < 1e-6, "{e:?}");
    let p3 = value(&asm, &vals, "bat", None, Quantity::StoragePower, 3);
    assert!((p3 + 20.0).abs() < 1e-6, "discharge is negative: {p3}");
}

#[test]
fn res_dispatch_respects_availability_and_allows_spillage() {
    // 80 MW available against 100 MW load: thermal covers the other 20.
    // Second slot has 80 MW available against 50 MW load: RES may spill.
    let res = {
        let mut r = plant("res", 1, 0.0, 200.0);
        r.class = PlantClass::Res;
        r.cost_fixed = 0.0;
        r.cost_startup = 0.0;
        r.cost_shutdown = 0.0;
        r.cost_variable_per_mwh = 0.0;
        r
    };
    let (mut case, init) = small_case(vec![res, plant("p1", 1, 0.0, 200.0)], vec![100.0, 50.0]);
    case.scenario.res_availability_mw = BTreeMap::from([("res".into(), vec![80.0, 80.0])]);
    let (asm, vals, _) = solve_exact(&case, &init, Variant::Mst);
    let res1 = value(&asm, &vals, "res", None, Quantity::Dispatch, 1);
    let th1 = value(&asm, &vals, "p1", None, Quantity::Dispatch, 1);
    assert!((res1 - 80.0).abs() < 1e-6 && (th1 - 20.0).abs() < 1e-6);
    let res2 = value(&asm, &vals, "res", None, Quantity::Dispatch, 2);
    assert!((res2 - 50.0).abs() < 1e-6, "spilled down to load: {res2}");
}

#[test]
fn assembly_is_deterministic() {
    let (case, init) = micro_case(3);
    for variant in [Variant::Mst, Variant::Buc, Variant::Agg] {
        let a = assemble(&case, &init, variant, AssembleOptions::default()).unwrap();
        let b = assemble(&case, &init, variant, AssembleOptions::default()).unwrap();
        assert_eq!(write_lp_format(&a.model), write_lp_format(&b.model), "{variant}");
    }
}

#[test]
fn aggregated_commitment_never_beats_clustered() {
    // Every AGG solution lifts to a feasible clustered solution, so the
    // clustered optimum is a lower bound.
    for seed in [1, 4] {
        let (case, init) = micro_case(seed);
        let (_, _, mst) = solve_exact(&case, &init, Variant::Mst);
        let (_, _, agg) = solve_exact(&case, &init, Variant::Agg);
        assert!(mst <= agg + 1e-6 * agg.abs().max(1.0), "seed {seed}: mst {mst} agg {agg}");
    }
}

#[test]
fn every_variant_assembles_on_random_micro_cases_without_panicking() {
    for seed in 0..25 {
        let (case, init) = micro_case(seed);
        assert!(ucsim_core::model::validate(&case, &init).is_empty(), "seed {seed}");
        for variant in [Variant::Mst, Variant::Buc, Variant::Agg] {
            let asm = assemble(&case, &init, variant, AssembleOptions::default()).unwrap();
            asm.model.validate().unwrap();
        }
    }
}
