//! Data-model invariant checks: the validator must accept all shipped
//! fixtures untouched and must name the offending entity when a single
//! field is corrupted.

use ucsim_core::fixtures::{micro_case, prosumer_case, rolling_case, three_unit_case};
use ucsim_core::model::{default_initial_state, validate, PlantClass};

#[test]
fn shipped_fixtures_validate_clean() {
    for seed in [1, 2, 3] {
        let (case, init) = micro_case(seed);
        assert!(validate(&case, &init).is_empty(), "micro_case({seed})");
    }
    let (case, init) = three_unit_case(0.8, 6);
    assert!(validate(&case, &init).is_empty());
    let (case, init) = prosumer_case(5, 8);
    assert!(validate(&case, &init).is_empty());
    let (case, init) = rolling_case(9, 48);
    assert!(validate(&case, &init).is_empty());
}

#[test]
fn inverted_generation_limits_name_the_plant() {
    let (mut case, init) = micro_case(1);
    case.system.plants[0].p_min_mw = case.system.plants[0].p_max_mw + 10.0;
    let report = validate(&case, &init);
    let id = &case.system.plants[0].id;
    assert!(
        report.iter().any(|v| &v.entity == id && v.message.contains("p_min")),
        "report: {report:?}"
    );
}

#[test]
fn res_clusters_must_stay_aggregated() {
    let (mut case, init) = three_unit_case(0.8, 4);
    let res_idx = case
        .system
        .plants
        .iter()
        .position(|p| p.class == PlantClass::Res)
        .expect("fixture carries a RES backstop");
    case.system.plants[res_idx].unit_count = 3;
    let report = validate(&case, &init);
    let id = &case.system.plants[res_idx].id;
    assert!(
        report.iter().any(|v| &v.entity == id && v.message.contains("unit count")),
        "report: {report:?}"
    );
}

#[test]
fn short_trace_names_the_trace_owner() {
    let (mut case, init) = micro_case(1);
    let (id, trace) = case.scenario.consumer_load_mw.iter_mut().next().unwrap();
    trace.pop();
    let id = id.clone();
    let report = validate(&case, &init);
    assert!(report.iter().any(|v| v.entity == id && v.message.contains("slots")));
}

#[test]
fn unknown_node_reference_is_reported() {
    let (mut case, init) = micro_case(1);
    case.system.plants[0].node = "nowhere".into();
    let report = validate(&case, &init);
    assert!(report.iter().any(|v| v.message.contains("nowhere")));
}

#[test]
fn initial_state_outside_limits_is_reported() {
    let (case, _) = micro_case(1);
    let mut init = default_initial_state(&case.system);
    let plant = &case.system.plants[0];
    // More units online than exist.
    init.units_online.insert(plant.id.clone(), plant.unit_count + 5);
    let report = validate(&case, &init);
    assert!(report.iter().any(|v| v.entity == plant.id && v.message.contains("exceed")));

    // Dispatch with nothing online.
    let mut init = default_initial_state(&case.system);
    init.dispatch_mw.insert(plant.id.clone(), 50.0);
    let report = validate(&case, &init);
    assert!(report.iter().any(|v| v.entity == plant.id));
}

#[test]
fn default_initial_state_is_all_off_with_empty_stores() {
    let (case, _) = micro_case(2);
    let init = default_initial_state(&case.system);
    for plant in &case.system.plants {
        if plant.is_synchronous() {
            assert_eq!(init.units_online(&plant.id), 0);
            assert_eq!(init.dispatch(&plant.id), 0.0);
        }
        if let Some(tes) = &plant.tes {
            assert_eq!(init.cst_energy_mwh_th[&plant.id], tes.e_min_mwh_th);
        }
    }
    for s in &case.system.storage {
        assert_eq!(init.storage_energy_mwh[&s.id], s.e_min_mwh);
    }
    assert!(validate(&case, &init).is_empty());
}

#[test]
fn boundary_history_helpers_use_one_based_slots() {
    let (case, _) = micro_case(1);
    let mut init = default_initial_state(&case.system);
    let id = case.system.plants[0].id.clone();
    init.up_history.insert(id.clone(), vec![2]);
    assert_eq!(init.must_stay_on(&id, 1), 2);
    assert_eq!(init.must_stay_on(&id, 2), 0);
    assert_eq!(init.must_stay_off(&id, 1), 0);
}

#[test]
fn unit_inertia_is_the_h_times_s_product() {
    let (case, _) = three_unit_case(1.2, 4);
    let plant = case.system.plants.iter().find(|p| p.id == "plant").unwrap();
    assert!((plant.unit_inertia_mws() - plant.inertia_s * plant.rating_mva).abs() < 1e-12);
    assert!(plant.is_synchronous());
}
