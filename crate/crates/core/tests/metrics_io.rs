//! Metrics arithmetic on known dispatches, case/run persistence
//! round-trips, and synthetic case generation properties.

use ucsim_core::dispatch::solve_case;
use ucsim_core::fixtures::micro_case;
use ucsim_core::formulation::{AssembleOptions, Variant};
use ucsim_core::io::{
    generate_case, load_case, load_results, persist_results, save_case, RunMetadata,
    SyntheticCaseSpec,
};
use ucsim_core::metrics::{
    compare, inertia_timeseries, online_units_timeseries, res_spillage_mwh, total_cost,
};
use ucsim_core::model::validate;

fn solved_micro(seed: u64, variant: Variant) -> (ucsim_core::model::Case, ucsim_core::model::InitialState, ucsim_core::dispatch::DispatchResult) {
    let (case, init) = micro_case(seed);
    let result = solve_case(&case, &init, variant, AssembleOptions::default(), 0.0, None, "reference").unwrap();
    (case, init, result)
}

#[test]
fn total_cost_reconstructs_the_solver_objective() {
    // The cost metric is computed from the stored traces alone; at gap 0 it
    // must agree with the MILP objective.
    let (case, _, result) = solved_micro(1, Variant::Mst);
    let cost = total_cost(&case, &result);
    assert!(
        (cost - result.objective).abs() <= 1e-6 * result.objective.abs().max(1.0),
        "cost {cost} vs objective {}",
        result.objective
    );
}

#[test]
fn inertia_counts_h_times_s_per_online_unit() {
    let (case, _, result) = solved_micro(2, Variant::Mst);
    let series = inertia_timeseries(&case, &result);
    for (region, trace) in &series {
        for (i, value) in trace.iter().enumerate() {
            let mut expected = 0.0;
            for plant in &case.system.plants {
                if !plant.is_synchronous() {
                    continue;
                }
                let node_region = &case.system.network.node_region[&plant.node];
                if node_region == region {
                    expected += result.plants[&plant.id].units_online[i] * plant.unit_inertia_mws();
                }
            }
            assert!((value - expected).abs() < 1e-9, "{region} slot {i}");
        }
    }
}

#[test]
fn spillage_is_availability_minus_res_dispatch() {
    let (case, _, result) = solved_micro(3, Variant::Mst);
    let mut expected = 0.0;
    for (id, avail) in &case.scenario.res_availability_mw {
        let dispatch = &result.plants[id].dispatch_mw;
        for t in 0..case.scenario.slots {
            expected += (avail[t] - dispatch[t]).max(0.0) * case.scenario.dt_hours;
        }
    }
    let spill = res_spillage_mwh(&case, &result);
    assert!((spill - expected).abs() < 1e-9);
    assert!(spill >= 0.0);
}

#[test]
fn online_units_sum_over_plants() {
    let (case, _, result) = solved_micro(1, Variant::Mst);
    let series = online_units_timeseries(&case, &result);
    assert_eq!(series.len(), case.scenario.slots);
    for (i, total) in series.iter().enumerate() {
        let expected: f64 = result.plants.values().map(|p| p.units_online[i]).sum();
        assert!((total - expected).abs() < 1e-9);
    }
}

#[test]
fn comparing_a_run_with_itself_gives_zero_deltas() {
    let (case, _, result) = solved_micro(1, Variant::Mst);
    let c = compare(&case, &result, &result);
    assert_eq!(c.objective_rel_diff, 0.0);
    assert_eq!(c.max_commitment_diff, 0.0);
    assert_eq!(c.max_inertia_diff_mws, 0.0);
    assert_eq!(c.spillage_mwh_a, c.spillage_mwh_b);
}

#[test]
fn comparison_sees_commitment_differences_between_variants() {
    let (case, init) = micro_case(4);
    let a = solve_case(&case, &init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference").unwrap();
    let b = solve_case(&case, &init, Variant::Agg, AssembleOptions::default(), 0.0, None, "reference").unwrap();
    let c = compare(&case, &a, &b);
    // AGG can never undercut the clustered optimum.
    assert!(c.objective_b >= c.objective_a - 1e-6);
}

#[test]
fn case_directory_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (case, init) = micro_case(5);
    save_case(dir.path(), &case, &init).unwrap();
    let (loaded, loaded_init) = load_case(dir.path()).unwrap();
    assert!(validate(&loaded, &loaded_init).is_empty());
    assert_eq!(loaded_init, init);
    assert_eq!(loaded.scenario.slots, case.scenario.slots);
    assert_eq!(loaded.system.plants.len(), case.system.plants.len());
    for (id, trace) in &case.scenario.consumer_load_mw {
        assert_eq!(&loaded.scenario.consumer_load_mw[id], trace);
    }
    // Solving the reloaded case gives the identical objective.
    let a = solve_case(&case, &init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference").unwrap();
    let b = solve_case(&loaded, &loaded_init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference").unwrap();
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
}

#[test]
fn foreign_format_versions_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (case, init) = micro_case(5);
    save_case(dir.path(), &case, &init).unwrap();
    let path = dir.path().join("case.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    let line = text.lines().find(|l| l.starts_with("format_version")).unwrap().to_string();
    std::fs::write(&path, text.replace(&line, "format_version = \"99.0\"")).unwrap();
    let err = load_case(dir.path()).unwrap_err();
    assert!(err.to_string().contains("version"), "{err}");
}

#[test]
fn corrupt_trace_csv_is_a_parse_error_not_a_panic() {
    let dir = tempfile::tempdir().unwrap();
    let (case, init) = micro_case(5);
    save_case(dir.path(), &case, &init).unwrap();
    let path = dir.path().join("traces.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replace("consumer_load_mw", "bogus_quantity")).unwrap();
    assert!(load_case(dir.path()).is_err());
}

#[test]
fn run_directory_round_trips_results_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let (case, _, result) = solved_micro(6, Variant::Buc);
    let meta = RunMetadata::from_result(&result, AssembleOptions::default(), None, "reference", 0.0);
    persist_results(dir.path(), &result, &meta).unwrap();
    let (loaded, loaded_meta) = load_results(dir.path()).unwrap();
    assert_eq!(loaded.objective.to_bits(), result.objective.to_bits());
    assert_eq!(loaded.variant, result.variant);
    assert_eq!(loaded_meta.backend, "reference");
    // Reloaded traces give the same metrics.
    assert_eq!(total_cost(&case, &loaded).to_bits(), total_cost(&case, &result).to_bits());

    // The dispatch table has one row per (slot, entity).
    let table = std::fs::read_to_string(dir.path().join("dispatch.csv")).unwrap();
    let entities = result.plants.len()
        + result.flows_mw.len()
        + result.angles_rad.len()
        + result.cst_energy_mwh_th.len()
        + result.storage_energy_mwh.len()
        + result.prosumers.len();
    let rows = table.lines().count() - 1;
    assert_eq!(rows, entities * case.scenario.slots, "table:\n{table}");
}

#[test]
fn generator_is_deterministic_and_valid() {
    let spec = SyntheticCaseSpec {
        regions: 2,
        slots: 24,
        peak_load_mw: 3000.0,
        res_penetration: 0.3,
        unit_count_scale: 0.3,
        ..SyntheticCaseSpec::default()
    };
    let (a, init_a) = generate_case(&spec);
    let (b, _) = generate_case(&spec);
    assert!(validate(&a, &init_a).is_empty());
    for (id, trace) in &a.scenario.consumer_load_mw {
        for (x, y) in trace.iter().zip(&b.scenario.consumer_load_mw[id]) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
    assert_eq!(a.system.plants.len(), b.system.plants.len());

    // A different seed changes the traces.
    let (c, _) = generate_case(&SyntheticCaseSpec { seed: 2, ..spec });
    let first = a.scenario.consumer_load_mw.values().next().unwrap();
    let other = c.scenario.consumer_load_mw.values().next().unwrap();
    assert!(first.iter().zip(other).any(|(x, y)| x != y));
}

#[test]
fn zero_penetration_means_no_res_clusters() {
    let spec = SyntheticCaseSpec {
        regions: 1,
        slots: 24,
        peak_load_mw: 2000.0,
        res_penetration: 0.0,
        unit_count_scale: 0.2,
        ..SyntheticCaseSpec::default()
    };
    let (case, _) = generate_case(&spec);
    assert!(case.scenario.res_availability_mw.is_empty());
}

#[test]
fn res_penetration_hits_the_energy_target() {
    let spec = SyntheticCaseSpec {
        regions: 2,
        slots: 168,
        peak_load_mw: 5000.0,
        res_penetration: 0.75,
        unit_count_scale: 0.5,
        ..SyntheticCaseSpec::default()
    };
    let (case, _) = generate_case(&spec);
    let dt = case.scenario.dt_hours;
    let load_mwh: f64 = case.scenario.consumer_load_mw.values().flatten().sum::<f64>() * dt;
    let pros_load: f64 = case.scenario.prosumer_load_mw.values().flatten().sum::<f64>() * dt;
    let res_mwh: f64 = case.scenario.res_availability_mw.values().flatten().sum::<f64>() * dt;
    let share = res_mwh / (load_mwh + pros_load);
    assert!(
        (share - 0.75).abs() < 0.02,
        "available RES energy share {share}"
    );
}

#[test]
fn generated_cases_solve_under_every_variant() {
    let spec = SyntheticCaseSpec {
        regions: 1,
        slots: 6,
        peak_load_mw: 1500.0,
        res_penetration: 0.3,
        unit_count_scale: 0.2,
        ..SyntheticCaseSpec::default()
    };
    let (case, init) = generate_case(&spec);
    for variant in [Variant::Mst, Variant::Agg] {
        let r = solve_case(&case, &init, variant, AssembleOptions::default(), 0.01, None, "reference").unwrap();
        assert!(r.objective.is_finite(), "{variant}");
    }
}

#[test]
fn synthetic_case_meets_its_structural_contract() {
    // A renewable-heavy year brings in a CST plant alongside the 14-plant
    // thermal fleet; around a hundred units in total.
    let spec = SyntheticCaseSpec { res_penetration: 0.5, ..SyntheticCaseSpec::default() };
    let (case, init) = generate_case(&spec);
    assert!(validate(&case, &init).is_empty());
    assert_eq!(case.scenario.slots, 168);
    let syn: Vec<_> = case.system.plants.iter().filter(|p| p.is_synchronous()).collect();
    assert_eq!(syn.len(), 15);
    let units: u32 = syn.iter().map(|p| p.unit_count).sum();
    assert!((90..=120).contains(&units), "units = {units}");
    assert!(!case.system.storage.is_empty());
    assert!(!case.system.prosumers.is_empty());
    assert_eq!(case.system.network.regions.len(), 4);
}
