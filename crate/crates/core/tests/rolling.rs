//! Rolling-horizon tests: window arithmetic, boundary-state carry-over,
//! degenerate single-window equivalence, and stitched-solution quality.

use ucsim_core::dispatch::solve_case;
use ucsim_core::fixtures::rolling_case;
use ucsim_core::formulation::{AssembleOptions, Variant};
use ucsim_core::metrics::{evaluate_dispatch, total_cost};
use ucsim_core::milp::FEASIBILITY_TOL;
use ucsim_core::rolling::{carry_state, run_rolling, slice_scenario, windows, HorizonPlan};

#[test]
fn window_arithmetic_covers_the_horizon_without_gaps() {
    // 168 slots, 72-slot windows committing 48: starts at 1, 49, 97, 145.
    let plan = HorizonPlan { window_slots: 72, commit_slots: 48 };
    let wins = windows(168, plan).unwrap();
    let starts: Vec<usize> = wins.iter().map(|w| w.start).collect();
    assert_eq!(starts, vec![1, 49, 97]);
    assert_eq!(wins[0].end, 72);
    assert_eq!(wins[0].commit_end, 48);
    assert_eq!(wins[1].end, 120);
    assert_eq!(wins[1].commit_end, 96);
    // The last window is truncated and commits its lookahead too.
    let last = wins.last().unwrap();
    assert_eq!(last.end, 168);
    assert_eq!(last.commit_end, 168);
    // Committed ranges tile 1..=168 exactly.
    let mut covered = 0;
    for w in &wins {
        assert_eq!(w.start, covered + 1);
        covered = w.commit_end;
    }
    assert_eq!(covered, 168);
}

#[test]
fn degenerate_plans_are_rejected() {
    assert!(windows(24, HorizonPlan { window_slots: 8, commit_slots: 0 }).is_err());
    assert!(windows(24, HorizonPlan { window_slots: 8, commit_slots: 9 }).is_err());
}

#[test]
fn scenario_slices_keep_alignment() {
    let (case, _) = rolling_case(3, 24);
    let sliced = slice_scenario(&case.scenario, 5, 12);
    assert_eq!(sliced.slots, 8);
    for (id, trace) in &sliced.consumer_load_mw {
        assert_eq!(trace.len(), 8);
        assert_eq!(trace[0], case.scenario.consumer_load_mw[id][4]);
        assert_eq!(trace[7], case.scenario.consumer_load_mw[id][11]);
    }
}

#[test]
fn full_width_window_reproduces_the_monolithic_solve_bitwise() {
    let (case, init) = rolling_case(7, 12);
    let mono = solve_case(
        &case, &init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference",
    )
    .unwrap();
    let rolled = run_rolling(
        &case,
        &init,
        Variant::Mst,
        AssembleOptions::default(),
        HorizonPlan::monolithic(12),
        0.0,
        None,
        "reference",
    )
    .unwrap();
    assert_eq!(rolled.windows.len(), 1);
    assert_eq!(mono.objective.to_bits(), rolled.result.objective.to_bits());
    for (id, pd) in &mono.plants {
        let rd = &rolled.result.plants[id];
        for t in 0..12 {
            assert_eq!(pd.dispatch_mw[t].to_bits(), rd.dispatch_mw[t].to_bits());
            assert_eq!(pd.units_online[t].to_bits(), rd.units_online[t].to_bits());
        }
    }
}

#[test]
fn stitched_solution_is_feasible_and_near_monolithic() {
    let (case, init) = rolling_case(11, 24);
    let mono = solve_case(
        &case, &init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference",
    )
    .unwrap();
    let rolled = run_rolling(
        &case,
        &init,
        Variant::Mst,
        AssembleOptions::default(),
        HorizonPlan { window_slots: 12, commit_slots: 8 },
        0.0,
        None,
        "reference",
    )
    .unwrap();
    // Independent physics audit of the stitched traces.
    let violations = evaluate_dispatch(&case, &init, &rolled.result, FEASIBILITY_TOL * 10.0);
    assert!(violations.is_empty(), "{violations:?}");
    // Rolling can only lose optimality, and with lookahead it loses little.
    let mono_cost = total_cost(&case, &mono);
    assert!(rolled.total_cost >= mono_cost - 1e-6);
    assert!(
        rolled.total_cost <= mono_cost * 1.05,
        "rolling cost {} vs monolithic {mono_cost}",
        rolled.total_cost
    );
}

#[test]
fn carried_state_matches_the_committed_boundary() {
    let (case, init) = rolling_case(5, 16);
    let result = solve_case(
        &case, &init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference",
    )
    .unwrap();
    let t_star = 8;
    let carried = carry_state(&case, &init, &result, t_star);
    for plant in case.system.plants.iter().filter(|p| p.is_synchronous()) {
        let pd = &result.plants[&plant.id];
        assert_eq!(
            carried.units_online(&plant.id),
            pd.units_online[t_star - 1].round() as u32
        );
        assert!((carried.dispatch(&plant.id) - pd.dispatch_mw[t_star - 1]).abs() < 1e-9);
        // Pinned-unit windows never demand more units than a startup event
        // inside the last tau_u - 1 slots can justify.
        let tau = plant.min_up_slots as usize;
        for k in 1..tau {
            let pinned = carried.must_stay_on(&plant.id, k);
            let recent: f64 = pd.startups[t_star + k - tau..t_star].iter().sum();
            assert_eq!(pinned, recent.round() as u32, "{} slot {k}", plant.id);
        }
    }
    for (id, trace) in &result.storage_energy_mwh {
        assert_eq!(carried.storage_energy_mwh[id], trace[t_star - 1]);
    }
}

#[test]
fn startup_near_the_seam_stays_pinned_in_the_next_window() {
    // Hand-built traces: a plant with min_up 3 starting one unit exactly at
    // the seam slot must hold that unit online for the first two slots of
    // the next window.
    let (case, init) = rolling_case(5, 16);
    let mut result = solve_case(
        &case, &init, Variant::Mst, AssembleOptions::default(), 0.0, None, "reference",
    )
    .unwrap();
    let plant = case
        .system
        .plants
        .iter()
        .find(|p| p.min_up_slots == 3)
        .expect("fixture has a min_up 3 plant");
    let t_star = 8;
    {
        let pd = result.plants.get_mut(&plant.id).unwrap();
        pd.startups[t_star - 1] = 1.0;
    }
    let carried = carry_state(&case, &init, &result, t_star);
    assert!(carried.must_stay_on(&plant.id, 1) >= 1);
    assert!(carried.must_stay_on(&plant.id, 2) >= 1);
}
