//! Pre-assembly removal of provably non-binding ramp and MUDT constraints.
//!
//! A ramp limit with `r * dt >= p_max` can never cut the dispatch of a
//! committed unit, and a minimum up/down time of one slot is implied by the
//! commitment logic, so both constraint groups can be dropped without
//! changing the feasible region. The plan operates before rows are
//! materialized; nothing is deleted post hoc.

use crate::model::GeneratorCluster;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipRule {
    pub ramp_up: bool,
    pub ramp_down: bool,
    pub min_up: bool,
    pub min_down: bool,
}

/// Per-plant exclusion set for the ramp and MUDT constraint groups.
#[derive(Clone, Debug, Default)]
pub struct ClipPlan {
    rules: BTreeMap<String, ClipRule>,
}

impl ClipPlan {
    /// The empty plan: nothing clipped.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn rule(&self, plant: &str) -> ClipRule {
        self.rules.get(plant).copied().unwrap_or_default()
    }
}

/// Decides for every synchronous plant which ramp/MUDT groups are provably
/// non-binding at time resolution `dt_hours`.
pub fn clip_plan(plants: &[GeneratorCluster], dt_hours: f64) -> ClipPlan {
    let mut rules = BTreeMap::new();
    for plant in plants.iter().filter(|p| p.is_synchronous()) {
        let rule = ClipRule {
            ramp_up: plant.ramp_up_mw_per_h * dt_hours >= plant.p_max_mw,
            ramp_down: plant.ramp_down_mw_per_h * dt_hours >= plant.p_max_mw,
            min_up: plant.min_up_slots <= 1,
            min_down: plant.min_down_slots <= 1,
        };
        rules.insert(plant.id.clone(), rule);
    }
    ClipPlan { rules }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct GroupClipStats {
    pub emitted: usize,
    pub clipped: usize,
}

impl GroupClipStats {
    pub fn total(&self) -> usize {
        self.emitted + self.clipped
    }
}

/// Emitted-vs-clipped accounting per constraint group, filled in while the
/// formulation walks the would-be constraint set.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ClippingReport {
    pub groups: BTreeMap<String, GroupClipStats>,
}

impl ClippingReport {
    pub fn record(&mut self, group: &str, clipped: bool, rows: usize) {
        let stats = self.groups.entry(group.to_string()).or_default();
        if clipped {
            stats.clipped += rows;
        } else {
            stats.emitted += rows;
        }
    }

    pub fn total_emitted(&self) -> usize {
        self.groups.values().map(|g| g.emitted).sum()
    }

    pub fn total_clipped(&self) -> usize {
        self.groups.values().map(|g| g.clipped).sum()
    }

    /// Reduction over the would-be total, in percent.
    pub fn reduction_percent(&self) -> f64 {
        let total = self.total_emitted() + self.total_clipped();
        if total == 0 {
            0.0
        } else {
            100.0 * self.total_clipped() as f64 / total as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlantClass;

    fn plant(id: &str, ramp: f64, p_max: f64, tau_u: u32, tau_d: u32) -> GeneratorCluster {
        GeneratorCluster {
            id: id.into(),
            node: "n1".into(),
            class: PlantClass::SynThermal,
            unit_count: 1,
            p_min_mw: 0.0,
            p_max_mw: p_max,
            ramp_up_mw_per_h: ramp,
            ramp_down_mw_per_h: ramp,
            min_up_slots: tau_u,
            min_down_slots: tau_d,
            cost_fixed: 0.0,
            cost_startup: 0.0,
            cost_shutdown: 0.0,
            cost_variable_per_mwh: 10.0,
            inertia_s: 5.0,
            rating_mva: 100.0,
            tes: None,
        }
    }

    #[test]
    fn fast_ocgt_ramp_is_clipped() {
        // r+ equal to rated power per hour at dt = 1 h.
        let plan = clip_plan(&[plant("ocgt", 200.0, 200.0, 1, 1)], 1.0);
        let rule = plan.rule("ocgt");
        assert!(rule.ramp_up && rule.ramp_down);
        assert!(rule.min_up && rule.min_down);
    }

    #[test]
    fn slow_coal_is_kept() {
        let plan = clip_plan(&[plant("coal", 60.0, 500.0, 8, 6)], 1.0);
        let rule = plan.rule("coal");
        assert!(!rule.ramp_up && !rule.ramp_down);
        assert!(!rule.min_up && !rule.min_down);
    }

    #[test]
    fn subhourly_resolution_keeps_more() {
        // At dt = 0.5 h the same OCGT ramp no longer spans the rated power.
        let plan = clip_plan(&[plant("ocgt", 200.0, 200.0, 1, 1)], 0.5);
        assert!(!plan.rule("ocgt").ramp_up);
    }

    #[test]
    fn report_accounting_is_consistent() {
        let mut report = ClippingReport::default();
        report.record("ramp_up", false, 24);
        report.record("ramp_up", true, 24);
        report.record("min_up", true, 24);
        let g = report.groups["ramp_up"];
        assert_eq!(g.total(), 48);
        assert_eq!(report.total_clipped(), 48);
        assert!((report.reduction_percent() - 100.0 * 48.0 / 72.0).abs() < 1e-12);
    }
}
