//! Translation of a validated case into a MILP under one of three
//! formulations:
//!
//! * MST — clustered: integer online-unit counters per plant,
//! * BUC — binary commitment per individual unit,
//! * AGG — one binary per plant with unit-count-scaled limits.
//!
//! Assembly is a pure function; row ordering is deterministic and part of
//! the contract.

pub mod index;
mod prosumer;

pub use prosumer::{
    kkt_duals_at_bound, presolve_prosumers, prosumer_lp, ProsumerSolution, EPS_ENERGY, EPS_EXPORT,
    M_DUAL,
};

use crate::clipping::{clip_plan, ClipPlan, ClippingReport};
use crate::milp::{MilpModel, Sense, VarId, VarKind};
use crate::model::{Case, GeneratorCluster, InitialState, PlantClass};
use index::{Quantity, VarKey, VariableIndex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Mst,
    Buc,
    Agg,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variant::Mst => "mst",
            Variant::Buc => "buc",
            Variant::Agg => "agg",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mst" => Ok(Variant::Mst),
            "buc" => Ok(Variant::Buc),
            "agg" => Ok(Variant::Agg),
            other => Err(format!("unknown formulation variant `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProsumerMode {
    /// Solve each prosumer LP up front and feed fixed demand traces into
    /// the balance rows. Provably equivalent under demand coupling and much
    /// cheaper.
    Presolve,
    /// Embed the lower-level KKT conditions in the MILP.
    Kkt,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AssembleOptions {
    pub clipping: bool,
    pub prosumer_mode: ProsumerMode,
    pub losses: bool,
    /// Lexicographic unit-ordering rows in BUC. Valid only when the units
    /// of a plant have interchangeable initial histories; off by default.
    pub symmetry_breaking: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            clipping: true,
            prosumer_mode: ProsumerMode::Presolve,
            losses: false,
            symmetry_breaking: false,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ModelCounts {
    pub variables: usize,
    pub integer_variables: usize,
    pub binary_variables: usize,
    /// s, u, d variables over synchronous plants.
    pub commitment_variables: usize,
    pub constraints: usize,
    pub constraints_by_group: BTreeMap<String, usize>,
}

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error("prosumer {0}: lower-level problem infeasible")]
    InfeasibleProsumer(String),
    #[error("prosumer {0}: dual bound reached, big-M derivation invalid")]
    UnboundedDual(String),
    #[error("internal LP failure: {0}")]
    Lp(String),
}

/// One commitment entity: a plant in MST/AGG, an individual unit in BUC.
/// `scale` multiplies per-unit limits, costs, and inertia (unit count in
/// AGG, 1 otherwise).
#[derive(Clone, Debug)]
pub struct CommitEntity {
    pub plant_idx: usize,
    pub unit: Option<u32>,
    pub scale: f64,
    pub max_units: f64,
    pub init_online: f64,
    pub init_dispatch: f64,
}

/// Output of [`assemble`]: the model plus everything needed to interpret
/// its solution.
pub struct Assembled {
    pub model: MilpModel,
    pub index: VariableIndex,
    pub variant: Variant,
    pub options: AssembleOptions,
    pub entities: Vec<CommitEntity>,
    pub counts: ModelCounts,
    pub clipping: ClippingReport,
    /// Present in presolve mode: the fixed prosumer traces baked into the
    /// balance rows.
    pub presolved_prosumers: Option<BTreeMap<String, ProsumerSolution>>,
}

/// Builds the complete MILP: objective plus every constraint group, under
/// the requested variant and options.
pub fn assemble(
    case: &Case,
    init: &InitialState,
    variant: Variant,
    options: AssembleOptions,
) -> Result<Assembled, FormulationError> {
    let plan = if options.clipping {
        clip_plan(&case.system.plants, case.scenario.dt_hours)
    } else {
        ClipPlan::none()
    };
    let presolved = match options.prosumer_mode {
        ProsumerMode::Presolve if !case.system.prosumers.is_empty() => {
            Some(presolve_prosumers(case, init)?)
        }
        _ => None,
    };

    let mut ctx = Ctx {
        case,
        init,
        variant,
        options,
        plan,
        model: MilpModel::new(),
        index: VariableIndex::default(),
        entities: build_entities(case, init, variant),
        clipping: ClippingReport::default(),
        commitment_vars: 0,
        presolved: &presolved,
    };

    ctx.define_variables()?;
    ctx.emit_objective();
    ctx.emit_power_balance();
    ctx.emit_reserves();
    ctx.emit_inertia();
    ctx.emit_dc_flow();
    ctx.emit_generation_limits();
    ctx.emit_commitment_logic();
    ctx.emit_ramps();
    ctx.emit_mudt();
    ctx.emit_cst();
    ctx.emit_storage();
    if ctx.options.prosumer_mode == ProsumerMode::Kkt {
        prosumer::emit_prosumer_kkt(&mut ctx)?;
    }
    if ctx.options.symmetry_breaking && variant == Variant::Buc {
        ctx.emit_symmetry_breaking();
    }

    let counts = ctx.counts();
    Ok(Assembled {
        model: ctx.model,
        index: ctx.index,
        variant,
        options,
        entities: ctx.entities,
        counts,
        clipping: ctx.clipping,
        presolved_prosumers: presolved,
    })
}

fn build_entities(case: &Case, init: &InitialState, variant: Variant) -> Vec<CommitEntity> {
    let mut entities = Vec::new();
    for (plant_idx, plant) in case.system.plants.iter().enumerate() {
        if !plant.is_synchronous() {
            continue;
        }
        let s_hat = init.units_online(&plant.id);
        let p_hat = init.dispatch(&plant.id);
        match variant {
            Variant::Mst => entities.push(CommitEntity {
                plant_idx,
                unit: None,
                scale: 1.0,
                max_units: plant.unit_count as f64,
                init_online: s_hat as f64,
                init_dispatch: p_hat,
            }),
            Variant::Agg => entities.push(CommitEntity {
                plant_idx,
                unit: None,
                scale: plant.unit_count as f64,
                max_units: 1.0,
                init_online: if s_hat > 0 { 1.0 } else { 0.0 },
                init_dispatch: p_hat,
            }),
            Variant::Buc => {
                for unit in 0..plant.unit_count {
                    let online = unit < s_hat;
                    entities.push(CommitEntity {
                        plant_idx,
                        unit: Some(unit),
                        scale: 1.0,
                        max_units: 1.0,
                        init_online: if online { 1.0 } else { 0.0 },
                        init_dispatch: if online { p_hat / s_hat as f64 } else { 0.0 },
                    });
                }
            }
        }
    }
    entities
}

pub(crate) struct Ctx<'a> {
    pub case: &'a Case,
    pub init: &'a InitialState,
    pub variant: Variant,
    pub options: AssembleOptions,
    plan: ClipPlan,
    pub model: MilpModel,
    pub index: VariableIndex,
    entities: Vec<CommitEntity>,
    clipping: ClippingReport,
    commitment_vars: usize,
    presolved: &'a Option<BTreeMap<String, ProsumerSolution>>,
}

impl<'a> Ctx<'a> {
    fn slots(&self) -> usize {
        self.case.scenario.slots
    }

    fn dt(&self) -> f64 {
        self.case.scenario.dt_hours
    }

    fn plant(&self, e: &CommitEntity) -> &GeneratorCluster {
        &self.case.system.plants[e.plant_idx]
    }

    /// Commitment entities grouped by plant, in definition order. One entry
    /// per plant with commitment variables (BUC groups its per-unit entities).
    fn entity_groups(&self) -> Vec<(usize, Vec<CommitEntity>)> {
        let mut groups: Vec<(usize, Vec<CommitEntity>)> = Vec::new();
        for e in &self.entities {
            match groups.last_mut() {
                Some((idx, bucket)) if *idx == e.plant_idx => bucket.push(e.clone()),
                _ => groups.push((e.plant_idx, vec![e.clone()])),
            }
        }
        groups
    }

    fn entity_name(&self, e: &CommitEntity) -> String {
        let plant = self.plant(e);
        match e.unit {
            Some(u) => format!("{}_u{}", plant.id, u),
            None => plant.id.clone(),
        }
    }

    pub(crate) fn define(
        &mut self,
        entity: &str,
        unit: Option<u32>,
        quantity: Quantity,
        slot: usize,
        name: String,
        lb: f64,
        ub: f64,
        kind: VarKind,
    ) -> VarId {
        let id = self.model.add_var(name, lb, ub, kind);
        self.index.insert(
            VarKey {
                entity: entity.to_string(),
                unit,
                quantity,
                slot,
            },
            id,
        );
        id
    }

    fn var(&self, entity: &str, unit: Option<u32>, quantity: Quantity, slot: usize) -> VarId {
        self.index.lookup(entity, unit, quantity, slot)
    }

    /// How startup/shutdown history carried from a previous horizon maps
    /// onto this entity: units that must remain online through `slot`.
    fn must_stay_on(&self, e: &CommitEntity, slot: usize) -> f64 {
        let plant = self.plant(e);
        let carried = self.init.must_stay_on(&plant.id, slot);
        match self.variant {
            Variant::Mst => carried as f64,
            Variant::Agg => (carried.min(1)) as f64,
            Variant::Buc => {
                // The lowest-indexed online units carry the obligation.
                let unit = e.unit.unwrap();
                if unit < carried {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn must_stay_off(&self, e: &CommitEntity, slot: usize) -> f64 {
        let plant = self.plant(e);
        let carried = self.init.must_stay_off(&plant.id, slot);
        match self.variant {
            Variant::Mst => carried as f64,
            // The aggregate binary is forced off only if every unit is.
            Variant::Agg => {
                if carried >= plant.unit_count {
                    1.0
                } else {
                    0.0
                }
            }
            Variant::Buc => {
                // The highest-indexed (offline) units carry the obligation.
                let unit = e.unit.unwrap();
                if unit >= plant.unit_count - carried {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    // ----- variables ------------------------------------------------------

    fn define_variables(&mut self) -> Result<(), FormulationError> {
        let slots = self.slots();

        // Commitment and dispatch per entity.
        for e_idx in 0..self.entities.len() {
            let e = self.entities[e_idx].clone();
            let plant = self.plant(&e).clone();
            let name = self.entity_name(&e);
            let kind = match self.variant {
                Variant::Mst => VarKind::Integer,
                Variant::Buc | Variant::Agg => VarKind::Binary,
            };
            for t in 1..=slots {
                self.define(
                    &plant.id,
                    e.unit,
                    Quantity::Status,
                    t,
                    format!("s_{name}_t{t}"),
                    0.0,
                    e.max_units,
                    kind,
                );
                // Explicit upper bounds on u, d tighten the relaxation.
                self.define(
                    &plant.id,
                    e.unit,
                    Quantity::Startup,
                    t,
                    format!("u_{name}_t{t}"),
                    0.0,
                    e.max_units,
                    kind,
                );
                self.define(
                    &plant.id,
                    e.unit,
                    Quantity::Shutdown,
                    t,
                    format!("d_{name}_t{t}"),
                    0.0,
                    e.max_units,
                    kind,
                );
                self.commitment_vars += 3;
                self.define(
                    &plant.id,
                    e.unit,
                    Quantity::Dispatch,
                    t,
                    format!("p_{name}_t{t}"),
                    0.0,
                    plant.p_max_mw * e.scale * e.max_units,
                    VarKind::Continuous,
                );
            }
        }

        // RES dispatch: no commitment, availability as a time-varying bound.
        for plant in &self.case.system.plants {
            if plant.class != PlantClass::Res {
                continue;
            }
            let avail = self.case.scenario.res_availability_mw[&plant.id].clone();
            for t in 1..=slots {
                self.define(
                    &plant.id.clone(),
                    None,
                    Quantity::Dispatch,
                    t,
                    format!("p_{}_t{t}", plant.id),
                    0.0,
                    avail[t - 1],
                    VarKind::Continuous,
                );
            }
        }

        // Network: flows (bounded by thermal limits), loss splits, angles.
        for line in &self.case.system.network.ac_lines.clone() {
            for t in 1..=slots {
                self.define(
                    &line.id,
                    None,
                    Quantity::Flow,
                    t,
                    format!("f_{}_t{t}", line.id),
                    -line.thermal_limit_mw,
                    line.thermal_limit_mw,
                    VarKind::Continuous,
                );
                if self.options.losses && line.loss_factor > 0.0 {
                    self.define(
                        &line.id,
                        None,
                        Quantity::FlowPos,
                        t,
                        format!("fp_{}_t{t}", line.id),
                        0.0,
                        line.thermal_limit_mw,
                        VarKind::Continuous,
                    );
                    self.define(
                        &line.id,
                        None,
                        Quantity::FlowNeg,
                        t,
                        format!("fn_{}_t{t}", line.id),
                        0.0,
                        line.thermal_limit_mw,
                        VarKind::Continuous,
                    );
                }
            }
        }
        for line in &self.case.system.network.hvdc_lines.clone() {
            for t in 1..=slots {
                self.define(
                    &line.id,
                    None,
                    Quantity::Flow,
                    t,
                    format!("f_{}_t{t}", line.id),
                    -line.limit_mw,
                    line.limit_mw,
                    VarKind::Continuous,
                );
            }
        }
        let reference = reference_nodes(&self.case.system.network);
        for node in &self.case.system.network.nodes.clone() {
            let pinned = reference.contains(node);
            for t in 1..=slots {
                let (lb, ub) = if pinned {
                    (0.0, 0.0)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                };
                self.define(
                    node,
                    None,
                    Quantity::Angle,
                    t,
                    format!("ang_{node}_t{t}"),
                    lb,
                    ub,
                    VarKind::Continuous,
                );
            }
        }

        // CST: TES energy and the reserve auxiliary m_g.
        for plant in &self.case.system.plants.clone() {
            let Some(tes) = plant.tes.clone() else { continue };
            for t in 1..=slots {
                self.define(
                    &plant.id,
                    None,
                    Quantity::CstEnergy,
                    t,
                    format!("e_{}_t{t}", plant.id),
                    tes.e_min_mwh_th,
                    tes.e_max_mwh_th,
                    VarKind::Continuous,
                );
                self.define(
                    &plant.id,
                    None,
                    Quantity::ReserveAux,
                    t,
                    format!("m_{}_t{t}", plant.id),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    VarKind::Continuous,
                );
            }
        }

        // Utility storage.
        for s in &self.case.system.storage.clone() {
            for t in 1..=slots {
                self.define(
                    &s.id,
                    None,
                    Quantity::StoragePower,
                    t,
                    format!("ps_{}_t{t}", s.id),
                    s.discharge_limit_mw,
                    s.charge_limit_mw,
                    VarKind::Continuous,
                );
                self.define(
                    &s.id,
                    None,
                    Quantity::StorageEnergy,
                    t,
                    format!("es_{}_t{t}", s.id),
                    s.e_min_mwh,
                    s.e_max_mwh,
                    VarKind::Continuous,
                );
            }
        }

        // Prosumer primal variables exist in the model only in KKT mode.
        if self.options.prosumer_mode == ProsumerMode::Kkt {
            prosumer::define_prosumer_primal(self);
        }
        Ok(())
    }

    // ----- objective ------------------------------------------------------

    /// Total generation cost: fixed, startup, shutdown, and variable
    /// energy cost over all slots. AGG scales per-unit costs by the unit
    /// count.
    fn emit_objective(&mut self) {
        let slots = self.slots();
        let dt = self.dt();
        for e in self.entities.clone() {
            let plant = self.plant(&e).clone();
            for t in 1..=slots {
                let s = self.var(&plant.id, e.unit, Quantity::Status, t);
                let u = self.var(&plant.id, e.unit, Quantity::Startup, t);
                let d = self.var(&plant.id, e.unit, Quantity::Shutdown, t);
                let p = self.var(&plant.id, e.unit, Quantity::Dispatch, t);
                self.model.set_objective_term(s, plant.cost_fixed * e.scale);
                self.model.set_objective_term(u, plant.cost_startup * e.scale);
                self.model.set_objective_term(d, plant.cost_shutdown * e.scale);
                self.model
                    .set_objective_term(p, plant.cost_variable_per_mwh * dt);
            }
        }
        for plant in &self.case.system.plants.clone() {
            if plant.class != PlantClass::Res {
                continue;
            }
            for t in 1..=slots {
                let p = self.var(&plant.id, None, Quantity::Dispatch, t);
                self.model
                    .set_objective_term(p, plant.cost_variable_per_mwh * dt);
            }
            // RES is always online; its fixed cost is a constant.
            self.model.objective_constant += plant.cost_fixed * slots as f64;
        }
    }

    // ----- system constraints ----------------------------------------------

    /// One equality per (node, slot): generation equals demand plus net
    /// flow, with storage charging and prosumer imports on the demand side.
    fn emit_power_balance(&mut self) {
        let slots = self.slots();
        let net = self.case.system.network.clone();
        for node in &net.nodes {
            for t in 1..=slots {
                let mut coeffs: Vec<(VarId, f64)> = Vec::new();
                let mut rhs = 0.0;

                for e in self.entities.clone() {
                    let plant = self.plant(&e).clone();
                    if plant.node == *node {
                        coeffs.push((self.var(&plant.id, e.unit, Quantity::Dispatch, t), 1.0));
                    }
                }
                for plant in &self.case.system.plants.clone() {
                    if plant.class == PlantClass::Res && plant.node == *node {
                        coeffs.push((self.var(&plant.id, None, Quantity::Dispatch, t), 1.0));
                    }
                }
                for s in &self.case.system.storage.clone() {
                    if s.node == *node {
                        coeffs.push((self.var(&s.id, None, Quantity::StoragePower, t), -1.0));
                    }
                }
                for c in &self.case.scenario.consumers.clone() {
                    if c.node == *node {
                        rhs += self.case.scenario.consumer_load_mw[&c.id][t - 1];
                    }
                }
                for pros in &self.case.system.prosumers.clone() {
                    if pros.node != *node {
                        continue;
                    }
                    match self.options.prosumer_mode {
                        ProsumerMode::Presolve => {
                            let sol = &self.presolved.as_ref().expect("presolved traces")[&pros.id];
                            rhs += sol.import_mw[t - 1] - sol.export_mw[t - 1];
                        }
                        ProsumerMode::Kkt => {
                            coeffs.push((self.var(&pros.id, None, Quantity::ProsImport, t), -1.0));
                            coeffs.push((self.var(&pros.id, None, Quantity::ProsExport, t), 1.0));
                        }
                    }
                }
                for line in &net.ac_lines {
                    let sigma = incidence(node, &line.from_node, &line.to_node);
                    if sigma != 0.0 {
                        coeffs.push((self.var(&line.id, None, Quantity::Flow, t), -sigma));
                        if self.options.losses && line.loss_factor > 0.0 {
                            // Half the line loss is served from each end.
                            let half = 0.5 * line.loss_factor;
                            coeffs.push((self.var(&line.id, None, Quantity::FlowPos, t), -half));
                            coeffs.push((self.var(&line.id, None, Quantity::FlowNeg, t), -half));
                        }
                    }
                }
                for line in &net.hvdc_lines {
                    let sigma = incidence(node, &line.from_node, &line.to_node);
                    if sigma != 0.0 {
                        coeffs.push((self.var(&line.id, None, Quantity::Flow, t), -sigma));
                    }
                }

                self.model.add_con(
                    format!("bal_{node}_t{t}"),
                    "power_balance",
                    coeffs,
                    Sense::Eq,
                    rhs,
                );
            }
        }
    }

    /// Regional reserve rows plus the CST auxiliary linearization
    /// m <= p_max s - p, m <= e/dt - p (exact on the >= side: the solver
    /// pushes m up against the smaller bound when reserve is needed).
    fn emit_reserves(&mut self) {
        let slots = self.slots();
        let dt = self.dt();

        for plant in &self.case.system.plants.clone() {
            if !plant.is_cst() {
                continue;
            }
            for t in 1..=slots {
                let m = self.var(&plant.id, None, Quantity::ReserveAux, t);
                let e = self.var(&plant.id, None, Quantity::CstEnergy, t);
                let mut headroom: Vec<(VarId, f64)> = vec![(m, 1.0)];
                let mut tes: Vec<(VarId, f64)> = vec![(m, 1.0), (e, -1.0 / dt)];
                for ent in self.entities.clone() {
                    if self.plant(&ent).id != plant.id {
                        continue;
                    }
                    let s = self.var(&plant.id, ent.unit, Quantity::Status, t);
                    let p = self.var(&plant.id, ent.unit, Quantity::Dispatch, t);
                    headroom.push((s, -plant.p_max_mw * ent.scale));
                    headroom.push((p, 1.0));
                    tes.push((p, 1.0));
                }
                self.model.add_con(
                    format!("resaux_cap_{}_t{t}", plant.id),
                    "reserve_aux",
                    headroom,
                    Sense::Le,
                    0.0,
                );
                self.model.add_con(
                    format!("resaux_tes_{}_t{t}", plant.id),
                    "reserve_aux",
                    tes,
                    Sense::Le,
                    0.0,
                );
            }
        }

        for region in self.case.system.network.regions.clone() {
            for t in 1..=slots {
                let rhs: f64 = self
                    .case
                    .system
                    .network
                    .nodes_in_region(&region)
                    .filter_map(|n| self.case.scenario.reserve_req_mw.get(n))
                    .map(|trace| trace[t - 1])
                    .sum();
                if rhs <= 0.0 && self.options.clipping {
                    self.clipping.record("reserve", true, 1);
                    continue;
                }
                let mut coeffs: Vec<(VarId, f64)> = Vec::new();
                for e in self.entities.clone() {
                    let plant = self.plant(&e).clone();
                    if self.case.system.network.node_region[&plant.node] != region {
                        continue;
                    }
                    if plant.is_cst() {
                        continue; // CST enters through its auxiliary below
                    }
                    coeffs.push((
                        self.var(&plant.id, e.unit, Quantity::Status, t),
                        plant.p_max_mw * e.scale,
                    ));
                    coeffs.push((self.var(&plant.id, e.unit, Quantity::Dispatch, t), -1.0));
                }
                for plant in &self.case.system.plants.clone() {
                    if plant.is_cst()
                        && self.case.system.network.node_region[&plant.node] == region
                    {
                        coeffs.push((self.var(&plant.id, None, Quantity::ReserveAux, t), 1.0));
                    }
                }
                self.clipping.record("reserve", false, 1);
                self.model.add_con(
                    format!("reserve_{region}_t{t}"),
                    "reserve",
                    coeffs,
                    Sense::Ge,
                    rhs,
                );
            }
        }
    }

    /// Minimum synchronous inertia per (region, slot):
    /// sum of s * H * S over online synchronous units.
    fn emit_inertia(&mut self) {
        let slots = self.slots();
        for region in self.case.system.network.regions.clone() {
            for t in 1..=slots {
                let rhs: f64 = self
                    .case
                    .system
                    .network
                    .nodes_in_region(&region)
                    .filter_map(|n| self.case.scenario.inertia_req_mws.get(n))
                    .map(|trace| trace[t - 1])
                    .sum();
                if rhs <= 0.0 && self.options.clipping {
                    self.clipping.record("inertia", true, 1);
                    continue;
                }
                let mut coeffs: Vec<(VarId, f64)> = Vec::new();
                for e in self.entities.clone() {
                    let plant = self.plant(&e).clone();
                    if self.case.system.network.node_region[&plant.node] != region {
                        continue;
                    }
                    let weight = plant.unit_inertia_mws() * e.scale;
                    if weight > 0.0 {
                        coeffs.push((self.var(&plant.id, e.unit, Quantity::Status, t), weight));
                    }
                }
                self.clipping.record("inertia", false, 1);
                self.model.add_con(
                    format!("inertia_{region}_t{t}"),
                    "inertia",
                    coeffs,
                    Sense::Ge,
                    rhs,
                );
            }
        }
    }

    // ----- network constraints ----------------------------------------------

    /// DC load flow for AC lines (p = B * angle difference), angle-difference
    /// bounds, and loss splits. HVDC flows stay free within their limits.
    fn emit_dc_flow(&mut self) {
        let slots = self.slots();
        let bound = self.case.system.network.angle_bound_rad;
        for line in &self.case.system.network.ac_lines.clone() {
            for t in 1..=slots {
                let f = self.var(&line.id, None, Quantity::Flow, t);
                let ax = self.var(&line.from_node, None, Quantity::Angle, t);
                let ay = self.var(&line.to_node, None, Quantity::Angle, t);
                let b = line.susceptance_mw_per_rad;
                self.model.add_con(
                    format!("dcflow_{}_t{t}", line.id),
                    "dc_flow",
                    vec![(f, 1.0), (ax, -b), (ay, b)],
                    Sense::Eq,
                    0.0,
                );
                self.model.add_con(
                    format!("angub_{}_t{t}", line.id),
                    "angle_bound",
                    vec![(ax, 1.0), (ay, -1.0)],
                    Sense::Le,
                    bound,
                );
                self.model.add_con(
                    format!("anglb_{}_t{t}", line.id),
                    "angle_bound",
                    vec![(ax, 1.0), (ay, -1.0)],
                    Sense::Ge,
                    -bound,
                );
                if self.options.losses && line.loss_factor > 0.0 {
                    let fp = self.var(&line.id, None, Quantity::FlowPos, t);
                    let fneg = self.var(&line.id, None, Quantity::FlowNeg, t);
                    self.model.add_con(
                        format!("losssplit_{}_t{t}", line.id),
                        "loss_split",
                        vec![(f, 1.0), (fp, -1.0), (fneg, 1.0)],
                        Sense::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    /// Stable operating limits per commitment entity:
    /// s p_min <= p <= s p_max (unit-scaled in AGG).
    fn emit_generation_limits(&mut self) {
        let slots = self.slots();
        for e in self.entities.clone() {
            let plant = self.plant(&e).clone();
            let name = self.entity_name(&e);
            for t in 1..=slots {
                let s = self.var(&plant.id, e.unit, Quantity::Status, t);
                let p = self.var(&plant.id, e.unit, Quantity::Dispatch, t);
                self.model.add_con(
                    format!("genmax_{name}_t{t}"),
                    "gen_max",
                    vec![(p, 1.0), (s, -plant.p_max_mw * e.scale)],
                    Sense::Le,
                    0.0,
                );
                if plant.p_min_mw > 0.0 {
                    self.model.add_con(
                        format!("genmin_{name}_t{t}"),
                        "gen_min",
                        vec![(p, 1.0), (s, -plant.p_min_mw * e.scale)],
                        Sense::Ge,
                        0.0,
                    );
                }
            }
        }
        // RES availability is enforced through the dispatch variable bounds
        // (status fixed to one; spillage permitted).
    }

    /// Startup/shutdown bookkeeping: u - d = s_t - s_{t-1}, with the
    /// initial unit count at t = 1.
    fn emit_commitment_logic(&mut self) {
        let slots = self.slots();
        for e in self.entities.clone() {
            let plant = self.plant(&e).clone();
            let name = self.entity_name(&e);
            for t in 1..=slots {
                let s = self.var(&plant.id, e.unit, Quantity::Status, t);
                let u = self.var(&plant.id, e.unit, Quantity::Startup, t);
                let d = self.var(&plant.id, e.unit, Quantity::Shutdown, t);
                let mut coeffs = vec![(u, 1.0), (d, -1.0), (s, -1.0)];
                let rhs = if t == 1 {
                    -e.init_online
                } else {
                    let prev = self.var(&plant.id, e.unit, Quantity::Status, t - 1);
                    coeffs.push((prev, 1.0));
                    0.0
                };
                self.model.add_con(
                    format!("logic_{name}_t{t}"),
                    "commitment_logic",
                    coeffs,
                    Sense::Eq,
                    rhs,
                );
            }
        }
    }

    /// Ramp-rate rows for plants whose per-unit ramp cannot traverse the
    /// operating range within one slot; others are clipped.
    ///
    /// One row per (plant, slot) in every variant: per-unit dispatch and
    /// status variables are summed, which keeps the binary per-unit model an
    /// exact reformulation of the clustered one (identical units share a
    /// single plant-level ramp budget).
    fn emit_ramps(&mut self) {
        let slots = self.slots();
        let dt = self.dt();
        for (_, ents) in self.entity_groups() {
            let plant = self.plant(&ents[0]).clone();
            let rule = self.plan.rule(&plant.id);
            let clip_up = rule.ramp_up;
            let clip_down = rule.ramp_down;
            self.clipping.record("ramp_up", clip_up, slots);
            self.clipping.record("ramp_down", clip_down, slots);
            if clip_up && clip_down {
                continue;
            }
            let init_online: f64 = ents.iter().map(|e| e.init_online * e.scale).sum();
            let init_dispatch: f64 = ents.iter().map(|e| e.init_dispatch).sum();
            for t in 1..=slots {
                if !clip_up {
                    let limit = plant.ramp_up_mw_per_h * dt;
                    let mut coeffs = Vec::new();
                    for e in &ents {
                        coeffs.push((self.var(&plant.id, e.unit, Quantity::Dispatch, t), 1.0));
                        coeffs.push((
                            self.var(&plant.id, e.unit, Quantity::Status, t),
                            -limit * e.scale,
                        ));
                    }
                    let rhs = if t == 1 {
                        init_dispatch
                    } else {
                        for e in &ents {
                            coeffs.push((
                                self.var(&plant.id, e.unit, Quantity::Dispatch, t - 1),
                                -1.0,
                            ));
                        }
                        0.0
                    };
                    self.model.add_con(
                        format!("rampup_{}_t{t}", plant.id),
                        "ramp_up",
                        coeffs,
                        Sense::Le,
                        rhs,
                    );
                }
                if !clip_down {
                    let limit = plant.ramp_down_mw_per_h * dt;
                    if t == 1 {
                        // init_dispatch - sum p_1 <= init_online * limit
                        let coeffs: Vec<(VarId, f64)> = ents
                            .iter()
                            .map(|e| (self.var(&plant.id, e.unit, Quantity::Dispatch, t), -1.0))
                            .collect();
                        self.model.add_con(
                            format!("rampdn_{}_t{t}", plant.id),
                            "ramp_down",
                            coeffs,
                            Sense::Le,
                            init_online * limit - init_dispatch,
                        );
                    } else {
                        let mut coeffs = Vec::new();
                        for e in &ents {
                            coeffs.push((
                                self.var(&plant.id, e.unit, Quantity::Dispatch, t - 1),
                                1.0,
                            ));
                            coeffs.push((self.var(&plant.id, e.unit, Quantity::Dispatch, t), -1.0));
                            coeffs.push((
                                self.var(&plant.id, e.unit, Quantity::Status, t - 1),
                                -limit * e.scale,
                            ));
                        }
                        self.model.add_con(
                            format!("rampdn_{}_t{t}", plant.id),
                            "ramp_down",
                            coeffs,
                            Sense::Le,
                            0.0,
                        );
                    }
                }
            }
        }
    }

    /// Minimum up/down time windows, with boundary terms from carried
    /// startup/shutdown history for t within the window.
    fn emit_mudt(&mut self) {
        let slots = self.slots();
        for (_, ents) in self.entity_groups() {
            let plant = self.plant(&ents[0]).clone();
            let rule = self.plan.rule(&plant.id);
            let clip_up = rule.min_up;
            let clip_down = rule.min_down;
            self.clipping.record("min_up", clip_up, slots);
            self.clipping.record("min_down", clip_down, slots);
            let emit_up = !clip_up && plant.min_up_slots > 1;
            let emit_down = !clip_down && plant.min_down_slots > 1;
            // Plant-level unit budget: equals the unit count in every variant.
            let total_units: f64 = ents.iter().map(|e| e.max_units * e.scale).sum();
            for t in 1..=slots {
                if emit_up {
                    let tau = plant.min_up_slots as usize;
                    let start = t.saturating_sub(tau - 1).max(1);
                    let mut coeffs = Vec::new();
                    for e in &ents {
                        coeffs.push((self.var(&plant.id, e.unit, Quantity::Status, t), e.scale));
                        for j in start..=t {
                            coeffs.push((
                                self.var(&plant.id, e.unit, Quantity::Startup, j),
                                -e.scale,
                            ));
                        }
                    }
                    let rhs = if t < tau {
                        ents.iter().map(|e| e.scale * self.must_stay_on(e, t)).sum()
                    } else {
                        0.0
                    };
                    self.model.add_con(
                        format!("minup_{}_t{t}", plant.id),
                        "min_up",
                        coeffs,
                        Sense::Ge,
                        rhs,
                    );
                }
                if emit_down {
                    let tau = plant.min_down_slots as usize;
                    let start = t.saturating_sub(tau - 1).max(1);
                    let mut coeffs = Vec::new();
                    for e in &ents {
                        coeffs.push((self.var(&plant.id, e.unit, Quantity::Status, t), e.scale));
                        for j in start..=t {
                            coeffs.push((
                                self.var(&plant.id, e.unit, Quantity::Shutdown, j),
                                e.scale,
                            ));
                        }
                    }
                    let off: f64 = ents.iter().map(|e| e.scale * self.must_stay_off(e, t)).sum();
                    let rhs = if t < tau { total_units - off } else { total_units };
                    self.model.add_con(
                        format!("mindn_{}_t{t}", plant.id),
                        "min_down",
                        coeffs,
                        Sense::Le,
                        rhs,
                    );
                }
            }
        }
    }

    /// TES energy balance per CST plant:
    /// e_t = eta e_{t-1} + capture_t - p_t dt.
    fn emit_cst(&mut self) {
        let slots = self.slots();
        let dt = self.dt();
        for plant in &self.case.system.plants.clone() {
            let Some(tes) = plant.tes.clone() else { continue };
            let capture = self.case.scenario.cst_capture_mwh_th[&plant.id].clone();
            for t in 1..=slots {
                let e = self.var(&plant.id, None, Quantity::CstEnergy, t);
                let mut coeffs: Vec<(VarId, f64)> = vec![(e, 1.0)];
                for ent in self.entities.clone() {
                    if self.plant(&ent).id == plant.id {
                        coeffs.push((self.var(&plant.id, ent.unit, Quantity::Dispatch, t), dt));
                    }
                }
                let mut rhs = capture[t - 1];
                if t == 1 {
                    rhs += tes.efficiency * self.init.cst_energy_mwh_th[&plant.id];
                } else {
                    let prev = self.var(&plant.id, None, Quantity::CstEnergy, t - 1);
                    coeffs.push((prev, -tes.efficiency));
                }
                self.model.add_con(
                    format!("cstsoc_{}_t{t}", plant.id),
                    "cst_soc",
                    coeffs,
                    Sense::Eq,
                    rhs,
                );
            }
        }
    }

    /// Utility storage energy balance (charging positive):
    /// e_t = eta e_{t-1} + p_t dt.
    fn emit_storage(&mut self) {
        let slots = self.slots();
        let dt = self.dt();
        for s in &self.case.system.storage.clone() {
            for t in 1..=slots {
                let e = self.var(&s.id, None, Quantity::StorageEnergy, t);
                let p = self.var(&s.id, None, Quantity::StoragePower, t);
                let mut coeffs = vec![(e, 1.0), (p, -dt)];
                let rhs = if t == 1 {
                    s.efficiency * self.init.storage_energy_mwh[&s.id]
                } else {
                    let prev = self.var(&s.id, None, Quantity::StorageEnergy, t - 1);
                    coeffs.push((prev, -s.efficiency));
                    0.0
                };
                self.model.add_con(
                    format!("stsoc_{}_t{t}", s.id),
                    "storage_soc",
                    coeffs,
                    Sense::Eq,
                    rhs,
                );
            }
        }
    }

    /// Optional BUC symmetry breaking: units of a plant commit in index
    /// order.
    fn emit_symmetry_breaking(&mut self) {
        let slots = self.slots();
        let entities = self.entities.clone();
        for pair in entities.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.plant_idx != b.plant_idx {
                continue;
            }
            let plant = self.plant(a).clone();
            for t in 1..=slots {
                let sa = self.var(&plant.id, a.unit, Quantity::Status, t);
                let sb = self.var(&plant.id, b.unit, Quantity::Status, t);
                self.model.add_con(
                    format!("sym_{}_u{}_t{t}", plant.id, b.unit.unwrap()),
                    "symmetry",
                    vec![(sa, 1.0), (sb, -1.0)],
                    Sense::Ge,
                    0.0,
                );
            }
        }
    }

    fn counts(&self) -> ModelCounts {
        let mut by_group: BTreeMap<String, usize> = BTreeMap::new();
        for con in &self.model.constraints {
            *by_group.entry(con.group.clone()).or_default() += 1;
        }
        ModelCounts {
            variables: self.model.num_vars(),
            integer_variables: self
                .model
                .variables
                .iter()
                .filter(|v| v.kind == VarKind::Integer)
                .count(),
            binary_variables: self
                .model
                .variables
                .iter()
                .filter(|v| v.kind == VarKind::Binary)
                .count(),
            commitment_variables: self.commitment_vars,
            constraints: self.model.num_constraints(),
            constraints_by_group: by_group,
        }
    }
}

fn incidence(node: &str, from: &str, to: &str) -> f64 {
    if node == from {
        1.0
    } else if node == to {
        -1.0
    } else {
        0.0
    }
}

/// One reference node per AC-connected island (lexicographically first),
/// pinned to angle zero.
fn reference_nodes(net: &crate::model::NetworkModel) -> std::collections::BTreeSet<String> {
    let mut parent: BTreeMap<&str, &str> = net.nodes.iter().map(|n| (n.as_str(), n.as_str())).collect();
    fn find<'a>(parent: &mut BTreeMap<&'a str, &'a str>, mut x: &'a str) -> &'a str {
        while parent[x] != x {
            let up = parent[parent[x]];
            parent.insert(x, up);
            x = up;
        }
        x
    }
    for line in &net.ac_lines {
        let a = find(&mut parent, line.from_node.as_str());
        let b = find(&mut parent, line.to_node.as_str());
        if a != b {
            // Union by name keeps the lexicographically smaller as root.
            if a < b {
                parent.insert(b, a);
            } else {
                parent.insert(a, b);
            }
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    for node in &net.nodes {
        let r = find(&mut parent, node.as_str());
        roots.insert(r.to_string());
    }
    roots
}
