//! Bijective map from (entity, quantity, slot) to MILP variable ids.
//!
//! Every symbol used by any emitted equation is housed here; emission code
//! looks variables up instead of re-deriving offsets, so a missing
//! definition fails loudly.

use crate::milp::VarId;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Online-unit count (integer in MST, binary per unit in BUC, binary
    /// per plant in AGG).
    Status,
    Startup,
    Shutdown,
    Dispatch,
    Flow,
    /// Positive/negative flow split used by the loss model.
    FlowPos,
    FlowNeg,
    Angle,
    CstEnergy,
    StoragePower,
    StorageEnergy,
    /// CST reserve contribution auxiliary m_g.
    ReserveAux,
    ProsImport,
    ProsExport,
    ProsBattery,
    ProsBatteryEnergy,
    /// KKT machinery for the embedded prosumer sub-problem. Duals of the
    /// two equality row families:
    DualBalance,
    DualSoc,
    /// Bound multipliers and complementarity indicators per primal
    /// quantity (Lo = at lower bound, Hi = at upper bound).
    DualLo(ProsumerVar),
    DualHi(ProsumerVar),
    BinLo(ProsumerVar),
    BinHi(ProsumerVar),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProsumerVar {
    Import,
    Export,
    Battery,
    BatteryEnergy,
}

/// Key for one decision variable. `unit` is `Some` only in the BUC variant,
/// where commitment quantities exist per unit of a plant. `slot` is
/// 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarKey {
    pub entity: String,
    pub unit: Option<u32>,
    pub quantity: Quantity,
    pub slot: usize,
}

#[derive(Debug, Default)]
pub struct VariableIndex {
    map: HashMap<VarKey, VarId>,
}

impl VariableIndex {
    pub fn insert(&mut self, key: VarKey, id: VarId) {
        let prev = self.map.insert(key.clone(), id);
        assert!(prev.is_none(), "variable defined twice: {key:?}");
    }

    pub fn lookup(&self, entity: &str, unit: Option<u32>, quantity: Quantity, slot: usize) -> VarId {
        self.get(entity, unit, quantity, slot)
            .unwrap_or_else(|| panic!("variable not indexed: {entity}/{unit:?}/{quantity:?}/t{slot}"))
    }

    pub fn get(&self, entity: &str, unit: Option<u32>, quantity: Quantity, slot: usize) -> Option<VarId> {
        self.map
            .get(&VarKey {
                entity: entity.to_string(),
                unit,
                quantity,
                slot,
            })
            .copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
