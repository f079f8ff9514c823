//! Run-directory persistence: dispatch table, machine-readable result,
//! and run metadata.

use super::{check_version, write_atomic, IoError, FORMAT_VERSION};
use crate::dispatch::DispatchResult;
use crate::formulation::AssembleOptions;
use crate::rolling::HorizonPlan;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Everything needed to reproduce and interpret a run, minus the traces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMetadata {
    pub format_version: String,
    pub variant: crate::formulation::Variant,
    pub options: AssembleOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_plan: Option<HorizonPlan>,
    pub backend: String,
    pub gap_target: f64,
    pub status: crate::milp::SolveStatus,
    pub objective: f64,
    pub gap: f64,
    pub wall_time_s: f64,
    pub node_count: u64,
    pub counts: crate::formulation::ModelCounts,
    pub clipping: crate::clipping::ClippingReport,
}

impl RunMetadata {
    pub fn from_result(
        result: &DispatchResult,
        options: AssembleOptions,
        horizon_plan: Option<HorizonPlan>,
        backend: &str,
        gap_target: f64,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            variant: result.variant,
            options,
            horizon_plan,
            backend: backend.to_string(),
            gap_target,
            status: result.status,
            objective: result.objective,
            gap: result.gap,
            wall_time_s: result.wall_time_s,
            node_count: result.node_count,
            counts: result.counts.clone(),
            clipping: result.clipping.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ResultFile {
    format_version: String,
    result: DispatchResult,
}

/// Writes `dispatch.csv`, `result.json`, and `metadata.json` into `dir`.
pub fn persist_results(
    dir: &Path,
    result: &DispatchResult,
    meta: &RunMetadata,
) -> Result<(), IoError> {
    let json_err = |path: &Path| {
        let path = path.display().to_string();
        move |e: serde_json::Error| IoError::Parse {
            path: path.clone(),
            message: e.to_string(),
        }
    };

    let wrapped = ResultFile {
        format_version: FORMAT_VERSION.to_string(),
        result: result.clone(),
    };
    let result_path = dir.join("result.json");
    let body = serde_json::to_vec_pretty(&wrapped).map_err(json_err(&result_path))?;
    write_atomic(&result_path, &body)?;

    let meta_path = dir.join("metadata.json");
    let body = serde_json::to_vec_pretty(meta).map_err(json_err(&meta_path))?;
    write_atomic(&meta_path, &body)?;

    write_atomic(&dir.join("dispatch.csv"), dispatch_table(result).as_bytes())
}

/// Wide table: one row per (slot, entity); empty cells where a column does
/// not apply to the entity kind.
fn dispatch_table(result: &DispatchResult) -> String {
    let mut out = String::from(
        "slot,entity,kind,units_online,startups,shutdowns,power_mw,energy_mwh,angle_rad\n",
    );
    let slots = result
        .plants
        .values()
        .next()
        .map(|p| p.dispatch_mw.len())
        .unwrap_or(0);
    use std::fmt::Write;
    for t in 1..=slots {
        let i = t - 1;
        for (id, pd) in &result.plants {
            writeln!(
                out,
                "{t},{id},plant,{},{},{},{},,",
                pd.units_online[i], pd.startups[i], pd.shutdowns[i], pd.dispatch_mw[i]
            )
            .unwrap();
        }
        for (id, flow) in &result.flows_mw {
            writeln!(out, "{t},{id},line,,,,{},,", flow[i]).unwrap();
        }
        for (id, angle) in &result.angles_rad {
            writeln!(out, "{t},{id},node,,,,,,{}", angle[i]).unwrap();
        }
        for (id, e) in &result.cst_energy_mwh_th {
            writeln!(out, "{t},{id},tes,,,,,{},", e[i]).unwrap();
        }
        for (id, p) in &result.storage_power_mw {
            writeln!(
                out,
                "{t},{id},storage,,,,{},{},",
                p[i], result.storage_energy_mwh[id][i]
            )
            .unwrap();
        }
        for (id, sol) in &result.prosumers {
            writeln!(
                out,
                "{t},{id},prosumer,,,,{},{},",
                sol.import_mw[i] - sol.export_mw[i],
                sol.battery_energy_mwh[i]
            )
            .unwrap();
        }
    }
    out
}

/// Reads back a persisted run.
pub fn load_results(dir: &Path) -> Result<(DispatchResult, RunMetadata), IoError> {
    let result_path = dir.join("result.json");
    let parse_err = |path: &Path| {
        let path = path.display().to_string();
        move |e: serde_json::Error| IoError::Parse {
            path: path.clone(),
            message: e.to_string(),
        }
    };
    let wrapped: ResultFile = serde_json::from_slice(&std::fs::read(&result_path)?)
        .map_err(parse_err(&result_path))?;
    check_version(&result_path.display().to_string(), &wrapped.format_version)?;
    let meta_path = dir.join("metadata.json");
    let meta: RunMetadata =
        serde_json::from_slice(&std::fs::read(&meta_path)?).map_err(parse_err(&meta_path))?;
    check_version(&meta_path.display().to_string(), &meta.format_version)?;
    Ok((wrapped.result, meta))
}
