//! Case directory load/save: `case.toml` + `traces.csv`.

use super::{check_version, write_atomic, IoError, FORMAT_VERSION};
use crate::model::{validate, Case, Consumer, InitialState, PowerSystem, Scenario};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct CaseFile {
    format_version: String,
    scenario: ScenarioHeader,
    system: PowerSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_state: Option<InitialState>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioHeader {
    dt_hours: f64,
    slots: usize,
    consumers: Vec<Consumer>,
}

/// The trace families stored in `traces.csv`, with their in-memory slot on
/// the scenario. Quantity strings are part of the file format.
const TRACE_QUANTITIES: [&str; 7] = [
    "consumer_load_mw",
    "prosumer_load_mw",
    "prosumer_pv_mw",
    "res_availability_mw",
    "cst_capture_mwh_th",
    "reserve_req_mw",
    "inertia_req_mws",
];

fn trace_map<'a>(scenario: &'a Scenario, quantity: &str) -> &'a BTreeMap<String, Vec<f64>> {
    match quantity {
        "consumer_load_mw" => &scenario.consumer_load_mw,
        "prosumer_load_mw" => &scenario.prosumer_load_mw,
        "prosumer_pv_mw" => &scenario.prosumer_pv_mw,
        "res_availability_mw" => &scenario.res_availability_mw,
        "cst_capture_mwh_th" => &scenario.cst_capture_mwh_th,
        "reserve_req_mw" => &scenario.reserve_req_mw,
        "inertia_req_mws" => &scenario.inertia_req_mws,
        other => panic!("unknown trace quantity {other}"),
    }
}

fn trace_map_mut<'a>(scenario: &'a mut Scenario, quantity: &str) -> Option<&'a mut BTreeMap<String, Vec<f64>>> {
    Some(match quantity {
        "consumer_load_mw" => &mut scenario.consumer_load_mw,
        "prosumer_load_mw" => &mut scenario.prosumer_load_mw,
        "prosumer_pv_mw" => &mut scenario.prosumer_pv_mw,
        "res_availability_mw" => &mut scenario.res_availability_mw,
        "cst_capture_mwh_th" => &mut scenario.cst_capture_mwh_th,
        "reserve_req_mw" => &mut scenario.reserve_req_mw,
        "inertia_req_mws" => &mut scenario.inertia_req_mws,
        _ => return None,
    })
}

/// Writes `case.toml` and `traces.csv` into `dir`.
pub fn save_case(dir: &Path, case: &Case, init: &InitialState) -> Result<(), IoError> {
    let file = CaseFile {
        format_version: FORMAT_VERSION.to_string(),
        scenario: ScenarioHeader {
            dt_hours: case.scenario.dt_hours,
            slots: case.scenario.slots,
            consumers: case.scenario.consumers.clone(),
        },
        system: case.system.clone(),
        initial_state: Some(init.clone()),
    };
    let toml_text = toml::to_string_pretty(&file).map_err(|e| IoError::Parse {
        path: dir.join("case.toml").display().to_string(),
        message: e.to_string(),
    })?;
    write_atomic(&dir.join("case.toml"), toml_text.as_bytes())?;

    let mut csv_bytes = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut csv_bytes);
        w.write_record(["slot", "entity", "quantity", "value"])
            .map_err(csv_err(dir, "traces.csv"))?;
        for quantity in TRACE_QUANTITIES {
            for (entity, trace) in trace_map(&case.scenario, quantity) {
                for (i, value) in trace.iter().enumerate() {
                    w.write_record([
                        (i + 1).to_string(),
                        entity.clone(),
                        quantity.to_string(),
                        format!("{value}"),
                    ])
                    .map_err(csv_err(dir, "traces.csv"))?;
                }
            }
        }
        w.flush()?;
    }
    write_atomic(&dir.join("traces.csv"), &csv_bytes)
}

fn csv_err(dir: &Path, file: &str) -> impl Fn(csv::Error) -> IoError {
    let path = dir.join(file).display().to_string();
    move |e| IoError::Parse {
        path: path.clone(),
        message: e.to_string(),
    }
}

/// Loads and validates a case directory; the returned pair passed the full
/// model validation.
pub fn load_case(dir: &Path) -> Result<(Case, InitialState), IoError> {
    let toml_path = dir.join("case.toml");
    let text = std::fs::read_to_string(&toml_path)?;
    let file: CaseFile = toml::from_str(&text).map_err(|e| IoError::Parse {
        path: toml_path.display().to_string(),
        message: e.to_string(),
    })?;
    check_version(&toml_path.display().to_string(), &file.format_version)?;

    let mut scenario = Scenario {
        dt_hours: file.scenario.dt_hours,
        slots: file.scenario.slots,
        consumers: file.scenario.consumers,
        consumer_load_mw: BTreeMap::new(),
        prosumer_load_mw: BTreeMap::new(),
        prosumer_pv_mw: BTreeMap::new(),
        res_availability_mw: BTreeMap::new(),
        cst_capture_mwh_th: BTreeMap::new(),
        reserve_req_mw: BTreeMap::new(),
        inertia_req_mws: BTreeMap::new(),
    };
    let slots = scenario.slots;

    let csv_path = dir.join("traces.csv");
    let mut reader = csv::Reader::from_path(&csv_path).map_err(|e| IoError::Parse {
        path: csv_path.display().to_string(),
        message: e.to_string(),
    })?;
    // Length bookkeeping so a short trace names itself in the error.
    let mut filled: BTreeMap<(String, String), Vec<bool>> = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::Parse {
            path: csv_path.display().to_string(),
            message: e.to_string(),
        })?;
        let parse_err = |message: String| IoError::Parse {
            path: format!("{}:{}", csv_path.display(), line + 2),
            message,
        };
        if record.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, got {}", record.len())));
        }
        let slot: usize = record[0]
            .parse()
            .map_err(|_| parse_err(format!("bad slot `{}`", &record[0])))?;
        if slot == 0 || slot > slots {
            return Err(parse_err(format!("slot {slot} outside 1..={slots}")));
        }
        let entity = record[1].to_string();
        let quantity = record[2].to_string();
        let value: f64 = record[3]
            .parse()
            .map_err(|_| parse_err(format!("bad value `{}`", &record[3])))?;
        let map = trace_map_mut(&mut scenario, &quantity)
            .ok_or_else(|| parse_err(format!("unknown quantity `{quantity}`")))?;
        map.entry(entity.clone())
            .or_insert_with(|| vec![0.0; slots])[slot - 1] = value;
        filled
            .entry((entity, quantity))
            .or_insert_with(|| vec![false; slots])[slot - 1] = true;
    }
    for ((entity, quantity), mask) in &filled {
        if let Some(slot) = mask.iter().position(|&ok| !ok) {
            return Err(IoError::MissingTrace {
                entity: entity.clone(),
                quantity: quantity.clone(),
                slot: slot + 1,
            });
        }
    }

    let case = Case {
        system: file.system,
        scenario,
    };
    let init = file
        .initial_state
        .unwrap_or_else(|| crate::model::default_initial_state(&case.system));
    let report = validate(&case, &init);
    if !report.is_empty() {
        return Err(IoError::Validation(report));
    }
    Ok((case, init))
}
