//! File formats: signal-set JSON, domain overrides, condition specs,
//! experiment manifests, front/report outputs and trace dumps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use icd_core::discrim::Params;
use icd_core::generator::{AtrialMode, ConditionSpec, SignalClass};
use icd_core::objectives::ParetoFront;
use icd_core::params::{
    expand_domains, ParamId, ParamSpec, ParamVector, ParameterDomain, RoundingMode, Unit,
};
use icd_core::signal::{FeatureSignal, Label};
use icd_core::Rat;

use crate::{io_err, ToolError};

/// Writes a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ToolError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes()).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| ToolError::Io {
        path: path.into(),
        source: e.error,
    })?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String, ToolError> {
    fs::read_to_string(path).map_err(io_err(path))
}

// --- signal sets ------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct SignalDto {
    id: String,
    label: String,
    vints: Vec<i64>,
    aints: Vec<i64>,
    atrial_count: Vec<usize>,
    fcc: Vec<f64>,
}

/// Provenance of a generated set; carried so sets are reproducible.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GenMeta {
    pub prng: String,
    pub seed: u64,
    pub condition: String,
    pub count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct SignalSetFile {
    signals: Vec<SignalDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<GenMeta>,
}

fn label_str(label: Label) -> &'static str {
    match label {
        Label::RequiresTherapy => "VT",
        Label::NoTherapy => "SVT",
    }
}

/// Loads and validates a signal-set file.
pub fn load_signals(path: &Path) -> Result<Vec<FeatureSignal>, ToolError> {
    let text = read_to_string(path)?;
    let file: SignalSetFile = serde_json::from_str(&text)
        .map_err(|e| ToolError::Data(format!("{}: {e}", path.display())))?;
    if file.signals.is_empty() {
        return Err(ToolError::Data(format!(
            "{}: empty signal set",
            path.display()
        )));
    }
    file.signals
        .into_iter()
        .map(|dto| {
            let label = match dto.label.as_str() {
                "VT" => Label::RequiresTherapy,
                "SVT" => Label::NoTherapy,
                other => {
                    return Err(ToolError::Data(format!(
                        "signal {}: unknown label {other:?} (expected \"VT\" or \"SVT\")",
                        dto.id
                    )))
                }
            };
            FeatureSignal::new(
                dto.id,
                dto.vints,
                dto.aints,
                dto.atrial_count,
                dto.fcc,
                label,
            )
            .map_err(ToolError::data)
        })
        .collect()
}

/// Saves a signal set (optionally with generation metadata).
pub fn save_signals(
    signals: &[FeatureSignal],
    meta: Option<GenMeta>,
    path: &Path,
) -> Result<(), ToolError> {
    let file = SignalSetFile {
        signals: signals
            .iter()
            .map(|s| SignalDto {
                id: s.id.clone(),
                label: label_str(s.label).to_string(),
                vints: s.vints.clone(),
                aints: s.aints.clone(),
                atrial_count: s.atrial_count.clone(),
                fcc: s.fcc.clone(),
            })
            .collect(),
        meta,
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(ToolError::data)?;
    text.push('\n');
    write_atomic(path, &text)
}

// --- condition specs ---------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ConditionDto {
    name: String,
    class: String,
    vint_range: [i64; 2],
    vint_jitter: i64,
    a_to_v: String,
    aint_range: [i64; 2],
    fcc_high_prob: f64,
    duration_s: u32,
}

pub fn load_condition_spec(path: &Path) -> Result<ConditionSpec, ToolError> {
    let text = read_to_string(path)?;
    let dto: ConditionDto = serde_json::from_str(&text)
        .map_err(|e| ToolError::Data(format!("{}: {e}", path.display())))?;
    let class = match dto.class.as_str() {
        "VT" => SignalClass::Vt,
        "SVT" => SignalClass::Svt,
        other => return Err(ToolError::Data(format!("unknown class {other:?}"))),
    };
    let a_to_v = match dto.a_to_v.as_str() {
        "TRACKING" => AtrialMode::Tracking,
        "AFIB" => AtrialMode::Afib,
        "FLUTTER" => AtrialMode::Flutter,
        other => return Err(ToolError::Data(format!("unknown atrial mode {other:?}"))),
    };
    Ok(ConditionSpec {
        name: dto.name,
        class,
        vint_range: (dto.vint_range[0], dto.vint_range[1]),
        vint_jitter: dto.vint_jitter,
        a_to_v,
        aint_range: (dto.aint_range[0], dto.aint_range[1]),
        fcc_high_prob: dto.fcc_high_prob,
        duration_s: dto.duration_s,
    })
}

// --- parameter-domain overrides -----------------------------------------------

#[derive(Debug, Deserialize)]
struct DomainEntry {
    values: Vec<f64>,
    nominal: f64,
}

/// Loads a domain-override file (Table-1 shape: programmed-unit value lists
/// plus the nominal value, keyed by parameter name). Missing parameters keep
/// their built-in lists.
pub fn load_domain(path: Option<&Path>) -> Result<ParameterDomain, ToolError> {
    let base = expand_domains();
    let Some(path) = path else { return Ok(base) };
    let text = read_to_string(path)?;
    let entries: BTreeMap<String, DomainEntry> = serde_json::from_str(&text)
        .map_err(|e| ToolError::Data(format!("{}: {e}", path.display())))?;

    for key in entries.keys() {
        if ParamId::from_label(key).is_none() {
            return Err(ToolError::Data(format!(
                "{}: unknown parameter {key:?}",
                path.display()
            )));
        }
    }

    let mut specs: Vec<ParamSpec> = Vec::with_capacity(7);
    for id in ParamId::ALL {
        let spec = base.spec(id).clone();
        match entries.get(id.label()) {
            None => specs.push(spec),
            Some(entry) => {
                let values = entry
                    .values
                    .iter()
                    .map(|&v| programmed_to_scaled(id.label(), spec.unit, v))
                    .collect::<Result<Vec<i64>, ToolError>>()?;
                let nominal_scaled = programmed_to_scaled(id.label(), spec.unit, entry.nominal)?;
                let nominal_idx = values
                    .iter()
                    .position(|&v| v == nominal_scaled)
                    .ok_or_else(|| {
                        ToolError::Data(format!(
                            "{}: nominal {} not in the value list",
                            id.label(),
                            entry.nominal
                        ))
                    })? as u8
                    + 1;
                specs.push(ParamSpec {
                    unit: spec.unit,
                    values,
                    nominal_idx,
                });
            }
        }
    }
    ParameterDomain::new(specs.try_into().expect("seven parameters")).map_err(ToolError::data)
}

/// Converts a programmed-unit number to the scaled integer representation
/// (BPM as-is, seconds to ms, scores to hundredths).
pub fn programmed_to_scaled(name: &str, unit: Unit, v: f64) -> Result<i64, ToolError> {
    let scale = match unit {
        Unit::Bpm | Unit::MsSq => 1.0,
        Unit::Seconds => 1000.0,
        Unit::Score => 100.0,
    };
    let scaled = v * scale;
    let rounded = scaled.round();
    if (scaled - rounded).abs() > 1e-6 {
        return Err(ToolError::Data(format!(
            "{name}: value {v} is finer than the supported resolution"
        )));
    }
    Ok(rounded as i64)
}

// --- rounding / enums as strings ----------------------------------------------

pub fn parse_rounding(s: &str) -> Result<RoundingMode, ToolError> {
    match s {
        "half-up" => Ok(RoundingMode::HalfUp),
        "ceil" => Ok(RoundingMode::Ceil),
        other => Err(ToolError::Usage(format!(
            "unknown rounding mode {other:?} (expected half-up or ceil)"
        ))),
    }
}

pub fn rounding_str(mode: RoundingMode) -> &'static str {
    match mode {
        RoundingMode::HalfUp => "half-up",
        RoundingMode::Ceil => "ceil",
    }
}

// --- experiment manifests -------------------------------------------------------

/// Experiment manifest: everything a synthesis/solve run needs, so results
/// are reproducible from this file alone.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domains: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_params: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_cmd: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smt_mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smt_dist: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_s: Option<u64>,
}

pub fn load_manifest(path: &Path) -> Result<Manifest, ToolError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| ToolError::Data(format!("{}: {e}", path.display())))
}

// --- report / front files ---------------------------------------------------------

fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn rat_string(r: Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rat(s: &str) -> Result<Rat, ToolError> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| ToolError::Data(format!("malformed ratio {s:?}")))?;
    let n: i64 = n.parse().map_err(ToolError::data)?;
    let d: i64 = d.parse().map_err(ToolError::data)?;
    if d <= 0 {
        return Err(ToolError::Data(format!("malformed ratio {s:?}")));
    }
    Ok(Rat::new(n, d))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FrontPointDto {
    pub distance: u32,
    pub effectiveness: f64,
    pub effectiveness_ratio: String,
    pub indices: Vec<u8>,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsDto {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LayerDto {
    pub distance: u32,
    pub box_size: u64,
    pub best_effectiveness: f64,
}

/// Synthesis report; deterministic given manifest + seed (no timing inside).
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub backend: String,
    pub seed: u64,
    pub rounding: String,
    /// Shape of the parameter domain the indices refer to; validate refuses
    /// fronts whose fingerprint does not match its own domain.
    pub domain_fingerprint: String,
    pub free_params: Vec<String>,
    pub grid_size: u128,
    pub evaluations: u64,
    pub front_size: usize,
    pub front: Vec<FrontPointDto>,
    pub effectiveness_stats: StatsDto,
    pub distance_stats: StatsDto,
    pub layers: Vec<LayerDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_score_ratio: Option<String>,
}

/// Compact, deterministic description of the domain's value lists.
pub fn domain_fingerprint(domain: &ParameterDomain) -> String {
    ParamId::ALL
        .iter()
        .map(|&id| {
            let spec = domain.spec(id);
            format!(
                "{}:{}..{}/{}@{}",
                id.label(),
                spec.values.first().unwrap(),
                spec.values.last().unwrap(),
                spec.values.len(),
                spec.nominal_idx
            )
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn front_point_dto(
    domain: &ParameterDomain,
    distance: u32,
    effectiveness: Rat,
    witness: &ParamVector,
) -> FrontPointDto {
    FrontPointDto {
        distance,
        effectiveness: rat_to_f64(effectiveness),
        effectiveness_ratio: rat_string(effectiveness),
        indices: witness.0.to_vec(),
        params: ParamId::ALL
            .iter()
            .map(|&id| {
                (
                    id.label().to_string(),
                    domain.render_value(id, witness.get(id)),
                )
            })
            .collect(),
    }
}

/// The front CSV: `distance,effectiveness,VF_th,...` in programmed units.
pub fn front_csv(domain: &ParameterDomain, front: &ParetoFront) -> String {
    let mut out = String::from("distance,effectiveness");
    for id in ParamId::ALL {
        let _ = write!(out, ",{}", id.label());
    }
    out.push('\n');
    for pt in front.points() {
        let _ = write!(out, "{},{}", pt.distance, rat_to_f64(pt.effectiveness));
        for id in ParamId::ALL {
            let _ = write!(out, ",{}", domain.render_value(id, pt.witness.get(id)));
        }
        out.push('\n');
    }
    out
}

pub fn stats_of(values: impl Iterator<Item = f64> + Clone) -> StatsDto {
    let n = values.clone().count();
    if n == 0 {
        return StatsDto { mean: 0.0, min: 0.0, max: 0.0 };
    }
    let sum: f64 = values.clone().sum();
    StatsDto {
        mean: sum / n as f64,
        min: values.clone().fold(f64::INFINITY, f64::min),
        max: values.fold(f64::NEG_INFINITY, f64::max),
    }
}

// --- simulation outputs -------------------------------------------------------------

/// One row per signal: id, cycle count, reachability, first therapy cycle
/// and the raw bit string.
pub fn therapy_csv(rows: &[(String, usize, Option<usize>, String)]) -> String {
    let mut out = String::from("id,cycles,reachable,first_therapy_cycle,bits\n");
    for (id, cycles, first, bits) in rows {
        let _ = writeln!(
            out,
            "{id},{cycles},{},{},{bits}",
            first.is_some(),
            first.map(|k| k.to_string()).unwrap_or_default()
        );
    }
    out
}

/// Parses `NAME=value` parameter overrides in programmed units.
pub fn apply_param_overrides(
    domain: &ParameterDomain,
    base: Params,
    overrides: &[String],
    rounding: RoundingMode,
) -> Result<Params, ToolError> {
    let mut p = base;
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| ToolError::Usage(format!("malformed --set {item:?} (NAME=value)")))?;
        let id = ParamId::from_label(name.trim())
            .ok_or_else(|| ToolError::Data(format!("unknown parameter name {name:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| ToolError::Data(format!("{name}: not a number: {value:?}")))?;
        let unit = domain.spec(id).unit;
        let scaled = programmed_to_scaled(name, unit, v)?;
        let alg = domain.scaled_to_algorithm(id, scaled, rounding);
        match id {
            ParamId::VfTh => p.vf_th_ms = alg,
            ParamId::VtTh => p.vt_th_ms = alg,
            ParamId::AfibTh => p.afib_th_ms = alg,
            ParamId::VfDur => p.vfdur_ms = alg,
            ParamId::VtDur => p.vtdur_ms = alg,
            ParamId::NsrCorTh => p.nsrcor_hundredths = alg,
            ParamId::Stb => p.stb_ms2 = alg,
        }
    }
    Ok(p)
}
