//! Decoding of SMT solver output (check-sat status, objective reports and
//! `get-model` definitions) back into parameter-domain indices.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::params::{ParamId, ParamVector, ParameterDomain, Unit};
use crate::smt::sexp::{parse_all, Sexp};
use crate::smt::SmtMetadata;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Sat,
    Unsat,
    Unknown,
}

/// Decoded solver answer.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedModel {
    pub status: SolverStatus,
    /// Present when the output contained a model with every parameter.
    pub vector: Option<ParamVector>,
    /// Value of the distance variable, when reported.
    pub dist: Option<i64>,
    /// Raw `(get-objectives)` entries.
    pub objectives: Vec<(String, i64)>,
    /// Signals the solver claims the attack flips: soft-constraint count
    /// minus the reported penalty for the effectiveness group.
    pub claimed_effective: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecodeError {
    Parse(String),
    MissingStatus,
    MissingParam {
        param: &'static str,
    },
    /// A parameter value that is not on the programmable grid points to an
    /// emitter or solver fault.
    OffGrid {
        param: &'static str,
        value: String,
    },
    NonConstantValue {
        param: &'static str,
    },
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::Parse(m) => write!(f, "unparsable solver output: {m}"),
            DecodeError::MissingStatus => write!(f, "no sat/unsat/unknown status in output"),
            DecodeError::MissingParam { param } => {
                write!(f, "model does not assign parameter {param}")
            }
            DecodeError::OffGrid { param, value } => {
                write!(
                    f,
                    "model assigns {param} = {value}, not a programmable value"
                )
            }
            DecodeError::NonConstantValue { param } => {
                write!(f, "model value for {param} is not a constant")
            }
        }
    }
}

/// Evaluates a constant model term: numerals, decimals, `(- x)`,
/// `(/ a b)`, `(to_real x)`.
fn const_value(term: &Sexp) -> Option<Ratio<i128>> {
    match term {
        Sexp::Atom(a) => super::eval::parse_numeral(a),
        Sexp::List(items) => {
            let head = items.first()?.atom()?;
            match (head, items.len()) {
                ("-", 2) => Some(-const_value(&items[1])?),
                ("-", 3) => Some(const_value(&items[1])? - const_value(&items[2])?),
                ("/", 3) => {
                    let d = const_value(&items[2])?;
                    if d.is_zero() {
                        None
                    } else {
                        Some(const_value(&items[1])? / d)
                    }
                }
                ("to_real", 2) => const_value(&items[1]),
                _ => None,
            }
        }
    }
}

fn find_define_funs(forms: &[Sexp], out: &mut Vec<(String, Sexp)>) {
    for form in forms {
        if let Some(items) = form.list() {
            if items.first().and_then(Sexp::atom) == Some("define-fun") && items.len() == 5 {
                if let Some(name) = items[1].atom() {
                    out.push((name.to_string(), items[4].clone()));
                }
                continue;
            }
            // recurse into (model ...) wrappers and bare model lists
            find_define_funs(items, out);
        }
    }
}

/// Parses solver stdout into a decoded model, mapping each parameter value
/// back to its 1-based domain index.
pub fn decode_model(
    output: &str,
    domain: &ParameterDomain,
    metadata: &SmtMetadata,
) -> Result<DecodedModel, DecodeError> {
    let forms = parse_all(output).map_err(|e| DecodeError::Parse(e.to_string()))?;

    let mut status = None;
    for form in &forms {
        if let Some(atom) = form.atom() {
            status = match atom {
                "sat" => Some(SolverStatus::Sat),
                "unsat" => Some(SolverStatus::Unsat),
                "unknown" => Some(SolverStatus::Unknown),
                _ => continue,
            };
            break;
        }
    }
    let status = status.ok_or(DecodeError::MissingStatus)?;

    let mut objectives = Vec::new();
    for form in &forms {
        if form.head() == Some("objectives") {
            for entry in &form.list().unwrap()[1..] {
                if let Some(items) = entry.list() {
                    if items.len() == 2 {
                        if let (Some(name), Some(v)) = (items[0].atom(), const_value(&items[1])) {
                            if v.is_integer() {
                                objectives.push((name.to_string(), *v.numer() as i64));
                            }
                        }
                    }
                }
            }
        }
    }

    let mut defs = Vec::new();
    find_define_funs(&forms, &mut defs);

    let vector = if status == SolverStatus::Sat && !defs.is_empty() {
        let mut indices = [0u8; 7];
        for id in ParamId::ALL {
            let param = id.label();
            let (_, term) = defs
                .iter()
                .find(|(name, _)| name == param)
                .ok_or(DecodeError::MissingParam { param })?;
            let value = const_value(term).ok_or(DecodeError::NonConstantValue { param })?;
            let idx =
                lookup_index(domain, id, value, metadata).ok_or_else(|| DecodeError::OffGrid {
                    param,
                    value: format!("{value}"),
                })?;
            indices[id.index()] = idx;
        }
        Some(ParamVector(indices))
    } else {
        None
    };

    let dist = defs
        .iter()
        .find(|(name, _)| *name == metadata.dist_var)
        .and_then(|(_, term)| const_value(term))
        .filter(|v| v.is_integer())
        .map(|v| *v.numer() as i64);

    let claimed_effective = objectives
        .iter()
        .find(|(name, _)| *name == metadata.soft_group)
        .map(|&(_, penalty)| (metadata.signals.len() as i64 - penalty).max(0) as u64);

    Ok(DecodedModel {
        status,
        vector,
        dist,
        objectives,
        claimed_effective,
    })
}

fn lookup_index(
    domain: &ParameterDomain,
    id: ParamId,
    value: Ratio<i128>,
    metadata: &SmtMetadata,
) -> Option<u8> {
    match domain.spec(id).unit {
        Unit::Bpm | Unit::Seconds | Unit::MsSq => {
            if !value.is_integer() {
                return None;
            }
            let ms = i64::try_from(*value.numer()).ok()?;
            domain.index_of_algorithm_value(id, ms, metadata.rounding)
        }
        Unit::Score => {
            let scaled = value * Ratio::from_integer(100);
            if !scaled.is_integer() {
                return None;
            }
            let hundredths = i64::try_from(*scaled.numer()).ok()?;
            domain.index_of_scaled(id, hundredths)
        }
    }
}
