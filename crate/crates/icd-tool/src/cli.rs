//! Subcommand definitions and implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use icd_core::discrim;
use icd_core::generator::{self, GeneratorError};
use icd_core::objectives::{self, EvalSet};
use icd_core::params::{ParamId, ParamVector, ParameterDomain, RoundingMode};
use icd_core::smt::{self, decode::SolverStatus, SmtDocument, SmtMode};
use icd_core::synth::{self, Backend, SynthesisConfig, SynthesisResult};
use icd_core::Rat;

use crate::formats::{self, GenMeta, Manifest};
use crate::solver::{self, SolverError};
use crate::ToolError;

#[derive(Parser)]
#[command(
    name = "icd-tool",
    version,
    about = "Simulate a two-zone ICD discrimination algorithm and synthesize \
             Pareto-optimal stealthy reprogramming attacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Generate a synthetic condition-specific signal set
    Gen(GenArgs),
    /// Simulate a signal set and dump therapy decisions and traces
    Simulate(SimArgs),
    /// Synthesize the Pareto front of reprogramming attacks
    Synth(SynthArgs),
    /// Emit the SMT-LIB2/MaxSMT encoding for an external optimizing solver
    EmitSmt(EmitArgs),
    /// Emit the encoding, run an external solver on it and decode the model
    Solve(SolveArgs),
    /// Evaluate a synthesized front against a (disjoint) test set
    Validate(ValidateArgs),
}

pub fn dispatch(cli: Cli) -> Result<(), ToolError> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Synth(a) => cmd_synth(a),
        Cmd::EmitSmt(a) => cmd_emit_smt(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Validate(a) => cmd_validate(a),
    }
}

// --- gen ---------------------------------------------------------------------

#[derive(Args)]
pub struct GenArgs {
    /// Built-in condition archetype name, or a comma-separated same-class
    /// list for a condition-agnostic set (see `--builtin list`)
    #[arg(long, conflicts_with = "spec")]
    builtin: Option<String>,
    /// Condition spec JSON file
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Number of signals to generate
    #[arg(short = 'n', long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Master seed; per-signal streams are derived from it
    #[arg(long)]
    seed: u64,
    /// Output signal-set JSON path
    #[arg(long)]
    out: PathBuf,
}

fn cmd_gen(args: GenArgs) -> Result<(), ToolError> {
    let lookup_builtin = |name: &str| {
        generator::builtin_conditions()
            .into_iter()
            .find(|c| c.name == name)
            .ok_or_else(|| {
                ToolError::Usage(format!(
                    "unknown built-in condition {name:?} (try --builtin list)"
                ))
            })
    };
    let specs: Vec<_> = match (&args.builtin, &args.spec) {
        (Some(name), None) => {
            if name == "list" {
                for c in generator::builtin_conditions() {
                    println!("{}", c.name);
                }
                return Ok(());
            }
            name.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(lookup_builtin)
                .collect::<Result<_, _>>()?
        }
        (None, Some(path)) => vec![formats::load_condition_spec(path)?],
        _ => {
            return Err(ToolError::Usage(
                "exactly one of --builtin or --spec is required".into(),
            ))
        }
    };
    let condition_name = specs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(",");

    let signals = match specs.as_slice() {
        [single] => generator::generate(single, args.count as usize, args.seed),
        many => generator::generate_mixed(many, args.count as usize, args.seed),
    }
    .map_err(|e: GeneratorError| ToolError::Data(e.to_string()))?;

    let domain = formats::load_domain(None)?;
    let rate = generator::misclassification_rate(&signals, &domain, RoundingMode::HalfUp);
    if rate > Rat::new(1, 20) {
        eprintln!(
            "warning: {} of {} signals are misclassified under nominal parameters; \
             regenerate with a different --seed",
            rate * Rat::from_integer(signals.len() as i64),
            signals.len()
        );
    }

    formats::save_signals(
        &signals,
        Some(GenMeta {
            prng: generator::PRNG_NAME.into(),
            seed: args.seed,
            condition: condition_name,
            count: signals.len(),
        }),
        &args.out,
    )?;
    eprintln!("wrote {} signals to {}", signals.len(), args.out.display());
    Ok(())
}

// --- simulate -------------------------------------------------------------------

#[derive(Args)]
pub struct SimArgs {
    /// Signal-set JSON to simulate
    #[arg(long)]
    signals: PathBuf,
    /// Parameter override in programmed units, e.g. --set VF_th=220 (repeatable)
    #[arg(long = "set")]
    set: Vec<String>,
    /// Domain override JSON
    #[arg(long)]
    domains: Option<PathBuf>,
    /// BPM-to-ms rounding: half-up or ceil
    #[arg(long, default_value = "half-up")]
    rounding: String,
    /// Output directory (therapy.csv and per-signal traces)
    #[arg(long)]
    out: PathBuf,
}

fn cmd_simulate(args: SimArgs) -> Result<(), ToolError> {
    let rounding = formats::parse_rounding(&args.rounding)?;
    let domain = formats::load_domain(args.domains.as_deref())?;
    let signals = formats::load_signals(&args.signals)?;
    let nominal = domain.to_params(&domain.nominal(), rounding);
    let params = formats::apply_param_overrides(&domain, nominal, &args.set, rounding)?;

    let mut rows = Vec::with_capacity(signals.len());
    for sig in &signals {
        let therapy = discrim::run(sig, &params);
        let first = therapy.bits.iter().position(|&b| b);
        let bits: String = therapy
            .bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        rows.push((sig.id.clone(), sig.n(), first, bits));
        formats::write_atomic(
            &args.out.join("traces").join(format!("{}.trace", sig.id)),
            &discrim::render_trace(sig, &params),
        )?;
    }
    formats::write_atomic(&args.out.join("therapy.csv"), &formats::therapy_csv(&rows))?;
    let reached = rows.iter().filter(|r| r.2.is_some()).count();
    eprintln!("{reached}/{} signals reach therapy", rows.len());
    Ok(())
}

// --- synth ----------------------------------------------------------------------

#[derive(Args)]
pub struct SynthArgs {
    /// Experiment manifest JSON; direct flags override its fields
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    domains: Option<PathBuf>,
    /// exact | random
    #[arg(long)]
    backend: Option<String>,
    /// Comma-separated parameter names free to move (default: all)
    #[arg(long)]
    free_params: Option<String>,
    #[arg(long)]
    max_distance: Option<u32>,
    /// Sample budget for the random backend
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounding: Option<String>,
    /// Refusal threshold for exact enumeration
    #[arg(long)]
    enumeration_cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct SynthSetup {
    domain: ParameterDomain,
    train: EvalSet,
    test: Option<EvalSet>,
    config: SynthesisConfig,
    backend_name: String,
    free_param_names: Vec<String>,
    out: PathBuf,
}

fn merge_manifest(args: &SynthArgs) -> Result<Manifest, ToolError> {
    let mut m = match &args.manifest {
        Some(path) => formats::load_manifest(path)?,
        None => Manifest::default(),
    };
    if args.train.is_some() {
        m.train = args.train.clone();
    }
    if args.test.is_some() {
        m.test = args.test.clone();
    }
    if args.domains.is_some() {
        m.domains = args.domains.clone();
    }
    if args.backend.is_some() {
        m.backend = args.backend.clone();
    }
    if let Some(fp) = &args.free_params {
        m.free_params = Some(
            fp.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        );
    }
    if args.max_distance.is_some() {
        m.max_distance = args.max_distance;
    }
    if args.budget.is_some() {
        m.budget = args.budget;
    }
    if args.seed.is_some() {
        m.seed = args.seed;
    }
    if args.rounding.is_some() {
        m.rounding = args.rounding.clone();
    }
    if args.out.is_some() {
        m.out = args.out.clone();
    }
    Ok(m)
}

fn setup_synth(args: &SynthArgs) -> Result<SynthSetup, ToolError> {
    let m = merge_manifest(args)?;
    let train_path = m
        .train
        .as_ref()
        .ok_or_else(|| ToolError::Usage("missing --train (or manifest train)".into()))?;
    let out = m
        .out
        .clone()
        .ok_or_else(|| ToolError::Usage("missing --out (or manifest out)".into()))?;
    let rounding = formats::parse_rounding(m.rounding.as_deref().unwrap_or("half-up"))?;
    let domain = formats::load_domain(m.domains.as_deref())?;

    let backend_name = m.backend.clone().unwrap_or_else(|| "exact".into());
    let backend = match backend_name.as_str() {
        "exact" => Backend::Exact,
        "random" => Backend::Random,
        "smt-emit" => {
            return Err(ToolError::Usage(
                "backend smt-emit is served by the emit-smt and solve subcommands".into(),
            ))
        }
        other => return Err(ToolError::Usage(format!("unknown backend {other:?}"))),
    };
    if backend == Backend::Random && m.seed.is_none() {
        return Err(ToolError::Usage(
            "the random backend requires an explicit seed".into(),
        ));
    }

    let free_params = match &m.free_params {
        None => None,
        Some(names) => Some(
            names
                .iter()
                .map(|n| {
                    ParamId::from_label(n)
                        .ok_or_else(|| ToolError::Usage(format!("unknown parameter name {n:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let free_param_names = match &free_params {
        None => ParamId::ALL.iter().map(|p| p.label().to_string()).collect(),
        Some(ids) => ids.iter().map(|p| p.label().to_string()).collect(),
    };

    let train = EvalSet::new(formats::load_signals(train_path)?, &domain, rounding);
    let test = match &m.test {
        Some(path) => Some(EvalSet::new(
            formats::load_signals(path)?,
            &domain,
            rounding,
        )),
        None => None,
    };

    let config = SynthesisConfig {
        backend,
        free_params,
        max_distance: m.max_distance,
        budget: m.budget.unwrap_or(0),
        seed: m.seed.unwrap_or(0),
        enumeration_cap: args
            .enumeration_cap
            .unwrap_or(synth::DEFAULT_ENUMERATION_CAP),
        rounding,
    };
    Ok(SynthSetup {
        domain,
        train,
        test,
        config,
        backend_name,
        free_param_names,
        out,
    })
}

fn cmd_synth(args: SynthArgs) -> Result<(), ToolError> {
    let setup = setup_synth(&args)?;
    let started = Instant::now();
    let result: SynthesisResult = match setup.config.backend {
        Backend::Exact => synth::synthesize_exact(&setup.train, &setup.domain, &setup.config),
        Backend::Random => synth::synthesize_random(&setup.train, &setup.domain, &setup.config),
        Backend::SmtEmit => unreachable!("rejected in setup"),
    }
    .map_err(ToolError::data)?;
    let elapsed = started.elapsed();

    let front = &result.front;
    let validation = setup.test.as_ref().map(|test| {
        objectives::validation_score(
            front,
            &setup.domain,
            setup.config.rounding,
            &setup.train,
            test,
        )
    });

    let report = build_report(&setup, &result, validation);
    let report_json = serde_json::to_string_pretty(&report).map_err(ToolError::data)? + "\n";
    formats::write_atomic(&setup.out.join("report.json"), &report_json)?;
    formats::write_atomic(
        &setup.out.join("front.csv"),
        &formats::front_csv(&setup.domain, front),
    )?;

    // timing stays out of the report files so they are byte-reproducible
    eprintln!(
        "synthesized front of {} point(s) in {:.2}s ({} evaluations over a grid of {})",
        front.len(),
        elapsed.as_secs_f64(),
        result.evaluations,
        result.grid_size
    );
    println!(
        "front: {} point(s); best effectiveness {}",
        front.len(),
        report.effectiveness_stats.max
    );
    Ok(())
}

fn build_report(
    setup: &SynthSetup,
    result: &SynthesisResult,
    validation: Option<Rat>,
) -> formats::Report {
    let front = &result.front;
    let eff: Vec<f64> = front
        .points()
        .iter()
        .map(|p| *p.effectiveness.numer() as f64 / *p.effectiveness.denom() as f64)
        .collect();
    let dist: Vec<f64> = front.points().iter().map(|p| p.distance as f64).collect();
    formats::Report {
        backend: setup.backend_name.clone(),
        seed: setup.config.seed,
        rounding: formats::rounding_str(setup.config.rounding).to_string(),
        domain_fingerprint: formats::domain_fingerprint(&setup.domain),
        free_params: setup.free_param_names.clone(),
        grid_size: result.grid_size,
        evaluations: result.evaluations,
        front_size: front.len(),
        front: front
            .points()
            .iter()
            .map(|p| {
                formats::front_point_dto(&setup.domain, p.distance, p.effectiveness, &p.witness)
            })
            .collect(),
        effectiveness_stats: formats::stats_of(eff.iter().copied()),
        distance_stats: formats::stats_of(dist.iter().copied()),
        layers: result
            .layers
            .iter()
            .map(|l| formats::LayerDto {
                distance: l.distance,
                box_size: l.box_size,
                best_effectiveness: *l.best_effectiveness.numer() as f64
                    / *l.best_effectiveness.denom() as f64,
            })
            .collect(),
        validation_score: validation.map(|v| *v.numer() as f64 / *v.denom() as f64),
        validation_score_ratio: validation.map(|v| format!("{}/{}", v.numer(), v.denom())),
    }
}

// --- emit-smt --------------------------------------------------------------------

#[derive(Args)]
pub struct EmitArgs {
    /// Experiment manifest JSON; direct flags override its fields
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Training signal-set JSON
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    domains: Option<PathBuf>,
    /// pareto | max-eff (max-eff requires --dist)
    #[arg(long)]
    mode: Option<String>,
    /// Distance bound for max-eff mode
    #[arg(long)]
    dist: Option<u32>,
    #[arg(long)]
    rounding: Option<String>,
    /// Output .smt2 path (metadata sidecar written next to it)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Emit/solve settings after merging the manifest with flag overrides.
struct EmitSetup {
    train: PathBuf,
    domains: Option<PathBuf>,
    mode: SmtMode,
    rounding: RoundingMode,
    out: PathBuf,
    solver_cmd: Option<String>,
    timeout_s: Option<u64>,
}

fn setup_emit(args: &EmitArgs) -> Result<EmitSetup, ToolError> {
    let m = match &args.manifest {
        Some(path) => formats::load_manifest(path)?,
        None => Manifest::default(),
    };
    let train = args
        .train
        .clone()
        .or(m.train)
        .ok_or_else(|| ToolError::Usage("missing --train (or manifest train)".into()))?;
    let out = args
        .out
        .clone()
        .or(m.out)
        .ok_or_else(|| ToolError::Usage("missing --out (or manifest out)".into()))?;
    let rounding = formats::parse_rounding(
        args.rounding
            .as_deref()
            .or(m.rounding.as_deref())
            .unwrap_or("half-up"),
    )?;
    let mode_name = args
        .mode
        .clone()
        .or(m.smt_mode)
        .unwrap_or_else(|| "pareto".into());
    let dist = args.dist.or(m.smt_dist);
    let mode = parse_mode(&mode_name, dist)?;
    Ok(EmitSetup {
        train,
        domains: args.domains.clone().or(m.domains),
        mode,
        rounding,
        out,
        solver_cmd: m.solver_cmd,
        timeout_s: m.timeout_s,
    })
}

fn parse_mode(mode: &str, dist: Option<u32>) -> Result<SmtMode, ToolError> {
    match mode {
        "pareto" => Ok(SmtMode::Pareto),
        "max-eff" => dist
            .map(SmtMode::MaxEffAtDist)
            .ok_or_else(|| ToolError::Usage("--mode max-eff requires --dist".into())),
        other => Err(ToolError::Usage(format!("unknown mode {other:?}"))),
    }
}

#[derive(Serialize, Deserialize)]
pub struct SmtSignalDto {
    pub id: String,
    pub n_cycles: usize,
    pub baseline_reach: bool,
}

#[derive(Serialize, Deserialize)]
pub struct SmtMetaDto {
    pub signals: Vec<SmtSignalDto>,
    pub dist_var: String,
    pub soft_group: String,
    pub dist_max: u32,
    pub mode: String,
    pub rounding: String,
    pub check_sat_offset: usize,
}

fn meta_dto(doc: &SmtDocument) -> SmtMetaDto {
    let m = &doc.metadata;
    SmtMetaDto {
        signals: m
            .signals
            .iter()
            .map(|s| SmtSignalDto {
                id: s.id.clone(),
                n_cycles: s.n_cycles,
                baseline_reach: s.baseline_reach,
            })
            .collect(),
        dist_var: m.dist_var.clone(),
        soft_group: m.soft_group.clone(),
        dist_max: m.dist_max,
        mode: match m.mode {
            SmtMode::Pareto => "pareto".into(),
            SmtMode::MaxEffAtDist(s) => format!("max-eff:{s}"),
        },
        rounding: formats::rounding_str(m.rounding).to_string(),
        check_sat_offset: m.check_sat_offset,
    }
}

fn emit_document(
    train_path: &Path,
    domains: Option<&Path>,
    mode: SmtMode,
    rounding: RoundingMode,
) -> Result<(SmtDocument, ParameterDomain, EvalSet), ToolError> {
    let domain = formats::load_domain(domains)?;
    let train = EvalSet::new(formats::load_signals(train_path)?, &domain, rounding);
    let doc = smt::emit_smt(&train, &domain, mode, rounding);
    Ok((doc, domain, train))
}

fn cmd_emit_smt(args: EmitArgs) -> Result<(), ToolError> {
    let setup = setup_emit(&args)?;
    let (doc, _, _) = emit_document(
        &setup.train,
        setup.domains.as_deref(),
        setup.mode,
        setup.rounding,
    )?;
    formats::write_atomic(&setup.out, &doc.text)?;
    let meta_path = setup.out.with_extension("meta.json");
    let meta_json = serde_json::to_string_pretty(&meta_dto(&doc)).map_err(ToolError::data)? + "\n";
    formats::write_atomic(&meta_path, &meta_json)?;
    eprintln!("wrote {} and {}", setup.out.display(), meta_path.display());
    Ok(())
}

// --- solve ------------------------------------------------------------------------

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    emit: EmitArgs,
    /// Solver command template with a {file} placeholder
    /// (default: manifest solver_cmd, then the ICD_SMT_SOLVER variable)
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Seconds before the solver process is killed
    #[arg(long)]
    timeout_s: Option<u64>,
}

#[derive(Serialize)]
struct SolveOutcome {
    status: String,
    distance: Option<i64>,
    claimed_effective: Option<u64>,
    params: Option<BTreeMap<String, String>>,
    resimulated_effectiveness: Option<f64>,
    objectives: Vec<(String, i64)>,
}

fn cmd_solve(args: SolveArgs) -> Result<(), ToolError> {
    let setup = setup_emit(&args.emit)?;
    let rounding = setup.rounding;
    let template = args
        .solver_cmd
        .clone()
        .or(setup.solver_cmd.clone())
        .or_else(|| std::env::var(solver::SOLVER_ENV).ok())
        .ok_or_else(|| {
            ToolError::Usage(format!(
                "no solver command: pass --solver-cmd or set {}",
                solver::SOLVER_ENV
            ))
        })?;
    let timeout_s = args.timeout_s.or(setup.timeout_s).unwrap_or(300);

    let (doc, domain, train) =
        emit_document(&setup.train, setup.domains.as_deref(), setup.mode, rounding)?;

    let started = Instant::now();
    let output = solver::run_external_solver(&template, &doc.text, Duration::from_secs(timeout_s))
        .map_err(|e: SolverError| ToolError::Solver(e.to_string()))?;
    eprintln!("solver finished in {:.2}s", started.elapsed().as_secs_f64());

    let decoded = smt::decode::decode_model(&output, &domain, &doc.metadata)
        .map_err(|e| ToolError::Solver(format!("cannot decode solver output: {e}")))?;

    let (params, resim) = match &decoded.vector {
        Some(v) => {
            let p = domain.to_params(v, rounding);
            let eff = train.effectiveness(&p);
            let dto: BTreeMap<String, String> = ParamId::ALL
                .iter()
                .map(|&id| (id.label().to_string(), domain.render_value(id, v.get(id))))
                .collect();
            (Some(dto), Some(*eff.numer() as f64 / *eff.denom() as f64))
        }
        None => (None, None),
    };
    let outcome = SolveOutcome {
        status: match decoded.status {
            SolverStatus::Sat => "sat".into(),
            SolverStatus::Unsat => "unsat".into(),
            SolverStatus::Unknown => "unknown".into(),
        },
        distance: decoded.dist,
        claimed_effective: decoded.claimed_effective,
        params,
        resimulated_effectiveness: resim,
        objectives: decoded.objectives.clone(),
    };
    let json = serde_json::to_string_pretty(&outcome).map_err(ToolError::data)? + "\n";
    formats::write_atomic(&setup.out, &json)?;
    println!(
        "{} distance={} claimed_effective={} resimulated_effectiveness={}",
        outcome.status,
        outcome.distance.map_or("-".into(), |d| d.to_string()),
        outcome
            .claimed_effective
            .map_or("-".into(), |c| c.to_string()),
        outcome
            .resimulated_effectiveness
            .map_or("-".into(), |e| e.to_string()),
    );
    Ok(())
}

// --- validate ----------------------------------------------------------------------

#[derive(Args)]
pub struct ValidateArgs {
    /// report.json produced by synth
    #[arg(long)]
    front: PathBuf,
    /// Test signal-set JSON (disjoint from training)
    #[arg(long)]
    test: PathBuf,
    /// Domain override JSON (must match the synthesis run)
    #[arg(long)]
    domains: Option<PathBuf>,
    /// Output directory (validation.csv, validation.json)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ValidationOutcome {
    validation_score: f64,
    validation_score_ratio: String,
    points: usize,
}

fn cmd_validate(args: ValidateArgs) -> Result<(), ToolError> {
    let text = formats::read_to_string(&args.front)?;
    let report: formats::Report = serde_json::from_str(&text)
        .map_err(|e| ToolError::Data(format!("{}: {e}", args.front.display())))?;
    let rounding = formats::parse_rounding(&report.rounding)?;
    let domain = formats::load_domain(args.domains.as_deref())?;
    if report.domain_fingerprint != formats::domain_fingerprint(&domain) {
        return Err(ToolError::Data(
            "the front was synthesized over a different parameter domain;              pass the same --domains file as the synth run"
                .into(),
        ));
    }
    let test = EvalSet::new(formats::load_signals(&args.test)?, &domain, rounding);

    let mut csv = String::from("distance,effectiveness_train,effectiveness_test\n");
    let mut sum = Rat::new(0, 1);
    for pt in &report.front {
        if pt.indices.len() != 7 {
            return Err(ToolError::Data(format!(
                "front point at distance {} has malformed indices",
                pt.distance
            )));
        }
        let mut idx = [0u8; 7];
        idx.copy_from_slice(&pt.indices);
        let v = ParamVector(idx);
        for id in ParamId::ALL {
            if v.get(id) == 0 || v.get(id) > domain.len(id) {
                return Err(ToolError::Data(
                    "front indices do not fit the domain".into(),
                ));
            }
        }
        let train_eff = formats::parse_rat(&pt.effectiveness_ratio)?;
        let test_eff = test.effectiveness(&domain.to_params(&v, rounding));
        sum += test_eff - train_eff;
        csv.push_str(&format!(
            "{},{},{}\n",
            pt.distance,
            pt.effectiveness,
            *test_eff.numer() as f64 / *test_eff.denom() as f64
        ));
    }
    let score = if report.front.is_empty() {
        Rat::new(0, 1)
    } else {
        sum / Rat::from_integer(report.front.len() as i64)
    };

    formats::write_atomic(&args.out.join("validation.csv"), &csv)?;
    let outcome = ValidationOutcome {
        validation_score: *score.numer() as f64 / *score.denom() as f64,
        validation_score_ratio: format!("{}/{}", score.numer(), score.denom()),
        points: report.front.len(),
    };
    let json = serde_json::to_string_pretty(&outcome).map_err(ToolError::data)? + "\n";
    formats::write_atomic(&args.out.join("validation.json"), &json)?;
    println!("validation score: {}", outcome.validation_score);
    Ok(())
}
