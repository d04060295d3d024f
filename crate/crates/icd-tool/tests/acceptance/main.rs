//! Acceptance suite: one pass/fail line per criterion, each with a wall
//! budget. Exits nonzero when any criterion fails.
//!
//! Run with `cargo test --test acceptance` (or `-p icd-tool`).

mod naive;

use std::time::Instant;

use icd_core::discrim::{self, TherapySignal};
use icd_core::generator::{builtin_conditions, generate_eval_set, ConditionSpec};
use icd_core::objectives::{
    auc, effectiveness_of_reach, reachability, validation_score, EvalSet, FrontPoint,
};
use icd_core::params::{
    expand_domains, ParamId, ParamSpec, ParamVector, ParameterDomain, RoundingMode,
};
use icd_core::signal::{precompute, FeatureSignal, Label};
use icd_core::smt::eval::GroundChecker;
use icd_core::smt::{emit_smt, pin_assertions, th_name, SmtMode};
use icd_core::synth::{synthesize_exact, synthesize_random, SynthesisConfig};
use icd_core::Rat;
use num_traits::{One, Signed, Zero};

const ROUNDING: RoundingMode = RoundingMode::HalfUp;

fn main() {
    type Criterion = (u32, &'static str, f64, fn() -> Result<String, String>);
    let criteria: [Criterion; 10] = [
        (1, "fig-4 effectiveness is exactly 2/4", 1.0, c01_fig4),
        (
            2,
            "distance of a lone VTdur=4.5s change is 4",
            1.0,
            c02_distance,
        ),
        (
            3,
            "duration-clock trace + oracle equivalence (1000 x 50)",
            30.0,
            c03_oracle,
        ),
        (
            4,
            "exact synthesis equals whole-grid brute force",
            60.0,
            c04_brute_force,
        ),
        (
            5,
            "staircase and dominance invariants on 50 instances",
            60.0,
            c05_invariants,
        ),
        (
            6,
            "fast-VT front reaches effectiveness 1.0",
            120.0,
            c06_effectiveness_one,
        ),
        (
            7,
            "nominal parameters have zero effectiveness",
            5.0,
            c07_nominal_zero,
        ),
        (
            8,
            "random search never beats exact AUC (10 seeds)",
            120.0,
            c08_random_vs_exact,
        ),
        (
            9,
            "emitted encoding forces the simulator's therapy bits",
            120.0,
            c09_roundtrip,
        ),
        (
            10,
            "train/test generalization within |0.15|",
            180.0,
            c10_validation,
        ),
    ];

    let mut failed = 0;
    for (num, name, budget, run) in criteria {
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) if secs <= budget => {
                println!(
                    "PASS  criterion {num:2} [{secs:7.2}s <= {budget:5.0}s]  {name}  ({detail})"
                );
            }
            Ok(detail) => {
                failed += 1;
                println!(
                    "FAIL  criterion {num:2} [{secs:7.2}s >  {budget:5.0}s]  {name}  (over budget; {detail})"
                );
            }
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {num:2} [{secs:7.2}s]  {name}  ({msg})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}

// --- shared helpers ---------------------------------------------------------

fn builtin(name: &str) -> ConditionSpec {
    builtin_conditions()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap()
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next() % (hi - lo + 1)
    }
}

/// Restricts the standard table: listed parameters keep a +-width window
/// around nominal, all others collapse to their nominal value.
fn truncated_domain(keep: &[(ParamId, usize)]) -> ParameterDomain {
    let full = expand_domains();
    let mut specs: Vec<ParamSpec> = Vec::new();
    for id in ParamId::ALL {
        let spec = full.spec(id);
        let nom0 = spec.nominal_idx as usize - 1;
        let width = keep
            .iter()
            .find(|(k, _)| *k == id)
            .map(|&(_, w)| w)
            .unwrap_or(0);
        let lo = nom0.saturating_sub(width);
        let hi = (nom0 + width).min(spec.values.len() - 1);
        specs.push(ParamSpec {
            unit: spec.unit,
            values: spec.values[lo..=hi].to_vec(),
            nominal_idx: (nom0 - lo + 1) as u8,
        });
    }
    ParameterDomain::new(specs.try_into().unwrap()).unwrap()
}

/// VT-class intervals straddling the nominal VT detection threshold:
/// small threshold moves flip classification in both directions.
fn boundary_vt_spec() -> ConditionSpec {
    ConditionSpec {
        name: "boundary-vt".into(),
        class: icd_core::generator::SignalClass::Vt,
        vint_range: (350, 400),
        vint_jitter: 8,
        a_to_v: icd_core::generator::AtrialMode::Tracking,
        aint_range: (600, 800),
        fcc_high_prob: 0.05,
        duration_s: 30,
    }
}

/// SVT-class intervals just above the nominal VF threshold: lowering it by
/// a step or two introduces inappropriate VF-branch therapy.
fn boundary_svt_spec() -> ConditionSpec {
    ConditionSpec {
        name: "boundary-svt".into(),
        class: icd_core::generator::SignalClass::Svt,
        vint_range: (310, 360),
        vint_jitter: 8,
        a_to_v: icd_core::generator::AtrialMode::Tracking,
        aint_range: (100, 100),
        fcc_high_prob: 0.95,
        duration_s: 30,
    }
}

fn random_vector(domain: &ParameterDomain, rng: &mut XorShift) -> ParamVector {
    let mut v = [0u8; 7];
    for (i, id) in ParamId::ALL.iter().enumerate() {
        v[i] = rng.range(1, domain.len(*id) as u64) as u8;
    }
    ParamVector(v)
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// --- criterion 1: fig-4 effectiveness ----------------------------------------

fn c01_fig4() -> Result<String, String> {
    let bits = |idx: &[usize]| {
        let mut b = vec![false; 8];
        for &i in idx {
            b[i] = true;
        }
        TherapySignal { bits: b }
    };
    // (baseline, attacked): one therapy partially prevented, one fully
    // prevented, one introduced, one merely delayed
    let pairs = [
        (bits(&[2, 5]), bits(&[5])),
        (bits(&[3]), bits(&[])),
        (bits(&[]), bits(&[6])),
        (bits(&[2]), bits(&[6])),
    ];
    let base: Vec<bool> = pairs.iter().map(|(b, _)| reachability(b)).collect();
    let attacked: Vec<bool> = pairs.iter().map(|(_, a)| reachability(a)).collect();
    let eff = effectiveness_of_reach(&base, &attacked);
    check(eff == Rat::new(1, 2), format!("expected 1/2, got {eff}"))?;
    Ok("effectiveness 2/4".into())
}

// --- criterion 2: distance worked example -------------------------------------

fn c02_distance() -> Result<String, String> {
    let domain = expand_domains();
    check(
        domain.index_of_scaled(ParamId::VtDur, 4500) == Some(8),
        "4.5 s is not the 8th programmable VT duration",
    )?;
    let mut v = domain.nominal();
    v.set(ParamId::VtDur, 8);
    let d = domain.distance(&v);
    check(d == 4, format!("expected distance 4, got {d}"))?;
    check(
        domain.distance(&domain.nominal()) == 0,
        "nominal distance must be 0",
    )?;
    Ok("|8 - 4| = 4".into())
}

// --- criterion 3: duration clocks + oracle equivalence ------------------------

fn c03_oracle() -> Result<String, String> {
    let domain = expand_domains();
    let nominal = domain.to_params(&domain.nominal(), ROUNDING);

    // hand-derived trace: constant 240 ms intervals under nominal parameters
    let n = 30;
    let sig = FeatureSignal::new(
        "trace".into(),
        vec![240; n],
        vec![700; n],
        (1..=n).collect(),
        vec![0.3; n],
        Label::RequiresTherapy,
    )
    .unwrap();
    let derived = precompute(&sig);
    let mut state = icd_core::discrim::AlgState::INIT;
    let mut clocks = Vec::new();
    let mut first_therapy = None;
    for k in 0..n {
        if (10..=14).contains(&k) {
            clocks.push(state.t_vf);
        }
        let (next, th) = discrim::step(&state, &sig, &derived, k, &nominal);
        if th && first_therapy.is_none() {
            first_therapy = Some(k);
        }
        state = next;
    }
    check(
        clocks == vec![0, 240, 480, 720, 960],
        format!("clock sequence {clocks:?}"),
    )?;
    check(
        first_therapy == Some(14),
        format!("first therapy at {first_therapy:?}"),
    )?;
    check(
        discrim::run(&sig, &nominal).bits == naive::reference_run(&sig, &nominal),
        "trace disagrees with the reference simulator",
    )?;

    // 1000 random small signals x 50 random parameter vectors
    let mut rng = XorShift(0x9e37_79b9_7f4a_7c15);
    let vectors: Vec<_> = (0..50)
        .map(|_| domain.to_params(&random_vector(&domain, &mut rng), ROUNDING))
        .collect();
    let mut sims = 0u64;
    for case in 0..1000 {
        let n = rng.range(12, 30) as usize;
        let vints: Vec<i64> = (0..n).map(|_| rng.range(150, 999) as i64).collect();
        let aints: Vec<i64> = if case % 3 == 0 {
            vints.clone()
        } else {
            (0..n).map(|_| rng.range(150, 899) as i64).collect()
        };
        let fcc: Vec<f64> = (0..n)
            .map(|_| match rng.next() % 5 {
                0 => 0.94,
                1 => 0.70,
                _ => (rng.next() % 2000) as f64 / 1000.0 - 1.0,
            })
            .collect();
        let sig = FeatureSignal::new(
            format!("r{case}"),
            vints,
            aints,
            (1..=n).collect(),
            fcc,
            Label::NoTherapy,
        )
        .map_err(|e| e.to_string())?;
        let derived = precompute(&sig);
        for p in &vectors {
            let ours = discrim::run_with(&sig, &derived, p);
            let reference = naive::reference_run(&sig, p);
            if ours.bits != reference {
                return Err(format!("mismatch on signal {case} under {p:?}"));
            }
            if ours.len() != n {
                return Err("therapy signal length drifted".into());
            }
            sims += 1;
        }
    }
    Ok(format!("{sims} simulations, zero mismatches"))
}

// --- criterion 4: exact synthesis vs brute force --------------------------------

fn for_every_vector(domain: &ParameterDomain, mut f: impl FnMut(&ParamVector)) {
    let lens: Vec<u8> = ParamId::ALL.iter().map(|&id| domain.len(id)).collect();
    let mut v = ParamVector([1; 7]);
    loop {
        f(&v);
        let mut pos = 7usize;
        while pos > 0 {
            let i = pos - 1;
            if v.0[i] < lens[i] {
                v.0[i] += 1;
                v.0[i + 1..].iter_mut().for_each(|x| *x = 1);
                break;
            }
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
}

fn brute_force_front(domain: &ParameterDomain, train: &EvalSet) -> Vec<FrontPoint> {
    let mut all = Vec::new();
    for_every_vector(domain, |v| {
        all.push(FrontPoint {
            distance: domain.distance(v),
            effectiveness: train.effectiveness(&domain.to_params(v, ROUNDING)),
            witness: *v,
        });
    });
    let mut kept: Vec<FrontPoint> = all
        .iter()
        .filter(|c| {
            !all.iter().any(|o| {
                (o.effectiveness > c.effectiveness && o.distance <= c.distance)
                    || (o.effectiveness >= c.effectiveness && o.distance < c.distance)
            })
        })
        .cloned()
        .collect();
    kept.sort_by(|a, b| a.distance.cmp(&b.distance).then(a.witness.cmp(&b.witness)));
    kept.dedup_by(|b, a| a.distance == b.distance && a.effectiveness == b.effectiveness);
    kept
}

fn c04_brute_force() -> Result<String, String> {
    let boundary_vt = boundary_vt_spec();
    let domain = truncated_domain(&[(ParamId::VfTh, 3), (ParamId::VtTh, 2), (ParamId::VtDur, 3)]);
    let train =
        generate_eval_set(&boundary_vt, 20, 77, &domain, ROUNDING).map_err(|e| e.to_string())?;
    let config = SynthesisConfig::exact(Some(vec![ParamId::VfTh, ParamId::VtTh, ParamId::VtDur]));
    let result = synthesize_exact(&train, &domain, &config).map_err(|e| e.to_string())?;
    let expected = brute_force_front(&domain, &train);
    check(
        result.front.points() == expected.as_slice(),
        format!(
            "fronts differ: exact {:?} vs brute {:?}",
            result.front.points(),
            expected
        ),
    )?;
    check(
        expected.len() >= 3,
        format!(
            "instance too weak: front has only {} point(s)",
            expected.len()
        ),
    )?;
    Ok(format!(
        "grid {} -> identical fronts of {} point(s), witnesses included",
        result.grid_size,
        expected.len()
    ))
}

// --- criterion 5: staircase + dominance invariants -------------------------------

fn c05_invariants() -> Result<String, String> {
    let archetypes = [
        "fast-vf",
        "monomorphic-vt",
        "svt-tracking",
        "afib-conducted",
        "svt-flutter",
    ];
    let pool = [
        ParamId::VfTh,
        ParamId::VtTh,
        ParamId::AfibTh,
        ParamId::VfDur,
        ParamId::VtDur,
        ParamId::NsrCorTh,
        ParamId::Stb,
    ];
    let mut rng = XorShift(0xdead_beef_cafe_f00d);
    let mut checked = 0;
    for instance in 0..50u64 {
        let spec = builtin(archetypes[(instance % 5) as usize]);
        let a = pool[(rng.next() % 7) as usize];
        let b = pool[(rng.next() % 7) as usize];
        let keep: Vec<(ParamId, usize)> = if a == b {
            vec![(a, 1 + (rng.next() % 3) as usize)]
        } else {
            vec![
                (a, 1 + (rng.next() % 3) as usize),
                (b, 1 + (rng.next() % 3) as usize),
            ]
        };
        let domain = truncated_domain(&keep);
        let train = generate_eval_set(
            &spec,
            rng.range(5, 8) as usize,
            300 + instance,
            &domain,
            ROUNDING,
        )
        .map_err(|e| e.to_string())?;

        let exact = synthesize_exact(&train, &domain, &SynthesisConfig::exact(None))
            .map_err(|e| e.to_string())?;
        for w in exact.layers.windows(2) {
            check(
                w[0].best_effectiveness <= w[1].best_effectiveness,
                format!("instance {instance}: staircase decreased"),
            )?;
        }
        let random = synthesize_random(
            &train,
            &domain,
            &SynthesisConfig::random(None, 20, 7000 + instance),
        )
        .map_err(|e| e.to_string())?;

        for front in [&exact.front, &random.front] {
            check(
                front.check_invariants(),
                format!("instance {instance}: front invariants"),
            )?;
            check(
                front
                    .points()
                    .first()
                    .map(|p| (p.distance, p.effectiveness))
                    == Some((0, Rat::zero())),
                format!("instance {instance}: missing trivial nominal point"),
            )?;
            for p in front.points() {
                let dominated = front.points().iter().any(|o| {
                    (o.effectiveness > p.effectiveness && o.distance <= p.distance)
                        || (o.effectiveness >= p.effectiveness && o.distance < p.distance)
                });
                check(
                    !dominated,
                    format!("instance {instance}: dominated point survived"),
                )?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} randomized instances"))
}

// --- criterion 6: effectiveness 1.0 on a fast-VT archetype ------------------------

fn c06_effectiveness_one() -> Result<String, String> {
    let domain = expand_domains();
    let train = generate_eval_set(&builtin("monomorphic-vt"), 20, 42, &domain, ROUNDING)
        .map_err(|e| e.to_string())?;
    check(
        train.baseline_reach.iter().all(|&r| r),
        "calibration: every training signal must reach therapy nominally",
    )?;
    let config = SynthesisConfig::exact(Some(vec![
        ParamId::VfTh,
        ParamId::VtTh,
        ParamId::VfDur,
        ParamId::VtDur,
    ]));
    let result = synthesize_exact(&train, &domain, &config).map_err(|e| e.to_string())?;
    let full = result
        .front
        .points()
        .iter()
        .find(|p| p.effectiveness == Rat::one())
        .ok_or("no front point reaches effectiveness 1.0")?;
    check(
        full.distance <= domain.dist_max(),
        format!("distance {} exceeds dist_max", full.distance),
    )?;
    Ok(format!(
        "effectiveness 1.0 at distance {} ({} evaluations)",
        full.distance, result.evaluations
    ))
}

// --- criterion 7: nominal zero ------------------------------------------------------

fn c07_nominal_zero() -> Result<String, String> {
    let domain = expand_domains();
    let nominal = domain.to_params(&domain.nominal(), ROUNDING);
    let mut sets = 0;
    for spec in builtin_conditions() {
        let train =
            generate_eval_set(&spec, 10, 7, &domain, ROUNDING).map_err(|e| e.to_string())?;
        let eff = train.effectiveness(&nominal);
        check(
            eff.is_zero(),
            format!("{}: nominal effectiveness {eff}", spec.name),
        )?;
        sets += 1;
    }
    // a custom generic-SVT recipe behaves the same
    let custom = ConditionSpec {
        name: "generic-svt".into(),
        class: icd_core::generator::SignalClass::Svt,
        vint_range: (280, 530),
        vint_jitter: 15,
        a_to_v: icd_core::generator::AtrialMode::Tracking,
        aint_range: (100, 100),
        fcc_high_prob: 0.95,
        duration_s: 30,
    };
    let train = generate_eval_set(&custom, 10, 9, &domain, ROUNDING).map_err(|e| e.to_string())?;
    check(
        train.effectiveness(&nominal).is_zero(),
        "generic-svt: nominal effectiveness nonzero",
    )?;
    Ok(format!("{} signal sets, all exactly zero", sets + 1))
}

// --- criterion 8: random search never beats exact AUC --------------------------------

fn c08_random_vs_exact() -> Result<String, String> {
    let mut details = Vec::new();
    for i in 0..10u64 {
        let spec = if i % 2 == 0 {
            boundary_vt_spec()
        } else {
            boundary_svt_spec()
        };
        let domain =
            truncated_domain(&[(ParamId::VfTh, 3), (ParamId::VtTh, 3), (ParamId::VtDur, 3)]);
        let train =
            generate_eval_set(&spec, 8, 100 + i, &domain, ROUNDING).map_err(|e| e.to_string())?;
        let free = Some(vec![ParamId::VfTh, ParamId::VtTh, ParamId::VtDur]);
        let exact = synthesize_exact(&train, &domain, &SynthesisConfig::exact(free.clone()))
            .map_err(|e| e.to_string())?;
        let random =
            synthesize_random(&train, &domain, &SynthesisConfig::random(free, 25, 999 + i))
                .map_err(|e| e.to_string())?;
        let (ae, ar) = (auc(&exact.front, &domain), auc(&random.front, &domain));
        check(ae >= ar, format!("seed {i}: AUC exact {ae} < random {ar}"))?;
        details.push((ae, ar));
    }
    let strict = details.iter().filter(|(a, r)| a > r).count();
    Ok(format!("10 instances, exact strictly ahead on {strict}"))
}

// --- criterion 9: emitter / simulator round trip --------------------------------------

fn c09_roundtrip() -> Result<String, String> {
    let domain = truncated_domain(&[(ParamId::VfTh, 2), (ParamId::VtDur, 2)]);
    let train = generate_eval_set(&builtin("monomorphic-vt"), 5, 11, &domain, ROUNDING)
        .map_err(|e| e.to_string())?;
    let doc = emit_smt(&train, &domain, SmtMode::Pareto, ROUNDING);
    let checker = GroundChecker::parse(&doc).map_err(|e| e.to_string())?;

    let mut grid_points = Vec::new();
    for vf in 1..=domain.len(ParamId::VfTh) {
        for dur in 1..=domain.len(ParamId::VtDur) {
            let mut v = domain.nominal();
            v.set(ParamId::VfTh, vf);
            v.set(ParamId::VtDur, dur);
            grid_points.push(v);
        }
    }

    for v in &grid_points {
        let outcome = checker
            .check_pinned(&domain, v, &doc)
            .map_err(|e| e.to_string())?;
        let params = domain.to_params(v, ROUNDING);
        let mut flips = 0usize;
        for (j, sig) in train.signals.iter().enumerate() {
            let sim = discrim::run_with(sig, &train.derived[j], &params);
            if outcome.therapy[j] != sim.bits {
                return Err(format!("therapy bits diverge at {v:?}, signal {j}"));
            }
            flips += (reachability(&sim) != train.baseline_reach[j]) as usize;
        }
        if outcome.satisfied_soft != flips {
            return Err(format!(
                "soft count {} != simulated flips {flips} at {v:?}",
                outcome.satisfied_soft
            ));
        }
    }

    // optional end-to-end check through a real solver
    if let Ok(template) = std::env::var(icd_tool::solver::SOLVER_ENV) {
        let solved = external_spot_check(&template, &doc, &domain, &train, &grid_points)
            .map_err(|e| format!("external solver check: {e}"))?;
        return Ok(format!(
            "{} grid points bit-identical (built-in checker; {solved} via external solver)",
            grid_points.len()
        ));
    }
    Ok(format!(
        "{} grid points bit-identical (built-in checker; ICD_SMT_SOLVER unset)",
        grid_points.len()
    ))
}

fn external_spot_check(
    template: &str,
    doc: &icd_core::smt::SmtDocument,
    domain: &ParameterDomain,
    train: &EvalSet,
    grid: &[ParamVector],
) -> Result<usize, String> {
    use icd_core::smt::sexp::{parse_all, Sexp};
    let mut names = Vec::new();
    for (j, sig) in train.signals.iter().enumerate() {
        for k in 0..sig.n() {
            names.push(th_name(j, k));
        }
    }
    let spots: Vec<&ParamVector> = grid
        .iter()
        .step_by((grid.len() / 3).max(1))
        .take(3)
        .collect();
    for v in &spots {
        let mut text = doc.text[..doc.metadata.check_sat_offset].to_string();
        text.push_str(&pin_assertions(domain, v, ROUNDING));
        text.push_str("(check-sat)\n(get-value (");
        text.push_str(&names.join(" "));
        text.push_str("))\n");
        let out = icd_tool::solver::run_external_solver(
            template,
            &text,
            std::time::Duration::from_secs(120),
        )
        .map_err(|e| e.to_string())?;
        let forms = parse_all(&out).map_err(|e| e.to_string())?;
        check(
            forms.first().and_then(Sexp::atom) == Some("sat"),
            format!("solver did not report sat: {out}"),
        )?;
        let mut values = std::collections::BTreeMap::new();
        for form in &forms {
            if let Some(items) = form.list() {
                for pair in items {
                    if let Some([name, value]) = pair.list() {
                        if let (Some(n), Some(val)) = (name.atom(), value.atom()) {
                            values.insert(n.to_string(), val == "true");
                        }
                    }
                }
            }
        }
        let params = domain.to_params(v, ROUNDING);
        for (j, sig) in train.signals.iter().enumerate() {
            let sim = discrim::run_with(sig, &train.derived[j], &params);
            for k in 0..sig.n() {
                let got = values
                    .get(&th_name(j, k))
                    .ok_or_else(|| format!("missing {} in solver values", th_name(j, k)))?;
                if *got != sim.bits[k] {
                    return Err(format!("solver Th differs at signal {j}, cycle {k}"));
                }
            }
        }
    }
    Ok(spots.len())
}

// --- criterion 10: desk-scale generalization ------------------------------------------

fn c10_validation() -> Result<String, String> {
    let domain = expand_domains();
    let free = Some(vec![ParamId::VfTh, ParamId::VtTh]);
    let mut details = Vec::new();
    for (i, spec) in builtin_conditions().into_iter().enumerate() {
        let train = generate_eval_set(&spec, 20, 1300 + i as u64, &domain, ROUNDING)
            .map_err(|e| e.to_string())?;
        let test = generate_eval_set(&spec, 10, 2600 + i as u64, &domain, ROUNDING)
            .map_err(|e| e.to_string())?;
        let result = synthesize_exact(&train, &domain, &SynthesisConfig::exact(free.clone()))
            .map_err(|e| e.to_string())?;
        let score = validation_score(&result.front, &domain, ROUNDING, &train, &test);
        check(
            score.abs() <= Rat::new(3, 20),
            format!("{}: validation score {score} outside |0.15|", spec.name),
        )?;
        details.push(format!("{} {:.4}", spec.name, rat_f64(score)));
    }
    Ok(details.join(", "))
}

fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
