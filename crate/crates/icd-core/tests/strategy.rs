//! Qualitative attack-strategy checks: the synthesized maximum-effectiveness
//! witnesses must embody the two known attack directions — raising the
//! detection rates and stretching durations to starve VT/VF therapy, and
//! lowering the detection rates to inject therapy into SVT rhythms.

use icd_core::generator::{builtin_conditions, generate_eval_set};
use icd_core::params::{expand_domains, ParamId, RoundingMode};
use icd_core::synth::{synthesize_exact, SynthesisConfig};
use num_traits::One;

fn builtin(name: &str) -> icd_core::generator::ConditionSpec {
    builtin_conditions().into_iter().find(|c| c.name == name).unwrap()
}

#[test]
fn vt_attack_raises_detection_rate_and_stretches_duration() {
    let domain = expand_domains();
    let train = generate_eval_set(
        &builtin("monomorphic-vt"),
        12,
        5,
        &domain,
        RoundingMode::HalfUp,
    )
    .unwrap();
    let config = SynthesisConfig::exact(Some(vec![ParamId::VfTh, ParamId::VtDur]));
    let result = synthesize_exact(&train, &domain, &config).unwrap();

    let top = result
        .front
        .points()
        .iter()
        .find(|p| p.effectiveness.is_one())
        .expect("VF threshold + VT duration suffice to starve all therapy");
    // therapy starvation forces the VF zone rate above every interval
    // (240-330 ms cycles need a sub-250 ms zone boundary, i.e. >= 240 BPM)
    assert!(top.witness.get(ParamId::VfTh) >= 24, "VF_th not raised: {:?}", top.witness);
    // and the VT duration must outlast the 30 s recordings
    assert_eq!(top.witness.get(ParamId::VtDur), domain.len(ParamId::VtDur));
    assert_eq!(domain.value_scaled(ParamId::VtDur, top.witness.get(ParamId::VtDur)), 30_000);
}

#[test]
fn svt_attack_pins_detection_rate_at_the_slowest_value() {
    let domain = expand_domains();
    let train = generate_eval_set(
        &builtin("svt-tracking"),
        12,
        5,
        &domain,
        RoundingMode::HalfUp,
    )
    .unwrap();
    let config = SynthesisConfig::exact(Some(vec![ParamId::VfTh, ParamId::VfDur]));
    let result = synthesize_exact(&train, &domain, &config).unwrap();

    let top = result
        .front
        .points()
        .iter()
        .find(|p| p.effectiveness.is_one())
        .expect("the slowest VF zone rate classifies every tracked SVT as VF");
    // introducing therapy into 340-530 ms rhythms needs the 110 BPM
    // (545 ms) zone boundary, the lowest programmable value
    assert_eq!(top.witness.get(ParamId::VfTh), 1);
    // any programmable duration fits inside the 30 s recordings, so the
    // deterministic tie-break keeps the nominal (minimum) duration
    assert_eq!(top.witness.get(ParamId::VfDur), 1);
}
