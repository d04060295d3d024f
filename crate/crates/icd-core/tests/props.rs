//! Property suites over the simulator, the parameter space and the
//! objectives.

use icd_core::discrim::{self, Params};
use icd_core::objectives::{pareto_filter, FrontPoint, ParetoFront};
use icd_core::params::{bpm_to_ms, expand_domains, ParamId, ParamVector, RoundingMode};
use icd_core::signal::{compute_d5, compute_vvar_exact, precompute, FeatureSignal, Label};
use icd_core::Rat;
use proptest::prelude::*;

fn tracking_signal(vints: Vec<i64>, aints: Vec<i64>, fcc: Vec<f64>) -> FeatureSignal {
    let n = vints.len();
    FeatureSignal::new(
        "p".into(),
        vints,
        aints,
        (1..=n).collect(),
        fcc,
        Label::NoTherapy,
    )
    .unwrap()
}

fn arb_vints() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(120i64..1200, 10..40)
}

fn arb_params() -> impl Strategy<Value = Params> {
    (
        200i64..600,
        200i64..700,
        200i64..650,
        500i64..4000,
        500i64..6000,
        70i64..=96,
        0i64..=120,
    )
        .prop_map(|(vf, vt, afib, vfd, vtd, nsr, stb)| Params {
            vf_th_ms: vf,
            vt_th_ms: vt,
            afib_th_ms: afib,
            vfdur_ms: vfd,
            vtdur_ms: vtd,
            nsrcor_hundredths: nsr,
            stb_ms2: stb,
        })
}

proptest! {
    #[test]
    fn vvar_scaling_law(vints in arb_vints(), c in 1i64..5, k_frac in 0usize..1000) {
        let k = k_frac % vints.len();
        let scaled: Vec<i64> = vints.iter().map(|&v| v * c).collect();
        let base = compute_vvar_exact(&vints, k);
        let expect = base * Rat::from_integer(c * c);
        prop_assert_eq!(compute_vvar_exact(&scaled, k), expect);
    }

    #[test]
    fn d5_depends_only_on_window_means(
        vints in prop::collection::vec(150i64..900, 15..25),
        aints in prop::collection::vec(150i64..900, 15..25),
        rot in 0usize..10,
    ) {
        let n = vints.len().min(aints.len());
        let (vints, aints) = (&vints[..n], &aints[..n]);
        let counts: Vec<usize> = (1..=n).collect();
        let k = n - 1;
        let base = compute_d5(vints, aints, &counts, k);

        // rotating the last-10 windows preserves their means
        let mut v2 = vints.to_vec();
        let lo = k - 9;
        v2[lo..=k].rotate_left(rot % 10);
        let mut a2 = aints.to_vec();
        a2[lo..=k].rotate_left(rot % 10);
        prop_assert_eq!(compute_d5(&v2, &a2, &counts, k), base);
    }

    #[test]
    fn run_is_pure_and_length_preserving(
        vints in arb_vints(),
        p in arb_params(),
        slow_atrium in any::<bool>(),
    ) {
        let n = vints.len();
        let aints = if slow_atrium { vec![750i64; n] } else { vints.clone() };
        let fcc: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 0.96 } else { 0.35 }).collect();
        let sig = tracking_signal(vints, aints, fcc);
        let a = discrim::run(&sig, &p);
        let b = discrim::run(&sig, &p);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), sig.n());
        prop_assert_eq!(precompute(&sig), precompute(&sig));
    }

    #[test]
    fn thresholds_at_or_below_min_interval_suppress_therapy(
        vints in arb_vints(),
        mut p in arb_params(),
    ) {
        let min = *vints.iter().min().unwrap();
        p.vf_th_ms = min;
        p.vt_th_ms = min - 1;
        let n = vints.len();
        let sig = tracking_signal(vints, vec![700; n], vec![0.2; n]);
        prop_assert!(!discrim::run(&sig, &p).any());
    }

    #[test]
    fn pareto_filter_equals_quadratic_oracle(
        raw in prop::collection::vec((0u32..12, 0i64..=20, 1u8..9), 1..40),
    ) {
        let candidates: Vec<FrontPoint> = raw
            .iter()
            .map(|&(d, num, w)| FrontPoint {
                distance: d,
                effectiveness: Rat::new(num, 20),
                witness: ParamVector([w; 7]),
            })
            .collect();
        let filtered: ParetoFront = pareto_filter(candidates.clone());
        prop_assert!(filtered.check_invariants());

        // oracle: keep exactly the non-dominated (distance, effectiveness)
        // pairs, with the lexicographically smallest witness each
        for c in &candidates {
            let dominated = candidates.iter().any(|o| {
                (o.effectiveness > c.effectiveness && o.distance <= c.distance)
                    || (o.effectiveness >= c.effectiveness && o.distance < c.distance)
            });
            let kept = filtered
                .points()
                .iter()
                .any(|p| p.distance == c.distance && p.effectiveness == c.effectiveness);
            prop_assert_eq!(!dominated, kept, "candidate {:?}", c);
            if let Some(p) = filtered
                .points()
                .iter()
                .find(|p| p.distance == c.distance && p.effectiveness == c.effectiveness)
            {
                prop_assert!(p.witness <= c.witness);
            }
        }
    }

    #[test]
    fn box_equals_metric_ball(
        vf_idx in 1u8..=25,
        vt_idx in 1u8..=26,
        dur_idx in 1u8..=22,
        s in 0u32..=24,
    ) {
        let d = expand_domains();
        let mut v = d.nominal();
        v.set(ParamId::VfTh, vf_idx);
        v.set(ParamId::VtTh, vt_idx);
        v.set(ParamId::VtDur, dur_idx);
        let in_ball = d.distance(&v) <= s;
        let boxed = d.index_box(s);
        let in_box = ParamId::ALL
            .iter()
            .all(|&id| {
                let (lo, hi) = boxed[id.index()];
                (lo..=hi).contains(&v.get(id))
            });
        prop_assert_eq!(in_ball, in_box);
    }

    #[test]
    fn rounding_modes_differ_by_at_most_one(bpm in 30i64..=400) {
        let half = bpm_to_ms(bpm, RoundingMode::HalfUp);
        let ceil = bpm_to_ms(bpm, RoundingMode::Ceil);
        prop_assert!(ceil == half || ceil == half + 1);
        // both round the exact rational 60000/bpm
        prop_assert!((half * bpm - 60_000).abs() <= bpm);
        prop_assert!(ceil * bpm >= 60_000 && (ceil - 1) * bpm < 60_000);
    }
}

#[test]
fn immutable_values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<FeatureSignal>();
    assert_send_sync::<Params>();
    assert_send_sync::<icd_core::discrim::TherapySignal>();
    assert_send_sync::<icd_core::params::ParameterDomain>();
    assert_send_sync::<icd_core::objectives::EvalSet>();
    assert_send_sync::<icd_core::objectives::ParetoFront>();
}

proptest! {
    #[test]
    fn auc_equals_unit_step_sum(
        raw in prop::collection::vec((0u32..=24, 0i64..=20, 1u8..9), 1..30),
    ) {
        // the area under the front's step curve equals the unit-step sum of
        // the best-effectiveness-within-distance query
        let d = expand_domains();
        let candidates: Vec<FrontPoint> = raw
            .iter()
            .map(|&(dist, num, w)| FrontPoint {
                distance: dist,
                effectiveness: Rat::new(num, 20),
                witness: ParamVector([w; 7]),
            })
            .collect();
        let front = pareto_filter(candidates);
        let steps: Rat = (0..d.dist_max()).map(|s| front.effectiveness_at(s)).sum();
        prop_assert_eq!(icd_core::objectives::auc(&front, &d), steps);
    }
}
