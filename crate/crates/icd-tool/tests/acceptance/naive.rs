//! Straight-line reference simulator for the acceptance suite, written
//! independently of the library: per-cycle window scans, integer-exact
//! comparisons and an explicit mode state machine.

use icd_core::discrim::Params;
use icd_core::signal::FeatureSignal;

#[derive(Clone, Copy, Default)]
pub struct Mode {
    active: bool,
    clock: i64,
}

fn below(slice: &[i64], th: i64) -> usize {
    slice.iter().filter(|&&v| v < th).count()
}

fn starts(vints: &[i64], k: usize, th: i64) -> bool {
    k >= 9 && below(&vints[k - 9..=k], th) >= 8
}

fn persists(vints: &[i64], k: usize, th: i64) -> bool {
    k >= 9 && below(&vints[k - 9..k], th) >= 5 && vints[k] < th
}

fn rate_discriminator(sig: &FeatureSignal, k: usize) -> bool {
    let done = sig.atrial_count[k];
    if done == 0 {
        return false;
    }
    let vw = &sig.vints[k.saturating_sub(9)..=k];
    let aw = &sig.aints[done.saturating_sub(10)..done];
    let (nv, sv) = (
        vw.len() as i128,
        vw.iter().map(|&x| x as i128).sum::<i128>(),
    );
    let (na, sa) = (
        aw.len() as i128,
        aw.iter().map(|&x| x as i128).sum::<i128>(),
    );
    // 60000*nv/sv >= 60000*na/sa + 10, cross-multiplied
    60_000 * nv * sa - 60_000 * na * sv - 10 * sv * sa >= 0
}

fn morphology_match(sig: &FeatureSignal, k: usize, p: &Params) -> bool {
    if k < 9 {
        return false;
    }
    let th = p.nsrcor_hundredths as f64 / 100.0;
    sig.fcc[k - 9..=k].iter().filter(|&&f| f >= th).count() >= 3
}

fn afib_with_stable_ventricle(sig: &FeatureSignal, k: usize, p: &Params) -> bool {
    let done = sig.atrial_count[k];
    if done < 10 {
        return false;
    }
    if below(&sig.aints[done - 10..done], p.afib_th_ms) < 6 {
        return false;
    }
    // integer-exact variance comparison: w*sum(x^2) - sum(x)^2 <= stb * w^2
    let w = &sig.vints[k.saturating_sub(9)..=k];
    let n = w.len() as i128;
    let s: i128 = w.iter().map(|&x| x as i128).sum();
    let s2: i128 = w.iter().map(|&x| (x as i128) * (x as i128)).sum();
    n * s2 - s * s <= p.stb_ms2 as i128 * n * n
}

pub fn reference_run(sig: &FeatureSignal, p: &Params) -> Vec<bool> {
    let mut vf = Mode::default();
    let mut vt = Mode::default();
    let mut out = Vec::with_capacity(sig.vints.len());

    for k in 0..sig.vints.len() {
        let vint = sig.vints[k];
        let vf_persist = persists(&sig.vints, k, p.vf_th_ms);
        let vt_persist = persists(&sig.vints, k, p.vt_th_ms);
        let vf_expired = vf.clock + vint >= p.vfdur_ms;
        let vt_expired = vt.clock + vint >= p.vtdur_ms;

        let therapy = if vf.active && vf_persist && vf_expired {
            true
        } else if vt.active && vt_persist && vt_expired {
            rate_discriminator(sig, k)
                || !(morphology_match(sig, k, p) || afib_with_stable_ventricle(sig, k, p))
        } else {
            false
        };
        out.push(therapy);

        vf = advance(
            vf,
            vf_persist,
            vf_expired,
            starts(&sig.vints, k, p.vf_th_ms),
            vint,
        );
        vt = advance(
            vt,
            vt_persist,
            vt_expired,
            starts(&sig.vints, k, p.vt_th_ms),
            vint,
        );
    }
    out
}

fn advance(m: Mode, persist: bool, expired: bool, start: bool, vint: i64) -> Mode {
    if m.active {
        if expired || !persist {
            // the episode ended; a new one may open immediately with a
            // fresh clock
            Mode {
                active: start,
                clock: 0,
            }
        } else {
            Mode {
                active: true,
                clock: m.clock + vint,
            }
        }
    } else if start {
        Mode {
            active: true,
            clock: 0,
        }
    } else {
        Mode::default()
    }
}
