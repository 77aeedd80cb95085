//! Paint-mode reclassification checked through independent assignment.

mod common;

use binx_core::result::bin_of;
use binx_core::{
    apply_pins, assign, edit_breaks, natural_breaks, BreakEdit, Error, FeatureSeries, PinConstraint,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_series(rng: &mut ChaCha8Rng) -> FeatureSeries {
    let n = rng.gen_range(10..80);
    let values: Vec<f64> = (0..n)
        .map(|_| (rng.gen_range(0.0..100.0f64) * 100.0).round() / 100.0)
        .collect();
    FeatureSeries::from_values(&values)
}

/// Pins drawn from a monotone assignment of values to bins. The outer
/// extents stay fixed, so the minimum can only go to bin 1 and the maximum
/// only to bin `k`; sets that break this are returned as `Err`.
fn monotone_pins(
    rng: &mut ChaCha8Rng,
    series: &FeatureSeries,
    k: usize,
) -> Result<Vec<PinConstraint>, Vec<PinConstraint>> {
    let mut sorted = series.sorted_valid();
    sorted.dedup();
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let m = rng.gen_range(1..=5.min(sorted.len()));
    let mut picked: Vec<f64> = sorted.choose_multiple(rng, m).copied().collect();
    picked.sort_by(f64::total_cmp);
    let mut targets: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=k)).collect();
    targets.sort_unstable();
    let pins: Vec<PinConstraint> = picked
        .into_iter()
        .zip(targets)
        .map(|(v, t)| PinConstraint::value(v, t))
        .collect();
    let pinned_edge = pins.iter().any(|p| {
        let v = p.value.unwrap();
        (v == lo && p.target_bin != 1) || (v == hi && p.target_bin != k)
    });
    if pinned_edge {
        Err(pins)
    } else {
        Ok(pins)
    }
}

#[test]
fn random_feasible_pins_are_all_satisfied() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut solved = 0;
    while solved < 1000 {
        let s = random_series(&mut rng);
        let k = rng.gen_range(2..=6);
        let Ok(base) = natural_breaks(&s, k) else {
            continue;
        };
        let k = base.bin_count();
        let pins = match monotone_pins(&mut rng, &s, k) {
            Ok(pins) => pins,
            Err(pins) => {
                assert!(matches!(
                    apply_pins(&base.extents, &pins, &s),
                    Err(Error::InfeasibleConstraints(_))
                ));
                continue;
            }
        };
        solved += 1;
        let out = apply_pins(&base.extents, &pins, &s)
            .unwrap_or_else(|e| panic!("{pins:?} on {:?}: {e}", base.extents));
        assert_eq!(out.extents.len(), base.extents.len());
        assert_eq!(out.extents[0], base.extents[0]);
        assert_eq!(out.extents[k], base.extents[k]);
        assert!(
            out.extents.windows(2).all(|w| w[0] < w[1]),
            "{:?}",
            out.extents
        );
        for p in &pins {
            assert_eq!(
                bin_of(&out.extents, p.value.unwrap()),
                p.target_bin,
                "{pins:?} -> {:?}",
                out.extents
            );
        }
        let again = apply_pins(&out.extents, &pins, &s).unwrap();
        assert_eq!(again.extents, out.extents);
    }
}

#[test]
fn order_violations_and_duplicate_conflicts_are_infeasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let s = random_series(&mut rng);
        let Ok(base) = natural_breaks(&s, 4) else {
            continue;
        };
        let k = base.bin_count();
        if k < 2 {
            continue;
        }
        let mut sorted = s.sorted_valid();
        sorted.dedup();
        let i = rng.gen_range(0..sorted.len() - 1);
        let j = rng.gen_range(i + 1..sorted.len());
        let hi_bin = rng.gen_range(2..=k);
        let lo_bin = rng.gen_range(1..hi_bin);
        let crossed = [
            PinConstraint::value(sorted[i], hi_bin),
            PinConstraint::value(sorted[j], lo_bin),
        ];
        assert!(matches!(
            apply_pins(&base.extents, &crossed, &s),
            Err(Error::InfeasibleConstraints(_))
        ));
        let twice = [
            PinConstraint::value(sorted[i], lo_bin),
            PinConstraint::value(sorted[i], hi_bin),
        ];
        assert!(matches!(
            apply_pins(&base.extents, &twice, &s),
            Err(Error::InfeasibleConstraints(_))
        ));
    }
}

#[test]
fn south_versus_rest_replay() {
    let s = common::sample_series();
    let base = natural_breaks(&s, 6).unwrap();
    let rounded: Vec<f64> = base.extents.iter().map(|e| e.round()).collect();
    let mut extents = vec![
        rounded[0].min(base.extents[0].floor()),
        rounded[1],
        rounded[2],
        rounded[3],
        rounded[4],
    ];
    extents.push(base.extents[6].ceil());
    let extents = edit_breaks(&extents, BreakEdit::Remove { index: 2 }).unwrap();

    let pins = [
        PinConstraint::feature("13089", 1),
        PinConstraint::feature("37113", 1),
    ];
    assert_eq!(pins[0].resolve(&s).unwrap(), 74.93);
    assert_eq!(pins[1].resolve(&s).unwrap(), 72.61);
    let out = apply_pins(&extents, &pins, &s).unwrap();
    let a = assign(&s, &out.extents).unwrap();
    for id in ["13089", "37113"] {
        assert_eq!(a.assignments[s.position(id).unwrap()], Some(1), "{id}");
    }
    let before = assign(&s, &extents).unwrap();
    assert!(a.bin_sizes[0] > before.bin_sizes[0]);
}

#[test]
fn unknown_feature_is_rejected() {
    let s = common::sample_series();
    let err = apply_pins(
        &[60.0, 70.0, 90.0],
        &[PinConstraint::feature("99999", 1)],
        &s,
    )
    .unwrap_err();
    assert!(matches!(err, Error::UnknownFeature(_)), "{err}");
}
