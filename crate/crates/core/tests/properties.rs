use proptest::prelude::*;

use ciftem::codec::{decode_detailed, read_stream, write_stream};
use ciftem::experiment::{BiasMode, Prepared, Scheme, TrialConfig};
use ciftem::{
    amplitude_bound, ccif_step, check_density, hz_to_rad, iftem_step, time_bounds, TemParams, WindowPartition,
};

fn sampler() -> impl Strategy<Value = (TemParams, f64)> {
    (1.0f64..200.0, 0.05f64..2.0, 1.2f64..12.0, 0.1f64..1.0, 0.01f64..0.2).prop_map(|(f, e, alpha, kappa, delta)| {
        let c = amplitude_bound(e, hz_to_rad(f)).unwrap();
        (TemParams::with_alpha(alpha, c, kappa, delta).unwrap(), c)
    })
}

proptest! {
    #[test]
    fn bounds_bracket_the_unbiased_interval((p, c) in sampler()) {
        let b = time_bounds(&p, c).unwrap();
        let mid = p.kappa_delta() / p.bias();
        prop_assert!(b.dt_min < mid && mid < b.dt_max);
    }

    #[test]
    fn windowed_step_divides_baseline((p, c) in sampler(), bits in 6u32..=15, l in 1u32..=64) {
        let k = 1u32 << bits;
        let base = iftem_step(&p, c, k).unwrap();
        let s = ccif_step(&p, c, k, l).unwrap();
        prop_assert!((f64::from(l) * s - base).abs() <= 1e-12 * base);
        if l > 1 {
            prop_assert!(s < base);
        }
        let part = WindowPartition::new(l, time_bounds(&p, c).unwrap()).unwrap();
        prop_assert!((part.step(k) - s).abs() <= 1e-12 * s);
    }

    #[test]
    fn coarser_levels_in_windows_match_baseline((p, c) in sampler(), bits in 6u32..=15, lbits in 0u32..=6) {
        let k = 1u32 << bits;
        let l = 1u32 << lbits.min(bits);
        let part = WindowPartition::new(l, time_bounds(&p, c).unwrap()).unwrap();
        let base = iftem_step(&p, c, k).unwrap();
        prop_assert!((part.step(k / l) - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn density_matches_definition((p, c) in sampler(), f in 1.0f64..200.0) {
        let omega = hz_to_rad(f);
        let dense = check_density(&p, c, omega).unwrap();
        prop_assert_eq!(dense, time_bounds(&p, c).unwrap().dt_max < std::f64::consts::PI / omega);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn codec_invariants_on_encoded_signals(seed in 0u64..10_000, alpha in any::<bool>(), bits in 6u32..=15) {
        let bias = if alpha { BiasMode::Alpha(6.0) } else { BiasMode::Fixed(35.0) };
        let p = Prepared::new(&TrialConfig { bias, seed, ..TrialConfig::default() }).unwrap();
        for &t in &p.firings.intervals {
            prop_assert!(p.bounds.contains(t, 1e-9));
        }
        for scheme in [Scheme::Iftem, Scheme::Ccif { windows: None }, Scheme::Dcif] {
            let cs = p.compress(scheme, bits).unwrap();
            prop_assert!(cs.records.first().map_or(true, |r| scheme == Scheme::Iftem || r.window.is_some()));
            let dec = decode_detailed(&cs).unwrap();
            for ((t, that), r) in p.firings.intervals.iter().zip(&dec.intervals).zip(&cs.records) {
                let half = 0.5 * p.bounds.range() / f64::from(r.windows) / f64::from(cs.header.levels);
                prop_assert!((t - that).abs() <= half * (1.0 + 1e-9));
            }
            let enc: Vec<u32> = cs.records.iter().map(|r| r.windows).collect();
            prop_assert_eq!(&enc, &dec.window_counts);
            let bytes = write_stream(&cs).unwrap();
            prop_assert_eq!(read_stream(&bytes).unwrap(), cs);
        }
    }
}

#[test]
fn ccif_beats_baseline_at_equal_levels() {
    let mut wins = 0;
    let mut trials = 0;
    for bias in [BiasMode::Fixed(35.0), BiasMode::Alpha(6.0)] {
        for seed in 0..20 {
            let p = Prepared::new(&TrialConfig { bias, seed, ..TrialConfig::default() }).unwrap();
            for bits in [6, 9, 12] {
                trials += 1;
                let cc = p.run(Scheme::Ccif { windows: None }, bits).unwrap().mse_db;
                let base = p.run(Scheme::Iftem, bits).unwrap().mse_db;
                if cc <= base {
                    wins += 1;
                }
            }
        }
    }
    assert!(wins * 10 >= trials * 9, "{wins} of {trials}");
}

#[test]
fn dcif_window_count_stays_in_reported_range() {
    for seed in 0..5 {
        let p = Prepared::new(&TrialConfig { seed, ..TrialConfig::default() }).unwrap();
        let m = p.run(Scheme::Dcif, 10).unwrap();
        assert!((2.0..=8.0).contains(&m.avg_l), "seed {seed}: {}", m.avg_l);
    }
}
