use centering_core::coref_eval::{ChainSet, CorefCounts};
use centering_core::permute::discourse_seed;
use centering_core::recency::{mean_recency_kp, run_recency_centering, FitGrid, Variant};
use centering_core::synthetic::{corrupt_mentions, lag_corpus, random_discourse};
use centering_core::{
    backward_center_recency, fit_forget, run_centering, update_center_set, utterances_of, Aggregator, CfCandidate,
    Document, EntityId, Error, Forget, ForwardCenters, Gate, InstantiationConfig, RecencyConfig, Semiring,
    WeightedCenterSet, Weighting,
};
use proptest::prelude::*;

fn all_configs() -> Vec<InstantiationConfig> {
    let mut out = Vec::new();
    for skip in [true, false] {
        for cf_candidate in [CfCandidate::ClusterOnly, CfCandidate::IncludeSingleton] {
            for weighting in [Weighting::GrammaticalRole, Weighting::SemanticRole] {
                for aggregator in [Aggregator::Max, Aggregator::Sum] {
                    out.push(InstantiationConfig {
                        skip_null_utterances: skip,
                        cf_candidate,
                        weighting,
                        aggregator,
                        ..InstantiationConfig::default()
                    });
                }
            }
        }
    }
    out
}

#[test]
fn reduces_to_vanilla_centering() {
    let configs = all_configs();
    for seed in 0..1000u64 {
        let d = random_discourse(seed, 10, 5);
        let config = &configs[seed as usize % configs.len()];
        let vanilla: Vec<_> = run_centering(&d, config).iter().map(|f| (f.cb, f.transition)).collect();
        let recency: Vec<_> = run_recency_centering(&d, config, &RecencyConfig::default())
            .unwrap()
            .iter()
            .map(|f| (f.cb, f.transition))
            .collect();
        assert_eq!(vanilla, recency, "seed {seed}");
    }
}

fn decay(gamma: f64) -> RecencyConfig {
    RecencyConfig { forget: Forget::ExponentialDecay { gamma }, gate: Gate::One, ..RecencyConfig::default() }
}

proptest! {
    #[test]
    fn unmentioned_weight_decays_geometrically(w in 0.5f64..10.0, gamma in 0.0f64..=1.0, k in 0usize..12) {
        let mut cf = ForwardCenters::new();
        cf.insert(EntityId(3), w, 0);
        let empty = ForwardCenters::new();
        let rc = decay(gamma);
        let mut set = update_center_set(&WeightedCenterSet::default(), &cf, &empty, &rc).unwrap();
        prop_assert_eq!(set.weight(EntityId(3)), Some(w));
        for _ in 0..k {
            set = update_center_set(&set, &empty, &empty, &rc).unwrap();
        }
        let got = set.weight(EntityId(3)).unwrap();
        prop_assert!((got - w * gamma.powi(k as i32)).abs() <= 1e-12);
    }

    #[test]
    fn semiring_laws(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3) {
        let s = Semiring::RealPlusTimes;
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()));
        prop_assert_eq!(s.add(a, b), s.add(b, a));
        prop_assert!(close(s.add(s.add(a, b), c), s.add(a, s.add(b, c))));
        prop_assert_eq!(s.add(a, s.zero()), a);
        prop_assert!(close(s.mul(s.mul(a, b), c), s.mul(a, s.mul(b, c))));
        prop_assert_eq!(s.mul(a, s.one()), a);
        prop_assert_eq!(s.mul(s.one(), a), a);
        prop_assert!(close(s.mul(a, s.add(b, c)), s.add(s.mul(a, b), s.mul(a, c))));
        prop_assert!(close(s.mul(s.add(b, c), a), s.add(s.mul(b, a), s.mul(c, a))));
    }

    #[test]
    fn recency_cb_comes_from_earlier_utterances(seed in any::<u64>(), gamma in 0.0f64..=1.0) {
        let d = random_discourse(seed, 8, 4);
        let frames = run_recency_centering(&d, &InstantiationConfig::default(), &decay(gamma)).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for f in &frames {
            if let Some(cb) = f.cb {
                prop_assert!(seen.contains(&cb));
            }
            seen.extend(f.cf.iter().map(|(e, _)| e));
        }
    }
}

#[test]
fn empty_set_has_no_center() {
    assert_eq!(backward_center_recency(&WeightedCenterSet::default()), None);
}

/// Corrupted clusterings of `corpus` at several noise levels, scored
/// against the gold chains with corpus-level CoNLL F1.
fn noisy_variants(corpus: &[Document], levels: &[f64], seed: u64) -> Vec<Variant> {
    levels
        .iter()
        .enumerate()
        .map(|(v, &noise)| {
            let mentions: Vec<Vec<_>> = corpus
                .iter()
                .enumerate()
                .map(|(i, d)| corrupt_mentions(&d.mentions, noise, discourse_seed(seed + v as u64, i)))
                .collect();
            let mut counts = CorefCounts::default();
            for (d, m) in corpus.iter().zip(&mentions) {
                counts += CorefCounts::of(&ChainSet::from_mentions(&d.mentions).unwrap(), &ChainSet::from_mentions(m).unwrap());
            }
            Variant { mentions, conll_f1: counts.conll_f1() }
        })
        .collect()
}

fn gammas() -> Vec<f64> {
    FitGrid::default().gammas
}

#[test]
fn lagged_recurrence_prefers_positive_decay() {
    let corpus = lag_corpus(40, 7);
    let variants = noisy_variants(&corpus, &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5], 100);
    let config = InstantiationConfig::default();
    let base = RecencyConfig { gate: Gate::One, ..RecencyConfig::default() };
    let report = fit_forget(&corpus, &variants, &config, &base, &FitGrid::decay_only(gammas())).unwrap();
    let Forget::ExponentialDecay { gamma } = report.best.forget else { panic!("{:?}", report.best) };
    assert!(gamma > 0.0);
    assert!(report.best_r >= report.baseline_r.unwrap() + 0.02, "{} vs {:?}", report.best_r, report.baseline_r);
    // the reported best is the grid maximum
    let max = report.grid.iter().filter_map(|p| p.pearson_r).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(report.best_r, max);
}

#[test]
fn recovers_the_generating_gamma() {
    let corpus = lag_corpus(30, 11);
    let config = InstantiationConfig::default();
    let grid = gammas();
    let step = grid[1] - grid[0];
    for truth in [0.3, 0.6, 0.85] {
        let mut variants = noisy_variants(&corpus, &[0.0, 0.15, 0.3, 0.45, 0.6], 5);
        let rc = decay(truth);
        for v in &mut variants {
            let discourses: Vec<_> =
                corpus.iter().zip(&v.mentions).map(|(d, m)| utterances_of(d, m).unwrap()).collect();
            v.conll_f1 = mean_recency_kp(&discourses, &config, &rc).unwrap().unwrap();
        }
        let base = RecencyConfig { gate: Gate::One, ..RecencyConfig::default() };
        let report = fit_forget(&corpus, &variants, &config, &base, &FitGrid::decay_only(grid.clone())).unwrap();
        let Forget::ExponentialDecay { gamma } = report.best.forget else { panic!() };
        assert!((gamma - truth).abs() <= step + 1e-9, "true {truth}, fitted {gamma}");
    }
}

#[test]
fn fitting_needs_several_variants() {
    let corpus = lag_corpus(5, 1);
    let variants = noisy_variants(&corpus, &[0.0], 1);
    let err = fit_forget(&corpus, &variants, &InstantiationConfig::default(), &RecencyConfig::default(), &FitGrid::default());
    assert!(matches!(err, Err(Error::Precondition(_))));
    let same = vec![variants[0].clone(), variants[0].clone(), variants[0].clone()];
    let err = fit_forget(&corpus, &same, &InstantiationConfig::default(), &RecencyConfig::default(), &FitGrid::default());
    assert!(matches!(err, Err(Error::Precondition(_))));
}
