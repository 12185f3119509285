use abc_misspec::diagnostics::DiagnosticKind;
use abc_misspec::experiments::{preset, run_power_study, with_threads, StudyConfig, TableMode, PRESETS};
use proptest::prelude::*;

#[test]
fn presets_round_trip_canonically() {
    for name in PRESETS {
        let cfg = preset(name).unwrap();
        let json = cfg.to_json().unwrap();
        let back = StudyConfig::from_json(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json().unwrap(), json, "{name}");
    }
}

#[test]
fn shared_and_fresh_tables_agree_on_shape() {
    let mut cfg = preset("normal-smoke").unwrap();
    cfg.settings.diagnostics = vec![DiagnosticKind::AsymptoticGof];
    let shared = run_power_study(&cfg).unwrap();
    cfg.settings.abc.table = TableMode::PerReplication;
    let fresh = run_power_study(&cfg).unwrap();
    assert_eq!(shared.rows.len(), fresh.rows.len());
    assert!(fresh.records.iter().all(|r| r.error.is_none()));
}

#[test]
fn study_is_independent_of_thread_count() {
    let mut cfg = preset("ricker-smoke").unwrap();
    cfg.replications = 2;
    cfg.settings.diagnostics = vec![DiagnosticKind::AsymptoticGof, DiagnosticKind::SimulatedGof];
    let one = with_threads(Some(1), || run_power_study(&cfg)).unwrap().unwrap();
    let four = with_threads(Some(4), || run_power_study(&cfg)).unwrap().unwrap();
    let strip = |s: &abc_misspec::experiments::PowerStudy| {
        s.records.iter().map(|r| (r.statistic, r.reject, r.seed.clone())).collect::<Vec<_>>()
    };
    assert_eq!(strip(&one), strip(&four));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn se_recomputable_from_frequency(seed in 0u64..1000) {
        let mut cfg = preset("normal-smoke").unwrap();
        cfg.master_seed = seed;
        cfg.settings.diagnostics = vec![DiagnosticKind::AsymptoticGof, DiagnosticKind::PredictivePvalue];
        let study = run_power_study(&cfg).unwrap();
        for r in &study.rows {
            prop_assert_eq!(r.frequency, r.rejections as f64 / r.completed as f64);
            prop_assert_eq!(r.se, (r.frequency * (1.0 - r.frequency) / r.completed as f64).sqrt());
            prop_assert_eq!(r.master_seed, seed);
        }
    }
}
