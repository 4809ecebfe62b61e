use convention_core::agents::MessageKind;
use convention_core::convention::{run_simulation1, AbstractionSettings};
use convention_core::dsl::{expand_program, programs_for_tower, TowerId};
use convention_core::io::config::ModalityConfig;
use convention_core::io::{run_experiment, Experiment, SimConfig};
use convention_core::preference::{simulate_modality_preferences, ModalitySettings};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn abstraction_runs_ignore_thread_count() {
    let settings = AbstractionSettings::with_beta_u(0.5);
    let one = in_pool(1, || run_simulation1(&settings, 12, 99).unwrap());
    let four = in_pool(4, || run_simulation1(&settings, 12, 99).unwrap());
    assert_eq!(one, four);
}

#[test]
fn modality_runs_ignore_thread_count() {
    let m = ModalityConfig::default();
    let r4 = m.conditions[1].theta_r4(&m.r1);
    let s = ModalitySettings::default();
    let one = in_pool(1, || {
        simulate_modality_preferences(&m.r1, &r4, 40, 5, &s).unwrap()
    });
    let three = in_pool(3, || {
        simulate_modality_preferences(&m.r1, &r4, 40, 5, &s).unwrap()
    });
    assert_eq!(one, three);
}

#[test]
fn every_experiment_ignores_thread_count() {
    for e in Experiment::ALL {
        let mut cfg = SimConfig::default_for(e);
        cfg.n_runs = cfg.n_runs.min(10);
        cfg.fit.n_init = 8;
        cfg.fit.n_iter = 40;
        let one = in_pool(1, || run_experiment(&cfg).unwrap());
        let four = in_pool(4, || run_experiment(&cfg).unwrap());
        assert_eq!(one, four, "{e}");
    }
}

#[test]
fn chosen_programs_build_their_towers() {
    let runs = run_simulation1(&AbstractionSettings::with_beta_u(1.0), 10, 3).unwrap();
    for run in &runs {
        for t in &run.trials {
            let target = expand_program(&programs_for_tower(t.tower)[0]).unwrap();
            assert_eq!(expand_program(&t.program_used).unwrap(), target);
            assert!(t
                .message_kinds
                .iter()
                .all(|k| *k == MessageKind::LanguageOnly));
        }
    }
}

#[test]
fn cheaper_utterances_slow_abstraction() {
    let mean_r4 = |beta_u: f64| {
        let runs = run_simulation1(&AbstractionSettings::with_beta_u(beta_u), 30, 8).unwrap();
        let lens: Vec<f64> = runs
            .iter()
            .flat_map(|r| &r.trials)
            .filter(|t| t.repetition == 4)
            .map(|t| t.program_length as f64)
            .collect();
        lens.iter().sum::<f64>() / lens.len() as f64
    };
    assert!(mean_r4(1.0) < mean_r4(0.0));
    // The tree tower has four programs, so it can end on a single chunk.
    assert_eq!(programs_for_tower(TowerId::Tree).len(), 4);
}
