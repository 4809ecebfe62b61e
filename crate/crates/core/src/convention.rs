//! Repeated-trial convention formation: the abstraction-acquisition
//! simulation.
//!
//! Each run pairs a fresh Instructor and Builder for four repetitions over the
//! three target towers (random order within a repetition). In a trial the
//! Instructor picks a program and a message jointly by softmax over their
//! utility, the Builder decodes every sub-message by MAP, and on success both
//! agents update their lexicon beliefs and the next, more abstract program of
//! that tower is taught.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agents::{
    choose_index, expected_message_utility, map_decode, message_candidates_with,
    pragmatic_builder_distribution, update_belief, AgentError, AgentState, Message, MessageKind,
    Role, SubMessage, Theta, UpdateSide,
};
use crate::dsl::{program_length, programs_for_tower, Symbol, TowerId, TowerProgram};
use crate::lexicon::{lexicons, Semantics, LEXICON_COUNT};
use crate::rng::stream_rng;

pub const REPETITIONS: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConventionError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("program index {unlocked} is out of range for tower {tower} ({available} programs)")]
    InvalidUnlocked {
        tower: TowerId,
        unlocked: usize,
        available: usize,
    },
    #[error("at least one run is required")]
    NoRuns,
    #[error("no results to aggregate")]
    EmptyInput,
}

/// Which unlocked programs the Instructor considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProgramPolicy {
    /// Softmax over every program unlocked so far, jointly with the message.
    #[default]
    SoftmaxOverUnlocked,
    /// Only the most recently unlocked program.
    NewestOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractionSettings {
    pub theta: Theta,
    /// Message kinds the Instructor may produce.
    pub allowed_kinds: Vec<MessageKind>,
    /// Kind used when teaching a newly unlocked chunk.
    pub teaching_kind: MessageKind,
    pub policy: ProgramPolicy,
}

impl AbstractionSettings {
    /// Informativeness weight 0.3 and free gestures, with the given utterance
    /// cost weight. The Instructor speaks without gestures, so program choice
    /// is driven by utterance cost alone.
    pub fn with_beta_u(beta_u: f64) -> Self {
        let sem = Semantics::new(0.87, 0.62).expect("valid semantics");
        AbstractionSettings {
            theta: Theta {
                beta_i: 0.3,
                beta_u,
                beta_h: 0.0,
                gamma: Theta::DEFAULT_GAMMA,
                sem,
            },
            allowed_kinds: vec![MessageKind::LanguageOnly],
            teaching_kind: MessageKind::Redundant,
            policy: ProgramPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub repetition: u32,
    pub tower: TowerId,
    pub program_index: usize,
    pub program_used: TowerProgram,
    pub message_kinds: Vec<MessageKind>,
    pub success: bool,
    pub program_length: usize,
    /// Number of sub-messages whose MAP decode was a tie.
    pub decode_ties: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_index: u64,
    pub seed: u64,
    pub theta: Theta,
    pub trials: Vec<TrialRecord>,
}

fn chunk_pairs(subs: &[SubMessage]) -> Vec<(SubMessage, Symbol)> {
    subs.iter()
        .filter(|s| s.uses_lexicon())
        .map(|s| (*s, s.intended()))
        .collect()
}

fn consensus_update(
    instructor: &mut AgentState,
    builder: &mut AgentState,
    pairs: &[(SubMessage, Symbol)],
    theta: &Theta,
) -> Result<(), AgentError> {
    instructor.belief = update_belief(&instructor.belief, pairs, UpdateSide::Instructor, theta)?;
    builder.belief = update_belief(&builder.belief, pairs, UpdateSide::Builder, theta)?;
    Ok(())
}

/// One trial for `tower` with programs `0..=unlocked` available. Returns the
/// record and the new unlocked index.
#[allow(clippy::too_many_arguments)]
pub fn run_trial<R: Rng + ?Sized>(
    instructor: &mut AgentState,
    builder: &mut AgentState,
    tower: TowerId,
    unlocked: usize,
    settings: &AbstractionSettings,
    repetition: u32,
    rng: &mut R,
) -> Result<(TrialRecord, usize), ConventionError> {
    let library = programs_for_tower(tower);
    if unlocked >= library.len() {
        return Err(ConventionError::InvalidUnlocked {
            tower,
            unlocked,
            available: library.len(),
        });
    }
    let theta = &settings.theta;
    let first = match settings.policy {
        ProgramPolicy::SoftmaxOverUnlocked => 0,
        ProgramPolicy::NewestOnly => unlocked,
    };

    let mut options: Vec<(usize, Message)> = Vec::new();
    let mut utilities = Vec::new();
    for (index, program) in library.iter().enumerate().take(unlocked + 1).skip(first) {
        for msg in
            message_candidates_with(program, &instructor.own_lexicon, &settings.allowed_kinds)
        {
            utilities.push(expected_message_utility(
                &msg,
                program,
                theta,
                &instructor.belief,
            )?);
            options.push((index, msg));
        }
    }
    let (program_index, message) = options.swap_remove(choose_index(&utilities, rng)?);
    let program = &library[program_index];

    let mut success = true;
    let mut decode_ties = 0;
    for sub in &message.subs {
        let space = sub.category().symbols();
        let dist = pragmatic_builder_distribution(sub, &space, &builder.belief, theta)?;
        let decoded = map_decode(&dist, &space);
        decode_ties += usize::from(decoded.tie);
        success &= decoded.symbol == sub.intended();
    }

    let mut next_unlocked = unlocked;
    if success {
        consensus_update(instructor, builder, &chunk_pairs(&message.subs), theta)?;
        if unlocked + 1 < library.len() {
            next_unlocked = unlocked + 1;
            let taught = &library[next_unlocked];
            let teaching: Vec<SubMessage> = taught
                .chunks()
                .map(|c| {
                    SubMessage::of_kind(settings.teaching_kind, c.into(), &instructor.own_lexicon)
                        .or_else(|| {
                            SubMessage::of_kind(
                                MessageKind::Redundant,
                                c.into(),
                                &instructor.own_lexicon,
                            )
                        })
                        .expect("chunks always have a redundant form")
                })
                .collect();
            consensus_update(instructor, builder, &chunk_pairs(&teaching), theta)?;
        }
    }

    let record = TrialRecord {
        repetition,
        tower,
        program_index,
        program_used: program.clone(),
        message_kinds: message.kinds(),
        success,
        program_length: program_length(program),
        decode_ties,
    };
    Ok((record, next_unlocked))
}

fn draw_lexicon<R: Rng + ?Sized>(rng: &mut R) -> crate::lexicon::Lexicon {
    lexicons()[rng.random_range(0..LEXICON_COUNT)]
}

/// One 12-trial run on its own random stream.
pub fn run_once(
    settings: &AbstractionSettings,
    seed: u64,
    run_index: u64,
) -> Result<RunResult, ConventionError> {
    let mut rng = stream_rng(seed, run_index);
    let mut instructor = AgentState::new(Role::Instructor, draw_lexicon(&mut rng));
    let mut builder = AgentState::new(Role::Builder, draw_lexicon(&mut rng));
    let mut unlocked = [0usize; 3];
    let mut trials = Vec::with_capacity(12);
    for repetition in 1..=REPETITIONS {
        let mut order = TowerId::ALL;
        order.shuffle(&mut rng);
        for tower in order {
            let slot = &mut unlocked[tower as usize];
            let (record, next) = run_trial(
                &mut instructor,
                &mut builder,
                tower,
                *slot,
                settings,
                repetition,
                &mut rng,
            )?;
            *slot = next;
            trials.push(record);
        }
    }
    Ok(RunResult {
        run_index,
        seed,
        theta: settings.theta,
        trials,
    })
}

/// Runs `n_runs` independent runs in parallel. Results are ordered by run
/// index and identical for a given seed regardless of thread count.
pub fn run_simulation1(
    settings: &AbstractionSettings,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<RunResult>, ConventionError> {
    if n_runs == 0 {
        return Err(ConventionError::NoRuns);
    }
    (0..n_runs as u64)
        .into_par_iter()
        .map(|i| run_once(settings, seed, i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionStats {
    pub repetition: u32,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

/// Mean and sample standard deviation of `values`.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Program length per repetition, pooled over towers and runs.
pub fn aggregate_lengths(results: &[RunResult]) -> Result<Vec<RepetitionStats>, ConventionError> {
    if results.iter().all(|r| r.trials.is_empty()) {
        return Err(ConventionError::EmptyInput);
    }
    let mut out = Vec::new();
    for repetition in 1..=REPETITIONS {
        let lengths: Vec<f64> = results
            .iter()
            .flat_map(|r| &r.trials)
            .filter(|t| t.repetition == repetition)
            .map(|t| t.program_length as f64)
            .collect();
        if lengths.is_empty() {
            continue;
        }
        let (mean, sd) = mean_sd(&lengths);
        out.push(RepetitionStats {
            repetition,
            mean,
            sd,
            n: lengths.len(),
        });
    }
    Ok(out)
}
