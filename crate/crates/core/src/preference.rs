//! Modality preferences for block-position instructions: predicted message-kind
//! distributions, cross-entropy against observed proportions, simulated
//! trajectories across repetitions, and parameter fitting.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agents::{
    choose_index, literal_builder_distribution, softmax, weighted_ln, AgentError, MessageKind,
    SubMessage, Theta,
};
use crate::dsl::{Position, Symbol, SymbolKind};
use crate::lexicon::{Lexicon, Semantics};
use crate::optim::{Bounds, Minimizer, OptRecord, OptimError};
use crate::rng::stream_rng;

/// Predicted probabilities are floored here before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;
pub const FIXED_BETA_I: f64 = 10.0;
pub const MAX_BETA: f64 = 40.0;
pub const MIN_X: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreferenceError {
    #[error("invalid modality distribution ({p_r}, {p_u}, {p_c}): {reason}")]
    InvalidDistribution {
        p_r: f64,
        p_u: f64,
        p_c: f64,
        reason: &'static str,
    },
    #[error("unknown fit target label {0:?}")]
    UnknownLabel(String),
    #[error("at least one run is required")]
    NoRuns,
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Optim(#[from] OptimError),
}

/// Proportions of redundant, language-only and complementary messages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalityDistribution {
    pub p_r: f64,
    pub p_u: f64,
    pub p_c: f64,
}

impl ModalityDistribution {
    pub fn new(p_r: f64, p_u: f64, p_c: f64) -> Result<Self, PreferenceError> {
        let invalid = |reason| PreferenceError::InvalidDistribution {
            p_r,
            p_u,
            p_c,
            reason,
        };
        if [p_r, p_u, p_c].iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid("entries must be finite and non-negative"));
        }
        if (p_r + p_u + p_c - 1.0).abs() > 1e-9 {
            return Err(invalid("entries must sum to 1"));
        }
        Ok(ModalityDistribution { p_r, p_u, p_c })
    }

    /// Divides by the total. Returns the distribution and the original sum.
    pub fn normalized(p_r: f64, p_u: f64, p_c: f64) -> Result<(Self, f64), PreferenceError> {
        let total = p_r + p_u + p_c;
        if [p_r, p_u, p_c].iter().any(|p| !p.is_finite() || *p < 0.0)
            || total.is_nan()
            || total <= 0.0
        {
            return Err(PreferenceError::InvalidDistribution {
                p_r,
                p_u,
                p_c,
                reason: "entries must be finite, non-negative and not all zero",
            });
        }
        Ok((
            ModalityDistribution {
                p_r: p_r / total,
                p_u: p_u / total,
                p_c: p_c / total,
            },
            total,
        ))
    }

    pub fn get(&self, kind: MessageKind) -> f64 {
        match kind {
            MessageKind::Redundant => self.p_r,
            MessageKind::LanguageOnly => self.p_u,
            MessageKind::Complementary => self.p_c,
        }
    }

    /// Ordered as [`MessageKind::ALL`].
    pub fn as_array(&self) -> [f64; 3] {
        MessageKind::ALL.map(|k| self.get(k))
    }

    fn from_array(p: [f64; 3]) -> Self {
        let mut d = ModalityDistribution {
            p_r: 0.0,
            p_u: 0.0,
            p_c: 0.0,
        };
        for (k, v) in MessageKind::ALL.into_iter().zip(p) {
            match k {
                MessageKind::Redundant => d.p_r = v,
                MessageKind::LanguageOnly => d.p_u = v,
                MessageKind::Complementary => d.p_c = v,
            }
        }
        d
    }

    /// Shannon entropy in nats, with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .as_array()
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitLabel {
    R1,
    R4PreferU,
    R4PreferH,
}

impl FitLabel {
    pub const ALL: [FitLabel; 3] = [FitLabel::R1, FitLabel::R4PreferU, FitLabel::R4PreferH];

    pub fn as_str(self) -> &'static str {
        match self {
            FitLabel::R1 => "R1",
            FitLabel::R4PreferU => "R4_PreferU",
            FitLabel::R4PreferH => "R4_PreferH",
        }
    }
}

impl fmt::Display for FitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FitLabel {
    type Err = PreferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FitLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| PreferenceError::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitTarget {
    pub label: FitLabel,
    pub observed: ModalityDistribution,
}

/// Observed block-position proportions in the first repetition
/// (redundant 0.81, complementary 0.06, language-only 0.12), renormalized.
pub fn default_r1_target() -> FitTarget {
    let (observed, _) = ModalityDistribution::normalized(0.81, 0.12, 0.06).expect("valid");
    FitTarget {
        label: FitLabel::R1,
        observed,
    }
}

/// Directional stand-ins for the last-repetition group targets. These are not
/// measured values; supply real targets through configuration.
pub fn placeholder_r4_targets() -> [FitTarget; 2] {
    let prefer_u = ModalityDistribution::new(0.45, 0.50, 0.05).expect("valid");
    let prefer_h = ModalityDistribution::new(0.40, 0.10, 0.50).expect("valid");
    [
        FitTarget {
            label: FitLabel::R4PreferU,
            observed: prefer_u,
        },
        FitTarget {
            label: FitLabel::R4PreferH,
            observed: prefer_h,
        },
    ]
}

/// `-sum obs_k ln max(pred_k, 1e-12)`.
pub fn cross_entropy(obs: &ModalityDistribution, pred: &ModalityDistribution) -> f64 {
    obs.as_array()
        .iter()
        .zip(pred.as_array())
        .filter(|(o, _)| **o > 0.0)
        .map(|(o, p)| -o * p.max(PROB_FLOOR).ln())
        .sum()
}

/// Utility of a position sub-message: `beta_i ln P_B0 - beta_u C_u - beta_h C_h`.
/// The block half of a block-position step is the same for every kind and so
/// drops out of the softmax.
pub fn position_step_utility(sub: &SubMessage, theta: &Theta) -> Result<f64, AgentError> {
    let space = SymbolKind::Position.symbols();
    let dist = literal_builder_distribution(sub, &space, theta.sem, &Lexicon::IDENTITY)?;
    let at = space
        .iter()
        .position(|&s| s == sub.intended())
        .expect("position in space");
    Ok(weighted_ln(theta.beta_i, dist[at])
        - theta.beta_u * sub.utterance_cost()
        - theta.beta_h * sub.gesture_cost())
}

/// Per-kind utilities, ordered as [`MessageKind::ALL`], for a representative
/// block-position instruction.
pub trait UtilityHook: Sync {
    fn kind_utilities(&self, theta: &Theta) -> Result<[f64; 3], AgentError>;
}

fn kind_utilities_at(p: Position, theta: &Theta) -> Result<[f64; 3], AgentError> {
    let mut out = [0.0; 3];
    for (slot, kind) in out.iter_mut().zip(MessageKind::ALL) {
        let sub = SubMessage::of_kind(kind, Symbol::Position(p), &Lexicon::IDENTITY)
            .expect("every kind can express a position");
        *slot = position_step_utility(&sub, theta)?;
    }
    Ok(out)
}

/// Utilities averaged over all nine target positions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PositionAveraged;

impl UtilityHook for PositionAveraged {
    fn kind_utilities(&self, theta: &Theta) -> Result<[f64; 3], AgentError> {
        let mut total = [0.0; 3];
        for p in Position::all() {
            let u = kind_utilities_at(p, theta)?;
            total.iter_mut().zip(u).for_each(|(t, v)| *t += v);
        }
        Ok(total.map(|t| t / 9.0))
    }
}

/// Utilities for one fixed target position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SinglePosition(pub Position);

impl UtilityHook for SinglePosition {
    fn kind_utilities(&self, theta: &Theta) -> Result<[f64; 3], AgentError> {
        kind_utilities_at(self.0, theta)
    }
}

pub fn predicted_with(
    hook: &dyn UtilityHook,
    theta: &Theta,
) -> Result<ModalityDistribution, AgentError> {
    let u = hook.kind_utilities(theta)?;
    let p = softmax(&u)?;
    Ok(ModalityDistribution::from_array([p[0], p[1], p[2]]))
}

/// Softmax over position-averaged per-kind utilities.
pub fn predicted_modality_distribution(theta: &Theta) -> Result<ModalityDistribution, AgentError> {
    predicted_with(&PositionAveraged, theta)
}

/// Costs at repetition `r` (1..=4), linear between the two endpoints. All
/// other parameters come from `theta_r1`.
pub fn interpolate_theta(theta_r1: &Theta, theta_r4: &Theta, repetition: u32) -> Theta {
    let w = (f64::from(repetition.clamp(1, 4)) - 1.0) / 3.0;
    let lerp = |a: f64, b: f64| a + (b - a) * w;
    Theta {
        beta_u: lerp(theta_r1.beta_u, theta_r4.beta_u),
        beta_h: lerp(theta_r1.beta_h, theta_r4.beta_h),
        ..*theta_r1
    }
}

#[derive(Clone, Copy)]
pub struct ModalitySettings<'a> {
    /// Block-position instructions sampled per run and repetition.
    pub messages_per_repetition: usize,
    pub hook: &'a dyn UtilityHook,
}

impl Default for ModalitySettings<'_> {
    fn default() -> Self {
        ModalitySettings {
            messages_per_repetition: 9,
            hook: &PositionAveraged,
        }
    }
}

impl fmt::Debug for ModalitySettings<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModalitySettings")
            .field("messages_per_repetition", &self.messages_per_repetition)
            .finish_non_exhaustive()
    }
}

/// Per-repetition statistics of sampled kind proportions across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionModality {
    pub repetition: u32,
    pub mean: ModalityDistribution,
    /// Standard deviation across runs, per kind.
    pub sd: ModalityDistribution,
    pub n: usize,
}

fn sample_run<R: Rng + ?Sized>(
    utilities: &[[f64; 3]; 4],
    messages: usize,
    rng: &mut R,
) -> Result<[[f64; 3]; 4], AgentError> {
    let mut out = [[0.0; 3]; 4];
    for (row, u) in out.iter_mut().zip(utilities) {
        for _ in 0..messages {
            row[choose_index(u, rng)?] += 1.0;
        }
        row.iter_mut().for_each(|c| *c /= messages as f64);
    }
    Ok(out)
}

/// Simulates `n_runs` dyads whose costs move from `theta_r1` to `theta_r4`
/// over four repetitions. Deterministic given `seed`.
pub fn simulate_modality_preferences(
    theta_r1: &Theta,
    theta_r4: &Theta,
    n_runs: usize,
    seed: u64,
    settings: &ModalitySettings<'_>,
) -> Result<Vec<RepetitionModality>, PreferenceError> {
    if n_runs == 0 || settings.messages_per_repetition == 0 {
        return Err(PreferenceError::NoRuns);
    }
    let mut utilities = [[0.0; 3]; 4];
    for (r, u) in utilities.iter_mut().enumerate() {
        *u = settings
            .hook
            .kind_utilities(&interpolate_theta(theta_r1, theta_r4, r as u32 + 1))?;
    }
    let runs = (0..n_runs as u64)
        .into_par_iter()
        .map(|i| {
            sample_run(
                &utilities,
                settings.messages_per_repetition,
                &mut stream_rng(seed, i),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n = n_runs as f64;
    let stats = (0..4)
        .map(|r| {
            let mut mean = [0.0; 3];
            let mut sd = [0.0; 3];
            for k in 0..3 {
                mean[k] = runs.iter().map(|run| run[r][k]).sum::<f64>() / n;
                if n_runs > 1 {
                    let var = runs
                        .iter()
                        .map(|run| (run[r][k] - mean[k]).powi(2))
                        .sum::<f64>()
                        / (n - 1.0);
                    sd[k] = var.sqrt();
                }
            }
            RepetitionModality {
                repetition: r as u32 + 1,
                mean: ModalityDistribution::from_array(mean),
                sd: ModalityDistribution::from_array(sd),
                n: n_runs,
            }
        })
        .collect();
    Ok(stats)
}

/// Which parameters a fit may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSpace {
    /// `beta_u, beta_h, x_u, x_h`.
    Full,
    /// `beta_u, beta_h`, with the semantics taken from the base parameters.
    CostsOnly,
}

impl FitSpace {
    pub fn bounds(self) -> Bounds {
        let costs = [(0.0, MAX_BETA), (0.0, MAX_BETA)];
        match self {
            FitSpace::Full => Bounds::new(&[costs[0], costs[1], (MIN_X, 1.0), (MIN_X, 1.0)]),
            FitSpace::CostsOnly => Bounds::new(&costs),
        }
        .expect("static bounds are valid")
    }

    /// Parameters for a point in this space; `base` supplies the rest.
    pub fn theta(self, x: &[f64], base: &Theta) -> Theta {
        let sem = match self {
            FitSpace::Full => Semantics::new(x[2], x[3]).expect("point inside bounds"),
            FitSpace::CostsOnly => base.sem,
        };
        Theta {
            beta_u: x[0],
            beta_h: x[1],
            sem,
            ..*base
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub label: FitLabel,
    pub best_theta: Theta,
    pub best_loss: f64,
    pub target_entropy: f64,
    pub predicted: ModalityDistribution,
    pub record: OptRecord,
}

/// Fits `target` by minimizing cross-entropy over `space`.
#[allow(clippy::too_many_arguments)]
pub fn fit_target(
    target: &FitTarget,
    base: &Theta,
    space: FitSpace,
    hook: &dyn UtilityHook,
    minimizer: &dyn Minimizer,
    n_init: usize,
    n_iter: usize,
    seed: u64,
) -> Result<FitResult, PreferenceError> {
    let observed = target.observed;
    let loss = move |x: &[f64]| match predicted_with(hook, &space.theta(x, base)) {
        Ok(pred) => cross_entropy(&observed, &pred),
        Err(_) => f64::NAN,
    };
    let record = minimizer.minimize(&loss, &space.bounds(), n_init, n_iter, seed)?;
    let best_theta = space.theta(&record.best_point, base);
    Ok(FitResult {
        label: target.label,
        best_theta,
        best_loss: record.best_loss,
        target_entropy: observed.entropy(),
        predicted: predicted_with(hook, &best_theta)?,
        record,
    })
}

/// Base parameters for fitting: `beta_i` fixed at 10.
pub fn fit_base() -> Theta {
    Theta {
        beta_i: FIXED_BETA_I,
        beta_u: 0.0,
        beta_h: 0.0,
        gamma: Theta::DEFAULT_GAMMA,
        sem: Semantics::new(0.87, 0.62).expect("valid"),
    }
}
