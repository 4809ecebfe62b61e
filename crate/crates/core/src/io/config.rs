//! Experiment configuration: TOML schema, defaults, command-line overrides
//! and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::agents::{MessageKind, Theta};
use crate::convention::{AbstractionSettings, ProgramPolicy};
use crate::dsl::Position;
use crate::lexicon::Semantics;
use crate::preference::{
    default_r1_target, placeholder_r4_targets, predicted_modality_distribution, FitLabel,
    FitTarget, ModalityDistribution, PositionAveraged, SinglePosition, UtilityHook, FIXED_BETA_I,
    MAX_BETA, MIN_X,
};

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{}: parse error{}{}: {message}", path.display(),
        line.map(|l| format!(" at line {l}")).unwrap_or_default(),
        field.as_ref().map(|f| format!(" in field `{f}`")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("cannot read {}: {message}", path.display())]
    Read { path: PathBuf, message: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    SimAbstraction,
    SimModality,
    Fit,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [
        Experiment::SimAbstraction,
        Experiment::SimModality,
        Experiment::Fit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::SimAbstraction => "sim-abstraction",
            Experiment::SimModality => "sim-modality",
            Experiment::Fit => "fit",
        }
    }

    fn default_runs(self) -> usize {
        match self {
            Experiment::SimAbstraction => 100,
            Experiment::SimModality => 200,
            Experiment::Fit => 1,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| ConfigError::invalid("experiment", format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(ConfigError::invalid(
                "format",
                format!("expected csv or json, got {other:?}"),
            )),
        }
    }
}

/// Which per-kind utility construction the modality experiments use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UtilityChoice {
    #[default]
    PositionAveraged,
    SinglePosition(Position),
}

impl UtilityChoice {
    pub fn hook(&self) -> Box<dyn UtilityHook> {
        match *self {
            UtilityChoice::PositionAveraged => Box::new(PositionAveraged),
            UtilityChoice::SinglePosition(p) => Box::new(SinglePosition(p)),
        }
    }
}

impl FromStr for UtilityChoice {
    type Err = ConfigError;

    /// `position_averaged` or `position R,C`, e.g. `position 1,1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "position_averaged" {
            return Ok(UtilityChoice::PositionAveraged);
        }
        let bad = || {
            ConfigError::invalid(
                "modality.utility",
                format!("expected position_averaged or `position R,C`, got {s:?}"),
            )
        };
        let rest = s.strip_prefix("position ").ok_or_else(bad)?;
        let (r, c) = rest.split_once(',').ok_or_else(bad)?;
        let row: u8 = r.trim().parse().map_err(|_| bad())?;
        let col: u8 = c.trim().parse().map_err(|_| bad())?;
        Position::new(row, col)
            .map(UtilityChoice::SinglePosition)
            .map_err(|_| bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractionConfig {
    /// One condition per value.
    pub beta_u: Vec<f64>,
    pub beta_i: f64,
    pub beta_h: f64,
    pub gamma: f64,
    pub x_u: f64,
    pub x_h: f64,
    pub allowed_kinds: Vec<MessageKind>,
    pub policy: ProgramPolicy,
}

impl Default for AbstractionConfig {
    fn default() -> Self {
        let base = AbstractionSettings::with_beta_u(1.0);
        AbstractionConfig {
            beta_u: vec![0.1, 0.5, 1.0],
            beta_i: base.theta.beta_i,
            beta_h: base.theta.beta_h,
            gamma: base.theta.gamma,
            x_u: base.theta.sem.x_u(),
            x_h: base.theta.sem.x_h(),
            allowed_kinds: base.allowed_kinds,
            policy: base.policy,
        }
    }
}

impl AbstractionConfig {
    pub fn settings(&self, beta_u: f64) -> AbstractionSettings {
        AbstractionSettings {
            theta: Theta {
                beta_i: self.beta_i,
                beta_u,
                beta_h: self.beta_h,
                gamma: self.gamma,
                sem: Semantics::new(self.x_u, self.x_h).expect("validated"),
            },
            allowed_kinds: self.allowed_kinds.clone(),
            policy: self.policy,
            ..AbstractionSettings::with_beta_u(beta_u)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalityCondition {
    pub name: String,
    /// Costs reached in the last repetition.
    pub beta_u: f64,
    pub beta_h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalityConfig {
    /// First-repetition parameters; semantics and `beta_i` stay fixed.
    pub r1: Theta,
    pub conditions: Vec<ModalityCondition>,
    pub messages_per_repetition: usize,
    pub utility: UtilityChoice,
}

impl Default for ModalityConfig {
    fn default() -> Self {
        ModalityConfig {
            r1: Theta {
                beta_i: FIXED_BETA_I,
                beta_u: 20.25,
                beta_h: 9.23,
                gamma: Theta::DEFAULT_GAMMA,
                sem: Semantics::new(0.87, 0.62).expect("valid"),
            },
            conditions: vec![
                ModalityCondition {
                    name: "PreferU".into(),
                    beta_u: 6.17,
                    beta_h: 10.15,
                },
                ModalityCondition {
                    name: "PreferH".into(),
                    beta_u: 21.01,
                    beta_h: 3.09,
                },
            ],
            messages_per_repetition: 9,
            utility: UtilityChoice::default(),
        }
    }
}

impl ModalityCondition {
    pub fn theta_r4(&self, r1: &Theta) -> Theta {
        r1.with_costs(self.beta_u, self.beta_h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub n_init: usize,
    pub n_iter: usize,
    pub beta_i: f64,
    pub targets: Vec<FitTarget>,
    pub utility: UtilityChoice,
}

impl Default for FitConfig {
    fn default() -> Self {
        let mut targets = vec![default_r1_target()];
        targets.extend(placeholder_r4_targets());
        FitConfig {
            n_init: 40,
            n_iter: 200,
            beta_i: FIXED_BETA_I,
            targets,
            utility: UtilityChoice::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub n_runs: usize,
    pub output_path: PathBuf,
    pub format: OutputFormat,
    pub abstraction: AbstractionConfig,
    pub modality: ModalityConfig,
    pub fit: FitConfig,
}

impl SimConfig {
    pub fn default_for(experiment: Experiment) -> Self {
        SimConfig {
            experiment,
            seed: DEFAULT_SEED,
            n_runs: experiment.default_runs(),
            output_path: default_output(experiment, OutputFormat::Csv),
            format: OutputFormat::Csv,
            abstraction: AbstractionConfig::default(),
            modality: ModalityConfig::default(),
            fit: FitConfig::default(),
        }
    }

    /// Checks every documented bound.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_runs == 0 {
            return Err(ConfigError::invalid("n_runs", "must be at least 1"));
        }
        let a = &self.abstraction;
        if a.beta_u.is_empty() {
            return Err(ConfigError::invalid(
                "abstraction.beta_u",
                "needs at least one value",
            ));
        }
        for &b in &a.beta_u {
            check_beta("abstraction.beta_u", b)?;
        }
        check_beta("abstraction.beta_i", a.beta_i)?;
        check_beta("abstraction.beta_h", a.beta_h)?;
        check_unit("abstraction.gamma", a.gamma, 0.0)?;
        check_unit("abstraction.x_u", a.x_u, MIN_X)?;
        check_unit("abstraction.x_h", a.x_h, MIN_X)?;
        if a.allowed_kinds.is_empty() {
            return Err(ConfigError::invalid(
                "abstraction.allowed_kinds",
                "needs at least one kind",
            ));
        }

        let m = &self.modality;
        check_theta("modality.r1", &m.r1)?;
        if m.conditions.is_empty() {
            return Err(ConfigError::invalid(
                "modality.conditions",
                "needs at least one condition",
            ));
        }
        for c in &m.conditions {
            check_beta(&format!("modality.conditions.{}.beta_u", c.name), c.beta_u)?;
            check_beta(&format!("modality.conditions.{}.beta_h", c.name), c.beta_h)?;
        }
        if m.messages_per_repetition == 0 {
            return Err(ConfigError::invalid(
                "modality.messages_per_repetition",
                "must be at least 1",
            ));
        }

        let f = &self.fit;
        if f.n_init == 0 || f.n_iter < f.n_init {
            return Err(ConfigError::invalid(
                "fit.n_iter",
                "need 1 <= n_init <= n_iter",
            ));
        }
        check_beta("fit.beta_i", f.beta_i)?;
        if self.experiment == Experiment::Fit && f.targets.is_empty() {
            return Err(ConfigError::invalid(
                "fit.targets",
                "needs at least one target",
            ));
        }
        Ok(())
    }
}

fn default_output(experiment: Experiment, format: OutputFormat) -> PathBuf {
    PathBuf::from("results").join(format!("{}.{}", experiment.as_str(), format.extension()))
}

fn check_beta(field: &str, v: f64) -> Result<(), ConfigError> {
    if !(0.0..=MAX_BETA).contains(&v) {
        return Err(ConfigError::invalid(
            field,
            format!("{v} is outside [0, {MAX_BETA}]"),
        ));
    }
    Ok(())
}

fn check_unit(field: &str, v: f64, lower: f64) -> Result<(), ConfigError> {
    if !(lower..=1.0).contains(&v) {
        return Err(ConfigError::invalid(
            field,
            format!("{v} is outside [{lower}, 1]"),
        ));
    }
    Ok(())
}

fn check_theta(prefix: &str, t: &Theta) -> Result<(), ConfigError> {
    check_beta(&format!("{prefix}.beta_i"), t.beta_i)?;
    check_beta(&format!("{prefix}.beta_u"), t.beta_u)?;
    check_beta(&format!("{prefix}.beta_h"), t.beta_h)?;
    check_unit(&format!("{prefix}.gamma"), t.gamma, 0.0)?;
    check_unit(&format!("{prefix}.x_u"), t.sem.x_u(), MIN_X)?;
    check_unit(&format!("{prefix}.x_h"), t.sem.x_h(), MIN_X)
}

/// Values given on the command line; each replaces the matching config key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub beta_u: Option<Vec<f64>>,
    pub beta_h: Option<f64>,
    pub beta_i: Option<f64>,
    pub gamma: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl SimConfig {
    /// Applies `o`. For `sim-abstraction` the cost weights replace the
    /// abstraction block (several `beta_u` values give several conditions);
    /// for `sim-modality` they replace the first-repetition parameters; `fit`
    /// accepts only `beta_i`, which replaces the fixed informativeness weight.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(runs) = o.runs {
            self.n_runs = runs;
        }
        let format_changed = o.format.is_some_and(|f| f != self.format);
        if let Some(format) = o.format {
            self.format = format;
        }
        if let Some(out) = &o.out {
            self.output_path = out.clone();
        } else if format_changed {
            self.output_path.set_extension(self.format.extension());
        }
        match self.experiment {
            Experiment::SimAbstraction => {
                let a = &mut self.abstraction;
                if let Some(b) = &o.beta_u {
                    a.beta_u = b.clone();
                }
                a.beta_h = o.beta_h.unwrap_or(a.beta_h);
                a.beta_i = o.beta_i.unwrap_or(a.beta_i);
                a.gamma = o.gamma.unwrap_or(a.gamma);
            }
            Experiment::SimModality => {
                let r1 = &mut self.modality.r1;
                if let Some(b) = &o.beta_u {
                    match b.as_slice() {
                        [v] => r1.beta_u = *v,
                        _ => {
                            return Err(ConfigError::invalid(
                                "beta_u",
                                "sim-modality takes a single value",
                            ))
                        }
                    }
                }
                r1.beta_h = o.beta_h.unwrap_or(r1.beta_h);
                r1.beta_i = o.beta_i.unwrap_or(r1.beta_i);
                r1.gamma = o.gamma.unwrap_or(r1.gamma);
            }
            Experiment::Fit => {
                if o.beta_u.is_some() || o.beta_h.is_some() {
                    return Err(ConfigError::invalid(
                        "beta_u",
                        "fit estimates the cost weights; they cannot be set",
                    ));
                }
                self.fit.beta_i = o.beta_i.unwrap_or(self.fit.beta_i);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<String>,
    seed: Option<u64>,
    n_runs: Option<i64>,
    output_path: Option<PathBuf>,
    format: Option<String>,
    abstraction: Option<RawAbstraction>,
    modality: Option<RawModality>,
    fit: Option<RawFit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAbstraction {
    beta_u: Option<BetaList>,
    beta_i: Option<f64>,
    beta_h: Option<f64>,
    gamma: Option<f64>,
    x_u: Option<f64>,
    x_h: Option<f64>,
    allowed_kinds: Option<Vec<String>>,
    program_policy: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BetaList {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTheta {
    beta_i: Option<f64>,
    beta_u: Option<f64>,
    beta_h: Option<f64>,
    gamma: Option<f64>,
    x_u: Option<f64>,
    x_h: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModality {
    r1: Option<RawTheta>,
    conditions: Option<Vec<RawCondition>>,
    messages_per_repetition: Option<i64>,
    utility: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCondition {
    name: String,
    beta_u: f64,
    beta_h: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    n_init: Option<i64>,
    n_iter: Option<i64>,
    beta_i: Option<f64>,
    utility: Option<String>,
    targets: Option<Vec<RawTarget>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    label: String,
    observed: Option<RawDistribution>,
    theta: Option<RawTheta>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    redundant: f64,
    language_only: f64,
    complementary: f64,
}

fn count(field: &str, v: i64) -> Result<usize, ConfigError> {
    usize::try_from(v)
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| ConfigError::invalid(field, format!("must be at least 1, got {v}")))
}

fn parse_kind(s: &str) -> Result<MessageKind, ConfigError> {
    MessageKind::ALL
        .into_iter()
        .find(|k| k.label() == s)
        .ok_or_else(|| {
            ConfigError::invalid("abstraction.allowed_kinds", format!("unknown kind {s:?}"))
        })
}

fn parse_policy(s: &str) -> Result<ProgramPolicy, ConfigError> {
    match s {
        "softmax_over_unlocked" => Ok(ProgramPolicy::SoftmaxOverUnlocked),
        "newest_only" => Ok(ProgramPolicy::NewestOnly),
        other => Err(ConfigError::invalid(
            "abstraction.program_policy",
            format!("expected softmax_over_unlocked or newest_only, got {other:?}"),
        )),
    }
}

fn merge_theta(field: &str, base: Theta, raw: &RawTheta) -> Result<Theta, ConfigError> {
    let x_u = raw.x_u.unwrap_or(base.sem.x_u());
    let x_h = raw.x_h.unwrap_or(base.sem.x_h());
    check_unit(&format!("{field}.x_u"), x_u, MIN_X)?;
    check_unit(&format!("{field}.x_h"), x_h, MIN_X)?;
    Ok(Theta {
        beta_i: raw.beta_i.unwrap_or(base.beta_i),
        beta_u: raw.beta_u.unwrap_or(base.beta_u),
        beta_h: raw.beta_h.unwrap_or(base.beta_h),
        gamma: raw.gamma.unwrap_or(base.gamma),
        sem: Semantics::new(x_u, x_h).expect("checked above"),
    })
}

fn parse_error(path: &Path, text: &str, err: toml::de::Error) -> ConfigError {
    let (line, field) = match err.span() {
        Some(span) => {
            let start = span.start.min(text.len());
            let line_no = text[..start].matches('\n').count() + 1;
            let line_text = text.lines().nth(line_no - 1).unwrap_or("");
            let field = line_text
                .split_once('=')
                .map(|(k, _)| k.trim().to_string())
                .filter(|k| !k.is_empty() && !k.starts_with('['));
            (Some(line_no), field)
        }
        None => (None, None),
    };
    ConfigError::Parse {
        path: path.to_path_buf(),
        line,
        field,
        message: err.message().trim().to_string(),
    }
}

/// Parses configuration text. Returns the validated config and any warnings
/// (such as renormalized targets).
pub fn parse_config(text: &str, path: &Path) -> Result<(SimConfig, Vec<String>), ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(path, text, e))?;
    let experiment: Experiment = raw
        .experiment
        .as_deref()
        .ok_or_else(|| ConfigError::invalid("experiment", "is required"))?
        .parse()?;
    let mut cfg = SimConfig::default_for(experiment);
    let mut warnings = Vec::new();

    if let Some(seed) = raw.seed {
        cfg.seed = seed;
    }
    if let Some(n) = raw.n_runs {
        cfg.n_runs = count("n_runs", n)?;
    }
    if let Some(format) = raw.format {
        cfg.format = format.parse()?;
        cfg.output_path = default_output(experiment, cfg.format);
    }
    if let Some(p) = raw.output_path {
        cfg.output_path = p;
    }

    if let Some(a) = raw.abstraction {
        let c = &mut cfg.abstraction;
        match a.beta_u {
            Some(BetaList::One(v)) => c.beta_u = vec![v],
            Some(BetaList::Many(v)) => c.beta_u = v,
            None => {}
        }
        c.beta_i = a.beta_i.unwrap_or(c.beta_i);
        c.beta_h = a.beta_h.unwrap_or(c.beta_h);
        c.gamma = a.gamma.unwrap_or(c.gamma);
        c.x_u = a.x_u.unwrap_or(c.x_u);
        c.x_h = a.x_h.unwrap_or(c.x_h);
        if let Some(kinds) = a.allowed_kinds {
            c.allowed_kinds = kinds
                .iter()
                .map(|k| parse_kind(k))
                .collect::<Result<_, _>>()?;
        }
        if let Some(p) = a.program_policy {
            c.policy = parse_policy(&p)?;
        }
    }

    if let Some(m) = raw.modality {
        let c = &mut cfg.modality;
        if let Some(r1) = &m.r1 {
            c.r1 = merge_theta("modality.r1", c.r1, r1)?;
        }
        if let Some(conds) = m.conditions {
            c.conditions = conds
                .into_iter()
                .map(|r| ModalityCondition {
                    name: r.name,
                    beta_u: r.beta_u,
                    beta_h: r.beta_h,
                })
                .collect();
        }
        if let Some(n) = m.messages_per_repetition {
            c.messages_per_repetition = count("modality.messages_per_repetition", n)?;
        }
        if let Some(u) = m.utility {
            c.utility = u.parse()?;
        }
    }

    if let Some(f) = raw.fit {
        let c = &mut cfg.fit;
        if let Some(n) = f.n_init {
            c.n_init = count("fit.n_init", n)?;
        }
        if let Some(n) = f.n_iter {
            c.n_iter = count("fit.n_iter", n)?;
        }
        c.beta_i = f.beta_i.unwrap_or(c.beta_i);
        if let Some(u) = f.utility {
            c.utility = u.parse()?;
        }
        if let Some(targets) = f.targets {
            c.targets = targets
                .into_iter()
                .enumerate()
                .map(|(i, t)| load_target(i, t, c.beta_i, &mut warnings))
                .collect::<Result<_, _>>()?;
        }
    }

    cfg.validate()?;
    Ok((cfg, warnings))
}

fn load_target(
    index: usize,
    raw: RawTarget,
    beta_i: f64,
    warnings: &mut Vec<String>,
) -> Result<FitTarget, ConfigError> {
    let field = format!("fit.targets[{index}]");
    let label: FitLabel = raw
        .label
        .parse()
        .map_err(|e: crate::preference::PreferenceError| {
            ConfigError::invalid(format!("{field}.label"), e.to_string())
        })?;
    let observed = match (raw.observed, raw.theta) {
        (Some(o), None) => {
            let (dist, total) =
                ModalityDistribution::normalized(o.redundant, o.language_only, o.complementary)
                    .map_err(|e| {
                        ConfigError::invalid(format!("{field}.observed"), e.to_string())
                    })?;
            if (total - 1.0).abs() > 1e-9 {
                let msg = format!(
                    "{field} ({label}): observed proportions sum to {total}; renormalized to ({:.4}, {:.4}, {:.4})",
                    dist.p_r, dist.p_u, dist.p_c
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
            dist
        }
        (None, Some(t)) => {
            let base = Theta {
                beta_i,
                ..SimConfig::default_for(Experiment::Fit).modality.r1
            };
            let theta = merge_theta(&format!("{field}.theta"), base, &t)?;
            check_theta(&format!("{field}.theta"), &theta)?;
            predicted_modality_distribution(&theta)
                .map_err(|e| ConfigError::invalid(format!("{field}.theta"), e.to_string()))?
        }
        _ => {
            return Err(ConfigError::invalid(
                field,
                "give exactly one of `observed` or `theta`",
            ));
        }
    };
    Ok(FitTarget { label, observed })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<(SimConfig, Vec<String>), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&text, path)
}
