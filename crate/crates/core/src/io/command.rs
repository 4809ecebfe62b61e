//! Experiment dispatch: runs the configured experiment, collects result rows
//! and writes them.

use std::path::PathBuf;

use thiserror::Error;

use super::config::{ConfigError, Experiment, SimConfig};
use super::output::{write_results, OutputError, OutputRow};
use crate::agents::MessageKind;
use crate::convention::{aggregate_lengths, run_simulation1, ConventionError};
use crate::optim::LhsNelderMead;
use crate::preference::{
    fit_target, simulate_modality_preferences, FitLabel, FitSpace, ModalitySettings,
    PreferenceError,
};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Convention(#[from] ConventionError),
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl CommandError {
    /// 1 for invalid input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandReport {
    pub rows: Vec<OutputRow>,
    /// One line per condition.
    pub summary: Vec<String>,
    pub output_path: PathBuf,
}

fn row(
    experiment: Experiment,
    condition: &str,
    repetition: u32,
    metric: &str,
    value: f64,
    n: usize,
    sd: f64,
) -> OutputRow {
    OutputRow {
        experiment: experiment.as_str().to_string(),
        condition: condition.to_string(),
        repetition,
        metric: metric.to_string(),
        value,
        n,
        sd,
    }
}

fn abstraction_rows(cfg: &SimConfig) -> Result<(Vec<OutputRow>, Vec<String>), CommandError> {
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &beta_u in &cfg.abstraction.beta_u {
        let condition = format!("beta_u={beta_u}");
        let runs = run_simulation1(&cfg.abstraction.settings(beta_u), cfg.n_runs, cfg.seed)?;
        let stats = aggregate_lengths(&runs)?;
        let trail: Vec<String> = stats
            .iter()
            .map(|s| format!("R{} {:.3}", s.repetition, s.mean))
            .collect();
        summary.push(format!(
            "{condition}: mean program length {} ({} runs)",
            trail.join(", "),
            cfg.n_runs
        ));
        for s in stats {
            rows.push(row(
                cfg.experiment,
                &condition,
                s.repetition,
                "program_length",
                s.mean,
                s.n,
                s.sd,
            ));
        }
    }
    Ok((rows, summary))
}

fn modality_rows(cfg: &SimConfig) -> Result<(Vec<OutputRow>, Vec<String>), CommandError> {
    let m = &cfg.modality;
    let hook = m.utility.hook();
    let settings = ModalitySettings {
        messages_per_repetition: m.messages_per_repetition,
        hook: hook.as_ref(),
    };
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for cond in &m.conditions {
        let stats = simulate_modality_preferences(
            &m.r1,
            &cond.theta_r4(&m.r1),
            cfg.n_runs,
            cfg.seed,
            &settings,
        )?;
        for s in &stats {
            for kind in [
                MessageKind::Redundant,
                MessageKind::LanguageOnly,
                MessageKind::Complementary,
            ] {
                rows.push(row(
                    cfg.experiment,
                    &cond.name,
                    s.repetition,
                    kind.label(),
                    s.mean.get(kind),
                    s.n,
                    s.sd.get(kind),
                ));
            }
        }
        let (first, last) = (stats[0].mean, stats[stats.len() - 1].mean);
        summary.push(format!(
            "{}: redundant {:.3} -> {:.3}, language_only {:.3} -> {:.3}, complementary {:.3} -> {:.3} ({} runs)",
            cond.name, first.p_r, last.p_r, first.p_u, last.p_u, first.p_c, last.p_c, cfg.n_runs
        ));
    }
    Ok((rows, summary))
}

fn fit_rows(cfg: &SimConfig) -> Result<(Vec<OutputRow>, Vec<String>), CommandError> {
    let f = &cfg.fit;
    let hook = f.utility.hook();
    let minimizer = LhsNelderMead::default();
    let base = crate::preference::fit_base();
    let base = crate::agents::Theta {
        beta_i: f.beta_i,
        ..base
    };
    // The first-repetition fit fixes the semantics used for the others.
    let mut ordered: Vec<_> = f.targets.iter().enumerate().collect();
    ordered.sort_by_key(|(i, t)| (t.label != FitLabel::R1, *i));
    let mut r1_sem = None;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (index, target) in ordered {
        let (space, base) = match (target.label, r1_sem) {
            (FitLabel::R1, _) | (_, None) => (FitSpace::Full, base),
            (_, Some(sem)) => (FitSpace::CostsOnly, crate::agents::Theta { sem, ..base }),
        };
        let seed = cfg.seed.wrapping_add(index as u64);
        let fit = fit_target(
            target,
            &base,
            space,
            hook.as_ref(),
            &minimizer,
            f.n_init,
            f.n_iter,
            seed,
        )?;
        if target.label == FitLabel::R1 && r1_sem.is_none() {
            r1_sem = Some(fit.best_theta.sem);
        }
        let repetition = if target.label == FitLabel::R1 { 1 } else { 4 };
        let n = fit.record.evaluations.len();
        let t = &fit.best_theta;
        let condition = target.label.as_str();
        for (metric, value) in [
            ("best_theta.beta_i", t.beta_i),
            ("best_theta.beta_u", t.beta_u),
            ("best_theta.beta_h", t.beta_h),
            ("best_theta.x_u", t.sem.x_u()),
            ("best_theta.x_h", t.sem.x_h()),
            ("best_loss", fit.best_loss),
            ("target_entropy", fit.target_entropy),
            ("predicted.redundant", fit.predicted.p_r),
            ("predicted.language_only", fit.predicted.p_u),
            ("predicted.complementary", fit.predicted.p_c),
        ] {
            rows.push(row(
                cfg.experiment,
                condition,
                repetition,
                metric,
                value,
                n,
                0.0,
            ));
        }
        summary.push(format!(
            "{condition}: cross-entropy {:.4} (target entropy {:.4}) at beta_u={:.2} beta_h={:.2} x_u={:.3} x_h={:.3}",
            fit.best_loss,
            fit.target_entropy,
            t.beta_u,
            t.beta_h,
            t.sem.x_u(),
            t.sem.x_h()
        ));
    }
    Ok((rows, summary))
}

/// Produces the result rows and summary lines without writing anything.
pub fn run_experiment(cfg: &SimConfig) -> Result<(Vec<OutputRow>, Vec<String>), CommandError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::SimAbstraction => abstraction_rows(cfg),
        Experiment::SimModality => modality_rows(cfg),
        Experiment::Fit => fit_rows(cfg),
    }
}

/// Runs the experiment and writes its rows to the configured path.
pub fn run_command(cfg: &SimConfig) -> Result<CommandReport, CommandError> {
    let (rows, summary) = run_experiment(cfg)?;
    write_results(&rows, &cfg.output_path, cfg.format)?;
    Ok(CommandReport {
        rows,
        summary,
        output_path: cfg.output_path.clone(),
    })
}
