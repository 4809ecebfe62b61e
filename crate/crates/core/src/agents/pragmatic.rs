//! Pragmatic speaker/Builder pair and the consensus belief updates.
//!
//! The pragmatic Instructor `I1` picks each channel by a softmax over the
//! signals its category offers, scoring a signal by
//! `beta_i * ln P_L0(t | signal) - beta * cost`. The pragmatic Builder `B1`
//! inverts that speaker and marginalizes over its belief about the lexicon.

use super::{weighted_ln, AgentError, MessageKind, SubMessage, Theta};
use crate::dsl::Symbol;
use crate::lexicon::{literal_semantics, Gesture, Lexicon, LexiconBelief, Signal, Utterance};

use super::softmax;

/// Literal listener over the full category of `t`, evaluated at `t`.
fn literal_listener_at(
    signal: Signal,
    t: Symbol,
    theta: &Theta,
    lex: &Lexicon,
) -> Result<f64, AgentError> {
    let mut at = 0.0;
    let mut total = 0.0;
    for s in t.kind().symbols() {
        let v = literal_semantics(signal, s, theta.sem, lex).map_err(AgentError::from_lexicon)?;
        if s == t {
            at = v;
        }
        total += v;
    }
    Ok(if total > 0.0 { at / total } else { 0.0 })
}

fn speaker_softmax<S: Copy>(
    signals: Vec<S>,
    score: impl Fn(S) -> Result<f64, AgentError>,
) -> Result<Vec<(S, f64)>, AgentError> {
    let utilities = signals
        .iter()
        .map(|&s| score(s))
        .collect::<Result<Vec<_>, _>>()?;
    let probs = softmax(&utilities).map_err(|_| AgentError::ZeroMass)?;
    Ok(signals.into_iter().zip(probs).collect())
}

/// `P_I1(u | t, l)` for every utterance available in `t`'s category.
pub fn speaker_utterance_probs(
    t: Symbol,
    lex: &Lexicon,
    theta: &Theta,
) -> Result<Vec<(Utterance, f64)>, AgentError> {
    speaker_softmax(Utterance::for_category(t.kind()), |u| {
        let p = literal_listener_at(Signal::Utterance(u), t, theta, lex)?;
        Ok(weighted_ln(theta.beta_i, p) - theta.beta_u * u.cost())
    })
}

/// `P_I1(h | t, l)` for every gesture available in `t`'s category, or `None`
/// when the category has no gestures (blocks).
pub fn speaker_gesture_probs(
    t: Symbol,
    lex: &Lexicon,
    theta: &Theta,
) -> Result<Option<Vec<(Gesture, f64)>>, AgentError> {
    let gestures = Gesture::for_category(t.kind());
    if gestures.is_empty() {
        return Ok(None);
    }
    speaker_softmax(gestures, |g| {
        let p = literal_listener_at(Signal::Gesture(g), t, theta, lex)?;
        Ok(weighted_ln(theta.beta_i, p) - theta.beta_h * g.cost())
    })
    .map(Some)
}

fn lookup<S: PartialEq + Copy>(table: &[(S, f64)], key: S) -> f64 {
    table
        .iter()
        .find(|(s, _)| *s == key)
        .map_or(0.0, |(_, p)| *p)
}

/// `P_I1(m | t, l) = gamma * P_I1(u | t, l) + (1 - gamma) * P_I1(h | t, l)`.
///
/// For a redundant message the gesture term equals the utterance term (the two
/// channels are aligned). A language-only message contributes only its
/// utterance term.
pub fn speaker_message_prob(
    sub: &SubMessage,
    t: Symbol,
    lex: &Lexicon,
    theta: &Theta,
) -> Result<f64, AgentError> {
    if t.kind() != sub.category() {
        return Err(AgentError::SpaceMismatch {
            symbol: t,
            expected: sub.category(),
        });
    }
    let utterance_term = lookup(&speaker_utterance_probs(t, lex, theta)?, sub.utterance());
    match (sub.kind(), sub.gesture()) {
        (MessageKind::Complementary, Some(g)) => {
            let gestures = speaker_gesture_probs(t, lex, theta)?.unwrap_or_default();
            let gesture_term = lookup(&gestures, g);
            Ok(theta.gamma * utterance_term + (1.0 - theta.gamma) * gesture_term)
        }
        _ => Ok(utterance_term),
    }
}

fn check_space(sub: &SubMessage, space: &[Symbol]) -> Result<(), AgentError> {
    if space.is_empty() {
        return Err(AgentError::EmptySpace);
    }
    match space.iter().find(|s| s.kind() != sub.category()) {
        Some(&symbol) => Err(AgentError::SpaceMismatch {
            symbol,
            expected: sub.category(),
        }),
        None => Ok(()),
    }
}

fn normalize(weights: Vec<f64>) -> Result<Vec<f64>, AgentError> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(AgentError::ZeroMass);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// `P_B1(t | m, l)`: the pragmatic Builder when the lexicon is known.
pub fn pragmatic_builder_given_lexicon(
    sub: &SubMessage,
    space: &[Symbol],
    lex: &Lexicon,
    theta: &Theta,
) -> Result<Vec<f64>, AgentError> {
    check_space(sub, space)?;
    let weights = space
        .iter()
        .map(|&t| speaker_message_prob(sub, t, lex, theta))
        .collect::<Result<Vec<_>, _>>()?;
    normalize(weights)
}

/// `P_B1(t | m)` over `space`, proportional to
/// `sum_l P_I1(m | t, l) * P(l)` under the Builder's `belief`.
pub fn pragmatic_builder_distribution(
    sub: &SubMessage,
    space: &[Symbol],
    belief: &LexiconBelief,
    theta: &Theta,
) -> Result<Vec<f64>, AgentError> {
    check_space(sub, space)?;
    if !sub.uses_lexicon() {
        return pragmatic_builder_given_lexicon(sub, space, &Lexicon::IDENTITY, theta);
    }
    let mut weights = vec![0.0; space.len()];
    for (lex, p) in belief.iter().filter(|(_, p)| *p > 0.0) {
        for (w, &t) in weights.iter_mut().zip(space) {
            *w += speaker_message_prob(sub, t, lex, theta)? * p;
        }
    }
    normalize(weights)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoded {
    pub symbol: Symbol,
    pub prob: f64,
    /// Another symbol shared the maximum probability.
    pub tie: bool,
}

/// Most probable symbol; ties go to the earliest symbol in `space`.
pub fn map_decode(dist: &[f64], space: &[Symbol]) -> Decoded {
    assert_eq!(dist.len(), space.len());
    assert!(!space.is_empty());
    let mut best = 0;
    for (i, &p) in dist.iter().enumerate() {
        if p > dist[best] {
            best = i;
        }
    }
    let max = dist[best];
    let tie = dist
        .iter()
        .enumerate()
        .any(|(i, &p)| i != best && (max - p).abs() <= 1e-12 * max.abs().max(f64::MIN_POSITIVE));
    if tie {
        log::debug!(
            "degenerate decode: tie at p={max} resolved to {}",
            space[best]
        );
    }
    Decoded {
        symbol: space[best],
        prob: max,
        tie,
    }
}

/// Which agent's update rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateSide {
    /// Scores each lexicon by the speaker likelihood `P_I1(m* | t*, l)`.
    Instructor,
    /// Scores each lexicon by the listener likelihood `P_B1(t* | m*, l)`.
    Builder,
}

fn pair_likelihood(
    sub: &SubMessage,
    t: Symbol,
    side: UpdateSide,
    lex: &Lexicon,
    theta: &Theta,
) -> Result<f64, AgentError> {
    match side {
        UpdateSide::Instructor => speaker_message_prob(sub, t, lex, theta),
        UpdateSide::Builder => {
            let space = sub.category().symbols();
            let weights = space
                .iter()
                .map(|&s| speaker_message_prob(sub, s, lex, theta))
                .collect::<Result<Vec<_>, _>>()?;
            let total: f64 = weights.iter().sum();
            let at = space
                .iter()
                .position(|&s| s == t)
                .expect("t in its own category");
            Ok(if total > 0.0 {
                weights[at] / total
            } else {
                0.0
            })
        }
    }
}

/// Bayesian update of a lexicon belief after consensus on `(sub-message,
/// symbol)` pairs, followed by renormalization.
pub fn update_belief(
    belief: &LexiconBelief,
    pairs: &[(SubMessage, Symbol)],
    side: UpdateSide,
    theta: &Theta,
) -> Result<LexiconBelief, AgentError> {
    if pairs.is_empty() {
        return Ok(belief.clone());
    }
    for (sub, t) in pairs {
        if t.kind() != sub.category() {
            return Err(AgentError::SpaceMismatch {
                symbol: *t,
                expected: sub.category(),
            });
        }
    }
    // Lexicon-free pairs scale every lexicon equally; they matter only when
    // they rule everything out.
    for (sub, t) in pairs.iter().filter(|(s, _)| !s.uses_lexicon()) {
        if pair_likelihood(sub, *t, side, &Lexicon::IDENTITY, theta)? <= 0.0 {
            return Err(AgentError::ZeroMass);
        }
    }
    let lexical: Vec<&(SubMessage, Symbol)> =
        pairs.iter().filter(|(s, _)| s.uses_lexicon()).collect();
    if lexical.is_empty() {
        return Ok(belief.clone());
    }
    let log_lik = belief
        .iter()
        .map(|(lex, p)| {
            if p <= 0.0 {
                return Ok(0.0);
            }
            lexical.iter().try_fold(0.0, |acc, (sub, t)| {
                Ok(acc + pair_likelihood(sub, *t, side, lex, theta)?.ln())
            })
        })
        .collect::<Result<Vec<f64>, AgentError>>()?;
    belief
        .add_log_likelihood(&log_lik)
        .map_err(AgentError::from_lexicon)
}
