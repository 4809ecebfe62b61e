//! Literal Builder, speaker utilities and softmax message choice.

use itertools::Itertools;
use rand::Rng;

use super::{weighted_ln, AgentError, Message, MessageKind, SubMessage, Theta};
use crate::dsl::{Symbol, TowerProgram};
use crate::lexicon::{literal_semantics, Lexicon, LexiconBelief, Semantics, Signal, Utterance};

fn check_space(sub: &SubMessage, space: &[Symbol]) -> Result<(), AgentError> {
    if space.is_empty() {
        return Err(AgentError::EmptySpace);
    }
    let expected = sub.category();
    if let Some(&symbol) = space.iter().find(|s| s.kind() != expected) {
        return Err(AgentError::SpaceMismatch { symbol, expected });
    }
    Ok(())
}

fn normalize(mut weights: Vec<f64>) -> Result<Vec<f64>, AgentError> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(AgentError::ZeroMass);
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(weights)
}

/// `P_B0(t | m)` over `space`: proportional to the product of the utterance and
/// gesture literal values (the gesture factor is 1 when there is no gesture).
pub fn literal_builder_distribution(
    sub: &SubMessage,
    space: &[Symbol],
    sem: Semantics,
    lex: &Lexicon,
) -> Result<Vec<f64>, AgentError> {
    check_space(sub, space)?;
    let weights = space
        .iter()
        .map(|&t| {
            let u = literal_semantics(Signal::Utterance(sub.utterance()), t, sem, lex)?;
            let h = match sub.gesture() {
                Some(g) => literal_semantics(Signal::Gesture(g), t, sem, lex)?,
                None => 1.0,
            };
            Ok(u * h)
        })
        .collect::<Result<Vec<f64>, AgentError>>()?;
    normalize(weights)
}

/// Literal Builder probability of the intended symbol under a single lexicon.
fn literal_prob_known(sub: &SubMessage, sem: Semantics, lex: &Lexicon) -> Result<f64, AgentError> {
    let space = sub.category().symbols();
    let dist = literal_builder_distribution(sub, &space, sem, lex)?;
    let at = space
        .iter()
        .position(|&s| s == sub.intended())
        .expect("intended in own category");
    Ok(dist[at])
}

/// Literal Builder probability of the intended symbol, averaged over a belief
/// about which lexicon the Builder holds.
fn literal_prob_believed(
    sub: &SubMessage,
    sem: Semantics,
    belief: &LexiconBelief,
) -> Result<f64, AgentError> {
    if !sub.uses_lexicon() {
        return literal_prob_known(sub, sem, &Lexicon::IDENTITY);
    }
    let mut total = 0.0;
    for (lex, p) in belief.iter().filter(|(_, p)| *p > 0.0) {
        total += p * literal_prob_known(sub, sem, lex)?;
    }
    Ok(total)
}

/// Classic single-utterance speaker utility `ln P_L0(t | u) - C(u)`.
pub fn classic_speaker_utility(
    u: Utterance,
    t: Symbol,
    space: &[Symbol],
    sem: Semantics,
    lex: &Lexicon,
) -> Result<f64, AgentError> {
    if u.category() != t.kind() {
        return Err(AgentError::SpaceMismatch {
            symbol: t,
            expected: u.category(),
        });
    }
    if u == Utterance::Here {
        // "here" without a gesture is not a valid message but still has a
        // literal meaning: uniform over positions.
        let at = space
            .iter()
            .position(|&s| s == t)
            .ok_or(AgentError::EmptySpace)?;
        let weights = space
            .iter()
            .map(|&s| literal_semantics(Signal::Utterance(u), s, sem, lex))
            .collect::<Result<Vec<_>, _>>()?;
        let dist = normalize(weights)?;
        return Ok(dist[at].ln() - u.cost());
    }
    let sub = SubMessage::new(u, None, t)?;
    let dist = literal_builder_distribution(&sub, space, sem, lex)?;
    let at = space
        .iter()
        .position(|&s| s == t)
        .ok_or(AgentError::EmptySpace)?;
    Ok(dist[at].ln() - u.cost())
}

fn check_alignment(msg: &Message, program: &TowerProgram) -> Result<(), AgentError> {
    let symbols = program.symbols();
    if symbols.len() != msg.subs.len() {
        return Err(AgentError::MisalignedMessage {
            expected: symbols.len(),
            found: msg.subs.len(),
        });
    }
    for (index, (sub, &expected)) in msg.subs.iter().zip(&symbols).enumerate() {
        if sub.intended() != expected {
            return Err(AgentError::MisalignedSymbol {
                index,
                expected,
                found: sub.intended(),
            });
        }
    }
    Ok(())
}

fn utility_with(
    msg: &Message,
    program: &TowerProgram,
    theta: &Theta,
    mut prob: impl FnMut(&SubMessage) -> Result<f64, AgentError>,
) -> Result<f64, AgentError> {
    check_alignment(msg, program)?;
    let mut informativeness = 0.0;
    let mut utterance_cost = 0.0;
    let mut gesture_cost = 0.0;
    for sub in &msg.subs {
        let p = match prob(sub) {
            Ok(p) => p,
            Err(AgentError::ZeroMass) => 0.0,
            Err(e) => return Err(e),
        };
        informativeness += weighted_ln(theta.beta_i, p);
        utterance_cost += sub.utterance_cost();
        gesture_cost += sub.gesture_cost();
    }
    Ok(informativeness - theta.beta_u * utterance_cost - theta.beta_h * gesture_cost)
}

/// Multimodal utility of a whole message for a program, with the Builder's
/// lexicon known to be `lex`:
///
/// `beta_i * sum ln P_B0(t_s | m_s) - beta_u * sum C_u(u_s) - beta_h * sum C_h(h_s)`.
///
/// A step the literal Builder cannot resolve at all yields `-inf`.
pub fn message_utility(
    msg: &Message,
    program: &TowerProgram,
    theta: &Theta,
    lex: &Lexicon,
) -> Result<f64, AgentError> {
    utility_with(msg, program, theta, |sub| {
        literal_prob_known(sub, theta.sem, lex)
    })
}

/// Same as [`message_utility`] but with the literal Builder averaged over the
/// speaker's belief about the Builder's lexicon.
pub fn expected_message_utility(
    msg: &Message,
    program: &TowerProgram,
    theta: &Theta,
    belief: &LexiconBelief,
) -> Result<f64, AgentError> {
    utility_with(msg, program, theta, |sub| {
        literal_prob_believed(sub, theta.sem, belief)
    })
}

/// Every message the speaker could send for `program`.
pub fn message_candidates(program: &TowerProgram, lex: &Lexicon) -> Vec<Message> {
    message_candidates_with(program, lex, &MessageKind::ALL)
}

/// Candidate messages restricted to `allowed` kinds. A symbol whose category
/// cannot be expressed by any allowed kind keeps its full option set, so block
/// steps are always language-only.
pub fn message_candidates_with(
    program: &TowerProgram,
    lex: &Lexicon,
    allowed: &[MessageKind],
) -> Vec<Message> {
    let per_symbol: Vec<Vec<SubMessage>> = program
        .symbols()
        .into_iter()
        .map(|sym| {
            let available = MessageKind::available_for(sym.kind());
            let mut kinds: Vec<MessageKind> = available
                .iter()
                .copied()
                .filter(|k| allowed.contains(k))
                .collect();
            if kinds.is_empty() {
                kinds = available.to_vec();
            }
            kinds
                .into_iter()
                .filter_map(|k| SubMessage::of_kind(k, sym, lex))
                .collect()
        })
        .collect();
    if per_symbol.is_empty() {
        return vec![Message::default()];
    }
    per_symbol
        .into_iter()
        .multi_cartesian_product()
        .map(Message::new)
        .collect()
}

/// Softmax at temperature 1. Entries at `-inf` get probability 0.
pub fn softmax(utilities: &[f64]) -> Result<Vec<f64>, AgentError> {
    if utilities.iter().any(|u| u.is_nan() || *u == f64::INFINITY) {
        return Err(AgentError::NoFiniteCandidate);
    }
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(AgentError::NoFiniteCandidate);
    }
    let weights: Vec<f64> = utilities.iter().map(|u| (u - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Samples an index with probability `softmax(utilities)`.
pub fn choose_index<R: Rng + ?Sized>(utilities: &[f64], rng: &mut R) -> Result<usize, AgentError> {
    let probs = softmax(utilities)?;
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
            acc += p;
            if draw < acc {
                return Ok(i);
            }
        }
    }
    // Rounding left `acc` a hair under 1.
    Ok(last_positive)
}

pub fn choose_message<'a, R: Rng + ?Sized>(
    candidates: &'a [(Message, f64)],
    rng: &mut R,
) -> Result<&'a Message, AgentError> {
    let utilities: Vec<f64> = candidates.iter().map(|(_, u)| *u).collect();
    let i = choose_index(&utilities, rng)?;
    Ok(&candidates[i].0)
}
