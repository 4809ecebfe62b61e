//! Instructor and Builder agents: messages, the multimodal speaker utility,
//! literal and pragmatic Builders, and Bayesian lexicon updates.

mod literal;
mod pragmatic;

use std::fmt;

use thiserror::Error;

use crate::dsl::{Position, Symbol, SymbolKind};
use crate::lexicon::{
    Clarity, Gesture, Lexicon, LexiconBelief, LexiconError, Semantics, Utterance,
};

pub use literal::{
    choose_index, choose_message, classic_speaker_utility, expected_message_utility,
    literal_builder_distribution, message_candidates, message_candidates_with, message_utility,
    softmax,
};
pub use pragmatic::{
    map_decode, pragmatic_builder_distribution, pragmatic_builder_given_lexicon,
    speaker_gesture_probs, speaker_message_prob, speaker_utterance_probs, update_belief, Decoded,
    UpdateSide,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("all candidate symbols have zero probability")]
    ZeroMass,
    #[error("decode space is empty")]
    EmptySpace,
    #[error("message has {found} sub-messages but the program has {expected} symbols")]
    MisalignedMessage { expected: usize, found: usize },
    #[error("sub-message {index} is about {found} but the program says {expected}")]
    MisalignedSymbol {
        index: usize,
        expected: Symbol,
        found: Symbol,
    },
    #[error("no candidate has a finite utility")]
    NoFiniteCandidate,
    #[error("invalid sub-message: {0}")]
    InvalidSubMessage(String),
    #[error("symbol {symbol} is not a {expected:?} symbol")]
    SpaceMismatch {
        symbol: Symbol,
        expected: SymbolKind,
    },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidTheta {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

impl AgentError {
    pub(crate) fn from_lexicon(err: LexiconError) -> Self {
        match err {
            LexiconError::ZeroMass => AgentError::ZeroMass,
            other => AgentError::Lexicon(other),
        }
    }
}

/// How a sub-message combines its two channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    /// Clear utterance plus a gesture carrying the same information.
    Redundant,
    /// "here" disambiguated by a pointing gesture.
    Complementary,
    /// Clear utterance without a gesture.
    LanguageOnly,
}

impl MessageKind {
    pub const ALL: [MessageKind; 3] = [
        MessageKind::Redundant,
        MessageKind::Complementary,
        MessageKind::LanguageOnly,
    ];

    /// Kinds the signal table can express for a symbol category.
    pub fn available_for(kind: SymbolKind) -> &'static [MessageKind] {
        match kind {
            SymbolKind::Block => &[MessageKind::LanguageOnly],
            SymbolKind::Position => &MessageKind::ALL,
            SymbolKind::Chunk => &[MessageKind::Redundant, MessageKind::LanguageOnly],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MessageKind::Redundant => "redundant",
            MessageKind::Complementary => "complementary",
            MessageKind::LanguageOnly => "language_only",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The signals produced for one program symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubMessage {
    utterance: Utterance,
    gesture: Option<Gesture>,
    intended: Symbol,
}

impl SubMessage {
    pub fn new(
        utterance: Utterance,
        gesture: Option<Gesture>,
        intended: Symbol,
    ) -> Result<Self, AgentError> {
        let kind = intended.kind();
        if utterance.category() != kind {
            return Err(AgentError::InvalidSubMessage(format!(
                "utterance `{}` cannot describe {intended}",
                utterance.surface()
            )));
        }
        if let Some(g) = gesture {
            if g.category() != kind {
                return Err(AgentError::InvalidSubMessage(format!(
                    "gesture `{}` cannot describe {intended}",
                    g.surface()
                )));
            }
        }
        if utterance.clarity() == Clarity::Ambiguous && gesture.is_none() {
            return Err(AgentError::InvalidSubMessage(
                "an ambiguous utterance needs a gesture".into(),
            ));
        }
        Ok(SubMessage {
            utterance,
            gesture,
            intended,
        })
    }

    /// The canonical sub-message of `kind` that a speaker with lexicon `lex`
    /// uses for `intended`, or `None` if the signal table has no such form.
    pub fn of_kind(kind: MessageKind, intended: Symbol, lex: &Lexicon) -> Option<Self> {
        let (utterance, gesture) = match (kind, intended) {
            (MessageKind::LanguageOnly, Symbol::Block(b)) => (Utterance::Block(b), None),
            (MessageKind::LanguageOnly, Symbol::Position(p)) => (Utterance::Position(p), None),
            (MessageKind::LanguageOnly, Symbol::Chunk(c)) => {
                (Utterance::Chunk(lex.word_for(c)), None)
            }
            (MessageKind::Redundant, Symbol::Position(p)) => {
                (Utterance::Position(p), Some(Gesture::Point(p)))
            }
            (MessageKind::Redundant, Symbol::Chunk(c)) => {
                let w = lex.word_for(c);
                (Utterance::Chunk(w), Some(Gesture::Shape(w)))
            }
            (MessageKind::Complementary, Symbol::Position(p)) => {
                (Utterance::Here, Some(Gesture::Point(p)))
            }
            _ => return None,
        };
        Some(SubMessage {
            utterance,
            gesture,
            intended,
        })
    }

    pub fn complementary(p: Position) -> Self {
        SubMessage {
            utterance: Utterance::Here,
            gesture: Some(Gesture::Point(p)),
            intended: Symbol::Position(p),
        }
    }

    pub fn utterance(&self) -> Utterance {
        self.utterance
    }

    pub fn gesture(&self) -> Option<Gesture> {
        self.gesture
    }

    pub fn intended(&self) -> Symbol {
        self.intended
    }

    pub fn category(&self) -> SymbolKind {
        self.intended.kind()
    }

    pub fn kind(&self) -> MessageKind {
        match (self.utterance.clarity(), self.gesture.is_some()) {
            (Clarity::Clear, true) => MessageKind::Redundant,
            (Clarity::Ambiguous, _) => MessageKind::Complementary,
            (Clarity::Clear, false) => MessageKind::LanguageOnly,
        }
    }

    pub fn utterance_cost(&self) -> f64 {
        self.utterance.cost()
    }

    pub fn gesture_cost(&self) -> f64 {
        self.gesture.map_or(0.0, Gesture::cost)
    }

    /// Whether interpreting this sub-message depends on the chunk lexicon.
    pub fn uses_lexicon(&self) -> bool {
        self.category() == SymbolKind::Chunk
    }
}

impl fmt::Display for SubMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gesture {
            Some(g) => write!(f, "\"{}\" + [{}]", self.utterance.surface(), g.surface()),
            None => write!(f, "\"{}\"", self.utterance.surface()),
        }
    }
}

/// One sub-message per program symbol, in program order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Message {
    pub subs: Vec<SubMessage>,
}

impl Message {
    pub fn new(subs: Vec<SubMessage>) -> Self {
        Message { subs }
    }

    pub fn kinds(&self) -> Vec<MessageKind> {
        self.subs.iter().map(SubMessage::kind).collect()
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }
}

/// Weights in effect for one repetition.
///
/// `beta_i` scales informativeness, `beta_u` and `beta_h` scale utterance and
/// gesture costs, and `gamma` mixes the utterance and gesture speaker terms
/// when the Builder reasons pragmatically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub beta_i: f64,
    pub beta_u: f64,
    pub beta_h: f64,
    pub gamma: f64,
    pub sem: Semantics,
}

impl Theta {
    pub const DEFAULT_GAMMA: f64 = 0.5;

    pub fn new(
        beta_i: f64,
        beta_u: f64,
        beta_h: f64,
        gamma: f64,
        sem: Semantics,
    ) -> Result<Self, AgentError> {
        let theta = Theta {
            beta_i,
            beta_u,
            beta_h,
            gamma,
            sem,
        };
        theta.validate()?;
        Ok(theta)
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        for (name, value) in [
            ("beta_i", self.beta_i),
            ("beta_u", self.beta_u),
            ("beta_h", self.beta_h),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(AgentError::InvalidTheta {
                    name,
                    value,
                    reason: "must be finite and non-negative",
                });
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(AgentError::InvalidTheta {
                name: "gamma",
                value: self.gamma,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }

    pub fn with_costs(self, beta_u: f64, beta_h: f64) -> Self {
        Theta {
            beta_u,
            beta_h,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Instructor,
    Builder,
}

/// One agent's private state for a run: its own chunk words and its belief
/// about the partner's lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub role: Role,
    pub belief: LexiconBelief,
    pub own_lexicon: Lexicon,
}

impl AgentState {
    pub fn new(role: Role, own_lexicon: Lexicon) -> Self {
        AgentState {
            role,
            belief: LexiconBelief::uniform(),
            own_lexicon,
        }
    }
}

/// `beta * ln(p)`, taking `0 * ln(0)` as 0 so a zero weight switches the
/// term off entirely.
pub(crate) fn weighted_ln(beta: f64, p: f64) -> f64 {
    if beta == 0.0 {
        0.0
    } else {
        beta * p.ln()
    }
}
