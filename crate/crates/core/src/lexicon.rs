//! Multimodal signals, their production costs, soft literal semantics, and the
//! belief distribution over the 120 possible chunk lexicons.
//!
//! Block and position signals are common ground: their meaning never depends
//! on a lexicon. Only the five chunk words (and the shape gestures that carry
//! the same words) are uncertain, and a [`Lexicon`] is a bijection from those
//! words to the five chunk symbols.

use std::fmt;
use std::sync::LazyLock;

use itertools::Itertools;
use thiserror::Error;

use crate::dsl::{Block, Chunk, Position, Symbol, SymbolKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexiconError {
    #[error("signal `{signal}` refers to {expected:?} symbols but target {target} is a {found:?}")]
    CategoryMismatch {
        signal: String,
        expected: SymbolKind,
        found: SymbolKind,
        target: Symbol,
    },
    #[error("semantic value {name} = {value} must lie in [0, 1]")]
    InvalidSemantics { name: &'static str, value: f64 },
    #[error("all lexicons received zero probability")]
    ZeroMass,
    #[error("belief has {0} entries, expected {LEXICON_COUNT}")]
    WrongSize(usize),
}

pub const LEXICON_COUNT: usize = 120;

/// The five arbitrary labels that get attached to chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Epsilon,
}

impl Word {
    pub const ALL: [Word; 5] = [
        Word::Alpha,
        Word::Beta,
        Word::Gamma,
        Word::Delta,
        Word::Epsilon,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Word::Alpha => "alpha",
            Word::Beta => "beta",
            Word::Gamma => "gamma",
            Word::Delta => "delta",
            Word::Epsilon => "epsilon",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Utterance,
    Gesture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clarity {
    Clear,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Utterance {
    /// "place a red block"
    Block(Block),
    /// "on the top left of the grid"
    Position(Position),
    /// "here": consistent with every position.
    Here,
    /// "place a <word> tower"
    Chunk(Word),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gesture {
    Point(Position),
    Shape(Word),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Utterance(Utterance),
    Gesture(Gesture),
}

fn position_phrase(p: Position) -> &'static str {
    const NAMES: [&str; 9] = [
        "top left",
        "top half",
        "top right",
        "left half",
        "middle",
        "right half",
        "bottom left",
        "bottom half",
        "bottom right",
    ];
    NAMES[p.index()]
}

impl Utterance {
    pub fn cost(self) -> f64 {
        match self {
            Utterance::Block(_) | Utterance::Chunk(_) => 0.4,
            Utterance::Position(p) if p == Position::at(2, 2) => 0.6,
            Utterance::Position(_) => 0.7,
            Utterance::Here => 0.1,
        }
    }

    pub fn clarity(self) -> Clarity {
        match self {
            Utterance::Here => Clarity::Ambiguous,
            _ => Clarity::Clear,
        }
    }

    pub fn category(self) -> SymbolKind {
        match self {
            Utterance::Block(_) => SymbolKind::Block,
            Utterance::Position(_) | Utterance::Here => SymbolKind::Position,
            Utterance::Chunk(_) => SymbolKind::Chunk,
        }
    }

    /// The symbol a clear utterance denotes under `lex`; `None` for "here".
    pub fn denotes(self, lex: &Lexicon) -> Option<Symbol> {
        match self {
            Utterance::Block(b) => Some(Symbol::Block(b)),
            Utterance::Position(p) => Some(Symbol::Position(p)),
            Utterance::Here => None,
            Utterance::Chunk(w) => Some(Symbol::Chunk(lex.meaning(w))),
        }
    }

    pub fn surface(self) -> String {
        match self {
            Utterance::Block(Block::Red) => "place a red block".into(),
            Utterance::Block(Block::Green) => "place a green block".into(),
            Utterance::Block(Block::Blue) => "place a blue block".into(),
            Utterance::Position(p) => position_phrase(p).into(),
            Utterance::Here => "here".into(),
            Utterance::Chunk(w) => format!("place a {w} tower"),
        }
    }

    /// Every utterance available for a symbol category.
    pub fn for_category(kind: SymbolKind) -> Vec<Utterance> {
        match kind {
            SymbolKind::Block => Block::ALL.into_iter().map(Utterance::Block).collect(),
            SymbolKind::Position => Position::all()
                .into_iter()
                .map(Utterance::Position)
                .chain(std::iter::once(Utterance::Here))
                .collect(),
            SymbolKind::Chunk => Word::ALL.into_iter().map(Utterance::Chunk).collect(),
        }
    }
}

impl Gesture {
    pub fn cost(self) -> f64 {
        0.6
    }

    pub fn category(self) -> SymbolKind {
        match self {
            Gesture::Point(_) => SymbolKind::Position,
            Gesture::Shape(_) => SymbolKind::Chunk,
        }
    }

    pub fn denotes(self, lex: &Lexicon) -> Symbol {
        match self {
            Gesture::Point(p) => Symbol::Position(p),
            Gesture::Shape(w) => Symbol::Chunk(lex.meaning(w)),
        }
    }

    pub fn surface(self) -> String {
        match self {
            Gesture::Point(p) => format!("point: {}", position_phrase(p)),
            Gesture::Shape(w) => format!("shape: {w}"),
        }
    }

    /// Every gesture available for a symbol category. Blocks have none.
    pub fn for_category(kind: SymbolKind) -> Vec<Gesture> {
        match kind {
            SymbolKind::Block => Vec::new(),
            SymbolKind::Position => Position::all().into_iter().map(Gesture::Point).collect(),
            SymbolKind::Chunk => Word::ALL.into_iter().map(Gesture::Shape).collect(),
        }
    }
}

impl Signal {
    pub fn modality(self) -> Modality {
        match self {
            Signal::Utterance(_) => Modality::Utterance,
            Signal::Gesture(_) => Modality::Gesture,
        }
    }

    pub fn clarity(self) -> Clarity {
        match self {
            Signal::Utterance(u) => u.clarity(),
            Signal::Gesture(_) => Clarity::Clear,
        }
    }

    pub fn cost(self) -> f64 {
        match self {
            Signal::Utterance(u) => u.cost(),
            Signal::Gesture(g) => g.cost(),
        }
    }

    pub fn category(self) -> SymbolKind {
        match self {
            Signal::Utterance(u) => u.category(),
            Signal::Gesture(g) => g.category(),
        }
    }

    pub fn surface(self) -> String {
        match self {
            Signal::Utterance(u) => u.surface(),
            Signal::Gesture(g) => g.surface(),
        }
    }

    pub fn denotes(self, lex: &Lexicon) -> Option<Symbol> {
        match self {
            Signal::Utterance(u) => u.denotes(lex),
            Signal::Gesture(g) => Some(g.denotes(lex)),
        }
    }

    /// The complete signal inventory.
    pub fn inventory() -> Vec<Signal> {
        let utterances = SymbolKind::ALL
            .into_iter()
            .flat_map(Utterance::for_category)
            .map(Signal::Utterance);
        let gestures = SymbolKind::ALL
            .into_iter()
            .flat_map(Gesture::for_category)
            .map(Signal::Gesture);
        utterances.chain(gestures).collect()
    }
}

impl From<Utterance> for Signal {
    fn from(u: Utterance) -> Self {
        Signal::Utterance(u)
    }
}

impl From<Gesture> for Signal {
    fn from(g: Gesture) -> Self {
        Signal::Gesture(g)
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface())
    }
}

/// Soft truth values for utterances (`x_u`) and gestures (`x_h`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Semantics {
    x_u: f64,
    x_h: f64,
}

impl Semantics {
    /// Classical true/false semantics.
    pub const BINARY: Semantics = Semantics { x_u: 1.0, x_h: 1.0 };

    pub fn new(x_u: f64, x_h: f64) -> Result<Self, LexiconError> {
        for (name, value) in [("x_u", x_u), ("x_h", x_h)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(LexiconError::InvalidSemantics { name, value });
            }
        }
        Ok(Semantics { x_u, x_h })
    }

    pub fn x_u(&self) -> f64 {
        self.x_u
    }

    pub fn x_h(&self) -> f64 {
        self.x_h
    }
}

/// A bijection from chunk words to chunk symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lexicon {
    images: [Chunk; 5],
}

impl Lexicon {
    /// alpha -> C, beta -> L, gamma -> TR, delta -> T, epsilon -> PL.
    pub const IDENTITY: Lexicon = Lexicon { images: Chunk::ALL };

    /// Returns `None` unless `images` is a permutation of the five chunks.
    pub fn from_images(images: [Chunk; 5]) -> Option<Self> {
        let mut seen = [false; 5];
        for c in images {
            if std::mem::replace(&mut seen[c.index()], true) {
                return None;
            }
        }
        Some(Lexicon { images })
    }

    pub fn meaning(&self, word: Word) -> Chunk {
        self.images[word.index()]
    }

    pub fn word_for(&self, chunk: Chunk) -> Word {
        let i = self
            .images
            .iter()
            .position(|&c| c == chunk)
            .expect("bijection");
        Word::ALL[i]
    }

    pub fn images(&self) -> [Chunk; 5] {
        self.images
    }

    /// Position of this lexicon in [`lexicons`] (its lexicographic rank).
    pub fn index(&self) -> usize {
        let mut rank = 0;
        let mut remaining: Vec<usize> = (0..5).collect();
        for (i, c) in self.images.iter().enumerate() {
            let at = remaining
                .iter()
                .position(|&r| r == c.index())
                .expect("bijection");
            rank += at * factorial(4 - i);
            remaining.remove(at);
        }
        rank
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl fmt::Display for Lexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = Word::ALL
            .iter()
            .map(|&w| format!("{w}->{}", self.meaning(w)))
            .collect();
        write!(f, "{{{}}}", pairs.join(", "))
    }
}

static LEXICONS: LazyLock<Vec<Lexicon>> = LazyLock::new(|| {
    Chunk::ALL
        .into_iter()
        .permutations(5)
        .map(|p| Lexicon {
            images: [p[0], p[1], p[2], p[3], p[4]],
        })
        .collect()
});

/// All 5! lexicons in lexicographic order of their images under the chunk
/// order `C, L, TR, T, PL`.
pub fn lexicons() -> &'static [Lexicon] {
    &LEXICONS
}

pub fn enumerate_lexicons() -> Vec<Lexicon> {
    LEXICONS.clone()
}

/// Literal (soft) truth value of `signal` for `target`.
///
/// A clear signal scores `x` on the symbol it denotes and `1 - x` elsewhere in
/// its category; "here" scores `1/9` on every position.
pub fn literal_semantics(
    signal: Signal,
    target: Symbol,
    sem: Semantics,
    lex: &Lexicon,
) -> Result<f64, LexiconError> {
    if signal.category() != target.kind() {
        return Err(LexiconError::CategoryMismatch {
            signal: signal.surface(),
            expected: signal.category(),
            found: target.kind(),
            target,
        });
    }
    let x = match signal.modality() {
        Modality::Utterance => sem.x_u,
        Modality::Gesture => sem.x_h,
    };
    Ok(match signal.denotes(lex) {
        None => 1.0 / SymbolKind::Position.size() as f64,
        Some(s) if s == target => x,
        Some(_) => 1.0 - x,
    })
}

/// A probability distribution over [`lexicons`], indexed by lexicon rank.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconBelief {
    probs: Vec<f64>,
}

impl LexiconBelief {
    pub fn uniform() -> Self {
        LexiconBelief {
            probs: vec![1.0 / LEXICON_COUNT as f64; LEXICON_COUNT],
        }
    }

    /// All mass on a single lexicon.
    pub fn certain(lex: &Lexicon) -> Self {
        let mut probs = vec![0.0; LEXICON_COUNT];
        probs[lex.index()] = 1.0;
        LexiconBelief { probs }
    }

    /// Normalizes non-negative weights into a belief.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, LexiconError> {
        if weights.len() != LEXICON_COUNT {
            return Err(LexiconError::WrongSize(weights.len()));
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(LexiconError::ZeroMass);
        }
        Ok(LexiconBelief {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// Adds per-lexicon log-likelihoods to the log prior and renormalizes.
    pub fn add_log_likelihood(&self, log_lik: &[f64]) -> Result<Self, LexiconError> {
        if log_lik.len() != LEXICON_COUNT {
            return Err(LexiconError::WrongSize(log_lik.len()));
        }
        let logs: Vec<f64> = self
            .probs
            .iter()
            .zip(log_lik)
            .map(|(&p, &ll)| {
                if p > 0.0 {
                    p.ln() + ll
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(LexiconError::ZeroMass);
        }
        Self::from_weights(logs.into_iter().map(|l| (l - max).exp()).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, lex: &Lexicon) -> f64 {
        self.probs[lex.index()]
    }

    /// Pairs of `(lexicon, probability)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static Lexicon, f64)> + '_ {
        lexicons().iter().zip(self.probs.iter().copied())
    }

    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// The most probable lexicon (first in canonical order on ties).
    pub fn map_lexicon(&self) -> &'static Lexicon {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        &lexicons()[best]
    }

    /// Probability that `word` means `chunk`.
    pub fn mapping_prob(&self, word: Word, chunk: Chunk) -> f64 {
        self.iter()
            .filter(|(l, _)| l.meaning(word) == chunk)
            .map(|(_, p)| p)
            .sum()
    }
}

impl Default for LexiconBelief {
    fn default() -> Self {
        Self::uniform()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_count_and_order() {
        let all = enumerate_lexicons();
        assert_eq!(all.len(), 120);
        assert_eq!(all[0], Lexicon::IDENTITY);
        assert_eq!(all[0].meaning(Word::Alpha), Chunk::C);
        assert_eq!(all[0].meaning(Word::Epsilon), Chunk::Pl);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (i, l) in all.iter().enumerate() {
            assert_eq!(l.index(), i);
        }
    }

    #[test]
    fn count_alpha_to_c_by_brute_force() {
        // Independent count: all 5^5 assignments, keep the bijections.
        let mut count = 0;
        for code in 0..5usize.pow(5) {
            let digits: Vec<usize> = (0..5).map(|i| code / 5usize.pow(i) % 5).collect();
            let bijective = digits.iter().all_unique();
            if bijective && digits[0] == Chunk::C.index() {
                count += 1;
            }
        }
        assert_eq!(count, 24);
        let via_enum = lexicons()
            .iter()
            .filter(|l| l.meaning(Word::Alpha) == Chunk::C)
            .count();
        assert_eq!(via_enum, count);
    }

    #[test]
    fn from_images_rejects_duplicates() {
        assert!(
            Lexicon::from_images([Chunk::C, Chunk::C, Chunk::Tr, Chunk::T, Chunk::Pl]).is_none()
        );
        let l = Lexicon::from_images([Chunk::Pl, Chunk::T, Chunk::Tr, Chunk::L, Chunk::C]).unwrap();
        assert_eq!(l.index(), 119);
        assert_eq!(l.word_for(Chunk::C), Word::Epsilon);
    }

    #[test]
    fn cost_table() {
        assert_eq!(Utterance::Block(Block::Red).cost(), 0.4);
        assert_eq!(Utterance::Chunk(Word::Gamma).cost(), 0.4);
        assert_eq!(Utterance::Position(Position::at(2, 2)).cost(), 0.6);
        for p in Position::all() {
            if p != Position::at(2, 2) {
                assert_eq!(Utterance::Position(p).cost(), 0.7);
            }
            assert_eq!(Gesture::Point(p).cost(), 0.6);
        }
        assert_eq!(Utterance::Here.cost(), 0.1);
        assert_eq!(Gesture::Shape(Word::Alpha).cost(), 0.6);
        assert!(Gesture::for_category(SymbolKind::Block).is_empty());
        let ambiguous: Vec<_> = Signal::inventory()
            .into_iter()
            .filter(|s| s.clarity() == Clarity::Ambiguous)
            .collect();
        assert_eq!(ambiguous, vec![Signal::Utterance(Utterance::Here)]);
        assert_eq!(Signal::inventory().len(), 3 + 10 + 5 + 9 + 5);
    }

    #[test]
    fn literal_values() {
        let lex = Lexicon::IDENTITY;
        let sem = Semantics::new(0.87, 0.62).unwrap();
        let br = Signal::Utterance(Utterance::Position(Position::at(3, 3)));
        let v = literal_semantics(br, Position::at(3, 3).into(), sem, &lex).unwrap();
        assert_eq!(v, 0.87);
        let here = Signal::Utterance(Utterance::Here);
        let v = literal_semantics(here, Position::at(1, 1).into(), sem, &lex).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-15);
        let tl = Signal::Utterance(Utterance::Position(Position::at(1, 1)));
        let v = literal_semantics(tl, Position::at(2, 2).into(), Semantics::BINARY, &lex).unwrap();
        assert_eq!(v, 0.0);
        let shape = Signal::Gesture(Gesture::Shape(Word::Beta));
        assert_eq!(
            literal_semantics(shape, Chunk::L.into(), sem, &lex).unwrap(),
            0.62
        );
        assert!(
            (literal_semantics(shape, Chunk::C.into(), sem, &lex).unwrap() - 0.38).abs() < 1e-15
        );
    }

    #[test]
    fn literal_category_mismatch() {
        let sig = Signal::Utterance(Utterance::Block(Block::Red));
        let err = literal_semantics(
            sig,
            Position::at(1, 1).into(),
            Semantics::BINARY,
            &Lexicon::IDENTITY,
        );
        assert!(matches!(err, Err(LexiconError::CategoryMismatch { .. })));
    }

    #[test]
    fn clear_signal_category_sum() {
        let sem = Semantics::new(0.8, 0.7).unwrap();
        for p in Position::all() {
            let s = Signal::Utterance(Utterance::Position(p));
            let total: f64 = Position::all()
                .iter()
                .map(|&t| literal_semantics(s, t.into(), sem, &Lexicon::IDENTITY).unwrap())
                .sum();
            assert!((total - (0.8 + 8.0 * 0.2)).abs() < 1e-12);
        }
    }

    #[test]
    fn semantics_bounds() {
        assert!(Semantics::new(1.1, 0.5).is_err());
        assert!(Semantics::new(0.5, -0.1).is_err());
        assert!(Semantics::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn uniform_prior_properties() {
        let b = LexiconBelief::uniform();
        assert!(b.probs().iter().all(|&p| (p - 1.0 / 120.0).abs() < 1e-18));
        assert!((b.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((b.entropy() - 120f64.ln()).abs() < 1e-12);
        assert!((b.entropy() - 4.7875).abs() < 1e-4);
    }

    #[test]
    fn log_likelihood_update() {
        let b = LexiconBelief::uniform();
        let ll: Vec<f64> = lexicons()
            .iter()
            .map(|l| {
                if l.meaning(Word::Alpha) == Chunk::C {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let post = b.add_log_likelihood(&ll).unwrap();
        assert!((post.mapping_prob(Word::Alpha, Chunk::C) - 1.0).abs() < 1e-12);
        let none = vec![f64::NEG_INFINITY; LEXICON_COUNT];
        assert_eq!(b.add_log_likelihood(&none), Err(LexiconError::ZeroMass));
        assert!(matches!(
            b.add_log_likelihood(&[0.0]),
            Err(LexiconError::WrongSize(1))
        ));
    }

    #[test]
    fn certain_belief() {
        let l = lexicons()[37];
        let b = LexiconBelief::certain(&l);
        assert_eq!(b.map_lexicon(), &l);
        assert_eq!(b.entropy(), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn literal_in_unit_interval(x_u in 0.0f64..=1.0, x_h in 0.0f64..=1.0, li in 0usize..120) {
                let sem = Semantics::new(x_u, x_h).unwrap();
                let lex = lexicons()[li];
                for sig in Signal::inventory() {
                    for t in sig.category().symbols() {
                        let v = literal_semantics(sig, t, sem, &lex).unwrap();
                        prop_assert!((0.0..=1.0).contains(&v));
                    }
                }
            }

            #[test]
            fn updates_stay_normalized(
                steps in proptest::collection::vec(proptest::collection::vec(-30.0f64..5.0, LEXICON_COUNT), 1..8)
            ) {
                let mut b = LexiconBelief::uniform();
                for ll in steps {
                    b = b.add_log_likelihood(&ll).unwrap();
                    let total: f64 = b.probs().iter().sum();
                    prop_assert!((total - 1.0).abs() < 1e-9);
                    prop_assert!(b.probs().iter().all(|&p| p >= 0.0));
                }
            }
        }
    }
}
