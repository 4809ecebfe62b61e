//! The assembly DSL: colored blocks, grid positions, chunk symbols and tower
//! programs built from `(thing, position)` steps.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const GRID_SIZE: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error(
        "chunk {chunk} anchored at {anchor} leaves the grid at offset ({row_offset}, {col_offset})"
    )]
    OutOfGrid {
        chunk: Chunk,
        anchor: Position,
        row_offset: i8,
        col_offset: i8,
    },
    #[error("unknown tower `{0}` (expected one of C, L, TREE)")]
    UnknownTower(String),
    #[error("position ({0}, {1}) is outside the {GRID_SIZE}x{GRID_SIZE} grid")]
    InvalidPosition(u8, u8),
    #[error("a step needs a block or chunk followed by a position, got {thing} {anchor}")]
    InvalidStep { thing: Symbol, anchor: Symbol },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    Red,
    Green,
    Blue,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Red, Block::Green, Block::Blue];
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::Red => "R",
            Block::Green => "G",
            Block::Blue => "B",
        })
    }
}

/// A cell of the 3x3 grid, 1-based `(row, col)` with row 1 at the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    row: u8,
    col: u8,
}

impl Position {
    pub fn new(row: u8, col: u8) -> Result<Self, DslError> {
        if (1..=GRID_SIZE).contains(&row) && (1..=GRID_SIZE).contains(&col) {
            Ok(Position { row, col })
        } else {
            Err(DslError::InvalidPosition(row, col))
        }
    }

    /// Panicking constructor for literals known to be on the grid.
    pub const fn at(row: u8, col: u8) -> Self {
        assert!(row >= 1 && row <= GRID_SIZE && col >= 1 && col <= GRID_SIZE);
        Position { row, col }
    }

    pub fn row(self) -> u8 {
        self.row
    }

    pub fn col(self) -> u8 {
        self.col
    }

    /// All nine positions in row-major order.
    pub fn all() -> [Position; 9] {
        let mut out = [Position::at(1, 1); 9];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = Position::at(i as u8 / GRID_SIZE + 1, i as u8 % GRID_SIZE + 1);
        }
        out
    }

    /// Row-major index in `0..9`.
    pub fn index(self) -> usize {
        usize::from((self.row - 1) * GRID_SIZE + (self.col - 1))
    }

    pub fn offset(self, row_offset: i8, col_offset: i8) -> Option<Position> {
        let row = i16::from(self.row) + i16::from(row_offset);
        let col = i16::from(self.col) + i16::from(col_offset);
        let range = 1..=i16::from(GRID_SIZE);
        (range.contains(&row) && range.contains(&col)).then(|| Position::at(row as u8, col as u8))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{},{}", self.row, self.col)
    }
}

/// Abstract symbols standing for a whole tower or a two-block sub-tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chunk {
    C,
    L,
    Tr,
    T,
    Pl,
}

impl Chunk {
    /// Canonical chunk order: towers first, then sub-towers.
    pub const ALL: [Chunk; 5] = [Chunk::C, Chunk::L, Chunk::Tr, Chunk::T, Chunk::Pl];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_tower(self) -> bool {
        matches!(self, Chunk::C | Chunk::L | Chunk::Tr)
    }

    pub fn is_sub_tower(self) -> bool {
        !self.is_tower()
    }

    pub fn template(self) -> ChunkTemplate {
        use Block::*;
        let parts: &'static [(Block, i8, i8)] = match self {
            Chunk::C => &[(Green, 0, 0), (Red, 1, 0), (Green, 0, 0)],
            Chunk::L => &[(Blue, 0, 0), (Red, 0, -1), (Red, 0, -1)],
            Chunk::Tr => &[(Red, 0, 0), (Green, 0, 0), (Blue, 0, 0)],
            Chunk::T => &[(Red, 0, 0), (Green, 0, 0)],
            Chunk::Pl => &[(Green, 0, 0), (Blue, 0, 0)],
        };
        ChunkTemplate { chunk: self, parts }
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chunk::C => "C_chunk",
            Chunk::L => "L_chunk",
            Chunk::Tr => "TR_chunk",
            Chunk::T => "T_chunk",
            Chunk::Pl => "PL_chunk",
        })
    }
}

/// Block placements of a chunk, as `(block, row_offset, col_offset)` relative
/// to the chunk's anchor position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkTemplate {
    pub chunk: Chunk,
    pub parts: &'static [(Block, i8, i8)],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Block,
    Position,
    Chunk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Block(Block),
    Position(Position),
    Chunk(Chunk),
}

impl Symbol {
    pub fn kind(self) -> SymbolKind {
        match self {
            Symbol::Block(_) => SymbolKind::Block,
            Symbol::Position(_) => SymbolKind::Position,
            Symbol::Chunk(_) => SymbolKind::Chunk,
        }
    }

    /// Every DSL symbol in canonical order: blocks, positions, chunks.
    pub fn all() -> Vec<Symbol> {
        SymbolKind::ALL.iter().flat_map(|k| k.symbols()).collect()
    }
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 3] = [SymbolKind::Block, SymbolKind::Position, SymbolKind::Chunk];

    /// The symbols of this category in canonical order.
    pub fn symbols(self) -> Vec<Symbol> {
        match self {
            SymbolKind::Block => Block::ALL.into_iter().map(Symbol::Block).collect(),
            SymbolKind::Position => Position::all().into_iter().map(Symbol::Position).collect(),
            SymbolKind::Chunk => Chunk::ALL.into_iter().map(Symbol::Chunk).collect(),
        }
    }

    pub fn size(self) -> usize {
        match self {
            SymbolKind::Block => 3,
            SymbolKind::Position => 9,
            SymbolKind::Chunk => 5,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Block(b) => b.fmt(f),
            Symbol::Position(p) => p.fmt(f),
            Symbol::Chunk(c) => c.fmt(f),
        }
    }
}

impl From<Block> for Symbol {
    fn from(b: Block) -> Self {
        Symbol::Block(b)
    }
}

impl From<Position> for Symbol {
    fn from(p: Position) -> Self {
        Symbol::Position(p)
    }
}

impl From<Chunk> for Symbol {
    fn from(c: Chunk) -> Self {
        Symbol::Chunk(c)
    }
}

/// What gets placed by a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Thing {
    Block(Block),
    Chunk(Chunk),
}

impl From<Thing> for Symbol {
    fn from(t: Thing) -> Self {
        match t {
            Thing::Block(b) => Symbol::Block(b),
            Thing::Chunk(c) => Symbol::Chunk(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub thing: Thing,
    pub anchor: Position,
}

impl Step {
    pub fn block(block: Block, anchor: Position) -> Self {
        Step {
            thing: Thing::Block(block),
            anchor,
        }
    }

    pub fn chunk(chunk: Chunk, anchor: Position) -> Self {
        Step {
            thing: Thing::Chunk(chunk),
            anchor,
        }
    }

    /// Builds a step from two loose symbols, checking the `(thing, position)` shape.
    pub fn from_symbols(thing: Symbol, anchor: Symbol) -> Result<Self, DslError> {
        let thing_part = match thing {
            Symbol::Block(b) => Thing::Block(b),
            Symbol::Chunk(c) => Thing::Chunk(c),
            Symbol::Position(_) => return Err(DslError::InvalidStep { thing, anchor }),
        };
        match anchor {
            Symbol::Position(p) => Ok(Step {
                thing: thing_part,
                anchor: p,
            }),
            _ => Err(DslError::InvalidStep { thing, anchor }),
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self.thing, Thing::Block(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TowerId {
    C,
    L,
    Tree,
}

impl TowerId {
    pub const ALL: [TowerId; 3] = [TowerId::C, TowerId::L, TowerId::Tree];
}

impl fmt::Display for TowerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TowerId::C => "C",
            TowerId::L => "L",
            TowerId::Tree => "TREE",
        })
    }
}

impl FromStr for TowerId {
    type Err = DslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C" => Ok(TowerId::C),
            "L" => Ok(TowerId::L),
            "TREE" => Ok(TowerId::Tree),
            _ => Err(DslError::UnknownTower(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerProgram {
    pub tower: TowerId,
    pub steps: Vec<Step>,
}

impl TowerProgram {
    pub fn new(tower: TowerId, steps: Vec<Step>) -> Self {
        TowerProgram { tower, steps }
    }

    /// The flat symbol sequence `thing, position, thing, position, ...`.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.steps
            .iter()
            .flat_map(|s| [Symbol::from(s.thing), Symbol::Position(s.anchor)])
            .collect()
    }

    pub fn chunks(&self) -> impl Iterator<Item = Chunk> + '_ {
        self.steps.iter().filter_map(|s| match s.thing {
            Thing::Chunk(c) => Some(c),
            Thing::Block(_) => None,
        })
    }

    pub fn is_primitive(&self) -> bool {
        self.steps.iter().all(Step::is_primitive)
    }
}

impl fmt::Display for TowerProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols().iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Number of symbols in the program (two per step).
pub fn program_length(program: &TowerProgram) -> usize {
    2 * program.steps.len()
}

/// Replaces every chunk step by its template blocks placed at `anchor + offset`.
pub fn expand_program(program: &TowerProgram) -> Result<TowerProgram, DslError> {
    let mut steps = Vec::with_capacity(program.steps.len() * 3);
    for step in &program.steps {
        match step.thing {
            Thing::Block(_) => steps.push(*step),
            Thing::Chunk(chunk) => {
                for &(block, dr, dc) in chunk.template().parts {
                    let pos = step.anchor.offset(dr, dc).ok_or(DslError::OutOfGrid {
                        chunk,
                        anchor: step.anchor,
                        row_offset: dr,
                        col_offset: dc,
                    })?;
                    steps.push(Step::block(block, pos));
                }
            }
        }
    }
    Ok(TowerProgram::new(program.tower, steps))
}

/// The programs for a tower, ordered from fully primitive to most abstract.
/// Anchors are fixed to the target placement of each tower.
pub fn programs_for_tower(tower: TowerId) -> Vec<TowerProgram> {
    use Block::*;
    let prog = |steps: Vec<Step>| TowerProgram::new(tower, steps);
    match tower {
        TowerId::C => {
            let (p21, p31) = (Position::at(2, 1), Position::at(3, 1));
            vec![
                prog(vec![
                    Step::block(Green, p21),
                    Step::block(Red, p31),
                    Step::block(Green, p21),
                ]),
                prog(vec![Step::chunk(Chunk::C, p21)]),
            ]
        }
        TowerId::L => {
            let (p12, p11) = (Position::at(1, 2), Position::at(1, 1));
            vec![
                prog(vec![
                    Step::block(Blue, p12),
                    Step::block(Red, p11),
                    Step::block(Red, p11),
                ]),
                prog(vec![Step::chunk(Chunk::L, p12)]),
            ]
        }
        TowerId::Tree => {
            let p33 = Position::at(3, 3);
            vec![
                prog(vec![
                    Step::block(Red, p33),
                    Step::block(Green, p33),
                    Step::block(Blue, p33),
                ]),
                prog(vec![Step::chunk(Chunk::T, p33), Step::block(Blue, p33)]),
                prog(vec![Step::block(Red, p33), Step::chunk(Chunk::Pl, p33)]),
                prog(vec![Step::chunk(Chunk::Tr, p33)]),
            ]
        }
    }
}

/// Looks a tower up by name, e.g. `"TREE"`.
pub fn programs_for_tower_name(name: &str) -> Result<Vec<TowerProgram>, DslError> {
    Ok(programs_for_tower(name.parse()?))
}
