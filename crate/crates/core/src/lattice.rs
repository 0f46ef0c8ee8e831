//! Lattice geometry: cells, directions, turn classification and box specs.
//!
//! Cubic cells are `(layer d, row y, column x)`. Triangular cells store the
//! lattice coefficients `(j, i)` of the point `i*v1 + j*v2` in `(y, x)` with
//! `d = 0`, where `v1 = (1, 0)` and `v2 = (cos 60°, sin 60°)`. All arithmetic
//! is exact.

use crate::program::Alphabet;
use crate::program::Instruction;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LatticeKind {
    Square,
    Square3d,
    Triangular,
}

impl LatticeKind {
    pub fn alphabet(self) -> Alphabet {
        match self {
            LatticeKind::Square | LatticeKind::Square3d => Alphabet::Square,
            LatticeKind::Triangular => Alphabet::Triangular,
        }
    }

    /// Directions in the fixed child order used by the solver.
    pub fn dirs(self) -> &'static [Dir] {
        match self {
            LatticeKind::Square => &[Dir::E, Dir::W, Dir::N, Dir::S],
            LatticeKind::Square3d => &[Dir::E, Dir::W, Dir::N, Dir::S, Dir::U, Dir::D],
            LatticeKind::Triangular => {
                &[Dir::Ta, Dir::Tb, Dir::Tc, Dir::Td, Dir::Te, Dir::Tf]
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Square => "square",
            LatticeKind::Square3d => "square3d",
            LatticeKind::Triangular => "triangular",
        }
    }

    pub fn from_name(name: &str) -> Option<LatticeKind> {
        Some(match name {
            "square" => LatticeKind::Square,
            "square3d" => LatticeKind::Square3d,
            "triangular" => LatticeKind::Triangular,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Cell {
    pub d: i64,
    pub y: i64,
    pub x: i64,
}

impl Cell {
    pub const fn new(d: i64, y: i64, x: i64) -> Cell {
        Cell { d, y, x }
    }

    /// 2D convenience constructor (layer 0).
    pub const fn yx(y: i64, x: i64) -> Cell {
        Cell { d: 0, y, x }
    }

    pub fn step(self, dir: Dir) -> Cell {
        let (dd, dy, dx) = dir.delta();
        Cell { d: self.d + dd, y: self.y + dy, x: self.x + dx }
    }

    pub fn offset(self, other: Cell) -> (i64, i64, i64) {
        (other.d - self.d, other.y - self.y, other.x - self.x)
    }
}

/// Unit step directions. Cubic: `E/W` along x, `N/S` along y (N decreases y),
/// `U/D` along the layer axis. Triangular: the six lattice directions in
/// counterclockwise order starting at `+v1`, named `a`..`f` in witness files.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Dir {
    E,
    W,
    N,
    S,
    U,
    D,
    Ta,
    Tb,
    Tc,
    Td,
    Te,
    Tf,
}

impl Dir {
    pub fn delta(self) -> (i64, i64, i64) {
        match self {
            Dir::E => (0, 0, 1),
            Dir::W => (0, 0, -1),
            Dir::N => (0, -1, 0),
            Dir::S => (0, 1, 0),
            Dir::U => (1, 0, 0),
            Dir::D => (-1, 0, 0),
            // (d, j, i) with the point at i*v1 + j*v2.
            Dir::Ta => (0, 0, 1),
            Dir::Tb => (0, 1, 0),
            Dir::Tc => (0, 1, -1),
            Dir::Td => (0, 0, -1),
            Dir::Te => (0, -1, 0),
            Dir::Tf => (0, -1, 1),
        }
    }

    pub fn reverse(self) -> Dir {
        match self {
            Dir::E => Dir::W,
            Dir::W => Dir::E,
            Dir::N => Dir::S,
            Dir::S => Dir::N,
            Dir::U => Dir::D,
            Dir::D => Dir::U,
            Dir::Ta => Dir::Td,
            Dir::Tb => Dir::Te,
            Dir::Tc => Dir::Tf,
            Dir::Td => Dir::Ta,
            Dir::Te => Dir::Tb,
            Dir::Tf => Dir::Tc,
        }
    }

    pub fn is_triangular(self) -> bool {
        matches!(self, Dir::Ta | Dir::Tb | Dir::Tc | Dir::Td | Dir::Te | Dir::Tf)
    }

    pub fn lattice_ok(self, lattice: LatticeKind) -> bool {
        lattice.dirs().contains(&self)
    }

    /// Index 0..6 of a triangular direction in counterclockwise order.
    fn tri_index(self) -> Option<u8> {
        Some(match self {
            Dir::Ta => 0,
            Dir::Tb => 1,
            Dir::Tc => 2,
            Dir::Td => 3,
            Dir::Te => 4,
            Dir::Tf => 5,
            _ => return None,
        })
    }

    pub fn from_tri_index(idx: u8) -> Dir {
        match idx % 6 {
            0 => Dir::Ta,
            1 => Dir::Tb,
            2 => Dir::Tc,
            3 => Dir::Td,
            4 => Dir::Te,
            _ => Dir::Tf,
        }
    }

    /// Rotate a triangular direction counterclockwise by `steps` sixths.
    pub fn tri_rotate(self, steps: i8) -> Dir {
        let idx = self.tri_index().expect("triangular direction");
        Dir::from_tri_index(((idx as i8 + steps).rem_euclid(6)) as u8)
    }

    pub fn letter(self) -> char {
        match self {
            Dir::E => 'E',
            Dir::W => 'W',
            Dir::N => 'N',
            Dir::S => 'S',
            Dir::U => 'U',
            Dir::D => 'D',
            Dir::Ta => 'a',
            Dir::Tb => 'b',
            Dir::Tc => 'c',
            Dir::Td => 'd',
            Dir::Te => 'e',
            Dir::Tf => 'f',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        Some(match c {
            'E' => Dir::E,
            'W' => Dir::W,
            'N' => Dir::N,
            'S' => Dir::S,
            'U' => Dir::U,
            'D' => Dir::D,
            'a' => Dir::Ta,
            'b' => Dir::Tb,
            'c' => Dir::Tc,
            'd' => Dir::Td,
            'e' => Dir::Te,
            'f' => Dir::Tf,
            _ => return None,
        })
    }

    /// The direction of the unit step from `p` to `q`, if they are adjacent.
    pub fn between(p: Cell, q: Cell, lattice: LatticeKind) -> Option<Dir> {
        let delta = p.offset(q);
        lattice.dirs().iter().copied().find(|d| d.delta() == delta)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TurnClass {
    Straight,
    Turn90,
    Turn60,
    Turn120,
    /// `r == p`: geometrically a 0° interior angle. No instruction accepts it.
    Reversal,
}

impl TurnClass {
    /// Does an instruction admit this turn class?
    pub fn matches(self, instr: Instruction) -> bool {
        match instr {
            Instruction::Straight => self == TurnClass::Straight,
            Instruction::Turn90 => self == TurnClass::Turn90,
            Instruction::Wildcard => {
                self == TurnClass::Straight || self == TurnClass::Turn90
            }
            Instruction::Turn60 => self == TurnClass::Turn60,
            Instruction::Turn120 => self == TurnClass::Turn120,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("cells are not adjacent on this lattice")]
    NotAdjacent,
    #[error("direction is not valid for this lattice")]
    BadDirection,
}

/// Classify the interior angle at `q` given the step classes of the lattice.
pub fn turn_class(p: Cell, q: Cell, r: Cell, lattice: LatticeKind) -> Result<TurnClass, LatticeError> {
    let d1 = Dir::between(p, q, lattice).ok_or(LatticeError::NotAdjacent)?;
    let d2 = Dir::between(q, r, lattice).ok_or(LatticeError::NotAdjacent)?;
    Ok(turn_between(d1, d2, lattice))
}

/// Turn class between consecutive step directions.
pub fn turn_between(d1: Dir, d2: Dir, lattice: LatticeKind) -> TurnClass {
    if d1 == d2 {
        return TurnClass::Straight;
    }
    if d2 == d1.reverse() {
        return TurnClass::Reversal;
    }
    match lattice {
        LatticeKind::Square | LatticeKind::Square3d => TurnClass::Turn90,
        LatticeKind::Triangular => {
            let a = d1.tri_index().expect("triangular dir") as i8;
            let b = d2.tri_index().expect("triangular dir") as i8;
            match (b - a).rem_euclid(6) {
                1 | 5 => TurnClass::Turn60,
                2 | 4 => TurnClass::Turn120,
                _ => unreachable!(),
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Fill,
    Pack,
    ClosedPack,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Fill => "fill",
            Mode::Pack => "pack",
            Mode::ClosedPack => "closed",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        Some(match name {
            "fill" => Mode::Fill,
            "pack" => Mode::Pack,
            "closed" | "closed-pack" => Mode::ClosedPack,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dims {
    pub d: u64,
    pub h: u64,
    pub w: u64,
}

impl Dims {
    pub fn volume(self) -> u128 {
        self.d as u128 * self.h as u128 * self.w as u128
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum BoxError {
    #[error("box dimensions must be at least 1 and fit signed 64-bit")]
    BadDims,
    #[error("lattice and dimensions disagree")]
    LatticeMismatch,
    #[error("terminals must be adjacent cells on the box boundary")]
    BadTerminals,
}

/// The target region: a D×H×W cuboid or a 60° parallelogram (as an H×W
/// coefficient rectangle), plus the required mode and optional boundary
/// terminals for bounded-path variants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoxSpec {
    pub lattice: LatticeKind,
    pub dims: Dims,
    pub mode: Mode,
    pub terminals: Option<(Cell, Cell)>,
}

impl BoxSpec {
    pub fn new(
        lattice: LatticeKind,
        dims: Dims,
        mode: Mode,
        terminals: Option<(Cell, Cell)>,
    ) -> Result<BoxSpec, BoxError> {
        let max = i64::MAX as u64;
        if dims.d == 0 || dims.h == 0 || dims.w == 0 || dims.d > max || dims.h > max || dims.w > max
        {
            return Err(BoxError::BadDims);
        }
        match lattice {
            LatticeKind::Square | LatticeKind::Triangular => {
                if dims.d != 1 {
                    return Err(BoxError::LatticeMismatch);
                }
            }
            LatticeKind::Square3d => {}
        }
        let bx = BoxSpec { lattice, dims, mode, terminals };
        if let Some((u, v)) = terminals {
            if !bx.contains(u) || !bx.contains(v) || !bx.on_boundary(u) || !bx.on_boundary(v) {
                return Err(BoxError::BadTerminals);
            }
            if Dir::between(u, v, lattice).is_none() {
                return Err(BoxError::BadTerminals);
            }
        }
        Ok(bx)
    }

    pub fn square(h: u64, w: u64, mode: Mode) -> BoxSpec {
        BoxSpec::new(LatticeKind::Square, Dims { d: 1, h, w }, mode, None).unwrap()
    }

    pub fn square3d(d: u64, h: u64, w: u64, mode: Mode) -> BoxSpec {
        BoxSpec::new(LatticeKind::Square3d, Dims { d, h, w }, mode, None).unwrap()
    }

    pub fn triangular(h: u64, w: u64, mode: Mode) -> BoxSpec {
        BoxSpec::new(LatticeKind::Triangular, Dims { d: 1, h, w }, mode, None).unwrap()
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.d >= 0
            && c.y >= 0
            && c.x >= 0
            && (c.d as u64) < self.dims.d
            && (c.y as u64) < self.dims.h
            && (c.x as u64) < self.dims.w
    }

    pub fn on_boundary(&self, c: Cell) -> bool {
        if !self.contains(c) {
            return false;
        }
        let last_d = self.dims.d as i64 - 1;
        let last_y = self.dims.h as i64 - 1;
        let last_x = self.dims.w as i64 - 1;
        c.d == 0 || c.d == last_d || c.y == 0 || c.y == last_y || c.x == 0 || c.x == last_x
    }

    pub fn volume(&self) -> u128 {
        self.dims.volume()
    }

    /// Dense index of a contained cell, in (d, y, x) lexicographic order.
    pub fn linear_index(&self, c: Cell) -> usize {
        debug_assert!(self.contains(c));
        ((c.d as u64 * self.dims.h + c.y as u64) * self.dims.w + c.x as u64) as usize
    }
}
