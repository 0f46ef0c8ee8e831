//! Chain witnesses: explicit runs and periodic run-length blocks.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::lattice::{Cell, Dir, LatticeKind};

/// `len` unit steps in one direction, appending `len` new cells.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Run {
    pub dir: Dir,
    pub len: BigUint,
}

impl Run {
    pub fn new(dir: Dir, len: impl Into<BigUint>) -> Run {
        Run { dir, len: len.into() }
    }
}

/// The pattern repeated `count` times; the k-th copy is the pattern
/// translated by `(k-1) * shift`, which must equal the pattern's net
/// displacement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PeriodicBlock {
    pub pattern: Vec<Run>,
    pub count: BigUint,
    pub shift: (i64, i64, i64),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Move {
    Run(Run),
    Periodic(PeriodicBlock),
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ChainError {
    #[error("run length must be at least 1")]
    EmptyRun,
    #[error("periodic block count must be at least 1")]
    EmptyBlock,
    #[error("direction not valid for chain lattice")]
    BadDirection,
    #[error("coordinate arithmetic overflow")]
    Overflow,
    #[error("chain of {len} cells exceeds expansion limit {limit}")]
    TooLong { len: BigUint, limit: usize },
    #[error("cells are not consecutively adjacent")]
    NotAdjacent,
}

/// A lattice path witness, in explicit-run or periodic run-length form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain {
    pub lattice: LatticeKind,
    pub start: Cell,
    pub moves: Vec<Move>,
}

impl Chain {
    pub fn new(lattice: LatticeKind, start: Cell) -> Chain {
        Chain { lattice, start, moves: Vec::new() }
    }

    /// Number of cells, counting the start.
    pub fn cell_count(&self) -> BigUint {
        let mut total = BigUint::one();
        for m in &self.moves {
            match m {
                Move::Run(r) => total += &r.len,
                Move::Periodic(b) => {
                    let mut per = BigUint::zero();
                    for r in &b.pattern {
                        per += &r.len;
                    }
                    total += per * &b.count;
                }
            }
        }
        total
    }

    pub fn push_run(&mut self, dir: Dir, len: impl Into<BigUint>) {
        let len: BigUint = len.into();
        if len.is_zero() {
            return;
        }
        // Merge with a trailing run in the same direction.
        if let Some(Move::Run(last)) = self.moves.last_mut() {
            if last.dir == dir {
                last.len += len;
                return;
            }
        }
        self.moves.push(Move::Run(Run { dir, len }));
    }

    pub fn push_step(&mut self, dir: Dir) {
        self.push_run(dir, 1u32);
    }

    /// Append a periodic block, computing its shift from the pattern.
    pub fn push_periodic(
        &mut self,
        pattern: Vec<Run>,
        count: impl Into<BigUint>,
    ) -> Result<(), ChainError> {
        let count: BigUint = count.into();
        if count.is_zero() {
            return Err(ChainError::EmptyBlock);
        }
        if pattern.iter().any(|r| r.len.is_zero()) {
            return Err(ChainError::EmptyRun);
        }
        if count.is_one() {
            for r in pattern {
                self.push_run(r.dir, r.len);
            }
            return Ok(());
        }
        let shift = pattern_shift(&pattern).ok_or(ChainError::Overflow)?;
        self.moves.push(Move::Periodic(PeriodicBlock { pattern, count, shift }));
        Ok(())
    }

    /// Build a chain from an explicit cell sequence, run-length compressing
    /// consecutive equal directions.
    pub fn from_cells(lattice: LatticeKind, cells: &[Cell]) -> Result<Chain, ChainError> {
        assert!(!cells.is_empty(), "chain needs at least one cell");
        let mut chain = Chain::new(lattice, cells[0]);
        for pair in cells.windows(2) {
            let dir = Dir::between(pair[0], pair[1], lattice).ok_or(ChainError::NotAdjacent)?;
            chain.push_step(dir);
        }
        Ok(chain)
    }

    /// Expand to the explicit cell sequence. Errors when longer than `limit`.
    pub fn expand_cells(&self, limit: usize) -> Result<Vec<Cell>, ChainError> {
        let len = self.cell_count();
        let Some(len) = len.to_usize().filter(|&l| l <= limit) else {
            return Err(ChainError::TooLong { len, limit });
        };
        let mut cells = Vec::with_capacity(len);
        cells.push(self.start);
        let mut pos = self.start;
        let walk_run = |pos: &mut Cell, cells: &mut Vec<Cell>, r: &Run| {
            let n = r.len.to_usize().expect("length checked");
            for _ in 0..n {
                *pos = pos.step(r.dir);
                cells.push(*pos);
            }
        };
        for m in &self.moves {
            match m {
                Move::Run(r) => walk_run(&mut pos, &mut cells, r),
                Move::Periodic(b) => {
                    let count = b.count.to_usize().expect("length checked");
                    for _ in 0..count {
                        for r in &b.pattern {
                            walk_run(&mut pos, &mut cells, r);
                        }
                    }
                }
            }
        }
        Ok(cells)
    }

    /// The final cell, computed without expanding. Errors if the chain walks
    /// outside the signed 64-bit coordinate range.
    pub fn end_cell(&self) -> Result<Cell, ChainError> {
        let mut pos = (self.start.d as i128, self.start.y as i128, self.start.x as i128);
        for m in &self.moves {
            let (delta, times) = match m {
                Move::Run(r) => {
                    let (dd, dy, dx) = r.dir.delta();
                    let len = r.len.to_i128().ok_or(ChainError::Overflow)?;
                    ((dd as i128 * len, dy as i128 * len, dx as i128 * len), 1i128)
                }
                Move::Periodic(b) => {
                    let count = b.count.to_i128().ok_or(ChainError::Overflow)?;
                    let (sd, sy, sx) = b.shift;
                    ((sd as i128, sy as i128, sx as i128), count)
                }
            };
            pos.0 = pos.0.checked_add(delta.0.checked_mul(times).ok_or(ChainError::Overflow)?)
                .ok_or(ChainError::Overflow)?;
            pos.1 = pos.1.checked_add(delta.1.checked_mul(times).ok_or(ChainError::Overflow)?)
                .ok_or(ChainError::Overflow)?;
            pos.2 = pos.2.checked_add(delta.2.checked_mul(times).ok_or(ChainError::Overflow)?)
                .ok_or(ChainError::Overflow)?;
        }
        let d = i64::try_from(pos.0).map_err(|_| ChainError::Overflow)?;
        let y = i64::try_from(pos.1).map_err(|_| ChainError::Overflow)?;
        let x = i64::try_from(pos.2).map_err(|_| ChainError::Overflow)?;
        Ok(Cell { d, y, x })
    }

    /// Total number of runs, counting a periodic block's pattern once.
    pub fn run_count(&self) -> usize {
        self.moves
            .iter()
            .map(|m| match m {
                Move::Run(_) => 1,
                Move::Periodic(b) => b.pattern.len(),
            })
            .sum()
    }
}

/// Net displacement of a run pattern, or None on (absurd) overflow.
pub fn pattern_shift(pattern: &[Run]) -> Option<(i64, i64, i64)> {
    let mut acc = (0i128, 0i128, 0i128);
    for r in pattern {
        let (dd, dy, dx) = r.dir.delta();
        let len = r.len.to_i128()?;
        acc.0 = acc.0.checked_add(dd as i128 * len)?;
        acc.1 = acc.1.checked_add(dy as i128 * len)?;
        acc.2 = acc.2.checked_add(dx as i128 * len)?;
    }
    Some((
        i64::try_from(acc.0).ok()?,
        i64::try_from(acc.1).ok()?,
        i64::try_from(acc.2).ok()?,
    ))
}
