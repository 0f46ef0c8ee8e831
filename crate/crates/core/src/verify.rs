//! The explicit-cell verifier for fill / pack / closed modes.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::chain::{Chain, ChainError};
use crate::lattice::{turn_class, BoxSpec, Cell, Mode, TurnClass};
use crate::program::{expand_program, program_length, CodecError, Instruction, Program};

/// Cells beyond which the explicit verifier refuses to expand.
pub const EXPAND_LIMIT: usize = 8_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ViolationKind {
    LengthMismatch,
    OutOfBox,
    SelfCollision,
    TurnMismatch { expected: Instruction, found: TurnClass },
    NotFilled,
    NotClosed,
    TerminalMismatch,
    ShiftMismatch,
}

/// First violated constraint: 1-based instruction index and offending cell
/// where meaningful.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: Option<u128>,
    pub cell: Option<Cell>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct VerifyStats {
    pub cells_visited: u128,
    pub cells_in_box: u128,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub reason: Option<Violation>,
    pub stats: VerifyStats,
}

impl VerifyReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    fn reject(kind: ViolationKind, index: Option<u128>, cell: Option<Cell>, stats: VerifyStats) -> VerifyReport {
        VerifyReport { verdict: Verdict::Reject, reason: Some(Violation { kind, index, cell }), stats }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("program and chain lattices disagree")]
    LatticeMismatch,
    #[error("malformed chain: {0}")]
    MalformedChain(#[from] ChainError),
    #[error("program too large for the explicit verifier: {0}")]
    ProgramTooLarge(CodecError),
    #[error("compressed verification unsupported for this input: {0}")]
    Unsupported(&'static str),
    #[error("periodic block's declared shift differs from its pattern displacement")]
    ShiftMismatch,
    #[error("verification work budget exceeded")]
    BudgetExceeded,
}

/// Occupancy set: dense for boxes that fit, tree-backed otherwise.
enum Occupancy {
    Dense(Vec<u64>, BoxSpec),
    Sparse(BTreeSet<Cell>),
}

impl Occupancy {
    fn for_box(bx: &BoxSpec) -> Occupancy {
        if bx.volume() <= (1u128 << 31) {
            let words = (bx.volume() as usize + 63) / 64;
            Occupancy::Dense(alloc::vec![0u64; words], bx.clone())
        } else {
            Occupancy::Sparse(BTreeSet::new())
        }
    }

    /// Insert; false if already present.
    fn insert(&mut self, c: Cell) -> bool {
        match self {
            Occupancy::Dense(bits, bx) => {
                let idx = bx.linear_index(c);
                let (w, b) = (idx / 64, idx % 64);
                if bits[w] >> b & 1 == 1 {
                    false
                } else {
                    bits[w] |= 1 << b;
                    true
                }
            }
            Occupancy::Sparse(set) => set.insert(c),
        }
    }
}

/// Verify an explicit chain against a program in a box.
///
/// Accepts iff the chain length equals the program length, every interior
/// instruction matches the realized turn class (first and last instructions
/// have no effect), cells stay in the box and are pairwise distinct (a closed
/// chain repeats its first cell as its last, counted once), and the mode's
/// extra requirement holds: fill visits every box cell, closed-pack ends at
/// its start cell. Boundary terminals, when present, pin the endpoints.
pub fn verify_chain(p: &Program, c: &Chain, bx: &BoxSpec) -> Result<VerifyReport, VerifyError> {
    if p.alphabet() != bx.lattice.alphabet() || c.lattice != bx.lattice {
        return Err(VerifyError::LatticeMismatch);
    }
    let instrs = expand_program(p, EXPAND_LIMIT).map_err(VerifyError::ProgramTooLarge)?;
    let mut stats = VerifyStats { cells_visited: 0, cells_in_box: bx.volume() };

    let k = instrs.len();
    let chain_len = c.cell_count();
    if chain_len != program_length(p) {
        stats.cells_visited = chain_len.to_u128().unwrap_or(u128::MAX);
        return Ok(VerifyReport::reject(ViolationKind::LengthMismatch, None, None, stats));
    }
    let cells = c.expand_cells(EXPAND_LIMIT)?;
    stats.cells_visited = cells.len() as u128;
    verify_cells(&instrs, &cells, bx, stats, k)
}

/// Shared explicit-cells checker; `cells.len()` must equal `k`.
pub(crate) fn verify_cells(
    instrs: &[Instruction],
    cells: &[Cell],
    bx: &BoxSpec,
    stats: VerifyStats,
    k: usize,
) -> Result<VerifyReport, VerifyError> {
    debug_assert_eq!(cells.len(), k);
    if k == 0 {
        // Empty program: accept only an (impossible) empty chain; a chain has
        // at least its start cell, so lengths already matched means k >= 1.
        return Ok(VerifyReport { verdict: Verdict::Accept, reason: None, stats });
    }
    let closed_repeat = bx.mode == Mode::ClosedPack && k >= 2 && cells[0] == cells[k - 1];
    let mut occ = Occupancy::for_box(bx);
    for (i, &cell) in cells.iter().enumerate() {
        if !bx.contains(cell) {
            return Ok(VerifyReport::reject(
                ViolationKind::OutOfBox,
                Some(i as u128 + 1),
                Some(cell),
                stats,
            ));
        }
        let is_closing_cell = closed_repeat && i == k - 1;
        if !is_closing_cell && !occ.insert(cell) {
            return Ok(VerifyReport::reject(
                ViolationKind::SelfCollision,
                Some(i as u128 + 1),
                Some(cell),
                stats,
            ));
        }
        if i >= 2 {
            // Interior instruction at the middle cell (1-based index i).
            let t = turn_class(cells[i - 2], cells[i - 1], cell, bx.lattice)
                .expect("consecutive chain cells are adjacent");
            let expected = instrs[i - 1];
            if !t.matches(expected) {
                return Ok(VerifyReport::reject(
                    ViolationKind::TurnMismatch { expected, found: t },
                    Some(i as u128),
                    Some(cells[i - 1]),
                    stats,
                ));
            }
        }
    }
    if let Some((u, v)) = bx.terminals {
        if cells[0] != u || cells[k - 1] != v {
            return Ok(VerifyReport::reject(ViolationKind::TerminalMismatch, None, Some(cells[0]), stats));
        }
    }
    match bx.mode {
        Mode::Fill => {
            if (k as u128) != bx.volume() {
                return Ok(VerifyReport::reject(ViolationKind::NotFilled, None, None, stats));
            }
        }
        Mode::Pack => {}
        Mode::ClosedPack => {
            if !closed_repeat {
                return Ok(VerifyReport::reject(ViolationKind::NotClosed, None, None, stats));
            }
        }
    }
    Ok(VerifyReport { verdict: Verdict::Accept, reason: None, stats })
}

/// Replace each wildcard in `p` by the literal the chain realizes. Used by the
/// wildcard-acceptance property: the realized program must still verify.
pub fn realize_wildcards(p: &Program, c: &Chain, bx: &BoxSpec) -> Result<Program, VerifyError> {
    let instrs = expand_program(p, EXPAND_LIMIT).map_err(VerifyError::ProgramTooLarge)?;
    let cells = c.expand_cells(EXPAND_LIMIT)?;
    if cells.len() != instrs.len() {
        return Err(VerifyError::Unsupported("length mismatch"));
    }
    let mut out = Vec::with_capacity(instrs.len());
    for (i, &instr) in instrs.iter().enumerate() {
        let realized = if instr == Instruction::Wildcard && i >= 1 && i + 1 < cells.len() {
            match turn_class(cells[i - 1], cells[i], cells[i + 1], bx.lattice) {
                Ok(TurnClass::Straight) => Instruction::Straight,
                Ok(TurnClass::Turn90) => Instruction::Turn90,
                _ => instr,
            }
        } else if instr == Instruction::Wildcard {
            // First/last instructions have no effect; pick S.
            Instruction::Straight
        } else {
            instr
        };
        out.push(realized);
    }
    Program::literal(p.alphabet(), &out).map_err(|_| VerifyError::Unsupported("bad realization"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Run;
    use crate::lattice::Dir;
    use crate::lattice::LatticeKind;
    use crate::program::{parse_program, Alphabet};

    fn sq(text: &str) -> Program {
        parse_program(text, Alphabet::Square).unwrap()
    }

    #[test]
    fn straight_line_fill_accepts() {
        let p = sq("(S)^7");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_run(Dir::E, 6u32);
        let bx = BoxSpec::square(1, 7, Mode::Fill);
        let rep = verify_chain(&p, &c, &bx).unwrap();
        assert!(rep.accepted(), "{rep:?}");
        assert_eq!(rep.stats.cells_visited, 7);
    }

    #[test]
    fn ttt_on_a_line_rejects_at_instruction_two() {
        let p = sq("TTT");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_run(Dir::E, 2u32);
        let bx = BoxSpec::square(1, 3, Mode::Fill);
        let rep = verify_chain(&p, &c, &bx).unwrap();
        assert_eq!(rep.verdict, Verdict::Reject);
        let v = rep.reason.unwrap();
        assert_eq!(v.index, Some(2));
        assert!(matches!(v.kind, ViolationKind::TurnMismatch { .. }));
    }

    #[test]
    fn unit_square_closed() {
        let p = sq("TTTT");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_step(Dir::E);
        c.push_step(Dir::S);
        c.push_step(Dir::W);
        let bx = BoxSpec::square(2, 2, Mode::Fill);
        assert!(verify_chain(&p, &c, &bx).unwrap().accepted());
        // The same walk plus a return to the start is a closed chain.
        let p2 = sq("TTTTT");
        let mut c2 = c.clone();
        c2.push_step(Dir::N);
        let bx2 = BoxSpec::new(
            LatticeKind::Square,
            crate::lattice::Dims { d: 1, h: 2, w: 2 },
            Mode::ClosedPack,
            None,
        )
        .unwrap();
        assert!(verify_chain(&p2, &c2, &bx2).unwrap().accepted());
        // In fill mode the repeated start cell is a collision.
        let bxf = BoxSpec::square(2, 2, Mode::Fill);
        let rep = verify_chain(&p2, &c2, &bxf).unwrap();
        assert_eq!(rep.verdict, Verdict::Reject);
        assert!(matches!(rep.reason.unwrap().kind, ViolationKind::SelfCollision));
    }

    #[test]
    fn fill_requires_every_cell() {
        let p = sq("SSS");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_run(Dir::E, 2u32);
        let bx = BoxSpec::square(2, 3, Mode::Fill);
        let rep = verify_chain(&p, &c, &bx).unwrap();
        assert!(matches!(rep.reason.as_ref().unwrap().kind, ViolationKind::NotFilled));
        let bxp = BoxSpec::square(2, 3, Mode::Pack);
        assert!(verify_chain(&p, &c, &bxp).unwrap().accepted());
    }

    #[test]
    fn out_of_box_rejects() {
        let p = sq("SSSS");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_run(Dir::E, 3u32);
        let bx = BoxSpec::square(1, 3, Mode::Pack);
        let rep = verify_chain(&p, &c, &bx).unwrap();
        assert!(matches!(rep.reason.as_ref().unwrap().kind, ViolationKind::OutOfBox));
    }

    #[test]
    fn periodic_block_expands_for_verification() {
        let p = sq("(S)^8");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_periodic(alloc::vec![Run::new(Dir::E, 1u32)], 7u32).unwrap();
        let bx = BoxSpec::square(1, 8, Mode::Fill);
        assert!(verify_chain(&p, &c, &bx).unwrap().accepted());
    }

    #[test]
    fn wildcard_realization_verifies() {
        let p = sq("(*)^4");
        let mut c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        c.push_step(Dir::E);
        c.push_step(Dir::S);
        c.push_step(Dir::W);
        let bx = BoxSpec::square(2, 2, Mode::Fill);
        assert!(verify_chain(&p, &c, &bx).unwrap().accepted());
        let realized = realize_wildcards(&p, &c, &bx).unwrap();
        assert!(verify_chain(&realized, &c, &bx).unwrap().accepted());
        assert_eq!(crate::program::render_program(&realized), "STTS");
    }

    #[test]
    fn lattice_mismatch_is_error() {
        let p = parse_program("(u)^3", Alphabet::Triangular).unwrap();
        let c = Chain::new(LatticeKind::Square, Cell::yx(0, 0));
        let bx = BoxSpec::square(1, 3, Mode::Pack);
        assert!(matches!(verify_chain(&p, &c, &bx), Err(VerifyError::LatticeMismatch)));
    }
}
