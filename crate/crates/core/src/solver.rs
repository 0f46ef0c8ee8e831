//! Desk-scale exhaustive search: find a chain following a program in a box,
//! or prove none exists.
//!
//! The search is a DFS over (cell, heading) states with instruction-indexed
//! transitions. Child ordering is fixed (the lattice direction order), so
//! with symmetry reduction off the returned witness is the lexicographically
//! least one. Forced straight runs are placed in one step; the optional
//! pruning rules never change the SAT/UNSAT verdict.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::chain::Chain;
use crate::lattice::{BoxSpec, Cell, Dir, LatticeKind, Mode};
use crate::program::{expand_program, CodecError, Instruction, Program};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub symmetry_reduction: bool,
    pub prune_connectivity: bool,
    pub prune_parity: bool,
    pub prune_segment_fit: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            node_budget: u64::MAX,
            symmetry_reduction: true,
            prune_connectivity: true,
            prune_parity: true,
            prune_segment_fit: true,
        }
    }
}

impl SearchConfig {
    pub fn no_pruning() -> SearchConfig {
        SearchConfig {
            node_budget: u64::MAX,
            symmetry_reduction: false,
            prune_connectivity: false,
            prune_parity: false,
            prune_segment_fit: false,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> SearchConfig {
        self.node_budget = budget.max(1);
        self
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveOutcome {
    Sat(Chain),
    Unsat,
    BudgetExhausted,
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum SolverError {
    #[error("program too large to expand for search: {0}")]
    ProgramTooLarge(CodecError),
    #[error("program/box lattice mismatch")]
    LatticeMismatch,
    #[error("search node budget exhausted")]
    Budget,
}

/// Search for a chain following `p` inside `bx`.
pub fn solve(p: &Program, bx: &BoxSpec, cfg: &SearchConfig) -> Result<SolveOutcome, SolverError> {
    let mut found = None;
    let outcome = run_search(p, bx, cfg, &mut |cells| {
        found = Some(Chain::from_cells(bx.lattice, cells).expect("search emits adjacent cells"));
        true
    })?;
    Ok(match outcome {
        SearchEnd::Stopped => SolveOutcome::Sat(found.expect("stop implies a witness")),
        SearchEnd::Exhausted => SolveOutcome::Unsat,
        SearchEnd::Budget => SolveOutcome::BudgetExhausted,
    })
}

/// Count chains following `p` in `bx`, saturating at `cap`. With
/// `up_to_symmetry` the count is of orbits under the box symmetry group.
pub fn count_solutions(
    p: &Program,
    bx: &BoxSpec,
    cfg: &SearchConfig,
    cap: u64,
    up_to_symmetry: bool,
) -> Result<u64, SolverError> {
    // Raw counting must see every chain, so start-state symmetry reduction is
    // disabled; orbit counting canonicalizes each found chain instead.
    let cfg = SearchConfig { symmetry_reduction: false, ..*cfg };
    let transforms = if up_to_symmetry { box_transforms(bx) } else { Vec::new() };
    let mut raw = 0u64;
    let mut orbits: BTreeSet<Vec<Cell>> = BTreeSet::new();
    let outcome = run_search(p, bx, &cfg, &mut |cells| {
        if up_to_symmetry {
            orbits.insert(canonical_form(cells, &transforms, bx));
            orbits.len() as u64 >= cap
        } else {
            raw += 1;
            raw >= cap
        }
    })?;
    if outcome == SearchEnd::Budget {
        return Err(SolverError::Budget);
    }
    Ok(if up_to_symmetry { orbits.len() as u64 } else { raw })
}

fn canonical_form(cells: &[Cell], transforms: &[Transform], bx: &BoxSpec) -> Vec<Cell> {
    let mut best: Option<Vec<Cell>> = None;
    for t in transforms {
        let image: Vec<Cell> = cells.iter().map(|&c| t.apply_cell(c, bx)).collect();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.unwrap_or_else(|| cells.to_vec())
}

#[derive(PartialEq, Eq, Clone, Copy, Debug)]
enum SearchEnd {
    /// The visitor asked to stop (witness found / cap reached).
    Stopped,
    Exhausted,
    Budget,
}

/// Box symmetry transforms: signed axis permutations preserving the cuboid,
/// or the parallelogram's half-turn (and the diagonal flip when square).
#[derive(Clone, Copy, Debug)]
enum Transform {
    Cubic { perm: [usize; 3], flip: [bool; 3] },
    TriRot180,
    TriTranspose,
    TriBoth,
    Identity,
}

impl Transform {
    fn apply_cell(self, c: Cell, bx: &BoxSpec) -> Cell {
        let dims = [bx.dims.d as i64, bx.dims.h as i64, bx.dims.w as i64];
        let coords = [c.d, c.y, c.x];
        match self {
            Transform::Identity => c,
            Transform::Cubic { perm, flip } => {
                let mut out = [0i64; 3];
                for axis in 0..3 {
                    let v = coords[perm[axis]];
                    out[axis] = if flip[axis] { dims[axis] - 1 - v } else { v };
                }
                Cell { d: out[0], y: out[1], x: out[2] }
            }
            Transform::TriRot180 => Cell { d: 0, y: dims[1] - 1 - c.y, x: dims[2] - 1 - c.x },
            Transform::TriTranspose => Cell { d: 0, y: c.x, x: c.y },
            Transform::TriBoth => Cell { d: 0, y: dims[2] - 1 - c.x, x: dims[1] - 1 - c.y },
        }
    }
}

fn box_transforms(bx: &BoxSpec) -> Vec<Transform> {
    let mut out = Vec::new();
    match bx.lattice {
        LatticeKind::Square | LatticeKind::Square3d => {
            let dims = [bx.dims.d, bx.dims.h, bx.dims.w];
            let perms: [[usize; 3]; 6] =
                [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            for perm in perms {
                if (0..3).any(|i| dims[perm[i]] != dims[i]) {
                    continue;
                }
                for bits in 0..8u8 {
                    let flip = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
                    out.push(Transform::Cubic { perm, flip });
                }
            }
        }
        LatticeKind::Triangular => {
            out.push(Transform::Identity);
            out.push(Transform::TriRot180);
            if bx.dims.h == bx.dims.w {
                out.push(Transform::TriTranspose);
                out.push(Transform::TriBoth);
            }
        }
    }
    out
}

struct Grid {
    volume: usize,
    /// neighbor[cell * dir_count + dir] = target cell index or NONE.
    neighbor: Vec<u32>,
    dirs: &'static [Dir],
    cells: Vec<Cell>,
}

const NONE: u32 = u32::MAX;

impl Grid {
    fn new(bx: &BoxSpec) -> Grid {
        let volume = bx.volume() as usize;
        let dirs = bx.lattice.dirs();
        let mut cells = Vec::with_capacity(volume);
        for d in 0..bx.dims.d as i64 {
            for y in 0..bx.dims.h as i64 {
                for x in 0..bx.dims.w as i64 {
                    cells.push(Cell { d, y, x });
                }
            }
        }
        let mut neighbor = alloc::vec![NONE; volume * dirs.len()];
        for (i, &c) in cells.iter().enumerate() {
            for (di, &dir) in dirs.iter().enumerate() {
                let n = c.step(dir);
                if bx.contains(n) {
                    neighbor[i * dirs.len() + di] = bx.linear_index(n) as u32;
                }
            }
        }
        Grid { volume, neighbor, dirs, cells }
    }

    fn step(&self, cell: u32, dir: usize) -> u32 {
        self.neighbor[cell as usize * self.dirs.len() + dir]
    }
}

/// Candidate next directions for each (instruction, heading) pair, in the
/// fixed lattice order.
fn candidate_table(lattice: LatticeKind) -> [Vec<Vec<u8>>; 5] {
    let dirs = lattice.dirs();
    let instrs = [
        Instruction::Straight,
        Instruction::Turn90,
        Instruction::Wildcard,
        Instruction::Turn60,
        Instruction::Turn120,
    ];
    let mut table: [Vec<Vec<u8>>; 5] = Default::default();
    for (ii, &instr) in instrs.iter().enumerate() {
        table[ii] = alloc::vec![Vec::new(); dirs.len()];
        for (hi, &h) in dirs.iter().enumerate() {
            let mut cands = Vec::new();
            for (ci, &c) in dirs.iter().enumerate() {
                if crate::lattice::turn_between(h, c, lattice).matches(instr) {
                    cands.push(ci as u8);
                }
            }
            table[ii][hi] = cands;
        }
    }
    table
}

fn instr_index(i: Instruction) -> usize {
    match i {
        Instruction::Straight => 0,
        Instruction::Turn90 => 1,
        Instruction::Wildcard => 2,
        Instruction::Turn60 => 3,
        Instruction::Turn120 => 4,
    }
}

/// Core DFS. Calls `on_solution` with the full cell path of every chain
/// found (in deterministic order); returning `true` stops the search.
fn run_search(
    p: &Program,
    bx: &BoxSpec,
    cfg: &SearchConfig,
    on_solution: &mut dyn FnMut(&[Cell]) -> bool,
) -> Result<SearchEnd, SolverError> {
    if p.alphabet() != bx.lattice.alphabet() {
        return Err(SolverError::LatticeMismatch);
    }
    let instrs =
        expand_program(p, crate::verify::EXPAND_LIMIT).map_err(SolverError::ProgramTooLarge)?;
    let k = instrs.len();
    if k == 0 {
        return Ok(SearchEnd::Exhausted);
    }
    if bx.mode == Mode::Fill && k as u128 != bx.volume() {
        return Ok(SearchEnd::Exhausted);
    }
    if k as u128 > bx.volume() + 1 {
        return Ok(SearchEnd::Exhausted);
    }

    let grid = Grid::new(bx);
    let table = candidate_table(bx.lattice);

    let mut search = Search {
        grid: &grid,
        instrs: &instrs,
        table: &table,
        bx,
        cfg,
        occupied: alloc::vec![false; grid.volume],
        path: Vec::with_capacity(k),
        nodes: 0,
        free: [0, 0],
        flood_mark: alloc::vec![0u32; grid.volume],
        flood_gen: 0,
        flood_queue: Vec::new(),
    };
    for c in &grid.cells {
        search.free[((c.d + c.y + c.x) & 1) as usize] += 1;
    }

    for (start, first_dir) in start_states(bx, &grid, cfg, k) {
        match search.from_start(start, first_dir, on_solution) {
            Ok(true) => return Ok(SearchEnd::Stopped),
            Ok(false) => {}
            Err(()) => return Ok(SearchEnd::Budget),
        }
    }
    Ok(SearchEnd::Exhausted)
}

/// (start cell, first direction) pairs in deterministic order, quotiented by
/// the box symmetry group when enabled.
fn start_states(
    bx: &BoxSpec,
    grid: &Grid,
    cfg: &SearchConfig,
    k: usize,
) -> Vec<(u32, Option<usize>)> {
    let mut out = Vec::new();
    let forced_start = bx.terminals.map(|(u, _)| bx.linear_index(u) as u32);
    let transforms = if cfg.symmetry_reduction && forced_start.is_none() {
        box_transforms(bx)
    } else {
        Vec::new()
    };
    let dir_index = |c: Cell, n: Cell| -> usize {
        let dir = Dir::between(c, n, bx.lattice).unwrap();
        grid.dirs.iter().position(|&d| d == dir).unwrap()
    };
    for idx in 0..grid.volume as u32 {
        if let Some(f) = forced_start {
            if idx != f {
                continue;
            }
        }
        let cell = grid.cells[idx as usize];
        if k == 1 {
            if transforms.is_empty() || is_canonical(cell, None, &transforms, bx, &dir_index) {
                out.push((idx, None));
            }
            continue;
        }
        for di in 0..grid.dirs.len() {
            if grid.step(idx, di) == NONE {
                continue;
            }
            if transforms.is_empty()
                || is_canonical(cell, Some(grid.dirs[di]), &transforms, bx, &dir_index)
            {
                out.push((idx, Some(di)));
            }
        }
    }
    out
}

fn is_canonical(
    cell: Cell,
    dir: Option<Dir>,
    transforms: &[Transform],
    bx: &BoxSpec,
    dir_index: &impl Fn(Cell, Cell) -> usize,
) -> bool {
    let my_key = (cell, dir.map(|d| dir_index(cell, cell.step(d))));
    for t in transforms {
        let tc = t.apply_cell(cell, bx);
        let td = dir.map(|d| dir_index(tc, t.apply_cell(cell.step(d), bx)));
        if (tc, td) < my_key {
            return false;
        }
    }
    true
}

struct Search<'a> {
    grid: &'a Grid,
    instrs: &'a [Instruction],
    table: &'a [Vec<Vec<u8>>; 5],
    bx: &'a BoxSpec,
    cfg: &'a SearchConfig,
    occupied: Vec<bool>,
    path: Vec<u32>,
    nodes: u64,
    free: [i64; 2],
    flood_mark: Vec<u32>,
    flood_gen: u32,
    flood_queue: Vec<u32>,
}

struct Frame {
    candidates: Vec<u8>,
    next_candidate: usize,
    /// Cells this frame's active candidate placed (for undo).
    placed: u32,
}

impl<'a> Search<'a> {
    fn color(&self, idx: u32) -> usize {
        let c = self.grid.cells[idx as usize];
        ((c.d + c.y + c.x) & 1) as usize
    }

    fn occupy(&mut self, idx: u32) {
        self.occupied[idx as usize] = true;
        self.free[self.color(idx)] -= 1;
        self.path.push(idx);
    }

    fn release_last(&mut self) {
        let idx = self.path.pop().unwrap();
        self.occupied[idx as usize] = false;
        self.free[self.color(idx)] += 1;
    }

    /// Is extending to `cell` at path position `pos` the legal closing step?
    fn is_closing(&self, cell: u32, pos: usize) -> bool {
        self.bx.mode == Mode::ClosedPack
            && pos == self.instrs.len() - 1
            && !self.path.is_empty()
            && cell == self.path[0]
    }

    /// Place the forced straight run entering `cell` via `dir`. Returns cells
    /// placed, or None (nothing placed) if it does not fit. The final closing
    /// cell of a closed chain is pushed without occupying.
    fn place_run(&mut self, mut cell: u32, dir: usize) -> Option<u32> {
        let k = self.instrs.len();
        let mut placed = 0u32;
        loop {
            let pos = self.path.len();
            if self.occupied[cell as usize] {
                if self.is_closing(cell, pos) {
                    self.path.push(cell);
                    placed += 1;
                    return Some(placed);
                }
                break;
            }
            self.occupy(cell);
            placed += 1;
            let pos = self.path.len();
            if pos == k {
                return Some(placed);
            }
            if self.instrs[pos - 1] != Instruction::Straight {
                return Some(placed);
            }
            let next = self.grid.step(cell, dir);
            if next == NONE {
                break;
            }
            cell = next;
        }
        for _ in 0..placed {
            self.release_last();
        }
        None
    }

    fn undo_run(&mut self, placed: u32) {
        for _ in 0..placed {
            let idx = *self.path.last().unwrap();
            let dup_close = self.path.len() == self.instrs.len()
                && self.bx.mode == Mode::ClosedPack
                && self.path.len() >= 2
                && idx == self.path[0];
            if dup_close {
                self.path.pop();
            } else {
                self.release_last();
            }
        }
    }

    fn parity_ok(&self) -> bool {
        if self.bx.mode != Mode::Fill || !self.cfg.prune_parity {
            return true;
        }
        let remaining = (self.instrs.len() - self.path.len()) as i64;
        if remaining == 0 {
            return true;
        }
        let next_color = 1 - self.color(*self.path.last().unwrap());
        let need_next = (remaining + 1) / 2;
        self.free[next_color] == need_next && self.free[1 - next_color] == remaining / 2
    }

    fn connectivity_ok(&mut self) -> bool {
        if self.bx.mode != Mode::Fill || !self.cfg.prune_connectivity {
            return true;
        }
        if self.path.len() == self.instrs.len() {
            return true;
        }
        self.flood_gen += 1;
        let gen = self.flood_gen;
        let head = *self.path.last().unwrap();
        self.flood_queue.clear();
        let dir_count = self.grid.dirs.len();
        for di in 0..dir_count {
            let n = self.grid.step(head, di);
            if n != NONE && !self.occupied[n as usize] && self.flood_mark[n as usize] != gen {
                self.flood_mark[n as usize] = gen;
                self.flood_queue.push(n);
            }
        }
        let mut qi = 0;
        while qi < self.flood_queue.len() {
            let cur = self.flood_queue[qi];
            qi += 1;
            for di in 0..dir_count {
                let n = self.grid.step(cur, di);
                if n != NONE && !self.occupied[n as usize] && self.flood_mark[n as usize] != gen {
                    self.flood_mark[n as usize] = gen;
                    self.flood_queue.push(n);
                }
            }
        }
        self.flood_queue.len() == (self.free[0] + self.free[1]) as usize
    }

    /// One-ply lookahead: walking the forced straight run from `cell`, the
    /// turn that follows it must have at least one available target.
    fn segment_fit_ok(&self, mut cell: u32, dir: usize) -> bool {
        if !self.cfg.prune_segment_fit {
            return true;
        }
        let k = self.instrs.len();
        let mut pos = self.path.len(); // index `cell` would occupy
        loop {
            if self.occupied[cell as usize] {
                return true; // place_run will decide (may be the closing cell)
            }
            if pos + 1 >= k {
                return true;
            }
            if self.instrs[pos] != Instruction::Straight {
                let cands = &self.table[instr_index(self.instrs[pos])][dir];
                return cands.iter().any(|&ci| {
                    let n = self.grid.step(cell, ci as usize);
                    n != NONE
                        && (!self.occupied[n as usize]
                            || (self.is_closing(n, pos + 1) && n != cell))
                });
            }
            let next = self.grid.step(cell, dir);
            if next == NONE {
                return false;
            }
            cell = next;
            pos += 1;
        }
    }

    fn from_start(
        &mut self,
        start: u32,
        first_dir: Option<usize>,
        on_solution: &mut dyn FnMut(&[Cell]) -> bool,
    ) -> Result<bool, ()> {
        let k = self.instrs.len();
        debug_assert!(self.path.is_empty());
        self.occupy(start);
        let mut stop = false;
        if k == 1 {
            stop = self.emit(on_solution);
            self.release_last();
            return Ok(stop);
        }
        let Some(first_dir) = first_dir else {
            self.release_last();
            return Ok(false);
        };

        let mut frames: Vec<Frame> = Vec::with_capacity(k);
        frames.push(Frame { candidates: alloc::vec![first_dir as u8], next_candidate: 0, placed: 0 });

        'outer: while let Some(top) = frames.len().checked_sub(1) {
            let mut advanced = false;
            while frames[top].next_candidate < frames[top].candidates.len() {
                let dir = frames[top].candidates[frames[top].next_candidate] as usize;
                frames[top].next_candidate += 1;
                let head = *self.path.last().unwrap();
                let target = self.grid.step(head, dir);
                if target == NONE {
                    continue;
                }
                if self.nodes >= self.cfg.node_budget {
                    while let Some(f) = frames.pop() {
                        self.undo_run(f.placed);
                    }
                    self.release_last();
                    return Err(());
                }
                self.nodes += 1;
                if !self.segment_fit_ok(target, dir) {
                    continue;
                }
                let Some(placed) = self.place_run(target, dir) else {
                    continue;
                };
                if self.path.len() == k {
                    if self.final_checks() {
                        stop = self.emit(on_solution);
                    }
                    self.undo_run(placed);
                    if stop {
                        break 'outer;
                    }
                    continue;
                }
                if !self.parity_ok() || !self.connectivity_ok() {
                    self.undo_run(placed);
                    continue;
                }
                let pos = self.path.len();
                let instr = self.instrs[pos - 1];
                debug_assert!(instr != Instruction::Straight);
                let cands = self.table[instr_index(instr)][dir].clone();
                frames.push(Frame { candidates: cands, next_candidate: 0, placed });
                advanced = true;
                break;
            }
            if !advanced {
                let f = frames.pop().unwrap();
                self.undo_run(f.placed);
            }
        }
        while let Some(f) = frames.pop() {
            self.undo_run(f.placed);
        }
        self.release_last();
        debug_assert!(self.path.is_empty());
        Ok(stop)
    }

    fn final_checks(&self) -> bool {
        let k = self.instrs.len();
        debug_assert_eq!(self.path.len(), k);
        let closed_ok = match self.bx.mode {
            Mode::Fill | Mode::Pack => true,
            Mode::ClosedPack => k >= 2 && self.path[k - 1] == self.path[0],
        };
        if !closed_ok {
            return false;
        }
        if let Some((_, v)) = self.bx.terminals {
            let want = self.bx.linear_index(v) as u32;
            if self.path[k - 1] != want {
                return false;
            }
        }
        true
    }

    fn emit(&self, on_solution: &mut dyn FnMut(&[Cell]) -> bool) -> bool {
        let cells: Vec<Cell> = self.path.iter().map(|&i| self.grid.cells[i as usize]).collect();
        on_solution(&cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{parse_program, Alphabet};
    use crate::verify::verify_chain;

    fn sq(text: &str) -> Program {
        parse_program(text, Alphabet::Square).unwrap()
    }

    #[test]
    fn fig1_is_sat_and_verifies() {
        let p = sq("STTSSSTSSSTTSSTTSSTSTTTTT");
        let bx = BoxSpec::square(5, 5, Mode::Fill);
        let out = solve(&p, &bx, &SearchConfig::default()).unwrap();
        let SolveOutcome::Sat(chain) = out else { panic!("expected SAT") };
        assert!(verify_chain(&p, &chain, &bx).unwrap().accepted());
    }

    #[test]
    fn unit_square_cycle_sat() {
        let p = sq("TTTT");
        let bx = BoxSpec::square(2, 2, Mode::Fill);
        assert!(matches!(solve(&p, &bx, &SearchConfig::default()).unwrap(), SolveOutcome::Sat(_)));
    }

    #[test]
    fn middle_turn_on_line_unsat() {
        let p = sq("TTT");
        let bx = BoxSpec::square(1, 3, Mode::Fill);
        assert!(matches!(solve(&p, &bx, &SearchConfig::default()).unwrap(), SolveOutcome::Unsat));
    }

    #[test]
    fn count_tst_raw_two() {
        let p = sq("TST");
        let bx = BoxSpec::square(1, 3, Mode::Fill);
        let n = count_solutions(&p, &bx, &SearchConfig::default(), 1000, false).unwrap();
        assert_eq!(n, 2);
        let orbits = count_solutions(&p, &bx, &SearchConfig::default(), 1000, true).unwrap();
        assert_eq!(orbits, 1);
    }

    #[test]
    fn count_unit_cycle_eight() {
        let p = sq("TTTT");
        let bx = BoxSpec::square(2, 2, Mode::Fill);
        let n = count_solutions(&p, &bx, &SearchConfig::default(), 1000, false).unwrap();
        assert_eq!(n, 8);
    }

    #[test]
    fn count_ttt_zero() {
        let p = sq("TTT");
        let bx = BoxSpec::square(1, 3, Mode::Fill);
        assert_eq!(count_solutions(&p, &bx, &SearchConfig::default(), 10, false).unwrap(), 0);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let p = sq("STTSSSTSSSTTSSTTSSTSTTTTT");
        let bx = BoxSpec::square(5, 5, Mode::Fill);
        let cfg = SearchConfig::default().with_budget(3);
        assert!(matches!(solve(&p, &bx, &cfg).unwrap(), SolveOutcome::BudgetExhausted));
    }

    #[test]
    fn pruning_neutrality_smoke() {
        for text in ["TTTT", "TST", "STTS", "TTSTT", "SSTTSS", "TTTTTTTT", "T*ST*"] {
            let p = sq(text);
            for (h, w) in [(2u64, 2u64), (2, 3), (3, 3)] {
                for mode in [Mode::Fill, Mode::Pack] {
                    let bx = BoxSpec::square(h, w, mode);
                    let full = solve(&p, &bx, &SearchConfig::default()).unwrap();
                    let bare = solve(&p, &bx, &SearchConfig::no_pruning()).unwrap();
                    assert_eq!(
                        matches!(full, SolveOutcome::Sat(_)),
                        matches!(bare, SolveOutcome::Sat(_)),
                        "{text} {h}x{w} {mode:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_pack_requires_closure() {
        let p = sq("TTTTT");
        let bx = BoxSpec::new(
            LatticeKind::Square,
            crate::lattice::Dims { d: 1, h: 2, w: 2 },
            Mode::ClosedPack,
            None,
        )
        .unwrap();
        let out = solve(&p, &bx, &SearchConfig::default()).unwrap();
        let SolveOutcome::Sat(chain) = out else { panic!("expected SAT") };
        assert!(verify_chain(&p, &chain, &bx).unwrap().accepted());
        let cells = chain.expand_cells(100).unwrap();
        assert_eq!(cells[0], cells[4]);
    }

    #[test]
    fn lexicographically_least_witness_without_symmetry() {
        let p = sq("TST");
        let bx = BoxSpec::square(1, 3, Mode::Fill);
        let mut cfg = SearchConfig::default();
        cfg.symmetry_reduction = false;
        let SolveOutcome::Sat(chain) = solve(&p, &bx, &cfg).unwrap() else { panic!() };
        let cells = chain.expand_cells(10).unwrap();
        assert_eq!(cells[0], Cell::yx(0, 0));
        assert_eq!(cells[2], Cell::yx(0, 2));
    }

    #[test]
    fn triangular_solve_small() {
        let p = parse_program("(u)^6", Alphabet::Triangular).unwrap();
        let bx = BoxSpec::triangular(3, 3, Mode::Pack);
        let out = solve(&p, &bx, &SearchConfig::default()).unwrap();
        let SolveOutcome::Sat(chain) = out else { panic!("expected SAT") };
        assert!(verify_chain(&p, &chain, &bx).unwrap().accepted());
    }

    #[test]
    fn square3d_smoke() {
        // (T)^8 fills a 2x2x2 cube.
        let p = sq("TTTTTTTT");
        let bx = BoxSpec::square3d(2, 2, 2, Mode::Fill);
        let out = solve(&p, &bx, &SearchConfig::default()).unwrap();
        let SolveOutcome::Sat(chain) = out else { panic!("expected SAT") };
        assert!(verify_chain(&p, &chain, &bx).unwrap().accepted());
    }

    #[test]
    fn terminals_pin_endpoints() {
        let p = parse_program("SSS", Alphabet::Square).unwrap();
        let bx = BoxSpec::new(
            LatticeKind::Square,
            crate::lattice::Dims { d: 1, h: 1, w: 3 },
            Mode::Pack,
            Some((Cell::yx(0, 0), Cell::yx(0, 1))),
        )
        .unwrap();
        // A straight 3-chain from (0,0) ends at (0,2), not at v=(0,1).
        assert!(matches!(solve(&p, &bx, &SearchConfig::default()).unwrap(), SolveOutcome::Unsat));
    }
}
