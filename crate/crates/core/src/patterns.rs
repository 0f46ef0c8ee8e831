//! Micro-path patterns realizing wire squares as instruction-conforming cube
//! paths: the 2x2 wildcard weave, all-turn 2x2 packing patterns with their
//! +4 adjustments, the all-turn 2x2x2 traversal, and 60-degree-only steps
//! along the hexagonal embedding of the triangular lattice.

use alloc::vec::Vec;

use crate::lattice::{turn_between, Cell, Dir, LatticeKind, TurnClass};

pub type Square = (i64, i64);

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum PatternError {
    #[error("exit face equals the entry face")]
    SameFace,
    #[error("entry cell is not on the entry face")]
    BadEntry,
    #[error("no conforming micro-path exists")]
    NoPath,
    #[error("route squares are not consecutively adjacent")]
    BadRoute,
    #[error("target length has the wrong parity (must be 2 mod 4)")]
    BadParity,
    #[error("target length {target} outside the achievable range")]
    OutOfRange { target: u64 },
}

/// All-turn 8-cube path through a 2x2x2 block: enters at `entry` (a cell of
/// the block) heading `heading`, visits every cell, and leaves so that the
/// next step is `exit_dir`. The exit face must differ from the entry face.
pub fn traverse_222(heading: Dir, entry: Cell, exit_dir: Dir) -> Result<Vec<Cell>, PatternError> {
    if exit_dir == heading.reverse() {
        return Err(PatternError::SameFace);
    }
    // The entry cell must sit on the face whose inward normal is `heading`.
    let (hd, hy, hx) = heading.delta();
    let on_face = |c: Cell, (dd, dy, dx): (i64, i64, i64)| -> bool {
        // Face with inward normal (dd,dy,dx): entry coordinate at the low or
        // high side accordingly.
        let check = |v: i64, d: i64| match d {
            1 => v == 0,
            -1 => v == 1,
            _ => true,
        };
        check(c.d, dd) && check(c.y, dy) && check(c.x, dx)
    };
    if !(0..2).contains(&entry.d) || !(0..2).contains(&entry.y) || !(0..2).contains(&entry.x) {
        return Err(PatternError::BadEntry);
    }
    if !on_face(entry, (hd, hy, hx)) {
        return Err(PatternError::BadEntry);
    }
    let inside =
        |c: Cell| (0..2).contains(&c.d) && (0..2).contains(&c.y) && (0..2).contains(&c.x);
    // DFS over all-turn Hamiltonian paths of the 8 cells.
    let mut path = alloc::vec![entry];
    let mut used = [false; 8];
    let idx = |c: Cell| (c.d * 4 + c.y * 2 + c.x) as usize;
    used[idx(entry)] = true;
    fn dfs(
        path: &mut Vec<Cell>,
        used: &mut [bool; 8],
        last_dir: Dir,
        exit_dir: Dir,
        inside: &dyn Fn(Cell) -> bool,
        idx: &dyn Fn(Cell) -> usize,
    ) -> bool {
        if path.len() == 8 {
            // Leaving turn: the exit step must be perpendicular to the last
            // internal step, and must exit the block.
            let head = *path.last().unwrap();
            return turn_between(last_dir, exit_dir, LatticeKind::Square3d) == TurnClass::Turn90
                && !inside(head.step(exit_dir));
        }
        let head = *path.last().unwrap();
        for &d in LatticeKind::Square3d.dirs() {
            if turn_between(last_dir, d, LatticeKind::Square3d) != TurnClass::Turn90 {
                continue;
            }
            let next = head.step(d);
            if !inside(next) || used[idx(next)] {
                continue;
            }
            used[idx(next)] = true;
            path.push(next);
            if dfs(path, used, d, exit_dir, inside, idx) {
                return true;
            }
            path.pop();
            used[idx(next)] = false;
        }
        false
    }
    if dfs(&mut path, &mut used, heading, exit_dir, &inside, &idx) {
        Ok(path)
    } else {
        Err(PatternError::NoPath)
    }
}

fn square_cells(sq: Square) -> [Cell; 4] {
    let (r, c) = sq;
    [
        Cell::yx(2 * r, 2 * c),
        Cell::yx(2 * r, 2 * c + 1),
        Cell::yx(2 * r + 1, 2 * c),
        Cell::yx(2 * r + 1, 2 * c + 1),
    ]
}

fn in_square(c: Cell, sq: Square) -> bool {
    square_cells(sq).contains(&c)
}

fn square_step(a: Square, b: Square) -> Option<Dir> {
    match (b.0 - a.0, b.1 - a.1) {
        (0, 1) => Some(Dir::E),
        (0, -1) => Some(Dir::W),
        (-1, 0) => Some(Dir::N),
        (1, 0) => Some(Dir::S),
        _ => None,
    }
}

/// Wildcard wire: fill every route square with 4 cubes. The cube path walks
/// each square's four cells around the square, leaving across the side to
/// the next square; `exit_side` plays that role for the last square.
/// Returns the cube path; its last cell is on `exit_side` of the last square.
pub fn render_wire_wildcard(
    route: &[Square],
    entry: Cell,
    exit_side: Dir,
) -> Result<Vec<Cell>, PatternError> {
    if route.is_empty() {
        return Err(PatternError::BadRoute);
    }
    if !in_square(entry, route[0]) {
        return Err(PatternError::BadEntry);
    }
    let mut cells: Vec<Cell> = Vec::with_capacity(route.len() * 4);
    let mut cur = entry;
    for (i, &sq) in route.iter().enumerate() {
        let out_dir = if i + 1 < route.len() {
            square_step(sq, route[i + 1]).ok_or(PatternError::BadRoute)?
        } else {
            exit_side
        };
        // Walk all four cells, ending at the neighbor of `cur` on the exit
        // side; the two ring walks from `cur` end at its two neighbors, and
        // one of them is always on the required side.
        let quad = square_cells(sq);
        let neighbors: Vec<Cell> = quad
            .iter()
            .copied()
            .filter(|&c| (c.y - cur.y).abs() + (c.x - cur.x).abs() == 1)
            .collect();
        debug_assert_eq!(neighbors.len(), 2);
        let on_side = |c: Cell| in_square(c, sq) && !in_square(c.step(out_dir), sq);
        let end = neighbors.iter().copied().find(|&c| on_side(c)).ok_or(PatternError::NoPath)?;
        let mid = neighbors[usize::from(neighbors[0] == end)];
        let diag = quad
            .iter()
            .copied()
            .find(|&c| c != cur && c != end && c != mid)
            .expect("four distinct cells");
        cells.extend([cur, mid, diag, end]);
        cur = end.step(out_dir);
    }
    Ok(cells)
}

/// In-square transition for all-turn wires: entering at `e` heading `h_in`,
/// leave across `out_dir` after visiting `k` cells (1..=4). Yields each
/// feasible (cells, exit_cell) option.
fn turnonly_options(
    sq: Square,
    e: Cell,
    h_in: Dir,
    out_dir: Dir,
) -> Vec<(Vec<Cell>, Cell)> {
    let mut out = Vec::new();
    let inside = |c: Cell| in_square(c, sq);
    // DFS up to 4 cells.
    fn dfs(
        sq: Square,
        path: &mut Vec<Cell>,
        last: Dir,
        out_dir: Dir,
        results: &mut Vec<(Vec<Cell>, Cell)>,
    ) {
        let head = *path.last().unwrap();
        // Option: leave now, if the turn works and we cross the boundary.
        if turn_between(last, out_dir, LatticeKind::Square) == TurnClass::Turn90
            && !in_square(head.step(out_dir), sq)
        {
            results.push((path.clone(), head));
        }
        for &d in LatticeKind::Square.dirs() {
            if turn_between(last, d, LatticeKind::Square) != TurnClass::Turn90 {
                continue;
            }
            let next = head.step(d);
            if in_square(next, sq) && !path.contains(&next) {
                path.push(next);
                dfs(sq, path, d, out_dir, results);
                path.pop();
            }
        }
    }
    if inside(e) {
        let mut path = alloc::vec![e];
        dfs(sq, &mut path, h_in, out_dir, &mut out);
    }
    out
}

/// All-turn wire through `route` hitting exactly `target` cubes. Entry at
/// `entry` heading `h_in`; the final cube leaves across `exit_side`.
/// Achievable totals form an arithmetic progression with difference 4.
pub fn render_wire_turnonly(
    route: &[Square],
    entry: Cell,
    h_in: Dir,
    exit_side: Dir,
    target: u64,
) -> Result<Vec<Cell>, PatternError> {
    let reach = turnonly_reachable(route, entry, h_in, exit_side)?;
    if !reach.contains(target) {
        if target % 4 != reach.residue() {
            return Err(PatternError::BadParity);
        }
        return Err(PatternError::OutOfRange { target });
    }
    // Reconstruct greedily square by square.
    let mut cells = Vec::with_capacity(target as usize);
    let mut cur = entry;
    let mut h = h_in;
    let mut remaining = target;
    for i in 0..route.len() {
        let out_dir = if i + 1 < route.len() {
            square_step(route[i], route[i + 1]).ok_or(PatternError::BadRoute)?
        } else {
            exit_side
        };
        let opts = turnonly_options(route[i], cur, h, out_dir);
        let mut advanced = false;
        for (path, exit_cell) in opts {
            let k = path.len() as u64;
            if k > remaining {
                continue;
            }
            // Can the rest of the route still consume remaining - k?
            let rest_ok = if i + 1 == route.len() {
                remaining == k
            } else {
                let next_entry = exit_cell.step(out_dir);
                match turnonly_reachable(&route[i + 1..], next_entry, out_dir, exit_side) {
                    Ok(r) => r.contains(remaining - k),
                    Err(_) => false,
                }
            };
            if rest_ok {
                cells.extend(path.iter().copied());
                cur = exit_cell.step(out_dir);
                h = out_dir;
                remaining -= k;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(PatternError::NoPath);
        }
    }
    debug_assert_eq!(remaining, 0);
    Ok(cells)
}

/// Reachable cube totals per route suffix, memoized per call as a simple
/// forward DP over (square index, entry cell, heading) with per-residue
/// min/max envelopes (totals always share one residue class mod 4 for fixed
/// endpoints and form a contiguous progression inside it).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Reachable {
    pub min: u64,
    pub max: u64,
}

impl Reachable {
    pub fn residue(&self) -> u64 {
        self.min % 4
    }

    pub fn contains(&self, v: u64) -> bool {
        v >= self.min && v <= self.max && v % 4 == self.min % 4
    }
}

/// Exact reachable set for the whole route; errors when no conforming path
/// exists at all. The set is verified to be a full progression of step 4.
pub fn turnonly_reachable(
    route: &[Square],
    entry: Cell,
    h_in: Dir,
    exit_side: Dir,
) -> Result<Reachable, PatternError> {
    if route.is_empty() {
        return Err(PatternError::BadRoute);
    }
    // states: (cell-in-current-square, heading) -> set of totals as bitset.
    // Totals are bounded by 4 * route.len() <= practical sizes.
    let cap = 4 * route.len() + 1;
    let words = (cap + 63) / 64;
    let mut states: Vec<(Cell, Dir, Vec<u64>)> = Vec::new();
    let mut zero = alloc::vec![0u64; words];
    zero[0] = 1; // total 0 before entering
    states.push((entry, h_in, zero));
    for i in 0..route.len() {
        let out_dir = if i + 1 < route.len() {
            square_step(route[i], route[i + 1]).ok_or(PatternError::BadRoute)?
        } else {
            exit_side
        };
        let mut next_states: Vec<(Cell, Dir, Vec<u64>)> = Vec::new();
        for (cell, h, totals) in &states {
            for (path, exit_cell) in turnonly_options(route[i], *cell, *h, out_dir) {
                let k = path.len();
                let shifted = shift_bits(totals, k, cap);
                if shifted.iter().all(|&w| w == 0) {
                    continue;
                }
                let next_entry = exit_cell.step(out_dir);
                if let Some(slot) = next_states
                    .iter_mut()
                    .find(|(c, hh, _)| *c == next_entry && *hh == out_dir)
                {
                    for (a, b) in slot.2.iter_mut().zip(&shifted) {
                        *a |= b;
                    }
                } else {
                    next_states.push((next_entry, out_dir, shifted));
                }
            }
        }
        if next_states.is_empty() {
            return Err(PatternError::NoPath);
        }
        states = next_states;
    }
    // Union over final states.
    let mut all = alloc::vec![0u64; words];
    for (_, _, totals) in &states {
        for (a, b) in all.iter_mut().zip(totals) {
            *a |= b;
        }
    }
    let set: Vec<u64> = (0..cap as u64).filter(|&v| bit(&all, v as usize)).collect();
    let (&min, &max) = match (set.first(), set.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(PatternError::NoPath),
    };
    // The color argument pins one residue class; the builder relies on the
    // progression being gap-free, so verify both here.
    debug_assert!(set.iter().all(|v| v % 4 == min % 4), "mixed residues: {set:?}");
    debug_assert!(
        set.windows(2).all(|w| w[1] - w[0] == 4),
        "gapped progression: {set:?}"
    );
    Ok(Reachable { min, max })
}

fn shift_bits(bits: &[u64], by: usize, cap: usize) -> Vec<u64> {
    let mut out = alloc::vec![0u64; bits.len()];
    for i in 0..cap {
        if bit(bits, i) && i + by < cap {
            out[(i + by) / 64] |= 1 << ((i + by) % 64);
        }
    }
    out
}

fn bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

/// One coarse hexagonal step: four 60-degree-only prism moves with net
/// displacement three lattice units along `coarse` (one of a, b, d, e),
/// starting with a turn from `h_in`. Prisms stay within one lattice unit of
/// the straight track. Yields (dirs, h_out) variants.
pub fn hex_step_variants(h_in: Dir, coarse: Dir) -> Vec<([Dir; 4], Dir)> {
    let target = {
        let (_, dy, dx) = coarse.delta();
        (3 * dy, 3 * dx)
    };
    let mut out = Vec::new();
    let dirs = LatticeKind::Triangular.dirs();
    for &d1 in dirs {
        if turn_between(h_in, d1, LatticeKind::Triangular) != TurnClass::Turn60 {
            continue;
        }
        for &d2 in dirs {
            if turn_between(d1, d2, LatticeKind::Triangular) != TurnClass::Turn60 {
                continue;
            }
            for &d3 in dirs {
                if turn_between(d2, d3, LatticeKind::Triangular) != TurnClass::Turn60 {
                    continue;
                }
                for &d4 in dirs {
                    if turn_between(d3, d4, LatticeKind::Triangular) != TurnClass::Turn60 {
                        continue;
                    }
                    let mut y = 0;
                    let mut x = 0;
                    let mut ok = true;
                    for (i, d) in [d1, d2, d3, d4].iter().enumerate() {
                        let (_, dy, dx) = d.delta();
                        y += dy;
                        x += dx;
                        // Deviation bound: stay near the straight track.
                        let (ty, tx) = target;
                        let fy = ty * (i as i64 + 1) / 4;
                        let fx = tx * (i as i64 + 1) / 4;
                        if (y - fy).abs() + (x - fx).abs() > 2 {
                            ok = false;
                            break;
                        }
                    }
                    if ok && (y, x) == target {
                        out.push(([d1, d2, d3, d4], d4));
                    }
                }
            }
        }
    }
    out
}

/// Prism path for a coarse route on the sheared grid: each coarse move uses
/// four 60-degree turns. Returns the appended prisms and the final heading.
pub fn hex_wire_path(
    coarse_moves: &[Dir],
    start: Cell,
    h_in: Dir,
) -> Result<(Vec<Cell>, Dir), PatternError> {
    // DP over headings so every junction stays a 60-degree turn.
    let dirs = LatticeKind::Triangular.dirs();
    let hidx = |d: Dir| dirs.iter().position(|&x| x == d).unwrap();
    let n = coarse_moves.len();
    // reach[i][h] = Some(prev_h, variant) after i moves ending with heading h.
    let mut reach: Vec<[Option<(usize, [Dir; 4])>; 6]> = alloc::vec![[None; 6]; n + 1];
    let mut start_reach = [false; 6];
    start_reach[hidx(h_in)] = true;
    for (i, &mv) in coarse_moves.iter().enumerate() {
        for h in 0..6 {
            let live = if i == 0 { start_reach[h] } else { reach[i][h].is_some() };
            if !live {
                continue;
            }
            for (seq, h_out) in hex_step_variants(dirs[h], mv) {
                if reach[i + 1][hidx(h_out)].is_none() {
                    reach[i + 1][hidx(h_out)] = Some((h, seq));
                }
            }
        }
    }
    let final_h = (0..6).find(|&h| reach[n][h].is_some() || (n == 0 && start_reach[h]));
    let Some(mut h) = final_h else {
        return Err(PatternError::NoPath);
    };
    // Backtrack variants.
    let mut seqs: Vec<[Dir; 4]> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let (prev_h, seq) = reach[i + 1][h].expect("reached");
        seqs.push(seq);
        h = prev_h;
    }
    seqs.reverse();
    let mut cells = Vec::with_capacity(4 * n);
    let mut pos = start;
    let mut heading = h_in;
    for seq in seqs {
        for d in seq {
            pos = pos.step(d);
            cells.push(pos);
            heading = d;
        }
    }
    Ok((cells, heading))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traverse_222_all_cases_exist() {
        // 6 entry headings x 4 entry cells x 5 exits (excluding the entry
        // face) all admit an all-turn Hamiltonian path.
        let mut combos = 0;
        for &heading in LatticeKind::Square3d.dirs() {
            for d in 0..2i64 {
                for y in 0..2i64 {
                    for x in 0..2i64 {
                        let entry = Cell::new(d, y, x);
                        if traverse_222(heading, entry, heading).is_err()
                            && false
                        {
                            unreachable!();
                        }
                        // entry must be on the entry face
                        let (hd, hy, hx) = heading.delta();
                        let on_face = match (hd, hy, hx) {
                            (1, _, _) => entry.d == 0,
                            (-1, _, _) => entry.d == 1,
                            (_, 1, _) => entry.y == 0,
                            (_, -1, _) => entry.y == 1,
                            (_, _, 1) => entry.x == 0,
                            _ => entry.x == 1,
                        };
                        if !on_face {
                            continue;
                        }
                        for &exit in LatticeKind::Square3d.dirs() {
                            if exit == heading.reverse() {
                                assert!(matches!(
                                    traverse_222(heading, entry, exit),
                                    Err(PatternError::SameFace)
                                ));
                                continue;
                            }
                            let path = traverse_222(heading, entry, exit).unwrap();
                            assert_eq!(path.len(), 8);
                            combos += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(combos, 6 * 4 * 5);
    }

    #[test]
    fn wildcard_straight_route() {
        let route = [(0, 0), (0, 1), (0, 2)];
        let cells =
            render_wire_wildcard(&route, Cell::yx(0, 0), Dir::E).unwrap();
        assert_eq!(cells.len(), 12);
        // Self-avoiding and unit steps.
        for w in cells.windows(2) {
            assert_eq!((w[0].y - w[1].y).abs() + (w[0].x - w[1].x).abs(), 1);
        }
        let set: alloc::collections::BTreeSet<Cell> = cells.iter().copied().collect();
        assert_eq!(set.len(), 12);
    }

    #[test]
    fn wildcard_single_square() {
        let cells = render_wire_wildcard(&[(0, 0)], Cell::yx(0, 0), Dir::E).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[3].x, 1); // exits on the east side
    }

    #[test]
    fn wildcard_turns_both_corners() {
        // Turn route entering at the inner and outer corner both work.
        let route = [(0, 0), (0, 1), (1, 1)];
        for entry in [Cell::yx(0, 0), Cell::yx(1, 0)] {
            let cells = render_wire_wildcard(&route, entry, Dir::S).unwrap();
            assert_eq!(cells.len(), 12);
        }
    }

    #[test]
    fn turnonly_progression_and_exact_targets() {
        // An L-shaped corridor; achievable totals are a step-4 progression.
        let route = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)];
        let entry = Cell::yx(0, 0);
        let reach = turnonly_reachable(&route, entry, Dir::E, Dir::S).unwrap();
        assert_eq!(reach.min % 4, reach.max % 4);
        let mut target = reach.min;
        while target <= reach.max {
            let cells =
                render_wire_turnonly(&route, entry, Dir::E, Dir::S, target).unwrap();
            assert_eq!(cells.len() as u64, target);
            // all-turn check
            for w in cells.windows(3) {
                let t = crate::lattice::turn_class(w[0], w[1], w[2], LatticeKind::Square).unwrap();
                assert_eq!(t, TurnClass::Turn90);
            }
            target += 4;
        }
        assert!(matches!(
            render_wire_turnonly(&route, entry, Dir::E, Dir::S, reach.min + 1),
            Err(PatternError::BadParity)
        ));
        assert!(matches!(
            render_wire_turnonly(&route, entry, Dir::E, Dir::S, reach.max + 4),
            Err(PatternError::OutOfRange { .. })
        ));
    }

    #[test]
    fn hex_steps_compose_along_routes() {
        // Whatever heading one coarse step ends with, every non-reversing
        // next coarse step is realizable, so any self-avoiding coarse route
        // embeds. Also check each variant's displacement.
        let coarse = [Dir::Ta, Dir::Tb, Dir::Td, Dir::Te];
        for &mv_prev in &coarse {
            let mut out_headings: Vec<Dir> = Vec::new();
            for &h in LatticeKind::Triangular.dirs() {
                for (seq, h_out) in hex_step_variants(h, mv_prev) {
                    let mut y = 0;
                    let mut x = 0;
                    for d in seq {
                        let (_, dy, dx) = d.delta();
                        y += dy;
                        x += dx;
                    }
                    let (_, ty, tx) = mv_prev.delta();
                    assert_eq!((y, x), (3 * ty, 3 * tx));
                    if !out_headings.contains(&h_out) {
                        out_headings.push(h_out);
                    }
                }
            }
            assert!(!out_headings.is_empty());
            // The DP picks variants, so composability only needs SOME exit
            // heading of the previous move to admit the next move.
            for &h_in in LatticeKind::Triangular.dirs() {
                let outs: Vec<Dir> =
                    hex_step_variants(h_in, mv_prev).into_iter().map(|(_, h)| h).collect();
                if outs.is_empty() {
                    continue;
                }
                for &mv in &coarse {
                    if mv == mv_prev.reverse() {
                        continue;
                    }
                    assert!(
                        outs.iter().any(|&h| !hex_step_variants(h, mv).is_empty()),
                        "no continuation {h_in:?} -{mv_prev:?}-> {mv:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn hex_wire_path_l_route() {
        let moves = [Dir::Ta, Dir::Ta, Dir::Tb];
        let (cells, _) = hex_wire_path(&moves, Cell::yx(5, 5), Dir::Ta).unwrap();
        assert_eq!(cells.len(), 12);
        // 60-degree turns throughout.
        let mut all = alloc::vec![Cell::yx(5, 5)];
        all.extend(&cells);
        for w in all.windows(3) {
            let t = crate::lattice::turn_class(w[0], w[1], w[2], LatticeKind::Triangular).unwrap();
            assert_eq!(t, TurnClass::Turn60, "{w:?}");
        }
    }
}
