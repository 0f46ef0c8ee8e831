//! Hamiltonian cycles on 2x2 refinements of connected polyominoes.
//!
//! Each input square becomes a 2x2 block of cells; the cycle visits every
//! cell, and on every boundary side of every square the two cells of that
//! side are cycle-adjacent. Built inductively: squares are added in DFS
//! preorder, each spliced into the required edge on its parent's side.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::lattice::Cell;

pub type Square = (i64, i64);

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum HamError {
    #[error("input polyomino is empty")]
    Empty,
    #[error("input polyomino is disconnected")]
    Disconnected,
}

/// Cycle on the refined cells of `squares`, as a cell list whose last entry
/// is adjacent to the first.
pub fn hamiltonian_fill(squares: &BTreeSet<Square>) -> Result<Vec<Cell>, HamError> {
    let order = dfs_preorder(squares)?;
    // next[cell] = successor around the directed cycle.
    let mut next: BTreeMap<Cell, Cell> = BTreeMap::new();
    let base = order[0].0;
    let quad = quad_cells(base);
    // Base ring: NW -> NE -> SE -> SW.
    next.insert(quad[0], quad[1]);
    next.insert(quad[1], quad[3]);
    next.insert(quad[3], quad[2]);
    next.insert(quad[2], quad[0]);

    for &(sq, parent) in &order[1..] {
        let parent = parent.expect("non-root squares have parents");
        // Cells of `sq` touching the shared side, aligned with the parent's.
        let (a, b, alpha, beta) = shared_side(parent, sq);
        let (alpha_far, beta_far) = (far_cell(sq, alpha, beta), far_cell(sq, beta, alpha));
        if next.get(&a) == Some(&b) {
            next.insert(a, alpha);
            next.insert(alpha, alpha_far);
            next.insert(alpha_far, beta_far);
            next.insert(beta_far, beta);
            next.insert(beta, b);
        } else {
            debug_assert_eq!(next.get(&b), Some(&a), "parent side edge must be in the cycle");
            next.insert(b, beta);
            next.insert(beta, beta_far);
            next.insert(beta_far, alpha_far);
            next.insert(alpha_far, alpha);
            next.insert(alpha, a);
        }
    }

    // Emit starting from the smallest cell.
    let start = *next.keys().next().expect("non-empty");
    let mut cycle = Vec::with_capacity(next.len());
    let mut cur = start;
    loop {
        cycle.push(cur);
        cur = next[&cur];
        if cur == start {
            break;
        }
    }
    debug_assert_eq!(cycle.len(), squares.len() * 4);
    Ok(cycle)
}

/// DFS preorder with parents; every prefix of the order is connected.
fn dfs_preorder(squares: &BTreeSet<Square>) -> Result<Vec<(Square, Option<Square>)>, HamError> {
    let first = *squares.iter().next().ok_or(HamError::Empty)?;
    let mut seen = BTreeSet::new();
    let mut order = Vec::with_capacity(squares.len());
    let mut stack = alloc::vec![(first, None)];
    while let Some((sq, parent)) = stack.pop() {
        if !seen.insert(sq) {
            continue;
        }
        order.push((sq, parent));
        let (r, c) = sq;
        for n in [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)] {
            if squares.contains(&n) && !seen.contains(&n) {
                stack.push((n, Some(sq)));
            }
        }
    }
    if order.len() != squares.len() {
        return Err(HamError::Disconnected);
    }
    Ok(order)
}

/// The four refined cells of a square: NW, NE, SW, SE.
pub fn quad_cells(sq: Square) -> [Cell; 4] {
    let (r, c) = sq;
    [
        Cell::yx(2 * r, 2 * c),
        Cell::yx(2 * r, 2 * c + 1),
        Cell::yx(2 * r + 1, 2 * c),
        Cell::yx(2 * r + 1, 2 * c + 1),
    ]
}

/// For adjacent squares: the parent's pair (a, b) on the shared side and the
/// child's touching cells (alpha under a, beta under b).
fn shared_side(parent: Square, child: Square) -> (Cell, Cell, Cell, Cell) {
    let (pr, pc) = parent;
    let (cr, cc) = child;
    match (cr - pr, cc - pc) {
        (1, 0) => (
            // child below parent: parent's S side, child's N side
            Cell::yx(2 * pr + 1, 2 * pc),
            Cell::yx(2 * pr + 1, 2 * pc + 1),
            Cell::yx(2 * cr, 2 * cc),
            Cell::yx(2 * cr, 2 * cc + 1),
        ),
        (-1, 0) => (
            Cell::yx(2 * pr, 2 * pc),
            Cell::yx(2 * pr, 2 * pc + 1),
            Cell::yx(2 * cr + 1, 2 * cc),
            Cell::yx(2 * cr + 1, 2 * cc + 1),
        ),
        (0, 1) => (
            Cell::yx(2 * pr, 2 * pc + 1),
            Cell::yx(2 * pr + 1, 2 * pc + 1),
            Cell::yx(2 * cr, 2 * cc),
            Cell::yx(2 * cr + 1, 2 * cc),
        ),
        (0, -1) => (
            Cell::yx(2 * pr, 2 * pc),
            Cell::yx(2 * pr + 1, 2 * pc),
            Cell::yx(2 * cr, 2 * cc + 1),
            Cell::yx(2 * cr + 1, 2 * cc + 1),
        ),
        _ => unreachable!("squares not adjacent"),
    }
}

/// The in-square neighbor of `cell` other than `partner`: the cell directly
/// behind the shared side.
fn far_cell(sq: Square, cell: Cell, partner: Cell) -> Cell {
    quad_cells(sq)
        .into_iter()
        .find(|&c| c != partner && (c.y - cell.y).abs() + (c.x - cell.x).abs() == 1)
        .expect("each quad cell has two in-square neighbors")
}

/// Every boundary side of every square has its two cells adjacent in the
/// cycle. Exposed so tests and builders can re-check outputs.
pub fn boundary_property_holds(squares: &BTreeSet<Square>, cycle: &[Cell]) -> bool {
    let mut edges: BTreeSet<(Cell, Cell)> = BTreeSet::new();
    let n = cycle.len();
    for i in 0..n {
        let a = cycle[i];
        let b = cycle[(i + 1) % n];
        edges.insert((a.min(b), a.max(b)));
    }
    for &(r, c) in squares {
        let q = quad_cells((r, c));
        let sides: [((i64, i64), Cell, Cell); 4] = [
            ((r - 1, c), q[0], q[1]), // N
            ((r + 1, c), q[2], q[3]), // S
            ((r, c - 1), q[0], q[2]), // W
            ((r, c + 1), q[1], q[3]), // E
        ];
        for (nb, x, y) in sides {
            if !squares.contains(&nb) && !edges.contains(&(x.min(y), x.max(y))) {
                return false;
            }
        }
    }
    true
}

/// Quick structural validation: a single cycle visiting each refined cell of
/// each square exactly once, with unit steps.
pub fn is_refined_cycle(squares: &BTreeSet<Square>, cycle: &[Cell]) -> bool {
    let mut expected: BTreeSet<Cell> = BTreeSet::new();
    for &sq in squares {
        expected.extend(quad_cells(sq));
    }
    if cycle.len() != expected.len() {
        return false;
    }
    let visited: BTreeSet<Cell> = cycle.iter().copied().collect();
    if visited != expected {
        return false;
    }
    let n = cycle.len();
    (0..n).all(|i| {
        let a = cycle[i];
        let b = cycle[(i + 1) % n];
        (a.y - b.y).abs() + (a.x - b.x).abs() == 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(list: &[Square]) -> BTreeSet<Square> {
        list.iter().copied().collect()
    }

    #[test]
    fn single_square_ring() {
        let t = squares(&[(0, 0)]);
        let cycle = hamiltonian_fill(&t).unwrap();
        assert_eq!(cycle.len(), 4);
        assert!(is_refined_cycle(&t, &cycle));
        assert!(boundary_property_holds(&t, &cycle));
    }

    #[test]
    fn l_tromino() {
        let t = squares(&[(0, 0), (1, 0), (1, 1)]);
        let cycle = hamiltonian_fill(&t).unwrap();
        assert_eq!(cycle.len(), 12);
        assert!(is_refined_cycle(&t, &cycle));
        assert!(boundary_property_holds(&t, &cycle));
    }

    #[test]
    fn random_connected_polyominoes() {
        // Deterministic growth of connected shapes.
        let mut state = 0xdeadbeefu64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..50 {
            let mut t = squares(&[(0, 0)]);
            let target = 2 + (rng() % 30) as usize;
            while t.len() < target {
                let &base = t.iter().nth((rng() as usize) % t.len()).unwrap();
                let (r, c) = base;
                let opts = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)];
                t.insert(opts[(rng() as usize) % 4]);
            }
            let cycle = hamiltonian_fill(&t).unwrap();
            assert!(is_refined_cycle(&t, &cycle), "trial {trial}");
            assert!(boundary_property_holds(&t, &cycle), "trial {trial}");
        }
    }

    #[test]
    fn disconnected_rejected() {
        let t = squares(&[(0, 0), (5, 5)]);
        assert!(matches!(hamiltonian_fill(&t), Err(HamError::Disconnected)));
    }
}
