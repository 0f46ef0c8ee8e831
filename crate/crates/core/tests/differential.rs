//! Differential equivalence between the explicit and compressed verifiers,
//! plus codec round-trip properties, over randomized inputs.

use num_bigint::BigUint;
use proptest::prelude::*;

use snake_core::chain::Run;
use snake_core::lattice::{turn_class, TurnClass};
use snake_core::program::{
    expand_program, parse_program, program_length, render_program, Alphabet, Instruction, Item,
    Program,
};
use snake_core::rle::verify_chain_rle;
use snake_core::verify::{realize_wildcards, verify_chain};
use snake_core::{BoxSpec, Cell, Chain, Dir, LatticeKind, Mode};

fn arb_dir(lattice: LatticeKind) -> impl Strategy<Value = Dir> {
    let dirs: Vec<Dir> = lattice.dirs().to_vec();
    prop::sample::select(dirs)
}

#[derive(Clone, Debug)]
enum MoveSpec {
    Run(Dir, u8),
    Block(Vec<(Dir, u8)>, u8),
}

fn arb_moves(lattice: LatticeKind) -> impl Strategy<Value = Vec<MoveSpec>> {
    let run = (arb_dir(lattice), 1u8..6).prop_map(|(d, l)| MoveSpec::Run(d, l));
    let block = (
        prop::collection::vec((arb_dir(lattice), 1u8..4), 1..4),
        1u8..5,
    )
        .prop_map(|(pat, c)| MoveSpec::Block(pat, c));
    prop::collection::vec(prop_oneof![3 => run, 1 => block], 1..8)
}

fn build_chain(lattice: LatticeKind, start: Cell, moves: &[MoveSpec]) -> Chain {
    let mut c = Chain::new(lattice, start);
    for m in moves {
        match m {
            MoveSpec::Run(d, l) => c.push_run(*d, *l as u32),
            MoveSpec::Block(pat, count) => {
                let runs: Vec<Run> =
                    pat.iter().map(|(d, l)| Run::new(*d, *l as u32)).collect();
                c.push_periodic(runs, *count as u32).unwrap();
            }
        }
    }
    c
}

/// The instruction sequence a chain actually realizes (first/last are S;
/// reversals get T, which no square chain can satisfy there).
fn realized_program(lattice: LatticeKind, cells: &[Cell]) -> Program {
    let mut instrs = vec![Instruction::Straight];
    for i in 1..cells.len().saturating_sub(1) {
        let t = turn_class(cells[i - 1], cells[i], cells[i + 1], lattice).unwrap();
        instrs.push(match (t, lattice) {
            (TurnClass::Straight, _) => Instruction::Straight,
            (TurnClass::Turn60, _) => Instruction::Turn60,
            (TurnClass::Turn120, _) => Instruction::Turn120,
            (_, LatticeKind::Triangular) => Instruction::Turn60,
            (_, _) => Instruction::Turn90,
        });
    }
    if cells.len() > 1 {
        instrs.push(Instruction::Straight);
    }
    Program::literal(lattice.alphabet(), &instrs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// On arbitrary explicit/periodic chains of modest total length the two
    /// verifiers give the same verdict, for honest and perturbed programs.
    #[test]
    fn rle_matches_explicit_verdict(
        lattice_square in any::<bool>(),
        start_y in 0i64..6,
        start_x in 0i64..6,
        moves in arb_moves(LatticeKind::Square),
        tri_moves in arb_moves(LatticeKind::Triangular),
        flip in prop::option::of((0usize..64, 0u8..3)),
        h in 4u64..14,
        w in 4u64..14,
        mode_pick in 0u8..3,
    ) {
        let lattice = if lattice_square { LatticeKind::Square } else { LatticeKind::Triangular };
        let chain = if lattice_square {
            build_chain(lattice, Cell::yx(start_y, start_x), &moves)
        } else {
            build_chain(lattice, Cell::yx(start_y, start_x), &tri_moves)
        };
        let cells = chain.expand_cells(10_000).unwrap();
        let mut program = realized_program(lattice, &cells);
        if let Some((pos, kind)) = flip {
            let mut instrs = expand_program(&program, 10_000).unwrap();
            let pos = pos % instrs.len();
            instrs[pos] = match (lattice, kind) {
                (LatticeKind::Square, 0) => Instruction::Straight,
                (LatticeKind::Square, 1) => Instruction::Turn90,
                (LatticeKind::Square, _) => Instruction::Wildcard,
                (_, 0) => Instruction::Straight,
                (_, 1) => Instruction::Turn60,
                (_, _) => Instruction::Turn120,
            };
            program = Program::literal(lattice.alphabet(), &instrs).unwrap();
        }
        let mode = match mode_pick {
            0 => Mode::Fill,
            1 => Mode::Pack,
            _ => Mode::ClosedPack,
        };
        let bx = match lattice {
            LatticeKind::Square => BoxSpec::square(h, w, mode),
            LatticeKind::Triangular => BoxSpec::triangular(h, w, mode),
            LatticeKind::Square3d => unreachable!(),
        };
        let explicit = verify_chain(&program, &chain, &bx).unwrap().verdict;
        let compressed = verify_chain_rle(&program, &chain, &bx).unwrap().verdict;
        prop_assert_eq!(explicit, compressed);
    }

    /// Accepted wildcard programs still verify after replacing wildcards by
    /// the literals the chain realizes.
    #[test]
    fn wildcard_realization_accepts(
        start_y in 0i64..4,
        start_x in 0i64..4,
        moves in arb_moves(LatticeKind::Square),
        stars in prop::collection::vec(any::<bool>(), 64),
    ) {
        let chain = build_chain(LatticeKind::Square, Cell::yx(start_y, start_x), &moves);
        let cells = chain.expand_cells(10_000).unwrap();
        let base = realized_program(LatticeKind::Square, &cells);
        let mut instrs = expand_program(&base, 10_000).unwrap();
        for (i, instr) in instrs.iter_mut().enumerate() {
            if stars[i % stars.len()] {
                *instr = Instruction::Wildcard;
            }
        }
        let program = Program::literal(Alphabet::Square, &instrs).unwrap();
        let bx = BoxSpec::square(12, 12, Mode::Pack);
        let rep = verify_chain(&program, &chain, &bx).unwrap();
        if rep.accepted() {
            let realized = realize_wildcards(&program, &chain, &bx).unwrap();
            prop_assert!(verify_chain(&realized, &chain, &bx).unwrap().accepted());
        }
    }
}

fn arb_items(depth: u32) -> BoxedStrategy<Vec<Item>> {
    let sym = prop_oneof![
        Just(Instruction::Straight),
        Just(Instruction::Turn90),
        Just(Instruction::Wildcard),
    ]
    .prop_map(Item::Sym);
    if depth == 0 {
        prop::collection::vec(sym, 0..6).boxed()
    } else {
        let count = prop_oneof![
            (1u64..6).prop_map(BigUint::from),
            Just(BigUint::from(1u64 << 40)),
            Just(BigUint::from(999_999_999_999u64)),
        ];
        let item = prop_oneof![
            4 => sym,
            1 => (arb_items(depth - 1), count)
                .prop_filter("non-empty body", |(body, _)| !body.is_empty())
                .prop_map(|(body, c)| Item::Repeat(body, c)),
        ];
        prop::collection::vec(item, 0..6).boxed()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// parse . render is the identity on repeat trees, and the computed
    /// length matches the expansion whenever expansion is permitted.
    #[test]
    fn codec_round_trip(items in arb_items(3)) {
        let p = Program::new(Alphabet::Square, items).unwrap();
        let text = render_program(&p);
        let back = parse_program(&text, Alphabet::Square).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(program_length(&back), program_length(&p));
        if let Ok(flat) = expand_program(&p, 4096) {
            prop_assert_eq!(BigUint::from(flat.len()), program_length(&p));
        }
    }
}
