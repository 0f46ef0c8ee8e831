//! Reduction compilers: assemble source instances into snake-cube programs,
//! with a gadget index map over the emitted instruction stream.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::lattice::{BoxSpec, Cell, Dims, Dir, LatticeKind, Mode};
use crate::oracle::{PartitionInstance, ThreeDMInstance};
use crate::params::{validate_params, ParamSet, ValidationReport, Variant};
use crate::program::{program_length, repeat, sym_run, Alphabet, Instruction, Item, Program};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BlockClass {
    A,
    B,
    C,
}

impl BlockClass {
    pub fn name(self) -> &'static str {
        match self {
            BlockClass::A => "A",
            BlockClass::B => "B",
            BlockClass::C => "C",
        }
    }
}

/// What a range of the program is for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GadgetId {
    Shelf,
    Block { class: BlockClass, idx: usize },
    /// The wire following `Block { class, idx }` (the last wire of a class
    /// row leads to the next row or the trailer).
    Wire { class: BlockClass, idx: usize },
    Trailer,
    CapStart,
    CapEnd,
    Layer { idx: usize, variant_no: u8 },
    Frame,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexEntry {
    pub gadget: GadgetId,
    pub start: BigUint,
    pub len: BigUint,
}

/// A compiled reduction instance: target box, program, and metadata.
#[derive(Clone, Debug)]
pub struct GenArtifact {
    pub program: Program,
    pub bx: BoxSpec,
    pub params: ParamSet,
    pub index_map: Vec<IndexEntry>,
    pub validation: ValidationReport,
    pub notes: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum GenError {
    #[error("block width m*x = {0} is too small")]
    BlockTooNarrow(u64),
    #[error("parameters fail witness feasibility: {0}")]
    Infeasible(String),
    #[error("instance does not match the parameter set")]
    InstanceMismatch,
    #[error("box dimensions exceed the supported 64-bit range")]
    BoxTooLarge,
    #[error("program exceeds the box volume (negative trailer)")]
    NegativeTrailer,
    #[error("shelf strings need larger parameters")]
    ShelfTooSmall,
    #[error("instance is empty")]
    EmptyInstance,
}

struct MapBuilder {
    entries: Vec<IndexEntry>,
    cursor: BigUint,
}

impl MapBuilder {
    fn new() -> MapBuilder {
        MapBuilder { entries: Vec::new(), cursor: BigUint::zero() }
    }

    fn add(&mut self, gadget: GadgetId, items: &[Item], out: &mut Vec<Item>) {
        let len: BigUint = items.iter().map(item_len).sum();
        self.entries.push(IndexEntry { gadget, start: self.cursor.clone(), len: len.clone() });
        self.cursor += len;
        out.extend_from_slice(items);
    }
}

fn item_len(item: &Item) -> BigUint {
    match item {
        Item::Sym(_) => BigUint::one(),
        Item::Repeat(body, count) => body.iter().map(item_len).sum::<BigUint>() * count,
    }
}

/// Block gadget: `rows` straight segments of length `m*x` joined by turn
/// pairs, folding boustrophedon into a `rows x (m*x)` rectangle (or its
/// two-layer / sheared analogues).
pub fn gen_block_gadget(
    x_units: u64,
    m: &BigUint,
    rows: &BigUint,
    alphabet: Alphabet,
) -> Result<Program, GenError> {
    Ok(Program::new(alphabet, block_items(x_units, m, rows, alphabet)?).expect("legal symbols"))
}

fn block_items(
    x_units: u64,
    m: &BigUint,
    rows: &BigUint,
    alphabet: Alphabet,
) -> Result<Vec<Item>, GenError> {
    let width = m * x_units;
    if width < BigUint::from(3u32) {
        return Err(GenError::BlockTooNarrow(width.to_u64().unwrap_or(0)));
    }
    let mut items = Vec::new();
    match alphabet {
        Alphabet::Square => {
            // (S)^{mx-1} (TT (S)^{mx-2})^{rows-1} S
            items.extend(sym_run(Instruction::Straight, &width - 1u32));
            let mut zig = Vec::new();
            zig.push(Item::Sym(Instruction::Turn90));
            zig.push(Item::Sym(Instruction::Turn90));
            zig.extend(sym_run(Instruction::Straight, &width - 2u32));
            items.extend(repeat(zig, rows - 1u32));
            items.push(Item::Sym(Instruction::Straight));
        }
        Alphabet::Triangular => {
            // (S)^{mx-1} v u (S)^{mx-2} (u v (S)^{mx-2} v u (S)^{mx-2})^{rows/2-1} S
            let (half, rem) = rows.div_rem(&BigUint::from(2u32));
            if !rem.is_zero() || half.is_zero() {
                return Err(GenError::Infeasible(String::from("hex block rows must be even")));
            }
            items.extend(sym_run(Instruction::Straight, &width - 1u32));
            items.push(Item::Sym(Instruction::Turn120));
            items.push(Item::Sym(Instruction::Turn60));
            items.extend(sym_run(Instruction::Straight, &width - 2u32));
            let mut pair = Vec::new();
            pair.push(Item::Sym(Instruction::Turn60));
            pair.push(Item::Sym(Instruction::Turn120));
            pair.extend(sym_run(Instruction::Straight, &width - 2u32));
            pair.push(Item::Sym(Instruction::Turn120));
            pair.push(Item::Sym(Instruction::Turn60));
            pair.extend(sym_run(Instruction::Straight, &width - 2u32));
            items.extend(repeat(pair, half - 1u32));
            items.push(Item::Sym(Instruction::Straight));
        }
    }
    debug_assert_eq!(items.iter().map(item_len).sum::<BigUint>(), rows * &width);
    Ok(items)
}

/// The box2 shelf: outer frame, n shelf rows per layer, and the interior
/// fillings, exactly as the printed construction with parameters substituted.
pub fn gen_shelf(p: &ParamSet) -> Result<Program, GenError> {
    Ok(Program::new(Alphabet::Square, shelf_items(p)?).expect("legal symbols"))
}

fn shelf_items(p: &ParamSet) -> Result<Vec<Item>, GenError> {
    if p.variant != Variant::Box2 {
        return Err(GenError::Infeasible(String::from("shelf is a box2 gadget")));
    }
    let h = &p.height;
    let w = &p.width;
    let hh = &p.h;
    let g = &p.g;
    let n = p.n;
    if *h < BigUint::from(9u32) || *w < g + BigUint::from(7u32) || *hh < BigUint::from(2u32) {
        return Err(GenError::ShelfTooSmall);
    }
    let s = |k: BigUint| sym_run(Instruction::Straight, k);
    let t = || Item::Sym(Instruction::Turn90);
    let wg6 = w - g - 6u32;

    // outer frame: SSSST S^{H-2} T S^{W-2} TT S^{W-2} T S^{H-2} T S^{W-2} TT S^{W-6}
    let mut items: Vec<Item> = Vec::new();
    items.extend(s(BigUint::from(4u32)));
    items.push(t());
    items.extend(s(h - 2u32));
    items.push(t());
    items.extend(s(w - 2u32));
    items.push(t());
    items.push(t());
    items.extend(s(w - 2u32));
    items.push(t());
    items.extend(s(h - 2u32));
    items.push(t());
    items.extend(s(w - 2u32));
    items.push(t());
    items.push(t());
    items.extend(s(w - 6u32));

    // top shelf frame: T S^{h+6g} T S^{W-g-6} TSST S^{W-g-6}
    let mut top_shelf: Vec<Item> = Vec::new();
    top_shelf.push(t());
    top_shelf.extend(s(hh + 6u32 * g));
    top_shelf.push(t());
    top_shelf.extend(s(wg6.clone()));
    top_shelf.push(t());
    top_shelf.extend(s(BigUint::from(2u32)));
    top_shelf.push(t());
    top_shelf.extend(s(wg6.clone()));
    items.extend(repeat(top_shelf, n));

    items.push(t());
    items.push(t());

    // bottom shelf frame: S^{W-g-6} TSST S^{W-g-6} T S^{h+6g} T
    let mut bottom_shelf: Vec<Item> = Vec::new();
    bottom_shelf.extend(s(wg6.clone()));
    bottom_shelf.push(t());
    bottom_shelf.extend(s(BigUint::from(2u32)));
    bottom_shelf.push(t());
    bottom_shelf.extend(s(wg6.clone()));
    bottom_shelf.push(t());
    bottom_shelf.extend(s(hh + 6u32 * g));
    bottom_shelf.push(t());
    items.extend(repeat(bottom_shelf, n - 1));

    // closing bottom shelf: S^{W-g-6} TSST S^{W-g-6} T S^{h-2}
    items.extend(s(wg6.clone()));
    items.push(t());
    items.extend(s(BigUint::from(2u32)));
    items.push(t());
    items.extend(s(wg6.clone()));
    items.push(t());
    items.extend(s(hh - 2u32));

    // top filling:
    // (ST S^{W-g-6} TT S^{W-g-6} T S^{h+6g+1})^{n-1}
    //   TT S^{H-9} TT S^{H-7} TTT S^{W-g-5} TT S^{W-g-6} TTSST S^{H-5} TSSTTSS
    let mut tf_rep: Vec<Item> = Vec::new();
    tf_rep.push(Item::Sym(Instruction::Straight));
    tf_rep.push(t());
    tf_rep.extend(s(wg6.clone()));
    tf_rep.push(t());
    tf_rep.push(t());
    tf_rep.extend(s(wg6.clone()));
    tf_rep.push(t());
    tf_rep.extend(s(hh + 6u32 * g + 1u32));
    items.extend(repeat(tf_rep, n - 1));
    items.push(t());
    items.push(t());
    items.extend(s(h - 9u32));
    items.push(t());
    items.push(t());
    items.extend(s(h - 7u32));
    items.push(t());
    items.push(t());
    items.push(t());
    items.extend(s(w - g - 5u32));
    items.push(t());
    items.push(t());
    items.extend(s(wg6.clone()));
    items.push(t());
    items.push(t());
    items.extend(s(BigUint::from(2u32)));
    items.push(t());
    items.extend(s(h - 5u32));
    items.push(t());
    items.extend(s(BigUint::from(2u32)));
    items.push(t());
    items.push(t());
    items.extend(s(BigUint::from(2u32)));

    items.push(t());
    items.push(t());

    // bottom filling:
    // TSST S^{H-5} TSSTT S^{W-g-6} TT S^{W-g-5} TTT S^{H-7} TT S^{H-9} TT
    //   (S^{h+6g+1} T S^{W-g-6} TT S^{W-g-6} TS)^{n-1} S
    items.push(t());
    items.extend(s(BigUint::from(2u32)));
    items.push(t());
    items.extend(s(h - 5u32));
    items.push(t());
    items.extend(s(BigUint::from(2u32)));
    items.push(t());
    items.push(t());
    items.extend(s(wg6.clone()));
    items.push(t());
    items.push(t());
    items.extend(s(w - g - 5u32));
    items.push(t());
    items.push(t());
    items.push(t());
    items.extend(s(h - 7u32));
    items.push(t());
    items.push(t());
    items.extend(s(h - 9u32));
    items.push(t());
    items.push(t());
    let mut bf_rep: Vec<Item> = Vec::new();
    bf_rep.extend(s(hh + 6u32 * g + 1u32));
    bf_rep.push(t());
    bf_rep.extend(s(wg6.clone()));
    bf_rep.push(t());
    bf_rep.push(t());
    bf_rep.extend(s(wg6.clone()));
    bf_rep.push(t());
    bf_rep.push(Item::Sym(Instruction::Straight));
    items.extend(repeat(bf_rep, n - 1));
    items.push(Item::Sym(Instruction::Straight));

    // tail: TTSSSS into the first block region
    items.push(t());
    items.push(t());
    items.extend(s(BigUint::from(4u32)));

    Ok(items)
}

/// Expected shelf cell count from region accounting: everything except the
/// n open block regions of size 2 x (h+6g) x (W-6).
pub fn shelf_expected_len(p: &ParamSet) -> BigUint {
    let volume = 2u32 * &p.height * &p.width;
    let regions = BigUint::from(p.n) * 2u32 * (&p.h + 6u32 * &p.g) * (&p.width - 6u32);
    volume - regions
}

/// Assemble the full program for a 3DM-based variant.
pub fn gen_program(
    variant: Variant,
    inst: &ThreeDMInstance,
    p: &ParamSet,
) -> Result<GenArtifact, GenError> {
    assert!(variant != Variant::Weak2d, "weak2d has its own generator");
    if inst.n() as u64 != p.n || BigUint::from(inst.t) != p.t {
        return Err(GenError::InstanceMismatch);
    }
    let validation = validate_params(p, Some(inst));
    if !validation.witness_feasible() {
        return Err(GenError::Infeasible(alloc::format!("{:?}", validation.failed_witness())));
    }
    let alphabet = match variant {
        Variant::Hex | Variant::HexClosed => Alphabet::Triangular,
        _ => Alphabet::Square,
    };
    let wire_sym = match variant {
        Variant::Wildcard2d => Instruction::Wildcard,
        Variant::Packing2d | Variant::Box2 => Instruction::Turn90,
        Variant::Hex | Variant::HexClosed => Instruction::Turn60,
        Variant::Weak2d => unreachable!(),
    };
    let rows: BigUint = match variant {
        Variant::Box2 => 2u32 * &p.h,
        _ => p.h.clone(),
    };

    let mut out: Vec<Item> = Vec::new();
    let mut map = MapBuilder::new();
    let mut notes = Vec::new();

    if variant == Variant::Box2 {
        let shelf = shelf_items(p)?;
        let got: BigUint = shelf.iter().map(item_len).sum();
        let expected = shelf_expected_len(p);
        if got != expected {
            notes.push(alloc::format!(
                "shelf length {} vs region accounting {}",
                got,
                expected
            ));
        }
        map.add(GadgetId::Shelf, &shelf, &mut out);
    }

    for (class, values, wire_len) in [
        (BlockClass::A, &inst.a, &p.l_a),
        (BlockClass::B, &inst.b, &p.l_b),
        (BlockClass::C, &inst.c, &p.l_c),
    ] {
        for (idx, &x) in values.iter().enumerate() {
            let block = block_items(x, &p.m, &rows, alphabet)?;
            map.add(GadgetId::Block { class, idx }, &block, &mut out);
            let wire = sym_run(wire_sym, wire_len.clone());
            map.add(GadgetId::Wire { class, idx }, &wire, &mut out);
        }
    }

    let volume: BigUint = match variant {
        Variant::Box2 => 2u32 * &p.height * &p.width,
        _ => &p.height * &p.width,
    };
    let used = map.cursor.clone();
    match variant {
        Variant::Wildcard2d | Variant::Box2 => {
            if used > volume {
                return Err(GenError::NegativeTrailer);
            }
            let trailer_sym =
                if variant == Variant::Wildcard2d { Instruction::Wildcard } else { Instruction::Turn90 };
            let trailer = sym_run(trailer_sym, &volume - &used);
            map.add(GadgetId::Trailer, &trailer, &mut out);
        }
        Variant::Packing2d | Variant::Hex | Variant::HexClosed => {
            if used > volume {
                return Err(GenError::NegativeTrailer);
            }
        }
        Variant::Weak2d => unreachable!(),
    }

    let program = Program::new(alphabet, out).expect("legal symbols");
    let dims = p.to_desk().ok_or(GenError::BoxTooLarge)?;
    let bx = match variant {
        Variant::Wildcard2d => BoxSpec::square(dims.height, dims.width, Mode::Fill),
        Variant::Packing2d => BoxSpec::square(dims.height, dims.width, Mode::Pack),
        Variant::Box2 => BoxSpec::square3d(2, dims.height, dims.width, Mode::Fill),
        Variant::Hex | Variant::HexClosed => {
            BoxSpec::triangular(dims.height, dims.width, Mode::Pack)
        }
        Variant::Weak2d => unreachable!(),
    };
    // Fill variants must land exactly on the volume.
    if bx.mode == Mode::Fill {
        debug_assert_eq!(program_length(&program).to_u128(), Some(bx.volume()));
    }
    Ok(GenArtifact { program, bx, params: p.clone(), index_map: map.entries, validation, notes })
}

/// Per-layer data of the weak-2D reduction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeakLayer {
    pub a: BigUint,
    pub w: BigUint,
    pub x: BigUint,
    pub h: u64,
    pub variant_no: u8,
}

pub fn weak2d_layers(inst: &PartitionInstance) -> Vec<WeakLayer> {
    let n = inst.values.len() as u64;
    let mut rest: BigUint = inst.total();
    let mut layers = Vec::new();
    for (i, a) in inst.values.iter().enumerate() {
        let w = 4u32 * &rest + 1u32;
        let x = (&w - 1u32) / 2u32;
        let h = 2 * (n - i as u64);
        let four_a = 4u32 * a;
        let variant_no = if h == 2 {
            3
        } else if four_a <= x {
            1
        } else {
            2
        };
        layers.push(WeakLayer { a: a.clone(), w, x, h, variant_no });
        rest -= a;
    }
    layers
}

fn weak_layer_items(layer: &WeakLayer) -> Vec<Item> {
    let s = |k: BigUint| sym_run(Instruction::Straight, k);
    let t = || Item::Sym(Instruction::Turn90);
    let a = &layer.a;
    let x = &layer.x;
    let h = BigUint::from(layer.h);
    let mut items: Vec<Item> = Vec::new();
    // arm: T (S)^{x-1} T
    items.push(t());
    items.extend(s(x - 1u32));
    items.push(t());
    match layer.variant_no {
        1 => {
            // padding: (S)^{h-2} (TT (S)^{h-3})^{4a-1} T
            items.extend(s(&h - 2u32));
            let mut strip = alloc::vec![t(), t()];
            strip.extend(s(&h - 3u32));
            items.extend(repeat(strip, 4u32 * a - 1u32));
            items.push(t());
            // shift: (S)^{x-4a+1} (T)^{2(2a-1)}
            items.extend(s(x - 4u32 * a + 1u32));
            items.extend(sym_run(Instruction::Turn90, 2u32 * (2u32 * a - 1u32)));
            // return: (S)^{x-2a} TT (S)^{x-2a-1} T
            items.extend(s(x - 2u32 * a));
            items.push(t());
            items.push(t());
            items.extend(s(x - 2u32 * a - 1u32));
            items.push(t());
        }
        2 => {
            // padding: (S)^{h-2} (TT (S)^{h-3})^{x} (TT (S)^{h-2})^{4a-x-1} T
            items.extend(s(&h - 2u32));
            let mut strip = alloc::vec![t(), t()];
            strip.extend(s(&h - 3u32));
            items.extend(repeat(strip, x.clone()));
            let mut tall = alloc::vec![t(), t()];
            tall.extend(s(&h - 2u32));
            items.extend(repeat(tall, 4u32 * a - x - 1u32));
            items.push(t());
            // shift: (T)^{2(2a-1-(4a-x-1))} = (T)^{2(x-2a)}
            items.extend(sym_run(Instruction::Turn90, 2u32 * (x - 2u32 * a)));
            // return: (S)^{x-2a} TT (S)^{x-2a-1} T
            items.extend(s(x - 2u32 * a));
            items.push(t());
            items.push(t());
            items.extend(s(x - 2u32 * a - 1u32));
            items.push(t());
        }
        3 => {
            // padding: T (S)^{x} (T)^{2(2a-1)}; return: TS
            items.push(t());
            items.extend(s(x.clone()));
            items.extend(sym_run(Instruction::Turn90, 2u32 * (2u32 * a - 1u32)));
            items.push(t());
            items.push(Item::Sym(Instruction::Straight));
        }
        _ => unreachable!(),
    }
    items
}

/// Compile a 2-Partition instance into the weak-2D fill program: caps at
/// both ends, one layer per element, emitted compressed.
pub fn gen_weak2d(inst: &PartitionInstance) -> Result<GenArtifact, GenError> {
    if inst.values.is_empty() {
        return Err(GenError::EmptyInstance);
    }
    let n = inst.values.len() as u64;
    let total = inst.total();
    let p = crate::params::derive_params(Variant::Weak2d, n, &total, &crate::params::Scale::Paper)
        .expect("weak2d params");
    let w = &p.width;
    let s = |k: BigUint| sym_run(Instruction::Straight, k);
    let t = || Item::Sym(Instruction::Turn90);

    let mut out: Vec<Item> = Vec::new();
    let mut map = MapBuilder::new();
    let mut notes = Vec::new();
    notes.push(String::from(
        "cap seam: the printed cap's final straight run shares one cube with the swivel turn; \
         the emitted cap is (S)^{(W-1)/2-1} TT (S)^{W-2} TT (S)^{(W+1)/2-2} T",
    ));

    // start cap
    let mut cap: Vec<Item> = Vec::new();
    cap.extend(s((w - 1u32) / 2u32 - 1u32));
    cap.push(t());
    cap.push(t());
    cap.extend(s(w - 2u32));
    cap.push(t());
    cap.push(t());
    cap.extend(s((w + 1u32) / 2u32 - 2u32));
    cap.push(t());
    let cap_len: BigUint = cap.iter().map(item_len).sum();
    debug_assert_eq!(cap_len, 2u32 * w);
    map.add(GadgetId::CapStart, &cap, &mut out);

    let layers = weak2d_layers(inst);
    for (idx, layer) in layers.iter().enumerate() {
        let items = weak_layer_items(layer);
        let len: BigUint = items.iter().map(item_len).sum();
        debug_assert_eq!(
            len,
            2u32 * &layer.w + 4u32 * &layer.a * (layer.h - 2),
            "layer {idx} length"
        );
        map.add(GadgetId::Layer { idx, variant_no: layer.variant_no }, &items, &mut out);
    }

    // end cap: the start cap reversed.
    let mut end_cap: Vec<Item> = Vec::new();
    end_cap.push(t());
    end_cap.extend(s((w + 1u32) / 2u32 - 2u32));
    end_cap.push(t());
    end_cap.push(t());
    end_cap.extend(s(w - 2u32));
    end_cap.push(t());
    end_cap.push(t());
    end_cap.extend(s((w - 1u32) / 2u32 - 1u32));
    map.add(GadgetId::CapEnd, &end_cap, &mut out);

    let program = Program::new(Alphabet::Square, out).expect("legal symbols");
    debug_assert_eq!(program_length(&program), &p.height * w);

    let dims = p.to_desk().ok_or(GenError::BoxTooLarge)?;
    let bx = BoxSpec::square(dims.height, dims.width, Mode::Fill);
    let validation = validate_params(&p, None);
    Ok(GenArtifact { program, bx, params: p, index_map: map.entries, validation, notes })
}

/// Blow up a triangular program by `factor`: S becomes S^factor, each turn
/// becomes S^{factor-1} followed by the turn.
pub fn blow_up_hex(p: &Program, factor: u64) -> Program {
    assert_eq!(p.alphabet(), Alphabet::Triangular, "blow-up is a triangular operation");
    fn map_items(items: &[Item], factor: u64) -> Vec<Item> {
        let mut out = Vec::new();
        for item in items {
            match item {
                Item::Sym(Instruction::Straight) => {
                    out.extend(sym_run(Instruction::Straight, factor))
                }
                Item::Sym(turn) => {
                    out.extend(sym_run(Instruction::Straight, factor - 1));
                    out.push(Item::Sym(*turn));
                }
                Item::Repeat(body, count) => {
                    out.extend(repeat(map_items(body, factor), count.clone()));
                }
            }
        }
        out
    }
    Program::new(Alphabet::Triangular, map_items(p.items(), factor)).expect("legal symbols")
}

/// The closed-chain frame: eight straight legs around the blown-up box.
/// Six leg lengths are nonzero mod 101 with residues {1,2,3,7,15,22},
/// grouped per axis so that lattice closure forces the fold.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FramePlan {
    pub legs: Vec<(Dir, u64)>,
    pub turns: Vec<Instruction>,
    /// Translation applied to blown inner coordinates (j, i).
    pub offset: (i64, i64),
    /// Blown, shifted terminals: the chain starts at u and the frame leads
    /// from v back to u.
    pub u: Cell,
    pub v: Cell,
    pub height: u64,
    pub width: u64,
}

pub const FRAME_MODULUS: u64 = 101;

/// Plan the frame for an inner `inner_h x inner_w` parallelogram whose
/// terminals sit at the top boundary: u = (H-1, g), v = (H-1, g-1).
pub fn frame_plan(inner_h: u64, inner_w: u64, g: u64) -> FramePlan {
    let f = FRAME_MODULUS;
    let t = f * (inner_h - 1);
    let r = f * (inner_w - 1);
    let x = f * g;
    // Legs from v, ending exactly at u; see the residue bookkeeping in the
    // tests: vertical residues (+3, -1, -2), horizontal (-22, +7, +15).
    let legs: Vec<(Dir, u64)> = alloc::vec![
        (Dir::Tb, 104),
        (Dir::Td, x - 79),
        (Dir::Te, t + 203),
        (Dir::Ta, r + 209),
        (Dir::Tb, t + 101),
        (Dir::Td, r - x + 202),
        (Dir::Te, 2),
        (Dir::Ta, 15),
    ];
    let turns = alloc::vec![
        Instruction::Turn120, // b -> d
        Instruction::Turn60,  // d -> e
        Instruction::Turn120, // e -> a
        Instruction::Turn60,  // a -> b
        Instruction::Turn120, // b -> d
        Instruction::Turn60,  // d -> e
        Instruction::Turn120, // e -> a
    ];
    // Enclosing box: j in [-99, T+104], i in [-22, R+187].
    let offset = (99i64, 22i64);
    FramePlan {
        legs,
        turns,
        offset,
        u: Cell::yx(t as i64 + offset.0, x as i64 + offset.1),
        v: Cell::yx(t as i64 + offset.0, x as i64 + offset.1 - f as i64),
        height: t + 204,
        width: r + 210,
    }
}

/// Frame instruction string: straights along each leg with the planned turn
/// at each corner, ending with a straight into the closing cell.
pub fn frame_items(plan: &FramePlan) -> Vec<Item> {
    let mut items = Vec::new();
    for (i, (_, len)) in plan.legs.iter().enumerate() {
        items.extend(sym_run(Instruction::Straight, *len - 1));
        if i < plan.turns.len() {
            items.push(Item::Sym(plan.turns[i]));
        } else {
            items.push(Item::Sym(Instruction::Straight));
        }
    }
    items
}

/// Compile the closed-chain variant: the hex program blown up by 101
/// followed by the frame, in closed-pack mode inside the frame's box.
pub fn gen_hex_closed(inst: &ThreeDMInstance, p: &ParamSet) -> Result<GenArtifact, GenError> {
    let inner = gen_program(Variant::Hex, inst, p)?;
    let dims = p.to_desk().ok_or(GenError::BoxTooLarge)?;
    let g = dims.g;
    let plan = frame_plan(dims.height, dims.width, g);
    let blown = blow_up_hex(&inner.program, FRAME_MODULUS);

    let mut out: Vec<Item> = Vec::new();
    let mut map = MapBuilder::new();
    for entry in &inner.index_map {
        map.entries.push(IndexEntry {
            gadget: entry.gadget,
            start: &entry.start * FRAME_MODULUS,
            len: &entry.len * FRAME_MODULUS,
        });
    }
    out.extend_from_slice(blown.items());
    map.cursor = program_length(&blown);
    let frame = frame_items(&plan);
    map.add(GadgetId::Frame, &frame, &mut out);

    let program = Program::new(Alphabet::Triangular, out).expect("legal symbols");
    let bx = BoxSpec::triangular(plan.height, plan.width, Mode::ClosedPack);
    let mut notes = inner.notes.clone();
    notes.push(alloc::format!(
        "inner terminals u=({},{}), v=({},{}); frame offset ({},{})",
        dims.height - 1,
        g,
        dims.height - 1,
        g - 1,
        plan.offset.0,
        plan.offset.1
    ));
    Ok(GenArtifact {
        program,
        bx,
        params: p.clone(),
        index_map: map.entries,
        validation: inner.validation.clone(),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::normalize_3dm;
    use crate::params::{derive_params, Scale};
    use crate::program::{render_program, Program};
    use alloc::string::String;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn expanded(p: &Program) -> String {
        crate::program::expand_program(p, 10_000)
            .unwrap()
            .iter()
            .map(|i| i.symbol())
            .collect()
    }

    #[test]
    fn square_block_template() {
        let p = gen_block_gadget(2, &big(2), &big(3), Alphabet::Square).unwrap();
        assert_eq!(expanded(&p), "SSSTTSSTTSSS");
        assert_eq!(program_length(&p), big(12));
        let one_row = gen_block_gadget(1, &big(3), &big(1), Alphabet::Square).unwrap();
        assert_eq!(expanded(&one_row), "SSS");
    }

    #[test]
    fn hex_block_template() {
        let p = gen_block_gadget(1, &big(3), &big(2), Alphabet::Triangular).unwrap();
        assert_eq!(expanded(&p), "SSvuSS");
        assert_eq!(program_length(&p), big(6));
        let taller = gen_block_gadget(1, &big(4), &big(4), Alphabet::Triangular).unwrap();
        assert_eq!(program_length(&taller), big(16));
    }

    #[test]
    fn narrow_block_rejected() {
        assert!(matches!(
            gen_block_gadget(1, &big(2), &big(3), Alphabet::Square),
            Err(GenError::BlockTooNarrow(2))
        ));
    }

    #[test]
    fn weak2d_layers_for_spec_example() {
        let inst = PartitionInstance::from_u64(&[1, 2, 1]);
        let layers = weak2d_layers(&inst);
        assert_eq!(layers.iter().map(|l| l.variant_no).collect::<Vec<_>>(), alloc::vec![1, 2, 3]);
        assert_eq!(layers[0].w, big(17));
        assert_eq!(layers[1].w, big(13));
        assert_eq!(layers[2].w, big(5));
        assert_eq!(layers[0].h, 6);
        assert_eq!(layers[1].h, 4);
        assert_eq!(layers[2].h, 2);
    }

    #[test]
    fn weak2d_program_length_is_box_volume() {
        for values in [&[1u64, 2, 1][..], &[1], &[3, 1, 4, 1], &[5, 5]] {
            let inst = PartitionInstance::from_u64(values);
            let art = gen_weak2d(&inst).unwrap();
            assert_eq!(
                program_length(&art.program).to_u128().unwrap(),
                art.bx.volume(),
                "values {values:?}"
            );
        }
    }

    #[test]
    fn weak2d_compressed_size_stays_small() {
        let inst = PartitionInstance::from_u64(&[1 << 20, 1 << 20]);
        let art = gen_weak2d(&inst).unwrap();
        let text = render_program(&art.program);
        assert!(text.len() < 400, "compressed size {}", text.len());
        assert_eq!(program_length(&art.program).to_u128().unwrap(), art.bx.volume());
    }

    #[test]
    fn blow_up_rules() {
        let p = crate::program::parse_program("u", Alphabet::Triangular).unwrap();
        assert_eq!(render_program(&blow_up_hex(&p, 101)), "(S)^100u");
        let s = crate::program::parse_program("S", Alphabet::Triangular).unwrap();
        assert_eq!(render_program(&blow_up_hex(&s, 101)), "(S)^101");
        let su = crate::program::parse_program("Su", Alphabet::Triangular).unwrap();
        assert_eq!(program_length(&blow_up_hex(&su, 101)), big(202));
    }

    #[test]
    fn frame_closure_and_residues() {
        let plan = frame_plan(12, 40, 2);
        // Exact lattice closure: legs sum to u - v = +101 * v1.
        let (mut j, mut i) = (0i64, 0i64);
        for (d, len) in &plan.legs {
            let (_, dy, dx) = d.delta();
            j += dy * *len as i64;
            i += dx * *len as i64;
        }
        assert_eq!((j, i), (0, 101));
        // Residues of the non-multiple legs are exactly {1,2,3,7,15,22}.
        let mut residues: Vec<u64> =
            plan.legs.iter().map(|(_, l)| l % FRAME_MODULUS).filter(|&r| r != 0).collect();
        residues.sort_unstable();
        assert_eq!(residues, alloc::vec![1, 2, 3, 7, 15, 22]);
    }

    #[test]
    fn mini_wildcard2d_assembles() {
        let (norm, _) = normalize_3dm(
            &ThreeDMInstance::new(10, alloc::vec![5, 6], alloc::vec![3, 2], alloc::vec![2, 2])
                .unwrap(),
        );
        assert!(norm.is_normalized());
        let p = derive_params(
            Variant::Wildcard2d,
            2,
            &big(norm.t),
            &Scale::Custom { g: 56, h: 172, m: 4 },
        )
        .unwrap();
        let art = gen_program(Variant::Wildcard2d, &norm, &p).unwrap();
        assert_eq!(program_length(&art.program).to_u128().unwrap(), art.bx.volume());
        // Index map partitions the program.
        let mut cursor = big(0);
        for e in &art.index_map {
            assert_eq!(e.start, cursor);
            cursor += &e.len;
        }
        assert_eq!(cursor, program_length(&art.program));
    }

    #[test]
    fn paper_scale_assembles_without_expansion() {
        let inst = ThreeDMInstance::new(87, alloc::vec![49], alloc::vec![25], alloc::vec![13])
            .unwrap();
        let p = derive_params(Variant::Wildcard2d, 1, &big(87), &Scale::Paper).unwrap();
        let art = gen_program(Variant::Wildcard2d, &inst, &p).unwrap();
        assert_eq!(
            program_length(&art.program),
            &p.height * &p.width,
            "length identity at paper scale"
        );
    }
}
