//! Instruction programs and the compressed repetition notation.
//!
//! A program is an ordered tree whose leaves are instruction literals and
//! whose internal nodes repeat their body a positive (arbitrary-precision)
//! number of times. `T(SST)^2` denotes `TSSTSST`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Which instruction alphabet a program is written in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Alphabet {
    /// `S`, `T` and the wildcard `*` on the square (cubic) lattice.
    Square,
    /// `S`, `u` (60° turn) and `v` (120° turn) on the triangular lattice.
    Triangular,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Instruction {
    Straight,
    Turn90,
    Wildcard,
    Turn60,
    Turn120,
}

impl Instruction {
    pub fn symbol(self) -> char {
        match self {
            Instruction::Straight => 'S',
            Instruction::Turn90 => 'T',
            Instruction::Wildcard => '*',
            Instruction::Turn60 => 'u',
            Instruction::Turn120 => 'v',
        }
    }

    pub fn from_symbol(c: char) -> Option<Instruction> {
        Some(match c {
            'S' => Instruction::Straight,
            'T' => Instruction::Turn90,
            '*' => Instruction::Wildcard,
            'u' => Instruction::Turn60,
            'v' => Instruction::Turn120,
            _ => return None,
        })
    }

    pub fn legal_for(self, alphabet: Alphabet) -> bool {
        match self {
            Instruction::Straight => true,
            Instruction::Turn90 | Instruction::Wildcard => alphabet == Alphabet::Square,
            Instruction::Turn60 | Instruction::Turn120 => alphabet == Alphabet::Triangular,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One node of the repeat tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Item {
    Sym(Instruction),
    Repeat(Vec<Item>, BigUint),
}

impl Item {
    fn len(&self) -> BigUint {
        match self {
            Item::Sym(_) => BigUint::one(),
            Item::Repeat(body, count) => items_len(body) * count,
        }
    }
}

fn items_len(items: &[Item]) -> BigUint {
    let mut total = BigUint::zero();
    for item in items {
        total += item.len();
    }
    total
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum CodecError {
    #[error("syntax error at byte {pos}: {what}")]
    Syntax { pos: usize, what: &'static str },
    #[error("symbol '{symbol}' at byte {pos} is not legal for this lattice")]
    IllegalSymbol { pos: usize, symbol: char },
    #[error("repeat count at byte {pos} must be at least 1")]
    ZeroRepeat { pos: usize },
    #[error("program length {len} exceeds expansion limit {limit}")]
    LengthExceedsLimit { len: BigUint, limit: usize },
}

/// A repeat-tree of instructions over one lattice alphabet.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    alphabet: Alphabet,
    items: Vec<Item>,
}

impl Program {
    pub fn new(alphabet: Alphabet, items: Vec<Item>) -> Result<Program, CodecError> {
        check_items(&items, alphabet)?;
        Ok(Program { alphabet, items })
    }

    pub fn literal(alphabet: Alphabet, instrs: &[Instruction]) -> Result<Program, CodecError> {
        Program::new(alphabet, instrs.iter().map(|&i| Item::Sym(i)).collect())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn check_items(items: &[Item], alphabet: Alphabet) -> Result<(), CodecError> {
    for item in items {
        match item {
            Item::Sym(i) => {
                if !i.legal_for(alphabet) {
                    return Err(CodecError::IllegalSymbol { pos: 0, symbol: i.symbol() });
                }
            }
            Item::Repeat(body, count) => {
                if count.is_zero() {
                    return Err(CodecError::ZeroRepeat { pos: 0 });
                }
                check_items(body, alphabet)?;
            }
        }
    }
    Ok(())
}

/// Repeat `body` `count` times, flattening the trivial cases so that
/// generated trees stay canonical: a count of one inlines the body, and a
/// repeat whose body is a single repeat with the same count becomes one node
/// with the squared count.
pub fn repeat(body: Vec<Item>, count: impl Into<BigUint>) -> Vec<Item> {
    let count: BigUint = count.into();
    if count.is_zero() {
        return Vec::new();
    }
    if count.is_one() {
        return body;
    }
    if body.is_empty() {
        return Vec::new();
    }
    if body.len() == 1 {
        if let Item::Repeat(inner, inner_count) = &body[0] {
            if *inner_count == count {
                let squared = &count * &count;
                return alloc::vec![Item::Repeat(inner.clone(), squared)];
            }
        }
    }
    alloc::vec![Item::Repeat(body, count)]
}

/// `count` copies of a single symbol.
pub fn sym_run(sym: Instruction, count: impl Into<BigUint>) -> Vec<Item> {
    repeat(alloc::vec![Item::Sym(sym)], count)
}

/// Total number of leaf instructions after full expansion, computed without
/// expanding.
pub fn program_length(p: &Program) -> BigUint {
    items_len(p.items())
}

/// Flatten into an explicit instruction sequence. Errors when the expansion
/// would exceed `limit`.
pub fn expand_program(p: &Program, limit: usize) -> Result<Vec<Instruction>, CodecError> {
    let len = program_length(p);
    let small = len.to_usize().filter(|&l| l <= limit);
    let Some(small) = small else {
        return Err(CodecError::LengthExceedsLimit { len, limit });
    };
    let mut out = Vec::with_capacity(small);
    expand_items(p.items(), &mut out);
    Ok(out)
}

fn expand_items(items: &[Item], out: &mut Vec<Instruction>) {
    for item in items {
        match item {
            Item::Sym(i) => out.push(*i),
            Item::Repeat(body, count) => {
                let count = count.to_usize().expect("expansion length checked");
                for _ in 0..count {
                    expand_items(body, out);
                }
            }
        }
    }
}

/// Canonical text form; reparses to an equal tree.
pub fn render_program(p: &Program) -> String {
    let mut out = String::new();
    render_items(p.items(), &mut out);
    out
}

fn render_items(items: &[Item], out: &mut String) {
    for item in items {
        match item {
            Item::Sym(i) => out.push(i.symbol()),
            Item::Repeat(body, count) => {
                out.push('(');
                render_items(body, out);
                out.push_str(")^");
                out.push_str(&count.to_str_radix(10));
            }
        }
    }
}

/// Parse program text in the grammar
/// `program := item*; item := sym | "(" program ")" "^" count`.
/// Whitespace is ignored; counts are decimal and arbitrary precision.
pub fn parse_program(text: &str, alphabet: Alphabet) -> Result<Program, CodecError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let items = parse_items(bytes, &mut pos, alphabet, 0)?;
    if pos != bytes.len() {
        return Err(CodecError::Syntax { pos, what: "unexpected ')'" });
    }
    Ok(Program { alphabet, items })
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && (bytes[*pos] as char).is_whitespace() {
        *pos += 1;
    }
}

fn parse_items(
    bytes: &[u8],
    pos: &mut usize,
    alphabet: Alphabet,
    depth: usize,
) -> Result<Vec<Item>, CodecError> {
    if depth > 256 {
        return Err(CodecError::Syntax { pos: *pos, what: "nesting too deep" });
    }
    let mut items = Vec::new();
    loop {
        skip_ws(bytes, pos);
        if *pos >= bytes.len() {
            return Ok(items);
        }
        let c = bytes[*pos] as char;
        match c {
            ')' => return Ok(items),
            '(' => {
                let open = *pos;
                *pos += 1;
                let body = parse_items(bytes, pos, alphabet, depth + 1)?;
                skip_ws(bytes, pos);
                if *pos >= bytes.len() || bytes[*pos] != b')' {
                    return Err(CodecError::Syntax { pos: open, what: "unclosed '('" });
                }
                *pos += 1;
                skip_ws(bytes, pos);
                if *pos >= bytes.len() || bytes[*pos] != b'^' {
                    return Err(CodecError::Syntax { pos: *pos, what: "expected '^' after ')'" });
                }
                *pos += 1;
                skip_ws(bytes, pos);
                let digits_start = *pos;
                while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                if *pos == digits_start {
                    return Err(CodecError::Syntax { pos: *pos, what: "expected repeat count" });
                }
                let digits = core::str::from_utf8(&bytes[digits_start..*pos]).unwrap();
                let count: BigUint = digits.parse().unwrap();
                if count.is_zero() {
                    return Err(CodecError::ZeroRepeat { pos: digits_start });
                }
                items.push(Item::Repeat(body, count));
            }
            _ => {
                let Some(instr) = Instruction::from_symbol(c) else {
                    return Err(CodecError::Syntax { pos: *pos, what: "unexpected character" });
                };
                if !instr.legal_for(alphabet) {
                    return Err(CodecError::IllegalSymbol { pos: *pos, symbol: c });
                }
                items.push(Item::Sym(instr));
                *pos += 1;
            }
        }
    }
}

/// Parse a flat instruction string (no repeat groups allowed).
pub fn parse_literal(text: &str, alphabet: Alphabet) -> Result<Vec<Instruction>, CodecError> {
    let p = parse_program(text, alphabet)?;
    expand_program(&p, text.len())
}
