//! Core machinery for snake-cube puzzles: instruction programs (with the
//! compressed repetition notation), lattice chains and their verifiers, a
//! desk-scale exhaustive solver, source-problem oracles, reduction compilers,
//! witness builders and matching extraction.
//!
//! The crate is `no_std` (alloc required); all IO and file formats live in the
//! companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chain;
pub mod dioph;
pub mod extract;
pub mod gen;
pub mod hamfill;
pub mod lattice;
pub mod oracle;
pub mod params;
pub mod patterns;
pub mod program;
pub mod rle;
pub mod solver;
pub mod verify;
pub mod wires;
pub mod witness;

pub use chain::{Chain, Move, PeriodicBlock, Run};
pub use lattice::{BoxSpec, Cell, Dims, Dir, LatticeKind, Mode, TurnClass};
pub use program::{Alphabet, Instruction, Item, Program};
pub use verify::{Verdict, VerifyReport};
