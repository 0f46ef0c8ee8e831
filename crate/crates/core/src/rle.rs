//! Compressed verification: accept or reject a (possibly periodic) chain
//! against a (possibly compressed) program in time polynomial in the number
//! of runs and blocks rather than in the expanded length.
//!
//! The instruction side and the chain's induced turn sequence are both put
//! into a run-length normal form with one level of looping; comparison walks
//! both streams lazily and skips aligned periodic stretches wholesale.
//! Geometry (box membership and self-avoidance) is decided per run family
//! with exact integer lattice arithmetic.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::chain::{pattern_shift, Chain, Move, Run};
use crate::dioph::{lattice_point_in_box, solve_linear, DiophError};
use crate::lattice::{turn_between, BoxSpec, Cell, Dir, Mode, TurnClass};
use crate::program::{program_length, Instruction, Item, Program};
use crate::verify::{
    Verdict, VerifyError, VerifyReport, VerifyStats, Violation, ViolationKind,
};

/// Work cap for the stream comparator (group chunks processed).
const COMPARE_BUDGET: u64 = 4_000_000;
/// Largest combined period the comparator will align explicitly.
const LCM_CAP: u64 = 1 << 17;
/// Repeats up to this count are inlined instead of kept as loops.
const INLINE_COUNT: u64 = 8;

#[derive(Clone, PartialEq, Eq, Debug)]
enum Seg<S: Copy + Eq> {
    Grp(S, BigUint),
    Loop { groups: Vec<(S, BigUint)>, count: BigUint, ilen: BigUint },
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Stream<S: Copy + Eq> {
    segs: Vec<Seg<S>>,
}

impl<S: Copy + Eq> Default for Stream<S> {
    fn default() -> Stream<S> {
        Stream { segs: Vec::new() }
    }
}

impl<S: Copy + Eq> Stream<S> {
    fn push(&mut self, sym: S, count: BigUint) {
        if count.is_zero() {
            return;
        }
        if let Some(Seg::Grp(s, c)) = self.segs.last_mut() {
            if *s == sym {
                *c += count;
                return;
            }
        }
        self.segs.push(Seg::Grp(sym, count));
    }

    fn push_groups(&mut self, groups: &[(S, BigUint)]) {
        for (s, c) in groups {
            self.push(*s, c.clone());
        }
    }

    /// Append `groups` repeated `count` times, canonicalizing: small counts
    /// inline, single-symbol bodies collapse, a body whose first and last
    /// symbols agree is peeled so loop periods never merge across copies,
    /// and non-primitive periods are reduced.
    fn push_loop(&mut self, groups: Vec<(S, BigUint)>, count: BigUint) {
        // Merge adjacent equal symbols inside the body.
        let mut body: Vec<(S, BigUint)> = Vec::with_capacity(groups.len());
        for (s, c) in groups {
            if c.is_zero() {
                continue;
            }
            if let Some((ls, lc)) = body.last_mut() {
                if *ls == s {
                    *lc += c;
                    continue;
                }
            }
            body.push((s, c));
        }
        if body.is_empty() || count.is_zero() {
            return;
        }
        if body.len() == 1 {
            let (s, c) = body.pop().unwrap();
            self.push(s, c * count);
            return;
        }
        if count.to_u64().is_some_and(|c| c <= INLINE_COUNT) {
            let c = count.to_u64().unwrap();
            for _ in 0..c {
                self.push_groups(&body);
            }
            return;
        }
        if body[0].0 == body[body.len() - 1].0 {
            // body^c = head.. + (tail+head, mid..)^(c-1) + tail
            let tail = body.pop().unwrap();
            let head = body[0].clone();
            let mids = body[1..].to_vec();
            self.push_groups(&body);
            let mut inner = Vec::with_capacity(mids.len() + 1);
            inner.push((tail.0, tail.1.clone() + head.1));
            inner.extend(mids);
            self.push_loop(inner, count - BigUint::one());
            self.push(tail.0, tail.1);
            return;
        }
        // Primitive period reduction.
        let k = body.len();
        let mut prim = k;
        for p in 1..k {
            if k % p == 0 && (p..k).all(|i| body[i] == body[i % p]) {
                prim = p;
                break;
            }
        }
        let (body, count) = if prim < k {
            (body[..prim].to_vec(), count * BigUint::from((k / prim) as u64))
        } else {
            (body, count)
        };
        let ilen: BigUint = body.iter().map(|(_, c)| c.clone()).sum();
        self.segs.push(Seg::Loop { groups: body, count, ilen });
    }

    fn total_len(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for seg in &self.segs {
            match seg {
                Seg::Grp(_, c) => acc += c,
                Seg::Loop { count, ilen, .. } => acc += count * ilen,
            }
        }
        acc
    }
}

/// Flatten a program's repeat tree into stream normal form. Errors on
/// shapes the compressed verifier cannot handle (a huge repeat whose body
/// itself contains a huge repeat of a multi-symbol pattern).
fn program_stream(p: &Program) -> Result<Stream<Instruction>, VerifyError> {
    let mut out = Stream::default();
    norm_items(p.items(), &mut out)?;
    Ok(out)
}

fn norm_items(items: &[Item], out: &mut Stream<Instruction>) -> Result<(), VerifyError> {
    for item in items {
        match item {
            Item::Sym(s) => out.push(*s, BigUint::one()),
            Item::Repeat(body, count) => {
                let mut inner = Stream::default();
                norm_items(body, &mut inner)?;
                if inner.segs.iter().all(|s| matches!(s, Seg::Grp(..))) {
                    let groups: Vec<(Instruction, BigUint)> = inner
                        .segs
                        .into_iter()
                        .map(|s| match s {
                            Seg::Grp(sym, c) => (sym, c),
                            Seg::Loop { .. } => unreachable!(),
                        })
                        .collect();
                    out.push_loop(groups, count.clone());
                } else if count.to_u64().is_some_and(|c| c <= 64) {
                    let c = count.to_u64().unwrap();
                    for _ in 0..c {
                        let mut copy = Stream::default();
                        norm_items(body, &mut copy)?;
                        append_stream(out, copy);
                    }
                } else {
                    return Err(VerifyError::Unsupported(
                        "huge repeat of a body with nested huge repeats",
                    ));
                }
            }
        }
    }
    Ok(())
}

fn append_stream<S: Copy + Eq>(out: &mut Stream<S>, other: Stream<S>) {
    for seg in other.segs {
        match seg {
            Seg::Grp(s, c) => out.push(s, c),
            Seg::Loop { groups, count, .. } => out.push_loop(groups, count),
        }
    }
}

/// Step groups: the chain's direction sequence in the same normal form.
fn step_stream(c: &Chain) -> Result<Stream<Dir>, VerifyError> {
    let mut out = Stream::default();
    for m in &c.moves {
        match m {
            Move::Run(r) => out.push(r.dir, r.len.clone()),
            Move::Periodic(b) => {
                let groups: Vec<(Dir, BigUint)> =
                    b.pattern.iter().map(|r| (r.dir, r.len.clone())).collect();
                out.push_loop(groups, b.count.clone());
            }
        }
    }
    Ok(out)
}

/// Induced turn stream (the chain side of the instruction comparison): one
/// junction class per direction change, `Straight` runs in between.
fn turn_stream(c: &Chain) -> Result<Stream<TurnClass>, VerifyError> {
    let steps = step_stream(c)?;
    let lattice = c.lattice;
    let mut out = Stream::default();
    let mut prev: Option<Dir> = None;
    let one = BigUint::one();
    for seg in &steps.segs {
        match seg {
            Seg::Grp(d, n) => {
                if let Some(pd) = prev {
                    out.push(turn_between(pd, *d, lattice), one.clone());
                }
                out.push(TurnClass::Straight, n - &one);
                prev = Some(*d);
            }
            Seg::Loop { groups, count, .. } => {
                let k = groups.len();
                if let Some(pd) = prev {
                    out.push(turn_between(pd, groups[0].0, lattice), one.clone());
                }
                // First copy inline.
                for i in 0..k {
                    if i > 0 {
                        out.push(turn_between(groups[i - 1].0, groups[i].0, lattice), one.clone());
                    }
                    out.push(TurnClass::Straight, &groups[i].1 - &one);
                }
                // Remaining copies: cyclic junction then one period of turns.
                let mut period: Vec<(TurnClass, BigUint)> = Vec::with_capacity(2 * k);
                period.push((turn_between(groups[k - 1].0, groups[0].0, lattice), one.clone()));
                for i in 0..k {
                    if i > 0 {
                        period.push((
                            turn_between(groups[i - 1].0, groups[i].0, lattice),
                            one.clone(),
                        ));
                    }
                    period.push((TurnClass::Straight, &groups[i].1 - &one));
                }
                out.push_loop(period, count - &one);
                prev = Some(groups[k - 1].0);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Cursor<'a, S: Copy + Eq> {
    segs: &'a [Seg<S>],
    seg: usize,
    grp: usize,
    done_in_grp: BigUint,
    periods_done: BigUint,
}

impl<'a, S: Copy + Eq> Cursor<'a, S> {
    fn new(stream: &'a Stream<S>) -> Cursor<'a, S> {
        let mut c = Cursor {
            segs: &stream.segs,
            seg: 0,
            grp: 0,
            done_in_grp: BigUint::zero(),
            periods_done: BigUint::zero(),
        };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        loop {
            if self.seg >= self.segs.len() {
                return;
            }
            match &self.segs[self.seg] {
                Seg::Grp(_, c) => {
                    if self.done_in_grp < *c {
                        return;
                    }
                    self.seg += 1;
                    self.grp = 0;
                    self.done_in_grp = BigUint::zero();
                    self.periods_done = BigUint::zero();
                }
                Seg::Loop { groups, count, .. } => {
                    if self.periods_done >= *count {
                        self.seg += 1;
                        self.grp = 0;
                        self.done_in_grp = BigUint::zero();
                        self.periods_done = BigUint::zero();
                        continue;
                    }
                    if self.done_in_grp < groups[self.grp].1 {
                        return;
                    }
                    self.done_in_grp = BigUint::zero();
                    self.grp += 1;
                    if self.grp == groups.len() {
                        self.grp = 0;
                        self.periods_done += BigUint::one();
                    }
                }
            }
        }
    }

    /// Current symbol and how much of its group remains.
    fn chunk(&self) -> Option<(S, BigUint)> {
        if self.seg >= self.segs.len() {
            return None;
        }
        Some(match &self.segs[self.seg] {
            Seg::Grp(s, c) => (*s, c - &self.done_in_grp),
            Seg::Loop { groups, .. } => {
                let (s, c) = &groups[self.grp];
                (*s, c - &self.done_in_grp)
            }
        })
    }

    fn advance(&mut self, n: &BigUint) {
        self.done_in_grp += n;
        self.normalize();
    }

    /// If inside a loop: (instructions remaining in this loop seg, period
    /// length, periods fully remaining after the current one).
    fn loop_info(&self) -> Option<(BigUint, BigUint)> {
        if self.seg >= self.segs.len() {
            return None;
        }
        let Seg::Loop { groups, count, ilen } = &self.segs[self.seg] else {
            return None;
        };
        let mut off = self.done_in_grp.clone();
        for (_, c) in &groups[..self.grp] {
            off += c;
        }
        let remaining = (count - &self.periods_done) * ilen - off;
        Some((remaining, ilen.clone()))
    }

    /// Skip `q` whole periods of the current loop, keeping phase.
    fn skip_periods(&mut self, q: &BigUint) {
        self.periods_done += q;
        self.normalize();
    }
}

enum CompareEnd {
    Equal,
    Mismatch { pos: BigUint, expected: Instruction, found: TurnClass },
}

/// Compare `total` instructions of the trimmed program stream against the
/// chain's turn stream, with wildcard semantics.
fn compare_streams(
    prog: &Stream<Instruction>,
    turns: &Stream<TurnClass>,
    total: &BigUint,
) -> Result<CompareEnd, VerifyError> {
    let mut a = Cursor::new(prog);
    // Drop the first instruction (it has no effect).
    a.advance(&BigUint::one().min(prog.total_len()));
    let mut b = Cursor::new(turns);
    let mut compared = BigUint::zero();
    let mut work = 0u64;
    while compared < *total {
        work += 1;
        if work > COMPARE_BUDGET {
            return Err(VerifyError::BudgetExceeded);
        }
        // Periodic acceleration: align both loops over their lcm period.
        if let (Some((rem_a, il_a)), Some((rem_b, il_b))) = (a.loop_info(), b.loop_info()) {
            if let (Some(la), Some(lb)) = (il_a.to_u64(), il_b.to_u64()) {
                let l = la.lcm(&lb);
                let big_l = BigUint::from(l);
                let left = total - &compared;
                if l <= LCM_CAP
                    && rem_a >= (&big_l << 1)
                    && rem_b >= (&big_l << 1)
                    && left >= (&big_l << 1)
                {
                    // Walk one lcm period explicitly.
                    let mut walked = BigUint::zero();
                    while walked < big_l {
                        work += 1;
                        if work > COMPARE_BUDGET {
                            return Err(VerifyError::BudgetExceeded);
                        }
                        let (sa, ra) = a.chunk().expect("inside loop");
                        let (sb, rb) = b.chunk().expect("inside loop");
                        if !sb.matches(sa) {
                            return Ok(CompareEnd::Mismatch {
                                pos: compared + walked,
                                expected: sa,
                                found: sb,
                            });
                        }
                        let step = ra.min(rb).min(&big_l - &walked);
                        a.advance(&step);
                        b.advance(&step);
                        walked += step;
                    }
                    compared += &big_l;
                    // Both cursors are back at the same phase: skip aligned
                    // whole-lcm blocks.
                    let (rem_a, _) = a.loop_info().unwrap_or((BigUint::zero(), BigUint::one()));
                    let (rem_b, _) = b.loop_info().unwrap_or((BigUint::zero(), BigUint::one()));
                    let left = total - &compared;
                    let skips = (&rem_a / &big_l).min(&rem_b / &big_l).min(&left / &big_l);
                    if !skips.is_zero() {
                        let qa = &skips * l / la;
                        let qb = &skips * l / lb;
                        a.skip_periods(&qa);
                        b.skip_periods(&qb);
                        compared += &skips * &big_l;
                    }
                    continue;
                }
            }
        }
        let Some((sa, ra)) = a.chunk() else {
            return Err(VerifyError::Unsupported("program stream shorter than declared"));
        };
        let Some((sb, rb)) = b.chunk() else {
            return Err(VerifyError::Unsupported("turn stream shorter than declared"));
        };
        if !sb.matches(sa) {
            return Ok(CompareEnd::Mismatch { pos: compared, expected: sa, found: sb });
        }
        let left = total - &compared;
        let step = ra.min(rb).min(left);
        a.advance(&step);
        b.advance(&step);
        compared += step;
    }
    Ok(CompareEnd::Equal)
}

/// One run family: cells `anchor + j*dir + k*shift`, `0 <= j < len`,
/// `0 <= k < count`.
#[derive(Clone, Debug)]
struct Family {
    anchor: [i128; 3],
    dir: [i128; 3],
    len: i128,
    shift: [i128; 3],
    count: i128,
}

impl Family {
    fn corner(&self, j: i128, k: i128) -> [i128; 3] {
        [
            self.anchor[0] + j * self.dir[0] + k * self.shift[0],
            self.anchor[1] + j * self.dir[1] + k * self.shift[1],
            self.anchor[2] + j * self.dir[2] + k * self.shift[2],
        ]
    }
}

fn dir_vec(d: Dir) -> [i128; 3] {
    let (dd, dy, dx) = d.delta();
    [dd as i128, dy as i128, dx as i128]
}

enum GeomOutcome {
    Ok(Vec<Family>),
    Reject(Violation),
}

/// Decompose the chain into run families, rejecting early when a run or
/// translate family provably exits the box.
fn families(c: &Chain, bx: &BoxSpec, trim_last: bool) -> Result<GeomOutcome, VerifyError> {
    let max_dim = bx.dims.d.max(bx.dims.h).max(bx.dims.w) as i128;
    let mut fams: Vec<Family> = Vec::new();
    let start = [c.start.d as i128, c.start.y as i128, c.start.x as i128];
    fams.push(Family { anchor: start, dir: [0, 0, 1], len: 1, shift: [0, 0, 0], count: 1 });
    let mut pos = start;
    let reject_oob = |cell: Option<Cell>| {
        GeomOutcome::Reject(Violation { kind: ViolationKind::OutOfBox, index: None, cell })
    };

    let mut moves: Vec<Move> = c.moves.clone();
    if trim_last {
        // Make the last cell an explicit run so the closing duplicate can be
        // excluded from self-avoidance.
        match moves.pop() {
            None => {}
            Some(Move::Run(r)) => {
                if r.len > BigUint::one() {
                    moves.push(Move::Run(Run { dir: r.dir, len: &r.len - 1u32 }));
                }
            }
            Some(Move::Periodic(b)) => {
                if b.count > BigUint::one() {
                    let mut head = b.clone();
                    head.count = &b.count - 1u32;
                    moves.push(Move::Periodic(head));
                }
                let last = b.pattern.len() - 1;
                for (i, r) in b.pattern.iter().enumerate() {
                    let len =
                        if i == last { &r.len - 1u32 } else { r.len.clone() };
                    if !len.is_zero() {
                        moves.push(Move::Run(Run { dir: r.dir, len }));
                    }
                }
            }
        }
    }

    for m in &moves {
        match m {
            Move::Run(r) => {
                let Some(len) = r.len.to_i128().filter(|&l| l <= max_dim) else {
                    return Ok(reject_oob(None));
                };
                let d = dir_vec(r.dir);
                let anchor = [pos[0] + d[0], pos[1] + d[1], pos[2] + d[2]];
                fams.push(Family { anchor, dir: d, len, shift: [0, 0, 0], count: 1 });
                pos = [pos[0] + d[0] * len, pos[1] + d[1] * len, pos[2] + d[2] * len];
            }
            Move::Periodic(b) => {
                let s = [b.shift.0 as i128, b.shift.1 as i128, b.shift.2 as i128];
                let count = match b.count.to_i128() {
                    Some(c) => c,
                    None => {
                        if s == [0, 0, 0] {
                            return Ok(GeomOutcome::Reject(Violation {
                                kind: ViolationKind::SelfCollision,
                                index: None,
                                cell: None,
                            }));
                        }
                        return Ok(reject_oob(None));
                    }
                };
                // The extremal translate must stay within reach of the box.
                let reach = (count - 1).checked_mul(
                    s.iter().map(|v| v.abs()).max().unwrap_or(0),
                );
                if reach.is_none() || reach.unwrap() > 3 * max_dim + 3 {
                    return Ok(reject_oob(None));
                }
                let mut p = pos;
                for r in &b.pattern {
                    let Some(len) = r.len.to_i128().filter(|&l| l <= max_dim) else {
                        return Ok(reject_oob(None));
                    };
                    let d = dir_vec(r.dir);
                    let anchor = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
                    fams.push(Family { anchor, dir: d, len, shift: s, count });
                    p = [p[0] + d[0] * len, p[1] + d[1] * len, p[2] + d[2] * len];
                }
                pos = [pos[0] + s[0] * count, pos[1] + s[1] * count, pos[2] + s[2] * count];
            }
        }
    }

    // Box membership via the four extremal corners of each family.
    for f in &fams {
        for (j, k) in [(0, 0), (f.len - 1, 0), (0, f.count - 1), (f.len - 1, f.count - 1)] {
            let c = f.corner(j, k);
            let cell = to_cell(c);
            let inside = cell.map(|cc| bx.contains(cc)).unwrap_or(false);
            if !inside {
                return Ok(reject_oob(cell));
            }
        }
    }
    Ok(GeomOutcome::Ok(fams))
}

fn to_cell(c: [i128; 3]) -> Option<Cell> {
    Some(Cell {
        d: i64::try_from(c[0]).ok()?,
        y: i64::try_from(c[1]).ok()?,
        x: i64::try_from(c[2]).ok()?,
    })
}

/// Self-collision inside one family.
fn family_self_collides(f: &Family) -> bool {
    if f.count <= 1 {
        return false;
    }
    if f.shift == [0, 0, 0] {
        return true;
    }
    // shift parallel to dir: consecutive copies overlap when |lambda| < len.
    let mut lambda: Option<i128> = None;
    let mut parallel = true;
    for i in 0..3 {
        match (f.dir[i], f.shift[i]) {
            (0, 0) => {}
            (0, _) => parallel = false,
            (d, s) => {
                if s % d != 0 {
                    parallel = false;
                } else {
                    let l = s / d;
                    if lambda.is_some_and(|x| x != l) {
                        parallel = false;
                    }
                    lambda = Some(l);
                }
            }
        }
    }
    parallel && lambda.is_some_and(|l| l.abs() < f.len)
}

/// Collision between two distinct families, as an exact lattice question.
fn families_collide(f1: &Family, f2: &Family) -> Result<Option<Cell>, DiophError> {
    // j1*dir1 + k1*shift1 - j2*dir2 - k2*shift2 = anchor2 - anchor1
    let mut a = alloc::vec![alloc::vec![0i128; 4]; 3];
    let mut b = alloc::vec![0i128; 3];
    for row in 0..3 {
        a[row][0] = f1.dir[row];
        a[row][1] = f1.shift[row];
        a[row][2] = -f2.dir[row];
        a[row][3] = -f2.shift[row];
        b[row] = f2.anchor[row] - f1.anchor[row];
    }
    let Some(sol) = solve_linear(&a, &b)? else {
        return Ok(None);
    };
    let lo = alloc::vec![0, 0, 0, 0];
    let hi = alloc::vec![f1.len - 1, f1.count - 1, f2.len - 1, f2.count - 1];
    let hit = lattice_point_in_box(&sol, &lo, &hi)?;
    Ok(hit.map(|u| {
        let c = f1.corner(u[0], u[1]);
        to_cell(c).unwrap_or_default()
    }))
}

/// Compressed counterpart of [`crate::verify::verify_chain`]: identical
/// verdict on the expansions, but runtime polynomial in runs and blocks.
pub fn verify_chain_rle(p: &Program, c: &Chain, bx: &BoxSpec) -> Result<VerifyReport, VerifyError> {
    if p.alphabet() != bx.lattice.alphabet() || c.lattice != bx.lattice {
        return Err(VerifyError::LatticeMismatch);
    }
    for m in &c.moves {
        let runs: &[Run] = match m {
            Move::Run(r) => core::slice::from_ref(r),
            Move::Periodic(b) => &b.pattern,
        };
        if runs.iter().any(|r| r.len.is_zero()) {
            return Err(VerifyError::MalformedChain(crate::chain::ChainError::EmptyRun));
        }
        if runs.iter().any(|r| !r.dir.lattice_ok(bx.lattice)) {
            return Err(VerifyError::MalformedChain(crate::chain::ChainError::BadDirection));
        }
        if let Move::Periodic(b) = m {
            if b.pattern.is_empty() {
                return Err(VerifyError::MalformedChain(crate::chain::ChainError::EmptyBlock));
            }
            let declared = (b.shift.0 as i128, b.shift.1 as i128, b.shift.2 as i128);
            let actual =
                pattern_shift(&b.pattern).map(|(d, y, x)| (d as i128, y as i128, x as i128));
            if actual != Some(declared) {
                return Err(VerifyError::ShiftMismatch);
            }
        }
    }

    let k = program_length(p);
    let chain_len = c.cell_count();
    let mut stats = VerifyStats {
        cells_visited: chain_len.to_u128().unwrap_or(u128::MAX),
        cells_in_box: bx.volume(),
    };
    let reject = |kind, index, cell, stats| {
        Ok(VerifyReport { verdict: Verdict::Reject, reason: Some(Violation { kind, index, cell }), stats })
    };
    if chain_len != k {
        return reject(ViolationKind::LengthMismatch, None, None, stats);
    }

    // Closed chains repeat the start as the final cell; exclude that single
    // duplicate from the geometry, then demand closure.
    let closed = bx.mode == Mode::ClosedPack;
    let end = c.end_cell().ok();
    let closes = closed && end == Some(c.start) && k >= BigUint::from(2u32);

    // Geometry: box membership and self-avoidance on run families.
    match families(c, bx, closes)? {
        GeomOutcome::Reject(v) => {
            return Ok(VerifyReport { verdict: Verdict::Reject, reason: Some(v), stats });
        }
        GeomOutcome::Ok(fams) => {
            for f in &fams {
                if family_self_collides(f) {
                    return reject(ViolationKind::SelfCollision, None, None, stats);
                }
            }
            for i in 0..fams.len() {
                for j in i + 1..fams.len() {
                    match families_collide(&fams[i], &fams[j]) {
                        Ok(None) => {}
                        Ok(Some(cell)) => {
                            return reject(
                                ViolationKind::SelfCollision,
                                None,
                                Some(cell),
                                stats,
                            );
                        }
                        Err(DiophError::Overflow) | Err(DiophError::TooWide) => {
                            return Err(VerifyError::Unsupported(
                                "run-family intersection too wide to decide",
                            ));
                        }
                    }
                }
            }
        }
    }

    // Instruction match on the interior positions.
    if k >= BigUint::from(3u32) {
        let prog = program_stream(p)?;
        let turns = turn_stream(c)?;
        debug_assert_eq!(turns.total_len() + 2u32, k);
        let total = &k - 2u32;
        match compare_streams(&prog, &turns, &total)? {
            CompareEnd::Equal => {}
            CompareEnd::Mismatch { pos, expected, found } => {
                let index = (pos + 2u32).to_u128();
                return reject(
                    ViolationKind::TurnMismatch { expected, found },
                    index,
                    None,
                    stats,
                );
            }
        }
    }

    // Mode conditions.
    if let Some((u, v)) = bx.terminals {
        if c.start != u || end != Some(v) {
            return reject(ViolationKind::TerminalMismatch, None, Some(c.start), stats);
        }
    }
    match bx.mode {
        Mode::Fill => {
            let visited = if closed { &chain_len - 1u32 } else { chain_len.clone() };
            if visited.to_u128() != Some(bx.volume()) {
                return reject(ViolationKind::NotFilled, None, None, stats);
            }
        }
        Mode::Pack => {}
        Mode::ClosedPack => {
            if !closes {
                return reject(ViolationKind::NotClosed, None, None, stats);
            }
        }
    }
    stats.cells_visited = chain_len.to_u128().unwrap_or(u128::MAX);
    Ok(VerifyReport { verdict: Verdict::Accept, reason: None, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;
    use crate::program::{parse_program, Alphabet};
    use crate::verify::verify_chain;

    fn sq(text: &str) -> Program {
        parse_program(text, Alphabet::Square).unwrap()
    }

    fn chain2(start: Cell) -> Chain {
        Chain::new(LatticeKind::Square, start)
    }

    #[test]
    fn straight_line_accepts_compressed() {
        let p = sq("(S)^1048576");
        let mut c = chain2(Cell::yx(0, 0));
        c.push_run(Dir::E, (1u64 << 20) - 1);
        let bx = BoxSpec::square(1, 1 << 20, Mode::Fill);
        let rep = verify_chain_rle(&p, &c, &bx).unwrap();
        assert!(rep.accepted(), "{rep:?}");
    }

    #[test]
    fn boustrophedon_periodic_fill() {
        // (S)^{w-1} (TT(S)^{w-2})^{h-1} S folded into h x w, as a periodic
        // block of two-row zigzags.
        let (h, w) = (6u64, 8u64);
        let text = alloc::format!("(S)^{}(TT(S)^{})^{}S", w - 1, w - 2, h - 1);
        let p = sq(&text);
        let mut c = chain2(Cell::yx(0, 0));
        c.push_run(Dir::E, w - 1);
        c.push_periodic(
            alloc::vec![
                Run::new(Dir::S, 1u32),
                Run::new(Dir::W, w - 1),
                Run::new(Dir::S, 1u32),
                Run::new(Dir::E, w - 1),
            ],
            (h - 2) / 2,
        )
        .unwrap();
        c.push_run(Dir::S, 1u32);
        c.push_run(Dir::W, w - 1);
        let bx = BoxSpec::square(h, w, Mode::Fill);
        let rep = verify_chain_rle(&p, &c, &bx).unwrap();
        assert!(rep.accepted(), "{rep:?}");
        // And the explicit verifier agrees.
        assert!(verify_chain(&p, &c, &bx).unwrap().accepted());
    }

    #[test]
    fn giant_boustrophedon_runs_fast() {
        // Width 2^20 + 2, height 4: far beyond expansion, verified compressed.
        let w: u64 = (1 << 20) + 2;
        let h: u64 = 4;
        let text = alloc::format!("(S)^{}(TT(S)^{})^{}S", w - 1, w - 2, h - 1);
        let p = sq(&text);
        let mut c = chain2(Cell::yx(0, 0));
        c.push_run(Dir::E, w - 1);
        c.push_periodic(
            alloc::vec![
                Run::new(Dir::S, 1u32),
                Run::new(Dir::W, w - 1),
                Run::new(Dir::S, 1u32),
                Run::new(Dir::E, w - 1),
            ],
            (h - 2) / 2,
        )
        .unwrap();
        c.push_run(Dir::S, 1u32);
        c.push_run(Dir::W, w - 1);
        let bx = BoxSpec::square(h, w, Mode::Fill);
        assert!(verify_chain_rle(&p, &c, &bx).unwrap().accepted());
    }

    #[test]
    fn second_copy_collision_rejects() {
        // Copies overlap: the W run backtracks over the E run.
        let p = sq("(S)^36");
        let mut c = chain2(Cell::yx(0, 0));
        c.push_periodic(
            alloc::vec![
                Run::new(Dir::E, 4u32),
                Run::new(Dir::W, 3u32),
            ],
            5u32,
        )
        .unwrap();
        let bx = BoxSpec::square(1, 40, Mode::Pack);
        let rep = verify_chain_rle(&p, &c, &bx).unwrap();
        assert_eq!(rep.verdict, Verdict::Reject);
        assert!(matches!(rep.reason.unwrap().kind, ViolationKind::SelfCollision));
    }

    #[test]
    fn turn_mismatch_detected_inside_loop() {
        let p = sq("(S)^16");
        let mut c = chain2(Cell::yx(8, 0));
        c.push_periodic(
            alloc::vec![Run::new(Dir::N, 1u32), Run::new(Dir::E, 1u32)],
            7u32,
        )
        .unwrap();
        c.push_run(Dir::E, 1u32);
        let bx = BoxSpec::square(20, 20, Mode::Pack);
        let rep = verify_chain_rle(&p, &c, &bx).unwrap();
        assert_eq!(rep.verdict, Verdict::Reject);
        assert!(matches!(rep.reason.unwrap().kind, ViolationKind::TurnMismatch { .. }));
    }

    #[test]
    fn staircase_all_turns_accepts() {
        let p = sq("(T)^16");
        let mut c = chain2(Cell::yx(8, 0));
        c.push_periodic(
            alloc::vec![Run::new(Dir::N, 1u32), Run::new(Dir::E, 1u32)],
            7u32,
        )
        .unwrap();
        c.push_run(Dir::N, 1u32);
        let bx = BoxSpec::square(9, 8, Mode::Pack);
        let rep = verify_chain_rle(&p, &c, &bx).unwrap();
        assert!(rep.accepted(), "{rep:?}");
    }

    #[test]
    fn explicit_chain_matches_plain_verifier() {
        // Small differential sweep over explicit chains.
        let programs = ["TTTT", "TST", "STTSSSTSSSTTSSTTSSTSTTTTT", "(S)^7", "T(SST)^2"];
        for text in programs {
            let p = sq(text);
            let bx = BoxSpec::square(5, 5, Mode::Pack);
            if let crate::solver::SolveOutcome::Sat(chain) =
                crate::solver::solve(&p, &bx, &crate::solver::SearchConfig::default()).unwrap()
            {
                let a = verify_chain(&p, &chain, &bx).unwrap().verdict;
                let b = verify_chain_rle(&p, &chain, &bx).unwrap().verdict;
                assert_eq!(a, b, "{text}");
            }
        }
    }

    #[test]
    fn wildcard_streams_accept_mixed_turns() {
        let p = sq("(*)^9");
        let mut c = chain2(Cell::yx(2, 0));
        c.push_run(Dir::E, 2u32);
        c.push_step(Dir::N);
        c.push_step(Dir::E);
        c.push_step(Dir::S);
        c.push_run(Dir::E, 2u32);
        c.push_step(Dir::N);
        let bx = BoxSpec::square(4, 8, Mode::Pack);
        assert!(verify_chain_rle(&p, &c, &bx).unwrap().accepted());
    }

    #[test]
    fn closed_chain_rle() {
        let p = sq("TTTTT");
        let mut c = chain2(Cell::yx(0, 0));
        c.push_step(Dir::E);
        c.push_step(Dir::S);
        c.push_step(Dir::W);
        c.push_step(Dir::N);
        let bx = BoxSpec::new(
            LatticeKind::Square,
            crate::lattice::Dims { d: 1, h: 2, w: 2 },
            Mode::ClosedPack,
            None,
        )
        .unwrap();
        assert!(verify_chain_rle(&p, &c, &bx).unwrap().accepted());
        // The plain verifier agrees.
        assert!(verify_chain(&p, &c, &bx).unwrap().accepted());
    }

    #[test]
    fn shift_mismatch_is_error() {
        use crate::chain::PeriodicBlock;
        let p = sq("(S)^9");
        let mut c = chain2(Cell::yx(0, 0));
        c.moves.push(Move::Periodic(PeriodicBlock {
            pattern: alloc::vec![Run::new(Dir::E, 2u32)],
            count: BigUint::from(4u32),
            shift: (0, 0, 1), // actual displacement is (0,0,2)
        }));
        let bx = BoxSpec::square(1, 20, Mode::Pack);
        assert!(matches!(verify_chain_rle(&p, &c, &bx), Err(VerifyError::ShiftMismatch)));
    }
}
