//! Small exact integer linear algebra: solve `A·u = b` over ℤ for up to four
//! unknowns and decide whether the solution lattice meets a coordinate box.
//! This is the engine behind run-length self-avoidance checks, where each
//! unknown is a run offset or a periodic copy index.

use alloc::vec::Vec;

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum DiophError {
    #[error("arithmetic overflow in exact solver")]
    Overflow,
    #[error("solution lattice too wide to decide by enumeration")]
    TooWide,
}

/// Affine solution set `base + span(kernel)` of an integer linear system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinSolution {
    pub base: Vec<i128>,
    pub kernel: Vec<Vec<i128>>,
}

fn cadd(a: i128, b: i128) -> Result<i128, DiophError> {
    a.checked_add(b).ok_or(DiophError::Overflow)
}

fn cmul(a: i128, b: i128) -> Result<i128, DiophError> {
    a.checked_mul(b).ok_or(DiophError::Overflow)
}

/// Solve `A·u = b` over the integers via unimodular column reduction.
/// Returns None when no integer solution exists.
pub fn solve_linear(a: &[Vec<i128>], b: &[i128]) -> Result<Option<LinSolution>, DiophError> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut e: Vec<Vec<i128>> = a.to_vec();
    // u tracks the column operations: e = a * u at all times.
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();

    let mut pivot_col = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for row in 0..rows {
        if pivot_col >= cols {
            break;
        }
        // Eliminate row entries right of pivot_col by gcd column ops.
        loop {
            let mut best: Option<usize> = None;
            for j in pivot_col..cols {
                if e[row][j] != 0 && best.is_none_or(|bj: usize| e[row][j].abs() < e[row][bj].abs())
                {
                    best = Some(j);
                }
            }
            let Some(bj) = best else { break };
            if bj != pivot_col {
                e.iter_mut().for_each(|r| r.swap(pivot_col, bj));
                u.iter_mut().for_each(|r| r.swap(pivot_col, bj));
            }
            let p = e[row][pivot_col];
            let mut done = true;
            for j in pivot_col + 1..cols {
                if e[row][j] != 0 {
                    let q = e[row][j].div_euclid(p);
                    if q != 0 {
                        for r in 0..rows {
                            e[r][j] = cadd(e[r][j], -cmul(q, e[r][pivot_col])?)?;
                        }
                        for r in 0..cols {
                            u[r][j] = cadd(u[r][j], -cmul(q, u[r][pivot_col])?)?;
                        }
                    }
                    if e[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if e[row][pivot_col] != 0 {
            pivots.push((row, pivot_col));
            pivot_col += 1;
        }
    }

    // Forward-substitute to solve E·w = b on the pivot columns.
    let mut w = alloc::vec![0i128; cols];
    let mut pivot_iter = pivots.iter().peekable();
    for row in 0..rows {
        let mut acc = 0i128;
        for j in 0..cols {
            acc = cadd(acc, cmul(e[row][j], w[j])?)?;
        }
        match pivot_iter.peek() {
            Some(&&(prow, pcol)) if prow == row => {
                let need = cadd(b[row], -acc)?;
                let p = e[row][pcol];
                if need.rem_euclid(p.abs()) != 0 {
                    return Ok(None);
                }
                w[pcol] = need / p;
                pivot_iter.next();
            }
            _ => {
                if acc != b[row] {
                    return Ok(None);
                }
            }
        }
    }

    // base = U·w; kernel = non-pivot columns of U.
    let mut base = alloc::vec![0i128; cols];
    for i in 0..cols {
        for j in 0..cols {
            base[i] = cadd(base[i], cmul(u[i][j], w[j])?)?;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let kernel: Vec<Vec<i128>> = (0..cols)
        .filter(|j| !pivot_cols.contains(j))
        .map(|j| (0..cols).map(|i| u[i][j]).collect())
        .collect();
    Ok(Some(LinSolution { base, kernel }))
}

/// Largest number of candidate values enumerated when slicing a lattice.
const ENUM_LIMIT: i128 = 4096;

/// Decide whether `base + span(kernel)` meets the box `lo[i] <= u_i <= hi[i]`,
/// returning a witness point when it does.
pub fn lattice_point_in_box(
    sol: &LinSolution,
    lo: &[i128],
    hi: &[i128],
) -> Result<Option<Vec<i128>>, DiophError> {
    let n = sol.base.len();
    debug_assert_eq!(lo.len(), n);
    debug_assert_eq!(hi.len(), n);
    match sol.kernel.len() {
        0 => {
            let ok = (0..n).all(|i| lo[i] <= sol.base[i] && sol.base[i] <= hi[i]);
            Ok(ok.then(|| sol.base.clone()))
        }
        1 => rank1(&sol.base, &sol.kernel[0], lo, hi),
        2 => rank2(&sol.base, &sol.kernel[0], &sol.kernel[1], lo, hi),
        _ => {
            // Eliminate the narrowest coordinate by enumeration and recurse.
            let mut best: Option<(usize, i128)> = None;
            for i in 0..n {
                if sol.kernel.iter().all(|v| v[i] == 0) {
                    continue;
                }
                let width = cadd(hi[i], -lo[i])?;
                if best.is_none_or(|(_, w)| width < w) {
                    best = Some((i, width));
                }
            }
            let Some((coord, width)) = best else {
                // Kernel does not move any coordinate: treat as rank 0.
                let ok = (0..n).all(|i| lo[i] <= sol.base[i] && sol.base[i] <= hi[i]);
                return Ok(ok.then(|| sol.base.clone()));
            };
            if width > ENUM_LIMIT {
                return Err(DiophError::TooWide);
            }
            for value in lo[coord]..=hi[coord] {
                // Add the equation u_coord = value to the system.
                let mut row = alloc::vec![alloc::vec![0i128; sol.kernel.len()]];
                for (j, v) in sol.kernel.iter().enumerate() {
                    row[0][j] = v[coord];
                }
                let rhs = alloc::vec![cadd(value, -sol.base[coord])?];
                if let Some(sub) = solve_linear(&row, &rhs)? {
                    // Re-express as a sublattice of the original coordinates.
                    let mut new_base = sol.base.clone();
                    for i in 0..n {
                        for (j, v) in sol.kernel.iter().enumerate() {
                            new_base[i] = cadd(new_base[i], cmul(v[i], sub.base[j])?)?;
                        }
                    }
                    let new_kernel: Vec<Vec<i128>> = sub
                        .kernel
                        .iter()
                        .map(|kv| {
                            let mut vec_out = alloc::vec![0i128; n];
                            for i in 0..n {
                                for (j, v) in sol.kernel.iter().enumerate() {
                                    vec_out[i] += v[i] * kv[j];
                                }
                            }
                            vec_out
                        })
                        .collect();
                    let sub_sol = LinSolution { base: new_base, kernel: new_kernel };
                    if let Some(hit) = lattice_point_in_box(&sub_sol, lo, hi)? {
                        return Ok(Some(hit));
                    }
                }
            }
            Ok(None)
        }
    }
}

fn rank1(
    base: &[i128],
    v: &[i128],
    lo: &[i128],
    hi: &[i128],
) -> Result<Option<Vec<i128>>, DiophError> {
    // lo_i <= base_i + t v_i <= hi_i for all i.
    let mut tmin = i128::MIN / 4;
    let mut tmax = i128::MAX / 4;
    for i in 0..base.len() {
        if v[i] == 0 {
            if base[i] < lo[i] || base[i] > hi[i] {
                return Ok(None);
            }
            continue;
        }
        let a = cadd(lo[i], -base[i])?;
        let b = cadd(hi[i], -base[i])?;
        let (l, h) = if v[i] > 0 {
            (div_ceil(a, v[i]), div_floor(b, v[i]))
        } else {
            (div_ceil(b, v[i]), div_floor(a, v[i]))
        };
        tmin = tmin.max(l);
        tmax = tmax.min(h);
    }
    if tmin > tmax {
        return Ok(None);
    }
    let t = tmin;
    let point = (0..base.len()).map(|i| base[i] + t * v[i]).collect();
    Ok(Some(point))
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Exact rational `n/d` with `d > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Rat {
    n: i128,
    d: i128,
}

impl Rat {
    fn new(n: i128, d: i128) -> Rat {
        debug_assert!(d != 0);
        if d < 0 {
            Rat { n: -n, d: -d }
        } else {
            Rat { n, d }
        }
    }

    fn le(self, other: Rat) -> Result<bool, DiophError> {
        Ok(cmul(self.n, other.d)? <= cmul(other.n, self.d)?)
    }

    fn floor(self) -> i128 {
        self.n.div_euclid(self.d)
    }

    fn ceil(self) -> i128 {
        -((-self.n).div_euclid(self.d))
    }
}

fn rank2(
    base: &[i128],
    v0: &[i128],
    w0: &[i128],
    lo: &[i128],
    hi: &[i128],
) -> Result<Option<Vec<i128>>, DiophError> {
    let n = base.len();
    // Lagrange-reduce the basis so thin directions align with one parameter.
    let (v, w) = gauss_reduce(v0.to_vec(), w0.to_vec())?;

    // Fixed coordinates must already sit in range.
    for i in 0..n {
        if v[i] == 0 && w[i] == 0 && (base[i] < lo[i] || base[i] > hi[i]) {
            return Ok(None);
        }
    }

    // Vertices of the (bounded) polygon in (t, s) space.
    let mut lines: Vec<(i128, i128, i128)> = Vec::new(); // a t + b s = c
    for i in 0..n {
        if v[i] == 0 && w[i] == 0 {
            continue;
        }
        lines.push((v[i], w[i], cadd(lo[i], -base[i])?));
        lines.push((v[i], w[i], cadd(hi[i], -base[i])?));
    }
    let feasible = |t: Rat, s: Rat| -> Result<bool, DiophError> {
        for i in 0..n {
            if v[i] == 0 && w[i] == 0 {
                continue;
            }
            // lo_i - base_i <= v_i t + w_i s <= hi_i - base_i, over denominator d.
            let d = cmul(t.d, s.d)?;
            let val = cadd(cmul(cmul(v[i], t.n)?, s.d)?, cmul(cmul(w[i], s.n)?, t.d)?)?;
            let lo_s = cmul(cadd(lo[i], -base[i])?, d)?;
            let hi_s = cmul(cadd(hi[i], -base[i])?, d)?;
            if val < lo_s || val > hi_s {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut tmin: Option<Rat> = None;
    let mut tmax: Option<Rat> = None;
    let mut smin: Option<Rat> = None;
    let mut smax: Option<Rat> = None;
    let mut any_vertex = false;
    for (i, &(a1, b1, c1)) in lines.iter().enumerate() {
        for &(a2, b2, c2) in &lines[i + 1..] {
            let det = cadd(cmul(a1, b2)?, -cmul(b1, a2)?)?;
            if det == 0 {
                continue;
            }
            let t = Rat::new(cadd(cmul(c1, b2)?, -cmul(b1, c2)?)?, det);
            let s = Rat::new(cadd(cmul(a1, c2)?, -cmul(c1, a2)?)?, det);
            if feasible(t, s)? {
                any_vertex = true;
                if tmin.is_none() || !tmin.unwrap().le(t)? {
                    tmin = Some(t);
                }
                if tmax.is_none() || !t.le(tmax.unwrap())? {
                    tmax = Some(t);
                }
                if smin.is_none() || !smin.unwrap().le(s)? {
                    smin = Some(s);
                }
                if smax.is_none() || !s.le(smax.unwrap())? {
                    smax = Some(s);
                }
            }
        }
    }
    if !any_vertex {
        return Ok(None);
    }
    let (tmin, tmax) = (tmin.unwrap(), tmax.unwrap());
    let (smin, smax) = (smin.unwrap(), smax.unwrap());

    let make_point = |t: i128, s: i128| -> Vec<i128> {
        (0..n).map(|i| base[i] + t * v[i] + s * w[i]).collect()
    };

    // Enumerate the narrower projection.
    let t_lo = tmin.ceil();
    let t_hi = tmax.floor();
    let s_lo = smin.ceil();
    let s_hi = smax.floor();
    let t_span = cadd(t_hi, -t_lo).unwrap_or(i128::MAX);
    let s_span = cadd(s_hi, -s_lo).unwrap_or(i128::MAX);
    if t_span <= s_span && t_span <= ENUM_LIMIT {
        for t in t_lo..=t_hi {
            if let Some(s) = slice_s(&v, &w, base, lo, hi, t)? {
                return Ok(Some(make_point(t, s)));
            }
        }
        return Ok(None);
    }
    if s_span <= ENUM_LIMIT {
        for s in s_lo..=s_hi {
            if let Some(t) = slice_t(&v, &w, base, lo, hi, s)? {
                return Ok(Some(make_point(t, s)));
            }
        }
        return Ok(None);
    }
    if t_span <= ENUM_LIMIT {
        for t in t_lo..=t_hi {
            if let Some(s) = slice_s(&v, &w, base, lo, hi, t)? {
                return Ok(Some(make_point(t, s)));
            }
        }
        return Ok(None);
    }
    // Thin-strip fallback: enumerate lattice lines inside the narrowest strip.
    let mut best: Option<(usize, i128)> = None;
    for i in 0..n {
        if v[i] == 0 && w[i] == 0 {
            continue;
        }
        let g = gcd(v[i].unsigned_abs(), w[i].unsigned_abs()) as i128;
        let lines_count = cadd(hi[i], -lo[i])? / g;
        if best.is_none_or(|(_, c)| lines_count < c) {
            best = Some((i, lines_count));
        }
    }
    if let Some((i, count)) = best {
        if count <= ENUM_LIMIT {
            let g = gcd(v[i].unsigned_abs(), w[i].unsigned_abs()) as i128;
            let (a, b) = (v[i], w[i]);
            // Integer solutions of a t + b s = c exist iff g | c.
            let lo_c = cadd(lo[i], -base[i])?;
            let hi_c = cadd(hi[i], -base[i])?;
            let first = div_ceil(lo_c, g) * g;
            let mut c = first;
            while c <= hi_c {
                let (x0, y0) = extended_solution(a, b, c);
                // Line points: (x0 + k*(b/g), y0 - k*(a/g)).
                let dir = alloc::vec![b / g, -(a / g)];
                let base2 = alloc::vec![x0, y0];
                // Constrain by all coordinates.
                let mut klo = i128::MIN / 4;
                let mut khi = i128::MAX / 4;
                let mut ok = true;
                for j in 0..n {
                    let cv = cadd(cmul(v[j], base2[0])?, cmul(w[j], base2[1])?)?;
                    let cd = cadd(cmul(v[j], dir[0])?, cmul(w[j], dir[1])?)?;
                    let a_j = cadd(cadd(lo[j], -base[j])?, -cv)?;
                    let b_j = cadd(cadd(hi[j], -base[j])?, -cv)?;
                    if cd == 0 {
                        if a_j > 0 || b_j < 0 {
                            ok = false;
                            break;
                        }
                        continue;
                    }
                    let (l, h) = if cd > 0 {
                        (div_ceil(a_j, cd), div_floor(b_j, cd))
                    } else {
                        (div_ceil(b_j, cd), div_floor(a_j, cd))
                    };
                    klo = klo.max(l);
                    khi = khi.min(h);
                }
                if ok && klo <= khi {
                    let t = base2[0] + klo * dir[0];
                    let s = base2[1] + klo * dir[1];
                    return Ok(Some(make_point(t, s)));
                }
                c = cadd(c, g)?;
            }
            return Ok(None);
        }
    }
    Err(DiophError::TooWide)
}

/// 1D feasibility for s with t fixed.
fn slice_s(
    v: &[i128],
    w: &[i128],
    base: &[i128],
    lo: &[i128],
    hi: &[i128],
    t: i128,
) -> Result<Option<i128>, DiophError> {
    let mut smin = i128::MIN / 4;
    let mut smax = i128::MAX / 4;
    for i in 0..base.len() {
        let fixed = cadd(base[i], cmul(v[i], t)?)?;
        if w[i] == 0 {
            if fixed < lo[i] || fixed > hi[i] {
                return Ok(None);
            }
            continue;
        }
        let a = cadd(lo[i], -fixed)?;
        let b = cadd(hi[i], -fixed)?;
        let (l, h) = if w[i] > 0 {
            (div_ceil(a, w[i]), div_floor(b, w[i]))
        } else {
            (div_ceil(b, w[i]), div_floor(a, w[i]))
        };
        smin = smin.max(l);
        smax = smax.min(h);
    }
    Ok((smin <= smax).then_some(smin))
}

fn slice_t(
    v: &[i128],
    w: &[i128],
    base: &[i128],
    lo: &[i128],
    hi: &[i128],
    s: i128,
) -> Result<Option<i128>, DiophError> {
    slice_s(w, v, base, lo, hi, s)
}

fn gauss_reduce(mut v: Vec<i128>, mut w: Vec<i128>) -> Result<(Vec<i128>, Vec<i128>), DiophError> {
    fn norm(x: &[i128]) -> Result<i128, DiophError> {
        let mut acc = 0i128;
        for &e in x {
            acc = cadd(acc, cmul(e, e)?)?;
        }
        Ok(acc)
    }
    for _ in 0..128 {
        if norm(&v)? > norm(&w)? {
            core::mem::swap(&mut v, &mut w);
        }
        let nv = norm(&v)?;
        if nv == 0 {
            break;
        }
        let mut dot = 0i128;
        for i in 0..v.len() {
            dot = cadd(dot, cmul(v[i], w[i])?)?;
        }
        // Round to nearest.
        let q = if dot >= 0 { (2 * dot + nv) / (2 * nv) } else { -((-2 * dot + nv) / (2 * nv)) };
        if q == 0 {
            break;
        }
        for i in 0..w.len() {
            w[i] = cadd(w[i], -cmul(q, v[i])?)?;
        }
    }
    Ok((v, w))
}

fn gcd(a: u128, b: u128) -> u128 {
    num_integer::gcd(a, b)
}

/// A particular solution of `a x + b y = c` (gcd(a,b) must divide c).
fn extended_solution(a: i128, b: i128, c: i128) -> (i128, i128) {
    let (g, x, y) = extended_gcd(a, b);
    debug_assert_eq!(c % g, 0);
    let k = c / g;
    (x * k, y * k)
}

fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_feasible(a: &[Vec<i128>], b: &[i128], lo: &[i128], hi: &[i128]) -> bool {
        // Exhaustive over the box.
        let n = lo.len();
        let mut u = lo.to_vec();
        loop {
            let ok = a.iter().zip(b).all(|(row, &rhs)| {
                row.iter().zip(&u).map(|(&c, &x)| c * x).sum::<i128>() == rhs
            });
            if ok {
                return true;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                u[i] += 1;
                if u[i] <= hi[i] {
                    break;
                }
                u[i] = lo[i];
                i += 1;
            }
        }
    }

    #[test]
    fn matches_brute_force_on_small_systems() {
        // Deterministic pseudo-random sweep.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..400 {
            let rows = (next() % 3 + 1) as usize;
            let cols = (next() % 3 + 2) as usize;
            let a: Vec<Vec<i128>> = (0..rows)
                .map(|_| (0..cols).map(|_| (next() % 7) as i128 - 3).collect())
                .collect();
            let b: Vec<i128> = (0..rows).map(|_| (next() % 9) as i128 - 4).collect();
            let lo: Vec<i128> = (0..cols).map(|_| (next() % 4) as i128 - 2).collect();
            let hi: Vec<i128> = lo.iter().map(|&l| l + (next() % 5) as i128).collect();
            let expected = brute_feasible(&a, &b, &lo, &hi);
            let got = match solve_linear(&a, &b).unwrap() {
                None => false,
                Some(sol) => lattice_point_in_box(&sol, &lo, &hi).unwrap().is_some(),
            };
            assert_eq!(got, expected, "a={a:?} b={b:?} lo={lo:?} hi={hi:?}");
        }
    }

    #[test]
    fn witness_point_solves_system() {
        let a = alloc::vec![alloc::vec![2, -3, 1, 0], alloc::vec![1, 1, 0, -2]];
        let b = alloc::vec![5, 1];
        let sol = solve_linear(&a, &b).unwrap().unwrap();
        let lo = alloc::vec![-10, -10, -10, -10];
        let hi = alloc::vec![10, 10, 10, 10];
        let point = lattice_point_in_box(&sol, &lo, &hi).unwrap().unwrap();
        for (row, rhs) in a.iter().zip(&b) {
            let acc: i128 = row.iter().zip(&point).map(|(&c, &x)| c * x).sum();
            assert_eq!(acc, *rhs);
        }
    }

    #[test]
    fn huge_ranges_same_family_overlap() {
        // Two periodic families with short pattern runs but huge copy counts:
        // j1 + 2 k1 = j2 + 2 k2 + 1, j's narrow, k's huge.
        let a = alloc::vec![alloc::vec![1, 2, -1, -2]];
        let b = alloc::vec![1];
        let sol = solve_linear(&a, &b).unwrap().unwrap();
        let lo = alloc::vec![0, 0, 0, 0];
        let hi = alloc::vec![20, 1 << 40, 20, 1 << 40];
        assert!(lattice_point_in_box(&sol, &lo, &hi).unwrap().is_some());
        // Parity obstruction: j's pinned to 0 leaves 2k1 - 2k2 = 1.
        let hi2 = alloc::vec![0, 1 << 40, 0, 1 << 40];
        assert!(lattice_point_in_box(&sol, &lo, &hi2).unwrap().is_none());
    }

    #[test]
    fn huge_ranges_parity_infeasible() {
        // 2 k1 - 2 k2 = 1 has no integer solution at all.
        let a = alloc::vec![alloc::vec![2, -2]];
        let b = alloc::vec![1];
        assert!(solve_linear(&a, &b).unwrap().is_none());
    }

    #[test]
    fn disjoint_strips_infeasible() {
        // u0 = u1, u0 in [0, 10], u1 in [20, 30].
        let a = alloc::vec![alloc::vec![1, -1]];
        let b = alloc::vec![0];
        let sol = solve_linear(&a, &b).unwrap().unwrap();
        assert!(lattice_point_in_box(&sol, &[0, 20], &[10, 30]).unwrap().is_none());
    }
}
