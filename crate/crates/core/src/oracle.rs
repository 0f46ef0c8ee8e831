//! Brute-force / pseudo-polynomial oracles for the source problems, plus the
//! normalizer that squeezes Numerical 3DM values into the reduction's open
//! intervals.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Numerical 3D Matching instance: find permutations σ, π with
/// `a_i + b_{σ(i)} + c_{π(i)} = t` for all i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThreeDMInstance {
    pub t: u64,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum OracleError {
    #[error("instance lists must share one length and hold positive values")]
    Malformed,
    #[error("instance size {n} exceeds the oracle bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("subset-sum total exceeds the DP budget")]
    Budget,
}

impl ThreeDMInstance {
    pub fn new(t: u64, a: Vec<u64>, b: Vec<u64>, c: Vec<u64>) -> Result<ThreeDMInstance, OracleError> {
        let n = a.len();
        if n == 0 || b.len() != n || c.len() != n {
            return Err(OracleError::Malformed);
        }
        if a.iter().chain(&b).chain(&c).any(|&v| v == 0) {
            return Err(OracleError::Malformed);
        }
        Ok(ThreeDMInstance { t, a, b, c })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// The three open-interval conditions `a ∈ (0.5t, 0.6t)`,
    /// `b ∈ (0.25t, 0.3t)`, `c ∈ (0.125t, 0.15t)`, checked exactly.
    pub fn is_normalized(&self) -> bool {
        let t = self.t as u128;
        self.a.iter().all(|&a| 2 * (a as u128) > t && 5 * (a as u128) < 3 * t)
            && self.b.iter().all(|&b| 4 * (b as u128) > t && 10 * (b as u128) < 3 * t)
            && self.c.iter().all(|&c| 8 * (c as u128) > t && 20 * (c as u128) < 3 * t)
    }
}

/// A matching: `sigma[i]` and `pi[i]` are 0-based indices into b and c.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matching {
    pub sigma: Vec<usize>,
    pub pi: Vec<usize>,
}

impl Matching {
    pub fn satisfies(&self, inst: &ThreeDMInstance) -> bool {
        let n = inst.n();
        if self.sigma.len() != n || self.pi.len() != n {
            return false;
        }
        let mut seen_b = alloc::vec![false; n];
        let mut seen_c = alloc::vec![false; n];
        for i in 0..n {
            let (j, k) = (self.sigma[i], self.pi[i]);
            if j >= n || k >= n || seen_b[j] || seen_c[k] {
                return false;
            }
            seen_b[j] = true;
            seen_c[k] = true;
            if inst.a[i] + inst.b[j] + inst.c[k] != inst.t {
                return false;
            }
        }
        true
    }
}

pub const DEFAULT_3DM_BOUND: usize = 8;

/// Exhaustive σ enumeration with a bipartite perfect matching for π.
pub fn solve_3dm(inst: &ThreeDMInstance) -> Result<Option<Matching>, OracleError> {
    solve_3dm_bounded(inst, DEFAULT_3DM_BOUND)
}

pub fn solve_3dm_bounded(
    inst: &ThreeDMInstance,
    bound: usize,
) -> Result<Option<Matching>, OracleError> {
    let n = inst.n();
    if n > bound {
        return Err(OracleError::TooLarge { n, bound });
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut used = alloc::vec![false; n];
    let mut out = None;
    permute(&mut sigma, 0, &mut used, &mut |sigma| {
        // For this σ, find π by bipartite matching: i may take c_k iff the
        // sum works out.
        let mut pi_of_i = alloc::vec![usize::MAX; n];
        let mut owner_of_k = alloc::vec![usize::MAX; n];
        let mut matched = 0;
        for i in 0..n {
            let mut seen = alloc::vec![false; n];
            if augment(inst, sigma, i, &mut seen, &mut pi_of_i, &mut owner_of_k) {
                matched += 1;
            }
        }
        if matched == n {
            out = Some(Matching { sigma: sigma.to_vec(), pi: pi_of_i });
            true
        } else {
            false
        }
    });
    debug_assert!(out.as_ref().map_or(true, |m| m.satisfies(inst)));
    Ok(out)
}

fn permute(
    sigma: &mut Vec<usize>,
    i: usize,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let n = sigma.len();
    if i == n {
        return visit(sigma);
    }
    for v in 0..n {
        if used[v] {
            continue;
        }
        used[v] = true;
        sigma[i] = v;
        if permute(sigma, i + 1, used, visit) {
            return true;
        }
        used[v] = false;
    }
    false
}

fn augment(
    inst: &ThreeDMInstance,
    sigma: &[usize],
    i: usize,
    seen: &mut [bool],
    pi_of_i: &mut [usize],
    owner_of_k: &mut [usize],
) -> bool {
    let n = inst.n();
    let ab = inst.a[i] + inst.b[sigma[i]];
    for k in 0..n {
        if seen[k] || ab + inst.c[k] != inst.t {
            continue;
        }
        seen[k] = true;
        if owner_of_k[k] == usize::MAX
            || augment(inst, sigma, owner_of_k[k], seen, pi_of_i, owner_of_k)
        {
            owner_of_k[k] = i;
            pi_of_i[i] = k;
            return true;
        }
    }
    false
}

/// The normalization shift X and the transformed instance
/// `(a+4X, b+2X, c+X, t+7X)`. X is one more than the largest of the six
/// linear bounds, floored at 1, so matchings are preserved both ways and the
/// output satisfies the interval conditions.
pub fn normalize_3dm(inst: &ThreeDMInstance) -> (ThreeDMInstance, u64) {
    let t = inst.t as i128;
    let mut need: i128 = 0;
    for i in 0..inst.n() {
        let a = inst.a[i] as i128;
        let b = inst.b[i] as i128;
        let c = inst.c[i] as i128;
        for bound in [t - 2 * a, 5 * a - 3 * t, t - 4 * b, 10 * b - 3 * t, t - 8 * c, 20 * c - 3 * t]
        {
            need = need.max(bound);
        }
    }
    let x = if need < 0 { 1 } else { (need + 1) as u64 };
    let out = ThreeDMInstance {
        t: inst.t + 7 * x,
        a: inst.a.iter().map(|&v| v + 4 * x).collect(),
        b: inst.b.iter().map(|&v| v + 2 * x).collect(),
        c: inst.c.iter().map(|&v| v + x).collect(),
    };
    (out, x)
}

/// 2-Partition instance: a multiset of positive integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionInstance {
    pub values: Vec<BigUint>,
}

impl PartitionInstance {
    pub fn new(values: Vec<BigUint>) -> Result<PartitionInstance, OracleError> {
        if values.iter().any(|v| v.is_zero()) {
            return Err(OracleError::Malformed);
        }
        Ok(PartitionInstance { values })
    }

    pub fn from_u64(values: &[u64]) -> PartitionInstance {
        PartitionInstance { values: values.iter().map(|&v| BigUint::from(v)).collect() }
    }

    pub fn total(&self) -> BigUint {
        self.values.iter().sum()
    }
}

/// Index split into the two halves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Partition {
    pub fn is_valid(&self, inst: &PartitionInstance) -> bool {
        let n = inst.values.len();
        let mut seen = alloc::vec![false; n];
        for &i in self.left.iter().chain(&self.right) {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        if seen.iter().any(|&s| !s) {
            return false;
        }
        let sum = |ix: &[usize]| -> BigUint { ix.iter().map(|&i| inst.values[i].clone()).sum() };
        sum(&self.left) == sum(&self.right)
    }
}

pub const DEFAULT_PARTITION_BUDGET: u64 = 1 << 26;

/// Subset-sum DP with reconstruction; `None` is an exact no.
pub fn solve_2partition(inst: &PartitionInstance) -> Result<Option<Partition>, OracleError> {
    solve_2partition_bounded(inst, DEFAULT_PARTITION_BUDGET)
}

pub fn solve_2partition_bounded(
    inst: &PartitionInstance,
    budget: u64,
) -> Result<Option<Partition>, OracleError> {
    if inst.values.is_empty() {
        return Ok(Some(Partition { left: Vec::new(), right: Vec::new() }));
    }
    let total = inst.total();
    if total.bit(0) {
        return Ok(None); // odd total
    }
    let Some(total) = total.to_u64().filter(|&t| t <= budget) else {
        return Err(OracleError::Budget);
    };
    let values: Vec<u64> =
        inst.values.iter().map(|v| v.to_u64().expect("values bounded by total")).collect();
    let half = (total / 2) as usize;
    // reach[s] = the value that first completed sum s.
    let mut reach = alloc::vec![usize::MAX; half + 1];
    let mut reachable = alloc::vec![false; half + 1];
    reachable[0] = true;
    for (idx, &v) in values.iter().enumerate() {
        let v = v as usize;
        if v > half {
            continue;
        }
        for s in (v..=half).rev() {
            if !reachable[s] && reachable[s - v] {
                reachable[s] = true;
                reach[s] = idx;
            }
        }
    }
    if !reachable[half] {
        return Ok(None);
    }
    let mut left = Vec::new();
    let mut s = half;
    while s > 0 {
        let idx = reach[s];
        debug_assert_ne!(idx, usize::MAX);
        left.push(idx);
        s -= values[idx] as usize;
    }
    left.reverse();
    let mut in_left = alloc::vec![false; values.len()];
    for &i in &left {
        in_left[i] = true;
    }
    let right = (0..values.len()).filter(|&i| !in_left[i]).collect();
    let partition = Partition { left, right };
    debug_assert!(partition.is_valid(inst));
    Ok(Some(partition))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_element_matching() {
        let inst =
            ThreeDMInstance::new(10, alloc::vec![5, 6], alloc::vec![3, 2], alloc::vec![2, 2])
                .unwrap();
        let m = solve_3dm(&inst).unwrap().expect("matching exists");
        assert!(m.satisfies(&inst));
        // 5+3+2 and 6+2+2.
        assert_eq!(m.sigma, alloc::vec![0, 1]);
    }

    #[test]
    fn sum_off_is_none() {
        let inst = ThreeDMInstance::new(5, alloc::vec![1], alloc::vec![1], alloc::vec![1]).unwrap();
        assert!(solve_3dm(&inst).unwrap().is_none());
    }

    #[test]
    fn exhaustive_none_case() {
        let inst =
            ThreeDMInstance::new(3, alloc::vec![1, 1], alloc::vec![1, 1], alloc::vec![1, 2])
                .unwrap();
        assert!(solve_3dm(&inst).unwrap().is_none());
    }

    #[test]
    fn oracle_bound_enforced() {
        let inst =
            ThreeDMInstance::new(30, alloc::vec![10; 9], alloc::vec![10; 9], alloc::vec![10; 9])
                .unwrap();
        assert!(matches!(solve_3dm(&inst), Err(OracleError::TooLarge { .. })));
        assert!(solve_3dm_bounded(&inst, 9).unwrap().is_some());
    }

    #[test]
    fn normalizer_worked_example() {
        let inst = ThreeDMInstance::new(3, alloc::vec![1], alloc::vec![1], alloc::vec![1]).unwrap();
        let (out, x) = normalize_3dm(&inst);
        assert_eq!(x, 12);
        assert_eq!(out.t, 87);
        assert_eq!(out.a, alloc::vec![49]);
        assert_eq!(out.b, alloc::vec![25]);
        assert_eq!(out.c, alloc::vec![13]);
        assert!(out.is_normalized());
    }

    #[test]
    fn normalizer_keeps_normalized_instances_normalized() {
        let inst = ThreeDMInstance::new(3, alloc::vec![1], alloc::vec![1], alloc::vec![1]).unwrap();
        let (once, _) = normalize_3dm(&inst);
        let (twice, x) = normalize_3dm(&once);
        assert!(x >= 1);
        assert!(twice.is_normalized());
    }

    #[test]
    fn partition_basic() {
        let inst = PartitionInstance::from_u64(&[1, 2, 1]);
        let p = solve_2partition(&inst).unwrap().expect("solvable");
        assert!(p.is_valid(&inst));
        assert!(solve_2partition(&PartitionInstance::from_u64(&[1, 3])).unwrap().is_none());
        let empty = PartitionInstance { values: alloc::vec![] };
        assert!(solve_2partition(&empty).unwrap().unwrap().is_valid(&empty));
    }

    #[test]
    fn partition_budget() {
        let inst = PartitionInstance::from_u64(&[u64::MAX / 2, u64::MAX / 2]);
        assert!(matches!(solve_2partition(&inst), Err(OracleError::Budget)));
    }
}
