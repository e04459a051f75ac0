//! Small combinatorial kernels: factorials, Stirling and Bell numbers,
//! integer compositions, and set partitions enumerated as restricted growth
//! strings.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{from_big, Rational};

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

pub fn factorial_rat(n: usize) -> Rational {
    from_big(factorial(n))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_rat(n: usize, k: usize) -> Rational {
    from_big(binomial(n, k))
}

/// (2r-1)!! — the number of perfect matchings of 2r points.
pub fn double_factorial_odd(r: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut i = 1usize;
    while i + 1 <= 2 * r {
        acc *= BigInt::from(i);
        i += 2;
    }
    acc
}

/// Stirling numbers of the second kind S(n, k).
pub fn stirling2(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    if n == 0 {
        return BigInt::one(); // S(0,0)
    }
    if k == 0 {
        return BigInt::zero();
    }
    // S(n,k) = k S(n-1,k) + S(n-1,k-1)
    let mut row: Vec<BigInt> = vec![BigInt::one()]; // S(0,0)
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m + 1];
        for (j, item) in next.iter_mut().enumerate().take(m + 1).skip(1) {
            let a = if j < row.len() { &row[j] * BigInt::from(j) } else { BigInt::zero() };
            let b = if j - 1 < row.len() { row[j - 1].clone() } else { BigInt::zero() };
            *item = a + b;
        }
        row = next;
    }
    row[k].clone()
}

/// Bell numbers B(0..=n), used to size partition enumeration buffers.
pub fn bell_numbers(n: usize) -> Vec<BigInt> {
    let mut bells = Vec::with_capacity(n + 1);
    let mut row = vec![BigInt::one()];
    bells.push(BigInt::one());
    for _ in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for v in &row {
            let last = next.last().unwrap().clone();
            next.push(last + v);
        }
        bells.push(next[0].clone());
        row = next;
    }
    bells
}

/// Ordered compositions of `n` into exactly `parts` positive parts.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = Vec::with_capacity(parts);
    fn rec(n: usize, parts: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if n >= 1 {
                current.push(n);
                out.push(current.clone());
                current.pop();
            }
            return;
        }
        // leave at least one unit for each remaining part
        for first in 1..=(n + 1 - parts) {
            current.push(first);
            rec(n - first, parts - 1, current, out);
            current.pop();
        }
    }
    if n >= parts {
        rec(n, parts, &mut current, &mut out);
    }
    out
}

/// All set partitions of {0, .., n-1} as restricted growth strings:
/// `rgs[i]` is the block id of element `i`, with `rgs[0] = 0` and
/// `rgs[i] <= max(rgs[..i]) + 1`.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let capacity = usize::try_from(bell_numbers(n)[n].clone()).unwrap_or(0);
    let mut out = Vec::with_capacity(capacity);
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max_used: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        for b in 0..=max_used + 1 {
            rgs[i] = b;
            rec(i + 1, max_used.max(b), rgs, out);
        }
    }
    rec(1, 0, &mut rgs, &mut out);
    out
}

/// Blocks of a restricted growth string, listed by block id.
pub fn rgs_blocks(rgs: &[usize]) -> Vec<Vec<usize>> {
    let nblocks = rgs.iter().copied().max().map_or(0, |b| b + 1);
    let mut blocks = vec![Vec::new(); nblocks];
    for (elem, &b) in rgs.iter().enumerate() {
        blocks[b].push(elem);
    }
    blocks
}

/// Block sizes of a restricted growth string.
pub fn rgs_block_sizes(rgs: &[usize]) -> Vec<usize> {
    let nblocks = rgs.iter().copied().max().map_or(0, |b| b + 1);
    let mut sizes = vec![0usize; nblocks];
    for &b in rgs {
        sizes[b] += 1;
    }
    sizes
}

/// Cycle decomposition of a permutation given in one-line notation.
pub fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = perm[i];
        }
        cycles.push(cycle);
    }
    cycles
}
