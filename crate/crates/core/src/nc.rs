//! Noncrossing partitions, Kreweras complements and Möbius values.
//!
//! Positions are 0-based internally; `Display` prints the usual 1-based
//! blocks.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest `n` for which [`enumerate_nc`] will build `NC(n)`.
pub const MAX_NC_SIZE: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NcError {
    #[error("NC({n}) is outside the supported range 1..={max}")]
    SizeOutOfRange { n: usize, max: usize },
    #[error("not a noncrossing partition of {n} points: {reason}")]
    Invalid { n: usize, reason: String },
}

/// A noncrossing partition of `{0, .., n-1}`. Blocks are sorted internally
/// and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NoncrossingPartition {
    /// Validates and canonicalises a list of 0-based blocks.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, NcError> {
        let invalid = |reason: &str| NcError::Invalid {
            n,
            reason: reason.to_string(),
        };
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(invalid("empty block"));
            }
            for &i in b {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(invalid("blocks overlap or leave the range"));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("blocks do not cover every point"));
        }
        blocks.sort();
        let p = Self { n, blocks };
        if p.has_crossing() {
            return Err(invalid("crossing blocks"));
        }
        Ok(p)
    }

    /// From 1-based blocks.
    pub fn from_one_based(n: usize, blocks: &[&[usize]]) -> Result<Self, NcError> {
        Self::new(
            n,
            blocks
                .iter()
                .map(|b| b.iter().map(|i| i.wrapping_sub(1)).collect())
                .collect(),
        )
    }

    /// `1_n`, the one-block partition.
    pub fn top(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// `0_n`, all singletons.
    pub fn bottom(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_top(&self) -> bool {
        self.blocks.len() == 1
    }

    fn block_labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                label[i] = k;
            }
        }
        label
    }

    fn has_crossing(&self) -> bool {
        let label = self.block_labels();
        let n = self.n;
        for a in 0..n {
            for b in a + 1..n {
                if label[b] == label[a] {
                    continue;
                }
                for c in b + 1..n {
                    if label[c] != label[a] {
                        continue;
                    }
                    if (c + 1..n).any(|d| label[d] == label[b]) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Index of the first block that is a contiguous run `p..p+k`.
    pub fn interval_block(&self) -> usize {
        self.blocks
            .iter()
            .position(|b| b.windows(2).all(|w| w[1] == w[0] + 1))
            .expect("every noncrossing partition has an interval block")
    }

    /// The partition of the remaining points after deleting block `k`,
    /// relabelled to `0..n-|B|`.
    pub fn remove_block(&self, k: usize) -> NoncrossingPartition {
        let removed = &self.blocks[k];
        let mut map = vec![usize::MAX; self.n];
        let mut next = 0;
        for (i, slot) in map.iter_mut().enumerate() {
            if removed.binary_search(&i).is_err() {
                *slot = next;
                next += 1;
            }
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, b)| b.iter().map(|&i| map[i]).collect())
            .collect();
        NoncrossingPartition { n: next, blocks }
    }

    /// Kreweras complement, computed as the cycles of `π⁻¹ ∘ γ` where each
    /// block is an increasing cycle and `γ = (0 1 .. n-1)`.
    pub fn kreweras_complement(&self) -> NoncrossingPartition {
        let n = self.n;
        let mut inv = vec![0; n];
        for b in &self.blocks {
            for (j, &x) in b.iter().enumerate() {
                let next = b[(j + 1) % b.len()];
                inv[next] = x;
            }
        }
        let perm: Vec<usize> = (0..n).map(|i| inv[(i + 1) % n]).collect();
        let mut visited = vec![false; n];
        let mut blocks = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                cycle.push(i);
                i = perm[i];
            }
            cycle.sort_unstable();
            blocks.push(cycle);
        }
        blocks.sort();
        NoncrossingPartition { n, blocks }
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &NoncrossingPartition) -> bool {
        let label = other.block_labels();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| label[i] == label[b[0]]))
    }
}

impl fmt::Display for NoncrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for b in &self.blocks {
            f.write_str("{")?;
            for (j, i) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// All of `NC(n)`, in the order produced by splitting on the block of the
/// first point.
pub fn enumerate_nc(n: usize) -> Result<Vec<NoncrossingPartition>, NcError> {
    if n == 0 || n > MAX_NC_SIZE {
        return Err(NcError::SizeOutOfRange { n, max: MAX_NC_SIZE });
    }
    let mut memo = HashMap::new();
    Ok(nc_on_range(0, n, &mut memo)
        .into_iter()
        .map(|mut blocks| {
            blocks.sort();
            NoncrossingPartition { n, blocks }
        })
        .collect())
}

/// Noncrossing partitions of `start..start+len` as block lists.
fn nc_on_range(start: usize, len: usize, memo: &mut HashMap<usize, Vec<Vec<Vec<usize>>>>) -> Vec<Vec<Vec<usize>>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let shapes = match memo.get(&len) {
        Some(s) => s.clone(),
        None => {
            let s = nc_shapes(len, memo);
            memo.insert(len, s.clone());
            s
        }
    };
    shapes
        .into_iter()
        .map(|blocks| {
            blocks
                .into_iter()
                .map(|b| b.into_iter().map(|i| i + start).collect())
                .collect()
        })
        .collect()
}

fn nc_shapes(len: usize, memo: &mut HashMap<usize, Vec<Vec<Vec<usize>>>>) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    // choose the block of point 0 as a subset of 1..len; gaps between its
    // consecutive members (and after the last) are independent
    for mask in 0u32..(1u32 << (len - 1)) {
        let mut block = vec![0];
        block.extend((1..len).filter(|i| mask & (1 << (i - 1)) != 0));
        let mut gaps = Vec::new();
        for (j, &x) in block.iter().enumerate() {
            let end = block.get(j + 1).copied().unwrap_or(len);
            if end > x + 1 {
                gaps.push((x + 1, end - x - 1));
            }
        }
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block.clone()]];
        for (s, l) in gaps {
            let subs = nc_on_range(s, l, memo);
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    subs.iter().map(move |sub| {
                        let mut q = p.clone();
                        q.extend(sub.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

pub fn catalan(n: usize) -> u128 {
    let mut c: u128 = 1;
    for k in 0..n as u128 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// `μ(π, 1_n)`, from the factorisation `[π, 1_n] ≅ Π_{B ∈ K(π)} NC(|B|)`.
pub fn moebius_to_top(pi: &NoncrossingPartition) -> i64 {
    pi.kreweras_complement()
        .blocks()
        .iter()
        .map(|b| {
            let k = b.len();
            let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
            sign * catalan(k - 1) as i64
        })
        .product()
}

/// `μ(π, 1_n)` for every `π ∈ NC(n)` from the defining recursion
/// `Σ_{σ ≥ π} μ(σ, 1_n) = δ_{π, 1_n}`.
pub fn moebius_by_recursion(n: usize) -> Result<Vec<(NoncrossingPartition, i64)>, NcError> {
    let mut parts = enumerate_nc(n)?;
    // coarser partitions first
    parts.sort_by_key(|p| p.block_count());
    let mut values: Vec<i64> = Vec::with_capacity(parts.len());
    for (i, p) in parts.iter().enumerate() {
        if p.is_top() {
            values.push(1);
            continue;
        }
        let above: i64 = (0..i)
            .filter(|&j| parts[j] != *p && p.refines(&parts[j]))
            .map(|j| values[j])
            .sum();
        values.push(-above);
    }
    Ok(parts.into_iter().zip(values).collect())
}
