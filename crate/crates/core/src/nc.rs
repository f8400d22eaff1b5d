//! Non-crossing partitions and their nesting structure.
//!
//! Elements of the ground set are `1..=n`. Blocks are kept sorted, and the
//! block list is sorted by block minimum, which makes structural equality
//! the same as equality of partitions.
//!
//! # Enumeration order
//!
//! [`enumerate_nc`] uses the first-block decomposition. For a ground set
//! `a < e_1 < ... < e_r`, the block containing `a` is `{a} ∪ S` for a subset
//! `S` of `{e_1, .., e_r}`; the subsets are visited with their indicator
//! strings `(e_1 ∈ S, .., e_r ∈ S)` in descending lexicographic order
//! (so the full block comes first and the singleton `{a}` last). For each
//! choice the gaps between consecutive elements of the block, and the run
//! after its last element, are filled independently, left to right, with
//! the same rule. This order is frozen.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest ground-set size accepted by [`enumerate_nc`] and [`count_nc`].
/// `|NC(12)| = 208012`.
pub const NC_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NCPartition {
    /// Validate and canonicalise a candidate partition of `{1..n}`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let blocks = canonical_blocks(n, blocks)?;
        if !blocks_noncrossing(&blocks) {
            return invalid(format!("partition {blocks:?} is crossing"));
        }
        Ok(NCPartition { n, blocks })
    }

    /// The one-block partition `1_n`.
    pub fn full(n: usize) -> Self {
        NCPartition { n, blocks: vec![(1..=n).collect()] }
    }

    /// The partition into singletons.
    pub fn singletons(n: usize) -> Self {
        NCPartition { n, blocks: (1..=n).map(|i| vec![i]).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_full(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Every block has exactly two elements.
    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }
}

/// Sort, check disjointness and coverage.
fn canonical_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return invalid("partition of an empty set");
    }
    let mut seen = vec![false; n + 1];
    for b in blocks.iter_mut() {
        if b.is_empty() {
            return invalid("empty block");
        }
        b.sort_unstable();
        for &e in b.iter() {
            if e == 0 || e > n {
                return invalid(format!("element {e} outside 1..={n}"));
            }
            if seen[e] {
                return invalid(format!("element {e} appears twice"));
            }
            seen[e] = true;
        }
    }
    if let Some(gap) = (1..=n).find(|&e| !seen[e]) {
        return invalid(format!("element {gap} is not covered"));
    }
    blocks.sort_by_key(|b| b[0]);
    Ok(blocks)
}

fn blocks_noncrossing(blocks: &[Vec<usize>]) -> bool {
    // a < b < c < d with a, c in one block and b, d in another.
    for (i, p) in blocks.iter().enumerate() {
        for q in blocks.iter().skip(i + 1) {
            for w in p.windows(2) {
                let (a, c) = (w[0], w[1]);
                let inside = q.iter().any(|&x| a < x && x < c);
                let outside = q.iter().any(|&x| x < a || x > c);
                if inside && outside {
                    return false;
                }
            }
            for w in q.windows(2) {
                let (a, c) = (w[0], w[1]);
                let inside = p.iter().any(|&x| a < x && x < c);
                let outside = p.iter().any(|&x| x < a || x > c);
                if inside && outside {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff the set partition has no crossing quadruple.
pub fn is_noncrossing(n: usize, blocks: &[Vec<usize>]) -> Result<bool> {
    let blocks = canonical_blocks(n, blocks.to_vec())?;
    Ok(blocks_noncrossing(&blocks))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > NC_CAP {
        return invalid(format!("n must satisfy 1 <= n <= {NC_CAP}, got {n}"));
    }
    Ok(())
}

/// All non-crossing partitions of `{1..n}` in the frozen order described in
/// the module docs.
pub fn enumerate_nc(n: usize) -> Result<Vec<NCPartition>> {
    check_n(n)?;
    let ground: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for blocks in enumerate_on(&ground) {
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b[0]);
        out.push(NCPartition { n, blocks });
    }
    Ok(out)
}

fn enumerate_on(ground: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if ground.is_empty() {
        return vec![Vec::new()];
    }
    let rest = &ground[1..];
    let r = rest.len();
    let mut out = Vec::new();
    // Indicator strings in descending lexicographic order, first element as
    // the most significant bit.
    for mask in (0..(1u64 << r)).rev() {
        let chosen: Vec<usize> = (0..r).filter(|&t| mask >> (r - 1 - t) & 1 == 1).collect();
        let mut block = vec![ground[0]];
        block.extend(chosen.iter().map(|&t| rest[t]));
        // Gaps between consecutive block members and after the last one.
        let mut gaps: Vec<&[usize]> = Vec::new();
        let mut start = 0;
        for &t in &chosen {
            gaps.push(&rest[start..t]);
            start = t + 1;
        }
        gaps.push(&rest[start..]);

        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for gap in gaps {
            if gap.is_empty() {
                continue;
            }
            let fills = enumerate_on(gap);
            let mut next = Vec::with_capacity(partial.len() * fills.len());
            for p in &partial {
                for f in &fills {
                    let mut q = p.clone();
                    q.extend(f.iter().cloned());
                    next.push(q);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// `|NC(n)|` by the Catalan recurrence `C_{n+1} = Σ C_i C_{n-i}`.
pub fn count_nc(n: usize) -> Result<u64> {
    check_n(n)?;
    Ok(catalan(n))
}

/// `n`-th Catalan number (exact for `n <= 35`).
pub fn catalan(n: usize) -> u64 {
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for m in 1..=n {
        c[m] = (0..m).map(|i| c[i] * c[m - 1 - i]).sum();
    }
    c[n]
}

/// A block together with the blocks nested directly inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingNode {
    pub block: Vec<usize>,
    pub children: Vec<NestedChild>,
}

/// A child subtree sitting right after the `after`-th element (1-based
/// position) of its parent's block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestedChild {
    pub after: usize,
    pub node: NestingNode,
}

/// Outermost blocks from left to right, each with its nested subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingForest {
    pub n: usize,
    pub roots: Vec<NestingNode>,
}

impl NestingForest {
    /// Inverse of [`nesting_forest`].
    pub fn flatten(&self) -> NCPartition {
        fn collect(node: &NestingNode, out: &mut Vec<Vec<usize>>) {
            out.push(node.block.clone());
            for ch in &node.children {
                collect(&ch.node, out);
            }
        }
        let mut blocks = Vec::new();
        for r in &self.roots {
            collect(r, &mut blocks);
        }
        blocks.sort_by_key(|b| b[0]);
        NCPartition { n: self.n, blocks }
    }
}

/// Decompose `π` by interval containment.
pub fn nesting_forest(pi: &NCPartition) -> NestingForest {
    // Blocks in order of minima; a block nests in the nearest earlier block
    // whose span contains it.
    let blocks = &pi.blocks;
    let m = blocks.len();
    let mut parent: Vec<Option<usize>> = vec![None; m];
    let mut stack: Vec<usize> = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if *blocks[top].last().unwrap() < b[0] {
                stack.pop();
            } else {
                break;
            }
        }
        parent[i] = stack.last().copied();
        stack.push(i);
    }
    fn build(i: usize, blocks: &[Vec<usize>], parent: &[Option<usize>]) -> NestingNode {
        let mut children = Vec::new();
        for (c, p) in parent.iter().enumerate() {
            if *p == Some(i) {
                let after = blocks[i].iter().filter(|&&e| e < blocks[c][0]).count();
                children.push(NestedChild { after, node: build(c, blocks, parent) });
            }
        }
        NestingNode { block: blocks[i].clone(), children }
    }
    let roots = (0..m).filter(|&i| parent[i].is_none()).map(|i| build(i, blocks, &parent)).collect();
    NestingForest { n: pi.n, roots }
}
