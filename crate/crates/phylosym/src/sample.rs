//! Exact-uniform random generation for both models, plus the histogram /
//! chi-square report used to validate the exact distributions empirically.
//!
//! Labeled trees are grown by leaf insertion: a tree on m−1 leaves has 2m−3
//! edges (counting the root edge), and subdividing a uniformly chosen one
//! with leaf m extends the uniform distribution from b_{m−1} to
//! b_m = (2m−3)·b_{m−1} labeled trees.
//!
//! Shapes are drawn by exact unranking: a uniform integer below u_n selects
//! a shape through the same block decomposition the enumerator uses, so
//! `unrank_otter(n, r)` is the r-th entry of `enumerate_shapes(n)` — a
//! testable bridge between sampler and oracle. Rank arithmetic and the
//! split-probability bookkeeping stay in integers throughout.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::otter_counts;
use crate::stats::{Model, SymDistribution};
use crate::tree::{PhyloTree, Shape};
use crate::util::ratio_to_f64;

/// The rng every sampler in this crate uses; recorded in reports so a seed
/// pins the byte-exact output.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Cached shape counts u_0..u_N for split decisions and rank bounds.
#[derive(Clone, Debug)]
pub struct UTable {
    counts: Vec<BigUint>,
}

impl UTable {
    pub fn new(n_max: usize) -> Self {
        UTable {
            counts: otter_counts(n_max),
        }
    }

    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, n: usize) -> &BigUint {
        &self.counts[n]
    }
}

// ---------------------------------------------------------------------------
// Labeled model
// ---------------------------------------------------------------------------

enum ArenaNode {
    Leaf(u32),
    Internal(usize, usize),
}

/// Uniform random labeled tree on leaves 1..=n.
pub fn sample_phylo<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhyloTree {
    assert!(n >= 1 && n <= u32::MAX as usize, "size out of range");
    let mut arena: Vec<ArenaNode> = Vec::with_capacity(2 * n - 1);
    arena.push(ArenaNode::Leaf(1));
    for m in 2..=n as u32 {
        // 2m−3 nodes = 2m−3 edges, counting the root edge as the root node
        let v = rng.gen_range(0..arena.len());
        let moved = arena.len();
        let old = core::mem::replace(&mut arena[v], ArenaNode::Leaf(0));
        arena.push(old);
        arena.push(ArenaNode::Leaf(m));
        arena[v] = ArenaNode::Internal(moved, moved + 1);
    }
    build_phylo(&arena, 0)
}

fn build_phylo(arena: &[ArenaNode], id: usize) -> PhyloTree {
    match arena[id] {
        ArenaNode::Leaf(l) => PhyloTree::Leaf(l),
        ArenaNode::Internal(a, b) => {
            PhyloTree::branch(build_phylo(arena, a), build_phylo(arena, b))
        }
    }
}

// ---------------------------------------------------------------------------
// Unlabeled model
// ---------------------------------------------------------------------------

/// The shape at position `rank` in the canonical enumeration order of size-n
/// shapes (the order `enumerate_shapes` produces).
pub fn unrank_otter(n: usize, rank: &BigUint, table: &UTable) -> Result<Shape> {
    if n == 0 {
        return Err(Error::RankOutOfRange { n });
    }
    if n > table.n_max() {
        return Err(Error::OrderTooSmall {
            needed: n,
            have: table.n_max(),
        });
    }
    if rank >= table.count(n) {
        return Err(Error::RankOutOfRange { n });
    }
    Ok(unrank_inner(n, rank.clone(), table))
}

fn unrank_inner(n: usize, mut rank: BigUint, table: &UTable) -> Shape {
    if n == 1 {
        return Shape::leaf();
    }
    for k in 1..=(n - 1) / 2 {
        let right_count = table.count(n - k);
        let block = table.count(k) * right_count;
        if rank < block {
            let (i, j) = rank.div_rem(right_count);
            return Shape::join(unrank_inner(k, i, table), unrank_inner(n - k, j, table));
        }
        rank -= block;
    }
    // even n: the unordered-pair block over the u_{n/2} shapes, pairs (i,j)
    // with i ≤ j listed row by row; row starts are triangular numbers, so
    // the row index comes from an integer square root
    debug_assert!(n % 2 == 0, "odd sizes are fully covered by the k-blocks");
    let m = table.count(n / 2);
    let a = 2u32 * m + 1u32; // 2M+1
    let disc = &a * &a - 8u32 * &rank;
    let mut i = (&a - disc.sqrt()) >> 1;
    while row_start(&i, m) > rank {
        i -= 1u32;
    }
    while row_start(&(&i + 1u32), m) <= rank {
        i += 1u32;
    }
    let j = &i + (rank - row_start(&i, m));
    Shape::join(
        unrank_inner(n / 2, i, table),
        unrank_inner(n / 2, j, table),
    )
}

/// Index of the first pair of row i: i·(2M − i + 1)/2.
fn row_start(i: &BigUint, m: &BigUint) -> BigUint {
    (i * ((2u32 * m) + 1u32 - i)) >> 1
}

/// Uniform random shape of size n.
pub fn sample_otter<R: Rng + ?Sized>(n: usize, table: &UTable, rng: &mut R) -> Result<Shape> {
    if n == 0 || n > table.n_max() {
        return Err(Error::OrderTooSmall {
            needed: n.max(1),
            have: table.n_max(),
        });
    }
    let rank = rng.gen_biguint_below(table.count(n));
    Ok(unrank_inner(n, rank, table))
}

// ---------------------------------------------------------------------------
// Histogram reports
// ---------------------------------------------------------------------------

/// Result of one sampling run, sufficient to reproduce it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub model: Model,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    /// sym value → number of sampled trees with that value
    pub histogram: BTreeMap<u32, u64>,
    /// Pearson statistic against the exact pmf, cells pooled to expected ≥ 5
    pub chi_square: f64,
    /// pooled cell count minus one
    pub df: usize,
    /// true when pooling could not reach expected count 5 everywhere
    pub low_expectation: bool,
}

/// Samples `trials` trees from the model behind `dist` and compares the
/// observed sym histogram to the exact pmf.
pub fn empirical_histogram(dist: &SymDistribution, trials: u64, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dist.n;
    let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
    match dist.model {
        Model::Phylo => {
            for _ in 0..trials {
                *histogram.entry(sample_phylo(n, &mut rng).sym()).or_default() += 1;
            }
        }
        Model::Otter => {
            let table = UTable::new(n);
            for _ in 0..trials {
                let shape = sample_otter(n, &table, &mut rng).expect("table sized to n");
                *histogram.entry(shape.sym()).or_default() += 1;
            }
        }
    }
    let (chi_square, df, low_expectation) = chi_square_pooled(dist, &histogram, trials);
    SampleReport {
        model: dist.model,
        n,
        trials,
        seed,
        rng_algorithm: RNG_ALGORITHM,
        histogram,
        chi_square,
        df,
        low_expectation,
    }
}

/// Pearson χ² with adjacent-cell pooling until every expected count reaches
/// 5; a trailing underfull cell merges backwards into the previous one.
fn chi_square_pooled(
    dist: &SymDistribution,
    histogram: &BTreeMap<u32, u64>,
    trials: u64,
) -> (f64, usize, bool) {
    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let (mut obs_acc, mut exp_acc) = (0.0f64, 0.0f64);
    for (k, p) in &dist.pmf {
        obs_acc += histogram.get(k).copied().unwrap_or(0) as f64;
        exp_acc += ratio_to_f64(p) * trials as f64;
        if exp_acc >= 5.0 {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if exp_acc > 0.0 {
        if let Some(last) = cells.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        } else {
            cells.push((obs_acc, exp_acc));
        }
    }
    let low_expectation = cells.iter().any(|&(_, e)| e < 5.0);
    let chi = cells
        .iter()
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum::<f64>();
    (chi, cells.len().saturating_sub(1), low_expectation)
}
