//! Tree representations: unlabeled shapes (Otter trees) in canonical form,
//! leaf-labeled phylogenetic trees, symmetry counting, and exhaustive
//! enumeration.
//!
//! A shape is a rooted binary tree where children are unordered. The
//! canonical form orders every internal node's children by a fixed total
//! order (leaf count first, then recursively by the child pair), so two
//! shapes are isomorphic iff their canonical forms are structurally equal.
//! An internal node is *symmetrical* when its two subtrees are identical
//! shapes; `sym(t)` counts symmetrical nodes, and a shape of size n admits
//! exactly `n!/2^sym(t)` distinct leaf labelings.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default cap for exhaustive enumeration; `u_20` = 293 547 shapes.
pub const DEFAULT_ENUM_LIMIT: usize = 20;

// ---------------------------------------------------------------------------
// Shape
// ---------------------------------------------------------------------------

/// An unlabeled rooted non-plane binary tree in canonical form.
///
/// Cheap to clone; subtrees are shared. Constructed only through
/// [`Shape::leaf`] and [`Shape::join`], so canonical order holds at every
/// internal node by construction.
#[derive(Clone)]
pub struct Shape(Arc<Node>);

struct Node {
    leaves: u32,
    sym: u32,
    kind: Kind,
}

enum Kind {
    Leaf,
    Branch(Shape, Shape),
}

impl Shape {
    /// The single-leaf shape.
    pub fn leaf() -> Self {
        Shape(Arc::new(Node {
            leaves: 1,
            sym: 0,
            kind: Kind::Leaf,
        }))
    }

    /// Joins two shapes under a new root, ordering the pair canonically.
    /// The root is symmetrical iff `a == b`.
    pub fn join(a: Shape, b: Shape) -> Self {
        let equal = a == b;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Shape(Arc::new(Node {
            leaves: lo.0.leaves + hi.0.leaves,
            sym: lo.0.sym + hi.0.sym + u32::from(equal),
            kind: Kind::Branch(lo, hi),
        }))
    }

    /// Number of leaves.
    pub fn leaves(&self) -> usize {
        self.0.leaves as usize
    }

    /// Number of symmetrical internal nodes.
    pub fn sym(&self) -> u32 {
        self.0.sym
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.0.kind, Kind::Leaf)
    }

    /// Children of the root, `None` for a leaf.
    pub fn children(&self) -> Option<(&Shape, &Shape)> {
        match &self.0.kind {
            Kind::Leaf => None,
            Kind::Branch(l, r) => Some((l, r)),
        }
    }

    /// `n!/2^sym`: the number of distinct leaf labelings of this shape.
    pub fn labeling_count(&self) -> BigUint {
        factorial(self.leaves()) >> self.0.sym
    }
}

impl PartialEq for Shape {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.leaves != other.0.leaves || self.0.sym != other.0.sym {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Leaf, Kind::Leaf) => true,
            (Kind::Branch(a, b), Kind::Branch(c, d)) => a == c && b == d,
            _ => false,
        }
    }
}

impl Eq for Shape {}

/// Total order: leaf count, then leaf-before-branch, then the child pair
/// lexicographically. Enumeration emits shapes in exactly this order.
impl Ord for Shape {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .leaves
            .cmp(&other.0.leaves)
            .then_with(|| match (&self.0.kind, &other.0.kind) {
                (Kind::Leaf, Kind::Leaf) => Ordering::Equal,
                (Kind::Leaf, Kind::Branch(..)) => Ordering::Less,
                (Kind::Branch(..), Kind::Leaf) => Ordering::Greater,
                (Kind::Branch(a, b), Kind::Branch(c, d)) => a.cmp(c).then_with(|| b.cmp(d)),
            })
    }
}

impl PartialOrd for Shape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Shape {
    /// Balanced-parenthesis encoding: leaf is `o`, branch is `(LR)`.
    /// The perfect 4-leaf tree prints as `((oo)(oo))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Leaf => f.write_str("o"),
            Kind::Branch(l, r) => write!(f, "({l}{r})"),
        }
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape({self})")
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// Parses the `Display` encoding. Children may appear in either order;
    /// the result is canonicalized.
    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let (shape, used) = parse_shape(bytes, 0)?;
        if used != bytes.len() {
            return Err(Error::Parse {
                pos: used,
                expected: "end of input",
            });
        }
        Ok(shape)
    }
}

fn parse_shape(bytes: &[u8], pos: usize) -> Result<(Shape, usize)> {
    match bytes.get(pos) {
        Some(b'o') => Ok((Shape::leaf(), pos + 1)),
        Some(b'(') => {
            let (left, pos) = parse_shape(bytes, pos + 1)?;
            let (right, pos) = parse_shape(bytes, pos)?;
            match bytes.get(pos) {
                Some(b')') => Ok((Shape::join(left, right), pos + 1)),
                _ => Err(Error::Parse {
                    pos,
                    expected: "')'",
                }),
            }
        }
        _ => Err(Error::Parse {
            pos,
            expected: "'o' or '('",
        }),
    }
}

// ---------------------------------------------------------------------------
// PhyloTree
// ---------------------------------------------------------------------------

/// A phylogenetic tree: rooted, binary, non-plane, leaves labeled by the
/// integers 1..=n (each exactly once). Child order carries no meaning;
/// [`PhyloTree::canonical`] gives a normal form for comparisons and text.
#[derive(Clone, Debug)]
pub enum PhyloTree {
    Leaf(u32),
    Branch(Box<PhyloTree>, Box<PhyloTree>),
}

impl PhyloTree {
    pub fn branch(a: PhyloTree, b: PhyloTree) -> Self {
        PhyloTree::Branch(Box::new(a), Box::new(b))
    }

    /// Number of leaves.
    pub fn n(&self) -> usize {
        match self {
            PhyloTree::Leaf(_) => 1,
            PhyloTree::Branch(a, b) => a.n() + b.n(),
        }
    }

    fn min_label(&self) -> u32 {
        match self {
            PhyloTree::Leaf(l) => *l,
            PhyloTree::Branch(a, b) => a.min_label().min(b.min_label()),
        }
    }

    /// Checks that leaf labels are exactly the interval 1..=n.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![self];
        while let Some(t) = stack.pop() {
            match t {
                PhyloTree::Leaf(l) => {
                    let idx = *l as usize;
                    if idx < 1 || idx > n {
                        return Err(Error::InvalidLabels {
                            n,
                            detail: "label out of range",
                        });
                    }
                    if seen[idx - 1] {
                        return Err(Error::InvalidLabels {
                            n,
                            detail: "duplicate label",
                        });
                    }
                    seen[idx - 1] = true;
                }
                PhyloTree::Branch(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        Ok(())
    }

    /// The canonical unlabeled shape obtained by erasing all labels.
    pub fn shape(&self) -> Shape {
        match self {
            PhyloTree::Leaf(_) => Shape::leaf(),
            PhyloTree::Branch(a, b) => Shape::join(a.shape(), b.shape()),
        }
    }

    /// `sym` of the underlying shape.
    pub fn sym(&self) -> u32 {
        self.shape().sym()
    }

    /// Normal form: at every internal node the child containing the smaller
    /// minimum label comes first. Two trees describe the same phylogeny iff
    /// their canonical forms are structurally equal.
    pub fn canonical(&self) -> PhyloTree {
        match self {
            PhyloTree::Leaf(l) => PhyloTree::Leaf(*l),
            PhyloTree::Branch(a, b) => {
                let (ca, cb) = (a.canonical(), b.canonical());
                if ca.min_label() <= cb.min_label() {
                    PhyloTree::branch(ca, cb)
                } else {
                    PhyloTree::branch(cb, ca)
                }
            }
        }
    }
}

impl PartialEq for PhyloTree {
    /// Equality as phylogenies (child order ignored).
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PhyloTree::Leaf(a), PhyloTree::Leaf(b)) => a == b,
            (PhyloTree::Branch(a, b), PhyloTree::Branch(c, d)) => {
                (a == c && b == d) || (a == d && b == c)
            }
            _ => false,
        }
    }
}

impl Eq for PhyloTree {}

impl fmt::Display for PhyloTree {
    /// Nested label lists in canonical child order, e.g. `((1,2),(3,4))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn emit(t: &PhyloTree, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                PhyloTree::Leaf(l) => write!(f, "{l}"),
                PhyloTree::Branch(a, b) => {
                    f.write_str("(")?;
                    emit(a, f)?;
                    f.write_str(",")?;
                    emit(b, f)?;
                    f.write_str(")")
                }
            }
        }
        emit(&self.canonical(), f)
    }
}

impl FromStr for PhyloTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let (tree, used) = parse_phylo(bytes, 0)?;
        if used != bytes.len() {
            return Err(Error::Parse {
                pos: used,
                expected: "end of input",
            });
        }
        tree.validate()?;
        Ok(tree)
    }
}

fn parse_phylo(bytes: &[u8], pos: usize) -> Result<(PhyloTree, usize)> {
    match bytes.get(pos) {
        Some(b'(') => {
            let (left, pos) = parse_phylo(bytes, pos + 1)?;
            if bytes.get(pos) != Some(&b',') {
                return Err(Error::Parse {
                    pos,
                    expected: "','",
                });
            }
            let (right, pos) = parse_phylo(bytes, pos + 1)?;
            if bytes.get(pos) != Some(&b')') {
                return Err(Error::Parse {
                    pos,
                    expected: "')'",
                });
            }
            Ok((PhyloTree::branch(left, right), pos + 1))
        }
        Some(c) if c.is_ascii_digit() => {
            let mut end = pos;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let label: u32 = core::str::from_utf8(&bytes[pos..end])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or(Error::Parse {
                    pos,
                    expected: "label fitting in u32",
                })?;
            Ok((PhyloTree::Leaf(label), end))
        }
        _ => Err(Error::Parse {
            pos,
            expected: "'(' or digit",
        }),
    }
}

// ---------------------------------------------------------------------------
// Free operations
// ---------------------------------------------------------------------------

/// `sym(t)`: the number of symmetrical internal nodes.
pub fn sym_count(t: &Shape) -> u32 {
    t.sym()
}

/// `w(t) = n!/2^sym(t)`: the number of leaf labelings of a shape.
pub fn labeling_count(t: &Shape) -> BigUint {
    t.labeling_count()
}

/// Shapes are isomorphic iff equal in canonical form; sizes must match.
pub fn isomorphic(t1: &PhyloTree, t2: &PhyloTree) -> Result<bool> {
    let (n1, n2) = (t1.n(), t2.n());
    if n1 != n2 {
        return Err(Error::SizeMismatch { left: n1, right: n2 });
    }
    Ok(t1.shape() == t2.shape())
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// `(2n-3)!!` with `(-1)!! = 1`: the number `b_n` of phylogenetic trees.
pub fn count_phylo(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    if n >= 3 {
        for odd in (3..=2 * n - 3).step_by(2) {
            acc *= BigUint::from(odd);
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

/// One isomorphism class in a [`ShapeTable`].
pub struct ShapeEntry {
    pub shape: Shape,
    pub sym: u32,
    pub labelings: BigUint,
}

/// All shapes of one size with their symmetry and labeling counts, sorted in
/// the canonical shape order.
pub struct ShapeTable {
    pub n: usize,
    pub entries: Vec<ShapeEntry>,
}

impl ShapeTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Σ w(t) over all classes; equals `(2n-3)!!`.
    pub fn total_labelings(&self) -> BigUint {
        self.entries
            .iter()
            .map(|e| &e.labelings)
            .fold(BigUint::zero(), |a, b| a + b)
    }
}

/// Enumerates all shapes of sizes `1..=n` in canonical order.
///
/// Level n is built from ordered splits: for each k < n/2 every pair from
/// levels (k, n-k), then for even n every unordered pair (i ≤ j) from level
/// n/2. This emits each level sorted by the shape order.
fn build_levels(n: usize) -> Vec<Vec<Shape>> {
    let mut levels: Vec<Vec<Shape>> = Vec::with_capacity(n + 1);
    levels.push(Vec::new()); // size 0 unused
    levels.push(alloc::vec![Shape::leaf()]);
    for size in 2..=n {
        let mut level = Vec::new();
        for k in 1..=(size - 1) / 2 {
            for a in &levels[k] {
                for b in &levels[size - k] {
                    level.push(Shape::join(a.clone(), b.clone()));
                }
            }
        }
        if size % 2 == 0 {
            let half = &levels[size / 2];
            for i in 0..half.len() {
                for j in i..half.len() {
                    level.push(Shape::join(half[i].clone(), half[j].clone()));
                }
            }
        }
        levels.push(level);
    }
    levels
}

/// All isomorphism classes of size `n`, with `sym` and labeling counts.
/// Bounded by [`DEFAULT_ENUM_LIMIT`]; see [`enumerate_shapes_with_limit`].
pub fn enumerate_shapes(n: usize) -> Result<ShapeTable> {
    enumerate_shapes_with_limit(n, DEFAULT_ENUM_LIMIT)
}

/// As [`enumerate_shapes`] with an explicit capacity bound.
pub fn enumerate_shapes_with_limit(n: usize, limit: usize) -> Result<ShapeTable> {
    if n == 0 || n > limit {
        return Err(Error::Capacity {
            what: "exhaustive shape enumeration",
            requested: n,
            max: limit,
        });
    }
    let levels = build_levels(n);
    let entries = levels[n]
        .iter()
        .map(|s| ShapeEntry {
            shape: s.clone(),
            sym: s.sym(),
            labelings: s.labeling_count(),
        })
        .collect();
    Ok(ShapeTable { n, entries })
}

/// All labeled trees on `1..=n`, built recursively: the subtree holding
/// label 1 is paired with every tree on each complementary label subset.
/// Sizes beyond the bound are rejected; `(2n-3)!!` grows fast.
pub fn enumerate_phylo(n: usize, limit: usize) -> Result<Vec<PhyloTree>> {
    if n == 0 || n > limit {
        return Err(Error::Capacity {
            what: "exhaustive labeled-tree enumeration",
            requested: n,
            max: limit,
        });
    }
    fn on_labels(labels: &[u32]) -> Vec<PhyloTree> {
        if labels.len() == 1 {
            return alloc::vec![PhyloTree::Leaf(labels[0])];
        }
        // Split off the first label's side: every proper subset of the rest
        // joins labels[0]; iterating subsets by bitmask, each unordered
        // root split appears exactly once.
        let rest = &labels[1..];
        let mut out = Vec::new();
        for mask in 0..(1u32 << rest.len()) - 1 {
            let mut with_first = alloc::vec![labels[0]];
            let mut other = Vec::new();
            for (i, &l) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    with_first.push(l);
                } else {
                    other.push(l);
                }
            }
            for a in on_labels(&with_first) {
                for b in on_labels(&other) {
                    out.push(PhyloTree::branch(a.clone(), b.clone()));
                }
            }
        }
        out
    }
    let labels: Vec<u32> = (1..=n as u32).collect();
    Ok(on_labels(&labels))
}

/// Canonical-form text key for bucketing labeled trees.
pub fn phylo_key(t: &PhyloTree) -> String {
    alloc::format!("{t}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;

    fn perfect4() -> Shape {
        let cherry = Shape::join(Shape::leaf(), Shape::leaf());
        Shape::join(cherry.clone(), cherry)
    }

    fn caterpillar(n: usize) -> Shape {
        let mut t = Shape::leaf();
        for _ in 1..n {
            t = Shape::join(t, Shape::leaf());
        }
        t
    }

    #[test]
    fn sym_examples() {
        assert_eq!(Shape::leaf().sym(), 0);
        assert_eq!(perfect4().sym(), 3);
        assert_eq!(caterpillar(4).sym(), 1);
    }

    #[test]
    fn labeling_examples() {
        assert_eq!(perfect4().labeling_count(), BigUint::from(3u32));
        assert_eq!(caterpillar(4).labeling_count(), BigUint::from(12u32));
        assert_eq!(Shape::leaf().labeling_count(), BigUint::from(1u32));
    }

    #[test]
    fn join_canonicalizes() {
        let a = Shape::join(Shape::leaf(), Shape::join(Shape::leaf(), Shape::leaf()));
        let b = Shape::join(Shape::join(Shape::leaf(), Shape::leaf()), Shape::leaf());
        assert_eq!(a, b);
    }

    #[test]
    fn display_roundtrip() {
        assert_eq!(perfect4().to_string(), "((oo)(oo))");
        for s in ["o", "(oo)", "(o(oo))", "((oo)(oo))", "((oo)(o(oo)))"] {
            let t: Shape = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        // non-canonical input canonicalizes
        let t: Shape = "(((oo)o)o)".parse().unwrap();
        assert_eq!(t.to_string(), "(o(o(oo)))".parse::<Shape>().unwrap().to_string());
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(matches!("((oo)".parse::<Shape>(), Err(Error::Parse { .. })));
        assert!(matches!("(oo)x".parse::<Shape>(), Err(Error::Parse { pos: 4, .. })));
    }

    #[test]
    fn counts() {
        let expect: [u32; 10] = [1, 1, 3, 15, 105, 945, 10395, 135135, 2027025, 34459425];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(count_phylo(i + 1), BigUint::from(*e));
        }
    }

    #[test]
    fn enumeration_sizes() {
        let expect = [1usize, 1, 1, 2, 3, 6, 11, 23, 46, 98];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(enumerate_shapes(i + 1).unwrap().len(), *e);
        }
        assert!(enumerate_shapes(DEFAULT_ENUM_LIMIT + 1).is_err());
    }

    #[test]
    fn enumeration_n4() {
        let table = enumerate_shapes(4).unwrap();
        let by_sym: Vec<(u32, u32)> = table
            .entries
            .iter()
            .map(|e| (e.sym, e.labelings.to_u32_digits().first().copied().unwrap_or(0)))
            .collect();
        assert!(by_sym.contains(&(3, 3)));
        assert!(by_sym.contains(&(1, 12)));
        assert_eq!(table.total_labelings(), BigUint::from(15u32));
    }

    #[test]
    fn tables_are_sorted_and_distinct() {
        for n in 1..=10 {
            let table = enumerate_shapes(n).unwrap();
            for w in table.entries.windows(2) {
                assert!(w[0].shape < w[1].shape);
            }
            for e in &table.entries {
                // w(t)·2^sym = n!
                assert_eq!(&e.labelings << e.sym, factorial(n));
            }
        }
    }

    #[test]
    fn perfect_tree_sym() {
        // n = 2^k: every internal node symmetric, sym = n-1
        let mut t = Shape::leaf();
        for _ in 0..4 {
            t = Shape::join(t.clone(), t);
        }
        assert_eq!(t.leaves(), 16);
        assert_eq!(t.sym(), 15);
    }

    #[test]
    fn phylo_shape_examples() {
        let t: PhyloTree = "((1,2),(3,4))".parse().unwrap();
        assert_eq!(t.shape(), perfect4());
        assert_eq!(t.sym(), 3);
        let c: PhyloTree = "(((1,2),3),4)".parse().unwrap();
        assert_eq!(c.shape(), caterpillar(4));
        assert_eq!(c.sym(), 1);
    }

    #[test]
    fn phylo_equality_ignores_child_order() {
        let a: PhyloTree = "((1,2),(3,4))".parse().unwrap();
        let b: PhyloTree = "((4,3),(2,1))".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn isomorphism_examples() {
        let a: PhyloTree = "((1,2),(3,4))".parse().unwrap();
        let b: PhyloTree = "((1,3),(2,4))".parse().unwrap();
        let c: PhyloTree = "(((1,2),3),4)".parse().unwrap();
        assert!(isomorphic(&a, &a).unwrap());
        assert!(isomorphic(&a, &b).unwrap());
        assert!(!isomorphic(&a, &c).unwrap());
        let small: PhyloTree = "(1,2)".parse().unwrap();
        assert!(isomorphic(&a, &small).is_err());
    }

    #[test]
    fn phylo_label_validation() {
        assert!("((1,2),(3,5))".parse::<PhyloTree>().is_err());
        assert!("((1,2),(3,3))".parse::<PhyloTree>().is_err());
        assert!("((1,2),(0,3))".parse::<PhyloTree>().is_err());
    }

    #[test]
    fn enumerate_phylo_counts_and_shapes() {
        for n in 1..=6 {
            let trees = enumerate_phylo(n, 8).unwrap();
            assert_eq!(BigUint::from(trees.len()), count_phylo(n));
            let keys: BTreeSet<String> = trees.iter().map(phylo_key).collect();
            assert_eq!(keys.len(), trees.len());
        }
        // the 15 labeled trees of size 4 fall into exactly 2 shape classes
        let trees = enumerate_phylo(4, 8).unwrap();
        let shapes: BTreeSet<String> = trees.iter().map(|t| t.shape().to_string()).collect();
        assert_eq!(shapes.len(), 2);
    }
}
