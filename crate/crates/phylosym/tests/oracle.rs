//! Brute-force enumeration as the ground truth for the series recursions,
//! plus property-based structural invariants.

use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phylosym::sample::{sample_phylo, unrank_otter, UTable};
use phylosym::series::{bivariate_f, otter_counts};
use phylosym::tree::{
    count_phylo, enumerate_shapes, factorial, PhyloTree, Shape,
};

#[test]
fn series_recursion_equals_enumeration_to_12() {
    let f = bivariate_f(12);
    let u = otter_counts(12);
    for n in 1..=12usize {
        let table = enumerate_shapes(n).unwrap();
        assert_eq!(BigUint::from(table.entries.len()), u[n], "u_{n}");
        assert_eq!(f.row_sum(n), u[n]);

        let mut by_sym = vec![BigUint::zero(); n];
        let mut labelings = BigUint::zero();
        for e in &table.entries {
            by_sym[e.sym as usize] += 1u32;
            labelings += &e.labelings;
        }
        while by_sym.last().is_some_and(Zero::is_zero) {
            by_sym.pop();
        }
        assert_eq!(f.poly(n), by_sym.as_slice(), "f_{n}(u) coefficients");
        assert_eq!(labelings, count_phylo(n), "sum of w(t) at n={n}");
        assert_eq!(table.total_labelings(), count_phylo(n));
    }
}

#[test]
fn labelings_are_consistent_with_sym() {
    let table = enumerate_shapes(9).unwrap();
    for e in &table.entries {
        assert_eq!(&e.labelings << e.sym, factorial(9));
    }
}

fn shape_strategy() -> impl Strategy<Value = Shape> {
    let leaf = Just(Shape::leaf());
    leaf.prop_recursive(6, 64, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| Shape::join(a, b))
    })
}

proptest! {
    #[test]
    fn join_is_order_insensitive(a in shape_strategy(), b in shape_strategy()) {
        prop_assert_eq!(Shape::join(a.clone(), b.clone()), Shape::join(b, a));
    }

    #[test]
    fn shape_text_roundtrips(s in shape_strategy()) {
        let text = s.to_string();
        let back: Shape = text.parse().unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn shape_invariants(s in shape_strategy()) {
        let n = s.leaves() as u64;
        prop_assert!(u64::from(s.sym()) <= n.saturating_sub(1));
        // w(t)·2^sym = n!
        prop_assert_eq!(s.labeling_count() << s.sym(), factorial(n as usize));
    }

    #[test]
    fn sampled_phylo_roundtrips(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample_phylo(n, &mut rng);
        prop_assert!(t.validate().is_ok());
        prop_assert_eq!(t.n(), n);
        let back: PhyloTree = t.to_string().parse().unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.shape(), t.shape());
    }

    #[test]
    fn relabeling_preserves_shape(seed in any::<u64>(), n in 2usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample_phylo(n, &mut rng);
        // rotate labels: i → i mod n + 1
        fn rotate(t: &PhyloTree, n: u32) -> PhyloTree {
            match t {
                PhyloTree::Leaf(l) => PhyloTree::Leaf(l % n + 1),
                PhyloTree::Branch(a, b) => PhyloTree::branch(rotate(a, n), rotate(b, n)),
            }
        }
        let r = rotate(&t, n as u32);
        prop_assert!(r.validate().is_ok());
        prop_assert_eq!(r.shape(), t.shape());
        prop_assert_eq!(r.sym(), t.sym());
    }

    #[test]
    fn unrank_agrees_with_enumeration(n in 2usize..=14, pick in any::<u64>()) {
        let table = UTable::new(14);
        let shapes = enumerate_shapes(n).unwrap();
        let idx = (pick % shapes.entries.len() as u64) as usize;
        let rank = BigUint::from(idx);
        let s = unrank_otter(n, &rank, &table).unwrap();
        prop_assert_eq!(&s, &shapes.entries[idx].shape);
        prop_assert_eq!(s.sym(), shapes.entries[idx].sym);
    }
}
