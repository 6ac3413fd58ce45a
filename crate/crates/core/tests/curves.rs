//! Round trips and contraction on randomly generated curves.

use proptest::prelude::*;

use qmoduli::catalog::{
    random_a_stable_tree, random_chain, random_gk_shape, random_hassett_weight, realize_shape,
    seeded_rng,
};
use qmoduli::curves::{
    contract_gamma_i, is_isomorphic, lm_moduli_coordinates, moduli_coordinates, reconstruct_chain,
    reconstruct_tree, verify_functor_conditions, FamilyMode, PointedTree,
};
use qmoduli::index::IdxSet;

fn gk_tree(seed: u64, n: usize) -> PointedTree {
    let mut rng = seeded_rng(seed);
    realize_shape(&random_gk_shape(n, &mut rng), &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gk_coordinates_round_trip(seed in any::<u64>(), n in 3usize..=7) {
        let tree = gk_tree(seed, n);
        let family = moduli_coordinates(&tree, &FamilyMode::Gk).unwrap();
        prop_assert!(verify_functor_conditions(&family).passed());
        let back = reconstruct_tree(&family).unwrap();
        prop_assert!(is_isomorphic(&tree, &back));
        prop_assert_eq!(moduli_coordinates(&back, &FamilyMode::Gk).unwrap(), family);
    }

    #[test]
    fn contraction_preserves_charts(seed in any::<u64>(), n in 4usize..=7, mask in any::<u32>()) {
        let tree = gk_tree(seed, n);
        // keep marks 1..=3 plus a random nonempty subset of the rest
        let mut keep: IdxSet = (0..3).collect();
        for i in 3..n {
            if mask >> i & 1 == 1 {
                keep.insert(i);
            }
        }
        if keep.len() == 3 {
            keep.insert(n - 1);
        }
        let small = contract_gamma_i(&tree, keep).unwrap();
        prop_assert!(small.is_gk_stable());
        let kept: Vec<usize> = keep.iter().collect();
        for &a in &kept {
            for &b in &kept {
                for &c in &kept {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    let big = tree.contract_to_chart([a, b, c]);
                    let sub = small.contract_to_chart([a, b, c]);
                    prop_assert_eq!(big.is_some(), sub.is_some());
                    if let (Some(big), Some(sub)) = (big, sub) {
                        let restricted: Vec<_> = kept.iter().map(|&i| big.sections()[i].clone()).collect();
                        prop_assert_eq!(restricted, sub.sections().to_vec());
                    }
                }
            }
        }
    }

    #[test]
    fn hassett_coordinates_round_trip(seed in any::<u64>(), n in 3usize..=6) {
        let mut rng = seeded_rng(seed);
        let a = random_hassett_weight(n, &mut rng);
        let tree = random_a_stable_tree(&a, &mut rng);
        prop_assert!(tree.is_a_stable(&a));
        let mode = FamilyMode::Hassett { a };
        let family = moduli_coordinates(&tree, &mode).unwrap();
        let report = verify_functor_conditions(&family);
        prop_assert!(report.passed(), "{:?}", report.first_failure());
        let back = reconstruct_tree(&family).unwrap();
        prop_assert!(is_isomorphic(&tree, &back));
        prop_assert_eq!(moduli_coordinates(&back, &mode).unwrap(), family);
    }

    #[test]
    fn chains_round_trip(seed in any::<u64>(), n in 1usize..=7) {
        let chain = random_chain(n, &mut seeded_rng(seed));
        prop_assert!(chain.is_lm_stable());
        let family = lm_moduli_coordinates(&chain).unwrap();
        prop_assert!(verify_functor_conditions(&family).passed());
        let back = reconstruct_chain(&family).unwrap();
        prop_assert!(back.is_isomorphic(&chain));
        prop_assert_eq!(lm_moduli_coordinates(&back).unwrap(), family);
    }
}
