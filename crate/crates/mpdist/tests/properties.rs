//! Property-based cross-checks over randomly generated instances.

use proptest::prelude::*;

use mpdist::gen::default_taxa;
use mpdist::newick::{parse_newick, write_newick};
use mpdist::oracle::SetPartitions;
use mpdist::parsimony::{induced_forest, parsimony_score, Character};
use mpdist::tree::{random_tree, trees_equal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newick_round_trip(n in 4usize..16, seed in 0u64..10_000) {
        let taxa = default_taxa(n);
        let t = random_tree(&taxa, seed).unwrap();
        let reparsed = parse_newick(&write_newick(&t)).unwrap();
        prop_assert!(trees_equal(&t, &reparsed).unwrap());
        prop_assert_eq!(write_newick(&t), write_newick(&reparsed));
    }

    #[test]
    fn optimal_extension_has_score_plus_one_components(
        n in 4usize..12,
        seed in 0u64..10_000,
        states in 2usize..5,
    ) {
        let taxa = default_taxa(n);
        let t = random_tree(&taxa, seed).unwrap();
        let pairs: Vec<(String, usize)> = taxa
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), (seed as usize + i * 7) % states))
            .collect();
        let chi = Character::from_pairs(&pairs).unwrap();
        let (score, phi) = parsimony_score(&t, &chi).unwrap();
        let forest = induced_forest(&t, &phi).unwrap();
        prop_assert_eq!(forest.components.len(), score + 1);
    }

    #[test]
    fn partition_counts_match_bell(n in 1usize..9) {
        // Bell numbers via the Bell triangle.
        let mut row = vec![1u64];
        let mut bell = 1u64;
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            bell = *next.last().unwrap();
            row = next;
        }
        let count = SetPartitions::new(n).count() as u64;
        prop_assert_eq!(count, bell);
    }

    #[test]
    fn character_restriction_never_increases_score(
        n in 6usize..12,
        seed in 0u64..10_000,
        states in 2usize..4,
    ) {
        let taxa = default_taxa(n);
        let t = random_tree(&taxa, seed).unwrap();
        let pairs: Vec<(String, usize)> = taxa
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), (seed as usize / 3 + i * 5) % states))
            .collect();
        let chi = Character::from_pairs(&pairs).unwrap();
        let (full, _) = parsimony_score(&t, &chi).unwrap();
        let sub: Vec<String> = taxa[..n - 2].to_vec();
        let (restricted, _) = t.induced_subtree(&sub).unwrap();
        let chi_r = chi.restrict(&sub).unwrap();
        let (partial, _) = parsimony_score(&restricted, &chi_r).unwrap();
        prop_assert!(partial <= full);
    }
}
