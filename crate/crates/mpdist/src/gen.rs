//! Deterministic instance generators for tests and the CLI.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{caterpillar, random_tree_with_rng, random_tbr_move_with_rng, PhyloTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Two independent uniformly random topologies.
    Random,
    /// A random tree and the result of `moves` random TBR moves on it,
    /// so d_TBR (and hence d_MP) is at most `moves`.
    TbrWalk { moves: usize },
    /// k conflicting 4-leaf gadgets attached at distinct backbone positions
    /// in both trees; gadget quartets are spanning-disjoint in both.
    GluedQuartets { k: usize },
    /// A caterpillar against the same caterpillar with its two end taxa
    /// exchanged: no common cherry, one long shared interior chain.
    CaterpillarVariant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub generator: Generator,
    pub seed: u64,
}

/// Zero-padded taxa names so numeric and lexicographic order agree.
pub fn default_taxa(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (0..n).map(|i| format!("t{:0width$}", i, width = width)).collect()
}

/// k conflicting quartet gadgets on a shared backbone with two cap leaves.
///
/// Gadget i is ((a_i,b_i),(c_i,d_i)) in T1 and ((a_i,c_i),(b_i,d_i)) in T2;
/// n = 4k + 2. The construction is deterministic; the seed is unused.
pub fn glued_quartets(k: usize, _seed: u64) -> Result<(PhyloTree, PhyloTree)> {
    if k < 1 {
        return Err(Error::BadSpec("glued-quartets needs k >= 1".into()));
    }
    let build = |swap: bool| -> Result<PhyloTree> {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut labels: Vec<(usize, String)> = Vec::new();
        let mut next = 0usize;
        let mut fresh = |labels: &mut Vec<(usize, String)>, l: Option<String>| {
            let id = next;
            next += 1;
            if let Some(l) = l {
                labels.push((id, l));
            }
            id
        };
        // Backbone vertices v_1..v_k; caps z1, z2 at the ends.
        let backbone: Vec<usize> = (0..k).map(|_| fresh(&mut labels, None)).collect();
        for w in backbone.windows(2) {
            edges.push((w[0], w[1]));
        }
        let z1 = fresh(&mut labels, Some("z1".to_string()));
        let z2 = fresh(&mut labels, Some("z2".to_string()));
        edges.push((backbone[0], z1));
        edges.push((backbone[k - 1], z2));
        for (i, &v) in backbone.iter().enumerate() {
            let g = i + 1;
            let root = fresh(&mut labels, None);
            let ch1 = fresh(&mut labels, None);
            let ch2 = fresh(&mut labels, None);
            edges.push((v, root));
            edges.push((root, ch1));
            edges.push((root, ch2));
            let a = fresh(&mut labels, Some(format!("a_{}", g)));
            let b = fresh(&mut labels, Some(format!("b_{}", g)));
            let c = fresh(&mut labels, Some(format!("c_{}", g)));
            let d = fresh(&mut labels, Some(format!("d_{}", g)));
            if swap {
                // T2 topology: a with c, b with d.
                edges.push((ch1, a));
                edges.push((ch1, c));
                edges.push((ch2, b));
                edges.push((ch2, d));
            } else {
                edges.push((ch1, a));
                edges.push((ch1, b));
                edges.push((ch2, c));
                edges.push((ch2, d));
            }
        }
        let (t, _) = PhyloTree::from_edges(&edges, &labels)?;
        Ok(t)
    };
    Ok((build(false)?, build(true)?))
}

/// Graft a new leaf next to `target` (subdividing its pendant edge), so
/// {target, new_label} becomes a cherry.
pub fn attach_cherry(t: &PhyloTree, target: &str, new_label: &str) -> Result<PhyloTree> {
    let v = t
        .taxon_id(target)
        .ok_or_else(|| Error::UnknownTaxon(target.to_string()))?;
    if t.taxon_id(new_label).is_some() {
        return Err(Error::DuplicateTaxon(new_label.to_string()));
    }
    let p = t.neighbors(v)[0];
    let mid = t.n_vertices();
    let leaf = mid + 1;
    let mut edges: Vec<(usize, usize)> = t
        .edges()
        .into_iter()
        .filter(|&(a, b)| !((a, b) == (v.min(p), v.max(p))))
        .collect();
    edges.push((v, mid));
    edges.push((mid, p));
    edges.push((mid, leaf));
    let mut labels: Vec<(usize, String)> = (0..t.n_taxa())
        .map(|i| (i, t.label(i).to_string()))
        .collect();
    labels.push((leaf, new_label.to_string()));
    let (out, _) = PhyloTree::from_edges(&edges, &labels)?;
    Ok(out)
}

/// A pair guaranteed to be reducible: a random distinct pair on n-1 taxa with
/// one extra leaf grafted as a common cherry in both trees.
pub fn reducible_pair(n: usize, seed: u64) -> Result<(PhyloTree, PhyloTree)> {
    if n < 6 {
        return Err(Error::BadSpec("reducible pairs need n >= 6".into()));
    }
    let base = default_taxa(n);
    let core: Vec<String> = base[..n - 1].to_vec();
    let extra = &base[n - 1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t1 = random_tree_with_rng(&core, &mut rng)?;
    let t2 = random_tree_with_rng(&core, &mut rng)?;
    let target = core[0].clone();
    Ok((
        attach_cherry(&t1, &target, extra)?,
        attach_cherry(&t2, &target, extra)?,
    ))
}

pub fn generate_instance(spec: &InstanceSpec) -> Result<(PhyloTree, PhyloTree)> {
    match spec.generator {
        Generator::Random => {
            if spec.n < 4 {
                return Err(Error::BadSpec("random pairs need n >= 4".into()));
            }
            let taxa = default_taxa(spec.n);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let t1 = random_tree_with_rng(&taxa, &mut rng)?;
            let t2 = random_tree_with_rng(&taxa, &mut rng)?;
            Ok((t1, t2))
        }
        Generator::TbrWalk { moves } => {
            if spec.n < 4 {
                return Err(Error::BadSpec("tbr-walk needs n >= 4".into()));
            }
            let taxa = default_taxa(spec.n);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let t1 = random_tree_with_rng(&taxa, &mut rng)?;
            let mut t2 = t1.clone();
            for _ in 0..moves {
                t2 = random_tbr_move_with_rng(&t2, &mut rng)?;
            }
            Ok((t1, t2))
        }
        Generator::GluedQuartets { k } => {
            if spec.n != 4 * k + 2 {
                return Err(Error::BadSpec(format!(
                    "glued-quartets with k = {} has n = {}, not {}",
                    k,
                    4 * k + 2,
                    spec.n
                )));
            }
            glued_quartets(k, spec.seed)
        }
        Generator::CaterpillarVariant => {
            if spec.n < 6 {
                return Err(Error::BadSpec("caterpillar variant needs n >= 6".into()));
            }
            let taxa = default_taxa(spec.n);
            let t1 = caterpillar(&taxa)?;
            let mut swapped = taxa.clone();
            swapped.swap(0, spec.n - 1);
            let t2 = caterpillar(&swapped)?;
            Ok((t1, t2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_dtbr, DTBR_CAP};
    use crate::tree::{is_conflicting_quartet, trees_equal};

    #[test]
    fn glued_quartets_shape() {
        for k in [1usize, 2, 3] {
            let (t1, t2) = glued_quartets(k, 0).unwrap();
            assert_eq!(t1.n_taxa(), 4 * k + 2);
            assert!(t1.same_leaf_set(&t2));
            assert!(!trees_equal(&t1, &t2).unwrap());
            let gadgets: Vec<Vec<String>> = (1..=k)
                .map(|g| {
                    ["a", "b", "c", "d"]
                        .iter()
                        .map(|p| format!("{}_{}", p, g))
                        .collect()
                })
                .collect();
            for gad in &gadgets {
                assert!(is_conflicting_quartet(&t1, &t2, gad).unwrap());
            }
            assert!(t1.are_spanning_disjoint(&gadgets).unwrap());
            assert!(t2.are_spanning_disjoint(&gadgets).unwrap());
        }
    }

    #[test]
    fn tbr_walk_bounds_dtbr() {
        let spec = InstanceSpec {
            n: 7,
            generator: Generator::TbrWalk { moves: 2 },
            seed: 9,
        };
        let (t1, t2) = generate_instance(&spec).unwrap();
        let (d, _) = exact_dtbr(&t1, &t2, DTBR_CAP).unwrap();
        assert!(d <= 2);
    }

    #[test]
    fn random_pairs_hit_equal_and_distinct() {
        let mut saw_equal = false;
        let mut saw_distinct = false;
        for seed in 0..40 {
            let spec = InstanceSpec {
                n: 4,
                generator: Generator::Random,
                seed,
            };
            let (t1, t2) = generate_instance(&spec).unwrap();
            if trees_equal(&t1, &t2).unwrap() {
                saw_equal = true;
            } else {
                saw_distinct = true;
            }
        }
        assert!(saw_equal && saw_distinct);
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = InstanceSpec {
            n: 9,
            generator: Generator::Random,
            seed: 1234,
        };
        let (a1, a2) = generate_instance(&spec).unwrap();
        let (b1, b2) = generate_instance(&spec).unwrap();
        assert!(trees_equal(&a1, &b1).unwrap());
        assert!(trees_equal(&a2, &b2).unwrap());
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(
            generate_instance(&InstanceSpec {
                n: 3,
                generator: Generator::Random,
                seed: 0
            }),
            Err(Error::BadSpec(_))
        ));
        assert!(matches!(
            generate_instance(&InstanceSpec {
                n: 7,
                generator: Generator::GluedQuartets { k: 2 },
                seed: 0
            }),
            Err(Error::BadSpec(_))
        ));
    }
}
