//! Kernel pipeline: alpha parameters, spanning-disjoint partitions,
//! well-behaved block selection, conflicting quartets and the two-state
//! witness character.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::parsimony::{induced_forest, parsimony_score, Character};
use crate::reduction::{find_common_chain, find_common_cherry};
use crate::tree::{is_conflicting_quartet, trees_equal, PhyloTree, Quartet, VertexId};

/// Degree bounds with the derived kernel constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelParams {
    pub d1: usize,
    pub d2: usize,
    /// Block-size floor: 9(d1+d2) - 11.
    pub c: usize,
    /// Blocks needed per distance unit: ceil((2*d1*d2 + d1) / (d1*d2 - d1 - d2)).
    pub t_factor: usize,
    /// Kernel constant: 2 * c * t_factor.
    pub alpha: usize,
}

/// Default degree bounds: the alpha-minimizing choice over [2,9]^2.
pub const DEFAULT_D1: usize = 4;
pub const DEFAULT_D2: usize = 5;
/// alpha at the optimal (4,5): the kernel is 560k taxa.
pub const ALPHA: usize = 560;

pub fn alpha_constant(d1: usize, d2: usize) -> Result<KernelParams> {
    if d1 < 2 || d2 < 2 || d1 * d2 <= d1 + d2 {
        return Err(Error::DegenerateDegrees { d1, d2 });
    }
    let c = 9 * (d1 + d2) - 11;
    let num = 2 * d1 * d2 + d1;
    let den = d1 * d2 - d1 - d2;
    let t_factor = (num + den - 1) / den;
    let alpha = 2 * c * t_factor;
    Ok(KernelParams {
        d1,
        d2,
        c,
        t_factor,
        alpha,
    })
}

/// A partition of the taxon set into nonempty blocks.
#[derive(Debug, Clone)]
pub struct Partition {
    pub blocks: Vec<Vec<String>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Peel `t` spanning-disjoint blocks of size >= c off `t1`.
///
/// Each round roots the remaining induced subtree at its smallest taxon,
/// takes a lowest vertex with at least c leaf descendants (ties by smallest
/// descendant taxon) and peels its descendant set, which has size < 2c; the
/// final block absorbs the remainder.
pub fn build_partition(t1: &PhyloTree, c: usize, t: usize) -> Result<Partition> {
    let n = t1.n_taxa();
    if t < 1 || n < 2 * c * t {
        return Err(Error::TooFewTaxa {
            need: 2 * c * t.max(1),
            have: n,
        });
    }
    let mut remaining: Vec<String> = t1.taxa().to_vec();
    let mut blocks = Vec::with_capacity(t);
    for _ in 0..t - 1 {
        let (cur, _) = t1.induced_subtree(&remaining)?;
        // Root at the smallest remaining taxon's pendant edge (leaf 0).
        let (parent, order) = cur.bfs_parents(0);
        let mut cnt = vec![0usize; cur.n_vertices()];
        let mut min_taxon: Vec<Option<String>> = vec![None; cur.n_vertices()];
        for &v in order.iter().rev() {
            if cur.is_leaf(v) && v != 0 {
                cnt[v] = 1;
                min_taxon[v] = Some(cur.label(v).to_string());
            }
            if let Some(p) = parent[v] {
                cnt[p] += cnt[v];
                if let Some(m) = &min_taxon[v] {
                    if min_taxon[p].as_ref().map_or(true, |pm| m < pm) {
                        min_taxon[p] = Some(m.clone());
                    }
                }
            }
        }
        // Lowest vertex with >= c descendants: no child reaches c.
        let mut best: Option<(String, VertexId)> = None;
        for v in 0..cur.n_vertices() {
            if v == 0 || cnt[v] < c {
                continue;
            }
            let children_small = cur
                .neighbors(v)
                .iter()
                .all(|&w| parent[w] != Some(v) || cnt[w] < c);
            if !children_small {
                continue;
            }
            let key = min_taxon[v].clone().unwrap();
            if best.as_ref().map_or(true, |(bk, _)| key < *bk) {
                best = Some((key, v));
            }
        }
        let (_, u) = best.expect("remainder always exceeds 2c taxa");
        // Descendant leaves of u.
        let mut block = Vec::new();
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            if cur.is_leaf(v) && v != 0 {
                block.push(cur.label(v).to_string());
            }
            for &w in cur.neighbors(v) {
                if parent[w] == Some(v) {
                    stack.push(w);
                }
            }
        }
        block.sort();
        debug_assert!(block.len() >= c && block.len() < 2 * c);
        let in_block: BTreeSet<&String> = block.iter().collect();
        remaining.retain(|l| !in_block.contains(l));
        blocks.push(block);
    }
    blocks.push(remaining);
    Ok(Partition { blocks })
}

/// chi(x) = i iff x lies in block i.
pub fn character_from_partition(p: &Partition) -> Result<Character> {
    Character::from_classes(&p.blocks)
}

/// Outcome of well-behaved block selection.
#[derive(Debug, Clone)]
pub enum WellBehaved {
    /// The partition character itself already witnesses distance >= k.
    Witness(Character),
    /// Indices of k blocks that equal forest blocks of T2 and meet both
    /// degree bounds; spanning-disjoint in both trees.
    Indices(Vec<usize>),
}

pub fn select_well_behaved(
    t1: &PhyloTree,
    t2: &PhyloTree,
    p: &Partition,
    params: &KernelParams,
    k: usize,
) -> Result<WellBehaved> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let t = p.len();
    if t < params.t_factor * k {
        return Err(Error::TooFewBlocks {
            need: params.t_factor * k,
            have: t,
        });
    }
    let chi = character_from_partition(p)?;
    let (ps1, _) = parsimony_score(t1, &chi)?;
    let (ps2, phi2) = parsimony_score(t2, &chi)?;
    if ps2 >= ps1 + k {
        return Ok(WellBehaved::Witness(chi));
    }
    // Blocks P_j: taxa classes of the forest induced by the optimal phi2.
    let forest = induced_forest(t2, &phi2)?;
    let mut pblocks: Vec<BTreeSet<String>> = Vec::new();
    for comp in &forest.components {
        let taxa: BTreeSet<String> = comp
            .iter()
            .filter(|&&v| t2.is_leaf(v))
            .map(|&v| t2.label(v).to_string())
            .collect();
        if !taxa.is_empty() {
            pblocks.push(taxa);
        }
    }
    let mut indices = Vec::new();
    for (i, block) in p.blocks.iter().enumerate() {
        let set: BTreeSet<String> = block.iter().cloned().collect();
        if !pblocks.iter().any(|pb| *pb == set) {
            continue;
        }
        if t1.set_degree(block)? > params.d1 {
            continue;
        }
        if t2.set_degree(block)? > params.d2 {
            continue;
        }
        indices.push(i);
        if indices.len() == k {
            break;
        }
    }
    if indices.len() < k {
        return Err(Error::InternalBoundViolation(format!(
            "only {} well-behaved blocks, need {}",
            indices.len(),
            k
        )));
    }
    Ok(WellBehaved::Indices(indices))
}

/// A quartet of S over which the two trees disagree, by greedy leaf deletion.
/// Returns the quartet with its T1 topology.
pub fn find_conflicting_quartet(
    t1: &PhyloTree,
    t2: &PhyloTree,
    s: &[String],
) -> Result<Quartet> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let mut cur: Vec<String> = s.to_vec();
    cur.sort();
    cur.dedup();
    if cur.len() < 4 {
        return Err(Error::NoConflict);
    }
    let differ = |set: &[String]| -> Result<bool> {
        let (i1, _) = t1.induced_subtree(set)?;
        let (i2, _) = t2.induced_subtree(set)?;
        Ok(!trees_equal(&i1, &i2)?)
    };
    if !differ(&cur)? {
        return Err(Error::NoConflict);
    }
    while cur.len() > 4 {
        let mut removed = false;
        for i in 0..cur.len() {
            let mut cand = cur.clone();
            cand.remove(i);
            if differ(&cand)? {
                cur = cand;
                removed = true;
                break;
            }
        }
        // A conflicting quartet survives inside any unequal pair, so some
        // leaf outside it is always removable.
        assert!(removed, "no removable leaf in an unequal induced pair");
    }
    t1.quartet_topology(&cur)
}

/// The testable form of the small-degree size bound: on an irreducible
/// instance with both set degrees within bounds, equal induced subtrees force
/// |S| <= 9(d1+d2) - 12.
pub fn irreducible_bound_check(
    t1: &PhyloTree,
    t2: &PhyloTree,
    s: &[String],
    d1: usize,
    d2: usize,
) -> Result<bool> {
    let (i1, _) = t1.induced_subtree(s)?;
    let (i2, _) = t2.induced_subtree(s)?;
    if !trees_equal(&i1, &i2)? {
        return Ok(true);
    }
    Ok(s.len() <= 9 * (d1 + d2) - 12)
}

/// Junction of three leaves: the unique vertex on all three pairwise paths.
fn median(t: &PhyloTree, a: VertexId, b: VertexId, c: VertexId) -> VertexId {
    let pab: BTreeSet<VertexId> = t.path_vertices(a, b).into_iter().collect();
    let pac = t.path_vertices(a, c);
    *pac.iter()
        .rev()
        .find(|v| pab.contains(v))
        .expect("paths from a common endpoint intersect")
}

/// Two-state character flipping across one chosen edge per quartet.
///
/// For k pairwise spanning-disjoint conflicting quartets this yields
/// PS(chi, T1) <= k and PS(chi, T2) >= 2k.
pub fn build_quartet_character(
    t1: &PhyloTree,
    t2: &PhyloTree,
    quartets: &[Quartet],
) -> Result<Character> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let blocks: Vec<Vec<String>> = quartets.iter().map(|q| q.taxa()).collect();
    for q in quartets {
        if !is_conflicting_quartet(t1, t2, &q.taxa())? {
            return Err(Error::NotConflicting(q.taxa()));
        }
    }
    for (which, t) in [(1usize, t1), (2usize, t2)] {
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !t.are_spanning_disjoint(&[blocks[i].clone(), blocks[j].clone()])? {
                    return Err(Error::NotSpanningDisjoint {
                        tree: which,
                        first: blocks[i].clone(),
                        second: blocks[j].clone(),
                    });
                }
            }
        }
    }
    // One flip edge per quartet: the first edge from the {a,b} junction
    // toward the {c,d} junction in T1.
    let mut flip: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for q in quartets {
        let t1_split = t1.quartet_topology(&q.taxa())?;
        let [p_ab, p_cd] = t1_split.split().clone();
        let a = t1.taxon_id(&p_ab[0]).unwrap();
        let b = t1.taxon_id(&p_ab[1]).unwrap();
        let c = t1.taxon_id(&p_cd[0]).unwrap();
        let d = t1.taxon_id(&p_cd[1]).unwrap();
        let j_ab = median(t1, a, b, c);
        let j_cd = median(t1, c, d, a);
        let path = t1.path_vertices(j_ab, j_cd);
        let (u, v) = (path[0], path[1]);
        flip.insert((u.min(v), u.max(v)));
    }
    assert_eq!(flip.len(), quartets.len(), "flip edges must be distinct");
    // Breadth-first color sweep from the smallest taxon's leaf.
    let (parent, order) = t1.bfs_parents(0);
    let mut color = vec![0usize; t1.n_vertices()];
    for &v in &order[1..] {
        let p = parent[v].unwrap();
        let e = (p.min(v), p.max(v));
        color[v] = if flip.contains(&e) {
            1 - color[p]
        } else {
            color[p]
        };
    }
    let pairs: Vec<(String, usize)> = t1
        .taxa()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), color[i]))
        .collect();
    Character::from_pairs(&pairs)
}

/// True iff neither reduction rule applies (floor-aware cherry check).
pub fn is_irreducible(t1: &PhyloTree, t2: &PhyloTree) -> Result<bool> {
    if t1.n_taxa() > 4 && find_common_cherry(t1, t2)?.is_some() {
        return Ok(false);
    }
    Ok(find_common_chain(t1, t2)?.is_none())
}

/// The constructive kernel guarantee: on an irreducible pair with
/// |X| >= alpha * k, produce a character of distance >= k, Fitch-verified.
pub fn kernel_witness(
    t1: &PhyloTree,
    t2: &PhyloTree,
    k: usize,
    params: &KernelParams,
) -> Result<Character> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    if !is_irreducible(t1, t2)? {
        return Err(Error::PreconditionViolated(
            "instance is reducible; apply the reduction rules first".into(),
        ));
    }
    if t1.n_taxa() < params.alpha * k {
        return Err(Error::PreconditionViolated(format!(
            "need at least {} taxa for k = {}, have {}",
            params.alpha * k,
            k,
            t1.n_taxa()
        )));
    }
    if k == 0 {
        return Character::constant(t1.taxa());
    }
    let t = params.t_factor * k;
    let p = build_partition(t1, params.c, t)?;
    let chi = match select_well_behaved(t1, t2, &p, params, k)? {
        WellBehaved::Witness(chi) => chi,
        WellBehaved::Indices(indices) => {
            let mut quartets = Vec::with_capacity(k);
            for &i in &indices {
                quartets.push(find_conflicting_quartet(t1, t2, &p.blocks[i])?);
            }
            build_quartet_character(t1, t2, &quartets)?
        }
    };
    let (s1, _) = parsimony_score(t1, &chi)?;
    let (s2, _) = parsimony_score(t2, &chi)?;
    if s1.abs_diff(s2) < k {
        return Err(Error::InternalBoundViolation(format!(
            "witness verification failed: |{} - {}| < {}",
            s1, s2, k
        )));
    }
    Ok(chi)
}

/// Number of blocks whose set degree in `t` exceeds `d`.
pub fn degree_excess_count(t: &PhyloTree, p: &Partition, d: usize) -> Result<usize> {
    for i in 0..p.blocks.len() {
        for j in i + 1..p.blocks.len() {
            if !t.are_spanning_disjoint(&[p.blocks[i].clone(), p.blocks[j].clone()])? {
                return Err(Error::NotSpanningDisjoint {
                    tree: 1,
                    first: p.blocks[i].clone(),
                    second: p.blocks[j].clone(),
                });
            }
        }
    }
    let mut count = 0;
    for b in &p.blocks {
        if t.set_degree(b)? > d {
            count += 1;
        }
    }
    Ok(count)
}
