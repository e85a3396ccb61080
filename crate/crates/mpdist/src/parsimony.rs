//! Characters, extensions, Fitch scoring and induced forests.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tree::{PhyloTree, VertexId};

/// A character: a total assignment of taxa to states, states dense `0..t`.
///
/// Equivalently a partition of the taxon set into `t` nonempty classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    assignment: BTreeMap<String, usize>,
    num_states: usize,
}

impl Character {
    /// Build from (taxon, state id) pairs. State ids are compacted densely,
    /// preserving their ascending order, so the result is independent of pair
    /// order.
    pub fn from_pairs(pairs: &[(String, usize)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut raw: BTreeMap<String, usize> = BTreeMap::new();
        for (t, s) in pairs {
            if raw.insert(t.clone(), *s).is_some() {
                return Err(Error::DuplicateTaxon(t.clone()));
            }
        }
        let distinct: BTreeSet<usize> = raw.values().copied().collect();
        let remap: BTreeMap<usize, usize> = distinct
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let assignment: BTreeMap<String, usize> =
            raw.into_iter().map(|(t, s)| (t, remap[&s])).collect();
        Ok(Character {
            num_states: remap.len(),
            assignment,
        })
    }

    /// Build from explicit state classes; class index = state id.
    pub fn from_classes(classes: &[Vec<String>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::EmptySet);
            }
            for t in class {
                pairs.push((t.clone(), i));
            }
        }
        Character::from_pairs(&pairs)
    }

    /// The constant (single-state) character over the given taxa.
    pub fn constant(taxa: &[String]) -> Result<Self> {
        Character::from_pairs(&taxa.iter().map(|t| (t.clone(), 0)).collect::<Vec<_>>())
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn state(&self, taxon: &str) -> Option<usize> {
        self.assignment.get(taxon).copied()
    }

    pub fn taxa(&self) -> impl Iterator<Item = &String> {
        self.assignment.keys()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// State classes S_0..S_{t-1}, each sorted.
    pub fn classes(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (t, &s) in &self.assignment {
            out[s].push(t.clone());
        }
        out
    }

    /// Restrict to a subset of taxa, recompacting states.
    pub fn restrict(&self, taxa: &[String]) -> Result<Self> {
        let mut pairs = Vec::new();
        for t in taxa {
            let s = self
                .assignment
                .get(t)
                .ok_or_else(|| Error::UnknownTaxon(t.clone()))?;
            pairs.push((t.clone(), *s));
        }
        Character::from_pairs(&pairs)
    }

    /// True iff assigned on exactly the leaf set of `t`.
    pub fn is_total_on(&self, t: &PhyloTree) -> bool {
        self.assignment.len() == t.n_taxa()
            && t.taxa().iter().all(|l| self.assignment.contains_key(l))
    }

    /// Serialize as "taxon,state" CSV lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (t, s) in &self.assignment {
            out.push_str(&format!("{},{}\n", t, s));
        }
        out
    }
}

/// A total state assignment on the vertices of a specific tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub states: Vec<usize>,
}

impl Extension {
    pub fn state(&self, v: VertexId) -> usize {
        self.states[v]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (v, s) in self.states.iter().enumerate() {
            out.push_str(&format!("{},{}\n", v, s));
        }
        out
    }
}

/// Connected components of the host tree after deleting bichromatic edges.
#[derive(Debug, Clone)]
pub struct InducedForest {
    pub components: Vec<BTreeSet<VertexId>>,
}

/// Number of bichromatic edges of `phi` on `t`.
pub fn delta(t: &PhyloTree, phi: &Extension) -> Result<usize> {
    if phi.states.len() != t.n_vertices() {
        return Err(Error::PartialExtension);
    }
    Ok(t.edges()
        .iter()
        .filter(|&&(a, b)| phi.states[a] != phi.states[b])
        .count())
}

fn check_character(t: &PhyloTree, chi: &Character) -> Result<()> {
    if !chi.is_total_on(t) {
        return Err(Error::PartialCharacter);
    }
    Ok(())
}

/// Parsimony score PS(chi, t) with a witnessing optimal extension.
///
/// Fitch's algorithm rooted at the leaf of the lexicographically smallest
/// taxon (vertex 0): bottom-up state-set pass counting unions, top-down pass
/// keeping the parent's state where possible, else the smallest state id.
pub fn parsimony_score(t: &PhyloTree, chi: &Character) -> Result<(usize, Extension)> {
    check_character(t, chi)?;
    let n = t.n_taxa();
    let nv = t.n_vertices();
    let leaf_state = |v: usize| chi.state(t.label(v)).unwrap();
    if n == 1 {
        return Ok((0, Extension { states: vec![leaf_state(0)] }));
    }
    if n == 2 {
        let (a, b) = (leaf_state(0), leaf_state(1));
        return Ok(((a != b) as usize, Extension { states: vec![a, b] }));
    }
    let words = (chi.num_states() + 63) / 64;
    let root = 0;
    let (parent, order) = t.bfs_parents(root);
    // Bottom-up: state sets as bitsets.
    let mut sets: Vec<Vec<u64>> = vec![vec![0u64; words]; nv];
    let mut score = 0usize;
    for &v in order.iter().rev() {
        if t.is_leaf(v) {
            let s = leaf_state(v);
            sets[v][s / 64] |= 1u64 << (s % 64);
            continue;
        }
        let kids: Vec<usize> = t
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| Some(v) == parent[w])
            .collect();
        let mut inter = sets[kids[0]].clone();
        let mut union = sets[kids[0]].clone();
        for &k in &kids[1..] {
            for w in 0..words {
                inter[w] &= sets[k][w];
                union[w] |= sets[k][w];
            }
        }
        if inter.iter().any(|&w| w != 0) {
            sets[v] = inter;
        } else {
            sets[v] = union;
            score += 1;
        }
    }
    // The root is a leaf with a single child; the child may disagree.
    let child_of_root = t.neighbors(root)[0];
    let rs = leaf_state(root);
    let root_in_child = sets[child_of_root][rs / 64] & (1u64 << (rs % 64)) != 0;
    if !root_in_child {
        score += 1;
    }
    // Top-down refinement.
    let mut states = vec![usize::MAX; nv];
    states[root] = rs;
    for &v in &order[1..] {
        let p = parent[v].unwrap();
        let ps = states[p];
        let in_set = sets[v][ps / 64] & (1u64 << (ps % 64)) != 0;
        states[v] = if in_set {
            ps
        } else {
            // Smallest state in the set.
            let mut s = 0;
            for (w, &word) in sets[v].iter().enumerate() {
                if word != 0 {
                    s = w * 64 + word.trailing_zeros() as usize;
                    break;
                }
            }
            s
        };
    }
    let phi = Extension { states };
    debug_assert_eq!(delta(t, &phi)?, score);
    Ok((score, phi))
}

/// |PS(chi, t1) - PS(chi, t2)|.
pub fn character_distance(t1: &PhyloTree, t2: &PhyloTree, chi: &Character) -> Result<usize> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let (s1, _) = parsimony_score(t1, chi)?;
    let (s2, _) = parsimony_score(t2, chi)?;
    Ok(s1.abs_diff(s2))
}

/// Components of `t` after deleting every bichromatic edge of `phi`.
pub fn induced_forest(t: &PhyloTree, phi: &Extension) -> Result<InducedForest> {
    if phi.states.len() != t.n_vertices() {
        return Err(Error::PartialExtension);
    }
    let nv = t.n_vertices();
    let mut comp = vec![usize::MAX; nv];
    let mut components = Vec::new();
    for start in 0..nv {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut verts = BTreeSet::new();
        let mut stack = vec![start];
        comp[start] = id;
        while let Some(v) = stack.pop() {
            verts.insert(v);
            for &w in t.neighbors(v) {
                if comp[w] == usize::MAX && phi.states[w] == phi.states[v] {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        components.push(verts);
    }
    Ok(InducedForest { components })
}

/// Check PS >= t-1 and the biconditional
/// (PS = t-1 iff the state classes are spanning-disjoint).
pub fn ps_lower_bound_check(t: &PhyloTree, chi: &Character) -> Result<(bool, bool)> {
    let (ps, _) = parsimony_score(t, chi)?;
    let tt = chi.num_states();
    let bound_holds = ps + 1 >= tt;
    let disjoint = t.are_spanning_disjoint(&chi.classes())?;
    let equality = ps + 1 == tt;
    Ok((bound_holds, equality == disjoint))
}
