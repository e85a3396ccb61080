//! Cherry and chain reduction rules, reversible traces, character lifting.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::parsimony::{parsimony_score, Character};
use crate::tree::{PhyloTree, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Cherry,
    Chain,
}

/// One reduction step, with enough snapshot to undo it.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub kind: StepKind,
    /// Taxa removed by this step (cherry: [x]; chain: x5..xr).
    pub deleted: Vec<String>,
    /// Witness taxa kept (cherry: [y]; chain: x1..x4).
    pub retained: Vec<String>,
    /// The tree pair before the step.
    pub before: (PhyloTree, PhyloTree),
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub original: (PhyloTree, PhyloTree),
    pub reduced: (PhyloTree, PhyloTree),
}

/// Remove one leaf, suppressing the attachment vertex it leaves behind.
pub fn delete_leaf(t: &PhyloTree, label: &str) -> Result<PhyloTree> {
    let v = t
        .taxon_id(label)
        .ok_or_else(|| Error::UnknownTaxon(label.to_string()))?;
    if t.n_taxa() < 3 {
        return Err(Error::TooSmall(3));
    }
    let p = t.neighbors(v)[0];
    let mut edges: Vec<(usize, usize)> = t
        .edges()
        .into_iter()
        .filter(|&(a, b)| a != v && b != v)
        .collect();
    // p had degree 3; now 2 — suppress it.
    let nbrs: Vec<usize> = edges
        .iter()
        .filter_map(|&(a, b)| {
            if a == p {
                Some(b)
            } else if b == p {
                Some(a)
            } else {
                None
            }
        })
        .collect();
    if nbrs.len() == 2 {
        edges.retain(|&(a, b)| a != p && b != p);
        edges.push((nbrs[0], nbrs[1]));
    }
    let labels: Vec<(usize, String)> = (0..t.n_taxa())
        .filter(|&i| i != v)
        .map(|i| (i, t.label(i).to_string()))
        .collect();
    let (out, _) = PhyloTree::from_edges(&edges, &labels)?;
    Ok(out)
}

/// Cherries of a tree as sorted label pairs.
fn cherries(t: &PhyloTree) -> BTreeSet<(String, String)> {
    let n = t.n_taxa();
    let mut out = BTreeSet::new();
    if n < 3 {
        return out;
    }
    for v in n..t.n_vertices() {
        let leaves: Vec<&str> = t
            .neighbors(v)
            .iter()
            .filter(|&&w| t.is_leaf(w))
            .map(|&w| t.label(w))
            .collect();
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                let (a, b) = (leaves[i], leaves[j]);
                let p = if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
                out.insert(p);
            }
        }
    }
    out
}

/// Lexicographically smallest pair forming a cherry in both trees.
pub fn find_common_cherry(t1: &PhyloTree, t2: &PhyloTree) -> Result<Option<(String, String)>> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let c1 = cherries(t1);
    let c2 = cherries(t2);
    Ok(c1.intersection(&c2).next().cloned())
}

/// Attachment vertex (the unique internal neighbor) of each leaf.
fn attachments(t: &PhyloTree) -> Vec<VertexId> {
    (0..t.n_taxa()).map(|v| t.neighbors(v)[0]).collect()
}

/// Check that `seq` is a chain of leaves in `t`: attachment vertices form a
/// path, with equal consecutive attachments permitted only at the two ends.
/// The property is symmetric under reversal.
pub fn is_chain(t: &PhyloTree, seq: &[String]) -> Result<bool> {
    if seq.len() < 2 {
        return Ok(false);
    }
    let mut ids = Vec::with_capacity(seq.len());
    for l in seq {
        let v = t
            .taxon_id(l)
            .ok_or_else(|| Error::UnknownTaxon(l.clone()))?;
        ids.push(v);
    }
    let distinct: HashSet<_> = ids.iter().collect();
    if distinct.len() != ids.len() {
        return Ok(false);
    }
    let att = attachments(t);
    let p: Vec<VertexId> = ids.iter().map(|&v| att[v]).collect();
    let r = p.len();
    for i in 0..r - 1 {
        if p[i] == p[i + 1] {
            if i != 0 && i != r - 2 {
                return Ok(false);
            }
        } else if !t.neighbors(p[i]).contains(&p[i + 1]) {
            return Ok(false);
        }
    }
    // Distinct path vertices after collapsing the permitted end equalities.
    let mut dedup: Vec<VertexId> = Vec::new();
    for &q in &p {
        if dedup.last() != Some(&q) {
            dedup.push(q);
        }
    }
    let uniq: HashSet<_> = dedup.iter().collect();
    Ok(uniq.len() == dedup.len())
}

/// DFS state for extending a chain simultaneously in both trees.
struct ChainScan<'a> {
    t1: &'a PhyloTree,
    t2: &'a PhyloTree,
    att1: Vec<VertexId>,
    att2: Vec<VertexId>,
    found: BTreeSet<Vec<String>>,
}

impl<'a> ChainScan<'a> {
    /// Leaves that can legally follow `last` on the right of the chain in
    /// tree `which` (ignoring the other tree): siblings at the same
    /// attachment or leaves on an adjacent attachment vertex.
    fn right_candidates(&self, which: usize, seq: &[usize]) -> Vec<usize> {
        let (t, att) = if which == 1 {
            (self.t1, &self.att1)
        } else {
            (self.t2, &self.att2)
        };
        let used: HashSet<usize> = seq.iter().copied().collect();
        let last = *seq.last().unwrap();
        let p = att[last];
        let mut out = Vec::new();
        for &w in t.neighbors(p) {
            if t.is_leaf(w) && !used.contains(&w) {
                out.push(w); // cherry partner: attachment equality at the end
            } else if !t.is_leaf(w) {
                for &z in t.neighbors(w) {
                    if t.is_leaf(z) && !used.contains(&z) {
                        out.push(z);
                    }
                }
            }
        }
        out
    }

    fn labels(&self, seq: &[usize]) -> Vec<String> {
        seq.iter().map(|&v| self.t1.label(v).to_string()).collect()
    }

    fn valid_in_both(&self, seq: &[usize]) -> bool {
        let labels = self.labels(seq);
        is_chain(self.t1, &labels).unwrap() && is_chain(self.t2, &labels).unwrap()
    }

    fn extendable(&self, seq: &[usize]) -> (Vec<usize>, bool) {
        // Right extensions valid in both trees.
        let mut right: Vec<usize> = self
            .right_candidates(1, seq)
            .into_iter()
            .filter(|&y| {
                let mut ext = seq.to_vec();
                ext.push(y);
                self.valid_in_both(&ext)
            })
            .collect();
        right.sort_unstable();
        right.dedup();
        // Any left extension valid in both trees?
        let rev: Vec<usize> = seq.iter().rev().copied().collect();
        let left_exists = self
            .right_candidates(1, &rev)
            .into_iter()
            .any(|z| {
                let mut ext = rev.clone();
                ext.push(z);
                self.valid_in_both(&ext)
            });
        (right, left_exists)
    }

    fn dfs(&mut self, seq: &mut Vec<usize>) {
        let (right, left_exists) = self.extendable(seq);
        if right.is_empty() {
            if !left_exists {
                // Maximal chain; store in canonical orientation.
                let fwd = self.labels(seq);
                let rev: Vec<String> = fwd.iter().rev().cloned().collect();
                self.found.insert(fwd.min(rev));
            }
            return;
        }
        for y in right {
            seq.push(y);
            self.dfs(seq);
            seq.pop();
        }
    }
}

/// A maximal common chain of length >= 5, or None. Among candidates, the one
/// containing the lexicographically smallest taxon wins (then the
/// lexicographically smallest sequence).
pub fn find_common_chain(t1: &PhyloTree, t2: &PhyloTree) -> Result<Option<Vec<String>>> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    if t1.n_taxa() < 5 {
        return Ok(None);
    }
    let mut scan = ChainScan {
        t1,
        t2,
        att1: attachments(t1),
        att2: attachments(t2),
        found: BTreeSet::new(),
    };
    // Seeds: ordered pairs chain-adjacent in both trees.
    let n = t1.n_taxa();
    for x in 0..n {
        let mut seq = vec![x];
        let mut cands = scan.right_candidates(1, &seq);
        cands.sort_unstable();
        cands.dedup();
        for y in cands {
            seq.push(y);
            if scan.valid_in_both(&seq) {
                scan.dfs(&mut seq);
            }
            seq.pop();
        }
    }
    let best = scan
        .found
        .iter()
        .filter(|c| c.len() >= 5)
        .min_by_key(|c| (c.iter().min().unwrap().clone(), (*c).clone()))
        .cloned();
    Ok(best)
}

/// Apply the reduction rules exhaustively (cherry preferred, floor |X| = 4).
pub fn reduce(t1: &PhyloTree, t2: &PhyloTree) -> Result<ReductionTrace> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let mut cur1 = t1.clone();
    let mut cur2 = t2.clone();
    let mut steps = Vec::new();
    loop {
        if cur1.n_taxa() > 4 {
            if let Some((x, y)) = find_common_cherry(&cur1, &cur2)? {
                let before = (cur1.clone(), cur2.clone());
                cur1 = delete_leaf(&cur1, &x)?;
                cur2 = delete_leaf(&cur2, &x)?;
                steps.push(ReductionStep {
                    kind: StepKind::Cherry,
                    deleted: vec![x],
                    retained: vec![y],
                    before,
                });
                continue;
            }
        }
        if let Some(chain) = find_common_chain(&cur1, &cur2)? {
            let before = (cur1.clone(), cur2.clone());
            let deleted: Vec<String> = chain[4..].to_vec();
            let retained: Vec<String> = chain[..4].to_vec();
            for x in &deleted {
                cur1 = delete_leaf(&cur1, x)?;
                cur2 = delete_leaf(&cur2, x)?;
            }
            steps.push(ReductionStep {
                kind: StepKind::Chain,
                deleted,
                retained,
                before,
            });
            continue;
        }
        break;
    }
    Ok(ReductionTrace {
        steps,
        original: (t1.clone(), t2.clone()),
        reduced: (cur1, cur2),
    })
}

/// Undo the reduction on a character: lift `chi_reduced` from the reduced
/// leaf set back to the original one, never decreasing the per-character
/// distance.
///
/// For each step (reverse order) the tree with the lower reduced score is
/// scored, its optimal extension is copied onto the retained vertices of the
/// pre-step tree, and the remaining vertices are flood-filled from their
/// colored neighbors; restricting to leaves gives the pre-step character.
pub fn lift_character(trace: &ReductionTrace, chi_reduced: &Character) -> Result<Character> {
    if !chi_reduced.is_total_on(&trace.reduced.0) {
        return Err(Error::LeafSetMismatch);
    }
    let mut chi = chi_reduced.clone();
    for step in trace.steps.iter().rev() {
        let (pre1, pre2) = &step.before;
        // Leaves surviving the step.
        let deleted: HashSet<&String> = step.deleted.iter().collect();
        let kept: Vec<String> = pre1
            .taxa()
            .iter()
            .filter(|l| !deleted.contains(l))
            .cloned()
            .collect();
        let (ind1, map1) = pre1.induced_subtree(&kept)?;
        let (ind2, map2) = pre2.induced_subtree(&kept)?;
        let (s1, phi1) = parsimony_score(&ind1, &chi)?;
        let (s2, phi2) = parsimony_score(&ind2, &chi)?;
        let (pre, map, phi) = if s1 <= s2 {
            (pre1, &map1, &phi1)
        } else {
            (pre2, &map2, &phi2)
        };
        // Transfer onto the pre-step tree.
        let mut states = vec![usize::MAX; pre.n_vertices()];
        for (&host, &ind) in map.iter().collect::<BTreeMap<_, _>>() {
            states[host] = phi.states[ind];
        }
        // Multi-source BFS flood fill, deterministic order.
        let mut queue: VecDeque<usize> =
            (0..states.len()).filter(|&v| states[v] != usize::MAX).collect();
        while let Some(v) = queue.pop_front() {
            for &w in pre.neighbors(v) {
                if states[w] == usize::MAX {
                    states[w] = states[v];
                    queue.push_back(w);
                }
            }
        }
        let pairs: Vec<(String, usize)> = pre
            .taxa()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), states[i]))
            .collect();
        chi = Character::from_pairs(&pairs)?;
    }
    Ok(chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::parsimony::character_distance;
    use crate::tree::{caterpillar, random_tree, trees_equal};

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn qa() -> PhyloTree {
        parse_newick("((a,b),(c,d));").unwrap()
    }

    fn qb() -> PhyloTree {
        parse_newick("((a,c),(b,d));").unwrap()
    }

    #[test]
    fn common_cherry_examples() {
        assert_eq!(
            find_common_cherry(&qa(), &qa()).unwrap(),
            Some(("a".into(), "b".into()))
        );
        assert_eq!(find_common_cherry(&qa(), &qb()).unwrap(), None);
        let t1 = parse_newick("((a,b),(c,(d,e)));").unwrap();
        let t2 = parse_newick("(((a,b),c),(d,e));").unwrap();
        assert_eq!(
            find_common_cherry(&t1, &t2).unwrap(),
            Some(("a".into(), "b".into()))
        );
    }

    #[test]
    fn is_chain_on_caterpillar() {
        let t = caterpillar(&s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"])).unwrap();
        assert!(is_chain(&t, &s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"])).unwrap());
        assert!(is_chain(&t, &s(&["x3", "x4", "x5", "x6"])).unwrap());
        // x2 shares x1's end attachment, so skipping it still leaves a path.
        assert!(is_chain(&t, &s(&["x1", "x3", "x4", "x5"])).unwrap());
        // Skipping x3 leaves a genuine gap between attachment vertices.
        assert!(!is_chain(&t, &s(&["x1", "x4", "x5", "x6"])).unwrap());
        assert!(!is_chain(&t, &s(&["x1", "x2", "x3", "x3"])).unwrap());
    }

    #[test]
    fn common_chain_full_caterpillar() {
        let t = caterpillar(&s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"])).unwrap();
        let c = find_common_chain(&t, &t).unwrap().unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c, s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"]));
    }

    #[test]
    fn common_chain_absent_small_and_swapped() {
        assert_eq!(find_common_chain(&qa(), &qb()).unwrap(), None);
        let t1 = caterpillar(&s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"])).unwrap();
        let t2 = caterpillar(&s(&["x1", "x2", "x3", "x5", "x4", "x6", "x7", "x8"])).unwrap();
        assert_eq!(find_common_chain(&t1, &t2).unwrap(), None);
    }

    #[test]
    fn reduce_irreducible_pair_is_identity() {
        let trace = reduce(&qa(), &qb()).unwrap();
        assert!(trace.steps.is_empty());
        assert!(trees_equal(&trace.reduced.0, &qa()).unwrap());
        assert!(trees_equal(&trace.reduced.1, &qb()).unwrap());
    }

    #[test]
    fn reduce_identical_trees_to_floor() {
        for n in [5usize, 7, 9, 12] {
            let taxa: Vec<String> = (0..n).map(|i| format!("t{:02}", i)).collect();
            let t = random_tree(&taxa, n as u64).unwrap();
            let trace = reduce(&t, &t).unwrap();
            assert_eq!(trace.reduced.0.n_taxa(), 4);
            assert!(trees_equal(&trace.reduced.0, &trace.reduced.1).unwrap());
        }
    }

    #[test]
    fn reduce_chain_to_length_four() {
        let taxa = s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"]);
        let t = caterpillar(&taxa).unwrap();
        let trace = reduce(&t, &t).unwrap();
        assert_eq!(trace.reduced.0.n_taxa(), 4);
        // Cherries fire first on identical trees, so kinds may be mixed;
        // replay must reproduce the reduced pair.
        let mut cur1 = trace.original.0.clone();
        let mut cur2 = trace.original.1.clone();
        for step in &trace.steps {
            assert!(trees_equal(&step.before.0, &cur1).unwrap());
            assert!(trees_equal(&step.before.1, &cur2).unwrap());
            for x in &step.deleted {
                cur1 = delete_leaf(&cur1, x).unwrap();
                cur2 = delete_leaf(&cur2, x).unwrap();
            }
        }
        assert!(trees_equal(&cur1, &trace.reduced.0).unwrap());
        assert!(trees_equal(&cur2, &trace.reduced.1).unwrap());
    }

    #[test]
    fn reduce_pure_chain_step() {
        // Distinct trees sharing a long chain but no cherry: caterpillar vs
        // caterpillar with the two end cherries re-paired.
        let t1 = caterpillar(&s(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"])).unwrap();
        // Swap x1 with x8: cherries differ, interior chain x2..x7 shared.
        let t2 = caterpillar(&s(&["x8", "x2", "x3", "x4", "x5", "x6", "x7", "x1"])).unwrap();
        assert_eq!(find_common_cherry(&t1, &t2).unwrap(), None);
        let chain = find_common_chain(&t1, &t2).unwrap().unwrap();
        assert_eq!(chain, s(&["x2", "x3", "x4", "x5", "x6", "x7"]));
        let trace = reduce(&t1, &t2).unwrap();
        assert!(trace
            .steps
            .iter()
            .any(|st| st.kind == StepKind::Chain));
        assert_eq!(trace.reduced.0.n_taxa(), t1.n_taxa() - 2);
    }

    #[test]
    fn lift_empty_trace_is_identity() {
        let trace = reduce(&qa(), &qb()).unwrap();
        let chi = Character::from_classes(&[s(&["a", "b"]), s(&["c", "d"])]).unwrap();
        let lifted = lift_character(&trace, &chi).unwrap();
        assert_eq!(lifted, chi);
    }

    #[test]
    fn lift_single_cherry_step() {
        let t1 = parse_newick("((a,b),(c,(d,e)));").unwrap();
        let t2 = parse_newick("(((a,b),c),(d,e));").unwrap();
        let trace = reduce(&t1, &t2).unwrap();
        assert!(!trace.steps.is_empty());
        let reduced_taxa = trace.reduced.0.taxa().to_vec();
        // Sweep all 2-state characters on the reduced leaf set.
        for mask in 1u32..(1 << reduced_taxa.len()) - 1 {
            let pairs: Vec<(String, usize)> = reduced_taxa
                .iter()
                .enumerate()
                .map(|(i, l)| (l.clone(), ((mask >> i) & 1) as usize))
                .collect();
            let chi = Character::from_pairs(&pairs).unwrap();
            let lifted = lift_character(&trace, &chi).unwrap();
            let d_orig = character_distance(&t1, &t2, &lifted).unwrap();
            let d_red =
                character_distance(&trace.reduced.0, &trace.reduced.1, &chi).unwrap();
            assert!(d_orig >= d_red, "mask {}: {} < {}", mask, d_orig, d_red);
        }
    }

    #[test]
    fn lift_random_reducible_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(303);
        let mut tested = 0;
        let mut seed = 0u64;
        while tested < 200 {
            seed += 1;
            let n = 6 + (seed as usize % 5);
            let taxa: Vec<String> = (0..n).map(|i| format!("t{}", i)).collect();
            let base = random_tree(&taxa, seed).unwrap();
            let other = crate::tree::random_tbr_move(&base, seed + 5000).unwrap();
            let trace = reduce(&base, &other).unwrap();
            if trace.steps.is_empty() {
                continue;
            }
            tested += 1;
            let red_taxa = trace.reduced.0.taxa().to_vec();
            let states = 2 + rng.gen_range(0..2);
            let pairs: Vec<(String, usize)> = red_taxa
                .iter()
                .map(|l| (l.clone(), rng.gen_range(0..states)))
                .collect();
            let chi = Character::from_pairs(&pairs).unwrap();
            let lifted = lift_character(&trace, &chi).unwrap();
            let d_orig = character_distance(&base, &other, &lifted).unwrap();
            let d_red =
                character_distance(&trace.reduced.0, &trace.reduced.1, &chi).unwrap();
            assert!(d_orig >= d_red);
        }
    }

    #[test]
    fn reduced_pair_is_irreducible() {
        for seed in 0..20u64 {
            let n = 8;
            let taxa: Vec<String> = (0..n).map(|i| format!("t{}", i)).collect();
            let t1 = random_tree(&taxa, seed).unwrap();
            let t2 = random_tree(&taxa, seed + 100).unwrap();
            let trace = reduce(&t1, &t2).unwrap();
            let (r1, r2) = &trace.reduced;
            if r1.n_taxa() > 4 {
                assert_eq!(find_common_cherry(r1, r2).unwrap(), None);
            }
            assert_eq!(find_common_chain(r1, r2).unwrap(), None);
        }
    }
}
