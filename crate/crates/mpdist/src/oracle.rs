//! Exhaustive ground-truth engines at desk scale: exact d_MP over set
//! partitions, brute-force parsimony, exact d_TBR via agreement forests,
//! display graphs and exact treewidth.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::kernel::ALPHA;
use crate::parsimony::{character_distance, delta, Character, Extension};
use crate::reduction::reduce;
use crate::tree::{trees_equal, PhyloTree};

pub const DMP_CAP: usize = 10;
pub const BRUTE_N_CAP: usize = 8;
pub const BRUTE_STATES_CAP: usize = 4;
pub const DTBR_CAP: usize = 8;
pub const TW_CAP: usize = 16;

/// Iterator over all set partitions of {0..n} as restricted growth strings,
/// in lexicographic order.
pub struct SetPartitions {
    n: usize,
    a: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        SetPartitions {
            n,
            a: vec![0; n],
            started: false,
            done: n == 0,
        }
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.a.clone());
        }
        // Rightmost position that can be incremented: a[i] <= max(a[..i]).
        let mut i = self.n;
        loop {
            if i <= 1 {
                self.done = true;
                return None;
            }
            i -= 1;
            let prefix_max = *self.a[..i].iter().max().unwrap();
            if self.a[i] <= prefix_max {
                self.a[i] += 1;
                for j in i + 1..self.n {
                    self.a[j] = 0;
                }
                return Some(self.a.clone());
            }
        }
    }
}

/// Exact d_MP: maximum character distance over all set partitions of X.
pub fn exact_dmp(t1: &PhyloTree, t2: &PhyloTree, cap: usize) -> Result<(usize, Character)> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let n = t1.n_taxa();
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    let taxa = t1.taxa().to_vec();
    let mut best = 0usize;
    let mut best_chi: Option<Character> = None;
    for rgs in SetPartitions::new(n) {
        let pairs: Vec<(String, usize)> = taxa
            .iter()
            .zip(rgs.iter())
            .map(|(l, &s)| (l.clone(), s))
            .collect();
        let chi = Character::from_pairs(&pairs)?;
        let d = character_distance(t1, t2, &chi)?;
        if best_chi.is_none() || d > best {
            best = d;
            best_chi = Some(chi);
        }
    }
    Ok((best, best_chi.expect("n >= 1 yields at least one partition")))
}

/// Minimum delta over all state assignments to internal vertices.
pub fn brute_parsimony(
    t: &PhyloTree,
    chi: &Character,
    cap_states: usize,
    cap_n: usize,
) -> Result<usize> {
    let n = t.n_taxa();
    if n > cap_n {
        return Err(Error::TooLarge { size: n, cap: cap_n });
    }
    let states = chi.num_states();
    if states > cap_states {
        return Err(Error::TooLarge {
            size: states,
            cap: cap_states,
        });
    }
    if !chi.is_total_on(t) {
        return Err(Error::PartialCharacter);
    }
    let nv = t.n_vertices();
    let internal = nv - n;
    let mut ext = vec![0usize; nv];
    for v in 0..n {
        ext[v] = chi.state(t.label(v)).unwrap();
    }
    if internal == 0 {
        return delta(t, &Extension { states: ext });
    }
    let mut assign = vec![0usize; internal];
    let mut best = usize::MAX;
    loop {
        ext[n..nv].copy_from_slice(&assign);
        best = best.min(delta(t, &Extension { states: ext.clone() })?);
        let mut i = 0;
        loop {
            if i == internal {
                return Ok(best);
            }
            assign[i] += 1;
            if assign[i] < states {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// A partition of X whose blocks induce equal subtrees in both trees and are
/// spanning-disjoint in both.
#[derive(Debug, Clone)]
pub struct AgreementForest {
    pub blocks: Vec<Vec<String>>,
}

impl AgreementForest {
    pub fn validate(&self, t1: &PhyloTree, t2: &PhyloTree) -> Result<bool> {
        for b in &self.blocks {
            if b.len() >= 3 {
                let (i1, _) = t1.induced_subtree(b)?;
                let (i2, _) = t2.induced_subtree(b)?;
                if !trees_equal(&i1, &i2)? {
                    return Ok(false);
                }
            }
        }
        Ok(t1.are_spanning_disjoint(&self.blocks)?
            && t2.are_spanning_disjoint(&self.blocks)?)
    }
}

/// Exact d_TBR: minimum agreement-forest block count, minus one.
pub fn exact_dtbr(
    t1: &PhyloTree,
    t2: &PhyloTree,
    cap: usize,
) -> Result<(usize, AgreementForest)> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let n = t1.n_taxa();
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    let taxa = t1.taxa().to_vec();
    let mut best: Option<AgreementForest> = None;
    let mut best_blocks = usize::MAX;
    for rgs in SetPartitions::new(n) {
        let nb = rgs.iter().max().unwrap() + 1;
        if nb >= best_blocks {
            continue;
        }
        let mut blocks = vec![Vec::new(); nb];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(taxa[i].clone());
        }
        let forest = AgreementForest { blocks };
        if forest.validate(t1, t2)? {
            best_blocks = nb;
            best = Some(forest);
        }
    }
    let forest = best.expect("the all-singleton partition is always an agreement forest");
    Ok((best_blocks - 1, forest))
}

/// An undirected simple graph on vertices 0..n.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

/// The display graph: both trees unioned, same-label leaves identified.
///
/// Vertex layout: taxa 0..n, then T1 internals, then T2 internals;
/// |V| = 3n - 4 and |E| = 2(2n - 3).
pub fn display_graph(t1: &PhyloTree, t2: &PhyloTree) -> Result<Graph> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    let n = t1.n_taxa();
    if n < 3 {
        return Err(Error::TooSmall(3));
    }
    let map1 = |v: usize| v; // t1: leaves and internals keep their layout
    let map2 = |v: usize| if v < n { v } else { v + (t1.n_vertices() - n) };
    let mut edges = Vec::new();
    for (u, v) in t1.edges() {
        edges.push((map1(u), map1(v)));
    }
    for (u, v) in t2.edges() {
        edges.push((map2(u), map2(v)));
    }
    let g = Graph {
        n: t1.n_vertices() + t2.n_vertices() - n,
        edges,
    };
    debug_assert_eq!(g.n, 3 * n - 4);
    debug_assert_eq!(g.edges.len(), 2 * (2 * n - 3));
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
    /// Edges of the decomposition tree, over bag indices.
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1) - 1
    }

    /// The three decomposition axioms: vertex coverage, edge coverage and the
    /// connected-subtree property; plus the bag graph being a tree.
    pub fn validate(&self, g: &Graph) -> bool {
        let nb = self.bags.len();
        if self.edges.len() + 1 != nb {
            return false;
        }
        let mut badj = vec![Vec::new(); nb];
        for &(a, b) in &self.edges {
            badj[a].push(b);
            badj[b].push(a);
        }
        // Bag graph connected (with the right edge count: a tree).
        let mut seen = vec![false; nb];
        let mut stack = vec![0];
        seen[0] = true;
        let mut cnt = 1;
        while let Some(b) = stack.pop() {
            for &c in &badj[b] {
                if !seen[c] {
                    seen[c] = true;
                    cnt += 1;
                    stack.push(c);
                }
            }
        }
        if cnt != nb {
            return false;
        }
        // Vertex coverage.
        for v in 0..g.n {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                return false;
            }
        }
        // Edge coverage.
        for &(u, v) in &g.edges {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return false;
            }
        }
        // Connected-subtree property per vertex.
        for v in 0..g.n {
            let with_v: Vec<usize> =
                (0..nb).filter(|&i| self.bags[i].contains(&v)).collect();
            let inset: BTreeSet<usize> = with_v.iter().copied().collect();
            let mut seen: BTreeSet<usize> = BTreeSet::new();
            let mut stack = vec![with_v[0]];
            seen.insert(with_v[0]);
            while let Some(b) = stack.pop() {
                for &c in &badj[b] {
                    if inset.contains(&c) && !seen.contains(&c) {
                        seen.insert(c);
                        stack.push(c);
                    }
                }
            }
            if seen.len() != with_v.len() {
                return false;
            }
        }
        true
    }
}

/// Exact treewidth via the subset dynamic program over elimination orders,
/// with a witnessing decomposition reconstructed from the DP.
pub fn exact_treewidth(g: &Graph, cap: usize) -> Result<(usize, TreeDecomposition)> {
    let n = g.n;
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let adj = g.adjacency();
    // q(S, v): neighbors of v outside S reachable from v through S.
    let q = |s: u32, v: usize| -> usize {
        let mut seen: u32 = 1 << v;
        let mut stack = vec![v];
        let mut out: u32 = 0;
        while let Some(x) = stack.pop() {
            for &w in &adj[x] {
                if seen & (1 << w) != 0 {
                    continue;
                }
                seen |= 1 << w;
                if s & (1 << w) != 0 {
                    stack.push(w);
                } else {
                    out |= 1 << w;
                }
            }
        }
        out.count_ones() as usize
    };
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut f = vec![usize::MAX; (full as usize) + 1];
    f[0] = 0;
    for s in 1..=full {
        let mut best = usize::MAX;
        let mut v_iter = s;
        while v_iter != 0 {
            let v = v_iter.trailing_zeros() as usize;
            v_iter &= v_iter - 1;
            let rest = s & !(1 << v);
            let cost = f[rest as usize].max(q(rest, v));
            best = best.min(cost);
        }
        f[s as usize] = best;
    }
    let width = f[full as usize];
    // Reconstruct an elimination order (last-eliminated first).
    let mut order_rev = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let mut chosen = None;
        let mut v_iter = s;
        while v_iter != 0 {
            let v = v_iter.trailing_zeros() as usize;
            v_iter &= v_iter - 1;
            let rest = s & !(1 << v);
            if f[rest as usize].max(q(rest, v)) == f[s as usize] {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("DP value is attained by some vertex");
        order_rev.push(v);
        s &= !(1 << v);
    }
    order_rev.reverse();
    let order = order_rev; // forward elimination order
    // Build bags by simulated elimination with fill-in.
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut cur: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| adj[v].iter().copied().collect())
        .collect();
    let mut bags: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut parent_of: Vec<Option<usize>> = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let nbrs: Vec<usize> = cur[v].iter().copied().collect();
        let mut bag: BTreeSet<usize> = nbrs.iter().copied().collect();
        bag.insert(v);
        bags.push(bag);
        // Parent: the bag of the earliest-eliminated remaining neighbor.
        if let Some(&p) = nbrs.iter().min_by_key(|&&w| pos[w]) {
            parent_of[i] = Some(pos[p]);
        }
        // Fill-in and removal.
        for a in 0..nbrs.len() {
            for b in a + 1..nbrs.len() {
                cur[nbrs[a]].insert(nbrs[b]);
                cur[nbrs[b]].insert(nbrs[a]);
            }
        }
        for &w in &nbrs {
            cur[w].remove(&v);
        }
        cur[v].clear();
    }
    let mut edges = Vec::new();
    for (i, p) in parent_of.iter().enumerate() {
        match p {
            Some(j) => edges.push((i, *j)),
            // A bag with no later neighbors links to the last bag (unless it
            // is the last bag itself).
            None => {
                if i + 1 != n {
                    edges.push((i, n - 1));
                }
            }
        }
    }
    let td = TreeDecomposition { bags, edges };
    debug_assert!(td.validate(g));
    debug_assert_eq!(td.width(), width);
    Ok((width, td))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// FPT-style decision: reduce, triage on kernel size against alpha*(k+1),
/// then answer exactly on the kernel.
pub fn decide_dmp(
    t1: &PhyloTree,
    t2: &PhyloTree,
    k: usize,
    relation: Relation,
    cap: usize,
) -> Result<bool> {
    fn leq(t1: &PhyloTree, t2: &PhyloTree, k: usize, cap: usize) -> Result<bool> {
        let trace = reduce(t1, t2)?;
        let (r1, r2) = &trace.reduced;
        if r1.n_taxa() >= ALPHA * (k + 1) {
            return Ok(false);
        }
        let (d, _) = exact_dmp(r1, r2, cap)?;
        Ok(d <= k)
    }
    match relation {
        Relation::Le => leq(t1, t2, k, cap),
        Relation::Ge => {
            if k == 0 {
                Ok(true)
            } else {
                Ok(!leq(t1, t2, k - 1, cap)?)
            }
        }
        Relation::Eq => {
            if !leq(t1, t2, k, cap)? {
                return Ok(false);
            }
            if k == 0 {
                Ok(true)
            } else {
                Ok(!leq(t1, t2, k - 1, cap)?)
            }
        }
    }
}
