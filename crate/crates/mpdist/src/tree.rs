//! Unrooted binary phylogenetic trees and topological primitives.
//!
//! Vertices live in a flat adjacency structure indexed by `VertexId`.
//! The first `n` vertices are the leaves, in lexicographic taxon order,
//! so `TaxonId` and the leaf's `VertexId` coincide.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type TaxonId = usize;

/// An unrooted binary phylogenetic tree on a set of taxa.
///
/// Invariants (enforced on construction):
/// - connected and acyclic;
/// - for n >= 3 every internal vertex has degree 3 and every leaf degree 1;
/// - n = 1 is a single labelled vertex, n = 2 a single edge between two leaves.
#[derive(Debug, Clone)]
pub struct PhyloTree {
    adj: Vec<Vec<VertexId>>,
    taxa: Vec<String>,
}

/// A subgraph of a host tree: the spanning subtree `T[S]`.
#[derive(Debug, Clone)]
pub struct Subgraph<'a> {
    pub host: &'a PhyloTree,
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<(VertexId, VertexId)>,
}

/// Four taxa with a resolved split topology `ab|cd`.
///
/// The split is stored in canonical form: each pair sorted, pairs ordered by
/// their first element, so derived equality compares topologies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quartet {
    split: [[String; 2]; 2],
}

impl Quartet {
    pub fn new(pair_a: [String; 2], pair_b: [String; 2]) -> Self {
        let mut a = pair_a;
        let mut b = pair_b;
        a.sort();
        b.sort();
        let split = if a[0] <= b[0] { [a, b] } else { [b, a] };
        Quartet { split }
    }

    pub fn split(&self) -> &[[String; 2]; 2] {
        &self.split
    }

    /// The four taxa, sorted.
    pub fn taxa(&self) -> Vec<String> {
        let mut v: Vec<String> = self.split.iter().flatten().cloned().collect();
        v.sort();
        v
    }
}

impl PhyloTree {
    /// Build a tree from an edge list over arbitrary vertex ids plus leaf labels.
    ///
    /// Vertex ids are compacted: leaves first in lexicographic taxon order,
    /// then internal vertices. Returns the tree and the map from the caller's
    /// ids to the new ids.
    pub fn from_edges(
        edges: &[(usize, usize)],
        labels: &[(usize, String)],
    ) -> Result<(Self, HashMap<usize, usize>)> {
        if labels.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut seen = HashSet::new();
        for (_, l) in labels {
            if l.is_empty() {
                return Err(Error::MalformedNewick("empty taxon label".into()));
            }
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateTaxon(l.clone()));
            }
        }
        // Collect all vertex ids.
        let mut ids: BTreeSet<usize> = BTreeSet::new();
        for &(u, v) in edges {
            ids.insert(u);
            ids.insert(v);
        }
        for &(v, _) in labels {
            ids.insert(v);
        }
        let mut taxa: Vec<String> = labels.iter().map(|(_, l)| l.clone()).collect();
        taxa.sort();
        let label_of: HashMap<usize, &String> = labels.iter().map(|(v, l)| (*v, l)).collect();
        let taxon_index: HashMap<&String, usize> =
            taxa.iter().enumerate().map(|(i, l)| (l, i)).collect();

        let n = taxa.len();
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut next_internal = n;
        for &id in &ids {
            if let Some(l) = label_of.get(&id) {
                map.insert(id, taxon_index[*l]);
            } else {
                map.insert(id, next_internal);
                next_internal += 1;
            }
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); next_internal];
        for &(u, v) in edges {
            let (a, b) = (map[&u], map[&v]);
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        let tree = PhyloTree { adj, taxa };
        tree.validate()?;
        Ok((tree, map))
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_taxa();
        let nv = self.n_vertices();
        let ne: usize = self.adj.iter().map(|a| a.len()).sum::<usize>() / 2;
        if ne + 1 != nv {
            return Err(Error::NonBinary(format!(
                "{} vertices but {} edges",
                nv, ne
            )));
        }
        // Connectivity.
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != nv {
            return Err(Error::NonBinary("graph is not connected".into()));
        }
        match n {
            1 => {
                if nv != 1 {
                    return Err(Error::NonBinary("single taxon must be a lone vertex".into()));
                }
            }
            2 => {
                if nv != 2 {
                    return Err(Error::NonBinary("two taxa must form a single edge".into()));
                }
            }
            _ => {
                for v in 0..nv {
                    let d = self.adj[v].len();
                    if v < n && d != 1 {
                        return Err(Error::NonBinary(format!(
                            "leaf '{}' has degree {}",
                            self.taxa[v], d
                        )));
                    }
                    if v >= n && d != 3 {
                        return Err(Error::NonBinary(format!(
                            "internal vertex of degree {}",
                            d
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_taxa(&self) -> usize {
        self.taxa.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_vertices() - 1
    }

    /// Taxa labels, sorted lexicographically; index is the `TaxonId`.
    pub fn taxa(&self) -> &[String] {
        &self.taxa
    }

    pub fn label(&self, t: TaxonId) -> &str {
        &self.taxa[t]
    }

    pub fn taxon_id(&self, label: &str) -> Option<TaxonId> {
        self.taxa.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        v < self.n_taxa()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    /// All edges as ordered pairs (u < v).
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for u in 0..self.n_vertices() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn same_leaf_set(&self, other: &PhyloTree) -> bool {
        self.taxa == other.taxa
    }

    fn taxon_ids(&self, labels: &[String]) -> Result<Vec<TaxonId>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            out.push(
                self.taxon_id(l)
                    .ok_or_else(|| Error::UnknownTaxon(l.clone()))?,
            );
        }
        Ok(out)
    }

    /// Parent pointers for the tree rooted at `root`, in BFS order.
    pub fn bfs_parents(&self, root: VertexId) -> (Vec<Option<VertexId>>, Vec<VertexId>) {
        let mut parent = vec![None; self.n_vertices()];
        let mut order = Vec::with_capacity(self.n_vertices());
        let mut seen = vec![false; self.n_vertices()];
        let mut queue = VecDeque::new();
        queue.push_back(root);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        (parent, order)
    }

    /// Vertices on the path between `u` and `v`, inclusive.
    pub fn path_vertices(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let (parent, _) = self.bfs_parents(u);
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = parent[cur].expect("tree is connected");
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn path_edges(&self, u: VertexId, v: VertexId) -> BTreeSet<(VertexId, VertexId)> {
        let path = self.path_vertices(u, v);
        path.windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect()
    }

    /// The spanning subtree `T[S]`: the minimal connected subgraph containing
    /// every leaf labelled by `S`.
    pub fn spanning_subtree(&self, s: &[String]) -> Result<Subgraph<'_>> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let ids = self.taxon_ids(s)?;
        let total = ids.len();
        let in_s: HashSet<TaxonId> = ids.iter().copied().collect();
        if in_s.len() != total {
            return Err(Error::DuplicateTaxon(
                "repeated taxon in spanning set".into(),
            ));
        }
        let root = ids[0];
        if total == 1 {
            let mut vertices = BTreeSet::new();
            vertices.insert(root);
            return Ok(Subgraph {
                host: self,
                vertices,
                edges: BTreeSet::new(),
            });
        }
        let (parent, order) = self.bfs_parents(root);
        // Count S-leaves in each subtree (rooted at `root`).
        let mut cnt = vec![0usize; self.n_vertices()];
        for &v in order.iter().rev() {
            if self.is_leaf(v) && in_s.contains(&v) {
                cnt[v] += 1;
            }
            if let Some(p) = parent[v] {
                cnt[p] += cnt[v];
            }
        }
        let mut edges = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for &v in &order {
            if let Some(p) = parent[v] {
                if cnt[v] >= 1 && cnt[v] < total {
                    edges.insert((p.min(v), p.max(v)));
                    vertices.insert(p);
                    vertices.insert(v);
                }
            }
        }
        Ok(Subgraph {
            host: self,
            vertices,
            edges,
        })
    }

    /// The number of pending edges separating `T[S]` from the rest of `T`.
    pub fn set_degree(&self, s: &[String]) -> Result<usize> {
        let sub = self.spanning_subtree(s)?;
        let mut count = 0;
        for &v in &sub.vertices {
            for &w in &self.adj[v] {
                if !sub.vertices.contains(&w) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// The induced subtree `T|_S`: `T[S]` with degree-2 vertices suppressed.
    ///
    /// Also returns the map from retained host vertices to their ids in the
    /// new tree (needed when lifting extensions back onto the host).
    pub fn induced_subtree(&self, s: &[String]) -> Result<(PhyloTree, HashMap<VertexId, VertexId>)> {
        let sub = self.spanning_subtree(s)?;
        let ids = self.taxon_ids(s)?;
        let leaf_set: HashSet<VertexId> = ids.iter().copied().collect();
        let deg: HashMap<VertexId, usize> = sub
            .vertices
            .iter()
            .map(|&v| {
                let d = sub
                    .edges
                    .iter()
                    .filter(|&&(a, b)| a == v || b == v)
                    .count();
                (v, d)
            })
            .collect();
        if ids.len() == 1 {
            let v = ids[0];
            let (tree, _) = PhyloTree::from_edges(&[], &[(v, self.taxa[v].clone())])?;
            let mut map = HashMap::new();
            map.insert(v, 0);
            return Ok((tree, map));
        }
        // Neighbor lists inside the subgraph.
        let mut sub_adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &(a, b) in &sub.edges {
            sub_adj.entry(a).or_default().push(b);
            sub_adj.entry(b).or_default().push(a);
        }
        let retained: BTreeSet<VertexId> = sub
            .vertices
            .iter()
            .copied()
            .filter(|v| deg[v] != 2 || leaf_set.contains(v))
            .collect();
        // Walk degree-2 chains between retained vertices.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &u in &retained {
            for &first in &sub_adj[&u] {
                let mut prev = u;
                let mut cur = first;
                while !retained.contains(&cur) {
                    let next = *sub_adj[&cur].iter().find(|&&w| w != prev).unwrap();
                    prev = cur;
                    cur = next;
                }
                if u < cur {
                    edges.push((u, cur));
                }
            }
        }
        let labels: Vec<(usize, String)> = ids
            .iter()
            .map(|&v| (v, self.taxa[v].clone()))
            .collect();
        let (tree, map) = PhyloTree::from_edges(&edges, &labels)?;
        let host_map: HashMap<VertexId, VertexId> =
            retained.iter().map(|&v| (v, map[&v])).collect();
        Ok((tree, host_map))
    }

    /// True iff the spanning subtrees of all blocks are pairwise edge-disjoint
    /// (and no singleton's vertex lies inside another block's spanning subtree).
    pub fn are_spanning_disjoint(&self, blocks: &[Vec<String>]) -> Result<bool> {
        let mut seen: HashSet<&str> = HashSet::new();
        for b in blocks {
            for l in b {
                if !seen.insert(l.as_str()) {
                    return Err(Error::OverlappingBlocks);
                }
            }
        }
        let subs: Vec<Subgraph> = blocks
            .iter()
            .map(|b| self.spanning_subtree(b))
            .collect::<Result<_>>()?;
        for i in 0..subs.len() {
            for j in i + 1..subs.len() {
                if !subs[i].edges.is_disjoint(&subs[j].edges) {
                    return Ok(false);
                }
                // Singleton blocks occupy one vertex and no edges.
                if subs[i].edges.is_empty() || subs[j].edges.is_empty() {
                    if !subs[i].vertices.is_disjoint(&subs[j].vertices) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The unique split `ab|cd` of 4 taxa such that the a-b and c-d paths are
    /// edge-disjoint in this tree.
    pub fn quartet_topology(&self, q: &[String]) -> Result<Quartet> {
        if q.len() != 4 {
            return Err(Error::BadQuartetSize);
        }
        let ids = self.taxon_ids(q)?;
        let distinct: HashSet<_> = ids.iter().collect();
        if distinct.len() != 4 {
            return Err(Error::BadQuartetSize);
        }
        let [a, b, c, d] = [ids[0], ids[1], ids[2], ids[3]];
        let pairings = [[a, b, c, d], [a, c, b, d], [a, d, b, c]];
        for p in pairings {
            let e1 = self.path_edges(p[0], p[1]);
            let e2 = self.path_edges(p[2], p[3]);
            if e1.is_disjoint(&e2) {
                return Ok(Quartet::new(
                    [self.taxa[p[0]].clone(), self.taxa[p[1]].clone()],
                    [self.taxa[p[2]].clone(), self.taxa[p[3]].clone()],
                ));
            }
        }
        unreachable!("every 4 leaves of a binary tree have a resolved topology")
    }

    /// Canonical Newick string; equal strings iff label-isomorphic trees.
    pub fn canonical_newick(&self) -> String {
        crate::newick::write_newick(self)
    }
}

/// True iff `q` has different induced topologies in the two trees.
pub fn is_conflicting_quartet(t1: &PhyloTree, t2: &PhyloTree, q: &[String]) -> Result<bool> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    Ok(t1.quartet_topology(q)? != t2.quartet_topology(q)?)
}

/// True iff the trees are label-isomorphic (same leaf set required).
pub fn trees_equal(t1: &PhyloTree, t2: &PhyloTree) -> Result<bool> {
    if !t1.same_leaf_set(t2) {
        return Err(Error::LeafSetMismatch);
    }
    Ok(t1.canonical_newick() == t2.canonical_newick())
}

/// Uniformly random unrooted binary topology over the given taxa, by
/// sequential uniform edge insertion. The PRNG is ChaCha8 seeded with `seed`.
pub fn random_tree(taxa: &[String], seed: u64) -> Result<PhyloTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree_with_rng(taxa, &mut rng)
}

pub fn random_tree_with_rng<R: Rng>(taxa: &[String], rng: &mut R) -> Result<PhyloTree> {
    if taxa.is_empty() {
        return Err(Error::EmptySet);
    }
    if taxa.len() == 1 {
        let (t, _) = PhyloTree::from_edges(&[], &[(0, taxa[0].clone())])?;
        return Ok(t);
    }
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    let mut next = 2;
    for i in 2..taxa.len() {
        let e = rng.gen_range(0..edges.len());
        let (u, v) = edges[e];
        let mid = next;
        let leaf = next + 1;
        next += 2;
        edges[e] = (u, mid);
        edges.push((mid, v));
        edges.push((mid, leaf));
        // Vertex ids: leaves are 0, 1, and odd-step ids; labels pin them.
        let _ = i;
    }
    // Assign labels: leaf vertices are 0, 1, and every second new id.
    let mut labels = vec![(0usize, taxa[0].clone()), (1usize, taxa[1].clone())];
    for (i, t) in taxa.iter().enumerate().skip(2) {
        labels.push((2 * (i - 2) + 3, t.clone()));
    }
    let (tree, _) = PhyloTree::from_edges(&edges, &labels)?;
    Ok(tree)
}

/// One uniformly random TBR move: delete a random edge, suppress degree-2
/// vertices, reconnect via a new edge subdividing a random edge (or attaching
/// at an isolated leaf) in each component.
pub fn random_tbr_move(tree: &PhyloTree, seed: u64) -> Result<PhyloTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tbr_move_with_rng(tree, &mut rng)
}

pub fn random_tbr_move_with_rng<R: Rng>(tree: &PhyloTree, rng: &mut R) -> Result<PhyloTree> {
    if tree.n_taxa() < 4 {
        return Err(Error::TooSmall(4));
    }
    let all_edges = tree.edges();
    let (du, dv) = all_edges[rng.gen_range(0..all_edges.len())];

    // Split into two components, each as its own edge set over host ids.
    let mut comp = vec![usize::MAX; tree.n_vertices()];
    for (side, start) in [(0usize, du), (1usize, dv)] {
        let mut stack = vec![start];
        comp[start] = side;
        while let Some(v) = stack.pop() {
            for &w in tree.neighbors(v) {
                if (v, w) == (du, dv) || (v, w) == (dv, du) {
                    continue;
                }
                if comp[w] == usize::MAX {
                    comp[w] = side;
                    stack.push(w);
                }
            }
        }
    }

    let mut new_edges: Vec<(usize, usize)> = Vec::new();
    let mut attach_points = [0usize; 2];
    let mut next_id = tree.n_vertices();
    for side in 0..2 {
        let mut edges: Vec<(usize, usize)> = all_edges
            .iter()
            .copied()
            .filter(|&(a, b)| {
                comp[a] == side && comp[b] == side && !((a, b) == (du.min(dv), du.max(dv)))
            })
            .collect();
        let verts: Vec<usize> = (0..tree.n_vertices()).filter(|&v| comp[v] == side).collect();
        if verts.len() == 1 {
            attach_points[side] = verts[0];
            continue;
        }
        // Suppress the degree-2 vertex left by the deleted edge.
        let cut = if side == 0 { du } else { dv };
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in &edges {
            *deg.entry(a).or_insert(0) += 1;
            *deg.entry(b).or_insert(0) += 1;
        }
        if deg.get(&cut).copied().unwrap_or(0) == 2 {
            let nbrs: Vec<usize> = edges
                .iter()
                .filter_map(|&(a, b)| {
                    if a == cut {
                        Some(b)
                    } else if b == cut {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect();
            edges.retain(|&(a, b)| a != cut && b != cut);
            edges.push((nbrs[0], nbrs[1]));
        }
        if edges.is_empty() {
            // Two-vertex component collapsed to... cannot happen: a component
            // with >= 2 vertices keeps at least one edge after suppression.
            unreachable!();
        }
        // Subdivide a random edge; the new vertex is the attachment point.
        let e = rng.gen_range(0..edges.len());
        let (a, b) = edges[e];
        let mid = next_id;
        next_id += 1;
        edges[e] = (a, mid);
        edges.push((mid, b));
        attach_points[side] = mid;
        new_edges.extend(edges);
    }
    new_edges.push((attach_points[0], attach_points[1]));
    let labels: Vec<(usize, String)> = (0..tree.n_taxa())
        .map(|t| (t, tree.taxa[t].clone()))
        .collect();
    let (out, _) = PhyloTree::from_edges(&new_edges, &labels)?;
    Ok(out)
}

/// Caterpillar tree: taxa attached in order along a path of internal vertices.
pub fn caterpillar(taxa: &[String]) -> Result<PhyloTree> {
    let n = taxa.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if n == 1 {
        let (t, _) = PhyloTree::from_edges(&[], &[(0, taxa[0].clone())])?;
        return Ok(t);
    }
    if n == 2 {
        let (t, _) = PhyloTree::from_edges(&[(0, 1)], &[(0, taxa[0].clone()), (1, taxa[1].clone())])?;
        return Ok(t);
    }
    // Internal path p_2 .. p_{n-1}; x1 hangs off p_2, xn off p_{n-1}.
    let mut edges = Vec::new();
    let internal = |i: usize| n + i; // i in 0..n-2
    edges.push((0, internal(0)));
    edges.push((1, internal(0)));
    for i in 2..n - 1 {
        edges.push((i, internal(i - 1)));
    }
    edges.push((n - 1, internal(n - 3)));
    for i in 0..n - 3 {
        edges.push((internal(i), internal(i + 1)));
    }
    let labels: Vec<(usize, String)> = taxa.iter().enumerate().map(|(i, t)| (i, t.clone())).collect();
    let (t, _) = PhyloTree::from_edges(&edges, &labels)?;
    Ok(t)
}

/// All unrooted binary topologies on the given taxa (1*3*5*...*(2n-5) trees).
///
/// Generated by inserting each taxon on every edge of every partial tree, so
/// each topology appears exactly once. Intended for exhaustive small sweeps.
pub fn enumerate_topologies(taxa: &[String]) -> Result<Vec<PhyloTree>> {
    if taxa.is_empty() {
        return Err(Error::EmptySet);
    }
    if taxa.len() == 1 {
        let (t, _) = PhyloTree::from_edges(&[], &[(0, taxa[0].clone())])?;
        return Ok(vec![t]);
    }
    // Work over raw edge lists; leaf i carries taxa[i].
    let mut partial: Vec<Vec<(usize, usize)>> = vec![vec![(0, 1)]];
    let mut next_free = vec![2usize];
    for i in 2..taxa.len() {
        let mut grown = Vec::new();
        let mut grown_free = Vec::new();
        for (edges, &free) in partial.iter().zip(next_free.iter()) {
            for e in 0..edges.len() {
                let mut ne = edges.clone();
                let (u, v) = ne[e];
                let mid = free;
                ne[e] = (u, mid);
                ne.push((mid, v));
                ne.push((mid, free + 1));
                grown.push(ne);
                grown_free.push(free + 2);
            }
        }
        partial = grown;
        next_free = grown_free;
        let _ = i;
    }
    // Leaf ids: 0, 1, then `free` base ids: taxon i sits at vertex inserted as free+1.
    // Reconstruct labels by tracking: taxon i (i >= 2) was attached as the
    // second new vertex at step i. Its id depends on the path taken, so
    // instead relabel by degree: leaves are the degree-1 vertices; their
    // creation order is 0, 1, then ascending id among new leaves.
    let mut out = Vec::with_capacity(partial.len());
    for edges in partial {
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in &edges {
            *deg.entry(a).or_insert(0) += 1;
            *deg.entry(b).or_insert(0) += 1;
        }
        let leaf_ids: Vec<usize> = deg
            .iter()
            .filter(|&(_, &d)| d == 1)
            .map(|(&v, _)| v)
            .collect();
        // Leaves were created with ascending ids in taxon order (0, 1, 3, 5, ...).
        let labels: Vec<(usize, String)> = leaf_ids
            .iter()
            .zip(taxa.iter())
            .map(|(&v, l)| (v, l.clone()))
            .collect();
        let (t, _) = PhyloTree::from_edges(&edges, &labels)?;
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;

    fn qa() -> PhyloTree {
        parse_newick("((a,b),(c,d));").unwrap()
    }

    fn qb() -> PhyloTree {
        parse_newick("((a,c),(b,d));").unwrap()
    }

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn spanning_subtree_of_cherry_is_a_path() {
        let t = qa();
        let sub = t.spanning_subtree(&s(&["a", "b"])).unwrap();
        assert_eq!(sub.edges.len(), 2);
        assert_eq!(sub.vertices.len(), 3);
    }

    #[test]
    fn spanning_subtree_singleton() {
        let t = qa();
        let sub = t.spanning_subtree(&s(&["a"])).unwrap();
        assert_eq!(sub.edges.len(), 0);
        assert_eq!(sub.vertices.len(), 1);
    }

    #[test]
    fn spanning_subtree_across_the_middle() {
        let t = qa();
        let sub = t.spanning_subtree(&s(&["a", "c"])).unwrap();
        assert_eq!(sub.edges.len(), 3);
    }

    // Brute-force oracle: the minimal connected subgraph containing S is the
    // connected vertex superset of S's leaves with the fewest vertices.
    fn brute_minimal_subgraph(t: &PhyloTree, labels: &[String]) -> (usize, usize) {
        let leaf_ids: Vec<usize> = labels.iter().map(|l| t.taxon_id(l).unwrap()).collect();
        let nv = t.n_vertices();
        let mut best: Option<(usize, usize)> = None;
        for mask in 0u32..(1 << nv) {
            if leaf_ids.iter().any(|&v| mask & (1 << v) == 0) {
                continue;
            }
            let verts: Vec<usize> = (0..nv).filter(|&v| mask & (1 << v) != 0).collect();
            // Connected check within the induced subgraph.
            let mut seen = vec![false; nv];
            let mut stack = vec![verts[0]];
            seen[verts[0]] = true;
            let mut cnt = 1;
            while let Some(v) = stack.pop() {
                for &w in t.neighbors(v) {
                    if mask & (1 << w) != 0 && !seen[w] {
                        seen[w] = true;
                        cnt += 1;
                        stack.push(w);
                    }
                }
            }
            if cnt != verts.len() {
                continue;
            }
            let edge_count = t
                .edges()
                .iter()
                .filter(|&&(a, b)| mask & (1 << a) != 0 && mask & (1 << b) != 0)
                .count();
            if best.map_or(true, |(bv, _)| verts.len() < bv) {
                best = Some((verts.len(), edge_count));
            }
        }
        best.unwrap()
    }

    #[test]
    fn spanning_subtree_matches_brute_oracle() {
        for seed in 0..20 {
            let taxa = s(&["a", "b", "c", "d", "e", "f"]);
            let t = random_tree(&taxa, seed).unwrap();
            for subset in [s(&["a", "b"]), s(&["a", "c", "e"]), s(&["b", "d", "e", "f"])] {
                let sub = t.spanning_subtree(&subset).unwrap();
                let (bv, be) = brute_minimal_subgraph(&t, &subset);
                assert_eq!(sub.vertices.len(), bv);
                assert_eq!(sub.edges.len(), be);
            }
        }
    }

    #[test]
    fn induced_subtree_of_three_taxa_is_a_star() {
        let t = qa();
        let (sub, _) = t.induced_subtree(&s(&["a", "b", "c"])).unwrap();
        assert_eq!(sub.n_taxa(), 3);
        assert_eq!(sub.n_vertices(), 4);
    }

    #[test]
    fn induced_subtree_full_set_is_identity() {
        let t = qa();
        let (sub, _) = t.induced_subtree(&s(&["a", "b", "c", "d"])).unwrap();
        assert!(trees_equal(&t, &sub).unwrap());
    }

    #[test]
    fn induced_subtree_of_caterpillar_is_quartet() {
        let taxa = s(&["x1", "x2", "x3", "x4", "x5", "x6"]);
        let t = caterpillar(&taxa).unwrap();
        let (sub, _) = t.induced_subtree(&s(&["x1", "x2", "x5", "x6"])).unwrap();
        let q = sub.quartet_topology(&s(&["x1", "x2", "x5", "x6"])).unwrap();
        assert_eq!(
            q,
            Quartet::new(
                ["x1".into(), "x2".into()],
                ["x5".into(), "x6".into()]
            )
        );
    }

    #[test]
    fn induced_subtree_counts() {
        for seed in 0..30 {
            let taxa: Vec<String> = (0..10).map(|i| format!("t{:02}", i)).collect();
            let t = random_tree(&taxa, seed).unwrap();
            let subset: Vec<String> = taxa.iter().take(5).cloned().collect();
            let (sub, _) = t.induced_subtree(&subset).unwrap();
            assert_eq!(sub.n_vertices(), 2 * 5 - 2);
            assert_eq!(sub.n_edges(), 2 * 5 - 3);
        }
    }

    #[test]
    fn set_degree_examples() {
        let t = qa();
        assert_eq!(t.set_degree(&s(&["a", "b"])).unwrap(), 1);
        assert_eq!(t.set_degree(&s(&["a", "b", "c", "d"])).unwrap(), 0);
        assert_eq!(t.set_degree(&s(&["a", "c"])).unwrap(), 2);
        assert_eq!(t.set_degree(&s(&["a"])).unwrap(), 1);
    }

    #[test]
    fn spanning_disjoint_examples() {
        let t = qa();
        assert!(t
            .are_spanning_disjoint(&[s(&["a", "b"]), s(&["c", "d"])])
            .unwrap());
        let t2 = qb();
        assert!(!t2
            .are_spanning_disjoint(&[s(&["a", "b"]), s(&["c", "d"])])
            .unwrap());
        assert!(t
            .are_spanning_disjoint(&[s(&["a"]), s(&["b"]), s(&["c"]), s(&["d"])])
            .unwrap());
        assert!(matches!(
            t.are_spanning_disjoint(&[s(&["a", "b"]), s(&["b", "c"])]),
            Err(Error::OverlappingBlocks)
        ));
    }

    #[test]
    fn singleton_blocks_always_spanning_disjoint() {
        for seed in 0..10 {
            let taxa: Vec<String> = (0..8).map(|i| format!("t{}", i)).collect();
            let t = random_tree(&taxa, seed).unwrap();
            let blocks: Vec<Vec<String>> = taxa.iter().map(|x| vec![x.clone()]).collect();
            assert!(t.are_spanning_disjoint(&blocks).unwrap());
        }
    }

    #[test]
    fn quartet_topology_examples() {
        let t = qa();
        let q = t.quartet_topology(&s(&["a", "b", "c", "d"])).unwrap();
        assert_eq!(
            q,
            Quartet::new(["a".into(), "b".into()], ["c".into(), "d".into()])
        );
        let t2 = qb();
        let q2 = t2.quartet_topology(&s(&["a", "b", "c", "d"])).unwrap();
        assert_eq!(
            q2,
            Quartet::new(["a".into(), "c".into()], ["b".into(), "d".into()])
        );
        let cat = caterpillar(&s(&["x1", "x2", "x3", "x4", "x5", "x6"])).unwrap();
        let q3 = cat.quartet_topology(&s(&["x1", "x3", "x4", "x6"])).unwrap();
        assert_eq!(
            q3,
            Quartet::new(["x1".into(), "x3".into()], ["x4".into(), "x6".into()])
        );
    }

    #[test]
    fn conflicting_quartet_examples() {
        let q = s(&["a", "b", "c", "d"]);
        assert!(is_conflicting_quartet(&qa(), &qb(), &q).unwrap());
        assert!(!is_conflicting_quartet(&qa(), &qa(), &q).unwrap());
    }

    #[test]
    fn trees_equal_under_reordering() {
        let t = qa();
        let u = parse_newick("((c,d),(b,a));").unwrap();
        assert!(trees_equal(&t, &u).unwrap());
        assert!(!trees_equal(&t, &qb()).unwrap());
    }

    fn quartet_set(t: &PhyloTree) -> BTreeSet<Quartet> {
        let taxa = t.taxa().to_vec();
        let n = taxa.len();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let q = vec![
                            taxa[i].clone(),
                            taxa[j].clone(),
                            taxa[k].clone(),
                            taxa[l].clone(),
                        ];
                        out.insert(t.quartet_topology(&q).unwrap());
                    }
                }
            }
        }
        out
    }

    #[test]
    fn trees_equal_agrees_with_quartet_characterization() {
        let taxa: Vec<String> = (0..7).map(|i| format!("t{}", i)).collect();
        for seed in 0..40 {
            let t1 = random_tree(&taxa, seed).unwrap();
            let t2 = random_tree(&taxa, seed + 1000).unwrap();
            let eq = trees_equal(&t1, &t2).unwrap();
            let qeq = quartet_set(&t1) == quartet_set(&t2);
            assert_eq!(eq, qeq);
        }
    }

    #[test]
    fn random_tree_small_cases() {
        let one = random_tree(&s(&["a"]), 7).unwrap();
        assert_eq!(one.n_vertices(), 1);
        let four = random_tree(&s(&["a", "b", "c", "d"]), 7).unwrap();
        assert_eq!(four.n_taxa(), 4);
        assert_eq!(four.n_vertices(), 6);
    }

    #[test]
    fn random_tree_uniform_over_topologies() {
        // 15 topologies on 5 taxa; chi-square style frequency check.
        let taxa = s(&["a", "b", "c", "d", "e"]);
        let all = enumerate_topologies(&taxa).unwrap();
        assert_eq!(all.len(), 15);
        let canon: Vec<String> = all.iter().map(|t| t.canonical_newick()).collect();
        let mut counts = vec![0usize; 15];
        let samples = 30_000;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..samples {
            let t = random_tree_with_rng(&taxa, &mut rng).unwrap();
            let c = t.canonical_newick();
            let idx = canon.iter().position(|x| *x == c).unwrap();
            counts[idx] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / samples as f64;
            assert!((freq - 1.0 / 15.0).abs() < 0.01, "freq {}", freq);
        }
    }

    #[test]
    fn enumerate_topologies_counts() {
        let t4 = enumerate_topologies(&s(&["a", "b", "c", "d"])).unwrap();
        assert_eq!(t4.len(), 3);
        let t6: Vec<String> = (0..6).map(|i| format!("t{}", i)).collect();
        assert_eq!(enumerate_topologies(&t6).unwrap().len(), 105);
        // All distinct.
        let canon: BTreeSet<String> = t4.iter().map(|t| t.canonical_newick()).collect();
        assert_eq!(canon.len(), 3);
    }

    #[test]
    fn tbr_move_on_four_taxa_gives_valid_topology() {
        let t = qa();
        for seed in 0..10 {
            let moved = random_tbr_move(&t, seed).unwrap();
            assert_eq!(moved.n_taxa(), 4);
            assert_eq!(moved.n_vertices(), 6);
        }
    }

    #[test]
    fn tbr_move_too_small() {
        let t = parse_newick("(a,b,c);").unwrap();
        assert!(matches!(random_tbr_move(&t, 1), Err(Error::TooSmall(4))));
    }
}
