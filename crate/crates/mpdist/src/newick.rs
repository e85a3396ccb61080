//! Newick parsing and serialization, plus the character CSV reader.
//!
//! Grammar subset: `tree := subtree ';'`,
//! `subtree := leaf | '(' subtree (',' subtree)+ ')' [label] [':' float]`.
//! Branch lengths and internal labels are parsed and discarded; trees here are
//! purely topological.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::parsimony::Character;
use crate::tree::PhyloTree;

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<(usize, String)>,
    next_id: usize,
}

fn is_label_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-'
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn fresh(&mut self) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn read_label(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if is_label_byte(b)) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    /// Skip an optional internal label and an optional ":<float>" suffix.
    fn skip_decorations(&mut self) {
        self.skip_ws();
        // Internal label.
        while matches!(self.peek(), Some(b) if is_label_byte(b)) {
            self.pos += 1;
        }
        self.skip_ws();
        if self.peek() == Some(b':') {
            self.pos += 1;
            while matches!(self.peek(), Some(b) if is_label_byte(b) || b == b'+') {
                self.pos += 1;
            }
        }
        self.skip_ws();
    }

    /// Parse one subtree; returns the id of its root vertex.
    fn subtree(&mut self) -> Result<usize> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let node = self.fresh();
                loop {
                    let child = self.subtree()?;
                    self.edges.push((node, child));
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(Error::MalformedNewick(format!(
                                "expected ',' or ')' at byte {}",
                                self.pos
                            )))
                        }
                    }
                }
                self.skip_decorations();
                Ok(node)
            }
            Some(b) if is_label_byte(b) => {
                let node = self.fresh();
                let label = self.read_label();
                self.labels.push((node, label));
                self.skip_ws();
                if self.peek() == Some(b':') {
                    self.skip_decorations();
                }
                Ok(node)
            }
            _ => Err(Error::MalformedNewick(format!(
                "expected subtree at byte {}",
                self.pos
            ))),
        }
    }
}

/// Parse a single Newick expression into an unrooted binary tree.
///
/// A rooted parse whose root has degree 2 is unrooted by suppressing the root.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        edges: Vec::new(),
        labels: Vec::new(),
        next_id: 0,
    };
    let root = p.subtree()?;
    p.skip_ws();
    if p.peek() != Some(b';') {
        return Err(Error::MalformedNewick("missing ';' terminator".into()));
    }
    p.pos += 1;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::MalformedNewick("trailing input after ';'".into()));
    }
    for (_, l) in &p.labels {
        if l.is_empty() {
            return Err(Error::MalformedNewick("empty taxon label".into()));
        }
    }
    let mut edges = p.edges;
    // Suppress a degree-2 root (the standard rooted interchange convention).
    let root_deg = edges.iter().filter(|&&(a, b)| a == root || b == root).count();
    let root_labelled = p.labels.iter().any(|(v, _)| *v == root);
    if root_deg == 2 && !root_labelled {
        let nbrs: Vec<usize> = edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == root {
                    Some(b)
                } else if b == root {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        edges.retain(|&(a, b)| a != root && b != root);
        edges.push((nbrs[0], nbrs[1]));
    }
    let (tree, _) = PhyloTree::from_edges(&edges, &p.labels)?;
    Ok(tree)
}

/// Deterministic canonical Newick serialization.
///
/// The output is rooted at the internal vertex adjacent to the
/// lexicographically smallest taxon; at every level subtrees are ordered by
/// their smallest descendant taxon. Two trees are label-isomorphic iff their
/// canonical strings are equal.
pub fn write_newick(t: &PhyloTree) -> String {
    let n = t.n_taxa();
    match n {
        1 => return format!("{};", t.label(0)),
        2 => return format!("({},{});", t.label(0), t.label(1)),
        _ => {}
    }
    // Vertex 0 is the leaf with the smallest taxon; root at its neighbor.
    let root = t.neighbors(0)[0];

    // For each vertex (with given parent) produce (smallest descendant, text).
    fn render(t: &PhyloTree, v: usize, parent: usize) -> (String, String) {
        if t.is_leaf(v) {
            let l = t.label(v).to_string();
            return (l.clone(), l);
        }
        let mut kids: Vec<(String, String)> = t
            .neighbors(v)
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| render(t, w, v))
            .collect();
        kids.sort();
        let text = format!(
            "({})",
            kids.iter().map(|(_, s)| s.as_str()).collect::<Vec<_>>().join(",")
        );
        (kids[0].0.clone(), text)
    }

    let mut parts: Vec<(String, String)> = t
        .neighbors(root)
        .iter()
        .map(|&w| render(t, w, root))
        .collect();
    parts.sort();
    if n == 3 {
        // Star: root is the unique internal vertex, three leaf children.
        return format!("(({},{}),{});", parts[0].1, parts[1].1, parts[2].1);
    }
    format!("(({},{}),{});", parts[0].1, parts[1].1, parts[2].1)
}

/// Parse a "taxon,state" CSV into a character over exactly the given taxa.
///
/// State strings map to dense integer ids in first-appearance order.
pub fn parse_character_file(text: &str, taxa: &[String]) -> Result<Character> {
    let mut state_ids: HashMap<String, usize> = HashMap::new();
    let mut assignment: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let taxon = parts.next().unwrap_or("").trim();
        let state = match parts.next() {
            Some(s) => s.trim(),
            None => {
                return Err(Error::MalformedLine {
                    line: i + 1,
                    reason: "expected 'taxon,state'".into(),
                })
            }
        };
        if taxon.is_empty() || state.is_empty() {
            return Err(Error::MalformedLine {
                line: i + 1,
                reason: "empty field".into(),
            });
        }
        if !taxa.iter().any(|t| t == taxon) {
            return Err(Error::UnknownTaxon(taxon.to_string()));
        }
        if assignment.contains_key(taxon) {
            return Err(Error::MalformedLine {
                line: i + 1,
                reason: format!("taxon '{}' assigned twice", taxon),
            });
        }
        let next = state_ids.len();
        let id = *state_ids.entry(state.to_string()).or_insert(next);
        assignment.insert(taxon.to_string(), id);
    }
    for t in taxa {
        if !assignment.contains_key(t) {
            return Err(Error::MissingTaxon(t.clone()));
        }
    }
    Character::from_pairs(
        &assignment
            .into_iter()
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{random_tree, trees_equal};

    #[test]
    fn parses_quartet() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        assert_eq!(t.n_taxa(), 4);
        assert_eq!(t.n_vertices(), 6);
        let q = t
            .quartet_topology(&["a".into(), "b".into(), "c".into(), "d".into()])
            .unwrap();
        assert_eq!(
            q.split(),
            &[["a".to_string(), "b".to_string()], ["c".to_string(), "d".to_string()]]
        );
    }

    #[test]
    fn duplicate_taxon_rejected() {
        assert!(matches!(
            parse_newick("((a,b),(a,c));"),
            Err(Error::DuplicateTaxon(_))
        ));
    }

    #[test]
    fn trifurcating_root_is_fine_but_degree_four_is_not() {
        // Root of degree 3 in the rooted reading = ordinary internal vertex.
        let t = parse_newick("((a,b),(c,d),(e,f));").unwrap();
        assert_eq!(t.n_taxa(), 6);
        assert!(matches!(
            parse_newick("((a,b,c),d);"),
            Err(Error::NonBinary(_))
        ));
    }

    #[test]
    fn unbalanced_and_empty_labels_rejected() {
        assert!(matches!(
            parse_newick("((a,b),(c,d);"),
            Err(Error::MalformedNewick(_))
        ));
        assert!(matches!(
            parse_newick("((a,),(c,d));"),
            Err(Error::MalformedNewick(_))
        ));
        assert!(matches!(parse_newick("((a,b),(c,d))"), Err(Error::MalformedNewick(_))));
    }

    #[test]
    fn branch_lengths_and_internal_labels_ignored() {
        let t = parse_newick("((a:0.1,b:0.2)ab:0.3,(c:1,d:2)cd:3);").unwrap();
        let u = parse_newick("((a,b),(c,d));").unwrap();
        assert!(trees_equal(&t, &u).unwrap());
    }

    #[test]
    fn canonical_output() {
        let t = parse_newick("((d,c),(b,a));").unwrap();
        assert_eq!(write_newick(&t), "((a,b),(c,d));");
        let one = parse_newick("a;").unwrap();
        assert_eq!(write_newick(&one), "a;");
        let two = parse_newick("(b,a);").unwrap();
        assert_eq!(write_newick(&two), "(a,b);");
        let three = parse_newick("(c,a,b);").unwrap();
        assert_eq!(write_newick(&three), "((a,b),c);");
    }

    #[test]
    fn round_trip_random_trees() {
        for seed in 0..100u64 {
            let n = 4 + (seed as usize % 17);
            let taxa: Vec<String> = (0..n).map(|i| format!("t{:02}", i)).collect();
            let t = random_tree(&taxa, seed).unwrap();
            let back = parse_newick(&write_newick(&t)).unwrap();
            assert!(trees_equal(&t, &back).unwrap());
        }
    }

    #[test]
    fn character_file_basic() {
        let taxa: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let chi = parse_character_file("a,red\nb,red\nc,blue\nd,blue", &taxa).unwrap();
        assert_eq!(chi.num_states(), 2);
        assert_eq!(chi.state("a"), chi.state("b"));
        assert_eq!(chi.state("c"), chi.state("d"));
        assert_ne!(chi.state("a"), chi.state("c"));
        // First-appearance order: red = 0.
        assert_eq!(chi.state("a"), Some(0));
    }

    #[test]
    fn character_file_errors() {
        let two: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            parse_character_file("a,red", &two),
            Err(Error::MissingTaxon(_))
        ));
        assert!(matches!(
            parse_character_file("a,red\nz,blue", &two),
            Err(Error::UnknownTaxon(_))
        ));
        assert!(matches!(
            parse_character_file("a,red\nbadline", &two),
            Err(Error::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn character_file_all_singletons() {
        let taxa: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let chi = parse_character_file("a,r\nb,s\nc,t\nd,u", &taxa).unwrap();
        assert_eq!(chi.num_states(), 4);
    }

    #[test]
    fn crlf_accepted() {
        let taxa: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let chi = parse_character_file("a,x\r\nb,y\r\n", &taxa).unwrap();
        assert_eq!(chi.num_states(), 2);
    }
}
