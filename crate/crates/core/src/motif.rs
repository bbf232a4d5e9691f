//! Concrete expansions of the four motif kinds.
//!
//! Fragments use local node indices `0..node_count`; the instantiator
//! turns them into pattern elements.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest tree motif we enumerate shapes for.
pub const MAX_TREE_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotifKind {
    Path,
    Loop,
    Tree,
    Clique,
}

impl MotifKind {
    pub fn min_nodes(self) -> i64 {
        match self {
            MotifKind::Loop => 3,
            _ => 2,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            MotifKind::Path => "path",
            MotifKind::Loop => "loop",
            MotifKind::Tree => "tree",
            MotifKind::Clique => "clique",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MotifError {
    #[error("{kind} needs at least {min} nodes, got {nodes}")]
    BelowMinimum { kind: &'static str, nodes: usize, min: usize },
    #[error("tree shapes are enumerated up to {MAX_TREE_NODES} nodes, got {0}")]
    TreeTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifFragment {
    pub node_count: usize,
    /// `(from, to)` local pairs; orientation is meaningful only when directed.
    pub edges: Vec<(usize, usize)>,
    /// Node that external edges attach to (loop/clique first node, tree root).
    pub representative: usize,
    pub head: usize,
    pub tail: usize,
}

pub fn path(k: usize) -> Result<MotifFragment, MotifError> {
    check_min("path", k, 2)?;
    Ok(MotifFragment {
        node_count: k,
        edges: (0..k - 1).map(|i| (i, i + 1)).collect(),
        representative: 0,
        head: 0,
        tail: k - 1,
    })
}

pub fn cycle(k: usize) -> Result<MotifFragment, MotifError> {
    check_min("loop", k, 3)?;
    Ok(MotifFragment {
        node_count: k,
        edges: (0..k).map(|i| (i, (i + 1) % k)).collect(),
        representative: 0,
        head: 0,
        tail: 0,
    })
}

/// Complete graph; directed cliques carry both orientations per pair.
pub fn clique(k: usize, directed: bool) -> Result<MotifFragment, MotifError> {
    check_min("clique", k, 2)?;
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            edges.push((i, j));
            if directed {
                edges.push((j, i));
            }
        }
    }
    Ok(MotifFragment {
        node_count: k,
        edges,
        representative: 0,
        head: 0,
        tail: 0,
    })
}

/// An unlabeled rooted tree, stored as a parent array in BFS order
/// (node 0 is the root, `parent[0]` is unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeShape {
    pub parent: Vec<usize>,
    pub canonical: String,
    pub width: usize,
    pub depth: usize,
}

impl TreeShape {
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent-to-child edges.
    pub fn fragment(&self) -> MotifFragment {
        MotifFragment {
            node_count: self.parent.len(),
            edges: (1..self.parent.len()).map(|c| (self.parent[c], c)).collect(),
            representative: 0,
            head: 0,
            tail: 0,
        }
    }
}

/// AHU encoding of a rooted tree given as a parent array rooted at 0.
pub fn canonical_form(parent: &[usize]) -> String {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    for (c, &p) in parent.iter().enumerate().skip(1) {
        children[p].push(c);
    }
    fn enc(v: usize, children: &[Vec<usize>]) -> String {
        let mut parts: Vec<String> = children[v].iter().map(|&c| enc(c, children)).collect();
        parts.sort();
        format!("({})", parts.concat())
    }
    if n == 0 {
        return String::new();
    }
    enc(0, &children)
}

/// All rooted trees on `n` nodes up to isomorphism, sorted by
/// `(width, depth, canonical encoding)`.
pub fn rooted_trees(n: usize) -> Result<Vec<TreeShape>, MotifError> {
    if n > MAX_TREE_NODES {
        return Err(MotifError::TreeTooLarge(n));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // encodings[s] = canonical encodings of all rooted trees with s nodes
    let mut encodings: Vec<Vec<String>> = vec![Vec::new(); n + 1];
    encodings[1].push("()".to_string());
    for size in 2..=n {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        forests(size - 1, (usize::MAX, usize::MAX), &encodings, &mut chosen, &mut out);
        out.sort();
        out.dedup();
        encodings[size] = out;
    }
    let mut shapes: Vec<TreeShape> = encodings[n].iter().map(|c| shape_from_encoding(c)).collect();
    shapes.sort_by(|a, b| (a.width, a.depth, &a.canonical).cmp(&(b.width, b.depth, &b.canonical)));
    Ok(shapes)
}

// Multisets of subtrees with `remaining` total nodes, chosen in
// non-increasing (size, index) order so each multiset appears once.
fn forests(
    remaining: usize,
    bound: (usize, usize),
    encodings: &[Vec<String>],
    chosen: &mut Vec<String>,
    out: &mut Vec<String>,
) {
    if remaining == 0 {
        let mut parts = chosen.clone();
        parts.sort();
        out.push(format!("({})", parts.concat()));
        return;
    }
    for size in (1..=remaining.min(bound.0)).rev() {
        let count = encodings[size].len();
        let max_idx = if size == bound.0 { bound.1.min(count - 1) } else { count - 1 };
        for idx in (0..=max_idx).rev() {
            chosen.push(encodings[size][idx].clone());
            forests(remaining - size, (size, idx), encodings, chosen, out);
            chosen.pop();
        }
    }
}

fn shape_from_encoding(enc: &str) -> TreeShape {
    // parse nested parentheses into a children list
    let bytes = enc.as_bytes();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for &b in bytes {
        if b == b'(' {
            let id = children.len();
            children.push(Vec::new());
            if let Some(&p) = stack.last() {
                children[p].push(id);
            }
            stack.push(id);
        } else {
            stack.pop();
        }
    }
    // relabel in BFS order; children already appear in canonical order
    let n = children.len();
    let mut parent = vec![0; n];
    let mut level_sizes = Vec::new();
    let mut queue = VecDeque::from([(0usize, 0usize, 0usize)]);
    let mut next = 1;
    while let Some((old, new, level)) = queue.pop_front() {
        if level_sizes.len() <= level {
            level_sizes.push(0);
        }
        level_sizes[level] += 1;
        for &c in &children[old] {
            parent[next] = new;
            queue.push_back((c, next, level + 1));
            next += 1;
        }
    }
    TreeShape {
        canonical: canonical_form(&parent),
        parent,
        width: level_sizes.iter().copied().max().unwrap_or(0),
        depth: level_sizes.len().saturating_sub(1),
    }
}

/// Tree shapes on `n` nodes whose width and depth fall in the optional
/// inclusive bounds.
pub fn tree_shapes(
    n: usize,
    width: Option<(usize, usize)>,
    depth: Option<(usize, usize)>,
) -> Result<Vec<TreeShape>, MotifError> {
    check_min("tree", n, 2)?;
    let within = |v: usize, r: Option<(usize, usize)>| r.is_none_or(|(lo, hi)| lo <= v && v <= hi);
    Ok(rooted_trees(n)?
        .into_iter()
        .filter(|s| within(s.width, width) && within(s.depth, depth))
        .collect())
}

fn check_min(kind: &'static str, nodes: usize, min: usize) -> Result<(), MotifError> {
    if nodes < min {
        Err(MotifError::BelowMinimum { kind, nodes, min })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_edge_counts() {
        assert_eq!(clique(4, false).unwrap().edges.len(), 6);
        assert_eq!(clique(4, true).unwrap().edges.len(), 12);
        assert!(clique(1, false).is_err());
    }

    #[test]
    fn directed_loop_is_consistently_oriented() {
        let l = cycle(3).unwrap();
        assert_eq!(l.edges, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(
            cycle(2).unwrap_err(),
            MotifError::BelowMinimum {
                kind: "loop",
                nodes: 2,
                min: 3
            }
        );
    }

    #[test]
    fn path_exposes_head_and_tail() {
        let p = path(4).unwrap();
        assert_eq!(p.edges.len(), 3);
        assert_eq!((p.head, p.tail), (0, 3));
    }

    #[test]
    fn four_node_trees_under_bounds() {
        let shapes = tree_shapes(4, Some((1, 3)), Some((1, 3))).unwrap();
        assert_eq!(shapes.len(), 4);
        let depths: Vec<usize> = shapes.iter().map(|s| s.depth).collect();
        assert!(depths.contains(&3) && depths.contains(&1));
        // depth bound of 2 drops the bare path
        assert_eq!(tree_shapes(4, None, Some((1, 2))).unwrap().len(), 3);
    }

    #[test]
    fn shapes_are_bfs_labelled() {
        for s in rooted_trees(6).unwrap() {
            assert!(s.parent.iter().enumerate().skip(1).all(|(c, &p)| p < c));
            assert_eq!(canonical_form(&s.parent), s.canonical);
            assert_eq!(s.fragment().edges.len(), 5);
        }
    }

    #[test]
    fn tree_cap() {
        assert_eq!(rooted_trees(8).unwrap().len(), 115);
        assert_eq!(rooted_trees(9).unwrap_err(), MotifError::TreeTooLarge(9));
    }
}
