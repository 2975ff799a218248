//! Fundamental group presentations from the 2-skeleton: one generator per
//! non-tree edge of a breadth-first spanning tree, one relator per square
//! (the boundary word with tree edges deleted).

use std::collections::BTreeSet;

use crate::complex::{CubeComplex, DirectedEdge, EdgeId, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub base: VertexId,
    pub tree_edges: BTreeSet<EdgeId>,
    /// Directed edge from the parent into each non-base vertex.
    pub parent: Vec<Option<DirectedEdge>>,
    pub bfs_order: Vec<VertexId>,
}

impl SpanningTree {
    /// Directed edge path from `v` down to the base.
    pub fn path_to_base(&self, c: &CubeComplex, v: VertexId) -> Vec<DirectedEdge> {
        let mut path = Vec::new();
        let mut at = v;
        while let Some(d) = self.parent[at.idx()] {
            path.push(d.reversed());
            at = c.initial(d);
        }
        path
    }
}

/// Breadth-first spanning tree by vertex and edge order.
pub fn spanning_tree(c: &CubeComplex, base: VertexId) -> Result<SpanningTree> {
    let mut parent = vec![None; c.n_vertices()];
    let mut seen = vec![false; c.n_vertices()];
    let mut tree_edges = BTreeSet::new();
    let mut bfs_order = vec![base];
    seen[base.idx()] = true;
    let mut head = 0;
    while head < bfs_order.len() {
        let u = bfs_order[head];
        head += 1;
        for d in c.ends_at(u) {
            let w = c.terminal(*d);
            if !seen[w.idx()] {
                seen[w.idx()] = true;
                parent[w.idx()] = Some(*d);
                tree_edges.insert(d.edge);
                bfs_order.push(w);
            }
        }
    }
    if bfs_order.len() != c.n_vertices() {
        return Err(Error::structure(c.name(), "complex is not connected"));
    }
    Ok(SpanningTree { base, tree_edges, parent, bfs_order })
}

/// A word in the generators: (generator index, inverted).
pub type Word = Vec<(usize, bool)>;

#[derive(Clone, Debug)]
pub struct Presentation {
    pub base: VertexId,
    pub tree: SpanningTree,
    /// Non-tree edges, ascending.
    pub generators: Vec<EdgeId>,
    /// One relator per square: boundary word bottom, right, top^-1,
    /// left^-1 with tree edges deleted. May be empty.
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn generator_index(&self, e: EdgeId) -> Option<usize> {
        self.generators.binary_search(&e).ok()
    }

    /// Express a directed edge path as a word in the generators.
    pub fn word_of_path(&self, path: &[DirectedEdge]) -> Word {
        path.iter()
            .filter_map(|d| self.generator_index(d.edge).map(|g| (g, !d.forward)))
            .collect()
    }

    /// The loop at the base determined by a non-tree edge, as a word.
    pub fn generator_loop(&self, c: &CubeComplex, gen: usize) -> Vec<DirectedEdge> {
        let e = self.generators[gen];
        let d = DirectedEdge::fwd(e);
        let mut up = self.tree.path_to_base(c, c.initial(d));
        up.reverse();
        let mut path: Vec<DirectedEdge> = up.into_iter().map(|d| d.reversed()).collect();
        path.push(d);
        path.extend(self.tree.path_to_base(c, c.terminal(d)));
        path
    }
}

pub fn presentation(c: &CubeComplex, base: VertexId) -> Result<Presentation> {
    let tree = spanning_tree(c, base)?;
    let generators: Vec<EdgeId> =
        c.edge_ids().filter(|e| !tree.tree_edges.contains(e)).collect();
    let pres = Presentation { base, tree, generators, relators: Vec::new() };
    let mut relators = Vec::with_capacity(c.n_squares());
    for s in c.square_ids() {
        let sides = c.square(s).sides;
        let boundary =
            [sides.bottom, sides.right, sides.top.reversed(), sides.left.reversed()];
        relators.push(pres.word_of_path(&boundary));
    }
    Ok(Presentation { relators, ..pres })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn rose_presentation_is_free() {
        let r = corpus::rose(2);
        let p = presentation(&r, VertexId(0)).unwrap();
        assert_eq!(p.generators.len(), 2);
        assert!(p.relators.is_empty());
    }

    #[test]
    fn torus_presentation_is_the_commutator() {
        let t = corpus::torus();
        let p = presentation(&t, VertexId(0)).unwrap();
        assert_eq!(p.generators.len(), 2);
        assert_eq!(p.relators.len(), 1);
        assert_eq!(p.relators[0], vec![(0, false), (1, false), (0, true), (1, true)]);
    }

    #[test]
    fn three_cycle_has_one_generator() {
        let c = corpus::cycle(3);
        let p = presentation(&c, VertexId(0)).unwrap();
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
        assert_eq!(p.tree.tree_edges.len(), 2);
    }

    #[test]
    fn relator_count_matches_square_count() {
        for c in [corpus::torus(), corpus::klein_square(), corpus::solid_cube()] {
            let p = presentation(&c, VertexId(0)).unwrap();
            assert_eq!(p.relators.len(), c.n_squares());
        }
    }

    #[test]
    fn generator_loops_start_and_end_at_base() {
        let c = corpus::cycle(4);
        let p = presentation(&c, VertexId(0)).unwrap();
        for g in 0..p.generators.len() {
            let path = p.generator_loop(&c, g);
            assert_eq!(c.initial(path[0]), VertexId(0));
            assert_eq!(c.terminal(*path.last().unwrap()), VertexId(0));
            for w in path.windows(2) {
                assert_eq!(c.terminal(w[0]), c.initial(w[1]));
            }
        }
    }
}
