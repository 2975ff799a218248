//! Graphs of cube complexes and their total spaces.
//!
//! A datum assigns a connected NPC complex to every vertex and edge of a
//! finite connected multigraph, with locally isometric attaching maps on
//! both ends of each edge. The total space keeps every vertex-space cell
//! and thickens each edge space by an interval: one horizontal edge per
//! edge-space vertex, one vertical square per edge-space edge, one prism
//! per edge-space square.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::complex::{
    Cube3Id, CubeComplex, CubeSpec, DirectedEdge, EdgeData, EdgeId, SquareId, SquareSides,
    VertexId, CORNERS,
};
use crate::error::{Error, Result};
use crate::hyperplane::{
    compute_hyperplanes, detect_pathologies, HyperplaneSet, OsculationSemantics, PathologyReport,
};
use crate::map::{check_local_isometry, same_complex, CubicalMap, EdgeImage, SquareImage};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaEdge {
    pub name: String,
    pub init: usize,
    pub term: usize,
}

/// Finite connected multigraph underlying a graph of complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamma {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<GammaEdge>,
}

impl Gamma {
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = vec![0usize];
        seen[0] = true;
        while let Some(u) = queue.pop() {
            for e in &self.edges {
                for (a, b) in [(e.init, e.term), (e.term, e.init)] {
                    if a == u && !seen[b] {
                        seen[b] = true;
                        queue.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Breadth-first spanning tree rooted at `base`; neighbors explored in
    /// edge order, forward end first.
    pub fn spanning_tree(&self, base: usize) -> Result<GammaTree> {
        let n = self.vertices.len();
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = vec![base];
        let mut tree_edges = BTreeSet::new();
        seen[base] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for (i, e) in self.edges.iter().enumerate() {
                if e.init == u && !seen[e.term] {
                    seen[e.term] = true;
                    parent[e.term] = Some((i, true));
                    tree_edges.insert(i);
                    order.push(e.term);
                }
                if e.term == u && !seen[e.init] {
                    seen[e.init] = true;
                    parent[e.init] = Some((i, false));
                    tree_edges.insert(i);
                    order.push(e.init);
                }
            }
        }
        if order.len() != n {
            return Err(Error::goc(&self.name, "underlying graph is not connected"));
        }
        Ok(GammaTree { base, parent, order, tree_edges })
    }
}

/// Spanning tree of the underlying graph. `parent[u]` records the edge to
/// `u` from its parent and whether it was traversed forward.
#[derive(Clone, Debug)]
pub struct GammaTree {
    pub base: usize,
    pub parent: Vec<Option<(usize, bool)>>,
    pub order: Vec<usize>,
    pub tree_edges: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct GraphOfComplexes {
    pub name: String,
    pub gamma: Gamma,
    pub vertex_spaces: Vec<Arc<CubeComplex>>,
    pub edge_spaces: Vec<Arc<CubeComplex>>,
    pub attach_minus: Vec<CubicalMap>,
    pub attach_plus: Vec<CubicalMap>,
}

impl GraphOfComplexes {
    /// Structural and curvature checks: connected underlying graph,
    /// connected NPC spaces, locally isometric attaching maps.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Error::goc(&self.name, msg);
        if !self.gamma.is_connected() {
            return Err(err("underlying graph is not connected".into()));
        }
        let mut names = BTreeSet::new();
        for n in self.gamma.vertices.iter().chain(self.gamma.edges.iter().map(|e| &e.name)) {
            if !names.insert(n.clone()) {
                return Err(err(format!("vertex/edge name {n:?} is not unique")));
            }
        }
        for (u, space) in self.vertex_spaces.iter().enumerate() {
            if !space.is_connected() {
                return Err(err(format!(
                    "vertex space over {} is not connected",
                    self.gamma.vertices[u]
                )));
            }
            if !space.validate().is_npc() {
                return Err(err(format!(
                    "vertex space over {} is not nonpositively curved",
                    self.gamma.vertices[u]
                )));
            }
        }
        for (i, e) in self.gamma.edges.iter().enumerate() {
            let space = &self.edge_spaces[i];
            if !space.is_connected() {
                return Err(err(format!("edge space over {} is not connected", e.name)));
            }
            if !space.validate().is_npc() {
                return Err(err(format!("edge space over {} is not nonpositively curved", e.name)));
            }
            for (map, end, gv) in [
                (&self.attach_minus[i], "-", e.init),
                (&self.attach_plus[i], "+", e.term),
            ] {
                if !same_complex(map.source(), space) {
                    return Err(err(format!(
                        "attaching map {} of {} does not start at its edge space",
                        end, e.name
                    )));
                }
                if !same_complex(map.target(), &self.vertex_spaces[gv]) {
                    return Err(err(format!(
                        "attaching map {} of {} does not land in the vertex space over {}",
                        end, e.name, self.gamma.vertices[gv]
                    )));
                }
                let report = check_local_isometry(map);
                if let Some(v) = report.violations.first() {
                    return Err(err(format!(
                        "attaching map {} of {} is not a local isometry: {:?}",
                        end, e.name, v
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    Space { gv: usize, e: EdgeId },
    Horizontal { ge: usize, v: VertexId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareOrigin {
    Space { gv: usize, s: SquareId },
    Vertical { ge: usize, e: EdgeId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubeOrigin {
    Space { gv: usize, c: Cube3Id },
    Prism { ge: usize, s: SquareId },
}

/// The quotient complex of a graph of complexes, with cell provenance.
#[derive(Clone, Debug)]
pub struct TotalSpace {
    pub complex: Arc<CubeComplex>,
    /// Every total vertex comes from a vertex space: (gvertex, vertex).
    pub vertex_origin: Vec<(usize, VertexId)>,
    pub edge_origin: Vec<EdgeOrigin>,
    pub square_origin: Vec<SquareOrigin>,
    pub cube_origin: Vec<CubeOrigin>,
    /// Inclusion of each vertex space.
    pub inclusions: Vec<CubicalMap>,
    /// Per edge of the underlying graph: horizontal edge over each
    /// edge-space vertex.
    pub horizontal: Vec<Vec<EdgeId>>,
}

/// Build the total space. The result must pass the NPC validation; a
/// failure indicates inconsistent attaching data.
pub fn total_space(g: &GraphOfComplexes) -> Result<TotalSpace> {
    let err = |msg: String| Error::goc(&g.name, msg);

    let nv = g.gamma.vertices.len();
    let mut vertex_offset = vec![0usize; nv];
    let mut edge_offset = vec![0usize; nv];
    let mut square_offset = vec![0usize; nv];
    let mut cube_offset = vec![0usize; nv];
    let mut vertices = Vec::new();
    let mut edges: Vec<EdgeData> = Vec::new();
    let mut squares = Vec::new();
    let mut cubes = Vec::new();
    let mut vertex_origin = Vec::new();
    let mut edge_origin = Vec::new();
    let mut square_origin = Vec::new();
    let mut cube_origin = Vec::new();

    for (u, space) in g.vertex_spaces.iter().enumerate() {
        let uname = &g.gamma.vertices[u];
        vertex_offset[u] = vertices.len();
        edge_offset[u] = edges.len();
        square_offset[u] = squares.len();
        cube_offset[u] = cubes.len();
        for v in space.vertex_ids() {
            vertices.push(format!("{uname}.{}", space.vertex_name(v)));
            vertex_origin.push((u, v));
        }
        let shift_v = |v: VertexId| VertexId((vertex_offset[u] + v.idx()) as u32);
        let shift_d = |d: DirectedEdge| DirectedEdge {
            edge: EdgeId((edge_offset[u] + d.edge.idx()) as u32),
            forward: d.forward,
        };
        for e in space.edge_ids() {
            let data = space.edge(e);
            edges.push(EdgeData {
                name: format!("{uname}.{}", data.name),
                init: shift_v(data.init),
                term: shift_v(data.term),
            });
            edge_origin.push(EdgeOrigin::Space { gv: u, e });
        }
        for s in space.square_ids() {
            let data = space.square(s);
            squares.push((
                format!("{uname}.{}", data.name),
                SquareSides {
                    bottom: shift_d(data.sides.bottom),
                    right: shift_d(data.sides.right),
                    top: shift_d(data.sides.top),
                    left: shift_d(data.sides.left),
                },
            ));
            square_origin.push(SquareOrigin::Space { gv: u, s });
        }
        for c in space.cube_ids() {
            let data = space.cube(c);
            cubes.push(CubeSpec {
                name: format!("{uname}.{}", data.name),
                bottom: SquareId((square_offset[u] + data.bottom.idx()) as u32),
                top: SquareId((square_offset[u] + data.top.idx()) as u32),
                corners: data.corners.map(shift_d),
                twist: Some(data.twist),
            });
            cube_origin.push(CubeOrigin::Space { gv: u, c });
        }
    }

    let mut horizontal: Vec<Vec<EdgeId>> = Vec::with_capacity(g.gamma.edges.len());
    for (i, ge) in g.gamma.edges.iter().enumerate() {
        let space = &g.edge_spaces[i];
        let minus = &g.attach_minus[i];
        let plus = &g.attach_plus[i];
        let (lo, hi) = (ge.init, ge.term);
        let ename = &ge.name;

        let mut horiz = Vec::with_capacity(space.n_vertices());
        for x in space.vertex_ids() {
            let id = EdgeId(edges.len() as u32);
            horiz.push(id);
            edges.push(EdgeData {
                name: format!("{ename}.{}", space.vertex_name(x)),
                init: VertexId((vertex_offset[lo] + minus.apply_vertex(x).idx()) as u32),
                term: VertexId((vertex_offset[hi] + plus.apply_vertex(x).idx()) as u32),
            });
            edge_origin.push(EdgeOrigin::Horizontal { ge: i, v: x });
        }

        for f in space.edge_ids() {
            let data = space.edge(f);
            let bottom = minus
                .apply_edge(DirectedEdge::fwd(f))
                .as_edge()
                .ok_or_else(|| err(format!("attaching map collapses edge {}", data.name)))?;
            let top = plus
                .apply_edge(DirectedEdge::fwd(f))
                .as_edge()
                .ok_or_else(|| err(format!("attaching map collapses edge {}", data.name)))?;
            squares.push((
                format!("{ename}.{}", data.name),
                SquareSides {
                    bottom: DirectedEdge {
                        edge: EdgeId((edge_offset[lo] + bottom.edge.idx()) as u32),
                        forward: bottom.forward,
                    },
                    right: DirectedEdge::fwd(horiz[data.term.idx()]),
                    top: DirectedEdge {
                        edge: EdgeId((edge_offset[hi] + top.edge.idx()) as u32),
                        forward: top.forward,
                    },
                    left: DirectedEdge::fwd(horiz[data.init.idx()]),
                },
            ));
            square_origin.push(SquareOrigin::Vertical { ge: i, e: f });
        }

        for s in space.square_ids() {
            let data = space.square(s);
            let (bs, bg) = match minus.apply_square(s) {
                SquareImage::Square(id, gd) => (id, gd),
                _ => return Err(err("attaching map collapses a square".into())),
            };
            let (ts, tg) = match plus.apply_square(s) {
                SquareImage::Square(id, gd) => (id, gd),
                _ => return Err(err("attaching map collapses a square".into())),
            };
            let bg_inv = bg.inverse();
            let corners = CORNERS.map(|c| {
                let pos = bg_inv.corner(c);
                let x = space.square_corner_vertex(&data.sides, pos);
                DirectedEdge::fwd(horiz[x.idx()])
            });
            cubes.push(CubeSpec {
                name: format!("{ename}.{}", data.name),
                bottom: SquareId((square_offset[lo] + bs.idx()) as u32),
                top: SquareId((square_offset[hi] + ts.idx()) as u32),
                corners,
                twist: Some(tg.compose(bg_inv)),
            });
            cube_origin.push(CubeOrigin::Prism { ge: i, s });
        }
        horizontal.push(horiz);
    }

    let complex = Arc::new(
        CubeComplex::assemble(format!("total_{}", g.name), vertices, edges, squares, cubes)
            .map_err(|e| err(format!("identification inconsistency: {e}")))?,
    );
    let report = complex.validate();
    if !report.is_npc() {
        return Err(err(format!(
            "total space is not nonpositively curved: {}",
            report.describe(&complex).join("; ")
        )));
    }

    let mut inclusions = Vec::with_capacity(nv);
    for (u, space) in g.vertex_spaces.iter().enumerate() {
        let vertex_map =
            space.vertex_ids().map(|v| VertexId((vertex_offset[u] + v.idx()) as u32)).collect();
        let edge_map = space
            .edge_ids()
            .map(|e| {
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId((edge_offset[u] + e.idx()) as u32)))
            })
            .collect();
        inclusions.push(CubicalMap::new(
            format!("inc.{}", g.gamma.vertices[u]),
            Arc::clone(space),
            Arc::clone(&complex),
            vertex_map,
            edge_map,
        )?);
    }

    Ok(TotalSpace {
        complex,
        vertex_origin,
        edge_origin,
        square_origin,
        cube_origin,
        inclusions,
        horizontal,
    })
}

/// Hyperplanes of a total space, split into the vertical hyperplane of each
/// thickened edge space and the rest.
#[derive(Clone, Debug)]
pub struct HyperplaneClassification {
    pub hyperplanes: HyperplaneSet,
    /// Per hyperplane: the underlying-graph edge it is vertical for.
    pub vertical: Vec<Option<usize>>,
    pub report: PathologyReport,
}

/// Classify hyperplanes and assert the unconditional facts about vertical
/// ones: a vertical hyperplane consists of horizontal edges of a single
/// thickened edge space, never crosses itself, and is 2-sided. A violation
/// is an internal error, not a property of the input.
pub fn classify_hyperplanes(t: &TotalSpace) -> Result<HyperplaneClassification> {
    let hyperplanes = compute_hyperplanes(&t.complex);
    let report = detect_pathologies(&t.complex, &hyperplanes, OsculationSemantics::DirectedClass);
    let mut vertical = vec![None; hyperplanes.len()];
    for (i, h) in hyperplanes.hyperplanes.iter().enumerate() {
        let mut ges = BTreeSet::new();
        let mut space_edges = 0usize;
        for e in &h.edges {
            match t.edge_origin[e.idx()] {
                EdgeOrigin::Horizontal { ge, .. } => {
                    ges.insert(ge);
                }
                EdgeOrigin::Space { .. } => space_edges += 1,
            }
        }
        match (ges.len(), space_edges) {
            (0, _) => {}
            (1, 0) => vertical[i] = Some(*ges.iter().next().unwrap()),
            _ => {
                return Err(Error::Internal(
                    "a hyperplane mixes horizontal edges with other edges".into(),
                ))
            }
        }
    }
    for (i, h) in hyperplanes.hyperplanes.iter().enumerate() {
        if vertical[i].is_none() {
            continue;
        }
        if !h.two_sided {
            return Err(Error::Internal("a vertical hyperplane is 1-sided".into()));
        }
        if report.self_crossings.iter().any(|(id, _)| *id == i) {
            return Err(Error::Internal("a vertical hyperplane crosses itself".into()));
        }
    }
    Ok(HyperplaneClassification { hyperplanes, vertical, report })
}

/// The two-vertex, one-edge datum with both attachments equal: two copies
/// of `base` glued along the immersion `f`.
pub fn double(base: &Arc<CubeComplex>, f: &CubicalMap, name: impl Into<String>) -> Result<(GraphOfComplexes, crate::monodromy::LocallyConstantStructure)> {
    let name = name.into();
    if !same_complex(f.target(), base) {
        return Err(Error::goc(&name, "edge map does not land in the base complex"));
    }
    let gamma = Gamma {
        name: name.clone(),
        vertices: vec!["u0".into(), "u1".into()],
        edges: vec![GammaEdge { name: "d0".into(), init: 0, term: 1 }],
    };
    let goc = GraphOfComplexes {
        name,
        gamma,
        vertex_spaces: vec![Arc::clone(base), Arc::clone(base)],
        edge_spaces: vec![Arc::clone(f.source())],
        attach_minus: vec![f.clone()],
        attach_plus: vec![f.clone()],
    };
    let lc = crate::monodromy::LocallyConstantStructure {
        thetas: vec![CubicalMap::identity(base)],
    };
    Ok((goc, lc))
}

/// Mapping torus of an automorphism: a loop edge with edge space the source
/// itself, attached by the identity and by `theta`.
pub fn mapping_torus(
    theta: &CubicalMap,
    name: impl Into<String>,
) -> Result<(GraphOfComplexes, crate::monodromy::LocallyConstantStructure)> {
    let name = name.into();
    if !same_complex(theta.source(), theta.target()) {
        return Err(Error::goc(&name, "mapping torus needs an automorphism"));
    }
    let base = Arc::clone(theta.source());
    let gamma = Gamma {
        name: name.clone(),
        vertices: vec!["u0".into()],
        edges: vec![GammaEdge { name: "d0".into(), init: 0, term: 0 }],
    };
    let goc = GraphOfComplexes {
        name,
        gamma,
        vertex_spaces: vec![Arc::clone(&base)],
        edge_spaces: vec![Arc::clone(&base)],
        attach_minus: vec![CubicalMap::identity(&base)],
        attach_plus: vec![theta.clone()],
    };
    let lc = crate::monodromy::LocallyConstantStructure { thetas: vec![theta.clone()] };
    Ok((goc, lc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn no_edges_total_space_is_the_vertex_space() {
        let rose = Arc::new(corpus::rose(2));
        let g = GraphOfComplexes {
            name: "solo".into(),
            gamma: Gamma { name: "solo".into(), vertices: vec!["u".into()], edges: vec![] },
            vertex_spaces: vec![Arc::clone(&rose)],
            edge_spaces: vec![],
            attach_minus: vec![],
            attach_plus: vec![],
        };
        g.validate().unwrap();
        let t = total_space(&g).unwrap();
        assert_eq!(t.complex.cell_counts(), rose.cell_counts());
        let cls = classify_hyperplanes(&t).unwrap();
        assert!(cls.vertical.iter().all(|v| v.is_none()));
    }

    #[test]
    fn double_of_rose_along_aab_cycle() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let (g, _lc) = double(&rose, &f, "double_aab").unwrap();
        g.validate().unwrap();
        let t = total_space(&g).unwrap();
        // 2 vertices, 4 copied loops + 3 horizontal edges, 3 vertical squares.
        assert_eq!(t.complex.cell_counts(), [2, 7, 3, 0]);
        assert_eq!(t.complex.euler_characteristic(), -2);
        let cls = classify_hyperplanes(&t).unwrap();
        let verticals: Vec<_> = cls.vertical.iter().flatten().collect();
        assert_eq!(verticals.len(), 1);
        // Unembedded attaching maps let the vertical hyperplane directly
        // self-osculate; the total space is not special.
        assert!(cls
            .report
            .direct_self_osculations
            .iter()
            .any(|(h, _)| cls.vertical[*h].is_some()));
    }

    #[test]
    fn double_along_embedded_loop_is_special() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::loop_a_inclusion(&rose);
        let (g, _lc) = double(&rose, &f, "double_a").unwrap();
        g.validate().unwrap();
        let t = total_space(&g).unwrap();
        let verdict =
            crate::hyperplane::check_special(&t.complex, OsculationSemantics::DirectedClass);
        assert!(verdict.special);
    }

    #[test]
    fn identity_mapping_torus_is_a_product() {
        let rose = Arc::new(corpus::rose(2));
        let id = CubicalMap::identity(&rose);
        let (g, _lc) = mapping_torus(&id, "rosecircle").unwrap();
        g.validate().unwrap();
        let t = total_space(&g).unwrap();
        assert_eq!(t.complex.euler_characteristic(), 0);
        let cls = classify_hyperplanes(&t).unwrap();
        assert_eq!(cls.vertical.iter().flatten().count(), 1);
    }

    #[test]
    fn torus_times_circle_has_prisms_and_is_npc() {
        let torus = Arc::new(corpus::torus());
        let id = CubicalMap::identity(&torus);
        let (g, _lc) = mapping_torus(&id, "toruscircle").unwrap();
        g.validate().unwrap();
        let t = total_space(&g).unwrap();
        assert_eq!(t.complex.cell_counts(), [1, 3, 3, 1]);
        assert_eq!(t.complex.euler_characteristic(), 0);
        assert!(t.complex.validate().is_npc());
    }

    #[test]
    fn swap_mapping_torus_of_torus_builds_with_twisted_prism() {
        // The transpose automorphism of the torus square (swap a and b).
        let torus = Arc::new(corpus::torus());
        let swap = CubicalMap::new(
            "swap",
            Arc::clone(&torus),
            Arc::clone(&torus),
            vec![VertexId(0)],
            vec![
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(1))),
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(0))),
            ],
        )
        .unwrap();
        assert!(swap.is_isomorphism());
        let (g, _lc) = mapping_torus(&swap, "twisttorus").unwrap();
        g.validate().unwrap();
        let t = total_space(&g).unwrap();
        assert_eq!(t.complex.cell_counts(), [1, 3, 3, 1]);
        assert!(t.complex.validate().is_npc());
        let cube = t.complex.cube(Cube3Id(0));
        assert!(!cube.twist.is_identity());
    }

    #[test]
    fn backtracking_attachment_is_rejected() {
        let rose = Arc::new(corpus::rose(1));
        let path2 = Arc::new(corpus::path(2));
        let a = DirectedEdge::fwd(EdgeId(0));
        let backtrack = CubicalMap::new(
            "bt",
            path2,
            Arc::clone(&rose),
            vec![VertexId(0); 3],
            vec![EdgeImage::Edge(a), EdgeImage::Edge(a.reversed())],
        )
        .unwrap();
        let g = GraphOfComplexes {
            name: "bad".into(),
            gamma: Gamma {
                name: "bad".into(),
                vertices: vec!["u0".into(), "u1".into()],
                edges: vec![GammaEdge { name: "d0".into(), init: 0, term: 1 }],
            },
            vertex_spaces: vec![Arc::clone(&rose), Arc::clone(&rose)],
            edge_spaces: vec![Arc::clone(backtrack.source())],
            attach_minus: vec![backtrack.clone()],
            attach_plus: vec![backtrack],
        };
        assert!(g.validate().is_err());
    }
}
