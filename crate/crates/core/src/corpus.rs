//! Small named complexes and maps used across tests, docs, and the CLI
//! examples. Everything here is deterministic.

use std::sync::Arc;

use crate::complex::{
    CubeComplex, CubeSpec, DirectedEdge, EdgeData, EdgeId, SquareSides, VertexId,
};
use crate::error::Result;
use crate::map::{CubicalMap, EdgeImage};

fn loop_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("e{i}")
            }
        })
        .collect()
}

/// Wedge of `n` loops at a single vertex, edges named `a`, `b`, ...
pub fn rose(n: usize) -> CubeComplex {
    let edges = loop_names(n)
        .into_iter()
        .map(|name| EdgeData { name, init: VertexId(0), term: VertexId(0) })
        .collect();
    CubeComplex::assemble(format!("rose{n}"), vec!["v".into()], edges, vec![], vec![])
        .expect("rose is structurally valid")
}

/// Cycle with `n` vertices and `n` edges `c0..c{n-1}`; `cycle(1)` is a loop.
pub fn cycle(n: usize) -> CubeComplex {
    assert!(n >= 1);
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let edges = (0..n)
        .map(|i| EdgeData {
            name: format!("c{i}"),
            init: VertexId(i as u32),
            term: VertexId(((i + 1) % n) as u32),
        })
        .collect();
    CubeComplex::assemble(format!("cycle{n}"), vertices, edges, vec![], vec![])
        .expect("cycle is structurally valid")
}

/// Path with `n` edges and `n+1` vertices.
pub fn path(n: usize) -> CubeComplex {
    let vertices = (0..=n).map(|i| format!("v{i}")).collect();
    let edges = (0..n)
        .map(|i| EdgeData {
            name: format!("p{i}"),
            init: VertexId(i as u32),
            term: VertexId(i as u32 + 1),
        })
        .collect();
    CubeComplex::assemble(format!("path{n}"), vertices, edges, vec![], vec![])
        .expect("path is structurally valid")
}

/// A single vertex.
pub fn point() -> CubeComplex {
    CubeComplex::assemble("point", vec!["v".into()], vec![], vec![], vec![])
        .expect("point is structurally valid")
}

/// One square complex of the torus: one vertex, loops `a`, `b`, square with
/// boundary word a b a^-1 b^-1.
pub fn torus() -> CubeComplex {
    let edges = vec![
        EdgeData { name: "a".into(), init: VertexId(0), term: VertexId(0) },
        EdgeData { name: "b".into(), init: VertexId(0), term: VertexId(0) },
    ];
    let sides = SquareSides {
        bottom: DirectedEdge::fwd(EdgeId(0)),
        right: DirectedEdge::fwd(EdgeId(1)),
        top: DirectedEdge::fwd(EdgeId(0)),
        left: DirectedEdge::fwd(EdgeId(1)),
    };
    CubeComplex::assemble(
        "torus",
        vec!["v".into()],
        edges,
        vec![("s".into(), sides)],
        vec![],
    )
    .expect("torus is structurally valid")
}

/// One square complex of the Klein bottle: like the torus but the top side
/// runs against the bottom, so the hyperplane dual to `a` is 1-sided.
pub fn klein_square() -> CubeComplex {
    let edges = vec![
        EdgeData { name: "a".into(), init: VertexId(0), term: VertexId(0) },
        EdgeData { name: "b".into(), init: VertexId(0), term: VertexId(0) },
    ];
    let sides = SquareSides {
        bottom: DirectedEdge::fwd(EdgeId(0)),
        right: DirectedEdge::fwd(EdgeId(1)),
        top: DirectedEdge::rev(EdgeId(0)),
        left: DirectedEdge::fwd(EdgeId(1)),
    };
    CubeComplex::assemble(
        "klein",
        vec!["v".into()],
        edges,
        vec![("s".into(), sides)],
        vec![],
    )
    .expect("klein square is structurally valid")
}

/// A square all four of whose sides are the same loop. Parses, but the link
/// at the vertex has looped and doubled edges, so it is not NPC.
pub fn loop_square() -> CubeComplex {
    let edges = vec![EdgeData { name: "a".into(), init: VertexId(0), term: VertexId(0) }];
    let a = DirectedEdge::fwd(EdgeId(0));
    let sides = SquareSides { bottom: a, right: a, top: a, left: a };
    CubeComplex::assemble(
        "loopsquare",
        vec!["v".into()],
        edges,
        vec![("s".into(), sides)],
        vec![],
    )
    .expect("loop square is structurally valid")
}

fn solid_cube_parts() -> (Vec<String>, Vec<EdgeData>, Vec<(String, SquareSides)>) {
    let vname = |x: usize, y: usize, z: usize| format!("v{x}{y}{z}");
    let vertices: Vec<String> = (0..8).map(|i| vname(i & 1, (i >> 1) & 1, i >> 2)).collect();
    let vid = |x: usize, y: usize, z: usize| VertexId((x + 2 * y + 4 * z) as u32);
    let mut edges = Vec::new();
    let mut eid = std::collections::BTreeMap::new();
    // x-, y-, z-direction edges in a fixed order.
    for z in 0..2 {
        for y in 0..2 {
            eid.insert(format!("ex{y}{z}"), EdgeId(edges.len() as u32));
            edges.push(EdgeData { name: format!("ex{y}{z}"), init: vid(0, y, z), term: vid(1, y, z) });
        }
    }
    for z in 0..2 {
        for x in 0..2 {
            eid.insert(format!("ey{x}{z}"), EdgeId(edges.len() as u32));
            edges.push(EdgeData { name: format!("ey{x}{z}"), init: vid(x, 0, z), term: vid(x, 1, z) });
        }
    }
    for y in 0..2 {
        for x in 0..2 {
            eid.insert(format!("ez{x}{y}"), EdgeId(edges.len() as u32));
            edges.push(EdgeData { name: format!("ez{x}{y}"), init: vid(x, y, 0), term: vid(x, y, 1) });
        }
    }
    let de = |name: &str| DirectedEdge::fwd(eid[name]);
    let squares = vec![
        ("szb".to_string(), SquareSides { bottom: de("ex00"), right: de("ey10"), top: de("ex10"), left: de("ey00") }),
        ("szt".to_string(), SquareSides { bottom: de("ex01"), right: de("ey11"), top: de("ex11"), left: de("ey01") }),
        ("syb".to_string(), SquareSides { bottom: de("ex00"), right: de("ez10"), top: de("ex01"), left: de("ez00") }),
        ("syt".to_string(), SquareSides { bottom: de("ex10"), right: de("ez11"), top: de("ex11"), left: de("ez01") }),
        ("sxb".to_string(), SquareSides { bottom: de("ey00"), right: de("ez01"), top: de("ey01"), left: de("ez00") }),
        ("sxt".to_string(), SquareSides { bottom: de("ey10"), right: de("ez11"), top: de("ey11"), left: de("ez10") }),
    ];
    (vertices, edges, squares)
}

/// The solid 3-cube: 8 vertices, 12 edges, 6 squares, one filling cube.
pub fn solid_cube() -> CubeComplex {
    let (vertices, edges, squares) = solid_cube_parts();
    let eid = |name: &str| {
        EdgeId(edges.iter().position(|e| e.name == name).unwrap() as u32)
    };
    let cube = CubeSpec {
        name: "c".into(),
        bottom: crate::complex::SquareId(0),
        top: crate::complex::SquareId(1),
        corners: [
            DirectedEdge::fwd(eid("ez00")),
            DirectedEdge::fwd(eid("ez10")),
            DirectedEdge::fwd(eid("ez01")),
            DirectedEdge::fwd(eid("ez11")),
        ],
        twist: None,
    };
    CubeComplex::assemble("solidcube", vertices, edges, squares, vec![cube])
        .expect("solid cube is structurally valid")
}

/// The boundary squares of a 3-cube with no filling cube: every vertex link
/// is an empty triangle, violating the flag condition.
pub fn cube_corner_without_filler() -> CubeComplex {
    let (vertices, edges, squares) = solid_cube_parts();
    CubeComplex::assemble("hollowcube", vertices, edges, squares, vec![])
        .expect("hollow cube is structurally valid")
}

/// Product of a 1-dimensional complex with an interval.
pub fn graph_times_interval(g: &CubeComplex) -> Result<CubeComplex> {
    if g.n_squares() > 0 {
        return Err(crate::error::Error::structure(
            g.name(),
            "graph_times_interval expects a 1-dimensional complex",
        ));
    }
    let n = g.n_vertices();
    let mut vertices = Vec::new();
    for level in 0..2 {
        for v in g.vertex_ids() {
            vertices.push(format!("{}.{level}", g.vertex_name(v)));
        }
    }
    let mut edges = Vec::new();
    for level in 0..2u32 {
        for e in g.edge_ids() {
            let d = g.edge(e);
            edges.push(EdgeData {
                name: format!("{}.{level}", d.name),
                init: VertexId(d.init.0 + level * n as u32),
                term: VertexId(d.term.0 + level * n as u32),
            });
        }
    }
    let rung_base = edges.len() as u32;
    for v in g.vertex_ids() {
        edges.push(EdgeData {
            name: format!("{}.01", g.vertex_name(v)),
            init: v,
            term: VertexId(v.0 + n as u32),
        });
    }
    let mut squares = Vec::new();
    for e in g.edge_ids() {
        let d = g.edge(e);
        squares.push((
            format!("{}.sq", d.name),
            SquareSides {
                bottom: DirectedEdge::fwd(e),
                right: DirectedEdge::fwd(EdgeId(rung_base + d.term.0)),
                top: DirectedEdge::fwd(EdgeId(e.0 + g.n_edges() as u32)),
                left: DirectedEdge::fwd(EdgeId(rung_base + d.init.0)),
            },
        ));
    }
    CubeComplex::assemble(format!("{}xI", g.name()), vertices, edges, squares, vec![])
}

/// Two squares in a strip whose outer parallel sides both start at `v`. The
/// hyperplane through the strip directly self-osculates at `v`, and it also
/// inter-osculates with the two side hyperplanes.
pub fn self_osculating_strip() -> CubeComplex {
    let vertices = vec!["v".into(), "a".into(), "b".into(), "u".into(), "d".into()];
    let (v, a, b, u, d) = (VertexId(0), VertexId(1), VertexId(2), VertexId(3), VertexId(4));
    let edges = vec![
        EdgeData { name: "e1".into(), init: v, term: a },
        EdgeData { name: "s1".into(), init: a, term: b },
        EdgeData { name: "m".into(), init: u, term: b },
        EdgeData { name: "l1".into(), init: v, term: u },
        EdgeData { name: "l2".into(), init: u, term: v },
        EdgeData { name: "s2".into(), init: b, term: d },
        EdgeData { name: "e2".into(), init: v, term: d },
    ];
    let de = |i: u32| DirectedEdge::fwd(EdgeId(i));
    let squares = vec![
        ("q1".to_string(), SquareSides { bottom: de(0), right: de(1), top: de(2), left: de(3) }),
        ("q2".to_string(), SquareSides { bottom: de(2), right: de(5), top: de(6), left: de(4) }),
    ];
    CubeComplex::assemble("strip", vertices, edges, squares, vec![])
        .expect("strip is structurally valid")
}

/// One square plus an identification making two distinct hyperplanes both
/// cross (inside the square) and osculate (at a vertex where their dual
/// edge-ends are not consecutive).
pub fn crossing_osculating_square() -> CubeComplex {
    let vertices = vec!["v1".into(), "a".into(), "b".into()];
    let (v1, a, b) = (VertexId(0), VertexId(1), VertexId(2));
    let edges = vec![
        EdgeData { name: "e1".into(), init: v1, term: a },
        EdgeData { name: "e2".into(), init: a, term: b },
        EdgeData { name: "f1".into(), init: a, term: b },
        EdgeData { name: "f2".into(), init: v1, term: a },
    ];
    let de = |i: u32| DirectedEdge::fwd(EdgeId(i));
    let squares = vec![(
        "q".to_string(),
        SquareSides { bottom: de(0), right: de(2), top: de(1), left: de(3) },
    )];
    CubeComplex::assemble("interosc", vertices, edges, squares, vec![])
        .expect("interosc square is structurally valid")
}

/// Immersion of a cycle into a complex along a closed non-backtracking edge
/// word. `word[i]` is the directed edge the i-th cycle edge maps to.
pub fn cycle_immersion(
    name: &str,
    target: &Arc<CubeComplex>,
    word: &[DirectedEdge],
) -> Result<CubicalMap> {
    let n = word.len();
    let source = Arc::new(cycle(n));
    let mut vertex_map = Vec::with_capacity(n);
    let mut at = target.initial(word[0]);
    for d in word {
        vertex_map.push(at);
        at = target.terminal(*d);
    }
    let edge_map = word.iter().map(|d| EdgeImage::Edge(*d)).collect();
    CubicalMap::new(name, source, Arc::clone(target), vertex_map, edge_map)
}

/// The standard immersed 3-cycle in the rose on `a`, `b` reading a, a, b.
pub fn aab_immersion(rose2: &Arc<CubeComplex>) -> CubicalMap {
    let a = DirectedEdge::fwd(EdgeId(0));
    let b = DirectedEdge::fwd(EdgeId(1));
    cycle_immersion("aab", rose2, &[a, a, b]).expect("aab cycle immerses in the rose")
}

/// Inclusion of the loop `a` into the rose on `a`, `b`.
pub fn loop_a_inclusion(rose2: &Arc<CubeComplex>) -> CubicalMap {
    let source = Arc::new(cycle(1));
    CubicalMap::new(
        "inca",
        source,
        Arc::clone(rose2),
        vec![VertexId(0)],
        vec![EdgeImage::Edge(DirectedEdge::fwd(EdgeId(0)))],
    )
    .expect("loop inclusion is a valid map")
}

/// The automorphism of `rose(n)` permuting the loops by `perm` (and fixing
/// directions).
pub fn rose_loop_permutation(rose_n: &Arc<CubeComplex>, perm: &[usize]) -> CubicalMap {
    assert_eq!(perm.len(), rose_n.n_edges());
    let edge_map = perm
        .iter()
        .map(|&i| EdgeImage::Edge(DirectedEdge::fwd(EdgeId(i as u32))))
        .collect();
    CubicalMap::new(
        "roseperm",
        Arc::clone(rose_n),
        Arc::clone(rose_n),
        vec![VertexId(0)],
        edge_map,
    )
    .expect("loop permutation is a valid map")
}
