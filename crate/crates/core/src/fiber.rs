//! Fiber products of a map with a finite cover, components, and
//! elevations.
//!
//! The fiber product of `f: Y -> X` with a cover of `X` has one cell
//! (c, sheet) for every cell c of Y; the sheet changes across an edge by
//! the voltage of its image (collapsed edges keep the sheet). Connected
//! components are the elevations of Y; each restricts to a cover of Y and
//! maps into the total space of the cover.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{CubeComplex, DirectedEdge, Subcomplex, VertexId};
use crate::cover::{lift_cells, CoveringSpace, Permutation};
use crate::error::{Error, Result};
use crate::map::{check_local_isometry, same_complex, CubicalMap, EdgeImage};
use crate::presentation::presentation;
use crate::unionfind::UnionFind;

/// One connected component of a fiber product.
#[derive(Clone, Debug)]
pub struct Elevation {
    pub complex: Arc<CubeComplex>,
    /// Elevation map into the cover total space; a local isometry whenever
    /// the base map is one.
    pub to_cover: CubicalMap,
    /// Restriction over the source: a covering of Y.
    pub over_source: CubicalMap,
    /// Covering degree over Y.
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub map: CubicalMap,
    pub cover: CoveringSpace,
    pub total: Arc<CubeComplex>,
    pub to_source: CubicalMap,
    pub to_cover: CubicalMap,
    /// Component index of each (Y vertex, sheet).
    pub component_of: Vec<Vec<usize>>,
    pub elevations: Vec<Elevation>,
    /// (Y cell, sheet) of each total cell.
    pub vertex_fiber: Vec<(VertexId, usize)>,
    pub edge_fiber: Vec<(crate::complex::EdgeId, usize)>,
}

/// Compute the fiber product. Plain maps must be local isometries; a
/// collapsing map (the retraction of a graph of complexes) is allowed and
/// keeps the sheet across collapsed edges.
pub fn fiber_product(f: &CubicalMap, cover: &CoveringSpace) -> Result<FiberProduct> {
    if !same_complex(f.target(), &cover.base) {
        return Err(Error::map(f.name(), "map does not land in the base of the cover"));
    }
    if f.is_plain() && !check_local_isometry(f).is_local_isometry() {
        return Err(Error::map(f.name(), "map is not a local isometry"));
    }
    let source = Arc::clone(f.source());
    let degree = cover.degree();
    let transition = |d: DirectedEdge, s: usize| match f.apply_edge(d) {
        EdgeImage::Edge(image) => cover.voltages.transition(image, s),
        EdgeImage::Vertex(_) => s,
    };
    let cells = lift_cells(&source, degree, &transition)?;
    let total = Arc::new(CubeComplex::assemble(
        format!("{}x{}", source.name(), cover.total.name()),
        cells.vertices,
        cells.edges,
        cells.squares,
        cells.cubes,
    )?);

    let to_source = CubicalMap::new(
        format!("pr_{}", source.name()),
        Arc::clone(&total),
        Arc::clone(&source),
        cells.vertex_fiber.iter().map(|(v, _)| *v).collect(),
        cells
            .edge_fiber
            .iter()
            .map(|(e, _)| EdgeImage::Edge(DirectedEdge::fwd(*e)))
            .collect(),
    )?;
    let to_cover = CubicalMap::new(
        format!("pr_{}", cover.total.name()),
        Arc::clone(&total),
        Arc::clone(&cover.total),
        cells
            .vertex_fiber
            .iter()
            .map(|(v, s)| cover.lifted_vertex(f.apply_vertex(*v), *s))
            .collect(),
        cells
            .edge_fiber
            .iter()
            .map(|(e, s)| {
                let d = DirectedEdge::fwd(*e);
                match f.apply_edge(d) {
                    EdgeImage::Edge(image) => {
                        // Lift of the image edge anchored at the sheet of
                        // its forward-initial vertex.
                        let anchor = if image.forward {
                            *s
                        } else {
                            cover.voltages.transition(image, *s)
                        };
                        let lifted = crate::complex::EdgeId(
                            (anchor * cover.base.n_edges() + image.edge.idx()) as u32,
                        );
                        EdgeImage::Edge(DirectedEdge { edge: lifted, forward: image.forward })
                    }
                    EdgeImage::Vertex(w) => EdgeImage::Vertex(cover.lifted_vertex(w, *s)),
                }
            })
            .collect(),
    )?;

    // Components via union-find over (vertex, sheet).
    let nv = source.n_vertices();
    let mut uf = UnionFind::new(nv * degree);
    for e in source.edge_ids() {
        let data = source.edge(e);
        for s in 0..degree {
            let t = transition(DirectedEdge::fwd(e), s);
            uf.union(s * nv + data.init.idx(), t * nv + data.term.idx());
        }
    }
    let roots = uf.roots();
    let mut component_index: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &roots {
        let next = component_index.len();
        component_index.entry(r).or_insert(next);
    }
    let mut component_of = vec![vec![0usize; degree]; nv];
    for v in 0..nv {
        for s in 0..degree {
            component_of[v][s] = component_index[&roots[s * nv + v]];
        }
    }

    let n_components = component_index.len();
    let mut elevations = Vec::with_capacity(n_components);
    for comp in 0..n_components {
        let mut sub = Subcomplex::default();
        for (i, (_, s)) in cells.vertex_fiber.iter().enumerate() {
            let (v, _) = cells.vertex_fiber[i];
            if component_of[v.idx()][*s] == comp {
                sub.vertices.insert(VertexId(i as u32));
            }
        }
        for (i, (e, s)) in cells.edge_fiber.iter().enumerate() {
            let init = source.edge(*e).init;
            if component_of[init.idx()][*s] == comp {
                sub.edges.insert(crate::complex::EdgeId(i as u32));
            }
        }
        for (i, (sq, s)) in cells.square_fiber.iter().enumerate() {
            let anchor = source.square_corner_vertex(&source.square(*sq).sides, (0, 0));
            if component_of[anchor.idx()][*s] == comp {
                sub.squares.insert(crate::complex::SquareId(i as u32));
            }
        }
        for (i, (cu, s)) in cells.cube_fiber.iter().enumerate() {
            let bottom = source.cube(*cu).bottom;
            let anchor = source.square_corner_vertex(&source.square(bottom).sides, (0, 0));
            if component_of[anchor.idx()][*s] == comp {
                sub.cubes.insert(crate::complex::Cube3Id(i as u32));
            }
        }
        let extracted = crate::map::extract_subcomplex(
            &total,
            &sub,
            format!("{}#{}", total.name(), comp + 1),
        )?;
        let to_cover_restricted = extracted.inclusion.then(&to_cover)?;
        let over_source = extracted.inclusion.then(&to_source)?;
        // Covering degree over Y: size of the fiber over the first vertex.
        let degree_over = (0..degree).filter(|&s| component_of[0][s] == comp).count();
        elevations.push(Elevation {
            complex: extracted.complex,
            to_cover: to_cover_restricted,
            over_source,
            degree: degree_over,
        });
    }

    Ok(FiberProduct {
        map: f.clone(),
        cover: cover.clone(),
        total,
        to_source,
        to_cover,
        component_of,
        elevations,
        vertex_fiber: cells.vertex_fiber,
        edge_fiber: cells.edge_fiber,
    })
}

/// Independent count of elevations: orbits of the voltage image of the
/// source fundamental group acting on the sheets.
pub fn elevation_count_oracle(f: &CubicalMap, cover: &CoveringSpace) -> Result<usize> {
    if !same_complex(f.target(), &cover.base) {
        return Err(Error::map(f.name(), "map does not land in the base of the cover"));
    }
    let source = f.source();
    let pres = presentation(source, VertexId(0))?;
    let degree = cover.degree();
    let mut gens: Vec<Permutation> = Vec::new();
    for g in 0..pres.generators.len() {
        let path = pres.generator_loop(source, g);
        let mut perm = Permutation::identity(degree);
        for d in path {
            let step = match f.apply_edge(d) {
                EdgeImage::Edge(image) => {
                    let p = &cover.voltages.perms[image.edge.idx()];
                    if image.forward {
                        p.clone()
                    } else {
                        p.inverse()
                    }
                }
                EdgeImage::Vertex(_) => Permutation::identity(degree),
            };
            perm = perm.then(&step);
        }
        gens.push(perm);
    }
    let mut uf = UnionFind::new(degree);
    for p in &gens {
        for s in 0..degree {
            uf.union(s, p.apply(s));
        }
    }
    let mut roots: Vec<usize> = uf.roots();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::cover::{build_cover, enumerate_covers, VoltageAssignment};

    #[test]
    fn identity_cover_gives_one_component_isomorphic_to_source() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let cover = build_cover(&rose, VoltageAssignment::identity(&rose)).unwrap();
        let fp = fiber_product(&f, &cover).unwrap();
        assert_eq!(fp.elevations.len(), 1);
        assert_eq!(fp.elevations[0].complex.cell_counts(), f.source().cell_counts());
        assert_eq!(elevation_count_oracle(&f, &cover).unwrap(), 1);
    }

    #[test]
    fn point_source_gives_one_component_per_sheet() {
        let rose = Arc::new(corpus::rose(2));
        let pt = Arc::new(corpus::point());
        let f = CubicalMap::new("pt", pt, Arc::clone(&rose), vec![VertexId(0)], vec![]).unwrap();
        for cover in enumerate_covers(&rose, 3).unwrap() {
            let fp = fiber_product(&f, &cover).unwrap();
            assert_eq!(fp.elevations.len(), cover.degree());
            assert_eq!(elevation_count_oracle(&f, &cover).unwrap(), cover.degree());
        }
    }

    #[test]
    fn component_count_matches_oracle_on_all_small_rose_covers() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        for cover in enumerate_covers(&rose, 4).unwrap() {
            let fp = fiber_product(&f, &cover).unwrap();
            assert_eq!(
                fp.elevations.len(),
                elevation_count_oracle(&f, &cover).unwrap(),
                "degree {}",
                cover.degree()
            );
            // Elevation degrees sum to the ambient degree.
            let total: usize = fp.elevations.iter().map(|el| el.degree).sum();
            assert_eq!(total, cover.degree());
            for el in &fp.elevations {
                assert!(check_local_isometry(&el.to_cover).is_local_isometry());
                assert!(check_local_isometry(&el.over_source).is_local_isometry());
            }
        }
    }
}
