//! The retraction of a total space onto a vertex space, available once the
//! datum has constant vertex spaces.
//!
//! On a vertex space the retraction is the identification with the model
//! space followed by the inverse identification of the base; on a
//! thickened edge space it forgets the interval coordinate. Horizontal
//! edges collapse to vertices, vertical squares to edges, prisms to
//! squares, so the result is a collapsing map.

use crate::complex::DirectedEdge;
use crate::error::{Error, Result};
use crate::goc::{EdgeOrigin, GraphOfComplexes, TotalSpace};
use crate::hyperplane::{compute_hyperplanes, subcomplex_osculation};
use crate::map::{CubicalMap, EdgeImage};
use crate::monodromy::ConstantStructure;

#[derive(Clone, Debug)]
pub struct Retraction {
    /// Base vertex of the underlying graph.
    pub base: usize,
    /// Collapsing map from the total space onto the base vertex space.
    pub map: CubicalMap,
    /// Inclusion of the base vertex space.
    pub section: CubicalMap,
}

/// Build the retraction and verify it: the section splits it, every vertex
/// space restricts to an isomorphism, and parallel directed edges with
/// edge images have parallel images.
pub fn build_retraction(
    g: &GraphOfComplexes,
    cs: &ConstantStructure,
    t: &TotalSpace,
    base: usize,
) -> Result<Retraction> {
    cs.verify(g)?;
    let err = |msg: String| Error::goc(&g.name, msg);
    let into_base = cs.psi[base].inverse()?;
    // r restricted to each vertex space.
    let restrict: Vec<CubicalMap> = cs
        .psi
        .iter()
        .map(|psi| psi.then(&into_base))
        .collect::<Result<_>>()?;

    let vertex_map = t
        .vertex_origin
        .iter()
        .map(|(u, v)| restrict[*u].apply_vertex(*v))
        .collect();
    let edge_map = t
        .edge_origin
        .iter()
        .map(|origin| match origin {
            EdgeOrigin::Space { gv, e } => restrict[*gv].apply_edge(DirectedEdge::fwd(*e)),
            EdgeOrigin::Horizontal { ge, v } => {
                let lo = g.gamma.edges[*ge].init;
                let image = g.attach_minus[*ge].apply_vertex(*v);
                EdgeImage::Vertex(restrict[lo].apply_vertex(image))
            }
        })
        .collect();
    let map = CubicalMap::new(
        format!("r_{}", g.gamma.vertices[base]),
        std::sync::Arc::clone(&t.complex),
        std::sync::Arc::clone(&g.vertex_spaces[base]),
        vertex_map,
        edge_map,
    )?;

    let section = t.inclusions[base].clone();
    let retract_section = section.then(&map)?;
    if !retract_section.eq_data(&CubicalMap::identity(&g.vertex_spaces[base])) {
        return Err(err("retraction does not split the inclusion of the base space".into()));
    }
    for (u, inc) in t.inclusions.iter().enumerate() {
        if !inc.then(&map)?.is_isomorphism() {
            return Err(err(format!(
                "retraction is not an isomorphism on the vertex space over {}",
                g.gamma.vertices[u]
            )));
        }
    }
    verify_parallelism(t, &map)?;
    Ok(Retraction { base, map, section })
}

/// Exhaustive check: images of a directed parallelism class of the total
/// space that are edges all lie in one directed class of the target.
fn verify_parallelism(t: &TotalSpace, r: &CubicalMap) -> Result<()> {
    let total_hs = compute_hyperplanes(&t.complex);
    let target_hs = compute_hyperplanes(r.target());
    for h in &total_hs.hyperplanes {
        for class in &h.directed_classes {
            let mut image_class: Option<usize> = None;
            for d in class {
                if let EdgeImage::Edge(image) = r.apply_edge(*d) {
                    let c = target_hs.directed_class_of(image);
                    match image_class {
                        None => image_class = Some(c),
                        Some(prev) if prev != c => {
                            return Err(Error::Internal(format!(
                                "parallel directed edges {} and friends have non-parallel images",
                                t.complex.edge_token(*d)
                            )));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct EdgeHypotheses {
    pub edge: usize,
    pub embedded: bool,
    pub embedding_witness: Option<String>,
    /// Hyperplane of the initial vertex space inter-osculating with the
    /// image of the attaching map, when any.
    pub inter_osculation: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub per_edge: Vec<EdgeHypotheses>,
    pub pass: bool,
}

/// Hypotheses making a total space with special constant vertex spaces
/// special: each attaching map embeds, and its image does not
/// inter-osculate with hyperplanes of its vertex space.
pub fn check_corollary_hypotheses(
    g: &GraphOfComplexes,
    cs: &ConstantStructure,
) -> Result<CorollaryReport> {
    cs.verify(g)?;
    let mut per_edge = Vec::with_capacity(g.gamma.edges.len());
    for (i, e) in g.gamma.edges.iter().enumerate() {
        let minus = &g.attach_minus[i];
        let embedded = minus.is_embedding();
        let embedding_witness = minus.embedding_witness();
        let space = &g.vertex_spaces[e.init];
        let hs = compute_hyperplanes(space);
        let image = minus.image_subcomplex()?;
        let findings = subcomplex_osculation(space, &hs, &image)?;
        let inter_osculation =
            findings.iter().find(|f| f.inter_osculates).map(|f| f.hyperplane);
        per_edge.push(EdgeHypotheses { edge: i, embedded, embedding_witness, inter_osculation });
    }
    let pass = per_edge.iter().all(|h| h.embedded && h.inter_osculation.is_none());
    Ok(CorollaryReport { per_edge, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::goc::{double, mapping_torus, total_space};
    use crate::hyperplane::{check_special, OsculationSemantics};
    use crate::map::same_complex;
    use crate::monodromy::{compute_monodromy, make_constant};
    use std::sync::Arc;

    fn constant_for(
        g: &GraphOfComplexes,
        lc: &crate::monodromy::LocallyConstantStructure,
    ) -> ConstantStructure {
        let m = compute_monodromy(g, lc, 0, 1024).unwrap();
        make_constant(g, &m).unwrap()
    }

    #[test]
    fn retraction_of_edgeless_datum_is_identity() {
        let rose = Arc::new(corpus::rose(2));
        let g = GraphOfComplexes {
            name: "solo".into(),
            gamma: crate::goc::Gamma {
                name: "solo".into(),
                vertices: vec!["u".into()],
                edges: vec![],
            },
            vertex_spaces: vec![Arc::clone(&rose)],
            edge_spaces: vec![],
            attach_minus: vec![],
            attach_plus: vec![],
        };
        let lc = crate::monodromy::LocallyConstantStructure { thetas: vec![] };
        let cs = constant_for(&g, &lc);
        let t = total_space(&g).unwrap();
        let r = build_retraction(&g, &cs, &t, 0).unwrap();
        assert!(r.map.eq_data(&CubicalMap::identity(&rose)));
    }

    #[test]
    fn double_retraction_collapses_horizontals_and_checks_out() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let (g, lc) = double(&rose, &f, "double_aab").unwrap();
        let cs = constant_for(&g, &lc);
        let t = total_space(&g).unwrap();
        let r = build_retraction(&g, &cs, &t, 0).unwrap();
        assert!(same_complex(r.map.target(), &rose));
        // Second-copy loops map to the matching base loops.
        for e in t.complex.edge_ids() {
            match t.edge_origin[e.idx()] {
                EdgeOrigin::Space { e: orig, .. } => {
                    let image = r.map.apply_edge(DirectedEdge::fwd(e)).as_edge().unwrap();
                    assert_eq!(image.edge, orig);
                }
                EdgeOrigin::Horizontal { .. } => {
                    assert!(r.map.apply_edge(DirectedEdge::fwd(e)).as_edge().is_none());
                }
            }
        }
    }

    #[test]
    fn identity_mapping_torus_retraction_kills_the_circle() {
        let rose = Arc::new(corpus::rose(2));
        let id = CubicalMap::identity(&rose);
        let (g, lc) = mapping_torus(&id, "rosecircle").unwrap();
        let cs = constant_for(&g, &lc);
        let t = total_space(&g).unwrap();
        let r = build_retraction(&g, &cs, &t, 0).unwrap();
        let horizontals = t
            .complex
            .edge_ids()
            .filter(|e| matches!(t.edge_origin[e.idx()], EdgeOrigin::Horizontal { .. }))
            .count();
        assert_eq!(horizontals, 1);
        assert!(check_special(r.map.target(), OsculationSemantics::DirectedClass).special);
    }

    #[test]
    fn corollary_hypotheses_pass_for_embedded_loop_and_total_is_special() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::loop_a_inclusion(&rose);
        let (g, lc) = double(&rose, &f, "double_a").unwrap();
        let cs = constant_for(&g, &lc);
        let report = check_corollary_hypotheses(&g, &cs).unwrap();
        assert!(report.pass);
        let t = total_space(&g).unwrap();
        assert!(check_special(&t.complex, OsculationSemantics::DirectedClass).special);
    }

    #[test]
    fn corollary_hypotheses_fail_for_immersed_cycle() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let (g, lc) = double(&rose, &f, "double_aab").unwrap();
        let cs = constant_for(&g, &lc);
        let report = check_corollary_hypotheses(&g, &cs).unwrap();
        assert!(!report.pass);
        assert!(!report.per_edge[0].embedded);
        assert!(report.per_edge[0].embedding_witness.is_some());
    }

    #[test]
    fn retraction_exists_for_torus_circle_product_with_prisms() {
        let torus = Arc::new(corpus::torus());
        let id = CubicalMap::identity(&torus);
        let (g, lc) = mapping_torus(&id, "tc").unwrap();
        let cs = constant_for(&g, &lc);
        let t = total_space(&g).unwrap();
        let r = build_retraction(&g, &cs, &t, 0).unwrap();
        // The prism collapses onto the torus square.
        assert_eq!(t.complex.n_cubes(), 1);
        assert!(matches!(
            r.map.apply_cube(crate::complex::Cube3Id(0)),
            crate::map::CubeImage::Square(..)
        ));
    }
}
