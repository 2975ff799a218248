//! Combinatorial maps between cube complexes.
//!
//! A map is given on vertices and directed edges; its action on squares and
//! cubes is derived and validated at construction. A map may be *collapsing*
//! (some edges sent to vertices); only the retraction of a graph of
//! complexes produces those, everything else requires plain maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{
    Cube3Id, CubeComplex, Dihedral, DirectedEdge, EdgeId, SquareId, SquareSides, Subcomplex,
    VertexId,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeImage {
    Edge(DirectedEdge),
    Vertex(VertexId),
}

impl EdgeImage {
    pub fn reversed(self) -> EdgeImage {
        match self {
            EdgeImage::Edge(d) => EdgeImage::Edge(d.reversed()),
            EdgeImage::Vertex(v) => EdgeImage::Vertex(v),
        }
    }

    pub fn as_edge(self) -> Option<DirectedEdge> {
        match self {
            EdgeImage::Edge(d) => Some(d),
            EdgeImage::Vertex(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareImage {
    /// The image is `stored . g` for the stored square and dihedral `g`.
    Square(SquareId, Dihedral),
    /// One pair of opposite sides collapses; the square maps onto an edge.
    Edge(DirectedEdge),
    Vertex(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubeImage {
    Cube(Cube3Id),
    /// The corner edges collapse; the cube maps onto a square.
    Square(SquareId, Dihedral),
}

#[derive(Clone, Debug)]
pub struct CubicalMap {
    name: String,
    source: Arc<CubeComplex>,
    target: Arc<CubeComplex>,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<EdgeImage>,
    square_map: Vec<SquareImage>,
    cube_map: Vec<CubeImage>,
}

impl CubicalMap {
    pub fn new(
        name: impl Into<String>,
        source: Arc<CubeComplex>,
        target: Arc<CubeComplex>,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<EdgeImage>,
    ) -> Result<CubicalMap> {
        let name = name.into();
        let err = |msg: String| Error::map(&name, msg);
        if vertex_map.len() != source.n_vertices() {
            return Err(err("vertex map does not cover the source".into()));
        }
        if edge_map.len() != source.n_edges() {
            return Err(err("edge map does not cover the source".into()));
        }
        for &v in &vertex_map {
            if v.idx() >= target.n_vertices() {
                return Err(err("vertex image out of range".into()));
            }
        }
        for e in source.edge_ids() {
            let data = source.edge(e);
            match edge_map[e.idx()] {
                EdgeImage::Edge(d) => {
                    if d.edge.idx() >= target.n_edges() {
                        return Err(err(format!("edge {:?} image out of range", data.name)));
                    }
                    if target.initial(d) != vertex_map[data.init.idx()]
                        || target.terminal(d) != vertex_map[data.term.idx()]
                    {
                        return Err(err(format!(
                            "edge {:?}: endpoints do not commute with the vertex map",
                            data.name
                        )));
                    }
                }
                EdgeImage::Vertex(w) => {
                    if w.idx() >= target.n_vertices() {
                        return Err(err(format!("edge {:?} image out of range", data.name)));
                    }
                    if vertex_map[data.init.idx()] != w || vertex_map[data.term.idx()] != w {
                        return Err(err(format!(
                            "collapsed edge {:?}: endpoints do not map to the collapse vertex",
                            data.name
                        )));
                    }
                }
            }
        }

        let mut map = CubicalMap {
            name,
            source,
            target,
            vertex_map,
            edge_map,
            square_map: Vec::new(),
            cube_map: Vec::new(),
        };
        map.square_map = map.derive_squares()?;
        map.cube_map = map.derive_cubes()?;
        Ok(map)
    }

    fn derive_squares(&self) -> Result<Vec<SquareImage>> {
        let err = |msg: String| Error::map(&self.name, msg);
        let mut out = Vec::with_capacity(self.source.n_squares());
        for s in self.source.square_ids() {
            let sq = self.source.square(s);
            let images = sq.sides.sides().map(|d| self.apply_edge(d));
            let [b, r, t, l] = images;
            let image = match (b, r, t, l) {
                (EdgeImage::Edge(b), EdgeImage::Edge(r), EdgeImage::Edge(t), EdgeImage::Edge(l)) => {
                    let query = SquareSides { bottom: b, right: r, top: t, left: l };
                    let (id, g) = self.target.find_square_upto_dihedral(&query).ok_or_else(
                        || {
                            err(format!(
                                "square {:?} has no matching image square in the target",
                                sq.name
                            ))
                        },
                    )?;
                    SquareImage::Square(id, g)
                }
                (EdgeImage::Edge(b), EdgeImage::Vertex(_), EdgeImage::Edge(t), EdgeImage::Vertex(_)) => {
                    if b != t {
                        return Err(err(format!(
                            "square {:?}: sides collapse but bottom and top images differ",
                            sq.name
                        )));
                    }
                    SquareImage::Edge(b)
                }
                (EdgeImage::Vertex(_), EdgeImage::Edge(r), EdgeImage::Vertex(_), EdgeImage::Edge(l)) => {
                    if l != r {
                        return Err(err(format!(
                            "square {:?}: sides collapse but left and right images differ",
                            sq.name
                        )));
                    }
                    SquareImage::Edge(l)
                }
                (EdgeImage::Vertex(v0), EdgeImage::Vertex(v1), EdgeImage::Vertex(v2), EdgeImage::Vertex(v3)) => {
                    if v0 != v1 || v1 != v2 || v2 != v3 {
                        return Err(err(format!(
                            "square {:?} collapses to several vertices",
                            sq.name
                        )));
                    }
                    SquareImage::Vertex(v0)
                }
                _ => {
                    return Err(err(format!(
                        "square {:?}: unsupported collapse pattern",
                        sq.name
                    )))
                }
            };
            out.push(image);
        }
        Ok(out)
    }

    fn derive_cubes(&self) -> Result<Vec<CubeImage>> {
        let err = |msg: String| Error::map(&self.name, msg);
        // Fingerprints of target cubes: sorted face ids.
        let mut target_faces: BTreeMap<Vec<SquareId>, Cube3Id> = BTreeMap::new();
        for c in self.target.cube_ids() {
            let mut faces = self.target.cube_face_ids(self.target.cube(c)).to_vec();
            faces.sort();
            target_faces.entry(faces).or_insert(c);
        }
        let mut out = Vec::with_capacity(self.source.n_cubes());
        for c in self.source.cube_ids() {
            let cube = self.source.cube(c);
            let corner_images = cube.corners.map(|d| self.apply_edge(d));
            let bottom = self.square_map[cube.bottom.idx()];
            let top = self.square_map[cube.top.idx()];
            let all_edges = corner_images.iter().all(|i| matches!(i, EdgeImage::Edge(_)));
            let all_collapsed = corner_images.iter().all(|i| matches!(i, EdgeImage::Vertex(_)));
            let image = match (bottom, top) {
                (SquareImage::Square(bs, bg), SquareImage::Square(ts, tg)) if all_edges => {
                    let mut faces = vec![bs, ts];
                    for f in self.source.cube_face_ids(cube)[2..].iter() {
                        match self.square_map[f.idx()] {
                            SquareImage::Square(id, _) => faces.push(id),
                            _ => {
                                return Err(err(format!(
                                    "cube {:?}: side face collapses but corner edges do not",
                                    cube.name
                                )))
                            }
                        }
                    }
                    faces.sort();
                    let id = target_faces.get(&faces).ok_or_else(|| {
                        err(format!(
                            "cube {:?} has no matching image cube in the target",
                            cube.name
                        ))
                    })?;
                    let _ = (bg, tg);
                    CubeImage::Cube(*id)
                }
                (SquareImage::Square(bs, bg), SquareImage::Square(ts, tg)) if all_collapsed => {
                    if bs != ts {
                        return Err(err(format!(
                            "cube {:?}: corner edges collapse but bottom and top images differ",
                            cube.name
                        )));
                    }
                    if bg != tg.compose(cube.twist) {
                        return Err(err(format!(
                            "cube {:?}: collapse does not respect the corner correspondence",
                            cube.name
                        )));
                    }
                    CubeImage::Square(bs, bg)
                }
                _ => {
                    return Err(err(format!(
                        "cube {:?}: unsupported collapse pattern",
                        cube.name
                    )))
                }
            };
            out.push(image);
        }
        Ok(out)
    }

    pub fn identity(c: &Arc<CubeComplex>) -> CubicalMap {
        let vertex_map = c.vertex_ids().collect();
        let edge_map = c.edge_ids().map(|e| EdgeImage::Edge(DirectedEdge::fwd(e))).collect();
        CubicalMap::new(format!("id_{}", c.name()), Arc::clone(c), Arc::clone(c), vertex_map, edge_map)
            .expect("identity map is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }
    pub fn source(&self) -> &Arc<CubeComplex> {
        &self.source
    }
    pub fn target(&self) -> &Arc<CubeComplex> {
        &self.target
    }

    pub fn apply_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.idx()]
    }

    pub fn apply_edge(&self, d: DirectedEdge) -> EdgeImage {
        let img = self.edge_map[d.edge.idx()];
        if d.forward {
            img
        } else {
            img.reversed()
        }
    }

    pub fn apply_square(&self, s: SquareId) -> SquareImage {
        self.square_map[s.idx()]
    }

    pub fn apply_cube(&self, c: Cube3Id) -> CubeImage {
        self.cube_map[c.idx()]
    }

    pub fn vertex_images(&self) -> &[VertexId] {
        &self.vertex_map
    }
    pub fn edge_images(&self) -> &[EdgeImage] {
        &self.edge_map
    }

    /// True when no edge collapses.
    pub fn is_plain(&self) -> bool {
        self.edge_map.iter().all(|i| matches!(i, EdgeImage::Edge(_)))
    }

    /// Equality as maps: same cell images. Complex identity is by content.
    pub fn eq_data(&self, other: &CubicalMap) -> bool {
        self.vertex_map == other.vertex_map && self.edge_map == other.edge_map
    }

    /// Composition: apply `self` first, then `g`.
    pub fn then(&self, g: &CubicalMap) -> Result<CubicalMap> {
        if !same_complex(&self.target, &g.source) {
            return Err(Error::map(
                &self.name,
                format!("cannot compose with {:?}: incompatible complexes", g.name),
            ));
        }
        let vertex_map = self.vertex_map.iter().map(|&v| g.apply_vertex(v)).collect();
        let edge_map = self
            .edge_map
            .iter()
            .map(|img| match img {
                EdgeImage::Edge(d) => g.apply_edge(*d),
                EdgeImage::Vertex(v) => EdgeImage::Vertex(g.apply_vertex(*v)),
            })
            .collect();
        CubicalMap::new(
            format!("{}*{}", g.name, self.name),
            Arc::clone(&self.source),
            Arc::clone(&g.target),
            vertex_map,
            edge_map,
        )
    }

    /// Inverse of a bijective plain map. Fails when the map is not an
    /// isomorphism of complexes.
    pub fn inverse(&self) -> Result<CubicalMap> {
        let err = |msg: &str| Error::map(&self.name, msg.to_string());
        if !self.is_plain() {
            return Err(err("collapsing maps are not invertible"));
        }
        if self.source.n_vertices() != self.target.n_vertices()
            || self.source.n_edges() != self.target.n_edges()
            || self.source.n_squares() != self.target.n_squares()
            || self.source.n_cubes() != self.target.n_cubes()
        {
            return Err(err("source and target have different cell counts"));
        }
        let mut vertex_map = vec![None; self.target.n_vertices()];
        for v in self.source.vertex_ids() {
            let w = self.apply_vertex(v);
            if vertex_map[w.idx()].replace(v).is_some() {
                return Err(err("vertex map is not injective"));
            }
        }
        let mut edge_map = vec![None; self.target.n_edges()];
        for e in self.source.edge_ids() {
            let d = self.apply_edge(DirectedEdge::fwd(e)).as_edge().unwrap();
            let back = DirectedEdge { edge: e, forward: d.forward };
            if edge_map[d.edge.idx()].replace(EdgeImage::Edge(back)).is_some() {
                return Err(err("edge map is not injective"));
            }
        }
        let vertex_map = vertex_map.into_iter().map(|v| v.unwrap()).collect();
        let edge_map = edge_map.into_iter().map(|e| e.unwrap()).collect();
        CubicalMap::new(
            format!("{}^-1", self.name),
            Arc::clone(&self.target),
            Arc::clone(&self.source),
            vertex_map,
            edge_map,
        )
    }

    pub fn is_isomorphism(&self) -> bool {
        self.inverse().is_ok()
    }

    /// The image of the source as a subcomplex of the target (plain maps).
    pub fn image_subcomplex(&self) -> Result<Subcomplex> {
        if !self.is_plain() {
            return Err(Error::map(&self.name, "image of a collapsing map".to_string()));
        }
        let mut sub = Subcomplex::default();
        for &v in &self.vertex_map {
            sub.vertices.insert(v);
        }
        for img in &self.edge_map {
            sub.edges.insert(img.as_edge().unwrap().edge);
        }
        for img in &self.square_map {
            if let SquareImage::Square(id, _) = img {
                sub.squares.insert(*id);
            }
        }
        for img in &self.cube_map {
            if let CubeImage::Cube(id) = img {
                sub.cubes.insert(*id);
            }
        }
        Ok(sub)
    }

    /// Injectivity on cells of every dimension.
    pub fn is_embedding(&self) -> bool {
        if !self.is_plain() {
            return false;
        }
        let mut vs: Vec<_> = self.vertex_map.clone();
        vs.sort();
        vs.dedup();
        if vs.len() != self.vertex_map.len() {
            return false;
        }
        let mut es: Vec<_> = self.edge_map.iter().map(|i| i.as_edge().unwrap().edge).collect();
        es.sort();
        es.dedup();
        if es.len() != self.edge_map.len() {
            return false;
        }
        let mut sq: Vec<_> = self
            .square_map
            .iter()
            .map(|i| match i {
                SquareImage::Square(id, _) => *id,
                _ => unreachable!("plain maps send squares to squares"),
            })
            .collect();
        sq.sort();
        sq.dedup();
        if sq.len() != self.square_map.len() {
            return false;
        }
        let mut cu: Vec<_> = self
            .cube_map
            .iter()
            .map(|i| match i {
                CubeImage::Cube(id) => *id,
                _ => unreachable!("plain maps send cubes to cubes"),
            })
            .collect();
        cu.sort();
        cu.dedup();
        cu.len() == self.cube_map.len()
    }

    /// First witness of non-injectivity on vertices or edges, for reports.
    pub fn embedding_witness(&self) -> Option<String> {
        let mut seen = BTreeMap::new();
        for v in self.source.vertex_ids() {
            let w = self.apply_vertex(v);
            if let Some(prev) = seen.insert(w, v) {
                return Some(format!(
                    "vertices {} and {} share image {}",
                    self.source.vertex_name(prev),
                    self.source.vertex_name(v),
                    self.target.vertex_name(w)
                ));
            }
        }
        let mut seen = BTreeMap::new();
        for e in self.source.edge_ids() {
            if let EdgeImage::Edge(d) = self.edge_map[e.idx()] {
                if let Some(prev) = seen.insert(d.edge, e) {
                    return Some(format!(
                        "edges {} and {} share image {}",
                        self.source.edge(prev).name,
                        self.source.edge(e).name,
                        self.target.edge(d.edge).name
                    ));
                }
            }
        }
        if self.is_embedding() {
            None
        } else {
            Some("a square or cube image repeats".to_string())
        }
    }
}

/// Complex identity used when composing maps: pointer equality or equal data.
pub fn same_complex(a: &Arc<CubeComplex>, b: &Arc<CubeComplex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub fn compose_maps(f: &CubicalMap, g: &CubicalMap) -> Result<CubicalMap> {
    f.then(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalIsometryViolation {
    /// The map collapses an edge; links cannot embed.
    Collapsing { edge: EdgeId },
    /// Two edge-ends at the vertex share an image.
    NotInjective { vertex: VertexId, ends: (DirectedEdge, DirectedEdge) },
    /// The images span a link edge but the ends do not.
    NotFullEdge { vertex: VertexId, ends: (DirectedEdge, DirectedEdge) },
    /// The images span a link triangle but the ends do not.
    NotFullTriangle { vertex: VertexId, ends: [DirectedEdge; 3] },
}

#[derive(Clone, Debug)]
pub struct LocalIsometryReport {
    pub violations: Vec<LocalIsometryViolation>,
}

impl LocalIsometryReport {
    pub fn is_local_isometry(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that every induced link map is injective with full image.
pub fn check_local_isometry(f: &CubicalMap) -> LocalIsometryReport {
    let mut violations = Vec::new();
    let source = f.source();
    let target = f.target();
    for e in source.edge_ids() {
        if f.apply_edge(DirectedEdge::fwd(e)).as_edge().is_none() {
            violations.push(LocalIsometryViolation::Collapsing { edge: e });
        }
    }
    if !violations.is_empty() {
        return LocalIsometryReport { violations };
    }

    // Target link edge/triangle sets per vertex, computed once.
    let mut target_links: BTreeMap<VertexId, crate::complex::LinkComplex> = BTreeMap::new();
    for v in source.vertex_ids() {
        target_links
            .entry(f.apply_vertex(v))
            .or_insert_with(|| target.link(f.apply_vertex(v)));
    }

    for v in source.vertex_ids() {
        let ends = source.ends_at(v);
        let images: Vec<DirectedEdge> =
            ends.iter().map(|d| f.apply_edge(*d).as_edge().unwrap()).collect();
        let tlink = &target_links[&f.apply_vertex(v)];
        let tedges: std::collections::BTreeSet<_> = tlink.edges.iter().copied().collect();
        let ttris: std::collections::BTreeSet<_> = tlink.triangles.iter().copied().collect();
        let slink = source.link(v);
        let sedges: std::collections::BTreeSet<_> = slink.edges.iter().copied().collect();
        let stris: std::collections::BTreeSet<_> = slink.triangles.iter().copied().collect();

        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                if images[i] == images[j] {
                    violations.push(LocalIsometryViolation::NotInjective {
                        vertex: v,
                        ends: (ends[i], ends[j]),
                    });
                    continue;
                }
                let ipair = sorted_pair(images[i], images[j]);
                let spair = sorted_pair(ends[i], ends[j]);
                if tedges.contains(&ipair) && !sedges.contains(&spair) {
                    violations.push(LocalIsometryViolation::NotFullEdge {
                        vertex: v,
                        ends: (ends[i], ends[j]),
                    });
                }
            }
        }
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                for k in j + 1..ends.len() {
                    let mut img = [images[i], images[j], images[k]];
                    img.sort();
                    if img[0] == img[1] || img[1] == img[2] {
                        continue;
                    }
                    let mut pre = [ends[i], ends[j], ends[k]];
                    pre.sort();
                    if ttris.contains(&img) && !stris.contains(&pre) {
                        violations.push(LocalIsometryViolation::NotFullTriangle {
                            vertex: v,
                            ends: pre,
                        });
                    }
                }
            }
        }
    }
    LocalIsometryReport { violations }
}

fn sorted_pair(x: DirectedEdge, y: DirectedEdge) -> (DirectedEdge, DirectedEdge) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// A face-closed subcomplex extracted as a standalone complex, with its
/// inclusion map into the parent.
pub struct Extracted {
    pub complex: Arc<CubeComplex>,
    pub inclusion: CubicalMap,
    pub vertex_to_parent: Vec<VertexId>,
    pub vertex_from_parent: BTreeMap<VertexId, VertexId>,
    pub edge_from_parent: BTreeMap<EdgeId, EdgeId>,
}

pub fn extract_subcomplex(
    parent: &Arc<CubeComplex>,
    sub: &Subcomplex,
    name: impl Into<String>,
) -> Result<Extracted> {
    let name = name.into();
    if !sub.is_face_closed(parent) {
        return Err(Error::structure(&name, "subcomplex is not face-closed"));
    }
    let vertex_to_parent: Vec<VertexId> = sub.vertices.iter().copied().collect();
    let vertex_from_parent: BTreeMap<VertexId, VertexId> = vertex_to_parent
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, VertexId(i as u32)))
        .collect();
    let edge_to_parent: Vec<EdgeId> = sub.edges.iter().copied().collect();
    let edge_from_parent: BTreeMap<EdgeId, EdgeId> = edge_to_parent
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, EdgeId(i as u32)))
        .collect();
    let square_to_parent: Vec<SquareId> = sub.squares.iter().copied().collect();
    let square_from_parent: BTreeMap<SquareId, SquareId> = square_to_parent
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, SquareId(i as u32)))
        .collect();

    let vertices = vertex_to_parent.iter().map(|&v| parent.vertex_name(v).to_string()).collect();
    let edges = edge_to_parent
        .iter()
        .map(|&e| {
            let d = parent.edge(e);
            crate::complex::EdgeData {
                name: d.name.clone(),
                init: vertex_from_parent[&d.init],
                term: vertex_from_parent[&d.term],
            }
        })
        .collect();
    let reindex = |d: DirectedEdge| DirectedEdge { edge: edge_from_parent[&d.edge], forward: d.forward };
    let squares = square_to_parent
        .iter()
        .map(|&s| {
            let data = parent.square(s);
            (
                data.name.clone(),
                SquareSides {
                    bottom: reindex(data.sides.bottom),
                    right: reindex(data.sides.right),
                    top: reindex(data.sides.top),
                    left: reindex(data.sides.left),
                },
            )
        })
        .collect();
    let cubes = sub
        .cubes
        .iter()
        .map(|&c| {
            let data = parent.cube(c);
            crate::complex::CubeSpec {
                name: data.name.clone(),
                bottom: square_from_parent[&data.bottom],
                top: square_from_parent[&data.top],
                corners: data.corners.map(reindex),
                twist: Some(data.twist),
            }
        })
        .collect();

    let complex = Arc::new(CubeComplex::assemble(&name, vertices, edges, squares, cubes)?);
    let inclusion = CubicalMap::new(
        format!("inc_{name}"),
        Arc::clone(&complex),
        Arc::clone(parent),
        vertex_to_parent.clone(),
        edge_to_parent.iter().map(|&e| EdgeImage::Edge(DirectedEdge::fwd(e))).collect(),
    )?;
    Ok(Extracted { complex, inclusion, vertex_to_parent, vertex_from_parent, edge_from_parent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn identity_is_local_isometry_and_isomorphism() {
        for c in [corpus::torus(), corpus::solid_cube(), corpus::rose(3)] {
            let c = Arc::new(c);
            let id = CubicalMap::identity(&c);
            assert!(check_local_isometry(&id).is_local_isometry());
            assert!(id.is_isomorphism());
        }
    }

    #[test]
    fn aab_immersion_is_local_isometry() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        assert!(check_local_isometry(&f).is_local_isometry());
        assert!(!f.is_embedding());
    }

    #[test]
    fn backtrack_fails_injectivity_at_middle_vertex() {
        let rose = Arc::new(corpus::rose(1));
        let source = Arc::new(corpus::path(2));
        let a = DirectedEdge::fwd(EdgeId(0));
        let f = CubicalMap::new(
            "backtrack",
            source,
            rose,
            vec![VertexId(0); 3],
            vec![EdgeImage::Edge(a), EdgeImage::Edge(a.reversed())],
        )
        .unwrap();
        let report = check_local_isometry(&f);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, LocalIsometryViolation::NotInjective { vertex, .. }
                if *vertex == VertexId(1))));
    }

    #[test]
    fn vertex_inclusion_is_local_isometry() {
        let torus = Arc::new(corpus::torus());
        let pt = Arc::new(corpus::point());
        let f = CubicalMap::new("pt", pt, torus, vec![VertexId(0)], vec![]).unwrap();
        assert!(check_local_isometry(&f).is_local_isometry());
    }

    fn standalone_square() -> Arc<CubeComplex> {
            let vertices = vec!["p".into(), "q".into(), "r".into(), "s".into()];
            let edges = vec![
                crate::complex::EdgeData { name: "b".into(), init: VertexId(0), term: VertexId(1) },
                crate::complex::EdgeData { name: "r".into(), init: VertexId(1), term: VertexId(3) },
                crate::complex::EdgeData { name: "t".into(), init: VertexId(2), term: VertexId(3) },
                crate::complex::EdgeData { name: "l".into(), init: VertexId(0), term: VertexId(2) },
            ];
            let sides = SquareSides {
                bottom: DirectedEdge::fwd(EdgeId(0)),
                right: DirectedEdge::fwd(EdgeId(1)),
                top: DirectedEdge::fwd(EdgeId(2)),
                left: DirectedEdge::fwd(EdgeId(3)),
            };
        Arc::new(
            CubeComplex::assemble("square", vertices, edges, vec![("s".into(), sides)], vec![])
                .unwrap(),
        )
    }

    #[test]
    fn boundary_edge_inclusion_into_square_is_a_local_isometry() {
        // The other corner end is not in the image, so fullness holds.
        let interval = Arc::new(corpus::path(1));
        let f = CubicalMap::new(
            "edgeinc",
            interval,
            standalone_square(),
            vec![VertexId(0), VertexId(1)],
            vec![EdgeImage::Edge(DirectedEdge::fwd(EdgeId(0)))],
        )
        .unwrap();
        assert!(check_local_isometry(&f).is_local_isometry());
    }

    #[test]
    fn wedge_onto_adjacent_sides_fails_fullness() {
        // Two edges meeting at a vertex, mapped to two consecutive sides of
        // a square: the images span a link edge, the preimages do not.
        let sq = standalone_square();
        let wedge = {
            let vertices = vec!["x".into(), "y1".into(), "y2".into()];
            let edges = vec![
                crate::complex::EdgeData { name: "g1".into(), init: VertexId(0), term: VertexId(1) },
                crate::complex::EdgeData { name: "g2".into(), init: VertexId(0), term: VertexId(2) },
            ];
            Arc::new(CubeComplex::assemble("wedge", vertices, edges, vec![], vec![]).unwrap())
        };
        let f = CubicalMap::new(
            "cornermap",
            wedge,
            sq,
            vec![VertexId(0), VertexId(1), VertexId(2)],
            vec![
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(0))),
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(3))),
            ],
        )
        .unwrap();
        let report = check_local_isometry(&f);
        assert!(!report.is_local_isometry());
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, LocalIsometryViolation::NotFullEdge { .. })));
    }

    #[test]
    fn composition_with_identity_and_involution() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let id = CubicalMap::identity(&rose);
        let g = f.then(&id).unwrap();
        assert!(g.eq_data(&f));

        let swap = corpus::rose_loop_permutation(&rose, &[1, 0]);
        let swap2 = swap.then(&swap).unwrap();
        assert!(swap2.eq_data(&CubicalMap::identity(&rose)));
        assert!(swap.is_isomorphism());
    }

    #[test]
    fn rotation_of_three_cycle_has_order_three() {
        let c3 = Arc::new(corpus::cycle(3));
        let rot = CubicalMap::new(
            "rot",
            Arc::clone(&c3),
            Arc::clone(&c3),
            vec![VertexId(1), VertexId(2), VertexId(0)],
            vec![
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(1))),
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(2))),
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(0))),
            ],
        )
        .unwrap();
        assert!(rot.is_isomorphism());
        let r2 = rot.then(&rot).unwrap();
        assert!(!r2.eq_data(&CubicalMap::identity(&c3)));
        let r3 = r2.then(&rot).unwrap();
        assert!(r3.eq_data(&CubicalMap::identity(&c3)));
        assert!(rot.inverse().unwrap().is_isomorphism());
    }

    #[test]
    fn composition_is_associative() {
        let c3 = Arc::new(corpus::cycle(3));
        let rot = CubicalMap::new(
            "rot",
            Arc::clone(&c3),
            Arc::clone(&c3),
            vec![VertexId(1), VertexId(2), VertexId(0)],
            vec![
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(1))),
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(2))),
                EdgeImage::Edge(DirectedEdge::fwd(EdgeId(0))),
            ],
        )
        .unwrap();
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let swap = corpus::rose_loop_permutation(&rose, &[1, 0]);
        let lhs = rot.then(&f).unwrap().then(&swap).unwrap();
        let rhs = rot.then(&f.then(&swap).unwrap()).unwrap();
        assert!(lhs.eq_data(&rhs));
    }

    #[test]
    fn extract_roundtrip() {
        let torus = Arc::new(corpus::torus());
        let sub = Subcomplex::full(&torus);
        let ex = extract_subcomplex(&torus, &sub, "copy").unwrap();
        assert!(ex.inclusion.is_isomorphism());
        assert_eq!(ex.complex.cell_counts(), torus.cell_counts());
    }
}
