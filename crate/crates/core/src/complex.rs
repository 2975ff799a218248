//! Finite combinatorial cube complexes of dimension at most 3.
//!
//! A complex stores vertices, edges with endpoints, squares as parametrized
//! 2-cells (four directed boundary edges with corner compatibility), and
//! 3-cubes as a pair of parallel squares joined by four corner edges. The
//! nonpositive-curvature (NPC) check asks every vertex link to be a
//! simplicial flag complex.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube3Id(pub u32);

impl VertexId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}
impl EdgeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}
impl SquareId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}
impl Cube3Id {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// An edge together with a traversal direction. `forward` means from the
/// stored initial vertex to the stored terminal vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    pub edge: EdgeId,
    pub forward: bool,
}

impl DirectedEdge {
    pub fn fwd(edge: EdgeId) -> Self {
        DirectedEdge { edge, forward: true }
    }

    pub fn rev(edge: EdgeId) -> Self {
        DirectedEdge { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        DirectedEdge { edge: self.edge, forward: !self.forward }
    }

    /// Index into tables with one slot per direction.
    pub fn slot(self) -> usize {
        self.edge.idx() * 2 + usize::from(!self.forward)
    }
}

// Forward direction sorts before backward so that witness lists read `a+`
// before `a-`.
impl Ord for DirectedEdge {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.edge, !self.forward).cmp(&(other.edge, !other.forward))
    }
}

impl PartialOrd for DirectedEdge {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Corner of the unit square, coordinates in {0,1}.
pub type Corner = (u8, u8);

/// Corners in the fixed scan order used throughout: the index of a corner
/// edge or a corner pair always refers to this order.
pub const CORNERS: [Corner; 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

pub fn corner_index(c: Corner) -> usize {
    match c {
        (0, 0) => 0,
        (1, 0) => 1,
        (0, 1) => 2,
        (1, 1) => 3,
        _ => unreachable!("corner coordinates must be 0 or 1"),
    }
}

/// Symmetry of the unit square acting on parametrizations. The eight
/// elements are the signed coordinate permutations; bit 2 swaps the two
/// coordinates, bit 1 flips the first, bit 0 flips the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dihedral(pub u8);

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral(0);
    pub const ALL: [Dihedral; 8] = [
        Dihedral(0),
        Dihedral(1),
        Dihedral(2),
        Dihedral(3),
        Dihedral(4),
        Dihedral(5),
        Dihedral(6),
        Dihedral(7),
    ];

    pub fn corner(self, c: Corner) -> Corner {
        let (p, q) = if self.0 & 4 != 0 { (c.1, c.0) } else { (c.0, c.1) };
        let p = if self.0 & 2 != 0 { 1 - p } else { p };
        let q = if self.0 & 1 != 0 { 1 - q } else { q };
        (p, q)
    }

    /// Composition `self . other`, i.e. apply `other` first.
    pub fn compose(self, other: Dihedral) -> Dihedral {
        for g in Dihedral::ALL {
            if CORNERS.iter().all(|&c| g.corner(c) == self.corner(other.corner(c))) {
                return g;
            }
        }
        unreachable!("dihedral group is closed under composition")
    }

    pub fn inverse(self) -> Dihedral {
        for g in Dihedral::ALL {
            if CORNERS.iter().all(|&c| g.corner(self.corner(c)) == c) {
                return g;
            }
        }
        unreachable!("dihedral elements are invertible")
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

/// The four directed boundary edges of a parametrized square `s`.
///
/// bottom runs s(0,0) -> s(1,0), top runs s(0,1) -> s(1,1),
/// left runs s(0,0) -> s(0,1), right runs s(1,0) -> s(1,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareSides {
    pub bottom: DirectedEdge,
    pub right: DirectedEdge,
    pub top: DirectedEdge,
    pub left: DirectedEdge,
}

impl SquareSides {
    fn side_between(&self, c1: Corner, c2: Corner) -> DirectedEdge {
        match (c1, c2) {
            ((0, 0), (1, 0)) => self.bottom,
            ((1, 0), (0, 0)) => self.bottom.reversed(),
            ((0, 1), (1, 1)) => self.top,
            ((1, 1), (0, 1)) => self.top.reversed(),
            ((0, 0), (0, 1)) => self.left,
            ((0, 1), (0, 0)) => self.left.reversed(),
            ((1, 0), (1, 1)) => self.right,
            ((1, 1), (1, 0)) => self.right.reversed(),
            _ => unreachable!("corners must be adjacent"),
        }
    }

    /// Sides of the reparametrized square `s . g`.
    pub fn transformed(&self, g: Dihedral) -> SquareSides {
        SquareSides {
            bottom: self.side_between(g.corner((0, 0)), g.corner((1, 0))),
            right: self.side_between(g.corner((1, 0)), g.corner((1, 1))),
            top: self.side_between(g.corner((0, 1)), g.corner((1, 1))),
            left: self.side_between(g.corner((0, 0)), g.corner((0, 1))),
        }
    }

    /// Minimum over all eight reparametrizations, with a witness element.
    pub fn canonical(&self) -> (SquareSides, Dihedral) {
        let mut best = (*self, Dihedral::IDENTITY);
        for g in Dihedral::ALL {
            let t = self.transformed(g);
            if t < best.0 {
                best = (t, g);
            }
        }
        best
    }

    pub fn sides(&self) -> [DirectedEdge; 4] {
        [self.bottom, self.right, self.top, self.left]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub name: String,
    pub init: VertexId,
    pub term: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareData {
    pub name: String,
    pub sides: SquareSides,
}

/// A 3-cube encoded as two parallel squares plus four corner edges.
///
/// The cube is parametrized over the bottom square: corner edge `k` starts
/// at corner `CORNERS[k]` of the bottom square and ends at corner
/// `twist(CORNERS[k])` of the top square. The four side squares this
/// induces must already exist in the complex (up to reparametrization).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube3Data {
    pub name: String,
    pub bottom: SquareId,
    pub top: SquareId,
    pub corners: [DirectedEdge; 4],
    pub twist: Dihedral,
}

/// Input form of a 3-cube before the twist is resolved.
#[derive(Clone, Debug)]
pub struct CubeSpec {
    pub name: String,
    pub bottom: SquareId,
    pub top: SquareId,
    pub corners: [DirectedEdge; 4],
    pub twist: Option<Dihedral>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeComplex {
    name: String,
    vertices: Vec<String>,
    edges: Vec<EdgeData>,
    squares: Vec<SquareData>,
    cubes: Vec<Cube3Data>,
    vertex_lookup: BTreeMap<String, VertexId>,
    edge_lookup: BTreeMap<String, EdgeId>,
    square_lookup: BTreeMap<String, SquareId>,
    cube_lookup: BTreeMap<String, Cube3Id>,
    square_canon: BTreeMap<SquareSides, Vec<SquareId>>,
    ends_at: Vec<Vec<DirectedEdge>>,
}

impl CubeComplex {
    pub fn assemble(
        name: impl Into<String>,
        vertex_names: Vec<String>,
        edges: Vec<EdgeData>,
        squares: Vec<(String, SquareSides)>,
        cubes: Vec<CubeSpec>,
    ) -> Result<CubeComplex> {
        let name = name.into();
        let err = |msg: String| Error::structure(&name, msg);

        let mut vertex_lookup = BTreeMap::new();
        for (i, v) in vertex_names.iter().enumerate() {
            if vertex_lookup.insert(v.clone(), VertexId(i as u32)).is_some() {
                return Err(err(format!("duplicate vertex {v:?}")));
            }
        }
        let mut edge_lookup = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.init.idx() >= vertex_names.len() || e.term.idx() >= vertex_names.len() {
                return Err(err(format!("edge {:?} references missing vertex", e.name)));
            }
            if edge_lookup.insert(e.name.clone(), EdgeId(i as u32)).is_some() {
                return Err(err(format!("duplicate edge {:?}", e.name)));
            }
        }

        let mut complex = CubeComplex {
            name: name.clone(),
            vertices: vertex_names,
            edges,
            squares: Vec::new(),
            cubes: Vec::new(),
            vertex_lookup,
            edge_lookup,
            square_lookup: BTreeMap::new(),
            cube_lookup: BTreeMap::new(),
            square_canon: BTreeMap::new(),
            ends_at: Vec::new(),
        };

        for (i, (sq_name, sides)) in squares.into_iter().enumerate() {
            for d in sides.sides() {
                if d.edge.idx() >= complex.edges.len() {
                    return Err(err(format!("square {sq_name:?} references missing edge")));
                }
            }
            // Corner compatibility of the parametrization.
            let checks = [
                (complex.initial(sides.bottom), complex.initial(sides.left), "s(0,0)"),
                (complex.terminal(sides.bottom), complex.initial(sides.right), "s(1,0)"),
                (complex.terminal(sides.left), complex.initial(sides.top), "s(0,1)"),
                (complex.terminal(sides.right), complex.terminal(sides.top), "s(1,1)"),
            ];
            for (a, b, at) in checks {
                if a != b {
                    return Err(err(format!(
                        "square {sq_name:?}: corner incompatibility at {at}"
                    )));
                }
            }
            let id = SquareId(i as u32);
            if complex.square_lookup.insert(sq_name.clone(), id).is_some() {
                return Err(err(format!("duplicate square {sq_name:?}")));
            }
            complex.square_canon.entry(sides.canonical().0).or_default().push(id);
            complex.squares.push(SquareData { name: sq_name, sides });
        }

        for (i, spec) in cubes.into_iter().enumerate() {
            if spec.bottom.idx() >= complex.squares.len()
                || spec.top.idx() >= complex.squares.len()
            {
                return Err(err(format!("cube {:?} references missing square", spec.name)));
            }
            let data = complex.resolve_cube(spec)?;
            let id = Cube3Id(i as u32);
            if complex.cube_lookup.insert(data.name.clone(), id).is_some() {
                return Err(err(format!("duplicate cube {:?}", data.name)));
            }
            complex.cubes.push(data);
        }

        let mut ends_at = vec![Vec::new(); complex.vertices.len()];
        for (i, e) in complex.edges.iter().enumerate() {
            ends_at[e.init.idx()].push(DirectedEdge::fwd(EdgeId(i as u32)));
            ends_at[e.term.idx()].push(DirectedEdge::rev(EdgeId(i as u32)));
        }
        for v in ends_at.iter_mut() {
            v.sort();
        }
        complex.ends_at = ends_at;
        Ok(complex)
    }

    /// Find the twist making the corner edges and side squares consistent.
    fn resolve_cube(&self, spec: CubeSpec) -> Result<Cube3Data> {
        let err =
            |msg: String| Error::structure(&self.name, format!("cube {:?}: {msg}", spec.name));
        let bottom = self.squares[spec.bottom.idx()].sides;
        let top = self.squares[spec.top.idx()].sides;
        for (k, c) in CORNERS.iter().enumerate() {
            if spec.corners[k].edge.idx() >= self.edges.len() {
                return Err(err("corner edge missing".into()));
            }
            if self.initial(spec.corners[k]) != self.square_corner_vertex(&bottom, *c) {
                return Err(err(format!(
                    "corner edge {} does not start at bottom corner ({},{})",
                    self.edge_token(spec.corners[k]),
                    c.0,
                    c.1
                )));
            }
        }
        let candidates: Vec<Dihedral> = match spec.twist {
            Some(t) => vec![t],
            None => Dihedral::ALL.to_vec(),
        };
        let mut endpoint_ok = false;
        for h in candidates {
            if !CORNERS.iter().enumerate().all(|(k, c)| {
                self.terminal(spec.corners[k]) == self.square_corner_vertex(&top, h.corner(*c))
            }) {
                continue;
            }
            endpoint_ok = true;
            let data = Cube3Data {
                name: spec.name.clone(),
                bottom: spec.bottom,
                top: spec.top,
                corners: spec.corners,
                twist: h,
            };
            if self
                .cube_side_faces(&data)
                .iter()
                .all(|f| self.find_square_upto_dihedral(f).is_some())
            {
                return Ok(data);
            }
        }
        if endpoint_ok {
            Err(err("a side square of the cube is missing from the complex".into()))
        } else {
            Err(err("corner edges do not join matching corners of bottom and top".into()))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn n_squares(&self) -> usize {
        self.squares.len()
    }
    pub fn n_cubes(&self) -> usize {
        self.cubes.len()
    }

    pub fn cell_counts(&self) -> [usize; 4] {
        [self.n_vertices(), self.n_edges(), self.n_squares(), self.n_cubes()]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u32).map(VertexId)
    }
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }
    pub fn square_ids(&self) -> impl Iterator<Item = SquareId> {
        (0..self.squares.len() as u32).map(SquareId)
    }
    pub fn cube_ids(&self) -> impl Iterator<Item = Cube3Id> {
        (0..self.cubes.len() as u32).map(Cube3Id)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.idx()]
    }
    pub fn edge(&self, e: EdgeId) -> &EdgeData {
        &self.edges[e.idx()]
    }
    pub fn square(&self, s: SquareId) -> &SquareData {
        &self.squares[s.idx()]
    }
    pub fn cube(&self, c: Cube3Id) -> &Cube3Data {
        &self.cubes[c.idx()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_lookup.get(name).copied()
    }
    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_lookup.get(name).copied()
    }
    pub fn square_by_name(&self, name: &str) -> Option<SquareId> {
        self.square_lookup.get(name).copied()
    }

    pub fn initial(&self, d: DirectedEdge) -> VertexId {
        let e = &self.edges[d.edge.idx()];
        if d.forward {
            e.init
        } else {
            e.term
        }
    }

    pub fn terminal(&self, d: DirectedEdge) -> VertexId {
        self.initial(d.reversed())
    }

    /// Edge-ends at `v`: directed edges with initial vertex `v`, sorted.
    pub fn ends_at(&self, v: VertexId) -> &[DirectedEdge] {
        &self.ends_at[v.idx()]
    }

    pub fn edge_token(&self, d: DirectedEdge) -> String {
        format!("{}{}", self.edges[d.edge.idx()].name, if d.forward { "+" } else { "-" })
    }

    pub fn square_corner_vertex(&self, sides: &SquareSides, c: Corner) -> VertexId {
        match c {
            (0, 0) => self.initial(sides.bottom),
            (1, 0) => self.terminal(sides.bottom),
            (0, 1) => self.initial(sides.top),
            (1, 1) => self.terminal(sides.top),
            _ => unreachable!(),
        }
    }

    /// The two edge-ends of a square corner, both directed away from the
    /// corner vertex.
    pub fn square_corner_ends(&self, sides: &SquareSides, c: Corner) -> (DirectedEdge, DirectedEdge) {
        match c {
            (0, 0) => (sides.bottom, sides.left),
            (1, 0) => (sides.bottom.reversed(), sides.right),
            (0, 1) => (sides.top, sides.left.reversed()),
            (1, 1) => (sides.top.reversed(), sides.right.reversed()),
            _ => unreachable!(),
        }
    }

    /// The four side faces a cube induces, in order y=0, y=1, x=0, x=1.
    pub fn cube_side_faces(&self, cube: &Cube3Data) -> [SquareSides; 4] {
        let b = self.squares[cube.bottom.idx()].sides;
        let t = self.squares[cube.top.idx()].sides.transformed(cube.twist);
        let e = cube.corners;
        [
            SquareSides { bottom: b.bottom, right: e[1], top: t.bottom, left: e[0] },
            SquareSides { bottom: b.top, right: e[3], top: t.top, left: e[2] },
            SquareSides { bottom: b.left, right: e[2], top: t.left, left: e[0] },
            SquareSides { bottom: b.right, right: e[3], top: t.right, left: e[1] },
        ]
    }

    /// All six face squares of a cube, resolved to stored squares.
    pub fn cube_face_ids(&self, cube: &Cube3Data) -> [SquareId; 6] {
        let sides = self.cube_side_faces(cube);
        let mut out = [cube.bottom, cube.top, cube.bottom, cube.bottom, cube.bottom, cube.bottom];
        for (i, f) in sides.iter().enumerate() {
            let (id, _) = self
                .find_square_upto_dihedral(f)
                .expect("cube side faces exist after resolution");
            out[2 + i] = id;
        }
        out
    }

    /// The eight corner stars of a cube: (vertex, three edge-ends).
    pub fn cube_corner_stars(&self, cube: &Cube3Data) -> [(VertexId, [DirectedEdge; 3]); 8] {
        let b = self.squares[cube.bottom.idx()].sides;
        let t = self.squares[cube.top.idx()].sides;
        let mut out = [(VertexId(0), [b.bottom; 3]); 8];
        for (k, c) in CORNERS.iter().enumerate() {
            let v = self.square_corner_vertex(&b, *c);
            let (x, y) = self.square_corner_ends(&b, *c);
            out[k] = (v, [x, y, cube.corners[k]]);
            let tc = cube.twist.corner(*c);
            let tv = self.square_corner_vertex(&t, tc);
            let (tx, ty) = self.square_corner_ends(&t, tc);
            out[4 + k] = (tv, [tx, ty, cube.corners[k].reversed()]);
        }
        out
    }

    /// Look up a stored square equal to `query` after some reparametrization.
    /// Returns the square and the element `g` with `query = stored . g`.
    pub fn find_square_upto_dihedral(&self, query: &SquareSides) -> Option<(SquareId, Dihedral)> {
        let (canon, _) = query.canonical();
        let ids = self.square_canon.get(&canon)?;
        for g in Dihedral::ALL {
            for &id in ids {
                if self.squares[id.idx()].sides.transformed(g) == *query {
                    return Some((id, g));
                }
            }
        }
        None
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_squares() as i64
            - self.n_cubes() as i64
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = vec![VertexId(0)];
        seen[0] = true;
        while let Some(v) = queue.pop() {
            for d in self.ends_at(v) {
                let w = self.terminal(*d);
                if !seen[w.idx()] {
                    seen[w.idx()] = true;
                    queue.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The link of `v`: edge-ends as vertices, square corners as edges, cube
    /// corners as triangles. Deduplicated and sorted.
    pub fn link(&self, v: VertexId) -> LinkComplex {
        let vertices = self.ends_at(v).to_vec();
        let mut edges = BTreeSet::new();
        for sq in &self.squares {
            for c in CORNERS {
                if self.square_corner_vertex(&sq.sides, c) == v {
                    let (x, y) = self.square_corner_ends(&sq.sides, c);
                    edges.insert(sorted_pair(x, y));
                }
            }
        }
        let mut triangles = BTreeSet::new();
        for cube in &self.cubes {
            for (w, star) in self.cube_corner_stars(cube) {
                if w == v {
                    triangles.insert(sorted_triple(star));
                }
            }
        }
        LinkComplex {
            vertex: v,
            vertices,
            edges: edges.into_iter().collect(),
            triangles: triangles.into_iter().collect(),
        }
    }

    /// NPC check: every vertex link must be a simplicial flag complex.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        // Corner-pair instances bucketed per vertex.
        let mut pair_instances: BTreeMap<VertexId, Vec<((DirectedEdge, DirectedEdge), SquareId)>> =
            BTreeMap::new();
        for (i, sq) in self.squares.iter().enumerate() {
            for c in CORNERS {
                let v = self.square_corner_vertex(&sq.sides, c);
                let (x, y) = self.square_corner_ends(&sq.sides, c);
                pair_instances
                    .entry(v)
                    .or_default()
                    .push((sorted_pair(x, y), SquareId(i as u32)));
            }
        }
        let mut triangle_instances: BTreeMap<VertexId, Vec<([DirectedEdge; 3], Cube3Id)>> =
            BTreeMap::new();
        for (i, cube) in self.cubes.iter().enumerate() {
            for (v, star) in self.cube_corner_stars(cube) {
                triangle_instances
                    .entry(v)
                    .or_default()
                    .push((sorted_triple(star), Cube3Id(i as u32)));
            }
        }

        for v in self.vertex_ids() {
            let pairs = pair_instances.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            let mut seen: BTreeMap<(DirectedEdge, DirectedEdge), SquareId> = BTreeMap::new();
            let mut adjacency: BTreeSet<(DirectedEdge, DirectedEdge)> = BTreeSet::new();
            for ((x, y), sq) in pairs {
                if x == y {
                    violations.push(NpcViolation::LoopedLinkEdge { vertex: v, end: *x, square: *sq });
                    continue;
                }
                if let Some(first) = seen.get(&(*x, *y)) {
                    violations.push(NpcViolation::DoubleLinkEdge {
                        vertex: v,
                        ends: (*x, *y),
                        squares: (*first, *sq),
                    });
                } else {
                    seen.insert((*x, *y), *sq);
                }
                adjacency.insert((*x, *y));
            }

            let tris = triangle_instances.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            let mut seen_tri: BTreeMap<[DirectedEdge; 3], Cube3Id> = BTreeMap::new();
            let mut triangle_set: BTreeSet<[DirectedEdge; 3]> = BTreeSet::new();
            for (t, cube) in tris {
                if t[0] == t[1] || t[1] == t[2] {
                    violations.push(NpcViolation::DegenerateTriangle { vertex: v, cube: *cube });
                    continue;
                }
                if let Some(first) = seen_tri.get(t) {
                    violations.push(NpcViolation::DoubleLinkTriangle {
                        vertex: v,
                        ends: *t,
                        cubes: (*first, *cube),
                    });
                } else {
                    seen_tri.insert(*t, *cube);
                }
                triangle_set.insert(*t);
            }

            // Flag condition on triples and quadruples of link vertices.
            let ends = self.ends_at(v);
            let adj = |a: DirectedEdge, b: DirectedEdge| adjacency.contains(&sorted_pair(a, b));
            for i in 0..ends.len() {
                for j in i + 1..ends.len() {
                    if !adj(ends[i], ends[j]) {
                        continue;
                    }
                    for k in j + 1..ends.len() {
                        if !(adj(ends[i], ends[k]) && adj(ends[j], ends[k])) {
                            continue;
                        }
                        let t = sorted_triple([ends[i], ends[j], ends[k]]);
                        if !triangle_set.contains(&t) {
                            violations.push(NpcViolation::MissingTriangle { vertex: v, ends: t });
                        }
                        for l in k + 1..ends.len() {
                            if adj(ends[i], ends[l]) && adj(ends[j], ends[l]) && adj(ends[k], ends[l])
                            {
                                violations.push(NpcViolation::UnfillableClique {
                                    vertex: v,
                                    ends: [ends[i], ends[j], ends[k], ends[l]],
                                });
                            }
                        }
                    }
                }
            }
        }

        ValidationReport { complex: self.name.clone(), violations }
    }
}

fn sorted_pair(x: DirectedEdge, y: DirectedEdge) -> (DirectedEdge, DirectedEdge) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

fn sorted_triple(mut t: [DirectedEdge; 3]) -> [DirectedEdge; 3] {
    t.sort();
    t
}

/// Link of a single vertex.
#[derive(Clone, Debug)]
pub struct LinkComplex {
    pub vertex: VertexId,
    pub vertices: Vec<DirectedEdge>,
    pub edges: Vec<(DirectedEdge, DirectedEdge)>,
    pub triangles: Vec<[DirectedEdge; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NpcViolation {
    /// A square corner pairs an edge-end with itself.
    LoopedLinkEdge { vertex: VertexId, end: DirectedEdge, square: SquareId },
    /// Two square corners induce the same link edge.
    DoubleLinkEdge {
        vertex: VertexId,
        ends: (DirectedEdge, DirectedEdge),
        squares: (SquareId, SquareId),
    },
    DegenerateTriangle { vertex: VertexId, cube: Cube3Id },
    DoubleLinkTriangle {
        vertex: VertexId,
        ends: [DirectedEdge; 3],
        cubes: (Cube3Id, Cube3Id),
    },
    /// Three pairwise-adjacent link vertices with no filling triangle.
    MissingTriangle { vertex: VertexId, ends: [DirectedEdge; 3] },
    /// Four pairwise-adjacent link vertices; no 3-simplex can fill them in
    /// a complex of dimension at most 3.
    UnfillableClique { vertex: VertexId, ends: [DirectedEdge; 4] },
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub complex: String,
    pub violations: Vec<NpcViolation>,
}

impl ValidationReport {
    pub fn is_npc(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, c: &CubeComplex) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| match v {
                NpcViolation::LoopedLinkEdge { vertex, end, square } => format!(
                    "looped link edge at {}: end {} paired with itself in square {}",
                    c.vertex_name(*vertex),
                    c.edge_token(*end),
                    c.square(*square).name
                ),
                NpcViolation::DoubleLinkEdge { vertex, ends, squares } => format!(
                    "double link edge at {}: ends {},{} from squares {},{}",
                    c.vertex_name(*vertex),
                    c.edge_token(ends.0),
                    c.edge_token(ends.1),
                    c.square(squares.0).name,
                    c.square(squares.1).name
                ),
                NpcViolation::DegenerateTriangle { vertex, cube } => format!(
                    "degenerate link triangle at {} from cube {}",
                    c.vertex_name(*vertex),
                    c.cube(*cube).name
                ),
                NpcViolation::DoubleLinkTriangle { vertex, ends, cubes } => format!(
                    "double link triangle at {}: {},{},{} from cubes {},{}",
                    c.vertex_name(*vertex),
                    c.edge_token(ends[0]),
                    c.edge_token(ends[1]),
                    c.edge_token(ends[2]),
                    c.cube(cubes.0).name,
                    c.cube(cubes.1).name
                ),
                NpcViolation::MissingTriangle { vertex, ends } => format!(
                    "flag violation at {}: pairwise-adjacent ends {},{},{} span no triangle",
                    c.vertex_name(*vertex),
                    c.edge_token(ends[0]),
                    c.edge_token(ends[1]),
                    c.edge_token(ends[2])
                ),
                NpcViolation::UnfillableClique { vertex, ends } => format!(
                    "flag violation at {}: pairwise-adjacent ends {},{},{},{} cannot span a 3-simplex",
                    c.vertex_name(*vertex),
                    c.edge_token(ends[0]),
                    c.edge_token(ends[1]),
                    c.edge_token(ends[2]),
                    c.edge_token(ends[3])
                ),
            })
            .collect()
    }
}

/// A face-closed collection of cells of an ambient complex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subcomplex {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
    pub squares: BTreeSet<SquareId>,
    pub cubes: BTreeSet<Cube3Id>,
}

impl Subcomplex {
    pub fn full(c: &CubeComplex) -> Subcomplex {
        Subcomplex {
            vertices: c.vertex_ids().collect(),
            edges: c.edge_ids().collect(),
            squares: c.square_ids().collect(),
            cubes: c.cube_ids().collect(),
        }
    }

    /// Close the given cells under faces.
    pub fn closure(c: &CubeComplex, cells: Subcomplex) -> Subcomplex {
        let mut out = cells;
        for cu in out.cubes.clone() {
            for f in c.cube_face_ids(c.cube(cu)) {
                out.squares.insert(f);
            }
        }
        for s in out.squares.clone() {
            for d in c.square(s).sides.sides() {
                out.edges.insert(d.edge);
            }
        }
        for e in out.edges.clone() {
            let data = c.edge(e);
            out.vertices.insert(data.init);
            out.vertices.insert(data.term);
        }
        out
    }

    pub fn is_face_closed(&self, c: &CubeComplex) -> bool {
        *self == Subcomplex::closure(c, self.clone())
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn dihedral_group_axioms() {
        for g in Dihedral::ALL {
            assert_eq!(g.compose(g.inverse()), Dihedral::IDENTITY);
            assert_eq!(g.inverse().compose(g), Dihedral::IDENTITY);
        }
        // All eight corner actions are distinct.
        let mut images = BTreeSet::new();
        for g in Dihedral::ALL {
            images.insert(CORNERS.map(|c| g.corner(c)));
        }
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn transform_respects_composition() {
        let torus = corpus::torus();
        let sides = torus.square(SquareId(0)).sides;
        for g in Dihedral::ALL {
            for h in Dihedral::ALL {
                assert_eq!(
                    sides.transformed(g).transformed(h),
                    sides.transformed(g.compose(h))
                );
            }
        }
    }

    #[test]
    fn torus_is_npc_with_four_cycle_link() {
        let t = corpus::torus();
        assert!(t.validate().is_npc());
        let link = t.link(VertexId(0));
        assert_eq!(link.vertices.len(), 4);
        assert_eq!(link.edges.len(), 4);
        assert!(link.triangles.is_empty());
        // The four link edges form a cycle: every link vertex has degree 2.
        for v in &link.vertices {
            let deg = link.edges.iter().filter(|(x, y)| x == v || y == v).count();
            assert_eq!(deg, 2);
        }
    }

    #[test]
    fn degenerate_loop_square_parses_but_is_not_npc() {
        let c = corpus::loop_square();
        let report = c.validate();
        assert!(!report.is_npc());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, NpcViolation::LoopedLinkEdge { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, NpcViolation::DoubleLinkEdge { .. })));
    }

    #[test]
    fn rose_link_has_no_edges() {
        let r = corpus::rose(2);
        assert!(r.validate().is_npc());
        let link = r.link(VertexId(0));
        assert_eq!(link.vertices.len(), 4);
        assert!(link.edges.is_empty());
    }

    #[test]
    fn cycle_times_interval_link_is_a_path() {
        let c = corpus::graph_times_interval(&corpus::cycle(3)).unwrap();
        assert!(c.validate().is_npc());
        for v in c.vertex_ids() {
            let link = c.link(v);
            assert_eq!(link.vertices.len(), 3);
            assert_eq!(link.edges.len(), 2);
        }
    }

    #[test]
    fn solid_cube_is_npc_and_corner_without_filler_violates_flag() {
        let cube = corpus::solid_cube();
        assert!(cube.validate().is_npc());
        assert_eq!(cube.euler_characteristic(), 1);

        let hollow = corpus::cube_corner_without_filler();
        let report = hollow.validate();
        assert!(!report.is_npc());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, NpcViolation::MissingTriangle { .. })));
    }

    #[test]
    fn klein_square_is_npc() {
        assert!(corpus::klein_square().validate().is_npc());
    }

    #[test]
    fn one_dimensional_complexes_are_npc() {
        for n in 1..6 {
            assert!(corpus::rose(n).validate().is_npc());
            assert!(corpus::cycle(n.max(1)).validate().is_npc());
        }
    }

    #[test]
    fn link_edge_count_is_bounded_by_pairs() {
        for c in [corpus::torus(), corpus::solid_cube(), corpus::klein_square()] {
            for v in c.vertex_ids() {
                let link = c.link(v);
                let n = link.vertices.len();
                assert!(link.edges.len() <= n * (n - 1) / 2);
            }
        }
    }

    #[test]
    fn subcomplex_closure_is_face_closed() {
        let t = corpus::torus();
        let mut sub = Subcomplex::default();
        sub.squares.insert(SquareId(0));
        let closed = Subcomplex::closure(&t, sub);
        assert!(closed.is_face_closed(&t));
        assert_eq!(closed.vertices.len(), 1);
        assert_eq!(closed.edges.len(), 2);
    }
}
